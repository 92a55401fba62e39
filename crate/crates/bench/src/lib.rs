//! Criterion benchmarks for `walsh-svie` live under `benches/`.
