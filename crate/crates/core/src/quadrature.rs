//! Five-point Gauss–Legendre rules on a single block.

/// Nodes on [-1, 1].
const NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];

const WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Integral of `f` over `[a, b]` with one 5-point Gauss–Legendre panel.
pub fn gauss_legendre_5(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    NODES
        .iter()
        .zip(WEIGHTS)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Tensor-product rule over `[a0, b0] x [a1, b1]` (25 points).
pub fn gauss_legendre_5x5(
    (a0, b0): (f64, f64),
    (a1, b1): (f64, f64),
    mut f: impl FnMut(f64, f64) -> f64,
) -> f64 {
    gauss_legendre_5(a0, b0, |s| gauss_legendre_5(a1, b1, |t| f(s, t)))
}
