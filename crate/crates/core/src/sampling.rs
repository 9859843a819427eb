//! Deterministic low-discrepancy samples of the unit square/cube.
//!
//! Additive recurrence on the generalised golden ratio: the generator is
//! irrational per axis, so samples never sit on the dyadic cell boundaries
//! of the built-in families.

use crate::geometry::Point;

/// Root of `x^(D+1) = x + 1`, by Newton iteration.
fn plastic_root(d: usize) -> f64 {
    let mut x: f64 = 2.0;
    for _ in 0..64 {
        let f = x.powi(d as i32 + 1) - x - 1.0;
        let df = (d as f64 + 1.0) * x.powi(d as i32) - 1.0;
        x -= f / df;
    }
    x
}

/// The `count` first points of the sequence, starting at index 1.
pub fn quasi_random<const D: usize>(count: usize) -> impl Iterator<Item = Point<D>> {
    let g = plastic_root(D);
    let mut alpha = [0.0; D];
    for (k, a) in alpha.iter_mut().enumerate() {
        *a = (1.0 / g.powi(k as i32 + 1)).fract();
    }
    (1..=count).map(move |n| {
        let mut p = [0.0; D];
        for k in 0..D {
            p[k] = (0.5 + alpha[k] * n as f64).fract();
        }
        Point(p)
    })
}
