//! Points of the unit domain and invertible affine maps acting on them.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Matrices with `|det|` at or below this are treated as singular.
pub const SINGULAR_DET: f64 = 1e-12;

/// A point of `[0,1]^D`, `D` being 2 or 3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<const D: usize>(pub [f64; D]);

impl<const D: usize> Point<D> {
    pub const ORIGIN: Self = Point([0.0; D]);

    pub fn new(coords: [f64; D]) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64; D] {
        &self.0
    }

    /// Largest coordinate-wise distance.
    pub fn max_dist(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// True when every coordinate lies in `[-tol, 1 + tol]`.
    pub fn in_unit(&self, tol: f64) -> bool {
        self.0.iter().all(|&c| c >= -tol && c <= 1.0 + tol)
    }

    pub fn clamped(mut self) -> Self {
        for c in &mut self.0 {
            *c = c.clamp(0.0, 1.0);
        }
        self
    }
}

impl<const D: usize> Index<usize> for Point<D> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const D: usize> IndexMut<usize> for Point<D> {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// `x ↦ linear · x + offset` with a cached inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap<const D: usize> {
    linear: [[f64; D]; D],
    offset: [f64; D],
    inverse: [[f64; D]; D],
    det: f64,
    lipschitz: f64,
    expansion: f64,
}

impl<const D: usize> AffineMap<D> {
    /// Builds the map, rejecting singular linear parts.
    pub fn new(linear: [[f64; D]; D], offset: [f64; D]) -> Result<Self> {
        Self::with_index(linear, offset, 0)
    }

    pub(crate) fn with_index(linear: [[f64; D]; D], offset: [f64; D], index: usize) -> Result<Self> {
        let m = to_matrix(&linear);
        let det = m.determinant();
        if !det.is_finite() || det.abs() <= SINGULAR_DET {
            return Err(Error::SingularMap { index, det });
        }
        let inv = m
            .try_inverse()
            .ok_or(Error::SingularMap { index, det })?;
        let mut inverse = [[0.0; D]; D];
        for (r, row) in inverse.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = inv[(r, c)];
            }
        }
        Ok(AffineMap {
            linear,
            offset,
            inverse,
            det,
            lipschitz: spectral_norm(&linear),
            expansion: spectral_norm(&inverse),
        })
    }

    /// Diagonal linear part; the shape every built-in family uses.
    pub fn diagonal(scale: [f64; D], offset: [f64; D]) -> Result<Self> {
        let mut linear = [[0.0; D]; D];
        for k in 0..D {
            linear[k][k] = scale[k];
        }
        Self::new(linear, offset)
    }

    pub fn linear(&self) -> &[[f64; D]; D] {
        &self.linear
    }

    pub fn offset(&self) -> &[f64; D] {
        &self.offset
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// Operator 2-norm of the linear part.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Operator 2-norm of the inverse linear part: how far the inverse map
    /// can stretch a distance. Equals `1 / lipschitz` only for similarities.
    pub fn expansion(&self) -> f64 {
        self.expansion
    }

    #[inline]
    pub fn apply(&self, p: &Point<D>) -> Point<D> {
        let mut out = self.offset;
        for (r, o) in out.iter_mut().enumerate() {
            for c in 0..D {
                *o += self.linear[r][c] * p.0[c];
            }
        }
        Point(out)
    }

    #[inline]
    pub fn apply_inverse(&self, p: &Point<D>) -> Point<D> {
        let mut shifted = p.0;
        for (s, o) in shifted.iter_mut().zip(&self.offset) {
            *s -= o;
        }
        let mut out = [0.0; D];
        for (r, o) in out.iter_mut().enumerate() {
            for c in 0..D {
                *o += self.inverse[r][c] * shifted[c];
            }
        }
        Point(out)
    }

    /// Images of the `2^D` corners of the unit domain.
    pub fn corner_images(&self) -> Vec<Point<D>> {
        (0..1usize << D)
            .map(|bits| {
                let mut corner = [0.0; D];
                for (k, c) in corner.iter_mut().enumerate() {
                    *c = ((bits >> k) & 1) as f64;
                }
                self.apply(&Point(corner))
            })
            .collect()
    }

    /// Axis-aligned bounding box `(lo, hi)` of the image of the unit domain.
    pub fn image_bounds(&self) -> ([f64; D], [f64; D]) {
        let mut lo = [f64::INFINITY; D];
        let mut hi = [f64::NEG_INFINITY; D];
        for p in self.corner_images() {
            for k in 0..D {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Whether the image of `[0,1]^D` stays inside it, up to `tol`.
    /// Checking the corners suffices for an affine map on a convex domain.
    pub fn maps_unit_into_itself(&self, tol: f64) -> bool {
        self.corner_images().iter().all(|p| p.in_unit(tol))
    }
}

/// Largest singular value of the linear part of `m`.
pub fn contraction_factor<const D: usize>(m: &AffineMap<D>) -> f64 {
    m.lipschitz()
}

fn to_matrix<const D: usize>(a: &[[f64; D]; D]) -> DMatrix<f64> {
    DMatrix::from_fn(D, D, |r, c| a[r][c])
}

fn spectral_norm<const D: usize>(a: &[[f64; D]; D]) -> f64 {
    to_matrix(a)
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}
