//! Masked iterated function systems on the unit square or cube.

use crate::error::{Error, Result};
use crate::geometry::{AffineMap, Point};
use crate::mask::{Address, MaskKind, MaskSpec, Symbol};

/// An ordered family of `N >= 2` invertible affine contractions of `[0,1]^D`
/// together with a mask that picks one address per point.
#[derive(Clone, Debug, PartialEq)]
pub struct IfsSystem<const D: usize> {
    maps: Vec<AffineMap<D>>,
    mask: MaskSpec,
    rule: Rule,
    c_max: f64,
    c_min: f64,
    d_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
enum Rule {
    Priority(Vec<usize>),
    Strip {
        axis: usize,
        threshold: f64,
        low_edge: Vec<f64>,
        high_edge: Vec<f64>,
    },
}

impl<const D: usize> IfsSystem<D> {
    /// Checks the structural invariants: at least two maps, every map a
    /// contraction with positive Lipschitz constant that keeps the unit domain
    /// inside itself, and a well-formed mask.
    pub fn new(maps: Vec<AffineMap<D>>, mask: MaskSpec) -> Result<Self> {
        let n = maps.len();
        if n < 2 {
            return Err(Error::Incompatible(format!("an IFS needs at least 2 maps, got {n}")));
        }
        if n >= u8::MAX as usize {
            return Err(Error::Unsupported(format!("{n} maps exceed the symbol alphabet")));
        }
        if !(mask.tolerance >= 0.0 && mask.tolerance.is_finite()) {
            return Err(Error::InvalidMask(format!("tolerance {} must be >= 0", mask.tolerance)));
        }
        for (index, m) in maps.iter().enumerate() {
            let l = m.lipschitz();
            if !(l < 1.0 && l > 0.0) {
                return Err(Error::NonContractive { index, lipschitz: l });
            }
            if !m.maps_unit_into_itself(mask.tolerance) {
                return Err(Error::MapLeavesDomain { index });
            }
        }
        let rule = Rule::build(&maps, &mask)?;
        let c_max = maps.iter().map(AffineMap::lipschitz).fold(0.0, f64::max);
        let c_min = maps.iter().map(AffineMap::lipschitz).fold(f64::INFINITY, f64::min);
        let d_max = maps.iter().map(AffineMap::expansion).fold(0.0, f64::max);
        Ok(IfsSystem {
            maps,
            mask,
            rule,
            c_max,
            c_min,
            d_max,
        })
    }

    pub fn maps(&self) -> &[AffineMap<D>] {
        &self.maps
    }

    pub fn map(&self, s: Symbol) -> &AffineMap<D> {
        &self.maps[s.index()]
    }

    pub fn mask(&self) -> &MaskSpec {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Largest contraction factor `c`.
    pub fn contraction(&self) -> f64 {
        self.c_max
    }

    /// Smallest contraction factor.
    pub fn min_contraction(&self) -> f64 {
        self.c_min
    }

    /// Expansion factor of the masked dynamical system: the largest
    /// stretch of any inverse map.
    pub fn expansion(&self) -> f64 {
        self.d_max
    }

    /// The same maps under a different mask.
    pub fn with_mask(&self, mask: MaskSpec) -> Result<Self> {
        Self::new(self.maps.clone(), mask)
    }

    /// The mask cell claiming `p`, together with the preimage under that map
    /// (unclamped). `step` only labels an escape error.
    #[inline]
    fn claim(&self, p: &Point<D>, step: usize) -> Result<(usize, Point<D>)> {
        let tol = self.mask.tolerance;
        match &self.rule {
            Rule::Priority(order) => {
                for &i in order {
                    let q = self.maps[i].apply_inverse(p);
                    if q.in_unit(tol) {
                        return Ok((i, q));
                    }
                }
            }
            Rule::Strip {
                axis,
                threshold,
                low_edge,
                high_edge,
            } => {
                let low_side = p[*axis] < *threshold;
                let mut best: Option<(usize, Point<D>)> = None;
                for (i, m) in self.maps.iter().enumerate() {
                    let q = m.apply_inverse(p);
                    if !q.in_unit(tol) {
                        continue;
                    }
                    let better = match &best {
                        None => true,
                        Some((j, _)) if low_side => low_edge[i] < low_edge[*j],
                        Some((j, _)) => high_edge[i] > high_edge[*j],
                    };
                    if better {
                        best = Some((i, q));
                    }
                }
                if let Some(hit) = best {
                    return Ok(hit);
                }
            }
        }
        Err(Error::OrbitEscaped {
            point: p.0.to_vec(),
            step,
        })
    }

    /// Which mask cell `p` lies in.
    pub fn mask_index(&self, p: &Point<D>) -> Result<Symbol> {
        self.claim(p, 0).map(|(i, _)| Symbol::from_index(i))
    }

    /// One step of the masked dynamical system: `(i, f_i^{-1}(p))` for the cell
    /// `i` claiming `p`. The preimage is clamped into the unit domain.
    #[inline]
    pub fn masked_step(&self, p: &Point<D>) -> Result<(Symbol, Point<D>)> {
        self.step_at(p, 0)
    }

    #[inline]
    pub(crate) fn step_at(&self, p: &Point<D>, step: usize) -> Result<(Symbol, Point<D>)> {
        let (i, q) = self.claim(p, step)?;
        Ok((Symbol::from_index(i), q.clamped()))
    }

    /// The first `m` symbols of the masked address of `p`.
    pub fn section_address(&self, p: &Point<D>, m: usize) -> Result<Address> {
        let mut symbols = Vec::with_capacity(m);
        let mut x = *p;
        for step in 0..m {
            let (s, next) = self.step_at(&x, step)?;
            symbols.push(s);
            x = next;
        }
        Ok(Address::new(symbols))
    }

    /// `f_{σ_1} ∘ … ∘ f_{σ_k}` applied to the origin.
    pub fn coding_map(&self, addr: &Address) -> Point<D> {
        self.code_from(addr.symbols(), Point::ORIGIN)
    }

    /// Applies the maps of `symbols` innermost-last to `base`.
    #[inline]
    pub fn code_from(&self, symbols: &[Symbol], base: Point<D>) -> Point<D> {
        symbols
            .iter()
            .rev()
            .fold(base, |p, s| self.maps[s.index()].apply(&p))
    }

    /// Whether some point within `radius` (per axis) of `p` belongs to a
    /// different mask cell, or lies outside every cell.
    pub fn near_mask_boundary(&self, p: &Point<D>, radius: f64) -> bool {
        let Ok(here) = self.mask_index(p) else {
            return true;
        };
        let offsets = 3usize.pow(D as u32);
        (0..offsets).any(|code| {
            let mut q = *p;
            let mut c = code;
            for k in 0..D {
                q[k] += (c % 3) as f64 * radius - radius;
                c /= 3;
            }
            if !q.in_unit(0.0) {
                return false;
            }
            self.mask_index(&q).map_or(true, |s| s != here)
        })
    }
}

/// A system of either supported dimension, as read from a config.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySystem {
    Planar(IfsSystem<2>),
    Spatial(IfsSystem<3>),
}

impl AnySystem {
    pub fn dimension(&self) -> usize {
        match self {
            AnySystem::Planar(_) => 2,
            AnySystem::Spatial(_) => 3,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnySystem::Planar(s) => s.len(),
            AnySystem::Spatial(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn planar(&self) -> Result<&IfsSystem<2>> {
        match self {
            AnySystem::Planar(s) => Ok(s),
            AnySystem::Spatial(_) => Err(Error::Incompatible("expected a 2D system, got 3D".into())),
        }
    }

    pub fn spatial(&self) -> Result<&IfsSystem<3>> {
        match self {
            AnySystem::Spatial(s) => Ok(s),
            AnySystem::Planar(_) => Err(Error::Incompatible("expected a 3D system, got 2D".into())),
        }
    }

    pub fn validate(&self) -> crate::families::ValidationReport {
        match self {
            AnySystem::Planar(s) => crate::families::validate_ifs(s),
            AnySystem::Spatial(s) => crate::families::validate_ifs(s),
        }
    }
}

impl Rule {
    fn build<const D: usize>(maps: &[AffineMap<D>], mask: &MaskSpec) -> Result<Rule> {
        let n = maps.len();
        match &mask.kind {
            MaskKind::TopsPriority(order) => {
                let mut seen = vec![false; n];
                for s in order {
                    let i = s.get() as usize;
                    if i == 0 || i > n || seen[i - 1] {
                        return Err(Error::InvalidMask(format!(
                            "priority order {:?} is not a permutation of 1..{n}",
                            order.iter().map(|s| s.get()).collect::<Vec<_>>()
                        )));
                    }
                    seen[i - 1] = true;
                }
                if order.len() != n {
                    return Err(Error::InvalidMask(format!(
                        "priority order has {} entries for {n} maps",
                        order.len()
                    )));
                }
                Ok(Rule::Priority(order.iter().map(|s| s.index()).collect()))
            }
            MaskKind::StripThreshold { axis, threshold } => {
                if *axis >= D {
                    return Err(Error::InvalidMask(format!("strip axis {axis} >= dimension {D}")));
                }
                if !threshold.is_finite() {
                    return Err(Error::InvalidMask("strip threshold must be finite".into()));
                }
                let (low_edge, high_edge) = maps
                    .iter()
                    .map(|m| {
                        let (lo, hi) = m.image_bounds();
                        (lo[*axis], hi[*axis])
                    })
                    .unzip();
                Ok(Rule::Strip {
                    axis: *axis,
                    threshold: *threshold,
                    low_edge,
                    high_edge,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::family_quad2d;

    fn eq1() -> IfsSystem<2> {
        family_quad2d(0.5, 0.5).unwrap()
    }

    #[test]
    fn expansion_uses_the_weakest_axis() {
        let sys = crate::families::family_corner3d([0.35, 0.5, 0.65]).unwrap();
        assert!((sys.contraction() - 0.65).abs() < 1e-12);
        assert!((sys.expansion() - 1.0 / 0.35).abs() < 1e-12);
    }

    #[test]
    fn mask_index_examples() {
        let sys = eq1();
        assert_eq!(sys.mask_index(&Point([0.5, 0.5])).unwrap().get(), 1);
        assert_eq!(sys.mask_index(&Point([0.0, 0.0])).unwrap().get(), 1);
        assert_eq!(sys.mask_index(&Point([1.0, 1.0])).unwrap().get(), 3);
    }

    #[test]
    fn masked_step_examples() {
        let sys = eq1();
        let (s, q) = sys.masked_step(&Point([0.5, 0.5])).unwrap();
        assert_eq!((s.get(), q), (1, Point([1.0, 1.0])));
        let (s, q) = sys.masked_step(&Point([0.0, 0.0])).unwrap();
        assert_eq!((s.get(), q), (1, Point([0.0, 0.0])));
        let (s, q) = sys.masked_step(&Point([0.75, 0.25])).unwrap();
        assert_eq!((s.get(), q), (2, Point([0.5, 0.5])));
    }

    #[test]
    fn section_address_examples() {
        let sys = eq1();
        assert_eq!(sys.section_address(&Point([0.5, 0.5]), 4).unwrap().values(), [1, 3, 3, 3]);
        assert_eq!(sys.section_address(&Point([0.0, 0.0]), 4).unwrap().values(), [1, 1, 1, 1]);
        assert_eq!(sys.section_address(&Point([1.0, 1.0]), 4).unwrap().values(), [3, 3, 3, 3]);
    }

    #[test]
    fn coding_map_examples() {
        let sys = eq1();
        let ones = Address::from_ones(&[1; 12]);
        assert!(sys.coding_map(&ones).max_dist(&Point::ORIGIN) <= 0.5f64.powi(12));

        // [1,3,3,…] codes g_1 of the fixed point (1,1) of g_3, i.e. (a, b).
        let g = family_quad2d(0.3, 0.3).unwrap();
        let code = |m: usize| {
            let mut v = vec![1u8];
            v.extend(std::iter::repeat_n(3u8, m - 1));
            g.coding_map(&Address::from_ones(&v))
        };
        let bound = 0.7f64.powi(21) / 0.3;
        assert!(code(20).max_dist(&Point([0.3, 0.3])) <= bound);
        assert!(code(31).dist(&Point([0.3, 0.3])) < 1e-5);

        for i in 1..=4u8 {
            let s = Symbol::new(i).unwrap();
            assert_eq!(g.coding_map(&Address::from_ones(&[i])), g.map(s).apply(&Point::ORIGIN));
        }
    }

    #[test]
    fn escape_beyond_tolerance_is_reported() {
        let sys = eq1();
        let err = sys.section_address(&Point([1.0 + 1e-6, 0.5]), 3).unwrap_err();
        match err {
            Error::OrbitEscaped { step, point } => {
                assert_eq!(step, 0);
                assert_eq!(point[0], 1.0 + 1e-6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn drift_within_tolerance_is_clamped() {
        let sys = eq1();
        let (s, q) = sys.masked_step(&Point([1.0 + 1e-12, 0.25])).unwrap();
        assert_eq!(s.get(), 2);
        assert!(q.in_unit(0.0));
    }

    #[test]
    fn bad_priority_order_rejected() {
        let maps = eq1().maps().to_vec();
        let order = [1u8, 2, 2, 4].iter().map(|&v| Symbol::new(v).unwrap()).collect();
        assert!(matches!(
            IfsSystem::new(maps, MaskSpec::priority(order)),
            Err(Error::InvalidMask(_))
        ));
    }

    #[test]
    fn priority_order_changes_boundary_claims() {
        let maps = eq1().maps().to_vec();
        let order = [3u8, 2, 1, 4].iter().map(|&v| Symbol::new(v).unwrap()).collect();
        let sys = IfsSystem::new(maps, MaskSpec::priority(order)).unwrap();
        assert_eq!(sys.mask_index(&Point([0.5, 0.5])).unwrap().get(), 3);
    }

    #[test]
    fn single_map_rejected() {
        let m = AffineMap::diagonal([0.5, 0.5], [0.0, 0.0]).unwrap();
        assert!(IfsSystem::new(vec![m], MaskSpec::tops(1)).is_err());
    }

    #[test]
    fn boundary_detection() {
        let sys = eq1();
        assert!(sys.near_mask_boundary(&Point([0.5 + 1e-3, 0.2]), 2e-3));
        assert!(!sys.near_mask_boundary(&Point([0.3, 0.2]), 2e-3));
    }
}
