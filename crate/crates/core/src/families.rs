//! Built-in parametric IFS families and validation of arbitrary systems.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::AffineMap;
use crate::mask::MaskSpec;
use crate::sampling::quasi_random;
use crate::system::{AnySystem, IfsSystem};

/// Samples per axis for the cover and overlap estimates.
pub const VALIDATION_SAMPLES_PER_AXIS: usize = 64;

/// Parameters of one of the built-in families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilyParams {
    /// Four maps splitting the square at `(a, b)`.
    Quad2d { a: f64, b: f64 },
    /// Eight maps splitting the cube at `s`.
    Corner3d { s: [f64; 3] },
    /// Two overlapping vertical strips of width `w` (times a split into lower
    /// and upper halves), masked by an x-threshold `t` inside the overlap.
    Strip2d { w: f64, t: f64 },
}

impl FamilyParams {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyParams::Quad2d { .. } => "quad2d",
            FamilyParams::Corner3d { .. } => "corner3d",
            FamilyParams::Strip2d { .. } => "strip2d",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            FamilyParams::Corner3d { .. } => 3,
            _ => 2,
        }
    }

    pub fn build(&self) -> Result<AnySystem> {
        Ok(match *self {
            FamilyParams::Quad2d { a, b } => AnySystem::Planar(family_quad2d(a, b)?),
            FamilyParams::Corner3d { s } => AnySystem::Spatial(family_corner3d(s)?),
            FamilyParams::Strip2d { w, t } => AnySystem::Planar(family_strip2d(w, t)?),
        })
    }

    /// The member of the family that carries an image onto itself unchanged.
    pub fn reference(&self) -> FamilyParams {
        match self {
            FamilyParams::Quad2d { .. } => FamilyParams::Quad2d { a: 0.5, b: 0.5 },
            FamilyParams::Corner3d { .. } => FamilyParams::Corner3d { s: [0.5; 3] },
            FamilyParams::Strip2d { w, .. } => FamilyParams::Strip2d { w: *w, t: 0.5 },
        }
    }
}

fn open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            range: "(0, 1)",
        })
    }
}

/// The four-map family `g_1 = (ax, by)`, `g_2 = (a + (1-a)x, by)`,
/// `g_3 = (a + (1-a)x, b + (1-b)y)`, `g_4 = (ax, b + (1-b)y)` with the tops
/// mask. `a = b = 1/2` is the dyadic subdivision of the square.
pub fn family_quad2d(a: f64, b: f64) -> Result<IfsSystem<2>> {
    open_unit("a", a)?;
    open_unit("b", b)?;
    let maps = vec![
        AffineMap::diagonal([a, b], [0.0, 0.0])?,
        AffineMap::diagonal([1.0 - a, b], [a, 0.0])?,
        AffineMap::diagonal([1.0 - a, 1.0 - b], [a, b])?,
        AffineMap::diagonal([a, 1.0 - b], [0.0, b])?,
    ];
    IfsSystem::new(maps, MaskSpec::tops(4))
}

/// Eight maps, one per corner of the cube. Map `i` reads the binary digits of
/// `i - 1` (least significant digit first) as its corner: digit 0 keeps axis
/// `k` on `[0, s_k]` via `s_k·x`, digit 1 puts it on `[s_k, 1]` via
/// `(1 - s_k)·x + s_k`.
pub fn family_corner3d(s: [f64; 3]) -> Result<IfsSystem<3>> {
    const NAMES: [&str; 3] = ["s1", "s2", "s3"];
    for (k, &v) in s.iter().enumerate() {
        open_unit(NAMES[k], v)?;
    }
    let maps = (0..8)
        .map(|i| {
            let mut scale = [0.0; 3];
            let mut offset = [0.0; 3];
            for k in 0..3 {
                if (i >> k) & 1 == 0 {
                    scale[k] = s[k];
                } else {
                    scale[k] = 1.0 - s[k];
                    offset[k] = s[k];
                }
            }
            AffineMap::diagonal(scale, offset)
        })
        .collect::<Result<Vec<_>>>()?;
    IfsSystem::new(maps, MaskSpec::tops(8))
}

/// Overlapping strips: `x ↦ wx` or `x ↦ wx + 1 - w` (images overlap on
/// `[1-w, w]`), crossed with the lower/upper halves in `y`. Maps follow the
/// quad numbering: 1 lower-left, 2 lower-right, 3 upper-right, 4 upper-left.
/// The mask sends `x < t` to a left strip and `x >= t` to a right one.
pub fn family_strip2d(w: f64, t: f64) -> Result<IfsSystem<2>> {
    if !(w > 0.5 && w < 1.0) {
        return Err(Error::InvalidParameter {
            name: "w",
            value: w,
            range: "(0.5, 1)",
        });
    }
    if !(t >= 1.0 - w && t <= w) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            range: "[1 - w, w]",
        });
    }
    let maps = vec![
        AffineMap::diagonal([w, 0.5], [0.0, 0.0])?,
        AffineMap::diagonal([w, 0.5], [1.0 - w, 0.0])?,
        AffineMap::diagonal([w, 0.5], [1.0 - w, 0.5])?,
        AffineMap::diagonal([w, 0.5], [0.0, 0.5])?,
    ];
    IfsSystem::new(maps, MaskSpec::strip(0, t))
}

/// Per-map findings of [`validate_ifs`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapReport {
    /// 1-based.
    pub index: usize,
    pub lipschitz: f64,
    pub det: f64,
    pub invertible: bool,
    pub contractive: bool,
    pub corners_inside: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub dimension: usize,
    pub maps: Vec<MapReport>,
    /// Fraction of samples claimed by at least one map image.
    pub cover: f64,
    /// Fraction of samples inside two or more map images.
    pub overlap: f64,
    pub samples: usize,
    pub contraction: f64,
    pub min_contraction: f64,
    pub expansion: f64,
    pub mask_error: Option<String>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.maps.len() >= 2
            && self
                .maps
                .iter()
                .all(|m| m.invertible && m.contractive && m.corners_inside)
            && self.mask_error.is_none()
            && self.cover >= 1.0
    }

    /// Images overlap only on boundaries, as far as the samples can tell.
    pub fn just_touching(&self) -> bool {
        self.overlap <= 1e-3
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dimension: {}", self.dimension)?;
        writeln!(f, "maps: {}", self.maps.len())?;
        for m in &self.maps {
            writeln!(
                f,
                "  map {}: lipschitz={:.6} det={:.6} invertible={} contractive={} corners_inside={}",
                m.index, m.lipschitz, m.det, m.invertible, m.contractive, m.corners_inside
            )?;
        }
        writeln!(f, "cover: {:.6} ({} samples)", self.cover, self.samples)?;
        writeln!(f, "overlap: {:.6}", self.overlap)?;
        writeln!(f, "contraction: {:.6}", self.contraction)?;
        writeln!(f, "min_contraction: {:.6}", self.min_contraction)?;
        writeln!(f, "expansion: {:.6}", self.expansion)?;
        if let Some(e) = &self.mask_error {
            writeln!(f, "mask: INVALID ({e})")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        if self.cover < 1.0 {
            writeln!(f, "warning: the map images do not cover the unit domain")?;
        }
        write!(f, "valid: {}", self.is_valid())
    }
}

/// Full report on an already-constructed system.
pub fn validate_ifs<const D: usize>(sys: &IfsSystem<D>) -> ValidationReport {
    validate_maps(sys.maps(), sys.mask())
}

/// Parses a JSON config and builds the system it describes.
pub fn ifs_from_config(text: &str) -> Result<AnySystem> {
    crate::io::parse_config(text)?.build()
}

/// Report on raw maps and a mask; unlike [`IfsSystem::new`] this never fails,
/// it records each problem instead.
pub fn validate_maps<const D: usize>(maps: &[AffineMap<D>], mask: &MaskSpec) -> ValidationReport {
    let tol = mask.tolerance;
    let reports: Vec<MapReport> = maps
        .iter()
        .enumerate()
        .map(|(i, m)| MapReport {
            index: i + 1,
            lipschitz: m.lipschitz(),
            det: m.det(),
            invertible: m.det().abs() > crate::geometry::SINGULAR_DET,
            contractive: m.lipschitz() < 1.0 && m.lipschitz() > 0.0,
            corners_inside: m.maps_unit_into_itself(tol),
        })
        .collect();

    let samples = VALIDATION_SAMPLES_PER_AXIS.pow(D as u32);
    let (mut covered, mut overlapping) = (0usize, 0usize);
    for p in quasi_random::<D>(samples) {
        let mut loose = 0;
        let mut strict = 0;
        for m in maps {
            let q = m.apply_inverse(&p);
            if q.in_unit(tol) {
                loose += 1;
            }
            if q.in_unit(0.0) {
                strict += 1;
            }
        }
        covered += (loose > 0) as usize;
        overlapping += (strict > 1) as usize;
    }

    let contraction = reports.iter().map(|m| m.lipschitz).fold(0.0, f64::max);
    let min_contraction = reports
        .iter()
        .map(|m| m.lipschitz)
        .fold(f64::INFINITY, f64::min);
    let mask_error = match IfsSystem::new(maps.to_vec(), mask.clone()) {
        Err(Error::InvalidMask(e)) => Some(e),
        _ => None,
    };

    ValidationReport {
        dimension: D,
        maps: reports,
        cover: covered as f64 / samples as f64,
        overlap: overlapping as f64 / samples as f64,
        samples,
        contraction,
        min_contraction,
        expansion: maps.iter().map(AffineMap::expansion).fold(0.0, f64::max),
        mask_error,
        notes: Vec::new(),
    }
}
