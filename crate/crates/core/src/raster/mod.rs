//! 2D image transformation engines.
//!
//! Every engine colours target pixel `p` with the source image sampled at
//! the pull-back of `p`. Per-pixel evaluation is the reference; the others
//! trade exactness at pixel scale for speed.

mod approx;
mod buffer;
mod chained;
mod chaos;
mod combined;
mod perpixel;

use serde::{Deserialize, Serialize};

pub use approx::{ApproxState, StepStats};
pub use buffer::{CoverageMap, PixelBuffer, Sampling};
pub(crate) use buffer::cell as buffer_cell;
pub use chained::transform_image_chained;
pub use chaos::{transform_image_chaos, transform_image_chaos_masked, CHAOS_STREAMS};
pub use combined::{switch_round, transform_image_combined};
pub use perpixel::transform_image_perpixel;

use crate::error::Result;
use crate::precision::{PrecisionPolicy, Resolved};
use crate::system::IfsSystem;

/// Colour written where the orbit of a pixel escapes.
pub const SENTINEL: [u8; 3] = [255, 0, 255];

/// When the combined engine stops the chaos game and fills in per pixel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchRule {
    /// `N` times the pixel count.
    #[default]
    Auto,
    Fixed(u64),
    /// Switch after the first round whose share of newly written pixels per
    /// iteration falls below `1 - threshold`.
    HitRate(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineOptions {
    /// Derived from the grid pitch when absent.
    pub precision: Option<PrecisionPolicy>,
    /// Overrides the derived code length.
    pub code_length: Option<usize>,
    pub seed: u64,
    pub workers: usize,
    /// Chaos-game iterations; `N` times the pixel count when absent.
    pub chaos_iters: Option<u64>,
    pub switch_rule: SwitchRule,
    pub sampling: Sampling,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            precision: None,
            code_length: None,
            seed: 0,
            workers: 1,
            chaos_iters: None,
            switch_rule: SwitchRule::Auto,
            sampling: Sampling::Nearest,
        }
    }
}

impl EngineOptions {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_chaos_iters(mut self, iters: u64) -> Self {
        self.chaos_iters = Some(iters);
        self
    }

    pub fn with_code_length(mut self, m: usize) -> Self {
        self.code_length = Some(m);
        self
    }

    pub fn with_switch_rule(mut self, rule: SwitchRule) -> Self {
        self.switch_rule = rule;
        self
    }

    /// The precision policy for a grid with these extents.
    pub fn policy(&self, extents: &[usize]) -> PrecisionPolicy {
        let base = self
            .precision
            .clone()
            .unwrap_or_else(|| PrecisionPolicy::for_grid(extents));
        match self.code_length {
            Some(m) => base.with_code_length(Some(m)),
            None => base,
        }
    }

    pub fn resolve<const D: usize>(
        &self,
        tgt: &IfsSystem<D>,
        src: &IfsSystem<D>,
        extents: &[usize],
    ) -> Result<Resolved> {
        crate::transform::check_pair(tgt, src)?;
        self.policy(extents).resolve(tgt, src)
    }
}

/// What a job did, for logs and benchmarks.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct JobReport {
    pub engine: &'static str,
    pub code_length: usize,
    pub derived_code_length: usize,
    pub error_budget: f64,
    /// Masked dynamical system steps (inverse-map evaluations that produced a
    /// symbol).
    pub masked_steps: u64,
    pub escaped: u64,
    pub chaos_iterations: u64,
    pub plotted: u64,
    pub written: usize,
    pub pixels: usize,
    /// Chaos iterations run before the per-pixel fill took over.
    pub switched_after: Option<u64>,
}

impl JobReport {
    pub(crate) fn new(engine: &'static str, r: &Resolved, pixels: usize) -> Self {
        JobReport {
            engine,
            code_length: r.code_length,
            derived_code_length: r.derived_code_length,
            error_budget: r.error_budget,
            pixels,
            ..Default::default()
        }
    }
}

/// The result of a raster job.
#[derive(Clone, Debug)]
pub struct RasterOutput {
    pub image: PixelBuffer,
    pub coverage: CoverageMap,
    pub report: JobReport,
}

/// Flags the pixels whose centre lies within one pixel of a mask-cell
/// boundary of `tgt`. Engines may legitimately disagree there.
pub fn boundary_pixels(tgt: &IfsSystem<2>, width: usize, height: usize) -> Vec<bool> {
    let radius = 1.0 / width.min(height).max(1) as f64;
    let mut out = Vec::with_capacity(width * height);
    for row in 0..height {
        for col in 0..width {
            let p = PixelBuffer::centre(col, row, width, height);
            out.push(tgt.near_mask_boundary(&p, radius));
        }
    }
    out
}

/// `(equal, compared)` pixel counts between two images of equal size,
/// restricted to pixels written in `written` (if given) and not flagged in
/// `exclude` (if given).
pub fn pixel_agreement(
    a: &PixelBuffer,
    b: &PixelBuffer,
    written: Option<&CoverageMap>,
    exclude: Option<&[bool]>,
) -> (usize, usize) {
    assert_eq!((a.width(), a.height()), (b.width(), b.height()));
    let mut equal = 0;
    let mut compared = 0;
    for i in 0..a.width() * a.height() {
        if written.is_some_and(|w| !w.is_written(i)) || exclude.is_some_and(|e| e[i]) {
            continue;
        }
        compared += 1;
        equal += (a.pixel(i) == b.pixel(i)) as usize;
    }
    (equal, compared)
}
