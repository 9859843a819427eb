//! Paired random iteration with colour stealing.
//!
//! The iteration budget is split over a fixed set of [`CHAOS_STREAMS`]
//! independent random streams, so the work is the same whatever the worker
//! count. Streams run in rounds; within a round the first plot of a pixel
//! wins, ordered by stream index and then by iteration. Earlier rounds win
//! over later ones.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{CoverageMap, EngineOptions, JobReport, PixelBuffer, RasterOutput, Sampling};
use crate::error::{Error, Result};
use crate::families::validate_ifs;
use crate::geometry::Point;
use crate::mask::Symbol;
use crate::parallel;
use crate::system::IfsSystem;

pub const CHAOS_STREAMS: usize = 64;

/// Overlap fraction above which a system no longer counts as just touching.
const JUST_TOUCHING_OVERLAP: f64 = 1e-3;

struct Stream {
    rng: ChaCha8Rng,
    src: Point<2>,
    tgt: Point<2>,
    done: u64,
    /// The last `m` symbols, `history[head]` being the oldest.
    history: Vec<Symbol>,
    head: usize,
}

#[derive(Default)]
struct RoundStats {
    plotted: u64,
    masked_steps: u64,
}

pub(crate) struct ChaosGame<'a> {
    tgt: &'a IfsSystem<2>,
    src: &'a IfsSystem<2>,
    src_img: &'a PixelBuffer,
    sampling: Sampling,
    m: usize,
    gated: bool,
    workers: usize,
    weights: WeightedIndex<f64>,
    streams: Vec<Stream>,
    pub image: PixelBuffer,
    pub coverage: CoverageMap,
    pub report: JobReport,
}

impl<'a> ChaosGame<'a> {
    pub fn new(
        src_img: &'a PixelBuffer,
        tgt: &'a IfsSystem<2>,
        src: &'a IfsSystem<2>,
        opts: &EngineOptions,
        gated: bool,
    ) -> Result<Self> {
        let (w, h) = (src_img.width(), src_img.height());
        let precision = opts.resolve(tgt, src, &[w, h])?;
        if !gated {
            let overlap = validate_ifs(tgt).overlap;
            if !tgt.mask().is_tops() || overlap > JUST_TOUCHING_OVERLAP {
                return Err(Error::Unsupported(format!(
                    "the plain chaos game needs a just-touching target with a tops mask \
                     (overlap {overlap:.4}); use the mask-gated chaos game or the per-pixel engine"
                )));
            }
        }
        let weights = WeightedIndex::new(tgt.maps().iter().map(|m| m.det().abs()))
            .map_err(|e| Error::Unsupported(format!("cannot weight maps by area: {e}")))?;
        let m = precision.code_length;
        let streams = (0..CHAOS_STREAMS)
            .map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(s as u64);
                Stream {
                    rng,
                    src: Point::ORIGIN,
                    tgt: Point::ORIGIN,
                    done: 0,
                    history: vec![Symbol::from_index(0); m],
                    head: 0,
                }
            })
            .collect();
        let engine = if gated { "chaos-masked" } else { "chaos" };
        Ok(ChaosGame {
            tgt,
            src,
            src_img,
            sampling: opts.sampling,
            m,
            gated,
            workers: opts.workers,
            weights,
            streams,
            image: PixelBuffer::new(w, h),
            coverage: CoverageMap::new(w * h),
            report: JobReport::new(engine, &precision, w * h),
        })
    }

    /// Runs `total` more iterations; returns how many pixels were newly
    /// written.
    pub fn run(&mut self, total: u64) -> Result<usize> {
        if total == 0 || self.image.is_empty() {
            return Ok(0);
        }
        let per = total / CHAOS_STREAMS as u64;
        let extra = (total % CHAOS_STREAMS as u64) as usize;
        let mut streams = std::mem::take(&mut self.streams);
        let this = &*self;
        let rounds: Vec<(Vec<(u32, [u8; 3])>, RoundStats)> =
            parallel::install(this.workers, || {
                streams
                    .par_iter_mut()
                    .enumerate()
                    .map(|(s, st)| this.advance(st, per + (s < extra) as u64))
                    .collect()
            })?;
        self.streams = streams;

        let mut fresh = 0;
        for (events, stats) in rounds {
            self.report.plotted += stats.plotted;
            self.report.masked_steps += stats.masked_steps;
            for (i, rgb) in events {
                if self.coverage.mark(i as usize) {
                    self.image.set_pixel(i as usize, rgb);
                    fresh += 1;
                }
            }
        }
        self.report.chaos_iterations += total;
        self.report.written = self.coverage.written();
        Ok(fresh)
    }

    fn advance(&self, st: &mut Stream, iters: u64) -> (Vec<(u32, [u8; 3])>, RoundStats) {
        let (w, h) = (self.image.width(), self.image.height());
        let mut events = Vec::new();
        let mut stats = RoundStats::default();
        for _ in 0..iters {
            let i = self.weights.sample(&mut st.rng);
            st.src = self.src.maps()[i].apply(&st.src);
            st.tgt = self.tgt.maps()[i].apply(&st.tgt);
            if self.m > 0 {
                st.history[st.head] = Symbol::from_index(i);
                st.head = (st.head + 1) % self.m;
            }
            st.done += 1;
            if st.done <= self.m as u64 {
                continue;
            }
            if self.gated && !self.gate(st, &mut stats.masked_steps) {
                continue;
            }
            let (c, r) = PixelBuffer::locate(&st.tgt, w, h);
            let idx = r * w + c;
            stats.plotted += 1;
            if !self.coverage.is_written(idx) {
                events.push((idx as u32, self.src_img.sample(&st.src, self.sampling)));
            }
        }
        (events, stats)
    }

    /// Whether the masked address of the target point starts with the symbols
    /// just applied, most recent first.
    fn gate(&self, st: &Stream, steps: &mut u64) -> bool {
        let mut x = st.tgt;
        for k in 0..self.m {
            let recent = st.history[(st.head + self.m - 1 - k) % self.m];
            *steps += 1;
            match self.tgt.step_at(&x, k) {
                Ok((s, next)) if s == recent => x = next,
                _ => return false,
            }
        }
        true
    }

    pub fn finish(self) -> RasterOutput {
        RasterOutput {
            image: self.image,
            coverage: self.coverage,
            report: self.report,
        }
    }
}

fn default_iters(opts: &EngineOptions, tgt: &IfsSystem<2>, img: &PixelBuffer) -> u64 {
    opts.chaos_iters
        .unwrap_or((tgt.len() * img.width() * img.height()) as u64)
}

/// Plain chaos game, symbols drawn with probability proportional to the area
/// of the target map images. Requires a just-touching target under the tops
/// mask; pixels never hit stay black and unwritten.
pub fn transform_image_chaos(
    src_img: &PixelBuffer,
    tgt: &IfsSystem<2>,
    src: &IfsSystem<2>,
    opts: &EngineOptions,
) -> Result<RasterOutput> {
    let mut game = ChaosGame::new(src_img, tgt, src, opts, false)?;
    game.run(default_iters(opts, tgt, src_img))?;
    Ok(game.finish())
}

/// Chaos game that plots a point only when its masked address begins with
/// the symbols that produced it, so every plotted pixel follows the mask.
/// Works for overlapping systems and any mask.
pub fn transform_image_chaos_masked(
    src_img: &PixelBuffer,
    tgt: &IfsSystem<2>,
    src: &IfsSystem<2>,
    opts: &EngineOptions,
) -> Result<RasterOutput> {
    let mut game = ChaosGame::new(src_img, tgt, src, opts, true)?;
    game.run(default_iters(opts, tgt, src_img))?;
    Ok(game.finish())
}
