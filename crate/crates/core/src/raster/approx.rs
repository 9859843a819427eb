//! Progressive approximation for interactive use.
//!
//! A buffer `B` holds, for every target pixel, the source point it currently
//! steals its colour from. One pass recomputes only the first symbol of each
//! address and reuses `B` for the rest, so after `k` passes with fixed
//! parameters the first `k` symbols are right.

use rayon::prelude::*;

use super::perpixel::pull_back_grid;
use super::{EngineOptions, PixelBuffer, Sampling, SENTINEL};
use crate::error::Result;
use crate::geometry::Point;
use crate::parallel;
use crate::system::IfsSystem;
use crate::transform::check_pair;

/// Distance (in pixels) from a pixel edge within which a lookup counts as a
/// tie between the two neighbours.
const TIE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct ApproxState {
    source: PixelBuffer,
    buffer: Vec<Point<2>>,
    output: PixelBuffer,
    passes: usize,
}

/// Outcome of one [`ApproxState::step`].
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct StepStats {
    pub changed: usize,
    pub escaped: usize,
    pub pixels: usize,
}

impl StepStats {
    /// Fraction of output pixels whose colour changed in the pass.
    pub fn changed_fraction(&self) -> f64 {
        if self.pixels == 0 {
            0.0
        } else {
            self.changed as f64 / self.pixels as f64
        }
    }
}

impl ApproxState {
    /// Starts from the identity transformation: `B(x) = x`.
    pub fn identity(source: PixelBuffer) -> Self {
        let (w, h) = (source.width(), source.height());
        let buffer: Vec<Point<2>> = (0..w * h)
            .map(|i| PixelBuffer::centre(i % w, i / w, w, h))
            .collect();
        let output = render(&source, &buffer, Sampling::Nearest);
        ApproxState {
            source,
            buffer,
            output,
            passes: 0,
        }
    }

    /// Starts from the exact per-pixel transformation of the pair. Escaped
    /// pixels keep the identity entry and show the sentinel colour.
    pub fn exact(
        source: PixelBuffer,
        tgt: &IfsSystem<2>,
        src: &IfsSystem<2>,
        opts: &EngineOptions,
    ) -> Result<Self> {
        let (w, h) = (source.width(), source.height());
        let precision = opts.resolve(tgt, src, &[w, h])?;
        let (points, _) = pull_back_grid(tgt, src, w, h, precision, opts.workers)?;
        let mut output = PixelBuffer::new(w, h);
        let buffer = points
            .iter()
            .enumerate()
            .map(|(i, q)| match q {
                Some(q) => {
                    output.set_pixel(i, source.sample(q, opts.sampling));
                    *q
                }
                None => {
                    output.set_pixel(i, SENTINEL);
                    PixelBuffer::centre(i % w, i / w, w, h)
                }
            })
            .collect();
        Ok(ApproxState {
            source,
            buffer,
            output,
            passes: 0,
        })
    }

    pub fn source(&self) -> &PixelBuffer {
        &self.source
    }

    pub fn output(&self) -> &PixelBuffer {
        &self.output
    }

    pub fn buffer(&self) -> &[Point<2>] {
        &self.buffer
    }

    pub fn passes(&self) -> usize {
        self.passes
    }

    /// One pass towards the pair `(tgt, src)`: for each pixel centre `x` with
    /// mask cell `i`, `B'(x) = src_i(B(x'))` where `x' = tgt_i^{-1}(x)` and
    /// `B(x')` is read at the pixel nearest `x'`. When `x'` sits on a pixel
    /// edge the tied neighbours are averaged, which keeps affine buffers
    /// exact instead of drifting towards one side.
    pub fn step(
        &mut self,
        tgt: &IfsSystem<2>,
        src: &IfsSystem<2>,
        workers: usize,
        sampling: Sampling,
    ) -> Result<StepStats> {
        check_pair(tgt, src)?;
        let (w, h) = (self.source.width(), self.source.height());
        let old = &self.buffer;
        let next: Vec<Option<Point<2>>> = parallel::install(workers, || {
            (0..w * h)
                .into_par_iter()
                .map(|i| {
                    let x = PixelBuffer::centre(i % w, i / w, w, h);
                    let (s, pre) = tgt.masked_step(&x).ok()?;
                    Some(src.map(s).apply(&lookup(old, &pre, w, h)))
                })
                .collect()
        })?;

        let mut stats = StepStats {
            pixels: w * h,
            ..Default::default()
        };
        for (i, q) in next.into_iter().enumerate() {
            let rgb = match q {
                Some(q) => {
                    self.buffer[i] = q;
                    self.source.sample(&q, sampling)
                }
                None => {
                    stats.escaped += 1;
                    SENTINEL
                }
            };
            if self.output.pixel(i) != rgb {
                stats.changed += 1;
                self.output.set_pixel(i, rgb);
            }
        }
        self.passes += 1;
        Ok(stats)
    }
}

fn render(source: &PixelBuffer, buffer: &[Point<2>], sampling: Sampling) -> PixelBuffer {
    let mut out = PixelBuffer::new(source.width(), source.height());
    for (i, q) in buffer.iter().enumerate() {
        out.set_pixel(i, source.sample(q, sampling));
    }
    out
}

/// Pixel indices nearest to `v` along an axis of `n` pixels: one, or two on a
/// tie.
fn nearest(v: f64, n: usize) -> (usize, usize) {
    let t = v * n as f64;
    let k = t.round();
    if (t - k).abs() < TIE && k > 0.0 && (k as usize) < n {
        (k as usize - 1, k as usize)
    } else {
        let c = super::buffer::cell(v, n);
        (c, c)
    }
}

fn lookup(buffer: &[Point<2>], x: &Point<2>, w: usize, h: usize) -> Point<2> {
    let (c0, c1) = nearest(x[0], w);
    let (r0, r1) = nearest(x[1], h);
    if (c0, r0) == (c1, r1) {
        return buffer[r0 * w + c0];
    }
    let mut sum = [0.0; 2];
    let mut n = 0.0;
    for r in [r0, r1] {
        for c in [c0, c1] {
            let p = buffer[r * w + c];
            sum[0] += p[0];
            sum[1] += p[1];
            n += 1.0;
        }
    }
    Point([sum[0] / n, sum[1] / n])
}
