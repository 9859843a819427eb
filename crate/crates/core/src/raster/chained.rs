//! Pixel chaining: the masked orbit of one pixel centre passes through other
//! pixels, whose addresses are tails of the first. One orbit colours the
//! whole chain.

use super::{CoverageMap, EngineOptions, JobReport, PixelBuffer, RasterOutput, SENTINEL};
use crate::error::Result;
use crate::geometry::Point;
use crate::mask::Symbol;
use crate::system::IfsSystem;

/// Visits pixels in scan order. From each unwritten pixel the masked
/// dynamical system runs from pixel centre to pixel centre (each image point
/// is moved to the centre of the pixel containing it) until the chain meets a
/// pixel already in the chain or already written, or lands exactly on a pixel
/// edge. The orbit is then extended by `M - 1` symbols from that pixel's
/// centre (or from the edge point itself), coded once under `src`, and
/// the chain is filled backwards by applying the recorded source maps. Every
/// chain pixel thus gets an address of at least `M` symbols, and the step
/// count never exceeds that of the per-pixel engine.
///
/// Sequential; the worker count is ignored.
pub fn transform_image_chained(
    src_img: &PixelBuffer,
    tgt: &IfsSystem<2>,
    src: &IfsSystem<2>,
    opts: &EngineOptions,
) -> Result<RasterOutput> {
    let (w, h) = (src_img.width(), src_img.height());
    let precision = opts.resolve(tgt, src, &[w, h])?;
    let m = precision.code_length;
    let mut report = JobReport::new("chained", &precision, w * h);
    let mut image = PixelBuffer::new(w, h);
    let mut coverage = CoverageMap::new(w * h);
    let mut in_chain = vec![false; w * h];
    let mut chain: Vec<(usize, Symbol)> = Vec::new();
    let mut tail: Vec<Symbol> = Vec::with_capacity(m);

    for start in 0..w * h {
        // Each pass writes at least one pixel, so this terminates.
        while !coverage.is_written(start) {
            chain.clear();
            let mut pix = start;
            let mut escaped = false;
            let mut edge = None;
            // Walk until the orbit re-enters a known pixel or lands on a
            // pixel edge.
            while !coverage.is_written(pix) && !in_chain[pix] {
                let x = PixelBuffer::centre(pix % w, pix / w, w, h);
                report.masked_steps += 1;
                match tgt.step_at(&x, 0) {
                    Ok((s, next)) => {
                        in_chain[pix] = true;
                        chain.push((pix, s));
                        if on_edge(next[0], w) || on_edge(next[1], h) {
                            edge = Some(next);
                            break;
                        }
                        let (c, r) = PixelBuffer::locate(&next, w, h);
                        pix = r * w + c;
                    }
                    Err(_) => {
                        escaped = true;
                        break;
                    }
                }
            }

            let mut q = None;
            if !escaped {
                tail.clear();
                let mut x = edge.unwrap_or_else(|| PixelBuffer::centre(pix % w, pix / w, w, h));
                for k in 0..m.saturating_sub(1) {
                    report.masked_steps += 1;
                    match tgt.step_at(&x, k + 1) {
                        Ok((s, next)) => {
                            tail.push(s);
                            x = next;
                        }
                        Err(_) => break,
                    }
                }
                if tail.len() + 1 >= m {
                    q = Some(src.code_from(&tail, Point::ORIGIN));
                }
            }

            match q {
                Some(mut q) => {
                    for &(p, s) in chain.iter().rev() {
                        q = src.map(s).apply(&q);
                        image.set_pixel(p, src_img.sample(&q, opts.sampling));
                        coverage.mark(p);
                        in_chain[p] = false;
                    }
                }
                None => {
                    // Only the pixel whose own orbit escaped is lost; the rest of
                    // the chain is revisited from scratch later.
                    let lost = if escaped { pix } else { chain[0].0 };
                    for &(p, _) in &chain {
                        in_chain[p] = false;
                    }
                    image.set_pixel(lost, SENTINEL);
                    coverage.mark(lost);
                    report.escaped += 1;
                }
            }
        }
    }
    report.written = coverage.written();
    Ok(RasterOutput {
        image,
        coverage,
        report,
    })
}

/// Distance (in pixels) from a pixel edge within which a point counts as on
/// the edge.
const TIE: f64 = 1e-9;

/// Whether `v` lies on an inner pixel edge along an axis of `n` pixels.
/// Snapping such a point moves it a full half pixel, and those offsets add
/// up along a chain, so the chain stops there and codes the exact point.
fn on_edge(v: f64, n: usize) -> bool {
    let t = v * n as f64;
    let k = t.round();
    (t - k).abs() < TIE && k > 0.0 && k < n as f64
}
