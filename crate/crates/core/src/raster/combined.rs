//! Chaos game first, then per-pixel evaluation of whatever it missed.

use rayon::prelude::*;

use super::chaos::ChaosGame;
use super::{EngineOptions, PixelBuffer, RasterOutput, SwitchRule, SENTINEL};
use crate::error::Result;
use crate::parallel;
use crate::system::IfsSystem;
use crate::transform::Transformer;

/// The round after which a hit-rate rule switches: the first whose newly
/// written pixels per iteration fall below `1 - threshold`. `hits[k]` is the
/// number of fresh pixels of round `k`, each round being `batch` iterations.
pub fn switch_round(hits: &[usize], batch: u64, threshold: f64) -> Option<usize> {
    // The slack keeps e.g. `1 - 0.95` from admitting a rate of exactly 5%.
    hits.iter()
        .position(|&h| h as f64 / batch as f64 + 1e-12 < 1.0 - threshold)
}

/// Hard cap on hit-rate chaos iterations, in multiples of `N` times the
/// pixel count.
const HIT_RATE_CAP: u64 = 16;

/// Runs the chaos game under `opts.switch_rule`, then fills the pixels it
/// never reached with the per-pixel engine. Requires a just-touching target.
pub fn transform_image_combined(
    src_img: &PixelBuffer,
    tgt: &IfsSystem<2>,
    src: &IfsSystem<2>,
    opts: &EngineOptions,
) -> Result<RasterOutput> {
    let (w, h) = (src_img.width(), src_img.height());
    let mut game = ChaosGame::new(src_img, tgt, src, opts, false)?;
    let budget = (tgt.len() * w * h) as u64;
    match opts.switch_rule {
        SwitchRule::Auto => {
            game.run(budget)?;
        }
        SwitchRule::Fixed(n) => {
            game.run(n)?;
        }
        SwitchRule::HitRate(threshold) => {
            // Rounds of a quarter of the pixel count, at least one iteration
            // per stream.
            let batch = ((w * h) as u64 / 4).max(super::CHAOS_STREAMS as u64);
            let mut hits = Vec::new();
            let mut total = 0;
            while total < HIT_RATE_CAP * budget && game.coverage.unwritten() > 0 {
                hits.push(game.run(batch)?);
                total += batch;
                if switch_round(&hits, batch, threshold).is_some() {
                    break;
                }
            }
        }
    }
    let mut out = game.finish();
    out.report.engine = "combined";
    out.report.switched_after = Some(out.report.chaos_iterations);

    let t = Transformer {
        tgt,
        src,
        precision: opts.resolve(tgt, src, &[w, h])?,
    };
    let missing: Vec<usize> = (0..w * h).filter(|&i| !out.coverage.is_written(i)).collect();
    let filled: Vec<(usize, [u8; 3], u64, bool)> = parallel::install(opts.workers, || {
        missing
            .par_iter()
            .map(|&i| {
                let p = PixelBuffer::centre(i % w, i / w, w, h);
                match t.pull_back_counted(&p) {
                    Ok((q, n)) => (i, src_img.sample(&q, opts.sampling), n as u64, false),
                    Err(_) => (i, SENTINEL, 0, true),
                }
            })
            .collect()
    })?;
    for (i, rgb, n, escaped) in filled {
        out.image.set_pixel(i, rgb);
        out.coverage.mark(i);
        out.report.masked_steps += n;
        out.report.escaped += escaped as u64;
    }
    out.report.written = out.coverage.written();
    Ok(out)
}
