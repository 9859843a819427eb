use rayon::prelude::*;

use super::{CoverageMap, EngineOptions, JobReport, PixelBuffer, RasterOutput, SENTINEL};
use crate::error::Result;
use crate::geometry::Point;
use crate::parallel;
use crate::precision::Resolved;
use crate::system::IfsSystem;
use crate::transform::Transformer;

/// Pulls every pixel centre of a `width`×`height` grid back to the source
/// attractor. Escaped pixels are `None`. Returns the points and the number
/// of masked steps taken.
pub(crate) fn pull_back_grid(
    tgt: &IfsSystem<2>,
    src: &IfsSystem<2>,
    width: usize,
    height: usize,
    precision: Resolved,
    workers: usize,
) -> Result<(Vec<Option<Point<2>>>, u64)> {
    let t = Transformer {
        tgt,
        src,
        precision,
    };
    let mut points = vec![None; width * height];
    let steps = parallel::install(workers, || {
        points
            .par_chunks_mut(width.max(1))
            .enumerate()
            .map(|(row, out)| {
                let mut steps = 0u64;
                for (col, slot) in out.iter_mut().enumerate() {
                    let p = PixelBuffer::centre(col, row, width, height);
                    if let Ok((q, n)) = t.pull_back_counted(&p) {
                        *slot = Some(q);
                        steps += n as u64;
                    }
                }
                steps
            })
            .sum::<u64>()
    })?;
    Ok((points, steps))
}

/// Reference engine: each target pixel centre is pulled back through the
/// masked address of the target and coded by the source.
pub fn transform_image_perpixel(
    src_img: &PixelBuffer,
    tgt: &IfsSystem<2>,
    src: &IfsSystem<2>,
    opts: &EngineOptions,
) -> Result<RasterOutput> {
    let (w, h) = (src_img.width(), src_img.height());
    let precision = opts.resolve(tgt, src, &[w, h])?;
    let t = Transformer {
        tgt,
        src,
        precision,
    };
    let mut image = PixelBuffer::new(w, h);
    let (steps, escaped) = parallel::install(opts.workers, || {
        image
            .par_rows_mut()
            .enumerate()
            .map(|(row, out)| {
                let (mut steps, mut escaped) = (0u64, 0u64);
                for col in 0..w {
                    let p = PixelBuffer::centre(col, row, w, h);
                    let rgb = match t.pull_back_counted(&p) {
                        Ok((q, n)) => {
                            steps += n as u64;
                            src_img.sample(&q, opts.sampling)
                        }
                        Err(_) => {
                            escaped += 1;
                            SENTINEL
                        }
                    };
                    out[3 * col..3 * col + 3].copy_from_slice(&rgb);
                }
                (steps, escaped)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    })?;
    let mut report = JobReport::new("perpixel", &precision, w * h);
    report.masked_steps = steps;
    report.escaped = escaped;
    report.written = w * h;
    Ok(RasterOutput {
        image,
        coverage: CoverageMap::full(w * h),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::family_quad2d;

    fn checker(w: usize, h: usize) -> PixelBuffer {
        PixelBuffer::from_fn(w, h, |p| {
            let v = (((p[0] * 8.0) as usize + (p[1] * 8.0) as usize) % 2) as u8;
            [v * 200, (p[0] * 255.0) as u8, (p[1] * 255.0) as u8]
        })
    }

    #[test]
    fn identity_is_byte_exact() {
        let sys = family_quad2d(0.5, 0.5).unwrap();
        let img = checker(64, 64);
        let out = transform_image_perpixel(&img, &sys, &sys, &EngineOptions::default()).unwrap();
        assert_eq!(out.image, img);
        assert_eq!(out.report.escaped, 0);
        assert_eq!(out.report.masked_steps, 64 * 64 * out.report.code_length as u64);
    }

    #[test]
    fn constant_in_constant_out() {
        let f = family_quad2d(0.5, 0.5).unwrap();
        let g = family_quad2d(0.27, 0.81).unwrap();
        let img = PixelBuffer::filled(40, 30, [9, 99, 199]);
        let out = transform_image_perpixel(&img, &f, &g, &EngineOptions::default()).unwrap();
        assert_eq!(out.image, img);
    }

    #[test]
    fn worker_count_does_not_change_bytes() {
        let f = family_quad2d(0.5, 0.5).unwrap();
        let g = family_quad2d(0.3, 0.6).unwrap();
        let img = checker(50, 37);
        let one = transform_image_perpixel(&img, &f, &g, &EngineOptions::default()).unwrap();
        for w in [2, 4, 8] {
            let o = EngineOptions::default().with_workers(w);
            assert_eq!(transform_image_perpixel(&img, &f, &g, &o).unwrap().image, one.image);
        }
    }

    #[test]
    fn source_image_untouched() {
        let f = family_quad2d(0.5, 0.5).unwrap();
        let g = family_quad2d(0.3, 0.6).unwrap();
        let img = checker(16, 16);
        let copy = img.clone();
        transform_image_perpixel(&img, &f, &g, &EngineOptions::default()).unwrap();
        assert_eq!(img, copy);
    }
}
