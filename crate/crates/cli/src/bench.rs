//! Built-in timing workloads for `fractx bench`.

use std::fmt;
use std::time::Instant;

use fractx_core::raster::{transform_image_chained, transform_image_chaos, transform_image_chaos_masked};
use fractx_core::synth::{quadrant_disc_image, sheet_mesh, sphere_volume};
use fractx_core::*;

use crate::Failure;

pub const PROFILES: [&str; 5] = ["quad64", "quad128", "quad256", "corner32", "sheet64"];

/// One machine-readable result line.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchLine {
    pub profile: String,
    pub engine: &'static str,
    pub wall_ms: f64,
    pub masked_steps: u64,
    pub written: usize,
    pub pixels: usize,
}

impl fmt::Display for BenchLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "profile={} engine={} wall_ms={:.3} masked_steps={} written={} pixels={}",
            self.profile, self.engine, self.wall_ms, self.masked_steps, self.written, self.pixels
        )
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64() * 1e3))
}

fn raster(profile: &str, n: usize, workers: usize) -> Result<Vec<BenchLine>> {
    let img = quadrant_disc_image(n, n);
    let tgt = family_quad2d(0.5, 0.5)?;
    let src = family_quad2d(0.4, 0.6)?;
    let opts = EngineOptions::default().with_seed(1).with_workers(workers);
    type EngineFn = fn(&PixelBuffer, &IfsSystem<2>, &IfsSystem<2>, &EngineOptions) -> Result<RasterOutput>;
    let engines: [(&'static str, EngineFn); 5] = [
        ("perpixel", transform_image_perpixel),
        ("chaos", transform_image_chaos),
        ("chaos-masked", transform_image_chaos_masked),
        ("chained", transform_image_chained),
        ("combined", transform_image_combined),
    ];
    engines
        .iter()
        .map(|(name, f)| {
            let (out, ms) = timed(|| f(&img, &tgt, &src, &opts))?;
            Ok(BenchLine {
                profile: profile.into(),
                engine: name,
                wall_ms: ms,
                masked_steps: out.report.masked_steps,
                written: out.report.written,
                pixels: out.report.pixels,
            })
        })
        .collect()
}

pub fn run_profile(profile: &str, workers: usize) -> std::result::Result<Vec<BenchLine>, Failure> {
    let lines = match profile {
        "quad64" => raster(profile, 64, workers),
        "quad128" => raster(profile, 128, workers),
        "quad256" => raster(profile, 256, workers),
        "corner32" => (|| {
            let vol = sphere_volume(32);
            let tgt = family_corner3d([0.5; 3])?;
            let src = family_corner3d([0.35, 0.5, 0.65])?;
            let opts = EngineOptions::default().with_workers(workers);
            let (out, ms) = timed(|| transform_voxels(&vol, &tgt, &src, &opts))?;
            Ok(vec![BenchLine {
                profile: profile.into(),
                engine: "voxel",
                wall_ms: ms,
                masked_steps: out.report.masked_steps,
                written: out.report.written,
                pixels: out.report.pixels,
            }])
        })(),
        "sheet64" => (|| {
            let sheet = retriangulate_max_edge(&sheet_mesh(64, 0.5), 1.0 / 64.0, fractx_core::volume::DEFAULT_VERTEX_CAP)?;
            let tgt = family_corner3d([0.5; 3])?;
            let src = family_corner3d([0.35, 0.5, 0.65])?;
            let opts = MeshOptions {
                workers,
                ..Default::default()
            };
            let (out, ms) = timed(|| transform_mesh(&sheet, &tgt, &src, &opts))?;
            let n = out.mesh.vertices.len();
            Ok(vec![BenchLine {
                profile: profile.into(),
                engine: "mesh",
                wall_ms: ms,
                masked_steps: (n * out.precision.code_length) as u64,
                written: n - out.escaped.len(),
                pixels: n,
            }])
        })(),
        other => {
            return Err(Failure::Usage(format!(
                "unknown profile {other}; expected one of {}",
                PROFILES.join(", ")
            )))
        }
    };
    lines.map_err(Failure::from)
}
