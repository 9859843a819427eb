//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the report always prints; exits non-zero if any criterion fails.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use fractx_core::raster::{boundary_pixels, pixel_agreement};
use fractx_core::synth::{obj_corpus, quadrant_disc_image, sheet_mesh, sphere_volume};
use fractx_core::volume::is_degenerate;
use fractx_core::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn ratio(hit: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        hit as f64 / total as f64
    }
}

fn error_recurrence() -> Outcome {
    let e = error_budget(4.0, 20, 1e-15);
    outcome((1.45e-3..=1.49e-3).contains(&e), format!("error_budget(4,20,1e-15)={e:.6e}"))
}

fn code_length_anchor() -> Outcome {
    let brute = |c: f64, eps: f64| (0..).find(|&m| c.powi(m + 1) / (1.0 - c) < eps / 2.0).unwrap() as usize;
    let mut pass = true;
    let mut parts = Vec::new();
    for (eps, want) in [(1.0 / 512.0, 11), (1.0 / 128.0, 9)] {
        let got = code_length(0.5, eps).unwrap();
        pass &= got == want && got == brute(0.5, eps);
        parts.push(format!("M(0.5,{eps})={got} brute={}", brute(0.5, eps)));
    }
    outcome(pass, parts.join(" "))
}

fn identity_suite() -> Outcome {
    let f = family_quad2d(0.5, 0.5).unwrap();
    let img = quadrant_disc_image(256, 256);
    let o = EngineOptions::default().with_seed(3).with_workers(4);
    let engines: [(&str, fn(&PixelBuffer, &IfsSystem<2>, &IfsSystem<2>, &EngineOptions) -> Result<RasterOutput>); 3] = [
        ("perpixel", transform_image_perpixel),
        ("combined", transform_image_combined),
        ("chained", transform_image_chained),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, run) in engines {
        let same = run(&img, &f, &f, &o).map(|out| out.image == img).unwrap_or(false);
        pass &= same;
        parts.push(format!("{name}={same}"));
    }
    let c = family_corner3d([0.5; 3]).unwrap();
    let vol = sphere_volume(32);
    let same = transform_voxels(&vol, &c, &c, &o).map(|out| out.grid == vol).unwrap_or(false);
    pass &= same;
    parts.push(format!("voxel32={same}"));
    outcome(pass, parts.join(" "))
}

fn homeomorphism_round_trip() -> Outcome {
    let f = family_quad2d(0.5, 0.5).unwrap();
    let g = family_quad2d(0.4, 0.6).unwrap();
    let n = 256;
    let policy = PrecisionPolicy::for_grid(&[n, n]);
    let there = Transformer::new(&f, &g, &policy).unwrap();
    let back = Transformer::new(&g, &f, &policy).unwrap();
    let pitch = 1.0 / n as f64;
    let skip = boundary_pixels(&f, n, n);
    let (mut close, mut total) = (0, 0);
    for i in 0..n * n {
        if skip[i] {
            continue;
        }
        let p = PixelBuffer::centre(i % n, i / n, n, n);
        total += 1;
        let r = there.pull_back(&p).and_then(|q| back.pull_back(&q));
        close += r.is_ok_and(|r| r.max_dist(&p) <= 2.0 * pitch) as usize;
    }
    let planar = ratio(close, total);

    let f3 = family_corner3d([0.5; 3]).unwrap();
    let g3 = family_corner3d([0.35, 0.5, 0.65]).unwrap();
    let k = 32;
    let grid = VoxelGrid::new(k, k, k);
    let policy = PrecisionPolicy::for_grid(&[k, k, k]);
    let there = Transformer::new(&f3, &g3, &policy).unwrap();
    let back = Transformer::new(&g3, &f3, &policy).unwrap();
    let pitch = 1.0 / k as f64;
    let (mut close3, mut total3) = (0, 0);
    for z in 0..k {
        for y in 0..k {
            for x in 0..k {
                let p = grid.centre(x, y, z);
                if f3.near_mask_boundary(&p, pitch) {
                    continue;
                }
                total3 += 1;
                let r = there.pull_back(&p).and_then(|q| back.pull_back(&q));
                close3 += r.is_ok_and(|r| r.max_dist(&p) <= 2.0 * pitch) as usize;
            }
        }
    }
    let spatial = ratio(close3, total3);
    outcome(
        planar >= 0.99 && spatial >= 0.99,
        format!("256^2 {close}/{total} ({planar:.4}) 32^3 {close3}/{total3} ({spatial:.4})"),
    )
}

fn oracle_equivalence() -> Outcome {
    let (a, b) = (0.4, 0.6);
    let sys = family_quad2d(a, b).unwrap();
    let maps = oracle::quad_maps(a, b);
    let (n, m) = (32, 8);
    let skip = boundary_pixels(&sys, n, n);
    let (mut agree, mut total) = (0, 0);
    for i in 0..n * n {
        if skip[i] {
            continue;
        }
        let p = PixelBuffer::centre(i % n, i / n, n, n);
        total += 1;
        let got = sys.section_address(&p, m).map(|a| a.values()).ok();
        let want = oracle::brute_force_address(&maps, &p.0, m, 1e-9);
        agree += (got.is_some() && got == want) as usize;
    }
    let r = ratio(agree, total);
    outcome(r >= 0.99, format!("{agree}/{total} ({r:.4})"))
}

fn cross_engine_agreement() -> Outcome {
    let f = family_quad2d(0.5, 0.5).unwrap();
    let g = family_quad2d(0.4, 0.6).unwrap();
    let n = 128;
    let img = quadrant_disc_image(n, n);
    let o = EngineOptions::default().with_seed(11).with_workers(4);
    let reference = transform_image_perpixel(&img, &f, &g, &o).unwrap();
    let skip = boundary_pixels(&f, n, n);
    let engines: [(&str, fn(&PixelBuffer, &IfsSystem<2>, &IfsSystem<2>, &EngineOptions) -> Result<RasterOutput>); 4] = [
        ("chaos", transform_image_chaos),
        ("chaos-masked", transform_image_chaos_masked),
        ("chained", transform_image_chained),
        ("combined", transform_image_combined),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, run) in engines {
        let out = run(&img, &f, &g, &o).unwrap();
        let (eq, total) = pixel_agreement(&out.image, &reference.image, Some(&out.coverage), Some(&skip));
        let r = ratio(eq, total);
        pass &= r >= 0.99;
        parts.push(format!("{name}={eq}/{total}"));
    }
    outcome(pass, parts.join(" "))
}

fn approx_convergence() -> Outcome {
    let f = family_quad2d(0.5, 0.5).unwrap();
    let g = family_quad2d(0.3, 0.3).unwrap();
    let n = 128;
    let img = quadrant_disc_image(n, n);
    let o = EngineOptions::default().with_workers(4);
    let m = o.resolve(&f, &g, &[n, n]).unwrap().code_length;
    let mut st = ApproxState::identity(img.clone());
    for _ in 0..m {
        st.step(&f, &g, 4, Sampling::Nearest).unwrap();
    }
    let reference = transform_image_perpixel(&img, &f, &g, &o).unwrap();
    let (eq, total) = pixel_agreement(st.output(), &reference.image, None, None);
    let r = ratio(eq, total);
    outcome(r >= 0.95, format!("after M={m} passes {eq}/{total} ({r:.4})"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn fractx(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_fractx"))
        .args(args)
        .env_remove("FRACTX_WORKERS")
        .output()
        .is_ok_and(|o| o.status.success())
}

fn parallel_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let (dyadic, quad) = (s(&configs().join("dyadic.json")), s(&configs().join("quad-40-60.json")));
    let (cube, corner) = (s(&configs().join("corner-half.json")), s(&configs().join("corner-35-50-65.json")));
    let ppm = dir.path().join("in.ppm");
    std::fs::write(&ppm, write_ppm(&quadrant_disc_image(128, 128))).unwrap();
    let vox = dir.path().join("in.vox");
    std::fs::write(&vox, write_vox(&sphere_volume(32))).unwrap();

    let mut pass = true;
    let mut parts = Vec::new();
    for (cmd, input, tgt, src, ext, extra) in [
        ("transform2d", &ppm, &dyadic, &quad, "ppm", &["--seed", "5"][..]),
        ("transform3d-voxel", &vox, &cube, &corner, "vox", &[][..]),
    ] {
        let mut outputs = Vec::new();
        for w in [1, 2, 4, 8] {
            let out = dir.path().join(format!("{cmd}-{w}.{ext}"));
            let (i, o, n) = (s(input), s(&out), w.to_string());
            let mut args = vec![cmd, "--in", &i, "--out", &o, "--tgt", tgt, "--src", src, "--workers", &n];
            args.extend_from_slice(extra);
            let ok = fractx(&args);
            outputs.push(if ok { std::fs::read(&out).ok() } else { None });
        }
        let same = outputs[0].is_some() && outputs.iter().all(|o| o == &outputs[0]);
        pass &= same;
        parts.push(format!("{cmd}={same}"));
    }
    outcome(pass, parts.join(" "))
}

fn mask_generality() -> Outcome {
    let lo = family_strip2d(0.6, 0.45).unwrap();
    let hi = family_strip2d(0.6, 0.55).unwrap();
    let points: Vec<Point<2>> = fractx_core::sampling::quasi_random::<2>(10_000).collect();
    let differ = points
        .iter()
        .filter(|p| lo.section_address(p, 12).ok() != hi.section_address(p, 12).ok())
        .count();
    let r = ratio(differ, points.len());
    outcome(r >= 0.30, format!("{differ}/{} ({r:.4})", points.len()))
}

fn mesh_pipeline() -> Outcome {
    let f = family_corner3d([0.5; 3]).unwrap();
    let g = family_corner3d([0.35, 0.5, 0.65]).unwrap();
    let o = MeshOptions::default();
    let eps = o.precision.epsilon;
    let sheet = sheet_mesh(32, 0.5);
    let worst = transform_mesh(&sheet, &f, &g, &o)
        .and_then(|there| transform_mesh(&there.mesh, &g, &f, &o))
        .map(|back| {
            back.mesh
                .vertices
                .iter()
                .zip(&sheet.vertices)
                .map(|(a, b)| a.max_dist(b))
                .fold(0.0, f64::max)
        })
        .unwrap_or(f64::INFINITY);
    let mut corpus_ok = true;
    for (_, text) in obj_corpus() {
        let ok = read_obj(&text).and_then(|r| {
            let tri = triangulate(&r.mesh)?;
            let expected: usize = r.mesh.faces.iter().map(|f| f.len() - 2).sum();
            let fine = retriangulate_max_edge(&tri, 0.1, 100_000)?;
            let clean = fine.faces.iter().all(|f| {
                !is_degenerate(&fine.vertices[f[0]], &fine.vertices[f[1]], &fine.vertices[f[2]])
            });
            Ok(tri.faces.len() == expected && tri.is_triangulated() && fine.max_edge() <= 0.1 + 1e-12 && clean)
        });
        corpus_ok &= ok.unwrap_or(false);
    }
    outcome(
        worst <= 2.0 * eps && corpus_ok,
        format!("sheet worst={worst:.3e} limit={:.3e} corpus={corpus_ok}", 2.0 * eps),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("error recurrence anchor", error_recurrence),
        ("code length anchor", code_length_anchor),
        ("identity suite", identity_suite),
        ("homeomorphism round trip", homeomorphism_round_trip),
        ("oracle equivalence", oracle_equivalence),
        ("cross-engine agreement", cross_engine_agreement),
        ("approximation convergence", approx_convergence),
        ("parallel determinism", parallel_determinism),
        ("mask generality", mask_generality),
        ("mesh pipeline", mesh_pipeline),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let r = check();
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {name}: {} [{:.2}s]", r.detail, t.elapsed().as_secs_f64());
        failed += (!r.pass) as usize;
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
