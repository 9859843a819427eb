use std::io::Write;
use std::path::Path;
use std::time::Duration;

use fractx_core::raster::{transform_image_chained, transform_image_chaos, transform_image_chaos_masked};
use fractx_core::*;
use fractx_service::ServiceConfig;

use crate::{bench, Command, Degenerate, Engine, Failure};

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn load_config(path: &Path) -> Result<ConfigDoc, Failure> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::Invalid(format!("{}: config is not UTF-8", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn load_pair(tgt: &Path, src: &Path) -> Result<(ConfigDoc, AnySystem, ConfigDoc, AnySystem), Failure> {
    let t = load_config(tgt)?;
    let s = load_config(src)?;
    let ts = t.build().map_err(|e| Failure::Invalid(format!("{}: {e}", tgt.display())))?;
    let ss = s.build().map_err(|e| Failure::Invalid(format!("{}: {e}", src.display())))?;
    Ok((t, ts, s, ss))
}

/// `base` with the source config's precision overrides, then the target's.
fn policy(t: &ConfigDoc, s: &ConfigDoc, base: PrecisionPolicy, code_length: Option<usize>) -> PrecisionPolicy {
    let p = t.precision_policy(s.precision_policy(base));
    match code_length {
        Some(m) => p.with_code_length(Some(m)),
        None => p,
    }
}

fn escaped(n: u64, what: &str) -> Result<(), Failure> {
    if n == 0 {
        Ok(())
    } else {
        Err(Failure::Runtime(format!(
            "{n} {what} orbits escaped (OrbitEscaped); output written with their fallback values"
        )))
    }
}

fn report_line(out: &mut impl Write, r: &JobReport) -> Result<(), Failure> {
    writeln!(
        out,
        "engine={} code_length={} derived_code_length={} error_budget={:e} masked_steps={} chaos_iterations={} written={} pixels={} escaped={}",
        r.engine,
        r.code_length,
        r.derived_code_length,
        r.error_budget,
        r.masked_steps,
        r.chaos_iterations,
        r.written,
        r.pixels,
        r.escaped
    )
    .map_err(|e| Failure::Runtime(e.to_string()))
}

pub fn dispatch(cmd: Command, out: &mut impl Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Runtime(e.to_string());
    match cmd {
        Command::Validate { ifs } => {
            let doc = load_config(&ifs)?;
            let report = doc
                .validate()
                .map_err(|e| Failure::Invalid(format!("{}: {e}", ifs.display())))?;
            writeln!(out, "{report}").map_err(io)?;
            if report.is_valid() {
                Ok(())
            } else {
                Err(Failure::Invalid(format!("{} is not a valid IFS", ifs.display())))
            }
        }

        Command::Transform2d {
            input,
            out: dest,
            tgt,
            src,
            engine,
            iters,
            seed,
            workers,
            code_length,
        } => {
            let (t, ts, s, ss) = load_pair(&tgt, &src)?;
            let (ts, ss) = (ts.planar()?, ss.planar()?);
            let img = read_ppm(&read(&input)?)
                .map_err(|e| Failure::Runtime(format!("{}: {e}", input.display())))?;
            let mut opts = EngineOptions::default()
                .with_seed(seed)
                .with_workers(workers.count);
            opts.precision = Some(policy(
                &t,
                &s,
                PrecisionPolicy::for_grid(&[img.width(), img.height()]),
                code_length,
            ));
            if let Some(n) = iters {
                opts = opts.with_chaos_iters(n).with_switch_rule(SwitchRule::Fixed(n));
            }
            let result = match engine {
                Engine::Perpixel => transform_image_perpixel(&img, ts, ss, &opts),
                Engine::Chaos => transform_image_chaos(&img, ts, ss, &opts),
                Engine::ChaosMasked => transform_image_chaos_masked(&img, ts, ss, &opts),
                Engine::Chained => transform_image_chained(&img, ts, ss, &opts),
                Engine::Combined => transform_image_combined(&img, ts, ss, &opts),
            }?;
            write(&dest, &write_ppm(&result.image))?;
            report_line(out, &result.report)?;
            escaped(result.report.escaped, "pixel")
        }

        Command::Transform3dVoxel {
            input,
            out: dest,
            tgt,
            src,
            workers,
            code_length,
        } => {
            let (t, ts, s, ss) = load_pair(&tgt, &src)?;
            let (ts, ss) = (ts.spatial()?, ss.spatial()?);
            let vol = read_vox(&read(&input)?)
                .map_err(|e| Failure::Runtime(format!("{}: {e}", input.display())))?;
            let mut opts = EngineOptions::default().with_workers(workers.count);
            opts.precision = Some(policy(&t, &s, PrecisionPolicy::for_grid(&vol.dims()), code_length));
            let result = transform_voxels(&vol, ts, ss, &opts)?;
            write(&dest, &write_vox(&result.grid))?;
            report_line(out, &result.report)?;
            escaped(result.report.escaped, "voxel")
        }

        Command::Transform3dMesh {
            input,
            out: dest,
            tgt,
            src,
            max_edge,
            vertex_cap,
            degenerate,
            workers,
            code_length,
        } => {
            let (t, ts, s, ss) = load_pair(&tgt, &src)?;
            let (ts, ss) = (ts.spatial()?, ss.spatial()?);
            let text = String::from_utf8(read(&input)?)
                .map_err(|_| Failure::Runtime(format!("{}: OBJ is not UTF-8", input.display())))?;
            let parsed = read_obj(&text).map_err(|e| Failure::Runtime(format!("{}: {e}", input.display())))?;
            if parsed.ignored > 0 {
                eprintln!("fractx: warning: ignored {} unsupported OBJ records", parsed.ignored);
            }
            let mut mesh = triangulate(&parsed.mesh)?;
            if let Some(l) = max_edge {
                mesh = retriangulate_max_edge(&mesh, l, vertex_cap)?;
            }
            let mut opts = MeshOptions {
                workers: workers.count,
                degenerate: match degenerate {
                    Degenerate::Keep => DegeneratePolicy::Keep,
                    Degenerate::Drop => DegeneratePolicy::Drop,
                    Degenerate::Segment => DegeneratePolicy::Segment,
                },
                ..Default::default()
            };
            opts.precision = policy(&t, &s, opts.precision, code_length);
            let result = transform_mesh(&mesh, ts, ss, &opts)?;
            write(&dest, write_obj(&result.mesh).as_bytes())?;
            writeln!(
                out,
                "engine=mesh code_length={} derived_code_length={} error_budget={:e} vertices={} faces={} degenerate={} escaped={}",
                result.precision.code_length,
                result.precision.derived_code_length,
                result.precision.error_budget,
                result.mesh.vertices.len(),
                result.mesh.faces.len(),
                result.degenerate,
                result.escaped.len()
            )
            .map_err(io)?;
            escaped(result.escaped.len() as u64, "vertex")
        }

        Command::Bench { profile, workers } => {
            for line in bench::run_profile(&profile, workers.count)? {
                writeln!(out, "{line}").map_err(io)?;
            }
            Ok(())
        }

        Command::Serve {
            port,
            host,
            root,
            idle_timeout,
            workers,
        } => {
            if let Some(r) = &root {
                if !r.is_dir() {
                    return Err(Failure::Usage(format!("{} is not a directory", r.display())));
                }
            }
            let config = ServiceConfig {
                root,
                idle_timeout: Duration::from_secs(idle_timeout),
                workers: workers.count,
                ..Default::default()
            };
            let addr = std::net::SocketAddr::new(host, port);
            writeln!(out, "listening on http://{addr}").map_err(io)?;
            out.flush().map_err(io)?;
            let rt = tokio::runtime::Runtime::new().map_err(io)?;
            rt.block_on(fractx_service::serve(addr, config)).map_err(io)
        }
    }
}
