use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::volume::TriMesh;

fn err(line: usize, message: impl std::fmt::Display) -> Error {
    Error::format("OBJ", format!("line {line}: {message}"))
}

/// A parsed mesh and the number of records that were skipped.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjRead {
    pub mesh: TriMesh,
    pub ignored: usize,
}

/// Reads `v x y z` and `f i j k …` records. Face indices are 1-based, may be
/// negative (relative to the vertices read so far), and may carry
/// `/texture/normal` suffixes, which are dropped. Faces may be any polygon.
/// Every other record type is skipped and counted.
pub fn read_obj(text: &str) -> Result<ObjRead> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut ignored = 0;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            None => {}
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .map(|t| t.parse::<f64>().map_err(|_| err(line, format!("non-numeric vertex coordinate {t:?}"))))
                    .collect::<Result<_>>()?;
                if !(3..=4).contains(&coords.len()) {
                    return Err(err(line, format!("vertex needs 3 coordinates, got {}", coords.len())));
                }
                if coords.iter().any(|c| !c.is_finite()) {
                    return Err(err(line, "non-finite vertex coordinate"));
                }
                vertices.push(Point([coords[0], coords[1], coords[2]]));
            }
            Some("f") => {
                let face = tokens
                    .map(|t| {
                        let idx = t.split('/').next().unwrap_or("");
                        let i: i64 = idx
                            .parse()
                            .map_err(|_| err(line, format!("bad face index {t:?}")))?;
                        match i {
                            0 => Err(err(line, "face index 0 (indices are 1-based)")),
                            i if i > 0 => Ok(i as usize - 1),
                            i => {
                                let back = i.unsigned_abs() as usize;
                                vertices
                                    .len()
                                    .checked_sub(back)
                                    .ok_or_else(|| err(line, format!("relative index {i} before first vertex")))
                            }
                        }
                    })
                    .collect::<Result<Vec<usize>>>()?;
                faces.push((line, face));
            }
            Some(_) => ignored += 1,
        }
    }
    let mesh = TriMesh::new(vertices, faces.iter().map(|(_, f)| f.clone()).collect());
    for (i, (line, f)) in faces.iter().enumerate() {
        if let Some(bad) = f.iter().find(|&&v| v >= mesh.vertices.len()) {
            return Err(err(*line, format!("face index {} out of range", bad + 1)));
        }
        let mut distinct = f.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != f.len() || f.len() < 3 {
            return Err(Error::BadFace {
                face: i,
                message: format!("line {line}: a face needs at least 3 distinct vertices"),
            });
        }
    }
    Ok(ObjRead { mesh, ignored })
}

/// Writes `v` and `f` records only. Coordinates use the shortest decimal
/// form that reads back to the same number.
pub fn write_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
    }
    for f in &mesh.faces {
        out.push('f');
        for i in f {
            let _ = write!(out, " {}", i + 1);
        }
        out.push('\n');
    }
    out
}
