use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::parallel;
use crate::precision::{PrecisionPolicy, Resolved};
use crate::system::IfsSystem;
use crate::transform::Transformer;

pub const DEFAULT_VERTEX_CAP: usize = 4_000_000;

/// Vertices in the unit cube and polygonal faces (0-based indices). After
/// [`triangulate`] every face is a triangle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Point<3>>,
    pub faces: Vec<Vec<usize>>,
    /// Degenerate triangles recorded as line segments.
    pub segments: Vec<[usize; 2]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point<3>>, faces: Vec<Vec<usize>>) -> Self {
        TriMesh {
            vertices,
            faces,
            segments: Vec::new(),
        }
    }

    pub fn is_triangulated(&self) -> bool {
        self.faces.iter().all(|f| f.len() == 3)
    }

    /// Longest edge over all faces.
    pub fn max_edge(&self) -> f64 {
        self.faces
            .iter()
            .flat_map(|f| (0..f.len()).map(move |k| (f[k], f[(k + 1) % f.len()])))
            .map(|(a, b)| self.vertices[a].dist(&self.vertices[b]))
            .fold(0.0, f64::max)
    }

    fn check_face(&self, index: usize, face: &[usize]) -> Result<()> {
        if let Some(&bad) = face.iter().find(|&&v| v >= self.vertices.len()) {
            return Err(Error::BadFace {
                face: index,
                message: format!("vertex index {bad} out of range"),
            });
        }
        let mut sorted = face.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() < 3 {
            return Err(Error::BadFace {
                face: index,
                message: format!("only {} distinct vertices", sorted.len()),
            });
        }
        if sorted.len() != face.len() {
            return Err(Error::BadFace {
                face: index,
                message: "repeats a vertex".into(),
            });
        }
        Ok(())
    }
}

/// Fan triangulation from the first vertex of each face; an `n`-gon becomes
/// `n - 2` triangles. Correct for convex faces.
pub fn triangulate(mesh: &TriMesh) -> Result<TriMesh> {
    let mut faces = Vec::with_capacity(mesh.faces.len());
    for (i, f) in mesh.faces.iter().enumerate() {
        mesh.check_face(i, f)?;
        for k in 1..f.len() - 1 {
            faces.push(vec![f[0], f[k], f[k + 1]]);
        }
    }
    Ok(TriMesh {
        vertices: mesh.vertices.clone(),
        faces,
        segments: mesh.segments.clone(),
    })
}

/// What to do with a triangle whose transformed vertices are collinear.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegeneratePolicy {
    #[default]
    Keep,
    Drop,
    /// Replace it by the segment between its two farthest vertices.
    Segment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeshOptions {
    pub precision: PrecisionPolicy,
    pub workers: usize,
    pub degenerate: DegeneratePolicy,
}

impl Default for MeshOptions {
    fn default() -> Self {
        MeshOptions {
            precision: PrecisionPolicy::for_pitch(1.0 / 1024.0),
            workers: 1,
            degenerate: DegeneratePolicy::Keep,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MeshOutput {
    pub mesh: TriMesh,
    pub precision: Resolved,
    /// Vertices whose orbit escaped; they keep their input position.
    pub escaped: Vec<usize>,
    pub degenerate: usize,
}

/// Area below `1e-12` times the squared longest edge counts as collinear.
pub fn is_degenerate(a: &Point<3>, b: &Point<3>, c: &Point<3>) -> bool {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let area = 0.5 * (cross[0].powi(2) + cross[1].powi(2) + cross[2].powi(2)).sqrt();
    let longest = a.dist(b).max(b.dist(c)).max(c.dist(a));
    area <= 1e-12 * longest * longest
}

/// Moves every vertex to its pull-back under the pair; faces are kept, apart
/// from degenerate triangles handled per `opts.degenerate`.
pub fn transform_mesh(
    mesh: &TriMesh,
    tgt: &IfsSystem<3>,
    src: &IfsSystem<3>,
    opts: &MeshOptions,
) -> Result<MeshOutput> {
    if !mesh.is_triangulated() {
        return Err(Error::Unsupported("mesh must be triangulated first".into()));
    }
    let tol = tgt.mask().tolerance;
    for (index, v) in mesh.vertices.iter().enumerate() {
        if !v.in_unit(tol) {
            return Err(Error::VertexOutOfDomain { index, point: v.0 });
        }
    }
    crate::transform::check_pair(tgt, src)?;
    let precision = opts.precision.resolve(tgt, src)?;
    let t = Transformer {
        tgt,
        src,
        precision,
    };
    let moved: Vec<Option<Point<3>>> = parallel::install(opts.workers, || {
        mesh.vertices
            .par_iter()
            .map(|v| t.pull_back(&v.clamped()).ok())
            .collect()
    })?;
    let mut escaped = Vec::new();
    let vertices: Vec<Point<3>> = moved
        .iter()
        .enumerate()
        .map(|(i, q)| {
            q.unwrap_or_else(|| {
                escaped.push(i);
                mesh.vertices[i]
            })
        })
        .collect();

    let mut faces = Vec::with_capacity(mesh.faces.len());
    let mut segments = mesh.segments.clone();
    let mut degenerate = 0;
    for f in &mesh.faces {
        let (a, b, c) = (vertices[f[0]], vertices[f[1]], vertices[f[2]]);
        if !is_degenerate(&a, &b, &c) {
            faces.push(f.clone());
            continue;
        }
        degenerate += 1;
        match opts.degenerate {
            DegeneratePolicy::Keep => faces.push(f.clone()),
            DegeneratePolicy::Drop => {}
            DegeneratePolicy::Segment => {
                let pairs = [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])];
                let (p, q) = pairs
                    .into_iter()
                    .max_by(|x, y| {
                        let dx = vertices[x.0].dist(&vertices[x.1]);
                        let dy = vertices[y.0].dist(&vertices[y.1]);
                        dx.total_cmp(&dy)
                    })
                    .expect("three pairs");
                segments.push([p, q]);
            }
        }
    }
    Ok(MeshOutput {
        mesh: TriMesh {
            vertices,
            faces,
            segments,
        },
        precision,
        escaped,
        degenerate,
    })
}

#[derive(PartialEq)]
struct Edge {
    len: f64,
    key: (usize, usize),
}

impl Eq for Edge {}

impl Ord for Edge {
    // Longest first; ties go to the smaller key so the order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .total_cmp(&other.len)
            .then_with(|| other.key.cmp(&self.key))
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Splits edges longer than `max_edge` at their midpoints, longest first.
/// Every triangle sharing a split edge is split with it, so no cracks
/// appear. Fails when more than `vertex_cap` vertices would be needed.
pub fn retriangulate_max_edge(mesh: &TriMesh, max_edge: f64, vertex_cap: usize) -> Result<TriMesh> {
    if !(max_edge > 0.0) {
        return Err(Error::InvalidParameter {
            name: "max_edge",
            value: max_edge,
            range: "> 0",
        });
    }
    if !mesh.is_triangulated() {
        return Err(Error::Unsupported("mesh must be triangulated first".into()));
    }
    let mut vertices = mesh.vertices.clone();
    let mut tris: Vec<[usize; 3]> = mesh.faces.iter().map(|f| [f[0], f[1], f[2]]).collect();
    let mut adjacency: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let len = |vs: &[Point<3>], k: (usize, usize)| vs[k.0].dist(&vs[k.1]);

    for (t, tri) in tris.iter().enumerate() {
        for j in 0..3 {
            let k = key(tri[j], tri[(j + 1) % 3]);
            let owners = adjacency.entry(k).or_default();
            if owners.is_empty() {
                heap.push(Edge {
                    len: len(&vertices, k),
                    key: k,
                });
            }
            owners.push(t);
        }
    }

    while let Some(Edge { len: l, key: k }) = heap.pop() {
        if l <= max_edge {
            break;
        }
        let Some(owners) = adjacency.remove(&k) else {
            continue;
        };
        if vertices.len() >= vertex_cap {
            return Err(Error::VertexBudget { cap: vertex_cap });
        }
        let (a, b) = k;
        let m = vertices.len();
        vertices.push(Point(std::array::from_fn(|i| 0.5 * (vertices[a][i] + vertices[b][i]))));
        for t in owners {
            let tri = tris[t];
            // Rotate so the split edge is (tri[0], tri[1]), keeping orientation.
            let r = (0..3)
                .find(|&j| key(tri[j], tri[(j + 1) % 3]) == k)
                .expect("owner contains edge");
            let (p, q, c) = (tri[r], tri[(r + 1) % 3], tri[(r + 2) % 3]);
            let first = [p, m, c];
            let second = [m, q, c];
            let t2 = tris.len();
            tris[t] = first;
            tris.push(second);

            // (q, c) moves from t to t2; (p, m), (m, q), (m, c) are new.
            if let Some(o) = adjacency.get_mut(&key(q, c)) {
                for x in o.iter_mut().filter(|x| **x == t) {
                    *x = t2;
                }
            }
            for (e, owner) in [(key(p, m), t), (key(m, q), t2)] {
                adjacency.entry(e).or_default().push(owner);
                heap.push(Edge {
                    len: len(&vertices, e),
                    key: e,
                });
            }
            let mc = key(m, c);
            let entry = adjacency.entry(mc).or_default();
            if entry.is_empty() {
                heap.push(Edge {
                    len: len(&vertices, mc),
                    key: mc,
                });
            }
            entry.extend([t, t2]);
        }
    }

    Ok(TriMesh {
        vertices,
        faces: tris.into_iter().map(|t| t.to_vec()).collect(),
        segments: mesh.segments.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::family_corner3d;

    fn p(x: f64, y: f64, z: f64) -> Point<3> {
        Point([x, y, z])
    }

    #[test]
    fn fan_rule() {
        let quad = TriMesh::new(
            vec![p(0., 0., 0.), p(1., 0., 0.), p(1., 1., 0.), p(0., 1., 0.)],
            vec![vec![0, 1, 2, 3]],
        );
        assert_eq!(triangulate(&quad).unwrap().faces, vec![vec![0, 1, 2], vec![0, 2, 3]]);

        let hex: Vec<Point<3>> = (0..6)
            .map(|k| {
                let a = k as f64 * std::f64::consts::TAU / 6.0;
                p(0.5 + 0.4 * a.cos(), 0.5 + 0.4 * a.sin(), 0.5)
            })
            .collect();
        let t = triangulate(&TriMesh::new(hex, vec![(0..6).collect()])).unwrap();
        assert_eq!(t.faces.len(), 4);
        assert!(t.faces.iter().all(|f| f[0] == 0));
    }

    #[test]
    fn triangles_pass_through() {
        let m = TriMesh::new(vec![p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.)], vec![vec![2, 0, 1]]);
        assert_eq!(triangulate(&m).unwrap(), m);
    }

    #[test]
    fn bad_faces_rejected_with_index() {
        let m = TriMesh::new(
            vec![p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.)],
            vec![vec![0, 1, 2], vec![0, 1, 0]],
        );
        assert!(matches!(triangulate(&m), Err(Error::BadFace { face: 1, .. })));
        let m = TriMesh::new(vec![p(0., 0., 0.)], vec![vec![0, 1, 2]]);
        assert!(matches!(triangulate(&m), Err(Error::BadFace { face: 0, .. })));
    }

    #[test]
    fn degeneracy_is_scale_aware() {
        assert!(is_degenerate(&p(0., 0., 0.), &p(0.5, 0.5, 0.5), &p(1., 1., 1.)));
        assert!(!is_degenerate(&p(0., 0., 0.), &p(1e-5, 0., 0.), &p(0., 1e-5, 0.)));
        assert!(is_degenerate(&p(0.3, 0.3, 0.3), &p(0.3, 0.3, 0.3), &p(0.3, 0.3, 0.3)));
    }

    #[test]
    fn degenerate_policies() {
        // A triangle collinear from the start stays collinear under the
        // identity pair.
        let sys = family_corner3d([0.5; 3]).unwrap();
        let m = TriMesh::new(
            vec![p(0.1, 0.1, 0.1), p(0.2, 0.2, 0.2), p(0.4, 0.4, 0.4), p(0.1, 0.9, 0.3)],
            vec![vec![0, 1, 2], vec![0, 2, 3]],
        );
        let run = |d| {
            let o = MeshOptions {
                degenerate: d,
                ..Default::default()
            };
            transform_mesh(&m, &sys, &sys, &o).unwrap()
        };
        let keep = run(DegeneratePolicy::Keep);
        assert_eq!((keep.mesh.faces.len(), keep.degenerate), (2, 1));
        let drop = run(DegeneratePolicy::Drop);
        assert_eq!(drop.mesh.faces, vec![vec![0, 2, 3]]);
        let seg = run(DegeneratePolicy::Segment);
        assert_eq!(seg.mesh.faces.len(), 1);
        assert_eq!(seg.mesh.segments, vec![[2, 0]]);
    }

    #[test]
    fn identity_keeps_vertices() {
        let sys = family_corner3d([0.5; 3]).unwrap();
        let m = TriMesh::new(
            vec![p(0.13, 0.71, 0.4), p(0.9, 0.2, 0.33), p(0.5, 0.55, 0.95)],
            vec![vec![0, 1, 2]],
        );
        let o = MeshOptions::default();
        let out = transform_mesh(&m, &sys, &sys, &o).unwrap();
        assert_eq!(out.mesh.faces, m.faces);
        for (a, b) in out.mesh.vertices.iter().zip(&m.vertices) {
            assert!(a.max_dist(b) <= o.precision.epsilon / 2.0);
        }
    }

    #[test]
    fn vertex_outside_cube_rejected() {
        let sys = family_corner3d([0.5; 3]).unwrap();
        let m = TriMesh::new(
            vec![p(0.1, 0.1, 0.1), p(1.2, 0.2, 0.2), p(0.4, 0.3, 0.4)],
            vec![vec![0, 1, 2]],
        );
        assert!(matches!(
            transform_mesh(&m, &sys, &sys, &MeshOptions::default()),
            Err(Error::VertexOutOfDomain { index: 1, .. })
        ));
    }

    #[test]
    fn short_edges_untouched() {
        let m = TriMesh::new(
            vec![p(0., 0., 0.), p(0.1, 0., 0.), p(0., 0.1, 0.)],
            vec![vec![0, 1, 2]],
        );
        assert_eq!(retriangulate_max_edge(&m, 0.2, 100).unwrap(), m);
    }

    #[test]
    fn one_split_halves_longest_edge() {
        let m = TriMesh::new(
            vec![p(0., 0., 0.), p(1., 0., 0.), p(0.4, 0.3, 0.)],
            vec![vec![0, 1, 2]],
        );
        let l = m.max_edge();
        let others = p(0., 0., 0.).dist(&p(0.4, 0.3, 0.)).max(p(1., 0., 0.).dist(&p(0.4, 0.3, 0.)));
        let out = retriangulate_max_edge(&m, l - 1e-9, 100).unwrap();
        assert_eq!(out.faces.len(), 2);
        assert!(out.max_edge() <= (l / 2.0).max(others) + 1e-15);
    }

    #[test]
    fn refinement_is_conforming_and_bounded() {
        let m = TriMesh::new(
            vec![p(0., 0., 0.), p(1., 0., 0.), p(1., 1., 0.), p(0., 1., 0.5)],
            vec![vec![0, 1, 2], vec![0, 2, 3]],
        );
        let out = retriangulate_max_edge(&m, 0.1, 100_000).unwrap();
        assert!(out.max_edge() <= 0.1);
        // Conforming: every interior edge is shared by exactly two triangles.
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &out.faces {
            for j in 0..3 {
                *count.entry(key(f[j], f[(j + 1) % 3])).or_default() += 1;
            }
        }
        assert!(count.values().all(|&c| c <= 2));
        let boundary = count.values().filter(|&&c| c == 1).count();
        let perimeter = 1.0 + 1.0 + 1.25f64.sqrt() + 1.0;
        assert!(boundary as f64 <= perimeter / 0.05 + 8.0, "{boundary}");
        assert!(matches!(
            retriangulate_max_edge(&m, 1e-4, 1000),
            Err(Error::VertexBudget { cap: 1000 })
        ));
    }
}
