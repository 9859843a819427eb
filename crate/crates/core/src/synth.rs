//! Deterministic synthetic inputs shared by tests, benchmarks and the CLI
//! bench profiles.

use crate::geometry::Point;
use crate::raster::PixelBuffer;
use crate::volume::{TriMesh, VoxelGrid};

/// Four coloured quadrants with an off-centre disc across them, so that
/// every cell of a two-by-two split sees distinct content and misplaced
/// pixels show up.
pub fn quadrant_disc_image(width: usize, height: usize) -> PixelBuffer {
    PixelBuffer::from_fn(width, height, |p| {
        let q = (p[0] >= 0.5) as u8 + 2 * (p[1] >= 0.5) as u8;
        let disc = (p[0] - 0.4).powi(2) + (p[1] - 0.6).powi(2) < 0.04;
        if disc {
            [250, 250, 20]
        } else {
            [q * 60, 255 - q * 60, 90]
        }
    })
}

/// A smooth two-channel ramp; every pixel differs from its neighbours.
pub fn gradient_image(width: usize, height: usize) -> PixelBuffer {
    PixelBuffer::from_fn(width, height, |p| {
        [(p[0] * 255.0) as u8, (p[1] * 255.0) as u8, ((p[0] + p[1]) * 127.0) as u8]
    })
}

/// Solid off-centre ball (value 200) inside a graded octant background.
pub fn sphere_volume(n: usize) -> VoxelGrid {
    VoxelGrid::from_fn([n, n, n], |p| {
        let r2 = (p[0] - 0.45).powi(2) + (p[1] - 0.5).powi(2) + (p[2] - 0.55).powi(2);
        if r2 < 0.09 {
            200
        } else {
            let o = (p[0] >= 0.5) as u8 + 2 * (p[1] >= 0.5) as u8 + 4 * (p[2] >= 0.5) as u8;
            10 + 20 * o
        }
    })
}

/// A flat square sheet at height `z`, `n` by `n` quads split into
/// triangles; the starting point of a crumpled photograph.
pub fn sheet_mesh(n: usize, z: f64) -> TriMesh {
    let k = n + 1;
    let mut vertices = Vec::with_capacity(k * k);
    for j in 0..k {
        for i in 0..k {
            vertices.push(Point([i as f64 / n as f64, j as f64 / n as f64, z]));
        }
    }
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let a = j * k + i;
            faces.push(vec![a, a + 1, a + k + 1]);
            faces.push(vec![a, a + k + 1, a + k]);
        }
    }
    TriMesh::new(vertices, faces)
}

/// Valid OBJ files mixing triangles, quads and larger polygons, with the
/// record types a reader has to skip.
pub fn obj_corpus() -> Vec<(&'static str, String)> {
    let mut grid = String::from("# 3x3 quads\n");
    for j in 0..4 {
        for i in 0..4 {
            grid.push_str(&format!("v {} {} 0.25\n", i as f64 / 3.0, j as f64 / 3.0));
        }
    }
    for j in 0..3 {
        for i in 0..3 {
            let a = j * 4 + i + 1;
            grid.push_str(&format!("f {} {} {} {}\n", a, a + 1, a + 5, a + 4));
        }
    }

    let mut hexagon = String::from("o hexagon\n");
    for k in 0..6 {
        let t = k as f64 * std::f64::consts::PI / 3.0;
        hexagon.push_str(&format!("v {} {} {}\n", 0.5 + 0.4 * t.cos(), 0.5 + 0.4 * t.sin(), 0.5));
    }
    hexagon.push_str("v 0.5 0.5 0.9\nf 1 2 3 4 5 6\n");
    for k in 1..=6 {
        hexagon.push_str(&format!("f {} {} 7\n", k, k % 6 + 1));
    }

    let box_ = "\
mtllib box.mtl
v 0.1 0.1 0.1
v 0.9 0.1 0.1
v 0.9 0.9 0.1
v 0.1 0.9 0.1
v 0.1 0.1 0.9
v 0.9 0.1 0.9
v 0.9 0.9 0.9
v 0.1 0.9 0.9
vt 0 0
vt 1 0
vt 1 1
vn 0 0 -1
usemtl grey
s 1
f 1/1/1 4/2/1 3/3/1 2/1/1
f 5 6 7 8
f 1 2 6 5
f 2 3 7
f 2 7 6
f -7 -3 -4 -8
f 4 8 7 3
"
    .to_string();

    let mixed = "\
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0.5 0.5 1
f 1 2 5
f 2 3 5
f 3 4 5
f 4 1 5
f 4 3 2 1
g bottom
l 1 3
"
    .to_string();

    vec![
        ("grid", grid),
        ("hexagon", hexagon),
        ("box", box_),
        ("pyramid", mixed),
    ]
}
