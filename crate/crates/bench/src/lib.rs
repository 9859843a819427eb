//! Fixed workloads shared by the benchmarks.

use fractx_core::synth::{quadrant_disc_image, sheet_mesh, sphere_volume};
use fractx_core::*;

/// A square image and the planar pair it is transformed under.
pub struct Planar {
    pub image: PixelBuffer,
    pub tgt: IfsSystem<2>,
    pub src: IfsSystem<2>,
}

/// Square dyadic target, `(0.4, 0.6)` source.
pub fn planar(n: usize) -> Planar {
    Planar {
        image: quadrant_disc_image(n, n),
        tgt: family_quad2d(0.5, 0.5).expect("valid family"),
        src: family_quad2d(0.4, 0.6).expect("valid family"),
    }
}

/// Like [`planar`] but with a target whose orbits rarely land on pixel
/// edges, so pixel chains run long.
pub fn planar_skewed(n: usize) -> Planar {
    Planar {
        image: quadrant_disc_image(n, n),
        tgt: family_quad2d(0.4, 0.6).expect("valid family"),
        src: family_quad2d(0.5, 0.5).expect("valid family"),
    }
}

pub struct Spatial {
    pub volume: VoxelGrid,
    pub mesh: TriMesh,
    pub tgt: IfsSystem<3>,
    pub src: IfsSystem<3>,
}

pub fn spatial(n: usize) -> Spatial {
    Spatial {
        volume: sphere_volume(n),
        mesh: sheet_mesh(n, 0.5),
        tgt: family_corner3d([0.5; 3]).expect("valid family"),
        src: family_corner3d([0.35, 0.5, 0.65]).expect("valid family"),
    }
}

pub fn options(workers: usize) -> EngineOptions {
    EngineOptions::default().with_seed(1).with_workers(workers)
}
