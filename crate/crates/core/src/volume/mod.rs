//! 3D transforms: voxel volumes per voxel, triangle meshes per vertex.

mod mesh;
mod voxels;

pub use mesh::{
    is_degenerate, retriangulate_max_edge, transform_mesh, triangulate, DegeneratePolicy, MeshOptions,
    MeshOutput, TriMesh, DEFAULT_VERTEX_CAP,
};
pub use voxels::{transform_voxels, VoxelGrid, VoxelOutput};
