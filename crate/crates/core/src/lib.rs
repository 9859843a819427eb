//! Fractal transformations between attractors of masked affine iterated
//! function systems on the unit square and cube, and their application to
//! images, voxel volumes and triangle meshes.

pub mod error;
pub mod families;
pub mod geometry;
pub mod io;
pub mod mask;
pub mod parallel;
pub mod precision;
pub mod raster;
pub mod sampling;
pub mod synth;
pub mod system;
pub mod transform;
pub mod volume;

pub use error::{Error, Result};
pub use families::{
    family_corner3d, family_quad2d, family_strip2d, validate_ifs, validate_maps, FamilyParams,
    ValidationReport,
};
pub use io::{
    parse_config, read_obj, read_ppm, read_vox, write_config, write_obj, write_ppm, write_vox,
    ConfigDoc,
};
pub use families::ifs_from_config;
pub use geometry::{contraction_factor, AffineMap, Point};
pub use mask::{Address, MaskKind, MaskSpec, Symbol};
pub use precision::{code_length, error_budget, PrecisionPolicy, Resolved};
pub use system::{AnySystem, IfsSystem};
pub use transform::{transform_point, Transformer};
pub use raster::{
    transform_image_chained, transform_image_chaos, transform_image_chaos_masked,
    transform_image_combined, transform_image_perpixel, ApproxState, CoverageMap, EngineOptions,
    JobReport, PixelBuffer, RasterOutput, Sampling, SwitchRule,
};
pub use volume::{
    retriangulate_max_edge, transform_mesh, transform_voxels, triangulate, DegeneratePolicy,
    MeshOptions, TriMesh, VoxelGrid,
};
