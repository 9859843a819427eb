//! Lossless file formats: binary PPM images, VOXU8 volumes, Wavefront OBJ
//! meshes, and the JSON system config.

pub mod config;
mod obj;
mod ppm;
mod vox;

pub use config::{parse_config, write_config, ConfigDoc, MapSpec, PrecisionOverrides, SystemSpec};
pub use obj::{read_obj, write_obj, ObjRead};
pub use ppm::{read_ppm, write_ppm};
pub use vox::{read_vox, write_vox};
