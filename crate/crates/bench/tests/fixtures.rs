use fractx_bench::{options, planar, planar_skewed, spatial};
use fractx_core::*;

#[test]
fn fixtures_are_transformable() {
    for f in [planar(16), planar_skewed(16)] {
        let out = transform_image_perpixel(&f.image, &f.tgt, &f.src, &options(2)).unwrap();
        assert_eq!(out.report.written, 16 * 16);
    }
    let s = spatial(8);
    assert_eq!(transform_voxels(&s.volume, &s.tgt, &s.src, &options(2)).unwrap().report.escaped, 0);
    assert!(transform_mesh(&s.mesh, &s.tgt, &s.src, &MeshOptions::default()).unwrap().escaped.is_empty());
}

#[test]
fn chaining_saves_steps_off_the_pixel_grid() {
    let f = planar_skewed(64);
    let o = options(1);
    let chained = transform_image_chained(&f.image, &f.tgt, &f.src, &o).unwrap();
    let perpixel = transform_image_perpixel(&f.image, &f.tgt, &f.src, &o).unwrap();
    println!("chained {} perpixel {}", chained.report.masked_steps, perpixel.report.masked_steps);
    assert!(chained.report.masked_steps < perpixel.report.masked_steps);
}
