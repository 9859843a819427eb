use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::parallel;
use crate::raster::{EngineOptions, JobReport};
use crate::system::IfsSystem;
use crate::transform::Transformer;

/// One byte per voxel, x fastest, then y, then z. Voxel `(i, j, k)` has its
/// centre at `((i + 0.5) / nx, (j + 0.5) / ny, (k + 0.5) / nz)`.
#[derive(Clone, PartialEq, Eq)]
pub struct VoxelGrid {
    dims: [usize; 3],
    data: Vec<u8>,
}

impl std::fmt::Debug for VoxelGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [x, y, z] = self.dims;
        write!(f, "VoxelGrid({x}x{y}x{z})")
    }
}

impl VoxelGrid {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        VoxelGrid {
            dims: [nx, ny, nz],
            data: vec![0; nx * ny * nz],
        }
    }

    pub fn from_raw(dims: [usize; 3], data: Vec<u8>) -> Result<Self> {
        let want = dims
            .iter()
            .try_fold(1usize, |a, &d| a.checked_mul(d))
            .ok_or_else(|| Error::format("volume", "dimensions overflow"))?;
        if data.len() != want {
            return Err(Error::format(
                "volume",
                format!("{dims:?} needs {want} voxels, got {}", data.len()),
            ));
        }
        Ok(VoxelGrid { dims, data })
    }

    pub fn from_fn(dims: [usize; 3], f: impl Fn(Point<3>) -> u8) -> Self {
        let mut g = VoxelGrid::new(dims[0], dims[1], dims[2]);
        for idx in 0..g.data.len() {
            g.data[idx] = f(g.centre_of(idx));
        }
        g
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.dims[1] + j) * self.dims[0] + i
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u8 {
        self.data[self.index(i, j, k)]
    }

    pub fn centre(&self, i: usize, j: usize, k: usize) -> Point<3> {
        let [nx, ny, nz] = self.dims;
        Point([
            (i as f64 + 0.5) / nx as f64,
            (j as f64 + 0.5) / ny as f64,
            (k as f64 + 0.5) / nz as f64,
        ])
    }

    fn centre_of(&self, idx: usize) -> Point<3> {
        let [nx, ny, _] = self.dims;
        self.centre(idx % nx, (idx / nx) % ny, idx / (nx * ny))
    }

    /// Nearest-voxel lookup.
    pub fn sample(&self, q: &Point<3>) -> u8 {
        let c = |k: usize| crate::raster::buffer_cell(q[k], self.dims[k]);
        self.get(c(0), c(1), c(2))
    }
}

#[derive(Clone, Debug)]
pub struct VoxelOutput {
    pub grid: VoxelGrid,
    pub report: JobReport,
}

/// Per-voxel transform: every output voxel centre is pulled back through the
/// pair and read from `vol` at the nearest voxel. Escaped voxels become 0.
pub fn transform_voxels(
    vol: &VoxelGrid,
    tgt: &IfsSystem<3>,
    src: &IfsSystem<3>,
    opts: &EngineOptions,
) -> Result<VoxelOutput> {
    let [nx, ny, nz] = vol.dims;
    let precision = opts.resolve(tgt, src, &[nx, ny, nz])?;
    let t = Transformer {
        tgt,
        src,
        precision,
    };
    let mut grid = VoxelGrid::new(nx, ny, nz);
    let slab = (nx * ny).max(1);
    let (steps, escaped) = parallel::install(opts.workers, || {
        grid.data
            .par_chunks_mut(slab)
            .enumerate()
            .map(|(k, out)| {
                let (mut steps, mut escaped) = (0u64, 0u64);
                for (n, v) in out.iter_mut().enumerate() {
                    let p = vol.centre(n % nx, n / nx, k);
                    *v = match t.pull_back_counted(&p) {
                        Ok((q, s)) => {
                            steps += s as u64;
                            vol.sample(&q)
                        }
                        Err(_) => {
                            escaped += 1;
                            0
                        }
                    };
                }
                (steps, escaped)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    })?;
    let mut report = JobReport::new("voxel", &precision, vol.len());
    report.masked_steps = steps;
    report.escaped = escaped;
    report.written = vol.len();
    Ok(VoxelOutput { grid, report })
}
