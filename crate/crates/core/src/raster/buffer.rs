use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// How the source image is read at a pulled-back point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// The pixel containing the point. Exact for the identity transform.
    #[default]
    Nearest,
    /// Bilinear interpolation between the four nearest pixel centres.
    Bilinear,
}

/// 8-bit RGB image, row-major, row 0 first. Pixel `(col, row)` has its centre
/// at `((col + 0.5) / width, (row + 0.5) / height)` in the unit square.
#[derive(Clone, PartialEq, Eq)]
pub struct PixelBuffer {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for PixelBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PixelBuffer({}x{})", self.width, self.height)
    }
}

impl PixelBuffer {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, [0, 0, 0])
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        PixelBuffer {
            width,
            height,
            data: rgb.repeat(width * height),
        }
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        let want = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3))
            .ok_or_else(|| Error::format("image", "dimensions overflow"))?;
        if data.len() != want {
            return Err(Error::format(
                "image",
                format!("{width}x{height} RGB needs {want} bytes, got {}", data.len()),
            ));
        }
        Ok(PixelBuffer {
            width,
            height,
            data,
        })
    }

    /// Builds an image from a colour function of the pixel centre.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(Point<2>) -> [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for row in 0..height {
            for col in 0..width {
                data.extend_from_slice(&f(Self::centre(col, row, width, height)));
            }
        }
        PixelBuffer {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    pub(crate) fn par_rows_mut(&mut self) -> rayon::slice::ChunksExactMut<'_, u8> {
        use rayon::slice::ParallelSliceMut;
        self.data.par_chunks_exact_mut(3 * self.width.max(1))
    }

    /// Pixel by linear index.
    pub fn pixel(&self, i: usize) -> [u8; 3] {
        [self.data[3 * i], self.data[3 * i + 1], self.data[3 * i + 2]]
    }

    pub fn get(&self, col: usize, row: usize) -> [u8; 3] {
        self.pixel(row * self.width + col)
    }

    pub fn set(&mut self, col: usize, row: usize, rgb: [u8; 3]) {
        self.set_pixel(row * self.width + col, rgb);
    }

    pub fn set_pixel(&mut self, i: usize, rgb: [u8; 3]) {
        self.data[3 * i..3 * i + 3].copy_from_slice(&rgb);
    }

    pub fn centre(col: usize, row: usize, width: usize, height: usize) -> Point<2> {
        Point([
            (col as f64 + 0.5) / width as f64,
            (row as f64 + 0.5) / height as f64,
        ])
    }

    pub fn pixel_centre(&self, col: usize, row: usize) -> Point<2> {
        Self::centre(col, row, self.width, self.height)
    }

    /// The pixel containing `p`; points on the far edges belong to the last
    /// row or column.
    pub fn locate(p: &Point<2>, width: usize, height: usize) -> (usize, usize) {
        (cell(p[0], width), cell(p[1], height))
    }

    pub fn sample(&self, q: &Point<2>, mode: Sampling) -> [u8; 3] {
        match mode {
            Sampling::Nearest => {
                let (c, r) = Self::locate(q, self.width, self.height);
                self.get(c, r)
            }
            Sampling::Bilinear => self.bilinear(q),
        }
    }

    fn bilinear(&self, q: &Point<2>) -> [u8; 3] {
        let axis = |v: f64, n: usize| {
            let t = (v * n as f64 - 0.5).clamp(0.0, (n - 1) as f64);
            let i = (t.floor() as usize).min(n.saturating_sub(2));
            (i, (i + 1).min(n - 1), t - i as f64)
        };
        let (c0, c1, fx) = axis(q[0], self.width);
        let (r0, r1, fy) = axis(q[1], self.height);
        let (a, b, c, d) = (
            self.get(c0, r0),
            self.get(c1, r0),
            self.get(c0, r1),
            self.get(c1, r1),
        );
        std::array::from_fn(|k| {
            let top = a[k] as f64 * (1.0 - fx) + b[k] as f64 * fx;
            let bottom = c[k] as f64 * (1.0 - fx) + d[k] as f64 * fx;
            (top * (1.0 - fy) + bottom * fy).round() as u8
        })
    }
}

#[inline]
pub(crate) fn cell(v: f64, n: usize) -> usize {
    let i = (v * n as f64).floor();
    if i <= 0.0 {
        0
    } else {
        (i as usize).min(n - 1)
    }
}

/// Which pixels an engine has written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageMap {
    written: Vec<bool>,
    unwritten: usize,
}

impl CoverageMap {
    pub fn new(pixels: usize) -> Self {
        CoverageMap {
            written: vec![false; pixels],
            unwritten: pixels,
        }
    }

    pub fn full(pixels: usize) -> Self {
        CoverageMap {
            written: vec![true; pixels],
            unwritten: 0,
        }
    }

    /// Marks pixel `i`; true when it was not written before.
    pub fn mark(&mut self, i: usize) -> bool {
        let fresh = !self.written[i];
        if fresh {
            self.written[i] = true;
            self.unwritten -= 1;
        }
        fresh
    }

    pub fn is_written(&self, i: usize) -> bool {
        self.written[i]
    }

    pub fn unwritten(&self) -> usize {
        self.unwritten
    }

    pub fn written(&self) -> usize {
        self.written.len() - self.unwritten
    }

    pub fn len(&self) -> usize {
        self.written.len()
    }

    pub fn is_empty(&self) -> bool {
        self.written.is_empty()
    }

    pub fn fraction(&self) -> f64 {
        if self.written.is_empty() {
            1.0
        } else {
            self.written() as f64 / self.written.len() as f64
        }
    }

    pub fn flags(&self) -> &[bool] {
        &self.written
    }
}
