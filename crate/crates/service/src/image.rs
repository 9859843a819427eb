//! Upload decoding and preview encoding.

use fractx_core::{read_ppm, PixelBuffer, Sampling};

/// Decodes a binary PPM or a PNG (any colour type, 8 or 16 bit) to RGB.
pub fn decode(bytes: &[u8]) -> Result<PixelBuffer, String> {
    if bytes.starts_with(b"P6") || bytes.starts_with(b"P3") {
        return read_ppm(bytes).map_err(|e| e.to_string());
    }
    if bytes.starts_with(b"\x89PNG") {
        return decode_png(bytes);
    }
    Err("image is neither a binary PPM nor a PNG".into())
}

/// Width and height from the header alone, so oversize uploads can be
/// refused before decoding.
pub fn dimensions(bytes: &[u8]) -> Option<(usize, usize)> {
    if bytes.starts_with(b"\x89PNG") && bytes.len() >= 24 {
        let w = u32::from_be_bytes(bytes[16..20].try_into().ok()?);
        let h = u32::from_be_bytes(bytes[20..24].try_into().ok()?);
        return Some((w as usize, h as usize));
    }
    if bytes.starts_with(b"P6") {
        let head = std::str::from_utf8(&bytes[..bytes.len().min(256)]).unwrap_or_else(|e| {
            std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or("")
        });
        let mut nums = head
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace)
            .skip(1)
            .map(|t| t.parse::<usize>());
        let w = nums.next()?.ok()?;
        let h = nums.next()?.ok()?;
        return Some((w, h));
    }
    None
}

fn decode_png(bytes: &[u8]) -> Result<PixelBuffer, String> {
    let mut decoder = png::Decoder::new(bytes);
    decoder.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = decoder.read_info().map_err(|e| e.to_string())?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    let (w, h) = (info.width as usize, info.height as usize);
    let channels = info.color_type.samples();
    let data = &buf[..info.buffer_size()];
    let mut rgb = Vec::with_capacity(w * h * 3);
    for px in data.chunks_exact(channels) {
        match channels {
            1 | 2 => rgb.extend_from_slice(&[px[0], px[0], px[0]]),
            _ => rgb.extend_from_slice(&px[..3]),
        }
    }
    PixelBuffer::from_raw(w, h, rgb).map_err(|e| e.to_string())
}

pub fn encode_png(img: &PixelBuffer) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().expect("in-memory PNG header");
        writer
            .write_image_data(img.as_bytes())
            .expect("in-memory PNG data");
    }
    out
}

/// Nearest-neighbour resample to `size` by `size`.
pub fn resize(img: &PixelBuffer, size: usize) -> PixelBuffer {
    if img.width() == size && img.height() == size {
        return img.clone();
    }
    PixelBuffer::from_fn(size, size, |p| img.sample(&p, Sampling::Nearest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fractx_core::write_ppm;

    #[test]
    fn png_round_trip() {
        let img = PixelBuffer::from_fn(5, 3, |p| [(p[0] * 200.0) as u8, (p[1] * 90.0) as u8, 7]);
        let bytes = encode_png(&img);
        assert_eq!(dimensions(&bytes), Some((5, 3)));
        assert_eq!(decode(&bytes).unwrap(), img);
    }

    #[test]
    fn ppm_header_dimensions() {
        let img = PixelBuffer::new(12, 7);
        assert_eq!(dimensions(&write_ppm(&img)), Some((12, 7)));
        assert_eq!(dimensions(b"P6\n# note\n4 5\n255\n"), Some((4, 5)));
        assert!(decode(b"GIF89a").is_err());
    }
}
