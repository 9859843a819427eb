use crate::error::{Error, Result};
use crate::raster::PixelBuffer;

fn err(message: impl Into<String>) -> Error {
    Error::format("PPM", message)
}

/// Reads a binary (P6) PPM with maxval 255. Header comments are allowed;
/// anything after the pixel data is rejected.
pub fn read_ppm(bytes: &[u8]) -> Result<PixelBuffer> {
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        let magic = String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned();
        return Err(err(format!("expected magic P6, found {magic:?}")));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for (k, name) in ["width", "height", "maxval"].iter().enumerate() {
        // Whitespace and comments before each field.
        let start_ws = pos;
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        if pos == start_ws {
            return Err(err(format!("missing separator before {name}")));
        }
        let digits = bytes[pos..].iter().take_while(|b| b.is_ascii_digit()).count();
        if digits == 0 {
            return Err(err(format!("missing {name}")));
        }
        let text = std::str::from_utf8(&bytes[pos..pos + digits]).expect("ascii digits");
        fields[k] = text.parse().map_err(|_| err(format!("{name} {text} too large")))?;
        pos += digits;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(err(format!("maxval must be 255, got {maxval}")));
    }
    if !bytes.get(pos).is_some_and(|b| b.is_ascii_whitespace()) {
        return Err(err("missing whitespace after maxval"));
    }
    pos += 1;
    let want = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| err("dimensions overflow"))?;
    let payload = &bytes[pos..];
    if payload.len() < want {
        return Err(err(format!(
            "truncated payload: {width}x{height} needs {want} bytes, got {}",
            payload.len()
        )));
    }
    if payload.len() > want {
        return Err(err(format!("{} trailing bytes after pixel data", payload.len() - want)));
    }
    PixelBuffer::from_raw(width, height, payload.to_vec())
}

pub fn write_ppm(img: &PixelBuffer) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.as_bytes());
    out
}
