//! PNG adapter: 8-bit masks, 16-bit confidence maps, 8/16-bit gray/RGB rasters.

use std::io::Cursor;

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, Raster};

fn decode_gray(bytes: &[u8]) -> Result<(usize, usize, usize, u8, Vec<u8>)> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::Format(format!("bad png: {e}")))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Format("png too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Format(format!("bad png: {e}")))?;
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => {
            return Err(Error::Format(format!(
                "unsupported png color type {other:?}; expected grayscale or rgb"
            )))
        }
    };
    let depth = match info.bit_depth {
        png::BitDepth::Eight => 8,
        png::BitDepth::Sixteen => 16,
        other => {
            return Err(Error::Format(format!(
                "unsupported png bit depth {other:?}; expected 8 or 16"
            )))
        }
    };
    buf.truncate(info.buffer_size());
    Ok((
        info.width as usize,
        info.height as usize,
        channels,
        depth,
        buf,
    ))
}

/// Decodes a gray/RGB PNG into a raster; integer samples are widened to f32
/// without rescaling.
pub fn decode_raster(bytes: &[u8]) -> Result<Raster> {
    let (width, height, channels, depth, buf) = decode_gray(bytes)?;
    let n = width * height;
    let mut data = vec![0.0f32; n * channels];
    match depth {
        8 => {
            for (i, px) in buf.chunks_exact(channels).enumerate() {
                for (c, &v) in px.iter().enumerate() {
                    data[c * n + i] = v as f32;
                }
            }
        }
        16 => {
            // PNG stores 16-bit samples big-endian.
            for (i, px) in buf.chunks_exact(2 * channels).enumerate() {
                for c in 0..channels {
                    let v = u16::from_be_bytes([px[2 * c], px[2 * c + 1]]);
                    data[c * n + i] = v as f32;
                }
            }
        }
        _ => unreachable!(),
    }
    Raster::new(width, height, channels, data)
}

/// Encodes a raster whose samples are integers in [0, 65535]: 8-bit if the
/// maximum fits in a byte, 16-bit otherwise. 1 or 3 bands only.
pub fn encode_raster(raster: &Raster) -> Result<Vec<u8>> {
    let channels = raster.bands();
    if channels != 1 && channels != 3 {
        return Err(Error::Format(format!(
            "png supports 1 or 3 bands, raster has {channels}"
        )));
    }
    let mut max = 0.0f32;
    for &v in raster.data() {
        if v < 0.0 || v > 65535.0 || v.fract() != 0.0 {
            return Err(Error::Format(format!(
                "png requires integer samples in [0, 65535], found {v}"
            )));
        }
        max = max.max(v);
    }
    let n = raster.pixel_count();
    let color = if channels == 1 {
        png::ColorType::Grayscale
    } else {
        png::ColorType::Rgb
    };
    if max <= 255.0 {
        let mut interleaved = Vec::with_capacity(n * channels);
        for i in 0..n {
            for c in 0..channels {
                interleaved.push(raster.data()[c * n + i] as u8);
            }
        }
        encode(raster.width(), raster.height(), color, png::BitDepth::Eight, &interleaved)
    } else {
        let mut interleaved = Vec::with_capacity(n * channels * 2);
        for i in 0..n {
            for c in 0..channels {
                interleaved.extend_from_slice(&(raster.data()[c * n + i] as u16).to_be_bytes());
            }
        }
        encode(raster.width(), raster.height(), color, png::BitDepth::Sixteen, &interleaved)
    }
}

pub fn encode_mask(mask: &BinaryMask) -> Result<Vec<u8>> {
    let bytes: Vec<u8> = mask.data().iter().map(|&v| v * 255).collect();
    encode(
        mask.width(),
        mask.height(),
        png::ColorType::Grayscale,
        png::BitDepth::Eight,
        &bytes,
    )
}

/// Strict mask decode: 8-bit grayscale, values exactly {0, 255}.
pub fn decode_mask(bytes: &[u8]) -> Result<BinaryMask> {
    let (width, height, channels, depth, buf) = decode_gray(bytes)?;
    if channels != 1 || depth != 8 {
        return Err(Error::Format(
            "mask png must be 8-bit grayscale".into(),
        ));
    }
    let mut data = Vec::with_capacity(buf.len());
    for &v in &buf {
        match v {
            0 => data.push(0),
            255 => data.push(1),
            other => {
                return Err(Error::Format(format!(
                    "mask png must hold only 0 and 255, found {other}"
                )))
            }
        }
    }
    BinaryMask::from_vec(width, height, data)
}

/// 16-bit confidence encode: u16 = floor(c * 65535 + 0.5) (round half up).
pub fn encode_unit_plane_png16(width: usize, height: usize, values: &[f64]) -> Result<Vec<u8>> {
    assert_eq!(values.len(), width * height);
    let mut bytes = Vec::with_capacity(values.len() * 2);
    for &c in values {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::Format(format!(
                "confidence value {c} outside [0, 1]"
            )));
        }
        let q = (c * 65535.0 + 0.5).floor() as u16;
        bytes.extend_from_slice(&q.to_be_bytes());
    }
    encode(
        width,
        height,
        png::ColorType::Grayscale,
        png::BitDepth::Sixteen,
        &bytes,
    )
}

/// 16-bit confidence decode: c = v / 65535.
pub fn decode_unit_plane_png16(bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    let (width, height, channels, depth, buf) = decode_gray(bytes)?;
    if channels != 1 || depth != 16 {
        return Err(Error::Format(
            "confidence png must be 16-bit grayscale".into(),
        ));
    }
    let values = buf
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / 65535.0)
        .collect();
    Ok((width, height, values))
}

fn encode(
    width: usize,
    height: usize,
    color: png::ColorType,
    depth: png::BitDepth,
    data: &[u8],
) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let w = u32::try_from(width).map_err(|_| Error::Format("png width overflow".into()))?;
        let h = u32::try_from(height).map_err(|_| Error::Format("png height overflow".into()))?;
        let mut encoder = png::Encoder::new(&mut out, w, h);
        encoder.set_color(color);
        encoder.set_depth(depth);
        let mut writer = encoder
            .write_header()
            .map_err(|e| Error::Format(format!("png encode: {e}")))?;
        writer
            .write_image_data(data)
            .map_err(|e| Error::Format(format!("png encode: {e}")))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_round_trip_and_values() {
        let mask = BinaryMask::from_fn(3, 2, |x, y| (x + y) % 2 == 0);
        let bytes = encode_mask(&mask).unwrap();
        let back = decode_mask(&bytes).unwrap();
        assert_eq!(back, mask);
    }

    #[test]
    fn all_zero_mask_encodes_to_zero_pixels() {
        let mask = BinaryMask::zeros(4, 4);
        let bytes = encode_mask(&mask).unwrap();
        let r = decode_raster(&bytes).unwrap();
        assert!(r.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn confidence_half_rounds_up() {
        let bytes = encode_unit_plane_png16(1, 1, &[0.5]).unwrap();
        let (_, _, vals) = decode_unit_plane_png16(&bytes).unwrap();
        assert_eq!((vals[0] * 65535.0).round() as u32, 32768);
    }

    #[test]
    fn mask_decode_rejects_intermediate_values() {
        // craft an 8-bit gray png with a 128 value
        let bytes = encode(1, 1, png::ColorType::Grayscale, png::BitDepth::Eight, &[128]).unwrap();
        assert!(decode_mask(&bytes).is_err());
    }

    #[test]
    fn raster_png_rejects_fractional_values() {
        let r = Raster::new(1, 1, 1, vec![0.5]).unwrap();
        assert!(encode_raster(&r).is_err());
    }

    #[test]
    fn sixteen_bit_raster_round_trip() {
        let r = Raster::new(2, 1, 1, vec![300.0, 65535.0]).unwrap();
        let bytes = encode_raster(&r).unwrap();
        let back = decode_raster(&bytes).unwrap();
        assert_eq!(back.data(), r.data());
    }
}
