//! TIFF adapter: multiband decode (u8/u16/f32), float32 multiband encode.

use std::io::Cursor;

use tiff::decoder::{Decoder, DecodingResult};
use tiff::encoder::colortype::{self, ColorType as EncColorType};
use tiff::encoder::TiffEncoder;
use tiff::tags::{PhotometricInterpretation, SampleFormat};
use tiff::ColorType;

use crate::error::{Error, Result};
use crate::raster::Raster;

fn bad(e: impl std::fmt::Display) -> Error {
    Error::Format(format!("bad tiff: {e}"))
}

fn sample_count(color: ColorType) -> Result<usize> {
    Ok(match color {
        ColorType::Gray(_) => 1,
        ColorType::GrayA(_) => 2,
        ColorType::RGB(_) => 3,
        ColorType::RGBA(_) | ColorType::CMYK(_) => 4,
        ColorType::Multiband { num_samples, .. } => num_samples as usize,
        other => {
            return Err(Error::Format(format!(
                "unsupported tiff color type {other:?}"
            )))
        }
    })
}

/// Decodes the first image of a TIFF; samples are pixel-interleaved on disk
/// and re-laid out band-sequentially.
pub fn decode_raster(bytes: &[u8]) -> Result<Raster> {
    let mut decoder = Decoder::new(Cursor::new(bytes)).map_err(bad)?;
    let (w, h) = decoder.dimensions().map_err(bad)?;
    let (width, height) = (w as usize, h as usize);
    let bands = sample_count(decoder.colortype().map_err(bad)?)?;
    let pixels = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(bands))
        .ok_or_else(|| Error::Format("tiff dimensions overflow".into()))?;

    let interleaved: Vec<f32> = match decoder.read_image().map_err(bad)? {
        DecodingResult::U8(v) => v.into_iter().map(|x| x as f32).collect(),
        DecodingResult::U16(v) => v.into_iter().map(|x| x as f32).collect(),
        DecodingResult::F32(v) => v,
        other => {
            return Err(Error::Format(format!(
                "unsupported tiff sample type {:?}; expected u8, u16 or f32",
                std::mem::discriminant(&other)
            )))
        }
    };
    if interleaved.len() != pixels {
        return Err(Error::Format(format!(
            "tiff payload has {} samples, header declares {}",
            interleaved.len(),
            pixels
        )));
    }
    let n = width * height;
    let mut data = vec![0.0f32; pixels];
    for (i, px) in interleaved.chunks_exact(bands).enumerate() {
        for (c, &v) in px.iter().enumerate() {
            data[c * n + i] = v;
        }
    }
    Raster::new(width, height, bands, data)
}

macro_rules! multiband_f32 {
    ($name:ident, $n:literal) => {
        struct $name;
        impl EncColorType for $name {
            type Inner = f32;
            const TIFF_VALUE: PhotometricInterpretation = PhotometricInterpretation::BlackIsZero;
            const BITS_PER_SAMPLE: &'static [u16] = &[32; $n];
            const SAMPLE_FORMAT: &'static [SampleFormat] = &[SampleFormat::IEEEFP; $n];
            fn horizontal_predict(_: &[f32], _: &mut Vec<f32>) {
                unreachable!("predictor is not used for float samples")
            }
        }
    };
}

multiband_f32!(Bands2F32, 2);
multiband_f32!(Bands4F32, 4);
multiband_f32!(Bands5F32, 5);
multiband_f32!(Bands6F32, 6);
multiband_f32!(Bands7F32, 7);
multiband_f32!(Bands8F32, 8);

/// Encodes a raster as an uncompressed float32 TIFF (up to 8 bands).
pub fn encode_raster(raster: &Raster) -> Result<Vec<u8>> {
    let n = raster.pixel_count();
    let bands = raster.bands();
    let mut interleaved = Vec::with_capacity(n * bands);
    for i in 0..n {
        for c in 0..bands {
            interleaved.push(raster.data()[c * n + i]);
        }
    }
    let mut cursor = Cursor::new(Vec::new());
    {
        let mut encoder = TiffEncoder::new(&mut cursor).map_err(bad)?;
        let w = raster.width() as u32;
        let h = raster.height() as u32;
        let data = &interleaved;
        match bands {
            1 => encoder.write_image::<colortype::Gray32Float>(w, h, data),
            2 => encoder.write_image::<Bands2F32>(w, h, data),
            3 => encoder.write_image::<colortype::RGB32Float>(w, h, data),
            4 => encoder.write_image::<Bands4F32>(w, h, data),
            5 => encoder.write_image::<Bands5F32>(w, h, data),
            6 => encoder.write_image::<Bands6F32>(w, h, data),
            7 => encoder.write_image::<Bands7F32>(w, h, data),
            8 => encoder.write_image::<Bands8F32>(w, h, data),
            more => {
                return Err(Error::Format(format!(
                    "tiff encoder supports up to 8 bands, raster has {more}; use the raw format"
                )))
            }
        }
        .map_err(bad)?;
    }
    Ok(cursor.into_inner())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f32_multiband_round_trip() {
        for bands in [1usize, 2, 3, 5, 8] {
            let data: Vec<f32> = (0..6 * bands).map(|v| v as f32 * 0.25).collect();
            let r = Raster::new(3, 2, bands, data).unwrap();
            let bytes = encode_raster(&r).unwrap();
            let back = decode_raster(&bytes).unwrap();
            assert_eq!(back.data(), r.data(), "bands = {bands}");
            assert_eq!(back.bands(), bands);
        }
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(decode_raster(b"not a tiff").is_err());
        assert!(decode_raster(b"II*\0").is_err());
    }
}
