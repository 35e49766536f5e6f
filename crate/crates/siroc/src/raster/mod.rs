//! Raster, mask, and confidence-map carriers plus portable file formats.
//!
//! The canonical interchange format is raw little-endian float32,
//! band-sequential row-major, with a JSON sidecar
//! `{"width","height","bands","dtype":"float32","order":"band-sequential-row-major"}`.
//! PNG (8-bit masks, 16-bit confidence, 8/16-bit gray/RGB rasters) and
//! multiband float32 TIFF are adapters around it.
//!
//! No resampling, radiometric calibration, or co-registration is performed;
//! mismatched dimensions are a hard error. Pixels equal to a declared nodata
//! sentinel are rejected at load time rather than masked.

mod png_io;
mod raw;
mod tiff_io;

pub use raw::{parse_sidecar, raster_from_raw_parts, Sidecar};

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::plane::Plane;

/// An H×W×C grid of real-valued samples, band-sequential row-major:
/// `data[band * width * height + y * width + x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    width: usize,
    height: usize,
    bands: usize,
    data: Vec<f32>,
    nodata: Option<f32>,
}

impl Raster {
    /// Validates dimensions, buffer length, and finiteness.
    pub fn new(width: usize, height: usize, bands: usize, data: Vec<f32>) -> Result<Self> {
        Raster::with_nodata(width, height, bands, data, None)
    }

    /// Like [`Raster::new`] but with a declared nodata sentinel. Pixels equal
    /// to the sentinel are rejected: the pipeline has no masking semantics.
    pub fn with_nodata(
        width: usize,
        height: usize,
        bands: usize,
        data: Vec<f32>,
        nodata: Option<f32>,
    ) -> Result<Self> {
        if width < 1 || height < 1 || bands < 1 {
            return Err(Error::InvalidInput(format!(
                "raster dimensions must be >= 1, got {width}x{height}x{bands}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(bands))
            .ok_or_else(|| Error::InvalidInput("raster dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(Error::InvalidInput(format!(
                "raster buffer has {} values, expected {width}x{height}x{bands} = {expected}",
                data.len()
            )));
        }
        for &v in &data {
            if let Some(nd) = nodata {
                if v == nd || (v.is_nan() && nd.is_nan()) {
                    return Err(Error::InvalidInput(
                        "raster contains nodata pixels; masking is not supported".into(),
                    ));
                }
            }
            if !v.is_finite() {
                return Err(Error::InvalidInput(
                    "raster contains non-finite values without a matching nodata declaration"
                        .into(),
                ));
            }
        }
        Ok(Raster {
            width,
            height,
            bands,
            data,
            nodata,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn nodata(&self) -> Option<f32> {
        self.nodata
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, band: usize) -> f32 {
        debug_assert!(x < self.width && y < self.height && band < self.bands);
        self.data[band * self.width * self.height + y * self.width + x]
    }

    /// Row-major slice of one band.
    pub fn band(&self, band: usize) -> &[f32] {
        assert!(band < self.bands, "band index out of range");
        let n = self.width * self.height;
        &self.data[band * n..(band + 1) * n]
    }

    /// One band widened to f64 for computation.
    pub fn band_plane(&self, band: usize) -> Plane {
        let data = self.band(band).iter().map(|&v| v as f64).collect();
        Plane::from_vec(self.width, self.height, data)
    }

    /// Projects the raster onto the given bands, copied in the given order.
    pub fn select_bands(&self, indices: &[usize]) -> Result<Raster> {
        if indices.is_empty() {
            return Err(Error::InvalidParam("band selection is empty".into()));
        }
        for (i, &b) in indices.iter().enumerate() {
            if b >= self.bands {
                return Err(Error::InvalidParam(format!(
                    "band index {b} out of range for {}-band raster",
                    self.bands
                )));
            }
            if indices[..i].contains(&b) {
                return Err(Error::InvalidParam(format!("duplicate band index {b}")));
            }
        }
        let n = self.width * self.height;
        let mut data = Vec::with_capacity(n * indices.len());
        for &b in indices {
            data.extend_from_slice(self.band(b));
        }
        Ok(Raster {
            width: self.width,
            height: self.height,
            bands: indices.len(),
            data,
            nodata: self.nodata,
        })
    }
}

/// A co-registered bitemporal pair. Dimensions and band counts must agree;
/// registration itself is assumed, not performed.
#[derive(Debug, Clone)]
pub struct ImagePair {
    pub pre: Raster,
    pub post: Raster,
}

impl ImagePair {
    pub fn new(pre: Raster, post: Raster) -> Result<Self> {
        if pre.width != post.width || pre.height != post.height || pre.bands != post.bands {
            return Err(Error::Shape(format!(
                "pre is {}x{}x{}, post is {}x{}x{}",
                pre.width, pre.height, pre.bands, post.width, post.height, post.bands
            )));
        }
        Ok(ImagePair { pre, post })
    }

    pub fn width(&self) -> usize {
        self.pre.width
    }

    pub fn height(&self) -> usize {
        self.pre.height
    }

    pub fn bands(&self) -> usize {
        self.pre.bands
    }
}

/// Per-pixel change segmentation: 0 = no-change, 1 = change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl BinaryMask {
    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "mask dimensions must be >= 1");
        BinaryMask {
            width,
            height,
            data: vec![0; width * height],
        }
    }

    /// Wraps a row-major {0,1} buffer.
    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width < 1 || height < 1 {
            return Err(Error::InvalidInput("mask dimensions must be >= 1".into()));
        }
        if data.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "mask buffer has {} values, expected {}",
                data.len(),
                width * height
            )));
        }
        if data.iter().any(|&v| v > 1) {
            return Err(Error::InvalidInput("mask values must be 0 or 1".into()));
        }
        Ok(BinaryMask {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y) as u8);
            }
        }
        BinaryMask {
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
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        debug_assert!(x < self.width && y < self.height && v <= 1);
        self.data[y * self.width + x] = v;
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    pub fn same_shape(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// On-disk raster representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterFormat {
    /// `<name>.raw` little-endian float32 payload + `<name>.json` sidecar.
    RawF32,
    /// 8/16-bit grayscale or RGB PNG; integer samples widened without rescaling.
    Png,
    /// Multiband TIFF; u8/u16 widened, f32 taken as-is.
    Tiff,
}

impl RasterFormat {
    /// Infers the format from a file extension.
    pub fn from_path(path: &Path) -> Result<RasterFormat> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("raw") => Ok(RasterFormat::RawF32),
            Some("png") => Ok(RasterFormat::Png),
            Some("tif") | Some("tiff") => Ok(RasterFormat::Tiff),
            other => Err(Error::Format(format!(
                "cannot infer raster format from extension {other:?}"
            ))),
        }
    }
}

/// Loads a raster from disk under the declared format.
pub fn load_raster(path: &Path, format: RasterFormat) -> Result<Raster> {
    match format {
        RasterFormat::RawF32 => raw::load(path),
        RasterFormat::Png => {
            let bytes = fs::read(path)?;
            png_io::decode_raster(&bytes)
        }
        RasterFormat::Tiff => {
            let bytes = fs::read(path)?;
            tiff_io::decode_raster(&bytes)
        }
    }
}

/// Persists a raster. Raw float32 round-trips bitwise; PNG requires integer
/// samples in range (8-bit if max <= 255, else 16-bit) and 1 or 3 bands.
pub fn save_raster(raster: &Raster, path: &Path, format: RasterFormat) -> Result<()> {
    match format {
        RasterFormat::RawF32 => raw::save(raster, path),
        RasterFormat::Png => {
            let bytes = png_io::encode_raster(raster)?;
            fs::write(path, bytes)?;
            Ok(())
        }
        RasterFormat::Tiff => {
            let bytes = tiff_io::encode_raster(raster)?;
            fs::write(path, bytes)?;
            Ok(())
        }
    }
}

/// Loads a raster, inferring the format from the extension.
pub fn load_raster_auto(path: &Path) -> Result<Raster> {
    load_raster(path, RasterFormat::from_path(path)?)
}

/// Writes a mask as an 8-bit grayscale PNG with values {0, 255}.
pub fn save_mask_png(mask: &BinaryMask, path: &Path) -> Result<()> {
    fs::write(path, png_io::encode_mask(mask)?)?;
    Ok(())
}

/// Reads an 8-bit grayscale PNG holding strictly {0, 255} values.
pub fn load_mask_png(path: &Path) -> Result<BinaryMask> {
    let bytes = fs::read(path)?;
    png_io::decode_mask(&bytes)
}

pub use png_io::{decode_mask as decode_png_mask, decode_raster as decode_png_raster};
pub use tiff_io::decode_raster as decode_tiff_raster;

#[cfg(test)]
mod tests {
    use super::*;

    fn small(bands: usize) -> Raster {
        let n = 4 * bands;
        Raster::new(2, 2, bands, (0..n).map(|v| v as f32).collect()).unwrap()
    }

    #[test]
    fn new_rejects_length_mismatch() {
        let err = Raster::new(2, 2, 1, vec![1.0, 2.0, 3.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn new_rejects_non_finite() {
        assert!(Raster::new(2, 1, 1, vec![1.0, f32::NAN]).is_err());
        assert!(Raster::new(2, 1, 1, vec![1.0, f32::INFINITY]).is_err());
    }

    #[test]
    fn nodata_pixels_are_rejected() {
        let err = Raster::with_nodata(2, 1, 1, vec![1.0, -9999.0], Some(-9999.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
        // sentinel declared but absent is fine
        assert!(Raster::with_nodata(2, 1, 1, vec![1.0, 2.0], Some(-9999.0)).is_ok());
    }

    #[test]
    fn select_bands_drops_and_reorders() {
        let r = small(4);
        let rgb = r.select_bands(&[0, 1, 2]).unwrap();
        assert_eq!(rgb.bands(), 3);
        assert_eq!(rgb.band(0), r.band(0));
        assert_eq!(rgb.band(2), r.band(2));

        let last = r.select_bands(&[3]).unwrap();
        assert_eq!(last.bands(), 1);
        assert_eq!(last.band(0), r.band(3));
    }

    #[test]
    fn select_bands_rejects_bad_indices() {
        let r = small(4);
        assert!(r.select_bands(&[4]).is_err());
        assert!(r.select_bands(&[1, 1]).is_err());
        assert!(r.select_bands(&[]).is_err());
    }

    #[test]
    fn select_bands_is_a_projection() {
        let r = small(4);
        let a = r.select_bands(&[2, 3]).unwrap().select_bands(&[0]).unwrap();
        let b = r.select_bands(&[2]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pair_requires_matching_shape() {
        let a = small(2);
        let b = small(3);
        assert!(ImagePair::new(a.clone(), a.clone()).is_ok());
        assert!(ImagePair::new(a, b).is_err());
    }

    #[test]
    fn mask_values_validated() {
        assert!(BinaryMask::from_vec(2, 1, vec![0, 1]).is_ok());
        assert!(BinaryMask::from_vec(2, 1, vec![0, 2]).is_err());
    }
}
