//! Canonical raw float32 format: `<name>.raw` + `<name>.json` sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::Raster;

/// JSON sidecar describing a raw payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub width: usize,
    pub height: usize,
    pub bands: usize,
    pub dtype: String,
    pub order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodata: Option<f32>,
}

impl Sidecar {
    pub fn for_raster(r: &Raster) -> Sidecar {
        Sidecar {
            width: r.width(),
            height: r.height(),
            bands: r.bands(),
            dtype: "float32".into(),
            order: "band-sequential-row-major".into(),
            nodata: r.nodata(),
        }
    }
}

/// Parses and validates sidecar JSON.
pub fn parse_sidecar(bytes: &[u8]) -> Result<Sidecar> {
    let sidecar: Sidecar =
        serde_json::from_slice(bytes).map_err(|e| Error::Format(format!("bad sidecar: {e}")))?;
    if sidecar.dtype != "float32" {
        return Err(Error::Format(format!(
            "unsupported dtype {:?}, expected \"float32\"",
            sidecar.dtype
        )));
    }
    if sidecar.order != "band-sequential-row-major" {
        return Err(Error::Format(format!(
            "unsupported order {:?}, expected \"band-sequential-row-major\"",
            sidecar.order
        )));
    }
    if sidecar.width < 1 || sidecar.height < 1 || sidecar.bands < 1 {
        return Err(Error::Format(format!(
            "sidecar dimensions must be >= 1, got {}x{}x{}",
            sidecar.width, sidecar.height, sidecar.bands
        )));
    }
    Ok(sidecar)
}

/// Assembles a raster from a parsed sidecar and the raw little-endian payload.
pub fn raster_from_raw_parts(sidecar: &Sidecar, payload: &[u8]) -> Result<Raster> {
    let count = sidecar
        .width
        .checked_mul(sidecar.height)
        .and_then(|n| n.checked_mul(sidecar.bands))
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::Format("sidecar dimensions overflow".into()))?;
    if payload.len() != count {
        return Err(Error::Format(format!(
            "payload is {} bytes, sidecar declares {}x{}x{} float32 = {} bytes",
            payload.len(),
            sidecar.width,
            sidecar.height,
            sidecar.bands,
            count
        )));
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Raster::with_nodata(
        sidecar.width,
        sidecar.height,
        sidecar.bands,
        data,
        sidecar.nodata,
    )
}

fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn load(path: &Path) -> Result<Raster> {
    let sidecar_bytes = fs::read(sidecar_path(path))?;
    let sidecar = parse_sidecar(&sidecar_bytes)?;
    let payload = fs::read(path)?;
    raster_from_raw_parts(&sidecar, &payload)
}

pub fn save(raster: &Raster, path: &Path) -> Result<()> {
    let sidecar = Sidecar::for_raster(raster);
    let mut json = serde_json::to_string(&sidecar).expect("sidecar serializes");
    json.push('\n');
    fs::write(sidecar_path(path), json)?;
    let mut payload = Vec::with_capacity(raster.data().len() * 4);
    for v in raster.data() {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, payload)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_round_trip_2x2() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.raw");
        let r = Raster::new(2, 2, 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        save(&r, &path).unwrap();
        let back = load(&path).unwrap();
        assert_eq!(back.data(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!((back.width(), back.height(), back.bands()), (2, 2, 1));
    }

    #[test]
    fn payload_length_mismatch_is_an_error() {
        let sidecar = parse_sidecar(
            br#"{"width":2,"height":2,"bands":1,"dtype":"float32","order":"band-sequential-row-major"}"#,
        )
        .unwrap();
        let payload: Vec<u8> = [1.0f32, 2.0, 3.0]
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        assert!(matches!(
            raster_from_raw_parts(&sidecar, &payload),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn sidecar_rejects_wrong_dtype_and_extra_fields() {
        assert!(parse_sidecar(
            br#"{"width":1,"height":1,"bands":1,"dtype":"float64","order":"band-sequential-row-major"}"#
        )
        .is_err());
        assert!(parse_sidecar(
            br#"{"width":1,"height":1,"bands":1,"dtype":"float32","order":"band-sequential-row-major","extra":1}"#
        )
        .is_err());
    }

    #[test]
    fn sidecar_serializes_exact_field_set() {
        let r = Raster::new(1, 1, 1, vec![0.5]).unwrap();
        let json = serde_json::to_string(&Sidecar::for_raster(&r)).unwrap();
        assert_eq!(
            json,
            r#"{"width":1,"height":1,"bands":1,"dtype":"float32","order":"band-sequential-row-major"}"#
        );
    }
}
