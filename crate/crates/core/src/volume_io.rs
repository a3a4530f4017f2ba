//! File formats: the `SPVOL1` volume container, `key=value` sidecars and PGM export.
//!
//! `SPVOL1` layout: the 6 ASCII bytes `SPVOL1`, then X, Y, Z as little-endian
//! `u32`, then `X·Y·Z` little-endian `f32` voxels, x fastest, then y, then z.
//! Sinogram stacks use the same container with X = detector offsets,
//! Y = angles and Z = slices.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::tomo::{equispaced_angles, Sinogram, Volume};

pub const MAGIC: &[u8; 6] = b"SPVOL1";
pub const HEADER_LEN: usize = 6 + 3 * 4;

pub fn encode_volume(volume: &Volume) -> Vec<u8> {
    let (x, y, z) = volume.dims();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * volume.voxels().len());
    out.extend_from_slice(MAGIC);
    for d in [x, y, z] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in volume.voxels() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_volume(bytes: &[u8]) -> Result<Volume> {
    if bytes.len() < MAGIC.len() {
        return Err(format_error(
            bytes.len(),
            "file ends inside the magic bytes",
        ));
    }
    if let Some(i) = bytes[..MAGIC.len()]
        .iter()
        .zip(MAGIC)
        .position(|(a, b)| a != b)
    {
        return Err(format_error(i, "bad magic, expected SPVOL1"));
    }
    if bytes.len() < HEADER_LEN {
        return Err(format_error(
            bytes.len(),
            "file ends inside the dimension header",
        ));
    }
    let mut dims = [0usize; 3];
    for (k, d) in dims.iter_mut().enumerate() {
        let at = MAGIC.len() + 4 * k;
        *d = u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize;
        if *d == 0 {
            return Err(format_error(at, "dimension is zero"));
        }
    }
    let count = dims[0]
        .checked_mul(dims[1])
        .and_then(|n| n.checked_mul(dims[2]))
        .ok_or_else(|| format_error(MAGIC.len(), "dimensions overflow"))?;
    let payload = &bytes[HEADER_LEN..];
    let expected = count
        .checked_mul(4)
        .ok_or_else(|| format_error(MAGIC.len(), "dimensions overflow"))?;
    if payload.len() != expected {
        let at = HEADER_LEN + payload.len().min(expected);
        return Err(format_error(
            at,
            format!(
                "payload has {} bytes, header declares {expected}",
                payload.len()
            ),
        ));
    }
    let mut voxels = Vec::with_capacity(count);
    for (i, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("4 bytes"));
        if !v.is_finite() {
            return Err(format_error(HEADER_LEN + 4 * i, "non-finite voxel"));
        }
        voxels.push(v);
    }
    Volume::new((dims[0], dims[1], dims[2]), voxels)
}

fn format_error(offset: usize, detail: impl Into<String>) -> Error {
    Error::Format {
        offset: offset as u64,
        detail: detail.into(),
    }
}

pub fn write_volume(path: &Path, volume: &Volume) -> Result<()> {
    fs::write(path, encode_volume(volume))?;
    Ok(())
}

pub fn read_volume(path: &Path) -> Result<Volume> {
    decode_volume(&fs::read(path)?)
}

/// Packs a stack of equal-geometry sinograms into a volume (offsets × angles × slices).
pub fn sinograms_to_volume(sinos: &[Sinogram]) -> Result<Volume> {
    let first = sinos
        .first()
        .ok_or_else(|| Error::input("no sinograms to store"))?;
    if sinos.iter().any(|s| !s.same_geometry(first)) {
        return Err(Error::input("sinograms in one file must share a geometry"));
    }
    let voxels = sinos
        .iter()
        .flat_map(|s| s.data().iter().map(|&v| v as f32))
        .collect();
    Volume::new(
        (first.num_offsets(), first.num_angles(), sinos.len()),
        voxels,
    )
}

/// Inverse of [`sinograms_to_volume`] for equispaced angles on `[0, π)` and
/// integer offsets centred on 0.
pub fn volume_to_sinograms(volume: &Volume) -> Result<Vec<Sinogram>> {
    let (x, y, z) = volume.dims();
    if x % 2 == 0 {
        return Err(Error::input(format!(
            "sinogram files need an odd detector count, got {x}"
        )));
    }
    let half = (x / 2) as f64;
    let offsets: Vec<f64> = (0..x).map(|k| k as f64 - half).collect();
    let angles = equispaced_angles(y);
    (0..z)
        .map(|k| {
            let data = volume.slice_f32(k).iter().map(|&v| v as f64).collect();
            Sinogram::new(angles.clone(), offsets.clone(), data)
        })
        .collect()
}

/// Sidecar path: the data file name with `.meta` appended.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

/// Writes `key=value` lines in the given order.
pub fn write_meta(path: &Path, entries: &[(&str, String)]) -> Result<()> {
    let mut text = String::new();
    for (k, v) in entries {
        text.push_str(k);
        text.push('=');
        text.push_str(v);
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

/// Parses `key=value` lines. Blank lines and lines starting with `#` are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            let (k, v) = trimmed.split_once('=').ok_or_else(|| {
                format_error(offset, format!("expected key=value, got '{trimmed}'"))
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(format_error(offset, "empty key"));
            }
            out.push((k.to_string(), v.trim().to_string()));
        }
        offset += line.len();
    }
    Ok(out)
}

pub fn read_meta(path: &Path) -> Result<Vec<(String, String)>> {
    parse_key_values(&fs::read_to_string(path)?)
}

/// Binary PGM (P5, maxval 255), min-max scaled; a constant image maps to 0.
pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let scaled = image.rescaled(255.0);
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(scaled.as_slice().iter().map(|&v| v.round() as u8));
    out
}
