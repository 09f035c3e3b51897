//! `LBL1` label raster files.
//!
//! Layout: magic `LBL1`, then `width`, `height`, `class_count` as u32 LE,
//! then `width * height` u16 LE class ids in row-major order. `0xFFFF` is
//! the ignore value. Binary masks are stored with `class_count = 2`.
//!
//! `FLD1` confidence files share the header layout (the third word is
//! reserved, written as 0) followed by f32 LE values in `[0, 1]`.

use std::fs;
use std::path::Path;

use super::{BinaryMask, LabelMap, RasterError, Result, ScalarField};

pub const LABEL_MAGIC: [u8; 4] = *b"LBL1";
pub const FIELD_MAGIC: [u8; 4] = *b"FLD1";
const HEADER_LEN: usize = 16;

fn header(magic: [u8; 4], width: usize, height: usize, third: u32) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(&magic);
    out.extend_from_slice(&(width as u32).to_le_bytes());
    out.extend_from_slice(&(height as u32).to_le_bytes());
    out.extend_from_slice(&third.to_le_bytes());
    out
}

fn parse_header(bytes: &[u8], magic: [u8; 4]) -> Result<(usize, usize, u32)> {
    if bytes.len() < HEADER_LEN {
        return Err(RasterError::Truncated);
    }
    let found: [u8; 4] = bytes[0..4].try_into().unwrap();
    if found != magic {
        return Err(RasterError::BadMagic(found));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    Ok((word(4) as usize, word(8) as usize, word(12)))
}

pub fn encode_label_map(map: &LabelMap) -> Vec<u8> {
    let mut out = header(LABEL_MAGIC, map.width(), map.height(), map.class_count());
    out.reserve(map.len() * 2);
    for &v in map.labels() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_label_map(bytes: &[u8]) -> Result<LabelMap> {
    let (width, height, class_count) = parse_header(bytes, LABEL_MAGIC)?;
    let n = width
        .checked_mul(height)
        .ok_or(RasterError::InvalidDimensions(width, height))?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != n * 2 {
        return Err(RasterError::Truncated);
    }
    let labels = payload
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes([c[0], c[1]]))
        .collect();
    LabelMap::from_raw(width, height, class_count, labels)
}

pub fn mask_to_label_map(mask: &BinaryMask) -> LabelMap {
    let labels = mask.bits().iter().map(|&b| b as u16).collect();
    LabelMap::from_raw(mask.width(), mask.height(), 2, labels).expect("valid mask dims")
}

/// Class 1 is foreground; class 0 and ignore are background.
pub fn label_map_to_mask(map: &LabelMap) -> BinaryMask {
    map.class_mask(1)
}

pub fn encode_field(field: &ScalarField) -> Vec<u8> {
    let mut out = header(FIELD_MAGIC, field.width(), field.height(), 0);
    for &v in field.values() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn decode_field(bytes: &[u8]) -> Result<ScalarField> {
    let (width, height, _) = parse_header(bytes, FIELD_MAGIC)?;
    let n = width
        .checked_mul(height)
        .ok_or(RasterError::InvalidDimensions(width, height))?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != n * 4 {
        return Err(RasterError::Truncated);
    }
    let values = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    ScalarField::from_values(width, height, values)
}

pub fn read_label_map(path: impl AsRef<Path>) -> Result<LabelMap> {
    decode_label_map(&fs::read(path)?)
}

pub fn write_label_map(path: impl AsRef<Path>, map: &LabelMap) -> Result<()> {
    Ok(fs::write(path, encode_label_map(map))?)
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    read_label_map(path).map(|m| label_map_to_mask(&m))
}

pub fn write_mask(path: impl AsRef<Path>, mask: &BinaryMask) -> Result<()> {
    write_label_map(path, &mask_to_label_map(mask))
}

pub fn read_field(path: impl AsRef<Path>) -> Result<ScalarField> {
    decode_field(&fs::read(path)?)
}

pub fn write_field(path: impl AsRef<Path>, field: &ScalarField) -> Result<()> {
    Ok(fs::write(path, encode_field(field))?)
}
