//! Binary run-length codec used on the wire.
//!
//! Runs alternate background/foreground over the row-major raster, starting
//! with a background run that may be zero. Each run is an unsigned LEB128
//! varint (7 bits per byte, least significant group first).

use thiserror::Error;

use crate::raster::BinaryMask;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RleError {
    #[error("run length overflows the raster or a 64-bit varint")]
    RunLengthOverflow,
    #[error("runs cover {found} pixels, raster has {expected}")]
    LengthMismatch { expected: u64, found: u64 },
    #[error("varint truncated at end of input")]
    Truncated,
}

pub fn mask_runs(mask: &BinaryMask) -> Vec<u64> {
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0u64;
    for &b in mask.bits() {
        if b != current {
            runs.push(len);
            current = b;
            len = 0;
        }
        len += 1;
    }
    runs.push(len);
    runs
}

pub fn encode_runs(runs: &[u64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(runs.len() * 2);
    for &run in runs {
        let mut v = run;
        loop {
            let byte = (v & 0x7F) as u8;
            v >>= 7;
            if v == 0 {
                out.push(byte);
                break;
            }
            out.push(byte | 0x80);
        }
    }
    out
}

pub fn decode_runs(bytes: &[u8]) -> Result<Vec<u64>, RleError> {
    let mut runs = Vec::new();
    let mut value = 0u64;
    let mut shift = 0u32;
    let mut pending = false;
    for &byte in bytes {
        let group = (byte & 0x7F) as u64;
        if shift >= 64 || (shift > 0 && group >> (64 - shift) != 0) {
            return Err(RleError::RunLengthOverflow);
        }
        value |= group << shift;
        if byte & 0x80 != 0 {
            shift += 7;
            pending = true;
        } else {
            runs.push(value);
            value = 0;
            shift = 0;
            pending = false;
        }
    }
    if pending {
        return Err(RleError::Truncated);
    }
    Ok(runs)
}

pub fn rle_encode(mask: &BinaryMask) -> Vec<u8> {
    encode_runs(&mask_runs(mask))
}

pub fn rle_decode(bytes: &[u8], width: usize, height: usize) -> Result<BinaryMask, RleError> {
    let total = (width as u64) * (height as u64);
    let runs = decode_runs(bytes)?;
    let mut bits = Vec::with_capacity(total as usize);
    let mut value = false;
    let mut covered = 0u64;
    for run in runs {
        covered = covered
            .checked_add(run)
            .filter(|&c| c <= total)
            .ok_or(RleError::RunLengthOverflow)?;
        bits.resize(covered as usize, value);
        value = !value;
    }
    if covered != total {
        return Err(RleError::LengthMismatch {
            expected: total,
            found: covered,
        });
    }
    BinaryMask::from_bits(width, height, bits).map_err(|_| RleError::LengthMismatch {
        expected: total,
        found: covered,
    })
}
