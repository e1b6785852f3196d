//! XOR network coding of symbol flows.
//!
//! Combining is the bitwise XOR of symbol values, which is its own inverse:
//! the same fold both mixes flows at a relay and separates them at a
//! destination.

use thiserror::Error;

use crate::gf::{GfError, GfField, GfSymbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetcodeError {
    #[error("cannot combine an empty set of symbols")]
    Empty,
    #[error("frame {index} has {len} symbols, expected {expected}")]
    Ragged { index: usize, len: usize, expected: usize },
    #[error(transparent)]
    Field(#[from] GfError),
}

/// XOR of all `symbols`.
pub fn nc_combine(field: &GfField, symbols: &[GfSymbol]) -> Result<GfSymbol, NetcodeError> {
    let (first, rest) = symbols.split_first().ok_or(NetcodeError::Empty)?;
    field.check(*first)?;
    rest.iter().try_fold(*first, |acc, &s| Ok(field.add(acc, s)?))
}

/// Recovers the one flow missing from `others` out of a combined symbol.
pub fn nc_extract(
    field: &GfField,
    combined: GfSymbol,
    others: &[GfSymbol],
) -> Result<GfSymbol, NetcodeError> {
    field.check(combined)?;
    others.iter().try_fold(combined, |acc, &s| Ok(field.add(acc, s)?))
}

/// Positionwise [`nc_combine`] over equal-length frames.
pub fn nc_combine_frames<F: AsRef<[GfSymbol]>>(
    field: &GfField,
    frames: &[F],
) -> Result<Vec<GfSymbol>, NetcodeError> {
    let (first, rest) = frames.split_first().ok_or(NetcodeError::Empty)?;
    let first = first.as_ref();
    for &s in first {
        field.check(s)?;
    }
    let mut out = first.to_vec();
    for (i, frame) in rest.iter().enumerate() {
        let frame = frame.as_ref();
        if frame.len() != out.len() {
            return Err(NetcodeError::Ragged { index: i + 1, len: frame.len(), expected: out.len() });
        }
        for (acc, &s) in out.iter_mut().zip(frame) {
            *acc = field.add(*acc, s)?;
        }
    }
    Ok(out)
}

// Unchecked in-place XOR for the simulation pipelines, where every frame
// was produced by the same field.
pub(crate) fn xor_into(acc: &mut [GfSymbol], frame: &[GfSymbol]) {
    debug_assert_eq!(acc.len(), frame.len());
    for (a, s) in acc.iter_mut().zip(frame) {
        *a = GfSymbol(a.0 ^ s.0);
    }
}
