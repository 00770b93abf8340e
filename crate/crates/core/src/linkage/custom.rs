//! Text format for user-supplied linkage sets.
//!
//! One linkage set per line; indices are zero-based decimal integers
//! separated by commas, spaces, or any mix of the two.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Parses a custom FOS. Every index must lie in `0..ell`; empty lines and
/// non-integer tokens are errors carrying their 1-based line number.
pub fn parse_custom_fos(text: &str, ell: usize) -> Result<Vec<Vec<usize>>> {
    let mut sets = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let mut set = Vec::new();
        for token in raw.split([',', ' ']).filter(|t| !t.is_empty()) {
            let index: usize = token
                .parse()
                .map_err(|_| Error::parse(line, alloc::format!("{token:?} is not a variable index")))?;
            if index >= ell {
                return Err(Error::parse(
                    line,
                    alloc::format!("index {index} outside [0, {}]", ell.saturating_sub(1)),
                ));
            }
            set.push(index);
        }
        if set.is_empty() {
            return Err(Error::parse(line, "empty linkage set"));
        }
        set.sort_unstable();
        set.dedup();
        sets.push(set);
    }
    if sets.is_empty() {
        return Err(Error::parse(0, "custom FOS contains no linkage sets"));
    }
    Ok(sets)
}

/// Renders sets in the format read by [`parse_custom_fos`].
pub fn format_custom_fos(sets: &[Vec<usize>]) -> alloc::string::String {
    use core::fmt::Write;
    let mut out = alloc::string::String::new();
    for set in sets {
        for (i, v) in set.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}
