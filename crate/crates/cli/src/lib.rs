//! Command-line front end: the element DSL, renderers, and subcommand dispatch.

pub mod commands;
pub mod dsl;
pub mod render;

use rhpwn_core::lie::IndexRange;

/// Parses an inclusive range `a..b` (either end may be negative) or a single integer.
pub fn parse_range(s: &str) -> Result<IndexRange, String> {
    let s = s.trim();
    let parse = |v: &str| v.trim().parse::<i64>().map_err(|_| format!("invalid integer {v:?} in range {s:?}"));
    match s.split_once("..") {
        Some((lo, hi)) => Ok(IndexRange::new(parse(lo)?, parse(hi)?)),
        None => {
            let v = parse(s)?;
            Ok(IndexRange::new(v, v))
        }
    }
}
