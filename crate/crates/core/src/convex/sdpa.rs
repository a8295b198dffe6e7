//! Plain-text dump of a standard-form problem in SDPA sparse format.
//!
//! The standard form `min <C,X> s.t. <A_i,X> = b_i, X >= 0` is written as the
//! SDPA dual `max <F0,Y> s.t. <F_i,Y> = c_i` with `F0 = -C`, `F_i = A_i`,
//! `c_i = b_i`. The diagonal LP block, when present, is the last block and
//! carries a negative size.

use std::io::Write;

use super::problem::StandardForm;
use crate::Result;

pub(crate) fn write<W: Write>(sf: &StandardForm, out: &mut W) -> Result<()> {
    let m = sf.m();
    let mut sizes: Vec<i64> = sf.psd_sizes.iter().map(|&n| n as i64).collect();
    if sf.lp_len > 0 {
        sizes.push(-(sf.lp_len as i64));
    }
    let lp_block = sf.psd_sizes.len() + 1;
    writeln!(out, "\"tnl standard form\"")?;
    writeln!(out, "{m} = mDIM")?;
    writeln!(out, "{} = nBLOCK", sizes.len())?;
    let joined: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
    writeln!(out, "{{{}}} = bLOCKsTRUCT", joined.join(", "))?;
    let b: Vec<String> = sf.b.iter().map(|v| format!("{v:.17e}")).collect();
    writeln!(out, "{}", b.join(" "))?;
    for (blk, c) in sf.c_psd.iter().enumerate() {
        for r in 0..c.nrows() {
            for col in r..c.ncols() {
                if c[(r, col)] != 0.0 {
                    writeln!(out, "0 {} {} {} {:.17e}", blk + 1, r + 1, col + 1, -c[(r, col)])?;
                }
            }
        }
    }
    for (k, v) in sf.c_lp.iter().enumerate() {
        if *v != 0.0 {
            writeln!(out, "0 {lp_block} {} {} {:.17e}", k + 1, k + 1, -v)?;
        }
    }
    for (i, row) in sf.rows.iter().enumerate() {
        for &(blk, r, c, v) in &row.psd {
            writeln!(out, "{} {} {} {} {:.17e}", i + 1, blk + 1, r + 1, c + 1, v)?;
        }
        for &(k, v) in &row.lp {
            writeln!(out, "{} {lp_block} {} {} {:.17e}", i + 1, k + 1, k + 1, v)?;
        }
    }
    Ok(())
}
