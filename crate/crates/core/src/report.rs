//! Ordering and TSV rendering of score records.

use std::cmp::Ordering;
use std::io::{self, Write};

use crate::analyze::{Mode, ScoreRecord};
use crate::score::format_g;
use crate::text::Text;

pub const TSV_HEADER: &str = "class\tstring\tlength\tcount\texpectation\tvariance\tzscore\tfstar";

fn by_string(a: &ScoreRecord, b: &ScoreRecord) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.codes.cmp(&b.codes))
        .then_with(|| a.class.cmp(&b.class))
}

/// Deterministic report order: over-represented rows by descending `z`, then
/// under-represented rows by ascending `z`; mode `all` by (length, string).
/// Ties fall back to (length, string).
pub fn sort_records(records: &mut [ScoreRecord], mode: Mode) {
    match mode {
        Mode::All => records.sort_by(by_string),
        _ => records.sort_by(|a, b| {
            a.class
                .is_under()
                .cmp(&b.class.is_under())
                .then_with(|| {
                    if a.class.is_under() {
                        a.z.total_cmp(&b.z)
                    } else {
                        b.z.total_cmp(&a.z)
                    }
                })
                .then_with(|| by_string(a, b))
        }),
    }
}

/// Writes the header and one row per record, floats with `precision` significant digits.
pub fn write_tsv<W: Write>(out: &mut W, text: &Text, records: &[ScoreRecord], precision: usize) -> io::Result<()> {
    writeln!(out, "{TSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.label(),
            text.render(&r.codes),
            r.len(),
            r.count,
            format_g(r.expectation, precision),
            format_g(r.variance, precision),
            format_g(r.z, precision),
            r.f_star
        )?;
    }
    Ok(())
}
