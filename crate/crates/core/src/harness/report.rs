//! CSV rendering of step metrics.

use std::io::Write;

use crate::core::fmt_rational;
use crate::error::{Error, Result};
use crate::harness::replay::StepMetrics;

/// Fixed leading columns.
pub const COLUMNS: [&str; 13] = [
    "step", "op", "p", "objective", "opt_grid", "alpha", "blue_count", "f", "F", "phi", "migration", "budget", "ok",
];

/// Writes one row per step. With `oracle`, `opt_star` and `ratio` follow
/// the fixed columns and stay blank above the oracle cap.
pub fn write_csv<W: Write>(out: W, rows: &[StepMetrics], oracle: bool) -> Result<()> {
    let io = |e: csv::Error| Error::Input(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if oracle {
        header.extend(["opt_star", "ratio"]);
    }
    w.write_record(&header).map_err(io)?;
    for r in rows {
        let mut rec = vec![
            r.step.to_string(),
            r.op.to_string(),
            fmt_rational(&r.size),
            fmt_rational(&r.objective),
            fmt_rational(&r.opt_grid),
            fmt_rational(&r.alpha),
            r.blue_count.to_string(),
            r.f.to_string(),
            fmt_rational(&r.big_f),
            fmt_rational(&r.phi),
            fmt_rational(&r.migration),
            fmt_rational(&r.budget),
            if r.ok() { "pass" } else { "fail" }.to_string(),
        ];
        if oracle {
            rec.push(r.opt_star.as_ref().map(fmt_rational).unwrap_or_default());
            rec.push(r.ratio().as_ref().map(fmt_rational).unwrap_or_default());
        }
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Input(format!("csv: {e}")))?;
    Ok(())
}
