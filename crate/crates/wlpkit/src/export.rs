//! CSV writers for display traces, sweep tables, trend reports and C-V
//! curves.

use std::fmt::Write as _;

use wlpkit_core::network::DisplayRow;
use wlpkit_core::sweep::{CellOutcome, SweepTable, TrendReport};
use wlpkit_core::varactor::OperatingPoint;

/// Round to `digits` significant digits and print the shortest form.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let r: f64 = format!("{x:.*e}", digits.saturating_sub(1)).parse().unwrap_or(x);
    let r = if r == 0.0 { 0.0 } else { r };
    let a = r.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn g9(x: f64) -> String {
    sig(x, 9)
}

pub fn display_csv(rows: &[DisplayRow]) -> String {
    let mut out = String::from("freq_hz,mag_db,phase_deg,smith_re,smith_im\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            g9(r.freq_hz),
            g9(r.mag_db),
            g9(r.phase_deg),
            g9(r.smith_re),
            g9(r.smith_im)
        )
        .unwrap();
    }
    out
}

/// One row per cell in row-major order. Skipped cells leave the merit
/// columns empty.
pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = String::new();
    for a in &table.axes {
        out.push_str(a.dof.name());
        out.push(',');
    }
    out.push_str("s21_db,s11_db\n");
    for c in &table.cells {
        for v in &c.coords {
            out.push_str(&g9(*v));
            out.push(',');
        }
        match &c.outcome {
            CellOutcome::Evaluated(m) => writeln!(out, "{},{}", g9(m.s21_db), g9(m.s11_db)).unwrap(),
            CellOutcome::Skipped(_) => out.push_str(",\n"),
        }
    }
    out
}

pub fn trend_csv(report: &TrendReport) -> String {
    let mut out = String::from("dof,expected,observed,match,s21_db_first,s21_db_last\n");
    for e in &report.entries {
        let first = e.samples.first().map_or(f64::NAN, |s| s.1);
        let last = e.samples.last().map_or(f64::NAN, |s| s.1);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            e.dof,
            e.expected,
            e.observed,
            e.matches(),
            g9(first),
            g9(last)
        )
        .unwrap();
    }
    out
}

pub fn cv_csv(points: &[OperatingPoint]) -> String {
    let mut out = String::from("bias_v,displacement_m,capacitance_f,state\n");
    for p in points {
        writeln!(
            out,
            "{},{},{},{}",
            g9(p.bias),
            g9(p.displacement),
            g9(p.capacitance),
            if p.pulled_in { "pulled_in" } else { "up" }
        )
        .unwrap();
    }
    out
}
