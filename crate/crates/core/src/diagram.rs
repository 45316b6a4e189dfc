//! Phase-diagram sweeps over `(p, theta)` and their CSV encoding.

use std::io::Write;

use serde::Serialize;

use crate::embed::{classify_region, BoundSource, Region};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::qubit::{family_maximum, ScanConfig};

pub const CSV_HEADER: &str = "p,theta,status,source,family_max";

#[derive(Debug, Clone, Copy)]
pub struct DiagramSpec {
    pub p_min: f64,
    pub p_max: f64,
    pub p_step: f64,
    pub theta_step: f64,
    pub with_family: bool,
    pub scan: ScanConfig,
    pub exec: Execution,
}

impl Default for DiagramSpec {
    fn default() -> Self {
        Self {
            p_min: 1.0,
            p_max: 3.0,
            p_step: 0.1,
            theta_step: 0.05,
            with_family: false,
            scan: ScanConfig {
                exec: Execution::Sequential,
                ..ScanConfig::default()
            },
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseDiagramRow {
    pub p: f64,
    pub theta: f64,
    pub status: Region,
    pub source: BoundSource,
    pub family_max: Option<f64>,
}

/// Rounds to 12 decimals so that accumulated steps land on the intended
/// decimal grid values.
fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// `lo, lo + step, ...` up to and including `hi` (within rounding).
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| snap(lo + step * i as f64)).collect()
}

pub fn phase_diagram(spec: &DiagramSpec) -> Result<Vec<PhaseDiagramRow>> {
    let valid = spec.p_min >= 1.0
        && spec.p_max >= spec.p_min
        && spec.p_max.is_finite()
        && spec.p_step > 0.0
        && spec.theta_step > 0.0
        && spec.theta_step <= 1.0;
    if !valid {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= p_min <= p_max and positive steps (got p in [{}, {}], steps {} / {})",
            spec.p_min, spec.p_max, spec.p_step, spec.theta_step
        )));
    }
    let ps = grid(spec.p_min, spec.p_max, spec.p_step);
    let thetas = grid(0.0, 1.0, spec.theta_step);
    let cells: Vec<(f64, f64)> = ps
        .iter()
        .flat_map(|&p| thetas.iter().map(move |&t| (p, t)))
        .collect();

    let rows = par::map_indexed(spec.exec, cells.len(), |k| {
        let (p, theta) = cells[k];
        let region = classify_region(p, theta);
        let family_max = if spec.with_family && p < 2.0 {
            Some(family_maximum(p, theta, &spec.scan).map(|w| w.m_value))
        } else {
            None
        };
        (p, theta, region, family_max)
    });

    let mut out = Vec::with_capacity(rows.len());
    for (p, theta, region, family_max) in rows {
        out.push(PhaseDiagramRow {
            p,
            theta,
            status: region.status,
            source: region.source,
            family_max: family_max.transpose()?,
        });
    }
    out.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.theta.total_cmp(&b.theta)));
    Ok(out)
}

/// Shortest decimal representation that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x}")
}

pub fn csv_line(row: &PhaseDiagramRow) -> String {
    format!(
        "{},{},{},{},{}",
        format_float(row.p),
        format_float(row.theta),
        row.status.as_str(),
        row.source.as_str(),
        row.family_max.map(format_float).unwrap_or_default()
    )
}

pub fn write_csv<W: Write>(rows: &[PhaseDiagramRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", csv_line(row))?;
    }
    Ok(())
}

pub fn to_csv_string(rows: &[PhaseDiagramRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}
