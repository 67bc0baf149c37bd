//! CSV and JSON renderings of the computed tables. CSV reals carry 17
//! significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;

use crate::measures::{AreaReport, HiddenPolarizationReport};
use crate::multipole::{multipole_strength, MultipoleRecord, MultipoleTable};
use crate::qfunction::QField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[inline]
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn multipoles_csv(table: &MultipoleTable) -> String {
    let mut out = String::from("S2,K,q,re,im\n");
    for r in table.to_records() {
        writeln!(out, "{},{},{},{},{}", r.s2, r.k, r.q, real(r.re), real(r.im)).unwrap();
    }
    out
}

pub fn strengths(table: &MultipoleTable) -> BTreeMap<u32, f64> {
    (0..=table.max_k_present()).map(|k| (k, multipole_strength(table, k))).collect()
}

pub fn multipoles_json(table: &MultipoleTable) -> String {
    #[derive(Serialize)]
    struct Doc {
        records: Vec<MultipoleRecord>,
        strength: BTreeMap<u32, f64>,
    }
    let doc = Doc { records: table.to_records(), strength: strengths(table) };
    serde_json::to_string_pretty(&doc).unwrap() + "\n"
}

pub fn field_csv(field: &QField) -> String {
    let mut out = String::from("theta,phi,weight,Q_total");
    for k in 0..=field.k_max {
        write!(out, ",Q_{k}").unwrap();
    }
    out.push('\n');
    for (i, node) in field.grid.nodes().enumerate() {
        write!(out, "{},{},{},{}", real(node.theta), real(node.phi), real(node.weight), real(field.total[i])).unwrap();
        for c in &field.components {
            write!(out, ",{}", real(c[i])).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn field_json(field: &QField) -> String {
    let nodes: Vec<_> = field.grid.nodes().collect();
    let doc = json!({
        "n_theta": field.grid.n_theta(),
        "n_phi": field.grid.n_phi(),
        "exact_degree": field.grid.exact_degree(),
        "k_max": field.k_max,
        "theta": nodes.iter().map(|n| n.theta).collect::<Vec<_>>(),
        "phi": nodes.iter().map(|n| n.phi).collect::<Vec<_>>(),
        "weight": nodes.iter().map(|n| n.weight).collect::<Vec<_>>(),
        "Q_total": field.total,
        "Q_K": field.components,
        "warning": field.warning.map(|w| w.to_string()),
    });
    serde_json::to_string_pretty(&doc).unwrap() + "\n"
}

pub fn areas_csv(report: &AreaReport) -> String {
    let mut out = String::from("K,area\n");
    for (k, a) in &report.per_k {
        writeln!(out, "{k},{}", real(*a)).unwrap();
    }
    writeln!(out, "total,{}", real(report.total_area)).unwrap();
    out
}

pub fn areas_json(report: &AreaReport, hidden: &HiddenPolarizationReport) -> String {
    let doc = json!({
        "report": report,
        "hidden_polarization": hidden,
    });
    serde_json::to_string_pretty(&doc).unwrap() + "\n"
}

/// One row per `(S, K)`.
pub struct SweepRow {
    pub spin: crate::angular::HalfInteger,
    pub k: u32,
    pub area: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("S,K,area\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.spin.to_f64(), r.k, real(r.area)).unwrap();
    }
    out
}

pub fn sweep_json(rows: &[SweepRow]) -> String {
    let doc: Vec<_> = rows.iter().map(|r| json!({"S": r.spin.to_f64(), "K": r.k, "area": r.area})).collect();
    serde_json::to_string_pretty(&doc).unwrap() + "\n"
}
