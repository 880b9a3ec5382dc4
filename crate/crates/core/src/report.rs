//! CSV and JSON renderings of tables, verdicts and scans. Floats are written
//! with 17 significant digits so that output is reproducible bit for bit.

use std::fmt::Write;

use serde::Serialize;

use crate::classify::Verdict;
use crate::measure::FourierTable;
use crate::operators::{DisjointnessReport, FoguelScan};
use crate::position::{FacetReport, GramMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Scientific notation with 17 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

pub fn fourier_csv(table: &FourierTable) -> String {
    let mut out = String::from("k,re,im,abs,error_bound\n");
    let err = sci(table.error_bound());
    for (k, v) in table.iter() {
        writeln!(out, "{k},{},{},{},{err}", sci(v.re), sci(v.im), sci(v.norm())).unwrap();
    }
    out
}

/// One row per verdict; witness indices are space separated.
pub fn verdicts_csv(verdicts: &[Verdict]) -> String {
    let mut out = String::from("property,outcome,residual,horizon,tolerance,witness_indices\n");
    for v in verdicts {
        let witness = v
            .witness
            .as_ref()
            .map(|w| w.indices().iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
            .unwrap_or_default();
        writeln!(out, "{},{},{},{},{},{witness}", v.property, v.outcome, sci(v.residual), v.horizon, sci(v.tolerance))
            .unwrap();
    }
    out
}

/// Entries `⟨z^j; z^k⟩` as `j,k,re,im`.
pub fn gram_csv(gram: &GramMatrix) -> String {
    let mut out = String::from("j,k,re,im\n");
    let h = gram.half() as i64;
    for j in -h..=h {
        for k in -h..=h {
            let v = gram.get(j, k);
            writeln!(out, "{j},{k},{},{}", sci(v.re), sci(v.im)).unwrap();
        }
    }
    out
}

/// Facet verdicts followed by an `agreement` row.
pub fn facets_csv(report: &FacetReport) -> String {
    let mut out = verdicts_csv(&report.facets);
    let outcome = if report.agree { "holds" } else { "fails" };
    writeln!(out, "agreement,{outcome},,,,").unwrap();
    out
}

/// `n,re,im,flag` where the flag marks membership in the witness.
pub fn foguel_csv(scan: &FoguelScan) -> String {
    let mut out = String::from("n,re,im,flag\n");
    let witness = scan.verdict.witness.as_ref().map(|w| w.indices()).unwrap_or(&[]);
    for (n, v) in &scan.values {
        let flag = if witness.binary_search(n).is_ok() { "witness" } else { "excluded" };
        writeln!(out, "{n},{},{},{flag}", sci(v.re), sci(v.im)).unwrap();
    }
    out
}

/// `n,norm` rows.
pub fn norms_csv(norms: &[(u64, f64)]) -> String {
    let mut out = String::from("n,norm\n");
    for (n, v) in norms {
        writeln!(out, "{n},{}", sci(*v)).unwrap();
    }
    out
}

pub fn disjointness_csv(report: &DisjointnessReport) -> String {
    let mut out = String::from("horizon,coercive_count,stable_count,intersection\n");
    for h in &report.horizons {
        let inter = h.intersection.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        writeln!(out, "{},{},{},{inter}", h.horizon, h.coercive.len(), h.stable_count).unwrap();
    }
    out
}
