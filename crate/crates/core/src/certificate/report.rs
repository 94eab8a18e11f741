use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CertificateReport, SlopeRow};
use crate::error::{Error, Result};
use crate::generators::GeneratorSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::BadParameters(format!("unknown format {other:?}; use json, csv or markdown"))),
        }
    }
}

// Writing to a String cannot fail.
macro_rules! put {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).expect("write to String")
    };
}

/// Generator table sorted by `(grading, action)`.
pub fn generator_csv(set: &GeneratorSet) -> String {
    let mut out = String::from("grading,action,r,tau,length,morse,sign_fsecond,band\n");
    for g in &set.generators {
        put!(out, "{},{},{},{},{},{},{},{}", g.grading, g.action, g.r, g.tau, g.length, g.morse, g.sign_fsecond, g.band);
    }
    out
}

pub fn slope_csv(rows: &[SlopeRow]) -> String {
    let mut out = String::from("m,b_low,osc,lower,upper,target,holds\n");
    for r in rows {
        put!(out, "{},{},{},{},{},{},{}", r.m, r.b_low, r.osc, r.lower, r.upper, r.target, r.holds);
    }
    out
}

pub fn slope_markdown(rows: &[SlopeRow]) -> String {
    let mut out = String::from("| m | B_low / m | osc / m | target | holds |\n|---|---|---|---|---|\n");
    for r in rows {
        put!(out, "| {} | {:.9} | {:.9} | {:.9} | {} |", r.m, r.lower, r.upper, r.target, if r.holds { "yes" } else { "no" });
    }
    out
}

fn markdown(r: &CertificateReport) -> String {
    let c = &r.constants;
    let mut out = String::new();
    let title = if r.name.is_empty() { "scenario" } else { r.name.as_str() };
    put!(out, "# Depth certificate: {title}\n");
    put!(out, "n = {}, d = {}, k = {}; assumption holds: {}\n", r.n, r.d, r.k, r.assumption.holds);
    put!(out, "| quantity | value |\n|---|---|");
    for (name, value) in [
        ("R", c.radius),
        ("l_k", c.l_k),
        ("L", c.max_length),
        ("C0 = 2RL", c.c0),
        ("A", c.deep_threshold),
        ("C", c.c),
        ("sup_norm(a - b)", r.sup_norm),
        ("osc(a - b)", r.osc),
        ("max slope", r.max_slope),
        ("B_low", r.b_low),
        ("sup_norm - C", r.lower_target),
    ] {
        put!(out, "| {name} | {value} |");
    }
    put!(out, "| generators | {} |", r.generators.len());
    if r.vacuous {
        put!(out, "\nThe bound is vacuous: sup_norm(a - b) <= C.");
    }
    put!(out, "\n## Verdicts\n\n| check | verdict | detail |\n|---|---|---|");
    for v in &r.verdicts {
        let verdict = match (v.holds, v.applicable) {
            (false, _) => "FAIL",
            (true, true) => "pass",
            (true, false) => "pass (vacuous)",
        };
        put!(out, "| {} | {verdict} | {} |", v.check, v.detail);
    }
    if let Some(best) = &r.certificate.best {
        put!(
            out,
            "\nWitness: generator {} ({:?} clause), grading {}, action {}, cheapest primitive at {}.",
            best.witness, best.clause, best.grading, best.filtration, best.primitive_filtration
        );
    }
    if let Some(bf) = &r.brute_force {
        put!(out, "\nBrute force: {}", serde_json::to_string(bf).expect("serializable"));
    }
    out
}

/// Serialize a report. JSON is the canonical, lossless form.
pub fn emit_report(r: &CertificateReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(r).map_err(|e| Error::Scenario(e.to_string())),
        ReportFormat::Csv => Ok(generator_csv(&r.generators)),
        ReportFormat::Markdown => Ok(markdown(r)),
    }
}
