//! End-to-end scenarios: check the geodesic assumption, compute the constants, enumerate
//! generators of `f_{a-b}`, bound the boundary depth from below and check every inequality
//! the bound relies on.

mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use report::{emit_report, generator_csv, slope_csv, slope_markdown, ReportFormat};

use crate::complex::{certificate_lower_bound, min_depth_over_admissible, ComplexGenerator, DepthCertificate};
use crate::error::{Error, Result};
use crate::generators::{enumerate_generators, GeneratorSet};
use crate::geometry::{check_assumption, AssumptionReport, HomotopyClass, Manifold, Submanifold};
use crate::profile::{BumpProfile, Profile, SparseCoefficients};

pub const SCHEMA_VERSION: u32 = 1;
/// Slack allowed on every reported inequality.
pub const INEQUALITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpParameters {
    pub radius: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    #[serde(default)]
    pub name: String,
    pub manifold: Manifold,
    pub submanifold: Submanifold,
    pub endpoint: Vec<f64>,
    pub class: HomotopyClass,
    pub k: usize,
    pub bump: BumpParameters,
    pub a: Vec<f64>,
    #[serde(default)]
    pub b: Vec<f64>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// A file holding either one scenario or an array of them.
    pub fn batch_from_json(text: &str) -> Result<Vec<Self>> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        let items = match value {
            serde_json::Value::Array(items) => items,
            other => vec![other],
        };
        items
            .into_iter()
            .map(|v| {
                let s: Scenario = serde_json::from_value(v).map_err(|e| Error::Scenario(e.to_string()))?;
                s.validate()?;
                Ok(s)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Scenario(format!("unsupported schema {}, expected {SCHEMA_VERSION}", self.schema)));
        }
        if self.k == 1 {
            return Err(Error::Scenario("k = 1 can never satisfy the assumption".into()));
        }
        if self.endpoint.len() != self.manifold.ambient_dimension() {
            return Err(Error::Scenario(format!(
                "endpoint has {} coordinates, manifold needs {}",
                self.endpoint.len(),
                self.manifold.ambient_dimension()
            )));
        }
        if self.a.iter().chain(&self.b).any(|v| !v.is_finite()) {
            return Err(Error::Scenario("coefficients must be finite".into()));
        }
        self.manifold.validate()?;
        self.submanifold.dimension(&self.manifold)?;
        self.bump()?;
        Ok(())
    }

    pub fn bump(&self) -> Result<BumpProfile> {
        BumpProfile::new(self.bump.radius, self.bump.delta)
    }

    /// `a - b`, the vector that drives the bound.
    pub fn difference(&self) -> SparseCoefficients {
        SparseCoefficients::from_dense(&self.a).sub(&SparseCoefficients::from_dense(&self.b))
    }
}

/// The constants of the depth bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub radius: f64,
    /// Shortest index-`k` geodesic.
    pub l_k: f64,
    /// Longest geodesic of index `k` or `k + 2`.
    pub max_length: f64,
    /// `2 R L`: bounds the actions in the gradings adjacent to `d - k` and `n + k`.
    pub c0: f64,
    /// `-l_k / (2 h'(3R/4))`: coefficients beyond this in size produce deep generators.
    pub deep_threshold: f64,
    /// `max(c0, deep_threshold)`.
    pub c: f64,
}

impl Constants {
    pub fn new(report: &AssumptionReport, bump: &BumpProfile) -> Result<Self> {
        let (Some(l_k), Some(max_length)) = (report.l_k, report.max_length) else {
            return Err(Error::AssumptionViolated { clause: "i".into(), detail: "no geodesic of index k".into() });
        };
        let radius = bump.radius();
        let c0 = 2.0 * radius * max_length;
        let deep_threshold = -l_k / (2.0 * bump.min_slope());
        Ok(Constants { radius, l_k, max_length, c0, deep_threshold, c: c0.max(deep_threshold) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub holds: bool,
    /// False when the hypothesis of the check is not met; such checks hold vacuously.
    pub applicable: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BruteForceOutcome {
    Minimum { min_beta: f64, acyclic_differentials: usize },
    BudgetExceeded { entries: usize, budget: usize },
    Infeasible { detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub schema: u32,
    pub name: String,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub assumption: AssumptionReport,
    pub constants: Constants,
    /// Dense `a - b`.
    pub coefficients: Vec<f64>,
    pub sup_norm: f64,
    pub osc: f64,
    pub max_slope: f64,
    pub generators: GeneratorSet,
    pub certificate: DepthCertificate,
    /// Certified lower bound on the boundary depth.
    pub b_low: f64,
    /// `sup_norm - C`; the bound is only informative when this is positive.
    pub lower_target: f64,
    pub vacuous: bool,
    pub verdicts: Vec<Verdict>,
    pub brute_force: Option<BruteForceOutcome>,
}

impl CertificateReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }
}

fn complex_generators(set: &GeneratorSet) -> Vec<ComplexGenerator> {
    set.generators
        .iter()
        .enumerate()
        .map(|(id, g)| ComplexGenerator { id, grading: g.grading, filtration: g.action })
        .collect()
}

struct Prepared {
    assumption: AssumptionReport,
    bump: BumpProfile,
    constants: Constants,
}

fn prepare(s: &Scenario) -> Result<Prepared> {
    s.validate()?;
    let bump = s.bump()?;
    // The horizon alone certifies every clause; no larger cap is needed.
    let assumption = check_assumption(&s.manifold, &s.submanifold, &s.endpoint, &s.class, s.k, 0.0)?;
    let constants = Constants::new(&assumption, &bump)?;
    Ok(Prepared { assumption, bump, constants })
}

fn certify(s: &Scenario, bump: &BumpProfile, coeffs: SparseCoefficients) -> Result<(Profile, GeneratorSet, DepthCertificate)> {
    let profile = Profile::new(bump.clone(), coeffs);
    let set = enumerate_generators(&s.manifold, &s.submanifold, &s.endpoint, &s.class, &profile)?;
    let cert = certificate_lower_bound(&complex_generators(&set))?;
    Ok((profile, set, cert))
}

fn verdicts(set: &GeneratorSet, k: usize, c: &Constants, coeffs: &SparseCoefficients, b_low: f64) -> Vec<Verdict> {
    let (n, d, k) = (set.n as i64, set.d as i64, k as i64);
    let mut out = Vec::new();

    let low: Vec<_> = set.generators.iter().filter(|g| g.grading == d - k - 1 || g.grading == d - k + 1).collect();
    let worst = low.iter().map(|g| g.action).fold(f64::INFINITY, f64::min);
    out.push(Verdict {
        check: "low_window_action".into(),
        holds: worst >= -c.c0 - INEQUALITY_TOLERANCE,
        applicable: true,
        detail: format!("{} generator(s) in gradings {} and {}; minimum action {worst} vs -C0 = {}", low.len(), d - k - 1, d - k + 1, -c.c0),
    });

    let high: Vec<_> = set.generators.iter().filter(|g| g.grading == n + k - 1 || g.grading == n + k + 1).collect();
    let worst = high.iter().map(|g| g.action).fold(f64::NEG_INFINITY, f64::max);
    out.push(Verdict {
        check: "high_window_action".into(),
        holds: worst <= c.c0 + INEQUALITY_TOLERANCE,
        applicable: true,
        detail: format!("{} generator(s) in gradings {} and {}; maximum action {worst} vs C0 = {}", high.len(), n + k - 1, n + k + 1, c.c0),
    });

    let min = coeffs.min_entry();
    let applicable = min < -c.deep_threshold;
    let witness = set.with_grading(d - k).map(|g| g.action).fold(f64::INFINITY, f64::min);
    out.push(Verdict {
        check: "deep_minimum".into(),
        holds: !applicable || witness <= min + INEQUALITY_TOLERANCE,
        applicable,
        detail: format!("min coefficient {min} vs -A = {}; lowest action in grading {} is {witness}", -c.deep_threshold, d - k),
    });

    let max = coeffs.max_entry();
    let applicable = max > c.deep_threshold;
    let witness = set.with_grading(n + k).map(|g| g.action).fold(f64::NEG_INFINITY, f64::max);
    out.push(Verdict {
        check: "deep_maximum".into(),
        holds: !applicable || witness >= max - INEQUALITY_TOLERANCE,
        applicable,
        detail: format!("max coefficient {max} vs A = {}; highest action in grading {} is {witness}", c.deep_threshold, n + k),
    });

    let sup = coeffs.sup_norm();
    let applicable = sup > c.c;
    out.push(Verdict {
        check: "depth_lower_bound".into(),
        holds: !applicable || b_low >= sup - c.c - INEQUALITY_TOLERANCE,
        applicable,
        detail: format!("B_low = {b_low} vs sup_norm - C = {}", sup - c.c),
    });

    let osc = coeffs.osc();
    out.push(Verdict {
        check: "sandwich".into(),
        holds: b_low <= osc + INEQUALITY_TOLERANCE && sup - c.c <= osc + INEQUALITY_TOLERANCE,
        applicable: true,
        detail: format!("sup_norm - C = {} <= B_low = {b_low} <= osc = {osc}", sup - c.c),
    });
    out
}

/// Run the full pipeline on `a - b`. With `brute_force`, also minimize the boundary depth
/// over every admissible acyclic differential when the instance is small enough.
pub fn run_certificate(s: &Scenario, brute_force: bool) -> Result<CertificateReport> {
    let Prepared { assumption, bump, constants } = prepare(s)?;
    let coeffs = s.difference();
    let (profile, set, certificate) = certify(s, &bump, coeffs.clone())?;
    let b_low = certificate.bound;
    let sup_norm = coeffs.sup_norm();
    let brute_force = brute_force.then(|| match min_depth_over_admissible(&complex_generators(&set)) {
        Ok(m) => Ok(BruteForceOutcome::Minimum { min_beta: m.min_beta, acyclic_differentials: m.acyclic_differentials }),
        Err(Error::BudgetExceeded { entries, budget }) => Ok(BruteForceOutcome::BudgetExceeded { entries, budget }),
        Err(Error::Infeasible(detail)) => Ok(BruteForceOutcome::Infeasible { detail }),
        Err(e) => Err(e),
    });
    let brute_force = brute_force.transpose()?;
    Ok(CertificateReport {
        schema: SCHEMA_VERSION,
        name: s.name.clone(),
        n: set.n,
        d: set.d,
        k: s.k,
        verdicts: verdicts(&set, s.k, &constants, &coeffs, b_low),
        assumption,
        coefficients: coeffs.to_dense(),
        sup_norm,
        osc: coeffs.osc(),
        max_slope: profile.max_slope(),
        generators: set,
        certificate,
        b_low,
        lower_target: sup_norm - constants.c,
        vacuous: sup_norm <= constants.c,
        constants,
        brute_force,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeRow {
    pub m: u32,
    pub b_low: f64,
    pub osc: f64,
    /// `B_low(m v) / m`.
    pub lower: f64,
    /// `osc(m v) / m`.
    pub upper: f64,
    /// `sup_norm(v) - C / m`, which `lower` must reach.
    pub target: f64,
    pub holds: bool,
}

/// Normalized bounds for `m (a - b)`, `m = 1..=m_max`.
pub fn asymptotic_slope(s: &Scenario, m_max: u32) -> Result<Vec<SlopeRow>> {
    if m_max == 0 {
        return Err(Error::BadParameters("m_max must be at least 1".into()));
    }
    let Prepared { bump, constants, .. } = prepare(s)?;
    let coeffs = s.difference();
    (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let scaled = coeffs.scale(f64::from(m));
            let osc = scaled.osc();
            let (_, _, cert) = certify(s, &bump, scaled)?;
            let mf = f64::from(m);
            let (lower, target) = (cert.bound / mf, coeffs.sup_norm() - constants.c / mf);
            Ok(SlopeRow {
                m,
                b_low: cert.bound,
                osc,
                lower,
                upper: osc / mf,
                target,
                holds: lower >= target - INEQUALITY_TOLERANCE && cert.bound <= osc + INEQUALITY_TOLERANCE,
            })
        })
        .collect()
}

/// CSV samples `(s, f, f', f'')` of the profile of `a` on `[0, R]`.
pub fn plot_profile(s: &Scenario, a: &SparseCoefficients, resolution: usize) -> Result<String> {
    Profile::new(s.bump()?, a.clone()).to_csv(resolution)
}
