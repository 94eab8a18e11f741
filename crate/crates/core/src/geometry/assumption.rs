//! Verification of the four-clause geodesic assumption for a class `c` and index `k`.

use serde::{Deserialize, Serialize};

use super::{enumerate_geodesics, leaf_geodesics, leaves, GeodesicDatum, HomotopyClass, Leaf, Manifold, Submanifold};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseResult {
    pub clause: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub k: usize,
    pub n: usize,
    pub d: usize,
    pub holds: bool,
    pub clauses: Vec<ClauseResult>,
    /// Shortest index-`k` geodesic in the class.
    pub l_k: Option<f64>,
    /// Longest geodesic of index `k` or `k + 2` in the class.
    pub max_length: Option<f64>,
    /// Every geodesic of index `≤ k + 2` has length at most this.
    pub horizon: f64,
    /// Length cap actually enumerated: the larger of the caller's cap and the horizon.
    pub cap_used: f64,
    /// How finiteness and emptiness beyond the cap were certified.
    pub certification: Vec<String>,
    /// The geodesics of index `k` and `k + 2`, sorted by length.
    pub index_k_geodesics: Vec<GeodesicDatum>,
    pub index_k_plus_2_geodesics: Vec<GeodesicDatum>,
}

impl AssumptionReport {
    /// First failing clause as an error.
    pub fn require(&self) -> Result<()> {
        match self.clauses.iter().find(|c| !c.holds) {
            None => Ok(()),
            Some(c) => Err(Error::AssumptionViolated { clause: c.clause.clone(), detail: c.detail.clone() }),
        }
    }
}

/// Length below which every geodesic of index at most `max_index` lies, on one factor.
fn leaf_horizon(leaf: &Leaf, max_index: usize) -> Result<(f64, String)> {
    match leaf.manifold {
        Manifold::FlatTorus { .. } => {
            if let Submanifold::Whole = leaf.sub {
                return Ok((0.0, "whole flat factor: constant path only".into()));
            }
            let geos = leaf_geodesics(leaf, f64::INFINITY, false)?;
            let len = geos.first().map_or(0.0, |g| g.length);
            Ok((len, "flat torus: curvature bounded above by 0, totally geodesic subtorus; exactly one geodesic per class, index 0".into()))
        }
        Manifold::RoundSphere { dimensions: n, radius } => {
            if let Submanifold::Whole = leaf.sub {
                return Ok((0.0, "whole spherical factor: constant path only".into()));
            }
            let d = leaf.sub.dimension(leaf.manifold)?;
            let pi = std::f64::consts::PI;
            let (tangent, transverse) = (d, n - 1 - d);
            // Focal angles π/2 + jπ (multiplicity d) and (j+1)π (multiplicity n-1-d);
            // the index is nondecreasing in length.
            let mut total = 0;
            let mut j = 0.0;
            let angle = loop {
                total += tangent;
                if total > max_index {
                    break pi / 2.0 + j * pi;
                }
                total += transverse;
                if total > max_index {
                    break (j + 1.0) * pi;
                }
                j += 1.0;
            };
            let note = if d == 0 {
                format!("round sphere S^{n}: conjugate points at multiples of πρ, every index divisible by n-1 = {}", n - 1)
            } else {
                format!("round sphere S^{n} with great S^{d}: index nondecreasing in length")
            };
            Ok((radius * angle, note))
        }
        Manifold::Product { .. } => unreachable!("leaves are never products"),
    }
}

/// Evaluate every clause for class `c` and index `k`.
///
/// Geodesics are enumerated up to the larger of `length_cap` and the family horizon for
/// index `k + 2`, so the index-`k`/`k+2` sets and the emptiness of `k ± 1` are exact.
pub fn assess_assumption(
    m: &Manifold,
    q: &Submanifold,
    x1: &[f64],
    c: &HomotopyClass,
    k: usize,
    length_cap: f64,
) -> Result<AssumptionReport> {
    let leaf_list = leaves(m, q, x1, Some(c))?;
    let mut horizon2 = 0.0;
    let mut certification = Vec::new();
    for leaf in &leaf_list {
        let (h, note) = leaf_horizon(leaf, k + 2)?;
        horizon2 += h * h;
        certification.push(note);
    }
    if leaf_list.len() > 1 {
        certification.push("product: index and squared length add over factors".into());
    }
    let horizon = horizon2.sqrt();
    let cap_used = length_cap.max(horizon) * (1.0 + 1e-12);
    let geodesics = enumerate_geodesics(m, q, x1, c, cap_used)?;

    let n = m.dimension();
    let d = q.dimension(m)?;
    let with_index = |i: usize| -> Vec<GeodesicDatum> { geodesics.iter().filter(|g| g.morse_index == i).cloned().collect() };
    let gk = with_index(k);
    let gk2 = with_index(k + 2);
    let below = if k > 0 { with_index(k - 1) } else { Vec::new() };
    let above = with_index(k + 1);

    let mut clauses = Vec::new();
    clauses.push(ClauseResult {
        clause: "i".into(),
        holds: !gk.is_empty(),
        detail: format!("{} geodesic(s) of index {k}", gk.len()),
    });
    clauses.push(ClauseResult {
        clause: "ii".into(),
        holds: true,
        detail: format!(
            "{} geodesic(s) of index {k} or {}, all of length <= horizon {horizon:.6}",
            gk.len() + gk2.len(),
            k + 2
        ),
    });
    let iii = below.len() + above.len();
    clauses.push(ClauseResult {
        clause: "iii".into(),
        holds: iii == 0,
        detail: if iii == 0 {
            format!("no geodesics of index {} or {}", k as i64 - 1, k + 1)
        } else {
            format!("{iii} geodesic(s) of index {} or {}", k as i64 - 1, k + 1)
        },
    });
    let iv = n - d != 2 || k != 0;
    clauses.push(ClauseResult {
        clause: "iv".into(),
        holds: iv,
        detail: format!("n - d = {}, k = {k}", n - d),
    });

    let l_k = gk.iter().map(|g| g.length).reduce(f64::min);
    let max_length = gk.iter().chain(&gk2).map(|g| g.length).reduce(f64::max);
    Ok(AssumptionReport {
        k,
        n,
        d,
        holds: clauses.iter().all(|c| c.holds),
        clauses,
        l_k,
        max_length,
        horizon,
        cap_used,
        certification,
        index_k_geodesics: gk,
        index_k_plus_2_geodesics: gk2,
    })
}

/// As [`assess_assumption`], failing with the first violated clause.
pub fn check_assumption(
    m: &Manifold,
    q: &Submanifold,
    x1: &[f64],
    c: &HomotopyClass,
    k: usize,
    length_cap: f64,
) -> Result<AssumptionReport> {
    let report = assess_assumption(m, q, x1, c, k, length_cap)?;
    report.require()?;
    Ok(report)
}

/// Families known to satisfy the assumption but not modelled as computable geometries.
pub const METADATA_ONLY_FAMILIES: &[&str] = &[
    "compact semisimple Lie group with bi-invariant metric (k = 0; S^3 realizes SU(2))",
    "positively curved symmetric spaces G/H whose curvature operator has no simple eigenvalue",
    "manifolds of nonpositive sectional curvature (only the flat case is computable here)",
];
