//! Floer generators: pairs of a cosphere radius `r` and a geodesic of length `|f'(r)|`,
//! graded by the sign of `f'` and `f''` and filtered by the action `f(r) - r f'(r)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{enumerate_geodesics, GeodesicDatum, HomotopyClass, Manifold, Submanifold};
use crate::profile::Profile;

/// Two actions closer than this are treated as equal.
pub const ACTION_TOLERANCE: f64 = 1e-9;

/// Grading of the generator over a geodesic with Morse index `morse`.
///
/// | f' | f'' | grading |
/// |----|-----|---------|
/// | +  | +   | d - morse |
/// | +  | -   | d + 1 - morse |
/// | -  | +   | n - 1 + morse |
/// | -  | -   | n + morse |
pub fn grading(d: usize, n: usize, morse: usize, sign_fprime: i8, sign_fsecond: i8) -> i64 {
    let (d, n, morse) = (d as i64, n as i64, morse as i64);
    match (sign_fprime > 0, sign_fsecond > 0) {
        (true, true) => d - morse,
        (true, false) => d + 1 - morse,
        (false, true) => n - 1 + morse,
        (false, false) => n + morse,
    }
}

/// `f(r) - r f'(r)`.
pub fn action(p: &Profile, r: f64) -> f64 {
    p.action(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloerGenerator {
    pub r: f64,
    /// Position of the underlying geodesic in [`GeneratorSet::geodesics`].
    pub geodesic: usize,
    pub length: f64,
    pub morse: usize,
    /// Signed duration `f'(r)`; negative values use the reversed orientation.
    pub tau: f64,
    pub sign_fsecond: i8,
    pub band: u32,
    pub grading: i64,
    pub action: f64,
    pub class: HomotopyClass,
}

/// Every generator in one class, sorted by `(grading, action)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub n: usize,
    pub d: usize,
    /// Geodesics of length strictly below this were enumerated; it equals `max|f'|`.
    pub length_cap: f64,
    #[serde(skip)]
    pub geodesics: Vec<GeodesicDatum>,
    pub generators: Vec<FloerGenerator>,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn with_grading(&self, g: i64) -> impl Iterator<Item = &FloerGenerator> {
        self.generators.iter().filter(move |x| x.grading == g)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Scenario(e.to_string()))
    }
}

/// Build the generators of `p` over the given geodesics, all in one class.
///
/// Geodesics not shorter than `p.max_slope()` are ignored. Fails on a transversality
/// violation at any matched root and on coinciding actions.
pub fn generators_from_geodesics(
    geodesics: Vec<GeodesicDatum>,
    n: usize,
    d: usize,
    p: &Profile,
) -> Result<GeneratorSet> {
    let cap = p.max_slope();
    let geodesics: Vec<GeodesicDatum> = geodesics.into_iter().filter(|g| g.length < cap).collect();
    let per_geodesic: Vec<Vec<FloerGenerator>> = geodesics
        .par_iter()
        .enumerate()
        .map(|(idx, g)| {
            let roots = p.critical_radii(g.length)?;
            Ok(roots
                .into_iter()
                .map(|c| FloerGenerator {
                    r: c.r,
                    geodesic: idx,
                    length: g.length,
                    morse: g.morse_index,
                    tau: f64::from(c.sign_fprime) * g.length,
                    sign_fsecond: c.sign_fsecond,
                    band: c.band,
                    grading: grading(d, n, g.morse_index, c.sign_fprime, c.sign_fsecond),
                    action: p.action(c.r),
                    class: g.homotopy_class.clone(),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut generators: Vec<FloerGenerator> = per_geodesic.into_iter().flatten().collect();

    generators.sort_by(|a, b| a.action.total_cmp(&b.action));
    if let Some(w) = generators.windows(2).find(|w| w[1].action - w[0].action <= ACTION_TOLERANCE) {
        return Err(Error::DuplicateAction { r1: w[0].r, r2: w[1].r, action: w[0].action });
    }
    generators.sort_by(|a, b| a.grading.cmp(&b.grading).then(a.action.total_cmp(&b.action)));
    Ok(GeneratorSet { n, d, length_cap: cap, geodesics, generators })
}

/// All generators of `p` in class `c` for geodesics from `q` to `x1`.
pub fn enumerate_generators(
    m: &Manifold,
    q: &Submanifold,
    x1: &[f64],
    c: &HomotopyClass,
    p: &Profile,
) -> Result<GeneratorSet> {
    let n = m.dimension();
    let d = q.dimension(m)?;
    let cap = p.max_slope();
    let geodesics = if cap > 0.0 { enumerate_geodesics(m, q, x1, c, cap)? } else { Vec::new() };
    generators_from_geodesics(geodesics, n, d, p)
}
