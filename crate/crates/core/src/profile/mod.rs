//! Dyadic bump profiles `f_a(s) = Σ a_i h(2^{i+1} s - R)`.
//!
//! Band `i` occupies `[2^{-(i+1)} R, 2^{-i} R]`; on that band `f_a` is the bump `h`
//! compressed horizontally by `2^{i+1}` and scaled vertically by `a_i`. Bands never
//! overlap because `h` vanishes near both ends of `[0, R]`, so every evaluation touches a
//! single coefficient.

mod bump;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use bump::{BumpPiece, BumpProfile, LocalPoly};

use crate::error::{Error, Result};

/// Relative tolerance for bisection on a monotone piece of `f'`.
pub const ROOT_RELATIVE_TOLERANCE: f64 = 1e-12;
/// Iteration cap for bisection.
pub const ROOT_MAX_ITERATIONS: usize = 200;
/// A matched root with `|f''| ≤` this is a transversality failure.
pub const TRANSVERSALITY_TOLERANCE: f64 = 1e-9;

/// Finitely supported real sequence; only nonzero entries are stored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct SparseCoefficients {
    entries: BTreeMap<u32, f64>,
}

impl SparseCoefficients {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Dense vector `(a_0, a_1, ...)`; zeros are dropped.
    pub fn from_dense(values: &[f64]) -> Self {
        values.iter().enumerate().map(|(i, &v)| (i as u32, v)).collect()
    }

    /// The unit vector `e_j`.
    pub fn unit(j: u32) -> Self {
        std::iter::once((j, 1.0)).collect()
    }

    pub fn get(&self, i: u32) -> f64 {
        self.entries.get(&i).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries.iter().map(|(&i, &v)| (i, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One past the largest stored index.
    pub fn dense_len(&self) -> usize {
        self.entries.keys().next_back().map_or(0, |&i| i as usize + 1)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dense_len()];
        for (i, v) in self.iter() {
            out[i as usize] = v;
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.iter().map(|(i, v)| (i, v * factor)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        for (i, v) in other.iter() {
            *entries.entry(i).or_insert(0.0) += v;
        }
        entries.into_iter().collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn max_entry(&self) -> f64 {
        self.iter().map(|(_, v)| v).fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.iter().map(|(_, v)| v).fold(0.0, f64::min)
    }

    /// `max_i |a_i|`.
    pub fn sup_norm(&self) -> f64 {
        self.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max)
    }

    /// `max_{i,j} |a_i - a_j|` over all coordinates, the implicit zeros included.
    pub fn osc(&self) -> f64 {
        self.max_entry() - self.min_entry()
    }
}

impl FromIterator<(u32, f64)> for SparseCoefficients {
    fn from_iter<I: IntoIterator<Item = (u32, f64)>>(iter: I) -> Self {
        let entries = iter.into_iter().filter(|&(_, v)| v != 0.0).collect();
        SparseCoefficients { entries }
    }
}

impl From<Vec<f64>> for SparseCoefficients {
    fn from(values: Vec<f64>) -> Self {
        Self::from_dense(&values)
    }
}

impl From<SparseCoefficients> for Vec<f64> {
    fn from(a: SparseCoefficients) -> Self {
        a.to_dense()
    }
}

/// A root of `|f'_a(r)| = ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalRadius {
    pub r: f64,
    pub band: u32,
    pub sign_fprime: i8,
    pub sign_fsecond: i8,
}

enum SlopeSolution {
    Missing,
    Root(f64),
    Inflection(f64),
}

/// `f_a` together with its bump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    bump: BumpProfile,
    coeffs: SparseCoefficients,
}

impl Profile {
    pub fn new(bump: BumpProfile, coeffs: SparseCoefficients) -> Self {
        Profile { bump, coeffs }
    }

    pub fn bump(&self) -> &BumpProfile {
        &self.bump
    }

    pub fn coeffs(&self) -> &SparseCoefficients {
        &self.coeffs
    }

    pub fn radius(&self) -> f64 {
        self.bump.radius()
    }

    /// Horizontal compression factor `2^{i+1}` of band `i`.
    fn band_scale(band: u32) -> f64 {
        2f64.powi(band as i32 + 1)
    }

    /// Band containing `s`, for `0 < s < R`.
    fn band_of(&self, s: f64) -> u32 {
        let r = self.radius();
        let mut band = (r / s).log2().floor().max(0.0) as u32;
        // Correct the floating log so that R/2^{band+1} <= s < R/2^band.
        while band > 0 && s >= r / Self::band_scale(band - 1) {
            band -= 1;
        }
        while s < r / Self::band_scale(band) {
            band += 1;
        }
        band
    }

    /// `f_a`, `f_a'` or `f_a''` at `s`; zero outside `(0, R)`.
    pub fn eval(&self, s: f64, order: usize) -> f64 {
        let r = self.radius();
        if !(s > 0.0 && s < r) {
            return 0.0;
        }
        let band = self.band_of(s);
        let a = self.coeffs.get(band);
        if a == 0.0 {
            return 0.0;
        }
        let scale = Self::band_scale(band);
        a * scale.powi(order as i32) * self.bump.eval(scale * s - r, order)
    }

    pub fn value(&self, s: f64) -> f64 {
        self.eval(s, 0)
    }

    pub fn slope(&self, s: f64) -> f64 {
        self.eval(s, 1)
    }

    pub fn curvature(&self, s: f64) -> f64 {
        self.eval(s, 2)
    }

    /// Action `f(r) - r f'(r)` of the chord at cosphere radius `r`.
    pub fn action(&self, r: f64) -> f64 {
        self.value(r) - r * self.slope(r)
    }

    /// `max_i 2^{i+1} |a_i| max|h'|`, an upper bound for `|f_a'|` that is attained.
    pub fn max_slope(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(i, v)| Self::band_scale(i) * v.abs() * self.bump.max_abs_slope())
            .fold(0.0, f64::max)
    }

    /// Radius at which band `j` peaks: `(3/4) 2^{-j} R`.
    pub fn peak_radius(&self, band: u32) -> f64 {
        0.75 * self.radius() / 2f64.powi(band as i32)
    }

    /// `max f_a - min f_a`, read off the band extrema `a_i h(R/2) = a_i` and the zero
    /// value taken outside the bands.
    pub fn hofer_oscillation(&self) -> f64 {
        let peak = self.bump.value(self.radius() / 2.0);
        let (lo, hi) = self
            .coeffs
            .iter()
            .map(|(_, v)| v * peak)
            .fold((0.0f64, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi - lo
    }

    /// All `r > 0` with `|f_a'(r)| = length`, sorted by `r`.
    pub fn critical_radii(&self, length: f64) -> Result<Vec<CriticalRadius>> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::BadParameters(format!("length must be positive, got {length}")));
        }
        let r = self.radius();
        let mut out = Vec::new();
        for (band, a) in self.coeffs.iter() {
            let scale = Self::band_scale(band);
            // f'(s) = scale * a * h'(u), u = scale * s - R.
            let amplitude = scale * a;
            for sign_fprime in [1i8, -1] {
                let target = f64::from(sign_fprime) * length / amplitude;
                for (lo, hi, curvature_sign) in self.bump.monotone_slope_pieces() {
                    let u = match self.solve_slope(lo, hi, curvature_sign, target) {
                        SlopeSolution::Missing => continue,
                        SlopeSolution::Inflection(u) => {
                            return Err(Error::TransversalityViolation {
                                r: (u + r) / scale,
                                length,
                                fsecond: 0.0,
                            })
                        }
                        SlopeSolution::Root(u) => u,
                    };
                    let radius = (u + r) / scale;
                    let fsecond = self.curvature(radius);
                    if fsecond.abs() <= TRANSVERSALITY_TOLERANCE {
                        return Err(Error::TransversalityViolation { r: radius, length, fsecond });
                    }
                    out.push(CriticalRadius {
                        r: radius,
                        band,
                        sign_fprime,
                        sign_fsecond: if fsecond > 0.0 { 1 } else { -1 },
                    });
                }
            }
        }
        out.sort_by(|x, y| x.r.total_cmp(&y.r));
        Ok(out)
    }

    /// Solve `h'(u) = target` on a piece where `h'` is monotone. Hitting the value of
    /// `h'` at an inflection breakpoint is a transversality failure.
    fn solve_slope(&self, lo: f64, hi: f64, curvature_sign: f64, target: f64) -> SlopeSolution {
        let h = &self.bump;
        let (mut a, mut b) = (lo, hi);
        let (fa, fb) = (h.slope_closed(a, true), h.slope_closed(b, false));
        let scale_tol = ROOT_RELATIVE_TOLERANCE * h.max_abs_slope();
        for (edge, value) in [(a, fa), (b, fb)] {
            let inflection = (edge - self.radius() / 4.0).abs() < 1e-15 * self.radius()
                || (edge - 0.75 * self.radius()).abs() < 1e-15 * self.radius();
            if inflection && (value - target).abs() <= scale_tol {
                return SlopeSolution::Inflection(edge);
            }
        }
        let (min, max) = if curvature_sign > 0.0 { (fa, fb) } else { (fb, fa) };
        if !(target > min && target < max) {
            return SlopeSolution::Missing;
        }
        // g(u) = h'(u) - target changes sign on [a, b].
        let increasing = curvature_sign > 0.0;
        for _ in 0..ROOT_MAX_ITERATIONS {
            let mid = 0.5 * (a + b);
            if b - a <= ROOT_RELATIVE_TOLERANCE * mid.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            let above = h.slope(mid) > target;
            if above == increasing {
                b = mid;
            } else {
                a = mid;
            }
        }
        SlopeSolution::Root(0.5 * (a + b))
    }

    /// Samples `(s, f, f', f'')` on `resolution` evenly spaced points of `[0, R]`.
    pub fn samples(&self, resolution: usize) -> Result<Vec<[f64; 4]>> {
        if resolution < 2 {
            return Err(Error::BadParameters(format!("resolution must be at least 2, got {resolution}")));
        }
        let r = self.radius();
        Ok((0..resolution)
            .map(|k| {
                let s = r * k as f64 / (resolution - 1) as f64;
                [s, self.value(s), self.slope(s), self.curvature(s)]
            })
            .collect())
    }

    /// Plot export with header `s,f,df,d2f`.
    pub fn to_csv(&self, resolution: usize) -> Result<String> {
        let mut out = String::from("s,f,df,d2f\n");
        for [s, f, df, d2f] in self.samples(resolution)? {
            // Adding 0.0 turns -0 into 0.
            writeln!(out, "{s},{},{},{}", f + 0.0, df + 0.0, d2f + 0.0).expect("writing to a String cannot fail");
        }
        Ok(out)
    }
}

impl BumpProfile {
    /// One-sided slope at a piece boundary, so breakpoint values come from the piece
    /// being solved rather than its neighbour.
    fn slope_closed(&self, u: f64, from_right: bool) -> f64 {
        let piece = if from_right {
            self.pieces().iter().find(|p| u >= p.left && u < p.right)
        } else {
            self.pieces().iter().find(|p| u > p.left && u <= p.right)
        };
        piece.map_or(0.0, |p| p.slope.eval(u - p.left))
    }
}
