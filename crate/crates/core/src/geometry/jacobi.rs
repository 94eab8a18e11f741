//! Numerical Jacobi-field integration, an independent check on the closed-form indices.
//!
//! Along a geodesic of the catalog the curvature term `R(J, γ')γ'` is constant in a
//! parallel frame, so the `Q`-Jacobi fields solve `Y'' = -K Y` with a constant symmetric
//! `K`. The columns of `Y` start either tangent to `Q` (`J(0) = e`, `J'(0) = Σe`) or
//! normal to it (`J(0) = 0`, `J'(0) = e`). Focal points are the times where `Y` is
//! singular; the multiplicity is the dimension of its kernel there.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{leaves, shape_operator, FocalTime, GeodesicDatum, Manifold, Submanifold};
use crate::error::{Error, Result};

pub const DEFAULT_JACOBI_STEPS: usize = 4000;
/// Singular values below this (relative to the column scale) count as kernel directions.
pub const KERNEL_THRESHOLD: f64 = 1e-8;
const REFINE_SUBSTEPS: usize = 32;
const GOLDEN_ITERATIONS: usize = 120;
/// A refined local minimum below this, yet above the kernel threshold, is unresolved.
const AMBIGUOUS_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiReport {
    pub index: usize,
    pub focal_times: Vec<FocalTime>,
}

#[derive(Clone)]
struct State {
    y: DMatrix<f64>,
    v: DMatrix<f64>,
}

struct JacobiSystem {
    curvature: DMatrix<f64>,
    initial: State,
    scale: f64,
}

impl JacobiSystem {
    fn derivative(&self, s: &State) -> State {
        State { y: s.v.clone(), v: -(&self.curvature * &s.y) }
    }

    fn rk4_step(&self, s: &State, h: f64) -> State {
        let k1 = self.derivative(s);
        let s2 = State { y: &s.y + &k1.y * (h / 2.0), v: &s.v + &k1.v * (h / 2.0) };
        let k2 = self.derivative(&s2);
        let s3 = State { y: &s.y + &k2.y * (h / 2.0), v: &s.v + &k2.v * (h / 2.0) };
        let k3 = self.derivative(&s3);
        let s4 = State { y: &s.y + &k3.y * h, v: &s.v + &k3.v * h };
        let k4 = self.derivative(&s4);
        State {
            y: &s.y + (&k1.y + &k2.y * 2.0 + &k3.y * 2.0 + &k4.y) * (h / 6.0),
            v: &s.v + (&k1.v + &k2.v * 2.0 + &k3.v * 2.0 + &k4.v) * (h / 6.0),
        }
    }

    fn advance(&self, s: &State, dt: f64, substeps: usize) -> State {
        let h = dt / substeps as f64;
        (0..substeps).fold(s.clone(), |acc, _| self.rk4_step(&acc, h))
    }

    fn singular_values(&self, s: &State) -> Vec<f64> {
        let mut sv: Vec<f64> = s.y.clone().singular_values().iter().map(|x| x / self.scale).collect();
        sv.sort_by(f64::total_cmp);
        sv
    }

    fn sigma_min(&self, s: &State) -> f64 {
        self.singular_values(s).first().copied().unwrap_or(f64::INFINITY)
    }
}

fn build_system(m: &Manifold, q: &Submanifold, g: &GeodesicDatum) -> Result<JacobiSystem> {
    let dummy = vec![0.0; m.ambient_dimension()];
    let leaves = leaves(m, q, &dummy, None)?;
    if leaves.len() != g.factor_lengths.len() {
        return Err(Error::BadParameters("geodesic does not match the manifold's factors".into()));
    }
    let n = m.dimension();
    let scale = g.length.max(1.0);
    let mut curvature = DMatrix::zeros(n, n);
    let mut y0 = DMatrix::zeros(n, n);
    let mut v0 = DMatrix::zeros(n, n);
    let mut slot = 0;
    for (leaf, &len) in leaves.iter().zip(&g.factor_lengths) {
        let dim = leaf.manifold.dimension();
        let d = leaf.sub.dimension(leaf.manifold)?;
        let kappa = match leaf.manifold {
            Manifold::RoundSphere { radius, .. } => 1.0 / (radius * radius),
            _ => 0.0,
        };
        // In normalized time the velocity has length `len`.
        let sectional = kappa * len * len;
        let shape = shape_operator(leaf.manifold, leaf.sub)?;
        let first_tangent = slot + usize::from(len > 0.0);
        if len > 0.0 {
            // Velocity direction: R(γ', γ')γ' = 0, and γ'(0) is normal to Q.
            v0[(slot, slot)] = scale;
        }
        for a in 0..d {
            let i = first_tangent + a;
            curvature[(i, i)] = sectional;
            y0[(i, i)] = 1.0;
            for b in 0..d {
                v0[(first_tangent + b, i)] = shape[(b, a)];
            }
        }
        for i in first_tangent + d..slot + dim {
            curvature[(i, i)] = sectional;
            v0[(i, i)] = scale;
        }
        slot += dim;
    }
    Ok(JacobiSystem { curvature, initial: State { y: y0, v: v0 }, scale })
}

/// Integrate the Jacobi equation along `g` and count the focal points in `(0, 1)`.
pub fn jacobi_oracle(m: &Manifold, q: &Submanifold, g: &GeodesicDatum, steps: usize) -> Result<JacobiReport> {
    if steps < 1000 {
        return Err(Error::BadParameters(format!("at least 1000 steps required, got {steps}")));
    }
    let system = build_system(m, q, g)?;
    let h = 1.0 / steps as f64;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(system.initial.clone());
    for k in 0..steps {
        let next = system.rk4_step(&states[k], h);
        states.push(next);
    }
    let sigma: Vec<f64> = states.iter().map(|s| system.sigma_min(s)).collect();

    if sigma[steps] <= KERNEL_THRESHOLD {
        return Err(Error::FocalPointEndpoint("jacobi fields degenerate at t = 1".into()));
    }

    let mut focal_times = Vec::new();
    for k in 1..steps {
        if !(sigma[k] < sigma[k - 1] && sigma[k] <= sigma[k + 1]) {
            continue;
        }
        // Golden-section search for the minimum of σ_min on [t_{k-1}, t_{k+1}].
        let base = &states[k - 1];
        let t0 = (k - 1) as f64 * h;
        let eval = |t: f64| system.sigma_min(&system.advance(base, t - t0, REFINE_SUBSTEPS));
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (t0, t0 + 2.0 * h);
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let (mut fc, mut fd) = (eval(c), eval(d));
        for _ in 0..GOLDEN_ITERATIONS {
            if b - a <= 1e-15 {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = eval(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = eval(d);
            }
        }
        let t_star = 0.5 * (a + b);
        let state = system.advance(base, t_star - t0, REFINE_SUBSTEPS);
        let sv = system.singular_values(&state);
        let min = sv[0];
        if min <= KERNEL_THRESHOLD {
            let multiplicity = sv.iter().filter(|&&x| x <= KERNEL_THRESHOLD).count();
            // Adjacent grid minima can bracket the same crossing.
            match focal_times.last_mut() {
                Some(FocalTime { t, .. }) if (*t - t_star).abs() < 2.0 * h => {}
                _ => focal_times.push(FocalTime { t: t_star, multiplicity }),
            }
        } else if min <= AMBIGUOUS_THRESHOLD {
            return Err(Error::NonConvergence(format!(
                "near-singular Jacobi matrix at t = {t_star} (σ_min = {min:e}) could not be resolved"
            )));
        }
    }
    let index = focal_times.iter().map(|f| f.multiplicity).sum();
    Ok(JacobiReport { index, focal_times })
}
