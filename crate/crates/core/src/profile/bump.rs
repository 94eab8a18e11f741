use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polynomial of degree at most five in a local coordinate `x = s - left`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalPoly {
    pub coeffs: [f64; 6],
}

impl LocalPoly {
    pub const ZERO: LocalPoly = LocalPoly { coeffs: [0.0; 6] };

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> LocalPoly {
        let mut out = [0.0; 6];
        for k in 1..6 {
            out[k - 1] = self.coeffs[k] * k as f64;
        }
        LocalPoly { coeffs: out }
    }

    /// Antiderivative with the given constant term. The top coefficient must be zero.
    fn integral(&self, constant: f64) -> LocalPoly {
        debug_assert_eq!(self.coeffs[5], 0.0);
        let mut out = [0.0; 6];
        out[0] = constant;
        for k in 0..5 {
            out[k + 1] = self.coeffs[k] / (k + 1) as f64;
        }
        LocalPoly { coeffs: out }
    }

    fn scaled(&self, factor: f64) -> LocalPoly {
        let mut out = self.coeffs;
        out.iter_mut().for_each(|c| *c *= factor);
        LocalPoly { coeffs: out }
    }
}

/// One polynomial piece of the bump on `[left, right)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpPiece {
    pub left: f64,
    pub right: f64,
    pub value: LocalPoly,
    pub slope: LocalPoly,
    pub curvature: LocalPoly,
}

/// The C² bump `h` on `[0, R]`: zero outside `[δ, R-δ]`, a single maximum `h(R/2) = 1`,
/// concave exactly on `(R/4, 3R/4)` and convex on the two flanks.
///
/// `h''` is a quadratic on each of the four pieces, vanishing at every breakpoint, so
/// `h` itself is a piecewise quartic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    radius: f64,
    delta: f64,
    pieces: [BumpPiece; 4],
    max_slope: f64,
    min_slope: f64,
}

impl BumpProfile {
    pub fn new(radius: f64, delta: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::BadParameters(format!("R must be positive, got {radius}")));
        }
        if !(delta > 0.0 && delta < radius / 4.0) {
            return Err(Error::BadParameters(format!(
                "delta must lie in (0, R/4) = (0, {}), got {delta}",
                radius / 4.0
            )));
        }

        let flank = radius / 4.0 - delta;
        let half = radius / 2.0;
        // Curvature weights chosen so that h'(R/2) = 0: the positive area of h'' on
        // (δ, R/4) equals the negative area on (R/4, R/2).
        let c_flank = 1.0;
        let c_core = 2.0 * c_flank * flank.powi(3) / half.powi(3);

        let breaks = [delta, radius / 4.0, half, 3.0 * radius / 4.0, radius - delta];
        // h'' in local coordinates on each piece.
        let curvatures = [
            // c (x)(w - x)
            LocalPoly { coeffs: [0.0, c_flank * flank, -c_flank, 0.0, 0.0, 0.0] },
            // -c (x)(W - x), W = R/2
            LocalPoly { coeffs: [0.0, -c_core * half, c_core, 0.0, 0.0, 0.0] },
            // -c (x + W/2)(W/2 - x) = -c (W²/4 - x²)
            LocalPoly { coeffs: [-c_core * half * half / 4.0, 0.0, c_core, 0.0, 0.0, 0.0] },
            LocalPoly { coeffs: [0.0, c_flank * flank, -c_flank, 0.0, 0.0, 0.0] },
        ];

        let integrate = |scale: f64, restart_at_peak: bool| {
            let mut pieces = [BumpPiece {
                left: 0.0,
                right: 0.0,
                value: LocalPoly::ZERO,
                slope: LocalPoly::ZERO,
                curvature: LocalPoly::ZERO,
            }; 4];
            let (mut h0, mut dh0) = (0.0, 0.0);
            for k in 0..4 {
                if k == 2 && restart_at_peak {
                    // Exact peak data, so h(R/2) = 1 and h'(R/2) = 0 with no rounding.
                    h0 = 1.0;
                    dh0 = 0.0;
                }
                let (left, right) = (breaks[k], breaks[k + 1]);
                let curvature = curvatures[k].scaled(scale);
                let slope = curvature.integral(dh0);
                let value = slope.integral(h0);
                pieces[k] = BumpPiece { left, right, value, slope, curvature };
                h0 = value.eval(right - left);
                dh0 = slope.eval(right - left);
            }
            pieces
        };
        let unscaled = integrate(1.0, false);
        let peak = unscaled[2].value.coeffs[0];
        let raw = integrate(1.0 / peak, true);

        let max_slope = raw[0].slope.eval(flank);
        let min_slope = raw[2].slope.eval(radius / 4.0);
        Ok(BumpProfile { radius, delta, pieces: raw, max_slope, min_slope })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn pieces(&self) -> &[BumpPiece; 4] {
        &self.pieces
    }

    /// Breakpoints `δ, R/4, R/2, 3R/4, R-δ`.
    pub fn breakpoints(&self) -> [f64; 5] {
        let r = self.radius;
        [self.delta, r / 4.0, r / 2.0, 3.0 * r / 4.0, r - self.delta]
    }

    /// `h'(R/4)`, the largest slope.
    pub fn max_slope(&self) -> f64 {
        self.max_slope
    }

    /// `h'(3R/4)`, the most negative slope.
    pub fn min_slope(&self) -> f64 {
        self.min_slope
    }

    /// Largest `|h'|`.
    pub fn max_abs_slope(&self) -> f64 {
        self.max_slope.max(-self.min_slope)
    }

    fn piece_at(&self, s: f64) -> Option<&BumpPiece> {
        if s < self.delta || s >= self.radius - self.delta {
            return None;
        }
        self.pieces.iter().find(|p| s < p.right)
    }

    /// `h^{(order)}(s)` for order 0, 1 or 2; zero outside the support.
    pub fn eval(&self, s: f64, order: usize) -> f64 {
        match self.piece_at(s) {
            None => 0.0,
            Some(piece) => {
                let x = s - piece.left;
                match order {
                    0 => piece.value.eval(x),
                    1 => piece.slope.eval(x),
                    2 => piece.curvature.eval(x),
                    _ => panic!("derivative order {order} not supported"),
                }
            }
        }
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

    /// The three intervals on which `h'` is monotone, with the sign of `h''` there.
    pub(crate) fn monotone_slope_pieces(&self) -> [(f64, f64, f64); 3] {
        let [d, q1, _, q3, e] = self.breakpoints();
        [(d, q1, 1.0), (q1, q3, -1.0), (q3, e, 1.0)]
    }
}
