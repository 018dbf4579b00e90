//! Viscous Burgers specialization: the exactly solvable twin of the layer
//! pipeline.
//!
//! Steady states on each side of the layer at xi are explicit tanh profiles,
//! so the flux levels kappa_pm, the residual, and the slow layer velocity all
//! have closed forms. Everything here is used as the oracle for the generic
//! machinery (manifold construction, reduced integration, full PDE runs).
//!
//! Two independent routes to kappa are kept deliberately: a safeguarded
//! Newton solve of the transcendental level condition in kappa itself, and an
//! inversion in the variable delta = sqrt(2 kappa) - w_bar, which stays
//! accurate when kappa - w_bar^2/2 is far below f64 resolution. Differences
//! of kappa values are always assembled from the latter.

use crate::error::{Error, Result};
use crate::numerics::roots;
use crate::numerics::signed_log::{ln_expm1, SignedLog};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurgersSetup {
    /// Boundary amplitude: w(-ell) = w_bar, w(+ell) = -w_bar.
    pub w_bar: f64,
    pub ell: f64,
    pub epsilon: f64,
}

impl BurgersSetup {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_bar > 0.0) {
            return Err(Error::domain("w_bar", "boundary amplitude must be > 0"));
        }
        if !(self.ell > 0.0) {
            return Err(Error::domain("ell", "half-length must be > 0"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::domain("epsilon", "viscosity must be > 0"));
        }
        Ok(())
    }

    /// Distances from xi to the boundary controlling each side:
    /// (ell + xi) for the left level, (ell - xi) for the right one.
    fn side_distances(&self, xi: f64) -> Result<(f64, f64)> {
        if !(xi > -self.ell && xi < self.ell) {
            return Err(Error::domain(
                "xi",
                format!("layer position {xi} outside (-{0}, {0})", self.ell),
            ));
        }
        Ok((self.ell + xi, self.ell - xi))
    }

    /// Level for one side by safeguarded Newton on
    /// g(kappa) = sqrt(2 kappa) tanh(d sqrt(kappa/2)/eps) - w_bar,
    /// started from the coth^2 approximation.
    fn kappa_side_root(&self, d: f64) -> Result<f64> {
        let w = self.w_bar;
        let theta = d / self.epsilon;
        if theta * w > 30.0 {
            // correction terms beyond 2 w^2 e^{-theta w} are O(theta e^{-theta w})
            // relative, far below the f64 ulp of kappa here, and Newton in
            // kappa has no sign change left to bracket; the h-route carries
            // the full-precision offset in log space
            return Ok(0.5 * w * w + 2.0 * w * w * (-theta * w).exp());
        }
        let g = |k: f64| {
            let s = (2.0 * k).sqrt();
            let y = 0.5 * theta * s;
            let t = y.tanh();
            let val = s * t - w;
            let sech2 = 1.0 - t * t;
            let deriv = t / s + 0.5 * theta * sech2;
            (val, deriv)
        };
        let coth = 1.0 / (0.5 * theta * w).tanh();
        let k0 = 0.5 * w * w * coth * coth;
        let lo = 0.5 * w * w * (1.0 + 1e-15);
        let mut hi = 2.0 * k0.max(lo);
        while g(hi).0 <= 0.0 {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::RootBracket {
                    what: "burgers kappa",
                    lo,
                    hi,
                });
            }
        }
        roots::newton_safeguarded(g, lo, hi, k0, 1e-15, 0.0, "burgers kappa")
    }

    /// Level offset h = kappa - w_bar^2/2 for one side, exact in log space.
    ///
    /// With s = sqrt(2 kappa) and delta = s - w_bar, the level condition is
    /// delta = 2 w_bar / (e^{theta (w_bar + delta)} - 1), theta = d/eps,
    /// solved by Newton in t = ln delta; then h = delta (w_bar + delta/2).
    pub fn h_side(&self, d: f64) -> Result<SignedLog> {
        let w = self.w_bar;
        let theta = d / self.epsilon;
        if !(theta > 0.0) {
            return Err(Error::domain("xi", "layer sits on the boundary"));
        }
        let big_g = |t: f64| {
            let delta = t.exp();
            let y = theta * (w + delta);
            let val = t + ln_expm1(y) - (2.0 * w).ln();
            let deriv = 1.0 + theta * delta / (-(-y).exp_m1());
            (val, deriv)
        };
        let t0 = (2.0 * w).ln() - theta * w;
        let mut lo = t0 - 2.0;
        let mut step = 2.0;
        while big_g(lo).0 >= 0.0 {
            step *= 2.0;
            lo -= step;
            if step > 1e6 {
                return Err(Error::RootBracket {
                    what: "burgers delta (low)",
                    lo,
                    hi: t0,
                });
            }
        }
        let mut hi = t0 + 2.0;
        step = 2.0;
        while big_g(hi).0 <= 0.0 {
            step *= 2.0;
            hi += step;
            if step > 1e6 {
                return Err(Error::RootBracket {
                    what: "burgers delta (high)",
                    lo,
                    hi,
                });
            }
        }
        let t = roots::newton_safeguarded(big_g, lo, hi, t0, 1e-14, 0.0, "burgers delta")?;
        let delta = t.exp();
        Ok(SignedLog::new(1, t + (w + 0.5 * delta).ln()))
    }

    /// Both side levels as plain f64 (root-found route).
    pub fn kappa_pm(&self, xi: f64) -> Result<(f64, f64)> {
        let (d_minus, d_plus) = self.side_distances(xi)?;
        Ok((
            self.kappa_side_root(d_minus)?,
            self.kappa_side_root(d_plus)?,
        ))
    }

    /// Both side level offsets h_pm = kappa_pm - w_bar^2/2 (inversion route).
    pub fn h_pm(&self, xi: f64) -> Result<(SignedLog, SignedLog)> {
        let (d_minus, d_plus) = self.side_distances(xi)?;
        Ok((self.h_side(d_minus)?, self.h_side(d_plus)?))
    }

    /// Layer velocity (kappa_minus - kappa_plus)/(2 w_bar), assembled from
    /// the h values so the exponentially small difference survives.
    pub fn rhs_exact(&self, xi: f64) -> Result<SignedLog> {
        let (h_minus, h_plus) = self.h_pm(xi)?;
        Ok(h_minus
            .sub(h_plus)
            .div(SignedLog::from_f64(2.0 * self.w_bar)))
    }

    /// Leading-order layer velocity
    /// w_bar (e^{-w_bar (ell+xi)/eps} - e^{-w_bar (ell-xi)/eps}).
    pub fn rhs_asymptotic(&self, xi: f64) -> Result<SignedLog> {
        let (d_minus, d_plus) = self.side_distances(xi)?;
        let w = self.w_bar;
        let left = SignedLog::new(1, -w * d_minus / self.epsilon);
        let right = SignedLog::new(1, -w * d_plus / self.epsilon);
        Ok(left.sub(right).mul(SignedLog::from_f64(w)))
    }

    /// Matched profile W(x; xi): the steady state with level kappa_minus left
    /// of xi and kappa_plus right of it, zero at xi.
    pub fn profile(&self, x: f64, xi: f64) -> Result<f64> {
        let (km, kp) = self.kappa_pm(xi)?;
        let kappa = if x <= xi { km } else { kp };
        Ok(profile_side(kappa, xi - x, self.epsilon))
    }

    /// d/dx of the matched profile (analytic).
    pub fn profile_slope(&self, x: f64, xi: f64) -> Result<f64> {
        let (km, kp) = self.kappa_pm(xi)?;
        let kappa = if x <= xi { km } else { kp };
        let y = (0.5 * kappa).sqrt() * (xi - x) / self.epsilon;
        let sech2 = {
            let t = y.tanh();
            1.0 - t * t
        };
        Ok(-kappa / self.epsilon * sech2)
    }
}

/// W for one side: sqrt(2 kappa) tanh(sqrt(kappa/2) (xi - x)/eps).
pub fn profile_side(kappa: f64, xi_minus_x: f64, epsilon: f64) -> f64 {
    (2.0 * kappa).sqrt() * ((0.5 * kappa).sqrt() * xi_minus_x / epsilon).tanh()
}

/// Gamma(w, kappa) = integral of 1/(kappa - s^2/2) from 0 to w, in closed
/// form. Defined for kappa > w^2/2.
pub fn gamma_burgers(w: f64, kappa: f64) -> Result<f64> {
    if !(kappa > 0.5 * w * w) {
        return Err(Error::domain(
            "kappa",
            format!("level {kappa} must exceed w^2/2 = {}", 0.5 * w * w),
        ));
    }
    let s = (2.0 * kappa).sqrt();
    Ok(2.0 / s * (w / s).atanh())
}
