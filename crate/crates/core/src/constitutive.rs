//! Constitutive laws, flux functions, entropy pair, and the admissible-jump
//! solver fixing the end states that every other module consumes.
//!
//! Working variables are density u and momentum v. The stationary-jump flux
//! is F(u, v) = v^2/u + P(u); for fixed v > 0 it is strictly convex in u with
//! a single minimum at the sonic density, so a flux level above the minimum
//! selects exactly two conjugate densities.

use crate::error::{Error, Result};
use crate::numerics::roots;

/// Power-law pressure and viscosity:
/// P(u) = kappa_p u^(alpha+1)/(alpha+1), nu(u) = c_nu u^beta.
///
/// `reference_density` is the base point of the viscous potential integral
/// G(u, v) = v * int_{u_ref}^{u} nu(s)/s^2 ds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluidModel {
    pub pressure_exponent: f64,
    pub pressure_coeff: f64,
    pub viscosity_exponent: f64,
    pub viscosity_coeff: f64,
    pub reference_density: f64,
}

impl FluidModel {
    /// The configuration used throughout the worked examples: alpha = beta =
    /// 1, unit coefficients, unit reference density.
    pub fn reference() -> Self {
        FluidModel {
            pressure_exponent: 1.0,
            pressure_coeff: 1.0,
            viscosity_exponent: 1.0,
            viscosity_coeff: 1.0,
            reference_density: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pressure_exponent > 0.0) {
            return Err(Error::domain("alpha", "pressure exponent must be > 0"));
        }
        if !(self.pressure_coeff > 0.0) {
            return Err(Error::domain("kappa_p", "pressure coefficient must be > 0"));
        }
        if !(self.viscosity_exponent >= 0.0) {
            return Err(Error::domain("beta", "viscosity exponent must be >= 0"));
        }
        if !(self.viscosity_coeff > 0.0) {
            return Err(Error::domain("c_nu", "viscosity coefficient must be > 0"));
        }
        if !(self.reference_density > 0.0) {
            return Err(Error::domain("u_ref", "reference density must be > 0"));
        }
        Ok(())
    }

    fn check_u(u: f64) -> Result<()> {
        if u > 0.0 {
            Ok(())
        } else {
            Err(Error::domain("u", format!("density must be positive, got {u}")))
        }
    }

    pub fn pressure(&self, u: f64) -> f64 {
        self.pressure_coeff * u.powf(self.pressure_exponent + 1.0) / (self.pressure_exponent + 1.0)
    }

    pub fn dpressure(&self, u: f64) -> f64 {
        self.pressure_coeff * u.powf(self.pressure_exponent)
    }

    pub fn d2pressure(&self, u: f64) -> f64 {
        self.pressure_coeff * self.pressure_exponent * u.powf(self.pressure_exponent - 1.0)
    }

    pub fn viscosity(&self, u: f64) -> f64 {
        self.viscosity_coeff * u.powf(self.viscosity_exponent)
    }

    pub fn dviscosity(&self, u: f64) -> f64 {
        self.viscosity_coeff * self.viscosity_exponent * u.powf(self.viscosity_exponent - 1.0)
    }

    /// F(u, v) = v^2/u + P(u) with its first two u-derivatives.
    pub fn flux(&self, u: f64, v: f64) -> Result<(f64, f64, f64)> {
        Self::check_u(u)?;
        let f = v * v / u + self.pressure(u);
        let fu = -v * v / (u * u) + self.dpressure(u);
        let fuu = 2.0 * v * v / (u * u * u) + self.d2pressure(u);
        Ok((f, fu, fuu))
    }

    pub fn flux_value(&self, u: f64, v: f64) -> f64 {
        v * v / u + self.pressure(u)
    }

    pub fn flux_u(&self, u: f64, v: f64) -> f64 {
        -v * v / (u * u) + self.dpressure(u)
    }

    pub fn flux_v(&self, u: f64, v: f64) -> f64 {
        2.0 * v / u
    }

    /// F(u0 + du, v) - F(u0, v) without cancellation for small |du|.
    ///
    /// The kinetic part telescopes exactly; the pressure part goes through
    /// expm1(ln1p(.)) so the result keeps full relative accuracy down to
    /// |du| ~ 1e-300.
    pub fn flux_diff_from(&self, u0: f64, du: f64, v: f64) -> f64 {
        let kinetic = -v * v * du / (u0 * (u0 + du));
        let ap1 = self.pressure_exponent + 1.0;
        let pressure =
            self.pressure_coeff * u0.powf(ap1) / ap1 * (ap1 * (du / u0).ln_1p()).exp_m1();
        kinetic + pressure
    }

    /// Slope of the viscous potential: dG/du = v nu(u)/u^2.
    pub fn dg_du(&self, u: f64, v: f64) -> Result<f64> {
        Self::check_u(u)?;
        Ok(v * self.viscosity(u) / (u * u))
    }

    /// G(u, v) = v int_{u_ref}^u nu(s)/s^2 ds in closed form.
    pub fn g_potential(&self, u: f64, v: f64) -> Result<f64> {
        Self::check_u(u)?;
        let bm1 = self.viscosity_exponent - 1.0;
        let i = if bm1.abs() < 1e-12 {
            (u / self.reference_density).ln()
        } else {
            (u.powf(bm1) - self.reference_density.powf(bm1)) / bm1
        };
        Ok(v * self.viscosity_coeff * i)
    }

    pub fn d2g_duu(&self, u: f64, v: f64) -> f64 {
        v * self.viscosity_coeff * (self.viscosity_exponent - 2.0)
            * u.powf(self.viscosity_exponent - 3.0)
    }

    pub fn d2g_dudv(&self, u: f64) -> f64 {
        self.viscosity(u) / (u * u)
    }

    /// Pi'(u) from the entropy pair, Pi'' = P'/u. Closed form needs alpha > 0.
    pub fn pi_prime(&self, u: f64) -> f64 {
        self.pressure_coeff * u.powf(self.pressure_exponent) / self.pressure_exponent
    }

    pub fn pi_value(&self, u: f64) -> f64 {
        let ap1 = self.pressure_exponent + 1.0;
        self.pressure_coeff * u.powf(ap1) / (self.pressure_exponent * ap1)
    }

    /// Entropy density E(u, v) = v^2/(2u) + Pi(u).
    pub fn entropy(&self, u: f64, v: f64) -> f64 {
        v * v / (2.0 * u) + self.pi_value(u)
    }

    /// Entropy flux Q(u, v) = v^3/(2u^2) + Pi'(u) v.
    pub fn entropy_flux(&self, u: f64, v: f64) -> f64 {
        v.powi(3) / (2.0 * u * u) + self.pi_prime(u) * v
    }

    /// Lambda(u, v) = v^2/u^2 + 2 Pi'(u); the jump is admissible iff Lambda
    /// does not increase across it.
    pub fn entropy_lambda(&self, u: f64, v: f64) -> f64 {
        (v / u) * (v / u) + 2.0 * self.pi_prime(u)
    }

    /// Closed-form sonic density: the root of P'(u) u^2 = v^2, where
    /// F(., v) attains its minimum.
    pub fn sonic_density(&self, v_star: f64) -> Result<f64> {
        if !(v_star > 0.0) {
            return Err(Error::domain("v_star", "momentum must be positive"));
        }
        Ok((v_star * v_star / self.pressure_coeff).powf(1.0 / (self.pressure_exponent + 2.0)))
    }

    /// min_u F(u, v) over u > 0. Continuous down to v = 0 where it equals
    /// P(0) = 0 for power laws.
    pub fn min_flux(&self, v_star: f64) -> Result<f64> {
        if v_star < 0.0 {
            return Err(Error::domain("v_star", "momentum must be nonnegative"));
        }
        if v_star == 0.0 {
            return Ok(0.0);
        }
        let a = self.pressure_exponent;
        Ok((a + 2.0) / (a + 1.0)
            * self.pressure_coeff.powf(1.0 / (a + 2.0))
            * v_star.powf(2.0 * (a + 1.0) / (a + 2.0)))
    }

    /// The two densities with F(u, v*) = level, bisected on the monotone
    /// branches either side of the sonic minimum.
    pub fn conjugate_states(&self, v_star: f64, level: f64) -> Result<(f64, f64)> {
        let u_sonic = self.sonic_density(v_star)?;
        let f_min = self.min_flux(v_star)?;
        if level < f_min {
            return Err(Error::NoJump(format!(
                "flux level {level} below the minimum {f_min} of F(., {v_star})"
            )));
        }
        if level - f_min <= 1e-12 * f_min.abs().max(1.0) {
            return Err(Error::DegenerateJump(format!(
                "flux level {level} within tolerance of the minimum {f_min}; roots coincide at {u_sonic}"
            )));
        }
        let g = |u: f64| self.flux_value(u, v_star) - level;
        let mut u_lo = 0.5 * u_sonic;
        while g(u_lo) <= 0.0 {
            u_lo *= 0.5;
            if u_lo < 1e-300 {
                return Err(Error::NoJump("left branch never exceeds the level".into()));
            }
        }
        let mut u_hi = 2.0 * u_sonic;
        while g(u_hi) <= 0.0 {
            u_hi *= 2.0;
            if u_hi > 1e300 {
                return Err(Error::NoJump("right branch never exceeds the level".into()));
            }
        }
        let u_minus = roots::bisect(g, u_lo, u_sonic, 1e-13 * u_sonic, "conjugate left")?;
        let u_plus = roots::bisect(g, u_sonic, u_hi, 1e-13 * u_hi, "conjugate right")?;
        Ok((u_minus, u_plus))
    }

    /// Lambda(u_minus) - Lambda(u_plus); nonnegative iff the jump from
    /// u_minus up to u_plus is admissible.
    pub fn entropy_gap(&self, u_minus: f64, u_plus: f64, v_star: f64) -> f64 {
        self.entropy_lambda(u_minus, v_star) - self.entropy_lambda(u_plus, v_star)
    }
}

/// End states of a stationary admissible jump, with the derived quantities
/// the layer machinery keeps asking for.
#[derive(Clone, Copy, Debug)]
pub struct ShockData {
    pub v_star: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    pub u_sonic: f64,
    pub w_minus: f64,
    pub w_plus: f64,
    /// Common flux level K = F(u_minus, v*) = F(u_plus, v*).
    pub flux_level: f64,
}

impl ShockData {
    /// Builds the jump from the subsonic-side density. Requires
    /// u_minus strictly below the sonic density so the conjugate state
    /// exists above it.
    pub fn from_left_density(model: &FluidModel, v_star: f64, u_minus: f64) -> Result<Self> {
        model.validate()?;
        if !(u_minus > 0.0) {
            return Err(Error::domain("u_minus", "density must be positive"));
        }
        let u_sonic = model.sonic_density(v_star)?;
        if u_minus >= u_sonic {
            return Err(Error::NoJump(format!(
                "u_minus = {u_minus} is not below the sonic density {u_sonic}; \
                 no admissible upward jump exists"
            )));
        }
        let level = model.flux_value(u_minus, v_star);
        let (u_minus_check, u_plus) = model.conjugate_states(v_star, level)?;
        // replace the bisected left root with the exact input
        debug_assert!((u_minus_check - u_minus).abs() <= 1e-9 * u_minus);
        Ok(ShockData {
            v_star,
            u_minus,
            u_plus,
            u_sonic,
            w_minus: v_star / u_minus,
            w_plus: v_star / u_plus,
            flux_level: level,
        })
    }

    pub fn from_flux_level(model: &FluidModel, v_star: f64, level: f64) -> Result<Self> {
        model.validate()?;
        let (u_minus, u_plus) = model.conjugate_states(v_star, level)?;
        Ok(ShockData {
            v_star,
            u_minus,
            u_plus,
            u_sonic: model.sonic_density(v_star)?,
            w_minus: v_star / u_minus,
            w_plus: v_star / u_plus,
            flux_level: level,
        })
    }

    pub fn jump(&self) -> f64 {
        self.u_plus - self.u_minus
    }
}

/// Extension point for smooth non-power-law constitutive pairs. Default
/// methods locate the sonic state and flux minimum numerically, so a law only
/// supplies pointwise values and derivatives.
pub trait ConstitutiveLaw {
    fn pressure(&self, u: f64) -> f64;
    fn dpressure(&self, u: f64) -> f64;
    fn viscosity(&self, u: f64) -> f64;

    fn flux_value(&self, u: f64, v: f64) -> f64 {
        v * v / u + self.pressure(u)
    }

    /// Root of P'(u) u^2 = v^2 by bracketed bisection.
    fn sonic_density_numeric(&self, v_star: f64) -> Result<f64> {
        if !(v_star > 0.0) {
            return Err(Error::domain("v_star", "momentum must be positive"));
        }
        let g = |u: f64| self.dpressure(u) * u * u - v_star * v_star;
        let mut lo = 1.0f64;
        while g(lo) >= 0.0 {
            lo *= 0.5;
            if lo < 1e-280 {
                return Err(Error::NoJump("sonic bracket collapsed at zero".into()));
            }
        }
        let mut hi = 1.0f64;
        while g(hi) <= 0.0 {
            hi *= 2.0;
            if hi > 1e280 {
                return Err(Error::NoJump("sonic bracket unbounded".into()));
            }
        }
        roots::bisect(g, lo, hi, 1e-14 * hi, "sonic density")
    }

    fn min_flux_numeric(&self, v_star: f64) -> Result<f64> {
        let u = self.sonic_density_numeric(v_star)?;
        Ok(self.flux_value(u, v_star))
    }
}

impl ConstitutiveLaw for FluidModel {
    fn pressure(&self, u: f64) -> f64 {
        FluidModel::pressure(self, u)
    }
    fn dpressure(&self, u: f64) -> f64 {
        FluidModel::dpressure(self, u)
    }
    fn viscosity(&self, u: f64) -> f64 {
        FluidModel::viscosity(self, u)
    }
}
