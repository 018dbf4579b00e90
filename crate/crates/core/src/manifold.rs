//! Matched steady-state family for the viscous flow system.
//!
//! For a fixed layer position xi the construction glues two steady solutions
//! of the momentum balance at the sonic state: on each side of xi the total
//! flux F(u, v*) + eps dG/du(u, v*) u' is spatially constant, equal to
//! kappa_minus left of xi and kappa_plus right of it. The levels are pinned
//! by requiring the density to reach u_minus and u_plus exactly at the walls,
//! which forces kappa_pm - F(u_pm, v*) to be positive and exponentially small
//! in (ell -+ xi)/eps. The family is indexed by xi; its defect under the full
//! dynamics is the flux jump kappa_plus - kappa_minus concentrated at the
//! matching point, and the position where the jump vanishes is the unique
//! steady layer.

use crate::constitutive::{FluidModel, ShockData};
use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate;
use crate::numerics::roots::bisect;
use crate::numerics::{integrate_nodes, log_add_exp, OdeOptions, SignedLog};

/// Spatial extent and resolution of the computational interval [-ell, ell].
#[derive(Clone, Copy, Debug)]
pub struct DomainSpec {
    pub ell: f64,
    pub epsilon: f64,
    pub n_cells: usize,
}

impl DomainSpec {
    pub fn new(ell: f64, epsilon: f64, n_cells: usize) -> Result<Self> {
        let spec = DomainSpec { ell, epsilon, n_cells };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ell > 0.0 && self.ell.is_finite()) {
            return Err(Error::domain("ell", "half-length must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::domain("epsilon", "viscosity scale must be positive"));
        }
        if self.n_cells < 16 {
            return Err(Error::domain("n_cells", "need at least 16 cells"));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.ell / self.n_cells as f64
    }

    /// n_cells + 1 equally spaced nodes from -ell to ell inclusive.
    pub fn nodes(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..=self.n_cells).map(|i| -self.ell + i as f64 * dx).collect()
    }

    /// n_cells midpoints, the finite-volume sample points.
    pub fn cell_centers(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_cells)
            .map(|i| -self.ell + (i as f64 + 0.5) * dx)
            .collect()
    }
}

/// Side flux levels for one layer position. The offsets h_pm = kappa_pm - K
/// (K the common inviscid level) are kept in log form because they sit far
/// below f64 range for small epsilon; kappa_minus/kappa_plus are the rounded
/// f64 levels, which collapse onto K once h drops under one ulp.
#[derive(Clone, Copy, Debug)]
pub struct FluxLevels {
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    pub h_minus: SignedLog,
    pub h_plus: SignedLog,
}

/// One member of the approximate invariant family: the glued profile at a
/// given xi, sampled on a grid. V is constant v* throughout; du holds the
/// one-sided spatial derivative of U at each sample (right-sided at x = xi).
#[derive(Clone, Debug)]
pub struct ManifoldPoint {
    pub xi: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    pub h_minus: SignedLog,
    pub h_plus: SignedLog,
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub du: Vec<f64>,
}

// Per-side geometry needed by the quadrature and root solves.
struct SideGeom {
    // +1 if the interval toward the sonic state lies above u_end, else -1
    sgn_in: f64,
    span: f64,
    dfu_abs: f64,
    dgu: f64,
}

impl SideGeom {
    fn new(u_end: f64, shock: &ShockData, model: &FluidModel) -> Self {
        let sgn_in = if u_end < shock.u_sonic { 1.0 } else { -1.0 };
        SideGeom {
            sgn_in,
            span: (shock.u_sonic - u_end).abs(),
            dfu_abs: model.flux_u(u_end, shock.v_star).abs(),
            dgu: model.dg_du(u_end, shock.v_star).unwrap_or(f64::NAN),
        }
    }

    /// Exponential decay rate |dF/dG| at the end state: the profile relaxes
    /// to its plateau like exp(-rate |x|/eps), and h shrinks at the same rate
    /// in the wall distance.
    fn rate(&self) -> f64 {
        self.dfu_abs / self.dgu
    }
}

// Below this offset the flux difference F(u_end + d) - F(u_end) underflows
// in parts; switch to the exact leading term |dF| d, whose relative error
// O(d) is far below anything observable.
const LINEAR_TAIL: f64 = 1e-250;

/// |Gamma(u, K + e^ln_h)| where the integration path runs from the sonic
/// density to `u`. `kappa` is the f64 level used away from the path end;
/// `ln_h` carries the exact end offset so that exponentially small levels
/// survive. The simple pole at the end is absorbed by s = u -+ e^{-tau}.
fn gamma_abs(
    u: f64,
    kappa: f64,
    ln_h: f64,
    shock: &ShockData,
    model: &FluidModel,
) -> Result<f64> {
    let v = shock.v_star;
    let us = shock.u_sonic;
    if u == us {
        return Ok(0.0);
    }
    let geom = SideGeom::new(u, shock, model);
    let delta0 = 0.1 * geom.span;
    let s_stop = u + geom.sgn_in * delta0;

    // interior part, plain level arithmetic is accurate here
    if kappa - model.flux_value(s_stop, v) <= 0.0 || kappa - model.flux_value(us, v) <= 0.0 {
        return Err(Error::SingularIntegrand(format!(
            "flux level {kappa} does not stay above F on the path from {us} to {u}"
        )));
    }
    let regular = integrate(
        |s| v * model.viscosity(s) / (s * s) / (kappa - model.flux_value(s, v)),
        us,
        s_stop,
        1e-10,
        1e-12,
    )?
    .abs();

    // last stretch toward u: kappa - F(s) = h + (F(u) - F(s)), both parts in
    // logs so the integrand stays finite past f64 underflow of either one
    let integrand = |tau: f64| {
        let delta = (-tau).exp();
        let s = u + geom.sgn_in * delta;
        let ln_d = if delta > LINEAR_TAIL {
            let d = -model.flux_diff_from(u, geom.sgn_in * delta, v);
            if d > 0.0 {
                d.ln()
            } else {
                f64::NEG_INFINITY
            }
        } else {
            geom.dfu_abs.ln() - tau
        };
        v * model.viscosity(s) / (s * s) * (-tau - log_add_exp(ln_h, ln_d)).exp()
    };
    let tau0 = -delta0.ln();
    let roll = -ln_h; // past this tau the h term dominates and the tail dies
    let tau_max = roll.max(tau0) + 36.0;
    let endpoint = if roll > tau0 + 21.0 {
        integrate(integrand, tau0, roll - 20.0, 1e-10, 1e-12)?
            + integrate(integrand, roll - 20.0, tau_max, 1e-10, 1e-12)?
    } else {
        integrate(integrand, tau0, tau_max, 1e-10, 1e-12)?
    };
    Ok(regular + endpoint)
}

/// Gamma(u, kappa) = int_{u*}^{u} dG/du(s, v*) / (kappa - F(s, v*)) ds.
///
/// Increasing in kappa below the sonic density and decreasing above it;
/// Gamma(u*, .) = 0. The level must stay strictly above F along the path.
pub fn gamma_ns(u: f64, kappa: f64, shock: &ShockData, model: &FluidModel) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::domain("u", "density must be positive"));
    }
    let h = kappa - model.flux_value(u, shock.v_star);
    if !(h > 0.0) {
        return Err(Error::SingularIntegrand(format!(
            "kappa = {kappa} is not above F(u, v*) = {} at u = {u}",
            kappa - h
        )));
    }
    let mag = gamma_abs(u, kappa, h.ln(), shock, model)?;
    Ok(if u > shock.u_sonic { mag } else { -mag })
}

/// Gamma at a level given as an exact offset from F(u, v*). This is the form
/// the layer solves need: for small epsilon the offset h lies below f64
/// resolution of the level itself.
pub fn gamma_ns_log(
    u: f64,
    h: SignedLog,
    shock: &ShockData,
    model: &FluidModel,
) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::domain("u", "density must be positive"));
    }
    if h.is_zero() || h.sign < 0 {
        return Err(Error::SingularIntegrand(
            "level offset must be strictly positive".into(),
        ));
    }
    let kappa = model.flux_value(u, shock.v_star) + h.to_f64();
    let mag = gamma_abs(u, kappa, h.ln_abs, shock, model)?;
    Ok(if u > shock.u_sonic { mag } else { -mag })
}

/// Solves |Gamma(u_end, K + h)| = target for h, in lambda = ln h coordinates.
///
/// Gamma varies logarithmically in h, so the search starts at the fixed
/// relative offset 1e-3 K, doubles the lambda gap until the target is
/// overshot, then bisects.
fn solve_side(
    u_end: f64,
    target: f64,
    shock: &ShockData,
    model: &FluidModel,
) -> Result<SignedLog> {
    debug_assert!(target > 0.0);
    let kk = shock.flux_level;
    let eval = |lambda: f64| -> Result<f64> {
        let kappa = kk + lambda.exp(); // exp underflows to 0 harmlessly
        Ok(gamma_abs(u_end, kappa, lambda, shock, model)? - target)
    };
    let lambda0 = (1e-3 * kk).ln();
    let g0 = eval(lambda0)?;
    if g0 == 0.0 {
        return Ok(SignedLog::new(1, lambda0));
    }
    // expand away from lambda0 in the direction that shrinks |Gamma - target|
    let dir = if g0 > 0.0 { 1.0 } else { -1.0 };
    let mut gap = 1.0;
    let mut lo = lambda0;
    let mut hi = lambda0;
    let mut bracketed = false;
    for _ in 0..64 {
        let cand = lambda0 + dir * gap;
        if cand > 710.0 {
            break; // kappa overflow: Gamma(u, +inf) = 0 never reaches target
        }
        let g = eval(cand)?;
        if g == 0.0 {
            return Ok(SignedLog::new(1, cand));
        }
        if g.signum() != g0.signum() {
            if dir > 0.0 {
                lo = cand - gap / 2.0 + if gap > 1.5 { 0.0 } else { -1.0 };
                lo = lo.min(lambda0);
                hi = cand;
            } else {
                lo = cand;
                hi = lambda0;
            }
            bracketed = true;
            break;
        }
        if dir > 0.0 {
            lo = cand;
        } else {
            hi = cand;
        }
        gap *= 2.0;
    }
    if !bracketed {
        return Err(Error::RootBracket {
            what: "flux level offset",
            lo,
            hi,
        });
    }
    let xtol = 1e-10 * (1.0 + lo.abs().max(hi.abs()));
    let lambda = bisect(
        |l| match eval(l) {
            Ok(g) => g,
            Err(_) => f64::NAN,
        },
        lo,
        hi,
        xtol,
        "flux level offset",
    )?;
    Ok(SignedLog::new(1, lambda))
}

/// Side flux levels kappa_pm(xi): kappa_minus stretches the left branch over
/// the distance ell + xi, kappa_plus the right branch over ell - xi.
pub fn kappa_pm_ns(
    xi: f64,
    shock: &ShockData,
    model: &FluidModel,
    domain: &DomainSpec,
) -> Result<FluxLevels> {
    domain.validate()?;
    if !(xi > -domain.ell && xi < domain.ell) {
        return Err(Error::domain(
            "xi",
            format!("layer position must lie strictly inside (-{0}, {0})", domain.ell),
        ));
    }
    let h_minus = solve_side(
        shock.u_minus,
        (domain.ell + xi) / domain.epsilon,
        shock,
        model,
    )?;
    let h_plus = solve_side(
        shock.u_plus,
        (domain.ell - xi) / domain.epsilon,
        shock,
        model,
    )?;
    Ok(FluxLevels {
        kappa_minus: shock.flux_level + h_minus.to_f64(),
        kappa_plus: shock.flux_level + h_plus.to_f64(),
        h_minus,
        h_plus,
    })
}

/// Second component of the family's defect: kappa_plus - kappa_minus. The
/// first component vanishes identically (V is constant across the family).
pub fn residual_jump(
    xi: f64,
    shock: &ShockData,
    model: &FluidModel,
    domain: &DomainSpec,
) -> Result<SignedLog> {
    let levels = kappa_pm_ns(xi, shock, model, domain)?;
    Ok(levels.h_plus.sub(levels.h_minus))
}

/// Closed-form proxy for kappa_plus - kappa_minus built from the end-state
/// linearizations:
///
///   dF+ (u+ - u*) e^{-(dF+/dG+)(ell-xi)/eps} + dF- (u* - u-) e^{(dF-/dG-)(xi+ell)/eps}
///
/// with dF- < 0 < dF+, so both exponents are negative. The decay rates are
/// exact; the prefactors ignore the curvature of F between the sonic point
/// and the plateaus, which costs an xi- and eps-independent factor.
pub fn kappa_diff_asymptotic(
    xi: f64,
    shock: &ShockData,
    model: &FluidModel,
    domain: &DomainSpec,
) -> SignedLog {
    let minus = SideGeom::new(shock.u_minus, shock, model);
    let plus = SideGeom::new(shock.u_plus, shock, model);
    let ln_plus =
        (plus.dfu_abs * plus.span).ln() - plus.rate() * (domain.ell - xi) / domain.epsilon;
    let ln_minus =
        (minus.dfu_abs * minus.span).ln() - minus.rate() * (domain.ell + xi) / domain.epsilon;
    SignedLog::new(1, ln_plus).sub(SignedLog::new(1, ln_minus))
}

/// The unique layer position where the side levels match. Bisection runs on
/// ln h_plus - ln h_minus, which is increasing in xi; the search window keeps
/// 5 eps clear of each wall, where the glued-family description breaks down.
pub fn equilibrium_xi(
    shock: &ShockData,
    model: &FluidModel,
    domain: &DomainSpec,
) -> Result<f64> {
    domain.validate()?;
    let margin = 5.0 * domain.epsilon;
    let lo = -domain.ell + margin;
    let hi = domain.ell - margin;
    if !(lo < hi) {
        return Err(Error::domain(
            "epsilon",
            "wall margin 5 eps leaves no interior search window",
        ));
    }
    let gap = |xi: f64| -> f64 {
        match kappa_pm_ns(xi, shock, model, domain) {
            Ok(levels) => levels.h_plus.ln_abs - levels.h_minus.ln_abs,
            Err(_) => f64::NAN,
        }
    };
    bisect(gap, lo, hi, 1e-11, "equilibrium position")
}

const PROFILE_TOL: f64 = 1e-7;

/// Integrates the side profiles on an ascending sample grid. Returns density
/// samples and the one-sided derivative at each sample.
///
/// The right-hand side is written as (h + F(u_end) - F(u)) / (eps dG/du),
/// never as kappa - F directly: near the plateau the subtraction would leave
/// pure rounding noise, while this form decays smoothly to an exact zero at
/// u_end. Step growth near the plateau is the integrator coasting on a flat
/// field, not a failure.
pub fn profile_samples(
    xi: f64,
    levels: &FluxLevels,
    shock: &ShockData,
    model: &FluidModel,
    epsilon: f64,
    xs: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if xs.len() < 2 || xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("xs", "samples must be strictly ascending"));
    }
    let v = shock.v_star;
    let mut u_out = vec![f64::NAN; xs.len()];
    let mut du_out = vec![f64::NAN; xs.len()];

    let rhs_at = |u_end: f64, h64: f64, u: f64| -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::Positivity(format!(
                "profile density hit {u} while integrating the layer shape"
            )));
        }
        let defect = h64 - model.flux_diff_from(u_end, u - u_end, v);
        Ok(defect / (epsilon * v * model.viscosity(u) / (u * u)))
    };
    let opts = OdeOptions {
        rel_tol: 1e-9,
        abs_tol: 1e-12,
        ..OdeOptions::default()
    };

    // indices strictly right and strictly left of xi; exact hits get the
    // matching value directly
    for (i, &x) in xs.iter().enumerate() {
        if x == xi {
            u_out[i] = shock.u_sonic;
            du_out[i] = rhs_at(shock.u_plus, levels.h_plus.to_f64(), shock.u_sonic)?;
        }
    }
    let mut sweep = |u_end: f64, h: SignedLog, idx: Vec<usize>| -> Result<()> {
        if idx.is_empty() {
            return Ok(());
        }
        let h64 = h.to_f64();
        let mut nodes = vec![xi];
        nodes.extend(idx.iter().map(|&i| xs[i]));
        let sol = integrate_nodes(
            |_x, y, dy| {
                dy[0] = rhs_at(u_end, h64, y[0])?;
                Ok(())
            },
            &[shock.u_sonic],
            &nodes,
            &opts,
            None,
        )?;
        for (k, &i) in idx.iter().enumerate() {
            let u = sol.ys[k + 1][0];
            u_out[i] = u;
            du_out[i] = rhs_at(u_end, h64, u)?;
        }
        Ok(())
    };
    let right: Vec<usize> = (0..xs.len()).filter(|&i| xs[i] > xi).collect();
    sweep(shock.u_plus, levels.h_plus, right)?;
    let mut left: Vec<usize> = (0..xs.len()).filter(|&i| xs[i] < xi).collect();
    left.reverse();
    sweep(shock.u_minus, levels.h_minus, left)?;
    Ok((u_out, du_out))
}

/// Builds the glued profile at xi on the node grid of `domain`.
pub fn build_profile(
    xi: f64,
    shock: &ShockData,
    model: &FluidModel,
    domain: &DomainSpec,
) -> Result<ManifoldPoint> {
    let levels = kappa_pm_ns(xi, shock, model, domain)?;
    let grid = domain.nodes();
    let (u, du) = profile_samples(xi, &levels, shock, model, domain.epsilon, &grid)?;
    let left_miss = (u[0] - shock.u_minus).abs();
    let right_miss = (u[u.len() - 1] - shock.u_plus).abs();
    if left_miss > PROFILE_TOL || right_miss > PROFILE_TOL {
        return Err(Error::Resolution(format!(
            "profile misses its wall states by {left_miss:.2e} / {right_miss:.2e}; \
             the level solve and the shape integration disagree"
        )));
    }
    let v = vec![shock.v_star; u.len()];
    Ok(ManifoldPoint {
        xi,
        kappa_minus: levels.kappa_minus,
        kappa_plus: levels.kappa_plus,
        h_minus: levels.h_minus,
        h_plus: levels.h_plus,
        grid,
        u,
        v,
        du,
    })
}
