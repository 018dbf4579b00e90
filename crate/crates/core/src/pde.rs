//! Finite-volume solver for the full density/momentum system and its viscous
//! Burgers twin, with transition-layer tracking.
//!
//! One step is an explicit conservative flux update (central face average or
//! local Lax-Friedrichs) followed by an implicit tridiagonal solve of the
//! viscous term in the velocity w = v/u, with the density frozen at its
//! post-update value. The splitting removes the eps/dx^2 stiffness while the
//! step size follows the advective CFL bound; the density equation carries no
//! viscous term, so mass is conserved to rounding by the telescoping fluxes.
//!
//! Walls enter through ghost cells. The left plateau is supersonic inflow
//! (dF/du < 0 there), so both characteristics enter and the left wall pins
//! density and momentum; the right plateau is subsonic outflow with a single
//! incoming characteristic, so the right wall pins only the velocity and the
//! density floats. The implicit solve additionally holds w at its wall
//! values, which is the parabolic share of the same data.
//!
//! The density equation carries no viscous term of its own, and the implicit
//! solve slaves the momentum back to the density, so pure central fluxes
//! would leave the density transport undamped under forward Euler. The
//! central option therefore adds an upwind correction on the density flux
//! alone, with the transport speed |w| as its coefficient: the sound speed
//! exceeds |w| at every admissible state, which makes that correction
//! sufficient for any CFL number below one while adding less smearing than
//! full local Lax-Friedrichs dissipation. The resolution check bounds both
//! kinds of numerical viscosity against the physical one.

use crate::burgers::BurgersSetup;
use crate::constitutive::{FluidModel, ShockData};
use crate::error::{Error, Result};
use crate::manifold::{kappa_pm_ns, profile_samples, DomainSpec, ManifoldPoint};
use crate::numerics::tridiag;
use crate::reduced::{SourceTag, StopReason, Trajectory};

/// Face flux treatment for the explicit update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluxScheme {
    /// Face averages plus an upwind correction 0.5 |w| (u_R - u_L) on the
    /// density flux only; the momentum flux stays second order. The default
    /// for viscosity-resolved layers.
    Central,
    /// Local Lax-Friedrichs: adds 0.5 a (q_R - q_L) on both fluxes with the
    /// local wave speed a; robust but first order at the layer.
    LocalLaxFriedrichs,
}

impl FluxScheme {
    pub fn label(self) -> &'static str {
        match self {
            FluxScheme::Central => "central",
            FluxScheme::LocalLaxFriedrichs => "llf",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "central" => Ok(FluxScheme::Central),
            "llf" => Ok(FluxScheme::LocalLaxFriedrichs),
            other => Err(Error::domain(
                "flux",
                format!("unknown flux scheme '{other}' (want central|llf)"),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SchemeConfig {
    pub cfl: f64,
    pub flux: FluxScheme,
    /// Number of trajectory sample intervals over a run horizon.
    pub cadence: usize,
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::domain(
                "cfl",
                format!("CFL number must lie in (0, 1), got {}", self.cfl),
            ));
        }
        if self.cadence == 0 {
            return Err(Error::domain("cadence", "need at least one sample interval"));
        }
        Ok(())
    }
}

/// Wall data for the density/momentum system. `uniform` matches every
/// relation to one constant state, which makes that state an exact fixed
/// point of the scheme.
#[derive(Clone, Copy, Debug)]
pub struct WallData {
    pub u_left: f64,
    pub v_left: f64,
    pub w_right: f64,
}

impl WallData {
    pub fn from_shock(shock: &ShockData) -> Self {
        WallData {
            u_left: shock.u_minus,
            v_left: shock.v_star,
            w_right: shock.w_plus,
        }
    }

    pub fn uniform(u0: f64, v0: f64) -> Self {
        WallData {
            u_left: u0,
            v_left: v0,
            w_right: v0 / u0,
        }
    }

    pub fn w_left(&self) -> f64 {
        self.v_left / self.u_left
    }
}

/// Cell-averaged fields on the uniform grid x_i = -ell + (i + 1/2) dx.
#[derive(Clone, Debug)]
pub struct FieldState {
    pub t: f64,
    pub ell: f64,
    pub dx: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FieldState {
    pub fn new(t: f64, ell: f64, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::domain("ell", "half-length must be positive"));
        }
        let dx = 2.0 * ell / u.len() as f64;
        let state = FieldState { t, ell, dx, u, v };
        state.validate()?;
        Ok(state)
    }

    pub fn n_cells(&self) -> usize {
        self.u.len()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.u.len())
            .map(|i| -self.ell + (i as f64 + 0.5) * self.dx)
            .collect()
    }

    /// Midpoint-rule mass; identical to the trapezoid mass of the node
    /// profile the state was initialized from.
    pub fn mass(&self) -> f64 {
        self.u.iter().sum::<f64>() * self.dx
    }

    pub fn validate(&self) -> Result<()> {
        if self.u.len() != self.v.len() || self.u.len() < 8 {
            return Err(Error::domain(
                "state",
                "need matching u/v fields with at least 8 cells",
            ));
        }
        if !self.t.is_finite() {
            return Err(Error::domain("t", "time must be finite"));
        }
        for (i, &ui) in self.u.iter().enumerate() {
            if !(ui > 0.0 && ui.is_finite()) {
                return Err(Error::Positivity(format!(
                    "u[{i}] = {ui} at x = {:.6}, t = {:.6}",
                    -self.ell + (i as f64 + 0.5) * self.dx,
                    self.t
                )));
            }
        }
        if self.v.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("v", "momentum field must be finite"));
        }
        Ok(())
    }

    /// Residuals of the three wall relations, with wall values extrapolated
    /// off the two nearest cell centers: |w_- u - v| and |v - v_left| at the
    /// left wall, |w_+ u - v| at the right.
    pub fn boundary_residuals(&self, walls: &WallData) -> [f64; 3] {
        let n = self.u.len();
        let uw_l = 1.5 * self.u[0] - 0.5 * self.u[1];
        let vw_l = 1.5 * self.v[0] - 0.5 * self.v[1];
        let uw_r = 1.5 * self.u[n - 1] - 0.5 * self.u[n - 2];
        let vw_r = 1.5 * self.v[n - 1] - 0.5 * self.v[n - 2];
        [
            (walls.w_left() * uw_l - vw_l).abs(),
            (vw_l - walls.v_left).abs(),
            (walls.w_right * uw_r - vw_r).abs(),
        ]
    }
}

/// Fastest characteristic speed |v/u| + sqrt(P'(u)) over the cells.
pub fn max_wave_speed(state: &FieldState, model: &FluidModel) -> Result<f64> {
    let mut s = 0.0f64;
    for (&u, &v) in state.u.iter().zip(&state.v) {
        if !(u > 0.0) {
            return Err(Error::Positivity(format!(
                "density {u} while sizing the time step"
            )));
        }
        s = s.max((v / u).abs() + model.dpressure(u).sqrt());
    }
    Ok(s)
}

/// Startup feasibility: the layer needs at least 8 cells per decay width
/// eps/rate, and the dissipative flux must keep its numerical viscosity
/// 0.5 a dx below one fifth of the physical eps nu(u).
pub fn resolution_check(
    scheme: &SchemeConfig,
    shock: &ShockData,
    model: &FluidModel,
    epsilon: f64,
    dx: f64,
) -> Result<()> {
    let rate = |u: f64| -> Result<f64> {
        Ok(model.flux_u(u, shock.v_star).abs() / model.dg_du(u, shock.v_star)?)
    };
    let width = epsilon / rate(shock.u_minus)?.max(rate(shock.u_plus)?);
    if 8.0 * dx > width {
        return Err(Error::Resolution(format!(
            "layer width {width:.3e} needs dx <= {:.3e}, got {dx:.3e}",
            width / 8.0
        )));
    }
    let a = match scheme.flux {
        FluxScheme::LocalLaxFriedrichs => {
            let speed = |u: f64| (shock.v_star / u).abs() + model.dpressure(u).sqrt();
            speed(shock.u_minus)
                .max(speed(shock.u_sonic))
                .max(speed(shock.u_plus))
        }
        // the central scheme upwinds only the density transport
        FluxScheme::Central => (shock.v_star / shock.u_minus)
            .abs()
            .max((shock.v_star / shock.u_plus).abs()),
    };
    let visc_num = 0.5 * a * dx;
    let visc_phys = epsilon * model.viscosity(shock.u_minus.min(shock.u_plus));
    if visc_num > 0.2 * visc_phys {
        return Err(Error::Resolution(format!(
            "numerical viscosity {visc_num:.3e} exceeds 0.2 eps nu_min = {:.3e}; \
             measured drift would reflect the scheme, not the flow",
            0.2 * visc_phys
        )));
    }
    Ok(())
}

/// Cell averages of a glued profile built on the node grid. The midpoint
/// mass of the result equals the trapezoid mass of the nodes identically.
/// A positive `mollify_width` smooths the fields by conservative diffusion
/// passes totalling that standard deviation.
pub fn init_from_manifold(point: &ManifoldPoint, mollify_width: f64) -> Result<FieldState> {
    let g = &point.grid;
    if g.len() < 9 {
        return Err(Error::domain("grid", "need at least 9 profile nodes"));
    }
    let dx = g[1] - g[0];
    let uniform = g.windows(2).all(|w| ((w[1] - w[0]) - dx).abs() <= 1e-9 * dx);
    let last = g[g.len() - 1];
    if !uniform || (g[0] + last).abs() > 1e-9 * last.abs().max(1.0) {
        return Err(Error::domain(
            "grid",
            "profile nodes must be uniform over a symmetric interval",
        ));
    }
    let mut u: Vec<f64> = point.u.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let mut v: Vec<f64> = point.v.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    mollify(&mut u, dx, mollify_width)?;
    mollify(&mut v, dx, mollify_width)?;
    FieldState::new(0.0, 0.5 * (last - g[0]), u, v)
}

/// Conservative smoothing: explicit diffusion passes with zero-flux ends;
/// each pass adds dx^2/2 of variance, so `passes = 2 (width/dx)^2`.
fn mollify(field: &mut [f64], dx: f64, width: f64) -> Result<()> {
    if width == 0.0 {
        return Ok(());
    }
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::domain("mollify_width", "width must be >= 0 and finite"));
    }
    let passes = (2.0 * (width / dx).powi(2)).ceil() as usize;
    if passes > 200_000 {
        return Err(Error::domain(
            "mollify_width",
            format!("width {width} needs {passes} smoothing passes on this grid"),
        ));
    }
    let n = field.len();
    let mut flux = vec![0.0; n + 1];
    for _ in 0..passes {
        for i in 0..n - 1 {
            flux[i + 1] = 0.25 * (field[i + 1] - field[i]);
        }
        for i in 0..n {
            field[i] += flux[i + 1] - flux[i];
        }
    }
    Ok(())
}

/// Density-equation face fluxes at the walls for one accepted step; total
/// mass changes by exactly -dt (right - left).
#[derive(Clone, Copy, Debug)]
pub struct WallFluxes {
    pub left: f64,
    pub right: f64,
}

struct NsScratch {
    fu: Vec<f64>,
    fv: Vec<f64>,
    nu_face: Vec<f64>,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    w: Vec<f64>,
    aux: Vec<f64>,
}

impl NsScratch {
    fn new(n: usize) -> Self {
        NsScratch {
            fu: vec![0.0; n + 1],
            fv: vec![0.0; n + 1],
            nu_face: vec![0.0; n + 1],
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            w: vec![0.0; n],
            aux: vec![0.0; n],
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn ns_step_in_place(
    u: &mut [f64],
    v: &mut [f64],
    t: f64,
    ell: f64,
    dx: f64,
    dt: f64,
    scheme: &SchemeConfig,
    walls: &WallData,
    model: &FluidModel,
    epsilon: f64,
    s: &mut NsScratch,
) -> Result<WallFluxes> {
    let n = u.len();
    // ghosts: the left mirrors through the pinned (u, v) pair, the right
    // extends the density and slaves the momentum to the pinned velocity
    let ugl = 2.0 * walls.u_left - u[0];
    let vgl = 2.0 * walls.v_left - v[0];
    let ugr = u[n - 1];
    let vgr = walls.w_right * ugr;
    if !(ugl > 0.0) {
        return Err(Error::Positivity(format!(
            "left ghost density {ugl} at t = {t:.6}; the layer has reached the wall"
        )));
    }
    let llf = scheme.flux == FluxScheme::LocalLaxFriedrichs;
    for f in 0..=n {
        let (ul, vl) = if f == 0 { (ugl, vgl) } else { (u[f - 1], v[f - 1]) };
        let (ur, vr) = if f == n { (ugr, vgr) } else { (u[f], v[f]) };
        let mut fu = 0.5 * (vl + vr);
        let mut fv = 0.5 * (model.flux_value(ul, vl) + model.flux_value(ur, vr));
        if llf {
            let a = ((vl / ul).abs() + model.dpressure(ul).sqrt())
                .max((vr / ur).abs() + model.dpressure(ur).sqrt());
            fu -= 0.5 * a * (ur - ul);
            fv -= 0.5 * a * (vr - vl);
        } else {
            // the density has no viscous channel of its own: upwind its
            // transport so the implicit momentum solve cannot leave an
            // undamped advected density mode behind
            let wf = (vl + vr) / (ul + ur);
            fu -= 0.5 * wf.abs() * (ur - ul);
        }
        s.fu[f] = fu;
        s.fv[f] = fv;
    }
    let lam = dt / dx;
    for i in 0..n {
        u[i] -= lam * (s.fu[i + 1] - s.fu[i]);
        if !(u[i] > 0.0) {
            return Err(Error::Positivity(format!(
                "u = {:.3e} at x = {:.6}, t = {:.6} after the flux update",
                u[i],
                -ell + (i as f64 + 0.5) * dx,
                t + dt
            )));
        }
        v[i] -= lam * (s.fv[i + 1] - s.fv[i]);
    }
    // implicit w-solve against the updated density; interior face viscosity
    // at the density average, wall faces at the wall density
    let r = epsilon * dt / (dx * dx);
    s.nu_face[0] = model.viscosity(walls.u_left);
    s.nu_face[n] = model.viscosity(u[n - 1]);
    for f in 1..n {
        s.nu_face[f] = model.viscosity(0.5 * (u[f - 1] + u[f]));
    }
    for i in 0..n {
        s.lower[i] = -r * s.nu_face[i];
        s.upper[i] = -r * s.nu_face[i + 1];
        s.diag[i] = u[i] + r * (s.nu_face[i] + s.nu_face[i + 1]);
        s.w[i] = v[i];
    }
    // Dirichlet walls sit half a cell out, so the wall-face gradient is
    // (w_end - w_wall) / (dx/2): one extra r nu on the diagonal, and the
    // known wall velocity moves to the right side
    s.diag[0] += r * s.nu_face[0];
    s.w[0] += 2.0 * r * s.nu_face[0] * walls.w_left();
    s.diag[n - 1] += r * s.nu_face[n];
    s.w[n - 1] += 2.0 * r * s.nu_face[n] * walls.w_right;
    tridiag::solve_in_place(&s.lower, &s.diag, &s.upper, &mut s.w, &mut s.aux)?;
    for i in 0..n {
        if !s.w[i].is_finite() {
            return Err(Error::NonConvergence(format!(
                "viscous solve returned a non-finite velocity at cell {i}"
            )));
        }
        v[i] = u[i] * s.w[i];
    }
    Ok(WallFluxes {
        left: s.fu[0],
        right: s.fu[n],
    })
}

fn check_dt(dt: f64, bound: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain("dt", "time step must be positive and finite"));
    }
    if dt > bound * (1.0 + 1e-9) {
        return Err(Error::domain(
            "dt",
            format!("dt = {dt:.3e} exceeds the CFL bound {bound:.3e}"),
        ));
    }
    Ok(())
}

/// One semi-implicit step. `dt` must respect the advective CFL bound; size
/// it from [`max_wave_speed`].
pub fn step(
    state: &FieldState,
    dt: f64,
    scheme: &SchemeConfig,
    walls: &WallData,
    model: &FluidModel,
    epsilon: f64,
) -> Result<(FieldState, WallFluxes)> {
    scheme.validate()?;
    state.validate()?;
    if !(epsilon > 0.0) {
        return Err(Error::domain("epsilon", "viscosity scale must be positive"));
    }
    check_dt(dt, scheme.cfl * state.dx / max_wave_speed(state, model)?)?;
    let mut out = state.clone();
    let mut scratch = NsScratch::new(state.n_cells());
    let fluxes = ns_step_in_place(
        &mut out.u, &mut out.v, state.t, state.ell, state.dx, dt, scheme, walls, model, epsilon,
        &mut scratch,
    )?;
    out.t = state.t + dt;
    Ok((out, fluxes))
}

/// Layer position: the unique crossing of the density through the sonic
/// value, located by linear interpolation between cell centers.
pub fn track_layer(state: &FieldState, shock: &ShockData) -> Result<f64> {
    track_crossing(&state.u, state.dx, state.ell, shock.u_sonic)
}

fn track_crossing(field: &[f64], dx: f64, ell: f64, level: f64) -> Result<f64> {
    let x_of = |i: usize| -ell + (i as f64 + 0.5) * dx;
    let mut hits: Vec<f64> = Vec::new();
    for i in 0..field.len() {
        if field[i] == level {
            hits.push(x_of(i));
        }
    }
    for i in 0..field.len() - 1 {
        let (a, b) = (field[i] - level, field[i + 1] - level);
        if a * b < 0.0 {
            hits.push(x_of(i) + dx * a / (a - b));
        }
    }
    match hits.len() {
        1 => Ok(hits[0]),
        0 => Err(Error::TrackingAmbiguity(
            "no crossing of the transition level".into(),
        )),
        k => Err(Error::TrackingAmbiguity(format!(
            "{k} crossings of the transition level"
        ))),
    }
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub snapshots: Vec<Snapshot>,
    pub final_state: FieldState,
    pub steps: usize,
}

const MAX_STEPS: usize = 50_000_000;

/// Advances the state to `t_end`, tracking the layer at `scheme.cadence`
/// even sample intervals. Snapshots keep the initial and final fields plus
/// every `snapshot_every`-th sample when nonzero.
pub fn run(
    state0: &FieldState,
    t_end: f64,
    scheme: &SchemeConfig,
    shock: &ShockData,
    model: &FluidModel,
    epsilon: f64,
    snapshot_every: usize,
) -> Result<RunOutput> {
    scheme.validate()?;
    state0.validate()?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::domain("t_end", "horizon must be positive and finite"));
    }
    if !(epsilon > 0.0) {
        return Err(Error::domain("epsilon", "viscosity scale must be positive"));
    }
    resolution_check(scheme, shock, model, epsilon, state0.dx)?;
    let walls = WallData::from_shock(shock);
    let mut state = state0.clone();
    let mut scratch = NsScratch::new(state.n_cells());
    let mut times = Vec::with_capacity(scheme.cadence + 1);
    let mut xis = Vec::with_capacity(scheme.cadence + 1);
    let mut snapshots = Vec::new();
    let mut steps = 0usize;
    for k in 0..=scheme.cadence {
        let target = t_end * k as f64 / scheme.cadence as f64;
        loop {
            let rem = target - state.t;
            if rem <= f64::EPSILON * target.max(1.0) {
                break;
            }
            let speed = max_wave_speed(&state, model)?;
            let dt = (scheme.cfl * state.dx / speed).min(rem);
            ns_step_in_place(
                &mut state.u, &mut state.v, state.t, state.ell, state.dx, dt, scheme, &walls,
                model, epsilon, &mut scratch,
            )?;
            state.t += dt;
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::NonConvergence(format!(
                    "step budget of {MAX_STEPS} exhausted at t = {:.3e}",
                    state.t
                )));
            }
        }
        state.t = target;
        times.push(target);
        xis.push(track_layer(&state, shock)?);
        if k == 0 || k == scheme.cadence || (snapshot_every > 0 && k % snapshot_every == 0) {
            snapshots.push(Snapshot {
                t: state.t,
                x: state.centers(),
                u: state.u.clone(),
                v: state.v.clone(),
            });
        }
    }
    let trajectory = Trajectory {
        times: times.clone(),
        taus: times,
        xis,
        rhs: Vec::new(),
        source: SourceTag::Pde,
        ln_scale: 0.0,
        epsilon,
        stop: StopReason::Completed,
    };
    trajectory.validate(state.ell)?;
    Ok(RunOutput {
        trajectory,
        snapshots,
        final_state: state,
        steps,
    })
}

/// Best-fit member of the profile family: (xi_fit, L2 distance of the
/// density field to that member), by golden-section refinement around the
/// tracked crossing.
pub fn manifold_distance(
    state: &FieldState,
    shock: &ShockData,
    model: &FluidModel,
    epsilon: f64,
) -> Result<(f64, f64)> {
    let xi0 = track_layer(state, shock)?;
    let n = state.n_cells();
    let nodes: Vec<f64> = (0..=n).map(|i| -state.ell + i as f64 * state.dx).collect();
    let domain = DomainSpec::new(state.ell, epsilon, n)?;
    let dist = |xi: f64| -> Result<f64> {
        let levels = kappa_pm_ns(xi, shock, model, &domain)?;
        let (un, _) = profile_samples(xi, &levels, shock, model, epsilon, &nodes)?;
        let mut acc = 0.0;
        for i in 0..n {
            let d = state.u[i] - 0.5 * (un[i] + un[i + 1]);
            acc += d * d;
        }
        Ok((acc * state.dx).sqrt())
    };
    let (mut a, mut b) = (xi0 - 4.0 * state.dx, xi0 + 4.0 * state.dx);
    const G: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - G * (b - a);
    let mut x2 = a + G * (b - a);
    let mut f1 = dist(x1)?;
    let mut f2 = dist(x2)?;
    for _ in 0..28 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - G * (b - a);
            f1 = dist(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + G * (b - a);
            f2 = dist(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Scalar field for the Burgers runs, cell-centered like [`FieldState`].
#[derive(Clone, Debug)]
pub struct ScalarState {
    pub t: f64,
    pub ell: f64,
    pub dx: f64,
    pub w: Vec<f64>,
}

impl ScalarState {
    pub fn new(t: f64, ell: f64, w: Vec<f64>) -> Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::domain("ell", "half-length must be positive"));
        }
        if w.len() < 8 || w.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("w", "need at least 8 finite cells"));
        }
        let dx = 2.0 * ell / w.len() as f64;
        Ok(ScalarState { t, ell, dx, w })
    }

    pub fn n_cells(&self) -> usize {
        self.w.len()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.w.len())
            .map(|i| -self.ell + (i as f64 + 0.5) * self.dx)
            .collect()
    }
}

/// Cell averages of the matched Burgers profile at `xi0`.
pub fn init_burgers(setup: &BurgersSetup, xi0: f64, n_cells: usize) -> Result<ScalarState> {
    setup.validate()?;
    if n_cells < 8 {
        return Err(Error::domain("n_cells", "need at least 8 cells"));
    }
    let ell = setup.ell;
    let dx = 2.0 * ell / n_cells as f64;
    let mut w = Vec::with_capacity(n_cells);
    let mut prev = setup.profile(-ell, xi0)?;
    for i in 0..n_cells {
        let next = setup.profile(-ell + (i + 1) as f64 * dx, xi0)?;
        w.push(0.5 * (prev + next));
        prev = next;
    }
    ScalarState::new(0.0, ell, w)
}

pub fn burgers_resolution_check(
    scheme: &SchemeConfig,
    setup: &BurgersSetup,
    dx: f64,
) -> Result<()> {
    let width = setup.epsilon / setup.w_bar;
    if 8.0 * dx > width {
        return Err(Error::Resolution(format!(
            "layer width {width:.3e} needs dx <= {:.3e}, got {dx:.3e}",
            width / 8.0
        )));
    }
    if scheme.flux == FluxScheme::LocalLaxFriedrichs && 0.5 * setup.w_bar * dx > 0.2 * setup.epsilon
    {
        return Err(Error::Resolution(format!(
            "numerical viscosity {:.3e} exceeds 0.2 eps = {:.3e}",
            0.5 * setup.w_bar * dx,
            0.2 * setup.epsilon
        )));
    }
    Ok(())
}

struct BurgersScratch {
    fw: Vec<f64>,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    aux: Vec<f64>,
}

impl BurgersScratch {
    fn new(n: usize) -> Self {
        BurgersScratch {
            fw: vec![0.0; n + 1],
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            aux: vec![0.0; n],
        }
    }
}

fn burgers_step_in_place(
    w: &mut [f64],
    dx: f64,
    dt: f64,
    scheme: &SchemeConfig,
    setup: &BurgersSetup,
    s: &mut BurgersScratch,
) -> Result<()> {
    let n = w.len();
    let (wl, wr) = (setup.w_bar, -setup.w_bar);
    let wgl = 2.0 * wl - w[0];
    let wgr = 2.0 * wr - w[n - 1];
    let llf = scheme.flux == FluxScheme::LocalLaxFriedrichs;
    for f in 0..=n {
        let a = if f == 0 { wgl } else { w[f - 1] };
        let b = if f == n { wgr } else { w[f] };
        let mut flux = 0.25 * (a * a + b * b);
        if llf {
            flux -= 0.5 * a.abs().max(b.abs()) * (b - a);
        }
        s.fw[f] = flux;
    }
    let lam = dt / dx;
    for i in 0..n {
        w[i] -= lam * (s.fw[i + 1] - s.fw[i]);
    }
    let r = setup.epsilon * dt / (dx * dx);
    for i in 0..n {
        s.lower[i] = -r;
        s.upper[i] = -r;
        s.diag[i] = 1.0 + 2.0 * r;
    }
    s.diag[0] += r;
    s.diag[n - 1] += r;
    w[0] += 2.0 * r * wl;
    w[n - 1] += 2.0 * r * wr;
    tridiag::solve_in_place(&s.lower, &s.diag, &s.upper, w, &mut s.aux)?;
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonConvergence(
            "viscous solve returned a non-finite velocity".into(),
        ));
    }
    Ok(())
}

fn burgers_speed(w: &[f64], setup: &BurgersSetup) -> f64 {
    w.iter().fold(setup.w_bar.abs(), |m, &x| m.max(x.abs()))
}

/// One semi-implicit Burgers step under the advective CFL bound.
pub fn burgers_step(
    state: &ScalarState,
    dt: f64,
    scheme: &SchemeConfig,
    setup: &BurgersSetup,
) -> Result<ScalarState> {
    scheme.validate()?;
    setup.validate()?;
    check_dt(dt, scheme.cfl * state.dx / burgers_speed(&state.w, setup))?;
    let mut out = state.clone();
    let mut scratch = BurgersScratch::new(state.n_cells());
    burgers_step_in_place(&mut out.w, state.dx, dt, scheme, setup, &mut scratch)?;
    out.t = state.t + dt;
    Ok(out)
}

pub fn track_layer_burgers(state: &ScalarState) -> Result<f64> {
    track_crossing(&state.w, state.dx, state.ell, 0.0)
}

#[derive(Clone, Debug)]
pub struct ScalarSnapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

#[derive(Debug)]
pub struct BurgersRunOutput {
    pub trajectory: Trajectory,
    pub snapshots: Vec<ScalarSnapshot>,
    pub final_state: ScalarState,
    pub steps: usize,
}

/// Burgers counterpart of [`run`]: same stepping, sampling, and snapshot
/// policy, tracking the zero crossing of w.
pub fn run_burgers(
    state0: &ScalarState,
    t_end: f64,
    scheme: &SchemeConfig,
    setup: &BurgersSetup,
    snapshot_every: usize,
) -> Result<BurgersRunOutput> {
    scheme.validate()?;
    setup.validate()?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::domain("t_end", "horizon must be positive and finite"));
    }
    burgers_resolution_check(scheme, setup, state0.dx)?;
    let mut state = state0.clone();
    let mut scratch = BurgersScratch::new(state.n_cells());
    let mut times = Vec::with_capacity(scheme.cadence + 1);
    let mut xis = Vec::with_capacity(scheme.cadence + 1);
    let mut snapshots = Vec::new();
    let mut steps = 0usize;
    for k in 0..=scheme.cadence {
        let target = t_end * k as f64 / scheme.cadence as f64;
        loop {
            let rem = target - state.t;
            if rem <= f64::EPSILON * target.max(1.0) {
                break;
            }
            let dt = (scheme.cfl * state.dx / burgers_speed(&state.w, setup)).min(rem);
            burgers_step_in_place(&mut state.w, state.dx, dt, scheme, setup, &mut scratch)?;
            state.t += dt;
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::NonConvergence(format!(
                    "step budget of {MAX_STEPS} exhausted at t = {:.3e}",
                    state.t
                )));
            }
        }
        state.t = target;
        times.push(target);
        xis.push(track_layer_burgers(&state)?);
        if k == 0 || k == scheme.cadence || (snapshot_every > 0 && k % snapshot_every == 0) {
            snapshots.push(ScalarSnapshot {
                t: state.t,
                x: state.centers(),
                w: state.w.clone(),
            });
        }
    }
    let trajectory = Trajectory {
        times: times.clone(),
        taus: times,
        xis,
        rhs: Vec::new(),
        source: SourceTag::Pde,
        ln_scale: 0.0,
        epsilon: setup.epsilon,
        stop: StopReason::Completed,
    };
    trajectory.validate(state.ell)?;
    Ok(BurgersRunOutput {
        trajectory,
        snapshots,
        final_state: state,
        steps,
    })
}
