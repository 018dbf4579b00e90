//! Adaptive explicit Runge-Kutta integration (Dormand-Prince 5(4)).
//!
//! Built for the low-dimensional stiff-free problems in this crate: profile
//! reconstruction in space and layer motion in rescaled time. Output is
//! sampled by capping steps at requested nodes, so the reported states are
//! genuine solution values, not interpolants. An optional scalar event
//! function stops the integration at a sign change, located on the cubic
//! Hermite interpolant of the accepted step.

use crate::error::{Error, Result};

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// difference of 5th and embedded 4th order weights
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial step; guessed from the first node spacing if None.
    pub first_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            first_step: None,
            max_steps: 2_000_000,
        }
    }
}

pub struct OdeSolution {
    /// Times actually reported (the requested nodes, truncated at an event).
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
    /// (t, state) where the event function crossed zero, if it did.
    pub event: Option<(f64, Vec<f64>)>,
    pub steps: usize,
    pub rejected: usize,
}

struct Stepper<'a, F> {
    f: &'a mut F,
    k: [Vec<f64>; 7],
    y_tmp: Vec<f64>,
}

impl<'a, F> Stepper<'a, F>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    fn new(f: &'a mut F, dim: usize) -> Self {
        Stepper {
            f,
            k: std::array::from_fn(|_| vec![0.0; dim]),
            y_tmp: vec![0.0; dim],
        }
    }

    /// One trial step from (t, y) with k[0] already holding f(t, y).
    /// Writes the 5th order result into y_new, returns the scaled error norm.
    fn trial(
        &mut self,
        t: f64,
        y: &[f64],
        h: f64,
        y_new: &mut [f64],
        opts: &OdeOptions,
    ) -> Result<f64> {
        for s in 0..6 {
            for (i, yt) in self.y_tmp.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, a) in A[s][..=s].iter().enumerate() {
                    acc += a * self.k[j][i];
                }
                *yt = y[i] + h * acc;
            }
            let (head, tail) = self.k.split_at_mut(s + 1);
            (self.f)(t + C[s] * h, &self.y_tmp, &mut tail[0])?;
            let _ = head;
        }
        // stage 7 state equals the 5th order solution (FSAL)
        y_new.copy_from_slice(&self.y_tmp);
        let mut err_sq = 0.0;
        for i in 0..y.len() {
            let mut e = 0.0;
            for (j, ej) in E.iter().enumerate() {
                e += ej * self.k[j][i];
            }
            e *= h;
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        Ok((err_sq / y.len() as f64).sqrt())
    }
}

/// Integrates y' = f(t, y) from nodes[0], reporting the state at every node.
///
/// Nodes must be strictly monotone (either direction). If `event` is given
/// and changes sign inside a step, integration stops there; the event state is
/// appended in `OdeSolution::event` and later nodes are not reported.
pub fn integrate_nodes<F>(
    mut f: F,
    y0: &[f64],
    nodes: &[f64],
    opts: &OdeOptions,
    mut event: Option<&mut dyn FnMut(f64, &[f64]) -> f64>,
) -> Result<OdeSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    if nodes.len() < 2 {
        return Err(Error::domain("nodes", "need at least start and end"));
    }
    let dir = (nodes[nodes.len() - 1] - nodes[0]).signum();
    if dir == 0.0 || nodes.windows(2).any(|w| (w[1] - w[0]).signum() != dir) {
        return Err(Error::domain("nodes", "must be strictly monotone"));
    }
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut t = nodes[0];
    let mut ts = vec![t];
    let mut ys = vec![y.clone()];
    let mut stepper = Stepper::new(&mut f, dim);
    {
        let mut k0 = vec![0.0; dim];
        (stepper.f)(t, &y, &mut k0)?;
        stepper.k[0] = k0;
    }
    let mut ev_prev = event.as_mut().map(|e| e(t, &y));

    let mut h = opts
        .first_step
        .unwrap_or_else(|| 0.1 * (nodes[1] - nodes[0]).abs())
        .abs()
        * dir;
    let mut steps = 0usize;
    let mut rejected = 0usize;
    let mut y_new = vec![0.0; dim];
    let mut node_idx = 1usize;

    while node_idx < nodes.len() {
        let t_target = nodes[node_idx];
        let h_floor = 16.0 * f64::EPSILON * t.abs().max(t_target.abs()).max(1.0);
        // a free step can land within an ulp of the node; absorb the residual
        // gap instead of trying to integrate across it
        if (t_target - t) * dir <= h_floor {
            t = t_target;
            ts.push(t);
            ys.push(y.clone());
            node_idx += 1;
            continue;
        }
        // a degenerate leading interval (start sitting on a node) leaves h
        // microscopic; re-seed from the interval actually ahead
        if h.abs() < h_floor {
            h = 0.1 * (t_target - t);
        }
        let mut h_try = h;
        let mut capped = false;
        if (t + h_try - t_target) * dir > 0.0 {
            h_try = t_target - t;
            capped = true;
        }
        if h_try.abs() < h_floor {
            return Err(Error::StepUnderflow {
                t,
                dt: h_try.abs(),
                floor: h_floor,
            });
        }
        let err = stepper.trial(t, &y, h_try, &mut y_new, opts)?;
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::NonConvergence(format!(
                "ode exceeded {} steps at t = {t}",
                opts.max_steps
            )));
        }
        if err > 1.0 {
            rejected += 1;
            h = h_try * (0.9 * err.powf(-0.2)).max(0.2);
            continue;
        }
        let t_new = if capped { t_target } else { t + h_try };
        // slope at the step end is stage 7 = f(t_new, y_new) (FSAL property)
        if let Some(ev) = event.as_mut() {
            let ev_new = ev(t_new, &y_new);
            let ev_old = ev_prev.unwrap();
            if ev_old != 0.0 && ev_new.signum() != ev_old.signum() {
                let (te, ye) = locate_event(
                    t,
                    &y,
                    &stepper.k[0],
                    t_new,
                    &y_new,
                    &stepper.k[6],
                    ev,
                    ev_old,
                );
                ts.push(te);
                ys.push(ye.clone());
                return Ok(OdeSolution {
                    ts,
                    ys,
                    event: Some((te, ye)),
                    steps,
                    rejected,
                });
            }
            ev_prev = Some(ev_new);
        }
        y.copy_from_slice(&y_new);
        let k6 = stepper.k[6].clone();
        stepper.k[0] = k6;
        t = t_new;
        if t == t_target {
            ts.push(t);
            ys.push(y.clone());
            node_idx += 1;
        }
        if !capped {
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = h_try * grow;
        }
        // capped steps keep the working step size: the cap reflects output
        // geometry, not solution stiffness
    }
    Ok(OdeSolution {
        ts,
        ys,
        event: None,
        steps,
        rejected,
    })
}

/// Cubic Hermite interpolation on the accepted step, bisected on the event.
#[allow(clippy::too_many_arguments)]
fn locate_event(
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    t1: f64,
    y1: &[f64],
    f1: &[f64],
    ev: &mut dyn FnMut(f64, &[f64]) -> f64,
    ev0: f64,
) -> (f64, Vec<f64>) {
    let h = t1 - t0;
    let interp = |s: f64| -> Vec<f64> {
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        y0.iter()
            .zip(y1)
            .zip(f0.iter().zip(f1))
            .map(|((&a, &b), (&da, &db))| h00 * a + h10 * h * da + h01 * b + h11 * h * db)
            .collect()
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut sign_lo = ev0.signum();
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let ym = interp(mid);
        let em = ev(t0 + mid * h, &ym);
        if em == 0.0 {
            return (t0 + mid * h, ym);
        }
        if em.signum() == sign_lo {
            lo = mid;
            sign_lo = em.signum();
        } else {
            hi = mid;
        }
        if (hi - lo) * h.abs() < 1e-14 * (t0.abs() + t1.abs()).max(1e-30) {
            break;
        }
    }
    let s = 0.5 * (lo + hi);
    (t0 + s * h, interp(s))
}
