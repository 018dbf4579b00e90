//! Scalar root finding: bisection, Brent, and a bracket-safeguarded Newton.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Plain bisection. Requires a sign change on [lo, hi].
pub fn bisect(
    mut f: impl FnMut(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    what: &'static str,
) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootBracket { what, lo, hi });
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Brent's method (inverse quadratic / secant with bisection fallback).
pub fn brent(
    mut f: impl FnMut(f64) -> f64,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    what: &'static str,
) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootBracket { what, lo: a, hi: b });
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..MAX_ITER {
        let s = if fa != fc && fb != fc {
            // inverse quadratic interpolation
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let ok_range = (s > lo.min(b) && s < lo.max(b))
            && if bisected {
                (s - b).abs() < 0.5 * (b - c).abs()
            } else {
                (s - b).abs() < 0.5 * (c - d).abs()
            };
        let s = if ok_range {
            bisected = false;
            s
        } else {
            bisected = true;
            0.5 * (a + b)
        };
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
        if fb == 0.0 || (b - a).abs() <= xtol {
            return Ok(b);
        }
    }
    Err(Error::RootConverge {
        what,
        iters: MAX_ITER,
        residual: fb.abs(),
    })
}

/// Newton iteration that never leaves [lo, hi]; falls back to bisection when
/// the Newton step exits the bracket or the derivative degenerates. The
/// bracket must contain a sign change.
pub fn newton_safeguarded(
    mut f: impl FnMut(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    xtol: f64,
    ftol: f64,
    what: &'static str,
) -> Result<f64> {
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootBracket { what, lo, hi });
    }
    let slo = flo.signum();
    let mut x = x0.clamp(lo, hi);
    let (mut fx, mut dfx) = f(x);
    for _ in 0..MAX_ITER {
        if fx == 0.0 || fx.abs() <= ftol {
            return Ok(x);
        }
        if fx.signum() == slo {
            lo = x;
        } else {
            hi = x;
        }
        let step = fx / dfx;
        let mut xn = x - step;
        if !xn.is_finite() || xn <= lo || xn >= hi {
            xn = 0.5 * (lo + hi);
        }
        if (xn - x).abs() <= xtol * (1.0 + x.abs()) {
            return Ok(xn);
        }
        x = xn;
        let t = f(x);
        fx = t.0;
        dfx = t.1;
    }
    Err(Error::RootConverge {
        what,
        iters: MAX_ITER,
        residual: fx.abs(),
    })
}
