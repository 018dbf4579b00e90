//! Thomas algorithm for tridiagonal systems.
//!
//! No pivoting: callers must supply diagonally dominant systems. The implicit
//! viscous step assembles an M-matrix (positive diagonal, nonpositive
//! off-diagonals, strict dominance), so this is safe there.

use crate::error::{Error, Result};

/// Solves the system with subdiagonal `a` (a[0] unused), diagonal `b`,
/// superdiagonal `c` (c[n-1] unused), right side `d`. Overwrites `d` with the
/// solution. Scratch must have length n.
pub fn solve_in_place(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64], scratch: &mut [f64]) -> Result<()> {
    let n = b.len();
    assert!(a.len() == n && c.len() == n && d.len() == n && scratch.len() == n);
    if b[0] == 0.0 {
        return Err(Error::SingularMatrix("tridiagonal zero leading pivot".into()));
    }
    scratch[0] = c[0] / b[0];
    d[0] /= b[0];
    for i in 1..n {
        let denom = b[i] - a[i] * scratch[i - 1];
        if denom == 0.0 {
            return Err(Error::SingularMatrix(format!("tridiagonal zero pivot at row {i}")));
        }
        scratch[i] = c[i] / denom;
        d[i] = (d[i] - a[i] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= scratch[i] * d[i + 1];
    }
    Ok(())
}
