//! Banded matrices with partial-pivoting LU, in LAPACK band layout.
//!
//! Storage holds `2*kl + ku + 1` diagonals so factorization fill (row swaps
//! push entries up to `kl` diagonals above the original band) happens in
//! place. Entry (i, j) lives at diagonal row `i - j + kl + ku`.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Banded {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    data: Vec<f64>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Banded {
            n,
            kl,
            ku,
            data: vec![0.0; (2 * kl + ku + 1) * n],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        // storage band includes the kl fill diagonals above ku
        debug_assert!(
            i + self.kl + self.ku >= j && j + self.kl >= i,
            "({i},{j}) outside storage band"
        );
        (i + self.kl + self.ku - j) * self.n + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + self.kl + self.ku < j || j + self.kl < i {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.kl);
            let j1 = (i + self.ku).min(self.n - 1);
            let mut acc = 0.0;
            for j in j0..=j1 {
                acc += self.data[self.idx(i, j)] * x[j];
            }
            y[i] = acc;
        }
    }

    /// A^T as a new banded matrix (kl and ku swap).
    pub fn transpose(&self) -> Banded {
        let mut t = Banded::zeros(self.n, self.ku, self.kl);
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.kl);
            let j1 = (i + self.ku).min(self.n - 1);
            for j in j0..=j1 {
                let v = self.data[self.idx(i, j)];
                if v != 0.0 {
                    t.set(j, i, v);
                }
            }
        }
        t
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.kl);
            let j1 = (i + self.ku).min(self.n - 1);
            for j in j0..=j1 {
                m[(i, j)] = self.data[self.idx(i, j)];
            }
        }
        m
    }

    /// Shifts the diagonal: A <- A - sigma I.
    pub fn shift(&mut self, sigma: f64) {
        for i in 0..self.n {
            let k = self.idx(i, i);
            self.data[k] -= sigma;
        }
    }

    pub fn factor(self) -> Result<BandedLu> {
        BandedLu::factor(self)
    }
}

pub struct BandedLu {
    m: Banded,
    pivots: Vec<usize>,
}

impl BandedLu {
    /// LU with partial pivoting. Fill extends the upper bandwidth to kl + ku.
    pub fn factor(mut a: Banded) -> Result<Self> {
        let n = a.n;
        let (kl, ku) = (a.kl, a.ku);
        let ku_eff = kl + ku;
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            // pivot search in column k, rows k..=k+kl
            let i_max = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = a.get(k, k).abs();
            for i in (k + 1)..=i_max {
                let v = a.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularMatrix(format!("zero pivot at column {k}")));
            }
            pivots[k] = p;
            if p != k {
                let j_hi = (k + ku_eff).min(n - 1);
                for j in k..=j_hi {
                    let vi = a.get(k, j);
                    let vp = a.get(p, j);
                    a.set(k, j, vp);
                    a.set(p, j, vi);
                }
            }
            let akk = a.get(k, k);
            for i in (k + 1)..=i_max {
                let l = a.get(i, k) / akk;
                a.set(i, k, l);
                if l != 0.0 {
                    let j_hi = (k + ku_eff).min(n - 1);
                    for j in (k + 1)..=j_hi {
                        let v = a.get(i, j) - l * a.get(k, j);
                        a.set(i, j, v);
                    }
                }
            }
        }
        Ok(BandedLu { m: a, pivots })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.m.n;
        let kl = self.m.kl;
        let ku_eff = self.m.kl + self.m.ku;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let i_max = (k + kl).min(n - 1);
            for i in (k + 1)..=i_max {
                b[i] -= self.m.get(i, k) * b[k];
            }
        }
        for k in (0..n).rev() {
            let j_hi = (k + ku_eff).min(n - 1);
            let mut acc = b[k];
            for j in (k + 1)..=j_hi {
                acc -= self.m.get(k, j) * b[j];
            }
            b[k] = acc / self.m.get(k, k);
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_banded(n: usize, kl: usize, ku: usize, seed: u64) -> Banded {
        // small deterministic LCG; avoids pulling rand into the unit test
        let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
        let mut next = move || {
            state = state
                .wrapping_mul(2862933555777941757)
                .wrapping_add(3037000493);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut a = Banded::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                a.set(i, j, next());
            }
            // keep it comfortably nonsingular
            a.add(i, i, 3.0);
        }
        a
    }

    #[test]
    fn solve_matches_dense_lu() {
        for (n, kl, ku, seed) in [(12usize, 2usize, 3usize, 7u64), (40, 3, 6, 1), (5, 1, 1, 3)] {
            let a = random_banded(n, kl, ku, seed);
            let dense = a.to_dense();
            let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
            let x = a.clone().factor().unwrap().solve(&b);
            let xd = dense
                .lu()
                .solve(&nalgebra::DVector::from_column_slice(&b))
                .unwrap();
            for i in 0..n {
                assert!((x[i] - xd[i]).abs() < 1e-11, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]]: needs the row swap
        let mut a = Banded::zeros(2, 1, 1);
        a.set(0, 1, 1.0);
        a.set(1, 0, 1.0);
        let x = a.factor().unwrap().solve(&[2.0, 3.0]);
        assert!((x[0] - 3.0).abs() < 1e-15);
        assert!((x[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_detected() {
        let mut a = Banded::zeros(3, 1, 1);
        a.set(0, 0, 1.0);
        a.set(1, 1, 1.0);
        // row 2 left zero
        assert!(a.factor().is_err());
    }

    #[test]
    fn matvec_and_transpose_agree_with_dense() {
        let a = random_banded(17, 3, 2, 11);
        let dense = a.to_dense();
        let x: Vec<f64> = (0..17).map(|i| (i as f64).cos()).collect();
        let mut y = vec![0.0; 17];
        a.matvec(&x, &mut y);
        let yd = &dense * nalgebra::DVector::from_column_slice(&x);
        for i in 0..17 {
            assert!((y[i] - yd[i]).abs() < 1e-13);
        }
        let t = a.transpose();
        assert_eq!(t.kl, a.ku);
        assert_eq!(t.ku, a.kl);
        let td = t.to_dense();
        assert_eq!(td, dense.transpose());
    }

    #[test]
    fn shift_moves_diagonal() {
        let mut a = random_banded(6, 1, 1, 5);
        let before = a.get(3, 3);
        a.shift(0.25);
        assert!((a.get(3, 3) - (before - 0.25)).abs() < 1e-15);
    }
}
