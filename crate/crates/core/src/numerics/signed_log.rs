//! Sign-magnitude representation in log space.
//!
//! The layer problems here produce quantities like `exp(-w(l - xi)/eps)` that
//! underflow f64 long before they stop mattering: the slow dynamics are driven
//! by differences of such terms. `SignedLog` stores the sign and `ln |x|`
//! separately so sums, differences, and products stay meaningful down to
//! `ln |x| ~ -1e308`.

/// A real number stored as `sign * exp(ln_abs)`.
///
/// Zero is `sign == 0` with `ln_abs = -inf`. `ln_abs = +inf` with nonzero sign
/// is an overflowed value and propagates like infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLog {
    pub sign: i8,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn new(sign: i8, ln_abs: f64) -> Self {
        if sign == 0 || ln_abs == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        SignedLog {
            sign: sign.signum(),
            ln_abs,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }

    /// Collapses to f64, underflowing to signed zero / overflowing to inf.
    pub fn to_f64(self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        SignedLog {
            sign: self.sign.abs(),
            ln_abs: self.ln_abs,
        }
    }

    pub fn neg(self) -> Self {
        SignedLog {
            sign: -self.sign,
            ln_abs: self.ln_abs,
        }
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        SignedLog {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs + other.ln_abs,
        }
    }

    pub fn div(self, other: Self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        SignedLog {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs - other.ln_abs,
        }
    }

    pub fn scale(self, c: f64) -> Self {
        self.mul(Self::from_f64(c))
    }

    /// Exact-as-possible sum. The larger magnitude dominates; the correction
    /// runs through `ln_1p` so nearby cancellation keeps relative accuracy.
    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.ln_abs >= other.ln_abs {
            (self, other)
        } else {
            (other, self)
        };
        let d = small.ln_abs - big.ln_abs; // <= 0
        if big.sign == small.sign {
            SignedLog::new(big.sign, big.ln_abs + d.exp().ln_1p())
        } else {
            // ln(1 - e^d); d == 0 means exact cancellation
            let r = -d.exp();
            if r <= -1.0 {
                return Self::ZERO;
            }
            SignedLog::new(big.sign, big.ln_abs + r.ln_1p())
        }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    /// Total order consistent with the represented real values.
    pub fn cmp_value(self, other: Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self.sign, other.sign) {
            (0, 0) => Ordering::Equal,
            (a, b) if a < b => Ordering::Less,
            (a, b) if a > b => Ordering::Greater,
            (1, _) => self.ln_abs.partial_cmp(&other.ln_abs).unwrap_or(Ordering::Equal),
            _ => other.ln_abs.partial_cmp(&self.ln_abs).unwrap_or(Ordering::Equal),
        }
    }

    /// Decimal scientific form `[-]m.ddddddddddddddddEsxxx` that works far
    /// outside f64 range. 17 significant digits.
    pub fn to_scientific_string(self) -> String {
        if self.sign == 0 {
            return "0".to_string();
        }
        if self.ln_abs == f64::INFINITY {
            return if self.sign > 0 { "inf" } else { "-inf" }.to_string();
        }
        // Fractional part of ln_abs / ln 10 via compensated reduction with a
        // double-double ln 10; the naive subtraction loses ~|log10| * eps of
        // mantissa accuracy.
        const LN10_HI: f64 = 2.302585092994046;
        const LN10_LO: f64 = -2.1707562233822494e-16;
        let mut e = (self.ln_abs / std::f64::consts::LN_10).floor();
        let p = e * LN10_HI;
        let e_p = e.mul_add(LN10_HI, -p);
        let mut r = ((self.ln_abs - p) - e_p) - e * LN10_LO;
        if r < 0.0 {
            e -= 1.0;
            r += std::f64::consts::LN_10;
        } else if r >= std::f64::consts::LN_10 {
            e += 1.0;
            r -= std::f64::consts::LN_10;
        }
        let mantissa = r.exp();
        let sign = if self.sign < 0 { "-" } else { "" };
        format!("{sign}{mantissa:.16}e{e}")
    }
}

impl From<f64> for SignedLog {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln(e^a - e^b)` for a > b; NaN if a <= b by more than roundoff.
pub fn log_sub_exp(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + (-((b - a).exp())).ln_1p()
}

/// `ln(e^y - 1)` accurate for both tiny and huge y > 0.
///
/// For large y this is `y + ln(1 - e^{-y})`; for small y it is `ln(expm1 y)`.
pub fn ln_expm1(y: f64) -> f64 {
    if y > 33.0 {
        y + (-(-y).exp()).ln_1p()
    } else {
        y.exp_m1().ln()
    }
}
