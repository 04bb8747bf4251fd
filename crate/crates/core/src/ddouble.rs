//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! carrying about 32 significant digits.
//!
//! Used as a [`Scalar`] when an identity must be checked to an absolute
//! tolerance finer than `f64` rounding at the magnitudes involved. All
//! formulas are generic, so they run unchanged on `DoubleDouble` and on
//! `Jet<DoubleDouble>`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[allow(clippy::excessive_precision)]
const LN2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_558e-17,
};
#[allow(clippy::excessive_precision)]
const HALF_PI: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::FRAC_PI_2,
    lo: 6.123_233_995_736_766_036e-17,
};
const EPS: f64 = 1e-32;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub fn from_f64(v: f64) -> Self {
        DoubleDouble { hi: v, lo: 0.0 }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = DoubleDouble::from_f64(1.0);
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    fn ldexp(self, e: i32) -> Self {
        let s = 2f64.powi(e);
        DoubleDouble::new(self.hi * s, self.lo * s)
    }

    /// `Σ_{k≥1} x^k/k!` for small `|x|`.
    fn expm1_series(x: Self) -> Self {
        let mut term = x;
        let mut sum = x;
        for k in 2..40 {
            term = term * x / f64::from(k);
            sum = sum + term;
            if term.hi.abs() < EPS * sum.hi.abs() {
                break;
            }
        }
        sum
    }

    /// Taylor sums for `sin` and `cos` on `|x| ≤ π/4`.
    fn sin_cos_reduced(x: Self) -> (Self, Self) {
        let x2 = x * x;
        let (mut s, mut c) = (x, DoubleDouble::from_f64(1.0));
        let (mut ts, mut tc) = (x, DoubleDouble::from_f64(1.0));
        for k in 1..30 {
            let k = f64::from(k);
            ts = -ts * x2 / ((2.0 * k) * (2.0 * k + 1.0));
            tc = -tc * x2 / ((2.0 * k - 1.0) * (2.0 * k));
            s = s + ts;
            c = c + tc;
            if ts.hi.abs() < EPS && tc.hi.abs() < EPS {
                break;
            }
        }
        (s, c)
    }

    fn sin_cos(self) -> (Self, Self) {
        let k = (self.hi / HALF_PI.hi).round();
        let r = self - HALF_PI * k;
        let (s, c) = Self::sin_cos_reduced(r);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        DoubleDouble::from_f64(v)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} + {:e}", self.hi, self.lo)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        DoubleDouble::renorm(s, e + f)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        DoubleDouble::renorm(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        let q3 = r.hi / o.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        DoubleDouble::new(q1, q2) + DoubleDouble::from_f64(q3)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DoubleDouble::new(-self.hi, -self.lo)
    }
}

macro_rules! with_f64 {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<f64> for DoubleDouble {
            type Output = Self;
            #[inline]
            fn $m(self, o: f64) -> Self {
                $tr::$m(self, DoubleDouble::from_f64(o))
            }
        }
    )*};
}

with_f64!(Add add, Sub sub);

impl Mul<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, o: f64) -> Self {
        let (p, e) = two_prod(self.hi, o);
        DoubleDouble::renorm(p, e + self.lo * o)
    }
}

impl Div<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, o: f64) -> Self {
        let q1 = self.hi / o;
        let (p, e) = two_prod(q1, o);
        let (s, t) = two_sum(self.hi, -p);
        let q2 = (s + (t - e + self.lo)) / o;
        DoubleDouble::renorm(q1, q2)
    }
}

impl Scalar for DoubleDouble {
    fn cst(v: f64) -> Self {
        DoubleDouble::from_f64(v)
    }

    fn value(&self) -> f64 {
        self.to_f64()
    }

    fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DoubleDouble::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return DoubleDouble::from_f64(0.0);
        }
        // x = k ln2 + r, then e^r = (e^{r/2^10})^{2^10}
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * k).ldexp(-10);
        let mut e = Self::expm1_series(r);
        for _ in 0..10 {
            // (1 + e)² − 1 = e(2 + e)
            e = e * (e + 2.0);
        }
        (e + 1.0).ldexp(k as i32)
    }

    fn exp_m1(self) -> Self {
        if self.hi.abs() < 0.5 {
            Self::expm1_series(self)
        } else {
            self.exp() - 1.0
        }
    }

    fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::from_f64(if self.hi == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        // Newton on e^y = x: y ← y + x e^{−y} − 1
        let mut y = DoubleDouble::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - 1.0;
        }
        y
    }

    fn ln_1p(self) -> Self {
        if self.hi.abs() < 1e-3 {
            // x − x²/2 + x³/3 − …
            let mut term = self;
            let mut sum = self;
            for k in 2..20 {
                term = -term * self;
                sum = sum + term / f64::from(k);
            }
            sum
        } else {
            (self + 1.0).ln()
        }
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::from_f64(if self.hi == 0.0 { 0.0 } else { f64::NAN });
        }
        let y = DoubleDouble::from_f64(self.hi.sqrt());
        y + (self - y * y) / (y * 2.0)
    }

    fn sin(self) -> Self {
        self.sin_cos().0
    }

    fn cos(self) -> Self {
        self.sin_cos().1
    }

    fn sinh(self) -> Self {
        let e = self.exp_m1();
        (e + e / (e + 1.0)) * 0.5
    }

    fn cosh(self) -> Self {
        let e = self.exp();
        (e + e.recip()) * 0.5
    }

    fn asin(self) -> Self {
        // Newton on sin(y) = x
        let mut y = DoubleDouble::from_f64(self.hi.asin());
        for _ in 0..2 {
            let (s, c) = y.sin_cos();
            y = y - (s - self) / c;
        }
        y
    }

    fn asinh(self) -> Self {
        let a = self.abs();
        let a2 = a * a;
        let v = (a + a2 / ((a2 + 1.0).sqrt() + 1.0)).ln_1p();
        if self.hi < 0.0 {
            -v
        } else {
            v
        }
    }
}

/// Lifts an `f64` phase point.
pub fn lift4(x: &[f64; 4]) -> [DoubleDouble; 4] {
    x.map(DoubleDouble::from_f64)
}
