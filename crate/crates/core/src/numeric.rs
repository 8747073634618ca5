//! Floating-point scalars used by the determinant-product and closed-form
//! counting routes.
//!
//! Both routes produce an integer as a product of irrational factors, so the
//! arithmetic is written once against [`Real`] and run either in `f64` or, when
//! the count is too large for a 53-bit mantissa, in [`BigReal`] with enough
//! bits to resolve the units digit.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Real scalar with the handful of transcendental functions the counting
/// formulas need. `bits` arguments are ignored by `f64`.
pub trait Real:
    Clone
    + PartialOrd
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64, bits: usize) -> Self;
    fn from_i64(x: i64, bits: usize) -> Self;
    fn pi(bits: usize) -> Self;
    fn bits(&self) -> usize;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Nearest integer and the distance to it.
    fn round_nearest(&self) -> (BigInt, f64);

    fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_i64(1, self.bits());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            n >>= 1;
        }
        acc
    }
}

impl Real for f64 {
    fn from_f64(x: f64, _bits: usize) -> Self {
        x
    }
    fn from_i64(x: i64, _bits: usize) -> Self {
        x as f64
    }
    fn pi(_bits: usize) -> Self {
        std::f64::consts::PI
    }
    fn bits(&self) -> usize {
        53
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn round_nearest(&self) -> (BigInt, f64) {
        let r = self.round();
        let n = num_traits::FromPrimitive::from_f64(r).unwrap_or_else(BigInt::zero);
        (n, (self - r).abs())
    }
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

/// Arbitrary-precision binary float. Binary operations run at the larger of
/// the operands' precisions.
#[derive(Clone)]
pub struct BigReal {
    value: BigFloat,
    bits: usize,
}

impl BigReal {
    fn wrap(value: BigFloat, bits: usize) -> Self {
        BigReal { value, bits }
    }

    pub fn from_bigint(n: &BigInt, bits: usize) -> Self {
        let magnitude = n.magnitude();
        let nbits = magnitude.bits() as usize;
        if nbits == 0 {
            return Self::from_i64(0, bits);
        }
        let words_len = nbits.div_ceil(64);
        // Mantissa words are normalized with the top bit set.
        let words = (magnitude << (words_len * 64 - nbits)).to_u64_digits();
        let sign = if n.is_negative() { Sign::Neg } else { Sign::Pos };
        let mut value = BigFloat::from_words(&words, sign, nbits as i32);
        value.set_precision(bits.max(64), RM).ok();
        Self::wrap(value, bits)
    }

    fn floor_to_bigint(&self) -> BigInt {
        let f = self.value.floor();
        match f.as_raw_parts() {
            Some((words, n, sign, exp, _)) if n > 0 => {
                let mantissa = BigUint::new(
                    words
                        .iter()
                        .flat_map(|w| [*w as u32, (*w >> 32) as u32])
                        .collect(),
                );
                let shift = exp as i64 - 64 * words.len() as i64;
                let magnitude = if shift >= 0 {
                    mantissa << (shift as usize)
                } else {
                    mantissa >> ((-shift) as usize)
                };
                let v = BigInt::from(magnitude);
                if sign == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
            _ => BigInt::zero(),
        }
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.value.cmp(&other.value) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.value.cmp(&other.value).map(|c| c.cmp(&0))
    }
}

macro_rules! big_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                let bits = self.bits.max(rhs.bits);
                BigReal::wrap(self.value.$method(&rhs.value, bits, RM), bits)
            }
        }
    };
}

big_binop!(Add, add);
big_binop!(Sub, sub);
big_binop!(Mul, mul);
big_binop!(Div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(self.value.neg(), self.bits)
    }
}

impl Real for BigReal {
    fn from_f64(x: f64, bits: usize) -> Self {
        Self::wrap(BigFloat::from_f64(x, bits), bits)
    }
    fn from_i64(x: i64, bits: usize) -> Self {
        Self::wrap(BigFloat::from_i64(x, bits), bits)
    }
    fn pi(bits: usize) -> Self {
        let v = CONSTS.with(|c| c.borrow_mut().pi(bits, RM));
        Self::wrap(v, bits)
    }
    fn bits(&self) -> usize {
        self.bits
    }
    fn sqrt(&self) -> Self {
        Self::wrap(self.value.sqrt(self.bits, RM), self.bits)
    }
    fn sin(&self) -> Self {
        let v = CONSTS.with(|c| self.value.sin(self.bits, RM, &mut c.borrow_mut()));
        Self::wrap(v, self.bits)
    }
    fn cos(&self) -> Self {
        let v = CONSTS.with(|c| self.value.cos(self.bits, RM, &mut c.borrow_mut()));
        Self::wrap(v, self.bits)
    }
    fn abs(&self) -> Self {
        Self::wrap(self.value.abs(), self.bits)
    }
    fn to_f64(&self) -> f64 {
        match self.value.as_raw_parts() {
            Some((words, n, sign, exp, _)) if n > 0 => {
                let top = *words.last().unwrap_or(&0) as f64;
                let v = top * 2f64.powi(exp - 64);
                if sign == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
            _ => {
                if self.value.is_nan() {
                    f64::NAN
                } else if self.value.is_inf_pos() {
                    f64::INFINITY
                } else if self.value.is_inf_neg() {
                    f64::NEG_INFINITY
                } else {
                    0.0
                }
            }
        }
    }
    fn round_nearest(&self) -> (BigInt, f64) {
        let half = BigReal::from_f64(0.5, self.bits);
        let n = (self.clone() + half).floor_to_bigint();
        let back = BigReal::from_bigint(&n, self.bits);
        let dist = (self.clone() - back).abs().to_f64();
        (n, dist)
    }
}

/// Complex number over a [`Real`].
#[derive(Clone, Debug, PartialEq)]
pub struct Cplx<T> {
    pub re: T,
    pub im: T,
}

impl Copy for Cplx<f64> {}

impl Cplx<f64> {
    /// Principal square root.
    pub fn sqrt(self) -> Self {
        let r = self.abs();
        let re = ((r + self.re) / 2.0).max(0.0).sqrt();
        let im = ((r - self.re) / 2.0).max(0.0).sqrt();
        Cplx::new(re, if self.im < 0.0 { -im } else { im })
    }

    pub fn powu(self, k: u32) -> Self {
        (0..k).fold(Cplx::new(1.0, 0.0), |acc, _| acc * self)
    }
}

impl<T: Real> Cplx<T> {
    pub fn new(re: T, im: T) -> Self {
        Cplx { re, im }
    }

    pub fn zero(bits: usize) -> Self {
        Cplx::new(T::from_i64(0, bits), T::from_i64(0, bits))
    }

    pub fn real(x: T) -> Self {
        let bits = x.bits();
        Cplx::new(x, T::from_i64(0, bits))
    }

    /// `cos(theta) + i sin(theta)`.
    pub fn unit(theta: &T) -> Self {
        Cplx::new(theta.cos(), theta.sin())
    }

    pub fn conj(&self) -> Self {
        Cplx::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn abs(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: &T) -> Self {
        Cplx::new(self.re.clone() * k.clone(), self.im.clone() * k.clone())
    }

    pub fn is_zero(&self) -> bool {
        let z = T::from_i64(0, self.re.bits());
        self.re == z && self.im == z
    }
}

impl<T: Real> Add for Cplx<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Cplx::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<T: Real> Sub for Cplx<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Cplx::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<T: Real> Mul for Cplx<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        Cplx::new(re, im)
    }
}

impl<T: Real> Div for Cplx<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let d = rhs.norm_sqr();
        let num = self * rhs.conj();
        Cplx::new(num.re / d.clone(), num.im / d)
    }
}

impl<T: Real> Neg for Cplx<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Cplx::new(-self.re, -self.im)
    }
}

/// Determinant by Gaussian elimination with partial pivoting on modulus.
pub fn complex_det<T: Real>(mut m: Vec<Vec<Cplx<T>>>, bits: usize) -> Cplx<T> {
    let n = m.len();
    let mut det = Cplx::real(T::from_i64(1, bits));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                m[a][col]
                    .norm_sqr()
                    .partial_cmp(&m[b][col].norm_sqr())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if m[pivot][col].is_zero() {
            return Cplx::zero(bits);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det = det * p.clone();
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = m[row][col].clone() / p.clone();
            for k in col..n {
                let v = m[row][k].clone() - factor.clone() * m[col][k].clone();
                m[row][k] = v;
            }
        }
    }
    det
}

/// `log |det m|` in `f64`, accumulated pivot by pivot so that large orders
/// cannot overflow. Singular matrices give `-inf`.
pub fn log_abs_det(mut m: Vec<Vec<Cplx<f64>>>) -> f64 {
    let n = m.len();
    let mut acc = 0.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].norm_sqr().total_cmp(&m[b][col].norm_sqr()))
            .unwrap_or(col);
        let p = m[pivot][col];
        if p.norm_sqr() == 0.0 {
            return f64::NEG_INFINITY;
        }
        m.swap(pivot, col);
        acc += 0.5 * p.norm_sqr().ln();
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = m[row][col] / p;
            for k in col..n {
                let v = m[row][k] - factor * m[col][k];
                m[row][k] = v;
            }
        }
    }
    acc
}

/// Extended-precision policy for floating-point integer evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    /// Minimum mantissa bits used when `f64` cannot certify the result.
    pub extended_bits: usize,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { extended_bits: 128 }
    }
}

impl Precision {
    /// Precision for a target of `digits` significant decimal digits.
    pub fn from_digits(digits: u32) -> Self {
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
        Precision {
            extended_bits: bits.max(128),
        }
    }
}

/// Largest magnitude trusted to an `f64` evaluation.
pub const F64_TRUSTED_LIMIT: f64 = (1u64 << 36) as f64;

/// Something whose exact value is a nonnegative integer but which is
/// computed as a floating-point expression.
pub trait IntegerEvaluation {
    fn describe(&self) -> String;
    /// Base-2 logarithm of the magnitude, from an `f64` pass.
    fn log2_magnitude(&self) -> f64;
    /// Evaluate at the given working precision.
    fn evaluate<T: Real>(&self, bits: usize) -> T;
}

/// Rounding guard: `max(0.25, 1e-9 |value|)`.
pub fn rounding_guard(value: f64) -> f64 {
    0.25f64.max(1e-9 * value.abs())
}

fn guard_error(what: String, value: String, distance: f64, guard: f64) -> Error {
    Error::RoundingGuardFailure {
        what,
        value,
        distance,
        guard,
    }
}

fn to_natural(n: BigInt, what: &str, value: &str) -> Result<BigUint> {
    if n.is_negative() {
        return Err(guard_error(what.to_string(), value.to_string(), f64::INFINITY, 0.25));
    }
    Ok(n.magnitude().clone())
}

/// Evaluates `e` and rounds it to an integer under the rounding guard,
/// escalating to extended precision when `f64` cannot resolve the result.
pub fn round_to_integer<E: IntegerEvaluation>(e: &E, precision: Precision) -> Result<BigUint> {
    let log2 = e.log2_magnitude();
    let fits_f64 = log2.is_finite() && log2 < F64_TRUSTED_LIMIT.log2();
    if fits_f64 || log2 == f64::NEG_INFINITY {
        let v: f64 = e.evaluate(53);
        let (n, dist) = v.round_nearest();
        let guard = rounding_guard(v);
        if v.is_finite() && dist <= guard && v.abs() < F64_TRUSTED_LIMIT {
            return to_natural(n, &e.describe(), &format!("{v}"));
        }
    }
    if !log2.is_finite() && log2 != f64::NEG_INFINITY {
        return Err(guard_error(e.describe(), "non-finite".into(), f64::INFINITY, 0.25));
    }
    let magnitude_bits = log2.max(0.0).ceil() as usize;
    let bits = precision.extended_bits + magnitude_bits;
    let v: BigReal = e.evaluate(bits);
    let (n, dist) = v.round_nearest();
    if dist.is_finite() && dist <= 0.25 {
        return to_natural(n, &e.describe(), &format!("{v:?}"));
    }
    Err(guard_error(e.describe(), format!("{v:?}"), dist, 0.25))
}

/// `log(n)` for an arbitrarily large natural number.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(0.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bigreal_roundtrips_integers() {
        for v in [0i64, 1, -1, 12345, -987654321, 1 << 62] {
            let x = BigReal::from_i64(v, 200);
            assert_eq!(x.round_nearest().0, BigInt::from(v));
            assert_eq!(BigReal::from_bigint(&BigInt::from(v), 200).round_nearest().0, BigInt::from(v));
        }
        let big: BigInt = BigInt::from(3u8).pow(200) + 7;
        let x = BigReal::from_bigint(&big, 512);
        let (n, d) = x.round_nearest();
        assert_eq!(n, big);
        assert!(d < 1e-30);
    }

    #[test]
    fn bigreal_transcendentals_match_f64() {
        let bits = 160;
        let third = BigReal::pi(bits) / BigReal::from_i64(3, bits);
        assert!((third.cos().to_f64() - 0.5).abs() < 1e-15);
        assert!((third.sin().to_f64() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((BigReal::from_i64(2, bits).sqrt().to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert!((BigReal::from_f64(-2.75, bits).to_f64() + 2.75).abs() < 1e-15);
    }

    #[test]
    fn rounding_to_nearest_handles_halves_and_negatives() {
        assert_eq!(2.4f64.round_nearest().0, BigInt::from(2));
        assert_eq!((-2.6f64).round_nearest().0, BigInt::from(-3));
        let x = BigReal::from_f64(-2.6, 128);
        assert_eq!(x.round_nearest().0, BigInt::from(-3));
    }

    #[test]
    fn complex_det_of_rotation_blocks() {
        let c = |re: f64, im: f64| Cplx::new(re, im);
        // det [[i, 1], [1, i]] = -1 - 1 = -2
        let m = vec![vec![c(0.0, 1.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 1.0)]];
        let d = complex_det(m, 53);
        assert!((d.re + 2.0).abs() < 1e-12 && d.im.abs() < 1e-12);
        // needs a row swap
        let m = vec![vec![c(0.0, 0.0), c(2.0, 0.0)], vec![c(3.0, 0.0), c(0.0, 0.0)]];
        let d = complex_det(m, 53);
        assert!((d.re + 6.0).abs() < 1e-12);
    }

    #[test]
    fn ln_of_huge_naturals() {
        let n = BigUint::from(2u8).pow(5000);
        assert!((ln_biguint(&n) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((ln_biguint(&BigUint::from(20u8)) - 20f64.ln()).abs() < 1e-15);
    }
}
