//! Explicit counting formulas for the two cylinder families and for boxed
//! plane partitions, with the recurrences they come from.
//!
//! Both cylinder counts factor over the `n` quotient weights. The factor for
//! weight `b` is `L_m(b)` for hexagon columns and `P_m(b)` for quadrangle
//! columns, each given by a linear recurrence in the column height `m` and by
//! its solution in closed form.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::numeric::{round_to_integer, IntegerEvaluation, Precision, Real};
use crate::plane_graph::MatchCount;

/// Real part of the quotient weight, as it enters the cylinder formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaWeight {
    pub j: usize,
    pub n: usize,
    pub value: f64,
}

/// The weight's angle as a multiple of `pi / 2n`: `2j` for odd `n`,
/// `2j + 1` for even `n`.
fn beta_numerator(j: usize, n: usize) -> usize {
    if n % 2 == 1 {
        2 * j
    } else {
        2 * j + 1
    }
}

/// `cos(j pi / n)` for odd `n`, `cos((2j + 1) pi / 2n)` for even `n`.
pub fn beta(j: usize, n: usize) -> Result<BetaWeight> {
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, bound: n });
    }
    let value = (beta_numerator(j, n) as f64 * PI / (2 * n) as f64).cos();
    Ok(BetaWeight { j, n, value })
}

fn beta_real<T: Real>(j: usize, n: usize, bits: usize) -> T {
    let theta = T::pi(bits) * T::from_i64(beta_numerator(j, n) as i64, bits) / T::from_i64(2 * n as i64, bits);
    theta.cos()
}

/// Hexagon-column factor in closed form:
/// `((s + b)^(2m+1) + (s - b)^(2m+1)) / 2s` with `s = sqrt(4 + b^2)`.
pub fn l_closed<T: Real>(m: u32, beta: &T) -> T {
    let bits = beta.bits();
    let s = (T::from_i64(4, bits) + beta.clone() * beta.clone()).sqrt();
    let k = 2 * m + 1;
    let sum = (s.clone() + beta.clone()).powi(k) + (s.clone() - beta.clone()).powi(k);
    sum / (T::from_i64(2, bits) * s)
}

/// Hexagon-column factor from the coupled first-order recurrence
/// `L_m = (4 + 4b^2) L_{m-1} + 4b L'_{m-1}`, `L'_m = 4b L_{m-1} + 4 L'_{m-1}`.
pub fn l_coupled(m: u32, beta: f64) -> (f64, f64) {
    let (mut l, mut lp) = (1.0, 0.0);
    for _ in 0..m {
        (l, lp) = ((4.0 + 4.0 * beta * beta) * l + 4.0 * beta * lp, 4.0 * beta * l + 4.0 * lp);
    }
    (l, lp)
}

/// Hexagon-column factor from `L_m = (8 + 4b^2) L_{m-1} - 16 L_{m-2}`.
pub fn l_recurrence(m: u32, beta: f64) -> f64 {
    let b2 = beta * beta;
    let (mut prev, mut cur) = (1.0, 4.0 + 4.0 * b2);
    if m == 0 {
        return prev;
    }
    for _ in 1..m {
        (prev, cur) = (cur, (8.0 + 4.0 * b2) * cur - 16.0 * prev);
    }
    cur
}

/// Quadrangle-column factor in closed form with `s = sqrt(9 + 16 b^2)`:
/// `(s + 3)/(2s) ((5 + s)/2)^m + (s - 3)/(2s) ((5 - s)/2)^m`.
pub fn p_closed<T: Real>(m: u32, beta: &T) -> T {
    let bits = beta.bits();
    let two = T::from_i64(2, bits);
    let three = T::from_i64(3, bits);
    let five = T::from_i64(5, bits);
    let s = (T::from_i64(9, bits) + T::from_i64(16, bits) * beta.clone() * beta.clone()).sqrt();
    let up = (five.clone() + s.clone()) / two.clone();
    let down = (five - s.clone()) / two.clone();
    let denom = two * s.clone();
    (s.clone() + three.clone()) / denom.clone() * up.powi(m) + (s - three) / denom * down.powi(m)
}

/// State of the alternating quadrangle-column recurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2State {
    /// Column count reached so far.
    pub m: u32,
    pub p: f64,
    pub p_prime: f64,
}

impl G2State {
    pub fn base() -> Self {
        G2State {
            m: 0,
            p: 1.0,
            p_prime: 0.0,
        }
    }
}

/// Adds one column. Odd targets use `(4 p + 2b p', -2b p - p')`, even
/// targets `(4 p - 2b p', 2b p - p')`.
pub fn recurrence_g2_step(state: G2State, beta: f64) -> G2State {
    let (p, q) = (state.p, state.p_prime);
    let (p, p_prime) = if state.m.is_multiple_of(2) {
        (4.0 * p + 2.0 * beta * q, -2.0 * beta * p - q)
    } else {
        (4.0 * p - 2.0 * beta * q, 2.0 * beta * p - q)
    };
    G2State {
        m: state.m + 1,
        p,
        p_prime,
    }
}

pub fn p_recurrence(m: u32, beta: f64) -> f64 {
    (0..m).fold(G2State::base(), |s, _| recurrence_g2_step(s, beta)).p
}

/// Two-column transfer matrices: from `P_{2k-1}` to `P_{2k+1}` (`odd`) or
/// from `P_{2k-2}` to `P_{2k}`.
pub fn two_step_matrix(beta: f64, odd: bool) -> [[f64; 2]; 2] {
    let off = if odd { -10.0 * beta } else { 10.0 * beta };
    [[16.0 + 4.0 * beta * beta, off], [off, 4.0 * beta * beta + 1.0]]
}

/// `P_m` from repeated two-column matrices.
pub fn p_two_step(m: u32, beta: f64) -> f64 {
    let odd = m % 2 == 1;
    let mut v = if odd { [4.0, -2.0 * beta] } else { [1.0, 0.0] };
    let t = two_step_matrix(beta, odd);
    for _ in 0..m / 2 {
        v = [t[0][0] * v[0] + t[0][1] * v[1], t[1][0] * v[0] + t[1][1] * v[1]];
    }
    v[0]
}

/// `P_m` from the second-order recurrence on each parity class:
/// `x_k = (8b^2 + 17) x_{k-1} - 16 (1 - b^2)^2 x_{k-2}`, the trace and
/// determinant of the two-column matrix.
pub fn p_second_order(m: u32, beta: f64) -> f64 {
    let b2 = beta * beta;
    let (x0, x1) = if m % 2 == 1 {
        (4.0, 64.0 + 36.0 * b2)
    } else {
        (1.0, 16.0 + 4.0 * b2)
    };
    let k = m / 2;
    if k == 0 {
        return x0;
    }
    let c1 = 8.0 * b2 + 17.0;
    let c2 = 16.0 * (1.0 - b2) * (1.0 - b2);
    let (mut prev, mut cur) = (x0, x1);
    for _ in 1..k {
        (prev, cur) = (cur, c1 * cur - c2 * prev);
    }
    cur
}

/// `ln L_m(b)` without forming the power.
fn ln_l(m: u32, beta: f64) -> f64 {
    let s = (4.0 + beta * beta).sqrt();
    let (hi, lo) = ((s + beta.abs()), (s - beta.abs()));
    let k = (2 * m + 1) as f64;
    k * hi.ln() + (1.0 + (lo / hi).powf(k)).ln() - (2.0 * s).ln()
}

fn ln_p(m: u32, beta: f64) -> f64 {
    let s = (9.0 + 16.0 * beta * beta).sqrt();
    let up = (5.0 + s) / 2.0;
    let down = (5.0 - s) / 2.0;
    let lead = (s + 3.0) / (2.0 * s);
    let tail = (s - 3.0) / (2.0 * s) * (down / up).powi(m as i32);
    (m as f64) * up.ln() + (lead + tail).ln()
}

/// Natural log of the hexagon-column cylinder count, in `f64`.
pub fn log_count_g1(m: usize, n: usize) -> f64 {
    (0..n).map(|j| ln_l(m as u32, beta(j, n).map(|b| b.value).unwrap_or(0.0))).sum()
}

/// Natural log of the quadrangle-column cylinder count, in `f64`.
pub fn log_count_g2(m: usize, n: usize) -> f64 {
    (0..n).map(|j| ln_p(m as u32, beta(j, n).map(|b| b.value).unwrap_or(0.0))).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Hexagon,
    Quadrangle,
}

struct CylinderFormula {
    column: Column,
    m: u32,
    n: usize,
}

impl IntegerEvaluation for CylinderFormula {
    fn describe(&self) -> String {
        let name = match self.column {
            Column::Hexagon => "hexagon-column",
            Column::Quadrangle => "quadrangle-column",
        };
        format!("{name} closed form at m={}, n={}", self.m, self.n)
    }

    fn log2_magnitude(&self) -> f64 {
        let ln = match self.column {
            Column::Hexagon => log_count_g1(self.m as usize, self.n),
            Column::Quadrangle => log_count_g2(self.m as usize, self.n),
        };
        ln / std::f64::consts::LN_2
    }

    fn evaluate<T: Real>(&self, bits: usize) -> T {
        match self.column {
            Column::Hexagon => {
                // (1/2^n) prod (1/s) [(s+b)^(2m+1) + (s-b)^(2m+1)]
                let two = T::from_i64(2, bits);
                let mut acc = T::from_i64(1, bits);
                for j in 0..self.n {
                    let b = beta_real::<T>(j, self.n, bits);
                    let s = (T::from_i64(4, bits) + b.clone() * b.clone()).sqrt();
                    let k = 2 * self.m + 1;
                    let bracket = (s.clone() + b.clone()).powi(k) + (s.clone() - b).powi(k);
                    acc = acc * bracket / (two.clone() * s);
                }
                acc
            }
            Column::Quadrangle => (0..self.n).fold(T::from_i64(1, bits), |acc, j| {
                acc * p_closed(self.m, &beta_real::<T>(j, self.n, bits))
            }),
        }
    }
}

fn cylinder_count(column: Column, m: usize, n: usize, precision: Precision) -> Result<MatchCount> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let m = u32::try_from(m).map_err(|_| Error::InvalidParameter(format!("m = {m} is too large")))?;
    round_to_integer(&CylinderFormula { column, m, n }, precision).map(MatchCount::new)
}

/// Perfect matchings of the hexagon-column cylinder with `2n` columns of
/// `m` hexagons.
pub fn count_g1(m: usize, n: usize, precision: Precision) -> Result<MatchCount> {
    cylinder_count(Column::Hexagon, m, n, precision)
}

/// Perfect matchings of the quadrangle-column cylinder with `2n` columns of
/// `m` quadrangles.
pub fn count_g2(m: usize, n: usize, precision: Precision) -> Result<MatchCount> {
    cylinder_count(Column::Quadrangle, m, n, precision)
}

/// Boxed plane partitions in an `a x b x c` box,
/// `prod_{i,j,k} (i + j + k - 1) / (i + j + k - 2)`, exactly.
pub fn macmahon(a: usize, b: usize, c: usize) -> Result<BigUint> {
    if a == 0 || b == 0 || c == 0 {
        return Err(Error::InvalidParameter(format!(
            "box sides must be positive, got {a}, {b}, {c}"
        )));
    }
    // multiplicity of each sum i + j + k
    let mut sums: BTreeMap<usize, i64> = BTreeMap::new();
    for i in 1..=a {
        for j in 1..=b {
            for k in 1..=c {
                *sums.entry(i + j + k).or_default() += 1;
            }
        }
    }
    let mut exponent: BTreeMap<usize, i64> = BTreeMap::new();
    for (&s, &count) in &sums {
        *exponent.entry(s - 1).or_default() += count;
        *exponent.entry(s - 2).or_default() -= count;
    }
    let mut numerator = BigUint::one();
    let mut denominator = BigUint::one();
    for (&t, &e) in &exponent {
        let base = BigUint::from(t);
        if e > 0 {
            numerator *= Pow::pow(&base, e as u32);
        } else if e < 0 {
            denominator *= Pow::pow(&base, (-e) as u32);
        }
    }
    let (quotient, remainder) = numerator.div_rem(&denominator);
    if !remainder.is_zero() {
        return Err(Error::NonIntegralResult(format!(
            "box ({a}, {b}, {c}) gives {numerator}/{denominator}"
        )));
    }
    Ok(quotient)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::BigReal;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    fn all_betas() -> Vec<f64> {
        (1..=8).flat_map(|n| (0..n).map(move |j| beta(j, n).unwrap().value)).collect()
    }

    #[test]
    fn beta_branches() {
        assert_eq!(beta(0, 1).unwrap().value, 1.0);
        assert!((beta(0, 2).unwrap().value - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((beta(1, 3).unwrap().value - 0.5).abs() < 1e-15);
        assert!(beta(2, 2).is_err());
    }

    #[test]
    fn l_base_cases() {
        for b in [-0.7, 0.0, 0.3, 1.0] {
            assert!((l_closed(0, &b) - 1.0).abs() < 1e-12);
            assert!(rel(l_closed(1, &b), 4.0 + 4.0 * b * b) < 1e-14);
        }
        assert!((l_closed(1, &1.0) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn l_paths_agree() {
        for m in 0..=50 {
            for b in all_betas() {
                let closed = l_closed(m, &b);
                assert!(rel(closed, l_recurrence(m, b)) < 1e-10);
                assert!(rel(closed, l_coupled(m, b).0) < 1e-10);
                assert!((ln_l(m, b) - closed.ln()).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn g2_recurrence_base_and_two_steps() {
        let b = 0.37;
        let s1 = recurrence_g2_step(G2State::base(), b);
        assert_eq!((s1.p, s1.p_prime), (4.0, -2.0 * b));
        let two = recurrence_g2_step(recurrence_g2_step(G2State::base(), 1.0), 1.0);
        assert_eq!((two.m, two.p, two.p_prime), (2, 20.0, 10.0));
    }

    #[test]
    fn g2_paths_agree() {
        for m in 0..=30 {
            for b in all_betas() {
                let closed = p_closed(m, &b);
                assert!(rel(closed, p_recurrence(m, b)) < 1e-10, "m={m} b={b}");
                assert!(rel(closed, p_two_step(m, b)) < 1e-10, "m={m} b={b}");
                assert!(rel(closed, p_second_order(m, b)) < 1e-10, "m={m} b={b}");
                assert!((ln_p(m, b) - closed.ln()).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn small_cylinder_counts() {
        let p = Precision::default();
        assert_eq!(count_g1(1, 1, p).unwrap(), 8);
        assert_eq!(count_g1(0, 1, p).unwrap(), 1);
        assert_eq!(count_g2(1, 1, p).unwrap(), 4);
        assert_eq!(count_g2(0, 3, p).unwrap(), 1);
        assert_eq!(count_g2(2, 1, p).unwrap(), 20);
    }

    #[test]
    fn extended_precision_agrees_with_f64_where_both_work() {
        let f = CylinderFormula {
            column: Column::Hexagon,
            m: 3,
            n: 2,
        };
        let a: f64 = f.evaluate(53);
        let b: BigReal = f.evaluate(200);
        assert!(rel(a, b.to_f64()) < 1e-13);
    }

    #[test]
    fn large_counts_take_the_extended_path() {
        let c = count_g1(20, 20, Precision::default()).unwrap();
        assert!((c.ln() - log_count_g1(20, 20)).abs() < 1e-9);
        let c = count_g2(20, 20, Precision::default()).unwrap();
        assert!((c.ln() - log_count_g2(20, 20)).abs() < 1e-9);
    }

    #[test]
    fn macmahon_values() {
        assert_eq!(macmahon(1, 1, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(macmahon(1, 1, 2).unwrap(), BigUint::from(3u32));
        assert_eq!(macmahon(2, 2, 2).unwrap(), BigUint::from(20u32));
        // binomial(a + b, a) when c = 1
        assert_eq!(macmahon(3, 4, 1).unwrap(), BigUint::from(35u32));
        assert!(macmahon(0, 1, 1).is_err());
    }
}
