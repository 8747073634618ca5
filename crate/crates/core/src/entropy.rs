//! Dimer entropies: the cylinder limits as one-dimensional integrals, the
//! square-lattice constant, the torus formula for a characteristic
//! polynomial, and finite-size values from exact counts.
//!
//! Every entropy here is `(2/N) log M` in the limit, i.e. per dimer.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::closed_forms::{count_g1, count_g2, macmahon};
use crate::error::{Error, Result};
use crate::numeric::{ln_biguint, Cplx, Precision};
use crate::quadrature::{integrate_1d, integrate_2d, Estimate, QuadratureSpec};

/// `(2/3pi) int_0^{pi/2} log(cos x + sqrt(4 + cos^2 x)) dx`, the limit for
/// hexagon-column cylinders.
pub fn entropy_g1(spec: &QuadratureSpec) -> Result<Estimate> {
    let e = integrate_1d(|x: f64| (x.cos() + (4.0 + x.cos().powi(2)).sqrt()).ln(), 0.0, PI / 2.0, spec)?;
    Ok(e.scale(2.0 / (3.0 * PI)))
}

/// `(1/2pi) int_0^{pi/2} log((5 + sqrt(25 - 16 cos^2 t)) / 2) dt`, the limit
/// for quadrangle-column cylinders.
pub fn entropy_g2(spec: &QuadratureSpec) -> Result<Estimate> {
    let f = |t: f64| ((5.0 + (25.0 - 16.0 * t.cos().powi(2)).sqrt()) / 2.0).ln();
    Ok(integrate_1d(f, 0.0, PI / 2.0, spec)?.scale(1.0 / (2.0 * PI)))
}

/// `(1/6pi) int_0^pi log(5 - cos x + sqrt(cos^2 x - 10 cos x + 9)) dx`: the
/// torus polynomial `10 - 4(z + 1/z) - (w + 1/w)` with one variable
/// integrated out in closed form.
pub fn kos_entropy_reduced_g1t(spec: &QuadratureSpec) -> Result<Estimate> {
    Ok(integrate_1d(torus_section, 0.0, PI, spec)?.scale(1.0 / (6.0 * PI)))
}

fn torus_section(x: f64) -> f64 {
    let c = x.cos();
    // c^2 - 10c + 9 = (1 - c)(9 - c) stays nonnegative without cancellation
    (5.0 - c + ((1.0 - c) * (9.0 - c)).sqrt()).ln()
}

/// Both sides of
/// `4 int_0^{pi/2} log(cos x + sqrt(4 + cos^2 x)) = int_0^pi log(5 - cos x + sqrt(cos^2 x - 10 cos x + 9))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub difference: f64,
}

/// Evaluates both sides of the cylinder/torus integral identity from scratch.
pub fn verify_torus_cylinder_identity(spec: &QuadratureSpec) -> Result<IdentityCheck> {
    let lhs = integrate_1d(|x: f64| (x.cos() + (4.0 + x.cos().powi(2)).sqrt()).ln(), 0.0, PI / 2.0, spec)?.scale(4.0);
    let rhs = integrate_1d(torus_section, 0.0, PI, spec)?;
    Ok(IdentityCheck {
        lhs,
        rhs,
        difference: (lhs.value - rhs.value).abs(),
    })
}

/// Catalan's constant by Cohen–Villegas–Zagier acceleration of
/// `sum (-1)^k / (2k + 1)^2`.
pub fn catalan_alternating() -> f64 {
    const TERMS: i32 = 24;
    let n = TERMS as f64;
    let mut d = (3.0 + 8f64.sqrt()).powi(TERMS);
    d = (d + 1.0 / d) / 2.0;
    let (mut b, mut c, mut s) = (-1.0, -d, 0.0);
    for k in 0..TERMS {
        let k = k as f64;
        c = b - c;
        s += c / ((2.0 * k + 1.0) * (2.0 * k + 1.0));
        b *= (k + n) * (k - n) / ((k + 0.5) * (k + 1.0));
    }
    s / d
}

/// Catalan's constant by Ramanujan's series
/// `pi/8 log(2 + sqrt 3) + 3/8 sum (k!)^2 / ((2k)! (2k + 1)^2)`.
pub fn catalan_ramanujan() -> f64 {
    let mut ratio = 1.0; // (k!)^2 / (2k)!
    let mut sum = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        sum += ratio / ((2.0 * kf + 1.0) * (2.0 * kf + 1.0));
        ratio *= (kf + 1.0) / (2.0 * (2.0 * kf + 1.0));
    }
    PI / 8.0 * (2.0 + 3f64.sqrt()).ln() + 3.0 / 8.0 * sum
}

/// `2G/pi` for the square lattice. The error is the disagreement of the two
/// Catalan series.
pub fn entropy_quad_lattice() -> Estimate {
    let a = catalan_alternating();
    let b = catalan_ramanujan();
    Estimate {
        value: 2.0 * a / PI,
        error: 2.0 * (a - b).abs() / PI,
    }
}

/// Known limit for boxed plane partitions in a cube,
/// `((9/2) ln 3 - 6 ln 2) / 3` per dimer.
pub fn hexagon_entropy_limit() -> f64 {
    (4.5 * 3f64.ln() - 6.0 * 2f64.ln()) / 3.0
}

/// `(2/N) log M` for the `a x a x a` hexagon, `N = 6a^2`.
pub fn hexagon_entropy_finite(a: usize) -> Result<f64> {
    let count = macmahon(a, a, a)?;
    Ok(2.0 * ln_biguint(&count) / (6 * a * a) as f64)
}

/// `(2/12mn) log M` for the hexagon-column cylinder, from the exact count.
pub fn g1_entropy_finite(m: usize, n: usize, precision: Precision) -> Result<f64> {
    let count = count_g1(m, n, precision)?;
    Ok(2.0 * count.ln() / (12 * m * n) as f64)
}

/// `(2/8mn) log M` for the quadrangle-column cylinder, from the exact count.
pub fn g2_entropy_finite(m: usize, n: usize, precision: Precision) -> Result<f64> {
    let count = count_g2(m, n, precision)?;
    Ok(2.0 * count.ln() / (8 * m * n) as f64)
}

/// Laurent polynomial `P(z, w)` of a doubly periodic dimer model with the
/// number of vertices in its fundamental domain.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicPolynomial {
    coefficients: BTreeMap<(i32, i32), i64>,
    domain_size: usize,
}

impl CharacteristicPolynomial {
    pub fn new(coefficients: impl IntoIterator<Item = ((i32, i32), i64)>, domain_size: usize) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::InvalidParameter("fundamental domain must be nonempty".into()));
        }
        let mut map = BTreeMap::new();
        for (k, c) in coefficients {
            *map.entry(k).or_insert(0) += c;
        }
        map.retain(|_, c| *c != 0);
        if map.is_empty() {
            return Err(Error::InvalidParameter("characteristic polynomial is zero".into()));
        }
        Ok(CharacteristicPolynomial {
            coefficients: map,
            domain_size,
        })
    }

    /// `10 - 4(z + 1/z) - (w + 1/w)` on a 12-vertex fundamental domain:
    /// the hexagon-column lattice on a torus.
    pub fn g1_torus() -> Self {
        Self::new(
            [((0, 0), 10), ((1, 0), -4), ((-1, 0), -4), ((0, 1), -1), ((0, -1), -1)],
            12,
        )
        .expect("fixed nonzero polynomial")
    }

    pub fn coefficients(&self) -> &BTreeMap<(i32, i32), i64> {
        &self.coefficients
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    /// `P(e^{ix}, e^{iy})`.
    pub fn eval(&self, x: f64, y: f64) -> Cplx<f64> {
        let (mut re, mut im) = (0.0, 0.0);
        for (&(a, b), &c) in &self.coefficients {
            let t = a as f64 * x + b as f64 * y;
            re += c as f64 * t.cos();
            im += c as f64 * t.sin();
        }
        Cplx::new(re, im)
    }

    /// Whether `P` is unchanged by `z -> 1/z` and, separately, by `w -> 1/w`.
    fn is_reflection_symmetric(&self) -> bool {
        self.coefficients.iter().all(|(&(a, b), &c)| {
            self.coefficients.get(&(-a, b)) == Some(&c) && self.coefficients.get(&(a, -b)) == Some(&c)
        })
    }

    /// Coefficients of `w^min_b * P` as a polynomial in `w`, at `z = e^{ix}`.
    fn section(&self, x: f64) -> Vec<Cplx<f64>> {
        let lo = self.coefficients.keys().map(|k| k.1).min().unwrap_or(0);
        let hi = self.coefficients.keys().map(|k| k.1).max().unwrap_or(0);
        let mut poly = vec![Cplx::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (&(a, b), &c) in &self.coefficients {
            let t = a as f64 * x;
            let slot = &mut poly[(b - lo) as usize];
            *slot = Cplx::new(slot.re + c as f64 * t.cos(), slot.im + c as f64 * t.sin());
        }
        poly
    }
}

/// How the torus integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KosMode {
    /// Tensor quadrature over both angles, refined toward zeros of `P`.
    Direct,
    /// The inner angle integrated exactly through Jensen's formula, leaving
    /// a one-dimensional quadrature.
    Reduced,
}

/// `(2 / (|G| (2pi)^2)) int int log |P(e^{ix}, e^{iy})| dx dy`.
pub fn kos_entropy(p: &CharacteristicPolynomial, spec: &QuadratureSpec, mode: KosMode) -> Result<Estimate> {
    check_nonnegative(p)?;
    let symmetric = p.is_reflection_symmetric();
    let norm = 2.0 / (p.domain_size as f64 * 4.0 * PI * PI);
    match mode {
        KosMode::Direct => {
            let f = |x: f64, y: f64| p.eval(x, y).abs().ln();
            if symmetric {
                Ok(integrate_2d(f, (0.0, PI), (0.0, PI), spec)?.scale(4.0 * norm))
            } else {
                Ok(integrate_2d(f, (-PI, PI), (-PI, PI), spec)?.scale(norm))
            }
        }
        KosMode::Reduced => {
            let f = |x: f64| jensen_log_mean(&p.section(x));
            let outer = if symmetric {
                integrate_1d(f, 0.0, PI, spec)?.scale(2.0)
            } else {
                integrate_1d(f, -PI, PI, spec)?
            };
            Ok(outer.scale(2.0 * PI * norm))
        }
    }
}

fn check_nonnegative(p: &CharacteristicPolynomial) -> Result<()> {
    const GRID: usize = 64;
    let scale: f64 = p.coefficients.values().map(|c| c.abs() as f64).sum();
    let tolerance = 1e-12 * scale;
    for i in 0..GRID {
        for k in 0..GRID {
            let x = 2.0 * PI * i as f64 / GRID as f64;
            let y = 2.0 * PI * k as f64 / GRID as f64;
            let v = p.eval(x, y);
            if v.im.abs() <= tolerance && v.re < -tolerance {
                return Err(Error::NegativeArgument { value: v.re, x, y });
            }
        }
    }
    Ok(())
}

/// `(1/2pi) int log |q(e^{iy})| dy` for a polynomial given low degree
/// first: `log |lead| + sum log max(1, |root|)`.
fn jensen_log_mean(poly: &[Cplx<f64>]) -> f64 {
    let mut coeffs = poly.to_vec();
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() == 0.0) {
        coeffs.pop();
    }
    let lead = *coeffs.last().expect("nonempty polynomial");
    let roots = polynomial_roots(&coeffs);
    lead.abs().ln() + roots.iter().map(|r| r.abs().max(1.0).ln()).sum::<f64>()
}

/// Roots by Durand–Kerner iteration. Degree two is solved directly.
fn polynomial_roots(coeffs: &[Cplx<f64>]) -> Vec<Cplx<f64>> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let monic: Vec<Cplx<f64>> = coeffs.iter().map(|&c| c / lead).collect();
    match degree {
        0 => Vec::new(),
        1 => vec![-monic[0]],
        2 => {
            let (b, c) = (monic[1], monic[0]);
            let disc = (b * b - c * Cplx::new(4.0, 0.0)).sqrt();
            // larger root first, smaller from the product to avoid cancellation
            let sign = if (b.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
            let big = (b + disc.scale(&sign)).scale(&-0.5);
            if big.abs() == 0.0 {
                return vec![big, big];
            }
            vec![big, c / big]
        }
        _ => {
            let seed = Cplx::new(0.4, 0.9);
            let mut roots: Vec<Cplx<f64>> = (0..degree).map(|k| seed.powu(k as u32)).collect();
            for _ in 0..500 {
                let mut shift = 0.0f64;
                for i in 0..degree {
                    let z = roots[i];
                    let value = monic.iter().rev().fold(Cplx::new(0.0, 0.0), |acc, &c| acc * z + c);
                    let denom = (0..degree)
                        .filter(|&k| k != i)
                        .fold(Cplx::new(1.0, 0.0), |acc, k| acc * (z - roots[k]));
                    let step = value / denom;
                    roots[i] = z - step;
                    shift = shift.max(step.abs());
                }
                if shift < 1e-15 {
                    break;
                }
            }
            roots
        }
    }
}

/// A named entropy integral or constant.
pub trait EntropyFormula {
    fn name(&self) -> &'static str;
    fn evaluate(&self, spec: &QuadratureSpec) -> Result<Estimate>;
}

type Evaluator = fn(&QuadratureSpec) -> Result<Estimate>;

struct Integral {
    name: &'static str,
    run: Evaluator,
}

impl EntropyFormula for Integral {
    fn name(&self) -> &'static str {
        self.name
    }

    fn evaluate(&self, spec: &QuadratureSpec) -> Result<Estimate> {
        (self.run)(spec)
    }
}

fn torus_direct(spec: &QuadratureSpec) -> Result<Estimate> {
    kos_entropy(&CharacteristicPolynomial::g1_torus(), spec, KosMode::Direct)
}

fn torus_jensen(spec: &QuadratureSpec) -> Result<Estimate> {
    kos_entropy(&CharacteristicPolynomial::g1_torus(), spec, KosMode::Reduced)
}

/// Ordered collection of entropy formulas, looked up by name.
pub struct EntropyRegistry {
    formulas: Vec<Box<dyn EntropyFormula>>,
}

impl Default for EntropyRegistry {
    fn default() -> Self {
        let table: [(&'static str, Evaluator); 7] = [
            ("g1-cylinder", entropy_g1),
            ("g2-cylinder", entropy_g2),
            ("quad-lattice", |_| Ok(entropy_quad_lattice())),
            ("hexagon-limit", |_| Ok(Estimate::exact(hexagon_entropy_limit()))),
            ("g1-torus-reduced", kos_entropy_reduced_g1t),
            ("g1-torus-jensen", torus_jensen),
            ("g1-torus-2d", torus_direct),
        ];
        EntropyRegistry {
            formulas: table
                .into_iter()
                .map(|(name, run)| Box::new(Integral { name, run }) as Box<dyn EntropyFormula>)
                .collect(),
        }
    }
}

impl EntropyRegistry {
    pub fn register(&mut self, formula: Box<dyn EntropyFormula>) {
        self.formulas.push(formula);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.formulas.iter().map(|f| f.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn EntropyFormula> {
        self.formulas.iter().find(|f| f.name() == name).map(|f| f.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn EntropyFormula> {
        self.formulas.iter().map(|f| f.as_ref())
    }
}

impl fmt::Debug for EntropyRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn integrand_endpoints() {
        let g1 = |x: f64| (x.cos() + (4.0 + x.cos().powi(2)).sqrt()).ln();
        assert!((g1(PI / 2.0) - 2f64.ln()).abs() < 1e-15);
        assert!((torus_section(0.0) - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn cylinder_limits() {
        let g1 = entropy_g1(&spec()).unwrap();
        assert!((g1.value - 0.3344).abs() < 5e-4, "{g1:?}");
        assert!(g1.error < 1e-9);
        let g2 = entropy_g2(&spec()).unwrap();
        assert!((g2.value - 0.3770).abs() < 5e-4, "{g2:?}");
    }

    #[test]
    fn catalan_series_agree() {
        let a = catalan_alternating();
        let b = catalan_ramanujan();
        assert!((a - 0.915_965_594_177_219).abs() < 1e-13, "{a}");
        assert!((a - b).abs() < 1e-13, "{a} {b}");
        assert!((entropy_quad_lattice().value - 0.58312).abs() < 5e-5);
    }

    #[test]
    fn torus_identity_and_modes() {
        let check = verify_torus_cylinder_identity(&spec()).unwrap();
        assert!(check.difference < 1e-8, "{check:?}");
        let g1 = entropy_g1(&spec()).unwrap().value;
        let reduced = kos_entropy_reduced_g1t(&spec()).unwrap().value;
        assert!((g1 - reduced).abs() < 1e-8);
        let jensen = kos_entropy(&CharacteristicPolynomial::g1_torus(), &spec(), KosMode::Reduced).unwrap();
        assert!((jensen.value - g1).abs() < 1e-8, "{jensen:?}");
    }

    #[test]
    fn constant_polynomial_has_zero_entropy() {
        let one = CharacteristicPolynomial::new([((0, 0), 1)], 1).unwrap();
        for mode in [KosMode::Direct, KosMode::Reduced] {
            assert!(kos_entropy(&one, &spec(), mode).unwrap().value.abs() < 1e-12);
        }
    }

    #[test]
    fn negative_polynomial_is_rejected() {
        let p = CharacteristicPolynomial::new([((0, 0), 1), ((1, 0), 1), ((-1, 0), 1)], 2).unwrap();
        assert!(matches!(
            kos_entropy(&p, &spec(), KosMode::Reduced),
            Err(Error::NegativeArgument { .. })
        ));
    }

    #[test]
    fn jensen_handles_higher_degree() {
        // (w - 2)(w - 3)(w - 0.5): log 2 + log 3
        let roots = [2.0, 3.0, 0.5];
        let mut poly = vec![Cplx::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![Cplx::new(0.0, 0.0); poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i + 1] = next[i + 1] + c;
                next[i] = next[i] - c.scale(&r);
            }
            poly = next;
        }
        assert!((jensen_log_mean(&poly) - 6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn hexagon_small_cases() {
        assert!((hexagon_entropy_finite(1).unwrap() - 2f64.ln() / 3.0).abs() < 1e-15);
        assert!((hexagon_entropy_finite(2).unwrap() - 20f64.ln() / 12.0).abs() < 1e-15);
        assert!((hexagon_entropy_limit() - 0.2616).abs() < 1e-4);
        assert!(hexagon_entropy_finite(0).is_err());
    }

    #[test]
    fn registry_lists_and_finds() {
        let r = EntropyRegistry::default();
        assert!(r.get("g1-cylinder").is_some());
        assert!(r.get("nope").is_none());
        assert_eq!(r.names().len(), 7);
    }
}
