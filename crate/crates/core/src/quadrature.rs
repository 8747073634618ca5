//! Adaptive Gauss–Legendre quadrature in one and two dimensions.
//!
//! Every panel is integrated once whole and once as two halves; the
//! difference is the panel's error estimate and the halves are kept as its
//! value. Panels are refined worst-first until the summed estimate is below
//! the absolute tolerance. Logarithmic endpoint singularities converge
//! because the refinement concentrates where the estimate is large.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Absolute error target.
    pub tolerance: f64,
    /// Maximum number of bisections of any single panel.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            tolerance: 1e-11,
            max_depth: 60,
        }
    }
}

impl QuadratureSpec {
    pub fn new(tolerance: f64, max_depth: u32) -> Result<Self> {
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerance must be positive, got {tolerance}"
            )));
        }
        Ok(QuadratureSpec {
            tolerance,
            max_depth,
        })
    }

    /// Tolerance of `10^-digits`.
    pub fn from_digits(digits: u32) -> Self {
        QuadratureSpec {
            tolerance: 10f64.powi(-(digits as i32)),
            ..Self::default()
        }
    }
}

/// A value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }

    pub fn scale(self, k: f64) -> Self {
        Estimate {
            value: self.value * k,
            error: self.error * k.abs(),
        }
    }
}

const NODES: usize = 12;
const EVALUATION_BUDGET: usize = 4_000_000;

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rule() -> GaussLegendre {
    GaussLegendre::new(NODES).expect("Gauss-Legendre rule of fixed positive degree")
}

fn panel<F: FnMut(f64) -> f64>(rule: &GaussLegendre, f: &mut F, lo: f64, hi: f64, depth: u32) -> Panel {
    let mid = 0.5 * (lo + hi);
    let whole = rule.integrate(lo, hi, &mut *f);
    let halves = rule.integrate(lo, mid, &mut *f) + rule.integrate(mid, hi, &mut *f);
    // never claim better than one ulp of the panel value
    let error = if halves.is_finite() && whole.is_finite() {
        (halves - whole).abs().max(f64::EPSILON * halves.abs())
    } else {
        f64::INFINITY
    };
    Panel {
        lo,
        hi,
        value: halves,
        error,
        depth,
    }
}

/// Integrates `f` over `[lo, hi]` to the requested absolute tolerance.
pub fn integrate_1d<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if lo == hi {
        return Ok(Estimate::exact(0.0));
    }
    let rule = rule();
    let mut heap = BinaryHeap::new();
    heap.push(panel(&rule, &mut f, lo, hi, 0));
    let mut evaluations = 3 * NODES;
    loop {
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= spec.tolerance {
            let mut panels: Vec<Panel> = heap.into_vec();
            panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            let value = panels.iter().map(|p| p.value).sum();
            return Ok(Estimate { value, error });
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= spec.max_depth || evaluations > EVALUATION_BUDGET {
            return Err(Error::QuadratureNonConvergence {
                tolerance: spec.tolerance,
                estimate: error,
                depth: worst.depth,
            });
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        heap.push(panel(&rule, &mut f, worst.lo, mid, worst.depth + 1));
        heap.push(panel(&rule, &mut f, mid, worst.hi, worst.depth + 1));
        evaluations += 6 * NODES;
    }
}

struct Cell {
    x: (f64, f64),
    y: (f64, f64),
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn tensor<F: FnMut(f64, f64) -> f64>(rule: &GaussLegendre, f: &mut F, x: (f64, f64), y: (f64, f64)) -> f64 {
    rule.integrate(x.0, x.1, |s| rule.integrate(y.0, y.1, |t| f(s, t)))
}

fn cell<F: FnMut(f64, f64) -> f64>(rule: &GaussLegendre, f: &mut F, x: (f64, f64), y: (f64, f64), depth: u32) -> Cell {
    let whole = tensor(rule, f, x, y);
    let mx = 0.5 * (x.0 + x.1);
    let my = 0.5 * (y.0 + y.1);
    let quarters = tensor(rule, f, (x.0, mx), (y.0, my))
        + tensor(rule, f, (mx, x.1), (y.0, my))
        + tensor(rule, f, (x.0, mx), (my, y.1))
        + tensor(rule, f, (mx, x.1), (my, y.1));
    let error = if quarters.is_finite() && whole.is_finite() {
        (quarters - whole).abs().max(f64::EPSILON * quarters.abs())
    } else {
        f64::INFINITY
    };
    Cell {
        x,
        y,
        value: quarters,
        error,
        depth,
    }
}

/// Tensor-product quadrature over a rectangle, refining the worst cell into
/// quadrants. Integrable point singularities are isolated by the refinement.
pub fn integrate_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    x: (f64, f64),
    y: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let rule = rule();
    let mut heap = BinaryHeap::new();
    heap.push(cell(&rule, &mut f, x, y, 0));
    let per_cell = 5 * NODES * NODES;
    let mut evaluations = per_cell;
    loop {
        let error: f64 = heap.iter().map(|c| c.error).sum();
        if error <= spec.tolerance {
            let mut cells = heap.into_vec();
            cells.sort_by(|a, b| a.x.0.total_cmp(&b.x.0).then(a.y.0.total_cmp(&b.y.0)));
            let value = cells.iter().map(|c| c.value).sum();
            return Ok(Estimate { value, error });
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= spec.max_depth || evaluations > 20 * EVALUATION_BUDGET {
            return Err(Error::QuadratureNonConvergence {
                tolerance: spec.tolerance,
                estimate: error,
                depth: worst.depth,
            });
        }
        let mx = 0.5 * (worst.x.0 + worst.x.1);
        let my = 0.5 * (worst.y.0 + worst.y.1);
        for xs in [(worst.x.0, mx), (mx, worst.x.1)] {
            for ys in [(worst.y.0, my), (my, worst.y.1)] {
                heap.push(cell(&rule, &mut f, xs, ys, worst.depth + 1));
                evaluations += per_cell;
            }
        }
    }
}
