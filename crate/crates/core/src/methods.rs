//! Interchangeable counting methods behind one trait, so that any two can be
//! run on the same input and compared.

use std::fmt;

use crate::closed_forms::{count_g1, count_g2, macmahon};
use crate::error::{Error, Result};
use crate::fkt::{count_fkt, count_with_orientation, flip_edge, kasteleyn_orient};
use crate::lattices::LatticeSpec;
use crate::numeric::Precision;
use crate::plane_graph::{count_bruteforce, MatchCount, PlaneGraph, BRUTE_FORCE_LIMIT};
use crate::symmetry::{count_product, SymmetricQuotient};

/// What to count: a named lattice, or a graph or quotient read from a file.
#[derive(Debug, Clone)]
pub enum CountTarget {
    Lattice(LatticeSpec),
    Graph(PlaneGraph),
    Quotient(SymmetricQuotient),
}

impl CountTarget {
    pub fn vertex_count(&self) -> usize {
        match self {
            CountTarget::Lattice(spec) => spec.vertex_count(),
            CountTarget::Graph(g) => g.vertex_count(),
            CountTarget::Quotient(q) => q.expanded_order(),
        }
    }

    /// The full plane graph; quotients are expanded.
    pub fn graph(&self) -> Result<PlaneGraph> {
        match self {
            CountTarget::Lattice(spec) => spec.graph(),
            CountTarget::Graph(g) => Ok(g.clone()),
            CountTarget::Quotient(q) => q.expand(),
        }
    }

    pub fn quotient(&self) -> Result<Option<SymmetricQuotient>> {
        match self {
            CountTarget::Lattice(spec) => spec.quotient(),
            CountTarget::Graph(_) => Ok(None),
            CountTarget::Quotient(q) => Ok(Some(q.clone())),
        }
    }
}

impl fmt::Display for CountTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountTarget::Lattice(spec) => write!(f, "{spec}"),
            CountTarget::Graph(g) => write!(f, "graph with {} vertices", g.vertex_count()),
            CountTarget::Quotient(q) => write!(f, "quotient of order {} with n={}", q.sector_order(), q.n()),
        }
    }
}

impl From<LatticeSpec> for CountTarget {
    fn from(spec: LatticeSpec) -> Self {
        CountTarget::Lattice(spec)
    }
}

pub trait CountingMethod {
    fn name(&self) -> &'static str;
    fn supports(&self, target: &CountTarget) -> bool;
    fn count_supported(&self, target: &CountTarget, precision: Precision) -> Result<MatchCount>;

    fn count(&self, target: &CountTarget, precision: Precision) -> Result<MatchCount> {
        if !self.supports(target) {
            return Err(Error::Unsupported {
                method: self.name().to_string(),
                target: target.to_string(),
            });
        }
        self.count_supported(target, precision)
    }
}

/// Exhaustive enumeration, limited to small graphs.
pub struct BruteForce;

impl CountingMethod for BruteForce {
    fn name(&self) -> &'static str {
        "brute"
    }

    fn supports(&self, target: &CountTarget) -> bool {
        target.vertex_count() <= BRUTE_FORCE_LIMIT
    }

    fn count_supported(&self, target: &CountTarget, _: Precision) -> Result<MatchCount> {
        count_bruteforce(&target.graph()?)
    }
}

/// Pfaffian orientation and an exact integer determinant.
pub struct Fkt;

impl CountingMethod for Fkt {
    fn name(&self) -> &'static str {
        "fkt"
    }

    fn supports(&self, _: &CountTarget) -> bool {
        true
    }

    fn count_supported(&self, target: &CountTarget, _: Precision) -> Result<MatchCount> {
        count_fkt(&target.graph()?)
    }
}

/// Product of quotient determinants over the rotation weights.
pub struct Product;

impl CountingMethod for Product {
    fn name(&self) -> &'static str {
        "product"
    }

    fn supports(&self, target: &CountTarget) -> bool {
        match target {
            CountTarget::Lattice(spec) => spec.family().is_cylinder(),
            CountTarget::Graph(_) => false,
            CountTarget::Quotient(_) => true,
        }
    }

    fn count_supported(&self, target: &CountTarget, precision: Precision) -> Result<MatchCount> {
        let q = target.quotient()?.expect("supported targets have a quotient");
        count_product(&q, precision)
    }
}

/// Explicit formulas: the two cylinder families and boxed plane partitions.
pub struct Closed;

impl CountingMethod for Closed {
    fn name(&self) -> &'static str {
        "closed"
    }

    fn supports(&self, target: &CountTarget) -> bool {
        matches!(
            target,
            CountTarget::Lattice(LatticeSpec::G1Cylinder { .. } | LatticeSpec::G2Cylinder { .. } | LatticeSpec::Hexagon { .. })
        )
    }

    fn count_supported(&self, target: &CountTarget, precision: Precision) -> Result<MatchCount> {
        match *target {
            CountTarget::Lattice(LatticeSpec::G1Cylinder { m, n }) => count_g1(m, n, precision),
            CountTarget::Lattice(LatticeSpec::G2Cylinder { m, n }) => count_g2(m, n, precision),
            CountTarget::Lattice(LatticeSpec::Hexagon { a, b, c }) => macmahon(a, b, c).map(MatchCount::new),
            _ => unreachable!("guarded by supports"),
        }
    }
}

/// FKT with one interior edge reversed after orienting. The orientation is
/// then not Pfaffian, so counts are generally wrong; used as a negative
/// control for cross-method verification.
pub struct CorruptedFkt;

impl CorruptedFkt {
    fn victim(g: &PlaneGraph) -> Option<(usize, usize)> {
        let outer = g.outer_face();
        g.edges().iter().copied().find(|&(u, v)| {
            let left = g.dart_face(u, v);
            let right = g.dart_face(v, u);
            left != right && left != Some(outer) && right != Some(outer)
        })
    }
}

impl CountingMethod for CorruptedFkt {
    fn name(&self) -> &'static str {
        "fkt"
    }

    fn supports(&self, _: &CountTarget) -> bool {
        true
    }

    fn count_supported(&self, target: &CountTarget, _: Precision) -> Result<MatchCount> {
        let g = target.graph()?;
        let good = kasteleyn_orient(&g)?;
        let bad = match Self::victim(&g) {
            Some(edge) => flip_edge(&good, edge),
            None => good,
        };
        count_with_orientation(&g, &bad)
    }
}

/// Ordered set of counting methods, looked up by name.
pub struct MethodRegistry {
    methods: Vec<Box<dyn CountingMethod>>,
}

impl Default for MethodRegistry {
    fn default() -> Self {
        MethodRegistry {
            methods: vec![Box::new(BruteForce), Box::new(Fkt), Box::new(Product), Box::new(Closed)],
        }
    }
}

impl MethodRegistry {
    /// The standard methods with FKT replaced by [`CorruptedFkt`].
    pub fn with_fault_injection() -> Self {
        MethodRegistry {
            methods: vec![Box::new(BruteForce), Box::new(CorruptedFkt), Box::new(Product), Box::new(Closed)],
        }
    }

    pub fn register(&mut self, method: Box<dyn CountingMethod>) {
        self.methods.push(method);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.methods.iter().map(|m| m.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn CountingMethod> {
        self.methods
            .iter()
            .find(|m| m.name() == name)
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown counting method `{name}`")))
    }

    pub fn applicable<'a>(&'a self, target: &'a CountTarget) -> impl Iterator<Item = &'a dyn CountingMethod> + 'a {
        self.methods.iter().map(|m| m.as_ref()).filter(move |m| m.supports(target))
    }

    /// Every applicable method's result, in registry order.
    pub fn cross_check(&self, target: &CountTarget, precision: Precision) -> Vec<(&'static str, Result<MatchCount>)> {
        self.applicable(target)
            .map(|m| (m.name(), m.count(target, precision)))
            .collect()
    }
}

impl fmt::Debug for MethodRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}
