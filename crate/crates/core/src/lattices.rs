//! Generators for the lattice families: rectangular grids, the two column
//! cylinders (hexagon columns and quadrangle columns) with their
//! free-boundary strips, and honeycomb duals of semiregular hexagons.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::plane_graph::PlaneGraph;
use crate::symmetry::SymmetricQuotient;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeFamily {
    Quad,
    G1Free,
    G1Cylinder,
    G2Free,
    G2Cylinder,
    Hexagon,
}

impl LatticeFamily {
    pub const ALL: [LatticeFamily; 6] = [
        LatticeFamily::Quad,
        LatticeFamily::G1Free,
        LatticeFamily::G1Cylinder,
        LatticeFamily::G2Free,
        LatticeFamily::G2Cylinder,
        LatticeFamily::Hexagon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LatticeFamily::Quad => "quad",
            LatticeFamily::G1Free => "g1-free",
            LatticeFamily::G1Cylinder => "g1-cylinder",
            LatticeFamily::G2Free => "g2-free",
            LatticeFamily::G2Cylinder => "g2-cylinder",
            LatticeFamily::Hexagon => "hexagon",
        }
    }

    pub fn is_cylinder(self) -> bool {
        matches!(self, LatticeFamily::G1Cylinder | LatticeFamily::G2Cylinder)
    }
}

impl fmt::Display for LatticeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LatticeFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown lattice family `{s}`")))
    }
}

/// A lattice family with its size parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeSpec {
    Quad { m: usize, n: usize },
    G1Free { m: usize, n: usize },
    G1Cylinder { m: usize, n: usize },
    G2Free { m: usize, n: usize },
    G2Cylinder { m: usize, n: usize },
    Hexagon { a: usize, b: usize, c: usize },
}

impl LatticeSpec {
    /// Checks positivity of the parameters for the family.
    pub fn new(family: LatticeFamily, m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter(format!(
                "{family} needs positive m and n, got m={m}, n={n}"
            )));
        }
        Ok(match family {
            LatticeFamily::Quad => LatticeSpec::Quad { m, n },
            LatticeFamily::G1Free => LatticeSpec::G1Free { m, n },
            LatticeFamily::G1Cylinder => LatticeSpec::G1Cylinder { m, n },
            LatticeFamily::G2Free => LatticeSpec::G2Free { m, n },
            LatticeFamily::G2Cylinder => LatticeSpec::G2Cylinder { m, n },
            LatticeFamily::Hexagon => {
                return Err(Error::InvalidParameter(
                    "hexagon takes side lengths a, b, c".into(),
                ))
            }
        })
    }

    pub fn hexagon(a: usize, b: usize, c: usize) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::InvalidParameter(format!(
                "hexagon needs positive sides, got {a}, {b}, {c}"
            )));
        }
        Ok(LatticeSpec::Hexagon { a, b, c })
    }

    pub fn family(&self) -> LatticeFamily {
        match self {
            LatticeSpec::Quad { .. } => LatticeFamily::Quad,
            LatticeSpec::G1Free { .. } => LatticeFamily::G1Free,
            LatticeSpec::G1Cylinder { .. } => LatticeFamily::G1Cylinder,
            LatticeSpec::G2Free { .. } => LatticeFamily::G2Free,
            LatticeSpec::G2Cylinder { .. } => LatticeFamily::G2Cylinder,
            LatticeSpec::Hexagon { .. } => LatticeFamily::Hexagon,
        }
    }

    /// Vertex count of the generated graph, without generating it.
    pub fn vertex_count(&self) -> usize {
        match *self {
            LatticeSpec::Quad { m, n } => m * n,
            LatticeSpec::G1Free { m, n } | LatticeSpec::G1Cylinder { m, n } => 12 * m * n,
            LatticeSpec::G2Free { m, n } | LatticeSpec::G2Cylinder { m, n } => 8 * m * n,
            LatticeSpec::Hexagon { a, b, c } => 2 * (a * b + b * c + c * a),
        }
    }

    /// The quotient, for the rotation-symmetric families.
    pub fn quotient(&self) -> Result<Option<SymmetricQuotient>> {
        Ok(match *self {
            LatticeSpec::G1Cylinder { m, n } => Some(gen_g1_cylinder(m, n)?),
            LatticeSpec::G2Cylinder { m, n } => Some(gen_g2_cylinder(m, n)?),
            _ => None,
        })
    }

    pub fn graph(&self) -> Result<PlaneGraph> {
        match *self {
            LatticeSpec::Quad { m, n } => gen_quad(m, n),
            LatticeSpec::G1Free { m, n } => gen_g1_free(m, n),
            LatticeSpec::G1Cylinder { m, n } => gen_g1_cylinder(m, n)?.expand(),
            LatticeSpec::G2Free { m, n } => gen_g2_free(m, n),
            LatticeSpec::G2Cylinder { m, n } => gen_g2_cylinder(m, n)?.expand(),
            LatticeSpec::Hexagon { a, b, c } => gen_hexagon(a, b, c),
        }
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LatticeSpec::Hexagon { a, b, c } => write!(f, "hexagon({a},{b},{c})"),
            LatticeSpec::Quad { m, n }
            | LatticeSpec::G1Free { m, n }
            | LatticeSpec::G1Cylinder { m, n }
            | LatticeSpec::G2Free { m, n }
            | LatticeSpec::G2Cylinder { m, n } => write!(f, "{}({m},{n})", self.family()),
        }
    }
}

fn require_positive(what: &str, values: &[usize]) -> Result<()> {
    if values.contains(&0) {
        return Err(Error::InvalidParameter(format!("{what} parameters must be positive")));
    }
    Ok(())
}

/// `m` rows by `n` columns; vertex `(row, col)` is `row * n + col`.
pub fn gen_quad(m: usize, n: usize) -> Result<PlaneGraph> {
    require_positive("quad", &[m, n])?;
    let points: Vec<(f64, f64)> = (0..m * n).map(|v| ((v % n) as f64, (v / n) as f64)).collect();
    let mut edges = Vec::new();
    for v in 0..m * n {
        if v % n + 1 < n {
            edges.push((v, v + 1));
        }
        if v + n < m * n {
            edges.push((v, v + n));
        }
    }
    PlaneGraph::from_positions(&points, &edges)
}

/// One column of `m` pointy-top hexagons joined top to bottom. Hexagon `h`
/// has vertices `6h..6h+6`: bottom, lower right, upper right, top, upper
/// left, lower left.
fn hexagon_column(m: usize) -> Result<PlaneGraph> {
    let half = 3f64.sqrt() / 2.0;
    let mut points = Vec::with_capacity(6 * m);
    let mut edges = Vec::new();
    for h in 0..m {
        let y = 3.0 * h as f64;
        points.extend([
            (0.0, y - 1.0),
            (half, y - 0.5),
            (half, y + 0.5),
            (0.0, y + 1.0),
            (-half, y + 0.5),
            (-half, y - 0.5),
        ]);
        let base = 6 * h;
        for k in 0..6 {
            edges.push((base + k, base + (k + 1) % 6));
        }
        if h > 0 {
            edges.push((base - 3, base));
        }
    }
    PlaneGraph::from_positions(&points, &edges)
}

fn hexagon_column_links(m: usize) -> Vec<(usize, usize)> {
    (0..m)
        .flat_map(|h| [(6 * h + 1, 6 * h + 5), (6 * h + 2, 6 * h + 4)])
        .collect()
}

/// Hexagon-column cylinder with `2n` columns of `m` hexagons.
pub fn gen_g1_cylinder(m: usize, n: usize) -> Result<SymmetricQuotient> {
    require_positive("g1-cylinder", &[m, n])?;
    SymmetricQuotient::new(hexagon_column(m)?, n, &hexagon_column_links(m))
}

/// The same `2n` columns side by side, with free left and right borders.
pub fn gen_g1_free(m: usize, n: usize) -> Result<PlaneGraph> {
    gen_g1_cylinder(m, n)?.expand_open()
}

/// One column of `m` diamonds joined top to bottom. Diamond `h` has
/// vertices `4h..4h+4`: bottom, right, top, left.
fn diamond_column(m: usize) -> Result<PlaneGraph> {
    let mut points = Vec::with_capacity(4 * m);
    let mut edges = Vec::new();
    for h in 0..m {
        let y = 3.0 * h as f64;
        points.extend([(0.0, y - 1.0), (1.0, y), (0.0, y + 1.0), (-1.0, y)]);
        let base = 4 * h;
        for k in 0..4 {
            edges.push((base + k, base + (k + 1) % 4));
        }
        if h > 0 {
            edges.push((base - 2, base));
        }
    }
    PlaneGraph::from_positions(&points, &edges)
}

/// Quadrangle-column cylinder with `2n` columns of `m` quadrangles.
pub fn gen_g2_cylinder(m: usize, n: usize) -> Result<SymmetricQuotient> {
    require_positive("g2-cylinder", &[m, n])?;
    let links: Vec<(usize, usize)> = (0..m).map(|h| (4 * h + 1, 4 * h + 3)).collect();
    SymmetricQuotient::new(diamond_column(m)?, n, &links)
}

pub fn gen_g2_free(m: usize, n: usize) -> Result<PlaneGraph> {
    gen_g2_cylinder(m, n)?.expand_open()
}

/// Square-grid cylinder: `2n` columns of `height` vertices, each row a
/// cycle. The sector is a vertical path whose vertices link to themselves
/// in the next column, so the local width is 0.
pub fn quad_cylinder(height: usize, n: usize) -> Result<SymmetricQuotient> {
    require_positive("quad cylinder", &[height, n])?;
    let points: Vec<(f64, f64)> = (0..height).map(|v| (0.0, v as f64)).collect();
    let edges: Vec<(usize, usize)> = (1..height).map(|v| (v - 1, v)).collect();
    let sector = PlaneGraph::from_positions(&points, &edges)?;
    let links: Vec<(usize, usize)> = (0..height).map(|v| (v, v)).collect();
    SymmetricQuotient::new(sector, n, &links)
}

/// A ring of `2n` single edges: the `4n`-cycle, local width 1.
pub fn edge_ring(n: usize) -> Result<SymmetricQuotient> {
    let sector = PlaneGraph::from_positions(&[(0.0, 0.0), (1.0, 0.0)], &[(0, 1)])?;
    SymmetricQuotient::new(sector, n, &[(1, 0)])
}

/// A ring of `2n` squares joined by two parallel edges each, local width 1.
pub fn square_ring(n: usize) -> Result<SymmetricQuotient> {
    let sector = PlaneGraph::from_positions(
        &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
        &[(0, 1), (1, 2), (2, 3), (3, 0)],
    )?;
    SymmetricQuotient::new(sector, n, &[(1, 0), (2, 3)])
}

/// A ring of `2n` flat-top hexagons joined corner to corner by single
/// edges, local width 3.
pub fn hexagon_ring(n: usize) -> Result<SymmetricQuotient> {
    let half = 3f64.sqrt() / 2.0;
    // left, lower left, lower right, right, upper right, upper left
    let points = [
        (-1.0, 0.0),
        (-0.5, -half),
        (0.5, -half),
        (1.0, 0.0),
        (0.5, half),
        (-0.5, half),
    ];
    let edges: Vec<(usize, usize)> = (0..6).map(|k| (k, (k + 1) % 6)).collect();
    let sector = PlaneGraph::from_positions(&points, &edges)?;
    SymmetricQuotient::new(sector, n, &[(3, 0)])
}

/// Honeycomb graph dual to the triangles of the `a, b, c` semiregular
/// hexagon; its perfect matchings are the lozenge tilings.
pub fn gen_hexagon(a: usize, b: usize, c: usize) -> Result<PlaneGraph> {
    require_positive("hexagon", &[a, b, c])?;
    let (a, b, c) = (a as i64, b as i64, c as i64);
    // lattice point (i, j) sits at i * (1, 0) + j * (1/2, sqrt(3)/2)
    let inside = |i: i64, j: i64| (0..=b + c).contains(&j) && (-c..=a).contains(&i) && (0..=a + b).contains(&(i + j));
    let point = |i: f64, j: f64| (i + 0.5 * j, j * 3f64.sqrt() / 2.0);

    let mut index = std::collections::HashMap::new();
    let mut points = Vec::new();
    for j in 0..b + c {
        for i in -c - 1..=a + 1 {
            // up triangle (i,j), (i+1,j), (i,j+1)
            if inside(i, j) && inside(i + 1, j) && inside(i, j + 1) {
                index.insert((i, j, true), points.len());
                points.push(point(i as f64 + 1.0 / 3.0, j as f64 + 1.0 / 3.0));
            }
            // down triangle (i+1,j), (i,j+1), (i+1,j+1)
            if inside(i + 1, j) && inside(i, j + 1) && inside(i + 1, j + 1) {
                index.insert((i, j, false), points.len());
                points.push(point(i as f64 + 2.0 / 3.0, j as f64 + 2.0 / 3.0));
            }
        }
    }
    let mut edges = Vec::new();
    for (&(i, j, up), &v) in &index {
        if !up {
            continue;
        }
        for other in [(i, j, false), (i - 1, j, false), (i, j - 1, false)] {
            if let Some(&u) = index.get(&other) {
                edges.push((v.min(u), v.max(u)));
            }
        }
    }
    edges.sort_unstable();
    PlaneGraph::from_positions(&points, &edges)
}
