//! Pfaffian orientations and exact matching counts for plane graphs.
//!
//! An orientation in which every bounded face has an odd number of edges
//! pointing clockwise makes the skew adjacency matrix a Pfaffian one: its
//! determinant is the square of the number of perfect matchings.

use std::collections::{HashMap, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::plane_graph::{MatchCount, PlaneGraph};

/// A direction for every edge, stored as `(tail, head)` arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    arcs: Vec<(usize, usize)>,
}

impl Orientation {
    pub fn new(arcs: Vec<(usize, usize)>) -> Self {
        Orientation { arcs }
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Every arc flipped.
    pub fn reversed(&self) -> Self {
        Orientation {
            arcs: self.arcs.iter().map(|&(u, v)| (v, u)).collect(),
        }
    }

    /// Per edge id of `g`, whether the arc runs from the lower to the higher
    /// endpoint.
    pub fn forward_flags(&self, g: &PlaneGraph) -> Result<Vec<bool>> {
        let mut flags: Vec<Option<bool>> = vec![None; g.edge_count()];
        for &(u, v) in &self.arcs {
            let e = g.edge_id(u, v).ok_or_else(|| {
                Error::EdgeCoverageMismatch(format!("arc {u}->{v} is not an edge"))
            })?;
            if flags[e].replace(u < v).is_some() {
                return Err(Error::EdgeCoverageMismatch(format!(
                    "edge {{{u}, {v}}} is oriented twice"
                )));
            }
        }
        flags
            .into_iter()
            .enumerate()
            .map(|(e, f)| {
                f.ok_or_else(|| {
                    let (u, v) = g.edges()[e];
                    Error::EdgeCoverageMismatch(format!("edge {{{u}, {v}}} has no direction"))
                })
            })
            .collect()
    }

    pub(crate) fn from_forward_flags(g: &PlaneGraph, forward: &[bool]) -> Self {
        let arcs = g
            .edges()
            .iter()
            .zip(forward)
            .map(|(&(u, v), &f)| if f { (u, v) } else { (v, u) })
            .collect();
        Orientation { arcs }
    }
}

/// Integer skew-symmetric matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewMatrix {
    entries: Vec<Vec<i64>>,
}

impl SkewMatrix {
    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    /// Builds a matrix from rows; rejects anything that is not skew.
    pub fn from_rows(entries: Vec<Vec<i64>>) -> Result<Self> {
        let n = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidParameter("skew matrix must be square".into()));
            }
            for j in 0..n {
                if row[j] != -entries[j][i] {
                    return Err(Error::InvalidParameter(format!(
                        "entries ({i}, {j}) and ({j}, {i}) are not negatives"
                    )));
                }
            }
        }
        Ok(SkewMatrix { entries })
    }
}

/// Number of darts of face `f` whose edge is directed along the walk.
pub(crate) fn clockwise_count(g: &PlaneGraph, forward: &[bool], f: usize) -> usize {
    g.face_dart_ids(f)
        .iter()
        .filter(|&&d| {
            let (u, v) = g.dart_ends(d);
            forward[g.dart_edge(d)] == (u < v)
        })
        .count()
}

/// A Pfaffian orientation with the unbounded face as the root of the dual
/// spanning tree.
pub fn kasteleyn_orient(g: &PlaneGraph) -> Result<Orientation> {
    orient_with_root(g, g.outer_face()).map(|forward| Orientation::from_forward_flags(g, &forward))
}

/// Spanning tree of the dual rooted at `root`, faces discovered breadth
/// first with neighbors taken by face id, then edge id. Non-tree edges
/// point from lower to higher vertex; tree edges are then fixed from the
/// leaves up so that every face but the root is clockwise-odd.
pub(crate) fn orient_with_root(g: &PlaneGraph, root: usize) -> Result<Vec<bool>> {
    g.require_connected()?;
    let faces = g.faces().len();
    let mut parent_edge: Vec<Option<usize>> = vec![None; faces];
    let mut seen = vec![false; faces];
    let mut order = Vec::with_capacity(faces);
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(f) = queue.pop_front() {
        order.push(f);
        let mut next: Vec<(usize, usize)> = g
            .face_dart_ids(f)
            .iter()
            .map(|&d| (g.face_of(g.twin(d)), g.dart_edge(d)))
            .filter(|&(h, _)| h != f)
            .collect();
        next.sort_unstable();
        for (h, e) in next {
            if !seen[h] {
                seen[h] = true;
                parent_edge[h] = Some(e);
                queue.push_back(h);
            }
        }
    }

    let mut forward = vec![true; g.edge_count()];
    for &f in order.iter().skip(1).rev() {
        let e = parent_edge[f].expect("non-root faces have a parent edge");
        let dart = g
            .face_dart_ids(f)
            .iter()
            .copied()
            .find(|&d| g.dart_edge(d) == e)
            .expect("parent edge borders the face");
        let others = g
            .face_dart_ids(f)
            .iter()
            .filter(|&&d| d != dart)
            .filter(|&&d| {
                let (u, v) = g.dart_ends(d);
                forward[g.dart_edge(d)] == (u < v)
            })
            .count();
        let (u, v) = g.dart_ends(dart);
        // make this dart clockwise exactly when the others are even
        let clockwise = others % 2 == 0;
        forward[e] = clockwise == (u < v);
    }
    Ok(forward)
}

/// True iff every bounded face has an odd number of clockwise edges.
pub fn verify_orientation(g: &PlaneGraph, o: &Orientation) -> Result<bool> {
    let forward = o.forward_flags(g)?;
    Ok((0..g.faces().len())
        .filter(|&f| f != g.outer_face())
        .all(|f| clockwise_count(g, &forward, f) % 2 == 1))
}

pub fn skew_adjacency(g: &PlaneGraph, o: &Orientation) -> Result<SkewMatrix> {
    o.forward_flags(g)?;
    let n = g.vertex_count();
    let mut entries = vec![vec![0i64; n]; n];
    for &(u, v) in o.arcs() {
        entries[u][v] = 1;
        entries[v][u] = -1;
    }
    Ok(SkewMatrix { entries })
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_exact(m: &SkewMatrix) -> BigInt {
    det_integer(m.entries())
}

/// Bareiss elimination over any square integer matrix, pivoting on the
/// first nonzero entry of each column.
pub fn det_integer(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let lead = row[k].clone();
            for j in k + 1..n {
                let v = &row[j] * &pivot_row[k] - &lead * &pivot_row[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
            row[k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Matching count from a given orientation, assumed Pfaffian.
pub fn count_with_orientation(g: &PlaneGraph, o: &Orientation) -> Result<MatchCount> {
    let det = det_exact(&skew_adjacency(g, o)?);
    exact_sqrt(&det).map(MatchCount::new)
}

pub fn count_fkt(g: &PlaneGraph) -> Result<MatchCount> {
    if g.vertex_count() % 2 == 1 {
        return Ok(MatchCount::from(0));
    }
    count_with_orientation(g, &kasteleyn_orient(g)?)
}

/// Integer square root, failing unless `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Result<BigUint> {
    if n.is_negative() {
        return Err(Error::NonSquareDeterminant(n.to_string()));
    }
    let m = n.magnitude();
    let r = m.sqrt();
    if &(&r * &r) == m {
        Ok(r)
    } else {
        Err(Error::NonSquareDeterminant(n.to_string()))
    }
}

/// Orientation of `g` agreeing with `o` except on `edge`, which is flipped.
pub fn flip_edge(o: &Orientation, edge: (usize, usize)) -> Orientation {
    let key = (edge.0.min(edge.1), edge.0.max(edge.1));
    let arcs = o
        .arcs()
        .iter()
        .map(|&(u, v)| if (u.min(v), u.max(v)) == key { (v, u) } else { (u, v) })
        .collect();
    Orientation::new(arcs)
}

/// Per-face clockwise counts, keyed by face index; handy for diagnostics.
pub fn clockwise_profile(g: &PlaneGraph, o: &Orientation) -> Result<HashMap<usize, usize>> {
    let forward = o.forward_flags(g)?;
    Ok((0..g.faces().len())
        .map(|f| (f, clockwise_count(g, &forward, f)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_graph::count_bruteforce;

    fn grid(w: usize, h: usize) -> PlaneGraph {
        let pts: Vec<(f64, f64)> = (0..w * h).map(|v| ((v % w) as f64, (v / w) as f64)).collect();
        let mut edges = Vec::new();
        for v in 0..w * h {
            if v % w + 1 < w {
                edges.push((v, v + 1));
            }
            if v + w < w * h {
                edges.push((v, v + w));
            }
        }
        PlaneGraph::from_positions(&pts, &edges).unwrap()
    }

    /// Column-by-column transfer count of domino tilings of a `w` by `h`
    /// grid; state = rows already covered by a dimer from the left.
    fn transfer_count(w: usize, h: usize) -> u64 {
        fn fill(h: usize, row: usize, incoming: u32, outgoing: u32, out: &mut Vec<u32>) {
            if row == h {
                out.push(outgoing);
                return;
            }
            if incoming & (1 << row) != 0 {
                fill(h, row + 1, incoming, outgoing, out);
                return;
            }
            fill(h, row + 1, incoming, outgoing | (1 << row), out);
            if row + 1 < h && incoming & (1 << (row + 1)) == 0 {
                fill(h, row + 2, incoming, outgoing, out);
            }
        }
        let mut ways = vec![0u64; 1 << h];
        ways[0] = 1;
        for _ in 0..w {
            let mut next = vec![0u64; 1 << h];
            for (s, &c) in ways.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let mut outs = Vec::new();
                fill(h, 0, s as u32, 0, &mut outs);
                for o in outs {
                    next[o as usize] += c;
                }
            }
            ways = next;
        }
        ways[0]
    }

    #[test]
    fn single_edge() {
        let g = PlaneGraph::new(vec![vec![1], vec![0]], 0).unwrap();
        let o = kasteleyn_orient(&g).unwrap();
        assert!(verify_orientation(&g, &o).unwrap());
        let m = skew_adjacency(&g, &Orientation::new(vec![(0, 1)])).unwrap();
        assert_eq!(m.entries(), &[vec![0, 1], vec![-1, 0]]);
        assert_eq!(det_exact(&m), BigInt::one());
        assert_eq!(count_fkt(&g).unwrap(), 1);
    }

    #[test]
    fn four_cycle() {
        let g = grid(2, 2);
        let o = kasteleyn_orient(&g).unwrap();
        assert!(verify_orientation(&g, &o).unwrap());
        let inner = 1 - g.outer_face();
        assert_eq!(clockwise_profile(&g, &o).unwrap()[&inner] % 2, 1);
        assert_eq!(det_exact(&skew_adjacency(&g, &o).unwrap()), BigInt::from(4));
        assert_eq!(count_fkt(&g).unwrap(), 2);

        // the square is walked 0 -> 2 -> 3 -> 1; two arcs agree with it
        let bad = Orientation::new(vec![(0, 2), (2, 3), (1, 3), (0, 1)]);
        assert!(!verify_orientation(&g, &bad).unwrap());
    }

    #[test]
    fn grid_2x3_faces_are_clockwise_odd() {
        let g = grid(3, 2);
        let o = kasteleyn_orient(&g).unwrap();
        let profile = clockwise_profile(&g, &o).unwrap();
        for f in 0..g.faces().len() {
            if f != g.outer_face() {
                assert_eq!(profile[&f] % 2, 1);
            }
        }
        assert_eq!(count_fkt(&g).unwrap(), 3);
    }

    #[test]
    fn reversed_orientation_stays_pfaffian_on_bipartite_graphs() {
        let g = grid(4, 3);
        let o = kasteleyn_orient(&g).unwrap();
        assert!(verify_orientation(&g, &o.reversed()).unwrap());
    }

    #[test]
    fn coverage_errors() {
        let g = grid(2, 2);
        let short = Orientation::new(vec![(0, 1)]);
        assert!(matches!(
            verify_orientation(&g, &short),
            Err(Error::EdgeCoverageMismatch(_))
        ));
        let twice = Orientation::new(vec![(0, 1), (1, 0), (1, 3), (2, 3), (0, 2)]);
        assert!(matches!(
            verify_orientation(&g, &twice),
            Err(Error::EdgeCoverageMismatch(_))
        ));
    }

    #[test]
    fn zero_and_trivial_determinants() {
        let z = SkewMatrix::from_rows(vec![vec![0; 3]; 3]).unwrap();
        assert_eq!(det_exact(&z), BigInt::zero());
        assert!(SkewMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).is_err());
    }

    #[test]
    fn det_integer_matches_cofactor_expansion() {
        let m = vec![vec![2, -1, 0], vec![0, 0, 3], vec![1, 4, -2]];
        // 2*(0*-2 - 3*4) - (-1)*(0*-2 - 3*1) + 0 = -24 - 3
        assert_eq!(det_integer(&m), BigInt::from(-27));
    }

    #[test]
    fn grid_4x4_determinant_is_36_squared() {
        let g = grid(4, 4);
        let m = skew_adjacency(&g, &kasteleyn_orient(&g).unwrap()).unwrap();
        assert_eq!(det_exact(&m), BigInt::from(1296));
        assert_eq!(count_bruteforce(&g).unwrap(), 36);
    }

    #[test]
    fn grid_8x8_matches_transfer_count() {
        let expected = transfer_count(8, 8);
        assert_eq!(expected, 12_988_816);
        assert_eq!(count_fkt(&grid(8, 8)).unwrap(), expected);
    }

    #[test]
    fn rectangular_grids_match_transfer_count() {
        for (w, h) in [(3, 4), (5, 4), (6, 3), (7, 2)] {
            assert_eq!(count_fkt(&grid(w, h)).unwrap(), transfer_count(w, h), "{w}x{h}");
        }
    }

    #[test]
    fn flipping_one_edge_breaks_the_count() {
        let g = grid(4, 4);
        let o = kasteleyn_orient(&g).unwrap();
        let bad = flip_edge(&o, (5, 6));
        assert!(!verify_orientation(&g, &bad).unwrap());
        let c = count_with_orientation(&g, &bad);
        assert!(c.map(|c| c != 36).unwrap_or(true));
    }
}
