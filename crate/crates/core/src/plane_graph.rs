//! Combinatorial plane graphs.
//!
//! A [`PlaneGraph`] is given by a rotation system: for each vertex, the
//! neighbors listed in **counterclockwise** order around it. Face walks are
//! traced with the face kept on the right of every dart, so a bounded face is
//! walked clockwise. Clockwise rotation input still forms a valid (mirrored)
//! embedding; nothing can detect it except the resulting face structure, so
//! callers must stick to the counterclockwise convention.
//!
//! The unbounded face carries no geometric information and is stored
//! explicitly as an index into [`PlaneGraph::faces`].

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigUint;

use crate::error::{parse_error, Error, Result};
use crate::numeric::ln_biguint;

/// Exact number of perfect matchings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MatchCount(BigUint);

impl MatchCount {
    pub fn new(value: BigUint) -> Self {
        MatchCount(value)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    /// Natural logarithm; `-inf` for zero.
    pub fn ln(&self) -> f64 {
        ln_biguint(&self.0)
    }
}

impl From<u64> for MatchCount {
    fn from(v: u64) -> Self {
        MatchCount(BigUint::from(v))
    }
}

impl PartialEq<u64> for MatchCount {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl fmt::Display for MatchCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One face as a closed walk of vertices; dart `k` runs from `walk[k]` to
/// `walk[(k + 1) % len]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub walk: Vec<usize>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.walk.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walk.is_empty()
    }

    pub fn darts(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.walk.len();
        (0..n).map(move |k| (self.walk[k], self.walk[(k + 1) % n]))
    }
}

/// Two-coloring of a bipartite graph; `color[v]` is `true` for black.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub color: Vec<bool>,
}

impl Bipartition {
    pub fn black_count(&self) -> usize {
        self.color.iter().filter(|c| **c).count()
    }

    pub fn white_count(&self) -> usize {
        self.color.len() - self.black_count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneGraph {
    rotation: Vec<Vec<usize>>,
    outer_face: usize,
    // dart d = offset[u] + k is u -> rotation[u][k]
    offset: Vec<usize>,
    tail: Vec<usize>,
    twin: Vec<usize>,
    dart_edge: Vec<usize>,
    dart_face: Vec<usize>,
    edges: Vec<(usize, usize)>,
    faces: Vec<Face>,
    face_darts: Vec<Vec<usize>>,
}

impl PlaneGraph {
    /// Validates a rotation system and designates face `outer_face` as the
    /// unbounded one.
    pub fn new(rotation: Vec<Vec<usize>>, outer_face: usize) -> Result<Self> {
        let mut g = Self::assemble(rotation)?;
        if outer_face >= g.faces.len() {
            return Err(Error::OuterFaceOutOfRange {
                index: outer_face,
                faces: g.faces.len(),
            });
        }
        g.outer_face = outer_face;
        Ok(g)
    }

    /// Like [`PlaneGraph::new`], with the outer face given as the face lying
    /// to the right of dart `tail -> head`.
    pub fn with_outer_dart(rotation: Vec<Vec<usize>>, tail: usize, head: usize) -> Result<Self> {
        let mut g = Self::assemble(rotation)?;
        let face = g.dart_face(tail, head).ok_or_else(|| {
            Error::InvalidParameter(format!("outer dart {tail}->{head} is not an edge"))
        })?;
        g.outer_face = face;
        Ok(g)
    }

    /// Picks the longest face (lowest index on ties) as the outer face.
    pub fn from_rotation(rotation: Vec<Vec<usize>>) -> Result<Self> {
        let mut g = Self::assemble(rotation)?;
        g.outer_face = g
            .faces
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap_or(0);
        Ok(g)
    }

    /// Builds the rotation system from straight-line vertex positions. The
    /// outer face is the one seen to the left of the leftmost vertex.
    pub fn from_positions(points: &[(f64, f64)], edges: &[(usize, usize)]) -> Result<Self> {
        let n = points.len();
        let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: u.min(v),
                    neighbor: u.max(v),
                });
            }
            nbrs[u].push(v);
            nbrs[v].push(u);
        }
        let angle = |u: usize, v: usize| {
            let (x0, y0) = points[u];
            let (x1, y1) = points[v];
            (y1 - y0).atan2(x1 - x0)
        };
        for (u, list) in nbrs.iter_mut().enumerate() {
            list.sort_by(|&a, &b| angle(u, a).total_cmp(&angle(u, b)));
        }
        let leftmost = (0..n)
            .filter(|&v| !nbrs[v].is_empty())
            .min_by(|&a, &b| {
                points[a]
                    .0
                    .total_cmp(&points[b].0)
                    .then(points[a].1.total_cmp(&points[b].1))
            });
        let Some(v) = leftmost else {
            return Self::new(nbrs, 0);
        };
        // atan2 lies in (-pi, pi]; the wedge containing direction pi is the
        // one closing the cyclic order, from the last neighbor to the first.
        let last = *nbrs[v].last().unwrap_or(&v);
        Self::with_outer_dart(nbrs, last, v)
    }

    fn assemble(rotation: Vec<Vec<usize>>) -> Result<Self> {
        let n = rotation.len();
        let mut position: HashMap<(usize, usize), usize> = HashMap::new();
        for (u, list) in rotation.iter().enumerate() {
            for (k, &v) in list.iter().enumerate() {
                if v >= n {
                    return Err(Error::VertexOutOfRange {
                        vertex: u,
                        neighbor: v,
                    });
                }
                if v == u {
                    return Err(Error::SelfLoop(u));
                }
                if position.insert((u, v), k).is_some() {
                    return Err(Error::RepeatedNeighbor {
                        vertex: u,
                        neighbor: v,
                    });
                }
            }
        }
        let mut offset = Vec::with_capacity(n + 1);
        let mut total = 0;
        for list in &rotation {
            offset.push(total);
            total += list.len();
        }
        offset.push(total);
        let mut tail = vec![0; total];
        let mut twin = vec![0; total];
        for (u, list) in rotation.iter().enumerate() {
            for (k, &v) in list.iter().enumerate() {
                let back = *position
                    .get(&(v, u))
                    .ok_or(Error::NonSymmetricAdjacency { from: u, to: v })?;
                tail[offset[u] + k] = u;
                twin[offset[u] + k] = offset[v] + back;
            }
        }
        let mut edges: Vec<(usize, usize)> = position
            .keys()
            .filter(|(u, v)| u < v)
            .copied()
            .collect();
        edges.sort_unstable();
        let edge_id: HashMap<(usize, usize), usize> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut dart_edge = vec![0; total];
        for d in 0..total {
            let u = tail[d];
            let v = tail[twin[d]];
            dart_edge[d] = edge_id[&(u.min(v), u.max(v))];
        }

        let mut g = PlaneGraph {
            rotation,
            outer_face: 0,
            offset,
            tail,
            twin,
            dart_edge,
            dart_face: vec![usize::MAX; total],
            edges,
            faces: Vec::new(),
            face_darts: Vec::new(),
        };
        g.trace_faces();
        if g.edges.is_empty() {
            g.faces.push(Face { walk: Vec::new() });
            g.face_darts.push(Vec::new());
        } else if g.is_connected() {
            let euler = n as i64 - g.edges.len() as i64 + g.faces.len() as i64;
            if euler != 2 {
                return Err(Error::NonPlanarEmbedding { euler });
            }
        }
        Ok(g)
    }

    fn trace_faces(&mut self) {
        for start in 0..self.tail.len() {
            if self.dart_face[start] != usize::MAX {
                continue;
            }
            let id = self.faces.len();
            let mut walk = Vec::new();
            let mut darts = Vec::new();
            let mut d = start;
            loop {
                self.dart_face[d] = id;
                walk.push(self.tail[d]);
                darts.push(d);
                d = self.next_dart(d);
                if d == start {
                    break;
                }
            }
            self.faces.push(Face { walk });
            self.face_darts.push(darts);
        }
    }

    /// Successor of dart `u -> v` along the face on its right.
    fn next_dart(&self, d: usize) -> usize {
        let t = self.twin[d];
        let v = self.tail[t];
        let deg = self.rotation[v].len();
        let k = t - self.offset[v];
        self.offset[v] + (k + 1) % deg
    }

    pub fn vertex_count(&self) -> usize {
        self.rotation.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn rotation(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    /// Undirected edges `(u, v)` with `u < v`, sorted; positions in this
    /// list are the edge ids used by [`crate::fkt::Orientation`].
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn outer_face(&self) -> usize {
        self.outer_face
    }

    /// Index of the face to the right of dart `tail -> head`.
    pub fn dart_face(&self, tail: usize, head: usize) -> Option<usize> {
        self.dart_id(tail, head).map(|d| self.dart_face[d])
    }

    pub(crate) fn dart_id(&self, tail: usize, head: usize) -> Option<usize> {
        let k = self.rotation.get(tail)?.iter().position(|&x| x == head)?;
        Some(self.offset[tail] + k)
    }

    pub(crate) fn dart_ends(&self, d: usize) -> (usize, usize) {
        (self.tail[d], self.tail[self.twin[d]])
    }

    pub(crate) fn dart_edge(&self, d: usize) -> usize {
        self.dart_edge[d]
    }

    pub(crate) fn twin(&self, d: usize) -> usize {
        self.twin[d]
    }

    pub(crate) fn face_of(&self, d: usize) -> usize {
        self.dart_face[d]
    }

    pub(crate) fn face_dart_ids(&self, f: usize) -> &[usize] {
        &self.face_darts[f]
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.rotation[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::DisconnectedGraph)
        }
    }

    /// Breadth-first 2-coloring; `None` when an odd cycle exists.
    pub fn bipartition(&self) -> Option<Bipartition> {
        let n = self.vertex_count();
        let mut color: Vec<Option<bool>> = vec![None; n];
        for root in 0..n {
            if color[root].is_some() {
                continue;
            }
            color[root] = Some(true);
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let cu = color[u]?;
                for &v in &self.rotation[u] {
                    match color[v] {
                        None => {
                            color[v] = Some(!cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(Bipartition {
            color: color.into_iter().map(|c| c.unwrap_or(true)).collect(),
        })
    }

    /// Same embedding with vertex `v` renamed `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let n = self.vertex_count();
        if perm.len() != n {
            return Err(Error::InvalidParameter("permutation length".into()));
        }
        let mut rotation = vec![Vec::new(); n];
        for (v, list) in self.rotation.iter().enumerate() {
            rotation[perm[v]] = list.iter().map(|&u| perm[u]).collect();
        }
        match self.face_darts[self.outer_face].first() {
            Some(&d) => {
                let (u, v) = self.dart_ends(d);
                Self::with_outer_dart(rotation, perm[u], perm[v])
            }
            None => Self::new(rotation, 0),
        }
    }

    /// Serializes to the `planar-graph v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("planar-graph v1\n");
        out.push_str(&format!("V {}\n", self.vertex_count()));
        out.push_str(&format!("F {}\n", self.outer_face));
        for (v, list) in self.rotation.iter().enumerate() {
            out.push_str(&format!("A {v}:"));
            for u in list {
                out.push_str(&format!(" {u}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `planar-graph v1` text format.
    pub fn parse(text: &str) -> Result<Self> {
        let lines = content_lines(text);
        let (g, used) = Self::parse_block(&lines)?;
        if let Some((no, line)) = lines.get(used) {
            return Err(parse_error(*no, format!("unexpected line `{line}`")));
        }
        Ok(g)
    }

    /// Parses a graph block from the front of `lines` (line number, content
    /// with comments stripped), stopping at the first line that is not part
    /// of the block. Returns the graph and the number of lines consumed.
    pub(crate) fn parse_block(lines: &[(usize, &str)]) -> Result<(Self, usize)> {
        let mut it = lines.iter().peekable();
        let &(no, header) = it.next().ok_or_else(|| parse_error(0, "empty input"))?;
        if header != "planar-graph v1" {
            return Err(parse_error(no, format!("expected `planar-graph v1`, got `{header}`")));
        }
        let mut used: usize = 1;
        let mut vertex_count: Option<usize> = None;
        let mut outer: Option<usize> = None;
        let mut rotation: Vec<Option<Vec<usize>>> = Vec::new();
        while let Some(&&(no, line)) = it.peek() {
            let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
            match tag {
                "V" => {
                    if vertex_count.is_some() {
                        return Err(parse_error(no, "duplicate V line"));
                    }
                    let n = parse_usize(rest.trim(), no)?;
                    vertex_count = Some(n);
                    rotation = vec![None; n];
                }
                "F" => {
                    if outer.is_some() {
                        return Err(parse_error(no, "duplicate F line"));
                    }
                    outer = Some(parse_usize(rest.trim(), no)?);
                }
                "A" => {
                    let n = vertex_count.ok_or_else(|| parse_error(no, "A line before V line"))?;
                    let (vs, list) = rest
                        .split_once(':')
                        .ok_or_else(|| parse_error(no, "expected `A <v>: <neighbors>`"))?;
                    let v = parse_usize(vs.trim(), no)?;
                    if v >= n {
                        return Err(parse_error(no, format!("vertex {v} out of range")));
                    }
                    if rotation[v].is_some() {
                        return Err(parse_error(no, format!("duplicate A line for vertex {v}")));
                    }
                    let nbrs = list
                        .split_whitespace()
                        .map(|t| parse_usize(t, no))
                        .collect::<Result<Vec<_>>>()?;
                    rotation[v] = Some(nbrs);
                }
                _ => break,
            }
            it.next();
            used += 1;
        }
        let last_line = lines.get(used.saturating_sub(1)).map(|l| l.0).unwrap_or(0);
        vertex_count.ok_or_else(|| parse_error(last_line, "missing V line"))?;
        let outer = outer.ok_or_else(|| parse_error(last_line, "missing F line"))?;
        let rotation = rotation
            .into_iter()
            .enumerate()
            .map(|(v, r)| r.ok_or_else(|| parse_error(last_line, format!("missing A line for vertex {v}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok((Self::new(rotation, outer)?, used))
    }
}

/// Non-empty lines with `#` comments removed, paired with 1-based numbers.
pub(crate) fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

pub(crate) fn parse_usize(token: &str, line: usize) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_error(line, format!("expected a nonnegative integer, got `{token}`")))
}

/// Largest graph accepted by [`count_bruteforce`].
pub const BRUTE_FORCE_LIMIT: usize = 36;

/// Counts perfect matchings by exhaustive search: match the lowest-index
/// free vertex to each free neighbor in increasing index order.
pub fn count_bruteforce(g: &PlaneGraph) -> Result<MatchCount> {
    let n = g.vertex_count();
    if n % 2 == 1 {
        return Ok(MatchCount::from(0));
    }
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimitExceeded {
            vertices: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let adjacency: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | (1 << u)))
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    Ok(MatchCount::from(extend_matching(&adjacency, 0, full)))
}

fn extend_matching(adjacency: &[u64], matched: u64, full: u64) -> u64 {
    if matched == full {
        return 1;
    }
    let v = (!matched).trailing_zeros() as usize;
    let mut free = adjacency[v] & !matched;
    let mut total = 0;
    while free != 0 {
        let u = free.trailing_zeros() as usize;
        free &= free - 1;
        total += extend_matching(adjacency, matched | (1 << v) | (1 << u), full);
    }
    total
}
