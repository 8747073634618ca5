//! Plane bipartite graphs with 2n-fold rotational symmetry, described by one
//! sector and the links joining consecutive sectors.
//!
//! Sectors are numbered clockwise around the center. Drawing sector 0 with
//! the center below it, its boundary walk (outer face on the right) runs
//! along the central side from left to right, up the right side, across the
//! top and down the left side. Link `k` joins `r_k` of sector `i` to `s_k`
//! of sector `i + 1`; links are listed from the center outward, so the `r_k`
//! appear on the right side in walk order and the `s_k` on the left side in
//! reverse walk order. Copy `i` of sector vertex `v` is vertex `i * N' + v`
//! of the expansion, where `N'` is the sector order.
//!
//! Counting uses the product formula: the expansion has as many perfect
//! matchings as the product of `|det(A + a R + a^-1 R^T)|` over `n` unit
//! complex weights `a`, where `A` is the Pfaffian-oriented sector and `R`
//! records the signed links.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{parse_error, Error, Result};
use crate::fkt::{clockwise_count, orient_with_root, Orientation};
use crate::numeric::{complex_det, log_abs_det, round_to_integer, Cplx, IntegerEvaluation, Precision, Real};
use crate::plane_graph::{content_lines, parse_usize, MatchCount, PlaneGraph};
use crate::quadrature::{integrate_1d, Estimate, QuadratureSpec};

/// Direction of a link edge under the regular orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// The arc runs from `r` in sector `i` to `s` in sector `i + 1`.
    Forward,
    /// The arc runs from `s` in sector `i + 1` to `r` in sector `i`.
    Backward,
}

impl Polarity {
    pub fn sign(self) -> i64 {
        match self {
            Polarity::Forward => 1,
            Polarity::Backward => -1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Polarity::Forward => '+',
            Polarity::Backward => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Link {
    pub r: usize,
    pub s: usize,
    pub polarity: Polarity,
}

/// Parities of the half rotation order and of the local width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityCase {
    BothEven,
    OddOrderEvenWidth,
    EvenOrderOddWidth,
    BothOdd,
}

impl ParityCase {
    pub fn of(n: usize, width: usize) -> Self {
        match (n % 2, width % 2) {
            (0, 0) => ParityCase::BothEven,
            (1, 0) => ParityCase::OddOrderEvenWidth,
            (0, _) => ParityCase::EvenOrderOddWidth,
            _ => ParityCase::BothOdd,
        }
    }

    /// Whether the links closing the ring run opposite to the others.
    pub fn closing_reversed(self) -> bool {
        self != ParityCase::BothOdd
    }
}

impl fmt::Display for ParityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParityCase::BothEven => "n even, w even",
            ParityCase::OddOrderEvenWidth => "n odd, w even",
            ParityCase::EvenOrderOddWidth => "n even, w odd",
            ParityCase::BothOdd => "n odd, w odd",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Attach {
    /// Right-side endpoint of link `k`; neighbor lives in the next sector.
    Next(usize),
    /// Left-side endpoint of link `k`; neighbor lives in the previous sector.
    Prev(usize),
}

/// Where link edges enter each sector vertex's rotation: after neighbor
/// `u` (or into an empty rotation when `u` is `None`).
#[derive(Debug, Clone, PartialEq, Eq)]
struct Stitching {
    insert: HashMap<(usize, Option<usize>), Vec<Attach>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricQuotient {
    sector: PlaneGraph,
    n: usize,
    links: Vec<Link>,
    width: usize,
    stitching: Stitching,
    /// Kasteleyn orientation of the sector, per sector edge id.
    sector_forward: Vec<bool>,
}

/// The expanded graph with its distinguished faces and link bookkeeping.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub graph: PlaneGraph,
    /// Face surrounding the rotation center.
    pub central_face: usize,
    link_edges: HashMap<usize, (usize, usize)>,
}

fn sector_count_error(msg: impl Into<String>) -> Error {
    Error::InvalidQuotient(msg.into())
}

impl SymmetricQuotient {
    /// Builds a quotient from sector, half rotation order and link endpoints
    /// (innermost first). Width and link polarities are derived.
    pub fn new(sector: PlaneGraph, n: usize, links: &[(usize, usize)]) -> Result<Self> {
        let mut q = Self::skeleton(sector, n, links)?;
        let bits = q.solve_polarities()?;
        for (link, b) in q.links.iter_mut().zip(bits) {
            link.polarity = if b { Polarity::Forward } else { Polarity::Backward };
        }
        Ok(q)
    }

    /// Builds a quotient from fully specified data, checking the declared
    /// width and polarities against the embedding.
    pub fn with_declared(sector: PlaneGraph, n: usize, width: usize, links: &[Link]) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = links.iter().map(|l| (l.r, l.s)).collect();
        let mut q = Self::skeleton(sector, n, &pairs)?;
        if q.width != width {
            return Err(Error::WidthMismatch {
                declared: width,
                computed: q.width,
            });
        }
        q.links = links.to_vec();
        let probe = q.stitch(q.probe_order(), true)?;
        let o = q.orientation_on(&probe);
        if !crate::fkt::verify_orientation(&probe.graph, &o)? {
            return Err(Error::InvalidPolarity);
        }
        Ok(q)
    }

    fn skeleton(sector: PlaneGraph, n: usize, links: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(sector_count_error("rotation order must be positive"));
        }
        if links.is_empty() {
            return Err(sector_count_error("at least one link is required"));
        }
        let order = sector.vertex_count();
        for &(r, s) in links {
            for v in [r, s] {
                if v >= order {
                    return Err(Error::IndexOutOfRange { index: v, bound: order });
                }
            }
        }
        sector.require_connected()?;
        let sector_forward = orient_with_root(&sector, sector.outer_face())?;
        let mut q = SymmetricQuotient {
            sector,
            n,
            links: links
                .iter()
                .map(|&(r, s)| Link {
                    r,
                    s,
                    polarity: Polarity::Forward,
                })
                .collect(),
            width: 0,
            stitching: Stitching {
                insert: HashMap::new(),
            },
            sector_forward,
        };
        q.stitching = q.find_stitching()?;
        let probe = q.stitch(q.probe_order(), true)?;
        q.width = q.width_on(&probe);
        Ok(q)
    }

    pub fn sector(&self) -> &PlaneGraph {
        &self.sector
    }

    /// Half the rotation order.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Number of sector edges on the central face.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn sector_order(&self) -> usize {
        self.sector.vertex_count()
    }

    pub fn expanded_order(&self) -> usize {
        2 * self.n * self.sector_order()
    }

    pub fn parity_case(&self) -> ParityCase {
        ParityCase::of(self.n, self.width)
    }

    /// Same sector and links with a different rotation order.
    pub fn with_order(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(sector_count_error("rotation order must be positive"));
        }
        let pairs: Vec<(usize, usize)> = self.links.iter().map(|l| (l.r, l.s)).collect();
        if n % 2 == self.n % 2 {
            let mut q = self.clone();
            q.n = n;
            return Ok(q);
        }
        Self::new(self.sector.clone(), n, &pairs)
    }

    /// Smallest order with the same parity as `n` whose ring has room for
    /// every local face; used to derive order-independent data cheaply.
    fn probe_order(&self) -> usize {
        if self.n <= 3 {
            self.n
        } else if self.n.is_multiple_of(2) {
            2
        } else {
            3
        }
    }

    fn outer_walk_corners(&self) -> Vec<(usize, Option<usize>)> {
        let walk = &self.sector.faces()[self.sector.outer_face()].walk;
        if walk.is_empty() {
            return vec![(0, None)];
        }
        let len = walk.len();
        (0..len)
            .map(|k| (walk[k], Some(walk[(k + len - 1) % len])))
            .collect()
    }

    /// Assigns every link endpoint to a corner of the sector's outer walk,
    /// trying each corner of the innermost right endpoint in turn.
    fn find_stitching(&self) -> Result<Stitching> {
        let corners = self.outer_walk_corners();
        let len = corners.len();
        let p = self.links.len();
        let sequence: Vec<(usize, Attach)> = (0..p)
            .map(|k| (self.links[k].r, Attach::Next(k)))
            .chain((0..p).rev().map(|k| (self.links[k].s, Attach::Prev(k))))
            .collect();
        let mut last_error = Error::NonPlanarStitching("no corner fits the first link".into());
        for start in (0..len).filter(|&c| corners[c].0 == self.links[0].r) {
            let mut placed: Vec<(usize, Attach)> = Vec::with_capacity(sequence.len());
            let mut offset = 0;
            let mut ok = true;
            for &(vertex, attach) in &sequence {
                match (offset..=len).find(|&o| corners[(start + o) % len].0 == vertex) {
                    Some(o) => {
                        offset = o;
                        placed.push((o, attach));
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            // a full lap lands back on the starting corner, ahead of the
            // items that were placed there first
            placed.sort_by_key(|&(o, _)| if o == len { 0 } else { o + 1 });
            let mut insert: HashMap<(usize, Option<usize>), Vec<Attach>> = HashMap::new();
            for (o, attach) in placed {
                let corner = corners[(start + o) % len];
                insert.entry(corner).or_default().push(attach);
            }
            let candidate = Stitching { insert };
            let mut trial = self.clone();
            trial.stitching = candidate.clone();
            match trial.stitch(trial.probe_order(), true) {
                Ok(_) => return Ok(candidate),
                Err(e) => last_error = e,
            }
        }
        Err(match last_error {
            Error::NotBipartite => Error::NotBipartite,
            Error::NonPlanarStitching(m) => Error::NonPlanarStitching(m),
            other => Error::NonPlanarStitching(other.to_string()),
        })
    }

    fn rotation(&self, n: usize, closing: bool) -> (Vec<Vec<usize>>, HashMap<(usize, usize), (usize, usize)>) {
        let order = self.sector_order();
        let sectors = 2 * n;
        let mut rotation = vec![Vec::new(); sectors * order];
        let mut link_edges = HashMap::new();
        for i in 0..sectors {
            let base = i * order;
            for v in 0..order {
                let list = &mut rotation[base + v];
                let attach = |list: &mut Vec<usize>, items: Option<&Vec<Attach>>| {
                    for item in items.into_iter().flatten() {
                        match *item {
                            Attach::Next(k) if closing || i + 1 < sectors => {
                                list.push(((i + 1) % sectors) * order + self.links[k].s)
                            }
                            Attach::Prev(k) if closing || i > 0 => {
                                list.push(((i + sectors - 1) % sectors) * order + self.links[k].r)
                            }
                            _ => {}
                        }
                    }
                };
                attach(list, self.stitching.insert.get(&(v, None)));
                for &u in self.sector.neighbors(v) {
                    list.push(base + u);
                    attach(list, self.stitching.insert.get(&(v, Some(u))));
                }
            }
            for (k, link) in self.links.iter().enumerate() {
                if closing || i + 1 < sectors {
                    let a = base + link.r;
                    let b = ((i + 1) % sectors) * order + link.s;
                    link_edges.insert((a.min(b), a.max(b)), (i, k));
                }
            }
        }
        (rotation, link_edges)
    }

    /// Expansion at half order `n`, with (`closing`) or without the links
    /// from the last sector back to sector 0.
    fn stitch(&self, n: usize, closing: bool) -> Result<Expansion> {
        let (rotation, pairs) = self.rotation(n, closing);
        let outer_tail = self.sector_order() + self.links.last().expect("links are nonempty").s;
        let outer_head = self.links.last().expect("links are nonempty").r;
        let graph = PlaneGraph::with_outer_dart(rotation, outer_tail, outer_head)
            .map_err(|e| Error::NonPlanarStitching(e.to_string()))?;
        if !graph.is_connected() {
            return Err(Error::NonPlanarStitching("expansion is disconnected".into()));
        }
        if graph.bipartition().is_none() {
            return Err(Error::NotBipartite);
        }
        let central_face = graph
            .dart_face(self.links[0].r, self.sector_order() + self.links[0].s)
            .expect("innermost link is an edge");
        if closing && central_face == graph.outer_face() {
            return Err(Error::NonPlanarStitching(
                "central and outer faces coincide".into(),
            ));
        }
        let link_edges = pairs
            .into_iter()
            .filter_map(|(key, v)| graph.edge_id(key.0, key.1).map(|e| (e, v)))
            .collect();
        Ok(Expansion {
            graph,
            central_face,
            link_edges,
        })
    }

    fn width_on(&self, x: &Expansion) -> usize {
        let order = self.sector_order();
        let g = &x.graph;
        let mut darts_on_face = vec![0usize; g.edge_count()];
        for &d in g.face_dart_ids(x.central_face) {
            darts_on_face[g.dart_edge(d)] += 1;
        }
        g.edges()
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| u < order && v < order)
            .filter(|(e, _)| darts_on_face[*e] == 1)
            .count()
    }

    /// Link direction bits at the first junction: the innermost link runs
    /// clockwise on the central face whenever the faces between sectors
    /// leave that choice free.
    fn solve_polarities(&self) -> Result<Vec<bool>> {
        let probe = self.stitch(self.probe_order(), true)?;
        let g = &probe.graph;
        let p = self.links.len();
        let closing_flip = self.parity_case().closing_reversed();
        let last = 2 * self.probe_order() - 1;
        let sector_fwd = self.expanded_sector_forward(g);

        let mut rows: Vec<(Vec<bool>, bool)> = Vec::new();
        for f in 0..g.faces().len() {
            if f == g.outer_face() || f == probe.central_face {
                continue;
            }
            let mut coeff = vec![false; p];
            let mut rhs = true;
            let mut touches_link = false;
            for &d in g.face_dart_ids(f) {
                let (u, v) = g.dart_ends(d);
                let e = g.dart_edge(d);
                match probe.link_edges.get(&e) {
                    Some(&(junction, k)) => {
                        touches_link = true;
                        // dart agrees with the arc when the arc is r -> s and
                        // the dart starts in the junction's left sector
                        let from_left = u / self.sector_order() == junction;
                        let flip = junction == last && closing_flip;
                        coeff[k] ^= true;
                        rhs ^= !from_left ^ flip;
                    }
                    None => rhs ^= sector_fwd[e] == (u < v),
                }
            }
            if touches_link {
                rows.push((coeff, rhs));
            } else if !rhs {
                // a sector face that is already odd contributes nothing
            } else {
                return Err(sector_count_error("sector face with even clockwise count"));
            }
        }
        let mut pinned = rows.clone();
        let mut pin = vec![false; p];
        pin[0] = true;
        pinned.push((pin, true));
        let bits = solve_gf2(pinned, p)
            .or_else(|| solve_gf2(rows, p))
            .ok_or_else(|| sector_count_error("no consistent link orientation"))?;
        Ok(bits)
    }

    /// Sector-edge directions of the expansion, per expanded edge id; link
    /// edges are left `false`.
    fn expanded_sector_forward(&self, g: &PlaneGraph) -> Vec<bool> {
        let order = self.sector_order();
        g.edges()
            .iter()
            .map(|&(a, b)| {
                if a / order != b / order {
                    return false;
                }
                let sector = a / order;
                let e = self
                    .sector
                    .edge_id(a % order, b % order)
                    .expect("sector edges map back");
                // copies keep the vertex order, so forward means the same
                self.sector_forward[e] ^ (sector % 2 == 1)
            })
            .collect()
    }

    fn orientation_on(&self, x: &Expansion) -> Orientation {
        let g = &x.graph;
        let order = self.sector_order();
        let sectors = g.vertex_count() / order;
        let closing_flip = self.parity_case().closing_reversed();
        let mut forward = self.expanded_sector_forward(g);
        for (&e, &(junction, k)) in &x.link_edges {
            let link = self.links[k];
            let r = junction * order + link.r;
            let s = ((junction + 1) % sectors) * order + link.s;
            let mut r_to_s = link.polarity == Polarity::Forward;
            if junction == sectors - 1 && closing_flip && sectors > 1 {
                r_to_s = !r_to_s;
            }
            forward[e] = r_to_s == (r < s);
        }
        Orientation::from_forward_flags(g, &forward)
    }

    /// The full rotation-symmetric graph.
    pub fn expand(&self) -> Result<PlaneGraph> {
        Ok(self.stitch(self.n, true)?.graph)
    }

    /// Expansion together with its central face.
    pub fn expansion(&self) -> Result<Expansion> {
        self.stitch(self.n, true)
    }

    /// The sectors joined in a strip, without the links closing the ring.
    pub fn expand_open(&self) -> Result<PlaneGraph> {
        Ok(self.stitch(self.n, false)?.graph)
    }

    /// Regular orientation of [`SymmetricQuotient::expand`].
    pub fn regular_orientation(&self) -> Result<Orientation> {
        let x = self.stitch(self.n, true)?;
        Ok(self.orientation_on(&x))
    }

    /// Clockwise edges on the central face under the regular orientation.
    pub fn central_clockwise_count(&self) -> Result<usize> {
        let x = self.stitch(self.n, true)?;
        let o = self.orientation_on(&x);
        let forward = o.forward_flags(&x.graph)?;
        Ok(clockwise_count(&x.graph, &forward, x.central_face))
    }

    /// Skew adjacency of the oriented sector.
    pub fn sector_matrix(&self) -> Vec<Vec<i64>> {
        let order = self.sector_order();
        let mut a = vec![vec![0i64; order]; order];
        for (e, &(u, v)) in self.sector.edges().iter().enumerate() {
            let (t, h) = if self.sector_forward[e] { (u, v) } else { (v, u) };
            a[t][h] = 1;
            a[h][t] = -1;
        }
        a
    }

    /// Signed link matrix: entry `(r, s)` is the polarity sign of the link.
    pub fn link_matrix(&self) -> Vec<Vec<i64>> {
        let order = self.sector_order();
        let mut r = vec![vec![0i64; order]; order];
        for link in &self.links {
            r[link.r][link.s] += link.polarity.sign();
        }
        r
    }

    /// Serializes to the `symmetric-quotient v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::from("symmetric-quotient v1\n");
        out.push_str(&format!("N 2*{}\n", self.n));
        out.push_str(&format!("W {}\n", self.width));
        out.push_str("SECTOR\n");
        out.push_str(&self.sector.to_text());
        for l in &self.links {
            out.push_str(&format!("LINK {} {} {}\n", l.r, l.s, l.polarity.symbol()));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let lines = content_lines(text);
        let mut it = lines.iter().copied().enumerate();
        let (_, (no, header)) = it.next().ok_or_else(|| parse_error(0, "empty input"))?;
        if header != "symmetric-quotient v1" {
            return Err(parse_error(no, format!("expected `symmetric-quotient v1`, got `{header}`")));
        }
        let mut n = None;
        let mut width = None;
        let mut sector = None;
        let mut links = Vec::new();
        let mut idx = 1;
        while idx < lines.len() {
            let (no, line) = lines[idx];
            let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
            let rest = rest.trim();
            match tag {
                "N" => {
                    let half = match rest.strip_prefix("2*") {
                        Some(h) => parse_usize(h.trim(), no)?,
                        None => {
                            let total = parse_usize(rest, no)?;
                            if total % 2 == 1 {
                                return Err(parse_error(no, "rotation order must be even"));
                            }
                            total / 2
                        }
                    };
                    n = Some(half);
                    idx += 1;
                }
                "W" => {
                    width = Some(parse_usize(rest, no)?);
                    idx += 1;
                }
                "SECTOR" => {
                    let block: Vec<(usize, &str)> = if rest.is_empty() {
                        lines[idx + 1..].to_vec()
                    } else {
                        std::iter::once((no, rest)).chain(lines[idx + 1..].iter().copied()).collect()
                    };
                    let (g, used) = PlaneGraph::parse_block(&block)?;
                    sector = Some(g);
                    idx += if rest.is_empty() { used + 1 } else { used };
                }
                "LINK" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 3 {
                        return Err(parse_error(no, "expected `LINK <r> <s> <+|->`"));
                    }
                    let polarity = match parts[2] {
                        "+" => Polarity::Forward,
                        "-" => Polarity::Backward,
                        other => return Err(parse_error(no, format!("bad polarity `{other}`"))),
                    };
                    links.push(Link {
                        r: parse_usize(parts[0], no)?,
                        s: parse_usize(parts[1], no)?,
                        polarity,
                    });
                    idx += 1;
                }
                _ => return Err(parse_error(no, format!("unexpected line `{line}`"))),
            }
        }
        let end = lines.last().map(|l| l.0).unwrap_or(0);
        let n = n.ok_or_else(|| parse_error(end, "missing N line"))?;
        let width = width.ok_or_else(|| parse_error(end, "missing W line"))?;
        let sector = sector.ok_or_else(|| parse_error(end, "missing SECTOR block"))?;
        Self::with_declared(sector, n, width, &links)
    }
}

/// Gaussian elimination over GF(2); free variables are set to zero.
fn solve_gf2(mut rows: Vec<(Vec<bool>, bool)>, vars: usize) -> Option<Vec<bool>> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..vars {
        let Some(p) = (next..rows.len()).find(|&r| rows[r].0[col]) else {
            continue;
        };
        rows.swap(next, p);
        let (pivot_coeff, pivot_rhs) = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.0[col] {
                for (a, b) in row.0.iter_mut().zip(&pivot_coeff) {
                    *a ^= *b;
                }
                row.1 ^= pivot_rhs;
            }
        }
        pivots.push((next, col));
        next += 1;
    }
    if rows[next..].iter().any(|(_, rhs)| *rhs) {
        return None;
    }
    let mut x = vec![false; vars];
    for (row, col) in pivots {
        x[col] = rows[row].1;
    }
    Some(x)
}

/// Unit complex weight attached to the links in the `j`-th factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaWeight {
    pub j: usize,
    pub value: Cplx<f64>,
}

impl AlphaWeight {
    /// Rejects weights off the unit circle.
    pub fn new(j: usize, value: Cplx<f64>) -> Result<Self> {
        let modulus = value.abs();
        if (modulus - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitWeight(modulus));
        }
        Ok(AlphaWeight { j, value })
    }

    pub fn at_angle(x: f64) -> Self {
        AlphaWeight {
            j: 0,
            value: Cplx::unit(&x),
        }
    }
}

/// The weight's argument as a multiple of `pi / 2n`: `2j` when `n` is odd
/// and `w` even, `2j + 1` otherwise.
pub fn alpha_numerator(j: usize, n: usize, width: usize) -> usize {
    if n % 2 == 1 && width.is_multiple_of(2) {
        2 * j
    } else {
        2 * j + 1
    }
}

pub fn alpha(j: usize, n: usize, width: usize) -> Result<AlphaWeight> {
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, bound: n });
    }
    let theta = alpha_numerator(j, n, width) as f64 * PI / (2 * n) as f64;
    AlphaWeight::new(j, Cplx::unit(&theta))
}

/// `A + a R + a^-1 R^T` for one unit weight `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientMatrix {
    entries: Vec<Vec<Cplx<f64>>>,
}

impl QuotientMatrix {
    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<Cplx<f64>>] {
        &self.entries
    }

    pub fn det(&self) -> Cplx<f64> {
        complex_det(self.entries.clone(), 53)
    }

    pub fn log_abs_det(&self) -> f64 {
        log_abs_det(self.entries.clone())
    }
}

fn assemble<T: Real>(a: &[Vec<i64>], r: &[Vec<i64>], weight: &Cplx<T>, bits: usize) -> Vec<Vec<Cplx<T>>> {
    let order = a.len();
    let inverse = weight.conj();
    let mut m = vec![vec![Cplx::<T>::zero(bits); order]; order];
    for i in 0..order {
        for j in 0..order {
            let mut entry = Cplx::real(T::from_i64(a[i][j], bits));
            if r[i][j] != 0 {
                entry = entry + weight.scale(&T::from_i64(r[i][j], bits));
            }
            if r[j][i] != 0 {
                entry = entry + inverse.scale(&T::from_i64(r[j][i], bits));
            }
            m[i][j] = entry;
        }
    }
    m
}

pub fn build_quotient_matrix(q: &SymmetricQuotient, j: usize) -> Result<QuotientMatrix> {
    Ok(build_quotient_matrix_at(q, &alpha(j, q.n(), q.width())?))
}

pub fn build_quotient_matrix_at(q: &SymmetricQuotient, weight: &AlphaWeight) -> QuotientMatrix {
    QuotientMatrix {
        entries: assemble(&q.sector_matrix(), &q.link_matrix(), &weight.value, 53),
    }
}

/// The product of `|det A_j|` as an integer-valued expression.
struct ProductFormula<'a> {
    q: &'a SymmetricQuotient,
    a: Vec<Vec<i64>>,
    r: Vec<Vec<i64>>,
}

impl IntegerEvaluation for ProductFormula<'_> {
    fn describe(&self) -> String {
        format!(
            "determinant product over {} quotient matrices of order {}",
            self.q.n(),
            self.q.sector_order()
        )
    }

    fn log2_magnitude(&self) -> f64 {
        (0..self.q.n())
            .map(|j| {
                let theta = alpha_numerator(j, self.q.n(), self.q.width()) as f64 * PI / (2 * self.q.n()) as f64;
                log_abs_det(assemble(&self.a, &self.r, &Cplx::unit(&theta), 53))
            })
            .sum::<f64>()
            / std::f64::consts::LN_2
    }

    fn evaluate<T: Real>(&self, bits: usize) -> T {
        let n = self.q.n();
        let pi = T::pi(bits);
        let denominator = T::from_i64(2 * n as i64, bits);
        let mut product = T::from_i64(1, bits);
        for j in 0..n {
            let k = alpha_numerator(j, n, self.q.width()) as i64;
            let theta = pi.clone() * T::from_i64(k, bits) / denominator.clone();
            let m = assemble(&self.a, &self.r, &Cplx::unit(&theta), bits);
            product = product * complex_det(m, bits).abs();
        }
        product
    }
}

/// Matching count of the expansion from the `n` quotient determinants.
pub fn count_product(q: &SymmetricQuotient, precision: Precision) -> Result<MatchCount> {
    let formula = ProductFormula {
        q,
        a: q.sector_matrix(),
        r: q.link_matrix(),
    };
    round_to_integer(&formula, precision).map(MatchCount::new)
}

/// Bulk entropy `(1 / (N' pi)) * integral_0^pi log|det D(x)| dx`, where `D(x)`
/// is the quotient matrix at weight `e^{ix}`.
pub fn entropy_quotient(q: &SymmetricQuotient, spec: &QuadratureSpec) -> Result<Estimate> {
    let a = q.sector_matrix();
    let r = q.link_matrix();
    let integral = integrate_1d(
        |x| log_abs_det(assemble(&a, &r, &Cplx::unit(&x), 53)),
        0.0,
        PI,
        spec,
    )?;
    Ok(integral.scale(1.0 / (q.sector_order() as f64 * PI)))
}

/// `(2 / N) log M` for the expansion, from the determinant product in `f64`.
pub fn entropy_finite(q: &SymmetricQuotient) -> f64 {
    let a = q.sector_matrix();
    let r = q.link_matrix();
    let log_count: f64 = (0..q.n())
        .map(|j| {
            let theta = alpha_numerator(j, q.n(), q.width()) as f64 * PI / (2 * q.n()) as f64;
            log_abs_det(assemble(&a, &r, &Cplx::unit(&theta), 53))
        })
        .sum();
    2.0 * log_count / q.expanded_order() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fkt::{count_fkt, verify_orientation};
    use crate::plane_graph::count_bruteforce;

    fn single_edge(n: usize) -> SymmetricQuotient {
        // vertex 0 on the left, 1 on the right; the link joins 1 to the
        // next sector's 0
        let sector = PlaneGraph::new(vec![vec![1], vec![0]], 0).unwrap();
        SymmetricQuotient::new(sector, n, &[(1, 0)]).unwrap()
    }

    #[test]
    fn single_edge_ring_is_a_cycle() {
        let q = single_edge(1);
        let g = q.expand().unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(q.width(), 1);
        assert_eq!(count_bruteforce(&g).unwrap(), 2);
        assert_eq!(count_product(&q, Precision::default()).unwrap(), 2);
    }

    #[test]
    fn single_edge_rings_of_every_parity() {
        for n in 1..=5 {
            let q = single_edge(n);
            let g = q.expand().unwrap();
            assert_eq!(g.vertex_count(), 4 * n);
            assert!(verify_orientation(&g, &q.regular_orientation().unwrap()).unwrap());
            let brute = count_bruteforce(&g).unwrap();
            assert_eq!(brute, 2);
            assert_eq!(count_product(&q, Precision::default()).unwrap(), brute);
        }
    }

    #[test]
    fn alpha_branches() {
        let a = alpha(0, 3, 2).unwrap().value;
        assert!((a.re - 1.0).abs() < 1e-15 && a.im.abs() < 1e-15);
        let a = alpha(1, 3, 0).unwrap().value;
        assert!((a.re - 0.5).abs() < 1e-15 && (a.im - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let a = alpha(0, 1, 1).unwrap().value;
        assert!(a.re.abs() < 1e-15 && (a.im - 1.0).abs() < 1e-15);
        assert_eq!(
            alpha(3, 3, 0).unwrap_err(),
            Error::IndexOutOfRange { index: 3, bound: 3 }
        );
        assert!(matches!(
            AlphaWeight::new(0, Cplx::new(1.1, 0.0)),
            Err(Error::NonUnitWeight(_))
        ));
    }

    #[test]
    fn gf2_solver() {
        let rows = vec![(vec![true, true], true), (vec![false, true], true)];
        assert_eq!(solve_gf2(rows, 2), Some(vec![false, true]));
        let rows = vec![(vec![true], true), (vec![true], false)];
        assert_eq!(solve_gf2(rows, 1), None);
    }

    #[test]
    fn text_roundtrip_and_declared_checks() {
        let q = single_edge(3);
        let text = q.to_text();
        assert!(text.starts_with("symmetric-quotient v1\nN 2*3\nW 1\nSECTOR\nplanar-graph v1\n"));
        let back = SymmetricQuotient::parse(&text).unwrap();
        assert_eq!(back.links(), q.links());
        assert_eq!(back.to_text(), text);

        let wrong_width = text.replace("W 1", "W 2");
        assert_eq!(
            SymmetricQuotient::parse(&wrong_width).unwrap_err(),
            Error::WidthMismatch {
                declared: 2,
                computed: 1
            }
        );
    }

    #[test]
    fn open_expansion_drops_closing_links() {
        let q = single_edge(2);
        let g = q.expand_open().unwrap();
        assert_eq!(g.edge_count(), 4 + 3);
        assert_eq!(count_fkt(&g).unwrap(), count_bruteforce(&g).unwrap());
    }
}
