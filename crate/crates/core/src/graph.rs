//! ψ-graphs: edge-labeled, color-regular, bipartite multigraphs.
//!
//! A vertex is either a ket (a copy of ψ) or a bra (a copy of ψ̄). An edge
//! with label `a` contracts the index of party `a` between a ket and a bra.
//! Vertex ids are the indices `0..vertex_count()`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the number of group elements enumerated for a Cayley graph.
pub const DEFAULT_MAX_ELEMENTS: usize = 10_000;

/// Two group elements closer than this in max-norm are identified.
const COXETER_DEDUP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Ket,
    Bra,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Ket => Parity::Bra,
            Parity::Bra => Parity::Ket,
        }
    }

    fn from_bit(bit: usize) -> Self {
        if bit.is_multiple_of(2) {
            Parity::Ket
        } else {
            Parity::Bra
        }
    }

    fn bit(self) -> usize {
        match self {
            Parity::Ket => 0,
            Parity::Bra => 1,
        }
    }
}

/// An undirected labeled edge. `label` is the party index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: usize,
}

impl Edge {
    pub fn new(u: usize, v: usize, label: usize) -> Self {
        Self { u, v, label }
    }

    /// The endpoint opposite to `x`, if `x` is an endpoint.
    pub fn other(&self, x: usize) -> Option<usize> {
        if self.u == x {
            Some(self.v)
        } else if self.v == x {
            Some(self.u)
        } else {
            None
        }
    }
}

/// Edge-labeled graph encoding a local-unitary invariant polynomial.
///
/// Construction does not validate; call [`PsiGraph::validate`] or use
/// [`PsiGraph::validated`] to enforce the ψ-graph invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiGraph {
    party_count: usize,
    parity: Vec<Parity>,
    edges: Vec<Edge>,
    party_names: Option<Vec<String>>,
    incidence: Vec<Vec<usize>>,
}

impl PsiGraph {
    pub fn new(party_count: usize, parity: Vec<Parity>, edges: Vec<Edge>) -> Self {
        let mut incidence = vec![Vec::new(); parity.len()];
        for (idx, e) in edges.iter().enumerate() {
            if e.u < parity.len() {
                incidence[e.u].push(idx);
            }
            if e.v < parity.len() && e.v != e.u {
                incidence[e.v].push(idx);
            }
        }
        Self {
            party_count,
            parity,
            edges,
            party_names: None,
            incidence,
        }
    }

    /// Builds a graph and rejects it unless every invariant holds.
    pub fn validated(party_count: usize, parity: Vec<Parity>, edges: Vec<Edge>) -> Result<Self> {
        let g = Self::new(party_count, parity, edges);
        g.ensure_valid()?;
        Ok(g)
    }

    pub fn with_party_names(mut self, names: Vec<String>) -> Self {
        self.party_names = Some(names);
        self
    }

    pub fn party_names(&self) -> Option<&[String]> {
        self.party_names.as_deref()
    }

    pub fn party_count(&self) -> usize {
        self.party_count
    }

    pub fn vertex_count(&self) -> usize {
        self.parity.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> Edge {
        self.edges[idx]
    }

    pub fn parity(&self, v: usize) -> Parity {
        self.parity[v]
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parity
    }

    /// Edge indices incident to `v`.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    /// Number of ket vertices: the homogeneity degree of the invariant.
    pub fn ket_count(&self) -> usize {
        self.parity.iter().filter(|p| **p == Parity::Ket).count()
    }

    /// The `label` edge at `v` and the vertex across it.
    pub fn neighbor(&self, v: usize, label: usize) -> Option<(usize, usize)> {
        self.incidence[v].iter().find_map(|&idx| {
            let e = self.edges[idx];
            if e.label == label {
                e.other(v).map(|w| (idx, w))
            } else {
                None
            }
        })
    }

    /// Indices of all edges carrying `label`, ascending.
    pub fn label_edges(&self, label: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| self.edges[i].label == label)
            .collect()
    }

    /// True when no two edges join the same pair of vertices.
    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges
            .iter()
            .all(|e| seen.insert((e.u.min(e.v), e.u.max(e.v))))
    }

    /// Number of edges with `label` between `a` and `b`.
    pub fn multiplicity(&self, a: usize, b: usize, label: usize) -> usize {
        self.incidence[a]
            .iter()
            .filter(|&&idx| {
                let e = self.edges[idx];
                e.label == label && e.other(a) == Some(b)
            })
            .count()
    }

    /// Breadth-first distances from `src`, `usize::MAX` if unreachable.
    pub fn distances_from(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut parent = vec![usize::MAX; self.vertex_count()];
        self.bfs(src, &mut dist, &mut parent);
        dist
    }

    /// A shortest path from `src` to `dst` as a vertex list.
    pub fn shortest_path(&self, src: usize, dst: usize) -> Option<Vec<usize>> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut parent = vec![usize::MAX; self.vertex_count()];
        self.bfs(src, &mut dist, &mut parent);
        if dist[dst] == usize::MAX {
            return None;
        }
        let mut path = vec![dst];
        let mut cur = dst;
        while cur != src {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    fn bfs(&self, src: usize, dist: &mut [usize], parent: &mut [usize]) {
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(x) = queue.pop_front() {
            for &idx in &self.incidence[x] {
                if let Some(y) = self.edges[idx].other(x) {
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        parent[y] = x;
                        queue.push_back(y);
                    }
                }
            }
        }
    }

    /// Connected-component id of each vertex after deleting the edges for
    /// which `removed` returns true. Returns `(component_of, count)`.
    pub fn components_without<F: Fn(usize) -> bool>(&self, removed: F) -> (Vec<usize>, usize) {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &idx in &self.incidence[x] {
                    if removed(idx) {
                        continue;
                    }
                    if let Some(y) = self.edges[idx].other(x) {
                        if comp[y] == usize::MAX {
                            comp[y] = count;
                            stack.push(y);
                        }
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() > 0 && self.components_without(|_| false).1 == 1
    }

    /// Swaps kets and bras. Corresponds to complex conjugation of the invariant.
    pub fn flip_parity(&self) -> Self {
        let mut g = Self::new(
            self.party_count,
            self.parity.iter().map(|p| p.flip()).collect(),
            self.edges.clone(),
        );
        g.party_names = self.party_names.clone();
        g
    }

    /// Merges party `b` into party `a`, combining parallel edges that end up
    /// with the same label into one. Labels above `b` shift down by one.
    ///
    /// For the two-vertex cycle this turns the two parallel edges into the
    /// single-party `K_2`.
    pub fn merge_parties(&self, a: usize, b: usize) -> Result<Self> {
        if a == b || a >= self.party_count || b >= self.party_count {
            return Err(Error::InvalidArgument(format!(
                "cannot merge parties {a} and {b} of {}",
                self.party_count
            )));
        }
        let remap = |l: usize| {
            let l = if l == b { a } else { l };
            if l > b {
                l - 1
            } else {
                l
            }
        };
        // an a-edge and a b-edge on the same vertex pair fuse into one edge
        let mut unpaired: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut edges = Vec::new();
        for e in &self.edges {
            let pair = (e.u.min(e.v), e.u.max(e.v));
            if e.label == a || e.label == b {
                let pending = unpaired.entry(pair).or_default();
                if let Some(pos) = pending.iter().position(|&l| l != e.label) {
                    pending.swap_remove(pos);
                    continue;
                }
                pending.push(e.label);
            }
            edges.push(Edge::new(e.u, e.v, remap(e.label)));
        }
        let g = Self::new(self.party_count - 1, self.parity.clone(), edges);
        g.ensure_valid()?;
        Ok(g)
    }

    /// Checks every ψ-graph invariant and reports each one.
    pub fn validate(&self) -> ValidationReport {
        let n = self.vertex_count();
        let q = self.party_count;
        let mut checks = Vec::new();

        let mut bad = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                bad.push(format!("edge {i} ({}, {}) references a missing vertex", e.u, e.v));
            }
        }
        checks.push(InvariantCheck::new("endpoints_exist", bad));
        if checks[0].passed {
            let mut bad = Vec::new();
            let mut used = vec![false; q];
            for (i, e) in self.edges.iter().enumerate() {
                if e.label >= q {
                    bad.push(format!("edge {i} has label {} >= party count {q}", e.label));
                } else {
                    used[e.label] = true;
                }
            }
            for (l, u) in used.iter().enumerate() {
                if !u {
                    bad.push(format!("label {l} is never used"));
                }
            }
            checks.push(InvariantCheck::new("labels_consecutive", bad));

            let mut bad = Vec::new();
            for v in 0..n {
                let mut hist = vec![0usize; q];
                for &idx in &self.incidence[v] {
                    let e = self.edges[idx];
                    if e.label < q {
                        hist[e.label] += if e.u == e.v { 2 } else { 1 };
                    }
                }
                for (l, &c) in hist.iter().enumerate() {
                    if c != 1 {
                        bad.push(format!("vertex {v} has {c} edges with label {l}"));
                    }
                }
            }
            checks.push(InvariantCheck::new("color_regular", bad));

            let bad = self
                .edges
                .iter()
                .enumerate()
                .filter(|(_, e)| self.parity[e.u] == self.parity[e.v])
                .map(|(i, e)| format!("edge {i} ({}, {}) joins equal parities", e.u, e.v))
                .collect();
            checks.push(InvariantCheck::new("parity_bipartite", bad));

            let bad = if n == 0 {
                vec!["graph has no vertices".to_string()]
            } else {
                let (comp, count) = self.components_without(|_| false);
                if count == 1 {
                    Vec::new()
                } else {
                    (0..n)
                        .filter(|&v| comp[v] != 0)
                        .map(|v| format!("vertex {v} unreachable from vertex 0"))
                        .collect()
                }
            };
            checks.push(InvariantCheck::new("connected", bad));
        }

        let kets = self.ket_count();
        let bras = n - kets;
        let bad = if kets == bras {
            Vec::new()
        } else {
            vec![format!("{kets} ket vertices vs {bras} bra vertices")]
        };
        checks.push(InvariantCheck::new("balanced", bad));

        ValidationReport { checks }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.passed() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(report.to_string()))
        }
    }
}

/// One row of a [`ValidationReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    pub offending: Vec<String>,
}

impl InvariantCheck {
    fn new(name: &'static str, offending: Vec<String>) -> Self {
        Self {
            name,
            passed: offending.is_empty(),
            offending,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<InvariantCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> impl Iterator<Item = &InvariantCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed: Vec<_> = self.failed().collect();
        if failed.is_empty() {
            return write!(f, "all invariants hold");
        }
        for (i, c) in failed.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}: {}", c.name, c.offending.first().map_or("", |s| s.as_str()))?;
        }
        Ok(())
    }
}

/// The cycle `C_n`: `2n` vertices alternating ket/bra, edges alternating
/// labels 0 and 1. It evaluates to `Tr ρ_A^n` on a bipartite state.
///
/// For `n = 1` the result has two parallel edges with labels 0 and 1. With
/// `merge_parties` set, those are fused into the single-party `K_2`; the flag
/// is rejected for `n > 1`.
pub fn build_cycle(n: usize, merge_parties: bool) -> Result<PsiGraph> {
    if n == 0 {
        return Err(Error::InvalidArgument("cycle length must be positive".into()));
    }
    if merge_parties && n > 1 {
        return Err(Error::InvalidArgument(
            "only the two-vertex cycle can merge its parties".into(),
        ));
    }
    let m = 2 * n;
    let parity = (0..m).map(Parity::from_bit).collect();
    let edges = (0..m).map(|i| Edge::new(i, (i + 1) % m, i % 2)).collect();
    let g = PsiGraph::validated(2, parity, edges)?;
    if merge_parties {
        g.merge_parties(0, 1)
    } else {
        Ok(g)
    }
}

/// The 1-skeleton of the `q`-cube. Vertex ids are bit strings, parity is the
/// bit-string parity and edges along coordinate `a` carry label `a`.
///
/// Edges are stored label by label, and within a label by ascending lower
/// endpoint.
pub fn build_hypercube(q: usize) -> Result<PsiGraph> {
    if q == 0 {
        return Err(Error::InvalidArgument("hypercube dimension must be positive".into()));
    }
    if q > 20 {
        return Err(Error::InvalidArgument(format!("hypercube dimension {q} too large")));
    }
    let n = 1usize << q;
    let parity = (0..n)
        .map(|v: usize| Parity::from_bit(v.count_ones() as usize))
        .collect();
    let mut edges = Vec::with_capacity(q * n / 2);
    for a in 0..q {
        for v in 0..n {
            if v & (1 << a) == 0 {
                edges.push(Edge::new(v, v | (1 << a), a));
            }
        }
    }
    PsiGraph::validated(q, parity, edges)
}

/// The two-vertex graph with one edge per party: the squared norm `⟨ψ|ψ⟩`.
pub fn build_norm_graph(q: usize) -> Result<PsiGraph> {
    if q == 0 {
        return Err(Error::InvalidArgument("party count must be positive".into()));
    }
    PsiGraph::validated(
        q,
        vec![Parity::Ket, Parity::Bra],
        (0..q).map(|a| Edge::new(0, 1, a)).collect(),
    )
}

/// Colored Cartesian product `g1 □ g2`.
///
/// Vertex `(v1, v2)` gets id `v1 * |V(g2)| + v2` and parity `p(v1) xor
/// p(v2)`. Labels of `g2` are shifted by `g1.party_count()`. Edges of `g1`
/// come first (ordered by `g1` edge, then by `v2`), followed by edges of
/// `g2` (ordered by `g2` edge, then by `v1`).
pub fn cartesian_product(g1: &PsiGraph, g2: &PsiGraph) -> PsiGraph {
    let n1 = g1.vertex_count();
    let n2 = g2.vertex_count();
    let id = |a: usize, b: usize| a * n2 + b;
    let mut parity = Vec::with_capacity(n1 * n2);
    for a in 0..n1 {
        for b in 0..n2 {
            parity.push(Parity::from_bit(g1.parity(a).bit() ^ g2.parity(b).bit()));
        }
    }
    let mut edges = Vec::with_capacity(g1.edges().len() * n2 + g2.edges().len() * n1);
    for e in g1.edges() {
        for b in 0..n2 {
            edges.push(Edge::new(id(e.u, b), id(e.v, b), e.label));
        }
    }
    for e in g2.edges() {
        for a in 0..n1 {
            edges.push(Edge::new(id(a, e.u), id(a, e.v), e.label + g1.party_count()));
        }
    }
    PsiGraph::new(g1.party_count() + g2.party_count(), parity, edges)
}

/// `C_{n_1} □ … □ C_{n_k}`, using the merged single-party form for `n = 1`.
pub fn build_cycle_product(ns: &[usize]) -> Result<PsiGraph> {
    let mut iter = ns.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidArgument("empty cycle list".into()))?;
    let mut g = build_cycle(*first, *first == 1)?;
    for &n in iter {
        g = cartesian_product(&g, &build_cycle(n, n == 1)?);
    }
    Ok(g)
}

/// Symmetric Coxeter matrix. Off-diagonal `0` encodes `m = ∞`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterMatrix {
    m: Vec<Vec<u32>>,
}

impl CoxeterMatrix {
    pub fn new(m: Vec<Vec<u32>>) -> Result<Self> {
        let q = m.len();
        if q == 0 {
            return Err(Error::InvalidArgument("empty Coxeter matrix".into()));
        }
        for (a, row) in m.iter().enumerate() {
            if row.len() != q {
                return Err(Error::InvalidArgument("Coxeter matrix is not square".into()));
            }
            for (b, &x) in row.iter().enumerate() {
                if m[b][a] != x {
                    return Err(Error::InvalidArgument(format!(
                        "Coxeter matrix not symmetric at ({a}, {b})"
                    )));
                }
                if a == b && x != 1 {
                    return Err(Error::InvalidArgument(format!("diagonal entry {a} is not 1")));
                }
                if a != b && x == 1 {
                    return Err(Error::InvalidArgument(format!(
                        "off-diagonal entry ({a}, {b}) must be >= 2 or 0"
                    )));
                }
            }
        }
        Ok(Self { m })
    }

    /// Rank-two matrix with `m[0][1] = n`; `n = 0` is the infinite dihedral group.
    pub fn dihedral(n: u32) -> Result<Self> {
        Self::new(vec![vec![1, n], vec![n, 1]])
    }

    /// Disjoint union of diagrams: `m = 2` across the blocks.
    pub fn block_diagonal(a: &Self, b: &Self) -> Self {
        let (p, q) = (a.size(), b.size());
        let mut m = vec![vec![2; p + q]; p + q];
        for i in 0..p {
            for j in 0..p {
                m[i][j] = a.m[i][j];
            }
        }
        for i in 0..q {
            for j in 0..q {
                m[p + i][p + j] = b.m[i][j];
            }
        }
        Self { m }
    }

    pub fn size(&self) -> usize {
        self.m.len()
    }

    pub fn entry(&self, a: usize, b: usize) -> u32 {
        self.m[a][b]
    }

    /// Bilinear form `B(e_a, e_b) = -cos(π / m_ab)` of the reflection representation.
    fn bilinear_form(&self) -> Vec<f64> {
        let q = self.size();
        let mut b = vec![0.0; q * q];
        for i in 0..q {
            for j in 0..q {
                b[i * q + j] = match self.m[i][j] {
                    0 => -1.0,
                    m => -(std::f64::consts::PI / f64::from(m)).cos(),
                };
            }
        }
        b
    }
}

/// Cayley graph of the Coxeter group with matrix `m`, generators as labels.
///
/// Elements are enumerated breadth-first as products of reflection matrices
/// `σ_a(x) = x - 2 B(e_a, x) e_a` in the `q`-dimensional geometric
/// representation, where mirrors `a` and `b` meet at angle `π / m_ab`. The
/// edge labeled `a` joins `g` and `σ_a g`; parity is word-length parity.
pub fn build_coxeter_cayley(m: &CoxeterMatrix, max_elements: usize) -> Result<PsiGraph> {
    if max_elements < 2 {
        return Err(Error::InvalidArgument("max_elements must be at least 2".into()));
    }
    let q = m.size();
    let form = m.bilinear_form();
    let key = |g: &[f64]| -> Vec<i64> { g.iter().map(|x| (x * 1e5).round() as i64).collect() };

    let mut identity = vec![0.0; q * q];
    for i in 0..q {
        identity[i * q + i] = 1.0;
    }
    let mut elements: Vec<Vec<f64>> = vec![identity.clone()];
    let mut depth = vec![0usize];
    let mut lookup: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    lookup.entry(key(&identity)).or_default().push(0);
    let mut neighbor: Vec<Vec<usize>> = vec![vec![usize::MAX; q]];
    let mut queue = VecDeque::from([0usize]);

    while let Some(i) = queue.pop_front() {
        for a in 0..q {
            if neighbor[i][a] != usize::MAX {
                continue;
            }
            // only row a of g changes under left multiplication by σ_a
            let mut h = elements[i].clone();
            for col in 0..q {
                let s: f64 = (0..q).map(|b| form[a * q + b] * elements[i][b * q + col]).sum();
                h[a * q + col] -= 2.0 * s;
            }
            let k = key(&h);
            let found = lookup.get(&k).and_then(|cands| {
                cands.iter().copied().find(|&c| {
                    elements[c]
                        .iter()
                        .zip(&h)
                        .all(|(x, y)| (x - y).abs() < COXETER_DEDUP_TOL)
                })
            });
            let j = match found {
                Some(j) => j,
                None => {
                    if elements.len() >= max_elements {
                        return Err(Error::GroupTooLarge(max_elements));
                    }
                    let j = elements.len();
                    elements.push(h);
                    depth.push(depth[i] + 1);
                    neighbor.push(vec![usize::MAX; q]);
                    lookup.entry(k).or_default().push(j);
                    queue.push_back(j);
                    j
                }
            };
            neighbor[i][a] = j;
            neighbor[j][a] = i;
        }
    }

    let parity = depth.iter().map(|&d| Parity::from_bit(d)).collect();
    let mut edges = Vec::new();
    for a in 0..q {
        for (i, nb) in neighbor.iter().enumerate() {
            if i < nb[a] {
                edges.push(Edge::new(i, nb[a], a));
            }
        }
    }
    PsiGraph::validated(q, parity, edges)
}
