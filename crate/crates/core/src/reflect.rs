//! Reflecting cuts and edge-convexity certificates.
//!
//! A reflecting cut is an involutive, label-preserving automorphism `k` that
//! flips every vertex parity, such that deleting the edges `{v, k(v)}` leaves
//! exactly two components exchanged by `k`. The component holding vertex 0
//! is called the right side throughout this module.
//!
//! A [`ConvexityCertificate`] stores, per cut, a real symmetric matrix in
//! positive form `P_{e,f} = M_{e,k(f)}` indexed by right-side items (label
//! edges, or vertices for vertex certificates) in ascending id order.

use std::collections::{BTreeSet, HashMap};
use std::ops::ControlFlow;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{self, PsiGraph};
use crate::linalg;

/// Cut enumeration refuses graphs with more vertices than this by default.
pub const DEFAULT_SEARCH_CAP: usize = 64;

/// Smallest eigenvalue accepted for a certificate matrix.
pub const PSD_TOL: f64 = 1e-12;

/// Largest accepted deviation from one in the pair sums.
pub const SUM_TOL: f64 = 1e-12;

/// How an isomorphism treats vertex parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityMode {
    Preserve,
    Flip,
    Ignore,
}

/// Backtracking search for label-preserving isomorphisms `a → b`.
///
/// Vertices of `a` are assigned in breadth-first order. A vertex reached
/// through an already-mapped neighbour only tries the images reachable
/// through the same label, and every candidate must reproduce the labeled
/// edge multiplicities to all mapped vertices. The visitor receives each
/// complete map and may stop the search.
pub fn for_each_isomorphism<F>(a: &PsiGraph, b: &PsiGraph, mode: ParityMode, mut visit: F)
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let n = a.vertex_count();
    if n != b.vertex_count()
        || a.edges().len() != b.edges().len()
        || a.party_count() != b.party_count()
        || n == 0
    {
        return;
    }
    let order = search_order(a);
    let sig_a: Vec<Vec<usize>> = (0..n).map(|v| signature(a, v)).collect();
    let sig_b: Vec<Vec<usize>> = (0..n).map(|v| signature(b, v)).collect();
    let mut state = Search {
        a,
        b,
        mode,
        order,
        sig_a,
        sig_b,
        map: vec![usize::MAX; n],
        inverse: vec![usize::MAX; n],
    };
    let _ = state.extend(0, &mut visit);
}

pub fn find_isomorphism(a: &PsiGraph, b: &PsiGraph, mode: ParityMode) -> Option<Vec<usize>> {
    let mut found = None;
    for_each_isomorphism(a, b, mode, |m| {
        found = Some(m.to_vec());
        ControlFlow::Break(())
    });
    found
}

/// Label-preserving isomorphism ignoring parity, used to compare graphs
/// "as edge-labeled graphs".
pub fn are_isomorphic(a: &PsiGraph, b: &PsiGraph) -> bool {
    find_isomorphism(a, b, ParityMode::Ignore).is_some()
}

/// True when some automorphism swaps kets and bras, which makes the invariant real.
pub fn is_parity_symmetric(g: &PsiGraph) -> bool {
    find_isomorphism(g, g, ParityMode::Flip).is_some()
}

fn search_order(g: &PsiGraph) -> Vec<(usize, Option<(usize, usize)>)> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        order.push((start, None));
        let mut head = order.len() - 1;
        while head < order.len() {
            let x = order[head].0;
            head += 1;
            let mut incident: Vec<usize> = g.incident(x).to_vec();
            incident.sort_by_key(|&i| g.edge(i).label);
            for idx in incident {
                let e = g.edge(idx);
                if let Some(y) = e.other(x) {
                    if !seen[y] {
                        seen[y] = true;
                        order.push((y, Some((x, e.label))));
                    }
                }
            }
        }
    }
    order
}

fn signature(g: &PsiGraph, v: usize) -> Vec<usize> {
    let mut hist = vec![0; g.party_count()];
    for &idx in g.incident(v) {
        let l = g.edge(idx).label;
        if l < hist.len() {
            hist[l] += 1;
        }
    }
    hist
}

struct Search<'a> {
    a: &'a PsiGraph,
    b: &'a PsiGraph,
    mode: ParityMode,
    order: Vec<(usize, Option<(usize, usize)>)>,
    sig_a: Vec<Vec<usize>>,
    sig_b: Vec<Vec<usize>>,
    map: Vec<usize>,
    inverse: Vec<usize>,
}

impl Search<'_> {
    fn extend<F>(&mut self, depth: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if depth == self.order.len() {
            return visit(&self.map);
        }
        let (v, via) = self.order[depth];
        let candidates: Vec<usize> = match via {
            Some((p, label)) => self
                .b
                .incident(self.map[p])
                .iter()
                .filter_map(|&i| {
                    let e = self.b.edge(i);
                    if e.label == label {
                        e.other(self.map[p])
                    } else {
                        None
                    }
                })
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
            None => (0..self.b.vertex_count()).collect(),
        };
        for w in candidates {
            if self.inverse[w] != usize::MAX || !self.compatible(v, w) {
                continue;
            }
            self.map[v] = w;
            self.inverse[w] = v;
            let flow = self.extend(depth + 1, visit);
            self.map[v] = usize::MAX;
            self.inverse[w] = usize::MAX;
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn compatible(&self, v: usize, w: usize) -> bool {
        let parity_ok = match self.mode {
            ParityMode::Preserve => self.a.parity(v) == self.b.parity(w),
            ParityMode::Flip => self.a.parity(v) != self.b.parity(w),
            ParityMode::Ignore => true,
        };
        if !parity_ok || self.sig_a[v] != self.sig_b[w] {
            return false;
        }
        let a_ok = self.a.incident(v).iter().all(|&i| {
            let e = self.a.edge(i);
            let x = e.other(v).unwrap_or(v);
            let fx = if x == v { w } else { self.map[x] };
            fx == usize::MAX
                || self.a.multiplicity(v, x, e.label) == self.b.multiplicity(w, fx, e.label)
        });
        a_ok && self.b.incident(w).iter().all(|&i| {
            let e = self.b.edge(i);
            let y = e.other(w).unwrap_or(w);
            let gy = if y == w { v } else { self.inverse[y] };
            gy == usize::MAX
                || self.a.multiplicity(v, gy, e.label) == self.b.multiplicity(w, y, e.label)
        })
    }
}

/// Which side of a cut an item lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Right,
    Left,
}

/// A reflecting cut with its derived side assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectingCut {
    involution: Vec<usize>,
    cut_edges: Vec<usize>,
    right: Vec<bool>,
}

impl ReflectingCut {
    /// Checks every reflecting-cut invariant of `involution` on `g` and
    /// derives the cut edges and sides.
    pub fn from_involution(g: &PsiGraph, involution: Vec<usize>) -> Result<Self> {
        let n = g.vertex_count();
        let fail = |msg: String| Err(Error::CertificateMismatch(msg));
        if involution.len() != n {
            return fail(format!("involution has {} entries for {n} vertices", involution.len()));
        }
        for v in 0..n {
            let k = involution[v];
            if k >= n || involution[k] != v {
                return fail(format!("map is not an involution at vertex {v}"));
            }
            if g.parity(k) == g.parity(v) {
                return fail(format!("vertex {v} keeps its parity"));
            }
        }
        for (idx, e) in g.edges().iter().enumerate() {
            let (ku, kv) = (involution[e.u], involution[e.v]);
            if g.multiplicity(ku, kv, e.label) != g.multiplicity(e.u, e.v, e.label) {
                return fail(format!("edge {idx} has no labeled image"));
            }
        }
        let cut_edges: Vec<usize> = (0..g.edges().len())
            .filter(|&i| {
                let e = g.edge(i);
                involution[e.u] == e.v
            })
            .collect();
        let cut_set: BTreeSet<usize> = cut_edges.iter().copied().collect();
        let (comp, count) = g.components_without(|i| cut_set.contains(&i));
        if count != 2 {
            return fail(format!("removing the cut edges leaves {count} components"));
        }
        if (0..n).any(|v| comp[involution[v]] == comp[v]) {
            return fail("involution does not exchange the two sides".into());
        }
        let right = comp.iter().map(|&c| c == comp[0]).collect();
        Ok(Self {
            involution,
            cut_edges,
            right,
        })
    }

    /// Rebuilds a cut and checks that the supplied cut-edge list matches.
    pub fn from_parts(g: &PsiGraph, involution: Vec<usize>, cut_edges: &[usize]) -> Result<Self> {
        let cut = Self::from_involution(g, involution)?;
        let mut given = cut_edges.to_vec();
        given.sort_unstable();
        if given != cut.cut_edges {
            return Err(Error::CertificateMismatch(format!(
                "cut edges {given:?} differ from the involution's {:?}",
                cut.cut_edges
            )));
        }
        Ok(cut)
    }

    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    pub fn image(&self, v: usize) -> usize {
        self.involution[v]
    }

    /// Sorted indices of the edges joining `v` and `k(v)`.
    pub fn cut_edges(&self) -> &[usize] {
        &self.cut_edges
    }

    pub fn vertex_side(&self, v: usize) -> Side {
        if self.right[v] {
            Side::Right
        } else {
            Side::Left
        }
    }

    /// Side of an edge, `None` for cut edges.
    pub fn edge_side(&self, g: &PsiGraph, idx: usize) -> Option<Side> {
        let e = g.edge(idx);
        if self.right[e.u] != self.right[e.v] {
            None
        } else {
            Some(self.vertex_side(e.u))
        }
    }

    pub fn separates_vertices(&self, u: usize, v: usize) -> bool {
        self.right[u] != self.right[v]
    }

    pub fn separates_edges(&self, g: &PsiGraph, e: usize, f: usize) -> bool {
        matches!(
            (self.edge_side(g, e), self.edge_side(g, f)),
            (Some(a), Some(b)) if a != b
        )
    }

    /// Index of the image of edge `idx` under the involution.
    pub fn edge_image(&self, g: &PsiGraph, idx: usize) -> usize {
        let e = g.edge(idx);
        let (ku, kv) = (self.involution[e.u], self.involution[e.v]);
        g.incident(ku)
            .iter()
            .copied()
            .find(|&j| {
                let f = g.edge(j);
                f.label == e.label && f.other(ku) == Some(kv)
            })
            .expect("involution preserves labeled edges")
    }
}

/// All reflecting cuts of `g`, ordered lexicographically by cut-edge set.
pub fn enumerate_reflecting_cuts(g: &PsiGraph) -> Result<Vec<ReflectingCut>> {
    enumerate_reflecting_cuts_capped(g, DEFAULT_SEARCH_CAP)
}

pub fn enumerate_reflecting_cuts_capped(g: &PsiGraph, cap: usize) -> Result<Vec<ReflectingCut>> {
    if g.vertex_count() > cap {
        return Err(Error::GraphTooLarge {
            vertices: g.vertex_count(),
            cap,
        });
    }
    g.ensure_valid()?;
    let mut cuts: Vec<ReflectingCut> = Vec::new();
    for_each_isomorphism(g, g, ParityMode::Flip, |map| {
        if let Ok(cut) = ReflectingCut::from_involution(g, map.to_vec()) {
            if !cuts.iter().any(|c| c.cut_edges == cut.cut_edges) {
                cuts.push(cut);
            }
        }
        ControlFlow::Continue(())
    });
    cuts.sort_by(|a, b| a.cut_edges.cmp(&b.cut_edges));
    Ok(cuts)
}

/// Outcome of a reflecting-condition check, with a witness on failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub holds: bool,
    /// An unseparated pair (edge indices or vertex ids).
    pub witness: Option<(usize, usize)>,
}

/// Every pair of distinct `label` edges is separated by some cut.
pub fn is_edge_reflecting(g: &PsiGraph, label: usize) -> Result<Decision> {
    let cuts = enumerate_reflecting_cuts(g)?;
    Ok(edge_reflecting_with(g, label, &cuts))
}

pub fn edge_reflecting_with(g: &PsiGraph, label: usize, cuts: &[ReflectingCut]) -> Decision {
    let edges = g.label_edges(label);
    for (i, &e) in edges.iter().enumerate() {
        for &f in &edges[i + 1..] {
            if !cuts.iter().any(|c| c.separates_edges(g, e, f)) {
                return Decision {
                    holds: false,
                    witness: Some((e, f)),
                };
            }
        }
    }
    Decision {
        holds: true,
        witness: None,
    }
}

/// Every pair of distinct vertices is separated by some cut.
pub fn is_vertex_reflecting(g: &PsiGraph) -> Result<Decision> {
    let cuts = enumerate_reflecting_cuts(g)?;
    Ok(vertex_reflecting_with(g, &cuts))
}

pub fn vertex_reflecting_with(g: &PsiGraph, cuts: &[ReflectingCut]) -> Decision {
    let n = g.vertex_count();
    for u in 0..n {
        for v in u + 1..n {
            if !cuts.iter().any(|c| c.separates_vertices(u, v)) {
                return Decision {
                    holds: false,
                    witness: Some((u, v)),
                };
            }
        }
    }
    Decision {
        holds: true,
        witness: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceViolation {
    pub u: usize,
    pub v: usize,
    pub distance: usize,
    pub separating_cuts: usize,
    /// Separating cuts that do not cross the reference shortest path exactly once.
    pub multi_crossing_cuts: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceReport {
    pub cut_count: usize,
    pub pairs_checked: usize,
    pub violations: Vec<DistanceViolation>,
}

impl DistanceReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every vertex pair, compares the number of separating cuts with the
/// graph distance, and checks that each separating cut crosses a fixed
/// shortest path exactly once.
pub fn cut_count_equals_distance(g: &PsiGraph) -> Result<DistanceReport> {
    let cuts = enumerate_reflecting_cuts(g)?;
    Ok(cut_count_with(g, &cuts))
}

pub fn cut_count_with(g: &PsiGraph, cuts: &[ReflectingCut]) -> DistanceReport {
    let n = g.vertex_count();
    let mut violations = Vec::new();
    let mut pairs = 0;
    for u in 0..n {
        let dist = g.distances_from(u);
        for v in u + 1..n {
            pairs += 1;
            let separating: Vec<&ReflectingCut> =
                cuts.iter().filter(|c| c.separates_vertices(u, v)).collect();
            let path = g.shortest_path(u, v).unwrap_or_default();
            let multi = separating
                .iter()
                .filter(|c| {
                    path.windows(2)
                        .filter(|w| c.separates_vertices(w[0], w[1]))
                        .count()
                        != 1
                })
                .count();
            if separating.len() != dist[v] || multi > 0 {
                violations.push(DistanceViolation {
                    u,
                    v,
                    distance: dist[v],
                    separating_cuts: separating.len(),
                    multi_crossing_cuts: multi,
                });
            }
        }
    }
    DistanceReport {
        cut_count: cuts.len(),
        pairs_checked: pairs,
        violations,
    }
}

/// What a certificate's matrices are indexed by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CertificateItems {
    /// Edges carrying this label.
    Edges(usize),
    /// Vertices.
    Vertices,
}

impl CertificateItems {
    fn all(self, g: &PsiGraph) -> Vec<usize> {
        match self {
            CertificateItems::Edges(l) => g.label_edges(l),
            CertificateItems::Vertices => (0..g.vertex_count()).collect(),
        }
    }

    fn side(self, g: &PsiGraph, cut: &ReflectingCut, item: usize) -> Option<Side> {
        match self {
            CertificateItems::Edges(_) => cut.edge_side(g, item),
            CertificateItems::Vertices => Some(cut.vertex_side(item)),
        }
    }

    fn image(self, g: &PsiGraph, cut: &ReflectingCut, item: usize) -> usize {
        match self {
            CertificateItems::Edges(_) => cut.edge_image(g, item),
            CertificateItems::Vertices => cut.image(item),
        }
    }

    /// Right-side items of `cut`, ascending.
    pub fn right_items(self, g: &PsiGraph, cut: &ReflectingCut) -> Vec<usize> {
        self.all(g)
            .into_iter()
            .filter(|&x| self.side(g, cut, x) == Some(Side::Right))
            .collect()
    }
}

/// One cut of a certificate with its positive-form matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedCut {
    pub cut: ReflectingCut,
    pub matrix: DMatrix<f64>,
}

/// Per-cut positive matrices witnessing convexity for one label (or, for
/// vertex certificates, the vertex analogue).
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexityCertificate {
    pub items: CertificateItems,
    pub cuts: Vec<CertifiedCut>,
}

impl ConvexityCertificate {
    pub fn new(items: CertificateItems) -> Self {
        Self {
            items,
            cuts: Vec::new(),
        }
    }

    pub fn label(&self) -> Option<usize> {
        match self.items {
            CertificateItems::Edges(l) => Some(l),
            CertificateItems::Vertices => None,
        }
    }

    /// Adds `matrix` to the cut, summing with an existing entry for the same involution.
    pub fn add(&mut self, cut: ReflectingCut, matrix: DMatrix<f64>) {
        if let Some(existing) = self
            .cuts
            .iter_mut()
            .find(|c| c.cut.involution == cut.involution)
        {
            existing.matrix += matrix;
        } else {
            self.cuts.push(CertifiedCut { cut, matrix });
        }
    }

    /// `M^{(k)}_{r,l}` for a right-side item `r` and left-side item `l`.
    pub fn m_entry(&self, g: &PsiGraph, cut_index: usize, r: usize, l: usize) -> Option<f64> {
        let cc = &self.cuts[cut_index];
        let right = self.items.right_items(g, &cc.cut);
        let i = right.iter().position(|&x| x == r)?;
        let kl = self.items.image(g, &cc.cut, l);
        let j = right.iter().position(|&x| x == kl)?;
        Some(cc.matrix[(i, j)])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    /// Smallest eigenvalue of each cut matrix.
    pub psd_margins: Vec<f64>,
    pub min_psd_margin: f64,
    pub max_asymmetry: f64,
    pub worst_sum_residual: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub passed: bool,
}

/// Checks positivity of every matrix and the sum-to-one condition over
/// all unordered pairs of distinct items.
pub fn verify_certificate(g: &PsiGraph, cert: &ConvexityCertificate) -> Result<VerificationReport> {
    let items = cert.items;
    let mut rights = Vec::with_capacity(cert.cuts.len());
    for (k, cc) in cert.cuts.iter().enumerate() {
        ReflectingCut::from_involution(g, cc.cut.involution.clone())?;
        let right = items.right_items(g, &cc.cut);
        if cc.matrix.nrows() != right.len() || cc.matrix.ncols() != right.len() {
            return Err(Error::CertificateMismatch(format!(
                "cut {k}: matrix is {}x{} but {} right-side items",
                cc.matrix.nrows(),
                cc.matrix.ncols(),
                right.len()
            )));
        }
        let pos: HashMap<usize, usize> = right.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        rights.push(pos);
    }

    let mut psd_margins = Vec::with_capacity(cert.cuts.len());
    let mut max_asymmetry: f64 = 0.0;
    for cc in &cert.cuts {
        let m = &cc.matrix;
        let asym = (m - m.transpose()).abs().max();
        max_asymmetry = max_asymmetry.max(asym);
        psd_margins.push(linalg::min_symmetric_eigenvalue(m));
    }
    let min_psd_margin = psd_margins.iter().copied().fold(f64::INFINITY, f64::min);

    let all = items.all(g);
    let mut worst = 0.0;
    let mut worst_pair = None;
    for (i, &x) in all.iter().enumerate() {
        for &y in &all[i + 1..] {
            let mut sum = 0.0;
            for (k, cc) in cert.cuts.iter().enumerate() {
                let (sx, sy) = (items.side(g, &cc.cut, x), items.side(g, &cc.cut, y));
                let (r, l) = match (sx, sy) {
                    (Some(Side::Right), Some(Side::Left)) => (x, y),
                    (Some(Side::Left), Some(Side::Right)) => (y, x),
                    _ => continue,
                };
                let kl = items.image(g, &cc.cut, l);
                sum += cc.matrix[(rights[k][&r], rights[k][&kl])];
            }
            let residual = (sum - 1.0).abs();
            if residual > worst {
                worst = residual;
                worst_pair = Some((x, y));
            }
        }
    }
    let min_margin = if cert.cuts.is_empty() { 0.0 } else { min_psd_margin };
    Ok(VerificationReport {
        passed: min_margin >= -PSD_TOL && worst <= SUM_TOL && max_asymmetry <= SUM_TOL,
        psd_margins,
        min_psd_margin: min_margin,
        max_asymmetry,
        worst_sum_residual: worst,
        worst_pair,
    })
}

/// Identity matrix on every enumerated cut that splits `label` edges.
pub fn identity_certificate(g: &PsiGraph, label: usize, cuts: &[ReflectingCut]) -> ConvexityCertificate {
    let items = CertificateItems::Edges(label);
    let mut cert = ConvexityCertificate::new(items);
    for cut in cuts {
        let r = items.right_items(g, cut).len();
        if r > 0 {
            cert.add(cut.clone(), DMatrix::identity(r, r));
        }
    }
    cert
}

/// The cycle `C_n` together with its identity certificate for `label`.
pub fn certificate_for_cycle(n: usize, label: usize) -> Result<(PsiGraph, ConvexityCertificate)> {
    if label > 1 {
        return Err(Error::InvalidArgument(format!("cycle has labels 0 and 1, got {label}")));
    }
    let g = graph::build_cycle(n, false)?;
    let cuts = enumerate_reflecting_cuts(&g)?;
    let cert = identity_certificate(&g, label, &cuts);
    Ok((g, cert))
}

/// Vertex certificate built from an edge certificate of `g`.
///
/// Pairs not joined by a certificate-label edge reuse the edge matrices
/// through `u ↦ e_u`; each pair joined by such an edge gets a single unit
/// diagonal entry on the cut whose cut edges contain it.
pub fn vertex_certificate(g: &PsiGraph, edge_cert: &ConvexityCertificate) -> Result<ConvexityCertificate> {
    let label = edge_cert
        .label()
        .ok_or_else(|| Error::InvalidArgument("expected an edge certificate".into()))?;
    let all_cuts = enumerate_reflecting_cuts(g)?;
    let edge_at = |u: usize| -> Result<usize> {
        g.neighbor(u, label)
            .map(|(idx, _)| idx)
            .ok_or_else(|| Error::InvalidGraph(format!("vertex {u} lacks a label-{label} edge")))
    };

    let mut out = ConvexityCertificate::new(CertificateItems::Vertices);
    for cc in &edge_cert.cuts {
        let right_edges = edge_cert.items.right_items(g, &cc.cut);
        let right_vertices = CertificateItems::Vertices.right_items(g, &cc.cut);
        let pos: Vec<Option<usize>> = right_vertices
            .iter()
            .map(|&u| edge_at(u).map(|e| right_edges.iter().position(|&x| x == e)))
            .collect::<Result<_>>()?;
        let r = right_vertices.len();
        let m = DMatrix::from_fn(r, r, |i, j| match (pos[i], pos[j]) {
            (Some(a), Some(b)) => cc.matrix[(a, b)],
            _ => 0.0,
        });
        out.add(cc.cut.clone(), m);
    }
    for e in g.label_edges(label) {
        let cut = all_cuts
            .iter()
            .find(|c| c.cut_edges().contains(&e))
            .ok_or_else(|| {
                Error::CertificateMismatch(format!("no reflecting cut crosses edge {e}"))
            })?;
        let edge = g.edge(e);
        let x = if cut.vertex_side(edge.u) == Side::Right { edge.u } else { edge.v };
        let right_vertices = CertificateItems::Vertices.right_items(g, cut);
        let i = right_vertices.iter().position(|&v| v == x).expect("x is on the right");
        let mut m = DMatrix::zeros(right_vertices.len(), right_vertices.len());
        m[(i, i)] = 1.0;
        out.add(cut.clone(), m);
    }
    Ok(out)
}

/// Which factor of a product carries the certified label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Factor {
    First,
    Second,
}

/// Certificate for the label of `cert1` in `g1 □ g2`.
///
/// Each cut `k` of `cert1` lifts to `k □ g2` with `P_{(e,u),(f,v)} =
/// P_{e,f}`; each cut `k_V` of the vertex certificate of `g2` lifts to
/// `g1 □ k_V` with `P_{(e,u),(f,v)} = δ_{e,f} P^V_{u,v}`.
pub fn certificate_for_product(
    g1: &PsiGraph,
    cert1: &ConvexityCertificate,
    g2: &PsiGraph,
    vertex_cert2: Option<&ConvexityCertificate>,
) -> Result<ConvexityCertificate> {
    product_certificate(g1, g2, cert1, vertex_cert2, Factor::First)
}

/// Certificate for the label of `cert2` (shifted by `g1.party_count()`) in `g1 □ g2`.
pub fn certificate_for_product_right(
    g1: &PsiGraph,
    vertex_cert1: Option<&ConvexityCertificate>,
    g2: &PsiGraph,
    cert2: &ConvexityCertificate,
) -> Result<ConvexityCertificate> {
    product_certificate(g1, g2, cert2, vertex_cert1, Factor::Second)
}

fn product_certificate(
    g1: &PsiGraph,
    g2: &PsiGraph,
    edge_cert: &ConvexityCertificate,
    vertex_cert: Option<&ConvexityCertificate>,
    factor: Factor,
) -> Result<ConvexityCertificate> {
    let label = edge_cert
        .label()
        .ok_or_else(|| Error::InvalidArgument("expected an edge certificate".into()))?;
    let (edge_graph, other) = match factor {
        Factor::First => (g1, g2),
        Factor::Second => (g2, g1),
    };
    if let Some(vc) = vertex_cert {
        if vc.items != CertificateItems::Vertices {
            return Err(Error::InvalidArgument("expected a vertex certificate".into()));
        }
    } else if other.vertex_count() > 1 {
        return Err(Error::MissingVertexCertificate(other.vertex_count()));
    }

    let product = graph::cartesian_product(g1, g2);
    let (n1, n2) = (g1.vertex_count(), g2.vertex_count());
    let offset = g1.edges().len() * n2;
    let product_label = match factor {
        Factor::First => label,
        Factor::Second => label + g1.party_count(),
    };
    let items = CertificateItems::Edges(product_label);

    // product edge -> (edge of the labeled factor, vertex of the other factor)
    let decode = |idx: usize| -> (usize, usize) {
        match factor {
            Factor::First => (idx / n2, idx % n2),
            Factor::Second => ((idx - offset) / n1, (idx - offset) % n1),
        }
    };
    let lift = |map_edge_factor: &dyn Fn(usize) -> usize, map_other: &dyn Fn(usize) -> usize| {
        let mut inv = vec![0; n1 * n2];
        for a in 0..n1 {
            for b in 0..n2 {
                inv[a * n2 + b] = match factor {
                    Factor::First => map_edge_factor(a) * n2 + map_other(b),
                    Factor::Second => map_other(a) * n2 + map_edge_factor(b),
                };
            }
        }
        ReflectingCut::from_involution(&product, inv)
    };

    let mut out = ConvexityCertificate::new(items);
    for cc in &edge_cert.cuts {
        let cut = lift(&|a| cc.cut.image(a), &|b| b)?;
        let factor_right = edge_cert.items.right_items(edge_graph, &cc.cut);
        let right = items.right_items(&product, &cut);
        let pos: Vec<usize> = right
            .iter()
            .map(|&idx| {
                let (e, _) = decode(idx);
                factor_right.iter().position(|&x| x == e).expect("lifted side matches")
            })
            .collect();
        let m = DMatrix::from_fn(right.len(), right.len(), |i, j| cc.matrix[(pos[i], pos[j])]);
        out.add(cut, m);
    }
    if let Some(vc) = vertex_cert {
        for cc in &vc.cuts {
            let cut = lift(&|a| a, &|b| cc.cut.image(b))?;
            let factor_right = CertificateItems::Vertices.right_items(other, &cc.cut);
            let right = items.right_items(&product, &cut);
            let decoded: Vec<(usize, usize)> = right
                .iter()
                .map(|&idx| {
                    let (e, u) = decode(idx);
                    let p = factor_right.iter().position(|&x| x == u).expect("lifted side matches");
                    (e, p)
                })
                .collect();
            let m = DMatrix::from_fn(right.len(), right.len(), |i, j| {
                let ((e, a), (f, b)) = (decoded[i], decoded[j]);
                if e == f {
                    cc.matrix[(a, b)]
                } else {
                    0.0
                }
            });
            out.add(cut, m);
        }
    }
    Ok(out)
}

/// Result of looking for a constructive certificate.
#[derive(Clone, Debug, PartialEq)]
pub enum CertificateStatus {
    Verified(ConvexityCertificate, VerificationReport),
    /// Edge-reflecting, but no constructive certificate is known.
    Unknown,
    NotEdgeReflecting(Decision),
}

/// Tries the identity certificate on the enumerated cuts; reports
/// `Unknown` for edge-reflecting graphs where it fails.
pub fn constructive_certificate(g: &PsiGraph, label: usize) -> Result<CertificateStatus> {
    let cuts = enumerate_reflecting_cuts(g)?;
    let decision = edge_reflecting_with(g, label, &cuts);
    if !decision.holds {
        return Ok(CertificateStatus::NotEdgeReflecting(decision));
    }
    let cert = identity_certificate(g, label, &cuts);
    let report = verify_certificate(g, &cert)?;
    if report.passed {
        Ok(CertificateStatus::Verified(cert, report))
    } else {
        Ok(CertificateStatus::Unknown)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cycle, build_hypercube, Edge, Parity};

    #[test]
    fn cycle_three_has_three_cuts() {
        let g = build_cycle(3, false).unwrap();
        assert_eq!(enumerate_reflecting_cuts(&g).unwrap().len(), 3);
    }

    #[test]
    fn cube_has_coordinate_cuts_only() {
        let g = build_hypercube(3).unwrap();
        let cuts = enumerate_reflecting_cuts(&g).unwrap();
        assert_eq!(cuts.len(), 3);
        for cut in &cuts {
            let labels: BTreeSet<usize> = cut.cut_edges().iter().map(|&i| g.edge(i).label).collect();
            assert_eq!(labels.len(), 1);
            assert_eq!(cut.cut_edges().len(), 4);
        }
    }

    #[test]
    fn k2_is_vertex_reflecting() {
        let g = build_hypercube(1).unwrap();
        assert!(is_vertex_reflecting(&g).unwrap().holds);
        assert!(is_edge_reflecting(&g, 0).unwrap().holds);
    }

    #[test]
    fn search_cap_is_enforced() {
        let g = build_hypercube(7).unwrap();
        assert!(matches!(
            enumerate_reflecting_cuts(&g),
            Err(Error::GraphTooLarge { vertices: 128, cap: 64 })
        ));
    }

    #[test]
    fn rejects_non_involution() {
        let g = build_cycle(3, false).unwrap();
        // rotation by two steps is an automorphism but not an involution
        let rot: Vec<usize> = (0..6).map(|v| (v + 2) % 6).collect();
        assert!(ReflectingCut::from_involution(&g, rot).is_err());
    }

    #[test]
    fn rejects_wrong_cut_edges() {
        let g = build_cycle(2, false).unwrap();
        let cut = enumerate_reflecting_cuts(&g).unwrap().remove(0);
        let inv = cut.involution().to_vec();
        assert!(ReflectingCut::from_parts(&g, inv.clone(), cut.cut_edges()).is_ok());
        assert!(ReflectingCut::from_parts(&g, inv, &[0]).is_err());
    }

    #[test]
    fn parity_symmetry() {
        assert!(is_parity_symmetric(&build_cycle(4, false).unwrap()));
        assert!(is_parity_symmetric(&build_hypercube(3).unwrap()));
    }

    #[test]
    fn isomorphism_respects_labels() {
        let a = build_cycle(2, false).unwrap();
        let b = build_hypercube(2).unwrap();
        assert!(are_isomorphic(&a, &b));
        let mut edges = a.edges().to_vec();
        // swap which label sits on which pair: still a square with alternating labels
        for e in &mut edges {
            e.label = 1 - e.label;
        }
        let swapped = PsiGraph::new(2, a.parities().to_vec(), edges);
        assert!(are_isomorphic(&a, &swapped));
        let c3 = build_cycle(3, false).unwrap();
        assert!(!are_isomorphic(&a, &c3));
    }

    #[test]
    fn single_label_edge_is_vacuously_reflecting() {
        let g = PsiGraph::new(
            2,
            vec![Parity::Ket, Parity::Bra],
            vec![Edge::new(0, 1, 0), Edge::new(0, 1, 1)],
        );
        let d = is_edge_reflecting(&g, 0).unwrap();
        assert!(d.holds && d.witness.is_none());
    }

    #[test]
    fn perturbed_certificate_fails_sum() {
        let (g, mut cert) = certificate_for_cycle(3, 0).unwrap();
        assert!(verify_certificate(&g, &cert).unwrap().passed);
        cert.cuts[0].matrix[(0, 0)] += 0.1;
        let report = verify_certificate(&g, &cert).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn mismatched_matrix_size_is_an_error() {
        let (g, mut cert) = certificate_for_cycle(3, 0).unwrap();
        cert.cuts[0].matrix = DMatrix::identity(3, 3);
        assert!(matches!(verify_certificate(&g, &cert), Err(Error::CertificateMismatch(_))));
    }

    #[test]
    fn product_without_vertex_certificate_is_rejected() {
        let (g1, c1) = certificate_for_cycle(2, 0).unwrap();
        let g2 = build_hypercube(1).unwrap();
        assert!(matches!(
            certificate_for_product(&g1, &c1, &g2, None),
            Err(Error::MissingVertexCertificate(2))
        ));
    }
}
