//! Pure-state entanglement monotones and related utilities.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, PsiGraph};
use crate::linalg::{self, CMatrix, C64};
use crate::reflect::{self, CertificateStatus};
use crate::tensor::{self, DensityMatrix, InvariantEvaluator, PureState};

/// Slack allowed above `Z = 1` before a graph value is treated as an error.
pub const Z_CLAMP_TOL: f64 = 1e-9;

/// Sweeps stop once the objective improves by less than this.
pub const SWEEP_TOL: f64 = 1e-10;

pub const MAX_SWEEPS: usize = 500;

fn require_normalized(state: &PureState) -> Result<()> {
    if state.is_normalized() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "monotones need a normalized state (squared norm {})",
            state.norm_sqr()
        )))
    }
}

fn check_side(state: &PureState, side: &[usize]) -> Result<()> {
    if side.is_empty() || side.len() >= state.party_count() {
        return Err(Error::InvalidArgument(format!(
            "bipartition side {side:?} must be a proper non-empty subset"
        )));
    }
    Ok(())
}

/// Eigenvalues of the reduced density matrix on `side`, descending and clamped at zero.
pub fn schmidt_spectrum(state: &PureState, side: &[usize]) -> Result<Vec<f64>> {
    check_side(state, side)?;
    let mut keep = side.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let rho = tensor::reduced_density(state, &keep)?;
    Ok(rho.eigenvalues().into_iter().map(|x| x.max(0.0)).collect())
}

/// `ν̃_k = 1 − Σ_{i≤k} λ_i` for `k = 1..=len`.
pub fn vidal_tail(spectrum: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    spectrum
        .iter()
        .map(|l| {
            acc += l;
            (1.0 - acc).max(0.0)
        })
        .collect()
}

/// Bipartite monotone `1 − Σ_{i≤k} λ_i` for the cut `side | rest`.
pub fn vidal_monotone(state: &PureState, side: &[usize], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    require_normalized(state)?;
    let tail = vidal_tail(&schmidt_spectrum(state, side)?);
    Ok(tail.get(k - 1).copied().unwrap_or(0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KyFanReport {
    pub k: usize,
    pub top_k_sum: f64,
    pub samples: usize,
    pub max_sampled: f64,
    /// Largest `Tr(Pρ) − top_k_sum` seen; at most `1e-12` when consistent.
    pub worst_excess: f64,
}

/// Sum of the top `k` eigenvalues, checked against random rank-`k` projectors.
pub fn kyfan_crosscheck(rho: &DensityMatrix, k: usize, samples: usize, seed: u64) -> Result<KyFanReport> {
    let d = rho.matrix().nrows();
    if k == 0 || k > d {
        return Err(Error::InvalidArgument(format!("rank {k} outside 1..={d}")));
    }
    let top: f64 = rho.eigenvalues().iter().take(k).sum();
    let mut rng = linalg::rng(seed);
    let mut max_sampled = f64::NEG_INFINITY;
    for _ in 0..samples {
        let v = linalg::haar_isometry(&mut rng, d, k);
        let t = (v.adjoint() * rho.matrix() * &v).trace().re;
        max_sampled = max_sampled.max(t);
    }
    Ok(KyFanReport {
        k,
        top_k_sum: top,
        samples,
        max_sampled,
        worst_excess: if samples == 0 { f64::NEG_INFINITY } else { max_sampled - top },
    })
}

/// Rational exponent applied to `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exponent {
    pub num: i64,
    pub den: u64,
}

impl Exponent {
    pub fn reciprocal(n: usize) -> Self {
        Self { num: 1, den: n as u64 }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Where a graph monotone's graph comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    Cycle { n: usize },
    CycleProduct { ns: Vec<usize> },
    Hypercube { q: usize },
    /// A literal graph. Unless `trusted`, every label must admit a
    /// verified constructive certificate.
    Explicit {
        graph: PsiGraph,
        #[serde(default)]
        trusted: bool,
    },
}

impl GraphSource {
    /// The graph and whether its convexity is known by construction.
    pub fn build(&self) -> Result<(PsiGraph, bool)> {
        Ok(match self {
            GraphSource::Cycle { n } => (graph::build_cycle(*n, false)?, true),
            GraphSource::CycleProduct { ns } => (graph::build_cycle_product(ns)?, true),
            GraphSource::Hypercube { q } => (graph::build_hypercube(*q)?, true),
            GraphSource::Explicit { graph, trusted } => (graph.clone(), *trusted),
        })
    }
}

/// Serializable description of a monotone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneSpec {
    /// `1 − Σ_{i≤k} λ_i` across `parties | rest`.
    Vidal { parties: Vec<usize>, k: usize },
    /// `1 − Z^{exponent}`, exponent defaulting to one over the ket count.
    Graph {
        graph: GraphSource,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponent: Option<Exponent>,
    },
    /// Hypercube graph on `q` parties.
    MultiRenyi { q: usize },
    /// `1 − max |P ψ|²` over product projectors of the given ranks.
    Bl {
        ranks: Vec<usize>,
        #[serde(default = "default_restarts")]
        restarts: usize,
        #[serde(default)]
        seed: u64,
    },
}

fn default_restarts() -> usize {
    8
}

impl MonotoneSpec {
    pub fn vidal(parties: &[usize], k: usize) -> Self {
        MonotoneSpec::Vidal {
            parties: parties.to_vec(),
            k,
        }
    }

    /// `1 − (C_1 □ C_n)^{1/2n}` on three parties.
    pub fn nu(n: usize) -> Self {
        MonotoneSpec::Graph {
            graph: GraphSource::CycleProduct { ns: vec![1, n] },
            exponent: None,
        }
    }

    pub fn graph(source: GraphSource) -> Self {
        MonotoneSpec::Graph {
            graph: source,
            exponent: None,
        }
    }

    pub fn prepare(&self, dims: &[usize]) -> Result<PreparedMonotone> {
        PreparedMonotone::new(self, dims)
    }

    /// One-shot evaluation.
    pub fn evaluate(&self, state: &PureState) -> Result<f64> {
        self.prepare(state.dims())?.evaluate(state)
    }
}

/// How a graph monotone's convexity is backed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// Known by construction (cycles, their products, hypercubes).
    Trusted,
    /// Constructive certificate verified for every label.
    Verified,
}

/// Breakdown of a graph monotone evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GraphValue {
    pub z: f64,
    pub z_clamped: f64,
    pub value: f64,
}

/// `1 − Z^{e}` for a fixed graph and local dimensions.
#[derive(Clone, Debug)]
pub struct GraphMonotone {
    evaluator: InvariantEvaluator,
    exponent: Exponent,
    certification: Certification,
}

impl GraphMonotone {
    /// Requires a validated, parity-symmetric graph. Untrusted graphs must
    /// carry a verified constructive certificate for every label.
    pub fn new(graph: &PsiGraph, dims: &[usize], exponent: Option<Exponent>, trusted: bool) -> Result<Self> {
        let evaluator = InvariantEvaluator::new(graph, dims)?;
        if !evaluator.parity_symmetric() {
            return Err(Error::Unsupported(
                "graph has no parity-flipping automorphism, so its invariant is not real".into(),
            ));
        }
        let certification = if trusted {
            Certification::Trusted
        } else {
            for label in 0..graph.party_count() {
                match reflect::constructive_certificate(graph, label)? {
                    CertificateStatus::Verified(..) => {}
                    CertificateStatus::Unknown => {
                        return Err(Error::Unsupported(format!(
                            "label {label}: edge-reflecting but no constructive certificate is known"
                        )))
                    }
                    CertificateStatus::NotEdgeReflecting(d) => {
                        return Err(Error::Unsupported(format!(
                            "label {label}: not edge-reflecting (witness {:?})",
                            d.witness
                        )))
                    }
                }
            }
            Certification::Verified
        };
        Ok(Self {
            exponent: exponent.unwrap_or(Exponent::reciprocal(graph.ket_count())),
            evaluator,
            certification,
        })
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    /// The exponent is one over the ket count, as convexity requires.
    pub fn is_canonical(&self) -> bool {
        let n = self.evaluator.graph().ket_count() as u64;
        self.exponent.num as u64 * n == self.exponent.den && self.exponent.num > 0
    }

    pub fn certification(&self) -> Certification {
        self.certification
    }

    pub fn evaluator(&self) -> &InvariantEvaluator {
        &self.evaluator
    }

    pub fn evaluate(&self, state: &PureState) -> Result<GraphValue> {
        require_normalized(state)?;
        let z = self.evaluator.evaluate(state)?.real()?;
        graph_value(z, self.exponent)
    }
}

/// Clamps `Z` into `[0, 1]`, rejecting values more than the tolerance
/// outside, then applies the exponent. Non-positive exponents skip the cap.
fn graph_value(z: f64, exponent: Exponent) -> Result<GraphValue> {
    if !(-Z_CLAMP_TOL..=1.0 + Z_CLAMP_TOL).contains(&z) {
        return Err(Error::OutOfRange(z));
    }
    let zc = z.clamp(0.0, 1.0);
    let e = exponent.value();
    let root = zc.powf(e);
    let value = if e > 0.0 { 1.0 - root.min(1.0) } else { 1.0 - root };
    Ok(GraphValue {
        z,
        z_clamped: zc,
        value,
    })
}

/// `1 − Z^{1/n}` for a graph the caller vouches for.
pub fn graph_monotone(graph: &PsiGraph, state: &PureState) -> Result<f64> {
    Ok(GraphMonotone::new(graph, state.dims(), None, true)?.evaluate(state)?.value)
}

/// A monotone specialised to fixed local dimensions.
#[derive(Clone, Debug)]
pub struct PreparedMonotone {
    dims: Vec<usize>,
    kind: Prepared,
}

#[derive(Clone, Debug)]
enum Prepared {
    Vidal { parties: Vec<usize>, k: usize },
    Graph(Box<GraphMonotone>),
    Bl { ranks: Vec<usize>, restarts: usize, seed: u64 },
}

impl PreparedMonotone {
    pub fn new(spec: &MonotoneSpec, dims: &[usize]) -> Result<Self> {
        let kind = match spec {
            MonotoneSpec::Vidal { parties, k } => {
                if *k == 0 {
                    return Err(Error::InvalidArgument("k must be at least 1".into()));
                }
                if let Some(&p) = parties.iter().find(|&&p| p >= dims.len()) {
                    return Err(Error::PartyOutOfRange {
                        party: p,
                        parties: dims.len(),
                    });
                }
                Prepared::Vidal {
                    parties: parties.clone(),
                    k: *k,
                }
            }
            MonotoneSpec::Graph { graph, exponent } => {
                let (g, trusted) = graph.build()?;
                Prepared::Graph(Box::new(GraphMonotone::new(&g, dims, *exponent, trusted)?))
            }
            MonotoneSpec::MultiRenyi { q } => {
                let g = graph::build_hypercube(*q)?;
                Prepared::Graph(Box::new(GraphMonotone::new(&g, dims, None, true)?))
            }
            MonotoneSpec::Bl { ranks, restarts, seed } => {
                check_ranks(dims, ranks)?;
                Prepared::Bl {
                    ranks: ranks.clone(),
                    restarts: (*restarts).max(1),
                    seed: *seed,
                }
            }
        };
        Ok(Self {
            dims: dims.to_vec(),
            kind,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// The underlying graph monotone, if any.
    pub fn graph_monotone(&self) -> Option<&GraphMonotone> {
        match &self.kind {
            Prepared::Graph(g) => Some(g),
            _ => None,
        }
    }

    pub fn evaluate(&self, state: &PureState) -> Result<f64> {
        Ok(self.evaluate_detailed(state)?.value)
    }

    pub fn evaluate_detailed(&self, state: &PureState) -> Result<MonotoneValue> {
        if state.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "monotone prepared for dims {:?}, state has {:?}",
                self.dims,
                state.dims()
            )));
        }
        Ok(match &self.kind {
            Prepared::Vidal { parties, k } => MonotoneValue {
                value: vidal_monotone(state, parties, *k)?,
                diagnostics: serde_json::json!({
                    "spectrum": schmidt_spectrum(state, parties)?,
                }),
            },
            Prepared::Graph(g) => {
                let v = g.evaluate(state)?;
                MonotoneValue {
                    value: v.value,
                    diagnostics: serde_json::json!({
                        "z": v.z,
                        "exponent": g.exponent(),
                        "certification": g.certification(),
                        "vertices": g.evaluator().graph().vertex_count(),
                        "peak_intermediate": g.evaluator().plan().peak_size,
                    }),
                }
            }
            Prepared::Bl { ranks, restarts, seed } => {
                let r = bl_monotone(state, ranks, *restarts, *seed)?;
                MonotoneValue {
                    value: r.value,
                    diagnostics: serde_json::to_value(&r)?,
                }
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneValue {
    pub value: f64,
    pub diagnostics: serde_json::Value,
}

fn check_ranks(dims: &[usize], ranks: &[usize]) -> Result<()> {
    if ranks.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} ranks for {} parties",
            ranks.len(),
            dims.len()
        )));
    }
    for (a, (&r, &d)) in ranks.iter().zip(dims).enumerate() {
        if r == 0 || r > d {
            return Err(Error::InvalidArgument(format!(
                "rank {r} for party {a} outside 1..={d}"
            )));
        }
    }
    Ok(())
}

/// Outcome of an alternating projector maximization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaximizationReport {
    /// Best objective found over all restarts.
    pub best: f64,
    /// Objective reached by each restart.
    pub per_restart: Vec<f64>,
    /// `max − min` over restarts.
    pub spread: f64,
    pub sweeps: Vec<usize>,
    pub converged: Vec<bool>,
    /// The maximum is a local-search result, hence a lower bound.
    pub heuristic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlReport {
    /// `1 − best`.
    pub value: f64,
    #[serde(flatten)]
    pub search: MaximizationReport,
}

fn projector(v: &CMatrix) -> CMatrix {
    v * v.adjoint()
}

/// `ψ` with `projs[b]` applied on every party `b ≠ skip` that has one.
fn project_others(state: &PureState, projs: &[Option<CMatrix>], skip: usize) -> Result<PureState> {
    let mut s = state.clone();
    for (b, p) in projs.iter().enumerate() {
        if b != skip {
            if let Some(p) = p {
                s = s.apply_local(b, p)?;
            }
        }
    }
    Ok(s)
}

/// Shared driver: block-coordinate ascent over rank-`k` projectors, one
/// party at a time. `update` returns the new isometry for party `a` given
/// the current projectors; `objective` scores a full assignment.
fn alternate<U, O>(
    state: &PureState,
    ranks: &[usize],
    restarts: usize,
    seed: u64,
    mut update: U,
    objective: O,
) -> Result<MaximizationReport>
where
    U: FnMut(usize, &[Option<CMatrix>]) -> Result<CMatrix>,
    O: Fn(&[Option<CMatrix>]) -> Result<f64>,
{
    let dims = state.dims().to_vec();
    check_ranks(&dims, ranks)?;
    let active: Vec<usize> = (0..dims.len()).filter(|&a| ranks[a] < dims[a]).collect();
    let restarts = restarts.max(1);
    let mut per_restart = Vec::with_capacity(restarts);
    let mut sweeps = Vec::with_capacity(restarts);
    let mut converged = Vec::with_capacity(restarts);
    for r in 0..restarts {
        let mut rng = linalg::rng(linalg::derive_seed(seed, r as u64));
        let mut projs: Vec<Option<CMatrix>> = (0..dims.len())
            .map(|a| {
                if ranks[a] < dims[a] {
                    Some(projector(&linalg::haar_isometry(&mut rng, dims[a], ranks[a])))
                } else {
                    None
                }
            })
            .collect();
        let mut value = objective(&projs)?;
        let mut done = active.is_empty();
        let mut count = 0;
        while !done && count < MAX_SWEEPS {
            count += 1;
            for &a in &active {
                let v = update(a, &projs)?;
                projs[a] = Some(projector(&v));
            }
            let next = objective(&projs)?;
            done = next - value < SWEEP_TOL;
            value = value.max(next);
        }
        per_restart.push(value);
        sweeps.push(count);
        converged.push(done);
    }
    let best = per_restart.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let worst = per_restart.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MaximizationReport {
        best,
        per_restart,
        spread: best - worst,
        sweeps,
        converged,
        heuristic: !active.is_empty(),
    })
}

/// `1 − max |P_{k_1} ⊗ … ⊗ P_{k_q} ψ|²`, by alternating top-`k` eigenspaces.
pub fn bl_monotone(state: &PureState, ranks: &[usize], restarts: usize, seed: u64) -> Result<BlReport> {
    require_normalized(state)?;
    let search = alternate(
        state,
        ranks,
        restarts,
        seed,
        |a, projs| {
            let phi = project_others(state, projs, a)?;
            let rho = tensor::reduced_density(&phi, &[a])?;
            Ok(linalg::top_eigenvectors(rho.matrix(), ranks[a]))
        },
        |projs| Ok(project_others(state, projs, usize::MAX)?.norm_sqr()),
    )?;
    Ok(BlReport {
        value: (1.0 - search.best).clamp(0.0, 1.0),
        search,
    })
}

/// Maximizes `Z(Pψ)^{1/n}` over product projectors of the given ranks.
///
/// With the other projectors fixed, the reduced matrix on the remaining
/// parties is linear in `P_a`, so the objective is convex in `P_a`. Each
/// step moves to the top eigenspace of the gradient, which never
/// decreases a convex homogeneous objective.
pub fn projector_maximize(
    graph: &PsiGraph,
    ranks: &[usize],
    state: &PureState,
    restarts: usize,
    seed: u64,
) -> Result<MaximizationReport> {
    let evaluator = std::cell::RefCell::new(InvariantEvaluator::new(graph, state.dims())?);
    if !evaluator.borrow().parity_symmetric() {
        return Err(Error::Unsupported("graph invariant is not real".into()));
    }
    let n = graph.ket_count() as f64;
    let objective = |projs: &[Option<CMatrix>]| -> Result<f64> {
        let s = project_others(state, projs, usize::MAX)?;
        let z = evaluator.borrow().evaluate(&s)?.re;
        Ok(z.max(0.0).powf(1.0 / n))
    };
    alternate(
        state,
        ranks,
        restarts,
        seed,
        |a, projs| {
            let phi = project_others(state, projs, a)?;
            let pa = projs[a].clone().unwrap_or_else(|| CMatrix::identity(state.dims()[a], state.dims()[a]));
            let rho = tensor::partial_trace(&phi.apply_local(a, &pa)?, a)?;
            let m = phi.matricize(&[a]);
            let d = m.nrows();
            let rows: Vec<nalgebra::DVector<C64>> = (0..d).map(|i| m.row(i).transpose()).collect();
            let mut ev = evaluator.borrow_mut();
            let edges = graph.label_edges(a).len();
            let mut grad = CMatrix::zeros(d, d);
            for i in 0..d {
                for j in i..d {
                    let delta = &rows[i] * rows[j].adjoint();
                    let mut g = C64::new(0.0, 0.0);
                    for e in 0..edges {
                        let mats: Vec<&CMatrix> =
                            (0..edges).map(|f| if f == e { &delta } else { rho.matrix() }).collect();
                        g += ev.evaluate_multilinear_raw(a, &mats)?;
                    }
                    grad[(i, j)] = g;
                    grad[(j, i)] = g.conj();
                }
            }
            Ok(linalg::top_eigenvectors(&grad, ranks[a]))
        },
        objective,
    )
}

/// Ratio of the determinant-based monotone between `ψ₀` and the
/// unit-determinant deformation `(⊗ M̂)ψ₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetRatio {
    pub raw: f64,
    pub capped: f64,
}

/// Rescales every `M` to unit determinant (principal root) and returns
/// `‖(⊗M̂)ψ₀‖² / ‖ψ₀‖²`, together with its cap at 1.
pub fn det_ratio(psi0: &PureState, ms: &[CMatrix]) -> Result<DetRatio> {
    if ms.len() != psi0.party_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} matrices for {} parties",
            ms.len(),
            psi0.party_count()
        )));
    }
    let mut s = psi0.clone();
    for (a, m) in ms.iter().enumerate() {
        let d = psi0.dims()[a];
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch(format!("matrix for party {a} must be {d}x{d}")));
        }
        let det = m.clone().determinant();
        let scale = linalg::frobenius(m).powi(d as i32).max(f64::MIN_POSITIVE);
        if det.norm() <= 1e-12 * scale {
            return Err(Error::SingularMatrix(a));
        }
        let root = det.powf(1.0 / d as f64);
        s = s.apply_local(a, &(m / root))?;
    }
    let raw = s.norm_sqr() / psi0.norm_sqr();
    Ok(DetRatio {
        raw,
        capped: raw.min(1.0),
    })
}

/// `ν̃_k(ψ)/ν̃_k(φ)` for every `k`, with `0/0 → 1` and `x/0 → ∞`.
pub fn majorization_ratios(psi: &PureState, phi: &PureState, side: &[usize]) -> Result<Vec<f64>> {
    if psi.dims() != phi.dims() {
        return Err(Error::DimensionMismatch("states have different dims".into()));
    }
    require_normalized(psi)?;
    require_normalized(phi)?;
    let a = vidal_tail(&schmidt_spectrum(psi, side)?);
    let b = vidal_tail(&schmidt_spectrum(phi, side)?);
    const ZERO: f64 = 1e-14;
    Ok(a.iter()
        .zip(&b)
        .map(|(&x, &y)| match (x <= ZERO, y <= ZERO) {
            (true, true) => 1.0,
            (false, true) => f64::INFINITY,
            _ => x / y,
        })
        .collect())
}

/// Deterministic conversion `ψ → φ` across `side | rest` is possible.
pub fn can_convert_with_certainty(psi: &PureState, phi: &PureState, side: &[usize]) -> Result<bool> {
    Ok(majorization_ratios(psi, phi, side)?
        .iter()
        .all(|&r| r >= 1.0 - 1e-12))
}

/// Version tag of the composite catalog.
pub const CATALOG_VERSION: &str = "v1";

/// Positive, monotone, concave test functionals on the positive orthant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Composite {
    /// `Σ w_i x_i`
    WeightedSum { weights: Vec<f64> },
    /// `(Σ w_i x_i^p)^{1/p}` with `p ∈ (0, 1]`
    PowerMean { weights: Vec<f64>, p: f64 },
    /// `min_i w_i x_i`
    MinCombination { weights: Vec<f64> },
    /// `(Σ w_i x_i)^p` with `p ∈ (0, 1]`
    PowerOfSum { weights: Vec<f64>, p: f64 },
}

impl Composite {
    pub fn sqrt(k: usize) -> Self {
        Composite::PowerOfSum {
            weights: vec![1.0; k],
            p: 0.5,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let dot = |w: &[f64]| w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>();
        match self {
            Composite::WeightedSum { weights } => dot(weights),
            Composite::PowerMean { weights, p } => weights
                .iter()
                .zip(x)
                .map(|(w, x)| w * x.powf(*p))
                .sum::<f64>()
                .powf(1.0 / p),
            Composite::MinCombination { weights } => weights
                .iter()
                .zip(x)
                .map(|(w, x)| w * x)
                .fold(f64::INFINITY, f64::min),
            Composite::PowerOfSum { weights, p } => dot(weights).powf(*p),
        }
    }

    fn weights(&self) -> &[f64] {
        match self {
            Composite::WeightedSum { weights }
            | Composite::PowerMean { weights, .. }
            | Composite::MinCombination { weights }
            | Composite::PowerOfSum { weights, .. } => weights,
        }
    }

    /// One random member of every catalog form on `k` arguments.
    pub fn catalog<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<Self> {
        let mut w = || -> Vec<f64> { (0..k).map(|_| rng.random_range(0.05..2.0)).collect() };
        let (w1, w2, w3, w4) = (w(), w(), w(), w());
        let p1: f64 = 1.0 - rng.random::<f64>() * 0.95;
        let p2: f64 = 1.0 - rng.random::<f64>() * 0.95;
        vec![
            Composite::WeightedSum { weights: w1 },
            Composite::PowerMean { weights: w2, p: p1 },
            Composite::MinCombination { weights: w3 },
            Composite::PowerOfSum { weights: w4, p: p2 },
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompositeReport {
    pub catalog_version: &'static str,
    pub checks: usize,
    /// `G(x)/G(x') − min(x_i/x'_i, 1)` minimized over all checks.
    pub worst_margin: f64,
    pub passed: bool,
}

/// Checks `G(x)/G(x') ≥ min(min_i x_i/x'_i, 1)` for every functional.
pub fn composite_ratio_floor(xs: &[f64], xs_prime: &[f64], gs: &[Composite]) -> Result<CompositeReport> {
    if xs.len() != xs_prime.len() || xs.is_empty() {
        return Err(Error::DimensionMismatch("argument vectors must have equal non-zero length".into()));
    }
    if xs.iter().chain(xs_prime).any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidArgument("arguments must be positive".into()));
    }
    if let Some(g) = gs.iter().find(|g| g.weights().len() != xs.len()) {
        return Err(Error::DimensionMismatch(format!(
            "functional takes {} arguments, got {}",
            g.weights().len(),
            xs.len()
        )));
    }
    let floor = xs
        .iter()
        .zip(xs_prime)
        .map(|(a, b)| a / b)
        .fold(1.0, f64::min);
    let worst = gs
        .iter()
        .map(|g| g.eval(xs) / g.eval(xs_prime) - floor)
        .fold(f64::INFINITY, f64::min);
    Ok(CompositeReport {
        catalog_version: CATALOG_VERSION,
        checks: gs.len(),
        worst_margin: worst,
        passed: worst >= -1e-12,
    })
}

/// Seeded sweep over random argument pairs and the whole catalog.
pub fn composite_sweep(draws: usize, max_args: usize, seed: u64) -> Result<CompositeReport> {
    let mut rng = linalg::rng(seed);
    let mut worst = f64::INFINITY;
    let mut checks = 0;
    for _ in 0..draws {
        let k = rng.random_range(1..=max_args.max(1));
        let mut draw = || -> Vec<f64> { (0..k).map(|_| 10f64.powf(rng.random_range(-3.0..1.0))).collect() };
        let (x, xp) = (draw(), draw());
        let gs = Composite::catalog(k, &mut rng);
        let r = composite_ratio_floor(&x, &xp, &gs)?;
        worst = worst.min(r.worst_margin);
        checks += r.checks;
    }
    Ok(CompositeReport {
        catalog_version: CATALOG_VERSION,
        checks,
        worst_margin: worst,
        passed: worst >= -1e-12,
    })
}
