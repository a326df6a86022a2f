//! States, density matrices and invariant evaluation by tensor contraction.
//!
//! A ψ-graph becomes a tensor network with one node per vertex. Ket
//! vertices carry the amplitude tensor and bra vertices its conjugate; the
//! leg for party `p` at a vertex is the unique `p`-labeled edge there. The
//! network is contracted pairwise in a greedy order that depends only on
//! the graph and the local dimensions.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Parity, PsiGraph};
use crate::linalg::{self, CMatrix, C64};
use crate::reflect;

/// Largest intermediate tensor a plan may create, in complex entries.
pub const MEMORY_CAP: usize = 1 << 26;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Pure state as a dense row-major amplitude tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        let size: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!("invalid dims {dims:?}")));
        }
        if size != amps.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {dims:?} (expected {size})",
                amps.len()
            )));
        }
        Ok(Self { dims, amps })
    }

    /// Like [`PureState::new`] but also requires unit norm within 1e-9.
    pub fn normalized(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        let s = Self::new(dims, amps)?;
        if !s.is_normalized() {
            return Err(Error::InvalidArgument(format!(
                "state has squared norm {}",
                s.norm_sqr()
            )));
        }
        Ok(s)
    }

    /// Builds a state from real amplitudes.
    pub fn from_real(dims: Vec<usize>, amps: &[f64]) -> Result<Self> {
        Self::new(dims, amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Tensor product of single-party vectors.
    pub fn product(factors: &[Vec<C64>]) -> Result<Self> {
        let dims: Vec<usize> = factors.iter().map(Vec::len).collect();
        let mut amps = vec![C64::new(1.0, 0.0)];
        for f in factors {
            amps = amps
                .iter()
                .flat_map(|a| f.iter().map(move |b| a * b))
                .collect();
        }
        Self::new(dims, amps)
    }

    /// `(|0…0⟩ + |1…1⟩)/√2` on `q` qubits.
    pub fn ghz(q: usize) -> Self {
        let mut amps = vec![ZERO; 1 << q];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = C64::new(s, 0.0);
        amps[(1 << q) - 1] = C64::new(s, 0.0);
        Self {
            dims: vec![2; q],
            amps,
        }
    }

    /// Gaussian amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Self {
        let size: usize = dims.iter().product();
        let amps: Vec<C64> = (0..size).map(|_| linalg::complex_gaussian(rng)).collect();
        let mut s = Self {
            dims: dims.to_vec(),
            amps,
        };
        s.normalize();
        s
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn party_count(&self) -> usize {
        self.dims.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        linalg::norm_sqr(&self.amps)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-9
    }

    /// Rescales to unit norm and returns the previous squared norm.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm_sqr();
        if n > 0.0 {
            let s = 1.0 / n.sqrt();
            for a in &mut self.amps {
                *a *= s;
            }
        }
        n
    }

    /// Applies `m` (shape `d_out × d_party`) to one party, unnormalized.
    pub fn apply_local(&self, party: usize, m: &CMatrix) -> Result<Self> {
        self.check_party(party)?;
        if m.ncols() != self.dims[party] || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, party {party} has dimension {}",
                m.nrows(),
                m.ncols(),
                self.dims[party]
            )));
        }
        let amps = linalg::apply_local(&self.amps, &self.dims, party, m);
        let mut dims = self.dims.clone();
        dims[party] = m.nrows();
        Ok(Self { dims, amps })
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub(crate) fn check_party(&self, party: usize) -> Result<()> {
        if party >= self.dims.len() {
            return Err(Error::PartyOutOfRange {
                party,
                parties: self.dims.len(),
            });
        }
        Ok(())
    }

    /// Amplitudes arranged as a `(keep) × (rest)` matrix, both row-major in party order.
    pub(crate) fn matricize(&self, keep: &[usize]) -> CMatrix {
        let rest: Vec<usize> = (0..self.dims.len()).filter(|p| !keep.contains(p)).collect();
        let dk: usize = keep.iter().map(|&p| self.dims[p]).product();
        let dr: usize = rest.iter().map(|&p| self.dims[p]).product();
        let strides = strides(&self.dims);
        let mut m = CMatrix::zeros(dk, dr);
        for (flat, &a) in self.amps.iter().enumerate() {
            let (mut r, mut c) = (0, 0);
            for &p in keep {
                r = r * self.dims[p] + (flat / strides[p]) % self.dims[p];
            }
            for &p in &rest {
                c = c * self.dims[p] + (flat / strides[p]) % self.dims[p];
            }
            m[(r, c)] = a;
        }
        m
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Density matrix over the listed parties, joint index row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Checks shape and Hermiticity within 1e-10. Positivity and trace are
    /// not required, so unnormalized or signed inputs can feed multilinear
    /// evaluation.
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let size: usize = dims.iter().product();
        if matrix.nrows() != size || matrix.ncols() != size {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} for dims {dims:?}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = linalg::frobenius(&(&matrix - matrix.adjoint()));
        if asym > 1e-10 {
            return Err(Error::InvalidArgument(format!("matrix is not Hermitian (residual {asym:e})")));
        }
        Ok(Self { dims, matrix })
    }

    /// Additionally requires eigenvalues ≥ −1e-10 and unit trace within 1e-9.
    pub fn normalized(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let rho = Self::new(dims, matrix)?;
        rho.check_state()?;
        Ok(rho)
    }

    pub fn check_state(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("trace {tr} is not 1")));
        }
        let min = self.eigenvalues().last().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(Error::InvalidArgument(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `G G† / Tr(G G†)` with a square standard complex Gaussian `G`.
    pub fn random<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Self {
        let d: usize = dims.iter().product();
        let g = linalg::gaussian_matrix(rng, d, d);
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        let m = linalg::hermitian_part(&(m / C64::new(tr, 0.0)));
        Self {
            dims: dims.to_vec(),
            matrix: m,
        }
    }

    pub fn from_pure(state: &PureState) -> Self {
        let v = linalg::to_vector(state.amps());
        Self {
            dims: state.dims().to_vec(),
            matrix: &v * v.adjoint(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            matrix: &self.matrix * C64::new(s, 0.0),
        }
    }

    /// `p·self + (1−p)·other`.
    pub fn mix(&self, other: &Self, p: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch("mixing density matrices of different shape".into()));
        }
        Ok(Self {
            dims: self.dims.clone(),
            matrix: &self.matrix * C64::new(p, 0.0) + &other.matrix * C64::new(1.0 - p, 0.0),
        })
    }
}

/// `Tr_party |ψ⟩⟨ψ|`, a density matrix on the remaining parties.
pub fn partial_trace(state: &PureState, party: usize) -> Result<DensityMatrix> {
    state.check_party(party)?;
    let keep: Vec<usize> = (0..state.party_count()).filter(|&p| p != party).collect();
    reduced_density(state, &keep)
}

/// Reduced density matrix on `keep` (ascending party ids), tracing out the rest.
pub fn reduced_density(state: &PureState, keep: &[usize]) -> Result<DensityMatrix> {
    for &p in keep {
        state.check_party(p)?;
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("kept parties must be strictly ascending".into()));
    }
    let m = state.matricize(keep);
    let dims = keep.iter().map(|&p| state.dims()[p]).collect();
    Ok(DensityMatrix {
        dims,
        matrix: linalg::hermitian_part(&(&m * m.adjoint())),
    })
}

/// Purification with one extra trailing party.
///
/// The ancilla dimension defaults to the numerical rank of `rho`;
/// a requested dimension below the rank is an error.
pub fn purify(rho: &DensityMatrix, ancilla_dim: Option<usize>) -> Result<PureState> {
    let (vals, vecs) = linalg::hermitian_eigen(rho.matrix());
    let top = vals.first().copied().unwrap_or(0.0).max(0.0);
    let rank = vals.iter().filter(|&&l| l > 1e-12 * top.max(1.0)).count().max(1);
    let anc = ancilla_dim.unwrap_or(rank);
    if anc < rank {
        return Err(Error::InvalidArgument(format!(
            "ancilla dimension {anc} is below the rank {rank}"
        )));
    }
    let d = rho.matrix().nrows();
    let mut amps = vec![ZERO; d * anc];
    for (i, &l) in vals.iter().take(rank).enumerate() {
        let s = l.max(0.0).sqrt();
        for r in 0..d {
            amps[r * anc + i] = vecs[(r, i)] * s;
        }
    }
    let mut dims = rho.dims().to_vec();
    dims.push(anc);
    PureState::new(dims, amps)
}

#[derive(Clone, Debug)]
struct Tensor {
    legs: Vec<usize>,
    dims: Vec<usize>,
    data: Vec<C64>,
}

impl Tensor {
    /// Sums over repeated legs.
    fn self_trace(self) -> Tensor {
        let mut seen = BTreeSet::new();
        if self.legs.iter().all(|l| seen.insert(*l)) {
            return self;
        }
        let mut out_legs = Vec::new();
        let mut out_dims = Vec::new();
        for (i, &l) in self.legs.iter().enumerate() {
            let count = self.legs.iter().filter(|&&x| x == l).count();
            if count == 1 {
                out_legs.push(l);
                out_dims.push(self.dims[i]);
            }
        }
        let out_size: usize = out_dims.iter().product();
        let mut data = vec![ZERO; out_size];
        let st = strides(&self.dims);
        'outer: for (flat, &v) in self.data.iter().enumerate() {
            let idx: Vec<usize> = (0..self.legs.len()).map(|i| (flat / st[i]) % self.dims[i]).collect();
            for i in 0..self.legs.len() {
                for j in i + 1..self.legs.len() {
                    if self.legs[i] == self.legs[j] && idx[i] != idx[j] {
                        continue 'outer;
                    }
                }
            }
            let mut o = 0;
            for (i, &l) in self.legs.iter().enumerate() {
                if out_legs.contains(&l) {
                    o = o * self.dims[i] + idx[i];
                }
            }
            data[o] += v;
        }
        Tensor {
            legs: out_legs,
            dims: out_dims,
            data,
        }
    }

    /// Reorders legs to `perm` (new position i holds old leg perm[i]).
    fn permuted(&self, perm: &[usize]) -> Vec<C64> {
        if perm.iter().enumerate().all(|(i, &p)| i == p) {
            return self.data.clone();
        }
        let st = strides(&self.dims);
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut out = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; perm.len()];
        for _ in 0..self.data.len() {
            let src: usize = idx.iter().zip(perm).map(|(&i, &p)| i * st[p]).sum();
            out.push(self.data[src]);
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < new_dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        out
    }

    fn contract(&self, other: &Tensor) -> Tensor {
        let shared: Vec<usize> = self.legs.iter().copied().filter(|l| other.legs.contains(l)).collect();
        let free_a: Vec<usize> = (0..self.legs.len()).filter(|&i| !shared.contains(&self.legs[i])).collect();
        let free_b: Vec<usize> = (0..other.legs.len()).filter(|&i| !shared.contains(&other.legs[i])).collect();
        let sh_a: Vec<usize> = shared.iter().map(|l| self.legs.iter().position(|x| x == l).unwrap()).collect();
        let sh_b: Vec<usize> = shared.iter().map(|l| other.legs.iter().position(|x| x == l).unwrap()).collect();

        let perm_a: Vec<usize> = free_a.iter().chain(&sh_a).copied().collect();
        let perm_b: Vec<usize> = sh_b.iter().chain(&free_b).copied().collect();
        let rows: usize = free_a.iter().map(|&i| self.dims[i]).product();
        let inner: usize = sh_a.iter().map(|&i| self.dims[i]).product();
        let cols: usize = free_b.iter().map(|&i| other.dims[i]).product();

        let a = DMatrix::from_row_slice(rows, inner, &self.permuted(&perm_a));
        let b = DMatrix::from_row_slice(inner, cols, &other.permuted(&perm_b));
        let c = a * b;
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for k in 0..cols {
                data.push(c[(r, k)]);
            }
        }
        Tensor {
            legs: free_a.iter().map(|&i| self.legs[i]).chain(free_b.iter().map(|&i| other.legs[i])).collect(),
            dims: free_a.iter().map(|&i| self.dims[i]).chain(free_b.iter().map(|&i| other.dims[i])).collect(),
            data,
        }
    }
}

/// One pairwise merge. Operands index the growing node list: leaves
/// first, then each step's result in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlanStep {
    pub left: usize,
    pub right: usize,
    /// Open legs of the result, in storage order.
    pub result_legs: Vec<usize>,
    pub result_size: usize,
}

/// Deterministic pairwise contraction order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionPlan {
    pub leaves: usize,
    pub steps: Vec<PlanStep>,
    pub peak_size: usize,
}

impl ContractionPlan {
    /// Greedy plan: merge the connected pair with the smallest result,
    /// ties broken by the lowest shared leg.
    pub fn greedy(leaf_legs: &[Vec<(usize, usize)>], cap: usize) -> Result<Self> {
        let mut live: Vec<Option<Vec<(usize, usize)>>> = leaf_legs
            .iter()
            .map(|legs| Some(open_legs(legs)))
            .collect();
        let mut peak = leaf_legs
            .iter()
            .map(|l| l.iter().map(|&(_, d)| d).product::<usize>())
            .max()
            .unwrap_or(1);
        let mut steps = Vec::new();
        loop {
            let ids: Vec<usize> = (0..live.len()).filter(|&i| live[i].is_some()).collect();
            if ids.len() <= 1 {
                break;
            }
            // (size, lowest shared leg or MAX for outer products, i, j)
            let mut best: Option<(usize, usize, usize, usize)> = None;
            for (x, &i) in ids.iter().enumerate() {
                for &j in &ids[x + 1..] {
                    let a = live[i].as_ref().unwrap();
                    let b = live[j].as_ref().unwrap();
                    let shared = a.iter().filter(|(l, _)| b.iter().any(|(m, _)| m == l)).map(|&(l, _)| l).min();
                    let size = merged_legs(a, b).iter().map(|&(_, d)| d).product::<usize>();
                    let key = (size, shared.unwrap_or(usize::MAX), i, j);
                    let better = match best {
                        None => true,
                        Some(cur) => {
                            let connected_new = key.1 != usize::MAX;
                            let connected_cur = cur.1 != usize::MAX;
                            (connected_new && !connected_cur)
                                || (connected_new == connected_cur && key < cur)
                        }
                    };
                    if better {
                        best = Some(key);
                    }
                }
            }
            let (size, _, i, j) = best.unwrap();
            let merged = merged_legs(live[i].as_ref().unwrap(), live[j].as_ref().unwrap());
            peak = peak.max(size);
            if peak > cap {
                return Err(Error::PlanTooLarge { needed: peak, cap });
            }
            steps.push(PlanStep {
                left: i,
                right: j,
                result_legs: merged.iter().map(|&(l, _)| l).collect(),
                result_size: size,
            });
            live[i] = None;
            live[j] = None;
            live.push(Some(merged));
        }
        Ok(Self {
            leaves: leaf_legs.len(),
            steps,
            peak_size: peak,
        })
    }

    fn execute(&self, leaves: Vec<Tensor>) -> C64 {
        let mut nodes: Vec<Option<Tensor>> = leaves.into_iter().map(|t| Some(t.self_trace())).collect();
        for step in &self.steps {
            let a = nodes[step.left].take().expect("plan consumes each node once");
            let b = nodes[step.right].take().expect("plan consumes each node once");
            nodes.push(Some(a.contract(&b)));
        }
        let last = nodes.into_iter().flatten().next().expect("non-empty network");
        debug_assert!(last.legs.is_empty());
        last.data[0]
    }
}

/// Legs that stay open after self-tracing a leaf.
fn open_legs(legs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    legs.iter()
        .copied()
        .filter(|(l, _)| legs.iter().filter(|(m, _)| m == l).count() == 1)
        .collect()
}

fn merged_legs(a: &[(usize, usize)], b: &[(usize, usize)]) -> Vec<(usize, usize)> {
    a.iter()
        .filter(|(l, _)| !b.iter().any(|(m, _)| m == l))
        .chain(b.iter().filter(|(l, _)| !a.iter().any(|(m, _)| m == l)))
        .copied()
        .collect()
}

/// Value of an invariant together with the real-part rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvariantValue {
    pub re: f64,
    pub im: f64,
    /// A parity-flipping automorphism exists, so the value is real.
    pub parity_symmetric: bool,
}

impl InvariantValue {
    pub fn complex(&self) -> C64 {
        C64::new(self.re, self.im)
    }

    /// The real value, or an error for graphs without parity symmetry.
    pub fn real(&self) -> Result<f64> {
        if self.parity_symmetric {
            Ok(self.re)
        } else {
            Err(Error::NonRealInvariant {
                re: self.re,
                im: self.im,
            })
        }
    }
}

fn check_real(z: C64, parity_symmetric: bool) -> Result<InvariantValue> {
    if parity_symmetric && z.im.abs() > 1e-9 * (1.0 + z.norm()) {
        return Err(Error::NonRealInvariant { re: z.re, im: z.im });
    }
    Ok(InvariantValue {
        re: z.re,
        im: if parity_symmetric { 0.0 } else { z.im },
        parity_symmetric,
    })
}

/// Cached plans for evaluating one graph at fixed local dimensions.
#[derive(Clone, Debug)]
pub struct InvariantEvaluator {
    graph: PsiGraph,
    dims: Vec<usize>,
    parity_symmetric: bool,
    plan: ContractionPlan,
    density_plans: Vec<Option<ContractionPlan>>,
}

impl InvariantEvaluator {
    pub fn new(graph: &PsiGraph, dims: &[usize]) -> Result<Self> {
        graph.ensure_valid()?;
        if dims.len() != graph.party_count() {
            return Err(Error::DimensionMismatch(format!(
                "graph has {} labels, state has {} parties",
                graph.party_count(),
                dims.len()
            )));
        }
        let leaves: Vec<Vec<(usize, usize)>> = (0..graph.vertex_count())
            .map(|v| vertex_legs(graph, v).into_iter().zip(dims.iter().copied()).collect())
            .collect();
        let plan = ContractionPlan::greedy(&leaves, MEMORY_CAP)?;
        Ok(Self {
            graph: graph.clone(),
            dims: dims.to_vec(),
            parity_symmetric: reflect::is_parity_symmetric(graph),
            plan,
            density_plans: vec![None; graph.party_count()],
        })
    }

    pub fn graph(&self) -> &PsiGraph {
        &self.graph
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn plan(&self) -> &ContractionPlan {
        &self.plan
    }

    pub fn parity_symmetric(&self) -> bool {
        self.parity_symmetric
    }

    pub fn evaluate(&self, state: &PureState) -> Result<InvariantValue> {
        if state.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "evaluator built for dims {:?}, state has {:?}",
                self.dims,
                state.dims()
            )));
        }
        let conj: Vec<C64> = state.amps().iter().map(|a| a.conj()).collect();
        let leaves = (0..self.graph.vertex_count())
            .map(|v| Tensor {
                legs: vertex_legs(&self.graph, v),
                dims: self.dims.clone(),
                data: match self.graph.parity(v) {
                    Parity::Ket => state.amps().to_vec(),
                    Parity::Bra => conj.clone(),
                },
            })
            .collect();
        check_real(self.plan.execute(leaves), self.parity_symmetric)
    }

    /// Evaluates with one copy of `rho` per `label` edge.
    pub fn evaluate_on_density(&mut self, label: usize, rho: &DensityMatrix) -> Result<InvariantValue> {
        let n = self.graph.label_edges(label.min(self.graph.party_count().saturating_sub(1))).len();
        let rhos = vec![rho; n];
        self.evaluate_multilinear(label, &rhos)
    }

    /// Evaluates the multilinear form with `rhos[i]` placed on the `i`-th
    /// `label` edge (ascending edge index).
    pub fn evaluate_multilinear(&mut self, label: usize, rhos: &[&DensityMatrix]) -> Result<InvariantValue> {
        let other = self.other_dims(label)?;
        for rho in rhos {
            if rho.dims() != other.as_slice() {
                return Err(Error::DimensionMismatch(format!(
                    "density matrix dims {:?}, expected {other:?}",
                    rho.dims()
                )));
            }
        }
        let mats: Vec<&CMatrix> = rhos.iter().map(|r| r.matrix()).collect();
        let z = self.evaluate_multilinear_raw(label, &mats)?;
        check_real(z, self.parity_symmetric)
    }

    /// Complex multilinear form on arbitrary square matrices, one per
    /// `label` edge, with no Hermiticity requirement or real-part rule.
    pub fn evaluate_multilinear_raw(&mut self, label: usize, mats: &[&CMatrix]) -> Result<C64> {
        let other_dims = self.other_dims(label)?;
        let d: usize = other_dims.iter().product();
        let edges = self.graph.label_edges(label);
        if mats.len() != edges.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices for {} label edges",
                mats.len(),
                edges.len()
            )));
        }
        if mats.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::DimensionMismatch(format!("matrices must be {d}x{d}")));
        }
        let legs: Vec<Vec<usize>> = edges.iter().map(|&e| density_legs(&self.graph, e, label)).collect();
        let leg_dims: Vec<usize> = other_dims.iter().chain(&other_dims).copied().collect();
        if self.density_plans[label].is_none() {
            let leaves: Vec<Vec<(usize, usize)>> = legs
                .iter()
                .map(|l| l.iter().copied().zip(leg_dims.iter().copied()).collect())
                .collect();
            self.density_plans[label] = Some(ContractionPlan::greedy(&leaves, MEMORY_CAP)?);
        }
        let plan = self.density_plans[label].as_ref().unwrap();
        let leaves = legs
            .into_iter()
            .zip(mats)
            .map(|(l, m)| {
                let mut data = Vec::with_capacity(d * d);
                for r in 0..d {
                    for c in 0..d {
                        data.push(m[(r, c)]);
                    }
                }
                Tensor {
                    legs: l,
                    dims: leg_dims.clone(),
                    data,
                }
            })
            .collect();
        Ok(plan.execute(leaves))
    }

    fn other_dims(&self, label: usize) -> Result<Vec<usize>> {
        let parties = self.graph.party_count();
        if label >= parties {
            return Err(Error::PartyOutOfRange { party: label, parties });
        }
        Ok((0..parties).filter(|&p| p != label).map(|p| self.dims[p]).collect())
    }
}

/// Leg (edge index) for each party at vertex `v`.
fn vertex_legs(g: &PsiGraph, v: usize) -> Vec<usize> {
    (0..g.party_count())
        .map(|p| g.neighbor(v, p).expect("validated graphs are color-regular").0)
        .collect()
}

/// Row legs at the ket endpoint, then column legs at the bra endpoint,
/// skipping `label`.
fn density_legs(g: &PsiGraph, e: usize, label: usize) -> Vec<usize> {
    let edge = g.edge(e);
    let (ket, bra) = if g.parity(edge.u) == Parity::Ket {
        (edge.u, edge.v)
    } else {
        (edge.v, edge.u)
    };
    let at = |x: usize| {
        (0..g.party_count())
            .filter(move |&p| p != label)
            .map(move |p| g.neighbor(x, p).expect("color-regular").0)
    };
    at(ket).chain(at(bra)).collect()
}

/// `Z(ψ)` for a validated graph with one label per party of `state`.
pub fn evaluate_invariant(graph: &PsiGraph, state: &PureState) -> Result<InvariantValue> {
    InvariantEvaluator::new(graph, state.dims())?.evaluate(state)
}

/// `Z` as a function of the density matrix on the parties other than `label`.
pub fn evaluate_on_density(graph: &PsiGraph, label: usize, rho: &DensityMatrix) -> Result<InvariantValue> {
    let dims = full_dims(graph, label, rho.dims())?;
    InvariantEvaluator::new(graph, &dims)?.evaluate_on_density(label, rho)
}

/// Multilinear form with one density matrix per `label` edge.
pub fn evaluate_multilinear(graph: &PsiGraph, label: usize, rhos: &[&DensityMatrix]) -> Result<InvariantValue> {
    let first = rhos
        .first()
        .ok_or_else(|| Error::InvalidArgument("no density matrices".into()))?;
    let dims = full_dims(graph, label, first.dims())?;
    InvariantEvaluator::new(graph, &dims)?.evaluate_multilinear(label, rhos)
}

/// Party dimensions with a placeholder 1 at `label`; the traced party never
/// appears in the density network.
fn full_dims(graph: &PsiGraph, label: usize, other: &[usize]) -> Result<Vec<usize>> {
    let parties = graph.party_count();
    if label >= parties {
        return Err(Error::PartyOutOfRange { party: label, parties });
    }
    if other.len() + 1 != parties {
        return Err(Error::DimensionMismatch(format!(
            "density matrix covers {} parties, graph has {parties} labels",
            other.len()
        )));
    }
    let mut dims = other.to_vec();
    dims.insert(label, 1);
    Ok(dims)
}

/// Worst observed midpoint-convexity violations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub trials: usize,
    /// Max of `f(pρ₁+(1−p)ρ₂) − p f(ρ₁) − (1−p) f(ρ₂)`.
    pub worst_value: f64,
    /// Same for the signed `1/n`-th root of `f`.
    pub worst_root: f64,
}

impl ProbeReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.worst_value <= tol && self.worst_root <= tol
    }
}

/// Convexity probe of an arbitrary functional on random density matrices.
pub fn convexity_probe_fn<F>(f: F, root: u32, dims: &[usize], trials: usize, seed: u64) -> Result<ProbeReport>
where
    F: Fn(&DensityMatrix) -> Result<f64>,
{
    let signed_root = |x: f64| x.signum() * x.abs().powf(1.0 / root as f64);
    let mut worst_value = f64::NEG_INFINITY;
    let mut worst_root = f64::NEG_INFINITY;
    for t in 0..trials {
        let mut rng = linalg::rng(linalg::derive_seed(seed, t as u64));
        let r1 = DensityMatrix::random(dims, &mut rng);
        let r2 = DensityMatrix::random(dims, &mut rng);
        let p: f64 = rng.random();
        let (z1, z2, zm) = (f(&r1)?, f(&r2)?, f(&r1.mix(&r2, p)?)?);
        worst_value = worst_value.max(zm - p * z1 - (1.0 - p) * z2);
        worst_root = worst_root.max(signed_root(zm) - p * signed_root(z1) - (1.0 - p) * signed_root(z2));
    }
    Ok(ProbeReport {
        trials,
        worst_value,
        worst_root,
    })
}

/// Probes convexity of `Z` and `Z^{1/n}` in the density matrix on the
/// parties other than `label`, each of dimension `local_dim`.
pub fn convexity_probe(
    graph: &PsiGraph,
    label: usize,
    local_dim: usize,
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let parties = graph.party_count();
    let mut dims = vec![local_dim; parties];
    if label >= parties {
        return Err(Error::PartyOutOfRange { party: label, parties });
    }
    dims[label] = 1;
    let other = vec![local_dim; parties - 1];
    let evaluator = std::cell::RefCell::new(InvariantEvaluator::new(graph, &dims)?);
    let n = graph.ket_count() as u32;
    convexity_probe_fn(
        |rho| evaluator.borrow_mut().evaluate_on_density(label, rho)?.real(),
        n,
        &other,
        trials,
        seed,
    )
}
