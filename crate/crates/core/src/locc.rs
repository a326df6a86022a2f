//! SLOCC deformations, transition-probability bounds and unilocal
//! instrument fuzzing.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::monotones::{self, MonotoneSpec, PreparedMonotone};
use crate::tensor::{self, PureState};

/// Below this squared norm a deformed state counts as annihilated.
pub const ANNIHILATION_TOL: f64 = 1e-12;

/// Outcomes less likely than this are dropped from ensembles.
pub const PRUNE_TOL: f64 = 1e-14;

/// Fuzz margins below `-FUZZ_TOL` count as violations.
pub const FUZZ_TOL: f64 = 1e-9;

/// The deformation generator `K = [[1, 1], [−2, −1]]`, with `K² = −I`.
pub fn generator_k() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(-2.0, 0.0), C64::new(-1.0, 0.0)],
    )
}

/// `exp(αK) = cos α · I + sin α · K`.
pub fn exp_k(alpha: f64) -> CMatrix {
    CMatrix::identity(2, 2) * C64::new(alpha.cos(), 0.0) + generator_k() * C64::new(alpha.sin(), 0.0)
}

/// `(2|000⟩ + |111⟩)/√5`.
pub fn asymmetric_ghz() -> PureState {
    let r5 = 5f64.sqrt();
    let mut amps = vec![0.0; 8];
    amps[0] = 2.0 / r5;
    amps[7] = 1.0 / r5;
    PureState::from_real(vec![2, 2, 2], &amps).expect("fixed shape")
}

fn check_ops(state: &PureState, ms: &[CMatrix]) -> Result<()> {
    if ms.len() != state.party_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} matrices for {} parties",
            ms.len(),
            state.party_count()
        )));
    }
    for (a, m) in ms.iter().enumerate() {
        let d = state.dims()[a];
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch(format!("matrix for party {a} must be {d}x{d}")));
        }
    }
    Ok(())
}

/// Normalized `(⊗M)ψ` and its squared norm before normalization.
pub fn slocc_apply(state: &PureState, ms: &[CMatrix]) -> Result<(PureState, f64)> {
    check_ops(state, ms)?;
    let mut s = state.clone();
    for (a, m) in ms.iter().enumerate() {
        s = s.apply_local(a, m)?;
    }
    let n = s.normalize();
    if n <= ANNIHILATION_TOL {
        return Err(Error::Annihilated(n));
    }
    Ok((s, n))
}

/// Success probability of the one-shot Kraus protocol with every `M`
/// scaled to unit largest singular value.
pub fn lower_bound(state: &PureState, ms: &[CMatrix]) -> Result<f64> {
    check_ops(state, ms)?;
    let mut s = state.clone();
    for (a, m) in ms.iter().enumerate() {
        let sv = m.clone().singular_values();
        let (max, min) = (sv.max(), sv.min());
        if max <= 0.0 || min <= 1e-12 * max {
            return Err(Error::SingularMatrix(a));
        }
        s = s.apply_local(a, &(m / C64::new(max, 0.0)))?;
    }
    Ok(s.norm_sqr() / state.norm_sqr())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UpperBound {
    pub nu_psi: f64,
    pub nu_phi: f64,
    pub raw: f64,
    pub capped: f64,
}

/// `min(ν(ψ)/ν(φ), 1)`.
pub fn upper_bound(spec: &MonotoneSpec, psi: &PureState, phi: &PureState) -> Result<UpperBound> {
    upper_bound_prepared(&spec.prepare(psi.dims())?, psi, phi)
}

pub fn upper_bound_prepared(m: &PreparedMonotone, psi: &PureState, phi: &PureState) -> Result<UpperBound> {
    let (a, b) = (m.evaluate(psi)?, m.evaluate(phi)?);
    ratio_bound(a, b)
}

fn ratio_bound(a: f64, b: f64) -> Result<UpperBound> {
    if b <= 1e-12 {
        return Err(if a > 1e-12 {
            Error::TargetUnentangled
        } else {
            Error::Indeterminate
        });
    }
    let raw = a / b;
    Ok(UpperBound {
        nu_psi: a,
        nu_phi: b,
        raw,
        capped: raw.min(1.0),
    })
}

/// `min_k ν̃_k(ψ)/ν̃_k(φ)` across `side | rest`, skipping `0/0`, capped at 1.
pub fn vidal_ratio(psi: &PureState, phi: &PureState, side: &[usize]) -> Result<f64> {
    let a = monotones::vidal_tail(&monotones::schmidt_spectrum(psi, side)?);
    let b = monotones::vidal_tail(&monotones::schmidt_spectrum(phi, side)?);
    let mut best = 1.0f64;
    for (&x, &y) in a.iter().zip(&b) {
        if y > 1e-14 {
            best = best.min(x / y);
        }
    }
    Ok(best)
}

/// Local instrument `{E_i}` with `Σ E_i† E_i = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausInstrument {
    party: usize,
    operators: Vec<CMatrix>,
}

impl KrausInstrument {
    /// Requires square operators of one size and completeness within 1e-10.
    pub fn new(party: usize, operators: Vec<CMatrix>) -> Result<Self> {
        let d = operators
            .first()
            .ok_or_else(|| Error::InvalidArgument("instrument needs an operator".into()))?
            .ncols();
        if operators.iter().any(|e| e.nrows() != d || e.ncols() != d) {
            return Err(Error::DimensionMismatch(format!("operators must all be {d}x{d}")));
        }
        let inst = Self { party, operators };
        let r = inst.completeness_residual();
        if r > 1e-10 {
            return Err(Error::InvalidArgument(format!("completeness residual {r:e}")));
        }
        Ok(inst)
    }

    pub fn party(&self) -> usize {
        self.party
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].ncols()
    }

    /// `‖Σ E_i† E_i − I‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim();
        let sum = self
            .operators
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, e| acc + e.adjoint() * e);
        linalg::frobenius(&(sum - CMatrix::identity(d, d)))
    }
}

/// Stacked `d × d` blocks of a Haar-random isometry `d → d·outcomes`.
pub fn random_instrument(party: usize, d: usize, outcomes: usize, seed: u64) -> Result<KrausInstrument> {
    let mut rng = linalg::rng(seed);
    random_instrument_with(party, d, outcomes, &mut rng)
}

fn random_instrument_with<R: Rng + ?Sized>(
    party: usize,
    d: usize,
    outcomes: usize,
    rng: &mut R,
) -> Result<KrausInstrument> {
    if d == 0 || outcomes == 0 {
        return Err(Error::InvalidArgument("dimension and outcome count must be positive".into()));
    }
    let v = linalg::haar_isometry(rng, d * outcomes, d);
    let ops = (0..outcomes).map(|i| v.rows(i * d, d).into_owned()).collect();
    KrausInstrument::new(party, ops)
}

/// Probabilities and normalized post-measurement states.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
    pruned_mass: f64,
}

impl Ensemble {
    /// Requires non-negative probabilities summing to 1 within 1e-10 and
    /// normalized members.
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if members.iter().any(|(p, s)| *p < 0.0 || !s.is_normalized()) || (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("not an ensemble (total probability {total})")));
        }
        Ok(Self {
            members,
            pruned_mass: 0.0,
        })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    /// Probability carried by dropped outcomes.
    pub fn pruned_mass(&self) -> f64 {
        self.pruned_mass
    }

    /// `Σ p_i f(ψ_i)`.
    pub fn average<F: FnMut(&PureState) -> Result<f64>>(&self, mut f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (p, s) in &self.members {
            acc += p * f(s)?;
        }
        Ok(acc)
    }
}

/// Applies every outcome of the instrument to a normalized state.
pub fn apply_instrument(state: &PureState, inst: &KrausInstrument) -> Result<Ensemble> {
    state.check_party(inst.party())?;
    if state.dims()[inst.party()] != inst.dim() {
        return Err(Error::DimensionMismatch(format!(
            "instrument acts on dimension {}, party {} has {}",
            inst.dim(),
            inst.party(),
            state.dims()[inst.party()]
        )));
    }
    let norm = state.norm_sqr();
    let mut total = 0.0;
    let mut pruned = 0.0;
    let mut members = Vec::new();
    for e in inst.operators() {
        let mut s = state.apply_local(inst.party(), e)?;
        let p = s.normalize() / norm;
        total += p;
        if p < PRUNE_TOL {
            pruned += p;
        } else {
            members.push((p, s));
        }
    }
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvariantViolation(format!("outcome probabilities sum to {total}")));
    }
    let kept: f64 = members.iter().map(|(p, _)| p).sum();
    for m in &mut members {
        m.0 /= kept;
    }
    let mut ens = Ensemble::new(members)?;
    ens.pruned_mass = pruned;
    Ok(ens)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzReport {
    pub trials: usize,
    /// Smallest `ν(ψ) − Σ p_i ν(ψ_i)` observed.
    pub worst_margin: f64,
    pub violations: usize,
    /// Derived seed of the worst trial when it is a violation.
    pub offending_seed: Option<u64>,
    pub mean_margin: f64,
    pub median_margin: f64,
    pub max_margin: f64,
    pub passed: bool,
}

/// Draws Haar-random states, a random party and a random instrument with
/// 2 to 4 outcomes per trial, and records `ν(ψ) − Σ p_i ν(ψ_i)`.
pub fn fuzz_monotonicity(spec: &MonotoneSpec, dims: &[usize], trials: usize, seed: u64) -> Result<FuzzReport> {
    let m = spec.prepare(dims)?;
    let mut margins = Vec::with_capacity(trials);
    let mut worst = (f64::INFINITY, 0u64);
    for t in 0..trials {
        let trial_seed = linalg::derive_seed(seed, t as u64);
        let mut rng = linalg::rng(trial_seed);
        let psi = PureState::random(dims, &mut rng);
        let party = rng.random_range(0..dims.len());
        let outcomes = rng.random_range(2..=4);
        let inst = random_instrument_with(party, dims[party], outcomes, &mut rng)?;
        let ens = apply_instrument(&psi, &inst)?;
        let margin = m.evaluate(&psi)? - ens.average(|s| m.evaluate(s))?;
        if margin < worst.0 {
            worst = (margin, trial_seed);
        }
        margins.push(margin);
    }
    let violations = margins.iter().filter(|&&x| x < -FUZZ_TOL).count();
    let mut sorted = margins.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len().max(1) as f64;
    Ok(FuzzReport {
        trials,
        worst_margin: worst.0,
        violations,
        offending_seed: (violations > 0).then_some(worst.1),
        mean_margin: sorted.iter().sum::<f64>() / n,
        median_margin: sorted.get(sorted.len() / 2).copied().unwrap_or(0.0),
        max_margin: sorted.last().copied().unwrap_or(0.0),
        passed: violations == 0,
    })
}

/// One α of the GHZ sweep. `p_n` follows the configured cycle sizes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub p_lower: f64,
    pub p_det: f64,
    pub p_vidal: f64,
    pub p_n: Vec<f64>,
}

impl SweepRow {
    pub fn upper_bounds(&self) -> impl Iterator<Item = f64> + '_ {
        [self.p_det, self.p_vidal].into_iter().chain(self.p_n.iter().copied())
    }

    /// Entries in `[0, 1 + 1e-9]` and the lower bound under every upper bound.
    pub fn check(&self) -> Result<()> {
        let mut all = std::iter::once(self.p_lower).chain(self.upper_bounds());
        if let Some(x) = all.find(|x| !(0.0..=1.0 + 1e-9).contains(x)) {
            return Err(Error::InvariantViolation(format!("alpha {}: entry {x} out of range", self.alpha)));
        }
        if let Some(u) = self.upper_bounds().find(|&u| self.p_lower > u + 1e-9) {
            return Err(Error::InvariantViolation(format!(
                "alpha {}: lower bound {} exceeds upper bound {u}",
                self.alpha, self.p_lower
            )));
        }
        Ok(())
    }
}

/// `steps` uniform points on `[min, max]`; a degenerate interval gives one point.
pub fn alpha_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        _ if min == max => vec![min],
        1 => vec![min],
        _ => (0..steps)
            .map(|i| min + (max - min) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// 81 points on `[−1, 1]`.
pub fn default_alpha_grid() -> Vec<f64> {
    alpha_grid(-1.0, 1.0, 81)
}

/// Bounds for `(2|000⟩+|111⟩)/√5 → exp(αK)^{⊗3}` at every grid point.
pub fn ghz_sweep(grid: &[f64], ns: &[usize]) -> Result<Vec<SweepRow>> {
    let psi = asymmetric_ghz();
    let monos = ns
        .iter()
        .map(|&n| {
            if n < 2 {
                return Err(Error::InvalidArgument(format!("cycle size {n} must be at least 2")));
            }
            MonotoneSpec::nu(n).prepare(psi.dims())
        })
        .collect::<Result<Vec<_>>>()?;
    grid.iter()
        .map(|&alpha| {
            if !alpha.is_finite() {
                return Err(Error::InvalidArgument(format!("alpha {alpha} is not finite")));
            }
            let ms = vec![exp_k(alpha); 3];
            let (phi, _) = slocc_apply(&psi, &ms)?;
            let sides = [vidal_ratio(&psi, &phi, &[0])?, vidal_ratio(&psi, &phi, &[1])?, vidal_ratio(&psi, &phi, &[2])?];
            if sides.iter().any(|s| (s - sides[0]).abs() > 1e-10) {
                return Err(Error::InvariantViolation(format!(
                    "alpha {alpha}: bipartitions disagree {sides:?}"
                )));
            }
            let row = SweepRow {
                alpha,
                p_lower: lower_bound(&psi, &ms)?,
                p_det: monotones::det_ratio(&psi, &ms)?.capped,
                p_vidal: sides[0],
                p_n: monos
                    .iter()
                    .map(|m| upper_bound_prepared(m, &psi, &phi).map(|u| u.capped))
                    .collect::<Result<_>>()?,
            };
            row.check()?;
            Ok(row)
        })
        .collect()
}

/// `Σ p_i Tr_party |ψ_i⟩⟨ψ_i|`, the quantity a unilocal instrument preserves.
pub fn averaged_complement(ens: &Ensemble, party: usize) -> Result<CMatrix> {
    let mut acc: Option<CMatrix> = None;
    for (p, s) in ens.members() {
        let rho = tensor::partial_trace(s, party)?;
        let term = rho.matrix() * C64::new(*p, 0.0);
        acc = Some(match acc {
            Some(a) => a + term,
            None => term,
        });
    }
    acc.ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))
}
