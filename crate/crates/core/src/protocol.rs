//! Explicit SEP maps and one-round LOCC protocols, POVM validation and branch simulation.
//!
//! Protocols are built in a role frame (party 1 measures, parties 2 and 3 correct) and
//! then relabeled onto the input's party order.

use rayon::prelude::*;

use crate::classify::{convertible_witness, pair_bit, sep_case_matches, support_pattern, ClassifyOptions, SepCase};
use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::pauli::{pauli, PauliCoords, PauliIndex};
use crate::scalar::{c, Real};
use crate::seed::SeedParams;
use crate::sep::{depolarize, ProbabilityVector};
use crate::state::{off_span_residual, positive_factor, span_factor, GenericState};
use crate::tensor::{apply3, kron3, Ket27, Op27};
use crate::tolerance::tolerance;

pub const COMPLETENESS_TOLERANCE: f64 = 1e-10;
pub const BRANCH_MATCH_TOLERANCE: f64 = 1e-8;
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-10;
/// Minimum eigenvalue of the trace-normalized target Gram factor accepted by the ε search.
pub const POSITIVITY_MARGIN: f64 = 1e-6;
pub const EPSILON_MIN: f64 = 1e-8;
pub const EPSILON_START: f64 = 0.5;
/// Branches with smaller Born probability are flagged as zero-probability.
pub const ZERO_PROBABILITY: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    SepCaseI,
    SepCaseII,
    /// Party 1 measures on `{0, ±w}` starting from `g¹_w ⊗ h²_w ⊗ h³_w|ψ⟩`.
    LoccReach,
    /// Party 1 measures nine outcomes on the seed; parties 2 and 3 trivial.
    LoccReachFromSeed,
    /// Seed → `I ⊗ h²_w ⊗ I` → `h₁ ⊗ h²_w ⊗ I`.
    LoccTwoStage,
    LoccConvert,
    /// Nine-outcome SEP map `√(p_k/r)(h S_k g⁻¹)^{⊗3}` from an arbitrary feasibility witness.
    SepWitness,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Construction::SepCaseI => "sep-case-i",
            Construction::SepCaseII => "sep-case-ii",
            Construction::LoccReach => "locc-reach",
            Construction::LoccReachFromSeed => "locc-reach-from-seed",
            Construction::LoccTwoStage => "locc-two-stage",
            Construction::LoccConvert => "locc-convert",
            Construction::SepWitness => "sep-witness",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            Construction::SepCaseI,
            Construction::SepCaseII,
            Construction::LoccReach,
            Construction::LoccReachFromSeed,
            Construction::LoccTwoStage,
            Construction::LoccConvert,
            Construction::SepWitness,
        ]
        .into_iter()
        .find(|c| c.name() == s)
    }
}

/// One product Kraus operator `f₁ ⊗ f₂ ⊗ f₃` with its outcome label.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<T> {
    pub label: PauliIndex,
    pub factors: [Mat3<T>; 3],
}

/// A round of product Kraus operators. With a measuring party the other factors are the
/// correction unitaries applied after the outcome is broadcast.
#[derive(Clone, Debug, PartialEq)]
pub struct Stage<T> {
    pub measuring_party: Option<usize>,
    pub outcomes: Vec<Outcome<T>>,
}

/// A SEP map is a single stage without a designated measuring party.
pub type KrausSet<T> = Stage<T>;

impl<T: Real> Stage<T> {
    /// `‖Σ_k M_k†M_k − I‖_F` on the full 27-dimensional space.
    pub fn completeness_residual(&self) -> T {
        let mut sum = Op27::zeros();
        for o in &self.outcomes {
            let [a, b, d] = o.factors.map(|f| f.adjoint() * f);
            sum = &sum + &kron3(&a, &b, &d);
        }
        sum.dist(&Op27::identity())
    }

    /// Completeness of the measuring party's POVM, `‖Σ_k M_k†M_k − I‖_F` on three dimensions.
    pub fn povm_residual(&self) -> Option<T> {
        let m = self.measuring_party?;
        let sum = self.outcomes.iter().fold(Mat3::zeros(), |acc, o| acc + o.factors[m].adjoint() * o.factors[m]);
        Some(sum.dist(&Mat3::identity()))
    }

    /// Largest `‖U†U − I‖_F` over correction factors.
    pub fn unitarity_residual(&self) -> T {
        let Some(m) = self.measuring_party else { return T::zero() };
        self.outcomes
            .iter()
            .flat_map(|o| (0..3).filter(move |&p| p != m).map(move |p| o.factors[p]))
            .map(|u| (u.adjoint() * u).dist(&Mat3::identity()))
            .fold(T::zero(), T::max)
    }

    fn relabeled(&self, perm: [usize; 3]) -> Self {
        Stage {
            measuring_party: self.measuring_party.map(|m| perm[m]),
            outcomes: self
                .outcomes
                .iter()
                .map(|o| {
                    let mut f = o.factors;
                    for q in 0..3 {
                        f[perm[q]] = o.factors[q];
                    }
                    Outcome { label: o.label, factors: f }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Protocol<T> {
    pub construction: Construction,
    pub stages: Vec<Stage<T>>,
    pub initial: GenericState<T>,
    pub target: GenericState<T>,
    /// Initial and target are LU-equivalent by construction.
    pub trivial: bool,
    /// Depolarization parameter of a conversion step.
    pub epsilon: Option<f64>,
    pub notes: Vec<String>,
}

fn inverse_perm(perm: [usize; 3]) -> [usize; 3] {
    let mut inv = [0; 3];
    for q in 0..3 {
        inv[perm[q]] = q;
    }
    inv
}

impl<T: Real> Protocol<T> {
    /// Maps a role-frame protocol (role `q` played by party `perm[q]`) back to party order.
    fn relabeled(self, perm: [usize; 3]) -> Self {
        if perm == [0, 1, 2] {
            return self;
        }
        let inv = inverse_perm(perm);
        let mut notes = self.notes;
        notes.push(format!("roles (1,2,3) played by parties ({},{},{})", perm[0] + 1, perm[1] + 1, perm[2] + 1));
        Protocol {
            construction: self.construction,
            stages: self.stages.iter().map(|s| s.relabeled(perm)).collect(),
            initial: self.initial.permuted(inv),
            target: self.target.permuted(inv),
            trivial: self.trivial,
            epsilon: self.epsilon,
            notes,
        }
    }

    pub fn branch_count(&self) -> usize {
        self.stages.iter().map(|s| s.outcomes.len()).product()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PovmReport {
    /// Largest 27-dimensional completeness residual over stages.
    pub completeness: f64,
    /// Largest measuring-party completeness residual, if any stage has a measuring party.
    pub povm: Option<f64>,
    pub unitarity: f64,
    pub passed: bool,
}

/// Completeness residuals of every stage; passes at `≤ 1e-10`.
pub fn validate_povm<T: Real>(stages: &[Stage<T>]) -> PovmReport {
    let completeness = stages.iter().map(|s| s.completeness_residual().as_f64()).fold(0.0, f64::max);
    let povm = stages.iter().filter_map(|s| s.povm_residual()).map(|r| r.as_f64()).reduce(f64::max);
    let unitarity = stages.iter().map(|s| s.unitarity_residual().as_f64()).fold(0.0, f64::max);
    let tol = T::tol(COMPLETENESS_TOLERANCE).as_f64();
    PovmReport {
        completeness,
        povm,
        unitarity,
        passed: completeness <= tol && povm.is_none_or(|r| r <= tol) && unitarity <= tol,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch<T> {
    /// Outcome label of each stage.
    pub labels: Vec<PauliIndex>,
    pub probability: T,
    /// Normalized post-measurement state (zero for zero-probability branches).
    pub output: Ket27<T>,
    /// Phase-aligned distance between the output and the target.
    pub residual: T,
    pub lu_match: bool,
    pub zero_probability: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchReport<T> {
    pub branches: Vec<Branch<T>>,
    pub probability_sum: T,
    pub all_match: bool,
    pub probabilities_ok: bool,
}

impl<T: Real> BranchReport<T> {
    pub fn deterministic(&self) -> bool {
        self.all_match && self.probabilities_ok
    }

    pub fn max_residual(&self) -> T {
        self.branches.iter().filter(|b| !b.zero_probability).map(|b| b.residual).fold(T::zero(), T::max)
    }
}

/// Runs every outcome sequence on `input` and compares each branch with `target`.
/// Zero-probability branches are kept in the report and do not count against the match.
pub fn simulate_branches<T: Real>(stages: &[Stage<T>], input: &Ket27<T>, target: &Ket27<T>) -> BranchReport<T> {
    let n0 = input.norm_sqr();
    let mut current: Vec<(Vec<PauliIndex>, Ket27<T>)> = vec![(Vec::new(), *input)];
    for stage in stages {
        current = current
            .par_iter()
            .flat_map_iter(|(labels, v)| {
                stage.outcomes.iter().map(move |o| {
                    let mut l = labels.clone();
                    l.push(o.label);
                    (l, apply3(&o.factors[0], &o.factors[1], &o.factors[2], v))
                })
            })
            .collect();
    }
    let tol = T::tol(BRANCH_MATCH_TOLERANCE);
    let branches: Vec<Branch<T>> = current
        .into_par_iter()
        .map(|(labels, v)| {
            let probability = v.norm_sqr() / n0;
            let zero_probability = probability.as_f64() < ZERO_PROBABILITY;
            if zero_probability {
                return Branch { labels, probability, output: Ket27::zeros(), residual: T::zero(), lu_match: true, zero_probability };
            }
            let output = v.normalized();
            let residual = output.phase_dist(target);
            Branch { labels, probability, output, residual, lu_match: residual <= tol, zero_probability }
        })
        .collect();
    let probability_sum = branches.iter().map(|b| b.probability).sum::<T>();
    BranchReport {
        all_match: branches.iter().all(|b| b.lu_match),
        probabilities_ok: (probability_sum - T::one()).abs() <= T::tol(PROBABILITY_SUM_TOLERANCE),
        probability_sum,
        branches,
    }
}

/// Simulates a protocol on its own initial state against its own target.
pub fn simulate<T: Real>(p: &Protocol<T>) -> BranchReport<T> {
    simulate_branches(&p.stages, &p.initial.assemble(), &p.target.assemble())
}

/// Unitary part `u` of the polar decomposition `g = u·√(g†g)`.
pub fn unitary_part<T: Real>(g: &Mat3<T>) -> Result<Mat3<T>> {
    let p = positive_factor(&(g.adjoint() * *g))?;
    let inv = p.inverse().ok_or(Error::Singular { party: 0, det: p.det().norm().as_f64() })?;
    Ok(*g * inv)
}

/// `√(3 / tr(h†h))`: rescales `h` so that `(1/9) Σ_k S_k†H S_k = I`.
fn unit_trace_scale<T: Real>(h: &Mat3<T>) -> T {
    (T::lit(3.0) / (h.adjoint() * *h).trace().re).sqrt()
}

fn span_labels(w: PauliIndex) -> [PauliIndex; 3] {
    [PauliIndex::ZERO, w, -w]
}

fn normalized_gram<T: Real>(h: &Mat3<T>) -> Mat3<T> {
    let g = h.adjoint() * *h;
    g.scale(T::one() / g.trace().re)
}

fn check_span<T: Real>(h: &Mat3<T>, w: PauliIndex, party: usize) -> Result<()> {
    let r = off_span_residual(&normalized_gram(h), w);
    if r > T::tol(tolerance()) {
        return Err(Error::SpanViolation { w: format!("{w} (party {})", party + 1), residual: r.as_f64() });
    }
    Ok(())
}

fn check_identity<T: Real>(h: &Mat3<T>, party: usize) -> Result<()> {
    let r = normalized_gram(h).dist(&Mat3::identity().scale(T::one() / T::lit(3.0)));
    if r > T::tol(tolerance()) {
        return Err(Error::Structure(format!("party {} factor is not proportional to a unitary (residual {:e})", party + 1, r.as_f64())));
    }
    Ok(())
}

/// Correction `u S_k u†` that commutes past a factor `h = u·P` with `P ∈ span{I, S_w, S_{−w}}`.
fn dressed_correction<T: Real>(u: &Mat3<T>, k: PauliIndex) -> Mat3<T> {
    *u * pauli::<T>(k) * u.adjoint()
}

/// Square-root factor `g¹_w` of `(1/3) Σ_{k∈{0,±w}} S_k† H₁ S_k`.
fn span_root<T: Real>(h1: &Mat3<T>, w: PauliIndex) -> Result<Mat3<T>> {
    let g1 = depolarize(&(h1.adjoint() * *h1), &ProbabilityVector::span_uniform(w));
    span_factor(&g1.hermitian_part(), w)
}

fn invert<T: Real>(m: &Mat3<T>, party: usize) -> Result<Mat3<T>> {
    m.inverse().ok_or(Error::Singular { party: party + 1, det: m.det().norm().as_f64() })
}

fn frac_sqrt3<T: Real>() -> T {
    T::one() / T::lit(3.0).sqrt()
}

/// `M_k = (1/3)(h₁ ⊗ h₂ ⊗ I) S_k^{⊗3}` over all nine `k`, acting on the seed.
///
/// Factors are rescaled so that the map is trace preserving when the supports of `h₁` and
/// `h₂` are disjoint. Overlapping supports produce a map whose completeness residual is
/// reported by [`validate_povm`].
pub fn sep_map_case_i<T: Real>(seed: SeedParams<T>, h1: Mat3<T>, h2: Mat3<T>) -> Result<Protocol<T>> {
    let target = GenericState::with_factors(seed, [h1, h2, Mat3::identity()])?;
    sep_case_i_role(&target)
}

fn sep_case_i_role<T: Real>(target: &GenericState<T>) -> Result<Protocol<T>> {
    let [h1, h2, h3] = target.g;
    check_identity(&h3, 2)?;
    let u3 = unitary_part(&h3)?;
    let (s1, s2) = (unit_trace_scale(&h1), unit_trace_scale(&h2));
    let third = T::one() / T::lit(3.0);
    let outcomes = PauliIndex::ALL
        .iter()
        .map(|&k| {
            let s = pauli::<T>(k);
            Outcome { label: k, factors: [h1.scale(s1 * third) * s, h2.scale(s2) * s, u3 * s] }
        })
        .collect();
    let trivial = [h1, h2].iter().all(|h| normalized_gram(h).dist(&Mat3::identity().scale(third)) <= T::tol(tolerance()));
    Ok(Protocol {
        construction: Construction::SepCaseI,
        stages: vec![Stage { measuring_party: None, outcomes }],
        initial: GenericState::seed_state(target.seed),
        target: *target,
        trivial,
        epsilon: None,
        notes: Vec::new(),
    })
}

/// `M_k = (1/√3)(h₁ ⊗ I ⊗ I) S_k^{⊗3} ((g¹_w)⁻¹ ⊗ I ⊗ I)` over `k ∈ {0, ±w}`, from the
/// initial state `g¹_w ⊗ h²_w ⊗ h³_w|ψ⟩`.
pub fn sep_map_case_ii<T: Real>(seed: SeedParams<T>, h1: Mat3<T>, w: PauliIndex, h2: Mat3<T>, h3: Mat3<T>) -> Result<Protocol<T>> {
    let target = GenericState::with_factors(seed, [h1, h2, h3])?;
    let mut p = span_protocol_role(&target, w, None)?;
    p.construction = Construction::SepCaseII;
    Ok(p)
}

/// The three-outcome construction shared by the case-(ii) SEP map and the one-round LOCC
/// protocol. `measuring` marks party 1 as the measuring party.
fn span_protocol_role<T: Real>(target: &GenericState<T>, w: PauliIndex, measuring: Option<usize>) -> Result<Protocol<T>> {
    if w.is_zero() {
        return Err(Error::Structure("case (ii) requires w != 0".into()));
    }
    let [h1, h2, h3] = target.g;
    check_span(&h2, w, 1)?;
    check_span(&h3, w, 2)?;
    let (u2, u3) = (unitary_part(&h2)?, unitary_part(&h3)?);
    let g1 = span_root(&h1, w)?;
    let g1_inv = invert(&g1, 0)?;
    let r = frac_sqrt3::<T>();
    let outcomes = span_labels(w)
        .into_iter()
        .map(|k| Outcome {
            label: k,
            factors: [(h1 * pauli::<T>(k) * g1_inv).scale(r), dressed_correction(&u2, k), dressed_correction(&u3, k)],
        })
        .collect();
    let trivial = off_span_residual(&normalized_gram(&h1), w) <= T::tol(tolerance());
    let mut notes = Vec::new();
    if trivial {
        notes.push("h1 lies in span{I, S_w, S_-w}: initial and target are LU-equivalent".into());
    }
    Ok(Protocol {
        construction: Construction::SepCaseII,
        stages: vec![Stage { measuring_party: measuring, outcomes }],
        initial: GenericState::with_factors(target.seed, [g1, h2, h3])?,
        target: *target,
        trivial,
        epsilon: None,
        notes,
    })
}

/// SEP map from `initial` to `target` realizing a witness `p` of the feasibility equation.
///
/// Fails with [`Error::Structure`] when `p` does not reproduce the initial operator up to the
/// completeness tolerance.
pub fn sep_map_from_witness<T: Real>(initial: &GenericState<T>, target: &GenericState<T>, p: &ProbabilityVector<T>) -> Result<Protocol<T>> {
    let seed = crate::state::same_seed(&initial.seed, &target.seed)?;
    let raw = |m: &Mat3<T>| (m.adjoint() * *m).hermitian_part();
    let g_op = kron3(&raw(&initial.g[0]), &raw(&initial.g[1]), &raw(&initial.g[2]));
    let mut sum = Op27::zeros();
    for k in PauliIndex::ALL {
        let pk = p.get(k);
        if pk > T::zero() {
            let s = pauli::<T>(k);
            let c = |m: &Mat3<T>| s.adjoint() * raw(m) * s;
            sum = &sum + &kron3(&c(&target.g[0]), &c(&target.g[1]), &c(&target.g[2])).scale(pk);
        }
    }
    let r = sum.inner_re(&g_op) / g_op.inner_re(&g_op);
    if !(r > T::zero()) {
        return Err(Error::Structure("witness does not reproduce the initial operator".into()));
    }
    let inv: [Mat3<T>; 3] = [invert(&initial.g[0], 0)?, invert(&initial.g[1], 1)?, invert(&initial.g[2], 2)?];
    let outcomes: Vec<Outcome<T>> = PauliIndex::ALL
        .iter()
        .filter(|k| p.get(**k) > T::zero())
        .map(|&k| {
            let s = pauli::<T>(k);
            let f = |i: usize| target.g[i] * s * inv[i];
            Outcome { label: k, factors: [f(0).scale((p.get(k) / r).sqrt()), f(1), f(2)] }
        })
        .collect();
    let stage = Stage { measuring_party: None, outcomes };
    let residual = stage.completeness_residual();
    if !(residual <= T::tol(COMPLETENESS_TOLERANCE).sqrt()) {
        return Err(Error::Structure(format!("witness does not reproduce the initial operator (completeness residual {:e})", residual.as_f64())));
    }
    let trivial = crate::state::lu_equivalent(initial, target)?;
    Ok(Protocol {
        construction: Construction::SepWitness,
        stages: vec![stage],
        initial: GenericState::with_factors(seed, initial.g)?,
        target: GenericState::with_factors(seed, target.g)?,
        trivial,
        epsilon: None,
        notes: vec![format!("r = {:e}", r.as_f64())],
    })
}

/// SEP map reaching `target` non-trivially, chosen from its structural case.
pub fn sep_map_for_target<T: Real>(target: &GenericState<T>, opts: &ClassifyOptions) -> Result<Protocol<T>> {
    sep_map_for_case(target, None, opts)
}

/// Like [`sep_map_for_target`], restricted to matches of `case` when given.
pub fn sep_map_for_case<T: Real>(target: &GenericState<T>, case: Option<SepCase>, opts: &ClassifyOptions) -> Result<Protocol<T>> {
    let pattern = support_pattern(&target.gram(), opts);
    let m = sep_case_matches(&pattern, opts)
        .into_iter()
        .find(|m| case.is_none_or(|c| m.case == c))
        .ok_or_else(|| Error::Structure("target is not SEP-reachable from an LU-inequivalent state".into()))?;
    let role = target.permuted(m.permutation);
    let p = match m.case {
        SepCase::I => sep_case_i_role(&role)?,
        SepCase::II => {
            let mut p = span_protocol_role(&role, m.w.expect("case (ii) carries w"), None)?;
            p.construction = Construction::SepCaseII;
            p
        }
    };
    Ok(p.relabeled(m.permutation))
}

/// One-round LOCC protocol reaching `target` from an LU-inequivalent state.
///
/// Targets with both confined factors proportional to unitaries are reached from the seed
/// with nine outcomes; targets `h₁ ⊗ h²_w ⊗ I` with `h₁` supported off `{±w}` use the
/// two-stage composition from the seed; all others start from `g¹_w ⊗ h²_w ⊗ h³_w|ψ⟩`.
pub fn locc_protocol_reach<T: Real>(target: &GenericState<T>, opts: &ClassifyOptions) -> Result<Protocol<T>> {
    let pattern = support_pattern(&target.gram(), opts);
    let m = sep_case_matches(&pattern, opts)
        .into_iter()
        .find(|m| m.case == SepCase::II)
        .ok_or_else(|| Error::Structure("target is not LOCC-reachable from an LU-inequivalent state".into()))?;
    let perm = m.permutation;
    let w = m.w.expect("case (ii) carries w");
    let role = target.permuted(perm);
    let [s1, s2, s3] = [pattern.pairs[perm[0]], pattern.pairs[perm[1]], pattern.pairs[perm[2]]];
    let p = if s2 == 0 && s3 == 0 {
        reach_from_seed_role(&role)?
    } else if (s2 == 0) != (s3 == 0) && s1 & pair_bit(w) == 0 {
        two_stage_role(&role, w, if s2 != 0 { 1 } else { 2 })?
    } else {
        let mut p = span_protocol_role(&role, w, Some(0))?;
        p.construction = Construction::LoccReach;
        p
    };
    Ok(p.relabeled(perm))
}

/// Party 1 measures `M_k = (1/3) h₁ S_k` on the seed; parties 2 and 3 apply `S_k`.
fn reach_from_seed_role<T: Real>(target: &GenericState<T>) -> Result<Protocol<T>> {
    let [h1, h2, h3] = target.g;
    check_identity(&h2, 1)?;
    check_identity(&h3, 2)?;
    let (u2, u3) = (unitary_part(&h2)?, unitary_part(&h3)?);
    let s1 = unit_trace_scale(&h1) / T::lit(3.0);
    let outcomes = PauliIndex::ALL
        .iter()
        .map(|&k| {
            let s = pauli::<T>(k);
            Outcome { label: k, factors: [h1.scale(s1) * s, u2 * s, u3 * s] }
        })
        .collect();
    Ok(Protocol {
        construction: Construction::LoccReachFromSeed,
        stages: vec![Stage { measuring_party: Some(0), outcomes }],
        initial: GenericState::seed_state(target.seed),
        target: *target,
        trivial: false,
        epsilon: None,
        notes: Vec::new(),
    })
}

/// Role `r` (confined to `{±w}`) measures `(1/3) h_r S_k` on the seed, then party 1 runs the
/// three-outcome protocol on `I ⊗ h_r ⊗ I|ψ⟩`.
fn two_stage_role<T: Real>(target: &GenericState<T>, w: PauliIndex, r: usize) -> Result<Protocol<T>> {
    let o = 3 - r;
    let h = target.g;
    check_span(&h[r], w, r)?;
    check_identity(&h[o], o)?;
    let (ur, uo) = (unitary_part(&h[r])?, unitary_part(&h[o])?);
    let sr = unit_trace_scale(&h[r]) / T::lit(3.0);
    let first = PauliIndex::ALL
        .iter()
        .map(|&k| {
            let s = pauli::<T>(k);
            let mut factors = [s; 3];
            factors[r] = h[r].scale(sr) * s;
            factors[o] = uo * s;
            Outcome { label: k, factors }
        })
        .collect();
    let g1 = span_root(&h[0], w)?;
    let g1_inv = invert(&g1, 0)?;
    let q = frac_sqrt3::<T>();
    let second = span_labels(w)
        .into_iter()
        .map(|k| {
            let mut factors = [Mat3::identity(); 3];
            factors[0] = (h[0] * pauli::<T>(k) * g1_inv).scale(q);
            factors[r] = dressed_correction(&ur, k);
            factors[o] = dressed_correction(&uo, k);
            Outcome { label: k, factors }
        })
        .collect();
    Ok(Protocol {
        construction: Construction::LoccTwoStage,
        stages: vec![Stage { measuring_party: Some(r), outcomes: first }, Stage { measuring_party: Some(0), outcomes: second }],
        initial: GenericState::seed_state(target.seed),
        target: *target,
        trivial: false,
        epsilon: None,
        notes: Vec::new(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Epsilon {
    /// Halve from 1/2 until the target factor is positive with margin.
    Auto,
    Fixed(f64),
}

fn first_other_pair(w: PauliIndex) -> PauliIndex {
    *PauliIndex::PAIRS.iter().find(|u| **u != w && **u != -w).expect("four pairs")
}

fn target_gram<T: Real>(g1: &Mat3<T>, w: PauliIndex, in_span: bool, eps: T) -> Mat3<T> {
    if in_span {
        let u = first_other_pair(w);
        let s = pauli::<T>(u);
        let bump = (s + s.adjoint()).scale(eps * g1.trace().re / T::lit(3.0));
        return (*g1 + bump).hermitian_part();
    }
    let coords = PauliCoords::of(g1);
    let mut h = coords;
    let factor = T::one() / (T::one() - eps);
    for u in PauliIndex::nonzero().filter(|u| *u != w && *u != -w) {
        h.set(u, coords.get(u) * factor);
    }
    h.to_matrix().hermitian_part()
}

fn positive_with_margin<T: Real>(h: &Mat3<T>) -> bool {
    let tr = h.trace().re;
    tr > T::zero() && (h.min_eigenvalue() / tr).as_f64() >= POSITIVITY_MARGIN
}

/// One conversion step `g₁ ⊗ g²_w ⊗ g³_w → h₁ ⊗ g²_w ⊗ g³_w`.
///
/// With `g₁` outside `span{I, S_w, S_{−w}}` the weights are `p₀ = 1 − 2ε/3`, `p_{±w} = ε/3`
/// and `h_u = g_u/(1−ε)` off `{0, ±w}`. With `g₁` inside the span the weights are uniform
/// on `{0, ±w}` and the target Gram factor is `G₁ + ε·(tr G₁/3)(S_u + S_u†)` for a pair
/// `u ≠ ±w`, which the uniform weights average away.
pub fn locc_convert_step<T: Real>(
    g: &GenericState<T>,
    w: Option<PauliIndex>,
    eps: Epsilon,
    opts: &ClassifyOptions,
) -> Result<(Protocol<T>, GenericState<T>)> {
    let pattern = support_pattern(&g.gram(), opts);
    let (perm, w) = match w {
        Some(w) => {
            if w.is_zero() {
                return Err(Error::Structure("conversion requires w != 0".into()));
            }
            let bit = pair_bit(w);
            let perm = opts
                .permutations()
                .iter()
                .copied()
                .find(|p| (pattern.pairs[p[1]] | pattern.pairs[p[2]]) & !bit == 0)
                .ok_or_else(|| Error::Structure(format!("no two parties are confined to span{{I, S_w, S_-w}} for w = {w}")))?;
            (perm, w)
        }
        None => {
            let (perm, w) = convertible_witness(&pattern, opts)
                .ok_or_else(|| Error::Structure("state is not LOCC-convertible".into()))?;
            (perm, w.unwrap_or(PauliIndex::PAIRS[0]))
        }
    };
    let role = g.permuted(perm);
    let [g1, g2, g3] = role.g;
    check_span(&g2, w, 1)?;
    check_span(&g3, w, 2)?;
    let gram1 = (g1.adjoint() * g1).hermitian_part();
    let in_span = off_span_residual(&normalized_gram(&g1), w) <= T::tol(tolerance());

    let eps = match eps {
        Epsilon::Fixed(e) => {
            if !(0.0..1.0).contains(&e) {
                return Err(Error::Input(format!("epsilon {e} outside [0, 1)")));
            }
            let h = target_gram(&gram1, w, in_span, T::lit(e));
            if !positive_with_margin(&h) {
                return Err(Error::NotPositive { min_eig: (h.min_eigenvalue() / h.trace().re).as_f64() });
            }
            e
        }
        Epsilon::Auto => {
            let mut e = EPSILON_START;
            loop {
                if e < EPSILON_MIN {
                    return Err(Error::NoEpsilon { eps_min: EPSILON_MIN });
                }
                if positive_with_margin(&target_gram(&gram1, w, in_span, T::lit(e))) {
                    break e;
                }
                e /= 2.0;
            }
        }
    };
    let h_gram = target_gram(&gram1, w, in_span, T::lit(eps));
    let u1 = unitary_part(&g1)?;
    let h1 = u1 * positive_factor(&h_gram)?;
    let p = if in_span { ProbabilityVector::span_uniform(w) } else { ProbabilityVector::span_weighted(w, T::lit(eps / 3.0)) };
    let g1_inv = invert(&g1, 0)?;
    let (u2, u3) = (unitary_part(&g2)?, unitary_part(&g3)?);
    let outcomes = span_labels(w)
        .into_iter()
        .map(|k| Outcome {
            label: k,
            factors: [(h1 * pauli::<T>(k) * g1_inv).scale(p.get(k).sqrt()), dressed_correction(&u2, k), dressed_correction(&u3, k)],
        })
        .collect();
    let target = GenericState::with_factors(role.seed, [h1, g2, g3])?;
    let mut notes = vec![format!("epsilon = {eps:e}")];
    if in_span {
        notes.push("g1 lies in span{I, S_w, S_-w}: uniform weights on {0, w, -w}".into());
    }
    let protocol = Protocol {
        construction: Construction::LoccConvert,
        stages: vec![Stage { measuring_party: Some(0), outcomes }],
        initial: role,
        target,
        trivial: eps == 0.0,
        epsilon: Some(eps),
        notes,
    }
    .relabeled(perm);
    let target = protocol.target;
    Ok((protocol, target))
}

/// Arbitrary helper for tests and generators: a Hermitian `I/3 + Σ (c_u S_u + h.c.)`.
pub fn span_hermitian<T: Real>(terms: &[(PauliIndex, f64, f64)]) -> Mat3<T> {
    let mut m = Mat3::identity().scale(T::one() / T::lit(3.0));
    for &(k, re, im) in terms {
        let t = pauli::<T>(k).scale_c(c(re, im));
        m = m + t + t.adjoint();
    }
    m
}
