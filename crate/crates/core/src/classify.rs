//! Structural classification from coordinate supports: SEP/LOCC reachability,
//! LOCC convertibility, membership in the maximally entangled set and isolation.

use crate::pauli::{PauliCoords, PauliIndex};
use crate::scalar::Real;
use crate::state::{GenericState, GramTriple};
use crate::tolerance::tolerance;

/// All six party permutations; entry `q` names the original party acting in role `q`.
pub const ALL_PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];

/// The three cyclic permutations.
pub const CYCLIC_PERMUTATIONS: [[usize; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];

#[derive(Clone, Copy, Debug, Default)]
pub struct ClassifyOptions {
    /// Relative support threshold; `None` uses the global tolerance.
    pub tolerance: Option<f64>,
    /// Restrict "up to permutations" to cyclic relabelings.
    pub cyclic_only: bool,
}


impl ClassifyOptions {
    pub fn tau(&self) -> f64 {
        self.tolerance.unwrap_or_else(tolerance)
    }

    pub fn permutations(&self) -> &'static [[usize; 3]] {
        if self.cyclic_only {
            &CYCLIC_PERMUTATIONS
        } else {
            &ALL_PERMUTATIONS
        }
    }
}

/// Bit set over the four pairs `{±k}` (bit `i` ↔ [`PauliIndex::PAIRS`]`[i]`).
pub type PairSet = u8;

#[derive(Clone, Debug, PartialEq)]
pub struct SupportPattern {
    /// Non-identity indices with non-vanishing coordinate, per party, canonical order.
    pub supports: [Vec<PauliIndex>; 3],
    /// The same supports as sets of pairs.
    pub pairs: [PairSet; 3],
    /// Some coordinate lies in `(τ/10, τ]`, or closure under negation had to be repaired.
    pub near_boundary: bool,
    pub warnings: Vec<String>,
}

impl SupportPattern {
    pub fn pair_count(&self, party: usize) -> u32 {
        self.pairs[party].count_ones()
    }

    pub fn is_empty(&self, party: usize) -> bool {
        self.pairs[party] == 0
    }
}

pub fn pair_bit(k: PauliIndex) -> PairSet {
    k.pair().map_or(0, |i| 1 << i)
}

pub fn pair_of_bit(bit: PairSet) -> Option<PauliIndex> {
    (0..4).find(|i| bit == 1 << i).map(|i| PauliIndex::PAIRS[i])
}

/// Thresholded supports of a Gram triple.
pub fn support_pattern<T: Real>(h: &GramTriple<T>, opts: &ClassifyOptions) -> SupportPattern {
    let tau = T::tol(opts.tau()).as_f64();
    let scale = h.coords.iter().flat_map(|c| c.c.iter()).map(|z| z.norm().as_f64()).fold(0.0, f64::max);
    let thr = tau * scale;
    let mut warnings = Vec::new();
    let mut near = false;
    let mut supports: [Vec<PauliIndex>; 3] = Default::default();
    let mut pairs = [0u8; 3];
    for (party, c) in h.coords.iter().enumerate() {
        let mag = |k: PauliIndex| c.get(k).norm().as_f64();
        for (pi, k) in PauliIndex::PAIRS.iter().enumerate() {
            let (a, b) = (mag(*k), mag(-*k));
            for v in [a, b] {
                if v > thr / 10.0 && v <= thr {
                    near = true;
                    warnings.push(format!("party {} coordinate {} magnitude {v:e} is near the support threshold {thr:e}", party + 1, k));
                }
            }
            let include = match (a > thr, b > thr) {
                (true, true) => true,
                (false, false) => false,
                _ => {
                    near = true;
                    let keep = a.min(b) > thr / 10.0;
                    warnings.push(format!(
                        "party {} pair ±{} only partly above threshold ({a:e}, {b:e}); {}",
                        party + 1,
                        k,
                        if keep { "both included" } else { "both excluded" }
                    ));
                    keep
                }
            };
            if include {
                pairs[party] |= 1 << pi;
            }
        }
        supports[party] = PauliIndex::nonzero().filter(|k| pairs[party] & pair_bit(*k) != 0).collect();
    }
    SupportPattern { supports, pairs, near_boundary: near, warnings }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SepCase {
    /// Third role proportional to the identity, first two with disjoint supports.
    I,
    /// Second and third roles confined to one pair `{±w}`, first role not.
    II,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseMatch {
    pub case: SepCase,
    /// Original party index acting in each role.
    pub permutation: [usize; 3],
    /// Pair shared by roles 2 and 3 in case (ii).
    pub w: Option<PauliIndex>,
    /// The relabeling is a transposition, which exchanges `b` and `c` in the seed.
    pub seed_swapped: bool,
}

fn permute_pairs(p: &SupportPattern, perm: [usize; 3]) -> [PairSet; 3] {
    [p.pairs[perm[0]], p.pairs[perm[1]], p.pairs[perm[2]]]
}

fn odd(perm: [usize; 3]) -> bool {
    ALL_PERMUTATIONS[3..].contains(&perm)
}

/// Pair `{±w}` containing the union of two supports, if the union spans at most one pair.
/// For an empty union the first pair not containing `avoid` is returned.
fn common_pair(x: PairSet, y: PairSet, avoid: PairSet) -> Option<PauliIndex> {
    let u = x | y;
    match u.count_ones() {
        0 => (0..4).find(|i| avoid & !(1 << i) != 0).map(|i| PauliIndex::PAIRS[i]),
        1 => pair_of_bit(u),
        _ => None,
    }
}

/// Every permutation/case combination under which the SEP-reachability structure holds.
pub fn sep_case_matches(p: &SupportPattern, opts: &ClassifyOptions) -> Vec<CaseMatch> {
    let mut out: Vec<CaseMatch> = Vec::new();
    for &perm in opts.permutations() {
        let [s1, s2, s3] = permute_pairs(p, perm);
        if s3 == 0 && s1 & s2 == 0 && (s1 | s2) != 0 {
            // roles 1 and 2 are interchangeable; keep one representative per third party
            if !out.iter().any(|m| m.case == SepCase::I && m.permutation[2] == perm[2]) {
                out.push(CaseMatch { case: SepCase::I, permutation: perm, w: None, seed_swapped: odd(perm) });
            }
        }
        if let Some(w) = common_pair(s2, s3, s1) {
            if s1 & !pair_bit(w) != 0 && !out.iter().any(|m| m.case == SepCase::II && m.permutation[0] == perm[0] && m.w == Some(w)) {
                out.push(CaseMatch { case: SepCase::II, permutation: perm, w: Some(w), seed_swapped: odd(perm) });
            }
        }
    }
    out
}

pub fn is_sep_reachable<T: Real>(h: &GramTriple<T>, opts: &ClassifyOptions) -> (bool, Vec<CaseMatch>) {
    let m = sep_case_matches(&support_pattern(h, opts), opts);
    (!m.is_empty(), m)
}

/// Permutation under which roles 1 and 2 carry two pairs each that tile all four pairs
/// and role 3 is proportional to the identity.
pub fn lemma3_permutation(p: &SupportPattern, opts: &ClassifyOptions) -> Option<[usize; 3]> {
    opts.permutations().iter().copied().find(|&perm| {
        let [s1, s2, s3] = permute_pairs(p, perm);
        s3 == 0 && s1.count_ones() == 2 && s2.count_ones() == 2 && s1 & s2 == 0
    })
}

pub fn is_lemma3_family<T: Real>(h: &GramTriple<T>, opts: &ClassifyOptions) -> bool {
    lemma3_permutation(&support_pattern(h, opts), opts).is_some()
}

pub fn is_locc_reachable<T: Real>(h: &GramTriple<T>, opts: &ClassifyOptions) -> bool {
    sep_case_matches(&support_pattern(h, opts), opts).iter().any(|m| m.case == SepCase::II)
}

/// Permutation and pair `w` under which roles 2 and 3 are confined to `span{I, S_w, S_{−w}}`.
/// `w = None` means both are proportional to the identity.
pub fn convertible_witness(p: &SupportPattern, opts: &ClassifyOptions) -> Option<([usize; 3], Option<PauliIndex>)> {
    for &perm in opts.permutations() {
        let [_, s2, s3] = permute_pairs(p, perm);
        let u = s2 | s3;
        match u.count_ones() {
            0 => return Some((perm, None)),
            1 => return Some((perm, pair_of_bit(u))),
            _ => {}
        }
    }
    None
}

pub fn is_locc_convertible<T: Real>(g: &GramTriple<T>, opts: &ClassifyOptions) -> bool {
    convertible_witness(&support_pattern(g, opts), opts).is_some()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub sep_reachable: bool,
    pub sep_cases: Vec<CaseMatch>,
    pub locc_reachable: bool,
    pub sep_only: bool,
    pub lemma3_family: bool,
    pub locc_convertible: bool,
    /// Permutation and pair realizing convertibility.
    pub convertible_via: Option<([usize; 3], Option<PauliIndex>)>,
    pub in_mes: bool,
    pub isolated: bool,
    pub support: SupportPattern,
    pub warnings: Vec<String>,
}

impl Classification {
    /// The implication lattice every classification must satisfy.
    pub fn invariants_hold(&self) -> bool {
        (!self.locc_reachable || self.sep_reachable)
            && (self.sep_only == (self.sep_reachable && !self.locc_reachable))
            && (self.in_mes == !self.locc_reachable)
            && (self.isolated == (self.in_mes && !self.locc_convertible))
            && (!self.lemma3_family || self.sep_only)
    }
}

pub fn classify<T: Real>(h: &GramTriple<T>, opts: &ClassifyOptions) -> Classification {
    let support = support_pattern(h, opts);
    let sep_cases = sep_case_matches(&support, opts);
    let sep_reachable = !sep_cases.is_empty();
    let locc_reachable = sep_cases.iter().any(|m| m.case == SepCase::II);
    let convertible_via = convertible_witness(&support, opts);
    let locc_convertible = convertible_via.is_some();
    let in_mes = !locc_reachable;
    let mut warnings = support.warnings.clone();
    if support.near_boundary {
        warnings.push("classification depends on coordinates near the support threshold".into());
    }
    Classification {
        sep_reachable,
        locc_reachable,
        sep_only: sep_reachable && !locc_reachable,
        lemma3_family: lemma3_permutation(&support, opts).is_some(),
        locc_convertible,
        convertible_via,
        in_mes,
        isolated: in_mes && !locc_convertible,
        sep_cases,
        support,
        warnings,
    }
}

pub fn classify_state<T: Real>(s: &GenericState<T>, opts: &ClassifyOptions) -> Classification {
    classify(&s.gram(), opts)
}

/// Support of one coordinate vector (non-identity indices above `thr`).
pub fn coord_support<T: Real>(c: &PauliCoords<T>, thr: f64) -> Vec<PauliIndex> {
    PauliIndex::nonzero().filter(|k| c.get(*k).norm().as_f64() > thr).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat3;
    use crate::pauli::pauli;
    use crate::scalar::{c, C};

    fn span_herm(pairs: &[(PauliIndex, C<f64>)]) -> Mat3<f64> {
        let mut m = Mat3::identity().scale(1.0 / 3.0);
        for (k, z) in pairs {
            let t = pauli::<f64>(*k).scale_c(*z);
            m = m + t + t.adjoint();
        }
        m
    }

    fn dense() -> Mat3<f64> {
        let a = Mat3::from_fn(|i, j| c(0.3 * i as f64 - 0.2 * j as f64 + 0.1, 0.17 * (i * j) as f64 - 0.05));
        a.adjoint() * a + Mat3::identity().scale(0.3)
    }

    fn x() -> PauliIndex {
        PauliIndex::new(1, 0)
    }
    fn z() -> PauliIndex {
        PauliIndex::new(0, 1)
    }

    #[test]
    fn support_examples() {
        let o = ClassifyOptions::default();
        let p = support_pattern(&GramTriple::<f64>::seed(), &o);
        assert!(p.supports.iter().all(|s| s.is_empty()));
        let h = GramTriple::from_grams([span_herm(&[(x(), c(0.05, 0.01))]), Mat3::identity(), Mat3::identity()]);
        let p = support_pattern(&h, &o);
        assert_eq!(p.supports[0], vec![x(), -x()]);
        let p = support_pattern(&GramTriple::from_grams([dense(), dense(), dense()]), &o);
        assert!(p.supports.iter().all(|s| s.len() == 8));
        assert!(!p.near_boundary);
    }

    #[test]
    fn near_boundary_flagged() {
        let o = ClassifyOptions::default();
        let h = GramTriple::from_grams([span_herm(&[(x(), c(1e-10, 0.0))]), Mat3::identity(), Mat3::identity()]);
        let p = support_pattern(&h, &o);
        assert!(p.near_boundary);
        assert!(!p.warnings.is_empty());
    }

    #[test]
    fn sep_reachable_examples() {
        let o = ClassifyOptions::default();
        let h = GramTriple::from_grams([span_herm(&[(x(), c(0.05, 0.01))]), span_herm(&[(z(), c(0.02, 0.03))]), Mat3::identity()]);
        let (r, m) = is_sep_reachable(&h, &o);
        assert!(r);
        assert!(m.iter().any(|m| m.case == SepCase::I));
        let w = PauliIndex::new(1, 1);
        let h = GramTriple::from_grams([dense(), span_herm(&[(w, c(0.05, 0.01))]), span_herm(&[(w, c(-0.03, 0.02))])]);
        let (r, m) = is_sep_reachable(&h, &o);
        assert!(r);
        assert!(m.iter().any(|m| m.case == SepCase::II && m.w == Some(w) && m.permutation[0] == 0));
        assert!(!is_sep_reachable(&GramTriple::<f64>::seed(), &o).0);
    }

    #[test]
    fn two_pair_family_examples() {
        let o = ClassifyOptions::default();
        let h = GramTriple::from_grams([
            span_herm(&[(x(), c(0.05, 0.01)), (z(), c(0.02, -0.03))]),
            span_herm(&[(PauliIndex::new(1, 1), c(0.02, 0.03)), (PauliIndex::new(2, 1), c(-0.04, 0.01))]),
            Mat3::identity(),
        ]);
        assert!(is_lemma3_family(&h, &o));
        let cl = classify(&h, &o);
        assert!(cl.sep_only && cl.in_mes && !cl.locc_reachable);
        assert!(cl.invariants_hold());
        let case_i = GramTriple::from_grams([span_herm(&[(x(), c(0.05, 0.01))]), span_herm(&[(z(), c(0.02, 0.03))]), Mat3::identity()]);
        assert!(!is_lemma3_family(&case_i, &o));
        assert!(!is_lemma3_family(&GramTriple::from_grams([dense(), Mat3::identity(), Mat3::identity()]), &o));
    }

    #[test]
    fn locc_examples() {
        let o = ClassifyOptions::default();
        let w = PauliIndex::new(0, 1);
        let h = GramTriple::from_grams([dense(), span_herm(&[(w, c(0.05, 0.01))]), span_herm(&[(w, c(-0.03, 0.02))])]);
        assert!(is_locc_reachable(&h, &o));
        assert!(!is_locc_reachable(&GramTriple::<f64>::seed(), &o));
        assert!(is_locc_convertible(&h, &o));
        let d = GramTriple::from_grams([dense(), dense(), dense()]);
        assert!(!is_locc_convertible(&d, &o));
        assert!(is_locc_convertible(&GramTriple::<f64>::seed(), &o));
    }

    #[test]
    fn classify_examples() {
        let o = ClassifyOptions::default();
        let d = classify(&GramTriple::from_grams([dense(), dense(), dense()]), &o);
        assert!(d.in_mes && d.isolated && !d.sep_reachable);
        let w = PauliIndex::new(2, 1);
        let all_w = GramTriple::from_grams([
            span_herm(&[(w, c(0.05, 0.01))]),
            span_herm(&[(w, c(0.02, 0.01))]),
            span_herm(&[(w, c(-0.03, 0.02))]),
        ]);
        let cl = classify(&all_w, &o);
        assert!(cl.in_mes && cl.locc_convertible && !cl.isolated);
        let seed = classify(&GramTriple::<f64>::seed(), &o);
        assert!(seed.in_mes && seed.locc_convertible && !seed.isolated);
        for cl in [d, cl, seed] {
            assert!(cl.invariants_hold());
        }
    }

    #[test]
    fn permutation_robust() {
        let w = PauliIndex::new(1, 1);
        let h = GramTriple::from_grams([dense(), span_herm(&[(w, c(0.05, 0.01))]), span_herm(&[(w, c(-0.03, 0.02))])]);
        for cyclic_only in [false, true] {
            let o = ClassifyOptions { tolerance: None, cyclic_only };
            let base = classify(&h, &o);
            for perm in ALL_PERMUTATIONS {
                let cl = classify(&h.permuted(perm), &o);
                assert_eq!(
                    (cl.sep_reachable, cl.locc_reachable, cl.locc_convertible, cl.in_mes, cl.isolated),
                    (base.sep_reachable, base.locc_reachable, base.locc_convertible, base.in_mes, base.isolated)
                );
            }
        }
    }

    #[test]
    fn overlapping_cases_reported() {
        // h1 in span{I, X, X²} with the other parties trivial satisfies both cases
        let h = GramTriple::from_grams([span_herm(&[(x(), c(0.05, 0.01))]), Mat3::identity(), Mat3::identity()]);
        let (_, m) = is_sep_reachable(&h, &ClassifyOptions::default());
        assert!(m.iter().any(|m| m.case == SepCase::I));
        assert!(m.iter().any(|m| m.case == SepCase::II));
    }

    #[test]
    fn coord_support_helper() {
        let h = GramTriple::from_grams([span_herm(&[(x(), c(0.05, 0.01))]), Mat3::identity(), Mat3::identity()]);
        assert_eq!(coord_support(&h.coords[0], 1e-9), vec![x(), -x()]);
    }
}
