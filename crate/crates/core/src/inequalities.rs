//! Subadditivity and strong subadditivity verdicts for placed states,
//! permutation scans, and data-described grouping inequalities.
//!
//! Every check is oriented `lhs <= rhs` and reports `gap = rhs - lhs`:
//!
//! * subadditivity: `H(1,2) <= H(1) + H(2)`
//! * strong subadditivity: `H(1,2,3) + H(2) <= H(1,2) + H(2,3)`
//!
//! with the joint object obtained by embedding the state through an
//! [`IndexPlacement`]. Grouping specs describe the same inequalities (or any
//! printed variant) purely as index groups over the original components.

use itertools::Itertools;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::entropy_term;
use crate::placements::{
    compress_zero_levels, embed_density, embed_vector, marginal_table, partial_trace, permuted_placement,
    IndexPlacement,
};
use crate::states::{sample_probability_vector, DensityMatrix, ProbabilityVector, RandomSource};

pub const CLASSICAL_TOLERANCE: f64 = 1e-12;
pub const QUANTUM_TOLERANCE: f64 = 1e-9;
/// `falsify` only reports gaps below this.
pub const FALSIFY_THRESHOLD: f64 = 1e-6;
/// Exhaustive permutation scans are limited to `MAX_EXHAUSTIVE_N!` orderings.
pub const MAX_EXHAUSTIVE_N: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub holds: bool,
    pub tolerance: f64,
}

impl InequalityVerdict {
    pub fn new(lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let gap = rhs - lhs;
        Self {
            lhs,
            rhs,
            gap,
            holds: gap >= -tolerance,
            tolerance,
        }
    }

    pub fn with_tolerance(self, tolerance: f64) -> Self {
        Self::new(self.lhs, self.rhs, tolerance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityKind {
    Subadditivity,
    StrongSubadditivity,
}

impl InequalityKind {
    pub fn for_placement(placement: &IndexPlacement) -> Result<Self> {
        match placement.arity() {
            2 => Ok(Self::Subadditivity),
            3 => Ok(Self::StrongSubadditivity),
            found => Err(Error::ArityMismatch { expected: 3, found }),
        }
    }
}

fn require_arity(placement: &IndexPlacement, expected: usize) -> Result<()> {
    if placement.arity() != expected {
        return Err(Error::ArityMismatch {
            expected,
            found: placement.arity(),
        });
    }
    Ok(())
}

/// `H(1,2) <= H(1) + H(2)` for the table obtained by placing `p`.
pub fn subadditivity_classical(p: &ProbabilityVector, placement: &IndexPlacement) -> Result<InequalityVerdict> {
    require_arity(placement, 2)?;
    let table = embed_vector(p, placement)?;
    let joint = table.entropy();
    let h1 = marginal_table(&table, &[0])?.entropy();
    let h2 = marginal_table(&table, &[1])?.entropy();
    Ok(InequalityVerdict::new(joint, h1 + h2, CLASSICAL_TOLERANCE))
}

/// `H(1,2,3) + H(2) <= H(1,2) + H(2,3)` for the table obtained by placing `p`.
pub fn strong_subadditivity_classical(p: &ProbabilityVector, placement: &IndexPlacement) -> Result<InequalityVerdict> {
    require_arity(placement, 3)?;
    let table = embed_vector(p, placement)?;
    let joint = table.entropy();
    let h2 = marginal_table(&table, &[1])?.entropy();
    let h12 = marginal_table(&table, &[0, 1])?.entropy();
    let h23 = marginal_table(&table, &[1, 2])?.entropy();
    Ok(InequalityVerdict::new(joint + h2, h12 + h23, CLASSICAL_TOLERANCE))
}

/// `I = H(1) + H(2) - H(1,2)`, the subadditivity gap.
pub fn shannon_information(p: &ProbabilityVector, placement: &IndexPlacement) -> Result<f64> {
    subadditivity_classical(p, placement).map(|v| v.gap)
}

pub fn subadditivity_quantum(rho: &DensityMatrix, placement: &IndexPlacement) -> Result<InequalityVerdict> {
    require_arity(placement, 2)?;
    let state = embed_density(rho, placement)?;
    let joint = state.density().entropy()?;
    let s1 = partial_trace(&state, &[0])?.density().entropy()?;
    let s2 = partial_trace(&state, &[1])?.density().entropy()?;
    Ok(InequalityVerdict::new(joint, s1 + s2, QUANTUM_TOLERANCE))
}

/// Quantum strong subadditivity together with the reduced matrices it
/// compares.
#[derive(Debug, Clone)]
pub struct QuantumSsaReport {
    pub verdict: InequalityVerdict,
    /// `Tr_3` of the embedded state, over the (1,2) lattice.
    pub r12: DensityMatrix,
    /// `Tr_1` of the embedded state, over the (2,3) lattice.
    pub r23: DensityMatrix,
    /// `Tr_{1,3}` of the embedded state.
    pub r2: DensityMatrix,
    pub entropies: SsaEntropies,
    occupied12: Vec<bool>,
    occupied23: Vec<bool>,
    occupied2: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsaEntropies {
    pub joint: f64,
    pub s12: f64,
    pub s23: f64,
    pub s2: f64,
}

impl QuantumSsaReport {
    /// `(R12, R23, R2)` with padding-only levels removed.
    pub fn compressed(&self) -> (DensityMatrix, DensityMatrix, DensityMatrix) {
        let squeeze =
            |m: &DensityMatrix, mask: &[bool]| compress_zero_levels(m, mask).expect("mask built from the same lattice");
        (
            squeeze(&self.r12, &self.occupied12),
            squeeze(&self.r23, &self.occupied23),
            squeeze(&self.r2, &self.occupied2),
        )
    }
}

pub fn strong_subadditivity_quantum(rho: &DensityMatrix, placement: &IndexPlacement) -> Result<QuantumSsaReport> {
    require_arity(placement, 3)?;
    let state = embed_density(rho, placement)?;
    let r12 = partial_trace(&state, &[0, 1])?.into_density();
    let r23 = partial_trace(&state, &[1, 2])?.into_density();
    let r2 = partial_trace(&state, &[1])?.into_density();
    let entropies = SsaEntropies {
        joint: rho.entropy()?,
        s12: r12.entropy()?,
        s23: r23.entropy()?,
        s2: r2.entropy()?,
    };
    let verdict = InequalityVerdict::new(
        entropies.joint + entropies.s2,
        entropies.s12 + entropies.s23,
        QUANTUM_TOLERANCE,
    );
    Ok(QuantumSsaReport {
        verdict,
        r12,
        r23,
        r2,
        entropies,
        occupied12: placement.occupied_levels(&[0, 1])?,
        occupied23: placement.occupied_levels(&[1, 2])?,
        occupied2: placement.occupied_levels(&[1])?,
    })
}

/// Conditional mutual information `S(R12) + S(R23) - S(rho) - S(R2)`.
pub fn quantum_cmi(rho: &DensityMatrix, placement: &IndexPlacement) -> Result<f64> {
    strong_subadditivity_quantum(rho, placement).map(|r| r.verdict.gap)
}

/// The inequality matching the placement's arity (2: subadditivity, 3:
/// strong subadditivity).
pub fn classical_verdict(p: &ProbabilityVector, placement: &IndexPlacement) -> Result<InequalityVerdict> {
    match InequalityKind::for_placement(placement)? {
        InequalityKind::Subadditivity => subadditivity_classical(p, placement),
        InequalityKind::StrongSubadditivity => strong_subadditivity_classical(p, placement),
    }
}

pub fn quantum_verdict(rho: &DensityMatrix, placement: &IndexPlacement) -> Result<InequalityVerdict> {
    match InequalityKind::for_placement(placement)? {
        InequalityKind::Subadditivity => subadditivity_quantum(rho, placement),
        InequalityKind::StrongSubadditivity => strong_subadditivity_quantum(rho, placement).map(|r| r.verdict),
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ScanInput<'a> {
    Classical(&'a ProbabilityVector),
    Quantum(&'a DensityMatrix),
}

impl ScanInput<'_> {
    fn dim(&self) -> usize {
        match self {
            Self::Classical(p) => p.len(),
            Self::Quantum(rho) => rho.dim(),
        }
    }

    fn verdict(&self, placement: &IndexPlacement) -> Result<InequalityVerdict> {
        match self {
            Self::Classical(p) => classical_verdict(p, placement),
            Self::Quantum(rho) => quantum_verdict(rho, placement),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "count")]
pub enum Budget {
    /// Every permutation, in lexicographic order.
    All,
    /// This many uniformly drawn permutations.
    Random(usize),
}

/// Extremes of the gap over scanned permutations (0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub min_gap: f64,
    pub argmin: Vec<usize>,
    pub max_gap: f64,
    pub argmax: Vec<usize>,
    pub count: usize,
}

/// Evaluates the placement's inequality under `permuted_placement(base, s)`
/// for each scanned `s`. Ties resolve to the lexicographically smallest
/// permutation.
pub fn scan_permutations(
    input: ScanInput<'_>,
    placement: &IndexPlacement,
    budget: Budget,
    rng: &mut RandomSource,
) -> Result<ScanReport> {
    let n = input.dim();
    if n != placement.n() {
        return Err(Error::DimensionMismatch {
            expected: placement.n(),
            found: n,
        });
    }
    let mut report: Option<ScanReport> = None;
    let mut visit = |sigma: Vec<usize>| -> Result<()> {
        let gap = input.verdict(&permuted_placement(placement, &sigma)?)?.gap;
        match report.as_mut() {
            None => {
                report = Some(ScanReport {
                    min_gap: gap,
                    argmin: sigma.clone(),
                    max_gap: gap,
                    argmax: sigma,
                    count: 1,
                })
            }
            Some(r) => {
                r.count += 1;
                if gap < r.min_gap || (gap == r.min_gap && sigma < r.argmin) {
                    r.min_gap = gap;
                    r.argmin = sigma.clone();
                }
                if gap > r.max_gap || (gap == r.max_gap && sigma < r.argmax) {
                    r.max_gap = gap;
                    r.argmax = sigma;
                }
            }
        }
        Ok(())
    };
    match budget {
        Budget::All => {
            if n > MAX_EXHAUSTIVE_N {
                return Err(Error::BudgetTooLarge { n });
            }
            for sigma in (0..n).permutations(n) {
                visit(sigma)?;
            }
        }
        Budget::Random(count) => {
            let mut sigma: Vec<usize> = (0..n).collect();
            for _ in 0..count {
                sigma.shuffle(rng.rng());
                visit(sigma.clone())?;
            }
        }
    }
    // a zero random budget still reports the identity ordering
    match report {
        Some(r) => Ok(r),
        None => {
            let identity: Vec<usize> = (0..n).collect();
            let gap = input.verdict(placement)?.gap;
            Ok(ScanReport {
                min_gap: gap,
                argmin: identity.clone(),
                max_gap: gap,
                argmax: identity,
                count: 0,
            })
        }
    }
}

/// One family of disjoint index groups (1-based component indices).
pub type GroupFamily = Vec<Vec<usize>>;

/// An entropy inequality written as grouped-entropy terms over the original
/// components. Each group `G` in a family contributes `-s ln s` with
/// `s = sum_{k in G} p_k` to its side; the claim is `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupingSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Transcribed from a printed formula rather than derived from a
    /// placement; such specs are audited, not trusted.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub audit_only: bool,
    pub n: usize,
    pub lhs: Vec<GroupFamily>,
    pub rhs: Vec<GroupFamily>,
}

impl GroupingSpec {
    pub fn new(n: usize, lhs: Vec<GroupFamily>, rhs: Vec<GroupFamily>) -> Result<Self> {
        let spec = Self {
            label: None,
            audit_only: false,
            n,
            lhs,
            rhs,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_for(self.n)
    }

    fn validate_for(&self, n: usize) -> Result<()> {
        for family in self.lhs.iter().chain(&self.rhs) {
            let mut seen = vec![false; n + 1];
            for &index in family.iter().flatten() {
                if index == 0 || index > n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
                if std::mem::replace(&mut seen[index], true) {
                    return Err(Error::OverlappingGroups { index });
                }
            }
        }
        Ok(())
    }

    /// Subadditivity of a bipartite placement as grouping data.
    pub fn subadditivity(placement: &IndexPlacement) -> Result<Self> {
        require_arity(placement, 2)?;
        Self::new(
            placement.n(),
            vec![singletons(placement.n())],
            vec![family(placement, &[0])?, family(placement, &[1])?],
        )
    }

    /// Strong subadditivity of a tripartite placement as grouping data.
    pub fn strong_subadditivity(placement: &IndexPlacement) -> Result<Self> {
        require_arity(placement, 3)?;
        Self::new(
            placement.n(),
            vec![singletons(placement.n()), family(placement, &[1])?],
            vec![family(placement, &[0, 1])?, family(placement, &[1, 2])?],
        )
    }

    pub fn derived(placement: &IndexPlacement) -> Result<Self> {
        match InequalityKind::for_placement(placement)? {
            InequalityKind::Subadditivity => Self::subadditivity(placement),
            InequalityKind::StrongSubadditivity => Self::strong_subadditivity(placement),
        }
    }

    /// Replaces every index `k` by `sigma[k-1] + 1` (0-based permutation).
    pub fn relabeled(&self, sigma: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if sigma.len() != self.n
            || sigma
                .iter()
                .any(|&s| s >= self.n || std::mem::replace(&mut seen[s], true))
        {
            return Err(Error::NotAPermutation(self.n));
        }
        let map = |families: &[GroupFamily]| -> Vec<GroupFamily> {
            families
                .iter()
                .map(|f| {
                    f.iter()
                        .map(|g| g.iter().map(|&k| sigma[k - 1] + 1).collect())
                        .collect()
                })
                .collect()
        };
        Ok(Self {
            label: self.label.clone(),
            audit_only: self.audit_only,
            n: self.n,
            lhs: map(&self.lhs),
            rhs: map(&self.rhs),
        })
    }

    /// Same inequality content, ignoring label and audit flag.
    pub fn same_terms(&self, other: &Self) -> bool {
        self.n == other.n && self.lhs == other.lhs && self.rhs == other.rhs
    }
}

fn singletons(n: usize) -> GroupFamily {
    (1..=n).map(|k| vec![k]).collect()
}

fn family(placement: &IndexPlacement, keep: &[usize]) -> Result<GroupFamily> {
    Ok(placement
        .groups(keep)?
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(|g| g.into_iter().map(|k| k + 1).collect())
        .collect())
}

fn side_entropy(p: &[f64], families: &[GroupFamily]) -> f64 {
    families
        .iter()
        .flatten()
        .map(|group| entropy_term(group.iter().map(|&k| p[k - 1]).sum()))
        .sum()
}

pub fn evaluate_grouping(p: &ProbabilityVector, spec: &GroupingSpec, tolerance: f64) -> Result<InequalityVerdict> {
    spec.validate_for(p.len())?;
    let lhs = side_entropy(p.as_slice(), &spec.lhs);
    let rhs = side_entropy(p.as_slice(), &spec.rhs);
    Ok(InequalityVerdict::new(lhs, rhs, tolerance))
}

/// A probability vector violating a grouping spec.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub input: ProbabilityVector,
    pub verdict: InequalityVerdict,
    /// 0 for deterministic corner cases, otherwise the 1-based random trial.
    pub trial: usize,
}

/// Basis vectors, then every two-component half/half mixture, in a fixed
/// order.
pub fn corner_cases(n: usize) -> Vec<ProbabilityVector> {
    let mut out: Vec<ProbabilityVector> = (0..n).map(|k| ProbabilityVector::basis(n, k)).collect();
    for [i, j] in (0..n).array_combinations() {
        let mut v = vec![0.0; n];
        v[i] = 0.5;
        v[j] = 0.5;
        out.push(ProbabilityVector::from_trusted(v));
    }
    out
}

/// Searches for an input with `gap < -FALSIFY_THRESHOLD`: corner cases
/// first, then `trials` uniform simplex samples.
pub fn falsify(spec: &GroupingSpec, n: usize, trials: usize, rng: &mut RandomSource) -> Result<Option<Violation>> {
    spec.validate_for(n)?;
    let check = |p: ProbabilityVector, trial: usize| -> Result<Option<Violation>> {
        let verdict = evaluate_grouping(&p, spec, FALSIFY_THRESHOLD)?;
        Ok((!verdict.holds).then_some(Violation {
            input: p,
            verdict,
            trial,
        }))
    };
    for p in corner_cases(n) {
        if let Some(v) = check(p, 0)? {
            return Ok(Some(v));
        }
    }
    for trial in 1..=trials {
        if let Some(v) = check(sample_probability_vector(n, rng)?, trial)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

const BUNDLED: &[(&str, &str)] = &[
    ("eq12", include_str!("../data/eq12.json")),
    ("eq13_printed", include_str!("../data/eq13_printed.json")),
    ("eq13_derived", include_str!("../data/eq13_derived.json")),
    ("sub1_printed", include_str!("../data/sub1_printed.json")),
    ("sub1_derived_1_23", include_str!("../data/sub1_derived_1_23.json")),
    ("sub1_derived_2_13", include_str!("../data/sub1_derived_2_13.json")),
    ("appendix_j2", include_str!("../data/appendix_j2.json")),
    ("appendix_j2_derived", include_str!("../data/appendix_j2_derived.json")),
    ("appendix_j3", include_str!("../data/appendix_j3.json")),
    ("appendix_j3_derived", include_str!("../data/appendix_j3_derived.json")),
];

pub fn bundled_spec_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(name, _)| *name)
}

/// One of the grouping specs shipped in `data/`, by file stem.
pub fn bundled_spec(name: &str) -> Option<GroupingSpec> {
    let stem = name.strip_suffix(".json").unwrap_or(name);
    BUNDLED.iter().find(|(n, _)| *n == stem).map(|(_, text)| {
        let spec: GroupingSpec = serde_json::from_str(text).expect("bundled spec parses");
        spec.validate().expect("bundled spec is well formed");
        spec
    })
}
