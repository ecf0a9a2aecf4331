//! Generators for the explicit sign-vector constructions and a verifier that
//! replays each construction's zero-sum-freeness claim through [`crate::zerosum`].
//!
//! Index sets are 1-based subsets of `{1..r}` and are enumerated in
//! colexicographic order (the numeric order of their bitmasks). `±1` vectors
//! are stored as residues mod 3 (`-1 ↦ 2`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::{self, binomial, Invariant, Provenance, Source};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Sequence, WeightSet};
use crate::zerosum::{find_short_zero_sum, find_zero_subsequence, WitnessRecord};

/// The 0/1 vector supported on `subset` (1-based).
pub fn e_i(subset: &[usize], r: usize) -> Result<GroupElement> {
    if subset.is_empty() {
        return Err(Error::Precondition("index set must be nonempty".into()));
    }
    let mut coords = vec![0i64; r];
    for &i in subset {
        if i == 0 || i > r {
            return Err(Error::Precondition(format!("index {i} outside 1..={r}")));
        }
        coords[i - 1] = 1;
    }
    // 0/1 coordinates are valid residues for every modulus
    let g = GroupParams::new(2, r)?;
    g.element_from_ints(&coords)
}

fn mask_to_subset(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b as usize + 1).collect()
}

/// All subsets of `{1..r}` of size `k`, colex order.
fn subsets_of_size(r: usize, k: usize) -> Vec<Vec<usize>> {
    (0u64..1 << r)
        .filter(|m| m.count_ones() as usize == k)
        .map(mask_to_subset)
        .collect()
}

/// Odd-cardinality subsets of `{1..r}` of size at most `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddSubsetFamily {
    pub r: usize,
    pub m: usize,
    pub subsets: Vec<Vec<usize>>,
}

impl OddSubsetFamily {
    pub fn new(r: usize, m: usize) -> Result<Self> {
        if r == 0 || r > 20 {
            return Err(Error::Unsupported(format!("rank {r} outside 1..=20")));
        }
        let subsets = (1u64..1 << r)
            .filter(|mask| {
                let c = mask.count_ones() as usize;
                c % 2 == 1 && c <= m
            })
            .map(mask_to_subset)
            .collect();
        Ok(OddSubsetFamily { r, m, subsets })
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// `Σ_{j odd, j <= m} C(r, j)`.
    pub fn expected_len(r: usize, m: usize) -> u64 {
        (1..=m.min(r)).step_by(2).map(|j| binomial(r as u64, j as u64)).sum()
    }

    fn vectors(&self, group: &GroupParams) -> Result<Vec<GroupElement>> {
        self.subsets
            .iter()
            .map(|s| group.element_from_ints(&indicator(s, self.r)))
            .collect()
    }
}

fn indicator(subset: &[usize], r: usize) -> Vec<i64> {
    let mut v = vec![0i64; r];
    for &i in subset {
        v[i - 1] = 1;
    }
    v
}

/// `+1` everywhere except `-1` on `minus` (1-based).
fn sign_vector(minus: &[usize], r: usize) -> Vec<i64> {
    let mut v = vec![1i64; r];
    for &i in minus {
        v[i - 1] = -1;
    }
    v
}

fn c3(r: usize) -> Result<GroupParams> {
    GroupParams::new(3, r)
}

/// `∏_{I odd} 𝔢_I^{n-1}` over `C_n^r`, length `2^{r-1}(n-1)`.
pub fn theorem1_sequence(n: u64, r: usize) -> Result<Sequence> {
    if n.is_multiple_of(2) || n < 3 {
        return Err(Error::Precondition(format!("modulus must be odd and at least 3, got {n}")));
    }
    let group = GroupParams::new(n, r)?;
    let family = OddSubsetFamily::new(r, r)?;
    let mut seq = Sequence::new(group);
    for v in family.vectors(&group)? {
        seq.push(v, n - 1)?;
    }
    Ok(seq)
}

/// The odd-rank construction `ℰ·𝒢` over `C_3^r` with its `δ(r)`.
pub fn prop41_sequence(r: usize) -> Result<(Sequence, usize)> {
    let delta = bounds::odd_rank_delta(r)?;
    let group = c3(r)?;
    let mut seq = Sequence::new(group);
    for v in OddSubsetFamily::new(r, r - 2)?.vectors(&group)? {
        seq.push(v, 1)?;
    }
    for tail in subsets_of_size(r - 1, delta) {
        let mut minus = vec![1];
        minus.extend(tail.iter().map(|i| i + 1));
        seq.push(group.element_from_ints(&sign_vector(&minus, r))?, 1)?;
    }
    Ok((seq, delta))
}

/// Parameters reported alongside the even-rank construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Prop42Params {
    pub delta: usize,
    pub tau: u64,
    pub ell: u64,
    pub m: usize,
}

/// The even-rank construction `(∏_{I ∈ ℐ_m} 𝔢_I)·𝒢` over `C_3^r`.
///
/// For `r ≡ 0 (mod 4)` only one vector of each `±` pair of `𝒦` is kept: the
/// one whose first coordinate is `-1`.
pub fn prop42_sequence(r: usize) -> Result<(Sequence, Prop42Params)> {
    let p = bounds::even_rank_params(r)?;
    let group = c3(r)?;
    let mut seq = Sequence::new(group);
    for v in OddSubsetFamily::new(r, p.m)?.vectors(&group)? {
        seq.push(v, 1)?;
    }
    let k = subsets_of_size(r, p.delta);
    let tau = k.len() as u64;
    for minus in k {
        if r.is_multiple_of(4) && minus[0] != 1 {
            continue;
        }
        seq.push(group.element_from_ints(&sign_vector(&minus, r))?, 1)?;
    }
    Ok((seq, Prop42Params { delta: p.delta, tau, ell: p.ell, m: p.m }))
}

/// All weight-2 and weight-3 0/1 vectors over `C_3^r`, `r ∈ {4, 5}`.
pub fn small_eta_sequence(r: usize) -> Result<Sequence> {
    if !(4..=5).contains(&r) {
        return Err(Error::Unsupported(format!("small-rank construction needs r in 4..=5, got {r}")));
    }
    let group = c3(r)?;
    let mut seq = Sequence::new(group);
    for k in [2, 3] {
        for s in subsets_of_size(r, k) {
            seq.push(group.element_from_ints(&indicator(&s, r))?, 1)?;
        }
    }
    Ok(seq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Thm1,
    Prop41,
    Prop42,
    SmallEta,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Thm1, Family::Prop41, Family::Prop42, Family::SmallEta];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Thm1 => "thm1",
            Family::Prop41 => "prop41",
            Family::Prop42 => "prop42",
            Family::SmallEta => "small_eta",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown family {s:?}")))
    }
}

/// What a construction is claimed to avoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    /// No `{-1,1}`-zero-sum of length exactly `n`.
    NoZeroSumOfLengthN,
    /// No `{-1,1}`-zero-sum of length at most 3.
    NoShortZeroSum,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Claim::NoZeroSumOfLengthN => "no A-zero-sum of length exactly n",
            Claim::NoShortZeroSum => "no A-zero-sum of length <= 3",
        })
    }
}

/// A named construction with its parameters and the length its formula predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConstructionSpec {
    pub family: Family,
    pub n: u64,
    pub r: usize,
    pub claimed_length: u64,
    pub claim: Claim,
}

impl ConstructionSpec {
    /// Validates parameters and evaluates the length formula. `n` is ignored
    /// (fixed to 3) for every family except `thm1`.
    pub fn new(family: Family, n: u64, r: usize) -> Result<Self> {
        let (n, claimed_length, claim) = match family {
            Family::Thm1 => {
                if n.is_multiple_of(2) || n < 3 || r < 1 {
                    return Err(Error::Precondition(format!("thm1 needs odd n >= 3 and r >= 1, got n = {n}, r = {r}")));
                }
                let len = (1u64 << (r - 1)) * (n - 1);
                (n, len, Claim::NoZeroSumOfLengthN)
            }
            Family::Prop41 => {
                let delta = bounds::odd_rank_delta(r)?;
                let len = (1u64 << (r - 1)) + binomial(r as u64 - 1, delta as u64) - 1;
                (3, len, Claim::NoShortZeroSum)
            }
            Family::Prop42 => {
                let p = bounds::even_rank_params(r)?;
                (3, p.odd_subsets + p.ell, Claim::NoShortZeroSum)
            }
            Family::SmallEta => {
                if !(4..=5).contains(&r) {
                    return Err(Error::Precondition(format!("small_eta needs r in 4..=5, got {r}")));
                }
                let len = binomial(r as u64, 2) + binomial(r as u64, 3);
                (3, len, Claim::NoShortZeroSum)
            }
        };
        Ok(ConstructionSpec { family, n, r, claimed_length, claim })
    }

    pub fn generate(&self) -> Result<Sequence> {
        match self.family {
            Family::Thm1 => theorem1_sequence(self.n, self.r),
            Family::Prop41 => prop41_sequence(self.r).map(|(s, _)| s),
            Family::Prop42 => prop42_sequence(self.r).map(|(s, _)| s),
            Family::SmallEta => small_eta_sequence(self.r),
        }
    }

    /// The invariant whose lower bound a passing construction raises.
    pub fn bounded_invariant(&self) -> Invariant {
        match self.claim {
            Claim::NoZeroSumOfLengthN => Invariant::S,
            Claim::NoShortZeroSum => Invariant::Eta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpliedBound {
    pub invariant: Invariant,
    pub n: u64,
    pub r: usize,
    pub lower: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub n: u64,
    pub r: usize,
}

/// Outcome of replaying one construction's claim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub family: Family,
    pub params: Params,
    pub length: u64,
    pub claimed_length: u64,
    pub claim: String,
    pub verdict: Verdict,
    pub implied_bound: ImpliedBound,
    pub counterexample: Option<WitnessRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// The implied lower bound as a merge source, or `None` on failure.
    pub fn as_source(&self) -> Option<Source> {
        self.passed().then(|| {
            Source::lower(self.implied_bound.invariant, self.implied_bound.lower, Provenance::Construction)
        })
    }
}

/// Generates the construction and searches for a witness against its claim.
pub fn verify_construction(spec: &ConstructionSpec) -> Result<VerificationReport> {
    let seq = spec.generate()?;
    verify_sequence_claim(spec, &seq)
}

/// Checks `seq` against the claim and length of `spec`.
pub fn verify_sequence_claim(spec: &ConstructionSpec, seq: &Sequence) -> Result<VerificationReport> {
    let pm = WeightSet::plus_minus_one();
    let witness = match spec.claim {
        Claim::NoZeroSumOfLengthN if seq.len() >= spec.n => find_zero_subsequence(seq, spec.n, &pm)?,
        Claim::NoZeroSumOfLengthN => None,
        Claim::NoShortZeroSum if seq.is_empty() => None,
        Claim::NoShortZeroSum => find_short_zero_sum(seq, 3, &pm)?,
    };
    let mut notes = Vec::new();
    if spec.family == Family::Prop42 {
        notes.push(format!(
            "construction has {} elements; the bound is eta >= length + 1 (the stated length carries an extra +1)",
            seq.len()
        ));
    }
    if seq.len() != spec.claimed_length {
        notes.push(format!("generated length {} differs from claimed {}", seq.len(), spec.claimed_length));
    }
    let verdict = if witness.is_none() && seq.len() == spec.claimed_length {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let counterexample = witness.map(|w| w.to_record(seq)).transpose()?;
    Ok(VerificationReport {
        family: spec.family,
        params: Params { n: spec.n, r: spec.r },
        length: seq.len(),
        claimed_length: spec.claimed_length,
        claim: spec.claim.to_string(),
        verdict,
        implied_bound: ImpliedBound {
            invariant: spec.bounded_invariant(),
            n: spec.n,
            r: spec.r,
            lower: seq.len() + 1,
        },
        counterexample,
        notes,
    })
}

/// Every construction available over `C_3^r`, for lower-bound merging.
pub fn constructions_for_c3(r: usize) -> Vec<ConstructionSpec> {
    let mut specs = Vec::new();
    if r >= 2 {
        specs.extend(ConstructionSpec::new(Family::Thm1, 3, r));
    }
    specs.extend(ConstructionSpec::new(Family::Prop41, 3, r));
    specs.extend(ConstructionSpec::new(Family::Prop42, 3, r));
    specs.extend(ConstructionSpec::new(Family::SmallEta, 3, r));
    specs
}
