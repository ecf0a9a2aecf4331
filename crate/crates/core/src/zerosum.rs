//! Decision procedures for weighted zero-sum subsequences.
//!
//! A weighted zero-sum of length `L` in a sequence `S` is a choice of `L`
//! copies from `S` together with one weight per copy such that the weighted
//! sum vanishes. The main search, [`find_zero_subsequence`], runs a layered
//! reachability over the distinct entries of `S`; the table doubles as the
//! feasibility oracle used to reconstruct a canonical witness.
//!
//! Witness canonical order: the lexicographically smallest tuple of entry
//! indices (one per copy, nondecreasing), then the lexicographically
//! smallest weight tuple in [`WeightSet`] preference order (`+1` before `-1`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Sequence, WeightSet};

/// Upper limit on reachability table size, in bits.
pub const TABLE_LIMIT_BITS: u128 = 1 << 31;

/// Upper limit on `C(len, L)·|A|^L` for the brute-force oracle.
pub const BRUTE_FORCE_GUARD: u128 = 1_000_000_000;

/// Copies taken from one entry of a sequence, with one weight per copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pick {
    pub entry: usize,
    pub signs: Vec<i64>,
}

impl Pick {
    pub fn copies(&self) -> u64 {
        self.signs.len() as u64
    }
}

/// A weighted subsequence of a [`Sequence`], referenced by entry index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Witness {
    picks: Vec<Pick>,
}

impl Witness {
    pub fn new(picks: Vec<Pick>) -> Self {
        Witness { picks }
    }

    pub fn picks(&self) -> &[Pick] {
        &self.picks
    }

    /// Total number of copies used.
    pub fn len(&self) -> u64 {
        self.picks.iter().map(Pick::copies).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// One `(entry, weight)` pair per copy.
    pub fn expanded(&self) -> Vec<(usize, i64)> {
        self.picks
            .iter()
            .flat_map(|p| p.signs.iter().map(move |&s| (p.entry, s)))
            .collect()
    }

    /// Checks structure against `seq`, membership of every weight in
    /// `weights`, and that the weighted sum is the identity.
    pub fn validate(&self, seq: &Sequence, weights: &WeightSet) -> Result<()> {
        if let Some(bad) = self.expanded().iter().find(|(_, s)| !weights.contains(*s)) {
            return Err(Error::InvalidWitness(format!("weight {} not in {weights}", bad.1)));
        }
        let total = signed_sum(seq, self)?;
        if !total.is_zero() {
            return Err(Error::InvalidWitness(format!("weighted sum is {total}, not zero")));
        }
        Ok(())
    }

    /// The JSON record form, one pick per copy.
    pub fn to_record(&self, seq: &Sequence) -> Result<WitnessRecord> {
        let entries = seq.entries();
        let picks = self
            .expanded()
            .into_iter()
            .map(|(entry, sign)| {
                let (e, _) = entries.get(entry).ok_or_else(|| {
                    Error::InvalidWitness(format!("entry {entry} out of range"))
                })?;
                Ok(PickRecord { element: e.coords().to_vec(), sign })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WitnessRecord { length: self.len(), picks })
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .expanded()
            .iter()
            .map(|(e, s)| format!("{s:+}·#{e}"))
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Serialized witness: `{"length": L, "picks": [{"element": [...], "sign": w}, ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub length: u64,
    pub picks: Vec<PickRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PickRecord {
    pub element: Vec<u64>,
    pub sign: i64,
}

impl WitnessRecord {
    /// Recomputes the weighted sum without reference to the source sequence.
    pub fn replay(&self, group: &GroupParams) -> Result<GroupElement> {
        if self.length != self.picks.len() as u64 {
            return Err(Error::InvalidWitness("length does not match pick count".into()));
        }
        let mut acc = group.identity();
        for p in &self.picks {
            let e = group.element(p.element.clone())?;
            acc = group.add(&acc, &group.scale(p.sign, &e)?)?;
        }
        Ok(acc)
    }
}

/// Which defining condition of an invariant to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionKind {
    /// A weighted zero-sum of length at most `exp(G)`.
    Eta,
    /// A weighted zero-sum of length exactly `exp(G)`.
    S,
    /// As `S`, over a sequence of distinct elements.
    G,
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionKind::Eta => "eta",
            ConditionKind::S => "s",
            ConditionKind::G => "g",
        })
    }
}

impl std::str::FromStr for ConditionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(ConditionKind::Eta),
            "s" => Ok(ConditionKind::S),
            "g" => Ok(ConditionKind::G),
            other => Err(Error::Precondition(format!("unknown condition {other:?}"))),
        }
    }
}

/// The group value of the weighted combination described by `witness`.
pub fn signed_sum(seq: &Sequence, witness: &Witness) -> Result<GroupElement> {
    let group = seq.group();
    let entries = seq.entries();
    let mut used: BTreeMap<usize, u64> = BTreeMap::new();
    let mut acc = group.identity();
    for pick in witness.picks() {
        let (e, mult) = entries
            .get(pick.entry)
            .ok_or_else(|| Error::InvalidWitness(format!("entry {} out of range", pick.entry)))?;
        if pick.signs.is_empty() {
            return Err(Error::InvalidWitness(format!("entry {} picked with no copies", pick.entry)));
        }
        let count = used.entry(pick.entry).or_default();
        *count += pick.copies();
        if *count > *mult {
            return Err(Error::InvalidWitness(format!(
                "entry {} used {} times, multiplicity {}",
                pick.entry, count, mult
            )));
        }
        let coefficient = pick.signs.iter().fold(0i128, |a, &s| a + s as i128);
        let coefficient = coefficient.rem_euclid(group.modulus() as i128) as i64;
        acc = group.add(&acc, &group.scale(coefficient, e)?)?;
    }
    Ok(acc)
}

fn check_length(seq: &Sequence, length: u64) -> Result<()> {
    if length > seq.len() {
        return Err(Error::InvalidLength { length, available: seq.len() });
    }
    Ok(())
}

/// Residues reachable as a sum of exactly `c` weights, for each `c <= max`.
fn coefficient_sums(group: &GroupParams, residues: &[u64], max: usize) -> Vec<Vec<u64>> {
    let n = group.modulus() as u128;
    let mut out: Vec<Vec<u64>> = Vec::with_capacity(max + 1);
    out.push(vec![0]);
    for c in 1..=max {
        let set: BTreeSet<u64> = out[c - 1]
            .iter()
            .flat_map(|&a| residues.iter().map(move |&w| ((a as u128 + w as u128) % n) as u64))
            .collect();
        out.push(set.into_iter().collect());
    }
    out
}

fn translate_into(group: &GroupParams, dst: &mut FixedBitSet, src: &FixedBitSet, shift: u64) {
    if shift == 0 {
        dst.union_with(src);
    } else {
        for v in src.ones() {
            dst.insert(group.add_index(v as u64, shift) as usize);
        }
    }
}

/// Searches for a weighted zero-sum subsequence of length exactly `length`.
///
/// Returns the canonical witness (see module docs), or `None` if no weighted
/// selection of `length` copies sums to the identity.
pub fn find_zero_subsequence(
    seq: &Sequence,
    length: u64,
    weights: &WeightSet,
) -> Result<Option<Witness>> {
    check_length(seq, length)?;
    if length == 0 {
        return Ok(Some(Witness::default()));
    }
    let group = *seq.group();
    let order = group.order();
    let l = length as usize;
    let m = seq.distinct_len();
    let bits = (m as u128 + 1) * (l as u128 + 1) * order as u128;
    if bits > TABLE_LIMIT_BITS {
        return Err(Error::TooLarge(bits));
    }

    let weight_res = weights.residues(&group);
    let residues: Vec<u64> = weight_res.iter().map(|&(r, _)| r).collect();
    let coef = coefficient_sums(&group, &residues, l);
    let xs: Vec<u64> = seq
        .entries()
        .iter()
        .map(|(e, _)| group.index_of(e))
        .collect::<Result<_>>()?;
    let mults: Vec<usize> = seq.entries().iter().map(|&(_, mu)| mu.min(length) as usize).collect();

    // reach[i][k]: values of weighted sums of exactly k copies from entries i..
    let empty = FixedBitSet::with_capacity(order as usize);
    let mut reach: Vec<Vec<FixedBitSet>> = vec![vec![empty.clone(); l + 1]; m + 1];
    reach[m][0].insert(0);
    let mut suffix_len = 0usize;
    for i in (0..m).rev() {
        suffix_len += mults[i];
        let (head, tail) = reach.split_at_mut(i + 1);
        let next = &tail[0];
        let cur = &mut head[i];
        for k in 0..=l.min(suffix_len) {
            for c in 0..=mults[i].min(k) {
                if next[k - c].is_clear() {
                    continue;
                }
                for &s in &coef[c] {
                    let shift = group.scale_index(s, xs[i]);
                    translate_into(&group, &mut cur[k], &next[k - c], shift);
                }
            }
        }
    }
    if !reach[0][l].contains(0) {
        return Ok(None);
    }

    // Counts per entry, lexicographically largest count vector first, which
    // is the lexicographically smallest index tuple.
    let mut counts = vec![0usize; m];
    let mut prefix = empty.clone();
    prefix.insert(0);
    let mut remaining = l;
    for i in 0..m {
        let mut chosen = None;
        for c in (0..=mults[i].min(remaining)).rev() {
            let next = &reach[i + 1][remaining - c];
            if next.is_clear() {
                continue;
            }
            let mut shifted = empty.clone();
            for &s in &coef[c] {
                translate_into(&group, &mut shifted, &prefix, group.scale_index(s, xs[i]));
            }
            if shifted.ones().any(|p| next.contains(group.neg_index(p as u64) as usize)) {
                chosen = Some((c, shifted));
                break;
            }
        }
        let (c, shifted) = chosen.expect("reachability table guarantees a completion");
        counts[i] = c;
        prefix = shifted;
        remaining -= c;
    }
    debug_assert_eq!(remaining, 0);

    // With counts fixed, pick weights copy by copy.
    let mut fixed: Vec<FixedBitSet> = vec![empty.clone(); m + 1];
    fixed[m].insert(0);
    for i in (0..m).rev() {
        let (head, tail) = fixed.split_at_mut(i + 1);
        for &s in &coef[counts[i]] {
            translate_into(&group, &mut head[i], &tail[0], group.scale_index(s, xs[i]));
        }
    }
    let mut picks = Vec::new();
    let mut partial = 0u64;
    for i in 0..m {
        if counts[i] == 0 {
            continue;
        }
        let mut signs = Vec::with_capacity(counts[i]);
        for j in 0..counts[i] {
            let rest = counts[i] - j - 1;
            let (value, rep) = weight_res
                .iter()
                .find_map(|&(res, rep)| {
                    let p1 = group.add_index(partial, group.scale_index(res, xs[i]));
                    let ok = coef[rest].iter().any(|&s| {
                        let p2 = group.add_index(p1, group.scale_index(s, xs[i]));
                        fixed[i + 1].contains(group.neg_index(p2) as usize)
                    });
                    ok.then_some((p1, rep))
                })
                .expect("fixed-count table guarantees a completion");
            partial = value;
            signs.push(rep);
        }
        picks.push(Pick { entry: i, signs });
    }
    debug_assert_eq!(partial, 0);
    Ok(Some(Witness { picks }))
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Independent oracle: enumerates every `length`-subset of copies and every
/// weight assignment. Returns the first hit in lexicographic order, which is
/// the same canonical witness [`find_zero_subsequence`] produces.
pub fn find_zero_subsequence_bruteforce(
    seq: &Sequence,
    length: u64,
    weights: &WeightSet,
) -> Result<Option<Witness>> {
    check_length(seq, length)?;
    let group = *seq.group();
    let reps: Vec<i64> = weights.residues(&group).into_iter().map(|(_, w)| w).collect();
    let work = binomial(seq.len(), length).saturating_mul((reps.len() as u128).saturating_pow(length as u32));
    if work > BRUTE_FORCE_GUARD {
        return Err(Error::GuardExceeded(work));
    }
    let l = length as usize;
    let positions: Vec<(usize, &GroupElement)> = seq
        .entries()
        .iter()
        .enumerate()
        .flat_map(|(i, (e, m))| std::iter::repeat_n((i, e), *m as usize))
        .collect();
    let len = positions.len();

    let mut combo: Vec<usize> = (0..l).collect();
    loop {
        let mut signs = vec![0usize; l];
        'signs: loop {
            let mut acc = group.identity();
            for (slot, &p) in combo.iter().enumerate() {
                acc = group.add(&acc, &group.scale(reps[signs[slot]], positions[p].1)?)?;
            }
            if acc.is_zero() {
                let mut picks: Vec<Pick> = Vec::new();
                for (slot, &p) in combo.iter().enumerate() {
                    let entry = positions[p].0;
                    match picks.last_mut() {
                        Some(last) if last.entry == entry => last.signs.push(reps[signs[slot]]),
                        _ => picks.push(Pick { entry, signs: vec![reps[signs[slot]]] }),
                    }
                }
                return Ok(Some(Witness { picks }));
            }
            // odometer, last slot fastest
            let mut slot = l;
            loop {
                if slot == 0 {
                    break 'signs;
                }
                slot -= 1;
                signs[slot] += 1;
                if signs[slot] < reps.len() {
                    continue 'signs;
                }
                signs[slot] = 0;
            }
        }
        // next combination in lexicographic order
        let Some(i) = (0..l).rev().find(|&i| combo[i] < len - l + i) else {
            return Ok(None);
        };
        combo[i] += 1;
        for j in i + 1..l {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// Shortest weighted zero-sum of length between 1 and `max_length`.
pub fn find_short_zero_sum(
    seq: &Sequence,
    max_length: u64,
    weights: &WeightSet,
) -> Result<Option<Witness>> {
    if max_length < 1 {
        return Err(Error::InvalidLength { length: max_length, available: seq.len() });
    }
    for l in 1..=max_length.min(seq.len()) {
        if let Some(w) = find_zero_subsequence(seq, l, weights)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// The witness certifying `kind` for `seq`, if one exists.
pub fn condition_witness(
    seq: &Sequence,
    kind: ConditionKind,
    weights: &WeightSet,
) -> Result<Option<Witness>> {
    let exp = seq.group().exponent();
    match kind {
        ConditionKind::Eta => find_short_zero_sum(seq, exp, weights),
        ConditionKind::S | ConditionKind::G => {
            if kind == ConditionKind::G && !seq.has_distinct_elements() {
                return Err(Error::Precondition(
                    "condition g requires a sequence of distinct elements".into(),
                ));
            }
            if seq.len() < exp {
                return Ok(None);
            }
            find_zero_subsequence(seq, exp, weights)
        }
    }
}

/// Whether `seq` satisfies the defining condition `kind`.
pub fn satisfies_condition(seq: &Sequence, kind: ConditionKind, weights: &WeightSet) -> Result<bool> {
    Ok(condition_witness(seq, kind, weights)?.is_some())
}

/// Length from which every sequence over `group` is guaranteed a
/// `{-1,1}`-zero-sum of length `n` by the pigeonhole argument:
/// `(n^r - 1)(n - 1)/2 + 1`, except `C_3` where the bound is 4.
pub fn pigeonhole_threshold(group: &GroupParams) -> Result<u64> {
    let n = group.modulus();
    if n.is_multiple_of(2) {
        return Err(Error::EvenModulus(n));
    }
    if n == 3 && group.rank() == 1 {
        return Ok(4);
    }
    let t = (group.order() as u128 - 1) * (n as u128 - 1) / 2 + 1;
    u64::try_from(t).map_err(|_| Error::Unsupported("threshold overflows u64".into()))
}

/// Builds a length-`n` `{-1,1}`-zero-sum without global search, by
/// inspecting the `{g, -g}` classes and the zeros of `seq`.
///
/// Either some class holds at least `n` copies, and `n` of them all
/// contribute `+g`; or an even number `t` of class copies cancel in pairs and
/// `n - t` zeros fill up the length.
pub fn extract_pigeonhole_witness(seq: &Sequence) -> Result<Witness> {
    let group = *seq.group();
    let n = group.modulus();
    let threshold = pigeonhole_threshold(&group)?;
    if seq.len() < threshold {
        return Err(Error::Precondition(format!(
            "length {} below pigeonhole threshold {threshold}",
            seq.len()
        )));
    }

    let mut zeros: Option<(usize, u64)> = None;
    // class representative index -> [(entry, multiplicity, is_positive)]
    let mut classes: BTreeMap<u64, Vec<(usize, u64, bool)>> = BTreeMap::new();
    for (i, (e, m)) in seq.entries().iter().enumerate() {
        let idx = group.index_of(e)?;
        if idx == 0 {
            zeros = Some((i, *m));
            continue;
        }
        let neg = group.neg_index(idx);
        let positive = idx < neg;
        classes.entry(idx.min(neg)).or_default().push((i, *m, positive));
    }
    for members in classes.values_mut() {
        members.sort_by_key(|&(_, _, positive)| !positive);
    }
    let zero_count = zeros.map_or(0, |(_, m)| m);

    let mut picks: BTreeMap<usize, Vec<i64>> = BTreeMap::new();

    // every copy contributes +g: weight +1 on g, -1 on -g
    if let Some(members) = classes.values().find(|ms| ms.iter().map(|m| m.1).sum::<u64>() >= n) {
        let mut left = n;
        for &(entry, mult, positive) in members {
            let take = mult.min(left);
            let sign = if positive { 1 } else { -1 };
            picks.entry(entry).or_default().extend(std::iter::repeat_n(sign, take as usize));
            left -= take;
        }
        return Ok(collect_picks(picks));
    }

    if let Some((zero_entry, _)) = zeros {
        if zero_count >= n {
            picks.insert(zero_entry, vec![1; n as usize]);
            return Ok(collect_picks(picks));
        }
        let need = n - zero_count;
        let t = need + need % 2;
        if let Some(members) = classes.values().find(|ms| ms.iter().map(|m| m.1).sum::<u64>() >= t) {
            // first t/2 copies contribute +g, the rest -g
            let mut taken = 0u64;
            for &(entry, mult, positive) in members {
                for _ in 0..mult {
                    if taken == t {
                        break;
                    }
                    let contributes_plus = taken < t / 2;
                    let sign = if contributes_plus == positive { 1 } else { -1 };
                    picks.entry(entry).or_default().push(sign);
                    taken += 1;
                }
            }
            if n > t {
                picks.insert(zero_entry, vec![1; (n - t) as usize]);
            }
            return Ok(collect_picks(picks));
        }
    }

    Err(Error::Precondition(
        "no pigeonhole case applies; length threshold should have excluded this".into(),
    ))
}

fn collect_picks(picks: BTreeMap<usize, Vec<i64>>) -> Witness {
    Witness {
        picks: picks
            .into_iter()
            .filter(|(_, signs)| !signs.is_empty())
            .map(|(entry, signs)| Pick { entry, signs })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grp(n: u64, r: usize) -> GroupParams {
        GroupParams::new(n, r).unwrap()
    }

    fn seq(n: u64, r: usize, rows: &[&[i64]]) -> Sequence {
        Sequence::from_int_rows(grp(n, r), rows).unwrap()
    }

    #[test]
    fn signed_sum_examples() {
        let pm = WeightSet::plus_minus_one();
        let c = grp(3, 2);
        let mut s = Sequence::new(c);
        s.push(c.element(vec![1, 2]).unwrap(), 2).unwrap();
        let w = Witness::new(vec![Pick { entry: 0, signs: vec![1, -1] }]);
        assert!(signed_sum(&s, &w).unwrap().is_zero());
        w.validate(&s, &pm).unwrap();

        let z = seq(3, 1, &[&[0]]);
        let w = Witness::new(vec![Pick { entry: 0, signs: vec![1] }]);
        assert!(signed_sum(&z, &w).unwrap().is_zero());

        let c5 = grp(5, 2);
        let mut s = Sequence::new(c5);
        s.push(c5.element(vec![2, 3]).unwrap(), 5).unwrap();
        let w = Witness::new(vec![Pick { entry: 0, signs: vec![1; 5] }]);
        assert!(signed_sum(&s, &w).unwrap().is_zero());
    }

    #[test]
    fn signed_sum_rejects_bad_structure() {
        let s = seq(3, 1, &[&[1]]);
        let too_many = Witness::new(vec![Pick { entry: 0, signs: vec![1, 1] }]);
        assert!(signed_sum(&s, &too_many).is_err());
        let bad_entry = Witness::new(vec![Pick { entry: 3, signs: vec![1] }]);
        assert!(signed_sum(&s, &bad_entry).is_err());
        let split = Witness::new(vec![
            Pick { entry: 0, signs: vec![1] },
            Pick { entry: 0, signs: vec![1] },
        ]);
        assert!(signed_sum(&s, &split).is_err());
        let w = Witness::new(vec![Pick { entry: 0, signs: vec![2] }]);
        assert!(w.validate(&s, &WeightSet::plus_minus_one()).is_err());
    }

    #[test]
    fn basis_vectors_have_no_weighted_zero_sum() {
        let pm = WeightSet::plus_minus_one();
        for r in 1..=5 {
            let c = grp(3, r);
            let s = Sequence::from_elements(c, (0..r).map(|j| c.basis(j).unwrap())).unwrap();
            for l in 1..=r as u64 {
                assert!(find_zero_subsequence(&s, l, &pm).unwrap().is_none());
            }
        }
    }

    #[test]
    fn doubled_pair_sequence_has_no_length_three_zero_sum() {
        let s = seq(3, 2, &[&[1, 0], &[0, 1], &[2, 0], &[0, 2]]);
        let pm = WeightSet::plus_minus_one();
        assert!(find_zero_subsequence(&s, 3, &pm).unwrap().is_none());
        assert!(!satisfies_condition(&s, ConditionKind::G, &pm).unwrap());
    }

    #[test]
    fn canonical_witness_in_c3() {
        // brute force over the 2^3 weight patterns: (+1,-1,+1) is the first hit
        let s = seq(3, 1, &[&[1], &[1], &[0]]);
        let pm = WeightSet::plus_minus_one();
        let w = find_zero_subsequence(&s, 3, &pm).unwrap().unwrap();
        assert_eq!(w.expanded(), vec![(0, 1), (0, -1), (1, 1)]);
        w.validate(&s, &pm).unwrap();
        assert_eq!(find_zero_subsequence_bruteforce(&s, 3, &pm).unwrap(), Some(w));
    }

    #[test]
    fn length_errors() {
        let s = seq(3, 1, &[&[1]]);
        let pm = WeightSet::plus_minus_one();
        assert!(matches!(
            find_zero_subsequence(&s, 2, &pm),
            Err(Error::InvalidLength { length: 2, available: 1 })
        ));
        assert_eq!(find_zero_subsequence(&s, 0, &pm).unwrap(), Some(Witness::default()));
        assert!(find_short_zero_sum(&s, 0, &pm).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        let pm = WeightSet::plus_minus_one();
        let c = grp(3, 1);
        let mut zeros = Sequence::new(c);
        zeros.push(c.identity(), 3).unwrap();
        assert!(find_zero_subsequence_bruteforce(&zeros, 3, &pm).unwrap().is_some());
        let single = seq(3, 1, &[&[1]]);
        assert!(find_zero_subsequence_bruteforce(&single, 1, &pm).unwrap().is_none());
        let c = grp(3, 3);
        let mut big = Sequence::new(c);
        for e in c.elements() {
            big.push(e, 2).unwrap();
        }
        assert!(matches!(
            find_zero_subsequence_bruteforce(&big, 8, &pm),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn short_zero_sum_examples() {
        let pm = WeightSet::plus_minus_one();
        let s = seq(3, 2, &[&[1, 1], &[0, 0]]);
        let w = find_short_zero_sum(&s, 3, &pm).unwrap().unwrap();
        assert_eq!(w.expanded(), vec![(1, 1)]);
        let c = grp(3, 2);
        let mut s = Sequence::new(c);
        s.push(c.element(vec![2, 1]).unwrap(), 2).unwrap();
        let w = find_short_zero_sum(&s, 2, &pm).unwrap().unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w.expanded(), vec![(0, 1), (0, -1)]);
    }

    #[test]
    fn condition_examples() {
        let pm = WeightSet::plus_minus_one();
        let s = seq(3, 3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]);
        assert!(!satisfies_condition(&s, ConditionKind::Eta, &pm).unwrap());
        let short = seq(5, 2, &[&[0, 0], &[0, 0]]);
        assert!(!satisfies_condition(&short, ConditionKind::S, &pm).unwrap());
        let c = grp(3, 1);
        let mut rep = Sequence::new(c);
        rep.push(c.element(vec![1]).unwrap(), 2).unwrap();
        assert!(matches!(
            satisfies_condition(&rep, ConditionKind::G, &pm),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pigeonhole_examples() {
        // g^n: every copy +1
        let c = grp(5, 2);
        let mut s = Sequence::new(c);
        s.push(c.element(vec![1, 0]).unwrap(), 49).unwrap();
        let w = extract_pigeonhole_witness(&s).unwrap();
        assert_eq!(w.expanded(), vec![(0, 1); 5]);

        // 0·1·1·2 over C_3: the class {1,2} has three copies
        let s = seq(3, 1, &[&[0], &[1], &[1], &[2]]);
        let w = extract_pigeonhole_witness(&s).unwrap();
        assert_eq!(w.expanded(), vec![(1, 1), (1, 1), (2, -1)]);
        let rec = w.to_record(&s).unwrap();
        assert!(rec.replay(s.group()).unwrap().is_zero());

        // 0·0·1·2 over C_3: even class pair plus one zero
        let s = seq(3, 1, &[&[0], &[0], &[1], &[2]]);
        let w = extract_pigeonhole_witness(&s).unwrap();
        w.validate(&s, &WeightSet::plus_minus_one()).unwrap();
        assert_eq!(w.len(), 3);

        // first class member alone supplies n copies; the other is untouched
        let s = seq(3, 1, &[&[1], &[1], &[1], &[2]]);
        let w = extract_pigeonhole_witness(&s).unwrap();
        w.validate(&s, &WeightSet::plus_minus_one()).unwrap();
        assert_eq!(w.picks().len(), 1);

        let short = seq(3, 1, &[&[0], &[0], &[1]]);
        assert!(matches!(extract_pigeonhole_witness(&short), Err(Error::Precondition(_))));
        assert!(matches!(
            extract_pigeonhole_witness(&Sequence::new(grp(4, 1))),
            Err(Error::EvenModulus(4))
        ));
    }

    #[test]
    fn pigeonhole_tight_case_one_zero() {
        // one zero, every class at n - 1 copies: length equals the threshold
        let c = grp(5, 1);
        let mut s = Sequence::new(c);
        s.push(c.identity(), 1).unwrap();
        s.push(c.element(vec![1]).unwrap(), 4).unwrap();
        s.push(c.element(vec![2]).unwrap(), 4).unwrap();
        assert_eq!(s.len(), pigeonhole_threshold(&c).unwrap());
        let w = extract_pigeonhole_witness(&s).unwrap();
        w.validate(&s, &WeightSet::plus_minus_one()).unwrap();
        assert_eq!(w.len(), 5);
    }

    #[test]
    fn witness_record_round_trip() {
        let s = seq(3, 2, &[&[1, 0], &[2, 0], &[0, 1]]);
        let w = find_zero_subsequence(&s, 2, &WeightSet::plus_minus_one()).unwrap().unwrap();
        let rec = w.to_record(&s).unwrap();
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(json, r#"{"length":2,"picks":[{"element":[1,0],"sign":1},{"element":[2,0],"sign":1}]}"#);
        let back: WitnessRecord = serde_json::from_str(&json).unwrap();
        assert!(back.replay(s.group()).unwrap().is_zero());
    }

    fn arb_instance() -> impl Strategy<Value = (Sequence, u64, Vec<usize>)> {
        (1usize..=3).prop_flat_map(|r| {
            let c = grp(3, r);
            (
                prop::collection::vec(0..c.order(), 1..=8),
                0u64..=3,
                prop::collection::vec(0usize..8, 0..4),
            )
                .prop_map(move |(idx, l, flips)| {
                    let s = Sequence::from_elements(c, idx.into_iter().map(|i| c.element_at(i).unwrap()))
                        .unwrap();
                    let l = l.min(s.len());
                    (s, l, flips)
                })
        })
    }

    proptest! {
        #[test]
        fn search_matches_oracle_and_replays((s, l, _) in arb_instance()) {
            let pm = WeightSet::plus_minus_one();
            let fast = find_zero_subsequence(&s, l, &pm).unwrap();
            let slow = find_zero_subsequence_bruteforce(&s, l, &pm).unwrap();
            if let Some(w) = &fast {
                prop_assert_eq!(w.len(), l);
                w.validate(&s, &pm).unwrap();
            }
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn negating_entries_preserves_existence((s, l, flips) in arb_instance()) {
            let pm = WeightSet::plus_minus_one();
            let c = *s.group();
            let mut flipped = Sequence::new(c);
            for (i, (e, m)) in s.entries().iter().enumerate() {
                let e = if flips.contains(&i) { c.neg(e).unwrap() } else { e.clone() };
                flipped.push(e, *m).unwrap();
            }
            let a = find_zero_subsequence(&s, l, &pm).unwrap().is_some();
            let b = find_zero_subsequence(&flipped, l.min(flipped.len()), &pm).unwrap().is_some();
            if flipped.len() == s.len() {
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn eta_condition_is_monotone((s, _, extra) in arb_instance()) {
            let pm = WeightSet::plus_minus_one();
            let c = *s.group();
            let mut bigger = s.clone();
            for i in extra {
                bigger.push(c.element_at(i as u64 % c.order()).unwrap(), 1).unwrap();
            }
            if satisfies_condition(&s, ConditionKind::Eta, &pm).unwrap() {
                prop_assert!(satisfies_condition(&bigger, ConditionKind::Eta, &pm).unwrap());
            }
        }
    }
}
