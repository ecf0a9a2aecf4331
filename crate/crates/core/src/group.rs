//! Arithmetic over the homocyclic group `C_n^r`, element encodings, weight
//! sets and the sequence type together with its text format.
//!
//! Elements are residue vectors in `(Z/nZ)^r`. Each element also has a
//! canonical integer index: a little-endian mixed-radix encoding in which
//! coordinate 0 is the least significant base-`n` digit. The identity has
//! index 0, so `index_of((1,0)) == 1` in `C_3^2`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group order accepted by [`GroupParams::new`].
pub const MAX_ORDER: u64 = 1 << 40;

/// The ambient group `C_n^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGroup", into = "RawGroup")]
pub struct GroupParams {
    n: u64,
    r: usize,
    order: u64,
}

#[derive(Serialize, Deserialize)]
struct RawGroup {
    n: u64,
    r: usize,
}

impl TryFrom<RawGroup> for GroupParams {
    type Error = Error;
    fn try_from(raw: RawGroup) -> Result<Self> {
        GroupParams::new(raw.n, raw.r)
    }
}

impl From<GroupParams> for RawGroup {
    fn from(g: GroupParams) -> Self {
        RawGroup { n: g.n, r: g.r }
    }
}

/// A residue vector in `(Z/nZ)^r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl GroupParams {
    /// Validates `n >= 2`, `r >= 1` and `n^r <= 2^40`.
    pub fn new(n: u64, r: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGroup(format!("modulus must be at least 2, got {n}")));
        }
        if r < 1 {
            return Err(Error::InvalidGroup("rank must be at least 1".into()));
        }
        let mut order: u64 = 1;
        for _ in 0..r {
            order = match order.checked_mul(n) {
                Some(o) if o <= MAX_ORDER => o,
                _ => {
                    return Err(Error::InvalidGroup(format!(
                        "order {n}^{r} exceeds 2^40"
                    )))
                }
            };
        }
        Ok(GroupParams { n, r, order })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Exponent of `C_n^r`, which is `n`.
    pub fn exponent(&self) -> u64 {
        self.n
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { coords: vec![0; self.r] }
    }

    /// The unit vector `e_j` for a zero-based coordinate `j`.
    pub fn basis(&self, j: usize) -> Result<GroupElement> {
        if j >= self.r {
            return Err(Error::IndexOutOfRange { index: j as u64, order: self.r as u64 });
        }
        let mut coords = vec![0; self.r];
        coords[j] = 1;
        Ok(GroupElement { coords })
    }

    /// Builds an element from already-reduced coordinates.
    pub fn element(&self, coords: Vec<u64>) -> Result<GroupElement> {
        let e = GroupElement { coords };
        self.check(&e)?;
        Ok(e)
    }

    /// Builds an element from arbitrary integers, reducing each mod `n`.
    pub fn element_from_ints(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.r {
            return Err(Error::RankMismatch { expected: self.r, got: coords.len() });
        }
        Ok(GroupElement {
            coords: coords.iter().map(|&c| self.reduce(c)).collect(),
        })
    }

    pub fn check(&self, a: &GroupElement) -> Result<()> {
        if a.coords.len() != self.r {
            return Err(Error::RankMismatch { expected: self.r, got: a.coords.len() });
        }
        if let Some(&value) = a.coords.iter().find(|&&c| c >= self.n) {
            return Err(Error::CoordinateOutOfRange { value, modulus: self.n });
        }
        Ok(())
    }

    /// Reduces an integer into `[0, n)`.
    pub fn reduce(&self, k: i64) -> u64 {
        (k as i128).rem_euclid(self.n as i128) as u64
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(&x, &y)| ((x as u128 + y as u128) % self.n as u128) as u64)
            .collect();
        Ok(GroupElement { coords })
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        let coords = a
            .coords
            .iter()
            .map(|&x| if x == 0 { 0 } else { self.n - x })
            .collect();
        Ok(GroupElement { coords })
    }

    /// The scalar multiple `k·a`; `k` may be negative.
    pub fn scale(&self, k: i64, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        let k = self.reduce(k) as u128;
        let coords = a
            .coords
            .iter()
            .map(|&x| ((x as u128 * k) % self.n as u128) as u64)
            .collect();
        Ok(GroupElement { coords })
    }

    pub fn index_of(&self, a: &GroupElement) -> Result<u64> {
        self.check(a)?;
        Ok(a.coords.iter().rev().fold(0u64, |acc, &c| acc * self.n + c))
    }

    pub fn element_at(&self, index: u64) -> Result<GroupElement> {
        if index >= self.order {
            return Err(Error::IndexOutOfRange { index, order: self.order });
        }
        let mut rest = index;
        let coords = (0..self.r)
            .map(|_| {
                let c = rest % self.n;
                rest /= self.n;
                c
            })
            .collect();
        Ok(GroupElement { coords })
    }

    /// All group elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(move |i| self.element_at(i).expect("index in range"))
    }

    /// Sum of two elements given by index. Indices must be in range.
    pub fn add_index(&self, a: u64, b: u64) -> u64 {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.r {
            let digit = (a % self.n + b % self.n) % self.n;
            out += digit * place;
            place = place.wrapping_mul(self.n);
            a /= self.n;
            b /= self.n;
        }
        out
    }

    /// `k·a` for an element given by index.
    pub fn scale_index(&self, k: u64, a: u64) -> u64 {
        let k = (k % self.n) as u128;
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.r {
            let digit = (((a % self.n) as u128 * k) % self.n as u128) as u64;
            out += digit * place;
            place = place.wrapping_mul(self.n);
            a /= self.n;
        }
        out
    }

    pub fn neg_index(&self, a: u64) -> u64 {
        self.scale_index(self.n - 1, a)
    }

    /// Representatives of the nonzero `{g, -g}` pairs, one per pair, choosing
    /// the member with the smaller index. Requires odd `n`.
    pub fn positive_half(&self) -> Result<Vec<GroupElement>> {
        if self.n.is_multiple_of(2) {
            return Err(Error::EvenModulus(self.n));
        }
        Ok((1..self.order)
            .filter(|&i| i < self.neg_index(i))
            .map(|i| self.element_at(i).expect("index in range"))
            .collect())
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r == 1 {
            write!(f, "C_{}", self.n)
        } else {
            write!(f, "C_{}^{}", self.n, self.r)
        }
    }
}

/// The set `A` of integer weights. Stored in preference order: by absolute
/// value, positive before negative, so `{-1, 1}` is kept as `[1, -1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightSet {
    weights: Vec<i64>,
}

impl WeightSet {
    pub fn new(mut weights: Vec<i64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("weight set must be nonempty".into()));
        }
        weights.sort_by_key(|&w| (w.unsigned_abs(), w < 0));
        weights.dedup();
        Ok(WeightSet { weights })
    }

    /// `A = {-1, 1}`.
    pub fn plus_minus_one() -> Self {
        WeightSet { weights: vec![1, -1] }
    }

    /// `A = {1}`, the unweighted case.
    pub fn unit() -> Self {
        WeightSet { weights: vec![1] }
    }

    /// Weights in preference order.
    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Distinct residues mod `n`, each paired with the first weight (in
    /// preference order) that reduces to it.
    pub fn residues(&self, group: &GroupParams) -> Vec<(u64, i64)> {
        let mut out: Vec<(u64, i64)> = Vec::with_capacity(self.weights.len());
        for &w in &self.weights {
            let res = group.reduce(w);
            if !out.iter().any(|&(r, _)| r == res) {
                out.push((res, w));
            }
        }
        out
    }

    /// True when the weights reduce to exactly `{1, n-1}` mod `n`.
    pub fn is_plus_minus_one(&self, group: &GroupParams) -> bool {
        let mut res: Vec<u64> = self.residues(group).into_iter().map(|(r, _)| r).collect();
        res.sort_unstable();
        let n = group.modulus();
        let mut expected = vec![1, n - 1];
        expected.sort_unstable();
        expected.dedup();
        res == expected
    }

    pub fn contains(&self, w: i64) -> bool {
        self.weights.contains(&w)
    }

    /// Weights in ascending numeric order, as written to JSON.
    pub fn sorted(&self) -> Vec<i64> {
        let mut v = self.weights.clone();
        v.sort_unstable();
        v
    }
}

impl Default for WeightSet {
    fn default() -> Self {
        Self::plus_minus_one()
    }
}

impl fmt::Display for WeightSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sorted().iter().map(|w| w.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for WeightSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        let weights = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::InvalidWeights(format!("not an integer: {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        WeightSet::new(weights)
    }
}

impl Serialize for WeightSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.sorted().serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        WeightSet::new(v).map_err(serde::de::Error::custom)
    }
}

/// A finite multiset of group elements, `g_1^{v_1} ... g_l^{v_l}`.
///
/// Entries keep first-insertion order; pushing an element that is already
/// present adds to its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    group: GroupParams,
    entries: Vec<(GroupElement, u64)>,
    lookup: HashMap<GroupElement, usize>,
}

impl Sequence {
    pub fn new(group: GroupParams) -> Self {
        Sequence { group, entries: Vec::new(), lookup: HashMap::new() }
    }

    pub fn from_elements<I>(group: GroupParams, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = GroupElement>,
    {
        let mut s = Sequence::new(group);
        for e in elements {
            s.push(e, 1)?;
        }
        Ok(s)
    }

    /// Builds a sequence from integer coordinate rows, reducing mod `n`.
    pub fn from_int_rows(group: GroupParams, rows: &[&[i64]]) -> Result<Self> {
        let elements = rows
            .iter()
            .map(|row| group.element_from_ints(row))
            .collect::<Result<Vec<_>>>()?;
        Sequence::from_elements(group, elements)
    }

    pub fn push(&mut self, element: GroupElement, multiplicity: u64) -> Result<()> {
        self.group.check(&element)?;
        if multiplicity == 0 {
            return Err(Error::Precondition("multiplicity must be positive".into()));
        }
        match self.lookup.get(&element) {
            Some(&i) => self.entries[i].1 += multiplicity,
            None => {
                self.lookup.insert(element.clone(), self.entries.len());
                self.entries.push((element, multiplicity));
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &GroupParams {
        &self.group
    }

    pub fn entries(&self) -> &[(GroupElement, u64)] {
        &self.entries
    }

    /// Total length, the sum of all multiplicities.
    pub fn len(&self) -> u64 {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn distinct_len(&self) -> usize {
        self.entries.len()
    }

    pub fn multiplicity(&self, element: &GroupElement) -> u64 {
        self.lookup.get(element).map_or(0, |&i| self.entries[i].1)
    }

    pub fn max_multiplicity(&self) -> u64 {
        self.entries.iter().map(|&(_, m)| m).max().unwrap_or(0)
    }

    pub fn has_distinct_elements(&self) -> bool {
        self.entries.iter().all(|&(_, m)| m == 1)
    }

    /// One element per copy, in entry order.
    pub fn expanded(&self) -> Vec<&GroupElement> {
        self.entries
            .iter()
            .flat_map(|(e, m)| std::iter::repeat_n(e, *m as usize))
            .collect()
    }

    /// The sequence with every element negated.
    pub fn negated(&self) -> Sequence {
        let mut out = Sequence::new(self.group);
        for (e, m) in &self.entries {
            out.push(self.group.neg(e).expect("element of this group"), *m)
                .expect("valid element");
        }
        out
    }

    /// Entries sorted by element index.
    pub fn sorted_entries(&self) -> Vec<(GroupElement, u64)> {
        let mut v = self.entries.clone();
        v.sort_by_key(|(e, _)| self.group.index_of(e).expect("element of this group"));
        v
    }

    /// Order-insensitive equality.
    pub fn same_multiset(&self, other: &Sequence) -> bool {
        self.group == other.group && self.sorted_entries() == other.sorted_entries()
    }
}

const HEADER: &str = "zsum-seq v1";

/// Parses the v1 sequence text format.
///
/// ```text
/// zsum-seq v1
/// n=3 r=2
/// 1,0 x2   # multiplicity suffix is optional
/// 0,1
/// ```
pub fn parse_sequence(text: &str) -> Result<Sequence> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (lineno, header) = lines
        .next()
        .ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    if header != HEADER {
        return Err(Error::Parse { line: lineno, msg: format!("expected {HEADER:?}") });
    }

    let (lineno, params) = lines
        .next()
        .ok_or(Error::Parse { line: lineno + 1, msg: "missing group line".into() })?;
    let group = parse_group_line(params)
        .ok_or_else(|| Error::Parse { line: lineno, msg: "expected `n=<n> r=<r>`".into() })?
        .map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;

    let mut seq = Sequence::new(group);
    for (lineno, line) in lines {
        let parse_err = |msg: String| Error::Parse { line: lineno, msg };
        let mut parts = line.split_whitespace();
        let coords_txt = parts.next().expect("nonempty line");
        let mult = match parts.next() {
            None => 1,
            Some(m) => {
                let digits = m
                    .strip_prefix('x')
                    .ok_or_else(|| parse_err(format!("bad multiplicity {m:?}")))?;
                digits
                    .parse::<u64>()
                    .map_err(|_| parse_err(format!("bad multiplicity {m:?}")))?
            }
        };
        if parts.next().is_some() {
            return Err(parse_err("trailing tokens".into()));
        }
        if mult == 0 {
            return Err(parse_err("multiplicity must be positive".into()));
        }
        let coords = coords_txt
            .split(',')
            .map(|c| c.trim().parse::<u64>().map_err(|_| parse_err(format!("bad coordinate {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let element = group.element(coords).map_err(|e| parse_err(e.to_string()))?;
        seq.push(element, mult)?;
    }
    Ok(seq)
}

fn parse_group_line(line: &str) -> Option<Result<GroupParams>> {
    let mut n = None;
    let mut r = None;
    for tok in line.split_whitespace() {
        let (key, value) = tok.split_once('=')?;
        match key {
            "n" => n = Some(value.parse::<u64>().ok()?),
            "r" => r = Some(value.parse::<usize>().ok()?),
            _ => return None,
        }
    }
    Some(GroupParams::new(n?, r?))
}

/// Writes the v1 text format, entries sorted by element index.
pub fn serialize_sequence(seq: &Sequence) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(&format!("n={} r={}\n", seq.group.modulus(), seq.group.rank()));
    for (e, m) in seq.sorted_entries() {
        let coords: Vec<String> = e.coords().iter().map(|c| c.to_string()).collect();
        out.push_str(&coords.join(","));
        if m > 1 {
            out.push_str(&format!(" x{m}"));
        }
        out.push('\n');
    }
    out
}

impl FromStr for Sequence {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_sequence(s)
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (e, m)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
            if *m > 1 {
                write!(f, "^{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(n: u64, r: usize) -> GroupParams {
        GroupParams::new(n, r).unwrap()
    }

    #[test]
    fn make_group_examples() {
        let c = g(3, 4);
        assert_eq!((c.order(), c.exponent()), (81, 3));
        let c = g(3, 1);
        assert_eq!((c.order(), c.exponent()), (3, 3));
        let c = g(5, 3);
        assert_eq!((c.order(), c.exponent()), (125, 5));
    }

    #[test]
    fn make_group_rejects_bad_params() {
        assert!(GroupParams::new(1, 2).is_err());
        assert!(GroupParams::new(3, 0).is_err());
        assert!(GroupParams::new(2, 41).is_err());
        assert!(GroupParams::new(2, 40).is_ok());
        assert!(GroupParams::new(u64::MAX, 2).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let c = g(3, 3);
        let a = c.element(vec![1, 2, 0]).unwrap();
        let b = c.element(vec![2, 2, 1]).unwrap();
        assert_eq!(c.add(&a, &b).unwrap().coords(), &[0, 1, 1]);
        let a = c.element(vec![1, 0, 2]).unwrap();
        assert_eq!(c.neg(&a).unwrap().coords(), &[2, 0, 1]);
        for x in c.elements() {
            assert!(c.scale(3, &x).unwrap().is_zero());
        }
        assert_eq!(c.scale(-1, &a).unwrap(), c.neg(&a).unwrap());
    }

    #[test]
    fn rank_mismatch_is_rejected() {
        let c = g(3, 2);
        let bad = g(3, 3).identity();
        assert!(matches!(
            c.add(&c.identity(), &bad),
            Err(Error::RankMismatch { expected: 2, got: 3 })
        ));
        assert!(c.element(vec![3, 0]).is_err());
    }

    #[test]
    fn encoding_examples() {
        let c = g(3, 2);
        assert!(c.element_at(0).unwrap().is_zero());
        assert_eq!(c.index_of(&c.element(vec![1, 0]).unwrap()).unwrap(), 1);
        assert_eq!(c.index_of(&c.element(vec![0, 1]).unwrap()).unwrap(), 3);
        assert!(c.element_at(9).is_err());
        let c = g(3, 4);
        for i in 0..81 {
            assert_eq!(c.index_of(&c.element_at(i).unwrap()).unwrap(), i);
        }
    }

    #[test]
    fn group_laws_small_groups() {
        for n in 2..=5 {
            for r in 1..=3 {
                let c = g(n, r);
                let els: Vec<_> = c.elements().collect();
                for a in &els {
                    assert_eq!(c.neg(&c.neg(a).unwrap()).unwrap(), *a);
                    assert!(c.scale(n as i64, a).unwrap().is_zero());
                    let ia = c.index_of(a).unwrap();
                    assert_eq!(c.index_of(&c.neg(a).unwrap()).unwrap(), c.neg_index(ia));
                    for b in &els {
                        let ab = c.add(a, b).unwrap();
                        assert_eq!(ab, c.add(b, a).unwrap());
                        let ib = c.index_of(b).unwrap();
                        assert_eq!(c.index_of(&ab).unwrap(), c.add_index(ia, ib));
                    }
                }
                // associativity on a stride to keep the cube small
                for a in els.iter().step_by(3) {
                    for b in els.iter().step_by(2) {
                        for d in &els {
                            let l = c.add(&c.add(a, b).unwrap(), d).unwrap();
                            let r = c.add(a, &c.add(b, d).unwrap()).unwrap();
                            assert_eq!(l, r);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn positive_half_examples() {
        let half = g(3, 1).positive_half().unwrap();
        assert_eq!(half.len(), 1);
        assert_eq!(half[0].coords(), &[1]);
        assert_eq!(g(3, 2).positive_half().unwrap().len(), 4);
        assert_eq!(g(3, 4).positive_half().unwrap().len(), 40);
        assert!(matches!(g(4, 2).positive_half(), Err(Error::EvenModulus(4))));
    }

    #[test]
    fn positive_half_partitions_group() {
        for r in 1..=5 {
            let c = g(3, r);
            let half = c.positive_half().unwrap();
            let mut seen = vec![0u8; c.order() as usize];
            seen[0] += 1;
            for x in &half {
                let i = c.index_of(x).unwrap();
                let j = c.index_of(&c.neg(x).unwrap()).unwrap();
                assert!(i < j);
                seen[i as usize] += 1;
                seen[j as usize] += 1;
            }
            assert!(seen.iter().all(|&s| s == 1), "r = {r}");
        }
    }

    #[test]
    fn weight_reduction() {
        let c = g(3, 1);
        let a = WeightSet::plus_minus_one();
        assert_eq!(a.weights(), &[1, -1]);
        assert_eq!(a.residues(&c), vec![(1, 1), (2, -1)]);
        assert!(a.is_plus_minus_one(&c));
        assert!(!WeightSet::unit().is_plus_minus_one(&c));
        assert!(WeightSet::new(vec![]).is_err());
        let parsed: WeightSet = "-1,1".parse().unwrap();
        assert_eq!(parsed, a);
        assert_eq!(a.to_string(), "{-1,1}");
        // 2 ≡ -1 mod 3 collapses onto the preferred representative
        let b = WeightSet::new(vec![2, -1, 1]).unwrap();
        assert_eq!(b.residues(&c), vec![(1, 1), (2, -1)]);
    }

    #[test]
    fn parse_examples() {
        let s = parse_sequence("zsum-seq v1\nn=3 r=2\n1,0 x2\n0,1 x2").unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.distinct_len(), 2);

        let text = "zsum-seq v1\n# comment\nn=3 r=2\n0,1\n1,0 # first\n0,1 x3\n";
        let s = parse_sequence(text).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.multiplicity(&g(3, 2).element(vec![0, 1]).unwrap()), 4);
        assert_eq!(serialize_sequence(&s), "zsum-seq v1\nn=3 r=2\n1,0\n0,1 x4\n");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_sequence("zsum-seq v2\nn=3 r=2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_sequence("zsum-seq v1\nn=3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_sequence("zsum-seq v1\nn=3 r=2\n3,0\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_sequence("zsum-seq v1\nn=3 r=2\n1,0 x0\n"), Err(Error::Parse { line: 3, .. })));
        assert!(parse_sequence("zsum-seq v1\nn=3 r=2\n1,0,0\n").is_err());
        assert!(parse_sequence("zsum-seq v1\nn=3 r=2\n1,-1\n").is_err());
        assert!(parse_sequence("").is_err());
    }

    fn arb_sequence() -> impl Strategy<Value = Sequence> {
        (2u64..=5, 1usize..=3).prop_flat_map(|(n, r)| {
            let c = g(n, r);
            prop::collection::vec((0..c.order(), 1u64..=4), 0..12).prop_map(move |items| {
                let mut s = Sequence::new(c);
                for (i, m) in items {
                    s.push(c.element_at(i).unwrap(), m).unwrap();
                }
                s
            })
        })
    }

    proptest! {
        #[test]
        fn serialize_parse_round_trip(s in arb_sequence()) {
            let text = serialize_sequence(&s);
            let back = parse_sequence(&text).unwrap();
            prop_assert!(back.same_multiset(&s));
            prop_assert_eq!(serialize_sequence(&back), text);
        }
    }
}
