//! Exact computation of `η_A`, `g_A` and `s_A` for small groups by extremal
//! search, plus the doubling/dedup transforms and relation cross-checks.
//!
//! Two engines:
//!
//! * **Cap search** (`n = 3`, `A = {-1,1}`, invariant `η`). A sequence with no
//!   weighted zero-sum of length at most 3 has nonzero, distinct, pairwise
//!   non-opposite elements, so it is a set of projective points; a forbidden
//!   triple is a projective line. The search is a bitset branch-and-bound for
//!   the largest line-free point set. A largest such set spans the space (any
//!   point off a hyperplane could be added), and `GL(r, 3)` acts transitively
//!   on ordered bases, so the search fixes `e_1..e_r` as chosen.
//! * **Generic search** (any modulus, any weights, any invariant). Depth-first
//!   over sequences in index order, keeping for each length `j < n` the set of
//!   weighted sums of `j`-element subsequences, so each extension is tested in
//!   one lookup. For prime `n` the first nonzero element is fixed to `e_1`;
//!   when every weight reduces to one residue and the length is exact, the
//!   sequence is translated to contain `0`.
//!
//! `g_A` and `s_A` over `C_3^r` with `A = {-1,1}` are derived from `η_A`
//! through `g = 2η - 1` and `s = g` (`r >= 2`) unless direct search is asked for.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, Invariant, Provenance, Source};
use crate::constructions::{constructions_for_c3, verify_construction};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Sequence, WeightSet};
use crate::zerosum::{condition_witness, find_short_zero_sum, ConditionKind};

/// Largest group order the generic search accepts.
pub const GENERIC_ORDER_LIMIT: u64 = 729;

/// Largest rank the cap search accepts.
pub const CAP_RANK_LIMIT: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Cap search for `η` and derivation for `g`, `s` where they apply.
    #[default]
    Auto,
    /// Generic search only.
    Direct,
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub budget: Duration,
    pub threads: usize,
    /// Single thread and no wall-clock field in results.
    pub deterministic: bool,
    /// Use imported literature constants to tighten intervals.
    pub allow_known: bool,
    pub method: Method,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: Duration::from_secs(600),
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            deterministic: false,
            allow_known: false,
            method: Method::Auto,
        }
    }
}

impl SearchOptions {
    pub fn deterministic() -> Self {
        SearchOptions { deterministic: true, threads: 1, ..Default::default() }
    }

    pub fn with_budget(mut self, budget: Duration) -> Self {
        self.budget = budget;
        self
    }

    fn effective_threads(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.threads.max(1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Exact,
    Interval,
}

/// Value or interval for one invariant, with the extremal certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantResult {
    pub group: GroupParams,
    pub weights: WeightSet,
    pub which: Invariant,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<u64>,
    /// A longest sequence known to fail the condition, one row per copy.
    pub certificate: Option<Vec<Vec<u64>>>,
    pub exhausted: bool,
    pub nodes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
    pub method: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl InvariantResult {
    pub fn lower_bound(&self) -> u64 {
        self.value.or(self.lower).expect("validated result")
    }

    pub fn upper_bound(&self) -> u64 {
        self.value.or(self.upper).expect("validated result")
    }

    pub fn is_exact(&self) -> bool {
        self.status == Status::Exact
    }

    pub fn condition(&self) -> ConditionKind {
        condition_for(self.which)
    }

    pub fn certificate_sequence(&self) -> Result<Option<Sequence>> {
        let Some(rows) = &self.certificate else { return Ok(None) };
        let mut seq = Sequence::new(self.group);
        for row in rows {
            let e = self.group.element(row.clone()).map_err(|e| Error::Certificate(e.to_string()))?;
            seq.push(e, 1)?;
        }
        Ok(Some(seq))
    }

    /// Checks field consistency and replays the certificate: it must have
    /// length `lower - 1` and fail the condition.
    pub fn verify_certificate(&self) -> Result<()> {
        self.check_shape()?;
        let Some(seq) = self.certificate_sequence()? else { return Ok(()) };
        let want = self.lower_bound() - 1;
        if seq.len() != want {
            return Err(Error::Certificate(format!(
                "certificate has length {}, expected {want}",
                seq.len()
            )));
        }
        let kind = self.condition();
        if kind == ConditionKind::G && !seq.has_distinct_elements() {
            return Err(Error::Certificate("g certificate repeats an element".into()));
        }
        if let Some(w) = condition_witness(&seq, kind, &self.weights)? {
            return Err(Error::Certificate(format!("certificate satisfies the condition: {w}")));
        }
        Ok(())
    }

    fn check_shape(&self) -> Result<()> {
        match self.status {
            Status::Exact if self.value.is_some() && self.lower.is_none() && self.upper.is_none() => Ok(()),
            Status::Interval => match (self.value, self.lower, self.upper) {
                (None, Some(l), Some(u)) if l <= u => Ok(()),
                _ => Err(Error::Certificate("interval needs lower <= upper and no value".into())),
            },
            Status::Exact => Err(Error::Certificate("exact result needs a value and no interval".into())),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: InvariantResult =
            serde_json::from_str(text).map_err(|e| Error::Certificate(e.to_string()))?;
        r.check_shape()?;
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result serializes")
    }

    /// The result as a bound source for merging.
    pub fn as_source(&self) -> Source {
        let prov = if self.is_exact() { Provenance::SearchExact } else { Provenance::SearchInterval };
        Source::interval(self.which, self.lower_bound(), self.upper_bound(), prov)
    }
}

pub fn condition_for(which: Invariant) -> ConditionKind {
    match which {
        Invariant::Eta => ConditionKind::Eta,
        Invariant::G => ConditionKind::G,
        Invariant::S => ConditionKind::S,
    }
}

struct Outcome {
    best: Vec<GroupElement>,
    exhausted: bool,
    nodes: u64,
}

#[allow(clippy::too_many_arguments)]
fn build_result(
    group: GroupParams,
    weights: &WeightSet,
    which: Invariant,
    lower: u64,
    upper: u64,
    certificate: Option<Vec<GroupElement>>,
    exhausted: bool,
    nodes: u64,
    started: Instant,
    opts: &SearchOptions,
    method: &str,
    notes: Vec<String>,
) -> Result<InvariantResult> {
    if lower > upper {
        return Err(Error::Contradiction(format!(
            "{which} of {group}: search lower {lower} exceeds upper {upper}"
        )));
    }
    let exact = lower == upper;
    let certificate = certificate.map(|mut elems| {
        elems.sort_by_key(|e| group.index_of(e).expect("element of group"));
        elems.into_iter().map(|e| e.coords().to_vec()).collect()
    });
    Ok(InvariantResult {
        group,
        weights: weights.clone(),
        which,
        status: if exact { Status::Exact } else { Status::Interval },
        value: exact.then_some(lower),
        lower: (!exact).then_some(lower),
        upper: (!exact).then_some(upper),
        certificate,
        exhausted,
        nodes,
        seconds: (!opts.deterministic).then(|| started.elapsed().as_secs_f64()),
        method: method.to_string(),
        notes,
    })
}

fn is_c3_pm(group: &GroupParams, weights: &WeightSet) -> bool {
    group.modulus() == 3 && weights.is_plus_minus_one(group)
}

/// `η_A(G)`: cap search for `C_3^r` with `{-1,1}`, generic search otherwise.
pub fn compute_eta(group: &GroupParams, weights: &WeightSet, opts: &SearchOptions) -> Result<InvariantResult> {
    if is_c3_pm(group, weights) && opts.method == Method::Auto {
        cap_eta(group, weights, opts)
    } else {
        generic(group, weights, Invariant::Eta, opts)
    }
}

/// `g_A(G)`: derived from `η` for `C_3^r` with `{-1,1}`, generic search otherwise.
pub fn compute_g(group: &GroupParams, weights: &WeightSet, opts: &SearchOptions) -> Result<InvariantResult> {
    if is_c3_pm(group, weights) && opts.method == Method::Auto {
        derive_g_from_eta(&cap_eta(group, weights, opts)?)
    } else {
        generic(group, weights, Invariant::G, opts)
    }
}

/// `s_A(G)`: derived from `η` for `C_3^r`, `r >= 2`, with `{-1,1}`, generic search otherwise.
pub fn compute_s(group: &GroupParams, weights: &WeightSet, opts: &SearchOptions) -> Result<InvariantResult> {
    if is_c3_pm(group, weights) && group.rank() >= 2 && opts.method == Method::Auto {
        derive_s_from_eta(&cap_eta(group, weights, opts)?)
    } else {
        generic(group, weights, Invariant::S, opts)
    }
}

pub fn compute(
    which: Invariant,
    group: &GroupParams,
    weights: &WeightSet,
    opts: &SearchOptions,
) -> Result<InvariantResult> {
    match which {
        Invariant::Eta => compute_eta(group, weights, opts),
        Invariant::G => compute_g(group, weights, opts),
        Invariant::S => compute_s(group, weights, opts),
    }
}

fn derive_from_eta(eta: &InvariantResult, which: Invariant, min_rank: usize) -> Result<InvariantResult> {
    if eta.which != Invariant::Eta {
        return Err(Error::Precondition(format!("expected an eta result, got {}", eta.which)));
    }
    if !is_c3_pm(&eta.group, &eta.weights) {
        return Err(Error::Precondition("derivation needs C_3^r with weights {-1,1}".into()));
    }
    if eta.group.rank() < min_rank {
        return Err(Error::Precondition(format!(
            "{which} = 2*eta - 1 needs rank at least {min_rank}, got {}",
            eta.group.rank()
        )));
    }
    let certificate = match eta.certificate_sequence()? {
        Some(seq) => Some(doubling_transform(&seq)?.expanded().into_iter().cloned().collect()),
        None => None,
    };
    let mut notes = eta.notes.clone();
    notes.push(match which {
        Invariant::S => "s = g = 2*eta - 1; certificate is the doubled eta certificate".into(),
        _ => "g = 2*eta - 1; certificate is the doubled eta certificate".into(),
    });
    let mut out = build_result(
        eta.group,
        &eta.weights,
        which,
        2 * eta.lower_bound() - 1,
        2 * eta.upper_bound() - 1,
        certificate,
        eta.exhausted,
        eta.nodes,
        Instant::now(),
        &SearchOptions::deterministic(),
        "derived_from_eta",
        notes,
    )?;
    out.seconds = eta.seconds;
    Ok(out)
}

/// `s_A = g_A = 2η_A - 1` over `C_3^r`, `r >= 2`. Intervals map endpoint-wise.
pub fn derive_s_from_eta(eta: &InvariantResult) -> Result<InvariantResult> {
    derive_from_eta(eta, Invariant::S, 2)
}

/// `g_A = 2η_A - 1` over `C_3^r`, `r >= 1`.
pub fn derive_g_from_eta(eta: &InvariantResult) -> Result<InvariantResult> {
    derive_from_eta(eta, Invariant::G, 1)
}

fn require_c3(seq: &Sequence) -> Result<()> {
    if seq.group().modulus() != 3 {
        return Err(Error::Precondition(format!(
            "transform needs modulus 3, got {}",
            seq.group().modulus()
        )));
    }
    Ok(())
}

/// `S ↦ S·(-S)` for a sequence over `C_3^r` failing `(η_A)`. The result has
/// distinct elements and no `{-1,1}`-zero-sum of length 3.
pub fn doubling_transform(seq: &Sequence) -> Result<Sequence> {
    require_c3(seq)?;
    let group = *seq.group();
    if !seq.has_distinct_elements() {
        return Err(Error::Precondition("doubling needs distinct elements".into()));
    }
    for (e, _) in seq.entries() {
        if e.is_zero() {
            return Err(Error::Precondition("doubling needs nonzero elements".into()));
        }
        if seq.multiplicity(&group.neg(e)?) > 0 {
            return Err(Error::Precondition(format!("{e} and its negative both occur")));
        }
    }
    if !seq.is_empty() {
        if let Some(w) = find_short_zero_sum(seq, 3, &WeightSet::plus_minus_one())? {
            return Err(Error::Precondition(format!("input satisfies the eta condition: {w}")));
        }
    }
    let mut out = seq.clone();
    for (e, _) in seq.entries() {
        out.push(group.neg(e)?, 1)?;
    }
    Ok(out)
}

/// Replaces each doubled `g` of a sequence over `C_3^r` failing `(s_A)` by
/// `g, -g`, giving a distinct-element sequence of the same length.
pub fn dedup_transform(seq: &Sequence) -> Result<Sequence> {
    require_c3(seq)?;
    let group = *seq.group();
    for (e, m) in seq.entries() {
        if e.is_zero() {
            return Err(Error::Precondition("dedup needs nonzero elements".into()));
        }
        if *m >= 3 {
            return Err(Error::Precondition(format!("{e} occurs {m} times")));
        }
        if *m == 2 && seq.multiplicity(&group.neg(e)?) > 0 {
            return Err(Error::Precondition(format!("{e} is doubled and its negative occurs")));
        }
    }
    if seq.len() >= 3 {
        if let Some(w) = condition_witness(seq, ConditionKind::S, &WeightSet::plus_minus_one())? {
            return Err(Error::Precondition(format!("input satisfies the s condition: {w}")));
        }
    }
    let mut out = Sequence::new(group);
    for (e, m) in seq.entries() {
        out.push(e.clone(), 1)?;
        if *m == 2 {
            out.push(group.neg(e)?, 1)?;
        }
    }
    Ok(out)
}

/// One relation check between invariants of the same `C_3^r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub r: usize,
    pub relation: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
    pub flags: Vec<String>,
    /// Results ignored because they are not over `C_3^r` with `{-1,1}`.
    pub skipped: usize,
}

impl RelationReport {
    pub fn consistent(&self) -> bool {
        self.flags.is_empty()
    }
}

fn show(lo: u64, hi: u64) -> String {
    if lo == hi {
        lo.to_string()
    } else {
        format!("[{lo}, {hi}]")
    }
}

/// Flags violations of `g = 2η - 1` (all `r`), `s = g` (`r >= 2`) and `s >= g`.
/// Intervals are consistent when some values inside them satisfy the relation.
pub fn cross_check_relations(results: &[InvariantResult]) -> RelationReport {
    let mut report = RelationReport::default();
    let mut by_rank: BTreeMap<usize, BTreeMap<Invariant, (u64, u64)>> = BTreeMap::new();
    for res in results {
        if !is_c3_pm(&res.group, &res.weights) {
            report.skipped += 1;
            continue;
        }
        by_rank
            .entry(res.group.rank())
            .or_default()
            .entry(res.which)
            .or_insert((res.lower_bound(), res.upper_bound()));
    }
    for (r, vals) in by_rank {
        let mut check = |relation: &str, ok: bool, detail: String| {
            if !ok {
                report.flags.push(format!("r = {r}: {relation} violated ({detail})"));
            }
            report.checks.push(RelationCheck { r, relation: relation.into(), ok, detail });
        };
        let eta = vals.get(&Invariant::Eta).copied();
        let g = vals.get(&Invariant::G).copied();
        let s = vals.get(&Invariant::S).copied();
        if let (Some((el, eu)), Some((gl, gu))) = (eta, g) {
            let (lo, hi) = (2 * el - 1, 2 * eu - 1);
            check(
                "g = 2*eta - 1",
                lo.max(gl) <= hi.min(gu),
                format!("eta = {}, g = {}", show(el, eu), show(gl, gu)),
            );
        }
        if let (Some((sl, su)), Some((gl, gu))) = (s, g) {
            let detail = format!("s = {}, g = {}", show(sl, su), show(gl, gu));
            if r >= 2 {
                check("s = g", sl.max(gl) <= su.min(gu), detail.clone());
            }
            check("s >= g", su >= gl, detail);
        }
    }
    report
}

// ---------------------------------------------------------------------------
// cap search

#[derive(Clone, Copy)]
struct Bits<const W: usize>([u64; W]);

impl<const W: usize> Bits<W> {
    fn empty() -> Self {
        Bits([0; W])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }
}

/// Projective points of `C_3^r` (the positive half) and, for each pair, the
/// two further points on their line.
struct Geometry {
    group: GroupParams,
    points: Vec<u64>,
    third: Vec<[u32; 2]>,
}

impl Geometry {
    fn new(group: GroupParams) -> Result<Self> {
        let points: Vec<u64> = group
            .positive_half()?
            .iter()
            .map(|e| group.index_of(e))
            .collect::<Result<_>>()?;
        let mut id = vec![u32::MAX; group.order() as usize];
        for (k, &p) in points.iter().enumerate() {
            id[p as usize] = k as u32;
            id[group.neg_index(p) as usize] = k as u32;
        }
        let np = points.len();
        let mut third = vec![[u32::MAX; 2]; np * np];
        for a in 0..np {
            for b in (a + 1)..np {
                let (x, y) = (points[a], points[b]);
                let sum = id[group.add_index(x, y) as usize];
                let diff = id[group.add_index(x, group.neg_index(y)) as usize];
                third[a * np + b] = [sum, diff];
                third[b * np + a] = [sum, diff];
            }
        }
        Ok(Geometry { group, points, third })
    }

    fn kills(&self, a: usize, b: usize) -> [u32; 2] {
        self.third[a * self.points.len() + b]
    }
}

struct Shared {
    deadline: Instant,
    stop: AtomicBool,
    best: AtomicUsize,
    best_set: Mutex<Vec<usize>>,
    nodes: AtomicU64,
}

struct CapWorker<'a, const W: usize> {
    geo: &'a Geometry,
    shared: &'a Shared,
    nodes: u64,
}

impl<const W: usize> CapWorker<'_, W> {
    fn record(&self, chosen: &[usize]) {
        if chosen.len() <= self.shared.best.load(Ordering::Acquire) {
            return;
        }
        let mut set = self.shared.best_set.lock().expect("lock");
        if chosen.len() > self.shared.best.load(Ordering::Acquire) {
            *set = chosen.to_vec();
            self.shared.best.store(chosen.len(), Ordering::Release);
        }
    }

    fn out_of_time(&mut self) -> bool {
        if self.shared.stop.load(Ordering::Relaxed) {
            return true;
        }
        if self.nodes.is_multiple_of(1024) && Instant::now() >= self.shared.deadline {
            self.shared.stop.store(true, Ordering::Relaxed);
            return true;
        }
        false
    }

    fn include(&self, chosen: &[usize], p: usize, mut cand: Bits<W>) -> Bits<W> {
        for &c in chosen {
            for t in self.geo.kills(p, c) {
                cand.clear(t as usize);
            }
        }
        cand
    }

    fn dfs(&mut self, chosen: &mut Vec<usize>, mut cand: Bits<W>) {
        self.nodes += 1;
        self.record(chosen);
        if self.out_of_time() {
            return;
        }
        while let Some(p) = cand.first() {
            if chosen.len() + cand.count() <= self.shared.best.load(Ordering::Acquire) {
                return;
            }
            cand.clear(p);
            let next = self.include(chosen, p, cand);
            chosen.push(p);
            self.dfs(chosen, next);
            chosen.pop();
            if self.shared.stop.load(Ordering::Relaxed) {
                return;
            }
        }
    }
}

fn run_cap_search<const W: usize>(geo: &Geometry, budget: Duration, threads: usize) -> (Vec<usize>, bool, u64) {
    let group = geo.group;
    let r = group.rank();
    let point_id = |idx: u64| geo.points.iter().position(|&p| p == idx).expect("basis point");
    let basis: Vec<usize> = (0..r).map(|j| point_id(group.modulus().pow(j as u32))).collect();

    let mut cand = Bits::<W>::empty();
    for k in 0..geo.points.len() {
        cand.set(k);
    }
    for (i, &a) in basis.iter().enumerate() {
        cand.clear(a);
        for &b in &basis[..i] {
            for t in geo.kills(a, b) {
                cand.clear(t as usize);
            }
        }
    }

    let shared = Shared {
        deadline: Instant::now() + budget,
        stop: AtomicBool::new(false),
        best: AtomicUsize::new(basis.len()),
        best_set: Mutex::new(basis.clone()),
        nodes: AtomicU64::new(1),
    };

    // top-level tasks: include the k-th candidate, exclude all earlier ones
    let mut tasks = Vec::new();
    let mut rest = cand;
    while let Some(p) = rest.first() {
        rest.clear(p);
        tasks.push((p, rest));
    }
    let next_task = AtomicUsize::new(0);
    let work = || {
        let mut w = CapWorker::<W> { geo, shared: &shared, nodes: 0 };
        let mut chosen = basis.clone();
        loop {
            let k = next_task.fetch_add(1, Ordering::Relaxed);
            if k >= tasks.len() || shared.stop.load(Ordering::Relaxed) {
                break;
            }
            let (p, later) = tasks[k];
            if chosen.len() + 1 + later.count() <= shared.best.load(Ordering::Acquire) {
                continue;
            }
            let next = w.include(&chosen, p, later);
            chosen.push(p);
            w.dfs(&mut chosen, next);
            chosen.pop();
        }
        shared.nodes.fetch_add(w.nodes, Ordering::Relaxed);
    };
    if threads <= 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..threads {
                s.spawn(work);
            }
        });
    }
    let exhausted = !shared.stop.load(Ordering::Relaxed);
    let best = shared.best_set.into_inner().expect("lock");
    (best, exhausted, shared.nodes.load(Ordering::Relaxed))
}

fn cap_search(group: &GroupParams, opts: &SearchOptions) -> Result<Outcome> {
    let geo = Geometry::new(*group)?;
    let threads = opts.effective_threads();
    let (best, exhausted, nodes) = match geo.points.len() {
        0..=64 => run_cap_search::<1>(&geo, opts.budget, threads),
        65..=128 => run_cap_search::<2>(&geo, opts.budget, threads),
        129..=384 => run_cap_search::<6>(&geo, opts.budget, threads),
        _ => run_cap_search::<18>(&geo, opts.budget, threads),
    };
    let best = best
        .into_iter()
        .map(|k| group.element_at(geo.points[k]))
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome { best, exhausted, nodes })
}

/// Upper bound on `η_A(C_3^r)` from closed forms, and literature constants
/// when allowed. Values established only by this search are left out.
fn eta_upper_c3(r: usize, allow_known: bool) -> Result<Bound> {
    let mut sources: Vec<Source> = bounds::closed_form_sources(3, r)
        .into_iter()
        .filter(|s| {
            let tagged = |b: Option<bounds::Bound>| b.is_some_and(|b| b.source == Provenance::Theorem3);
            !tagged(s.lower) && !tagged(s.upper)
        })
        .collect();
    if allow_known {
        sources.extend(bounds::known_sources(3, r));
    }
    let recs = bounds::merge_c3(r, &sources)?;
    Ok(recs[0].upper)
}

type Bound = bounds::Bound;

fn cap_eta(group: &GroupParams, weights: &WeightSet, opts: &SearchOptions) -> Result<InvariantResult> {
    let started = Instant::now();
    let r = group.rank();
    let (mut best, exhausted, nodes) = if r <= CAP_RANK_LIMIT {
        let o = cap_search(group, opts)?;
        (o.best, o.exhausted, o.nodes)
    } else {
        let basis = (0..r).map(|j| group.basis(j)).collect::<Result<Vec<_>>>()?;
        (basis, false, 0)
    };
    let mut notes = Vec::new();
    if exhausted {
        let value = best.len() as u64 + 1;
        return build_result(
            *group, weights, Invariant::Eta, value, value, Some(best), true, nodes, started, opts, "cap_search", notes,
        );
    }
    // budget ran out: fold in verified constructions
    for spec in constructions_for_c3(r) {
        let rep = verify_construction(&spec)?;
        if rep.passed() && rep.implied_bound.invariant == Invariant::Eta && rep.length as usize > best.len() {
            notes.push(format!("lower bound from verified {} construction", spec.family));
            best = spec.generate()?.expanded().into_iter().cloned().collect();
        }
    }
    let upper = eta_upper_c3(r, opts.allow_known)?;
    notes.push(format!("upper bound from {}", upper.source));
    let lower = best.len() as u64 + 1;
    build_result(
        *group, weights, Invariant::Eta, lower, upper.value.max(lower), Some(best), false, nodes, started, opts,
        "cap_search", notes,
    )
}

// ---------------------------------------------------------------------------
// generic search

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

struct Generic {
    kind: ConditionKind,
    n: usize,
    order: usize,
    add: Vec<u32>,
    /// `scaled[k][x]` is weight residue `k` times element `x`.
    scaled: Vec<Vec<u32>>,
    neg: Vec<u32>,
    prime: bool,
    translate: bool,
    deadline: Instant,
    nodes: u64,
    stopped: bool,
    best: Vec<u32>,
}

impl Generic {
    /// Whether one more copy of `x` keeps the sequence free of the condition.
    fn addable(&self, tables: &[FixedBitSet], x: usize) -> bool {
        self.scaled.iter().all(|row| {
            let target = self.neg[row[x] as usize] as usize;
            match self.kind {
                ConditionKind::Eta => tables.iter().all(|t| !t.contains(target)),
                _ => !tables[self.n - 1].contains(target),
            }
        })
    }

    fn extend(&self, tables: &[FixedBitSet], x: usize) -> Vec<FixedBitSet> {
        let mut out = tables.to_vec();
        for j in (1..self.n).rev() {
            for row in &self.scaled {
                let shift = row[x] as usize;
                for v in tables[j - 1].ones() {
                    out[j].insert(self.add[v * self.order + shift] as usize);
                }
            }
        }
        out
    }

    fn dfs(&mut self, seq: &mut Vec<u32>, tables: &[FixedBitSet], start: usize) {
        self.nodes += 1;
        if seq.len() > self.best.len() {
            self.best = seq.clone();
        }
        if self.nodes.is_multiple_of(256) && Instant::now() >= self.deadline {
            self.stopped = true;
        }
        if self.stopped {
            return;
        }
        let distinct = self.kind == ConditionKind::G;
        let candidates: Vec<usize> = (start..self.order).filter(|&x| self.addable(tables, x)).collect();
        let room: usize = candidates
            .iter()
            .map(|&x| {
                if distinct {
                    1
                } else {
                    self.n - 1 - seq.iter().filter(|&&v| v as usize == x).count()
                }
            })
            .sum();
        if seq.len() + room <= self.best.len() {
            return;
        }
        let has_nonzero = seq.iter().any(|&v| v != 0);
        for x in candidates {
            if self.translate && seq.is_empty() && x != 0 {
                break;
            }
            if self.prime && !has_nonzero && x > 1 {
                break;
            }
            let next = self.extend(tables, x);
            seq.push(x as u32);
            self.dfs(seq, &next, if distinct { x + 1 } else { x });
            seq.pop();
            if self.stopped {
                return;
            }
        }
    }
}

fn trivial_upper(group: &GroupParams, which: Invariant) -> u64 {
    let order = group.order();
    match which {
        Invariant::G => order + 1,
        _ => order.saturating_mul(group.modulus() - 1).saturating_add(1),
    }
}

fn generic(group: &GroupParams, weights: &WeightSet, which: Invariant, opts: &SearchOptions) -> Result<InvariantResult> {
    let started = Instant::now();
    if group.order() > GENERIC_ORDER_LIMIT {
        return Err(Error::Unsupported(format!(
            "direct search needs group order at most {GENERIC_ORDER_LIMIT}, got {}",
            group.order()
        )));
    }
    let order = group.order() as usize;
    let n = group.modulus() as usize;
    let residues: Vec<u64> = weights.residues(group).into_iter().map(|(r, _)| r).collect();
    let mut add = vec![0u32; order * order];
    for a in 0..order {
        for b in 0..order {
            add[a * order + b] = group.add_index(a as u64, b as u64) as u32;
        }
    }
    let scaled = residues
        .iter()
        .map(|&w| (0..order).map(|x| group.scale_index(w, x as u64) as u32).collect())
        .collect();
    let neg = (0..order).map(|x| group.neg_index(x as u64) as u32).collect();
    let kind = condition_for(which);
    let mut search = Generic {
        kind,
        n,
        order,
        add,
        scaled,
        neg,
        prime: is_prime(group.modulus()),
        translate: residues.len() == 1 && kind != ConditionKind::Eta,
        deadline: started + opts.budget,
        nodes: 0,
        stopped: false,
        best: Vec::new(),
    };
    let mut tables = vec![FixedBitSet::with_capacity(order); n];
    tables[0].insert(0);
    let mut seq = Vec::new();
    search.dfs(&mut seq, &tables, 0);

    let best = search
        .best
        .iter()
        .map(|&x| group.element_at(x as u64))
        .collect::<Result<Vec<_>>>()?;
    let lower = best.len() as u64 + 1;
    let exhausted = !search.stopped;
    let mut notes = Vec::new();
    let upper = if exhausted {
        lower
    } else {
        let mut up = trivial_upper(group, which);
        if is_c3_pm(group, weights) && opts.allow_known {
            if let Ok(rec) = bounds::bound_table(3, group.rank(), bounds::TableOptions { known: true }, &[]) {
                let idx = Invariant::ALL.iter().position(|&w| w == which).expect("invariant");
                up = up.min(rec[idx].upper.value);
            }
        }
        notes.push("upper bound from counting or imported bounds".into());
        up.max(lower)
    };
    build_result(
        *group, weights, which, lower, upper, Some(best), exhausted, search.nodes, started, opts, "generic_search", notes,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3(r: usize) -> GroupParams {
        GroupParams::new(3, r).unwrap()
    }

    fn pm() -> WeightSet {
        WeightSet::plus_minus_one()
    }

    fn det() -> SearchOptions {
        SearchOptions::deterministic().with_budget(Duration::from_secs(60))
    }

    #[test]
    fn eta_small_ranks() {
        for (r, want) in [(1, 2), (2, 3), (3, 5)] {
            let res = compute_eta(&c3(r), &pm(), &det()).unwrap();
            assert_eq!(res.value, Some(want), "r = {r}");
            assert!(res.exhausted);
            res.verify_certificate().unwrap();
        }
    }

    #[test]
    fn g_and_s_small_ranks() {
        assert_eq!(compute_g(&c3(1), &pm(), &det()).unwrap().value, Some(3));
        assert_eq!(compute_s(&c3(1), &pm(), &det()).unwrap().value, Some(4));
        let g3 = compute_g(&c3(3), &pm(), &det()).unwrap();
        assert_eq!(g3.value, Some(9));
        g3.verify_certificate().unwrap();
        let s2 = compute_s(&c3(2), &pm(), &det()).unwrap();
        assert_eq!(s2.value, Some(5));
        s2.verify_certificate().unwrap();
    }

    #[test]
    fn direct_matches_cap_search() {
        let direct = SearchOptions { method: Method::Direct, ..det() };
        for r in 1..=3 {
            let a = compute_eta(&c3(r), &pm(), &det()).unwrap();
            let b = compute_eta(&c3(r), &pm(), &direct).unwrap();
            assert_eq!(a.value, b.value, "r = {r}");
            b.verify_certificate().unwrap();
        }
        let s = compute_s(&c3(2), &pm(), &direct).unwrap();
        assert_eq!(s.value, Some(5));
        let g = compute_g(&c3(2), &pm(), &direct).unwrap();
        assert_eq!(g.value, Some(5));
    }

    #[test]
    fn unit_weights() {
        let unit = WeightSet::unit();
        assert_eq!(compute_s(&c3(1), &unit, &det()).unwrap().value, Some(5));
        assert_eq!(compute_g(&c3(2), &unit, &det()).unwrap().value, Some(5));
    }

    #[test]
    fn tiny_budget_gives_interval() {
        let opts = SearchOptions::deterministic().with_budget(Duration::ZERO);
        let res = compute_eta(&c3(5), &pm(), &opts).unwrap();
        assert_eq!(res.status, Status::Interval);
        assert!(!res.exhausted);
        assert!(res.lower_bound() >= 21);
        assert!(res.upper_bound() >= 23);
        res.verify_certificate().unwrap();

        let known = SearchOptions { allow_known: true, ..opts };
        let res = compute_eta(&c3(5), &pm(), &known).unwrap();
        assert_eq!((res.lower_bound(), res.upper_bound()), (21, 23));

        let s = derive_s_from_eta(&res).unwrap();
        assert_eq!((s.lower_bound(), s.upper_bound()), (41, 45));
        s.verify_certificate().unwrap();
    }

    #[test]
    fn derive_examples() {
        let eta3 = compute_eta(&c3(3), &pm(), &det()).unwrap();
        assert_eq!(derive_s_from_eta(&eta3).unwrap().value, Some(9));
        let eta1 = compute_eta(&c3(1), &pm(), &det()).unwrap();
        assert!(matches!(derive_s_from_eta(&eta1), Err(Error::Precondition(_))));
        assert_eq!(derive_g_from_eta(&eta1).unwrap().value, Some(3));
        let g = compute_g(&c3(2), &pm(), &det()).unwrap();
        assert!(derive_s_from_eta(&g).is_err());
    }

    #[test]
    fn doubling_examples() {
        let g = c3(2);
        let s = Sequence::from_int_rows(g, &[&[1, 0], &[0, 1]]).unwrap();
        let d = doubling_transform(&s).unwrap();
        let want = Sequence::from_int_rows(g, &[&[1, 0], &[0, 1], &[2, 0], &[0, 2]]).unwrap();
        assert!(d.same_multiset(&want));
        assert!(!crate::zerosum::satisfies_condition(&d, ConditionKind::G, &pm()).unwrap());

        let bad = Sequence::from_int_rows(g, &[&[1, 0], &[2, 0]]).unwrap();
        assert!(doubling_transform(&bad).is_err());
        let zero = Sequence::from_int_rows(g, &[&[0, 0]]).unwrap();
        assert!(doubling_transform(&zero).is_err());
    }

    #[test]
    fn dedup_examples() {
        let g = c3(2);
        let s = Sequence::from_int_rows(g, &[&[1, 0], &[1, 0], &[0, 1]]).unwrap();
        let d = dedup_transform(&s).unwrap();
        let want = Sequence::from_int_rows(g, &[&[1, 0], &[2, 0], &[0, 1]]).unwrap();
        assert!(d.same_multiset(&want));
        assert!(d.has_distinct_elements());
        assert!(!crate::zerosum::satisfies_condition(&d, ConditionKind::G, &pm()).unwrap());

        let plain = Sequence::from_int_rows(g, &[&[1, 0], &[0, 1]]).unwrap();
        assert!(dedup_transform(&plain).unwrap().same_multiset(&plain));

        let triple = Sequence::from_int_rows(g, &[&[1, 0], &[1, 0], &[1, 0]]).unwrap();
        assert!(dedup_transform(&triple).is_err());
        let clash = Sequence::from_int_rows(g, &[&[1, 0], &[1, 0], &[2, 0]]).unwrap();
        assert!(dedup_transform(&clash).is_err());
    }

    fn fake(r: usize, which: Invariant, lo: u64, hi: u64) -> InvariantResult {
        build_result(
            c3(r), &pm(), which, lo, hi, None, true, 0, Instant::now(), &SearchOptions::deterministic(), "test", vec![],
        )
        .unwrap()
    }

    #[test]
    fn relation_examples() {
        let ok = cross_check_relations(&[
            fake(2, Invariant::Eta, 3, 3),
            fake(2, Invariant::G, 5, 5),
            fake(2, Invariant::S, 5, 5),
        ]);
        assert!(ok.consistent());
        assert_eq!(ok.checks.len(), 3);

        let r1 = cross_check_relations(&[
            fake(1, Invariant::Eta, 2, 2),
            fake(1, Invariant::G, 3, 3),
            fake(1, Invariant::S, 4, 4),
        ]);
        assert!(r1.consistent());

        let bad = cross_check_relations(&[fake(3, Invariant::Eta, 5, 5), fake(3, Invariant::G, 8, 8)]);
        assert_eq!(bad.flags.len(), 1);

        let interval = cross_check_relations(&[fake(5, Invariant::Eta, 21, 23), fake(5, Invariant::S, 41, 45)]);
        assert!(interval.consistent());
    }

    #[test]
    fn json_round_trip_and_tamper() {
        let res = compute_eta(&c3(3), &pm(), &det()).unwrap();
        let text = res.to_json();
        assert!(!text.contains("seconds"));
        let back = InvariantResult::from_json(&text).unwrap();
        assert_eq!(back, res);
        back.verify_certificate().unwrap();

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["value"] = 6.into();
        let tampered = InvariantResult::from_json(&v.to_string()).unwrap();
        assert!(matches!(tampered.verify_certificate(), Err(Error::Certificate(_))));

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["certificate"][0] = serde_json::json!([0, 0, 0]);
        let tampered = InvariantResult::from_json(&v.to_string()).unwrap();
        assert!(tampered.verify_certificate().is_err());
    }

    #[test]
    fn cap_search_is_deterministic() {
        let a = compute_eta(&c3(4), &pm(), &det()).unwrap();
        let b = compute_eta(&c3(4), &pm(), &det()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
