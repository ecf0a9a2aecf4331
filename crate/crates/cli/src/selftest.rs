//! Built-in check battery behind `zsum selftest`.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use zsum_core::bounds::{self, Invariant, Provenance, Source};
use zsum_core::constructions::{verify_construction, ConstructionSpec, Family};
use zsum_core::invariants::{self, Method, SearchOptions};
use zsum_core::zerosum::{
    extract_pigeonhole_witness, find_zero_subsequence, find_zero_subsequence_bruteforce, satisfies_condition,
    signed_sum,
};
use zsum_core::{ConditionKind, GroupParams, Sequence, WeightSet};

use crate::{EXIT_CLAIM_FAILS, EXIT_OK};

type Check = Result<String, String>;

fn c3(r: usize) -> GroupParams {
    GroupParams::new(3, r).expect("valid group")
}

fn opts() -> SearchOptions {
    SearchOptions::deterministic().with_budget(Duration::from_secs(1800))
}

fn expect_value(label: &str, got: Option<u64>, want: u64) -> Check {
    match got {
        Some(v) if v == want => Ok(format!("{label} = {v}")),
        other => Err(format!("{label}: expected {want}, got {other:?}")),
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn eta_values(full: bool, tamper: bool) -> Check {
    let pm = WeightSet::plus_minus_one();
    let mut wants = vec![(1, 2), (2, if tamper { 4 } else { 3 }), (3, 5)];
    if full {
        wants.push((4, 11));
    }
    let mut parts = Vec::new();
    for (r, want) in wants {
        let res = invariants::compute_eta(&c3(r), &pm, &opts()).map_err(err)?;
        res.verify_certificate().map_err(err)?;
        parts.push(expect_value(&format!("eta(C_3^{r})"), res.value, want)?);
    }
    Ok(parts.join(", "))
}

fn s_values(full: bool) -> Check {
    let pm = WeightSet::plus_minus_one();
    let direct = SearchOptions { method: Method::Direct, ..opts() };
    let mut parts = vec![
        expect_value("s(C_3) direct", invariants::compute_s(&c3(1), &pm, &direct).map_err(err)?.value, 4)?,
        expect_value("s(C_3^2) direct", invariants::compute_s(&c3(2), &pm, &direct).map_err(err)?.value, 5)?,
        expect_value("s(C_3^3)", invariants::compute_s(&c3(3), &pm, &opts()).map_err(err)?.value, 9)?,
    ];
    if full {
        parts.push(expect_value("s(C_3^4)", invariants::compute_s(&c3(4), &pm, &opts()).map_err(err)?.value, 21)?);
    }
    Ok(parts.join(", "))
}

fn constructions() -> Check {
    let specs = [
        (Family::Thm1, 3, 2),
        (Family::Thm1, 3, 3),
        (Family::Thm1, 3, 4),
        (Family::Thm1, 5, 2),
        (Family::Thm1, 5, 3),
        (Family::Thm1, 7, 2),
        (Family::Prop41, 3, 5),
        (Family::Prop41, 3, 7),
        (Family::Prop42, 3, 6),
        (Family::SmallEta, 3, 4),
        (Family::SmallEta, 3, 5),
    ];
    for (family, n, r) in specs {
        let spec = ConstructionSpec::new(family, n, r).map_err(err)?;
        let rep = verify_construction(&spec).map_err(err)?;
        if !rep.passed() {
            return Err(format!("{family}({n},{r}) failed: {:?}", rep.counterexample));
        }
    }
    Ok(format!("{} constructions pass", specs.len()))
}

fn rank5_interval() -> Check {
    let spec = ConstructionSpec::new(Family::SmallEta, 3, 5).map_err(err)?;
    let rep = verify_construction(&spec).map_err(err)?;
    let mut sources: Vec<Source> = rep.as_source().into_iter().collect();
    sources.extend(bounds::known_sources(3, 5));
    let recs = bounds::merge_c3(5, &sources).map_err(err)?;
    let (eta, s) = (&recs[0], &recs[2]);
    if (eta.lower.value, eta.upper.value, s.lower.value, s.upper.value) != (21, 23, 41, 45) {
        return Err(format!("rank 5: eta {eta:?}, s {s:?}"));
    }
    if eta.lower.source != Provenance::Construction || eta.upper.source != Provenance::KnownConstant {
        return Err("rank 5: unexpected provenance".into());
    }
    Ok("eta(C_3^5) in [21, 23], s(C_3^5) in [41, 45]".into())
}

fn towers() -> Check {
    for a in 1..=3u32 {
        let rows = bounds::thm3_table(a).map_err(err)?;
        let p = 3u64.pow(a);
        let got: Vec<(u64, u64)> = rows.iter().map(|r| (r.lower.value, r.upper.value)).collect();
        let want = if a == 1 {
            vec![(9, 9), (21, 21), (41, 45)]
        } else {
            vec![(4 * p - 3, 4 * p - 3), (8 * p - 7, 10 * p - 9), (16 * p - 15, 22 * p - 21)]
        };
        if got != want {
            return Err(format!("a = {a}: {got:?} != {want:?}"));
        }
    }
    Ok("tower rows for a = 1..3 agree with the recursion".into())
}

fn random_sequence(rng: &mut StdRng, group: GroupParams, len: usize) -> Sequence {
    let mut s = Sequence::new(group);
    for _ in 0..len {
        let idx = rng.gen_range(0..group.order());
        s.push(group.element_at(idx).expect("index in range"), 1).expect("same group");
    }
    s
}

fn pigeonhole() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for (r, len) in [(2, 9), (1, 4)] {
        for _ in 0..1000 {
            let s = random_sequence(&mut rng, c3(r), len);
            let w = extract_pigeonhole_witness(&s).map_err(err)?;
            if w.len() != 3 || !signed_sum(&s, &w).map_err(err)?.is_zero() {
                return Err(format!("bad pigeonhole witness {w} for {s}"));
            }
        }
    }
    Ok("2000 pigeonhole witnesses replay to zero".into())
}

fn oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(7);
    let pm = WeightSet::plus_minus_one();
    for _ in 0..1000 {
        let r = rng.gen_range(1..=3);
        let len = rng.gen_range(1..=8);
        let s = random_sequence(&mut rng, c3(r), len);
        let l = rng.gen_range(1..=3.min(len as u64));
        let fast = find_zero_subsequence(&s, l, &pm).map_err(err)?;
        let slow = find_zero_subsequence_bruteforce(&s, l, &pm).map_err(err)?;
        if fast.is_some() != slow.is_some() {
            return Err(format!("search and oracle disagree on {s}, L = {l}"));
        }
    }
    Ok("1000 random instances agree with the oracle".into())
}

fn unit_weights() -> Check {
    let unit = WeightSet::unit();
    Ok([
        expect_value("s(C_3), A = {1}", invariants::compute_s(&c3(1), &unit, &opts()).map_err(err)?.value, 5)?,
        expect_value("g(C_3^2), A = {1}", invariants::compute_g(&c3(2), &unit, &opts()).map_err(err)?.value, 5)?,
        expect_value("g(C_3^3), A = {1}", invariants::compute_g(&c3(3), &unit, &opts()).map_err(err)?.value, 10)?,
    ]
    .join(", "))
}

fn doubling() -> Check {
    let pm = WeightSet::plus_minus_one();
    for r in 1..=3 {
        let res = invariants::compute_eta(&c3(r), &pm, &opts()).map_err(err)?;
        let cert = res.certificate_sequence().map_err(err)?.ok_or("missing certificate")?;
        let doubled = invariants::doubling_transform(&cert).map_err(err)?;
        if doubled.len() != 2 * cert.len()
            || !doubled.has_distinct_elements()
            || satisfies_condition(&doubled, ConditionKind::G, &pm).map_err(err)?
        {
            return Err(format!("doubling of the rank {r} certificate"));
        }
    }
    Ok("doubled eta certificates fail the g condition".into())
}

fn relations() -> Check {
    let pm = WeightSet::plus_minus_one();
    let mut results = Vec::new();
    for r in 1..=3 {
        for which in Invariant::ALL {
            let o = if r == 1 && which == Invariant::S {
                SearchOptions { method: Method::Direct, ..opts() }
            } else {
                opts()
            };
            results.push(invariants::compute(which, &c3(r), &pm, &o).map_err(err)?);
        }
    }
    let report = invariants::cross_check_relations(&results);
    if report.consistent() {
        Ok(format!("{} relation checks hold", report.checks.len()))
    } else {
        Err(report.flags.join("; "))
    }
}

/// Runs every check, printing one line each. Returns the exit code.
pub fn run(full: bool, tamper: bool, out: &mut dyn Write) -> i32 {
    let checks: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("eta values", Box::new(move || eta_values(full, tamper))),
        ("s values", Box::new(move || s_values(full))),
        ("constructions", Box::new(constructions)),
        ("rank 5 interval", Box::new(rank5_interval)),
        ("tower table", Box::new(towers)),
        ("pigeonhole", Box::new(pigeonhole)),
        ("oracle", Box::new(oracle)),
        ("unit weights", Box::new(unit_weights)),
        ("doubling", Box::new(doubling)),
        ("relations", Box::new(relations)),
    ];
    let mut first_failure = None;
    for (name, check) in checks {
        let t = Instant::now();
        let line = match check() {
            Ok(msg) => format!("PASS {name}: {msg} ({:.2?})", t.elapsed()),
            Err(msg) => {
                first_failure.get_or_insert_with(|| format!("{name}: {msg}"));
                format!("FAIL {name}: {msg}")
            }
        };
        let _ = writeln!(out, "{line}");
    }
    match first_failure {
        None => EXIT_OK,
        Some(f) => {
            let _ = writeln!(out, "first failure: {f}");
            EXIT_CLAIM_FAILS
        }
    }
}
