//! The `zsum` command-line front end.
//!
//! Exit codes: 0 success or claim holds, 1 claim fails or witness found,
//! 2 input error, 3 search budget exhausted.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zsum_core::bounds::{self, BoundRecord, Invariant, TableOptions, CSV_HEADER};
use zsum_core::constructions::{constructions_for_c3, verify_construction, ConstructionSpec, Family};
use zsum_core::invariants::{self, InvariantResult, Method, SearchOptions};
use zsum_core::zerosum::{condition_witness, find_zero_subsequence};
use zsum_core::{parse_sequence, serialize_sequence, ConditionKind, Error, GroupParams, WeightSet};

pub mod selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CLAIM_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "zsum", version, about = "Weighted zero-sum invariants over C_n^r")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a sequence family and write it in the v1 sequence format.
    Construct(ConstructArgs),
    /// Check that a sequence has no zero-sum for a condition, or re-check a certificate.
    Verify(VerifyArgs),
    /// Find a weighted zero-sum of a given length in a sequence file.
    Witness(WitnessArgs),
    /// Compute eta, g or s for C_n^r by search.
    Invariant(InvariantArgs),
    /// Print the merged bound table.
    Bounds(BoundsArgs),
    /// Run the built-in check battery.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long, default_value_t = 3)]
    pub n: u64,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Sequence file, or an invariant result with --certificate.
    pub file: PathBuf,
    #[arg(long, conflicts_with_all = ["length", "certificate"])]
    pub condition: Option<ConditionKind>,
    #[arg(long, conflicts_with = "certificate")]
    pub length: Option<u64>,
    /// Treat the file as an invariant result JSON and replay its certificate.
    #[arg(long)]
    pub certificate: bool,
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
    pub weights: WeightSet,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub length: u64,
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
    pub weights: WeightSet,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct InvariantArgs {
    #[arg(long)]
    pub which: Invariant,
    #[arg(long, default_value_t = 3)]
    pub n: u64,
    #[arg(long)]
    pub r: usize,
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
    pub weights: WeightSet,
    #[arg(long, default_value_t = 600.0)]
    pub budget_secs: f64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// One thread and no timing fields: byte-identical output across runs.
    #[arg(long)]
    pub deterministic: bool,
    /// Let imported literature constants tighten an interval.
    #[arg(long)]
    pub allow_known: bool,
    /// Skip the cap search and relation shortcuts; search sequences directly.
    #[arg(long)]
    pub direct: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output path; the certificate is written next to it as `<out>.cert.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long, conflicts_with = "tower")]
    pub n: Option<u64>,
    /// Base of a tower `C_{b^a}^r`; only 3 is supported.
    #[arg(long, requires = "a")]
    pub tower: Option<u64>,
    #[arg(long)]
    pub a: Option<u32>,
    /// A rank or an inclusive range such as `1..5`.
    #[arg(long, value_parser = parse_range)]
    pub r: (usize, usize),
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Include imported literature constants.
    #[arg(long)]
    pub known: bool,
    /// Skip folding verified constructions into the lower bounds.
    #[arg(long)]
    pub no_constructions: bool,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Include the exhaustive eta(C_3^4) search.
    #[arg(long)]
    pub full: bool,
    /// Negative control: expect a wrong constant.
    #[arg(long, hide = true)]
    pub tamper: bool,
}

pub fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("not a rank: {t:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(format!("empty or invalid rank range {s:?}"));
    }
    Ok((lo, hi))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_INPUT;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Construct(a) => cmd_construct(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Witness(a) => cmd_witness(&a, out),
        Command::Invariant(a) => cmd_invariant(&a, out),
        Command::Bounds(a) => cmd_bounds(&a, out),
        Command::Selftest(a) => Ok(selftest::run(a.full, a.tamper, out)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

type CmdResult = Result<i32, Box<dyn std::error::Error>>;

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => out.write_all(text.as_bytes()),
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))
}

pub fn cmd_construct(a: &ConstructArgs, out: &mut dyn Write) -> CmdResult {
    let spec = ConstructionSpec::new(a.family, a.n, a.r)?;
    let seq = spec.generate()?;
    let text = serialize_sequence(&seq);
    match &a.out {
        Some(p) => {
            fs::write(p, &text)?;
            writeln!(out, "wrote {} entries ({} distinct) to {}", seq.len(), seq.distinct_len(), p.display())?;
            writeln!(out, "claim: {}", spec.claim)?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let text = read(&a.file)?;
    if a.certificate {
        let res = InvariantResult::from_json(&text)?;
        return Ok(match res.verify_certificate() {
            Ok(()) => {
                writeln!(out, "certificate ok: {} of {} in [{}, {}]", res.which, res.group, res.lower_bound(), res.upper_bound())?;
                EXIT_OK
            }
            Err(Error::Certificate(msg)) => {
                writeln!(out, "certificate rejected: {msg}")?;
                EXIT_CLAIM_FAILS
            }
            Err(e) => return Err(e.into()),
        });
    }
    let seq = parse_sequence(&text)?;
    let witness = match (a.condition, a.length) {
        (Some(kind), None) => condition_witness(&seq, kind, &a.weights)?,
        (None, Some(l)) if l > seq.len() => None,
        (None, Some(l)) => find_zero_subsequence(&seq, l, &a.weights)?,
        _ => return Err(Error::Precondition("give exactly one of --condition or --length".into()).into()),
    };
    Ok(match witness {
        None => {
            writeln!(out, "no witness: claim holds for sequence of length {}", seq.len())?;
            EXIT_OK
        }
        Some(w) => {
            writeln!(out, "{}", serde_json::to_string(&w.to_record(&seq)?)?)?;
            EXIT_CLAIM_FAILS
        }
    })
}

pub fn cmd_witness(a: &WitnessArgs, out: &mut dyn Write) -> CmdResult {
    let seq = parse_sequence(&read(&a.file)?)?;
    Ok(match find_zero_subsequence(&seq, a.length, &a.weights)? {
        Some(w) => {
            writeln!(out, "{}", serde_json::to_string(&w.to_record(&seq)?)?)?;
            EXIT_OK
        }
        None => {
            writeln!(out, "no zero-sum of length {}", a.length)?;
            EXIT_CLAIM_FAILS
        }
    })
}

pub fn cmd_invariant(a: &InvariantArgs, out: &mut dyn Write) -> CmdResult {
    if !(a.budget_secs > 0.0 && a.budget_secs.is_finite()) {
        return Err(Error::Precondition("--budget-secs must be positive".into()).into());
    }
    let group = GroupParams::new(a.n, a.r)?;
    let mut opts = SearchOptions {
        budget: Duration::from_secs_f64(a.budget_secs),
        deterministic: a.deterministic,
        allow_known: a.allow_known,
        method: if a.direct { Method::Direct } else { Method::Auto },
        ..SearchOptions::default()
    };
    if let Some(t) = a.threads {
        opts.threads = t.max(1);
    }
    let res = invariants::compute(a.which, &group, &a.weights, &opts)?;
    let json = res.to_json() + "\n";
    let body = match a.format {
        Format::Json => json.clone(),
        Format::Text | Format::Csv => summary(&res),
    };
    emit(out, a.out.as_deref(), &body)?;
    if let Some(p) = &a.out {
        let mut cert = p.as_os_str().to_owned();
        cert.push(".cert.json");
        fs::write(PathBuf::from(cert), &json)?;
    }
    Ok(if res.is_exact() { EXIT_OK } else { EXIT_BUDGET })
}

fn summary(res: &InvariantResult) -> String {
    let value = if res.is_exact() {
        format!("= {}", res.lower_bound())
    } else {
        format!("in [{}, {}]", res.lower_bound(), res.upper_bound())
    };
    let mut s = format!(
        "{}_A({}) {value} with A = {} ({}, exhausted: {}, nodes: {})\n",
        res.which, res.group, res.weights, res.method, res.exhausted, res.nodes
    );
    for note in &res.notes {
        s.push_str(&format!("  note: {note}\n"));
    }
    s
}

fn construction_sources(r: usize) -> Result<Vec<bounds::Source>, Error> {
    let mut out = Vec::new();
    if r > 8 {
        return Ok(out);
    }
    for spec in constructions_for_c3(r) {
        if let Some(src) = verify_construction(&spec)?.as_source() {
            out.push(src);
        }
    }
    Ok(out)
}

pub fn cmd_bounds(a: &BoundsArgs, out: &mut dyn Write) -> CmdResult {
    let (lo, hi) = a.r;
    let opts = TableOptions { known: a.known };
    let mut rows: Vec<BoundRecord> = Vec::new();
    match (a.n, a.tower, a.a) {
        (Some(n), None, _) => {
            for r in lo..=hi {
                let extra = if n == 3 && !a.no_constructions { construction_sources(r)? } else { Vec::new() };
                rows.extend(bounds::bound_table(n, r, opts, &extra)?);
            }
        }
        (None, Some(3), Some(exp)) => {
            let table = bounds::thm3_table(exp)?;
            let n = 3u64
                .checked_pow(exp)
                .ok_or_else(|| Error::Unsupported(format!("3^{exp} overflows")))?;
            for r in lo..=hi {
                match table.iter().find(|row| row.group.r == r) {
                    Some(row) => rows.push(row.clone()),
                    None => rows.extend(bounds::bound_table(n, r, opts, &[])?),
                }
            }
        }
        (None, Some(b), _) => return Err(Error::Unsupported(format!("tower base {b}; only 3 is supported")).into()),
        _ => return Err(Error::Precondition("give --n or --tower with --a".into()).into()),
    }
    match a.format {
        Format::Csv | Format::Text => {
            writeln!(out, "{CSV_HEADER}")?;
            for row in &rows {
                writeln!(out, "{}", row.csv_row())?;
            }
        }
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?,
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("zsum").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4"), Ok((4, 4)));
        assert_eq!(parse_range("1..5"), Ok((1, 5)));
        assert_eq!(parse_range("2..=3"), Ok((2, 3)));
        assert!(parse_range("0..2").is_err());
        assert!(parse_range("5..1").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn unknown_subcommand_is_input_error() {
        let (code, _, err) = run_args(&["frobnicate"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(!err.is_empty());
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("invariant"));
    }

    #[test]
    fn construct_to_stdout_round_trips() {
        let (code, out, _) = run_args(&["construct", "--family", "small_eta", "--r", "5"]);
        assert_eq!(code, EXIT_OK);
        let seq = parse_sequence(&out).unwrap();
        assert_eq!(seq.len(), 20);
    }

    #[test]
    fn text_summary_for_interval() {
        let (code, out, _) =
            run_args(&["invariant", "--which", "eta", "--r", "5", "--budget-secs", "0.2", "--format", "text"]);
        assert_eq!(code, EXIT_BUDGET);
        assert!(out.starts_with("eta_A(") && out.contains("in ["), "{out}");
    }

    #[test]
    fn bounds_rejects_other_tower_bases() {
        let (code, _, err) = run_args(&["bounds", "--tower", "5", "--a", "2", "--r", "3"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("only 3"));
    }

    #[test]
    fn bounds_csv_header_first() {
        let (code, out, _) = run_args(&["bounds", "--n", "3", "--r", "2..3"]);
        assert_eq!(code, EXIT_OK);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), 6);
    }
}
