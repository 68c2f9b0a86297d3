//! The `leafine` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 a resource cap was hit. Every error line on stderr starts with
//! `error:<Name>:`.

use std::ffi::OsString;
use std::io::{self, Read, Write};
use std::ops::RangeInclusive;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::json;

use crate::asymptotics::{
    self, compute_k1_truncated, compute_k2, format_fixed, format_sci, k1_discrepancy, predict,
    predict_by_leaves, prefactor_empirical, AsymptoticConstants, AsymptoticsError, K1Mode,
    DEFAULT_K1_INDEX, DEFAULT_PRECISION, DEFAULT_TERMS, MIN_PRECISION,
};
use crate::dp::{count_distinct, distinct_codes, root_containing_codes, DpError, DEFAULT_CAP};
use crate::fib::{knuth_fibonacci, leaf_fibonacci};
use crate::induce::{enumerate_bruteforce, InduceError, DEFAULT_SUBSET_BUDGET};
use crate::recurrence::{
    check_bounds, first_bound_violation, n_sequence_capped, SequenceError, DEFAULT_DIGITS_CAP,
};
use crate::tree::{parse_forest, serialize, CodeSet, TopTree, TreeError};

pub const PRECISION_ENV: &str = "LEAFINE_PRECISION_BITS";

/// Exact values are shown next to predictions up to this many digits.
const EXACT_DIGITS_LIMIT: f64 = 100_000.0;

#[derive(Parser, Debug)]
#[command(
    name = "leafine",
    version,
    about = "Count nonisomorphic leaf-induced subtrees of topological trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a Fibonacci tree.
    Gen {
        #[command(subcommand)]
        family: Family,
        /// Print the canonical code instead of the stored child order.
        #[arg(long, global = true)]
        canonical: bool,
    },
    /// Count nonisomorphic leaf-induced subtrees of each input tree.
    Count {
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// One JSON object per tree.
        #[arg(long)]
        json: bool,
        /// Largest number of subsets brute force may visit.
        #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET)]
        budget: u64,
        /// Largest number of classes the DP may create.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Tree file, one tree per line; `-` or nothing reads stdin.
        input: Option<String>,
    },
    /// List the canonical codes of all nonisomorphic leaf-induced subtrees.
    Enumerate {
        #[arg(long, value_enum, default_value_t = ExactMethod::Dp)]
        method: ExactMethod,
        #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        input: Option<String>,
    },
    /// Print A_0 ..= A_n_max, the counts for the leaf-Fibonacci trees.
    Seq {
        n_max: usize,
        /// Refuse when A_n_max would have more decimal digits than this.
        #[arg(long, default_value_t = DEFAULT_DIGITS_CAP)]
        digits_cap: u64,
    },
    /// Print λ1, λ2, K2 and the finite-n K1 and C_n tables.
    Constants {
        /// Working precision in bits (default: $LEAFINE_PRECISION_BITS or 256).
        #[arg(long)]
        precision: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TERMS)]
        terms: usize,
        /// Range of n for the tables, as `a..b` (inclusive).
        #[arg(long, default_value = "0..16")]
        table_n: String,
    },
    /// Estimate A_n from the asymptotic formula.
    Predict {
        n: usize,
        #[arg(long, value_enum, default_value_t = K1Arg::Paper)]
        k1: K1Arg,
        /// Use the exponent written in terms of the leaf count of f_n.
        #[arg(long)]
        by_leaves: bool,
        #[arg(long)]
        precision: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TERMS)]
        terms: usize,
    },
    /// Cross-check brute force, DP, the recurrence and the root identity.
    Verify {
        n_max: usize,
        #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Family {
    /// f_n: f_0 a vertex, f_1 a cherry, f_n = (f_{n-1}, f_{n-2}).
    FibLeaf { n: u32 },
    /// Knuth's Fibonacci tree; orders 0 and 1 are a single vertex.
    FibKnuth { order: u32 },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Brute,
    Dp,
    Auto,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ExactMethod {
    Brute,
    Dp,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum K1Arg {
    Paper,
    Unity,
}

#[derive(Debug)]
struct Failure {
    name: &'static str,
    msg: String,
    code: i32,
}

impl Failure {
    fn usage(name: &'static str, msg: impl Into<String>) -> Self {
        Failure {
            name,
            msg: msg.into(),
            code: 2,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage("IoError", e.to_string())
    }
}

impl From<TreeError> for Failure {
    fn from(e: TreeError) -> Self {
        Failure::usage(e.name(), e.to_string())
    }
}

impl From<InduceError> for Failure {
    fn from(e: InduceError) -> Self {
        let code = match e {
            InduceError::BudgetExceeded { .. } => 3,
            _ => 2,
        };
        Failure {
            name: e.name(),
            msg: e.to_string(),
            code,
        }
    }
}

impl From<DpError> for Failure {
    fn from(e: DpError) -> Self {
        let code = match e {
            DpError::DistinctSetOverflow { .. } => 3,
            DpError::SingleLeafTree => 2,
        };
        Failure {
            name: e.name(),
            msg: e.to_string(),
            code,
        }
    }
}

impl From<SequenceError> for Failure {
    fn from(e: SequenceError) -> Self {
        Failure {
            name: e.name(),
            msg: e.to_string(),
            code: 3,
        }
    }
}

impl From<AsymptoticsError> for Failure {
    fn from(e: AsymptoticsError) -> Self {
        let code = match e {
            AsymptoticsError::PrecisionInsufficient { .. } => 3,
            _ => 2,
        };
        Failure {
            name: e.name(),
            msg: e.to_string(),
            code,
        }
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn report(&mut self, f: &Failure) {
        let _ = writeln!(self.err, "error:{}: {}", f.name, f.msg);
    }
}

/// Runs the command line on the process's own streams.
pub fn main_entry() -> i32 {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = run(
        std::env::args_os(),
        &mut stdin.lock(),
        &mut out,
        &mut stderr.lock(),
    );
    let _ = out.flush();
    code
}

/// Runs the command line with `args` (program name first) and returns the
/// exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let text = e.to_string();
                    let text = text.trim_start_matches("error: ").trim_end();
                    let _ = writeln!(err, "error:UsageError: {text}");
                    2
                }
            };
        }
    };
    let mut io = Io { stdin, out, err };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(f) => {
            io.report(&f);
            f.code
        }
    }
}

fn dispatch(cmd: Command, io: &mut Io) -> Result<i32, Failure> {
    match cmd {
        Command::Gen { family, canonical } => {
            let tree = match family {
                Family::FibLeaf { n } => leaf_fibonacci(n),
                Family::FibKnuth { order } => knuth_fibonacci(order),
            };
            writeln!(io.out, "{}", serialize(&tree, canonical))?;
            Ok(0)
        }
        Command::Count {
            method,
            json,
            budget,
            cap,
            input,
        } => count(io, method, json, budget, cap, input.as_deref()),
        Command::Enumerate {
            method,
            budget,
            cap,
            input,
        } => enumerate(io, method, budget, cap, input.as_deref()),
        Command::Seq { n_max, digits_cap } => {
            for a in n_sequence_capped(n_max, digits_cap)? {
                writeln!(io.out, "{a}")?;
            }
            Ok(0)
        }
        Command::Constants {
            precision,
            terms,
            table_n,
        } => {
            let p = resolve_precision(precision)?;
            check_terms(terms)?;
            let range = parse_range(&table_n)?;
            constants(io, p, terms, range)
        }
        Command::Predict {
            n,
            k1,
            by_leaves,
            precision,
            terms,
        } => {
            let p = resolve_precision(precision)?;
            check_terms(terms)?;
            let mode = match k1 {
                K1Arg::Paper => K1Mode::Paper,
                K1Arg::Unity => K1Mode::Unity,
            };
            predict_cmd(io, n, mode, by_leaves, p, terms)
        }
        Command::Verify { n_max, budget, cap } => verify(io, n_max, budget, cap),
    }
}

fn resolve_precision(flag: Option<usize>) -> Result<usize, Failure> {
    let p = match flag {
        Some(p) => p,
        None => match std::env::var(PRECISION_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                Failure::usage(
                    "UsageError",
                    format!("{PRECISION_ENV}={v:?} is not a bit count"),
                )
            })?,
            Err(_) => DEFAULT_PRECISION,
        },
    };
    if p < MIN_PRECISION {
        return Err(Failure::usage(
            "UsageError",
            format!("precision must be at least {MIN_PRECISION} bits, got {p}"),
        ));
    }
    Ok(p)
}

fn check_terms(terms: usize) -> Result<(), Failure> {
    if terms < 2 {
        return Err(Failure::usage("UsageError", "--terms must be at least 2"));
    }
    Ok(())
}

fn parse_range(text: &str) -> Result<RangeInclusive<usize>, Failure> {
    let bad = || {
        Failure::usage(
            "UsageError",
            format!("expected a range like 2..16, got {text:?}"),
        )
    };
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn read_input(io: &mut Io, input: Option<&str>) -> Result<String, Failure> {
    let mut text = String::new();
    match input {
        None | Some("-") => {
            io.stdin.read_to_string(&mut text)?;
        }
        Some(path) => {
            text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage("IoError", format!("{path}: {e}")))?;
        }
    }
    Ok(text)
}

/// Parses the input and calls `each(index, line, tree, multi)` per tree.
/// Per-tree failures are reported and skipped; the first one decides the
/// exit code.
fn for_each_tree<F>(io: &mut Io, input: Option<&str>, mut each: F) -> Result<i32, Failure>
where
    F: FnMut(&mut Io, usize, usize, &TopTree, bool) -> Result<(), Failure>,
{
    let text = read_input(io, input)?;
    let entries = parse_forest(&text);
    if entries.is_empty() {
        return Err(Failure::usage("EmptyInput", "no tree in input"));
    }
    let multi = entries.len() > 1;
    let mut code = 0;
    for (index, entry) in entries.iter().enumerate() {
        let res = match &entry.tree {
            Ok(tree) => each(io, index, entry.line, tree, multi),
            Err(e) => Err(Failure::from(e.clone())),
        };
        if let Err(mut f) = res {
            if multi {
                f.msg = format!("line {}: {}", entry.line, f.msg);
            }
            io.report(&f);
            if code == 0 {
                code = f.code;
            }
        }
    }
    Ok(code)
}

fn prefix(line: usize, multi: bool) -> String {
    if multi {
        format!("{line}: ")
    } else {
        String::new()
    }
}

fn count(
    io: &mut Io,
    method: Method,
    as_json: bool,
    budget: u64,
    cap: usize,
    input: Option<&str>,
) -> Result<i32, Failure> {
    for_each_tree(io, input, |io, index, line, tree, multi| {
        let leaves = tree.leaf_count();
        let brute = match method {
            Method::Brute => true,
            Method::Dp => false,
            Method::Auto => leaves < 64 && (1u128 << leaves) <= budget as u128,
        };
        let start = Instant::now();
        let n: BigUint = if brute {
            BigUint::from(enumerate_bruteforce(tree, budget)?.codes.len())
        } else {
            count_distinct(tree, cap)?
        };
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let name = if brute { "brute" } else { "dp" };
        if as_json {
            let count = match n.to_u64() {
                Some(v) => json!(v),
                None => json!(n.to_string()),
            };
            let obj = json!({
                "input_index": index,
                "leaf_count": leaves.to_u64(),
                "method": name,
                "count": count,
                "elapsed_ms": (elapsed * 1e3).round() / 1e3,
            });
            writeln!(io.out, "{obj}")?;
        } else {
            writeln!(io.out, "{}{n}", prefix(line, multi))?;
        }
        Ok(())
    })
}

fn enumerate(
    io: &mut Io,
    method: ExactMethod,
    budget: u64,
    cap: usize,
    input: Option<&str>,
) -> Result<i32, Failure> {
    for_each_tree(io, input, |io, _, line, tree, multi| {
        let set = match method {
            ExactMethod::Brute => enumerate_bruteforce(tree, budget)?.codes,
            ExactMethod::Dp => distinct_codes(tree, cap)?,
        };
        let pre = prefix(line, multi);
        writeln!(io.out, "{pre}count={}", set.len())?;
        for code in set.codes() {
            writeln!(io.out, "{pre}{code}")?;
        }
        Ok(())
    })
}

fn decimal_digits(precision: usize) -> usize {
    ((precision.saturating_sub(8)) as f64 * std::f64::consts::LOG10_2) as usize
}

fn constants(
    io: &mut Io,
    p: usize,
    terms: usize,
    range: RangeInclusive<usize>,
) -> Result<i32, Failure> {
    let digits = decimal_digits(p);
    let k2 = compute_k2(terms, p);
    if !k2.tail_decreasing {
        writeln!(
            io.err,
            "warning: |E_i| is not yet decreasing after {terms} terms; the K2 truncation bound is unreliable"
        )?;
    }
    writeln!(io.out, "precision_bits={p}")?;
    writeln!(io.out, "terms={terms}")?;
    writeln!(
        io.out,
        "lambda1={}",
        format_fixed(&asymptotics::lambda1(p + 64), digits)
    )?;
    writeln!(
        io.out,
        "lambda2={}",
        format_fixed(&asymptotics::lambda2(p + 64), digits)
    )?;
    writeln!(io.out, "K2={}", k2.estimate().display(digits))?;
    writeln!(
        io.out,
        "K2_truncation_bound={}",
        format_sci(&k2.truncation_bound, 2)
    )?;
    writeln!(io.out, "K2_published={}", asymptotics::PUBLISHED_K2)?;
    writeln!(io.out, "K1_published={}", asymptotics::PUBLISHED_K1)?;

    let seq = n_sequence_capped(*range.end(), DEFAULT_DIGITS_CAP)?;
    writeln!(io.out)?;
    writeln!(io.out, "{:>3}  {:<34}  {:<34}", "n", "K1_trunc(n)", "C_n")?;
    for n in range.clone() {
        let k1 = if n >= 2 {
            compute_k1_truncated(n, &seq, p)?.display(24)
        } else {
            "-".to_string()
        };
        let c = prefactor_empirical(n, &k2, &seq, p)?.display(24);
        writeln!(io.out, "{n:>3}  {k1:<34}  {c:<34}")?;
    }

    let lo = (*range.start()).max(2);
    if lo <= *range.end() {
        writeln!(io.out)?;
        write!(io.out, "{}", k1_discrepancy(lo..=*range.end(), &k2, p)?)?;
    }
    Ok(0)
}

fn predict_cmd(
    io: &mut Io,
    n: usize,
    mode: K1Mode,
    by_leaves: bool,
    p: usize,
    terms: usize,
) -> Result<i32, Failure> {
    let seq_short = crate::recurrence::n_sequence(DEFAULT_K1_INDEX);
    let constants = AsymptoticConstants {
        lambda1: asymptotics::lambda1(p),
        lambda2: asymptotics::lambda2(p),
        k2: compute_k2(terms, p),
        k1_truncated: compute_k1_truncated(DEFAULT_K1_INDEX, &seq_short, p)?,
        k1_index: DEFAULT_K1_INDEX,
        terms_used: terms,
        precision: p,
    };
    let pred = if by_leaves {
        predict_by_leaves(n, &constants, mode)
    } else {
        predict(n, &constants, mode)
    };
    writeln!(io.out, "n={n}")?;
    writeln!(
        io.out,
        "k1={}",
        match mode {
            K1Mode::Paper => asymptotics::PUBLISHED_K1,
            K1Mode::Unity => "1",
        }
    )?;
    writeln!(
        io.out,
        "form={}",
        if by_leaves { "leaves" } else { "golden" }
    )?;
    writeln!(io.out, "exponent={}", format_fixed(&pred.exponent, 12))?;
    writeln!(io.out, "estimate={}", pred.scientific(15))?;
    if let Some(v) = pred.plain(3, 60) {
        writeln!(io.out, "value={v}")?;
    }
    if asymptotics::predicted_decimal_digits(n) <= EXACT_DIGITS_LIMIT {
        let exact = crate::recurrence::n_of(n);
        let text = exact.to_string();
        if text.len() <= 60 {
            writeln!(io.out, "exact={text}")?;
        } else {
            writeln!(io.out, "exact_digits={}", text.len())?;
        }
        writeln!(
            io.out,
            "relative_error={}",
            format_sci(&pred.relative_error(&exact), 3)
        )?;
    }
    Ok(0)
}

struct VerifyRow {
    n: usize,
    cells: Vec<(&'static str, String)>,
    ok: bool,
}

fn verify(io: &mut Io, n_max: usize, budget: u64, cap: usize) -> Result<i32, Failure> {
    let seq = n_sequence_capped(n_max, DEFAULT_DIGITS_CAP)?;
    let mut all_ok = true;
    for (n, expected) in seq.iter().enumerate() {
        let row = verify_one(n, expected, budget, cap);
        all_ok &= row.ok;
        let cells: Vec<String> = row.cells.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(io.out, "n={} {}", row.n, cells.join(" "))?;
    }
    if seq.len() >= 4 {
        let ok = check_bounds(&seq);
        all_ok &= ok;
        match first_bound_violation(&seq) {
            None => writeln!(io.out, "bounds=pass (n <= {n_max})")?,
            Some((n, b)) => writeln!(io.out, "bounds=FAIL at n={n} ({b:?})")?,
        }
    }
    writeln!(io.out, "result={}", if all_ok { "PASS" } else { "FAIL" })?;
    Ok(if all_ok { 0 } else { 1 })
}

fn verify_one(n: usize, expected: &BigUint, budget: u64, cap: usize) -> VerifyRow {
    let tree = leaf_fibonacci(n as u32);
    let leaves = tree.leaf_count();
    let mut cells = vec![
        ("leaves", leaves.to_string()),
        ("recurrence", expected.to_string()),
    ];
    let mut ok = true;

    let dp: Option<CodeSet> = if *expected <= BigUint::from(cap) {
        match distinct_codes(&tree, cap) {
            Ok(s) => {
                let hit = BigUint::from(s.len()) == *expected;
                ok &= hit;
                cells.push(("dp", mark(s.len().to_string(), hit)));
                Some(s)
            }
            Err(e) => {
                cells.push(("dp", format!("skipped({})", e.name())));
                None
            }
        }
    } else {
        cells.push(("dp", "skipped(cap)".into()));
        None
    };

    let brute_feasible = leaves < 64 && (1u128 << leaves) - 1 <= budget as u128;
    if brute_feasible {
        match enumerate_bruteforce(&tree, budget) {
            Ok(b) => {
                let hit = BigUint::from(b.codes.len()) == *expected;
                ok &= hit;
                cells.push(("brute", mark(b.codes.len().to_string(), hit)));
                if let Some(d) = &dp {
                    let same = b.codes.same_codes(d);
                    ok &= same;
                    cells.push(("sets", if same { "equal" } else { "DIFFER" }.into()));
                }
            }
            Err(e) => cells.push(("brute", format!("skipped({})", e.name()))),
        }
    } else {
        cells.push(("brute", "skipped(budget)".into()));
    }

    let lemma = match (&dp, n) {
        (_, 0) => "n/a".to_string(),
        (Some(all), _) => match root_containing_codes(&tree, cap) {
            Ok(rc) => {
                let hit = all.with_min_leaves(2).same_codes(&rc) && all.len() == rc.len() + 1;
                ok &= hit;
                if hit { "pass" } else { "FAIL" }.to_string()
            }
            Err(e) => format!("skipped({})", e.name()),
        },
        (None, _) => "skipped".to_string(),
    };
    cells.push(("root_identity", lemma));
    VerifyRow { n, cells, ok }
}

fn mark(value: String, hit: bool) -> String {
    if hit {
        value
    } else {
        format!("{value}(MISMATCH)")
    }
}
