//! Command-line front end. Exit codes: 0 success, 1 a mathematical FAIL (or an
//! inconclusive scan, or a FLAGGED discrepancy under `--strict`), 2 usage or input errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::Poly;
use crate::groupalg::{
    max_pbw_degree, verify_bracket_identity_alg, verify_lowest_table, y_gen, AlgElem,
    AlgIdentityReport,
};
use crate::identities::{MatrixIdentityReport, Status, NUM_ITEMS};
use crate::matgroup::{factorize, verify_matrix_identity, Mat3, MatrixDoc};
use crate::normality::{
    scan_candidates, Mode, NormalityChecker, ScanConfig, Verdict, DEFAULT_DIM_CAP,
};
use crate::padic::{compare_beta_digits, Ctx};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "iwasawa",
    version,
    about = "Exact computations in F_p[Gamma_1(SL_3(Z/p^k))]"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Odd prime p.
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Precision k >= 2 (matrices mod p^k).
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Exponent r of y_i^(p^r): a number, a list `0,1` or a range `0-2`.
    #[arg(long, global = true)]
    r: Option<String>,
    /// Exponent s of y_j^(p^s), same syntax as --r.
    #[arg(long, global = true)]
    s: Option<String>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Treat FLAGGED statement discrepancies as failures.
    #[arg(long, global = true)]
    strict: bool,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Flat `key=value` file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the 24 commutator identities at matrix and algebra level.
    VerifyBrackets {
        /// Items to check (1..=24): a number, list or range.
        #[arg(long)]
        id: Option<String>,
    },
    /// Check the lowest-degree bracket table for all 64 generator pairs.
    VerifyLowest,
    /// p-adic digits of beta with (1+p)^beta = (1+p^m)^(-1).
    Beta {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 3)]
        digits: usize,
    },
    /// Canonical coordinates of a matrix in the congruence subgroup.
    Factorize {
        /// Nine row-major entries, e.g. '[1,3,0,0,1,0,0,0,1]'.
        #[arg(long, conflicts_with = "input")]
        matrix: Option<String>,
        /// JSON matrix document `{"p","k","entries"}`.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Bracket of two elements (JSON files) or of two generator powers.
    Bracket {
        #[arg(long, requires = "b_file")]
        a_file: Option<PathBuf>,
        #[arg(long)]
        b_file: Option<PathBuf>,
        /// Generator indices `i,j` for [y_i^(p^r), y_j^(p^s)].
        #[arg(long, conflicts_with = "a_file")]
        gens: Option<String>,
        /// Search bound for the lowest term.
        #[arg(long)]
        max_degree: Option<u64>,
    },
    /// Lowest-degree homogeneous part of an element.
    Lowest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        max_degree: Option<u64>,
    },
    /// Non-normality witnesses for one element or a candidate scan.
    Normality {
        /// Truncation degree D (work modulo J^(D+1)).
        #[arg(long)]
        trunc: Option<u64>,
        /// Exact mode over the full group basis.
        #[arg(long, conflicts_with = "trunc")]
        exact: bool,
        /// Check a single element from a JSON file instead of scanning.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Scan all PBW monomials up to this degree.
        #[arg(long)]
        scan_degree: Option<u64>,
        /// Number of random candidates.
        #[arg(long)]
        samples: Option<usize>,
        /// Maximum number of terms of a random candidate.
        #[arg(long)]
        support: Option<usize>,
    },
}

/// Effective settings after merging flags, the config file and defaults.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub p: u64,
    pub k: u32,
    pub r: Option<Vec<u32>>,
    pub s: Option<Vec<u32>>,
    pub ids: Vec<u8>,
    pub trunc: u64,
    pub seed: u64,
    pub json: bool,
    pub strict: bool,
    pub jobs: Option<usize>,
    pub dim_cap: u128,
    pub scan_degree: u64,
    pub samples: usize,
    pub support: usize,
}

impl RunConfig {
    pub fn ctx(&self) -> Result<Ctx> {
        Ctx::new(self.p, self.k)
    }

    /// The configured `(r, s)` grid; by default every pair with `r + s + 2 <= k - 1`, or `(0, 0)`.
    pub fn rs_grid(&self) -> Vec<(u32, u32)> {
        match (&self.r, &self.s) {
            (None, None) => {
                let mut grid: Vec<_> = (0..self.k)
                    .flat_map(|r| (0..self.k).map(move |s| (r, s)))
                    .filter(|(r, s)| r + s + 2 < self.k)
                    .collect();
                if grid.is_empty() {
                    grid.push((0, 0));
                }
                grid
            }
            (r, s) => {
                let r = r.clone().unwrap_or_else(|| vec![0]);
                let s = s.clone().unwrap_or_else(|| vec![0]);
                r.iter()
                    .flat_map(|&a| s.iter().map(move |&b| (a, b)))
                    .collect()
            }
        }
    }
}

/// Parses `3`, `0,1,4` or `0-2` (inclusive).
pub fn parse_list<T>(text: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr + TryFrom<u64>,
{
    let bad = || Error::InvalidParameter(format!("cannot parse list `{text}`"));
    let mut out = Vec::new();
    for piece in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = piece.split_once('-') {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            for v in a..=b {
                out.push(T::try_from(v).map_err(|_| bad())?);
            }
        } else {
            out.push(piece.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Reads a flat `key=value` file; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    const KEYS: &[&str] = &[
        "p",
        "k",
        "r",
        "s",
        "id",
        "trunc",
        "seed",
        "json",
        "strict",
        "jobs",
        "dim_cap",
        "scan_degree",
        "samples",
        "support",
    ];
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Malformed(format!(
                "config line {}: expected key=value",
                n + 1
            )));
        };
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Malformed(format!(
                "config line {}: unknown key `{key}`",
                n + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn config_value<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>> {
    map.get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| Error::Malformed(format!("config value `{v}` for `{key}`")))
        })
        .transpose()
}

fn build_config(common: &CommonArgs, command: &Command) -> Result<RunConfig> {
    let file = match &common.config {
        Some(path) => parse_config_file(&read_file(path)?)?,
        None => BTreeMap::new(),
    };
    let text_or =
        |flag: &Option<String>, key: &str| flag.clone().or_else(|| file.get(key).cloned());
    let env_cap = std::env::var("IWASAWA_DIM_CAP").ok();
    let dim_cap = match env_cap {
        Some(v) => v
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("IWASAWA_DIM_CAP=`{v}`")))?,
        None => config_value(&file, "dim_cap")?.unwrap_or(DEFAULT_DIM_CAP),
    };
    let (id_flag, trunc_flag, scan_flag, samples_flag, support_flag) = match command {
        Command::VerifyBrackets { id } => (id.clone(), None, None, None, None),
        Command::Normality {
            trunc,
            scan_degree,
            samples,
            support,
            ..
        } => (None, *trunc, *scan_degree, *samples, *support),
        _ => (None, None, None, None, None),
    };
    let ids = match text_or(&id_flag, "id") {
        Some(t) => {
            let ids: Vec<u8> = parse_list(&t)?;
            if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > NUM_ITEMS) {
                return Err(Error::InvalidParameter(format!(
                    "identity id {bad} outside 1..=24"
                )));
            }
            ids
        }
        None => (1..=NUM_ITEMS).collect(),
    };
    Ok(RunConfig {
        p: match common.p {
            Some(p) => p,
            None => config_value(&file, "p")?.unwrap_or(3),
        },
        k: match common.k {
            Some(k) => k,
            None => config_value(&file, "k")?.unwrap_or(3),
        },
        r: text_or(&common.r, "r")
            .map(|t| parse_list(&t))
            .transpose()?,
        s: text_or(&common.s, "s")
            .map(|t| parse_list(&t))
            .transpose()?,
        ids,
        trunc: match trunc_flag {
            Some(d) => d,
            None => config_value(&file, "trunc")?.unwrap_or(4),
        },
        seed: match common.seed {
            Some(s) => s,
            None => config_value(&file, "seed")?.unwrap_or(0),
        },
        json: common.json || config_value(&file, "json")?.unwrap_or(false),
        strict: common.strict || config_value(&file, "strict")?.unwrap_or(false),
        jobs: match common.jobs {
            Some(j) => Some(j),
            None => config_value(&file, "jobs")?,
        },
        dim_cap,
        scan_degree: match scan_flag {
            Some(d) => d,
            None => config_value(&file, "scan_degree")?.unwrap_or(1),
        },
        samples: match samples_flag {
            Some(n) => n,
            None => config_value(&file, "samples")?.unwrap_or(200),
        },
        support: match support_flag {
            Some(n) => n,
            None => config_value(&file, "support")?.unwrap_or(3),
        },
    })
}

fn read_file(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| Error::Malformed(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn read_elem(path: &Path) -> Result<AlgElem> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

/// Output text and exit code of one command.
#[derive(Debug)]
pub struct CmdOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl CmdOutput {
    fn ok(stdout: String) -> Self {
        CmdOutput {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }
}

#[derive(Debug, Serialize)]
struct BracketSweepEntry {
    id: u8,
    r: u32,
    s: u32,
    matrix: MatrixIdentityReport,
    algebra: AlgIdentityReport,
}

#[derive(Debug, Serialize)]
struct BracketSweep {
    p: u64,
    k: u32,
    pass: usize,
    flagged: usize,
    fail: usize,
    reports: Vec<BracketSweepEntry>,
}

pub fn cmd_verify_brackets(cfg: &RunConfig) -> Result<CmdOutput> {
    let ctx = cfg.ctx()?;
    let jobs: Vec<(u8, u32, u32)> = cfg
        .rs_grid()
        .into_iter()
        .flat_map(|(r, s)| cfg.ids.iter().map(move |&id| (id, r, s)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(id, r, s)| {
            Ok(BracketSweepEntry {
                id,
                r,
                s,
                matrix: verify_matrix_identity(id, r, s, &ctx)?,
                algebra: verify_bracket_identity_alg(id, r, s, &ctx)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = |e: &BracketSweepEntry| e.matrix.status.max(e.algebra.status);
    let count = |st: Status| reports.iter().filter(|e| worst(e) == st).count();
    let sweep = BracketSweep {
        p: ctx.p(),
        k: ctx.k(),
        pass: count(Status::Pass),
        flagged: count(Status::Flagged),
        fail: count(Status::Fail),
        reports,
    };
    let mut out = String::new();
    if cfg.json {
        out = to_json(&sweep);
    } else {
        for e in &sweep.reports {
            let trivial = if e.matrix.trivial { " (trivial)" } else { "" };
            let _ = writeln!(
                out,
                "item {:>2} r={} s={}: {} [matrix {}, algebra {}]{trivial}",
                e.id,
                e.r,
                e.s,
                worst(e),
                e.matrix.status,
                e.algebra.status
            );
            let mut notes: Vec<&String> = e.matrix.notes.iter().chain(&e.algebra.notes).collect();
            notes.dedup();
            for n in notes {
                let _ = writeln!(out, "    {n}");
            }
        }
        let _ = writeln!(
            out,
            "{} PASS, {} FLAGGED, {} FAIL",
            sweep.pass, sweep.flagged, sweep.fail
        );
    }
    let mut stderr = String::new();
    if sweep.flagged > 0 {
        stderr = format!(
            "warning: {} check(s) FLAGGED a printed statement\n",
            sweep.flagged
        );
    }
    let code = if sweep.fail > 0 || (cfg.strict && sweep.flagged > 0) {
        EXIT_FAIL
    } else {
        EXIT_OK
    };
    Ok(CmdOutput {
        stdout: out,
        stderr,
        code,
    })
}

pub fn cmd_verify_lowest(cfg: &RunConfig) -> Result<CmdOutput> {
    let ctx = cfg.ctx()?;
    let reports = cfg
        .rs_grid()
        .par_iter()
        .map(|&(r, s)| verify_lowest_table(&ctx, r, s))
        .collect::<Result<Vec<_>>>()?;
    let failed = reports.iter().any(|r| r.status == Status::Fail);
    let out = if cfg.json {
        to_json(&reports)
    } else {
        let mut out = String::new();
        for rep in &reports {
            let _ = writeln!(
                out,
                "p={} k={} r={} s={} degree {}: {}",
                rep.p, rep.k, rep.r, rep.s, rep.degree, rep.status
            );
            for c in rep.pairs.iter().filter(|c| c.i < c.j) {
                let _ = writeln!(
                    out,
                    "    [y{}, y{}] lowest = {}  {}",
                    c.i, c.j, c.found, c.status
                );
            }
        }
        out
    };
    Ok(CmdOutput {
        stdout: out,
        stderr: String::new(),
        code: if failed { EXIT_FAIL } else { EXIT_OK },
    })
}

pub fn cmd_beta(cfg: &RunConfig, m: u32, digits: usize) -> Result<CmdOutput> {
    if !crate::padic::is_prime(cfg.p) || cfg.p == 2 {
        return Err(Error::InvalidParameter(format!(
            "p = {} is not an odd prime",
            cfg.p
        )));
    }
    let cmp = compare_beta_digits(m, digits, cfg.p)?;
    let shown: Vec<String> = cmp.computed.digits().iter().map(u32::to_string).collect();
    let stdout = if cfg.json {
        to_json(&cmp)
    } else {
        format!("[{}]\n", shown.join(","))
    };
    let mut out = CmdOutput::ok(stdout);
    if cmp.flagged() {
        out.stderr = format!(
            "warning: digit(s) {:?} differ from the closed-form digit formula; computed values shown\n",
            cmp.discrepancies
        );
        if cfg.strict {
            out.code = EXIT_FAIL;
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct FactorizeDoc {
    p: u64,
    k: u32,
    tuple: crate::matgroup::ExpTuple,
}

pub fn cmd_factorize(
    cfg: &RunConfig,
    matrix: Option<&str>,
    input: Option<&Path>,
) -> Result<CmdOutput> {
    let (ctx, m): (Ctx, Mat3) = match (matrix, input) {
        (Some(text), _) => {
            let entries: Vec<i128> = serde_json::from_str(text)
                .map_err(|e| Error::Malformed(format!("matrix `{text}`: {e}")))?;
            let ctx = cfg.ctx()?;
            (ctx, Mat3::from_row_major(&entries, &ctx)?)
        }
        (None, Some(path)) => {
            let doc: MatrixDoc = serde_json::from_str(&read_file(path)?)
                .map_err(|e| Error::Malformed(e.to_string()))?;
            doc.decode()?
        }
        (None, None) => return Err(Error::InvalidParameter("pass --matrix or --input".into())),
    };
    let t = factorize(&m, &ctx)?;
    Ok(CmdOutput::ok(if cfg.json {
        to_json(&FactorizeDoc {
            p: ctx.p(),
            k: ctx.k(),
            tuple: t,
        })
    } else {
        format!("{t}\n")
    }))
}

#[derive(Debug, Serialize)]
struct LowestDoc {
    degree: Option<u64>,
    certified: Option<bool>,
    part: Option<Poly>,
}

#[derive(Debug, Serialize)]
struct BracketDoc {
    bracket: AlgElem,
    lowest: LowestDoc,
}

fn lowest_doc(a: &AlgElem, max_degree: u64) -> Result<LowestDoc> {
    if a.is_zero() {
        return Ok(LowestDoc {
            degree: None,
            certified: None,
            part: None,
        });
    }
    let lt = a.lowest_term(max_degree)?;
    Ok(LowestDoc {
        degree: Some(lt.degree),
        certified: Some(lt.certified),
        part: Some(Poly::from_pbw(&lt.part)?),
    })
}

fn lowest_text(doc: &LowestDoc) -> String {
    match (&doc.degree, &doc.part) {
        (Some(d), Some(part)) => {
            let flag = if doc.certified == Some(true) {
                ""
            } else {
                " (uncertified: possible folding)"
            };
            format!("lowest degree {d}: {part}{flag}\n")
        }
        _ => "element is zero\n".to_string(),
    }
}

pub fn cmd_bracket(
    cfg: &RunConfig,
    a_file: Option<&Path>,
    b_file: Option<&Path>,
    gens: Option<&str>,
    max_degree: Option<u64>,
) -> Result<CmdOutput> {
    let (a, b) = match (a_file, b_file, gens) {
        (Some(a), Some(b), _) => (read_elem(a)?, read_elem(b)?),
        (_, _, Some(g)) => {
            let ij: Vec<u8> = parse_list(g)?;
            let [i, j] = ij[..] else {
                return Err(Error::InvalidParameter(
                    "--gens takes two indices `i,j`".into(),
                ));
            };
            let ctx = cfg.ctx()?;
            let r = cfg.r.as_ref().map_or(0, |v| v[0]);
            let s = cfg.s.as_ref().map_or(0, |v| v[0]);
            (
                y_gen(i as usize, ctx.p_pow_exp(r), &ctx)?,
                y_gen(j as usize, ctx.p_pow_exp(s), &ctx)?,
            )
        }
        _ => {
            return Err(Error::InvalidParameter(
                "pass --a-file and --b-file, or --gens".into(),
            ))
        }
    };
    let br = a.bracket(&b)?;
    let bound = max_degree.unwrap_or_else(|| max_pbw_degree(br.ctx()));
    let doc = BracketDoc {
        lowest: lowest_doc(&br, bound)?,
        bracket: br,
    };
    Ok(CmdOutput::ok(if cfg.json {
        to_json(&doc)
    } else {
        format!(
            "bracket has {} group-basis terms\n{}",
            doc.bracket.len(),
            lowest_text(&doc.lowest)
        )
    }))
}

pub fn cmd_lowest(cfg: &RunConfig, input: &Path, max_degree: Option<u64>) -> Result<CmdOutput> {
    let a = read_elem(input)?;
    let doc = lowest_doc(&a, max_degree.unwrap_or_else(|| max_pbw_degree(a.ctx())))?;
    Ok(CmdOutput::ok(if cfg.json {
        to_json(&doc)
    } else {
        lowest_text(&doc)
    }))
}

pub fn cmd_normality(cfg: &RunConfig, exact: bool, input: Option<&Path>) -> Result<CmdOutput> {
    let ctx = cfg.ctx()?;
    let mode = if exact {
        Mode::Exact
    } else {
        Mode::Truncated(cfg.trunc)
    };
    if let Some(path) = input {
        let w = read_elem(path)?;
        if *w.ctx() != ctx {
            return Err(Error::ContextMismatch);
        }
        let rep = NormalityChecker::new(&ctx, mode, cfg.dim_cap)?.check(&w)?;
        let code = if rep.verdict == Verdict::InconclusiveAtThisPrecision {
            EXIT_FAIL
        } else {
            EXIT_OK
        };
        let stdout = if cfg.json {
            to_json(&rep)
        } else {
            format!("{:?}: {:?}\n", rep.verdict, rep.outcomes)
        };
        return Ok(CmdOutput {
            stdout,
            stderr: String::new(),
            code,
        });
    }
    let scan = ScanConfig {
        mode,
        degree_cap: cfg.scan_degree,
        support_cap: cfg.support,
        sample_count: cfg.samples,
        seed: cfg.seed,
    };
    let summary = scan_candidates(&ctx, &scan, cfg.dim_cap)?;
    let stdout = if cfg.json {
        to_json(&summary)
    } else {
        let mut s = format!(
            "p={} k={} mode={}: scanned {} witnessed {} inconclusive {}\n",
            summary.p,
            summary.k,
            summary.mode,
            summary.scanned,
            summary.witnessed,
            summary.inconclusive
        );
        for d in &summary.details {
            let _ = writeln!(
                s,
                "inconclusive: {}",
                serde_json::to_string(&d.candidate).expect("serializes")
            );
        }
        s
    };
    let code = if summary.inconclusive == 0 {
        EXIT_OK
    } else {
        EXIT_FAIL
    };
    Ok(CmdOutput {
        stdout,
        stderr: String::new(),
        code,
    })
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<CmdOutput> {
    match &cli.command {
        Command::VerifyBrackets { .. } => cmd_verify_brackets(cfg),
        Command::VerifyLowest => cmd_verify_lowest(cfg),
        Command::Beta { m, digits } => cmd_beta(cfg, *m, *digits),
        Command::Factorize { matrix, input } => {
            cmd_factorize(cfg, matrix.as_deref(), input.as_deref())
        }
        Command::Bracket {
            a_file,
            b_file,
            gens,
            max_degree,
        } => cmd_bracket(
            cfg,
            a_file.as_deref(),
            b_file.as_deref(),
            gens.as_deref(),
            *max_degree,
        ),
        Command::Lowest { input, max_degree } => cmd_lowest(cfg, input, *max_degree),
        Command::Normality { exact, input, .. } => cmd_normality(cfg, *exact, input.as_deref()),
    }
}

/// Parses arguments and runs the command, writing `--out` if given. Output
/// that belongs on the terminal is returned rather than printed.
pub fn execute<I, T>(args: I) -> CmdOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CmdOutput {
                    stdout: String::new(),
                    stderr: text,
                    code: EXIT_USAGE,
                }
            } else {
                CmdOutput::ok(text)
            };
        }
    };
    let result = build_config(&cli.common, &cli.command).and_then(|cfg| {
        if let Some(j) = cfg.jobs {
            // a second build in the same process keeps the first pool
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build_global();
        }
        dispatch(&cli, &cfg)
    });
    match result {
        Ok(mut out) => {
            if let Some(path) = &cli.common.out {
                if let Err(e) = std::fs::write(path, &out.stdout) {
                    return CmdOutput {
                        stdout: String::new(),
                        stderr: format!("{}error: {}: {e}\n", out.stderr, path.display()),
                        code: EXIT_USAGE,
                    };
                }
                out.stdout.clear();
            }
            out
        }
        Err(e) => CmdOutput {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: EXIT_USAGE,
        },
    }
}

/// Runs [`execute`], prints its output and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let out = execute(args);
    eprint!("{}", out.stderr);
    print!("{}", out.stdout);
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list::<u32>("0-2").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_list::<u8>("1, 5,7").unwrap(), vec![1, 5, 7]);
        assert!(parse_list::<u32>("3-1").is_err());
        assert!(parse_list::<u8>("300").is_err());
    }

    #[test]
    fn config_file_parsing() {
        let map = parse_config_file("# sweep\np = 5\nscan-degree=2\n").unwrap();
        assert_eq!(map["p"], "5");
        assert_eq!(map["scan_degree"], "2");
        assert!(parse_config_file("colour=blue").is_err());
        assert!(parse_config_file("p").is_err());
    }

    #[test]
    fn default_grid() {
        let cli = Cli::try_parse_from(["iwasawa", "verify-brackets", "--k", "4"]).unwrap();
        let cfg = build_config(&cli.common, &cli.command).unwrap();
        assert_eq!(cfg.rs_grid(), vec![(0, 0), (0, 1), (1, 0)]);
        let cli = Cli::try_parse_from(["iwasawa", "verify-brackets", "--k", "2"]).unwrap();
        assert_eq!(
            build_config(&cli.common, &cli.command).unwrap().rs_grid(),
            vec![(0, 0)]
        );
    }

    fn cli(args: &[&str]) -> CmdOutput {
        execute(std::iter::once("iwasawa").chain(args.iter().copied()))
    }

    fn scratch(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("iwasawa-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn beta_and_factorize_examples() {
        let out = cli(&["beta", "--p", "5", "--m", "2", "--digits", "3"]);
        assert_eq!(out.code, 0);
        assert_eq!(out.stdout.trim(), "[0,4,1]");

        let out = cli(&["beta", "--p", "3", "--m", "2"]);
        assert_eq!(out.code, 0);
        assert_eq!(out.stdout.trim(), "[0,2,1]");
        assert!(!out.stderr.is_empty());
        assert_eq!(cli(&["beta", "--p", "3", "--m", "2", "--strict"]).code, 1);

        let out = cli(&[
            "factorize",
            "--p",
            "3",
            "--k",
            "3",
            "--matrix",
            "[1,3,0,0,1,0,0,0,1]",
        ]);
        assert_eq!(out.code, 0);
        assert_eq!(out.stdout.trim(), "[1,0,0,0,0,0,0,0]");
        let out = cli(&[
            "factorize",
            "--p",
            "3",
            "--k",
            "3",
            "--matrix",
            "[2,0,0,0,1,0,0,0,1]",
        ]);
        assert_eq!(out.code, 2);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            cli(&["verify-brackets", "--p", "3", "--k", "3", "--id", "1"]).code,
            0
        );
        assert_eq!(cli(&["verify-brackets", "--p", "3", "--k", "3"]).code, 0);
        assert_eq!(
            cli(&["verify-brackets", "--p", "3", "--k", "3", "--strict"]).code,
            1
        );
        assert_eq!(cli(&["verify-lowest", "--p", "3", "--k", "3"]).code, 0);
        assert_eq!(cli(&["verify-lowest", "--p", "3", "--k", "2"]).code, 2);
        assert_eq!(cli(&["verify-brackets", "--p", "4"]).code, 2);
        assert_eq!(cli(&["frobnicate"]).code, 2);
        assert_eq!(cli(&["--help"]).code, 0);

        let out = cli(&[
            "normality",
            "--p",
            "3",
            "--k",
            "2",
            "--trunc",
            "4",
            "--scan-degree",
            "2",
        ]);
        assert_eq!(out.code, 1);
        assert!(out.stdout.starts_with(
            "p=3 k=2 mode=truncated mod J^5: scanned 244 witnessed 0 inconclusive 244"
        ));
    }

    #[test]
    fn element_files_round_trip() {
        let ctx = Ctx::new(3, 3).unwrap();
        let (a, b) = (y_gen(2, 1, &ctx).unwrap(), y_gen(7, 1, &ctx).unwrap());
        let (pa, pb) = (scratch("a.json"), scratch("b.json"));
        std::fs::write(&pa, serde_json::to_string(&a).unwrap()).unwrap();
        std::fs::write(&pb, serde_json::to_string(&b).unwrap()).unwrap();

        let out = cli(&[
            "bracket",
            "--json",
            "--a-file",
            pa.to_str().unwrap(),
            "--b-file",
            pb.to_str().unwrap(),
        ]);
        assert_eq!(out.code, 0);
        let doc: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        let br: AlgElem = serde_json::from_value(doc["bracket"].clone()).unwrap();
        assert_eq!(br, a.bracket(&b).unwrap());
        let lowest: Poly = serde_json::from_value(doc["lowest"]["part"].clone()).unwrap();
        assert_eq!(lowest.to_string(), "Y4^3 + Y5^3");

        let pbr = scratch("br.json");
        std::fs::write(&pbr, serde_json::to_string(&br).unwrap()).unwrap();
        let out = cli(&["lowest", "--input", pbr.to_str().unwrap()]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("Y4^3 + Y5^3"));

        let out = cli(&[
            "normality",
            "--p",
            "3",
            "--k",
            "3",
            "--trunc",
            "4",
            "--input",
            pa.to_str().unwrap(),
        ]);
        assert_eq!(out.code, 0);
        let out = cli(&[
            "normality",
            "--p",
            "5",
            "--k",
            "3",
            "--input",
            pa.to_str().unwrap(),
        ]);
        assert_eq!(out.code, 2);
    }

    #[test]
    fn scan_output_is_deterministic() {
        let args = [
            "normality",
            "--json",
            "--p",
            "3",
            "--k",
            "2",
            "--trunc",
            "2",
            "--samples",
            "20",
            "--seed",
            "7",
        ];
        let first = cli(&args);
        let second = cli(&args);
        assert_eq!(first.stdout, second.stdout);
        let doc: serde_json::Value = serde_json::from_str(&first.stdout).unwrap();
        assert_eq!(doc["scanned"], 28);
        assert_eq!(doc["mode"]["truncated"], 2);
    }

    #[test]
    fn config_file_and_out_flag() {
        let cfg = scratch("run.conf");
        std::fs::write(&cfg, "# small run\np = 5\nk = 3\n").unwrap();
        let target = scratch("sweep.json");
        let out = cli(&[
            "verify-brackets",
            "--json",
            "--config",
            cfg.to_str().unwrap(),
            "--id",
            "3",
            "--out",
            target.to_str().unwrap(),
        ]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.is_empty());
        let written = std::fs::read_to_string(&target).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&written).unwrap();
        assert_eq!(doc["p"], 5);

        // flags override the file
        let out = cli(&[
            "beta",
            "--config",
            cfg.to_str().unwrap(),
            "--p",
            "7",
            "--m",
            "2",
        ]);
        assert_eq!(out.stdout.trim(), "[0,6,2]");

        std::fs::write(&cfg, "colour = blue\n").unwrap();
        assert_eq!(
            cli(&["verify-lowest", "--config", cfg.to_str().unwrap()]).code,
            2
        );
    }
}
