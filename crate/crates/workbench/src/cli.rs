//! Command-line front end.

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use semicohen_core::generic::{
    build_filter, check_family, derive_family, reconstruct_filter, standard_seq_sets, DenseSet, FilterTrace,
    GrowthPolicy, IndexInDomain, ProductDense,
};
use semicohen_core::iteration::{enumerate_q, unflatten, Environment, FlatPoset, QPoset};
use semicohen_core::poset::{enumerate_universe, EnumerationError, DEFAULT_UNIVERSE_CAP};
use semicohen_core::product::{
    enumerate_r, in_d, lift, proj, r_leq, random_d, random_evdiff_strengthening, ProductPoset,
};
use semicohen_core::suites::{self, SeparationBounds, SuiteResult};
use semicohen_core::{CohenPoset, Enumerable, Index, Mode, Poset, SeqPoset, Truncation};

use crate::dot::hasse_dot;
use crate::json::{seq_to_value, Canonical};
use crate::trace::write_trace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Enumerate,
    Verify,
    Simulate,
    EmbedDemo,
    Hasse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PosetKind {
    Scale,
    Evdiff,
    Cohen,
    Product,
    Residue,
    Flat,
}

#[derive(Debug, Parser)]
#[command(
    name = "semicohen",
    version,
    about = "Finite forcing posets: enumeration, property sweeps, simulation"
)]
pub struct Args {
    /// Subcommand; may instead come from the config file
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON file with any of the options below; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub poset: Option<PosetKind>,
    /// Comma-separated indices, e.g. 0,1,2
    #[arg(long)]
    pub indices: Option<String>,
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long)]
    pub max_val: Option<u32>,
    /// A range `a..b` (inclusive) or a comma-separated list
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Random cases per randomized property
    #[arg(long)]
    pub samples: Option<usize>,
    /// Largest universe to materialize
    #[arg(long)]
    pub cap: Option<usize>,
    /// Output file; standard output when absent
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Directory for per-seed trace logs
    #[arg(long)]
    pub trace_dir: Option<PathBuf>,
}

/// The same options as a config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub command: Option<Command>,
    pub poset: Option<PosetKind>,
    pub indices: Option<Vec<Index>>,
    pub max_len: Option<usize>,
    pub max_val: Option<u32>,
    pub seeds: Option<Vec<u64>>,
    pub steps: Option<usize>,
    pub samples: Option<usize>,
    pub cap: Option<usize>,
    pub output: Option<PathBuf>,
    pub trace_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub poset: PosetKind,
    pub truncation: Truncation,
    pub seeds: Vec<u64>,
    pub steps: usize,
    pub samples: usize,
    pub cap: usize,
    pub output: Option<PathBuf>,
    pub trace_dir: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config file: {0}")]
    Config(#[from] serde_json::Error),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

fn parse_indices(s: &str) -> Result<Vec<Index>, CliError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad index `{t}`")))
        })
        .collect()
}

fn parse_range(s: &str) -> Option<RangeInclusive<u64>> {
    let (a, b) = s.split_once("..")?;
    let b = b.strip_prefix('=').unwrap_or(b);
    Some(a.trim().parse().ok()?..=b.trim().parse().ok()?)
}

pub fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    if let Some(r) = parse_range(s) {
        if r.is_empty() {
            return Err(CliError::Usage(format!("empty seed range `{s}`")));
        }
        return Ok(r.collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Usage(format!("bad seed `{t}`"))))
        .collect()
}

impl RunConfig {
    /// Merges flags over the config file and fills defaults.
    pub fn resolve(args: Args) -> Result<Self, CliError> {
        let file: FileConfig = match &args.config {
            Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
            None => FileConfig::default(),
        };
        let command = args
            .command
            .or(file.command)
            .ok_or_else(|| CliError::Usage("no command given".into()))?;
        let poset = args.poset.or(file.poset).unwrap_or(match command {
            Command::EmbedDemo => PosetKind::Product,
            _ => PosetKind::Scale,
        });
        let indices = match args.indices {
            Some(s) => parse_indices(&s)?,
            None => file.indices.unwrap_or_else(|| vec![0, 1, 2]),
        };
        let max_len = args.max_len.or(file.max_len).unwrap_or(2);
        let max_val = args.max_val.or(file.max_val).unwrap_or(3);
        let truncation = Truncation::new(indices, max_len, max_val);
        truncation.validate()?;
        if truncation.indices.is_empty() {
            return Err(CliError::Usage("at least one index is required".into()));
        }
        let seeds = match args.seeds {
            Some(s) => parse_seeds(&s)?,
            None => file.seeds.unwrap_or_else(|| vec![1]),
        };
        Ok(RunConfig {
            command,
            poset,
            truncation,
            seeds,
            steps: args.steps.or(file.steps).unwrap_or(50),
            samples: args.samples.or(file.samples).unwrap_or(10_000),
            cap: args.cap.or(file.cap).unwrap_or(DEFAULT_UNIVERSE_CAP),
            output: args.output.or(file.output),
            trace_dir: args.trace_dir.or(file.trace_dir),
        })
    }

    fn mode(&self) -> Result<Mode, CliError> {
        match self.poset {
            PosetKind::Scale => Ok(Mode::Scale),
            PosetKind::Evdiff => Ok(Mode::EvDiff),
            other => Err(CliError::Usage(format!("{other:?} has no sequence mode"))),
        }
    }

    fn pool(&self) -> Vec<Index> {
        self.truncation.indices.iter().copied().collect()
    }
}

/// Whether every check the command ran passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub passed: bool,
}

fn universe_lines(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let t = &cfg.truncation;
    Ok(match cfg.poset {
        PosetKind::Scale | PosetKind::Evdiff => {
            let mode = cfg.mode()?;
            enumerate_universe(&SeqPoset { mode }, t, cfg.cap)?
                .iter()
                .map(|p| seq_to_value(mode, p).to_string())
                .collect()
        }
        PosetKind::Cohen => enumerate_universe(&CohenPoset, t, cfg.cap)?
            .iter()
            .map(Canonical::to_json)
            .collect(),
        PosetKind::Flat => enumerate_universe(&SeqPoset::EVDIFF, t, cfg.cap)?
            .iter()
            .map(|p| unflatten(p).to_json())
            .collect(),
        PosetKind::Residue => enumerate_q(&cfg.pool(), t.max_len, t.max_val)
            .iter()
            .map(Canonical::to_json)
            .collect(),
        PosetKind::Product => enumerate_r(&cfg.pool(), t.max_len, t.max_val)
            .iter()
            .map(Canonical::to_json)
            .collect(),
    })
}

fn hasse(cfg: &RunConfig) -> Result<String, CliError> {
    let t = &cfg.truncation;
    Ok(match cfg.poset {
        PosetKind::Scale | PosetKind::Evdiff => {
            let mode = cfg.mode()?;
            let u = enumerate_universe(&SeqPoset { mode }, t, cfg.cap)?;
            hasse_dot(&SeqPoset { mode }, &u, |p| seq_to_value(mode, p).to_string())
        }
        PosetKind::Cohen => {
            let u = enumerate_universe(&CohenPoset, t, cfg.cap)?;
            hasse_dot(&CohenPoset, &u, Canonical::to_json)
        }
        PosetKind::Flat => {
            let u: Vec<_> = enumerate_universe(&SeqPoset::EVDIFF, t, cfg.cap)?
                .iter()
                .map(unflatten)
                .collect();
            hasse_dot(&FlatPoset { mode: Mode::EvDiff }, &u, Canonical::to_json)
        }
        PosetKind::Residue => {
            let u = enumerate_q(&cfg.pool(), t.max_len, t.max_val);
            check_cap(u.len(), cfg.cap)?;
            let env = Environment::tails_only();
            hasse_dot(
                &QPoset {
                    env: &env,
                    mode: Mode::EvDiff,
                },
                &u,
                Canonical::to_json,
            )
        }
        PosetKind::Product => {
            let u = enumerate_r(&cfg.pool(), t.max_len, t.max_val);
            check_cap(u.len(), cfg.cap)?;
            hasse_dot(&ProductPoset, &u, Canonical::to_json)
        }
    })
}

fn check_cap(size: usize, cap: usize) -> Result<(), CliError> {
    if size > cap {
        return Err(EnumerationError::Overflow {
            size: size as u128,
            cap,
        }
        .into());
    }
    Ok(())
}

fn verify_rows(cfg: &RunConfig) -> Result<Vec<SuiteResult>, CliError> {
    let t = &cfg.truncation;
    let seed = cfg.seeds[0];
    let mut rows = Vec::new();
    match cfg.poset {
        PosetKind::Scale | PosetKind::Evdiff => {
            let mode = cfg.mode()?;
            check_cap(size(&SeqPoset { mode }, t), cfg.cap)?;
            rows.extend(suites::amalgamation_sweep(mode, t, t.max_len + 1));
            rows.push(suites::forcing_clause_sweep(mode, t));
            rows.push(suites::downward_closure_sweep(mode, t));
            let u = semicohen_core::seq::enumerate_seq(t);
            rows.push(suites::order_axioms(mode.name(), &SeqPoset { mode }, &u));
            if mode == Mode::Scale {
                let first = *t.indices.iter().next().unwrap();
                let small = Truncation::new([first], 2, 2);
                let big = Truncation::new(t.indices.iter().copied().take(2), 2, 2);
                rows.push(suites::predensity_demo(&small, &big));
            } else {
                rows.push(suites::isomorphism_sweep(mode, t));
            }
        }
        PosetKind::Cohen => {
            check_cap(size(&CohenPoset, t), cfg.cap)?;
            rows.push(suites::cohen_compatibility_sweep(t));
            rows.push(suites::cohen_regularity_sweep(t));
            rows.push(suites::order_axioms("cohen", &CohenPoset, &CohenPoset.enumerate_all(t)));
        }
        PosetKind::Product => {
            let pool = cfg.pool();
            let pool = &pool[..pool.len().min(2)];
            rows.push(suites::projection_monotone_exhaustive(pool, t.max_len, t.max_val));
            rows.push(suites::projection_monotone_random(cfg.samples, seed));
            rows.push(suites::lift_random(cfg.samples, seed));
            rows.push(suites::densify_random(cfg.samples, seed));
            let r = enumerate_r(pool, 1, 2);
            rows.push(suites::order_axioms("product", &ProductPoset, &r));
        }
        PosetKind::Residue => {
            let b = SeparationBounds {
                indices: cfg.pool(),
                max_len: t.max_len,
                max_val: t.max_val,
                env_len: t.max_len,
                env_val: t.max_val,
            };
            rows.extend(suites::separativity_sweep(&b));
            let gamma = t.indices.iter().next_back().unwrap() + 1;
            rows.push(suites::non_dense_witness_sweep(&b.indices, gamma, t.max_val.min(3)));
        }
        PosetKind::Flat => {
            check_cap(size(&SeqPoset::EVDIFF, t), cfg.cap)?;
            for mode in [Mode::EvDiff, Mode::Scale] {
                rows.push(suites::isomorphism_sweep(mode, t));
                let u: Vec<_> = semicohen_core::seq::enumerate_seq(t).iter().map(unflatten).collect();
                rows.push(suites::order_axioms(
                    &format!("{} flat", mode.name()),
                    &FlatPoset { mode },
                    &u,
                ));
            }
        }
    }
    Ok(rows)
}

fn size<P: Enumerable>(poset: &P, t: &Truncation) -> usize {
    usize::try_from(poset.universe_size(t)).unwrap_or(usize::MAX)
}

fn write_table(out: &mut dyn Write, rows: &[SuiteResult]) -> std::io::Result<()> {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(8).max(8);
    writeln!(
        out,
        "{:<width$}  {:>10}  {:>8}  status",
        "property", "checked", "failed"
    )?;
    for r in rows {
        let status = if r.passed() { "pass" } else { "FAIL" };
        writeln!(
            out,
            "{:<width$}  {:>10}  {:>8}  {status}",
            r.name, r.checked, r.failures
        )?;
        if let Some(f) = &r.first_failure {
            writeln!(out, "  first failure: {f}")?;
        }
    }
    Ok(())
}

fn simulate(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let pool = cfg.pool();
    let policy = GrowthPolicy::new(pool.iter().copied(), cfg.truncation.max_val);
    if let Some(dir) = &cfg.trace_dir {
        fs::create_dir_all(dir)?;
    }
    let trace_file = |seed: u64| cfg.trace_dir.as_ref().map(|d| d.join(format!("trace-{seed}.ldjson")));
    let mut passed = 0usize;
    match cfg.poset {
        PosetKind::Scale | PosetKind::Evdiff => {
            let mode = cfg.mode()?;
            let poset = SeqPoset { mode };
            let sets = standard_seq_sets(&pool, cfg.truncation.max_len);
            for &seed in &cfg.seeds {
                let trace = build_filter(&poset, &policy, &sets, cfg.steps, seed)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                let fam = derive_family(&trace.chain);
                let report = check_family(&fam, mode);
                let recovered = reconstruct_filter(&fam, &trace.chain, mode).len() == trace.chain.len();
                let ok = report.passed() && recovered && trace.is_descending(&poset);
                passed += usize::from(ok);
                writeln!(
                    out,
                    "seed {seed}: length {} steps {} pairs {} {}",
                    trace.last().n(),
                    trace.chain.len() - 1,
                    report.pairs.len(),
                    if ok { "pass" } else { "FAIL" }
                )?;
                if let Some(path) = trace_file(seed) {
                    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
                    write_trace(&mut f, &trace, |p| seq_to_value(mode, p))?;
                }
            }
        }
        PosetKind::Cohen => {
            let sets: Vec<Box<dyn DenseSet<CohenPoset>>> =
                pool.iter().map(|&a| Box::new(IndexInDomain(a)) as _).collect();
            for &seed in &cfg.seeds {
                let trace = build_filter(&CohenPoset, &policy, &sets, cfg.steps, seed)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                passed += usize::from(report_chain(out, &CohenPoset, &trace)?);
                if let Some(path) = trace_file(seed) {
                    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
                    write_trace(&mut f, &trace, Canonical::to_value)?;
                }
            }
        }
        PosetKind::Product => {
            let mut sets: Vec<Box<dyn DenseSet<ProductPoset>>> =
                pool.iter().map(|&a| Box::new(IndexInDomain(a)) as _).collect();
            sets.push(Box::new(ProductDense));
            for &seed in &cfg.seeds {
                let trace = build_filter(&ProductPoset, &policy, &sets, cfg.steps, seed)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                passed += usize::from(report_chain(out, &ProductPoset, &trace)?);
                if let Some(path) = trace_file(seed) {
                    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
                    write_trace(&mut f, &trace, Canonical::to_value)?;
                }
            }
        }
        other => return Err(CliError::Usage(format!("simulate does not support {other:?}"))),
    }
    let what = match cfg.poset {
        PosetKind::Scale | PosetKind::Evdiff => "family checks",
        _ => "chain checks",
    };
    writeln!(out, "{passed}/{} {what} pass", cfg.seeds.len())?;
    Ok(Outcome {
        passed: passed == cfg.seeds.len(),
    })
}

fn report_chain<P: Poset>(out: &mut dyn Write, poset: &P, trace: &FilterTrace<P::Cond>) -> std::io::Result<bool> {
    let ok = trace.is_descending(poset);
    writeln!(
        out,
        "seed {}: steps {} met {} {}",
        trace.seed,
        trace.chain.len() - 1,
        trace.met.len(),
        if ok { "pass" } else { "FAIL" }
    )?;
    Ok(ok)
}

fn embed_demo(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let pool = cfg.pool();
    let t = &cfg.truncation;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seeds[0]);
    let count = cfg.samples.min(1000);
    let mut all_ok = true;
    for _ in 0..count {
        let r0 = random_d(&pool, t.max_len, t.max_val, &mut rng);
        let p0 = proj(&r0).map_err(|e| CliError::Usage(e.to_string()))?;
        let p1 = random_evdiff_strengthening(&p0, &pool, t.max_len, t.max_val + 2, &mut rng);
        let (lifted, ok) = match lift(&r0, &p1) {
            Ok(r2) => {
                let q = proj(&r2).ok();
                let ok = in_d(r2.r()).is_ok()
                    && r_leq(r0.r(), r2.r())
                    && q.as_ref()
                        .is_some_and(|q| semicohen_core::seq::seq_leq(Mode::EvDiff, &p1, q));
                let q = q.map_or(serde_json::Value::Null, |q| seq_to_value(Mode::EvDiff, &q));
                (serde_json::json!({"r": r2.r().to_value(), "proj": q}), ok)
            }
            Err(e) => (serde_json::Value::String(e.to_string()), false),
        };
        all_ok &= ok;
        let mut m = serde_json::Map::new();
        m.insert("r".into(), r0.r().to_value());
        m.insert("proj".into(), seq_to_value(Mode::EvDiff, &p0));
        m.insert("strengthened".into(), seq_to_value(Mode::EvDiff, &p1));
        m.insert("lift".into(), lifted);
        m.insert("ok".into(), ok.into());
        writeln!(out, "{}", serde_json::Value::Object(m))?;
    }
    Ok(Outcome { passed: all_ok })
}

/// Runs the configured command, writing its report to `out` unless an output
/// file is configured.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let mut file;
    let out: &mut dyn Write = match &cfg.output {
        Some(path) => {
            file = std::io::BufWriter::new(fs::File::create(path)?);
            &mut file
        }
        None => stdout,
    };
    let outcome = match cfg.command {
        Command::Enumerate => {
            let lines = universe_lines(cfg)?;
            for l in &lines {
                writeln!(out, "{l}")?;
            }
            Outcome { passed: true }
        }
        Command::Hasse => {
            out.write_all(hasse(cfg)?.as_bytes())?;
            Outcome { passed: true }
        }
        Command::Verify => {
            let rows = verify_rows(cfg)?;
            write_table(out, &rows)?;
            Outcome {
                passed: rows.iter().all(SuiteResult::passed),
            }
        }
        Command::Simulate => simulate(cfg, out)?,
        Command::EmbedDemo => embed_demo(cfg, out)?,
    };
    out.flush()?;
    Ok(outcome)
}
