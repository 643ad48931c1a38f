//! Subcommands. Each returns an [`Outcome`]; `main` renders it and picks the
//! exit code.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use lefschetz_core::ledger::{sanity_bounds, slope_report, BoundsReport};
use lefschetz_core::pipelines::{
    hyperelliptic_base, lantern_walk, lantern_walk_from_ledger, low_slope_family, low_slope_window,
    missing_chain_curves, slope_limit, thm124_sequence, thm12_fibration, LanternWalk, Mode, PipelineError,
    SequenceParams, SequenceRun, WalkDirection, DEFAULT_MAX_LETTERS,
};
use lefschetz_core::word::transvection_product;
use lefschetz_core::{BigLedger, CurveName, Factorization, Report, Surface};

use crate::file::{FileError, MonodromyFile};
use crate::table::{decimal, ratio, slope_cells, Cell, Format, Output, Table, DECIMAL_PLACES, SLOPE_COLUMNS};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Verification(_) | CliError::Budget(_) => 1,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Precondition(_) => CliError::Usage(e.to_string()),
            PipelineError::Budget { .. } => {
                CliError::Budget(format!("{e} (raise --max-letters or use --mode ledger)"))
            }
            _ => CliError::Verification(e.to_string()),
        }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Json(_) | FileError::Version(_) => CliError::Usage(e.to_string()),
            _ => CliError::Verification(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lefschetz", version, about = "Low-slope Lefschetz fibrations from Dehn twist factorizations")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the final monodromy file (or, for `table`, the rendered table) here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for `table`.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    /// Largest explicit word the tool will build.
    #[arg(long, global = true, env = "LEFSCHETZ_MAX_LETTERS", default_value_t = DEFAULT_MAX_LETTERS)]
    pub max_letters: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Explicit,
    Ledger,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Explicit => Mode::Explicit,
            ModeArg::Ledger => Mode::Ledger,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirArg {
    Down,
    Up,
}

impl From<DirArg> for WalkDirection {
    fn from(d: DirArg) -> Self {
        match d {
            DirArg::Down => WalkDirection::Down,
            DirArg::Up => WalkDirection::Up,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Base,
    Thm12,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Base,
    Thm124,
    Thm12,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    #[arg(long)]
    pub g: usize,
    #[arg(long)]
    pub h: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Explicit)]
    pub mode: ModeArg,
    /// Designated nonseparating curve of the base.
    #[arg(long, default_value = "c1", value_parser = parse_curve)]
    pub c: CurveName,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The hyperelliptic base factorization.
    Base {
        #[arg(long)]
        g: usize,
    },
    /// A doubling sequence with odd chain substitutions.
    Thm124(SequenceArgs),
    /// The simply connected minimal low-slope fibration F_n.
    Thm12 {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Explicit)]
        mode: ModeArg,
    },
    /// A lantern walk that moves the slope down or up.
    Lantern {
        #[arg(long)]
        g: Option<usize>,
        #[arg(long, value_enum)]
        dir: DirArg,
        #[arg(long, value_enum, default_value_t = Source::Base)]
        from: Source,
        /// Steps for `--from thm12`.
        #[arg(long, default_value_t = 0)]
        n: usize,
        /// Walk from a monodromy file instead.
        #[arg(long, conflicts_with = "from")]
        input: Option<PathBuf>,
        #[arg(long, default_value = "c1", value_parser = parse_curve)]
        c: CurveName,
        #[arg(long, value_enum, default_value_t = ModeArg::Explicit)]
        mode: ModeArg,
    },
    /// Re-check a monodromy file.
    Verify { file: PathBuf },
    /// A grid of slope rows.
    Table {
        #[arg(long, value_enum)]
        family: Family,
        /// List or range, e.g. `3..6` or `3,5`.
        #[arg(long, value_parser = parse_list)]
        g: List,
        #[arg(long, value_parser = parse_list, default_value = "1")]
        h: List,
        #[arg(long, value_parser = parse_list, default_value = "1")]
        r: List,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Ledger)]
        mode: ModeArg,
    },
}

fn parse_curve(s: &str) -> Result<CurveName, String> {
    s.parse().map_err(|e: lefschetz_core::surface::SurfaceError| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct List(pub Vec<usize>);

/// `3`, `3,5`, `3..6` (inclusive) or any comma-joined mix.
pub fn parse_list(s: &str) -> Result<List, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad number {t:?} in {s:?}"));
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(num(part)?);
        }
    }
    Ok(List(out))
}

/// What a subcommand produced.
#[derive(Debug)]
pub struct Outcome {
    pub output: Output,
    /// Every required check held.
    pub ok: bool,
    /// Failure summary for stderr.
    pub failures: Vec<String>,
    pub file: Option<MonodromyFile>,
}

impl Outcome {
    fn new(output: Output, failures: Vec<String>, file: Option<MonodromyFile>) -> Self {
        Self { output, ok: failures.is_empty(), failures, file }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let budget = cli.max_letters;
    match &cli.command {
        Command::Base { g } => cmd_base(*g),
        Command::Thm124(a) => cmd_thm124(a, budget),
        Command::Thm12 { g, n, mode } => cmd_thm12(*g, *n, (*mode).into(), budget),
        Command::Lantern { g, dir, from, n, input, c, mode } => {
            cmd_lantern(*g, (*dir).into(), *from, *n, input.as_deref(), *c, (*mode).into(), budget)
        }
        Command::Verify { file } => cmd_verify(file),
        Command::Table { family, g, h, r, n, mode } => {
            let grid = Grid { family: *family, g: g.0.clone(), h: h.0.clone(), r: r.0.clone(), n: *n, mode: (*mode).into() };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.jobs as usize)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            pool.install(|| cmd_table(&grid, budget))
        }
    }
}

fn need_genus(g: usize, min: usize) -> Result<(), CliError> {
    if g < min {
        return Err(CliError::Usage(format!("--g must be at least {min}, got {g}")));
    }
    Ok(())
}

fn slope_table(name: &str, lead: &[&str]) -> Table {
    let cols: Vec<&str> = lead.iter().copied().chain(SLOPE_COLUMNS).collect();
    Table::new(name, &cols)
}

fn row(lead: Vec<Cell>, r: &Report) -> Vec<Cell> {
    lead.into_iter().chain(slope_cells(r)).collect()
}

fn add_bounds(out: &mut Output, bounds: &BoundsReport, failures: &mut Vec<String>) {
    for (b, ok) in &bounds.checks {
        out.check(&b.to_string(), *ok);
        if !ok {
            failures.push(b.to_string());
        }
    }
}

fn opt_check(v: Option<bool>) -> Cell {
    match v {
        Some(b) => Cell::Bool(b),
        None => "not_computed".into(),
    }
}

pub fn cmd_base(g: usize) -> Result<Outcome, CliError> {
    need_genus(g, 2)?;
    let surface = Surface::standard(g).map_err(|e| CliError::Usage(e.to_string()))?;
    let w = hyperelliptic_base(g)?;
    let report = report_of(&w)?;
    let mut out = Output::default();
    let mut t = slope_table("base", &["g"]);
    t.rows.push(row(vec![g.into()], &report));
    out.tables.push(t);
    let mut failures = Vec::new();
    let homology = w.verify_relator_homology(&surface).map_err(|e| CliError::Verification(e.to_string()))?;
    out.check("homology_identity", homology);
    if !homology {
        failures.push("homology_identity".into());
    }
    add_bounds(&mut out, &sanity_bounds(&report), &mut failures);
    Ok(Outcome::new(out, failures, Some(MonodromyFile::from_word(&w, &surface))))
}

fn report_of(w: &Factorization) -> Result<Report, CliError> {
    let ledger: BigLedger = w.ledger().cast().map_err(|e| CliError::Verification(e.to_string()))?;
    slope_report(&ledger).map_err(|e| CliError::Verification(e.to_string()))
}

fn sequence_table(run: &SequenceRun) -> Table {
    let mut t = slope_table("sequence", &["i", "r_i"]);
    t.columns.push("checks".into());
    for r in &run.rows {
        let mut cells = row(vec![r.i.into(), (&r.r).into()], &r.report);
        cells.push(if r.passed() { "pass" } else { "fail" }.into());
        t.rows.push(cells);
    }
    t
}

fn run_sequence(a: &SequenceArgs, mode: Mode, budget: usize) -> Result<(Surface, SequenceRun), CliError> {
    need_genus(a.g, 2)?;
    if a.h < 1 || a.h >= a.g {
        return Err(CliError::Usage(format!("--h must satisfy 1 <= h <= g-1, got h={} g={}", a.h, a.g)));
    }
    if a.r < 1 {
        return Err(CliError::Usage("--r must be at least 1".into()));
    }
    let mut surface = Surface::standard(a.g).map_err(|e| CliError::Usage(e.to_string()))?;
    if !surface.table().contains(a.c) {
        return Err(CliError::Usage(format!("no curve {} in genus {}", a.c, a.g)));
    }
    let base = hyperelliptic_base(a.g)?;
    let params = SequenceParams { h: a.h, r: a.r, n: a.n, mode, max_letters: budget };
    let run = thm124_sequence(&mut surface, &base, a.c, params)?;
    Ok((surface, run))
}

pub fn cmd_thm124(a: &SequenceArgs, budget: usize) -> Result<Outcome, CliError> {
    let (surface, run) = run_sequence(a, a.mode.into(), budget)?;
    let mut out = Output::default();
    out.tables.push(sequence_table(&run));
    let closed = run.rows.iter().all(|r| r.closed_form_ok);
    out.check("closed_form", closed);
    out.check("homology_identity", opt_check(all_some(run.rows.iter().map(|r| r.homology_ok))));
    out.check("twist_counts", opt_check(all_some(run.rows.iter().map(|r| r.count_ok))));
    let limit = slope_limit(&BigInt::from(a.h));
    out.check("slope_limit", format!("{} ~ {}", ratio(&limit), decimal(&limit, DECIMAL_PLACES)));
    let failures: Vec<String> = run.rows.iter().filter(|r| !r.passed()).map(|r| format!("step {}", r.i)).collect();
    let file = run.last.word.as_ref().map(|w| MonodromyFile::from_word(w, &surface));
    Ok(Outcome::new(out, failures, file))
}

fn all_some(it: impl Iterator<Item = Option<bool>>) -> Option<bool> {
    let mut acc = Some(true);
    for v in it {
        acc = Some(acc? && v?);
    }
    acc
}

pub fn cmd_thm12(g: usize, n: usize, mode: Mode, budget: usize) -> Result<Outcome, CliError> {
    need_genus(g, 3)?;
    let mut surface = Surface::standard(g).map_err(|e| CliError::Usage(e.to_string()))?;
    let fib = thm12_fibration(&mut surface, n, mode, budget)?;
    let mut out = Output::default();
    out.tables.push(sequence_table(&fib.sequence));
    let mut t = slope_table("fibration", &["n"]);
    t.rows.push(row(vec![n.into()], &fib.report));
    out.tables.push(t);

    let (lo, hi) = low_slope_window(g, n as u32);
    let expected = low_slope_family(g, n as u32);
    out.check("lambda", format!("{} ~ {}", ratio(&fib.report.lambda), decimal(&fib.report.lambda, DECIMAL_PLACES)));
    out.check("lambda_closed_form", fib.report.lambda == expected);
    out.check("window", format!("{} < lambda < {}", ratio(&lo), ratio(&hi)));
    out.check("lower_bound", fib.report.lambda > lo);
    out.check("upper_bound", fib.report.lambda < hi);
    let c = &fib.certificates;
    out.check("homology_identity", opt_check(c.homology_identity));
    out.check("chain_presence", opt_check(c.missing_chain.as_ref().map(Vec::is_empty)));
    out.check("h1_trivial", opt_check(c.h1_trivial));
    out.check("simply_connected", opt_check(c.simply_connected()));
    out.check("minimal", c.minimal);
    let mut failures = c.failures();
    add_bounds(&mut out, &c.bounds, &mut Vec::new());
    if fib.report.lambda != expected {
        failures.push("lambda_closed_form".into());
    }
    let file = fib.word.as_ref().map(|w| MonodromyFile::from_word(w, &surface));
    Ok(Outcome::new(out, failures, file))
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_lantern(
    g: Option<usize>,
    dir: WalkDirection,
    from: Source,
    n: usize,
    input: Option<&std::path::Path>,
    c: CurveName,
    mode: Mode,
    budget: usize,
) -> Result<Outcome, CliError> {
    let (mut surface, start): (Surface, Start) = match input {
        Some(path) => {
            let file = read_file(path)?;
            if g.is_some_and(|g| g != file.genus) {
                return Err(CliError::Usage(format!("--g {} does not match the file's genus {}", g.unwrap(), file.genus)));
            }
            need_genus(file.genus, 3)?;
            (file.surface()?, Start::Word(file.to_factorization()?))
        }
        None => {
            let g = g.ok_or_else(|| CliError::Usage("--g is required without --input".into()))?;
            need_genus(g, 3)?;
            let mut surface = Surface::standard(g).map_err(|e| CliError::Usage(e.to_string()))?;
            let start = match (from, mode) {
                (Source::Base, Mode::Explicit) => Start::Word(hyperelliptic_base(g)?),
                (Source::Base, Mode::Ledger) => Start::Ledger(lefschetz_core::pipelines::hyperelliptic_ledger(g)),
                (Source::Thm12, _) => {
                    let fib = thm12_fibration(&mut surface, n, mode, budget)?;
                    match fib.word {
                        Some(w) => Start::Word(w),
                        None => Start::Ledger(fib.ledger),
                    }
                }
            };
            (surface, start)
        }
    };
    let walk: LanternWalk = match &start {
        Start::Word(w) if mode == Mode::Explicit || input.is_some() => lantern_walk(&mut surface, w, c, dir, budget)?,
        Start::Word(w) => {
            let ledger: BigLedger = w.ledger().cast().map_err(|e| CliError::Verification(e.to_string()))?;
            lantern_walk_from_ledger(&ledger, dir)?
        }
        Start::Ledger(l) => lantern_walk_from_ledger(l, dir)?,
    };

    let mut out = Output::default();
    let mut t = slope_table("walk", &["stage"]);
    t.rows.push(row(vec!["before".into()], &walk.before));
    t.rows.push(row(vec!["summed".into()], &walk.summed));
    t.rows.push(row(vec!["after".into()], &walk.after));
    out.tables.push(t);
    let verdict = verdict(&walk.before.lambda, &walk.after.lambda);
    out.check("before", ratio(&walk.before.lambda));
    out.check("after", ratio(&walk.after.lambda));
    out.check("verdict", verdict);
    let mut failures = Vec::new();
    if !walk.passed() {
        let wanted = match dir {
            WalkDirection::Down => "decreased",
            WalkDirection::Up => "increased",
        };
        failures.push(format!("slope {verdict}, expected {wanted}"));
    }
    if let Some(w) = &walk.word {
        let homology = w.verify_relator_homology(&surface).map_err(|e| CliError::Verification(e.to_string()))?;
        out.check("homology_identity", homology);
        if !homology {
            failures.push("homology_identity".into());
        }
    }
    add_bounds(&mut out, &sanity_bounds(&walk.after), &mut failures);
    let file = walk.word.as_ref().map(|w| MonodromyFile::from_word(w, &surface));
    Ok(Outcome::new(out, failures, file))
}

enum Start {
    Word(Factorization),
    Ledger(BigLedger),
}

fn verdict(before: &Ratio<BigInt>, after: &Ratio<BigInt>) -> &'static str {
    match after.cmp(before) {
        std::cmp::Ordering::Less => "decreased",
        std::cmp::Ordering::Equal => "unchanged",
        std::cmp::Ordering::Greater => "increased",
    }
}

fn read_file(path: &std::path::Path) -> Result<MonodromyFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(MonodromyFile::parse(&text)?)
}

/// Re-checks a file from its letters alone: declared maps, ledger length,
/// the homology identity and the slope bounds must hold. `H₁` and chain
/// presence are reported but do not fail the file, since plenty of valid
/// fibrations are not simply connected.
pub fn cmd_verify(path: &std::path::Path) -> Result<Outcome, CliError> {
    let file = read_file(path)?;
    need_genus(file.genus, 2)?;
    let mut out = Output::default();
    let mut checks = Table::new("checks", &["check", "status", "detail"]);
    let mut failures = Vec::new();
    let mut record = |name: &str, status: &str, detail: String, failures: &mut Vec<String>| {
        if status == "fail" {
            failures.push(if detail.is_empty() { name.to_string() } else { format!("{name}: {detail}") });
        }
        checks.rows.push(vec![name.into(), status.into(), detail.into()]);
    };
    let pass = |ok: bool| if ok { "pass" } else { "fail" };

    let surface = match file.surface() {
        Ok(s) => Some(s),
        Err(e) => {
            record("declared_maps", "fail", e.to_string(), &mut failures);
            None
        }
    };
    if let Some(surface) = &surface {
        let bad: Vec<String> = surface
            .declared_maps()
            .map(|d| surface.check_declared_consistency(d))
            .filter(|r| !r.passed())
            .map(|r| format!("{}: {}", r.map, r.failures.join("; ")))
            .collect();
        record("declared_maps", pass(bad.is_empty()), bad.join(" | "), &mut failures);
    }

    let len_ok = file.ledger.n == file.letters.len() as i64;
    record(
        "ledger_length",
        pass(len_ok),
        format!("ledger n = {}, letters = {}", file.ledger.n, file.letters.len()),
        &mut failures,
    );

    if let Some(surface) = &surface {
        let classes: Result<Vec<_>, _> = file.letters.iter().map(|e| surface.homology_of_curve(e)).collect();
        match classes.map_err(|e| e.to_string()).and_then(|cs| {
            transvection_product(surface.lattice().dim(), &cs).map_err(|e| e.to_string())
        }) {
            Ok(m) => record("homology_identity", pass(m.is_identity()), String::new(), &mut failures),
            Err(e) => record("homology_identity", "fail", e, &mut failures),
        }
        match lefschetz_core::ledger::h1_of_fiber_quotient(surface, &file.letters) {
            Ok(inv) => {
                let detail = if inv.is_empty() {
                    "trivial".to_string()
                } else {
                    inv.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
                };
                record("h1_quotient", "info", detail, &mut failures);
            }
            Err(e) => record("h1_quotient", "info", e.to_string(), &mut failures),
        }
        let missing = missing_chain_curves(file.genus, &file.letters);
        let detail = if missing.is_empty() {
            "all present".to_string()
        } else {
            format!("missing {}", missing.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
        };
        record("chain_presence", "info", detail, &mut failures);
    }

    let ledger: BigLedger = file.ledger().cast().map_err(|e| CliError::Verification(e.to_string()))?;
    match slope_report(&ledger) {
        Ok(report) => {
            for (b, ok) in &sanity_bounds(&report).checks {
                record(&b.to_string(), pass(*ok), String::new(), &mut failures);
            }
            let mut t = slope_table("ledger", &["g"]);
            t.rows.push(row(vec![file.genus.into()], &report));
            out.tables.push(t);
        }
        Err(e) => record("slope_report", "fail", e.to_string(), &mut failures),
    }
    out.tables.push(checks);
    Ok(Outcome::new(out, failures, None))
}

#[derive(Debug, Clone)]
pub struct Grid {
    pub family: Family,
    pub g: Vec<usize>,
    pub h: Vec<usize>,
    pub r: Vec<usize>,
    pub n: usize,
    pub mode: Mode,
}

struct GridRows {
    rows: Vec<Vec<Cell>>,
    failures: Vec<String>,
}

pub fn cmd_table(grid: &Grid, budget: usize) -> Result<Outcome, CliError> {
    if grid.g.is_empty() {
        return Err(CliError::Usage("--g is empty".into()));
    }
    let min_g = if grid.family == Family::Thm12 { 3 } else { 2 };
    for &g in &grid.g {
        need_genus(g, min_g)?;
    }
    let (name, lead): (&str, &[&str]) = match grid.family {
        Family::Base => ("base", &["g"]),
        Family::Thm124 => ("thm124", &["g", "h", "r", "mode", "i", "r_i"]),
        Family::Thm12 => ("thm12", &["g", "mode", "n"]),
    };
    let mut points: Vec<(usize, usize, usize)> = Vec::new();
    for &g in &grid.g {
        match grid.family {
            Family::Thm124 => {
                for &h in grid.h.iter().filter(|&&h| h >= 1 && h < g) {
                    for &r in &grid.r {
                        points.push((g, h, r));
                    }
                }
            }
            _ => points.push((g, 0, 0)),
        }
    }
    let results: Vec<Result<GridRows, CliError>> =
        points.par_iter().map(|&(g, h, r)| grid_point(grid, g, h, r, budget)).collect();
    let mut t = slope_table(name, lead);
    t.columns.push("checks".into());
    let mut failures = Vec::new();
    for res in results {
        let part = res?;
        t.rows.extend(part.rows);
        failures.extend(part.failures);
    }
    let mut out = Output::default();
    out.tables.push(t);
    Ok(Outcome::new(out, failures, None))
}

fn grid_point(grid: &Grid, g: usize, h: usize, r: usize, budget: usize) -> Result<GridRows, CliError> {
    let mark = |ok: bool| Cell::from(if ok { "pass" } else { "fail" });
    match grid.family {
        Family::Base => {
            let report = report_of(&hyperelliptic_base(g)?)?;
            let ok = sanity_bounds(&report).passed();
            let mut cells = row(vec![g.into()], &report);
            cells.push(mark(ok));
            let failures = if ok { vec![] } else { vec![format!("base g={g}")] };
            Ok(GridRows { rows: vec![cells], failures })
        }
        Family::Thm124 => {
            let args = SequenceArgs { g, h, r, n: grid.n, mode: ModeArg::Ledger, c: CurveName::C(1) };
            let (mode, run) = with_fallback(grid.mode, |m| run_sequence(&args, m, budget).map(|(_, run)| run))?;
            let mut rows = Vec::new();
            let mut failures = Vec::new();
            for s in &run.rows {
                let lead = vec![g.into(), h.into(), r.into(), mode.to_string().into(), s.i.into(), (&s.r).into()];
                let mut cells = row(lead, &s.report);
                cells.push(mark(s.passed()));
                if !s.passed() {
                    failures.push(format!("thm124 g={g} h={h} r={r} step {}", s.i));
                }
                rows.push(cells);
            }
            Ok(GridRows { rows, failures })
        }
        Family::Thm12 => {
            let mut rows = Vec::new();
            let mut failures = Vec::new();
            for i in 0..=grid.n {
                let built = with_fallback(grid.mode, |m| {
                    let mut surface = Surface::standard(g).map_err(|e| CliError::Usage(e.to_string()))?;
                    match thm12_fibration(&mut surface, i, m, budget) {
                        Ok(f) => Ok(Some(f)),
                        Err(PipelineError::Certificate(_)) => Ok(None),
                        Err(e) => Err(e.into()),
                    }
                })?;
                let (mode, fib) = built;
                let lead = vec![g.into(), mode.to_string().into(), i.into()];
                match fib {
                    Some(f) => {
                        let mut cells = row(lead, &f.report);
                        cells.push(mark(true));
                        rows.push(cells);
                    }
                    None => {
                        failures.push(format!("thm12 g={g} n={i}"));
                        let mut cells = lead;
                        cells.extend(SLOPE_COLUMNS.iter().map(|_| Cell::from("-")));
                        cells.push(mark(false));
                        rows.push(cells);
                    }
                }
            }
            Ok(GridRows { rows, failures })
        }
    }
}

/// Runs in `mode`, dropping to ledger mode when the explicit word would
/// exceed the letter budget.
fn with_fallback<T>(mode: Mode, f: impl Fn(Mode) -> Result<T, CliError>) -> Result<(Mode, T), CliError> {
    match f(mode) {
        Err(CliError::Budget(_)) if mode == Mode::Explicit => Ok((Mode::Ledger, f(Mode::Ledger)?)),
        other => Ok((mode, other?)),
    }
}
