//! The `scl` command line: argument parsing, output formats and exit codes.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::analytic::{self, BoundKind};
use crate::classno::{self, ClassNoError};
use crate::scan::{self, ScanRow, ScanSummary, Subcase};
use crate::thue;

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNRESOLVED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IndexArg {
    #[value(name = "1")]
    One,
    #[value(name = "3")]
    Three,
    #[value(name = "27")]
    TwentySeven,
    All,
}

impl IndexArg {
    fn indices(self) -> Vec<u32> {
        match self {
            IndexArg::One => vec![1],
            IndexArg::Three => vec![3],
            IndexArg::TwentySeven => vec![27],
            IndexArg::All => vec![1, 3, 27],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LambdaArg {
    /// Every positive divisor of m² + 3m + 9.
    All,
    /// λ = 1 only.
    Unit,
}

/// Inclusive range `A:B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Range(pub i64, pub i64);

fn parse_range(s: &str) -> Result<Range, String> {
    let (a, b) = s.split_once(':').ok_or("expected A:B")?;
    let a = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
    let b = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
    if a < -1 || b < a {
        return Err(format!("need -1 <= A <= B, got {a}:{b}"));
    }
    Ok(Range(a, b))
}

#[derive(Debug, Parser)]
#[command(name = "scl", version, about = "Class numbers, conductors and Thue equations of simplest cubic fields")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "table", global = true)]
    pub format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, env = "SCL_THREADS", global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariants and class number of L_m.
    Field {
        #[arg(allow_hyphen_values = true)]
        m: i64,
    },
    /// Small class numbers by index and conductor shape.
    Scan {
        /// Defaults to the range left open by the analytic cutoff.
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: Option<Range>,
        #[arg(long, value_enum, default_value = "all")]
        index: IndexArg,
        #[arg(long, value_parser = clap::value_parser!(Subcase))]
        subcase: Option<Subcase>,
        #[arg(long, default_value_t = 1000)]
        hmax: u64,
    },
    /// Fields with class number below 16.
    H16 {
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-1:10000000")]
        range: Range,
        /// Compute every class number instead of skipping fields the lower bounds exclude.
        #[arg(long)]
        no_prefilter: bool,
    },
    /// Solutions of F_m(x, y) = λ with λ | m² + 3m + 9.
    Thue {
        #[arg(allow_hyphen_values = true)]
        m: i64,
        #[arg(long, default_value_t = thue::DEFAULT_BOUND)]
        bound: i64,
        #[arg(long, value_enum, default_value = "all")]
        lambda: LambdaArg,
    },
    /// Pairs m < n <= MAX with L_m = L_n.
    Coincide {
        #[arg(long)]
        max: i64,
        #[arg(long, default_value_t = thue::DEFAULT_BOUND)]
        bound: i64,
    },
    /// Cutoffs past which the analytic bounds exceed hmax.
    Bounds {
        #[arg(long, value_parser = ["1", "3", "27"])]
        index: String,
        #[arg(long)]
        hmax: f64,
    },
    /// Recompute every row of the embedded h < 16 tables.
    VerifyTables,
    /// Count nontrivial Thue solutions over all coinciding fields.
    Count66 {
        #[arg(long, default_value_t = thue::DEFAULT_BOUND)]
        bound: i64,
    },
}

impl clap::builder::ValueParserFactory for Subcase {
    type Parser = fn(&str) -> Result<Subcase, String>;
    fn value_parser() -> Self::Parser {
        |s| s.parse()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Str(String),
    Bool(bool),
    Null,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.6}"),
            Cell::Str(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(v) => s.serialize_i64(v),
                Err(_) => s.serialize_i128(*v),
            },
            Cell::Float(v) => s.serialize_f64(*v),
            Cell::Str(v) => s.serialize_str(v),
            Cell::Bool(v) => s.serialize_bool(*v),
            Cell::Null => s.serialize_none(),
        }
    }
}

macro_rules! cell_from_int {
    ($($t:ty),*) => {$(impl From<$t> for Cell { fn from(v: $t) -> Self { Cell::Int(v as i128) } })*};
}
cell_from_int!(i64, u64, u32, u8, usize);

impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        i128::try_from(v).map_or_else(|_| Cell::Str(v.to_string()), Cell::Int)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

/// Output of one subcommand: fixed columns, rows, and summary lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `(key, value)` pairs; a `summary` object in JSON, trailing lines in tables.
    pub summary: Vec<(&'static str, Cell)>,
    /// Process exit code.
    pub status: i32,
}

struct RowObject<'a>(&'a [&'static str], &'a [Cell]);

impl Serialize for RowObject<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct Rows<'a>(&'a Report);

impl Serialize for Rows<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.rows.len()))?;
        for r in &self.0.rows {
            seq.serialize_element(&RowObject(&self.0.columns, r))?;
        }
        seq.end()
    }
}

impl Serialize for Report {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let keys: Vec<&'static str> = self.summary.iter().map(|p| p.0).collect();
        let vals: Vec<Cell> = self.summary.iter().map(|p| p.1.clone()).collect();
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("schema_version", &SCHEMA_VERSION)?;
        map.serialize_entry("command", &self.command)?;
        map.serialize_entry("rows", &Rows(self))?;
        map.serialize_entry("summary", &RowObject(&keys, &vals))?;
        map.end()
    }
}

impl Report {
    fn new(command: String, columns: Vec<&'static str>) -> Self {
        Report { command, columns, rows: Vec::new(), summary: Vec::new(), status: EXIT_OK }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("serializable") + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).expect("in-memory write");
                for r in &self.rows {
                    w.write_record(r.iter().map(Cell::render)).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
            }
            Format::Table => self.render_table(),
        }
    }

    fn render_table(&self) -> String {
        let mut s = String::new();
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
        if cells.len() == 1 && self.columns.len() > 6 {
            let w = self.columns.iter().map(|c| c.len()).max().unwrap_or(0);
            for (k, v) in self.columns.iter().zip(&cells[0]) {
                let _ = writeln!(s, "{k:<w$}  {v}");
            }
        } else if !self.columns.is_empty() {
            let widths: Vec<usize> = (0..self.columns.len())
                .map(|i| cells.iter().map(|r| r[i].len()).chain([self.columns[i].len()]).max().unwrap_or(0))
                .collect();
            let line = |row: &[String]| {
                row.iter().zip(&widths).map(|(v, w)| format!("{v:>w$}")).collect::<Vec<_>>().join("  ")
            };
            let header: Vec<String> = self.columns.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(s, "{}", line(&header));
            for r in &cells {
                let _ = writeln!(s, "{}", line(r));
            }
        }
        for (k, v) in &self.summary {
            let _ = writeln!(s, "{k}: {}", v.render());
        }
        s
    }
}

const SCAN_COLUMNS: [&str; 12] = [
    "m",
    "D",
    "factorization",
    "conductor",
    "index",
    "subcase",
    "value",
    "h",
    "h_estimate",
    "unit_index",
    "constraints_ok",
    "unresolved",
];

fn scan_row_cells(r: &ScanRow) -> Vec<Cell> {
    vec![
        r.m.into(),
        r.d.into(),
        r.d_factors.to_string().into(),
        r.conductor.into(),
        r.index.into(),
        r.subcase.map(|s| s.to_string()).into(),
        r.value.into(),
        r.h.into(),
        r.h_estimate.into(),
        r.unit_index.into(),
        r.constraints.map(|c| c.all_pass()).into(),
        r.unresolved().into(),
    ]
}

fn scan_report(command: String, rows: &[ScanRow], summary: &ScanSummary) -> Report {
    let mut rep = Report::new(command, SCAN_COLUMNS.to_vec());
    rep.rows = rows.iter().map(scan_row_cells).collect();
    let buckets = summary.buckets.iter().map(|(h, n)| format!("{h}:{n}")).collect::<Vec<_>>().join(",");
    rep.summary = vec![
        ("filter", summary.filter.clone().into()),
        ("range", format!("{}:{}", summary.range.0, summary.range.1).into()),
        ("buckets", buckets.into()),
        ("total", summary.total.into()),
        ("computed", summary.computed.into()),
        ("unresolved", summary.unresolved.into()),
    ];
    if summary.unresolved > 0 {
        rep.status = EXIT_UNRESOLVED;
    }
    rep
}

fn thue_columns() -> Vec<&'static str> {
    vec!["m", "x", "y", "lambda", "trivial", "orbit_x", "orbit_y"]
}

fn thue_cells(s: &thue::ThueSolution) -> Vec<Cell> {
    vec![s.m.into(), s.x.into(), s.y.into(), s.lambda.into(), s.trivial.into(), s.orbit_id.0.into(), s.orbit_id.1.into()]
}

/// Runs one parsed command; errors are messages for standard error with an exit code.
pub fn execute(cli: &Cli, echo: String, progress: &mut dyn FnMut(&str)) -> Result<Report, (i32, String)> {
    let fail = |e: &dyn std::fmt::Display| (EXIT_VERIFY, e.to_string());
    match &cli.command {
        Command::Field { m } => {
            let mut rep = Report::new(
                echo,
                vec![
                    "m", "D", "factorization", "conductor", "index", "index_class", "r3", "character_class",
                    "reg_e", "l_abs_squared", "h_raw", "unit_index", "h", "residual", "precision_bits",
                    "constraints_ok",
                ],
            );
            let r = match classno::class_number(*m) {
                Ok(r) => r,
                Err(ClassNoError::Unresolved(r)) => {
                    rep.status = EXIT_UNRESOLVED;
                    *r
                }
                Err(e) => return Err(fail(&e)),
            };
            let f = &r.field;
            rep.rows.push(vec![
                f.m.into(),
                f.d.into(),
                f.d_factors.to_string().into(),
                f.conductor.into(),
                f.index.into(),
                format!("{:?}", f.index_class).into(),
                f.r3.into(),
                r.character_class.into(),
                r.reg_e.into(),
                r.l_value.abs_squared.into(),
                r.h_raw.into(),
                r.unit_index.into(),
                r.h.into(),
                r.round_residual.into(),
                r.precision_bits.into(),
                r.constraints.map(|c| c.all_pass()).into(),
            ]);
            Ok(rep)
        }
        Command::Scan { range, index, subcase, hmax } => {
            let indices = index.indices();
            let Range(lo, hi) = match range {
                Some(r) => *r,
                None => {
                    let mut hi = -1;
                    for &i in &indices {
                        hi = hi.max(scan::default_range(i, *hmax as f64).map_err(|e| fail(&e))?.1);
                    }
                    Range(-1, hi)
                }
            };
            progress(&format!("scanning {lo}..={hi}"));
            let (rows, summary) = scan::scan_small_class(lo, hi, &indices, *subcase, *hmax).map_err(|e| fail(&e))?;
            progress(&format!("{} rows in {:.2?}", summary.total, summary.runtime));
            Ok(scan_report(echo, &rows, &summary))
        }
        Command::H16 { range, no_prefilter } => {
            let mut cb = |m: i64, computed: usize| progress(&format!("through m = {m}: {computed} fields computed"));
            let (rows, summary) =
                scan::scan_h_below_16(range.0, range.1, !no_prefilter, Some(&mut cb)).map_err(|e| fail(&e))?;
            progress(&format!("{} rows in {:.2?}", summary.total, summary.runtime));
            Ok(scan_report(echo, &rows, &summary))
        }
        Command::Thue { m, bound, lambda } => {
            if *bound < 1 {
                return Err((EXIT_USAGE, "--bound must be at least 1".into()));
            }
            let lambdas = match lambda {
                LambdaArg::All => thue::divisor_lambdas(*m).map_err(|e| fail(&e))?,
                LambdaArg::Unit => vec![1],
            };
            let sols = thue::solve_bounded(*m, &lambdas, *bound);
            let mut rep = Report::new(echo, thue_columns());
            rep.rows = sols.iter().map(thue_cells).collect();
            rep.summary = vec![
                ("solutions", sols.len().into()),
                ("nontrivial", sols.iter().filter(|s| !s.trivial).count().into()),
            ];
            Ok(rep)
        }
        Command::Coincide { max, bound } => {
            if *max < -1 {
                return Err((EXIT_USAGE, "--max must be at least -1".into()));
            }
            let scan = thue::coincidence_scan(*max, *bound).map_err(|e| fail(&e))?;
            let mut rep = Report::new(echo, vec!["m", "n", "conductor", "character_class", "witnesses"]);
            for p in &scan.pairs {
                let w = p.witnesses.iter().map(|s| format!("m={}:({},{})", s.m, s.x, s.y)).collect::<Vec<_>>().join(" ");
                rep.rows.push(vec![p.m.into(), p.n.into(), p.shared_conductor.into(), p.character_class.into(), w.into()]);
            }
            rep.summary = vec![
                ("pairs", scan.pairs.len().into()),
                ("non_exact_solutions", scan.non_exact.len().into()),
                ("certified", true.into()),
            ];
            Ok(rep)
        }
        Command::Bounds { index, hmax } => {
            let index: u32 = index.parse().expect("validated by clap");
            let mut rep = Report::new(echo, vec!["kind", "index", "hmax", "m", "bound_at_m"]);
            let mut cutoff = None;
            for kind in [BoundKind::Louboutin, BoundKind::Lettl] {
                let c = analytic::threshold_m(kind, index, *hmax).map_err(|e| fail(&e))?;
                if kind == BoundKind::Louboutin {
                    cutoff = Some(c.m);
                }
                let name = match kind {
                    BoundKind::Louboutin => "louboutin",
                    BoundKind::Lettl => "lettl",
                };
                rep.rows.push(vec![name.into(), index.into(), c.hmax.into(), c.m.into(), c.bound_at_m.into()]);
            }
            rep.summary = vec![("cutoff", cutoff.into())];
            Ok(rep)
        }
        Command::VerifyTables => {
            let checks = scan::verify_tables();
            let passed = checks.iter().filter(|c| c.passed()).count();
            let mut rep = Report::new(
                echo,
                vec!["table", "m", "h", "conductor", "index", "h_raw", "unit_index", "status"],
            );
            for c in &checks {
                rep.rows.push(vec![
                    c.table.into(),
                    c.m.into(),
                    c.h.into(),
                    c.conductor.into(),
                    c.index.into(),
                    c.h_raw.into(),
                    c.unit_index.into(),
                    c.failure.clone().unwrap_or_else(|| "pass".into()).into(),
                ]);
            }
            rep.summary = vec![("result", format!("{passed}/{} rows pass", checks.len()).into())];
            if passed != checks.len() {
                rep.status = EXIT_VERIFY;
            }
            Ok(rep)
        }
        Command::Count66 { bound } => {
            let c = thue::count_nontrivial_66(*bound).map_err(|e| fail(&e))?;
            let mut rep = Report::new(echo, vec!["m", "nontrivial"]);
            rep.rows = c.per_m.iter().map(|&(m, n)| vec![m.into(), n.into()]).collect();
            rep.summary = vec![
                ("bound", c.bound.into()),
                ("total", c.total.into()),
                ("orbits", c.orbits.into()),
                ("orbit_structure_ok", c.orbit_structure_ok.into()),
            ];
            if c.total != 66 || !c.orbit_structure_ok {
                rep.status = EXIT_VERIFY;
            }
            Ok(rep)
        }
    }
}

/// The arguments minus `--threads` and `--out`, which do not change results.
fn command_echo(args: &[std::ffi::OsString]) -> String {
    let mut kept = Vec::new();
    let mut it = args.iter().skip(1).map(|a| a.to_string_lossy());
    while let Some(a) = it.next() {
        if a == "--threads" || a == "--out" {
            it.next();
        } else if !a.starts_with("--threads=") && !a.starts_with("--out=") {
            kept.push(a);
        }
    }
    kept.join(" ")
}

/// Full command-line entry point; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let echo = command_echo(&args);
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let pool = match cli.threads {
        Some(0) => {
            let _ = writeln!(stderr, "error: --threads must be positive");
            return EXIT_USAGE;
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = {
        let mut progress = |msg: &str| eprintln!("{msg}");
        pool.install(|| execute(&cli, echo, &mut progress))
    };
    let report = match result {
        Ok(r) => r,
        Err((code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return code;
        }
    };
    let text = report.render(cli.format);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: writing output: {e}");
        return EXIT_VERIFY;
    }
    report.status
}

/// `run` on the process arguments and standard streams.
pub fn main_with_env() -> i32 {
    run(std::env::args_os(), &mut io::stdout(), &mut io::stderr())
}
