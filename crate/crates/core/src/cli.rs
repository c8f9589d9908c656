//! Batch front-end. Every command produces one report, rendered as text,
//! JSON or CSV; output depends only on the inputs, never on the worker count.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::boxconfig::{enumerate_box_configs, f_profile, Partition};
use crate::cancellation::{self, CancellationError, FCase};
use crate::exactalg::scalar::int;
use crate::exactalg::{RationalFunction, Scalar};
use crate::hilbert::{self, HilbertError};
use crate::tqft::{self, GluingBlock, RationalQ, TqftError};
use crate::vertexcore::{self, Insertions, QSeries, VertexError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "ptvertex", about = "Exact stable pairs vertex computations and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML file supplying any flag; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Partition, comma separated parts.
    #[arg(long, global = true)]
    pub mu: Option<String>,
    #[arg(long, global = true)]
    pub d: Option<String>,
    /// Descendent indices, comma separated.
    #[arg(long, global = true)]
    pub ins: Option<String>,
    /// Specialization parameter, or the a-sequence for count-perms.
    #[arg(long, global = true)]
    pub a: Option<String>,
    #[arg(long, global = true)]
    pub qmax: Option<String>,
    #[arg(long, global = true)]
    pub eta: Option<String>,
    #[arg(long, global = true)]
    pub c: Option<String>,
    #[arg(long, global = true)]
    pub delta: Option<String>,
    #[arg(long = "num-degree", global = true)]
    pub num_degree: Option<String>,
    /// JSON input (a q-series for fit, a RationalQ for func-eq).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true)]
    pub left: Option<PathBuf>,
    #[arg(long, global = true)]
    pub right: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Vertex series, optionally specialized at s3 = (s1 + s2)/a.
    Vertex,
    /// Box configurations of mu up to q^qmax, with profiles when a is given.
    Configs,
    /// Per-profile cancellation table and permutation-model checks.
    CancelCheck,
    /// Permutations avoiding the division factor, formula and brute force.
    CountPerms,
    /// Hilbert scheme descendent pairing.
    HilbPairing,
    /// Relative/descendent correspondence matrix and its structure.
    CorrMatrix,
    /// Glue two boundary blocks with the inverse pairing.
    Glue,
    /// Rational reconstruction of a q-series.
    Fit,
    /// Functional equation under q -> 1/q.
    FuncEq,
    /// Closed-form stationary cap series.
    StationaryRef,
    /// Quick suite of exact checks.
    Selftest,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("falsified: {0}")]
    Falsified(String),
    #[error("{0}")]
    NoFit(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Falsified(_) => 2,
            CliError::NoFit(_) => 3,
        }
    }
}

impl From<VertexError> for CliError {
    fn from(e: VertexError) -> Self {
        match e {
            VertexError::PoleSurvived { .. } | VertexError::Hilbert(HilbertError::CalibrationFailed(_)) => {
                CliError::Falsified(e.to_string())
            }
            VertexError::Hilbert(h) => h.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<HilbertError> for CliError {
    fn from(e: HilbertError) -> Self {
        match e {
            HilbertError::RankDeficient { .. } | HilbertError::CalibrationFailed(_) => CliError::Falsified(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<TqftError> for CliError {
    fn from(e: TqftError) -> Self {
        match e {
            TqftError::NoFit | TqftError::Underdetermined { .. } => CliError::NoFit(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<CancellationError> for CliError {
    fn from(e: CancellationError) -> Self {
        match e {
            CancellationError::InvalidSpec(_) => CliError::Usage(e.to_string()),
            other => CliError::Falsified(other.to_string()),
        }
    }
}

/// One report: a JSON document plus a table for text and CSV.
pub struct Report {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Summary lines printed after the table in text mode.
    pub notes: Vec<String>,
    /// Set when a checked invariant failed; the report is still emitted.
    pub falsified: Option<String>,
    /// Rows that appear only in CSV output; text shows just the notes.
    pub csv_only: Option<Vec<Vec<String>>>,
}

impl Report {
    fn new(header: &[&str]) -> Self {
        Report {
            json: Value::Null,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
            falsified: None,
            csv_only: None,
        }
    }

    fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn fail(&mut self, why: String) {
        if self.falsified.is_none() {
            self.falsified = Some(why);
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).expect("in-memory write");
                for r in self.csv_only.as_ref().unwrap_or(&self.rows) {
                    w.write_record(r).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("flushed")).expect("utf8")
            }
            Format::Text => {
                let mut s = String::new();
                if !self.rows.is_empty() {
                    let widths: Vec<usize> = (0..self.header.len())
                        .map(|c| {
                            self.rows
                                .iter()
                                .map(|r| r.get(c).map_or(0, |x| x.chars().count()))
                                .chain([self.header[c].chars().count()])
                                .max()
                                .unwrap_or(0)
                        })
                        .collect();
                    let line = |cells: &[String]| -> String {
                        cells
                            .iter()
                            .zip(&widths)
                            .map(|(x, w)| format!("{x:<w$}"))
                            .collect::<Vec<_>>()
                            .join("  ")
                            .trim_end()
                            .to_string()
                    };
                    let _ = writeln!(s, "{}", line(&self.header));
                    for r in &self.rows {
                        let _ = writeln!(s, "{}", line(r));
                    }
                }
                for n in &self.notes {
                    let _ = writeln!(s, "{n}");
                }
                s
            }
        }
    }
}

/// Flags after merging the config file.
struct Job {
    command: Command,
    values: BTreeMap<&'static str, String>,
    input: Option<PathBuf>,
    left: Option<PathBuf>,
    right: Option<PathBuf>,
    format: Format,
    jobs: Option<usize>,
    seed: u64,
}

fn toml_to_flag(v: &toml::Value) -> Option<String> {
    match v {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Array(a) => Some(a.iter().filter_map(toml_to_flag).collect::<Vec<_>>().join(",")),
        _ => None,
    }
}

impl Job {
    fn from_cli(cli: Cli) -> Result<Job, CliError> {
        let file: toml::Table = match &cli.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
                text.parse().map_err(|e| CliError::Usage(format!("bad config {}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        let from_file = |k: &str| file.get(k).and_then(toml_to_flag);
        let mut values = BTreeMap::new();
        for (k, v) in [
            ("mu", cli.mu),
            ("d", cli.d),
            ("ins", cli.ins),
            ("a", cli.a),
            ("qmax", cli.qmax),
            ("eta", cli.eta),
            ("c", cli.c),
            ("delta", cli.delta),
            ("num-degree", cli.num_degree),
        ] {
            if let Some(x) = v.or_else(|| from_file(k)) {
                values.insert(k, x);
            }
        }
        let path = |v: Option<PathBuf>, k: &str| v.or_else(|| from_file(k).map(PathBuf::from));
        let format = match cli.format {
            Some(f) => f,
            None => match from_file("format").as_deref() {
                None | Some("text") => Format::Text,
                Some("json") => Format::Json,
                Some("csv") => Format::Csv,
                Some(other) => return Err(CliError::Usage(format!("unknown format {other:?}; use text, json or csv"))),
            },
        };
        let num = |v: Option<String>, k: &str| -> Result<Option<u64>, CliError> {
            v.map(|s| s.parse::<u64>().map_err(|_| CliError::Usage(format!("--{k} expects a non-negative integer"))))
                .transpose()
        };
        let jobs = match cli.jobs {
            Some(j) => Some(j),
            None => num(from_file("jobs"), "jobs")?.map(|j| j as usize),
        };
        let seed = match cli.seed {
            Some(s) => s,
            None => num(from_file("seed"), "seed")?.unwrap_or(0),
        };
        Ok(Job {
            command: cli.command,
            values,
            input: path(cli.input, "input"),
            left: path(cli.left, "left"),
            right: path(cli.right, "right"),
            format,
            jobs,
            seed,
        })
    }

    fn get(&self, k: &str) -> Option<&str> {
        self.values.get(k).map(String::as_str)
    }

    fn partition(&self, k: &str) -> Result<Option<Partition>, CliError> {
        self.get(k)
            .map(|s| s.parse::<Partition>().map_err(|e| CliError::Usage(format!("--{k} {s:?}: {e}"))))
            .transpose()
    }

    fn need_partition(&self, k: &str) -> Result<Partition, CliError> {
        self.partition(k)?.ok_or_else(|| CliError::Usage(format!("--{k} is required (comma separated parts)")))
    }

    fn int(&self, k: &str) -> Result<Option<i64>, CliError> {
        self.get(k)
            .map(|s| s.trim().parse::<i64>().map_err(|_| CliError::Usage(format!("--{k} expects an integer, got {s:?}"))))
            .transpose()
    }

    fn positive(&self, k: &str) -> Result<Option<i64>, CliError> {
        match self.int(k)? {
            Some(x) if x < 1 => Err(CliError::Usage(format!("--{k} must be at least 1"))),
            x => Ok(x),
        }
    }

    fn insertions(&self) -> Result<Insertions, CliError> {
        match self.get("ins") {
            None => Ok(Insertions::none()),
            Some(s) => s.parse().map_err(|_| CliError::Usage(format!("--ins expects comma separated indices, got {s:?}"))),
        }
    }
}

fn read_json(p: &PathBuf) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{} is not JSON: {e}", p.display())))
}

/// Parses arguments, runs, and returns the exit code with everything that
/// should go to stdout and stderr.
pub fn run_from_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let msg = e.render().to_string();
            return if code == 0 { (0, msg, String::new()) } else { (1, String::new(), msg) };
        }
    };
    let job = match Job::from_cli(cli) {
        Ok(j) => j,
        Err(e) => return (e.exit_code(), String::new(), format!("error: {e}\n")),
    };
    let format = job.format;
    let result = match job.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&job)),
            Err(e) => Err(CliError::Usage(format!("cannot start {n} workers: {e}"))),
        },
        None => dispatch(&job),
    };
    match result {
        Ok(report) => {
            let out = report.render(format);
            match &report.falsified {
                Some(why) => (2, out, format!("falsified: {why}\n")),
                None => (0, out, String::new()),
            }
        }
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}\n")),
    }
}

fn dispatch(job: &Job) -> Result<Report, CliError> {
    match job.command {
        Command::Vertex => cmd_vertex(job),
        Command::Configs => cmd_configs(job),
        Command::CancelCheck => cmd_cancel_check(job),
        Command::CountPerms => cmd_count_perms(job),
        Command::HilbPairing => cmd_hilb_pairing(job),
        Command::CorrMatrix => cmd_corr_matrix(job),
        Command::Glue => cmd_glue(job),
        Command::Fit => cmd_fit(job),
        Command::FuncEq => cmd_func_eq(job),
        Command::StationaryRef => cmd_stationary_ref(job),
        Command::Selftest => cmd_selftest(job),
    }
}

fn series_rows(r: &mut Report, s: &QSeries) {
    for (n, c) in s.terms() {
        r.row(vec![n.to_string(), c.to_string()]);
    }
}

fn render_terms(s: &QSeries) -> String {
    QSeries::exact(s.terms().map(|(n, c)| (n, c.clone()))).render()
}

fn cmd_vertex(job: &Job) -> Result<Report, CliError> {
    let mu = job.need_partition("mu")?;
    let ins = job.insertions()?;
    let d = mu.size() as i64;
    let a = job.positive("a")?;
    let qmax = job.int("qmax")?.unwrap_or(d + 4);
    let mut r = Report::new(&["order", "coefficient"]);
    let header = json!({"command": "vertex", "mu": mu.to_string(), "ins": ins.to_string(), "a": a, "qmax": qmax});
    match a {
        None => {
            let s = vertexcore::vertex_series(&mu, &ins, qmax)?;
            series_rows(&mut r, &s);
            r.notes.push(s.render());
            r.json = json!({"job": header, "series": s.to_json()});
        }
        Some(a) => {
            let (s, rep) = vertexcore::specialize_and_check(&mu, &ins, a, qmax)?;
            let bound = d + cancellation::contributing_length_bound(&mu, a) as i64;
            let vanishes = rep.tail_vanishes_after(bound);
            series_rows(&mut r, &s);
            let tail = if !vanishes {
                r.fail(format!("nonzero coefficient at q^{} beyond the bound q^{bound}", rep.top_nonzero.unwrap_or(bound)));
                "tail does not vanish".to_string()
            } else if qmax >= bound {
                "tail vanishes".to_string()
            } else {
                format!("tail vanishes through q^{qmax} (bound q^{bound} not reached)")
            };
            let shown = if vanishes && qmax >= bound { render_terms(&s) } else { s.render() };
            r.notes.push(format!("{shown}, {tail}"));
            r.json = json!({
                "job": header,
                "series": s.to_json(),
                "report": {
                    "classes": rep.classes,
                    "top_nonzero": rep.top_nonzero,
                    "bound": bound,
                    "tail_vanishes": vanishes,
                },
            });
        }
    }
    Ok(r)
}

fn cmd_configs(job: &Job) -> Result<Report, CliError> {
    let mu = job.need_partition("mu")?;
    let d = mu.size() as i64;
    let qmax = job.int("qmax")?.unwrap_or(d + 2);
    let a = job.positive("a")?;
    let mut r = Report::new(&["length", "depths", "profile", "case"]);
    let mut list = Vec::new();
    for len in 0..=(qmax - d).max(-1) {
        for c in enumerate_box_configs(&mu, len as u32) {
            let depths: Vec<String> = c.depths().iter().map(u32::to_string).collect();
            let depths = format!("[{}]", depths.join(","));
            let (profile, case) = match a {
                Some(a) => {
                    let f = f_profile(&c, a);
                    (f.to_string(), cancellation::classify_f(&f).label().to_string())
                }
                None => (String::new(), String::new()),
            };
            list.push(json!({"length": len, "depths": c.depths(), "profile": profile, "case": case}));
            r.row(vec![len.to_string(), depths, profile, case]);
        }
    }
    r.notes.push(format!("{} configurations", r.rows.len()));
    r.json = json!({"job": {"command": "configs", "mu": mu.to_string(), "qmax": qmax, "a": a}, "configs": list});
    Ok(r)
}

fn cmd_cancel_check(job: &Job) -> Result<Report, CliError> {
    let mu = job.need_partition("mu")?;
    let a = job.positive("a")?.unwrap_or(1);
    let ins = job.insertions()?;
    let d = mu.size() as i64;
    let qmax = job.int("qmax")?.unwrap_or(d + 4);
    let mut r = Report::new(&["length", "profile", "case", "kappa0", "configs", "value"]);
    let mut rows = Vec::new();
    let mut pointwise = true;
    let mut correspondence = true;
    for len in 0..=(qmax - d).max(-1) as u32 {
        for class in vertexcore::group_sum_by_profile(&mu, &ins, a, len)? {
            let f = &class.profile;
            let case = cancellation::classify_f(f);
            let k0 = cancellation::kappa0(f);
            let (sum, hit) = cancellation::permutation_class_sum(f, &ins)?;
            let direct: std::collections::BTreeSet<_> = class.configs.iter().cloned().collect();
            if sum != class.sum || hit != direct {
                correspondence = false;
                r.fail(format!("permutation sum differs from the class sum for {f}"));
            }
            let psi = cancellation::psi_construct(f)?;
            for s in cancellation::enumerate_sym(&mu) {
                let v = psi.eval(&s.point(&mu));
                let ok = match cancellation::admissible_h(&s, f) {
                    Some(_) => cancellation::phi(&s, f)?.0 == v * int(s.sign()),
                    None => v == Scalar::from_integer(0.into()),
                };
                if !ok {
                    pointwise = false;
                    r.fail(format!("phi = sgn psi fails for {f}"));
                }
            }
            if !matches!(case, FCase::Contributing(_)) && !class.value.is_zero() {
                r.fail(format!("class {f} in case {} does not vanish", case.label()));
            }
            rows.push(json!({
                "length": len,
                "profile": f.to_string(),
                "case": case.label(),
                "kappa0": k0,
                "configs": class.configs.len(),
                "value": class.value.to_string(),
            }));
            r.row(vec![
                len.to_string(),
                f.to_string(),
                case.label().into(),
                k0.to_string(),
                class.configs.len().to_string(),
                class.value.to_string(),
            ]);
        }
    }
    r.notes.push(format!("phi = sgn psi and psi vanishing: {}", if pointwise { "ok" } else { "FAILED" }));
    r.notes.push(format!("class sums via admissible permutations: {}", if correspondence { "ok" } else { "FAILED" }));
    r.json = json!({
        "job": {"command": "cancel-check", "mu": mu.to_string(), "a": a, "ins": ins.to_string(), "qmax": qmax},
        "profiles": rows,
        "pointwise": pointwise,
        "correspondence": correspondence,
    });
    Ok(r)
}

fn parse_sequence(s: &str) -> Result<Vec<usize>, CliError> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    if t.trim().is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("--a expects comma separated integers, got {s:?}"))))
        .collect()
}

fn cmd_count_perms(job: &Job) -> Result<Report, CliError> {
    let seq = parse_sequence(job.get("a").ok_or_else(|| CliError::Usage("--a is required, e.g. --a 0,1,1".into()))?)?;
    let c = cancellation::count_nonvanishing_permutations(&seq)?;
    let brute = c.brute.map_or("-".to_string(), |b| b.to_string());
    let mut r = Report::new(&["formula", "brute_force"]);
    r.csv_only = Some(vec![vec![c.formula.to_string(), brute.clone()]]);
    r.notes.push(c.formula.to_string());
    if !c.agrees() {
        r.notes.push(format!("brute force: {brute}"));
        r.fail(format!("brute force count {brute} differs from {}", c.formula));
    }
    r.json = json!({"job": {"command": "count-perms", "a": seq}, "formula": c.formula, "brute_force": c.brute});
    Ok(r)
}

fn s1s2() -> RationalFunction {
    RationalFunction::var(0) * RationalFunction::var(1)
}

fn cmd_hilb_pairing(job: &Job) -> Result<Report, CliError> {
    let mut r = Report::new(&["ins", "eta", "pairing", "s1s2_times_pairing"]);
    let (ins, eta) = match job.positive("c")? {
        Some(c) => (Insertions(vec![c as u32 - 1]), Partition::new(vec![c as u32]).expect("single part")),
        None => {
            let eta = job.need_partition("eta")?;
            (job.insertions()?, eta)
        }
    };
    let v = hilbert::hilb_descendent_pairing(&ins, &eta)?;
    let scaled = &v * &s1s2();
    r.notes.push(scaled.to_string());
    r.csv_only = Some(vec![vec![ins.to_string(), eta.to_string(), v.to_string(), scaled.to_string()]]);
    r.json = json!({
        "job": {"command": "hilb-pairing", "ins": ins.to_string(), "eta": eta.to_string()},
        "pairing": v.to_string(),
        "s1s2_times_pairing": scaled.to_string(),
    });
    Ok(r)
}

fn cmd_corr_matrix(job: &Job) -> Result<Report, CliError> {
    let d = job.positive("d")?.ok_or_else(|| CliError::Usage("--d is required".into()))? as u32;
    let m = hilbert::correspondence_matrix(d)?;
    let rep = m.check()?;
    let mut header = vec!["row"];
    let cols: Vec<String> = m.partitions.iter().map(|p| p.to_string()).collect();
    header.extend(cols.iter().map(String::as_str));
    let mut r = Report::new(&header);
    for (lam, row) in m.partitions.iter().zip(&m.entries) {
        let mut cells = vec![hilbert::row_insertions(lam).to_string()];
        cells.extend(row.iter().map(|x| x.to_string()));
        r.row(cells);
    }
    if !rep.diagonal_nonzero {
        r.fail("a diagonal entry vanishes".into());
    }
    let tri = |b: bool| if b { "yes" } else { "no" };
    r.notes.push(format!(
        "zero when row longer: {}; zero when row shorter: {}; diagonal nonzero: {}; rank {}",
        tri(rep.zero_when_row_longer),
        tri(rep.zero_when_row_shorter),
        tri(rep.diagonal_nonzero),
        rep.rank
    ));
    r.json = json!({
        "job": {"command": "corr-matrix", "d": d},
        "partitions": cols,
        "entries": m.entries.iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "zero_when_row_longer": rep.zero_when_row_longer,
        "zero_when_row_shorter": rep.zero_when_row_shorter,
        "diagonal_nonzero": rep.diagonal_nonzero,
        "rank": rep.rank,
    });
    Ok(r)
}

fn block_from_json(v: &Value) -> Result<GluingBlock, CliError> {
    let bad = |m: &str| CliError::Usage(format!("block: {m}"));
    let d = v["d"].as_u64().ok_or_else(|| bad("missing integer d"))? as u32;
    let mut entries = BTreeMap::new();
    for e in v["entries"].as_array().ok_or_else(|| bad("missing entries array"))? {
        let key = e["boundary"]
            .as_array()
            .ok_or_else(|| bad("entry without boundary"))?
            .iter()
            .map(|p| p.as_str().and_then(|s| s.parse::<Partition>().ok()).ok_or_else(|| bad("boundary entries must be partitions")))
            .collect::<Result<Vec<_>, _>>()?;
        let s = QSeries::from_json(&e["series"]).map_err(|x| bad(&x.to_string()))?;
        entries.insert(key, s);
    }
    Ok(GluingBlock::new(d, entries)?)
}

fn block_to_json(b: &GluingBlock) -> Value {
    let entries: Vec<Value> = b
        .entries
        .iter()
        .map(|(k, s)| json!({"boundary": k.iter().map(|p| p.to_string()).collect::<Vec<_>>(), "series": s.to_json()}))
        .collect();
    json!({"d": b.d, "entries": entries})
}

fn cmd_glue(job: &Job) -> Result<Report, CliError> {
    let mut r = Report::new(&["boundary", "series"]);
    let (left, right, check_unit) = match (&job.left, &job.right) {
        (Some(l), Some(rr)) => (block_from_json(&read_json(l)?)?, block_from_json(&read_json(rr)?)?, false),
        (None, None) => {
            let d = job.positive("d")?.ok_or_else(|| CliError::Usage("give --left and --right, or --d for the unit check".into()))?;
            let id = GluingBlock::identity(d as u32);
            (id.clone(), id, true)
        }
        _ => return Err(CliError::Usage("--left and --right go together".into())),
    };
    let out = tqft::glue_series(&left, &right)?;
    for (k, s) in &out.entries {
        let names: Vec<String> = k.iter().map(|p| p.to_string()).collect();
        r.row(vec![names.join(" "), s.render()]);
    }
    if check_unit {
        let ok = out == left;
        r.notes.push(format!("unit law: {}", if ok { "ok" } else { "FAILED" }));
        if !ok {
            r.fail("gluing the unit block with itself changed it".into());
        }
    }
    r.json = json!({"job": {"command": "glue", "d": out.d}, "block": block_to_json(&out)});
    Ok(r)
}

fn rationalq_report(r: &mut Report, f: &RationalQ) {
    r.row(vec!["num".into(), f.num.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; ")]);
    r.row(vec!["q_pow".into(), f.q_pow.to_string()]);
    let cyc: Vec<String> = f.cyclo.iter().map(|(k, m)| format!("{k}:{m}")).collect();
    r.row(vec!["cyclo".into(), cyc.join(" ")]);
}

fn cmd_fit(job: &Job) -> Result<Report, CliError> {
    let d = job.positive("d")?.ok_or_else(|| CliError::Usage("--d is required".into()))? as u32;
    let series = match &job.input {
        Some(p) => QSeries::from_json(&read_json(p)?).map_err(|e| CliError::Usage(e.to_string()))?,
        None => {
            let qmax = job.int("qmax")?.unwrap_or(d as i64 + 11);
            tqft::stationary_reference_series(d).expand(qmax)
        }
    };
    let f = tqft::fit_rational(&series, d, job.int("num-degree")?)?;
    let mut r = Report::new(&["field", "value"]);
    rationalq_report(&mut r, &f);
    r.csv_only = Some(std::mem::take(&mut r.rows));
    r.notes.push(f.to_string());
    r.json = json!({"job": {"command": "fit", "d": d}, "fit": f.to_json()});
    Ok(r)
}

fn cmd_func_eq(job: &Job) -> Result<Report, CliError> {
    let (f, d) = match &job.input {
        Some(p) => (RationalQ::from_json(&read_json(p)?)?, job.int("d")?),
        None => {
            let d = job.positive("d")?.ok_or_else(|| CliError::Usage("--d or --input is required".into()))?;
            (tqft::stationary_reference_series(d as u32), Some(d))
        }
    };
    let eta = match job.partition("eta")? {
        Some(e) => e,
        None => Partition::new(vec![d.ok_or_else(|| CliError::Usage("--eta is required with --input".into()))? as u32])
            .map_err(|e| CliError::Usage(e.to_string()))?,
    };
    let ins = match job.get("ins") {
        Some(_) => job.insertions()?,
        None => Insertions(vec![eta.size()]),
    };
    let delta = match job.int("delta")? {
        Some(x) => x,
        None => 2 * eta.size() as i64,
    };
    let rep = tqft::functional_equation_report(&f, delta, eta.size() as i64, eta.len() as i64, ins.total() as i64);
    let mut r = Report::new(&["reading", "holds"]);
    let lit = rep.literal_holds.map_or("undefined".to_string(), |b| b.to_string());
    r.row(vec!["F(1/q,s1,s2)".into(), rep.holds.to_string()]);
    r.row(vec!["F(1/q,s2,s2)".into(), lit.clone()]);
    r.notes.push(format!("sign {}, Delta {delta}, |eta| {}, l(eta) {}, sum i {}", rep.sign, eta.size(), eta.len(), ins.total()));
    if !rep.holds {
        r.fail("functional equation fails".into());
    }
    r.json = json!({
        "job": {"command": "func-eq", "delta": delta, "eta": eta.to_string(), "ins": ins.to_string()},
        "function": f.to_json(),
        "sign": rep.sign,
        "holds": rep.holds,
        "literal_holds": rep.literal_holds,
    });
    Ok(r)
}

fn cmd_stationary_ref(job: &Job) -> Result<Report, CliError> {
    let d = job.positive("d")?.ok_or_else(|| CliError::Usage("--d is required".into()))? as u32;
    let f = tqft::stationary_reference_series(d);
    let qmax = job.int("qmax")?.unwrap_or(d as i64 + 5);
    let s = f.expand(qmax);
    let mut r = Report::new(&["order", "coefficient"]);
    series_rows(&mut r, &s);
    r.notes.push(f.to_string());
    r.notes.push(s.render());
    r.json = json!({"job": {"command": "stationary-ref", "d": d, "qmax": qmax}, "function": f.to_json(), "series": s.to_json()});
    Ok(r)
}

fn check(r: &mut Report, name: &str, ok: bool) {
    r.row(vec![name.to_string(), if ok { "pass" } else { "FAIL" }.to_string()]);
    if !ok {
        r.fail(name.to_string());
    }
}

fn cmd_selftest(job: &Job) -> Result<Report, CliError> {
    let mut r = Report::new(&["check", "result"]);
    let p = |v: Vec<u32>| Partition::new(v).expect("partition");
    let counts = [(vec![0], 1), (vec![0, 1], 1), (vec![0, 1, 1], 2)];
    let ok = counts.iter().all(|(a, n)| {
        cancellation::count_nonvanishing_permutations(a).is_ok_and(|c| c.formula == *n && c.agrees())
    });
    check(&mut r, "permutation counts", ok);
    let mut ok = true;
    for c in 1..=3u32 {
        let v = hilbert::hilb_descendent_pairing(&Insertions(vec![c - 1]), &p(vec![c]))?;
        let want = Scalar::new(1.into(), crate::exactalg::scalar::factorial(c));
        ok &= (&v * &s1s2()).as_scalar() == Some(want);
    }
    check(&mut r, "point pairings 1/c!", ok);
    let mut ok = true;
    for d in 1..=3 {
        let t = hilbert::nakajima_transition(d)?;
        for a in &t.partitions {
            for b in &t.partitions {
                ok &= t.pairing(a, b) == hilbert::nakajima_pairing_closed_form(a, b);
            }
        }
    }
    check(&mut r, "Nakajima pairing", ok);
    let (s1, _) = vertexcore::specialize_and_check(&p(vec![1]), &Insertions::none(), 1, 6)?;
    let (s2, _) = vertexcore::specialize_and_check(&p(vec![1]), &Insertions::none(), 2, 6)?;
    let q = |terms: &[(i64, i64)]| QSeries::exact(terms.iter().map(|&(n, c)| (n, RationalFunction::from_int(c))));
    check(&mut r, "vertex at a=1", render_terms(&s1) == q(&[(1, 1), (2, 1)]).render());
    check(&mut r, "vertex at a=2", render_terms(&s2) == q(&[(1, 1), (2, 2), (3, 1)]).render());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(job.seed);
    let mut ok = true;
    for _ in 0..10 {
        let (a, g, m) = cancellation::random_division_instance(&mut rng, 4);
        ok &= cancellation::division_holds(&a, &g, m);
    }
    check(&mut r, "division on permutation points", ok);
    let mut ok = true;
    for d in 1..=2u32 {
        let reference = tqft::stationary_reference_series(d);
        ok &= tqft::fit_rational(&reference.expand(d as i64 + 11), d, None).is_ok_and(|f| f.same_function(&reference));
        let di = d as i64;
        ok &= tqft::functional_equation_check(&reference, 2 * di, di, 1, di);
    }
    check(&mut r, "rational fit and functional equation", ok);
    let passed = r.rows.iter().filter(|x| x[1] == "pass").count();
    r.notes.push(format!("{passed}/{} checks passed (seed {})", r.rows.len(), job.seed));
    let rows: Vec<Value> = r.rows.iter().map(|x| json!({"check": x[0], "result": x[1]})).collect();
    r.json = json!({"job": {"command": "selftest", "seed": job.seed}, "checks": rows});
    Ok(r)
}
