//! Command implementations behind the `distvar` binary. Every command
//! returns its exit status and standard output so that it can be driven
//! from tests without spawning a process.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use distvar::certify::{FiberSamples, Grids};
use distvar::inner::{self, DiscGrid, MatrixInnerFunction, VarietyDescription};
use distvar::instance::{self, InstanceSource, Recipe, RootShape, Settings};
use distvar::json::c64_to_pair;
use distvar::opcore::PairFile;
use distvar::report::{CertificateReport, Entry, Status};
use distvar::Error;
use rayon::prelude::*;
use serde::Serialize;

pub mod svg;

/// Residual below which the interpolated variety polynomial is accepted.
pub const TOL_FIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    AllPass = 0,
    SomeFail = 1,
    InvalidInput = 2,
    InconclusiveOnly = 3,
}

impl Exit {
    pub fn from_status(s: Status) -> Exit {
        match s {
            Status::Pass => Exit::AllPass,
            Status::Fail => Exit::SomeFail,
            Status::Inconclusive => Exit::InconclusiveOnly,
        }
    }

    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub tol: f64,
    pub grids: Grids,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for Options {
    fn default() -> Self {
        Options { tol: distvar::certify::TOL_ANN, grids: Grids::default(), seed: 0, out: None, format: Format::Json }
    }
}

impl Options {
    fn settings(&self) -> Settings {
        Settings { seed: self.seed, grids: self.grids, tol: self.tol, ..Settings::default() }
    }
}

/// Parses `RxA` (also `R×A`) into a disc grid of `R` radii and `A` angles.
pub fn parse_disc_grid(s: &str) -> Result<DiscGrid, String> {
    let parts: Vec<&str> = s.split(['x', 'X', '×']).collect();
    match parts.as_slice() {
        [r, a] => {
            let radii = r.trim().parse::<usize>().map_err(|e| format!("radii: {e}"))?;
            let angles = a.trim().parse::<usize>().map_err(|e| format!("angles: {e}"))?;
            if radii == 0 || angles == 0 {
                return Err("grid sizes must be positive".into());
            }
            Ok(DiscGrid { radii, angles })
        }
        _ => Err(format!("expected RADIIxANGLES, got {s:?}")),
    }
}

/// Result of one command.
#[derive(Debug)]
pub struct CmdOutput {
    pub exit: Exit,
    pub stdout: String,
    pub report: Option<CertificateReport>,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// JSON error body for invalid input.
pub fn error_output(err: &CliError) -> CmdOutput {
    let body = serde_json::json!({ "error": err.to_string() });
    CmdOutput {
        exit: Exit::InvalidInput,
        stdout: serde_json::to_string_pretty(&body).expect("serializes") + "\n",
        report: None,
    }
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

fn report_csv(report: &CertificateReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "anchor", "status", "margin"]).expect("in-memory write");
    for e in &report.entries {
        w.write_record([e.name.as_str(), e.anchor.as_str(), &e.status.to_string(), &format!("{:e}", e.margin)])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn render_report(report: &CertificateReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json_pretty() + "\n",
        Format::Csv => report_csv(report),
    }
}

fn report_file_name(format: Format) -> &'static str {
    match format {
        Format::Json => "report.json",
        Format::Csv => "report.csv",
    }
}

/// Fiber samples as CSV rows `re_z, im_z, re_w, im_w, |q|` with `q` the
/// defining polynomial.
pub fn samples_csv(variety: &VarietyDescription, samples: &FiberSamples) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["re_z", "im_z", "re_w", "im_w", "|q|"]).expect("in-memory write");
    for (z, wv) in samples.points() {
        let q = variety.p.eval(z, wv).norm();
        w.write_record([z.re, z.im, wv.re, wv.im, q].map(|x| format!("{x:e}"))).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "instance".into())
}

#[derive(Serialize)]
struct VarietyArtifact<'a> {
    variety: &'a VarietyDescription,
    /// Coefficients of `p` as `[i, j, [re, im]]` for `z^i w^j`.
    terms: Vec<(usize, usize, [f64; 2])>,
}

fn variety_terms(v: &VarietyDescription) -> Vec<(usize, usize, [f64; 2])> {
    let c = v.p.coeffs();
    let mut out = Vec::new();
    for i in 0..c.nrows() {
        for j in 0..c.ncols() {
            if c[(i, j)].norm() > 0.0 {
                out.push((i, j, c64_to_pair(c[(i, j)])));
            }
        }
    }
    out
}

fn variety_report(id: &str, psi: &MatrixInnerFunction, opts: &Options) -> Result<(CertificateReport, VarietyDescription, FiberSamples), CliError> {
    let variety = psi.variety_polynomial()?;
    let mut report = CertificateReport::new(id, opts.seed, opts.settings().tolerances());
    report.push(Entry::new(
        "variety_fit",
        "V_Psi = {det(Psi(z) - wI) = 0} recovered by interpolation",
        Status::from_bool(variety.fit_residual < TOL_FIT),
        TOL_FIT - variety.fit_residual,
    ));
    report.push(inner::distinguished_certificate(psi, opts.grids.boundary, opts.grids.disc)?);
    let samples = FiberSamples::new(&variety, opts.grids)?;
    Ok((report, variety, samples))
}

fn write_variety_files(dir: &Path, variety: &VarietyDescription, samples: &FiberSamples) -> Result<(), CliError> {
    let art = VarietyArtifact { variety, terms: variety_terms(variety) };
    write_atomic(&dir.join("variety.json"), (serde_json::to_string_pretty(&art).expect("serializes") + "\n").as_bytes())?;
    write_atomic(&dir.join("samples.csv"), samples_csv(variety, samples).as_bytes())?;
    write_atomic(&dir.join("variety.svg"), svg::variety_svg(samples).as_bytes())?;
    Ok(())
}

/// `distvar variety PSI_FILE`: defining polynomial, distinguished
/// certificate, sample dump and plot.
pub fn cmd_variety(psi_path: &Path, opts: &Options) -> CmdOutput {
    match variety_inner(psi_path, opts) {
        Ok(o) => o,
        Err(e) => error_output(&e),
    }
}

fn variety_inner(psi_path: &Path, opts: &Options) -> Result<CmdOutput, CliError> {
    let psi = MatrixInnerFunction::from_json(&read(psi_path)?)?;
    let (report, variety, samples) = variety_report(&stem(psi_path), &psi, opts)?;
    if let Some(dir) = &opts.out {
        write_variety_files(dir, &variety, &samples)?;
        write_atomic(&dir.join(report_file_name(opts.format)), render_report(&report, opts.format).as_bytes())?;
    }
    Ok(CmdOutput { exit: Exit::from_status(report.overall()), stdout: render_report(&report, opts.format), report: Some(report) })
}

/// Reads a pair file, a recipe or a tagged instance description.
pub fn parse_instance(text: &str) -> Result<InstanceSource, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
    if value.get("source").is_some() {
        let src: InstanceSource = serde_json::from_value(value).map_err(|e| CliError::Input(e.to_string()))?;
        if let InstanceSource::Recipe { recipe } = &src {
            Recipe::from_json(&serde_json::to_string(recipe).expect("serializes"))?;
        }
        return Ok(src);
    }
    if value.get("theta_zeros").is_some() {
        return Ok(InstanceSource::Recipe { recipe: Recipe::from_json(text)? });
    }
    Ok(InstanceSource::Pair { pair: PairFile::from_json(text)? })
}

/// Full pipeline on one instance.
pub fn certify_source(id: &str, source: &InstanceSource, opts: &Options) -> Result<CmdOutput, CliError> {
    let outcome = instance::certify_instance(id, source, &opts.settings());
    let exit = match &outcome.failed_stage {
        Some((instance::Stage::Validate, _)) => Exit::InvalidInput,
        _ => Exit::from_status(outcome.report.overall()),
    };
    let text = render_report(&outcome.report, opts.format);
    if let Some(dir) = &opts.out {
        write_atomic(&dir.join(report_file_name(opts.format)), text.as_bytes())?;
    }
    Ok(CmdOutput { exit, stdout: text, report: Some(outcome.report) })
}

/// `distvar certify INPUT`.
pub fn cmd_certify(input: &Path, opts: &Options) -> CmdOutput {
    let run = || -> Result<CmdOutput, CliError> {
        let source = parse_instance(&read(input)?)?;
        certify_source(&stem(input), &source, opts)
    };
    run().unwrap_or_else(|e| error_output(&e))
}

/// Pass/fail/inconclusive counts per entry name.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EntryTally {
    pub name: String,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub pass_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub seed: u64,
    pub count: usize,
    pub stage_failures: usize,
    pub tallies: Vec<EntryTally>,
}

/// Seeded recipe `index` of a batch: alternating simple and repeated roots.
pub fn batch_recipe(seed: u64, index: usize) -> Recipe {
    let shape = if index % 2 == 0 { RootShape::Simple } else { RootShape::Repeated };
    Recipe::seeded(seed.wrapping_add(index as u64), shape)
}

pub fn summarize(seed: u64, reports: &[CertificateReport]) -> BatchSummary {
    let mut tallies: std::collections::BTreeMap<String, EntryTally> = Default::default();
    let mut stage_failures = 0;
    for r in reports {
        for e in &r.entries {
            if e.name == "stage_error" {
                stage_failures += 1;
            }
            let t = tallies.entry(e.name.clone()).or_insert_with(|| EntryTally { name: e.name.clone(), ..Default::default() });
            match e.status {
                Status::Pass => t.pass += 1,
                Status::Fail => t.fail += 1,
                Status::Inconclusive => t.inconclusive += 1,
            }
        }
    }
    let tallies = tallies
        .into_values()
        .map(|mut t| {
            t.pass_rate = t.pass as f64 / (t.pass + t.fail + t.inconclusive) as f64;
            t
        })
        .collect();
    BatchSummary { seed, count: reports.len(), stage_failures, tallies }
}

fn summary_csv(s: &BatchSummary) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "pass", "fail", "inconclusive", "pass_rate"]).expect("in-memory write");
    for t in &s.tallies {
        w.write_record([t.name.clone(), t.pass.to_string(), t.fail.to_string(), t.inconclusive.to_string(), format!("{:.4}", t.pass_rate)])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// `distvar batch --count N`: seeded recipes in parallel, one report file
/// per instance and a pass-rate table.
pub fn cmd_batch(count: usize, opts: &Options) -> CmdOutput {
    let run = || -> Result<CmdOutput, CliError> {
        let reports: Vec<CertificateReport> = (0..count)
            .into_par_iter()
            .map(|i| {
                let recipe = batch_recipe(opts.seed, i);
                let settings = Settings { seed: opts.seed.wrapping_add(i as u64), ..opts.settings() };
                let id = format!("batch-{}-{i:04}", opts.seed);
                let outcome = instance::certify_instance(&id, &InstanceSource::Recipe { recipe }, &settings);
                if let Some(dir) = &opts.out {
                    let text = render_report(&outcome.report, opts.format);
                    let ext = if opts.format == Format::Json { "json" } else { "csv" };
                    write_atomic(&dir.join(format!("{id}.{ext}")), text.as_bytes())?;
                }
                Ok(outcome.report)
            })
            .collect::<Result<_, CliError>>()?;
        let summary = summarize(opts.seed, &reports);
        let text = match opts.format {
            Format::Json => serde_json::to_string_pretty(&summary).expect("serializes") + "\n",
            Format::Csv => summary_csv(&summary),
        };
        if let Some(dir) = &opts.out {
            let name = if opts.format == Format::Json { "summary.json" } else { "summary.csv" };
            write_atomic(&dir.join(name), text.as_bytes())?;
        }
        let overall = Status::all(reports.iter().map(|r| r.overall()));
        Ok(CmdOutput { exit: Exit::from_status(overall), stdout: text, report: None })
    };
    run().unwrap_or_else(|e| error_output(&e))
}

/// `distvar demo`: the `w² = z` walkthrough.
pub fn cmd_demo(opts: &Options) -> CmdOutput {
    let run = || -> Result<CmdOutput, CliError> {
        let psi = inner::sqrt_psi();
        let (mut report, variety, samples) = variety_report("demo", &psi, opts)?;
        let outcome = instance::certify_instance("demo", &instance::demo_source(), &opts.settings());
        report.extend(outcome.report.entries);
        if let Some(dir) = &opts.out {
            write_variety_files(dir, &variety, &samples)?;
            write_atomic(&dir.join(report_file_name(opts.format)), render_report(&report, opts.format).as_bytes())?;
        }
        Ok(CmdOutput { exit: Exit::from_status(report.overall()), stdout: render_report(&report, opts.format), report: Some(report) })
    };
    run().unwrap_or_else(|e| error_output(&e))
}
