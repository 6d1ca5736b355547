//! Command-line front end. Every command prints one JSON [`RunReport`] on
//! stdout. Exit codes: 0 = completed (and, for `check`, every inequality
//! held), 1 = `check` found a violation, 2 = usage or input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::inequalities::{
    bundled_spec, classical_verdict, evaluate_grouping, falsify, quantum_verdict, scan_permutations,
    strong_subadditivity_quantum, Budget, GroupingSpec, InequalityKind, InequalityVerdict, ScanInput,
    CLASSICAL_TOLERANCE, QUANTUM_TOLERANCE,
};
use crate::numerics::CMatrix;
use crate::placements::{lex_placement, IndexPlacement, PlacementFile};
use crate::states::{
    sample_density_matrix, sample_probability_vector, validate_density_matrix, validate_probability_vector,
    DensityMatrix, ProbabilityVector, RandomSource,
};
use crate::tomography::{compute_tomogram, preset_grouping, PresetKind, Spin, Tomogram, TomogramRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{context}: {source}")]
    Json { context: String, source: serde_json::Error },
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "qudit-ssa",
    version,
    about = "Entropic inequality checks for single-qudit states"
)]
pub struct Cli {
    /// Verdict tolerance (a check holds when gap >= -tolerance).
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Classical,
    Quantum,
    Tomogram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    Vector,
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    SaDerived,
    SsaDerived,
    SaPrinted,
    SsaPrinted,
}

impl From<PresetArg> for PresetKind {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::SaDerived => PresetKind::SA_DERIVED,
            PresetArg::SsaDerived => PresetKind::SSA_DERIVED,
            PresetArg::SaPrinted => PresetKind::SA_PRINTED,
            PresetArg::SsaPrinted => PresetKind::SSA_PRINTED,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check (strong) subadditivity of a state under a placement.
    Check {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        input: PathBuf,
        /// Lattice shape such as 2x2x2 (lexicographic placement).
        #[arg(long, conflicts_with = "placement")]
        shape: Option<String>,
        /// Placement JSON file.
        #[arg(long)]
        placement: Option<PathBuf>,
    },
    /// Scan the inequality over permutations of the component labels.
    Scan {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "classical")]
        mode: Mode,
        #[arg(long, conflicts_with = "placement")]
        shape: Option<String>,
        #[arg(long)]
        placement: Option<PathBuf>,
        /// `all` or `random:<count>`.
        #[arg(long, default_value = "all")]
        budget: String,
    },
    /// Search for probability vectors violating a grouping spec.
    Falsify {
        /// Grouping spec file, or the name of a bundled spec (e.g. eq12.json).
        #[arg(long)]
        spec: String,
        /// Vector dimension (defaults to the spec's n).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Compute a spin tomogram and optionally evaluate a preset inequality.
    Tomogram {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long, value_enum)]
        spec: Option<PresetArg>,
    },
    /// Write seeded random states to files.
    Sample {
        #[arg(long, value_enum)]
        kind: SampleKind,
        #[arg(long)]
        n: usize,
        /// Ginibre rank for density samples (defaults to n).
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledVerdict {
    pub label: String,
    #[serde(flatten)]
    pub verdict: InequalityVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub verdicts: Vec<LabeledVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<PlacementFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grouping: Option<GroupingSpec>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
    pub timing_ms: f64,
    /// SHA-256 of the report with `timing_ms` zeroed and `digest` empty.
    pub digest: String,
}

impl RunReport {
    fn new(command: Vec<String>, seed: u64) -> Self {
        Self {
            command,
            seed,
            inputs: Vec::new(),
            verdicts: Vec::new(),
            placement: None,
            grouping: None,
            details: Value::Null,
            timing_ms: 0.0,
            digest: String::new(),
        }
    }

    pub fn compute_digest(&self) -> String {
        let mut canonical = self.clone();
        canonical.timing_ms = 0.0;
        canonical.digest.clear();
        let bytes = serde_json::to_vec(&canonical).expect("report serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.verdict.holds)
    }
}

fn read_file(path: &Path, report: &mut RunReport) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    report.inputs.push(InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    });
    String::from_utf8(bytes).map_err(|_| CliError::Usage(format!("{}: not UTF-8", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, context: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|source| CliError::Json {
        context: context.to_string(),
        source,
    })
}

/// A matrix entry: `[re, im]` or a bare real.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Complex([f64; 2]),
    Real(f64),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum VectorFile {
    Bare(Vec<f64>),
    Wrapped { p: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum DensityFile {
    Bare(Vec<Vec<Entry>>),
    Wrapped { rho: Vec<Vec<Entry>> },
}

/// Parses a probability vector: `[p1, ...]` or `{"p": [...]}`.
pub fn parse_probability_vector(text: &str) -> CliResult<ProbabilityVector> {
    let raw = match parse_json::<VectorFile>(text, "probability vector")? {
        VectorFile::Bare(v) | VectorFile::Wrapped { p: v } => v,
    };
    Ok(validate_probability_vector(raw)?)
}

/// Parses a density matrix: row-major nested arrays of `[re, im]` entries,
/// optionally wrapped as `{"rho": ...}`.
pub fn parse_density_matrix(text: &str) -> CliResult<DensityMatrix> {
    let rows = match parse_json::<DensityFile>(text, "density matrix")? {
        DensityFile::Bare(r) | DensityFile::Wrapped { rho: r } => r,
    };
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::NonSquare {
            rows: n,
            cols: rows.iter().map(Vec::len).max().unwrap_or(0),
        }
        .into());
    }
    let m = CMatrix::from_fn(n, n, |i, j| match rows[i][j] {
        Entry::Complex([re, im]) => Complex64::new(re, im),
        Entry::Real(re) => Complex64::new(re, 0.0),
    });
    Ok(validate_density_matrix(m)?)
}

pub fn density_to_json(rho: &DensityMatrix) -> Value {
    let n = rho.dim();
    let rows: Vec<Vec<[f64; 2]>> = (0..n)
        .map(|i| (0..n).map(|j| [rho.get(i, j).re, rho.get(i, j).im]).collect())
        .collect();
    json!(rows)
}

/// `2x2x2` -> `[2, 2, 2]`.
pub fn parse_shape(text: &str) -> CliResult<Vec<usize>> {
    text.split(['x', 'X'])
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad shape {text:?}; expected e.g. 2x2x2")))
        })
        .collect()
}

/// `all` or `random:<count>`.
pub fn parse_budget(text: &str) -> CliResult<Budget> {
    if text == "all" {
        return Ok(Budget::All);
    }
    text.strip_prefix("random:")
        .and_then(|n| n.parse().ok())
        .map(Budget::Random)
        .ok_or_else(|| CliError::Usage(format!("bad budget {text:?}; expected all or random:<count>")))
}

fn resolve_placement(
    n: usize,
    shape: &Option<String>,
    placement: &Option<PathBuf>,
    report: &mut RunReport,
) -> CliResult<Option<IndexPlacement>> {
    let resolved = match (shape, placement) {
        (Some(s), _) => Some(lex_placement(n, &parse_shape(s)?)?),
        (None, Some(path)) => {
            let text = read_file(path, report)?;
            let file: PlacementFile = parse_json(&text, "placement")?;
            let p = file.resolve()?;
            if p.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: p.n(),
                    found: n,
                }
                .into());
            }
            Some(p)
        }
        (None, None) => None,
    };
    if let Some(p) = &resolved {
        report.placement = Some(PlacementFile::from(p));
    }
    Ok(resolved)
}

fn require_placement(p: Option<IndexPlacement>) -> CliResult<IndexPlacement> {
    p.ok_or_else(|| CliError::Usage("one of --shape or --placement is required".to_string()))
}

fn kind_label(placement: &IndexPlacement) -> CliResult<&'static str> {
    Ok(match InequalityKind::for_placement(placement)? {
        InequalityKind::Subadditivity => "subadditivity",
        InequalityKind::StrongSubadditivity => "strong-subadditivity",
    })
}

fn default_preset(spin: Spin) -> CliResult<PresetKind> {
    match spin.twice() {
        4 => Ok(PresetKind::SA_DERIVED),
        6 => Ok(PresetKind::SSA_DERIVED),
        two_j => Err(Error::UnsupportedSpin { two_j }.into()),
    }
}

fn cmd_check(
    cli: &Cli,
    mode: Mode,
    input: &Path,
    shape: &Option<String>,
    placement: &Option<PathBuf>,
    report: &mut RunReport,
) -> CliResult<()> {
    let text = read_file(input, report)?;
    match mode {
        Mode::Classical => {
            let p = parse_probability_vector(&text)?;
            let placement = require_placement(resolve_placement(p.len(), shape, placement, report)?)?;
            let tol = cli.tolerance.unwrap_or(CLASSICAL_TOLERANCE);
            let verdict = classical_verdict(&p, &placement)?.with_tolerance(tol);
            report.grouping = Some(GroupingSpec::derived(&placement)?);
            report.verdicts.push(LabeledVerdict {
                label: format!("classical {}", kind_label(&placement)?),
                verdict,
            });
        }
        Mode::Quantum => {
            let rho = parse_density_matrix(&text)?;
            let placement = require_placement(resolve_placement(rho.dim(), shape, placement, report)?)?;
            let tol = cli.tolerance.unwrap_or(QUANTUM_TOLERANCE);
            let verdict = quantum_verdict(&rho, &placement)?.with_tolerance(tol);
            if placement.arity() == 3 {
                let ssa = strong_subadditivity_quantum(&rho, &placement)?;
                let (r12, r23, r2) = ssa.compressed();
                report.details = json!({
                    "entropies": ssa.entropies,
                    "r12": density_to_json(&r12),
                    "r23": density_to_json(&r23),
                    "r2": density_to_json(&r2),
                });
            }
            report.grouping = Some(GroupingSpec::derived(&placement)?);
            report.verdicts.push(LabeledVerdict {
                label: format!("quantum {}", kind_label(&placement)?),
                verdict,
            });
        }
        Mode::Tomogram => {
            let record: TomogramRecord = parse_json(&text, "tomogram")?;
            let tomogram = Tomogram::try_from(record)?;
            let tol = cli.tolerance.unwrap_or(QUANTUM_TOLERANCE);
            let resolved = resolve_placement(tomogram.w.len(), shape, placement, report)?;
            let (label, verdict, spec) = match resolved {
                Some(p) => (
                    format!("tomogram {}", kind_label(&p)?),
                    classical_verdict(&tomogram.w, &p)?.with_tolerance(tol),
                    GroupingSpec::derived(&p)?,
                ),
                None => {
                    let spec = preset_grouping(tomogram.spin, default_preset(tomogram.spin)?)?;
                    let verdict = evaluate_grouping(&tomogram.w, &spec, tol)?;
                    (
                        format!("tomogram preset ({})", spec.label.clone().unwrap_or_default()),
                        verdict,
                        spec,
                    )
                }
            };
            report.grouping = Some(spec);
            report.verdicts.push(LabeledVerdict { label, verdict });
        }
    }
    Ok(())
}

fn cmd_scan(
    cli: &Cli,
    input: &Path,
    mode: Mode,
    shape: &Option<String>,
    placement: &Option<PathBuf>,
    budget: &str,
    report: &mut RunReport,
) -> CliResult<()> {
    let budget = parse_budget(budget)?;
    let text = read_file(input, report)?;
    let mut rng = RandomSource::new(cli.seed, 0);
    let (scan, placement, tol) = match mode {
        Mode::Classical | Mode::Tomogram => {
            let p = if mode == Mode::Tomogram {
                Tomogram::try_from(parse_json::<TomogramRecord>(&text, "tomogram")?)?.w
            } else {
                parse_probability_vector(&text)?
            };
            let placement = require_placement(resolve_placement(p.len(), shape, placement, report)?)?;
            let scan = scan_permutations(ScanInput::Classical(&p), &placement, budget, &mut rng)?;
            (scan, placement, cli.tolerance.unwrap_or(CLASSICAL_TOLERANCE))
        }
        Mode::Quantum => {
            let rho = parse_density_matrix(&text)?;
            let placement = require_placement(resolve_placement(rho.dim(), shape, placement, report)?)?;
            let scan = scan_permutations(ScanInput::Quantum(&rho), &placement, budget, &mut rng)?;
            (scan, placement, cli.tolerance.unwrap_or(QUANTUM_TOLERANCE))
        }
    };
    let one_based = |s: &[usize]| s.iter().map(|&x| x + 1).collect::<Vec<_>>();
    report.grouping = Some(GroupingSpec::derived(&placement)?);
    report.details = json!({
        "budget": budget,
        "count": scan.count,
        "min_gap": scan.min_gap,
        "argmin": one_based(&scan.argmin),
        "max_gap": scan.max_gap,
        "argmax": one_based(&scan.argmax),
        "all_hold": scan.min_gap >= -tol,
    });
    Ok(())
}

fn load_spec(spec: &str, report: &mut RunReport) -> CliResult<GroupingSpec> {
    let path = Path::new(spec);
    if !path.exists() {
        if let Some(bundled) = bundled_spec(spec) {
            report.inputs.push(InputDigest {
                path: format!("bundled:{spec}"),
                sha256: hex::encode(Sha256::digest(serde_json::to_vec(&bundled).expect("spec serializes"))),
            });
            return Ok(bundled);
        }
    }
    let text = read_file(path, report)?;
    let parsed: GroupingSpec = parse_json(&text, "grouping spec")?;
    parsed.validate()?;
    Ok(parsed)
}

fn cmd_falsify(cli: &Cli, spec: &str, n: Option<usize>, trials: usize, report: &mut RunReport) -> CliResult<()> {
    let spec = load_spec(spec, report)?;
    let n = n.unwrap_or(spec.n);
    let mut rng = RandomSource::new(cli.seed, 0);
    let outcome = falsify(&spec, n, trials, &mut rng)?;
    report.details = match &outcome {
        None => json!({ "n": n, "trials": trials, "violation": "none" }),
        Some(v) => json!({
            "n": n,
            "trials": trials,
            "violation": {
                "p": v.input.as_slice(),
                "trial": v.trial,
                "lhs": v.verdict.lhs,
                "rhs": v.verdict.rhs,
                "gap": v.verdict.gap,
            }
        }),
    };
    if let Some(v) = outcome {
        report.verdicts.push(LabeledVerdict {
            label: "first violation".to_string(),
            verdict: v.verdict,
        });
    }
    report.grouping = Some(spec);
    Ok(())
}

fn cmd_tomogram(
    cli: &Cli,
    rho: &Path,
    theta: f64,
    phi: f64,
    preset: Option<PresetArg>,
    report: &mut RunReport,
) -> CliResult<()> {
    let text = read_file(rho, report)?;
    let rho = parse_density_matrix(&text)?;
    let tomogram = compute_tomogram(&rho, theta, phi)?;
    if let Some(kind) = preset {
        let spec = preset_grouping(tomogram.spin, kind.into())?;
        let verdict = evaluate_grouping(&tomogram.w, &spec, cli.tolerance.unwrap_or(QUANTUM_TOLERANCE))?;
        report.verdicts.push(LabeledVerdict {
            label: spec.label.clone().unwrap_or_else(|| "preset".to_string()),
            verdict,
        });
        report.grouping = Some(spec);
    }
    report.details = json!({ "tomogram": TomogramRecord::from(&tomogram) });
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn cmd_sample(
    cli: &Cli,
    kind: SampleKind,
    n: usize,
    rank: Option<usize>,
    count: usize,
    out: &Path,
    report: &mut RunReport,
) -> CliResult<()> {
    fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let mut files = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = RandomSource::new(cli.seed, i as u64);
        let (name, value) = match kind {
            SampleKind::Vector => (
                format!("vector_{i:03}.json"),
                json!(sample_probability_vector(n, &mut rng)?.as_slice()),
            ),
            SampleKind::Density => (
                format!("density_{i:03}.json"),
                density_to_json(&sample_density_matrix(n, rank.unwrap_or(n), &mut rng)?),
            ),
        };
        let text = serde_json::to_string_pretty(&value).expect("sample serializes") + "\n";
        let path = out.join(&name);
        write_file(&path, &text)?;
        files.push(json!({
            "path": path.display().to_string(),
            "sha256": hex::encode(Sha256::digest(text.as_bytes())),
        }));
    }
    report.details = json!({ "kind": kind, "n": n, "rank": rank, "files": files });
    Ok(())
}

/// Runs a parsed command, returning the report and its exit code.
pub fn run(cli: &Cli, echo: Vec<String>) -> CliResult<(RunReport, i32)> {
    let start = Instant::now();
    let mut report = RunReport::new(echo, cli.seed);
    match &cli.command {
        Command::Check {
            mode,
            input,
            shape,
            placement,
        } => cmd_check(cli, *mode, input, shape, placement, &mut report)?,
        Command::Scan {
            input,
            mode,
            shape,
            placement,
            budget,
        } => cmd_scan(cli, input, *mode, shape, placement, budget, &mut report)?,
        Command::Falsify { spec, n, trials } => cmd_falsify(cli, spec, *n, *trials, &mut report)?,
        Command::Tomogram { rho, theta, phi, spec } => cmd_tomogram(cli, rho, *theta, *phi, *spec, &mut report)?,
        Command::Sample {
            kind,
            n,
            rank,
            count,
            out,
        } => cmd_sample(cli, *kind, *n, *rank, *count, out, &mut report)?,
    }
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    report.digest = report.compute_digest();
    let code = match cli.command {
        Command::Check { .. } if !report.all_hold() => EXIT_VIOLATED,
        _ => EXIT_OK,
    };
    Ok((report, code))
}

/// Entry point for the binary: parses `args`, prints the report, and
/// returns the process exit code.
pub fn main_with_args(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let echo = args.iter().skip(1).cloned().collect();
    match run(&cli, echo) {
        Ok((report, code)) => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            // a closed stdout (e.g. `| head`) must not turn into a panic exit code
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if let Some(path) = &cli.output {
                if let Err(e) = write_file(path, &(text + "\n")) {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
