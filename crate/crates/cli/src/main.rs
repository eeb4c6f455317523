//! `coulomb2d` command-line driver.

mod config;
mod output;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use coulomb2d::assembly::{build_problem, build_stark_problem, combine_problem, LengthScale, ProblemMatrices};
use coulomb2d::basis::{enumerate_all_ml, enumerate_basis, stark_symmetrize};
use coulomb2d::eigensolver::SpectrumResult;
use coulomb2d::hamiltonian::{build_operator, OperatorKind};
use coulomb2d::spectra::{
    epsilon_scan, least_squares_slope, optimize_alpha, resonance_filter, rydberg_table, solve_problem, ResonanceCandidate,
    RydbergLevel,
};
use coulomb2d::symmetry::SymmetryAnalysis;
use coulomb2d::Complex64;

use config::{Format, RunConfig};
use output::{csv_artifact, destination, emit, fmt_sig, json_artifact, round_sig, say, write_atomic};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] coulomb2d::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use coulomb2d::Error as E;
        match self {
            CliError::Validation(_) => 2,
            CliError::Core(e) if e.is_convergence() => 3,
            CliError::Core(
                E::InvalidParameter(_) | E::Parse(_) | E::InconsistentSymmetry(_) | E::TooLarge { .. } | E::LengthMismatch { .. },
            ) => 2,
            CliError::Core(_) => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "coulomb2d", version, about = "Spectral solver for the planar three-body Coulomb problem")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Term counts and canonical serialization of the operators.
    BuildOperators {
        /// Single operator, e.g. B, T1_plus_T2, R1R2.
        #[arg(long)]
        kind: Option<String>,
        /// File for a single operator, directory otherwise.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Size of a symmetry-adapted basis.
    BasisCount {
        #[command(flatten)]
        run: RunArgs,
        /// Write the states as CSV.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Class sizes, dimensions and characters of the symmetry group.
    GroupTable {
        /// Cross-check orthogonality, class relations and the point-group corner.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Eigenvalues nearest a shift.
    Spectrum {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Eigenvalues stable between two rotation angles.
    Resonances {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Ground-state energy against the repulsion strength.
    ScanEpsilon {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Rydberg series with quantum defects.
    Rydberg {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Default)]
struct RunArgs {
    /// Flat key = value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// helium-infinite, hminus-infinite or custom.
    #[arg(long)]
    system: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m2: Option<String>,
    /// Third mass, or "inf".
    #[arg(long, allow_hyphen_values = true)]
    m3: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q3: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    ml: Option<String>,
    /// singlet or triplet.
    #[arg(long)]
    symmetry: Option<String>,
    #[arg(long)]
    nbase: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Rotation angle; lengths scale by exp(i theta).
    #[arg(long)]
    theta: Option<String>,
    /// Second rotation angle for resonance matching.
    #[arg(long)]
    theta2: Option<String>,
    /// Strength of the electron repulsion.
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    field: Option<String>,
    /// Reflection parity of a field-dressed basis.
    #[arg(long, allow_hyphen_values = true)]
    reflection: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    shift_im: Option<String>,
    #[arg(short, long)]
    k: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    /// Minimize the eigenvalue nearest the shift over alpha first.
    #[arg(long)]
    optimize_alpha: bool,
    #[arg(long)]
    alpha_lo: Option<String>,
    #[arg(long)]
    alpha_hi: Option<String>,
    /// Comma-separated repulsion strengths.
    #[arg(long, allow_hyphen_values = true)]
    eps_points: Option<String>,
    #[arg(long)]
    match_tol: Option<String>,
    #[arg(long)]
    count: Option<String>,
    /// json or csv.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    output: Option<String>,
    /// Directory for the combined A and M matrices as row col value text.
    #[arg(long)]
    dump_matrices: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => config::read_config(p)?,
            None => BTreeMap::new(),
        };
        let flags = [
            ("system", self.system.clone()),
            ("m1", self.m1.clone()),
            ("m2", self.m2.clone()),
            ("m3", self.m3.clone()),
            ("q1", self.q1.clone()),
            ("q2", self.q2.clone()),
            ("q3", self.q3.clone()),
            ("ml", self.ml.clone()),
            ("symmetry", self.symmetry.clone()),
            ("nbase", self.nbase.clone()),
            ("alpha", self.alpha.clone()),
            ("theta", self.theta.clone()),
            ("theta2", self.theta2.clone()),
            ("epsilon", self.epsilon.clone()),
            ("field", self.field.clone()),
            ("reflection", self.reflection.clone()),
            ("shift", self.shift.clone()),
            ("shift_im", self.shift_im.clone()),
            ("k", self.k.clone()),
            ("tol", self.tol.clone()),
            ("seed", self.seed.clone()),
            ("max_iter", self.max_iter.clone()),
            ("optimize_alpha", self.optimize_alpha.then(|| "true".to_string())),
            ("alpha_lo", self.alpha_lo.clone()),
            ("alpha_hi", self.alpha_hi.clone()),
            ("eps_points", self.eps_points.clone()),
            ("match_tol", self.match_tol.clone()),
            ("count", self.count.clone()),
            ("format", self.format.clone()),
            ("output", self.output.clone()),
        ];
        RunConfig::from_map(config::resolve(file, flags))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        coulomb2d::set_threads(n);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::BuildOperators { kind, output } => build_operators(kind.as_deref(), output.as_deref()),
        Command::BasisCount { run, dump } => basis_count(&run.resolve()?, dump.as_deref()),
        Command::GroupTable { verify, output } => group_table(verify, output),
        Command::Spectrum { run } => spectrum(&run.resolve()?, run.dump_matrices.as_deref()),
        Command::Resonances { run } => resonances(&run.resolve()?),
        Command::ScanEpsilon { run } => scan_epsilon(&run.resolve()?),
        Command::Rydberg { run } => rydberg(&run.resolve()?),
    }
}

fn build_operators(kind: Option<&str>, output: Option<&Path>) -> Result<()> {
    if let Some(name) = kind {
        let kind: OperatorKind = name.parse()?;
        let op = build_operator(kind)?;
        if let Some(path) = output {
            write_atomic(path, op.to_text().as_bytes())?;
        }
        say(&format!("terms: {}\n", op.term_count()));
        return Ok(());
    }
    for kind in OperatorKind::ALL {
        let op = build_operator(kind)?;
        if let Some(dir) = output {
            write_atomic(&dir.join(format!("{}.txt", kind.name())), op.to_text().as_bytes())?;
        }
        say(&format!("{} terms: {}\n", kind.name(), op.term_count()));
    }
    Ok(())
}

fn basis_count(cfg: &RunConfig, dump: Option<&Path>) -> Result<()> {
    let basis = enumerate_basis(cfg.ml, cfg.symmetry, cfg.n_base);
    if let Some(path) = dump {
        let mut buf = Vec::new();
        basis.write_csv(&mut buf).map_err(coulomb2d::Error::from)?;
        write_atomic(path, &buf)?;
    }
    say(&format!("{}\n", basis.len()));
    Ok(())
}

fn group_table(verify: bool, output: Option<PathBuf>) -> Result<()> {
    let analysis = SymmetryAnalysis::standard()?;
    let table = &analysis.table;
    let mut text = format!("order {}\nclasses {}\n", analysis.group.order(), table.class_sizes.len());
    let dims: Vec<String> = table.dimensions().iter().map(|d| d.to_string()).collect();
    text.push_str(&format!("dimensions {}\n", dims.join(" ")));
    text.push_str("characters\n");
    text.push_str(&table.render());
    if verify {
        analysis.verify()?;
        text.push_str(&format!(
            "verify ok: orthogonality, class relations, point-group corner, physical quotient order {}\n",
            analysis.physical_quotient_order()?
        ));
    }
    emit(&text, destination(output.as_deref(), "group-table.txt"))
}

fn problem(cfg: &RunConfig) -> Result<ProblemMatrices> {
    if cfg.field != 0.0 {
        let states = enumerate_all_ml(cfg.symmetry, cfg.n_base);
        let basis = stark_symmetrize(&states, cfg.symmetry, cfg.n_base, cfg.reflection)?;
        if basis.is_empty() {
            return Err(CliError::Validation("empty basis".into()));
        }
        return Ok(build_stark_problem(&cfg.params, &basis)?);
    }
    let basis = enumerate_basis(cfg.ml, cfg.symmetry, cfg.n_base);
    if basis.is_empty() {
        return Err(CliError::Validation(format!(
            "no {} states with M_L = {} at nbase {}",
            cfg.symmetry, cfg.ml, cfg.n_base
        )));
    }
    Ok(build_problem(&cfg.params, &basis)?)
}

fn rounded(mut res: SpectrumResult) -> SpectrumResult {
    for z in &mut res.eigenvalues {
        *z = Complex64::new(round_sig(z.re), round_sig(z.im));
    }
    res
}

fn spectrum_rows(res: &SpectrumResult) -> Vec<Vec<String>> {
    res.eigenvalues
        .iter()
        .zip(&res.residuals)
        .enumerate()
        .map(|(i, (z, r))| vec![i.to_string(), fmt_sig(z.re), fmt_sig(z.im), format!("{r:.3e}")])
        .collect()
}

fn dump_matrices(p: &ProblemMatrices, cfg: &RunConfig, scale: LengthScale, dir: &Path) -> Result<()> {
    let write = |name: &str, text: Vec<u8>| write_atomic(&dir.join(name), &text);
    let io = |e: std::io::Error| CliError::from(coulomb2d::Error::from(e));
    if scale.is_real() && cfg.request.shift.im == 0.0 {
        let (a, m) = combine_problem::<f64>(p, scale, cfg.epsilon, cfg.field)?;
        let (mut ta, mut tm) = (Vec::new(), Vec::new());
        a.write_text(&mut ta).map_err(io)?;
        m.write_text(&mut tm).map_err(io)?;
        write("A.txt", ta)?;
        write("M.txt", tm)
    } else {
        let (a, m) = combine_problem::<Complex64>(p, scale, cfg.epsilon, cfg.field)?;
        let (mut ta, mut tm) = (Vec::new(), Vec::new());
        a.write_text(&mut ta).map_err(io)?;
        m.write_text(&mut tm).map_err(io)?;
        write("A.txt", ta)?;
        write("M.txt", tm)
    }
}

#[derive(Serialize)]
struct SpectrumArtifact {
    #[serde(skip_serializing_if = "Option::is_none")]
    optimized_alpha: Option<f64>,
    #[serde(flatten)]
    spectrum: SpectrumResult,
}

fn spectrum(cfg: &RunConfig, dump: Option<&Path>) -> Result<()> {
    let p = problem(cfg)?;
    let mut alpha = cfg.alpha;
    let mut optimized_alpha = None;
    if cfg.optimize_alpha {
        if cfg.theta != 0.0 || cfg.request.shift.im != 0.0 || cfg.field != 0.0 {
            return Err(CliError::Validation("optimize_alpha needs a real, field-free problem".into()));
        }
        let (lo, hi) = cfg.alpha_bracket;
        alpha = optimize_alpha(&p, cfg.epsilon, cfg.request.shift.re, lo, hi, 1e-3)?.0;
        optimized_alpha = Some(alpha);
    }
    let scale = LengthScale::rotated(alpha, cfg.theta);
    if let Some(dir) = dump {
        dump_matrices(&p, cfg, scale, dir)?;
    }
    let res = rounded(solve_problem(&p, scale, cfg.epsilon, cfg.field, &cfg.request)?);
    let text = match cfg.format {
        Format::Json => json_artifact("spectrum", &cfg.resolved, &SpectrumArtifact { optimized_alpha, spectrum: res })?,
        Format::Csv => csv_artifact(
            "spectrum",
            &cfg.resolved,
            &["index", "energy_re", "energy_im", "residual"],
            &spectrum_rows(&res),
        ),
    };
    emit(&text, destination(cfg.output.as_deref(), &format!("spectrum.{}", ext(cfg.format))))
}

fn ext(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Csv => "csv",
    }
}

#[derive(Serialize)]
struct ResonanceArtifact {
    candidates: Vec<ResonanceCandidate>,
    first: SpectrumResult,
    second: SpectrumResult,
}

fn resonances(cfg: &RunConfig) -> Result<()> {
    let theta2 = cfg.theta2.ok_or_else(|| CliError::Validation("resonances need theta2".into()))?;
    if cfg.theta == 0.0 || theta2 == cfg.theta {
        return Err(CliError::Validation("resonances need two distinct nonzero rotation angles".into()));
    }
    if cfg.field != 0.0 {
        return Err(CliError::Validation("resonances are computed field-free".into()));
    }
    let p = problem(cfg)?;
    let req = &cfg.request;
    let first = solve_problem(&p, LengthScale::rotated(cfg.alpha, cfg.theta), cfg.epsilon, 0.0, req)?;
    let second = solve_problem(&p, LengthScale::rotated(cfg.alpha, theta2), cfg.epsilon, 0.0, req)?;
    let candidates: Vec<ResonanceCandidate> = resonance_filter(&first, &second, cfg.match_tol)
        .into_iter()
        .map(|mut c| {
            c.energy = Complex64::new(round_sig(c.energy.re), round_sig(c.energy.im));
            c.partner = Complex64::new(round_sig(c.partner.re), round_sig(c.partner.im));
            c
        })
        .collect();
    let text = match cfg.format {
        Format::Json => json_artifact(
            "resonances",
            &cfg.resolved,
            &ResonanceArtifact { candidates, first: rounded(first), second: rounded(second) },
        )?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = candidates
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    vec![
                        i.to_string(),
                        fmt_sig(c.energy.re),
                        fmt_sig(c.energy.im),
                        fmt_sig(c.partner.re),
                        fmt_sig(c.partner.im),
                        format!("{:.3e}", c.drift),
                    ]
                })
                .collect();
            csv_artifact(
                "resonances",
                &cfg.resolved,
                &["index", "energy_re", "energy_im", "partner_re", "partner_im", "drift"],
                &rows,
            )
        }
    };
    emit(&text, destination(cfg.output.as_deref(), &format!("resonances.{}", ext(cfg.format))))
}

#[derive(Serialize)]
struct ScanPoint {
    epsilon: f64,
    energy: f64,
}

#[derive(Serialize)]
struct ScanArtifact {
    alpha: f64,
    points: Vec<ScanPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slope: Option<f64>,
}

fn scan_epsilon(cfg: &RunConfig) -> Result<()> {
    if cfg.theta != 0.0 || cfg.field != 0.0 || cfg.request.shift.im != 0.0 {
        return Err(CliError::Validation("scan-epsilon needs a real, field-free problem".into()));
    }
    let p = problem(cfg)?;
    let shift = cfg.request.shift.re;
    let alpha = if cfg.optimize_alpha {
        let mid = cfg.eps_points.iter().sum::<f64>() / cfg.eps_points.len() as f64;
        optimize_alpha(&p, mid, shift, cfg.alpha_bracket.0, cfg.alpha_bracket.1, 1e-3)?.0
    } else {
        cfg.alpha
    };
    let raw = epsilon_scan(&p, alpha, &cfg.eps_points, shift)?;
    let slope = if raw.len() >= 2 { Some(least_squares_slope(&raw)?) } else { None };
    let points: Vec<ScanPoint> = raw.iter().map(|&(epsilon, e)| ScanPoint { epsilon, energy: round_sig(e) }).collect();
    let text = match cfg.format {
        Format::Json => json_artifact("scan-epsilon", &cfg.resolved, &ScanArtifact { alpha, points, slope })?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = points.iter().map(|p| vec![p.epsilon.to_string(), fmt_sig(p.energy)]).collect();
            csv_artifact("scan-epsilon", &cfg.resolved, &["epsilon", "energy"], &rows)
        }
    };
    emit(&text, destination(cfg.output.as_deref(), &format!("scan-epsilon.{}", ext(cfg.format))))
}

fn rydberg(cfg: &RunConfig) -> Result<()> {
    let helium = cfg.params.q3 == 2.0 && cfg.params.q1 == -1.0 && cfg.params.q2 == -1.0;
    if !helium || cfg.theta != 0.0 || cfg.field != 0.0 || cfg.epsilon != 1.0 {
        return Err(CliError::Validation(
            "rydberg series are labelled against the He+ threshold; use a real, field-free helium problem".into(),
        ));
    }
    if cfg.count == 0 {
        return Err(CliError::Validation("count must be at least 1".into()));
    }
    let p = problem(cfg)?;
    let levels: Vec<RydbergLevel> = rydberg_table(&p, cfg.alpha, cfg.ml, cfg.symmetry, cfg.count, &cfg.request)?
        .into_iter()
        .map(|mut l| {
            l.energy = round_sig(l.energy);
            l
        })
        .collect();
    let text = match cfg.format {
        Format::Json => json_artifact("rydberg", &cfg.resolved, &levels)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = levels
                .iter()
                .map(|l| vec![format!("\"{}\"", l.label), l.label.n.to_string(), l.label.m.to_string(), fmt_sig(l.energy), format!("{:.4}", l.defect)])
                .collect();
            csv_artifact("rydberg", &cfg.resolved, &["label", "n", "m", "energy", "defect"], &rows)
        }
    };
    emit(&text, destination(cfg.output.as_deref(), &format!("rydberg.{}", ext(cfg.format))))
}
