//! The `phasespace` command-line driver.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 numerical guard (support, aliasing, normalization).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grid::{make_phase_grid, PhaseSpaceGrid};
use crate::io::{write_json, write_output, Format, Table};
use crate::kernels::{
    check_kernel_unitarity, kernel_transform, GFunction, KernelSpec, KernelVariant, UnitarityMeasure,
};
use crate::quasidist::{
    husimi, kirkwood_rihaczek, marginals, operator_to_symbol, purity_integral, symbol_to_operator, wigner_from_pure,
    wigner_s_from_density, QuasiDistribution,
};
use crate::solutions::{random_gaussian_mixture_g, solve_section3, wigner_conjugate_g};
use crate::star::{eigen_residuals, HamiltonianSpec};
use crate::states::{
    hermite_eigenstate, momentum_representation, DensityMatrix, OscillatorUnits, PositionWavefunction,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Default seed of the random `g` fixtures.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(name = "phasespace", version, about = "s-ordered phase-space quantum mechanics")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalOpts {
    /// Grid points per axis (power of two).
    #[arg(long = "grid", global = true, default_value_t = 256)]
    pub grid: usize,
    /// Position half-width of the grid.
    #[arg(long, global = true, default_value_t = 16.0)]
    pub halfwidth: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub hbar: f64,
    /// Oscillator length `sqrt(ħ/mω)`.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Kernel description file (`key = value` lines).
    #[arg(long, global = true)]
    pub kernel: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionKind {
    Wigner,
    WignerS,
    Husimi,
    Kirkwood,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Eigen,
    Uniqueness,
    Kernels,
    Weyl,
    All,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Write a quasi-distribution of an oscillator eigenstate.
    Distribution {
        #[arg(long, value_enum)]
        kind: DistributionKind,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s: f64,
    },
    /// Check residual identities; exits 1 when any record fails.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Quantum numbers: `k`, `a..b` (inclusive) or a comma list.
        #[arg(long, default_value = "0..3")]
        n: String,
        /// Ordering parameters as a comma list.
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        /// Tolerance for residuals that must vanish.
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// Per-s summary table for one eigenstate.
    ScanS {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "-0.5,0,0.5,1", allow_hyphen_values = true)]
        s: String,
    },
    /// Write an eigenstate in position and momentum space.
    ExportState {
        #[arg(long, default_value_t = 0)]
        n: usize,
        /// Also write the density matrix as `i, j, re, im` triplets.
        #[arg(long)]
        density: bool,
    },
}

/// Validated configuration shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub global: GlobalOpts,
    pub command: Command,
    pub grid: PhaseSpaceGrid,
    pub units: OscillatorUnits,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let g = &cli.global;
        if !g.grid.is_power_of_two() || g.grid < 8 {
            return Err(Error::Config(format!("--grid {} must be a power of two ≥ 8", g.grid)));
        }
        let grid = make_phase_grid(g.grid, g.halfwidth, g.hbar).map_err(config)?;
        let units = OscillatorUnits::with_lambda(1.0, g.hbar, g.lambda).map_err(config)?;
        match &cli.command {
            Command::Verify { n, s, tol, .. } => {
                parse_n_list(n)?;
                if let Some(s) = s {
                    parse_s_list(s)?;
                }
                if !(*tol > 0.0) {
                    return Err(Error::Config("--tol must be positive".into()));
                }
            }
            Command::ScanS { s, .. } => {
                parse_s_list(s)?;
            }
            Command::Distribution { s, .. } if (*s + 1.0).abs() < 1e-12 => return Err(Error::SingularOrdering),
            _ => {}
        }
        Ok(Self { global: cli.global, command: cli.command, grid, units })
    }

    /// Header common to every emitted file.
    pub fn header(&self) -> Value {
        json!({
            "library": "phasespace",
            "version": env!("CARGO_PKG_VERSION"),
            "config": { "global": self.global, "command": self.command },
        })
    }

    fn state(&self, n: usize) -> Result<PositionWavefunction> {
        hermite_eigenstate(n, &self.units, &self.grid.qgrid)
    }
}

fn config(e: Error) -> Error {
    match e {
        Error::InvalidGrid(m) | Error::InvalidParameter(m) => Error::Config(m),
        other => other,
    }
}

/// Parses `3`, `0..3` (inclusive) or `0,2,5`.
pub fn parse_n_list(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("cannot parse n list '{text}'"));
    let list: Vec<usize> = if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        text.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if list.is_empty() {
        return Err(bad());
    }
    Ok(list)
}

/// Parses a non-empty comma list of ordering parameters, rejecting `s = -1`.
pub fn parse_s_list(text: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| Error::Config(format!("cannot parse s value '{x}'"))))
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(Error::Config("empty s list".into()));
    }
    if values.iter().any(|s| (s + 1.0).abs() < 1e-12) {
        return Err(Error::Config("s = -1 is not supported".into()));
    }
    Ok(values)
}

/// Result of one command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match &cfg.command {
        Command::Distribution { .. } => cmd_distribution(cfg),
        Command::Verify { .. } => cmd_verify(cfg),
        Command::ScanS { .. } => cmd_scan_s(cfg),
        Command::ExportState { .. } => cmd_export_state(cfg),
    }
}

/// Maps a command result to its process exit code.
pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) if o.passed => EXIT_OK,
        Ok(_) => EXIT_VERIFY_FAILED,
        Err(e) if e.is_numerical_guard() => EXIT_NUMERICAL,
        Err(_) => EXIT_CONFIG,
    }
}

fn s_tag(s: f64) -> String {
    format!("{s}").replace('-', "m").replace('.', "p")
}

fn marginal_table(w: &QuasiDistribution, phi: &PositionWavefunction, hbar: f64) -> Result<(Table, f64, f64)> {
    let m = marginals(w);
    let phit = momentum_representation(phi, hbar)?;
    let mut t = Table::new(&["q", "pq", "phi_sq", "p", "pp", "phit_sq"]);
    let qs = phi.grid.coords();
    let ps = phit.grid.coords();
    let (mut eq, mut ep) = (0.0f64, 0.0f64);
    for k in 0..qs.len() {
        let (a, b) = (phi.values[k].norm_sqr(), phit.values[k].norm_sqr());
        eq = eq.max((m.pq[k] - a).abs());
        ep = ep.max((m.pp[k] - b).abs());
        t.push(vec![qs[k], m.pq[k], a, ps[k], m.pp[k], b]);
    }
    Ok((t, eq, ep))
}

pub fn cmd_distribution(cfg: &RunConfig) -> Result<Outcome> {
    let Command::Distribution { kind, n, s } = cfg.command else { unreachable!() };
    let grid = cfg.grid;
    let phi = cfg.state(n)?;
    let (w, stem) = match kind {
        DistributionKind::Wigner => (wigner_from_pure(&phi, &grid)?, format!("wigner_n{n}")),
        DistributionKind::WignerS => {
            let rho = DensityMatrix::pure(&phi)?;
            (wigner_s_from_density(&rho, s, &grid)?, format!("wigner_s{}_n{n}", s_tag(s)))
        }
        DistributionKind::Husimi => (husimi(&phi, &cfg.units, &grid)?, format!("husimi_n{n}")),
        DistributionKind::Kirkwood => (kirkwood_rihaczek(&phi, &grid)?, format!("kirkwood_n{n}")),
    };
    w.check_normalization()?;
    let norm = w.normalization();
    let purity = purity_integral(&w).ok();
    let (mtable, eq, ep) = marginal_table(&w, &phi, grid.hbar)?;
    let mut summary = json!({
        "kind": kind,
        "n": n,
        "s": w.s,
        "hbar": grid.hbar,
        "convention": "sectionIII",
        "source": w.source,
        "normalization": norm.re,
        "normalization_imag": norm.im,
        "purity": purity,
        "marginal_q_error": eq,
        "marginal_p_error": ep,
        "marginals_exact": marginals(&w).exact,
    });
    if let Ok(t) = w.transition_probability() {
        summary["max_transition_probability"] = json!(t.iter().cloned().fold(f64::MIN, f64::max));
    }
    let mut header = cfg.header();
    header["distribution"] = summary.clone();
    let mut files = write_output(&cfg.global.out, &stem, &header, &Table::field(&w.field), cfg.global.format)?;
    files.extend(write_output(&cfg.global.out, &format!("{stem}_marginals"), &header, &mtable, cfg.global.format)?);
    Ok(Outcome { passed: true, files, summary })
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    /// `"<"` for upper bounds, `">"` for lower bounds.
    pub relation: &'static str,
    pub bound: f64,
    pub passed: bool,
}

impl Record {
    fn below(suite: &'static str, name: String, value: f64, bound: f64) -> Self {
        Self { suite, name, value, relation: "<", bound, passed: value < bound }
    }

    fn above(suite: &'static str, name: String, value: f64, bound: f64) -> Self {
        Self { suite, name, value, relation: ">", bound, passed: value > bound }
    }
}

/// Threshold separating "not an eigen-solution" from numerical noise.
pub const UNIQUENESS_FLOOR: f64 = 0.05;

pub fn verify_eigen(cfg: &RunConfig, ns: &[usize], ss: &[f64], tol: f64) -> Result<Vec<Record>> {
    let h = HamiltonianSpec::harmonic(&cfg.units);
    let mut out = Vec::new();
    for &n in ns {
        let rho = DensityMatrix::pure(&cfg.state(n)?)?;
        let energy = cfg.units.energy(n);
        for &s in ss {
            let w = wigner_s_from_density(&rho, s, &cfg.grid)?;
            let r = eigen_residuals(&h, &w.field, energy, s)?;
            out.push(Record::below("eigen", format!("left n={n} s={s}"), r.left, tol));
            out.push(Record::below("eigen", format!("right n={n} s={s}"), r.right, tol));
        }
    }
    Ok(out)
}

pub fn verify_uniqueness(cfg: &RunConfig, ns: &[usize], ss: &[f64], tol: f64) -> Result<Vec<Record>> {
    let h = HamiltonianSpec::harmonic(&cfg.units);
    let ygrid = cfg.grid.y_lattice(2)?;
    let mut out = Vec::new();
    for &n in ns {
        let phi = cfg.state(n)?;
        let energy = cfg.units.energy(n);
        for &s in ss {
            let seed = cfg.global.seed.wrapping_add(n as u64);
            let g = random_gaussian_mixture_g(ygrid, s, 3, seed)?;
            let psi = solve_section3(&phi, &g, s, &cfg.grid)?;
            let r = eigen_residuals(&h, &psi.field, energy, s)?;
            out.push(Record::below("uniqueness", format!("random g left n={n} s={s} seed={seed}"), r.left, tol));
            out.push(Record::above(
                "uniqueness",
                format!("random g right n={n} s={s} seed={seed}"),
                r.right,
                UNIQUENESS_FLOOR,
            ));
            let gw = wigner_conjugate_g(&phi, s, ygrid)?;
            let psi_w = solve_section3(&phi, &gw, s, &cfg.grid)?;
            let rw = eigen_residuals(&h, &psi_w.field, energy, s)?;
            out.push(Record::below("uniqueness", format!("wigner g right n={n} s={s}"), rw.right, tol));
        }
    }
    Ok(out)
}

pub fn verify_kernels(cfg: &RunConfig, ns: &[usize]) -> Result<Vec<Record>> {
    let grid = cfg.grid;
    let u = cfg.units;
    let ygrid = grid.y_lattice(2)?;
    let mut specs = vec![
        ("coherent".to_string(), KernelSpec::new(KernelVariant::CoherentState(u), grid)?, UnitarityMeasure::DGamma),
        (
            "gaussian-g".to_string(),
            KernelSpec::new(KernelVariant::GeneralG(GFunction::gaussian(u.lambda, ygrid)?), grid)?,
            UnitarityMeasure::DGamma,
        ),
        ("bargmann".to_string(), KernelSpec::new(KernelVariant::Bargmann(u), grid)?, UnitarityMeasure::Bargmann),
    ];
    if let Some(path) = &cfg.global.kernel {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let spec = KernelSpec::from_config_str(&text, grid, u.mass)?;
        let measure = match spec.variant {
            KernelVariant::Bargmann(_) => UnitarityMeasure::Bargmann,
            _ => UnitarityMeasure::DGamma,
        };
        specs.push((format!("file:{}", path.display()), spec, measure));
    }
    let mut out = Vec::new();
    for (name, spec, measure) in &specs {
        let r = check_kernel_unitarity(spec, *measure)?;
        out.push(Record::below("kernels", format!("unitarity {name}"), r.residual, 1e-6));
        if *measure == UnitarityMeasure::DGamma {
            for &n in ns {
                let psi = kernel_transform(spec, &cfg.state(n)?)?;
                out.push(Record::below("kernels", format!("norm {name} n={n}"), (psi.norm_sqr() - 1.0).abs(), 1e-6));
            }
        }
    }
    let wide = GFunction::gaussian(u.lambda, ygrid)?.scaled(2.0)?;
    let r = check_kernel_unitarity(&KernelSpec::new(KernelVariant::GeneralG(wide), grid)?, UnitarityMeasure::DGamma)?;
    out.push(Record::below("kernels", "misnormalized g diagonal factor".into(), (r.diagonal_factor - 4.0).abs(), 1e-6));
    Ok(out)
}

pub fn verify_weyl(cfg: &RunConfig) -> Result<Vec<Record>> {
    let grid = cfg.grid;
    let mut out = Vec::new();
    let w0 = wigner_from_pure(&cfg.state(0)?, &grid)?;
    for s in [-0.5, 0.0, 1.0] {
        let op = symbol_to_operator(&w0.field, s)?;
        let back = operator_to_symbol(&op, s, &grid)?;
        out.push(Record::below("weyl", format!("roundtrip s={s}"), back.max_abs_diff(&w0.field), 1e-8));
    }
    let h = HamiltonianSpec::harmonic(&cfg.units).symbol(&grid)?;
    let evals = symbol_to_operator(&h, 0.0)?.eigenvalues();
    for (n, e) in evals.iter().take(6).enumerate() {
        out.push(Record::below("weyl", format!("spectrum n={n}"), (e - cfg.units.energy(n)).abs(), 1e-4));
    }
    Ok(out)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let Command::Verify { suite, n, s, tol } = &cfg.command else { unreachable!() };
    let ns = parse_n_list(n)?;
    let s_eigen = match s {
        Some(s) => parse_s_list(s)?,
        None => vec![-0.5, 0.0, 0.5],
    };
    let s_unique = match s {
        Some(s) => parse_s_list(s)?,
        None => vec![0.0, 0.5],
    };
    let mut records = Vec::new();
    let all = *suite == Suite::All;
    if all || *suite == Suite::Eigen {
        records.extend(verify_eigen(cfg, &ns, &s_eigen, *tol)?);
    }
    if all || *suite == Suite::Uniqueness {
        records.extend(verify_uniqueness(cfg, &ns, &s_unique, *tol)?);
    }
    if all || *suite == Suite::Kernels {
        records.extend(verify_kernels(cfg, &ns)?);
    }
    if all || *suite == Suite::Weyl {
        records.extend(verify_weyl(cfg)?);
    }
    let passed = records.iter().all(|r| r.passed);
    let failing: Vec<&str> = records.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    let mut report = cfg.header();
    report["seed"] = json!(cfg.global.seed);
    report["passed"] = json!(passed);
    report["failing"] = json!(failing);
    report["records"] = json!(records);
    let path = cfg.global.out.join(format!("verify_{}.json", format!("{suite:?}").to_lowercase()));
    write_json(&path, &report)?;
    Ok(Outcome {
        passed,
        files: vec![path],
        summary: json!({ "passed": passed, "records": records.len(), "failing": failing }),
    })
}

pub fn cmd_scan_s(cfg: &RunConfig) -> Result<Outcome> {
    let Command::ScanS { n, s } = &cfg.command else { unreachable!() };
    let n = *n;
    let ss = parse_s_list(s)?;
    let grid = cfg.grid;
    let phi = cfg.state(n)?;
    let rho = DensityMatrix::pure(&phi)?;
    let h = HamiltonianSpec::harmonic(&cfg.units);
    let energy = cfg.units.energy(n);
    let kr = kirkwood_rihaczek(&phi, &grid)?;
    let rows: Vec<Result<Vec<f64>>> = ss
        .par_iter()
        .map(|&s| {
            let w = wigner_s_from_density(&rho, s, &grid)?;
            let norm = w.normalization();
            let (_, eq, ep) = marginal_table(&w, &phi, grid.hbar)?;
            let imag = w.field.values.iter().map(|z| z.im * z.im).sum::<f64>().sqrt() * grid.cell_area().sqrt();
            let r = eigen_residuals(&h, &w.field, energy, s)?;
            let kr_diff = if (s - 1.0).abs() < 1e-12 { w.field.max_abs_diff(&kr.field) } else { f64::NAN };
            Ok(vec![s, norm.re, norm.im, eq, ep, imag, r.left, r.right, kr_diff])
        })
        .collect();
    let mut table = Table::new(&[
        "s",
        "norm_re",
        "norm_im",
        "marginal_q_err",
        "marginal_p_err",
        "imag_l2",
        "left",
        "right",
        "kr_diff",
    ]);
    for row in rows {
        table.push(row?);
    }
    let mut header = cfg.header();
    header["n"] = json!(n);
    header["energy"] = json!(energy);
    header["hbar"] = json!(grid.hbar);
    let files = write_output(&cfg.global.out, &format!("scan_s_n{n}"), &header, &table, cfg.global.format)?;
    let normalized = table.rows.iter().all(|r| (r[1] - 1.0).abs() < 1e-6 && r[2].abs() < 1e-6);
    Ok(Outcome { passed: true, files, summary: json!({ "rows": table.rows.len(), "normalized": normalized }) })
}

pub fn cmd_export_state(cfg: &RunConfig) -> Result<Outcome> {
    let Command::ExportState { n, density } = cfg.command else { unreachable!() };
    let phi = cfg.state(n)?;
    let phit = momentum_representation(&phi, cfg.grid.hbar)?;
    let mut header = cfg.header();
    header["n"] = json!(n);
    header["energy"] = json!(phi.energy);
    header["norm"] = json!(phi.norm_sqr());
    header["units"] = json!(cfg.units);
    let fmt = cfg.global.format;
    let out = &cfg.global.out;
    let mut files = write_output(out, &format!("state_n{n}"), &header, &Table::wavefunction(&phi), fmt)?;
    let mut pheader = header.clone();
    pheader["representation"] = json!("momentum");
    let mut pt = Table::wavefunction(&phit);
    pt.columns[0] = "p".into();
    files.extend(write_output(out, &format!("momentum_n{n}"), &pheader, &pt, fmt)?);
    if density {
        let rho = DensityMatrix::pure(&phi)?;
        let mut dheader = header.clone();
        dheader["purity"] = json!(rho.purity());
        dheader["normalization"] = json!("trace = Σ ρ_ii dq");
        files.extend(write_output(out, &format!("density_n{n}"), &dheader, &Table::matrix(&rho.rho), fmt)?);
    }
    Ok(Outcome { passed: true, files, summary: json!({ "n": n, "norm": phi.norm_sqr() }) })
}

/// Parses arguments, runs the command, prints the summary and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| run(&cfg));
    match &result {
        Ok(o) => {
            println!("{}", serde_json::to_string_pretty(&o.summary).unwrap_or_default());
            if !o.passed {
                eprintln!("verification failed: {}", o.summary["failing"]);
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    exit_code(&result)
}
