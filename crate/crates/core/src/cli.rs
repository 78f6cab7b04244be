//! The `qca-lab` command-line runner.
//!
//! Every subcommand writes CSV (header row, shortest round-trip decimals
//! for doubles, full-precision strings for multiprecision values) or JSON
//! to stdout or `--out`. Exit status is `0` on success, `2` for invalid
//! input and `1` for internal failures.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::bigreal::BigReal;
use crate::fit::{fit_exp_decay, fit_gaussian, FitError, FitResult};
use crate::highprec::{
    build_dbar_bigreal, eigenvalues_sturm, min_eig_series, min_eigpair, BigSymMatrix, HighPrecError,
    PrecisionPolicy,
};
use crate::internal_space::{
    build_space, max_anticommutator, max_zero_cross_product, verify_equal_norm, InternalSpaceError, Species,
};
use crate::matrix::{eig_hermitian, eig_unitary, negation_symmetry_defect, phase_multiset_distance, ComplexMatrix, LinalgError, C64};
use crate::momentum::{
    dispersion, qca_c_closed_form, qca_c_eigenphases, qca_c_matrix, walk_unitary_at_k, MomentumError, MomentumPoint,
    WalkConfig,
};
use crate::qca1d::{
    build_evolution, interaction_unitary, mode_index, negative_mode_population, single_particle_block,
    time_reversal_defect, translation_commutator, walk_matrix, Basis, GateConvention, InteractionCoeffs, JointSpace,
    Lattice1DConfig, LatticeState1D, Operator, Qca1dError,
};
use crate::toeplitz::{
    dbar_rows, f_tilde, f_tilde_limit, finite_size_correction, momentum_space_coupling, negative_coupling,
    CouplingProfile, ToeplitzError, ToeplitzSpec,
};

/// Environment variable holding the default precision policy
/// (`required`, `fixed:N` or `min:N`).
pub const PRECISION_ENV: &str = "QCA_LAB_PRECISION";

/// Tolerance used for the pass flag of the exact identities.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit status 2.
    Validation(String),
    /// Computation or I/O failure: exit status 1.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Internal(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn validation(e: impl fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn internal(e: impl fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        internal(e)
    }
}

impl From<MomentumError> for CliError {
    fn from(e: MomentumError) -> Self {
        match e {
            MomentumError::Linalg(l) => internal(l),
            other => validation(other),
        }
    }
}

impl From<InternalSpaceError> for CliError {
    fn from(e: InternalSpaceError) -> Self {
        internal(e)
    }
}

impl From<Qca1dError> for CliError {
    fn from(e: Qca1dError) -> Self {
        match e {
            Qca1dError::Linalg(l) => internal(l),
            other => validation(other),
        }
    }
}

impl From<ToeplitzError> for CliError {
    fn from(e: ToeplitzError) -> Self {
        match e {
            ToeplitzError::Linalg(l) => internal(l),
            other => validation(other),
        }
    }
}

impl From<HighPrecError> for CliError {
    fn from(e: HighPrecError) -> Self {
        match e {
            HighPrecError::NoConvergence { .. } | HighPrecError::Arithmetic(_) => internal(e),
            other => validation(other),
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::NoConvergence => internal(e),
            other => validation(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        internal(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        internal(e)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeciesArg {
    Fermion,
    Boson,
    BosonDoubled,
}

impl From<SpeciesArg> for Species {
    fn from(s: SpeciesArg) -> Self {
        match s {
            SpeciesArg::Fermion => Species::Fermion,
            SpeciesArg::Boson => Species::Boson,
            SpeciesArg::BosonDoubled => Species::BosonDoubled,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeArg {
    Fermion,
    Boson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionArg {
    Table,
    Exponential,
}

impl From<ConventionArg> for GateConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Table => GateConvention::Table,
            ConventionArg::Exponential => GateConvention::Exponential,
        }
    }
}

/// Evenly spaced points `START:STOP:COUNT` (inclusive), or a single value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in grid {s:?}"));
        let grid = match parts.as_slice() {
            [x] => Grid { start: num(x)?, stop: num(x)?, count: 1 },
            [a, b, n] => Grid {
                start: num(a)?,
                stop: num(b)?,
                count: n.trim().parse().map_err(|_| format!("bad count in grid {s:?}"))?,
            },
            _ => return Err(format!("grid must be START:STOP:COUNT or a single value (got {s:?})")),
        };
        if grid.count == 0 || !grid.start.is_finite() || !grid.stop.is_finite() {
            return Err(format!("empty or non-finite grid {s:?}"));
        }
        Ok(grid)
    }
}

/// A direction `x,y,z` in momentum space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Direction(pub [f64; 3]);

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad component {t:?}")))
            .collect::<Result<_, _>>()?;
        let [x, y, z] = v[..] else {
            return Err(format!("direction needs three components (got {s:?})"));
        };
        let n = (x * x + y * y + z * z).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err("direction must be a nonzero finite vector".into());
        }
        Ok(Direction([x / n, y / n, z / n]))
    }
}

/// A list of ranges `M`: `20,24,28` or `20:60:4` (inclusive, step).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MList(pub Vec<usize>);

impl FromStr for MList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("M list must be comma separated or START:STOP:STEP (got {s:?})");
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let v = if s.contains(':') {
            let p: Vec<&str> = s.split(':').collect();
            let [a, b, step] = p[..] else { return Err(bad()) };
            let (a, b, step) = (parse(a)?, parse(b)?, parse(step)?);
            if step == 0 || a > b {
                return Err(bad());
            }
            (a..=b).step_by(step).collect()
        } else {
            s.split(',').map(parse).collect::<Result<Vec<_>, _>>()?
        };
        if v.is_empty() {
            return Err(bad());
        }
        Ok(MList(v))
    }
}

/// Comma separated lattice modes such as `0+,1-`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Modes(pub Vec<(usize, bool)>);

impl FromStr for Modes {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Ok(Modes::default());
        }
        s.split(',')
            .map(|t| {
                let t = t.trim();
                let (site, plus) = if let Some(x) = t.strip_suffix('+') {
                    (x, true)
                } else if let Some(x) = t.strip_suffix('-') {
                    (x, false)
                } else {
                    return Err(format!("mode {t:?} must end in + or -"));
                };
                site.parse::<usize>().map(|x| (x, plus)).map_err(|_| format!("bad site in {t:?}"))
            })
            .collect::<Result<_, _>>()
            .map(Modes)
    }
}

#[derive(Debug, Parser)]
#[command(name = "qca-lab", version, about = "Quantum walk and QCA experiments")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write an experiment record (JSON) here.
    #[arg(long, global = true)]
    pub record: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Equal-norm constants and anticommutators of an internal space.
    Equalnorm {
        #[arg(long, value_enum)]
        species: SpeciesArg,
    },
    /// Eigenphases of the momentum-block walk unitary.
    Dispersion {
        #[arg(long, value_enum)]
        species: SpeciesArg,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
        /// Values of |k| along --direction, START:STOP:COUNT.
        #[arg(long, default_value = "0:1:11", allow_hyphen_values = true)]
        kgrid: Grid,
        #[arg(long, default_value = "1,0,0", allow_hyphen_values = true)]
        direction: Direction,
        /// Use this many uniformly random momenta instead of --kgrid.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bosonic 3D QCA: product matrix, closed forms and eigenphases.
    #[command(name = "qca3d-eig")]
    Qca3dEig {
        #[arg(long, default_value = "0:1:11", allow_hyphen_values = true)]
        kgrid: Grid,
        #[arg(long, default_value = "1,2,3", allow_hyphen_values = true)]
        direction: Direction,
        #[arg(long)]
        doubled: bool,
    },
    /// One-dimensional QCA on a periodic lattice.
    Qca1d {
        #[command(subcommand)]
        command: Qca1dCommand,
    },
    /// Toeplitz coupling matrices and their spectra.
    Toeplitz {
        #[command(subcommand)]
        command: ToeplitzCommand,
    },
    /// Partial sums of the symbol transform f̃(k).
    Ftilde {
        #[arg(long, default_value_t = 100_000)]
        terms: usize,
        #[arg(long, default_value = "-3.141592653589793:3.141592653589793:101", allow_hyphen_values = true)]
        kgrid: Grid,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Qca1dCommand {
    /// Evolve a lattice state and print amplitude snapshots.
    Evolve {
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// CSV of `label,re,im` records; defaults to one excitation at (0,+).
        #[arg(long)]
        state_in: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = LatticeArg::Fermion)]
        species: LatticeArg,
        #[arg(long, default_value_t = 1)]
        bmax: usize,
        #[arg(long, value_enum, default_value_t = ConventionArg::Table)]
        convention: ConventionArg,
    },
    /// Check τ Û τ† = Û†.
    TauCheck {
        #[arg(long = "N")]
        n: usize,
        #[arg(long, value_enum, default_value_t = LatticeArg::Fermion)]
        species: LatticeArg,
        #[arg(long, default_value_t = 2)]
        bmax: usize,
        #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = ConventionArg::Table)]
        convention: ConventionArg,
    },
    /// Compare the one-particle block of Û with the directly built walk.
    SingleParticle {
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = LatticeArg::Fermion)]
        species: LatticeArg,
        #[arg(long, value_enum, default_value_t = ConventionArg::Table)]
        convention: ConventionArg,
    },
    /// Interacting fermion-boson evolution and boson momentum populations.
    Interact {
        #[arg(long = "N")]
        n: usize,
        /// Real part of every coupling α_{ℓmn}.
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha_im: f64,
        #[arg(long)]
        bmax: usize,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
        /// Interaction range M (even); the profile is uniform.
        #[arg(long, default_value_t = 0)]
        range: usize,
        /// Initially occupied fermion modes.
        #[arg(long, default_value = "0+")]
        fermions: Modes,
        /// Initially occupied boson modes.
        #[arg(long, default_value = "")]
        bosons: Modes,
        #[arg(long, value_enum, default_value_t = ConventionArg::Table)]
        convention: ConventionArg,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToeplitzCommand {
    /// The matrix D̄ for range M (N → ∞ unless --N is given).
    Matrix {
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "N")]
        n: Option<usize>,
    },
    /// Smallest eigenvalue of D̄ in multiprecision.
    Mineig {
        #[arg(long = "M")]
        m: usize,
        #[arg(long)]
        digits: Option<u32>,
    },
    /// λ_min for several M, computed concurrently.
    Series {
        #[arg(long = "Mlist")]
        m_list: MList,
        /// `required`, `fixed:N` or `min:N`.
        #[arg(long)]
        policy: Option<String>,
    },
    /// Fit λ_min ≈ e^{c − αM} to a series CSV.
    AlphaFit {
        #[arg(long)]
        series: PathBuf,
        /// Smallest M included in the fit.
        #[arg(long = "min-M", default_value_t = 20)]
        min_m: usize,
    },
    /// Minimizing eigenvector of D̄ with a Gaussian fit of its profile.
    Eigvec {
        #[arg(long = "M")]
        m: usize,
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Quadratic-form coupling against the momentum sum on random profiles.
    Coupling {
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// ‖D̄_N − D̄_∞‖ for several N.
    FiniteSize {
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "N", value_delimiter = ',', default_value = "64,256,1024")]
        n: Vec<usize>,
    },
    /// Multiprecision eigenvalues against the double-precision solver.
    Crosscheck {
        /// Largest M of D̄ checked (even M from 0).
        #[arg(long = "max-M", default_value_t = 12)]
        max_m: usize,
        /// Number of random symmetric 20×20 matrices.
        #[arg(long, default_value_t = 5)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        digits: u32,
    },
}

/// Provenance record of one run.
#[derive(Debug, Serialize)]
pub struct ExperimentRecord {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub wall_time: f64,
    pub pass: bool,
}

/// Rendered output and whether the run's built-in checks passed.
pub struct Report {
    pub text: String,
    pub pass: bool,
}

fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(internal)
}

fn json_text<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(internal)?;
    s.push('\n');
    Ok(s)
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn default_policy() -> Result<PrecisionPolicy, CliError> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) if !v.trim().is_empty() => v.parse().map_err(validation),
        _ => Ok(PrecisionPolicy::Required),
    }
}

fn digits_for(m: usize, digits: Option<u32>) -> Result<u32, CliError> {
    match digits {
        Some(d) => Ok(PrecisionPolicy::Fixed(d).digits_for(m)?),
        None => Ok(default_policy()?.digits_for(m)?),
    }
}

fn lattice(species: LatticeArg, n: usize, theta: f64, bmax: usize, convention: ConventionArg) -> Lattice1DConfig {
    match species {
        LatticeArg::Fermion => Lattice1DConfig::fermion(n, theta).with_convention(convention.into()),
        LatticeArg::Boson => {
            let mut cfg = Lattice1DConfig::boson(n, bmax);
            cfg.theta = theta;
            cfg
        }
    }
}

fn momentum_points(kgrid: &Grid, direction: &Direction, random: Option<usize>, seed: u64) -> Vec<MomentumPoint> {
    match random {
        Some(count) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pi = std::f64::consts::PI;
            (0..count)
                .map(|_| {
                    let mut c = || pi - rng.gen_range(0.0..2.0 * pi);
                    MomentumPoint::new(c(), c(), c())
                })
                .collect()
        }
        None => kgrid
            .points()
            .into_iter()
            .map(|t| MomentumPoint::from_array(direction.0.map(|d| d * t)))
            .collect(),
    }
}

fn run_equalnorm(species: SpeciesArg, format: Format) -> Result<Report, CliError> {
    let space = build_space(species.into());
    let report = verify_equal_norm(&space)?;
    let anti = max_anticommutator(&space);
    let zero_cross = space.p_zero.as_ref().map(|_| max_zero_cross_product(&space));
    let pass = report.max_violation <= 1e-13 && anti <= 1e-13 && zero_cross.is_none_or(|z| z <= 1e-13);
    #[derive(Serialize)]
    struct Out {
        species: Species,
        c: f64,
        c_prime: Option<f64>,
        max_violation: f64,
        max_anticommutator: f64,
        max_zero_cross_product: Option<f64>,
    }
    let out = Out {
        species: report.species,
        c: report.c,
        c_prime: report.c_prime,
        max_violation: report.max_violation,
        max_anticommutator: anti,
        max_zero_cross_product: zero_cross,
    };
    let text = match format {
        Format::Json => json_text(&out)?,
        Format::Csv => {
            let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
            csv_text(
                &header(&["species", "c", "c_prime", "max_violation", "max_anticommutator", "max_zero_cross_product"]),
                &[vec![
                    serde_json::to_value(out.species).map_err(internal)?.as_str().unwrap_or_default().to_string(),
                    fmt_f64(out.c),
                    opt(out.c_prime),
                    fmt_f64(out.max_violation),
                    fmt_f64(out.max_anticommutator),
                    opt(out.max_zero_cross_product),
                ]],
            )?
        }
    };
    Ok(Report { text, pass })
}

fn run_dispersion(
    species: SpeciesArg,
    theta: f64,
    kgrid: &Grid,
    direction: &Direction,
    random: Option<usize>,
    seed: u64,
    format: Format,
) -> Result<Report, CliError> {
    let cfg = WalkConfig::unit(build_space(species.into()), theta)?;
    let mut rows = Vec::new();
    let mut pass = true;
    #[derive(Serialize)]
    struct Row {
        k: [f64; 3],
        k_norm: f64,
        reference: f64,
        phases: Vec<f64>,
        unitarity_deviation: f64,
        negation_defect: f64,
    }
    for k in momentum_points(kgrid, direction, random, seed) {
        let u = walk_unitary_at_k(&cfg, k)?;
        let d = dispersion(&cfg, k)?;
        let reference = if species == SpeciesArg::Fermion {
            (theta * theta + k.norm() * k.norm()).sqrt()
        } else {
            k.norm()
        };
        let row = Row {
            k: k.as_array(),
            k_norm: k.norm(),
            reference,
            unitarity_deviation: u.unitary_deviation(),
            negation_defect: negation_symmetry_defect(&d.phases),
            phases: d.phases,
        };
        pass &= row.unitarity_deviation <= IDENTITY_TOL && row.negation_defect <= IDENTITY_TOL;
        rows.push(row);
    }
    let text = match format {
        Format::Json => json_text(&rows)?,
        Format::Csv => {
            let dim = cfg.space.dim;
            let mut h = header(&["kx", "ky", "kz", "k_norm", "reference"]);
            h.extend((0..dim).map(|i| format!("phase_{i}")));
            h.extend(header(&["unitarity_deviation", "negation_defect"]));
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut v: Vec<String> = r.k.iter().map(|x| fmt_f64(*x)).collect();
                    v.push(fmt_f64(r.k_norm));
                    v.push(fmt_f64(r.reference));
                    v.extend(r.phases.iter().map(|x| fmt_f64(*x)));
                    v.push(fmt_f64(r.unitarity_deviation));
                    v.push(fmt_f64(r.negation_defect));
                    v
                })
                .collect();
            csv_text(&h, &body)?
        }
    };
    Ok(Report { text, pass })
}

fn run_qca3d(kgrid: &Grid, direction: &Direction, doubled: bool, format: Format) -> Result<Report, CliError> {
    #[derive(Serialize)]
    struct Row {
        k: [f64; 3],
        phi: f64,
        phases: Vec<f64>,
        product_vs_closed_form: f64,
        phase_deviation: f64,
    }
    let mut rows = Vec::new();
    let mut pass = true;
    for k in momentum_points(kgrid, direction, None, 0) {
        k.check_brillouin(1.0)?;
        let c = qca_c_matrix(k, 1.0, doubled);
        let upper = qca_c_matrix(k, 1.0, false);
        let product_vs_closed_form = upper.max_abs_diff(&qca_c_closed_form(k, 1.0));
        let (_, phi, _) = qca_c_eigenphases(k, 1.0)?;
        let mut expected = vec![0.0, phi, -phi];
        if doubled {
            let (_, phi_m, _) = qca_c_eigenphases(k.scaled(-1.0), 1.0)?;
            expected.extend([0.0, phi_m, -phi_m]);
        }
        let phases = eig_unitary(&c)?.phases();
        let phase_deviation = phase_multiset_distance(&phases, &expected);
        pass &= product_vs_closed_form <= IDENTITY_TOL && phase_deviation <= IDENTITY_TOL;
        rows.push(Row {
            k: k.as_array(),
            phi,
            phases,
            product_vs_closed_form,
            phase_deviation,
        });
    }
    let text = match format {
        Format::Json => json_text(&rows)?,
        Format::Csv => {
            let dim = if doubled { 6 } else { 3 };
            let mut h = header(&["kx", "ky", "kz", "phi"]);
            h.extend((0..dim).map(|i| format!("phase_{i}")));
            h.extend(header(&["product_vs_closed_form", "phase_deviation"]));
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut v: Vec<String> = r.k.iter().map(|x| fmt_f64(*x)).collect();
                    v.push(fmt_f64(r.phi));
                    v.extend(r.phases.iter().map(|x| fmt_f64(*x)));
                    v.push(fmt_f64(r.product_vs_closed_form));
                    v.push(fmt_f64(r.phase_deviation));
                    v
                })
                .collect();
            csv_text(&h, &body)?
        }
    };
    Ok(Report { text, pass })
}

/// Reads `label,re,im` records (with header).
pub fn read_state_csv(path: &Path, basis: Basis) -> Result<LatticeState1D, CliError> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(validation(format!("{}: expected label,re,im", path.display())));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| validation(format!("bad number {s:?}")));
        records.push((rec[0].to_string(), num(&rec[1])?, num(&rec[2])?));
    }
    Ok(LatticeState1D::from_records(basis, &records)?)
}

#[allow(clippy::too_many_arguments)]
fn run_evolve(
    n: usize,
    theta: f64,
    steps: usize,
    state_in: Option<&Path>,
    species: LatticeArg,
    bmax: usize,
    convention: ConventionArg,
    format: Format,
) -> Result<Report, CliError> {
    let cfg = lattice(species, n, theta, bmax, convention);
    let basis = cfg.basis()?;
    let u = build_evolution(&cfg)?;
    let mut state = match state_in {
        Some(p) => read_state_csv(p, basis)?,
        None => LatticeState1D::single_excitation(basis, 0, true),
    };
    let mut snapshots = vec![(0usize, state.snapshot(1e-15))];
    for step in 1..=steps {
        state = state.evolve(&u);
        snapshots.push((step, state.snapshot(1e-15)));
    }
    let norm_drift = (state.norm() - 1.0).abs();
    let text = match format {
        Format::Json => {
            let steps: Vec<_> = snapshots
                .iter()
                .map(|(s, recs)| {
                    json!({
                        "step": s,
                        "amplitudes": recs.iter().map(|(l, re, im)| json!({"label": l, "re": re, "im": im})).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json_text(&json!({ "norm_drift": norm_drift, "snapshots": steps }))?
        }
        Format::Csv => {
            let body: Vec<Vec<String>> = snapshots
                .iter()
                .flat_map(|(s, recs)| {
                    recs.iter()
                        .map(move |(l, re, im)| vec![s.to_string(), l.clone(), fmt_f64(*re), fmt_f64(*im)])
                })
                .collect();
            csv_text(&header(&["step", "label", "re", "im"]), &body)?
        }
    };
    Ok(Report {
        text,
        pass: norm_drift <= 1e-12,
    })
}

fn run_tau_check(
    n: usize,
    species: LatticeArg,
    bmax: usize,
    theta: f64,
    convention: ConventionArg,
    format: Format,
) -> Result<Report, CliError> {
    let theta = if species == LatticeArg::Boson { 0.0 } else { theta };
    let cfg = lattice(species, n, theta, bmax, convention);
    let defect = time_reversal_defect(&cfg)?;
    let pass = defect <= IDENTITY_TOL;
    #[derive(Serialize)]
    struct Out {
        species: LatticeArg,
        n_sites: usize,
        b_max: Option<usize>,
        theta: f64,
        convention: GateConvention,
        defect: f64,
        tolerance: f64,
        pass: bool,
    }
    let out = Out {
        species,
        n_sites: n,
        b_max: (species == LatticeArg::Boson).then_some(bmax),
        theta,
        convention: cfg.convention,
        defect,
        tolerance: IDENTITY_TOL,
        pass,
    };
    let text = match format {
        Format::Json => json_text(&out)?,
        Format::Csv => csv_text(
            &header(&["species", "n_sites", "b_max", "theta", "convention", "defect", "tolerance", "pass"]),
            &[vec![
                format!("{species:?}").to_lowercase(),
                n.to_string(),
                out.b_max.map(|b| b.to_string()).unwrap_or_default(),
                fmt_f64(theta),
                format!("{:?}", cfg.convention).to_lowercase(),
                fmt_f64(defect),
                fmt_f64(IDENTITY_TOL),
                pass.to_string(),
            ]],
        )?,
    };
    Ok(Report { text, pass })
}

fn run_single_particle(
    n: usize,
    theta: f64,
    species: LatticeArg,
    convention: ConventionArg,
    format: Format,
) -> Result<Report, CliError> {
    let cfg = lattice(species, n, theta, 1, convention);
    let block = single_particle_block(&cfg)?;
    let walk = walk_matrix(&cfg)?;
    let deviation = block.max_abs_diff(&walk);
    let phases = eig_unitary(&block)?.phases();
    let pass = deviation <= IDENTITY_TOL;
    let text = match format {
        Format::Json => json_text(&json!({
            "n_sites": n,
            "theta": theta,
            "max_entry_deviation": deviation,
            "phases": phases,
            "pass": pass,
        }))?,
        Format::Csv => {
            let body: Vec<Vec<String>> = phases.iter().enumerate().map(|(i, p)| vec![i.to_string(), fmt_f64(*p), fmt_f64(deviation)]).collect();
            csv_text(&header(&["index", "phase", "max_entry_deviation"]), &body)?
        }
    };
    Ok(Report { text, pass })
}

#[allow(clippy::too_many_arguments)]
fn run_interact(
    n: usize,
    alpha: C64,
    bmax: usize,
    steps: usize,
    theta: f64,
    range: usize,
    fermions: &Modes,
    bosons: &Modes,
    convention: ConventionArg,
    format: Format,
) -> Result<Report, CliError> {
    let cfg_f = Lattice1DConfig::fermion(n, theta).with_convention(convention.into());
    let cfg_b = Lattice1DConfig::boson(n, bmax);
    let space = JointSpace::new(&cfg_f, &cfg_b)?;
    let mut coeffs = InteractionCoeffs::uniform(alpha);
    coeffs.range = range;
    coeffs.profile = vec![C64::new(1.0, 0.0); range + 1];
    let u_i = interaction_unitary(&cfg_f, &cfg_b, &coeffs)?;
    let step_op = Operator::Product(vec![u_i, space.free_evolution()?]);
    let commutator = translation_commutator(&step_op, &cfg_f, Some(&cfg_b))?;

    let mut f_occ = vec![0u8; cfg_f.n_modes()];
    for &(x, plus) in &fermions.0 {
        if x >= n {
            return Err(validation(format!("fermion site {x} outside the lattice")));
        }
        f_occ[mode_index(x, plus)] = 1;
    }
    let mut b_occ = vec![0u8; cfg_b.n_modes()];
    for &(x, plus) in &bosons.0 {
        if x >= n {
            return Err(validation(format!("boson site {x} outside the lattice")));
        }
        b_occ[mode_index(x, plus)] += 1;
    }
    let idx = space
        .index_of(&f_occ, &b_occ)
        .ok_or_else(|| validation("initial boson number exceeds --bmax"))?;
    let mut psi = vec![C64::new(0.0, 0.0); space.dim()];
    psi[idx] = C64::new(1.0, 0.0);

    #[derive(Serialize)]
    struct Row {
        step: usize,
        k: f64,
        plus: f64,
        minus: f64,
        positive: f64,
        negative: f64,
    }
    let mut rows = Vec::new();
    for step in 0..=steps {
        if step > 0 {
            psi = step_op.apply(&psi);
        }
        for p in negative_mode_population(&psi, &space.boson_basis) {
            rows.push(Row {
                step,
                k: p.k,
                plus: p.plus,
                minus: p.minus,
                positive: p.positive,
                negative: p.negative,
            });
        }
    }
    let pass = commutator <= 1e-10;
    let text = match format {
        Format::Json => json_text(&json!({
            "n_sites": n,
            "b_max": bmax,
            "alpha": [alpha.re, alpha.im],
            "range": range,
            "translation_commutator": commutator,
            "populations": rows,
        }))?,
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.step.to_string(),
                        fmt_f64(r.k),
                        fmt_f64(r.plus),
                        fmt_f64(r.minus),
                        fmt_f64(r.positive),
                        fmt_f64(r.negative),
                    ]
                })
                .collect();
            csv_text(&header(&["step", "k", "plus", "minus", "positive", "negative"]), &body)?
        }
    };
    Ok(Report { text, pass })
}

fn run_toeplitz_matrix(m: usize, n: Option<usize>, format: Format) -> Result<Report, CliError> {
    let spec = match n {
        Some(n) => ToeplitzSpec::finite(m, n),
        None => ToeplitzSpec::infinite(m),
    };
    let rows = dbar_rows(&spec)?;
    let text = match format {
        Format::Json => json_text(&json!({ "M": m, "N": n, "rows": rows }))?,
        Format::Csv => {
            let h: Vec<String> = (0..=m).map(|j| format!("c{j}")).collect();
            let body: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|x| fmt_f64(*x)).collect()).collect();
            csv_text(&h, &body)?
        }
    };
    Ok(Report { text, pass: true })
}

fn series_rows(points: &[(usize, u32, String, String)], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let v: Vec<_> = points
                .iter()
                .map(|(m, d, l, r)| json!({"M": m, "lambda_min": l, "digits_used": d, "residual": r}))
                .collect();
            json_text(&v)
        }
        Format::Csv => {
            let body: Vec<Vec<String>> =
                points.iter().map(|(m, d, l, r)| vec![m.to_string(), l.clone(), d.to_string(), r.clone()]).collect();
            csv_text(&header(&["M", "lambda_min", "digits_used", "residual"]), &body)
        }
    }
}

fn run_mineig(m: usize, digits: Option<u32>, format: Format) -> Result<Report, CliError> {
    let d = digits_for(m, digits)?;
    let a = build_dbar_bigreal(m, d)?;
    let r = min_eigpair(&a, d)?;
    let text = series_rows(&[(m, d, r.lambda_min.to_decimal_string(), r.residual.to_decimal_with(6))], format)?;
    Ok(Report { text, pass: true })
}

fn run_series(m_list: &MList, policy: Option<&str>, format: Format) -> Result<Report, CliError> {
    let policy = match policy {
        Some(p) => p.parse().map_err(validation)?,
        None => default_policy()?,
    };
    let series = min_eig_series(&m_list.0, policy)?;
    let pts: Vec<_> = series
        .iter()
        .map(|p| (p.m, p.result.digits, p.result.lambda_min.to_decimal_string(), p.result.residual.to_decimal_with(6)))
        .collect();
    Ok(Report {
        text: series_rows(&pts, format)?,
        pass: true,
    })
}

/// Reads `(M, λ_min)` pairs from a series CSV.
pub fn read_series_csv(path: &Path) -> Result<Vec<(usize, f64)>, CliError> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| validation(format!("{}: missing column {name}", path.display())))
    };
    let (cm, cl) = (col("M")?, col("lambda_min")?);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let m = rec[cm].trim().parse::<usize>().map_err(|_| validation(format!("bad M {:?}", &rec[cm])))?;
        let l = BigReal::parse(&rec[cl], 40).map_err(validation)?.to_f64();
        out.push((m, l));
    }
    Ok(out)
}

fn fit_text(fit: &FitResult, names: &[&str], extra: serde_json::Value, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut map = serde_json::Map::new();
            for (n, v) in names.iter().zip(&fit.parameters) {
                map.insert(n.to_string(), json!(v));
            }
            map.insert("r_squared".into(), json!(fit.r_squared));
            map.insert("residual_max".into(), json!(fit.residual_max));
            if let serde_json::Value::Object(e) = extra {
                map.extend(e);
            }
            json_text(&serde_json::Value::Object(map))
        }
        Format::Csv => {
            let mut h = header(names);
            h.extend(header(&["r_squared", "residual_max"]));
            let mut row: Vec<String> = fit.parameters.iter().map(|x| fmt_f64(*x)).collect();
            row.push(fmt_f64(fit.r_squared));
            row.push(fmt_f64(fit.residual_max));
            csv_text(&h, &[row])
        }
    }
}

fn run_alpha_fit(series: &Path, min_m: usize, format: Format) -> Result<Report, CliError> {
    let pts: Vec<(f64, f64)> = read_series_csv(series)?
        .into_iter()
        .filter(|(m, _)| *m >= min_m)
        .map(|(m, l)| (m as f64, l))
        .collect();
    let fit = fit_exp_decay(&pts)?;
    let extra = json!({ "n_points": pts.len(), "min_M": min_m });
    Ok(Report {
        text: fit_text(&fit, &["alpha", "log_prefactor"], extra, format)?,
        pass: true,
    })
}

fn run_eigvec(m: usize, digits: Option<u32>, format: Format) -> Result<Report, CliError> {
    let d = digits_for(m, digits)?;
    let r = min_eigpair(&build_dbar_bigreal(m, d)?, d)?;
    let v: Vec<f64> = r.eigenvector.iter().map(BigReal::to_f64).collect();
    let fit = fit_gaussian(&v)?;
    let text = match format {
        Format::Json => json_text(&json!({
            "M": m,
            "digits_used": d,
            "lambda_min": r.lambda_min.to_decimal_string(),
            "residual": r.residual.to_decimal_with(6),
            "eigenvector": r.eigenvector.iter().map(BigReal::to_decimal_string).collect::<Vec<_>>(),
            "gaussian_fit": {
                "amplitude": fit.parameters[0],
                "center": fit.parameters[1],
                "width": fit.parameters[2],
                "r_squared": fit.r_squared,
                "residual_max": fit.residual_max,
            },
        }))?,
        Format::Csv => {
            let body: Vec<Vec<String>> = r
                .eigenvector
                .iter()
                .enumerate()
                .map(|(j, x)| vec![j.to_string(), x.to_decimal_string()])
                .collect();
            csv_text(&header(&["index", "component"]), &body)?
        }
    };
    Ok(Report { text, pass: true })
}

fn run_coupling(m: usize, n: usize, samples: usize, seed: u64, format: Format) -> Result<Report, CliError> {
    let spec = ToeplitzSpec::finite(m, n);
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut pass = true;
    for sample in 0..samples {
        let mut vec = || -> Vec<C64> { (0..=m).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect() };
        let profile = CouplingProfile {
            v_plus: vec(),
            v_minus: vec(),
        };
        let quad = negative_coupling(&profile, &spec)?;
        let direct = momentum_space_coupling(&profile, &spec, 0)?;
        pass &= (quad - direct).abs() <= 1e-10;
        rows.push((sample, quad, direct));
    }
    let text = match format {
        Format::Json => json_text(
            &rows
                .iter()
                .map(|(s, q, d)| json!({"sample": s, "quadratic_form": q, "momentum_sum": d, "difference": (q - d).abs()}))
                .collect::<Vec<_>>(),
        )?,
        Format::Csv => csv_text(
            &header(&["sample", "quadratic_form", "momentum_sum", "difference"]),
            &rows
                .iter()
                .map(|(s, q, d)| vec![s.to_string(), fmt_f64(*q), fmt_f64(*d), fmt_f64((q - d).abs())])
                .collect::<Vec<_>>(),
        )?,
    };
    Ok(Report { text, pass })
}

fn run_finite_size(m: usize, ns: &[usize], format: Format) -> Result<Report, CliError> {
    let mut rows: Vec<(usize, f64, Option<f64>)> = Vec::new();
    for &n in ns {
        let norm = finite_size_correction(m, n)?;
        let ratio = rows.last().map(|(_, prev, _)| prev / norm);
        rows.push((n, norm, ratio));
    }
    let text = match format {
        Format::Json => json_text(
            &rows
                .iter()
                .map(|(n, v, r)| json!({"N": n, "difference_norm": v, "shrink_factor": r}))
                .collect::<Vec<_>>(),
        )?,
        Format::Csv => csv_text(
            &header(&["N", "difference_norm", "shrink_factor"]),
            &rows
                .iter()
                .map(|(n, v, r)| vec![n.to_string(), fmt_f64(*v), r.map(fmt_f64).unwrap_or_default()])
                .collect::<Vec<_>>(),
        )?,
    };
    Ok(Report { text, pass: true })
}

/// Random symmetric positive definite `n×n` matrix `GGᵀ/n + I/20`.
pub fn random_spd_rows(n: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let g: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let dot: f64 = (0..n).map(|k| g[i][k] * g[j][k]).sum();
                    dot / n as f64 + if i == j { 0.05 } else { 0.0 }
                })
                .collect()
        })
        .collect()
}

/// Largest deviation between multiprecision and double eigenvalues:
/// `(max |Δλ|/|λ|, max |Δλ|/‖A‖₂)`.
pub fn eigen_crosscheck(rows: &[Vec<f64>], digits: u32) -> Result<(f64, f64), CliError> {
    let big = BigSymMatrix::from_f64_rows(rows, digits)?;
    let hp: Vec<f64> = eigenvalues_sturm(&big)?.iter().map(BigReal::to_f64).collect();
    let dp = eig_hermitian(&ComplexMatrix::from_real_rows(rows))?.real_values();
    let norm = hp.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut rel: f64 = 0.0;
    let mut normwise: f64 = 0.0;
    for (a, b) in hp.iter().zip(&dp) {
        rel = rel.max((a - b).abs() / a.abs());
        normwise = normwise.max((a - b).abs() / norm);
    }
    Ok((rel, normwise))
}

fn run_crosscheck(max_m: usize, random: usize, seed: u64, digits: u32, format: Format) -> Result<Report, CliError> {
    let mut rows = Vec::new();
    let mut pass = true;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random {
        let a = random_spd_rows(20, &mut rng);
        let (rel, normwise) = eigen_crosscheck(&a, digits)?;
        pass &= rel <= 1e-10;
        rows.push((format!("random_{i}"), 20usize, rel, normwise));
    }
    for m in (0..=max_m).step_by(2) {
        let a = dbar_rows(&ToeplitzSpec::infinite(m))?;
        let (rel, normwise) = eigen_crosscheck(&a, digits)?;
        pass &= normwise <= 1e-10;
        rows.push((format!("dbar_M{m}"), m + 1, rel, normwise));
    }
    let text = match format {
        Format::Json => json_text(
            &rows
                .iter()
                .map(|(c, n, r, w)| json!({"case": c, "n": n, "max_relative": r, "max_normwise": w}))
                .collect::<Vec<_>>(),
        )?,
        Format::Csv => csv_text(
            &header(&["case", "n", "max_relative", "max_normwise"]),
            &rows
                .iter()
                .map(|(c, n, r, w)| vec![c.clone(), n.to_string(), fmt_f64(*r), fmt_f64(*w)])
                .collect::<Vec<_>>(),
        )?,
    };
    Ok(Report { text, pass })
}

fn run_ftilde(terms: usize, kgrid: &Grid, format: Format) -> Result<Report, CliError> {
    let rows: Vec<(f64, f64, f64)> = kgrid
        .points()
        .into_iter()
        .map(|k| Ok((k, f_tilde(k, terms)?, f_tilde_limit(k))))
        .collect::<Result<_, ToeplitzError>>()?;
    let text = match format {
        Format::Json => json_text(&json!({
            "terms": terms,
            "min": rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
            "points": rows.iter().map(|(k, f, l)| json!({"k": k, "f_tilde": f, "limit": l})).collect::<Vec<_>>(),
        }))?,
        Format::Csv => csv_text(
            &header(&["k", "f_tilde", "limit"]),
            &rows.iter().map(|(k, f, l)| vec![fmt_f64(*k), fmt_f64(*f), fmt_f64(*l)]).collect::<Vec<_>>(),
        )?,
    };
    Ok(Report { text, pass: true })
}

fn command_name(cmd: &Command) -> String {
    match cmd {
        Command::Equalnorm { .. } => "equalnorm".into(),
        Command::Dispersion { .. } => "dispersion".into(),
        Command::Qca3dEig { .. } => "qca3d-eig".into(),
        Command::Ftilde { .. } => "ftilde".into(),
        Command::Qca1d { command } => {
            let sub = match command {
                Qca1dCommand::Evolve { .. } => "evolve",
                Qca1dCommand::TauCheck { .. } => "tau-check",
                Qca1dCommand::SingleParticle { .. } => "single-particle",
                Qca1dCommand::Interact { .. } => "interact",
            };
            format!("qca1d {sub}")
        }
        Command::Toeplitz { command } => {
            let sub = match command {
                ToeplitzCommand::Matrix { .. } => "matrix",
                ToeplitzCommand::Mineig { .. } => "mineig",
                ToeplitzCommand::Series { .. } => "series",
                ToeplitzCommand::AlphaFit { .. } => "alpha-fit",
                ToeplitzCommand::Eigvec { .. } => "eigvec",
                ToeplitzCommand::Coupling { .. } => "coupling",
                ToeplitzCommand::FiniteSize { .. } => "finite-size",
                ToeplitzCommand::Crosscheck { .. } => "crosscheck",
            };
            format!("toeplitz {sub}")
        }
    }
}

/// Runs a parsed command and returns its rendered output.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let f = cli.format;
    match &cli.command {
        Command::Equalnorm { species } => run_equalnorm(*species, f),
        Command::Dispersion { species, theta, kgrid, direction, random, seed } => {
            run_dispersion(*species, *theta, kgrid, direction, *random, *seed, f)
        }
        Command::Qca3dEig { kgrid, direction, doubled } => run_qca3d(kgrid, direction, *doubled, f),
        Command::Ftilde { terms, kgrid } => run_ftilde(*terms, kgrid, f),
        Command::Qca1d { command } => match command {
            Qca1dCommand::Evolve { n, theta, steps, state_in, species, bmax, convention } => {
                run_evolve(*n, *theta, *steps, state_in.as_deref(), *species, *bmax, *convention, f)
            }
            Qca1dCommand::TauCheck { n, species, bmax, theta, convention } => {
                run_tau_check(*n, *species, *bmax, *theta, *convention, f)
            }
            Qca1dCommand::SingleParticle { n, theta, species, convention } => {
                run_single_particle(*n, *theta, *species, *convention, f)
            }
            Qca1dCommand::Interact { n, alpha, alpha_im, bmax, steps, theta, range, fermions, bosons, convention } => {
                run_interact(*n, C64::new(*alpha, *alpha_im), *bmax, *steps, *theta, *range, fermions, bosons, *convention, f)
            }
        },
        Command::Toeplitz { command } => match command {
            ToeplitzCommand::Matrix { m, n } => run_toeplitz_matrix(*m, *n, f),
            ToeplitzCommand::Mineig { m, digits } => run_mineig(*m, *digits, f),
            ToeplitzCommand::Series { m_list, policy } => run_series(m_list, policy.as_deref(), f),
            ToeplitzCommand::AlphaFit { series, min_m } => run_alpha_fit(series, *min_m, f),
            ToeplitzCommand::Eigvec { m, digits } => run_eigvec(*m, *digits, f),
            ToeplitzCommand::Coupling { m, n, samples, seed } => run_coupling(*m, *n, *samples, *seed, f),
            ToeplitzCommand::FiniteSize { m, n } => run_finite_size(*m, n, f),
            ToeplitzCommand::Crosscheck { max_m, random, seed, digits } => {
                run_crosscheck(*max_m, *random, *seed, *digits, f)
            }
        },
    }
}

/// Parses arguments, runs the command, writes outputs and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let start = Instant::now();
    let result = execute(&cli).and_then(|report| {
        let mut outputs = Vec::new();
        match &cli.out {
            Some(path) => {
                std::fs::write(path, &report.text)?;
                outputs.push(path.display().to_string());
            }
            None => print!("{}", report.text),
        }
        Ok((report.pass, outputs))
    });
    let (code, pass, outputs) = match result {
        Ok((pass, outputs)) => (0, pass, outputs),
        Err(e) => {
            eprintln!("{e}");
            (e.exit_code(), false, Vec::new())
        }
    };
    if let Some(path) = &cli.record {
        let record = ExperimentRecord {
            command: command_name(&cli.command),
            parameters: parameter_map(&cli.command),
            outputs,
            wall_time: start.elapsed().as_secs_f64(),
            pass,
        };
        let written = json_text(&record).and_then(|t| std::fs::write(path, t).map_err(internal));
        if let Err(e) = written {
            eprintln!("{e}");
            return 1;
        }
    }
    code
}

/// Flag values of a command keyed by flag name. Unset options are omitted.
pub fn parameter_map(cmd: &Command) -> BTreeMap<String, String> {
    fn walk(key: &str, v: &serde_json::Value, out: &mut BTreeMap<String, String>) {
        match v {
            serde_json::Value::Object(m) => {
                for (k, v) in m {
                    walk(k, v, out);
                }
            }
            serde_json::Value::Null => {}
            serde_json::Value::String(s) => {
                out.insert(key.to_string(), s.clone());
            }
            other => {
                out.insert(key.to_string(), other.to_string());
            }
        }
    }
    let mut out = BTreeMap::new();
    if let Ok(v) = serde_json::to_value(cmd) {
        walk("", &v, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0:1:5".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!("0.3".parse::<Grid>().unwrap().points(), vec![0.3]);
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
    }

    #[test]
    fn mlist_parsing() {
        assert_eq!("20:32:4".parse::<MList>().unwrap().0, vec![20, 24, 28, 32]);
        assert_eq!("4,8".parse::<MList>().unwrap().0, vec![4, 8]);
        assert!("8:4:2".parse::<MList>().is_err());
    }

    #[test]
    fn modes_parsing() {
        assert_eq!("0+,3-".parse::<Modes>().unwrap().0, vec![(0, true), (3, false)]);
        assert!("2".parse::<Modes>().is_err());
        assert!("".parse::<Modes>().unwrap().0.is_empty());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["qca-lab", "toeplitz", "matrix", "--M", "3"]), 2);
        assert_eq!(run(["qca-lab", "no-such-command"]), 2);
        assert_eq!(run(["qca-lab", "toeplitz", "matrix", "--M", "2", "--out", "/nonexistent/dir/x.csv"]), 1);
    }

    #[test]
    fn parameter_map_flattens() {
        let cli = Cli::try_parse_from(["qca-lab", "toeplitz", "mineig", "--M", "4"]).unwrap();
        let map = parameter_map(&cli.command);
        assert_eq!(map.get("m").map(String::as_str), Some("4"));
        assert!(!map.contains_key("digits"));
        let cli = Cli::try_parse_from(["qca-lab", "equalnorm", "--species", "boson"]).unwrap();
        assert_eq!(parameter_map(&cli.command).get("species").map(String::as_str), Some("boson"));
    }
}
