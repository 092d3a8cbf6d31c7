//! Scenario files: TOML with a versioned `schema` key, shared medium, source,
//! grid, weight and quadrature tables, and one optional table per experiment.

use drude_spectral::fdtd_oracle::Sponge;
use drude_spectral::fields::{Grid2, SourceKind, WeightParams};
use drude_spectral::quadrature::QuadConfig;
use drude_spectral::MediumParams;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Accepted value of the `schema` key.
pub const SCHEMA: &str = "drude-scenario/1";

/// Why a scenario was rejected before any computation started.
#[derive(Debug, Error)]
pub enum ConfigError {
    /// The file could not be read.
    #[error("cannot read {path}: {source}")]
    Read {
        /// Offending path.
        path: PathBuf,
        /// Underlying failure.
        source: std::io::Error,
    },
    /// The file is not valid TOML or does not match the schema.
    #[error("{0}")]
    Parse(String),
    /// A field parsed but holds an unusable value.
    #[error("{field}: {reason}")]
    Invalid {
        /// Dotted path of the field.
        field: String,
        /// What is wrong with it.
        reason: String,
    },
}

fn invalid<T>(field: &str, reason: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid { field: field.into(), reason: reason.into() })
}

/// Experiment selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// Plasmonic dispersion and Ω_p asymptotics.
    Dispersion,
    /// Cross-sections of one generalized eigenfunction.
    Modes,
    /// Parseval and reconstruction defects of the transform.
    Parseval,
    /// Spectral density sweep and band measures.
    Density,
    /// Hölder exponent of the spectral density.
    Hoelder,
    /// Threshold behavior at Ω_p.
    Threshold,
    /// Limiting absorption.
    Absorb,
    /// Spectral time evolution.
    Evolve,
    /// Time-domain oracle run.
    Oracle,
    /// Spectral evolution against the oracle.
    OracleCompare,
    /// Linear growth at Ω_p in the critical case.
    Resonance,
    /// Two-tone beats in the critical case.
    Beats,
}

impl Experiment {
    /// Name used for subcommands, tables and output directories.
    pub fn name(self) -> &'static str {
        match self {
            Self::Dispersion => "dispersion",
            Self::Modes => "modes",
            Self::Parseval => "parseval",
            Self::Density => "density",
            Self::Hoelder => "hoelder",
            Self::Threshold => "threshold",
            Self::Absorb => "absorb",
            Self::Evolve => "evolve",
            Self::Oracle => "oracle",
            Self::OracleCompare => "oracle-compare",
            Self::Resonance => "resonance",
            Self::Beats => "beats",
        }
    }
}

/// Medium presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// ε0 = μ0 = 1, Ω_e = √2, Ω_m = 1.
    #[default]
    NonCritical,
    /// ε0 = μ0 = 1, Ω_e = Ω_m = `omega`.
    Critical,
    /// All four constants given explicitly.
    Custom,
}

/// `[medium]` table.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct MediumSpec {
    /// Preset selector.
    pub preset: Preset,
    /// Common plasma frequency of the critical preset (default 1).
    pub omega: Option<f64>,
    /// ε0 (custom only).
    pub eps0: Option<f64>,
    /// μ0 (custom only).
    pub mu0: Option<f64>,
    /// Ω_e (custom only).
    pub omega_e: Option<f64>,
    /// Ω_m (custom only).
    pub omega_m: Option<f64>,
}

impl MediumSpec {
    fn resolve(&self) -> Result<MediumParams, ConfigError> {
        let custom = [("eps0", self.eps0), ("mu0", self.mu0), ("omega_e", self.omega_e), ("omega_m", self.omega_m)];
        match self.preset {
            Preset::Custom => {
                let mut v = [0.0; 4];
                for (slot, (name, value)) in v.iter_mut().zip(custom) {
                    match value {
                        Some(x) if x.is_finite() && x > 0.0 => *slot = x,
                        Some(x) => return invalid(&format!("medium.{name}"), format!("must be finite and > 0, got {x}")),
                        None => return invalid(&format!("medium.{name}"), "required with preset = \"custom\""),
                    }
                }
                Ok(MediumParams { eps0: v[0], mu0: v[1], omega_e: v[2], omega_m: v[3] })
            }
            preset => {
                if let Some((name, _)) = custom.iter().find(|(_, v)| v.is_some()) {
                    return invalid(&format!("medium.{name}"), "only used with preset = \"custom\"");
                }
                if preset == Preset::NonCritical {
                    if self.omega.is_some() {
                        return invalid("medium.omega", "only used with preset = \"critical\"");
                    }
                    return Ok(MediumParams::non_critical());
                }
                let w = self.omega.unwrap_or(1.0);
                if !(w.is_finite() && w > 0.0) {
                    return invalid("medium.omega", format!("must be finite and > 0, got {w}"));
                }
                Ok(MediumParams::critical(w))
            }
        }
    }
}

/// Source profile kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SourceProfile {
    /// Gaussian in E.
    #[default]
    GaussianE,
    /// Gaussian ring in E.
    RingE,
}

/// `[source]` table: an E-only profile sampled on its own grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceSpec {
    /// Profile kind.
    pub kind: SourceProfile,
    /// Ring radius (ring-e only).
    pub radius: Option<f64>,
    /// Center.
    pub center: [f64; 2],
    /// Width.
    pub width: f64,
    /// Peak amplitude.
    pub amplitude: f64,
    /// Half-width of the source grid.
    pub half_width: f64,
    /// Spacing of the source grid.
    pub h: f64,
}

impl Default for SourceSpec {
    fn default() -> Self {
        Self { kind: SourceProfile::GaussianE, radius: None, center: [0.4, -0.3], width: 0.7, amplitude: 1.0, half_width: 3.5, h: 0.1 }
    }
}

impl SourceSpec {
    /// Library source kind.
    pub fn source_kind(&self) -> SourceKind {
        match self.kind {
            SourceProfile::GaussianE => SourceKind::GaussianE,
            SourceProfile::RingE => SourceKind::RingE { radius: self.radius.unwrap_or(0.0) },
        }
    }

    /// Center as a tuple.
    pub fn center(&self) -> (f64, f64) {
        (self.center[0], self.center[1])
    }
}

/// `[grid]` table: the observation grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Half-width of the square grid.
    pub half_width: f64,
    /// Spacing.
    pub h: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { half_width: 8.0, h: 0.2 }
    }
}

/// `[weight]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightSpec {
    /// Exponent s of the local norms.
    pub s: f64,
}

impl Default for WeightSpec {
    fn default() -> Self {
        Self { s: 1.0 }
    }
}

/// A frequency given by value or by the name of a distinguished frequency.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Frequency {
    /// Explicit value.
    Value(f64),
    /// `"omega_p"`, `"omega_c"`, `"omega_e"` or `"omega_m"`.
    Named(String),
}

impl Frequency {
    fn resolve(&self, p: &MediumParams, field: &str) -> Result<f64, ConfigError> {
        match self {
            Self::Value(v) if v.is_finite() => Ok(*v),
            Self::Value(v) => invalid(field, format!("must be finite, got {v}")),
            Self::Named(n) => match n.as_str() {
                "omega_p" => Ok(p.omega_p()),
                "omega_c" => Ok(p.omega_c()),
                "omega_e" => Ok(p.omega_e),
                "omega_m" => Ok(p.omega_m),
                other => invalid(field, format!("unknown frequency name {other:?} (expected omega_p, omega_c, omega_e or omega_m)")),
            },
        }
    }
}

/// `[dispersion]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionSpec {
    /// Smallest |λ − Ω_p|.
    pub distance_min: f64,
    /// Largest |λ − Ω_p|.
    pub distance_max: f64,
    /// Log-spaced sample count.
    pub points: usize,
    /// Allowed deviation of each fitted slope.
    pub slope_tol: f64,
    /// Allowed relative deviation of each fitted prefactor.
    pub prefactor_rel: f64,
}

impl Default for DispersionSpec {
    fn default() -> Self {
        Self { distance_min: 1e-6, distance_max: 1e-2, points: 21, slope_tol: 0.02, prefactor_rel: 0.01 }
    }
}

/// Mode branch selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Bulk mode W_{k,λ,j}.
    Bulk,
    /// Plasmon on the positive frequency branch.
    #[default]
    PlasmonPositive,
    /// Plasmon on the negative frequency branch.
    PlasmonNegative,
}

/// `[modes]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModesSpec {
    /// Branch.
    pub branch: Branch,
    /// Wavenumber k.
    pub k: f64,
    /// Frequency λ (bulk only).
    pub lambda: Option<f64>,
    /// Mode label j (bulk only).
    pub j: i8,
    /// Left end of the cross-section.
    pub x_min: f64,
    /// Right end of the cross-section.
    pub x_max: f64,
    /// Sample count of the cross-section.
    pub points: usize,
    /// Height y of the cross-section.
    pub y: f64,
    /// Smallest accepted convergence order of the finite-difference residual.
    pub order_min: f64,
    /// Largest accepted jump of E and H_y across x = 0 (relative).
    pub jump_max: f64,
}

impl Default for ModesSpec {
    fn default() -> Self {
        Self { branch: Branch::PlasmonPositive, k: 1.0, lambda: None, j: 1, x_min: -3.0, x_max: 3.0, points: 241, y: 0.0, order_min: 1.9, jump_max: 1e-12 }
    }
}

/// `[parseval]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParsevalSpec {
    /// Also run with the source grid spacing halved and the spectral mesh refined,
    /// and require both defects to decrease.
    pub refine: bool,
    /// Largest accepted Parseval defect.
    pub defect_max: f64,
    /// Largest accepted reconstruction error.
    pub reconstruction_max: f64,
}

impl Default for ParsevalSpec {
    fn default() -> Self {
        Self { refine: true, defect_max: 1e-2, reconstruction_max: 3e-2 }
    }
}

/// `[density]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensitySpec {
    /// Lower end of the λ sweep.
    pub lambda_min: f64,
    /// Upper end of the λ sweep.
    pub lambda_max: f64,
    /// Sweep sample count.
    pub points: usize,
    /// Disjoint bands checked against the Parseval band energy.
    pub bands: Vec<[f64; 2]>,
    /// Smallest accepted density value.
    pub floor: f64,
    /// Largest accepted relative band disagreement.
    pub agreement: f64,
}

impl Default for DensitySpec {
    fn default() -> Self {
        Self { lambda_min: 0.05, lambda_max: 3.0, points: 24, bands: vec![[0.05, 0.7], [0.72, 0.99], [1.01, 3.0]], floor: -1e-8, agreement: 3e-2 }
    }
}

/// `[hoelder]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HoelderSpec {
    /// Base frequency.
    pub lambda: Frequency,
    /// Offsets δ (signed).
    pub deltas: Vec<f64>,
    /// Smallest accepted exponent.
    pub gamma_min: f64,
    /// Largest accepted exponent.
    pub gamma_max: Option<f64>,
}

impl Default for HoelderSpec {
    fn default() -> Self {
        Self { lambda: Frequency::Value(1.2), deltas: vec![1e-2, 5e-3, 2e-3, 1e-3], gamma_min: 0.9, gamma_max: None }
    }
}

/// `[threshold]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdSpec {
    /// Smallest |λ − Ω_p|.
    pub distance_min: f64,
    /// Largest |λ − Ω_p|.
    pub distance_max: f64,
    /// Log-spaced sample count.
    pub points: usize,
    /// Allowed deviation of each fitted slope.
    pub slope_tol: f64,
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        Self { distance_min: 1e-4, distance_max: 1e-2, points: 9, slope_tol: 0.15 }
    }
}

/// `[absorb]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbsorbSpec {
    /// Frequency ω > 0.
    pub omega: f64,
    /// Absorption parameters η of the convergence table.
    pub etas: Vec<f64>,
    /// Largest accepted Helmholtz residual.
    pub helmholtz_max: f64,
    /// Largest accepted relative error of (R(ω+iη) − R(ω−iη))G against 2πiM_ωG at the smallest η.
    pub side_max: f64,
}

impl Default for AbsorbSpec {
    fn default() -> Self {
        Self { omega: 1.2, etas: vec![1e-1, 1e-2, 1e-3, 1e-4], helmholtz_max: 5e-2, side_max: 1e-2 }
    }
}

/// `[evolve]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSpec {
    /// Forcing frequency ω.
    pub omega: Frequency,
    /// Spacing of the norm samples.
    pub t_step: f64,
    /// Last norm sample.
    pub t_end: f64,
    /// Probe points.
    pub probes: Vec<[f64; 2]>,
    /// Spacing of the probe series (default `t_step`).
    pub probe_step: Option<f64>,
    /// Record gap(t) and require gap(gap_from)/gap(t_end) ≥ gap_factor.
    pub gap: bool,
    /// First time of the gap check.
    pub gap_from: f64,
    /// Required fall of gap(t).
    pub gap_factor: f64,
}

impl Default for EvolveSpec {
    fn default() -> Self {
        Self {
            omega: Frequency::Value(1.0),
            t_step: 25.0,
            t_end: 200.0,
            probes: vec![[0.3, 0.0]],
            probe_step: None,
            gap: true,
            gap_from: 50.0,
            gap_factor: 2.0,
        }
    }
}

/// Time-domain mesh shared by the oracle experiments.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct YeeSpec {
    /// Mesh width.
    pub h: f64,
    /// Domain half-width; default: free of boundary reflections up to the last time.
    pub half_width: Option<f64>,
    /// Fraction of the stability limit.
    pub cfl: f64,
    /// Optional absorbing layer.
    pub sponge: Option<Sponge>,
}

impl Default for YeeSpec {
    fn default() -> Self {
        Self { h: 0.05, half_width: None, cfl: 0.9, sponge: None }
    }
}

/// `[oracle]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSpec {
    /// Forcing frequency ω.
    pub omega: Frequency,
    /// Spacing of the norm samples.
    pub t_step: f64,
    /// Last norm sample.
    pub t_end: f64,
    /// Probe points.
    pub probes: Vec<[f64; 2]>,
    /// Mesh.
    pub yee: YeeSpec,
    /// Largest accepted scaled discrete divergence.
    pub div_max: f64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self { omega: Frequency::Value(1.0), t_step: 5.0, t_end: 60.0, probes: vec![[0.3, 0.0]], yee: YeeSpec::default(), div_max: 1e-10 }
    }
}

/// `[oracle-compare]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSpec {
    /// Forcing frequency ω.
    pub omega: Frequency,
    /// Spacing of the samples.
    pub t_step: f64,
    /// Last sample.
    pub t_end: f64,
    /// Mesh.
    pub yee: YeeSpec,
    /// Largest accepted relative H_{−s} discrepancy.
    pub discrepancy_max: f64,
    /// Largest accepted scaled discrete divergence.
    pub div_max: f64,
}

impl Default for CompareSpec {
    fn default() -> Self {
        Self { omega: Frequency::Value(1.0), t_step: 5.0, t_end: 60.0, yee: YeeSpec::default(), discrepancy_max: 0.05, div_max: 1e-10 }
    }
}

/// `[resonance]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResonanceSpec {
    /// Spacing of the samples.
    pub t_step: f64,
    /// Last sample.
    pub t_end: f64,
    /// Start of the slope fit.
    pub fit_from: f64,
    /// Mesh.
    pub yee: YeeSpec,
    /// Allowed relative deviation of ‖U(t_end)‖/(t_end‖P G‖) from 1.
    pub ratio_tol: f64,
    /// Allowed relative disagreement of the two slopes.
    pub slope_tol: f64,
}

impl Default for ResonanceSpec {
    fn default() -> Self {
        Self {
            t_step: 25.0,
            t_end: 300.0,
            fit_from: 100.0,
            yee: YeeSpec { h: 0.1, half_width: Some(30.0), cfl: 0.9, sponge: Some(Sponge { width: 8.0, strength: 2.0 }) },
            ratio_tol: 0.05,
            slope_tol: 0.10,
        }
    }
}

/// `[beats]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeatsSpec {
    /// Forcing frequency ω ≠ Ω_p.
    pub omega: f64,
    /// Probe point.
    pub probe: [f64; 2],
    /// Record start.
    pub t_start: f64,
    /// Record end.
    pub t_end: f64,
    /// Sampling interval.
    pub dt: f64,
    /// Peaks below this fraction of the strongest are ignored.
    pub peak_floor: f64,
}

impl Default for BeatsSpec {
    fn default() -> Self {
        Self { omega: 0.9, probe: [0.3, 0.0], t_start: 50.0, t_end: 250.0, dt: 1.0, peak_floor: 0.1 }
    }
}

/// A parsed scenario file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Must equal [`SCHEMA`].
    pub schema: String,
    /// Output directory (overridden by `DRUDE_OUT`).
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Medium.
    #[serde(default)]
    pub medium: MediumSpec,
    /// Source.
    #[serde(default)]
    pub source: SourceSpec,
    /// Observation grid.
    #[serde(default)]
    pub grid: GridSpec,
    /// Weight exponent.
    #[serde(default)]
    pub weight: WeightSpec,
    /// Quadrature settings.
    #[serde(default)]
    pub quadrature: QuadConfig,
    /// Dispersion settings.
    #[serde(default)]
    pub dispersion: DispersionSpec,
    /// Mode settings.
    #[serde(default)]
    pub modes: ModesSpec,
    /// Parseval settings.
    #[serde(default)]
    pub parseval: ParsevalSpec,
    /// Density settings.
    #[serde(default)]
    pub density: DensitySpec,
    /// Hölder settings.
    #[serde(default)]
    pub hoelder: HoelderSpec,
    /// Threshold settings.
    #[serde(default)]
    pub threshold: ThresholdSpec,
    /// Limiting-absorption settings.
    #[serde(default)]
    pub absorb: AbsorbSpec,
    /// Evolution settings.
    #[serde(default)]
    pub evolve: EvolveSpec,
    /// Oracle settings.
    #[serde(default)]
    pub oracle: OracleSpec,
    /// Comparison settings.
    #[serde(default, rename = "oracle-compare")]
    pub oracle_compare: CompareSpec,
    /// Resonance settings.
    #[serde(default)]
    pub resonance: ResonanceSpec,
    /// Beat settings.
    #[serde(default)]
    pub beats: BeatsSpec,
}

/// A scenario with its derived, validated quantities.
#[derive(Debug, Clone)]
pub struct Resolved {
    /// The parsed file.
    pub scenario: Scenario,
    /// Medium constants.
    pub params: MediumParams,
    /// Source grid.
    pub source_grid: Grid2,
    /// Observation grid.
    pub grid: Grid2,
    /// Weight.
    pub weight: WeightParams,
    /// Output directory before the experiment subdirectory.
    pub output_dir: PathBuf,
    /// File name of the scenario (recorded in the artifacts).
    pub source_name: String,
}

/// Reads, parses and validates a scenario for one experiment.
pub fn load(path: &Path, experiment: Experiment, out_override: Option<PathBuf>) -> Result<Resolved, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    let scenario: Scenario = toml::from_str(&text).map_err(|e| ConfigError::Parse(format!("{}: {}", path.display(), e)))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    resolve(scenario, experiment, out_override, name)
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        invalid(field, format!("must be finite and > 0, got {v}"))
    }
}

fn at_least(field: &str, v: usize, min: usize) -> Result<(), ConfigError> {
    if v >= min {
        Ok(())
    } else {
        invalid(field, format!("must be at least {min}, got {v}"))
    }
}

fn distance_range(prefix: &str, lo: f64, hi: f64) -> Result<(), ConfigError> {
    positive(&format!("{prefix}.distance_min"), lo)?;
    if !(hi > lo && hi.is_finite()) {
        return invalid(&format!("{prefix}.distance_max"), "must exceed distance_min");
    }
    Ok(())
}

fn schedule(prefix: &str, step: f64, end: f64) -> Result<(), ConfigError> {
    positive(&format!("{prefix}.t_step"), step)?;
    if !(end >= step && end.is_finite()) {
        return invalid(&format!("{prefix}.t_end"), "must be at least t_step");
    }
    Ok(())
}

fn yee(prefix: &str, y: &YeeSpec) -> Result<(), ConfigError> {
    positive(&format!("{prefix}.yee.h"), y.h)?;
    if !(y.cfl > 0.0 && y.cfl <= 1.0) {
        return invalid(&format!("{prefix}.yee.cfl"), format!("must lie in (0, 1], got {}", y.cfl));
    }
    if let Some(l) = y.half_width {
        positive(&format!("{prefix}.yee.half_width"), l)?;
    }
    if let Some(s) = y.sponge {
        positive(&format!("{prefix}.yee.sponge.width"), s.width)?;
        positive(&format!("{prefix}.yee.sponge.strength"), s.strength)?;
    }
    Ok(())
}

fn requires_critical(p: &MediumParams, what: &str) -> Result<(), ConfigError> {
    if p.is_critical() {
        Ok(())
    } else {
        invalid("medium.preset", format!("{what} requires critical parameters (Ω_e = Ω_m)"))
    }
}

fn requires_non_critical(p: &MediumParams, what: &str) -> Result<(), ConfigError> {
    if p.is_critical() {
        invalid("medium.preset", format!("{what} requires non-critical parameters (Ω_e ≠ Ω_m)"))
    } else {
        Ok(())
    }
}

/// Validates a parsed scenario for one experiment.
pub fn resolve(scenario: Scenario, experiment: Experiment, out_override: Option<PathBuf>, source_name: String) -> Result<Resolved, ConfigError> {
    if scenario.schema != SCHEMA {
        return invalid("schema", format!("expected {SCHEMA:?}, got {:?}", scenario.schema));
    }
    let p = scenario.medium.resolve()?;
    let src = &scenario.source;
    positive("source.width", src.width)?;
    positive("source.half_width", src.half_width)?;
    if !src.amplitude.is_finite() {
        return invalid("source.amplitude", "must be finite");
    }
    match (src.kind, src.radius) {
        (SourceProfile::RingE, Some(r)) => positive("source.radius", r)?,
        (SourceProfile::RingE, None) => return invalid("source.radius", "required with kind = \"ring-e\""),
        (SourceProfile::GaussianE, Some(_)) => return invalid("source.radius", "only used with kind = \"ring-e\""),
        (SourceProfile::GaussianE, None) => {}
    }
    let source_grid = Grid2::square(src.half_width, src.h).map_err(|e| ConfigError::Invalid { field: "source.h".into(), reason: e.to_string() })?;
    let grid = Grid2::square(scenario.grid.half_width, scenario.grid.h).map_err(|e| ConfigError::Invalid { field: "grid.h".into(), reason: e.to_string() })?;
    let weight = WeightParams::new(scenario.weight.s).map_err(|e| ConfigError::Invalid { field: "weight.s".into(), reason: e.to_string() })?;
    scenario.quadrature.validate().map_err(|e| ConfigError::Invalid { field: "quadrature".into(), reason: e.to_string() })?;
    let s = &scenario;
    match experiment {
        Experiment::Dispersion => {
            requires_non_critical(&p, "dispersion")?;
            distance_range("dispersion", s.dispersion.distance_min, s.dispersion.distance_max)?;
            at_least("dispersion.points", s.dispersion.points, 4)?;
            positive("dispersion.slope_tol", s.dispersion.slope_tol)?;
            positive("dispersion.prefactor_rel", s.dispersion.prefactor_rel)?;
        }
        Experiment::Modes => {
            let m = &s.modes;
            if !m.k.is_finite() {
                return invalid("modes.k", "must be finite");
            }
            match (m.branch, m.lambda) {
                (Branch::Bulk, None) => return invalid("modes.lambda", "required with branch = \"bulk\""),
                (Branch::Bulk, Some(l)) if !l.is_finite() => return invalid("modes.lambda", "must be finite"),
                (Branch::PlasmonPositive | Branch::PlasmonNegative, Some(_)) => return invalid("modes.lambda", "only used with branch = \"bulk\""),
                _ => {}
            }
            if !(m.x_max > m.x_min) {
                return invalid("modes.x_max", "must exceed x_min");
            }
            at_least("modes.points", m.points, 2)?;
            positive("modes.order_min", m.order_min)?;
            positive("modes.jump_max", m.jump_max)?;
        }
        Experiment::Parseval => {
            positive("parseval.defect_max", s.parseval.defect_max)?;
            positive("parseval.reconstruction_max", s.parseval.reconstruction_max)?;
        }
        Experiment::Density => {
            let d = &s.density;
            positive("density.lambda_min", d.lambda_min)?;
            if !(d.lambda_max > d.lambda_min && d.lambda_max.is_finite()) {
                return invalid("density.lambda_max", "must exceed lambda_min");
            }
            at_least("density.points", d.points, 1)?;
            if d.bands.is_empty() {
                return invalid("density.bands", "at least one band is required");
            }
            for (i, b) in d.bands.iter().enumerate() {
                if !(b[0] > 0.0 && b[1] > b[0] && b[1].is_finite()) {
                    return invalid(&format!("density.bands[{i}]"), "needs 0 < lo < hi");
                }
            }
            if !(d.floor.is_finite() && d.floor <= 0.0) {
                return invalid("density.floor", "must be finite and ≤ 0");
            }
            positive("density.agreement", d.agreement)?;
        }
        Experiment::Hoelder => {
            let l = s.hoelder.lambda.resolve(&p, "hoelder.lambda")?;
            positive("hoelder.lambda", l)?;
            if s.hoelder.deltas.len() < 2 {
                return invalid("hoelder.deltas", "at least two offsets are required");
            }
            if s.hoelder.deltas.iter().any(|d| !(d.is_finite() && *d != 0.0)) {
                return invalid("hoelder.deltas", "offsets must be finite and non-zero");
            }
            positive("hoelder.gamma_min", s.hoelder.gamma_min)?;
            if let Some(g) = s.hoelder.gamma_max {
                if !(g >= s.hoelder.gamma_min) {
                    return invalid("hoelder.gamma_max", "must be at least gamma_min");
                }
            }
        }
        Experiment::Threshold => {
            requires_non_critical(&p, "threshold")?;
            distance_range("threshold", s.threshold.distance_min, s.threshold.distance_max)?;
            at_least("threshold.points", s.threshold.points, 3)?;
            positive("threshold.slope_tol", s.threshold.slope_tol)?;
        }
        Experiment::Absorb => {
            positive("absorb.omega", s.absorb.omega)?;
            if s.absorb.etas.len() < 2 || s.absorb.etas.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
                return invalid("absorb.etas", "at least two positive values are required");
            }
            if s.absorb.etas.windows(2).any(|w| !(w[1] < w[0])) {
                return invalid("absorb.etas", "must decrease strictly");
            }
            positive("absorb.helmholtz_max", s.absorb.helmholtz_max)?;
            positive("absorb.side_max", s.absorb.side_max)?;
            if grid != source_grid {
                return invalid("grid", "absorb compares U⁺ − U⁻ with 2πiM_ωG on the source grid; [grid] must equal the source grid");
            }
        }
        Experiment::Evolve => {
            let e = &s.evolve;
            positive("evolve.omega", e.omega.resolve(&p, "evolve.omega")?)?;
            schedule("evolve", e.t_step, e.t_end)?;
            if let Some(d) = e.probe_step {
                positive("evolve.probe_step", d)?;
            }
            if e.gap {
                if !(e.gap_from > 0.0 && e.gap_from < e.t_end) {
                    return invalid("evolve.gap_from", "must lie in (0, t_end)");
                }
                positive("evolve.gap_factor", e.gap_factor)?;
            }
        }
        Experiment::Oracle => {
            let o = &s.oracle;
            positive("oracle.omega", o.omega.resolve(&p, "oracle.omega")?)?;
            schedule("oracle", o.t_step, o.t_end)?;
            yee("oracle", &o.yee)?;
            positive("oracle.div_max", o.div_max)?;
        }
        Experiment::OracleCompare => {
            let o = &s.oracle_compare;
            positive("oracle-compare.omega", o.omega.resolve(&p, "oracle-compare.omega")?)?;
            schedule("oracle-compare", o.t_step, o.t_end)?;
            yee("oracle-compare", &o.yee)?;
            positive("oracle-compare.discrepancy_max", o.discrepancy_max)?;
            positive("oracle-compare.div_max", o.div_max)?;
        }
        Experiment::Resonance => {
            requires_critical(&p, "resonance")?;
            let r = &s.resonance;
            schedule("resonance", r.t_step, r.t_end)?;
            if !(r.fit_from >= 0.0 && r.fit_from < r.t_end) {
                return invalid("resonance.fit_from", "must lie in [0, t_end)");
            }
            yee("resonance", &r.yee)?;
            positive("resonance.ratio_tol", r.ratio_tol)?;
            positive("resonance.slope_tol", r.slope_tol)?;
        }
        Experiment::Beats => {
            requires_critical(&p, "beats")?;
            let b = &s.beats;
            positive("beats.omega", b.omega)?;
            if (b.omega - p.omega_p()).abs() < 1e-9 {
                return invalid("beats.omega", "must differ from Ω_p");
            }
            positive("beats.dt", b.dt)?;
            if !(b.t_start >= 0.0 && b.t_end > b.t_start + b.dt) {
                return invalid("beats.t_end", "needs t_end > t_start + dt ≥ dt");
            }
            positive("beats.peak_floor", b.peak_floor)?;
        }
    }
    let output_dir = out_override.or_else(|| scenario.output_dir.clone()).unwrap_or_else(|| PathBuf::from("drude-out"));
    Ok(Resolved { params: p, source_grid, grid, weight, output_dir, source_name, scenario })
}

/// Resolves a frequency field that [`resolve`] already validated.
pub fn frequency(f: &Frequency, p: &MediumParams) -> f64 {
    f.resolve(p, "").unwrap_or(f64::NAN)
}
