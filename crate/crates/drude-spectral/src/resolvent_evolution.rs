//! Resolvent off the real axis, limiting-absorption fields on it, the φ_{ω,t}
//! functional calculus for the time-harmonic response U(t), the critical-case
//! eigenprojections P_{±Ω_p} and the long-time diagnostics built on them.
//!
//! Every operation runs through the generalized Fourier transform: G is
//! transformed once on a mesh that resolves the requested window and time
//! horizon, and each output is a synthesis with a spectral multiplier.

use crate::error::{domain, DrudeError, Result};
use crate::fields::{apply_hamiltonian_fd, mask_fd_invalid, norm_h, norm_weighted, FieldState, Grid2, WeightParams, WeightSign};
use crate::medium::MediumParams;
use crate::quadrature::{Node, Panel, PanelMap, QuadConfig};
use crate::transform::{
    forward, synthesize, synthesize_points, Identity, MeshSpec, PlasmonOnly, PlasmonResidue, SpectralAmplitude, SpectralMesh, SpectralMultiplier, WindowInfo,
};
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Switch to the Taylor form of φ when |λ − ω|·t falls below this value.
const PHI_TAYLOR: f64 = 1e-4;

/// φ_{ω,t}(λ) = i(e^{−iλt} − e^{−iωt})/(λ − ω), continuous at λ = ω with value t·e^{−iωt}.
pub fn phi(omega: f64, t: f64, lambda: f64) -> C64 {
    if t == 0.0 {
        return ZERO;
    }
    let d = lambda - omega;
    let z = d * t;
    let base = C64::from_polar(1.0, -omega * t);
    if z.abs() < PHI_TAYLOR {
        // i(e^{−iz} − 1)/z = 1 − iz/2 − z²/6 + O(z³)
        return t * base * C64::new(1.0 - z * z / 6.0, -0.5 * z);
    }
    I * (C64::from_polar(1.0, -lambda * t) - base) / d
}

/// Side of the real axis a boundary value is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitSide {
    /// ζ → ω from Im ζ > 0 (outgoing).
    Plus,
    /// ζ → ω from Im ζ < 0 (incoming).
    Minus,
}

impl LimitSide {
    fn sign(self) -> f64 {
        match self {
            LimitSide::Plus => 1.0,
            LimitSide::Minus => -1.0,
        }
    }
}

/// Distance from `z` to the signed λ-range of a panel.
fn panel_distance(panel: &Panel, sign: f64, z: C64) -> f64 {
    let (a, b) = panel.x_range();
    let (lo, hi) = if sign > 0.0 { (a, b) } else { (-b, -a) };
    let dx = if z.re < lo {
        lo - z.re
    } else if z.re > hi {
        z.re - hi
    } else {
        0.0
    };
    dx.hypot(z.im)
}

/// Kernel rate for a Cauchy factor 1/(λ − z): a Lorentzian of width `d` needs
/// sub-panels of about that width.
fn cauchy_rate(d: f64) -> f64 {
    4.0 * PI / d.max(1e-300)
}

/// The Cauchy multiplier 1/(λ − ζ), one slot per ζ.
#[derive(Debug, Clone)]
pub struct Resolvent {
    /// Points ζ off the real axis.
    pub zetas: Vec<C64>,
    /// Weight the plasmonic points (absolutely continuous in the non-critical case only).
    pub points: bool,
}

impl SpectralMultiplier for Resolvent {
    fn slots(&self) -> usize {
        self.zetas.len()
    }
    fn panel_weights(&self, panel: &Panel, _nodes: &[Node], sign: f64, out: &mut [Vec<C64>]) {
        let d = self.zetas.iter().map(|&z| panel_distance(panel, sign, z)).fold(f64::INFINITY, f64::min);
        panel.product_weights_many(
            |x, v| {
                for (o, &z) in v.iter_mut().zip(&self.zetas) {
                    *o = 1.0 / (sign * x - z);
                }
            },
            cauchy_rate(d),
            out,
        );
    }
    fn point_weight(&self, lambda: f64, slot: usize) -> C64 {
        if self.points {
            1.0 / (lambda - self.zetas[slot])
        } else {
            ZERO
        }
    }
}

/// Boundary values PV∫ m_λ/(λ − ω) dλ ± iπ m_ω, one slot per side.
///
/// Requires a mesh with a window at ω. Inside the window the integrand is
/// (M_λ − M_ω)G/(λ − ω): window nodes carry w/(λ − ω) and the center carries
/// −Σ w/(λ − ω) ± iπ. For ω in the plasmonic band the pole of the plasmonic
/// points in k is integrated on mirrored k-panels and the residue slice carries
/// ±iπ J_E(ω).
#[derive(Debug, Clone)]
pub struct LimitAbsorption {
    /// Real frequency ω > 0.
    pub omega: f64,
    /// Sides, one slot each.
    pub sides: Vec<LimitSide>,
    /// Weight the plasmonic points (non-critical case).
    pub points: bool,
}

impl LimitAbsorption {
    fn is_window(&self, panel: &Panel, sign: f64) -> bool {
        sign > 0.0 && matches!(panel.map, PanelMap::SqrtLeft { c } | PanelMap::SqrtRight { c } if c == self.omega)
    }
}

impl SpectralMultiplier for LimitAbsorption {
    fn slots(&self) -> usize {
        self.sides.len()
    }
    fn panel_weights(&self, panel: &Panel, nodes: &[Node], sign: f64, out: &mut [Vec<C64>]) {
        if self.is_window(panel, sign) {
            let off = panel.offsets();
            for o in out.iter_mut() {
                o.clear();
                o.extend(nodes.iter().zip(&off).map(|(n, d)| C64::new(n.w / d, 0.0)));
            }
            return;
        }
        let z = C64::new(self.omega, 0.0);
        let d = panel_distance(panel, sign, z);
        let mut first = vec![Vec::new()];
        panel.product_weights_many(|x, v| v[0] = C64::new(1.0 / (sign * x - self.omega), 0.0), cauchy_rate(d), &mut first);
        for o in out.iter_mut() {
            o.clone_from(&first[0]);
        }
    }
    fn point_weight(&self, lambda: f64, _slot: usize) -> C64 {
        if self.points {
            C64::new(1.0 / (lambda - self.omega), 0.0)
        } else {
            ZERO
        }
    }
    fn center_weight(&self, window: &WindowInfo, slot: usize) -> C64 {
        let pv: f64 = window.nodes.iter().zip(&window.offsets).map(|(n, d)| n.w / d).sum();
        C64::new(-pv, self.sides[slot].sign() * PI)
    }
    fn residue_weight(&self, residue: &PlasmonResidue, slot: usize) -> C64 {
        if self.points {
            C64::new(0.0, self.sides[slot].sign() * PI * residue.jacobian)
        } else {
            ZERO
        }
    }
}

/// The Duhamel multiplier φ_{ω,t}(λ), one slot per time.
///
/// Point weights apply to the plasmonic points in both cases: in the critical
/// case those points carry P_{±Ω_p}G, weighted by φ_{ω,t}(±Ω_p).
#[derive(Debug, Clone)]
pub struct Duhamel {
    /// Forcing frequency.
    pub omega: f64,
    /// Times t ≥ 0.
    pub times: Vec<f64>,
}

impl SpectralMultiplier for Duhamel {
    fn slots(&self) -> usize {
        self.times.len()
    }
    fn panel_weights(&self, panel: &Panel, _nodes: &[Node], sign: f64, out: &mut [Vec<C64>]) {
        let rate = self.times.iter().fold(0.0f64, |m, t| m.max(*t));
        panel.product_weights_many(
            |x, v| {
                for (o, &t) in v.iter_mut().zip(&self.times) {
                    *o = phi(self.omega, t, sign * x);
                }
            },
            rate,
            out,
        );
    }
    fn point_weight(&self, lambda: f64, slot: usize) -> C64 {
        phi(self.omega, self.times[slot], lambda)
    }
}

/// The free propagator e^{−iλt}, one slot per time.
#[derive(Debug, Clone)]
pub struct FreePropagator {
    /// Times.
    pub times: Vec<f64>,
    /// Weight the plasmonic points.
    pub points: bool,
}

impl SpectralMultiplier for FreePropagator {
    fn slots(&self) -> usize {
        self.times.len()
    }
    fn panel_weights(&self, panel: &Panel, _nodes: &[Node], sign: f64, out: &mut [Vec<C64>]) {
        let rate = self.times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        panel.product_weights_many(
            |x, v| {
                for (o, &t) in v.iter_mut().zip(&self.times) {
                    *o = C64::from_polar(1.0, -sign * x * t);
                }
            },
            rate,
            out,
        );
    }
    fn point_weight(&self, lambda: f64, slot: usize) -> C64 {
        if self.points {
            C64::from_polar(1.0, -lambda * self.times[slot])
        } else {
            ZERO
        }
    }
}

/// A source transformed once on a mesh, ready for repeated syntheses.
#[derive(Debug, Clone)]
pub struct SpectralProblem {
    /// The mesh.
    pub mesh: SpectralMesh,
    /// Ĝ on the mesh.
    pub amp: SpectralAmplitude,
    /// Amplitudes below this value are skipped in synthesis.
    pub skip: f64,
}

impl SpectralProblem {
    /// Transforms `g` on a mesh built from `spec`.
    pub fn new(p: &MediumParams, g: &FieldState, spec: MeshSpec, qc: &QuadConfig) -> Result<Self> {
        let mesh = SpectralMesh::build(p, qc, spec)?;
        let amp = forward(g, &mesh)?;
        let skip = qc.skip_rel * amp.max_abs();
        Ok(Self { mesh, amp, skip })
    }

    /// F*·m·Ĝ on `grid`, one field per slot.
    pub fn apply<M: SpectralMultiplier + ?Sized>(&self, mult: &M, grid: Grid2) -> Result<Vec<FieldState>> {
        synthesize(&self.amp, &self.mesh, mult, grid, self.skip)
    }

    /// F*·m·Ĝ at points, `[slot][point]`.
    pub fn apply_points<M: SpectralMultiplier + ?Sized>(&self, mult: &M, points: &[(f64, f64)]) -> Result<Vec<Vec<[C64; 6]>>> {
        synthesize_points(&self.amp, &self.mesh, mult, points, self.skip)
    }
}

fn check_source(g: &FieldState) -> Result<()> {
    if g.max_abs() == 0.0 {
        return Ok(());
    }
    if !g.comps.iter().flatten().chain(&g.hx_left).all(|v| v.is_finite()) {
        return domain("the source has non-finite values");
    }
    Ok(())
}

/// Where outputs are sampled and how the source is described to the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// Output grid.
    pub grid: Grid2,
    /// Radius of the source support around the origin.
    pub source_radius: f64,
    /// Width of the source (sets Λ_max).
    pub source_width: f64,
}

impl Observation {
    fn spec(&self) -> MeshSpec {
        MeshSpec::for_grid(&self.grid, self.source_radius, self.source_width)
    }
}

/// R_ac(ζ)G for each ζ (Im ζ ≠ 0), sampled on the observation grid.
pub fn resolvent_ac(p: &MediumParams, zetas: &[C64], g: &FieldState, obs: &Observation, qc: &QuadConfig) -> Result<Vec<FieldState>> {
    check_source(g)?;
    if zetas.iter().any(|z| z.im == 0.0 || !z.is_finite()) {
        return domain("resolvent_ac needs Im ζ ≠ 0; use limit_absorption on the real axis");
    }
    // cluster the λ-nodes at Re ζ when every ζ shares it
    let mut spec = obs.spec();
    let re = zetas[0].re;
    if zetas.iter().all(|z| z.re == re) && re > 0.0 && !p.is_excluded(re, qc.exclusion_rel * p.frequency_scale()) {
        spec = spec.with_window(re);
    }
    let prob = SpectralProblem::new(p, g, spec, qc)?;
    prob.apply(&Resolvent { zetas: zetas.to_vec(), points: !p.is_critical() }, obs.grid)
}

/// Result of a limiting-absorption computation.
#[derive(Debug, Clone)]
pub struct LimitAbsorptionResult {
    /// U_ω^± in the order of the requested sides.
    pub fields: Vec<FieldState>,
    /// The transformed problem (reusable for resolvents at ω + iη on the same mesh).
    pub problem: SpectralProblem,
}

fn check_omega(p: &MediumParams, omega: f64, qc: &QuadConfig) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return domain("limiting absorption is computed for ω > 0 (negative ω follows by conjugation)");
    }
    let radius = qc.exclusion_rel * p.frequency_scale();
    if p.is_excluded(omega, radius) && !qc.allow_excluded {
        return domain(format!("ω = {omega} lies in σ_exc"));
    }
    if !p.is_critical() && (omega - p.omega_p()).abs() <= radius {
        return domain("the threshold ω = Ω_p is covered by the density threshold probes only");
    }
    Ok(())
}

/// U_ω^± = PV∫ M_λG/(λ − ω) dλ ± iπ M_ωG on the observation grid.
pub fn limit_absorption(
    p: &MediumParams,
    omega: f64,
    g: &FieldState,
    sides: &[LimitSide],
    obs: &Observation,
    qc: &QuadConfig,
) -> Result<LimitAbsorptionResult> {
    check_source(g)?;
    check_omega(p, omega, qc)?;
    let prob = SpectralProblem::new(p, g, obs.spec().with_window(omega), qc)?;
    let fields = prob.apply(&LimitAbsorption { omega, sides: sides.to_vec(), points: !p.is_critical() }, obs.grid)?;
    Ok(LimitAbsorptionResult { fields, problem: prob })
}

/// P_{±Ω_p}G with its projector diagnostics (critical case).
#[derive(Debug, Clone)]
pub struct EigenProjection {
    /// P_{sign·Ω_p}G.
    pub field: FieldState,
    /// ‖P(PG) − PG‖_H/‖PG‖_H. PG decays like 1/|x|, so the truncation to the
    /// grid of G bounds this from below (about 0.15 for a box of half-width 6).
    pub idempotence: f64,
    /// |(PG, G − PG)_H|/(‖PG‖_H‖G‖_H).
    pub orthogonality: f64,
}

/// The eigenprojection P_{sign·Ω_p}G of the critical case, sampled on `grid`
/// (which must be the grid of `g` for the projector diagnostics).
pub fn eigenprojection_op(p: &MediumParams, sign: f64, g: &FieldState, source_width: f64, qc: &QuadConfig) -> Result<EigenProjection> {
    if !p.is_critical() {
        return Err(DrudeError::Unsupported("eigenprojections P_{±Ω_p} exist only when Ω_e = Ω_m".into()));
    }
    if sign == 0.0 {
        return Err(DrudeError::Config("sign must be ±1".into()));
    }
    check_source(g)?;
    let grid = g.grid;
    let spec = MeshSpec::for_grid(&grid, 0.0, source_width);
    let mesh = SpectralMesh::build(p, qc, spec)?;
    let mult = PlasmonOnly { sign: sign.signum() };
    let proj = |u: &FieldState| -> Result<FieldState> {
        let amp = forward(u, &mesh)?;
        Ok(synthesize(&amp, &mesh, &mult, grid, qc.skip_rel * amp.max_abs())?.remove(0))
    };
    let pg = proj(g)?;
    let ppg = proj(&pg)?;
    let npg = norm_h(p, &pg)?;
    let idempotence = if npg > 0.0 { norm_h(p, &ppg.sub(&pg)?)? / npg } else { 0.0 };
    let rest = g.sub(&pg)?;
    let ng = norm_h(p, g)?;
    let orthogonality = if npg > 0.0 { crate::fields::inner_h(p, &pg, &rest)?.norm() / (npg * ng) } else { 0.0 };
    Ok(EigenProjection { field: pg, idempotence, orthogonality })
}

/// P_{sign·Ω_p}G sampled on the observation grid (critical case).
pub fn eigenprojection_field(p: &MediumParams, sign: f64, g: &FieldState, obs: &Observation, qc: &QuadConfig) -> Result<FieldState> {
    if !p.is_critical() {
        return Err(DrudeError::Unsupported("eigenprojections P_{±Ω_p} exist only when Ω_e = Ω_m".into()));
    }
    if sign == 0.0 {
        return Err(DrudeError::Config("sign must be ±1".into()));
    }
    check_source(g)?;
    let prob = SpectralProblem::new(p, g, obs.spec(), qc)?;
    Ok(prob.apply(&PlasmonOnly { sign: sign.signum() }, obs.grid)?.remove(0))
}

/// What an evolution run records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRequest {
    /// Forcing frequency ω.
    pub omega: f64,
    /// Times at which fields and norms are recorded.
    pub times: Vec<f64>,
    /// Weight exponent of the local norm.
    pub s: f64,
    /// Probe points.
    pub probes: Vec<(f64, f64)>,
    /// Times of the probe series (may differ from `times`; empty means `times`).
    pub probe_times: Vec<f64>,
    /// Compute gap(t) against U_ω^+.
    pub gap: bool,
    /// Keep the sampled fields in the trace.
    pub keep_fields: bool,
}

/// Time series produced by the spectral evolution and by the time-domain oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    /// Strictly increasing sample times.
    pub times: Vec<f64>,
    /// ‖U(t)‖_H.
    pub norm_h: Vec<f64>,
    /// ‖U(t)‖_{H_{−s}}.
    pub norm_weighted: Vec<f64>,
    /// gap(t) = ‖U(t) + iU_ω^+ e^{−iωt}‖_{H_{−s}} when requested.
    pub gap: Vec<f64>,
    /// Probe points.
    pub probes: Vec<(f64, f64)>,
    /// Probe-series times.
    pub probe_times: Vec<f64>,
    /// E at each probe, `[probe][time]`.
    pub probe_values: Vec<Vec<C64>>,
    /// Sampled fields (empty unless requested).
    #[serde(skip)]
    pub fields: Vec<FieldState>,
    /// Spectral nodes or time steps used.
    pub work: usize,
}

impl EvolutionTrace {
    /// Checks that the times increase strictly and that the series have matching lengths.
    pub fn validate(&self) -> Result<()> {
        if self.times.windows(2).any(|w| !(w[1] > w[0])) || self.probe_times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(DrudeError::Config("trace times must increase strictly".into()));
        }
        let n = self.times.len();
        if self.norm_h.len() != n || self.norm_weighted.len() != n || !(self.gap.is_empty() || self.gap.len() == n) {
            return Err(DrudeError::Config("trace series lengths differ".into()));
        }
        Ok(())
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DrudeError::Config("times must be non-negative and strictly increasing".into()));
    }
    Ok(())
}

/// U(t) = ∫ φ_{ω,t}(λ) M_λG dλ (+ Σ_± φ_{ω,t}(±Ω_p) P_{±Ω_p}G in the critical case).
pub fn evolve_spectral(p: &MediumParams, g: &FieldState, req: &EvolutionRequest, obs: &Observation, qc: &QuadConfig) -> Result<EvolutionTrace> {
    check_source(g)?;
    check_times(&req.times)?;
    check_times(&req.probe_times)?;
    let radius = qc.exclusion_rel * p.frequency_scale();
    if req.omega.abs() <= radius || (req.omega.abs() - p.omega_m).abs() <= radius && !qc.allow_excluded {
        return domain(format!("ω = {} is 0 or ±Ω_m", req.omega));
    }
    let weights = WeightParams::new(req.s)?;
    let t_max = req.times.iter().chain(&req.probe_times).fold(0.0f64, |m, t| m.max(*t));
    let mut spec = obs.spec().with_time(t_max);
    let with_gap = req.gap && req.omega > 0.0;
    if with_gap {
        check_omega(p, req.omega, qc)?;
        spec = spec.with_window(req.omega);
    }
    let prob = SpectralProblem::new(p, g, spec, qc)?;
    let fields = prob.apply(&Duhamel { omega: req.omega, times: req.times.clone() }, obs.grid)?;
    let mut gap = Vec::new();
    if with_gap {
        let lap = prob.apply(&LimitAbsorption { omega: req.omega, sides: vec![LimitSide::Plus], points: !p.is_critical() }, obs.grid)?.remove(0);
        for (u, &t) in fields.iter().zip(&req.times) {
            let mut d = u.clone();
            d.axpy(I * C64::from_polar(1.0, -req.omega * t), &lap)?;
            gap.push(norm_weighted(p, &d, weights, WeightSign::Minus)?);
        }
    }
    let norm_h_v = fields.iter().map(|u| norm_h(p, u)).collect::<Result<Vec<_>>>()?;
    let norm_w = fields.iter().map(|u| norm_weighted(p, u, weights, WeightSign::Minus)).collect::<Result<Vec<_>>>()?;
    let probe_times = if req.probe_times.is_empty() { req.times.clone() } else { req.probe_times.clone() };
    let mut probe_values = vec![Vec::with_capacity(probe_times.len()); req.probes.len()];
    if !req.probes.is_empty() {
        let vals = prob.apply_points(&Duhamel { omega: req.omega, times: probe_times.clone() }, &req.probes)?;
        for slot in vals {
            for (pi, v) in slot.into_iter().enumerate() {
                probe_values[pi].push(v[0]);
            }
        }
    }
    Ok(EvolutionTrace {
        times: req.times.clone(),
        norm_h: norm_h_v,
        norm_weighted: norm_w,
        gap,
        probes: req.probes.clone(),
        probe_times,
        probe_values,
        fields: if req.keep_fields { fields } else { Vec::new() },
        work: prob.mesh.node_count(),
    })
}

/// Free evolution e^{−iAt}U₀ of the absolutely continuous part of U₀.
pub fn propagate_free(p: &MediumParams, u0: &FieldState, times: &[f64], obs: &Observation, qc: &QuadConfig) -> Result<Vec<FieldState>> {
    check_times(times)?;
    let t_max = times.iter().fold(0.0f64, |m, t| m.max(*t));
    let prob = SpectralProblem::new(p, u0, obs.spec().with_time(t_max), qc)?;
    prob.apply(&FreePropagator { times: times.to_vec(), points: !p.is_critical() }, obs.grid)
}

/// A spectral peak of a probe series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPeak {
    /// Angular frequency ν of a component e^{−iνt}.
    pub frequency: f64,
    /// Peak magnitude of the windowed transform (normalized by the sample count).
    pub magnitude: f64,
}

/// Dominant frequencies of a uniformly sampled series, strongest first.
///
/// The series is Hann-windowed and zero-padded ×8; a component e^{−iνt}
/// appears at +ν. Peaks weaker than `rel_floor` of the strongest are dropped.
/// The bin width of the record is 2π/(N·Δt).
pub fn beat_diagnostic(times: &[f64], values: &[C64], rel_floor: f64) -> Result<Vec<SpectralPeak>> {
    let n = values.len();
    if n < 4 || times.len() != n {
        return Err(DrudeError::Config("beat_diagnostic needs at least four samples with matching times".into()));
    }
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(dt > 0.0) || times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0)) {
        return Err(DrudeError::Config("beat_diagnostic needs uniformly spaced times".into()));
    }
    let m = 8 * n.next_power_of_two();
    let mut buf = vec![ZERO; m];
    for (i, v) in values.iter().enumerate() {
        let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos();
        buf[i] = v * w;
    }
    // Σ x_n e^{+2πi kn/m} peaks at ν = 2πk/(m Δt) for x_n = e^{−iν t_n}
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let mag: Vec<f64> = buf.iter().map(|v| v.norm() / n as f64).collect();
    let freq = |k: usize| {
        let kk = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
        2.0 * PI * kk / (m as f64 * dt)
    };
    let top = mag.iter().copied().fold(0.0, f64::max);
    let mut peaks: Vec<SpectralPeak> = (0..m)
        .filter(|&k| {
            let (l, r) = (mag[(k + m - 1) % m], mag[(k + 1) % m]);
            mag[k] > l && mag[k] >= r && mag[k] >= rel_floor * top
        })
        .map(|k| {
            // parabolic refinement on the log magnitude
            let (l, c, r) = (mag[(k + m - 1) % m].max(1e-300).ln(), mag[k].ln(), mag[(k + 1) % m].max(1e-300).ln());
            let den = l - 2.0 * c + r;
            let off = if den < 0.0 { 0.5 * (l - r) / den } else { 0.0 };
            SpectralPeak { frequency: freq(k) + off * 2.0 * PI / (m as f64 * dt), magnitude: mag[k] }
        })
        .collect();
    peaks.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
    Ok(peaks)
}

/// Relative residual of (A_h − ω)U against P_acG in H_{−s}, over the nodes where
/// the centered differences are defined.
pub fn helmholtz_residual(p: &MediumParams, u: &FieldState, omega: f64, pac_g: &FieldState, s: WeightParams) -> Result<f64> {
    u.grid.check_same(&pac_g.grid)?;
    let mut r = apply_hamiltonian_fd(p, u);
    r.axpy(C64::new(-omega, 0.0), u)?;
    r.axpy(C64::new(-1.0, 0.0), pac_g)?;
    mask_fd_invalid(&mut r);
    let mut reference = pac_g.clone();
    mask_fd_invalid(&mut reference);
    let den = norm_weighted(p, &reference, s, WeightSign::Minus)?;
    if den == 0.0 {
        return domain("P_ac G vanishes on the residual region");
    }
    Ok(norm_weighted(p, &r, s, WeightSign::Minus)? / den)
}

/// P_acG on the observation grid: all of F*FG in the non-critical case, without
/// the plasmonic eigenvalues in the critical case.
pub fn absolutely_continuous_part(p: &MediumParams, g: &FieldState, obs: &Observation, qc: &QuadConfig) -> Result<FieldState> {
    let prob = SpectralProblem::new(p, g, obs.spec(), qc)?;
    Ok(prob.apply(&Identity { plasmon: !p.is_critical() }, obs.grid)?.remove(0))
}

/// Least-squares slope of ‖U(t)‖_{H_{−s}} against t over the samples with t ≥ `t_from`.
pub fn growth_rate(trace: &EvolutionTrace, t_from: f64) -> f64 {
    let (x, y): (Vec<f64>, Vec<f64>) = trace.times.iter().zip(&trace.norm_weighted).filter(|(t, _)| **t >= t_from).map(|(t, v)| (*t, *v)).unzip();
    if x.len() < 2 {
        return f64::NAN;
    }
    crate::quadrature::linear_fit(&x, &y).0
}
