//! The spectral density M_λ applied to fields, its pairings, the band-measure
//! consistency check, Hölder-regularity probes and the threshold probes near
//! the plasmon frequency Ω_p.
//!
//! At fixed λ the density is a k-integral over the bulk sections of the
//! horizontal line |λ| = const, with square-root substitution at the cuts,
//! plus (non-critical case) the plasmonic point k_E(λ) weighted by the
//! Jacobian J_E(λ) = |dk_E/dλ|.

use crate::error::{domain, DrudeError, Result};
use crate::fields::{norm_weighted, Component, FieldState, Grid2, WeightParams, WeightSign};
use crate::medium::{cut_functions, MediumParams};
use crate::modes::{ModeData, ModeIndex};
use crate::par;
use crate::quadrature::{gauss_legendre, interval_panels, loglog_slope, Node, QuadConfig};
use crate::spectral_geometry::{in_plasmon_band, jacobian_e, k_e, k_intervals, ZoneLabel};
use crate::transform::{accumulate_slice, forward, synthesize_chunk, MeshSpec, OutAxis, PairingInput, SliceAccum, SpectralMesh, CHUNK};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// A k-node of the fixed-λ quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityNode {
    /// Wavenumber (> 0; −k enters through parity).
    pub k: f64,
    /// k-weight (J_E for the plasmonic point).
    pub w: f64,
    /// Zone of (k, λ).
    pub zone: ZoneLabel,
    /// Node within `near_cut` of a cut.
    pub near_cut: bool,
}

/// Fixed-λ quadrature of the density.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityRule {
    /// |λ| at which the modes are evaluated.
    pub lambda_eval: f64,
    /// Sign of λ.
    pub sign: f64,
    /// Bulk nodes followed by the plasmonic point, if present.
    pub nodes: Vec<DensityNode>,
    /// λ sits on the threshold ±Ω_p (plasmonic term omitted).
    pub threshold: bool,
    /// Indices of the last node of each section cut off at k_max.
    pub truncated: Vec<usize>,
}

/// Diagnostics of one density application.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityDiagnostics {
    /// Number of bulk k-nodes.
    pub k_nodes: usize,
    /// Bulk nodes within `near_cut` of a cut.
    pub near_cut_nodes: usize,
    /// k_E(λ) and J_E(λ) when the plasmonic term is present.
    pub plasmon: Option<(f64, f64)>,
    /// Largest pairing magnitude on the last panel of each section relative to the peak.
    pub truncation_residual: f64,
    /// λ sits on the threshold ±Ω_p.
    pub threshold: bool,
}

/// M_λU on the grid of U, split by zone.
#[derive(Debug, Clone)]
pub struct DensityApplyResult {
    /// M_λU (the sum of the zone contributions, in zone order).
    pub field: FieldState,
    /// Per-zone contributions.
    pub zones: Vec<(ZoneLabel, FieldState)>,
    /// Quadrature diagnostics.
    pub diagnostics: DensityDiagnostics,
}

/// Checks λ against σ_exc and returns the evaluation frequency and the threshold flag.
fn admissible(p: &MediumParams, lambda: f64, qc: &QuadConfig) -> Result<(f64, bool)> {
    let la = lambda.abs();
    let radius = qc.exclusion_rel * p.frequency_scale();
    if la <= radius {
        return domain(format!("λ = {lambda} lies in σ_exc (λ = 0)"));
    }
    if !p.is_excluded(la, radius) {
        return Ok((la, false));
    }
    if !p.is_critical() && (la - p.omega_p()).abs() <= radius {
        if qc.allow_threshold {
            return Ok((la, true));
        }
        return domain(format!("λ = {lambda} is the threshold ±Ω_p; enable quad.allow_threshold for the threshold path"));
    }
    if qc.allow_excluded {
        return Ok((la * (1.0 + 1e-9), false));
    }
    domain(format!("λ = {lambda} lies in σ_exc"))
}

impl DensityRule {
    /// Quadrature at λ resolving k-phases up to `rate` (the y- and x-extent of the fields).
    pub fn new(p: &MediumParams, lambda: f64, rate: f64, qc: &QuadConfig) -> Result<Self> {
        qc.validate()?;
        let (la, threshold) = admissible(p, lambda, qc)?;
        let c = cut_functions(p, la)?;
        let top = [Some(c.k0), c.k_d, c.k_i].into_iter().flatten().fold(0.0, f64::max);
        let k_max = qc.k_max.unwrap_or(2.0 * top + 1.0);
        let mut nodes = Vec::new();
        let mut truncated = Vec::new();
        for iv in k_intervals(p, la, k_max)? {
            for pn in interval_panels(iv.a, iv.b, iv.cut_a, iv.cut_b, qc.node_count(iv.b - iv.a, rate), qc.near_cut) {
                for n in pn.nodes() {
                    let near = (iv.cut_a && n.x - iv.a < qc.near_cut) || (iv.cut_b && iv.b - n.x < qc.near_cut);
                    nodes.push(DensityNode { k: n.x, w: n.w, zone: iv.zone, near_cut: near });
                }
            }
            if iv.b >= k_max && !nodes.is_empty() {
                truncated.push(nodes.len() - 1);
            }
        }
        if !threshold && in_plasmon_band(p, la) {
            nodes.push(DensityNode { k: k_e(p, la)?, w: jacobian_e(p, la)?, zone: ZoneLabel::EE, near_cut: false });
        }
        Ok(Self { lambda_eval: la, sign: lambda.signum(), nodes, threshold, truncated })
    }

    /// Modes of node `n`.
    fn modes(&self, p: &MediumParams, n: &DensityNode) -> Result<Vec<ModeData>> {
        n.zone.modes().iter().map(|&j| ModeData::new(p, ModeIndex::with_zone(n.k, self.lambda_eval, j, n.zone)?)).collect()
    }

    /// Quadrants of (±k, λ) selected by the sign of λ.
    fn quadrants(&self) -> (usize, usize) {
        if self.sign > 0.0 {
            (0, 1)
        } else {
            (2, 3)
        }
    }

    /// Pairings ⟨U, W_{±k,λ,j}⟩ for every node and channel.
    pub fn pairings(&self, p: &MediumParams, u: &FieldState) -> Result<Vec<Vec<[C64; 2]>>> {
        let input = PairingInput::new(p, u);
        let (qa, qb) = self.quadrants();
        let mut out = Vec::with_capacity(self.nodes.len());
        for chunk in self.nodes.chunks(CHUNK) {
            let ks: Vec<f64> = chunk.iter().map(|n| n.k).collect();
            let ytab = input.y_table(&ks);
            let ncol = 2 * ks.len();
            let res = par::map_collect(chunk.len(), |kk| -> Result<Vec<[C64; 2]>> {
                let (mut psi, mut dpsi) = (Vec::new(), Vec::new());
                Ok(self
                    .modes(p, &chunk[kk])?
                    .iter()
                    .map(|m| {
                        let q = input.pair(m, &ytab, ncol, kk, &mut psi, &mut dpsi);
                        [q[qa], q[qb]]
                    })
                    .collect())
            });
            for r in res {
                out.push(r?);
            }
        }
        Ok(out)
    }
}

fn rate_for(grid: &Grid2) -> f64 {
    2.0 * grid.lx.max(grid.ly)
}

/// ⟨M_λU, V⟩ computed from the pairings (no synthesis).
pub fn density_pairing(p: &MediumParams, lambda: f64, u: &FieldState, v: &FieldState, qc: &QuadConfig) -> Result<C64> {
    let rule = DensityRule::new(p, lambda, rate_for(&u.grid), qc)?;
    let pu = rule.pairings(p, u)?;
    let pv = rule.pairings(p, v)?;
    let terms: Vec<C64> = rule
        .nodes
        .iter()
        .zip(pu.iter().zip(&pv))
        .map(|(n, (a, b))| n.w * a.iter().zip(b).map(|(x, y)| x[0] * y[0].conj() + x[1] * y[1].conj()).sum::<C64>())
        .collect();
    Ok(par::pairwise_sum_c(&terms))
}

/// The density value ⟨M_λU, U⟩ (real up to round-off).
pub fn density_value(p: &MediumParams, lambda: f64, u: &FieldState, qc: &QuadConfig) -> Result<f64> {
    Ok(density_pairing(p, lambda, u, u, qc)?.re)
}

/// Applies M_λ to `u`, sampling the result on the grid of `u`.
pub fn apply_density(p: &MediumParams, lambda: f64, u: &FieldState, qc: &QuadConfig) -> Result<DensityApplyResult> {
    let grid = u.grid;
    let rule = DensityRule::new(p, lambda, rate_for(&grid), qc)?;
    let pairs = rule.pairings(p, u)?;
    let (qa, qb) = rule.quadrants();
    let axis = OutAxis::new(grid);
    let peak = pairs.iter().flatten().flat_map(|v| v.iter()).fold(0.0f64, |m, v| m.max(v.norm()));
    let mut zones: Vec<(ZoneLabel, FieldState)> = Vec::new();
    let idx: Vec<usize> = (0..rule.nodes.len()).collect();
    let mut start = 0;
    while start < idx.len() {
        let zone = rule.nodes[start].zone;
        let mut end = start;
        while end < idx.len() && rule.nodes[end].zone == zone {
            end += 1;
        }
        let pos = match zones.iter().position(|(z, _)| *z == zone) {
            Some(i) => i,
            None => {
                zones.push((zone, FieldState::zeros(grid)));
                zones.len() - 1
            }
        };
        for chunk in idx[start..end].chunks(CHUNK) {
            let accs = par::map_collect(chunk.len(), |c| -> Result<SliceAccum> {
                let i = chunk[c];
                let n = &rule.nodes[i];
                let modes = rule.modes(p, n)?;
                let d: Vec<Vec<[C64; 4]>> = pairs[i]
                    .iter()
                    .map(|q| {
                        let mut v = [ZERO; 4];
                        v[qa] = q[0];
                        v[qb] = q[1];
                        vec![v]
                    })
                    .collect();
                Ok(SliceAccum { k: n.k, wk: n.w, g: accumulate_slice(axis, &modes, &d, 1) })
            });
            let accs = accs.into_iter().collect::<Result<Vec<_>>>()?;
            synthesize_chunk(axis, &accs, 1, std::slice::from_mut(&mut zones[pos].1));
        }
        start = end;
    }
    let mut field = FieldState::zeros(grid);
    for (_, z) in &zones {
        field.axpy(C64::new(1.0, 0.0), z)?;
    }
    // tail monitor: pairing magnitude at the k_max end of truncated sections
    let tail = rule.truncated.iter().flat_map(|&i| pairs[i].iter().flat_map(|v| v.iter())).fold(0.0f64, |m, v| m.max(v.norm()));
    let bulk: Vec<&DensityNode> = rule.nodes.iter().filter(|n| n.zone.is_bulk()).collect();
    let plasmon = rule.nodes.iter().find(|n| n.zone == ZoneLabel::EE).map(|n| (n.k, n.w));
    Ok(DensityApplyResult {
        field,
        zones,
        diagnostics: DensityDiagnostics {
            k_nodes: bulk.len(),
            near_cut_nodes: bulk.iter().filter(|n| n.near_cut).count(),
            plasmon,
            truncation_residual: if peak > 0.0 { tail / peak } else { 0.0 },
            threshold: rule.threshold,
        },
    })
}

/// Band-measure consistency: ∫ ⟨M_λU, U⟩ dλ against the Parseval band energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureCheck {
    /// Band [λ₁, λ₂].
    pub band: (f64, f64),
    /// ∫_{λ₁}^{λ₂} ⟨M_λU, U⟩ dλ.
    pub density_integral: f64,
    /// Σ w|Û|² over the band from the generalized Fourier transform.
    pub parseval_energy: f64,
    /// |difference| / max of the two.
    pub rel_diff: f64,
    /// Smallest sampled density value.
    pub min_density: f64,
}

/// λ-values inside (a, b) where the fixed-λ sections change structure.
fn lambda_structure_points(p: &MediumParams) -> Vec<f64> {
    let mut v = vec![p.omega_e, p.omega_m, p.omega_c(), p.omega_p()];
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Gauss nodes in λ over [a, b] (same sign), split at the structure points with
/// square-root clustering at every end.
pub fn band_nodes(p: &MediumParams, a: f64, b: f64, qc: &QuadConfig) -> Vec<Node> {
    let (lo, hi) = (a.min(b), a.max(b));
    let sign = if hi <= 0.0 { -1.0 } else { 1.0 };
    let (alo, ahi) = if sign > 0.0 { (lo, hi) } else { (-hi, -lo) };
    let mut edges = vec![alo];
    edges.extend(lambda_structure_points(p).into_iter().filter(|&x| x > alo && x < ahi));
    edges.push(ahi);
    let mut out = Vec::new();
    for w in edges.windows(2) {
        for pn in interval_panels(w[0], w[1], true, true, qc.nodes_per_interval, qc.near_cut) {
            out.extend(pn.nodes().into_iter().map(|n| Node { x: sign * n.x, w: n.w }));
        }
    }
    out
}

/// Compares ∫_{λ₁}^{λ₂} ⟨M_λU, U⟩ dλ with the Parseval band energy of `u`.
pub fn measure_reconstruction(p: &MediumParams, band: (f64, f64), u: &FieldState, source_width: f64, qc: &QuadConfig) -> Result<MeasureCheck> {
    let (lo, hi) = (band.0.min(band.1), band.0.max(band.1));
    if lo < 0.0 && hi > 0.0 {
        return domain("bands must not contain λ = 0");
    }
    let radius = qc.exclusion_rel * p.frequency_scale();
    for w in p.excluded_frequencies() {
        for s in [1.0, -1.0] {
            if s * w >= lo - radius && s * w <= hi + radius && !(w == 0.0 && (lo.abs() > radius && hi.abs() > radius)) {
                return domain(format!("band [{lo}, {hi}] meets σ_exc at {}", s * w));
            }
        }
    }
    if hi - lo <= 0.0 {
        return Ok(MeasureCheck { band: (lo, hi), density_integral: 0.0, parseval_energy: 0.0, rel_diff: 0.0, min_density: 0.0 });
    }
    let nodes = band_nodes(p, lo, hi, qc);
    let vals = par::map_collect(nodes.len(), |i| density_value(p, nodes[i].x, u, qc));
    let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
    let terms: Vec<f64> = nodes.iter().zip(&vals).map(|(n, v)| n.w * v).collect();
    let density_integral = par::pairwise_sum(&terms);
    let min_density = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let (alo, ahi) = (lo.abs().min(hi.abs()), lo.abs().max(hi.abs()));
    let spec = MeshSpec::for_grid(&u.grid, 0.0, source_width).with_lambda_breaks(&[alo, ahi]);
    let mesh = SpectralMesh::build(p, qc, spec)?;
    let amp = forward(u, &mesh)?;
    let sign = if hi <= 0.0 { -1.0 } else { 1.0 };
    let parseval_energy = amp.band_energy(&mesh, lo, hi, sign);
    let scale = density_integral.abs().max(parseval_energy.abs());
    let rel_diff = if scale > 0.0 { (density_integral - parseval_energy).abs() / scale } else { 0.0 };
    Ok(MeasureCheck { band: (lo, hi), density_integral, parseval_energy, rel_diff, min_density })
}

/// Result of a Hölder probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoelderFit {
    /// Base frequency.
    pub lambda: f64,
    /// Offsets δ.
    pub deltas: Vec<f64>,
    /// h(δ) = ‖(M_{λ+δ} − M_λ)U‖_{H_{−s}}.
    pub h: Vec<f64>,
    /// ‖M_λU‖_{H_{−s}}.
    pub base_norm: f64,
    /// Fitted log-log slope γ̂.
    pub gamma: f64,
}

/// Fits the Hölder exponent of λ ↦ M_λU in H_{−s} at λ over the offsets `deltas`.
pub fn hoelder_probe(p: &MediumParams, lambda: f64, deltas: &[f64], u: &FieldState, s: WeightParams, qc: &QuadConfig) -> Result<HoelderFit> {
    if deltas.len() < 2 || deltas.iter().any(|d| *d == 0.0 || !d.is_finite()) {
        return Err(DrudeError::Config("hoelder_probe needs at least two nonzero offsets".into()));
    }
    let base = apply_density(p, lambda, u, qc)?.field;
    let mut h = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let shifted = apply_density(p, lambda + d, u, qc)?.field;
        h.push(norm_weighted(p, &shifted.sub(&base)?, s, WeightSign::Minus)?);
    }
    let ad: Vec<f64> = deltas.iter().map(|d| d.abs()).collect();
    Ok(HoelderFit { lambda, deltas: deltas.to_vec(), base_norm: norm_weighted(p, &base, s, WeightSign::Minus)?, gamma: loglog_slope(&ad, &h), h })
}

/// x-profile of a separable probe field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum XProfile {
    /// exp(−(x − c)²/(2w²)).
    Gaussian {
        /// Center.
        center: f64,
        /// Width.
        width: f64,
    },
    /// |x|^(−α)·exp(−x²/(2w²)), square integrable for α < 1/2.
    Cusp {
        /// Exponent α ∈ [0, 1/2).
        alpha: f64,
        /// Width.
        width: f64,
    },
}

/// y-profile of a separable probe field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum YProfile {
    /// exp(−y²/(2w²)).
    Gaussian {
        /// Width.
        width: f64,
    },
    /// exp(−a|y|), whose transform decays like k⁻².
    Exponential {
        /// Rate a.
        rate: f64,
    },
}

impl YProfile {
    /// ∫ g(y) e^{−iky} dy.
    pub fn transform(&self, k: f64) -> f64 {
        match *self {
            YProfile::Gaussian { width } => width * (2.0 * std::f64::consts::PI).sqrt() * (-0.5 * k * k * width * width).exp(),
            YProfile::Exponential { rate } => 2.0 * rate / (rate * rate + k * k),
        }
    }
}

/// A single-component field f(x)·g(y) used for threshold probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparableProbe {
    /// The nonzero component.
    pub component: Component,
    /// x-profile.
    pub x: XProfile,
    /// y-profile.
    pub y: YProfile,
}

/// Gauss nodes on [0, X] for integrands F(x)·x^{−α} with F varying on `scale`.
/// The first panel [0, x₁] uses x = x₁·u^{1/(1−α)}, whose weights already
/// contain x^{−α}; those nodes are flagged `true`. The remaining panels are
/// plain Gauss panels of length at most `scale`/2.
fn half_line_nodes(alpha: f64, scale: f64, extent: f64) -> Vec<(Node, bool)> {
    let rule = gauss_legendre(24);
    let mut out = Vec::new();
    let x1 = (1e-3 * scale).min(extent);
    let m = 1.0 / (1.0 - alpha);
    for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
        let u = 0.5 * (t + 1.0);
        out.push((Node { x: x1 * u.powf(m), w: 0.5 * wt * x1.powf(1.0 - alpha) * m }, true));
    }
    let mut a = x1;
    while a < extent {
        let b = (2.0 * a).min(a + 0.5 * scale).min(extent);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
            out.push((Node { x: mid + half * t, w: wt * half }, false));
        }
        a = b;
    }
    out
}

impl SeparableProbe {
    /// The x-profile without its cusp factor.
    fn smooth_x(&self, x: f64) -> f64 {
        match self.x {
            XProfile::Gaussian { center, width } => (-(x - center).powi(2) / (2.0 * width * width)).exp(),
            XProfile::Cusp { width, .. } => (-x * x / (2.0 * width * width)).exp(),
        }
    }

    fn alpha(&self) -> f64 {
        match self.x {
            XProfile::Cusp { alpha, .. } => alpha,
            XProfile::Gaussian { .. } => 0.0,
        }
    }

    fn width(&self) -> f64 {
        match self.x {
            XProfile::Gaussian { width, .. } | XProfile::Cusp { width, .. } => width,
        }
    }

    /// Support of the x-profile to double precision, split at the interface.
    fn x_extent(&self) -> (f64, f64) {
        match self.x {
            XProfile::Gaussian { center, width } => (center - 9.0 * width, center + 9.0 * width),
            XProfile::Cusp { width, .. } => (-9.0 * width, 9.0 * width),
        }
    }

    /// ⟨U, W_{k,λ,j}⟩ for the mode at +k, from a one-dimensional x-quadrature
    /// and the closed-form y-transform. The pairing with the mode at −k equals
    /// this value times the parity of the component (the profiles are even in y).
    pub fn pairing(&self, p: &MediumParams, mode: &ModeData) -> C64 {
        let c = self.component.index();
        let theta = mode.theta_m.norm().max(mode.theta_p.norm()).max(1e-3);
        let scale = self.width().min(1.0 / theta);
        let (xa, xb) = self.x_extent();
        let alpha = self.alpha();
        let mut acc = ZERO;
        for (right, extent) in [(true, xb.max(0.0)), (false, (-xa).max(0.0))] {
            if extent <= 0.0 || (!right && c >= 3) {
                continue;
            }
            for (n, absorbed) in half_line_nodes(alpha, scale, extent) {
                let x = if right { n.x } else { -n.x };
                let f = if absorbed { self.smooth_x(x) } else { self.smooth_x(x) * n.x.powf(-alpha) };
                acc += n.w * f * mode.vector(x, right)[c].conj();
            }
        }
        acc * material_weight(p, c) * self.y.transform(mode.index.k)
    }
}

/// Energy weight of component `c` in the H inner product.
fn material_weight(p: &MediumParams, c: usize) -> f64 {
    match c {
        0 => p.eps0,
        1 | 2 => p.mu0,
        3 => 1.0 / (p.eps0 * p.omega_e * p.omega_e),
        _ => 1.0 / (p.mu0 * p.omega_m * p.omega_m),
    }
}

/// ∫ (1 + y²)^{−s} dy = √π Γ(s − ½)/Γ(s).
pub fn y_weight_integral(s: f64) -> f64 {
    std::f64::consts::PI.sqrt() * libm::tgamma(s - 0.5) / libm::tgamma(s)
}

/// ‖W_{k,λ,j}‖²_{H_{−s}} of a mode (the y-modulus is 1; the weight is separable).
pub fn mode_weighted_norm_sq(p: &MediumParams, mode: &ModeData, s: WeightParams) -> f64 {
    let scale = 1.0 / mode.theta_m.re.abs().min(mode.theta_p.re.abs()).max(1e-6);
    let mut acc = 0.0;
    for right in [true, false] {
        let extent = (60.0 * scale).min(1e4);
        for (n, _) in half_line_nodes(0.0, scale.min(1.0), extent) {
            let x = if right { n.x } else { -n.x };
            let v = mode.vector(x, right);
            let e: f64 = (0..6).map(|c| material_weight(p, c) * v[c].norm_sqr()).sum();
            acc += n.w * e * (1.0 + x * x).powf(-s.s);
        }
    }
    acc * y_weight_integral(s.s)
}

/// One sample of the threshold probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSample {
    /// Frequency λ (inside the plasmonic band).
    pub lambda: f64,
    /// |λ − Ω_p|.
    pub distance: f64,
    /// k_E(λ).
    pub k_e: f64,
    /// J_E(λ).
    pub jacobian: f64,
    /// (|⟨U, W_{k_E}⟩|² + |⟨U, W_{−k_E}⟩|²)^{1/2}.
    pub pairing: f64,
    /// J_E·‖W_{k_E,λ,0}‖²_{H_{−s}}.
    pub ee_norm: f64,
    /// J_E·|⟨U, W⟩|².
    pub ee_energy: f64,
}

/// Samples and fitted log-log slopes against |λ − Ω_p|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFit {
    /// Samples in the order given.
    pub samples: Vec<ThresholdSample>,
    /// Slope of the pairing magnitude.
    pub slope_pairing: f64,
    /// Slope of J_E‖W‖²_{H_{−s}}.
    pub slope_norm: f64,
    /// Slope of J_E|⟨U, W⟩|².
    pub slope_energy: f64,
}

/// Threshold probes at plasmonic frequencies approaching Ω_p (non-critical case).
pub fn threshold_probe(p: &MediumParams, lambdas: &[f64], probe: &SeparableProbe, s: WeightParams) -> Result<ThresholdFit> {
    if p.is_critical() {
        return Err(DrudeError::Unsupported("threshold probes need non-critical parameters".into()));
    }
    if lambdas.len() < 2 {
        return Err(DrudeError::Config("threshold_probe needs at least two frequencies".into()));
    }
    let samples = par::map_collect(lambdas.len(), |i| -> Result<ThresholdSample> {
        let l = lambdas[i];
        let k = k_e(p, l)?;
        let jac = jacobian_e(p, l)?;
        let m = ModeData::new(p, ModeIndex::with_zone(k, l.abs(), 0, ZoneLabel::EE)?)?;
        // |⟨U, W_{−k}⟩| = |⟨U, W_k⟩| for a single component with an even y-profile
        let pair_sq = 2.0 * probe.pairing(p, &m).norm_sqr();
        let norm = mode_weighted_norm_sq(p, &m, s);
        Ok(ThresholdSample {
            lambda: l,
            distance: (l.abs() - p.omega_p()).abs(),
            k_e: k,
            jacobian: jac,
            pairing: pair_sq.sqrt(),
            ee_norm: jac * norm,
            ee_energy: jac * pair_sq,
        })
    });
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    let d: Vec<f64> = samples.iter().map(|s| s.distance).collect();
    let col = |f: fn(&ThresholdSample) -> f64| samples.iter().map(f).collect::<Vec<_>>();
    Ok(ThresholdFit {
        slope_pairing: loglog_slope(&d, &col(|s| s.pairing)),
        slope_norm: loglog_slope(&d, &col(|s| s.ee_norm)),
        slope_energy: loglog_slope(&d, &col(|s| s.ee_energy)),
        samples,
    })
}
