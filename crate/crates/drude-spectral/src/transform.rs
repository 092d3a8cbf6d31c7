//! The generalized Fourier transform F, its adjoint F* and the streaming
//! engine that evaluates F*·m(λ)·F for spectral multipliers m.
//!
//! The spectral plane is integrated with the wavenumber outermost: every
//! k-slice carries Gauss panels in λ over the bulk zones (square-root
//! substitution at the cuts), the plasmonic point λ_E(k), and optionally a
//! symmetric principal-value window around a frequency ω. Only the quadrant
//! k > 0, λ > 0 is meshed; the other three follow from the exact parity
//! relations of the modes. The y-transform of grid fields and the
//! y-synthesis of spectral sums are matrix products over chunks of slices.

use crate::error::{domain, DrudeError, Result};
use crate::fields::{FieldState, Grid2};
use crate::linalg::{gemm, MatRef};
use crate::medium::{cut_functions, MediumParams};
use crate::modes::{ModeData, ModeIndex};
use crate::par;
use crate::quadrature::{interval_panels, Node, Panel, PanelMap, QuadConfig};
use crate::spectral_geometry::{in_plasmon_band, jacobian_e, k_e, lambda_e, lambda_intervals, ZoneInterval, ZoneLabel};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
/// Slices processed per matrix-product chunk.
pub(crate) const CHUNK: usize = 32;
/// Sign of each component under k ↦ −k (H_x and K_x flip).
const PARITY: [f64; 6] = [1.0, -1.0, 1.0, 1.0, -1.0, 1.0];

/// What the spectral mesh has to resolve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    /// Largest |x − x'| between observation points and the source support.
    pub extent_x: f64,
    /// Largest |y − y'| between observation points and the source support.
    pub extent_y: f64,
    /// Width of the source (sets the default Λ_max).
    pub source_width: f64,
    /// Largest evolution time; wave packets travel c·t and must cancel in k.
    pub time: f64,
    /// Frequency of a principal-value window, if any.
    pub window: Option<f64>,
    /// Extra λ-breakpoints (band edges of spectral indicators).
    pub lambda_breaks: Vec<f64>,
}

impl MeshSpec {
    /// Mesh resolving observation on `grid` for a source of radius `source_radius` and width `width`.
    pub fn for_grid(grid: &Grid2, source_radius: f64, width: f64) -> Self {
        Self { extent_x: grid.lx + source_radius, extent_y: grid.ly + source_radius, source_width: width, time: 0.0, window: None, lambda_breaks: Vec::new() }
    }

    /// Adds an evolution horizon.
    pub fn with_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    /// Adds a principal-value window at ω.
    pub fn with_window(mut self, omega: f64) -> Self {
        self.window = Some(omega);
        self
    }

    /// Adds λ-breakpoints.
    pub fn with_lambda_breaks(mut self, breaks: &[f64]) -> Self {
        self.lambda_breaks.extend_from_slice(breaks);
        self
    }
}

/// A λ-panel of one zone at fixed k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPanel {
    /// Gauss panel in λ.
    pub panel: Panel,
    /// Zone of the panel interior.
    pub zone: ZoneLabel,
    /// Part of the principal-value window.
    pub window: bool,
}

/// The window center ω of a slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowCenter {
    /// Window frequency ω.
    pub omega: f64,
    /// Frequency at which the modes are evaluated (ω, nudged off excluded values).
    pub eval_lambda: f64,
    /// Window half-width at this k.
    pub rho: f64,
    /// Zone of (k, ω).
    pub zone: ZoneLabel,
}

/// All λ-nodes at one wavenumber k > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct KSlice {
    /// Wavenumber.
    pub k: f64,
    /// k-quadrature weight.
    pub wk: f64,
    /// Bulk λ-panels.
    pub panels: Vec<LambdaPanel>,
    /// λ_E(k) when (k, λ_E) is plasmonic and below Λ_max.
    pub plasmon: Option<f64>,
    /// Principal-value window center, if any.
    pub center: Option<WindowCenter>,
    /// Plasmonic pole at (k_E(ω), ω) carried by this slice, if any.
    pub residue: Option<PlasmonResidue>,
}

/// The point (k_E(ω), ω) where the plasmonic curve meets a window frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasmonResidue {
    /// Window frequency ω.
    pub omega: f64,
    /// J_E(ω) = |dk_E/dλ| at ω.
    pub jacobian: f64,
}

/// Position of a node inside its slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeSite {
    /// Gauss node `index` of panel `panel`.
    Panel {
        /// Panel index.
        panel: usize,
        /// Node index in the panel.
        index: usize,
    },
    /// The plasmonic point.
    Plasmon,
    /// The window center.
    Center,
    /// The plasmonic pole of a window frequency.
    Residue,
}

/// One (λ, j) node of a slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceNode {
    /// Frequency (> 0).
    pub lambda: f64,
    /// λ-weight (1 for the plasmonic point, 0 for the window center).
    pub w: f64,
    /// Channel.
    pub j: i8,
    /// Zone.
    pub zone: ZoneLabel,
    /// Position.
    pub site: NodeSite,
}

impl KSlice {
    /// Nodes in storage order: panels, then the plasmonic point, then the center channels.
    pub fn nodes(&self) -> Vec<SliceNode> {
        let mut out = Vec::new();
        for (pi, lp) in self.panels.iter().enumerate() {
            for (i, n) in lp.panel.nodes().iter().enumerate() {
                for &j in lp.zone.modes() {
                    out.push(SliceNode { lambda: n.x, w: n.w, j, zone: lp.zone, site: NodeSite::Panel { panel: pi, index: i } });
                }
            }
        }
        if let Some(l) = self.plasmon {
            out.push(SliceNode { lambda: l, w: 1.0, j: 0, zone: ZoneLabel::EE, site: NodeSite::Plasmon });
        }
        if let Some(c) = self.center {
            for &j in c.zone.modes() {
                out.push(SliceNode { lambda: c.eval_lambda, w: 0.0, j, zone: c.zone, site: NodeSite::Center });
            }
        }
        if let Some(r) = self.residue {
            out.push(SliceNode { lambda: r.omega, w: 0.0, j: 0, zone: ZoneLabel::EE, site: NodeSite::Residue });
        }
        out
    }

    /// Window nodes (both sides) as (λ, w) pairs.
    pub fn window_nodes(&self) -> Vec<Node> {
        self.panels.iter().filter(|p| p.window).flat_map(|p| p.panel.nodes()).collect()
    }

    /// Exact offsets λ − ω of the window nodes, in the order of `window_nodes`.
    pub fn window_offsets(&self) -> Vec<f64> {
        self.panels.iter().filter(|p| p.window).flat_map(|p| p.panel.offsets()).collect()
    }
}

/// Quadrature mesh of the spectral quadrant k > 0, λ > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMesh {
    /// Medium.
    pub params: MediumParams,
    /// Frequency truncation.
    pub lambda_max: f64,
    /// Wavenumber truncation.
    pub k_max: f64,
    /// k-slices in increasing k, followed by the residue slice of a plasmonic window.
    pub slices: Vec<KSlice>,
    /// What the mesh resolves.
    pub spec: MeshSpec,
}

/// Integration-variable breakpoints of the k-direction, all square-root cuts.
fn k_breaks(p: &MediumParams, spec: &MeshSpec, k_max: f64) -> Result<Vec<f64>> {
    let c_inv = (p.eps0 * p.mu0).sqrt();
    let mut b = vec![p.k_c(), p.omega_e * c_inv, p.omega_m * c_inv];
    let mut freqs: Vec<f64> = spec.lambda_breaks.clone();
    if let Some(w) = spec.window {
        freqs.push(w);
    }
    for f in freqs {
        if f <= 0.0 {
            continue;
        }
        let c = cut_functions(p, f)?;
        b.push(c.k0);
        b.extend(c.k_d);
        b.extend(c.k_i);
        if in_plasmon_band(p, f) {
            // the plasmonic point crosses the frequency f at k_E(f)
            b.push(k_e(p, f)?);
        }
    }
    b.retain(|&x| x > 0.0 && x < k_max);
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    Ok(b)
}

/// Merges two intervals of the same zone that meet at `at` (a removable breakpoint).
fn merge_at(mut ivs: Vec<ZoneInterval>, at: f64) -> Vec<ZoneInterval> {
    let mut i = 0;
    while i + 1 < ivs.len() {
        let (l, r) = (ivs[i], ivs[i + 1]);
        if l.zone == r.zone && (l.b - at).abs() <= 1e-12 * at && (r.a - at).abs() <= 1e-12 * at {
            ivs[i] = ZoneInterval { zone: l.zone, a: l.a, b: r.b, cut_a: l.cut_a, cut_b: r.cut_b };
            ivs.remove(i + 1);
        } else {
            i += 1;
        }
    }
    ivs
}

/// Evaluation frequency for a node that may sit on an excluded value.
fn nudge(p: &MediumParams, lambda: f64) -> f64 {
    if p.is_excluded(lambda, 0.0) {
        lambda * (1.0 + 1e-9)
    } else {
        lambda
    }
}

/// Bound on |d(phase)/dλ| of the mode profiles over |x| ≤ `extent` for λ ≥ `a`:
/// the Drude refractive index n(λ) grows like Ω_eΩ_m/λ² below min(Ω_e, Ω_m).
fn x_phase_rate(p: &MediumParams, extent: f64, a: f64) -> f64 {
    let c_inv = (p.eps0 * p.mu0).sqrt();
    let n = if a > 0.0 && a < p.omega_min() {
        let n2 = (1.0 - p.omega_e * p.omega_e / (a * a)) * (1.0 - p.omega_m * p.omega_m / (a * a));
        n2.max(0.0).sqrt()
    } else {
        0.0
    };
    extent * c_inv * n.max(1.0)
}

/// Splits [a, b] into dyadic pieces [a, 2a], [2a, 4a], … below ½·min(Ω_e, Ω_m),
/// where the Drude-side phase rate grows like 1/λ², so that each piece can be
/// sized by the rate at its lower end. Cut flags stay on the outer ends.
fn dyadic_pieces(p: &MediumParams, a: f64, b: f64, ca: bool, cb: bool) -> Vec<(f64, f64, bool, bool)> {
    let split = 0.5 * p.omega_min();
    let mut out = Vec::new();
    let mut lo = a;
    let mut first = true;
    while lo < split && 2.0 * lo < b {
        out.push((lo, 2.0 * lo, first && ca, false));
        lo *= 2.0;
        first = false;
    }
    out.push((lo, b, first && ca, cb));
    out
}

/// Mirrored square-root panels over [c − ρ, c + ρ], graded geometrically in u = |x − c|^{1/2}.
/// Nodes come in pairs c ± u², so odd singularities cancel pairwise.
fn window_panels(c: f64, rho: f64, levels: usize) -> Vec<Panel> {
    let umax = rho.sqrt();
    let mut edges = vec![0.0];
    for m in (0..=levels).rev() {
        edges.push(umax * 0.5f64.powi(m as i32));
    }
    let mut out = Vec::new();
    for map in [PanelMap::SqrtRight { c }, PanelMap::SqrtLeft { c }] {
        for e in edges.windows(2) {
            out.push(Panel { map, u0: e[0], u1: e[1] });
        }
    }
    out
}

impl SpectralMesh {
    /// Builds the mesh for `spec` under the tolerances of `qc`.
    pub fn build(p: &MediumParams, qc: &QuadConfig, spec: MeshSpec) -> Result<Self> {
        qc.validate()?;
        if !(spec.extent_x > 0.0 && spec.extent_y > 0.0 && spec.source_width > 0.0 && spec.time >= 0.0) {
            return Err(DrudeError::Config("mesh extents and source width must be positive".into()));
        }
        if let Some(w) = spec.window {
            if !(w > 0.0) {
                return domain("principal-value windows are supported for ω > 0");
            }
            if p.is_excluded(w, qc.exclusion_rel * p.frequency_scale()) && !qc.allow_excluded {
                return domain(format!("ω = {w} lies in the excluded set σ_exc"));
            }
        }
        let lambda_max = qc.lambda_max_for(p, spec.source_width);
        let k_max = qc.k_max.unwrap_or((p.eps0 * p.mu0).sqrt() * lambda_max);
        let c = p.light_speed();
        let rate_k = spec.extent_x.max(spec.extent_y) + c * spec.time;
        let mut ends = vec![0.0];
        ends.extend(k_breaks(p, &spec, k_max)?);
        ends.push(k_max);
        // a window frequency in the plasmonic band puts a simple pole in k at k_E(ω)
        let pole = match spec.window {
            Some(w) if !p.is_critical() && in_plasmon_band(p, w) => {
                let ks = k_e(p, w)?;
                (ks < k_max).then_some((w, ks))
            }
            _ => None,
        };
        let mut k_window = None;
        if let Some((_, ks)) = pole {
            let i = ends.iter().position(|&e| (e - ks).abs() <= 1e-12 * ks).ok_or_else(|| DrudeError::Domain("k_E(ω) is not a mesh break".into()))?;
            let rho = (qc.pv_window_rel * ks).min(0.5 * (ks - ends[i - 1])).min(0.5 * (ends[i + 1] - ks));
            k_window = Some((ends[i], rho));
        }
        let mut k_nodes = Vec::new();
        for w in ends.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            let (mut ca, mut cb) = (a > 0.0, b < k_max);
            if let Some((ks, rho)) = k_window {
                if a == ks {
                    a += rho;
                    ca = false;
                }
                if b == ks {
                    b -= rho;
                    cb = false;
                }
            }
            let panels = interval_panels(a, b, ca, cb, qc.node_count(b - a, rate_k), qc.near_cut);
            for pn in panels {
                k_nodes.extend(pn.nodes());
            }
        }
        if let Some((ks, rho)) = k_window {
            for pn in window_panels(ks, rho, qc.window_levels) {
                k_nodes.extend(pn.nodes());
            }
        }
        k_nodes.sort_by(|a, b| a.x.total_cmp(&b.x));
        let slices = par::map_collect(k_nodes.len(), |i| Self::slice(p, qc, &spec, lambda_max, k_nodes[i]));
        let mut slices = slices.into_iter().collect::<Result<Vec<_>>>()?;
        if let Some((w, ks)) = pole {
            let residue = PlasmonResidue { omega: w, jacobian: jacobian_e(p, w)? };
            slices.push(KSlice { k: ks, wk: 1.0, panels: Vec::new(), plasmon: None, center: None, residue: Some(residue) });
        }
        Ok(Self { params: *p, lambda_max, k_max, slices, spec })
    }

    fn slice(p: &MediumParams, qc: &QuadConfig, spec: &MeshSpec, lambda_max: f64, kn: Node) -> Result<KSlice> {
        let k = kn.x;
        let lambda_min = qc.lambda_min_rel * p.frequency_scale();
        let mut ivs = lambda_intervals(p, k, lambda_max, &spec.lambda_breaks);
        if let Some(w) = spec.window {
            ivs = merge_at(ivs, w);
        }
        let mut panels = Vec::new();
        let mut center = None;
        let push = |panels: &mut Vec<LambdaPanel>, zone, a: f64, b: f64, ca, cb| {
            for (a, b, ca, cb) in dyadic_pieces(p, a, b, ca, cb) {
                let rate = x_phase_rate(p, spec.extent_x, a);
                for pn in interval_panels(a, b, ca, cb, qc.node_count(b - a, rate), qc.near_cut) {
                    panels.push(LambdaPanel { panel: pn, zone, window: false });
                }
            }
        };
        for mut iv in ivs {
            if iv.b <= lambda_min {
                continue;
            }
            if iv.a < lambda_min {
                iv.a = lambda_min;
                iv.cut_a = false;
            }
            let in_window = spec.window.filter(|&w| iv.a < w && w < iv.b);
            match in_window {
                None => push(&mut panels, iv.zone, iv.a, iv.b, iv.cut_a, iv.cut_b),
                Some(w) => {
                    let rho = (qc.pv_window_rel * p.omega_m).min(0.5 * (w - iv.a)).min(0.5 * (iv.b - w));
                    push(&mut panels, iv.zone, iv.a, w - rho, iv.cut_a, false);
                    for pn in window_panels(w, rho, qc.window_levels) {
                        panels.push(LambdaPanel { panel: pn, zone: iv.zone, window: true });
                    }
                    push(&mut panels, iv.zone, w + rho, iv.b, false, iv.cut_b);
                    center = Some(WindowCenter { omega: w, eval_lambda: nudge(p, w), rho, zone: iv.zone });
                }
            }
        }
        let plasmon = if k > p.k_c() {
            let l = if p.is_critical() { p.omega_p() } else { lambda_e(p, k)? };
            (l < lambda_max).then_some(l)
        } else {
            None
        };
        Ok(KSlice { k, wk: kn.w, panels, plasmon, center, residue: None })
    }

    /// Total number of (k, λ, j) nodes in the quadrant.
    pub fn node_count(&self) -> usize {
        self.slices.iter().map(|s| s.nodes().len()).sum()
    }
}

/// Values Û on the mesh for the four quadrants (k, λ), (−k, λ), (k, −λ), (−k, −λ).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAmplitude {
    /// Start of each slice in `values`.
    pub offsets: Vec<usize>,
    /// Per node, the four quadrant values.
    pub values: Vec<[C64; 4]>,
}

impl SpectralAmplitude {
    /// Zero amplitude on `mesh`.
    pub fn zeros(mesh: &SpectralMesh) -> Self {
        let mut offsets = Vec::with_capacity(mesh.slices.len() + 1);
        let mut n = 0;
        for s in &mesh.slices {
            offsets.push(n);
            n += s.nodes().len();
        }
        offsets.push(n);
        Self { offsets, values: vec![[ZERO; 4]; n] }
    }

    /// Values of slice `s`.
    pub fn slice(&self, s: usize) -> &[[C64; 4]] {
        &self.values[self.offsets[s]..self.offsets[s + 1]]
    }

    /// Largest modulus.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().flat_map(|v| v.iter()).fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Spectral inner product Σ w Û·conj(V̂) over all quadrants and channels.
    pub fn inner(&self, other: &SpectralAmplitude, mesh: &SpectralMesh) -> Result<C64> {
        if self.values.len() != other.values.len() {
            return Err(DrudeError::GridMismatch("spectral amplitudes live on different meshes".into()));
        }
        let parts = par::map_collect(mesh.slices.len(), |s| {
            let sl = &mesh.slices[s];
            let nodes = sl.nodes();
            let mut acc = ZERO;
            for ((n, a), b) in nodes.iter().zip(self.slice(s)).zip(other.slice(s)) {
                let mut q = ZERO;
                for i in 0..4 {
                    q += a[i] * b[i].conj();
                }
                acc += n.w * q;
            }
            acc * sl.wk
        });
        Ok(par::pairwise_sum_c(&parts))
    }

    /// Σ w |Û|².
    pub fn norm_sq(&self, mesh: &SpectralMesh) -> f64 {
        self.inner(self, mesh).map(|c| c.re).unwrap_or(0.0)
    }

    /// Band energy Σ_{λ ∈ [a, b]} w |Û|² over both signs of k and the frequency sign `sign`.
    /// In the critical case the plasmonic eigenvalues are not part of the absolutely continuous band.
    pub fn band_energy(&self, mesh: &SpectralMesh, a: f64, b: f64, sign: f64) -> f64 {
        let parts = par::map_collect(mesh.slices.len(), |s| {
            let sl = &mesh.slices[s];
            let mut acc = 0.0;
            for (n, v) in sl.nodes().iter().zip(self.slice(s)) {
                if n.site == NodeSite::Plasmon && mesh.params.is_critical() {
                    continue;
                }
                let l = sign * n.lambda;
                if l >= a.min(b) && l <= a.max(b) {
                    let q = if sign > 0.0 { 0 } else { 2 };
                    acc += n.w * (v[q].norm_sqr() + v[q + 1].norm_sqr());
                }
            }
            acc * sl.wk
        });
        par::pairwise_sum(&parts)
    }

    /// Writes the values as little-endian complex64 with a JSON sidecar.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for v in self.values.iter().flat_map(|v| v.iter()) {
            f.write_all(&(v.re as f32).to_le_bytes())?;
            f.write_all(&(v.im as f32).to_le_bytes())?;
        }
        f.flush()?;
        let side = serde_json::json!({
            "format": "drude-spectral/1",
            "dtype": "complex64-le",
            "nodes": self.values.len(),
            "quadrants": ["(k,l)", "(-k,l)", "(k,-l)", "(-k,-l)"],
            "offsets": self.offsets,
        });
        std::fs::write(path.with_extension("json"), serde_json::to_string_pretty(&side)?)?;
        Ok(())
    }

    /// Reads values written by [`SpectralAmplitude::write_binary`].
    pub fn read_binary(path: &Path) -> Result<Self> {
        let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path.with_extension("json"))?)?;
        let offsets: Vec<usize> = serde_json::from_value(side["offsets"].clone())?;
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let vals: Vec<C64> = bytes
            .chunks_exact(8)
            .map(|c| C64::new(f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64, f32::from_le_bytes([c[4], c[5], c[6], c[7]]) as f64))
            .collect();
        if offsets.last().copied().unwrap_or(0) * 4 != vals.len() {
            return Err(DrudeError::GridMismatch("spectral dump length does not match its sidecar".into()));
        }
        Ok(Self { offsets, values: vals.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]).collect() })
    }
}

/// A contiguous run of active grid rows of one component.
#[derive(Debug, Clone, Copy)]
struct RowBlock {
    comp: usize,
    lo: usize,
    hi: usize,
}

/// Support and quadrature weights of a field entering the pairing ⟨U, W⟩.
pub(crate) struct PairingInput<'a> {
    u: &'a FieldState,
    blocks: Vec<RowBlock>,
    left: bool,
    y_lo: usize,
    y_hi: usize,
    x_lo: usize,
    x_hi: usize,
    rows: usize,
    /// Weight of each active row (material × x-trapezoid × interface split).
    row_w: Vec<f64>,
}

impl<'a> PairingInput<'a> {
    pub(crate) fn new(p: &MediumParams, u: &'a FieldState) -> Self {
        let g = u.grid;
        let i0 = g.i0();
        let mat = [p.eps0, p.mu0, p.mu0, 1.0 / (p.eps0 * p.omega_e * p.omega_e), 1.0 / (p.mu0 * p.omega_m * p.omega_m), 1.0 / (p.mu0 * p.omega_m * p.omega_m)];
        let mut blocks = Vec::new();
        let (mut y_lo, mut y_hi) = (usize::MAX, 0);
        for c in 0..6 {
            let a = &u.comps[c];
            let (mut lo, mut hi) = (usize::MAX, 0);
            let start = if c >= 3 { i0 } else { 0 };
            for i in start..g.nx {
                for j in 0..g.ny {
                    if a[g.idx(i, j)] != ZERO {
                        lo = lo.min(i);
                        hi = hi.max(i);
                        y_lo = y_lo.min(j);
                        y_hi = y_hi.max(j);
                    }
                }
            }
            if lo != usize::MAX {
                blocks.push(RowBlock { comp: c, lo, hi });
            }
        }
        let left = u.hx_left.iter().any(|v| *v != ZERO);
        if left {
            for (j, v) in u.hx_left.iter().enumerate() {
                if *v != ZERO {
                    y_lo = y_lo.min(j);
                    y_hi = y_hi.max(j);
                }
            }
        }
        let x_lo = blocks.iter().map(|b| b.lo).min().unwrap_or(0).min(if left { i0 } else { usize::MAX });
        let x_hi = blocks.iter().map(|b| b.hi).max().unwrap_or(0).max(if left { i0 } else { 0 });
        let mut row_w = Vec::new();
        for b in &blocks {
            for i in b.lo..=b.hi {
                let f = if i == i0 && (b.comp == 1 || b.comp >= 3) { 0.5 } else { 1.0 };
                row_w.push(mat[b.comp] * g.wx(i) * f);
            }
        }
        if left {
            row_w.push(0.5 * mat[1] * g.wx(i0));
        }
        let rows = row_w.len();
        if y_lo == usize::MAX {
            y_lo = 0;
            y_hi = 0;
        }
        Self { u, blocks, left, y_lo, y_hi, x_lo, x_hi, rows, row_w }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.rows == 0
    }

    /// Weighted y-transforms w_r·Σ_j w_j U_r(y_j) e^{∓i k y_j} of every active row for each k.
    /// Layout: `[row][2·kk + pm]`, pm = 0 for +k and 1 for −k.
    pub(crate) fn y_table(&self, ks: &[f64]) -> Vec<C64> {
        let g = self.u.grid;
        let ncol = 2 * ks.len();
        let ny_act = self.y_hi + 1 - self.y_lo;
        let mut phase = vec![ZERO; ny_act * ncol];
        for jj in 0..ny_act {
            let j = self.y_lo + jj;
            let (y, wy) = (g.y(j), g.wy(j));
            for (kk, &k) in ks.iter().enumerate() {
                let e = C64::from_polar(wy, -k * y);
                phase[jj * ncol + 2 * kk] = e;
                phase[jj * ncol + 2 * kk + 1] = e.conj();
            }
        }
        let mut out = vec![ZERO; self.rows * ncol];
        if self.is_zero() {
            return out;
        }
        let b = MatRef { data: &phase, offset: 0, rows: ny_act, cols: ncol, rs: ncol, cs: 1 };
        let mut r0 = 0;
        for blk in &self.blocks {
            let m = blk.hi + 1 - blk.lo;
            let a = MatRef { data: &self.u.comps[blk.comp], offset: blk.lo * g.ny + self.y_lo, rows: m, cols: ny_act, rs: g.ny, cs: 1 };
            gemm(a, b, 0.0, &mut out, r0 * ncol, ncol, 1);
            r0 += m;
        }
        if self.left {
            let a = MatRef { data: &self.u.hx_left, offset: self.y_lo, rows: 1, cols: ny_act, rs: ny_act, cs: 1 };
            gemm(a, b, 0.0, &mut out, r0 * ncol, ncol, 1);
        }
        for (r, w) in self.row_w.iter().enumerate() {
            out[r * ncol..(r + 1) * ncol].iter_mut().for_each(|v| *v *= *w);
        }
        out
    }

    /// The four quadrant pairings of a mode with the field, given the y-table column pair at `kk`.
    pub(crate) fn pair(&self, mode: &ModeData, ytab: &[C64], ncol: usize, kk: usize, psi: &mut Vec<C64>, dpsi: &mut Vec<C64>) -> [C64; 4] {
        if self.is_zero() {
            return [ZERO; 4];
        }
        let g = self.u.grid;
        let i0 = g.i0();
        let n = self.x_hi + 1 - self.x_lo;
        psi.resize(n, ZERO);
        dpsi.resize(n, ZERO);
        mode.psi_on_axis(g.x(self.x_lo), g.hx, n, psi, dpsi);
        let (cl, cr) = (mode.coefficients(false), mode.coefficients(true));
        let mut q = [ZERO; 4];
        let mut r = 0;
        for blk in &self.blocks {
            let c = blk.comp;
            let s = PARITY[c];
            let from_d = c == 2 || c == 5;
            let (mut s1, mut s2, mut s3, mut s4) = (ZERO, ZERO, ZERO, ZERO);
            for i in blk.lo..=blk.hi {
                let coef = if i >= i0 { cr[c] } else { cl[c] };
                let f = if from_d { dpsi[i - self.x_lo] } else { psi[i - self.x_lo] };
                let pv = coef * f;
                let (a, b) = (ytab[r * ncol + 2 * kk], ytab[r * ncol + 2 * kk + 1]);
                s1 += a * pv.conj();
                s3 += a * pv;
                s2 += b * pv.conj();
                s4 += b * pv;
                r += 1;
            }
            q[0] += s1;
            q[1] += s * s2;
            q[2] += s * s3;
            q[3] += s4;
        }
        if self.left {
            let pv = cl[1] * psi[i0 - self.x_lo];
            let (a, b) = (ytab[r * ncol + 2 * kk], ytab[r * ncol + 2 * kk + 1]);
            q[0] += a * pv.conj();
            q[1] -= b * pv.conj();
            q[2] -= a * pv;
            q[3] += b * pv;
        }
        q
    }
}

/// Evaluates the modes of the nodes of a slice.
pub(crate) fn slice_modes(p: &MediumParams, k: f64, nodes: &[SliceNode]) -> Result<Vec<ModeData>> {
    nodes.iter().map(|n| ModeData::new(p, ModeIndex::with_zone(k, nudge(p, n.lambda), n.j, n.zone)?)).collect()
}

/// Generalized Fourier transform of `u` on the mesh.
pub fn forward(u: &FieldState, mesh: &SpectralMesh) -> Result<SpectralAmplitude> {
    let p = &mesh.params;
    let input = PairingInput::new(p, u);
    let mut amp = SpectralAmplitude::zeros(mesh);
    if input.is_zero() {
        return Ok(amp);
    }
    for (ci, chunk) in mesh.slices.chunks(CHUNK).enumerate() {
        let ks: Vec<f64> = chunk.iter().map(|s| s.k).collect();
        let ytab = input.y_table(&ks);
        let ncol = 2 * ks.len();
        let res = par::map_collect(chunk.len(), |kk| -> Result<Vec<[C64; 4]>> {
            let sl = &chunk[kk];
            let nodes = sl.nodes();
            let modes = slice_modes(p, sl.k, &nodes)?;
            let (mut psi, mut dpsi) = (Vec::new(), Vec::new());
            Ok(modes.iter().map(|m| input.pair(m, &ytab, ncol, kk, &mut psi, &mut dpsi)).collect())
        });
        for (kk, r) in res.into_iter().enumerate() {
            let s = ci * CHUNK + kk;
            let off = amp.offsets[s];
            for (i, v) in r?.into_iter().enumerate() {
                amp.values[off + i] = v;
            }
        }
    }
    Ok(amp)
}

/// Information about the principal-value window handed to multipliers.
#[derive(Debug, Clone)]
pub struct WindowInfo {
    /// Window center ω.
    pub omega: f64,
    /// Lower end ω − ρ.
    pub a: f64,
    /// Upper end ω + ρ.
    pub b: f64,
    /// Window nodes on both sides.
    pub nodes: Vec<Node>,
    /// Exact offsets λ − ω of the window nodes.
    pub offsets: Vec<f64>,
}

/// A bounded function m(λ) applied through F*·m·F, with one output per slot.
pub trait SpectralMultiplier: Sync {
    /// Number of simultaneous outputs.
    fn slots(&self) -> usize;
    /// Weights for the Gauss nodes of `panel` at signed frequencies `sign·λ`.
    /// `out[slot][i]` replaces the plain weight `nodes[i].w`.
    fn panel_weights(&self, panel: &Panel, nodes: &[Node], sign: f64, out: &mut [Vec<C64>]);
    /// Weight of the plasmonic point at signed frequency λ (unit λ-measure).
    fn point_weight(&self, lambda: f64, slot: usize) -> C64;
    /// Weight of the window center at +ω.
    fn center_weight(&self, _window: &WindowInfo, _slot: usize) -> C64 {
        ZERO
    }
    /// Weight of the plasmonic pole (k_E(ω), +ω) of a window frequency.
    fn residue_weight(&self, _residue: &PlasmonResidue, _slot: usize) -> C64 {
        ZERO
    }
}

/// m ≡ 1, optionally without the plasmonic points.
#[derive(Debug, Clone, Copy)]
pub struct Identity {
    /// Include the plasmonic points.
    pub plasmon: bool,
}

impl SpectralMultiplier for Identity {
    fn slots(&self) -> usize {
        1
    }
    fn panel_weights(&self, _panel: &Panel, nodes: &[Node], _sign: f64, out: &mut [Vec<C64>]) {
        out[0].clear();
        out[0].extend(nodes.iter().map(|n| C64::new(n.w, 0.0)));
    }
    fn point_weight(&self, _lambda: f64, _slot: usize) -> C64 {
        if self.plasmon {
            C64::new(1.0, 0.0)
        } else {
            ZERO
        }
    }
}

/// Keeps only the plasmonic points of one frequency sign.
#[derive(Debug, Clone, Copy)]
pub struct PlasmonOnly {
    /// +1 or −1.
    pub sign: f64,
}

impl SpectralMultiplier for PlasmonOnly {
    fn slots(&self) -> usize {
        1
    }
    fn panel_weights(&self, _panel: &Panel, nodes: &[Node], _sign: f64, out: &mut [Vec<C64>]) {
        out[0].clear();
        out[0].resize(nodes.len(), ZERO);
    }
    fn point_weight(&self, lambda: f64, _slot: usize) -> C64 {
        if lambda * self.sign > 0.0 {
            C64::new(1.0, 0.0)
        } else {
            ZERO
        }
    }
}

/// Per-slice output buffer: `[slot][pm][row]` with rows `c·nx + i` and the H_x left limit last.
pub(crate) struct SliceAccum {
    pub(crate) k: f64,
    pub(crate) wk: f64,
    pub(crate) g: Vec<C64>,
}

/// Output-axis geometry.
#[derive(Clone, Copy)]
pub(crate) struct OutAxis {
    grid: Grid2,
    rows: usize,
}

impl OutAxis {
    pub(crate) fn new(grid: Grid2) -> Self {
        Self { grid, rows: 6 * grid.nx + 1 }
    }
}

/// Accumulates the x-profiles of the kept nodes of one slice into g±(x) per slot.
///
/// `d[n]` holds, per slot, the four multiplied quadrant coefficients of node `n`.
pub(crate) fn accumulate_slice(axis: OutAxis, modes: &[ModeData], d: &[Vec<[C64; 4]>], slots: usize) -> Vec<C64> {
    let g = axis.grid;
    let (nx, i0) = (g.nx, g.i0());
    let rows = axis.rows;
    let mut out = vec![ZERO; slots * 2 * rows];
    let nn = modes.len();
    if nn == 0 {
        return out;
    }
    // basis matrices [ψ_n | conj ψ_n] and [ψ'_n | conj ψ'_n], column-major nx × 2N
    let mut bpsi = vec![ZERO; nx * 2 * nn];
    let mut bdpsi = vec![ZERO; nx * 2 * nn];
    let (mut psi, mut dpsi) = (vec![ZERO; nx], vec![ZERO; nx]);
    for (n, m) in modes.iter().enumerate() {
        m.psi_on_axis(g.x(0), g.hx, nx, &mut psi, &mut dpsi);
        for i in 0..nx {
            bpsi[n * nx + i] = psi[i];
            bpsi[(nn + n) * nx + i] = psi[i].conj();
            bdpsi[n * nx + i] = dpsi[i];
            bdpsi[(nn + n) * nx + i] = dpsi[i].conj();
        }
    }
    const PSI_COMPS: [usize; 4] = [0, 1, 3, 4];
    const DPSI_COMPS: [usize; 2] = [2, 5];
    for right in [false, true] {
        let (lo, hi) = if right { (i0, nx) } else { (0, i0) };
        let m_rows = hi - lo;
        if m_rows == 0 {
            continue;
        }
        for (comps, basis) in [(&PSI_COMPS[..], &bpsi), (&DPSI_COMPS[..], &bdpsi)] {
            let ncol = slots * 2 * comps.len();
            // coefficient matrix (2N × ncol), row-major
            let mut cm = vec![ZERO; 2 * nn * ncol];
            for (n, m) in modes.iter().enumerate() {
                let coef = m.coefficients(right);
                for s in 0..slots {
                    let [d1, d2, d3, d4] = d[n][s];
                    for (cc, &c) in comps.iter().enumerate() {
                        let (a, sg) = (coef[c], PARITY[c]);
                        let col_p = (s * 2) * comps.len() + cc;
                        let col_m = (s * 2 + 1) * comps.len() + cc;
                        cm[n * ncol + col_p] = d1 * a;
                        cm[(nn + n) * ncol + col_p] = d3 * sg * a.conj();
                        cm[n * ncol + col_m] = d2 * sg * a;
                        cm[(nn + n) * ncol + col_m] = d4 * a.conj();
                    }
                }
            }
            let mut t = vec![ZERO; m_rows * ncol];
            gemm(
                MatRef { data: basis, offset: lo, rows: m_rows, cols: 2 * nn, rs: 1, cs: nx },
                MatRef { data: &cm, offset: 0, rows: 2 * nn, cols: ncol, rs: ncol, cs: 1 },
                0.0,
                &mut t,
                0,
                1,
                m_rows,
            );
            for s in 0..slots {
                for pm in 0..2 {
                    for (cc, &c) in comps.iter().enumerate() {
                        let col = (s * 2 + pm) * comps.len() + cc;
                        let dst = (s * 2 + pm) * rows + c * nx + lo;
                        out[dst..dst + m_rows].copy_from_slice(&t[col * m_rows..(col + 1) * m_rows]);
                    }
                }
            }
        }
    }
    // H_x left limit at the interface
    for (n, m) in modes.iter().enumerate() {
        let a = m.coefficients(false)[1];
        let p0 = bpsi[n * nx + i0];
        for s in 0..slots {
            let [d1, d2, d3, d4] = d[n][s];
            out[(s * 2) * rows + rows - 1] += d1 * a * p0 - d3 * (a * p0).conj();
            out[(s * 2 + 1) * rows + rows - 1] += -d2 * a * p0 + d4 * (a * p0).conj();
        }
    }
    out
}

/// Adds Σ_k w_k (g⁺ e^{iky} + g⁻ e^{−iky}) of a chunk of slices to the outputs.
pub(crate) fn synthesize_chunk(axis: OutAxis, accs: &[SliceAccum], slots: usize, outs: &mut [FieldState]) {
    let g = axis.grid;
    let (nx, ny, rows) = (g.nx, g.ny, axis.rows);
    let ncol = 2 * accs.len();
    if ncol == 0 {
        return;
    }
    let mut phase = vec![ZERO; ncol * ny];
    for (kk, a) in accs.iter().enumerate() {
        for j in 0..ny {
            let e = C64::from_polar(a.wk, a.k * g.y(j));
            phase[(2 * kk) * ny + j] = e;
            phase[(2 * kk + 1) * ny + j] = e.conj();
        }
    }
    let b = MatRef { data: &phase, offset: 0, rows: ncol, cols: ny, rs: ny, cs: 1 };
    let mut amat = vec![ZERO; nx * ncol];
    for (s, out) in outs.iter_mut().enumerate().take(slots) {
        for c in 0..6 {
            let mut any = false;
            for (kk, a) in accs.iter().enumerate() {
                for pm in 0..2 {
                    let src = (s * 2 + pm) * rows + c * nx;
                    let col = 2 * kk + pm;
                    amat[col * nx..(col + 1) * nx].copy_from_slice(&a.g[src..src + nx]);
                    any |= a.g[src..src + nx].iter().any(|v| *v != ZERO);
                }
            }
            if !any {
                continue;
            }
            gemm(MatRef { data: &amat, offset: 0, rows: nx, cols: ncol, rs: 1, cs: nx }, b, 1.0, &mut out.comps[c], 0, ny, 1);
        }
        for j in 0..ny {
            let mut v = ZERO;
            for (kk, a) in accs.iter().enumerate() {
                for pm in 0..2 {
                    v += a.g[(s * 2 + pm) * rows + rows - 1] * phase[(2 * kk + pm) * ny + j];
                }
            }
            out.hx_left[j] += v;
        }
    }
}

/// Multiplied quadrant coefficients of every node of a slice, per slot.
fn slice_coefficients<M: SpectralMultiplier + ?Sized>(sl: &KSlice, nodes: &[SliceNode], vals: &[[C64; 4]], mult: &M) -> Vec<Vec<[C64; 4]>> {
    let slots = mult.slots();
    let mut out = vec![vec![[ZERO; 4]; slots]; nodes.len()];
    let mut wp: Vec<Vec<C64>> = vec![Vec::new(); slots];
    let mut wm: Vec<Vec<C64>> = vec![Vec::new(); slots];
    let mut panel_cache: Option<usize> = None;
    let window =
        sl.center.map(|c| WindowInfo { omega: c.omega, a: c.omega - c.rho, b: c.omega + c.rho, nodes: sl.window_nodes(), offsets: sl.window_offsets() });
    for (n, node) in nodes.iter().enumerate() {
        let v = vals[n];
        match node.site {
            NodeSite::Panel { panel, index } => {
                if panel_cache != Some(panel) {
                    let pn = &sl.panels[panel].panel;
                    let pnodes = pn.nodes();
                    mult.panel_weights(pn, &pnodes, 1.0, &mut wp);
                    mult.panel_weights(pn, &pnodes, -1.0, &mut wm);
                    panel_cache = Some(panel);
                }
                for s in 0..slots {
                    let (a, b) = (wp[s][index], wm[s][index]);
                    out[n][s] = [a * v[0], a * v[1], b * v[2], b * v[3]];
                }
            }
            NodeSite::Plasmon => {
                for s in 0..slots {
                    let (a, b) = (mult.point_weight(node.lambda, s), mult.point_weight(-node.lambda, s));
                    out[n][s] = [a * v[0], a * v[1], b * v[2], b * v[3]];
                }
            }
            NodeSite::Center => {
                if let Some(w) = &window {
                    for s in 0..slots {
                        let a = mult.center_weight(w, s);
                        out[n][s] = [a * v[0], a * v[1], ZERO, ZERO];
                    }
                }
            }
            NodeSite::Residue => {
                if let Some(r) = &sl.residue {
                    for s in 0..slots {
                        let a = mult.residue_weight(r, s);
                        out[n][s] = [a * v[0], a * v[1], ZERO, ZERO];
                    }
                }
            }
        }
    }
    out
}

/// Evaluates F*·m·Û on `grid` for every slot of `mult`.
///
/// Nodes whose four amplitudes are all below `skip_abs` are left out.
pub fn synthesize<M: SpectralMultiplier + ?Sized>(
    amp: &SpectralAmplitude,
    mesh: &SpectralMesh,
    mult: &M,
    grid: Grid2,
    skip_abs: f64,
) -> Result<Vec<FieldState>> {
    let p = &mesh.params;
    let slots = mult.slots();
    let axis = OutAxis::new(grid);
    let mut outs = vec![FieldState::zeros(grid); slots];
    for (ci, chunk) in mesh.slices.chunks(CHUNK).enumerate() {
        let accs = par::map_collect(chunk.len(), |kk| -> Result<SliceAccum> {
            let s = ci * CHUNK + kk;
            let sl = &chunk[kk];
            let nodes = sl.nodes();
            let vals = amp.slice(s);
            let coefs = slice_coefficients(sl, &nodes, vals, mult);
            let keep: Vec<usize> =
                (0..nodes.len()).filter(|&n| vals[n].iter().any(|v| v.norm() > skip_abs) && coefs[n].iter().any(|c| c.iter().any(|v| *v != ZERO))).collect();
            let kept_nodes: Vec<SliceNode> = keep.iter().map(|&n| nodes[n]).collect();
            let modes = slice_modes(p, sl.k, &kept_nodes)?;
            let d: Vec<Vec<[C64; 4]>> = keep.iter().map(|&n| coefs[n].clone()).collect();
            Ok(SliceAccum { k: sl.k, wk: sl.wk, g: accumulate_slice(axis, &modes, &d, slots) })
        });
        let accs = accs.into_iter().collect::<Result<Vec<_>>>()?;
        synthesize_chunk(axis, &accs, slots, &mut outs);
    }
    Ok(outs)
}

/// Evaluates F*·m·Û at scattered points; returns `[slot][point]` six-component values.
///
/// At x = 0 the right limits are returned.
pub fn synthesize_points<M: SpectralMultiplier + ?Sized>(
    amp: &SpectralAmplitude,
    mesh: &SpectralMesh,
    mult: &M,
    points: &[(f64, f64)],
    skip_abs: f64,
) -> Result<Vec<Vec<[C64; 6]>>> {
    let p = &mesh.params;
    let slots = mult.slots();
    let np = points.len();
    let parts = par::map_collect(mesh.slices.len(), |s| -> Result<Vec<[C64; 6]>> {
        let sl = &mesh.slices[s];
        let nodes = sl.nodes();
        let vals = amp.slice(s);
        let coefs = slice_coefficients(sl, &nodes, vals, mult);
        let mut acc = vec![[ZERO; 6]; slots * np];
        for (n, node) in nodes.iter().enumerate() {
            if !vals[n].iter().any(|v| v.norm() > skip_abs) || coefs[n].iter().all(|c| c.iter().all(|v| *v == ZERO)) {
                continue;
            }
            let m = ModeData::new(p, ModeIndex::with_zone(sl.k, nudge(p, node.lambda), node.j, node.zone)?)?;
            for (pi, &(x, y)) in points.iter().enumerate() {
                let v = m.vector(x, true);
                let e = C64::from_polar(sl.wk, sl.k * y);
                for slot in 0..slots {
                    let [d1, d2, d3, d4] = coefs[n][slot];
                    let out = &mut acc[slot * np + pi];
                    for c in 0..6 {
                        let (a, sg) = (v[c], PARITY[c]);
                        let gp = d1 * a + d3 * sg * a.conj();
                        let gm = d2 * sg * a + d4 * a.conj();
                        out[c] += gp * e + gm * e.conj();
                    }
                }
            }
        }
        Ok(acc)
    });
    let mut out = vec![vec![[ZERO; 6]; np]; slots];
    // fixed-order reduction over slices
    for part in parts {
        let part = part?;
        for slot in 0..slots {
            for pi in 0..np {
                for c in 0..6 {
                    out[slot][pi][c] += part[slot * np + pi][c];
                }
            }
        }
    }
    Ok(out)
}

/// Adjoint F*Û on `grid`.
pub fn adjoint(amp: &SpectralAmplitude, mesh: &SpectralMesh, grid: Grid2) -> Result<FieldState> {
    Ok(synthesize(amp, mesh, &Identity { plasmon: true }, grid, 0.0)?.remove(0))
}

/// F*·m·F U on `grid`, skipping nodes below `qc.skip_rel` of the peak amplitude.
pub fn apply_multiplier<M: SpectralMultiplier + ?Sized>(
    u: &FieldState,
    mesh: &SpectralMesh,
    mult: &M,
    grid: Grid2,
    qc: &QuadConfig,
) -> Result<Vec<FieldState>> {
    let amp = forward(u, mesh)?;
    let skip = qc.skip_rel * amp.max_abs();
    synthesize(&amp, mesh, mult, grid, skip)
}

/// Divergence-free projection P_div0 U = F*F U on `grid`.
pub fn project_div0(u: &FieldState, mesh: &SpectralMesh, grid: Grid2, qc: &QuadConfig) -> Result<FieldState> {
    Ok(apply_multiplier(u, mesh, &Identity { plasmon: true }, grid, qc)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{inner_h, make_source, make_source_fn, norm_h, SourceKind};

    fn light_qc() -> QuadConfig {
        QuadConfig { lambda_min_rel: 2e-2, points_per_period: 3.0, nodes_per_interval: 32, ..QuadConfig::default() }
    }

    fn setup(l: f64, h: f64, w: f64, qc: &QuadConfig) -> (MediumParams, Grid2, FieldState, SpectralMesh) {
        let p = MediumParams::non_critical();
        let g = Grid2::square(l, h).unwrap();
        let u = make_source(SourceKind::GaussianE, (0.4, -0.3), w, 1.0, g).unwrap();
        let mesh = SpectralMesh::build(&p, qc, MeshSpec::for_grid(&g, 0.0, w)).unwrap();
        (p, g, u, mesh)
    }

    fn rel(p: &MediumParams, a: &FieldState, b: &FieldState) -> f64 {
        norm_h(p, &a.sub(b).unwrap()).unwrap() / norm_h(p, b).unwrap()
    }

    #[test]
    fn zero_field_has_zero_transform() {
        let qc = light_qc();
        let (_, g, _, mesh) = setup(4.0, 0.2, 0.7, &qc);
        let amp = forward(&FieldState::zeros(g), &mesh).unwrap();
        assert_eq!(amp.max_abs(), 0.0);
        assert_eq!(amp.values.len(), mesh.node_count());
    }

    #[test]
    fn mesh_nodes_are_interior_and_weights_positive() {
        let qc = light_qc();
        let (p, _, _, mesh) = setup(4.0, 0.2, 0.7, &qc);
        for w in mesh.slices.windows(2) {
            assert!(w[0].k < w[1].k);
        }
        for sl in &mesh.slices {
            assert!(sl.wk > 0.0);
            for n in sl.nodes() {
                if n.site == NodeSite::Plasmon {
                    continue;
                }
                assert!(n.w > 0.0);
                assert_eq!(crate::spectral_geometry::classify(&p, sl.k, n.lambda), n.zone, "k {} λ {}", sl.k, n.lambda);
            }
        }
    }

    #[test]
    fn forward_is_linear() {
        let qc = light_qc();
        let (_, g, u, mesh) = setup(4.0, 0.2, 0.7, &qc);
        let v = make_source(SourceKind::RingE { radius: 1.5 }, (-0.5, 0.0), 0.5, 1.0, g).unwrap();
        let (a, b) = (C64::new(0.7, -1.2), C64::new(-0.3, 0.4));
        let mut w = FieldState::zeros(g);
        w.axpy(a, &u).unwrap();
        w.axpy(b, &v).unwrap();
        let (fu, fv, fw) = (forward(&u, &mesh).unwrap(), forward(&v, &mesh).unwrap(), forward(&w, &mesh).unwrap());
        let scale = fw.max_abs();
        for ((x, y), z) in fu.values.iter().zip(&fv.values).zip(&fw.values) {
            for q in 0..4 {
                assert!((a * x[q] + b * y[q] - z[q]).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn adjoint_matches_forward_pairing() {
        let qc = light_qc();
        let (p, g, u, mesh) = setup(4.0, 0.2, 0.7, &qc);
        // a spectral function with every quadrant and channel populated
        let mut vh = SpectralAmplitude::zeros(&mesh);
        for (i, v) in vh.values.iter_mut().enumerate() {
            let t = i as f64;
            *v = [
                C64::new((0.37 * t).sin(), (0.11 * t).cos()),
                C64::new(0.5, (0.07 * t).sin()),
                C64::new((0.05 * t).cos(), -0.2),
                C64::new(-0.3, (0.13 * t).sin()),
            ];
        }
        let fu = forward(&u, &mesh).unwrap();
        let lhs = fu.inner(&vh, &mesh).unwrap();
        let rhs = inner_h(&p, &u, &adjoint(&vh, &mesh, g).unwrap()).unwrap();
        assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn parseval_and_reconstruction_on_a_light_mesh() {
        let qc = light_qc();
        let (p, g, u, mesh) = setup(6.0, 0.1, 0.7, &qc);
        let amp = forward(&u, &mesh).unwrap();
        let n0 = norm_h(&p, &u).unwrap().powi(2);
        let defect = (amp.norm_sq(&mesh) - n0).abs() / n0;
        assert!(defect < 1e-2, "Parseval defect {defect}");
        let back = synthesize(&amp, &mesh, &Identity { plasmon: true }, g, qc.skip_rel * amp.max_abs()).unwrap().remove(0);
        let err = rel(&p, &back, &u);
        assert!(err < 3e-2, "F*F error {err}");
        // idempotence of the projection
        let again = project_div0(&back, &mesh, g, &qc).unwrap();
        let idem = rel(&p, &again, &back);
        assert!(idem < 3e-2, "idempotence error {idem}");
    }

    #[test]
    fn vacuum_gradient_fields_are_annihilated() {
        // H = ∇φ supported in x < 0 lies in the kernel of A, which F annihilates.
        let qc = light_qc();
        let p = MediumParams::non_critical();
        let g = Grid2::square(6.0, 0.1).unwrap();
        let (cx, cy, w) = (-2.5, 0.0, 0.6);
        let mut u = FieldState::zeros(g);
        let mut v = FieldState::zeros(g);
        for i in 0..g.i0() {
            for j in 0..g.ny {
                let (x, y) = (g.x(i) - cx, g.y(j) - cy);
                let phi = (-(x * x + y * y) / (2.0 * w * w)).exp();
                let k = g.idx(i, j);
                u.comps[1][k] = C64::new(-x / (w * w) * phi, 0.0);
                u.comps[2][k] = C64::new(-y / (w * w) * phi, 0.0);
                // a field of the same size that is not a gradient
                v.comps[1][k] = C64::new(y / (w * w) * phi, 0.0);
                v.comps[2][k] = C64::new(-x / (w * w) * phi, 0.0);
            }
        }
        let mesh = SpectralMesh::build(&p, &qc, MeshSpec::for_grid(&g, 2.5, w)).unwrap();
        let (fu, fv) = (forward(&u, &mesh).unwrap(), forward(&v, &mesh).unwrap());
        let ratio = (fu.norm_sq(&mesh) / fv.norm_sq(&mesh)).sqrt();
        assert!(ratio < 0.1, "gradient/curl spectral ratio {ratio}");
    }

    #[test]
    fn critical_plasmon_only_multiplier_keeps_one_frequency_sign() {
        let qc = light_qc();
        let p = MediumParams::critical(1.0);
        let g = Grid2::square(4.0, 0.2).unwrap();
        let u = make_source_fn(g, |x, y| C64::new((-(x - 0.3).powi(2) - y * y).exp(), 0.0)).unwrap();
        let mesh = SpectralMesh::build(&p, &qc, MeshSpec::for_grid(&g, 0.0, 0.7)).unwrap();
        let amp = forward(&u, &mesh).unwrap();
        let plus = synthesize(&amp, &mesh, &PlasmonOnly { sign: 1.0 }, g, 0.0).unwrap().remove(0);
        let minus = synthesize(&amp, &mesh, &PlasmonOnly { sign: -1.0 }, g, 0.0).unwrap().remove(0);
        // for real data the two eigenprojections are complex conjugates of each other
        let err = rel(&p, &plus.conj(), &minus);
        assert!(err < 1e-10, "conjugate symmetry {err}");
        assert!(norm_h(&p, &plus).unwrap() > 0.0);
    }

    #[test]
    fn amplitude_binary_round_trip() {
        let qc = light_qc();
        let (_, _, u, mesh) = setup(4.0, 0.2, 0.7, &qc);
        let amp = forward(&u, &mesh).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("amp.bin");
        amp.write_binary(&path).unwrap();
        let back = SpectralAmplitude::read_binary(&path).unwrap();
        assert_eq!(back.offsets, amp.offsets);
        let tol = 1e-6 * amp.max_abs();
        for (a, b) in amp.values.iter().zip(&back.values) {
            for q in 0..4 {
                assert!((a[q] - b[q]).norm() <= tol);
            }
        }
    }

    #[test]
    fn window_requires_allowed_frequency() {
        let p = MediumParams::non_critical();
        let g = Grid2::square(4.0, 0.2).unwrap();
        let spec = MeshSpec::for_grid(&g, 0.0, 0.7).with_window(p.omega_m);
        assert!(SpectralMesh::build(&p, &QuadConfig::default(), spec.clone()).is_err());
        let qc = QuadConfig { allow_excluded: true, ..light_qc() };
        let mesh = SpectralMesh::build(&p, &qc, spec).unwrap();
        assert!(mesh.slices.iter().any(|s| s.center.is_some()));
    }
}
