//! Gauss–Legendre panels, square-root endpoint substitution and product
//! integration weights for oscillatory kernels.

use crate::error::{DrudeError, Result};
use crate::medium::MediumParams;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Tolerances, truncations and node densities of every spectral integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    /// Frequency truncation Λ_max; `None` selects the default from the source width.
    pub lambda_max: Option<f64>,
    /// Wavenumber truncation; `None` uses √(ε0μ0)·Λ_max.
    pub k_max: Option<f64>,
    /// Minimum node count per zone interval.
    pub nodes_per_interval: usize,
    /// Distance to a cut within which the node density is doubled.
    pub near_cut: f64,
    /// Quadrature nodes per period of the slowest resolved oscillation.
    pub points_per_period: f64,
    /// Nodes whose coefficient is below this fraction of the peak are skipped in synthesis.
    pub skip_rel: f64,
    /// Lower frequency cutoff λ_min relative to the frequency scale max(Ω_e, Ω_m).
    pub lambda_min_rel: f64,
    /// Principal-value window half-width relative to Ω_m.
    pub pv_window_rel: f64,
    /// Number of geometric grading levels of the principal-value window.
    pub window_levels: usize,
    /// Exclusion radius around σ_exc relative to the frequency scale.
    pub exclusion_rel: f64,
    /// Enables the threshold path at ±Ω_p (non-critical).
    pub allow_threshold: bool,
    /// Allows excluded frequencies other than 0, nudging nodes that land on them.
    pub allow_excluded: bool,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            lambda_max: None,
            k_max: None,
            nodes_per_interval: 64,
            near_cut: 1e-2,
            points_per_period: 4.0,
            skip_rel: 1e-12,
            lambda_min_rel: 5e-3,
            pv_window_rel: 0.05,
            window_levels: 10,
            exclusion_rel: 1e-6,
            allow_threshold: false,
            allow_excluded: false,
        }
    }
}

impl QuadConfig {
    /// Checks that every tolerance and density is positive.
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(DrudeError::Config(format!("quad.{name} must be positive, got {v}")))
            }
        };
        if let Some(l) = self.lambda_max {
            pos("lambda_max", l)?;
        }
        if let Some(k) = self.k_max {
            pos("k_max", k)?;
        }
        pos("near_cut", self.near_cut)?;
        pos("points_per_period", self.points_per_period)?;
        pos("skip_rel", self.skip_rel)?;
        pos("pv_window_rel", self.pv_window_rel)?;
        pos("lambda_min_rel", self.lambda_min_rel)?;
        pos("exclusion_rel", self.exclusion_rel)?;
        if self.nodes_per_interval == 0 {
            return Err(DrudeError::Config("quad.nodes_per_interval must be positive".into()));
        }
        Ok(())
    }

    /// Default Λ_max = 6·max(Ω_e, Ω_m, π/(√(ε0μ0)·width)).
    pub fn lambda_max_for(&self, p: &MediumParams, width: f64) -> f64 {
        self.lambda_max.unwrap_or_else(|| 6.0 * p.omega_e.max(p.omega_m).max(std::f64::consts::PI / ((p.eps0 * p.mu0).sqrt() * width)))
    }

    /// The mesh refined once: doubled node densities and a halved λ_min.
    pub fn refined(&self) -> Self {
        Self {
            nodes_per_interval: 2 * self.nodes_per_interval,
            points_per_period: 2.0 * self.points_per_period,
            lambda_min_rel: 0.5 * self.lambda_min_rel,
            ..self.clone()
        }
    }

    /// Node count for an interval of length `len` resolving phases up to `rate·len`.
    pub fn node_count(&self, len: f64, rate: f64) -> usize {
        let n = (self.points_per_period * rate * len / (2.0 * std::f64::consts::PI)).ceil() as usize;
        n.max(self.nodes_per_interval)
    }
}

/// Number of Gauss nodes on every panel.
pub const PANEL_ORDER: usize = 16;

/// A Gauss–Legendre rule on [−1, 1] with barycentric interpolation weights.
#[derive(Debug, Clone)]
pub struct GaussRule {
    /// Nodes in increasing order.
    pub nodes: Vec<f64>,
    /// Quadrature weights.
    pub weights: Vec<f64>,
    /// Barycentric weights for Lagrange interpolation through the nodes.
    pub bary: Vec<f64>,
}

fn compute_rule(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let bary = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * ((1.0 - nodes[i] * nodes[i]) * weights[i]).sqrt()
        })
        .collect();
    GaussRule { nodes, weights, bary }
}

/// Returns the cached `n`-point Gauss–Legendre rule.
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry(n).or_insert_with(|| Arc::new(compute_rule(n))).clone()
}

/// Change of variables from the panel parameter `u` to the integration variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PanelMap {
    /// x = u.
    Linear,
    /// x = c + u², clustering nodes at a square-root endpoint on the left.
    SqrtLeft { c: f64 },
    /// x = c − u², clustering nodes at a square-root endpoint on the right.
    SqrtRight { c: f64 },
}

impl PanelMap {
    /// Returns x(u) and dx/du.
    #[inline]
    pub fn eval(&self, u: f64) -> (f64, f64) {
        match *self {
            PanelMap::Linear => (u, 1.0),
            PanelMap::SqrtLeft { c } => (c + u * u, 2.0 * u),
            PanelMap::SqrtRight { c } => (c - u * u, 2.0 * u),
        }
    }
}

/// One Gauss panel over `[u0, u1]` in the parameter of `map`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    /// Variable change.
    pub map: PanelMap,
    /// Parameter range start.
    pub u0: f64,
    /// Parameter range end.
    pub u1: f64,
}

/// A quadrature node in the integration variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    /// Abscissa.
    pub x: f64,
    /// Weight (includes the Jacobian of the panel map).
    pub w: f64,
}

impl Panel {
    /// Gauss nodes of this panel mapped to the integration variable.
    pub fn nodes(&self) -> Vec<Node> {
        let rule = gauss_legendre(PANEL_ORDER);
        let (mid, half) = (0.5 * (self.u0 + self.u1), 0.5 * (self.u1 - self.u0));
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &wt)| {
                let (x, dx) = self.map.eval(mid + half * t);
                Node { x, w: wt * half * dx.abs() }
            })
            .collect()
    }

    /// Signed offsets x − c of the Gauss nodes from the center of a square-root
    /// map (±u², exact even where x rounds to c); `x − u0` for linear panels.
    pub fn offsets(&self) -> Vec<f64> {
        let rule = gauss_legendre(PANEL_ORDER);
        let (mid, half) = (0.5 * (self.u0 + self.u1), 0.5 * (self.u1 - self.u0));
        rule.nodes
            .iter()
            .map(|&t| {
                let u = mid + half * t;
                match self.map {
                    PanelMap::Linear => u - self.u0,
                    PanelMap::SqrtLeft { .. } => u * u,
                    PanelMap::SqrtRight { .. } => -u * u,
                }
            })
            .collect()
    }

    /// Range of the integration variable covered by the panel.
    pub fn x_range(&self) -> (f64, f64) {
        let a = self.map.eval(self.u0).0;
        let b = self.map.eval(self.u1).0;
        (a.min(b), a.max(b))
    }

    /// Product-integration weights `w_i = ∫ ℓ_i(u) K(x(u)) |x'(u)| du`, where
    /// `ℓ_i` are the Lagrange polynomials through the panel nodes.
    ///
    /// `rate` bounds |d arg K / dx| and sets the resolution of the auxiliary
    /// fine quadrature, so the kernel may oscillate arbitrarily fast.
    pub fn product_weights<K: Fn(f64) -> C64>(&self, kernel: K, rate: f64) -> Vec<C64> {
        let rule = gauss_legendre(PANEL_ORDER);
        let fine = gauss_legendre(24);
        let (xa, xb) = self.x_range();
        let periods = rate.abs() * (xb - xa) / (2.0 * std::f64::consts::PI);
        let subs = 1 + (periods * 10.0 / 24.0).ceil() as usize;
        let (mid, half) = (0.5 * (self.u0 + self.u1), 0.5 * (self.u1 - self.u0));
        let mut out = vec![C64::new(0.0, 0.0); PANEL_ORDER];
        let mut ell = vec![0.0; PANEL_ORDER];
        for s in 0..subs {
            let a = -1.0 + 2.0 * s as f64 / subs as f64;
            let b = -1.0 + 2.0 * (s + 1) as f64 / subs as f64;
            for (&t, &wt) in fine.nodes.iter().zip(&fine.weights) {
                let tt = 0.5 * (a + b) + 0.5 * (b - a) * t;
                lagrange_basis(&rule, tt, &mut ell);
                let (x, dx) = self.map.eval(mid + half * tt);
                let kw = kernel(x) * (wt * 0.5 * (b - a) * half * dx.abs());
                for (o, &l) in out.iter_mut().zip(ell.iter()) {
                    *o += kw * l;
                }
            }
        }
        out
    }
    /// Product-integration weights for several kernels at once: `kernel(x, vals)`
    /// fills `vals[slot]`, and `out[slot][i] = ∫ ℓ_i(u) K_slot(x(u)) |x'(u)| du`.
    /// `rate` bounds the phase derivative of every kernel.
    pub fn product_weights_many<K: Fn(f64, &mut [C64])>(&self, kernel: K, rate: f64, out: &mut [Vec<C64>]) {
        let rule = gauss_legendre(PANEL_ORDER);
        let fine = gauss_legendre(24);
        let (xa, xb) = self.x_range();
        let periods = rate.abs() * (xb - xa) / (2.0 * std::f64::consts::PI);
        let subs = 1 + (periods * 10.0 / 24.0).ceil() as usize;
        let (mid, half) = (0.5 * (self.u0 + self.u1), 0.5 * (self.u1 - self.u0));
        for o in out.iter_mut() {
            o.clear();
            o.resize(PANEL_ORDER, C64::new(0.0, 0.0));
        }
        let mut ell = vec![0.0; PANEL_ORDER];
        let mut kv = vec![C64::new(0.0, 0.0); out.len()];
        for s in 0..subs {
            let a = -1.0 + 2.0 * s as f64 / subs as f64;
            let b = -1.0 + 2.0 * (s + 1) as f64 / subs as f64;
            for (&t, &wt) in fine.nodes.iter().zip(&fine.weights) {
                let tt = 0.5 * (a + b) + 0.5 * (b - a) * t;
                lagrange_basis(&rule, tt, &mut ell);
                let (x, dx) = self.map.eval(mid + half * tt);
                let jw = wt * 0.5 * (b - a) * half * dx.abs();
                kernel(x, &mut kv);
                for (o, &k) in out.iter_mut().zip(kv.iter()) {
                    let kw = k * jw;
                    for (oi, &l) in o.iter_mut().zip(ell.iter()) {
                        *oi += kw * l;
                    }
                }
            }
        }
    }
}

/// Evaluates all Lagrange basis polynomials of `rule` at `t ∈ [−1, 1]`.
pub fn lagrange_basis(rule: &GaussRule, t: f64, out: &mut [f64]) {
    for (i, &xi) in rule.nodes.iter().enumerate() {
        if t == xi {
            out.iter_mut().for_each(|o| *o = 0.0);
            out[i] = 1.0;
            return;
        }
    }
    let mut den = 0.0;
    for (i, &xi) in rule.nodes.iter().enumerate() {
        let q = rule.bary[i] / (t - xi);
        out[i] = q;
        den += q;
    }
    out.iter_mut().for_each(|o| *o /= den);
}

/// Panels covering `(a, b)` with square-root substitution at the flagged ends.
///
/// `n_nodes` is the total node budget for the interval; the part within
/// `near` of a flagged end receives doubled density.
pub fn interval_panels(a: f64, b: f64, cut_a: bool, cut_b: bool, n_nodes: usize, near: f64) -> Vec<Panel> {
    let mut out = Vec::new();
    if !(b > a) {
        return out;
    }
    let per = |n: usize| n.div_ceil(PANEL_ORDER).max(1);
    if !cut_a && !cut_b {
        let np = per(n_nodes);
        for p in 0..np {
            let u0 = a + (b - a) * p as f64 / np as f64;
            let u1 = a + (b - a) * (p + 1) as f64 / np as f64;
            out.push(Panel { map: PanelMap::Linear, u0, u1 });
        }
        return out;
    }
    let m = 0.5 * (a + b);
    let half_budget = n_nodes.div_ceil(2);
    let mut half = |c: f64, cut: bool, left: bool| {
        let len = (m - c).abs();
        if !cut {
            let np = per(half_budget);
            let (lo, hi) = if left { (c, m) } else { (m, c) };
            for p in 0..np {
                let u0 = lo + (hi - lo) * p as f64 / np as f64;
                let u1 = lo + (hi - lo) * (p + 1) as f64 / np as f64;
                out.push(Panel { map: PanelMap::Linear, u0, u1 });
            }
            return;
        }
        let map = if left { PanelMap::SqrtLeft { c } } else { PanelMap::SqrtRight { c } };
        let umax = len.sqrt();
        let un = near.sqrt();
        let mut push_range = |u0: f64, u1: f64, np: usize| {
            for p in 0..np {
                let s0 = u0 + (u1 - u0) * p as f64 / np as f64;
                let s1 = u0 + (u1 - u0) * (p + 1) as f64 / np as f64;
                out.push(Panel { map, u0: s0, u1: s1 });
            }
        };
        if un < umax {
            let frac = un / umax;
            push_range(0.0, un, per((2.0 * half_budget as f64 * frac).ceil() as usize));
            push_range(un, umax, per((half_budget as f64 * (1.0 - frac)).ceil() as usize));
        } else {
            push_range(0.0, umax, per(half_budget));
        }
    };
    half(a, cut_a, true);
    half(b, cut_b, false);
    out
}

/// Flattened nodes of a panel list.
pub fn panel_nodes(panels: &[Panel]) -> Vec<Node> {
    panels.iter().flat_map(|p| p.nodes()).collect()
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Log-log least-squares slope of `y(x)`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}
