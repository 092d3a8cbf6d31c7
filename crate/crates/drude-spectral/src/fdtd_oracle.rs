//! Brute-force time-domain oracle: a leapfrog Yee scheme for the TE system
//! with auxiliary Drude currents on the half-plane x > 0.
//!
//! Layout: H_y (and K_y) live on the columns x = −L_x + i·h, so x = 0 is an
//! H_y column; E, H_x, J and K_x live on the half-shifted columns. E, H_y, J
//! and K_y share the rows y = −L_y + j·h, H_x and K_x sit half a row above.
//! E and K advance at integer steps, H and J at half steps, which centers all
//! four updates. Currents exist for x > 0; the K_y column on the interface
//! carries the factor R = ½. Fields are complex, so a single run carries the
//! e^{−iωt} phase of the source.

use crate::error::{DrudeError, Result};
use crate::fields::{norm_h, norm_weighted, source_value, FieldState, Grid2, SourceKind, WeightParams, WeightSign};
use crate::medium::MediumParams;
use crate::par;
use crate::resolvent_evolution::EvolutionTrace;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Graded absorbing layer along the outer boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sponge {
    /// Layer thickness.
    pub width: f64,
    /// Peak damping rate σ_max; the profile grows quadratically into the layer.
    pub strength: f64,
}

/// Static configuration of a Yee run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YeeConfig {
    /// Medium constants.
    pub params: MediumParams,
    /// Disables the Drude currents (free space everywhere).
    pub vacuum: bool,
    /// Half-width of the domain in x; must be a multiple of `h`.
    pub lx: f64,
    /// Half-width of the domain in y; must be a multiple of `h`.
    pub ly: f64,
    /// Mesh width in both directions.
    pub h: f64,
    /// Fraction of the stability limit h/(c√2) used for Δt.
    pub cfl: f64,
    /// Periodic in y (otherwise E = 0 on y = ±L_y).
    pub periodic_y: bool,
    /// Optional absorbing layer.
    pub sponge: Option<Sponge>,
}

impl YeeConfig {
    /// Reflecting box of half-width `l`, mesh `h`, CFL fraction 0.9.
    pub fn new(params: MediumParams, l: f64, h: f64) -> Self {
        Self { params, vacuum: false, lx: l, ly: l, h, cfl: 0.9, periodic_y: false, sponge: None }
    }

    /// Largest stable step cfl·h/(c√2).
    pub fn dt_max(&self) -> f64 {
        self.cfl * self.h / (self.params.light_speed() * std::f64::consts::SQRT_2)
    }
}

/// Time-harmonic E-only source g(x, y)·s(t)·e^{−iωt}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSource {
    /// Profile kind.
    pub kind: SourceKind,
    /// Profile center.
    pub center: (f64, f64),
    /// Profile width.
    pub width: f64,
    /// Profile amplitude.
    pub amplitude: f64,
    /// Driving frequency ω.
    pub omega: f64,
    /// Length of a raised-cosine onset; 0 gives the Heaviside switch-on.
    pub ramp: f64,
    /// Time after which the source is switched off.
    pub off_after: Option<f64>,
}

impl OracleSource {
    /// Heaviside-switched Gaussian source.
    pub fn gaussian(center: (f64, f64), width: f64, omega: f64) -> Self {
        Self { kind: SourceKind::GaussianE, center, width, amplitude: 1.0, omega, ramp: 0.0, off_after: None }
    }

    /// Envelope s(t)·e^{−iωt}.
    pub fn envelope(&self, t: f64) -> C64 {
        if t < 0.0 || self.off_after.is_some_and(|t1| t > t1) {
            return ZERO;
        }
        let s = if self.ramp > 0.0 && t < self.ramp { 0.5 * (1.0 - (std::f64::consts::PI * t / self.ramp).cos()) } else { 1.0 };
        C64::from_polar(s, -self.omega * t)
    }
}

/// Half-width L ≥ (c·T + r_source + r_probe)/2 + margin: a reflection from the
/// outer boundary needs c·T to reach the boundary and return to the probe region.
pub fn reflection_free_half_width(c: f64, t: f64, source_radius: f64, probe_radius: f64, margin: f64) -> f64 {
    0.5 * (c * t + source_radius + probe_radius) + margin
}

/// Regular 1D lattice origin + k·h, k = 0..n.
#[derive(Debug, Clone, Copy)]
struct Lattice {
    origin: f64,
    h: f64,
    n: usize,
    periodic: bool,
}

/// Which nodes an x-interpolation may use.
#[derive(Debug, Clone, Copy, PartialEq)]
enum SideRule {
    Any,
    Right,
    Left,
}

impl Lattice {
    fn pos(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.h
    }

    /// Two-node linear interpolation stencil at `t`, restricted to one side of x = 0.
    fn stencil(&self, t: f64, rule: SideRule) -> [(usize, f64); 2] {
        let f = (t - self.origin) / self.h;
        if self.periodic {
            let k = f.floor();
            let a = f - k;
            let n = self.n as i64;
            let k0 = (k as i64).rem_euclid(n) as usize;
            return [(k0, 1.0 - a), ((k0 + 1) % self.n, a)];
        }
        let mut k = (f.floor().max(0.0) as usize).min(self.n.saturating_sub(2));
        let ok = |k: usize| match rule {
            SideRule::Any => true,
            SideRule::Right => self.pos(k) > 1e-12 * self.h,
            SideRule::Left => self.pos(k + 1) < -1e-12 * self.h,
        };
        match rule {
            SideRule::Right => {
                while !ok(k) && k + 2 < self.n {
                    k += 1;
                }
            }
            SideRule::Left => {
                while !ok(k) && k > 0 {
                    k -= 1;
                }
            }
            SideRule::Any => {}
        }
        let a = (t - self.pos(k)) / self.h;
        [(k, 1.0 - a), (k + 1, a)]
    }
}

/// Per-column and per-row sponge factors of the E-type and H-type lattices.
type SpongeFactors = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

/// Complex Yee state: fields, currents and the step counter.
#[derive(Debug, Clone)]
pub struct YeeState {
    cfg: YeeConfig,
    dt: f64,
    nx: usize,
    ney: usize,
    nhy: usize,
    i0: usize,
    /// E on (E-column, E-row), row-major in x.
    e: Vec<C64>,
    hx: Vec<C64>,
    /// H_y on (H-column, E-row); `nx + 1` columns.
    hy: Vec<C64>,
    j: Vec<C64>,
    kx: Vec<C64>,
    ky: Vec<C64>,
    g: Vec<f64>,
    source: Option<OracleSource>,
    damp_e: Option<SpongeFactors>,
    step: usize,
}

fn multiple_of(l: f64, h: f64) -> Option<usize> {
    let n = (l / h).round();
    ((l / h - n).abs() < 1e-9 && n >= 1.0).then_some(n as usize)
}

fn sponge_profile(s: Option<Sponge>, l: f64, pos: impl Iterator<Item = f64>, dt: f64) -> Vec<f64> {
    pos.map(|x| match s {
        Some(s) => {
            let d = ((x.abs() - (l - s.width)) / s.width).clamp(0.0, 1.0);
            (-s.strength * d * d * dt).exp()
        }
        None => 1.0,
    })
    .collect()
}

impl YeeState {
    /// Zero state; `dt` defaults to the largest stable step.
    pub fn new(cfg: YeeConfig, source: Option<OracleSource>, dt: Option<f64>) -> Result<Self> {
        if !(cfg.h > 0.0 && cfg.h.is_finite()) || !(cfg.cfl > 0.0 && cfg.cfl <= 1.0) {
            return Err(DrudeError::Config("need h > 0 and 0 < cfl ≤ 1".into()));
        }
        let half_x = multiple_of(cfg.lx, cfg.h).ok_or_else(|| DrudeError::Config("lx must be a positive multiple of h".into()))?;
        let half_y = multiple_of(cfg.ly, cfg.h).ok_or_else(|| DrudeError::Config("ly must be a positive multiple of h".into()))?;
        let limit = cfg.h / (cfg.params.light_speed() * std::f64::consts::SQRT_2);
        let dt = dt.unwrap_or(cfg.dt_max());
        if !(dt > 0.0) || dt > cfg.cfl * limit * (1.0 + 1e-12) {
            return Err(DrudeError::Cfl(format!("Δt = {dt} exceeds {} · h/(c√2) = {}", cfg.cfl, cfg.cfl * limit)));
        }
        if let Some(s) = cfg.sponge {
            if !(s.width > 0.0 && s.width < cfg.lx.min(cfg.ly) && s.strength >= 0.0) {
                return Err(DrudeError::Config("sponge must be thinner than the domain".into()));
            }
        }
        let nx = 2 * half_x;
        let (ney, nhy) = if cfg.periodic_y { (2 * half_y, 2 * half_y) } else { (2 * half_y + 1, 2 * half_y) };
        let mut st = Self {
            cfg,
            dt,
            nx,
            ney,
            nhy,
            i0: half_x,
            e: vec![ZERO; nx * ney],
            hx: vec![ZERO; nx * nhy],
            hy: vec![ZERO; (nx + 1) * ney],
            j: vec![ZERO; nx * ney],
            kx: vec![ZERO; nx * nhy],
            ky: vec![ZERO; (nx + 1) * ney],
            g: vec![0.0; nx * ney],
            source,
            damp_e: None,
            step: 0,
        };
        if let Some(src) = source {
            if !(src.width > 0.0) {
                return Err(DrudeError::Config("source width must be positive".into()));
            }
            let (ex, ey) = (st.lat_ex(), st.lat_ey());
            let ney = st.ney;
            par::for_each_chunk_mut(&mut st.g, ney, |i, row| {
                for (jj, v) in row.iter_mut().enumerate() {
                    *v = source_value(src.kind, src.center, src.width, src.amplitude, ex.pos(i), ey.pos(jj));
                }
            });
            if !cfg.periodic_y {
                for i in 0..nx {
                    st.g[i * ney] = 0.0;
                    st.g[i * ney + ney - 1] = 0.0;
                }
            }
        }
        if cfg.sponge.is_some() {
            let (ex, ey, hxy, hyx) = (st.lat_ex(), st.lat_ey(), st.lat_hxy(), st.lat_hyx());
            let sy = if cfg.periodic_y { None } else { cfg.sponge };
            st.damp_e = Some((
                sponge_profile(cfg.sponge, cfg.lx, (0..ex.n).map(|k| ex.pos(k)), dt),
                sponge_profile(sy, cfg.ly, (0..ey.n).map(|k| ey.pos(k)), dt),
                sponge_profile(cfg.sponge, cfg.lx, (0..hyx.n).map(|k| hyx.pos(k)), dt),
                sponge_profile(sy, cfg.ly, (0..hxy.n).map(|k| hxy.pos(k)), dt),
            ));
        }
        Ok(st)
    }

    fn lat_ex(&self) -> Lattice {
        Lattice { origin: -self.cfg.lx + 0.5 * self.cfg.h, h: self.cfg.h, n: self.nx, periodic: false }
    }

    fn lat_hyx(&self) -> Lattice {
        Lattice { origin: -self.cfg.lx, h: self.cfg.h, n: self.nx + 1, periodic: false }
    }

    fn lat_ey(&self) -> Lattice {
        Lattice { origin: -self.cfg.ly, h: self.cfg.h, n: self.ney, periodic: self.cfg.periodic_y }
    }

    fn lat_hxy(&self) -> Lattice {
        Lattice { origin: -self.cfg.ly + 0.5 * self.cfg.h, h: self.cfg.h, n: self.nhy, periodic: self.cfg.periodic_y }
    }

    /// Time step Δt.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Current time n·Δt (the time level of E and K).
    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.step
    }

    /// Configuration.
    pub fn config(&self) -> &YeeConfig {
        &self.cfg
    }

    /// Advances E, K from n to n+1 and H, J from n−½ to n+½.
    pub fn step(&mut self) {
        let YeeConfig { params: p, vacuum, h, periodic_y, .. } = self.cfg;
        let dt = self.dt;
        let (nx, ney, nhy, i0) = (self.nx, self.ney, self.nhy, self.i0);
        let cur = !vacuum;
        let a_h = dt / p.mu0;
        let a_e = dt / p.eps0;
        let (ce, cm) = (dt * p.eps0 * p.omega_e * p.omega_e, dt * p.mu0 * p.omega_m * p.omega_m);
        {
            let (e, kx) = (&self.e, &self.kx);
            par::for_each_chunk_mut(&mut self.hx, nhy, |i, row| {
                let er = &e[i * ney..(i + 1) * ney];
                let kr = &kx[i * nhy..(i + 1) * nhy];
                let with_k = cur && i >= i0;
                for (jj, v) in row.iter_mut().enumerate() {
                    let up = if periodic_y { er[(jj + 1) % ney] } else { er[jj + 1] };
                    let mut d = (up - er[jj]) / h;
                    if with_k {
                        d += kr[jj];
                    }
                    *v -= a_h * d;
                }
            });
            let ky = &self.ky;
            par::for_each_chunk_mut(&mut self.hy, ney, |i, row| {
                if i == 0 || i == nx {
                    return;
                }
                let er = &e[i * ney..(i + 1) * ney];
                let el = &e[(i - 1) * ney..i * ney];
                let kr = &ky[i * ney..(i + 1) * ney];
                let with_k = cur && i >= i0;
                for (jj, v) in row.iter_mut().enumerate() {
                    let mut d = (er[jj] - el[jj]) / h;
                    if with_k {
                        d -= kr[jj];
                    }
                    *v += a_h * d;
                }
            });
        }
        if cur {
            let e = &self.e;
            par::for_each_chunk_mut(&mut self.j[i0 * ney..], ney, |i, row| {
                let er = &e[(i0 + i) * ney..(i0 + i + 1) * ney];
                for (v, ev) in row.iter_mut().zip(er) {
                    *v += ce * ev;
                }
            });
        }
        let src = self.source.map(|s| s.envelope((self.step as f64 + 0.5) * dt) * dt).unwrap_or(ZERO);
        {
            let (hx, hy, jc, g) = (&self.hx, &self.hy, &self.j, &self.g);
            par::for_each_chunk_mut(&mut self.e, ney, |i, row| {
                let hr = &hy[(i + 1) * ney..(i + 2) * ney];
                let hl = &hy[i * ney..(i + 1) * ney];
                let hxr = &hx[i * nhy..(i + 1) * nhy];
                let jr = &jc[i * ney..(i + 1) * ney];
                let gr = &g[i * ney..(i + 1) * ney];
                let with_j = cur && i >= i0;
                for (jj, v) in row.iter_mut().enumerate() {
                    let below = if periodic_y {
                        hxr[(jj + nhy - 1) % nhy]
                    } else if jj == 0 || jj == ney - 1 {
                        continue;
                    } else {
                        hxr[jj - 1]
                    };
                    let mut d = (hr[jj] - hl[jj]) / h - (hxr[jj] - below) / h;
                    if with_j {
                        d -= jr[jj];
                    }
                    *v += a_e * d + src * gr[jj];
                }
            });
        }
        if cur {
            let hx = &self.hx;
            par::for_each_chunk_mut(&mut self.kx[i0 * nhy..], nhy, |i, row| {
                for (v, hv) in row.iter_mut().zip(&hx[(i0 + i) * nhy..(i0 + i + 1) * nhy]) {
                    *v += cm * hv;
                }
            });
            let hy = &self.hy;
            par::for_each_chunk_mut(&mut self.ky[i0 * ney..], ney, |i, row| {
                let r = if i == 0 { 0.5 } else { 1.0 };
                for (v, hv) in row.iter_mut().zip(&hy[(i0 + i) * ney..(i0 + i + 1) * ney]) {
                    *v += cm * r * hv;
                }
            });
        }
        if let Some((fx_e, fy_e, fx_h, fy_h)) = &self.damp_e {
            let damp = |a: &mut Vec<C64>, fx: &[f64], fy: &[f64]| {
                let n = fy.len();
                par::for_each_chunk_mut(a, n, |i, row| {
                    for (v, f) in row.iter_mut().zip(fy) {
                        *v *= fx[i] * f;
                    }
                });
            };
            damp(&mut self.e, fx_e, fy_e);
            damp(&mut self.j, fx_e, fy_e);
            damp(&mut self.hx, fx_e, fy_h);
            damp(&mut self.kx, fx_e, fy_h);
            damp(&mut self.hy, fx_h, fy_e);
            damp(&mut self.ky, fx_h, fy_e);
        }
        self.step += 1;
    }

    /// Takes one step and returns the discrete energy at the starting time level,
    /// ε0‖E^n‖² + μ0 Re⟨H^{n−½}, H^{n+½}⟩ + (ε0Ω_e²)^{−1} Re⟨J^{n−½}, J^{n+½}⟩ + (μ0Ω_m²)^{−1}‖K^n‖²
    /// with h² cell weights. Without currents and sources it is conserved exactly.
    pub fn step_with_energy(&mut self) -> f64 {
        let p = self.cfg.params;
        let sq = |a: &[C64]| par::pairwise_sum(&a.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>());
        let cross = |a: &[C64], b: &[C64]| par::pairwise_sum(&a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).collect::<Vec<_>>());
        let (hx0, hy0, j0) = (self.hx.clone(), self.hy.clone(), self.j.clone());
        let mut w = p.eps0 * sq(&self.e);
        if !self.cfg.vacuum {
            w += (sq(&self.kx) + sq(&self.ky)) / (p.mu0 * p.omega_m * p.omega_m);
        }
        self.step();
        w += p.mu0 * (cross(&hx0, &self.hx) + cross(&hy0, &self.hy));
        if !self.cfg.vacuum {
            w += cross(&j0, &self.j) / (p.eps0 * p.omega_e * p.omega_e);
        }
        w * self.cfg.h * self.cfg.h
    }

    /// (max |div_h H|, max |div_h K|) at the cell corners (x_i, y_{j+½}) off the
    /// interface column and the outer walls, each divided by its field scale max|·|/h.
    pub fn divergence(&self) -> (f64, f64) {
        let (ney, nhy, i0) = (self.ney, self.nhy, self.i0);
        let h = self.cfg.h;
        let div = |ax: &[C64], ay: &[C64]| -> f64 {
            let rows = par::map_collect(self.nx - 1, |m| {
                let i = m + 1;
                if i == i0 {
                    return 0.0;
                }
                let mut mx: f64 = 0.0;
                for jj in 0..nhy {
                    let up = if self.cfg.periodic_y { (jj + 1) % ney } else { jj + 1 };
                    let d = (ax[i * nhy + jj] - ax[(i - 1) * nhy + jj]) / h + (ay[i * ney + up] - ay[i * ney + jj]) / h;
                    mx = mx.max(d.norm());
                }
                mx
            });
            let scale = ax.iter().chain(ay).fold(0.0f64, |m, v| m.max(v.norm())) / h;
            let m = rows.into_iter().fold(0.0, f64::max);
            if scale > 0.0 {
                m / scale
            } else {
                m
            }
        };
        (div(&self.hx, &self.hy), div(&self.kx, &self.ky))
    }

    fn interp(&self, data: &[C64], lx: Lattice, ly: Lattice, rule: SideRule, x: f64, y: f64) -> C64 {
        let sx = lx.stencil(x, rule);
        let sy = ly.stencil(y, SideRule::Any);
        let mut v = ZERO;
        for &(i, wx) in &sx {
            for &(jj, wy) in &sy {
                v += wx * wy * data[i * ly.n + jj];
            }
        }
        v
    }

    /// E at an arbitrary point by bilinear interpolation.
    pub fn sample_e(&self, x: f64, y: f64) -> C64 {
        self.interp(&self.e, self.lat_ex(), self.lat_ey(), SideRule::Any, x, y)
    }

    /// Interpolates the integer-level components (E, K) onto `grid`.
    fn sample_integer(&self, out: &mut FieldState) {
        let g = out.grid;
        let (ex, ey, hxy, hyx) = (self.lat_ex(), self.lat_ey(), self.lat_hxy(), self.lat_hyx());
        let i0 = g.i0();
        let cur = !self.cfg.vacuum;
        let rows: Vec<Vec<[C64; 3]>> = par::map_collect(g.nx, |i| {
            let x = g.x(i);
            (0..g.ny)
                .map(|jj| {
                    let y = g.y(jj);
                    let e = self.interp(&self.e, ex, ey, SideRule::Any, x, y);
                    if cur && i >= i0 {
                        [e, self.interp(&self.kx, ex, hxy, SideRule::Right, x, y), self.interp(&self.ky, hyx, ey, SideRule::Right, x, y)]
                    } else {
                        [e, ZERO, ZERO]
                    }
                })
                .collect()
        });
        for (i, row) in rows.into_iter().enumerate() {
            for (jj, v) in row.into_iter().enumerate() {
                let k = g.idx(i, jj);
                out.comps[0][k] = v[0];
                out.comps[4][k] = v[1];
                out.comps[5][k] = v[2];
            }
        }
    }

    /// Adds `a` times the half-level components (H, J) interpolated onto `grid`.
    fn add_half(&self, out: &mut FieldState, a: f64) {
        let g = out.grid;
        let (ex, ey, hxy, hyx) = (self.lat_ex(), self.lat_ey(), self.lat_hxy(), self.lat_hyx());
        let i0 = g.i0();
        let cur = !self.cfg.vacuum;
        let rows: Vec<Vec<[C64; 4]>> = par::map_collect(g.nx, |i| {
            let x = g.x(i);
            let rule = if i >= i0 { SideRule::Right } else { SideRule::Left };
            (0..g.ny)
                .map(|jj| {
                    let y = g.y(jj);
                    let hx = self.interp(&self.hx, ex, hxy, rule, x, y);
                    let hy = self.interp(&self.hy, hyx, ey, SideRule::Any, x, y);
                    let jv = if cur && i >= i0 { self.interp(&self.j, ex, ey, SideRule::Right, x, y) } else { ZERO };
                    let left = if i == i0 { self.interp(&self.hx, ex, hxy, SideRule::Left, x, y) } else { ZERO };
                    [hx, hy, jv, left]
                })
                .collect()
        });
        for (i, row) in rows.into_iter().enumerate() {
            for (jj, v) in row.into_iter().enumerate() {
                let k = g.idx(i, jj);
                out.comps[1][k] += a * v[0];
                out.comps[2][k] += a * v[1];
                out.comps[3][k] += a * v[2];
                if i == i0 {
                    out.hx_left[jj] += a * v[3];
                }
            }
        }
    }

    /// Takes one step and returns the state at the starting time level on `grid`,
    /// with H and J averaged over the two adjacent half steps.
    pub fn step_sampled(&mut self, grid: Grid2) -> Result<FieldState> {
        if grid.lx > self.cfg.lx - self.cfg.h || grid.ly > self.cfg.ly - self.cfg.h {
            return Err(DrudeError::GridMismatch("sampling grid must lie inside the Yee domain".into()));
        }
        let mut out = FieldState::zeros(grid);
        self.sample_integer(&mut out);
        self.add_half(&mut out, 0.5);
        self.step();
        self.add_half(&mut out, 0.5);
        Ok(out)
    }
}

/// A complete oracle run with the sampling schedule of a spectral evolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRun {
    /// Mesh, medium and boundary treatment.
    pub yee: YeeConfig,
    /// Driving source.
    pub source: OracleSource,
    /// Sample times of the norms; each must be a multiple of a common spacing.
    pub times: Vec<f64>,
    /// Weight exponent s of the H_{−s} norm.
    pub s: f64,
    /// Grid the fields are sampled on for the norms.
    pub grid: Grid2,
    /// E probe points.
    pub probes: Vec<(f64, f64)>,
    /// Probe-series times (empty: use `times`).
    pub probe_times: Vec<f64>,
    /// Keep the sampled fields in the trace.
    pub keep_fields: bool,
}

/// Largest Δt ≤ `dt_max` that puts every time on a step: Δt = base/m, with
/// `base` the smallest positive spacing of the schedule.
fn schedule_dt(dt_max: f64, times: &[f64]) -> Result<f64> {
    let mut all: Vec<f64> = times.iter().copied().filter(|t| *t > 0.0).collect();
    all.sort_by(f64::total_cmp);
    let Some(&first) = all.first() else { return Ok(dt_max) };
    let base = all.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > 1e-9 * first).fold(first, f64::min);
    for t in &all {
        let r = t / base;
        if (r - r.round()).abs() > 1e-6 * r.max(1.0) {
            return Err(DrudeError::Config(format!("time {t} is not a multiple of the spacing {base}")));
        }
    }
    Ok(base / (base / dt_max).ceil())
}

/// A trace with the divergence diagnostics of the same run.
#[derive(Debug, Clone)]
pub struct OracleOutput {
    /// Norms and probes.
    pub trace: EvolutionTrace,
    /// Largest scaled |div_h H| over the norm samples.
    pub div_h: f64,
    /// Largest scaled |div_h K| over the norm samples.
    pub div_k: f64,
    /// Time step used.
    pub dt: f64,
}

/// Runs the Yee scheme from zero data and samples the norms and probes.
pub fn run(cfg: &OracleRun) -> Result<EvolutionTrace> {
    Ok(run_checked(cfg)?.trace)
}

/// [`run`] that also records the divergence invariants at every norm sample.
pub fn run_checked(cfg: &OracleRun) -> Result<OracleOutput> {
    let weights = WeightParams::new(cfg.s)?;
    for ts in [&cfg.times, &cfg.probe_times] {
        if ts.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(DrudeError::Config("times must be non-negative and strictly increasing".into()));
        }
    }
    let probe_times = if cfg.probe_times.is_empty() { cfg.times.clone() } else { cfg.probe_times.clone() };
    let all: Vec<f64> = cfg.times.iter().chain(&probe_times).copied().collect();
    let dt = schedule_dt(cfg.yee.dt_max(), &all)?;
    let mut st = YeeState::new(cfg.yee, Some(cfg.source), Some(dt))?;
    let steps_of = |ts: &[f64]| ts.iter().map(|t| (t / dt).round() as usize).collect::<Vec<_>>();
    let (field_steps, probe_steps) = (steps_of(&cfg.times), steps_of(&probe_times));
    let last = field_steps.iter().chain(&probe_steps).copied().max().unwrap_or(0);
    let p = cfg.yee.params;
    let (mut norm_h_v, mut norm_w, mut fields) = (Vec::new(), Vec::new(), Vec::new());
    let mut probe_values = vec![Vec::with_capacity(probe_steps.len()); cfg.probes.len()];
    let (mut fi, mut pi) = (0, 0);
    let (mut div_h, mut div_k) = (0.0f64, 0.0f64);
    for n in 0..=last {
        while pi < probe_steps.len() && probe_steps[pi] == n {
            for (k, &(x, y)) in cfg.probes.iter().enumerate() {
                probe_values[k].push(st.sample_e(x, y));
            }
            pi += 1;
        }
        if fi < field_steps.len() && field_steps[fi] == n {
            let (dh, dk) = st.divergence();
            div_h = div_h.max(dh);
            div_k = div_k.max(dk);
            let u = st.step_sampled(cfg.grid)?;
            while fi < field_steps.len() && field_steps[fi] == n {
                norm_h_v.push(norm_h(&p, &u)?);
                norm_w.push(norm_weighted(&p, &u, weights, WeightSign::Minus)?);
                if cfg.keep_fields {
                    fields.push(u.clone());
                }
                fi += 1;
            }
        } else if n < last {
            st.step();
        }
    }
    let trace = EvolutionTrace {
        times: cfg.times.clone(),
        norm_h: norm_h_v,
        norm_weighted: norm_w,
        gap: Vec::new(),
        probes: cfg.probes.clone(),
        probe_times,
        probe_values,
        fields,
        work: st.steps(),
    };
    Ok(OracleOutput { trace, div_h, div_k, dt })
}
