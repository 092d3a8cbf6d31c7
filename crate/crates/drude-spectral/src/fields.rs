//! Grid-sampled six-component fields, the energy inner product, weighted
//! norms, smooth test sources and a finite-difference Hamiltonian.

use crate::error::{DrudeError, Result};
use crate::medium::MediumParams;
use crate::par;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Rectangular grid [−lx, lx] × [−ly, ly] with the interface on the column x = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    /// Half-width in x.
    pub lx: f64,
    /// Half-width in y.
    pub ly: f64,
    /// Spacing in x.
    pub hx: f64,
    /// Spacing in y.
    pub hy: f64,
    /// Number of x nodes.
    pub nx: usize,
    /// Number of y nodes.
    pub ny: usize,
}

impl Grid2 {
    /// Grid with lx/hx and ly/hy integers so that x = 0 and y = 0 are nodes.
    pub fn new(lx: f64, ly: f64, hx: f64, hy: f64) -> Result<Self> {
        if !(lx > 0.0 && ly > 0.0 && hx > 0.0 && hy > 0.0) {
            return Err(DrudeError::Config("grid extents and spacings must be positive".into()));
        }
        let mx = lx / hx;
        let my = ly / hy;
        if (mx - mx.round()).abs() > 1e-9 * mx || (my - my.round()).abs() > 1e-9 * my {
            return Err(DrudeError::Config(format!("L/h must be an integer so that x = 0 lies on a grid line (lx/hx = {mx}, ly/hy = {my})")));
        }
        let (mx, my) = (mx.round() as usize, my.round() as usize);
        Ok(Self { lx: mx as f64 * hx, ly: my as f64 * hy, hx, hy, nx: 2 * mx + 1, ny: 2 * my + 1 })
    }

    /// Square grid with equal spacing.
    pub fn square(l: f64, h: f64) -> Result<Self> {
        Self::new(l, l, h, h)
    }

    /// x-coordinate of column i.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.i0() as f64) * self.hx
    }

    /// y-coordinate of row j.
    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.hy
    }

    /// Column index of the interface x = 0.
    #[inline]
    pub fn i0(&self) -> usize {
        self.nx / 2
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    /// True if the grid has no nodes.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of node (i, j).
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Trapezoid weight of column i (without the interface split).
    #[inline]
    pub fn wx(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.nx {
            0.5 * self.hx
        } else {
            self.hx
        }
    }

    /// Trapezoid weight of row j.
    #[inline]
    pub fn wy(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.ny {
            0.5 * self.hy
        } else {
            self.hy
        }
    }

    pub(crate) fn check_same(&self, other: &Grid2) -> Result<()> {
        if self != other {
            return Err(DrudeError::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Field component selector in the order (E, H_x, H_y, J, K_x, K_y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    /// Electric field.
    E,
    /// Magnetic field, x-component.
    Hx,
    /// Magnetic field, y-component.
    Hy,
    /// Induced electric current.
    J,
    /// Induced magnetic current, x-component.
    Kx,
    /// Induced magnetic current, y-component.
    Ky,
}

impl Component {
    /// All components in storage order.
    pub const ALL: [Component; 6] = [Component::E, Component::Hx, Component::Hy, Component::J, Component::Kx, Component::Ky];

    /// Storage index.
    pub fn index(self) -> usize {
        self as usize
    }
}

/// A six-component field on a grid.
///
/// Arrays are row-major in x (`idx = i·ny + j`). At the interface column the
/// arrays hold right limits; the left limit of the discontinuous H_x is kept in
/// `hx_left`. J and K vanish for x < 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    /// Sampling grid.
    pub grid: Grid2,
    /// (E, H_x, H_y, J, K_x, K_y).
    pub comps: [Vec<C64>; 6],
    /// H_x(0⁻, y_j).
    pub hx_left: Vec<C64>,
}

impl FieldState {
    /// Zero field.
    pub fn zeros(grid: Grid2) -> Self {
        let n = grid.len();
        Self { grid, comps: std::array::from_fn(|_| vec![ZERO; n]), hx_left: vec![ZERO; grid.ny] }
    }

    /// Component array.
    pub fn comp(&self, c: Component) -> &[C64] {
        &self.comps[c.index()]
    }

    /// Mutable component array.
    pub fn comp_mut(&mut self, c: Component) -> &mut [C64] {
        &mut self.comps[c.index()]
    }

    /// self += a·other.
    pub fn axpy(&mut self, a: C64, other: &FieldState) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        for c in 0..6 {
            for (s, o) in self.comps[c].iter_mut().zip(&other.comps[c]) {
                *s += a * o;
            }
        }
        for (s, o) in self.hx_left.iter_mut().zip(&other.hx_left) {
            *s += a * o;
        }
        Ok(())
    }

    /// Returns self − other.
    pub fn sub(&self, other: &FieldState) -> Result<FieldState> {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), other)?;
        Ok(out)
    }

    /// Multiplies every value by `a`.
    pub fn scale(&mut self, a: C64) {
        self.comps.iter_mut().flat_map(|c| c.iter_mut()).for_each(|v| *v *= a);
        self.hx_left.iter_mut().for_each(|v| *v *= a);
    }

    /// Complex conjugate field.
    pub fn conj(&self) -> FieldState {
        let mut out = self.clone();
        out.comps.iter_mut().flat_map(|c| c.iter_mut()).for_each(|v| *v = v.conj());
        out.hx_left.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    /// Largest modulus over all components.
    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flat_map(|c| c.iter()).chain(&self.hx_left).fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Values of component `c` along the row y = y_j.
    pub fn slice_x(&self, c: Component, j: usize) -> Vec<(f64, C64)> {
        (0..self.grid.nx).map(|i| (self.grid.x(i), self.comp(c)[self.grid.idx(i, j)])).collect()
    }

    /// Enforces J = K = 0 for x < 0.
    pub fn restrict_currents(&mut self) {
        let n = self.grid.i0() * self.grid.ny;
        for c in 3..6 {
            self.comps[c][..n].iter_mut().for_each(|v| *v = ZERO);
        }
    }
}

/// Weight exponent s > 1/2 of the spaces H_s and H_{−s}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    /// Exponent s.
    pub s: f64,
}

impl WeightParams {
    /// Validated constructor.
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.5 && s.is_finite()) {
            return Err(DrudeError::Config(format!("weight exponent s must exceed 1/2, got {s}")));
        }
        Ok(Self { s })
    }
}

impl Default for WeightParams {
    fn default() -> Self {
        Self { s: 1.0 }
    }
}

/// Sign of the weight: H_s (plus) or H_{−s} (minus).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightSign {
    /// Multiply by η_s.
    Plus,
    /// Multiply by η_{−s}.
    Minus,
}

/// η_s(x, y) = (1+x²)^{s/2}(1+y²)^{s/2}.
pub fn eta(s: f64, x: f64, y: f64) -> f64 {
    ((1.0 + x * x) * (1.0 + y * y)).powf(0.5 * s)
}

/// ∫ w(x, y)·(U, V)_pointwise with separable weight (1+x²)^e (1+y²)^e.
fn inner_weighted(p: &MediumParams, u: &FieldState, v: &FieldState, e: f64) -> Result<C64> {
    u.grid.check_same(&v.grid)?;
    let g = u.grid;
    let mat = [p.eps0, p.mu0, p.mu0, 1.0 / (p.eps0 * p.omega_e * p.omega_e), 1.0 / (p.mu0 * p.omega_m * p.omega_m)];
    let wy: Vec<f64> = (0..g.ny).map(|j| g.wy(j) * (1.0 + g.y(j).powi(2)).powf(e)).collect();
    let i0 = g.i0();
    let rows = par::map_collect(g.nx, |i| {
        let wxi = g.wx(i) * (1.0 + g.x(i).powi(2)).powf(e);
        let base = i * g.ny;
        let mut acc = [ZERO; 6];
        for (j, &wyj) in wy.iter().enumerate() {
            for c in 0..6 {
                acc[c] += wyj * u.comps[c][base + j] * v.comps[c][base + j].conj();
            }
        }
        let mut s = mat[0] * acc[0] + mat[2] * acc[2];
        if i > i0 {
            s += mat[1] * acc[1] + mat[3] * acc[3] + mat[4] * (acc[4] + acc[5]);
        } else if i == i0 {
            let mut left = ZERO;
            for (j, &wyj) in wy.iter().enumerate() {
                left += wyj * u.hx_left[j] * v.hx_left[j].conj();
            }
            s += 0.5 * mat[1] * (acc[1] + left) + 0.5 * (mat[3] * acc[3] + mat[4] * (acc[4] + acc[5]));
        } else {
            s += mat[1] * acc[1];
        }
        s * wxi
    });
    Ok(par::pairwise_sum_c(&rows))
}

/// Energy inner product (U, V)_H by the tensor trapezoid rule.
pub fn inner_h(p: &MediumParams, u: &FieldState, v: &FieldState) -> Result<C64> {
    inner_weighted(p, u, v, 0.0)
}

/// ‖U‖_H.
pub fn norm_h(p: &MediumParams, u: &FieldState) -> Result<f64> {
    Ok(inner_h(p, u, u)?.re.max(0.0).sqrt())
}

/// ‖U‖_{H_{±s}} = ‖η_{±s}U‖_H.
pub fn norm_weighted(p: &MediumParams, u: &FieldState, s: WeightParams, sign: WeightSign) -> Result<f64> {
    let e = match sign {
        WeightSign::Plus => s.s,
        WeightSign::Minus => -s.s,
    };
    Ok(inner_weighted(p, u, u, e)?.re.max(0.0).sqrt())
}

/// Duality product ⟨U, V⟩_s between H_{−s} and H_s. The weights η_{−s} and
/// η_s applied to the two arguments cancel, so the pairing is the energy
/// inner product of the samples.
pub fn pairing(p: &MediumParams, u_dual: &FieldState, v: &FieldState, _s: WeightParams) -> Result<C64> {
    inner_h(p, u_dual, v)
}

/// Kind of smooth E-only test source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SourceKind {
    /// exp(−r²/(2w²)).
    GaussianE,
    /// exp(−(r − R)²/(2w²)) around a ring of radius R.
    RingE {
        /// Ring radius.
        radius: f64,
    },
}

/// E-only source of the given kind, zeroed where below 1e−17 of the peak.
pub fn make_source(kind: SourceKind, center: (f64, f64), width: f64, amplitude: f64, grid: Grid2) -> Result<FieldState> {
    if !(width > 0.0) {
        return Err(DrudeError::Config("source width must be positive".into()));
    }
    make_source_fn(grid, |x, y| C64::new(source_value(kind, center, width, amplitude, x, y), 0.0))
}

/// Pointwise value of the E-only source profile used by [`make_source`].
pub fn source_value(kind: SourceKind, center: (f64, f64), width: f64, amplitude: f64, x: f64, y: f64) -> f64 {
    let r = ((x - center.0).powi(2) + (y - center.1).powi(2)).sqrt();
    let d = match kind {
        SourceKind::GaussianE => r,
        SourceKind::RingE { radius } => r - radius,
    };
    let arg = d * d / (2.0 * width * width);
    if arg > 39.0 {
        0.0
    } else {
        amplitude * (-arg).exp()
    }
}

/// E-only source from a closure (the custom kind).
pub fn make_source_fn<F: Fn(f64, f64) -> C64 + Sync>(grid: Grid2, f: F) -> Result<FieldState> {
    let mut u = FieldState::zeros(grid);
    let e = &mut u.comps[0];
    par::for_each_chunk_mut(e, grid.ny, |i, row| {
        let x = grid.x(i);
        for (j, v) in row.iter_mut().enumerate() {
            *v = f(x, grid.y(j));
        }
    });
    Ok(u)
}

/// Discrete divergence of (c1, c2) by centered differences at interior nodes
/// whose stencil does not touch the interface column; returns max |div|.
pub fn max_div_interior(u: &FieldState, c1: Component, c2: Component) -> f64 {
    let g = u.grid;
    let (a, b) = (u.comp(c1), u.comp(c2));
    let mut m: f64 = 0.0;
    for i in 1..g.nx - 1 {
        if i + 1 >= g.i0() && i <= g.i0() + 1 {
            continue;
        }
        for j in 1..g.ny - 1 {
            let d = (a[g.idx(i + 1, j)] - a[g.idx(i - 1, j)]) / (2.0 * g.hx) + (b[g.idx(i, j + 1)] - b[g.idx(i, j - 1)]) / (2.0 * g.hy);
            m = m.max(d.norm());
        }
    }
    m
}

/// Centered finite-difference application of the Hamiltonian at interior nodes.
///
/// Columns within one node of the interface and the outer boundary are left
/// at zero, since centered differences there would straddle the kink of the
/// fields at x = 0.
pub fn apply_hamiltonian_fd(p: &MediumParams, u: &FieldState) -> FieldState {
    let g = u.grid;
    let mut out = FieldState::zeros(g);
    let i0 = g.i0();
    let (e, hx, hy, jj, kx, ky) = (&u.comps[0], &u.comps[1], &u.comps[2], &u.comps[3], &u.comps[4], &u.comps[5]);
    let (ie, im) = (I / p.eps0, -I / p.mu0);
    let cj = I * p.eps0 * p.omega_e * p.omega_e;
    let ck = I * p.mu0 * p.omega_m * p.omega_m;
    let rows: Vec<[Vec<C64>; 6]> = par::map_collect(g.nx, |i| {
        let mut r: [Vec<C64>; 6] = std::array::from_fn(|_| vec![ZERO; g.ny]);
        if i == 0 || i + 1 == g.nx || (i + 1 >= i0 && i <= i0 + 1) {
            return r;
        }
        let right = i > i0;
        for j in 1..g.ny - 1 {
            let n = g.idx(i, j);
            let dx = |a: &[C64]| (a[g.idx(i + 1, j)] - a[g.idx(i - 1, j)]) / (2.0 * g.hx);
            let dy = |a: &[C64]| (a[n + 1] - a[n - 1]) / (2.0 * g.hy);
            r[0][j] = ie * (dx(hy) - dy(hx) - jj[n]);
            r[1][j] = im * (dy(e) + kx[n]);
            r[2][j] = im * (-dx(e) + ky[n]);
            if right {
                r[3][j] = cj * e[n];
                r[4][j] = ck * hx[n];
                r[5][j] = ck * hy[n];
            }
        }
        r
    });
    for (i, r) in rows.into_iter().enumerate() {
        for c in 0..6 {
            out.comps[c][i * g.ny..(i + 1) * g.ny].copy_from_slice(&r[c]);
        }
    }
    out
}

/// Zeroes the columns that `apply_hamiltonian_fd` leaves undefined.
pub fn mask_fd_invalid(u: &mut FieldState) {
    let g = u.grid;
    let i0 = g.i0();
    for i in 0..g.nx {
        let invalid = i == 0 || i + 1 == g.nx || (i + 1 >= i0 && i <= i0 + 1);
        for c in 0..6 {
            for j in 0..g.ny {
                if invalid || j == 0 || j + 1 == g.ny {
                    u.comps[c][g.idx(i, j)] = ZERO;
                }
            }
        }
    }
    u.hx_left.iter_mut().for_each(|v| *v = ZERO);
}

/// JSON sidecar describing a binary dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpSidecar {
    /// Layout identifier.
    pub format: String,
    /// Element type.
    pub dtype: String,
    /// Sampling grid.
    pub grid: Grid2,
    /// Component order of the blocks.
    pub components: Vec<String>,
    /// Values per block.
    pub block_len: usize,
    /// Index formula.
    pub index: String,
}

/// Writes the field as little-endian complex64 blocks plus a JSON sidecar.
pub fn write_binary(u: &FieldState, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    let mut blocks: Vec<&[C64]> = u.comps.iter().map(|c| c.as_slice()).collect();
    blocks.push(&u.hx_left);
    for b in blocks {
        for v in b {
            f.write_all(&(v.re as f32).to_le_bytes())?;
            f.write_all(&(v.im as f32).to_le_bytes())?;
        }
    }
    f.flush()?;
    let side = DumpSidecar {
        format: "drude-field/1".into(),
        dtype: "complex64-le".into(),
        grid: u.grid,
        components: ["E", "Hx", "Hy", "J", "Kx", "Ky", "Hx_left"].iter().map(|s| s.to_string()).collect(),
        block_len: u.grid.len(),
        index: "i*ny+j, x_i = (i - nx/2)*hx, y_j = (j - ny/2)*hy; Hx_left has ny values".into(),
    };
    std::fs::write(path.with_extension("json"), serde_json::to_string_pretty(&side)?)?;
    Ok(())
}

/// Reads a dump written by [`write_binary`].
pub fn read_binary(path: &Path) -> Result<FieldState> {
    let side: DumpSidecar = serde_json::from_str(&std::fs::read_to_string(path.with_extension("json"))?)?;
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let vals: Vec<C64> = bytes
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            C64::new(re as f64, im as f64)
        })
        .collect();
    let n = side.grid.len();
    if vals.len() != 6 * n + side.grid.ny {
        return Err(DrudeError::GridMismatch("dump length does not match its sidecar".into()));
    }
    let mut u = FieldState::zeros(side.grid);
    for c in 0..6 {
        u.comps[c].copy_from_slice(&vals[c * n..(c + 1) * n]);
    }
    u.hx_left.copy_from_slice(&vals[6 * n..]);
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn nc() -> MediumParams {
        MediumParams::non_critical()
    }

    fn random_field(grid: Grid2, seed: u64) -> FieldState {
        let mut u = FieldState::zeros(grid);
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for c in 0..6 {
            for v in u.comps[c].iter_mut() {
                *v = C64::new(next(), next());
            }
        }
        for v in u.hx_left.iter_mut() {
            *v = C64::new(next(), next());
        }
        u.restrict_currents();
        u
    }

    #[test]
    fn grid_requires_interface_on_node() {
        assert!(Grid2::new(1.0, 1.0, 0.3, 0.1).is_err());
        let g = Grid2::square(40.0, 0.1).unwrap();
        assert_eq!(g.nx, 801);
        assert_eq!(g.x(g.i0()), 0.0);
        assert!((g.x(0) + 40.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let g = Grid2::square(2.0, 0.1).unwrap();
        assert_eq!(inner_h(&nc(), &FieldState::zeros(g), &FieldState::zeros(g)).unwrap(), ZERO);
    }

    #[test]
    fn gaussian_energy_matches_closed_form() {
        let g = Grid2::square(10.0, 0.1).unwrap();
        let w = 1.3;
        let u = make_source(SourceKind::GaussianE, (0.0, 0.0), w, 1.0, g).unwrap();
        // ∫ exp(−r²/w²) = π w²
        let n2 = inner_h(&nc(), &u, &u).unwrap().re;
        assert!((n2 - PI * w * w).abs() < 1e-9);
    }

    #[test]
    fn weighted_norm_of_constant_tends_to_pi_squared() {
        let g = Grid2::square(400.0, 0.25).unwrap();
        let u = make_source_fn(g, |_, _| C64::new(1.0, 0.0)).unwrap();
        let n = norm_weighted(&nc(), &u, WeightParams::new(1.0).unwrap(), WeightSign::Minus).unwrap();
        // (2 arctan 400)² differs from π² by about 1%
        let exact = (2.0 * 400f64.atan()).powi(2);
        assert!((n * n - exact).abs() / exact < 1e-5);
        assert!((exact - PI * PI).abs() / (PI * PI) < 1e-2);
    }

    #[test]
    fn ring_with_zero_amplitude_is_zero() {
        let g = Grid2::square(3.0, 0.1).unwrap();
        let u = make_source(SourceKind::RingE { radius: 1.0 }, (0.0, 0.0), 0.3, 0.0, g).unwrap();
        assert_eq!(u.max_abs(), 0.0);
        let v = make_source(SourceKind::GaussianE, (0.0, 0.0), 0.5, 1.0, g).unwrap();
        assert_eq!(max_div_interior(&v, Component::Hx, Component::Hy), 0.0);
    }

    #[test]
    fn trapezoid_converges_at_second_order() {
        // Kinked field |x|-dependent exponential: nodes at x = 0 keep order 2.
        let f = |x: f64, y: f64| C64::new((-(x.abs()) - y * y).exp(), 0.0);
        let exact = 2.0 * PI.sqrt() * (1.0 - (-6.0f64).exp());
        let errs: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&h| {
                let g = Grid2::square(6.0, h).unwrap();
                let u = make_source_fn(g, f).unwrap();
                let v = make_source_fn(g, |_, _| C64::new(1.0, 0.0)).unwrap();
                (inner_h(&nc(), &u, &v).unwrap().re - exact).abs()
            })
            .collect();
        let order = (errs[0] / errs[2]).log2() / 2.0;
        assert!(order > 1.9, "order {order} errs {errs:?}");
    }

    #[test]
    fn binary_dump_round_trips() {
        let g = Grid2::square(1.0, 0.25).unwrap();
        let u = random_field(g, 3);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.bin");
        write_binary(&u, &path).unwrap();
        let v = read_binary(&path).unwrap();
        assert!(u.sub(&v).unwrap().max_abs() < 1e-7);
    }

    #[test]
    fn hamiltonian_fd_is_symmetric_on_compact_fields() {
        // (A_h U, V) = (U, A_h V) for fields vanishing near boundary and interface.
        let p = nc();
        let g = Grid2::square(6.0, 0.1).unwrap();
        let bump = |x0: f64, y0: f64, s: f64| {
            move |x: f64, y: f64| {
                let r2 = (x - x0).powi(2) + (y - y0).powi(2);
                if r2 < 1.0 {
                    s * (-1.0 / (1.0 - r2)).exp()
                } else {
                    0.0
                }
            }
        };
        let mk = |a: f64, b: f64| {
            let (f, gf) = (bump(-2.5, 0.3, a), bump(2.5, -0.4, b));
            let mut u = FieldState::zeros(g);
            for i in 0..g.nx {
                for j in 0..g.ny {
                    let (x, y) = (g.x(i), g.y(j));
                    let n = g.idx(i, j);
                    u.comps[0][n] = C64::new(f(x, y) + gf(x, y), 0.3 * f(x, y));
                    u.comps[1][n] = C64::new(0.5 * f(x, y), gf(x, y));
                    u.comps[2][n] = C64::new(-f(x, y), 0.7 * gf(x, y));
                    u.comps[3][n] = C64::new(gf(x, y), 0.0);
                    u.comps[4][n] = C64::new(0.0, -gf(x, y));
                    u.comps[5][n] = C64::new(0.2 * gf(x, y), gf(x, y));
                }
            }
            u
        };
        let (u, v) = (mk(1.0, 1.0), mk(0.7, -1.3));
        let a = inner_h(&p, &apply_hamiltonian_fd(&p, &u), &v).unwrap();
        let b = inner_h(&p, &u, &apply_hamiltonian_fd(&p, &v)).unwrap();
        assert!((a - b).norm() < 1e-10 * a.norm().max(1.0), "a={a} b={b}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn inner_product_is_positive_and_cauchy_schwarz(seed in 0u64..1000, s in 0.6f64..2.5) {
            let p = nc();
            let g = Grid2::square(3.0, 0.25).unwrap();
            let (u, v) = (random_field(g, seed), random_field(g, seed + 7919));
            let uu = inner_h(&p, &u, &u).unwrap();
            prop_assert!(uu.re >= 0.0 && uu.im.abs() < 1e-12 * uu.re);
            let w = WeightParams::new(s).unwrap();
            let lhs = pairing(&p, &u, &v, w).unwrap().norm();
            let rhs = norm_weighted(&p, &u, w, WeightSign::Minus).unwrap() * norm_weighted(&p, &v, w, WeightSign::Plus).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
            let nm = norm_weighted(&p, &u, w, WeightSign::Minus).unwrap();
            let nh = norm_h(&p, &u).unwrap();
            let np = norm_weighted(&p, &u, w, WeightSign::Plus).unwrap();
            prop_assert!(nm <= nh * (1.0 + 1e-12) && nh <= np * (1.0 + 1e-12));
        }
    }
}
