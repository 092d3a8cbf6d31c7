//! Generalized eigenfunctions: Wronskian, normalization, x-profiles and the
//! six-component mode vectors W_{k,λ,j}.

use crate::error::{domain, DrudeError, Result};
use crate::medium::{mu_lambda, theta_branch, MediumParams, Side};
use crate::spectral_geometry::{classify, lambda_e, ZoneLabel};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative threshold below which a bulk mode is flagged near-singular.
pub const NEAR_SINGULAR_REL: f64 = 1e-8;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Component order of field and mode vectors.
pub const COMPONENT_NAMES: [&str; 6] = ["E", "Hx", "Hy", "J", "Kx", "Ky"];

/// Index of a generalized eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeIndex {
    /// Wavenumber along the interface.
    pub k: f64,
    /// Frequency.
    pub lambda: f64,
    /// Channel j ∈ {−1, 0, +1}.
    pub j: i8,
    /// Zone of (k, λ).
    pub zone: ZoneLabel,
}

impl ModeIndex {
    /// Classifies (k, λ) and checks that `j` is admitted by its zone.
    pub fn new(p: &MediumParams, k: f64, lambda: f64, j: i8) -> Result<Self> {
        let zone = classify(p, k, lambda);
        Self::with_zone(k, lambda, j, zone)
    }

    /// Builds an index in a zone supplied by the caller, checking `j`.
    pub fn with_zone(k: f64, lambda: f64, j: i8, zone: ZoneLabel) -> Result<Self> {
        if !zone.modes().contains(&j) {
            return domain(format!("j = {j} is not admissible in zone {} at (k, λ) = ({k}, {lambda})", zone.name()));
        }
        Ok(Self { k, lambda, j, zone })
    }

    /// Plasmonic mode on the curve at wavenumber k (λ = ±λ_E(k)).
    pub fn plasmon(p: &MediumParams, k: f64, positive: bool) -> Result<Self> {
        let l = lambda_e(p, k)?;
        if k.abs() <= p.k_c() {
            return domain("plasmonic modes require |k| > k_c");
        }
        Ok(Self { k, lambda: if positive { l } else { -l }, j: 0, zone: ZoneLabel::EE })
    }
}

/// Branch roots, Wronskian and normalization of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeData {
    /// The index.
    pub index: ModeIndex,
    /// θ⁻ (vacuum side).
    pub theta_m: C64,
    /// θ⁺ (Drude side).
    pub theta_p: C64,
    /// μ⁺ at λ.
    pub mu_p: f64,
    /// W = θ⁻/μ0 + θ⁺/μ⁺.
    pub wronskian: C64,
    /// Normalization A.
    pub amplitude: f64,
    /// |θ∓| below the near-singular threshold.
    pub near_singular: bool,
    mu0: f64,
    eps0: f64,
    omega_e2: f64,
    omega_m2: f64,
}

/// A sampled mode at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSample {
    /// Scalar mode w = Aψe^{iky}.
    pub w: C64,
    /// ∂ₓw (side-consistent; right limit at x = 0).
    pub dxw: C64,
    /// (E, H_x, H_y, J, K_x, K_y).
    pub full: [C64; 6],
}

#[inline]
fn cosh_c(z: C64) -> C64 {
    if z.re == 0.0 {
        C64::new(z.im.cos(), 0.0)
    } else {
        z.cosh()
    }
}

/// sinh(z)/z, regular at z = 0.
#[inline]
fn sinhc_c(z: C64) -> C64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
    }
    if z.re == 0.0 {
        C64::new(z.im.sin() / z.im, 0.0)
    } else {
        z.sinh() / z
    }
}

/// Wronskian θ⁻/μ0 + θ⁺/μ⁺ with branch-correct roots.
pub fn wronskian(p: &MediumParams, k: f64, lambda: f64, zone: ZoneLabel) -> Result<C64> {
    if zone == ZoneLabel::Boundary {
        return domain("the Wronskian is not evaluated on zone boundaries");
    }
    if lambda == 0.0 || lambda.abs() == p.omega_m {
        return domain(format!("λ = {lambda} makes μ⁺ singular or zero"));
    }
    let tm = theta_branch(p, k, lambda, zone, Side::Vacuum)?.value;
    let tp = theta_branch(p, k, lambda, zone, Side::Drude)?.value;
    let mup = mu_lambda(p, lambda, Side::Drude)?;
    Ok(tm / p.mu0 + tp / mup)
}

/// Normalization A_{k,λ,j} of an admissible mode.
pub fn normalization(p: &MediumParams, k: f64, lambda: f64, j: i8) -> Result<f64> {
    let idx = if j == 0 { ModeIndex::with_zone(k, lambda, 0, ZoneLabel::EE)? } else { ModeIndex::new(p, k, lambda, j)? };
    Ok(ModeData::new(p, idx)?.amplitude)
}

impl ModeData {
    /// Evaluates roots, Wronskian and normalization.
    pub fn new(p: &MediumParams, index: ModeIndex) -> Result<Self> {
        let ModeIndex { k, lambda, j, zone } = index;
        if lambda == 0.0 || lambda.abs() == p.omega_m {
            return domain(format!("λ = {lambda} is excluded for modes"));
        }
        let tm = theta_branch(p, k, lambda, zone, Side::Vacuum)?.value;
        let tp = theta_branch(p, k, lambda, zone, Side::Drude)?.value;
        let mup = mu_lambda(p, lambda, Side::Drude)?;
        let w = tm / p.mu0 + tp / mup;
        let amplitude = match j {
            0 => {
                let l2 = lambda * lambda;
                let dk = p.eps0 * p.mu0 * (p.omega_e * p.omega_e - p.omega_m * p.omega_m);
                let den = (2.0 * PI).sqrt() * p.omega_m * (4.0 * k.powi(4) + dk * dk).powf(0.25);
                l2 * (mup * tp.re).abs().sqrt() / den
            }
            _ => {
                if w.norm() == 0.0 {
                    return Err(DrudeError::Singular(format!("Wronskian vanishes at (k, λ) = ({k}, {lambda})")));
                }
                let num = if j == 1 { tm / p.mu0 } else { tp / mup };
                (0.5 * lambda * num).norm().sqrt() / (PI * w.norm())
            }
        };
        let k0 = (p.eps0 * p.mu0).sqrt() * lambda.abs();
        let near_singular = j != 0 && (tm.norm() < NEAR_SINGULAR_REL * k0 || tp.norm() < NEAR_SINGULAR_REL * k0);
        Ok(Self {
            index,
            theta_m: tm,
            theta_p: tp,
            mu_p: mup,
            wronskian: w,
            amplitude,
            near_singular,
            mu0: p.mu0,
            eps0: p.eps0,
            omega_e2: p.omega_e * p.omega_e,
            omega_m2: p.omega_m * p.omega_m,
        })
    }

    /// Profile ψ(x) and its one-sided derivative; at x = 0 the derivative is
    /// taken from the side selected by `right`.
    pub fn psi(&self, x: f64, right: bool) -> (C64, C64) {
        let (tm, tp) = (self.theta_m, self.theta_p);
        let on_right = x > 0.0 || (x == 0.0 && right);
        match (self.index.j, on_right) {
            (1, false) => {
                let c = tp * self.mu0 / self.mu_p;
                let z = tm * x;
                let ch = cosh_c(z);
                let shc = sinhc_c(z);
                // sinh(θx) = θx·sinhc(θx)
                (ch - c * x * shc, tm * tm * x * shc - c * ch)
            }
            (-1, true) => {
                let d = tm * self.mu_p / self.mu0;
                let z = tp * x;
                let ch = cosh_c(z);
                let shc = sinhc_c(z);
                (ch + d * x * shc, tp * tp * x * shc + d * ch)
            }
            (1, true) | (0, true) => {
                let e = (-tp * x).exp();
                (e, -tp * e)
            }
            _ => {
                let e = (tm * x).exp();
                (e, tm * e)
            }
        }
    }

    /// Multipliers turning (ψ, ψ′) into the six components on one side:
    /// components 0, 1, 3, 4 multiply ψ and components 2, 5 multiply ψ′.
    pub fn coefficients(&self, right: bool) -> [C64; 6] {
        let ModeIndex { k, lambda: l, .. } = self.index;
        let a = self.amplitude;
        let mu = if right { self.mu_p } else { self.mu0 };
        let mut c = [C64::new(a, 0.0), C64::new(a * k / (mu * l), 0.0), I * (a / (mu * l)), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        if right {
            c[3] = I * (self.eps0 * self.omega_e2 * a / l);
            c[4] = I * (k * self.mu0 * self.omega_m2 * a / (self.mu_p * l * l));
            c[5] = C64::new(-self.mu0 * self.omega_m2 * a / (self.mu_p * l * l), 0.0);
        }
        c
    }

    /// Six-component x-profile at x (right limit at x = 0 unless `right` is false).
    pub fn vector(&self, x: f64, right: bool) -> [C64; 6] {
        let (psi, dpsi) = self.psi(x, right);
        let on_right = x > 0.0 || (x == 0.0 && right);
        let c = self.coefficients(on_right);
        [c[0] * psi, c[1] * psi, c[2] * dpsi, c[3] * psi, c[4] * psi, c[5] * dpsi]
    }

    /// Full sample at (x, y).
    pub fn sample(&self, x: f64, y: f64) -> ModeSample {
        let ph = C64::from_polar(1.0, self.index.k * y);
        let (psi, dpsi) = self.psi(x, true);
        let v = self.vector(x, true);
        ModeSample { w: self.amplitude * psi * ph, dxw: self.amplitude * dpsi * ph, full: [v[0] * ph, v[1] * ph, v[2] * ph, v[3] * ph, v[4] * ph, v[5] * ph] }
    }

    /// ψ and ψ′ on the uniform axis x_i = x0 + i·h, i < n, using exponential
    /// recurrences started at the node nearest the interface. At x = 0 the
    /// right limit is stored.
    pub fn psi_on_axis(&self, x0: f64, h: f64, n: usize, psi: &mut [C64], dpsi: &mut [C64]) {
        if n == 0 {
            return;
        }
        // index of the first node with x >= 0 (tolerant to rounding)
        let first_right = (((-x0) / h) - 1e-9).ceil().clamp(0.0, n as f64) as usize;
        let right_side = self.side_rep(true);
        let left_side = self.side_rep(false);
        if first_right < n {
            right_side.fill(x0 + first_right as f64 * h, h, &mut psi[first_right..n], &mut dpsi[first_right..n], false);
        }
        if first_right > 0 {
            // fill leftwards from the node nearest 0
            let start = x0 + (first_right - 1) as f64 * h;
            left_side.fill(start, -h, &mut psi[..first_right], &mut dpsi[..first_right], true);
        }
    }

    fn side_rep(&self, right: bool) -> SideRep {
        let (tm, tp) = (self.theta_m, self.theta_p);
        match (self.index.j, right) {
            (1, false) => {
                let c = tp * self.mu0 / self.mu_p;
                SideRep::pair(tm, -c, self)
            }
            (-1, true) => {
                let d = tm * self.mu_p / self.mu0;
                SideRep::pair(tp, d, self)
            }
            (1, true) | (0, true) => SideRep::Exp { theta: -tp },
            _ => SideRep::Exp { theta: tm },
        }
    }
}

/// ψ = cosh(θx) + c·sinh(θx)/θ as α e^{θx} + β e^{−θx}, or a single exponential.
enum SideRep {
    Pair { theta: C64, alpha: C64, beta: C64, c: C64 },
    Exp { theta: C64 },
}

impl SideRep {
    fn pair(theta: C64, c: C64, _m: &ModeData) -> Self {
        SideRep::Pair { theta, alpha: 0.5 * (1.0 + c / theta), beta: 0.5 * (1.0 - c / theta), c }
    }

    /// Fills values at x_start + i·step; `reverse` stores them from the end of the slices.
    fn fill(&self, x_start: f64, step: f64, psi: &mut [C64], dpsi: &mut [C64], reverse: bool) {
        let n = psi.len();
        let idx = |i: usize| if reverse { n - 1 - i } else { i };
        match *self {
            SideRep::Exp { theta } => {
                let mut e = (theta * x_start).exp();
                let r = (theta * step).exp();
                for i in 0..n {
                    psi[idx(i)] = e;
                    dpsi[idx(i)] = theta * e;
                    e *= r;
                }
            }
            SideRep::Pair { theta, alpha, beta, c } => {
                if theta.norm() * (x_start.abs() + n as f64 * step.abs()) < 1e-3 || !alpha.is_finite() {
                    for i in 0..n {
                        let x = x_start + i as f64 * step;
                        let z = theta * x;
                        let ch = cosh_c(z);
                        let shc = sinhc_c(z);
                        psi[idx(i)] = ch + c * x * shc;
                        dpsi[idx(i)] = theta * theta * x * shc + c * ch;
                    }
                    return;
                }
                let osc = theta.re == 0.0;
                let mut ep = (theta * x_start).exp();
                let rp = (theta * step).exp();
                let mut em = if osc { ep.conj() } else { (-theta * x_start).exp() };
                let rm = if osc { rp.conj() } else { (-theta * step).exp() };
                for i in 0..n {
                    psi[idx(i)] = alpha * ep + beta * em;
                    dpsi[idx(i)] = theta * (alpha * ep - beta * em);
                    ep *= rp;
                    em *= rm;
                }
            }
        }
    }
}

/// Profile ψ_{k,λ,j}(x) (right limit at x = 0).
pub fn profile(p: &MediumParams, k: f64, lambda: f64, j: i8, x: f64) -> Result<C64> {
    Ok(mode_data(p, k, lambda, j)?.psi(x, true).0)
}

/// ∂ₓψ_{k,λ,j}(x) for x ≠ 0.
pub fn profile_dx(p: &MediumParams, k: f64, lambda: f64, j: i8, x: f64) -> Result<C64> {
    if x == 0.0 {
        return domain("∂ₓψ jumps at x = 0; use profile_dx_one_sided");
    }
    Ok(mode_data(p, k, lambda, j)?.psi(x, true).1)
}

/// Left and right limits of ∂ₓψ at x = 0.
pub fn profile_dx_one_sided(p: &MediumParams, k: f64, lambda: f64, j: i8) -> Result<(C64, C64)> {
    let m = mode_data(p, k, lambda, j)?;
    Ok((m.psi(0.0, false).1, m.psi(0.0, true).1))
}

fn mode_data(p: &MediumParams, k: f64, lambda: f64, j: i8) -> Result<ModeData> {
    let idx = if j == 0 { ModeIndex::with_zone(k, lambda, 0, ZoneLabel::EE)? } else { ModeIndex::new(p, k, lambda, j)? };
    ModeData::new(p, idx)
}

/// Samples the mode `index` at (x, y).
pub fn mode_sample(p: &MediumParams, index: ModeIndex, x: f64, y: f64) -> Result<ModeSample> {
    Ok(ModeData::new(p, index)?.sample(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_geometry::k_e;
    use proptest::prelude::*;

    fn nc() -> MediumParams {
        MediumParams::non_critical()
    }

    #[test]
    fn wronskian_examples() {
        let p = nc();
        let k = k_e(&p, 0.75).unwrap();
        assert!(wronskian(&p, k, 0.75, ZoneLabel::EE).unwrap().norm() < 1e-10);
        let w = wronskian(&p, 0.0, 2.0, ZoneLabel::DD).unwrap();
        assert!(w.re == 0.0);
        assert!((w.norm() - (2.0 + 1.5f64.sqrt() / 0.75f64)).abs() < 1e-12);
        assert!(wronskian(&p, 0.3, 1.0, ZoneLabel::DE).is_err());
        // on the vacuum cut from the EI side: θ⁻ = 0
        let l = 0.78;
        let w = wronskian(&p, l, l, ZoneLabel::EI).unwrap();
        let tp = crate::medium::theta_branch(&p, l, l, ZoneLabel::EI, Side::Drude).unwrap().value;
        let mup = mu_lambda(&p, l, Side::Drude).unwrap();
        assert!((w - tp / mup).norm() < 1e-14);
    }

    #[test]
    fn normalization_examples() {
        let p = nc();
        let a = normalization(&p, 0.0, 2.0, 1).unwrap();
        let w = wronskian(&p, 0.0, 2.0, ZoneLabel::DD).unwrap();
        let expect = (2.0f64 * 2.0 / 2.0).sqrt() / (PI * w.norm());
        assert!((a - expect).abs() < 1e-14);
        let c = MediumParams::critical(1.0);
        let a0 = normalization(&c, 2.0, c.omega_p(), 0).unwrap();
        assert!(a0.is_finite() && a0 > 0.0);
        let k = k_e(&p, 0.75).unwrap();
        assert!(normalization(&p, k, 0.75, 1).is_err());
    }

    #[test]
    fn profile_is_one_at_interface_and_transmits() {
        let p = nc();
        for &(k, l, j) in &[(0.3, 2.0, 1i8), (0.3, 2.0, -1), (0.2, 0.5, 1), (1.0, 0.5, -1), (0.5, 1.2, 1)] {
            assert!((profile(&p, k, l, j, 0.0).unwrap() - 1.0).norm() < 1e-15);
            let (dl, dr) = profile_dx_one_sided(&p, k, l, j).unwrap();
            let mup = mu_lambda(&p, l, Side::Drude).unwrap();
            assert!((dl / p.mu0 - dr / mup).norm() < 1e-14 * (1.0 + dl.norm()), "k={k} l={l} j={j}");
        }
    }

    #[test]
    fn plasmon_profile_decays_monotonically() {
        let p = nc();
        let m = ModeData::new(&p, ModeIndex::plasmon(&p, 3.0, true).unwrap()).unwrap();
        let mut prev = 2.0;
        for i in 0..50 {
            let v = m.psi(i as f64 * 0.1, true).0.re;
            assert!(v < prev && v > 0.0);
            prev = v;
        }
        let (dl, dr) = (m.psi(0.0, false).1, m.psi(0.0, true).1);
        assert!((dl / p.mu0 - dr / m.mu_p).norm() < 1e-12 * dl.norm());
    }

    #[test]
    fn restriction_zeroes_currents_on_vacuum_side() {
        let p = nc();
        let s = mode_sample(&p, ModeIndex::new(&p, 0.3, 2.0, 1).unwrap(), -1.0, 0.0).unwrap();
        assert_eq!(&s.full[3..], &[C64::new(0.0, 0.0); 3]);
    }

    #[test]
    fn axis_recurrence_matches_pointwise() {
        let p = nc();
        for &(k, l, j) in &[(0.3, 2.0, 1i8), (0.3, 2.0, -1), (0.2, 0.5, 1), (1.0, 0.5, -1), (0.5, 1.2, 1)] {
            let m = ModeData::new(&p, ModeIndex::new(&p, k, l, j).unwrap()).unwrap();
            let (x0, h, n) = (-40.0, 0.1, 801);
            let mut psi = vec![C64::new(0.0, 0.0); n];
            let mut dpsi = psi.clone();
            m.psi_on_axis(x0, h, n, &mut psi, &mut dpsi);
            for i in 0..n {
                let x = x0 + i as f64 * h;
                let (a, b) = m.psi(if (x).abs() < 1e-9 { 0.0 } else { x }, true);
                assert!((a - psi[i]).norm() < 1e-11 * (1.0 + a.norm()), "i={i} {a} {}", psi[i]);
                assert!((b - dpsi[i]).norm() < 1e-11 * (1.0 + b.norm()));
            }
        }
    }

    #[test]
    fn bulk_modes_obey_pointwise_bound() {
        // |ψ| ≤ C(1 + |θ⁺/θ⁻|) with the cosh/sinh form; w = Aψ stays bounded.
        let p = nc();
        let m = ModeData::new(&p, ModeIndex::new(&p, 0.3, 2.0, 1).unwrap()).unwrap();
        let bound = m.amplitude * (1.0 + (m.theta_p * p.mu0 / (m.mu_p * m.theta_m)).norm());
        for i in 0..201 {
            let x = -10.0 + 0.1 * i as f64;
            assert!(m.sample(x, 0.3).w.norm() <= bound * (1.0 + 1e-12));
        }
    }

    proptest! {
        #[test]
        fn quadrant_parity(k in 0.01f64..3.0, l in 0.05f64..3.0, x in -5.0f64..5.0) {
            let p = nc();
            let z = classify(&p, k, l);
            prop_assume!(z.is_bulk());
            for &j in z.modes() {
                let m1 = ModeData::new(&p, ModeIndex::new(&p, k, l, j).unwrap()).unwrap();
                let m2 = ModeData::new(&p, ModeIndex::new(&p, -k, l, j).unwrap()).unwrap();
                let m3 = ModeData::new(&p, ModeIndex::new(&p, k, -l, j).unwrap()).unwrap();
                let m4 = ModeData::new(&p, ModeIndex::new(&p, -k, -l, j).unwrap()).unwrap();
                let (v1, v2, v3, v4) = (m1.vector(x, true), m2.vector(x, true), m3.vector(x, true), m4.vector(x, true));
                for c in 0..6 {
                    let s = if c == 1 || c == 4 { -1.0 } else { 1.0 };
                    let tol = 1e-12 * (1.0 + v1[c].norm());
                    prop_assert!((v2[c] - s * v1[c]).norm() < tol);
                    prop_assert!((v3[c] - (s * v1[c]).conj()).norm() < tol);
                    prop_assert!((v4[c] - v1[c].conj()).norm() < tol);
                }
            }
        }

        #[test]
        fn scalar_mode_conjugate_in_k(k in 0.01f64..3.0, l in 0.05f64..3.0, x in -5.0f64..5.0, y in -5.0f64..5.0) {
            let p = nc();
            let z = classify(&p, k, l);
            prop_assume!(z.is_bulk());
            for &j in z.modes() {
                let a = mode_sample(&p, ModeIndex::new(&p, k, l, j).unwrap(), x, y).unwrap().w;
                let b = mode_sample(&p, ModeIndex::new(&p, -k, l, j).unwrap(), x, y).unwrap().w;
                // ψ is even in k, so w(−k) differs from w(k) only by the phase e^{−2iky}
                let expect = a * C64::from_polar(1.0, -2.0 * k * y);
                prop_assert!((b - expect).norm() < 1e-12 * (1.0 + a.norm()));
            }
        }
    }
}
