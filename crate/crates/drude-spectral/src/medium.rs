//! The two-media model: Drude permittivity and permeability, spectral cuts and
//! the branch-selected square roots θ⁻ (vacuum side) and θ⁺ (Drude side).

use crate::error::{domain, DrudeError, Result};
use crate::spectral_geometry::ZoneLabel;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Physical constants of the interface problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// Vacuum permittivity ε0.
    pub eps0: f64,
    /// Vacuum permeability μ0.
    pub mu0: f64,
    /// Electric plasma frequency Ω_e.
    pub omega_e: f64,
    /// Magnetic plasma frequency Ω_m.
    pub omega_m: f64,
}

/// Half-plane selector: vacuum for x < 0, Drude material for x > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// x < 0.
    Vacuum,
    /// x > 0.
    Drude,
}

/// Regime of a branch-selected square root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Real and non-negative (evanescent side).
    PositiveReal,
    /// Purely imaginary with negative imaginary part.
    NegativeImaginary,
    /// Purely imaginary with positive imaginary part.
    PositiveImaginary,
}

/// A square root θ± together with its branch regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedRoot {
    /// The root, real ≥ 0 or purely imaginary.
    pub value: C64,
    /// Which branch produced it.
    pub regime: Regime,
}

/// Cut wavenumbers of a horizontal line |λ| = const.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutFunctions {
    /// k0 = √(ε0μ0)|λ|.
    pub k0: f64,
    /// k_D, defined for |λ| ≥ max(Ω_e, Ω_m).
    pub k_d: Option<f64>,
    /// k_I, defined for 0 < |λ| ≤ min(Ω_e, Ω_m).
    pub k_i: Option<f64>,
    /// k⁺: k_I, i√(−ε⁺μ⁺)|λ| or k_D depending on the band.
    pub k_plus: C64,
}

impl MediumParams {
    /// Validated constructor; every constant must be finite and positive.
    pub fn new(eps0: f64, mu0: f64, omega_e: f64, omega_m: f64) -> Result<Self> {
        for (name, v) in [("eps0", eps0), ("mu0", mu0), ("omega_e", omega_e), ("omega_m", omega_m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(DrudeError::Config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(Self { eps0, mu0, omega_e, omega_m })
    }

    /// Reference non-critical medium ε0 = μ0 = 1, Ω_e = √2, Ω_m = 1.
    pub fn non_critical() -> Self {
        Self { eps0: 1.0, mu0: 1.0, omega_e: std::f64::consts::SQRT_2, omega_m: 1.0 }
    }

    /// Critical medium ε0 = μ0 = 1, Ω_e = Ω_m = `omega`.
    pub fn critical(omega: f64) -> Self {
        Self { eps0: 1.0, mu0: 1.0, omega_e: omega, omega_m: omega }
    }

    /// Speed of light c = (ε0μ0)^{−1/2}.
    pub fn light_speed(&self) -> f64 {
        1.0 / (self.eps0 * self.mu0).sqrt()
    }

    /// Plasmonic frequency Ω_p = Ω_m/√2.
    pub fn omega_p(&self) -> f64 {
        self.omega_m / std::f64::consts::SQRT_2
    }

    /// Cross-point frequency Ω_c = Ω_eΩ_m/√(Ω_e² + Ω_m²).
    pub fn omega_c(&self) -> f64 {
        self.omega_e * self.omega_m / self.omega_e.hypot(self.omega_m)
    }

    /// Cross-point wavenumber k_c = √(ε0μ0)Ω_c.
    pub fn k_c(&self) -> f64 {
        (self.eps0 * self.mu0).sqrt() * self.omega_c()
    }

    /// K = ε0μ0(Ω_m² − Ω_e²).
    pub fn big_k(&self) -> f64 {
        self.eps0 * self.mu0 * (self.omega_m - self.omega_e) * (self.omega_m + self.omega_e)
    }

    /// Exact equality Ω_e = Ω_m.
    pub fn is_critical(&self) -> bool {
        self.omega_e == self.omega_m
    }

    /// min(Ω_e, Ω_m).
    pub fn omega_min(&self) -> f64 {
        self.omega_e.min(self.omega_m)
    }

    /// max(Ω_e, Ω_m).
    pub fn omega_max(&self) -> f64 {
        self.omega_e.max(self.omega_m)
    }

    /// Non-negative frequencies excluded from the density: {0, Ω_m} and, off
    /// the critical case, Ω_p.
    pub fn excluded_frequencies(&self) -> Vec<f64> {
        if self.is_critical() {
            vec![0.0, self.omega_m]
        } else {
            vec![0.0, self.omega_p(), self.omega_m]
        }
    }

    /// True if |λ| is within `radius` of an excluded frequency.
    pub fn is_excluded(&self, lambda: f64, radius: f64) -> bool {
        self.excluded_frequencies().iter().any(|&w| (lambda.abs() - w).abs() <= radius)
    }

    /// Natural frequency scale max(Ω_e, Ω_m).
    pub fn frequency_scale(&self) -> f64 {
        self.omega_max()
    }

    /// ε⁺μ⁺λ² in factored form ε0μ0(λ² − Ω_e²)(λ² − Ω_m²)/λ².
    pub(crate) fn drude_index_sq(&self, lambda: f64) -> f64 {
        let l2 = lambda * lambda;
        self.eps0 * self.mu0 * (lambda - self.omega_e) * (lambda + self.omega_e) * (lambda - self.omega_m) * (lambda + self.omega_m) / l2
    }
}

/// Permittivity ε_λ on the requested side.
pub fn eps_lambda(p: &MediumParams, lambda: f64, side: Side) -> Result<f64> {
    match side {
        Side::Vacuum => Ok(p.eps0),
        Side::Drude => {
            if lambda == 0.0 {
                return domain("ε⁺ has a pole at λ = 0");
            }
            Ok(p.eps0 * (lambda - p.omega_e) * (lambda + p.omega_e) / (lambda * lambda))
        }
    }
}

/// Permeability μ_λ on the requested side.
pub fn mu_lambda(p: &MediumParams, lambda: f64, side: Side) -> Result<f64> {
    match side {
        Side::Vacuum => Ok(p.mu0),
        Side::Drude => {
            if lambda == 0.0 {
                return domain("μ⁺ has a pole at λ = 0");
            }
            Ok(p.mu0 * (lambda - p.omega_m) * (lambda + p.omega_m) / (lambda * lambda))
        }
    }
}

/// Θ = k² − ε_λμ_λλ² on the requested side.
pub fn big_theta(p: &MediumParams, k: f64, lambda: f64, side: Side) -> Result<f64> {
    match side {
        Side::Vacuum => Ok(k * k - p.eps0 * p.mu0 * lambda * lambda),
        Side::Drude => {
            if lambda == 0.0 {
                return domain("Θ⁺ has a pole at λ = 0");
            }
            Ok(k * k - p.drude_index_sq(lambda))
        }
    }
}

/// Applies the branch table for θ⁻ (vacuum) or θ⁺ (Drude) in the named zone.
pub fn theta_branch(p: &MediumParams, k: f64, lambda: f64, zone: ZoneLabel, side: Side) -> Result<BranchedRoot> {
    use ZoneLabel::*;
    let mag = big_theta(p, k, lambda, side)?.abs().sqrt();
    let sg = if lambda < 0.0 { -1.0 } else { 1.0 };
    // factor f: θ = f·i·sgn(λ)·|Θ|^{1/2}, or real when f = 0
    let f = match side {
        Side::Vacuum => match zone {
            DI | DE | DD => -1.0,
            _ => 0.0,
        },
        Side::Drude => match zone {
            EI | DI => 1.0,
            DD => -1.0,
            _ => 0.0,
        },
    };
    if f == 0.0 {
        return Ok(BranchedRoot { value: C64::new(mag, 0.0), regime: Regime::PositiveReal });
    }
    let im = f * sg;
    let regime = if im > 0.0 { Regime::PositiveImaginary } else { Regime::NegativeImaginary };
    Ok(BranchedRoot { value: C64::new(0.0, im * mag), regime })
}

/// Cut wavenumbers k0, k_D, k_I and k⁺ at frequency λ.
pub fn cut_functions(p: &MediumParams, lambda: f64) -> Result<CutFunctions> {
    if lambda == 0.0 {
        return domain("cut functions are undefined at λ = 0");
    }
    let la = lambda.abs();
    let k0 = (p.eps0 * p.mu0).sqrt() * la;
    let n2 = p.drude_index_sq(la);
    let (k_d, k_i) = if la >= p.omega_max() {
        (Some(n2.max(0.0).sqrt()), if la <= p.omega_min() { Some(0.0) } else { None })
    } else if la <= p.omega_min() {
        (None, Some(n2.max(0.0).sqrt()))
    } else {
        (None, None)
    };
    let k_plus = match (k_d, k_i) {
        (Some(kd), _) => C64::new(kd, 0.0),
        (None, Some(ki)) => C64::new(ki, 0.0),
        (None, None) => C64::new(0.0, (-n2).max(0.0).sqrt()),
    };
    Ok(CutFunctions { k0, k_d, k_i, k_plus })
}

/// Inverse cuts at fixed |k|: frequencies λ > 0 where a cut crosses the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseCuts {
    /// λ0(k) = |k|/√(ε0μ0).
    pub lambda0: f64,
    /// λ_D(k) ≥ max(Ω_e, Ω_m) with k_D(λ_D) = |k|.
    pub lambda_d: f64,
    /// λ_I(k) ≤ min(Ω_e, Ω_m) with k_I(λ_I) = |k|.
    pub lambda_i: f64,
}

/// Solves k_D(λ) = |k| and k_I(λ) = |k| for λ > 0, and λ0 = |k|c.
pub fn inverse_cuts(p: &MediumParams, k: f64) -> InverseCuts {
    let a = p.omega_e * p.omega_e;
    let b = p.omega_m * p.omega_m;
    let kappa = k * k / (p.eps0 * p.mu0);
    // u² − (a + b + κ)u + ab = 0, u = λ²
    let s = a + b + kappa;
    let disc = ((a - b) * (a - b) + kappa * (kappa + 2.0 * (a + b))).sqrt();
    let up = 0.5 * (s + disc);
    let um = a * b / up;
    InverseCuts { lambda0: k.abs() * p.light_speed(), lambda_d: up.sqrt(), lambda_i: um.sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_geometry::ZoneLabel;

    fn nc() -> MediumParams {
        MediumParams::non_critical()
    }

    #[test]
    fn derived_frequencies_for_reference_medium() {
        let p = nc();
        assert!((p.omega_p() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((p.omega_c() - 0.816_496_6).abs() < 1e-7);
        assert!((p.k_c() - p.omega_c()).abs() < 1e-15);
        assert!((p.big_k() + 1.0).abs() < 1e-15);
        assert!(!p.is_critical());
        assert!(MediumParams::critical(1.0).is_critical());
    }

    #[test]
    fn constructor_rejects_non_positive() {
        assert!(MediumParams::new(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(MediumParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn permittivity_examples() {
        let p = nc();
        assert!(eps_lambda(&p, 2f64.sqrt(), Side::Drude).unwrap().abs() < 1e-15);
        assert!((eps_lambda(&p, 1.0, Side::Drude).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(eps_lambda(&p, 0.3, Side::Vacuum).unwrap(), 1.0);
        assert!(eps_lambda(&p, 0.0, Side::Drude).is_err());
        assert!(mu_lambda(&p, 0.0, Side::Drude).is_err());
        assert!((mu_lambda(&p, 2.0, Side::Drude).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn big_theta_examples() {
        let p = nc();
        assert_eq!(big_theta(&p, 0.0, 2.0, Side::Vacuum).unwrap(), -4.0);
        assert!((big_theta(&p, 0.0, 2.0, Side::Drude).unwrap() + 1.5).abs() < 1e-14);
        let k0 = cut_functions(&p, 0.6).unwrap().k0;
        assert!(big_theta(&p, k0, 0.6, Side::Vacuum).unwrap().abs() < 1e-15);
    }

    #[test]
    fn theta_branch_examples() {
        let p = nc();
        let t = theta_branch(&p, 0.0, 2.0, ZoneLabel::DD, Side::Vacuum).unwrap();
        assert!((t.value - C64::new(0.0, -2.0)).norm() < 1e-15);
        assert_eq!(t.regime, Regime::NegativeImaginary);
        let t = theta_branch(&p, 0.0, 2.0, ZoneLabel::DD, Side::Drude).unwrap();
        assert!((t.value - C64::new(0.0, -1.224_744_871)).norm() < 1e-9);
        let t = theta_branch(&p, 0.0, -2.0, ZoneLabel::DD, Side::Drude).unwrap();
        assert_eq!(t.regime, Regime::PositiveImaginary);
        for side in [Side::Vacuum, Side::Drude] {
            let t = theta_branch(&p, 3.0, 0.75, ZoneLabel::EE, side).unwrap();
            assert_eq!(t.regime, Regime::PositiveReal);
            assert!(t.value.re > 0.0);
        }
    }

    #[test]
    fn cut_function_examples() {
        let p = nc();
        let c = cut_functions(&p, 0.5).unwrap();
        assert!((c.k0 - 0.5).abs() < 1e-15);
        assert!((c.k_i.unwrap() - 2.291_287_847).abs() < 1e-8);
        assert!(c.k_d.is_none());
        let c = cut_functions(&p, 2f64.sqrt()).unwrap();
        assert!(c.k_d.unwrap().abs() < 1e-7);
        let c = cut_functions(&p, 1.2).unwrap();
        assert!(c.k_plus.re == 0.0 && c.k_plus.im > 0.0);
        assert!(cut_functions(&p, 0.0).is_err());
        assert!(cut_functions(&p, 1.0).unwrap().k_i.unwrap().abs() < 1e-15);
    }

    #[test]
    fn inverse_cuts_round_trip() {
        let p = nc();
        for &k in &[0.1, 0.7, 1.3, 4.0] {
            let ic = inverse_cuts(&p, k);
            let kd = cut_functions(&p, ic.lambda_d).unwrap().k_d.unwrap();
            let ki = cut_functions(&p, ic.lambda_i).unwrap().k_i.unwrap();
            assert!((kd - k).abs() < 1e-12 * (1.0 + k), "kd={kd} k={k}");
            assert!((ki - k).abs() < 1e-12 * (1.0 + k), "ki={ki} k={k}");
        }
    }
}
