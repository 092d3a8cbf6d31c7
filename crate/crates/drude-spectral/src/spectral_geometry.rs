//! Spectral zones of the (k, λ) plane, their horizontal sections, the
//! plasmonic dispersion curve λ_E / k_E with its Jacobian, and the leading
//! asymptotics of the curve near Ω_p.

use crate::error::{domain, DrudeError, Result};
use crate::medium::{cut_functions, inverse_cuts, MediumParams};
use serde::{Deserialize, Serialize};

/// Default EE membership tolerance factor.
pub const TOL_CURVE: f64 = 1e-12;
/// Default inversion tolerance for k_E.
pub const TOL_INV: f64 = 1e-12;

/// Spectral zone of a point (k, λ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZoneLabel {
    /// Propagative on both sides, |λ| > max(Ω_e, Ω_m).
    DD,
    /// Propagative on both sides, |λ| < min(Ω_e, Ω_m).
    DI,
    /// Evanescent in vacuum, propagative in the Drude medium.
    EI,
    /// Propagative in vacuum, evanescent in the Drude medium.
    DE,
    /// Plasmonic curve (evanescent on both sides, Wronskian zero).
    EE,
    /// Evanescent on both sides, off the curve.
    Outside,
    /// On a spectral cut or an excluded frequency.
    Boundary,
}

impl ZoneLabel {
    /// Mode indices j admitted by the zone.
    pub fn modes(&self) -> &'static [i8] {
        match self {
            ZoneLabel::DD | ZoneLabel::DI => &[1, -1],
            ZoneLabel::DE => &[1],
            ZoneLabel::EI => &[-1],
            ZoneLabel::EE => &[0],
            _ => &[],
        }
    }

    /// True for the four two-dimensional zones.
    pub fn is_bulk(&self) -> bool {
        matches!(self, ZoneLabel::DD | ZoneLabel::DI | ZoneLabel::EI | ZoneLabel::DE)
    }

    /// Short name used in artifacts.
    pub fn name(&self) -> &'static str {
        match self {
            ZoneLabel::DD => "DD",
            ZoneLabel::DI => "DI",
            ZoneLabel::EI => "EI",
            ZoneLabel::DE => "DE",
            ZoneLabel::EE => "EE",
            ZoneLabel::Outside => "OUTSIDE",
            ZoneLabel::Boundary => "BOUNDARY",
        }
    }
}

/// Horizontal section of a zone at frequency λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    /// Zone.
    pub zone: ZoneLabel,
    /// Frequency of the section.
    pub lambda: f64,
    /// Open k-intervals, symmetric under k ↦ −k.
    pub intervals: Vec<(f64, f64)>,
    /// Discrete k-values (plasmonic section off the critical case).
    pub points: Vec<f64>,
}

/// Bulk classification of (|k|, |λ|) with λ > 0 (no EE test).
fn classify_bulk(p: &MediumParams, ka: f64, la: f64) -> ZoneLabel {
    use ZoneLabel::*;
    if la == 0.0 || la == p.omega_m {
        return Boundary;
    }
    let Ok(c) = cut_functions(p, la) else { return Boundary };
    let k0 = c.k0;
    if la >= p.omega_max() {
        let kd = c.k_d.unwrap_or(0.0);
        if ka < kd {
            return DD;
        }
        if ka == kd || ka == k0 {
            return Boundary;
        }
        return if ka < k0 { DE } else { Outside };
    }
    if la <= p.omega_min() {
        let ki = c.k_i.unwrap_or(0.0);
        if ka == ki || ka == k0 {
            return Boundary;
        }
        if ka < k0.min(ki) {
            return DI;
        }
        if k0 < ka && ka < ki {
            return EI;
        }
        if ki < ka && ka < k0 {
            return DE;
        }
        return Outside;
    }
    if ka < k0 {
        DE
    } else if ka == k0 {
        Boundary
    } else {
        Outside
    }
}

/// Zone of (k, λ) with the default curve tolerance.
pub fn classify(p: &MediumParams, k: f64, lambda: f64) -> ZoneLabel {
    classify_with_tol(p, k, lambda, TOL_CURVE)
}

/// Zone of (k, λ); EE membership uses |λ − λ_E(k)| ≤ tol·max(1, |λ|).
pub fn classify_with_tol(p: &MediumParams, k: f64, lambda: f64, tol: f64) -> ZoneLabel {
    let (ka, la) = (k.abs(), lambda.abs());
    let z = classify_bulk(p, ka, la);
    if z == ZoneLabel::Outside && ka > p.k_c() {
        if let Ok(le) = lambda_e(p, ka) {
            if (la - le).abs() <= tol * la.max(1.0) {
                return ZoneLabel::EE;
            }
        }
    }
    z
}

/// Plasmonic curve λ_E(k) ≥ 0 for |k| ≥ k_c.
pub fn lambda_e(p: &MediumParams, k: f64) -> Result<f64> {
    let ka = k.abs();
    let kc = p.k_c();
    if ka < kc * (1.0 - 1e-14) {
        return domain(format!("λ_E is undefined for |k| = {ka} < k_c = {kc}"));
    }
    if p.is_critical() {
        return Ok(p.omega_p());
    }
    let big_k = p.big_k();
    let q = ka * ka / big_k.abs();
    let l2 = p.omega_m * p.omega_m * (0.5 - big_k.signum() * 0.25 / (q + (q * q + 0.25).sqrt()));
    Ok(l2.sqrt())
}

fn g_and_dg(p: &MediumParams, k: f64) -> (f64, f64) {
    let big_k = p.big_k();
    let om2 = p.omega_m * p.omega_m;
    let eps = big_k * big_k / (4.0 * k.powi(4));
    let r = (1.0 + eps).sqrt();
    let rr = r * (r + 1.0);
    let g = om2 * big_k / (4.0 * k.powi(3) * rr);
    let dr = -big_k * big_k / (2.0 * r * k.powi(5));
    let dg = om2 * big_k / 4.0 * (-3.0 / (k.powi(4) * rr) - (2.0 * r + 1.0) * dr / (k.powi(3) * rr * rr));
    (g, dg)
}

/// λ_E′(k) = g(k)/λ_E(k) (zero in the critical case).
pub fn lambda_e_prime(p: &MediumParams, k: f64) -> Result<f64> {
    let le = lambda_e(p, k)?;
    if p.is_critical() {
        return Ok(0.0);
    }
    let (g, _) = g_and_dg(p, k.abs());
    Ok(k.signum() * g / le)
}

/// λ_E″(k) = g′/λ_E − g²/λ_E³ (zero in the critical case).
pub fn lambda_e_second(p: &MediumParams, k: f64) -> Result<f64> {
    let le = lambda_e(p, k)?;
    if p.is_critical() {
        return Ok(0.0);
    }
    let (g, dg) = g_and_dg(p, k.abs());
    Ok(dg / le - g * g / le.powi(3))
}

/// Open plasmonic band (min(Ω_p, Ω_c), max(Ω_p, Ω_c)).
pub fn plasmon_band(p: &MediumParams) -> (f64, f64) {
    let (a, b) = (p.omega_p(), p.omega_c());
    (a.min(b), a.max(b))
}

/// True if |λ| lies strictly inside the plasmonic band (never in the critical case).
pub fn in_plasmon_band(p: &MediumParams, lambda: f64) -> bool {
    let (a, b) = plasmon_band(p);
    !p.is_critical() && lambda.abs() > a && lambda.abs() < b
}

fn check_band(p: &MediumParams, lambda: f64) -> Result<()> {
    if p.is_critical() {
        return Err(DrudeError::Unsupported("the plasmonic curve is flat in the critical case".into()));
    }
    if !in_plasmon_band(p, lambda) {
        let (a, b) = plasmon_band(p);
        return domain(format!("|λ| = {} is outside the plasmonic band ({a}, {b})", lambda.abs()));
    }
    Ok(())
}

/// k_E(λ) ≥ k_c, the inverse of λ_E on [k_c, ∞), with the default tolerance.
pub fn k_e(p: &MediumParams, lambda: f64) -> Result<f64> {
    k_e_with_tol(p, lambda, TOL_INV)
}

/// k_E(λ) by bracketed Newton iteration with bisection safeguard.
pub fn k_e_with_tol(p: &MediumParams, lambda: f64, tol: f64) -> Result<f64> {
    check_band(p, lambda)?;
    let la = lambda.abs();
    let kc = p.k_c();
    let c = asymptotic_constants(p).k_e;
    let decreasing = p.big_k() < 0.0;
    // f(k) = λ_E(k) − |λ| changes sign on [lo, hi]
    let f = |k: f64| lambda_e(p, k).map(|v| v - la);
    let mut lo = kc;
    let mut hi = (4.0 * c / (la - p.omega_p()).abs().sqrt()).max(2.0 * kc);
    let sgn_lo = if decreasing { 1.0 } else { -1.0 };
    let mut guard = 0;
    while f(hi)? * sgn_lo > 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(DrudeError::Singular("k_E bracket expansion failed".into()));
        }
    }
    let mut k = (c / (la - p.omega_p()).abs().sqrt()).clamp(lo, hi);
    for _ in 0..200 {
        let fk = f(k)?;
        if fk * sgn_lo > 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let d = lambda_e_prime(p, k)?;
        let mut next = k - fk / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - k).abs();
        k = next;
        if step <= 4.0 * f64::EPSILON * k || (hi - lo) <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    let res = f(k)?.abs();
    if res > tol * la.max(1.0) {
        return Err(DrudeError::Singular(format!("k_E residual {res} exceeds tolerance")));
    }
    Ok(k)
}

/// J_E(λ) = |k_E′(λ)| = 1/|λ_E′(k_E(λ))|.
pub fn jacobian_e(p: &MediumParams, lambda: f64) -> Result<f64> {
    let k = k_e(p, lambda)?;
    Ok(1.0 / lambda_e_prime(p, k)?.abs())
}

/// k_E″(λ) = −λ_E″/λ_E′³ evaluated at k_E(λ).
pub fn k_e_second(p: &MediumParams, lambda: f64) -> Result<f64> {
    let k = k_e(p, lambda)?;
    let d1 = lambda_e_prime(p, k)?;
    let d2 = lambda_e_second(p, k)?;
    Ok(-d2 / d1.powi(3))
}

/// Leading constants of the Ω_p asymptotics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    /// k_E ≈ c·|λ−Ω_p|^{−1/2}.
    pub k_e: f64,
    /// J_E ≈ c·|λ−Ω_p|^{−3/2}.
    pub j_e: f64,
    /// |k_E″| ≈ c·|λ−Ω_p|^{−5/2}.
    pub kpp: f64,
    /// θ± ∘ k_E ≈ c·|λ−Ω_p|^{−1/2}.
    pub theta: f64,
    /// A ∘ k_E ≈ c·|λ−Ω_p|^{1/4}.
    pub amplitude: f64,
}

/// Constants √(Ω_p|K|/8), half of it, three quarters of it, itself, and the
/// plasmonic amplitude constant μ0^{1/2}Ω_p/(2√(2π))·(Ω_p|K|/8)^{−1/4}.
pub fn asymptotic_constants(p: &MediumParams) -> AsymptoticConstants {
    let op = p.omega_p();
    let c = (op * p.big_k().abs() / 8.0).sqrt();
    let a = p.mu0.sqrt() * op / (2.0 * (2.0 * std::f64::consts::PI).sqrt()) / c.sqrt();
    AsymptoticConstants { k_e: c, j_e: 0.5 * c, kpp: 0.75 * c, theta: c, amplitude: a }
}

/// Leading-order asymptotic values at λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptotics {
    /// k_E.
    pub k_e: f64,
    /// J_E.
    pub j_e: f64,
    /// |k_E″|.
    pub kpp: f64,
    /// θ±.
    pub theta: f64,
    /// Plasmonic amplitude A.
    pub amplitude: f64,
}

/// Evaluates the leading-order expressions at λ on the band side of Ω_p.
pub fn omega_p_asymptotics(p: &MediumParams, lambda: f64) -> Result<Asymptotics> {
    if p.is_critical() {
        return Err(DrudeError::Unsupported("no Ω_p asymptotics in the critical case".into()));
    }
    let d = lambda.abs() - p.omega_p();
    let correct = if p.big_k() < 0.0 { d > 0.0 } else { d < 0.0 };
    if !correct {
        return domain("λ is on the wrong side of Ω_p for these parameters");
    }
    let d = d.abs();
    let c = asymptotic_constants(p);
    Ok(Asymptotics {
        k_e: c.k_e * d.powf(-0.5),
        j_e: c.j_e * d.powf(-1.5),
        kpp: c.kpp * d.powf(-2.5),
        theta: c.theta * d.powf(-0.5),
        amplitude: c.amplitude * d.powf(0.25),
    })
}

/// A k- or λ-interval of one zone with square-root flags at its ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneInterval {
    /// Zone of the interval interior.
    pub zone: ZoneLabel,
    /// Lower end.
    pub a: f64,
    /// Upper end.
    pub b: f64,
    /// Lower end is a cut (square-root behavior).
    pub cut_a: bool,
    /// Upper end is a cut.
    pub cut_b: bool,
}

fn split_by_breaks(mut breaks: Vec<(f64, bool)>, lo: f64, hi: f64, classify_mid: impl Fn(f64) -> ZoneLabel) -> Vec<ZoneInterval> {
    breaks.retain(|(x, _)| *x > lo && *x < hi);
    breaks.push((lo, false));
    breaks.push((hi, false));
    breaks.sort_by(|a, b| a.0.total_cmp(&b.0));
    // merge coincident breakpoints, keeping the cut flag if any is a cut
    let mut merged: Vec<(f64, bool)> = Vec::new();
    for (x, c) in breaks {
        match merged.last_mut() {
            Some(last) if (x - last.0).abs() <= 1e-14 * x.abs().max(1.0) => last.1 |= c,
            _ => merged.push((x, c)),
        }
    }
    merged
        .windows(2)
        .filter_map(|w| {
            let (a, ca) = w[0];
            let (b, cb) = w[1];
            let z = classify_mid(0.5 * (a + b));
            z.is_bulk().then_some(ZoneInterval { zone: z, a, b, cut_a: ca, cut_b: cb })
        })
        .collect()
}

/// Bulk k-intervals (k > 0) of the line at |λ|, truncated at `k_max`.
pub fn k_intervals(p: &MediumParams, lambda: f64, k_max: f64) -> Result<Vec<ZoneInterval>> {
    let la = lambda.abs();
    let c = cut_functions(p, la)?;
    let mut breaks = vec![(c.k0, true)];
    if let Some(kd) = c.k_d {
        breaks.push((kd, true));
    }
    if let Some(ki) = c.k_i {
        breaks.push((ki, true));
    }
    Ok(split_by_breaks(breaks, 0.0, k_max, |k| classify_bulk(p, k, la)))
}

/// Bulk λ-intervals (0 < λ < λ_max) at fixed |k|, with optional extra breakpoints.
pub fn lambda_intervals(p: &MediumParams, k: f64, lambda_max: f64, extra: &[f64]) -> Vec<ZoneInterval> {
    let ka = k.abs();
    let ic = inverse_cuts(p, ka);
    let mut breaks = vec![(ic.lambda0, true), (ic.lambda_d, true), (ic.lambda_i, true), (p.omega_e, true), (p.omega_m, true)];
    breaks.extend(extra.iter().map(|&x| (x, false)));
    let mut out = split_by_breaks(breaks, 0.0, lambda_max, |l| classify_bulk(p, ka, l));
    if let Some(first) = out.first_mut() {
        if first.a == 0.0 {
            first.cut_a = true;
        }
    }
    out
}

/// Horizontal section of `zone` at λ.
pub fn section(p: &MediumParams, zone: ZoneLabel, lambda: f64) -> Result<Section> {
    let la = lambda.abs();
    if la == 0.0 || la == p.omega_m {
        return domain(format!("λ = {lambda} is excluded from sections"));
    }
    let mut intervals = Vec::new();
    let mut points = Vec::new();
    match zone {
        ZoneLabel::EE => {
            if p.is_critical() {
                if la == p.omega_p() {
                    intervals.push((f64::NEG_INFINITY, -p.k_c()));
                    intervals.push((p.k_c(), f64::INFINITY));
                }
            } else if in_plasmon_band(p, la) {
                let k = k_e(p, la)?;
                points = vec![-k, k];
            }
        }
        ZoneLabel::Outside | ZoneLabel::Boundary => {
            return domain("sections are defined for the bulk zones and EE only");
        }
        _ => {
            let pos: Vec<(f64, f64)> = k_intervals(p, la, f64::INFINITY)?.into_iter().filter(|iv| iv.zone == zone).map(|iv| (iv.a, iv.b)).collect();
            for &(a, b) in pos.iter().rev() {
                if a > 0.0 {
                    intervals.push((-b, -a));
                }
            }
            for &(a, b) in &pos {
                if a == 0.0 {
                    intervals.push((-b, b));
                } else {
                    intervals.push((a, b));
                }
            }
        }
    }
    Ok(Section { zone, lambda, intervals, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nc() -> MediumParams {
        MediumParams::non_critical()
    }

    #[test]
    fn classify_examples() {
        let p = nc();
        assert_eq!(classify(&p, 0.0, 2.0), ZoneLabel::DD);
        assert_eq!(classify(&p, 0.4, 0.5), ZoneLabel::DI);
        assert_eq!(classify(&p, 1.0, 0.5), ZoneLabel::EI);
        assert_eq!(classify(&p, 0.5, 1.2), ZoneLabel::DE);
        assert_eq!(classify(&p, 0.5, 0.5), ZoneLabel::Boundary);
        let c = MediumParams::critical(1.0);
        assert_eq!(classify(&c, 2.0, 1.0 / 2f64.sqrt()), ZoneLabel::EE);
        let k = k_e(&p, 0.75).unwrap();
        assert_eq!(classify(&p, k, 0.75), ZoneLabel::EE);
        assert_eq!(classify(&p, -k, -0.75), ZoneLabel::EE);
    }

    #[test]
    fn lambda_e_examples() {
        let p = nc();
        assert!((lambda_e(&p, p.k_c()).unwrap() - p.omega_c()).abs() < 1e-14);
        let big = 1e4;
        let d = lambda_e(&p, big).unwrap() - p.omega_p();
        assert!(d > 0.0 && d * big * big < 1.0);
        assert!(lambda_e(&p, 0.5).is_err());
        let c = MediumParams::critical(1.0);
        assert_eq!(lambda_e(&c, 3.0).unwrap(), 1.0 / 2f64.sqrt());
    }

    #[test]
    fn lambda_e_monotonicity_matches_sign_of_k() {
        let p = nc();
        let q = MediumParams::new(1.0, 1.0, 1.0, 1.5).unwrap();
        for i in 0..200 {
            let k = 0.82 + i as f64 * 0.05;
            assert!(lambda_e_prime(&p, k).unwrap() < 0.0);
            let kq = q.k_c() + 1e-3 + i as f64 * 0.05;
            assert!(lambda_e_prime(&q, kq).unwrap() > 0.0);
        }
    }

    #[test]
    fn lambda_e_derivatives_match_finite_differences() {
        let p = nc();
        for &k in &[0.9, 1.5, 3.0, 10.0] {
            let h = 1e-5 * k;
            let fd1 = (lambda_e(&p, k + h).unwrap() - lambda_e(&p, k - h).unwrap()) / (2.0 * h);
            let fd2 = (lambda_e_prime(&p, k + h).unwrap() - lambda_e_prime(&p, k - h).unwrap()) / (2.0 * h);
            let d1 = lambda_e_prime(&p, k).unwrap();
            let d2 = lambda_e_second(&p, k).unwrap();
            assert!((fd1 - d1).abs() < 1e-7 * d1.abs(), "k={k} fd1={fd1} d1={d1}");
            assert!((fd2 - d2).abs() < 1e-6 * d2.abs(), "k={k} fd2={fd2} d2={d2}");
        }
    }

    #[test]
    fn k_e_examples() {
        let p = nc();
        let k = k_e(&p, p.omega_c() - 1e-8).unwrap();
        assert!((k - p.k_c()).abs() < 1e-3);
        let d = 1e-4;
        let k = k_e(&p, p.omega_p() + d).unwrap();
        assert!((k * d.sqrt() / 0.297_302 - 1.0).abs() < 1e-3);
        let j = jacobian_e(&p, p.omega_p() + d).unwrap();
        assert!((j * d.powf(1.5) / 0.148_651 - 1.0).abs() < 1e-3);
        assert!(matches!(k_e(&MediumParams::critical(1.0), 0.7), Err(DrudeError::Unsupported(_))));
        assert!(matches!(k_e(&p, 0.9), Err(DrudeError::Domain(_))));
    }

    #[test]
    fn k_e_matches_closed_form_inverse() {
        // k² = K(a² − 1/4)/(2a), a = λ²/Ω_m² − 1/2: independent inverse of the curve.
        let p = nc();
        let (lo, hi) = plasmon_band(&p);
        for i in 1..100 {
            let l = lo + (hi - lo) * i as f64 / 100.0;
            let a = (l - p.omega_p()) * (l + p.omega_p()) / (p.omega_m * p.omega_m);
            let k = (p.big_k() * (a * a - 0.25) / (2.0 * a)).sqrt();
            let ke = k_e(&p, l).unwrap();
            assert!((ke - k).abs() < 1e-10 * k, "l={l} ke={ke} k={k}");
            assert!((lambda_e(&p, ke).unwrap() - l).abs() < 1e-12);
        }
    }

    #[test]
    fn section_examples() {
        let p = nc();
        let s = section(&p, ZoneLabel::DD, 2.0).unwrap();
        assert_eq!(s.intervals.len(), 1);
        assert!((s.intervals[0].1 - 1.224_745).abs() < 1e-6);
        assert!((s.intervals[0].0 + s.intervals[0].1).abs() < 1e-15);
        let s = section(&p, ZoneLabel::DE, 2.0).unwrap();
        assert_eq!(s.intervals.len(), 2);
        assert!(section(&p, ZoneLabel::EE, 0.9).unwrap().points.is_empty());
        let s = section(&p, ZoneLabel::EE, 0.75).unwrap();
        assert_eq!(s.points.len(), 2);
        assert!((lambda_e(&p, s.points[1]).unwrap() - 0.75).abs() < 1e-12);
        let s = section(&p, ZoneLabel::EI, 0.5).unwrap();
        assert_eq!(s.intervals, vec![(-s.intervals[1].1, -0.5), (0.5, s.intervals[1].1)]);
        assert!(section(&p, ZoneLabel::DD, 1.0).is_err());
        assert!(section(&p, ZoneLabel::DD, 0.0).is_err());
    }

    #[test]
    fn asymptotic_constants_reference_values() {
        let c = asymptotic_constants(&nc());
        assert!((c.k_e - 0.297_302).abs() < 1e-6);
        assert!((c.j_e - 0.148_651).abs() < 1e-6);
        assert!((c.theta - c.k_e).abs() == 0.0);
        assert!((c.amplitude / 0.258_819 - 1.0).abs() < 1e-2);
        assert!(omega_p_asymptotics(&nc(), 0.70).is_err());
        assert!(omega_p_asymptotics(&nc(), 0.71).is_ok());
    }

    #[test]
    fn lambda_intervals_cover_expected_zones() {
        let p = nc();
        let iv = lambda_intervals(&p, 0.4, 5.0, &[]);
        let zones: Vec<ZoneLabel> = iv.iter().map(|z| z.zone).collect();
        assert_eq!(zones, vec![ZoneLabel::EI, ZoneLabel::DI, ZoneLabel::DE, ZoneLabel::DE, ZoneLabel::DE, ZoneLabel::DD]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn classify_agrees_with_sections(k in -4.0f64..4.0, l in -3.0f64..3.0) {
            let p = nc();
            prop_assume!(l.abs() > 1e-9 && (l.abs() - 1.0).abs() > 1e-9);
            let z = classify(&p, k, l);
            for zone in [ZoneLabel::DD, ZoneLabel::DI, ZoneLabel::EI, ZoneLabel::DE] {
                let s = section(&p, zone, l).unwrap();
                let inside = s.intervals.iter().any(|&(a, b)| k > a && k < b);
                prop_assert_eq!(inside, z == zone, "zone {:?} k={} l={}", zone, k, l);
            }
        }

        #[test]
        fn classify_is_even(k in -4.0f64..4.0, l in -3.0f64..3.0) {
            let p = nc();
            let z = classify(&p, k, l);
            prop_assert_eq!(z, classify(&p, -k, l));
            prop_assert_eq!(z, classify(&p, k, -l));
        }
    }
}
