//! Acceptance criteria, one line each. Every tolerance is pinned below.
//!
//! Run all with `cargo test -p drude-spectral --test acceptance`; pass numbers
//! (e.g. `-- 7 9`) to run a subset.

use drude_spectral::density::{hoelder_probe, measure_reconstruction, threshold_probe, SeparableProbe, XProfile, YProfile};
use drude_spectral::fdtd_oracle::{reflection_free_half_width, run_checked, OracleRun, OracleSource, Sponge, YeeConfig, YeeState};
use drude_spectral::fields::{make_source, norm_h, norm_weighted, Component, FieldState, Grid2, SourceKind, WeightParams, WeightSign};
use drude_spectral::medium::{theta_branch, Side};
use drude_spectral::modes::{mode_sample, normalization, wronskian, ModeIndex};
use drude_spectral::quadrature::{linear_fit, loglog_slope, QuadConfig};
use drude_spectral::resolvent_evolution::{
    beat_diagnostic, eigenprojection_field, evolve_spectral, growth_rate, helmholtz_residual, limit_absorption, EvolutionRequest, LimitSide, Observation,
    Resolvent,
};
use drude_spectral::spectral_geometry::{asymptotic_constants, classify, jacobian_e, k_e, lambda_e, plasmon_band, ZoneLabel};
use drude_spectral::transform::{forward, synthesize, Identity, MeshSpec, SpectralMesh};
use drude_spectral::{density::apply_density, fields::apply_hamiltonian_fd, fields::mask_fd_invalid, MediumParams};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::time::Instant;

// criterion 1
const SLOPE_TOL: f64 = 0.02;
const PREFACTOR_REL: f64 = 0.01;
const AMPLITUDE_LITERAL: f64 = 0.258_819;
// criterion 2
const DISPERSION_RESIDUAL: f64 = 1e-10;
const ROUND_TRIP: f64 = 1e-12;
// criterion 3
const MODE_ORDER_MIN: f64 = 1.9;
const MODE_COUNT: usize = 20;
const TRANSMISSION_ROUND_OFF: f64 = 1e-12;
// criterion 4
const PARSEVAL_DEFECT: f64 = 1e-2;
const RECONSTRUCTION: f64 = 3e-2;
// criterion 5
const DENSITY_FLOOR: f64 = -1e-8;
const BAND_AGREEMENT: f64 = 3e-2;
// criterion 6
const GAMMA_GENERIC_MIN: f64 = 0.9;
const GAMMA_CRITICAL: (f64, f64) = (0.35, 0.6);
// criterion 7
const HELMHOLTZ_MAX: f64 = 5e-2;
const SIDE_DIFFERENCE: f64 = 1e-2;
// criterion 8
const GAP_FACTOR: f64 = 2.0;
// criterion 9
const RESONANCE_REL: f64 = 0.05;
const SLOPE_AGREEMENT: f64 = 0.10;
// criterion 10
const PEAK_FLOOR: f64 = 0.1;
// criterion 11
const ORACLE_DISCREPANCY: f64 = 0.05;
const DIV_SCALE: f64 = 1e-10;
const ORDER_TOL: f64 = 0.2;
// criterion 12
const THRESHOLD_SLOPE_TOL: f64 = 0.15;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn gaussian(grid: Grid2, center: (f64, f64), width: f64) -> FieldState {
    make_source(SourceKind::GaussianE, center, width, 1.0, grid).expect("source")
}

fn rel(p: &MediumParams, a: &FieldState, b: &FieldState, s: Option<WeightParams>) -> f64 {
    let d = a.sub(b).expect("same grid");
    match s {
        Some(w) => norm_weighted(p, &d, w, WeightSign::Minus).unwrap() / norm_weighted(p, b, w, WeightSign::Minus).unwrap(),
        None => norm_h(p, &d).unwrap() / norm_h(p, b).unwrap(),
    }
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Slope and prefactor of y ≈ c·d^slope.
fn power_fit(d: &[f64], y: &[f64]) -> (f64, f64) {
    let (lx, ly): (Vec<f64>, Vec<f64>) = d.iter().zip(y).map(|(a, b)| (a.ln(), b.ln())).unzip();
    let (slope, icpt) = linear_fit(&lx, &ly);
    (slope, icpt.exp())
}

fn c1_dispersion_asymptotics() -> Outcome {
    let p = MediumParams::non_critical();
    let c = asymptotic_constants(&p);
    let ds = logspace(1e-6, 1e-2, 21);
    let (mut ke, mut je, mut th, mut am) = (vec![], vec![], vec![], vec![]);
    for &d in &ds {
        let l = p.omega_p() + d;
        let k = k_e(&p, l).unwrap();
        ke.push(k);
        je.push(jacobian_e(&p, l).unwrap());
        th.push(theta_branch(&p, k, l, ZoneLabel::EE, Side::Drude).unwrap().value.norm());
        am.push(normalization(&p, k, l, 0).unwrap());
    }
    // prefactors from the two smallest decades, where the leading term dominates
    let near = 11;
    let rows = [("k_E", &ke, -0.5, c.k_e), ("J_E", &je, -1.5, c.j_e), ("theta+", &th, -0.5, c.theta), ("A", &am, 0.25, c.amplitude)];
    let mut pass = true;
    let mut parts = vec![];
    for (name, v, want, pref) in rows {
        let (slope, _) = power_fit(&ds, v);
        let (_, c_fit) = power_fit(&ds[..near], &v[..near]);
        let ok = (slope - want).abs() <= SLOPE_TOL && (c_fit / pref - 1.0).abs() <= PREFACTOR_REL;
        pass &= ok;
        parts.push(format!("{name} slope {slope:+.4} (want {want:+}) c {c_fit:.6} (formula {pref:.6})"));
    }
    let lit = (c.amplitude / AMPLITUDE_LITERAL - 1.0).abs() <= PREFACTOR_REL;
    pass &= lit;
    parts.push(format!("A literal {AMPLITUDE_LITERAL} within 1%: {lit}"));
    outcome(pass, parts.join("; "))
}

fn c2_dispersion_residual() -> Outcome {
    let p = MediumParams::non_critical();
    let (a, b) = plasmon_band(&p);
    let (mut w_max, mut rt_max) = (0.0f64, 0.0f64);
    for i in 1..400 {
        let l = a + (b - a) * i as f64 / 400.0;
        let k = k_e(&p, l).unwrap();
        w_max = w_max.max(wronskian(&p, k, l, ZoneLabel::EE).unwrap().norm());
        rt_max = rt_max.max((lambda_e(&p, k).unwrap() - l).abs());
    }
    outcome(
        w_max < DISPERSION_RESIDUAL && rt_max < ROUND_TRIP,
        format!("max |W(k_E(λ), λ)| = {w_max:.2e}, max |λ_E(k_E(λ)) − λ| = {rt_max:.2e} on 399 band points"),
    )
}

fn mode_field(p: &MediumParams, idx: ModeIndex, grid: Grid2) -> FieldState {
    let mut u = FieldState::zeros(grid);
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let s = mode_sample(p, idx, grid.x(i), grid.y(j)).unwrap();
            for c in 0..6 {
                u.comps[c][grid.idx(i, j)] = s.full[c];
            }
        }
    }
    u
}

fn fd_residual(p: &MediumParams, idx: ModeIndex, h: f64) -> f64 {
    let grid = Grid2::square(1.0, h).unwrap();
    let u = mode_field(p, idx, grid);
    let mut r = apply_hamiltonian_fd(p, &u);
    r.axpy(C64::new(-idx.lambda, 0.0), &u).unwrap();
    mask_fd_invalid(&mut r);
    r.max_abs() / u.max_abs()
}

fn c3_modes() -> Outcome {
    let p = MediumParams::non_critical();
    let mut modes = vec![];
    for &(k, l) in &[(0.3, 0.4), (0.5, 1.2), (1.0, 1.6), (0.2, 2.2), (1.5, 2.5), (-0.7, 1.3), (0.4, -1.8), (2.0, 0.9), (0.6, 0.3), (-1.2, -2.4), (0.1, 1.05)] {
        let zone = classify(&p, k, l);
        if zone == ZoneLabel::Boundary {
            continue;
        }
        for &j in zone.modes() {
            if j != 0 {
                modes.push(ModeIndex::new(&p, k, l, j).unwrap());
            }
        }
    }
    for &k in &[1.0, 1.5, -1.8, 2.2] {
        modes.push(ModeIndex::plasmon(&p, k, true).unwrap());
        modes.push(ModeIndex::plasmon(&p, k, false).unwrap());
    }
    modes.truncate(MODE_COUNT);
    let n = modes.len();
    let mut worst_order = f64::INFINITY;
    let mut worst_jump: f64 = 0.0;
    for idx in &modes {
        let (r1, r2) = (fd_residual(&p, *idx, 0.04), fd_residual(&p, *idx, 0.02));
        worst_order = worst_order.min((r1 / r2).log2());
        let left = mode_sample(&p, *idx, -f64::MIN_POSITIVE, 0.3).unwrap().full;
        let right = mode_sample(&p, *idx, 0.0, 0.3).unwrap().full;
        let scale = left[0].norm().max(left[2].norm()).max(1.0);
        worst_jump = worst_jump.max((left[0] - right[0]).norm() / scale).max((left[2] - right[2]).norm() / scale);
    }
    outcome(
        n == MODE_COUNT && worst_order >= MODE_ORDER_MIN && worst_jump <= TRANSMISSION_ROUND_OFF,
        format!("{n} modes, min FD residual order (h 0.04 → 0.02) {worst_order:.3}, max E/H_y jump at x=0 {worst_jump:.1e}"),
    )
}

fn parseval_pair(qc: &QuadConfig, h: f64) -> (f64, f64, usize) {
    let p = MediumParams::non_critical();
    let g = Grid2::square(6.0, h).unwrap();
    let u = gaussian(g, (0.4, -0.3), 0.7);
    let mesh = SpectralMesh::build(&p, qc, MeshSpec::for_grid(&g, 0.0, 0.7)).unwrap();
    let amp = forward(&u, &mesh).unwrap();
    let n0 = norm_h(&p, &u).unwrap().powi(2);
    let defect = (amp.norm_sq(&mesh) - n0).abs() / n0;
    let back = synthesize(&amp, &mesh, &Identity { plasmon: true }, g, qc.skip_rel * amp.max_abs()).unwrap().remove(0);
    (defect, rel(&p, &back, &u, None), mesh.node_count())
}

/// Doubling refines the whole discretization: the spatial grid that samples G
/// and the spectral mesh. At fixed h the defects sit on the grid-quadrature floor.
fn c4_diagonalization() -> Outcome {
    let qc = QuadConfig::default();
    let (d0, r0, n0) = parseval_pair(&qc, 0.1);
    let (d1, r1, n1) = parseval_pair(&qc.refined(), 0.05);
    outcome(
        d0 < PARSEVAL_DEFECT && r0 < RECONSTRUCTION && d1 < d0 && r1 < r0,
        format!("default mesh, h = 0.1 ({n0} nodes): Parseval defect {d0:.2e}, F*F error {r0:.2e}; doubled, h = 0.05 ({n1} nodes): {d1:.2e}, {r1:.2e}"),
    )
}

fn c5_spectral_measure() -> Outcome {
    let p = MediumParams::non_critical();
    let u = gaussian(Grid2::square(6.0, 0.1).unwrap(), (0.4, -0.3), 0.7);
    let qc = QuadConfig { nodes_per_interval: 32, ..QuadConfig::default() };
    let mut pass = true;
    let mut parts = vec![];
    for band in [(0.05, 0.7), (0.72, 0.99), (1.01, 3.0)] {
        let m = measure_reconstruction(&p, band, &u, 0.7, &qc).unwrap();
        pass &= m.rel_diff < BAND_AGREEMENT && m.min_density >= DENSITY_FLOOR;
        parts.push(format!("{band:?}: rel diff {:.1e}, min density {:.2e}", m.rel_diff, m.min_density));
    }
    outcome(pass, parts.join("; "))
}

fn c6_hoelder() -> Outcome {
    let p = MediumParams::non_critical();
    let u = gaussian(Grid2::square(6.0, 0.1).unwrap(), (0.4, -0.3), 0.7);
    let qc = QuadConfig::default();
    let deltas = [1e-2, 5e-3, 2e-3, 1e-3];
    let generic = hoelder_probe(&p, 1.2, &deltas, &u, WeightParams::new(2.0).unwrap(), &qc).unwrap();
    let into_band: Vec<f64> = deltas.iter().map(|d| -d).collect();
    let critical = hoelder_probe(&p, p.omega_c(), &into_band, &u, WeightParams::new(1.0).unwrap(), &qc).unwrap();
    outcome(
        generic.gamma >= GAMMA_GENERIC_MIN && (GAMMA_CRITICAL.0..=GAMMA_CRITICAL.1).contains(&critical.gamma),
        format!("γ̂(λ=1.2, s=2) = {:.3}; γ̂(Ω_c, s=1) = {:.3}", generic.gamma, critical.gamma),
    )
}

fn c7_limiting_absorption() -> Outcome {
    let p = MediumParams::non_critical();
    let omega = 1.2;
    let g = gaussian(Grid2::square(6.0, 0.1).unwrap(), (0.4, -0.3), 0.7);
    let obs = Observation { grid: g.grid, source_radius: 5.0, source_width: 0.7 };
    let qc = QuadConfig::default();
    let s = WeightParams::new(1.0).unwrap();
    let lap = limit_absorption(&p, omega, &g, &[LimitSide::Plus, LimitSide::Minus], &obs, &qc).unwrap();
    let etas = [1e-1, 1e-2, 1e-3, 1e-4];
    let zetas: Vec<C64> = etas.iter().map(|e| C64::new(omega, *e)).collect();
    let rs = lap.problem.apply(&Resolvent { zetas, points: true }, obs.grid).unwrap();
    let errs: Vec<f64> = rs.iter().map(|r| rel(&p, r, &lap.fields[0], Some(s))).collect();
    let rate = loglog_slope(&etas, &errs);
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let pac = lap.problem.apply(&Identity { plasmon: true }, obs.grid).unwrap().remove(0);
    let helm = helmholtz_residual(&p, &lap.fields[0], omega, &pac, s).unwrap();
    // the jump across the real axis, from the resolvent itself rather than from U_ω^±
    let eta = etas[etas.len() - 1];
    let pm = lap.problem.apply(&Resolvent { zetas: vec![C64::new(omega, eta), C64::new(omega, -eta)], points: true }, obs.grid).unwrap();
    let diff = pm[0].sub(&pm[1]).unwrap();
    let mut m = apply_density(&p, omega, &g, &qc).unwrap().field;
    m.scale(C64::new(0.0, 2.0 * PI));
    let side = rel(&p, &diff, &m, None);
    outcome(
        decreasing && rate > 0.0 && rate <= 1.0 && helm < HELMHOLTZ_MAX && side < SIDE_DIFFERENCE,
        format!(
            "ω = {omega}: errors {:?}, rate {rate:.3}; Helmholtz residual {helm:.2e}; ‖(R(ω+iη)−R(ω−iη))G−2πiM_ωG‖/‖2πiM_ωG‖ = {side:.2e} at η = {eta:e}",
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()
        ),
    )
}

fn evolution_qc() -> QuadConfig {
    QuadConfig { lambda_min_rel: 0.03, lambda_max: Some(8.0), allow_excluded: true, ..QuadConfig::default() }
}

fn c8_limiting_amplitude() -> Outcome {
    let p = MediumParams::non_critical();
    let g = gaussian(Grid2::square(3.5, 0.1).unwrap(), (0.4, -0.3), 0.7);
    let obs = Observation { grid: Grid2::square(8.0, 0.2).unwrap(), source_radius: 3.5, source_width: 0.7 };
    let req = EvolutionRequest { omega: 1.0, times: vec![50.0, 100.0, 200.0], s: 1.0, probes: vec![], probe_times: vec![], gap: true, keep_fields: false };
    let tr = evolve_spectral(&p, &g, &req, &obs, &evolution_qc()).unwrap();
    let factor = tr.gap[0] / tr.gap[2];
    outcome(factor >= GAP_FACTOR, format!("gap(50) = {:.4}, gap(100) = {:.4}, gap(200) = {:.4}, fall ×{factor:.2}", tr.gap[0], tr.gap[1], tr.gap[2]))
}

fn c9_resonance() -> Outcome {
    let p = MediumParams::critical(1.0);
    let om = p.omega_p();
    let g = gaussian(Grid2::square(3.5, 0.1).unwrap(), (0.0, 0.0), 0.7);
    let grid = Grid2::square(8.0, 0.2).unwrap();
    let obs = Observation { grid, source_radius: 3.5, source_width: 0.7 };
    let qc = QuadConfig { lambda_min_rel: 0.03, lambda_max: Some(8.0), ..QuadConfig::default() };
    let s = WeightParams::new(1.0).unwrap();
    let npg = norm_weighted(&p, &eigenprojection_field(&p, 1.0, &g, &obs, &qc).unwrap(), s, WeightSign::Minus).unwrap();
    let times: Vec<f64> = (1..=12).map(|k| 25.0 * k as f64).collect();
    let req = EvolutionRequest { omega: om, times: times.clone(), s: 1.0, probes: vec![], probe_times: vec![], gap: false, keep_fields: false };
    let spectral = evolve_spectral(&p, &g, &req, &obs, &qc).unwrap();
    let yee = YeeConfig { sponge: Some(Sponge { width: 8.0, strength: 2.0 }), ..YeeConfig::new(p, 30.0, 0.1) };
    let cfg =
        OracleRun { yee, source: OracleSource::gaussian((0.0, 0.0), 0.7, om), times, s: 1.0, grid, probes: vec![], probe_times: vec![], keep_fields: false };
    let fdtd = run_checked(&cfg).unwrap().trace;
    let last = spectral.times.len() - 1;
    let rs = spectral.norm_weighted[last] / spectral.times[last] / npg;
    let rf = fdtd.norm_weighted[last] / fdtd.times[last] / npg;
    let (ss, sf) = (growth_rate(&spectral, 100.0), growth_rate(&fdtd, 100.0));
    let agree = (sf / ss - 1.0).abs();
    outcome(
        (rs - 1.0).abs() < RESONANCE_REL && (rf - 1.0).abs() < RESONANCE_REL && agree < SLOPE_AGREEMENT,
        format!("‖P_Ω_p G‖ = {npg:.5}; at t=300 ‖U‖/(t‖PG‖): spectral {rs:.4}, FDTD {rf:.4}; slopes {ss:.5} vs {sf:.5} (differ {:.1}%)", 100.0 * agree),
    )
}

fn c10_beats() -> Outcome {
    let p = MediumParams::critical(1.0);
    let omega = 0.9;
    let g = gaussian(Grid2::square(3.5, 0.1).unwrap(), (0.0, 0.0), 0.7);
    let obs = Observation { grid: Grid2::square(4.0, 0.2).unwrap(), source_radius: 3.5, source_width: 0.7 };
    let qc = QuadConfig { lambda_min_rel: 0.03, lambda_max: Some(8.0), ..QuadConfig::default() };
    let (t0, t1, dt) = (50.0, 250.0, 1.0);
    let pt: Vec<f64> = (0..=((t1 - t0) / dt) as usize).map(|k| t0 + dt * k as f64).collect();
    let req = EvolutionRequest { omega, times: vec![t1], s: 1.0, probes: vec![(0.3, 0.0)], probe_times: pt.clone(), gap: false, keep_fields: false };
    let tr = evolve_spectral(&p, &g, &req, &obs, &qc).unwrap();
    let peaks = beat_diagnostic(&pt, &tr.probe_values[0], PEAK_FLOOR).unwrap();
    let bin = 2.0 * PI / (t1 - t0);
    let f: Vec<f64> = peaks.iter().map(|q| q.frequency).collect();
    let ok = f.len() == 2 && (f.iter().any(|x| (x - omega).abs() < bin)) && f.iter().any(|x| (x - p.omega_p()).abs() < bin);
    outcome(
        ok,
        format!("dominant peaks {:?} (bin {bin:.4}; expected {omega} and Ω_p = {:.5})", f.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>(), p.omega_p()),
    )
}

fn vacuum_probe(h: f64) -> C64 {
    let cfg = YeeConfig { vacuum: true, ..YeeConfig::new(MediumParams::non_critical(), 3.0, h) };
    let mut st = YeeState::new(cfg, Some(OracleSource::gaussian((0.3, 0.2), 0.5, 2.0)), Some(0.5 * h)).unwrap();
    for _ in 0..(2.0 / (0.5 * h)).round() as usize {
        st.step();
    }
    st.sample_e(0.0, 0.3)
}

fn c11_oracle() -> Outcome {
    let p = MediumParams::non_critical();
    let g = gaussian(Grid2::square(3.5, 0.1).unwrap(), (0.4, -0.3), 0.7);
    let grid = Grid2::square(8.0, 0.2).unwrap();
    let obs = Observation { grid, source_radius: 3.5, source_width: 0.7 };
    let times: Vec<f64> = (1..=12).map(|k| 5.0 * k as f64).collect();
    let req = EvolutionRequest { omega: 1.0, times: times.clone(), s: 1.0, probes: vec![], probe_times: vec![], gap: false, keep_fields: true };
    let spectral = evolve_spectral(&p, &g, &req, &obs, &evolution_qc()).unwrap();
    let l = reflection_free_half_width(p.light_speed(), 60.0, 3.5, 8.0 * 2f64.sqrt(), 2.0).ceil();
    let cfg = OracleRun {
        yee: YeeConfig::new(p, l, 0.05),
        source: OracleSource::gaussian((0.4, -0.3), 0.7, 1.0),
        times,
        s: 1.0,
        grid,
        probes: vec![],
        probe_times: vec![],
        keep_fields: true,
    };
    let out = run_checked(&cfg).unwrap();
    let s = WeightParams::new(1.0).unwrap();
    let worst = spectral.fields.iter().zip(&out.trace.fields).map(|(a, b)| rel(&p, b, a, Some(s))).fold(0.0, f64::max);
    let v: Vec<C64> = [0.1, 0.05, 0.025].iter().map(|&h| vacuum_probe(h)).collect();
    let reference = v[2] + (v[2] - v[1]) / 3.0;
    let order = ((v[0] - reference).norm() / (v[1] - reference).norm()).log2();
    outcome(
        worst < ORACLE_DISCREPANCY && out.div_h < DIV_SCALE && out.div_k < DIV_SCALE && (order - 2.0).abs() < ORDER_TOL,
        format!(
            "max relative H_-s discrepancy to T=60: {worst:.2e} (L = {l}, h = 0.05, {} steps); div_h H {:.1e}, div_h K {:.1e} (× max|·|/h); vacuum order {order:.3}",
            out.trace.work, out.div_h, out.div_k
        ),
    )
}

fn c12_threshold() -> Outcome {
    let p = MediumParams::non_critical();
    let probe = SeparableProbe { component: Component::Hy, x: XProfile::Cusp { alpha: 0.4, width: 0.7 }, y: YProfile::Exponential { rate: 1.0 } };
    let ls: Vec<f64> = logspace(1e-4, 1e-2, 9).iter().map(|d| p.omega_p() + d).collect();
    let f = threshold_probe(&p, &ls, &probe, WeightParams::new(1.0).unwrap()).unwrap();
    let ok = (f.slope_pairing - 1.0).abs() <= THRESHOLD_SLOPE_TOL
        && (f.slope_norm + 1.5).abs() <= THRESHOLD_SLOPE_TOL
        && (f.slope_energy - 0.5).abs() <= THRESHOLD_SLOPE_TOL;
    outcome(ok, format!("slopes: pairing {:+.3} (+1), J_E‖W‖² {:+.3} (−3/2), J_E|⟨U,W⟩|² {:+.3} (+1/2)", f.slope_pairing, f.slope_norm, f.slope_energy))
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 12] = [
    (1, "dispersion asymptotics", c1_dispersion_asymptotics),
    (2, "dispersion residual", c2_dispersion_residual),
    (3, "mode correctness", c3_modes),
    (4, "diagonalization", c4_diagonalization),
    (5, "spectral measure", c5_spectral_measure),
    (6, "Hoelder exponents", c6_hoelder),
    (7, "limiting absorption", c7_limiting_absorption),
    (8, "limiting amplitude", c8_limiting_amplitude),
    (9, "interface resonance", c9_resonance),
    (10, "beats", c10_beats),
    (11, "oracle equivalence", c11_oracle),
    (12, "threshold behavior", c12_threshold),
];

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, f) in CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        println!("criterion {n:>2} [{}] {name} ({:.1} s): {}", if o.pass { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64(), o.detail);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
