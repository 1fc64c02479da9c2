//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! The criteria run under a shared lock so the per-criterion runtime budgets
//! are measured without cross-test contention. Run with
//! `cargo test --test acceptance -- --nocapture` to see the summary lines.

use hall_steady::checks::{check_curl_of_grad, check_div_of_curl, check_hall_matrix};
use hall_steady::config::{ForcingMode, SolverConfig};
use hall_steady::driver::*;
use hall_steady::elliptic::*;
use hall_steady::grid::*;
use hall_steady::mms::{convergence_study, ManufacturedSolution};
use std::sync::Mutex;
use std::time::{Duration, Instant};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn budget(name: &str, elapsed: Duration, cap: Duration) {
    assert!(
        elapsed <= cap,
        "{name}: runtime {elapsed:?} exceeded the stated budget {cap:?}"
    );
}

fn mms_config(n: usize, amplitude: f64) -> SolverConfig {
    let mut cfg = SolverConfig {
        n,
        ..SolverConfig::default()
    };
    cfg.forcing.amplitude = amplitude;
    cfg
}

/// Shared decomposition assertion used by criteria 4, 6, and 7.
fn assert_decomposition(
    tag: &str,
    state: &HallState,
    f: &FaceField,
    g: &FaceField,
    cfg: &SolverConfig,
    ds: &DirectSolver,
) {
    let dec = decomposition_check(state, f, g, cfg, ds).unwrap();
    let bound_pw = 10.0 * cfg.outer_tol + 5.0 * dec.truncation_estimate;
    assert!(
        dec.residual_operator <= 10.0 * cfg.outer_tol,
        "{tag}: operator-route decomposition residual {} > {}",
        dec.residual_operator,
        10.0 * cfg.outer_tol
    );
    assert!(
        dec.residual_pointwise <= bound_pw,
        "{tag}: pointwise decomposition residual {} > {bound_pw}",
        dec.residual_pointwise
    );
}

#[test]
fn criterion_1_mimetic_identities() {
    let _g = serial();
    let t0 = Instant::now();
    let mut worst_dc = 0.0_f64;
    let mut worst_cg = 0.0_f64;
    for n in [16usize, 32] {
        let grid = Grid::new(n).unwrap();
        let dc = check_div_of_curl(&grid, 2024, 100, curl_e2f);
        let cg = check_curl_of_grad(&grid, 2025, 100, grad);
        assert!(
            dc.passed(),
            "n={n}: div(curl) defect {} > {}",
            dc.defect,
            dc.bound
        );
        assert!(
            cg.passed(),
            "n={n}: curl(grad) defect {} > {}",
            cg.defect,
            cg.bound
        );
        worst_dc = worst_dc.max(dc.defect / dc.bound);
        worst_cg = worst_cg.max(cg.defect / cg.bound);
    }
    let elapsed = t0.elapsed();
    budget("criterion 1", elapsed, Duration::from_secs(10));
    println!(
        "ACCEPTANCE 1 (mimetic identities): PASS — worst div(curl) {worst_dc:.2e} and curl(grad) {worst_cg:.2e} of bound, {elapsed:.2?}"
    );
}

#[test]
fn criterion_2_hall_matrix_algebra() {
    let _g = serial();
    let t0 = Instant::now();
    let checks = check_hall_matrix(99, 10_000);
    // Spec tolerances: 1e-14 relative for the identities, entry bound exact.
    for c in &checks {
        let bound = c.bound.max(1e-14);
        assert!(
            c.defect <= bound,
            "{}: defect {} > {}",
            c.name,
            c.defect,
            bound
        );
    }
    let elapsed = t0.elapsed();
    budget("criterion 2", elapsed, Duration::from_secs(1));
    println!(
        "ACCEPTANCE 2 (Hall-matrix algebra): PASS — 10^4 random pairs within 1e-14, {elapsed:.2?}"
    );
}

#[test]
fn criterion_3_maxwell_energy_inequality() {
    let _g = serial();
    let t0 = Instant::now();
    let grid = Grid::new(32).unwrap();
    let ds = DirectSolver::new(&grid);
    let spec = KrylovSpec::bicgstab(1e-10, 2000);
    let mut worst = 0.0_f64;
    for pair in 0..20 {
        let h = random_edge_field(&grid, 3000 + pair, true);
        let g = random_face_field(&grid, 4000 + pair, true);
        let mx = hall_steady::linsys::solve_maxwell_type(&h, &g, 1.0, &spec, &ds).unwrap();
        assert!(
            mx.energy_ratio <= 1.0 + 1e-6,
            "pair {pair}: ||curl B|| / ||G|| = {} > 1 + 1e-6",
            mx.energy_ratio
        );
        worst = worst.max(mx.energy_ratio);
    }
    let elapsed = t0.elapsed();
    budget("criterion 3", elapsed, Duration::from_secs(120));
    println!(
        "ACCEPTANCE 3 (Maxwell energy inequality): PASS — 20 random pairs at n=32, worst ratio {worst:.9}, {elapsed:.2?}"
    );
}

#[test]
fn criterion_4_mms_convergence() {
    let _g = serial();
    let t0 = Instant::now();

    // Analytic forcing: fitted orders >= 1.9 for u and B across 16/32/64,
    // with the decomposition consistency check on every converged run.
    let levels = [16usize, 32, 64];
    let mut errs_u = Vec::new();
    let mut errs_b = Vec::new();
    for &n in &levels {
        let cfg = mms_config(n, 1e-2);
        let grid = Grid::new(n).unwrap();
        let ds = DirectSolver::new(&grid);
        let sol = ManufacturedSolution::from_config(&cfg).unwrap();
        let (f, g) = sol
            .forcing(&grid, cfg.mu, ForcingMode::Analytic, &ds)
            .unwrap();
        let (state, report) = solve_hall_mhd(&f, &g, &cfg, None, &ds).unwrap();
        assert!(report.converged, "analytic run at n={n} did not converge");
        let mut du = state.u.clone();
        du.axpy(-1.0, &sol.sample_u(&grid));
        let mut db = state.b.clone();
        db.axpy(-1.0, &sol.sample_b(&grid));
        errs_u.push(norm(&du, NormKind::L2, 2.0));
        errs_b.push(norm(&db, NormKind::L2, 2.0));
        assert_decomposition(&format!("analytic n={n}"), &state, &f, &g, &cfg, &ds);
    }
    let fit = |errs: &[f64]| -> f64 {
        let xs: Vec<f64> = levels.iter().map(|n| (1.0 / *n as f64).ln()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let n = xs.len() as f64;
        let (sx, sy): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    };
    let order_u = fit(&errs_u);
    let order_b = fit(&errs_b);
    assert!(order_u >= 1.9, "fitted u order {order_u} ({errs_u:?})");
    assert!(order_b >= 1.9, "fitted B order {order_b} ({errs_b:?})");

    // Discrete forcing: level-independent errors at solver tolerance.
    let mut dcfg = mms_config(16, 1e-2);
    dcfg.forcing.mode = ForcingMode::Discrete;
    let sol = ManufacturedSolution::from_config(&dcfg).unwrap();
    let table = convergence_study(&[16, 32, 64], &sol, &dcfg).unwrap();
    for row in &table.rows {
        let err = row.err_u_l2 + row.err_b_l2;
        assert!(
            err <= 10.0 * dcfg.outer_tol,
            "discrete-forcing error at n={} is {err}, above 10*tol",
            row.n
        );
    }
    let elapsed = t0.elapsed();
    budget("criterion 4", elapsed, Duration::from_secs(600));
    println!(
        "ACCEPTANCE 4 (MMS convergence): PASS — analytic orders u {order_u:.3} / B {order_b:.3}, discrete errors <= 10*tol at all levels, {elapsed:.2?}"
    );
}

#[test]
fn criterion_5_zero_data_uniqueness() {
    let _g = serial();
    let t0 = Instant::now();
    let grid = Grid::new(16).unwrap();
    let ds = DirectSolver::new(&grid);
    let cfg = mms_config(16, 0.0);
    let zero = FaceField::zeros(&grid);
    for start in 0..5 {
        let mut init = HallState::zeros(&grid);
        init.u = random_face_field(&grid, 7000 + start, true);
        init.b = random_edge_field(&grid, 7100 + start, true);
        init.project_admissible(&ds);
        let (state, report) = solve_hall_mhd(&zero, &zero, &cfg, Some(&init), &ds).unwrap();
        assert!(report.converged, "start {start} did not converge");
        assert!(
            state.h1_norm() <= cfg.outer_tol,
            "start {start}: nonzero state {:.3e}",
            state.h1_norm()
        );
    }
    let elapsed = t0.elapsed();
    budget("criterion 5", elapsed, Duration::from_secs(60));
    println!(
        "ACCEPTANCE 5 (zero-data uniqueness): PASS — 5 random admissible starts end at the zero state, {elapsed:.2?}"
    );
}

#[test]
fn criterion_6_discrete_uniqueness_and_contraction() {
    let _g = serial();
    let t0 = Instant::now();
    let n = 16usize;
    let grid = Grid::new(n).unwrap();
    let ds = DirectSolver::new(&grid);

    // Two solves from independent starts at amplitude 1e-2.
    let cfg = mms_config(n, 1e-2);
    let sol = ManufacturedSolution::from_config(&cfg).unwrap();
    let (f, g) = sol
        .forcing(&grid, cfg.mu, ForcingMode::Analytic, &ds)
        .unwrap();
    let (s1, r1) = solve_hall_mhd(&f, &g, &cfg, None, &ds).unwrap();
    assert!(r1.converged);
    let mut init = HallState::zeros(&grid);
    init.u = random_face_field(&grid, 8000, true);
    init.b = random_edge_field(&grid, 8001, true);
    init.project_admissible(&ds);
    init.u.scale(0.05);
    init.b.scale(0.05);
    let (s2, r2) = solve_hall_mhd(&f, &g, &cfg, Some(&init), &ds).unwrap();
    assert!(r2.converged);
    let agreement = s1.h1_distance(&s2);
    assert!(
        agreement <= 10.0 * cfg.outer_tol,
        "independent starts disagree: {agreement:.3e}"
    );
    assert_decomposition("uniqueness base", &s1, &f, &g, &cfg, &ds);

    // Contraction probe at the fixed point.
    let probe = contraction_probe(&s1, &f, &g, &cfg, 3, &ds).unwrap();
    assert!(probe.rho_hat < 1.0, "rho_hat = {} >= 1", probe.rho_hat);

    // Amplitude sweep with paired perturbation seeds: rho must increase.
    let sweep = contraction_sweep(
        &[1e-3, 1e-2, 1e-1],
        |a| {
            let cfg_a = mms_config(n, a);
            let sol_a = ManufacturedSolution::from_config(&cfg_a).unwrap();
            sol_a.forcing(&grid, cfg_a.mu, ForcingMode::Analytic, &ds)
        },
        &cfg,
        3,
        &ds,
    )
    .unwrap();
    for pair in sweep.windows(2) {
        assert!(
            pair[1].1 > pair[0].1,
            "rho_hat not monotone: {:?}",
            sweep.iter().map(|s| (s.0, s.1)).collect::<Vec<_>>()
        );
    }
    let elapsed = t0.elapsed();
    budget("criterion 6", elapsed, Duration::from_secs(600));
    let rhos: Vec<f64> = sweep.iter().map(|s| s.1).collect();
    println!(
        "ACCEPTANCE 6 (discrete uniqueness): PASS — agreement {agreement:.2e} <= 10*tol, rho_hat {:.3e} < 1, sweep {rhos:?} monotone, {elapsed:.2?}",
        probe.rho_hat
    );
}

#[test]
fn criterion_7_decomposition_consistency() {
    let _g = serial();
    let t0 = Instant::now();
    let n = 16usize;
    let grid = Grid::new(n).unwrap();
    let ds = DirectSolver::new(&grid);
    let cfg = mms_config(n, 1e-2);
    let sol = ManufacturedSolution::from_config(&cfg).unwrap();
    let (f, g) = sol
        .forcing(&grid, cfg.mu, ForcingMode::Analytic, &ds)
        .unwrap();
    let (state, report) = solve_hall_mhd(&f, &g, &cfg, None, &ds).unwrap();
    assert!(report.converged);
    assert_decomposition("criterion 7", &state, &f, &g, &cfg, &ds);

    // The phi of the decomposition agrees (up to the shared zero-mean
    // convention) with the phi of a Maxwell-type solve at the fixed point.
    let dec = decomposition_check(&state, &f, &g, &cfg, &ds).unwrap();
    let mut g_total = g.clone();
    g_total.enforce_no_slip();
    g_total.axpy(1.0, &hall_steady::linsys::emf_source(&state.u, &state.b));
    let spec = KrylovSpec::bicgstab(cfg.inner_rtol, cfg.max_inner);
    let mx =
        hall_steady::linsys::solve_maxwell_type(&state.b, &g_total, cfg.mu, &spec, &ds).unwrap();
    let mut dphi = dec.phi.clone();
    dphi.axpy(-1.0, &mx.phi);
    dphi.remove_mean();
    let rel = norm(&dphi, NormKind::L2, 2.0) / norm(&mx.phi, NormKind::L2, 2.0).max(1e-300);
    assert!(rel <= 1e-6, "phi mismatch between routes: {rel:.3e}");
    let elapsed = t0.elapsed();
    budget("criterion 7", elapsed, Duration::from_secs(120));
    println!(
        "ACCEPTANCE 7 (decomposition consistency): PASS — operator residual {:.2e}, pointwise residual {:.2e} vs truncation estimate {:.2e}, phi agreement {rel:.2e}, {elapsed:.2?}",
        dec.residual_operator, dec.residual_pointwise, dec.truncation_estimate
    );
}

#[test]
fn criterion_8_energy_estimate_structure() {
    let _g = serial();
    let t0 = Instant::now();
    let mut ratios = Vec::new();
    for n in [16usize, 32] {
        let cfg = mms_config(n, 1e-2);
        let grid = Grid::new(n).unwrap();
        let ds = DirectSolver::new(&grid);
        let sol = ManufacturedSolution::from_config(&cfg).unwrap();
        let (f, g) = sol
            .forcing(&grid, cfg.mu, ForcingMode::Analytic, &ds)
            .unwrap();
        let (state, report) = solve_hall_mhd(&f, &g, &cfg, None, &ds).unwrap();
        assert!(report.converged);
        let lhs = state.h1_norm();
        let rhs = norm(&f, NormKind::L2, 2.0) + norm(&g, NormKind::Lq, cfg.q);
        let c_hat = energy_constant(&ds);
        assert!(
            lhs <= c_hat * rhs * (1.0 + 1e-6),
            "n={n}: ||u||+||B|| = {lhs} exceeds C_hat * forcing = {}",
            c_hat * rhs
        );
        ratios.push(lhs / rhs);
    }
    let drift = (ratios[1] / ratios[0] - 1.0).abs();
    assert!(
        drift <= 0.2,
        "energy ratio drift {drift} > 20% ({ratios:?})"
    );
    let elapsed = t0.elapsed();
    budget("criterion 8", elapsed, Duration::from_secs(300));
    println!(
        "ACCEPTANCE 8 (energy estimate): PASS — ratios {ratios:?} within the estimated constant, drift {:.1}%, {elapsed:.2?}",
        drift * 100.0
    );
}

#[test]
fn criterion_9_determinism() {
    let _g = serial();
    let t0 = Instant::now();
    let base = std::env::temp_dir().join(format!("hall-steady-det-{}", std::process::id()));
    let cfg_path = base.join("run.cfg");
    std::fs::create_dir_all(&base).unwrap();
    std::fs::write(&cfg_path, "n = 16\nforcing.amplitude = 1e-2\nseed = 11\n").unwrap();
    let run = |out: &std::path::Path| {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_hall-steady"))
            .args(["solve", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    };
    let out1 = base.join("run1");
    let out2 = base.join("run2");
    run(&out1);
    run(&out2);
    for name in ["u.dump", "p.dump", "b.dump", "iterations.csv", "report.txt"] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between serial re-runs");
    }
    std::fs::remove_dir_all(&base).ok();
    let elapsed = t0.elapsed();
    budget("criterion 9", elapsed, Duration::from_secs(300));
    println!("ACCEPTANCE 9 (determinism): PASS — serial re-runs produce bitwise-identical dumps, {elapsed:.2?}");
}
