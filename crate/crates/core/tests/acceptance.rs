//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured margins (visible with `--nocapture`). Run with
//! `cargo test -p ahorizons --test acceptance`.

use ahorizons::boundary_mass::{collar_gauge, wang_mass, wang_mass_eta_route, CollarSamples};
use ahorizons::family::{compare_family, make_params, FamilyEvaluator};
use ahorizons::geometry::chart::{rho_of_tau, tau_of_rho};
use ahorizons::geometry::ops::scalar_curvature_radial;
use ahorizons::geometry::profile::{uniform_grid, RadialProfile};
use ahorizons::gluing::{
    build_spec, glued_grid, glued_profile, select_taus, verify_supercurvature, GluedProfile,
};
use ahorizons::horizon::{
    cmc_linearization, find_cmc_surface, harmonics, mean_curvature_graph, radial_cmc_root,
    strictly_nested, theta_coefficient, AmbientFactor, SphereGrid,
};
use ahorizons::solver::{
    defect, mollify, recover_mass_param, solve_bvp, MollifierSpec, SolveMethod,
};

fn family(m: f64) -> FamilyEvaluator {
    FamilyEvaluator::new(make_params(m).unwrap()).unwrap()
}

fn glued_at(m: f64, rho_max: f64, n: usize) -> (FamilyEvaluator, GluedProfile) {
    let ev = family(m);
    let (t1, t2) = select_taus(&ev).unwrap();
    let spec = build_spec(&ev, t1, t2).unwrap();
    let grid = glued_grid(&spec, rho_max, n);
    let gp = glued_profile(&ev, &spec, grid).unwrap();
    (ev, gp)
}

fn solve_for(m: f64, eps: f64, n: usize) -> (GluedProfile, RadialProfile, RadialProfile) {
    let (_, gp) = glued_at(m, 10.0, 4096);
    let tau2 = gp.spec().tau2;
    let grid = uniform_grid(0.0, tau2 + 8.0, n);
    let f = defect(&gp, &grid).unwrap();
    let f_eps = mollify(&f, &MollifierSpec::new(eps, tau2).unwrap()).unwrap();
    let psi = RadialProfile::new(
        grid.clone(),
        grid.iter().map(|&r| gp.value(r).unwrap()).collect(),
    )
    .unwrap();
    (gp, f_eps, psi)
}

#[test]
fn criterion_01_curvature_identity() {
    let mut worst = 0.0_f64;
    for m in [0.5, 1.0, 2.0] {
        let ev = family(m);
        let lo = ev.params().rho_m + 0.1;
        // Sample on a padded, denser grid so every requested node is
        // interior and the interpolant's second derivative stays well below
        // the curvature tolerance near the steep low end.
        let pad = 0.05;
        let profile = ev
            .sample_profile(uniform_grid(lo - pad, 10.0 + pad, 32768))
            .unwrap();
        for &rho in &uniform_grid(lo, 10.0, 4096) {
            let r = scalar_curvature_radial(&profile, rho).unwrap();
            worst = worst.max((r + 6.0).abs());
        }
    }
    assert!(worst < 1e-6, "max |R + 6| = {worst:.3e}");
    println!("criterion 01: PASS - |R+6| <= {worst:.3e} < 1e-6 on [rho(M)+0.1, 10], N=4096, M in {{0.5,1,2}}");
}

#[test]
fn criterion_02_neck_and_unit_mass_sphere() {
    let ev = family(1.0);
    let p = *ev.params();
    let radii = ev.horizon_radii().unwrap();

    // Closed form: H(a) = 0 and H(r = M) = 2.
    let h_neck = FamilyEvaluator::h_closed_form(&p, p.a);
    let h_at_m = FamilyEvaluator::h_closed_form(&p, p.m);
    assert!(h_neck.abs() < 1e-10, "H(neck) = {h_neck:e}");
    assert!((h_at_m - 2.0).abs() < 1e-10, "H(r=M) = {h_at_m}");
    // Level evaluator at the located radii.
    let h1 = ev.mean_curvature_level(radii.rho1).unwrap();
    let h2 = ev.mean_curvature_level(radii.rho2).unwrap();
    assert!(h1.abs() < 1e-10 && (h2 - 2.0).abs() < 1e-10);

    // Graph-surface evaluator to 1e-6.
    let sphere = SphereGrid::new(16, 32).unwrap();
    let tau_lo = tau_of_rho(ev.rho_min() + 0.02);
    let factor = AmbientFactor::from_family(sphere.clone(), &ev, tau_lo, 0.95, 2000).unwrap();
    let mut worst = 0.0_f64;
    for (rho, target) in [(radii.rho1, 0.0), (radii.rho2, 2.0)] {
        let v = vec![tau_of_rho(rho); sphere.len()];
        for h in mean_curvature_graph(&factor, &v).unwrap() {
            worst = worst.max((h - target).abs());
        }
    }
    assert!(worst < 1e-6, "graph evaluator deviation {worst:.3e}");
    println!(
        "criterion 02: PASS - H(neck)={h_neck:.2e}, H(r=M)-2={:.2e}, graph deviation {worst:.2e}",
        h_at_m - 2.0
    );
}

#[test]
fn criterion_03_root_and_limits() {
    // The cube-root clause pins "within 3% at M = 10", but the root there is
    // exact: a(10) = 2 (2 + 2^3 = 10), giving a / M^(1/3) = 2/2.15443 =
    // 0.9283 -- 7.2% below 1. The limit itself is right (at M = 1e6 the
    // ratio is within 1e-2, see the family unit tests); 3% at M = 10 is an
    // arithmetic slip and no implementation can meet it. Asserted as
    // required; the clause fails with the measured ratio.
    let a2 = make_params(2.0).unwrap().a;
    let p = make_params(1e-3).unwrap();
    let ratio_small = p.a / p.m;
    let p10 = make_params(10.0).unwrap();
    let ratio_large = p10.a / 10.0_f64.cbrt();

    let checks = [
        ("a(2) = 1 (1e-12)", (a2 - 1.0).abs() < 1e-12),
        (
            "a/M in [0.999, 1.001] at M = 1e-3",
            (0.999..=1.001).contains(&ratio_small),
        ),
        (
            "a/M^(1/3) within 3% at M = 10",
            (ratio_large - 1.0).abs() < 0.03,
        ),
    ];
    for (name, ok) in checks {
        println!(
            "criterion 03: {} - {name}",
            if ok { "pass" } else { "FAIL" }
        );
    }
    assert!((a2 - 1.0).abs() < 1e-12, "a(2) = {a2}");
    assert!(
        (0.999..=1.001).contains(&ratio_small),
        "a/M = {ratio_small}"
    );
    assert!(
        (ratio_large - 1.0).abs() < 0.03,
        "a(10)/10^(1/3) = {ratio_large:.6}: a(10) = 2 exactly, so the ratio is 0.9283 and the 3% target cannot hold"
    );
    println!("criterion 03: PASS");
}

#[test]
fn criterion_04_gluing() {
    let (ev, gp) = glued_at(1.0, 10.0, 4096);
    let spec = *gp.spec();
    let prof = gp.profile();

    // Constant on [0, tau1]; equal to the family factor on [tau2, L].
    for (&rho, &v) in prof.grid().iter().zip(prof.values()) {
        if rho < spec.tau1 {
            assert!((v - gp.cap_value()).abs() < 1e-12);
        } else if rho > spec.tau2 {
            assert!(
                (v - ev.phi(rho, 0).unwrap()).abs() < 1e-12,
                "psi != phi at {rho}"
            );
        }
    }

    let report = verify_supercurvature(&gp).unwrap();
    assert!(report.min_interior_margin > 0.0);
    assert!(report.max_outer_deviation < 1e-6);

    let g = prof.grid();
    let local = |tau: f64| {
        let i = g.iter().position(|&x| x == tau).unwrap();
        g[i + 1] - g[i]
    };
    let [m1, m2] = gp.junction_mismatch();
    assert!(m1 < 10.0 * local(spec.tau1), "tau1 C2 mismatch {m1:.3e}");
    assert!(m2 < 10.0 * local(spec.tau2), "tau2 C2 mismatch {m2:.3e}");
    println!(
        "criterion 04: PASS - R+6 in ({:.2e}, ..) inside, |R+6| <= {:.2e} outside, C2 mismatches ({:.2e}, {:.2e})",
        report.min_interior_margin, report.max_outer_deviation, m1, m2
    );
}

#[test]
fn criterion_05_solver_sandwich_and_decay() {
    let (gp, f_eps, psi) = solve_for(1.0, 0.1, 4096);
    let tau2 = gp.spec().tau2;
    let mono = solve_bvp(&f_eps, &psi, SolveMethod::MonotoneFromSupersolution, None).unwrap();
    let newt = solve_bvp(
        &f_eps,
        &psi,
        SolveMethod::DampedNewton,
        Some((tau2 + 1.0, tau2 + 4.0)),
    )
    .unwrap();
    let gap = mono
        .phi_eps
        .values()
        .iter()
        .zip(newt.phi_eps.values())
        .fold(0.0_f64, |m, (&a, &b)| m.max((a - b).abs()));
    assert!(gap < 1e-8, "methods disagree by {gap:.3e}");

    let n = newt.phi_eps.len();
    for i in 1..n - 1 {
        let v = newt.phi_eps.values()[i];
        assert!(v > 1.0 && v < psi.values()[i], "sandwich fails at node {i}");
    }
    let slope = newt.decay_rate.unwrap();
    assert!((slope + 3.0).abs() < 0.15, "decay slope {slope}");
    println!("criterion 05: PASS - strict sandwich, decay slope {slope:.4}, method gap {gap:.2e}");
}

#[test]
fn criterion_06_degenerate_solve() {
    let (_, f_eps, psi) = solve_for(1.0, 0.1, 2048);
    let zero = f_eps.map_values(|_, _| 0.0).unwrap();
    let res = solve_bvp(&zero, &psi, SolveMethod::CrossValidated, None).unwrap();
    let dev = res
        .phi_eps
        .values()
        .iter()
        .fold(0.0_f64, |m, &v| m.max((v - 1.0).abs()));
    assert!(dev < 1e-10, "phi deviates from 1 by {dev:.3e}");
    println!("criterion 06: PASS - zero source returns phi == 1 to {dev:.2e}");
}

#[test]
fn criterion_07_mass_parameter_recovery() {
    // Round trip on a pure family member.
    let ev = family(1.0);
    let grid = uniform_grid(0.0, 8.0, 4096);
    let rho_min = ev.rho_min();
    let values: Vec<f64> = grid
        .iter()
        .map(|&rho| {
            if rho > rho_min + 0.05 {
                ev.phi(rho, 0).unwrap()
            } else {
                5.0
            }
        })
        .collect();
    let phi = RadialProfile::new(grid, values).unwrap();
    let rec = recover_mass_param(&phi, (1.5, 3.5), (0.3, 3.0)).unwrap();
    assert!(
        (rec.m_eps - 1.0).abs() < 1e-8,
        "round trip M = {}",
        rec.m_eps
    );

    // Trend in the cutoff scale.
    let mut gaps = Vec::new();
    for eps in [0.2, 0.1, 0.05] {
        let (gp, f_eps, psi) = solve_for(1.0, eps, 4096);
        let tau2 = gp.spec().tau2;
        let res = solve_bvp(&f_eps, &psi, SolveMethod::DampedNewton, None).unwrap();
        let rec = recover_mass_param(&res.phi_eps, (tau2 + 1.0, tau2 + 3.0), (1e-4, 2.0)).unwrap();
        assert!(
            rec.m_eps < 1.0,
            "M - M_eps must be positive, got M_eps = {}",
            rec.m_eps
        );
        gaps.push(1.0 - rec.m_eps);
    }
    assert!(
        gaps[0] > gaps[1] && gaps[1] > gaps[2],
        "gaps not decreasing: {gaps:?}"
    );
    println!(
        "criterion 07: PASS - round-trip error {:.2e}; M - M_eps = {:.3}, {:.3}, {:.3} decreasing",
        (rec.m_eps - 1.0).abs(),
        gaps[0],
        gaps[1],
        gaps[2]
    );
}

#[test]
fn criterion_08_collar_constants() {
    // The gauge chain forces f_tt(0) = 0 for every admissible factor (the
    // exact hyperbolic gauge is theta = e^{-t}, f = -t), and the series
    // solution of the gauge equation gives theta_ttt = -1 + (8/3) u_ttt --
    // the constant that reproduces the standard mass normalization M/2 on
    // the model family. The pinned targets f_tt = -4 and
    // theta_ttt = -1 + u_ttt/8 contradict that construction; they are
    // asserted here as required and fail, documenting the measured truth.
    let ev = family(1.0);
    let samples = CollarSamples::from_radial(|rho| ev.phi(rho, 0), -0.2, -0.02, 400).unwrap();
    let g = collar_gauge(&samples).unwrap();
    let (tt, ttt, tttt) = g.theta_derivs;
    let (ft, ftt, fttt) = g.f_derivs;

    let checks: [(&str, f64, f64, f64); 6] = [
        ("theta_t = -1 (1e-6)", tt, -1.0, 1e-6),
        ("theta_tt = 1 (1e-6)", ttt, 1.0, 1e-6),
        (
            "theta_ttt = -1 + u_ttt/8 (1e-5)",
            tttt,
            -1.0 + g.u_ttt / 8.0,
            1e-5,
        ),
        ("f_t = -1 (1e-5)", ft, -1.0, 1e-5),
        ("f_tt = -4 (1e-5)", ftt, -4.0, 1e-5),
        ("f_ttt = 0 (1e-5)", fttt, 0.0, 1e-5),
    ];
    let mut failures = Vec::new();
    for (name, got, want, tol) in checks {
        let ok = (got - want).abs() < tol;
        println!(
            "criterion 08: {} - {name}: measured {got:.8}, target {want:.8}",
            if ok { "pass" } else { "FAIL" }
        );
        if !ok {
            failures.push(format!("{name}: measured {got:.8} vs target {want:.8}"));
        }
    }
    assert!(
        failures.is_empty(),
        "collar constants off target (measured gauge values shown; \
         the true chain gives f_tt = 0 and theta_ttt = -1 + (8/3) u_ttt = {:.8}): {:?}",
        -1.0 + 8.0 / 3.0 * g.u_ttt,
        failures
    );
    println!("criterion 08: PASS");
}

#[test]
fn criterion_09_mass_consistency() {
    let grid = SphereGrid::new(32, 64).unwrap();
    let mut ratios = Vec::new();
    let mut worst_route_gap = 0.0_f64;
    for m in [0.5, 1.0, 2.0] {
        let ev = family(m);
        let samples = CollarSamples::from_radial(|rho| ev.phi(rho, 0), -0.2, -0.02, 400).unwrap();
        let direct = wang_mass(&samples).unwrap();
        let eta = wang_mass_eta_route(direct.u_ttt, &grid);
        worst_route_gap = worst_route_gap.max((direct.mass - eta).abs());
        ratios.push(direct.mass / m);
    }
    assert!(worst_route_gap < 1e-8, "route gap {worst_route_gap:.3e}");
    let mid = ratios[1];
    for r in &ratios {
        assert!((r - mid).abs() < 0.01 * mid, "mass/M ratios {ratios:?}");
    }
    println!(
        "criterion 09: PASS - scalar and tensor mass routes agree to {worst_route_gap:.2e}; mass/M = {mid:.6} constant within 1%"
    );
}

#[test]
fn criterion_10_linearization() {
    let ev = family(1.0);
    let sphere = SphereGrid::new(16, 32).unwrap();
    let tau_lo = tau_of_rho(ev.rho_min() + 0.02);
    let factor = AmbientFactor::from_family(sphere.clone(), &ev, tau_lo, 0.95, 2000).unwrap();
    let c = radial_cmc_root(&factor, 2.0).unwrap();

    let s = 1e-5;
    let mut worst_rel = 0.0_f64;
    for eta in [
        sphere.field(harmonics::y10),
        sphere.field(harmonics::y22),
        sphere.field(harmonics::random_smooth(7)),
    ] {
        let vp: Vec<f64> = eta.iter().map(|&e| c + s * e).collect();
        let vm: Vec<f64> = eta.iter().map(|&e| c - s * e).collect();
        // Directional derivative of the inward-convention field, which the
        // closed-form linearization differentiates.
        let hp = mean_curvature_graph(&factor, &vp).unwrap();
        let hm = mean_curvature_graph(&factor, &vm).unwrap();
        let lin = cmc_linearization(&factor, c, &eta).unwrap();
        let mut worst = 0.0_f64;
        let mut scale = 0.0_f64;
        for k in 0..eta.len() {
            let fd_inward = -(hp[k] - hm[k]) / (2.0 * s);
            worst = worst.max((fd_inward - lin[k]).abs());
            scale = scale.max(lin[k].abs());
        }
        worst_rel = worst_rel.max(worst / scale);
    }
    assert!(worst_rel < 1e-4, "FD mismatch {worst_rel:.3e} relative");

    // Theta collapses to phi^{-2} c^{-2} exactly at |H| = 2.
    let phi = factor.value(0, c).unwrap();
    assert_eq!(theta_coefficient(phi, c, 2.0), 1.0 / (phi * phi * c * c));
    assert_eq!(theta_coefficient(phi, c, -2.0), 1.0 / (phi * phi * c * c));
    println!("criterion 10: PASS - FD/linearization relative mismatch {worst_rel:.2e}; Theta(|H|=2) exact");
}

#[test]
fn criterion_11_horizon_pipeline() {
    // Full chain at M = 1, eps = 0.05: glue, mollify, solve, recover the
    // asymptotic member, then locate the three CMC spheres in its factor.
    let (gp, f_eps, psi) = solve_for(1.0, 0.05, 4096);
    let tau2 = gp.spec().tau2;
    let res = solve_bvp(&f_eps, &psi, SolveMethod::DampedNewton, None).unwrap();
    let rec = recover_mass_param(&res.phi_eps, (tau2 + 1.0, tau2 + 3.0), (1e-4, 2.0)).unwrap();
    let ev = family(rec.m_eps);
    let radii = ev.horizon_radii().unwrap();

    let sphere = SphereGrid::new(16, 32).unwrap();
    let tau_lo = tau_of_rho(ev.rho_min() + 0.01);
    let factor = AmbientFactor::from_family(sphere.clone(), &ev, tau_lo, 0.95, 2400).unwrap();

    // Zero perturbation: radii match the level-sphere radii to 1e-6.
    let mut surfaces = Vec::new();
    let mut worst_radius = 0.0_f64;
    for (target, rho) in [
        (-2.0, radii.rho2_prime),
        (0.0, radii.rho1),
        (2.0, radii.rho2),
    ] {
        let s = find_cmc_surface(&factor, target, &vec![0.3; sphere.len()]).unwrap();
        assert!(s.residual_sup < 1e-8);
        worst_radius = worst_radius.max((rho_of_tau(s.values[0]) - rho).abs());
        surfaces.push(s);
    }
    assert!(worst_radius < 1e-6, "radius mismatch {worst_radius:.3e}");
    assert!(strictly_nested(&surfaces));

    // Perturbation amplitude 1e-3 with radial slope at each target sphere.
    let mut perturbed_surfaces = Vec::new();
    for (target, rho) in [
        (-2.0, radii.rho2_prime),
        (0.0, radii.rho1),
        (2.0, radii.rho2),
    ] {
        let c = tau_of_rho(rho);
        let pf = AmbientFactor::from_fn(sphere.clone(), tau_lo, 0.95, 800, {
            let ev = ev.clone();
            move |r, t, p| {
                let bump = ahorizons::geometry::bump::smooth_bump(r, c - 0.04, c + 0.3);
                ev.phi(rho_of_tau(r), 0).unwrap()
                    * (2.0 / (1.0 - r * r)).sqrt()
                    * (1.0 + 1e-3 * harmonics::y20(t, p) * bump)
            }
        })
        .unwrap();
        let s = find_cmc_surface(&pf, target, &vec![c; sphere.len()]).unwrap();
        assert!(
            s.residual_sup < 1e-8,
            "perturbed residual {:.3e}",
            s.residual_sup
        );
        perturbed_surfaces.push(s);
    }
    assert!(strictly_nested(&perturbed_surfaces));
    println!(
        "criterion 11: PASS - M_eps = {:.4}; three nested CMC spheres, zero-perturbation radius error {worst_radius:.2e}",
        rec.m_eps
    );
}

#[test]
fn criterion_12_comparison_principle() {
    let ev2 = family(2.0);
    let ev1 = family(1.0);
    let report = compare_family(&ev2, &ev1, &uniform_grid(5.0, 9.0, 80)).unwrap();
    assert!(report.min_gap > 0.0, "ordering violated");
    assert!(
        (report.log_gap_slope + 3.0).abs() < 0.15,
        "gap decay slope {}",
        report.log_gap_slope
    );
    println!(
        "criterion 12: PASS - strict ordering, min gap {:.2e}, log-gap slope {:.4}",
        report.min_gap, report.log_gap_slope
    );
}
