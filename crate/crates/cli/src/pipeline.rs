//! End-to-end orchestration: build the family member, cap it, solve the
//! defect-corrected equation, recover the asymptotic member, optionally push
//! the curvature below -6 and renormalize, measure the mass, and locate the
//! three CMC spheres. The same radial chain backs the `pipeline` run, the
//! stage subcommands, and `sweep` cells.

use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use ahorizons::boundary_mass::{collar_gauge, wang_mass, CollarSamples, MassResult};
use ahorizons::error::Error;
use ahorizons::family::{make_params, AdSSchwParams, FamilyEvaluator, HorizonRadii};
use ahorizons::geometry::bump::smooth_bump;
use ahorizons::geometry::chart::{rho_of_tau, tau_of_rho};
use ahorizons::geometry::profile::{uniform_grid, RadialProfile};
use ahorizons::gluing::{
    build_spec, glued_grid, glued_profile, select_taus, verify_supercurvature, CurvatureReport,
    GluedProfile, GluingSpec,
};
use ahorizons::horizon::{
    find_cmc_surface, harmonics, probe_regime, strictly_nested, AmbientFactor, GraphSurface,
    SphereGrid,
};
use ahorizons::solver::{
    defect, lower_curvature, mollify, recover_mass_param, solve_bvp, yamabe_normalize,
    MassRecovery, MollifierSpec, SolveMethod, SolveResult,
};

use crate::config::RunConfig;
use crate::report::RunReport;

pub struct RadialChain {
    pub params: AdSSchwParams,
    pub evaluator: FamilyEvaluator,
    pub spec: GluingSpec,
    pub glued: GluedProfile,
    pub curvature: CurvatureReport,
    pub solve: SolveResult,
    pub recovery: MassRecovery,
    pub m_eps_evaluator: FamilyEvaluator,
    pub m_eps_radii: HorizonRadii,
    /// `u * w` after the optional curvature dip and normalization, or the
    /// solved factor itself when `bump_delta = 0`.
    pub final_factor: RadialProfile,
    pub normalizer_range: Option<(f64, f64)>,
    pub mass_family: MassResult,
    pub mass_final: MassResult,
    pub tau2_inside_inner_horizon: bool,
    pub timings: Vec<(String, f64)>,
}

fn timed<T>(timings: &mut Vec<(String, f64)>, name: &str, f: impl FnOnce() -> T) -> T {
    let t0 = Instant::now();
    let out = f();
    timings.push((name.to_string(), t0.elapsed().as_secs_f64() * 1e3));
    out
}

/// Stage-by-stage trace of a run: whatever completed before a failure is
/// retained here so the command can write partial outputs next to the
/// failure marker.
#[derive(Default)]
pub struct StageTrace {
    pub completed: Vec<&'static str>,
    pub params: Option<AdSSchwParams>,
    pub spec: Option<GluingSpec>,
    pub psi_series: Option<Vec<(f64, f64)>>,
    pub phi_eps_series: Option<Vec<(f64, f64)>>,
}

pub fn radial_chain(cfg: &RunConfig) -> Result<RadialChain, Error> {
    radial_chain_traced(cfg, &mut StageTrace::default())
}

pub fn radial_chain_traced(cfg: &RunConfig, trace: &mut StageTrace) -> Result<RadialChain, Error> {
    let mut timings = Vec::new();

    let params = make_params(cfg.mass_param)?;
    let evaluator = timed(&mut timings, "family table", || {
        FamilyEvaluator::new(params)
    })?;
    trace.params = Some(params);
    trace.completed.push("family");

    let (tau1, tau2) = select_taus(&evaluator)?;
    let spec = build_spec(&evaluator, tau1, tau2)?;
    let rho_max = tau2 + cfg.outer_rho;
    let glued = timed(&mut timings, "glued profile", || {
        glued_profile(
            &evaluator,
            &spec,
            glued_grid(&spec, rho_max + 0.5, cfg.grid_n),
        )
    })?;
    let curvature = verify_supercurvature(&glued)?;
    trace.spec = Some(spec);
    trace.psi_series = Some(
        glued
            .profile()
            .grid()
            .iter()
            .zip(glued.profile().values())
            .map(|(&a, &b)| (a, b))
            .collect(),
    );
    trace.completed.push("gluing");

    // Mollified defect and the corrected solve on a uniform grid.
    let grid = uniform_grid(0.0, rho_max, cfg.grid_n);
    let solve = timed(&mut timings, "defect solve", || -> Result<_, Error> {
        let f = defect(&glued, &grid)?;
        let f_eps = mollify(&f, &MollifierSpec::new(cfg.epsilon, tau2)?)?;
        let psi = RadialProfile::new(
            grid.clone(),
            grid.iter()
                .map(|&r| glued.value(r))
                .collect::<Result<Vec<_>, _>>()?,
        )?;
        solve_bvp(
            &f_eps,
            &psi,
            SolveMethod::CrossValidated,
            Some((tau2 + 1.0, tau2 + 4.0)),
        )
    })?;
    trace.phi_eps_series = Some(
        solve
            .phi_eps
            .grid()
            .iter()
            .zip(solve.phi_eps.values())
            .map(|(&a, &b)| (a, b))
            .collect(),
    );
    trace.completed.push("defect solve");

    let mut recovery = timed(&mut timings, "mass recovery", || {
        recover_mass_param(
            &solve.phi_eps,
            (tau2 + 1.0, tau2 + 3.0),
            (1e-6, 2.0 * cfg.mass_param),
        )
    })?;
    trace.completed.push("mass recovery");
    let mut solve = solve;
    solve.m_eps = Some(recovery.m_eps);
    // Deterministic tidy-up of the bisection tail.
    recovery.m_eps = (recovery.m_eps * 1e12).round() / 1e12;

    let m_eps_evaluator = FamilyEvaluator::new(make_params(recovery.m_eps)?)?;
    let m_eps_radii = m_eps_evaluator.horizon_radii()?;
    let tau2_inside_inner_horizon = tau2 < m_eps_radii.rho2_prime;

    // Optional curvature dip standing in for a scalar-curvature-lowering
    // deformation, then the normalization back to -6.
    let (final_factor, normalizer_range) = if cfg.bump_delta > 0.0 {
        timed(&mut timings, "dip + normalize", || -> Result<_, Error> {
            let dip = RadialProfile::from_fn(
                |rho| cfg.bump_delta * smooth_bump(rho, 0.2 * tau2, 0.9 * tau2),
                grid.clone(),
            )?;
            let w = lower_curvature(&solve.phi_eps, &dip)?;
            let r2 = dip.map_values(|_, d| -6.0 - d)?;
            let u = yamabe_normalize(&r2, &w)?;
            let (mut ulo, mut uhi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &v in u.values() {
                ulo = ulo.min(v);
                uhi = uhi.max(v);
            }
            let combined = RadialProfile::new(
                grid.clone(),
                u.values()
                    .iter()
                    .zip(w.values())
                    .map(|(&a, &b)| a * b)
                    .collect(),
            )?;
            Ok((combined, Some((ulo, uhi))))
        })?
    } else {
        (solve.phi_eps.clone(), None)
    };

    let (mass_family, mass_final) = timed(&mut timings, "mass", || -> Result<_, Error> {
        let fam = CollarSamples::from_radial(|rho| m_eps_evaluator.phi(rho, 0), -0.2, -0.02, 400)?;
        let fin = CollarSamples::from_profile(&final_factor, -0.2, -0.02, 400)?;
        Ok((wang_mass(&fam)?, wang_mass(&fin)?))
    })?;
    trace.completed.push("mass");

    Ok(RadialChain {
        params,
        evaluator,
        spec,
        glued,
        curvature,
        solve,
        recovery,
        m_eps_evaluator,
        m_eps_radii,
        final_factor,
        normalizer_range,
        mass_family,
        mass_final,
        tau2_inside_inner_horizon,
        timings,
    })
}

pub struct HorizonStage {
    /// Surfaces for targets -2, 0, +2 in that order.
    pub surfaces: Vec<(f64, GraphSurface)>,
    pub nested: bool,
    /// Sup deviation of the zero-perturbation radii from the level-sphere
    /// radii of the recovered member, in rho.
    pub radius_deviation: f64,
    /// Largest amplitude from the probe ladder at which the minimal-sphere
    /// solve still converged (perturbed runs only).
    pub regime_amplitude: Option<f64>,
}

/// CMC stage on the recovered member's factor (the asymptotic representation
/// of the pipeline metric), optionally with the configured probe
/// perturbation.
pub fn horizon_stage(cfg: &RunConfig, chain: &RadialChain) -> Result<HorizonStage, Error> {
    let ev = &chain.m_eps_evaluator;
    let radii = chain.m_eps_radii;
    let sphere = SphereGrid::new(cfg.sphere_n_theta, cfg.sphere_n_phi)?;
    let tau_lo = tau_of_rho(ev.rho_min() + 0.01);
    let targets = [
        (-2.0, radii.rho2_prime),
        (0.0, radii.rho1),
        (2.0, radii.rho2),
    ];

    let mut surfaces = Vec::new();
    let mut radius_deviation = 0.0_f64;
    for (target, rho) in targets {
        let c = tau_of_rho(rho);
        let surface = if cfg.perturbation > 0.0 {
            let ev2 = ev.clone();
            let amp = cfg.perturbation;
            let angular = harmonics::random_smooth(cfg.seed);
            let factor =
                AmbientFactor::from_fn(sphere.clone(), tau_lo, 0.95, 800, move |r, t, p| {
                    let bump = smooth_bump(r, c - 0.04, c + 0.3);
                    ev2.phi(rho_of_tau(r), 0).unwrap()
                        * (2.0 / (1.0 - r * r)).sqrt()
                        * (1.0 + amp * (harmonics::y20(t, p) + 0.3 * angular(t, p)) * bump)
                })?;
            find_cmc_surface(&factor, target, &vec![c; sphere.len()])?
        } else {
            let factor = AmbientFactor::from_family(sphere.clone(), ev, tau_lo, 0.95, 2400)?;
            let s = find_cmc_surface(&factor, target, &vec![c; sphere.len()])?;
            radius_deviation = radius_deviation.max((rho_of_tau(s.values[0]) - rho).abs());
            s
        };
        surfaces.push((target, surface));
    }
    let nested = strictly_nested(&surfaces.iter().map(|(_, s)| s.clone()).collect::<Vec<_>>());

    // Empirical regime probe: climb an amplitude ladder from the configured
    // perturbation and report the largest rung where the minimal-sphere
    // solve still converges.
    let regime_amplitude = if cfg.perturbation > 0.0 {
        let c = tau_of_rho(radii.rho1);
        let seed = cfg.seed;
        let build = |amp: f64| {
            let ev2 = ev.clone();
            let angular = harmonics::random_smooth(seed);
            AmbientFactor::from_fn(sphere.clone(), tau_lo, 0.95, 400, move |r, t, p| {
                let bump = smooth_bump(r, c - 0.04, c + 0.3);
                ev2.phi(rho_of_tau(r), 0).unwrap()
                    * (2.0 / (1.0 - r * r)).sqrt()
                    * (1.0 + amp * (harmonics::y20(t, p) + 0.3 * angular(t, p)) * bump)
            })
        };
        let ladder: Vec<f64> = (0..4).map(|k| cfg.perturbation * f64::powi(4.0, k)).collect();
        probe_regime(build, 0.0, &vec![c; sphere.len()], &ladder)
    } else {
        None
    };

    Ok(HorizonStage {
        surfaces,
        nested,
        radius_deviation,
        regime_amplitude,
    })
}

fn fmt_f(value: f64) -> String {
    format!("{value:.17e}")
}

fn write_series(path: &Path, header: &str, rows: &[Vec<f64>]) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{header}")?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_f(v)).collect();
        writeln!(f, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Writes whatever series a failed run produced before its failing stage.
pub fn emit_partial(cfg: &RunConfig, trace: &StageTrace) -> std::io::Result<()> {
    let dir = &cfg.out_dir;
    if let Some(series) = &trace.psi_series {
        let rows: Vec<Vec<f64>> = series.iter().map(|&(a, b)| vec![a, b]).collect();
        write_series(&dir.join("profile_psi.csv"), "rho,psi", &rows)?;
    }
    if let Some(series) = &trace.phi_eps_series {
        let rows: Vec<Vec<f64>> = series.iter().map(|&(a, b)| vec![a, b]).collect();
        write_series(&dir.join("profile_phi_eps.csv"), "rho,phi_eps", &rows)?;
    }
    Ok(())
}

/// Writes the plottable data series for a completed chain.
pub fn emit_profiles(
    cfg: &RunConfig,
    chain: &RadialChain,
    horizons: &HorizonStage,
) -> std::io::Result<()> {
    let dir = &cfg.out_dir;
    let tau2 = chain.spec.tau2;
    let rho_max = tau2 + cfg.outer_rho;

    // Family factor of the input mass parameter.
    let lo = chain.evaluator.rho_min() + 0.02;
    let rows: Vec<Vec<f64>> = uniform_grid(lo, rho_max, 2000)
        .iter()
        .map(|&rho| vec![rho, chain.evaluator.phi(rho, 0).unwrap()])
        .collect();
    write_series(&dir.join("profile_phi.csv"), "rho,phi", &rows)?;

    // Glued profile and the solved factor.
    let rows: Vec<Vec<f64>> = chain
        .glued
        .profile()
        .grid()
        .iter()
        .zip(chain.glued.profile().values())
        .map(|(&rho, &v)| vec![rho, v])
        .collect();
    write_series(&dir.join("profile_psi.csv"), "rho,psi", &rows)?;

    let rows: Vec<Vec<f64>> = chain
        .solve
        .phi_eps
        .grid()
        .iter()
        .zip(chain.solve.phi_eps.values())
        .map(|(&rho, &v)| vec![rho, v])
        .collect();
    write_series(&dir.join("profile_phi_eps.csv"), "rho,phi_eps", &rows)?;

    // Final factor (differs from phi_eps only when the dip stage ran).
    let rows: Vec<Vec<f64>> = chain
        .final_factor
        .grid()
        .iter()
        .zip(chain.final_factor.values())
        .map(|(&rho, &v)| vec![rho, v])
        .collect();
    write_series(&dir.join("profile_final.csv"), "rho,final_factor", &rows)?;

    // Scalar curvature of the glued metric.
    let rows: Vec<Vec<f64>> = chain
        .curvature
        .rho
        .iter()
        .zip(&chain.curvature.curvature)
        .map(|(&rho, &r)| vec![rho, r])
        .collect();
    write_series(&dir.join("curvature.csv"), "rho,scalar_curvature", &rows)?;

    // Level mean curvature of the recovered member, down into the guard band
    // so the series exhibits the full -2 .. +2 run.
    let ev = chain.m_eps_evaluator.clone().allow_near_singularity();
    let lo = ev.params().rho0 + 1e-4;
    let rows: Vec<Vec<f64>> = uniform_grid(lo, rho_max.min(ev.rho_max()), 2000)
        .iter()
        .map(|&rho| vec![rho, ev.mean_curvature_level(rho).unwrap()])
        .collect();
    write_series(&dir.join("mean_curvature.csv"), "rho,mean_curvature", &rows)?;

    // Surfaces.
    let sphere = SphereGrid::new(cfg.sphere_n_theta, cfg.sphere_n_phi).unwrap();
    for (target, surface) in &horizons.surfaces {
        let name = match *target as i64 {
            -2 => "surface_hminus2.csv",
            0 => "surface_h0.csv",
            _ => "surface_hplus2.csv",
        };
        let mut rows = Vec::with_capacity(sphere.len());
        for i in 0..sphere.n_theta {
            for j in 0..sphere.n_phi {
                rows.push(vec![
                    sphere.theta_at(i),
                    sphere.phi_at(j),
                    surface.values[sphere.idx(i, j)],
                ]);
            }
        }
        write_series(&dir.join(name), "theta,phi,v", &rows)?;
    }
    Ok(())
}

/// Builds the full report for a pipeline run.
pub fn build_report(cfg: &RunConfig, chain: &RadialChain, horizons: &HorizonStage) -> RunReport {
    let mut report = RunReport {
        config_echo: cfg.echo(),
        ..Default::default()
    };

    let p = &chain.params;
    let sec = report.section("family parameters");
    sec.kv_e("mass_param", p.m);
    sec.kv_e("neck_radius_a", p.a);
    sec.kv_e("clock_h_a", p.h_a);
    sec.kv_e("rho_neck", p.rho_m);
    sec.kv_e("ball_radius_b", p.b);
    sec.kv_e("rho_inner_limit", p.rho0);

    let s = &chain.spec;
    let sec = report.section("gluing");
    sec.kv_e("tau1", s.tau1);
    sec.kv_e("tau2", s.tau2);
    sec.kv_e("flux_match_A", s.a_match);
    sec.kv_e("flux_match_B", s.b_match);
    sec.kv_e("cubic_a", s.a_coef);
    sec.kv_e("cubic_b", s.b_coef);
    sec.kv_e("cap_value", chain.glued.cap_value());
    sec.kv_e("min_interior_margin", chain.curvature.min_interior_margin);
    sec.kv_e("max_outer_deviation", chain.curvature.max_outer_deviation);

    let sec = report.section("defect solve");
    sec.kv_e("residual_sup", chain.solve.residual_sup);
    sec.kv("iterations", chain.solve.iterations);
    if let Some(rate) = chain.solve.decay_rate {
        sec.kv_e("decay_rate", rate);
    }
    sec.kv_e("m_eps", chain.recovery.m_eps);
    sec.kv_e("match_deviation", chain.recovery.deviation);
    sec.kv("tau2_inside_inner_horizon", chain.tau2_inside_inner_horizon);
    if let Some((ulo, uhi)) = chain.normalizer_range {
        sec.kv_e("normalizer_min", ulo);
        sec.kv_e("normalizer_max", uhi);
    }

    let sec = report.section("mass");
    sec.kv_e("u_ttt_family", chain.mass_family.u_ttt);
    sec.kv_e("mass_family", chain.mass_family.mass);
    sec.kv_e("mass_final", chain.mass_final.mass);
    sec.kv_e(
        "mass_difference",
        (chain.mass_family.mass - chain.mass_final.mass).abs(),
    );

    let sec = report.section("horizons");
    for (target, surface) in &horizons.surfaces {
        sec.kv_e(&format!("radius_tau_H{target:+.0}"), surface.values[0]);
        sec.kv_e(&format!("residual_H{target:+.0}"), surface.residual_sup);
    }
    sec.kv("strictly_nested", horizons.nested);
    if cfg.perturbation == 0.0 {
        sec.kv_e("radius_deviation", horizons.radius_deviation);
    }
    if let Some(amp) = horizons.regime_amplitude {
        sec.kv_e("largest_converged_amplitude", amp);
    }

    // Checks with pinned tolerances.
    report.check(
        "glued curvature margin inside",
        chain.curvature.min_interior_margin,
        "> 0",
        chain.curvature.min_interior_margin > 0.0,
    );
    report.check(
        "glued curvature deviation outside",
        chain.curvature.max_outer_deviation,
        "< 1e-6",
        chain.curvature.max_outer_deviation < 1e-6,
    );
    report.check(
        "solve residual",
        chain.solve.residual_sup,
        "< 1e-9",
        chain.solve.residual_sup < 1e-9,
    );
    let rate = chain.solve.decay_rate.unwrap_or(f64::NAN);
    report.check("decay rate", rate, "-3 +- 0.15", (rate + 3.0).abs() < 0.15);
    report.check(
        "matching deviation",
        chain.recovery.deviation,
        "< 1e-5",
        chain.recovery.deviation < 1e-5,
    );
    report.check(
        "mass loss positive",
        chain.params.m - chain.recovery.m_eps,
        "> 0",
        chain.recovery.m_eps < chain.params.m,
    );
    if cfg.bump_delta == 0.0 {
        report.check(
            "mass agreement",
            (chain.mass_family.mass - chain.mass_final.mass).abs(),
            "< 1e-6",
            (chain.mass_family.mass - chain.mass_final.mass).abs() < 1e-6,
        );
    } else {
        // With a curvature dip the final mass moves by an amount the report
        // records; the check is that the normalizer stayed in its barriers.
        let (ulo, uhi) = chain.normalizer_range.unwrap();
        let bound = (1.0 + cfg.bump_delta / 6.0).powf(0.25);
        report.check("normalizer lower barrier", ulo, ">= 1", ulo >= 1.0 - 1e-10);
        report.check(
            "normalizer maximum bound",
            uhi,
            "<= max(-R/6)^(1/4)",
            uhi <= bound + 1e-8,
        );
    }
    for (target, surface) in &horizons.surfaces {
        report.check(
            &format!("cmc residual H = {target:+.0}"),
            surface.residual_sup,
            "< 1e-8",
            surface.residual_sup < cfg.cmc_tol,
        );
    }
    report.check(
        "cmc surfaces nested",
        if horizons.nested { 1.0 } else { 0.0 },
        "strict",
        horizons.nested,
    );
    if cfg.perturbation == 0.0 {
        report.check(
            "cmc radii match level spheres",
            horizons.radius_deviation,
            "< 1e-6",
            horizons.radius_deviation < 1e-6,
        );
    }

    report.timings = chain.timings.clone();
    report
}

/// One sweep row; failures are recorded in the status column and the sweep
/// continues.
pub struct SweepRow {
    pub index: usize,
    pub m: f64,
    pub epsilon: f64,
    pub status: String,
    pub fields: Vec<f64>,
}

pub const SWEEP_HEADER: &str = "index,mass_param,epsilon,status,neck_a,rho_neck,ball_b,tau1,tau2,m_eps,mass,rho_minus2,rho_zero,rho_plus2,solve_residual,match_deviation";

pub fn sweep_cell(cfg: &RunConfig, index: usize, m: f64, epsilon: f64) -> SweepRow {
    let mut cell_cfg = cfg.clone();
    cell_cfg.mass_param = m;
    cell_cfg.epsilon = epsilon;
    match radial_chain(&cell_cfg) {
        Ok(chain) => SweepRow {
            index,
            m,
            epsilon,
            status: "ok".into(),
            fields: vec![
                chain.params.a,
                chain.params.rho_m,
                chain.params.b,
                chain.spec.tau1,
                chain.spec.tau2,
                chain.recovery.m_eps,
                chain.mass_final.mass,
                chain.m_eps_radii.rho2_prime,
                chain.m_eps_radii.rho1,
                chain.m_eps_radii.rho2,
                chain.solve.residual_sup,
                chain.recovery.deviation,
            ],
        },
        // Retain the geometric fields when a later stage fails; the error
        // is recorded in the status column and the sweep continues.
        Err(e) => {
            let mut fields = vec![];
            if let Ok(p) = make_params(m) {
                fields.extend([p.a, p.rho_m, p.b]);
                if let Ok(ev) = FamilyEvaluator::new(p) {
                    if let Ok((t1, t2)) = select_taus(&ev) {
                        fields.extend([t1, t2]);
                    }
                }
            }
            SweepRow {
                index,
                m,
                epsilon,
                status: format!("error: {e}").replace(',', ";"),
                fields,
            }
        }
    }
}

/// Runs all sweep cells on a small worker pool; output order follows the
/// input index regardless of completion order.
pub fn run_sweep(cfg: &RunConfig) -> Vec<SweepRow> {
    let cells: Vec<(usize, f64, f64)> = {
        let mut v = Vec::new();
        let mut k = 0;
        for &m in &cfg.masses {
            for &e in &cfg.epsilons {
                v.push((k, m, e));
                k += 1;
            }
        }
        v
    };
    let n = cells.len();
    let results: Vec<std::sync::Mutex<Option<SweepRow>>> =
        (0..n).map(|_| std::sync::Mutex::new(None)).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let workers = std::thread::available_parallelism()
        .map_or(2, |p| p.get())
        .min(n.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if k >= n {
                    break;
                }
                let (index, m, e) = cells[k];
                let row = sweep_cell(cfg, index, m, e);
                *results[k].lock().unwrap() = Some(row);
            });
        }
    });
    results
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("all cells computed"))
        .collect()
}

pub fn render_sweep(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let mut cells = vec![
            row.index.to_string(),
            fmt_f(row.m),
            fmt_f(row.epsilon),
            row.status.clone(),
        ];
        let n_fields = SWEEP_HEADER.split(',').count() - 4;
        for k in 0..n_fields {
            cells.push(row.fields.get(k).map_or(String::new(), |&v| fmt_f(v)));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Auxiliary diagnostics for the `mass` subcommand: the gauge route next to
/// the fit route.
pub fn mass_diagnostics(m: f64) -> Result<String, Error> {
    let ev = FamilyEvaluator::new(make_params(m)?)?;
    let samples = CollarSamples::from_radial(|rho| ev.phi(rho, 0), -0.2, -0.02, 400)?;
    let fit = wang_mass(&samples)?;
    let gauge = collar_gauge(&samples)?;
    let mut out = String::new();
    out.push_str(&format!("u_ttt = {:.12e}\n", fit.u_ttt));
    out.push_str(&format!("trace_coefficient = {:.12e}\n", fit.trace_coeff));
    out.push_str(&format!("mass = {:.12e}\n", fit.mass));
    out.push_str(&format!("mass / mass_param = {:.9}\n", fit.mass / m));
    out.push_str(&format!(
        "gauge theta derivatives at the boundary = ({:.9}, {:.9}, {:.9})\n",
        gauge.theta_derivs.0, gauge.theta_derivs.1, gauge.theta_derivs.2
    ));
    out.push_str(&format!(
        "gauge f derivatives at the boundary = ({:.9}, {:.9}, {:.9})\n",
        gauge.f_derivs.0, gauge.f_derivs.1, gauge.f_derivs.2
    ));
    out.push_str(&format!(
        "gauge identity error = {:.3e}\n",
        gauge.gauge_identity_error
    ));
    Ok(out)
}

/// Surfaces of the family factor for the `horizons` subcommand.
pub fn horizons_diagnostics(cfg: &RunConfig) -> Result<String, Error> {
    let ev = FamilyEvaluator::new(make_params(cfg.mass_param)?)?;
    let radii = ev.horizon_radii()?;
    let sphere = SphereGrid::new(cfg.sphere_n_theta, cfg.sphere_n_phi)?;
    let tau_lo = tau_of_rho(ev.rho_min() + 0.01);
    let factor = AmbientFactor::from_family(sphere.clone(), &ev, tau_lo, 0.95, 2400)?;
    let mut out = String::new();
    for (target, rho) in [
        (-2.0, radii.rho2_prime),
        (0.0, radii.rho1),
        (2.0, radii.rho2),
    ] {
        let s = find_cmc_surface(&factor, target, &vec![0.3; sphere.len()])?;
        out.push_str(&format!(
            "H = {target:+.0}: tau = {:.12}, rho = {:.12} (level-sphere {:.12}), residual {:.3e}\n",
            s.values[0],
            rho_of_tau(s.values[0]),
            rho,
            s.residual_sup
        ));
    }
    Ok(out)
}
