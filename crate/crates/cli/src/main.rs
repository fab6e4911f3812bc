//! Command-line interface: builds conformally hyperbolic metrics on the
//! 3-ball with horizon spheres and writes diffable reports and data series.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O.

mod config;
mod pipeline;
mod report;

use std::process::ExitCode;

use config::RunConfig;

const USAGE: &str = "\
usage: ahorizons <command> [--flag value ...]

commands:
  params      derived constants and horizon radii of the family member
  glue        cap the family member and verify the curvature bounds
  solve       defect-corrected solve and mass-parameter recovery
  mass        boundary mass of the family member
  horizons    CMC spheres of the family factor
  pipeline    full chain; writes report and data series to --out-dir
  sweep       one row per (mass, epsilon) pair; writes sweep.csv

flags (defaults in parentheses):
  --mass-param X   mass parameter (1.0)
  --epsilon X      cutoff scale of the defect mollifier (0.1)
  --bump-delta X   curvature dip amplitude, 0 skips the stage (0)
  --grid-n N       radial grid nodes (4096)
  --outer-rho X    outer solve radius beyond the cap (8)
  --sphere-res NxM sphere grid (16x32)
  --perturbation X CMC probe amplitude (0)
  --seed N         seed for the probe's angular mix (42)
  --out-dir PATH   output directory for pipeline/sweep (out)
  --config FILE    key-value configuration file, flags override it
  --masses a,b,c   sweep mass list
  --epsilons a,b,c sweep cutoff list
";

enum CliFailure {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl CliFailure {
    fn exit(self) -> ExitCode {
        match self {
            CliFailure::Validation(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliFailure::Numerical(msg) => {
                eprintln!("numerical failure: {msg}");
                ExitCode::from(3)
            }
            CliFailure::Io(msg) => {
                eprintln!("i/o error: {msg}");
                ExitCode::from(4)
            }
        }
    }
}

fn parse_args(args: &[String]) -> Result<(String, RunConfig), CliFailure> {
    if args.is_empty() {
        return Err(CliFailure::Validation(format!("missing command\n{USAGE}")));
    }
    let command = args[0].clone();
    let mut cfg = RunConfig::default();

    // The config file loads first so explicit flags override it.
    let mut i = 1;
    let mut pending: Vec<(String, String)> = Vec::new();
    while i < args.len() {
        let flag = args[i]
            .strip_prefix("--")
            .ok_or_else(|| CliFailure::Validation(format!("expected --flag, got {:?}", args[i])))?;
        let value = args
            .get(i + 1)
            .ok_or_else(|| CliFailure::Validation(format!("flag --{flag} needs a value")))?;
        if flag == "config" {
            cfg.load_file(std::path::Path::new(value))
                .map_err(|e| CliFailure::Validation(e.to_string()))?;
        } else {
            pending.push((flag.to_string(), value.clone()));
        }
        i += 2;
    }
    for (flag, value) in pending {
        cfg.set(&flag, &value)
            .map_err(|e| CliFailure::Validation(e.to_string()))?;
    }
    cfg.validate()
        .map_err(|e| CliFailure::Validation(e.to_string()))?;
    Ok((command, cfg))
}

fn numerical(e: ahorizons::Error) -> CliFailure {
    CliFailure::Numerical(e.to_string())
}

fn run(command: &str, cfg: &RunConfig) -> Result<bool, CliFailure> {
    match command {
        "params" => {
            let params = ahorizons::family::make_params(cfg.mass_param).map_err(numerical)?;
            let ev = ahorizons::family::FamilyEvaluator::new(params).map_err(numerical)?;
            let radii = ev.horizon_radii().map_err(numerical)?;
            println!("mass_param = {}", params.m);
            println!("neck_radius_a = {:.12}", params.a);
            println!("clock_h_a = {:.12}", params.h_a);
            println!("rho_neck = {:.12}", params.rho_m);
            println!("ball_radius_b = {:.12}", params.b);
            println!("rho_inner_limit = {:.12}", params.rho0);
            println!("rho_minus2 = {:.12}", radii.rho2_prime);
            println!("rho_zero = {:.12}", radii.rho1);
            println!("rho_plus2 = {:.12}", radii.rho2);
            Ok(true)
        }
        "glue" => {
            let params = ahorizons::family::make_params(cfg.mass_param).map_err(numerical)?;
            let ev = ahorizons::family::FamilyEvaluator::new(params).map_err(numerical)?;
            let (t1, t2) = ahorizons::gluing::select_taus(&ev).map_err(numerical)?;
            let spec = ahorizons::gluing::build_spec(&ev, t1, t2).map_err(numerical)?;
            let grid = ahorizons::gluing::glued_grid(&spec, t2 + cfg.outer_rho, cfg.grid_n);
            let gp = ahorizons::gluing::glued_profile(&ev, &spec, grid).map_err(numerical)?;
            let report = ahorizons::gluing::verify_supercurvature(&gp).map_err(numerical)?;
            println!("tau1 = {:.12}", spec.tau1);
            println!("tau2 = {:.12}", spec.tau2);
            println!("cap_value = {:.12}", gp.cap_value());
            println!("min_interior_margin = {:.6e}", report.min_interior_margin);
            println!("max_outer_deviation = {:.6e}", report.max_outer_deviation);
            Ok(true)
        }
        "solve" => {
            let chain = pipeline::radial_chain(cfg).map_err(numerical)?;
            println!("tau2 = {:.12}", chain.spec.tau2);
            println!("residual_sup = {:.6e}", chain.solve.residual_sup);
            println!("iterations = {}", chain.solve.iterations);
            if let Some(rate) = chain.solve.decay_rate {
                println!("decay_rate = {rate:.6}");
            }
            println!("m_eps = {:.12}", chain.recovery.m_eps);
            println!("match_deviation = {:.6e}", chain.recovery.deviation);
            println!(
                "tau2_inside_inner_horizon = {}",
                chain.tau2_inside_inner_horizon
            );
            Ok(true)
        }
        "mass" => {
            let text = pipeline::mass_diagnostics(cfg.mass_param).map_err(numerical)?;
            print!("{text}");
            Ok(true)
        }
        "horizons" => {
            let text = pipeline::horizons_diagnostics(cfg).map_err(numerical)?;
            print!("{text}");
            Ok(true)
        }
        "pipeline" => {
            let mut trace = pipeline::StageTrace::default();
            let chain = match pipeline::radial_chain_traced(cfg, &mut trace) {
                Ok(chain) => chain,
                Err(e) => {
                    // Retain partial outputs next to a failure marker.
                    std::fs::create_dir_all(&cfg.out_dir)
                        .map_err(|io| CliFailure::Io(io.to_string()))?;
                    std::fs::write(cfg.out_dir.join("run.cfg"), cfg.echo())
                        .map_err(|io| CliFailure::Io(io.to_string()))?;
                    let marker = format!(
                        "failed after stages: {}\nerror: {e}\n",
                        trace.completed.join(", ")
                    );
                    std::fs::write(cfg.out_dir.join("FAILED.txt"), marker)
                        .map_err(|io| CliFailure::Io(io.to_string()))?;
                    pipeline::emit_partial(cfg, &trace)
                        .map_err(|io| CliFailure::Io(io.to_string()))?;
                    return Err(numerical(e));
                }
            };
            let horizons = pipeline::horizon_stage(cfg, &chain).map_err(numerical)?;
            let report = pipeline::build_report(cfg, &chain, &horizons);
            std::fs::create_dir_all(&cfg.out_dir).map_err(|e| CliFailure::Io(e.to_string()))?;
            std::fs::write(cfg.out_dir.join("report.txt"), report.render())
                .map_err(|e| CliFailure::Io(e.to_string()))?;
            std::fs::write(cfg.out_dir.join("run.cfg"), cfg.echo())
                .map_err(|e| CliFailure::Io(e.to_string()))?;
            pipeline::emit_profiles(cfg, &chain, &horizons)
                .map_err(|e| CliFailure::Io(e.to_string()))?;
            println!(
                "report written to {}",
                cfg.out_dir.join("report.txt").display()
            );
            if !report.all_passed() {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    eprintln!("FAIL {} = {:.6e} [{}]", c.name, c.value, c.tolerance);
                }
            }
            Ok(report.all_passed())
        }
        "sweep" => {
            if cfg.masses.is_empty() || cfg.epsilons.is_empty() {
                return Err(CliFailure::Validation(
                    "sweep needs --masses and --epsilons lists".into(),
                ));
            }
            let rows = pipeline::run_sweep(cfg);
            std::fs::create_dir_all(&cfg.out_dir).map_err(|e| CliFailure::Io(e.to_string()))?;
            let text = pipeline::render_sweep(&rows);
            std::fs::write(cfg.out_dir.join("sweep.csv"), &text)
                .map_err(|e| CliFailure::Io(e.to_string()))?;
            println!(
                "{} rows written to {}",
                rows.len(),
                cfg.out_dir.join("sweep.csv").display()
            );
            Ok(rows.iter().all(|r| r.status == "ok"))
        }
        other => Err(CliFailure::Validation(format!(
            "unknown command {other:?}\n{USAGE}"
        ))),
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        print!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    let (command, cfg) = match parse_args(&args) {
        Ok(v) => v,
        Err(f) => return f.exit(),
    };
    match run(&command, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(f) => f.exit(),
    }
}
