//! Radial semilinear solves.
//!
//! All solves discretize
//! `lam(rho) [u'' + (2 coth(rho) + d(rho)) u'] + N(rho, u) = rhs(rho)`
//! on a uniform grid over `[0, L]` with second-order central differences, an
//! even-extension pole row (`Delta u(0) = 3 u''(0)`), and the Robin closure
//! `u'(L) = -3 (u(L) - 1)` that encodes the `e^{-3 rho}` decay of all factors
//! handled here. Newton steps solve the tridiagonal linearization directly.
//!
//! Three problems share the kernel:
//! * the defect-corrected equation `Delta u + 3/4 u (1 - u^4) = f_eps`;
//! * the normalization `Delta_{g2} u - 1/8 R2 u - 3/4 u^5 = 0` for a radial
//!   background `g2 = w^4 ds^2`;
//! * the prescribed-curvature solve `Delta w + 3/4 w + 1/8 R w^5 = 0`.
//!
//! Starting an undamped Newton iteration from a supersolution of any of these
//! concave problems descends monotonically onto the maximal solution, which
//! is the classical barrier iteration; the damped variant started elsewhere
//! must agree with it, and the pair is used as a cross-check.

use crate::error::{Error, Result};
use crate::family::{make_params, FamilyEvaluator, DEFAULT_NECK_GUARD, DEFAULT_TABLE_SIZE};
use crate::geometry::bump::smooth_step;
use crate::geometry::fit::linear_fit;
use crate::geometry::profile::RadialProfile;
use crate::gluing::GluedProfile;

/// Smooth cutoff for the defect: identically 1 on `[0, tau2 - eps)`, 0 on
/// `[tau2 - eps/2, inf)`.
#[derive(Debug, Clone, Copy)]
pub struct MollifierSpec {
    pub epsilon: f64,
    pub tau2: f64,
}

impl MollifierSpec {
    /// The cutoff needs its vanishing threshold `tau2 - eps/2` to stay
    /// positive, i.e. `0 < eps < 2 tau2`; for `eps >= tau2` the plateau
    /// `chi = 1` is empty but the construction is otherwise unchanged.
    pub fn new(epsilon: f64, tau2: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 2.0 * tau2) {
            return Err(Error::Domain(format!(
                "mollifier scale must satisfy 0 < eps < 2 tau2, got eps = {epsilon}, tau2 = {tau2}"
            )));
        }
        Ok(MollifierSpec { epsilon, tau2 })
    }

    pub fn cutoff(&self, rho: f64) -> f64 {
        smooth_step((self.tau2 - 0.5 * self.epsilon - rho) / (0.5 * self.epsilon))
    }
}

/// Defect of the glued profile, `f = Delta psi + 3/4 psi (1 - psi^4)`,
/// sampled on `grid`. Zero outside `B(tau2)`, strictly negative inside.
pub fn defect(gp: &GluedProfile, grid: &[f64]) -> Result<RadialProfile> {
    let values = grid
        .iter()
        .map(|&rho| {
            let psi = gp.value(rho)?;
            Ok(gp.laplacian(rho)? + 0.75 * psi * (1.0 - psi.powi(4)))
        })
        .collect::<Result<Vec<_>>>()?;
    RadialProfile::new(grid.to_vec(), values)
}

/// Multiplies the defect by the cutoff: `f_eps = f chi_eps >= f`.
pub fn mollify(f: &RadialProfile, spec: &MollifierSpec) -> Result<RadialProfile> {
    f.map_values(|rho, v| v * spec.cutoff(rho))
}

/// Outcome of a defect-corrected solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub phi_eps: RadialProfile,
    /// Sup norm of the discrete residual at the solution.
    pub residual_sup: f64,
    /// Fitted decay exponent of `psi - phi_eps` over the requested window.
    pub decay_rate: Option<f64>,
    /// Recovered mass parameter, filled by [`recover_mass_param`].
    pub m_eps: Option<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Undamped Newton from the supersolution; pointwise non-increasing.
    MonotoneFromSupersolution,
    /// Damped Newton from the flat subsolution.
    DampedNewton,
    /// Runs both and fails if they disagree beyond 1e-8.
    CrossValidated,
}

const NEWTON_TOL: f64 = 1e-12;
const METHOD_AGREEMENT: f64 = 1e-8;

struct SemilinearProblem<'a> {
    grid: &'a [f64],
    h: f64,
    lap_scale: Vec<f64>,
    drift: Vec<f64>,
    rhs: Vec<f64>,
    nonlin: Box<dyn Fn(usize, f64) -> (f64, f64) + 'a>,
    robin: f64,
}

impl<'a> SemilinearProblem<'a> {
    fn uniform_spacing(grid: &[f64]) -> Result<f64> {
        if grid.len() < 8 || grid[0] != 0.0 {
            return Err(Error::Grid(
                "solver grid must start at 0 with >= 8 nodes".into(),
            ));
        }
        let h = grid[1] - grid[0];
        for w in grid.windows(2) {
            if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
                return Err(Error::Grid("solver grid must be uniform".into()));
            }
        }
        Ok(h)
    }

    fn residual(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len() - 1;
        let h = self.h;
        let h2 = h * h;
        // Pole row: even extension, Delta u(0) = 3 u''(0).
        out[0] =
            self.lap_scale[0] * 6.0 * (u[1] - u[0]) / h2 + (self.nonlin)(0, u[0]).0 - self.rhs[0];
        for i in 1..n {
            let rho = self.grid[i];
            let c = 2.0 / rho.tanh() + self.drift[i];
            let lap =
                (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2 + c * (u[i + 1] - u[i - 1]) / (2.0 * h);
            out[i] = self.lap_scale[i] * lap + (self.nonlin)(i, u[i]).0 - self.rhs[i];
        }
        // Robin row via the ghost value u_{n+1} = u_{n-1} - 2 h robin (u_n - 1).
        let rho = self.grid[n];
        let c = 2.0 / rho.tanh() + self.drift[n];
        let du = -self.robin * (u[n] - 1.0);
        let lap = (2.0 * u[n - 1] - 2.0 * u[n] + 2.0 * h * du) / h2 + c * du;
        out[n] = self.lap_scale[n] * lap + (self.nonlin)(n, u[n]).0 - self.rhs[n];
    }

    fn jacobian(&self, u: &[f64], lower: &mut [f64], diag: &mut [f64], upper: &mut [f64]) {
        let n = u.len() - 1;
        let h = self.h;
        let h2 = h * h;
        diag[0] = -self.lap_scale[0] * 6.0 / h2 + (self.nonlin)(0, u[0]).1;
        upper[0] = self.lap_scale[0] * 6.0 / h2;
        for i in 1..n {
            let rho = self.grid[i];
            let c = 2.0 / rho.tanh() + self.drift[i];
            lower[i - 1] = self.lap_scale[i] * (1.0 / h2 - c / (2.0 * h));
            diag[i] = -self.lap_scale[i] * 2.0 / h2 + (self.nonlin)(i, u[i]).1;
            upper[i] = self.lap_scale[i] * (1.0 / h2 + c / (2.0 * h));
        }
        let rho = self.grid[n];
        let c = 2.0 / rho.tanh() + self.drift[n];
        lower[n - 1] = self.lap_scale[n] * 2.0 / h2;
        diag[n] = self.lap_scale[n] * (-2.0 / h2 - 2.0 * self.robin / h - c * self.robin)
            + (self.nonlin)(n, u[n]).1;
    }

    /// Roundoff floor of the discrete residual: a few ulps of the solution
    /// scale divided by h^2 is the best any iteration can reach.
    fn residual_floor(&self, u: &[f64]) -> f64 {
        let scale = u.iter().fold(1.0_f64, |a, &x| a.max(x.abs()));
        let lam = self.lap_scale.iter().fold(1.0_f64, |a, &x| a.max(x.abs()));
        NEWTON_TOL.max(16.0 * f64::EPSILON * lam * scale / (self.h * self.h))
    }

    /// Newton iteration; `damped` enables residual-decrease backtracking.
    fn newton(&self, start: Vec<f64>, damped: bool) -> Result<(Vec<f64>, usize)> {
        let n = start.len();
        let mut u = start;
        let mut res = vec![0.0; n];
        let mut res_try = vec![0.0; n];
        let mut lower = vec![0.0; n - 1];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n - 1];
        let mut history = Vec::new();

        self.residual(&u, &mut res);
        let mut norm = sup_norm(&res);
        for iter in 0..120 {
            if norm < self.residual_floor(&u) {
                return Ok((u, iter));
            }
            history.push(norm);
            self.jacobian(&u, &mut lower, &mut diag, &mut upper);
            let delta = thomas_solve(&lower, &diag, &upper, &res);
            let mut lambda = 1.0;
            loop {
                let trial: Vec<f64> = u
                    .iter()
                    .zip(&delta)
                    .map(|(&x, &d)| x - lambda * d)
                    .collect();
                self.residual(&trial, &mut res_try);
                let trial_norm = sup_norm(&res_try);
                if !damped || trial_norm < norm || lambda < 1.0 / 256.0 {
                    if damped && trial_norm >= norm && lambda < 1.0 / 256.0 {
                        // Line search exhausted: either we sit on the
                        // roundoff floor or the iteration genuinely stalled.
                        if norm < 100.0 * self.residual_floor(&u) {
                            return Ok((u, iter));
                        }
                        return Err(Error::Convergence {
                            iterations: iter,
                            residual: norm,
                            history,
                        });
                    }
                    u = trial;
                    std::mem::swap(&mut res, &mut res_try);
                    norm = trial_norm;
                    break;
                }
                lambda *= 0.5;
            }
        }
        Err(Error::Convergence {
            iterations: 120,
            residual: norm,
            history,
        })
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |a, &x| a.max(x.abs()))
}

fn thomas_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i - 1] * c[i - 1];
        if i < n - 1 {
            c[i] = upper[i] / m;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / m;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    x
}

fn flat_problem<'a>(grid: &'a [f64], f_eps: &'a [f64]) -> Result<SemilinearProblem<'a>> {
    let h = SemilinearProblem::uniform_spacing(grid)?;
    Ok(SemilinearProblem {
        grid,
        h,
        lap_scale: vec![1.0; grid.len()],
        drift: vec![0.0; grid.len()],
        rhs: f_eps.to_vec(),
        nonlin: Box::new(|_, u| (0.75 * u * (1.0 - u.powi(4)), 0.75 * (1.0 - 5.0 * u.powi(4)))),
        robin: 3.0,
    })
}

/// Solves `Delta phi + 3/4 phi (1 - phi^4) = f_eps` with `phi'(0) = 0` and
/// `phi'(L) = -3 (phi(L) - 1)`. `f_eps` and `psi` must share one uniform grid
/// over `[0, L]`; `psi` is the supersolution and upper barrier.
pub fn solve_bvp(
    f_eps: &RadialProfile,
    psi: &RadialProfile,
    method: SolveMethod,
    fit_window: Option<(f64, f64)>,
) -> Result<SolveResult> {
    if f_eps.grid() != psi.grid() {
        return Err(Error::Grid("f_eps and psi must share a grid".into()));
    }
    if f_eps.values().iter().any(|&v| v > 1e-12) {
        return Err(Error::Precondition("f_eps must be nonpositive".into()));
    }
    let grid = f_eps.grid();
    let problem = flat_problem(grid, f_eps.values())?;

    let strict_expected = f_eps.values().iter().any(|&v| v < -1e-12);
    let run_monotone = || -> Result<(Vec<f64>, usize)> {
        let (u, it) = problem.newton(psi.values().to_vec(), false)?;
        Ok((u, it))
    };
    let run_newton = || -> Result<(Vec<f64>, usize)> {
        let (u, it) = problem.newton(vec![1.0; grid.len()], true)?;
        Ok((u, it))
    };

    let (solution, iterations) = match method {
        SolveMethod::MonotoneFromSupersolution => run_monotone()?,
        SolveMethod::DampedNewton => run_newton()?,
        SolveMethod::CrossValidated => {
            let (a, it_a) = run_monotone()?;
            let (b, it_b) = run_newton()?;
            let gap = a
                .iter()
                .zip(&b)
                .fold(0.0_f64, |m, (&x, &y)| m.max((x - y).abs()));
            if gap > METHOD_AGREEMENT {
                return Err(Error::Consistency(format!(
                    "monotone and Newton solutions disagree by {gap:.3e}"
                )));
            }
            (b, it_a.max(it_b))
        }
    };

    // Sandwich: 1 <= phi <= psi, strict at interior nodes when the source is
    // not identically zero.
    for (i, (&phi, &sup)) in solution.iter().zip(psi.values()).enumerate() {
        let interior = i > 0 && i + 1 < solution.len();
        if phi < 1.0 - 1e-12 || phi > sup + 1e-12 {
            return Err(Error::Monotonicity(format!(
                "solution escaped the barrier interval at node {i}: {phi}"
            )));
        }
        if strict_expected && interior && (phi <= 1.0 || phi >= sup) {
            return Err(Error::Monotonicity(format!(
                "sandwich not strict at node {i}: 1 < {phi} < {sup} fails"
            )));
        }
    }

    let mut res = vec![0.0; solution.len()];
    problem.residual(&solution, &mut res);
    let residual_sup = sup_norm(&res);

    let decay_rate = fit_window.and_then(|(lo, hi)| {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (i, &rho) in grid.iter().enumerate() {
            if rho >= lo && rho <= hi {
                let gap = psi.values()[i] - solution[i];
                if gap > 0.0 {
                    xs.push(rho);
                    ys.push(gap.ln());
                }
            }
        }
        (xs.len() >= 4).then(|| linear_fit(&xs, &ys).0)
    });

    Ok(SolveResult {
        phi_eps: RadialProfile::new(grid.to_vec(), solution)?,
        residual_sup,
        decay_rate,
        m_eps: None,
        iterations,
    })
}

/// Iterate list of the monotone run, for monotonicity diagnostics.
pub fn monotone_iterates(
    f_eps: &RadialProfile,
    psi: &RadialProfile,
    count: usize,
) -> Result<Vec<Vec<f64>>> {
    let grid = f_eps.grid();
    let problem = flat_problem(grid, f_eps.values())?;
    let mut out = vec![psi.values().to_vec()];
    let n = grid.len();
    let mut res = vec![0.0; n];
    let mut lower = vec![0.0; n - 1];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n - 1];
    for _ in 0..count {
        let u = out.last().unwrap().clone();
        problem.residual(&u, &mut res);
        if sup_norm(&res) < problem.residual_floor(&u) {
            break;
        }
        problem.jacobian(&u, &mut lower, &mut diag, &mut upper);
        let delta = thomas_solve(&lower, &diag, &upper, &res);
        out.push(u.iter().zip(&delta).map(|(&x, &d)| x - d).collect());
    }
    Ok(out)
}

/// Result of matching a solved factor against the model family.
#[derive(Debug, Clone, Copy)]
pub struct MassRecovery {
    pub m_eps: f64,
    /// Sup deviation from the matched family member over the window.
    pub deviation: f64,
}

pub const MATCHING_THRESHOLD: f64 = 1e-5;

/// Recovers the mass parameter of the family member a solved factor
/// approaches at infinity, by monotone bisection over the family ordering on
/// a matching window. Fails if the best sup deviation exceeds 1e-5.
pub fn recover_mass_param(
    phi_eps: &RadialProfile,
    window: (f64, f64),
    bracket: (f64, f64),
) -> Result<MassRecovery> {
    let (lo_rho, hi_rho) = window;
    let nodes: Vec<(f64, f64)> = phi_eps
        .grid()
        .iter()
        .zip(phi_eps.values())
        .filter(|(&rho, _)| rho >= lo_rho && rho <= hi_rho)
        .map(|(&rho, &v)| (rho, v))
        .collect();
    if nodes.len() < 8 {
        return Err(Error::Domain(format!(
            "matching window [{lo_rho}, {hi_rho}] holds fewer than 8 grid nodes"
        )));
    }
    // Exponential weights level out the e^{-3 rho} decay of the signal.
    let weights: Vec<f64> = nodes
        .iter()
        .map(|(rho, _)| (3.0 * (rho - lo_rho)).exp())
        .collect();
    let wsum: f64 = weights.iter().sum();

    let evaluator_for = |m: f64| -> Result<FamilyEvaluator> {
        FamilyEvaluator::with_options(
            make_params(m)?,
            hi_rho + 2.0,
            DEFAULT_TABLE_SIZE,
            DEFAULT_NECK_GUARD,
        )
    };
    let signed_gap = |m: f64| -> Result<f64> {
        let ev = evaluator_for(m)?;
        let mut acc = 0.0;
        for ((rho, v), w) in nodes.iter().zip(&weights) {
            acc += w * (ev.phi(*rho, 0)? - v);
        }
        Ok(acc / wsum)
    };

    let (mut lo, mut hi) = bracket;
    let g_lo = signed_gap(lo)?;
    let g_hi = signed_gap(hi)?;
    if g_lo > 0.0 || g_hi < 0.0 {
        return Err(Error::Bracket {
            what: "family gap".into(),
            lo,
            hi,
        });
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if signed_gap(mid)? <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-11 * hi.max(1.0) {
            break;
        }
    }
    let m_eps = 0.5 * (lo + hi);
    let ev = evaluator_for(m_eps)?;
    let mut deviation = 0.0_f64;
    for (rho, v) in &nodes {
        deviation = deviation.max((ev.phi(*rho, 0)? - v).abs());
    }
    if deviation > MATCHING_THRESHOLD {
        return Err(Error::MatchingFailure {
            deviation,
            threshold: MATCHING_THRESHOLD,
        });
    }
    Ok(MassRecovery { m_eps, deviation })
}

/// Solves the normalization problem
/// `Delta_{g2} u - 1/8 R2 u - 3/4 u^5 = 0` on the radial background
/// `g2 = w^4 ds^2`, with `u -> 1` enforced by the Robin closure. Returns a
/// factor with `1 <= u <= max(-R2/6)^{1/4}`.
pub fn yamabe_normalize(r2: &RadialProfile, base: &RadialProfile) -> Result<RadialProfile> {
    if r2.grid() != base.grid() {
        return Err(Error::Grid(
            "curvature and base factor must share a grid".into(),
        ));
    }
    let grid = r2.grid();
    for (&rho, &r) in grid.iter().zip(r2.values()) {
        if r > -6.0 + 1e-8 {
            return Err(Error::Precondition(format!(
                "R2({rho}) = {r} violates R2 <= -6"
            )));
        }
    }
    let h = SemilinearProblem::uniform_spacing(grid)?;
    let n = grid.len();
    let mut lap_scale = Vec::with_capacity(n);
    let mut drift = Vec::with_capacity(n);
    for &rho in grid {
        let w = base.value(rho)?;
        lap_scale.push(w.powi(-4));
        drift.push(2.0 * base.d1(rho)? / w);
    }
    let r2v = r2.values().to_vec();
    let problem = SemilinearProblem {
        grid,
        h,
        lap_scale,
        drift,
        rhs: vec![0.0; n],
        nonlin: Box::new(move |i, u| {
            (
                -0.125 * r2v[i] * u - 0.75 * u.powi(5),
                -0.125 * r2v[i] - 3.75 * u.powi(4),
            )
        }),
        robin: 3.0,
    };
    let sup = r2
        .values()
        .iter()
        .fold(1.0_f64, |m, &r| m.max((-r / 6.0).powf(0.25)));
    let (u, _) = problem.newton(vec![sup; n], false)?;
    for (&rho, &v) in grid.iter().zip(&u) {
        if v < 1.0 - 1e-10 || v > sup + 1e-10 {
            return Err(Error::Monotonicity(format!(
                "normalized factor escaped [1, {sup}] at rho = {rho}: {v}"
            )));
        }
    }
    RadialProfile::new(grid.to_vec(), u)
}

/// Deforms a factor so its scalar curvature drops by a prescribed compactly
/// supported dip: solves
/// `Delta w + 3/4 w (1 - w^4) = (dip/8) w^5`,
/// whose solution satisfies `R(w^4 ds^2) = -6 - dip(rho)` identically while
/// keeping the asymptotics of the starting factor (the dip is compact and
/// the Robin closure pins the decay). Newton starts from `start`.
pub fn lower_curvature(start: &RadialProfile, dip: &RadialProfile) -> Result<RadialProfile> {
    if start.grid() != dip.grid() {
        return Err(Error::Grid("factor and dip must share a grid".into()));
    }
    if dip.values().iter().any(|&d| d < 0.0) {
        return Err(Error::Precondition(
            "curvature dip must be nonnegative".into(),
        ));
    }
    let grid = start.grid();
    let h = SemilinearProblem::uniform_spacing(grid)?;
    let n = grid.len();
    let dip_v = dip.values().to_vec();
    let problem = SemilinearProblem {
        grid,
        h,
        lap_scale: vec![1.0; n],
        drift: vec![0.0; n],
        rhs: vec![0.0; n],
        nonlin: Box::new(move |i, w| {
            (
                0.75 * w * (1.0 - w.powi(4)) - 0.125 * dip_v[i] * w.powi(5),
                0.75 * (1.0 - 5.0 * w.powi(4)) - 0.625 * dip_v[i] * w.powi(4),
            )
        }),
        robin: 3.0,
    };
    let (w, _) = problem.newton(start.values().to_vec(), true)?;
    for (&rho, &v) in grid.iter().zip(&w) {
        if v <= 0.0 {
            return Err(Error::Monotonicity(format!(
                "deformed factor lost positivity at rho = {rho}"
            )));
        }
    }
    RadialProfile::new(grid.to_vec(), w)
}

/// Solves `Delta w + 3/4 w + 1/8 R w^5 = 0` for the radial factor whose
/// metric `w^4 ds^2` has the prescribed scalar curvature `R <= -6`; the
/// result satisfies `0 < w <= 1`.
pub fn prescribe_curvature(r_target: &RadialProfile) -> Result<RadialProfile> {
    let grid = r_target.grid();
    for (&rho, &r) in grid.iter().zip(r_target.values()) {
        if r > -6.0 + 1e-8 {
            return Err(Error::Precondition(format!(
                "target curvature {r} at rho = {rho} violates R <= -6"
            )));
        }
    }
    let h = SemilinearProblem::uniform_spacing(grid)?;
    let n = grid.len();
    let rv = r_target.values().to_vec();
    let problem = SemilinearProblem {
        grid,
        h,
        lap_scale: vec![1.0; n],
        drift: vec![0.0; n],
        rhs: vec![0.0; n],
        nonlin: Box::new(move |i, w| {
            (
                0.75 * w + 0.125 * rv[i] * w.powi(5),
                0.75 + 0.625 * rv[i] * w.powi(4),
            )
        }),
        robin: 3.0,
    };
    let (w, _) = problem.newton(vec![1.0; n], false)?;
    for (&rho, &v) in grid.iter().zip(&w) {
        if !(v > 0.0 && v <= 1.0 + 1e-10) {
            return Err(Error::Monotonicity(format!(
                "prescribed factor escaped (0, 1] at rho = {rho}: {v}"
            )));
        }
    }
    RadialProfile::new(grid.to_vec(), w)
}

/// Envelope data for the comparison principle between two factors with equal
/// defects outside `B(rho_star)`.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonCheck {
    pub max_gap: f64,
    /// Fitted constant in `gap(rho) <= C sup_gap(rho*) xi(rho)/xi(rho*)` with
    /// `xi = e^{-2 rho}/sinh(rho)`.
    pub envelope_constant: f64,
}

/// Checks `u1 >= u2` outside `B(rho_star)` and fits the decay envelope.
pub fn comparison_check(
    u1: &RadialProfile,
    u2: &RadialProfile,
    rho_star: f64,
) -> Result<ComparisonCheck> {
    if u1.grid() != u2.grid() {
        return Err(Error::Grid("comparison inputs must share a grid".into()));
    }
    let xi = |rho: f64| (-2.0 * rho).exp() / rho.sinh();
    let mut boundary_gap = None;
    let mut max_gap = 0.0_f64;
    let mut envelope = 0.0_f64;
    for (&rho, (&a, &b)) in u1.grid().iter().zip(u1.values().iter().zip(u2.values())) {
        if rho < rho_star {
            continue;
        }
        if a < 1.0 - 1e-12 || b < 1.0 - 1e-12 {
            return Err(Error::Precondition(format!(
                "comparison inputs must stay >= 1, failed at rho = {rho}"
            )));
        }
        let gap = a - b;
        if boundary_gap.is_none() {
            if gap < -1e-14 {
                return Err(Error::Precondition("u1 < u2 on the inner sphere".into()));
            }
            boundary_gap = Some(gap.max(0.0));
            continue;
        }
        if gap < -1e-12 {
            return Err(Error::Consistency(format!(
                "ordering violated at rho = {rho}: gap = {gap:e}"
            )));
        }
        max_gap = max_gap.max(gap);
        let bg = boundary_gap.unwrap();
        if bg > 0.0 {
            envelope = envelope.max(gap * xi(rho_star) / (bg * xi(rho)));
        }
    }
    if boundary_gap.is_none() {
        return Err(Error::Domain("no grid nodes at or beyond rho_star".into()));
    }
    Ok(ComparisonCheck {
        max_gap,
        envelope_constant: envelope,
    })
}
