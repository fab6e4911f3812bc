//! The anti-de Sitter-Schwarzschild family of conformal factors.
//!
//! For a mass parameter `M > 0` the metric
//! `dr^2/(1 + r^2 - M/r) + r^2 dsigma^2` on `r > a(M)` (with `a(M)` the
//! positive root of `1 + r^2 - M/r = 0`), doubled across its neck, is
//! conformally hyperbolic: `g = phi_M^4 (d rho^2 + sinh^2 rho d sigma^2)`.
//! The outer chart uses the radial clock
//! `h(r) = int_r^inf dt / sqrt(t (t + t^3 - M))` and the relations
//! `sinh h(r) = 1 / sinh rho`, `phi^2 = r / sinh rho`; the inner chart is the
//! inversion extension across the neck in the ball model.

use crate::error::{Error, Result};
use crate::geometry::chart::{rho_of_tau, tau_of_rho};
use crate::geometry::fit::linear_fit;
use crate::geometry::profile::RadialProfile;
use crate::geometry::quad::quad_sqrt_lower_tol;
use crate::geometry::roots::find_root_monotone;

/// Derived constants of the family member with mass parameter `M`.
#[derive(Debug, Clone, Copy)]
pub struct AdSSchwParams {
    /// Mass parameter.
    pub m: f64,
    /// Neck area-radius: the positive root of `r + r^3 = M`.
    pub a: f64,
    /// `h(a(M))`, the total radial clock from the neck to infinity.
    pub h_a: f64,
    /// Neck position in hyperbolic distance, `rho(M) = log coth(h(a)/2)`.
    pub rho_m: f64,
    /// Ball radius of the neck, `b(M) = tanh(rho(M)/2)`.
    pub b: f64,
    /// Inner singular radius, `rho_0(M) = log((1+b^2)/(1-b^2))`.
    pub rho0: f64,
}

/// Quadratic cofactor in `t + t^3 - M = (t - a)(t^2 + a t + 1 + a^2)`.
fn cofactor(a: f64, t: f64) -> f64 {
    t * t + a * t + 1.0 + a * a
}

fn h_integral(a: f64, r: f64) -> Result<f64> {
    // Integrand 1/sqrt(t (t-a) cofactor); the sqrt substitution removes the
    // (t-a)^{-1/2} endpoint factor so r = a is admissible.
    let g = move |t: f64| 1.0 / (t * cofactor(a, t)).sqrt();
    match quad_sqrt_lower_tol(g, a, r, f64::INFINITY, 0.0, 5e-14) {
        Ok(q) => Ok(q.value),
        Err(Error::QuadratureFailure { .. }) => {
            Ok(quad_sqrt_lower_tol(g, a, r, f64::INFINITY, 0.0, 5e-13)?.value)
        }
        Err(e) => Err(e),
    }
}

/// Builds the derived constants for mass parameter `M > 0`.
pub fn make_params(m: f64) -> Result<AdSSchwParams> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!(
            "mass parameter must be positive, got {m}"
        )));
    }
    let hi = m.max(m.cbrt()) + 1.0;
    let mut a = find_root_monotone(|r| r + r * r * r - m, 0.0, hi, 1e-15 * hi)?;
    for _ in 0..3 {
        a -= (a + a * a * a - m) / (1.0 + 3.0 * a * a);
    }
    if (a + a * a * a - m).abs() > 1e-12 * (1.0 + m) {
        return Err(Error::Consistency(format!(
            "neck radius residual too large at M={m}"
        )));
    }
    let h_a = h_integral(a, a)?;
    let rho_m = (1.0 / h_a.sinh()).asinh();
    let b = (rho_m / 2.0).tanh();
    let rho0 = 2.0 * (b * b).atanh();
    let p = AdSSchwParams {
        m,
        a,
        h_a,
        rho_m,
        b,
        rho0,
    };
    if !(p.rho0 > 0.0 && p.rho0 < p.rho_m && p.b > 0.0 && p.b < 1.0) {
        return Err(Error::Consistency(format!(
            "parameter ordering failed: {p:?}"
        )));
    }
    Ok(p)
}

/// Radial clock `h(r)` for `r >= a(M)`; strictly decreasing, `h -> 0` at
/// infinity.
pub fn h_of_r(params: &AdSSchwParams, r: f64) -> Result<f64> {
    if r < params.a {
        return Err(Error::Domain(format!(
            "r = {r} below the neck radius a = {}",
            params.a
        )));
    }
    h_integral(params.a, r)
}

#[derive(Debug, Clone, Copy)]
pub struct HorizonRadii {
    /// Inner `H = -2` sphere.
    pub rho2_prime: f64,
    /// Minimal sphere (the neck).
    pub rho1: f64,
    /// Outer `H = +2` sphere.
    pub rho2: f64,
}

/// Gap report for two family members on a shared grid.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub min_gap: f64,
    pub max_gap: f64,
    /// Least-squares slope of `log(gap)` against `rho` over the grid.
    pub log_gap_slope: f64,
}

/// Evaluator for one family member: caches the monotone `rho <-> r` table on
/// the outer chart and serves `phi` and level-sphere mean curvatures on both
/// charts. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FamilyEvaluator {
    params: AdSSchwParams,
    /// `r(rho)` on the outer chart, `rho in [rho_m, rho_max]`.
    r_table: RadialProfile,
    rho_max: f64,
    /// Public evaluations inside `(rho0, rho0 + guard)` are rejected.
    guard: f64,
}

pub const DEFAULT_RHO_MAX: f64 = 20.0;
pub const DEFAULT_TABLE_SIZE: usize = 3000;
pub const DEFAULT_NECK_GUARD: f64 = 0.01;

impl FamilyEvaluator {
    pub fn new(params: AdSSchwParams) -> Result<Self> {
        Self::with_options(
            params,
            DEFAULT_RHO_MAX,
            DEFAULT_TABLE_SIZE,
            DEFAULT_NECK_GUARD,
        )
    }

    pub fn with_options(
        params: AdSSchwParams,
        rho_max: f64,
        table_size: usize,
        guard: f64,
    ) -> Result<Self> {
        if rho_max <= params.rho_m + 0.5 {
            return Err(Error::Domain(format!("rho_max = {rho_max} too small")));
        }
        if table_size < 64 {
            return Err(Error::Domain("table size must be at least 64".into()));
        }
        // Choose r_max so the table covers rho_max: r = phi^2 sinh(rho) with
        // phi -> 1, so a modest multiple of sinh(rho_max) suffices; grow it if
        // the clock says otherwise.
        let mut r_max = (params.a + 2.0 * rho_max.sinh()).max(4.0 * params.a);
        loop {
            let h = h_integral(params.a, r_max)?;
            if (1.0 / h.sinh()).asinh() > rho_max {
                break;
            }
            r_max *= 2.0;
        }

        // March outward from the neck with smoothly graded target spacing in
        // rho (fine near the neck where r - a ~ (rho - rho_m)^2, coarser
        // outside). The clock values accumulate one machine-exact Gauss panel
        // per step in the substituted variable s = sqrt(r - a): a cumulative
        // ladder leaves only a smooth drift on the node sequence, which
        // later differentiation of the table does not amplify, unlike
        // independent per-node quadrature noise. Smooth spacing also keeps
        // the local quintic windows well conditioned right at the neck.
        let base_step = 8.0 / table_size as f64;
        let target_step =
            |rho: f64| -> f64 { (1e-5 + (rho - params.rho_m) * 0.006).min(base_step) };
        let a = params.a;
        let s_integrand = move |s: f64| {
            let t = a + s * s;
            2.0 / (t * cofactor(a, t)).sqrt()
        };
        // Composite panel count resolving the sqrt(a + s^2) structure of the
        // substituted integrand (small masses have a sharp knee at s ~ a^1/2).
        let strip = move |s0: f64, s1: f64| -> f64 {
            let mid = 0.5 * (s0 + s1);
            let scale = (a + mid * mid).sqrt();
            let panels = (6.0 * (s1 - s0) / scale).ceil().clamp(2.0, 512.0) as usize;
            crate::geometry::quad::gl_fixed(s_integrand, s0, s1, panels)
        };

        // Pass 1: choose the radial nodes, grading steps with a provisional
        // forward clock (only the step sizes depend on it).
        let k_neck = (a * cofactor(a, a)).sqrt() / params.rho_m.sinh();
        let mut r_nodes = vec![a];
        let mut h = params.h_a;
        let mut s = 0.0_f64;
        // First step off the neck from the quadratic law r - a = (K d/2)^2.
        let mut r = a + (0.5 * k_neck * 1e-5).powi(2);
        loop {
            let s_new = (r - a).sqrt();
            h -= strip(s, s_new);
            s = s_new;
            if h <= 0.0 {
                return Err(Error::Consistency("clock ladder ran past infinity".into()));
            }
            r_nodes.push(r);
            let rho = (1.0 / h.sinh()).asinh();
            if rho >= rho_max + 0.05 || r >= r_max {
                break;
            }
            let slope = (r * (r - a) * cofactor(a, r)).sqrt() / rho.sinh();
            let step = target_step(rho);
            // Midpoint-corrected radial increment for the requested spacing.
            let r_mid = r + 0.5 * slope * step;
            let slope_mid =
                (r_mid * (r_mid - a) * cofactor(a, r_mid)).sqrt() / (rho + 0.5 * step).sinh();
            r += slope_mid * step;
        }

        // Pass 2: anchor the clock at the outermost node by direct
        // quadrature, then accumulate the machine-exact strips inward. The
        // relative accuracy of every h value stays near rounding, and the
        // accumulated drift is smooth along the node sequence, so later
        // differentiation of the table does not amplify it.
        let n = r_nodes.len();
        let mut h_vals = vec![0.0; n];
        h_vals[n - 1] = h_integral(a, r_nodes[n - 1])?;
        for j in (0..n - 1).rev() {
            let s0 = (r_nodes[j] - a).sqrt();
            let s1 = (r_nodes[j + 1] - a).sqrt();
            h_vals[j] = h_vals[j + 1] + strip(s0, s1);
        }
        if (h_vals[0] - params.h_a).abs() > 1e-10 * params.h_a {
            return Err(Error::Consistency(format!(
                "clock ladder drifted: {} vs {} at the neck",
                h_vals[0], params.h_a
            )));
        }
        let mut rho_nodes = Vec::with_capacity(n);
        let mut rs = Vec::with_capacity(n);
        for (j, &rv) in r_nodes.iter().enumerate() {
            let rho = if j == 0 {
                params.rho_m
            } else {
                (1.0 / h_vals[j].sinh()).asinh()
            };
            if rho_nodes.last().is_none_or(|&last| rho > last) {
                rho_nodes.push(rho);
                rs.push(rv);
            }
        }
        if *rho_nodes.last().unwrap() < rho_max {
            return Err(Error::Consistency(
                "family table failed to reach rho_max".into(),
            ));
        }
        let r_table = RadialProfile::new(rho_nodes, rs)?;
        Ok(FamilyEvaluator {
            params,
            r_table,
            rho_max,
            guard,
        })
    }

    /// Disables the guard band above `rho0` (evaluations still must satisfy
    /// `rho > rho0` strictly).
    pub fn allow_near_singularity(mut self) -> Self {
        self.guard = 0.0;
        self
    }

    pub fn params(&self) -> &AdSSchwParams {
        &self.params
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// Lowest admissible evaluation point.
    pub fn rho_min(&self) -> f64 {
        self.params.rho0 + self.guard
    }

    fn check_domain(&self, rho: f64) -> Result<()> {
        if !(rho > self.params.rho0) {
            return Err(Error::Domain(format!(
                "phi is undefined for rho <= rho0 = {} (got {rho})",
                self.params.rho0
            )));
        }
        if rho < self.params.rho0 + self.guard {
            return Err(Error::Domain(format!(
                "rho = {rho} inside the guard band (rho0, rho0 + {}); \
                 use allow_near_singularity to evaluate here",
                self.guard
            )));
        }
        if rho > self.rho_max {
            return Err(Error::Range(format!(
                "rho = {rho} beyond the tabulated range {}",
                self.rho_max
            )));
        }
        Ok(())
    }

    /// Area radius on the outer chart.
    pub fn r_of_rho(&self, rho: f64) -> Result<f64> {
        if rho < self.params.rho_m {
            return Err(Error::Domain(format!(
                "outer chart starts at rho(M) = {}, got {rho}",
                self.params.rho_m
            )));
        }
        self.r_table.value(rho)
    }

    /// Inverse of [`Self::r_of_rho`] by root finding on the cached table.
    pub fn rho_of_r(&self, r: f64) -> Result<f64> {
        let table = &self.r_table;
        if r < self.params.a || r > *table.values().last().unwrap() {
            return Err(Error::Range(format!("area radius {r} outside table")));
        }
        find_root_monotone(
            |rho| table.value(rho).unwrap() - r,
            table.min_rho(),
            table.max_rho(),
            1e-13,
        )
    }

    /// Slow reference evaluation of `phi(rho)` on the outer chart that
    /// bypasses the table (root-finds the clock relation directly).
    pub fn phi_direct(&self, rho: f64) -> Result<f64> {
        let p = &self.params;
        if rho < p.rho_m {
            return Err(Error::Domain(
                "direct evaluation is outer-chart only".into(),
            ));
        }
        let target = (1.0 / rho.sinh()).asinh();
        let r_hi = *self.r_table.values().last().unwrap();
        let r_guess = self.r_table.value(rho)?;
        let r = find_root_monotone(
            |r| h_integral(p.a, r).unwrap() - target,
            p.a.max(0.5 * r_guess),
            r_hi.min(2.0 * r_guess + 1.0),
            1e-13 * r_guess.max(1.0),
        )?;
        Ok((r / rho.sinh()).sqrt())
    }

    /// Reflection across the neck in the ball model: `tau -> b^2 / tau`.
    pub fn reflect_rho(&self, rho: f64) -> f64 {
        rho_of_tau(self.params.b * self.params.b / tau_of_rho(rho))
    }

    /// `phi` and its first two `rho`-derivatives on the outer chart.
    fn phi_outer(&self, rho: f64) -> Result<[f64; 3]> {
        let p = &self.params;
        let r = self.r_table.value(rho)?;
        let sh = rho.sinh();
        let s_h = 1.0 / sh; // sinh h
        let c_h = rho.cosh() / sh; // cosh h
        let phi = (r * s_h).sqrt();
        // s = 1/h_r = -sqrt(r (r - a) cofactor), zero at the neck.
        let s = -(r * (r - p.a).max(0.0) * cofactor(p.a, r)).sqrt();
        let d1 = -0.5 * (s_h * s_h * s + r * s_h * c_h) / phi;
        let u2 = 0.5 * (2.0 * r + 4.0 * r * r * r - p.m);
        let d2 = -d1 * d1 / phi
            + 0.5
                * (3.0 * c_h * s_h * s_h * s
                    + u2 * s_h * s_h * s_h
                    + r * s_h * (c_h * c_h + s_h * s_h))
                / phi;
        Ok([phi, d1, d2])
    }

    /// `psi(tau') = phi(rho(tau'))` and derivatives in `tau'`, outer chart.
    fn psi_tau(&self, tau_p: f64) -> Result<[f64; 3]> {
        let rho_p = rho_of_tau(tau_p);
        let [f, f1, f2] = self.phi_outer(rho_p)?;
        let d_rho = 2.0 / (1.0 - tau_p * tau_p);
        let d2_rho = 4.0 * tau_p / ((1.0 - tau_p * tau_p) * (1.0 - tau_p * tau_p));
        Ok([f, f1 * d_rho, f2 * d_rho * d_rho + f1 * d2_rho])
    }

    /// Inversion extension on the inner chart `(rho0, rho_m)` and its first
    /// two `rho`-derivatives, by the chain rule through the extension
    /// formula `b psi(b^2/tau) sqrt((1 - tau^2)/(tau^2 - b^4))`.
    fn phi_inner(&self, rho: f64) -> Result<[f64; 3]> {
        let p = &self.params;
        let b = p.b;
        let b2 = b * b;
        let tau = tau_of_rho(rho);
        let y = tau * tau - b2 * b2;
        if y <= 0.0 {
            return Err(Error::Domain(format!("rho = {rho} at or below rho0")));
        }
        let tau_p = b2 / tau;
        let [psi, psi1, psi2] = self.psi_tau(tau_p)?;

        let one_m = 1.0 - tau * tau;
        let w = (one_m / y).sqrt();
        // Logarithmic derivatives of w.
        let g1 = -tau * (1.0 / one_m + 1.0 / y);
        let g1p =
            -(1.0 / one_m + 1.0 / y) - tau * (2.0 * tau / (one_m * one_m) - 2.0 * tau / (y * y));

        let dtp = -b2 / (tau * tau);
        let d2tp = 2.0 * b2 / (tau * tau * tau);

        let f = b * psi * w;
        let f_tau = b * w * (psi1 * dtp + psi * g1);
        let f_tautau = b
            * w
            * (g1 * (psi1 * dtp + psi * g1)
                + psi2 * dtp * dtp
                + psi1 * d2tp
                + psi1 * dtp * g1
                + psi * g1p);

        let dt = 0.5 * one_m; // d tau / d rho
        let d2t = -tau * dt; // d^2 tau / d rho^2
        Ok([f, f_tau * dt, f_tautau * dt * dt + f_tau * d2t])
    }

    fn phi_all(&self, rho: f64) -> Result<[f64; 3]> {
        if rho >= self.params.rho_m {
            self.phi_outer(rho)
        } else {
            self.phi_inner(rho)
        }
    }

    /// The conformal factor (order 0) or its `rho`-derivatives (orders 1, 2).
    pub fn phi(&self, rho: f64, order: usize) -> Result<f64> {
        if order > 2 {
            return Err(Error::Domain(format!("derivative order {order} > 2")));
        }
        self.check_domain(rho)?;
        Ok(self.phi_all(rho)?[order])
    }

    /// Hyperbolic Laplacian of `phi` at `rho`.
    pub fn phi_laplacian(&self, rho: f64) -> Result<f64> {
        self.check_domain(rho)?;
        let [_, d1, d2] = self.phi_all(rho)?;
        Ok(d2 + 2.0 / rho.tanh() * d1)
    }

    /// Mean curvature of the level sphere at `rho`, outward normal along
    /// `+d/d rho`. Zero exactly at the neck; negative on the inner chart
    /// (the reflected closed form with flipped sign).
    pub fn mean_curvature_level(&self, rho: f64) -> Result<f64> {
        self.check_domain(rho)?;
        let p = &self.params;
        if rho >= p.rho_m {
            Ok(Self::h_closed_form(p, self.r_table.value(rho)?))
        } else {
            let r = self.r_table.value(self.reflect_rho(rho))?;
            Ok(-Self::h_closed_form(p, r))
        }
    }

    /// `H(r) = 2 sqrt(1 + r^{-2} - M r^{-3})` in the factored form
    /// `2 sqrt((r - a) cofactor / r^3)`, exact zero at `r = a`.
    pub fn h_closed_form(p: &AdSSchwParams, r: f64) -> f64 {
        2.0 * ((r - p.a).max(0.0) * cofactor(p.a, r) / (r * r * r)).sqrt()
    }

    /// The three horizon spheres: `H = -2` (inner), `0` (neck), `+2` (outer).
    pub fn horizon_radii(&self) -> Result<HorizonRadii> {
        let p = &self.params;
        let rho1 = p.rho_m;
        // H = +2 on the outer chart happens exactly at area radius M.
        let rho2 = self.rho_of_r(p.m)?;
        let rho2_prime = self.reflect_rho(rho2);
        let radii = HorizonRadii {
            rho2_prime,
            rho1,
            rho2,
        };
        for (rho, target) in [(rho1, 0.0), (rho2, 2.0), (rho2_prime, -2.0)] {
            let h = if rho >= p.rho0 + self.guard {
                self.mean_curvature_level(rho)?
            } else {
                // The inner horizon of a small-mass member may sit inside the
                // default guard band; verify it unguarded.
                -Self::h_closed_form(p, self.r_table.value(self.reflect_rho(rho))?)
            };
            if (h - target).abs() > 1e-10 {
                return Err(Error::Consistency(format!(
                    "horizon residual |H({rho}) - {target}| = {:e}",
                    (h - target).abs()
                )));
            }
        }
        if !(radii.rho2 > radii.rho1 && radii.rho1 > radii.rho2_prime && radii.rho2_prime > p.rho0)
        {
            return Err(Error::Consistency(format!(
                "horizon ordering failed: {radii:?}"
            )));
        }
        Ok(radii)
    }

    /// Samples `phi` on a grid as a [`RadialProfile`].
    pub fn sample_profile(&self, grid: Vec<f64>) -> Result<RadialProfile> {
        let values = grid
            .iter()
            .map(|&rho| self.phi(rho, 0))
            .collect::<Result<Vec<_>>>()?;
        RadialProfile::new(grid, values)
    }
}

/// Verifies the pointwise ordering `phi_{M1} > phi_{M2}` (for `M1 > M2`) on a
/// shared grid and reports the gap range and its fitted exponential decay
/// rate.
pub fn compare_family(
    bigger: &FamilyEvaluator,
    smaller: &FamilyEvaluator,
    grid: &[f64],
) -> Result<ComparisonReport> {
    if bigger.params().m < smaller.params().m {
        return Err(Error::Domain(
            "first argument must have the larger mass".into(),
        ));
    }
    if grid.is_empty() {
        return Err(Error::Domain("empty comparison grid".into()));
    }
    let same = bigger.params().m == smaller.params().m;
    let mut min_gap = f64::INFINITY;
    let mut max_gap = f64::NEG_INFINITY;
    let mut logs = Vec::with_capacity(grid.len());
    let mut rhos = Vec::with_capacity(grid.len());
    for &rho in grid {
        let gap = bigger.phi(rho, 0)? - smaller.phi(rho, 0)?;
        if !same && gap <= 0.0 {
            return Err(Error::Consistency(format!(
                "family ordering violated at rho = {rho}: gap = {gap:e}"
            )));
        }
        min_gap = min_gap.min(gap);
        max_gap = max_gap.max(gap);
        if gap > 0.0 {
            rhos.push(rho);
            logs.push(gap.ln());
        }
    }
    let log_gap_slope = if rhos.len() >= 2 {
        linear_fit(&rhos, &logs).0
    } else {
        0.0
    };
    Ok(ComparisonReport {
        min_gap,
        max_gap,
        log_gap_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::profile::uniform_grid;

    fn params(m: f64) -> AdSSchwParams {
        make_params(m).unwrap()
    }

    #[test]
    fn neck_radius_examples() {
        assert!((params(2.0).a - 1.0).abs() < 1e-12);
        assert!((params(1.0).a - 0.682327803828019).abs() < 1e-12);
        let p = params(1e-3);
        assert!(p.a / p.m > 0.999 && p.a / p.m <= 1.0);
        assert!(make_params(0.0).is_err());
        assert!(make_params(-1.0).is_err());
    }

    #[test]
    fn large_mass_cube_root_limit() {
        let p = params(1e6);
        assert!((p.a / 1e2 - 1.0).abs() < 1e-2, "a/M^(1/3) = {}", p.a / 1e2);
    }

    #[test]
    fn derived_quantities_monotone() {
        let ms = [0.25, 0.5, 1.0, 2.0, 4.0];
        let ps: Vec<_> = ms.iter().map(|&m| params(m)).collect();
        for w in ps.windows(2) {
            assert!(w[1].a > w[0].a);
            assert!(w[1].h_a < w[0].h_a, "h(a(M)) must decrease in M");
            assert!(w[1].rho_m > w[0].rho_m);
            assert!(w[1].b > w[0].b);
            assert!(w[1].rho0 > w[0].rho0);
        }
    }

    #[test]
    fn clock_matches_massless_closed_form() {
        // As M -> 0 the clock tends to arcsinh(1/r).
        let p = params(1e-8);
        for r in [0.5, 1.0, 3.0] {
            let h = h_of_r(&p, r).unwrap();
            assert!(
                (h - (1.0 / r).asinh()).abs() < 1e-8,
                "r={r}: {h} vs {}",
                (1.0 / r).asinh()
            );
        }
    }

    #[test]
    fn clock_at_neck_decreases_with_mass_and_diverges_small_mass() {
        let h05 = params(0.5).h_a;
        let h1 = params(1.0).h_a;
        let h2 = params(2.0).h_a;
        assert!(h05 > h1 && h1 > h2);
        assert!(params(1e-4).h_a > h1 + 2.0);
        assert!(matches!(h_of_r(&params(1.0), 0.5), Err(Error::Domain(_))));
    }

    fn evaluator(m: f64) -> FamilyEvaluator {
        FamilyEvaluator::new(params(m)).unwrap()
    }

    #[test]
    fn phi_basics() {
        let ev = evaluator(1.0);
        let phi10 = ev.phi(10.0, 0).unwrap();
        assert!(phi10 > 1.0 && phi10 < 1.01);
        assert!(ev.phi(12.0, 0).unwrap() - 1.0 < phi10 - 1.0);
        for rho in [ev.params().rho_m, 1.0, 2.0, 5.0, 9.0] {
            assert!(ev.phi(rho, 1).unwrap() < 0.0, "phi_rho >= 0 at {rho}");
            assert!(ev.phi(rho, 0).unwrap() > 1.0);
        }
        assert!(ev.phi(ev.params().rho0, 0).is_err());
        assert!(ev.phi(ev.params().rho0 + 0.005, 0).is_err());
        assert!(ev
            .clone()
            .allow_near_singularity()
            .phi(ev.params().rho0 + 0.005, 0)
            .is_ok());
    }

    #[test]
    fn small_mass_factor_near_one() {
        let ev = evaluator(1e-6);
        let phi = ev.phi(2.0, 0).unwrap();
        assert!(phi > 1.0 && phi - 1.0 < 1e-3, "phi = {phi}");
    }

    #[test]
    fn table_matches_direct_evaluation() {
        let ev = evaluator(1.0);
        for rho in [ev.params().rho_m + 0.01, 0.9371, 2.7183, 7.31] {
            let from_table = ev.phi(rho, 0).unwrap();
            let direct = ev.phi_direct(rho).unwrap();
            assert!(
                (from_table - direct).abs() < 1e-10,
                "rho={rho}: {from_table} vs {direct}"
            );
        }
    }

    #[test]
    fn c1_match_across_the_neck() {
        // One-sided limits of the two charts agree at rho(M): the extension
        // formula is evaluated at the junction itself.
        for m in [0.5, 1.0, 2.0] {
            let ev = evaluator(m);
            let rho_m = ev.params().rho_m;
            let outer = ev.phi_outer(rho_m).unwrap();
            let inner = ev.phi_inner(rho_m).unwrap();
            assert!(
                (outer[0] - inner[0]).abs() < 1e-6,
                "value mismatch at M={m}"
            );
            assert!(
                (outer[1] - inner[1]).abs() < 1e-6,
                "slope mismatch at M={m}: {} vs {}",
                outer[1],
                inner[1]
            );
            // The weak solution is in fact smooth, so the second derivatives
            // of the two formula paths coincide as well.
            assert!(
                (outer[2] - inner[2]).abs() < 1e-4 * outer[2].abs().max(1.0),
                "curvature mismatch at M={m}: {} vs {}",
                outer[2],
                inner[2]
            );
        }
    }

    #[test]
    fn inner_chain_rule_matches_finite_differences() {
        let ev = evaluator(1.0);
        let p = ev.params();
        let rho = 0.5 * (p.rho0 + p.rho_m);
        let h = 1e-4;
        let f = |x: f64| ev.phi_inner(x).unwrap()[0];
        let fd1 = (f(rho + h) - f(rho - h)) / (2.0 * h);
        let fd2 = (f(rho + h) - 2.0 * f(rho) + f(rho - h)) / (h * h);
        let [_, d1, d2] = ev.phi_inner(rho).unwrap();
        assert!((fd1 - d1).abs() < 1e-5 * d1.abs().max(1.0), "{fd1} vs {d1}");
        assert!((fd2 - d2).abs() < 1e-3 * d2.abs().max(1.0), "{fd2} vs {d2}");
    }

    #[test]
    fn scalar_curvature_is_minus_six_on_both_charts() {
        let ev = evaluator(1.0);
        let p = ev.params();
        let mut worst = 0.0_f64;
        for i in 0..200 {
            let rho = p.rho0 + 0.02 + (10.0 - p.rho0 - 0.02) * i as f64 / 199.0;
            let phi = ev.phi(rho, 0).unwrap();
            let lap = ev.phi_laplacian(rho).unwrap();
            let r = phi.powi(-5) * (-6.0 * phi - 8.0 * lap);
            worst = worst.max((r + 6.0).abs());
        }
        assert!(worst < 1e-6, "max |R + 6| = {worst:.3e}");
    }

    #[test]
    fn radial_ode_residual_and_monotone_flux() {
        // (sinh^2 rho phi_rho)_rho = 3/4 sinh^2 rho phi (phi^4 - 1), and the
        // flux sinh^2 rho phi_rho is strictly increasing.
        let ev = evaluator(1.0);
        let grid = uniform_grid(ev.params().rho_m, 9.0, 300);
        let mut prev_flux = f64::NEG_INFINITY;
        for &rho in &grid {
            let phi = ev.phi(rho, 0).unwrap();
            let lap = ev.phi_laplacian(rho).unwrap();
            let sh2 = rho.sinh() * rho.sinh();
            let res = sh2 * (lap - 0.75 * phi * (phi * phi * phi * phi - 1.0));
            assert!(res.abs() < 1e-6, "ODE residual {res:.3e} at rho={rho}");
            let flux = sh2 * ev.phi(rho, 1).unwrap();
            assert!(flux > prev_flux);
            prev_flux = flux;
        }
    }

    #[test]
    fn mean_curvature_level_examples() {
        let ev = evaluator(1.0);
        let p = ev.params();
        assert!(ev.mean_curvature_level(p.rho_m).unwrap().abs() < 1e-12);
        // r = M on the outer chart gives exactly H = 2.
        let rho2 = ev.rho_of_r(p.m).unwrap();
        assert!((ev.mean_curvature_level(rho2).unwrap() - 2.0).abs() < 1e-10);
        // H -> 2 at infinity.
        let h8 = ev.mean_curvature_level(8.0).unwrap();
        assert!((h8 - 2.0).abs() < 1e-3);
        // Matches the conformal expression H = phi^-2 (2 coth rho + 4 phi_rho/phi).
        for rho in [0.45, p.rho_m, 2.0, 5.0] {
            let phi = ev.phi(rho, 0).unwrap();
            let d1 = ev.phi(rho, 1).unwrap();
            let alt = (2.0 / rho.tanh() + 4.0 * d1 / phi) / (phi * phi);
            let h = ev.mean_curvature_level(rho).unwrap();
            assert!((h - alt).abs() < 1e-8, "rho={rho}: {h} vs {alt}");
        }
    }

    #[test]
    fn horizon_radii_ordering_and_neck() {
        for m in [0.5, 1.0, 2.0] {
            let ev = evaluator(m);
            let hr = ev.horizon_radii().unwrap();
            assert_eq!(hr.rho1, ev.params().rho_m);
            assert!(hr.rho2 > hr.rho1 && hr.rho1 > hr.rho2_prime);
            assert!(hr.rho2_prime > ev.params().rho0);
            let r2 = ev.r_of_rho(hr.rho2).unwrap();
            assert!((r2 - m).abs() < 1e-8, "area radius at H=2: {r2}");
        }
    }

    #[test]
    fn family_ordering_and_gap_decay() {
        let ev2 = evaluator(2.0);
        let ev1 = evaluator(1.0);
        let report = compare_family(&ev2, &ev1, &uniform_grid(5.0, 9.0, 60)).unwrap();
        assert!(report.min_gap > 0.0);
        assert!(
            (report.log_gap_slope + 3.0).abs() < 0.15,
            "slope = {}",
            report.log_gap_slope
        );
        // Equal masses: identically zero gap.
        let same = compare_family(&ev1, &ev1, &uniform_grid(2.0, 5.0, 20)).unwrap();
        assert_eq!(same.max_gap, 0.0);
        // Ordering violation on a bad call is caught.
        assert!(compare_family(&ev1, &ev2, &uniform_grid(5.0, 6.0, 5)).is_err());
    }
}
