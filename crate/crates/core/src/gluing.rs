//! Capping the family end with a round region.
//!
//! On a transition interval `[tau1, tau2]` inside the inner chart the flux
//! `sinh^2(rho) psi_rho` is replaced by the cubic
//! `xi(rho) = (rho - tau1)^2 (a rho + b)` that interpolates between zero slope
//! at `tau1` and the family data
//! `A = sinh^2(tau2) phi_rho(tau2)`, `B = 3/4 sinh^2(tau2) phi(tau2)(phi^4(tau2)-1)`
//! at `tau2`. Integrating the flux from `tau2` inward and freezing the value
//! below `tau1` yields a `C^{2,1}` profile `psi` that is constant near the
//! center, equals `phi` outside `B(tau2)`, and has scalar curvature `> -6`
//! inside.
//!
//! The interval is admissible when `log(phi (phi^4 - 1) sinh^2 rho)` has
//! negative slope on it; `select_taus` scans for that deterministically.

use crate::error::{Error, Result};
use crate::family::FamilyEvaluator;
use crate::geometry::ops::scalar_curvature_parts;
use crate::geometry::profile::RadialProfile;
use crate::geometry::quad::quad_adaptive;

/// Transition interval with its matching data and cubic coefficients.
#[derive(Debug, Clone, Copy)]
pub struct GluingSpec {
    pub tau1: f64,
    pub tau2: f64,
    /// `A = sinh^2(tau2) phi_rho(tau2) < 0`.
    pub a_match: f64,
    /// `B = 3/4 sinh^2(tau2) phi(tau2)(phi^4(tau2) - 1) > 0`.
    pub b_match: f64,
    /// Leading cubic coefficient, positive.
    pub a_coef: f64,
    /// Affine coefficient, negative.
    pub b_coef: f64,
}

impl GluingSpec {
    /// The flux cubic `xi` on `[tau1, tau2]`.
    pub fn xi(&self, rho: f64) -> f64 {
        let d = rho - self.tau1;
        d * d * (self.a_coef * rho + self.b_coef)
    }

    pub fn xi_d1(&self, rho: f64) -> f64 {
        let d = rho - self.tau1;
        2.0 * d * (self.a_coef * rho + self.b_coef) + d * d * self.a_coef
    }
}

/// Slope of `log(phi (phi^4 - 1) sinh^2 rho)`; the transition interval must
/// keep it negative.
pub fn transition_indicator(ev: &FamilyEvaluator, rho: f64) -> Result<f64> {
    let phi = ev.phi(rho, 0)?;
    let d1 = ev.phi(rho, 1)?;
    let p4 = phi.powi(4);
    Ok(2.0 / rho.tanh() + (5.0 * p4 - 1.0) / (p4 - 1.0) * d1 / phi)
}

const SCAN_STEP: f64 = 1e-3;
const SCAN_MARGIN: f64 = -1e-4;

/// Deterministic interval choice: scan downward from just below the inner
/// `H = -2` sphere for the first point where the indicator drops below
/// `-1e-4`, then extend the interval downward while negativity persists,
/// capping the width at `min(0.5, (tau2 - rho0)/2)`.
pub fn select_taus(ev: &FamilyEvaluator) -> Result<(f64, f64)> {
    let p = *ev.params();
    let radii = ev.horizon_radii()?;
    let lo = ev.rho_min() + SCAN_STEP;
    let hi = radii.rho2_prime - SCAN_STEP;
    if hi <= lo {
        return Err(Error::SelectionFailure(format!(
            "no scan room between rho0 + guard = {lo} and rho2' = {}",
            radii.rho2_prime
        )));
    }

    let mut tau2 = None;
    let mut probes = Vec::new();
    let mut rho = hi;
    while rho > lo {
        let d = transition_indicator(ev, rho)?;
        if d < SCAN_MARGIN {
            tau2 = Some(rho);
            break;
        }
        probes.push((rho, d));
        rho -= SCAN_STEP;
    }
    let tau2 = tau2.ok_or_else(|| {
        Error::SelectionFailure(format!(
            "indicator never dropped below {SCAN_MARGIN} on ({lo}, {hi}); \
             first probes: {:?}",
            &probes[..probes.len().min(4)]
        ))
    })?;

    let cap = 0.5_f64.min(0.5 * (tau2 - p.rho0));
    let mut tau1 = tau2 - SCAN_STEP;
    while tau2 - tau1 < cap - SCAN_STEP {
        let next = tau1 - SCAN_STEP;
        if next <= lo || transition_indicator(ev, next)? >= SCAN_MARGIN {
            break;
        }
        tau1 = next;
    }

    // Admissibility on the whole interval, checked on a fine subgrid.
    for i in 0..=200 {
        let r = tau1 + (tau2 - tau1) * i as f64 / 200.0;
        let d = transition_indicator(ev, r)?;
        if d >= 0.0 {
            return Err(Error::SelectionFailure(format!(
                "indicator {d:.3e} >= 0 at rho = {r} inside the selected interval"
            )));
        }
    }
    Ok((tau1, tau2))
}

/// Builds the cubic matching data for a chosen interval.
pub fn build_spec(ev: &FamilyEvaluator, tau1: f64, tau2: f64) -> Result<GluingSpec> {
    let p = *ev.params();
    let radii = ev.horizon_radii()?;
    if !(p.rho0 < tau1 && tau1 < tau2 && tau2 < radii.rho2_prime) {
        return Err(Error::Domain(format!(
            "need rho0 < tau1 < tau2 < rho2', got {tau1}, {tau2}"
        )));
    }
    let sh2 = tau2.sinh() * tau2.sinh();
    let phi = ev.phi(tau2, 0)?;
    let a_match = sh2 * ev.phi(tau2, 1)?;
    let b_match = 0.75 * sh2 * phi * (phi.powi(4) - 1.0);
    if a_match >= 0.0 || b_match <= 0.0 {
        return Err(Error::Consistency(format!(
            "matching data has wrong signs: A = {a_match}, B = {b_match}"
        )));
    }
    let d = tau2 - tau1;
    let a_coef = (b_match - 2.0 * a_match / d) / (d * d);
    let b_coef = (a_match - tau2 * b_match + 2.0 * a_match * tau2 / d) / (d * d);
    if !(a_coef > 0.0 && b_coef < 0.0) {
        return Err(Error::Consistency(format!(
            "cubic coefficients have wrong signs: a = {a_coef}, b = {b_coef}"
        )));
    }
    let spec = GluingSpec {
        tau1,
        tau2,
        a_match,
        b_match,
        a_coef,
        b_coef,
    };
    let scale = a_match.abs().max(b_match);
    if (spec.xi(tau2) - a_match).abs() > 1e-12 * scale
        || (spec.xi_d1(tau2) - b_match).abs() > 1e-12 * scale
    {
        return Err(Error::Consistency(
            "cubic endpoint interpolation failed".into(),
        ));
    }
    Ok(spec)
}

/// The glued radial factor: constant on `[0, tau1]`, flux-integrated on
/// `[tau1, tau2]`, the family factor beyond. Carries both a sampled profile
/// on the construction grid and piecewise-analytic evaluation.
#[derive(Debug, Clone)]
pub struct GluedProfile {
    spec: GluingSpec,
    evaluator: FamilyEvaluator,
    profile: RadialProfile,
    cap_value: f64,
    phi_tau2: f64,
}

fn integrate_flux(spec: &GluingSpec, lo: f64, hi: f64) -> Result<f64> {
    let s = *spec;
    Ok(quad_adaptive(move |t: f64| s.xi(t) / (t.sinh() * t.sinh()), lo, hi, 1e-13)?.value)
}

/// Fixed-panel integral for the short inter-node strips of the transition
/// band. Independent adaptive runs would leave mutually uncorrelated 1e-13
/// noise on neighboring samples, which second-difference stencils amplify by
/// 1/h^2; a cumulative sweep of machine-accurate panels keeps the sampled
/// values smooth.
fn flux_panel(spec: &GluingSpec, lo: f64, hi: f64) -> f64 {
    const X: [f64; 4] = [
        -0.861136311594052,
        -0.339981043584856,
        0.339981043584856,
        0.861136311594052,
    ];
    const W: [f64; 4] = [
        0.347854845137454,
        0.652145154862546,
        0.652145154862546,
        0.347854845137454,
    ];
    let mut acc = 0.0;
    for panel in 0..4 {
        let a = lo + (hi - lo) * panel as f64 / 4.0;
        let b = lo + (hi - lo) * (panel + 1) as f64 / 4.0;
        let (pc, ph) = (0.5 * (a + b), 0.5 * (b - a));
        for i in 0..4 {
            let t = pc + ph * X[i];
            acc += W[i] * ph * spec.xi(t) / (t.sinh() * t.sinh());
        }
    }
    acc
}

/// Materializes the glued profile on a grid that must contain `tau1` and
/// `tau2` as nodes.
pub fn glued_profile(
    ev: &FamilyEvaluator,
    spec: &GluingSpec,
    grid: Vec<f64>,
) -> Result<GluedProfile> {
    for tau in [spec.tau1, spec.tau2] {
        if !grid.iter().any(|&g| g == tau) {
            return Err(Error::Grid(format!(
                "grid is missing a junction node at {tau}"
            )));
        }
    }
    if grid[0] != 0.0 {
        return Err(Error::Grid("glued grid must start at rho = 0".into()));
    }
    let phi_tau2 = ev.phi(spec.tau2, 0)?;
    let cap_value = phi_tau2 - integrate_flux(spec, spec.tau1, spec.tau2)?;

    // Transition samples by one cumulative sweep from tau2 downward.
    let mut transition: Vec<(usize, f64)> = Vec::new();
    for (i, &rho) in grid.iter().enumerate() {
        if rho >= spec.tau1 && rho <= spec.tau2 {
            transition.push((i, rho));
        }
    }
    let mut band_values = vec![0.0; transition.len()];
    let mut acc = 0.0;
    for k in (0..transition.len()).rev() {
        let hi = if k + 1 == transition.len() {
            spec.tau2
        } else {
            transition[k + 1].1
        };
        acc += flux_panel(spec, transition[k].1, hi);
        band_values[k] = phi_tau2 - acc;
    }

    let mut values = Vec::with_capacity(grid.len());
    for &rho in &grid {
        values.push(if rho < spec.tau1 {
            cap_value
        } else if rho <= spec.tau2 {
            let k = transition.iter().position(|&(_, r)| r == rho).unwrap();
            band_values[k]
        } else {
            ev.phi(rho, 0)?
        });
    }
    let profile = RadialProfile::new(grid, values)?;
    let gp = GluedProfile {
        spec: *spec,
        evaluator: ev.clone(),
        profile,
        cap_value,
        phi_tau2,
    };
    // psi > 1 holds in exact arithmetic; far out the margin sits below the
    // evaluation noise, so the check runs at noise resolution.
    for (&rho, &v) in gp.profile.grid().iter().zip(gp.profile.values()) {
        if v <= 1.0 - 1e-12 {
            return Err(Error::Consistency(format!("psi({rho}) = {v} <= 1")));
        }
    }
    Ok(gp)
}

impl GluedProfile {
    pub fn spec(&self) -> &GluingSpec {
        &self.spec
    }

    pub fn evaluator(&self) -> &FamilyEvaluator {
        &self.evaluator
    }

    /// Sampled view on the construction grid.
    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    /// The constant cap value `psi(0)`.
    pub fn cap_value(&self) -> f64 {
        self.cap_value
    }

    pub fn rho_max(&self) -> f64 {
        self.profile.max_rho()
    }

    /// Piecewise-analytic value.
    pub fn value(&self, rho: f64) -> Result<f64> {
        if rho < 0.0 || rho > self.profile.max_rho() {
            return Err(Error::Range(format!("rho = {rho} outside glued range")));
        }
        if rho < self.spec.tau1 {
            Ok(self.cap_value)
        } else if rho <= self.spec.tau2 {
            Ok(self.phi_tau2 - integrate_flux(&self.spec, rho, self.spec.tau2)?)
        } else {
            self.evaluator.phi(rho, 0)
        }
    }

    /// Piecewise-analytic first derivative.
    pub fn d1(&self, rho: f64) -> Result<f64> {
        if rho < self.spec.tau1 {
            Ok(0.0)
        } else if rho <= self.spec.tau2 {
            Ok(self.spec.xi(rho) / (rho.sinh() * rho.sinh()))
        } else {
            self.evaluator.phi(rho, 1)
        }
    }

    /// Piecewise-analytic hyperbolic Laplacian; zero on the constant cap
    /// (including the pole, by even extension).
    pub fn laplacian(&self, rho: f64) -> Result<f64> {
        if rho < self.spec.tau1 {
            Ok(0.0)
        } else if rho <= self.spec.tau2 {
            // psi_rho = xi/sinh^2 => Delta psi = xi_rho / sinh^2.
            Ok(self.spec.xi_d1(rho) / (rho.sinh() * rho.sinh()))
        } else {
            self.evaluator.phi_laplacian(rho)
        }
    }

    /// Scalar curvature of `psi^4 ds^2` at `rho`.
    pub fn scalar_curvature(&self, rho: f64) -> Result<f64> {
        Ok(scalar_curvature_parts(
            self.value(rho)?,
            self.laplacian(rho)?,
        ))
    }

    /// One-sided second-derivative mismatches of the sampled profile at the
    /// two junctions, from 5-point one-sided stencils.
    pub fn junction_mismatch(&self) -> [f64; 2] {
        let g = self.profile.grid();
        let v = self.profile.values();
        let one_sided = |at: usize, dir: i64| -> f64 {
            // Third-order one-sided second derivative on a uniform-ish grid.
            let idx = |k: i64| (at as i64 + dir * k) as usize;
            let h = (g[idx(1)] - g[idx(0)]).abs();
            (35.0 * v[idx(0)] - 104.0 * v[idx(1)] + 114.0 * v[idx(2)] - 56.0 * v[idx(3)]
                + 11.0 * v[idx(4)])
                / (12.0 * h * h)
        };
        let mut out = [0.0; 2];
        for (slot, tau) in [(0, self.spec.tau1), (1, self.spec.tau2)] {
            let at = g.iter().position(|&x| x == tau).expect("junction node");
            out[slot] = (one_sided(at, 1) - one_sided(at, -1)).abs();
        }
        out
    }
}

/// Curvature profile of a glued factor with the bound checks applied.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub rho: Vec<f64>,
    pub curvature: Vec<f64>,
    /// Smallest `R + 6` over interior nodes of `(0, tau2)`.
    pub min_interior_margin: f64,
    /// Largest `|R + 6|` over nodes in `[tau2, rho_max]`.
    pub max_outer_deviation: f64,
}

/// Evaluates `R(psi)` on the construction grid and enforces `R > -6` strictly
/// inside `B(tau2)` and `|R + 6| < 1e-6` outside.
pub fn verify_supercurvature(gp: &GluedProfile) -> Result<CurvatureReport> {
    let grid = gp.profile().grid().to_vec();
    let mut curvature = Vec::with_capacity(grid.len());
    let mut min_interior_margin = f64::INFINITY;
    let mut max_outer_deviation: f64 = 0.0;
    for &rho in &grid {
        let r = gp.scalar_curvature(rho)?;
        curvature.push(r);
        if rho > 0.0 && rho < gp.spec().tau2 {
            let margin = r + 6.0;
            if margin <= 0.0 {
                return Err(Error::CurvatureViolation { rho, margin });
            }
            min_interior_margin = min_interior_margin.min(margin);
        } else if rho >= gp.spec().tau2 {
            let dev = (r + 6.0).abs();
            if dev >= 1e-6 {
                return Err(Error::CurvatureViolation { rho, margin: dev });
            }
            max_outer_deviation = max_outer_deviation.max(dev);
        }
    }
    Ok(CurvatureReport {
        rho: grid,
        curvature,
        min_interior_margin,
        max_outer_deviation,
    })
}

/// Builds a grid on `[0, rho_max]`: `n` near-uniform base nodes plus a
/// locally refined band around the transition interval with the junctions as
/// exact nodes. The transition cubic carries steep high derivatives, so the
/// junction neighborhoods need spacing far below the base resolution.
pub fn glued_grid(spec: &GluingSpec, rho_max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 16 && rho_max > spec.tau2 + 1.0);
    let width = spec.tau2 - spec.tau1;
    let segments = ((n / 2).next_power_of_two() as i64).clamp(512, 8192);
    let fine = width / segments as f64;
    let pad = 12_i64;
    let band_lo = spec.tau1 - pad as f64 * fine;
    let band_hi = spec.tau2 + pad as f64 * fine;

    let h = rho_max / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n)
        .map(|i| h * i as f64)
        .filter(|&x| x < band_lo - 0.5 * fine || x > band_hi + 0.5 * fine)
        .collect();
    for k in -pad..=segments + pad {
        let x = if k == segments {
            spec.tau2
        } else {
            spec.tau1 + k as f64 * fine
        };
        if x > 0.0 && x < rho_max {
            grid.push(x);
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| a == b);
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::make_params;

    fn setup(m: f64) -> (FamilyEvaluator, GluingSpec) {
        let ev = FamilyEvaluator::new(make_params(m).unwrap()).unwrap();
        let (t1, t2) = select_taus(&ev).unwrap();
        let spec = build_spec(&ev, t1, t2).unwrap();
        (ev, spec)
    }

    #[test]
    fn selection_is_admissible_and_interior() {
        let ev = FamilyEvaluator::new(make_params(1.0).unwrap()).unwrap();
        let (t1, t2) = select_taus(&ev).unwrap();
        let radii = ev.horizon_radii().unwrap();
        assert!(ev.params().rho0 < t1 && t1 < t2 && t2 < radii.rho2_prime);
        // Strict negativity margin at both endpoints.
        assert!(transition_indicator(&ev, t1).unwrap() <= -1e-4);
        assert!(transition_indicator(&ev, t2).unwrap() <= -1e-4);
        // Independent scan oracle: the indicator stays negative across the
        // interval on a fine grid.
        for i in 0..=500 {
            let rho = t1 + (t2 - t1) * i as f64 / 500.0;
            assert!(transition_indicator(&ev, rho).unwrap() < 0.0);
        }
    }

    #[test]
    fn cubic_matching_conditions() {
        let (_, spec) = setup(1.0);
        // Double root at tau1 by construction.
        assert_eq!(spec.xi(spec.tau1), 0.0);
        assert_eq!(spec.xi_d1(spec.tau1), 0.0);
        let scale = spec.a_match.abs().max(spec.b_match);
        assert!((spec.xi(spec.tau2) - spec.a_match).abs() < 1e-12 * scale);
        assert!((spec.xi_d1(spec.tau2) - spec.b_match).abs() < 1e-12 * scale);
        assert!(spec.a_coef > 0.0 && spec.b_coef < 0.0);
        // xi <= 0 across the interval.
        for i in 0..=200 {
            let rho = spec.tau1 + (spec.tau2 - spec.tau1) * i as f64 / 200.0;
            assert!(spec.xi(rho) <= 0.0, "xi({rho}) = {}", spec.xi(rho));
        }
        // xi'(tau2) - xi'(rho) >= 0, strictly positive before tau2.
        for i in 0..200 {
            let rho = spec.tau1 + (spec.tau2 - spec.tau1) * i as f64 / 200.0;
            assert!(spec.xi_d1(spec.tau2) - spec.xi_d1(rho) > 0.0);
        }
    }

    #[test]
    fn rejects_bad_intervals() {
        let ev = FamilyEvaluator::new(make_params(1.0).unwrap()).unwrap();
        assert!(build_spec(&ev, 0.01, 0.02).is_err()); // below rho0
        let radii = ev.horizon_radii().unwrap();
        assert!(build_spec(&ev, radii.rho1, radii.rho2).is_err()); // beyond rho2'
    }

    fn profile_for(m: f64, n: usize, rho_max: f64) -> (FamilyEvaluator, GluedProfile) {
        let (ev, spec) = setup(m);
        let grid = glued_grid(&spec, rho_max, n);
        let gp = glued_profile(&ev, &spec, grid).unwrap();
        (ev, gp)
    }

    #[test]
    fn cap_exceeds_family_value_and_outer_region_matches() {
        let (ev, gp) = profile_for(1.0, 2048, 10.0);
        let spec = *gp.spec();
        assert!(gp.cap_value() > ev.phi(spec.tau2, 0).unwrap());
        for rho in [spec.tau2, spec.tau2 + 0.3, 2.0, 5.0, 9.5] {
            let psi = gp.value(rho).unwrap();
            let phi = ev.phi(rho, 0).unwrap();
            assert!((psi - phi).abs() < 1e-12, "psi != phi at {rho}");
        }
        // On the transition interval the profile stays pinched between the
        // junction value and the family factor: phi(tau2) <= psi <= phi, so
        // in particular psi > 1. (The flux cubic majorizes the family flux
        // there, which makes psi the smaller of the two.)
        for i in 1..40 {
            let rho = spec.tau1 + (spec.tau2 - spec.tau1) * i as f64 / 40.0;
            let psi = gp.value(rho).unwrap();
            let phi = ev.phi(rho, 0).unwrap();
            let floor = ev.phi(spec.tau2, 0).unwrap();
            assert!(
                psi >= floor && psi <= phi && floor > 1.0,
                "ordering at {rho}: {floor} <= {psi} <= {phi} fails"
            );
        }
    }

    #[test]
    fn flux_identity_on_transition() {
        // sinh^2 rho psi_rho = xi to 1e-8, sampled from the interpolant at
        // nodes clear of the interpolation windows touching the junctions.
        let (_, gp) = profile_for(1.0, 2048, 10.0);
        let spec = *gp.spec();
        let prof = gp.profile();
        let clear = {
            let g = prof.grid();
            let i = g.iter().position(|&x| x == spec.tau1).unwrap();
            4.0 * (g[i + 1] - g[i])
        };
        for i in 1..30 {
            let rho = spec.tau1 + (spec.tau2 - spec.tau1) * i as f64 / 30.0;
            if rho < spec.tau1 + clear || rho > spec.tau2 - clear {
                continue;
            }
            let lhs = rho.sinh() * rho.sinh() * prof.d1(rho).unwrap();
            assert!(
                (lhs - spec.xi(rho)).abs() < 1e-8,
                "flux mismatch at {rho}: {lhs} vs {}",
                spec.xi(rho)
            );
        }
    }

    #[test]
    fn junctions_are_c2_to_grid_resolution() {
        let (_, gp) = profile_for(1.0, 2048, 10.0);
        let g = gp.profile().grid();
        let local = |tau: f64| {
            let i = g.iter().position(|&x| x == tau).unwrap();
            g[i + 1] - g[i]
        };
        let [m1, m2] = gp.junction_mismatch();
        assert!(m1 < 10.0 * local(gp.spec().tau1), "tau1 mismatch {m1}");
        assert!(m2 < 10.0 * local(gp.spec().tau2), "tau2 mismatch {m2}");
        // Refining the band halves the bound; the mismatch estimates must
        // keep clearing it (no spike growth in the third derivative).
        let fine = {
            let (ev, spec) = setup(1.0);
            let grid = glued_grid(&spec, 10.0, 4096);
            glued_profile(&ev, &spec, grid).unwrap()
        };
        let gf = fine.profile().grid();
        let i1 = gf.iter().position(|&x| x == fine.spec().tau1).unwrap();
        let fine_local = gf[i1 + 1] - gf[i1];
        let [f1, f2] = fine.junction_mismatch();
        assert!(f1 < 10.0 * fine_local, "refined tau1 mismatch {f1}");
        assert!(f2 < 10.0 * fine_local, "refined tau2 mismatch {f2}");
    }

    #[test]
    fn supercurvature_report() {
        let (_, gp) = profile_for(1.0, 2048, 10.0);
        let report = verify_supercurvature(&gp).unwrap();
        // Cap region: R = -6 psi(0)^{-4} > -6 exactly.
        let expected_cap = -6.0 * gp.cap_value().powi(-4);
        assert!((report.curvature[0] - expected_cap).abs() < 1e-12);
        assert!(report.min_interior_margin > 0.0);
        assert!(report.max_outer_deviation < 1e-6);
    }

    #[test]
    fn proof_inequality_chain_holds_on_nodes() {
        // [sinh^2 psi_rho]_rho = xi_rho(rho) < xi_rho(tau2)
        //   <= 3/4 psi (psi^4 - 1) sinh^2 rho on the transition interval.
        let (_, gp) = profile_for(1.0, 2048, 10.0);
        let spec = *gp.spec();
        for i in 1..50 {
            let rho = spec.tau1 + (spec.tau2 - spec.tau1) * i as f64 / 50.0;
            let lhs = spec.xi_d1(rho);
            let mid = spec.xi_d1(spec.tau2);
            let psi = gp.value(rho).unwrap();
            let rhs = 0.75 * psi * (psi.powi(4) - 1.0) * rho.sinh() * rho.sinh();
            assert!(lhs < mid || rho == spec.tau2);
            assert!(
                mid <= rhs * (1.0 + 1e-12),
                "chain fails at {rho}: {mid} vs {rhs}"
            );
        }
    }

    #[test]
    fn cap_value_is_quadrature_stable() {
        let (_, gp1) = profile_for(1.0, 1024, 10.0);
        let (_, gp2) = profile_for(1.0, 2048, 10.0);
        assert!((gp1.cap_value() - gp2.cap_value()).abs() < 1e-8);
    }

    #[test]
    fn grid_must_contain_junctions() {
        let (ev, spec) = setup(1.0);
        let bad = crate::geometry::profile::uniform_grid(0.0, 10.0, 257);
        assert!(matches!(
            glued_profile(&ev, &spec, bad),
            Err(Error::Grid(_))
        ));
    }
}
