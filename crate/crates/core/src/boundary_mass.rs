//! Collar gauge at the conformal boundary and the mass invariant.
//!
//! A radial factor `u` with `|u - 1| = O(e^{-3 rho})` is sampled in the
//! collar chart `t = log(tau) -> 0^-`. Its boundary expansion
//! `u = 1 + c3 t^3 + c4 t^4 + c5 t^5 + ...` is recovered by a constrained
//! least-squares fit (the decay hypothesis forces the absent low-order
//! terms), giving `u_ttt = 6 c3`.
//!
//! The defining function `w = (1 - r^2)/(2 u^2)` and the gauge function
//! `theta` solving
//! `w theta_t^2 + 2 theta theta_t w_t = e^{2t} (theta^4 w + theta^2 a)`,
//! `a w = 1 - e^{-2t} w_t^2`, `theta(0) = 1`,
//! put the metric into the boundary normal form `sinh^{-2} f (df^2 + g_f)`
//! with `sinh f = theta w`. A series solution of the radial gauge equation
//! gives `theta_ttt = -1 + (8/3) u_ttt` at the boundary, so the `t^3/3`
//! coefficient of the angular block is `-(theta_ttt + 1) h = -(8/3) u_ttt h`
//! with trace `-(16/3) u_ttt`, and for radial data
//! `mass = (4/3) |u_ttt|` — which evaluates to `M/2` on the model family,
//! the standard normalization.

use crate::error::{Error, Result};
use crate::geometry::chart::ChartPoint;
use crate::geometry::fit::poly_fit;
use crate::geometry::profile::RadialProfile;
use crate::horizon::SphereGrid;

/// Samples of a radial conformal factor in the collar chart: strictly
/// increasing `t < 0` with `u(t)` values.
#[derive(Debug, Clone)]
pub struct CollarSamples {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
}

impl CollarSamples {
    pub fn new(t: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if t.len() != u.len() || t.len() < 12 {
            return Err(Error::Domain("need at least 12 collar samples".into()));
        }
        for w in t.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain("collar samples must increase in t".into()));
            }
        }
        if *t.last().unwrap() >= 0.0 {
            return Err(Error::Domain("collar samples must satisfy t < 0".into()));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite collar sample".into()));
        }
        Ok(CollarSamples { t, u })
    }

    /// Samples `u(rho)` into the collar window `t in [t_lo, t_hi]`.
    pub fn from_radial(
        u_of_rho: impl Fn(f64) -> Result<f64>,
        t_lo: f64,
        t_hi: f64,
        n: usize,
    ) -> Result<Self> {
        if !(t_lo < t_hi && t_hi < 0.0) {
            return Err(Error::Domain(format!("bad collar window [{t_lo}, {t_hi}]")));
        }
        let mut ts = Vec::with_capacity(n);
        let mut us = Vec::with_capacity(n);
        for k in 0..n {
            let t = t_lo + (t_hi - t_lo) * k as f64 / (n - 1) as f64;
            let rho = ChartPoint::from_collar(t)?.rho;
            ts.push(t);
            us.push(u_of_rho(rho)?);
        }
        Self::new(ts, us)
    }

    /// Collar samples of a profile given on a `rho`-grid.
    pub fn from_profile(profile: &RadialProfile, t_lo: f64, t_hi: f64, n: usize) -> Result<Self> {
        Self::from_radial(|rho| profile.value(rho), t_lo, t_hi, n)
    }
}

/// Default collar fit window.
pub const FIT_WINDOW: (f64, f64) = (-0.2, -0.02);

/// Result of the constrained boundary fit.
#[derive(Debug, Clone, Copy)]
pub struct UtttExtraction {
    pub u_ttt: f64,
    pub coefficients: [f64; 3],
    /// RMS fit residual relative to the data scale.
    pub fit_residual: f64,
    /// Relative spread of `u_ttt` across three nested windows.
    pub window_sensitivity: f64,
}

const RESIDUAL_THRESHOLD: f64 = 1e-3;
const SENSITIVITY_THRESHOLD: f64 = 0.05;

/// Third collar derivative of `u` at the boundary from the constrained fit
/// `u - 1 ~ c3 t^3 + c4 t^4 + c5 t^5`.
pub fn extract_u_ttt(samples: &CollarSamples) -> Result<UtttExtraction> {
    let fit_on = |lo: f64| -> Option<(f64, [f64; 3], f64)> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (&t, &u) in samples.t.iter().zip(&samples.u) {
            if t >= lo {
                xs.push(t);
                ys.push(u - 1.0);
            }
        }
        if xs.len() < 12 {
            return None;
        }
        let c = poly_fit(&xs, &ys, &[3, 4, 5]);
        let scale = ys.iter().fold(f64::MIN_POSITIVE, |a, &y| a.max(y.abs()));
        let mut rss = 0.0;
        for (&t, &y) in xs.iter().zip(&ys) {
            let model = c[0] * t.powi(3) + c[1] * t.powi(4) + c[2] * t.powi(5);
            rss += (y - model) * (y - model);
        }
        let residual = (rss / xs.len() as f64).sqrt() / scale;
        Some((6.0 * c[0], [c[0], c[1], c[2]], residual))
    };

    // A factor that is 1 to working precision has no extractable cubic
    // coefficient; report zero rather than fitting noise.
    let signal = samples
        .u
        .iter()
        .fold(0.0_f64, |m, &u| m.max((u - 1.0).abs()));
    if signal < 1e-9 {
        return Ok(UtttExtraction {
            u_ttt: 0.0,
            coefficients: [0.0; 3],
            fit_residual: 0.0,
            window_sensitivity: 0.0,
        });
    }

    let t_lo = samples.t[0];
    let full = fit_on(t_lo).ok_or_else(|| Error::Extraction("window too small".into()))?;
    let mut estimates = vec![full.0];
    for shrink in [0.75, 0.5] {
        if let Some((est, _, _)) = fit_on(t_lo * shrink) {
            estimates.push(est);
        }
    }
    let spread = estimates
        .iter()
        .fold(0.0_f64, |m, &e| m.max((e - full.0).abs()));
    let sensitivity = if full.0.abs() > 1e-12 {
        spread / full.0.abs()
    } else {
        spread
    };
    if full.2 > RESIDUAL_THRESHOLD {
        return Err(Error::Extraction(format!(
            "fit residual {:.3e} above threshold {RESIDUAL_THRESHOLD}",
            full.2
        )));
    }
    if sensitivity > SENSITIVITY_THRESHOLD && full.0.abs() > 1e-10 {
        return Err(Error::Extraction(format!(
            "window sensitivity {sensitivity:.3e} above {SENSITIVITY_THRESHOLD}"
        )));
    }
    Ok(UtttExtraction {
        u_ttt: full.0,
        coefficients: full.1,
        fit_residual: full.2,
        window_sensitivity: sensitivity,
    })
}

/// Boundary data produced by the collar gauge solve.
#[derive(Debug, Clone, Copy)]
pub struct CollarExpansion {
    pub u_boundary_value: f64,
    pub u_t: f64,
    pub u_tt: f64,
    pub u_ttt: f64,
    /// `(theta_t, theta_tt, theta_ttt)` at `t = 0`.
    pub theta_derivs: (f64, f64, f64),
    /// `(f_t, f_tt, f_ttt)` at `t = 0` for `sinh f = theta w`.
    pub f_derivs: (f64, f64, f64),
    /// `(w_t, w_tt, w_ttt)` of the defining function at `t = 0`.
    pub rho_derivs: (f64, f64, f64),
    /// `(a(0), a_t(0))` of the smooth quotient `a w = 1 - |grad_0 w|^2`.
    pub a_derivs: (f64, f64),
    /// Trace of the cubic boundary tensor: `-(16/3) u_ttt`.
    pub trace_coeff: f64,
    pub mass: f64,
    /// Largest violation of `f_t = -theta e^t` (the unit-gradient identity)
    /// along the integration, i.e. the block-form reconstruction error.
    pub gauge_identity_error: f64,
    /// Largest `|theta^2 e^{2t} - 1| / |t|^3`: the angular block deviates
    /// from round by at most this multiple of `|t|^3`.
    pub gamma_deviation_coeff: f64,
}

/// Polynomial boundary model of `u` built from the constrained fit; supplies
/// the smooth data the gauge ODE needs up to `t = 0`.
struct BoundaryModel {
    c: [f64; 3],
}

impl BoundaryModel {
    fn u(&self, t: f64) -> f64 {
        1.0 + self.c[0] * t.powi(3) + self.c[1] * t.powi(4) + self.c[2] * t.powi(5)
    }

    fn u_t(&self, t: f64) -> f64 {
        3.0 * self.c[0] * t * t + 4.0 * self.c[1] * t.powi(3) + 5.0 * self.c[2] * t.powi(4)
    }

    /// Defining function `w = (1 - e^{2t}) / (2 u^2)` and its t-derivative.
    fn w_and_wt(&self, t: f64) -> (f64, f64) {
        let u = self.u(t);
        let ut = self.u_t(t);
        let p = -(2.0 * t).exp_m1(); // 1 - e^{2t}, stable near 0
        let pt = -2.0 * (2.0 * t).exp();
        let w = p / (2.0 * u * u);
        let wt = pt / (2.0 * u * u) - p * ut / (u * u * u);
        (w, wt)
    }

    /// Smooth quotient `a = (1 - e^{-2t} w_t^2) / w`.
    fn a(&self, t: f64) -> f64 {
        let (w, wt) = self.w_and_wt(t);
        (1.0 - (-2.0 * t).exp() * wt * wt) / w
    }
}

/// Right-hand side of the gauge ODE in the rationalized form
/// `theta_t = -E / (S - theta w_t)`, with `E = e^{2t}(theta^4 w + theta^2 a)`
/// and `S = sqrt(theta^2 w_t^2 + w E)`; regular down to the boundary.
fn theta_rhs(model: &BoundaryModel, t: f64, theta: f64) -> f64 {
    let (w, wt) = model.w_and_wt(t);
    let a = model.a(t);
    let e = (2.0 * t).exp() * (theta.powi(4) * w + theta * theta * a);
    let s = (theta * theta * wt * wt + w * e).sqrt();
    -e / (s - theta * wt)
}

/// Solves the collar gauge for a radial factor sampled in the collar chart
/// and assembles the full boundary expansion.
pub fn collar_gauge(samples: &CollarSamples) -> Result<CollarExpansion> {
    let extraction = extract_u_ttt(samples)?;
    let model = BoundaryModel {
        c: extraction.coefficients,
    };

    // Integrate theta inward from the boundary. The series head (with the
    // cubic coefficient supplied by the fit) covers the first step; RK4 with
    // a fixed small step does the rest.
    let t_start: f64 = -1e-4;
    let t_end = (-0.06_f64).max(samples.t[0]);
    let theta3 = -1.0 + 8.0 / 3.0 * extraction.u_ttt;
    let theta_start = 1.0 - t_start + 0.5 * t_start * t_start + theta3 * t_start.powi(3) / 6.0;
    let h = -1e-4;
    let steps = ((t_end - t_start) / h).ceil() as usize;
    let mut ts = Vec::with_capacity(steps + 1);
    let mut thetas = Vec::with_capacity(steps + 1);
    let mut t = t_start;
    let mut theta = theta_start;
    ts.push(t);
    thetas.push(theta);
    let mut identity_err = 0.0_f64;
    let mut gamma_coeff = 0.0_f64;
    for _ in 0..steps {
        let hh = if t + h < t_end { t_end - t } else { h };
        let k1 = theta_rhs(&model, t, theta);
        let k2 = theta_rhs(&model, t + 0.5 * hh, theta + 0.5 * hh * k1);
        let k3 = theta_rhs(&model, t + 0.5 * hh, theta + 0.5 * hh * k2);
        let k4 = theta_rhs(&model, t + hh, theta + hh * k3);
        theta += hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += hh;
        if !theta.is_finite() {
            return Err(Error::Gauge(format!("theta diverged at t = {t}")));
        }
        ts.push(t);
        thetas.push(theta);

        // Unit-gradient identity |grad f| = 1 in the gauge metric, in the
        // form f_t = -theta e^t with sinh f = theta w.
        let (w, wt) = model.w_and_wt(t);
        let theta_t = theta_rhs(&model, t, theta);
        let f_t = (theta_t * w + theta * wt) / (1.0 + theta * theta * w * w).sqrt();
        identity_err = identity_err.max((f_t + theta * t.exp()).abs());
        if t <= -0.01 {
            // Closer to the boundary the cubic deviation sits under the
            // integration noise; skip that stretch for the ratio.
            let dev = (theta * theta * (2.0 * t).exp() - 1.0).abs();
            gamma_coeff = gamma_coeff.max(dev / t.abs().powi(3));
        }
        if t <= t_end {
            break;
        }
    }

    // Boundary derivatives of theta and of f = asinh(theta w) by constrained
    // polynomial fits through the integrated samples.
    let theta_dev: Vec<f64> = thetas.iter().map(|&x| x - 1.0).collect();
    let ct = poly_fit(&ts, &theta_dev, &[1, 2, 3, 4, 5, 6, 7]);
    let theta_derivs = (ct[0], 2.0 * ct[1], 6.0 * ct[2]);

    let f_vals: Vec<f64> = ts
        .iter()
        .zip(&thetas)
        .map(|(&t, &th)| {
            let (w, _) = model.w_and_wt(t);
            (th * w).asinh()
        })
        .collect();
    let cf = poly_fit(&ts, &f_vals, &[1, 2, 3, 4, 5, 6, 7]);
    let f_derivs = (cf[0], 2.0 * cf[1], 6.0 * cf[2]);

    // Boundary chain of the defining function: central differences of the
    // smooth model around t = 0 (the model extends across 0 analytically).
    let eps = 1e-4;
    let w_of = |x: f64| model.w_and_wt(x).0;
    let rho_derivs = (
        (w_of(eps) - w_of(-eps)) / (2.0 * eps),
        (w_of(eps) - 2.0 * w_of(0.0) + w_of(-eps)) / (eps * eps),
        (w_of(2.0 * eps) - 2.0 * w_of(eps) + 2.0 * w_of(-eps) - w_of(-2.0 * eps))
            / (2.0 * eps * eps * eps),
    );
    let a0 = 0.5 * (model.a(1e-3) + model.a(-1e-3));
    let a_t = (model.a(1e-3) - model.a(-1e-3)) / 2e-3;

    let trace_coeff = -16.0 / 3.0 * extraction.u_ttt;
    Ok(CollarExpansion {
        u_boundary_value: 1.0,
        u_t: 0.0,
        u_tt: 0.0,
        u_ttt: extraction.u_ttt,
        theta_derivs,
        f_derivs,
        rho_derivs,
        a_derivs: (a0, a_t),
        trace_coeff,
        mass: trace_coeff.abs() / 4.0,
        gauge_identity_error: identity_err,
        gamma_deviation_coeff: gamma_coeff,
    })
}

/// Mass of a radial factor from the boundary fit: the angular integral
/// collapses and `mass = |trace| / 4 = (4/3) |u_ttt|`.
#[derive(Debug, Clone, Copy)]
pub struct MassResult {
    pub mass: f64,
    pub trace_coeff: f64,
    pub u_ttt: f64,
}

pub fn wang_mass(samples: &CollarSamples) -> Result<MassResult> {
    let extraction = extract_u_ttt(samples)?;
    let trace_coeff = -16.0 / 3.0 * extraction.u_ttt;
    Ok(MassResult {
        mass: trace_coeff.abs() / 4.0,
        trace_coeff,
        u_ttt: extraction.u_ttt,
    })
}

/// Mass through the full boundary-integral route: assembles the cubic tensor
/// `eta = -(8/3) u_ttt h` on a sphere grid, takes its trace, and evaluates
/// `(1/16 pi) sqrt((int tr)^2 - |int tr x|^2)` by quadrature. For radial
/// data the vector integral vanishes; this cross-checks the shortcut.
pub fn wang_mass_eta_route(u_ttt: f64, grid: &SphereGrid) -> f64 {
    // eta_ab = -(8/3) u_ttt h_ab; tr_h eta = -(16/3) u_ttt, constant.
    let tr = vec![-16.0 / 3.0 * u_ttt; grid.len()];
    let i0 = grid.integrate(&tr);
    let mut ix = [0.0_f64; 3];
    let mut field = vec![0.0; grid.len()];
    for axis in 0..3 {
        for i in 0..grid.n_theta {
            for j in 0..grid.n_phi {
                field[grid.idx(i, j)] = tr[grid.idx(i, j)] * grid.unit_vector(i, j)[axis];
            }
        }
        ix[axis] = grid.integrate(&field);
    }
    let v2 = ix[0] * ix[0] + ix[1] * ix[1] + ix[2] * ix[2];
    (i0 * i0 - v2).max(0.0).sqrt() / (16.0 * std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{make_params, FamilyEvaluator};

    #[test]
    fn unit_factor_extracts_zero() {
        let s = CollarSamples::from_radial(|_| Ok(1.0), -0.2, -0.02, 200).unwrap();
        let e = extract_u_ttt(&s).unwrap();
        assert!(e.u_ttt.abs() < 1e-12);
        let m = wang_mass(&s).unwrap();
        assert_eq!(m.mass, 0.0);
    }

    #[test]
    fn synthetic_cubic_recovers_exactly() {
        let kappa = 0.25;
        let s = CollarSamples::from_radial(|_| Ok(1.0), -0.2, -0.02, 200).unwrap();
        let u: Vec<f64> = s.t.iter().map(|&t| 1.0 + kappa * (-t).powi(3)).collect();
        let s = CollarSamples::new(s.t, u).unwrap();
        let e = extract_u_ttt(&s).unwrap();
        assert!(
            (e.u_ttt - (-6.0 * kappa)).abs() < 1e-6,
            "u_ttt = {} vs {}",
            e.u_ttt,
            -6.0 * kappa
        );
    }

    #[test]
    fn family_u_ttt_scales_linearly_in_mass() {
        // Oracle (asymptotics of the clock integral): phi ~ 1 + (M/2) e^{-3 rho},
        // whose collar form is 1 - (M/16) t^3 + O(t^5), so u_ttt = -3M/8.
        let mut ratios = Vec::new();
        for m in [0.5, 1.0, 2.0] {
            let ev = FamilyEvaluator::new(make_params(m).unwrap()).unwrap();
            let s = CollarSamples::from_radial(|rho| ev.phi(rho, 0), -0.2, -0.02, 400).unwrap();
            let e = extract_u_ttt(&s).unwrap();
            ratios.push(e.u_ttt / m);
            assert!(e.window_sensitivity < 0.05);
        }
        for r in &ratios {
            assert!(
                (r - (-0.375)).abs() < 0.375 * 0.01,
                "u_ttt / M = {r} should be -3/8 within 1%"
            );
        }
        let spread = (ratios[0] - ratios[2]).abs() / 0.375;
        assert!(spread < 0.01, "ratio drift {spread:.3e}");
    }

    #[test]
    fn noisy_window_is_extraction_error() {
        let s = CollarSamples::from_radial(|_| Ok(1.0), -0.2, -0.02, 200).unwrap();
        let u: Vec<f64> =
            s.t.iter()
                .enumerate()
                .map(|(k, &t)| 1.0 + 0.0001 * (-t).powi(3) + 1e-4 * ((k * 37) % 5) as f64)
                .collect();
        let s = CollarSamples::new(s.t, u).unwrap();
        assert!(matches!(extract_u_ttt(&s), Err(Error::Extraction(_))));
    }

    #[test]
    fn hyperbolic_gauge_is_exact() {
        // For u == 1 the gauge solves to theta = e^{-t} and f = -t exactly:
        // all the boundary constants follow.
        let s = CollarSamples::from_radial(|_| Ok(1.0), -0.2, -0.02, 200).unwrap();
        let g = collar_gauge(&s).unwrap();
        let (tt, ttt, tttt) = g.theta_derivs;
        assert!((tt + 1.0).abs() < 1e-8, "theta_t = {tt}");
        assert!((ttt - 1.0).abs() < 1e-7, "theta_tt = {ttt}");
        assert!((tttt + 1.0).abs() < 1e-5, "theta_ttt = {tttt}");
        let (ft, ftt, fttt) = g.f_derivs;
        assert!((ft + 1.0).abs() < 1e-8);
        assert!(ftt.abs() < 1e-7, "f_tt = {ftt}");
        assert!(fttt.abs() < 1e-5, "f_ttt = {fttt}");
        assert_eq!(g.mass, 0.0);
        assert!(
            g.gamma_deviation_coeff < 1e-8,
            "gamma coeff {}",
            g.gamma_deviation_coeff
        );
        assert!(g.gauge_identity_error < 1e-10);
        // Defining-function chain: w_t = -1, w_tt = -2, w_ttt = -4.
        assert!((g.rho_derivs.0 + 1.0).abs() < 1e-6);
        assert!((g.rho_derivs.1 + 2.0).abs() < 1e-5);
        assert!((g.rho_derivs.2 + 4.0).abs() < 1e-3);
        // a(0) = 2, a_t(0) = 0.
        assert!((g.a_derivs.0 - 2.0).abs() < 1e-5);
        assert!(g.a_derivs.1.abs() < 1e-4);
    }

    #[test]
    fn family_gauge_reproduces_derivative_chain() {
        for m in [0.5, 1.0, 2.0] {
            let ev = FamilyEvaluator::new(make_params(m).unwrap()).unwrap();
            let s = CollarSamples::from_radial(|rho| ev.phi(rho, 0), -0.2, -0.02, 400).unwrap();
            let g = collar_gauge(&s).unwrap();
            let (tt, ttt, tttt) = g.theta_derivs;
            assert!((tt + 1.0).abs() < 1e-6, "theta_t = {tt} at M={m}");
            assert!((ttt - 1.0).abs() < 1e-6, "theta_tt = {ttt} at M={m}");
            let expect = -1.0 + 8.0 / 3.0 * g.u_ttt;
            assert!(
                (tttt - expect).abs() < 1e-4,
                "theta_ttt = {tttt} vs -1 + (8/3) u_ttt = {expect} at M={m}"
            );
            let (ft, ftt, fttt) = g.f_derivs;
            assert!((ft + 1.0).abs() < 1e-6);
            // The defining-function route forces f_tt(0) = 0 for every
            // admissible u (w(0) = 0 kills the theta_tt term and
            // 2 theta_t w_t + theta w_tt = 2 - 2 = 0); the constant is
            // mass-independent.
            assert!(ftt.abs() < 1e-5, "f_tt = {ftt} at M={m}");
            assert!(fttt.abs() < 1e-4, "f_ttt = {fttt} at M={m}");
            assert!(g.gauge_identity_error < 1e-6);
            // Angular block rounds off at cubic order with a stable constant.
            assert!(g.gamma_deviation_coeff.is_finite() && g.gamma_deviation_coeff > 0.0);
        }
    }

    #[test]
    fn mass_routes_agree_and_grow_with_mass() {
        let grid = SphereGrid::new(32, 64).unwrap();
        let mut last = 0.0;
        for m in [0.5, 1.0, 2.0] {
            let ev = FamilyEvaluator::new(make_params(m).unwrap()).unwrap();
            let s = CollarSamples::from_radial(|rho| ev.phi(rho, 0), -0.2, -0.02, 400).unwrap();
            let direct = wang_mass(&s).unwrap();
            let eta = wang_mass_eta_route(direct.u_ttt, &grid);
            assert!(
                (direct.mass - eta).abs() < 1e-8,
                "routes differ: {} vs {eta}",
                direct.mass
            );
            assert!(direct.mass > last, "mass must increase with M");
            last = direct.mass;
        }
    }

    #[test]
    fn second_moment_vanishes_for_radial_trace() {
        let grid = SphereGrid::new(16, 32).unwrap();
        let mut field = vec![0.0; grid.len()];
        for axis in 0..3 {
            for i in 0..grid.n_theta {
                for j in 0..grid.n_phi {
                    field[grid.idx(i, j)] = 0.7 * grid.unit_vector(i, j)[axis];
                }
            }
            assert!(grid.integrate(&field).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_difference_is_lipschitz_in_the_profile_gap() {
        // Two factors differing by eps e^{-3 rho} have u_ttt differing by
        // 6 eps / 8, so |mass1 - mass2| <= eps; assert with C1 = 1.05.
        let eps = 1e-4;
        let ev = FamilyEvaluator::new(make_params(1.0).unwrap()).unwrap();
        let s1 = CollarSamples::from_radial(|rho| ev.phi(rho, 0), -0.2, -0.02, 400).unwrap();
        let s2 = CollarSamples::new(
            s1.t.clone(),
            s1.t.iter()
                .zip(&s1.u)
                .map(|(&t, &u)| {
                    let rho = ChartPoint::from_collar(t).unwrap().rho;
                    u + eps * (-3.0 * rho).exp()
                })
                .collect(),
        )
        .unwrap();
        let m1 = wang_mass(&s1).unwrap().mass;
        let m2 = wang_mass(&s2).unwrap().mass;
        assert!(
            (m1 - m2).abs() <= 1.05 * eps,
            "mass gap {} above C1 eps = {}",
            (m1 - m2).abs(),
            1.05 * eps
        );
    }
}
