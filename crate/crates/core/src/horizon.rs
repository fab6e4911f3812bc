//! Graph surfaces of constant mean curvature in conformally flat annuli.
//!
//! A metric `Phi^4 (dr^2 + r^2 dsigma^2)` on an annulus and a graph
//! `r = v(sigma)` determine the mean-curvature field `H(Phi, v)`; with the
//! outward normal a Euclidean round sphere of radius `c` has `H = +2/c`.
//! Around a radial factor and a constant graph the derivative of the inward
//! field is `phi^{-2} c^{-2} lap_S v - Theta v` with
//! `Theta = 3 phi^2 (1 - H^2/4) + phi^{-2} c^{-2}`, which is negative
//! definite for `|H| <= 2`; a damped Newton iteration with an
//! exact-sparsity finite-difference Jacobian locates the CMC surfaces.
//!
//! The sphere discretization is a cell-centered latitude-longitude grid:
//! pole rows sit half a spacing away from the poles, the Laplacian is the
//! flux form whose polar flux vanishes identically, and area weights are
//! exact spherical bands (constants integrate to 4 pi at machine precision).

use crate::error::{Error, Result};
use crate::family::FamilyEvaluator;
use crate::geometry::chart::rho_of_tau;
use crate::geometry::profile::RadialProfile;
use crate::geometry::roots::find_root_monotone;

/// Cell-centered latitude-longitude grid with quadrature weights and
/// discrete angular operators.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    theta: Vec<f64>,
    phi: Vec<f64>,
    sin_theta: Vec<f64>,
    weights: Vec<f64>,
    d_theta: f64,
    d_phi: f64,
    /// sin at the cell edges, including the vanishing polar edges.
    sin_edge: Vec<f64>,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 4 || n_phi < 8 || n_phi % 2 != 0 {
            return Err(Error::Domain(format!(
                "sphere grid needs n_theta >= 4 and even n_phi >= 8, got {n_theta} x {n_phi}"
            )));
        }
        let d_theta = std::f64::consts::PI / n_theta as f64;
        let d_phi = 2.0 * std::f64::consts::PI / n_phi as f64;
        let theta: Vec<f64> = (0..n_theta).map(|i| (i as f64 + 0.5) * d_theta).collect();
        let phi: Vec<f64> = (0..n_phi).map(|j| j as f64 * d_phi).collect();
        let sin_theta: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
        let sin_edge: Vec<f64> = (0..=n_theta).map(|i| (i as f64 * d_theta).sin()).collect();
        // Exact band areas: w_i = d_phi (cos theta_{i-1/2} - cos theta_{i+1/2}).
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for i in 0..n_theta {
            let band = d_phi * ((i as f64 * d_theta).cos() - ((i + 1) as f64 * d_theta).cos());
            for _ in 0..n_phi {
                weights.push(band);
            }
        }
        Ok(SphereGrid {
            n_theta,
            n_phi,
            theta,
            phi,
            sin_theta,
            weights,
            d_theta,
            d_phi,
            sin_edge,
        })
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n_phi + j
    }

    pub fn theta_at(&self, i: usize) -> f64 {
        self.theta[i]
    }

    pub fn phi_at(&self, j: usize) -> f64 {
        self.phi[j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Unit position vector of a node.
    pub fn unit_vector(&self, i: usize, j: usize) -> [f64; 3] {
        let (st, ct) = (self.sin_theta[i], self.theta[i].cos());
        let (sp, cp) = (self.phi[j].sin(), self.phi[j].cos());
        [st * cp, st * sp, ct]
    }

    /// Evaluates a closure on every node.
    pub fn field(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n_theta {
            for j in 0..self.n_phi {
                out.push(f(self.theta[i], self.phi[j]));
            }
        }
        out
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    /// Neighbor index one row north (toward theta = 0), crossing the pole
    /// onto the antipodal meridian when necessary.
    fn north(&self, i: usize, j: usize) -> usize {
        if i == 0 {
            self.idx(0, (j + self.n_phi / 2) % self.n_phi)
        } else {
            self.idx(i - 1, j)
        }
    }

    fn south(&self, i: usize, j: usize) -> usize {
        if i + 1 == self.n_theta {
            self.idx(i, (j + self.n_phi / 2) % self.n_phi)
        } else {
            self.idx(i + 1, j)
        }
    }

    fn east(&self, i: usize, j: usize) -> usize {
        self.idx(i, (j + 1) % self.n_phi)
    }

    fn west(&self, i: usize, j: usize) -> usize {
        self.idx(i, (j + self.n_phi - 1) % self.n_phi)
    }

    /// Colatitude derivative by central differences (the across-pole sample
    /// keeps second order at the pole rows).
    pub fn d_theta_at(&self, v: &[f64], i: usize, j: usize) -> f64 {
        (v[self.south(i, j)] - v[self.north(i, j)]) / (2.0 * self.d_theta)
    }

    /// Longitude derivative (plain, not yet divided by sin theta).
    pub fn d_phi_at(&self, v: &[f64], i: usize, j: usize) -> f64 {
        (v[self.east(i, j)] - v[self.west(i, j)]) / (2.0 * self.d_phi)
    }

    /// `|grad v|^2` on the unit sphere at one node.
    pub fn grad_sq_at(&self, v: &[f64], i: usize, j: usize) -> f64 {
        let vt = self.d_theta_at(v, i, j);
        let vp = self.d_phi_at(v, i, j) / self.sin_theta[i];
        vt * vt + vp * vp
    }

    /// Spherical Laplacian at one node, flux form; the polar edge fluxes
    /// vanish with the cell-centered layout.
    pub fn laplacian_at(&self, v: &[f64], i: usize, j: usize) -> f64 {
        let c = v[self.idx(i, j)];
        let south_flux = if i + 1 == self.n_theta {
            0.0
        } else {
            self.sin_edge[i + 1] * (v[self.idx(i + 1, j)] - c)
        };
        let north_flux = if i == 0 {
            0.0
        } else {
            self.sin_edge[i] * (c - v[self.idx(i - 1, j)])
        };
        let lap_theta =
            (south_flux - north_flux) / (self.sin_theta[i] * self.d_theta * self.d_theta);
        let lap_phi = (v[self.east(i, j)] - 2.0 * c + v[self.west(i, j)])
            / (self.sin_theta[i] * self.sin_theta[i] * self.d_phi * self.d_phi);
        lap_theta + lap_phi
    }

    pub fn laplacian(&self, v: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n_theta {
            for j in 0..self.n_phi {
                out.push(self.laplacian_at(v, i, j));
            }
        }
        out
    }

    /// Node indices the discrete mean curvature at `(i, j)` can depend on:
    /// a Chebyshev-2 patch with pole and seam wrapping.
    fn footprint(&self, i: usize, j: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(25);
        for di in -2_i64..=2 {
            for dj in -2_i64..=2 {
                let mut ii = i as i64 + di;
                let mut jj = j as i64 + dj;
                if ii < 0 {
                    ii = -1 - ii;
                    jj += self.n_phi as i64 / 2;
                } else if ii >= self.n_theta as i64 {
                    ii = 2 * self.n_theta as i64 - 1 - ii;
                    jj += self.n_phi as i64 / 2;
                }
                let jj = jj.rem_euclid(self.n_phi as i64) as usize;
                let k = self.idx(ii as usize, jj);
                if !out.contains(&k) {
                    out.push(k);
                }
            }
        }
        out
    }
}

/// Common unnormalized spherical harmonics for perturbations and tests.
pub mod harmonics {
    pub fn y10(theta: f64, _phi: f64) -> f64 {
        theta.cos()
    }

    pub fn y20(theta: f64, _phi: f64) -> f64 {
        0.5 * (3.0 * theta.cos() * theta.cos() - 1.0)
    }

    pub fn y22(theta: f64, phi: f64) -> f64 {
        theta.sin() * theta.sin() * (2.0 * phi).cos()
    }

    /// Deterministic smooth angular field: a low-degree harmonic mix keyed
    /// by a splitmix64 seed.
    pub fn random_smooth(seed: u64) -> impl Fn(f64, f64) -> f64 {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = s;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            (z ^ (z >> 31)) as f64 / u64::MAX as f64 - 0.5
        };
        let c: Vec<f64> = (0..4).map(|_| next()).collect();
        move |theta: f64, phi: f64| {
            c[0] * y10(theta, phi)
                + c[1] * y20(theta, phi)
                + c[2] * y22(theta, phi)
                + c[3] * theta.sin() * phi.sin()
        }
    }
}

enum Columns {
    Radial(RadialProfile),
    Full(Vec<RadialProfile>),
}

impl std::fmt::Debug for Columns {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Columns::Radial(_) => write!(f, "Radial"),
            Columns::Full(c) => write!(f, "Full({})", c.len()),
        }
    }
}

/// Conformal factor on an `(r, sigma)` product grid over the annulus, with
/// radial derivative access per angular column.
#[derive(Debug)]
pub struct AmbientFactor {
    sphere: SphereGrid,
    columns: Columns,
    r_lo: f64,
    r_hi: f64,
}

impl AmbientFactor {
    /// Radial factor from a sampled profile of the flat-chart factor.
    pub fn radial(sphere: SphereGrid, profile: RadialProfile) -> Result<Self> {
        let (r_lo, r_hi) = (profile.min_rho(), profile.max_rho());
        if profile.values().iter().any(|&v| v <= 0.0) {
            return Err(Error::Precondition(
                "conformal factor must be positive".into(),
            ));
        }
        Ok(AmbientFactor {
            sphere,
            columns: Columns::Radial(profile),
            r_lo,
            r_hi,
        })
    }

    /// Samples `f(r, theta, phi)` on the product grid.
    pub fn from_fn(
        sphere: SphereGrid,
        r_lo: f64,
        r_hi: f64,
        n_r: usize,
        f: impl Fn(f64, f64, f64) -> f64,
    ) -> Result<Self> {
        if !(r_lo > 0.0 && r_hi > r_lo) || n_r < 8 {
            return Err(Error::Domain("bad annulus for ambient factor".into()));
        }
        let grid = crate::geometry::profile::uniform_grid(r_lo, r_hi, n_r);
        let mut columns = Vec::with_capacity(sphere.len());
        for i in 0..sphere.n_theta {
            for j in 0..sphere.n_phi {
                let (t, p) = (sphere.theta_at(i), sphere.phi_at(j));
                let profile = RadialProfile::from_fn(|r| f(r, t, p), grid.clone())?;
                if profile.values().iter().any(|&v| v <= 0.0) {
                    return Err(Error::Precondition(
                        "conformal factor must be positive".into(),
                    ));
                }
                columns.push(profile);
            }
        }
        Ok(AmbientFactor {
            sphere,
            columns: Columns::Full(columns),
            r_lo,
            r_hi,
        })
    }

    /// Ball-model adapter: the hyperbolic-conformal factor `u(rho)` becomes
    /// the flat-chart factor `u(rho(tau)) sqrt(2/(1 - tau^2))`.
    pub fn from_hyperbolic_radial(
        sphere: SphereGrid,
        u_of_rho: impl Fn(f64) -> Result<f64>,
        tau_lo: f64,
        tau_hi: f64,
        n_r: usize,
    ) -> Result<Self> {
        let grid = crate::geometry::profile::uniform_grid(tau_lo, tau_hi, n_r);
        let values = grid
            .iter()
            .map(|&tau| Ok(u_of_rho(rho_of_tau(tau))? * (2.0 / (1.0 - tau * tau)).sqrt()))
            .collect::<Result<Vec<_>>>()?;
        Self::radial(sphere, RadialProfile::new(grid, values)?)
    }

    /// As [`Self::from_hyperbolic_radial`] for a family member.
    pub fn from_family(
        sphere: SphereGrid,
        ev: &FamilyEvaluator,
        tau_lo: f64,
        tau_hi: f64,
        n_r: usize,
    ) -> Result<Self> {
        if rho_of_tau(tau_lo) <= ev.rho_min() {
            return Err(Error::Domain(format!(
                "annulus inner radius {tau_lo} reaches below the factor's domain"
            )));
        }
        Self::from_hyperbolic_radial(sphere, |rho| ev.phi(rho, 0), tau_lo, tau_hi, n_r)
    }

    pub fn sphere(&self) -> &SphereGrid {
        &self.sphere
    }

    pub fn annulus(&self) -> (f64, f64) {
        (self.r_lo, self.r_hi)
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.columns, Columns::Radial(_))
    }

    fn column(&self, node: usize) -> &RadialProfile {
        match &self.columns {
            Columns::Radial(p) => p,
            Columns::Full(c) => &c[node],
        }
    }

    pub fn value(&self, node: usize, r: f64) -> Result<f64> {
        self.column(node).value(r)
    }

    pub fn d_r(&self, node: usize, r: f64) -> Result<f64> {
        self.column(node).d1(r)
    }

    pub fn d_rr(&self, node: usize, r: f64) -> Result<f64> {
        self.column(node).d2(r)
    }
}

/// A graph surface `r = v(sigma)` with its computed mean-curvature field.
#[derive(Debug, Clone)]
pub struct GraphSurface {
    pub values: Vec<f64>,
    pub h_field: Vec<f64>,
    pub residual_sup: f64,
    pub iterations: usize,
}

impl GraphSurface {
    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Mean curvature of the graph `r = v(sigma)` at one node, outward normal.
fn h_at_node(factor: &AmbientFactor, v: &[f64], i: usize, j: usize) -> Result<f64> {
    let g = factor.sphere();
    let node = g.idx(i, j);
    let r0 = v[node];
    if r0 <= factor.r_lo || r0 >= factor.r_hi {
        return Err(Error::Range(format!(
            "surface left the annulus: v = {r0} at node ({i}, {j})"
        )));
    }

    let vt = g.d_theta_at(v, i, j);
    let vp = g.d_phi_at(v, i, j);
    let grad2 = {
        let p = vp / g.sin_theta[i];
        vt * vt + p * p
    };
    let psi = (1.0 + grad2 / (r0 * r0)).sqrt();
    let inv_psi_r = grad2 / (r0 * r0 * r0 * psi * psi * psi);

    let phi = factor.value(node, r0)?;
    let phi_r = factor.d_r(node, r0)?;
    let q = phi * phi * phi * phi;
    let log_q_r = 4.0 * phi_r / phi;
    let lap = g.laplacian_at(v, i, j);

    // Angular gradient of q * psi^{-1} at the fixed radius r0.
    let a_at = |n: usize| -> Result<f64> {
        let (ii, jj) = (n / g.n_phi, n % g.n_phi);
        let p = factor.value(n, r0)?;
        let g2 = g.grad_sq_at(v, ii, jj);
        Ok(p * p * p * p / (1.0 + g2 / (r0 * r0)).sqrt())
    };
    let a_theta = (a_at(g.south(i, j))? - a_at(g.north(i, j))?) / (2.0 * g.d_theta);
    let a_phi = (a_at(g.east(i, j))? - a_at(g.west(i, j))?) / (2.0 * g.d_phi);
    let inner = a_theta * vt + a_phi * vp / (g.sin_theta[i] * g.sin_theta[i]);

    let h_inward = (1.0 / (phi * phi))
        * (-(log_q_r + 2.0 / r0) / psi - inv_psi_r + lap / (psi * r0 * r0) + inner / (q * r0 * r0));
    Ok(-h_inward)
}

/// Mean-curvature field of a graph surface, outward normal convention.
pub fn mean_curvature_graph(factor: &AmbientFactor, v: &[f64]) -> Result<Vec<f64>> {
    let g = factor.sphere();
    if v.len() != g.len() {
        return Err(Error::Grid("surface field length mismatch".into()));
    }
    let mut out = Vec::with_capacity(v.len());
    for i in 0..g.n_theta {
        for j in 0..g.n_phi {
            out.push(h_at_node(factor, v, i, j)?);
        }
    }
    Ok(out)
}

/// Radial mean curvature `H(r)` of the sphere `r = const` in a radial factor.
pub fn radial_mean_curvature(factor: &AmbientFactor, r: f64) -> Result<f64> {
    let phi = factor.value(0, r)?;
    let phi_r = factor.d_r(0, r)?;
    Ok((4.0 * phi_r / phi + 2.0 / r) / (phi * phi))
}

/// Linearization data of the mean-curvature operator around a radial factor
/// and the constant sphere `r = c`.
#[derive(Debug, Clone, Copy)]
pub struct Linearization {
    pub c: f64,
    pub phi: f64,
    /// Outward mean curvature of the base sphere.
    pub h: f64,
    /// `Theta = 3 phi^2 (1 - H^2/4) + phi^{-2} c^{-2}`, positive for |H| <= 2.
    pub theta: f64,
}

/// `Theta = 3 phi^2 (1 - H^2/4) + phi^{-2} c^{-2}`; the curvature part
/// cancels identically at `|H| = 2`.
pub fn theta_coefficient(phi: f64, c: f64, h: f64) -> f64 {
    3.0 * phi * phi * (1.0 - h * h / 4.0) + 1.0 / (phi * phi * c * c)
}

/// Computes the linearization coefficients at `r = c`, verifying that the
/// radial factor satisfies the curvature identity `8 lap_0 phi = 6 phi^5`
/// there (scalar curvature -6 in the flat chart).
pub fn cmc_linearization_at(factor: &AmbientFactor, c: f64) -> Result<Linearization> {
    if !factor.is_radial() {
        return Err(Error::UnsupportedBase(
            "linearization requires a radial ambient factor".into(),
        ));
    }
    let phi = factor.value(0, c)?;
    let phi_r = factor.d_r(0, c)?;
    let phi_rr = factor.d_rr(0, c)?;
    let lap0 = phi_rr + 2.0 * phi_r / c;
    let identity = 8.0 * lap0 - 6.0 * phi.powi(5);
    if identity.abs() > 1e-5 * phi.powi(5).max(1.0) {
        return Err(Error::Precondition(format!(
            "base factor violates the -6 curvature identity at r = {c}: {identity:.3e}"
        )));
    }
    let h = (4.0 * phi_r / phi + 2.0 / c) / (phi * phi);
    let theta = theta_coefficient(phi, c, h);
    Ok(Linearization { c, phi, h, theta })
}

/// Applies the linearized operator `phi^{-2} c^{-2} lap_S eta - Theta eta`
/// (the derivative of the inward-convention mean curvature; the outward
/// derivative is its negative).
pub fn cmc_linearization(factor: &AmbientFactor, c: f64, eta: &[f64]) -> Result<Vec<f64>> {
    let lin = cmc_linearization_at(factor, c)?;
    let g = factor.sphere();
    if eta.len() != g.len() {
        return Err(Error::Grid("eta field length mismatch".into()));
    }
    let coef = 1.0 / (lin.phi * lin.phi * c * c);
    let mut out = Vec::with_capacity(eta.len());
    for i in 0..g.n_theta {
        for j in 0..g.n_phi {
            out.push(coef * g.laplacian_at(eta, i, j) - lin.theta * eta[g.idx(i, j)]);
        }
    }
    Ok(out)
}

/// Root of the radial mean curvature `H(r) = target` on the annulus.
pub fn radial_cmc_root(factor: &AmbientFactor, target: f64) -> Result<f64> {
    let (r_lo, r_hi) = factor.annulus();
    let margin = 1e-6 * (r_hi - r_lo);
    let lo = r_lo + margin;
    let hi = r_hi - margin;
    let f = |r: f64| radial_mean_curvature(factor, r).unwrap() - target;
    // Scan for a sign-change bracket, then refine.
    let n = 256;
    let mut prev = (lo, f(lo));
    for k in 1..=n {
        let r = lo + (hi - lo) * k as f64 / n as f64;
        let val = f(r);
        if prev.1 == 0.0 {
            return Ok(prev.0);
        }
        if prev.1 * val <= 0.0 {
            return find_root_monotone(f, prev.0, r, 1e-13);
        }
        prev = (r, val);
    }
    Err(Error::Bracket {
        what: format!("H - {target}"),
        lo,
        hi,
    })
}

const CMC_TOL: f64 = 1e-10;
const CMC_REQUIRED: f64 = 1e-8;
const CMC_MAX_ITER: usize = 30;

/// Locates the graph surface with constant mean curvature `target`.
///
/// For a radial factor this is the radial root; otherwise a damped Newton
/// iteration from `v_init` with an exact-sparsity finite-difference Jacobian.
pub fn find_cmc_surface(
    factor: &AmbientFactor,
    target: f64,
    v_init: &[f64],
) -> Result<GraphSurface> {
    let g = factor.sphere();
    if v_init.len() != g.len() {
        return Err(Error::Grid("initial surface length mismatch".into()));
    }
    if factor.is_radial() {
        let c = radial_cmc_root(factor, target)?;
        let values = vec![c; g.len()];
        let h_field = mean_curvature_graph(factor, &values)?;
        let residual_sup = h_field
            .iter()
            .fold(0.0_f64, |m, &h| m.max((h - target).abs()));
        if residual_sup > CMC_REQUIRED {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual: residual_sup,
            });
        }
        return Ok(GraphSurface {
            values,
            h_field,
            residual_sup,
            iterations: 0,
        });
    }

    let n = g.len();
    let mut v = v_init.to_vec();
    let mut h = mean_curvature_graph(factor, &v)?;
    let mut res: Vec<f64> = h.iter().map(|&x| x - target).collect();
    let mut norm = res.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));

    for iter in 0..CMC_MAX_ITER {
        if norm < CMC_TOL {
            return Ok(GraphSurface {
                values: v,
                h_field: h,
                residual_sup: norm,
                iterations: iter,
            });
        }
        // Jacobian by column-sparse central differences.
        let mut jac = vec![0.0_f64; n * n];
        for i in 0..g.n_theta {
            for j in 0..g.n_phi {
                let k = g.idx(i, j);
                let step = 1e-6 * v[k].abs().max(0.1);
                let rows = g.footprint(i, j);
                let mut vp = v.clone();
                vp[k] += step;
                let mut vm = v.clone();
                vm[k] -= step;
                for &row in &rows {
                    let (ri, rj) = (row / g.n_phi, row % g.n_phi);
                    let hp = h_at_node(factor, &vp, ri, rj)?;
                    let hm = h_at_node(factor, &vm, ri, rj)?;
                    jac[row * n + k] = (hp - hm) / (2.0 * step);
                }
            }
        }
        let mut rhs = res.clone();
        let delta = crate::geometry::fit::solve_dense(&mut jac, &mut rhs, n);

        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..9 {
            let trial: Vec<f64> = v
                .iter()
                .zip(&delta)
                .map(|(&x, &d)| x - lambda * d)
                .collect();
            match mean_curvature_graph(factor, &trial) {
                Ok(ht) => {
                    let rt: Vec<f64> = ht.iter().map(|&x| x - target).collect();
                    let nt = rt.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
                    if nt < norm {
                        v = trial;
                        h = ht;
                        res = rt;
                        norm = nt;
                        improved = true;
                        break;
                    }
                }
                Err(Error::Range(_)) => {}
                Err(e) => return Err(e),
            }
            lambda *= 0.5;
        }
        if !improved {
            return Err(Error::NoConvergence {
                iterations: iter,
                residual: norm,
            });
        }
    }
    if norm < CMC_REQUIRED {
        Ok(GraphSurface {
            values: v,
            h_field: h,
            residual_sup: norm,
            iterations: CMC_MAX_ITER,
        })
    } else {
        Err(Error::NoConvergence {
            iterations: CMC_MAX_ITER,
            residual: norm,
        })
    }
}

/// Strict nesting of surfaces ordered by increasing target curvature
/// (-2, 0, +2): each must lie strictly inside the next.
pub fn strictly_nested(surfaces: &[GraphSurface]) -> bool {
    surfaces.windows(2).all(|w| w[0].max() < w[1].min())
}

/// Largest perturbation amplitude (from the given ladder) at which the CMC
/// solve still converges; reports the implicit-function regime empirically.
pub fn probe_regime(
    build: impl Fn(f64) -> Result<AmbientFactor>,
    target: f64,
    v_init: &[f64],
    amplitudes: &[f64],
) -> Option<f64> {
    let mut best = None;
    for &amp in amplitudes {
        if build(amp)
            .and_then(|f| find_cmc_surface(&f, target, v_init))
            .is_ok()
        {
            best = Some(best.map_or(amp, |b: f64| b.max(amp)));
        }
    }
    best
}

/// Smallest-magnitude eigenvalue of the discrete linearized operator, by
/// inverse power iteration; negative when the operator is negative definite.
pub fn linearization_extreme_eigenvalue(factor: &AmbientFactor, c: f64) -> Result<f64> {
    let g = factor.sphere();
    let n = g.len();
    // Assemble the linear operator column by column.
    let mut mat = vec![0.0_f64; n * n];
    let mut basis = vec![0.0_f64; n];
    for k in 0..n {
        basis[k] = 1.0;
        let col = cmc_linearization(factor, c, &basis)?;
        for (row, &val) in col.iter().enumerate() {
            mat[row * n + k] = val;
        }
        basis[k] = 0.0;
    }
    let mut x = vec![1.0_f64; n];
    for (k, xi) in x.iter_mut().enumerate() {
        *xi += 1e-3 * (k as f64).sin();
    }
    let mut lambda = 0.0;
    for _ in 0..60 {
        let mut a = mat.clone();
        let mut b = x.clone();
        let y = crate::geometry::fit::solve_dense(&mut a, &mut b, n);
        let norm = y.iter().fold(0.0_f64, |m, &t| m.max(t.abs()));
        x = y.iter().map(|&t| t / norm).collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for row in 0..n {
            let mut s = 0.0;
            for kk in 0..n {
                s += mat[row * n + kk] * x[kk];
            }
            num += g.weights[row] * s * x[row];
            den += g.weights[row] * x[row] * x[row];
        }
        lambda = num / den;
    }
    Ok(lambda)
}
