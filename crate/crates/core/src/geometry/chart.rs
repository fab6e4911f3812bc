//! Coordinate charts for radial functions on hyperbolic 3-space.
//!
//! Three equivalent radial coordinates are used throughout:
//!   * `rho` — hyperbolic distance from the center, `rho >= 0`;
//!   * `tau` — Poincare ball radius, `tau = tanh(rho/2) in [0, 1)`;
//!   * `t`   — collar coordinate `t = log(tau) <= 0`, with `t -> 0` at the
//!     conformal boundary.
//!
//! Near the boundary `tau` carries almost no precision of its own, so a
//! [`ChartPoint`] also stores `1 - tau`; conversions route through it and
//! round-trip to 1e-14 across the whole working range.

use crate::error::{Error, Result};

/// One radial point expressed in all three charts.
///
/// At the center `tau = 0` the collar coordinate is `-inf`; it is stored as
/// the IEEE sentinel and such points must not be fed to collar operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub rho: f64,
    pub tau: f64,
    pub t: f64,
    one_minus_tau: f64,
}

impl ChartPoint {
    pub fn from_rho(rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::Domain(format!(
                "rho must be finite and >= 0, got {rho}"
            )));
        }
        let tau = (rho / 2.0).tanh();
        let one_minus_tau = 2.0 / ((-rho).exp_m1() + 2.0) * (-rho).exp();
        // 1 - tanh(rho/2) = 2 e^{-rho} / (1 + e^{-rho})
        let one_minus_tau = if one_minus_tau.is_finite() {
            one_minus_tau
        } else {
            1.0 - tau
        };
        Ok(ChartPoint {
            rho,
            tau,
            t: (-one_minus_tau).ln_1p(),
            one_minus_tau,
        })
    }

    pub fn from_tau(tau: f64) -> Result<Self> {
        if !tau.is_finite() || !(0.0..1.0).contains(&tau) {
            return Err(Error::Domain(format!("tau must lie in [0, 1), got {tau}")));
        }
        let one_minus_tau = 1.0 - tau;
        Ok(ChartPoint {
            rho: (1.0 + tau).ln() - one_minus_tau.ln(),
            tau,
            t: (-one_minus_tau).ln_1p(),
            one_minus_tau,
        })
    }

    pub fn from_collar(t: f64) -> Result<Self> {
        if t > 0.0 || t.is_nan() {
            return Err(Error::Domain(format!(
                "collar coordinate must be <= 0, got {t}"
            )));
        }
        let tau = t.exp();
        let one_minus_tau = -t.exp_m1();
        Ok(ChartPoint {
            rho: (1.0 + tau).ln() - one_minus_tau.ln(),
            tau,
            t,
            one_minus_tau,
        })
    }

    /// `1 - tau`, kept at full relative precision near the boundary.
    pub fn one_minus_tau(&self) -> f64 {
        self.one_minus_tau
    }

    /// True at the ball center, where the collar coordinate degenerates.
    pub fn is_center(&self) -> bool {
        self.tau == 0.0
    }
}

/// `rho` for a given ball radius.
pub fn rho_of_tau(tau: f64) -> f64 {
    2.0 * tau.atanh()
}

/// Ball radius for a given hyperbolic distance.
pub fn tau_of_rho(rho: f64) -> f64 {
    (rho / 2.0).tanh()
}
