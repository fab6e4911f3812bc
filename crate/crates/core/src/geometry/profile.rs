//! Sampled radial functions with derivative access.
//!
//! A [`RadialProfile`] stores samples on a strictly increasing grid and
//! interpolates with sliding quintic (6-point) polynomials, precomputed per
//! interval in a scaled local variable. Derivatives up to order 3 come from
//! differentiating the local polynomial, never from re-differencing samples.
//! Evaluation outside the grid range is an error, never extrapolation.

use crate::error::{Error, Result};

const WINDOW: usize = 6;

#[derive(Debug, Clone)]
pub struct RadialProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
    // Degree-5 coefficients per interval, in u = (x - mid) / scale.
    coeffs: Vec<[f64; WINDOW]>,
    mids: Vec<f64>,
    scales: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Grid(format!(
                "grid/value length mismatch: {} vs {}",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < WINDOW {
            return Err(Error::Grid(format!(
                "need at least {WINDOW} nodes, got {}",
                grid.len()
            )));
        }
        if grid[0] < 0.0 {
            return Err(Error::Grid(format!(
                "grid must satisfy rho >= 0, starts at {}",
                grid[0]
            )));
        }
        for w in grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Grid(format!(
                    "grid must be strictly increasing, found {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("non-finite sample value".into()));
        }

        let n = grid.len();
        let mut coeffs = Vec::with_capacity(n - 1);
        let mut mids = Vec::with_capacity(n - 1);
        let mut scales = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let w0 = i.saturating_sub(2).min(n - WINDOW);
            let xs = &grid[w0..w0 + WINDOW];
            let ys = &values[w0..w0 + WINDOW];
            let mid = 0.5 * (xs[0] + xs[WINDOW - 1]);
            let scale = 0.5 * (xs[WINDOW - 1] - xs[0]);
            coeffs.push(fit_window(xs, ys, mid, scale));
            mids.push(mid);
            scales.push(scale);
        }

        Ok(RadialProfile {
            grid,
            values,
            coeffs,
            mids,
            scales,
        })
    }

    pub fn from_fn(f: impl Fn(f64) -> f64, grid: Vec<f64>) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn min_rho(&self) -> f64 {
        self.grid[0]
    }

    pub fn max_rho(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min_rho() && x <= self.max_rho()
    }

    /// Interpolated value or derivative (`order` in `0..=3`) at `x`.
    pub fn eval(&self, x: f64, order: usize) -> Result<f64> {
        if order > 3 {
            return Err(Error::Domain(format!("derivative order {order} > 3")));
        }
        if !x.is_finite() || !self.contains(x) {
            return Err(Error::Range(format!(
                "x = {x} outside sampled range [{}, {}]",
                self.min_rho(),
                self.max_rho()
            )));
        }
        let i = match self.grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
            Ok(j) => {
                if order == 0 {
                    // The interpolant passes through the samples; avoid the
                    // ulp-level Horner rounding at exact node queries.
                    return Ok(self.values[j]);
                }
                j.min(self.grid.len() - 2)
            }
            Err(j) => j - 1,
        };
        let u = (x - self.mids[i]) / self.scales[i];
        let c = &self.coeffs[i];
        let mut acc = 0.0;
        match order {
            0 => {
                for k in (0..WINDOW).rev() {
                    acc = acc * u + c[k];
                }
            }
            1 => {
                for k in (1..WINDOW).rev() {
                    acc = acc * u + c[k] * k as f64;
                }
                acc /= self.scales[i];
            }
            2 => {
                for k in (2..WINDOW).rev() {
                    acc = acc * u + c[k] * (k * (k - 1)) as f64;
                }
                acc /= self.scales[i] * self.scales[i];
            }
            _ => {
                for k in (3..WINDOW).rev() {
                    acc = acc * u + c[k] * (k * (k - 1) * (k - 2)) as f64;
                }
                acc /= self.scales[i].powi(3);
            }
        }
        Ok(acc)
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.eval(x, 0)
    }

    pub fn d1(&self, x: f64) -> Result<f64> {
        self.eval(x, 1)
    }

    pub fn d2(&self, x: f64) -> Result<f64> {
        self.eval(x, 2)
    }

    pub fn d3(&self, x: f64) -> Result<f64> {
        self.eval(x, 3)
    }

    /// Pointwise map of the sample values onto the same grid.
    pub fn map_values(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self
            .grid
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| f(x, v))
            .collect();
        Self::new(self.grid.clone(), values)
    }
}

/// Interpolating polynomial through six points, coefficients in
/// `u = (x - mid)/scale`. Solved as a Vandermonde system; the local scaling
/// keeps the system well conditioned on strongly graded grids.
fn fit_window(xs: &[f64], ys: &[f64], mid: f64, scale: f64) -> [f64; WINDOW] {
    let mut a = [[0.0_f64; WINDOW + 1]; WINDOW];
    for (r, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let u = (x - mid) / scale;
        let mut p = 1.0;
        for c in 0..WINDOW {
            a[r][c] = p;
            p *= u;
        }
        a[r][WINDOW] = y;
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..WINDOW {
        let mut piv = col;
        for r in col + 1..WINDOW {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        a.swap(col, piv);
        let d = a[col][col];
        for r in col + 1..WINDOW {
            let m = a[r][col] / d;
            for c in col..=WINDOW {
                a[r][c] -= m * a[col][c];
            }
        }
    }
    let mut out = [0.0_f64; WINDOW];
    for col in (0..WINDOW).rev() {
        let mut s = a[col][WINDOW];
        for c in col + 1..WINDOW {
            s -= a[col][c] * out[c];
        }
        out[col] = s / a[col][col];
    }
    out
}

/// Uniform grid helper: `n` nodes from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && hi > lo);
    let h = (hi - lo) / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| lo + h * i as f64).collect();
    g[n - 1] = hi;
    g
}
