//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Root of a continuous, monotone `g` on `[lo, hi]` with `g(lo) g(hi) <= 0`,
/// located to absolute tolerance `tol` in the argument. Brent's method with a
/// bisection fallback, so convergence is guaranteed for any sign-changing
/// bracket.
pub fn find_root_monotone(g: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("bad bracket [{lo}, {hi}]")));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = g(a);
    let mut fb = g(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::Bracket {
            what: "g".into(),
            lo,
            hi,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0));
                q = (q0 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_cubic_root() {
        let r = find_root_monotone(|x| x + x * x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 1.0).abs() < 1e-12, "got {r}");
    }

    #[test]
    fn cubic_root_matches_bisection_oracle() {
        // Independent oracle: plain bisection to 1e-12.
        let g = |x: f64| x + x * x * x - 1.0;
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        while hi - lo > 1e-13 {
            let m = 0.5 * (lo + hi);
            if g(lo) * g(m) <= 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert!((oracle - 0.682327803828019).abs() < 1e-12);

        let r = find_root_monotone(g, 0.0, 1.0, 1e-14).unwrap();
        assert!((r - oracle).abs() < 1e-12, "brent {r} vs oracle {oracle}");
    }

    #[test]
    fn missing_sign_change_is_bracket_error() {
        assert!(matches!(
            find_root_monotone(|x| x - 5.0, 0.0, 1.0, 1e-12),
            Err(Error::Bracket { .. })
        ));
    }
}
