//! Small dense least-squares helpers for boundary fits.

/// Least-squares coefficients of `y ~ sum_k c_k x^{powers[k]}` by QR
/// (modified Gram-Schmidt with one reorthogonalization pass). The abscissae
/// are scaled by their max magnitude first, so windows like `t in (-0.2, 0)`
/// stay well conditioned even for degree-7 bases.
pub fn poly_fit(xs: &[f64], ys: &[f64], powers: &[u32]) -> Vec<f64> {
    let m = powers.len();
    let n = xs.len();
    assert!(n == ys.len() && n >= m && m > 0);
    let scale = xs
        .iter()
        .fold(0.0_f64, |a, &x| a.max(x.abs()))
        .max(f64::MIN_POSITIVE);

    // Columns of the design matrix.
    let mut q: Vec<Vec<f64>> = powers
        .iter()
        .map(|&p| xs.iter().map(|&x| (x / scale).powi(p as i32)).collect())
        .collect();
    let mut r = vec![0.0_f64; m * m];
    for j in 0..m {
        for _pass in 0..2 {
            for i in 0..j {
                let qi = std::mem::take(&mut q[i]);
                let proj: f64 = qi.iter().zip(&q[j]).map(|(a, b)| a * b).sum();
                for (c, &qv) in q[j].iter_mut().zip(&qi) {
                    *c -= proj * qv;
                }
                q[i] = qi;
                r[i * m + j] += proj;
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        r[j * m + j] = norm;
        for c in q[j].iter_mut() {
            *c /= norm;
        }
    }
    // c = R^{-1} Q^T y by back substitution.
    let qty: Vec<f64> = (0..m)
        .map(|i| q[i].iter().zip(ys).map(|(a, b)| a * b).sum())
        .collect();
    let mut sol = vec![0.0_f64; m];
    for i in (0..m).rev() {
        let mut s = qty[i];
        for j in i + 1..m {
            s -= r[i * m + j] * sol[j];
        }
        sol[i] = s / r[i * m + i];
    }
    sol.iter()
        .zip(powers)
        .map(|(&c, &p)| c / scale.powi(p as i32))
        .collect()
}

/// Ordinary least-squares line `y ~ a + b x`; returns `(b, a)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// In-place Gaussian elimination with partial pivoting for a small system.
pub fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Vec<f64> {
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for c in col + 1..n {
            s -= a[col * n + c] * x[c];
        }
        x[col] = s / a[col * n + col];
    }
    x
}
