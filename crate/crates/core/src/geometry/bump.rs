//! Smooth cutoffs built from `exp(-1/x)`.

/// C-infinity step: 0 for `x <= 0`, 1 for `x >= 1`, strictly increasing
/// between.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// C-infinity bump supported on `(lo, hi)`, equal to 1 on the middle half.
pub fn smooth_bump(x: f64, lo: f64, hi: f64) -> f64 {
    debug_assert!(hi > lo);
    let w = hi - lo;
    let up = smooth_step((x - lo) / (0.25 * w));
    let down = smooth_step((hi - x) / (0.25 * w));
    up * down
}
