//! Real powers with explicit limits at zero, and their variants near one.

/// `x^k` for `x ≥ 0` and real `k`, computed as `exp(k ln x)`.
///
/// At `x = 0` the limit is returned: `0` for `k > 0`, `1` for `k = 0`, `+∞` for `k < 0`.
pub(crate) fn powr(x: f64, k: f64) -> f64 {
    if x > 0.0 {
        (k * x.ln()).exp()
    } else if k > 0.0 {
        0.0
    } else if k == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// `(1 + u)^k − 1`, accurate to relative precision when `u` is tiny.
pub(crate) fn pow1p_m1(u: f64, k: f64) -> f64 {
    (k * u.ln_1p()).exp_m1()
}

/// Derivative of `x^k`, i.e. `k x^{k-1}`, with the same limits as [`powr`].
pub(crate) fn dpowr(x: f64, k: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * powr(x, k - 1.0)
    }
}
