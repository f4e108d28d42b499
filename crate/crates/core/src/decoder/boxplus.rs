//! Exact check-node arithmetic in the LLR domain.

/// Magnitude of `a ⊞ b` for `a, b >= 0`.
///
/// Uses `min(a,b) + ln(1 + e^-(a+b)) - ln(1 + e^-|a-b|)`, which stays accurate
/// where `tanh` saturates. `+∞` is the identity.
#[inline]
pub fn box_plus_mag(a: f64, b: f64) -> f64 {
    if a == f64::INFINITY {
        return b;
    }
    if b == f64::INFINITY {
        return a;
    }
    let v = a.min(b) + (-(a + b)).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p();
    v.max(0.0)
}

/// `2·atanh(tanh(a/2)·tanh(b/2))`.
#[inline]
pub fn box_plus(a: f64, b: f64) -> f64 {
    let mag = box_plus_mag(a.abs(), b.abs());
    if (a < 0.0) != (b < 0.0) {
        -mag
    } else {
        mag
    }
}

/// Right fold `v0 ⊞ (v1 ⊞ (... ⊞ v_{k-1}))`. Panics on an empty slice.
pub fn box_plus_reduce(values: &[f64]) -> f64 {
    let (last, rest) = values
        .split_last()
        .expect("box_plus_reduce needs at least one operand");
    rest.iter().rev().fold(*last, |acc, &v| box_plus(v, acc))
}

/// `-ln(tanh(x/2))`, its own inverse on `x > 0`.
///
/// Evaluated as `ln(1 + 2/(e^x - 1))`, which keeps full precision at both
/// ends of the range.
pub fn phi(x: f64) -> Result<f64, PhiDomain> {
    if !(x > 0.0) {
        return Err(PhiDomain(x));
    }
    Ok((2.0 / x.exp_m1()).ln_1p())
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("phi is defined for x > 0, got {0}")]
pub struct PhiDomain(pub f64);

/// Outgoing magnitude from the tanh product over the other inputs.
pub fn check_magnitude_tanh(others: &[f64]) -> f64 {
    let prod: f64 = others.iter().map(|x| (x.abs() / 2.0).tanh()).product();
    2.0 * prod.atanh()
}

/// Outgoing magnitude via `phi(Σ phi(|x|))`.
pub fn check_magnitude_phi(others: &[f64]) -> f64 {
    let sum: f64 = others
        .iter()
        .map(|x| phi(x.abs()).unwrap_or(f64::INFINITY))
        .sum();
    if sum == f64::INFINITY {
        0.0
    } else if sum == 0.0 {
        f64::INFINITY
    } else {
        phi(sum).unwrap_or(f64::INFINITY)
    }
}

/// Outgoing magnitude via repeated box-plus.
pub fn check_magnitude_boxplus(others: &[f64]) -> f64 {
    others
        .iter()
        .rev()
        .fold(f64::INFINITY, |acc, &x| box_plus_mag(x.abs(), acc))
}
