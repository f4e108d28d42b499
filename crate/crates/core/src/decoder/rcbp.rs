//! Reduced-complexity box-plus on quantized magnitudes.

/// Integer approximation of `⊞` on quantized magnitudes.
///
/// Inputs are clamped to `msg_max`. With `l` the smaller and `d` the gap,
/// `τ = l - [d<2] - [d<6]` for `l > 2`, else `max(l - [d<4], 0)`. Both arms
/// are evaluated and selected so the function has no data-dependent branch.
#[inline(always)]
pub fn tau(p: u8, q: u8, msg_max: u8) -> u8 {
    let a = p.min(msg_max);
    let b = q.min(msg_max);
    let g = a.max(b);
    let l = a.min(b);
    let d = g - l;
    let hi = l.wrapping_sub((d < 2) as u8).wrapping_sub((d < 6) as u8);
    let lo = l.saturating_sub((d < 4) as u8);
    if l > 2 {
        hi
    } else {
        lo
    }
}

/// Marks a missing operand in the prefix/suffix scans.
const NONE: u8 = u8::MAX;

#[inline(always)]
fn combine(a: u8, b: u8, msg_max: u8) -> u8 {
    match (a, b) {
        (NONE, x) | (x, NONE) => x,
        (x, y) => tau(x, y, msg_max),
    }
}

/// Leave-one-out τ reductions for one check.
///
/// `out[k] = τ(F_k, B_k)` where `F_k` folds `mags[..k]` left to right and
/// `B_k` folds `mags[k+1..]` right to left. Two passes, `O(len)` τ calls.
/// A degree-1 check has no other operand; its output is `msg_max`.
pub fn tau_leave_one_out(mags: &[u8], msg_max: u8, out: &mut [u8]) {
    let len = mags.len();
    debug_assert_eq!(out.len(), len);
    debug_assert!(mags.iter().all(|&m| m != NONE));
    // forward prefix goes into `out`, then the backward pass combines in place
    let mut acc = NONE;
    for k in 0..len {
        out[k] = acc;
        acc = combine(acc, mags[k], msg_max);
    }
    let mut acc = NONE;
    for k in (0..len).rev() {
        let r = combine(out[k], acc, msg_max);
        out[k] = if r == NONE { msg_max } else { r.min(msg_max) };
        acc = combine(mags[k], acc, msg_max);
    }
}
