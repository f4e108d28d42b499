//! Per-check and per-variable update kernels shared by the schedules.

use super::boxplus::box_plus_mag;
use super::rcbp::tau_leave_one_out;

/// Largest float message magnitude; also what a degree-1 check sends.
pub const FLOAT_MSG_LIMIT: f64 = 1000.0;

/// Reusable buffers sized to the largest check degree.
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    f_in: Vec<f64>,
    f_out: Vec<f64>,
    f_fwd: Vec<f64>,
    q_in: Vec<i16>,
    q_mag: Vec<u8>,
    q_out: Vec<u8>,
}

impl Scratch {
    pub fn with_degree(deg: usize) -> Self {
        Self {
            f_in: Vec::with_capacity(deg),
            f_out: Vec::with_capacity(deg),
            f_fwd: Vec::with_capacity(deg),
            q_in: Vec::with_capacity(deg),
            q_mag: Vec::with_capacity(deg),
            q_out: Vec::with_capacity(deg),
        }
    }
}

/// Check-node output for every edge from the variable-to-check inputs.
///
/// Output sign is the product of the other inputs' signs, flipped when the
/// target syndrome bit is 1; output magnitude is the box-plus of the other
/// magnitudes (prefix/suffix scans).
pub fn float_check_outputs(
    inputs: &[f64],
    syndrome_bit: bool,
    fwd: &mut Vec<f64>,
    out: &mut [f64],
) {
    let len = inputs.len();
    let mut parity = syndrome_bit;
    fwd.clear();
    let mut acc = f64::INFINITY;
    for &x in inputs {
        parity ^= x < 0.0;
        fwd.push(acc);
        acc = box_plus_mag(acc, x.abs());
    }
    let mut acc = f64::INFINITY;
    for k in (0..len).rev() {
        let x = inputs[k];
        let mag = box_plus_mag(fwd[k], acc).min(FLOAT_MSG_LIMIT);
        out[k] = if parity ^ (x < 0.0) { -mag } else { mag };
        acc = box_plus_mag(acc, x.abs());
    }
}

/// Layered float check update on check `vars` with edge messages `msgs`.
///
/// For each edge: `L_ji = E_j - L_ij(old)`, new `L_ij` from the other
/// `L_j'i`, then `E_j = L_ji + L_ij(new)`.
pub fn check_node_update_float(
    soft: &mut [f32],
    msgs: &mut [f32],
    vars: &[u32],
    syndrome_bit: bool,
    scratch: &mut Scratch,
) {
    let Scratch {
        f_in, f_out, f_fwd, ..
    } = scratch;
    f_in.clear();
    f_in.extend(
        vars.iter()
            .zip(msgs.iter())
            .map(|(&v, &l)| soft[v as usize] as f64 - l as f64),
    );
    f_out.clear();
    f_out.resize(vars.len(), 0.0);
    float_check_outputs(f_in, syndrome_bit, f_fwd, f_out);
    for (k, &v) in vars.iter().enumerate() {
        msgs[k] = f_out[k] as f32;
        soft[v as usize] = (f_in[k] + f_out[k]) as f32;
    }
}

/// `clamp(x, -max, max)` as an 8-bit value.
#[inline(always)]
pub fn clamp_llr(x: i16, max: i8) -> i8 {
    x.clamp(-(max as i16), max as i16) as i8
}

/// 8-bit addition that clamps to `[-max, max]` instead of wrapping.
#[inline(always)]
pub fn saturating_add_llr(a: i8, b: i8, max: i8) -> i8 {
    clamp_llr(a as i16 + b as i16, max)
}

/// Saturation-oriented soft-value update: a soft value already at `±vn_max`
/// is frozen, anything else becomes `clamp(L_ji + L_ij)`.
#[inline(always)]
pub fn vn_update_saturating(soft: i8, var_to_check: i16, check_to_var: i8, vn_max: i8) -> i8 {
    if soft.unsigned_abs() == vn_max as u8 {
        soft
    } else {
        clamp_llr(var_to_check + check_to_var as i16, vn_max)
    }
}

/// Layered quantized check update: τ leave-one-out magnitudes capped at
/// `msg_max`, saturation-oriented soft-value update.
pub fn check_node_update_quantized(
    soft: &mut [i8],
    msgs: &mut [i8],
    vars: &[u32],
    syndrome_bit: bool,
    vn_max: i8,
    msg_max: i8,
    scratch: &mut Scratch,
) {
    let Scratch {
        q_in, q_mag, q_out, ..
    } = scratch;
    let len = vars.len();
    q_in.clear();
    q_mag.clear();
    let mut parity = syndrome_bit;
    for (&v, &l) in vars.iter().zip(msgs.iter()) {
        let x = soft[v as usize] as i16 - l as i16;
        parity ^= x < 0;
        q_in.push(x);
        q_mag.push(x.unsigned_abs().min(msg_max as u16) as u8);
    }
    q_out.clear();
    q_out.resize(len, 0);
    tau_leave_one_out(q_mag, msg_max as u8, q_out);
    for k in 0..len {
        let x = q_in[k];
        let mag = q_out[k] as i8;
        let new = if parity ^ (x < 0) { -mag } else { mag };
        msgs[k] = new;
        let v = vars[k] as usize;
        soft[v] = vn_update_saturating(soft[v], x, new, vn_max);
    }
    debug_assert!(msgs.iter().all(|m| m.unsigned_abs() <= msg_max as u8));
    debug_assert!(vars
        .iter()
        .all(|&v| soft[v as usize].unsigned_abs() <= vn_max as u8));
}
