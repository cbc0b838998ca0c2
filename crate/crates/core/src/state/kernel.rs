//! In-place amplitude kernels. Qubit `q` is bit `q` of the basis index.
//!
//! Callers validate targets; these functions only `debug_assert`.

use crate::C64;

/// Inserts a zero bit at position `q` of `i`.
#[inline(always)]
fn insert_zero(i: usize, q: usize) -> usize {
    let low = i & ((1 << q) - 1);
    ((i >> q) << (q + 1)) | low
}

/// Applies a row-major 2x2 matrix to qubit `q`.
pub fn apply_1q(amps: &mut [C64], m: &[C64], q: usize) {
    debug_assert_eq!(m.len(), 4);
    debug_assert!((1 << q) < amps.len());
    let stride = 1 << q;
    let [m00, m01, m10, m11] = [m[0], m[1], m[2], m[3]];
    for j in 0..amps.len() / 2 {
        let i0 = insert_zero(j, q);
        let i1 = i0 | stride;
        let (a0, a1) = (amps[i0], amps[i1]);
        amps[i0] = m00 * a0 + m01 * a1;
        amps[i1] = m10 * a0 + m11 * a1;
    }
}

/// Applies a row-major 4x4 matrix to qubits `(hi, lo)`, `hi` being the high
/// bit of the local index.
pub fn apply_2q(amps: &mut [C64], m: &[C64], hi: usize, lo: usize) {
    debug_assert_eq!(m.len(), 16);
    debug_assert_ne!(hi, lo);
    let (q_small, q_large) = if hi < lo { (hi, lo) } else { (lo, hi) };
    let (bh, bl) = (1usize << hi, 1usize << lo);
    for j in 0..amps.len() / 4 {
        let base = insert_zero(insert_zero(j, q_small), q_large);
        let idx = [base, base | bl, base | bh, base | bh | bl];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &target) in idx.iter().enumerate() {
            let row = &m[r * 4..r * 4 + 4];
            amps[target] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    }
}

/// Controlled-NOT as an amplitude swap.
pub fn apply_cnot(amps: &mut [C64], control: usize, target: usize) {
    debug_assert_ne!(control, target);
    let (q_small, q_large) = if control < target { (control, target) } else { (target, control) };
    let (bc, bt) = (1usize << control, 1usize << target);
    for j in 0..amps.len() / 4 {
        let base = insert_zero(insert_zero(j, q_small), q_large) | bc;
        amps.swap(base, base | bt);
    }
}
