use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense unitary on one or two qubits, stored row-major.
///
/// For a two-qubit gate applied to `targets = [a, b]`, qubit `a` is the
/// high bit of the local index: local index `2 * bit(a) + bit(b)`. This is the
/// usual left-to-right tensor order, so `CNOT` on `[control, target]` has the
/// textbook matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix {
    arity: usize,
    elements: Vec<C64>,
}

impl GateMatrix {
    /// Wraps a row-major matrix, checking shape and unitarity (tolerance 1e-10).
    pub fn new(arity: usize, elements: Vec<C64>) -> Result<Self> {
        if !(1..=2).contains(&arity) {
            return invalid(format!("gate arity must be 1 or 2, got {arity}"));
        }
        let dim = 1usize << arity;
        if elements.len() != dim * dim {
            return invalid(format!(
                "a {arity}-qubit gate needs {} entries, got {}",
                dim * dim,
                elements.len()
            ));
        }
        let gate = Self { arity, elements };
        let dev = gate.unitarity_deviation();
        if dev > 1e-10 {
            return invalid(format!("matrix is not unitary (max |U^dag U - I| = {dev:.3e})"));
        }
        Ok(gate)
    }

    fn from_parts(arity: usize, elements: Vec<C64>) -> Self {
        Self { arity, elements }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn elements(&self) -> &[C64] {
        &self.elements
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.elements[row * self.dim() + col]
    }

    pub fn to_dmatrix(&self) -> DMatrix<C64> {
        let d = self.dim();
        DMatrix::from_row_slice(d, d, &self.elements)
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim();
        let mut out = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                out[c * d + r] = self.elements[r * d + c].conj();
            }
        }
        Self::from_parts(self.arity, out)
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &GateMatrix) -> Result<Self> {
        if self.arity != rhs.arity {
            return invalid("cannot compose gates of different arity");
        }
        let d = self.dim();
        let mut out = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                out[r * d + c] = (0..d).map(|k| self.get(r, k) * rhs.get(k, c)).sum();
            }
        }
        Ok(Self::from_parts(self.arity, out))
    }

    /// `max |U^dag U - I|` over all entries.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                let v: C64 = (0..d).map(|k| self.get(k, r).conj() * self.get(k, c)).sum();
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }

    pub fn identity(arity: usize) -> Self {
        let d = 1 << arity;
        let mut e = vec![ZERO; d * d];
        for i in 0..d {
            e[i * d + i] = ONE;
        }
        Self::from_parts(arity, e)
    }

    /// `RY(theta) = exp(-i theta Y / 2)`.
    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self::from_parts(1, vec![re(c), re(-s), re(s), re(c)])
    }

    /// `RZ(theta) = exp(-i theta Z / 2)`.
    pub fn rz(theta: f64) -> Self {
        Self::from_parts(
            1,
            vec![C64::from_polar(1.0, -theta / 2.0), ZERO, ZERO, C64::from_polar(1.0, theta / 2.0)],
        )
    }

    /// `sqrt(X) = exp(i pi/4) exp(-i pi X / 4)`, i.e. `[[1+i, 1-i], [1-i, 1+i]] / 2`.
    pub fn sqrt_x() -> Self {
        let (s, c) = FRAC_PI_4.sin_cos();
        let phase = C64::from_polar(1.0, FRAC_PI_4);
        Self::from_parts(
            1,
            vec![phase * c, phase * C64::new(0.0, -s), phase * C64::new(0.0, -s), phase * c],
        )
    }

    pub fn pauli_x() -> Self {
        Self::from_parts(1, vec![ZERO, ONE, ONE, ZERO])
    }

    /// Controlled-NOT with the control on the first target.
    pub fn cnot() -> Self {
        let mut e = vec![ZERO; 16];
        e[0] = ONE;
        e[5] = ONE;
        e[11] = ONE;
        e[14] = ONE;
        Self::from_parts(2, e)
    }

    /// `R_XY(phi) = exp(+i phi X (x) Y / 2)`.
    ///
    /// The positive exponent is the sign under which `R_YX(phi_j) R_XY(phi_i)`
    /// reproduces the parity-preserving block matrix built by [`GateMatrix::rp`].
    pub fn rxy(phi: f64) -> Self {
        // X (x) Y has entries -i at (0,3), +i at (1,2), -i at (2,1), +i at (3,0).
        // exp(i a M) = cos a + i sin a M for an involution M.
        let (s, c) = (phi / 2.0).sin_cos();
        let mut e = vec![ZERO; 16];
        for i in 0..4 {
            e[i * 4 + i] = re(c);
        }
        e[3] = re(s);
        e[6] = re(-s);
        e[9] = re(s);
        e[12] = re(-s);
        Self::from_parts(2, e)
    }

    /// `R_YX(phi) = exp(+i phi Y (x) X / 2)`.
    pub fn ryx(phi: f64) -> Self {
        // Y (x) X has entries -i at (0,3), -i at (1,2), +i at (2,1), +i at (3,0).
        let (s, c) = (phi / 2.0).sin_cos();
        let mut e = vec![ZERO; 16];
        for i in 0..4 {
            e[i * 4 + i] = re(c);
        }
        e[3] = re(s);
        e[6] = re(s);
        e[9] = re(-s);
        e[12] = re(-s);
        Self::from_parts(2, e)
    }

    /// Parity-preserving two-parameter gate `R_P(phi_i, phi_j)`:
    ///
    /// ```text
    /// [  cos(s)   0        0       sin(s) ]
    /// [  0        cos(d)  -sin(d)  0      ]
    /// [  0        sin(d)   cos(d)  0      ]
    /// [ -sin(s)   0        0       cos(s) ]
    /// ```
    /// with `s = (phi_i + phi_j)/2`, `d = (phi_i - phi_j)/2`.
    pub fn rp(phi_i: f64, phi_j: f64) -> Self {
        let (ss, cs) = ((phi_i + phi_j) / 2.0).sin_cos();
        let (sd, cd) = ((phi_i - phi_j) / 2.0).sin_cos();
        #[rustfmt::skip]
        let e = vec![
            re(cs),  ZERO,    ZERO,    re(ss),
            ZERO,    re(cd),  re(-sd), ZERO,
            ZERO,    re(sd),  re(cd),  ZERO,
            re(-ss), ZERO,    ZERO,    re(cs),
        ];
        Self::from_parts(2, e)
    }
}

#[inline]
fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_diff(a: &GateMatrix, b: &GateMatrix) -> f64 {
        a.elements().iter().zip(b.elements()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn named_gates_are_unitary() {
        for g in [
            GateMatrix::ry(0.37),
            GateMatrix::rz(-1.2),
            GateMatrix::sqrt_x(),
            GateMatrix::cnot(),
            GateMatrix::rxy(0.9),
            GateMatrix::ryx(-2.4),
            GateMatrix::rp(0.3, 1.1),
        ] {
            assert!(g.unitarity_deviation() < 1e-12);
        }
    }

    #[test]
    fn sqrt_x_squares_to_x() {
        let s = GateMatrix::sqrt_x();
        assert!(max_diff(&s.compose(&s).unwrap(), &GateMatrix::pauli_x()) < 1e-15);
    }

    #[test]
    fn rp_is_ryx_after_rxy() {
        let (a, b) = (0.3, 0.7);
        let prod = GateMatrix::ryx(b).compose(&GateMatrix::rxy(a)).unwrap();
        assert!(max_diff(&prod, &GateMatrix::rp(a, b)) < 1e-15);
    }

    #[test]
    fn rejects_non_unitary() {
        assert!(GateMatrix::new(1, vec![re(1.0), re(1.0), ZERO, re(1.0)]).is_err());
        assert!(GateMatrix::new(3, vec![ZERO; 64]).is_err());
        assert!(GateMatrix::new(1, vec![ZERO; 3]).is_err());
    }
}
