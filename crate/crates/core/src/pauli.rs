//! Bit-mask representation of Pauli strings.
//!
//! A string is stored as an `x` mask (qubits acted on by X or Y) and a `z`
//! mask (qubits acted on by Z or Y). Acting on a computational basis state,
//!
//! ```text
//! P |b> = i^{#Y} (-1)^{popcount(b & z)} |b ^ x>
//! ```
//!
//! which follows from `Y = i X Z`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::C64;

/// Single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// A tensor product of Paulis over at most 64 qubits, without coefficient.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PauliString {
    x: u64,
    z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn from_masks(x: u64, z: u64) -> Self {
        Self { x, z }
    }

    pub fn single(qubit: usize, pauli: Pauli) -> Self {
        Self::IDENTITY.with(qubit, pauli)
    }

    /// Returns a copy with `pauli` placed on `qubit` (replacing whatever was there).
    pub fn with(mut self, qubit: usize, pauli: Pauli) -> Self {
        debug_assert!(qubit < 64);
        let bit = 1u64 << qubit;
        self.x &= !bit;
        self.z &= !bit;
        match pauli {
            Pauli::X => self.x |= bit,
            Pauli::Y => {
                self.x |= bit;
                self.z |= bit
            }
            Pauli::Z => self.z |= bit,
        }
        self
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn get(&self, qubit: usize) -> Option<Pauli> {
        let bit = 1u64 << qubit;
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => None,
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
        }
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// Highest qubit index touched, if any.
    pub fn max_qubit(&self) -> Option<usize> {
        let s = self.support();
        (s != 0).then(|| 63 - s.leading_zeros() as usize)
    }

    /// True when the matrix has only real entries (an even number of Y factors).
    pub fn is_real(&self) -> bool {
        self.y_count() % 2 == 0
    }

    /// True when the string commutes with the global Z-parity operator.
    pub fn preserves_parity(&self) -> bool {
        self.x.count_ones() % 2 == 0
    }

    /// Moves the string up by `offset` qubits.
    pub fn shifted(&self, offset: usize) -> Self {
        Self {
            x: self.x << offset,
            z: self.z << offset,
        }
    }

    /// The global factor `i^{#Y}`.
    pub fn global_phase(&self) -> C64 {
        match self.y_count() % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    /// Sign `(-1)^{popcount(b & z)}` picked up by basis state `b`.
    #[inline]
    pub fn sign(&self, basis: usize) -> f64 {
        if (basis as u64 & self.z).count_ones() & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// Accumulates `coefficient * P |src>` into `dst`.
    pub fn apply_add(&self, coefficient: C64, src: &[C64], dst: &mut [C64]) {
        let flip = self.x as usize;
        let c = coefficient * self.global_phase();
        for (b, amp) in src.iter().enumerate() {
            dst[b ^ flip] += c * self.sign(b) * amp;
        }
    }

    /// `<psi| P |psi>`; real for a Hermitian string up to rounding.
    pub fn expectation(&self, amps: &[C64]) -> C64 {
        let flip = self.x as usize;
        let mut acc = C64::new(0.0, 0.0);
        for (b, amp) in amps.iter().enumerate() {
            acc += amps[b ^ flip].conj() * amp * self.sign(b);
        }
        acc * self.global_phase()
    }

    /// `<left| P |right>`.
    pub fn matrix_element(&self, left: &[C64], right: &[C64]) -> C64 {
        let flip = self.x as usize;
        let mut acc = C64::new(0.0, 0.0);
        for (b, amp) in right.iter().enumerate() {
            acc += left[b ^ flip].conj() * amp * self.sign(b);
        }
        acc * self.global_phase()
    }

    /// Applies `exp(-i * half_angle * P)` in place.
    ///
    /// Uses `exp(-i a P) = cos(a) I - i sin(a) P`, pairing each basis state with
    /// its image under the bit flip.
    pub fn rotate(&self, half_angle: f64, amps: &mut [C64]) {
        let (s, c) = half_angle.sin_cos();
        let flip = self.x as usize;
        let g = self.global_phase();
        let minus_i_sin = C64::new(0.0, -s);
        if flip == 0 {
            for (b, amp) in amps.iter_mut().enumerate() {
                *amp *= C64::new(c, 0.0) + minus_i_sin * g * self.sign(b);
            }
            return;
        }
        // Visit each pair once, from the member whose highest flipped bit is clear.
        let top = 1usize << (63 - (flip as u64).leading_zeros());
        for b in 0..amps.len() {
            if b & top != 0 {
                continue;
            }
            let partner = b ^ flip;
            let (ab, ap) = (amps[b], amps[partner]);
            // P|partner> lands on b with phase g*sign(partner), and vice versa.
            let pb = g * self.sign(partner) * ap;
            let pp = g * self.sign(b) * ab;
            amps[b] = ab * c + minus_i_sin * pb;
            amps[partner] = ap * c + minus_i_sin * pp;
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(top) = self.max_qubit() else {
            return write!(f, "I");
        };
        let mut first = true;
        for q in 0..=top {
            if let Some(p) = self.get(q) {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{p}{q}")?;
                first = false;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn y_on_basis_states() {
        let y = PauliString::single(0, Pauli::Y);
        let mut out = vec![c(0.0, 0.0); 2];
        y.apply_add(c(1.0, 0.0), &[c(1.0, 0.0), c(0.0, 0.0)], &mut out);
        assert_eq!(out, vec![c(0.0, 0.0), c(0.0, 1.0)]);
        let mut out = vec![c(0.0, 0.0); 2];
        y.apply_add(c(1.0, 0.0), &[c(0.0, 0.0), c(1.0, 0.0)], &mut out);
        assert_eq!(out, vec![c(0.0, -1.0), c(0.0, 0.0)]);
    }

    #[test]
    fn parity_and_reality() {
        let xy = PauliString::single(0, Pauli::X).with(1, Pauli::Y);
        assert!(xy.preserves_parity());
        assert!(!xy.is_real());
        let yy = PauliString::single(0, Pauli::Y).with(1, Pauli::Y);
        assert!(yy.is_real());
        assert!(!PauliString::single(2, Pauli::X).preserves_parity());
        assert_eq!(yy.to_string(), "Y0 Y1");
    }

    #[test]
    fn rotation_matches_closed_form() {
        // exp(-i a Z) on |+>.
        let z = PauliString::single(0, Pauli::Z);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(h, 0.0), c(h, 0.0)];
        z.rotate(0.3, &mut amps);
        assert!((amps[0] - c(h, 0.0) * C64::from_polar(1.0, -0.3)).norm() < 1e-15);
        assert!((amps[1] - c(h, 0.0) * C64::from_polar(1.0, 0.3)).norm() < 1e-15);
    }
}
