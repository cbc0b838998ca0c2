use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::pauli::{Pauli, PauliString};
use crate::state::{kernel, GateMatrix, StateVector};
use crate::C64;

/// Rotation angle: a constant, a parameter slot, or `scale * x[slot] + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Angle {
    Fixed(f64),
    Slot(usize),
    Affine { slot: usize, scale: f64, offset: f64 },
}

impl Angle {
    pub fn slot(&self) -> Option<usize> {
        match *self {
            Angle::Fixed(_) => None,
            Angle::Slot(s) | Angle::Affine { slot: s, .. } => Some(s),
        }
    }

    /// `(value, d value / d x[slot])`.
    pub fn resolve(&self, params: &[f64]) -> (f64, f64) {
        match *self {
            Angle::Fixed(v) => (v, 0.0),
            Angle::Slot(s) => (params[s], 1.0),
            Angle::Affine { slot, scale, offset } => (scale * params[slot] + offset, scale),
        }
    }

    /// `scale * self + offset`.
    pub fn affine(self, scale: f64, offset: f64) -> Angle {
        match self {
            Angle::Fixed(v) => Angle::Fixed(scale * v + offset),
            Angle::Slot(slot) => Angle::Affine { slot, scale, offset },
            Angle::Affine { slot, scale: a, offset: b } => Angle::Affine { slot, scale: scale * a, offset: scale * b + offset },
        }
    }

    fn shift_slot(self, by: usize) -> Angle {
        match self {
            Angle::Fixed(v) => Angle::Fixed(v),
            Angle::Slot(s) => Angle::Slot(s + by),
            Angle::Affine { slot, scale, offset } => Angle::Affine { slot: slot + by, scale, offset },
        }
    }
}

impl From<f64> for Angle {
    fn from(v: f64) -> Self {
        Angle::Fixed(v)
    }
}

/// Gate kinds. Two-qubit gates read `targets[0]` as the high bit of their
/// local index; for `Cnot` that is the control.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gate {
    Ry { angle: Angle },
    Rz { angle: Angle },
    Sx,
    Cnot,
    Rxy { angle: Angle },
    Ryx { angle: Angle },
    Rp { phi_i: Angle, phi_j: Angle },
    /// Scheduling fence for depth counting; no effect on the state.
    Barrier,
}

impl Gate {
    pub fn arity(&self) -> Option<usize> {
        match self {
            Gate::Ry { .. } | Gate::Rz { .. } | Gate::Sx => Some(1),
            Gate::Cnot | Gate::Rxy { .. } | Gate::Ryx { .. } | Gate::Rp { .. } => Some(2),
            Gate::Barrier => None,
        }
    }

    fn angles(&self) -> Vec<Angle> {
        match *self {
            Gate::Ry { angle } | Gate::Rz { angle } | Gate::Rxy { angle } | Gate::Ryx { angle } => vec![angle],
            Gate::Rp { phi_i, phi_j } => vec![phi_i, phi_j],
            Gate::Sx | Gate::Cnot | Gate::Barrier => vec![],
        }
    }

    fn map_angles(self, f: impl Fn(Angle) -> Angle) -> Gate {
        match self {
            Gate::Ry { angle } => Gate::Ry { angle: f(angle) },
            Gate::Rz { angle } => Gate::Rz { angle: f(angle) },
            Gate::Rxy { angle } => Gate::Rxy { angle: f(angle) },
            Gate::Ryx { angle } => Gate::Ryx { angle: f(angle) },
            Gate::Rp { phi_i, phi_j } => Gate::Rp { phi_i: f(phi_i), phi_j: f(phi_j) },
            g => g,
        }
    }

    /// Unitary at the given parameters; `None` for barriers.
    pub fn matrix(&self, params: &[f64]) -> Option<GateMatrix> {
        let v = |a: Angle| a.resolve(params).0;
        Some(match *self {
            Gate::Ry { angle } => GateMatrix::ry(v(angle)),
            Gate::Rz { angle } => GateMatrix::rz(v(angle)),
            Gate::Sx => GateMatrix::sqrt_x(),
            Gate::Cnot => GateMatrix::cnot(),
            Gate::Rxy { angle } => GateMatrix::rxy(v(angle)),
            Gate::Ryx { angle } => GateMatrix::ryx(v(angle)),
            Gate::Rp { phi_i, phi_j } => GateMatrix::rp(v(phi_i), v(phi_j)),
            Gate::Barrier => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    #[serde(flatten)]
    pub gate: Gate,
    pub targets: Vec<usize>,
}

/// Gate kind tallies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCensus {
    pub ry: usize,
    pub rz: usize,
    pub sx: usize,
    pub cnot: usize,
    pub rxy: usize,
    pub ryx: usize,
    pub rp: usize,
}

/// A circuit step with its angle already evaluated.
///
/// Rotations are stored as `exp(-i a P)` for a Pauli string `P`; `grad` names
/// the parameter slot that `a` depends on and `da/dx`.
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Rotation { pauli: PauliString, half_angle: f64, grad: Option<(usize, f64)> },
    Cnot { control: usize, target: usize },
    Fixed1 { qubit: usize, matrix: [C64; 4] },
}

impl Op {
    pub fn apply(&self, amps: &mut [C64]) {
        match self {
            Op::Rotation { pauli, half_angle, .. } => pauli.rotate(*half_angle, amps),
            Op::Cnot { control, target } => kernel::apply_cnot(amps, *control, *target),
            Op::Fixed1 { qubit, matrix } => kernel::apply_1q(amps, matrix, *qubit),
        }
    }

    /// Applies the inverse.
    pub fn unapply(&self, amps: &mut [C64]) {
        match self {
            Op::Rotation { pauli, half_angle, .. } => pauli.rotate(-half_angle, amps),
            Op::Cnot { control, target } => kernel::apply_cnot(amps, *control, *target),
            Op::Fixed1 { qubit, matrix } => {
                let [a, b, c, d] = *matrix;
                kernel::apply_1q(amps, &[a.conj(), c.conj(), b.conj(), d.conj()], *qubit)
            }
        }
    }
}

/// Ordered gate list over `n_qubits` with `parameter_count` slots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    parameter_count: usize,
    gates: Vec<Instruction>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, parameter_count: 0, gates: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn parameter_count(&self) -> usize {
        self.parameter_count
    }

    pub fn gates(&self) -> &[Instruction] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        match gate.arity() {
            Some(k) if k != targets.len() => {
                return invalid(format!("{gate:?} acts on {k} qubit(s), got {} target(s)", targets.len()));
            }
            None if targets.is_empty() => return invalid("barrier needs at least one qubit"),
            _ => {}
        }
        for (k, &t) in targets.iter().enumerate() {
            if t >= self.n_qubits || targets[..k].contains(&t) {
                return invalid(format!("invalid or duplicate target {t} in a {}-qubit circuit", self.n_qubits));
            }
        }
        for a in gate.angles() {
            match a {
                Angle::Fixed(v) | Angle::Affine { offset: v, .. } if !v.is_finite() => {
                    return invalid("gate angle must be finite");
                }
                _ => {}
            }
            if let Some(s) = a.slot() {
                self.parameter_count = self.parameter_count.max(s + 1);
            }
        }
        self.gates.push(Instruction { gate, targets: targets.to_vec() });
        Ok(())
    }

    /// Appends `other` with its qubits shifted by `qubit_offset` and its slots by `slot_offset`.
    pub fn append(&mut self, other: &Circuit, qubit_offset: usize, slot_offset: usize) -> Result<()> {
        for ins in &other.gates {
            let targets: Vec<usize> = ins.targets.iter().map(|q| q + qubit_offset).collect();
            self.push(ins.gate.map_angles(|a| a.shift_slot(slot_offset)), &targets)?;
        }
        Ok(())
    }

    /// Barrier across every qubit.
    pub fn barrier(&mut self) {
        let all: Vec<usize> = (0..self.n_qubits).collect();
        self.push(Gate::Barrier, &all).expect("full barrier is always valid");
    }

    /// Every slot `0..parameter_count` is used by some gate.
    pub fn slots_are_dense(&self) -> bool {
        let mut seen = vec![false; self.parameter_count];
        for ins in &self.gates {
            for a in ins.gate.angles() {
                if let Some(s) = a.slot() {
                    seen[s] = true;
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    pub fn census(&self) -> GateCensus {
        let mut c = GateCensus::default();
        for ins in &self.gates {
            match ins.gate {
                Gate::Ry { .. } => c.ry += 1,
                Gate::Rz { .. } => c.rz += 1,
                Gate::Sx => c.sx += 1,
                Gate::Cnot => c.cnot += 1,
                Gate::Rxy { .. } => c.rxy += 1,
                Gate::Ryx { .. } => c.ryx += 1,
                Gate::Rp { .. } => c.rp += 1,
                Gate::Barrier => {}
            }
        }
        c
    }

    /// Depth counting CNOTs only, scheduled as soon as possible; barriers
    /// align the qubits they cover.
    pub fn cnot_depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        for ins in &self.gates {
            match ins.gate {
                Gate::Cnot => {
                    let (a, b) = (ins.targets[0], ins.targets[1]);
                    let d = level[a].max(level[b]) + 1;
                    level[a] = d;
                    level[b] = d;
                }
                Gate::Barrier => {
                    let m = ins.targets.iter().map(|&q| level[q]).max().unwrap_or(0);
                    ins.targets.iter().for_each(|&q| level[q] = m);
                }
                _ => {}
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    /// Rewrites into `{RZ, SX, CNOT}`. `RY` costs two SX and three RZ; each
    /// two-qubit rotation costs two CNOT, six SX and ten RZ.
    pub fn decompose(&self) -> Circuit {
        let mut out = Circuit { n_qubits: self.n_qubits, parameter_count: self.parameter_count, gates: Vec::new() };
        let mut emit = |gate: Gate, targets: &[usize]| out.gates.push(Instruction { gate, targets: targets.to_vec() });
        for ins in &self.gates {
            let t = &ins.targets;
            match ins.gate {
                Gate::Ry { angle } => {
                    for g in ry_native(angle) {
                        emit(g, t);
                    }
                }
                Gate::Rxy { angle } => rp_native(angle, Angle::Fixed(0.0), t[0], t[1], &mut emit),
                // R_P(phi, 0) = R_XY(phi) and R_P(0, phi) = R_YX(phi).
                Gate::Ryx { angle } => rp_native(Angle::Fixed(0.0), angle, t[0], t[1], &mut emit),
                Gate::Rp { phi_i, phi_j } => rp_native(phi_i, phi_j, t[0], t[1], &mut emit),
                g => emit(g, t),
            }
        }
        out
    }

    /// Evaluates every angle at `params`, shifting qubits by `qubit_offset`.
    pub fn bind(&self, params: &[f64], qubit_offset: usize) -> Result<Vec<Op>> {
        if params.len() != self.parameter_count {
            return invalid(format!("circuit takes {} parameters, got {}", self.parameter_count, params.len()));
        }
        let mut ops = Vec::with_capacity(self.gates.len());
        let rot = |paulis: &[(usize, Pauli)], a: Angle, factor: f64| {
            let (v, dv) = a.resolve(params);
            let pauli = paulis.iter().fold(PauliString::IDENTITY, |s, &(q, p)| s.with(q + qubit_offset, p));
            Op::Rotation { pauli, half_angle: factor * v, grad: a.slot().map(|s| (s, factor * dv)) }
        };
        for ins in &self.gates {
            let t = &ins.targets;
            match ins.gate {
                Gate::Ry { angle } => ops.push(rot(&[(t[0], Pauli::Y)], angle, 0.5)),
                Gate::Rz { angle } => ops.push(rot(&[(t[0], Pauli::Z)], angle, 0.5)),
                Gate::Sx => {
                    let m = GateMatrix::sqrt_x();
                    let e = m.elements();
                    ops.push(Op::Fixed1 { qubit: t[0] + qubit_offset, matrix: [e[0], e[1], e[2], e[3]] });
                }
                Gate::Cnot => ops.push(Op::Cnot { control: t[0] + qubit_offset, target: t[1] + qubit_offset }),
                // R_XY(phi) = exp(+i phi X Y / 2) = exp(-i (-phi/2) X Y).
                Gate::Rxy { angle } => ops.push(rot(&[(t[0], Pauli::X), (t[1], Pauli::Y)], angle, -0.5)),
                Gate::Ryx { angle } => ops.push(rot(&[(t[0], Pauli::Y), (t[1], Pauli::X)], angle, -0.5)),
                Gate::Rp { phi_i, phi_j } => {
                    ops.push(rot(&[(t[0], Pauli::X), (t[1], Pauli::Y)], phi_i, -0.5));
                    ops.push(rot(&[(t[0], Pauli::Y), (t[1], Pauli::X)], phi_j, -0.5));
                }
                Gate::Barrier => {}
            }
        }
        Ok(ops)
    }

    /// Runs the circuit on `state` in place.
    pub fn apply(&self, params: &[f64], state: &mut StateVector) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return invalid(format!("circuit has {} qubits, state has {}", self.n_qubits, state.n_qubits()));
        }
        let ops = self.bind(params, 0)?;
        let amps = state.amplitudes_mut();
        for op in &ops {
            op.apply(amps);
        }
        Ok(())
    }

    /// Output state on `|0...0>`.
    pub fn simulate(&self, params: &[f64]) -> Result<StateVector> {
        let mut s = StateVector::zero(self.n_qubits);
        self.apply(params, &mut s)?;
        Ok(s)
    }

    /// Dense unitary, one basis column at a time.
    pub fn unitary(&self, params: &[f64]) -> Result<DMatrix<C64>> {
        crate::hamiltonian::check_dense_qubits("circuit unitary", self.n_qubits)?;
        let d = 1usize << self.n_qubits;
        let mut u = DMatrix::<C64>::zeros(d, d);
        for col in 0..d {
            let mut s = StateVector::basis(self.n_qubits, col)?;
            self.apply(params, &mut s)?;
            u.column_mut(col).copy_from_slice(s.amplitudes());
        }
        Ok(u)
    }

    /// Same unitary by multiplying gate matrices embedded with Kronecker
    /// products; independent of the amplitude kernels.
    pub fn unitary_by_matrices(&self, params: &[f64]) -> Result<DMatrix<C64>> {
        crate::hamiltonian::check_dense_qubits("circuit unitary", self.n_qubits)?;
        let d = 1usize << self.n_qubits;
        let mut u = DMatrix::<C64>::identity(d, d);
        for ins in &self.gates {
            if let Some(m) = ins.gate.matrix(params) {
                u = embed(&m, &ins.targets, self.n_qubits) * u;
            }
        }
        Ok(u)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Circuit = serde_json::from_str(text)?;
        let mut c = Circuit::new(raw.n_qubits);
        for ins in &raw.gates {
            c.push(ins.gate, &ins.targets)?;
        }
        if c.parameter_count != raw.parameter_count {
            return invalid("parameter_count disagrees with the gate list");
        }
        Ok(c)
    }
}

/// Full `2^n` matrix of a 1- or 2-qubit gate acting on `targets`.
fn embed(m: &GateMatrix, targets: &[usize], n: usize) -> DMatrix<C64> {
    let d = 1usize << n;
    let local = |b: usize| -> usize {
        // targets[0] is the most significant local bit.
        targets.iter().fold(0, |acc, &q| (acc << 1) | ((b >> q) & 1))
    };
    let mask: usize = targets.iter().map(|&q| 1usize << q).sum();
    DMatrix::from_fn(d, d, |r, c| {
        if r & !mask != c & !mask {
            return C64::new(0.0, 0.0);
        }
        m.get(local(r), local(c))
    })
}

/// `RY(t) = RZ(pi) SX RZ(t + pi) SX RZ(0)` up to global phase, listed in time order.
fn ry_native(angle: Angle) -> [Gate; 5] {
    [
        Gate::Rz { angle: Angle::Fixed(0.0) },
        Gate::Sx,
        Gate::Rz { angle: angle.affine(1.0, PI) },
        Gate::Sx,
        Gate::Rz { angle: Angle::Fixed(PI) },
    ]
}

/// Two-CNOT realization of `R_P(phi_i, phi_j)` on `(hi, lo)`.
fn rp_native(phi_i: Angle, phi_j: Angle, hi: usize, lo: usize, emit: &mut impl FnMut(Gate, &[usize])) {
    let rz = |a: f64| Gate::Rz { angle: Angle::Fixed(a) };
    emit(Gate::Sx, &[hi]);
    emit(rz(FRAC_PI_2), &[lo]);
    emit(Gate::Sx, &[lo]);
    emit(rz(0.0), &[lo]);
    emit(Gate::Cnot, &[hi, lo]);
    emit(rz(FRAC_PI_2), &[hi]);
    emit(Gate::Sx, &[hi]);
    emit(Gate::Rz { angle: phi_i.affine(1.0, PI) }, &[hi]);
    emit(Gate::Sx, &[hi]);
    emit(rz(FRAC_PI_2), &[hi]);
    emit(Gate::Rz { angle: phi_j.affine(-1.0, 0.0) }, &[lo]);
    emit(Gate::Cnot, &[hi, lo]);
    emit(rz(PI), &[hi]);
    emit(Gate::Sx, &[hi]);
    emit(rz(PI), &[hi]);
    emit(rz(PI), &[lo]);
    emit(Gate::Sx, &[lo]);
    emit(rz(FRAC_PI_2), &[lo]);
}
