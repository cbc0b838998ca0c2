#[doc = include_str!("../../../book/src/introduction.md")]
pub struct Introduction;

#[doc = include_str!("../../../book/src/hamiltonian.md")]
pub struct Hamiltonian;

#[doc = include_str!("../../../book/src/circuit.md")]
pub struct Circuit;

#[doc = include_str!("../../../book/src/objective.md")]
pub struct Objective;

#[doc = include_str!("../../../book/src/optimization.md")]
pub struct Optimization;

#[doc = include_str!("../../../book/src/tfd.md")]
pub struct Tfd;

#[doc = include_str!("../../../book/src/shot-noise.md")]
pub struct ShotNoise;
