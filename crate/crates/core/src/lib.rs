//! Product-formula Hamiltonian simulation for perturbed Hamiltonians
//! `H = H0 + alpha * sum_g H1^g`.
//!
//! Trotter, THRIFT and Magnus-THRIFT schedules are built symbolically over
//! Pauli sums, evaluated densely (or as free-fermion rotations for the 1D
//! transverse-field Ising chain) and compared against exact evolution.

pub mod bench;
pub mod depth;
pub mod exact;
pub mod flo;
pub mod formulas;
pub mod linalg;
pub mod magnus;
pub mod models;
pub mod pauli;
pub mod quad;
