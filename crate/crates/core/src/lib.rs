// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact simulation and circuit synthesis for N-qubit Pauli channels and
//! Pauli dynamical maps.
//!
//! The crate is organised bottom-up:
//!
//! - [`pauli`]: Pauli strings, the sign matrix and the probability/multiplier
//!   (`k` / `tau`) representations of a Pauli channel.
//! - [`channels`]: density matrices, Bloch coefficients, Choi matrices, CP/TP
//!   checks and the named one-qubit dynamical maps.
//! - [`circuits`]: a small gate IR with dense statevector and density-matrix
//!   simulation, ancilla-driven channel synthesis, noise injection and
//!   OpenQASM 2.0 export.
//! - [`onepr`]: circuits whose only parameter-dependent gate is a single
//!   (controlled) rotation, including fitting such decompositions to curves
//!   of states.
//! - [`distance`]: diamond distance and diamond fidelity.
//! - [`tomography`]: simulated process tomography and tetrahedron scans.
//!
//! Data-parallel loops (optimizer restarts, scan grid points) run on rayon
//! when the `parallel` feature is enabled and fall back to plain iteration
//! otherwise; see [`par`].

pub mod channels;
pub mod circuits;
pub mod distance;
pub mod error;
pub mod linalg;
pub mod onepr;
pub mod optim;
pub mod par;
pub mod pauli;
pub mod tomography;

pub use error::{Error, Result};
pub use linalg::C64;
