// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense, exact simulation of circuits on state vectors and density matrices.

use super::{Circuit, Gate};
use crate::channels::{DensityMatrix, LinearMap, MAX_DENSITY_QUBITS};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, ONE};

/// Largest register accepted for state-vector simulation.
pub const MAX_STATEVECTOR_QUBITS: usize = 12;

/// Applies `gate` to every length-`2^n` column of the column-major buffer.
pub fn apply_gate(data: &mut [C64], n_qubits: usize, gate: &Gate) {
    let d = 1usize << n_qubits;
    debug_assert_eq!(data.len() % d, 0);
    let bit = |q: usize| 1usize << (n_qubits - 1 - q);
    let u = gate.base_matrix();
    let t = bit(gate.target);
    let (mut cmask, mut cval) = (0, 0);
    for c in &gate.controls {
        cmask |= bit(c.qubit);
        if c.value {
            cval |= bit(c.qubit);
        }
    }
    for col in data.chunks_exact_mut(d) {
        for i in 0..d {
            if i & t != 0 || i & cmask != cval {
                continue;
            }
            let j = i | t;
            let (a, b) = (col[i], col[j]);
            col[i] = u[(0, 0)] * a + u[(0, 1)] * b;
            col[j] = u[(1, 0)] * a + u[(1, 1)] * b;
        }
    }
}

fn check_statevector_size(c: &Circuit) -> Result<()> {
    if c.n_qubits() > MAX_STATEVECTOR_QUBITS {
        return Err(Error::TooManyQubits {
            n: c.n_qubits(),
            limit: MAX_STATEVECTOR_QUBITS,
        });
    }
    Ok(())
}

pub fn simulate_unitary(c: &Circuit, psi: &CVector) -> Result<CVector> {
    check_statevector_size(c)?;
    let d = 1usize << c.n_qubits();
    if psi.len() != d {
        return Err(Error::DimensionMismatch {
            what: "state vector",
            expected: d,
            got: psi.len(),
        });
    }
    let mut out = psi.clone();
    for g in c.gates() {
        apply_gate(out.as_mut_slice(), c.n_qubits(), g);
    }
    Ok(out)
}

/// Full `2^n × 2^n` unitary of the circuit.
pub fn circuit_unitary(c: &Circuit) -> Result<CMatrix> {
    check_statevector_size(c)?;
    let d = 1usize << c.n_qubits();
    let mut u = CMatrix::identity(d, d);
    for g in c.gates() {
        apply_gate(u.as_mut_slice(), c.n_qubits(), g);
    }
    Ok(u)
}

/// `m ↦ G m G†` for a single gate.
pub(crate) fn conjugate_by_gate(m: &mut CMatrix, n_qubits: usize, gate: &Gate) {
    apply_gate(m.as_mut_slice(), n_qubits, gate);
    m.adjoint_mut();
    apply_gate(m.as_mut_slice(), n_qubits, gate);
    m.adjoint_mut();
}

pub(crate) fn check_density_size(n: usize) -> Result<()> {
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            limit: MAX_DENSITY_QUBITS,
        });
    }
    Ok(())
}

/// `U m U†` on the full register, gate by gate.
pub fn evolve_density(c: &Circuit, m: &CMatrix) -> Result<CMatrix> {
    check_density_size(c.n_qubits())?;
    let d = 1usize << c.n_qubits();
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch {
            what: "density matrix",
            expected: d,
            got: m.nrows(),
        });
    }
    let mut out = m.clone();
    for g in c.gates() {
        conjugate_by_gate(&mut out, c.n_qubits(), g);
    }
    Ok(out)
}

/// `X ⊗ |0…0⟩⟨0…0|` on `n_trail` trailing qubits.
pub(crate) fn embed_with_zero_ancillas(x: &CMatrix, n_trail: usize) -> CMatrix {
    let d = x.nrows();
    let s = 1usize << n_trail;
    let mut out = CMatrix::zeros(d * s, d * s);
    for j in 0..d {
        for i in 0..d {
            out[(i * s, j * s)] = x[(i, j)];
        }
    }
    out
}

/// Traces out the last `n_trace` qubits of a `2^(n_keep+n_trace)` operator.
pub fn partial_trace_trailing(m: &CMatrix, n_keep: usize, n_trace: usize) -> CMatrix {
    let d = 1usize << n_keep;
    let s = 1usize << n_trace;
    assert_eq!(m.nrows(), d * s, "operator dimension");
    CMatrix::from_fn(d, d, |i, j| (0..s).map(|a| m[(i * s + a, j * s + a)]).sum())
}

/// Kraus operators `K_a = (I ⊗ ⟨a|) U (I ⊗ |0⟩)` of the induced map on the
/// main register.
pub fn circuit_kraus(c: &Circuit) -> Result<Vec<CMatrix>> {
    check_statevector_size(c)?;
    let n_main = c.n_main();
    let d = 1usize << n_main;
    let s = 1usize << c.n_ancillas();
    let mut kraus = vec![CMatrix::zeros(d, d); s];
    let mut psi = CVector::zeros(d * s);
    for i in 0..d {
        psi.fill(linalg::ZERO);
        psi[i * s] = ONE;
        for g in c.gates() {
            apply_gate(psi.as_mut_slice(), c.n_qubits(), g);
        }
        for (a, k) in kraus.iter_mut().enumerate() {
            for m in 0..d {
                k[(m, i)] = psi[m * s + a];
            }
        }
    }
    kraus.retain(|k| k.iter().any(|z| z.norm() > 1e-15));
    Ok(kraus)
}

/// The map a circuit induces on its main register once ancillas start in
/// `|0…0⟩` and are discarded at the end.
#[derive(Clone, Debug)]
pub struct CircuitChannel {
    n_main: usize,
    kraus: Vec<CMatrix>,
}

impl CircuitChannel {
    pub fn new(c: &Circuit) -> Result<Self> {
        Ok(CircuitChannel {
            n_main: c.n_main(),
            kraus: circuit_kraus(c)?,
        })
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }
}

impl LinearMap for CircuitChannel {
    fn n_qubits(&self) -> usize {
        self.n_main
    }

    fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        let d = 1usize << self.n_main;
        let mut out = CMatrix::zeros(d, d);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        out
    }
}

/// Runs `c` on `ρ_main ⊗ |0…0⟩⟨0…0|` and traces out the ancillas.
pub fn simulate_channel(c: &Circuit, rho_main: &DensityMatrix) -> Result<DensityMatrix> {
    let d = 1usize << c.n_main();
    if rho_main.dim() != d {
        return Err(Error::DimensionMismatch {
            what: "main-register state",
            expected: d,
            got: rho_main.dim(),
        });
    }
    let out = if c.n_qubits() <= MAX_DENSITY_QUBITS {
        let full = embed_with_zero_ancillas(rho_main.matrix(), c.n_ancillas());
        partial_trace_trailing(&evolve_density(c, &full)?, c.n_main(), c.n_ancillas())
    } else {
        CircuitChannel::new(c)?.apply_operator(rho_main.matrix())
    };
    Ok(DensityMatrix::new_unchecked(linalg::hermitian_part(&out)))
}
