// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Gate-level circuits: IR, exact simulation, Pauli-channel synthesis,
//! gate noise and OpenQASM 2.0 interchange.

mod compile;
mod gate;
mod noise;
mod qasm;
mod sim;
mod synth;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use compile::{decompose_to_elementary, mc_unitary_gates, sqrt_unitary, zyz_angles};
pub use gate::{rotation_matrix, Control, Gate, GateKind, Mat2};
pub use noise::{apply_noise, NoiseModel, NoisyCircuitChannel};
pub use qasm::{export_qasm, format_angle, parse_qasm};
pub use sim::{
    apply_gate, circuit_kraus, circuit_unitary, evolve_density, partial_trace_trailing,
    simulate_channel, simulate_unitary, CircuitChannel, MAX_STATEVECTOR_QUBITS,
};
pub use synth::{
    one_qubit_angles, prepare_ancilla_state, prepare_real_amplitudes, synthesize_channel_circuit,
    three_rotation_preparation, uniformly_controlled_ry, AngleTriple,
};

/// An ordered gate list on `n_qubits` qubits.
///
/// Qubit 0 is the most significant bit of a basis index. Ancillas, when
/// present, occupy the trailing range `ancilla_range.0..ancilla_range.1`
/// and start in `|0…0⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitJson")]
pub struct Circuit {
    n_qubits: usize,
    ancilla_range: (usize, usize),
    gates: Vec<Gate>,
}

#[derive(Deserialize)]
struct CircuitJson {
    n_qubits: usize,
    #[serde(default)]
    ancilla_range: Option<(usize, usize)>,
    gates: Vec<Gate>,
}

impl TryFrom<CircuitJson> for Circuit {
    type Error = Error;
    fn try_from(j: CircuitJson) -> Result<Self> {
        let mut c = match j.ancilla_range {
            Some(r) => Circuit::with_ancillas(j.n_qubits, r)?,
            None => Circuit::new(j.n_qubits),
        };
        c.extend(j.gates)?;
        Ok(c)
    }
}

impl Circuit {
    /// A circuit without ancillas.
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            ancilla_range: (n_qubits, n_qubits),
            gates: Vec::new(),
        }
    }

    /// `range` must be a trailing block `(start, n_qubits)`.
    pub fn with_ancillas(n_qubits: usize, range: (usize, usize)) -> Result<Self> {
        if range.1 != n_qubits || range.0 > range.1 {
            return Err(Error::InvalidCircuit(format!(
                "ancilla range {range:?} must be a trailing block of {n_qubits} qubits"
            )));
        }
        Ok(Circuit {
            n_qubits,
            ancilla_range: range,
            gates: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ancilla_range(&self) -> (usize, usize) {
        self.ancilla_range
    }

    pub fn n_ancillas(&self) -> usize {
        self.ancilla_range.1 - self.ancilla_range.0
    }

    pub fn n_main(&self) -> usize {
        self.ancilla_range.0
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Appends `other`'s gates with every qubit index shifted by `offset`.
    pub fn append_shifted(&mut self, other: &Circuit, offset: usize) -> Result<()> {
        for g in &other.gates {
            let mut g = g.clone();
            g.target += offset;
            for c in &mut g.controls {
                c.qubit += offset;
            }
            self.push(g)?;
        }
        Ok(())
    }

    /// Gate-wise inverse in reverse order.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            ancilla_range: self.ancilla_range,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Number of gates touching two or more qubits.
    pub fn multi_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| !g.controls.is_empty()).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip() {
        let mut c = Circuit::with_ancillas(3, (1, 3)).unwrap();
        c.extend([Gate::ry(1, 0.25), Gate::cx(1, 2), Gate::cy(2, 0)])
            .unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.starts_with(r#"{"n_qubits":3,"ancilla_range":[1,3],"gates":["#));
        let back: Circuit = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn json_rejects_out_of_range() {
        let s = r#"{"n_qubits":2,"gates":[{"kind":"x","targets":[5]}]}"#;
        assert!(serde_json::from_str::<Circuit>(s).is_err());
        let s = r#"{"n_qubits":3,"ancilla_range":[0,1],"gates":[]}"#;
        assert!(serde_json::from_str::<Circuit>(s).is_err());
    }

    #[test]
    fn inverse_reverses() {
        let mut c = Circuit::new(2);
        c.extend([Gate::rx(0, 0.3), Gate::cz(0, 1)]).unwrap();
        let inv = c.inverse();
        assert_eq!(inv.gates()[0], Gate::cz(0, 1));
        assert_eq!(inv.gates()[1], Gate::rx(0, -0.3));
    }
}
