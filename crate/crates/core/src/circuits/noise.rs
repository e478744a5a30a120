// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Gate-local depolarizing noise and readout errors.

use serde::{Deserialize, Serialize};

use super::sim::{check_density_size, conjugate_by_gate, embed_with_zero_ancillas};
use super::{partial_trace_trailing, Circuit};
use crate::channels::{DensityMatrix, LinearMap};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// After every gate, the qubits it touches are depolarized with strength
/// `lambda_1q` (one qubit) or `lambda_2q` (two or more); each measured bit
/// is flipped with probability `epsilon`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawNoise")]
pub struct NoiseModel {
    pub lambda_1q: f64,
    pub lambda_2q: f64,
    pub epsilon: f64,
}

#[derive(Deserialize)]
struct RawNoise {
    #[serde(default)]
    lambda_1q: f64,
    #[serde(default)]
    lambda_2q: f64,
    #[serde(default)]
    epsilon: f64,
}

impl TryFrom<RawNoise> for NoiseModel {
    type Error = Error;
    fn try_from(r: RawNoise) -> Result<Self> {
        NoiseModel::new(r.lambda_1q, r.lambda_2q, r.epsilon)
    }
}

impl NoiseModel {
    pub fn new(lambda_1q: f64, lambda_2q: f64, epsilon: f64) -> Result<Self> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(lambda_1q) || !unit(lambda_2q) {
            return Err(Error::InvalidConfig(format!(
                "depolarizing strengths must lie in [0, 1], got {lambda_1q} and {lambda_2q}"
            )));
        }
        if !(0.0..=0.5).contains(&epsilon) {
            return Err(Error::InvalidConfig(format!(
                "readout flip probability must lie in [0, 1/2], got {epsilon}"
            )));
        }
        Ok(NoiseModel {
            lambda_1q,
            lambda_2q,
            epsilon,
        })
    }

    pub fn ideal() -> Self {
        NoiseModel::default()
    }

    pub fn is_ideal(&self) -> bool {
        self.lambda_1q == 0.0 && self.lambda_2q == 0.0 && self.epsilon == 0.0
    }

    pub fn strength(&self, n_touched: usize) -> f64 {
        if n_touched <= 1 {
            self.lambda_1q
        } else {
            self.lambda_2q
        }
    }

    /// Probability of reading 1 when the bit is 1 with probability `p1`.
    pub fn observed_one(&self, p1: f64) -> f64 {
        (1.0 - self.epsilon) * p1 + self.epsilon * (1.0 - p1)
    }
}

/// `(1−λ) m + λ · Tr_S(m) ⊗ I_S / 2^|S|` for the qubit set `S`.
pub(crate) fn depolarize_qubits(m: &mut CMatrix, n_qubits: usize, qubits: &[usize], lambda: f64) {
    if lambda == 0.0 {
        return;
    }
    let smask = qubits
        .iter()
        .fold(0usize, |acc, q| acc | (1 << (n_qubits - 1 - q)));
    let ds = 1usize << qubits.len();
    let d = 1usize << n_qubits;
    let subsets: Vec<usize> = {
        let mut v = Vec::with_capacity(ds);
        let mut sub = smask;
        loop {
            v.push(sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & smask;
        }
        v
    };
    let orig = m.clone();
    *m *= linalg::c(1.0 - lambda, 0.0);
    for j in (0..d).filter(|j| j & smask == 0) {
        for i in (0..d).filter(|i| i & smask == 0) {
            let t: linalg::C64 = subsets.iter().map(|s| orig[(i | s, j | s)]).sum();
            let add = t * (lambda / ds as f64);
            for s in &subsets {
                m[(i | s, j | s)] += add;
            }
        }
    }
}

fn evolve_noisy(c: &Circuit, nm: &NoiseModel, full: &mut CMatrix) {
    let n = c.n_qubits();
    let mut touched = Vec::new();
    for g in c.gates() {
        conjugate_by_gate(full, n, g);
        touched.clear();
        touched.extend(g.qubits());
        depolarize_qubits(full, n, &touched, nm.strength(touched.len()));
    }
}

/// Deterministic noisy density-matrix evolution of the main register.
pub fn apply_noise(
    c: &Circuit,
    nm: &NoiseModel,
    rho_main: &DensityMatrix,
) -> Result<DensityMatrix> {
    let d = 1usize << c.n_main();
    if rho_main.dim() != d {
        return Err(Error::DimensionMismatch {
            what: "main-register state",
            expected: d,
            got: rho_main.dim(),
        });
    }
    let out = NoisyCircuitChannel::new(c.clone(), *nm)?.apply_operator(rho_main.matrix());
    Ok(DensityMatrix::new_unchecked(linalg::hermitian_part(&out)))
}

/// The noisy map a circuit induces on its main register.
#[derive(Clone, Debug)]
pub struct NoisyCircuitChannel {
    circuit: Circuit,
    noise: NoiseModel,
}

impl NoisyCircuitChannel {
    pub fn new(circuit: Circuit, noise: NoiseModel) -> Result<Self> {
        check_density_size(circuit.n_qubits())?;
        Ok(NoisyCircuitChannel { circuit, noise })
    }
}

impl LinearMap for NoisyCircuitChannel {
    fn n_qubits(&self) -> usize {
        self.circuit.n_main()
    }

    fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        let c = &self.circuit;
        let mut full = embed_with_zero_ancillas(x, c.n_ancillas());
        evolve_noisy(c, &self.noise, &mut full);
        partial_trace_trailing(&full, c.n_main(), c.n_ancillas())
    }
}
