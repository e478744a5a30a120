// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Diamond distance and diamond fidelity between channels.
//!
//! Pauli channels have the closed form `‖E₁ − E₂‖⋄ = Σ_γ |k₁_γ − k₂_γ|`:
//! the maximally entangled input attains it, since the Choi difference is
//! diagonal in the Bell basis with eigenvalues `k₁ − k₂`, and the triangle
//! inequality over the unitary conjugations `σ_γ · σ_γ` (each of diamond
//! norm 1) bounds it from above. Other one-qubit maps go through a
//! multi-start variational search over pure inputs on the doubled space.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io;

use serde::{Deserialize, Serialize};

use crate::channels::{matrix_unit, LinearMap};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::optim::{halton, nelder_mead, NelderMeadOptions};
use crate::par::{map_indexed, Execution};
use crate::pauli::PauliProbVector;

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().sum()
}

/// `Σ_γ |k₁_γ − k₂_γ|`.
pub fn diamond_distance_pauli(k1: &PauliProbVector, k2: &PauliProbVector) -> Result<f64> {
    if k1.len() != k2.len() {
        return Err(Error::DimensionMismatch {
            what: "probability vectors",
            expected: k1.len(),
            got: k2.len(),
        });
    }
    Ok(k1.l1_distance(k2))
}

/// Settings for [`diamond_distance_bruteforce`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BruteForceOptions {
    /// Local searches per batch.
    pub restarts: usize,
    /// Extra batches allowed while the two best values disagree.
    pub max_batches: usize,
    /// Agreement required between the two best restarts.
    pub agreement: f64,
    pub local: NelderMeadOptions,
    pub execution: Execution,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions {
            restarts: 64,
            max_batches: 4,
            agreement: 1e-5,
            local: NelderMeadOptions {
                max_iter: 1500,
                f_tol: 1e-13,
                x_tol: 1e-8,
                step: 0.3,
            },
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceResult {
    /// Best value found; a lower bound on the diamond distance.
    pub value: f64,
    /// The maximising input on reference ⊗ system.
    pub state: linalg::CVector,
    pub restarts: usize,
    /// Whether the two best restarts agreed within the tolerance.
    pub agreed: bool,
}

/// Unit vector in `C^4` from three hyperspherical angles and three phases.
fn chart(x: &[f64]) -> [C64; 4] {
    let (s1, c1) = x[0].sin_cos();
    let (s2, c2) = x[1].sin_cos();
    let (s3, c3) = x[2].sin_cos();
    [
        C64::new(c1, 0.0),
        C64::from_polar(s1 * c2, x[3]),
        C64::from_polar(s1 * s2 * c3, x[4]),
        C64::from_polar(s1 * s2 * s3, x[5]),
    ]
}

/// `‖(I ⊗ Δ)(|ψ⟩⟨ψ|)‖₁` with `Δ` given by its images of matrix units.
fn objective(delta: &[[CMatrix; 2]; 2], psi: &[C64; 4]) -> f64 {
    let mut m = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for k in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    let w = psi[2 * i + j] * psi[2 * k + l].conj();
                    let d = &delta[j][l];
                    for a in 0..2 {
                        for b in 0..2 {
                            m[(2 * i + a, 2 * k + b)] += w * d[(a, b)];
                        }
                    }
                }
            }
        }
    }
    linalg::hermitian_eigenvalues(&m)
        .iter()
        .map(|v| v.abs())
        .sum()
}

fn start_point(index: usize) -> Vec<f64> {
    let u = halton(index as u64 + 1, 6);
    vec![
        u[0] * FRAC_PI_2,
        u[1] * FRAC_PI_2,
        u[2] * FRAC_PI_2,
        u[3] * 2.0 * PI,
        u[4] * 2.0 * PI,
        u[5] * 2.0 * PI,
    ]
}

/// Maximises `‖((E₁−E₂) ⊗ I)(|ψ⟩⟨ψ|)‖₁` over pure `|ψ⟩` on two qubits.
///
/// Restarts are drawn from a Halton sequence. Further batches run while the
/// best two restarts differ by more than `opts.agreement`.
pub fn diamond_distance_bruteforce<A, B>(
    e1: &A,
    e2: &B,
    opts: &BruteForceOptions,
) -> Result<BruteForceResult>
where
    A: LinearMap + ?Sized,
    B: LinearMap + ?Sized,
{
    if e1.n_qubits() != 1 || e2.n_qubits() != 1 {
        return Err(Error::Unsupported(
            "the variational diamond-distance search handles one-qubit maps only".into(),
        ));
    }
    let delta = [0, 1].map(|j| {
        [0, 1].map(|l| {
            let e = matrix_unit(2, j, l);
            e1.apply_operator(&e) - e2.apply_operator(&e)
        })
    });
    let mut results: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut batches = 0;
    let agreed = loop {
        let offset = results.len();
        let batch = map_indexed(opts.execution, opts.restarts, |i| {
            let m = nelder_mead(
                |x| -objective(&delta, &chart(x)),
                &start_point(offset + i),
                &opts.local,
            );
            (-m.f, m.x)
        });
        results.extend(batch);
        batches += 1;
        results.sort_by(|a, b| b.0.total_cmp(&a.0));
        let agreed = results.len() >= 2 && results[0].0 - results[1].0 <= opts.agreement;
        if agreed || batches > opts.max_batches {
            break agreed;
        }
        log::debug!(
            "diamond search: best two restarts differ by {:e}, running another batch",
            results[0].0 - results[1].0
        );
    };
    let (value, x) = results[0].clone();
    Ok(BruteForceResult {
        value,
        state: linalg::CVector::from_iterator(4, chart(&x)),
        restarts: results.len(),
        agreed,
    })
}

/// How a distance was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMethod {
    ClosedForm,
    BruteForce,
}

/// Diamond distance: closed form when both maps are Pauli channels, the
/// variational search for other one-qubit maps, refused otherwise.
pub fn diamond_distance<A, B>(e1: &A, e2: &B) -> Result<(f64, DistanceMethod)>
where
    A: LinearMap + ?Sized,
    B: LinearMap + ?Sized,
{
    if e1.n_qubits() != e2.n_qubits() {
        return Err(Error::DimensionMismatch {
            what: "channel pair",
            expected: 1 << e1.n_qubits(),
            got: 1 << e2.n_qubits(),
        });
    }
    if let (Some(k1), Some(k2)) = (e1.pauli_probabilities(), e2.pauli_probabilities()) {
        return Ok((
            diamond_distance_pauli(&k1, &k2)?,
            DistanceMethod::ClosedForm,
        ));
    }
    if e1.n_qubits() >= 2 {
        return Err(Error::Unsupported(
            "diamond distance of non-Pauli maps on two or more qubits".into(),
        ));
    }
    let r = diamond_distance_bruteforce(e1, e2, &BruteForceOptions::default())?;
    Ok((r.value, DistanceMethod::BruteForce))
}

/// `f = 1 − ‖E₁ − E₂‖⋄ / 2`, clamped to `[0, 1]`.
pub fn diamond_fidelity<A, B>(e1: &A, e2: &B) -> Result<f64>
where
    A: LinearMap + ?Sized,
    B: LinearMap + ?Sized,
{
    let (d, _) = diamond_distance(e1, e2)?;
    Ok(fidelity_from_distance(d))
}

pub fn fidelity_from_distance(d: f64) -> f64 {
    (1.0 - d / 2.0).clamp(0.0, 1.0)
}

/// One row of a tetrahedron scan. `shots` is empty for exact probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityRecord {
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub f: f64,
    pub lambda_1q: f64,
    pub lambda_2q: f64,
    pub epsilon: f64,
    pub shots: Option<u64>,
    pub seed: u64,
}

impl FidelityRecord {
    pub fn tau_norm(&self) -> f64 {
        (self.tau1 * self.tau1 + self.tau2 * self.tau2 + self.tau3 * self.tau3).sqrt()
    }

    /// Euclidean distance from `(τ₁,τ₂,τ₃)` to the nearest tetrahedron vertex.
    pub fn vertex_distance(&self) -> f64 {
        (0..4)
            .map(|g| {
                let v = crate::pauli::tetrahedron_vertex(g);
                ((self.tau1 - v[0]).powi(2)
                    + (self.tau2 - v[1]).powi(2)
                    + (self.tau3 - v[2]).powi(2))
                .sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn write_records<W: io::Write>(w: W, records: &[FidelityRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_records<R: io::Read>(r: R) -> Result<Vec<FidelityRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}
