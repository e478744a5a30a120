// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Pauli strings, the sign matrix `A^{⊗N}` and the two coordinate systems
//! of a Pauli channel: the probabilities `k` of applying each Pauli string
//! and the multipliers `tau` by which the channel scales each Bloch
//! coefficient.
//!
//! Pauli strings are indexed in base 4 with the leftmost qubit as the most
//! significant digit, so string `(α1, …, αN)` has flat index
//! `α1·4^(N-1) + … + αN`.

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, I, ONE, ZERO};

/// Tolerance for probabilities and the `tau_0 = 1` constraint.
pub const PROB_TOL: f64 = 1e-12;

/// Largest number of qubits accepted for sign-matrix work (4^8 entries per vector).
pub const MAX_SIGN_QUBITS: usize = 8;

/// Largest register for which the sign matrix is stored densely.
const DENSE_SIGN_QUBITS: usize = 4;

/// One of `I, X, Y, Z`, stored as `0..=3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct PauliIndex(u8);

impl PauliIndex {
    pub const I: PauliIndex = PauliIndex(0);
    pub const X: PauliIndex = PauliIndex(1);
    pub const Y: PauliIndex = PauliIndex(2);
    pub const Z: PauliIndex = PauliIndex(3);

    pub fn new(value: u8) -> Result<Self> {
        if value < 4 {
            Ok(PauliIndex(value))
        } else {
            Err(Error::InvalidGate(format!(
                "Pauli index {value} not in 0..=3"
            )))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn matrix(self) -> CMatrix {
        let z = ZERO;
        let o = ONE;
        let entries = match self.0 {
            0 => [o, z, z, o],
            1 => [z, o, o, z],
            2 => [z, -I, I, z],
            _ => [o, z, z, -o],
        };
        CMatrix::from_row_slice(2, 2, &entries)
    }

    /// Image of the basis state `|bit⟩`: `σ|bit⟩ = phase·|bit'⟩`.
    #[inline]
    pub fn basis_action(self, bit: usize) -> (usize, C64) {
        match self.0 {
            0 => (bit, ONE),
            1 => (bit ^ 1, ONE),
            2 => (bit ^ 1, if bit == 0 { I } else { -I }),
            _ => (bit, if bit == 0 { ONE } else { -ONE }),
        }
    }

    /// Sign `s` in `σ_γ σ_α σ_γ = s·σ_α` with `self = α`.
    #[inline]
    pub fn conjugation_sign(self, gamma: PauliIndex) -> f64 {
        if self.0 == 0 || gamma.0 == 0 || self.0 == gamma.0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl TryFrom<u8> for PauliIndex {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        PauliIndex::new(v)
    }
}

impl From<PauliIndex> for u8 {
    fn from(p: PauliIndex) -> u8 {
        p.0
    }
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["I", "X", "Y", "Z"][self.0 as usize])
    }
}

/// Tensor product `σ_{α1} ⊗ … ⊗ σ_{αN}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    indices: Vec<PauliIndex>,
}

impl PauliString {
    pub fn new(indices: Vec<PauliIndex>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidGate("empty Pauli string".into()));
        }
        Ok(PauliString { indices })
    }

    pub fn from_values(values: &[u8]) -> Result<Self> {
        values
            .iter()
            .map(|&v| PauliIndex::new(v))
            .collect::<Result<Vec<_>>>()
            .and_then(PauliString::new)
    }

    /// Decodes a base-4 flat index.
    pub fn from_flat(mut flat: usize, n_qubits: usize) -> Self {
        assert!(n_qubits >= 1);
        let mut indices = vec![PauliIndex::I; n_qubits];
        for slot in indices.iter_mut().rev() {
            *slot = PauliIndex((flat % 4) as u8);
            flat /= 4;
        }
        PauliString { indices }
    }

    pub fn n_qubits(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[PauliIndex] {
        &self.indices
    }

    pub fn flat(&self) -> usize {
        self.indices.iter().fold(0, |acc, p| acc * 4 + p.0 as usize)
    }

    pub fn matrix(&self) -> CMatrix {
        let mut m = self.indices[0].matrix();
        for p in &self.indices[1..] {
            m = m.kronecker(&p.matrix());
        }
        m
    }

    /// `σ|j⟩ = phase·|j'⟩` for a computational basis index `j`.
    pub fn basis_action(&self, j: usize) -> (usize, C64) {
        let n = self.indices.len();
        let mut out = j;
        let mut phase = ONE;
        for (q, p) in self.indices.iter().enumerate() {
            let shift = n - 1 - q;
            let (b, ph) = p.basis_action((j >> shift) & 1);
            out = (out & !(1 << shift)) | (b << shift);
            phase *= ph;
        }
        (out, phase)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.indices {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Matrix of a Pauli string.
pub fn pauli_string_matrix(s: &PauliString) -> CMatrix {
    s.matrix()
}

/// Number of qubits `N` with `4^N == len`, if any.
pub fn qubits_for_len(len: usize) -> Option<usize> {
    let mut n = 0;
    let mut size = 1usize;
    while size < len {
        size = size.checked_mul(4)?;
        n += 1;
    }
    (size == len && n >= 1).then_some(n)
}

/// The sign matrix `A^{⊗N}` with entries `±1`.
///
/// Stored densely up to four qubits; above that entries are computed on
/// demand and products use the tensor structure.
#[derive(Clone, Debug)]
pub struct SignMatrix {
    n_qubits: usize,
    dense: Option<DMatrix<f64>>,
}

impl SignMatrix {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.n_qubits)
    }

    pub fn entry(&self, alpha: usize, gamma: usize) -> f64 {
        if let Some(d) = &self.dense {
            return d[(alpha, gamma)];
        }
        sign_entry(alpha, gamma, self.n_qubits)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.dense {
            Some(d) => d.clone(),
            None => {
                let n = self.dim();
                DMatrix::from_fn(n, n, |a, g| sign_entry(a, g, self.n_qubits))
            }
        }
    }

    /// `A^{⊗N} v`, using one 4×4 butterfly per qubit.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim());
        let mut out = v.to_vec();
        let dim = out.len();
        let mut stride = 1;
        for _ in 0..self.n_qubits {
            let block = stride * 4;
            for base in (0..dim).step_by(block) {
                for off in 0..stride {
                    let i = base + off;
                    let x = [
                        out[i],
                        out[i + stride],
                        out[i + 2 * stride],
                        out[i + 3 * stride],
                    ];
                    out[i] = x[0] + x[1] + x[2] + x[3];
                    out[i + stride] = x[0] + x[1] - x[2] - x[3];
                    out[i + 2 * stride] = x[0] - x[1] + x[2] - x[3];
                    out[i + 3 * stride] = x[0] - x[1] - x[2] + x[3];
                }
            }
            stride = block;
        }
        out
    }
}

fn sign_entry(mut alpha: usize, mut gamma: usize, n_qubits: usize) -> f64 {
    let mut s = 1.0;
    for _ in 0..n_qubits {
        s *= PauliIndex((alpha % 4) as u8).conjugation_sign(PauliIndex((gamma % 4) as u8));
        alpha /= 4;
        gamma /= 4;
    }
    s
}

/// `A^{⊗N}`; rejects `N = 0` and `N > 8`.
pub fn sign_matrix(n_qubits: usize) -> Result<SignMatrix> {
    if n_qubits == 0 {
        return Err(Error::BadLength { len: 1 });
    }
    if n_qubits > MAX_SIGN_QUBITS {
        return Err(Error::TooManyQubits {
            n: n_qubits,
            limit: MAX_SIGN_QUBITS,
        });
    }
    let dense = (n_qubits <= DENSE_SIGN_QUBITS).then(|| {
        let n = 1 << (2 * n_qubits);
        DMatrix::from_fn(n, n, |a, g| sign_entry(a, g, n_qubits))
    });
    Ok(SignMatrix { n_qubits, dense })
}

/// Probabilities `k_γ` of applying each Pauli string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PauliProbVector {
    k: Vec<f64>,
    n_qubits: usize,
}

impl PauliProbVector {
    /// Validates nonnegativity and normalisation (tolerance [`PROB_TOL`]);
    /// entries within tolerance of zero are clamped and the vector renormalised.
    pub fn new(k: Vec<f64>) -> Result<Self> {
        let n_qubits = qubits_for_len(k.len()).ok_or(Error::BadLength { len: k.len() })?;
        if n_qubits > MAX_SIGN_QUBITS {
            return Err(Error::TooManyQubits {
                n: n_qubits,
                limit: MAX_SIGN_QUBITS,
            });
        }
        if let Some((i, v)) = k.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidProbabilities(format!(
                "k[{i}] = {v} is not finite"
            )));
        }
        if let Some((i, v)) = k.iter().enumerate().find(|(_, &v)| v < -PROB_TOL) {
            return Err(Error::InvalidProbabilities(format!(
                "k[{i}] = {v:e} is negative"
            )));
        }
        let sum: f64 = k.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidProbabilities(format!(
                "entries sum to {sum}, not 1"
            )));
        }
        let mut k: Vec<f64> = k.into_iter().map(|v| v.max(0.0)).collect();
        let sum: f64 = k.iter().sum();
        k.iter_mut().for_each(|v| *v /= sum);
        Ok(PauliProbVector { k, n_qubits })
    }

    /// Like [`PauliProbVector::new`] but first rescales a nonnegative vector
    /// to unit sum.
    pub fn normalized(k: Vec<f64>) -> Result<Self> {
        let sum: f64 = k.iter().map(|v| v.max(0.0)).sum();
        if !(sum > 0.0) {
            return Err(Error::InvalidProbabilities(
                "vector has no positive mass".into(),
            ));
        }
        PauliProbVector::new(k.into_iter().map(|v| v.max(0.0) / sum).collect())
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::single(n_qubits, 0)
    }

    /// The unitary channel `ρ ↦ σ_γ ρ σ_γ`.
    pub fn single(n_qubits: usize, gamma: usize) -> Self {
        let mut k = vec![0.0; 1 << (2 * n_qubits)];
        k[gamma] = 1.0;
        PauliProbVector { k, n_qubits }
    }

    pub fn completely_depolarizing(n_qubits: usize) -> Self {
        let len = 1 << (2 * n_qubits);
        PauliProbVector {
            k: vec![1.0 / len as f64; len],
            n_qubits,
        }
    }

    /// Uniformly random point of the probability simplex.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let len = 1 << (2 * n_qubits);
        let raw: Vec<f64> = (0..len)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let sum: f64 = raw.iter().sum();
        PauliProbVector {
            k: raw.into_iter().map(|v| v / sum).collect(),
            n_qubits,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.k
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.k
    }

    /// `Σ_γ |k_γ - other_γ|`.
    pub fn l1_distance(&self, other: &PauliProbVector) -> f64 {
        self.k
            .iter()
            .zip(&other.k)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

impl std::ops::Index<usize> for PauliProbVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.k[i]
    }
}

impl TryFrom<Vec<f64>> for PauliProbVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        PauliProbVector::new(v)
    }
}

impl From<PauliProbVector> for Vec<f64> {
    fn from(k: PauliProbVector) -> Vec<f64> {
        k.k
    }
}

/// Multipliers `τ_α` applied to Bloch coefficients; `τ_0 = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TauVector {
    tau: Vec<f64>,
    n_qubits: usize,
}

impl TauVector {
    pub fn new(tau: Vec<f64>) -> Result<Self> {
        let n_qubits = qubits_for_len(tau.len()).ok_or(Error::BadLength { len: tau.len() })?;
        if n_qubits > MAX_SIGN_QUBITS {
            return Err(Error::TooManyQubits {
                n: n_qubits,
                limit: MAX_SIGN_QUBITS,
            });
        }
        if (tau[0] - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidTau(format!("tau[0] = {} must be 1", tau[0])));
        }
        if let Some((i, v)) = tau
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || v.abs() > 1.0 + PROB_TOL)
        {
            return Err(Error::InvalidTau(format!("tau[{i}] = {v} outside [-1, 1]")));
        }
        let mut tau = tau;
        tau[0] = 1.0;
        Ok(TauVector { tau, n_qubits })
    }

    /// One-qubit multipliers `(1, τ1, τ2, τ3)`.
    pub fn one_qubit(t1: f64, t2: f64, t3: f64) -> Result<Self> {
        TauVector::new(vec![1.0, t1, t2, t3])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.tau
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.tau
    }
}

impl std::ops::Index<usize> for TauVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.tau[i]
    }
}

impl TryFrom<Vec<f64>> for TauVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        TauVector::new(v)
    }
}

impl From<TauVector> for Vec<f64> {
    fn from(t: TauVector) -> Vec<f64> {
        t.tau
    }
}

/// `τ = A^{⊗N} k`.
pub fn k_to_tau(k: &PauliProbVector) -> TauVector {
    let a = sign_matrix(k.n_qubits).expect("validated on construction");
    let mut tau = a.apply(&k.k);
    tau[0] = 1.0;
    for t in tau.iter_mut() {
        *t = t.clamp(-1.0, 1.0);
    }
    TauVector {
        tau,
        n_qubits: k.n_qubits,
    }
}

/// `k = A^{⊗N} τ / 4^N`; fails with [`Error::NotAChannel`] when some
/// probability comes out below `-1e-12`.
pub fn tau_to_k(tau: &TauVector) -> Result<PauliProbVector> {
    let a = sign_matrix(tau.n_qubits)?;
    let scale = 1.0 / tau.tau.len() as f64;
    let k: Vec<f64> = a.apply(&tau.tau).into_iter().map(|v| v * scale).collect();
    if let Some((index, &value)) = k
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < -PROB_TOL)
        .min_by(|a, b| a.1.total_cmp(b.1))
    {
        return Err(Error::NotAChannel { index, value });
    }
    let k: Vec<f64> = k.into_iter().map(|v| v.max(0.0)).collect();
    let sum: f64 = k.iter().sum();
    Ok(PauliProbVector {
        k: k.into_iter().map(|v| v / sum).collect(),
        n_qubits: tau.n_qubits,
    })
}

/// Whether one-qubit multipliers `(1, τ1, τ2, τ3)` lie in the tetrahedron
/// with vertices `(1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1)`.
pub fn tetrahedron_contains(tau: &TauVector) -> bool {
    assert_eq!(
        tau.n_qubits, 1,
        "tetrahedron test is for one-qubit multipliers"
    );
    tetrahedron_contains_xyz(tau[1], tau[2], tau[3])
}

pub fn tetrahedron_contains_xyz(t1: f64, t2: f64, t3: f64) -> bool {
    let tol = -PROB_TOL;
    1.0 + t1 - t2 - t3 >= tol
        && 1.0 + t2 - t1 - t3 >= tol
        && 1.0 + t3 - t1 - t2 >= tol
        && 1.0 + t1 + t2 + t3 >= tol
}

/// Vertex `(τ1, τ2, τ3)` of the tetrahedron reached by the channel `σ_γ`.
pub fn tetrahedron_vertex(gamma: usize) -> [f64; 3] {
    assert!((0..4).contains(&gamma));
    let g = PauliIndex(gamma as u8);
    [1u8, 2, 3].map(|a| PauliIndex(a).conjugation_sign(g))
}

/// Uniform Pauli matrix helper used by tests and the channel module.
pub fn pauli_matrix(p: u8) -> CMatrix {
    PauliIndex::new(p).expect("valid Pauli index").matrix()
}
