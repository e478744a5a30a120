// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Pauli channels and dynamical maps as mathematical objects.
//!
//! Maps are applied to arbitrary operators through [`LinearMap`], so the
//! same Choi/CP/TP machinery serves analytic Pauli channels, circuits,
//! reconstructed tomography estimates and deliberately non-physical maps.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, ONE, ZERO};
use crate::pauli::{k_to_tau, PauliProbVector, PauliString};

/// Tolerance for Hermiticity, trace and positivity of states.
pub const STATE_TOL: f64 = 1e-10;

/// Tolerance for the Choi-matrix positivity and trace-preservation checks.
pub const CPTP_TOL: f64 = 1e-10;

/// Largest register accepted for dense density-matrix work.
pub const MAX_DENSITY_QUBITS: usize = 8;

/// A validated `2^N × 2^N` density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    m: CMatrix,
}

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity, each to [`STATE_TOL`].
    pub fn new(m: CMatrix) -> Result<Self> {
        let n_qubits = qubits_for_dim(m.nrows()).ok_or(Error::InvalidState(format!(
            "dimension {} is not a power of two",
            m.nrows()
        )))?;
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidState("matrix is not square".into()));
        }
        if n_qubits > MAX_DENSITY_QUBITS {
            return Err(Error::TooManyQubits {
                n: n_qubits,
                limit: MAX_DENSITY_QUBITS,
            });
        }
        let herm = linalg::max_abs_diff(&m, &m.adjoint());
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = linalg::trace(&m);
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, not 1")));
        }
        let min_ev = linalg::min_hermitian_eigenvalue(&m);
        if min_ev < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_ev:e}"
            )));
        }
        Ok(DensityMatrix { n_qubits, m })
    }

    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        let n_qubits = qubits_for_dim(m.nrows()).expect("power-of-two dimension");
        DensityMatrix { n_qubits, m }
    }

    /// `|ψ⟩⟨ψ|` for a normalised state vector.
    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("state has norm {norm}")));
        }
        qubits_for_dim(psi.len()).ok_or(Error::InvalidState(format!(
            "dimension {} is not a power of two",
            psi.len()
        )))?;
        Ok(DensityMatrix::new_unchecked(psi * psi.adjoint()))
    }

    /// `|0…0⟩⟨0…0|`.
    pub fn zero_state(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        let mut m = CMatrix::zeros(d, d);
        m[(0, 0)] = ONE;
        DensityMatrix { n_qubits, m }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        DensityMatrix {
            n_qubits,
            m: CMatrix::identity(d, d).unscale(d as f64),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.m * &self.m)).re
    }
}

/// JSON form of a complex matrix: separate real and imaginary row arrays.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexMatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMatrix> for ComplexMatrixJson {
    fn from(m: &CMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        ComplexMatrixJson {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl TryFrom<ComplexMatrixJson> for CMatrix {
    type Error = Error;
    fn try_from(j: ComplexMatrixJson) -> Result<CMatrix> {
        let n = j.re.len();
        let m = j.re.first().map_or(0, Vec::len);
        if j.im.len() != n || j.re.iter().chain(&j.im).any(|r| r.len() != m) {
            return Err(Error::InvalidState(
                "ragged or mismatched re/im arrays".into(),
            ));
        }
        Ok(CMatrix::from_fn(n, m, |a, b| {
            C64::new(j.re[a][b], j.im[a][b])
        }))
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexMatrixJson::from(&self.m).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ComplexMatrixJson::deserialize(d)?;
        let m = CMatrix::try_from(j).map_err(serde::de::Error::custom)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    (dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}

/// Bloch (Pauli) coefficients `r_α = Tr(ρ σ_α)`; `r_0 = 1` for a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochCoefficients {
    r: Vec<f64>,
}

impl BlochCoefficients {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        crate::pauli::qubits_for_len(r.len()).ok_or(Error::BadLength { len: r.len() })?;
        Ok(BlochCoefficients { r })
    }

    pub fn n_qubits(&self) -> usize {
        crate::pauli::qubits_for_len(self.r.len()).expect("validated length")
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.r
    }
}

/// `Tr(X σ_α)` for every Pauli string, for an arbitrary operator `X`.
pub fn pauli_coefficients(x: &CMatrix) -> Vec<C64> {
    let d = x.nrows();
    let n = qubits_for_dim(d).expect("power-of-two dimension");
    (0..d * d)
        .map(|alpha| {
            let s = PauliString::from_flat(alpha, n);
            (0..d)
                .map(|j| {
                    let (row, ph) = s.basis_action(j);
                    ph * x[(j, row)]
                })
                .sum()
        })
        .collect()
}

/// `(1/2^N) Σ_α r_α σ_α` without any validation.
pub fn operator_from_pauli_coefficients(r: &[C64]) -> CMatrix {
    let n = crate::pauli::qubits_for_len(r.len()).expect("4^N coefficients");
    let d = 1 << n;
    let mut m = CMatrix::zeros(d, d);
    for (alpha, &coef) in r.iter().enumerate() {
        if coef == ZERO {
            continue;
        }
        let s = PauliString::from_flat(alpha, n);
        for j in 0..d {
            let (row, ph) = s.basis_action(j);
            m[(row, j)] += coef * ph;
        }
    }
    m.unscale(d as f64)
}

pub fn bloch_decompose(rho: &DensityMatrix) -> BlochCoefficients {
    BlochCoefficients {
        r: pauli_coefficients(&rho.m)
            .into_iter()
            .map(|z| z.re)
            .collect(),
    }
}

/// Inverse of [`bloch_decompose`]; rejects coefficients that give a
/// non-positive or non-normalised matrix.
pub fn bloch_compose(r: &BlochCoefficients) -> Result<DensityMatrix> {
    let coefs: Vec<C64> = r.r.iter().map(|&v| C64::new(v, 0.0)).collect();
    DensityMatrix::new(operator_from_pauli_coefficients(&coefs))
}

/// A linear map on operators of an `N`-qubit register.
pub trait LinearMap: Sync {
    fn n_qubits(&self) -> usize;

    /// Image of an arbitrary (not necessarily Hermitian) operator.
    fn apply_operator(&self, x: &CMatrix) -> CMatrix;

    /// The probability vector when the map is known to be a Pauli channel.
    fn pauli_probabilities(&self) -> Option<PauliProbVector> {
        None
    }
}

impl<T: LinearMap + ?Sized> LinearMap for &T {
    fn n_qubits(&self) -> usize {
        (**self).n_qubits()
    }
    fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        (**self).apply_operator(x)
    }
    fn pauli_probabilities(&self) -> Option<PauliProbVector> {
        (**self).pauli_probabilities()
    }
}

/// `ρ ↦ Σ_γ k_γ σ_γ ρ σ_γ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel {
    pub n_qubits: usize,
    pub k: PauliProbVector,
}

impl PauliChannel {
    pub fn new(k: PauliProbVector) -> Self {
        PauliChannel {
            n_qubits: k.n_qubits(),
            k,
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliChannel::new(PauliProbVector::identity(n_qubits))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        apply_channel(self, rho)
    }
}

/// Applies a Pauli channel to a state.
pub fn apply_channel(ch: &PauliChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.n_qubits != ch.n_qubits {
        return Err(Error::DimensionMismatch {
            what: "state for Pauli channel",
            expected: 1 << ch.n_qubits,
            got: rho.dim(),
        });
    }
    let mut out = ch.apply_operator(&rho.m);
    // Σ_γ k_γ σ ρ σ is Hermitian in exact arithmetic; remove rounding asymmetry.
    out = linalg::hermitian_part(&out);
    Ok(DensityMatrix::new_unchecked(out))
}

impl LinearMap for PauliChannel {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        let d = 1usize << self.n_qubits;
        assert_eq!(x.nrows(), d, "operator dimension");
        let mut out = CMatrix::zeros(d, d);
        let mut rows = vec![(0usize, ZERO); d];
        for (gamma, &kg) in self.k.as_slice().iter().enumerate() {
            if kg == 0.0 {
                continue;
            }
            let s = PauliString::from_flat(gamma, self.n_qubits);
            for (j, slot) in rows.iter_mut().enumerate() {
                *slot = s.basis_action(j);
            }
            // (σXσ)_{ab} = ph(a⊕x) X_{a⊕x, b⊕x} ph(b), where σ|j⟩ = ph(j)|j⊕x⟩
            for b in 0..d {
                let (bx, phb) = rows[b];
                for a in 0..d {
                    let ax = rows[a].0;
                    out[(a, b)] += rows[ax].1 * x[(ax, bx)] * phb * kg;
                }
            }
        }
        out
    }

    fn pauli_probabilities(&self) -> Option<PauliProbVector> {
        Some(self.k.clone())
    }
}

/// A map that multiplies each Pauli coefficient by an arbitrary real
/// multiplier. Completely positive only when the multipliers lie in the
/// Pauli-channel polytope.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierMap {
    n_qubits: usize,
    tau: Vec<f64>,
}

impl MultiplierMap {
    pub fn new(tau: Vec<f64>) -> Result<Self> {
        let n_qubits =
            crate::pauli::qubits_for_len(tau.len()).ok_or(Error::BadLength { len: tau.len() })?;
        Ok(MultiplierMap { n_qubits, tau })
    }
}

impl LinearMap for MultiplierMap {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        let coefs: Vec<C64> = pauli_coefficients(x)
            .into_iter()
            .zip(&self.tau)
            .map(|(c, &t)| c * t)
            .collect();
        operator_from_pauli_coefficients(&coefs)
    }
}

/// Wraps a closure as a [`LinearMap`].
pub struct FnMap<F> {
    n_qubits: usize,
    f: F,
}

impl<F> FnMap<F>
where
    F: Fn(&CMatrix) -> CMatrix + Sync,
{
    pub fn new(n_qubits: usize, f: F) -> Self {
        FnMap { n_qubits, f }
    }
}

impl<F> LinearMap for FnMap<F>
where
    F: Fn(&CMatrix) -> CMatrix + Sync,
{
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        (self.f)(x)
    }
}

/// Normalised Choi matrix `(I ⊗ E)|Ω⟩⟨Ω|` with `|Ω⟩ = Σ_i |i⟩|i⟩ / √d`.
///
/// The first tensor factor is the reference copy, the second the output.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    n_qubits: usize,
    m: CMatrix,
}

impl ChoiMatrix {
    /// Wraps a raw `d² × d²` matrix.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        let d2 = m.nrows();
        let d = (d2 as f64).sqrt().round() as usize;
        if d * d != d2 || m.ncols() != d2 {
            return Err(Error::DimensionMismatch {
                what: "Choi matrix",
                expected: d * d,
                got: d2,
            });
        }
        let n_qubits = qubits_for_dim(d).ok_or(Error::BadLength { len: d2 })?;
        Ok(ChoiMatrix { n_qubits, m })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.m)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        linalg::min_hermitian_eigenvalue(&self.m) >= -tol
    }

    /// Partial trace over the output factor; `I/d` for trace-preserving maps.
    pub fn output_trace(&self) -> CMatrix {
        let d = 1 << self.n_qubits;
        CMatrix::from_fn(d, d, |i, j| {
            (0..d).map(|m| self.m[(i * d + m, j * d + m)]).sum()
        })
    }
}

impl LinearMap for ChoiMatrix {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `E(X) = d Σ_ij X_ij J_(ij)` with `J_(ij)` the `(i,j)` block.
    fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        let d = 1 << self.n_qubits;
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let xij = x[(i, j)];
                if xij == ZERO {
                    continue;
                }
                out += self.m.view((i * d, j * d), (d, d)) * xij;
            }
        }
        out.scale(d as f64)
    }
}

/// Matrix unit `|i⟩⟨j|`.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub fn choi_matrix<M: LinearMap + ?Sized>(map: &M) -> ChoiMatrix {
    let n = map.n_qubits();
    let d = 1 << n;
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let img = map.apply_operator(&matrix_unit(d, i, j));
            m.view_mut((i * d, j * d), (d, d)).copy_from(&img);
        }
    }
    ChoiMatrix {
        n_qubits: n,
        m: m.unscale(d as f64),
    }
}

/// CP iff the Choi matrix has no eigenvalue below `-1e-10`.
pub fn is_completely_positive<M: LinearMap + ?Sized>(map: &M) -> bool {
    choi_matrix(map).is_psd(CPTP_TOL)
}

/// TP iff `Tr E(|i⟩⟨j|) = δ_ij` (to `1e-10`) on the matrix-unit basis.
pub fn is_trace_preserving<M: LinearMap + ?Sized>(map: &M) -> bool {
    let d = 1 << map.n_qubits();
    (0..d).all(|i| {
        (0..d).all(|j| {
            let t = linalg::trace(&map.apply_operator(&matrix_unit(d, i, j)));
            let target = if i == j { ONE } else { ZERO };
            (t - target).norm() <= CPTP_TOL
        })
    })
}

/// The one-qubit dynamical maps discussed alongside the 1PR construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedMap {
    /// `(1-p)ρ + p XρX`
    BitFlip,
    /// `(1-p)ρ + p ZρZ`
    PhaseFlip,
    /// `(1-p)ρ + p YρY`
    BitPhaseFlip,
    /// `(1-3p/4)ρ + (p/4)(XρX + YρY + ZρZ)`
    Depolarizing,
    /// Parabola from the identity (p = -1) to the `Z` vertex (p = 1).
    Parabolic,
}

impl NamedMap {
    pub const ALL: [NamedMap; 5] = [
        NamedMap::BitFlip,
        NamedMap::PhaseFlip,
        NamedMap::BitPhaseFlip,
        NamedMap::Depolarizing,
        NamedMap::Parabolic,
    ];

    pub fn domain(self) -> (f64, f64) {
        match self {
            NamedMap::Parabolic => (-1.0, 1.0),
            _ => (0.0, 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedMap::BitFlip => "bitflip",
            NamedMap::PhaseFlip => "phaseflip",
            NamedMap::BitPhaseFlip => "bitphaseflip",
            NamedMap::Depolarizing => "depolarizing",
            NamedMap::Parabolic => "parabolic",
        }
    }

    /// `k(p)`; `p` must lie in [`NamedMap::domain`].
    pub fn k(self, p: f64) -> Result<PauliProbVector> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&p) {
            return Err(Error::OutOfDomain { p, lo, hi });
        }
        let k = match self {
            NamedMap::BitFlip => vec![1.0 - p, p, 0.0, 0.0],
            NamedMap::BitPhaseFlip => vec![1.0 - p, 0.0, p, 0.0],
            NamedMap::PhaseFlip => vec![1.0 - p, 0.0, 0.0, p],
            NamedMap::Depolarizing => {
                vec![1.0 - 3.0 * p / 4.0, p / 4.0, p / 4.0, p / 4.0]
            }
            NamedMap::Parabolic => vec![
                (1.0 - p).powi(2) / 4.0,
                (1.0 - p * p) / 4.0,
                (1.0 - p * p) / 4.0,
                (1.0 + p).powi(2) / 4.0,
            ],
        };
        PauliProbVector::new(k)
    }

    pub fn dynamical_map(self) -> DynamicalMap {
        let (lo, hi) = self.domain();
        DynamicalMap::from_fn(1, lo, hi, move |p| {
            self.k(p.clamp(lo, hi)).expect("clamped into domain")
        })
    }
}

impl fmt::Display for NamedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedMap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        NamedMap::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::UnknownMap(s.to_string()))
    }
}

/// `named_map(name, p)`: the probability vector of a named map.
pub fn named_map(name: NamedMap, p: f64) -> Result<PauliProbVector> {
    name.k(p)
}

type CurveFn = dyn Fn(f64) -> PauliProbVector + Send + Sync;

/// A curve of Pauli channels `p ↦ k(p)` on `[a, b]` starting at the identity.
#[derive(Clone)]
pub struct DynamicalMap {
    n_qubits: usize,
    domain: (f64, f64),
    k_of_p: Arc<CurveFn>,
}

impl fmt::Debug for DynamicalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynamicalMap")
            .field("n_qubits", &self.n_qubits)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// Default number of samples used to check a dynamical map.
pub const DEFAULT_MAP_SAMPLES: usize = 101;

impl DynamicalMap {
    pub fn from_fn<F>(n_qubits: usize, a: f64, b: f64, f: F) -> Self
    where
        F: Fn(f64) -> PauliProbVector + Send + Sync + 'static,
    {
        assert!(a < b, "empty domain");
        DynamicalMap {
            n_qubits,
            domain: (a, b),
            k_of_p: Arc::new(f),
        }
    }

    /// Piecewise-linear interpolation between samples `(p_i, k_i)` with
    /// strictly increasing `p_i`.
    pub fn from_samples(samples: Vec<(f64, PauliProbVector)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidCurve("need at least two samples".into()));
        }
        let n_qubits = samples[0].1.n_qubits();
        if samples.iter().any(|(_, k)| k.n_qubits() != n_qubits) {
            return Err(Error::InvalidCurve(
                "samples disagree on qubit count".into(),
            ));
        }
        if samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidCurve(
                "parameters must strictly increase".into(),
            ));
        }
        let (a, b) = (samples[0].0, samples[samples.len() - 1].0);
        let samples = Arc::new(samples);
        Ok(DynamicalMap::from_fn(n_qubits, a, b, move |p| {
            let i = samples
                .partition_point(|(q, _)| *q <= p)
                .clamp(1, samples.len() - 1);
            let (p0, k0) = &samples[i - 1];
            let (p1, k1) = &samples[i];
            let t = ((p - p0) / (p1 - p0)).clamp(0.0, 1.0);
            let k: Vec<f64> = k0
                .as_slice()
                .iter()
                .zip(k1.as_slice())
                .map(|(x, y)| (1.0 - t) * x + t * y)
                .collect();
            PauliProbVector::normalized(k).expect("convex combination of channels")
        }))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn k_at(&self, p: f64) -> Result<PauliProbVector> {
        let (lo, hi) = self.domain;
        if !(lo..=hi).contains(&p) {
            return Err(Error::OutOfDomain { p, lo, hi });
        }
        Ok((self.k_of_p)(p))
    }

    /// `n` equally spaced samples covering the domain (endpoints included).
    pub fn sample(&self, n: usize) -> Vec<(f64, PauliProbVector)> {
        let (lo, hi) = self.domain;
        (0..n)
            .map(|i| {
                let p = if n == 1 {
                    lo
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                };
                (p, (self.k_of_p)(p))
            })
            .collect()
    }

    /// Checks that the map starts at the identity channel (to `1e-10`) and
    /// that every sample has the right size.
    pub fn validate(&self, n: usize) -> Result<()> {
        let samples = self.sample(n.max(2));
        let start = &samples[0].1;
        if start.l1_distance(&PauliProbVector::identity(self.n_qubits)) > 1e-10 {
            return Err(Error::InvalidCurve(format!(
                "map does not start at the identity channel: k(a) = {:?}",
                start.as_slice()
            )));
        }
        if samples.iter().any(|(_, k)| k.n_qubits() != self.n_qubits) {
            return Err(Error::InvalidCurve("sample has wrong qubit count".into()));
        }
        Ok(())
    }

    /// Largest L1 jump between consecutive samples, a sample-resolution
    /// proxy for continuity.
    pub fn max_step(&self, n: usize) -> f64 {
        self.sample(n.max(2))
            .windows(2)
            .map(|w| w[0].1.l1_distance(&w[1].1))
            .fold(0.0, f64::max)
    }

    /// Multiplier trajectory `τ(p)` at `n` samples.
    pub fn tau_trajectory(&self, n: usize) -> Vec<(f64, crate::pauli::TauVector)> {
        self.sample(n)
            .into_iter()
            .map(|(p, k)| (p, k_to_tau(&k)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff};
    use crate::pauli::pauli_matrix;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
        let d = 1 << n;
        let g = CMatrix::from_fn(d, d, |_, _| linalg::random_complex(rng));
        let m = &g * g.adjoint();
        let tr = linalg::trace(&m).re;
        DensityMatrix::new(m.unscale(tr)).unwrap()
    }

    /// Direct Σ k σ ρ σ with dense Pauli-string matrices.
    fn brute_apply(k: &PauliProbVector, x: &CMatrix) -> CMatrix {
        let n = k.n_qubits();
        let d = 1 << n;
        let mut out = CMatrix::zeros(d, d);
        for (g, &kg) in k.as_slice().iter().enumerate() {
            let s = PauliString::from_flat(g, n).matrix();
            out += (&s * x * &s).scale(kg);
        }
        out
    }

    #[test]
    fn identity_channel_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_state(2, &mut rng);
        let out = apply_channel(&PauliChannel::identity(2), &rho).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn bit_flip_half_on_zero() {
        let ch = PauliChannel::new(named_map(NamedMap::BitFlip, 0.5).unwrap());
        let out = apply_channel(&ch, &DensityMatrix::zero_state(1)).unwrap();
        assert!(max_abs_diff(out.matrix(), DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);
    }

    #[test]
    fn depolarizing_maps_pure_to_mixed() {
        let ch = PauliChannel::new(named_map(NamedMap::Depolarizing, 1.0).unwrap());
        let psi = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let out = apply_channel(&ch, &DensityMatrix::from_pure(&psi).unwrap()).unwrap();
        assert!(max_abs_diff(out.matrix(), DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let ch = PauliChannel::identity(2);
        assert!(matches!(
            apply_channel(&ch, &DensityMatrix::zero_state(1)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bloch_examples() {
        let r = bloch_decompose(&DensityMatrix::zero_state(1));
        assert_eq!(r.as_slice(), &[1.0, 0.0, 0.0, 1.0]);
        let rho = bloch_compose(&BlochCoefficients::new(vec![1., 0., 0., 0.]).unwrap()).unwrap();
        assert!(max_abs_diff(rho.matrix(), DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);
        // outside the Bloch ball
        assert!(bloch_compose(&BlochCoefficients::new(vec![1., 1., 1., 0.]).unwrap()).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let bad = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ZERO]);
        assert!(DensityMatrix::new(bad).is_err());
        let not_unit = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(not_unit).is_err());
        let neg = CMatrix::from_row_slice(2, 2, &[c(1.5, 0.), ZERO, ZERO, c(-0.5, 0.)]);
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn density_matrix_json() {
        let rho = DensityMatrix::maximally_mixed(1);
        let s = serde_json::to_string(&rho).unwrap();
        assert_eq!(
            s,
            r#"{"re":[[0.5,0.0],[0.0,0.5]],"im":[[0.0,0.0],[0.0,0.0]]}"#
        );
        let back: DensityMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn choi_of_identity_is_bell_projector() {
        let choi = choi_matrix(&PauliChannel::identity(1));
        let ev = choi.eigenvalues();
        let expected = [0.0, 0.0, 0.0, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let h = 0.5;
        assert!((choi.matrix()[(0, 3)].re - h).abs() < 1e-15);
    }

    #[test]
    fn choi_of_full_depolarizing() {
        let choi = choi_matrix(&PauliChannel::new(
            PauliProbVector::completely_depolarizing(1),
        ));
        let target = CMatrix::identity(4, 4).unscale(4.0);
        assert!(max_abs_diff(choi.matrix(), &target) < 1e-15);
    }

    #[test]
    fn choi_of_bit_flip() {
        let choi = choi_matrix(&PauliChannel::new(
            named_map(NamedMap::BitFlip, 0.3).unwrap(),
        ));
        let ev = choi.eigenvalues();
        for (a, b) in ev.iter().zip([0.0, 0.0, 0.3, 0.7]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn choi_reproduces_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ch = PauliChannel::new(PauliProbVector::random(1, &mut rng));
        let choi = choi_matrix(&ch);
        let x = CMatrix::from_fn(2, 2, |_, _| linalg::random_complex(&mut rng));
        assert!(max_abs_diff(&choi.apply_operator(&x), &ch.apply_operator(&x)) < 1e-14);
    }

    #[test]
    fn pauli_channels_are_cptp() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=2 {
            let ch = PauliChannel::new(PauliProbVector::random(n, &mut rng));
            assert!(is_completely_positive(&ch));
            assert!(is_trace_preserving(&ch));
        }
    }

    #[test]
    fn tau_outside_tetrahedron_is_not_cp() {
        let m = MultiplierMap::new(vec![1., 1., 1., -1.]).unwrap();
        assert!(!is_completely_positive(&m));
        assert!(is_trace_preserving(&m));
        let ev = choi_matrix(&m).eigenvalues();
        assert!((ev[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn transpose_is_positive_but_not_cp() {
        let transpose = FnMap::new(1, |x: &CMatrix| x.transpose());
        let via_tau = MultiplierMap::new(vec![1., 1., -1., 1.]).unwrap();
        let x = CMatrix::from_fn(2, 2, |i, j| c(i as f64 + 0.3, j as f64 - 0.7));
        assert!(max_abs_diff(&transpose.apply_operator(&x), &via_tau.apply_operator(&x)) < 1e-15);
        assert!(!is_completely_positive(&transpose));
        let ev = choi_matrix(&transpose).eigenvalues();
        assert!((ev[0] + 0.5).abs() < 1e-12);
        // positive: the transpose of a state is a state
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_state(1, &mut rng);
        assert!(DensityMatrix::new(transpose.apply_operator(rho.matrix())).is_ok());
    }

    #[test]
    fn named_map_examples() {
        assert_eq!(
            named_map(NamedMap::Depolarizing, 1.0).unwrap().as_slice(),
            &[0.25; 4]
        );
        assert_eq!(
            named_map(NamedMap::Parabolic, -1.0).unwrap().as_slice(),
            &[1., 0., 0., 0.]
        );
        assert_eq!(
            named_map(NamedMap::Parabolic, 1.0).unwrap().as_slice(),
            &[0., 0., 0., 1.]
        );
        assert_eq!(
            named_map(NamedMap::BitFlip, 0.0).unwrap(),
            PauliProbVector::identity(1)
        );
        assert!(matches!(
            named_map(NamedMap::BitFlip, 1.5),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(named_map(NamedMap::Parabolic, -1.01).is_err());
        assert_eq!(
            "bit-phase-flip".parse::<NamedMap>().unwrap(),
            NamedMap::BitPhaseFlip
        );
        assert!("amplitude".parse::<NamedMap>().is_err());
    }

    #[test]
    fn named_maps_start_at_identity() {
        for m in NamedMap::ALL {
            let dm = m.dynamical_map();
            dm.validate(DEFAULT_MAP_SAMPLES).unwrap();
            assert_eq!(
                dm.k_at(dm.domain().0).unwrap(),
                PauliProbVector::identity(1)
            );
            assert!(dm.max_step(DEFAULT_MAP_SAMPLES) < 0.1);
        }
    }

    #[test]
    fn sampled_map_interpolates() {
        let samples = NamedMap::Depolarizing.dynamical_map().sample(11);
        let dm = DynamicalMap::from_samples(samples).unwrap();
        let k = dm.k_at(0.55).unwrap();
        let exact = named_map(NamedMap::Depolarizing, 0.55).unwrap();
        assert!(k.l1_distance(&exact) < 1e-12);
        assert!(dm.k_at(1.2).is_err());
        let bad =
            DynamicalMap::from_fn(1, 0.0, 1.0, |_| PauliProbVector::completely_depolarizing(1));
        assert!(bad.validate(11).is_err());
    }

    #[test]
    fn pauli_helper_matches() {
        assert_eq!(pauli_matrix(2), crate::pauli::PauliIndex::Y.matrix());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn multiplier_property(seed in any::<u64>(), n in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = PauliProbVector::random(n, &mut rng);
            let rho = random_state(n, &mut rng);
            let out = apply_channel(&PauliChannel::new(k.clone()), &rho).unwrap();
            let tau = k_to_tau(&k);
            let r_in = bloch_decompose(&rho);
            let r_out = bloch_decompose(&out);
            for a in 0..tau.as_slice().len() {
                prop_assert!((r_out.as_slice()[a] - tau[a] * r_in.as_slice()[a]).abs() < 1e-10);
            }
            // trace, Hermiticity, positivity
            prop_assert!((linalg::trace(out.matrix()) - ONE).norm() < 1e-12);
            prop_assert!(max_abs_diff(out.matrix(), &out.matrix().adjoint()) < 1e-12);
            prop_assert!(linalg::min_hermitian_eigenvalue(out.matrix()) > -1e-10);
        }

        #[test]
        fn fast_apply_matches_dense(seed in any::<u64>(), n in 1usize..=2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = PauliProbVector::random(n, &mut rng);
            let d = 1 << n;
            let x = CMatrix::from_fn(d, d, |_, _| linalg::random_complex(&mut rng));
            let fast = PauliChannel::new(k.clone()).apply_operator(&x);
            prop_assert!(max_abs_diff(&fast, &brute_apply(&k, &x)) < 1e-12);
        }

        #[test]
        fn choi_eigenvalues_are_probabilities(seed in any::<u64>(), n in 1usize..=2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = PauliProbVector::random(n, &mut rng);
            let ev = choi_matrix(&PauliChannel::new(k.clone())).eigenvalues();
            let mut sorted = k.into_vec();
            sorted.sort_by(f64::total_cmp);
            for (a, b) in ev.iter().zip(&sorted) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }

        #[test]
        fn bloch_roundtrip(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_state(2, &mut rng);
            let back = bloch_compose(&bloch_decompose(&rho)).unwrap();
            prop_assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-12);
        }
    }
}
