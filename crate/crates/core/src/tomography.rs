// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulated one-qubit process tomography and tetrahedron fidelity scans.
//!
//! Synthesised circuits run under a [`NoiseModel`]; every input state is
//! measured in the `X`, `Y` and `Z` bases, the Pauli transfer matrix is
//! recovered by linear inversion and then projected onto CPTP maps.
//! State preparation and basis changes are ideal; only the gates of the
//! circuit and the final readout are noisy.

use std::fmt;

use nalgebra::{DMatrix, Matrix4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::channels::PauliChannel;
use crate::channels::{
    choi_matrix, operator_from_pauli_coefficients, pauli_coefficients, ChoiMatrix, DensityMatrix,
    LinearMap,
};
use crate::circuits::{synthesize_channel_circuit, Circuit, NoiseModel, NoisyCircuitChannel};
use crate::distance::{diamond_fidelity, FidelityRecord};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::par::{map_indexed, Execution};
use crate::pauli::{tau_to_k, tetrahedron_contains_xyz, PauliProbVector, TauVector};

/// Off-diagonal PTM entries below this mark the estimate as a Pauli channel.
pub const PAULI_DIAGONAL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputState {
    Zero,
    One,
    Plus,
    PlusI,
}

impl InputState {
    pub const STANDARD: [InputState; 4] = [
        InputState::Zero,
        InputState::One,
        InputState::Plus,
        InputState::PlusI,
    ];

    /// `(1, r_x, r_y, r_z)`.
    pub fn bloch(self) -> [f64; 4] {
        match self {
            InputState::Zero => [1.0, 0.0, 0.0, 1.0],
            InputState::One => [1.0, 0.0, 0.0, -1.0],
            InputState::Plus => [1.0, 1.0, 0.0, 0.0],
            InputState::PlusI => [1.0, 0.0, 1.0, 0.0],
        }
    }

    pub fn density(self) -> DensityMatrix {
        let b = self.bloch();
        let coefs: Vec<C64> = b.iter().map(|&v| c(v, 0.0)).collect();
        DensityMatrix::new(operator_from_pauli_coefficients(&coefs)).expect("pure qubit state")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    /// Flat Pauli index of the measured observable.
    pub fn pauli(self) -> usize {
        match self {
            Basis::X => 1,
            Basis::Y => 2,
            Basis::Z => 3,
        }
    }
}

/// Number of repetitions per setting, or exact outcome probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "ShotsRepr", into = "ShotsRepr")]
pub enum Shots {
    #[default]
    Exact,
    Count(u64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ShotsRepr {
    Name(String),
    Count(u64),
}

impl TryFrom<ShotsRepr> for Shots {
    type Error = Error;
    fn try_from(r: ShotsRepr) -> Result<Self> {
        match r {
            ShotsRepr::Count(0) => Err(Error::InvalidConfig("shots must be at least 1".into())),
            ShotsRepr::Count(n) => Ok(Shots::Count(n)),
            ShotsRepr::Name(s) if s == "exact" => Ok(Shots::Exact),
            ShotsRepr::Name(s) => Err(Error::InvalidConfig(format!(
                "shots must be a positive integer or \"exact\", got {s:?}"
            ))),
        }
    }
}

impl From<Shots> for ShotsRepr {
    fn from(s: Shots) -> Self {
        match s {
            Shots::Exact => ShotsRepr::Name("exact".into()),
            Shots::Count(n) => ShotsRepr::Count(n),
        }
    }
}

impl Shots {
    pub fn count(self) -> Option<u64> {
        match self {
            Shots::Exact => None,
            Shots::Count(n) => Some(n),
        }
    }
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Exact => f.write_str("exact"),
            Shots::Count(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TomographyConfig {
    pub shots: Shots,
    pub input_states: Vec<InputState>,
    pub bases: Vec<Basis>,
    pub seed: u64,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        TomographyConfig {
            shots: Shots::Exact,
            input_states: InputState::STANDARD.to_vec(),
            bases: Basis::ALL.to_vec(),
            seed: 0,
        }
    }
}

impl TomographyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shots == Shots::Count(0) {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        for b in Basis::ALL {
            if !self.bases.contains(&b) {
                return Err(Error::InvalidConfig(format!("basis {b:?} is missing")));
            }
        }
        let rows: Vec<f64> = self.input_states.iter().flat_map(|s| s.bloch()).collect();
        let m = DMatrix::from_row_slice(self.input_states.len(), 4, &rows);
        if m.rank(1e-10) < 4 {
            return Err(Error::SingularInversion);
        }
        Ok(())
    }
}

/// Outcome statistics of one (input, basis) setting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub input: InputState,
    pub basis: Basis,
    pub shots: Shots,
    /// Number of `1` outcomes; zero when `shots` is exact.
    pub ones: u64,
    /// Probability (exact) or relative frequency (sampled) of outcome `1`.
    pub p_one: f64,
}

impl Counts {
    /// Estimated expectation value of the measured Pauli observable.
    pub fn expectation(&self) -> f64 {
        1.0 - 2.0 * self.p_one
    }
}

fn born_p_one(rho: &CMatrix, basis: Basis) -> f64 {
    let e = pauli_coefficients(rho)[basis.pauli()].re;
    ((1.0 - e) / 2.0).clamp(0.0, 1.0)
}

fn sample_counts(
    map: &impl LinearMap,
    nm: &NoiseModel,
    input: InputState,
    basis: Basis,
    shots: Shots,
    seed: u64,
) -> Counts {
    let out = map.apply_operator(input.density().matrix());
    let p = nm.observed_one(born_p_one(&out, basis));
    match shots {
        Shots::Exact => Counts {
            input,
            basis,
            shots,
            ones: 0,
            p_one: p,
        },
        Shots::Count(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ones = Binomial::new(n, p.clamp(0.0, 1.0))
                .expect("probability inside [0, 1]")
                .sample(&mut rng);
            Counts {
                input,
                basis,
                shots,
                ones,
                p_one: ones as f64 / n as f64,
            }
        }
    }
}

/// Runs `c` on `input` under `nm`, measures the main qubit in `basis` and
/// samples `shots` outcomes with a generator seeded by `seed`.
pub fn simulate_counts(
    c: &Circuit,
    nm: &NoiseModel,
    input: InputState,
    basis: Basis,
    shots: Shots,
    seed: u64,
) -> Result<Counts> {
    if c.n_main() != 1 {
        return Err(Error::Unsupported(format!(
            "tomography of {} main qubits; only one is supported",
            c.n_main()
        )));
    }
    let map = NoisyCircuitChannel::new(c.clone(), *nm)?;
    Ok(sample_counts(&map, nm, input, basis, shots, seed))
}

fn setting_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Every (input, basis) setting of `config`.
pub fn measure_all(c: &Circuit, nm: &NoiseModel, config: &TomographyConfig) -> Result<Vec<Counts>> {
    config.validate()?;
    if c.n_main() != 1 {
        return Err(Error::Unsupported(format!(
            "tomography of {} main qubits; only one is supported",
            c.n_main()
        )));
    }
    let map = NoisyCircuitChannel::new(c.clone(), *nm)?;
    let mut out = Vec::new();
    for &input in &config.input_states {
        for &basis in &config.bases {
            let seed = setting_seed(config.seed, out.len());
            out.push(sample_counts(&map, nm, input, basis, config.shots, seed));
        }
    }
    Ok(out)
}

/// A reconstructed one-qubit channel.
#[derive(Clone, Debug)]
pub struct ReconstructedChannel {
    ptm: Matrix4<f64>,
    choi: ChoiMatrix,
}

impl ReconstructedChannel {
    /// Pauli transfer matrix `R_ij = Tr(σ_i E(σ_j)) / 2`.
    pub fn ptm(&self) -> &Matrix4<f64> {
        &self.ptm
    }

    pub fn choi(&self) -> &ChoiMatrix {
        &self.choi
    }

    /// Diagonal of the PTM, i.e. the multipliers when the map is Pauli.
    pub fn tau(&self) -> [f64; 4] {
        [
            self.ptm[(0, 0)],
            self.ptm[(1, 1)],
            self.ptm[(2, 2)],
            self.ptm[(3, 3)],
        ]
    }

    pub fn is_pauli_diagonal(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| i == j || self.ptm[(i, j)].abs() <= PAULI_DIAGONAL_TOL))
    }
}

impl LinearMap for ReconstructedChannel {
    fn n_qubits(&self) -> usize {
        1
    }

    fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        ptm_apply(&self.ptm, x)
    }

    fn pauli_probabilities(&self) -> Option<PauliProbVector> {
        if !self.is_pauli_diagonal() {
            return None;
        }
        let t = self.tau();
        TauVector::one_qubit(t[1], t[2], t[3])
            .ok()
            .and_then(|tau| tau_to_k(&tau).ok())
    }
}

fn ptm_apply(ptm: &Matrix4<f64>, x: &CMatrix) -> CMatrix {
    let coef = pauli_coefficients(x);
    let out: Vec<C64> = (0..4)
        .map(|i| (0..4).map(|j| coef[j] * ptm[(i, j)]).sum())
        .collect();
    operator_from_pauli_coefficients(&out)
}

fn ptm_of(map: &impl LinearMap) -> Matrix4<f64> {
    let mut r = Matrix4::zeros();
    for j in 0..4 {
        let mut e = vec![C64::new(0.0, 0.0); 4];
        e[j] = c(2.0, 0.0);
        let img = map.apply_operator(&operator_from_pauli_coefficients(&e));
        let coef = pauli_coefficients(&img);
        for i in 0..4 {
            r[(i, j)] = coef[i].re / 2.0;
        }
    }
    r
}

struct PtmMap(Matrix4<f64>);

impl LinearMap for PtmMap {
    fn n_qubits(&self) -> usize {
        1
    }
    fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        ptm_apply(&self.0, x)
    }
}

fn inverse_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = linalg::hermitian_eigen(m);
    let d = CVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| c(1.0 / l.max(1e-14).sqrt(), 0.0)),
    );
    &vecs * CMatrix::from_diagonal(&d) * vecs.adjoint()
}

/// Nearest-by-clipping CPTP map: negative Choi eigenvalues are set to zero,
/// the trace is renormalised, and trace preservation is restored by the
/// congruence `J ↦ (S ⊗ I) J (S ⊗ I)†` with `S = (d·Tr_out J)^{−1/2}`,
/// which keeps the Choi matrix positive.
pub fn project_cptp(j: &ChoiMatrix) -> ChoiMatrix {
    let m = linalg::hermitian_part(j.matrix());
    let dd = m.nrows();
    let d = (dd as f64).sqrt().round() as usize;
    let (vals, vecs) = linalg::hermitian_eigen(&m);
    let clipped = CVector::from_iterator(dd, vals.iter().map(|&l| c(l.max(0.0), 0.0)));
    let mut p = &vecs * CMatrix::from_diagonal(&clipped) * vecs.adjoint();
    let tr = linalg::trace(&p).re;
    if tr <= 1e-14 {
        p = CMatrix::identity(dd, dd).unscale(dd as f64);
    } else {
        p = p.unscale(tr);
    }
    let choi = ChoiMatrix::from_matrix(p.clone()).expect("square of a power of two");
    let t = choi.output_trace().scale(d as f64);
    let s = inverse_sqrt(&linalg::hermitian_part(&t));
    let big = linalg::kron(&s, &CMatrix::identity(d, d));
    let fixed = linalg::hermitian_part(&(&big * p * big.adjoint()));
    ChoiMatrix::from_matrix(fixed).expect("square of a power of two")
}

/// Linear-inversion PTM from counts covering an informationally complete
/// set of inputs in all three bases, followed by [`project_cptp`].
pub fn reconstruct_channel(counts: &[Counts]) -> Result<ReconstructedChannel> {
    let mut inputs: Vec<InputState> = Vec::new();
    for c in counts {
        if !inputs.contains(&c.input) {
            inputs.push(c.input);
        }
    }
    let m = inputs.len();
    let mut in_mat = DMatrix::<f64>::zeros(4, m);
    let mut out_mat = DMatrix::<f64>::zeros(4, m);
    for (col, &input) in inputs.iter().enumerate() {
        in_mat.set_column(col, &nalgebra::DVector::from_row_slice(&input.bloch()));
        out_mat[(0, col)] = 1.0;
        for b in Basis::ALL {
            let hits: Vec<&Counts> = counts
                .iter()
                .filter(|c| c.input == input && c.basis == b)
                .collect();
            if hits.is_empty() {
                return Err(Error::SingularInversion);
            }
            let e = hits.iter().map(|c| c.expectation()).sum::<f64>() / hits.len() as f64;
            out_mat[(b.pauli(), col)] = e;
        }
    }
    if in_mat.rank(1e-10) < 4 {
        return Err(Error::SingularInversion);
    }
    let pinv = in_mat
        .pseudo_inverse(1e-12)
        .map_err(|_| Error::SingularInversion)?;
    let raw = out_mat * pinv;
    let raw = Matrix4::from_fn(|i, j| raw[(i, j)]);
    let choi = project_cptp(&choi_matrix(&PtmMap(raw)));
    let ptm = ptm_of(&choi);
    Ok(ReconstructedChannel { ptm, choi })
}

/// Synthesises, runs and reconstructs the one-qubit channel `k`.
pub fn tomograph_channel(
    k: &PauliProbVector,
    nm: &NoiseModel,
    config: &TomographyConfig,
) -> Result<ReconstructedChannel> {
    let circuit = synthesize_channel_circuit(k, 1)?;
    reconstruct_channel(&measure_all(&circuit, nm, config)?)
}

/// `τ₃` cuts and the `(τ₁, τ₂)` lattice spacing of a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanGrid {
    pub tau3_slices: Vec<f64>,
    pub spacing: f64,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid {
            tau3_slices: vec![-0.9, -0.5, 0.0, 0.5, 0.9],
            spacing: 0.1,
        }
    }
}

impl ScanGrid {
    /// Lattice points of every slice inside `[−1, 1]³`, in slice-major,
    /// then `τ₁`, then `τ₂` order. Points may lie outside the tetrahedron.
    pub fn lattice(&self) -> Result<Vec<[f64; 3]>> {
        if !(self.spacing > 0.0 && self.spacing <= 2.0) {
            return Err(Error::InvalidConfig(format!(
                "grid spacing must lie in (0, 2], got {}",
                self.spacing
            )));
        }
        if let Some(t) = self.tau3_slices.iter().find(|t| !(-1.0..=1.0).contains(*t)) {
            return Err(Error::InvalidConfig(format!(
                "tau3 slice {t} outside [-1, 1]"
            )));
        }
        let steps = (2.0 / self.spacing + 1e-9).floor() as i64;
        let coord = |i: i64| {
            let v = -1.0 + i as f64 * self.spacing;
            // snap lattice values like 0.30000000000000004 to their decimal
            (v * 1e12).round() / 1e12
        };
        let mut pts = Vec::new();
        for &t3 in &self.tau3_slices {
            for i in 0..=steps {
                for j in 0..=steps {
                    pts.push([coord(i), coord(j), t3]);
                }
            }
        }
        Ok(pts)
    }

    /// The lattice points inside the tetrahedron.
    pub fn points(&self) -> Result<Vec<[f64; 3]>> {
        let all = self.lattice()?;
        let inside: Vec<[f64; 3]> = all
            .iter()
            .copied()
            .filter(|t| tetrahedron_contains_xyz(t[0], t[1], t[2]))
            .collect();
        log::debug!(
            "scan grid: {} of {} lattice points inside the tetrahedron",
            inside.len(),
            all.len()
        );
        Ok(inside)
    }
}

/// Everything a scan needs; the JSON form of the `scan` command's config.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanConfig {
    pub grid: ScanGrid,
    pub noise: NoiseModel,
    pub tomography: TomographyConfig,
    pub execution: Execution,
}

fn scan_point(
    tau: [f64; 3],
    nm: &NoiseModel,
    config: &TomographyConfig,
    seed: u64,
) -> Result<FidelityRecord> {
    let k = tau_to_k(&TauVector::one_qubit(tau[0], tau[1], tau[2])?)?;
    let cfg = TomographyConfig {
        seed,
        ..config.clone()
    };
    let est = tomograph_channel(&k, nm, &cfg)?;
    let f = diamond_fidelity(&est, &PauliChannel::new(k))?;
    Ok(FidelityRecord {
        tau1: tau[0],
        tau2: tau[1],
        tau3: tau[2],
        f,
        lambda_1q: nm.lambda_1q,
        lambda_2q: nm.lambda_2q,
        epsilon: nm.epsilon,
        shots: config.shots.count(),
        seed,
    })
}

/// Diamond fidelity between the reconstructed and the target channel at
/// every grid point inside the tetrahedron. Points outside are skipped
/// with a log message; point `i` samples with seed `config.seed ^ i`.
pub fn tetrahedron_scan(
    grid: &ScanGrid,
    nm: &NoiseModel,
    config: &TomographyConfig,
    exec: Execution,
) -> Result<Vec<FidelityRecord>> {
    config.validate()?;
    let lattice = grid.lattice()?;
    let mut pts = Vec::with_capacity(lattice.len());
    for t in lattice {
        if tetrahedron_contains_xyz(t[0], t[1], t[2]) {
            pts.push(t);
        } else {
            log::debug!(
                "skipping ({}, {}, {}): outside the tetrahedron",
                t[0],
                t[1],
                t[2]
            );
        }
    }
    log::info!("scanning {} channels", pts.len());
    map_indexed(exec, pts.len(), |i| {
        scan_point(pts[i], nm, config, config.seed ^ i as u64)
    })
    .into_iter()
    .collect()
}

/// [`tetrahedron_scan`] driven by a [`ScanConfig`].
pub fn run_scan(config: &ScanConfig) -> Result<Vec<FidelityRecord>> {
    tetrahedron_scan(
        &config.grid,
        &config.noise,
        &config.tomography,
        config.execution,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{is_completely_positive, is_trace_preserving, named_map, NamedMap};
    use crate::circuits::Gate;

    fn k(v: [f64; 4]) -> PauliProbVector {
        PauliProbVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identity_circuit_counts() {
        let circuit = Circuit::new(1);
        for shots in [Shots::Exact, Shots::Count(1), Shots::Count(1000)] {
            let cnt = simulate_counts(
                &circuit,
                &NoiseModel::ideal(),
                InputState::Zero,
                Basis::Z,
                shots,
                3,
            )
            .unwrap();
            assert_eq!(cnt.ones, 0);
            assert_eq!(cnt.p_one, 0.0);
        }
    }

    #[test]
    fn exact_counts_are_born_probabilities() {
        let mut circuit = Circuit::new(1);
        circuit.push(Gate::ry(0, 0.7)).unwrap();
        let cnt = simulate_counts(
            &circuit,
            &NoiseModel::ideal(),
            InputState::Zero,
            Basis::Z,
            Shots::Exact,
            0,
        )
        .unwrap();
        assert!((cnt.p_one - (0.35f64).sin().powi(2)).abs() < 1e-14);
        let cnt = simulate_counts(
            &circuit,
            &NoiseModel::ideal(),
            InputState::Zero,
            Basis::X,
            Shots::Exact,
            0,
        )
        .unwrap();
        assert!((cnt.expectation() - 0.7f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn sampled_bitflip_frequency() {
        let circuit =
            synthesize_channel_circuit(&named_map(NamedMap::BitFlip, 0.5).unwrap(), 1).unwrap();
        let cnt = simulate_counts(
            &circuit,
            &NoiseModel::ideal(),
            InputState::Zero,
            Basis::Z,
            Shots::Count(100_000),
            7,
        )
        .unwrap();
        assert!((cnt.p_one - 0.5).abs() < 0.01, "{}", cnt.p_one);
    }

    #[test]
    fn readout_flips_shift_probabilities() {
        let nm = NoiseModel::new(0.0, 0.0, 0.1).unwrap();
        let cnt = simulate_counts(
            &Circuit::new(1),
            &nm,
            InputState::Zero,
            Basis::Z,
            Shots::Exact,
            0,
        )
        .unwrap();
        assert!((cnt.p_one - 0.1).abs() < 1e-15);
    }

    #[test]
    fn noiseless_identity_ptm() {
        let r = tomograph_channel(
            &PauliProbVector::identity(1),
            &NoiseModel::ideal(),
            &TomographyConfig::default(),
        )
        .unwrap();
        assert!((r.ptm() - Matrix4::identity()).amax() < 1e-12);
    }

    #[test]
    fn noiseless_bitflip_tau() {
        let r = tomograph_channel(
            &k([0.7, 0.3, 0.0, 0.0]),
            &NoiseModel::ideal(),
            &TomographyConfig::default(),
        )
        .unwrap();
        let t = r.tau();
        for (got, want) in t.iter().zip([1.0, 1.0, 0.4, 0.4]) {
            assert!((got - want).abs() < 1e-10);
        }
        assert!(r.pauli_probabilities().is_some());
    }

    #[test]
    fn sampled_depolarizing_fidelity() {
        let target = named_map(NamedMap::Depolarizing, 0.5).unwrap();
        let cfg = TomographyConfig {
            shots: Shots::Count(4096),
            // 4096 shots put the fidelity near 0.97 at the median over seeds
            seed: 3,
            ..Default::default()
        };
        let r = tomograph_channel(&target, &NoiseModel::ideal(), &cfg).unwrap();
        let f = diamond_fidelity(&r, &PauliChannel::new(target)).unwrap();
        assert!(f >= 0.97, "f = {f}");
    }

    #[test]
    fn projection_is_cptp() {
        // a non-CP, non-TP PTM
        let raw = Matrix4::new(
            1.0, 0.0, 0.0, 0.0, 0.1, 1.2, 0.0, 0.0, 0.0, 0.0, 1.1, 0.3, -0.2, 0.0, 0.0, 0.9,
        );
        let choi = project_cptp(&choi_matrix(&PtmMap(raw)));
        assert!(is_completely_positive(&choi));
        assert!(is_trace_preserving(&choi));
    }

    #[test]
    fn incomplete_inputs_are_rejected() {
        let cfg = TomographyConfig {
            input_states: vec![InputState::Zero, InputState::One, InputState::Plus],
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::SingularInversion)));
        let circuit = Circuit::new(1);
        let counts: Vec<Counts> = [InputState::Zero, InputState::One]
            .into_iter()
            .flat_map(|i| {
                Basis::ALL.map(|b| {
                    simulate_counts(&circuit, &NoiseModel::ideal(), i, b, Shots::Exact, 0).unwrap()
                })
            })
            .collect();
        assert!(matches!(
            reconstruct_channel(&counts),
            Err(Error::SingularInversion)
        ));
    }

    #[test]
    fn shots_json() {
        assert_eq!(serde_json::to_string(&Shots::Exact).unwrap(), "\"exact\"");
        assert_eq!(
            serde_json::from_str::<Shots>("4096").unwrap(),
            Shots::Count(4096)
        );
        assert!(serde_json::from_str::<Shots>("0").is_err());
        let cfg: ScanConfig =
            serde_json::from_str(r#"{"noise": {"lambda_2q": 0.02}, "tomography": {"shots": 100}}"#)
                .unwrap();
        assert_eq!(cfg.grid, ScanGrid::default());
        assert_eq!(cfg.tomography.shots, Shots::Count(100));
    }

    #[test]
    fn default_grid_shape() {
        let g = ScanGrid::default();
        assert_eq!(g.lattice().unwrap().len(), 5 * 21 * 21);
        let pts = g.points().unwrap();
        assert!(pts.contains(&[0.0, 0.0, 0.0]));
        assert!(pts.contains(&[0.3, -0.2, 0.5]));
        assert!(pts
            .iter()
            .all(|t| tetrahedron_contains_xyz(t[0], t[1], t[2])));
    }

    #[test]
    fn perfect_device_scan() {
        let grid = ScanGrid {
            tau3_slices: vec![0.0, 0.5],
            spacing: 0.5,
        };
        let recs = tetrahedron_scan(
            &grid,
            &NoiseModel::ideal(),
            &TomographyConfig::default(),
            Execution::Parallel,
        )
        .unwrap();
        assert!(!recs.is_empty());
        assert!(recs.iter().all(|r| (r.f - 1.0).abs() < 1e-8));
    }

    #[test]
    fn noisy_channels_keep_pauli_form() {
        let nm = NoiseModel::new(0.01, 0.05, 0.02).unwrap();
        let target = k([0.4, 0.3, 0.2, 0.1]);
        let r = tomograph_channel(&target, &nm, &TomographyConfig::default()).unwrap();
        assert!(
            r.pauli_probabilities().is_some(),
            "gate-local depolarizing keeps the Pauli form"
        );
        let f = diamond_fidelity(&r, &PauliChannel::new(target)).unwrap();
        assert!(f < 1.0 - 1e-3 && f > 0.8, "f = {f}");
    }
}
