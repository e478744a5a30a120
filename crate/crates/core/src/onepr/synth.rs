// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Circuits `A · R(s) · B` realising a 1PR decomposition.
//!
//! `B` loads `|a|, |b|, |c|` into the three highest basis states, `R(s)` is
//! `R_z(2s)` on the last qubit controlled by all others, and `A` rotates
//! those basis states onto `a`, `b`, `c`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::OneprDecomposition;
use crate::circuits::{
    circuit_unitary, prepare_real_amplitudes, simulate_unitary, zyz_angles, Circuit, Control, Gate,
    GateKind, Mat2,
};
use crate::error::{Error, Result};
use crate::linalg::{complete_to_unitary, determinant, CMatrix, CVector, C64, ONE};

const NEGLIGIBLE: f64 = 1e-14;

/// A synthesised 1PR circuit. The matrices are authoritative; the gate
/// lists compile them exactly.
#[derive(Clone, Debug)]
pub struct OneprCircuit {
    n_qubits: usize,
    a_matrix: CMatrix,
    b_matrix: CMatrix,
    prep: Circuit,
    post: Circuit,
    decomposition: OneprDecomposition,
}

impl OneprCircuit {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn a_matrix(&self) -> &CMatrix {
        &self.a_matrix
    }

    pub fn b_matrix(&self) -> &CMatrix {
        &self.b_matrix
    }

    /// Gates of `B`, applied first.
    pub fn prep_gates(&self) -> &Circuit {
        &self.prep
    }

    /// Gates of `A`, applied last.
    pub fn post_gates(&self) -> &Circuit {
        &self.post
    }

    pub fn decomposition(&self) -> &OneprDecomposition {
        &self.decomposition
    }

    /// The only parameter-dependent gate.
    pub fn rotation(&self, s: f64) -> Gate {
        let last = self.n_qubits - 1;
        Gate::rz(last, 2.0 * s).with_controls((0..last).map(Control::on))
    }

    /// The full gate list at phase `s`.
    pub fn circuit_at_s(&self, s: f64) -> Circuit {
        let mut c = self.prep.clone();
        c.push(self.rotation(s)).expect("target inside register");
        c.extend(self.post.gates().iter().cloned())
            .expect("gates of the same register");
        c
    }

    pub fn circuit_at(&self, p: f64) -> Result<Circuit> {
        Ok(self.circuit_at_s(self.decomposition.s_at(p)?))
    }

    /// `A R(s) B |0⟩` from the matrices.
    pub fn output_state_at_s(&self, s: f64) -> CVector {
        let mut v = self.b_matrix.column(0).into_owned();
        let (lo, hi) = (v.len() - 2, v.len() - 1);
        v[lo] *= C64::from_polar(1.0, -s);
        v[hi] *= C64::from_polar(1.0, s);
        &self.a_matrix * v
    }

    pub fn output_state(&self, p: f64) -> Result<CVector> {
        Ok(self.output_state_at_s(self.decomposition.s_at(p)?))
    }

    /// `|0⟩` pushed through the compiled gates. Exact for `m ≥ 2`, where
    /// `A` has a free column to absorb its determinant; up to a global
    /// phase otherwise.
    pub fn simulate(&self, p: f64) -> Result<CVector> {
        let c = self.circuit_at(p)?;
        let mut zero = CVector::zeros(1 << self.n_qubits);
        zero[0] = ONE;
        simulate_unitary(&c, &zero)
    }
}

/// Builds the circuit on `m` qubits. Components are padded with zeros
/// when `2^m` exceeds their dimension. `m = 1` only fits decompositions
/// with `c = 0`.
pub fn synthesize_onepr_circuit(
    d: &OneprDecomposition,
    m: usize,
    seed: u64,
) -> Result<OneprCircuit> {
    let dim = 1usize << m;
    if m == 0 || dim < d.dim() {
        return Err(Error::DimensionMismatch {
            what: "register",
            expected: d.dim(),
            got: dim,
        });
    }
    let pad = |v: &CVector| {
        let mut out = CVector::zeros(dim);
        out.rows_mut(0, v.len()).copy_from(v);
        out
    };
    let (a, b, c) = (pad(&d.a), pad(&d.b), pad(&d.c));
    let [na, nb, nc] = [a.norm(), b.norm(), c.norm()];
    if m == 1 && nc > NEGLIGIBLE {
        return Err(Error::InvalidDecomposition(
            "a one-qubit register has no slot for c".into(),
        ));
    }

    let mut weights = vec![0.0; dim];
    weights[dim - 1] = na * na;
    weights[dim - 2] = nb * nb;
    if m > 1 {
        weights[dim - 3] = nc * nc;
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let prep = prepare_real_amplitudes(&weights, m);
    let b_matrix = circuit_unitary(&prep)?;

    let mut fixed = Vec::new();
    for (slot, v, n) in [(dim - 1, &a, na), (dim - 2, &b, nb)] {
        if n > NEGLIGIBLE {
            fixed.push((slot, v.unscale(n)));
        }
    }
    if m > 1 && nc > NEGLIGIBLE {
        fixed.push((dim - 3, c.unscale(nc)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a_matrix = complete_to_unitary(dim, &fixed, &mut rng);
    if let Some(free) = (0..dim).find(|j| fixed.iter().all(|(k, _)| k != j)) {
        let det = determinant(&a_matrix);
        let fix = (det / det.norm()).conj();
        for i in 0..dim {
            a_matrix[(i, free)] *= fix;
        }
    }
    let post = compile_unitary(&a_matrix)?;
    Ok(OneprCircuit {
        n_qubits: m,
        a_matrix,
        b_matrix,
        prep,
        post,
        decomposition: d.clone(),
    })
}

fn gray(t: usize) -> usize {
    t ^ (t >> 1)
}

/// A two-level unitary on basis states `lo` and `hi` that differ in one bit.
struct TwoLevel {
    lo: usize,
    hi: usize,
    m: Mat2,
}

impl TwoLevel {
    /// Gates applying `m` in the `(|lo⟩, |hi⟩)` basis: one multi-controlled
    /// `z·y·z` sequence on the differing qubit.
    fn gates(&self, n: usize) -> Vec<Gate> {
        let diff = self.lo ^ self.hi;
        let bit = diff.trailing_zeros() as usize;
        let target = n - 1 - bit;
        // basis order on the target is (bit 0, bit 1)
        let m = if self.lo & diff == 0 {
            self.m
        } else {
            Mat2::new(
                self.m[(1, 1)],
                self.m[(1, 0)],
                self.m[(0, 1)],
                self.m[(0, 0)],
            )
        };
        let controls: Vec<Control> = (0..n)
            .filter(|&q| q != target)
            .map(|q| Control {
                qubit: q,
                value: (self.lo >> (n - 1 - q)) & 1 == 1,
            })
            .collect();
        let (_, beta, gamma, delta) = zyz_angles(&m);
        [
            (GateKind::Rz, delta),
            (GateKind::Ry, gamma),
            (GateKind::Rz, beta),
        ]
        .into_iter()
        .filter(|(_, angle)| angle.abs() > NEGLIGIBLE)
        .map(|(kind, angle)| Gate::new(kind, angle, target).with_controls(controls.clone()))
        .collect()
    }
}

/// Compilation of an `n`-qubit unitary (exact up to global phase) into
/// multi-controlled `RZ`/`RY` gates via two-level rotations between
/// Gray-code neighbours.
pub fn compile_unitary(u: &CMatrix) -> Result<Circuit> {
    let dim = u.nrows();
    if dim != u.ncols() || !dim.is_power_of_two() || dim < 2 {
        return Err(Error::DimensionMismatch {
            what: "unitary",
            expected: dim.next_power_of_two().max(2),
            got: u.ncols(),
        });
    }
    let n = dim.trailing_zeros() as usize;
    // w is u with rows and columns both listed in Gray order
    let mut w = CMatrix::from_fn(dim, dim, |t, j| u[(gray(t), gray(j))]);
    let mut ops: Vec<TwoLevel> = Vec::new();
    let mut apply = |w: &mut CMatrix, t: usize, g: Mat2| {
        for j in 0..dim {
            let (x, y) = (w[(t - 1, j)], w[(t, j)]);
            w[(t - 1, j)] = g[(0, 0)] * x + g[(0, 1)] * y;
            w[(t, j)] = g[(1, 0)] * x + g[(1, 1)] * y;
        }
        ops.push(TwoLevel {
            lo: gray(t - 1),
            hi: gray(t),
            m: g,
        });
    };
    for j in 0..dim - 1 {
        for t in (j + 1..dim).rev() {
            let (x, y) = (w[(t - 1, j)], w[(t, j)]);
            if y.norm() < NEGLIGIBLE {
                continue;
            }
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let g = Mat2::new(x.conj(), y.conj(), -y, x) / C64::new(r, 0.0);
            apply(&mut w, t, g);
        }
    }
    // spread the leftover diagonal into a global phase ω with ω^dim = det
    let omega = (0..dim).map(|t| w[(t, t)].arg()).sum::<f64>() / dim as f64;
    for t in (1..dim).rev() {
        let ph = w[(t, t)].arg() - omega;
        if ph.abs() > NEGLIGIBLE {
            let g = Mat2::new(
                C64::from_polar(1.0, ph),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::from_polar(1.0, -ph),
            );
            apply(&mut w, t, g);
        }
    }
    // G_K ⋯ G_1 U = phase · I, so U ∝ G_1† ⋯ G_K† and G_K† acts first
    let mut c = Circuit::new(n);
    for op in ops.iter().rev() {
        let inv = TwoLevel {
            lo: op.lo,
            hi: op.hi,
            m: op.m.adjoint(),
        };
        c.extend(inv.gates(n))?;
    }
    Ok(c)
}

/// Splits sampled states `ψ(s_i)` of the form `e^{is}a + e^{−is}b + c`:
/// solves from the first three samples and returns `(a, b, c)` with the
/// largest mismatch on the remaining ones.
pub fn forward_decomposition(
    samples: &[(f64, CVector)],
) -> Result<(CVector, CVector, CVector, f64)> {
    if samples.len() < 3 {
        return Err(Error::InvalidCurve("need at least three samples".into()));
    }
    let phi = CMatrix::from_fn(3, 3, |i, j| {
        let z = C64::from_polar(1.0, samples[i].0);
        [z, z.conj(), ONE][j]
    });
    let lu = phi.lu();
    let rhs = CMatrix::from_fn(3, samples[0].1.len(), |i, d| samples[i].1[d]);
    let coef = lu
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidCurve("sample phases must be distinct modulo 2π".into()))?;
    let row = |r: usize| coef.row(r).transpose();
    let (a, b, c) = (row(0), row(1), row(2));
    let residual = samples[3..]
        .iter()
        .map(|(s, psi)| {
            let z = C64::from_polar(1.0, *s);
            (&a * z + &b * z.conj() + &c - psi).norm()
        })
        .fold(0.0, f64::max);
    Ok((a, b, c, residual))
}
