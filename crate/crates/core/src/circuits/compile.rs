// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Lowering of arbitrary controlled gates to rotations plus `cx`/`cy`/`cz`.
//!
//! The lowered circuit equals the original up to a global phase.

use super::{Circuit, Control, Gate, GateKind, Mat2};
use crate::linalg::C64;

const EPS: f64 = 1e-14;

/// `(α, β, γ, δ)` with `U = e^{iα} R_z(β) R_y(γ) R_z(δ)`.
pub fn zyz_angles(u: &Mat2) -> (f64, f64, f64, f64) {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let alpha = det.arg() / 2.0;
    let v = u * C64::from_polar(1.0, -alpha);
    let (c, s) = (v[(1, 1)].norm(), v[(1, 0)].norm());
    let gamma = 2.0 * s.atan2(c);
    let sum = if c > EPS { 2.0 * v[(1, 1)].arg() } else { 0.0 };
    let diff = if s > EPS { 2.0 * v[(1, 0)].arg() } else { 0.0 };
    (alpha, (sum + diff) / 2.0, gamma, (sum - diff) / 2.0)
}

/// Principal-branch square root of a 2×2 unitary, `V² = M`.
pub fn sqrt_unitary(m: &Mat2) -> Mat2 {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let tr = m[(0, 0)] + m[(1, 1)];
    let r = det.sqrt();
    let s = if (tr + r * 2.0).norm() >= (tr - r * 2.0).norm() {
        r
    } else {
        -r
    };
    let denom = (tr + s * 2.0).sqrt();
    (m + Mat2::identity() * s) / denom
}

fn close(a: &Mat2, b: &Mat2) -> bool {
    (a - b).norm() < 1e-13
}

fn pauli_kind(u: &Mat2) -> Option<GateKind> {
    [GateKind::X, GateKind::Y, GateKind::Z]
        .into_iter()
        .find(|k| close(u, &Gate::new(*k, 0.0, 0).base_matrix()))
}

fn push_rot(out: &mut Vec<Gate>, kind: GateKind, target: usize, angle: f64) {
    if angle.abs() > EPS {
        out.push(Gate::new(kind, angle, target));
    }
}

/// Gates for `U` on `target` controlled (value 1) by every qubit in
/// `controls`, up to global phase.
pub fn mc_unitary_gates(u: &Mat2, controls: &[usize], target: usize) -> Vec<Gate> {
    let mut out = Vec::new();
    match controls {
        [] => {
            let (_, beta, gamma, delta) = zyz_angles(u);
            push_rot(&mut out, GateKind::Rz, target, delta);
            push_rot(&mut out, GateKind::Ry, target, gamma);
            push_rot(&mut out, GateKind::Rz, target, beta);
        }
        [c] => {
            if let Some(k) = pauli_kind(u) {
                out.push(Gate::new(k, 0.0, target).controlled_by(Control::on(*c)));
                return out;
            }
            if close(u, &Mat2::identity()) {
                return out;
            }
            let (alpha, beta, gamma, delta) = zyz_angles(u);
            // C, CX, B, CX, A with ABC = I and AXBXC = e^{-iα}U
            push_rot(&mut out, GateKind::Rz, target, (delta - beta) / 2.0);
            out.push(Gate::cx(*c, target));
            push_rot(&mut out, GateKind::Rz, target, -(delta + beta) / 2.0);
            push_rot(&mut out, GateKind::Ry, target, -gamma / 2.0);
            out.push(Gate::cx(*c, target));
            push_rot(&mut out, GateKind::Ry, target, gamma / 2.0);
            push_rot(&mut out, GateKind::Rz, target, beta);
            // diag(1, e^{iα}) on the control, up to global phase
            push_rot(&mut out, GateKind::Rz, *c, alpha);
        }
        [rest @ .., last] => {
            let v = sqrt_unitary(u);
            let x = Gate::x(0).base_matrix();
            out.extend(mc_unitary_gates(&v, &[*last], target));
            out.extend(mc_unitary_gates(&x, rest, *last));
            out.extend(mc_unitary_gates(&v.adjoint(), &[*last], target));
            out.extend(mc_unitary_gates(&x, rest, *last));
            out.extend(mc_unitary_gates(&v, rest, target));
        }
    }
    out
}

/// Rewrites every gate that is not an uncontrolled gate or a singly,
/// positively controlled Pauli.
pub fn decompose_to_elementary(c: &Circuit) -> Circuit {
    let mut out = c.clone();
    let gates: Vec<Gate> = c
        .gates()
        .iter()
        .flat_map(|g| {
            if g.is_elementary() {
                return vec![g.clone()];
            }
            let flips: Vec<Gate> = g
                .controls
                .iter()
                .filter(|c| !c.value)
                .map(|c| Gate::x(c.qubit))
                .collect();
            let ctrls: Vec<usize> = g.controls.iter().map(|c| c.qubit).collect();
            let mut v = flips.clone();
            v.extend(mc_unitary_gates(&g.base_matrix(), &ctrls, g.target));
            v.extend(flips);
            v
        })
        .collect();
    out.clear_gates();
    out.extend(gates).expect("indices unchanged");
    out
}

impl Circuit {
    pub(crate) fn clear_gates(&mut self) {
        self.gates.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{circuit_unitary, rotation_matrix};
    use crate::linalg::{max_abs_diff_up_to_phase, CMatrix};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn haar2(seed: u64) -> Mat2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = crate::linalg::haar_unitary(2, &mut rng);
        Mat2::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)])
    }

    #[test]
    fn zyz_reconstructs() {
        for seed in 0..20 {
            let u = haar2(seed);
            let (a, b, g, d) = zyz_angles(&u);
            let r = rotation_matrix(GateKind::Rz, b)
                * rotation_matrix(GateKind::Ry, g)
                * rotation_matrix(GateKind::Rz, d)
                * C64::from_polar(1.0, a);
            assert!((r - u).norm() < 1e-12, "seed {seed}");
        }
        for k in [GateKind::X, GateKind::Y, GateKind::Z, GateKind::H] {
            let u = Gate::new(k, 0.0, 0).base_matrix();
            let (a, b, g, d) = zyz_angles(&u);
            let r = rotation_matrix(GateKind::Rz, b)
                * rotation_matrix(GateKind::Ry, g)
                * rotation_matrix(GateKind::Rz, d)
                * C64::from_polar(1.0, a);
            assert!((r - u).norm() < 1e-12, "{k:?}");
        }
    }

    #[test]
    fn sqrt_squares_back() {
        for seed in 0..20 {
            let u = haar2(seed);
            let v = sqrt_unitary(&u);
            assert!((v * v - u).norm() < 1e-12);
            assert!((v * v.adjoint() - Mat2::identity()).norm() < 1e-12);
        }
        let x = Gate::x(0).base_matrix();
        let v = sqrt_unitary(&x);
        assert!((v * v - x).norm() < 1e-12);
    }

    fn check(gate: Gate, n: usize) {
        let mut c = Circuit::new(n);
        c.push(gate.clone()).unwrap();
        let lowered = decompose_to_elementary(&c);
        assert!(lowered.gates().iter().all(Gate::is_elementary));
        let a: CMatrix = circuit_unitary(&c).unwrap();
        let b = circuit_unitary(&lowered).unwrap();
        assert!(max_abs_diff_up_to_phase(&a, &b) < 1e-10, "{gate}");
    }

    #[test]
    fn lowering_examples() {
        check(Gate::ry(1, 0.3).controlled_by(Control::on(0)), 2);
        check(Gate::h(0).controlled_by(Control::off(1)), 2);
        check(
            Gate::x(2).with_controls([Control::on(0), Control::on(1)]),
            3,
        );
        check(
            Gate::rz(3, 1.1).with_controls([Control::on(0), Control::off(1), Control::on(2)]),
            4,
        );
        check(
            Gate::z(0).with_controls([Control::on(1), Control::on(2), Control::on(3)]),
            4,
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn lowering_preserves_unitary(
            k in 0..7usize,
            angle in -4.0..4.0f64,
            vals in proptest::collection::vec(any::<bool>(), 0..4),
        ) {
            let n = vals.len() + 1;
            let g = Gate::new(GateKind::ALL[k], angle, n - 1).with_controls(
                vals.iter().enumerate().map(|(q, &v)| Control { qubit: q, value: v }),
            );
            check(g, n);
        }
    }
}
