// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Gate and circuit intermediate representation.

use std::fmt;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, I, ONE, ZERO};

pub type Mat2 = Matrix2<C64>;

/// Single-qubit operation applied to the target of a [`Gate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    X,
    Y,
    Z,
    H,
}

impl GateKind {
    pub const ALL: [GateKind; 7] = [
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
        }
    }

    pub fn from_name(s: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }

    pub fn is_pauli(self) -> bool {
        matches!(self, GateKind::X | GateKind::Y | GateKind::Z)
    }
}

/// `R_x(θ) = exp(-iθX/2)`, and similarly for `y`, `z`.
pub fn rotation_matrix(kind: GateKind, theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let (c, s) = (C64::new(c, 0.0), C64::new(s, 0.0));
    match kind {
        GateKind::Rx => Mat2::new(c, -I * s, -I * s, c),
        GateKind::Ry => Mat2::new(c, -s, s, c),
        GateKind::Rz => Mat2::new(
            C64::from_polar(1.0, -theta / 2.0),
            ZERO,
            ZERO,
            C64::from_polar(1.0, theta / 2.0),
        ),
        _ => panic!("{} is not a rotation", kind.name()),
    }
}

/// A control qubit together with the basis value that activates the gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    pub value: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Control { qubit, value: true }
    }

    pub fn off(qubit: usize) -> Self {
        Control {
            qubit,
            value: false,
        }
    }
}

/// A single-qubit operation on `target`, conditioned on every control
/// qubit holding its control value.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    /// Rotation angle in radians; zero for non-rotation kinds.
    pub angle: f64,
    pub target: usize,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, angle: f64, target: usize) -> Self {
        Gate {
            kind,
            angle: if kind.is_rotation() { angle } else { 0.0 },
            target,
            controls: Vec::new(),
        }
    }

    pub fn rx(target: usize, theta: f64) -> Self {
        Gate::new(GateKind::Rx, theta, target)
    }
    pub fn ry(target: usize, theta: f64) -> Self {
        Gate::new(GateKind::Ry, theta, target)
    }
    pub fn rz(target: usize, theta: f64) -> Self {
        Gate::new(GateKind::Rz, theta, target)
    }
    pub fn x(target: usize) -> Self {
        Gate::new(GateKind::X, 0.0, target)
    }
    pub fn y(target: usize) -> Self {
        Gate::new(GateKind::Y, 0.0, target)
    }
    pub fn z(target: usize) -> Self {
        Gate::new(GateKind::Z, 0.0, target)
    }
    pub fn h(target: usize) -> Self {
        Gate::new(GateKind::H, 0.0, target)
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Gate::x(target).controlled_by(Control::on(control))
    }
    pub fn cy(control: usize, target: usize) -> Self {
        Gate::y(target).controlled_by(Control::on(control))
    }
    pub fn cz(control: usize, target: usize) -> Self {
        Gate::z(target).controlled_by(Control::on(control))
    }

    pub fn controlled_by(mut self, control: Control) -> Self {
        self.controls.push(control);
        self
    }

    pub fn with_controls(mut self, controls: impl IntoIterator<Item = Control>) -> Self {
        self.controls.extend(controls);
        self
    }

    /// The 2×2 matrix applied to the target when the controls fire.
    pub fn base_matrix(&self) -> Mat2 {
        match self.kind {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => rotation_matrix(self.kind, self.angle),
            GateKind::X => Mat2::new(ZERO, ONE, ONE, ZERO),
            GateKind::Y => Mat2::new(ZERO, -I, I, ZERO),
            GateKind::Z => Mat2::new(ONE, ZERO, ZERO, -ONE),
            GateKind::H => {
                let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                Mat2::new(h, h, h, -h)
            }
        }
    }

    pub fn inverse(&self) -> Gate {
        let mut g = self.clone();
        if g.kind.is_rotation() {
            g.angle = -g.angle;
        }
        g
    }

    /// Target first, then controls in declaration order.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.target).chain(self.controls.iter().map(|c| c.qubit))
    }

    pub fn n_touched(&self) -> usize {
        1 + self.controls.len()
    }

    /// True for gates QASM's standard library names directly.
    pub fn is_elementary(&self) -> bool {
        match self.controls.as_slice() {
            [] => true,
            [c] => c.value && self.kind.is_pauli(),
            _ => false,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if !self.angle.is_finite() {
            return Err(Error::InvalidGate(format!(
                "non-finite angle {}",
                self.angle
            )));
        }
        let mut seen = Vec::with_capacity(self.n_touched());
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(Error::InvalidGate(format!(
                    "qubit {q} out of range for {n_qubits} qubits"
                )));
            }
            if seen.contains(&q) {
                return Err(Error::InvalidGate(format!("qubit {q} used twice")));
            }
            seen.push(q);
        }
        Ok(())
    }

    /// Kind string used in JSON: `ry`, `cx`, `mcrz`, …
    pub fn kind_label(&self) -> String {
        match self.controls.as_slice() {
            [] => self.kind.name().to_string(),
            [c] if c.value && self.kind.is_pauli() => format!("c{}", self.kind.name()),
            _ => format!("mc{}", self.kind.name()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind_label())?;
        if self.kind.is_rotation() {
            write!(f, "({})", self.angle)?;
        }
        write!(f, " q{}", self.target)?;
        for c in &self.controls {
            write!(f, " {}q{}", if c.value { "" } else { "!" }, c.qubit)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    targets: Vec<usize>,
    #[serde(default)]
    controls: Vec<(usize, u8)>,
}

impl Serialize for Gate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GateJson {
            kind: self.kind_label(),
            angle: self.kind.is_rotation().then_some(self.angle),
            targets: vec![self.target],
            controls: self
                .controls
                .iter()
                .map(|c| (c.qubit, c.value as u8))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Gate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GateJson::deserialize(d)?;
        gate_from_json(j).map_err(serde::de::Error::custom)
    }
}

fn gate_from_json(j: GateJson) -> Result<Gate> {
    let label = j.kind.to_ascii_lowercase();
    let (prefix, base) = if let Some(b) = label.strip_prefix("mc") {
        ("mc", b)
    } else if let Some(b) = label
        .strip_prefix('c')
        .filter(|b| GateKind::from_name(b).is_some())
    {
        ("c", b)
    } else {
        ("", label.as_str())
    };
    let kind = GateKind::from_name(base)
        .ok_or_else(|| Error::InvalidGate(format!("unknown gate kind {:?}", j.kind)))?;
    let controls = j
        .controls
        .iter()
        .map(|&(q, v)| match v {
            0 => Ok(Control::off(q)),
            1 => Ok(Control::on(q)),
            _ => Err(Error::InvalidGate(format!(
                "control value {v} is not 0 or 1"
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    let ok = match prefix {
        "" => controls.is_empty(),
        "c" => controls.len() == 1,
        _ => !controls.is_empty(),
    };
    if !ok {
        return Err(Error::InvalidGate(format!(
            "kind {:?} does not match {} control(s)",
            j.kind,
            controls.len()
        )));
    }
    let [target] = j.targets[..] else {
        return Err(Error::InvalidGate("exactly one target expected".into()));
    };
    let angle = match (kind.is_rotation(), j.angle) {
        (true, Some(a)) => a,
        (true, None) => return Err(Error::InvalidGate(format!("{} needs an angle", j.kind))),
        (false, _) => 0.0,
    };
    Ok(Gate::new(kind, angle, target).with_controls(controls))
}
