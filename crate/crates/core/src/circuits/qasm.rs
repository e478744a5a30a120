// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! OpenQASM 2.0 export and a parser for the emitted subset.

use std::fmt::Write;

use super::{decompose_to_elementary, Circuit, Control, Gate, GateKind};
use crate::error::{Error, Result};

/// Fixed-point rendering with 17 significant digits.
pub fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let decimals = (16 - x.abs().log10().floor() as i64).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Lowers non-elementary gates, then prints one instruction per gate.
pub fn export_qasm(c: &Circuit) -> String {
    let lowered = decompose_to_elementary(c);
    let mut s = String::new();
    s.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(s, "qreg q[{}];", c.n_qubits()).unwrap();
    for g in lowered.gates() {
        let name = g.kind_label();
        if g.kind.is_rotation() {
            write!(s, "{name}({})", format_angle(g.angle)).unwrap();
        } else {
            s.push_str(&name);
        }
        match g.controls.first() {
            Some(ctrl) => writeln!(s, " q[{}],q[{}];", ctrl.qubit, g.target).unwrap(),
            None => writeln!(s, " q[{}];", g.target).unwrap(),
        }
    }
    s
}

fn parse_qubit(tok: &str, line: usize) -> Result<usize> {
    let err = || Error::QasmParse {
        line,
        msg: format!("bad qubit reference {tok:?}"),
    };
    let inner = tok
        .trim()
        .strip_prefix("q[")
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(err)?;
    inner.trim().parse().map_err(|_| err())
}

/// Parses the subset [`export_qasm`] emits (a single register named `q`).
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stmt = raw.split("//").next().unwrap_or("").trim();
        if stmt.is_empty() {
            continue;
        }
        let err = |msg: String| Error::QasmParse { line, msg };
        let stmt = stmt
            .strip_suffix(';')
            .ok_or_else(|| err("missing ';'".into()))?
            .trim();
        if stmt == "OPENQASM 2.0" {
            saw_header = true;
            continue;
        }
        if stmt.starts_with("include") {
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("qreg") {
            if circuit.is_some() {
                return Err(err("only one register is supported".into()));
            }
            let n = parse_qubit(rest, line)?;
            circuit = Some(Circuit::new(n));
            continue;
        }
        let c = circuit
            .as_mut()
            .ok_or_else(|| err("gate before qreg declaration".into()))?;
        let (head, args) = stmt
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(format!("cannot parse {stmt:?}")))?;
        let (name, angle) = match head.split_once('(') {
            Some((n, a)) => {
                let a = a
                    .strip_suffix(')')
                    .ok_or_else(|| err("unclosed parameter list".into()))?;
                let v: f64 = a
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad angle {a:?}")))?;
                (n, Some(v))
            }
            None => (head, None),
        };
        let qubits = args
            .split(',')
            .map(|t| parse_qubit(t, line))
            .collect::<Result<Vec<_>>>()?;
        let (controlled, base) = match GateKind::from_name(name) {
            Some(k) => (false, k),
            None => match name.strip_prefix('c').and_then(GateKind::from_name) {
                Some(k) if k.is_pauli() => (true, k),
                _ => return Err(err(format!("unsupported gate {name:?}"))),
            },
        };
        if base.is_rotation() != angle.is_some() {
            return Err(err(format!("wrong parameter count for {name}")));
        }
        let gate = match (controlled, qubits.as_slice()) {
            (false, [t]) => Gate::new(base, angle.unwrap_or(0.0), *t),
            (true, [ctrl, t]) => Gate::new(base, 0.0, *t).controlled_by(Control::on(*ctrl)),
            _ => return Err(err(format!("wrong number of qubits for {name}"))),
        };
        c.push(gate).map_err(|e| err(e.to_string()))?;
    }
    if !saw_header {
        return Err(Error::QasmParse {
            line: 1,
            msg: "missing OPENQASM 2.0 header".into(),
        });
    }
    circuit.ok_or(Error::QasmParse {
        line: text.lines().count(),
        msg: "no qreg declaration".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::circuit_unitary;
    use crate::linalg::{max_abs_diff, max_abs_diff_up_to_phase};
    use std::f64::consts::PI;

    #[test]
    fn header_and_syntax() {
        let mut c = Circuit::new(3);
        c.extend([Gate::x(0), Gate::ry(1, PI / 2.0), Gate::cx(2, 0)])
            .unwrap();
        let q = export_qasm(&c);
        assert!(q.starts_with("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\n"));
        assert!(q.contains("\nx q[0];\n"));
        assert!(q.contains("\nry(1.5707963267948966) q[1];\n"));
        assert!(q.contains("\ncx q[2],q[0];\n"));
    }

    #[test]
    fn angle_digits() {
        assert_eq!(format_angle(PI / 2.0), "1.5707963267948966");
        assert_eq!(format_angle(-PI), "-3.1415926535897931");
        assert_eq!(format_angle(0.0), "0");
        assert_eq!(format_angle(0.001), "0.0010000000000000000");
        assert_eq!(format_angle(123.0), "123.00000000000000");
        for x in [PI / 2.0, -0.3, 1e-7, 12.345678901234567] {
            assert_eq!(format_angle(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn roundtrip_elementary() {
        let mut c = Circuit::new(2);
        c.extend([
            Gate::h(0),
            Gate::rz(1, -0.25),
            Gate::cy(0, 1),
            Gate::cz(1, 0),
        ])
        .unwrap();
        let back = parse_qasm(&export_qasm(&c)).unwrap();
        assert_eq!(back.gates(), c.gates());
        let a = circuit_unitary(&c).unwrap();
        let b = circuit_unitary(&back).unwrap();
        assert!(max_abs_diff(&a, &b) < 1e-15);
    }

    #[test]
    fn roundtrip_lowered() {
        let mut c = Circuit::new(3);
        c.push(Gate::ry(2, 0.4).with_controls([Control::on(0), Control::off(1)]))
            .unwrap();
        let back = parse_qasm(&export_qasm(&c)).unwrap();
        let a = circuit_unitary(&c).unwrap();
        let b = circuit_unitary(&back).unwrap();
        assert!(max_abs_diff_up_to_phase(&a, &b) < 1e-10);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_qasm("qreg q[1];\nx q[0];\n").is_err());
        assert!(parse_qasm("OPENQASM 2.0;\nx q[0];\n").is_err());
        let bad_gate = "OPENQASM 2.0;\nqreg q[2];\nswap q[0],q[1];\n";
        assert!(matches!(
            parse_qasm(bad_gate),
            Err(Error::QasmParse { line: 3, .. })
        ));
        assert!(parse_qasm("OPENQASM 2.0;\nqreg q[1];\nx q[1];\n").is_err());
        assert!(parse_qasm("OPENQASM 2.0;\nqreg q[1];\nry q[0];\n").is_err());
        assert!(parse_qasm("OPENQASM 2.0;\nqreg q[1];\nx q[0]\n").is_err());
    }
}
