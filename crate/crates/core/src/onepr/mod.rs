// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Circuits with one parametrized rotation (1PR).
//!
//! Applying such a circuit to a fixed input traces a curve of states
//! `|c⟩ + e^{is}|a⟩ + e^{−is}|b⟩` with mutually orthogonal `a`, `b`, `c`
//! whose squared norms sum to one. This module evaluates, checks, fits,
//! synthesizes and randomly generates such decompositions.

mod fit;
mod random;
mod synth;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channels::DynamicalMap;
use crate::circuits::{rotation_matrix, Gate, GateKind, Mat2};
use crate::error::{Error, Result};
use crate::linalg::{CVector, C64, I};

pub use fit::{
    fit_onepr, fit_pauli_map, gram_circle_test, FitOptions, GaugeSearch, OneprFit, GRAM_RANK_TOL,
    RESIDUAL_TOL,
};
pub use random::{random_onepr_decomposition, random_onepr_map, RANDOM_MAP_DOMAIN};
pub use synth::{compile_unitary, forward_decomposition, synthesize_onepr_circuit, OneprCircuit};

/// Tolerance of [`check_conditions`].
pub const CONDITION_TOL: f64 = 1e-10;

/// Largest violation of `⟨a|b⟩ = ⟨a|c⟩ = ⟨b|c⟩ = 0` and
/// `⟨a|a⟩ + ⟨b|b⟩ + ⟨c|c⟩ = 1`.
pub fn conditions_error(a: &CVector, b: &CVector, c: &CVector) -> f64 {
    let norm = a.norm_squared() + b.norm_squared() + c.norm_squared();
    [
        a.dotc(b).norm(),
        a.dotc(c).norm(),
        b.dotc(c).norm(),
        (norm - 1.0).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Orthogonality and norm conditions, each to `1e-10`.
pub fn check_conditions(a: &CVector, b: &CVector, c: &CVector) -> bool {
    a.len() == b.len() && b.len() == c.len() && conditions_error(a, b, c) <= CONDITION_TOL
}

/// `|c⟩ + e^{is}|a⟩ + e^{−is}|b⟩` together with samples of `s(p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneprDecomposition {
    pub a: CVector,
    pub b: CVector,
    pub c: CVector,
    s_samples: Vec<(f64, f64)>,
}

impl OneprDecomposition {
    /// Validates the conditions and that `p` strictly increases.
    pub fn new(a: CVector, b: CVector, c: CVector, s_samples: Vec<(f64, f64)>) -> Result<Self> {
        if a.len() != b.len() || b.len() != c.len() {
            return Err(Error::InvalidDecomposition(
                "a, b, c differ in dimension".into(),
            ));
        }
        if !check_conditions(&a, &b, &c) {
            return Err(Error::InvalidDecomposition(format!(
                "orthogonality/normalisation violated by {:e}",
                conditions_error(&a, &b, &c)
            )));
        }
        if s_samples.is_empty() {
            return Err(Error::InvalidDecomposition("no s(p) samples".into()));
        }
        if s_samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidDecomposition(
                "p must strictly increase".into(),
            ));
        }
        Ok(OneprDecomposition { a, b, c, s_samples })
    }

    /// Samples `s = f(p)` at `n` points of `[lo, hi]`.
    pub fn with_schedule(
        a: CVector,
        b: CVector,
        c: CVector,
        (lo, hi): (f64, f64),
        n: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let samples = linspace(lo, hi, n).into_iter().map(|p| (p, f(p))).collect();
        OneprDecomposition::new(a, b, c, samples)
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn s_samples(&self) -> &[(f64, f64)] {
        &self.s_samples
    }

    pub fn domain(&self) -> (f64, f64) {
        (
            self.s_samples[0].0,
            self.s_samples[self.s_samples.len() - 1].0,
        )
    }

    /// `s(p)` by linear interpolation between samples.
    pub fn s_at(&self, p: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&p) {
            return Err(Error::OutOfDomain { p, lo, hi });
        }
        let smp = &self.s_samples;
        if smp.len() == 1 {
            return Ok(smp[0].1);
        }
        let i = smp
            .partition_point(|(q, _)| *q <= p)
            .clamp(1, smp.len() - 1);
        let ((p0, s0), (p1, s1)) = (smp[i - 1], smp[i]);
        let t = (p - p0) / (p1 - p0);
        Ok(s0 + t * (s1 - s0))
    }

    pub fn state_at_s(&self, s: f64) -> CVector {
        let z = C64::from_polar(1.0, s);
        &self.c + &self.a * z + &self.b * z.conj()
    }

    pub fn evaluate(&self, p: f64) -> Result<CVector> {
        Ok(self.state_at_s(self.s_at(p)?))
    }

    pub fn norms_squared(&self) -> [f64; 3] {
        [
            self.a.norm_squared(),
            self.b.norm_squared(),
            self.c.norm_squared(),
        ]
    }
}

/// `evaluate_decomposition(d, p)`.
pub fn evaluate_decomposition(d: &OneprDecomposition, p: f64) -> Result<CVector> {
    d.evaluate(p)
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Serialize, Deserialize)]
struct VecJson {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<&CVector> for VecJson {
    fn from(v: &CVector) -> Self {
        VecJson {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }
}

impl VecJson {
    fn into_vector(self) -> Result<CVector> {
        if self.re.len() != self.im.len() {
            return Err(Error::InvalidCurve("re and im lengths differ".into()));
        }
        Ok(CVector::from_iterator(
            self.re.len(),
            self.re
                .into_iter()
                .zip(self.im)
                .map(|(r, i)| C64::new(r, i)),
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct DecompositionJson {
    dim: usize,
    a: VecJson,
    b: VecJson,
    c: VecJson,
    s: Vec<(f64, f64)>,
}

impl Serialize for OneprDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DecompositionJson {
            dim: self.dim(),
            a: (&self.a).into(),
            b: (&self.b).into(),
            c: (&self.c).into(),
            s: self.s_samples.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OneprDecomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = DecompositionJson::deserialize(d)?;
        let a = j.a.into_vector().map_err(D::Error::custom)?;
        let b = j.b.into_vector().map_err(D::Error::custom)?;
        let c = j.c.into_vector().map_err(D::Error::custom)?;
        if a.len() != j.dim {
            return Err(D::Error::custom(format!(
                "dim {} does not match vectors",
                j.dim
            )));
        }
        OneprDecomposition::new(a, b, c, j.s).map_err(D::Error::custom)
    }
}

/// Samples `(p, β(p))` of a curve of unit vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct StateCurve {
    dim: usize,
    samples: Vec<(f64, CVector)>,
}

impl StateCurve {
    pub fn new(samples: Vec<(f64, CVector)>) -> Result<Self> {
        let dim = samples
            .first()
            .map(|s| s.1.len())
            .ok_or_else(|| Error::InvalidCurve("no samples".into()))?;
        for (p, v) in &samples {
            if v.len() != dim {
                return Err(Error::InvalidCurve(format!(
                    "sample at p={p} has wrong dimension"
                )));
            }
            if (v.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidCurve(format!(
                    "sample at p={p} has norm {}",
                    v.norm()
                )));
            }
        }
        if samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidCurve("p must strictly increase".into()));
        }
        Ok(StateCurve { dim, samples })
    }

    /// Real nonnegative lift `β_γ(p) = √k_γ(p)` of a Pauli dynamical map.
    pub fn from_pauli_map(map: &DynamicalMap, n: usize) -> Result<Self> {
        Self::from_pauli_map_with_phases(map, n, &[])
    }

    /// `β_γ(p) = e^{iφ_γ} √k_γ(p)` with constant phases (missing entries are 0).
    pub fn from_pauli_map_with_phases(
        map: &DynamicalMap,
        n: usize,
        phases: &[f64],
    ) -> Result<Self> {
        let samples = map
            .sample(n)
            .into_iter()
            .map(|(p, k)| {
                let v = CVector::from_iterator(
                    k.len(),
                    k.as_slice().iter().enumerate().map(|(g, x)| {
                        C64::from_polar(x.max(0.0).sqrt(), phases.get(g).copied().unwrap_or(0.0))
                    }),
                );
                let norm = v.norm();
                (p, v.unscale(norm))
            })
            .collect();
        StateCurve::new(samples)
    }

    pub fn from_decomposition(d: &OneprDecomposition, ps: &[f64]) -> Result<Self> {
        let samples = ps
            .iter()
            .map(|&p| Ok((p, d.evaluate(p)?)))
            .collect::<Result<Vec<_>>>()?;
        StateCurve::new(samples)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[(f64, CVector)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct CurveSampleJson {
    p: f64,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    dim: usize,
    samples: Vec<CurveSampleJson>,
}

impl Serialize for StateCurve {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CurveJson {
            dim: self.dim,
            samples: self
                .samples
                .iter()
                .map(|(p, v)| {
                    let j = VecJson::from(v);
                    CurveSampleJson {
                        p: *p,
                        re: j.re,
                        im: j.im,
                    }
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateCurve {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = CurveJson::deserialize(d)?;
        let samples = j
            .samples
            .into_iter()
            .map(|s| {
                let v = VecJson { re: s.re, im: s.im }.into_vector()?;
                if v.len() != j.dim {
                    return Err(Error::InvalidCurve(format!(
                        "sample at p={} has dimension {}, expected {}",
                        s.p,
                        v.len(),
                        j.dim
                    )));
                }
                Ok((s.p, v))
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        StateCurve::new(samples).map_err(D::Error::custom)
    }
}

/// A rotation `R_n̂(2s) = exp(−i s n̂·σ)` about a unit axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisRotation {
    pub axis: [f64; 3],
    pub s: f64,
}

impl AxisRotation {
    pub fn new(axis: [f64; 3], s: f64) -> Result<Self> {
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidGate(format!("rotation axis has norm {norm}")));
        }
        Ok(AxisRotation { axis, s })
    }

    pub fn matrix(&self) -> Mat2 {
        let [x, y, z] = self.axis;
        let (sn, cs) = self.s.sin_cos();
        let n_sigma = Mat2::new(
            C64::new(z, 0.0),
            C64::new(x, -y),
            C64::new(x, y),
            C64::new(-z, 0.0),
        );
        Mat2::identity() * C64::new(cs, 0.0) - n_sigma * (I * sn)
    }

    /// Polar and azimuthal angles `(θ, φ)` of the axis.
    pub fn angles(&self) -> (f64, f64) {
        let [x, y, z] = self.axis;
        (z.clamp(-1.0, 1.0).acos(), y.atan2(x))
    }
}

/// Conjugation of a `z` rotation onto the axis: in time order
/// `[RZ(−φ), RY(−θ)]`, then `RZ(2s)`, then `[RY(θ), RZ(φ)]`.
pub struct ZNormalForm {
    pub theta: f64,
    pub phi: f64,
    pub pre: Vec<Gate>,
    pub rz: Gate,
    pub post: Vec<Gate>,
}

impl ZNormalForm {
    pub fn matrix(&self) -> Mat2 {
        self.pre
            .iter()
            .chain(std::iter::once(&self.rz))
            .chain(&self.post)
            .fold(Mat2::identity(), |acc, g| g.base_matrix() * acc)
    }
}

pub fn axis_to_z_normal_form(rot: &AxisRotation, target: usize) -> ZNormalForm {
    let (theta, phi) = rot.angles();
    ZNormalForm {
        theta,
        phi,
        pre: vec![Gate::rz(target, -phi), Gate::ry(target, -theta)],
        rz: Gate::rz(target, 2.0 * rot.s),
        post: vec![Gate::ry(target, theta), Gate::rz(target, phi)],
    }
}

/// `R_z(2s)` as a matrix; the only parameter-dependent gate of the normal form.
pub fn rz_of_s(s: f64) -> Mat2 {
    rotation_matrix(GateKind::Rz, 2.0 * s)
}

pub(crate) fn wrap_to_pi(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn v(xs: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(xs.len(), xs.iter().map(|&(r, i)| c(r, i)))
    }

    pub(crate) fn bitflip_decomposition() -> OneprDecomposition {
        let a = v(&[(0.5, 0.), (0., -0.5), (0., 0.), (0., 0.)]);
        let b = v(&[(0.5, 0.), (0., 0.5), (0., 0.), (0., 0.)]);
        OneprDecomposition::with_schedule(a, b, CVector::zeros(4), (0.0, 1.0), 21, |p| {
            p.sqrt().asin()
        })
        .unwrap()
    }

    #[test]
    fn conditions_examples() {
        let h = FRAC_1_SQRT_2;
        let a = v(&[(h, 0.), (0., 0.)]);
        let b = v(&[(0., 0.), (h, 0.)]);
        assert!(check_conditions(&a, &b, &CVector::zeros(2)));
        let e0 = v(&[(1., 0.), (0., 0.)]);
        assert!(!check_conditions(&e0, &e0, &CVector::zeros(2)));
    }

    #[test]
    fn parabolic_triple_satisfies_conditions() {
        // c = (|00⟩+|11⟩)/2; e^{is}a + e^{-is}b = −(sin s/2)(|00⟩−|11⟩) + (cos s/2)(|01⟩+|10⟩)
        let c0 = v(&[(0.5, 0.), (0., 0.), (0., 0.), (0.5, 0.)]);
        let a = v(&[(0., 0.25), (0.25, 0.), (0.25, 0.), (0., -0.25)]);
        let b = v(&[(0., -0.25), (0.25, 0.), (0.25, 0.), (0., 0.25)]);
        assert!(check_conditions(&a, &b, &c0));
        let d = OneprDecomposition::with_schedule(a, b, c0, (-1.0, 1.0), 21, f64::asin).unwrap();
        for p in [-1.0, -0.3, 0.0, 0.6, 1.0] {
            let out = d.evaluate(p).unwrap();
            let k = [
                (1.0 - p) * (1.0 - p) / 4.0,
                (1.0 - p * p) / 4.0,
                (1.0 - p * p) / 4.0,
                (1.0 + p) * (1.0 + p) / 4.0,
            ];
            for (x, kk) in out.iter().zip(k) {
                assert!((x.norm_sqr() - kk).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bitflip_evaluation() {
        let d = bitflip_decomposition();
        for i in 0..21 {
            let p = i as f64 / 20.0;
            let out = d.evaluate(p).unwrap();
            assert!((out[0] - c((1.0 - p).sqrt(), 0.0)).norm() < 1e-12);
            assert!((out[1] - c(p.sqrt(), 0.0)).norm() < 1e-12);
        }
        assert!(d.evaluate(1.5).is_err());
    }

    #[test]
    fn depolarizing_at_one() {
        // sin s = √(3p/4), c = 0, a = (e0 − i u)/2, b = (e0 + i u)/2
        let u = 1.0 / 3f64.sqrt();
        let a = v(&[(0.5, 0.), (0., -u / 2.), (0., -u / 2.), (0., -u / 2.)]);
        let b = v(&[(0.5, 0.), (0., u / 2.), (0., u / 2.), (0., u / 2.)]);
        let d = OneprDecomposition::with_schedule(a, b, CVector::zeros(4), (0.0, 1.0), 11, |p| {
            (0.75 * p).sqrt().asin()
        })
        .unwrap();
        let out = d.evaluate(1.0).unwrap();
        for x in out.iter() {
            assert!((x - c(0.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_curve() {
        let c0 = v(&[(1., 0.), (0., 0.)]);
        let z = CVector::zeros(2);
        let d = OneprDecomposition::with_schedule(z.clone(), z, c0.clone(), (0.0, 1.0), 3, |p| p)
            .unwrap();
        assert_eq!(d.evaluate(0.3).unwrap(), c0);
    }

    #[test]
    fn decomposition_json_roundtrip() {
        let d = bitflip_decomposition();
        let s = serde_json::to_string(&d).unwrap();
        let back: OneprDecomposition = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn curve_json_roundtrip() {
        let d = bitflip_decomposition();
        let curve = StateCurve::from_decomposition(&d, &[0.0, 0.5, 1.0]).unwrap();
        let s = serde_json::to_string(&curve).unwrap();
        assert!(s.starts_with(r#"{"dim":4,"samples":[{"p":0.0,"re":["#));
        let back: StateCurve = serde_json::from_str(&s).unwrap();
        assert_eq!(back, curve);
        assert!(serde_json::from_str::<StateCurve>(
            r#"{"dim":2,"samples":[{"p":0,"re":[1,1],"im":[0,0]}]}"#
        )
        .is_err());
    }

    #[test]
    fn normal_form_examples() {
        let z = axis_to_z_normal_form(&AxisRotation::new([0., 0., 1.], 0.3).unwrap(), 0);
        assert_eq!((z.theta, z.phi), (0.0, 0.0));

        let rot = AxisRotation::new([1., 0., 0.], std::f64::consts::FRAC_PI_4).unwrap();
        let nf = axis_to_z_normal_form(&rot, 0);
        let rx = rotation_matrix(GateKind::Rx, std::f64::consts::FRAC_PI_2);
        assert!((nf.matrix() - rx).norm() < 1e-12);
        assert!((rot.matrix() - rx).norm() < 1e-12);

        let t = 1.0 / 3f64.sqrt();
        for s in [0.1, -0.7, 2.3] {
            let rot = AxisRotation::new([t, t, t], s).unwrap();
            assert!((axis_to_z_normal_form(&rot, 0).matrix() - rot.matrix()).norm() < 1e-12);
        }
        assert!(AxisRotation::new([1., 1., 0.], 0.1).is_err());
    }

    #[test]
    fn wrapping() {
        assert!((wrap_to_pi(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_to_pi(-PI) - PI).abs() < 1e-15);
    }
}
