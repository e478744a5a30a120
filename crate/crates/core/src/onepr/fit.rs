// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Fitting `|c⟩ + e^{is}|a⟩ + e^{−is}|b⟩` to sampled curves of states.
//!
//! Alternating least squares from several starts brings each restart into
//! a basin; a Levenberg–Marquardt pass over all parameters then converges
//! quadratically. Accepted fits are orthogonalised, renormalised and
//! re-checked against the residual bound.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{wrap_to_pi, OneprDecomposition, StateCurve};
use crate::channels::DynamicalMap;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64, I, ONE};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::par::{map_indexed, Execution};

/// Largest accepted `max_i ‖β(p_i) − model(p_i)‖`.
pub const RESIDUAL_TOL: f64 = 1e-6;

/// Singular values below this are discarded when counting a curve's span.
pub const GRAM_RANK_TOL: f64 = 1e-8;

/// Columns shorter than this are treated as absent after fitting.
const ZERO_COLUMN: f64 = 1e-8;

const MIN_SAMPLES: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub restarts: usize,
    /// Restarts run per batch; fitting stops after the first batch that
    /// yields an accepted decomposition.
    pub batch: usize,
    pub max_iter: usize,
    /// Relative improvement of the squared residual below which ALS stops.
    pub improvement_tol: f64,
    pub polish_iter: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            restarts: 32,
            batch: 8,
            max_iter: 500,
            improvement_tol: 1e-12,
            polish_iter: 60,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneprFit {
    pub decomposition: OneprDecomposition,
    /// `max_i ‖β(p_i) − d.evaluate(p_i)‖`.
    pub residual: f64,
    /// Index of the restart that produced the fit.
    pub restart: usize,
}

/// Amplitude gauge used when lifting a Pauli map to a curve of states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GaugeSearch {
    /// `β_γ = √k_γ`.
    RealPositive,
    /// Falls back to a joint search over constant per-component phases.
    ConstantPhases { starts: usize },
}

struct Problem {
    ps: Vec<f64>,
    /// Row `i` holds `β(p_i)`.
    beta: CMatrix,
}

#[derive(Clone)]
struct Candidate {
    s: Vec<f64>,
    /// Rows `c`, `a`, `b`.
    coef: CMatrix,
    sse: f64,
    restart: usize,
}

impl Problem {
    fn n(&self) -> usize {
        self.beta.nrows()
    }

    fn dim(&self) -> usize {
        self.beta.ncols()
    }

    fn row(&self, i: usize) -> CVector {
        self.beta.row(i).transpose()
    }

    fn design(s: &[f64]) -> CMatrix {
        CMatrix::from_fn(s.len(), 3, |i, j| {
            let z = C64::from_polar(1.0, s[i]);
            match j {
                0 => ONE,
                1 => z,
                _ => z.conj(),
            }
        })
    }

    fn solve_linear(&self, s: &[f64]) -> CMatrix {
        let phi = Self::design(s);
        phi.svd(true, true)
            .solve(&self.beta, 1e-12)
            .expect("SVD computed with both factors")
    }

    fn sample_error(&self, coef: &CMatrix, s: &[f64], i: usize) -> f64 {
        let z = C64::from_polar(1.0, s[i]);
        (0..self.dim())
            .map(|d| {
                (coef[(0, d)] + z * coef[(1, d)] + z.conj() * coef[(2, d)] - self.beta[(i, d)])
                    .norm_sqr()
            })
            .sum()
    }

    fn sse(&self, coef: &CMatrix, s: &[f64]) -> f64 {
        (0..self.n()).map(|i| self.sample_error(coef, s, i)).sum()
    }

    fn max_residual(&self, coef: &CMatrix, s: &[f64]) -> f64 {
        (0..self.n())
            .map(|i| self.sample_error(coef, s, i).sqrt())
            .fold(0.0, f64::max)
    }

    fn update_s(&self, coef: &CMatrix, s: &mut [f64]) {
        let a = coef.row(1).transpose();
        let b = coef.row(2).transpose();
        let c = coef.row(0).transpose();
        let w = a.dotc(&b);
        for (i, si) in s.iter_mut().enumerate() {
            let r = self.row(i) - &c;
            *si = best_phase(r.dotc(&a), r.dotc(&b), w, *si);
        }
    }
}

/// Minimises `f(s) = −2Re(e^{is}u) − 2Re(e^{−is}v) + 2Re(e^{−2is}w)`,
/// which is `‖r − e^{is}a − e^{−is}b‖²` up to a constant.
fn best_phase(u: C64, v: C64, w: C64, prev: f64) -> f64 {
    let f = |s: f64| {
        let z = C64::from_polar(1.0, s);
        -2.0 * (z * u).re - 2.0 * (z.conj() * v).re + 2.0 * (z.conj() * z.conj() * w).re
    };
    let df = |s: f64| {
        let z = C64::from_polar(1.0, s);
        -2.0 * (I * z * u).re + 2.0 * (I * z.conj() * v).re + 4.0 * (I * z.conj() * z.conj() * w).re
    };
    let d2f = |s: f64| {
        let z = C64::from_polar(1.0, s);
        2.0 * (z * u).re + 2.0 * (z.conj() * v).re - 8.0 * (z.conj() * z.conj() * w).re
    };
    const GRID: usize = 24;
    let mut best = prev;
    let mut fbest = f(prev);
    for k in 0..GRID {
        let s = prev + 2.0 * PI * k as f64 / GRID as f64;
        let fs = f(s);
        if fs < fbest {
            best = s;
            fbest = fs;
        }
    }
    for _ in 0..20 {
        let (g, h) = (df(best), d2f(best));
        if g.abs() < 1e-15 {
            break;
        }
        let step = if h > 0.0 { -g / h } else { -g.signum() * 0.05 };
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let cand = best + t * step;
            let fc = f(cand);
            if fc <= fbest {
                best = cand;
                fbest = fc;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    best
}

/// Levenberg–Marquardt over `(s_i, c, a, b)`. The `s` block of the normal
/// matrix is diagonal, so it is eliminated by a Schur complement.
fn polish(problem: &Problem, cand: &mut Candidate, max_iter: usize) {
    let n = problem.n();
    let dim = problem.dim();
    let nl = 6 * dim;
    let mut mu = 1e-3;
    for _ in 0..max_iter {
        if cand.sse < 1e-28 {
            break;
        }
        let mut hss = vec![0.0; n];
        let mut gs = vec![0.0; n];
        let mut hll = DMatrix::<f64>::zeros(nl, nl);
        let mut hls = DMatrix::<f64>::zeros(nl, n);
        let mut gl = DVector::<f64>::zeros(nl);
        for i in 0..n {
            let z = C64::from_polar(1.0, cand.s[i]);
            for d in 0..dim {
                let (c, a, b) = (cand.coef[(0, d)], cand.coef[(1, d)], cand.coef[(2, d)]);
                let rho = c + z * a + z.conj() * b - problem.beta[(i, d)];
                let g = [
                    I * z * a - I * z.conj() * b,
                    ONE,
                    I,
                    z,
                    I * z,
                    z.conj(),
                    I * z.conj(),
                ];
                hss[i] += g[0].norm_sqr();
                gs[i] += (g[0].conj() * rho).re;
                for k in 1..7 {
                    let row = 6 * d + k - 1;
                    hls[(row, i)] += (g[k].conj() * g[0]).re;
                    gl[row] += (g[k].conj() * rho).re;
                    for k2 in 1..7 {
                        hll[(row, 6 * d + k2 - 1)] += (g[k].conj() * g[k2]).re;
                    }
                }
            }
        }
        let mut improved = false;
        for _ in 0..12 {
            let hss_d: Vec<f64> = hss.iter().map(|h| h * (1.0 + mu) + 1e-14).collect();
            let mut red = hll.clone();
            for r in 0..nl {
                red[(r, r)] += mu * hll[(r, r)] + 1e-14;
            }
            let mut rhs = -&gl;
            for i in 0..n {
                let col = hls.column(i);
                red.ger(-1.0 / hss_d[i], &col, &col, 1.0);
                rhs.axpy(gs[i] / hss_d[i], &col, 1.0);
            }
            let Some(chol) = red.cholesky() else {
                mu *= 10.0;
                continue;
            };
            let dl = chol.solve(&rhs);
            let ds: Vec<f64> = (0..n)
                .map(|i| -(gs[i] + hls.column(i).dot(&dl)) / hss_d[i])
                .collect();
            let s_new: Vec<f64> = cand.s.iter().zip(&ds).map(|(s, d)| s + d).collect();
            let mut coef_new = cand.coef.clone();
            for d in 0..dim {
                for (row, k) in [(0usize, 0usize), (1, 2), (2, 4)] {
                    coef_new[(row, d)] += C64::new(dl[6 * d + k], dl[6 * d + k + 1]);
                }
            }
            let sse_new = problem.sse(&coef_new, &s_new);
            if sse_new < cand.sse {
                let rel = (cand.sse - sse_new) / cand.sse;
                cand.s = s_new;
                cand.coef = coef_new;
                cand.sse = sse_new;
                mu = (mu / 3.0).max(1e-15);
                improved = rel > 1e-14;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
}

fn initial_phases(problem: &Problem, restart: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = problem.n();
    if restart > 0 && restart % 2 == 0 {
        let mut s: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        s[0] = 0.0;
        return s;
    }
    let cc = if restart == 0 {
        0.0
    } else {
        rng.random_range(0.0..0.95)
    };
    let b0 = problem.row(0);
    (0..n)
        .map(|i| {
            let g = b0.dotc(&problem.row(i)).re;
            ((g - cc) / (1.0 - cc)).clamp(-1.0, 1.0).acos()
        })
        .collect()
}

fn run_restart(problem: &Problem, restart: usize, opts: &FitOptions) -> Candidate {
    let mut rng =
        ChaCha8Rng::seed_from_u64(opts.seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut s = initial_phases(problem, restart, &mut rng);
    let mut coef = problem.solve_linear(&s);
    let mut sse = problem.sse(&coef, &s);
    for _ in 0..opts.max_iter {
        problem.update_s(&coef, &mut s);
        coef = problem.solve_linear(&s);
        let next = problem.sse(&coef, &s);
        let gain = sse - next;
        sse = next;
        if sse < 1e-28 || gain <= opts.improvement_tol * sse.max(1e-300) {
            break;
        }
    }
    let mut cand = Candidate {
        s,
        coef,
        sse,
        restart,
    };
    polish(problem, &mut cand, opts.polish_iter);
    cand
}

/// Löwdin orthogonalisation of the non-negligible columns, keeping norms.
fn orthogonalise(cols: [CVector; 3]) -> [CVector; 3] {
    let norms: Vec<f64> = cols.iter().map(|v| v.norm()).collect();
    let keep: Vec<usize> = (0..3).filter(|&j| norms[j] >= ZERO_COLUMN).collect();
    let dim = cols[0].len();
    let mut out = [
        CVector::zeros(dim),
        CVector::zeros(dim),
        CVector::zeros(dim),
    ];
    if keep.is_empty() {
        return out;
    }
    let v = CMatrix::from_columns(
        &keep
            .iter()
            .map(|&j| cols[j].unscale(norms[j]))
            .collect::<Vec<_>>(),
    );
    let s = v.adjoint() * &v;
    let eig = s.symmetric_eigen();
    let inv_sqrt = &eig.eigenvectors
        * CMatrix::from_diagonal(
            &eig.eigenvalues
                .map(|l| C64::new(1.0 / l.max(1e-300).sqrt(), 0.0)),
        )
        * eig.eigenvectors.adjoint();
    let orth = v * inv_sqrt;
    for (k, &j) in keep.iter().enumerate() {
        out[j] = orth.column(k) * C64::new(norms[j], 0.0);
    }
    out
}

fn finalize(problem: &Problem, cand: &Candidate) -> Option<(OneprDecomposition, f64)> {
    let rows: [CVector; 3] = [0, 1, 2].map(|r| cand.coef.row(r).transpose());
    let [c, a, b] = orthogonalise(rows);
    let total = (a.norm_squared() + b.norm_squared() + c.norm_squared()).sqrt();
    if total == 0.0 {
        return None;
    }
    let (mut a, mut b, c) = (a.unscale(total), b.unscale(total), c.unscale(total));
    let mut coef = CMatrix::from_rows(&[c.transpose(), a.transpose(), b.transpose()]);
    let mut s = cand.s.clone();
    let rotating = a.norm() > 0.0 || b.norm() > 0.0;
    if rotating {
        problem.update_s(&coef, &mut s);
    } else {
        s.iter_mut().for_each(|x| *x = 0.0);
    }
    let residual = problem.max_residual(&coef, &s);
    if residual > RESIDUAL_TOL {
        return None;
    }
    for i in 1..s.len() {
        s[i] = s[i - 1] + wrap_to_pi(s[i] - s[i - 1]);
    }
    if s[s.len() - 1] < s[0] {
        std::mem::swap(&mut a, &mut b);
        s.iter_mut().for_each(|x| *x = -*x);
    }
    let s0 = s[0];
    a *= C64::from_polar(1.0, s0);
    b *= C64::from_polar(1.0, -s0);
    s.iter_mut().for_each(|x| *x -= s0);
    coef = CMatrix::from_rows(&[c.transpose(), a.transpose(), b.transpose()]);
    let residual = problem.max_residual(&coef, &s);
    let samples = problem.ps.iter().copied().zip(s).collect();
    OneprDecomposition::new(a, b, c, samples)
        .ok()
        .map(|d| (d, residual))
}

fn curve_rank(beta: &CMatrix) -> usize {
    beta.clone()
        .singular_values()
        .iter()
        .filter(|s| **s > GRAM_RANK_TOL)
        .count()
}

fn problem_of(curve: &StateCurve) -> Problem {
    let n = curve.len();
    let beta = CMatrix::from_fn(n, curve.dim(), |i, d| curve.samples()[i].1[d]);
    Problem {
        ps: curve.samples().iter().map(|s| s.0).collect(),
        beta,
    }
}

fn check_curve(curve: &StateCurve) -> Result<Problem> {
    if curve.len() < MIN_SAMPLES {
        return Err(Error::InvalidCurve(format!(
            "fitting needs at least {MIN_SAMPLES} samples, got {}",
            curve.len()
        )));
    }
    let problem = problem_of(curve);
    let rank = curve_rank(&problem.beta);
    if rank > 3 {
        return Err(Error::Infeasible { rank });
    }
    Ok(problem)
}

/// Fits a 1PR decomposition to `curve`.
///
/// Returns [`Error::Infeasible`] when the samples span more than three
/// dimensions (a proof that no decomposition exists) and
/// [`Error::NotFound`] when every restart fails, which proves nothing.
pub fn fit_onepr(curve: &StateCurve, opts: &FitOptions) -> Result<OneprFit> {
    let problem = check_curve(curve)?;
    let b0 = problem.row(0);
    if (0..problem.n()).all(|i| (problem.row(i) - &b0).norm() < 1e-12) {
        let zero = CVector::zeros(problem.dim());
        let samples = problem.ps.iter().map(|&p| (p, 0.0)).collect();
        let d = OneprDecomposition::new(zero.clone(), zero, b0, samples)?;
        return Ok(OneprFit {
            decomposition: d,
            residual: 0.0,
            restart: 0,
        });
    }
    let batch = opts.batch.max(1);
    let mut all: Vec<Candidate> = Vec::new();
    let mut start = 0;
    while start < opts.restarts {
        let count = batch.min(opts.restarts - start);
        let found = map_indexed(opts.execution, count, |k| {
            run_restart(&problem, start + k, opts)
        });
        all.extend(found);
        start += count;
        all.sort_by(|x, y| x.sse.total_cmp(&y.sse).then(x.restart.cmp(&y.restart)));
        for cand in &all {
            if problem.max_residual(&cand.coef, &cand.s) > 10.0 * RESIDUAL_TOL {
                break;
            }
            if let Some((d, residual)) = finalize(&problem, cand) {
                log::debug!(
                    "1PR fit accepted from restart {} (residual {residual:e})",
                    cand.restart
                );
                return Ok(OneprFit {
                    decomposition: d,
                    residual,
                    restart: cand.restart,
                });
            }
        }
    }
    let best = all
        .first()
        .map_or(f64::INFINITY, |c| problem.max_residual(&c.coef, &c.s));
    Err(Error::NotFound {
        best_residual: best,
    })
}

/// Best raw residual over a few restarts; the objective of the gauge search.
fn raw_residual(curve: &StateCurve, opts: &FitOptions) -> f64 {
    let problem = problem_of(curve);
    (0..opts.restarts)
        .map(|r| {
            let c = run_restart(&problem, r, opts);
            problem.max_residual(&c.coef, &c.s)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Lifts a one-parameter Pauli map to amplitudes and fits it.
pub fn fit_pauli_map(
    map: &DynamicalMap,
    n_samples: usize,
    gauge: GaugeSearch,
    opts: &FitOptions,
) -> Result<OneprFit> {
    let curve = StateCurve::from_pauli_map(map, n_samples)?;
    let first = fit_onepr(&curve, opts);
    let GaugeSearch::ConstantPhases { starts } = gauge else {
        return first;
    };
    match first {
        Err(Error::NotFound { .. }) => {}
        other => return other,
    }
    let n_phases = (1usize << (2 * map.n_qubits())) - 1;
    let cheap = FitOptions {
        restarts: 4,
        max_iter: 100,
        polish_iter: 10,
        execution: Execution::Sequential,
        ..*opts
    };
    let objective = |x: &[f64]| {
        let mut phases = vec![0.0];
        phases.extend_from_slice(x);
        StateCurve::from_pauli_map_with_phases(map, n_samples, &phases)
            .map_or(f64::INFINITY, |c| raw_residual(&c, &cheap))
    };
    let nm = NelderMeadOptions {
        max_iter: 200,
        step: 0.8,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut last = first;
    for _ in 0..starts.max(1) {
        let x0: Vec<f64> = (0..n_phases).map(|_| rng.random_range(-PI..PI)).collect();
        let m = nelder_mead(objective, &x0, &nm);
        let mut phases = vec![0.0];
        phases.extend(m.x);
        let curve = StateCurve::from_pauli_map_with_phases(map, n_samples, &phases)?;
        last = fit_onepr(&curve, opts);
        if last.is_ok() {
            break;
        }
    }
    last
}

/// Necessary condition for a 1PR decomposition: the samples span at most
/// three dimensions and every overlap `⟨β(p)|β(p′)⟩` lies on one ellipse
/// `C + A e^{iδ} + B e^{−iδ}` (axis-aligned, centred on the real axis).
pub fn gram_circle_test(curve: &StateCurve) -> bool {
    let problem = problem_of(curve);
    if curve_rank(&problem.beta) > 3 {
        return false;
    }
    let n = problem.n();
    let mut pts = vec![(1.0, 0.0)];
    for i in 0..n {
        for j in i + 1..n {
            let g = problem.row(i).dotc(&problem.row(j));
            pts.push((g.re, g.im));
        }
    }
    if pts.iter().all(|p| p.1.abs() < 1e-9) {
        return pts.iter().all(|p| p.0.abs() <= 1.0 + 1e-9);
    }
    let m = DMatrix::from_fn(pts.len(), 4, |r, k| {
        let (x, y) = pts[r];
        match k {
            0 => x * x,
            1 => x,
            2 => y * y,
            _ => 1.0,
        }
    });
    let gram = m.transpose() * &m;
    let eig = gram.symmetric_eigen();
    let (kmin, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("4 eigenvalues");
    let v = eig.eigenvectors.column(kmin).into_owned();
    let residual = (&m * &v).amax();
    let ellipse = v[0] * v[2] >= 0.0;
    residual <= RESIDUAL_TOL && ellipse
}
