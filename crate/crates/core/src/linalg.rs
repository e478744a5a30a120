// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = num_complex::Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Kronecker product `a ⊗ b`, `a` on the most significant index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigen-decomposition of the Hermitian part of `m`: (eigenvalues, eigenvectors as columns).
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let e = hermitian_part(m).symmetric_eigen();
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

pub fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)
        .first()
        .copied()
        .unwrap_or(f64::INFINITY)
}

/// `max_ij |(U†U - 1)_ij|`.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(n, n))
}

/// Distance between `a` and `b` after removing the best global phase.
pub fn max_abs_diff_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    max_abs_diff(&a.map(|x| x * phase), b)
}

pub fn vec_max_abs_diff_up_to_phase(a: &CVector, b: &CVector) -> f64 {
    let overlap = a.dotc(b);
    let phase = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Uniformly random unit vector in `C^dim`.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(dim, |_, _| random_complex(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v.unscale(n);
        }
    }
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| random_complex(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Removes from `v` its components along each of `basis` (assumed
/// orthonormal), twice for numerical stability.
pub fn project_out(v: &mut CVector, basis: &[CVector]) {
    for _ in 0..2 {
        for b in basis {
            let ov = b.dotc(v);
            *v -= b * ov;
        }
    }
}

/// Orthonormal basis of the orthogonal complement of `span` (assumed orthonormal)
/// obtained by Gram–Schmidt on the standard basis vectors.
pub fn orthonormal_complement(span: &[CVector], dim: usize) -> Vec<CVector> {
    let mut basis: Vec<CVector> = span.to_vec();
    let mut out = Vec::new();
    // candidates ordered by how much they survive projection, for stability
    let mut cands: Vec<CVector> = (0..dim)
        .map(|i| {
            let mut e = CVector::zeros(dim);
            e[i] = ONE;
            project_out(&mut e, &basis);
            e
        })
        .collect();
    while basis.len() < dim {
        let (idx, _) = cands
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("candidates remain while basis is incomplete");
        let mut v = cands.swap_remove(idx);
        project_out(&mut v, &basis);
        let n = v.norm();
        if n < 1e-10 {
            break;
        }
        let v = v.unscale(n);
        for cv in cands.iter_mut() {
            let ov = v.dotc(cv);
            *cv -= &v * ov;
        }
        basis.push(v.clone());
        out.push(v);
    }
    out
}

/// Builds a unitary whose columns at the given indices are the given
/// (orthonormal) vectors; the remaining columns are filled by Gram–Schmidt
/// against random vectors drawn from `rng`.
pub fn complete_to_unitary<R: Rng + ?Sized>(
    dim: usize,
    fixed: &[(usize, CVector)],
    rng: &mut R,
) -> CMatrix {
    let mut cols: Vec<Option<CVector>> = vec![None; dim];
    let mut basis = Vec::with_capacity(dim);
    for (j, v) in fixed {
        assert!(*j < dim && v.len() == dim);
        cols[*j] = Some(v.clone());
        basis.push(v.clone());
    }
    for col in cols.iter_mut() {
        if col.is_some() {
            continue;
        }
        let v = loop {
            let mut v = CVector::from_fn(dim, |_, _| random_complex(rng));
            project_out(&mut v, &basis);
            let n = v.norm();
            if n > 1e-6 {
                break v.unscale(n);
            }
        };
        basis.push(v.clone());
        *col = Some(v);
    }
    let cols: Vec<CVector> = cols.into_iter().map(|c| c.unwrap()).collect();
    CMatrix::from_columns(&cols)
}

/// Determinant of a small complex matrix by LU.
pub fn determinant(m: &CMatrix) -> C64 {
    m.clone().lu().determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [1, 2, 4, 8, 16] {
            assert!(unitarity_error(&haar_unitary(d, &mut rng)) < 1e-12);
        }
    }

    #[test]
    fn completion_keeps_fixed_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = random_unit_vector(4, &mut rng);
        let u = complete_to_unitary(4, &[(2, v.clone())], &mut rng);
        assert!(unitarity_error(&u) < 1e-12);
        assert!((u.column(2) - &v).norm() < 1e-14);
    }

    #[test]
    fn complement_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = random_unit_vector(4, &mut rng);
        let comp = orthonormal_complement(&[v.clone()], 4);
        assert_eq!(comp.len(), 3);
        let mut all = vec![v];
        all.extend(comp);
        let m = CMatrix::from_columns(&all);
        assert!(unitarity_error(&m) < 1e-12);
    }
}
