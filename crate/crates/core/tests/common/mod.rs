//! Oracles used by the integration tests. None of them calls into the
//! Gröbner engine or the exact rank code they are checking.
#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rankstab::linalg::{MatrixExact, Subspace};
use rankstab::polyring::{monomials_up_to, Monomial, Poly};
use rankstab::scalar::Scalar;
use rankstab::tuples::MatrixTuple;

pub fn to_c64(m: &MatrixExact) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c).to_c64())
}

pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Singular values above `tol · max(scale, σ_max)`.
pub fn svd_rank(m: &DMatrix<Complex64>, tol: f64, scale: f64) -> usize {
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0).max(scale);
    sv.iter().filter(|&&s| s > tol * top && s > 0.0).count()
}

pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

fn exact_mats(t: &MatrixTuple) -> Vec<DMatrix<Complex64>> {
    match t.float_mats() {
        Some(f) => f.iter().map(|m| m.data().clone()).collect(),
        None => t.exact().unwrap().iter().map(to_c64).collect(),
    }
}

/// `max_i rank(A_i − B_i)/d` through float SVD.
pub fn float_distance(a: &MatrixTuple, b: &MatrixTuple, tol: f64) -> f64 {
    let (x, y) = (exact_mats(a), exact_mats(b));
    let d = a.d().max(1) as f64;
    x.iter()
        .zip(&y)
        .map(|(p, q)| {
            let scale = spectral_norm(p).max(spectral_norm(q));
            svd_rank(&(p - q), tol, scale) as f64 / d
        })
        .fold(0.0, f64::max)
}

/// Largest float rank of a commutator, thresholded against `‖A‖·‖B‖`.
pub fn float_commutator_rank(t: &MatrixTuple, tol: f64) -> usize {
    let m = exact_mats(t);
    let mut worst = 0;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let c = &m[i] * &m[j] - &m[j] * &m[i];
            let scale = spectral_norm(&m[i]) * spectral_norm(&m[j]);
            worst = worst.max(svd_rank(&c, tol, scale));
        }
    }
    worst
}

/// Coefficient vectors of polynomials over the monomials of degree ≤ `deg`.
pub struct MonomialIndex {
    pub monos: Vec<Monomial>,
    pos: HashMap<Monomial, usize>,
}

impl MonomialIndex {
    pub fn new(nvars: usize, deg: u32) -> Self {
        let monos = monomials_up_to(nvars, deg);
        let pos = monos.iter().enumerate().map(|(k, m)| (*m, k)).collect();
        MonomialIndex { monos, pos }
    }

    pub fn vector(&self, f: &Poly) -> Option<Vec<Scalar>> {
        let mut v = vec![Scalar::zero(); self.monos.len()];
        for (m, c) in f.terms() {
            v[*self.pos.get(m)?] = c.clone();
        }
        Some(v)
    }
}

/// `span{m·g : g ∈ gens, deg(m·g) ≤ big_d}` in coefficient space.
pub fn truncated_ideal(nvars: usize, gens: &[Poly], big_d: u32) -> (MonomialIndex, Subspace) {
    let idx = MonomialIndex::new(nvars, big_d);
    let mut vecs = Vec::new();
    for g in gens {
        let Some(dg) = g.degree() else { continue };
        if dg > big_d {
            continue;
        }
        for m in monomials_up_to(nvars, big_d - dg) {
            vecs.push(idx.vector(&g.mul_term(&m, &Scalar::one())).unwrap());
        }
    }
    let n = idx.monos.len();
    (idx, Subspace::from_vectors(n, vecs).unwrap())
}

/// Degree-bounded membership: `f` is a combination of the `m·g` of degree ≤ `big_d`.
pub fn span_member(nvars: usize, gens: &[Poly], f: &Poly, big_d: u32) -> bool {
    let (idx, s) = truncated_ideal(nvars, gens, big_d);
    match idx.vector(f) {
        Some(v) => s.contains(&v),
        None => false,
    }
}

/// `#monomials(≤ i) − dim(I_D ∩ P_≤i)`; an upper bound on `dim F_i`, exact for large `big_d`.
pub fn filtration_dim_oracle(nvars: usize, gens: &[Poly], i: u32, big_d: u32) -> usize {
    let (idx, s) = truncated_ideal(nvars, gens, big_d.max(i));
    let n = idx.monos.len();
    let low: Vec<Vec<Scalar>> = idx
        .monos
        .iter()
        .enumerate()
        .filter(|(_, m)| m.degree() <= i)
        .map(|(k, _)| rankstab::linalg::unit_vector(n, k))
        .collect();
    let count = low.len();
    let low = Subspace::from_vectors(n, low).unwrap();
    count - s.intersect(&low).unwrap().dim()
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

pub fn rat(x: num_rational::Rational64) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}
