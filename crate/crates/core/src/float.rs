//! Complex double-precision matrices for the numerical side: ranks by singular
//! value thresholding, eigenvalues, and small dense solves.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::linalg::MatrixExact;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFloat {
    data: DMatrix<Complex64>,
    tol: f64,
}

impl MatrixFloat {
    pub fn new(data: DMatrix<Complex64>, tol: f64) -> Self {
        MatrixFloat { data, tol }
    }

    pub fn from_exact(m: &MatrixExact, tol: f64) -> Self {
        let data = DMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c).to_c64());
        MatrixFloat { data, tol }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixFloat { data: DMatrix::zeros(rows, cols), tol: DEFAULT_TOL }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        MatrixFloat { data: self.data.adjoint(), tol: self.tol }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols() != o.rows() {
            return Err(dim_err("float matrix product shapes"));
        }
        Ok(MatrixFloat { data: &self.data * &o.data, tol: self.tol })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        if self.data.shape() != o.data.shape() {
            return Err(dim_err("float matrix difference shapes"));
        }
        Ok(MatrixFloat { data: &self.data - &o.data, tol: self.tol })
    }

    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_finite(&self) -> Result<()> {
        if self.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numeric("non-finite matrix entry".into()));
        }
        Ok(())
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        self.check_finite()?;
        if self.rows() == 0 || self.cols() == 0 {
            return Ok(Vec::new());
        }
        let mut sv: Vec<f64> = self.data.clone().svd(false, false).singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        Ok(sv)
    }

    /// Number of singular values above `tol × σ_max`.
    pub fn numerical_rank(&self) -> Result<usize> {
        if self.tol <= 0.0 {
            return Err(Error::Argument("tolerance must be positive".into()));
        }
        let sv = self.singular_values()?;
        let Some(&top) = sv.first() else { return Ok(0) };
        Ok(sv.iter().filter(|&&s| s > self.tol * top).count())
    }

    /// Rank with threshold `tol × max(scale, σ_max)`; for matrices that are
    /// expected to vanish relative to an external magnitude (commutators, residuals).
    pub fn numerical_rank_scaled(&self, scale: f64) -> Result<usize> {
        if self.tol <= 0.0 {
            return Err(Error::Argument("tolerance must be positive".into()));
        }
        let sv = self.singular_values()?;
        let Some(&top) = sv.first() else { return Ok(0) };
        let thr = self.tol * top.max(scale);
        Ok(sv.iter().filter(|&&s| s > thr).count())
    }
}

/// Serialized float matrix: entries are row-major `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFloatJson {
    pub rows: usize,
    pub cols: usize,
    pub tol: f64,
    pub entries: Vec<(f64, f64)>,
}

impl From<&MatrixFloat> for MatrixFloatJson {
    fn from(m: &MatrixFloat) -> Self {
        let mut entries = Vec::with_capacity(m.rows() * m.cols());
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let z = m.data[(r, c)];
                entries.push((z.re, z.im));
            }
        }
        MatrixFloatJson { rows: m.rows(), cols: m.cols(), tol: m.tol, entries }
    }
}

impl TryFrom<&MatrixFloatJson> for MatrixFloat {
    type Error = Error;
    fn try_from(j: &MatrixFloatJson) -> Result<Self> {
        if j.entries.len() != j.rows * j.cols {
            return Err(dim_err("float matrix entry count"));
        }
        let data = DMatrix::from_fn(j.rows, j.cols, |r, c| {
            let (re, im) = j.entries[r * j.cols + c];
            Complex64::new(re, im)
        });
        Ok(MatrixFloat { data, tol: j.tol })
    }
}

impl Serialize for MatrixFloat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFloatJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixFloat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixFloatJson::deserialize(d)?;
        MatrixFloat::try_from(&j).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalues of a general complex square matrix (Hessenberg reduction +
/// shifted QR via nalgebra's complex Schur form).
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let schur = nalgebra::Schur::try_new(m.clone(), 1e-14, 10_000)
        .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

pub(crate) fn solve_least_squares(a: &DMatrix<Complex64>, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let rhs = nalgebra::DVector::from_column_slice(b);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&rhs, 1e-13).ok()?;
    Some(x.iter().copied().collect())
}
