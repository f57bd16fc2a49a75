//! Dense exact linear algebra over the Gaussian rationals.
//!
//! Every rank, kernel and subspace computation in the crate goes through the
//! reduced row-echelon routine here. Subspaces are kept in RREF so equality is
//! an entrywise comparison.

use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::scalar::Scalar;

pub type Vector = Vec<Scalar>;

/// Hermitian inner product, conjugate-linear in the first argument.
pub fn inner(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc += &(&x.conj() * y);
    }
    acc
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn unit_vector(d: usize, k: usize) -> Vector {
    let mut v = vec![Scalar::zero(); d];
    v[k] = Scalar::one();
    v
}

/// `y += a·x`
pub fn axpy(y: &mut [Scalar], a: &Scalar, x: &[Scalar]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += &(a * xi);
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatrixExact {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for MatrixExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixExact {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl MatrixExact {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixExact { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        MatrixExact { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vector>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(dim_err("ragged rows"));
        }
        Ok(MatrixExact { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Build from a row-major list of entries.
    pub fn from_entries(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim_err(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(MatrixExact { rows, cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(d: usize, cols: &[Vector]) -> Self {
        Self::from_fn(d, cols.len(), |r, c| cols[c][r].clone())
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(r, c, |i, j| Scalar::from_int(rows[i][j]))
    }

    pub fn diagonal(entries: &[Scalar]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn conj(&self) -> Self {
        MatrixExact { rows: self.rows, cols: self.cols, data: self.data.iter().map(Scalar::conj).collect() }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        MatrixExact { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(MatrixExact {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(MatrixExact {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        })
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(dim_err(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(dim_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            let orow = &mut out.data[r * o.cols..(r + 1) * o.cols];
            for k in 0..self.cols {
                let a = &self.data[r * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                axpy(orow, a, o.row(k));
            }
        }
        Ok(out)
    }

    /// Commutator `AB − BA`.
    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    pub fn matvec(&self, v: &[Scalar]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(dim_err(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok(self.matvec_unchecked(v))
    }

    pub(crate) fn matvec_unchecked(&self, v: &[Scalar]) -> Vector {
        let nz: Vec<usize> = (0..v.len()).filter(|&k| !v[k].is_zero()).collect();
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let mut acc = Scalar::zero();
                for &k in &nz {
                    if !row[k].is_zero() {
                        acc += &(&row[k] * &v[k]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Vertical concatenation.
    pub fn stack(parts: &[&MatrixExact]) -> Result<Self> {
        let cols = parts.first().map_or(0, |m| m.cols);
        if parts.iter().any(|m| m.cols != cols) {
            return Err(dim_err("stacking matrices with different column counts"));
        }
        let mut data = Vec::new();
        let mut rows = 0;
        for m in parts {
            data.extend(m.data.iter().cloned());
            rows += m.rows;
        }
        Ok(MatrixExact { rows, cols, data })
    }

    /// Reduced row-echelon form and the pivot columns.
    pub fn rref(&self) -> (MatrixExact, Vec<usize>) {
        let (rows, pivots) = rref_rows(self.row_vectors(), self.cols);
        let m = MatrixExact::from_entries(rows.len(), self.cols, rows.into_iter().flatten().collect())
            .expect("rref preserves shape");
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        rref_rows(self.row_vectors(), self.cols).1.len()
    }

    pub fn kernel(&self) -> Subspace {
        let (r, pivots) = rref_rows(self.row_vectors(), self.cols);
        Subspace::from_vectors(self.cols, kernel_from_rref(&r, &pivots, self.cols))
            .expect("kernel vectors have ambient length")
    }

    /// Column space.
    pub fn image(&self) -> Subspace {
        Subspace::from_vectors(self.rows, (0..self.cols).map(|c| self.column(c)).collect())
            .expect("columns have ambient length")
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(dim_err("inverse of a non-square matrix"));
        }
        let d = self.rows;
        let aug: Vec<Vector> = (0..d)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.extend(unit_vector(d, r));
                row
            })
            .collect();
        let (rows, pivots) = rref_rows(aug, 2 * d);
        if pivots.len() < d || pivots[d - 1] >= d {
            return Err(Error::Numeric("singular matrix".into()));
        }
        Ok(MatrixExact::from_fn(d, d, |r, c| rows[r][d + c].clone()))
    }

    /// Solve `self · x = b` for a single right-hand side; `None` if inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vector>> {
        if b.len() != self.rows {
            return Err(dim_err("right-hand side length"));
        }
        let aug: Vec<Vector> = (0..self.rows)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.push(b[r].clone());
                row
            })
            .collect();
        let (rows, pivots) = rref_rows(aug, self.cols + 1);
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = rows[r][self.cols].clone();
        }
        Ok(Some(x))
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.is_square() && *self == self.adjoint()
    }

    pub fn is_unitary(&self) -> bool {
        self.is_square()
            && self.adjoint().mul(self).map(|p| p == MatrixExact::identity(self.rows)).unwrap_or(false)
    }
}

/// `dim im(M) / d` for a `d×d` matrix.
pub fn normalized_rank(m: &MatrixExact, d: usize) -> Result<Rational64> {
    if !m.is_square() || m.rows() != d {
        return Err(dim_err(format!("expected {d}x{d}, got {}x{}", m.rows(), m.cols())));
    }
    if d == 0 {
        return Err(dim_err("zero dimension"));
    }
    Ok(Rational64::new(m.rank() as i64, d as i64))
}

/// In-place RREF over row vectors. Pivot rows are chosen by smallest bit length.
pub(crate) fn rref_rows(mut rows: Vec<Vector>, cols: usize) -> (Vec<Vector>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut top = 0;
    for c in 0..cols {
        if top == rows.len() {
            break;
        }
        let mut best: Option<(usize, u64)> = None;
        for (r, row) in rows.iter().enumerate().skip(top) {
            if !row[c].is_zero() {
                let bl = row[c].bit_len();
                if best.is_none_or(|(_, b)| bl < b) {
                    best = Some((r, bl));
                }
            }
        }
        let Some((pr, _)) = best else { continue };
        rows.swap(top, pr);
        let inv = rows[top][c].inv().expect("nonzero pivot");
        if !inv.is_one() {
            for x in rows[top][c..].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let nz: Vec<usize> = (c..cols).filter(|&j| !rows[top][j].is_zero()).collect();
        let pivot_row = std::mem::take(&mut rows[top]);
        for (r, row) in rows.iter_mut().enumerate() {
            if r == top || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                let t = &f * &pivot_row[j];
                row[j] -= &t;
            }
        }
        rows[top] = pivot_row;
        pivots.push(c);
        top += 1;
    }
    rows.truncate(top);
    (rows, pivots)
}

fn kernel_from_rref(rows: &[Vector], pivots: &[usize], cols: usize) -> Vec<Vector> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Scalar::zero(); cols];
            v[f] = Scalar::one();
            for (r, &p) in pivots.iter().enumerate() {
                if !rows[r][f].is_zero() {
                    v[p] = -&rows[r][f];
                }
            }
            v
        })
        .collect()
}

/// Result of offering a vector to an [`Echelon`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insert {
    /// Independent; stored as accepted vector number `.0`.
    New(usize),
    /// Dependent; coordinates with respect to the accepted vectors.
    Dependent(Vector),
}

/// Incrementally grown semi-echelon basis.
///
/// Each stored row is zero at the pivots of all other rows and has a unit
/// pivot. Rows also remember their expression in the accepted input vectors,
/// so dependent inputs come back with coordinates.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
    combos: Vec<Vector>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon { cols, rows: Vec::new(), pivots: Vec::new(), combos: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// `v` minus its component in the row space, plus the multipliers used.
    fn reduce_with(&self, v: &[Scalar]) -> (Vector, Vec<Scalar>) {
        let mut r = v.to_vec();
        let mut mult = vec![Scalar::zero(); self.rows.len()];
        for (k, (row, &p)) in self.rows.iter().zip(&self.pivots).enumerate() {
            if r[p].is_zero() {
                continue;
            }
            let a = r[p].clone();
            axpy(&mut r, &-a.clone(), row);
            mult[k] = a;
        }
        (r, mult)
    }

    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        self.reduce_with(v).0
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    fn combo_of(&self, mult: &[Scalar], extra: usize) -> Vector {
        let mut c = vec![Scalar::zero(); self.rows.len() + extra];
        for (a, combo) in mult.iter().zip(&self.combos) {
            axpy(&mut c[..combo.len()], a, combo);
        }
        c
    }

    /// Coordinates of `v` in the accepted vectors, if `v` lies in their span.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        let (r, mult) = self.reduce_with(v);
        is_zero_vec(&r).then(|| self.combo_of(&mult, 0))
    }

    pub fn insert(&mut self, v: &[Scalar]) -> Insert {
        debug_assert_eq!(v.len(), self.cols);
        let (mut r, mult) = self.reduce_with(v);
        if is_zero_vec(&r) {
            return Insert::Dependent(self.combo_of(&mult, 0));
        }
        let p = (0..self.cols)
            .filter(|&j| !r[j].is_zero())
            .min_by_key(|&j| r[j].bit_len())
            .expect("nonzero remainder");
        let idx = self.rows.len();
        // r = v − Σ mult_k row_k, so r ↦ e_idx − Σ mult_k combo_k
        let mut combo = self.combo_of(&mult, 1);
        for x in combo.iter_mut() {
            *x = -&*x;
        }
        combo[idx] = Scalar::one();
        let inv = r[p].inv().expect("nonzero pivot");
        for x in r.iter_mut().chain(combo.iter_mut()) {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        // keep other rows zero at the new pivot
        for k in 0..self.rows.len() {
            if self.rows[k][p].is_zero() {
                continue;
            }
            let a = -self.rows[k][p].clone();
            axpy(&mut self.rows[k], &a, &r);
            self.combos[k].push(Scalar::zero());
            axpy(&mut self.combos[k], &a, &combo);
        }
        for c in self.combos.iter_mut() {
            c.resize(idx + 1, Scalar::zero());
        }
        self.rows.push(r);
        self.pivots.push(p);
        self.combos.push(combo);
        Insert::New(idx)
    }

    pub fn to_subspace(&self) -> Subspace {
        Subspace::from_vectors(self.cols, self.rows.clone()).expect("consistent lengths")
    }
}

/// A linear subspace of `ℂ^ambient`, stored as the RREF of a spanning set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in C^{}, pivots {:?})", self.dim(), self.ambient, self.pivots)
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient).map(|k| unit_vector(ambient, k)).collect(),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn from_vectors(ambient: usize, vecs: Vec<Vector>) -> Result<Self> {
        if vecs.iter().any(|v| v.len() != ambient) {
            return Err(dim_err(format!("vector length differs from ambient {ambient}")));
        }
        let (basis, pivots) = rref_rows(vecs, ambient);
        Ok(Subspace { ambient, basis, pivots })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis rows as a `dim × ambient` matrix.
    pub fn basis_matrix(&self) -> MatrixExact {
        MatrixExact::from_fn(self.dim(), self.ambient, |r, c| self.basis[r][c].clone())
    }

    fn check(&self, o: &Subspace) -> Result<()> {
        if self.ambient != o.ambient {
            return Err(dim_err(format!("ambient {} vs {}", self.ambient, o.ambient)));
        }
        Ok(())
    }

    /// Residual of `v` after eliminating against the echelon basis.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !w[p].is_zero() {
                let f = -&w[p];
                axpy(&mut w, &f, row);
            }
        }
        w
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        v.len() == self.ambient && is_zero_vec(&self.reduce(v))
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn is_subspace_of(&self, o: &Subspace) -> bool {
        self.ambient == o.ambient && self.basis.iter().all(|b| o.contains(b))
    }

    pub fn sum(&self, o: &Subspace) -> Result<Subspace> {
        self.check(o)?;
        let mut vecs = self.basis.clone();
        vecs.extend(o.basis.iter().cloned());
        Subspace::from_vectors(self.ambient, vecs)
    }

    /// Add vectors to the span.
    pub fn extend(&self, vecs: Vec<Vector>) -> Result<Subspace> {
        let mut all = self.basis.clone();
        all.extend(vecs);
        Subspace::from_vectors(self.ambient, all)
    }

    /// Rows `c` with `c·x = 0 ⇔ x ∈ self` (bilinear pairing, no conjugation).
    pub fn annihilator(&self) -> MatrixExact {
        let k = kernel_from_rref(&self.basis, &self.pivots, self.ambient);
        MatrixExact::from_fn(k.len(), self.ambient, |r, c| k[r][c].clone())
    }

    pub fn intersect(&self, o: &Subspace) -> Result<Subspace> {
        self.check(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Subspace::zero(self.ambient));
        }
        let (a, b) = (self.annihilator(), o.annihilator());
        Ok(MatrixExact::stack(&[&a, &b])?.kernel())
    }

    /// Orthogonal complement under the Hermitian inner product.
    pub fn orth_complement(&self) -> Subspace {
        let k = kernel_from_rref(&self.basis, &self.pivots, self.ambient);
        Subspace::from_vectors(self.ambient, k.into_iter().map(|v| v.iter().map(Scalar::conj).collect()).collect())
            .expect("same ambient")
    }

    /// Orthogonal projection of `v`, computed through the Gram system (no square roots).
    pub fn project_onto(&self, v: &[Scalar]) -> Result<Vector> {
        if v.len() != self.ambient {
            return Err(dim_err("projecting a vector of the wrong length"));
        }
        if self.is_zero() {
            return Ok(vec![Scalar::zero(); self.ambient]);
        }
        let k = self.dim();
        let gram = MatrixExact::from_fn(k, k, |a, b| inner(&self.basis[a], &self.basis[b]));
        let rhs: Vector = self.basis.iter().map(|b| inner(b, v)).collect();
        let z = gram.solve(&rhs)?.ok_or_else(|| Error::Numeric("singular Gram matrix".into()))?;
        let mut out = vec![Scalar::zero(); self.ambient];
        for (za, b) in z.iter().zip(&self.basis) {
            axpy(&mut out, za, b);
        }
        Ok(out)
    }

    /// The `d×d` orthogonal projector `B^T (conj(B) B^T)^{-1} conj(B)`.
    pub fn projector(&self) -> Result<MatrixExact> {
        if self.is_zero() {
            return Ok(MatrixExact::zeros(self.ambient, self.ambient));
        }
        let b = self.basis_matrix();
        let bc = b.conj();
        let gram = bc.mul(&b.transpose())?;
        b.transpose().mul(&gram.inverse()?)?.mul(&bc)
    }

    /// Whether every vector of `self` is orthogonal to every vector of `o`.
    pub fn is_orthogonal_to(&self, o: &Subspace) -> bool {
        self.basis.iter().all(|a| o.basis.iter().all(|b| inner(a, b).is_zero()))
    }
}

/// `{v : Mv ∈ S}`.
pub fn preimage(m: &MatrixExact, s: &Subspace) -> Result<Subspace> {
    if m.rows() != s.ambient_dim() {
        return Err(dim_err("preimage target dimension"));
    }
    if s.dim() == s.ambient_dim() {
        return Ok(Subspace::full(m.cols()));
    }
    Ok(s.annihilator().mul(m)?.kernel())
}

/// `S ∩ span(vs)^⊥`, by successive hyperplane cuts inside `S`.
pub fn restrict_orthogonal(s: &Subspace, vs: &[Vector]) -> Result<Subspace> {
    let mut rows: Vec<Vector> = s.basis().to_vec();
    for v in vs {
        if v.len() != s.ambient_dim() {
            return Err(dim_err("restriction vector length"));
        }
        let a: Vec<Scalar> = rows.iter().map(|b| inner(v, b)).collect();
        let Some(k0) = (0..rows.len()).filter(|&k| !a[k].is_zero()).min_by_key(|&k| a[k].bit_len()) else {
            continue;
        };
        let pivot = rows.swap_remove(k0);
        let ap = a[k0].clone();
        let mut a = a;
        a.swap_remove(k0);
        for (row, ak) in rows.iter_mut().zip(&a) {
            if !ak.is_zero() {
                axpy(row, &-(ak / &ap), &pivot);
            }
        }
    }
    Subspace::from_vectors(s.ambient_dim(), rows)
}

pub fn kernel(m: &MatrixExact) -> Subspace {
    m.kernel()
}

pub fn image(m: &MatrixExact) -> Subspace {
    m.image()
}

pub fn intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.intersect(b)
}

pub fn orth_complement(s: &Subspace) -> Subspace {
    s.orth_complement()
}

pub fn project_onto(s: &Subspace, v: &[Scalar]) -> Result<Vector> {
    s.project_onto(v)
}

/// JSON form: `{"rows":r,"cols":c,"entries":[["p/q","r/s"],...]}`, entries row-major.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(String, String)>,
}

impl From<&MatrixExact> for MatrixJson {
    fn from(m: &MatrixExact) -> Self {
        MatrixJson { rows: m.rows, cols: m.cols, entries: m.data.iter().map(Scalar::to_pair_strings).collect() }
    }
}

impl TryFrom<&MatrixJson> for MatrixExact {
    type Error = Error;
    fn try_from(j: &MatrixJson) -> Result<Self> {
        let data = j.entries.iter().map(|(a, b)| Scalar::parse_pair(a, b)).collect::<Result<Vec<_>>>()?;
        MatrixExact::from_entries(j.rows, j.cols, data)
    }
}

impl Serialize for MatrixExact {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixExact {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        MatrixExact::try_from(&j).map_err(serde::de::Error::custom)
    }
}
