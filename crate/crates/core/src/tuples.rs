//! Matrix tuples, the rank metric on them, adjoint closure, and
//! r-commutativity.

use std::collections::HashMap;
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::float::{MatrixFloat, MatrixFloatJson};
use crate::linalg::{normalized_rank, MatrixExact, MatrixJson, Subspace, Vector};
use crate::polyring::{monomials_of_degree, Monomial, MAX_VARS};

/// Structural promise a caller makes about each matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    Unitary,
    SelfAdjoint,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            _ => Err(Error::Parse(format!("unknown backend `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Mats {
    Exact(Vec<MatrixExact>),
    Float(Vec<MatrixFloat>),
}

/// An n-tuple of d×d matrices on one backend, flags verified at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    d: usize,
    flags: Vec<Flag>,
    mats: Mats,
}

impl MatrixTuple {
    pub fn new(mats: Vec<MatrixExact>, flags: Vec<Flag>) -> Result<Self> {
        let d = check_shapes(mats.iter().map(|m| (m.rows(), m.cols())), flags.len())?;
        for (k, (m, f)) in mats.iter().zip(&flags).enumerate() {
            let ok = match f {
                Flag::Unitary => m.is_unitary(),
                Flag::SelfAdjoint => m.is_self_adjoint(),
                Flag::General => true,
            };
            if !ok {
                return Err(Error::Construction(format!("matrix {k} is not {f:?}")));
            }
        }
        Ok(MatrixTuple { d, flags, mats: Mats::Exact(mats) })
    }

    /// Tuple with every matrix flagged general.
    pub fn general(mats: Vec<MatrixExact>) -> Result<Self> {
        let flags = vec![Flag::General; mats.len()];
        MatrixTuple::new(mats, flags)
    }

    /// Float tuple; flags are verified to `tol` relative to the matrix norm.
    pub fn new_float(mats: Vec<MatrixFloat>, flags: Vec<Flag>) -> Result<Self> {
        let d = check_shapes(mats.iter().map(|m| (m.rows(), m.cols())), flags.len())?;
        for (k, (m, f)) in mats.iter().zip(&flags).enumerate() {
            let a = m.data();
            let scale = m.frobenius_norm().max(1.0);
            let dev = match f {
                Flag::Unitary => (a.adjoint() * a - nalgebra::DMatrix::identity(d, d)).norm(),
                Flag::SelfAdjoint => (a.adjoint() - a).norm(),
                Flag::General => 0.0,
            };
            if !dev.is_finite() || dev > m.tol().max(1e-12) * scale * (d as f64).max(1.0) {
                return Err(Error::Construction(format!("matrix {k} is not {f:?} (deviation {dev:.3e})")));
            }
        }
        Ok(MatrixTuple { d, flags, mats: Mats::Float(mats) })
    }

    pub fn n(&self) -> usize {
        self.flags.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn backend(&self) -> Backend {
        match self.mats {
            Mats::Exact(_) => Backend::Exact,
            Mats::Float(_) => Backend::Float,
        }
    }

    /// Exact matrices; an error on the float backend.
    pub fn exact(&self) -> Result<&[MatrixExact]> {
        match &self.mats {
            Mats::Exact(m) => Ok(m),
            Mats::Float(_) => Err(Error::Config("operation requires the exact backend".into())),
        }
    }

    pub fn float_mats(&self) -> Option<&[MatrixFloat]> {
        match &self.mats {
            Mats::Float(m) => Some(m),
            Mats::Exact(_) => None,
        }
    }

    pub fn to_float(&self, tol: f64) -> MatrixTuple {
        let mats = match &self.mats {
            Mats::Exact(m) => m.iter().map(|a| MatrixFloat::from_exact(a, tol)).collect(),
            Mats::Float(m) => m.iter().map(|a| a.clone().with_tol(tol)).collect(),
        };
        MatrixTuple { d: self.d, flags: self.flags.clone(), mats: Mats::Float(mats) }
    }

    /// The first `k` matrices.
    pub fn truncate(&self, k: usize) -> MatrixTuple {
        let mats = match &self.mats {
            Mats::Exact(m) => Mats::Exact(m[..k].to_vec()),
            Mats::Float(m) => Mats::Float(m[..k].to_vec()),
        };
        MatrixTuple { d: self.d, flags: self.flags[..k].to_vec(), mats }
    }

    /// Whether every `M_i^*` occurs in the tuple.
    pub fn is_star_closed(&self) -> Result<bool> {
        let m = self.exact()?;
        Ok(m.iter().all(|a| {
            let s = a.adjoint();
            m.contains(&s)
        }))
    }
}

fn check_shapes(shapes: impl Iterator<Item = (usize, usize)>, nflags: usize) -> Result<usize> {
    let shapes: Vec<_> = shapes.collect();
    if shapes.len() != nflags {
        return Err(dim_err(format!("{} matrices but {} flags", shapes.len(), nflags)));
    }
    if shapes.is_empty() {
        return Err(Error::Argument("a tuple needs at least one matrix".into()));
    }
    if shapes.len() > MAX_VARS {
        return Err(Error::Argument(format!("at most {MAX_VARS} matrices per tuple")));
    }
    let d = shapes[0].0;
    if shapes.iter().any(|&(r, c)| r != d || c != d) {
        return Err(dim_err("tuple matrices must all be d×d"));
    }
    Ok(d)
}

/// A word `α(1)…α(q)` in the letters `0..n`; evaluates to `M_{α(1)} ⋯ M_{α(q)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sorted canonical rearrangement of the letters.
    pub fn sorted(&self) -> Word {
        let mut v = self.0.clone();
        v.sort_unstable();
        Word(v)
    }
}

fn float_scale(a: &MatrixFloat, b: &MatrixFloat) -> f64 {
    a.frobenius_norm() * b.frobenius_norm()
}

fn float_normalized_rank(m: &MatrixFloat, scale: f64, d: usize) -> Result<Rational64> {
    Ok(Rational64::new(m.numerical_rank_scaled(scale)? as i64, d as i64))
}

/// `max_{i,j} rank([A_i, A_j]) / d`.
pub fn commutator_defect(t: &MatrixTuple) -> Result<Rational64> {
    let mut best = Rational64::from_integer(0);
    match &t.mats {
        Mats::Exact(m) => {
            for i in 0..m.len() {
                for j in i + 1..m.len() {
                    best = best.max(normalized_rank(&m[i].commutator(&m[j])?, t.d)?);
                }
            }
        }
        Mats::Float(m) => {
            for i in 0..m.len() {
                for j in i + 1..m.len() {
                    let c = m[i].commutator(&m[j])?;
                    best = best.max(float_normalized_rank(&c, float_scale(&m[i], &m[j]), t.d)?);
                }
            }
        }
    }
    Ok(best)
}

/// `max_i rank(A_i − B_i) / d`.
pub fn rank_distance(a: &MatrixTuple, b: &MatrixTuple) -> Result<Rational64> {
    if a.n() != b.n() || a.d() != b.d() {
        return Err(dim_err("rank distance between tuples of different shape"));
    }
    let mut best = Rational64::from_integer(0);
    match (&a.mats, &b.mats) {
        (Mats::Exact(x), Mats::Exact(y)) => {
            for (p, q) in x.iter().zip(y) {
                best = best.max(normalized_rank(&p.sub(q)?, a.d)?);
            }
        }
        (Mats::Float(x), Mats::Float(y)) => {
            for (p, q) in x.iter().zip(y) {
                let scale = p.frobenius_norm().max(q.frobenius_norm());
                best = best.max(float_normalized_rank(&p.sub(q)?, scale, a.d)?);
            }
        }
        _ => return Err(Error::Config("rank distance across backends".into())),
    }
    Ok(best)
}

/// Append `M_i^*` for every matrix whose adjoint is not already present.
///
/// The result starts with the original matrices in order.
pub fn star_close(t: &MatrixTuple) -> Result<MatrixTuple> {
    Ok(star_close_with_origin(t)?.0)
}

/// Like [`star_close`], also returning for each output matrix the index of the
/// input matrix it was derived from.
pub fn star_close_with_origin(t: &MatrixTuple) -> Result<(MatrixTuple, Vec<usize>)> {
    let mut origin: Vec<usize> = (0..t.n()).collect();
    let mut flags = t.flags.clone();
    let mats = match &t.mats {
        Mats::Exact(m) => {
            let mut out = m.clone();
            for (k, a) in m.iter().enumerate() {
                if t.flags[k] == Flag::SelfAdjoint {
                    continue;
                }
                let s = a.adjoint();
                if !out.contains(&s) {
                    out.push(s);
                    origin.push(k);
                    flags.push(t.flags[k]);
                }
            }
            Mats::Exact(out)
        }
        Mats::Float(m) => {
            let mut out = m.clone();
            for (k, a) in m.iter().enumerate() {
                if t.flags[k] == Flag::SelfAdjoint {
                    continue;
                }
                let s = a.adjoint();
                let present = out.iter().any(|b| b.sub(&s).map(|x| x.frobenius_norm() == 0.0).unwrap_or(false));
                if !present {
                    out.push(s);
                    origin.push(k);
                    flags.push(t.flags[k]);
                }
            }
            Mats::Float(out)
        }
    };
    if flags.len() > MAX_VARS {
        return Err(Error::Argument(format!("adjoint closure exceeds {MAX_VARS} matrices")));
    }
    Ok((MatrixTuple { d: t.d, flags, mats }, origin))
}

/// `M_{α(1)} ⋯ M_{α(q)} w` (the last letter acts first).
pub fn evaluate_word(t: &MatrixTuple, w: &[crate::scalar::Scalar], alpha: &Word) -> Result<Vector> {
    let m = t.exact()?;
    if w.len() != t.d {
        return Err(dim_err("word evaluation vector length"));
    }
    if alpha.0.iter().any(|&l| l >= t.n()) {
        return Err(Error::Argument("word letter out of range".into()));
    }
    let mut v = w.to_vec();
    for &l in alpha.0.iter().rev() {
        v = m[l].matvec_unchecked(&v);
    }
    Ok(v)
}

/// Memoized evaluation of sorted canonical words `c(m)` at a fixed vector.
///
/// `c(1) = w` and `c(m) = M_k c(m / X_k)` with `k` the smallest variable of `m`,
/// which is exactly the sorted word `X_{α(1)} ⋯ X_{α(q)}`, `α` non-decreasing.
pub struct SortedEvaluator<'a> {
    mats: &'a [MatrixExact],
    cache: HashMap<Monomial, Vector>,
}

impl<'a> SortedEvaluator<'a> {
    pub fn new(mats: &'a [MatrixExact], w: Vector) -> Self {
        let mut cache = HashMap::new();
        cache.insert(Monomial::one(mats.len()), w);
        SortedEvaluator { mats, cache }
    }

    pub fn eval(&mut self, m: &Monomial) -> &Vector {
        if !self.cache.contains_key(m) {
            let k = m.min_var().expect("the unit monomial is seeded");
            let rest = m.div_var(k).expect("variable occurs");
            let inner = self.eval(&rest).clone();
            let v = self.mats[k].matvec_unchecked(&inner);
            self.cache.insert(*m, v);
        }
        &self.cache[m]
    }
}

/// Whether every word of length ≤ r at `v` agrees with its sorted rearrangement.
///
/// Checked through the equivalent recursion `M_i c(m) = c(X_i m)` for all
/// `deg m ≤ r − 1`, which avoids enumerating words.
pub fn is_r_commutative_at(t: &MatrixTuple, v: &[crate::scalar::Scalar], r: usize) -> Result<bool> {
    let m = t.exact()?;
    if v.len() != t.d {
        return Err(dim_err("vector length"));
    }
    if r <= 1 || t.n() <= 1 {
        return Ok(true);
    }
    let mut ev = SortedEvaluator::new(m, v.to_vec());
    for deg in 0..r as u32 {
        for mono in monomials_of_degree(t.n(), deg) {
            let base = ev.eval(&mono).clone();
            for (i, mi) in m.iter().enumerate() {
                // i ≤ min var gives the sorted word itself
                if mono.min_var().is_none_or(|k| i <= k) {
                    continue;
                }
                let lhs = mi.matvec_unchecked(&base);
                if &lhs != ev.eval(&mono.mul_var(i)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// r-commutativity at every vector of `s`, checked on its basis.
pub fn is_r_commutative_on(t: &MatrixTuple, s: &Subspace, r: usize) -> Result<bool> {
    for b in s.basis() {
        if !is_r_commutative_at(t, b, r)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A subspace on which the tuple is r-commutative.
///
/// Starts from the joint kernel of all commutators and repeatedly restricts to
/// `S ∩ ⋂_i M_i^{-1}(S)`; after `k` restrictions the result is `(k+2)`-commutative.
/// Stops on stabilization or after `budget` restrictions (default `r`).
pub fn r_commutative_core(t: &MatrixTuple, r: usize, budget: Option<usize>) -> Result<Subspace> {
    if r < 2 {
        return Err(Error::Argument("commutative core needs r ≥ 2".into()));
    }
    let m = t.exact()?;
    let d = t.d;
    if m.len() <= 1 {
        return Ok(Subspace::full(d));
    }
    let mut comms = Vec::new();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            comms.push(m[i].commutator(&m[j])?);
        }
    }
    let refs: Vec<&MatrixExact> = comms.iter().collect();
    let mut s = MatrixExact::stack(&refs)?.kernel();
    let steps = budget.unwrap_or(r).min(r - 2);
    for _ in 0..steps {
        let c = s.annihilator();
        if c.rows() == 0 || s.is_zero() {
            break;
        }
        let prods: Vec<MatrixExact> = m.iter().map(|mi| c.mul(mi)).collect::<Result<_>>()?;
        let mut parts: Vec<&MatrixExact> = vec![&c];
        parts.extend(prods.iter());
        let next = MatrixExact::stack(&parts)?.kernel();
        if next.dim() == s.dim() {
            break;
        }
        s = next;
    }
    Ok(s)
}

/// Serialized tuple: `{"n", "d", "flags", "mats"}`, matrices in their own formats.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TupleJson {
    pub n: usize,
    pub d: usize,
    pub flags: Vec<Flag>,
    pub mats: MatsJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatsJson {
    Exact(Vec<MatrixJson>),
    Float(Vec<MatrixFloatJson>),
}

impl From<&MatrixTuple> for TupleJson {
    fn from(t: &MatrixTuple) -> Self {
        let mats = match &t.mats {
            Mats::Exact(m) => MatsJson::Exact(m.iter().map(MatrixJson::from).collect()),
            Mats::Float(m) => MatsJson::Float(m.iter().map(MatrixFloatJson::from).collect()),
        };
        TupleJson { n: t.n(), d: t.d, flags: t.flags.clone(), mats }
    }
}

impl TryFrom<&TupleJson> for MatrixTuple {
    type Error = Error;
    fn try_from(j: &TupleJson) -> Result<Self> {
        let t = match &j.mats {
            MatsJson::Exact(m) => {
                let mats = m.iter().map(MatrixExact::try_from).collect::<Result<Vec<_>>>()?;
                MatrixTuple::new(mats, j.flags.clone())?
            }
            MatsJson::Float(m) => {
                let mats = m.iter().map(MatrixFloat::try_from).collect::<Result<Vec<_>>>()?;
                MatrixTuple::new_float(mats, j.flags.clone())?
            }
        };
        if t.n() != j.n || t.d() != j.d {
            return Err(dim_err("tuple header disagrees with its matrices"));
        }
        Ok(t)
    }
}

impl Serialize for MatrixTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TupleJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixTuple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = TupleJson::deserialize(d)?;
        MatrixTuple::try_from(&j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unit_vector;
    use crate::scalar::Scalar;

    fn diag(v: &[i64]) -> MatrixExact {
        MatrixExact::diagonal(&v.iter().map(|&x| Scalar::from_int(x)).collect::<Vec<_>>())
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    /// D and D + e_0 e_1^T on ℂ^16 with distinct diagonal entries.
    fn bumped_pair() -> MatrixTuple {
        let d: Vec<i64> = (1..=16).collect();
        let a = diag(&d);
        let mut b = diag(&d.iter().map(|x| 2 * x).collect::<Vec<_>>());
        b.set(0, 1, Scalar::one());
        MatrixTuple::general(vec![a, b]).unwrap()
    }

    #[test]
    fn commutator_defect_examples() {
        let t = MatrixTuple::general(vec![diag(&[1, 2, 3]), diag(&[0, 5, -1])]).unwrap();
        assert_eq!(commutator_defect(&t).unwrap(), r(0, 1));
        let single = MatrixTuple::general(vec![MatrixExact::from_ints(&[&[0, 1], &[2, 3]])]).unwrap();
        assert_eq!(commutator_defect(&single).unwrap(), r(0, 1));
    }

    #[test]
    fn bump_commutator_has_rank_two() {
        // [D, D'] for a rank-one bump e_0 x^T with x having two nonzero entries
        let d: Vec<i64> = (1..=16).collect();
        let a = diag(&d);
        let mut b = a.clone();
        b.set(0, 1, Scalar::one());
        b.set(0, 2, Scalar::one());
        // [A, B] = A E − E A has entries (0,1) and (0,2): rank 1 on one row ...
        let t = MatrixTuple::general(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(commutator_defect(&t).unwrap(), r(1, 16));
        // ... while a rank-one bump (e_0 + e_1)(e_2 + e_3)^T gives [D, uv^T] = (Du)v^T − u(Dv)^T of rank 2
        let mut c = a.clone();
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            c.set(i, j, Scalar::one());
        }
        assert_eq!(c.sub(&a).unwrap().rank(), 1);
        let t = MatrixTuple::general(vec![a, c]).unwrap();
        assert_eq!(commutator_defect(&t).unwrap(), r(1, 8));
    }

    #[test]
    fn rank_distance_examples() {
        let t = bumped_pair();
        assert_eq!(rank_distance(&t, &t).unwrap(), r(0, 1));
        let base = MatrixExact::identity(12);
        let mut pert = base.clone();
        for k in 0..3 {
            pert.set(k, 11 - k, Scalar::from_int(k as i64 + 1));
        }
        let a = MatrixTuple::general(vec![base.clone(), base.clone()]).unwrap();
        let b = MatrixTuple::general(vec![base, pert]).unwrap();
        assert_eq!(rank_distance(&a, &b).unwrap(), r(1, 4));
    }

    #[test]
    fn star_close_examples() {
        let s = MatrixExact::from_ints(&[&[2, 1], &[1, 0]]);
        let t = MatrixTuple::new(vec![s.clone(), diag(&[1, 3])], vec![Flag::SelfAdjoint; 2]).unwrap();
        assert_eq!(star_close(&t).unwrap(), t);
        let u = MatrixExact::from_ints(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        let t = MatrixTuple::new(vec![u.clone()], vec![Flag::Unitary]).unwrap();
        let c = star_close(&t).unwrap();
        assert_eq!(c.exact().unwrap(), &[u.clone(), u.transpose()]);
        assert!(c.is_star_closed().unwrap());
        // idempotent
        assert_eq!(star_close(&c).unwrap(), c);
    }

    #[test]
    fn flags_are_verified() {
        let m = MatrixExact::from_ints(&[&[1, 1], &[0, 1]]);
        assert!(matches!(MatrixTuple::new(vec![m.clone()], vec![Flag::Unitary]), Err(Error::Construction(_))));
        assert!(matches!(MatrixTuple::new(vec![m], vec![Flag::SelfAdjoint]), Err(Error::Construction(_))));
        let bad = MatrixTuple::general(vec![MatrixExact::identity(2), MatrixExact::identity(3)]);
        assert!(matches!(bad, Err(Error::Dimension(_))));
    }

    #[test]
    fn r_commutativity_examples() {
        let swap = MatrixExact::from_ints(&[&[0, 1], &[1, 0]]);
        let t = MatrixTuple::general(vec![swap, diag(&[1, 2])]).unwrap();
        let e1 = unit_vector(2, 0);
        assert!(!is_r_commutative_at(&t, &e1, 2).unwrap());
        assert!(is_r_commutative_at(&t, &e1, 1).unwrap());
        assert!(is_r_commutative_at(&t, &e1, 0).unwrap());
        let c = MatrixTuple::general(vec![diag(&[1, 2]), diag(&[3, 4])]).unwrap();
        assert!(is_r_commutative_at(&c, &[Scalar::one(), Scalar::from_int(7)], 6).unwrap());
    }

    #[test]
    fn empty_word_is_identity() {
        let t = bumped_pair();
        let v: Vec<Scalar> = (0..16).map(|k| Scalar::from_frac(k, 3)).collect();
        assert_eq!(evaluate_word(&t, &v, &Word::empty()).unwrap(), v);
    }

    #[test]
    fn core_examples() {
        let c = MatrixTuple::general(vec![diag(&[1, 2, 3]), diag(&[3, 4, 4])]).unwrap();
        assert_eq!(r_commutative_core(&c, 4, None).unwrap(), Subspace::full(3));
        let one = MatrixTuple::general(vec![MatrixExact::from_ints(&[&[0, 1], &[0, 0]])]).unwrap();
        assert_eq!(r_commutative_core(&one, 5, None).unwrap(), Subspace::full(2));
        let t = bumped_pair();
        let s = r_commutative_core(&t, 3, None).unwrap();
        assert!(s.dim() >= 13, "core dim {}", s.dim());
        assert!(is_r_commutative_on(&t, &s, 3).unwrap());
    }

    #[test]
    fn json_roundtrip() {
        let t = bumped_pair();
        let s = serde_json::to_string(&t).unwrap();
        let back: MatrixTuple = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let f = t.to_float(1e-10);
        let back: MatrixTuple = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back.backend(), Backend::Float);
        assert_eq!(commutator_defect(&back).unwrap(), commutator_defect(&t).unwrap());
    }
}
