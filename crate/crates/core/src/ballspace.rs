//! Ballspaces `B(w, R)`: spans of all word evaluations of length ≤ R at a root,
//! their vanishing ideals, and the regularity check that identifies a ball with
//! the degree-≤R slice of a polynomial quotient.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::linalg::{is_zero_vec, Echelon, Insert, MatrixExact, Subspace, Vector};
use crate::polyring::{monomials_up_to, FiltrationDims, Ideal, Monomial, Poly};
use crate::scalar::Scalar;
use crate::tuples::{is_r_commutative_at, MatrixTuple, SortedEvaluator};

/// The ball `B(w, R)` with a monomial-labelled basis.
#[derive(Clone, Debug)]
pub struct BallSpace {
    root: Vector,
    radius: u32,
    nvars: usize,
    span: Subspace,
    layer_dims: Vec<usize>,
    labels: Vec<Monomial>,
    label_vectors: Vec<Vector>,
    relations: Vec<Poly>,
    basis: Echelon,
}

impl BallSpace {
    pub fn root(&self) -> &[Scalar] {
        &self.root
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Span of all words of length ≤ R applied to the root.
    pub fn span(&self) -> &Subspace {
        &self.span
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    /// `layer_dims[k] = dim B(w, k)` for `k ≤ R`.
    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    /// Monomials `b` whose sorted-word vectors `c(b)` form the chosen basis,
    /// ascending in grevlex.
    pub fn labels(&self) -> &[Monomial] {
        &self.labels
    }

    pub fn label_vectors(&self) -> &[Vector] {
        &self.label_vectors
    }

    /// Coordinates of `v` in the label basis, if `v` lies in the sorted-word span.
    pub fn label_coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        self.basis.coordinates(v)
    }

    /// `Σ_b coeffs[b]·c(b)`.
    pub fn combine_labels(&self, coeffs: &[Scalar]) -> Vector {
        let mut out = vec![Scalar::zero(); self.root.len()];
        for (c, v) in coeffs.iter().zip(&self.label_vectors) {
            crate::linalg::axpy(&mut out, c, v);
        }
        out
    }
}

/// Basis `{f : deg f ≤ R, f(M)(w) = 0}` of the relation space, one relation per
/// non-label monomial `m`, of the form `m − Σ c_b b` over smaller labels.
#[derive(Clone, Debug)]
pub struct VanishingRelations {
    pub radius: u32,
    pub relations: Vec<Poly>,
}

/// Build `B(w, R)`: the all-words span, plus labels chosen greedily among the
/// sorted-word vectors `c(m)` in grevlex order.
pub fn build_ball(t: &MatrixTuple, w: &[Scalar], r: u32) -> Result<BallSpace> {
    let mats = t.exact()?;
    let d = t.d();
    if w.len() != d {
        return Err(dim_err("ball root length"));
    }
    if is_zero_vec(w) {
        return Err(Error::Argument("ball root must be nonzero".into()));
    }
    let n = t.n();

    // all-words closure, layer by layer
    let mut span = Echelon::new(d);
    span.insert(w);
    let mut frontier = vec![w.to_vec()];
    let mut layer_dims = vec![1usize];
    for _ in 0..r {
        let mut next = Vec::new();
        if span.rank() < d {
            for f in &frontier {
                for m in mats {
                    let v = m.matvec_unchecked(f);
                    if let Insert::New(_) = span.insert(&v) {
                        next.push(v);
                    }
                }
            }
        }
        layer_dims.push(span.rank());
        frontier = next;
    }

    // sorted-word labels and relations
    let mut ev = SortedEvaluator::new(mats, w.to_vec());
    let mut basis = Echelon::new(d);
    let mut labels = Vec::new();
    let mut label_vectors = Vec::new();
    let mut relations = Vec::new();
    for m in monomials_up_to(n, r) {
        let v = ev.eval(&m).clone();
        match basis.insert(&v) {
            Insert::New(_) => {
                labels.push(m);
                label_vectors.push(v);
            }
            Insert::Dependent(coords) => {
                let mut terms = vec![(m, Scalar::one())];
                for (b, c) in labels.iter().zip(coords) {
                    if !c.is_zero() {
                        terms.push((*b, -c));
                    }
                }
                relations.push(Poly::from_terms(n, terms));
            }
        }
    }

    Ok(BallSpace {
        root: w.to_vec(),
        radius: r,
        nvars: n,
        span: span.to_subspace(),
        layer_dims,
        labels,
        label_vectors,
        relations,
        basis,
    })
}

/// Span of all words of length ≤ `r` applied to `w` (no labels, no relations).
pub fn words_span(t: &MatrixTuple, w: &[Scalar], r: u32) -> Result<Subspace> {
    let mats = t.exact()?;
    let d = t.d();
    if w.len() != d {
        return Err(dim_err("ball root length"));
    }
    let mut span = Echelon::new(d);
    if is_zero_vec(w) {
        return Ok(span.to_subspace());
    }
    span.insert(w);
    let mut frontier = vec![w.to_vec()];
    for _ in 0..r {
        if span.rank() == d || frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for f in &frontier {
            for m in mats {
                let v = m.matvec_unchecked(f);
                if let Insert::New(_) = span.insert(&v) {
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    Ok(span.to_subspace())
}

/// Relations of degree ≤ R vanishing at `w` through sorted words. With `strict`,
/// the tuple must be R-commutative at `w`.
pub fn vanishing_relations(t: &MatrixTuple, w: &[Scalar], r: u32, strict: bool) -> Result<VanishingRelations> {
    if strict && !is_r_commutative_at(t, w, r as usize)? {
        return Err(Error::Precondition(format!("tuple is not {r}-commutative at the root")));
    }
    let ball = build_ball(t, w, r)?;
    Ok(VanishingRelations { radius: r, relations: ball.relations })
}

/// Why a ball failed to be regular.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Diagnosis {
    /// `dim F_R` of the relation ideal differs from `dim B(w, R)`.
    Dimension { ball: usize, labels: usize, filtration: usize },
    /// `B(w, R−1)` is not spanned by the labels of degree ≤ R−1.
    LowerLayer { ball: usize, labels: usize },
    /// `φ(M_i c(b)) ≠ X_i·b` in the quotient.
    Intertwining { variable: usize, label: String },
    /// A nonzero element of `F_R` lies in the radical.
    Reducedness { witness: String },
    /// The check could not finish within the computation budget.
    Undecided { reason: String },
}

impl Diagnosis {
    pub fn condition(&self) -> &'static str {
        match self {
            Diagnosis::Dimension { .. } => "dimension",
            Diagnosis::LowerLayer { .. } => "lower-layer",
            Diagnosis::Intertwining { .. } => "intertwining",
            Diagnosis::Reducedness { .. } => "reducedness",
            Diagnosis::Undecided { .. } => "undecided",
        }
    }
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnosis::Dimension { ball, labels, filtration } => {
                write!(f, "dimension: ball {ball}, labels {labels}, filtration {filtration}")
            }
            Diagnosis::LowerLayer { ball, labels } => write!(f, "lower layer: ball {ball}, labels {labels}"),
            Diagnosis::Intertwining { variable, label } => {
                write!(f, "intertwining fails for X{} at {label}", variable + 1)
            }
            Diagnosis::Reducedness { witness } => write!(f, "reducedness: {witness} is nilpotent"),
            Diagnosis::Undecided { reason } => write!(f, "undecided: {reason}"),
        }
    }
}

/// A ball identified with `F_R` of `ℂ[X]/a`; `φ` maps `c(b)` to `b` on labels.
#[derive(Clone, Debug)]
pub struct RegularBall {
    pub ball: BallSpace,
    pub ideal: Ideal,
    pub filtration: FiltrationDims,
    pub zero_dimensional: bool,
}

impl RegularBall {
    pub fn radius(&self) -> u32 {
        self.ball.radius
    }

    pub fn dim(&self) -> usize {
        self.ball.dim()
    }

    /// Standard monomials of degree ≤ R; equal to the ball labels.
    pub fn standard_monomials(&self) -> &[Monomial] {
        &self.ball.labels
    }

    /// `φ(v)` in the standard-monomial basis of `F_R`.
    pub fn phi(&self, v: &[Scalar]) -> Option<Vector> {
        self.ball.label_coordinates(v)
    }

    /// `φ^{-1}` of a coordinate vector on the standard monomials.
    pub fn phi_inverse(&self, coeffs: &[Scalar]) -> Vector {
        self.ball.combine_labels(coeffs)
    }

    pub fn report(&self, root_index: Option<usize>) -> BallReport {
        BallReport {
            root_index,
            radius: self.ball.radius,
            dim: self.dim(),
            regular: true,
            diagnosis: None,
            generators: self.ideal.groebner_basis().map(|g| g.iter().map(|p| p.to_string()).collect()).unwrap_or_default(),
            filtration_dims: self.filtration.dims.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Regularity {
    Regular(Box<RegularBall>),
    NotRegular(Diagnosis),
}

impl Regularity {
    pub fn is_regular(&self) -> bool {
        matches!(self, Regularity::Regular(_))
    }

    pub fn diagnosis(&self) -> Option<&Diagnosis> {
        match self {
            Regularity::NotRegular(d) => Some(d),
            Regularity::Regular(_) => None,
        }
    }

    pub fn into_regular(self) -> Option<RegularBall> {
        match self {
            Regularity::Regular(b) => Some(*b),
            Regularity::NotRegular(_) => None,
        }
    }
}

/// Serialized outcome of a ball construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallReport {
    pub root_index: Option<usize>,
    pub radius: u32,
    pub dim: usize,
    pub regular: bool,
    pub diagnosis: Option<Diagnosis>,
    /// Reduced Gröbner basis of the relation ideal, in polynomial text format.
    pub generators: Vec<String>,
    pub filtration_dims: Vec<usize>,
}

fn undecided(e: Error) -> Regularity {
    Regularity::NotRegular(Diagnosis::Undecided { reason: e.to_string() })
}

/// Build `B(w, R)` and decide whether it is regular.
pub fn check_regular(t: &MatrixTuple, w: &[Scalar], r: u32) -> Result<Regularity> {
    let ball = build_ball(t, w, r)?;
    Ok(check_ball(t, ball))
}

/// Regularity of an already built ball.
pub fn check_ball(t: &MatrixTuple, ball: BallSpace) -> Regularity {
    let r = ball.radius;
    let mats = match t.exact() {
        Ok(m) => m,
        Err(e) => return undecided(e),
    };
    // (a) the labels span the whole ball, on the top layer and the one below
    if ball.labels.len() != ball.dim() {
        let filtration = ball.labels.len();
        return Regularity::NotRegular(Diagnosis::Dimension { ball: ball.dim(), labels: ball.labels.len(), filtration });
    }
    if r > 0 {
        let low = ball.labels.iter().filter(|b| b.degree() < r).count();
        if low != ball.layer_dims[r as usize - 1] {
            return Regularity::NotRegular(Diagnosis::LowerLayer { ball: ball.layer_dims[r as usize - 1], labels: low });
        }
    }
    let ideal = Ideal::new(ball.nvars, ball.relations.clone());
    let filtration = match ideal.filtration_dims(r) {
        Ok(f) => f,
        Err(e) => return undecided(e),
    };
    if filtration.dims[r as usize] != ball.dim() {
        return Regularity::NotRegular(Diagnosis::Dimension {
            ball: ball.dim(),
            labels: ball.labels.len(),
            filtration: filtration.dims[r as usize],
        });
    }
    // (b) φ(M_i c(b)) = NF(X_i b) for labels of degree ≤ R−1
    for (b, v) in ball.labels.iter().zip(&ball.label_vectors) {
        if b.degree() >= r {
            break;
        }
        for (i, m) in mats.iter().enumerate() {
            let image = m.matvec_unchecked(v);
            let Some(lhs) = ball.label_coordinates(&image) else {
                return Regularity::NotRegular(Diagnosis::Intertwining { variable: i, label: b.to_string() });
            };
            let nf = match ideal.normal_form(&Poly::monomial(b.mul_var(i), Scalar::one())) {
                Ok(p) => p,
                Err(e) => return undecided(e),
            };
            let rhs: Vec<Scalar> = ball.labels.iter().map(|l| nf.coefficient(l)).collect();
            if lhs != rhs {
                return Regularity::NotRegular(Diagnosis::Intertwining { variable: i, label: b.to_string() });
            }
        }
    }
    // (c) F_R meets the radical trivially
    let zero_dimensional = match ideal.is_zero_dimensional() {
        Ok(z) => z,
        Err(e) => return undecided(e),
    };
    match reducedness_check(&ideal, r) {
        Ok(None) => {}
        Ok(Some(d)) => return Regularity::NotRegular(d),
        Err(e) => return undecided(e),
    }
    Regularity::Regular(Box::new(RegularBall { ball, ideal, filtration, zero_dimensional }))
}

/// Whether `F_R ∩ rad(a)/a = 0`; returns the failure diagnosis if not.
///
/// Zero-dimensional ideals use the trace form `(f, g) ↦ tr(M_{fg})` on the
/// quotient, whose kernel is exactly the nilradical. Otherwise each standard
/// monomial of degree ≤ R is tested for radical membership.
pub fn reducedness_check(ideal: &Ideal, r: u32) -> Result<Option<Diagnosis>> {
    let std = ideal.standard_monomials_up_to(r)?;
    if ideal.is_zero_dimensional()? {
        let basis = ideal.quotient_basis()?;
        let mult: Vec<SparseCols> =
            (0..ideal.nvars()).map(|i| ideal.quotient_multiplication_matrix(i).map(|m| SparseCols::from(&m))).collect::<Result<_>>()?;
        let q = basis.len();
        // M_b for every quotient basis monomial, built along min-variable chains
        let mut mb: Vec<MatrixExact> = Vec::with_capacity(q);
        for b in &basis {
            let m = match b.min_var() {
                None => MatrixExact::identity(q),
                Some(k) => {
                    let prev = b.div_var(k).expect("occurs");
                    // the quotient basis is an order ideal, so the divisor is present
                    let j = basis.iter().position(|x| *x == prev).expect("order ideal");
                    mult[k].mul_dense(&mb[j])
                }
            };
            mb.push(m);
        }
        let tau: Vec<Scalar> = mb.iter().map(trace).collect();
        // T[g][b] = τ(g·b) = (τᵀ M_g)[b]
        let std_idx: Vec<usize> =
            std.iter().map(|s| basis.iter().position(|x| x == s).expect("standard monomial in basis")).collect();
        let mut rows = Vec::with_capacity(q);
        for m in &mb {
            let row: Vec<Scalar> = std_idx
                .iter()
                .map(|&c| {
                    let mut acc = Scalar::zero();
                    for (k, t) in tau.iter().enumerate() {
                        let e = m.get(k, c);
                        if !t.is_zero() && !e.is_zero() {
                            acc += &(t * e);
                        }
                    }
                    acc
                })
                .collect();
            rows.push(row);
        }
        let t = MatrixExact::from_rows(rows)?;
        let ker = t.kernel();
        if ker.dim() > 0 {
            let v = &ker.basis()[0];
            let witness = Poly::from_terms(ideal.nvars(), std.iter().zip(v).map(|(m, c)| (*m, c.clone())).collect());
            return Ok(Some(Diagnosis::Reducedness { witness: witness.to_string() }));
        }
        Ok(None)
    } else {
        for m in &std {
            let f = Poly::monomial(*m, Scalar::one());
            if ideal.radical_member(&f)? && !ideal.ideal_member(&f)? {
                return Ok(Some(Diagnosis::Reducedness { witness: m.to_string() }));
            }
        }
        Ok(None)
    }
}

fn trace(m: &MatrixExact) -> Scalar {
    let mut acc = Scalar::zero();
    for k in 0..m.rows() {
        acc += m.get(k, k);
    }
    acc
}

/// Column-sparse square matrix for products with mostly-permutation structure.
struct SparseCols {
    n: usize,
    cols: Vec<Vec<(usize, Scalar)>>,
}

impl From<&MatrixExact> for SparseCols {
    fn from(m: &MatrixExact) -> Self {
        let cols = (0..m.cols())
            .map(|c| (0..m.rows()).filter(|&r| !m.get(r, c).is_zero()).map(|r| (r, m.get(r, c).clone())).collect())
            .collect();
        SparseCols { n: m.rows(), cols }
    }
}

impl SparseCols {
    /// `self · a`
    fn mul_dense(&self, a: &MatrixExact) -> MatrixExact {
        let mut out = MatrixExact::zeros(self.n, a.cols());
        for k in 0..a.cols() {
            for j in 0..a.rows() {
                let x = a.get(j, k);
                if x.is_zero() {
                    continue;
                }
                for (r, y) in &self.cols[j] {
                    let cur = out.get(*r, k) + &(y * x);
                    out.set(*r, k, cur);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unit_vector;
    use crate::tuples::Flag;

    fn diag(v: &[i64]) -> MatrixExact {
        MatrixExact::diagonal(&v.iter().map(|&x| Scalar::from_int(x)).collect::<Vec<_>>())
    }

    fn cyclic_shift(d: usize) -> MatrixExact {
        MatrixExact::from_fn(d, d, |r, c| if r == (c + 1) % d { Scalar::one() } else { Scalar::zero() })
    }

    #[test]
    fn eigenvector_ball_is_one_dimensional() {
        let t = MatrixTuple::general(vec![diag(&[2, 3, 5]), diag(&[7, 1, 1])]).unwrap();
        let e = unit_vector(3, 1);
        for r in [0, 1, 4] {
            let b = build_ball(&t, &e, r).unwrap();
            assert_eq!(b.dim(), 1);
        }
        let rel = vanishing_relations(&t, &e, 2, true).unwrap();
        assert!(rel.relations.contains(&Poly::parse("X1 - 3", 2).unwrap()));
        assert!(rel.relations.contains(&Poly::parse("X2 - 1", 2).unwrap()));
        let reg = check_regular(&t, &e, 3).unwrap().into_regular().expect("regular");
        let gb = reg.ideal.groebner_basis().unwrap().to_vec();
        assert_eq!(gb, vec![Poly::parse("X2 - 1", 2).unwrap(), Poly::parse("X1 - 3", 2).unwrap()]);
    }

    #[test]
    fn shift_ball_grows_linearly() {
        let d = 10;
        let t = MatrixTuple::new(vec![cyclic_shift(d)], vec![Flag::Unitary]).unwrap();
        let e = unit_vector(d, 0);
        for r in 0..(d as u32 - 1) {
            assert_eq!(build_ball(&t, &e, r).unwrap().dim(), r as usize + 1);
        }
        assert!(build_ball(&t, &vec![Scalar::zero(); d], 2).is_err());
    }

    #[test]
    fn relation_of_reflection() {
        let t = MatrixTuple::new(vec![diag(&[1, -1])], vec![Flag::SelfAdjoint]).unwrap();
        let w = vec![Scalar::one(), Scalar::one()];
        let rel = vanishing_relations(&t, &w, 2, true).unwrap();
        assert_eq!(rel.relations, vec![Poly::parse("X1^2 - 1", 1).unwrap()]);
        let free = MatrixTuple::new(vec![diag(&[1, 2, 3])], vec![Flag::SelfAdjoint]).unwrap();
        let rel = vanishing_relations(&free, &[Scalar::one(), Scalar::one(), Scalar::one()], 2, true).unwrap();
        assert!(rel.relations.is_empty());
    }

    #[test]
    fn strict_mode_rejects_noncommutative_roots() {
        let swap = MatrixExact::from_ints(&[&[0, 1], &[1, 0]]);
        let t = MatrixTuple::general(vec![swap, diag(&[1, 2])]).unwrap();
        assert!(matches!(vanishing_relations(&t, &unit_vector(2, 0), 2, true), Err(Error::Precondition(_))));
    }

    #[test]
    fn synthetic_nonreduced_ideal() {
        let i = Ideal::parse(1, &["X1^2"]).unwrap();
        let d = reducedness_check(&i, 1).unwrap().expect("not reduced");
        assert_eq!(d.condition(), "reducedness");
        let j = Ideal::parse(1, &["X1^2 - 1"]).unwrap();
        assert_eq!(reducedness_check(&j, 1).unwrap(), None);
        // positive-dimensional fallback
        let k = Ideal::parse(2, &["X1^2"]).unwrap();
        assert!(reducedness_check(&k, 1).unwrap().is_some());
        assert_eq!(reducedness_check(&Ideal::parse(2, &["X1 X2"]).unwrap(), 3).unwrap(), None);
    }

    #[test]
    fn generic_root_of_commuting_self_adjoint_pair() {
        let t = MatrixTuple::new(vec![diag(&[1, 1, 2, 2, 3]), diag(&[0, 1, 0, 1, 0])], vec![Flag::SelfAdjoint; 2]).unwrap();
        let w: Vec<Scalar> = (1..=5).map(Scalar::from_int).collect();
        let reg = check_regular(&t, &w, 3).unwrap().into_regular().expect("regular");
        assert_eq!(reg.dim(), 5);
        // φ round trip on the basis
        for v in reg.ball.label_vectors() {
            let c = reg.phi(v).unwrap();
            assert_eq!(&reg.phi_inverse(&c), v);
        }
        assert!(reg.ideal.macaulay_check(3).unwrap().iter().all(|r| r.ok));
    }

    #[test]
    fn nilpotent_ball_is_not_regular() {
        // Jordan block: X^2 kills e_3, relation X^3 only at radius 3 but the
        // quotient by X^3 is not reduced
        let j = MatrixExact::from_ints(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]);
        let t = MatrixTuple::general(vec![j]).unwrap();
        let r = check_regular(&t, &unit_vector(3, 0), 3).unwrap();
        assert_eq!(r.diagnosis().map(|d| d.condition()), Some("reducedness"));
    }
}
