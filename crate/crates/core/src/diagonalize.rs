//! Separating points of a variety and the simultaneously diagonal local models
//! they induce on a regular ball.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ballspace::RegularBall;
use crate::error::{Error, Result};
use crate::float::{solve_least_squares, MatrixFloat, MatrixFloatJson};
use crate::linalg::{MatrixExact, MatrixJson};
use crate::polyring::{Ideal, Monomial, Poly};
use crate::scalar::Scalar;

/// Relative tolerance of the float checks in [`verify_local_model`].
pub const VERIFY_TOL: f64 = 1e-7;

/// A point of `V(a)`, exact when all coordinates are Gaussian rationals.
#[derive(Clone, Debug, PartialEq)]
pub enum VarietyPoint {
    Exact(Vec<Scalar>),
    /// `residual` bounds `|g(p)|` over the reduced Gröbner basis.
    Approx { coords: Vec<Complex64>, residual: f64 },
}

impl VarietyPoint {
    pub fn is_exact(&self) -> bool {
        matches!(self, VarietyPoint::Exact(_))
    }

    pub fn coords_c64(&self) -> Vec<Complex64> {
        match self {
            VarietyPoint::Exact(c) => c.iter().map(Scalar::to_c64).collect(),
            VarietyPoint::Approx { coords, .. } => coords.clone(),
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            VarietyPoint::Exact(_) => 0.0,
            VarietyPoint::Approx { residual, .. } => *residual,
        }
    }

    fn eval_exact(&self, m: &Monomial) -> Option<Scalar> {
        let VarietyPoint::Exact(c) = self else { return None };
        let mut acc = Scalar::one();
        for (i, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                acc *= &c[i];
            }
        }
        Some(acc)
    }
}

/// Knobs of the point search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSearch {
    pub seed: u64,
    /// Consecutive unproductive attempts (random sections or eigen-solves) before giving up.
    pub retries: usize,
    /// Number of point orderings tried when choosing a well-conditioned subset.
    pub orderings: usize,
    /// Largest accepted generator residual of a float point.
    pub residual_bound: f64,
    /// Largest denominator tried when snapping float coordinates to rationals.
    pub max_denominator: i64,
}

impl Default for PointSearch {
    fn default() -> Self {
        PointSearch { seed: 0, retries: 8, orderings: 16, residual_bound: 1e-9, max_denominator: 10_000 }
    }
}

/// `count` points of `V(ideal)` whose evaluation matrix on the standard
/// monomials of degree ≤ R is invertible.
pub fn find_separating_points(ideal: &Ideal, r: u32, count: usize, search: &PointSearch) -> Result<Vec<VarietyPoint>> {
    let std = ideal.standard_monomials_up_to(r)?;
    if std.len() != count {
        return Err(Error::Precondition(format!("count {count} differs from dim F_R = {}", std.len())));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let gb = ideal.groebner_basis()?.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut cands: Vec<VarietyPoint> = Vec::new();
    let mut streak = 0;
    let sections = ideal.krull_dimension()?.unwrap_or(0);
    let mut best_rank = 0;
    while streak < search.retries {
        let found = if sections == 0 {
            solve_zero_dimensional(ideal, &gb, &mut rng, search)
        } else {
            let n = ideal.nvars();
            let mut gens = gb.clone();
            for _ in 0..sections {
                let mut terms: Vec<(Monomial, Scalar)> =
                    (0..n).map(|i| (Monomial::var(n, i), Scalar::from_int(rng.random_range(-4..=4)))).collect();
                terms.push((Monomial::one(n), Scalar::from_frac(rng.random_range(-12..=12), rng.random_range(1..=3))));
                gens.push(Poly::from_terms(n, terms));
            }
            let section = Ideal::new(n, gens).with_budget(*ideal.budget());
            let mut pts = match section.is_zero_dimensional() {
                Ok(true) => solve_zero_dimensional(&section, &gb, &mut rng, search),
                Ok(false) => Ok(Vec::new()),
                Err(e @ Error::Budget(_)) => return Err(e),
                Err(e) => Err(e),
            };
            // sections miss isolated points off the hyperplane; once they stall,
            // Newton from random starts reaches those
            if let (Ok(p), true) = (pts.as_mut(), streak > 0) {
                p.extend(newton_samples(&gb, n, NEWTON_STARTS, &mut rng, search));
            }
            pts
        };
        match found {
            Ok(pts) => {
                for p in pts {
                    if !cands.iter().any(|q| same_point(q, &p)) {
                        cands.push(p);
                    }
                }
            }
            Err(Error::Numeric(_)) => {}
            Err(e) => return Err(e),
        }
        let rank = greedy_rank(&cands, &std);
        if rank == count {
            return Ok(select_points(&cands, &std, search.orderings, &mut rng));
        }
        if rank > best_rank {
            best_rank = rank;
            streak = 0;
        } else {
            streak += 1;
        }
    }
    Err(Error::Separation(format!("found points of rank {best_rank}, need {count}")))
}

fn same_point(a: &VarietyPoint, b: &VarietyPoint) -> bool {
    let (x, y) = (a.coords_c64(), b.coords_c64());
    x.iter().zip(&y).all(|(p, q)| (p - q).norm() <= 1e-7 * (1.0 + p.norm()))
}

fn to_float(m: &MatrixExact) -> DMatrix<Complex64> {
    MatrixFloat::from_exact(m, 1e-10).into_inner()
}

/// All points of a zero-dimensional ideal, via a Schur form of a random
/// combination of the commuting multiplication matrices.
fn solve_zero_dimensional(j: &Ideal, target: &[Poly], rng: &mut ChaCha8Rng, search: &PointSearch) -> Result<Vec<VarietyPoint>> {
    let n = j.nvars();
    let mats: Vec<MatrixExact> = (0..n).map(|i| j.quotient_multiplication_matrix(i)).collect::<Result<_>>()?;
    let q = mats.first().map(|m| m.rows()).unwrap_or(0);
    if q == 0 {
        return Ok(Vec::new());
    }
    if q == 1 {
        let p: Vec<Scalar> = mats.iter().map(|m| m.get(0, 0).clone()).collect();
        return Ok(vec![certify_exact(p, target)]);
    }
    let fm: Vec<DMatrix<Complex64>> = mats.iter().map(to_float).collect();
    let mut l = DMatrix::<Complex64>::zeros(q, q);
    for m in &fm {
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        l += m * c;
    }
    let schur = nalgebra::Schur::try_new(l, 1e-14, 10_000).ok_or_else(|| Error::Numeric("Schur form did not converge".into()))?;
    let (qm, _) = schur.unpack();
    let qa = qm.adjoint();
    let diags: Vec<DMatrix<Complex64>> = fm.iter().map(|m| &qa * m * &qm).collect();
    let mut clusters: Vec<(Vec<Complex64>, usize)> = Vec::new();
    for k in 0..q {
        let p: Vec<Complex64> = diags.iter().map(|d| d[(k, k)]).collect();
        let scale = 1.0 + p.iter().map(|z| z.norm()).fold(0.0, f64::max);
        match clusters.iter_mut().find(|(c, _)| c.iter().zip(&p).all(|(a, b)| (a - b).norm() <= 1e-4 * scale)) {
            Some((c, w)) => {
                for (a, b) in c.iter_mut().zip(&p) {
                    *a = (*a * (*w as f64) + b) / (*w as f64 + 1.0);
                }
                *w += 1;
            }
            None => clusters.push((p, 1)),
        }
    }
    let system: Vec<Poly> = j.groebner_basis()?.to_vec();
    let mut out: Vec<VarietyPoint> = Vec::new();
    for (p, _) in clusters {
        let p = gauss_newton(&system, p);
        let pt = certify(p, target, search);
        if !out.iter().any(|o| same_point(o, &pt)) {
            out.push(pt);
        }
    }
    Ok(out)
}

fn gauss_newton(system: &[Poly], mut p: Vec<Complex64>) -> Vec<Complex64> {
    let n = p.len();
    let jac: Vec<Vec<Poly>> = system.iter().map(|g| (0..n).map(|i| g.derivative(i)).collect()).collect();
    for _ in 0..40 {
        let f: Vec<Complex64> = system.iter().map(|g| -g.eval_c64(&p)).collect();
        if f.iter().all(|z| z.norm() < 1e-15) {
            break;
        }
        let jm = DMatrix::from_fn(system.len(), n, |r, c| jac[r][c].eval_c64(&p));
        let Some(step) = solve_least_squares(&jm, &f) else { break };
        let size: f64 = step.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !size.is_finite() {
            break;
        }
        for (x, s) in p.iter_mut().zip(&step) {
            *x += s;
        }
        if size < 1e-15 * (1.0 + p.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
            break;
        }
    }
    p
}

const NEWTON_STARTS: usize = 6;

/// Points of `V(system)` reached by Gauss–Newton from random complex starts.
fn newton_samples(system: &[Poly], n: usize, starts: usize, rng: &mut ChaCha8Rng, search: &PointSearch) -> Vec<VarietyPoint> {
    let mut out: Vec<VarietyPoint> = Vec::new();
    for k in 0..starts {
        // even starts are real so real isolated points can snap to rationals
        let im = if k % 2 == 0 { 0.0 } else { 1.0 };
        let p0: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.random_range(-4.0..4.0), im * rng.random_range(-1.0..1.0))).collect();
        let pt = certify(gauss_newton(system, p0), system, search);
        let ok = match &pt {
            VarietyPoint::Exact(_) => true,
            VarietyPoint::Approx { residual, .. } => *residual <= search.residual_bound,
        };
        if ok && !out.iter().any(|o| same_point(o, &pt)) {
            out.push(pt);
        }
    }
    out
}

fn residual(target: &[Poly], p: &[Complex64]) -> f64 {
    target.iter().map(|g| g.eval_c64(p).norm()).fold(0.0, f64::max)
}

fn certify_exact(p: Vec<Scalar>, target: &[Poly]) -> VarietyPoint {
    if target.iter().all(|g| g.eval(&p).is_zero()) {
        VarietyPoint::Exact(p)
    } else {
        let c: Vec<Complex64> = p.iter().map(Scalar::to_c64).collect();
        let r = residual(target, &c);
        VarietyPoint::Approx { coords: c, residual: r }
    }
}

/// Snap to rationals when that gives an exact zero; otherwise keep the float.
fn certify(p: Vec<Complex64>, target: &[Poly], search: &PointSearch) -> VarietyPoint {
    let snapped: Option<Vec<Scalar>> = p.iter().map(|z| Scalar::rationalize(*z, search.max_denominator, 1e-9)).collect();
    if let Some(s) = snapped {
        if target.iter().all(|g| g.eval(&s).is_zero()) {
            return VarietyPoint::Exact(s);
        }
    }
    let r = residual(target, &p);
    VarietyPoint::Approx { coords: p, residual: r }
}

fn eval_row(p: &VarietyPoint, std: &[Monomial]) -> Vec<Complex64> {
    let c = p.coords_c64();
    std.iter().map(|m| m.eval_c64(&c)).collect()
}

/// Rows accepted by greedy Gram–Schmidt in the given order.
fn greedy_rows(rows: &[Vec<Complex64>], order: &[usize], want: usize) -> Vec<usize> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut chosen = Vec::new();
    for &k in order {
        if chosen.len() == want {
            break;
        }
        let mut v = rows[k].clone();
        let norm0: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for b in &basis {
                let c: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 * norm0 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
            chosen.push(k);
        }
    }
    chosen
}

fn greedy_rank(cands: &[VarietyPoint], std: &[Monomial]) -> usize {
    let rows: Vec<Vec<Complex64>> = cands.iter().map(|p| eval_row(p, std)).collect();
    let order: Vec<usize> = (0..rows.len()).collect();
    greedy_rows(&rows, &order, std.len()).len()
}

fn sigma_min_ratio(rows: &[Vec<Complex64>], chosen: &[usize]) -> f64 {
    let s = chosen.len();
    let m = DMatrix::from_fn(s, s, |r, c| rows[chosen[r]][c]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

/// Pick `std.len()` candidates, preferring exact points and then the best
/// conditioned evaluation matrix among several orderings.
fn select_points(cands: &[VarietyPoint], std: &[Monomial], orderings: usize, rng: &mut ChaCha8Rng) -> Vec<VarietyPoint> {
    let want = std.len();
    let rows: Vec<Vec<Complex64>> = cands.iter().map(|p| eval_row(p, std)).collect();
    let mut base: Vec<usize> = (0..cands.len()).collect();
    base.sort_by_key(|&k| !cands[k].is_exact());
    let mut best: Option<(Vec<usize>, f64)> = None;
    let trials = if cands.len() == want { 1 } else { orderings.max(1) };
    for t in 0..trials {
        let mut order = base.clone();
        if t > 0 {
            use rand::seq::SliceRandom;
            order.shuffle(rng);
        }
        let chosen = greedy_rows(&rows, &order, want);
        if chosen.len() < want {
            continue;
        }
        let score = sigma_min_ratio(&rows, &chosen);
        if best.as_ref().is_none_or(|(_, s)| score > *s) {
            best = Some((chosen, score));
        }
    }
    let (mut chosen, _) = best.expect("rank was verified");
    chosen.sort_unstable();
    chosen.into_iter().map(|k| cands[k].clone()).collect()
}

/// A matrix factor in either arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Exact(MatrixExact),
    Float(DMatrix<Complex64>),
}

impl Factor {
    pub fn rows(&self) -> usize {
        match self {
            Factor::Exact(m) => m.rows(),
            Factor::Float(m) => m.nrows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Factor::Exact(m) => m.cols(),
            Factor::Float(m) => m.ncols(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Factor::Exact(_))
    }

    pub fn to_float(&self) -> DMatrix<Complex64> {
        match self {
            Factor::Exact(m) => to_float(m),
            Factor::Float(m) => m.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&MatrixExact> {
        match self {
            Factor::Exact(m) => Some(m),
            Factor::Float(_) => None,
        }
    }

    pub fn get_c64(&self, r: usize, c: usize) -> Complex64 {
        match self {
            Factor::Exact(m) => m.get(r, c).to_c64(),
            Factor::Float(m) => m[(r, c)],
        }
    }
}

/// Commuting diagonalizable maps on one regular ball.
///
/// With `U = eigenbasis` (columns `τ(e_j)` as ball vectors) and
/// `U⁺ = coordinates` (its left inverse, zero on the ball's orthogonal
/// complement), the local map is `M_i = U·diag(λ_i)·U⁺`.
#[derive(Clone, Debug)]
pub struct LocalModel {
    pub radius: u32,
    pub nvars: usize,
    /// Standard monomials of degree ≤ R (the ball labels).
    pub std: Vec<Monomial>,
    pub points: Vec<VarietyPoint>,
    /// Reduced Gröbner basis of the ball ideal, kept for re-verification.
    pub generators: Vec<Poly>,
    /// `Ev[j][k] = b_k(p_j)`.
    pub evaluation: Factor,
    /// `Ev⁻¹`; column j is `τ(e_j)` in standard-monomial coordinates.
    pub tau: Factor,
    /// `λ[i][j]`: coordinate i of point j.
    pub lambdas: Factor,
    pub eigenbasis: Factor,
    pub coordinates: Factor,
    /// `μ_i: F_{R−1} → F_R` of the ball ideal.
    pub mu: Vec<MatrixExact>,
}

impl LocalModel {
    pub fn dim(&self) -> usize {
        self.std.len()
    }

    pub fn is_exact(&self) -> bool {
        self.eigenbasis.is_exact()
    }

    /// `U·diag(λ_i)·U⁺` as a dense d×d matrix.
    pub fn dense(&self, i: usize) -> Factor {
        match (&self.eigenbasis, &self.lambdas, &self.coordinates) {
            (Factor::Exact(u), Factor::Exact(l), Factor::Exact(up)) => {
                let scaled = MatrixExact::from_fn(u.rows(), u.cols(), |r, c| u.get(r, c) * l.get(i, c));
                Factor::Exact(scaled.mul(up).expect("shapes"))
            }
            _ => {
                let u = self.eigenbasis.to_float();
                let up = self.coordinates.to_float();
                let mut scaled = u.clone();
                for c in 0..scaled.ncols() {
                    let lam = self.lambdas.get_c64(i, c);
                    for r in 0..scaled.nrows() {
                        scaled[(r, c)] *= lam;
                    }
                }
                Factor::Float(scaled * up)
            }
        }
    }
}

/// Build `σ`, `τ` and the diagonal local maps on a regular ball from separating points.
pub fn build_local_model(ball: &RegularBall, points: &[VarietyPoint]) -> Result<LocalModel> {
    let std = ball.standard_monomials().to_vec();
    let s = std.len();
    let n = ball.ball.nvars();
    let r = ball.radius();
    if points.len() != s {
        return Err(Error::Separation(format!("{} points for a {s}-dimensional ball", points.len())));
    }
    let generators = ball.ideal.groebner_basis()?.to_vec();
    let mu = if r >= 1 {
        (0..n).map(|i| ball.ideal.multiplication_map(i, r)).collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let c = MatrixExact::from_columns(ball.ball.root().len(), ball.ball.label_vectors());
    // C⁺ = (C*C)⁻¹C*
    let cstar = c.adjoint();
    let gram = cstar.mul(&c)?;
    let cplus = gram.inverse()?.mul(&cstar)?;

    let exact = points.iter().all(VarietyPoint::is_exact);
    let (evaluation, tau, lambdas, eigenbasis, coordinates) = if exact {
        let ev = MatrixExact::from_fn(s, s, |j, k| points[j].eval_exact(&std[k]).expect("exact point"));
        let tau = ev.inverse().map_err(|_| Error::Separation("singular evaluation matrix".into()))?;
        let lam = MatrixExact::from_fn(n, s, |i, j| match &points[j] {
            VarietyPoint::Exact(p) => p[i].clone(),
            VarietyPoint::Approx { .. } => unreachable!(),
        });
        let u = c.mul(&tau)?;
        let up = ev.mul(&cplus)?;
        (Factor::Exact(ev), Factor::Exact(tau), Factor::Exact(lam), Factor::Exact(u), Factor::Exact(up))
    } else {
        let coords: Vec<Vec<Complex64>> = points.iter().map(VarietyPoint::coords_c64).collect();
        let ev = DMatrix::from_fn(s, s, |j, k| std[k].eval_c64(&coords[j]));
        let sv = ev.singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(max > 0.0 && min > 1e-12 * max) {
            return Err(Error::Separation(format!("evaluation matrix is numerically singular (σ ratio {:.2e})", min / max)));
        }
        let tau = ev.clone().try_inverse().ok_or_else(|| Error::Separation("singular evaluation matrix".into()))?;
        let lam = DMatrix::from_fn(n, s, |i, j| coords[j][i]);
        let u = to_float(&c) * &tau;
        let up = &ev * to_float(&cplus);
        (Factor::Float(ev), Factor::Float(tau), Factor::Float(lam), Factor::Float(u), Factor::Float(up))
    };
    Ok(LocalModel {
        radius: r,
        nvars: n,
        std,
        points: points.to_vec(),
        generators,
        evaluation,
        tau,
        lambdas,
        eigenbasis,
        coordinates,
        mu,
    })
}

/// Independent re-check of a local model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalModelReport {
    pub exact: bool,
    /// Largest generator residual over the points (0 for exact points).
    pub point_residual: f64,
    pub points_ok: bool,
    /// `σ_min / σ_max` of the evaluation matrix (1 when exact and invertible, 0 when singular).
    pub separation_ratio: f64,
    pub separation_ok: bool,
    /// Largest `|p_l[i]·τ(e_j)(p_l) − λ_ij δ_jl|`.
    pub eigen_relation_residual: f64,
    pub eigen_relation_ok: bool,
    /// Largest entry of `(τ Λ_i σ − μ_i)` on `F_{R−1}`.
    pub intertwining_residual: f64,
    pub intertwining_ok: bool,
    /// Largest entry of `U⁺U − I`; zero means the shared factorization is consistent,
    /// so `[M_i, M_j] = U[Λ_i, Λ_j]U⁺ = 0`.
    pub factorization_residual: f64,
    pub commutation_ok: bool,
}

impl LocalModelReport {
    pub fn passed(&self) -> bool {
        self.points_ok && self.separation_ok && self.eigen_relation_ok && self.intertwining_ok && self.commutation_ok
    }
}

fn max_abs_diff_exact(a: &MatrixExact, b: &MatrixExact) -> (bool, f64) {
    let d = a.sub(b).expect("shapes");
    let m = d.entries().iter().map(|z| z.to_c64().norm()).fold(0.0, f64::max);
    (d.is_zero(), m)
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn verify_local_model(model: &LocalModel) -> LocalModelReport {
    let s = model.dim();
    let n = model.nvars;
    let exact = model.is_exact();
    let bound = PointSearch::default().residual_bound;

    // points
    let mut point_residual: f64 = 0.0;
    let mut points_ok = true;
    for p in &model.points {
        match p {
            VarietyPoint::Exact(c) => {
                if !model.generators.iter().all(|g| g.eval(c).is_zero()) {
                    points_ok = false;
                    point_residual = point_residual.max(residual(&model.generators, &p.coords_c64()));
                }
            }
            VarietyPoint::Approx { coords, .. } => {
                let r = residual(&model.generators, coords);
                point_residual = point_residual.max(r);
                points_ok &= r <= bound;
            }
        }
    }

    // separation, recomputed from the points
    let (separation_ratio, separation_ok) = if exact {
        let ev = MatrixExact::from_fn(s, s, |j, k| model.points[j].eval_exact(&model.std[k]).expect("exact"));
        if ev.rank() == s {
            (1.0, true)
        } else {
            (0.0, false)
        }
    } else {
        let rows: Vec<Vec<Complex64>> = model.points.iter().map(|p| eval_row(p, &model.std)).collect();
        let all: Vec<usize> = (0..s).collect();
        let ratio = if s == 0 { 1.0 } else { sigma_min_ratio(&rows, &all) };
        (ratio, ratio > 1e-12)
    };

    // eigen-relation: X_i·τ(e_j) evaluated directly at every point
    let mut eig_res: f64 = 0.0;
    let mut eig_exact_ok = true;
    for j in 0..s {
        for (l, p) in model.points.iter().enumerate() {
            if exact {
                let pe = match p {
                    VarietyPoint::Exact(c) => c,
                    VarietyPoint::Approx { .. } => unreachable!(),
                };
                let tau = model.tau.as_exact().expect("exact");
                let mut f = Scalar::zero();
                for (k, m) in model.std.iter().enumerate() {
                    f += &(tau.get(k, j) * &p.eval_exact(m).expect("exact"));
                }
                for i in 0..n {
                    let lhs = &pe[i] * &f;
                    let lam = model.lambdas.as_exact().expect("exact").get(i, j);
                    let rhs = if j == l { lam.clone() } else { Scalar::zero() };
                    if lhs != rhs {
                        eig_exact_ok = false;
                        eig_res = eig_res.max((lhs - rhs).to_c64().norm());
                    }
                }
            } else {
                let pc = p.coords_c64();
                let f: Complex64 = model.std.iter().enumerate().map(|(k, m)| model.tau.get_c64(k, j) * m.eval_c64(&pc)).sum();
                for (i, x) in pc.iter().enumerate() {
                    let lam = model.lambdas.get_c64(i, j);
                    let rhs = if j == l { lam } else { Complex64::new(0.0, 0.0) };
                    eig_res = eig_res.max((x * f - rhs).norm() / (1.0 + lam.norm()));
                }
            }
        }
    }
    let eigen_relation_ok = if exact { eig_exact_ok } else { eig_res <= VERIFY_TOL };

    // intertwining on F_{R−1}
    let low = model.std.iter().filter(|m| m.degree() < model.radius).count();
    let mut int_res: f64 = 0.0;
    let mut int_exact_ok = true;
    for (i, mu) in model.mu.iter().enumerate() {
        if mu.rows() != s || mu.cols() != low {
            int_exact_ok = false;
            int_res = f64::INFINITY;
            continue;
        }
        match (&model.tau, &model.lambdas, &model.evaluation) {
            (Factor::Exact(t), Factor::Exact(l), Factor::Exact(ev)) => {
                let scaled = MatrixExact::from_fn(s, s, |r, c| t.get(r, c) * l.get(i, c));
                let mi = scaled.mul(ev).expect("shapes");
                let sub = MatrixExact::from_fn(s, low, |r, c| mi.get(r, c).clone());
                let (ok, m) = max_abs_diff_exact(&sub, mu);
                int_exact_ok &= ok;
                int_res = int_res.max(m);
            }
            _ => {
                let t = model.tau.to_float();
                let ev = model.evaluation.to_float();
                let mut scaled = t.clone();
                for c in 0..s {
                    let lam = model.lambdas.get_c64(i, c);
                    for r in 0..s {
                        scaled[(r, c)] *= lam;
                    }
                }
                let mi = scaled * ev;
                let scale = 1.0 + max_abs(&to_float(mu));
                let diff = DMatrix::from_fn(s, low, |r, c| mi[(r, c)] - mu.get(r, c).to_c64());
                int_res = int_res.max(max_abs(&diff) / scale);
            }
        }
    }
    let intertwining_ok = if exact { int_exact_ok } else { int_res <= VERIFY_TOL };

    // shared factorization: U⁺U = I
    let (factorization_residual, commutation_ok) = match (&model.coordinates, &model.eigenbasis) {
        (Factor::Exact(up), Factor::Exact(u)) => {
            let (ok, m) = max_abs_diff_exact(&up.mul(u).expect("shapes"), &MatrixExact::identity(s));
            (m, ok)
        }
        _ => {
            let prod = model.coordinates.to_float() * model.eigenbasis.to_float();
            let m = max_abs(&(prod - DMatrix::identity(s, s)));
            (m, m <= VERIFY_TOL)
        }
    };

    LocalModelReport {
        exact,
        point_residual,
        points_ok,
        separation_ratio,
        separation_ok,
        eigen_relation_residual: eig_res,
        eigen_relation_ok,
        intertwining_residual: int_res,
        intertwining_ok,
        factorization_residual,
        commutation_ok,
    }
}

/// Serialized variety point.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VarietyPointJson {
    Exact { coords: Vec<(String, String)> },
    Approx { coords: Vec<(f64, f64)>, residual: f64 },
}

impl From<&VarietyPoint> for VarietyPointJson {
    fn from(p: &VarietyPoint) -> Self {
        match p {
            VarietyPoint::Exact(c) => VarietyPointJson::Exact { coords: c.iter().map(Scalar::to_pair_strings).collect() },
            VarietyPoint::Approx { coords, residual } => {
                VarietyPointJson::Approx { coords: coords.iter().map(|z| (z.re, z.im)).collect(), residual: *residual }
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactorJson {
    Exact(MatrixJson),
    Float(MatrixFloatJson),
}

impl From<&Factor> for FactorJson {
    fn from(f: &Factor) -> Self {
        match f {
            Factor::Exact(m) => FactorJson::Exact(MatrixJson::from(m)),
            Factor::Float(m) => FactorJson::Float(MatrixFloatJson::from(&MatrixFloat::new(m.clone(), crate::float::DEFAULT_TOL))),
        }
    }
}

/// Serialized local model: points, λ table, τ basis and its verification.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalModelJson {
    pub radius: u32,
    pub standard_monomials: Vec<String>,
    pub points: Vec<VarietyPointJson>,
    pub lambdas: FactorJson,
    pub tau: FactorJson,
    pub report: LocalModelReport,
}

impl From<&LocalModel> for LocalModelJson {
    fn from(m: &LocalModel) -> Self {
        LocalModelJson {
            radius: m.radius,
            standard_monomials: m.std.iter().map(|b| b.to_string()).collect(),
            points: m.points.iter().map(VarietyPointJson::from).collect(),
            lambdas: FactorJson::from(&m.lambdas),
            tau: FactorJson::from(&m.tau),
            report: verify_local_model(m),
        }
    }
}
