//! The correction pipeline: adjoint closure, commutative core, greedy packing of
//! orthogonal regular balls over a decreasing radius schedule, and assembly of a
//! commuting tuple from the per-ball local models.

use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ballspace::{check_regular, words_span, BallReport, Diagnosis, RegularBall, Regularity};
use crate::diagonalize::{
    build_local_model, find_separating_points, verify_local_model, Factor, FactorJson, LocalModel, LocalModelJson,
    LocalModelReport, PointSearch,
};
use crate::error::{Error, Result};
use crate::float::MatrixFloat;
use crate::linalg::{inner, restrict_orthogonal, MatrixExact, MatrixJson, Subspace, Vector};
use crate::scalar::Scalar;
use crate::tuples::{
    commutator_defect, r_commutative_core, rank_distance, star_close_with_origin, Backend, Flag, MatrixTuple, TupleJson,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Extra commutativity radius demanded around a ball of radius R: `factor·R + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Margin {
    pub factor: u32,
    pub offset: u32,
}

impl Default for Margin {
    fn default() -> Self {
        Margin { factor: 2, offset: 2 }
    }
}

impl Margin {
    pub fn at(&self, r: u32) -> u32 {
        self.factor * r + self.offset
    }
}

#[derive(Clone, Debug, Deserialize)]
struct ScheduleRaw {
    radii: Vec<u32>,
    #[serde(default = "default_target")]
    target_eps: f64,
    #[serde(default)]
    margin: Margin,
}

fn default_target() -> f64 {
    0.3
}

/// Radii `r_0 > r_1 > … > r_k ≥ 1`, a target distance and the commutativity margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleRaw")]
pub struct Schedule {
    radii: Vec<u32>,
    pub target_eps: f64,
    pub margin: Margin,
}

impl TryFrom<ScheduleRaw> for Schedule {
    type Error = Error;

    fn try_from(raw: ScheduleRaw) -> Result<Self> {
        Schedule::new(raw.radii, raw.target_eps, raw.margin)
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { radii: vec![8, 4, 2], target_eps: default_target(), margin: Margin::default() }
    }
}

impl Schedule {
    pub fn new(radii: Vec<u32>, target_eps: f64, margin: Margin) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::Config("schedule needs at least one radius".into()));
        }
        if radii.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Config(format!("schedule radii must be strictly decreasing: {radii:?}")));
        }
        if *radii.last().unwrap() < 1 {
            return Err(Error::Config("smallest radius must be at least 1".into()));
        }
        if !(target_eps > 0.0) {
            return Err(Error::Config("target distance must be positive".into()));
        }
        Ok(Schedule { radii, target_eps, margin })
    }

    /// Parse `"8,4,2"`.
    pub fn parse_radii(s: &str) -> Result<Vec<u32>> {
        s.split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| Error::Parse(format!("schedule radius `{p}`"))))
            .collect()
    }

    pub fn radii(&self) -> &[u32] {
        &self.radii
    }

    pub fn with_radii(&self, radii: Vec<u32>) -> Result<Self> {
        Schedule::new(radii, self.target_eps, self.margin)
    }

    /// The sufficient conditions under which the radius schedule provably
    /// reaches `target_eps` for `n` matrices with defect `delta`. Advisory only.
    pub fn advisory(&self, n: usize, delta: f64) -> ScheduleAdvice {
        let k = self.radii.len() - 1;
        let decay = (1.0 - (-(n as f64)).exp()).powi(k as i32);
        let budget = k as f64 * decay;
        let steps = self
            .radii
            .windows(2)
            .map(|w| {
                let lhs = self.target_eps + n as f64 / w[0] as f64 * 2f64.powi(w[1] as i32);
                AdviceStep { outer: w[0], inner: w[1], lhs, rhs: decay, ok: lhs < decay }
            })
            .collect::<Vec<_>>();
        let budget_ok = budget < delta;
        let satisfied = budget_ok && steps.iter().all(|s| s.ok);
        ScheduleAdvice { k, decay, budget, delta, budget_ok, steps, satisfied }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdviceStep {
    pub outer: u32,
    pub inner: u32,
    /// `ε + (n/r_i)·2^{r_{i+1}}`
    pub lhs: f64,
    /// `(1 − e^{−n})^k`
    pub rhs: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleAdvice {
    pub k: usize,
    pub decay: f64,
    /// `k·(1 − e^{−n})^k`, to be compared with `δ`.
    pub budget: f64,
    pub delta: f64,
    pub budget_ok: bool,
    pub steps: Vec<AdviceStep>,
    pub satisfied: bool,
}

/// A checked inequality, named by the result it instantiates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub check: String,
    pub subject: String,
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
}

impl Assertion {
    fn new(check: &str, subject: impl Into<String>, lhs: f64, rhs: f64, passed: bool) -> Self {
        Assertion { check: check.into(), subject: subject.into(), lhs, rhs, passed }
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "ok" } else { "VIOLATED" };
        write!(f, "{} [{}]: {:.6} vs {:.6} {mark}", self.check, self.subject, self.lhs, self.rhs)
    }
}

fn ratio(p: usize, q: usize) -> Rational64 {
    Rational64::new(p as i64, q.max(1) as i64)
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn fmt_vec(v: &[Scalar]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// `A ⊆ B` with slack `dim(B/A)/d`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutativePair {
    pub inner: Subspace,
    pub outer: Subspace,
}

impl CommutativePair {
    pub fn new(inner: Subspace, outer: Subspace) -> Result<Self> {
        if inner.ambient_dim() != outer.ambient_dim() {
            return Err(Error::Dimension("pair subspaces live in different spaces".into()));
        }
        if !inner.is_subspace_of(&outer) {
            return Err(Error::Precondition("inner space of a pair must lie in the outer space".into()));
        }
        Ok(CommutativePair { inner, outer })
    }

    pub fn slack(&self) -> Rational64 {
        ratio(self.outer.dim() - self.inner.dim(), self.outer.ambient_dim())
    }
}

/// What greedy packing does with a root whose ball is not regular (after one
/// margin escalation).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailurePolicy {
    /// Remove the root's line from the packed space and continue.
    #[default]
    Exclude,
    /// Stop with a regularity error carrying the root.
    Abort,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PackOptions {
    pub margin: Margin,
    pub policy: FailurePolicy,
    /// Seed for random root selection; `None` takes the first canonical basis vector.
    pub randomized: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub radius: u32,
    pub root: Vec<String>,
    pub diagnosis: Diagnosis,
}

#[derive(Clone, Debug)]
pub struct PackOutcome {
    pub radius: u32,
    pub balls: Vec<RegularBall>,
    pub exclusions: Vec<Exclusion>,
    pub escalated: bool,
    pub input_dim: usize,
    /// Dimension of the space actually packed: the input, cut by the escalated
    /// core and the excluded lines.
    pub packed_dim: usize,
    /// `Σ dim B(x_j, R) ≥ e^{−n}·dim A`.
    pub bound: Assertion,
}

impl PackOutcome {
    pub fn covered(&self) -> usize {
        self.balls.iter().map(RegularBall::dim).sum()
    }
}

fn pick_root(cand: &Subspace, rng: Option<&mut ChaCha8Rng>) -> Vector {
    let basis = cand.basis();
    match rng {
        None => basis[0].clone(),
        Some(rng) => loop {
            let mut v = vec![Scalar::zero(); cand.ambient_dim()];
            for b in basis {
                let c = Scalar::from_int(rng.random_range(-3..=3));
                crate::linalg::axpy(&mut v, &c, b);
            }
            if !crate::linalg::is_zero_vec(&v) {
                break v;
            }
        },
    }
}

/// Greedily place regular balls `B(x, R)` with roots in `A`, each root
/// orthogonal to the `2R`-balls of the previous ones.
///
/// The tuple must be ⋆-closed; the orthogonality of the placed balls relies on it.
pub fn greedy_pack(t: &MatrixTuple, a: &Subspace, r: u32, opts: &PackOptions) -> Result<PackOutcome> {
    if a.ambient_dim() != t.d() {
        return Err(Error::Dimension("packing space and tuple differ in dimension".into()));
    }
    if r == 0 {
        return Err(Error::Argument("packing radius must be positive".into()));
    }
    let mut rng = opts.randomized.map(ChaCha8Rng::seed_from_u64);
    let mut cand = a.clone();
    let mut packed = a.clone();
    let mut balls = Vec::new();
    let mut exclusions = Vec::new();
    let mut escalated = false;
    while !cand.is_zero() {
        let x = pick_root(&cand, rng.as_mut());
        match check_regular(t, &x, r)? {
            Regularity::Regular(ball) => {
                let far = words_span(t, &x, 2 * r)?;
                cand = restrict_orthogonal(&cand, far.basis())?;
                balls.push(*ball);
            }
            Regularity::NotRegular(diagnosis) => {
                if !escalated {
                    escalated = true;
                    let core = r_commutative_core(t, 2 * opts.margin.at(r) as usize, None)?;
                    cand = cand.intersect(&core)?;
                    packed = packed.intersect(&core)?;
                    continue;
                }
                match opts.policy {
                    FailurePolicy::Abort => {
                        return Err(Error::Regularity { root: fmt_vec(&x).join(", "), diagnosis: diagnosis.to_string() })
                    }
                    FailurePolicy::Exclude => {
                        cand = restrict_orthogonal(&cand, std::slice::from_ref(&x))?;
                        packed = restrict_orthogonal(&packed, std::slice::from_ref(&x))?;
                        exclusions.push(Exclusion { radius: r, root: fmt_vec(&x), diagnosis });
                    }
                }
            }
        }
    }
    let covered: usize = balls.iter().map(RegularBall::dim).sum();
    let rhs = (-(t.n() as f64)).exp() * packed.dim() as f64;
    let bound = Assertion::new("packing-bound", format!("radius {r}"), covered as f64, rhs, covered as f64 >= rhs);
    Ok(PackOutcome { radius: r, balls, exclusions, escalated, input_dim: a.dim(), packed_dim: packed.dim(), bound })
}

/// Whether the enlarged balls `B(w_j, R_j + r)` of a shrink step are tested for regularity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnlargedCheck {
    #[default]
    Skip,
    /// Test and record the count of irregular enlarged balls.
    Record,
    /// Test and fail on the first irregular enlarged ball.
    Require,
}

#[derive(Clone, Debug)]
pub struct ShrinkOutcome {
    pub pair: CommutativePair,
    pub slack_in: Rational64,
    pub slack_out: Rational64,
    /// `None` when the enlarged balls were not tested.
    pub enlarged_irregular: Option<usize>,
    /// Spanning vectors of the enlarged balls.
    pub enlarged: Vec<Vector>,
    /// `slack_out ≤ slack_in + (n/R)·2^r`.
    pub bound: Assertion,
}

/// Cut a pair by the balls `w` placed inside it: the outer space loses
/// `span(w)`, the inner space loses the balls enlarged by `r`.
pub fn shrink_pair(
    t: &MatrixTuple,
    pair: &CommutativePair,
    w: &[RegularBall],
    r: u32,
    check: EnlargedCheck,
) -> Result<ShrinkOutcome> {
    let d = t.d();
    let mut ball_vectors = Vec::new();
    let mut enlarged_vectors = Vec::new();
    let mut irregular = 0usize;
    for b in w {
        let span = b.ball.span();
        if !span.is_subspace_of(&pair.outer) {
            return Err(Error::Precondition("ball does not lie in the outer space of the pair".into()));
        }
        ball_vectors.extend(span.basis().iter().cloned());
        let root = b.ball.root();
        let big = b.radius() + r;
        if check != EnlargedCheck::Skip {
            if let Regularity::NotRegular(diag) = check_regular(t, root, big)? {
                if check == EnlargedCheck::Require {
                    return Err(Error::Regularity { root: fmt_vec(root).join(", "), diagnosis: diag.to_string() });
                }
                irregular += 1;
            }
        }
        enlarged_vectors.extend(words_span(t, root, big)?.basis().iter().cloned());
    }
    let outer = restrict_orthogonal(&pair.outer, &ball_vectors)?;
    let inner = restrict_orthogonal(&pair.inner, &enlarged_vectors)?;
    let out = CommutativePair::new(inner, outer)?;
    let slack_in = pair.slack();
    let slack_out = out.slack();
    let rmin = w.iter().map(RegularBall::radius).min();
    let allowance = match rmin {
        Some(rr) => Rational64::new(t.n() as i64, rr as i64) * Rational64::from_integer(1i64 << r.min(62)),
        None => Rational64::from_integer(0),
    };
    let rhs = slack_in + allowance;
    let bound = Assertion::new(
        "slack-bound",
        format!("gap {r}, {} balls, d {d}", w.len()),
        to_f64(slack_out),
        to_f64(rhs),
        slack_out <= rhs,
    );
    Ok(ShrinkOutcome {
        pair: out,
        slack_in,
        slack_out,
        enlarged_irregular: (check != EnlargedCheck::Skip).then_some(irregular),
        bound,
        enlarged: enlarged_vectors,
    })
}

/// Per-round record of the multi-ballspace construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub radius: u32,
    pub inner_dim: usize,
    pub outer_dim: usize,
    pub balls: usize,
    pub covered: usize,
    pub escalated: bool,
    pub exclusions: Vec<Exclusion>,
    pub packing: Assertion,
    pub slack: Option<Assertion>,
    pub enlarged_irregular: Option<usize>,
}

/// Pairwise-orthogonal regular balls.
#[derive(Clone, Debug)]
pub struct MultiBallspace {
    pub d: usize,
    pub balls: Vec<RegularBall>,
    /// Round index of each ball.
    pub rounds_of: Vec<usize>,
    pub core_dim: usize,
    pub rounds: Vec<RoundReport>,
}

impl MultiBallspace {
    pub fn empty(d: usize) -> Self {
        MultiBallspace { d, balls: Vec::new(), rounds_of: Vec::new(), core_dim: 0, rounds: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.balls.iter().map(RegularBall::dim).sum()
    }

    pub fn coverage(&self) -> Rational64 {
        ratio(self.dim(), self.d)
    }

    pub fn span(&self) -> Result<Subspace> {
        let vecs = self.balls.iter().flat_map(|b| b.ball.span().basis().iter().cloned()).collect();
        Subspace::from_vectors(self.d, vecs)
    }

    /// Exact pairwise orthogonality of the ball spans.
    pub fn is_orthogonal(&self) -> bool {
        for (i, a) in self.balls.iter().enumerate() {
            for b in &self.balls[i + 1..] {
                for u in a.ball.span().basis() {
                    for v in b.ball.span().basis() {
                        if !inner(u, v).is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn assertions(&self) -> Vec<Assertion> {
        let mut out = Vec::new();
        for r in &self.rounds {
            out.push(r.packing.clone());
            out.extend(r.slack.clone());
        }
        out
    }
}

/// A failed construction, with what was built before the failure.
#[derive(Debug)]
pub struct BuildFailure {
    pub error: Error,
    pub partial: MultiBallspace,
}

impl fmt::Display for BuildFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} balls)", self.error, self.partial.balls.len())
    }
}

impl std::error::Error for BuildFailure {}

impl From<Box<BuildFailure>> for Error {
    fn from(b: Box<BuildFailure>) -> Self {
        match b.error {
            Error::Regularity { root, diagnosis } => Error::Regularity { root, diagnosis },
            e => Error::Construction(format!("{e} (after {} balls)", b.partial.balls.len())),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub policy: FailurePolicy,
    pub randomized: Option<u64>,
    pub enlarged: EnlargedCheck,
    /// Recompute the commutative core at each round's own margin instead of
    /// keeping the first round's core throughout.
    pub recore: bool,
}

/// Start from the commutative core as the inner space of `(S, ℂ^d)` and
/// alternate packing at `r_i` with shrinking by the gap `r_{i+1}`.
pub fn build_multiballspace(
    t: &MatrixTuple,
    schedule: &Schedule,
    opts: &BuildOptions,
) -> std::result::Result<MultiBallspace, Box<BuildFailure>> {
    let d = t.d();
    let mut w = MultiBallspace::empty(d);
    let fail = |error: Error, partial: &MultiBallspace| Box::new(BuildFailure { error, partial: partial.clone() });
    let radii = schedule.radii();
    let core = match t.n() {
        0 => Subspace::full(d),
        _ if t.n() == 1 => Subspace::full(d),
        _ => r_commutative_core(t, schedule.margin.at(radii[0]).max(2) as usize, None).map_err(|e| fail(e, &w))?,
    };
    w.core_dim = core.dim();
    let mut pair = CommutativePair { inner: core, outer: Subspace::full(d) };
    let mut enlarged_all: Vec<Vector> = Vec::new();
    for (i, &r) in radii.iter().enumerate() {
        if opts.recore && i > 0 && t.n() > 1 {
            // a larger core for the smaller margin, still cut by every enlarged ball so far
            let wider = r_commutative_core(t, schedule.margin.at(r).max(2) as usize, None)
                .and_then(|c| c.intersect(&pair.outer))
                .and_then(|c| restrict_orthogonal(&c, &enlarged_all))
                .and_then(|c| CommutativePair::new(c, pair.outer.clone()))
                .map_err(|e| fail(e, &w))?;
            pair = wider;
        }
        let pack_opts = PackOptions {
            margin: schedule.margin,
            policy: opts.policy,
            randomized: opts.randomized.map(|s| s.wrapping_add(i as u64)),
        };
        let pack = greedy_pack(t, &pair.inner, r, &pack_opts).map_err(|e| fail(e, &w))?;
        let mut report = RoundReport {
            radius: r,
            inner_dim: pair.inner.dim(),
            outer_dim: pair.outer.dim(),
            balls: pack.balls.len(),
            covered: pack.covered(),
            escalated: pack.escalated,
            exclusions: pack.exclusions.clone(),
            packing: pack.bound.clone(),
            slack: None,
            enlarged_irregular: None,
        };
        if let Some(&gap) = radii.get(i + 1) {
            match shrink_pair(t, &pair, &pack.balls, gap, opts.enlarged) {
                Ok(s) => {
                    report.slack = Some(s.bound);
                    report.enlarged_irregular = s.enlarged_irregular;
                    enlarged_all.extend(s.enlarged);
                    pair = s.pair;
                }
                Err(e) => {
                    w.rounds.push(report);
                    return Err(fail(e, &w));
                }
            }
        }
        w.rounds_of.extend(std::iter::repeat_n(i, pack.balls.len()));
        w.balls.extend(pack.balls);
        w.rounds.push(report);
        if pair.inner.is_zero() && !opts.recore {
            break;
        }
    }
    Ok(w)
}

/// Knobs of a full correction run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorrectionConfig {
    pub schedule: Schedule,
    pub search: PointSearch,
    /// Relative tolerance for float ranks of the output (distance, dense commutators).
    pub tol: f64,
    /// Accept matrices that are neither unitary nor self-adjoint.
    pub unsafe_general: bool,
    pub build: BuildOptions,
}

impl Default for CorrectionConfig {
    fn default() -> Self {
        CorrectionConfig {
            schedule: Schedule::default(),
            search: PointSearch::default(),
            tol: 1e-8,
            unsafe_general: false,
            build: BuildOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub closure_ms: f64,
    pub pack_ms: f64,
    pub models_ms: f64,
    pub assemble_ms: f64,
    pub metrics_ms: f64,
    pub total_ms: f64,
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub d: usize,
    pub n: usize,
    pub closed_n: usize,
    pub input_defect: Rational64,
    pub closed_defect: Rational64,
    pub distance: Rational64,
    pub coverage: Rational64,
    /// `Σ_j (dim B(w_j, R_j) − dim B(w_j, R_j − 1))/d`.
    pub top_layer_loss: Rational64,
    pub core_dim: usize,
    pub balls: usize,
    pub exclusions: usize,
    pub escalations: usize,
    pub exact_models: bool,
    /// Largest numerical rank of a dense output commutator (0 when commuting).
    pub dense_commutator_rank: usize,
    pub factored_commutators_zero: bool,
    pub target_met: bool,
    pub timings: Timings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSummary {
    pub index: usize,
    pub round: usize,
    pub layer_dims: Vec<usize>,
    pub report: BallReport,
    pub model: LocalModelReport,
    pub growth: Assertion,
}

/// The commuting output in factored form, its dense view and the run metrics.
#[derive(Clone, Debug)]
pub struct CorrectionResult {
    pub models: Vec<LocalModel>,
    pub balls: Vec<BallSummary>,
    /// `span(W)`; `π` is the orthogonal projection onto it.
    pub span: Subspace,
    /// Dense output for every matrix of the ⋆-closed tuple.
    pub assembled_full: MatrixTuple,
    pub origin: Vec<usize>,
    pub metrics: Metrics,
    pub rounds: Vec<RoundReport>,
    pub assertions: Vec<Assertion>,
}

impl CorrectionResult {
    /// The output restricted to the input's matrices.
    pub fn assembled(&self) -> MatrixTuple {
        self.assembled_full.truncate(self.metrics.n)
    }

    /// `π` as a dense exact matrix.
    pub fn projection(&self) -> Result<MatrixExact> {
        self.span.projector()
    }

    pub fn failed_assertions(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }

    pub fn to_json(&self, dense: bool) -> CorrectionJson {
        CorrectionJson {
            schema_version: SCHEMA_VERSION,
            metrics: self.metrics.clone(),
            rounds: self.rounds.clone(),
            balls: self.balls.clone(),
            assertions: self.assertions.clone(),
            factored: self
                .models
                .iter()
                .map(|m| FactoredBallJson { model: LocalModelJson::from(m), eigenbasis: FactorJson::from(&m.eigenbasis) })
                .collect(),
            projection_span: MatrixJson::from(&self.span.basis_matrix()),
            dense: dense.then(|| TupleJson::from(&self.assembled())),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactoredBallJson {
    pub model: LocalModelJson,
    /// `U = C·τ`: columns are the shared eigenvectors, as vectors of `ℂ^d`.
    pub eigenbasis: FactorJson,
}

/// Versioned JSON view of a correction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrectionJson {
    pub schema_version: u32,
    pub metrics: Metrics,
    pub rounds: Vec<RoundReport>,
    pub balls: Vec<BallSummary>,
    pub assertions: Vec<Assertion>,
    pub factored: Vec<FactoredBallJson>,
    /// Row basis of the multi-ballspace.
    pub projection_span: MatrixJson,
    pub dense: Option<TupleJson>,
}

fn ball_search(base: &PointSearch, j: usize) -> PointSearch {
    PointSearch { seed: base.seed ^ (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15), ..base.clone() }
}

/// Local models on every ball and the dense sum `B_i = Σ_j U_j Λ_ij U_j⁺`.
///
/// `t` must be the ⋆-closed tuple the balls were built from.
pub fn assemble(t: &MatrixTuple, w: &MultiBallspace, search: &PointSearch, tol: f64) -> Result<CorrectionResult> {
    assemble_for(t, t, (0..t.n()).collect(), w, search, tol, Timings::default())
}

fn assemble_for(
    raw: &MatrixTuple,
    closed: &MatrixTuple,
    origin: Vec<usize>,
    w: &MultiBallspace,
    search: &PointSearch,
    tol: f64,
    mut timings: Timings,
) -> Result<CorrectionResult> {
    let d = closed.d();
    let nc = closed.n();
    let n = raw.n();

    let clock = Instant::now();
    let models: Vec<LocalModel> = w
        .balls
        .par_iter()
        .enumerate()
        .map(|(j, ball)| {
            let points = find_separating_points(&ball.ideal, ball.radius(), ball.dim(), &ball_search(search, j))
                .map_err(|e| Error::Separation(format!("ball {j}: {e}")))?;
            build_local_model(ball, &points).map_err(|e| Error::Separation(format!("ball {j}: {e}")))
        })
        .collect::<Result<_>>()?;
    let reports: Vec<LocalModelReport> = models.par_iter().map(verify_local_model).collect();
    timings.models_ms = ms(clock);

    let clock = Instant::now();
    let exact = models.iter().all(LocalModel::is_exact);
    let assembled_full = if exact {
        let mut mats = vec![MatrixExact::zeros(d, d); nc];
        for m in &models {
            for (i, acc) in mats.iter_mut().enumerate() {
                if let Factor::Exact(b) = m.dense(i) {
                    *acc = acc.add(&b)?;
                }
            }
        }
        MatrixTuple::general(mats)?
    } else {
        let mut mats = vec![nalgebra::DMatrix::<Complex64>::zeros(d, d); nc];
        for m in &models {
            for (i, acc) in mats.iter_mut().enumerate() {
                *acc += m.dense(i).to_float();
            }
        }
        let mats = mats.into_iter().map(|m| MatrixFloat::new(m, tol)).collect();
        MatrixTuple::new_float(mats, vec![Flag::General; nc])?
    };
    timings.assemble_ms = ms(clock);

    let clock = Instant::now();
    let output = assembled_full.truncate(n);
    let distance = if exact { rank_distance(raw, &output)? } else { rank_distance(&raw.to_float(tol), &output)? };
    let coverage = w.coverage();
    let top: usize = w
        .balls
        .iter()
        .map(|b| {
            let l = b.ball.layer_dims();
            let r = b.radius() as usize;
            l[r] - l[r - 1]
        })
        .sum();
    let top_layer_loss = ratio(top, d);

    let mut assertions = w.assertions();
    let accounting = Rational64::from_integer(1) - coverage + top_layer_loss;
    assertions.push(Assertion::new(
        "coverage-accounting",
        "distance ≤ (1 − coverage) + top-layer loss",
        to_f64(distance),
        to_f64(accounting),
        distance <= accounting,
    ));
    let orthogonal = w.is_orthogonal();
    assertions.push(Assertion::new("orthogonality", "ball spans", 0.0, 0.0, orthogonal));

    let mut balls = Vec::with_capacity(w.balls.len());
    for (j, (b, rep)) in w.balls.iter().zip(&reports).enumerate() {
        let l = b.ball.layer_dims().to_vec();
        let r = b.radius() as usize;
        let (hi, lo) = (l[r], l[r - 1]);
        // R·(dim B_R − dim B_{R−1}) ≤ n·dim B_{R−1}
        let growth = Assertion::new(
            "growth-bound",
            format!("ball {j}"),
            (hi - lo) as f64,
            nc as f64 / r as f64 * lo as f64,
            r * (hi - lo) <= nc * lo,
        );
        assertions.push(growth.clone());
        assertions.push(Assertion::new("local-model", format!("ball {j}"), rep.factorization_residual, 0.0, rep.passed()));
        balls.push(BallSummary { index: j, round: w.rounds_of[j], layer_dims: l, report: b.report(Some(j)), model: rep.clone(), growth });
    }

    // factored commutators U[Λ_i, Λ_k]U⁺ vanish when every model's U⁺U = I
    let factored_zero = reports.iter().all(|r| r.commutation_ok) && orthogonal;
    assertions.push(Assertion::new("factored-commutation", "all balls", 0.0, 0.0, factored_zero));
    let dense_rank = dense_commutator_rank(&assembled_full, tol)?;
    assertions.push(Assertion::new("dense-commutation", format!("tol {tol:e}"), dense_rank as f64, 0.0, dense_rank == 0));

    let input_defect = commutator_defect(raw)?;
    let closed_defect = if nc == n { input_defect } else { commutator_defect(closed)? };
    assertions.push(Assertion::new(
        "adjoint-closure",
        "defect after closure ≤ defect before",
        to_f64(closed_defect),
        to_f64(input_defect),
        closed_defect <= input_defect,
    ));
    timings.metrics_ms = ms(clock);

    let span = w.span()?;
    let metrics = Metrics {
        d,
        n,
        closed_n: nc,
        input_defect,
        closed_defect,
        distance,
        coverage,
        top_layer_loss,
        core_dim: w.core_dim,
        balls: w.balls.len(),
        exclusions: w.rounds.iter().map(|r| r.exclusions.len()).sum(),
        escalations: w.rounds.iter().filter(|r| r.escalated).count(),
        exact_models: exact,
        dense_commutator_rank: dense_rank,
        factored_commutators_zero: factored_zero,
        target_met: false,
        timings,
    };
    Ok(CorrectionResult { models, balls, span, assembled_full, origin, metrics, rounds: w.rounds.clone(), assertions })
}

/// Largest numerical rank of `[B_i, B_k]`; exact tuples report exact rank.
fn dense_commutator_rank(t: &MatrixTuple, tol: f64) -> Result<usize> {
    let mut best = 0;
    match t.backend() {
        Backend::Exact => {
            let m = t.exact()?;
            for i in 0..m.len() {
                for k in i + 1..m.len() {
                    best = best.max(m[i].commutator(&m[k])?.rank());
                }
            }
        }
        Backend::Float => {
            let m = t.float_mats().expect("float tuple");
            for i in 0..m.len() {
                for k in i + 1..m.len() {
                    let c = m[i].commutator(&m[k])?.with_tol(tol);
                    best = best.max(c.numerical_rank_scaled(m[i].frobenius_norm() * m[k].frobenius_norm())?);
                }
            }
        }
    }
    Ok(best)
}

/// ⋆-close, build the multi-ballspace, assemble, and measure against the input.
pub fn correct(t_raw: &MatrixTuple, config: &CorrectionConfig) -> Result<CorrectionResult> {
    let total = Instant::now();
    if t_raw.backend() != Backend::Exact {
        return Err(Error::Config("correction runs on the exact backend".into()));
    }
    if !config.unsafe_general && t_raw.flags().contains(&Flag::General) {
        return Err(Error::Precondition("every matrix must be unitary or self-adjoint (set unsafe_general to override)".into()));
    }
    let mut timings = Timings::default();
    let clock = Instant::now();
    let (closed, origin) = star_close_with_origin(t_raw)?;
    timings.closure_ms = ms(clock);

    let clock = Instant::now();
    let w = build_multiballspace(&closed, &config.schedule, &config.build)?;
    timings.pack_ms = ms(clock);

    let mut result = assemble_for(t_raw, &closed, origin, &w, &config.search, config.tol, timings)?;
    result.metrics.target_met = to_f64(result.metrics.distance) <= config.schedule.target_eps;
    result.metrics.timings.total_ms = ms(total);
    Ok(result)
}
