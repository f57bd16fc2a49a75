//! The property suites of every module, run on seeded random cases, plus the
//! assertions recorded by a batch of corrections.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::experiment::{run_specs, ExperimentConfig, Family, GridEntry, InstanceSpec, Report};
use super::generators::{gen_commuting_plus_noise, gen_permutation_pair, random_ideal, random_rational_matrix, rng_for};
use crate::ballspace::{build_ball, check_regular, vanishing_relations, Regularity};
use crate::diagonalize::{build_local_model, find_separating_points, verify_local_model, PointSearch, VarietyPoint};
use crate::error::Result;
use crate::float::MatrixFloat;
use crate::linalg::{Echelon, MatrixExact, Vector};
use crate::polyring::{monomials_up_to, Ideal, Monomial, Poly};
use crate::scalar::Scalar;
use crate::tuples::{
    commutator_defect, evaluate_word, is_r_commutative_on, r_commutative_core, rank_distance, star_close, Flag,
    MatrixTuple, Word,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random cases per property.
    pub cases: usize,
    /// Corrections whose recorded assertions are checked.
    pub experiment: ExperimentConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            cases: 30,
            experiment: ExperimentConfig {
                grid: vec![
                    GridEntry { family: Family::CommutingPlusNoise, d: vec![8, 16], n: vec![2], noise_rank: vec![0, 1], seeds: 2 },
                    GridEntry { family: Family::PermutationPair, d: vec![9, 16], n: vec![2], noise_rank: vec![0, 1], seeds: 1 },
                ],
                ..ExperimentConfig::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub module: String,
    pub property: String,
    pub cases: usize,
    pub failures: usize,
    /// The first failing case, if any.
    pub example: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub results: Vec<SuiteResult>,
    pub reports: usize,
    pub passed: bool,
}

struct Tally(SuiteResult);

impl Tally {
    fn new(module: &str, property: &str) -> Self {
        Tally(SuiteResult { module: module.into(), property: property.into(), cases: 0, failures: 0, example: None })
    }

    fn record(&mut self, outcome: Result<bool>, case: impl FnOnce() -> String) {
        self.0.cases += 1;
        let failure = match outcome {
            Ok(true) => return,
            Ok(false) => case(),
            Err(e) => format!("{}: {e}", case()),
        };
        self.0.failures += 1;
        self.0.example.get_or_insert(failure);
    }
}

fn small_matrix(rng: &mut impl Rng, max_dim: usize) -> MatrixExact {
    let rows = rng.random_range(1..=max_dim);
    let cols = rng.random_range(1..=max_dim);
    let rank = rng.random_range(0..=rows.min(cols));
    random_rational_matrix(rows, cols, rank, rng)
}

fn random_combination(basis: &[Vector], d: usize, rng: &mut impl Rng) -> Vector {
    let mut v = vec![Scalar::zero(); d];
    for b in basis {
        crate::linalg::axpy(&mut v, &Scalar::from_int(rng.random_range(-3..=3)), b);
    }
    v
}

fn linalg_suites(seed: u64, cases: usize) -> Vec<SuiteResult> {
    let mut rng = rng_for(seed, 101);
    let mut nullity = Tally::new("scalar-linalg", "rank-nullity");
    let mut subadd = Tally::new("scalar-linalg", "rank subadditivity");
    let mut complement = Tally::new("scalar-linalg", "double complement");
    let mut projection = Tally::new("scalar-linalg", "projection fixes members");
    let mut oracle = Tally::new("scalar-linalg", "exact and float rank agree");
    for k in 0..cases {
        let a = small_matrix(&mut rng, 8);
        nullity.record(Ok(a.kernel().dim() + a.image().dim() == a.cols()), || format!("case {k}"));

        let b = random_rational_matrix(a.rows(), a.cols(), rng.random_range(0..=3), &mut rng);
        let c = random_rational_matrix(a.cols(), rng.random_range(1..=8), rng.random_range(0..=3), &mut rng);
        let ok = a.add(&b).map(|s| s.rank() <= a.rank() + b.rank()).and_then(|x| {
            let p = a.mul(&c)?;
            Ok(x && p.rank() <= a.rank().min(c.rank()))
        });
        subadd.record(ok, || format!("case {k}"));

        let s = a.image();
        complement.record(Ok(s.orth_complement().orth_complement() == s), || format!("case {k}"));
        let v = random_combination(s.basis(), s.ambient_dim(), &mut rng);
        projection.record(s.project_onto(&v).map(|p| p == v), || format!("case {k}"));

        let exact = a.rank();
        let float = MatrixFloat::from_exact(&a, 1e-10).numerical_rank();
        oracle.record(float.map(|f| f == exact), || format!("case {k}: exact rank {exact}"));
    }
    vec![nullity.0, subadd.0, complement.0, projection.0, oracle.0]
}

/// Unitary or self-adjoint tuples with small commutator defect.
fn random_structured_tuple(rng: &mut impl Rng) -> Result<MatrixTuple> {
    let seed = rng.random();
    match rng.random_range(0..3) {
        0 => gen_commuting_plus_noise(rng.random_range(4..=16), 2, rng.random_range(0..=2), seed),
        1 => {
            let side = rng.random_range(2..=4);
            gen_permutation_pair(side, rng.random_range(0..=2), seed)
        }
        _ => {
            let side = rng.random_range(2..=4);
            let p = gen_permutation_pair(side, 0, seed)?;
            let s = gen_commuting_plus_noise(side * side, 1, rng.random_range(0..=1), seed)?;
            let mats = vec![p.exact()?[0].clone(), s.exact()?[0].clone()];
            MatrixTuple::new(mats, vec![Flag::Unitary, Flag::SelfAdjoint])
        }
    }
}

fn tuple_suites(seed: u64, cases: usize) -> Vec<SuiteResult> {
    let mut rng = rng_for(seed, 102);
    let mut idem = Tally::new("tuples", "adjoint closure is idempotent");
    let mut closure = Tally::new("tuples", "adjoint closure does not raise the defect");
    let mut core = Tally::new("tuples", "commutative core is r-commutative");
    let mut empty = Tally::new("tuples", "empty word is the identity");
    let mut hamming = Tally::new("tuples", "rank distance below Hamming distance");
    for k in 0..cases {
        let t = match random_structured_tuple(&mut rng) {
            Ok(t) => t,
            Err(e) => {
                idem.record(Err(e), || format!("case {k}"));
                continue;
            }
        };
        let once = star_close(&t);
        let ok = once.as_ref().map_err(|e| e.to_string()).and_then(|c| {
            let twice = star_close(c).map_err(|e| e.to_string())?;
            let a = c.exact().map_err(|e| e.to_string())?;
            let b = twice.exact().map_err(|e| e.to_string())?;
            Ok(a.len() == b.len() && b.iter().all(|m| a.contains(m)))
        });
        idem.record(Ok(ok.unwrap_or(false)), || format!("case {k}"));

        let ok = once.and_then(|c| Ok(commutator_defect(&c)? <= commutator_defect(&t)?));
        closure.record(ok, || format!("case {k}"));

        let r = rng.random_range(2..=5);
        let ok = r_commutative_core(&t, r, None).and_then(|s| is_r_commutative_on(&t, &s, r));
        core.record(ok, || format!("case {k}, r {r}"));

        let v: Vector = (0..t.d()).map(|_| Scalar::from_int(rng.random_range(-5..=5))).collect();
        empty.record(evaluate_word(&t, &v, &Word::empty()).map(|w| w == v), || format!("case {k}"));

        let side = rng.random_range(2..=5);
        let defects = rng.random_range(0..=3);
        let s = rng.random();
        let ok = gen_permutation_pair(side, 0, s).and_then(|clean| {
            let bent = gen_permutation_pair(side, defects, s)?;
            let d = side * side;
            let moved = (0..2)
                .map(|i| {
                    let (a, b) = (&clean.exact()?[i], &bent.exact()?[i]);
                    Ok((0..d).filter(|&c| a.column(c) != b.column(c)).count())
                })
                .collect::<Result<Vec<_>>>()?;
            let hd = num_rational::Rational64::new(*moved.iter().max().unwrap() as i64, d as i64);
            Ok(rank_distance(&clean, &bent)? <= hd)
        });
        hamming.record(ok, || format!("side {side}, defects {defects}"));
    }
    vec![idem.0, closure.0, core.0, empty.0, hamming.0]
}

/// Degree-bounded membership: `f ∈ span{m·g : deg(m·g) ≤ D}`. The span grows
/// with `D`, so one check at the bound covers all smaller degrees.
fn span_member(ideal: &Ideal, f: &Poly, big_d: u32) -> bool {
    if f.is_zero() {
        return true;
    }
    let n = ideal.nvars();
    let monos = monomials_up_to(n, big_d);
    let index: HashMap<Monomial, usize> = monos.iter().enumerate().map(|(k, m)| (*m, k)).collect();
    let to_vec = |p: &Poly| {
        let mut v = vec![Scalar::zero(); monos.len()];
        for (m, c) in p.terms() {
            v[index[m]] = c.clone();
        }
        v
    };
    let mut span = Echelon::new(monos.len());
    for g in ideal.generators() {
        let Some(dg) = g.degree() else { continue };
        if dg > big_d {
            continue;
        }
        for m in monomials_up_to(n, big_d - dg) {
            span.insert(&to_vec(&g.mul_term(&m, &Scalar::one())));
        }
    }
    span.contains(&to_vec(f))
}

fn polyring_suites(seed: u64, cases: usize) -> Vec<SuiteResult> {
    let mut rng = rng_for(seed, 103);
    let mut idem = Tally::new("polyring", "normal form is idempotent");
    let mut oracle = Tally::new("polyring", "membership agrees with the span oracle");
    let mut growth = Tally::new("polyring", "growth bound never violated");
    let mut filtration = Tally::new("polyring", "filtration monotone, constant iff finite quotient");
    for k in 0..cases {
        let n = rng.random_range(1..=3);
        let ideal = random_ideal(n, rng.random_range(1..=4), 3, &mut rng);
        let label = || format!("{:?}", ideal.generators());

        let f = random_ideal(n, 1, 3, &mut rng).generators()[0].clone();
        let ok = ideal.normal_form(&f).and_then(|r| Ok(ideal.normal_form(&r)? == r));
        idem.record(ok, label);

        // a constructed member and a random polynomial
        let h = random_ideal(n, ideal.generators().len(), 1, &mut rng);
        let member = ideal.generators().iter().zip(h.generators()).fold(Poly::zero(n), |acc, (g, c)| acc.add(&g.mul(c)));
        for p in [member, f] {
            let bound = p.degree().unwrap_or(0).max(3) + 6;
            let ok = ideal.ideal_member(&p).map(|gb| gb == span_member(&ideal, &p, bound));
            oracle.record(ok, || format!("{p} in {:?}", ideal.generators()));
        }

        growth.record(ideal.macaulay_check(8).map(|rows| rows.iter().all(|r| r.ok)), label);

        let ok = ideal.filtration_dims(12).and_then(|f| {
            let flat = f.dims[12] == f.dims[11];
            // the unit ideal has the zero quotient but no points
            let finite = ideal.is_zero_dimensional()? || ideal.is_unit()?;
            Ok(f.is_monotone() && flat == finite)
        });
        filtration.record(ok, || format!("case {k}: {:?}", ideal.generators()));
    }
    vec![idem.0, oracle.0, growth.0, filtration.0]
}

fn clean_closed_tuple(rng: &mut impl Rng) -> Result<MatrixTuple> {
    let seed = rng.random();
    if rng.random_bool(0.5) {
        gen_commuting_plus_noise(rng.random_range(4..=12), 2, 0, seed)
    } else {
        star_close(&gen_permutation_pair(rng.random_range(2..=4), 0, seed)?)
    }
}

fn ball_suites(seed: u64, cases: usize) -> Vec<SuiteResult> {
    let mut rng = rng_for(seed, 104);
    let mut mono = Tally::new("ballspace", "balls grow monotonically within the free bound");
    let mut transfer = Tally::new("ballspace", "regular balls satisfy the growth bound");
    let mut roundtrip = Tally::new("ballspace", "phi round trip");
    let mut sound = Tally::new("ballspace", "relations vanish at the root");
    let mut regular = Tally::new("ballspace", "commuting tuples give regular balls");
    let mut residual = Tally::new("diagonalize", "point residuals within bound");
    let mut model = Tally::new("diagonalize", "local models verify (intertwining, commutation)");
    for k in 0..cases {
        let t = match clean_closed_tuple(&mut rng) {
            Ok(t) => t,
            Err(e) => {
                regular.record(Err(e), || format!("case {k}"));
                continue;
            }
        };
        let n = t.n();
        let d = t.d();
        let w: Vector = (0..d).map(|_| Scalar::from_int(rng.random_range(-2..=2))).collect();
        if w.iter().all(Scalar::is_zero) {
            continue;
        }
        let r = rng.random_range(1..=4u32);
        let label = || format!("case {k}, d {d}, n {n}, R {r}");

        let ok = build_ball(&t, &w, r).and_then(|b| {
            let lower = build_ball(&t, &w, r - 1)?;
            let free = (0..=r).map(|i| monomials_up_to(n, i).len());
            let within = b.layer_dims().iter().zip(free).all(|(&x, f)| x <= f);
            Ok(lower.span().is_subspace_of(b.span()) && b.layer_dims().windows(2).all(|p| p[0] <= p[1]) && within)
        });
        mono.record(ok, label);

        let ok = vanishing_relations(&t, &w, r, false).and_then(|rels| {
            let mut all = true;
            for rel in &rels.relations {
                let mut acc = vec![Scalar::zero(); d];
                for (m, c) in rel.terms() {
                    crate::linalg::axpy(&mut acc, c, &evaluate_word(&t, &w, &Word(m.sorted_letters()))?);
                }
                all &= acc.iter().all(Scalar::is_zero);
            }
            Ok(all)
        });
        sound.record(ok, label);

        let ball = match check_regular(&t, &w, r) {
            Ok(Regularity::Regular(b)) => {
                regular.record(Ok(true), label);
                *b
            }
            Ok(Regularity::NotRegular(diag)) => {
                regular.record(Ok(false), || format!("{}: {diag}", label()));
                continue;
            }
            Err(e) => {
                regular.record(Err(e), label);
                continue;
            }
        };
        transfer.record(ball.ideal.macaulay_check(r).map(|rows| rows.iter().all(|x| x.ok)), label);
        let rt = ball.ball.span().basis().iter().all(|v| ball.phi(v).map(|c| ball.phi_inverse(&c) == *v).unwrap_or(false));
        roundtrip.record(Ok(rt), label);

        let search = PointSearch { seed: k as u64, ..PointSearch::default() };
        match find_separating_points(&ball.ideal, r, ball.dim(), &search) {
            Ok(points) => {
                let ok = ball.ideal.groebner_basis().map(|g| {
                    points.iter().all(|p| match p {
                        VarietyPoint::Exact(x) => g.iter().all(|f| f.eval(x).is_zero()),
                        VarietyPoint::Approx { coords, .. } => {
                            g.iter().all(|f| f.eval_c64(coords).norm() <= search.residual_bound)
                        }
                    })
                });
                residual.record(ok, label);
                let ok = build_local_model(&ball, &points).map(|m| verify_local_model(&m).passed());
                model.record(ok, label);
            }
            Err(e) => model.record(Err(e), label),
        }
    }
    vec![mono.0, sound.0, regular.0, transfer.0, roundtrip.0, residual.0, model.0]
}

fn pipeline_suites(reports: &[Report]) -> Vec<SuiteResult> {
    let mut by_check: BTreeMap<String, Tally> = BTreeMap::new();
    let mut commutation = Tally::new("pipeline", "output commutes");
    for r in reports {
        let label = || format!("{:?}", r.spec);
        match &r.metrics {
            Some(m) => commutation.record(Ok(m.factored_commutators_zero && m.dense_commutator_rank == 0), label),
            None => commutation.record(Ok(false), || format!("{}: {}", label(), r.error.clone().unwrap_or_default())),
        }
        for a in r.assertions.iter().filter(|a| a.check != "generator-bound") {
            by_check
                .entry(a.check.clone())
                .or_insert_with(|| Tally::new("pipeline", &a.check))
                .record(Ok(a.passed), || format!("{}: {a}", label()));
        }
    }
    let mut out = vec![commutation.0];
    out.extend(by_check.into_values().map(|t| t.0));
    out
}

fn harness_suites(config: &VerifyConfig, reports: &[Report]) -> Vec<SuiteResult> {
    let mut det = Tally::new("harness", "generators are deterministic");
    let mut honest = Tally::new("harness", "declared defect bounds hold");
    let mut isolation = Tally::new("harness", "a failing instance stays isolated");
    for spec in config.experiment.instances() {
        let ok = spec.generate().and_then(|a| {
            let b = spec.generate()?;
            Ok(serde_json::to_string(&a)? == serde_json::to_string(&b)?)
        });
        det.record(ok, || format!("{spec:?}"));
    }
    for r in reports {
        honest.record(Ok(r.generator.passed), || format!("{:?}: {}", r.spec, r.generator));
    }
    // a malformed spec next to a good one
    let good = InstanceSpec::commuting_plus_noise(6, 2, 1, config.seed);
    let bad = InstanceSpec { noise_rank: 6, ..good.clone() };
    let batch = run_specs(&[good.clone(), bad.clone()], &config.experiment.correction, false);
    let alone = run_specs(&[good], &config.experiment.correction, false);
    let ok = batch.len() == 2 && batch.iter().filter(|r| !r.ok).count() == 1 && batch.iter().any(|r| r.ok && *r == alone[0]);
    isolation.record(Ok(ok), || "good instance changed by a failing neighbour".into());
    vec![det.0, honest.0, isolation.0]
}

/// Run every property suite and check the assertions of a correction batch.
pub fn verify_suite(config: &VerifyConfig) -> SuiteSummary {
    let mut results = Vec::new();
    results.extend(linalg_suites(config.seed, config.cases));
    results.extend(tuple_suites(config.seed, config.cases));
    results.extend(polyring_suites(config.seed, config.cases));
    results.extend(ball_suites(config.seed, config.cases));
    let reports = super::experiment::run_experiment(&config.experiment);
    results.extend(pipeline_suites(&reports));
    results.extend(harness_suites(config, &reports));
    let passed = results.iter().all(SuiteResult::passed);
    SuiteSummary { results, reports: reports.len(), passed }
}
