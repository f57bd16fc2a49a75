//! Invariants as property tests. Instances come from seeded generators so a
//! failing case shrinks to a small seed and size.

mod common;

use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{rat, span_member};
use rankstab::ballspace::{build_ball, check_regular, vanishing_relations};
use rankstab::diagonalize::{build_local_model, find_separating_points, verify_local_model, PointSearch, VarietyPoint};
use rankstab::float::MatrixFloat;
use rankstab::harness::{
    gen_commuting_plus_noise, gen_permutation_pair, random_ideal, random_rational_matrix, InstanceSpec,
};
use rankstab::linalg::{unit_vector, MatrixExact, Subspace, Vector};
use rankstab::pipeline::{correct, greedy_pack, CorrectionConfig, Margin, PackOptions};
use rankstab::polyring::{monomials_up_to, Poly};
use rankstab::scalar::Scalar;
use rankstab::tuples::{
    evaluate_word, is_r_commutative_at, is_r_commutative_on, r_commutative_core, rank_distance, star_close, Flag, MatrixTuple, Word,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix(rows: usize, cols: usize, rank: usize, r: &mut ChaCha8Rng) -> MatrixExact {
    let re = random_rational_matrix(rows, cols, rank, r);
    let im = random_rational_matrix(rows, cols, rank, r);
    // (re + i·im) restricted to a common rank-`rank` row space
    let p = random_rational_matrix(cols, cols, rank, r);
    let z = MatrixExact::from_fn(rows, cols, |a, b| re.get(a, b) + &(&Scalar::i() * im.get(a, b)));
    z.mul(&p).unwrap()
}

fn random_subspace(d: usize, k: usize, r: &mut ChaCha8Rng) -> Subspace {
    let m = random_rational_matrix(k.max(1), d, k, r);
    Subspace::from_vectors(d, m.row_vectors()).unwrap()
}

fn small_tuple(seed: u64, kind: u8) -> MatrixTuple {
    let mut r = rng(seed);
    match kind % 2 {
        0 => gen_commuting_plus_noise(r.random_range(4..=12), 2, r.random_range(0..=2), seed).unwrap(),
        _ => gen_permutation_pair(r.random_range(2..=3), r.random_range(0..=2), seed).unwrap(),
    }
}

fn perm_matrix(p: &[usize]) -> MatrixExact {
    MatrixExact::from_fn(p.len(), p.len(), |r, c| if p[c] == r { Scalar::one() } else { Scalar::zero() })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_nullity(rows in 1usize..9, cols in 1usize..9, rank in 0usize..9, seed: u64) {
        let m = random_rational_matrix(rows, cols, rank, &mut rng(seed));
        prop_assert_eq!(m.kernel().dim() + m.image().dim(), cols);
        prop_assert_eq!(m.image().dim(), m.rank());
    }

    #[test]
    fn rank_subadditivity(n in 1usize..8, ra in 0usize..8, rb in 0usize..8, seed: u64) {
        let mut r = rng(seed);
        let a = random_rational_matrix(n, n, ra, &mut r);
        let b = random_rational_matrix(n, n, rb, &mut r);
        prop_assert!(a.add(&b).unwrap().rank() <= a.rank() + b.rank());
        prop_assert!(a.mul(&b).unwrap().rank() <= a.rank().min(b.rank()));
    }

    #[test]
    fn double_complement_and_projection(d in 1usize..9, k in 0usize..9, seed: u64) {
        let mut r = rng(seed);
        let s = random_subspace(d, k.min(d), &mut r);
        prop_assert_eq!(&s.orth_complement().orth_complement(), &s);
        for v in s.basis() {
            prop_assert_eq!(&s.project_onto(v).unwrap(), v);
        }
        let c = s.orth_complement();
        prop_assert_eq!(s.dim() + c.dim(), d);
        prop_assert!(s.is_orthogonal_to(&c));
    }

    #[test]
    fn exact_and_float_rank_agree_on_gaussian_rationals(rows in 1usize..10, cols in 1usize..10, rank in 0usize..10, seed: u64) {
        let m = gaussian_matrix(rows, cols, rank, &mut rng(seed));
        prop_assert_eq!(MatrixFloat::from_exact(&m, 1e-10).numerical_rank().unwrap(), m.rank());
    }

    #[test]
    fn star_close_is_idempotent(seed: u64, kind: u8) {
        let t = small_tuple(seed, kind);
        let once = star_close(&t).unwrap();
        let twice = star_close(&once).unwrap();
        let a = once.exact().unwrap();
        let b = twice.exact().unwrap();
        prop_assert_eq!(a.len(), b.len());
        prop_assert!(b.iter().all(|m| a.contains(m)));
        prop_assert!(once.is_star_closed().unwrap());
    }

    #[test]
    fn core_is_r_commutative(seed: u64, kind: u8, r in 2usize..6) {
        let t = star_close(&small_tuple(seed, kind)).unwrap();
        let core = r_commutative_core(&t, r, None).unwrap();
        prop_assert!(is_r_commutative_on(&t, &core, r).unwrap());
    }

    #[test]
    fn empty_word_is_identity(seed: u64, kind: u8) {
        let t = small_tuple(seed, kind);
        let mut r = rng(seed ^ 1);
        let w: Vector = (0..t.d()).map(|_| Scalar::from_int(r.random_range(-3..=3))).collect();
        prop_assert_eq!(evaluate_word(&t, &w, &Word::empty()).unwrap(), w);
    }

    #[test]
    fn permutation_distance_below_hamming(d in 2usize..12, seed: u64) {
        let mut r = rng(seed);
        let mut p: Vec<usize> = (0..d).collect();
        let mut q = p.clone();
        for k in (1..d).rev() {
            p.swap(k, r.random_range(0..=k));
        }
        for _ in 0..r.random_range(0..3) {
            let (a, b) = (r.random_range(0..d), r.random_range(0..d));
            q.swap(a, b);
        }
        let q: Vec<usize> = q.iter().map(|&x| p[x]).collect();
        let moved = (0..d).filter(|&x| p[x] != q[x]).count();
        let a = MatrixTuple::new(vec![perm_matrix(&p)], vec![Flag::Unitary]).unwrap();
        let b = MatrixTuple::new(vec![perm_matrix(&q)], vec![Flag::Unitary]).unwrap();
        prop_assert!(rank_distance(&a, &b).unwrap() <= Rational64::new(moved as i64, d as i64));
    }

    #[test]
    fn rank_distance_triangle(n in 2usize..7, seed: u64) {
        let mut r = rng(seed);
        let mk = |r: &mut ChaCha8Rng| {
            let k = r.random_range(0..=n);
            MatrixTuple::general(vec![random_rational_matrix(n, n, k, r)]).unwrap()
        };
        let (a, b, c) = (mk(&mut r), mk(&mut r), mk(&mut r));
        let ab = rank_distance(&a, &b).unwrap();
        let bc = rank_distance(&b, &c).unwrap();
        prop_assert!(rank_distance(&a, &c).unwrap() <= ab + bc);
    }

    #[test]
    fn normal_form_is_idempotent(n in 1usize..4, g in 1usize..5, seed: u64) {
        let mut r = rng(seed);
        let ideal = random_ideal(n, g, 3, &mut r);
        let monos = monomials_up_to(n, 4);
        let f = Poly::from_terms(
            n,
            (0..4).map(|_| (monos[r.random_range(0..monos.len())], Scalar::from_int(r.random_range(-3..=3)))).collect(),
        );
        let once = ideal.normal_form(&f).unwrap();
        prop_assert_eq!(ideal.normal_form(&once).unwrap(), once.clone());
        // f − NF(f) is a member
        prop_assert!(ideal.ideal_member(&f.sub(&once)).unwrap());
    }

    #[test]
    fn membership_matches_span_oracle(n in 1usize..3, g in 1usize..4, seed: u64) {
        let mut r = rng(seed);
        let ideal = random_ideal(n, g, 2, &mut r);
        let monos = monomials_up_to(n, 2);
        let combo = ideal.generators().iter().fold(Poly::zero(n), |acc, p| {
            let h = Poly::from_terms(n, vec![(monos[r.random_range(0..monos.len())], Scalar::from_int(r.random_range(-2..=2)))]);
            acc.add(&p.mul(&h))
        });
        let stray = Poly::from_terms(n, vec![(monos[r.random_range(0..monos.len())], Scalar::one())]);
        for f in [combo, stray] {
            let big_d = f.degree().unwrap_or(0).max(3) + 6;
            prop_assert_eq!(ideal.ideal_member(&f).unwrap(), span_member(n, ideal.generators(), &f, big_d));
        }
    }

    #[test]
    fn filtrations_obey_growth_and_stabilize_iff_finite(n in 1usize..4, g in 1usize..5, seed: u64) {
        let ideal = random_ideal(n, g, 3, &mut rng(seed));
        prop_assert!(ideal.macaulay_check(8).unwrap().iter().all(|row| row.ok));
        let dims = ideal.filtration_dims(12).unwrap().dims;
        prop_assert!(dims.windows(2).all(|w| w[0] <= w[1]));
        let finite = ideal.is_zero_dimensional().unwrap() || ideal.is_unit().unwrap();
        // an infinite quotient has standard monomials in every degree; a finite one
        // stops growing (by degree 12 for these small ideals) and stays put
        match dims.windows(2).position(|w| w[0] == w[1]) {
            Some(k) => {
                prop_assert!(finite);
                prop_assert!(dims[k..].iter().all(|&x| x == dims[k]));
            }
            None => prop_assert!(!finite),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn balls_are_monotone_and_regular_balls_transfer(seed: u64, kind: u8, r in 1u32..4) {
        let t = star_close(&small_tuple(seed, kind)).unwrap();
        let mut g = rng(seed ^ 2);
        let w: Vector = (0..t.d()).map(|_| Scalar::from_int(g.random_range(-2..=2))).collect();
        let big = build_ball(&t, &w, r).unwrap();
        let small = build_ball(&t, &w, r - 1).unwrap();
        prop_assert!(small.span().is_subspace_of(big.span()));
        if is_r_commutative_at(&t, &w, r as usize).unwrap() {
            prop_assert!(big.dim() <= monomials_up_to(t.n(), r).len());
        }
        // relations vanish at the root along sorted words
        for rel in vanishing_relations(&t, &w, r, false).unwrap().relations {
            let mut acc = vec![Scalar::zero(); t.d()];
            for (m, c) in rel.terms() {
                let v = evaluate_word(&t, &w, &Word(m.sorted_letters())).unwrap();
                for (a, x) in acc.iter_mut().zip(&v) {
                    *a = &*a + &(c * x);
                }
            }
            prop_assert!(acc.iter().all(Scalar::is_zero));
        }
        if let Some(reg) = check_regular(&t, &w, r).unwrap().into_regular() {
            prop_assert!(reg.ideal.macaulay_check(r).unwrap().iter().all(|row| row.ok));
            for v in reg.ball.span().basis() {
                prop_assert_eq!(&reg.phi_inverse(&reg.phi(v).unwrap()), v);
            }
        }
    }

    #[test]
    fn roots_in_the_escalated_core_are_regular(seed: u64, kind: u8, r in 1u32..3) {
        let t = star_close(&small_tuple(seed, kind)).unwrap();
        let core = r_commutative_core(&t, 2 * Margin::default().at(r) as usize, None).unwrap();
        prop_assume!(!core.is_zero());
        let mut g = rng(seed ^ 3);
        let mut w = vec![Scalar::zero(); t.d()];
        for b in core.basis() {
            let c = Scalar::from_int(g.random_range(-2..=2));
            rankstab::linalg::axpy(&mut w, &c, b);
        }
        prop_assume!(w.iter().any(|x| !x.is_zero()));
        let reg = check_regular(&t, &w, r).unwrap();
        prop_assert!(reg.is_regular(), "{:?}", reg.diagnosis());
    }

    #[test]
    fn local_models_verify_and_points_are_sound(seed: u64, kind: u8, r in 1u32..3) {
        let t = star_close(&small_tuple(seed, kind)).unwrap();
        let w = unit_vector(t.d(), (seed % t.d() as u64) as usize);
        let Some(reg) = check_regular(&t, &w, r).unwrap().into_regular() else { return Ok(()) };
        let search = PointSearch::default();
        let pts = find_separating_points(&reg.ideal, r, reg.dim(), &search).unwrap();
        let gb = reg.ideal.groebner_basis().unwrap();
        for p in &pts {
            match p {
                VarietyPoint::Exact(x) => prop_assert!(gb.iter().all(|f| f.eval(x).is_zero())),
                VarietyPoint::Approx { coords, .. } => {
                    prop_assert!(gb.iter().all(|f| f.eval_c64(coords).norm() <= search.residual_bound))
                }
            }
        }
        let model = build_local_model(&reg, &pts).unwrap();
        let report = verify_local_model(&model);
        prop_assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn packings_are_orthogonal_and_meet_their_bound(seed: u64, kind: u8, r in 1u32..4) {
        let t = star_close(&small_tuple(seed, kind)).unwrap();
        let a = r_commutative_core(&t, Margin::default().at(r) as usize, None).unwrap();
        let pack = greedy_pack(&t, &a, r, &PackOptions::default()).unwrap();
        let need = (-(t.n() as f64)).exp() * pack.packed_dim as f64;
        prop_assert!(pack.covered() as f64 >= need);
        let vecs: Vec<Vector> = pack.balls.iter().flat_map(|b| b.ball.span().basis().to_vec()).collect();
        prop_assert_eq!(Subspace::from_vectors(t.d(), vecs).unwrap().dim(), pack.covered());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn corrections_commute_and_account_for_their_distance(seed in 0u64..1000, kind: u8) {
        let mut g = rng(seed);
        let spec = if kind % 2 == 0 {
            InstanceSpec::commuting_plus_noise(g.random_range(6..=20), 2, g.random_range(0..=2), seed)
        } else {
            InstanceSpec::permutation_pair(g.random_range(2..=4), g.random_range(0..=2), seed)
        };
        let t = spec.generate_exact().unwrap();
        prop_assert_eq!(&t, &spec.generate_exact().unwrap());
        let res = correct(&t, &CorrectionConfig::default()).unwrap();
        let m = &res.metrics;
        prop_assert!(m.input_defect <= spec.declared_defect());
        prop_assert!(m.factored_commutators_zero);
        prop_assert_eq!(m.dense_commutator_rank, 0);
        prop_assert!(res.failed_assertions().next().is_none(), "{:?}", res.failed_assertions().collect::<Vec<_>>());
        // distance ≤ (1 − coverage) + Σ top layers / d, from the per-ball layer dims
        let d = t.d() as i64;
        let top: i64 = res.balls.iter().map(|b| {
            let l = &b.layer_dims;
            let k = l.len();
            (l[k - 1] - if k > 1 { l[k - 2] } else { 0 }) as i64
        }).sum();
        let covered: i64 = res.balls.iter().map(|b| *b.layer_dims.last().unwrap() as i64).sum();
        let bound = Rational64::new(d - covered + top, d);
        prop_assert!(m.distance <= bound, "{} vs {}", rat(m.distance), rat(bound));
        // top-layer growth per ball
        for b in &res.balls {
            let l = &b.layer_dims;
            let k = l.len();
            if k > 1 {
                let rr = (k - 1) as i64;
                prop_assert!((l[k - 1] - l[k - 2]) as i64 * rr <= m.closed_n as i64 * l[k - 2] as i64);
            }
        }
    }
}

/// `d − rank` of all `𝓜_α − 𝓜_{sort α}` with `|α| ≤ r` stacked, by float SVD.
/// Any canonical order gives the same space: it is the set where
/// permutation-equivalent words agree.
fn brute_force_core_dim(t: &MatrixTuple, r: usize) -> usize {
    let mats: Vec<_> = t.exact().unwrap().iter().map(common::to_c64).collect();
    let d = t.d();
    let id = nalgebra::DMatrix::<num_complex::Complex64>::identity(d, d);
    let eval = |w: &[usize]| w.iter().fold(id.clone(), |acc, &i| acc * &mats[i]);
    let mut rows: Vec<nalgebra::DMatrix<num_complex::Complex64>> = Vec::new();
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..r {
        words = words.iter().flat_map(|w| (0..mats.len()).map(move |i| [w.as_slice(), &[i]].concat())).collect();
        for w in &words {
            let mut s = w.clone();
            s.sort_unstable();
            if s != *w {
                rows.push(eval(w) - eval(&s));
            }
        }
    }
    if rows.is_empty() {
        return d;
    }
    let stacked = nalgebra::DMatrix::from_fn(rows.len() * d, d, |a, b| rows[a / d][(a % d, b)]);
    d - common::svd_rank(&stacked, 1e-9, 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn core_matches_brute_force(seed: u64, kind: u8, r in 2usize..4) {
        let t = star_close(&small_tuple(seed, kind)).unwrap();
        let core = r_commutative_core(&t, r, None).unwrap();
        prop_assert_eq!(core.dim(), brute_force_core_dim(&t, r));
    }
}
