//! Seeded instance generators. Every generator is a pure function of its
//! arguments, so equal arguments give identical tuples.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{MatrixExact, Vector};
use crate::polyring::{monomials_up_to, Ideal, Poly};
use crate::scalar::Scalar;
use crate::tuples::{Flag, MatrixTuple};

/// Cayley parameters `t` of the 2×2 rotations; `(1−t²)/(1+t²)` and
/// `2t/(1+t²)` are then rational.
const CAYLEY_T: [(i64, i64); 6] = [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (2, 5)];

/// Layers of disjoint rotations used to mix coordinates.
const MIX_LAYERS: usize = 2;

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Rational orthogonal matrix: a product of Cayley transforms of sparse
/// antisymmetric matrices, each a block of disjoint plane rotations.
pub fn random_rational_orthogonal(d: usize, rng: &mut impl Rng) -> MatrixExact {
    let mut q = MatrixExact::identity(d);
    for _ in 0..MIX_LAYERS {
        let mut perm: Vec<usize> = (0..d).collect();
        perm.shuffle(rng);
        let mut layer = MatrixExact::identity(d);
        for pair in perm.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            let (p, r) = CAYLEY_T[rng.random_range(0..CAYLEY_T.len())];
            // (I − K)(I + K)⁻¹ for K = [[0, t], [−t, 0]], t = p/r
            let den = r * r + p * p;
            let c = Scalar::from_frac(r * r - p * p, den);
            let s = Scalar::from_frac(2 * p * r, den);
            layer.set(a, a, c.clone());
            layer.set(b, b, c);
            layer.set(a, b, -s.clone());
            layer.set(b, a, s);
        }
        q = layer.mul(&q).expect("square");
    }
    q
}

/// Commuting self-adjoint tuple `Q·D_i·Qᵀ` with integer diagonals in `[−2, 2]`,
/// plus a self-adjoint perturbation of rank ≤ `noise_rank` on the first matrix.
pub fn gen_commuting_plus_noise(d: usize, n: usize, noise_rank: usize, seed: u64) -> Result<MatrixTuple> {
    if d == 0 || n == 0 {
        return Err(Error::Argument("need d ≥ 1 and n ≥ 1".into()));
    }
    if noise_rank >= d {
        return Err(Error::Argument(format!("noise rank {noise_rank} must be below d = {d}")));
    }
    let mut rng = rng_for(seed, 1);
    let q = random_rational_orthogonal(d, &mut rng);
    let qt = q.transpose();
    let mut mats = Vec::with_capacity(n);
    for _ in 0..n {
        let diag: Vec<Scalar> = (0..d).map(|_| Scalar::from_int(rng.random_range(-2..=2))).collect();
        mats.push(q.mul(&MatrixExact::diagonal(&diag))?.mul(&qt)?);
    }
    for _ in 0..noise_rank {
        // ±v·vᵀ with v sparse, entries in {−1, 1}
        let support = 2.min(d);
        let mut idx: Vec<usize> = (0..d).collect();
        idx.shuffle(&mut rng);
        let mut v: Vector = vec![Scalar::zero(); d];
        for &k in &idx[..support] {
            v[k] = Scalar::from_int(if rng.random_bool(0.5) { 1 } else { -1 });
        }
        let sign = Scalar::from_int(if rng.random_bool(0.5) { 1 } else { -1 });
        let bump = MatrixExact::from_fn(d, d, |r, c| &(&v[r] * &v[c]) * &sign);
        mats[0] = mats[0].add(&bump)?;
    }
    MatrixTuple::new(mats, vec![Flag::SelfAdjoint; n])
}

fn permutation_matrix(p: &[usize]) -> MatrixExact {
    // column c maps e_c to e_{p[c]}
    MatrixExact::from_fn(p.len(), p.len(), |r, c| if p[c] == r { Scalar::one() } else { Scalar::zero() })
}

/// Torus shifts `U`, `V` on a `side × side` grid with `defects` random
/// transpositions composed into `V`.
pub fn gen_permutation_pair(side: usize, defects: usize, seed: u64) -> Result<MatrixTuple> {
    if side < 2 {
        return Err(Error::Argument("torus side must be at least 2".into()));
    }
    let d = side * side;
    if defects >= d {
        return Err(Error::Argument(format!("{defects} defects on a grid of {d} points")));
    }
    let at = |x: usize, y: usize| (x % side) * side + (y % side);
    let mut u = vec![0; d];
    let mut v = vec![0; d];
    for x in 0..side {
        for y in 0..side {
            u[at(x, y)] = at(x + 1, y);
            v[at(x, y)] = at(x, y + 1);
        }
    }
    let mut rng = rng_for(seed, 2);
    for _ in 0..defects {
        let a = rng.random_range(0..d);
        let b = (a + rng.random_range(1..d)) % d;
        for img in v.iter_mut() {
            if *img == a {
                *img = b;
            } else if *img == b {
                *img = a;
            }
        }
    }
    MatrixTuple::new(vec![permutation_matrix(&u), permutation_matrix(&v)], vec![Flag::Unitary; 2])
}

/// Random `rows × cols` matrix of the given rank with small rational entries.
pub fn random_rational_matrix(rows: usize, cols: usize, rank: usize, rng: &mut impl Rng) -> MatrixExact {
    let rank = rank.min(rows).min(cols);
    let small = |rng: &mut dyn rand::RngCore| {
        let num = rng.random_range(-4..=4);
        let den = rng.random_range(1..=3);
        Scalar::from_frac(num, den)
    };
    let mut out = MatrixExact::zeros(rows, cols);
    for _ in 0..rank {
        let a: Vector = (0..rows).map(|_| small(rng)).collect();
        let b: Vector = (0..cols).map(|_| small(rng)).collect();
        out = out.add(&MatrixExact::from_fn(rows, cols, |r, c| &a[r] * &b[c])).expect("shape");
    }
    out
}

/// Random ideal in `nvars` variables: `gens` generators of degree ≤ `max_deg`,
/// each with up to three terms and small integer coefficients.
pub fn random_ideal(nvars: usize, gens: usize, max_deg: u32, rng: &mut impl Rng) -> Ideal {
    let monos = monomials_up_to(nvars, max_deg);
    let mut out = Vec::with_capacity(gens);
    while out.len() < gens {
        let terms = (0..rng.random_range(1..=3))
            .map(|_| {
                let m = monos[rng.random_range(0..monos.len())];
                let c = loop {
                    let c = rng.random_range(-3..=3);
                    if c != 0 {
                        break c;
                    }
                };
                (m, Scalar::from_int(c))
            })
            .collect();
        let p = Poly::from_terms(nvars, terms);
        if !p.is_zero() {
            out.push(p);
        }
    }
    Ideal::new(nvars, out)
}
