//! Buchberger's algorithm with the normal selection strategy and the
//! Gebauer–Möller pair update (product and chain criteria).

use serde::{Deserialize, Serialize};

use super::monomial::{Monomial, MonomialOrder};
use super::poly::{merge, Poly};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Limits that turn runaway computations into errors instead of hangs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroebnerBudget {
    /// Maximum number of critical pairs reduced.
    pub max_pairs: usize,
    /// Maximum degree of an S-polynomial lcm.
    pub max_degree: u32,
    /// Largest ring accepted by the public entry points.
    pub max_vars: usize,
}

impl Default for GroebnerBudget {
    fn default() -> Self {
        GroebnerBudget { max_pairs: 200_000, max_degree: 64, max_vars: 4 }
    }
}

/// Terms sorted descending for the working order; monic once in the basis.
type Terms = Vec<(Monomial, Scalar)>;

fn sorted_terms(p: &Poly, order: MonomialOrder) -> Terms {
    let mut t = p.terms().to_vec();
    if order != MonomialOrder::Grevlex {
        t.sort_by(|a, b| order.cmp(&b.0, &a.0));
    }
    t
}

fn make_monic(t: &mut Terms) {
    if let Some((_, c)) = t.first() {
        if !c.is_one() {
            let inv = c.inv().expect("nonzero leading coefficient");
            for (_, a) in t.iter_mut() {
                *a *= &inv;
            }
        }
    }
}

fn mul_term(t: &Terms, m: &Monomial, c: &Scalar) -> Terms {
    t.iter().map(|(u, a)| (u.mul(m), a * c)).collect()
}

/// Full reduction of `p` modulo the monic polynomials `basis`.
fn reduce(p: Terms, basis: &[&Terms], order: MonomialOrder) -> Terms {
    let cmp = |a: &Monomial, b: &Monomial| order.cmp(a, b);
    let mut rem: Terms = Vec::new();
    let mut p = p;
    let mut idx = 0;
    while idx < p.len() {
        let (m, c) = &p[idx];
        let div = basis.iter().find(|g| g[0].0.divides(m));
        match div {
            Some(g) => {
                let q = g[0].0.div(m).expect("divides");
                let neg = -c.clone();
                let sub = mul_term(g, &q, &Scalar::one());
                p = merge(&p[idx..], &sub, &neg, cmp);
                idx = 0;
            }
            None => {
                rem.push(p[idx].clone());
                idx += 1;
            }
        }
    }
    rem
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

/// Reduced Gröbner basis of the ideal generated by `gens`, returned monic and
/// sorted by ascending leading monomial.
pub(crate) fn buchberger(gens: &[Poly], order: MonomialOrder, budget: &GroebnerBudget) -> Result<Vec<Poly>> {
    let nvars = match gens.first() {
        Some(g) => g.nvars(),
        None => return Ok(Vec::new()),
    };
    let mut inputs: Vec<Terms> = gens.iter().filter(|g| !g.is_zero()).map(|g| sorted_terms(g, order)).collect();
    inputs.sort_by(|a, b| order.cmp(&a[0].0, &b[0].0));

    let mut polys: Vec<Terms> = Vec::new();
    let mut active: Vec<bool> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let add = |h: Terms, polys: &mut Vec<Terms>, active: &mut Vec<bool>, pairs: &mut Vec<Pair>| {
        let hl = h[0].0;
        let k = polys.len();
        // Gebauer–Möller: new pairs (g, h)
        let cand: Vec<(usize, Monomial)> =
            (0..k).filter(|&g| active[g]).map(|g| (g, polys[g][0].0.lcm(&hl))).collect();
        let mut keep: Vec<(usize, Monomial)> = Vec::new();
        for (idx, (g, l)) in cand.iter().enumerate() {
            let coprime = polys[*g][0].0.is_coprime(&hl);
            let dominated = cand[idx + 1..].iter().any(|(_, l2)| l2.divides(l))
                || keep.iter().any(|(_, l2)| l2.divides(l));
            if coprime || !dominated {
                keep.push((*g, *l));
            }
        }
        // product criterion drops coprime pairs after they served as dominators
        let fresh: Vec<Pair> = keep
            .into_iter()
            .filter(|(g, _)| !polys[*g][0].0.is_coprime(&hl))
            .map(|(g, l)| Pair { i: g, j: k, lcm: l })
            .collect();
        // chain criterion on old pairs
        pairs.retain(|p| {
            let li = polys[p.i][0].0.lcm(&hl);
            let lj = polys[p.j][0].0.lcm(&hl);
            !(hl.divides(&p.lcm) && li != p.lcm && lj != p.lcm)
        });
        pairs.extend(fresh);
        for g in 0..k {
            if active[g] && hl.divides(&polys[g][0].0) {
                active[g] = false;
            }
        }
        polys.push(h);
        active.push(true);
    };

    for f in inputs {
        let basis: Vec<&Terms> = polys.iter().zip(&active).filter(|(_, a)| **a).map(|(p, _)| p).collect();
        let mut h = reduce(f, &basis, order);
        if h.is_empty() {
            continue;
        }
        make_monic(&mut h);
        if h[0].0.is_one() {
            return Ok(vec![Poly::one(nvars)]);
        }
        add(h, &mut polys, &mut active, &mut pairs);
    }

    let mut processed = 0usize;
    while !pairs.is_empty() {
        // normal strategy: smallest lcm first
        let (best, _) = pairs
            .iter()
            .enumerate()
            .min_by(|a, b| order.cmp(&a.1.lcm, &b.1.lcm).then((a.1.j, a.1.i).cmp(&(b.1.j, b.1.i))))
            .expect("nonempty");
        let p = pairs.swap_remove(best);
        processed += 1;
        if processed > budget.max_pairs {
            return Err(Error::Budget(format!("more than {} critical pairs", budget.max_pairs)));
        }
        if p.lcm.degree() > budget.max_degree {
            return Err(Error::Budget(format!("S-polynomial degree {} above cap {}", p.lcm.degree(), budget.max_degree)));
        }
        let (f, g) = (&polys[p.i], &polys[p.j]);
        let qf = f[0].0.div(&p.lcm).expect("lcm");
        let qg = g[0].0.div(&p.lcm).expect("lcm");
        let a = mul_term(f, &qf, &Scalar::one());
        let b = mul_term(g, &qg, &Scalar::one());
        let s = merge(&a[1..], &b[1..], &-Scalar::one(), |x, y| order.cmp(x, y));
        let basis: Vec<&Terms> = polys.iter().zip(&active).filter(|(_, a)| **a).map(|(p, _)| p).collect();
        let mut h = reduce(s, &basis, order);
        if h.is_empty() {
            continue;
        }
        make_monic(&mut h);
        if h[0].0.is_one() {
            return Ok(vec![Poly::one(nvars)]);
        }
        add(h, &mut polys, &mut active, &mut pairs);
    }

    // minimal basis, then interreduce
    let mut min: Vec<Terms> = Vec::new();
    let mut cands: Vec<Terms> = polys.into_iter().zip(active).filter(|(_, a)| *a).map(|(p, _)| p).collect();
    cands.sort_by(|a, b| order.cmp(&a[0].0, &b[0].0));
    for c in cands {
        if !min.iter().any(|g| g[0].0.divides(&c[0].0)) {
            min.push(c);
        }
    }
    let mut out = Vec::with_capacity(min.len());
    for k in 0..min.len() {
        let lead = min[k][0].clone();
        let others: Vec<&Terms> = min.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, g)| g).collect();
        let mut tail = reduce(min[k][1..].to_vec(), &others, order);
        let mut t = vec![lead];
        t.append(&mut tail);
        out.push(Poly::from_terms(nvars, t));
    }
    Ok(out)
}

/// Remainder of `f` modulo a Gröbner basis (any order), returned in canonical form.
pub(crate) fn normal_form_in(f: &Poly, gb: &[Poly], order: MonomialOrder) -> Poly {
    let basis: Vec<Terms> = gb.iter().map(|g| sorted_terms(g, order)).collect();
    let refs: Vec<&Terms> = basis.iter().collect();
    let r = reduce(sorted_terms(f, order), &refs, order);
    Poly::from_terms(f.nvars(), r)
}
