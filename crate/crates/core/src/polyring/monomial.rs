use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Hard cap on the number of variables a monomial can carry.
pub const MAX_VARS: usize = 8;

/// `X_1^{e_1} ⋯ X_n^{e_n}` with a cached total degree.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u16; MAX_VARS],
    nvars: u8,
    deg: u32,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        Monomial { exps: [0; MAX_VARS], nvars: nvars as u8, deg: 0 }
    }

    /// The variable `X_{i+1}` (zero-based index).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.exps[i] = 1;
        m.deg = 1;
        m
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        let mut m = Monomial::one(exps.len());
        m.exps[..exps.len()].copy_from_slice(exps);
        m.deg = exps.iter().map(|&e| e as u32).sum();
        m
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps[..self.nvars as usize]
    }

    pub fn exp(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars, o.nvars);
        let mut m = *self;
        for i in 0..self.nvars() {
            m.exps[i] += o.exps[i];
        }
        m.deg += o.deg;
        m
    }

    pub fn mul_var(&self, i: usize) -> Monomial {
        let mut m = *self;
        m.exps[i] += 1;
        m.deg += 1;
        m
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.deg <= o.deg && (0..self.nvars()).all(|i| self.exps[i] <= o.exps[i])
    }

    /// `o / self` if `self | o`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        if !self.divides(o) {
            return None;
        }
        let mut m = *o;
        for i in 0..self.nvars() {
            m.exps[i] -= self.exps[i];
        }
        m.deg -= self.deg;
        Some(m)
    }

    pub fn lcm(&self, o: &Monomial) -> Monomial {
        let mut m = *self;
        let mut deg = 0;
        for i in 0..self.nvars() {
            m.exps[i] = self.exps[i].max(o.exps[i]);
            deg += m.exps[i] as u32;
        }
        m.deg = deg;
        m
    }

    pub fn is_coprime(&self, o: &Monomial) -> bool {
        (0..self.nvars()).all(|i| self.exps[i] == 0 || o.exps[i] == 0)
    }

    /// Smallest variable index occurring in the monomial.
    pub fn min_var(&self) -> Option<usize> {
        (0..self.nvars()).find(|&i| self.exps[i] > 0)
    }

    /// Remove one factor `X_i`.
    pub fn div_var(&self, i: usize) -> Option<Monomial> {
        if self.exps[i] == 0 {
            return None;
        }
        let mut m = *self;
        m.exps[i] -= 1;
        m.deg -= 1;
        Some(m)
    }

    /// The same exponents in a ring with `nvars` variables (extra variables get exponent 0).
    pub fn with_nvars(&self, nvars: usize) -> Monomial {
        assert!(nvars <= MAX_VARS);
        let mut m = *self;
        for i in nvars..MAX_VARS {
            debug_assert!(i >= self.nvars() || self.exps[i] == 0);
            m.exps[i] = 0;
        }
        m.nvars = nvars as u8;
        m.deg = m.exps[..nvars].iter().map(|&e| e as u32).sum();
        m
    }

    /// Letters of the sorted word `X_{α(1)} ⋯ X_{α(q)}` with `α(1) ≤ … ≤ α(q)`.
    pub fn sorted_letters(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.deg as usize);
        for i in 0..self.nvars() {
            for _ in 0..self.exps[i] {
                out.push(i);
            }
        }
        out
    }

    pub fn from_letters(nvars: usize, letters: &[usize]) -> Monomial {
        let mut m = Monomial::one(nvars);
        for &l in letters {
            m = m.mul_var(l);
        }
        m
    }

    pub fn eval_c64(&self, point: &[num_complex::Complex64]) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(1.0, 0.0);
        for (i, &e) in self.exponents().iter().enumerate() {
            if e > 0 {
                acc *= point[i].powu(e as u32);
            }
        }
        acc
    }
}

/// Supported monomial orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MonomialOrder {
    /// Graded reverse lexicographic; the only graded order and the default.
    #[default]
    Grevlex,
    /// Pure lexicographic.
    Lex,
}

impl MonomialOrder {
    pub fn is_graded(self) -> bool {
        matches!(self, MonomialOrder::Grevlex)
    }

    pub fn cmp(self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Grevlex => grevlex(a, b),
            MonomialOrder::Lex => a.exponents().cmp(b.exponents()),
        }
    }
}

pub fn grevlex(a: &Monomial, b: &Monomial) -> Ordering {
    match a.deg.cmp(&b.deg) {
        Ordering::Equal => {
            for i in (0..a.nvars()).rev() {
                match a.exps[i].cmp(&b.exps[i]) {
                    Ordering::Equal => continue,
                    // smaller exponent in the last differing variable is larger
                    o => return o.reverse(),
                }
            }
            Ordering::Equal
        }
        o => o,
    }
}

/// All monomials of total degree exactly `deg` in `nvars` variables, ascending in grevlex.
pub fn monomials_of_degree(nvars: usize, deg: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; nvars];
    fn rec(i: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if i + 1 == cur.len() {
            cur[i] = left as u16;
            out.push(Monomial::from_exponents(cur));
            return;
        }
        for e in 0..=left {
            cur[i] = e as u16;
            rec(i + 1, left - e, cur, out);
        }
    }
    if nvars == 0 {
        if deg == 0 {
            out.push(Monomial::one(0));
        }
        return out;
    }
    rec(0, deg, &mut cur, &mut out);
    out.sort_by(grevlex);
    out
}

/// All monomials of degree `≤ deg`, ascending in grevlex (so by degree first).
pub fn monomials_up_to(nvars: usize, deg: u32) -> Vec<Monomial> {
    (0..=deg).flat_map(|k| monomials_of_degree(nvars, k)).collect()
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "X{}", i + 1)?;
            } else {
                write!(f, "X{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
