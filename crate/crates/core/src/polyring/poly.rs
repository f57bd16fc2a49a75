use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::monomial::{grevlex, Monomial, MonomialOrder};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse polynomial over the Gaussian rationals.
///
/// Terms are kept sorted by descending grevlex with no zero coefficients, so
/// structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Monomial, Scalar)>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: Vec::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Scalar::one())
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Poly::monomial(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Poly::monomial(Monomial::var(nvars, i), Scalar::one())
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let nvars = m.nvars();
        if c.is_zero() {
            return Poly::zero(nvars);
        }
        Poly { nvars, terms: vec![(m, c)] }
    }

    /// Build from arbitrary terms; like monomials are merged.
    pub fn from_terms(nvars: usize, mut terms: Vec<(Monomial, Scalar)>) -> Self {
        terms.sort_by(|a, b| grevlex(&b.0, &a.0));
        let mut out: Vec<(Monomial, Scalar)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            debug_assert_eq!(m.nvars(), nvars);
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += &c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { nvars, terms: out }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in descending grevlex order.
    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, Scalar)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|(m, _)| m.degree())
    }

    pub fn leading(&self, order: MonomialOrder) -> Option<&(Monomial, Scalar)> {
        match order {
            MonomialOrder::Grevlex => self.terms.first(),
            _ => self.terms.iter().max_by(|a, b| order.cmp(&a.0, &b.0)),
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms
            .binary_search_by(|(t, _)| grevlex(m, t))
            .map(|k| self.terms[k].1.clone())
            .unwrap_or_default()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        Poly { nvars: self.nvars, terms: merge(&self.terms, &o.terms, &Scalar::one(), grevlex) }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        Poly { nvars: self.nvars, terms: merge(&self.terms, &o.terms, &-Scalar::one(), grevlex) }
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect() }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        // multiplication by a monomial preserves any monomial order
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut acc = Poly::zero(self.nvars);
        for (m, c) in &o.terms {
            acc = acc.add(&self.mul_term(m, c));
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += &t;
        }
        acc
    }

    pub fn eval_c64(&self, point: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(m, c)| c.to_c64() * m.eval_c64(point)).sum()
    }

    /// Partial derivative in `X_{i+1}`.
    pub fn derivative(&self, i: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let e = m.exp(i);
                m.div_var(i).map(|q| (q, c * &Scalar::from_int(e as i64)))
            })
            .collect();
        Poly::from_terms(self.nvars, terms)
    }

    /// The same polynomial viewed in a ring with more (or equally many) variables.
    pub fn with_nvars(&self, nvars: usize) -> Poly {
        Poly::from_terms(nvars, self.terms.iter().map(|(m, c)| (m.with_nvars(nvars), c.clone())).collect())
    }

    /// Divide every coefficient by the leading coefficient (for `order`).
    pub fn monic(&self, order: MonomialOrder) -> Poly {
        match self.leading(order) {
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }
}

/// `a + s·b` for term lists sorted descending by `cmp`.
pub(crate) fn merge(
    a: &[(Monomial, Scalar)],
    b: &[(Monomial, Scalar)],
    s: &Scalar,
    cmp: impl Fn(&Monomial, &Monomial) -> Ordering,
) -> Vec<(Monomial, Scalar)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match cmp(&a[i].0, &b[j].0) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push((b[j].0, &b[j].1 * s));
                j += 1;
            }
            Ordering::Equal => {
                let c = &a[i].1 + &(&b[j].1 * s);
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(a[i..].iter().cloned());
    out.extend(b[j..].iter().map(|(m, c)| (*m, c * s)));
    out
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c} {m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Poly {
    /// Parse the text format in a ring with `nvars` variables.
    ///
    /// Accepts the canonical rendering (`(1/2+0i) X1^2 X2 + (-1+0i)`) as well as
    /// the looser `X1^2 - 3/2*X2 + 1`.
    pub fn parse(s: &str, nvars: usize) -> Result<Poly> {
        let bad = |why: &str| Error::Parse(format!("polynomial `{s}`: {why}"));
        let t = s.trim();
        if t == "0" || t.is_empty() {
            return Ok(Poly::zero(nvars));
        }
        // split into signed terms at depth-0 '+'/'-' that follow whitespace or start
        let bytes = t.as_bytes();
        let mut pieces: Vec<(bool, &str)> = Vec::new();
        let mut depth = 0i32;
        let mut start = 0usize;
        let mut neg = false;
        let mut k = 0usize;
        while k < bytes.len() {
            match bytes[k] {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if depth == 0 => {
                    let prev = t[..k].trim_end();
                    let is_sep = prev.is_empty() || !(prev.ends_with('^') || prev.ends_with('/') || prev.ends_with('*'));
                    if is_sep {
                        let piece = t[start..k].trim();
                        let minus = bytes[k] == b'-';
                        if piece.is_empty() {
                            // unary sign, possibly after a binary one
                            neg ^= minus;
                        } else {
                            pieces.push((neg, piece));
                            neg = minus;
                        }
                        start = k + 1;
                    }
                }
                _ => {}
            }
            k += 1;
        }
        let last = t[start..].trim();
        if last.is_empty() {
            return Err(bad("trailing operator"));
        }
        pieces.push((neg, last));

        let mut terms = Vec::new();
        for (neg, piece) in pieces {
            let mut coef = Scalar::one();
            let mut mono = Monomial::one(nvars);
            for factor in piece.split(|c: char| c == '*' || c.is_whitespace()).filter(|f| !f.is_empty()) {
                if let Some(rest) = factor.strip_prefix('X').or_else(|| factor.strip_prefix('x')) {
                    let (idx, exp) = match rest.split_once('^') {
                        Some((i, e)) => (i, e.parse::<u16>().map_err(|_| bad("exponent"))?),
                        None => (rest, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| bad("variable index"))?;
                    if idx == 0 || idx > nvars {
                        return Err(bad("variable out of range"));
                    }
                    for _ in 0..exp {
                        mono = mono.mul_var(idx - 1);
                    }
                } else {
                    coef *= &Scalar::from_str(factor)?;
                }
            }
            if neg {
                coef = -coef;
            }
            terms.push((mono, coef));
        }
        Ok(Poly::from_terms(nvars, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let p = Poly::parse("X1^2 X2 - 3/2*X2 + (1+2i) + X1", 2).unwrap();
        let s = p.to_string();
        assert_eq!(s, "(1+0i) X1^2 X2 + (1+0i) X1 + (-3/2+0i) X2 + (1+2i)");
        assert_eq!(Poly::parse(&s, 2).unwrap(), p);
        assert_eq!(Poly::parse("0", 3).unwrap(), Poly::zero(3));
        assert!(Poly::parse("X3", 2).is_err());
        assert_eq!(Poly::parse("-X1 + -2", 1).unwrap(), Poly::parse("(-1+0i) X1 + (-2+0i)", 1).unwrap());
    }

    #[test]
    fn arithmetic() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.add(&y).pow(2);
        assert_eq!(p, Poly::parse("X1^2 + 2 X1 X2 + X2^2", 2).unwrap());
        assert!(p.sub(&p).is_zero());
        let pt = [Scalar::from_int(2), Scalar::from_int(-5)];
        assert_eq!(p.eval(&pt), Scalar::from_int(9));
        assert_eq!(p.coefficient(&Monomial::from_exponents(&[1, 1])), Scalar::from_int(2));
    }
}
