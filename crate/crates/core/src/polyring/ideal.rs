use std::sync::OnceLock;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::groebner::{buchberger, normal_form_in, GroebnerBudget};
use super::monomial::{monomials_up_to, Monomial, MonomialOrder};
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::linalg::MatrixExact;
use crate::scalar::Scalar;

/// Polynomial ideal with a lazily computed reduced Gröbner basis.
#[derive(Debug)]
pub struct Ideal {
    nvars: usize,
    generators: Vec<Poly>,
    order: MonomialOrder,
    budget: GroebnerBudget,
    // a budget failure is cached too: it is deterministic for fixed inputs
    gb: OnceLock<std::result::Result<Vec<Poly>, String>>,
}

impl Clone for Ideal {
    fn clone(&self) -> Self {
        let gb = OnceLock::new();
        if let Some(v) = self.gb.get() {
            let _ = gb.set(v.clone());
        }
        Ideal { nvars: self.nvars, generators: self.generators.clone(), order: self.order, budget: self.budget, gb }
    }
}

/// `dims[i] = dim F_i`, the number of standard monomials of degree ≤ i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationDims {
    pub nvars: usize,
    pub dims: Vec<usize>,
}

/// One line of the growth check `dim F_i − dim F_{i−1} ≤ (n/i)·dim F_{i−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacaulayRow {
    pub i: usize,
    pub lhs: usize,
    pub rhs: Rational64,
    pub ok: bool,
}

impl Ideal {
    pub fn new(nvars: usize, generators: Vec<Poly>) -> Self {
        Ideal::with_order(nvars, generators, MonomialOrder::Grevlex)
    }

    pub fn with_order(nvars: usize, generators: Vec<Poly>, order: MonomialOrder) -> Self {
        assert!(generators.iter().all(|g| g.nvars() == nvars), "generator ring mismatch");
        Ideal { nvars, generators, order, budget: GroebnerBudget::default(), gb: OnceLock::new() }
    }

    pub fn with_budget(mut self, budget: GroebnerBudget) -> Self {
        self.budget = budget;
        self.gb = OnceLock::new();
        self
    }

    /// Parse generators in the polynomial text format.
    pub fn parse(nvars: usize, gens: &[&str]) -> Result<Self> {
        let g = gens.iter().map(|s| Poly::parse(s, nvars)).collect::<Result<Vec<_>>>()?;
        Ok(Ideal::new(nvars, g))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn budget(&self) -> &GroebnerBudget {
        &self.budget
    }

    /// The reduced Gröbner basis, computed once.
    pub fn groebner_basis(&self) -> Result<&[Poly]> {
        if self.nvars > self.budget.max_vars {
            return Err(Error::Config(format!(
                "{} variables exceeds the configured limit {}",
                self.nvars, self.budget.max_vars
            )));
        }
        let r = self
            .gb
            .get_or_init(|| buchberger(&self.generators, self.order, &self.budget).map_err(|e| e.to_string()));
        match r {
            Ok(v) => Ok(v),
            Err(msg) => Err(Error::Budget(msg.clone())),
        }
    }

    pub fn normal_form(&self, f: &Poly) -> Result<Poly> {
        let gb = self.groebner_basis()?;
        Ok(normal_form_in(f, gb, self.order))
    }

    pub fn ideal_member(&self, f: &Poly) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Membership in the radical via `1 ∈ I + (1 − t·f)` in one extra variable.
    pub fn radical_member(&self, f: &Poly) -> Result<bool> {
        if f.is_zero() {
            return Ok(true);
        }
        self.groebner_basis()?;
        let n1 = self.nvars + 1;
        let mut gens: Vec<Poly> = self.generators.iter().map(|g| g.with_nvars(n1)).collect();
        let t = Poly::var(n1, self.nvars);
        gens.push(Poly::one(n1).sub(&t.mul(&f.with_nvars(n1))));
        let budget = GroebnerBudget { max_vars: self.budget.max_vars + 1, ..self.budget };
        let j = Ideal::with_order(n1, gens, self.order).with_budget(budget);
        j.is_unit()
    }

    /// True iff the ideal is the whole ring.
    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.groebner_basis()?.iter().any(|g| g.terms().len() == 1 && g.terms()[0].0.is_one()))
    }

    pub fn leading_monomials(&self) -> Result<Vec<Monomial>> {
        Ok(self.groebner_basis()?.iter().map(|g| g.leading(self.order).expect("nonzero").0).collect())
    }

    fn is_standard_among(m: &Monomial, leads: &[Monomial]) -> bool {
        !leads.iter().any(|l| l.divides(m))
    }

    pub fn is_standard(&self, m: &Monomial) -> Result<bool> {
        Ok(Ideal::is_standard_among(m, &self.leading_monomials()?))
    }

    /// Standard monomials of degree ≤ `deg`, ascending in grevlex.
    pub fn standard_monomials_up_to(&self, deg: u32) -> Result<Vec<Monomial>> {
        let leads = self.leading_monomials()?;
        Ok(monomials_up_to(self.nvars, deg).into_iter().filter(|m| Ideal::is_standard_among(m, &leads)).collect())
    }

    fn require_graded(&self) -> Result<()> {
        if !self.order.is_graded() {
            return Err(Error::Config(format!("filtration needs a graded order, got {:?}", self.order)));
        }
        Ok(())
    }

    pub fn filtration_dims(&self, i_max: u32) -> Result<FiltrationDims> {
        self.require_graded()?;
        let std = self.standard_monomials_up_to(i_max)?;
        let mut dims = vec![0usize; i_max as usize + 1];
        for m in &std {
            dims[m.degree() as usize] += 1;
        }
        for i in 1..dims.len() {
            dims[i] += dims[i - 1];
        }
        Ok(FiltrationDims { nvars: self.nvars, dims })
    }

    pub fn macaulay_check(&self, i_max: u32) -> Result<Vec<MacaulayRow>> {
        if i_max < 1 {
            return Err(Error::Argument("macaulay_check needs i_max ≥ 1".into()));
        }
        let f = self.filtration_dims(i_max)?;
        Ok((1..=i_max as usize)
            .map(|i| {
                let lhs = f.dims[i] - f.dims[i - 1];
                let rhs = Rational64::new((self.nvars * f.dims[i - 1]) as i64, i as i64);
                // lhs ≤ n·dims[i−1]/i  ⇔  i·lhs ≤ n·dims[i−1]
                let ok = i * lhs <= self.nvars * f.dims[i - 1];
                MacaulayRow { i, lhs, rhs, ok }
            })
            .collect())
    }

    /// Coordinates of a normal form in a list of standard monomials.
    fn coords_in(&self, nf: &Poly, basis: &[Monomial]) -> Result<Vec<Scalar>> {
        let mut v = vec![Scalar::zero(); basis.len()];
        for (m, c) in nf.terms() {
            let k = basis
                .iter()
                .position(|b| b == m)
                .ok_or_else(|| Error::Numeric(format!("normal-form term {m} outside the standard basis")))?;
            v[k] = c.clone();
        }
        Ok(v)
    }

    /// Matrix of `f ↦ NF(X_i·f)` from `F_{R−1}` to `F_R`, in standard-monomial
    /// bases (columns: degree ≤ R−1, rows: degree ≤ R).
    pub fn multiplication_map(&self, i: usize, r: u32) -> Result<MatrixExact> {
        self.require_graded()?;
        if i >= self.nvars {
            return Err(Error::Argument(format!("variable index {i} out of range")));
        }
        if r == 0 {
            return Err(Error::Argument("multiplication map needs R ≥ 1".into()));
        }
        let rows = self.standard_monomials_up_to(r)?;
        let cols: Vec<Monomial> = rows.iter().copied().filter(|m| m.degree() < r).collect();
        let mut columns = Vec::with_capacity(cols.len());
        for b in &cols {
            let nf = self.normal_form(&Poly::monomial(b.mul_var(i), Scalar::one()))?;
            columns.push(self.coords_in(&nf, &rows)?);
        }
        Ok(MatrixExact::from_columns(rows.len(), &columns))
    }

    /// Zero-dimensional iff every variable has a pure power among the leading monomials.
    pub fn is_zero_dimensional(&self) -> Result<bool> {
        let leads = self.leading_monomials()?;
        if leads.iter().any(|m| m.is_one()) {
            return Ok(false);
        }
        Ok((0..self.nvars).all(|i| leads.iter().any(|m| m.exp(i) > 0 && m.degree() == m.exp(i) as u32)))
    }

    /// Krull dimension (largest set of variables with no leading monomial
    /// supported on it); `None` for the unit ideal.
    pub fn krull_dimension(&self) -> Result<Option<usize>> {
        if self.is_unit()? {
            return Ok(None);
        }
        let leads = self.leading_monomials()?;
        let mut best = 0;
        for mask in 0u32..(1 << self.nvars) {
            let size = mask.count_ones() as usize;
            if size <= best {
                continue;
            }
            let inside = |m: &Monomial| (0..self.nvars).all(|v| m.exp(v) == 0 || mask & (1 << v) != 0);
            if !leads.iter().any(inside) {
                best = size;
            }
        }
        Ok(Some(best))
    }

    /// All standard monomials of a zero-dimensional ideal.
    pub fn quotient_basis(&self) -> Result<Vec<Monomial>> {
        if !self.is_zero_dimensional()? {
            return Err(Error::Precondition("quotient basis needs a zero-dimensional ideal".into()));
        }
        let leads = self.leading_monomials()?;
        // every standard monomial has degree below Σ (pure-power exponent)
        let bound: u32 = (0..self.nvars)
            .map(|i| {
                leads.iter().filter(|m| m.degree() == m.exp(i) as u32 && m.exp(i) > 0).map(|m| m.exp(i) as u32).min().unwrap()
                    - 1
            })
            .sum();
        Ok(monomials_up_to(self.nvars, bound).into_iter().filter(|m| Ideal::is_standard_among(m, &leads)).collect())
    }

    /// Multiplication by `X_i` on the full quotient of a zero-dimensional ideal,
    /// acting on coordinate columns in `quotient_basis()` order.
    pub fn quotient_multiplication_matrix(&self, i: usize) -> Result<MatrixExact> {
        let basis = self.quotient_basis()?;
        let mut columns = Vec::with_capacity(basis.len());
        for b in &basis {
            let nf = self.normal_form(&Poly::monomial(b.mul_var(i), Scalar::one()))?;
            columns.push(self.coords_in(&nf, &basis)?);
        }
        Ok(MatrixExact::from_columns(basis.len(), &columns))
    }
}

impl FiltrationDims {
    pub fn is_monotone(&self) -> bool {
        self.dims.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Serialized ideal: generators in the polynomial text format plus the order tag.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdealJson {
    pub nvars: usize,
    pub order: MonomialOrder,
    pub generators: Vec<String>,
}

impl From<&Ideal> for IdealJson {
    fn from(i: &Ideal) -> Self {
        IdealJson { nvars: i.nvars, order: i.order, generators: i.generators.iter().map(|g| g.to_string()).collect() }
    }
}

impl TryFrom<&IdealJson> for Ideal {
    type Error = Error;
    fn try_from(j: &IdealJson) -> Result<Self> {
        let g = j.generators.iter().map(|s| Poly::parse(s, j.nvars)).collect::<Result<Vec<_>>>()?;
        Ok(Ideal::with_order(j.nvars, g, j.order))
    }
}

impl Serialize for Ideal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IdealJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ideal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = IdealJson::deserialize(d)?;
        Ideal::try_from(&j).map_err(serde::de::Error::custom)
    }
}
