//! Polynomials over the Gaussian rationals, Gröbner bases, and the standard
//! filtration `F_i` of a quotient ring by degree.

mod groebner;
mod ideal;
mod monomial;
mod poly;

pub use groebner::GroebnerBudget;
pub use ideal::{FiltrationDims, Ideal, IdealJson, MacaulayRow};
pub use monomial::{grevlex, monomials_of_degree, monomials_up_to, Monomial, MonomialOrder, MAX_VARS};
pub use poly::Poly;

use crate::error::Result;
use crate::linalg::MatrixExact;

pub fn groebner_basis(ideal: &Ideal) -> Result<Vec<Poly>> {
    ideal.groebner_basis().map(|g| g.to_vec())
}

pub fn normal_form(f: &Poly, ideal: &Ideal) -> Result<Poly> {
    ideal.normal_form(f)
}

pub fn ideal_member(f: &Poly, ideal: &Ideal) -> Result<bool> {
    ideal.ideal_member(f)
}

pub fn radical_member(f: &Poly, ideal: &Ideal) -> Result<bool> {
    ideal.radical_member(f)
}

pub fn filtration_dims(ideal: &Ideal, i_max: u32) -> Result<FiltrationDims> {
    ideal.filtration_dims(i_max)
}

pub fn macaulay_check(ideal: &Ideal, i_max: u32) -> Result<Vec<MacaulayRow>> {
    ideal.macaulay_check(i_max)
}

pub fn multiplication_map(ideal: &Ideal, i: usize, r: u32) -> Result<MatrixExact> {
    ideal.multiplication_map(i, r)
}
