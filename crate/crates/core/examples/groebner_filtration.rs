//! Gröbner basis, filtration dimensions and the growth check of an ideal.
use rankstab::polyring::{Ideal, Poly};

fn main() -> rankstab::Result<()> {
    let ideal = Ideal::parse(2, &["X1^2 - X2", "X2^3 - 1"])?;
    for g in ideal.groebner_basis()? {
        println!("g = {g}");
    }
    println!("zero-dimensional: {}", ideal.is_zero_dimensional()?);
    println!("dim F_i for i ≤ 8: {:?}", ideal.filtration_dims(8)?.dims);
    for row in ideal.macaulay_check(8)? {
        println!("i = {}: {} ≤ {} {}", row.i, row.lhs, row.rhs, if row.ok { "ok" } else { "VIOLATED" });
    }
    let f = Poly::parse("X1^6 - 1", 2)?;
    println!("{f} in ideal: {}", ideal.ideal_member(&f)?);
    println!("normal form of X1^5: {}", ideal.normal_form(&Poly::parse("X1^5", 2)?)?);
    Ok(())
}
