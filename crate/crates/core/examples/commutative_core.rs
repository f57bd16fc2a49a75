//! The subspace on which all words up to length r agree with their sorted form.
use rankstab::harness::gen_commuting_plus_noise;
use rankstab::tuples::{commutator_defect, r_commutative_core};

fn main() -> rankstab::Result<()> {
    let t = gen_commuting_plus_noise(16, 2, 1, 3)?;
    println!("defect = {}", commutator_defect(&t)?);
    for r in 2..=6 {
        let core = r_commutative_core(&t, r, None)?;
        println!("r = {r}: core dim {} of {}", core.dim(), t.d());
    }
    Ok(())
}
