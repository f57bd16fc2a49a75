//! Closing a unitary tuple under adjoints and measuring its commutator defect.
use rankstab::harness::gen_permutation_pair;
use rankstab::tuples::{commutator_defect, star_close_with_origin};

fn main() -> rankstab::Result<()> {
    let t = gen_permutation_pair(4, 1, 7)?;
    println!("d = {}, n = {}, defect = {}", t.d(), t.n(), commutator_defect(&t)?);

    let (closed, origin) = star_close_with_origin(&t)?;
    println!("closed n = {}, origin = {:?}", closed.n(), origin);
    println!("closed defect = {}", commutator_defect(&closed)?);
    println!("star-closed: {}", closed.is_star_closed()?);
    Ok(())
}
