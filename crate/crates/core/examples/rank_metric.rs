//! Normalized rank distance between two matrix tuples.
use rankstab::linalg::{normalized_rank, MatrixExact};
use rankstab::tuples::{rank_distance, MatrixTuple};

fn main() -> rankstab::Result<()> {
    let a = MatrixExact::from_ints(&[&[1, 0, 0, 0], &[0, 2, 0, 0], &[0, 0, 3, 0], &[0, 0, 0, 4]]);
    let mut b = a.clone();
    b.set(0, 1, rankstab::scalar::Scalar::from_int(5));

    println!("rank(A)/d = {}", normalized_rank(&a, 4)?);
    let ta = MatrixTuple::general(vec![a.clone(), a])?;
    let tb = MatrixTuple::general(vec![b.clone(), b])?;
    // one changed entry is a rank-one difference
    println!("dist(A, B) = {}", rank_distance(&ta, &tb)?);
    Ok(())
}
