//! Balls around a vector and the regularity test that identifies them with a quotient ring.
use rankstab::ballspace::{build_ball, check_regular, Regularity};
use rankstab::linalg::MatrixExact;
use rankstab::scalar::Scalar;
use rankstab::tuples::{Flag, MatrixTuple};

fn main() -> rankstab::Result<()> {
    // a reflection and a diagonal, both self-adjoint and commuting
    let x = MatrixExact::from_ints(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]]);
    let y = MatrixExact::from_ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 2, 0], &[0, 0, 0, 2]]);
    let t = MatrixTuple::new(vec![x, y], vec![Flag::SelfAdjoint; 2])?;
    let w: Vec<Scalar> = [1, 0, 1, 0].iter().map(|&v| Scalar::from_int(v)).collect();

    for r in 0..=3 {
        let ball = build_ball(&t, &w, r)?;
        let labels: Vec<String> = ball.labels().iter().map(|m| m.to_string()).collect();
        println!("R = {r}: dim {} layers {:?} labels {:?}", ball.dim(), ball.layer_dims(), labels);
    }
    match check_regular(&t, &w, 2)? {
        Regularity::Regular(b) => {
            println!("regular; ideal generators:");
            for g in b.ideal.groebner_basis()? {
                println!("  {g}");
            }
        }
        Regularity::NotRegular(diag) => println!("irregular: {diag}"),
    }
    Ok(())
}
