//! Commuting local maps on a regular ball from points of its variety.
use rankstab::ballspace::check_regular;
use rankstab::diagonalize::{build_local_model, find_separating_points, verify_local_model, PointSearch};
use rankstab::linalg::MatrixExact;
use rankstab::scalar::Scalar;
use rankstab::tuples::{Flag, MatrixTuple};

fn main() -> rankstab::Result<()> {
    let x = MatrixExact::diagonal(&[1, 2, 3, 4].map(Scalar::from_int));
    let t = MatrixTuple::new(vec![x], vec![Flag::SelfAdjoint])?;
    let w = vec![Scalar::one(); 4];

    let ball = check_regular(&t, &w, 4)?.into_regular().expect("generic root");
    println!("ball dim {}, ideal {:?}", ball.dim(), ball.ideal.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>());
    let points = find_separating_points(&ball.ideal, 4, ball.dim(), &PointSearch::default())?;
    for p in &points {
        println!("point {:?} exact {}", p.coords_c64(), p.is_exact());
    }
    let model = build_local_model(&ball, &points)?;
    let report = verify_local_model(&model);
    println!("{report:#?}");
    println!("passed: {}", report.passed());
    Ok(())
}
