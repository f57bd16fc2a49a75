//! End-to-end correction of an almost-commuting tuple.
use rankstab::harness::gen_commuting_plus_noise;
use rankstab::pipeline::{correct, CorrectionConfig};

fn main() -> rankstab::Result<()> {
    let t = gen_commuting_plus_noise(32, 2, 1, 11)?;
    let result = correct(&t, &CorrectionConfig::default())?;
    let m = &result.metrics;
    println!("input defect {} -> distance {}", m.input_defect, m.distance);
    println!("coverage {}, core dim {}, balls {}", m.coverage, m.core_dim, m.balls);
    println!("output commutes: {}", m.factored_commutators_zero && m.dense_commutator_rank == 0);
    for r in &result.rounds {
        println!("R = {}: inner {} balls {} covered {}", r.radius, r.inner_dim, r.balls, r.covered);
    }
    for a in result.failed_assertions() {
        println!("failed: {a}");
    }
    Ok(())
}
