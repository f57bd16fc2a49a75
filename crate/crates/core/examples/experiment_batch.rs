//! A small seeded experiment grid written as CSV to stdout.
use rankstab::harness::{run_experiment, write_csv, ExperimentConfig, Family, GridEntry};

fn main() -> rankstab::Result<()> {
    let config = ExperimentConfig {
        grid: vec![
            GridEntry { family: Family::CommutingPlusNoise, d: vec![16], n: vec![2], noise_rank: vec![0, 1], seeds: 2 },
            GridEntry { family: Family::PermutationPair, d: vec![16], n: vec![2], noise_rank: vec![0, 1], seeds: 1 },
        ],
        ..ExperimentConfig::default()
    };
    let reports = run_experiment(&config);
    write_csv(&reports, std::io::stdout())?;
    let failed = reports.iter().filter(|r| !r.ok).count();
    eprintln!("{} instances, {failed} failed", reports.len());
    Ok(())
}
