//! Instance generators, batch experiments, the verification suite and report output.

mod experiment;
mod generators;
mod output;
mod suite;

pub use experiment::{run_experiment, run_instance, run_specs, ExperimentConfig, Family, GridEntry, InstanceSpec, Report};
pub use generators::{
    gen_commuting_plus_noise, gen_permutation_pair, random_ideal, random_rational_matrix, random_rational_orthogonal,
};
pub use output::{csv_string, scatter_svg, write_csv, CSV_COLUMNS, CSV_VERSION};
pub use suite::{verify_suite, SuiteResult, SuiteSummary, VerifyConfig};
