use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generators::{gen_commuting_plus_noise, gen_permutation_pair};
use crate::error::{Error, Result};
use crate::float::DEFAULT_TOL;
use crate::pipeline::{correct, Assertion, CorrectionConfig, Metrics};
use crate::tuples::{commutator_defect, rank_distance, Backend, Flag, MatrixTuple};

/// Instance family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    CommutingPlusNoise,
    PermutationPair,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::CommutingPlusNoise => "commuting_plus_noise",
            Family::PermutationPair => "permutation_pair",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "commuting_plus_noise" => Ok(Family::CommutingPlusNoise),
            "permutation_pair" => Ok(Family::PermutationPair),
            _ => Err(Error::Parse(format!("unknown family `{s}`"))),
        }
    }
}

/// Everything needed to regenerate one instance.
///
/// For `permutation_pair`, `d` is the square of the torus side and
/// `noise_rank` counts transposition defects.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub family: Family,
    pub d: usize,
    pub n: usize,
    pub noise_rank: usize,
    pub seed: u64,
    pub backend: Backend,
    pub flags: Vec<Flag>,
}

impl InstanceSpec {
    pub fn commuting_plus_noise(d: usize, n: usize, noise_rank: usize, seed: u64) -> Self {
        InstanceSpec {
            family: Family::CommutingPlusNoise,
            d,
            n,
            noise_rank,
            seed,
            backend: Backend::Exact,
            flags: vec![Flag::SelfAdjoint; n],
        }
    }

    pub fn permutation_pair(side: usize, defects: usize, seed: u64) -> Self {
        InstanceSpec {
            family: Family::PermutationPair,
            d: side * side,
            n: 2,
            noise_rank: defects,
            seed,
            backend: Backend::Exact,
            flags: vec![Flag::Unitary; 2],
        }
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    fn side(&self) -> Result<usize> {
        let side = (self.d as f64).sqrt().round() as usize;
        if side * side != self.d {
            return Err(Error::Argument(format!("permutation pair needs a square d, got {}", self.d)));
        }
        Ok(side)
    }

    /// The exact instance; deterministic in the instance spec.
    pub fn generate_exact(&self) -> Result<MatrixTuple> {
        let t = match self.family {
            Family::CommutingPlusNoise => gen_commuting_plus_noise(self.d, self.n, self.noise_rank, self.seed)?,
            Family::PermutationPair => {
                if self.n != 2 {
                    return Err(Error::Argument("permutation pairs have n = 2".into()));
                }
                gen_permutation_pair(self.side()?, self.noise_rank, self.seed)?
            }
        };
        if t.flags() != self.flags.as_slice() {
            return Err(Error::Construction(format!("generated flags {:?} differ from the instance spec", t.flags())));
        }
        Ok(t)
    }

    /// The instance on the backend it names.
    pub fn generate(&self) -> Result<MatrixTuple> {
        let t = self.generate_exact()?;
        Ok(match self.backend {
            Backend::Exact => t,
            Backend::Float => t.to_float(DEFAULT_TOL),
        })
    }

    /// Defect the generator promises: `2·noise_rank/d` or `4·defects/d`.
    pub fn declared_defect(&self) -> Rational64 {
        let k = match self.family {
            Family::CommutingPlusNoise => 2,
            Family::PermutationPair => 4,
        };
        Rational64::new((k * self.noise_rank) as i64, self.d.max(1) as i64).min(Rational64::from_integer(1))
    }
}

/// One block of the instance grid; the cartesian product of its lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub family: Family,
    pub d: Vec<usize>,
    #[serde(default = "default_n")]
    pub n: Vec<usize>,
    pub noise_rank: Vec<usize>,
    /// Instances per grid point, seeded `seed, seed + 1, …`.
    #[serde(default = "default_seeds")]
    pub seeds: usize,
}

fn default_n() -> Vec<usize> {
    vec![2]
}

fn default_seeds() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Arithmetic for the reported `delta_in` and `dist_out`; the correction itself is exact.
    pub backend: Backend,
    pub correction: CorrectionConfig,
    pub grid: Vec<GridEntry>,
    /// Record wall-clock timings; off makes reports byte-identical across runs.
    pub timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            backend: Backend::Exact,
            correction: CorrectionConfig::default(),
            grid: Vec::new(),
            timings: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// The grid expanded into instance specs, in sorted order.
    pub fn instances(&self) -> Vec<InstanceSpec> {
        let mut out = Vec::new();
        for g in &self.grid {
            for &d in &g.d {
                for &n in &g.n {
                    for &noise in &g.noise_rank {
                        for k in 0..g.seeds {
                            let seed = self.seed.wrapping_add(k as u64);
                            let flags = match g.family {
                                Family::CommutingPlusNoise => vec![Flag::SelfAdjoint; n],
                                Family::PermutationPair => vec![Flag::Unitary; n],
                            };
                            out.push(InstanceSpec {
                                family: g.family,
                                d,
                                n,
                                noise_rank: noise,
                                seed,
                                backend: self.backend,
                                flags,
                            });
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Outcome of one instance. Failures are recorded, not raised.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub spec: InstanceSpec,
    pub ok: bool,
    pub error: Option<String>,
    pub delta_in: f64,
    pub dist_out: f64,
    pub coverage: f64,
    /// The generator's declared defect bound, re-measured.
    pub generator: Assertion,
    pub assertions: Vec<Assertion>,
    pub assertions_failed: usize,
    pub metrics: Option<Metrics>,
    pub runtime_ms: f64,
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn failed_report(spec: &InstanceSpec, error: String) -> Report {
    Report {
        spec: spec.clone(),
        ok: false,
        error: Some(error),
        delta_in: f64::NAN,
        dist_out: f64::NAN,
        coverage: 0.0,
        generator: Assertion {
            check: "generator-bound".into(),
            subject: "not measured".into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            passed: false,
        },
        assertions: Vec::new(),
        assertions_failed: 1,
        metrics: None,
        runtime_ms: 0.0,
    }
}

fn run_inner(spec: &InstanceSpec, config: &CorrectionConfig, timings: bool) -> Result<Report> {
    let clock = Instant::now();
    let t = spec.generate_exact()?;
    let declared = spec.declared_defect();
    let result = correct(&t, config)?;
    let mut metrics = result.metrics.clone();
    let (delta_in, dist_out) = match spec.backend {
        Backend::Exact => (to_f64(metrics.input_defect), to_f64(metrics.distance)),
        Backend::Float => {
            let tf = t.to_float(config.tol);
            let out = result.assembled();
            let out = match out.backend() {
                Backend::Exact => out.to_float(config.tol),
                Backend::Float => out,
            };
            (to_f64(commutator_defect(&tf)?), to_f64(rank_distance(&tf, &out)?))
        }
    };
    let generator = Assertion {
        check: "generator-bound".into(),
        subject: format!("{} d {} noise {}", spec.family, spec.d, spec.noise_rank),
        lhs: to_f64(metrics.input_defect),
        rhs: to_f64(declared),
        passed: metrics.input_defect <= declared,
    };
    let mut assertions = result.assertions.clone();
    assertions.push(generator.clone());
    let assertions_failed = assertions.iter().filter(|a| !a.passed).count();
    if !timings {
        metrics.timings = Default::default();
    }
    Ok(Report {
        spec: spec.clone(),
        ok: true,
        error: None,
        delta_in,
        dist_out,
        coverage: to_f64(metrics.coverage),
        generator,
        assertions,
        assertions_failed,
        metrics: Some(metrics),
        runtime_ms: if timings { clock.elapsed().as_secs_f64() * 1e3 } else { 0.0 },
    })
}

/// Correct one instance; errors and panics become a failed report.
pub fn run_instance(spec: &InstanceSpec, config: &CorrectionConfig, timings: bool) -> Report {
    match catch_unwind(AssertUnwindSafe(|| run_inner(spec, config, timings))) {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => failed_report(spec, e.to_string()),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            failed_report(spec, format!("panic: {msg}"))
        }
    }
}

/// Run `correct` over the grid, concurrently; reports come back sorted by spec.
pub fn run_experiment(config: &ExperimentConfig) -> Vec<Report> {
    run_specs(&config.instances(), &config.correction, config.timings)
}

pub fn run_specs(specs: &[InstanceSpec], config: &CorrectionConfig, timings: bool) -> Vec<Report> {
    let mut reports: Vec<Report> = specs.par_iter().map(|s| run_instance(s, config, timings)).collect();
    reports.sort_by(|a, b| a.spec.cmp(&b.spec));
    reports
}
