use std::collections::BTreeMap;
use std::fs;
use std::path::{Path as FsPath, PathBuf};

use seqlepski::kernel::{decompose_error, point_estimate, KernelWindow};
use seqlepski::lab::{
    lower_bound_diagnostic, monte_carlo_risk, moment_suite, stopping_suite, tail_suite,
    LowerBoundDiagnostic, RiskExperiment,
};
use seqlepski::lepski::{adaptive_estimate, bandwidth, effective_size};
use seqlepski::process::{simulate_path, PathConfig};
use seqlepski::rng::{derive_seed, SeedDomain};

use crate::config::{ExperimentConfig, Scenario};
use crate::report::{self, CsvDoc, KHAT_HEADER, RISK_HEADER};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Tail,
    Moments,
    Stopping,
    Lowerbound,
    Grid,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Tail => "tail",
            Suite::Moments => "moments",
            Suite::Stopping => "stopping",
            Suite::Lowerbound => "lowerbound",
            Suite::Grid => "grid",
        }
    }
}

/// Files written and the number of checks that failed.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub failed_checks: usize,
}

fn write(dir: &FsPath, name: &str, bytes: &[u8], outcome: &mut Outcome) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: dir.join(name).display().to_string(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(io)?;
    outcome.files.push(path);
    Ok(())
}

fn numeric(scenario: &Scenario) -> impl Fn(seqlepski::Error) -> CliError + '_ {
    move |source| CliError::Numeric {
        context: format!("scenario `{}`", scenario.id),
        source,
    }
}

fn echo_lambda(scenario: &Scenario) {
    eprintln!("scenario {}: lambda = {}", scenario.id, report::real(scenario.lambda()));
}

/// Risk table for every scenario. Scenarios sharing an output directory
/// share one `risk.csv` and one `risk_khat.csv`.
pub fn run_risk(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut docs: BTreeMap<PathBuf, (CsvDoc, CsvDoc)> = BTreeMap::new();
    if config.scenarios.is_empty() {
        docs.insert(
            config.out_dir.clone(),
            (CsvDoc::new(&RISK_HEADER), CsvDoc::new(&KHAT_HEADER)),
        );
    }
    for s in &config.scenarios {
        echo_lambda(s);
        let exp = RiskExperiment {
            n_list: s.n_list.clone(),
            replications: s.replications,
            signal: s.signal.clone(),
            grid: s.grid,
            master_seed: s.seed,
        };
        let rows = monte_carlo_risk(&exp).map_err(numeric(s))?.rows;
        let (risk, khat) = docs
            .entry(s.out_dir.clone())
            .or_insert_with(|| (CsvDoc::new(&RISK_HEADER), CsvDoc::new(&KHAT_HEADER)));
        report::risk_rows(risk, s, &rows);
        report::khat_rows(khat, s, &rows);
    }
    let mut outcome = Outcome::default();
    for (dir, (risk, khat)) in docs {
        write(&dir, "risk.csv", &risk.into_bytes(), &mut outcome)?;
        write(&dir, "risk_khat.csv", &khat.into_bytes(), &mut outcome)?;
    }
    Ok(outcome)
}

/// Lower-bound diagnostic acceptance: the mean of `(d/n) varsigma^2` within
/// 10% of its target, `eta` centred with unit variance.
pub fn lower_bound_ok(d: &LowerBoundDiagnostic) -> bool {
    let (mean, var) = d.eta_mean_variance();
    (d.mean_varsigma() / d.sigma_star_sq - 1.0).abs() <= 0.1
        && mean.abs() < 0.05
        && (0.9..=1.1).contains(&var)
}

pub fn run_suite(config: &ExperimentConfig, suite: Suite) -> Result<Outcome, CliError> {
    let mut outcome = Outcome::default();
    for s in &config.scenarios {
        echo_lambda(s);
        let lambda = s.lambda();
        let err = numeric(s);
        let n = s.n_list[0];
        let bytes = match suite {
            Suite::Tail => {
                let h = bandwidth(effective_size(n), s.signal.beta());
                let r = tail_suite(&s.signal, n, h, s.replications, &s.z_list, s.seed).map_err(err)?;
                if !r.passes() {
                    outcome.failed_checks += 1;
                }
                report::tail(&r, lambda)
            }
            Suite::Moments => {
                let r = moment_suite(&s.signal, n, s.replications.max(2), s.seed).map_err(err)?;
                if !r.passes() {
                    outcome.failed_checks += 1;
                }
                report::moments(&r, lambda)
            }
            Suite::Stopping => {
                let r = stopping_suite(&s.signal, &s.n_list, &s.stopping_h, s.replications, s.seed)
                    .map_err(err)?;
                if !r.monotone_in_n() {
                    outcome.failed_checks += 1;
                }
                report::stopping(&r, lambda)
            }
            Suite::Lowerbound => {
                let d = lower_bound_diagnostic(
                    s.grid.beta_lo,
                    s.grid.beta_hi,
                    n,
                    s.replications,
                    s.z0(),
                    s.seed,
                )
                .map_err(err)?;
                if !lower_bound_ok(&d) {
                    outcome.failed_checks += 1;
                }
                report::lower_bound(&d, lambda)
            }
            Suite::Grid => {
                let grids = s
                    .n_list
                    .iter()
                    .map(|&n| s.grid.build(n))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(err)?;
                report::grids(&grids)
            }
        };
        let name = format!("{}_{}.csv", suite.name(), s.id);
        write(&s.out_dir, &name, &bytes, &mut outcome)?;
    }
    Ok(outcome)
}

/// Full estimator trace for one path of the first scenario at sample size
/// `n`: per-bandwidth selection data, per-bandwidth estimates and the path.
pub fn trace_path(config: &ExperimentConfig, n: usize) -> Result<Outcome, CliError> {
    let mut outcome = Outcome::default();
    let Some(s) = config.scenarios.first() else {
        return Ok(outcome);
    };
    echo_lambda(s);
    let err = numeric(s);
    let grid = s.grid.build(n).map_err(&err)?;
    let cfg = PathConfig::new(n, derive_seed(s.seed, SeedDomain::Trace, n), 0).map_err(&err)?;
    let path = simulate_path(&s.signal, cfg);
    let estimate = adaptive_estimate(&path, s.z0(), &grid).map_err(&err)?;

    let mut records = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let window = KernelWindow::new(n, s.z0(), grid.bandwidths[j]).map_err(&err)?;
        let e = point_estimate(&path, &window, grid.threshold(j)).map_err(&err)?;
        let d = decompose_error(&path, &s.signal, &window, grid.threshold(j)).map_err(&err)?;
        records.push((e, d));
    }

    write(&s.out_dir, &format!("trace_{}.csv", s.id), &report::trace(&estimate, &grid), &mut outcome)?;
    write(
        &s.out_dir,
        &format!("trace_estimates_{}.csv", s.id),
        &report::estimates(&records, grid.lambda),
        &mut outcome,
    )?;
    write(&s.out_dir, &format!("path_{}.csv", s.id), &report::path(&path, grid.lambda), &mut outcome)?;
    Ok(outcome)
}
