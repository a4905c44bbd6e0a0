//! Seeded sampling, identity suites and report emission.

pub mod checks;
pub mod config;
pub mod random;
pub mod report;
pub mod sampling;

use rayon::prelude::*;

use crate::error::Result;
use crate::fieldeq::{fit_proportionality, h_superpotential_at, momentum_conjugate_at, Mechanism};
use checks::{pointwise_residual, CheckContext, CheckId, NON_VACUUM_FLOOR};
use config::SuiteConfig;
use report::{CheckRecord, Conventions, Mode, Report, TetradInfo, EINSTEIN_SIGN, RIEMANN_CONVENTION, SCHEMA_VERSION};
use sampling::sample_points;

fn map_points<T: Send>(
    points: &[Vec<f64>],
    parallel: bool,
    f: impl Fn(usize, &[f64]) -> Result<T> + Sync,
) -> Vec<Result<T>> {
    if parallel {
        points.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()
    } else {
        points.iter().enumerate().map(|(i, x)| f(i, x)).collect()
    }
}

fn summarize(id: CheckId, mode: Mode, tolerance: f64, n_points: usize, results: Vec<Result<f64>>) -> CheckRecord {
    let mut error = None;
    let mut values = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => values.push(v),
            Err(e) => {
                error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    let finite = values.iter().all(|v| v.is_finite());
    if !finite {
        error.get_or_insert_with(|| "non-finite residual".to_string());
    }
    let max = values.iter().copied().filter(|v| v.is_finite()).reduce(f64::max);
    let min = values.iter().copied().filter(|v| v.is_finite()).reduce(f64::min);
    let within = match mode {
        Mode::UpperBound => max.is_some_and(|m| m <= tolerance),
        Mode::LowerBound => min.is_some_and(|m| m >= tolerance),
    };
    CheckRecord {
        name: id,
        mode,
        n_points,
        max_residual: max,
        min_residual: min,
        tolerance,
        pass: error.is_none() && within,
        error,
    }
}

/// Runs every selected check over the sampled points. Failing checks are
/// recorded, never fatal; only bad input aborts.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let t = &cfg.tetrad;
    let domain = t.domain_or_default();
    let points = sample_points(&domain, cfg.n_points, cfg.seed)?;
    let ctx = CheckContext { tetrad: t, domain: &domain, seed: cfg.seed, k: cfg.k };

    let mut ids = cfg.checks.clone();
    ids.sort();
    ids.dedup();

    let mut c1 = None;
    let mut records = Vec::with_capacity(ids.len());
    for id in ids {
        let (mode, tolerance) = if cfg.non_vacuum && id.is_vacuum_check() {
            (Mode::LowerBound, NON_VACUUM_FLOOR)
        } else {
            (Mode::UpperBound, cfg.tolerance(id))
        };
        let record = if id == CheckId::MomentumProportionality {
            let samples = map_points(&points, cfg.parallel, |_, x| {
                let fd = t.frame_data_at(x)?;
                Ok((momentum_conjugate_at(t, x, cfg.k, Mechanism::Jet)?, h_superpotential_at(&fd)))
            });
            match samples.into_iter().collect::<Result<Vec<_>>>() {
                Ok(pairs) => {
                    let fit = fit_proportionality(&pairs);
                    c1 = fit.c1;
                    summarize(id, mode, tolerance, points.len(), vec![Ok(fit.spread)])
                }
                Err(e) => summarize(id, mode, tolerance, points.len(), vec![Err(e)]),
            }
        } else {
            let results = map_points(&points, cfg.parallel, |i, x| pointwise_residual(id, &ctx, i, x));
            summarize(id, mode, tolerance, points.len(), results)
        };
        records.push(record);
    }

    let pass = records.iter().all(|r| r.pass);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        tetrad: TetradInfo {
            name: t.name().to_string(),
            coords: t.chart().coord_names().to_vec(),
            params: t.params().clone(),
        },
        seed: cfg.seed,
        n_points: cfg.n_points,
        non_vacuum: cfg.non_vacuum,
        conventions: Conventions {
            signature: t.chart().signature().to_vec(),
            riemann: RIEMANN_CONVENTION.to_string(),
            einstein_sign: EINSTEIN_SIGN.to_string(),
            k: cfg.k,
            c1,
        },
        records,
        pass,
    })
}
