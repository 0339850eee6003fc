//! Thread-pool drivers. Work is split over time samples and instances;
//! results are collected in input order, so outputs do not depend on the
//! number of threads.

use rayon::prelude::*;
use teichscan_core::curves::FlatCurve;
use teichscan_core::experiments::ensemble::{ensemble, Instance};
use teichscan_core::experiments::suite::{instance_checks, maskit_ratio, report, sample, Caps, Sample, SuiteReport, SuiteSpec};
use teichscan_core::experiments::{assemble, check_grid, scan_row, ScanResult};
use teichscan_core::surface::FlatSurface;
use teichscan_core::{Config, Error};

use crate::error::{CliError, CliResult};

/// A pool with `jobs` threads, or one per available core.
pub fn pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    if jobs == Some(0) {
        return Err(CliError::config("--jobs must be positive"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))
}

pub fn scan(pool: &rayon::ThreadPool, s: &FlatSurface, gamma: &FlatCurve, grid: &[f64], cfg: &Config) -> Result<ScanResult, Error> {
    check_grid(grid)?;
    cfg.validate()?;
    let rows = pool.install(|| grid.par_iter().map(|&t| scan_row(s, gamma, t, cfg)).collect());
    assemble(grid, rows, cfg)
}

/// Samples of every instance at every grid time, grouped by instance.
pub fn samples(pool: &rayon::ThreadPool, instances: &[Instance], grid: &[f64], cfg: &Config) -> Vec<Vec<Sample>> {
    let jobs: Vec<(usize, f64)> = (0..instances.len()).flat_map(|i| grid.iter().map(move |&t| (i, t))).collect();
    let flat: Vec<Sample> = pool.install(|| jobs.par_iter().map(|&(i, t)| sample(&instances[i], t, cfg)).collect());
    let mut it = flat.into_iter();
    instances.iter().map(|_| it.by_ref().take(grid.len()).collect()).collect()
}

pub fn suite(pool: &rayon::ThreadPool, spec: SuiteSpec, cfg: &Config) -> Result<SuiteReport, Error> {
    cfg.validate()?;
    if spec.size == 0 {
        return Err(Error::Invalid("ensemble size must be positive".into()));
    }
    let grid = spec.grid()?;
    let instances = ensemble(spec.seed, spec.size, spec.max_squares)?;
    let all = samples(pool, &instances, &grid, cfg);
    let checks = pool.install(|| {
        instances.par_iter().zip(all.par_iter()).map(|(inst, smp)| instance_checks(inst, smp)).collect::<Result<Vec<_>, _>>()
    })?;
    let maskit = maskit_ratio(cfg)?;
    Ok(report(spec, Caps::default(), checks, Some(maskit)))
}
