//! Seeded runs of the verification suites.
//!
//! Replicate `i` of an experiment tagged `tag` draws from
//! `rng::stream(seed, tag, i)`; replicates run in parallel and are
//! collected in index order, so outputs depend only on the configuration.

mod config;
mod gen;
mod report;
pub mod stats;
pub mod suites;

pub use config::{
    BetaZSuite, CrossSuite, GhSuite, HausdorffSuite, KingmanZSuite, LocalTimeSuite, MassSuite,
    ModelKind, ModelSpec, RateLimitSuite, RatesSuite, RunConfig, RunParams, SpeedSuite,
    SUITE_NAMES,
};
pub use gen::random_dendrogram;
pub use report::{all_passed, summary_json, ReportKind, StatReport, Status, Threshold};

use crate::error::{Error, Result};
use std::time::Instant;

/// Runs `f` on a pool with the configured number of threads.
pub fn with_threads<T: Send>(cfg: &RunConfig, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        b = b.num_threads(t);
    }
    let pool = b.build().map_err(|e| Error::Capacity(e.to_string()))?;
    Ok(pool.install(f))
}

/// Runs the selected suites. A suite that errors contributes a single
/// not-run report carrying the error. CSV artifacts and `summary.json` go
/// to `cfg.out` when set.
pub fn run_suite(cfg: &RunConfig) -> Result<Vec<StatReport>> {
    cfg.validate()?;
    with_threads(cfg, || -> Result<Vec<StatReport>> {
        let mut all = Vec::new();
        for name in cfg.selected_suites() {
            let start = Instant::now();
            match suites::run_named(cfg, name) {
                Ok(out) => {
                    let elapsed = start.elapsed().as_secs_f64();
                    if let Some(dir) = &cfg.out {
                        suites::write_artifacts(dir, name, &out.artifacts)?;
                    }
                    all.extend(out.reports.into_iter().map(|mut r| {
                        r.runtime_s = elapsed;
                        r
                    }));
                }
                Err(e) => all.push(StatReport::not_run(
                    name,
                    suites::criterion_of(name),
                    name,
                    e.to_string(),
                )),
            }
        }
        if let Some(dir) = &cfg.out {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("summary.json"), summary_json(&all))?;
        }
        Ok(all)
    })?
}
