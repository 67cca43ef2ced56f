//! Run configuration, read from TOML. Unknown keys are rejected.
//!
//! Every threshold used by a verification suite lives here. The defaults
//! are desk-scale choices: the limit theorems give no rates, so the
//! tolerances only need to separate a working pipeline from a broken one
//! at the stated sample sizes.

use crate::error::{domain, Error, Result};
use crate::lambda::LambdaModel;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Names accepted by `suites`, in execution order.
pub const SUITE_NAMES: [&str; 10] = [
    "rates",
    "speed",
    "rate-limit",
    "z-kingman",
    "z-beta",
    "mass",
    "gh",
    "local-time",
    "hausdorff",
    "cross",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Kingman,
    Beta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Beta parameter; ignored for Kingman.
    pub alpha: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            kind: ModelKind::Beta,
            alpha: 1.5,
        }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<LambdaModel> {
        match self.kind {
            ModelKind::Kingman => Ok(LambdaModel::kingman()),
            ModelKind::Beta => LambdaModel::beta(self.alpha),
        }
    }
}

/// Parameters of the single-purpose subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunParams {
    pub n: u32,
    pub epsilons: Vec<f64>,
    pub rs: Vec<f64>,
    pub replicas: usize,
    pub dt: f64,
    /// Interval `[t0, t1]` for the mass process.
    pub t0: f64,
    pub t1: f64,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            n: 1000,
            epsilons: vec![1e-2, 1e-3],
            rs: vec![0.25, 0.5, 0.75],
            replicas: 10,
            dt: 1e-5,
            t0: 0.1,
            t1: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesSuite {
    pub alphas: Vec<f64>,
    pub n_max: u64,
    /// Closed form against quadrature, relative.
    pub quad_rel_tol: f64,
    /// `γ` against `binomial·λ`, relative.
    pub gamma_rel_tol: f64,
}

impl Default for RatesSuite {
    fn default() -> Self {
        RatesSuite {
            alphas: vec![1.1, 1.5, 1.9],
            n_max: 100,
            quad_rel_tol: 1e-8,
            gamma_rel_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpeedSuite {
    pub alpha: f64,
    pub n: u32,
    pub epsilon: f64,
    pub rs: Vec<f64>,
    pub replicas: usize,
    /// Accepted interval for the mean ratio.
    pub lo: f64,
    pub hi: f64,
}

impl Default for SpeedSuite {
    fn default() -> Self {
        SpeedSuite {
            alpha: 1.5,
            n: 100_000,
            epsilon: 1e-3,
            rs: vec![0.0, 0.25, 0.5, 0.75],
            replicas: 200,
            lo: 0.95,
            hi: 1.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RateLimitSuite {
    pub alpha: f64,
    pub n: u32,
    pub epsilons: Vec<f64>,
    pub js: Vec<u64>,
    pub rs: Vec<f64>,
    pub replicas: usize,
}

impl Default for RateLimitSuite {
    fn default() -> Self {
        RateLimitSuite {
            alpha: 1.5,
            n: 100_000,
            epsilons: vec![1e-2, 1e-3, 1e-4],
            js: vec![1, 2],
            rs: vec![0.0, 0.5],
            replicas: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KingmanZSuite {
    pub n: u32,
    pub epsilon: f64,
    pub r: f64,
    pub samples: usize,
    pub ks_max: f64,
    /// Target and tolerance for `P(Z(r) = 1)`.
    pub p_one: f64,
    pub p_one_tol: f64,
}

impl Default for KingmanZSuite {
    fn default() -> Self {
        KingmanZSuite {
            n: 50_000,
            epsilon: 1e-3,
            r: 0.5,
            samples: 2000,
            ks_max: 0.06,
            p_one: 0.25,
            p_one_tol: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BetaZSuite {
    pub alpha: f64,
    pub n: u32,
    pub epsilon: f64,
    pub r: f64,
    pub samples: usize,
    pub ks_max: f64,
    /// Diagnostic rerun of the KS comparison at a window where the
    /// coalescent has come down from `n` blocks.
    pub diag_n: u32,
    pub diag_epsilon: f64,
    /// Marginal comparison against the forward equations.
    pub oracle_rs: Vec<f64>,
    pub oracle_samples: usize,
    /// States above this are lumped into one cell.
    pub oracle_states: usize,
    pub tv_max: f64,
}

impl Default for BetaZSuite {
    fn default() -> Self {
        BetaZSuite {
            alpha: 1.5,
            n: 50_000,
            epsilon: 1e-3,
            r: 0.5,
            samples: 2000,
            ks_max: 0.08,
            diag_n: 200_000,
            diag_epsilon: 0.05,
            oracle_rs: vec![0.25, 0.5, 0.75],
            oracle_samples: 200_000,
            oracle_states: 32,
            tv_max: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MassSuite {
    pub n: u32,
    pub epsilon: f64,
    pub t: f64,
    pub replicas: usize,
    pub ks_max: f64,
    /// Mass-process jump count on `[t0, e·t0]`.
    pub t0: f64,
    pub x_replicas: usize,
    pub p_min: f64,
}

impl Default for MassSuite {
    fn default() -> Self {
        MassSuite {
            n: 100_000,
            epsilon: 1e-3,
            t: 1.0,
            replicas: 2000,
            ks_max: 0.05,
            t0: 1.0,
            x_replicas: 2000,
            p_min: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GhSuite {
    pub triples: usize,
    pub triple_leaves: usize,
    pub triangle_tol: f64,
    pub two_point_pairs: usize,
    pub bracket_pairs: usize,
    pub bracket_leaves: usize,
}

impl Default for GhSuite {
    fn default() -> Self {
        GhSuite {
            triples: 200,
            triple_leaves: 5,
            triangle_tol: 1e-12,
            two_point_pairs: 200,
            bracket_pairs: 500,
            bracket_leaves: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LocalTimeSuite {
    pub dt: f64,
    pub replicas: usize,
    pub ks_max: f64,
}

impl Default for LocalTimeSuite {
    fn default() -> Self {
        LocalTimeSuite {
            dt: 1e-6,
            replicas: 1000,
            ks_max: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HausdorffSuite {
    pub ell_gaps: Vec<f64>,
    pub etas: Vec<f64>,
    pub reps: usize,
    pub tol: f64,
}

impl Default for HausdorffSuite {
    fn default() -> Self {
        HausdorffSuite {
            ell_gaps: vec![0.5, 1.0, 2.0],
            etas: vec![0.5, 1.0, 2.0],
            reps: 10_000,
            tol: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrossSuite {
    pub dt: f64,
    pub replicas: usize,
    pub rs: Vec<f64>,
    pub ks_max: f64,
    /// Replicas used for the distance comparison.
    pub gh_replicas: usize,
    pub gh_points: usize,
    pub gh_median_max: f64,
    /// The finer grid is `dt / refine`.
    pub refine: usize,
}

impl Default for CrossSuite {
    fn default() -> Self {
        CrossSuite {
            dt: 1e-6,
            replicas: 1000,
            rs: vec![0.25, 0.5],
            ks_max: 0.07,
            gh_replicas: 200,
            gh_points: 8,
            gh_median_max: 0.15,
            refine: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Worker threads; `None` uses all cores.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Suites run by `verify`; see [`SUITE_NAMES`].
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub run: RunParams,
    #[serde(default)]
    pub rates: RatesSuite,
    #[serde(default)]
    pub speed: SpeedSuite,
    #[serde(default)]
    pub rate_limit: RateLimitSuite,
    #[serde(default)]
    pub z_kingman: KingmanZSuite,
    #[serde(default)]
    pub z_beta: BetaZSuite,
    #[serde(default)]
    pub mass: MassSuite,
    #[serde(default)]
    pub gh: GhSuite,
    #[serde(default)]
    pub local_time: LocalTimeSuite,
    #[serde(default)]
    pub hausdorff: HausdorffSuite,
    #[serde(default)]
    pub cross: CrossSuite,
}

impl RunConfig {
    /// Defaults everywhere, with the given seed.
    pub fn with_seed(seed: u64) -> Self {
        RunConfig {
            seed,
            out: None,
            threads: None,
            suites: Vec::new(),
            model: ModelSpec::default(),
            run: RunParams::default(),
            rates: RatesSuite::default(),
            speed: SpeedSuite::default(),
            rate_limit: RateLimitSuite::default(),
            z_kingman: KingmanZSuite::default(),
            z_beta: BetaZSuite::default(),
            mass: MassSuite::default(),
            gh: GhSuite::default(),
            local_time: LocalTimeSuite::default(),
            hausdorff: HausdorffSuite::default(),
            cross: CrossSuite::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.suites {
            if s != "all" && !SUITE_NAMES.contains(&s.as_str()) {
                return domain(format!(
                    "unknown suite `{s}`; expected one of {SUITE_NAMES:?} or `all`"
                ));
            }
        }
        if self.threads == Some(0) {
            return domain("threads must be at least 1");
        }
        self.model.build()?;
        let r = &self.run;
        if r.n < 2 || r.replicas == 0 || !(r.dt > 0.0) || !(r.t0 > 0.0 && r.t1 > r.t0) {
            return domain("run parameters out of range");
        }
        if r.epsilons.iter().any(|e| !(*e > 0.0)) || r.rs.iter().any(|x| !(0.0..1.0).contains(x)) {
            return domain("run.epsilons must be positive and run.rs in [0,1)");
        }
        let (zk, zb) = (&self.z_kingman, &self.z_beta);
        if !(0.0..1.0).contains(&zk.r)
            || !(0.0..1.0).contains(&zb.r)
            || zk.samples == 0
            || zb.samples == 0
        {
            return domain("z suites need r in [0,1) and samples ≥ 1");
        }
        if !(self.local_time.dt > 0.0) || !(self.cross.dt > 0.0) || self.cross.refine == 0 {
            return domain("grid suites need positive dt and refine ≥ 1");
        }
        Ok(())
    }

    /// Selected suites with `all` expanded, in canonical order.
    pub fn selected_suites(&self) -> Vec<&'static str> {
        let all = self.suites.iter().any(|s| s == "all");
        SUITE_NAMES
            .iter()
            .copied()
            .filter(|n| all || self.suites.iter().any(|s| s == n))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = RunConfig::from_toml("seed = 7").unwrap();
        assert_eq!(c, RunConfig::with_seed(7));
        assert!(c.selected_suites().is_empty());
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(RunConfig::from_toml("seed = 1\nsede = 2").is_err());
        assert!(RunConfig::from_toml("seed = 1\n[speed]\nreplica = 3").is_err());
        assert!(RunConfig::from_toml("seed = 1\nsuites = [\"nope\"]").is_err());
        assert!(RunConfig::from_toml("out = \"x\"").is_err());
    }

    #[test]
    fn overrides_and_round_trip() {
        let c = RunConfig::from_toml(
            "seed = 3\nsuites = [\"gh\", \"rates\"]\n[z_beta]\nks_max = 0.1\n[model]\nkind = \"kingman\"",
        )
        .unwrap();
        assert_eq!(c.z_beta.ks_max, 0.1);
        assert_eq!(c.z_beta.oracle_states, 32);
        assert_eq!(c.selected_suites(), vec!["rates", "gh"]);
        assert_eq!(RunConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
    }
}
