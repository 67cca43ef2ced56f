//! The verification suites, one per acceptance criterion.

use super::config::RunConfig;
use super::gen::random_dendrogram;
use super::report::{StatReport, Threshold};
use super::stats::{
    chi_square_poisson, ks_one_sample, ks_two_sample, mean, median, total_variation,
};
use crate::coalescent::{simulate_with, Stop};
use crate::error::{Error, Result};
use crate::excursion::{
    conditioned_excursion, default_window, excursion_hausdorff_law, limit_space_from_w,
    limit_space_from_zeros, local_time_at, refine_bridge, simulate_straddling_excursion,
    simulate_straddling_w, WalkOptions,
};
use crate::lambda::{
    beta_rate_by_quadrature, cdi_constant, gamma_rate, generator_coefficient, lambda_rate,
    rate_limit_from_speed, speed_constant, LambdaModel, MergerSampler,
};
use crate::limit::{
    build_limit_tree, marginal_z_oracle, simulate_x, simulate_z, x_marginal_cdf, ZSimulator,
};
use crate::metric::{ball_count_path, gh_bounds, gh_exact, pointed_gh, Dendrogram, Merge};
use crate::rng::{stream, StreamRng};
use rand::Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;

/// Output of one suite: reports plus named CSV artifacts.
pub struct SuiteOutput {
    pub reports: Vec<StatReport>,
    pub artifacts: Vec<(String, String)>,
}

impl SuiteOutput {
    fn new() -> Self {
        SuiteOutput {
            reports: Vec::new(),
            artifacts: Vec::new(),
        }
    }
}

/// Replica results in index order, whatever the scheduling.
fn replicate<T: Send>(n: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    (0..n as u64).into_par_iter().map(f).collect()
}

fn rng(cfg: &RunConfig, tag: &str, i: u64) -> StreamRng {
    stream(cfg.seed, tag, i)
}

fn column_csv(header: &str, cols: &[&[f64]]) -> String {
    let mut s = format!("{header}\n");
    let n = cols.iter().map(|c| c.len()).max().unwrap_or(0);
    for i in 0..n {
        let row: Vec<String> = cols
            .iter()
            .map(|c| c.get(i).map_or(String::new(), |v| v.to_string()))
            .collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn collect<T>(v: Vec<Result<T>>) -> Result<Vec<T>> {
    v.into_iter().collect()
}

/// Criterion 1: closed-form rates against quadrature and `γ = C(n,k) λ`.
pub fn rates(cfg: &RunConfig) -> Result<SuiteOutput> {
    let s = &cfg.rates;
    let mut out = SuiteOutput::new();
    for &alpha in &s.alphas {
        let model = LambdaModel::beta(alpha)?;
        let pairs: Vec<(u64, u64)> = (2..=s.n_max)
            .flat_map(|n| (2..=n).map(move |k| (n, k)))
            .collect();
        let rows = collect(replicate(pairs.len(), |i| {
            let (n, k) = pairs[i as usize];
            let closed = lambda_rate(n, k, &model)?;
            let quad = beta_rate_by_quadrature(n, k, alpha)?;
            // Exact binomial in integers.
            let mut c: u128 = 1;
            for i in 0..k as u128 {
                c = c * (n as u128 - i) / (i + 1);
            }
            let gamma = gamma_rate(n, k, &model)?;
            Ok((n, k, closed, quad, gamma, c as f64 * closed))
        }))?;
        let quad_err = rows
            .iter()
            .map(|r| ((r.2 - r.3) / r.3).abs())
            .fold(0.0, f64::max);
        let gamma_err = rows
            .iter()
            .map(|r| ((r.4 - r.5) / r.5).abs())
            .fold(0.0, f64::max);
        let mut csv =
            String::from("n,k,lambda_closed,lambda_quadrature,gamma,binomial_times_lambda\n");
        for r in &rows {
            let _ = writeln!(csv, "{},{},{},{},{},{}", r.0, r.1, r.2, r.3, r.4, r.5);
        }
        out.artifacts
            .push((format!("rates_alpha_{alpha}.csv"), csv));
        out.reports.push(StatReport::new(
            "rates",
            1,
            format!("max rel err closed vs quadrature, alpha={alpha}"),
            quad_err,
            Threshold::AtMost {
                bound: s.quad_rel_tol,
            },
            vec![rows.len()],
        ));
        out.reports.push(StatReport::new(
            "rates",
            1,
            format!("max rel err gamma vs binomial*lambda, alpha={alpha}"),
            gamma_err,
            Threshold::AtMost {
                bound: s.gamma_rel_tol,
            },
            vec![rows.len()],
        ));
    }
    Ok(out)
}

/// Criterion 2: block counts against the speed `(1-r)ε ≈ C N^{1-α}`.
pub fn speed(cfg: &RunConfig) -> Result<SuiteOutput> {
    let s = &cfg.speed;
    let model = LambdaModel::beta(s.alpha)?;
    let sampler = MergerSampler::new(&model, s.n as u64, 0)?;
    let c_alpha = cdi_constant(s.alpha)?;
    let c_true = speed_constant(&model)?;
    let counts = collect(replicate(s.replicas, |i| {
        let h = simulate_with(
            &sampler,
            s.n,
            Stop::Horizon(s.epsilon),
            &mut rng(cfg, "speed", i),
        )?;
        s.rs.iter()
            .map(|r| h.block_count((1.0 - r) * s.epsilon).map(|b| b as f64))
            .collect::<Result<Vec<f64>>>()
    }))?;
    let mut out = SuiteOutput::new();
    let a = 1.0 - s.alpha;
    for (ri, &r) in s.rs.iter().enumerate() {
        let t = (1.0 - r) * s.epsilon;
        let ns: Vec<f64> = counts.iter().map(|c| c[ri]).collect();
        let ratio: Vec<f64> = ns.iter().map(|n| t / (c_alpha * n.powf(a))).collect();
        let ratio_true: Vec<f64> = ns.iter().map(|n| t / (c_true * n.powf(a))).collect();
        // Deterministic prediction from N' = -N^α / (α-1) / c with N(0) = n.
        let predicted = ((s.n as f64).powf(a) + t / c_true).powf(1.0 / a);
        let finite_n: Vec<f64> = ns.iter().map(|n| n / predicted).collect();
        out.artifacts.push((
            format!("speed_r_{r}.csv"),
            column_csv("blocks,ratio", &[&ns, &ratio]),
        ));
        out.reports.push(StatReport::new(
            "speed",
            2,
            format!("mean (1-r)eps/(C_alpha N^(1-alpha)), r={r}"),
            mean(&ratio),
            Threshold::Within { lo: s.lo, hi: s.hi },
            vec![s.replicas],
        ));
        out.reports.push(
            StatReport::new(
                "speed",
                2,
                format!("same ratio with c = alpha/(A Gamma(2-alpha)), r={r}"),
                mean(&ratio_true),
                Threshold::Within { lo: s.lo, hi: s.hi },
                vec![s.replicas],
            )
            .diagnostic(),
        );
        out.reports.push(
            StatReport::new(
                "speed",
                2,
                format!("mean N / finite-n mean-field prediction, r={r}"),
                mean(&finite_n),
                Threshold::Within { lo: s.lo, hi: s.hi },
                vec![s.replicas],
            )
            .diagnostic(),
        );
    }
    Ok(out)
}

fn decreasing_violations(seq: &[f64]) -> f64 {
    seq.windows(2).filter(|w| !(w[1] < w[0])).count() as f64
}

/// Criterion 3: `E|ε γ_{N,j+1}/N - limit|` decreases along the ε list.
pub fn rate_limit(cfg: &RunConfig) -> Result<SuiteOutput> {
    let s = &cfg.rate_limit;
    let model = LambdaModel::beta(s.alpha)?;
    let sampler = MergerSampler::new(&model, s.n as u64, 0)?;
    let cells: Vec<(u64, f64)> =
        s.js.iter()
            .flat_map(|&j| s.rs.iter().map(move |&r| (j, r)))
            .collect();
    // err[e][c] = (error vs stated limit, error vs speed-derived limit)
    let mut err = Vec::new();
    for (ei, &eps) in s.epsilons.iter().enumerate() {
        let per = collect(replicate(s.replicas, |i| {
            let h = simulate_with(
                &sampler,
                s.n,
                Stop::Horizon(eps),
                &mut rng(cfg, &format!("rate-limit-{ei}"), i),
            )?;
            cells
                .iter()
                .map(|&(j, r)| {
                    let nb = h.block_count((1.0 - r) * eps)? as u64;
                    let v = if nb > j {
                        eps * gamma_rate(nb, j + 1, &model)? / nb as f64
                    } else {
                        0.0
                    };
                    let stated = generator_coefficient(j, &model)? / (1.0 - r);
                    let derived = rate_limit_from_speed(j, r, s.alpha)?;
                    Ok(((v - stated).abs(), (v - derived).abs()))
                })
                .collect::<Result<Vec<(f64, f64)>>>()
        }))?;
        err.push(
            (0..cells.len())
                .map(|c| {
                    let a: Vec<f64> = per.iter().map(|p| p[c].0).collect();
                    let b: Vec<f64> = per.iter().map(|p| p[c].1).collect();
                    (mean(&a), mean(&b))
                })
                .collect::<Vec<_>>(),
        );
    }
    let mut out = SuiteOutput::new();
    let mut csv = String::from("epsilon,j,r,mean_abs_err_stated,mean_abs_err_derived\n");
    for (c, &(j, r)) in cells.iter().enumerate() {
        let stated: Vec<f64> = err.iter().map(|e| e[c].0).collect();
        let derived: Vec<f64> = err.iter().map(|e| e[c].1).collect();
        for (ei, eps) in s.epsilons.iter().enumerate() {
            let _ = writeln!(csv, "{eps},{j},{r},{},{}", stated[ei], derived[ei]);
        }
        let fmt = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:.4}"))
                .collect::<Vec<_>>()
                .join(" > ")
        };
        out.reports.push(
            StatReport::new(
                "rate-limit",
                3,
                format!("non-decreasing steps of E|err| over eps, j={j}, r={r}"),
                decreasing_violations(&stated),
                Threshold::AtMost { bound: 0.0 },
                vec![s.replicas; s.epsilons.len()],
            )
            .with_note(fmt(&stated)),
        );
        out.reports.push(
            StatReport::new(
                "rate-limit",
                3,
                format!("same against the speed-derived limit, j={j}, r={r}"),
                decreasing_violations(&derived),
                Threshold::AtMost { bound: 0.0 },
                vec![s.replicas; s.epsilons.len()],
            )
            .diagnostic()
            .with_note(fmt(&derived)),
        );
    }
    out.artifacts.push(("rate_limit.csv".into(), csv));
    Ok(out)
}

fn coalescent_z(
    cfg: &RunConfig,
    tag: &str,
    model: &LambdaModel,
    n: u32,
    eps: f64,
    r: f64,
    reps: usize,
) -> Result<Vec<f64>> {
    let sampler = MergerSampler::new(model, n as u64, 0)?;
    collect(replicate(reps, |i| {
        let h = simulate_with(&sampler, n, Stop::Horizon(eps), &mut rng(cfg, tag, i))?;
        Ok(h.extract_z(eps)?.path.value_at(r))
    }))
}

fn frac_equal(a: &[f64], v: f64) -> f64 {
    a.iter().filter(|&&x| x == v).count() as f64 / a.len() as f64
}

/// Criterion 4: `Z_ε` of Kingman's coalescent against the limit `Z`.
pub fn z_kingman(cfg: &RunConfig) -> Result<SuiteOutput> {
    let s = &cfg.z_kingman;
    let coal = coalescent_z(
        cfg,
        "z-kingman-coal",
        &LambdaModel::kingman(),
        s.n,
        s.epsilon,
        s.r,
        s.samples,
    )?;
    let lim = collect(replicate(s.samples, |i| {
        Ok(simulate_z(2.0, 1.0, s.r, &mut rng(cfg, "z-kingman-lim", i))?.value_at(s.r))
    }))?;
    let mut out = SuiteOutput::new();
    out.artifacts.push((
        "z_kingman.csv".into(),
        column_csv("coalescent,limit", &[&coal, &lim]),
    ));
    let n = vec![coal.len(), lim.len()];
    out.reports.push(StatReport::new(
        "z-kingman",
        4,
        format!("KS Z_eps vs Z at r={}", s.r),
        ks_two_sample(&coal, &lim)?,
        Threshold::Below { bound: s.ks_max },
        n.clone(),
    ));
    out.reports.push(StatReport::new(
        "z-kingman",
        4,
        format!("P(Z({})=1) from simulate_z", s.r),
        frac_equal(&lim, 1.0),
        Threshold::Near {
            target: s.p_one,
            tol: s.p_one_tol,
        },
        vec![lim.len()],
    ));
    out.reports.push(
        StatReport::new(
            "z-kingman",
            4,
            format!("P(Z_eps({})=1) from the coalescent", s.r),
            frac_equal(&coal, 1.0),
            Threshold::Near {
                target: s.p_one,
                tol: s.p_one_tol,
            },
            vec![coal.len()],
        )
        .diagnostic(),
    );
    Ok(out)
}

/// Criterion 5: Beta coalescent against `Z(α)`, and `Z(α)` against the
/// forward equations.
pub fn z_beta(cfg: &RunConfig) -> Result<SuiteOutput> {
    let s = &cfg.z_beta;
    let model = LambdaModel::beta(s.alpha)?;
    let sim = ZSimulator::from_model(&model)?;
    let coal = coalescent_z(cfg, "z-beta-coal", &model, s.n, s.epsilon, s.r, s.samples)?;
    let lim = collect(replicate(s.samples, |i| {
        Ok(sim
            .simulate(s.r, u64::MAX, &mut rng(cfg, "z-beta-lim", i))?
            .path
            .value_at(s.r))
    }))?;
    let mut out = SuiteOutput::new();
    out.artifacts.push((
        "z_beta.csv".into(),
        column_csv("coalescent,limit", &[&coal, &lim]),
    ));
    out.reports.push(StatReport::new(
        "z-beta",
        5,
        format!("KS Z_eps vs Z at r={}, alpha={}", s.r, s.alpha),
        ks_two_sample(&coal, &lim)?,
        Threshold::Below { bound: s.ks_max },
        vec![coal.len(), lim.len()],
    ));
    if s.diag_n >= 2 {
        let coal2 = coalescent_z(
            cfg,
            "z-beta-coal-diag",
            &model,
            s.diag_n,
            s.diag_epsilon,
            s.r,
            s.samples,
        )?;
        out.reports.push(
            StatReport::new(
                "z-beta",
                5,
                format!("same KS with n={}, eps={}", s.diag_n, s.diag_epsilon),
                ks_two_sample(&coal2, &lim)?,
                Threshold::Below { bound: s.ks_max },
                vec![coal2.len(), lim.len()],
            )
            .diagnostic(),
        );
    }
    let m = s.oracle_states;
    for (ri, &r) in s.oracle_rs.iter().enumerate() {
        let oracle = marginal_z_oracle(s.alpha, model.a_lambda, r, m, 1.0)?;
        let states = collect(replicate(s.oracle_samples, |i| {
            Ok(sim
                .simulate(
                    r,
                    m as u64 + 1,
                    &mut rng(cfg, &format!("z-beta-marginal-{ri}"), i),
                )?
                .path
                .last_value())
        }))?;
        let mut emp = vec![0.0; m + 1];
        for st in &states {
            emp[(*st as usize).min(m + 1) - 1] += 1.0 / states.len() as f64;
        }
        let mut exact = oracle.pmf.clone();
        exact.push(oracle.leak);
        let mut csv = String::from("state,oracle,empirical\n");
        for k in 0..=m {
            let label = if k == m {
                format!(">{m}")
            } else {
                (k + 1).to_string()
            };
            let _ = writeln!(csv, "{label},{},{}", exact[k], emp[k]);
        }
        out.artifacts
            .push((format!("z_beta_marginal_r_{r}.csv"), csv));
        out.reports.push(
            StatReport::new(
                "z-beta",
                5,
                format!("TV simulate_z vs forward equations, r={r}, states 1..{m} and >{m}"),
                total_variation(&exact, &emp),
                Threshold::Below { bound: s.tv_max },
                vec![states.len()],
            )
            .with_note(format!("tail mass {:.4}", oracle.leak)),
        );
    }
    Ok(out)
}

/// Criterion 6: frequency of the block of 1 against the mass process, and
/// the jump counts of the mass process.
pub fn mass(cfg: &RunConfig) -> Result<SuiteOutput> {
    let s = &cfg.mass;
    let sampler = MergerSampler::new(&LambdaModel::kingman(), s.n as u64, 0)?;
    let t_abs = s.epsilon * s.t;
    let freq = collect(replicate(s.replicas, |i| {
        let h = simulate_with(
            &sampler,
            s.n,
            Stop::Horizon(t_abs),
            &mut rng(cfg, "mass", i),
        )?;
        Ok(h.frequency_of_one(t_abs)? / s.epsilon)
    }))?;
    let cdf = |x: f64| x_marginal_cdf(s.t, x);
    let scaled: Vec<f64> = freq.iter().map(|x| 4.0 * x).collect();
    let counts = collect(replicate(s.x_replicas, |i| {
        let p = simulate_x(s.t0, std::f64::consts::E * s.t0, &mut rng(cfg, "mass-x", i))?;
        Ok(p.times.len() as u64 - 1)
    }))?;
    let chi = chi_square_poisson(&counts, 2.0)?;
    let mut out = SuiteOutput::new();
    out.artifacts.push((
        "mass_frequency.csv".into(),
        column_csv("scaled_frequency", &[&freq]),
    ));
    let cf: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    out.artifacts
        .push(("mass_jump_counts.csv".into(), column_csv("jumps", &[&cf])));
    out.reports.push(StatReport::new(
        "mass",
        6,
        format!("KS eps^-1 F(eps t) vs Gamma(2, scale 2t), t={}", s.t),
        ks_one_sample(&freq, cdf)?,
        Threshold::Below { bound: s.ks_max },
        vec![freq.len()],
    ));
    out.reports.push(
        StatReport::new(
            "mass",
            6,
            "KS 4 eps^-1 F(eps t) vs Gamma(2, scale 2t)",
            ks_one_sample(&scaled, cdf)?,
            Threshold::Below { bound: s.ks_max },
            vec![freq.len()],
        )
        .diagnostic()
        .with_note(format!("mean of eps^-1 F = {:.4}", mean(&freq))),
    );
    out.reports.push(
        StatReport::new(
            "mass",
            6,
            "Poisson(2) chi-square p-value of X jump counts on [t0, e t0]",
            chi.p_value,
            Threshold::Above { bound: s.p_min },
            vec![counts.len()],
        )
        .with_note(format!("statistic {:.3} on {} df", chi.statistic, chi.df)),
    );
    Ok(out)
}

fn two_point(a: f64) -> Dendrogram {
    Dendrogram::new(
        2,
        0,
        None,
        vec![Merge {
            children: vec![0, 1],
            height: a,
        }],
    )
    .expect("valid")
}

/// Criterion 7: properties of the exact distance and its bounds.
pub fn gh(cfg: &RunConfig) -> Result<SuiteOutput> {
    let s = &cfg.gh;
    let triples = collect(replicate(s.triples, |i| {
        let mut g = rng(cfg, "gh-triples", i);
        let sp: Vec<Dendrogram> = (0..3)
            .map(|_| {
                let n = g.random_range(1..=s.triple_leaves);
                random_dendrogram(n, false, &mut g)
            })
            .collect();
        let xy = gh_exact(&sp[0], &sp[1])?;
        let yx = gh_exact(&sp[1], &sp[0])?;
        let yz = gh_exact(&sp[1], &sp[2])?;
        let xz = gh_exact(&sp[0], &sp[2])?;
        Ok(((xy - yx).abs(), xz - xy - yz))
    }))?;
    let two = collect(replicate(s.two_point_pairs, |i| {
        let mut g = rng(cfg, "gh-two", i);
        let (a, b) = (g.random::<f64>() + 1e-3, g.random::<f64>() + 1e-3);
        Ok((gh_exact(&two_point(a), &two_point(b))? - (a - b).abs() / 2.0).abs())
    }))?;
    let brackets = collect(replicate(s.bracket_pairs, |i| {
        let mut g = rng(cfg, "gh-bounds", i);
        let x = {
            let n = g.random_range(1..=s.bracket_leaves);
            random_dendrogram(n, false, &mut g)
        };
        let y = {
            let n = g.random_range(1..=s.bracket_leaves);
            random_dendrogram(n, false, &mut g)
        };
        let exact = gh_exact(&x, &y)?;
        let (lo, hi) = gh_bounds(&x, &y);
        Ok(if lo <= exact && exact <= hi { 0.0 } else { 1.0 })
    }))?;
    let mut out = SuiteOutput::new();
    let sym = triples.iter().map(|t| t.0).fold(0.0, f64::max);
    let tri = triples
        .iter()
        .map(|t| t.1)
        .fold(f64::NEG_INFINITY, f64::max);
    out.reports.push(StatReport::new(
        "gh",
        7,
        "max |d(X,Y) - d(Y,X)|",
        sym,
        Threshold::AtMost { bound: 0.0 },
        vec![s.triples],
    ));
    out.reports.push(StatReport::new(
        "gh",
        7,
        "max d(X,Z) - d(X,Y) - d(Y,Z)",
        tri,
        Threshold::AtMost {
            bound: s.triangle_tol,
        },
        vec![s.triples],
    ));
    out.reports.push(StatReport::new(
        "gh",
        7,
        "max |d(two-point a, two-point b) - |a-b|/2|",
        two.iter().copied().fold(0.0, f64::max),
        Threshold::AtMost { bound: 0.0 },
        vec![s.two_point_pairs],
    ));
    out.reports.push(StatReport::new(
        "gh",
        7,
        "pairs where gh_bounds fails to bracket gh_exact",
        brackets.iter().sum(),
        Threshold::AtMost { bound: 0.0 },
        vec![s.bracket_pairs],
    ));
    Ok(out)
}

/// `P(ℓ ≤ x)` for an exponential with mean 2.
fn exp_half_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        1.0 - (-x / 2.0).exp()
    }
}

/// Criterion 8: local time at 1 of the two excursion laws.
pub fn local_time(cfg: &RunConfig) -> Result<SuiteOutput> {
    let s = &cfg.local_time;
    let cond = collect(replicate(s.replicas, |i| {
        Ok(local_time_at(
            &conditioned_excursion(s.dt, &mut rng(cfg, "lt-conditioned", i))?,
            1.0,
        ))
    }))?;
    let strad = collect(replicate(s.replicas, |i| {
        let y = simulate_straddling_excursion(
            s.dt,
            WalkOptions::default(),
            &mut rng(cfg, "lt-straddling", i),
        )?;
        Ok(local_time_at(&y, 1.0))
    }))?;
    let mut out = SuiteOutput::new();
    out.artifacts.push((
        "local_time.csv".into(),
        column_csv("conditioned,straddling", &[&cond, &strad]),
    ));
    out.reports.push(
        StatReport::new(
            "local-time",
            8,
            "KS local time at 1 of the conditioned excursion vs Exp(1/2)",
            ks_one_sample(&cond, exp_half_cdf)?,
            Threshold::Below { bound: s.ks_max },
            vec![cond.len()],
        )
        .with_note(format!("mean {:.4}", mean(&cond))),
    );
    out.reports.push(
        StatReport::new(
            "local-time",
            8,
            "KS local time at 1 of the straddling excursion vs Gamma(2, scale 2)",
            ks_one_sample(&strad, |x| x_marginal_cdf(1.0, x))?,
            Threshold::Below { bound: s.ks_max },
            vec![strad.len()],
        )
        .with_note(format!("mean {:.4}", mean(&strad))),
    );
    Ok(out)
}

/// Criterion 9: probability that no excursion below 1 in a local-time
/// window is deeper than η.
pub fn hausdorff(cfg: &RunConfig) -> Result<SuiteOutput> {
    let s = &cfg.hausdorff;
    let mut out = SuiteOutput::new();
    let mut csv =
        String::from("ell_gap,eta,empirical,exp_minus_gap_over_eta,exp_minus_gap_over_2eta\n");
    for (a, &gap) in s.ell_gaps.iter().enumerate() {
        for (b, &eta) in s.etas.iter().enumerate() {
            let p = excursion_hausdorff_law(
                gap,
                eta,
                s.reps,
                &mut rng(cfg, "hausdorff", (a * 64 + b) as u64),
            )?;
            let stated = (-gap / eta).exp();
            let ito = (-gap / (2.0 * eta)).exp();
            let _ = writeln!(csv, "{gap},{eta},{p},{stated},{ito}");
            out.reports.push(StatReport::new(
                "hausdorff",
                9,
                format!("P(no excursion deeper than eta), gap={gap}, eta={eta} vs exp(-gap/eta)"),
                p,
                Threshold::Near {
                    target: stated,
                    tol: s.tol,
                },
                vec![s.reps],
            ));
            out.reports.push(
                StatReport::new(
                    "hausdorff",
                    9,
                    format!("same vs exp(-gap/(2 eta)), gap={gap}, eta={eta}"),
                    p,
                    Threshold::Near {
                        target: ito,
                        tol: s.tol,
                    },
                    vec![s.reps],
                )
                .diagnostic(),
            );
        }
    }
    out.artifacts.push(("hausdorff.csv".into(), csv));
    Ok(out)
}

/// Pointed distance between the `points`-leaf quotients of `space` and of a
/// limit tree grown along the ball-count path of `space`.
pub fn tree_vs_space_distance<R: Rng + ?Sized>(
    space: &Dendrogram,
    points: usize,
    rng: &mut R,
) -> Result<f64> {
    let path = ball_count_path(space);
    let horizon = path
        .times
        .iter()
        .zip(&path.values)
        .find(|(_, &v)| v > points as f64)
        .map(|(&t, _)| t);
    let eta = match horizon {
        Some(t) => 1.0 - t,
        None => {
            let finest = space.merges.iter().map(|m| m.height).fold(1.0, f64::min);
            0.5 * finest
        }
    };
    let tree = build_limit_tree(&path, eta.clamp(1e-12, 1.0 - 1e-12), rng)?;
    pointed_gh(&tree.coarsen_to(points)?, &space.coarsen_to(points)?)
}

/// Criterion 10: the space built from `W` against the limit process.
pub fn cross(cfg: &RunConfig) -> Result<SuiteOutput> {
    let s = &cfg.cross;
    let opts = WalkOptions::default();
    let rows = collect(replicate(s.replicas, |i| {
        let w = simulate_straddling_w(s.dt, -1.0, opts, &mut rng(cfg, "cross-w", i))?;
        let space = limit_space_from_w(&w, usize::MAX)?;
        let counts: Vec<f64> =
            s.rs.iter()
                .map(|r| space.ball_count(1.0 - r) as f64)
                .collect();
        let zmax = s.rs.iter().copied().fold(0.0, f64::max);
        let z = simulate_z(2.0, 1.0, zmax, &mut rng(cfg, "cross-z", i))?;
        let zs: Vec<f64> = s.rs.iter().map(|&r| z.value_at(r)).collect();
        let mut dist = None;
        if (i as usize) < s.gh_replicas {
            let coarse =
                tree_vs_space_distance(&space, s.gh_points, &mut rng(cfg, "cross-tree", i))?;
            let routes = gh_exact(
                &limit_space_from_w(&w, s.gh_points)?,
                &limit_space_from_zeros(&w, s.gh_points)?,
            )?;
            let fine_w = refine_bridge(&w, s.refine, &mut rng(cfg, "cross-refine", i))?;
            drop(w);
            let fine_space = limit_space_from_w(&fine_w, usize::MAX)?;
            let fine =
                tree_vs_space_distance(&fine_space, s.gh_points, &mut rng(cfg, "cross-tree", i))?;
            dist = Some((coarse, fine, routes));
        }
        Ok((counts, zs, space.total_mass(), dist))
    }))?;
    let mut out = SuiteOutput::new();
    for (k, &r) in s.rs.iter().enumerate() {
        let a: Vec<f64> = rows.iter().map(|x| x.0[k]).collect();
        let b: Vec<f64> = rows.iter().map(|x| x.1[k]).collect();
        out.artifacts.push((
            format!("cross_counts_r_{r}.csv"),
            column_csv("w_space,limit_z", &[&a, &b]),
        ));
        out.reports.push(StatReport::new(
            "cross",
            10,
            format!("KS ball count of W-space vs Z at r={r}"),
            ks_two_sample(&a, &b)?,
            Threshold::Below { bound: s.ks_max },
            vec![a.len(), b.len()],
        ));
    }
    let masses: Vec<f64> = rows.iter().map(|x| x.2).collect();
    out.reports.push(
        StatReport::new(
            "cross",
            10,
            "KS total mass of W-space vs Gamma(2, scale 2)",
            ks_one_sample(&masses, |x| x_marginal_cdf(1.0, x))?,
            Threshold::Below { bound: 0.05 },
            vec![masses.len()],
        )
        .diagnostic(),
    );
    let d: Vec<(f64, f64, f64)> = rows.iter().filter_map(|x| x.3).collect();
    if !d.is_empty() {
        let coarse: Vec<f64> = d.iter().map(|x| x.0).collect();
        let fine: Vec<f64> = d.iter().map(|x| x.1).collect();
        let routes = d.iter().map(|x| x.2).fold(0.0, f64::max);
        out.artifacts.push((
            "cross_distance.csv".into(),
            column_csv("coarse,fine", &[&coarse, &fine]),
        ));
        let (mc, mf) = (median(&coarse)?, median(&fine)?);
        out.reports.push(StatReport::new(
            "cross",
            10,
            format!(
                "median pointed GH, {}-point quotients, dt={}",
                s.gh_points, s.dt
            ),
            mc,
            Threshold::Below {
                bound: s.gh_median_max,
            },
            vec![coarse.len()],
        ));
        out.reports.push(
            StatReport::new(
                "cross",
                10,
                format!("median change when dt is divided by {}", s.refine),
                mf - mc,
                Threshold::Below { bound: 0.0 },
                vec![fine.len()],
            )
            .with_note(format!("fine median {mf:.4}")),
        );
        out.reports.push(
            StatReport::new(
                "cross",
                10,
                "max GH between the excursion and zero-set routes",
                routes,
                Threshold::AtMost {
                    bound: default_window(s.dt),
                },
                vec![d.len()],
            )
            .diagnostic(),
        );
    }
    Ok(out)
}

/// Runs one suite by name.
pub fn run_named(cfg: &RunConfig, name: &str) -> Result<SuiteOutput> {
    match name {
        "rates" => rates(cfg),
        "speed" => speed(cfg),
        "rate-limit" => rate_limit(cfg),
        "z-kingman" => z_kingman(cfg),
        "z-beta" => z_beta(cfg),
        "mass" => mass(cfg),
        "gh" => gh(cfg),
        "local-time" => local_time(cfg),
        "hausdorff" => hausdorff(cfg),
        "cross" => cross(cfg),
        other => Err(Error::Domain(format!("unknown suite `{other}`"))),
    }
}

/// Criterion number of a suite.
pub fn criterion_of(name: &str) -> u32 {
    super::config::SUITE_NAMES
        .iter()
        .position(|&n| n == name)
        .map_or(0, |p| p as u32 + 1)
}

pub(crate) fn write_artifacts(
    dir: &Path,
    suite: &str,
    artifacts: &[(String, String)],
) -> Result<()> {
    let d = dir.join(suite);
    std::fs::create_dir_all(&d)?;
    for (name, body) in artifacts {
        std::fs::write(d.join(name), body)?;
    }
    Ok(())
}
