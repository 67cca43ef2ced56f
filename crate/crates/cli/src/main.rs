use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use lambda_coalescent::coalescent::{simulate_with, Stop};
use lambda_coalescent::excursion::{
    level_grid, limit_space_from_w, local_time_profile, simulate_straddling_w,
    straddling_excursion, WalkOptions,
};
use lambda_coalescent::harness::{all_passed, run_suite, with_threads, RunConfig};
use lambda_coalescent::lambda::{gamma_rate, lambda_rate, total_rate, MergerSampler};
use lambda_coalescent::limit::{marginal_z_oracle, simulate_x, ZSimulator};
use lambda_coalescent::metric::{
    gh_bounds, gh_exact, pointed_gh, pointed_ghp, read_dendrogram, write_dendrogram,
};
use lambda_coalescent::rng::stream;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lambda-coal",
    version,
    about = "Λ-coalescents near time zero and their limits"
)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run seed; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suites for `verify`, comma separated, or `all`.
    #[arg(long, global = true, value_delimiter = ',')]
    suite: Vec<String>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate λ_{n,k}, γ_{n,k} and the total rate for the configured model.
    Rates,
    /// Simulate coalescent histories down to one block.
    Simulate,
    /// Simulate histories and extract the paths Z_ε.
    Zpath,
    /// Simulate the limit process Z and tabulate its marginals.
    LimitZ,
    /// Simulate the mass process X on [t0, t1].
    LimitX,
    /// Simulate straddling Brownian excursions and their ultrametric spaces.
    Brownian,
    /// Distances between two dendrogram files.
    Gh { first: PathBuf, second: PathBuf },
    /// Run verification suites and write summary.json.
    Verify,
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match (&cli.config, cli.seed) {
        (Some(p), _) => RunConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
        (None, Some(s)) => RunConfig::with_seed(s),
        (None, None) => bail!("a seed is required: pass --seed or a --config file"),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if cfg.out.is_none() {
        cfg.out = Some(PathBuf::from("out"));
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    if !cli.suite.is_empty() {
        cfg.suites = cli.suite.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let p = dir.join(name);
    std::fs::write(&p, body).with_context(|| format!("writing {}", p.display()))
}

fn rates(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let model = cfg.model.build()?;
    let n = cfg.run.n as u64;
    let mut s = String::from("n,k,lambda,gamma\n");
    for k in 2..=n {
        writeln!(
            s,
            "{n},{k},{},{}",
            lambda_rate(n, k, &model)?,
            gamma_rate(n, k, &model)?
        )?;
    }
    write(dir, "rates.csv", &s)?;
    println!("total rate g({n}) = {}", total_rate(n, &model)?);
    Ok(())
}

fn simulate(cfg: &RunConfig, dir: &Path, z: bool) -> Result<()> {
    let model = cfg.model.build()?;
    let n = cfg.run.n;
    let sampler = MergerSampler::new(&model, n as u64, 1024)?;
    let stop = if z {
        Stop::Horizon(cfg.run.epsilons.iter().copied().fold(0.0, f64::max))
    } else {
        Stop::AtOneBlock
    };
    let files: Vec<Vec<(String, String)>> = (0..cfg.run.replicas as u64)
        .into_par_iter()
        .map(|i| -> Result<Vec<(String, String)>> {
            let h = simulate_with(&sampler, n, stop, &mut stream(cfg.seed, "cli-simulate", i))?;
            if !z {
                return Ok(vec![(format!("history_{i}.csv"), h.to_csv())]);
            }
            cfg.run
                .epsilons
                .iter()
                .map(|&e| {
                    Ok((
                        format!("zpath_eps_{e}_rep_{i}.csv"),
                        h.extract_z(e)?.path.to_csv(),
                    ))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    for (name, body) in files.iter().flatten() {
        write(dir, name, body)?;
    }
    println!(
        "wrote {} files to {}",
        files.iter().map(Vec::len).sum::<usize>(),
        dir.display()
    );
    Ok(())
}

fn limit_z(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let model = cfg.model.build()?;
    let (alpha, a) = if model.is_kingman() {
        (2.0, 1.0)
    } else {
        (model.alpha, model.a_lambda)
    };
    let sim = ZSimulator::new(alpha, a)?;
    let r_max = cfg.run.rs.iter().copied().fold(0.0, f64::max);
    let paths: Vec<String> = (0..cfg.run.replicas as u64)
        .into_par_iter()
        .map(|i| {
            Ok(sim
                .simulate(r_max, u64::MAX, &mut stream(cfg.seed, "cli-limit-z", i))?
                .path
                .to_csv())
        })
        .collect::<Result<_>>()?;
    for (i, p) in paths.iter().enumerate() {
        write(dir, &format!("z_rep_{i}.csv"), p)?;
    }
    for &r in &cfg.run.rs {
        let m = marginal_z_oracle(alpha, a, r, 256, 1.0)?;
        write(dir, &format!("z_marginal_r_{r}.csv"), &m.to_csv())?;
        println!(
            "r={r}: P(Z=1)={:.6}, mass above 256: {:.3e}",
            m.pmf[0], m.leak
        );
    }
    Ok(())
}

fn limit_x(cfg: &RunConfig, dir: &Path) -> Result<()> {
    for i in 0..cfg.run.replicas as u64 {
        let p = simulate_x(
            cfg.run.t0,
            cfg.run.t1,
            &mut stream(cfg.seed, "cli-limit-x", i),
        )?;
        write(dir, &format!("x_rep_{i}.csv"), &p.to_csv())?;
    }
    println!("wrote {} paths to {}", cfg.run.replicas, dir.display());
    Ok(())
}

fn brownian(cfg: &RunConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for i in 0..cfg.run.replicas as u64 {
        let mut w = simulate_straddling_w(
            cfg.run.dt,
            -1.0,
            WalkOptions::default(),
            &mut stream(cfg.seed, "cli-brownian", i),
        )?;
        w.seed = Some(cfg.seed);
        w.write_files(&dir.join(format!("w_rep_{i}.csv")))?;
        let y = straddling_excursion(&w, -1.0)?;
        let profile = local_time_profile(&y, &level_grid(0.0, 1.0, 100))?;
        write(dir, &format!("local_time_rep_{i}.csv"), &profile.to_csv())?;
        let space = limit_space_from_w(&w, 64)?;
        write(
            dir,
            &format!("space_rep_{i}.txt"),
            &write_dendrogram(&space),
        )?;
        println!(
            "replica {i}: {} samples, {} leaves, mass {:.4}",
            w.len(),
            space.leaf_count,
            space.total_mass()
        );
    }
    Ok(())
}

fn gh(first: &Path, second: &Path) -> Result<()> {
    let x = read_dendrogram(&std::fs::read_to_string(first)?)?;
    let y = read_dendrogram(&std::fs::read_to_string(second)?)?;
    let (lo, hi) = gh_bounds(&x, &y);
    println!("bounds: [{lo}, {hi}]");
    match gh_exact(&x, &y) {
        Ok(d) => println!("gh: {d}"),
        Err(e) => println!("gh: not computed ({e})"),
    }
    match pointed_gh(&x, &y) {
        Ok(d) => println!("pointed gh: {d}"),
        Err(e) => println!("pointed gh: not computed ({e})"),
    }
    if x.masses.is_some() && y.masses.is_some() {
        match pointed_ghp(&x, &y) {
            Ok(d) => println!("pointed ghp: {d}"),
            Err(e) => println!("pointed ghp: not computed ({e})"),
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    if let Command::Gh { first, second } = &cli.command {
        gh(first, second)?;
        return Ok(true);
    }
    let cfg = load_config(cli)?;
    let dir = cfg.out.clone().expect("set by load_config");
    if let Command::Verify = cli.command {
        let reports = run_suite(&cfg)?;
        for r in &reports {
            println!("{}", r.line());
        }
        return Ok(all_passed(&reports));
    }
    with_threads(&cfg, || match cli.command {
        Command::Rates => rates(&cfg, &dir),
        Command::Simulate => simulate(&cfg, &dir, false),
        Command::Zpath => simulate(&cfg, &dir, true),
        Command::LimitZ => limit_z(&cfg, &dir),
        Command::LimitX => limit_x(&cfg, &dir),
        Command::Brownian => brownian(&cfg, &dir),
        Command::Gh { .. } | Command::Verify => unreachable!("handled above"),
    })??;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
