use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lambda-coal"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read_all(dir: &Path) -> Vec<(String, String)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn seed_is_required() {
    let out = run(&["rates"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn unknown_suite_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "verify",
        "--seed",
        "1",
        "--suite",
        "nope",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_code_follows_the_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let ok = run(&["verify", "--seed", "5", "--suite", "gh", "--out", d]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8_lossy(&ok.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS C7")), "{text}");
    assert!(dir.path().join("summary.json").exists());

    let failing = run(&["verify", "--seed", "5", "--suite", "hausdorff", "--out", d]);
    assert_eq!(failing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failing.stdout).contains("FAIL C9"));
}

#[test]
fn same_seed_gives_identical_files() {
    let cfg_dir = tempfile::tempdir().unwrap();
    let cfg = cfg_dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "seed = 17\n\n[model]\nkind = \"beta\"\nalpha = 1.5\n\n[run]\nn = 200\nepsilons = [0.01, 0.1]\nreplicas = 3\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = run(&[
            "zpath",
            "--config",
            cfg,
            "--threads",
            "2",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let (fa, fb) = (read_all(a.path()), read_all(b.path()));
    assert_eq!(fa.len(), 6);
    assert_eq!(fa, fb);
}

#[test]
fn gh_compares_written_spaces() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.txt");
    let y = dir.path().join("y.txt");
    std::fs::write(
        &x,
        "dendrogram 1\nleaves 2 point 0\nleaf\nleaf\nmerge 0 1 1\n",
    )
    .unwrap();
    std::fs::write(
        &y,
        "dendrogram 1\nleaves 2 point 0\nleaf\nleaf\nmerge 0 1 3\n",
    )
    .unwrap();
    let out = run(&["gh", x.to_str().unwrap(), y.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("gh: 1\n"));
}
