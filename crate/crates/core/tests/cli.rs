use std::path::{Path, PathBuf};

use dae_score::cli::cli_main;
use dae_score::io::load_checkpoint;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["dae".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    cli_main(argv)
}

fn out_set(dir: &Path) -> [String; 4] {
    [
        "--set".into(),
        format!("output_dir={}", dir.display()),
        "--set".into(),
        format!("checkpoint={}", dir.join("model.daeb").display()),
    ]
}

fn run_in(dir: &Path, sub: &str, extra: &[&str]) -> i32 {
    let sets = out_set(dir);
    let mut args: Vec<&str> = vec![sub];
    args.extend(sets.iter().map(String::as_str));
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn no_arguments_is_a_usage_error() {
    assert_eq!(run(&[]), 1);
}

#[test]
fn unknown_subcommand_and_flag_are_usage_errors() {
    assert_eq!(run(&["fit"]), 1);
    assert_eq!(run(&["train", "--epochs", "3"]), 1);
}

#[test]
fn help_succeeds() {
    assert_eq!(run(&["--help"]), 0);
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "epochs = 1\nlearning_rat = 0.1\n").unwrap();
    assert_eq!(run(&["train", "--config", cfg.to_str().unwrap()]), 1);
    assert_eq!(run(&["train", "--set", "nonsense=1"]), 1);
    assert_eq!(run(&["train", "--config", "/nonexistent/run.cfg"]), 1);
}

#[test]
fn missing_checkpoint_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), "sample", &[]), 2);
}

#[test]
fn oracle_check_on_single_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("single_gaussian.cfg");
    assert_eq!(run_in(dir.path(), "oracle-check", &["--config", cfg.to_str().unwrap()]), 0);
    let text = std::fs::read_to_string(dir.path().join("oracle_study.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sigma,max_relative_error,mean_relative_error"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    let last = rows.iter().find(|r| r[0] == 0.01).expect("sigma 0.01 row");
    // s = 0.1: σ²/(s² + σ²) = 1e-4 / 1.01e-2
    assert!((last[1] - 1e-4 / 1.01e-2).abs() < 1e-6, "{last:?}");
    assert!(rows.windows(2).all(|w| w[1][1] <= w[0][1]));
}

#[test]
fn train_smoke_writes_loadable_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let code = run_in(
        dir.path(),
        "train",
        &["--set", "epochs=1", "--set", "dataset_n=100", "--set", "hidden=16,16"],
    );
    assert_eq!(code, 0);
    let model = load_checkpoint(dir.path().join("model.daeb")).unwrap();
    assert_eq!(model.data_dim(), 1);
    let loss = std::fs::read_to_string(dir.path().join("loss.csv")).unwrap();
    assert_eq!(loss.lines().count(), 2);

    assert_eq!(run_in(dir.path(), "score-check", &["--set", "grid_points=51"]), 0);
    let field = std::fs::read_to_string(dir.path().join("score_field.csv")).unwrap();
    assert!(field.starts_with("x0,estimate0,truth0\n"));

    assert_eq!(run_in(dir.path(), "sample", &["--set", "chain_batch=8", "--set", "chain_steps=3"]), 0);
    let trace = std::fs::read_to_string(dir.path().join("sample_trace.csv")).unwrap();
    assert!(trace.starts_with("step,chain,log_density,x0\n"));
    assert_eq!(trace.lines().count(), 1 + 4 * 8);
}

#[test]
fn every_model_kind_trains_from_the_cli() {
    for kind in ["dae", "dvae", "daae"] {
        let dir = tempfile::tempdir().unwrap();
        let model = format!("model={kind}");
        let code = run_in(
            dir.path(),
            "train",
            &["--set", &model, "--set", "epochs=1", "--set", "dataset_n=64", "--set", "hidden=8"],
        );
        assert_eq!(code, 0, "{kind}");
        assert_eq!(run_in(dir.path(), "refine", &["--set", "chain_batch=4", "--set", "chain_steps=2"]), 0);
    }
}

#[test]
fn image_runs_write_pgm_grids() {
    let dir = tempfile::tempdir().unwrap();
    let common = [
        "--set", "dataset=blobs8x8", "--set", "dataset_n=64", "--set", "epochs=1",
        "--set", "hidden=16", "--set", "chain_batch=6", "--set", "chain_steps=2", "--set", "grid_cols=3",
    ];
    assert_eq!(run_in(dir.path(), "train", &common), 0);
    assert_eq!(run_in(dir.path(), "sample", &common), 0);
    let pgm = dae_score::io::decode_pgm(&std::fs::read(dir.path().join("sample_final.pgm")).unwrap()).unwrap();
    // 3 × 2 grid of 8 × 8 tiles with 1-pixel separators
    assert_eq!((pgm.width, pgm.height), (26, 17));
}

#[test]
fn identical_configs_give_identical_artifacts() {
    let root = tempfile::tempdir().unwrap();
    let args = ["--set", "epochs=2", "--set", "dataset_n=200", "--set", "hidden=16", "--set", "model=daae"];
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let dir = root.path().join(name);
        assert_eq!(run_in(&dir, "train", &args), 0);
        assert_eq!(run_in(&dir, "sample", &args), 0);
        outputs.push(
            ["model.daeb", "loss.csv", "sample_trace.csv"]
                .map(|f| std::fs::read(dir.join(f)).unwrap()),
        );
    }
    assert_eq!(outputs[0], outputs[1]);
}
