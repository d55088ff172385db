use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use pagegraph::ingest::{self, ActivityDataset};
use pagegraph::pipeline::{run_pipeline, ExportKind, InputPaths, PipelineConfig, Stage, Verb, MANIFEST};
use pagegraph::stats::{self, Measure};
use pagegraph::synth::{self, SynthConfig};
use pagegraph::{classify, Execution};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/synthetic")
}

fn config(out: &Path) -> PipelineConfig {
    PipelineConfig {
        out_dir: out.to_path_buf(),
        ..PipelineConfig::from_toml_file(&fixture().join("pipeline.toml")).unwrap()
    }
}

fn small_inputs(dir: &Path) -> InputPaths {
    let data = synth::generate(&SynthConfig {
        pages: 10,
        users: 400,
        posts: 500,
        ..Default::default()
    });
    synth::write_dir(&data, dir).unwrap();
    InputPaths {
        pages: dir.join("pages.csv"),
        posts: dir.join("posts.jsonl"),
        likes: dir.join("likes.jsonl"),
        comments: dir.join("comments.jsonl"),
    }
}

#[test]
fn all_writes_every_export_kind() {
    let out = tempfile::tempdir().unwrap();
    let manifest = run_pipeline(&config(out.path()), Verb::All).unwrap();
    use ExportKind::*;
    assert_eq!(
        manifest.kinds(),
        [
            Validation,
            Classification,
            Metrics,
            Correlations,
            Distributions,
            Breakdowns,
            Networks,
            Backbones,
            Geolayers
        ]
    );
    for f in &manifest.files {
        let bytes = fs::read(out.path().join(&f.path)).unwrap();
        assert_eq!(bytes.len(), f.bytes, "{}", f.path);
    }
    let on_disk: serde_json::Value = serde_json::from_slice(&fs::read(out.path().join(MANIFEST)).unwrap()).unwrap();
    assert_eq!(on_disk["files"].as_array().unwrap().len(), manifest.files.len());
    // no staging leftovers
    assert!(fs::read_dir(out.path())
        .unwrap()
        .all(|e| !e.unwrap().file_name().to_string_lossy().starts_with('.')));
}

#[test]
fn stages_write_only_their_exports() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config(out.path());
    let kinds = |v| run_pipeline(&cfg, v).unwrap().kinds();
    use ExportKind::*;
    assert_eq!(kinds(Verb::Ingest), [Validation]);
    assert_eq!(kinds(Verb::Classify), [Classification]);
    assert_eq!(
        kinds(Verb::Stats),
        [Metrics, Correlations, Distributions, Breakdowns, Geolayers]
    );
    assert_eq!(kinds(Verb::Graphs), [Networks]);
    assert_eq!(kinds(Verb::Backbone), [Backbones]);
}

#[test]
fn backbone_from_persisted_networks_matches_full_run() {
    let full = tempfile::tempdir().unwrap();
    let staged = tempfile::tempdir().unwrap();
    let all = run_pipeline(&config(full.path()), Verb::All).unwrap();
    run_pipeline(&config(staged.path()), Verb::Graphs).unwrap();
    let backbone = run_pipeline(&config(staged.path()), Verb::Backbone).unwrap();
    let from_all: Vec<_> = all.files.iter().filter(|f| f.kind == ExportKind::Backbones).collect();
    assert_eq!(from_all.len(), backbone.files.len());
    for (a, b) in from_all.iter().zip(&backbone.files) {
        assert_eq!(a.path, b.path);
        assert_eq!(a.sha256, b.sha256, "{}", a.path);
    }
}

#[test]
fn backbone_without_networks_fails_in_backbone_stage() {
    let out = tempfile::tempdir().unwrap();
    let err = run_pipeline(&config(out.path()), Verb::Backbone).unwrap_err();
    assert_eq!(err.stage, Stage::Backbone);
}

#[test]
fn failed_run_writes_nothing() {
    let inputs = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let mut paths = small_inputs(inputs.path());
    paths.likes = inputs.path().join("missing.jsonl");
    let cfg = PipelineConfig {
        inputs: Some(paths),
        out_dir: out.path().join("results"),
        ..Default::default()
    };
    let err = run_pipeline(&cfg, Verb::All).unwrap_err();
    assert_eq!(err.stage, Stage::Ingest);
    assert_eq!(err.exit_code(), 3);
    assert!(!cfg.out_dir.exists());

    // dangling references are caught before anything is written
    let mut paths = small_inputs(inputs.path());
    fs::write(
        &paths.likes,
        "{\"post_id\":\"nope\",\"user_id\":\"u\",\"timestamp\":1}\n",
    )
    .unwrap();
    paths.comments = inputs.path().join("comments.jsonl");
    let cfg = PipelineConfig {
        inputs: Some(paths),
        ..cfg
    };
    assert_eq!(run_pipeline(&cfg, Verb::All).unwrap_err().stage, Stage::Ingest);
    assert!(!cfg.out_dir.exists());
}

#[test]
fn sequential_and_parallel_agree() {
    let inputs = tempfile::tempdir().unwrap();
    let paths = small_inputs(inputs.path());
    let run = |execution| {
        let out = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig {
            inputs: Some(paths.clone()),
            out_dir: out.path().to_path_buf(),
            execution,
            ..Default::default()
        };
        run_pipeline(&cfg, Verb::All)
            .unwrap()
            .checksums()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect::<Vec<_>>()
    };
    assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
}

#[test]
fn page_metrics_sum_to_dataset_totals() {
    let inputs = tempfile::tempdir().unwrap();
    let paths = small_inputs(inputs.path());
    let open = |p: &Path| std::io::BufReader::new(fs::File::open(p).unwrap());
    let pages = ingest::load_pages(open(&paths.pages)).unwrap();
    let d = ingest::load_events(pages, open(&paths.posts), open(&paths.likes), open(&paths.comments)).unwrap();
    let c = classify::classify_users(&d, &Default::default()).unwrap();
    let m = stats::page_metrics(&d, &c);
    let total = |x: Measure| m.rows.iter().map(|r| r.get(x)).sum::<usize>();
    assert_eq!(total(Measure::Posts), d.posts().len());
    assert_eq!(total(Measure::Likes), d.likes().len());
    assert_eq!(total(Measure::Comments), d.comments().len());
    assert_eq!(total(Measure::Polarized), classify::category_counts(&c, &d).polarized);
    assert!(d.duplicate_likes_collapsed() > 0);
}

#[test]
fn ingest_round_trip_is_idempotent() {
    let inputs = tempfile::tempdir().unwrap();
    let paths = small_inputs(inputs.path());
    let load = |pages: &[u8], posts: &[u8], likes: &[u8], comments: &[u8]| -> ActivityDataset {
        let pages = ingest::load_pages(pages).unwrap();
        ingest::load_events(pages, posts, likes, comments).unwrap()
    };
    let raw = |p: &Path| fs::read(p).unwrap();
    let first = load(
        &raw(&paths.pages),
        &raw(&paths.posts),
        &raw(&paths.likes),
        &raw(&paths.comments),
    );
    let dump = |d: &ActivityDataset| {
        let (mut a, mut b, mut c, mut e) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        d.write_pages(&mut a).unwrap();
        d.write_posts(&mut b).unwrap();
        d.write_likes(&mut c).unwrap();
        d.write_comments(&mut e).unwrap();
        (a, b, c, e)
    };
    let once = dump(&first);
    let second = load(&once.0, &once.1, &once.2, &once.3);
    assert_eq!(second.duplicate_likes_collapsed(), 0);
    assert_eq!(dump(&second), once);
    assert_eq!(first.likes().len(), second.likes().len());
    assert_eq!(first.users(), second.users());
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pagegraph"))
}

#[test]
fn cli_runs_and_reports_stage_exit_codes() {
    let out = tempfile::tempdir().unwrap();
    let toml = fixture().join("pipeline.toml");
    let status = cli()
        .args(["graphs", "--config"])
        .arg(&toml)
        .arg("--out")
        .arg(out.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.path().join("reshares_edges.csv").exists());

    let status = cli()
        .args(["backbone", "--alpha", "0.2", "--alpha", "0.05", "--out"])
        .arg(out.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.path().join("backbone/reshares_alpha0.2.csv").exists());
    assert!(out.path().join("backbone/common_users_alpha0.05_ranking.csv").exists());

    let code = |args: &[&str]| {
        cli()
            .args(args)
            .arg("--out")
            .arg(out.path())
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(code(&["all"]), Some(2), "inputs missing");
    assert_eq!(code(&["backbone", "--alpha", "1.5"]), Some(2));
    let toml = toml.to_str().unwrap();
    assert_eq!(
        code(&["classify", "--config", toml, "--polarization-fraction", "0.3"]),
        Some(2)
    );
    assert_eq!(
        code(&["ingest", "--config", toml, "--likes", "/nonexistent/likes.jsonl"]),
        Some(3)
    );
}
