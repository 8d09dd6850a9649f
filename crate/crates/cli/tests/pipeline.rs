use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};
use tempfile::TempDir;
use thumbscope_cli::commands::*;
use thumbscope_cli::synth::SynthSpec;
use thumbscope_cli::{CliError, RunConfig};
use thumbscope_corpus::SidecarKind;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thumbscope"))
}

fn config_for(dir: &Path) -> RunConfig {
    RunConfig {
        output_dir: dir.to_path_buf(),
        ..RunConfig::default()
    }
}

fn small_spec(images: usize, events: &[&str]) -> SynthSpec {
    SynthSpec {
        images,
        width: 96,
        height: 54,
        events: events.iter().map(|e| e.to_string()).collect(),
        seed: 3,
        ..SynthSpec::default()
    }
}

/// One corpus run through every command via the binary, shared by the
/// read-only tests below.
fn shared() -> &'static Path {
    static DIR: OnceLock<TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        let steps: &[&[&str]] = &[
            &["ingest", "--synthetic", "60", "--luminance-shift", "15"],
            &["extract"],
            &["themes"],
            &["compare"],
            &["performance"],
            &["temporal"],
            &["inspect", "luminance", "-k", "4"],
        ];
        for args in steps {
            let status = bin().args(["--output-dir", out, "--seed", "9"]).args(*args).status().unwrap();
            assert!(status.success(), "{args:?} failed");
        }
        dir
    })
    .path()
}

fn read_rows(path: PathBuf) -> Vec<BTreeMap<String, String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let headers = reader.headers().unwrap().clone();
    reader
        .records()
        .map(|r| headers.iter().map(String::from).zip(r.unwrap().iter().map(String::from)).collect())
        .collect()
}

#[test]
fn pipeline_writes_every_report() {
    let dir = shared();
    for file in [
        "manifest.jsonl",
        "features.csv",
        "extract_failures.csv",
        "themes/assignments.csv",
        "themes/tags.csv",
        "themes/silhouettes.csv",
        "themes/distribution.csv",
        "themes/gini.csv",
        "themes/model.json",
        "compare.csv",
        "compare.svg",
        "compare.md",
        "performance/powerlaw.csv",
        "performance/powerlaw.svg",
        "performance/rates.csv",
        "performance/rate_histogram.csv",
        "performance/rate_summary.csv",
        "performance/correlations.csv",
        "temporal/temporal.csv",
        "inspect/luminance.csv",
        "inspect/luminance.svg",
    ] {
        assert!(dir.join(file).is_file(), "missing {file}");
    }
    assert_eq!(read_rows(dir.join("features.csv")).len(), 60);
    assert_eq!(read_rows(dir.join("compare.csv")).len(), 19 * 6);
}

#[test]
fn report_headers_are_stable() {
    let pinned = [
        ("features.csv", "6380ed6f1f6a8274112def4c9ce1e79dec22b510315f21aa3dd17153192c0b49"),
        ("compare.csv", "53ac32925ade1fbeb491e6b9ae53a41e8d992152768e6f3a83022551794f6dae"),
        ("themes/assignments.csv", "e44f2174faccd3f893aa8a60fb0aa9e55cd87b5dfc7cec88d0f1f1f34900c101"),
        ("themes/gini.csv", "24aabf3a54653eaf28cf861d6c16e01b42a3122c669a2c1a737ec3becc95b613"),
        ("temporal/temporal.csv", "d14d46296a648113c0e26adc03a91b303a62e4c768ade3b98a3a6e1e136f58e1"),
        ("performance/correlations.csv", "4d13a884028ebfb7a9aa03a9bcb385fd8eb31ead8ddd2ecae41a2f8ccfc58eaa"),
    ];
    for (file, hash) in pinned {
        let text = fs::read_to_string(shared().join(file)).unwrap();
        let header = text.lines().next().unwrap();
        let digest = Sha256::digest(header.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(hex, hash, "{file} header changed: {header}");
    }
}

#[test]
fn planted_luminance_shift_shows_in_compare() {
    let rows = read_rows(shared().join("compare.csv"));
    let lum: Vec<_> = rows.iter().filter(|r| r["feature"] == "luminance").collect();
    assert_eq!(lum.len(), 6);
    for r in lum {
        assert_eq!(r["significant"], "true", "{r:?}");
        assert_eq!(r["larger_group"], "cn");
    }
}

#[test]
fn temporal_peak_and_dense_months() {
    let rows = read_rows(shared().join("temporal/temporal.csv"));
    // 12 months x 6 themes x 2 groups, zeros included.
    assert_eq!(rows.len(), 144);
    let mut by_month: BTreeMap<String, u64> = BTreeMap::new();
    for r in rows.iter().filter(|r| r["theme"] == "covid 19#0") {
        *by_month.entry(r["month"].clone()).or_default() += r["count"].parse::<u64>().unwrap();
    }
    let total: u64 = by_month.values().sum();
    assert_eq!(by_month["2022-04"], total);
}

#[test]
fn indoor_heavy_theme_has_low_gini() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_for(dir.path());
    // 40 images per theme: 38 indoor, 2 outdoor in the first.
    cmd_ingest_synthetic(&config, &small_spec(120, &["e"])).unwrap();
    cmd_themes(&config).unwrap();
    let rows = read_rows(dir.path().join("themes/gini.csv"));
    let gini_of = |label: &str| -> f64 { rows.iter().find(|r| r["label"] == label).unwrap()["gini"].parse().unwrap() };
    assert!((gini_of("e#0") - 0.095).abs() < 1e-12);
    assert!((gini_of("e#1") - 0.5).abs() < 1e-12);
    assert!((gini_of("e#2") - 0.5).abs() < 1e-12);
}

#[test]
fn power_law_slopes_follow_groups() {
    let rows = read_rows(shared().join("performance/powerlaw.csv"));
    for r in rows {
        let slope: f64 = r["slope"].parse().unwrap();
        let want = if r["group"] == "cn" { -1.0 } else { -1.6 };
        assert!((slope - want).abs() < 0.01, "{r:?}");
    }
}

#[test]
fn sidecars_written_by_synthesis_validate() {
    let dir = shared();
    for (kind, file) in [
        ("embeddings", "embeddings.jsonl"),
        ("tags", "tags.jsonl"),
        ("annotations", "annotations.jsonl"),
    ] {
        let out = bin()
            .args(["--output-dir", dir.to_str().unwrap(), "validate-sidecar", kind])
            .arg(dir.join(file))
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stdout).contains("60 entries"));
    }
}

#[test]
fn orphan_sidecar_line_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_for(dir.path());
    cmd_ingest_synthetic(&config, &small_spec(6, &["e"])).unwrap();
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"image_id\":\"nope\",\"tags\":[\"x\"]}\n").unwrap();
    let err = cmd_validate_sidecar(&config, SidecarKind::Tags, &bad).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn unknown_feature_is_a_config_error() {
    let out = bin()
        .args(["--output-dir", shared().to_str().unwrap(), "inspect", "sharpness"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sharpness"));
}

#[test]
fn corrupt_image_is_reported_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_for(dir.path());
    cmd_ingest_synthetic(&config, &small_spec(10, &["e"])).unwrap();
    fs::write(dir.path().join("thumbnails/syn-0003.png"), b"not a png").unwrap();
    let summary = cmd_extract(&config).unwrap();
    assert_eq!(summary.rows, 9);
    assert_eq!(summary.failures.len(), 1);
    assert_eq!(summary.failures[0].0, "syn-0003");
    let failures = read_rows(dir.path().join("extract_failures.csv"));
    assert_eq!(failures.len(), 1);
    assert_eq!(read_rows(dir.path().join("features.csv")).len(), 9);
}

#[test]
fn too_many_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_for(dir.path());
    cmd_ingest_synthetic(&config, &small_spec(10, &["e"])).unwrap();
    fs::write(dir.path().join("thumbnails/syn-0001.png"), b"junk").unwrap();
    fs::remove_file(dir.path().join("thumbnails/syn-0002.png")).unwrap();
    assert!(matches!(cmd_extract(&config), Err(CliError::DataQuality(_))));
    let status = bin()
        .args(["--output-dir", dir.path().to_str().unwrap(), "extract"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn mirrored_image_tops_symmetry_ranking() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_for(dir.path());
    cmd_ingest_synthetic(&config, &small_spec(12, &["e"])).unwrap();
    let path = dir.path().join("thumbnails/syn-0007.png");
    let original = image::open(&path).unwrap().to_rgb8();
    let w = original.width();
    let mirrored = image::RgbImage::from_fn(w, original.height(), |x, y| *original.get_pixel(x.min(w - 1 - x), y));
    mirrored.save(&path).unwrap();

    cmd_extract(&config).unwrap();
    let ranking = cmd_inspect(&config, "symmetry_lr", 3).unwrap();
    assert_eq!(ranking.top[0].0, "syn-0007");
    assert!((ranking.top[0].1 - 1.0).abs() < 1e-12);
    assert!(ranking.top[1].1 < 1.0);
}

#[test]
fn missing_features_file_is_explained() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_for(dir.path());
    cmd_ingest_synthetic(&config, &small_spec(6, &["e"])).unwrap();
    let err = cmd_compare(&config).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "seed = 4\n[themes]\nk_min = 2\nk_max = 3\n").unwrap();
    let out = dir.path().join("out");
    let run = |args: &[&str]| {
        bin()
            .arg("--config")
            .arg(&cfg)
            .arg("--output-dir")
            .arg(&out)
            .args(args)
            .output()
            .unwrap()
    };
    assert!(run(&["ingest", "--synthetic", "24"]).status.success());
    assert!(run(&["extract"]).status.success());
    let themes = run(&["themes"]);
    assert!(themes.status.success(), "{}", String::from_utf8_lossy(&themes.stderr));
    let silhouettes = read_rows(out.join("themes/silhouettes.csv"));
    assert!(silhouettes.iter().all(|r| r["k"] == "2" || r["k"] == "3"));

    fs::write(&cfg, "seeds = 4\n").unwrap();
    assert_eq!(run(&["extract"]).status.code(), Some(1));
}

#[test]
fn fallback_embedding_recovers_colour_themes() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_for(dir.path());
    let planted = cmd_ingest_synthetic(&config, &small_spec(48, &["e"])).unwrap();
    fs::remove_file(dir.path().join("embeddings.jsonl")).unwrap();
    assert!(cmd_themes(&config).is_err());

    let out = bin()
        .args(["--output-dir", dir.path().to_str().unwrap(), "themes", "--fallback-embedding"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let assigned: BTreeMap<String, String> = read_rows(dir.path().join("themes/assignments.csv"))
        .into_iter()
        .map(|r| (r["image_id"].clone(), r["theme"].clone()))
        .collect();
    let mut mapping: BTreeMap<usize, String> = BTreeMap::new();
    for p in &planted {
        let cluster = &assigned[&p.image_id];
        assert_eq!(mapping.entry(p.theme).or_insert_with(|| cluster.clone()), cluster);
    }
}
