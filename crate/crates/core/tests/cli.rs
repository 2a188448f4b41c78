// SPDX-License-Identifier: AGPL-3.0-only

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_quasigraph");

fn config(omega: &str, phi: &str, window: &str) -> String {
    format!(
        "[model]\nd = 1\nlengths = [1.0]\n\n[maryland]\ng = 1.0\nomega = [{omega}]\nphi = {phi}\n\n\
         [compute]\nwindow = {window}\nindex_radius = 2\n\n[output]\ndirectory = \"out\"\nformat = \"csv\"\n"
    )
}

fn golden() -> String {
    config("0.6180339887498949", "0.0", "[0.1, 9.5]")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn written(o: &Output) -> PathBuf {
    PathBuf::from(String::from_utf8(o.stdout.clone()).unwrap().trim())
}

#[test]
fn validate_golden_succeeds() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &golden());
    let o = run(&["validate"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(written(&o).exists());
}

#[test]
fn rational_frequency_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &config("0.5", "0.1", "[0.1, 9.5]"));
    let o = run(&["spectrum"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("m = 2"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn degenerate_phase_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &config("0.6180339887498949", "1.5707963267948966", "[0.1, 9.5]"));
    let o = run(&["validate"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate phase"));
}

#[test]
fn bad_configs_exit_two() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    assert_eq!(run(&["spectrum"], &dir.path().join("missing.toml"), &out).status.code(), Some(2));
    let cfg = write_config(dir.path(), "[model\nd = 1\n");
    assert_eq!(run(&["spectrum"], &cfg, &out).status.code(), Some(2));
    let cfg = write_config(dir.path(), &golden().replace("g = 1.0", "g = 1.0\ncolour = 3"));
    assert_eq!(run(&["spectrum"], &cfg, &out).status.code(), Some(2));
    let cfg = write_config(dir.path(), &golden().replace("g = 1.0", "g = -1.0"));
    assert_eq!(run(&["spectrum"], &cfg, &out).status.code(), Some(2));
}

#[test]
fn spectrum_is_reproducible_and_headed() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &golden());
    let a = run(&["spectrum"], &cfg, &dir.path().join("a"));
    let b = run(&["spectrum"], &cfg, &dir.path().join("b"));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let (ta, tb) = (std::fs::read(written(&a)).unwrap(), std::fs::read(written(&b)).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.contains(&format!("# version: {}", env!("CARGO_PKG_VERSION"))));
    let hash = text.lines().find_map(|l| l.strip_prefix("# config_hash: ")).expect("hash header");
    assert_eq!(hash.len(), 64);
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    let cols: Vec<&str> = header.split(',').collect();
    let (im, il) = (cols.iter().position(|c| *c == "m").unwrap(), cols.iter().position(|c| *c == "lambda").unwrap());
    let origin = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|r| r[im] == "0")
        .expect("row for m = 0");
    let lambda: f64 = origin[il].parse().unwrap();
    assert!((lambda - 2.4674011002723395).abs() < 1e-9, "{lambda}");
}

#[test]
fn json_output_parses() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &golden());
    let o = Command::new(BIN)
        .args(["sigma-curve", "--samples", "20", "--format", "json", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let path = written(&o);
    assert_eq!(path.extension().unwrap(), "json");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["command"], "sigma-curve");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(v["records"].as_array().unwrap().len(), 20);
}

#[test]
fn config_hash_tracks_content() {
    let dir = TempDir::new().unwrap();
    let hash = |text: &str, sub: &str| {
        let cfg = write_config(dir.path(), text);
        let o = run(&["validate"], &cfg, &dir.path().join(sub));
        let body = std::fs::read_to_string(written(&o)).unwrap();
        body.lines().find_map(|l| l.strip_prefix("# config_hash: ")).unwrap().to_string()
    };
    let a = hash(&golden(), "a");
    let b = hash(&golden().replace("phi = 0.0", "phi = 0.25"), "b");
    assert_ne!(a, b);
    assert_eq!(a, hash(&format!("# comment\n{}", golden()), "c"));
}
