//! End-to-end runs of the `zenn` binary on small configs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use zenn::serialize::{serialize_model, AnyModel};
use zenn::Activation;
use zenn_cli::config::InitSection;

fn zenn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zenn")).args(args).env("ZENN_LOG", "warn").output().expect("spawn zenn")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run_ok(args: &[&str]) -> String {
    let o = zenn(args);
    assert!(o.status.success(), "zenn {args:?} failed: {}", stderr(&o));
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Rows of a CSV report below its header, split on commas.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

/// A small opaque gradient image, enough for a forward pass.
fn tiny_ppm(dir: &Path) -> PathBuf {
    let (w, h) = (6usize, 5usize);
    let mut bytes = format!("P6\n{w} {h}\n255\n").into_bytes();
    for i in 0..w * h {
        bytes.extend([(i * 7) as u8, (i * 3) as u8, 255 - i as u8]);
    }
    let p = dir.join("tiny.ppm");
    fs::write(&p, bytes).unwrap();
    p
}

#[test]
fn zero_epochs_keeps_the_initialization() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "train.toml",
        r#"
task = "synth1d"
seed = 11
[model]
kind = "zenn"
width = 16
alpha = 1.1
[train]
epochs = 0
[output]
trace = "trace.csv"
model = "model.zenn"
"#,
    );
    run_ok(&["train", cfg.to_str().unwrap()]);

    let spec = InitSection::default().spec(11, "init").unwrap();
    let init = spec.shallow_zenn(16, 1.1, Activation::Sine).unwrap();
    let saved = fs::read_to_string(dir.path().join("model.zenn")).unwrap();
    assert_eq!(saved, serialize_model(&AnyModel::from(init)));
    assert_eq!(rows(&dir.path().join("trace.csv")).len(), 1);
}

#[test]
fn missing_config_is_reported() {
    let o = zenn(&["train", "/nonexistent/experiment.toml"]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("not found") && e.contains("/nonexistent/experiment.toml"), "{e}");
}

#[test]
fn config_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.toml", "seed = 1\nlearning_rat = 0.1\n[output]\ndata = \"x.csv\"\n");
    let o = zenn(&["synth1d", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("learning_rat"), "{}", stderr(&o));

    let o = zenn(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn divergence_names_the_epoch() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "diverge.toml",
        r#"
task = "synth1d"
[model]
kind = "zenn"
width = 8
[train]
learning_rate = 1e6
epochs = 50
[output]
trace = "trace.csv"
"#,
    );
    let o = zenn(&["train", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("diverged at epoch"), "{}", stderr(&o));
}

fn image_config(dir: &Path, model: &str) -> PathBuf {
    tiny_ppm(dir);
    write(
        dir,
        "image.toml",
        &format!(
            r#"
seed = 3
[image]
path = "tiny.ppm"
[model]
{model}
[train]
epochs = 0
[output]
trace = "trace.csv"
image = "pred.ppm"
"#
        ),
    )
}

#[test]
fn unknown_variant_lists_the_valid_ones() {
    let dir = TempDir::new().unwrap();
    let cfg = image_config(dir.path(), "variant = \"resnet\"");
    let o = zenn(&["image-regress", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    for v in ["MLP", "oZeNN", "radZeNN", "randoZeNN", "FF", "FF-trainable"] {
        assert!(e.contains(v), "{v} missing from: {e}");
    }
}

#[test]
fn full_size_randozenn_is_accepted() {
    let dir = TempDir::new().unwrap();
    let cfg = image_config(dir.path(), "variant = \"randoZeNN\"\nm = 16384\nn = 256\nalpha = 0.0\nhidden_width = 16");
    let out = run_ok(&["image-regress", cfg.to_str().unwrap()]);
    assert!(out.starts_with("randoZeNN epoch 0"), "{out}");
    let ppm = fs::read(dir.path().join("pred.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n6 5\n255\n") && ppm.len() == 11 + 6 * 5 * 3);
}

#[test]
fn full_size_fourier_features_are_accepted() {
    let dir = TempDir::new().unwrap();
    let cfg = image_config(dir.path(), "variant = \"FF\"\nn = 4096\nrho = 10.0\nhidden_width = 16");
    let out = run_ok(&["image-regress", cfg.to_str().unwrap()]);
    assert!(out.starts_with("FF epoch 0"), "{out}");
    assert_eq!(rows(&dir.path().join("trace.csv")).len(), 1);
}

#[test]
fn cumulant_series_row() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "alpha = 1.0\nwidth = 3\nx = [0.0]\norders = [2]\nlambda = 1.0\n[output]\nreport = \"c.csv\"\n",
    );
    run_ok(&["cumulants", cfg.to_str().unwrap()]);
    let r = rows(&dir.path().join("c.csv"));
    assert_eq!(r.len(), 1);
    let analytic: f64 = r[0][3].parse().unwrap();
    assert!((analytic - 1.361111).abs() < 1e-6, "{analytic}");
}

#[test]
fn infinite_width_needs_a_summable_series() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "alpha = 0.5\nwidth = \"infinite\"\nx = [0.0]\norders = [2]\nlambda = 1.0\n[output]\nreport = \"c.csv\"\n",
    );
    let o = zenn(&["cumulants", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn charfn_at_zero_frequency_is_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.toml", "width = 5\npoints = [[0.8, 0.0]]\n[output]\nreport = \"c.csv\"\n");
    run_ok(&["charfn", cfg.to_str().unwrap()]);
    let r = rows(&dir.path().join("c.csv"));
    let (re, im): (f64, f64) = (r[0][2].parse().unwrap(), r[0][3].parse().unwrap());
    assert_eq!((re, im), (1.0, 0.0));
}

#[test]
fn converge_with_fast_decay_vanishes() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        r#"
seed = 2
family = "zenn"
alpha = 8.0
widths = [16, 32, 64, 128]
grid = { lo = -1.0, hi = 1.0, count = 41 }
draws = 5
[output]
report = "c.csv"
"#,
    );
    run_ok(&["converge", cfg.to_str().unwrap()]);
    let r = rows(&dir.path().join("c.csv"));
    let last: f64 = r.last().unwrap()[1].parse().unwrap();
    assert!(last < 1e-10, "{last}");
}

#[test]
fn set_overrides_take_precedence() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "s.toml", "seed = 1\npoints = 50\n[output]\ndata = \"s.csv\"\n");
    run_ok(&["synth1d", cfg.to_str().unwrap(), "--set", "points=9", "--set", "output.data=\"t.csv\""]);
    assert_eq!(rows(&dir.path().join("t.csv")).len(), 9);
    assert!(!dir.path().join("s.csv").exists());
}

#[test]
fn shipped_fixture_matches_its_generator() {
    let dir = TempDir::new().unwrap();
    let fresh = dir.path().join("pattern.ppm");
    zenn::data::save_ppm(&zenn_cli::fixtures::pattern(64, 64).unwrap(), &fresh).unwrap();
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/pattern64.ppm");
    assert!(fs::read(shipped).unwrap() == fs::read(fresh).unwrap(), "regenerate with `cargo run --example make_fixture`");
}
