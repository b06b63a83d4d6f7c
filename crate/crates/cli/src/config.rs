//! TOML experiment files, `--set` overrides and the sections shared by
//! several commands.
//!
//! Every table rejects unknown keys. Relative paths inside a config resolve
//! against the directory that holds the config file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use zenn::rng::sub_seed;
use zenn::stochastics::{Dist, InitSpec};
use zenn::{Activation, TrainConfig};

use crate::error::{CliError, CliResult};

/// A parsed config together with the directory its paths are relative to.
#[derive(Debug)]
pub struct Loaded<T> {
    pub config: T,
    pub base_dir: PathBuf,
}

impl<T> Loaded<T> {
    pub fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

/// Reads `path`, applies `key.path=value` overrides and deserializes.
pub fn load<T: DeserializeOwned>(path: &Path, overrides: &[String]) -> CliResult<Loaded<T>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(CliError::missing_file(path.to_path_buf())),
        Err(e) => return Err(CliError::config(format!("{}: {e}", path.display()))),
    };
    let config = parse(&text, overrides).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { config, base_dir })
}

/// Parses a config document with overrides applied.
pub fn parse<T: DeserializeOwned>(text: &str, overrides: &[String]) -> Result<T, String> {
    let mut table: toml::Table = toml::from_str(text).map_err(|e| e.message().to_string())?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    T::deserialize(toml::Value::Table(table)).map_err(|e| e.message().to_string())
}

fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), String> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| format!("override {assignment:?} is not of the form key=value"))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|k| k.is_empty()) {
        return Err(format!("override key {key:?} is empty"));
    }
    // Values are TOML literals; anything that does not parse is a bare string.
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let (last, parents) = path.split_last().expect("nonempty path");
    let mut node = table;
    for k in parents {
        node = node
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| format!("override {key:?}: {k:?} is not a table"))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

pub fn activation(name: &str) -> CliResult<Activation> {
    name.parse().map_err(|e: zenn::ZennError| CliError::config(e.to_string()))
}

/// Parses `normal(mean, std)`, `uniform(lo, hi)`, `constant(c)` or a bare number.
pub fn dist(text: &str) -> CliResult<Dist> {
    let bad = || CliError::config(format!("cannot parse distribution {text:?}; use normal(m, s), uniform(lo, hi) or constant(c)"));
    let t = text.trim();
    if let Ok(c) = t.parse::<f64>() {
        return Ok(Dist::Constant(c));
    }
    let (name, rest) = t.split_once('(').ok_or_else(bad)?;
    let args: Vec<f64> = rest
        .strip_suffix(')')
        .ok_or_else(bad)?
        .split(',')
        .map(|a| a.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let d = match (name.trim().to_ascii_lowercase().as_str(), args.as_slice()) {
        ("normal", [mean, std]) => Dist::Normal { mean: *mean, std: *std },
        ("uniform", [lo, hi]) => Dist::Uniform { lo: *lo, hi: *hi },
        ("constant", [c]) => Dist::Constant(*c),
        _ => return Err(bad()),
    };
    d.validate()?;
    Ok(d)
}

/// Parameter laws. Defaults to unit-normal weights and zero biases.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitSection {
    pub w1: String,
    pub b1: String,
    pub w2: String,
    pub b2: String,
    pub fan_in_scaling: bool,
}

impl Default for InitSection {
    fn default() -> Self {
        Self {
            w1: "normal(0, 1)".into(),
            b1: "constant(0)".into(),
            w2: "normal(0, 1)".into(),
            b2: "constant(0)".into(),
            fan_in_scaling: false,
        }
    }
}

impl InitSection {
    /// The `InitSpec` for stream `label` of the experiment seed.
    pub fn spec(&self, seed: u64, label: &str) -> CliResult<InitSpec> {
        Ok(InitSpec {
            w1: dist(&self.w1)?,
            b1: dist(&self.b1)?,
            w2: dist(&self.w2)?,
            b2: dist(&self.b2)?,
            seed: sub_seed(seed, label),
            fan_in_scaling: self.fan_in_scaling,
        })
    }
}

/// Gradient-descent settings.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub learning_rate: f64,
    pub epochs: usize,
    pub log_interval: usize,
    pub weight_decay: f64,
    pub log_wall_time: bool,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        Self {
            learning_rate: d.learning_rate,
            epochs: d.epochs,
            log_interval: d.log_interval,
            weight_decay: d.weight_decay,
            log_wall_time: d.log_wall_time,
        }
    }
}

impl TrainSection {
    pub fn config(&self, seed: u64, report_psnr: bool) -> CliResult<TrainConfig> {
        let c = TrainConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            seed,
            log_interval: self.log_interval,
            weight_decay: self.weight_decay,
            report_psnr,
            log_wall_time: self.log_wall_time,
        };
        c.validate()?;
        Ok(c)
    }
}

/// Evenly spaced points on `[lo, hi]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> CliResult<Vec<f64>> {
        if self.count == 0 || !(self.lo.is_finite() && self.hi.is_finite()) || (self.count > 1 && self.lo >= self.hi) {
            return Err(CliError::config(format!(
                "grid needs count >= 1 and lo < hi, got [{}, {}] x {}",
                self.lo, self.hi, self.count
            )));
        }
        Ok(zenn::stochastics::convergence::uniform_grid(self.lo, self.hi, self.count))
    }
}

/// Opens `path` for writing, creating parent directories.
pub fn create_output(path: &Path) -> CliResult<fs::File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::File::create(path).map_err(|e| CliError::io(path, e))
}

/// Writes a CSV with the given header and rows.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(create_output(path)?);
    let wrap = |e: csv::Error| CliError::Runtime(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(wrap)?;
    for r in rows {
        w.write_record(r).map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Float formatting used in every report: shortest round-trip scientific.
pub fn real(v: f64) -> String {
    format!("{v:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Deserialize, PartialEq)]
    #[serde(deny_unknown_fields)]
    struct Doc {
        seed: u64,
        #[serde(default)]
        train: TrainSection,
    }

    #[test]
    fn overrides_replace_and_create_keys() {
        let d: Doc = parse("seed = 1\n[train]\nepochs = 5\n", &["train.epochs=0".into(), "seed=9".into()]).unwrap();
        assert_eq!((d.seed, d.train.epochs), (9, 0));
        let d: Doc = parse("seed = 1\n", &["train.learning_rate=1e-3".into()]).unwrap();
        assert_eq!(d.train.learning_rate, 1e-3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = parse::<Doc>("seed = 1\nsede = 2\n", &[]).unwrap_err();
        assert!(e.contains("sede"), "{e}");
        let e = parse::<Doc>("seed = 1\n[train]\nepoch = 2\n", &[]).unwrap_err();
        assert!(e.contains("epoch"), "{e}");
        assert!(parse::<Doc>("seed = 1\n", &["nonsense".into()]).is_err());
    }

    #[test]
    fn distributions_parse() {
        assert_eq!(dist("normal(0, 1)").unwrap(), Dist::STANDARD_NORMAL);
        assert_eq!(dist("uniform(-1,1)").unwrap(), Dist::Uniform { lo: -1.0, hi: 1.0 });
        assert_eq!(dist("0.5").unwrap(), Dist::Constant(0.5));
        assert!(dist("normal(0, -1)").is_err());
        assert!(dist("cauchy(0, 1)").is_err());
    }
}
