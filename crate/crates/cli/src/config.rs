//! Resolved tool configuration: defaults, then a key=value file, then
//! environment variables, then command-line flags — later layers win.
//! The resolved values are recorded verbatim in every run manifest.

use std::path::{Path, PathBuf};

use curve_census::curves::DEFAULT_TABLE_BUDGET;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub cache_dir: PathBuf,
    pub workers: usize,
    /// Truncation bound for Euler products (`kconst`, `cconst`).
    pub prime_bound: u64,
    pub table_memory_budget: u64,
    pub output_format: OutputFormat,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            cache_dir: std::env::temp_dir().join("curve-census-cache"),
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            prime_bound: 100_000,
            table_memory_budget: DEFAULT_TABLE_BUDGET,
            output_format: OutputFormat::Json,
        }
    }
}

/// Flag-level overrides, the last layer.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ConfigOverrides {
    /// Key=value configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory for cached order tables.
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads for parallel censuses (>= 1).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Euler-product truncation bound.
    #[arg(long, global = true)]
    pub prime_bound: Option<u64>,
    /// Memory ceiling in bytes for a single order table.
    #[arg(long, global = true)]
    pub table_budget: Option<u64>,
    /// Report rendering: canonical JSON or the CSV projection.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
}

impl Config {
    /// Resolve the full configuration. `env` abstracts variable lookup
    /// so the precedence rules are unit-testable.
    pub fn resolve(
        overrides: &ConfigOverrides,
        env: impl Fn(&str) -> Option<String>,
    ) -> Result<Config, CliError> {
        let mut cfg = Config::default();
        if let Some(path) = &overrides.config {
            cfg.apply_file(path)?;
        }
        if let Some(dir) = env("CURVE_CENSUS_CACHE_DIR") {
            cfg.cache_dir = PathBuf::from(dir);
        }
        if let Some(w) = env("CURVE_CENSUS_WORKERS") {
            cfg.workers = parse_workers(&w)?;
        }
        if let Some(dir) = &overrides.cache_dir {
            cfg.cache_dir = dir.clone();
        }
        if let Some(w) = overrides.workers {
            if w < 1 {
                return Err(CliError::User("workers must be at least 1".into()));
            }
            cfg.workers = w;
        }
        if let Some(b) = overrides.prime_bound {
            cfg.prime_bound = b;
        }
        if let Some(b) = overrides.table_budget {
            cfg.table_memory_budget = b;
        }
        if let Some(f) = overrides.format {
            cfg.output_format = f;
        }
        Ok(cfg)
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::User(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::User(format!(
                    "{}:{}: expected key = value, got {raw:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                CliError::User(format!(
                    "{}:{}: bad {what} value {value:?}",
                    path.display(),
                    lineno + 1
                ))
            };
            match key {
                "cache_dir" => self.cache_dir = PathBuf::from(value),
                "workers" => self.workers = parse_workers(value)?,
                "prime_bound" => {
                    self.prime_bound = value.parse().map_err(|_| bad("prime_bound"))?
                }
                "table_memory_budget" => {
                    self.table_memory_budget =
                        value.parse().map_err(|_| bad("table_memory_budget"))?
                }
                "output_format" => {
                    self.output_format = match value {
                        "json" => OutputFormat::Json,
                        "csv" => OutputFormat::Csv,
                        _ => return Err(bad("output_format")),
                    }
                }
                _ => {
                    return Err(CliError::User(format!(
                        "{}:{}: unknown config key {key:?}",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Ok(())
    }

    /// The total parameter record for manifests.
    pub fn manifest_entries(&self) -> Vec<(String, String)> {
        vec![
            ("cache_dir".into(), self.cache_dir.display().to_string()),
            ("workers".into(), self.workers.to_string()),
            ("prime_bound".into(), self.prime_bound.to_string()),
            ("table_memory_budget".into(), self.table_memory_budget.to_string()),
            ("output_format".into(), self.output_format.as_str().into()),
        ]
    }
}

fn parse_workers(value: &str) -> Result<usize, CliError> {
    let w: usize = value
        .parse()
        .map_err(|_| CliError::User(format!("bad workers value {value:?}")))?;
    if w < 1 {
        return Err(CliError::User("workers must be at least 1".into()));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn file_then_env_then_flags() {
        let file = write_config(
            "# comment\n\
             cache_dir = /from/file\n\
             workers = 3\n\
             prime_bound = 5000\n",
        );
        let overrides = ConfigOverrides {
            config: Some(file.path().to_path_buf()),
            workers: Some(5),
            ..Default::default()
        };
        let env = |key: &str| match key {
            "CURVE_CENSUS_CACHE_DIR" => Some("/from/env".to_string()),
            "CURVE_CENSUS_WORKERS" => Some("4".to_string()),
            _ => None,
        };
        let cfg = Config::resolve(&overrides, env).unwrap();
        assert_eq!(cfg.cache_dir, PathBuf::from("/from/env"));
        assert_eq!(cfg.workers, 5);
        assert_eq!(cfg.prime_bound, 5000);
        assert_eq!(cfg.output_format, OutputFormat::Json);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let unknown = write_config("cache_size = 12\n");
        let overrides = ConfigOverrides {
            config: Some(unknown.path().to_path_buf()),
            ..Default::default()
        };
        assert!(matches!(
            Config::resolve(&overrides, |_| None),
            Err(CliError::User(msg)) if msg.contains("unknown config key")
        ));

        let zero_workers = write_config("workers = 0\n");
        let overrides = ConfigOverrides {
            config: Some(zero_workers.path().to_path_buf()),
            ..Default::default()
        };
        assert!(Config::resolve(&overrides, |_| None).is_err());

        let bad_format = write_config("output_format = yaml\n");
        let overrides = ConfigOverrides {
            config: Some(bad_format.path().to_path_buf()),
            ..Default::default()
        };
        assert!(Config::resolve(&overrides, |_| None).is_err());
    }

    #[test]
    fn missing_config_file_is_a_user_error() {
        let overrides = ConfigOverrides {
            config: Some(PathBuf::from("/nonexistent/config")),
            ..Default::default()
        };
        assert!(matches!(
            Config::resolve(&overrides, |_| None),
            Err(CliError::User(_))
        ));
    }
}
