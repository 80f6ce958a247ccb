//! Run configuration for the `pipeline` subcommand: a JSON file whose every
//! field can be overridden by a flag (flag wins) or, for the output
//! directory, by the `IMTS_OUTPUT_DIR` environment variable.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use imts_core::grey::{ConstantColumnPolicy, GreyConfig};
use imts_core::imts::InversionPolicy;
use imts_core::{Error, Result};
use serde::Deserialize;

/// Environment variable overriding the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "IMTS_OUTPUT_DIR";

/// Rendering of the evaluation report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// Aligned human-readable text.
    #[default]
    Table,
    /// `metric,value` rows.
    Csv,
    /// Full report object.
    Json,
}

impl OutputFormat {
    /// File extension of the pipeline's report artifact.
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Table => "txt",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Serde/flag-friendly mirror of the library's constant-column policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ColumnPolicy {
    /// Fail on a constant column.
    #[default]
    Error,
    /// Map a constant column to the ideal value 1 everywhere.
    TreatAsIdeal,
}

impl From<ColumnPolicy> for ConstantColumnPolicy {
    fn from(policy: ColumnPolicy) -> Self {
        match policy {
            ColumnPolicy::Error => ConstantColumnPolicy::Error,
            ColumnPolicy::TreatAsIdeal => ConstantColumnPolicy::TreatAsIdeal,
        }
    }
}

/// The `grey` section of the config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreySection {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub constant_column_policy: ColumnPolicy,
}

impl Default for GreySection {
    fn default() -> Self {
        GreySection {
            threshold: default_threshold(),
            constant_column_policy: ColumnPolicy::default(),
        }
    }
}

fn default_threshold() -> f64 {
    0.5
}

fn default_policy() -> String {
    "pseudo_inverse".to_string()
}

fn default_folds() -> usize {
    10
}

fn default_seed() -> u64 {
    42
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("imts-out")
}

/// Everything a pipeline run needs. Relative paths in the file are resolved
/// against the directory containing the config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub dataset_path: PathBuf,
    pub hierarchy_path: PathBuf,
    #[serde(default)]
    pub grey: GreySection,
    #[serde(default = "default_policy")]
    pub inversion_policy: String,
    /// Ridge strength; meaningful only with `inversion_policy = "ridge"`.
    #[serde(default)]
    pub ridge_epsilon: Option<f64>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub passthrough_scale: BTreeMap<String, f64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

impl PipelineConfig {
    /// Read and parse a config file, resolving its relative paths against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: PipelineConfig =
            serde_json::from_str(&text).map_err(|e| Error::InvalidConfig {
                message: format!("{}: {e}", path.display()),
            })?;
        if let Some(base) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            for field in [
                &mut config.dataset_path,
                &mut config.hierarchy_path,
                &mut config.output_dir,
            ] {
                if field.is_relative() {
                    let joined = base.join(field.as_path());
                    *field = joined;
                }
            }
        }
        Ok(config)
    }

    /// Check everything that does not require touching the filesystem.
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::InvalidFolds { value: self.folds });
        }
        self.grey_config().validate()?;
        self.policy()?;
        for (id, &scale) in &self.passthrough_scale {
            if scale <= 0.0 || !scale.is_finite() {
                return Err(Error::InvalidScale {
                    id: id.clone(),
                    value: scale,
                });
            }
        }
        Ok(())
    }

    pub fn grey_config(&self) -> GreyConfig {
        GreyConfig {
            threshold: self.grey.threshold,
            constant_column_policy: self.grey.constant_column_policy.into(),
        }
    }

    pub fn policy(&self) -> Result<InversionPolicy> {
        InversionPolicy::parse(&self.inversion_policy, self.ridge_epsilon)
    }

    /// Apply overrides: environment first, then flags (flags win).
    pub fn apply_overrides(&mut self, overrides: &ConfigOverrides) {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            self.output_dir = PathBuf::from(dir);
        }
        let o = overrides;
        if let Some(v) = &o.dataset {
            self.dataset_path = v.clone();
        }
        if let Some(v) = &o.hierarchy {
            self.hierarchy_path = v.clone();
        }
        if let Some(v) = o.threshold {
            self.grey.threshold = v;
        }
        if let Some(v) = o.constant_columns {
            self.grey.constant_column_policy = v;
        }
        if let Some(v) = &o.policy {
            self.inversion_policy = v.clone();
        }
        if let Some(v) = o.epsilon {
            self.ridge_epsilon = Some(v);
        }
        if let Some(v) = o.folds {
            self.folds = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        for (id, value) in &o.scale {
            self.passthrough_scale.insert(id.clone(), *value);
        }
        if let Some(v) = &o.output_dir {
            self.output_dir = v.clone();
        }
        if let Some(v) = o.format {
            self.format = v;
        }
    }
}

/// Flag overrides for every config field.
#[derive(Debug, Default, clap::Args)]
pub struct ConfigOverrides {
    /// Dataset CSV path (overrides the config file).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Factor hierarchy JSON path (overrides the config file).
    #[arg(long)]
    pub hierarchy: Option<PathBuf>,
    /// Grey distinguishing threshold in (0, 1].
    #[arg(long)]
    pub threshold: Option<f64>,
    /// How to treat constant columns during normalization.
    #[arg(long, value_enum)]
    pub constant_columns: Option<ColumnPolicy>,
    /// Correlation-inversion policy: strict, pseudo_inverse, or ridge.
    #[arg(long)]
    pub policy: Option<String>,
    /// Ridge strength (used with --policy ridge).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Cross-validation fold count recorded in the config.
    #[arg(long)]
    pub folds: Option<usize>,
    /// Seed for any stratified shuffling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Passthrough scale override, `<main_factor>=<value>`; repeatable.
    #[arg(long = "scale", value_parser = parse_scale)]
    pub scale: Vec<(String, f64)>,
    /// Where artifacts are written (beats the IMTS_OUTPUT_DIR variable).
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Report rendering.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

/// Parse a `<main_factor>=<value>` pair.
pub fn parse_scale(raw: &str) -> std::result::Result<(String, f64), String> {
    let (id, value) = raw
        .split_once('=')
        .ok_or_else(|| format!("`{raw}` is not of the form <main_factor>=<value>"))?;
    if id.is_empty() {
        return Err(format!("`{raw}` has an empty main-factor id"));
    }
    let value: f64 = value
        .parse()
        .map_err(|_| format!("`{value}` is not a number"))?;
    Ok((id.to_string(), value))
}
