//! TOML run configuration.
//!
//! ```toml
//! [standardize]
//! rewrite = true
//! expand = true
//!
//! [gted]
//! theta = 0.6
//! alpha = "scoped"        # "off", "rename-only" or "scoped"
//! dumb_ops = true
//! clamp_negative = true
//!
//! [gted.costs]
//! insert = 1.0
//! delete = 1.0
//! relabel = 1.0
//!
//! [output]
//! report = "report.json"
//! csv = "summary.csv"
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gted_core::gted::DEFAULT_THETA;
use gted_core::{AlphaMode, CostModel, DecisionConfig, StandardizeConfig, TransformationSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaSetting {
    Off,
    RenameOnly,
    Scoped,
}

impl AlphaSetting {
    pub fn mode(self) -> Option<AlphaMode> {
        match self {
            AlphaSetting::Off => None,
            AlphaSetting::RenameOnly => Some(AlphaMode::RenameOnly),
            AlphaSetting::Scoped => Some(AlphaMode::Scoped),
        }
    }
}

impl FromStr for AlphaSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "off" => Ok(AlphaSetting::Off),
            other => AlphaMode::from_str(other).map(|m| match m {
                AlphaMode::RenameOnly => AlphaSetting::RenameOnly,
                AlphaMode::Scoped => AlphaSetting::Scoped,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GtedSettings {
    pub theta: f64,
    pub alpha: AlphaSetting,
    pub dumb_ops: bool,
    pub clamp_negative: bool,
    pub costs: CostModel,
}

impl Default for GtedSettings {
    fn default() -> Self {
        GtedSettings {
            theta: DEFAULT_THETA,
            alpha: AlphaSetting::Scoped,
            dumb_ops: true,
            clamp_negative: true,
            costs: CostModel::unit(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSettings {
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub standardize: StandardizeConfig,
    pub gted: GtedSettings,
    pub output: OutputSettings,
}

impl Config {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let config: Config = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Config::from_toml(&text, path)
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self, ConfigError> {
        path.map_or_else(|| Ok(Config::default()), Config::load)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.decision()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.transformations()
            .validate(&[])
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn transformations(&self) -> TransformationSet {
        let g = &self.gted;
        match g.alpha.mode() {
            Some(mode) => TransformationSet::with_alpha(mode, g.dumb_ops, g.costs),
            None => TransformationSet {
                transformations: Vec::new(),
                include_dumb_ops: g.dumb_ops,
                costs: g.costs,
            },
        }
    }

    pub fn decision(&self) -> DecisionConfig {
        DecisionConfig {
            theta: self.gted.theta,
            clamp_negative: self.gted.clamp_negative,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Config, ConfigError> {
        Config::from_toml(text, Path::new("test.toml"))
    }

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse("").unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.gted.theta, 0.6);
        assert_eq!(c.gted.alpha, AlphaSetting::Scoped);
        assert!(c.standardize.rewrite && c.standardize.expand);
    }

    #[test]
    fn full_file() {
        let c = parse(
            r#"
            [standardize]
            expand = false
            [gted]
            theta = 0.75
            alpha = "rename-only"
            dumb_ops = false
            [gted.costs]
            relabel = 2.0
            [output]
            csv = "out.csv"
            "#,
        )
        .unwrap();
        assert!(!c.standardize.expand && c.standardize.rewrite);
        assert_eq!(c.gted.alpha, AlphaSetting::RenameOnly);
        assert_eq!(c.gted.costs.relabel, 2.0);
        assert_eq!(c.gted.costs.insert, 1.0);
        assert_eq!(c.output.csv.as_deref(), Some(Path::new("out.csv")));
        let set = c.transformations();
        assert!(!set.include_dumb_ops);
        assert_eq!(set.transformations.len(), 1);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(
            parse("[gted]\ntheta = 1.5"),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(
            parse("[gted.costs]\ninsert = -1.0"),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(
            parse("[gted]\nalpha = \"maybe\""),
            Err(ConfigError::Parse { .. })
        ));
        assert!(matches!(
            parse("[gted]\nthreshold = 0.5"),
            Err(ConfigError::Parse { .. })
        ));
    }

    #[test]
    fn alpha_setting_from_str() {
        assert_eq!("off".parse(), Ok(AlphaSetting::Off));
        assert_eq!("scoped".parse(), Ok(AlphaSetting::Scoped));
        assert!("none".parse::<AlphaSetting>().is_err());
    }
}
