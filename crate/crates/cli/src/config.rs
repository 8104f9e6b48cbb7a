//! Optional TOML configuration. Command-line flags win over file values,
//! which win over built-in defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

pub const DEFAULT_MAX_N: u32 = 10;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SAMPLES: u64 = 1000;
pub const DEFAULT_CENSUS_N_MIN: u32 = 1;
pub const DEFAULT_CENSUS_N_MAX: u32 = 4;
pub const DEFAULT_P_GRID: &str = "1/4,1/3,1/2";
pub const DEFAULT_CENSUS_OUT: &str = "census.jsonl";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub threads: Option<usize>,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub census: CensusSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub max_n: Option<u32>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusSection {
    pub n_min: Option<u32>,
    pub n_max: Option<u32>,
    pub p_grid: Option<String>,
    pub ell_max: Option<u32>,
    pub allow_slow: Option<bool>,
    pub out: Option<PathBuf>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, String> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}

/// First present value of flag, file, default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections() {
        let cfg: FileConfig = toml::from_str("threads = 2\n[verify]\nseed = 7\n[census]\np_grid = \"1/2\"\n").unwrap();
        assert_eq!(cfg.threads, Some(2));
        assert_eq!(cfg.verify.seed, Some(7));
        assert_eq!(cfg.census.p_grid.as_deref(), Some("1/2"));
        assert!(toml::from_str::<FileConfig>("[verify]\nbogus = 1\n").is_err());
    }

    #[test]
    fn precedence() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick(None, None, 3), 3);
    }
}
