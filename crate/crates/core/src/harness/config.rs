use std::f64::consts::SQRT_2;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::measures::MeasureKind;

/// Values read from a `--config` file. Keys match the long flag names.
///
/// ```toml
/// qubits = 3
/// samples = 1000
/// seed = 7
/// betas = "4, 6, 10"
/// measures = "concurrence,cren"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub id: Option<u8>,
    pub beta_min: Option<String>,
    pub beta_max: Option<String>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub qubits: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub betas: Option<String>,
    pub measures: Option<String>,
    pub family: Option<String>,
    pub top: Option<usize>,
    pub restarts: Option<usize>,
    pub max_iters: Option<usize>,
    pub ensemble_size: Option<usize>,
    pub bound: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }
}

/// Parses a β value; accepts `2sqrt2` (or `2√2`) for the EoF regime boundary.
pub fn parse_beta(s: &str) -> Result<f64> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "2sqrt2" | "2√2" => Ok(2.0 * SQRT_2),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|b| b.is_finite())
            .ok_or_else(|| Error::Config(format!("invalid beta value '{t}'"))),
    }
}

pub fn parse_beta_list(s: &str) -> Result<Vec<f64>> {
    let list: Vec<f64> = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_beta)
        .collect::<Result<_>>()?;
    if list.is_empty() {
        return Err(Error::Config("empty beta list".into()));
    }
    Ok(list)
}

pub fn parse_measure_list(s: &str) -> Result<Vec<MeasureKind>> {
    let mut out: Vec<MeasureKind> = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let kind: MeasureKind = if part.trim().eq_ignore_ascii_case("all") {
            for k in MeasureKind::ALL {
                if !out.contains(&k) {
                    out.push(k);
                }
            }
            continue;
        } else {
            part.parse().map_err(|_| Error::Config(format!("unknown measure '{}'", part.trim())))?
        };
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("empty measure list".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_literals() {
        assert_eq!(parse_beta("2sqrt2").unwrap(), 2.0 * SQRT_2);
        assert_eq!(parse_beta(" 4.5 ").unwrap(), 4.5);
        assert!(parse_beta("inf").is_err());
        assert!(parse_beta("four").is_err());
        assert_eq!(parse_beta_list("4,2sqrt2, 10").unwrap(), vec![4.0, 2.0 * SQRT_2, 10.0]);
        assert!(parse_beta_list(" , ").is_err());
    }

    #[test]
    fn measure_lists() {
        assert_eq!(
            parse_measure_list("cren,concurrence,cren").unwrap(),
            vec![MeasureKind::Cren, MeasureKind::Concurrence]
        );
        assert_eq!(parse_measure_list("all").unwrap().len(), 3);
        assert!(parse_measure_list("tangle").is_err());
    }

    #[test]
    fn file_config() {
        let c = FileConfig::parse("qubits = 4\nbetas = \"4,6\"\nmax-iters = 50\n").unwrap();
        assert_eq!(c.qubits, Some(4));
        assert_eq!(c.betas.as_deref(), Some("4,6"));
        assert_eq!(c.max_iters, Some(50));
        assert!(matches!(FileConfig::parse("qbits = 4"), Err(Error::Config(_))));
    }
}
