//! JSON experiment configuration.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use kps_core::kps::IdPolicy;
use kps_core::resilience::{ColluderPlacement, Method};
use kps_core::sim::Population;
use kps_core::{BlockCode, CodeKind, Field, FieldElement, GeneratorMatrix};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    pub kind: CodeKind,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub q: Option<u32>,
    /// Generator seed for `random_linear`.
    #[serde(default)]
    pub seed: u64,
    /// Reed–Solomon evaluation points; `0..n` when absent.
    #[serde(default)]
    pub eval_points: Option<Vec<FieldElement>>,
    /// Generator matrix or codeword table for `explicit`.
    #[serde(default)]
    pub path: Option<PathBuf>,
}

impl CodeConfig {
    pub fn mds_rs(n: usize, k: usize, q: u32) -> Self {
        CodeConfig {
            kind: CodeKind::MdsRs,
            n: Some(n),
            k: Some(k),
            q: Some(q),
            seed: 0,
            eval_points: None,
            path: None,
        }
    }

    pub fn random_linear(n: usize, k: usize, q: u32, seed: u64) -> Self {
        CodeConfig {
            kind: CodeKind::RandomLinear,
            seed,
            ..CodeConfig::mds_rs(n, k, q)
        }
    }

    fn dims(&self) -> Result<(usize, usize, u32), CliError> {
        match (self.n, self.k, self.q) {
            (Some(n), Some(k), Some(q)) => Ok((n, k, q)),
            _ => Err(CliError::Config(format!(
                "code of kind {} needs n, k and q",
                self.kind.as_str()
            ))),
        }
    }

    pub fn build(&self) -> Result<BlockCode, CliError> {
        match self.kind {
            CodeKind::MdsRs => {
                let (n, k, q) = self.dims()?;
                let field = Arc::new(Field::new(q).map_err(CliError::config)?);
                let code = match &self.eval_points {
                    Some(points) => {
                        if points.len() != n {
                            return Err(CliError::Config(format!(
                                "{} evaluation points for length {n}",
                                points.len()
                            )));
                        }
                        BlockCode::reed_solomon_at(field, points.clone(), k)
                    }
                    None => BlockCode::reed_solomon(field, n, k),
                };
                Ok(code?)
            }
            CodeKind::RandomLinear => {
                let (n, k, q) = self.dims()?;
                let field = Arc::new(Field::new(q).map_err(CliError::config)?);
                Ok(BlockCode::random_linear(field, n, k, self.seed)?)
            }
            CodeKind::Explicit => {
                let path = self
                    .path
                    .as_ref()
                    .ok_or_else(|| CliError::Config("explicit code needs a path".into()))?;
                let text = read_file(path)?;
                let code = if text.trim_start().starts_with('G') {
                    let (g, q) = GeneratorMatrix::parse(&text)?;
                    let field = Arc::new(Field::new(q).map_err(CliError::config)?);
                    BlockCode::from_generator(field, g)?
                } else {
                    BlockCode::parse_table(&text)?
                };
                let spec = code.spec();
                let given = [
                    self.n.map(|n| n == spec.n),
                    self.k.map(|k| k == spec.k),
                    self.q.map(|q| q == spec.q),
                ];
                if given.contains(&Some(false)) {
                    return Err(CliError::Config(format!(
                        "{} holds a ({},{})-{} code, not the configured one",
                        path.display(),
                        spec.n,
                        spec.k,
                        spec.q
                    )));
                }
                Ok(code)
            }
        }
    }
}

/// Short label used in the `code_id` CSV column.
pub fn code_id(code: &BlockCode) -> String {
    let s = code.spec();
    let prefix = match s.kind {
        CodeKind::MdsRs => "rs",
        CodeKind::RandomLinear => "lin",
        CodeKind::Explicit => "explicit",
    };
    format!("{prefix}-{}-{}-{}", s.n, s.k, s.q)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageVariant {
    /// Falls back to the top-level code.
    #[serde(default)]
    pub code: Option<CodeConfig>,
    pub authorities: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub code: Option<CodeConfig>,
    /// M
    pub authorities: usize,
    /// N
    pub nodes: usize,
    pub q_prime: u64,
    pub id_policy: IdPolicy,
    pub r_grid: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub population: Population,
    pub placement: ColluderPlacement,
    /// Evaluation used by `analyze`.
    pub method: Method,
    /// Random collusion sets averaged by `analyze`.
    pub collusion_sets: usize,
    /// A fixed collusion set (message indices, or node indices for a
    /// deployed population).
    pub colluders: Option<Vec<u64>>,
    /// Random linear codes in the `sweep-r` ensemble.
    pub ensemble: usize,
    pub storage_variants: Vec<StorageVariant>,
    /// Deployment file read by `discover` and deployed-population runs.
    pub deployment: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            code: None,
            authorities: 1,
            nodes: 0,
            q_prime: 64,
            id_policy: IdPolicy::Uniform,
            r_grid: Vec::new(),
            trials: 10_000,
            seed: 0,
            population: Population::CodeSpace,
            placement: ColluderPlacement::Disjoint,
            method: Method::ExactIe,
            collusion_sets: 200,
            colluders: None,
            ensemble: 0,
            storage_variants: Vec::new(),
            deployment: None,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::from_json(&read_file(path)?)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.authorities == 0 {
            return Err(CliError::Config("authorities must be at least 1".into()));
        }
        if self.q_prime == 0 {
            return Err(CliError::Config("q_prime must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        if self.r_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config(
                "r_grid must be strictly increasing".into(),
            ));
        }
        if self.storage_variants.iter().any(|v| v.authorities == 0) {
            return Err(CliError::Config(
                "storage variant with zero authorities".into(),
            ));
        }
        Ok(())
    }

    pub fn code_config(&self) -> Result<&CodeConfig, CliError> {
        self.code
            .as_ref()
            .ok_or_else(|| CliError::Config("config has no code".into()))
    }

    pub fn build_code(&self) -> Result<BlockCode, CliError> {
        self.code_config()?.build()
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let c = ExperimentConfig::from_json(
            r#"{"code": {"kind": "mds_rs", "n": 3, "k": 2, "q": 4, "eval_points": [1, 2, 3]},
                "nodes": 16, "r_grid": [0, 1], "population": "deployed"}"#,
        )
        .unwrap();
        assert_eq!(c.nodes, 16);
        assert_eq!(c.population, Population::Deployed);
        assert_eq!(c.authorities, 1);
        let code = c.build_code().unwrap();
        assert_eq!(code.d_min(), 2);
        assert_eq!(code.encode(&[0, 1]).unwrap().symbols(), &[1, 2, 3]);
        assert_eq!(code_id(&code), "rs-3-2-4");
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"bogus": 1}"#),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::from_json("{"),
            Err(CliError::Config(_))
        ));
        let c = ExperimentConfig {
            r_grid: vec![1, 1],
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = ExperimentConfig {
            trials: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        assert!(ExperimentConfig::default().build_code().is_err());
        let mut rl = CodeConfig::random_linear(5, 2, 8, 1);
        rl.q = None;
        assert!(rl.build().is_err());
    }

    #[test]
    fn explicit_code_from_file() {
        let dir = std::env::temp_dir().join(format!("kps-cli-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let g = dir.join("g.txt");
        std::fs::write(&g, "G 2 3 4\n1 1 1\n1 2 3\n").unwrap();
        let mut cfg = CodeConfig {
            kind: CodeKind::Explicit,
            n: None,
            k: None,
            q: None,
            seed: 0,
            eval_points: None,
            path: Some(g.clone()),
        };
        let code = cfg.build().unwrap();
        assert_eq!((code.n(), code.k(), code.q()), (3, 2, 4));
        cfg.n = Some(4);
        assert!(cfg.build().is_err());
        cfg.path = Some(dir.join("missing.txt"));
        assert!(matches!(cfg.build(), Err(CliError::Io { .. })));
        std::fs::remove_dir_all(&dir).ok();
    }
}
