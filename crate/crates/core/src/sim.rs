//! Seeded Monte Carlo estimates of sharing and resilience probabilities.
//!
//! Every trial draws its own randomness from a ChaCha8 generator seeded
//! with the configured seed and switched to stream `trial`, so trials can
//! run in any order or on any number of threads and still produce the
//! same successes. Results are integer success counts, reduced exactly.
//!
//! A trial draws a pair of nodes and a set of `r` colluders, then checks
//! whether some authority part has a coordinate where the pair agrees on
//! a symbol no colluder holds there. Nodes come either from a deployment's
//! registry or from the whole code space; in the latter case each
//! authority part of each sampled node is an independent uniformly random
//! codeword, distinct across the nodes of a trial.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{BlockCode, CodeError};
use crate::field::FieldElement;
use crate::kps::Deployment;
use crate::resilience::{ColluderPlacement, ResilienceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("population of {population} cannot hold a pair and {r} colluders")]
    PopulationTooSmall { population: u64, r: usize },
    #[error("bad trial configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Resilience(#[from] ResilienceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Population {
    /// All `q^k` messages, independently per authority.
    #[default]
    CodeSpace,
    /// The nodes of the deployment registry.
    Deployed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialConfig {
    pub trials: u64,
    pub seed: u64,
    pub r: usize,
    pub population: Population,
    pub placement: ColluderPlacement,
    /// Keeps this collusion set for every trial instead of resampling.
    /// Pairs are then drawn from the whole population, colluders
    /// included. Indices refer to population members (messages for the
    /// code space, node indices for a deployment).
    pub fixed_colluders: Option<Vec<u64>>,
}

impl TrialConfig {
    pub fn new(trials: u64, seed: u64, r: usize) -> Self {
        TrialConfig {
            trials,
            seed,
            r,
            population: Population::CodeSpace,
            placement: ColluderPlacement::Disjoint,
            fixed_colluders: None,
        }
    }

    pub fn with_population(mut self, population: Population) -> Self {
        self.population = population;
        self
    }

    pub fn with_placement(mut self, placement: ColluderPlacement) -> Self {
        self.placement = placement;
        self
    }

    pub fn with_fixed_colluders(mut self, colluders: Vec<u64>) -> Self {
        self.r = colluders.len();
        self.fixed_colluders = Some(colluders);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl EmpiricalEstimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let p_hat = successes as f64 / trials as f64;
        EmpiricalEstimate {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            trials,
        }
    }

    /// Whether `value` lies within `sigmas` standard errors.
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        (self.p_hat - value).abs() <= sigmas * self.stderr + 1e-12
    }
}

/// SplitMix64 finaliser, used to derive independent seeds from one.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    let mut z = base ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Where a trial's nodes come from.
enum Source<'a> {
    Codes {
        code: &'a BlockCode,
        authorities: usize,
    },
    Registry(&'a Deployment),
}

impl Source<'_> {
    fn population(&self) -> u64 {
        match self {
            Source::Codes { code, .. } => code.codeword_count(),
            Source::Registry(d) => d.len() as u64,
        }
    }

    fn authorities(&self) -> usize {
        match self {
            Source::Codes { authorities, .. } => *authorities,
            Source::Registry(d) => d.authorities(),
        }
    }
}

/// The part-`m` words of every node taking part in a trial: slots 0 and 1
/// are the pair, the rest are colluders.
enum TrialWords<'a> {
    Messages {
        code: &'a BlockCode,
        // messages[m][slot]
        messages: Vec<Vec<Vec<FieldElement>>>,
    },
    Nodes {
        deployment: &'a Deployment,
        nodes: Vec<usize>,
    },
}

impl TrialWords<'_> {
    fn slots(&self) -> usize {
        match self {
            TrialWords::Messages { messages, .. } => messages[0].len(),
            TrialWords::Nodes { nodes, .. } => nodes.len(),
        }
    }

    #[inline]
    fn symbol(&self, m: usize, slot: usize, coord: usize) -> FieldElement {
        match self {
            TrialWords::Messages { code, messages } => code.symbol_at(&messages[m][slot], coord),
            TrialWords::Nodes { deployment, nodes } => {
                let ki = &deployment.nodes()[nodes[slot]].key_index;
                ki.part(m)[coord]
            }
        }
    }

    /// The security predicate shared with the analysis: some part has a
    /// coordinate where the pair agrees and no colluder slot matches.
    fn pair_is_secure(&self, authorities: usize, n: usize) -> bool {
        let slots = self.slots();
        (0..authorities).any(|m| {
            (0..n).any(|i| {
                let s = self.symbol(m, 0, i);
                s == self.symbol(m, 1, i) && (2..slots).all(|c| self.symbol(m, c, i) != s)
            })
        })
    }
}

/// Maps sampled population identities to trial words. `ids[slot]` is the
/// identity of each slot; equal identities are the same node.
fn words_for<'a>(
    source: &Source<'a>,
    ids: &[u64],
    rng: &mut ChaCha8Rng,
    fixed: bool,
) -> TrialWords<'a> {
    match source {
        Source::Registry(d) => TrialWords::Nodes {
            deployment: d,
            nodes: ids.iter().map(|&x| x as usize).collect(),
        },
        Source::Codes { code, authorities } => {
            let messages = if fixed {
                // identities are the messages themselves (single part)
                vec![ids.iter().map(|&x| code.message_from_index(x)).collect()]
            } else {
                let mut distinct: Vec<u64> = ids.to_vec();
                distinct.sort_unstable();
                distinct.dedup();
                (0..*authorities)
                    .map(|_| {
                        let drawn =
                            index::sample(rng, code.codeword_count() as usize, distinct.len());
                        ids.iter()
                            .map(|id| {
                                let pos = distinct.binary_search(id).expect("present");
                                code.message_from_index(drawn.index(pos) as u64)
                            })
                            .collect()
                    })
                    .collect()
            };
            TrialWords::Messages { code, messages }
        }
    }
}

fn run_trials(
    source: Source<'_>,
    n: usize,
    cfg: &TrialConfig,
) -> Result<EmpiricalEstimate, SimError> {
    if cfg.trials == 0 {
        return Err(SimError::BadConfig("trials must be at least 1".into()));
    }
    let population = source.population();
    let authorities = source.authorities();
    if population > usize::MAX as u64 {
        return Err(SimError::BadConfig("population too large".into()));
    }
    let pop = population as usize;
    let r = cfg.r;
    if let Some(fixed) = &cfg.fixed_colluders {
        if matches!(source, Source::Codes { .. }) && authorities != 1 {
            return Err(SimError::BadConfig(
                "fixed colluders over the code space need a single authority".into(),
            ));
        }
        let mut sorted = fixed.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != fixed.len() || fixed.iter().any(|&c| c >= population) {
            return Err(SimError::BadConfig(
                "fixed colluders must be distinct population members".into(),
            ));
        }
        if population < 2 {
            return Err(SimError::PopulationTooSmall { population, r });
        }
    } else {
        let needed = match cfg.placement {
            ColluderPlacement::Disjoint => r as u64 + 2,
            ColluderPlacement::Anywhere => (r as u64).max(2),
        };
        if needed > population {
            return Err(SimError::PopulationTooSmall { population, r });
        }
    }

    let successes: u64 = (0..cfg.trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = trial_rng(cfg.seed, t);
            let ids: Vec<u64> = match (&cfg.fixed_colluders, cfg.placement) {
                (Some(fixed), _) => {
                    let pair = index::sample(&mut rng, pop, 2);
                    let mut ids = vec![pair.index(0) as u64, pair.index(1) as u64];
                    ids.extend_from_slice(fixed);
                    ids
                }
                (None, ColluderPlacement::Disjoint) => index::sample(&mut rng, pop, r + 2)
                    .into_iter()
                    .map(|x| x as u64)
                    .collect(),
                (None, ColluderPlacement::Anywhere) => {
                    let pair = index::sample(&mut rng, pop, 2);
                    let cols = index::sample(&mut rng, pop, r);
                    [pair.index(0), pair.index(1)]
                        .into_iter()
                        .chain(cols)
                        .map(|x| x as u64)
                        .collect()
                }
            };
            let words = words_for(&source, &ids, &mut rng, cfg.fixed_colluders.is_some());
            words.pair_is_secure(authorities, n)
        })
        .count() as u64;
    Ok(EmpiricalEstimate::from_counts(successes, cfg.trials))
}

/// Empirical r-resilience of a deployment, over its registry or over the
/// code space of its code, as `cfg.population` selects.
pub fn simulate_resilience(
    deployment: &Deployment,
    cfg: &TrialConfig,
) -> Result<EmpiricalEstimate, SimError> {
    let n = deployment.params().n;
    match cfg.population {
        Population::Deployed => run_trials(Source::Registry(deployment), n, cfg),
        Population::CodeSpace => {
            let code = deployment.code().ok_or_else(|| {
                SimError::BadConfig("code-space sampling needs the deployment's code".into())
            })?;
            run_trials(
                Source::Codes {
                    code,
                    authorities: deployment.authorities(),
                },
                n,
                cfg,
            )
        }
    }
}

/// Empirical r-resilience over the code space of `code` with `authorities`
/// independent parts; no deployment needed.
pub fn simulate_code_resilience(
    code: &BlockCode,
    authorities: usize,
    cfg: &TrialConfig,
) -> Result<EmpiricalEstimate, SimError> {
    if authorities == 0 {
        return Err(SimError::BadConfig("authorities must be at least 1".into()));
    }
    if cfg.population == Population::Deployed {
        return Err(SimError::BadConfig("no deployment to sample from".into()));
    }
    run_trials(Source::Codes { code, authorities }, code.n(), cfg)
}

/// Empirical sharing probability: the `r = 0` case.
pub fn simulate_sharing(
    deployment: &Deployment,
    cfg: &TrialConfig,
) -> Result<EmpiricalEstimate, SimError> {
    if cfg.r != 0 || cfg.fixed_colluders.as_ref().is_some_and(|c| !c.is_empty()) {
        return Err(SimError::BadConfig(
            "sharing simulation requires r = 0".into(),
        ));
    }
    simulate_resilience(deployment, cfg)
}

/// Every unordered pair of registry nodes against a fixed collusion set
/// (node indices). Pairs containing a colluder count as insecure. The
/// result is exact; its `stderr` is zero.
pub fn exhaustive_resilience(
    deployment: &Deployment,
    colluders: &[usize],
) -> Result<EmpiricalEstimate, SimError> {
    let nodes = deployment.nodes();
    if nodes.len() < 2 {
        return Err(SimError::PopulationTooSmall {
            population: nodes.len() as u64,
            r: colluders.len(),
        });
    }
    if colluders.iter().any(|&c| c >= nodes.len()) {
        return Err(SimError::BadConfig("colluder index out of range".into()));
    }
    let (m, n) = (deployment.authorities(), deployment.params().n);
    let col_words: Vec<&[FieldElement]> = colluders
        .iter()
        .map(|&c| nodes[c].key_index.symbols())
        .collect();
    let secure = (0..nodes.len())
        .into_par_iter()
        .map(|a| {
            let sa = nodes[a].key_index.symbols();
            nodes[a + 1..]
                .iter()
                .filter(|b| {
                    let sb = b.key_index.symbols();
                    (0..m * n).any(|i| sa[i] == sb[i] && col_words.iter().all(|c| c[i] != sa[i]))
                })
                .count() as u64
        })
        .sum::<u64>();
    let pairs = (nodes.len() as u64) * (nodes.len() as u64 - 1) / 2;
    Ok(EmpiricalEstimate {
        p_hat: secure as f64 / pairs as f64,
        stderr: 0.0,
        trials: pairs,
    })
}

/// Resilience curves of a family of seeded random linear codes, their
/// mean, and the matching Reed–Solomon curve when `n <= q`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub r_grid: Vec<usize>,
    /// `per_code[c][x]`: code `c` at `r_grid[x]`.
    pub per_code: Vec<Vec<EmpiricalEstimate>>,
    pub code_seeds: Vec<u64>,
    pub mean: Vec<EmpiricalEstimate>,
    pub mds: Option<Vec<EmpiricalEstimate>>,
}

/// Seed of ensemble member `c`, derived from the trial seed.
pub fn ensemble_code_seed(seed: u64, c: usize) -> u64 {
    derive_seed(seed, 2 * c as u64 + 1)
}

fn ensemble_trial_seed(seed: u64, c: usize) -> u64 {
    derive_seed(seed, 2 * c as u64 + 2)
}

/// Averages [`simulate_code_resilience`] (single authority) over
/// `code_count` random linear codes for every `r` in `r_grid`.
pub fn ensemble_resilience(
    field: std::sync::Arc<crate::field::Field>,
    n: usize,
    k: usize,
    code_count: usize,
    r_grid: &[usize],
    cfg: &TrialConfig,
) -> Result<EnsembleResult, SimError> {
    if code_count == 0 {
        return Err(SimError::BadConfig("code_count must be at least 1".into()));
    }
    let at = |code: &BlockCode, seed: u64| -> Result<Vec<EmpiricalEstimate>, SimError> {
        r_grid
            .iter()
            .map(|&r| {
                let mut c = cfg.clone();
                c.r = r;
                c.seed = seed;
                simulate_code_resilience(code, 1, &c)
            })
            .collect()
    };
    let code_seeds: Vec<u64> = (0..code_count)
        .map(|c| ensemble_code_seed(cfg.seed, c))
        .collect();
    let per_code = code_seeds
        .iter()
        .enumerate()
        .map(|(c, &s)| {
            let code = BlockCode::random_linear(field.clone(), n, k, s)?;
            at(&code, ensemble_trial_seed(cfg.seed, c))
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    let mean = (0..r_grid.len())
        .map(|x| {
            let count = code_count as f64;
            let p = per_code.iter().map(|c| c[x].p_hat).sum::<f64>() / count;
            let var = per_code.iter().map(|c| c[x].stderr.powi(2)).sum::<f64>();
            EmpiricalEstimate {
                p_hat: p,
                stderr: var.sqrt() / count,
                trials: per_code.iter().map(|c| c[x].trials).sum(),
            }
        })
        .collect();
    let mds = if n as u64 <= field.order() as u64 {
        let code = BlockCode::reed_solomon(field.clone(), n, k)?;
        Some(at(&code, cfg.seed)?)
    } else {
        None
    };
    Ok(EnsembleResult {
        r_grid: r_grid.to_vec(),
        per_code,
        code_seeds,
        mean,
        mds,
    })
}
