//! One function per subcommand. Each returns the text the binary writes
//! to `--out` (or stdout), plus an optional note for stderr.

use std::fmt::Write as _;
use std::sync::Arc;

use kps_core::kps::{discover_common, storage_bits, Deployment};
use kps_core::resilience::{
    average_exact_resilience, average_resilience_with, binomial, brute_force_pair_count,
    collusion_free_sets, exact_pair_count, expected_resilience, mds_average_pair_count,
    multi_authority, AveragedResilience, ColluderPlacement, Method, ResilienceReport,
};
use kps_core::sim::{
    derive_seed, ensemble_code_seed, simulate_code_resilience, simulate_resilience,
    EmpiricalEstimate, Population, TrialConfig,
};
use kps_core::{BlockCode, CodeKind, Field};

use crate::config::{code_id, read_file, CodeConfig, ExperimentConfig};
use crate::error::CliError;

pub const SWEEP_R_HEADER: &str = "code_id,kind,r,p_exact,p_eq8,p_sim,stderr";
pub const SWEEP_STORAGE_HEADER: &str = "code_id,M,S_bits,r,p_analytic,p_sim,stderr";
pub const SIMULATE_HEADER: &str = "r,p_hat,stderr,trials,method,code_id,M";

/// Tag mixed into a variant's trial seed to seed its deployment.
const DEPLOYMENT_TAG: u64 = 0xd3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub body: String,
    pub note: Option<String>,
}

impl CommandOutput {
    fn body(body: String) -> Self {
        CommandOutput { body, note: None }
    }
}

fn build_deployment(
    cfg: &ExperimentConfig,
    code: Arc<BlockCode>,
    authorities: usize,
    seed: u64,
) -> Result<Deployment, CliError> {
    Ok(Deployment::build(
        cfg.nodes,
        authorities,
        code,
        cfg.q_prime,
        seed,
        cfg.id_policy,
    )?)
}

fn load_deployment(cfg: &ExperimentConfig) -> Result<Deployment, CliError> {
    let path = cfg
        .deployment
        .as_ref()
        .ok_or_else(|| CliError::Config("no deployment file given".into()))?;
    let text = read_file(path)?;
    let code = cfg
        .code
        .as_ref()
        .map(CodeConfig::build)
        .transpose()?
        .map(Arc::new);
    Ok(Deployment::parse(&text, code)?)
}

fn trial_config(cfg: &ExperimentConfig, seed: u64, r: usize) -> TrialConfig {
    TrialConfig::new(cfg.trials, seed, r)
        .with_population(cfg.population)
        .with_placement(cfg.placement)
}

/// Simulated resilience of one code variant at one `r`, over the code
/// space or over a freshly built deployment of `cfg.nodes` nodes.
fn simulate_variant(
    cfg: &ExperimentConfig,
    code: &Arc<BlockCode>,
    authorities: usize,
    seed: u64,
    r: usize,
) -> Result<EmpiricalEstimate, CliError> {
    let tc = trial_config(cfg, seed, r);
    match cfg.population {
        Population::CodeSpace => Ok(simulate_code_resilience(code, authorities, &tc)?),
        Population::Deployed => {
            let d = build_deployment(
                cfg,
                code.clone(),
                authorities,
                derive_seed(seed, DEPLOYMENT_TAG),
            )?;
            Ok(simulate_resilience(&d, &tc)?)
        }
    }
}

fn is_mds(code: &BlockCode) -> bool {
    code.d_min() == code.n() - code.k() + 1
}

fn eq8_probability(code: &BlockCode, r: usize) -> f64 {
    mds_average_pair_count(code.n(), code.k(), code.q(), r) / binomial(code.codeword_count(), 2)
}

/// Writes the deployment export; the note reports per-node storage.
pub fn cmd_assign(cfg: &ExperimentConfig) -> Result<CommandOutput, CliError> {
    cfg.validate()?;
    let code = Arc::new(cfg.build_code()?);
    let d = build_deployment(cfg, code, cfg.authorities, cfg.seed)?;
    Ok(CommandOutput {
        body: d.to_text(),
        note: Some(format!("storage: {} bits/node", d.storage_bits())),
    })
}

/// Common key references of two registry nodes, ascending, then their count.
pub fn cmd_discover(cfg: &ExperimentConfig, a: usize, b: usize) -> Result<CommandOutput, CliError> {
    let d = load_deployment(cfg)?;
    let node = |i: usize| {
        d.node(i).ok_or_else(|| {
            CliError::Config(format!("unknown node {i} (registry holds {})", d.len()))
        })
    };
    let mut refs = discover_common(&node(a)?.key_index, &node(b)?.key_index)?;
    refs.sort();
    let list: Vec<String> = refs.iter().map(|r| r.0.to_string()).collect();
    Ok(CommandOutput::body(format!(
        "refs: {}\ncount: {}\n",
        list.join(" "),
        refs.len()
    )))
}

fn fixed_colluder_words(
    code: &BlockCode,
    colluders: &[u64],
) -> Result<Vec<kps_core::Codeword>, CliError> {
    colluders
        .iter()
        .map(|&m| {
            if m >= code.codeword_count() {
                Err(CliError::Config(format!(
                    "colluder message {m} out of range"
                )))
            } else {
                Ok(code.encode_index(m))
            }
        })
        .collect()
}

fn averaged_report(
    r: usize,
    m: usize,
    method: Method,
    avg: &AveragedResilience,
) -> ResilienceReport {
    ResilienceReport {
        r,
        d: avg.mean_pairs,
        p_re: avg.mean,
        p_re_m: multi_authority(avg.mean, m),
        method,
        stderr: Some(avg.stderr),
    }
}

/// ResilienceReport rows: one for the fixed collusion set, or one per `r`.
pub fn cmd_analyze(cfg: &ExperimentConfig) -> Result<CommandOutput, CliError> {
    cfg.validate()?;
    let code = cfg.build_code()?;
    let (q, k, m) = (code.q(), code.k(), cfg.authorities);
    let mut out = format!("{}\n", ResilienceReport::CSV_HEADER);
    let mut push = |rep: ResilienceReport| {
        out.push_str(&rep.csv_row());
        out.push('\n');
    };

    if let Some(colluders) = &cfg.colluders {
        let words = fixed_colluder_words(&code, colluders)?;
        let u = collusion_free_sets(&words, code.n(), q)?;
        let d = match cfg.method {
            Method::ExactIe => exact_pair_count(&code, &u)?,
            Method::BruteForce => brute_force_pair_count(&code, &u)?,
            other => {
                return Err(CliError::Config(format!(
                    "method {} does not apply to a fixed collusion set",
                    other.as_str()
                )))
            }
        };
        push(ResilienceReport::new(
            words.len(),
            d as f64,
            q,
            k,
            m,
            cfg.method,
        ));
        return Ok(CommandOutput::body(out));
    }

    if cfg.collusion_sets == 0 && matches!(cfg.method, Method::ExactIe | Method::BruteForce) {
        return Err(CliError::Config("collusion_sets must be at least 1".into()));
    }
    for &r in &cfg.r_grid {
        let rep = match cfg.method {
            Method::ExactIe => {
                let avg = average_exact_resilience(&code, r, cfg.collusion_sets, cfg.seed)?;
                averaged_report(r, m, cfg.method, &avg)
            }
            Method::BruteForce => {
                let avg = average_resilience_with(
                    &code,
                    r,
                    cfg.collusion_sets,
                    cfg.seed,
                    brute_force_pair_count,
                )?;
                averaged_report(r, m, cfg.method, &avg)
            }
            Method::MdsAverage => {
                if !is_mds(&code) {
                    return Err(CliError::Config("mds_average needs an MDS code".into()));
                }
                ResilienceReport::new(
                    r,
                    mds_average_pair_count(code.n(), k, q, r),
                    q,
                    k,
                    m,
                    cfg.method,
                )
            }
            Method::ExpectedIe => {
                let p = expected_resilience(&code, r, cfg.placement)?;
                let mean_d = expected_resilience(&code, r, ColluderPlacement::Anywhere)?
                    * binomial(code.codeword_count(), 2);
                ResilienceReport {
                    r,
                    d: mean_d,
                    p_re: p,
                    p_re_m: multi_authority(p, m),
                    method: cfg.method,
                    stderr: None,
                }
            }
        };
        push(rep);
    }
    Ok(CommandOutput::body(out))
}

/// Simulated resilience rows, one per `r` (or one for a fixed set).
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<CommandOutput, CliError> {
    cfg.validate()?;
    let mut out = format!("{SIMULATE_HEADER}\n");

    let (source, label): (Source, String) = match cfg.population {
        Population::Deployed => {
            let d = match &cfg.deployment {
                Some(_) => load_deployment(cfg)?,
                None => {
                    let code = Arc::new(cfg.build_code()?);
                    build_deployment(cfg, code, cfg.authorities, cfg.seed)?
                }
            };
            let p = d.params();
            let label = match d.code() {
                Some(code) => code_id(code),
                None => format!("deployed-{}-{}-{}", p.n, p.k, p.q),
            };
            (Source::Deployment(d), label)
        }
        Population::CodeSpace => {
            let code = cfg.build_code()?;
            let label = code_id(&code);
            (Source::Code(code), label)
        }
    };
    let m = match &source {
        Source::Deployment(d) => d.authorities(),
        Source::Code(_) => cfg.authorities,
    };
    let run = |tc: &TrialConfig| -> Result<EmpiricalEstimate, CliError> {
        Ok(match &source {
            Source::Deployment(d) => simulate_resilience(d, tc)?,
            Source::Code(code) => simulate_code_resilience(code, m, tc)?,
        })
    };
    let mut row = |r: usize, e: EmpiricalEstimate| {
        let _ = writeln!(
            out,
            "{r},{},{},{},simulated,{label},{m}",
            e.p_hat, e.stderr, e.trials
        );
    };

    if let Some(colluders) = &cfg.colluders {
        let tc = trial_config(cfg, cfg.seed, 0).with_fixed_colluders(colluders.clone());
        row(colluders.len(), run(&tc)?);
    } else {
        for &r in &cfg.r_grid {
            row(r, run(&trial_config(cfg, cfg.seed, r))?);
        }
    }
    Ok(CommandOutput::body(out))
}

enum Source {
    Deployment(Deployment),
    Code(BlockCode),
}

/// Resilience against `r` for the configured code and an ensemble of
/// random linear codes of the same shape (single authority): the exact
/// expectation, the averaged closed form for MDS codes, and a simulated
/// estimate.
pub fn cmd_sweep_r(cfg: &ExperimentConfig) -> Result<CommandOutput, CliError> {
    cfg.validate()?;
    let mut out = format!("{SWEEP_R_HEADER}\n");
    if cfg.r_grid.is_empty() {
        return Ok(CommandOutput::body(out));
    }
    let primary = Arc::new(cfg.build_code()?);
    let kind = |c: &BlockCode| c.spec().kind.as_str();

    for &r in &cfg.r_grid {
        let exact = expected_resilience(&primary, r, cfg.placement)?;
        let eq8 = if is_mds(&primary) {
            eq8_probability(&primary, r).to_string()
        } else {
            String::new()
        };
        let sim = simulate_variant(cfg, &primary, 1, cfg.seed, r)?;
        let _ = writeln!(
            out,
            "{},{},{r},{exact},{eq8},{},{}",
            code_id(&primary),
            kind(&primary),
            sim.p_hat,
            sim.stderr
        );
    }

    if cfg.ensemble == 0 {
        return Ok(CommandOutput::body(out));
    }
    let (n, k, q) = (primary.n(), primary.k(), primary.q());
    let field = Arc::new(Field::new(q).map_err(CliError::config)?);
    let base = code_id(&BlockCode::random_linear(field.clone(), n, k, 0)?);
    let mut exact_sum = vec![0.0; cfg.r_grid.len()];
    let mut sim_sum = vec![0.0; cfg.r_grid.len()];
    let mut var_sum = vec![0.0; cfg.r_grid.len()];
    for c in 0..cfg.ensemble {
        let code = Arc::new(BlockCode::random_linear(
            field.clone(),
            n,
            k,
            ensemble_code_seed(cfg.seed, c),
        )?);
        let trial_seed = derive_seed(cfg.seed, 2 * c as u64 + 2);
        for (x, &r) in cfg.r_grid.iter().enumerate() {
            let exact = expected_resilience(&code, r, cfg.placement)?;
            let eq8 = if is_mds(&code) {
                eq8_probability(&code, r).to_string()
            } else {
                String::new()
            };
            let sim = simulate_variant(cfg, &code, 1, trial_seed, r)?;
            exact_sum[x] += exact;
            sim_sum[x] += sim.p_hat;
            var_sum[x] += sim.stderr * sim.stderr;
            let _ = writeln!(
                out,
                "{base}-c{c},{},{r},{exact},{eq8},{},{}",
                CodeKind::RandomLinear.as_str(),
                sim.p_hat,
                sim.stderr
            );
        }
    }
    let count = cfg.ensemble as f64;
    for (x, &r) in cfg.r_grid.iter().enumerate() {
        let _ = writeln!(
            out,
            "{base}-mean,{},{r},{},,{},{}",
            CodeKind::RandomLinear.as_str(),
            exact_sum[x] / count,
            sim_sum[x] / count,
            var_sum[x].sqrt() / count
        );
    }
    Ok(CommandOutput::body(out))
}

/// Resilience of `(code, M)` variants against `r`, with per-node storage:
/// the independent-parts formula applied to the exact per-part value,
/// and a simulated estimate of the whole scheme.
pub fn cmd_sweep_storage(cfg: &ExperimentConfig) -> Result<CommandOutput, CliError> {
    cfg.validate()?;
    let mut out = format!("{SWEEP_STORAGE_HEADER}\n");
    if cfg.r_grid.is_empty() {
        return Ok(CommandOutput::body(out));
    }
    let default_variant = [crate::config::StorageVariant {
        code: None,
        authorities: cfg.authorities,
    }];
    let variants = if cfg.storage_variants.is_empty() {
        &default_variant[..]
    } else {
        &cfg.storage_variants[..]
    };
    for v in variants {
        let code = Arc::new(match &v.code {
            Some(c) => c.build()?,
            None => cfg.build_code()?,
        });
        let m = v.authorities;
        let s = storage_bits(m, code.n(), code.q() as u64, cfg.q_prime);
        for &r in &cfg.r_grid {
            let part = expected_resilience(&code, r, cfg.placement)?;
            let sim = simulate_variant(cfg, &code, m, cfg.seed, r)?;
            let _ = writeln!(
                out,
                "{},{m},{s},{r},{},{},{}",
                code_id(&code),
                multi_authority(part, m),
                sim.p_hat,
                sim.stderr
            );
        }
    }
    Ok(CommandOutput::body(out))
}

/// Per-node storage in bits.
pub fn cmd_storage(cfg: &ExperimentConfig) -> Result<CommandOutput, CliError> {
    cfg.validate()?;
    let code = cfg.code_config()?;
    let (n, q) = match (code.n, code.q) {
        (Some(n), Some(q)) => (n, q),
        _ => {
            let c = code.build()?;
            (c.n(), c.q())
        }
    };
    Ok(CommandOutput::body(format!(
        "{}\n",
        storage_bits(cfg.authorities, n, q as u64, cfg.q_prime)
    )))
}
