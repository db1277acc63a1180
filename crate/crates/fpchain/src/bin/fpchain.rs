use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fpchain_core::cheeger::{self, SearchFamily, SubsetCertificate};
use fpchain_core::descriptor::{ChainDescriptor, FamilyDescriptor, MapDescriptor};
use fpchain_core::expsum::{self, ExpSumRecord, PhaseTable};
use fpchain_core::kernel::StartPolicy;
use fpchain_core::{stationary, ChainSpec, Distribution, PrimeFieldCtx};
use fpchain::error::HarnessError;
use fpchain::report::{self, rational_string, ratio_string};
use fpchain::{emit_report, par_cheeger_exact, run_experiment, ExperimentConfig};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "fpchain", version, about = "Random walks x -> f(x) ± γ on F_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recurrent structure and stationary law of a chain.
    Stationary {
        #[arg(long)]
        chain: ChainDescriptor,
        /// Force the exact solve regardless of size.
        #[arg(long)]
        exact: bool,
    },
    /// Worst-start mixing time.
    Mix {
        #[arg(long)]
        chain: ChainDescriptor,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long)]
        all_starts: bool,
        /// Evolve in exact rationals instead of `f64`.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        /// Write the TV trajectory as CSV here.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Support fraction of the square chain over primes 1 mod 4.
    Conjecture {
        #[arg(long)]
        pmin: u64,
        #[arg(long)]
        pmax: u64,
        #[arg(long, default_value_t = 1)]
        gamma: u64,
    },
    /// Exponential sums and their bound ratios.
    Expsum {
        #[arg(value_enum)]
        kind: ExpsumKind,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "inverse")]
        map: MapDescriptor,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, default_value_t = 0)]
        alpha: u64,
        #[arg(long)]
        family: Option<FamilyDescriptor>,
        /// Second family for `count`.
        #[arg(long)]
        family2: Option<FamilyDescriptor>,
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long, default_value_t = 1)]
        len: usize,
    },
    /// Cheeger constant: exhaustive, structured search, or TV bound check.
    Cheeger {
        #[arg(value_enum)]
        mode: CheegerMode,
        #[arg(long)]
        chain: ChainDescriptor,
        /// Comma-separated: intervals, ap-unions, quadratic-residues, random.
        #[arg(long, default_value = "intervals,ap-unions,quadratic-residues,random")]
        families: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = cheeger::EXACT_LIMIT)]
        limit: usize,
    },
    /// Seeded sample path.
    Sample {
        #[arg(long)]
        chain: ChainDescriptor,
        #[arg(long)]
        x0: u64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a configured experiment and writes its reports.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        allow_empty: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpsumKind {
    Weil,
    Avg,
    Family,
    Linear,
    Count,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheegerMode {
    Exact,
    Search,
    Tvbound,
}

enum Failure {
    Harness(HarnessError),
    ErrorRows(usize),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Harness(e)
    }
}

impl From<fpchain_core::Error> for Failure {
    fn from(e: fpchain_core::Error) -> Self {
        Failure::Harness(e.into())
    }
}

fn cfg_err(msg: impl Into<String>) -> Failure {
    Failure::Harness(HarnessError::Config(msg.into()))
}

fn chain_for(desc: &ChainDescriptor) -> Result<ChainSpec, Failure> {
    if desc.p.is_none() {
        return Err(cfg_err("chain descriptor needs p=<prime>"));
    }
    Ok(desc.build()?)
}

fn pi_json(pi: &Distribution) -> Value {
    match pi {
        Distribution::Exact(_) => {
            Value::from((0..pi.len()).map(|i| rational_string(&pi.ratio(i).expect("exact"))).collect::<Vec<_>>())
        }
        Distribution::Float(v) => Value::from(v.clone()),
    }
}

fn record_json(r: &ExpSumRecord) -> Value {
    json!({
        "k": r.k,
        "lhs_value": r.lhs_value,
        "bound_form": r.bound_form.name(),
        "bound_value": r.bound_value,
        "empirical_constant": r.empirical_constant,
    })
}

fn certificate_json(c: &SubsetCertificate) -> Value {
    json!({
        "subset": c.subset,
        "flow": rational_string(&c.flow),
        "ratio": rational_string(&c.ratio),
        "ratio_f64": c.ratio.to_f64(),
        "edge_count": c.edge_count,
    })
}

fn parse_families(list: &str, gamma: u64) -> Result<Vec<SearchFamily>, Failure> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| match s.trim() {
            "intervals" => Ok(SearchFamily::Intervals),
            "ap-unions" | "aps" => Ok(SearchFamily::ApUnions { delta: 2 * gamma }),
            "quadratic-residues" | "qr" => Ok(SearchFamily::QuadraticResidues),
            "random" => Ok(SearchFamily::Random),
            other => Err(cfg_err(format!("unknown search family {other:?}"))),
        })
        .collect()
}

fn stationary_cmd(chain: &ChainDescriptor, exact: bool) -> Result<Value, Failure> {
    let spec = chain_for(chain)?;
    let k = spec.kernel();
    let rs = stationary::recurrent_classes(&k);
    let mut out = json!({
        "p": spec.ctx().p(),
        "gamma": spec.gamma(),
        "chain": chain.to_string(),
        "classes": rs.recurrent_count(),
    });
    if rs.recurrent_count() == 1 {
        let class = rs.unique_recurrent()?.to_vec();
        let pi = if exact { stationary::stationary_exact(&k)? } else { stationary::stationary(&k)? };
        let support = pi.support().len();
        out["period"] = json!(stationary::period(&k, &class)?);
        out["support"] = json!(support);
        out["fraction"] = json!(ratio_string(support as u64, spec.ctx().p()));
        out["exact"] = json!(pi.is_exact());
        out["pi"] = pi_json(&pi);
    } else {
        out["class_sizes"] = json!(rs.recurrent().iter().map(|&c| rs.classes[c].len()).collect::<Vec<_>>());
    }
    Ok(out)
}

fn mix_cmd(
    chain: &ChainDescriptor,
    eps: f64,
    all_starts: bool,
    exact: bool,
    seed: u64,
    budget: usize,
    trajectory: Option<PathBuf>,
) -> Result<Value, Failure> {
    let spec = chain_for(chain)?;
    let k = spec.kernel();
    let mut pi = stationary::stationary(&k)?;
    if !exact {
        pi = pi.to_float();
    }
    let policy = if all_starts { StartPolicy::All } else { StartPolicy::Default { seed } };
    let starts = policy.resolve(spec.ctx(), spec.gamma());
    let r = stationary::mixing_time(&k, &pi, eps, &starts, budget)?;
    if let Some(path) = &trajectory {
        report::write_tv_csv(path, &r.trajectory)?;
    }
    Ok(json!({
        "p": spec.ctx().p(),
        "gamma": spec.gamma(),
        "chain": chain.to_string(),
        "epsilon": eps,
        "t_mix": r.t_mix,
        "starts": r.starts.len(),
        "trajectory_path": trajectory.map(|p| p.display().to_string()),
    }))
}

fn conjecture_cmd(pmin: u64, pmax: u64, gamma: u64) -> Result<Vec<Value>, Failure> {
    use fpchain_core::field::{odd_primes_in, ResidueFilter};
    let limit = stationary::conjectured_limit();
    let mut rows = Vec::new();
    for p in odd_primes_in(pmin, pmax, ResidueFilter::OneMod4) {
        if gamma.is_multiple_of(p) {
            return Err(cfg_err(format!("gamma {gamma} vanishes mod {p}")));
        }
        let ctx = PrimeFieldCtx::new(p)?;
        let r = stationary::support_fraction(&ctx, gamma)?;
        rows.push(json!({
            "p": p,
            "gamma": gamma,
            "classes": r.recurrent_classes,
            "fraction": r.fraction(),
            "conjectured": limit.limit,
        }));
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn expsum_cmd(
    kind: ExpsumKind,
    p: u64,
    map: &MapDescriptor,
    k: u64,
    alpha: u64,
    family: Option<FamilyDescriptor>,
    family2: Option<FamilyDescriptor>,
    start: u64,
    len: usize,
) -> Result<Value, Failure> {
    let ctx = PrimeFieldCtx::new(p)?;
    let table = PhaseTable::new(&ctx);
    let f = map.build(&ctx)?;
    let need = |fam: Option<FamilyDescriptor>, flag: &str| {
        fam.ok_or_else(|| cfg_err(format!("--{flag} is required"))).and_then(|d| Ok(d.build(&ctx)?))
    };
    let mut out = match kind {
        ExpsumKind::Weil => record_json(&expsum::weil_record(&f, alpha, k, &table)?),
        ExpsumKind::Avg => {
            let mut v = record_json(&expsum::averaged_record(&f, k, start, len, &table)?);
            if let Some(exact) = expsum::averaged_square_sum_exact(&f, k, start, len)? {
                v["exact_value"] = json!(exact);
            }
            v
        }
        ExpsumKind::Family => record_json(&expsum::family_square_sum(&f, k, &need(family, "family")?, &table)?),
        ExpsumKind::Linear => record_json(&expsum::linear_family_sum(&need(family, "family")?, &table)?),
        ExpsumKind::Count => {
            let s = need(family, "family")?;
            let s2 = need(family2, "family2")?;
            let r = expsum::count_solutions(&f, &s, &s2, expsum::DEFAULT_REGIME_EPSILON)?;
            json!({
                "count": r.count,
                "size_s": r.size_s,
                "size_s2": r.size_s2,
                "expected": r.expected,
                "ratio": r.ratio,
                "jll": r.jll,
                "in_regime": r.in_regime,
            })
        }
    };
    out["p"] = json!(p);
    out["map"] = json!(map.to_string());
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cheeger_cmd(
    mode: CheegerMode,
    chain: &ChainDescriptor,
    families: &str,
    budget: usize,
    seed: u64,
    c: f64,
    limit: usize,
) -> Result<Value, Failure> {
    let spec = chain_for(chain)?;
    let k = spec.kernel();
    let pi = stationary::stationary_exact(&k)?;
    let mut out = match mode {
        CheegerMode::Exact => certificate_json(&par_cheeger_exact(&k, &pi, limit)?),
        CheegerMode::Search => {
            let fams = parse_families(families, spec.gamma())?;
            certificate_json(&cheeger::cheeger_search(&k, &pi, &fams, budget, seed)?)
        }
        CheegerMode::Tvbound => {
            let cert = par_cheeger_exact(&k, &pi, limit)?;
            let h = cert.ratio.to_f64().unwrap_or(0.0);
            let chk = cheeger::tv_bound_check(&k, &pi, h, c)?;
            let mut v = certificate_json(&cert);
            v["c"] = json!(c);
            v["steps"] = json!(chk.steps);
            v["max_tv"] = json!(chk.max_tv);
            v["threshold"] = json!(chk.threshold);
            v["passed"] = json!(chk.passed);
            v
        }
    };
    out["p"] = json!(spec.ctx().p());
    out["gamma"] = json!(spec.gamma());
    out["chain"] = json!(chain.to_string());
    Ok(out)
}

fn sample_cmd(chain: &ChainDescriptor, x0: u64, steps: usize, seed: u64, out: Option<PathBuf>) -> Result<Value, Failure> {
    let spec = chain_for(chain)?;
    let path = spec.sample_path(x0, steps, seed)?;
    match out {
        Some(file) => {
            report::write_path_csv(&file, &path)?;
            Ok(json!({ "steps": steps, "seed": seed, "path_file": file.display().to_string() }))
        }
        None => Ok(json!({ "steps": steps, "seed": seed, "path": path })),
    }
}

fn sweep_cmd(config: &std::path::Path, allow_empty: bool) -> Result<Value, Failure> {
    let mut cfg = ExperimentConfig::load(config)?;
    cfg.apply_env();
    let rows = run_experiment(&cfg);
    let stem = cfg.experiment.name();
    let mut files = Vec::new();
    for &fmt in &cfg.formats {
        files.push(emit_report(&rows, &cfg.output_dir, stem, fmt, allow_empty)?.display().to_string());
    }
    let errors = rows.iter().filter(|r| r.is_error()).count();
    for r in rows.iter().filter(|r| r.is_error()) {
        eprintln!("error row: p={} gamma={} {}: {}", r.p, r.gamma, r.chain, r.value);
    }
    println!("{}", json!({ "rows": rows.len(), "errors": errors, "files": files, "config_hash": cfg.hash }));
    if errors > 0 {
        return Err(Failure::ErrorRows(errors));
    }
    Ok(Value::Null)
}

fn run(cli: Cli) -> Result<Vec<Value>, Failure> {
    Ok(match cli.command {
        Command::Stationary { chain, exact } => vec![stationary_cmd(&chain, exact)?],
        Command::Mix { chain, eps, all_starts, exact, seed, budget, trajectory } => {
            vec![mix_cmd(&chain, eps, all_starts, exact, seed, budget, trajectory)?]
        }
        Command::Conjecture { pmin, pmax, gamma } => conjecture_cmd(pmin, pmax, gamma)?,
        Command::Expsum { kind, p, map, k, alpha, family, family2, start, len } => {
            vec![expsum_cmd(kind, p, &map, k, alpha, family, family2, start, len)?]
        }
        Command::Cheeger { mode, chain, families, budget, seed, c, limit } => {
            vec![cheeger_cmd(mode, &chain, &families, budget, seed, c, limit)?]
        }
        Command::Sample { chain, x0, steps, seed, out } => vec![sample_cmd(&chain, x0, steps, seed, out)?],
        Command::Sweep { config, allow_empty } => {
            sweep_cmd(&config, allow_empty)?;
            Vec::new()
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(values) => {
            for v in values {
                println!("{v}");
            }
            ExitCode::SUCCESS
        }
        Err(Failure::ErrorRows(n)) => {
            eprintln!("{n} task(s) failed");
            ExitCode::from(3)
        }
        Err(Failure::Harness(e)) => {
            eprintln!("fpchain: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
