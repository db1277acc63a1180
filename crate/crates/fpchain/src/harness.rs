//! Sweep execution. Every task is independent; results are gathered in task
//! order so the worker count never changes the output.

use std::time::Instant;

use fpchain_core::cheeger::{self, SearchFamily, SubsetCertificate};
use fpchain_core::descriptor::{ChainDescriptor, MapDescriptor};
use fpchain_core::expsum::{self, PhaseTable};
use fpchain_core::kernel::{Distribution, StartPolicy, TransitionKernel, Variant};
use fpchain_core::map::Provenance;
use fpchain_core::stationary;
use fpchain_core::{rng, Error as CoreError, PrimeFieldCtx, TotalMap};
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::report::{rational_string, ratio_string, ResultRow};

/// Exhaustive Cheeger search with the subset chunks spread over the rayon
/// pool. Same answer as the sequential scan.
pub fn par_cheeger_exact(k: &TransitionKernel, pi: &Distribution, limit: usize) -> Result<SubsetCertificate, CoreError> {
    let prob = cheeger::CheegerProblem::new(k, pi)?;
    let m = prob.size();
    if m > limit.min(63) {
        return Err(CoreError::TooLarge { size: m, limit: limit.min(63) });
    }
    let best = (0..cheeger::chunk_count(&prob))
        .into_par_iter()
        .map(|c| cheeger::scan_chunk(&prob, c))
        .reduce(|| None, cheeger::merge_best);
    best.map(|b| cheeger::certificate_for(&prob, &b)).ok_or(CoreError::TrivialSubset)
}

#[derive(Debug, Clone)]
struct Task {
    p: u64,
    gamma: u64,
    chain: Option<ChainDescriptor>,
}

fn default_chain(kind: ExperimentKind) -> Option<ChainDescriptor> {
    let (variant, map) = match kind {
        ExperimentKind::StationarySweep | ExperimentKind::ConjectureSweep => (Variant::NonLazy, MapDescriptor::Square),
        ExperimentKind::MixingSweep | ExperimentKind::CheegerSweep => (Variant::LazyHold, MapDescriptor::Inverse),
        ExperimentKind::ExpsumSweep => return None,
    };
    Some(ChainDescriptor { variant, map: Some(map), gamma: 1, p: None })
}

fn tasks(cfg: &ExperimentConfig) -> Vec<Task> {
    let chains: Vec<Option<ChainDescriptor>> = if cfg.chains.is_empty() {
        vec![default_chain(cfg.experiment)]
    } else {
        cfg.chains.iter().cloned().map(Some).collect()
    };
    let gammas: Vec<u64> = if cfg.experiment == ExperimentKind::ExpsumSweep { vec![0] } else { cfg.gammas.clone() };
    let mut out = Vec::new();
    for &p in &cfg.primes {
        for &gamma in &gammas {
            for chain in &chains {
                let chain = chain.as_ref().map(|c| ChainDescriptor { gamma, p: Some(p), ..c.clone() });
                out.push(Task { p, gamma, chain });
            }
        }
    }
    out
}

struct RowSink<'a> {
    cfg: &'a ExperimentConfig,
    task: &'a Task,
    label: String,
    rows: Vec<ResultRow>,
}

impl RowSink<'_> {
    fn push(&mut self, metric: impl Into<String>, value: impl Into<String>, oracle: Option<String>) {
        self.rows.push(ResultRow {
            experiment: self.cfg.experiment.name().to_string(),
            p: self.task.p,
            gamma: self.task.gamma,
            chain: self.label.clone(),
            metric: metric.into(),
            value: value.into(),
            oracle,
            runtime_ms: 0,
            seed: self.cfg.seed,
            config_hash: self.cfg.hash.clone(),
        });
    }
}

/// Runs the configured sweep. Task failures become `error` rows.
pub fn run_experiment(cfg: &ExperimentConfig) -> Vec<ResultRow> {
    let tasks = tasks(cfg);
    let per_task: Vec<Vec<ResultRow>> = tasks
        .par_iter()
        .map(|task| {
            let label = match &task.chain {
                Some(c) => c.template(),
                None => cfg.map.to_string(),
            };
            let mut sink = RowSink { cfg, task, label, rows: Vec::new() };
            let t0 = Instant::now();
            let res = match cfg.experiment {
                ExperimentKind::StationarySweep => stationary_task(&mut sink),
                ExperimentKind::MixingSweep => mixing_task(&mut sink),
                ExperimentKind::ConjectureSweep => conjecture_task(&mut sink),
                ExperimentKind::ExpsumSweep => expsum_task(&mut sink),
                ExperimentKind::CheegerSweep => cheeger_task(&mut sink),
            };
            if let Err(e) = res {
                sink.push("error", e.to_string(), None);
            }
            let ms = t0.elapsed().as_millis() as u64;
            for r in &mut sink.rows {
                r.runtime_ms = ms;
            }
            sink.rows
        })
        .collect();
    let mut rows: Vec<ResultRow> = per_task.into_iter().flatten().collect();
    if cfg.experiment == ExperimentKind::ConjectureSweep {
        let fracs: Vec<f64> = rows
            .iter()
            .filter(|r| r.metric == "support_fraction")
            .filter_map(|r| {
                let (a, b) = r.value.split_once('/')?;
                Some(a.parse::<f64>().ok()? / b.parse::<f64>().ok()?)
            })
            .collect();
        if !fracs.is_empty() {
            let limit = stationary::conjectured_limit().limit;
            rows.push(ResultRow {
                experiment: cfg.experiment.name().to_string(),
                p: 0,
                gamma: 0,
                chain: String::new(),
                metric: "mean_support_fraction".into(),
                value: format!("{:.6}", fracs.iter().sum::<f64>() / fracs.len() as f64),
                oracle: Some(format!("{limit:.6}")),
                runtime_ms: 0,
                seed: cfg.seed,
                config_hash: cfg.hash.clone(),
            });
        }
    }
    rows
}

fn chain_of(sink: &RowSink) -> Result<fpchain_core::ChainSpec, CoreError> {
    sink.task.chain.as_ref().ok_or(CoreError::InvalidArgument("task has no chain"))?.build()
}

fn pi_string(pi: &Distribution) -> String {
    match pi {
        Distribution::Exact(_) => {
            (0..pi.len()).map(|i| rational_string(&pi.ratio(i).expect("exact"))).collect::<Vec<_>>().join(" ")
        }
        Distribution::Float(v) => v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" "),
    }
}

fn stationary_task(sink: &mut RowSink) -> Result<(), CoreError> {
    let spec = chain_of(sink)?;
    let k = spec.kernel();
    let rs = stationary::recurrent_classes(&k);
    sink.push("recurrent_classes", rs.recurrent_count().to_string(), None);
    let class = rs.unique_recurrent()?.to_vec();
    sink.push("period", stationary::period(&k, &class)?.to_string(), None);
    let pi = stationary::stationary(&k)?;
    sink.push("support", ratio_string(pi.support().len() as u64, sink.task.p), None);
    let is_square = matches!(spec.map().provenance(), Provenance::Square) && spec.variant() == Variant::NonLazy;
    if is_square && sink.task.p % 4 == 3 {
        let formula = stationary::square_stationary_formula(spec.ctx(), spec.gamma())?;
        sink.push("formula_matches_exact", (formula == pi).to_string(), Some("true".into()));
    }
    sink.push("pi", pi_string(&pi), None);
    Ok(())
}

fn start_policy(cfg: &ExperimentConfig) -> StartPolicy {
    if cfg.all_starts {
        StartPolicy::All
    } else {
        StartPolicy::Default { seed: cfg.seed }
    }
}

fn mixing_task(sink: &mut RowSink) -> Result<(), CoreError> {
    let spec = chain_of(sink)?;
    let k = spec.kernel();
    let mut pi = stationary::stationary(&k)?;
    if !sink.cfg.exact_mixing {
        pi = pi.to_float();
    }
    let starts = start_policy(sink.cfg).resolve(spec.ctx(), spec.gamma());
    let r = stationary::mixing_time(&k, &pi, sink.cfg.epsilon, &starts, sink.cfg.budget)?;
    sink.push("t_mix", r.t_mix.to_string(), None);
    sink.push("final_tv", format!("{:e}", r.trajectory.last().copied().unwrap_or(f64::NAN)), None);
    sink.push("starts", starts.len().to_string(), None);
    Ok(())
}

fn conjecture_task(sink: &mut RowSink) -> Result<(), CoreError> {
    let ctx = PrimeFieldCtx::new(sink.task.p)?;
    let r = stationary::support_fraction(&ctx, sink.task.gamma)?;
    sink.push("recurrent_classes", r.recurrent_classes.to_string(), None);
    if let Some(s) = r.support {
        let limit = stationary::conjectured_limit().limit;
        sink.push("support_fraction", ratio_string(s as u64, sink.task.p), Some(format!("{limit:.6}")));
    }
    Ok(())
}

fn degree_bound(map: &TotalMap) -> Option<usize> {
    match map.provenance() {
        Provenance::Rational { map, .. } => Some(map.degree_bound()),
        _ => None,
    }
}

fn expsum_task(sink: &mut RowSink) -> Result<(), CoreError> {
    let cfg = sink.cfg;
    let ctx = PrimeFieldCtx::new(sink.task.p)?;
    let p = ctx.p();
    let table = PhaseTable::new(&ctx);
    let f = cfg.map.build(&ctx)?;
    let mut r = rng::seeded(cfg.seed ^ p);

    let mut worst = 0.0f64;
    let mut used = 0;
    for _ in 0..cfg.twists {
        let alpha = rng::below(&mut r, p);
        let k = rng::between(&mut r, 1, p - 1);
        match expsum::weil_record(&f, alpha, k, &table) {
            Ok(rec) => {
                worst = worst.max(rec.empirical_constant);
                used += 1;
            }
            Err(CoreError::ConstantPhase) => continue,
            Err(e) => return Err(e),
        }
    }
    if used > 0 {
        let oracle = degree_bound(&f).map(|d| (2 * d + 2).to_string());
        sink.push("weil_max_ratio", format!("{worst:.6}"), oracle);
    }

    let sq = TotalMap::square(&ctx);
    let mut max_rel = 0.0f64;
    let mut max_const = 0.0f64;
    for &k in &cfg.ks {
        if k % p == 0 {
            continue;
        }
        for _ in 0..cfg.intervals {
            let start = rng::below(&mut r, p);
            let len = rng::between(&mut r, 1, p) as usize;
            let v = expsum::averaged_square_sum(&sq, k, start, len, &table)?;
            let want = p as f64 * len as f64;
            max_rel = max_rel.max((v - want).abs() / want);
            max_const = max_const.max(expsum::averaged_record(&f, k, start, len, &table)?.empirical_constant);
        }
    }
    if cfg.intervals > 0 {
        sink.push("square_identity_max_rel_err", format!("{max_rel:e}"), Some("0".into()));
        sink.push("averaged_max_constant", format!("{max_const:.6}"), None);
    }
    Ok(())
}

fn cheeger_task(sink: &mut RowSink) -> Result<(), CoreError> {
    let cfg = sink.cfg;
    let spec = chain_of(sink)?;
    let k = spec.kernel();
    let pi = stationary::stationary_exact(&k)?;
    let cert = if pi.support().len() <= cfg.exact_limit {
        sink.push("h_method", "exact", None);
        par_cheeger_exact(&k, &pi, cfg.exact_limit)?
    } else {
        sink.push("h_method", "search", None);
        let fams = [
            SearchFamily::Intervals,
            SearchFamily::ApUnions { delta: 2 * spec.gamma() },
            SearchFamily::QuadraticResidues,
            SearchFamily::Random,
        ];
        cheeger::cheeger_search(&k, &pi, &fams, cfg.budget, cfg.seed)?
    };
    sink.push("h", rational_string(&cert.ratio), None);
    sink.push("h_subset_size", cert.subset.len().to_string(), None);
    let h = cert.ratio.to_f64().unwrap_or(0.0);
    for &c in &cfg.cs {
        let chk = cheeger::tv_bound_check(&k, &pi, h, c)?;
        sink.push(format!("tv_bound_steps_c{c}"), chk.steps.to_string(), None);
        sink.push(format!("tv_bound_max_tv_c{c}"), format!("{:e}", chk.max_tv), Some(format!("{:e}", chk.threshold)));
        sink.push(format!("tv_bound_passed_c{c}"), chk.passed.to_string(), Some("true".into()));
    }
    Ok(())
}
