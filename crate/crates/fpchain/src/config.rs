//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comment
//! experiment = stationary-sweep
//! primes = 7, 11, 19          # or: pmin = 3 / pmax = 499 / residue = 3mod4
//! gammas = 1, 2, 3
//! chain = chain:lazy-hold;map=inverse;gamma=1   # repeatable; gamma is overridden
//! epsilon = 0.25
//! seed = 42                   # required
//! budget = 100000
//! output_dir = out
//! formats = csv, jsonl
//! ```
//!
//! Other keys: `ks` (frequencies), `intervals` (random intervals per
//! prime), `twists` (random twists per prime), `map` (map descriptor for
//! expsum sweeps), `c` (Cheeger check constants), `exact_limit`,
//! `all_starts`, `exact_mixing` (evolve mixing sweeps in exact rationals
//! instead of `f64`).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use fpchain_core::descriptor::{ChainDescriptor, MapDescriptor};
use fpchain_core::field::{is_prime, odd_primes_in, ResidueFilter};
use sha2::{Digest, Sha256};

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    StationarySweep,
    MixingSweep,
    ConjectureSweep,
    ExpsumSweep,
    CheegerSweep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::StationarySweep => "stationary-sweep",
            ExperimentKind::MixingSweep => "mixing-sweep",
            ExperimentKind::ConjectureSweep => "conjecture-sweep",
            ExperimentKind::ExpsumSweep => "expsum-sweep",
            ExperimentKind::CheegerSweep => "cheeger-sweep",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Ok(match s {
            "stationary-sweep" => ExperimentKind::StationarySweep,
            "mixing-sweep" => ExperimentKind::MixingSweep,
            "conjecture-sweep" => ExperimentKind::ConjectureSweep,
            "expsum-sweep" => ExperimentKind::ExpsumSweep,
            "cheeger-sweep" => ExperimentKind::CheegerSweep,
            other => return Err(HarnessError::Config(format!("unknown experiment {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Jsonl => "jsonl",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(HarnessError::Config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub primes: Vec<u64>,
    pub gammas: Vec<u64>,
    pub chains: Vec<ChainDescriptor>,
    pub epsilon: f64,
    pub seed: u64,
    pub budget: usize,
    pub output_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
    pub ks: Vec<u64>,
    pub intervals: usize,
    pub twists: usize,
    pub map: MapDescriptor,
    pub cs: Vec<f64>,
    pub exact_limit: usize,
    pub all_starts: bool,
    pub exact_mixing: bool,
    /// Hex SHA-256 of the canonical key/value listing.
    pub hash: String,
}

const KNOWN: &[&str] = &[
    "experiment", "primes", "pmin", "pmax", "residue", "gammas", "chain", "epsilon", "seed", "budget",
    "output_dir", "formats", "ks", "intervals", "twists", "map", "c", "exact_limit", "all_starts",
    "exact_mixing",
];

fn cfg_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T, HarnessError> {
    v.trim().parse().map_err(|_| cfg_err(format!("bad value for {key}: {v:?}")))
}

fn parse_many<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, HarnessError> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_one(key, s)).collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut single: BTreeMap<String, String> = BTreeMap::new();
        let mut chains_raw = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| cfg_err(format!("line {}: expected key = value", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KNOWN.contains(&k) {
                return Err(cfg_err(format!("line {}: unknown key {k:?}", lineno + 1)));
            }
            if k == "chain" {
                chains_raw.push(v.to_string());
            } else if single.insert(k.to_string(), v.to_string()).is_some() {
                return Err(cfg_err(format!("line {}: duplicate key {k:?}", lineno + 1)));
            }
        }
        let get = |k: &str| single.get(k).map(String::as_str);

        let experiment: ExperimentKind = get("experiment").ok_or_else(|| cfg_err("missing experiment"))?.parse()?;
        let seed: u64 = parse_one("seed", get("seed").ok_or_else(|| cfg_err("missing seed"))?)?;
        let primes = match (get("primes"), get("pmin"), get("pmax")) {
            (Some(list), None, None) => parse_many::<u64>("primes", list)?,
            (None, Some(lo), Some(hi)) => {
                let filter = match get("residue").unwrap_or("any") {
                    "any" => ResidueFilter::Any,
                    "1mod4" => ResidueFilter::OneMod4,
                    "3mod4" => ResidueFilter::ThreeMod4,
                    other => return Err(cfg_err(format!("bad residue {other:?}"))),
                };
                odd_primes_in(parse_one("pmin", lo)?, parse_one("pmax", hi)?, filter)
            }
            (None, None, None) => Vec::new(),
            _ => return Err(cfg_err("give either primes or both pmin and pmax")),
        };
        for &p in &primes {
            if p < 3 || p % 2 == 0 || !is_prime(p) || p >= 1 << 32 {
                return Err(cfg_err(format!("{p} is not an odd prime below 2^32")));
            }
        }
        let gammas = match get("gammas") {
            Some(v) => parse_many::<u64>("gammas", v)?,
            None => vec![1],
        };
        for &p in &primes {
            for &g in &gammas {
                if g % p == 0 {
                    return Err(cfg_err(format!("gamma {g} vanishes mod {p}")));
                }
            }
        }
        let chains = chains_raw
            .iter()
            .map(|c| c.parse::<ChainDescriptor>().map_err(|e| cfg_err(format!("chain {c:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let formats = match get("formats") {
            Some(v) => parse_many::<String>("formats", v)?.iter().map(|s| s.trim().parse()).collect::<Result<_, _>>()?,
            None => vec![OutputFormat::Csv],
        };
        let map = match get("map") {
            Some(m) => m.parse().map_err(|e| cfg_err(format!("map {m:?}: {e}")))?,
            None => MapDescriptor::Inverse,
        };
        let epsilon: f64 = get("epsilon").map_or(Ok(0.25), |v| parse_one("epsilon", v))?;
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(cfg_err("epsilon must lie in (0, 1]"));
        }
        let cs: Vec<f64> = get("c").map_or(Ok(vec![1.0]), |v| parse_many("c", v))?;
        if cs.iter().any(|&c| c.is_nan() || c <= 0.0) {
            return Err(cfg_err("c must be positive"));
        }

        let mut canonical: Vec<String> = single.iter().map(|(k, v)| format!("{k}={v}")).collect();
        canonical.extend(chains_raw.iter().map(|c| format!("chain={c}")));
        let hash = hex::encode(Sha256::digest(canonical.join("\n").as_bytes()));

        Ok(ExperimentConfig {
            experiment,
            primes,
            gammas,
            chains,
            epsilon,
            seed,
            budget: get("budget").map_or(Ok(100_000), |v| parse_one("budget", v))?,
            output_dir: PathBuf::from(get("output_dir").unwrap_or("out")),
            formats,
            ks: get("ks").map_or(Ok(vec![1]), |v| parse_many("ks", v))?,
            intervals: get("intervals").map_or(Ok(10), |v| parse_one("intervals", v))?,
            twists: get("twists").map_or(Ok(10), |v| parse_one("twists", v))?,
            map,
            cs,
            exact_limit: get("exact_limit").map_or(Ok(fpchain_core::cheeger::EXACT_LIMIT), |v| parse_one("exact_limit", v))?,
            all_starts: get("all_starts").map_or(Ok(false), |v| parse_one("all_starts", v))?,
            exact_mixing: get("exact_mixing").map_or(Ok(false), |v| parse_one("exact_mixing", v))?,
            hash,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io { path: path.to_path_buf(), source: e })?;
        Self::parse(&text)
    }

    /// Applies the output directory override from `FPCHAIN_OUTPUT_DIR`.
    pub fn apply_env(&mut self) {
        if let Ok(dir) = std::env::var("FPCHAIN_OUTPUT_DIR") {
            if !dir.is_empty() {
                self.output_dir = PathBuf::from(dir);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let c = ExperimentConfig::parse("experiment = stationary-sweep\nprimes = 7, 11, 19\nseed = 1\n").unwrap();
        assert_eq!(c.primes, vec![7, 11, 19]);
        assert_eq!(c.gammas, vec![1]);
        assert_eq!(c.formats, vec![OutputFormat::Csv]);
    }

    #[test]
    fn range_with_residue_filter() {
        let c = ExperimentConfig::parse("experiment=conjecture-sweep\npmin=3\npmax=30\nresidue=1mod4\nseed=0").unwrap();
        assert_eq!(c.primes, vec![5, 13, 17, 29]);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "experiment=stationary-sweep\nprimes=7",
            "experiment=stationary-sweep\nprimes=9\nseed=1",
            "experiment=stationary-sweep\nprimes=7\ngammas=7\nseed=1",
            "experiment=nope\nseed=1",
            "experiment=stationary-sweep\nseed=1\nfoo=2",
            "experiment=stationary-sweep\nseed=1\nseed=2",
        ] {
            assert!(matches!(ExperimentConfig::parse(text), Err(HarnessError::Config(_))), "{text}");
        }
    }

    #[test]
    fn hash_ignores_comments_and_order() {
        let a = ExperimentConfig::parse("seed=1\nexperiment=stationary-sweep # x\nprimes=7").unwrap();
        let b = ExperimentConfig::parse("# header\nexperiment=stationary-sweep\nprimes=7\nseed=1").unwrap();
        let c = ExperimentConfig::parse("experiment=stationary-sweep\nprimes=11\nseed=1").unwrap();
        assert_eq!(a.hash, b.hash);
        assert_ne!(a.hash, c.hash);
    }
}
