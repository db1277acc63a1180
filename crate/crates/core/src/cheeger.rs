//! Cheeger constants: exact boundary flows, exhaustive minimization over
//! subsets of the support, structured upper-bound search, and the
//! Cheeger-to-total-variation step bound.
//!
//! All flows are exact. With `π = w / W` and `P = n / D` the flow out of `S`
//! is `Σ_{x∈S, y∉S} w_x n_xy / (W D)`, so the ratio against
//! `min(π(S), π(Sᶜ))` is `flow_units / (D · min_mass)` and comparisons are
//! done by integer cross-multiplication.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::kernel::{Distribution, TransitionKernel};
use crate::rng;
use crate::stationary;
use crate::{Error, Result};

/// A subset with its exact boundary flow and ratio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetCertificate {
    /// Sorted state labels.
    pub subset: Vec<usize>,
    pub flow: BigRational,
    pub ratio: BigRational,
    /// Number of directed edges from `S` to `Sᶜ`.
    pub edge_count: u64,
}

fn exact(pi: &Distribution) -> Result<&crate::kernel::ExactDist> {
    pi.exact().ok_or(Error::ModeMismatch)
}

/// `Σ_{x∈S, y∉S} π(x)P(x,y)` and its ratio to `min(π(S), π(Sᶜ))`.
pub fn boundary_flow(k: &TransitionKernel, pi: &Distribution, set: &[bool]) -> Result<(BigRational, BigRational)> {
    let e = exact(pi)?;
    if set.len() != k.n() || pi.len() != k.n() {
        return Err(Error::LengthMismatch { expected: k.n(), got: set.len() });
    }
    let mut flow = BigInt::zero();
    let mut mass = BigInt::zero();
    for x in 0..k.n() {
        if !set[x] {
            continue;
        }
        let w = BigInt::from(e.numerators()[x].clone());
        mass += &w;
        for (y, n) in k.row(x) {
            if !set[y] {
                flow += &w * n;
            }
        }
    }
    let total = BigInt::from(e.denominator().clone());
    if mass.is_zero() || mass == total {
        return Err(Error::TrivialSubset);
    }
    let d = BigInt::from(k.denom());
    let min = if &mass * 2 <= total { mass.clone() } else { &total - &mass };
    let ratio = BigRational::new(flow.clone(), &d * min);
    Ok((BigRational::new(flow, total * d), ratio))
}

/// Directed edges `x -> y` with `x ≠ y` leaving `set`, and entering it.
pub fn crossing_edges(k: &TransitionKernel, set: &[bool]) -> (u64, u64) {
    let (mut out, mut inn) = (0, 0);
    for (x, y, _) in k.edges() {
        if x == y || set[x] == set[y] {
            continue;
        }
        if set[x] {
            out += 1;
        } else {
            inn += 1;
        }
    }
    (out, inn)
}

/// Integer data for fast exact flow evaluation on `supp π`.
#[derive(Debug, Clone)]
pub struct CheegerProblem {
    states: Vec<usize>,
    weights: Vec<u64>,
    total: u64,
    denom: u64,
    out: Vec<Vec<(usize, u64)>>,
    inn: Vec<Vec<(usize, u64)>>,
}

/// `W · D` must stay below this so flows and cross products fit in `u128`.
const MAX_SCALE: u64 = 1 << 60;

impl CheegerProblem {
    /// Requires an exact `π` whose support is closed under `k`.
    pub fn new(k: &TransitionKernel, pi: &Distribution) -> Result<Self> {
        let e = exact(pi)?;
        if pi.len() != k.n() {
            return Err(Error::LengthMismatch { expected: k.n(), got: pi.len() });
        }
        let total = e.denominator().to_u64().ok_or(Error::Overflow)?;
        let denom = k.denom() as u64;
        if total.checked_mul(denom).is_none_or(|v| v > MAX_SCALE) {
            return Err(Error::Overflow);
        }
        let states = pi.support();
        let mut local = vec![usize::MAX; k.n()];
        for (i, &x) in states.iter().enumerate() {
            local[x] = i;
        }
        let weights: Vec<u64> = states.iter().map(|&x| e.numerators()[x].to_u64().expect("below W")).collect();
        let mut out = vec![Vec::new(); states.len()];
        let mut inn = vec![Vec::new(); states.len()];
        for (i, &x) in states.iter().enumerate() {
            for (y, n) in k.row(x) {
                if local[y] == usize::MAX {
                    return Err(Error::NotClosed(x));
                }
                if y != x {
                    let a = weights[i] * n as u64;
                    out[i].push((local[y], a));
                    inn[local[y]].push((i, a));
                }
            }
        }
        Ok(Self { states, weights, total, denom, out, inn })
    }

    /// Support states, ascending; local index `i` is `states()[i]`.
    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn size(&self) -> usize {
        self.states.len()
    }

    /// Flow units and mass of a local subset.
    fn evaluate(&self, mask: &[bool]) -> (u64, u64) {
        let mut flow = 0;
        let mut mass = 0;
        for i in 0..self.size() {
            if mask[i] {
                mass += self.weights[i];
                flow += self.out[i].iter().filter(|&&(j, _)| !mask[j]).map(|&(_, a)| a).sum::<u64>();
            }
        }
        (flow, mass)
    }

    fn score(&self, flow: u64, mass: u64) -> Score {
        Score { flow, min_mass: mass.min(self.total - mass) }
    }

    fn certificate(&self, local: &[usize]) -> SubsetCertificate {
        let mut mask = vec![false; self.size()];
        for &i in local {
            mask[i] = true;
        }
        let (flow, mass) = self.evaluate(&mask);
        let s = self.score(flow, mass);
        let edge_count = local
            .iter()
            .map(|&i| self.out[i].iter().filter(|&&(j, _)| !mask[j]).count() as u64)
            .sum();
        SubsetCertificate {
            subset: local.iter().map(|&i| self.states[i]).collect(),
            flow: BigRational::new(BigInt::from(flow), BigInt::from(self.total) * BigInt::from(self.denom)),
            ratio: BigRational::new(BigInt::from(flow), BigInt::from(s.min_mass) * BigInt::from(self.denom)),
            edge_count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Score {
    flow: u64,
    min_mass: u64,
}

impl Score {
    fn cmp_ratio(&self, other: &Score) -> Ordering {
        (self.flow as u128 * other.min_mass as u128).cmp(&(other.flow as u128 * self.min_mass as u128))
    }
}

/// Best subset found in a scan, as a bit mask over local states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaskBest {
    score: Score,
    pub mask: u64,
}

/// Whether `a` is lexicographically smaller than `b` as sorted index lists.
fn mask_lex_less(a: u64, b: u64) -> bool {
    if a == b {
        return false;
    }
    let i = (a ^ b).trailing_zeros();
    if a >> i & 1 == 1 {
        (b >> i) >> 1 != 0
    } else {
        (a >> i) >> 1 == 0
    }
}

impl MaskBest {
    fn better_than(&self, other: &MaskBest) -> bool {
        match self.score.cmp_ratio(&other.score) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => mask_lex_less(self.mask, other.mask),
        }
    }
}

/// Deterministic merge of partial scan results.
pub fn merge_best(a: Option<MaskBest>, b: Option<MaskBest>) -> Option<MaskBest> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.better_than(&x) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Incremental flow and mass of a subset under single-state toggles.
struct FlowTracker<'a> {
    prob: &'a CheegerProblem,
    in_set: Vec<bool>,
    flow: u64,
    mass: u64,
}

impl<'a> FlowTracker<'a> {
    fn new(prob: &'a CheegerProblem) -> Self {
        Self { prob, in_set: vec![false; prob.size()], flow: 0, mass: 0 }
    }

    fn toggle(&mut self, x: usize) {
        let (out, inn) = (&self.prob.out[x], &self.prob.inn[x]);
        if self.in_set[x] {
            for &(y, a) in inn {
                if self.in_set[y] {
                    self.flow += a;
                }
            }
            for &(y, a) in out {
                if !self.in_set[y] {
                    self.flow -= a;
                }
            }
            self.in_set[x] = false;
            self.mass -= self.prob.weights[x];
        } else {
            for &(y, a) in out {
                if !self.in_set[y] {
                    self.flow += a;
                }
            }
            for &(y, a) in inn {
                if self.in_set[y] {
                    self.flow -= a;
                }
            }
            self.in_set[x] = true;
            self.mass += self.prob.weights[x];
        }
    }
}

/// Bits of the subset mask fixed per chunk.
pub const CHUNK_BITS: usize = 8;

/// Number of chunks the exhaustive scan is split into.
pub fn chunk_count(prob: &CheegerProblem) -> usize {
    1 << prob.size().min(CHUNK_BITS)
}

/// Exhaustive Gray-code scan over the subsets whose top bits equal `chunk`.
pub fn scan_chunk(prob: &CheegerProblem, chunk: usize) -> Option<MaskBest> {
    let m = prob.size();
    let top = m.min(CHUNK_BITS);
    let low = m - top;
    let full: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut t = FlowTracker::new(prob);
    let mut mask = (chunk as u64) << low;
    for b in low..m {
        if mask >> b & 1 == 1 {
            t.toggle(b);
        }
    }
    let mut best: Option<MaskBest> = None;
    let mut consider = |t: &FlowTracker, mask: u64| {
        if mask == 0 || mask == full {
            return;
        }
        let cand = MaskBest { score: prob.score(t.flow, t.mass), mask };
        if best.as_ref().is_none_or(|b| cand.better_than(b)) {
            best = Some(cand);
        }
    };
    consider(&t, mask);
    for i in 1u64..(1u64 << low) {
        let bit = i.trailing_zeros() as usize;
        t.toggle(bit);
        mask ^= 1 << bit;
        consider(&t, mask);
    }
    best
}

/// Certificate for a scan result.
pub fn certificate_for(prob: &CheegerProblem, best: &MaskBest) -> SubsetCertificate {
    let local: Vec<usize> = (0..prob.size()).filter(|&i| best.mask >> i & 1 == 1).collect();
    prob.certificate(&local)
}

/// Default cap on the support size for exhaustive search.
pub const EXACT_LIMIT: usize = 22;

/// Exact `h(P)` by exhaustive search over the non-trivial subsets of
/// `supp π`. Ties go to the lexicographically smallest sorted subset.
pub fn cheeger_exact(k: &TransitionKernel, pi: &Distribution, limit: usize) -> Result<SubsetCertificate> {
    let prob = CheegerProblem::new(k, pi)?;
    let m = prob.size();
    if m > limit.min(63) {
        return Err(Error::TooLarge { size: m, limit: limit.min(63) });
    }
    let best = (0..chunk_count(&prob)).map(|c| scan_chunk(&prob, c)).fold(None, merge_best);
    best.map(|b| certificate_for(&prob, &b)).ok_or(Error::TrivialSubset)
}

/// Candidate families for [`cheeger_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchFamily {
    /// Cyclic intervals `{a, …, a + len - 1}`.
    Intervals,
    /// Unions of up to four random progressions with difference `delta`.
    ApUnions { delta: u64 },
    /// Squares, non-squares, and their translates.
    QuadraticResidues,
    /// Each state independently with probability 1/2.
    Random,
}

impl SearchFamily {
    pub fn name(self) -> &'static str {
        match self {
            SearchFamily::Intervals => "intervals",
            SearchFamily::ApUnions { .. } => "ap-unions",
            SearchFamily::QuadraticResidues => "quadratic-residues",
            SearchFamily::Random => "random",
        }
    }
}

struct SearchBest {
    score: Score,
    local: Vec<usize>,
}

/// Smallest ratio over up to `budget` candidates from each family; an upper
/// bound on `h(P)`. Deterministic given `seed`.
pub fn cheeger_search(
    k: &TransitionKernel,
    pi: &Distribution,
    families: &[SearchFamily],
    budget: usize,
    seed: u64,
) -> Result<SubsetCertificate> {
    let prob = CheegerProblem::new(k, pi)?;
    let n = k.n();
    let mut local_of = vec![usize::MAX; n];
    for (i, &x) in prob.states().iter().enumerate() {
        local_of[x] = i;
    }
    let mut best: Option<SearchBest> = None;
    let mut mask = vec![false; prob.size()];
    let mut consider = |set: &mut dyn Iterator<Item = usize>| {
        mask.iter_mut().for_each(|b| *b = false);
        for x in set {
            let i = local_of[x % n];
            if i != usize::MAX {
                mask[i] = true;
            }
        }
        let (flow, mass) = prob.evaluate(&mask);
        if mass == 0 || mass == prob.total {
            return;
        }
        let score = prob.score(flow, mass);
        let local: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        let better = match &best {
            None => true,
            Some(b) => match score.cmp_ratio(&b.score) {
                Ordering::Less => true,
                Ordering::Equal => local < b.local,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some(SearchBest { score, local });
        }
    };
    for (fi, fam) in families.iter().enumerate() {
        let mut r = rng::seeded(seed ^ (fi as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut used = 0;
        match *fam {
            SearchFamily::Intervals => {
                'outer: for len in 1..n {
                    for a in 0..n {
                        if used == budget {
                            break 'outer;
                        }
                        used += 1;
                        consider(&mut (a..a + len));
                    }
                }
            }
            SearchFamily::ApUnions { delta } => {
                let delta = delta as usize % n;
                if delta == 0 {
                    return Err(Error::InvalidArgument("progression difference is zero"));
                }
                while used < budget {
                    used += 1;
                    let j = rng::between(&mut r, 1, 4);
                    let mut set = Vec::new();
                    for _ in 0..j {
                        let start = rng::below(&mut r, n as u64) as usize;
                        let len = rng::between(&mut r, 1, (n as u64 / 2).max(1)) as usize;
                        set.extend((0..len).map(|i| (start + i * delta) % n));
                    }
                    consider(&mut set.into_iter());
                }
            }
            SearchFamily::QuadraticResidues => {
                let mut sq = vec![false; n];
                for b in 1..n {
                    sq[b * b % n] = true;
                }
                let residues: Vec<usize> = (1..n).filter(|&x| sq[x]).collect();
                let non: Vec<usize> = (1..n).filter(|&x| !sq[x]).collect();
                let base = [
                    residues.clone(),
                    [vec![0], residues.clone()].concat(),
                    non.clone(),
                    [vec![0], non].concat(),
                ];
                for set in base.iter() {
                    if used == budget {
                        break;
                    }
                    used += 1;
                    consider(&mut set.iter().copied());
                }
                for t in 1..n {
                    if used == budget {
                        break;
                    }
                    used += 1;
                    consider(&mut residues.iter().map(|&x| x + t));
                }
            }
            SearchFamily::Random => {
                while used < budget {
                    used += 1;
                    let set: Vec<usize> = (0..n).filter(|_| rng::below(&mut r, 2) == 1).collect();
                    consider(&mut set.into_iter());
                }
            }
        }
    }
    best.map(|b| prob.certificate(&b.local)).ok_or(Error::TrivialSubset)
}

/// `⌈4 h⁻² (max_x log π(x)⁻¹ + 2c)⌉`.
pub fn cheeger_tv_bound(h: f64, max_log_inv_pi: f64, c: f64) -> Result<u64> {
    if h.is_nan() || h <= 0.0 || c.is_nan() || c <= 0.0 || !max_log_inv_pi.is_finite() {
        return Err(Error::InvalidArgument("needs h > 0 and c > 0"));
    }
    Ok(libm::ceil(4.0 / (h * h) * (max_log_inv_pi + 2.0 * c)) as u64)
}

/// `max log(1/π(x))` over `supp π`.
pub fn max_log_inv_pi(pi: &Distribution) -> f64 {
    pi.to_f64s().into_iter().filter(|&v| v > 0.0).map(|v| -libm::log(v)).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TvBoundCheck {
    pub steps: u64,
    pub max_tv: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Step count above which the check evolves in floating point.
pub const EXACT_CHECK_STEPS: u64 = 3000;

/// Runs `(I + P)/2` for the bound's step count from every state of
/// `supp π` and compares the worst distance to `e^{-c}`.
pub fn tv_bound_check(k: &TransitionKernel, pi: &Distribution, h: f64, c: f64) -> Result<TvBoundCheck> {
    let steps = cheeger_tv_bound(h, max_log_inv_pi(pi), c)?;
    let lazy = k.lazy();
    let starts = pi.support();
    let target = if steps <= EXACT_CHECK_STEPS { pi.clone() } else { pi.to_float() };
    let max_tv = stationary::tv_after(&lazy, &target, &starts, steps as usize)?;
    let threshold = libm::exp(-c);
    Ok(TvBoundCheck { steps, max_tv, threshold, passed: max_tv <= threshold })
}
