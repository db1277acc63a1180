//! Chain definitions, exact sparse kernels and distributions over their states.
//!
//! A [`TransitionKernel`] stores every row with a shared integer denominator,
//! so `P(x, y) = weight / denom` exactly. Exact distributions use the same
//! trick: integer numerators over one common denominator.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use crate::field::PrimeFieldCtx;
use crate::map::TotalMap;
use crate::rng;
use crate::{Error, Result};

/// Which step rule the chain uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Stay with probability 1/2, otherwise move to `f(x) ± γ`.
    LazyHold,
    /// Always move to `f(x) + ε` with `ε` uniform on `{-γ, 0, γ}`.
    NoiseZero,
    /// `x ± γ`; the map is ignored.
    PureAdditive,
    /// `f(x) ± γ`, each with probability 1/2.
    NonLazy,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::LazyHold => "lazy-hold",
            Variant::NoiseZero => "noise-zero",
            Variant::PureAdditive => "pure-additive",
            Variant::NonLazy => "non-lazy",
        }
    }

    pub fn max_out_degree(self) -> usize {
        match self {
            Variant::LazyHold | Variant::NoiseZero => 3,
            Variant::PureAdditive | Variant::NonLazy => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSpec {
    map: TotalMap,
    gamma: u64,
    variant: Variant,
}

impl ChainSpec {
    pub fn new(map: TotalMap, gamma: u64, variant: Variant) -> Result<Self> {
        let gamma = map.ctx().reduce(gamma);
        if gamma == 0 {
            return Err(Error::ZeroGamma);
        }
        Ok(Self { map, gamma, variant })
    }

    /// `x ± γ` on `F_p`.
    pub fn pure_additive(ctx: &PrimeFieldCtx, gamma: u64) -> Result<Self> {
        Self::new(TotalMap::linear(ctx, 1), gamma, Variant::PureAdditive)
    }

    pub fn ctx(&self) -> &PrimeFieldCtx {
        self.map.ctx()
    }

    pub fn map(&self) -> &TotalMap {
        &self.map
    }

    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn kernel(&self) -> TransitionKernel {
        build_kernel(self)
    }
}

/// Explicit sparse kernel for `spec`, duplicate targets merged.
pub fn build_kernel(spec: &ChainSpec) -> TransitionKernel {
    let ctx = spec.ctx();
    let g = spec.gamma;
    let n = ctx.size();
    let (denom, rows): (u32, Vec<Vec<(usize, u32)>>) = match spec.variant {
        Variant::LazyHold => (
            4,
            (0..ctx.p())
                .map(|x| {
                    let fx = spec.map.apply(x);
                    vec![(x as usize, 2), (ctx.add(fx, g) as usize, 1), (ctx.sub(fx, g) as usize, 1)]
                })
                .collect(),
        ),
        Variant::NoiseZero => (
            3,
            (0..ctx.p())
                .map(|x| {
                    let fx = spec.map.apply(x);
                    vec![(ctx.sub(fx, g) as usize, 1), (fx as usize, 1), (ctx.add(fx, g) as usize, 1)]
                })
                .collect(),
        ),
        Variant::PureAdditive => (
            2,
            (0..ctx.p())
                .map(|x| vec![(ctx.add(x, g) as usize, 1), (ctx.sub(x, g) as usize, 1)])
                .collect(),
        ),
        Variant::NonLazy => (
            2,
            (0..ctx.p())
                .map(|x| {
                    let fx = spec.map.apply(x);
                    vec![(ctx.add(fx, g) as usize, 1), (ctx.sub(fx, g) as usize, 1)]
                })
                .collect(),
        ),
    };
    debug_assert_eq!(rows.len(), n);
    TransitionKernel::from_rows(denom, rows).expect("chain rows are stochastic")
}

/// Row-compressed kernel with a common denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionKernel {
    denom: u32,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<u32>,
}

/// Incoming edges of a kernel, grouped by target.
#[derive(Debug, Clone)]
pub struct InEdges {
    offsets: Vec<usize>,
    sources: Vec<u32>,
    weights: Vec<u32>,
}

impl InEdges {
    pub fn of(&self, y: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let r = self.offsets[y]..self.offsets[y + 1];
        self.sources[r.clone()].iter().zip(&self.weights[r]).map(|(&s, &w)| (s as usize, w))
    }
}

impl TransitionKernel {
    /// Builds a kernel from integer rows over `denom`. Duplicate targets are
    /// merged and zero weights dropped; every row must sum to `denom`.
    pub fn from_rows(denom: u32, rows: Vec<Vec<(usize, u32)>>) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidArgument("kernel denominator is zero"));
        }
        let n = rows.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for (x, mut row) in rows.into_iter().enumerate() {
            row.sort_unstable_by_key(|&(y, _)| y);
            let mut sum = 0u64;
            let start = targets.len();
            for (y, w) in row {
                if y >= n {
                    return Err(Error::InvalidKernel { row: x, reason: "target out of range" });
                }
                sum += w as u64;
                if w == 0 {
                    continue;
                }
                if targets.len() > start && *targets.last().unwrap() as usize == y {
                    *weights.last_mut().unwrap() += w;
                } else {
                    targets.push(y as u32);
                    weights.push(w);
                }
            }
            if sum != denom as u64 {
                return Err(Error::InvalidKernel { row: x, reason: "row does not sum to one" });
            }
            offsets.push(targets.len());
        }
        Ok(Self { denom, offsets, targets, weights })
    }

    /// Builds a kernel from rows of `(target, numerator, denominator)`.
    pub fn from_rational_rows(rows: &[Vec<(usize, u64, u64)>]) -> Result<Self> {
        let mut lcd = 1u64;
        for (x, row) in rows.iter().enumerate() {
            for &(_, _, d) in row {
                if d == 0 {
                    return Err(Error::InvalidKernel { row: x, reason: "zero denominator" });
                }
                lcd = lcd.lcm(&d);
                if lcd > u32::MAX as u64 {
                    return Err(Error::Overflow);
                }
            }
        }
        let int_rows = rows
            .iter()
            .map(|row| row.iter().map(|&(y, a, d)| (y, (a * (lcd / d)) as u32)).collect())
            .collect();
        Self::from_rows(lcd as u32, int_rows)
    }

    /// Number of states.
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    /// Positive entries of row `x` as `(target, weight)`.
    pub fn row(&self, x: usize) -> impl ExactSizeIterator<Item = (usize, u32)> + '_ {
        let r = self.offsets[x]..self.offsets[x + 1];
        self.targets[r.clone()].iter().zip(&self.weights[r]).map(|(&y, &w)| (y as usize, w))
    }

    pub fn weight(&self, x: usize, y: usize) -> u32 {
        self.row(x).find(|&(t, _)| t == y).map_or(0, |(_, w)| w)
    }

    pub fn prob(&self, x: usize, y: usize) -> Ratio<u64> {
        Ratio::new(self.weight(x, y) as u64, self.denom as u64)
    }

    /// All positive entries `(x, y, weight)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.n()).flat_map(move |x| self.row(x).map(move |(y, w)| (x, y, w)))
    }

    pub fn in_edges(&self) -> InEdges {
        let n = self.n();
        let mut counts = vec![0usize; n + 1];
        for &y in &self.targets {
            counts[y as usize + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut sources = vec![0u32; self.targets.len()];
        let mut weights = vec![0u32; self.targets.len()];
        for (x, y, w) in self.edges() {
            let slot = fill[y];
            sources[slot] = x as u32;
            weights[slot] = w;
            fill[y] += 1;
        }
        InEdges { offsets, sources, weights }
    }

    /// Whether every column also sums to one, i.e. the uniform law is
    /// stationary.
    pub fn is_doubly_stochastic(&self) -> bool {
        let mut cols = vec![0u64; self.n()];
        for (_, y, w) in self.edges() {
            cols[y] += w as u64;
        }
        cols.iter().all(|&c| c == self.denom as u64)
    }

    /// The lazy kernel `(I + P) / 2`.
    pub fn lazy(&self) -> TransitionKernel {
        let rows = (0..self.n())
            .map(|x| {
                let mut row: Vec<(usize, u32)> = self.row(x).collect();
                row.push((x, self.denom));
                row
            })
            .collect();
        TransitionKernel::from_rows(2 * self.denom, rows).expect("lazy rows are stochastic")
    }

    /// Restriction to the states marked in `keep`, which must be closed under
    /// the kernel. Returns the restricted kernel and the original label of
    /// each restricted state. Rows are not renormalized.
    pub fn restrict(&self, keep: &[bool]) -> Result<(TransitionKernel, Vec<usize>)> {
        if keep.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: keep.len() });
        }
        let labels: Vec<usize> = (0..self.n()).filter(|&x| keep[x]).collect();
        let mut local = vec![usize::MAX; self.n()];
        for (i, &x) in labels.iter().enumerate() {
            local[x] = i;
        }
        let mut rows = Vec::with_capacity(labels.len());
        for &x in &labels {
            let mut row = Vec::new();
            for (y, w) in self.row(x) {
                if !keep[y] {
                    return Err(Error::NotClosed(x));
                }
                row.push((local[y], w));
            }
            rows.push(row);
        }
        Ok((TransitionKernel::from_rows(self.denom, rows)?, labels))
    }
}

/// A probability vector over kernel states.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Exact(ExactDist),
    Float(Vec<f64>),
}

/// Integer numerators over a shared denominator; the numerators sum to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDist {
    num: Vec<BigUint>,
    den: BigUint,
}

impl ExactDist {
    pub fn new(num: Vec<BigUint>, den: BigUint) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator"));
        }
        let total: BigUint = num.iter().sum();
        if total != den {
            return Err(Error::InvalidArgument("weights do not sum to one"));
        }
        let mut d = Self { num, den };
        d.reduce();
        Ok(d)
    }

    /// From small integer weights, normalized by their sum.
    pub fn from_weights(weights: &[u64]) -> Result<Self> {
        let num: Vec<BigUint> = weights.iter().map(|&w| BigUint::from(w)).collect();
        let den = num.iter().sum();
        Self::new(num, den)
    }

    pub fn from_ratios(values: &[BigRational]) -> Result<Self> {
        let mut lcd = BigInt::one();
        for v in values {
            if v.is_negative_ratio() {
                return Err(Error::InvalidArgument("negative probability"));
            }
            lcd = lcd.lcm(v.denom());
        }
        let num = values
            .iter()
            .map(|v| (v.numer() * (&lcd / v.denom())).to_biguint().expect("non-negative"))
            .collect();
        Self::new(num, lcd.to_biguint().expect("positive"))
    }

    fn reduce(&mut self) {
        let mut g = self.den.clone();
        for v in &self.num {
            if g.is_one() {
                return;
            }
            g = g.gcd(v);
        }
        if !g.is_one() {
            for v in &mut self.num {
                *v /= &g;
            }
            self.den /= &g;
        }
    }

    pub fn numerators(&self) -> &[BigUint] {
        &self.num
    }

    pub fn denominator(&self) -> &BigUint {
        &self.den
    }

    pub fn ratio(&self, i: usize) -> BigRational {
        BigRational::new(BigInt::from(self.num[i].clone()), BigInt::from(self.den.clone()))
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        let den = BigInt::from(self.den.clone());
        self.num
            .iter()
            .map(|v| {
                BigRational::new(BigInt::from(v.clone()), den.clone())
                    .to_f64()
                    .expect("finite probability")
            })
            .collect()
    }
}

trait NegativeRatio {
    fn is_negative_ratio(&self) -> bool;
}

impl NegativeRatio for BigRational {
    fn is_negative_ratio(&self) -> bool {
        self < &BigRational::zero()
    }
}

impl Distribution {
    pub fn point_mass(n: usize, x: usize, exact: bool) -> Self {
        if exact {
            let mut num = vec![BigUint::zero(); n];
            num[x] = BigUint::one();
            Distribution::Exact(ExactDist { num, den: BigUint::one() })
        } else {
            let mut v = vec![0.0; n];
            v[x] = 1.0;
            Distribution::Float(v)
        }
    }

    pub fn uniform(n: usize, exact: bool) -> Self {
        if exact {
            Distribution::Exact(ExactDist { num: vec![BigUint::one(); n], den: BigUint::from(n) })
        } else {
            Distribution::Float(vec![1.0 / n as f64; n])
        }
    }

    /// Float probabilities; checks non-negativity and `|sum - 1| ≤ 1e-9`.
    pub fn from_floats(v: Vec<f64>) -> Result<Self> {
        let s: f64 = v.iter().sum();
        if v.iter().any(|&x| x.is_nan() || x < 0.0) || (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("not a probability vector"));
        }
        Ok(Distribution::Float(v))
    }

    pub fn len(&self) -> usize {
        match self {
            Distribution::Exact(d) => d.num.len(),
            Distribution::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Distribution::Exact(_))
    }

    pub fn exact(&self) -> Option<&ExactDist> {
        match self {
            Distribution::Exact(d) => Some(d),
            Distribution::Float(_) => None,
        }
    }

    pub fn ratio(&self, i: usize) -> Option<BigRational> {
        self.exact().map(|d| d.ratio(i))
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        match self {
            Distribution::Exact(d) => d.to_f64s(),
            Distribution::Float(v) => v.clone(),
        }
    }

    pub fn to_float(&self) -> Distribution {
        Distribution::Float(self.to_f64s())
    }

    /// States with positive mass.
    pub fn support(&self) -> Vec<usize> {
        match self {
            Distribution::Exact(d) => (0..d.num.len()).filter(|&i| !d.num[i].is_zero()).collect(),
            Distribution::Float(v) => (0..v.len()).filter(|&i| v[i] > 0.0).collect(),
        }
    }
}

/// Upper bound on the float drift of the total mass in one step, before
/// renormalization: `n · 2^-50`.
pub fn float_drift_bound(n: usize) -> f64 {
    n as f64 * libm::ldexp(1.0, -50)
}

/// One application of the kernel, `dist · P`, in the distribution's own mode.
pub fn step_distribution(kernel: &TransitionKernel, dist: &Distribution) -> Result<Distribution> {
    if dist.len() != kernel.n() {
        return Err(Error::LengthMismatch { expected: kernel.n(), got: dist.len() });
    }
    Ok(match dist {
        Distribution::Exact(d) => {
            let mut next = step_unreduced(kernel, d);
            next.reduce();
            Distribution::Exact(next)
        }
        Distribution::Float(v) => Distribution::Float(step_float(kernel, v)),
    })
}

/// [`step_distribution`] with exact results left unreduced.
pub(crate) fn step_raw(kernel: &TransitionKernel, dist: &Distribution) -> Result<Distribution> {
    match dist {
        Distribution::Exact(d) if d.num.len() == kernel.n() => Ok(Distribution::Exact(step_unreduced(kernel, d))),
        _ => step_distribution(kernel, dist),
    }
}

/// Like [`step_distribution`] but refuses float input.
pub fn step_exact(kernel: &TransitionKernel, dist: &Distribution) -> Result<Distribution> {
    match dist {
        Distribution::Exact(_) => step_distribution(kernel, dist),
        Distribution::Float(_) => Err(Error::ModeMismatch),
    }
}

/// `d · P` without dividing out common factors. Long trajectories only ever
/// compare distributions by cross-multiplication, so they skip the gcd.
pub(crate) fn step_unreduced(kernel: &TransitionKernel, d: &ExactDist) -> ExactDist {
    let mut num = vec![BigUint::zero(); kernel.n()];
    for (x, v) in d.num.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        for (y, w) in kernel.row(x) {
            if w == 1 {
                num[y] += v;
            } else {
                num[y] += v * w;
            }
        }
    }
    ExactDist { num, den: &d.den * kernel.denom() }
}

pub(crate) fn step_float(kernel: &TransitionKernel, v: &[f64]) -> Vec<f64> {
    let scale = 1.0 / kernel.denom() as f64;
    let mut out = vec![0.0; v.len()];
    for (x, &mass) in v.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        for (y, w) in kernel.row(x) {
            out[y] += mass * (w as f64 * scale);
        }
    }
    let total: f64 = out.iter().sum();
    debug_assert!(
        (total - v.iter().sum::<f64>()).abs() <= float_drift_bound(v.len()).max(1e-15),
        "float drift above bound"
    );
    for m in &mut out {
        *m /= total;
    }
    out
}

/// `(1/2) Σ |a_i - b_i|`. Exact inputs are compared exactly, then rounded.
pub fn tv_distance(a: &Distribution, b: &Distribution) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), got: b.len() });
    }
    if let (Some(x), Some(y)) = (a.exact(), b.exact()) {
        let (num, den) = tv_parts(x, y);
        return Ok(Ratio::new_raw(BigInt::from(num), BigInt::from(den)).to_f64().expect("finite"));
    }
    let (va, vb) = (a.to_f64s(), b.to_f64s());
    Ok(tv_float(&va, &vb))
}

pub(crate) fn tv_float(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Exact total variation distance between two exact distributions.
pub fn tv_exact(a: &Distribution, b: &Distribution) -> Result<BigRational> {
    let (Some(a), Some(b)) = (a.exact(), b.exact()) else {
        return Err(Error::ModeMismatch);
    };
    if a.num.len() != b.num.len() {
        return Err(Error::LengthMismatch { expected: a.num.len(), got: b.num.len() });
    }
    let (num, den) = tv_parts(a, b);
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

fn tv_parts(a: &ExactDist, b: &ExactDist) -> (BigUint, BigUint) {
    let mut total = BigUint::zero();
    for (x, y) in a.num.iter().zip(&b.num) {
        let l = x * &b.den;
        let r = y * &a.den;
        total += if l >= r { l - r } else { r - l };
    }
    (total, BigUint::from(2u32) * &a.den * &b.den)
}

/// Seeded trajectory of `n` steps starting at `x0`; length `n + 1`.
pub fn sample_path(kernel: &TransitionKernel, x0: usize, n: usize, seed: u64) -> Result<Vec<usize>> {
    if x0 >= kernel.n() {
        return Err(Error::StateOutOfRange(x0 as u64));
    }
    let mut rng = rng::seeded(seed);
    let mut path = Vec::with_capacity(n + 1);
    let mut x = x0;
    path.push(x);
    for _ in 0..n {
        let mut r = rng::below(&mut rng, kernel.denom() as u64) as u32;
        let mut next = x;
        for (y, w) in kernel.row(x) {
            if r < w {
                next = y;
                break;
            }
            r -= w;
        }
        x = next;
        path.push(x);
    }
    Ok(path)
}

impl ChainSpec {
    pub fn sample_path(&self, x0: u64, n: usize, seed: u64) -> Result<Vec<u64>> {
        let path = sample_path(&self.kernel(), x0 as usize, n, seed)?;
        Ok(path.into_iter().map(|x| x as u64).collect())
    }
}

/// Above this size the default start policy samples instead of using every
/// state.
pub const ALL_STARTS_LIMIT: usize = 2000;
/// Seeded random starts added by the default policy on large fields.
pub const RANDOM_STARTS: usize = 16;

/// Which initial states the worst-case mixing quantities range over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StartPolicy {
    /// Every state when `p ≤ 2000`, otherwise `{0, 1, γ^{-1}, p - 1}` plus
    /// sixteen seeded random states.
    Default { seed: u64 },
    /// `{0, 1, γ^{-1}, p - 1}` plus sixteen seeded random states, at any size.
    Sampled { seed: u64 },
    /// Every state.
    All,
    Explicit(Vec<usize>),
}

impl StartPolicy {
    pub fn resolve(&self, ctx: &PrimeFieldCtx, gamma: u64) -> Vec<usize> {
        let p = ctx.size();
        match self {
            StartPolicy::All => (0..p).collect(),
            StartPolicy::Explicit(v) => v.clone(),
            StartPolicy::Default { .. } if p <= ALL_STARTS_LIMIT => (0..p).collect(),
            StartPolicy::Default { seed } | StartPolicy::Sampled { seed } => {
                let mut starts = Vec::new();
                let inv = ctx.inv(gamma).unwrap_or(1);
                for x in [0, 1, inv, ctx.p() - 1] {
                    if !starts.contains(&(x as usize)) {
                        starts.push(x as usize);
                    }
                }
                let mut r = rng::seeded(*seed);
                let want = RANDOM_STARTS.min(p - starts.len());
                let mut added = 0;
                while added < want {
                    let x = rng::below(&mut r, ctx.p()) as usize;
                    if !starts.contains(&x) {
                        starts.push(x);
                        added += 1;
                    }
                }
                starts
            }
        }
    }
}
