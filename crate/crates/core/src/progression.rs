//! Arithmetic progressions in `F_p` and minimal decompositions of sets into
//! progressions with a fixed difference.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::PrimeFieldCtx;
use crate::{Error, Result};

/// `{start, start + δ, …, start + (len - 1)δ}`; the difference is held by the
/// owning family or decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Progression {
    pub start: u64,
    pub len: usize,
}

impl Progression {
    pub fn new(start: u64, len: usize) -> Self {
        Self { start, len }
    }

    pub fn elements<'a>(&self, ctx: &'a PrimeFieldCtx, delta: u64) -> impl Iterator<Item = u64> + 'a {
        let (start, delta) = (self.start, ctx.reduce(delta));
        (0..self.len as u64).map(move |i| ctx.add(start, ctx.mul(i % ctx.p(), delta)))
    }

    pub fn last(&self, ctx: &PrimeFieldCtx, delta: u64) -> u64 {
        ctx.add(self.start, ctx.mul((self.len as u64).saturating_sub(1) % ctx.p(), ctx.reduce(delta)))
    }
}

/// Pairwise disjoint progressions with a common non-zero difference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct APFamily {
    ctx: PrimeFieldCtx,
    delta: u64,
    progs: Vec<Progression>,
}

impl APFamily {
    /// Checks that `delta ≠ 0`, every length is in `1..=p` and no element is
    /// covered twice.
    pub fn new(ctx: &PrimeFieldCtx, delta: u64, progs: Vec<Progression>) -> Result<Self> {
        let delta = ctx.reduce(delta);
        if delta == 0 {
            return Err(Error::InvalidArgument("progression difference is zero"));
        }
        let mut seen = vec![false; ctx.size()];
        for pr in &progs {
            if pr.len == 0 || pr.len > ctx.size() {
                return Err(Error::InvalidArgument("progression length outside 1..=p"));
            }
            for x in pr.elements(ctx, delta) {
                if core::mem::replace(&mut seen[x as usize], true) {
                    return Err(Error::Overlapping(x));
                }
            }
        }
        Ok(Self { ctx: *ctx, delta, progs })
    }

    pub fn ctx(&self) -> &PrimeFieldCtx {
        &self.ctx
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn progressions(&self) -> &[Progression] {
        &self.progs
    }

    /// Number of progressions.
    pub fn j(&self) -> usize {
        self.progs.len()
    }

    pub fn total_len(&self) -> usize {
        self.progs.iter().map(|p| p.len).sum()
    }

    /// The shared length, or [`Error::UnequalLengths`].
    pub fn common_len(&self) -> Result<usize> {
        let l = self.progs.first().map_or(0, |p| p.len);
        if self.progs.iter().all(|p| p.len == l) && l > 0 {
            Ok(l)
        } else {
            Err(Error::UnequalLengths)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        self.progs.iter().flat_map(move |p| p.elements(&self.ctx, self.delta))
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.ctx.size()];
        for x in self.elements() {
            m[x as usize] = true;
        }
        m
    }
}

/// Minimal decomposition of a set into progressions with difference `delta`.
///
/// For plain decompositions the blocks are the progressions themselves. For
/// symmetric ones each block is a progression `J` inside `{0, …, (p-1)/2}`
/// and stands for `supp ∩ (J ∪ -J)`; `support` then holds the mask of `supp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct APDecomposition {
    pub delta: u64,
    pub blocks: Vec<Progression>,
    pub symmetric: bool,
    pub support: Option<Vec<bool>>,
}

impl APDecomposition {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Elements of every block, as subsets of `F_p`.
    pub fn block_sets(&self, ctx: &PrimeFieldCtx) -> Vec<Vec<u64>> {
        self.blocks
            .iter()
            .map(|b| {
                let mut out: Vec<u64> = b.elements(ctx, self.delta).collect();
                if let Some(supp) = &self.support {
                    let mut both: Vec<u64> = out.iter().flat_map(|&x| [x, ctx.neg(x)]).collect();
                    both.sort_unstable();
                    both.dedup();
                    out = both.into_iter().filter(|&x| supp[x as usize]).collect();
                }
                out
            })
            .collect()
    }

    /// Total number of elements of the decomposed set.
    pub fn covered(&self, ctx: &PrimeFieldCtx) -> usize {
        self.block_sets(ctx).iter().map(Vec::len).sum()
    }
}

fn check_mask(ctx: &PrimeFieldCtx, mask: &[bool]) -> Result<()> {
    if mask.len() != ctx.size() {
        return Err(Error::LengthMismatch { expected: ctx.size(), got: mask.len() });
    }
    Ok(())
}

/// Maximal runs of `set` along the cycle `x -> x + delta`, sorted by start.
/// The full field is one block of length `p` starting at 0.
pub fn ap_decompose(ctx: &PrimeFieldCtx, set: &[bool], delta: u64) -> Result<APDecomposition> {
    check_mask(ctx, set)?;
    let delta = ctx.reduce(delta);
    if delta == 0 {
        return Err(Error::InvalidArgument("progression difference is zero"));
    }
    let mut blocks = Vec::new();
    if set.iter().all(|&b| b) {
        blocks.push(Progression::new(0, ctx.size()));
    } else {
        for x in 0..ctx.p() {
            if !set[x as usize] || set[ctx.sub(x, delta) as usize] {
                continue;
            }
            let mut len = 1;
            let mut y = ctx.add(x, delta);
            while set[y as usize] {
                len += 1;
                y = ctx.add(y, delta);
            }
            blocks.push(Progression::new(x, len));
        }
    }
    Ok(APDecomposition { delta, blocks, symmetric: false, support: None })
}

/// Minimal decomposition of a symmetric `set ⊆ supp` into pieces
/// `supp ∩ (J ∪ -J)`, with each `J` a progression inside `{0, …, (p-1)/2}`.
///
/// A point `x` of the half range may lie in some `J` exactly when `±x` meet
/// `supp` only inside `set`. Points with `±x` outside `supp` can therefore
/// bridge two pieces. Each returned `J` is trimmed to its first and last
/// point that meets `set`.
pub fn symmetric_ap_decompose(ctx: &PrimeFieldCtx, set: &[bool], delta: u64, supp: &[bool]) -> Result<APDecomposition> {
    check_mask(ctx, set)?;
    check_mask(ctx, supp)?;
    let delta = ctx.reduce(delta);
    if delta == 0 {
        return Err(Error::InvalidArgument("progression difference is zero"));
    }
    for x in 0..ctx.p() {
        if set[x as usize] && !supp[x as usize] {
            return Err(Error::InvalidArgument("set is not inside the support"));
        }
        let nx = ctx.neg(x) as usize;
        if set[x as usize] && supp[nx] && !set[nx] {
            return Err(Error::NotSymmetric(x));
        }
    }
    let half = (ctx.p() - 1) / 2;
    let in_half = |x: u64| x <= half;
    let hits = |x: u64| set[x as usize] || set[ctx.neg(x) as usize];
    let allowed = |x: u64| {
        let (a, b) = (x as usize, ctx.neg(x) as usize);
        !(supp[a] && !set[a]) && !(supp[b] && !set[b])
    };
    let mut blocks = Vec::new();
    for x in 0..=half {
        // Path heads: predecessor missing from the half range or not allowed.
        let prev = ctx.sub(x, delta);
        if !allowed(x) || (in_half(prev) && allowed(prev)) {
            continue;
        }
        let mut run = Vec::new();
        let mut y = x;
        while in_half(y) && allowed(y) {
            run.push(y);
            y = ctx.add(y, delta);
        }
        let first = run.iter().position(|&v| hits(v));
        let last = run.iter().rposition(|&v| hits(v));
        if let (Some(a), Some(b)) = (first, last) {
            blocks.push(Progression::new(run[a], b - a + 1));
        }
    }
    blocks.sort_unstable();
    Ok(APDecomposition { delta, blocks, symmetric: true, support: Some(supp.to_vec()) })
}

/// Number of maximal paths of `x -> x + delta` inside `{0, …, (p-1)/2}`.
pub fn half_range_paths(ctx: &PrimeFieldCtx, delta: u64) -> usize {
    let half = (ctx.p() - 1) / 2;
    (0..=half).filter(|&x| ctx.sub(x, ctx.reduce(delta)) > half).count()
}

/// Splits the long blocks of `dec` into pieces of length `⌊L/4⌋`, where
/// `L = |S| / target` is the average block length over `target` blocks.
/// Blocks of length at least `L/2` are cut greedily from their start.
pub fn equalize_lengths(ctx: &PrimeFieldCtx, dec: &APDecomposition, target: usize) -> Result<APFamily> {
    if target == 0 {
        return Err(Error::InvalidArgument("target count is zero"));
    }
    let total: usize = dec.blocks.iter().map(|b| b.len).sum();
    let piece = total / (4 * target);
    if piece == 0 {
        return Err(Error::AverageTooSmall);
    }
    let mut progs = Vec::new();
    for b in &dec.blocks {
        // len ≥ L/2  ⟺  2·len·target ≥ |S|
        if 2 * b.len * target < total {
            continue;
        }
        for i in 0..b.len / piece {
            let start = ctx.add(b.start, ctx.mul((i * piece) as u64 % ctx.p(), dec.delta));
            progs.push(Progression::new(start, piece));
        }
    }
    APFamily::new(ctx, dec.delta, progs)
}
