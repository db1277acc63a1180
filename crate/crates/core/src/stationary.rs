//! Recurrent classes, stationary laws, periods and mixing times.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use crate::field::PrimeFieldCtx;
use crate::kernel::{self, ChainSpec, Distribution, ExactDist, TransitionKernel, Variant};
use crate::map::TotalMap;
use crate::modsolve;
use crate::{Error, Result};

/// Strongly connected components of the positive-probability digraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrentStructure {
    /// Components, each sorted, ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Component index of every state.
    pub class_of: Vec<usize>,
    /// Whether each component has no edge leaving it.
    pub closed: Vec<bool>,
}

impl RecurrentStructure {
    /// Indices of the closed (recurrent) classes.
    pub fn recurrent(&self) -> Vec<usize> {
        (0..self.classes.len()).filter(|&c| self.closed[c]).collect()
    }

    pub fn recurrent_count(&self) -> usize {
        self.closed.iter().filter(|&&c| c).count()
    }

    /// The recurrent class, or [`Error::NonUniqueRecurrentClass`].
    pub fn unique_recurrent(&self) -> Result<&[usize]> {
        match self.recurrent().as_slice() {
            [c] => Ok(&self.classes[*c]),
            other => Err(Error::NonUniqueRecurrentClass(other.len())),
        }
    }

    /// Recurrent class containing `x`, or `None` for transient states.
    pub fn recurrent_class_of(&self, x: usize) -> Option<usize> {
        let c = self.class_of[x];
        self.closed[c].then_some(c)
    }
}

/// Tarjan's algorithm, iterative.
pub fn recurrent_classes(k: &TransitionKernel) -> RecurrentStructure {
    let n = k.n();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;
    let succ: Vec<Vec<usize>> = (0..n).map(|x| k.row(x).map(|(y, _)| y).collect()).collect();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let id = comps.len();
                    let mut members = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = id;
                        members.push(w);
                        if w == v {
                            break;
                        }
                    }
                    members.sort_unstable();
                    comps.push(members);
                }
            }
        }
    }
    // Renumber by smallest member for a stable order.
    let mut order: Vec<usize> = (0..comps.len()).collect();
    order.sort_by_key(|&c| comps[c][0]);
    let mut rename = vec![0; comps.len()];
    for (new, &old) in order.iter().enumerate() {
        rename[old] = new;
    }
    let class_of: Vec<usize> = comp.iter().map(|&c| rename[c]).collect();
    let classes: Vec<Vec<usize>> = order.iter().map(|&c| core::mem::take(&mut comps[c])).collect();
    let mut closed = vec![true; classes.len()];
    for (x, y, _) in k.edges() {
        if class_of[x] != class_of[y] {
            closed[class_of[x]] = false;
        }
    }
    RecurrentStructure { classes, class_of, closed }
}

fn class_mask(n: usize, class: &[usize]) -> Vec<bool> {
    let mut keep = vec![false; n];
    for &x in class {
        keep[x] = true;
    }
    keep
}

/// The unique stationary law, solved exactly on the recurrent class and zero
/// elsewhere.
pub fn stationary_exact(k: &TransitionKernel) -> Result<Distribution> {
    let rs = recurrent_classes(k);
    let class = rs.unique_recurrent()?;
    let (sub, labels) = k.restrict(&class_mask(k.n(), class))?;
    let local = modsolve::solve_stationary(&sub)?;
    let mut num = vec![BigUint::zero(); k.n()];
    for (i, &x) in labels.iter().enumerate() {
        num[x] = local.numerators()[i].clone();
    }
    Ok(Distribution::Exact(ExactDist::new(num, local.denominator().clone())?))
}

pub const FLOAT_TOLERANCE: f64 = 1e-13;
pub const FLOAT_MAX_ITERATIONS: usize = 1_000_000;
/// Largest state count solved exactly by [`stationary`].
pub const EXACT_LIMIT: usize = 2000;

/// Power iteration on the lazy kernel, started uniform on the recurrent
/// class, until successive iterates differ by at most `tol` in L1.
pub fn stationary_float(k: &TransitionKernel, tol: f64, max_iter: usize) -> Result<Distribution> {
    let rs = recurrent_classes(k);
    let class = rs.unique_recurrent()?;
    let lazy = k.lazy();
    let mut v = vec![0.0; k.n()];
    for &x in class {
        v[x] = 1.0 / class.len() as f64;
    }
    for _ in 0..max_iter {
        let next = kernel::step_float(&lazy, &v);
        let diff: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = next;
        if diff <= tol {
            return Ok(Distribution::Float(v));
        }
    }
    Err(Error::NotConverged(max_iter))
}

/// Exact solve up to [`EXACT_LIMIT`] states, power iteration above.
pub fn stationary(k: &TransitionKernel) -> Result<Distribution> {
    if k.n() <= EXACT_LIMIT {
        stationary_exact(k)
    } else {
        stationary_float(k, FLOAT_TOLERANCE, FLOAT_MAX_ITERATIONS)
    }
}

/// `#{β : β² + γ = α} + #{β : β² - γ = α}` for every `α`.
pub fn square_preimage_counts(ctx: &PrimeFieldCtx, gamma: u64) -> Vec<u64> {
    let mut c = vec![0u64; ctx.size()];
    let g = ctx.reduce(gamma);
    for b in 0..ctx.p() {
        let s = ctx.mul(b, b);
        c[ctx.add(s, g) as usize] += 1;
        c[ctx.sub(s, g) as usize] += 1;
    }
    c
}

/// Preimage counts over `2p`: the stationary law of the non-lazy square chain
/// when `p ≡ 3 (mod 4)`.
pub fn square_stationary_formula(ctx: &PrimeFieldCtx, gamma: u64) -> Result<Distribution> {
    if ctx.reduce(gamma) == 0 {
        return Err(Error::ZeroGamma);
    }
    if ctx.p() % 4 != 3 {
        return Err(Error::WrongResidueClass);
    }
    let num = square_preimage_counts(ctx, gamma).into_iter().map(BigUint::from).collect();
    Ok(Distribution::Exact(ExactDist::new(num, BigUint::from(2 * ctx.p()))?))
}

/// The chain `x -> x² ± γ`, each sign with probability 1/2.
pub fn square_chain(ctx: &PrimeFieldCtx, gamma: u64) -> Result<ChainSpec> {
    ChainSpec::new(TotalMap::square(ctx), gamma, Variant::NonLazy)
}

/// Period of a recurrent class: gcd of `level(u) + 1 - level(v)` over the
/// class edges, with BFS levels from its smallest state.
pub fn period(k: &TransitionKernel, class: &[usize]) -> Result<u64> {
    let base = *class.first().ok_or(Error::InvalidArgument("empty class"))?;
    let member = class_mask(k.n(), class);
    for &x in class {
        if let Some((_, _)) = k.row(x).find(|&(y, _)| !member[y]) {
            return Err(Error::NotClosed(x));
        }
    }
    let mut level = vec![u64::MAX; k.n()];
    level[base] = 0;
    let mut queue = alloc::collections::VecDeque::from([base]);
    let mut g = 0u64;
    while let Some(u) = queue.pop_front() {
        for (v, _) in k.row(u) {
            if level[v] == u64::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    for &u in class {
        for (v, _) in k.row(u) {
            let diff = (level[u] + 1).abs_diff(level[v]);
            g = g.gcd(&diff);
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingReport {
    pub epsilon: f64,
    pub t_mix: usize,
    pub starts: Vec<usize>,
    /// Largest distance to the target over all starts, for steps `0..=t_mix`.
    pub trajectory: Vec<f64>,
}

/// Checks `target · P = target`: exactly for exact targets, to `1e-9` in L1
/// otherwise.
pub fn check_stationary(k: &TransitionKernel, target: &Distribution) -> Result<()> {
    let next = kernel::step_distribution(k, target)?;
    let ok = match target {
        Distribution::Exact(_) => next == *target,
        Distribution::Float(v) => kernel::tv_float(&next.to_f64s(), v) * 2.0 <= 1e-9,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotStationary)
    }
}

/// Smallest `n` with `max_x TV(δ_x Pⁿ, target) ≤ ε` over `starts`, by
/// evolving each start in the target's mode.
pub fn mixing_time(
    k: &TransitionKernel,
    target: &Distribution,
    epsilon: f64,
    starts: &[usize],
    budget: usize,
) -> Result<MixingReport> {
    check_stationary(k, target)?;
    let mut traj = TvTrajectory::new(k, target, starts)?;
    loop {
        let d = traj.current();
        if d <= epsilon {
            break;
        }
        if traj.step_count() >= budget {
            return Err(Error::BudgetExceeded(budget));
        }
        traj.advance()?;
    }
    Ok(MixingReport {
        epsilon,
        t_mix: traj.step_count(),
        starts: starts.to_vec(),
        trajectory: traj.history,
    })
}

/// Worst-start distance to a target, advanced one step at a time.
#[derive(Debug, Clone)]
pub struct TvTrajectory<'a> {
    kernel: &'a TransitionKernel,
    target: &'a Distribution,
    dists: Vec<Distribution>,
    history: Vec<f64>,
}

impl<'a> TvTrajectory<'a> {
    pub fn new(k: &'a TransitionKernel, target: &'a Distribution, starts: &[usize]) -> Result<Self> {
        if target.len() != k.n() {
            return Err(Error::LengthMismatch { expected: k.n(), got: target.len() });
        }
        if starts.is_empty() {
            return Err(Error::InvalidArgument("no start states"));
        }
        let mut dists = Vec::with_capacity(starts.len());
        for &x in starts {
            if x >= k.n() {
                return Err(Error::StateOutOfRange(x as u64));
            }
            dists.push(Distribution::point_mass(k.n(), x, target.is_exact()));
        }
        let mut t = Self { kernel: k, target, dists, history: Vec::new() };
        let d = t.measure()?;
        t.history.push(d);
        Ok(t)
    }

    fn measure(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for d in &self.dists {
            worst = worst.max(kernel::tv_distance(d, self.target)?);
        }
        Ok(worst)
    }

    pub fn advance(&mut self) -> Result<f64> {
        for d in &mut self.dists {
            *d = kernel::step_raw(self.kernel, d)?;
        }
        let v = self.measure()?;
        self.history.push(v);
        Ok(v)
    }

    pub fn current(&self) -> f64 {
        *self.history.last().expect("history starts non-empty")
    }

    pub fn step_count(&self) -> usize {
        self.history.len() - 1
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }
}

/// Worst-start distance to `target` after exactly `n` steps. Only the final
/// distributions are compared.
pub fn tv_after(k: &TransitionKernel, target: &Distribution, starts: &[usize], n: usize) -> Result<f64> {
    let mut t = TvTrajectory::new(k, target, starts)?;
    for _ in 0..n {
        for d in &mut t.dists {
            *d = kernel::step_raw(k, d)?;
        }
    }
    t.measure()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportReport {
    pub p: u64,
    /// Size of the recurrent class when it is unique.
    pub support: Option<usize>,
    pub recurrent_classes: usize,
    pub structure: RecurrentStructure,
}

impl SupportReport {
    pub fn fraction(&self) -> Option<f64> {
        self.support.map(|s| s as f64 / self.p as f64)
    }
}

/// `|supp π| / p` for the square chain. When the recurrent class is unique
/// the chain restricted to it is irreducible, so the support of `π` is that
/// whole class and no linear solve is needed.
pub fn support_fraction(ctx: &PrimeFieldCtx, gamma: u64) -> Result<SupportReport> {
    let k = square_chain(ctx, gamma)?.kernel();
    let structure = recurrent_classes(&k);
    let rec = structure.recurrent();
    let support = (rec.len() == 1).then(|| structure.classes[rec[0]].len());
    Ok(SupportReport { p: ctx.p(), support, recurrent_classes: rec.len(), structure })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjectureReport {
    pub alpha: f64,
    pub limit: f64,
    pub residual: f64,
}

fn quartic(x: f64) -> f64 {
    x * x * x * x + 2.0 * x * x - 4.0 * x + 1.0
}

/// Smallest positive root `α` of `x⁴ + 2x² - 4x + 1` and `1 - (1 + α)²/4`.
///
/// The quartic is convex, equal to 1 at 0 and negative at 1/2, so bisection
/// on `(0, 1/2)` finds its smallest positive root.
pub fn conjectured_limit() -> ConjectureReport {
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    assert!(quartic(lo) > 0.0 && quartic(hi) < 0.0);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if quartic(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    ConjectureReport { alpha, limit: 1.0 - (1.0 + alpha) * (1.0 + alpha) / 4.0, residual: quartic(alpha).abs() }
}

/// Ratio of the largest to the smallest positive mass.
pub fn mass_spread(d: &Distribution) -> Option<f64> {
    let v: Vec<f64> = d.to_f64s().into_iter().filter(|&x| x > 0.0).collect();
    let max = v.iter().cloned().fold(f64::NAN, f64::max);
    let min = v.iter().cloned().fold(f64::NAN, f64::min);
    (!v.is_empty()).then(|| max / min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{odd_primes_in, ResidueFilter};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Signed};

    fn ctx(p: u64) -> PrimeFieldCtx {
        PrimeFieldCtx::new(p).unwrap()
    }

    /// Dense rational Gaussian elimination on the full chain.
    fn dense_stationary(k: &TransitionKernel) -> Vec<BigRational> {
        let n = k.n();
        let mut a = vec![vec![BigRational::zero(); n + 1]; n];
        for (x, y, w) in k.edges() {
            a[y][x] += BigRational::new(BigInt::from(w), BigInt::from(k.denom()));
        }
        for (y, row) in a.iter_mut().enumerate() {
            row[y] -= BigRational::one();
        }
        a[n - 1] = vec![BigRational::one(); n + 1];
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero()).unwrap();
            a.swap(piv, col);
            let inv = a[col][col].recip();
            for c in 0..=n {
                a[col][c] = &a[col][c] * &inv;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..=n {
                        let t = &f * &a[col][c];
                        a[r][c] -= t;
                    }
                }
            }
        }
        a.into_iter().map(|row| row[n].clone()).collect()
    }

    fn ratios(d: &Distribution) -> Vec<BigRational> {
        (0..d.len()).map(|i| d.ratio(i).unwrap()).collect()
    }

    #[test]
    fn golden_square_chain_p11() {
        let c = ctx(11);
        let k = square_chain(&c, 1).unwrap().kernel();
        let expected: Vec<u64> = vec![2, 1, 4, 2, 4, 2, 2, 0, 2, 0, 3];
        let want = Distribution::Exact(ExactDist::new(expected.iter().map(|&v| BigUint::from(v)).collect(), BigUint::from(22u32)).unwrap());
        assert_eq!(stationary_exact(&k).unwrap(), want);
        assert_eq!(square_stationary_formula(&c, 1).unwrap(), want);
        let rs = recurrent_classes(&k);
        assert_eq!(rs.unique_recurrent().unwrap(), &[0, 1, 2, 3, 4, 5, 6, 8, 10]);
        assert_eq!(period(&k, rs.unique_recurrent().unwrap()).unwrap(), 1);
    }

    #[test]
    fn formula_refuses_one_mod_four() {
        assert_eq!(square_stationary_formula(&ctx(13), 1), Err(Error::WrongResidueClass));
    }

    #[test]
    fn exact_solve_matches_dense_oracle() {
        for p in [3u64, 5, 7, 13, 17] {
            for g in 1..3.min(p) {
                let k = square_chain(&ctx(p), g).unwrap().kernel();
                if recurrent_classes(&k).recurrent_count() != 1 {
                    continue;
                }
                let lazy = k.lazy();
                let exact = stationary_exact(&lazy).unwrap();
                assert_eq!(ratios(&exact), dense_stationary(&lazy), "p={p} γ={g}");
                assert_eq!(check_stationary(&lazy, &exact), Ok(()));
            }
        }
        let c = ctx(13);
        for v in [Variant::LazyHold, Variant::NoiseZero] {
            let k = ChainSpec::new(TotalMap::inverse(&c), 2, v).unwrap().kernel();
            assert_eq!(ratios(&stationary_exact(&k).unwrap()), dense_stationary(&k));
        }
    }

    #[test]
    fn exact_matches_power_iteration() {
        let k = square_chain(&ctx(7), 1).unwrap().kernel();
        let e = stationary_exact(&k).unwrap().to_f64s();
        let f = stationary_float(&k, 1e-14, 1_000_000).unwrap().to_f64s();
        for (a, b) in e.iter().zip(&f) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn bijective_chain_is_uniform() {
        let c = ctx(31);
        let k = ChainSpec::new(TotalMap::inverse(&c), 3, Variant::LazyHold).unwrap().kernel();
        assert_eq!(recurrent_classes(&k).classes.len(), 1);
        assert_eq!(stationary_exact(&k).unwrap(), Distribution::uniform(31, true));
        assert_eq!(period(&k, &(0..31).collect::<Vec<_>>()).unwrap(), 1);
    }

    #[test]
    fn two_cycle_has_period_two() {
        let k = TransitionKernel::from_rows(1, vec![vec![(1, 1)], vec![(0, 1)]]).unwrap();
        assert_eq!(period(&k, &[0, 1]).unwrap(), 2);
    }

    #[test]
    fn p3_classes_match_reachability() {
        let k = square_chain(&ctx(3), 1).unwrap().kernel();
        let rs = recurrent_classes(&k);
        // Brute-force reachability: x and y share a class iff each reaches the other.
        let n = 3;
        let mut reach = vec![vec![false; n]; n];
        for x in 0..n {
            reach[x][x] = true;
            for _ in 0..n {
                for a in 0..n {
                    if reach[x][a] {
                        for (b, _) in k.row(a) {
                            reach[x][b] = true;
                        }
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                assert_eq!(rs.class_of[x] == rs.class_of[y], reach[x][y] && reach[y][x]);
            }
        }
    }

    #[test]
    fn balance_identity() {
        for p in odd_primes_in(3, 200, ResidueFilter::ThreeMod4) {
            let c = ctx(p);
            for g in 1..4.min(p) {
                let n = square_preimage_counts(&c, g);
                assert_eq!(n.iter().sum::<u64>(), 2 * p);
                let mut lhs = vec![0u64; p as usize];
                for a in 0..p {
                    let s = c.mul(a, a);
                    lhs[c.add(s, g) as usize] += n[a as usize];
                    lhs[c.sub(s, g) as usize] += n[a as usize];
                }
                let doubled: Vec<u64> = n.iter().map(|v| 2 * v).collect();
                assert_eq!(lhs, doubled, "p={p} γ={g}");
            }
        }
    }

    #[test]
    fn mixing_examples() {
        let c = ctx(11);
        let k = ChainSpec::new(TotalMap::square(&c), 1, Variant::LazyHold).unwrap().kernel();
        let pi = stationary_exact(&k).unwrap();
        let all: Vec<usize> = (0..11).collect();
        assert_eq!(mixing_time(&k, &pi, 1.0, &all, 10).unwrap().t_mix, 0);
        let r = mixing_time(&k, &pi, 0.25, &all, 1000).unwrap();
        // Dense oracle: powers of the 11×11 matrix in floating point.
        let mut m = vec![vec![0.0f64; 11]; 11];
        for (x, y, w) in k.edges() {
            m[x][y] += w as f64 / k.denom() as f64;
        }
        let piv = pi.to_f64s();
        let mut power = (0..11).map(|i| (0..11).map(|j| if i == j { 1.0 } else { 0.0 }).collect::<Vec<f64>>()).collect::<Vec<_>>();
        let mut oracle = 0;
        loop {
            let worst = power
                .iter()
                .map(|row| 0.5 * row.iter().zip(&piv).map(|(a, b)| (a - b).abs()).sum::<f64>())
                .fold(0.0, f64::max);
            if worst <= 0.25 {
                break;
            }
            power = power
                .iter()
                .map(|row| (0..11).map(|j| (0..11).map(|l| row[l] * m[l][j]).sum()).collect())
                .collect();
            oracle += 1;
        }
        assert_eq!(r.t_mix, oracle);
        assert_eq!(r.trajectory.len(), r.t_mix + 1);
        assert!(r.trajectory.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }

    #[test]
    fn mixing_rejects_non_stationary_target() {
        let c = ctx(11);
        let k = square_chain(&c, 1).unwrap().kernel();
        let u = Distribution::uniform(11, true);
        assert_eq!(mixing_time(&k, &u, 0.25, &[0], 10), Err(Error::NotStationary));
    }

    #[test]
    fn additive_walk_is_slow() {
        let c = ctx(101);
        let k = ChainSpec::pure_additive(&c, 1).unwrap().kernel();
        let u = Distribution::uniform(101, false);
        let r = mixing_time(&k, &u, 0.25, &[0], 100_000).unwrap();
        assert!(r.t_mix >= 1000, "{}", r.t_mix);
        assert_eq!(mixing_time(&k, &u, 0.25, &[0], 10), Err(Error::BudgetExceeded(10)));
    }

    #[test]
    fn support_fraction_small_cases() {
        let r = support_fraction(&ctx(11), 1).unwrap();
        assert_eq!(r.support, Some(9));
        // Oracle at p = 13: support of the exact stationary law.
        let c = ctx(13);
        let k = square_chain(&c, 1).unwrap().kernel();
        let pi = stationary_exact(&k).unwrap();
        let r = support_fraction(&c, 1).unwrap();
        assert_eq!(r.support, Some(pi.support().len()));
        assert_eq!(r.support, Some(9));
    }

    #[test]
    fn conjecture_constants() {
        let r = conjectured_limit();
        assert!((r.alpha - 0.2956).abs() < 5e-5);
        assert!(r.residual <= 1e-12);
        assert!((r.limit - 0.5804).abs() < 1e-4);
        // No smaller positive root: the quartic stays positive on a fine grid.
        assert!((1..2956).all(|i| quartic(i as f64 * 1e-4) > 0.0));
        assert!(r.alpha > 0.0 && r.alpha < 1.0 && quartic(r.alpha - 1e-9).is_positive());
    }

    #[test]
    fn mass_spread_of_golden_case() {
        let pi = square_stationary_formula(&ctx(11), 1).unwrap();
        assert_eq!(mass_spread(&pi), Some(4.0));
    }
}
