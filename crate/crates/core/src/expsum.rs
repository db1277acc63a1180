//! Exponential sums `Σ e_p(·)` over `F_p`, progressions and their families.
//!
//! `e_p(x) = exp(2πix/p)`. Phases are read from a table of `e_p(j)` for
//! `j ∈ [0, p)` and accumulated with Neumaier compensation.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::field::PrimeFieldCtx;
use crate::map::TotalMap;
use crate::progression::{APFamily, Progression};
use crate::{Error, Result};

/// `e_p(j)` for every residue `j`.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    p: u64,
    table: Vec<Complex64>,
}

impl PhaseTable {
    pub fn new(ctx: &PrimeFieldCtx) -> Self {
        let p = ctx.p();
        let table = (0..p)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / p as f64;
                Complex64::new(libm::cos(t), libm::sin(t))
            })
            .collect();
        Self { p, table }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn e(&self, j: u64) -> Complex64 {
        self.table[(j % self.p) as usize]
    }
}

/// Neumaier-compensated sum of real terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Compensated complex sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn compensated<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = CompensatedSum::default();
    xs.into_iter().for_each(|x| s.add(x));
    s.value()
}

fn check_k(ctx: &PrimeFieldCtx, k: u64) -> Result<u64> {
    match ctx.reduce(k) {
        0 => Err(Error::ZeroFrequency),
        k => Ok(k),
    }
}

fn check_table(ctx: &PrimeFieldCtx, t: &PhaseTable) -> Result<()> {
    if t.p != ctx.p() {
        return Err(Error::LengthMismatch { expected: ctx.size(), got: t.p as usize });
    }
    Ok(())
}

/// Which quantity an empirical constant is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundForm {
    /// `√p`
    Weil,
    /// `p·|I|`
    Averaged,
    /// `p·log²(L + 1)`
    Family,
    /// `J^{1/2}·p·log^{3/2} p`
    LinearFamily,
    /// `|S||S'|/p`, as a lower bound.
    Count,
}

impl BoundForm {
    pub fn name(self) -> &'static str {
        match self {
            BoundForm::Weil => "sqrt_p",
            BoundForm::Averaged => "p_times_len",
            BoundForm::Family => "p_log2_l",
            BoundForm::LinearFamily => "sqrt_j_p_log15_p",
            BoundForm::Count => "s_s2_over_p",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpSumRecord {
    pub k: u64,
    pub lhs_value: f64,
    pub bound_form: BoundForm,
    pub bound_value: f64,
    /// `lhs_value / bound_value`.
    pub empirical_constant: f64,
}

impl ExpSumRecord {
    fn new(k: u64, lhs_value: f64, bound_form: BoundForm, bound_value: f64) -> Self {
        Self { k, lhs_value, bound_form, bound_value, empirical_constant: lhs_value / bound_value }
    }
}

/// `Σ_{x not a pole} e_p(αx + k·f(x))`. Poles are those of the rational
/// function behind `f`, if any.
pub fn ep_sum_full(f: &TotalMap, alpha: u64, k: u64, table: &PhaseTable) -> Result<Complex64> {
    let ctx = f.ctx();
    check_table(ctx, table)?;
    let (alpha, k) = (ctx.reduce(alpha), ctx.reduce(k));
    let poles = f.pole_points();
    let mut first = None;
    let mut constant = true;
    let mut s = ComplexSum::default();
    for x in 0..ctx.p() {
        if poles.contains(&x) {
            continue;
        }
        let phase = ctx.add(ctx.mul(alpha, x), ctx.mul(k, f.apply(x)));
        match first {
            None => first = Some(phase),
            Some(v) if v != phase => constant = false,
            _ => {}
        }
        s.add(table.e(phase));
    }
    if constant {
        return Err(Error::ConstantPhase);
    }
    Ok(s.value())
}

/// `|ep_sum_full| / √p`.
pub fn weil_record(f: &TotalMap, alpha: u64, k: u64, table: &PhaseTable) -> Result<ExpSumRecord> {
    let v = ep_sum_full(f, alpha, k, table)?.norm();
    Ok(ExpSumRecord::new(k, v, BoundForm::Weil, libm::sqrt(table.p as f64)))
}

/// `Σ_{x ∈ ap} e_p(k·f(x))` for the progression with difference `delta`.
pub fn ap_sum(f: &TotalMap, k: u64, ap: &Progression, delta: u64, table: &PhaseTable) -> Result<Complex64> {
    let ctx = f.ctx();
    check_table(ctx, table)?;
    if ap.len > ctx.size() {
        return Err(Error::InvalidArgument("progression longer than p"));
    }
    let k = ctx.reduce(k);
    let mut s = ComplexSum::default();
    for x in ap.elements(ctx, delta) {
        s.add(table.e(ctx.mul(k, f.apply(x))));
    }
    Ok(s.value())
}

/// `Σ_{n=1}^{p} |Σ_{x ∈ I} e_p(k·f(x + n))|²` for the interval
/// `I = {start, …, start + len - 1}` (mod p), using cyclic prefix sums.
pub fn averaged_square_sum(f: &TotalMap, k: u64, start: u64, len: usize, table: &PhaseTable) -> Result<f64> {
    let ctx = f.ctx();
    check_table(ctx, table)?;
    let k = check_k(ctx, k)?;
    if len == 0 || len > ctx.size() {
        return Err(Error::InvalidArgument("interval length outside 1..=p"));
    }
    let p = ctx.size();
    let a: Vec<Complex64> = (0..ctx.p()).map(|y| table.e(ctx.mul(k, f.apply(y)))).collect();
    // prefix[i] = Σ_{j < i} a[j mod p], for i ∈ [0, 2p]
    let mut prefix = Vec::with_capacity(2 * p + 1);
    let mut acc = ComplexSum::default();
    prefix.push(Complex64::new(0.0, 0.0));
    for i in 0..2 * p {
        acc.add(a[i % p]);
        prefix.push(acc.value());
    }
    let mut total = CompensatedSum::default();
    for n in 1..=ctx.p() {
        let s = ctx.add(start % ctx.p(), n % ctx.p()) as usize;
        let inner = prefix[s + len] - prefix[s];
        total.add(inner.norm_sqr());
    }
    Ok(total.value())
}

/// Exact value of the averaged sum when it is an integer.
///
/// With `C(r) = #{(x, y, n) : k(f(x+n) - f(y+n)) = r}` the sum equals
/// `Σ_r C(r) e_p(r)`. The `p - 1` non-trivial roots of unity are linearly
/// independent over `Q` together with 1, so the value is rational iff
/// `C(1) = … = C(p-1)`, and then equals `C(0) - C(1)`. Returns `None`
/// otherwise. Cost `O(p·|I|²)`.
pub fn averaged_square_sum_exact(f: &TotalMap, k: u64, start: u64, len: usize) -> Result<Option<i64>> {
    let ctx = f.ctx();
    let k = check_k(ctx, k)?;
    if len == 0 || len > ctx.size() {
        return Err(Error::InvalidArgument("interval length outside 1..=p"));
    }
    let mut c = vec![0i64; ctx.size()];
    let mut vals = vec![0u64; len];
    for n in 1..=ctx.p() {
        for (i, v) in vals.iter_mut().enumerate() {
            let x = ctx.add(ctx.reduce(start + i as u64), n % ctx.p());
            *v = ctx.mul(k, f.apply(x));
        }
        for &u in &vals {
            for &w in &vals {
                c[ctx.sub(u, w) as usize] += 1;
            }
        }
    }
    if c[1..].iter().all(|&v| v == c[1]) {
        Ok(Some(c[0] - c[1]))
    } else {
        Ok(None)
    }
}

/// `averaged_square_sum` as a record against `p·|I|`.
pub fn averaged_record(f: &TotalMap, k: u64, start: u64, len: usize, table: &PhaseTable) -> Result<ExpSumRecord> {
    let v = averaged_square_sum(f, k, start, len, table)?;
    Ok(ExpSumRecord::new(k, v, BoundForm::Averaged, table.p as f64 * len as f64))
}

/// `Σ_j |Σ_{x ∈ I_j} e_p(k·f(x))|²`, against `p·log²(L + 1)`.
pub fn family_square_sum(f: &TotalMap, k: u64, family: &APFamily, table: &PhaseTable) -> Result<ExpSumRecord> {
    let ctx = f.ctx();
    let k = check_k(ctx, k)?;
    if family.ctx() != ctx {
        return Err(Error::InvalidArgument("family over a different field"));
    }
    let l = family.common_len()?;
    let mut total = CompensatedSum::default();
    for ap in family.progressions() {
        total.add(ap_sum(f, k, ap, family.delta(), table)?.norm_sqr());
    }
    let log = libm::log((l + 1) as f64);
    Ok(ExpSumRecord::new(k, total.value(), BoundForm::Family, table.p as f64 * log * log))
}

/// `|Σ_{i<len} e_p(t·i)|`, closed form.
fn geometric_modulus(p: u64, t: u64, len: usize) -> f64 {
    let t = t % p;
    if t == 0 {
        return len as f64;
    }
    let num = ((t as u128 * len as u128) % p as u128) as f64;
    (libm::sin(PI * num / p as f64) / libm::sin(PI * t as f64 / p as f64)).abs()
}

/// `Σ_{k=1}^{p-1} |Σ_j Σ_{x ∈ I_j} e_p(kx)|`, against `J^{1/2}·p·log^{3/2} p`.
///
/// With common length `L` each inner sum factors as
/// `G(kδ)·Σ_j e_p(k s_j)` where `G` is the geometric sum of length `L`.
pub fn linear_family_sum(family: &APFamily, table: &PhaseTable) -> Result<ExpSumRecord> {
    let ctx = family.ctx();
    check_table(ctx, table)?;
    let l = family.common_len()?;
    let p = ctx.p();
    let mut total = CompensatedSum::default();
    for k in 1..p {
        let g = geometric_modulus(p, ctx.mul(k, family.delta()), l);
        if g == 0.0 {
            continue;
        }
        let mut s = ComplexSum::default();
        for ap in family.progressions() {
            s.add(table.e(ctx.mul(k, ap.start)));
        }
        total.add(g * s.value().norm());
    }
    let j = family.j() as f64;
    let lp = libm::log(p as f64);
    let bound = libm::sqrt(j) * p as f64 * lp * libm::sqrt(lp);
    Ok(ExpSumRecord::new(0, total.value(), BoundForm::LinearFamily, bound))
}

/// Solution count `|{x ∈ S : f(x) ∈ S'}|` with its regime report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountReport {
    pub count: u64,
    pub size_s: usize,
    pub size_s2: usize,
    /// `|S||S'|/p`
    pub expected: f64,
    /// `count · p / (|S||S'|)`
    pub ratio: f64,
    /// `J·L·L'`, when both families have equal lengths and the same `J`.
    pub jll: Option<f64>,
    /// Whether `J·L·L' ≥ p^{3/2 + ε}`.
    pub in_regime: bool,
}

pub const DEFAULT_REGIME_EPSILON: f64 = 0.1;

pub fn count_solutions(f: &TotalMap, s: &APFamily, s2: &APFamily, epsilon: f64) -> Result<CountReport> {
    let ctx = f.ctx();
    if s.ctx() != ctx || s2.ctx() != ctx {
        return Err(Error::InvalidArgument("family over a different field"));
    }
    let member = s2.mask();
    let count = s.elements().filter(|&x| member[f.apply(x) as usize]).count() as u64;
    let (a, b) = (s.total_len(), s2.total_len());
    let p = ctx.p() as f64;
    let expected = a as f64 * b as f64 / p;
    let jll = match (s.common_len(), s2.common_len()) {
        (Ok(l), Ok(l2)) if s.j() == s2.j() => Some(s.j() as f64 * l as f64 * l2 as f64),
        _ => None,
    };
    let in_regime = jll.is_some_and(|v| v >= libm::pow(p, 1.5 + epsilon));
    Ok(CountReport {
        count,
        size_s: a,
        size_s2: b,
        expected,
        ratio: if expected > 0.0 { count as f64 / expected } else { f64::INFINITY },
        jll,
        in_regime,
    })
}

/// The averaged sum for `g(x) = f(f^{-1}(x) + γ)`, after checking that the
/// twisted phases `a ↦ α·f(a - γ) + k·f(a)` are not constant for each `α` in
/// `alphas`.
#[derive(Debug, Clone, PartialEq)]
pub struct GReport {
    pub value: f64,
    pub record: ExpSumRecord,
    /// Largest `|Σ_a e_p(α f(a-γ) + k f(a))| / √p` over the tested `α`.
    pub twisted_max_ratio: f64,
}

pub fn averaged_square_sum_g(
    f: &TotalMap,
    gamma: u64,
    k: u64,
    start: u64,
    len: usize,
    alphas: &[u64],
    table: &PhaseTable,
) -> Result<GReport> {
    let ctx = f.ctx();
    let k = check_k(ctx, k)?;
    let gamma = ctx.reduce(gamma);
    if gamma == 0 {
        return Err(Error::ZeroGamma);
    }
    let g = f.composed_g(gamma)?;
    if !f.is_bijection() {
        return Err(Error::NotABijection);
    }
    let mut worst = 0.0f64;
    for &alpha in alphas {
        let alpha = ctx.reduce(alpha);
        let phase = |a: u64| ctx.add(ctx.mul(alpha, f.apply(ctx.sub(a, gamma))), ctx.mul(k, f.apply(a)));
        let p0 = phase(0);
        if (1..ctx.p()).all(|a| phase(a) == p0) {
            return Err(Error::ConstantPhase);
        }
        let s = compensated_complex((0..ctx.p()).map(|a| table.e(phase(a))));
        worst = worst.max(s.norm() / libm::sqrt(ctx.p() as f64));
    }
    let record = averaged_record(&g, k, start, len, table)?;
    Ok(GReport { value: record.lhs_value, record, twisted_max_ratio: worst })
}

pub fn compensated_complex<I: IntoIterator<Item = Complex64>>(zs: I) -> Complex64 {
    let mut s = ComplexSum::default();
    zs.into_iter().for_each(|z| s.add(z));
    s.value()
}
