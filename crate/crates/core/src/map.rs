//! Rational maps on `F_p` and their total extensions.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::field::PrimeFieldCtx;
use crate::poly;
use crate::{Error, Result};

/// Values assigned to the poles of a rational map.
pub type PoleAssignments = BTreeMap<u64, u64>;

/// `P/Q` with coprime `P, Q ∈ F_p[x]` of degree at most `degree_bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMap {
    num: Vec<u64>,
    den: Vec<u64>,
    degree_bound: usize,
}

/// Result of evaluating a rational map at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eval {
    Value(u64),
    Pole,
}

impl RationalMap {
    /// Normalizes both coefficient lists, then rejects a zero denominator,
    /// degrees above `degree_bound`, and non-coprime pairs.
    pub fn new(ctx: &PrimeFieldCtx, num: &[u64], den: &[u64], degree_bound: usize) -> Result<Self> {
        let num = poly::normalize(ctx, num);
        let den = poly::normalize(ctx, den);
        if den.is_empty() {
            return Err(Error::ZeroDenominator);
        }
        for d in [poly::degree(&num), poly::degree(&den)].into_iter().flatten() {
            if d > degree_bound {
                return Err(Error::DegreeTooLarge { degree: d, bound: degree_bound });
            }
        }
        let g = poly::gcd(ctx, &num, &den);
        if g.len() > 1 {
            return Err(Error::NotCoprime(g.len() - 1));
        }
        Ok(Self { num, den, degree_bound })
    }

    /// `P/Q` with the degree bound taken as the larger of the two degrees.
    pub fn from_coeffs(ctx: &PrimeFieldCtx, num: &[u64], den: &[u64]) -> Result<Self> {
        let d = poly::normalize(ctx, num)
            .len()
            .max(poly::normalize(ctx, den).len())
            .saturating_sub(1);
        Self::new(ctx, num, den, d)
    }

    /// `1/x`.
    pub fn inverse(ctx: &PrimeFieldCtx) -> Self {
        Self::new(ctx, &[1], &[0, 1], 1).expect("1/x is a valid rational map")
    }

    /// `x^3`.
    pub fn cube(ctx: &PrimeFieldCtx) -> Self {
        Self::new(ctx, &[0, 0, 0, 1], &[1], 3).expect("x^3 is a valid rational map")
    }

    pub fn numerator(&self) -> &[u64] {
        &self.num
    }

    pub fn denominator(&self) -> &[u64] {
        &self.den
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn eval(&self, ctx: &PrimeFieldCtx, x: u64) -> Eval {
        eval_rational(self, ctx, x)
    }

    /// Roots of `Q` in `F_p`.
    pub fn poles(&self, ctx: &PrimeFieldCtx) -> Vec<u64> {
        if self.den.len() == 1 {
            return Vec::new();
        }
        poly::roots(ctx, &self.den)
    }

    /// Assigns `f(pole) = 0` to every pole, the convention used for `1/x`.
    pub fn zero_pole_assignments(&self, ctx: &PrimeFieldCtx) -> PoleAssignments {
        self.poles(ctx).into_iter().map(|x| (x, 0)).collect()
    }
}

/// `P(x) · Q(x)^{-1}`, or [`Eval::Pole`] where `Q(x) = 0`.
pub fn eval_rational(map: &RationalMap, ctx: &PrimeFieldCtx, x: u64) -> Eval {
    let x = ctx.reduce(x);
    match ctx.inv(poly::eval(ctx, &map.den, x)) {
        Some(q_inv) => Eval::Value(ctx.mul(poly::eval(ctx, &map.num, x), q_inv)),
        None => Eval::Pole,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassReport {
    pub is_bijection: bool,
    pub is_linear_or_constant: bool,
    pub in_b_p_d: bool,
}

/// Evaluates the extension of `map` by `poles` at every point and decides
/// membership in the class of non-linear rational bijections.
pub fn classify_map(map: &RationalMap, ctx: &PrimeFieldCtx, poles: &PoleAssignments) -> Result<ClassReport> {
    let table = extend(map, ctx, poles)?;
    let is_bijection = is_permutation(&table);
    let is_linear_or_constant = is_affine_off_poles(map, ctx);
    Ok(ClassReport {
        is_bijection,
        is_linear_or_constant,
        in_b_p_d: is_bijection && !is_linear_or_constant,
    })
}

fn extend(map: &RationalMap, ctx: &PrimeFieldCtx, poles: &PoleAssignments) -> Result<Vec<u64>> {
    (0..ctx.p())
        .map(|x| match map.eval(ctx, x) {
            Eval::Value(v) => Ok(v),
            Eval::Pole => poles
                .get(&x)
                .map(|&v| ctx.reduce(v))
                .ok_or(Error::MissingPoleAssignment(x)),
        })
        .collect()
}

/// Interpolates a line through the first two non-pole points and checks that
/// every other non-pole point lies on it.
fn is_affine_off_poles(map: &RationalMap, ctx: &PrimeFieldCtx) -> bool {
    let mut points = (0..ctx.p()).filter_map(|x| match map.eval(ctx, x) {
        Eval::Value(v) => Some((x, v)),
        Eval::Pole => None,
    });
    let (Some((x0, y0)), Some((x1, y1))) = (points.next(), points.next()) else {
        return true;
    };
    let slope = ctx.mul(ctx.sub(y1, y0), ctx.inv(ctx.sub(x1, x0)).expect("distinct points"));
    points.all(|(x, y)| y == ctx.add(y0, ctx.mul(slope, ctx.sub(x, x0))))
}

fn is_permutation(table: &[u64]) -> bool {
    let mut seen = vec![false; table.len()];
    for &v in table {
        let v = v as usize;
        if v >= seen.len() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// How a total map was produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Rational { map: RationalMap, poles: PoleAssignments },
    Square,
    Linear { a: u64 },
    /// `g(x) = f(f^{-1}(x) + γ)` over a rational bijection `f`.
    ComposedG { base: RationalMap, poles: PoleAssignments, gamma: u64 },
}

/// A function `F_p -> F_p` materialized as a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalMap {
    ctx: PrimeFieldCtx,
    table: Vec<u64>,
    provenance: Provenance,
    bijective: bool,
}

/// Materializes the table for `spec`.
pub fn build_total_map(spec: &Provenance, ctx: &PrimeFieldCtx) -> Result<TotalMap> {
    let table = match spec {
        Provenance::Rational { map, poles } => extend(map, ctx, poles)?,
        Provenance::Square => (0..ctx.p()).map(|x| ctx.mul(x, x)).collect(),
        Provenance::Linear { a } => (0..ctx.p()).map(|x| ctx.mul(ctx.reduce(*a), x)).collect(),
        Provenance::ComposedG { base, poles, gamma } => {
            let f = extend(base, ctx, poles)?;
            let f_inv = inverse_table(&f).ok_or(Error::NotABijection)?;
            (0..ctx.p())
                .map(|x| f[ctx.add(f_inv[x as usize], ctx.reduce(*gamma)) as usize])
                .collect()
        }
    };
    let bijective = is_permutation(&table);
    Ok(TotalMap { ctx: *ctx, table, provenance: spec.clone(), bijective })
}

fn inverse_table(table: &[u64]) -> Option<Vec<u64>> {
    if !is_permutation(table) {
        return None;
    }
    let mut inv = vec![0; table.len()];
    for (x, &y) in table.iter().enumerate() {
        inv[y as usize] = x as u64;
    }
    Some(inv)
}

impl TotalMap {
    pub fn square(ctx: &PrimeFieldCtx) -> Self {
        build_total_map(&Provenance::Square, ctx).expect("square map is total")
    }

    pub fn linear(ctx: &PrimeFieldCtx, a: u64) -> Self {
        build_total_map(&Provenance::Linear { a }, ctx).expect("linear map is total")
    }

    /// `1/x` extended by `f(0) = 0`.
    pub fn inverse(ctx: &PrimeFieldCtx) -> Self {
        let map = RationalMap::inverse(ctx);
        let poles = map.zero_pole_assignments(ctx);
        build_total_map(&Provenance::Rational { map, poles }, ctx).expect("1/x extends")
    }

    pub fn rational(ctx: &PrimeFieldCtx, map: RationalMap, poles: PoleAssignments) -> Result<Self> {
        build_total_map(&Provenance::Rational { map, poles }, ctx)
    }

    pub fn ctx(&self) -> &PrimeFieldCtx {
        &self.ctx
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        self.table[x as usize]
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn is_bijection(&self) -> bool {
        self.bijective
    }

    pub fn inverse_table(&self) -> Option<Vec<u64>> {
        inverse_table(&self.table)
    }

    /// Points where the underlying rational function has a pole; empty for
    /// maps that are not rational.
    pub fn pole_points(&self) -> Vec<u64> {
        match &self.provenance {
            Provenance::Rational { map, .. } => map.poles(&self.ctx),
            _ => Vec::new(),
        }
    }

    /// Composite `g(x) = f(f^{-1}(x) + γ)` over this map. Requires a rational
    /// bijection.
    pub fn composed_g(&self, gamma: u64) -> Result<TotalMap> {
        match &self.provenance {
            Provenance::Rational { map, poles } => build_total_map(
                &Provenance::ComposedG { base: map.clone(), poles: poles.clone(), gamma },
                &self.ctx,
            ),
            _ => Err(Error::InvalidArgument("composed map needs a rational base")),
        }
    }
}
