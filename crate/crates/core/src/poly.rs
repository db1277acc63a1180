//! Dense univariate polynomials over `F_p`, coefficients low degree first.

use alloc::vec::Vec;

use crate::field::PrimeFieldCtx;

/// Reduces coefficients mod `p` and strips zero leading coefficients.
pub fn normalize(ctx: &PrimeFieldCtx, coeffs: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = coeffs.iter().map(|&c| ctx.reduce(c)).collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Degree of a normalized polynomial; `None` for the zero polynomial.
pub fn degree(coeffs: &[u64]) -> Option<usize> {
    coeffs.len().checked_sub(1)
}

/// Horner evaluation.
pub fn eval(ctx: &PrimeFieldCtx, coeffs: &[u64], x: u64) -> u64 {
    coeffs
        .iter()
        .rev()
        .fold(0, |acc, &c| ctx.add(ctx.mul(acc, x), c))
}

fn make_monic(ctx: &PrimeFieldCtx, a: &mut [u64]) {
    if let Some(&lead) = a.last() {
        let inv = ctx.inv(lead).expect("normalized polynomial has non-zero lead");
        for c in a.iter_mut() {
            *c = ctx.mul(*c, inv);
        }
    }
}

/// Remainder of `a` divided by the non-zero polynomial `b`.
pub fn rem(ctx: &PrimeFieldCtx, a: &[u64], b: &[u64]) -> Vec<u64> {
    let b = normalize(ctx, b);
    let db = degree(&b).expect("division by the zero polynomial");
    let inv_lead = ctx.inv(b[db]).expect("non-zero lead");
    let mut r = normalize(ctx, a);
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let factor = ctx.mul(r[dr], inv_lead);
        let shift = dr - db;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = ctx.sub(r[shift + i], ctx.mul(factor, bc));
        }
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    r
}

/// Monic greatest common divisor. `gcd(0, 0)` is the zero polynomial.
pub fn gcd(ctx: &PrimeFieldCtx, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = normalize(ctx, a);
    let mut b = normalize(ctx, b);
    while !b.is_empty() {
        let r = rem(ctx, &a, &b);
        a = b;
        b = r;
    }
    make_monic(ctx, &mut a);
    a
}

/// Roots in `F_p`, by exhaustive evaluation.
pub fn roots(ctx: &PrimeFieldCtx, coeffs: &[u64]) -> Vec<u64> {
    (0..ctx.p()).filter(|&x| eval(ctx, coeffs, x) == 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn gcd_finds_common_linear_factor() {
        let f = PrimeFieldCtx::new(7).unwrap();
        // (x - 1)(x + 2) and (x - 1)(x + 3)
        let a = [f.from_i64(-2), 1, 1];
        let b = [f.from_i64(-3), 2, 1];
        assert_eq!(gcd(&f, &a, &b), vec![6, 1]);
        assert_eq!(gcd(&f, &[1], &[0, 1]), vec![1]);
    }

    #[test]
    fn remainder_of_cube_by_square() {
        let f = PrimeFieldCtx::new(11).unwrap();
        // x^3 + 1 = (x^2)(x) + 1
        assert_eq!(rem(&f, &[1, 0, 0, 1], &[0, 0, 1]), vec![1]);
    }

    #[test]
    fn horner_and_roots() {
        let f = PrimeFieldCtx::new(7).unwrap();
        assert_eq!(eval(&f, &[0, 0, 0, 1], 2), 1);
        assert_eq!(roots(&f, &[f.from_i64(-1), 0, 1]), vec![1, 6]);
        assert_eq!(normalize(&f, &[7, 8, 14, 0]), vec![0, 1]);
    }
}
