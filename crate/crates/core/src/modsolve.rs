//! Exact stationary vectors of irreducible integer kernels.
//!
//! The system `πP = π, Σπ = 1` is solved modulo a sequence of 31-bit primes,
//! combined by CRT and rationally reconstructed. A candidate is accepted only
//! after exact verification over the integers, so the answer never depends
//! on a lucky prime.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::field::is_prime;
use crate::kernel::{ExactDist, TransitionKernel};
use crate::{Error, Result};

fn mod_pow(mut b: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1;
    b %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    acc
}

/// Solves `A w = e_last` mod `q` in place; `None` when singular mod `q`.
fn solve_mod(mut a: Vec<u64>, m: usize, q: u64) -> Option<Vec<u64>> {
    let mut rhs = vec![0u64; m];
    rhs[m - 1] = 1;
    for col in 0..m {
        let piv = (col..m).find(|&r| a[r * m + col] != 0)?;
        if piv != col {
            for c in 0..m {
                a.swap(piv * m + c, col * m + c);
            }
            rhs.swap(piv, col);
        }
        let inv = mod_pow(a[col * m + col], q - 2, q);
        for c in col..m {
            a[col * m + c] = a[col * m + c] * inv % q;
        }
        rhs[col] = rhs[col] * inv % q;
        let (pivot_row, rest) = a.split_at_mut((col + 1) * m);
        let pivot_row = &pivot_row[col * m..];
        for r in col + 1..m {
            let row = &mut rest[(r - col - 1) * m..(r - col) * m];
            let f = row[col];
            if f == 0 {
                continue;
            }
            let nf = q - f;
            for c in col..m {
                row[c] = (row[c] + nf * pivot_row[c]) % q;
            }
            rhs[r] = (rhs[r] + nf * rhs[col]) % q;
        }
    }
    for col in (0..m).rev() {
        let mut v = rhs[col];
        for c in col + 1..m {
            v = (v + (q - a[col * m + c]) * rhs[c]) % q;
        }
        rhs[col] = v;
    }
    Some(rhs)
}

/// Rational reconstruction of `r mod m` with `|num|, den ≤ sqrt(m/2)`.
fn reconstruct(r: &BigUint, m: &BigUint) -> Option<(BigInt, BigInt)> {
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (BigInt::from(m.clone()), BigInt::from(r.clone()));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    let bound_i = BigInt::from(bound);
    while r1 > bound_i {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = core::mem::replace(&mut r1, r2);
        t0 = core::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound_i {
        return None;
    }
    let (num, den) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    if num.gcd(&den) != BigInt::one() && !num.is_zero() {
        return None;
    }
    Some((num, den))
}

/// Stationary law of an irreducible kernel, as integer weights over their sum.
pub(crate) fn solve_stationary(k: &TransitionKernel) -> Result<ExactDist> {
    let m = k.n();
    if m == 0 {
        return Err(Error::InvalidArgument("empty kernel"));
    }
    if m == 1 {
        return ExactDist::new(vec![BigUint::one()], BigUint::one());
    }
    let d = k.denom() as i64;
    // Row y of the system: Σ_x n_xy w_x - D w_y = 0; the last row is Σ w = 1.
    let mut rows: Vec<Vec<(usize, i64)>> = vec![Vec::new(); m];
    for (x, y, w) in k.edges() {
        rows[y].push((x, w as i64));
    }
    for (y, row) in rows.iter_mut().enumerate() {
        row.push((y, -d));
    }
    rows[m - 1] = (0..m).map(|x| (x, 1)).collect();
    let mut bits = 0.0;
    for row in &rows {
        let mut acc = alloc::collections::BTreeMap::<usize, i64>::new();
        for &(x, v) in row {
            *acc.entry(x).or_insert(0) += v;
        }
        let norm2: f64 = acc.values().map(|&v| (v as f64) * (v as f64)).sum::<f64>() + 1.0;
        bits += libm::log2(norm2) / 2.0;
    }
    // Cramer numerators and the determinant are both below 2^bits.
    let max_primes = ((2.0 * bits + 4.0) / 30.0) as usize + 2;

    let mut modulus = BigUint::one();
    let mut residues: Vec<BigUint> = vec![BigUint::zero(); m];
    let mut q = (1u64 << 31) - 1;
    let mut used = 0;
    while used < max_primes {
        while !is_prime(q) {
            q -= 2;
        }
        let mut a = vec![0u64; m * m];
        for (y, row) in rows.iter().enumerate() {
            for &(x, v) in row {
                let cell = &mut a[y * m + x];
                *cell = (*cell + v.rem_euclid(q as i64) as u64) % q;
            }
        }
        let sol = solve_mod(a, m, q);
        let cur = q;
        q -= 2;
        let Some(sol) = sol else { continue };
        used += 1;
        // CRT: x ≡ r (mod M), x ≡ s (mod q).
        let m_mod_q = (&modulus % cur).iter_u64_digits().next().unwrap_or(0);
        let m_inv = mod_pow(m_mod_q, cur - 2, cur);
        for (r, s) in residues.iter_mut().zip(&sol) {
            let r_mod_q = (&*r % cur).iter_u64_digits().next().unwrap_or(0);
            let t = (s + cur - r_mod_q) % cur * m_inv % cur;
            *r += &modulus * t;
        }
        modulus *= cur;
        if let Some(dist) = try_candidate(k, &residues, &modulus) {
            return Ok(dist);
        }
    }
    Err(Error::ReconstructionFailed(m))
}

fn try_candidate(k: &TransitionKernel, residues: &[BigUint], modulus: &BigUint) -> Option<ExactDist> {
    let mut fracs = Vec::with_capacity(residues.len());
    let mut lcm = BigInt::one();
    for r in residues {
        let (num, den) = reconstruct(r, modulus)?;
        if num.sign() == Sign::Minus {
            return None;
        }
        lcm = lcm.lcm(&den);
        fracs.push((num, den));
    }
    let w: Vec<BigUint> = fracs
        .iter()
        .map(|(n, d)| (n * (&lcm / d)).to_biguint().expect("non-negative"))
        .collect();
    let total: BigUint = w.iter().sum();
    if total != lcm.to_biguint()? {
        return None;
    }
    let mut flow = vec![BigUint::zero(); w.len()];
    for (x, y, n) in k.edges() {
        flow[y] += &w[x] * n;
    }
    let d = k.denom();
    if flow.iter().zip(&w).any(|(f, wy)| *f != wy * d) {
        return None;
    }
    ExactDist::new(w, total).ok()
}
