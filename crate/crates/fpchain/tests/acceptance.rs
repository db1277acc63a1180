//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.
//!
//! Grids used below:
//! - averaged square identity: every odd prime `p ≤ 5003`, frequencies
//!   `k ∈ {1, 2, (p-1)/2}`, 50 intervals per `(p, k)` with start and length
//!   drawn from ChaCha20 seeded by `p`; integer evaluation for `p ≤ 101`.
//! - Weil ratios: the 20 primes in [`WEIL_PRIMES`], 100 twists `(α, k)` each.
//! - support fraction: the first 20 primes `≡ 1 (mod 4)` above `10^5`.

use std::process::ExitCode;
use std::time::Instant;

use fpchain::par_cheeger_exact;
use fpchain_core::cheeger;
use fpchain_core::expsum::{self, PhaseTable};
use fpchain_core::field::{is_prime, odd_primes_in, ResidueFilter};
use fpchain_core::kernel::{self, StartPolicy};
use fpchain_core::progression::{ap_decompose, APFamily, Progression};
use fpchain_core::stationary;
use fpchain_core::{rng, ChainSpec, Distribution, PrimeFieldCtx, TotalMap, TransitionKernel, Variant};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ctx(p: u64) -> PrimeFieldCtx {
    PrimeFieldCtx::new(p).expect("prime")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_p11() -> Outcome {
    let c = ctx(11);
    let want = Distribution::Exact(
        kernel::ExactDist::from_weights(&[2, 1, 4, 2, 4, 2, 2, 0, 2, 0, 3]).map_err(|e| e.to_string())?,
    );
    let k = stationary::square_chain(&c, 1).map_err(|e| e.to_string())?.kernel();
    let exact = stationary::stationary_exact(&k).map_err(|e| e.to_string())?;
    let formula = stationary::square_stationary_formula(&c, 1).map_err(|e| e.to_string())?;
    ensure(exact == want, || format!("exact solve gave {:?}", exact.to_f64s()))?;
    ensure(formula == want, || format!("formula gave {:?}", formula.to_f64s()))?;
    Ok("pi = (2,1,4,2,4,2,2,0,2,0,3)/22 from both".into())
}

fn square_sweep() -> Outcome {
    let cases: Vec<(u64, u64)> = odd_primes_in(3, 499, ResidueFilter::ThreeMod4)
        .into_iter()
        .flat_map(|p| [1u64, 2, 3].into_iter().filter(move |g| g % p != 0).map(move |g| (p, g)))
        .collect();
    let n = cases.len();
    cases.into_par_iter().try_for_each(|(p, g)| -> Result<(), String> {
        let c = ctx(p);
        let k = stationary::square_chain(&c, g).map_err(|e| e.to_string())?.kernel();
        let rs = stationary::recurrent_classes(&k);
        ensure(rs.recurrent_count() == 1, || format!("p={p} γ={g}: {} recurrent classes", rs.recurrent_count()))?;
        let exact = stationary::stationary_exact(&k).map_err(|e| e.to_string())?;
        let formula = stationary::square_stationary_formula(&c, g).map_err(|e| e.to_string())?;
        ensure(exact == formula, || format!("p={p} γ={g}: formula differs from exact solve"))?;
        if g == 1 {
            let per = stationary::period(&k, rs.unique_recurrent().map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            ensure(per == 1, || format!("p={p}: period {per}"))?;
        }
        Ok(())
    })?;
    Ok(format!("{n} (p, γ) cases; γ = 3 skipped at p = 3 where it vanishes"))
}

fn averaged_identity() -> Outcome {
    let primes = odd_primes_in(3, 5003, ResidueFilter::Any);
    let results: Vec<Result<(f64, usize), String>> = primes
        .par_iter()
        .map(|&p| {
            let c = ctx(p);
            let table = PhaseTable::new(&c);
            let sq = TotalMap::square(&c);
            let mut r = rng::seeded(p);
            let mut worst = 0.0f64;
            let mut exact_checked = 0;
            let mut ks = vec![1, 2, (p - 1) / 2];
            ks.retain(|&k| k % p != 0);
            ks.dedup();
            for &k in &ks {
                for _ in 0..50 {
                    let start = rng::below(&mut r, p);
                    let len = rng::between(&mut r, 1, p) as usize;
                    let want = p as f64 * len as f64;
                    let v = expsum::averaged_square_sum(&sq, k, start, len, &table).map_err(|e| e.to_string())?;
                    let rel = (v - want).abs() / want;
                    if rel > 1e-6 {
                        return Err(format!("p={p} k={k} I=[{start},+{len}): {v} vs {want}"));
                    }
                    worst = worst.max(rel);
                    if p <= 101 {
                        let exact = expsum::averaged_square_sum_exact(&sq, k, start, len).map_err(|e| e.to_string())?;
                        if exact != Some((p * len as u64) as i64) {
                            return Err(format!("p={p} k={k} I=[{start},+{len}): exact path gave {exact:?}"));
                        }
                        exact_checked += 1;
                    }
                }
            }
            Ok((worst, exact_checked))
        })
        .collect();
    let mut worst = 0.0f64;
    let mut exact = 0;
    for r in results {
        let (w, e) = r?;
        worst = worst.max(w);
        exact += e;
    }
    Ok(format!("{} primes, max rel err {worst:.2e}, {exact} exact integer checks", primes.len()))
}

const WEIL_PRIMES: [u64; 20] = [
    101, 211, 307, 401, 503, 601, 701, 809, 907, 1009, 2003, 3001, 4001, 5003, 6007, 7001, 8009, 9001, 9973, 10007,
];

fn weil_suite() -> Outcome {
    for p in WEIL_PRIMES {
        ensure(is_prime(p), || format!("{p} is not prime"))?;
    }
    let worst: Vec<Result<(u64, f64), String>> = WEIL_PRIMES
        .par_iter()
        .map(|&p| {
            let c = ctx(p);
            let table = PhaseTable::new(&c);
            let f = TotalMap::inverse(&c);
            let mut r = rng::seeded(0x5eed ^ p);
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let alpha = rng::below(&mut r, p);
                let k = rng::between(&mut r, 1, p - 1);
                let rec = expsum::weil_record(&f, alpha, k, &table).map_err(|e| format!("p={p}: {e}"))?;
                worst = worst.max(rec.empirical_constant);
            }
            Ok((p, worst))
        })
        .collect();
    let mut max = (0, 0.0f64);
    for w in worst {
        let (p, v) = w?;
        if v > max.1 {
            max = (p, v);
        }
    }
    ensure(max.1 <= 4.0, || format!("ratio {:.4} at p={}", max.1, max.0))?;
    Ok(format!("max |sum|/sqrt(p) = {:.4} (p = {})", max.1, max.0))
}

fn conjecture() -> Outcome {
    let lim = stationary::conjectured_limit();
    ensure((lim.alpha - 0.2956).abs() <= 5e-5, || format!("alpha = {}", lim.alpha))?;
    ensure((lim.limit - 0.5804).abs() <= 5e-5, || format!("limit = {}", lim.limit))?;
    let primes: Vec<u64> = odd_primes_in(100_001, 101_000, ResidueFilter::OneMod4).into_iter().take(20).collect();
    ensure(primes.len() == 20, || "fewer than 20 primes in range".into())?;
    let fracs: Vec<Result<f64, String>> = primes
        .par_iter()
        .map(|&p| {
            let rep = stationary::support_fraction(&ctx(p), 1).map_err(|e| e.to_string())?;
            rep.fraction().ok_or_else(|| format!("p={p}: {} recurrent classes", rep.recurrent_classes))
        })
        .collect();
    let fracs: Vec<f64> = fracs.into_iter().collect::<Result<_, _>>()?;
    let mean = fracs.iter().sum::<f64>() / fracs.len() as f64;
    ensure((mean - lim.limit).abs() <= 0.02, || format!("mean support fraction {mean:.4}, limit {:.4}", lim.limit))?;
    Ok(format!(
        "alpha = {:.6}, limit = {:.6}, mean fraction over p in [{}, {}] = {mean:.4}",
        lim.alpha,
        lim.limit,
        primes[0],
        primes[19]
    ))
}

fn fixtures() -> Vec<(String, ChainSpec)> {
    let mk = |p: u64, map: fn(&PrimeFieldCtx) -> TotalMap, g: u64, v: Variant, name: &str| {
        let c = ctx(p);
        (format!("{name} p={p} γ={g} {}", v.name()), ChainSpec::new(map(&c), g, v).expect("valid chain"))
    };
    vec![
        mk(11, TotalMap::inverse, 1, Variant::LazyHold, "1/x"),
        mk(13, TotalMap::inverse, 2, Variant::LazyHold, "1/x"),
        mk(7, TotalMap::inverse, 1, Variant::NoiseZero, "1/x"),
        mk(13, TotalMap::inverse, 1, Variant::NonLazy, "1/x"),
        mk(7, TotalMap::square, 1, Variant::NonLazy, "x^2"),
        mk(11, TotalMap::square, 1, Variant::NonLazy, "x^2"),
        mk(11, TotalMap::square, 2, Variant::NonLazy, "x^2"),
        mk(13, TotalMap::square, 3, Variant::LazyHold, "x^2"),
        mk(13, |c| TotalMap::linear(c, 2), 1, Variant::LazyHold, "2x"),
        (format!("x+γ p=13 γ=1 {}", Variant::PureAdditive.name()), ChainSpec::pure_additive(&ctx(13), 1).unwrap()),
    ]
}

/// Straight subset enumeration over `supp π` with rational arithmetic.
fn naive_cheeger(k: &TransitionKernel, pi: &Distribution) -> (BigRational, Vec<usize>) {
    let supp = pi.support();
    let mass: Vec<BigRational> = (0..k.n()).map(|i| pi.ratio(i).expect("exact")).collect();
    let mut best: Option<(BigRational, Vec<usize>)> = None;
    for bits in 1u64..(1 << supp.len()) - 1 {
        let mut inside = vec![false; k.n()];
        let mut members = Vec::new();
        for (i, &x) in supp.iter().enumerate() {
            if bits >> i & 1 == 1 {
                inside[x] = true;
                members.push(x);
            }
        }
        let mut flow = BigRational::zero();
        let mut ms = BigRational::zero();
        for x in 0..k.n() {
            if inside[x] {
                ms += &mass[x];
                for y in 0..k.n() {
                    if !inside[y] {
                        let pr = k.prob(x, y);
                        flow += &mass[x] * BigRational::new(BigInt::from(*pr.numer()), BigInt::from(*pr.denom()));
                    }
                }
            }
        }
        let rest = BigRational::from_integer(1.into()) - &ms;
        let ratio = flow / if ms < rest { ms } else { rest };
        if best.as_ref().is_none_or(|(r, s)| ratio < *r || (ratio == *r && members < *s)) {
            best = Some((ratio, members));
        }
    }
    best.expect("support has at least two states")
}

fn cheeger_oracle() -> Outcome {
    for (name, spec) in fixtures() {
        let k = spec.kernel();
        let pi = stationary::stationary_exact(&k).map_err(|e| e.to_string())?;
        let got = par_cheeger_exact(&k, &pi, cheeger::EXACT_LIMIT).map_err(|e| format!("{name}: {e}"))?;
        let seq = cheeger::cheeger_exact(&k, &pi, cheeger::EXACT_LIMIT).map_err(|e| format!("{name}: {e}"))?;
        let (ratio, subset) = naive_cheeger(&k, &pi);
        ensure(got == seq, || format!("{name}: parallel and sequential scans differ"))?;
        ensure(got.ratio == ratio && got.subset == subset, || {
            format!("{name}: scan gave {} {:?}, naive {} {:?}", got.ratio, got.subset, ratio, subset)
        })?;
    }
    Ok("10 fixtures, equal h and minimizer".into())
}

fn cheeger_tv() -> Outcome {
    let mut worst_margin = f64::INFINITY;
    let mut steps_max = 0;
    for (name, spec) in fixtures() {
        let k = spec.kernel();
        let pi = stationary::stationary_exact(&k).map_err(|e| e.to_string())?;
        let h = cheeger::cheeger_exact(&k, &pi, cheeger::EXACT_LIMIT).map_err(|e| e.to_string())?;
        let h = h.ratio.to_f64().unwrap_or(0.0);
        for c in [1.0, 2.0] {
            let chk = cheeger::tv_bound_check(&k, &pi, h, c).map_err(|e| format!("{name}: {e}"))?;
            ensure(chk.passed, || format!("{name} c={c}: TV {} after {} steps > {}", chk.max_tv, chk.steps, chk.threshold))?;
            worst_margin = worst_margin.min(chk.threshold - chk.max_tv);
            steps_max = steps_max.max(chk.steps);
        }
    }
    Ok(format!("10 chains x c in {{1, 2}}, up to {steps_max} steps, smallest margin {worst_margin:.3e}"))
}

fn speedup() -> Outcome {
    let c = ctx(1009);
    let starts = StartPolicy::Sampled { seed: 1009 }.resolve(&c, 1);
    let lazy = ChainSpec::new(TotalMap::inverse(&c), 1, Variant::LazyHold).map_err(|e| e.to_string())?.kernel();
    let walk = ChainSpec::pure_additive(&c, 1).map_err(|e| e.to_string())?.kernel();
    let uniform = Distribution::uniform(1009, true);
    let (a, b) = rayon::join(
        || stationary::mixing_time(&lazy, &uniform, 0.25, &starts, 2000),
        || stationary::tv_after(&walk, &uniform, &starts, 2000),
    );
    let a = a.map_err(|e| format!("inverse chain: {e}"))?;
    let b = b.map_err(|e| e.to_string())?;
    ensure(b >= 0.5, || format!("additive walk TV {b:.4} < 1/2 at 2000 steps"))?;
    Ok(format!("{} starts; 1/x chain t_mix(1/4) = {}, x+1 walk TV at 2000 = {b:.4}", starts.len(), a.t_mix))
}

fn maximal_runs(p: u64, set: &[bool], delta: u64) -> Vec<Progression> {
    let mut out = Vec::new();
    for x in 0..p {
        if set[x as usize] && !set[((x + p - delta) % p) as usize] {
            let mut len = 0;
            let mut y = x;
            while set[y as usize] {
                len += 1;
                y = (y + delta) % p;
            }
            out.push(Progression::new(x, len));
        }
    }
    out
}

fn decompositions() -> Outcome {
    let cases: Vec<(u64, u64)> =
        odd_primes_in(3, 17, ResidueFilter::Any).into_iter().flat_map(|p| [(p, 1), (p, 2)]).collect();
    let checked: Vec<Result<u64, String>> = cases
        .par_iter()
        .map(|&(p, g)| {
            let c = ctx(p);
            let delta = 2 * g % p;
            let k = ChainSpec::new(TotalMap::inverse(&c), g, Variant::LazyHold).map_err(|e| e.to_string())?.kernel();
            let n = p as usize;
            let mut count = 0;
            for bits in 1u64..(1 << n) - 1 {
                let s: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
                let sc: Vec<bool> = s.iter().map(|b| !b).collect();
                let d = ap_decompose(&c, &s, delta).map_err(|e| e.to_string())?;
                let runs = maximal_runs(p, &s, delta);
                // Each piece of any decomposition contains at most one point whose
                // predecessor lies outside S, so the run count is a lower bound.
                let heads = (0..p).filter(|&x| s[x as usize] && !s[((x + p - delta) % p) as usize]).count();
                ensure(d.blocks == runs && d.block_count() == heads, || {
                    format!("p={p} γ={g} S={bits:b}: blocks {:?}", d.blocks)
                })?;
                let covered: usize = d.blocks.iter().map(|b| b.len).sum();
                ensure(covered == s.iter().filter(|&&b| b).count(), || format!("p={p} S={bits:b}: cover mismatch"))?;
                let dc = ap_decompose(&c, &sc, delta).map_err(|e| e.to_string())?;
                ensure(dc.block_count() == d.block_count(), || {
                    format!("p={p} γ={g} S={bits:b}: {} blocks vs {} for complement", d.block_count(), dc.block_count())
                })?;
                let (out, inn) = cheeger::crossing_edges(&k, &s);
                ensure(out + inn >= d.block_count() as u64, || {
                    format!("p={p} γ={g} S={bits:b}: e(S,S^c)+e(S^c,S) = {} < {}", out + inn, d.block_count())
                })?;
                count += 1;
            }
            Ok(count)
        })
        .collect();
    let mut total = 0;
    for c in checked {
        total += c?;
    }
    Ok(format!("{total} proper subsets over p ≤ 17, γ in {{1, 2}}"))
}

/// `j` disjoint progressions of difference `delta` and length `len`, placed
/// at random gaps along the orbit of `delta`.
fn random_family(c: &PrimeFieldCtx, r: &mut rng::Rng, delta: u64, j: usize, len: usize) -> APFamily {
    let p = c.p() as usize;
    let slack = p - j * len;
    let mut cuts: Vec<usize> = (0..j).map(|_| rng::below(r, slack as u64 + 1) as usize).collect();
    cuts.sort_unstable();
    let offset = rng::below(r, c.p());
    let progs = cuts
        .iter()
        .enumerate()
        .map(|(i, &cut)| {
            let pos = (cut + i * len) as u64;
            Progression::new(c.add(offset, c.mul(pos, delta)), len)
        })
        .collect();
    APFamily::new(c, delta, progs).expect("disjoint by construction")
}

fn count_regime() -> Outcome {
    let p = 1009u64;
    let c = ctx(p);
    let f = TotalMap::inverse(&c);
    let need = (p as f64).powf(1.6);
    let mut r = rng::seeded(36);
    let mut min_ratio = f64::INFINITY;
    let mut done = 0;
    while done < 50 {
        let j = rng::between(&mut r, 1, 6) as usize;
        let l = rng::between(&mut r, 8, (p as usize / j) as u64 * 9 / 10) as usize;
        let l2 = rng::between(&mut r, 8, (p as usize / j) as u64 * 9 / 10) as usize;
        if ((j * l * l2) as f64) < need {
            continue;
        }
        let d1 = rng::between(&mut r, 1, p - 1);
        let d2 = rng::between(&mut r, 1, p - 1);
        let s = random_family(&c, &mut r, d1, j, l);
        let s2 = random_family(&c, &mut r, d2, j, l2);
        let rep = expsum::count_solutions(&f, &s, &s2, 0.1).map_err(|e| e.to_string())?;
        ensure(rep.in_regime, || format!("J={j} L={l} L'={l2} reported outside the regime"))?;
        ensure(rep.count as f64 >= 0.1 * rep.expected, || {
            format!("J={j} L={l} L'={l2} δ={d1},{d2}: count {} < 0.1·{:.2}", rep.count, rep.expected)
        })?;
        min_ratio = min_ratio.min(rep.ratio);
        done += 1;
    }
    Ok(format!("50 families with JLL' >= p^1.6, smallest count·p/(|S||S'|) = {min_ratio:.4}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("golden stationary law, square chain p=11", golden_p11),
        ("square chain sweep, p = 3 mod 4 up to 499", square_sweep),
        ("averaged square identity grid", averaged_identity),
        ("Weil ratio for 1/x", weil_suite),
        ("support fraction limit", conjecture),
        ("Cheeger scan vs naive enumerator", cheeger_oracle),
        ("Cheeger TV bound", cheeger_tv),
        ("1/x chain vs additive walk at p=1009", speedup),
        ("progression decompositions, p <= 17", decompositions),
        ("solution count regime at p=1009", count_regime),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let res = run();
        let secs = t0.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
