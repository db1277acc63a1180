use fpchain_core::cheeger::crossing_edges;
use fpchain_core::field::{odd_primes_in, ResidueFilter};
use fpchain_core::progression::{ap_decompose, equalize_lengths, half_range_paths, symmetric_ap_decompose};
use fpchain_core::stationary::{square_chain, stationary_exact};
use fpchain_core::{ChainSpec, PrimeFieldCtx, TotalMap, Variant};
use proptest::prelude::*;

fn ctx(p: u64) -> PrimeFieldCtx {
    PrimeFieldCtx::new(p).unwrap()
}

fn union_mask(p: u64, sets: &[Vec<u64>]) -> Vec<bool> {
    let mut m = vec![false; p as usize];
    for s in sets {
        for &x in s {
            assert!(!m[x as usize], "blocks overlap at {x}");
            m[x as usize] = true;
        }
    }
    m
}

/// Every symmetric subset of `supp` for the square chain at `p`: each is a
/// union of classes `{x, -x} ∩ supp`.
fn symmetric_subsets(p: u64) -> (Vec<bool>, Vec<Vec<bool>>) {
    let c = ctx(p);
    let k = square_chain(&c, 1).unwrap().kernel();
    let pi = stationary_exact(&k).unwrap();
    let mut supp = vec![false; p as usize];
    for x in pi.support() {
        supp[x] = true;
    }
    let mut classes: Vec<Vec<u64>> = Vec::new();
    for x in 0..=(p - 1) / 2 {
        let mut cls: Vec<u64> = [x, c.neg(x)].into_iter().filter(|&y| supp[y as usize]).collect();
        cls.dedup();
        if !cls.is_empty() {
            classes.push(cls);
        }
    }
    let mut out = Vec::new();
    for bits in 0u32..1 << classes.len() {
        let mut m = vec![false; p as usize];
        for (i, cls) in classes.iter().enumerate() {
            if bits >> i & 1 == 1 {
                for &x in cls {
                    m[x as usize] = true;
                }
            }
        }
        out.push(m);
    }
    (supp, out)
}

#[test]
fn symmetric_decomposition_covers_and_bounds_complement() {
    for p in [7u64, 11, 13, 17, 19] {
        let c = ctx(p);
        let (supp, subsets) = symmetric_subsets(p);
        let paths = half_range_paths(&c, 2);
        for s in subsets {
            let d = symmetric_ap_decompose(&c, &s, 2, &supp).unwrap();
            assert_eq!(union_mask(p, &d.block_sets(&c)), s, "p={p}");
            let rest: Vec<bool> = (0..p as usize).map(|i| supp[i] && !s[i]).collect();
            let dr = symmetric_ap_decompose(&c, &rest, 2, &supp).unwrap();
            assert_eq!(union_mask(p, &dr.block_sets(&c)), rest);
            let gap = d.block_count().abs_diff(dr.block_count());
            assert!(gap <= paths, "p={p}: {} vs {} blocks, {paths} paths", d.block_count(), dr.block_count());
        }
    }
}

#[test]
fn symmetric_decomposition_rejects_lopsided_sets() {
    let c = ctx(11);
    let supp = vec![true; 11];
    let mut s = vec![false; 11];
    s[3] = true;
    assert!(symmetric_ap_decompose(&c, &s, 2, &supp).is_err());
}

#[test]
fn half_range_path_count() {
    // δ = 1: the half range {0..(p-1)/2} is a single path.
    assert_eq!(half_range_paths(&ctx(11), 1), 1);
    // δ = 2 on p = 11: 0,2,4 and 1,3,5.
    assert_eq!(half_range_paths(&ctx(11), 2), 2);
}

#[test]
fn full_field_is_one_block() {
    for p in [3u64, 5, 7, 31] {
        let d = ap_decompose(&ctx(p), &vec![true; p as usize], 2).unwrap();
        assert_eq!(d.block_count(), 1);
        assert_eq!(d.blocks[0].len, p as usize);
    }
}

#[test]
fn empty_set_breaks_complement_identity() {
    // ∅ has no blocks while F_p has one, so the identity is for non-empty S.
    let c = ctx(7);
    assert_eq!(ap_decompose(&c, &[false; 7], 2).unwrap().block_count(), 0);
    assert_eq!(ap_decompose(&c, &[true; 7], 2).unwrap().block_count(), 1);
}

fn mask_strategy() -> impl Strategy<Value = (u64, Vec<bool>, u64)> {
    let primes = odd_primes_in(5, 400, ResidueFilter::Any);
    (0..primes.len(), 1u64..1000).prop_flat_map(move |(i, g)| {
        let p = primes[i];
        (Just(p), prop::collection::vec(any::<bool>(), p as usize), Just(g))
    })
}

/// A union of up to six runs along `x -> x + delta`, each of length up to `p/4`.
fn run_union_strategy() -> impl Strategy<Value = (u64, Vec<bool>, u64)> {
    let primes = odd_primes_in(101, 1000, ResidueFilter::Any);
    (0..primes.len()).prop_flat_map(move |i| {
        let p = primes[i];
        let runs = prop::collection::vec((0..p, 1..=p / 4), 1..=6);
        (Just(p), runs, 1..p).prop_map(|(p, runs, delta)| {
            let mut m = vec![false; p as usize];
            for (start, len) in runs {
                for j in 0..len {
                    m[((start + j * delta) % p) as usize] = true;
                }
            }
            (p, m, delta)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn decomposition_is_idempotent((p, s, g) in mask_strategy()) {
        prop_assume!(g % p != 0);
        let c = ctx(p);
        let delta = 2 * g % p;
        let d = ap_decompose(&c, &s, delta).unwrap();
        let again = ap_decompose(&c, &union_mask(p, &d.block_sets(&c)), delta).unwrap();
        prop_assert_eq!(&d, &again);
        prop_assert_eq!(d.covered(&c), s.iter().filter(|&&b| b).count());
    }

    #[test]
    fn complement_has_as_many_blocks((p, s, g) in mask_strategy()) {
        prop_assume!(g % p != 0);
        prop_assume!(s.iter().any(|&b| b) && s.iter().any(|&b| !b));
        let c = ctx(p);
        let sc: Vec<bool> = s.iter().map(|b| !b).collect();
        let delta = 2 * g % p;
        prop_assert_eq!(
            ap_decompose(&c, &s, delta).unwrap().block_count(),
            ap_decompose(&c, &sc, delta).unwrap().block_count()
        );
    }

    #[test]
    fn right_endpoints_give_crossing_edges((p, s, g) in mask_strategy()) {
        prop_assume!(g % p != 0);
        let c = ctx(p);
        let k = ChainSpec::new(TotalMap::inverse(&c), g, Variant::LazyHold).unwrap().kernel();
        let blocks = ap_decompose(&c, &s, 2 * g % p).unwrap().block_count() as u64;
        let (out, inn) = crossing_edges(&k, &s);
        if s.iter().all(|&b| b) {
            prop_assert_eq!(out + inn, 0);
        } else {
            prop_assert!(out + inn >= blocks);
        }
    }

    #[test]
    fn equalized_family_lies_in_long_blocks((p, s, delta) in run_union_strategy()) {
        let c = ctx(p);
        let d = ap_decompose(&c, &s, delta).unwrap();
        let size = s.iter().filter(|&&b| b).count();
        prop_assume!(d.block_count() > 0 && size >= 4 * d.block_count());
        let fam = equalize_lengths(&c, &d, d.block_count()).unwrap();
        let piece = size / (4 * d.block_count());
        for x in fam.elements() {
            prop_assert!(s[x as usize]);
        }
        prop_assert_eq!(fam.common_len().unwrap(), piece);
        prop_assert!(4 * fam.total_len() >= size, "{} of {}", fam.total_len(), size);
    }
}
