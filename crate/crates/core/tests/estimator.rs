mod common;

use kdecomp::codec::{encode, CompressorBackend, TupleDataset};
use kdecomp::datasets;
use kdecomp::decomposition::{canonical_family, project};
use kdecomp::estimator::{self, check_map_bound, check_subadditivity, estimate, estimate_bytes, estimate_joint};
use rand::{Rng, RngCore};

use common::*;

fn deflate() -> CompressorBackend {
    CompressorBackend::default()
}

fn seeded_bytes(len: usize, seed: u64) -> Vec<u8> {
    let mut b = vec![0u8; len];
    datasets::rng(seed).fill_bytes(&mut b);
    b
}

/// Mixed corpus: hypercube clouds of assorted shapes.
fn corpus(seed: u64) -> TupleDataset {
    let mut rng = datasets::rng(1000 + seed);
    let n = rng.random_range(2..=6);
    let m = rng.random_range(50..=1500);
    datasets::hypercube(n, m, seed).unwrap()
}

#[test]
fn empty_inputs_have_constant_estimates() {
    let body = kdecomp::codec::compress(&encode(&TupleDataset::empty(3).unwrap()), &deflate()).unwrap();
    assert_eq!(body.len() as u64, EMPTY_BODY_K);
    assert_eq!(estimate_bytes(&[], &deflate()).unwrap().k_hat, EMPTY_BYTES_K);
}

#[test]
fn bit_staircase_golden_values() {
    let bits = 1 << 20;
    let c = estimate(&datasets::constant_bits(bits), &deflate()).unwrap();
    let a = estimate(&datasets::alternating_bits(bits), &deflate()).unwrap();
    let r = estimate(&datasets::random_bits(bits, 7), &deflate()).unwrap();
    assert_eq!(
        (c.k_hat, a.k_hat, r.k_hat),
        (CONSTANT_BITS_K, ALTERNATING_BITS_K, RANDOM_BITS_SEED7_K)
    );
    assert_eq!(c.raw_len, BITS_RAW_LEN);
    assert!(c.k_hat * 100 < c.raw_len);
}

#[test]
fn repeated_string_is_cheaper_than_twice() {
    for len in [1025, 4096, 16_000] {
        let b = seeded_bytes(len, len as u64);
        let bb = [b.as_slice(), b.as_slice()].concat();
        let kb = estimate_bytes(&b, &deflate()).unwrap().k_hat;
        let kbb = estimate_bytes(&bb, &deflate()).unwrap().k_hat;
        assert!(kbb < 2 * kb, "len {len}: {kbb} vs {kb}");
    }
    let b = seeded_bytes(300_000, 3);
    let bb = [b.as_slice(), b.as_slice()].concat();
    let xz = CompressorBackend::new("xz", 9);
    assert!(estimate_bytes(&bb, &xz).unwrap().k_hat < 2 * estimate_bytes(&b, &xz).unwrap().k_hat);
}

#[test]
fn joint_self_collapses_within_the_backend_window() {
    // 160 KB blob: beyond DEFLATE's 32 KiB window, well inside the xz dictionary.
    let d = datasets::hypercube(4, 4000, 21).unwrap();
    assert!(encode(&d).declared_len() >= 100 * 1024);
    let xz = CompressorBackend::new("xz", 9);
    let joint = estimate_joint(&d, &d, &xz).unwrap();
    let single = estimate(&d, &xz).unwrap();
    assert!(
        joint.k_hat <= single.k_hat + single.k_hat / 100,
        "{} vs {}",
        joint.k_hat,
        single.k_hat
    );

    let small = datasets::hypercube(4, 600, 21).unwrap();
    assert!(encode(&small).declared_len() < 32 * 1024);
    let joint = estimate_joint(&small, &small, &deflate()).unwrap();
    let single = estimate(&small, &deflate()).unwrap();
    // Inside the window DEFLATE still pays one match (<= 4 bytes) per 258 bytes repeated.
    let repeat_cost = encode(&small).declared_len().div_ceil(258) * 4;
    assert!(
        joint.k_hat <= single.k_hat + repeat_cost,
        "{} vs {}",
        joint.k_hat,
        single.k_hat
    );
}

#[test]
fn deflate_window_hides_long_repeats() {
    let d = datasets::hypercube(4, 4000, 21).unwrap();
    let joint = estimate_joint(&d, &d, &deflate()).unwrap();
    let single = estimate(&d, &deflate()).unwrap();
    assert!(joint.k_hat as f64 >= 1.9 * single.k_hat as f64);
}

#[test]
fn subadditivity_over_seeded_corpus() {
    let mut violations = Vec::new();
    for seed in 0..50 {
        let (d1, d2) = (corpus(seed), corpus(seed + 500));
        let check = check_subadditivity(&d1, &d2, &deflate()).unwrap();
        if !check.holds {
            violations.push((seed, check));
        }
    }
    assert!(violations.is_empty(), "{violations:?}");
}

#[test]
fn projections_never_exceed_source_plus_slack() {
    let mut checked = 0;
    for seed in 0..50 {
        let d = corpus(seed);
        let full = estimate(&d, &deflate()).unwrap();
        for spec in canonical_family(d.n_cols()).unwrap() {
            let image = estimate(&project(&d, &spec).unwrap(), &deflate()).unwrap();
            let check = check_map_bound(&full, &image);
            assert!(check.holds, "seed {seed} drop {:?}: {check:?}", spec.dropped_cols);
            checked += 1;
        }
    }
    assert!(checked >= 100);
}

#[test]
fn backends_agree_on_random_bits() {
    for (bits, seed) in [(1 << 17, 1), (1 << 18, 2), (1 << 20, 7)] {
        let d = datasets::random_bits(bits, seed);
        let a = estimate(&d, &deflate()).unwrap();
        assert!(a.raw_len >= 1 << 20);
        for other in ["bzip2", "xz"] {
            let b = estimate(&d, &CompressorBackend::new(other, 9)).unwrap();
            let gap = a.k_hat.abs_diff(b.k_hat) as f64 / a.raw_len as f64;
            assert!(gap <= 0.05, "{other}, {bits} bits: {gap}");
        }
    }
}

#[test]
fn estimates_are_deterministic() {
    let d = corpus(7);
    assert_eq!(
        estimate(&d, &deflate()).unwrap(),
        estimate(&d.clone(), &deflate()).unwrap()
    );
}

#[test]
fn estimates_stay_within_expansion_bound() {
    for seed in 0..20 {
        let e = estimate(&corpus(seed), &deflate()).unwrap();
        assert!(e.k_hat >= 1);
        assert!(e.k_hat <= estimator::expansion_bound(e.raw_len, &deflate()).unwrap());
    }
}
