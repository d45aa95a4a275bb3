//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Pass a substring to run only matching criteria.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use kdecomp::codec::{self, decode, encode, CompressorBackend, QuantizedScalar, TupleDataset, MAX_ABS_MICROS};
use kdecomp::datasets;
use kdecomp::decomposition::{verify_decomposition, DecompositionConfig, DecompositionReport};
use kdecomp::estimator::{self, estimate};
use kdecomp::lightcone::{
    classify, generate_cloud, highpass_filter, lowpass_filter, study, CausalRegion, LightconeReport, RegionTag,
};
use rand::Rng;

use common::*;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

type Criterion = (&'static str, fn() -> Verdict);

fn deflate() -> CompressorBackend {
    CompressorBackend::default()
}

fn staircase() -> Verdict {
    let start = Instant::now();
    let c = estimate(&datasets::constant_bits(1 << 20), &deflate()).unwrap().k_hat;
    let a = estimate(&datasets::alternating_bits(1 << 20), &deflate())
        .unwrap()
        .k_hat;
    let r = estimate(&datasets::random_bits(1 << 20, 7), &deflate()).unwrap().k_hat;
    let elapsed = start.elapsed();
    let ratio = r as f64 / a as f64;
    Verdict::new(
        c < a && a < r && ratio >= 10.0 && elapsed <= Duration::from_secs(5),
        format!(
            "constant {c} < alternating {a} < random {r}: {}; random/alternating {ratio:.2} (need >= 10); {:.1}s (need <= 5s)",
            c < a && a < r,
            elapsed.as_secs_f64()
        ),
    )
}

fn in_band(ratio: f64) -> bool {
    (95.0..=110.0).contains(&ratio)
}

fn random_ratio_suite() -> Verdict {
    let mut ok = true;
    let mut lines = Vec::new();
    let mut slowest = Duration::ZERO;
    for seed in 11..21 {
        let start = Instant::now();
        let d = datasets::hypercube(100, 3000, seed).unwrap();
        let r = verify_decomposition(&d, &DecompositionConfig::default(), &deflate()).unwrap();
        slowest = slowest.max(start.elapsed());
        ok &= in_band(r.ratio) && r.lower_ok;
        lines.push(format!(
            "{seed}:{:.4}{}",
            r.ratio,
            if r.lower_ok { "" } else { "(lower violated)" }
        ));
    }
    ok &= slowest <= Duration::from_secs(120);
    Verdict::new(
        ok,
        format!(
            "ratio per seed [{}] in [95, 110]; slowest run {:.0}s (need <= 120s)",
            lines.join(" "),
            slowest.as_secs_f64()
        ),
    )
}

fn structured_ratio() -> Verdict {
    let cfg = DecompositionConfig::default();
    let curve: DecompositionReport =
        verify_decomposition(&datasets::parametric_curve(100).unwrap(), &cfg, &deflate()).unwrap();
    let random = estimate(&datasets::hypercube(100, 3000, 11).unwrap(), &deflate()).unwrap();
    let reduction = random.k_hat as f64 / curve.k_full.k_hat as f64;
    Verdict::new(
        in_band(curve.ratio) && reduction >= 5.0,
        format!(
            "curve ratio {:.4} (need [95, 110]); k_full {} vs matched random {} = {reduction:.2}x (need >= 5x)",
            curve.ratio, curve.k_full.k_hat, random.k_hat
        ),
    )
}

fn small_n_bases() -> Verdict {
    let mut violations = [Vec::new(), Vec::new()];
    for case in 0..50u64 {
        let m = datasets::rng(4000 + case).random_range(50..=1500);
        for (slot, n) in [2, 3].into_iter().enumerate() {
            let d = datasets::hypercube(n, m, case).unwrap();
            let s = estimator::slack(encode(&d).declared_len()) as f64;
            let cfg = DecompositionConfig {
                slack_log: 0.0,
                slack_const: s,
                ..Default::default()
            };
            let r = verify_decomposition(&d, &cfg, &deflate()).unwrap();
            if !r.lower_ok {
                violations[slot].push(format!("{case}(m={m},{:+.0})", r.weighted_sum + s - r.lhs));
            }
        }
    }
    let total = violations[0].len() + violations[1].len();
    let show = |v: &Vec<String>| v.iter().take(6).cloned().collect::<Vec<_>>().join(" ");
    Verdict::new(
        total <= 2,
        format!(
            "violations over 50 cases: n=2 {} [{}{}], n=3 {} [{}] (tolerate <= 2)",
            violations[0].len(),
            show(&violations[0]),
            if violations[0].len() > 6 { " ..." } else { "" },
            violations[1].len(),
            show(&violations[1]),
        ),
    )
}

/// Full, inside and outside reports for ten seeds, with per-seed runtime.
fn lightcone_suite() -> &'static Vec<([LightconeReport; 3], Duration)> {
    static SUITE: OnceLock<Vec<([LightconeReport; 3], Duration)>> = OnceLock::new();
    SUITE.get_or_init(|| {
        (0..10)
            .map(|seed| {
                let start = Instant::now();
                let cloud = generate_cloud(LIGHTCONE_M, seed).unwrap();
                let reports = [RegionTag::Full, RegionTag::Inside, RegionTag::Outside]
                    .map(|tag| study(&cloud, &CausalRegion::new(tag, QuantizedScalar::ZERO), &deflate()).unwrap());
                (reports, start.elapsed())
            })
            .collect()
    })
}

fn lightcone_ordering() -> Verdict {
    let mut order_fail = Vec::new();
    let mut density_fail = Vec::new();
    let (mut inside_max, mut outside_min, mut outside_max) = (0f64, f64::MAX, 0f64);
    let mut slowest = Duration::ZERO;
    for ([full, inside, outside], elapsed) in lightcone_suite() {
        let seed = full.seed;
        slowest = slowest.max(*elapsed);
        let (f, i, o) = (full.k("xyzt"), inside.k("xyzt"), outside.k("xyzt"));
        if !(i < o && o < f) {
            order_fail.push(seed);
        }
        let di = inside.density_by_subset.get("xyzt").copied().unwrap();
        let dout = outside.density_by_subset.get("xyzt").copied().unwrap();
        if di >= dout {
            density_fail.push(format!("{seed}({di:.4}>={dout:.4})"));
        }
        inside_max = inside_max.max(i as f64 / f as f64);
        outside_min = outside_min.min(o as f64 / f as f64);
        outside_max = outside_max.max(o as f64 / f as f64);
    }
    let ratios_ok = inside_max <= 0.35 && outside_min >= 0.6 && outside_max < 1.0;
    Verdict::new(
        order_fail.is_empty() && density_fail.is_empty() && ratios_ok && slowest <= Duration::from_secs(60),
        format!(
            "k ordering fails on seeds {order_fail:?}; density inside < outside fails on {}/10 [{}]; \
             inside/full max {inside_max:.4} (need <= 0.35); outside/full in [{outside_min:.4}, {outside_max:.4}] \
             (need [0.6, 1.0)); slowest seed {:.0}s (need <= 60s)",
            density_fail.len(),
            density_fail.join(" "),
            slowest.as_secs_f64()
        ),
    )
}

fn spreads() -> Verdict {
    let mut ok = true;
    let (mut full_max, mut narrowest_gap) = (0f64, f64::MAX);
    for ([full, inside, _], _) in lightcone_suite() {
        let (sf, si) = (full.triple_spread(), inside.triple_spread());
        ok &= sf <= 0.02 && si > sf;
        full_max = full_max.max(sf);
        narrowest_gap = narrowest_gap.min(si - sf);
    }
    Verdict::new(
        ok,
        format!(
            "full-region 3-coordinate spread max {:.3}% (need <= 2%); inside minus full spread min {:+.3}% (need > 0)",
            100.0 * full_max,
            100.0 * narrowest_gap
        ),
    )
}

fn geometry_oracle() -> Verdict {
    let cloud = generate_cloud(1_000_000, 0).unwrap();
    let inside = cloud
        .points
        .rows()
        .filter(|p| classify(p, QuantizedScalar::ZERO) == RegionTag::Inside)
        .count();
    let frac = inside as f64 / 1e6;
    let target = std::f64::consts::PI / 24.0;
    Verdict::new(
        (frac - target).abs() <= 0.005,
        format!("inside fraction {frac:.5} vs pi/24 = {target:.5} (need within 0.005)"),
    )
}

fn filters() -> Verdict {
    let cloud = generate_cloud(LIGHTCONE_M, LIGHTCONE_SEED).unwrap();
    let t = filter_threshold();
    let low = lowpass_filter(&cloud, QuantizedScalar::ZERO, t, &deflate())
        .unwrap()
        .passed;
    let high = highpass_filter(&cloud, QuantizedScalar::ZERO, t, &deflate())
        .unwrap()
        .passed;
    Verdict::new(
        low == [RegionTag::Inside] && high == [RegionTag::Full, RegionTag::Outside],
        format!("threshold {t}: low-pass passed {low:?}, high-pass passed {high:?}"),
    )
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_kdecomp"))
        .args(args)
        .env_remove("KDECOMP_BACKEND")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn dir_contents(dir: &Path) -> Vec<(std::ffi::OsString, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn determinism() -> Verdict {
    let manifests: [&[&str]; 5] = [
        &["estimate", "--generate", "random:2^20", "--seed", "7"],
        &["decompose", "--generate", "hypercube:n=10,m=3000", "--seed", "11"],
        &["probe", "--n-schedule", "2,5,10", "--m", "500", "--seed", "1"],
        &["filter", "--mode", "low", "--threshold", "233100", "--seed", "3"],
        &["lightcone", "--seed", "3"],
    ];
    let mut mismatched = Vec::new();
    for args in manifests {
        if run_cli(args) != run_cli(args) {
            mismatched.push(args[0]);
        }
    }
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let plots: Vec<_> = dirs
        .iter()
        .map(|d| {
            let stdout = run_cli(&[
                "lightcone",
                "--m",
                "40000",
                "--seed",
                "3",
                "--plot",
                d.path().to_str().unwrap(),
            ]);
            (stdout, dir_contents(d.path()))
        })
        .collect();
    let svgs = plots[0].1.len();
    if plots[0] != plots[1] {
        mismatched.push("lightcone --plot");
    }
    Verdict::new(
        mismatched.is_empty() && svgs == 18,
        format!("6 reference manifests run twice; differing outputs {mismatched:?}; {svgs} SVG files compared"),
    )
}

fn random_dataset(seed: u64) -> TupleDataset {
    let mut rng = datasets::rng(90_000 + seed);
    let n = rng.random_range(1..=8);
    let m = rng.random_range(0..=200);
    // Mix of unit-range, large and extreme magnitudes.
    let bound = [
        datasets::unit_scalar(&mut rng).micros().abs().max(1),
        1_000_000_000,
        MAX_ABS_MICROS,
    ][seed as usize % 3];
    let rows: Vec<Vec<QuantizedScalar>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| QuantizedScalar::from_micros(rng.random_range(-bound..=bound)).unwrap())
                .collect()
        })
        .collect();
    TupleDataset::from_rows(n, rows).unwrap()
}

fn codec_properties() -> Verdict {
    let backend = deflate();
    let (mut round_trip_fail, mut bound_fail) = (Vec::new(), Vec::new());
    for seed in 0..1000 {
        let d = random_dataset(seed);
        let blob = encode(&d);
        let rows: Vec<Vec<QuantizedScalar>> = d.rows().map(<[_]>::to_vec).collect();
        let bytes = codec::compress(&blob, &backend).unwrap();
        if decode(&blob).unwrap() != rows || codec::decompress(&bytes, &backend).unwrap() != blob {
            round_trip_fail.push(seed);
        }
        let raw = blob.declared_len();
        if bytes.len() as u64 > estimator::expansion_bound(raw, &backend).unwrap() {
            bound_fail.push(seed);
        }
    }
    Verdict::new(
        round_trip_fail.is_empty() && bound_fail.is_empty(),
        format!("1000 datasets: round-trip failures {round_trip_fail:?}; expansion-bound failures {bound_fail:?}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("staircase", staircase),
        ("decomposition_ratio_random", random_ratio_suite),
        ("decomposition_ratio_structured", structured_ratio),
        ("small_n_bases", small_n_bases),
        ("lightcone_ordering", lightcone_ordering),
        ("projection_spreads", spreads),
        ("geometry_oracle", geometry_oracle),
        ("filters", filters),
        ("determinism", determinism),
        ("codec_properties", codec_properties),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if std::env::args().any(|a| a == "--list") {
        for (name, _) in criteria {
            println!("{name}: test");
        }
        return;
    }
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        if !filters.is_empty() && !filters.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let v = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Verdict::new(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name} ({:.1}s): {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!("\nacceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
