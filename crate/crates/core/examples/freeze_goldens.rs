//! Prints the reference values frozen in `tests/common/mod.rs`.
//!
//! Run with `cargo run --release --example freeze_goldens` after any change
//! to the encoding or to the default backend, then update the constants.

use kdecomp::codec::{self, CompressorBackend, QuantizedScalar, TupleDataset};
use kdecomp::datasets;
use kdecomp::decomposition::{verify_decomposition, DecompositionConfig};
use kdecomp::estimator;
use kdecomp::lightcone::{self, CausalRegion, RegionTag};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let backend = CompressorBackend::default();
    println!("backend {}", backend.label());

    let empty = codec::encode(&TupleDataset::empty(1)?);
    println!("EMPTY_BODY_K = {}", codec::compress(&empty, &backend)?.len());
    println!("EMPTY_BYTES_K = {}", estimator::estimate_bytes(&[], &backend)?.k_hat);

    let bits = 1 << 20;
    for (name, d) in [
        ("CONSTANT_BITS_K", datasets::constant_bits(bits)),
        ("ALTERNATING_BITS_K", datasets::alternating_bits(bits)),
        ("RANDOM_BITS_SEED7_K", datasets::random_bits(bits, 7)),
    ] {
        println!("{name} = {}", estimator::estimate(&d, &backend)?.k_hat);
    }

    let d = datasets::hypercube(4, 4000, 21)?;
    let joint = estimator::estimate_joint(&d, &d, &backend)?;
    let single = estimator::estimate(&d, &backend)?;
    println!(
        "JOINT_SELF = ({}, {}) raw {}",
        joint.k_hat, single.k_hat, single.raw_len
    );

    let cfg = DecompositionConfig::default();
    let curve = verify_decomposition(&datasets::parametric_curve(100)?, &cfg, &backend)?;
    println!("CURVE_K_FULL = {} ratio {}", curve.k_full.k_hat, curve.ratio);
    let random = verify_decomposition(&datasets::hypercube(100, 3000, 11)?, &cfg, &backend)?;
    println!(
        "HYPERCUBE_SEED11_K_FULL = {} ratio {}",
        random.k_full.k_hat, random.ratio
    );

    let cloud = lightcone::generate_cloud(lightcone::DEFAULT_POINTS, 3)?;
    for tag in [RegionTag::Full, RegionTag::Inside, RegionTag::Outside] {
        let r = lightcone::study(&cloud, &CausalRegion::new(tag, QuantizedScalar::ZERO), &backend)?;
        println!(
            "LIGHTCONE_SEED3_{}_K = {} (m = {})",
            tag.as_str().to_uppercase(),
            r.k("xyzt"),
            r.m_region
        );
    }
    Ok(())
}
