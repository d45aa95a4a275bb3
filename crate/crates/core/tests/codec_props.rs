use kdecomp::codec::{
    self, decode, encode, CompressorBackend, QuantizedScalar, Registry, TupleDataset, MAX_ABS_MICROS,
};
use kdecomp::estimator;
use proptest::prelude::*;
use rand::{Rng, RngCore};

fn scalar() -> impl Strategy<Value = QuantizedScalar> {
    (-MAX_ABS_MICROS..=MAX_ABS_MICROS).prop_map(|m| QuantizedScalar::from_micros(m).unwrap())
}

fn dataset() -> impl Strategy<Value = TupleDataset> {
    (1usize..6).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(scalar(), n), 0..40)
            .prop_map(move |rows| TupleDataset::from_rows(n, rows).unwrap())
    })
}

proptest! {
    #[test]
    fn scalar_text_round_trip(q in scalar()) {
        prop_assert_eq!(q.to_string().parse::<QuantizedScalar>().unwrap(), q);
    }

    #[test]
    fn render_is_injective(a in scalar(), b in scalar()) {
        prop_assume!(a != b);
        prop_assert_ne!(a.to_string(), b.to_string());
    }

    #[test]
    fn encode_decode_round_trip(d in dataset()) {
        let blob = encode(&d);
        prop_assert_eq!(blob.body_len() + 8, blob.declared_len());
        let back = TupleDataset::from_rows(d.n_cols(), decode(&blob).unwrap()).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn distinct_row_swap_changes_blob(d in dataset()) {
        prop_assume!(d.m_rows() >= 2 && d.row(0) != d.row(1));
        let mut rows: Vec<Vec<QuantizedScalar>> = d.rows().map(<[_]>::to_vec).collect();
        rows.swap(0, 1);
        let swapped = TupleDataset::from_rows(d.n_cols(), rows).unwrap();
        prop_assert_ne!(encode(&swapped), encode(&d));
    }

    #[test]
    fn compressed_bytes_round_trip(bytes in prop::collection::vec(any::<u8>(), 0..4096)) {
        for id in Registry::global().ids() {
            let backend = CompressorBackend::with_default_level(id).unwrap();
            let blob = codec::EncodedBlob::delimit(&bytes);
            let packed = codec::compress(&blob, &backend).unwrap();
            prop_assert_eq!(codec::decompress(&packed, &backend).unwrap(), blob);
        }
    }
}

/// Incompressible input exercises the stored-block fallback.
#[test]
fn random_bytes_respect_expansion_bound() {
    let mut rng = kdecomp::datasets::rng(99);
    for len in [0usize, 1, 100, 65_527, 65_535, 65_536, 200_000, 700_001] {
        let mut bytes = vec![0u8; len];
        rng.fill_bytes(&mut bytes);
        for level in 0..=9 {
            let backend = CompressorBackend::new("deflate", level);
            let e = estimator::estimate_bytes(&bytes, &backend).unwrap();
            let bound = estimator::expansion_bound(e.raw_len, &backend).unwrap();
            assert!(e.k_hat <= bound, "len {len} level {level}: {} > {bound}", e.k_hat);
        }
        for id in ["bzip2", "xz"] {
            let backend = CompressorBackend::new(id, 9);
            let e = estimator::estimate_bytes(&bytes, &backend).unwrap();
            let bound = estimator::expansion_bound(e.raw_len, &backend).unwrap();
            assert!(e.k_hat <= bound, "{id} len {len}: {} > {bound}", e.k_hat);
        }
    }
}

#[test]
fn compression_is_deterministic() {
    let mut rng = kdecomp::datasets::rng(5);
    let rows: Vec<Vec<f64>> = (0..3000)
        .map(|_| (0..6).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect();
    let d = TupleDataset::from_f64_rows(6, rows).unwrap();
    for id in Registry::global().ids() {
        let backend = CompressorBackend::with_default_level(id).unwrap();
        let a = codec::compress(&encode(&d), &backend).unwrap();
        let b = codec::compress(&encode(&d.clone()), &backend).unwrap();
        assert_eq!(a, b, "{id}");
    }
}

/// Same drop applied to the literal tuple layout of the worked example:
/// three rows of four words, drop the second word of every row.
#[test]
fn worked_projection_example() {
    let w = |i: i64, j: i64| QuantizedScalar::from_int(10 * i + j).unwrap();
    let x = TupleDataset::from_rows(4, (1..=3).map(|i| [w(i, 1), w(i, 2), w(i, 3), w(i, 4)])).unwrap();
    let projected = kdecomp::project(&x, &kdecomp::ProjectionSpec::drop(2)).unwrap();
    let body = String::from_utf8(encode(&projected).body().to_vec()).unwrap();
    assert_eq!(
        body,
        "((11.000000,13.000000,14.000000),(21.000000,23.000000,24.000000),(31.000000,33.000000,34.000000))"
    );
}
