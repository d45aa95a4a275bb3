//! Seeded dataset generators: bit strings, hypercube point clouds and the
//! parametric test curve.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::codec::{CodecError, QuantizedScalar, TupleDataset, SCALE};

/// The generator used everywhere a seed is consumed. ChaCha20 output is
/// specified bit-for-bit, so seeded datasets are identical across platforms.
pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Uniform on `[-1, 1]`, drawn directly on the micro-unit grid.
pub fn unit_scalar<R: Rng>(rng: &mut R) -> QuantizedScalar {
    QuantizedScalar::from_micros(rng.random_range(-SCALE..=SCALE)).expect("within [-1, 1]")
}

fn bits(len: usize, mut bit: impl FnMut(usize) -> bool) -> TupleDataset {
    let mut d = TupleDataset::with_capacity(1, len).expect("one column");
    for i in 0..len {
        let v = if bit(i) {
            QuantizedScalar::ONE
        } else {
            QuantizedScalar::ZERO
        };
        d.push_row(&[v]).expect("one column");
    }
    d
}

/// `len` ones in a single column.
pub fn constant_bits(len: usize) -> TupleDataset {
    bits(len, |_| true)
}

/// `0, 1, 0, 1, ...` (the value at 1-based position `i` is 1 iff `i` is even).
pub fn alternating_bits(len: usize) -> TupleDataset {
    bits(len, |i| (i + 1) % 2 == 0)
}

pub fn random_bits(len: usize, seed: u64) -> TupleDataset {
    let mut rng = rng(seed);
    bits(len, |_| rng.random::<bool>())
}

/// `m` points uniform in `[-1, 1]^n`, generated row by row.
pub fn hypercube(n: usize, m: usize, seed: u64) -> Result<TupleDataset, CodecError> {
    let mut rng = rng(seed);
    let mut d = TupleDataset::with_capacity(n, m)?;
    let mut row = Vec::with_capacity(n);
    for _ in 0..m {
        row.clear();
        row.extend((0..n).map(|_| unit_scalar(&mut rng)));
        d.push_row(&row)?;
    }
    Ok(d)
}

/// Points `(a cos t, a^2 sin t, a, 0, ..., 0)` for `a = -1, -0.99, ..., 1`
/// (outer loop) and `t = 0, 0.1, ..., 6.2` (inner loop): 201 x 63 rows.
pub fn parametric_curve(n: usize) -> Result<TupleDataset, CodecError> {
    if n < 3 {
        return Err(CodecError::Input {
            line: 0,
            message: format!("the curve needs n >= 3 columns, got {n}"),
        });
    }
    let a_steps = 201;
    let t_steps = (0..)
        .take_while(|k| *k as f64 * 0.1 <= 2.0 * std::f64::consts::PI)
        .count();
    let mut d = TupleDataset::with_capacity(n, a_steps * t_steps)?;
    let mut row = vec![QuantizedScalar::ZERO; n];
    for ai in 0..a_steps {
        let a = -1.0 + ai as f64 * 0.01;
        for ti in 0..t_steps {
            let t = ti as f64 * 0.1;
            row[0] = QuantizedScalar::from_f64(a * t.cos())?;
            row[1] = QuantizedScalar::from_f64(a * a * t.sin())?;
            row[2] = QuantizedScalar::from_f64(a)?;
            d.push_row(&row)?;
        }
    }
    Ok(d)
}

/// Generator selector as written on the command line, e.g. `constant:2^20`,
/// `random:1048576`, `hypercube:n=100,m=3000`, `curve:n=100`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    Constant { len: usize },
    Alternating { len: usize },
    Random { len: usize },
    Hypercube { n: usize, m: usize },
    Curve { n: usize },
}

impl GeneratorSpec {
    pub fn generate(&self, seed: u64) -> Result<TupleDataset, CodecError> {
        Ok(match *self {
            Self::Constant { len } => constant_bits(len),
            Self::Alternating { len } => alternating_bits(len),
            Self::Random { len } => random_bits(len, seed),
            Self::Hypercube { n, m } => hypercube(n, m, seed)?,
            Self::Curve { n } => parametric_curve(n)?,
        })
    }
}

fn parse_count(s: &str) -> Result<usize, String> {
    let s = s.trim();
    let parsed = match s.split_once('^') {
        Some((base, exp)) => {
            let base: usize = base.parse().map_err(|_| format!("bad base in {s:?}"))?;
            let exp: u32 = exp.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
            base.checked_pow(exp)
        }
        None => s.parse().ok(),
    };
    parsed.ok_or_else(|| format!("bad count {s:?}"))
}

fn parse_params(s: &str) -> Result<Vec<(&str, usize)>, String> {
    s.split(',')
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {kv:?}"))?;
            Ok((k.trim(), parse_count(v)?))
        })
        .collect()
}

impl FromStr for GeneratorSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "constant" => Ok(Self::Constant { len: parse_count(arg)? }),
            "alternating" => Ok(Self::Alternating { len: parse_count(arg)? }),
            "random" => Ok(Self::Random { len: parse_count(arg)? }),
            "hypercube" | "curve" => {
                let params = parse_params(arg)?;
                let get = |key: &str| params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
                if let Some((k, _)) = params.iter().find(|(k, _)| !matches!(*k, "n" | "m")) {
                    return Err(format!("unknown parameter {k:?} for {kind}"));
                }
                let n = get("n").ok_or_else(|| format!("{kind} needs n=<columns>"))?;
                if kind == "curve" {
                    Ok(Self::Curve { n })
                } else {
                    let m = get("m").ok_or("hypercube needs m=<rows>")?;
                    Ok(Self::Hypercube { n, m })
                }
            }
            other => Err(format!("unknown generator {other:?}")),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant { len } => write!(f, "constant:{len}"),
            Self::Alternating { len } => write!(f, "alternating:{len}"),
            Self::Random { len } => write!(f, "random:{len}"),
            Self::Hypercube { n, m } => write!(f, "hypercube:n={n},m={m}"),
            Self::Curve { n } => write!(f, "curve:n={n}"),
        }
    }
}
