//! Light-cone complexity study over probe clouds in `[-1, 1]^4`.
//!
//! Points are `(x, y, z, t)` with `c = 1`. With `q = x^2 + y^2 + z^2 - t^2`,
//! a point is inside the cone when `q < -eps`, on it when `|q| <= eps` and
//! outside when `q > eps`. Regions keep the cloud's generation order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::codec::{CodecError, CompressorBackend, QuantizedScalar, TupleDataset, SCALE};
use crate::datasets;
use crate::decomposition::{self, DecompositionError, ProjectionSpec};
use crate::estimator::{self, ComplexityEstimate};

pub const DEFAULT_POINTS: usize = 40_000;
const COORDS: [char; 4] = ['x', 'y', 'z', 't'];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LightconeError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error("a probe cloud needs at least one point")]
    NoPoints,
    #[error("region {0} contains no points")]
    EmptyRegion(RegionTag),
    #[error("filter threshold must be positive")]
    ZeroThreshold,
    #[error("unknown coordinate subset {0:?}")]
    UnknownSubset(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeCloud {
    pub points: TupleDataset,
    pub seed: u64,
}

impl ProbeCloud {
    pub fn m(&self) -> usize {
        self.points.m_rows()
    }
}

/// `m` points with independent uniform coordinates on `[-1, 1]`, stored in
/// generation order.
pub fn generate_cloud(m: usize, seed: u64) -> Result<ProbeCloud, LightconeError> {
    if m == 0 {
        return Err(LightconeError::NoPoints);
    }
    Ok(ProbeCloud {
        points: datasets::hypercube(4, m, seed)?,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionTag {
    Full,
    Inside,
    On,
    Outside,
}

impl RegionTag {
    pub const ALL: [RegionTag; 4] = [Self::Full, Self::Inside, Self::On, Self::Outside];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::Inside => "inside",
            Self::On => "on",
            Self::Outside => "outside",
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegionTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown region {s:?} (expected full, inside, on or outside)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CausalRegion {
    pub tag: RegionTag,
    /// Half-width of the "on" band, in squared units.
    pub epsilon: QuantizedScalar,
}

impl CausalRegion {
    pub fn new(tag: RegionTag, epsilon: QuantizedScalar) -> Self {
        Self { tag, epsilon }
    }

    pub fn matches(&self, p: &[QuantizedScalar]) -> bool {
        self.tag == RegionTag::Full || classify(p, self.epsilon) == self.tag
    }
}

/// Exact classification: `q` is evaluated in integer units of `1e-12`, so
/// band boundaries on the micro-unit grid are never misassigned.
pub fn classify(p: &[QuantizedScalar], epsilon: QuantizedScalar) -> RegionTag {
    let sq = |v: QuantizedScalar| i128::from(v.micros()).pow(2);
    let q = sq(p[0]) + sq(p[1]) + sq(p[2]) - sq(p[3]);
    let eps = i128::from(epsilon.micros().abs()) * i128::from(SCALE);
    if q.abs() <= eps {
        RegionTag::On
    } else if q < 0 {
        RegionTag::Inside
    } else {
        RegionTag::Outside
    }
}

/// Rows of the cloud that fall in `r`, in original order.
pub fn region_subset(cloud: &ProbeCloud, r: &CausalRegion) -> TupleDataset {
    if r.tag == RegionTag::Full {
        return cloud.points.clone();
    }
    let mut out = TupleDataset::empty(4).expect("four columns");
    for p in cloud.points.rows().filter(|p| r.matches(p)) {
        out.push_row(p).expect("four columns");
    }
    out
}

/// A set of retained coordinates, named by their letters in `xyzt` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoordinateSubset(&'static str);

impl CoordinateSubset {
    /// The full tuple, its four 3-coordinate projections and the six
    /// 2-coordinate projections.
    pub const ALL: [CoordinateSubset; 11] = [
        Self("xyzt"),
        Self("yzt"),
        Self("xzt"),
        Self("xyt"),
        Self("xyz"),
        Self("zt"),
        Self("yt"),
        Self("yz"),
        Self("xt"),
        Self("xy"),
        Self("xz"),
    ];

    pub fn name(self) -> &'static str {
        self.0
    }

    pub fn dims(self) -> usize {
        self.0.len()
    }

    pub fn triples() -> impl Iterator<Item = CoordinateSubset> {
        Self::ALL.into_iter().filter(|s| s.dims() == 3)
    }

    pub fn pairs() -> impl Iterator<Item = CoordinateSubset> {
        Self::ALL.into_iter().filter(|s| s.dims() == 2)
    }

    /// The multi-column drop that leaves exactly these coordinates.
    pub fn projection(self) -> ProjectionSpec {
        ProjectionSpec {
            dropped_cols: (1..=4).filter(|&c| !self.0.contains(COORDS[c - 1])).collect(),
        }
    }
}

impl FromStr for CoordinateSubset {
    type Err = LightconeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.0 == s)
            .ok_or_else(|| LightconeError::UnknownSubset(s.to_string()))
    }
}

impl fmt::Display for CoordinateSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

/// Values keyed by subset, kept in [`CoordinateSubset::ALL`] order and
/// serialized as a JSON object in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetTable<T>(pub Vec<(CoordinateSubset, T)>);

impl<T> SubsetTable<T> {
    pub fn get(&self, name: &str) -> Option<&T> {
        self.0.iter().find(|(s, _)| s.name() == name).map(|(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(CoordinateSubset, T)> {
        self.0.iter()
    }
}

impl<T: Serialize> Serialize for SubsetTable<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k.name(), v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LightconeReport {
    pub region: CausalRegion,
    pub m_region: usize,
    pub complexity_by_subset: SubsetTable<ComplexityEstimate>,
    /// `k_hat / raw_len` per subset.
    pub density_by_subset: SubsetTable<f64>,
    pub backend_id: String,
    pub seed: u64,
}

impl LightconeReport {
    pub fn k(&self, subset: &str) -> u64 {
        self.complexity_by_subset.get(subset).map_or(0, |e| e.k_hat)
    }

    /// `(max - min) / min` over the four 3-coordinate projections.
    pub fn triple_spread(&self) -> f64 {
        let ks: Vec<f64> = CoordinateSubset::triples().map(|s| self.k(s.name()) as f64).collect();
        let max = ks.iter().copied().fold(f64::MIN, f64::max);
        let min = ks.iter().copied().fold(f64::MAX, f64::min);
        (max - min) / min
    }
}

/// Estimates the region and every coordinate projection of it.
pub fn study(
    cloud: &ProbeCloud,
    r: &CausalRegion,
    backend: &CompressorBackend,
) -> Result<LightconeReport, LightconeError> {
    let subset = region_subset(cloud, r);
    if subset.is_empty() {
        return Err(LightconeError::EmptyRegion(r.tag));
    }
    let estimates = CoordinateSubset::ALL
        .par_iter()
        .map(|&s| {
            let spec = s.projection();
            let e = if spec.dropped_cols.is_empty() {
                estimator::estimate(&subset, backend)?
            } else {
                estimator::estimate(&decomposition::project(&subset, &spec)?, backend)?
            };
            Ok((s, e))
        })
        .collect::<Result<Vec<_>, LightconeError>>()?;
    let densities = estimates.iter().map(|(s, e)| (*s, e.density())).collect();
    Ok(LightconeReport {
        region: *r,
        m_region: subset.m_rows(),
        complexity_by_subset: SubsetTable(estimates),
        density_by_subset: SubsetTable(densities),
        backend_id: backend.label(),
        seed: cloud.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterMode {
    Low,
    High,
}

impl FromStr for FilterMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "low" => Ok(Self::Low),
            "high" => Ok(Self::High),
            _ => Err(format!("unknown filter mode {s:?} (expected low or high)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterOutcome {
    pub mode: FilterMode,
    pub threshold: u64,
    pub passed: Vec<RegionTag>,
    pub reports: Vec<LightconeReport>,
}

/// Studies every non-empty region (full, inside, outside, and on when
/// `epsilon > 0`) and applies the threshold to each region's `xyzt` estimate.
/// Low-pass admits `k_hat < threshold`, high-pass `k_hat >= threshold`, so
/// the two modes split the regions with ties going to high-pass.
pub fn complexity_filter(
    mode: FilterMode,
    cloud: &ProbeCloud,
    epsilon: QuantizedScalar,
    threshold: u64,
    backend: &CompressorBackend,
) -> Result<FilterOutcome, LightconeError> {
    if threshold == 0 {
        return Err(LightconeError::ZeroThreshold);
    }
    let reports = RegionTag::ALL
        .into_par_iter()
        .filter(|&tag| tag != RegionTag::On || epsilon.micros() > 0)
        .map(|tag| match study(cloud, &CausalRegion::new(tag, epsilon), backend) {
            Err(LightconeError::EmptyRegion(_)) => Ok(None),
            other => other.map(Some),
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    let passed = reports
        .iter()
        .filter(|r| {
            let k = r.k("xyzt");
            match mode {
                FilterMode::Low => k < threshold,
                FilterMode::High => k >= threshold,
            }
        })
        .map(|r| r.region.tag)
        .collect();
    Ok(FilterOutcome {
        mode,
        threshold,
        passed,
        reports,
    })
}

pub fn lowpass_filter(
    cloud: &ProbeCloud,
    epsilon: QuantizedScalar,
    threshold: u64,
    backend: &CompressorBackend,
) -> Result<FilterOutcome, LightconeError> {
    complexity_filter(FilterMode::Low, cloud, epsilon, threshold, backend)
}

pub fn highpass_filter(
    cloud: &ProbeCloud,
    epsilon: QuantizedScalar,
    threshold: u64,
    backend: &CompressorBackend,
) -> Result<FilterOutcome, LightconeError> {
    complexity_filter(FilterMode::High, cloud, epsilon, threshold, backend)
}
