//! Families of complexes over a finite label set: fiberwise certified
//! embeddings and secant sets filtered by separation in a fiber metric.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{subdivide_until_with_cap, ComplexError, ComplexJson, PLMap, VertexId, DEFAULT_SUBDIVISION_CAP};
use crate::exact::{self, Rational};
use crate::flats::CanonicalLine;
use crate::perturb::{perturb_to_general_position, GeneralPositionMap, PerturbError, PerturbationReport};
use crate::secant::{probe_region_samples, secant_set, zero_dim_certificate, CoverCertificate, SecantError, SecantRecord};
use crate::seed::derive_seed;

/// Mesh target for the per-sample cover certificates of [`fibered_report`].
pub const FIBER_EPSILON: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FiberError {
    #[error("instance JSON error: {0}")]
    Parse(String),
    #[error("label {0:?} has a fiber but no reference embedding, or the reverse")]
    LabelMismatch(String),
    #[error("fibers {0:?} and {1:?} share vertex {2}")]
    SharedVertex(String, String, VertexId),
    #[error("reference embedding of {0:?} is not defined on its fiber")]
    ReferenceMismatch(String),
    #[error("fiber {label:?}: ambient dimension {found}, instance declares {expected}")]
    AmbientMismatch { label: String, expected: usize, found: usize },
    #[error("eta must be positive")]
    NonPositiveEta,
    #[error("fiber {label:?}: {source}")]
    Complex { label: String, source: ComplexError },
    #[error("fiber {label:?}: {source}")]
    Perturb { label: String, source: PerturbError },
    #[error("fiber {label:?}: {source}")]
    Secant { label: String, source: SecantError },
}

#[derive(Deserialize)]
struct InstanceJson {
    m: usize,
    #[serde(default)]
    eta: Vec<Rational>,
    fibers: BTreeMap<String, ComplexJson>,
    reference_embeddings: BTreeMap<String, ComplexJson>,
}

/// A finite family of pairwise vertex-disjoint complexes, each with a reference
/// embedding that defines its metric.
#[derive(Clone, Debug)]
pub struct FiberedInstance {
    pub m: usize,
    pub eta: Vec<Rational>,
    /// Reference embedding per label; its complex is the fiber.
    pub fibers: BTreeMap<String, PLMap>,
}

impl FiberedInstance {
    pub fn new(m: usize, eta: Vec<Rational>, fibers: BTreeMap<String, PLMap>) -> Result<Self, FiberError> {
        if eta.iter().any(|e| !e.is_positive()) {
            return Err(FiberError::NonPositiveEta);
        }
        let mut owner: BTreeMap<VertexId, &str> = BTreeMap::new();
        for (label, h) in &fibers {
            if h.ambient() != m {
                return Err(FiberError::AmbientMismatch { label: label.clone(), expected: m, found: h.ambient() });
            }
            for &v in h.complex().vertices() {
                if let Some(other) = owner.insert(v, label) {
                    return Err(FiberError::SharedVertex(other.to_string(), label.clone(), v));
                }
            }
        }
        Ok(FiberedInstance { m, eta, fibers })
    }

    pub fn from_json_str(text: &str) -> Result<Self, FiberError> {
        let raw: InstanceJson = serde_json::from_str(text).map_err(|e| FiberError::Parse(e.to_string()))?;
        let fiber_labels: BTreeSet<&String> = raw.fibers.keys().collect();
        let ref_labels: BTreeSet<&String> = raw.reference_embeddings.keys().collect();
        if let Some(l) = fiber_labels.symmetric_difference(&ref_labels).next() {
            return Err(FiberError::LabelMismatch((*l).clone()));
        }
        let mut fibers = BTreeMap::new();
        for (label, complex_json) in &raw.fibers {
            let wrap = |source| FiberError::Complex { label: label.clone(), source };
            let complex = complex_json.to_complex().map_err(wrap)?;
            let reference = raw.reference_embeddings[label].to_map().map_err(wrap)?;
            if reference.complex().simplices() != complex.simplices() {
                return Err(FiberError::ReferenceMismatch(label.clone()));
            }
            fibers.insert(label.clone(), reference);
        }
        FiberedInstance::new(raw.m, raw.eta, fibers)
    }
}

/// Squared fiber distance between two points, measured through `reference`.
pub fn fiber_distance_sq(
    reference: &PLMap,
    x1: &crate::complex::BarycentricPoint,
    x2: &crate::complex::BarycentricPoint,
) -> Result<Rational, ComplexError> {
    Ok(exact::dist_sq(&reference.evaluate(x1)?, &reference.evaluate(x2)?))
}

#[derive(Clone, Debug)]
pub struct FiberEmbedding {
    pub label: String,
    pub seed: u64,
    /// Reference embedding on the subdivided fiber; pointwise the original.
    pub reference: PLMap,
    pub map: GeneralPositionMap,
    pub subdivision_rounds: usize,
    pub report: PerturbationReport,
}

/// Subdivides and perturbs every fiber independently, each with a seed derived
/// from the root seed and its label. Results are ordered by label.
pub fn fiberwise_embed(inst: &FiberedInstance, delta: &Rational, seed: u64) -> Result<Vec<FiberEmbedding>, FiberError> {
    let entries: Vec<(&String, &PLMap)> = inst.fibers.iter().collect();
    entries
        .par_iter()
        .map(|(label, h0)| {
            let label = (*label).clone();
            let (reference, subdivision_rounds) = subdivide_until_with_cap(h0, delta, DEFAULT_SUBDIVISION_CAP)
                .map_err(|source| FiberError::Complex { label: label.clone(), source })?;
            let fiber_seed = derive_seed("fiber", seed, &label);
            let (map, report) = perturb_to_general_position(&reference, delta, fiber_seed)
                .map_err(|source| FiberError::Perturb { label: label.clone(), source })?;
            Ok(FiberEmbedding { label, seed: fiber_seed, reference, map, subdivision_rounds, report })
        })
        .collect()
}

/// A secant record with the exact squared fiber distance between its preimages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EtaSecantRecord {
    pub record: SecantRecord,
    pub fiber_distance_sq: Rational,
}

fn with_distances(fe: &FiberEmbedding, records: Vec<SecantRecord>) -> Result<Vec<EtaSecantRecord>, FiberError> {
    records
        .into_iter()
        .map(|record| {
            let d = fiber_distance_sq(&fe.reference, &record.witnesses[0].preimage, &record.witnesses[1].preimage)
                .map_err(|source| FiberError::Complex { label: fe.label.clone(), source })?;
            Ok(EtaSecantRecord { record, fiber_distance_sq: d })
        })
        .collect()
}

fn filter_eta(all: &[EtaSecantRecord], eta: &Rational) -> Vec<EtaSecantRecord> {
    let eta_sq = eta.square();
    all.iter().filter(|r| r.fiber_distance_sq >= eta_sq).cloned().collect()
}

/// Secant lines of the fiber through `z` whose preimages are at fiber distance
/// at least `eta`.
pub fn eta_secant_set(fe: &FiberEmbedding, z: &[Rational], eta: &Rational) -> Result<Vec<EtaSecantRecord>, FiberError> {
    if !eta.is_positive() {
        return Err(FiberError::NonPositiveEta);
    }
    let records =
        secant_set(&fe.map, z, None).map_err(|source| FiberError::Secant { label: fe.label.clone(), source })?;
    Ok(filter_eta(&with_distances(fe, records)?, eta))
}

/// Smallest integer `K` with `K^2 · d_sq >= 1`, i.e. `1/K <= sqrt(d_sq)`.
pub fn decomposition_index(d_sq: &Rational) -> Option<BigInt> {
    if !d_sq.is_positive() {
        return None;
    }
    let c = d_sq.recip().ceil();
    let s = c.sqrt();
    Some(if &s * &s < c { s + 1 } else { s })
}

#[derive(Clone, Debug, Serialize)]
pub struct EtaResult {
    pub eta: Rational,
    pub records: Vec<EtaSecantRecord>,
    pub certificate: CoverCertificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleReport {
    pub index: usize,
    pub z: Vec<Rational>,
    pub secants: usize,
    pub per_eta: Vec<EtaResult>,
    /// Sets shrink as eta grows.
    pub monotone: bool,
    pub valid: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub min_preimage_distance_sq: Option<Rational>,
    /// Smallest `K` with `1/K` at most the minimum preimage distance.
    pub k_index: Option<Rational>,
    /// At `eta = 1/K` every sample keeps its full secant set.
    pub recovered: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub label: String,
    pub seed: u64,
    pub subdivision_rounds: usize,
    pub max_reference_diameter_sq: Rational,
    /// Per eta: every simplex of the reference is shorter than eta, so points
    /// at fiber distance at least eta have distinct carriers.
    pub u_map: BTreeMap<String, bool>,
    pub samples: Vec<SampleReport>,
    pub decomposition: Decomposition,
    pub monotone: bool,
    pub valid_cases: usize,
}

/// Per fiber: `samples` probe points at radius `k`, and for each the eta-filtered
/// secant sets with their cover certificates.
pub fn fibered_report(
    embeddings: &[FiberEmbedding],
    k: &Rational,
    samples: usize,
    etas: &[Rational],
    seed: u64,
) -> Result<Vec<FiberReport>, FiberError> {
    if etas.iter().any(|e| !e.is_positive()) {
        return Err(FiberError::NonPositiveEta);
    }
    let mut etas_desc: Vec<Rational> = etas.to_vec();
    etas_desc.sort_by(|a, b| b.cmp(a));
    etas_desc.dedup();
    embeddings.par_iter().map(|fe| fiber_report(fe, k, samples, &etas_desc, seed)).collect()
}

fn fiber_report(
    fe: &FiberEmbedding,
    k: &Rational,
    samples: usize,
    etas: &[Rational],
    seed: u64,
) -> Result<FiberReport, FiberError> {
    let secant_err = |source| FiberError::Secant { label: fe.label.clone(), source };
    let probes = probe_region_samples(&fe.map, k, samples, derive_seed("probe", seed, &fe.label)).map_err(secant_err)?;
    let kf = k.to_f64();
    let mut reports = Vec::with_capacity(probes.len());
    let mut full_sets = Vec::with_capacity(probes.len());
    for (index, p) in probes.iter().enumerate() {
        let records = secant_set(&fe.map, p.z(), None).map_err(secant_err)?;
        for r in &records {
            r.validate(fe.map.map(), p.z()).map_err(secant_err)?;
        }
        let all = with_distances(fe, records)?;
        let mut per_eta = Vec::with_capacity(etas.len());
        for eta in etas {
            let kept = filter_eta(&all, eta);
            let plain: Vec<SecantRecord> = kept.iter().map(|r| r.record.clone()).collect();
            let certificate = zero_dim_certificate(&plain, FIBER_EPSILON, kf).map_err(secant_err)?;
            per_eta.push(EtaResult { eta: eta.clone(), records: kept, certificate });
        }
        let lines = |rs: &[EtaSecantRecord]| -> BTreeSet<CanonicalLine> { rs.iter().map(|r| r.record.line.clone()).collect() };
        let monotone = per_eta.windows(2).all(|w| lines(&w[0].records).is_subset(&lines(&w[1].records)));
        let valid = per_eta.iter().all(|e| e.certificate.valid);
        reports.push(SampleReport { index, z: p.z().clone(), secants: all.len(), per_eta, monotone, valid });
        full_sets.push(all);
    }

    let min_sq = full_sets.iter().flatten().map(|r| r.fiber_distance_sq.clone()).min();
    let k_index = min_sq.as_ref().and_then(decomposition_index).map(Rational::from_integer);
    let recovered = match &k_index {
        Some(kk) => {
            let eta = kk.recip();
            full_sets.iter().all(|all| filter_eta(all, &eta).len() == all.len())
        }
        None => true,
    };
    let max_reference_diameter_sq = fe.reference.max_image_diameter_sq();
    let u_map = etas.iter().map(|e| (e.to_string(), max_reference_diameter_sq < e.square())).collect();
    Ok(FiberReport {
        label: fe.label.clone(),
        seed: fe.seed,
        subdivision_rounds: fe.subdivision_rounds,
        max_reference_diameter_sq,
        u_map,
        monotone: reports.iter().all(|s| s.monotone),
        valid_cases: reports.iter().filter(|s| s.valid).count(),
        samples: reports,
        decomposition: Decomposition { min_preimage_distance_sq: min_sq, k_index, recovered },
    })
}
