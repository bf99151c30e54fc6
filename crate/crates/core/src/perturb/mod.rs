//! Seeded perturbation of vertex images into certified general position.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{PLMap, Simplex, VertexId};
use crate::exact::{self, Point, Rational};

/// Resample budget of [`perturb_to_general_position`].
pub const DEFAULT_MAX_ROUNDS: usize = 32;

const OFFSET_BITS: u32 = 32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PerturbError {
    #[error("delta must be positive")]
    NonPositiveDelta,
    #[error("ambient dimension {m} is below 2n+1 for a complex of dimension {n}")]
    AmbientTooSmall { n: isize, m: usize },
    #[error("squared image diameter {achieved_sq} is not below (delta/2)^2 = {target_sq}; subdivide first")]
    NotSubdivided { achieved_sq: Rational, target_sq: Rational },
    #[error("general position not reached after {rounds} resample rounds ({failures} failing verdicts)")]
    Budget { rounds: usize, failures: usize, certificate: Box<GeneralPositionCertificate> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplexVerdict {
    pub simplex: Simplex,
    pub independent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairVerdict {
    pub first: Simplex,
    pub second: Simplex,
    pub independent: bool,
}

/// Exact affine-independence verdicts for the image of every maximal simplex
/// and of the vertex union of every pair of maximal simplices. Independence of
/// a set implies it for each subset, so faces need no separate entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralPositionCertificate {
    pub simplices: Vec<SimplexVerdict>,
    pub pairs: Vec<PairVerdict>,
    pub overall: bool,
}

fn independent(h: &PLMap, s: &Simplex) -> bool {
    exact::affinely_independent(&h.simplex_images(s))
}

/// Checks `dim K <= n` with `m >= 2n + 1`.
pub fn check_dimensions(h: &PLMap) -> Result<(), PerturbError> {
    let n = h.complex().dimension();
    if n >= 0 && (h.ambient() as isize) < 2 * n + 1 {
        return Err(PerturbError::AmbientTooSmall { n, m: h.ambient() });
    }
    Ok(())
}

pub fn general_position_certificate(h: &PLMap) -> Result<GeneralPositionCertificate, PerturbError> {
    check_dimensions(h)?;
    let top = h.complex().maximal_simplices();
    let simplices: Vec<SimplexVerdict> = top
        .par_iter()
        .map(|s| SimplexVerdict { simplex: s.clone(), independent: independent(h, s) })
        .collect();
    let index_pairs: Vec<(usize, usize)> =
        (0..top.len()).flat_map(|i| (i + 1..top.len()).map(move |j| (i, j))).collect();
    let pairs: Vec<PairVerdict> = index_pairs
        .par_iter()
        .map(|&(i, j)| PairVerdict {
            first: top[i].clone(),
            second: top[j].clone(),
            independent: independent(h, &top[i].union(&top[j])),
        })
        .collect();
    let overall = simplices.iter().all(|v| v.independent) && pairs.iter().all(|v| v.independent);
    Ok(GeneralPositionCertificate { simplices, pairs, overall })
}

impl GeneralPositionCertificate {
    pub fn failures(&self) -> usize {
        self.simplices.iter().filter(|v| !v.independent).count()
            + self.pairs.iter().filter(|v| !v.independent).count()
    }

    /// Vertices appearing in some failed verdict.
    pub fn failing_vertices(&self) -> BTreeSet<VertexId> {
        let singles = self.simplices.iter().filter(|v| !v.independent).map(|v| &v.simplex);
        let pairs =
            self.pairs.iter().filter(|v| !v.independent).flat_map(|v| [&v.first, &v.second]);
        singles.chain(pairs).flat_map(|s| s.vertices().iter().copied()).collect()
    }

    /// Verdict lists are included when `verbose` or when some verdict failed.
    pub fn to_json(&self, verbose: bool) -> serde_json::Value {
        let mut v = serde_json::json!({
            "overall": self.overall,
            "simplices_checked": self.simplices.len(),
            "pairs_checked": self.pairs.len(),
            "failures": self.failures(),
        });
        if verbose || !self.overall {
            v["simplices"] = serde_json::to_value(&self.simplices).expect("serializable");
            v["pairs"] = serde_json::to_value(&self.pairs).expect("serializable");
        }
        v
    }
}

/// A map whose general position has been certified.
#[derive(Clone, Debug)]
pub struct GeneralPositionMap {
    map: PLMap,
    certificate: GeneralPositionCertificate,
}

impl GeneralPositionMap {
    /// Returns the failing certificate when `h` is not in general position.
    pub fn certify(h: PLMap) -> Result<Self, CertifyError> {
        let certificate = general_position_certificate(&h)?;
        if !certificate.overall {
            return Err(CertifyError::Failed(Box::new(certificate)));
        }
        Ok(GeneralPositionMap { map: h, certificate })
    }

    pub fn map(&self) -> &PLMap {
        &self.map
    }

    pub fn certificate(&self) -> &GeneralPositionCertificate {
        &self.certificate
    }

    pub fn into_map(self) -> PLMap {
        self.map
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertifyError {
    #[error(transparent)]
    Precondition(#[from] PerturbError),
    #[error("map is not in general position ({} failing verdicts)", .0.failures())]
    Failed(Box<GeneralPositionCertificate>),
}

#[derive(Clone, Debug)]
pub struct PerturbationReport {
    pub seed: u64,
    pub rounds: usize,
    pub max_displacement_sq: Rational,
    /// Rational upper bound on the largest vertex displacement, itself below `delta / 2`.
    pub max_displacement: Rational,
    pub certificate: GeneralPositionCertificate,
}

impl PerturbationReport {
    pub fn to_json(&self, verbose: bool) -> serde_json::Value {
        serde_json::json!({
            "seed": self.seed,
            "rounds": self.rounds,
            "max_displacement_sq": self.max_displacement_sq,
            "max_displacement_bound": self.max_displacement,
            "certificate": self.certificate.to_json(verbose),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PerturbOptions {
    pub max_rounds: usize,
}

impl Default for PerturbOptions {
    fn default() -> Self {
        PerturbOptions { max_rounds: DEFAULT_MAX_ROUNDS }
    }
}

/// Integer offsets `j` with `|j_i| < 2^32` and `Σ j_i² < 2^64`, so the offset
/// `(delta/2) · j / 2^32` lies in the open Euclidean ball of radius `delta/2`.
/// Beyond 8 coordinates the box is shrunk to fit inside the ball instead of
/// rejecting, which would almost always fail.
fn sample_offset(rng: &mut ChaCha8Rng, m: usize) -> Vec<i64> {
    let full = 1i64 << OFFSET_BITS;
    if m > 8 {
        let root = (m as f64).sqrt().ceil() as i64;
        let bound = full / root;
        return (0..m).map(|_| rng.gen_range(-bound + 1..bound)).collect();
    }
    let limit = 1i128 << (2 * OFFSET_BITS);
    loop {
        let j: Vec<i64> = (0..m).map(|_| rng.gen_range(-full + 1..full)).collect();
        let norm: i128 = j.iter().map(|&x| (x as i128) * (x as i128)).sum();
        if norm < limit {
            return j;
        }
    }
}

fn displaced(origin: &Point, offset: &[i64], radius: &Rational) -> Point {
    let denom = BigInt::from(1u64 << OFFSET_BITS);
    origin
        .iter()
        .zip(offset)
        .map(|(x, &j)| x + radius * &Rational::from_big((BigInt::from(j), denom.clone()).into()))
        .collect()
}

/// A seeded random point of the open ball of the given radius around `centre`,
/// with coordinates of denominator dividing `2^32` times that of the radius.
pub(crate) fn random_point_in_ball(rng: &mut ChaCha8Rng, centre: &Point, radius: &Rational) -> Point {
    displaced(centre, &sample_offset(rng, centre.len()), radius)
}

pub fn perturb_to_general_position(
    h0: &PLMap,
    delta: &Rational,
    seed: u64,
) -> Result<(GeneralPositionMap, PerturbationReport), PerturbError> {
    perturb_with_options(h0, delta, seed, PerturbOptions::default())
}

/// Round 0 certifies `h0` unchanged; each later round redraws, from their
/// original positions, only the vertices that appear in a failed verdict.
pub fn perturb_with_options(
    h0: &PLMap,
    delta: &Rational,
    seed: u64,
    options: PerturbOptions,
) -> Result<(GeneralPositionMap, PerturbationReport), PerturbError> {
    if !delta.is_positive() {
        return Err(PerturbError::NonPositiveDelta);
    }
    check_dimensions(h0)?;
    let half_delta = delta / Rational::from(2);
    let target_sq = half_delta.square();
    let achieved_sq = h0.max_image_diameter_sq();
    if achieved_sq >= target_sq {
        return Err(PerturbError::NotSubdivided { achieved_sq, target_sq });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut images: BTreeMap<VertexId, Point> = h0.images().clone();
    let mut current = h0.clone();
    let mut certificate = general_position_certificate(&current)?;
    let mut rounds = 0;
    while !certificate.overall {
        if rounds == options.max_rounds {
            return Err(PerturbError::Budget {
                rounds,
                failures: certificate.failures(),
                certificate: Box::new(certificate),
            });
        }
        rounds += 1;
        for v in certificate.failing_vertices() {
            images.insert(v, random_point_in_ball(&mut rng, h0.image(v), &half_delta));
        }
        current = h0.with_images(images.clone()).expect("same complex and ambient");
        certificate = general_position_certificate(&current)?;
    }

    let max_displacement_sq = h0
        .images()
        .iter()
        .map(|(v, p)| exact::dist_sq(p, current.image(*v)))
        .max()
        .unwrap_or_else(Rational::zero);
    let max_displacement =
        max_displacement_sq.sqrt_upper_below(&half_delta).expect("offsets lie in the open ball");
    let report = PerturbationReport {
        seed,
        rounds,
        max_displacement_sq,
        max_displacement,
        certificate: certificate.clone(),
    };
    Ok((GeneralPositionMap { map: current, certificate }, report))
}
