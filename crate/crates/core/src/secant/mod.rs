//! Secant lines through a point off the image: exact enumeration, the
//! ball-clipped line metric, and zero-dimensionality cover certificates.

mod metric;
mod probe;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{BarycentricPoint, ComplexError, Marks, PLMap, Side, Simplex};
use crate::exact::{self, Point, Rational};
use crate::flats::{self, AffineFlat, CanonicalLine, FlatsError};
use crate::perturb::GeneralPositionMap;

pub use metric::{line_distance, zero_dim_certificate, Ball, CoverCertificate};
pub use probe::{
    analyze, probe_region_samples, usc_probe, AnalysisReport, ProbePoint, UscReport, REJECTION_FACTOR,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SecantError {
    #[error("probe point lies on the image")]
    OnImage,
    #[error("probe point lies in the affine span of the image of {0}")]
    ExceptionalSimplex(Simplex),
    #[error("probe point lies in the affine span of the images of {0} and {1}, which share a vertex")]
    ExceptionalPair(Simplex, Simplex),
    #[error("simplices {0} and {1} share a vertex")]
    NotDisjoint(Simplex, Simplex),
    #[error("ambient dimension mismatch: expected {expected}, found {found}")]
    AmbientMismatch { expected: usize, found: usize },
    #[error("line misses the ball of radius {0}")]
    LineMissesBall(f64),
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("k must be positive")]
    NonPositiveK,
    #[error("duplicate secant line {0:?}")]
    DuplicateLine(CanonicalLine),
    #[error("probe point violates the region constraints: {0}")]
    OutsideRegion(String),
    #[error("probe region too thin: {accepted} of {requested} points after {draws} draws")]
    RegionTooThin { requested: usize, accepted: usize, draws: usize },
    #[error("invalid secant record: {0}")]
    InvalidRecord(String),
    #[error(transparent)]
    Flats(#[from] FlatsError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// One meeting point of a secant line with the image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// The maximal simplex whose image the line was intersected with.
    pub simplex: Simplex,
    pub point: Point,
    /// Preimage, expressed on its carrier.
    pub preimage: BarycentricPoint,
}

/// A line through `z` meeting the image in two points with distinct preimages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecantRecord {
    pub line: CanonicalLine,
    pub witnesses: [Witness; 2],
    pub pair: (Simplex, Simplex),
}

impl SecantRecord {
    /// Exact re-check of every record invariant against `h` and `z`.
    pub fn validate(&self, h: &PLMap, z: &[Rational]) -> Result<(), SecantError> {
        let fail = |msg: &str| Err(SecantError::InvalidRecord(msg.to_string()));
        if !self.line.contains(z) {
            return fail("z is not on the line");
        }
        for w in &self.witnesses {
            if !self.line.contains(&w.point) {
                return fail("witness point is not on the line");
            }
            if !w.preimage.simplex.is_face_of(&w.simplex) || !h.complex().contains(&w.simplex) {
                return fail("preimage is not carried by the witness simplex");
            }
            if h.evaluate(&w.preimage)? != w.point {
                return fail("witness point is not the image of its preimage");
            }
        }
        if self.witnesses[0].preimage.same_point(&self.witnesses[1].preimage) {
            return fail("preimages coincide");
        }
        Ok(())
    }

    pub fn image_points(&self) -> (&Point, &Point) {
        (&self.witnesses[0].point, &self.witnesses[1].point)
    }
}

fn check_ambient(h: &PLMap, z: &[Rational]) -> Result<(), SecantError> {
    if z.len() != h.ambient() {
        return Err(SecantError::AmbientMismatch { expected: h.ambient(), found: z.len() });
    }
    Ok(())
}

fn span(h: &PLMap, s: &Simplex) -> Result<AffineFlat, SecantError> {
    Ok(flats::span_of_points(&h.simplex_images(s))?)
}

/// Points where secant lines through `z` may meet the image along a whole
/// segment: `z` in the span of one simplex image of positive dimension, or in
/// the span of two maximal simplex images sharing a vertex.
pub fn exceptional_reason(h: &GeneralPositionMap, z: &[Rational]) -> Result<Option<SecantError>, SecantError> {
    let h = h.map();
    check_ambient(h, z)?;
    let top = h.complex().maximal_simplices();
    for s in top.iter().filter(|s| s.len() > 1) {
        if flats::contains_point(&span(h, s)?, z)? {
            return Ok(Some(SecantError::ExceptionalSimplex(s.clone())));
        }
    }
    for (i, a) in top.iter().enumerate() {
        for b in &top[i + 1..] {
            if a.is_disjoint(b) {
                continue;
            }
            let u = a.union(b);
            let flat = span(h, &u)?;
            if flat.dim() < h.ambient() && flats::contains_point(&flat, z)? {
                return Ok(Some(SecantError::ExceptionalPair(a.clone(), b.clone())));
            }
        }
    }
    Ok(None)
}

/// Checks that `z` is off the image and not exceptional.
pub fn check_probe_point(h: &GeneralPositionMap, z: &[Rational]) -> Result<Rational, SecantError> {
    check_ambient(h.map(), z)?;
    let d = flats::image_distance_sq(z, h.map())?;
    if d.is_zero() {
        return Err(SecantError::OnImage);
    }
    if let Some(e) = exceptional_reason(h, z)? {
        return Err(e);
    }
    Ok(d)
}

/// Float cone test: `false` only when no line through `z` can meet both images.
/// Each image is enclosed in a cone around the mean direction from `z`; cones
/// that are too wide to bound reliably always pass.
fn cones_may_share_line(z: &[f64], a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    const MARGIN: f64 = 1e-6;
    const MIN_DOT: f64 = 0.1;
    let normalize = |d: Vec<f64>| -> Option<Vec<f64>> {
        let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        (n > 0.0 && n.is_finite()).then(|| d.into_iter().map(|x| x / n).collect())
    };
    let cap = |pts: &[Vec<f64>]| -> Option<(Vec<f64>, f64)> {
        let dirs: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| normalize(p.iter().zip(z).map(|(x, y)| x - y).collect()))
            .collect::<Option<_>>()?;
        let centre = normalize((0..z.len()).map(|k| dirs.iter().map(|d| d[k]).sum()).collect())?;
        let min_dot = dirs
            .iter()
            .map(|d| d.iter().zip(&centre).map(|(x, y)| x * y).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        (min_dot > MIN_DOT).then(|| (centre, min_dot.clamp(-1.0, 1.0).acos()))
    };
    let (Some((c1, a1)), Some((c2, a2))) = (cap(a), cap(b)) else {
        return true;
    };
    let cos = c1.iter().zip(&c2).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0);
    let theta = cos.acos();
    let reach = a1 + a2 + MARGIN;
    theta <= reach || std::f64::consts::PI - theta <= reach
}

fn witness(h: &PLMap, line: &AffineFlat, s: &Simplex) -> Result<Option<Witness>, SecantError> {
    Ok(flats::line_meets_simplex(line, h, s)?.map(|(point, x)| Witness {
        simplex: s.clone(),
        point,
        preimage: x.normalized(),
    }))
}

/// The secant through `z` meeting the images of the vertex-disjoint simplices
/// `s1` and `s2`, if any. General position allows at most one.
pub fn secants_for_pair(
    h: &GeneralPositionMap,
    z: &[Rational],
    s1: &Simplex,
    s2: &Simplex,
) -> Result<Vec<SecantRecord>, SecantError> {
    check_probe_point(h, z)?;
    pair_record(h.map(), z, s1, s2).map(|r| r.into_iter().collect())
}

fn pair_record(h: &PLMap, z: &[Rational], s1: &Simplex, s2: &Simplex) -> Result<Option<SecantRecord>, SecantError> {
    if !s1.is_disjoint(s2) {
        return Err(SecantError::NotDisjoint(s1.clone(), s2.clone()));
    }
    let Some(t) = flats::transversal_line_through_point(z, &span(h, s1)?, &span(h, s2)?)? else {
        return Ok(None);
    };
    let (Some(w1), Some(w2)) = (witness(h, &t.line, s1)?, witness(h, &t.line, s2)?) else {
        return Ok(None);
    };
    let mut witnesses = [w1, w2];
    witnesses.sort_by(|a, b| a.point.cmp(&b.point));
    let pair = (witnesses[0].simplex.clone(), witnesses[1].simplex.clone());
    Ok(Some(SecantRecord { line: CanonicalLine::from_flat(&t.line), witnesses, pair }))
}

/// Pairs of maximal simplices to examine: all vertex-disjoint pairs, or with
/// marks the pairs `(σ1 ⊂ B1, σ2 ⊂ B2)` of maximal marked simplices.
fn candidate_pairs(h: &PLMap, marks: Option<&Marks>) -> Vec<(Simplex, Simplex)> {
    match marks {
        Some(marks) => {
            let complex = h.complex().clone().with_marks(marks.clone());
            let Ok(complex) = complex else { return Vec::new() };
            let b1 = complex.marked_maximal(Side::B1);
            let b2 = complex.marked_maximal(Side::B2);
            b1.iter().flat_map(|a| b2.iter().map(move |b| (a.clone(), b.clone()))).collect()
        }
        None => {
            let top = h.complex().maximal_simplices();
            top.iter()
                .enumerate()
                .flat_map(|(i, a)| top[i + 1..].iter().filter(|b| a.is_disjoint(b)).map(move |b| (a.clone(), b.clone())))
                .collect()
        }
    }
}

/// Enumeration statistics for [`secant_set_with_stats`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SecantCounts {
    pub maximal_simplices: usize,
    pub candidate_pairs: usize,
    pub pairs_solved: usize,
    pub secants: usize,
}

/// All secant lines through `z`, or with `marks` the lines meeting both marked
/// sides, deduplicated and ordered by canonical line.
pub fn secant_set(h: &GeneralPositionMap, z: &[Rational], marks: Option<&Marks>) -> Result<Vec<SecantRecord>, SecantError> {
    secant_set_with_stats(h, z, marks).map(|(r, _)| r)
}

pub fn secant_set_with_stats(
    h: &GeneralPositionMap,
    z: &[Rational],
    marks: Option<&Marks>,
) -> Result<(Vec<SecantRecord>, SecantCounts), SecantError> {
    match marks {
        Some(_) => {
            check_ambient(h.map(), z)?;
            if flats::image_distance_sq(z, h.map())?.is_zero() {
                return Err(SecantError::OnImage);
            }
        }
        None => {
            check_probe_point(h, z)?;
        }
    }
    let map = h.map();
    let pairs = candidate_pairs(map, marks);
    let zf = exact::to_f64(z);
    let float_images: BTreeMap<_, _> = map.images().iter().map(|(v, p)| (*v, exact::to_f64(p))).collect();
    let float_simplex = |s: &Simplex| -> Vec<Vec<f64>> { s.vertices().iter().map(|v| float_images[v].clone()).collect() };
    let survivors: Vec<&(Simplex, Simplex)> =
        pairs.iter().filter(|(a, b)| cones_may_share_line(&zf, &float_simplex(a), &float_simplex(b))).collect();
    let found: Vec<Option<SecantRecord>> =
        survivors.par_iter().map(|(a, b)| pair_record(map, z, a, b)).collect::<Result<_, _>>()?;
    let mut unique: BTreeMap<CanonicalLine, SecantRecord> = BTreeMap::new();
    for r in found.into_iter().flatten() {
        unique.entry(r.line.clone()).or_insert(r);
    }
    let records: Vec<SecantRecord> = unique.into_values().collect();
    let counts = SecantCounts {
        maximal_simplices: map.complex().maximal_simplices().len(),
        candidate_pairs: pairs.len(),
        pairs_solved: survivors.len(),
        secants: records.len(),
    };
    Ok((records, counts))
}

/// Exhaustive variant of [`secant_set`] without the float prefilter.
pub fn secant_set_unfiltered(h: &GeneralPositionMap, z: &[Rational]) -> Result<Vec<SecantRecord>, SecantError> {
    check_probe_point(h, z)?;
    let map = h.map();
    let mut unique: BTreeMap<CanonicalLine, SecantRecord> = BTreeMap::new();
    for (a, b) in candidate_pairs(map, None) {
        if let Some(r) = pair_record(map, z, &a, &b)? {
            unique.entry(r.line.clone()).or_insert(r);
        }
    }
    Ok(unique.into_values().collect())
}

/// A pair of image points collinear with `z` with distinct preimages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecantPair {
    pub y1: Point,
    pub y2: Point,
    pub x1: BarycentricPoint,
    pub x2: BarycentricPoint,
}

pub fn secant_pairs(h: &GeneralPositionMap, z: &[Rational]) -> Result<Vec<SecantPair>, SecantError> {
    Ok(secant_set(h, z, None)?
        .into_iter()
        .map(|r| {
            let [w1, w2] = r.witnesses;
            SecantPair { y1: w1.point, y2: w2.point, x1: w1.preimage, x2: w2.preimage }
        })
        .collect())
}
