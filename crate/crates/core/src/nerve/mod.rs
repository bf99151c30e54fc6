//! Covers of finite point clouds by equal closed balls, their exact Čech nerves,
//! and the partition-of-unity map from the cloud to the nerve.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Read;

use num_bigint::BigInt;
use serde::Serialize;

use crate::complex::{BarycentricPoint, ComplexError, Marks, MarksJson, Simplex, SimplicialComplex, VertexId};
use crate::exact::{self, solve_affine, Matrix, Point, Rational};

/// Largest simplex the nerve builder will emit.
pub const MAX_SIMPLEX_VERTICES: usize = 16;

const WEIGHT_BITS: u32 = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NerveError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("point {index} has {found} coordinates, expected {expected}")]
    AmbientMismatch { index: usize, expected: usize, found: usize },
    #[error("marked index {0} is out of range")]
    MarkOutOfRange(usize),
    #[error("point {0} is marked on both sides")]
    MarksOverlap(usize),
    #[error("radius must be positive")]
    NonPositiveRadius,
    #[error("marked sets touch: their minimum distance is zero")]
    MarksTouch,
    #[error("cover element {0} meets both marked sets")]
    SeparationViolated(usize),
    #[error("nerve simplex would exceed {MAX_SIMPLEX_VERTICES} vertices; use a smaller radius")]
    TooLarge,
    #[error("point {0} lies in no cover element")]
    Uncovered(usize),
    #[error("cover does not belong to this cloud")]
    CoverMismatch,
    #[error("CSV error: {0}")]
    Csv(String),
    #[error("marks JSON error: {0}")]
    MarksJson(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A finite sample with two disjoint marked index sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCloud {
    points: Vec<Point>,
    b1: BTreeSet<usize>,
    b2: BTreeSet<usize>,
}

impl PointCloud {
    pub fn new(
        points: Vec<Point>,
        b1: impl IntoIterator<Item = usize>,
        b2: impl IntoIterator<Item = usize>,
    ) -> Result<Self, NerveError> {
        let first = points.first().ok_or(NerveError::EmptyCloud)?;
        let m = first.len();
        if let Some((index, p)) = points.iter().enumerate().find(|(_, p)| p.len() != m) {
            return Err(NerveError::AmbientMismatch { index, expected: m, found: p.len() });
        }
        let b1: BTreeSet<usize> = b1.into_iter().collect();
        let b2: BTreeSet<usize> = b2.into_iter().collect();
        if let Some(&i) = b1.iter().chain(&b2).find(|&&i| i >= points.len()) {
            return Err(NerveError::MarkOutOfRange(i));
        }
        if let Some(&i) = b1.intersection(&b2).next() {
            return Err(NerveError::MarksOverlap(i));
        }
        Ok(PointCloud { points, b1, b2 })
    }

    /// One point per row of rational or decimal literals; `#` starts a comment
    /// and a non-numeric first row is taken as a header.
    pub fn from_csv(reader: impl Read) -> Result<Self, NerveError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut points = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| NerveError::Csv(e.to_string()))?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            let parsed: Result<Point, _> = record.iter().map(str::parse::<Rational>).collect();
            match parsed {
                Ok(p) => points.push(p),
                Err(_) if row == 0 => continue,
                Err(e) => return Err(NerveError::Csv(format!("row {}: {e}", row + 1))),
            }
        }
        PointCloud::new(points, [], [])
    }

    /// Applies marks from `{"B1": [indices], "B2": [indices]}`.
    pub fn with_marks_json(self, text: &str) -> Result<Self, NerveError> {
        let marks: MarksJson = serde_json::from_str(text).map_err(|e| NerveError::MarksJson(e.to_string()))?;
        let idx = |v: &[VertexId]| v.iter().map(|&i| i as usize).collect::<Vec<_>>();
        PointCloud::new(self.points, idx(&marks.b1), idx(&marks.b2))
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn ambient(&self) -> usize {
        self.points[0].len()
    }

    pub fn b1(&self) -> &BTreeSet<usize> {
        &self.b1
    }

    pub fn b2(&self) -> &BTreeSet<usize> {
        &self.b2
    }

    pub fn has_marks(&self) -> bool {
        !self.b1.is_empty() && !self.b2.is_empty()
    }

    /// Squared minimum distance between the marked sets, if both are nonempty.
    pub fn mark_separation_sq(&self) -> Option<Rational> {
        self.b1
            .iter()
            .flat_map(|&i| self.b2.iter().map(move |&j| (i, j)))
            .map(|(i, j)| exact::dist_sq(&self.points[i], &self.points[j]))
            .min()
    }
}

/// Closed balls of a common radius centred at every cloud point. Element `i`
/// is centred at point `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cover {
    pub centers: Vec<Point>,
    pub radius: Rational,
    /// `incidence[p]`: elements containing point `p`.
    pub incidence: Vec<Vec<usize>>,
    pub meets_b1: BTreeSet<usize>,
    pub meets_b2: BTreeSet<usize>,
    /// No element contains points of both marked sets.
    pub separated: bool,
}

pub fn build_cover(cloud: &PointCloud, radius: &Rational) -> Result<Cover, NerveError> {
    if !radius.is_positive() {
        return Err(NerveError::NonPositiveRadius);
    }
    let r2 = radius.square();
    let pts = &cloud.points;
    let incidence: Vec<Vec<usize>> = pts
        .iter()
        .map(|p| (0..pts.len()).filter(|&e| exact::dist_sq(p, &pts[e]) <= r2).collect())
        .collect();
    let meets = |side: &BTreeSet<usize>| -> BTreeSet<usize> {
        side.iter().flat_map(|&p| incidence[p].iter().copied()).collect()
    };
    let meets_b1 = meets(&cloud.b1);
    let meets_b2 = meets(&cloud.b2);
    let separated = meets_b1.is_disjoint(&meets_b2);
    Ok(Cover { centers: pts.clone(), radius: radius.clone(), incidence, meets_b1, meets_b2, separated })
}

impl Cover {
    /// Some pair of overlapping elements has one meeting each marked set.
    pub fn has_mixed_edge(&self) -> bool {
        let reach = (&self.radius * Rational::from(2)).square();
        self.meets_b1.iter().any(|&a| {
            self.meets_b2.iter().any(|&b| exact::dist_sq(&self.centers[a], &self.centers[b]) <= reach)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefinedCover {
    pub cover: Cover,
    pub requested: Rational,
    /// Radii tried, the last being the one used.
    pub trace: Vec<Rational>,
    pub halvings: usize,
}

/// Halves the radius until elements are separated and no nerve simplex can
/// mix the two marked sets. The radius is returned unchanged when it already
/// qualifies or when a side is unmarked.
pub fn refine_for_separation(cloud: &PointCloud, radius: &Rational) -> Result<RefinedCover, NerveError> {
    let mut cover = build_cover(cloud, radius)?;
    let mut trace = vec![radius.clone()];
    let Some(d2) = cloud.mark_separation_sq() else {
        return Ok(RefinedCover { cover, requested: radius.clone(), trace, halvings: 0 });
    };
    if d2.is_zero() {
        return Err(NerveError::MarksTouch);
    }
    let mut r = radius.clone();
    let mut halvings = 0;
    // r < D/2 separates elements; overlapping elements stay clean once r < D/4
    while !cover.separated || cover.has_mixed_edge() || (&r * Rational::from(2)).square() >= d2 {
        r = &r / Rational::from(2);
        halvings += 1;
        cover = build_cover(cloud, &r)?;
        trace.push(r.clone());
    }
    Ok(RefinedCover { cover, requested: radius.clone(), trace, halvings })
}

/// Circumcentre of independent `t` within its affine hull.
fn circumcenter(t: &[&Point]) -> Option<Point> {
    let (t0, rest) = t.split_first()?;
    if rest.is_empty() {
        return Some((*t0).clone());
    }
    let edges: Vec<Point> = rest.iter().map(|p| exact::sub(p, t0)).collect();
    let k = edges.len();
    let mut gram = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram.set(i, j, exact::dot(&edges[i], &edges[j]) * Rational::from(2));
        }
    }
    let rhs: Vec<Rational> = edges.iter().map(|e| exact::norm_sq(e)).collect();
    let sol = solve_affine(&gram, &rhs).ok()??;
    if !sol.is_unique() {
        return None;
    }
    let mut c = (*t0).clone();
    for (a, e) in sol.particular.iter().zip(&edges) {
        for (ci, ei) in c.iter_mut().zip(e) {
            *ci += a * ei;
        }
    }
    Some(c)
}

/// Whether the closed balls of radius `r` around `centers` share a point: some
/// affinely independent subset has its circumcentre within `r` of every centre
/// (the smallest enclosing ball is of this form).
fn balls_meet(centers: &[&Point], r2: &Rational) -> bool {
    let within = |c: &Point| centers.iter().all(|p| exact::dist_sq(c, p) <= *r2);
    if centers.iter().any(|c| within(c)) {
        return true;
    }
    let n = centers.len();
    let max_support = (centers[0].len() + 1).min(n);
    (1u64..(1 << n)).filter(|mask| (mask.count_ones() as usize) <= max_support && mask.count_ones() >= 2).any(|mask| {
        let t: Vec<&Point> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| centers[i]).collect();
        let refs: Vec<&[Rational]> = t.iter().map(|p| p.as_slice()).collect();
        exact::affinely_independent(&refs) && circumcenter(&t).is_some_and(|c| within(&c))
    })
}

/// The Čech nerve: a simplex for every set of elements with a common point,
/// marked by the elements meeting each marked set.
pub fn nerve_complex(cover: &Cover) -> Result<SimplicialComplex, NerveError> {
    if let Some(&e) = cover.meets_b1.intersection(&cover.meets_b2).next() {
        return Err(NerveError::SeparationViolated(e));
    }
    let n = cover.centers.len();
    let r2 = cover.radius.square();
    let reach = (&cover.radius * Rational::from(2)).square();
    let adjacent: Vec<BTreeSet<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && exact::dist_sq(&cover.centers[i], &cover.centers[j]) <= reach).collect())
        .collect();

    let mut all: HashSet<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut level: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    while !level.is_empty() {
        let mut next = Vec::new();
        for s in &level {
            let last = *s.last().expect("nonempty");
            for &v in adjacent[last].range(last + 1..) {
                if !s.iter().all(|u| adjacent[*u].contains(&v)) {
                    continue;
                }
                let mut t = s.clone();
                t.push(v);
                let faces_present = (0..t.len()).all(|skip| {
                    let face: Vec<usize> = t.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, x)| *x).collect();
                    all.contains(&face)
                });
                if !faces_present {
                    continue;
                }
                let centers: Vec<&Point> = t.iter().map(|&i| &cover.centers[i]).collect();
                if balls_meet(&centers, &r2) {
                    if t.len() > MAX_SIMPLEX_VERTICES {
                        return Err(NerveError::TooLarge);
                    }
                    next.push(t);
                }
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }

    let mut maximal: Vec<Vec<VertexId>> = all
        .iter()
        .filter(|s| {
            (0..n).filter(|v| !s.contains(v)).all(|v| {
                let mut t = (*s).clone();
                t.push(v);
                t.sort_unstable();
                !all.contains(&t)
            })
        })
        .map(|s| s.iter().map(|&i| i as VertexId).collect())
        .collect();
    maximal.sort();
    let complex = SimplicialComplex::from_maximal((0..n as VertexId).collect::<Vec<_>>(), maximal)?;
    let marks = Marks::new(
        cover.meets_b1.iter().map(|&i| i as VertexId),
        cover.meets_b2.iter().map(|&i| i as VertexId),
    );
    Ok(complex.with_marks(marks)?)
}

/// No nerve simplex has vertices on both marked sides.
pub fn mixed_simplices(complex: &SimplicialComplex) -> Vec<Simplex> {
    let marks = complex.marks();
    complex
        .simplices()
        .iter()
        .filter(|s| s.vertices().iter().any(|v| marks.b1.contains(v)) && s.vertices().iter().any(|v| marks.b2.contains(v)))
        .cloned()
        .collect()
}

/// Rounds nonnegative weights to multiples of `2^-bits` summing exactly to one,
/// giving leftover units to the largest remainders (ties to lower index).
fn round_to_unit_sum(weights: &[Rational], bits: u32) -> Vec<Rational> {
    let total: Rational = weights.iter().sum();
    let scale = Rational::from_integer(BigInt::from(1u64) << bits);
    let scaled: Vec<Rational> = weights.iter().map(|w| w / &total * &scale).collect();
    let mut units: Vec<BigInt> = scaled.iter().map(Rational::floor).collect();
    let used: BigInt = units.iter().sum();
    let mut left = (BigInt::from(1u64) << bits) - used;
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = &scaled[a] - Rational::from_integer(units[a].clone());
        let rb = &scaled[b] - Rational::from_integer(units[b].clone());
        rb.cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if left <= BigInt::from(0) {
            break;
        }
        units[i] += 1;
        left -= 1;
    }
    units.into_iter().map(|u| Rational::from_integer(u) / &scale).collect()
}

/// Barycentric coordinates of each cloud point on the nerve: the weight of an
/// incident element is `r - |x - c|`, with the root bounded above at `2^-20`
/// slack, then normalized and rounded to an exact unit sum.
pub fn canonical_map(cloud: &PointCloud, cover: &Cover) -> Result<Vec<BarycentricPoint>, NerveError> {
    if cover.centers != cloud.points {
        return Err(NerveError::CoverMismatch);
    }
    cloud
        .points
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let incident = &cover.incidence[i];
            if incident.is_empty() {
                return Err(NerveError::Uncovered(i));
            }
            let raw: Vec<Rational> = incident
                .iter()
                .map(|&e| {
                    let d = exact::dist_sq(x, &cover.centers[e]).sqrt_upper(WEIGHT_BITS);
                    let w = &cover.radius - &d;
                    if w.is_negative() { Rational::zero() } else { w }
                })
                .collect();
            let weights = round_to_unit_sum(&raw, WEIGHT_BITS);
            let pairs = incident.iter().map(|&e| e as VertexId).zip(weights);
            Ok(BarycentricPoint::from_pairs(pairs)?)
        })
        .collect()
}

/// Summary of a nerve construction.
#[derive(Clone, Debug, Serialize)]
pub struct NerveSummary {
    pub points: usize,
    pub radius: Rational,
    pub dimension: isize,
    pub max_incidence: usize,
    pub simplices: usize,
    pub mixed_simplices: usize,
    pub weights_denominator_bits: u32,
    pub degrees: BTreeMap<usize, usize>,
}

pub fn summarize(cover: &Cover, complex: &SimplicialComplex) -> NerveSummary {
    let mut degrees = BTreeMap::new();
    for s in complex.simplices() {
        *degrees.entry(s.len() - 1).or_insert(0) += 1;
    }
    NerveSummary {
        points: cover.centers.len(),
        radius: cover.radius.clone(),
        dimension: complex.dimension(),
        max_incidence: cover.incidence.iter().map(Vec::len).max().unwrap_or(0),
        simplices: complex.simplices().len(),
        mixed_simplices: mixed_simplices(complex).len(),
        weights_denominator_bits: WEIGHT_BITS,
        degrees,
    }
}
