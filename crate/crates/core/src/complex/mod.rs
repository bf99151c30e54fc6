//! Finite simplicial complexes, barycentric coordinates on their polyhedra, and
//! piecewise-linear maps into `R^m` determined by vertex images.

mod json;
mod subdivide;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exact::{self, Point, Rational};

pub use json::{ComplexJson, MarksJson};
pub use subdivide::{
    barycentric_subdivide, barycentric_subdivision, subdivide_until, subdivide_until_with_cap,
    Subdivision, DEFAULT_SUBDIVISION_CAP,
};

pub type VertexId = u64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("invalid complex: {0}")]
    Invalid(#[from] ComplexViolation),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("simplex {0} is not in the complex")]
    UnknownSimplex(Simplex),
    #[error("vertex {0} has no image")]
    MissingImage(VertexId),
    #[error("image given for vertex {0}, which is not in the complex")]
    UnexpectedImage(VertexId),
    #[error("ambient dimension mismatch: expected {expected}, found {found}")]
    AmbientMismatch { expected: usize, found: usize },
    #[error("invalid barycentric point: {0}")]
    BadBarycentric(String),
    #[error("delta must be positive")]
    NonPositiveDelta,
    #[error(
        "subdivision cap of {rounds} rounds reached; squared image diameter {achieved_sq} \
         is not below {target_sq}"
    )]
    IterationCap { rounds: usize, achieved_sq: Rational, target_sq: Rational },
    #[error("maps are defined on different complexes")]
    ComplexMismatch,
    #[error("complex JSON carries no vertex images")]
    MissingImages,
}

/// A face-closure or bookkeeping defect found by [`SimplicialComplex::validate`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexViolation {
    #[error("missing face {face} of simplex {simplex}")]
    MissingFace { simplex: Simplex, face: Simplex },
    #[error("dangling vertex {0} (not a 0-simplex)")]
    DanglingVertex(VertexId),
    #[error("simplex {simplex} uses undeclared vertex {vertex}")]
    UndeclaredVertex { simplex: Simplex, vertex: VertexId },
    #[error("empty simplex")]
    EmptySimplex,
    #[error("vertex {0} is marked on both sides")]
    MarksOverlap(VertexId),
    #[error("marked vertex {0} is not in the complex")]
    UnknownMarkedVertex(VertexId),
}

/// A simplex as a sorted, duplicate-free set of vertex ids.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    pub fn new(mut vertices: Vec<VertexId>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        Simplex(vertices)
    }

    pub fn vertex(v: VertexId) -> Self {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dimension(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    pub fn is_disjoint(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| !other.contains(*v))
    }

    pub fn union(&self, other: &Simplex) -> Simplex {
        Simplex::new(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Every nonempty subset, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (1u64..(1u64 << n))
            .map(|mask| {
                Simplex((0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.0[i]).collect())
            })
            .collect()
    }

    /// Faces with exactly one vertex removed.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.0.len() < 2 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|skip| {
                Simplex(self.0.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v).collect())
            })
            .collect()
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Marked vertex sets B1, B2 spanning disjoint full subcomplexes.
///
/// A point of the polyhedron lies in side `i` iff every vertex of its carrier
/// simplex is marked `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Marks {
    pub b1: BTreeSet<VertexId>,
    pub b2: BTreeSet<VertexId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    B1,
    B2,
}

impl Marks {
    pub fn new(b1: impl IntoIterator<Item = VertexId>, b2: impl IntoIterator<Item = VertexId>) -> Self {
        Marks { b1: b1.into_iter().collect(), b2: b2.into_iter().collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.b1.is_empty() && self.b2.is_empty()
    }

    pub fn side(&self, side: Side) -> &BTreeSet<VertexId> {
        match side {
            Side::B1 => &self.b1,
            Side::B2 => &self.b2,
        }
    }

    pub fn simplex_in(&self, side: Side, s: &Simplex) -> bool {
        let set = self.side(side);
        !s.is_empty() && s.vertices().iter().all(|v| set.contains(v))
    }

    pub fn point_in(&self, side: Side, x: &BarycentricPoint) -> bool {
        self.simplex_in(side, &x.carrier())
    }
}

/// A finite simplicial complex with every face stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: BTreeSet<VertexId>,
    simplices: BTreeSet<Simplex>,
    maximal: Vec<Simplex>,
    marks: Marks,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        SimplicialComplex::from_simplices_unchecked([], [])
    }

    /// Builds a complex from declared vertices and maximal simplices, completing
    /// faces. Declared vertices outside every listed simplex become 0-simplices.
    pub fn from_maximal(
        vertices: impl IntoIterator<Item = VertexId>,
        maximal: impl IntoIterator<Item = Vec<VertexId>>,
    ) -> Result<Self, ComplexError> {
        let vertices: BTreeSet<VertexId> = vertices.into_iter().collect();
        let mut simplices = BTreeSet::new();
        for raw in maximal {
            let s = Simplex::new(raw);
            if s.is_empty() {
                return Err(ComplexViolation::EmptySimplex.into());
            }
            if let Some(&v) = s.vertices().iter().find(|v| !vertices.contains(v)) {
                return Err(ComplexViolation::UndeclaredVertex { simplex: s, vertex: v }.into());
            }
            if simplices.contains(&s) {
                continue;
            }
            simplices.extend(s.faces());
        }
        simplices.extend(vertices.iter().map(|&v| Simplex::vertex(v)));
        Ok(SimplicialComplex::from_simplices_unchecked(vertices, simplices))
    }

    /// Stores exactly what it is given; use [`SimplicialComplex::validate`] to check it.
    pub fn from_simplices_unchecked(
        vertices: impl IntoIterator<Item = VertexId>,
        simplices: impl IntoIterator<Item = Simplex>,
    ) -> Self {
        let vertices = vertices.into_iter().collect();
        let simplices: BTreeSet<Simplex> = simplices.into_iter().collect();
        let maximal = maximal_of(&simplices);
        SimplicialComplex { vertices, simplices, maximal, marks: Marks::default() }
    }

    pub fn with_marks(mut self, marks: Marks) -> Result<Self, ComplexError> {
        for &v in marks.b1.iter().chain(&marks.b2) {
            if !self.vertices.contains(&v) {
                return Err(ComplexViolation::UnknownMarkedVertex(v).into());
            }
        }
        if let Some(&v) = marks.b1.intersection(&marks.b2).next() {
            return Err(ComplexViolation::MarksOverlap(v).into());
        }
        self.marks = marks;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ComplexViolation> {
        for s in &self.simplices {
            if s.is_empty() {
                return Err(ComplexViolation::EmptySimplex);
            }
            if let Some(&v) = s.vertices().iter().find(|v| !self.vertices.contains(v)) {
                return Err(ComplexViolation::UndeclaredVertex { simplex: s.clone(), vertex: v });
            }
            for face in s.facets() {
                if !self.simplices.contains(&face) {
                    return Err(ComplexViolation::MissingFace { simplex: s.clone(), face });
                }
            }
        }
        if let Some(&v) = self.vertices.iter().find(|&&v| !self.simplices.contains(&Simplex::vertex(v))) {
            return Err(ComplexViolation::DanglingVertex(v));
        }
        if let Some(&v) = self.marks.b1.intersection(&self.marks.b2).next() {
            return Err(ComplexViolation::MarksOverlap(v));
        }
        Ok(())
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn simplices(&self) -> &BTreeSet<Simplex> {
        &self.simplices
    }

    pub fn maximal_simplices(&self) -> &[Simplex] {
        &self.maximal
    }

    pub fn marks(&self) -> &Marks {
        &self.marks
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Maximum simplex dimension; `-1` for the empty complex.
    pub fn dimension(&self) -> isize {
        self.simplices.iter().map(Simplex::dimension).max().unwrap_or(-1)
    }

    /// Maximal simplices of the full subcomplex spanned by one marked side.
    pub fn marked_maximal(&self, side: Side) -> Vec<Simplex> {
        let inside: BTreeSet<Simplex> =
            self.simplices.iter().filter(|s| self.marks.simplex_in(side, s)).cloned().collect();
        maximal_of(&inside)
    }
}

fn maximal_of(simplices: &BTreeSet<Simplex>) -> Vec<Simplex> {
    let mut covered = BTreeSet::new();
    for s in simplices {
        for f in s.facets() {
            covered.insert(f);
        }
    }
    simplices.iter().filter(|s| !covered.contains(*s)).cloned().collect()
}

/// An unordered pair of simplices, flagged when their vertex sets are disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexPair {
    pub first: Simplex,
    pub second: Simplex,
    pub disjoint: bool,
}

/// All unordered pairs of distinct simplices of `c`.
pub fn simplex_pairs(c: &SimplicialComplex) -> Vec<SimplexPair> {
    let all: Vec<&Simplex> = c.simplices().iter().collect();
    let mut out = Vec::new();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            out.push(SimplexPair { first: (*a).clone(), second: (*b).clone(), disjoint: a.is_disjoint(b) });
        }
    }
    out
}

/// A point of `|K|` given by barycentric weights on one simplex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarycentricPoint {
    pub simplex: Simplex,
    pub weights: Vec<Rational>,
}

impl BarycentricPoint {
    /// Checks weights: one per vertex, nonnegative, summing exactly to one.
    pub fn new(simplex: Simplex, weights: Vec<Rational>) -> Result<Self, ComplexError> {
        if weights.len() != simplex.len() {
            return Err(ComplexError::BadBarycentric(format!(
                "{} weights for a simplex with {} vertices",
                weights.len(),
                simplex.len()
            )));
        }
        if weights.iter().any(Rational::is_negative) {
            return Err(ComplexError::BadBarycentric("negative weight".into()));
        }
        let total: Rational = weights.iter().sum();
        if total != 1 {
            return Err(ComplexError::BadBarycentric(format!("weights sum to {total}")));
        }
        Ok(BarycentricPoint { simplex, weights })
    }

    pub fn at_vertex(v: VertexId) -> Self {
        BarycentricPoint { simplex: Simplex::vertex(v), weights: vec![Rational::one()] }
    }

    /// Builds a point from `(vertex, weight)` pairs in any order.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (VertexId, Rational)>) -> Result<Self, ComplexError> {
        let map: BTreeMap<VertexId, Rational> = pairs.into_iter().collect();
        let simplex = Simplex(map.keys().copied().collect());
        BarycentricPoint::new(simplex, map.into_values().collect())
    }

    pub fn weight_of(&self, v: VertexId) -> Rational {
        match self.simplex.0.binary_search(&v) {
            Ok(i) => self.weights[i].clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Vertices carrying positive weight: the smallest simplex containing the point.
    pub fn carrier(&self) -> Simplex {
        Simplex(
            self.simplex
                .0
                .iter()
                .zip(&self.weights)
                .filter(|(_, w)| w.is_positive())
                .map(|(v, _)| *v)
                .collect(),
        )
    }

    /// The same point expressed on its carrier.
    pub fn normalized(&self) -> BarycentricPoint {
        let (vs, ws): (Vec<_>, Vec<_>) = self
            .simplex
            .0
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| w.is_positive())
            .map(|(v, w)| (*v, w.clone()))
            .unzip();
        BarycentricPoint { simplex: Simplex(vs), weights: ws }
    }

    /// Equality as points of the polyhedron, independent of the host simplex.
    pub fn same_point(&self, other: &BarycentricPoint) -> bool {
        self.normalized() == other.normalized()
    }
}

/// A map linear on each simplex, determined by the images of the vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLMap {
    complex: SimplicialComplex,
    ambient: usize,
    images: BTreeMap<VertexId, Point>,
}

impl PLMap {
    pub fn new(
        complex: SimplicialComplex,
        ambient: usize,
        images: BTreeMap<VertexId, Point>,
    ) -> Result<Self, ComplexError> {
        complex.validate()?;
        for v in complex.vertices() {
            match images.get(v) {
                None => return Err(ComplexError::MissingImage(*v)),
                Some(p) if p.len() != ambient => {
                    return Err(ComplexError::AmbientMismatch { expected: ambient, found: p.len() })
                }
                Some(_) => {}
            }
        }
        if let Some(v) = images.keys().find(|v| !complex.vertices().contains(v)) {
            return Err(ComplexError::UnexpectedImage(*v));
        }
        Ok(PLMap { complex, ambient, images })
    }

    /// The constant map sending every vertex to the origin.
    pub fn constant(complex: SimplicialComplex, ambient: usize) -> Result<Self, ComplexError> {
        let images = complex.vertices().iter().map(|&v| (v, vec![Rational::zero(); ambient])).collect();
        PLMap::new(complex, ambient, images)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn images(&self) -> &BTreeMap<VertexId, Point> {
        &self.images
    }

    pub fn image(&self, v: VertexId) -> &Point {
        &self.images[&v]
    }

    pub fn simplex_images(&self, s: &Simplex) -> Vec<&[Rational]> {
        s.vertices().iter().map(|v| self.images[v].as_slice()).collect()
    }

    /// Same complex, new vertex images.
    pub fn with_images(&self, images: BTreeMap<VertexId, Point>) -> Result<Self, ComplexError> {
        PLMap::new(self.complex.clone(), self.ambient, images)
    }

    pub fn evaluate(&self, x: &BarycentricPoint) -> Result<Point, ComplexError> {
        if !self.complex.contains(&x.simplex) {
            return Err(ComplexError::UnknownSimplex(x.simplex.clone()));
        }
        Ok(exact::combination(&self.simplex_images(&x.simplex), &x.weights))
    }

    /// Largest squared distance between image vertices of `s`, which is the
    /// squared diameter of the convex image.
    pub fn image_diameter_sq(&self, s: &Simplex) -> Rational {
        let pts = self.simplex_images(s);
        let mut best = Rational::zero();
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                let d = exact::dist_sq(a, b);
                if d > best {
                    best = d;
                }
            }
        }
        best
    }

    pub fn max_image_diameter_sq(&self) -> Rational {
        self.complex
            .maximal_simplices()
            .iter()
            .map(|s| self.image_diameter_sq(s))
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// Certified rational upper bound on `sup |h - g|` for any `g` that agrees with
/// `h0` at the vertices and maps each simplex into the convex hull of its
/// `h0`-image: max vertex displacement plus max `h0` simplex diameter.
pub fn closeness_bound(h0: &PLMap, h: &PLMap) -> Result<Rational, ComplexError> {
    if h0.complex.simplices != h.complex.simplices || h0.complex.vertices != h.complex.vertices {
        return Err(ComplexError::ComplexMismatch);
    }
    if h0.ambient != h.ambient {
        return Err(ComplexError::AmbientMismatch { expected: h0.ambient, found: h.ambient });
    }
    let displacement_sq = h0
        .images
        .iter()
        .map(|(v, p)| exact::dist_sq(p, &h.images[v]))
        .max()
        .unwrap_or_else(Rational::zero);
    let diameter_sq = h0.max_image_diameter_sq();
    Ok(displacement_sq.sqrt_upper(20) + diameter_sq.sqrt_upper(20))
}
