//! Affine flats of `R^m`: spans, skewness, joins, intersections, the transversal
//! line through a point, and exact line/simplex incidence.

mod canonical;
mod distance;

use crate::complex::{BarycentricPoint, ComplexError, PLMap, Simplex};
use crate::exact::{self, solve_affine, Matrix, Point, Rational};

pub use canonical::CanonicalLine;
pub use distance::{image_distance_sq, simplex_distance_sq};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlatsError {
    #[error("direction vectors are linearly dependent")]
    DependentDirections,
    #[error("points are affinely dependent")]
    DependentPoints,
    #[error("no points given")]
    NoPoints,
    #[error("ambient dimension mismatch: expected {expected}, found {found}")]
    AmbientMismatch { expected: usize, found: usize },
    #[error("skewness needs d1 + d2 + 1 <= m, got d1 = {d1}, d2 = {d2}, m = {m}")]
    DimensionPrecondition { d1: usize, d2: usize, m: usize },
    #[error("flats are not skew")]
    NotSkew,
    #[error("point already lies on the flat")]
    PointOnFlat,
    #[error("expected a line, got a {0}-flat")]
    NotALine(usize),
    #[error("line lies in the affine span of simplex {0}")]
    LineInSpan(Simplex),
    #[error("simplex {0} has an affinely dependent image")]
    DegenerateSimplex(Simplex),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A `d`-dimensional affine subspace `base + span(directions)` of `R^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineFlat {
    base: Point,
    directions: Vec<Point>,
}

impl AffineFlat {
    /// Verifies that the directions are independent and share the base's dimension.
    pub fn new(base: Point, directions: Vec<Point>) -> Result<Self, FlatsError> {
        if let Some(d) = directions.iter().find(|d| d.len() != base.len()) {
            return Err(FlatsError::AmbientMismatch { expected: base.len(), found: d.len() });
        }
        if exact::vectors_rank(&directions) != directions.len() {
            return Err(FlatsError::DependentDirections);
        }
        Ok(AffineFlat { base, directions })
    }

    pub fn point(p: Point) -> Self {
        AffineFlat { base: p, directions: Vec::new() }
    }

    pub fn line(base: Point, direction: Point) -> Result<Self, FlatsError> {
        AffineFlat::new(base, vec![direction])
    }

    pub fn ambient(&self) -> usize {
        self.base.len()
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn directions(&self) -> &[Point] {
        &self.directions
    }

    fn direction_matrix(&self) -> Matrix {
        Matrix::from_columns(&self.directions, self.ambient()).expect("directions share the ambient dimension")
    }

    /// `base + Σ t_i · directions[i]`.
    pub fn at(&self, coords: &[Rational]) -> Point {
        let mut p = self.base.clone();
        for (t, d) in coords.iter().zip(&self.directions) {
            for (pi, di) in p.iter_mut().zip(d) {
                *pi += t * di;
            }
        }
        p
    }

    fn check_ambient(&self, n: usize) -> Result<(), FlatsError> {
        if n != self.ambient() {
            return Err(FlatsError::AmbientMismatch { expected: self.ambient(), found: n });
        }
        Ok(())
    }
}

/// The flat spanned by affinely independent points: base = first point,
/// directions = differences to it.
pub fn span_of_points(points: &[&[Rational]]) -> Result<AffineFlat, FlatsError> {
    let (first, rest) = points.split_first().ok_or(FlatsError::NoPoints)?;
    if let Some(p) = rest.iter().find(|p| p.len() != first.len()) {
        return Err(FlatsError::AmbientMismatch { expected: first.len(), found: p.len() });
    }
    if !exact::affinely_independent(points) {
        return Err(FlatsError::DependentPoints);
    }
    Ok(AffineFlat { base: first.to_vec(), directions: rest.iter().map(|p| exact::sub(p, first)).collect() })
}

pub fn contains_point(f: &AffineFlat, z: &[Rational]) -> Result<bool, FlatsError> {
    f.check_ambient(z.len())?;
    let rhs = exact::sub(z, &f.base);
    if f.dim() == 0 {
        return Ok(rhs.iter().all(Rational::is_zero));
    }
    Ok(solve_affine(&f.direction_matrix(), &rhs).expect("shapes agree").is_some())
}

/// True iff the flats neither meet nor share a direction, i.e. the rank of
/// `[directions1 | directions2 | base2 - base1]` is `d1 + d2 + 1`.
pub fn flats_skew(f1: &AffineFlat, f2: &AffineFlat) -> Result<bool, FlatsError> {
    f1.check_ambient(f2.ambient())?;
    let m = f1.ambient();
    if f1.dim() + f2.dim() + 1 > m {
        return Err(FlatsError::DimensionPrecondition { d1: f1.dim(), d2: f2.dim(), m });
    }
    let mut vectors: Vec<Point> = f1.directions.iter().chain(&f2.directions).cloned().collect();
    vectors.push(exact::sub(&f2.base, &f1.base));
    Ok(exact::vectors_rank(&vectors) == f1.dim() + f2.dim() + 1)
}

/// The `(d+1)`-flat spanned by `f` and a point `z` off it.
pub fn join_point_flat(z: &[Rational], f: &AffineFlat) -> Result<AffineFlat, FlatsError> {
    if contains_point(f, z)? {
        return Err(FlatsError::PointOnFlat);
    }
    let mut directions = f.directions.clone();
    directions.push(exact::sub(z, &f.base));
    Ok(AffineFlat { base: f.base.clone(), directions })
}

/// Exact intersection, or `None` when the flats are disjoint.
pub fn intersect_flats(f1: &AffineFlat, f2: &AffineFlat) -> Result<Option<AffineFlat>, FlatsError> {
    f1.check_ambient(f2.ambient())?;
    let m = f1.ambient();
    let (d1, d2) = (f1.dim(), f2.dim());
    // base1 + D1 s = base2 + D2 t  <=>  [D1 | -D2] (s, t) = base2 - base1
    let mut columns: Vec<Point> = f1.directions.clone();
    columns.extend(f2.directions.iter().map(|d| d.iter().map(|x| -x).collect()));
    let rhs = exact::sub(&f2.base, &f1.base);
    if columns.is_empty() {
        return Ok(rhs.iter().all(Rational::is_zero).then(|| f1.clone()));
    }
    let a = Matrix::from_columns(&columns, m).expect("shapes agree");
    let Some(sol) = solve_affine(&a, &rhs).expect("shapes agree") else {
        return Ok(None);
    };
    let base = f1.at(&sol.particular[..d1]);
    // D1 s = 0 forces s = 0 and then t = 0, so the s-parts of kernel vectors map
    // to independent directions.
    let directions: Vec<Point> = sol
        .kernel
        .iter()
        .map(|k| {
            let mut v = vec![Rational::zero(); m];
            for (c, d) in k[..d1].iter().zip(&f1.directions) {
                for (vi, di) in v.iter_mut().zip(d) {
                    *vi += c * di;
                }
            }
            v
        })
        .collect();
    debug_assert_eq!(sol.particular.len(), d1 + d2);
    Ok(Some(AffineFlat { base, directions }))
}

/// A line through `z` together with its meeting points on the two flats.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transversal {
    pub line: AffineFlat,
    pub meets: [Point; 2],
}

/// Point where `z + t·u` meets `f`, when it meets it in exactly one point.
fn meet_line_flat(z: &[Rational], u: &[Rational], f: &AffineFlat) -> Result<Option<Point>, FlatsError> {
    let m = z.len();
    // z + t u = base + D s  <=>  [u | -D] (t, s) = base - z
    let mut columns = vec![u.to_vec()];
    columns.extend(f.directions.iter().map(|d| d.iter().map(|x| -x).collect()));
    let a = Matrix::from_columns(&columns, m).expect("shapes agree");
    let Some(sol) = solve_affine(&a, &exact::sub(&f.base, z)).expect("shapes agree") else {
        return Ok(None);
    };
    if !sol.is_unique() {
        return Err(FlatsError::NotSkew);
    }
    let t = &sol.particular[0];
    Ok(Some(z.iter().zip(u).map(|(zi, ui)| zi + t * ui).collect()))
}

/// The unique line through `z` meeting both skew flats, if it exists.
///
/// The candidate is the intersection of the joins of `z` with each flat. It is
/// kept only when that intersection is a line meeting both flats; when `z` lies
/// on either flat no line qualifies.
pub fn transversal_line_through_point(
    z: &[Rational],
    f1: &AffineFlat,
    f2: &AffineFlat,
) -> Result<Option<Transversal>, FlatsError> {
    f1.check_ambient(z.len())?;
    if !flats_skew(f1, f2)? {
        return Err(FlatsError::NotSkew);
    }
    if contains_point(f1, z)? || contains_point(f2, z)? {
        return Ok(None);
    }
    let j1 = join_point_flat(z, f1)?;
    let j2 = join_point_flat(z, f2)?;
    let common = intersect_flats(&j1, &j2)?.expect("both joins contain z");
    match common.dim() {
        0 => return Ok(None),
        1 => {}
        _ => return Err(FlatsError::NotSkew),
    }
    let u = &common.directions[0];
    let (Some(p1), Some(p2)) = (meet_line_flat(z, u, f1)?, meet_line_flat(z, u, f2)?) else {
        return Ok(None);
    };
    let line = AffineFlat { base: z.to_vec(), directions: vec![u.clone()] };
    Ok(Some(Transversal { line, meets: [p1, p2] }))
}

/// Intersection of a line with the closed image of `simplex`, with exact
/// barycentric coordinates. At most one point unless the line lies in the
/// simplex's span, which is reported as an error.
pub fn line_meets_simplex(
    line: &AffineFlat,
    h: &PLMap,
    simplex: &Simplex,
) -> Result<Option<(Point, BarycentricPoint)>, FlatsError> {
    if line.dim() != 1 {
        return Err(FlatsError::NotALine(line.dim()));
    }
    line.check_ambient(h.ambient())?;
    if !h.complex().contains(simplex) {
        return Err(ComplexError::UnknownSimplex(simplex.clone()).into());
    }
    let pts = h.simplex_images(simplex);
    if !exact::affinely_independent(&pts) {
        return Err(FlatsError::DegenerateSimplex(simplex.clone()));
    }
    let m = h.ambient();
    let k = pts.len();
    // base + t u = Σ w_i p_i, Σ w_i = 1  over unknowns (t, w_0..w_k)
    let mut a = Matrix::zeros(m + 1, k + 1);
    for r in 0..m {
        a.set(r, 0, -&line.directions[0][r]);
        for (j, p) in pts.iter().enumerate() {
            a.set(r, j + 1, p[r].clone());
        }
    }
    for j in 0..k {
        a.set(m, j + 1, Rational::one());
    }
    let mut rhs = line.base.clone();
    rhs.push(Rational::one());
    let Some(sol) = solve_affine(&a, &rhs).expect("shapes agree") else {
        return Ok(None);
    };
    if !sol.is_unique() {
        return Err(FlatsError::LineInSpan(simplex.clone()));
    }
    let weights = sol.particular[1..].to_vec();
    if weights.iter().any(Rational::is_negative) {
        return Ok(None);
    }
    let x = BarycentricPoint::new(simplex.clone(), weights)?;
    let point = line.at(&sol.particular[..1]);
    Ok(Some((point, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex;
    use crate::exact::{q, qi};
    use std::collections::BTreeMap;

    fn pt(raw: &[i64]) -> Point {
        raw.iter().map(|&x| qi(x)).collect()
    }

    fn line(b: &[i64], d: &[i64]) -> AffineFlat {
        AffineFlat::line(pt(b), pt(d)).unwrap()
    }

    fn x_axis() -> AffineFlat {
        line(&[0, 0, 0], &[1, 0, 0])
    }

    fn segment(a: &[i64], b: &[i64]) -> PLMap {
        let c = SimplicialComplex::from_maximal([0, 1], [vec![0, 1]]).unwrap();
        PLMap::new(c, a.len(), BTreeMap::from([(0, pt(a)), (1, pt(b))])).unwrap()
    }

    #[test]
    fn span_examples() {
        let o = pt(&[0, 0, 0]);
        let e = pt(&[1, 0, 0]);
        let p = span_of_points(&[&o]).unwrap();
        assert_eq!(p.dim(), 0);
        let axis = span_of_points(&[&o, &e]).unwrap();
        assert_eq!(axis, x_axis());
        let two = pt(&[2, 0, 0]);
        assert_eq!(span_of_points(&[&o, &e, &two]).unwrap_err(), FlatsError::DependentPoints);
    }

    #[test]
    fn containment_examples() {
        assert!(contains_point(&x_axis(), &pt(&[5, 0, 0])).unwrap());
        assert!(!contains_point(&x_axis(), &pt(&[0, 1, 0])).unwrap());
        let plane = AffineFlat::new(pt(&[0, 0, 0]), vec![pt(&[1, 0, 0]), pt(&[0, 0, 1])]).unwrap();
        assert!(contains_point(&plane, &pt(&[2, 0, 7])).unwrap());
        assert!(contains_point(&AffineFlat::point(pt(&[1, 2])), &pt(&[1, 2])).unwrap());
    }

    #[test]
    fn skew_examples() {
        assert!(flats_skew(&x_axis(), &line(&[0, 0, 1], &[0, 1, 0])).unwrap());
        assert!(!flats_skew(&x_axis(), &line(&[0, 0, 1], &[1, 0, 0])).unwrap());
        assert!(!flats_skew(&x_axis(), &line(&[0, 0, 0], &[0, 1, 0])).unwrap());
        let plane = AffineFlat::new(pt(&[0, 0, 0]), vec![pt(&[1, 0, 0]), pt(&[0, 1, 0])]).unwrap();
        assert!(matches!(flats_skew(&plane, &x_axis()), Err(FlatsError::DimensionPrecondition { .. })));
    }

    #[test]
    fn join_examples() {
        let j = join_point_flat(&pt(&[0, 0, 2]), &x_axis()).unwrap();
        assert_eq!(j.dim(), 2);
        assert!(contains_point(&j, &pt(&[3, 0, -4])).unwrap());
        assert!(!contains_point(&j, &pt(&[0, 1, 0])).unwrap());

        let j = join_point_flat(&pt(&[0, 1]), &AffineFlat::point(pt(&[0, 0]))).unwrap();
        assert!(contains_point(&j, &pt(&[0, -7])).unwrap());
        assert!(!contains_point(&j, &pt(&[1, 0])).unwrap());

        assert_eq!(join_point_flat(&pt(&[5, 0, 0]), &x_axis()).unwrap_err(), FlatsError::PointOnFlat);
    }

    #[test]
    fn intersection_examples() {
        let y0 = AffineFlat::new(pt(&[0, 0, 0]), vec![pt(&[1, 0, 0]), pt(&[0, 0, 1])]).unwrap();
        let x0 = AffineFlat::new(pt(&[0, 0, 0]), vec![pt(&[0, 1, 0]), pt(&[0, 0, 1])]).unwrap();
        let z_axis = intersect_flats(&y0, &x0).unwrap().unwrap();
        assert_eq!(z_axis.dim(), 1);
        assert!(contains_point(&z_axis, &pt(&[0, 0, 9])).unwrap());

        let z0 = AffineFlat::new(pt(&[0, 0, 0]), vec![pt(&[1, 0, 0]), pt(&[0, 1, 0])]).unwrap();
        let z1 = AffineFlat::new(pt(&[0, 0, 1]), vec![pt(&[1, 0, 0]), pt(&[0, 1, 0])]).unwrap();
        assert!(intersect_flats(&z0, &z1).unwrap().is_none());

        let same = intersect_flats(&y0, &y0).unwrap().unwrap();
        assert_eq!(same.dim(), 2);
        assert!(contains_point(&same, &pt(&[4, 0, 4])).unwrap());
    }

    #[test]
    fn transversal_examples() {
        let f2 = line(&[0, 0, 1], &[0, 1, 0]);
        let t = transversal_line_through_point(&pt(&[0, 0, 2]), &x_axis(), &f2).unwrap().unwrap();
        assert_eq!(t.meets, [pt(&[0, 0, 0]), pt(&[0, 0, 1])]);
        assert_eq!(CanonicalLine::from_flat(&t.line).direction(), &pt(&[0, 0, 1]));

        assert!(transversal_line_through_point(&pt(&[1, 1, 1]), &x_axis(), &f2).unwrap().is_none());
        assert!(transversal_line_through_point(&pt(&[5, 0, 0]), &x_axis(), &f2).unwrap().is_none());

        let parallel = line(&[0, 0, 1], &[1, 0, 0]);
        assert_eq!(
            transversal_line_through_point(&pt(&[0, 3, 3]), &x_axis(), &parallel).unwrap_err(),
            FlatsError::NotSkew
        );
    }

    #[test]
    fn line_meets_simplex_examples() {
        let h = segment(&[-1, 1, 0], &[1, 1, 0]);
        let s = Simplex::new(vec![0, 1]);
        let (p, x) = line_meets_simplex(&line(&[0, 0, 0], &[0, 1, 0]), &h, &s).unwrap().unwrap();
        assert_eq!(p, pt(&[0, 1, 0]));
        assert_eq!(x.weights, vec![q(1, 2), q(1, 2)]);

        let h = segment(&[0, 1, 0], &[1, 1, 0]);
        assert!(line_meets_simplex(&x_axis(), &h, &s).unwrap().is_none());

        let h = segment(&[0, 0, 1], &[1, 0, 1]);
        let (p, x) = line_meets_simplex(&line(&[0, 0, 0], &[0, 0, 1]), &h, &s).unwrap().unwrap();
        assert_eq!(p, pt(&[0, 0, 1]));
        assert_eq!(x.weights, vec![qi(1), qi(0)]);

        let along = line(&[5, 0, 1], &[2, 0, 0]);
        assert!(matches!(line_meets_simplex(&along, &h, &s), Err(FlatsError::LineInSpan(_))));
    }

    #[test]
    fn line_misses_beyond_segment_end() {
        let h = segment(&[1, 1, 0], &[2, 1, 0]);
        let s = Simplex::new(vec![0, 1]);
        assert!(line_meets_simplex(&line(&[0, 0, 0], &[0, 1, 0]), &h, &s).unwrap().is_none());
    }
}
