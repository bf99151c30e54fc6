use super::FlatsError;
use crate::complex::PLMap;
use crate::exact::{self, solve_affine, Matrix, Rational};

/// Squared distance from `z` to the affine hull of independent `pts`, if the
/// foot of the perpendicular lies in their closed convex hull.
fn feasible_projection_sq(z: &[Rational], pts: &[&[Rational]]) -> Option<Rational> {
    let (p0, rest) = pts.split_first()?;
    if rest.is_empty() {
        return Some(exact::dist_sq(z, p0));
    }
    let edges: Vec<_> = rest.iter().map(|p| exact::sub(p, p0)).collect();
    let w = exact::sub(z, p0);
    let k = edges.len();
    let mut gram = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram.set(i, j, exact::dot(&edges[i], &edges[j]));
        }
    }
    let rhs: Vec<Rational> = edges.iter().map(|e| exact::dot(e, &w)).collect();
    let c = solve_affine(&gram, &rhs).ok()??.particular;
    let total: Rational = c.iter().sum();
    if c.iter().any(Rational::is_negative) || total > 1 {
        return None;
    }
    let mut foot = p0.to_vec();
    for (ci, e) in c.iter().zip(&edges) {
        for (f, ei) in foot.iter_mut().zip(e) {
            *f += ci * ei;
        }
    }
    Some(exact::dist_sq(z, &foot))
}

/// Exact squared distance from `z` to the convex hull of `pts`.
///
/// Every face with affinely independent points is projected onto; the minimum
/// over faces whose foot is feasible is the distance.
pub fn simplex_distance_sq(z: &[Rational], pts: &[&[Rational]]) -> Rational {
    assert!(!pts.is_empty() && pts.len() < 64, "simplex needs between 1 and 63 points");
    (1u64..(1 << pts.len()))
        .filter_map(|mask| {
            let face: Vec<&[Rational]> =
                pts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| *p).collect();
            if !exact::affinely_independent(&face) {
                return None;
            }
            feasible_projection_sq(z, &face)
        })
        .min()
        .expect("vertices are always feasible")
}

/// Exact squared distance from `z` to the image polyhedron of `h`.
pub fn image_distance_sq(z: &[Rational], h: &PLMap) -> Result<Rational, FlatsError> {
    if z.len() != h.ambient() {
        return Err(FlatsError::AmbientMismatch { expected: h.ambient(), found: z.len() });
    }
    h.complex()
        .maximal_simplices()
        .iter()
        .map(|s| simplex_distance_sq(z, &h.simplex_images(s)))
        .min()
        .ok_or(FlatsError::NoPoints)
}
