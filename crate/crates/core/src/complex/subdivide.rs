use std::collections::{BTreeMap, BTreeSet};

use super::{BarycentricPoint, ComplexError, Marks, PLMap, Simplex, SimplicialComplex, VertexId};
use crate::exact::{Point, Rational};

/// Default round limit for [`subdivide_until`].
pub const DEFAULT_SUBDIVISION_CAP: usize = 30;

/// One barycentric subdivision together with the barycenter vertex assigned to
/// each simplex of the original complex.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub map: PLMap,
    pub barycenter: BTreeMap<Simplex, VertexId>,
}

impl Subdivision {
    /// Re-expresses a point of the original complex on the subdivided one.
    ///
    /// With weights sorted decreasingly `w_1 >= ... >= w_k`, the point equals
    /// `Σ_j j (w_j - w_{j+1}) · barycenter(v_1..v_j)`, which lies on the chain
    /// simplex `{v_1} ⊂ {v_1,v_2} ⊂ ...`.
    pub fn refine_point(&self, x: &BarycentricPoint) -> BarycentricPoint {
        let x = x.normalized();
        let mut order: Vec<(VertexId, Rational)> =
            x.simplex.vertices().iter().copied().zip(x.weights.iter().cloned()).collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut pairs = Vec::with_capacity(order.len());
        for j in 0..order.len() {
            let next = order.get(j + 1).map_or_else(Rational::zero, |p| p.1.clone());
            let w = Rational::from((j + 1) as i64) * (&order[j].1 - &next);
            let face = Simplex::new(order[..=j].iter().map(|p| p.0).collect());
            pairs.push((self.barycenter[&face], w));
        }
        BarycentricPoint::from_pairs(pairs).expect("refined weights form a convex combination")
    }
}

fn permutations(items: &[VertexId]) -> Vec<Vec<VertexId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Barycentric subdivision of the domain; the map is unchanged pointwise.
pub fn barycentric_subdivision(h: &PLMap) -> Subdivision {
    let complex = h.complex();
    let mut next_id = complex.vertices().iter().next_back().map_or(0, |v| v + 1);
    let mut barycenter = BTreeMap::new();
    let mut images: BTreeMap<VertexId, Point> = BTreeMap::new();
    for s in complex.simplices() {
        let id = if s.len() == 1 {
            s.vertices()[0]
        } else {
            let id = next_id;
            next_id += 1;
            id
        };
        let pts = h.simplex_images(s);
        let n = Rational::from(s.len() as i64);
        let centre: Point = (0..h.ambient())
            .map(|k| pts.iter().map(|p| &p[k]).sum::<Rational>() / &n)
            .collect();
        barycenter.insert(s.clone(), id);
        images.insert(id, centre);
    }

    let mut flags = Vec::new();
    for top in complex.maximal_simplices() {
        for perm in permutations(top.vertices()) {
            let chain: Vec<VertexId> =
                (1..=perm.len()).map(|j| barycenter[&Simplex::new(perm[..j].to_vec())]).collect();
            flags.push(chain);
        }
    }

    let marks = complex.marks();
    let mut new_marks = Marks::default();
    for (s, &id) in &barycenter {
        if marks.simplex_in(super::Side::B1, s) {
            new_marks.b1.insert(id);
        }
        if marks.simplex_in(super::Side::B2, s) {
            new_marks.b2.insert(id);
        }
    }

    let vertices: BTreeSet<VertexId> = barycenter.values().copied().collect();
    let sub = SimplicialComplex::from_maximal(vertices, flags)
        .and_then(|c| c.with_marks(new_marks))
        .expect("subdivision of a valid complex is valid");
    let map = PLMap::new(sub, h.ambient(), images).expect("every barycenter has an image");
    Subdivision { map, barycenter }
}

pub fn barycentric_subdivide(h: &PLMap) -> PLMap {
    barycentric_subdivision(h).map
}

/// Subdivides until every simplex image has diameter strictly below `delta / 2`,
/// using at most [`DEFAULT_SUBDIVISION_CAP`] rounds.
pub fn subdivide_until(h: &PLMap, delta: &Rational) -> Result<PLMap, ComplexError> {
    subdivide_until_with_cap(h, delta, DEFAULT_SUBDIVISION_CAP).map(|(m, _)| m)
}

/// As [`subdivide_until`], with an explicit round cap. Returns the map and the
/// number of rounds performed.
pub fn subdivide_until_with_cap(
    h: &PLMap,
    delta: &Rational,
    cap: usize,
) -> Result<(PLMap, usize), ComplexError> {
    if !delta.is_positive() {
        return Err(ComplexError::NonPositiveDelta);
    }
    let target_sq = (delta / Rational::from(2)).square();
    let mut current = h.clone();
    let mut rounds = 0;
    loop {
        let achieved_sq = current.max_image_diameter_sq();
        if achieved_sq < target_sq {
            return Ok((current, rounds));
        }
        if rounds == cap {
            return Err(ComplexError::IterationCap { rounds, achieved_sq, target_sq });
        }
        current = barycentric_subdivide(&current);
        rounds += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    fn pt(raw: &[i64]) -> Point {
        raw.iter().map(|&x| qi(x)).collect()
    }

    fn edge(len: i64) -> PLMap {
        let c = SimplicialComplex::from_maximal([0, 1], [vec![0, 1]]).unwrap();
        PLMap::new(c, 3, BTreeMap::from([(0, pt(&[0, 0, 0])), (1, pt(&[len, 0, 0]))])).unwrap()
    }

    fn triangle() -> PLMap {
        let c = SimplicialComplex::from_maximal([0, 1, 2], [vec![0, 1, 2]]).unwrap();
        PLMap::new(c, 2, BTreeMap::from([(0, pt(&[0, 0])), (1, pt(&[6, 0])), (2, pt(&[0, 6]))])).unwrap()
    }

    #[test]
    fn subdividing_an_edge() {
        let s = barycentric_subdivide(&edge(1));
        assert_eq!(s.complex().maximal_simplices().len(), 2);
        assert_eq!(s.complex().vertices().len(), 3);
        assert_eq!(s.image(2), &vec![q(1, 2), qi(0), qi(0)]);
    }

    #[test]
    fn subdividing_a_triangle() {
        let s = barycentric_subdivide(&triangle());
        assert_eq!(s.complex().maximal_simplices().len(), 6);
        assert_eq!(s.complex().vertices().len(), 7);
        assert!(s.complex().validate().is_ok());
    }

    #[test]
    fn top_simplex_count_is_factorial() {
        for n in 0..4u64 {
            let verts: Vec<u64> = (0..=n).collect();
            let c = SimplicialComplex::from_maximal(verts.clone(), [verts.clone()]).unwrap();
            let h = PLMap::constant(c, 1).unwrap();
            let expected: usize = (1..=(n as usize + 1)).product();
            assert_eq!(barycentric_subdivide(&h).complex().maximal_simplices().len(), expected);
        }
    }

    #[test]
    fn subdivide_until_examples() {
        let (_, rounds) = subdivide_until_with_cap(&edge(1), &qi(3), 30).unwrap();
        assert_eq!(rounds, 0);
        // pieces of 1/2 are not strictly below 1/2; two rounds reach 1/4
        let (m, rounds) = subdivide_until_with_cap(&edge(1), &qi(1), 30).unwrap();
        assert_eq!(rounds, 2);
        assert_eq!(m.max_image_diameter_sq(), q(1, 16));
        assert_eq!(subdivide_until(&edge(1), &qi(0)).unwrap_err(), ComplexError::NonPositiveDelta);
    }

    #[test]
    fn subdivide_until_reports_cap() {
        let err = subdivide_until_with_cap(&edge(1), &q(1, 1000), 3).unwrap_err();
        match err {
            ComplexError::IterationCap { rounds, achieved_sq, .. } => {
                assert_eq!(rounds, 3);
                assert_eq!(achieved_sq, q(1, 64));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn marks_propagate_to_barycenters() {
        let c = SimplicialComplex::from_maximal([0, 1, 2, 3], [vec![0, 1], vec![1, 2], vec![2, 3]])
            .unwrap()
            .with_marks(Marks::new([0, 1], [3]))
            .unwrap();
        let h = PLMap::constant(c, 3).unwrap();
        let sub = barycentric_subdivision(&h);
        let marks = sub.map.complex().marks();
        assert!(marks.b1.contains(&sub.barycenter[&Simplex::new(vec![0, 1])]));
        assert!(!marks.b1.contains(&sub.barycenter[&Simplex::new(vec![1, 2])]));
        assert_eq!(marks.b2.len(), 1);
    }

    #[test]
    fn refine_point_preserves_the_image() {
        let h = triangle();
        let sub = barycentric_subdivision(&h);
        let x = BarycentricPoint::from_pairs([(0, q(1, 2)), (1, q(1, 3)), (2, q(1, 6))]).unwrap();
        let y = sub.refine_point(&x);
        assert_eq!(sub.map.evaluate(&y).unwrap(), h.evaluate(&x).unwrap());
    }
}
