mod common;

use common::{fv, rand_point, transversal_oracle};
use gpembed_core::exact::{self, Rational};
use gpembed_core::flats::{self, contains_point, flats_skew, span_of_points, transversal_line_through_point};
use gpembed_core::Point;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_point(m: usize) -> impl Strategy<Value = Point> {
    proptest::collection::vec(-2i64..=2, m).prop_map(|v| v.into_iter().map(Rational::from).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn skew_iff_union_independent(a in proptest::collection::vec(small_point(3), 2), b in proptest::collection::vec(small_point(3), 2)) {
        let ra: Vec<&[Rational]> = a.iter().map(|p| p.as_slice()).collect();
        let rb: Vec<&[Rational]> = b.iter().map(|p| p.as_slice()).collect();
        prop_assume!(exact::affinely_independent(&ra) && exact::affinely_independent(&rb));
        let union: Vec<&[Rational]> = ra.iter().chain(&rb).copied().collect();
        let f1 = span_of_points(&ra).unwrap();
        let f2 = span_of_points(&rb).unwrap();
        prop_assert_eq!(flats_skew(&f1, &f2).unwrap(), exact::affinely_independent(&union));
    }

    #[test]
    fn transversals_verify(
        a in proptest::collection::vec(small_point(3), 2),
        b in proptest::collection::vec(small_point(3), 2),
        z in small_point(3),
    ) {
        let ra: Vec<&[Rational]> = a.iter().map(|p| p.as_slice()).collect();
        let rb: Vec<&[Rational]> = b.iter().map(|p| p.as_slice()).collect();
        let union: Vec<&[Rational]> = ra.iter().chain(&rb).copied().collect();
        prop_assume!(exact::affinely_independent(&union));
        let f1 = span_of_points(&ra).unwrap();
        let f2 = span_of_points(&rb).unwrap();
        if let Some(t) = transversal_line_through_point(&z, &f1, &f2).unwrap() {
            prop_assert!(contains_point(&t.line, &z).unwrap());
            for (p, f) in t.meets.iter().zip([&f1, &f2]) {
                prop_assert!(contains_point(&t.line, p).unwrap());
                prop_assert!(contains_point(f, p).unwrap());
            }
        }
    }
}

/// The float branch-and-bound oracle flags a line through `z` meeting both
/// segments exactly when the exact computation finds one, and its lines
/// converge to the exact one.
#[test]
fn oracle_agrees_with_exact_transversals() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut hits = 0;
    for _ in 0..300 {
        let pts: Vec<Point> = (0..4).map(|_| rand_point(&mut rng, 3, 8, 4)).collect();
        let z = rand_point(&mut rng, 3, 12, 4);
        let refs: Vec<&[Rational]> = pts.iter().map(|p| p.as_slice()).collect();
        if !exact::affinely_independent(&refs) {
            continue;
        }
        let h = common::map_from(vec![vec![0, 1], vec![2, 3]], pts.clone());
        if flats::image_distance_sq(&z, &h).unwrap().is_zero() {
            continue;
        }
        let f1 = span_of_points(&refs[..2]).unwrap();
        let f2 = span_of_points(&refs[2..]).unwrap();
        if contains_point(&f1, &z).unwrap() || contains_point(&f2, &z).unwrap() {
            continue;
        }
        let exact_dir = transversal_line_through_point(&z, &f1, &f2).unwrap().and_then(|t| {
            let s1 = gpembed_core::Simplex::new(vec![0, 1]);
            let s2 = gpembed_core::Simplex::new(vec![2, 3]);
            let on1 = flats::line_meets_simplex(&t.line, &h, &s1).unwrap();
            let on2 = flats::line_meets_simplex(&t.line, &h, &s2).unwrap();
            (on1.is_some() && on2.is_some()).then(|| fv(&t.line.directions()[0]))
        });
        let zf = fv(&z);
        let s1: Vec<Vec<f64>> = pts[..2].iter().map(|p| fv(p)).collect();
        let s2: Vec<Vec<f64>> = pts[2..].iter().map(|p| fv(p)).collect();
        let found = transversal_oracle(&zf, &s1, &s2, 1e-9, 1e-9);
        match exact_dir {
            Some(d) => {
                hits += 1;
                assert!(!found.is_empty(), "oracle missed an exact transversal");
                let n = common::norm(&d);
                for u in &found {
                    let cos = common::dot(u, &d).abs() / n;
                    assert!(cos > 1.0 - 1e-9, "oracle line far from the exact one");
                }
            }
            None => assert!(found.is_empty(), "oracle found a transversal the exact test rejects"),
        }
    }
    assert!(hits > 10, "too few transversals exercised: {hits}");
}
