mod common;

use std::collections::BTreeSet;

use common::map_from;
use gpembed_core::complex::{closeness_bound, subdivide_until};
use gpembed_core::exact::{self, q, solve_affine, Matrix, Rational};
use gpembed_core::flats::{flats_skew, span_of_points};
use gpembed_core::perturb::{general_position_certificate, perturb_to_general_position};
use gpembed_core::{BarycentricPoint, PLMap, Point, Simplex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Whether the hulls of `a` and `b` meet, by solving for a common convex
/// combination directly.
fn hulls_meet(a: &[&[Rational]], b: &[&[Rational]]) -> bool {
    let m = a[0].len();
    let cols = a.len() + b.len();
    let mut mat = Matrix::zeros(m + 2, cols);
    for (j, p) in a.iter().enumerate() {
        for i in 0..m {
            mat.set(i, j, p[i].clone());
        }
        mat.set(m, j, Rational::one());
    }
    for (j, p) in b.iter().enumerate() {
        for i in 0..m {
            mat.set(i, a.len() + j, -&p[i]);
        }
        mat.set(m + 1, a.len() + j, Rational::one());
    }
    let mut rhs = vec![Rational::zero(); m];
    rhs.push(Rational::one());
    rhs.push(Rational::one());
    match solve_affine(&mat, &rhs).unwrap() {
        None => false,
        Some(sol) => {
            assert!(sol.is_unique(), "independent union gives a unique solution");
            sol.particular.iter().all(|x| !x.is_negative())
        }
    }
}

fn random_point_on(rng: &mut ChaCha8Rng, s: &Simplex) -> BarycentricPoint {
    let raw: Vec<i64> = s.vertices().iter().map(|_| rng.gen_range(0..=20)).collect();
    let total: i64 = raw.iter().sum::<i64>().max(1);
    let mut pairs: Vec<(u64, Rational)> = s.vertices().iter().zip(&raw).map(|(&v, &w)| (v, q(w, total))).collect();
    if raw.iter().all(|&w| w == 0) {
        pairs[0].1 = Rational::one();
    }
    BarycentricPoint::from_pairs(pairs).unwrap()
}

/// Lattice-valued triangle strip in R^5, degenerate before perturbation.
fn lattice_strip(rng: &mut ChaCha8Rng) -> PLMap {
    let images: Vec<Point> = (0..5).map(|_| (0..5).map(|_| q(rng.gen_range(0..=2), 100)).collect()).collect();
    map_from(vec![vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4]], images)
}

#[test]
fn certificate_soundness_on_perturbed_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..20 {
        let h0 = lattice_strip(&mut rng);
        let (h, report) = perturb_to_general_position(&h0, &q(1, 10), seed).unwrap();
        assert!(general_position_certificate(h.map()).unwrap().overall);
        assert!(report.max_displacement < q(1, 20));
        let map = h.map();
        let all: Vec<&Simplex> = map.complex().simplices().iter().collect();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                if a.is_disjoint(b) {
                    assert!(!hulls_meet(&map.simplex_images(a), &map.simplex_images(b)));
                }
            }
        }
        let top = map.complex().maximal_simplices();
        for (i, a) in top.iter().enumerate() {
            for b in &top[i + 1..] {
                if a.is_disjoint(b) {
                    let f1 = span_of_points(&map.simplex_images(a)).unwrap();
                    let f2 = span_of_points(&map.simplex_images(b)).unwrap();
                    assert!(flats_skew(&f1, &f2).unwrap());
                }
            }
        }
        for _ in 0..1000 {
            let (i, j) = (rng.gen_range(0..top.len()), rng.gen_range(0..top.len()));
            let x = random_point_on(&mut rng, &top[i]);
            let y = random_point_on(&mut rng, &top[j]);
            if !x.same_point(&y) {
                assert_ne!(map.evaluate(&x).unwrap(), map.evaluate(&y).unwrap());
            }
        }
    }
}

#[test]
fn determinism_bit_for_bit() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h0 = lattice_strip(&mut rng);
    let a = perturb_to_general_position(&h0, &q(1, 10), 77).unwrap();
    let b = perturb_to_general_position(&h0, &q(1, 10), 77).unwrap();
    assert_eq!(a.0.map(), b.0.map());
    assert_eq!(a.1.to_json(true).to_string(), b.1.to_json(true).to_string());
}

#[test]
fn two_step_closeness_below_delta() {
    let h0 = map_from(
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        vec![
            vec![q(0, 1), q(0, 1), q(0, 1)],
            vec![q(1, 1), q(0, 1), q(0, 1)],
            vec![q(1, 1), q(1, 1), q(0, 1)],
            vec![q(0, 1), q(1, 1), q(0, 1)],
        ],
    );
    let delta = q(1, 2);
    let sub = subdivide_until(&h0, &delta).unwrap();
    let (h, _) = perturb_to_general_position(&sub, &delta, 3).unwrap();
    assert!(closeness_bound(&sub, h.map()).unwrap() < delta);
    let moved: BTreeSet<u64> =
        sub.images().iter().filter(|(v, p)| h.map().image(**v) != *p).map(|(v, _)| *v).collect();
    assert!(!moved.is_empty());
    assert!(exact::dist_sq(sub.image(0), h.map().image(0)) < q(1, 16));
}
