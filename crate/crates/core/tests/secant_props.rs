mod common;

use common::{chord, chord_hausdorff, fv, map_from, rand_point, sampled_hausdorff};
use gpembed_core::exact::{q, qi, Rational};
use gpembed_core::flats::CanonicalLine;
use gpembed_core::perturb::perturb_to_general_position;
use gpembed_core::secant::{
    line_distance, probe_region_samples, secant_set, secant_set_unfiltered, secants_for_pair, zero_dim_certificate,
};
use gpembed_core::{PLMap, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_polygon(rng: &mut ChaCha8Rng, n: usize) -> PLMap {
    let images: Vec<Point> = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64 * std::f64::consts::TAU;
            vec![
                Rational::from((t.cos() * 8.0).round() as i64) / Rational::from(8) + q(rng.gen_range(-2..=2), 16),
                Rational::from((t.sin() * 8.0).round() as i64) / Rational::from(8) + q(rng.gen_range(-2..=2), 16),
                q(rng.gen_range(-8..=8), 16),
            ]
        })
        .collect();
    let edges = (0..n as u64).map(|i| vec![i, (i + 1) % n as u64]).collect();
    map_from(edges, images)
}

#[test]
fn records_validate_and_prefilter_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut total = 0;
    for trial in 0..12 {
        let n = rng.gen_range(4..=7);
        let h0 = random_polygon(&mut rng, n);
        let h = match perturb_to_general_position(&h0, &qi(4), trial) {
            Ok((h, _)) => h,
            Err(e) => panic!("{e}"),
        };
        let disjoint_pairs = n * (n - 3) / 2;
        for p in probe_region_samples(&h, &qi(3), 15, trial).unwrap() {
            let records = secant_set(&h, p.z(), None).unwrap();
            assert!(records.len() <= disjoint_pairs);
            assert_eq!(records, secant_set_unfiltered(&h, p.z()).unwrap());
            for r in &records {
                r.validate(h.map(), p.z()).unwrap();
                assert!(secants_for_pair(&h, p.z(), &r.pair.0, &r.pair.1).unwrap().len() <= 1);
            }
            for eps in [1.0, 0.1, 0.01] {
                assert!(zero_dim_certificate(&records, eps, 3.0).unwrap().valid);
            }
            total += records.len();
        }
    }
    assert!(total > 0);
}

fn random_line(rng: &mut ChaCha8Rng) -> CanonicalLine {
    loop {
        let p = rand_point(rng, 3, 40, 8);
        let d = rand_point(rng, 3, 5, 1);
        if d.iter().any(|x| !x.is_zero()) {
            return CanonicalLine::new(&p, &d);
        }
    }
}

#[test]
fn line_metric_axioms_and_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let k = 10.0;
    for _ in 0..200 {
        let (a, b, c) = (random_line(&mut rng), random_line(&mut rng), random_line(&mut rng));
        let ab = line_distance(&a, &b, k).unwrap();
        assert_eq!(ab, line_distance(&b, &a, k).unwrap());
        let bc = line_distance(&b, &c, k).unwrap();
        let ac = line_distance(&a, &c, k).unwrap();
        assert!(ac <= ab + bc + 1e-9);
        let ca = chord(&fv(a.base()), &fv(a.direction()), k);
        let cb = chord(&fv(b.base()), &fv(b.direction()), k);
        assert!((chord_hausdorff(&ca, &cb) - ab).abs() < 1e-9);
    }
    for _ in 0..10 {
        let (a, b) = (random_line(&mut rng), random_line(&mut rng));
        let ca = chord(&fv(a.base()), &fv(a.direction()), k);
        let cb = chord(&fv(b.base()), &fv(b.direction()), k);
        let d = line_distance(&a, &b, k).unwrap();
        assert!((sampled_hausdorff(&ca, &cb, 2000) - d).abs() < 0.02);
    }
}
