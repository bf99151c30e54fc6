use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    check_probe_point, line_distance, secant_set, secant_set_with_stats, zero_dim_certificate, CoverCertificate,
    SecantCounts, SecantError, SecantRecord,
};
use crate::complex::{Marks, PLMap};
use crate::exact::{self, Point, Rational};
use crate::flats;
use crate::perturb::{random_point_in_ball, GeneralPositionMap};

/// Draws allowed per requested probe point.
pub const REJECTION_FACTOR: usize = 1000;

/// A point `z` with `|z| <= k` and squared distance at least `1/k^2` from the image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbePoint {
    z: Point,
    k: Rational,
}

impl ProbePoint {
    /// Checks both region constraints exactly.
    pub fn new(h: &PLMap, z: Point, k: Rational) -> Result<Self, SecantError> {
        if !k.is_positive() {
            return Err(SecantError::NonPositiveK);
        }
        if z.len() != h.ambient() {
            return Err(SecantError::AmbientMismatch { expected: h.ambient(), found: z.len() });
        }
        if exact::norm_sq(&z) > k.square() {
            return Err(SecantError::OutsideRegion(format!("|z| exceeds k = {k}")));
        }
        if flats::image_distance_sq(&z, h)? < k.square().recip() {
            return Err(SecantError::OutsideRegion(format!("z is closer than 1/{k} to the image")));
        }
        Ok(ProbePoint { z, k })
    }

    pub fn z(&self) -> &Point {
        &self.z
    }

    pub fn k(&self) -> &Rational {
        &self.k
    }
}

/// `count` seeded points of the probe region, drawn uniformly from the ball of
/// radius `k` by rejection. Points where the secant set is not finite are
/// rejected as well.
pub fn probe_region_samples(
    h: &GeneralPositionMap,
    k: &Rational,
    count: usize,
    seed: u64,
) -> Result<Vec<ProbePoint>, SecantError> {
    if !k.is_positive() {
        return Err(SecantError::NonPositiveK);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origin = vec![Rational::zero(); h.map().ambient()];
    let budget = REJECTION_FACTOR * count.max(1);
    let mut out = Vec::with_capacity(count);
    let mut draws = 0;
    while out.len() < count {
        if draws == budget {
            return Err(SecantError::RegionTooThin { requested: count, accepted: out.len(), draws });
        }
        draws += 1;
        let z = random_point_in_ball(&mut rng, &origin, k);
        let Ok(p) = ProbePoint::new(h.map(), z, k.clone()) else { continue };
        if check_probe_point(h, &p.z).is_ok() {
            out.push(p);
        }
    }
    Ok(out)
}

/// Full exact analysis at one probe point.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub z: Point,
    pub k: Rational,
    pub secants: Vec<SecantRecord>,
    pub certificates: Vec<CoverCertificate>,
    pub counts: SecantCounts,
}

impl AnalysisReport {
    pub fn all_valid(&self) -> bool {
        self.certificates.iter().all(|c| c.valid)
    }

    pub fn min_pairwise_distance(&self) -> Option<f64> {
        self.certificates.first().and_then(|c| c.min_pairwise_distance)
    }
}

/// Secant set at `probe`, each record validated, with one certificate per epsilon.
pub fn analyze(
    h: &GeneralPositionMap,
    probe: &ProbePoint,
    marks: Option<&Marks>,
    epsilons: &[f64],
) -> Result<AnalysisReport, SecantError> {
    let (secants, counts) = secant_set_with_stats(h, probe.z(), marks)?;
    for r in &secants {
        r.validate(h.map(), probe.z())?;
    }
    let k = probe.k().to_f64();
    let certificates =
        epsilons.iter().map(|&e| zero_dim_certificate(&secants, e, k)).collect::<Result<Vec<_>, _>>()?;
    Ok(AnalysisReport { z: probe.z().clone(), k: probe.k().clone(), secants, certificates, counts })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct UscReport {
    pub trials: usize,
    /// Trials whose perturbed instance left general position or put `z` on the
    /// image or in its exceptional set.
    pub skipped: usize,
    pub original_lines: usize,
    /// Largest distance from a perturbed secant line to the nearest original one.
    pub max_drift: f64,
    /// Perturbed secant lines observed while the original set was empty.
    pub emergent_lines: usize,
}

/// Perturbs vertex images and `z` by at most `scale` and measures how far the
/// perturbed secant lines move. A numerical probe, not a proof.
pub fn usc_probe(
    h: &GeneralPositionMap,
    probe: &ProbePoint,
    scale: &Rational,
    trials: usize,
    seed: u64,
) -> Result<UscReport, SecantError> {
    let original = secant_set(h, probe.z(), None)?;
    let k = probe.k().to_f64() + scale.to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = UscReport { trials, original_lines: original.len(), ..UscReport::default() };
    for _ in 0..trials {
        let (map, z) = if scale.is_zero() {
            (h.map().clone(), probe.z().clone())
        } else {
            let images = h.map().images().iter().map(|(v, p)| (*v, random_point_in_ball(&mut rng, p, scale))).collect();
            (h.map().with_images(images)?, random_point_in_ball(&mut rng, probe.z(), scale))
        };
        let Ok(moved) = GeneralPositionMap::certify(map) else {
            report.skipped += 1;
            continue;
        };
        let Ok(lines) = secant_set(&moved, &z, None) else {
            report.skipped += 1;
            continue;
        };
        for r in &lines {
            if original.is_empty() {
                report.emergent_lines += 1;
                continue;
            }
            let mut nearest = f64::INFINITY;
            for o in &original {
                nearest = nearest.min(line_distance(&r.line, &o.line, k)?);
            }
            report.max_drift = report.max_drift.max(nearest);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex;
    use crate::exact::{q, qi};

    fn pt(raw: &[i64]) -> Point {
        raw.iter().map(|&x| qi(x)).collect()
    }

    fn certified(maximal: Vec<Vec<u64>>, images: &[&[i64]]) -> GeneralPositionMap {
        let verts: Vec<u64> = (0..images.len() as u64).collect();
        let c = SimplicialComplex::from_maximal(verts, maximal).unwrap();
        let m = images[0].len();
        let images = images.iter().enumerate().map(|(i, p)| (i as u64, pt(p))).collect();
        GeneralPositionMap::certify(PLMap::new(c, m, images).unwrap()).unwrap()
    }

    #[test]
    fn point_image_region() {
        let h = certified(vec![vec![0]], &[&[0, 0, 0]]);
        let pts = probe_region_samples(&h, &qi(2), 50, 1).unwrap();
        assert_eq!(pts.len(), 50);
        for p in &pts {
            let n = exact::norm_sq(p.z());
            assert!(n >= q(1, 4) && n <= qi(4));
        }
    }

    #[test]
    fn thin_region_errors() {
        let h = certified(vec![vec![0]], &[&[0, 0, 0]]);
        // |z| <= 1/2 and |z| >= 2 cannot both hold
        assert!(matches!(
            probe_region_samples(&h, &q(1, 2), 3, 1),
            Err(SecantError::RegionTooThin { requested: 3, accepted: 0, draws: 3000 })
        ));
    }

    #[test]
    fn samples_are_deterministic() {
        let h = certified(vec![vec![0, 1]], &[&[0, 0, 0], &[1, 0, 0]]);
        let a = probe_region_samples(&h, &qi(3), 100, 42).unwrap();
        assert_eq!(a, probe_region_samples(&h, &qi(3), 100, 42).unwrap());
        assert_ne!(a, probe_region_samples(&h, &qi(3), 100, 43).unwrap());
    }

    #[test]
    fn probe_point_rejects_violations() {
        let h = certified(vec![vec![0]], &[&[0, 0, 0]]);
        assert!(ProbePoint::new(h.map(), pt(&[3, 0, 0]), qi(2)).is_err());
        assert!(ProbePoint::new(h.map(), vec![q(1, 4), qi(0), qi(0)], qi(2)).is_err());
        assert!(ProbePoint::new(h.map(), pt(&[1, 1, 0]), qi(2)).is_ok());
    }

    fn quadrilateral() -> GeneralPositionMap {
        certified(
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
            &[&[0, 0, 0], &[2, 0, 1], &[2, 2, 0], &[0, 2, 1]],
        )
    }

    #[test]
    fn usc_zero_scale_has_no_drift() {
        let h = quadrilateral();
        let p = ProbePoint::new(h.map(), pt(&[1, 1, 2]), qi(3)).unwrap();
        let r = usc_probe(&h, &p, &qi(0), 3, 5).unwrap();
        assert_eq!(r.max_drift, 0.0);
        assert_eq!(r.skipped, 0);
    }

    #[test]
    fn usc_small_scale_drift_is_small() {
        let h = quadrilateral();
        // on the line through the midpoints of the opposite edges 01 and 23
        let p = ProbePoint::new(h.map(), vec![qi(1), qi(3), q(1, 2)], qi(4)).unwrap();
        let r = usc_probe(&h, &p, &q(1, 1_000_000), 10, 5).unwrap();
        assert!(r.original_lines > 0);
        assert!(r.max_drift < 1e-3, "{r:?}");
    }

    #[test]
    fn analysis_certifies_each_epsilon() {
        let h = quadrilateral();
        let p = ProbePoint::new(h.map(), pt(&[1, 1, 2]), qi(3)).unwrap();
        let report = analyze(&h, &p, None, &[1.0, 0.1, 0.01]).unwrap();
        assert_eq!(report.certificates.len(), 3);
        assert!(report.all_valid());
        assert_eq!(report.counts.candidate_pairs, 2);
    }
}
