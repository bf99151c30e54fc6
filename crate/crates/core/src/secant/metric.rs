use serde::Serialize;

use super::{SecantError, SecantRecord};
use crate::flats::CanonicalLine;

/// Endpoints of the chord cut from `l` by the closed ball of radius `k`.
fn chord(l: &CanonicalLine, k: f64) -> Result<(Vec<f64>, Vec<f64>), SecantError> {
    let base: Vec<f64> = l.base().iter().map(|x| x.to_f64()).collect();
    let dir: Vec<f64> = l.direction().iter().map(|x| x.to_f64()).collect();
    let dn = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    let b2: f64 = base.iter().map(|x| x * x).sum();
    let k2 = k * k;
    if b2 > k2 * (1.0 + 1e-12) {
        return Err(SecantError::LineMissesBall(k));
    }
    let half = (k2 - b2).max(0.0).sqrt() / dn;
    let end = |s: f64| base.iter().zip(&dir).map(|(b, d)| b + s * d).collect::<Vec<f64>>();
    Ok((end(-half), end(half)))
}

fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let ap: Vec<f64> = a.iter().zip(p).map(|(x, y)| y - x).collect();
    let len2: f64 = ab.iter().map(|x| x * x).sum();
    let t = if len2 > 0.0 { (ap.iter().zip(&ab).map(|(x, y)| x * y).sum::<f64>() / len2).clamp(0.0, 1.0) } else { 0.0 };
    ap.iter().zip(&ab).map(|(x, y)| (x - t * y).powi(2)).sum::<f64>().sqrt()
}

/// Hausdorff distance between the chords `l1 ∩ B(0, k)` and `l2 ∩ B(0, k)`.
///
/// Distance to a segment is convex, so its maximum over the other segment is
/// attained at an endpoint.
pub fn line_distance(l1: &CanonicalLine, l2: &CanonicalLine, k: f64) -> Result<f64, SecantError> {
    if k.is_nan() || k <= 0.0 {
        return Err(SecantError::NonPositiveK);
    }
    if l1 == l2 {
        chord(l1, k)?;
        return Ok(0.0);
    }
    let (a0, a1) = chord(l1, k)?;
    let (b0, b1) = chord(l2, k)?;
    let one_way = point_segment_distance(&a0, &b0, &b1).max(point_segment_distance(&a1, &b0, &b1));
    let other = point_segment_distance(&b0, &a0, &a1).max(point_segment_distance(&b1, &a0, &a1));
    Ok(one_way.max(other))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ball {
    pub center: CanonicalLine,
    pub radius: f64,
}

/// An order-0 cover of a finite set of lines by disjoint balls of diameter
/// below `epsilon`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverCertificate {
    pub balls: Vec<Ball>,
    pub epsilon: f64,
    pub k: f64,
    pub order: usize,
    /// `assignment[i]` is the ball containing the i-th line.
    pub assignment: Vec<usize>,
    pub min_pairwise_distance: Option<f64>,
    pub valid: bool,
}

impl CoverCertificate {
    /// Recomputes mesh, disjointness and assignment from the balls.
    pub fn validate(&self, lines: &[CanonicalLine]) -> Result<bool, SecantError> {
        if self.assignment.len() != lines.len() || self.balls.len() != lines.len() {
            return Ok(false);
        }
        for (line, &b) in lines.iter().zip(&self.assignment) {
            let Some(ball) = self.balls.get(b) else { return Ok(false) };
            if line_distance(line, &ball.center, self.k)? >= ball.radius {
                return Ok(false);
            }
        }
        let mesh_ok = self.balls.iter().all(|b| 2.0 * b.radius < self.epsilon);
        let mut disjoint = true;
        for (i, a) in self.balls.iter().enumerate() {
            for b in &self.balls[i + 1..] {
                disjoint &= line_distance(&a.center, &b.center, self.k)? > a.radius + b.radius;
            }
        }
        let positive = self.balls.iter().all(|b| b.radius > 0.0);
        Ok(mesh_ok && disjoint && positive)
    }
}

/// Disjoint balls of common radius `min(epsilon, min pairwise distance) / 3`
/// centred on each secant line.
pub fn zero_dim_certificate(records: &[SecantRecord], epsilon: f64, k: f64) -> Result<CoverCertificate, SecantError> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(SecantError::NonPositiveEpsilon);
    }
    let lines: Vec<CanonicalLine> = records.iter().map(|r| r.line.clone()).collect();
    let mut min_pairwise: Option<f64> = None;
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            if a == b {
                return Err(SecantError::DuplicateLine(a.clone()));
            }
            let d = line_distance(a, b, k)?;
            min_pairwise = Some(min_pairwise.map_or(d, |m| m.min(d)));
        }
        line_distance(a, a, k)?;
    }
    let radius = min_pairwise.map_or(epsilon, |d| d.min(epsilon)) / 3.0;
    let balls: Vec<Ball> = lines.iter().map(|l| Ball { center: l.clone(), radius }).collect();
    let mut cert = CoverCertificate {
        assignment: (0..balls.len()).collect(),
        balls,
        epsilon,
        k,
        order: 0,
        min_pairwise_distance: min_pairwise,
        valid: false,
    };
    cert.valid = cert.validate(&lines)?;
    Ok(cert)
}
