//! Exact rational scalars and the linear-algebra predicates every geometric
//! decision in this crate is built on. Nothing here touches floating point.

mod matrix;
mod rational;

pub use matrix::{det, rank, solve_affine, AffineSolution, Matrix};
pub use rational::{q, qi, Rational};

/// A point (or vector) of `R^m` with exact coordinates.
pub type Point = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cannot parse rational literal {0:?}")]
    Parse(String),
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Rational], s: &Rational) -> Point {
    a.iter().map(|x| x * s).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[Rational]) -> Rational {
    dot(a, a)
}

pub fn dist_sq(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| (x - y).square()).sum()
}

/// `Σ weights[i] · points[i]`.
pub fn combination(points: &[&[Rational]], weights: &[Rational]) -> Point {
    let dim = points.first().map_or(0, |p| p.len());
    let mut out = vec![Rational::zero(); dim];
    for (p, w) in points.iter().zip(weights) {
        if w.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(p.iter()) {
            *o += w * x;
        }
    }
    out
}

pub fn to_f64(p: &[Rational]) -> Vec<f64> {
    p.iter().map(Rational::to_f64).collect()
}

/// Rank of the vectors `v_i`, taken as rows.
pub fn vectors_rank(vectors: &[Point]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    match Matrix::from_rows(vectors) {
        Ok(m) => rank(&m),
        Err(_) => 0,
    }
}

/// True iff the differences `p_i - p_0` are linearly independent. Points must
/// share one ambient dimension; an empty list is not independent.
pub fn affinely_independent(points: &[&[Rational]]) -> bool {
    let Some((first, rest)) = points.split_first() else {
        return false;
    };
    if rest.iter().any(|p| p.len() != first.len()) {
        return false;
    }
    if rest.len() > first.len() {
        return false;
    }
    let diffs: Vec<Point> = rest.iter().map(|p| sub(p, first)).collect();
    vectors_rank(&diffs) == rest.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(raw: &[&[i64]]) -> Vec<Point> {
        raw.iter().map(|p| p.iter().map(|&x| qi(x)).collect()).collect()
    }

    fn refs(v: &[Point]) -> Vec<&[Rational]> {
        v.iter().map(|p| p.as_slice()).collect()
    }

    #[test]
    fn affine_independence_examples() {
        let simplex = pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(affinely_independent(&refs(&simplex)));
        let collinear = pts(&[&[0, 0], &[1, 1], &[2, 2]]);
        assert!(!affinely_independent(&refs(&collinear)));
        let square = pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 1], &[1, 0, 1]]);
        assert!(!affinely_independent(&refs(&square)));
    }

    #[test]
    fn too_many_points_are_dependent() {
        let p = pts(&[&[0], &[1], &[2]]);
        assert!(!affinely_independent(&refs(&p)));
        assert!(affinely_independent(&refs(&p[..1])));
    }

    #[test]
    fn combination_is_affine() {
        let p = pts(&[&[0, 0, 0], &[4, 0, 0], &[0, 4, 0]]);
        let w = [q(1, 2), q(1, 4), q(1, 4)];
        assert_eq!(combination(&refs(&p), &w), vec![qi(1), qi(1), qi(0)]);
    }
}
