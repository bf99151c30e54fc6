//! Fixed inputs shared by the benchmarks.

use std::collections::BTreeMap;

use gpembed_core::exact::{q, Matrix, Rational};
use gpembed_core::{PLMap, Point, SimplicialComplex};

/// Integer matrix with a deterministic, well-spread pattern.
pub fn matrix(n: usize) -> Matrix {
    let rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| Rational::from(((i * 7 + j * 13 + i * j) % 19) as i64 - 9)).collect())
        .collect();
    Matrix::from_rows(&rows).expect("rows have equal length")
}

/// Closed polygon in R^3 with `n` vertices on a bent circle.
pub fn polygon(n: usize) -> PLMap {
    let images: BTreeMap<u64, Point> = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64 * std::f64::consts::TAU;
            let c = |x: f64| q((x * 64.0).round() as i64, 64);
            (i as u64, vec![c(t.cos()), c(t.sin()), c((2.0 * t).sin() / 2.0)])
        })
        .collect();
    let edges = (0..n as u64).map(|i| vec![i, (i + 1) % n as u64]).collect::<Vec<_>>();
    let complex = SimplicialComplex::from_maximal(0..n as u64, edges).expect("a cycle is a valid complex");
    PLMap::new(complex, 3, images).expect("every vertex has an image")
}
