//! Independent oracles and random instance generators shared by the
//! integration and acceptance tests. Oracles avoid the library's algorithms:
//! cofactor expansion for determinants, float branch-and-bound for secants,
//! dense sampling for Hausdorff distances.
#![allow(dead_code)]

use std::collections::BTreeMap;

use gpembed_core::exact::{q, Rational};
use gpembed_core::{PLMap, Point, SimplicialComplex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rat(rng: &mut ChaCha8Rng, span: i64, denom: i64) -> Rational {
    q(rng.gen_range(-span..=span), denom)
}

pub fn rand_point(rng: &mut ChaCha8Rng, m: usize, span: i64, denom: i64) -> Point {
    (0..m).map(|_| rat(rng, span, denom)).collect()
}

pub fn cofactor_det(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    if n == 0 {
        return Rational::one();
    }
    if n == 1 {
        return a[0][0].clone();
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<Rational>> =
                a[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect()).collect();
            let term = &a[0][j] * &cofactor_det(&minor);
            if j % 2 == 0 { term } else { -term }
        })
        .sum()
}

pub fn map_from(maximal: Vec<Vec<u64>>, images: Vec<Point>) -> PLMap {
    let verts: Vec<u64> = (0..images.len() as u64).collect();
    let c = SimplicialComplex::from_maximal(verts, maximal).unwrap();
    let m = images[0].len();
    let images: BTreeMap<u64, Point> = images.into_iter().enumerate().map(|(i, p)| (i as u64, p)).collect();
    PLMap::new(c, m, images).unwrap()
}

// ---- float geometry -------------------------------------------------------

pub type V = Vec<f64>;

pub fn fv(p: &[Rational]) -> V {
    p.iter().map(Rational::to_f64).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> V {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves a small dense system by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<V>, mut b: V) -> Option<V> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-14 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            let (upper, lower) = a.split_at_mut(r);
            for (x, y) in lower[0][c..].iter_mut().zip(&upper[c][c..]) {
                *x -= f * y;
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Distance from `z` to the convex hull of `pts`, by projecting onto every face.
pub fn point_simplex_distance(z: &[f64], pts: &[V]) -> f64 {
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << pts.len()) {
        let face: Vec<&V> = (0..pts.len()).filter(|i| mask >> i & 1 == 1).map(|i| &pts[i]).collect();
        let p0 = face[0];
        let edges: Vec<V> = face[1..].iter().map(|p| sub(p, p0)).collect();
        let w = sub(z, p0);
        let c = if edges.is_empty() {
            Some(vec![])
        } else {
            let g: Vec<V> = edges.iter().map(|e| edges.iter().map(|f| dot(e, f)).collect()).collect();
            solve(g, edges.iter().map(|e| dot(e, &w)).collect())
        };
        let Some(c) = c else { continue };
        if c.iter().any(|x| *x < -1e-12) || c.iter().sum::<f64>() > 1.0 + 1e-12 {
            continue;
        }
        let mut foot = p0.clone();
        for (ci, e) in c.iter().zip(&edges) {
            for (f, ei) in foot.iter_mut().zip(e) {
                *f += ci * ei;
            }
        }
        best = best.min(norm(&sub(z, &foot)));
    }
    best
}

/// Distance from the line through `z` with unit direction `u` to the hull of `pts`.
pub fn line_simplex_distance(z: &[f64], u: &[f64], pts: &[V]) -> f64 {
    let project = |x: &[f64]| -> V {
        let d = sub(x, z);
        let t = dot(&d, u);
        d.iter().zip(u).map(|(di, ui)| di - t * ui).collect()
    };
    let origin = vec![0.0; z.len()];
    let projected: Vec<V> = pts.iter().map(|p| project(p)).collect();
    point_simplex_distance(&origin, &projected)
}

/// Lines through `z` meeting both `s1` and `s2` (each up to `tol`), found by
/// branch-and-bound over a subdivision of `s1`. Returns unit directions.
pub fn transversal_oracle(z: &[f64], s1: &[V], s2: &[V], min_cell: f64, tol: f64) -> Vec<V> {
    let near = s1.iter().map(|p| norm(&sub(p, z))).fold(f64::INFINITY, f64::min);
    let far = s2.iter().map(|p| norm(&sub(p, z))).fold(0.0, f64::max);
    // distance from z to hull(s1) bounds |p - z| from below
    let near = near.min(point_simplex_distance(z, s1)).max(1e-12);
    let lipschitz = far / near;
    let mut out: Vec<V> = Vec::new();
    let mut stack: Vec<Vec<V>> = vec![s1.to_vec()];
    while let Some(cell) = stack.pop() {
        let k = cell.len();
        let centre: V = (0..z.len()).map(|i| cell.iter().map(|p| p[i]).sum::<f64>() / k as f64).collect();
        let mut diam: f64 = 0.0;
        let mut longest = (0, 0);
        for a in 0..k {
            for b in a + 1..k {
                let d = norm(&sub(&cell[a], &cell[b]));
                if d > diam {
                    diam = d;
                    longest = (a, b);
                }
            }
        }
        let dir = sub(&centre, z);
        let n = norm(&dir);
        let u: V = dir.iter().map(|x| x / n).collect();
        let f = line_simplex_distance(z, &u, s2);
        // moving p by r moves the line near s2 by at most lipschitz * r
        if f > tol + lipschitz * diam {
            continue;
        }
        if diam < min_cell {
            out.push(u);
            continue;
        }
        let (a, b) = longest;
        let mid: V = cell[a].iter().zip(&cell[b]).map(|(x, y)| (x + y) / 2.0).collect();
        let mut left = cell.clone();
        left[b] = mid.clone();
        let mut right = cell;
        right[a] = mid;
        stack.push(left);
        stack.push(right);
    }
    out
}

// ---- line metric oracle ---------------------------------------------------

pub fn chord(base: &[f64], dir: &[f64], k: f64) -> (V, V) {
    let u: V = dir.iter().map(|x| x / norm(dir)).collect();
    let t0 = -dot(base, &u);
    let foot: V = base.iter().zip(&u).map(|(b, ui)| b + t0 * ui).collect();
    let half = (k * k - dot(&foot, &foot)).max(0.0).sqrt();
    let end = |s: f64| foot.iter().zip(&u).map(|(f, ui)| f + s * ui).collect::<V>();
    (end(-half), end(half))
}

/// Hausdorff distance between chords, by dense sampling of both.
pub fn sampled_hausdorff(a: &(V, V), b: &(V, V), n: usize) -> f64 {
    let pts = |s: &(V, V)| -> Vec<V> {
        (0..=n).map(|i| {
            let t = i as f64 / n as f64;
            s.0.iter().zip(&s.1).map(|(x, y)| x + t * (y - x)).collect()
        }).collect()
    };
    let (p, q) = (pts(a), pts(b));
    let directed = |p: &[V], q: &[V]| {
        p.iter().map(|x| q.iter().map(|y| norm(&sub(x, y))).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    directed(&p, &q).max(directed(&q, &p))
}

/// Hausdorff distance between chords via endpoint-to-segment distances, coded
/// independently of the library.
pub fn chord_hausdorff(a: &(V, V), b: &(V, V)) -> f64 {
    let seg = |p: &[f64], s: &(V, V)| point_simplex_distance(p, &[s.0.clone(), s.1.clone()]);
    seg(&a.0, b).max(seg(&a.1, b)).max(seg(&b.0, a)).max(seg(&b.1, a))
}
