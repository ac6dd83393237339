//! Exact strict linear separability for labeled 2-D point sets.
//!
//! For a unit normal `n`, the classes are separated along `n` iff
//! `max_{y=0} n·x < min_{y=1} n·x`. The gap `min₁ − max₀` is continuous in
//! the angle of `n` and can only change sign at directions orthogonal to
//! some cross-class difference `x_a − x_b`. Enumerating those critical
//! angles (both orientations of every pair) and testing one direction
//! strictly inside each arc between consecutive critical angles therefore
//! decides separability exactly, and the winning direction yields a
//! certificate `(w, b)` with `w·x + b > 0` exactly on class 1.

use std::f64::consts::{PI, TAU};

use crate::data::Point;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Separability {
    pub separable: bool,
    /// `(w, b)` such that `w·x + b > 0` for class 1 and `< 0` for class 0.
    pub certificate: Option<([f64; 2], f64)>,
}

pub fn check_linear_separability(points: &[Point], labels: &[u8]) -> Result<Separability> {
    if points.len() != labels.len() {
        return Err(invalid("points and labels differ in length"));
    }
    if points.len() < 2 {
        return Err(invalid("need at least 2 points"));
    }
    let ones: Vec<Point> = points.iter().zip(labels).filter(|(_, &y)| y == 1).map(|(p, _)| *p).collect();
    let zeros: Vec<Point> = points.iter().zip(labels).filter(|(_, &y)| y != 1).map(|(p, _)| *p).collect();
    if ones.is_empty() || zeros.is_empty() {
        return Err(invalid("single-class input is trivially separable"));
    }

    let mut angles: Vec<f64> = Vec::with_capacity(2 * ones.len() * zeros.len());
    for a in &zeros {
        for b in &ones {
            let d = [b[0] - a[0], b[1] - a[1]];
            if d[0] == 0.0 && d[1] == 0.0 {
                // identical points with different labels can never be separated
                return Ok(Separability {
                    separable: false,
                    certificate: None,
                });
            }
            // normals orthogonal to d
            let base = (-d[0]).atan2(d[1]);
            angles.push(base.rem_euclid(TAU));
            angles.push((base + PI).rem_euclid(TAU));
        }
    }
    angles.sort_by(f64::total_cmp);
    angles.dedup();

    let n = angles.len();
    for k in 0..n {
        let lo = angles[k];
        let hi = if k + 1 < n { angles[k + 1] } else { angles[0] + TAU };
        if hi - lo <= 0.0 {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        if let Some(cert) = separates_along(&zeros, &ones, [mid.cos(), mid.sin()]) {
            return Ok(Separability {
                separable: true,
                certificate: Some(cert),
            });
        }
    }
    Ok(Separability {
        separable: false,
        certificate: None,
    })
}

fn separates_along(zeros: &[Point], ones: &[Point], w: [f64; 2]) -> Option<([f64; 2], f64)> {
    let proj = |p: &Point| w[0] * p[0] + w[1] * p[1];
    let max0 = zeros.iter().map(proj).fold(f64::NEG_INFINITY, f64::max);
    let min1 = ones.iter().map(proj).fold(f64::INFINITY, f64::min);
    if max0 < min1 {
        let b = -0.5 * (max0 + min1);
        let cert = (w, b);
        if verify_certificate(zeros, ones, &cert) {
            return Some(cert);
        }
    }
    None
}

fn verify_certificate(zeros: &[Point], ones: &[Point], (w, b): &([f64; 2], f64)) -> bool {
    let z = |p: &Point| w[0] * p[0] + w[1] * p[1] + b;
    zeros.iter().all(|p| z(p) < 0.0) && ones.iter().all(|p| z(p) > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_dataset_a;

    #[test]
    fn xor_is_inseparable() {
        let a = gen_dataset_a();
        let r = check_linear_separability(&a.points, &a.labels).unwrap();
        assert!(!r.separable);
        assert!(r.certificate.is_none());
    }

    #[test]
    fn two_points_are_separable() {
        let pts = [[0.0, 0.0], [1.0, 1.0]];
        let r = check_linear_separability(&pts, &[0, 1]).unwrap();
        assert!(r.separable);
        let (w, b) = r.certificate.unwrap();
        assert!(w[0] * 0.0 + w[1] * 0.0 + b < 0.0);
        assert!(w[0] + w[1] + b > 0.0);
    }

    #[test]
    fn single_class_is_rejected() {
        assert!(check_linear_separability(&[[0.0, 0.0], [1.0, 0.0]], &[1, 1]).is_err());
        assert!(check_linear_separability(&[[0.0, 0.0]], &[1]).is_err());
    }

    #[test]
    fn collinear_interleaved_is_inseparable() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        assert!(!check_linear_separability(&pts, &[0, 1, 0]).unwrap().separable);
        assert!(check_linear_separability(&pts, &[0, 0, 1]).unwrap().separable);
    }

    #[test]
    fn conflicting_duplicates_are_inseparable() {
        let pts = [[0.5, 0.5], [0.5, 0.5], [3.0, 0.0]];
        assert!(!check_linear_separability(&pts, &[0, 1, 1]).unwrap().separable);
    }
}
