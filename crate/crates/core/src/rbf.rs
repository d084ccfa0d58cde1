//! Gaussian radial-basis-function interpolation on scattered centres.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::points::{Point2, COINCIDENCE_TOL};
use crate::Interpolant;

pub const DEFAULT_RIDGE: f64 = 1e-10;

/// `s(x) = Σ c_i exp(−(shape · |x − x_i|)²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfModel {
    centers: Vec<Point2>,
    coefficients: Vec<f64>,
    shape: f64,
    ridge: f64,
}

impl RbfModel {
    pub fn centers(&self) -> &[Point2] {
        &self.centers
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn value(&self, p: &Point2) -> f64 {
        self.centers
            .iter()
            .zip(&self.coefficients)
            .map(|(c, w)| w * gaussian(self.shape, p.distance(c)))
            .sum()
    }
}

impl Interpolant for RbfModel {
    fn evaluate(&self, targets: &[Point2]) -> Result<Vec<f64>> {
        Ok(rbf_eval(self, targets))
    }
}

fn gaussian(shape: f64, r: f64) -> f64 {
    (-(shape * r).powi(2)).exp()
}

/// `1 / mean nearest-neighbour distance`; 1 for a single centre.
pub fn default_shape(centers: &[Point2]) -> f64 {
    if centers.len() < 2 {
        return 1.0;
    }
    let total: f64 = centers
        .iter()
        .enumerate()
        .map(|(i, a)| {
            centers
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, b)| a.distance(b))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    centers.len() as f64 / total
}

/// Solves `(Φ + ridge·I) c = values`. Cholesky first, LU if the regularized
/// matrix is not numerically positive definite.
pub fn rbf_fit(centers: &[Point2], values: &[f64], shape: Option<f64>, ridge: Option<f64>) -> Result<RbfModel> {
    if centers.is_empty() {
        return Err(Error::InvalidArgument("RBF fit needs at least one centre".into()));
    }
    if centers.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: centers.len(),
            got: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("RBF values must be finite".into()));
    }
    for (i, a) in centers.iter().enumerate() {
        for b in &centers[i + 1..] {
            if a.distance(b) <= COINCIDENCE_TOL {
                return Err(Error::InvalidArgument(format!(
                    "coincident RBF centres at ({}, {})",
                    a.x, a.y
                )));
            }
        }
    }
    let shape = shape.unwrap_or_else(|| default_shape(centers));
    if !(shape.is_finite() && shape > 0.0) {
        return Err(Error::InvalidArgument(format!("RBF shape must be positive, got {shape}")));
    }
    let ridge = ridge.unwrap_or(DEFAULT_RIDGE);
    if !(ridge.is_finite() && ridge >= 0.0) {
        return Err(Error::InvalidArgument(format!("RBF ridge must be non-negative, got {ridge}")));
    }

    let n = centers.len();
    let phi = DMatrix::from_fn(n, n, |i, j| {
        gaussian(shape, centers[i].distance(&centers[j])) + if i == j { ridge } else { 0.0 }
    });
    let rhs = DVector::from_column_slice(values);
    let solution = match phi.clone().cholesky() {
        Some(ch) => Some(ch.solve(&rhs)),
        None => phi.clone().lu().solve(&rhs),
    };
    let coefficients = solution
        .filter(|c| c.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::Conditioning(format!("RBF system of {n} centres is singular (shape {shape}, ridge {ridge})")))?;
    Ok(RbfModel {
        centers: centers.to_vec(),
        coefficients: coefficients.as_slice().to_vec(),
        shape,
        ridge,
    })
}

pub fn rbf_eval(model: &RbfModel, targets: &[Point2]) -> Vec<f64> {
    targets.iter().map(|t| model.value(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::{data_grid, regular_sensor_grid};
    use proptest::prelude::*;

    fn corners() -> Vec<Point2> {
        [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)]
            .iter()
            .map(|&(x, y)| Point2 { x, y })
            .collect()
    }

    #[test]
    fn constant_values_reproduced() {
        let c = corners();
        let m = rbf_fit(&c, &[0.7; 4], None, Some(0.0)).unwrap();
        for v in rbf_eval(&m, &c) {
            assert!((v - 0.7).abs() < 1e-8);
        }
    }

    #[test]
    fn single_centre() {
        let c = [Point2 { x: 0.2, y: 0.1 }];
        let m = rbf_fit(&c, &[1.3], None, Some(0.0)).unwrap();
        assert_eq!(m.shape(), 1.0);
        assert_eq!(m.coefficients(), &[1.3]);
    }

    #[test]
    fn corner_field_x() {
        let c = corners();
        let vals: Vec<f64> = c.iter().map(|p| p.x).collect();
        let m = rbf_fit(&c, &vals, None, Some(0.0)).unwrap();
        // oracle: explicit 4×4 solve by Gaussian elimination is the LU path
        let out = rbf_eval(&m, &c);
        for (o, v) in out.iter().zip(&vals) {
            assert!((o - v).abs() < 1e-8);
        }
    }

    #[test]
    fn gaussian_decay_far_away() {
        let c = corners();
        let m = rbf_fit(&c, &[1.0, 2.0, 3.0, 4.0], None, None).unwrap();
        let far = Point2 { x: 40.0 / m.shape(), y: 0.0 };
        assert!(m.value(&far).abs() < 1e-6);
    }

    #[test]
    fn mirror_symmetry() {
        let c = corners();
        let vals = [1.0, 1.0, 2.0, 2.0]; // symmetric under x -> -x
        let m = rbf_fit(&c, &vals, None, None).unwrap();
        for (x, y) in [(0.3, 0.2), (0.9, -0.4), (0.05, 0.77)] {
            let a = m.value(&Point2 { x, y });
            let b = m.value(&Point2 { x: -x, y });
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_on_benchmark_grids() {
        let data = data_grid(5, 5).unwrap();
        for d in 2..=9 {
            let grid = regular_sensor_grid(d, data.points(), d == 9).unwrap();
            let vals: Vec<f64> = grid.points.iter().map(|p| (3.0 * p.x).sin() + p.y * p.y).collect();
            let m = rbf_fit(&grid.points, &vals, None, Some(0.0)).unwrap();
            for (o, v) in rbf_eval(&m, &grid.points).iter().zip(&vals) {
                assert!((o - v).abs() < 1e-8, "d={d}");
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let c = corners();
        assert!(rbf_fit(&c, &[1.0; 3], None, None).is_err());
        assert!(rbf_fit(&[c[0], c[0]], &[1.0, 1.0], None, None).is_err());
        assert!(rbf_fit(&c, &[f64::NAN, 0.0, 0.0, 0.0], None, None).is_err());
        assert!(rbf_fit(&c, &[0.0; 4], Some(-1.0), None).is_err());
        assert!(rbf_fit(&[], &[], None, None).is_err());
    }

    proptest! {
        #[test]
        fn permutation_invariant(seed in 0u64..1000) {
            use rand::{seq::SliceRandom, SeedableRng};
            let data = data_grid(4, 3).unwrap();
            let pts = data.points().to_vec();
            let vals: Vec<f64> = pts.iter().map(|p| p.x * p.y + 0.3).collect();
            let mut idx: Vec<usize> = (0..pts.len()).collect();
            idx.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let p2: Vec<Point2> = idx.iter().map(|&i| pts[i]).collect();
            let v2: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
            let a = rbf_fit(&pts, &vals, None, None).unwrap();
            let b = rbf_fit(&p2, &v2, None, None).unwrap();
            let t = [Point2 { x: 0.13, y: -0.52 }, Point2 { x: -0.9, y: 0.8 }];
            for (u, v) in rbf_eval(&a, &t).iter().zip(rbf_eval(&b, &t)) {
                prop_assert!((u - v).abs() < 1e-9);
            }
        }
    }
}
