//! Weighted Vandermonde least squares, conditioning and Lebesgue-constant
//! diagnostics, perturbed-node experiments and the block pseudoinverse
//! identity.

use nalgebra::{DMatrix, DVector, SVD};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::measurement::stream_rng;
use crate::padua::{padua_features, CardinalBasis, PaduaInterpolant, PaduaSamples};
use crate::points::{linspace, min_pairwise_distance, padua_count, padua_points_curve, Point2};
use crate::Interpolant;

pub const DEFAULT_LEBESGUE_RESOLUTION: usize = 201;
pub const MIN_LEBESGUE_RESOLUTION: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    /// `x^i y^j`, `i + j ≤ κ`.
    Monomial,
    /// `T̂_i(x) T̂_j(y)`, `i + j ≤ κ`, with the `(κ, 0)` term left unscaled so
    /// that the basis is discretely orthonormal under Padua cubature.
    ProductChebyshev,
}

impl std::str::FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monomial" => Ok(BasisKind::Monomial),
            "chebyshev" | "product-chebyshev" => Ok(BasisKind::ProductChebyshev),
            other => Err(Error::Parse(format!("unknown basis '{other}'"))),
        }
    }
}

/// Total-degree polynomial basis of dimension `(κ+1)(κ+2)/2`, ordered by total
/// degree and then by descending `x` power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BasisSpec {
    pub kind: BasisKind,
    pub degree: usize,
}

impl BasisSpec {
    pub fn new(kind: BasisKind, degree: usize) -> Self {
        BasisSpec { kind, degree }
    }

    pub fn dimension(&self) -> usize {
        padua_count(self.degree)
    }

    pub fn eval(&self, p: &Point2, out: &mut Vec<f64>) {
        match self.kind {
            BasisKind::ProductChebyshev => padua_features(self.degree, p, out),
            BasisKind::Monomial => {
                out.clear();
                for d in 0..=self.degree {
                    for i in (0..=d).rev() {
                        out.push(p.x.powi(i as i32) * p.y.powi((d - i) as i32));
                    }
                }
            }
        }
    }
}

/// `V` with entry `(i, j) = p_j(x_i)` together with the diagonal weights `W`.
///
/// `L < N` is allowed at construction; solvers report the rank deficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedVandermonde {
    basis: BasisSpec,
    points: Vec<Point2>,
    weights: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl WeightedVandermonde {
    pub fn new(basis: BasisSpec, points: &[Point2], weights: &[f64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("Vandermonde matrix needs at least one point".into()));
        }
        if weights.len() != points.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                got: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidArgument(format!("weights must be positive, got {w}")));
        }
        if basis.kind == BasisKind::ProductChebyshev {
            for p in points {
                Point2::new(p.x, p.y)?;
            }
        }
        let n = basis.dimension();
        let mut matrix = DMatrix::zeros(points.len(), n);
        let mut row = Vec::with_capacity(n);
        for (i, p) in points.iter().enumerate() {
            basis.eval(p, &mut row);
            for (j, v) in row.iter().enumerate() {
                matrix[(i, j)] = *v;
            }
        }
        Ok(WeightedVandermonde {
            basis,
            points: points.to_vec(),
            weights: weights.to_vec(),
            matrix,
        })
    }

    /// Padua points of order `κ`, product-Chebyshev basis, `W = diag(√w)`
    /// with the cubature weights `w`.
    pub fn padua(order: usize) -> Result<Self> {
        let set = padua_points_curve(order)?;
        let w: Vec<f64> = set.weights().iter().map(|w| w.sqrt()).collect();
        Self::new(BasisSpec::new(BasisKind::ProductChebyshev, order), set.points(), &w)
    }

    pub fn with_unit_weights(basis: BasisSpec, points: &[Point2]) -> Result<Self> {
        Self::new(basis, points, &vec![1.0; points.len()])
    }

    pub fn basis(&self) -> BasisSpec {
        self.basis
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `W V`.
    pub fn weighted(&self) -> DMatrix<f64> {
        let mut m = self.matrix.clone();
        for (i, w) in self.weights.iter().enumerate() {
            m.row_mut(i).scale_mut(*w);
        }
        m
    }

    /// Copy with every weight multiplied by `alpha`.
    pub fn rescaled(&self, alpha: f64) -> Result<Self> {
        let w: Vec<f64> = self.weights.iter().map(|w| w * alpha).collect();
        Self::new(self.basis, &self.points, &w)
    }
}

fn rank_tolerance(svd: &SVD<f64, nalgebra::Dyn, nalgebra::Dyn>, rows: usize, cols: usize) -> f64 {
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    rows.max(cols) as f64 * f64::EPSILON * smax
}

fn full_rank_svd(m: &DMatrix<f64>) -> Result<SVD<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    let (rows, cols) = m.shape();
    let svd = m.clone().svd(true, true);
    let tol = rank_tolerance(&svd, rows, cols);
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    if rank < cols {
        return Err(Error::RankDeficient {
            deficient: cols - rank,
            columns: cols,
        });
    }
    Ok(svd)
}

/// Moore–Penrose pseudoinverse with the usual `max(m, n)·ε·σ_max` cutoff.
pub fn pseudo_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return DMatrix::zeros(cols, rows);
    }
    let svd = m.clone().svd(true, true);
    let tol = rank_tolerance(&svd, rows, cols);
    svd.pseudo_inverse(tol).expect("SVD computed with both factors")
}

/// `c = (WV)† W F`, minimizing `‖W(Vc − F)‖₂`.
pub fn lsq_fit(v: &WeightedVandermonde, samples: &[f64]) -> Result<DVector<f64>> {
    if samples.len() != v.points.len() {
        return Err(Error::LengthMismatch {
            expected: v.points.len(),
            got: samples.len(),
        });
    }
    let wv = v.weighted();
    let svd = full_rank_svd(&wv)?;
    let wf = DVector::from_iterator(samples.len(), samples.iter().zip(&v.weights).map(|(f, w)| f * w));
    let tol = rank_tolerance(&svd, wv.nrows(), wv.ncols());
    svd.solve(&wf, tol).map_err(|e| Error::Conditioning(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixNorm {
    /// Largest singular value.
    Spectral,
    /// Maximum absolute row sum.
    Infinity,
}

impl std::str::FromStr for MatrixNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" | "spectral" => Ok(MatrixNorm::Spectral),
            "inf" | "infinity" => Ok(MatrixNorm::Infinity),
            other => Err(Error::Parse(format!("unknown norm '{other}'"))),
        }
    }
}

fn operator_norm(m: &DMatrix<f64>, norm: MatrixNorm) -> f64 {
    match norm {
        MatrixNorm::Spectral => m.clone().singular_values().iter().cloned().fold(0.0, f64::max),
        MatrixNorm::Infinity => m
            .row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max),
    }
}

/// `η = ‖(WV)†‖ · ‖WV‖` in the requested operator norm.
pub fn condition_number(v: &WeightedVandermonde, norm: MatrixNorm) -> Result<f64> {
    let wv = v.weighted();
    let svd = full_rank_svd(&wv)?;
    if norm == MatrixNorm::Spectral {
        let s = &svd.singular_values;
        return Ok(s.max() / s.min());
    }
    let pinv = pseudo_inverse(&wv);
    Ok(operator_norm(&pinv, norm) * operator_norm(&wv, norm))
}

/// Discrete Gram matrix `Σ_k w_k² p_i(x_k) p_j(x_k)`.
pub fn gram_orthonormality(v: &WeightedVandermonde) -> DMatrix<f64> {
    let wv = v.weighted();
    wv.transpose() * wv
}

/// Coefficients in a [`BasisSpec`], evaluable anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct LsqInterpolant {
    basis: BasisSpec,
    coefficients: DVector<f64>,
}

impl LsqInterpolant {
    pub fn fit(v: &WeightedVandermonde, samples: &[f64]) -> Result<Self> {
        Ok(LsqInterpolant {
            basis: v.basis(),
            coefficients: lsq_fit(v, samples)?,
        })
    }

    pub fn coefficients(&self) -> &DVector<f64> {
        &self.coefficients
    }
}

impl Interpolant for LsqInterpolant {
    fn evaluate(&self, targets: &[Point2]) -> Result<Vec<f64>> {
        let mut row = Vec::with_capacity(self.basis.dimension());
        targets
            .iter()
            .map(|t| {
                if self.basis.kind == BasisKind::ProductChebyshev {
                    Point2::new(t.x, t.y)?;
                }
                self.basis.eval(t, &mut row);
                Ok(row.iter().zip(self.coefficients.iter()).map(|(a, b)| a * b).sum())
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LebesgueEstimate {
    pub order: usize,
    pub grid_resolution: usize,
    pub value: f64,
}

/// Maximum of the Lebesgue function `Σ_x |l(x, x')|` over a
/// `resolution × resolution` grid.
pub fn lebesgue_estimate(order: usize, resolution: usize) -> Result<LebesgueEstimate> {
    if resolution < MIN_LEBESGUE_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "Lebesgue grid resolution must be >= {MIN_LEBESGUE_RESOLUTION}, got {resolution}"
        )));
    }
    let set = padua_points_curve(order)?;
    let basis = CardinalBasis::new(&set);
    let axis = linspace(resolution);
    let row_max = axis
        .par_iter()
        .map(|&y| {
            let row: Vec<Point2> = axis.iter().map(|&x| Point2 { x, y }).collect();
            let l = basis.values(&row)?;
            Ok(l.column_iter()
                .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LebesgueEstimate {
        order,
        grid_resolution: resolution,
        value: row_max.into_iter().fold(0.0, f64::max),
    })
}

/// `(A + B)† = ½ [I I] · [[A, B], [B, A]]† · [I; I]`.
pub fn block_pseudoinverse(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.shape() != b.shape() {
        return Err(Error::InvalidArgument(format!(
            "block pseudoinverse needs equal shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let (m, n) = a.shape();
    let mut block = DMatrix::zeros(2 * m, 2 * n);
    block.view_mut((0, 0), (m, n)).copy_from(a);
    block.view_mut((0, n), (m, n)).copy_from(b);
    block.view_mut((m, 0), (m, n)).copy_from(b);
    block.view_mut((m, n), (m, n)).copy_from(a);
    let p = pseudo_inverse(&block);
    let left = DMatrix::from_fn(n, 2 * n, |i, j| if j % n == i { 1.0 } else { 0.0 });
    let right = DMatrix::from_fn(2 * m, m, |i, j| if i % m == j { 1.0 } else { 0.0 });
    Ok(0.5 * left * p * right)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationRow {
    pub epsilon: f64,
    pub max_error: f64,
}

fn dense_grid(resolution: usize) -> Vec<Point2> {
    let axis = linspace(resolution);
    axis.iter()
        .flat_map(|&y| axis.iter().map(move |&x| Point2 { x, y }))
        .collect()
}

/// ∞-norm reconstruction error of the order-`κ` Padua interpolant when every
/// node is displaced by `ε` in a seeded random direction (then clamped onto
/// the square) and refitted from the true field at the displaced nodes.
///
/// Directions are drawn once per seed, so the sweep varies only the magnitude.
pub fn perturbation_sweep(
    order: usize,
    epsilons: &[f64],
    field: &Field,
    seed: u64,
    resolution: usize,
) -> Result<Vec<PerturbationRow>> {
    let set = padua_points_curve(order)?;
    let limit = min_pairwise_distance(set.points()) / 2.0;
    if let Some(e) = epsilons.iter().find(|e| !(e.is_finite() && **e >= 0.0 && **e < limit)) {
        return Err(Error::InvalidArgument(format!(
            "perturbation {e} must lie in [0, {limit}) (half the minimum node spacing)"
        )));
    }
    let directions: Vec<(f64, f64)> = (0..set.len())
        .map(|i| {
            use rand::Rng;
            let theta = stream_rng(seed, 0, i as u64).random_range(0.0..std::f64::consts::TAU);
            (theta.cos(), theta.sin())
        })
        .collect();
    let grid = dense_grid(resolution);
    let truth = crate::field::eval_field(field, &grid)?;
    let weights: Vec<f64> = set.weights().iter().map(|w| w.sqrt()).collect();
    let basis = BasisSpec::new(BasisKind::ProductChebyshev, order);

    epsilons
        .par_iter()
        .map(|&eps| {
            let moved: Vec<Point2> = set
                .points()
                .iter()
                .zip(&directions)
                .map(|(p, (dx, dy))| Point2 { x: p.x + eps * dx, y: p.y + eps * dy }.clamped())
                .collect();
            let values = crate::field::eval_field(field, &moved)?;
            let v = WeightedVandermonde::new(basis, &moved, &weights)?;
            let fit = LsqInterpolant::fit(&v, &values)?;
            let recon = fit.evaluate(&grid)?;
            let max_error = recon
                .iter()
                .zip(&truth)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(PerturbationRow { epsilon: eps, max_error })
        })
        .collect()
}

/// ∞-norm error of the noiseless order-`κ` Padua interpolant of `field` over
/// a `resolution × resolution` grid.
pub fn interpolation_error(order: usize, field: &Field, resolution: usize) -> Result<f64> {
    let samples = PaduaSamples::from_fn(order, |p| field.affine_value(p))?;
    let fit = PaduaInterpolant::fit(&samples)?;
    let grid = dense_grid(resolution);
    let recon = fit.evaluate(&grid)?;
    let truth = crate::field::eval_field(field, &grid)?;
    Ok(recon
        .iter()
        .zip(&truth)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
