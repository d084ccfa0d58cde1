//! Lagrange interpolation at the Padua points.
//!
//! Two independent evaluation paths are provided:
//!
//! * the reproducing-kernel sum `L(f)(x') = Σ f(x) l(x, x')` with
//!   `l(x, x') = K*(x, x') / K*(x, x)` ([`interpolate_kernel`]);
//! * the Chebyshev-matrix algorithm `L(f)(X) = (𝕋(X₁)ᵗ ℂ₀(f) 𝕋(X₂))ᵗ`
//!   ([`interpolate_fast`], [`PaduaInterpolant`]).
//!
//! The kernel uses the orthonormal product-Chebyshev system `T̂_0 = 1`,
//! `T̂_n = √2 T_n`, and `K*(x, y) = K_κ(x, y) - T_κ(x₀) T_κ(y₀)`. With this
//! convention `K*(x, x) = 1 / w_x` at every node.
//!
//! The matrix path scales every Chebyshev row by √2, including row 0. The
//! degree-zero modes therefore pick up a spurious factor 2 on each side of the
//! sandwich, which is removed by halving row 0 and column 0 of `ℂ₀` before
//! evaluation (the constant mode ends up divided by four).

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector};

use crate::chebyshev::{cgl_points, cheb_matrix, cheb_table, clamp_unit};
use crate::error::{Error, Result};
use crate::points::{padua_count, padua_points_curve, PaduaSet, Point2, COINCIDENCE_TOL};
use crate::Interpolant;

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidArgument("Padua order must be >= 1".into()));
    }
    Ok(())
}

/// `T̂_0..T̂_order` at `s` (T̂_0 = 1, T̂_n = √2 T_n).
fn normalized_table(order: usize, s: f64, out: &mut [f64]) {
    cheb_table(s, &mut out[..=order]);
    for t in &mut out[1..=order] {
        *t *= SQRT_2;
    }
}

/// Reproducing kernel of total-degree-`κ` bivariate polynomials,
/// `Σ_{j≤κ} Σ_{i≤j} T̂_i(x₀)T̂_{j−i}(x₁)T̂_i(y₀)T̂_{j−i}(y₁)`.
pub fn kernel_k(order: usize, x: &Point2, y: &Point2) -> Result<f64> {
    let (x0, x1) = (clamp_unit(x.x)?, clamp_unit(x.y)?);
    let (y0, y1) = (clamp_unit(y.x)?, clamp_unit(y.y)?);
    let n = order + 1;
    let mut buf = vec![0.0; 4 * n];
    let (tx0, rest) = buf.split_at_mut(n);
    let (tx1, rest) = rest.split_at_mut(n);
    let (ty0, ty1) = rest.split_at_mut(n);
    normalized_table(order, x0, tx0);
    normalized_table(order, x1, tx1);
    normalized_table(order, y0, ty0);
    normalized_table(order, y1, ty1);
    let mut sum = 0.0;
    for j in 0..=order {
        for i in 0..=j {
            sum += tx0[i] * tx1[j - i] * ty0[i] * ty1[j - i];
        }
    }
    Ok(sum)
}

/// `K*(x, y) = K_κ(x, y) − T_κ(x₀) T_κ(y₀)`.
pub fn kernel_star(order: usize, x: &Point2, y: &Point2) -> Result<f64> {
    let k = kernel_k(order, x, y)?;
    let tx = crate::chebyshev::cheb_t(order, x.x)?;
    let ty = crate::chebyshev::cheb_t(order, y.x)?;
    Ok(k - tx * ty)
}

/// Lagrange cardinal function of node `node` evaluated at `target`.
pub fn lagrange_basis(order: usize, node: &Point2, target: &Point2) -> Result<f64> {
    check_order(order)?;
    crate::points::classify_and_weight(node, order)?;
    Ok(kernel_star(order, node, target)? / kernel_star(order, node, node)?)
}

/// Basis functions whose Gram matrix under the order-`κ` Padua cubature is the
/// identity: `T̂_i(x) T̂_j(y)` for `i + j ≤ κ`, except that the `(κ, 0)` term
/// uses the plain `T_κ(x)`. Ordered by total degree, then by descending
/// `x`-degree. `K*(x, y) = Σ_m φ_m(x) φ_m(y)`.
pub fn padua_features(order: usize, p: &Point2, out: &mut Vec<f64>) {
    let mut tx = vec![0.0; order + 1];
    let mut ty = vec![0.0; order + 1];
    normalized_table(order, p.x, &mut tx);
    normalized_table(order, p.y, &mut ty);
    out.clear();
    for d in 0..=order {
        for i in (0..=d).rev() {
            let v = tx[i] * ty[d - i];
            out.push(if i == order { v / SQRT_2 } else { v });
        }
    }
}

/// Field values on the Padua points of one order, aligned with the set's
/// canonical point order.
#[derive(Debug, Clone, PartialEq)]
pub struct PaduaSamples {
    set: PaduaSet,
    values: Vec<f64>,
}

impl PaduaSamples {
    pub fn new(set: PaduaSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != set.len() {
            return Err(Error::LengthMismatch {
                expected: set.len(),
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::SampleMismatch(format!("non-finite sample value {v}")));
        }
        Ok(PaduaSamples { set, values })
    }

    pub fn from_fn(order: usize, f: impl Fn(&Point2) -> f64) -> Result<Self> {
        let set = padua_points_curve(order)?;
        let values = set.points().iter().map(f).collect();
        Self::new(set, values)
    }

    /// Matches arbitrary-order `(point, value)` pairs onto the Padua set whose
    /// size equals the number of samples.
    pub fn from_scattered(points: &[Point2], values: &[f64]) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                got: values.len(),
            });
        }
        let order = (1..=200)
            .find(|&k| padua_count(k) == points.len())
            .ok_or_else(|| {
                Error::SampleMismatch(format!(
                    "{} samples is not a Padua set size (κ+1)(κ+2)/2",
                    points.len()
                ))
            })?;
        let set = padua_points_curve(order)?;
        let mut ordered = vec![None; set.len()];
        for (p, &v) in points.iter().zip(values) {
            let idx = set.index_of(p).ok_or(Error::NotPaduaPoint {
                x: p.x,
                y: p.y,
                order,
            })?;
            if ordered[idx].replace(v).is_some() {
                return Err(Error::SampleMismatch(format!(
                    "duplicate sample at ({}, {})",
                    p.x, p.y
                )));
            }
        }
        let values = ordered.into_iter().map(|v| v.unwrap()).collect();
        Self::new(set, values)
    }

    pub fn order(&self) -> usize {
        self.set.order()
    }

    pub fn set(&self) -> &PaduaSet {
        &self.set
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Reference path: `Σ_x f(x) K*(x, x') / K*(x, x)` for every target.
pub fn interpolate_kernel(samples: &PaduaSamples, targets: &[Point2]) -> Result<Vec<f64>> {
    let order = samples.order();
    let nodes = samples.set().points();
    let diag = nodes
        .iter()
        .map(|p| kernel_star(order, p, p))
        .collect::<Result<Vec<_>>>()?;
    targets
        .iter()
        .map(|t| {
            let mut acc = 0.0;
            for ((p, f), d) in nodes.iter().zip(samples.values()).zip(&diag) {
                acc += f * kernel_star(order, p, t)? / d;
            }
            Ok(acc)
        })
        .collect()
}

/// `ℂ₀(f)`: upper-left triangle (`i + j ≤ κ`) of
/// `ℂ(f) = 𝕋(C_{κ+1}) 𝔾(f) 𝕋(C_{κ+2})ᵗ`, with entry `(κ, 0)` halved.
/// Row index is the `x` degree, column index the `y` degree.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    order: usize,
    entries: DMatrix<f64>,
}

impl CoefficientMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// `ℂ₀` with row 0 and column 0 halved, ready for a sandwich product with
    /// √2-scaled Chebyshev matrices.
    pub fn evaluation_matrix(&self) -> DMatrix<f64> {
        let mut m = self.entries.clone();
        m.row_mut(0).scale_mut(0.5);
        m.column_mut(0).scale_mut(0.5);
        m
    }
}

/// `(κ+1) × (κ+2)` matrix with `w_x f(x)` where the CGL product-grid index
/// coincides with a Padua point and zero elsewhere. Nodes are located by
/// coordinate match.
pub fn weighted_sample_grid(samples: &PaduaSamples) -> Result<DMatrix<f64>> {
    let order = samples.order();
    let cx = cgl_points(order)?;
    let cy = cgl_points(order + 1)?;
    let mut g = DMatrix::zeros(order + 1, order + 2);
    let set = samples.set();
    for ((p, w), f) in set.points().iter().zip(set.weights()).zip(samples.values()) {
        let not_found = || Error::NotPaduaPoint {
            x: p.x,
            y: p.y,
            order,
        };
        let r = cx.position(p.x, COINCIDENCE_TOL).ok_or_else(not_found)?;
        let s = cy.position(p.y, COINCIDENCE_TOL).ok_or_else(not_found)?;
        g[(r, s)] = w * f;
    }
    Ok(g)
}

pub fn coefficient_matrix(samples: &PaduaSamples) -> Result<CoefficientMatrix> {
    let order = samples.order();
    let g = weighted_sample_grid(samples)?;
    let tx = cheb_matrix(order, cgl_points(order)?.values())?;
    let ty = cheb_matrix(order, cgl_points(order + 1)?.values())?;
    let full = tx.entries() * g * ty.entries().transpose();
    let mut c0 = DMatrix::zeros(order + 1, order + 1);
    for i in 0..=order {
        for j in 0..=(order - i) {
            c0[(i, j)] = full[(i, j)];
        }
    }
    c0[(order, 0)] *= 0.5;
    Ok(CoefficientMatrix {
        order,
        entries: c0,
    })
}

/// Interpolant over the Cartesian grid `grid_x × grid_y`.
///
/// Returns a `|grid_y| × |grid_x|` matrix: entry `(r, c)` is the value at
/// `(grid_x[c], grid_y[r])`.
pub fn interpolate_fast(samples: &PaduaSamples, grid_x: &[f64], grid_y: &[f64]) -> Result<DMatrix<f64>> {
    if grid_x.is_empty() || grid_y.is_empty() {
        return Err(Error::InvalidArgument("evaluation grid is empty".into()));
    }
    let order = samples.order();
    let c0 = coefficient_matrix(samples)?.evaluation_matrix();
    let t1 = cheb_matrix(order, grid_x)?;
    let t2 = cheb_matrix(order, grid_y)?;
    Ok((t1.entries().transpose() * c0 * t2.entries()).transpose())
}

/// Fitted Padua–Lagrange interpolant, evaluable anywhere on the square.
#[derive(Debug, Clone)]
pub struct PaduaInterpolant {
    coefficients: CoefficientMatrix,
    evaluation: DMatrix<f64>,
}

impl PaduaInterpolant {
    pub fn fit(samples: &PaduaSamples) -> Result<Self> {
        let coefficients = coefficient_matrix(samples)?;
        let evaluation = coefficients.evaluation_matrix();
        Ok(PaduaInterpolant {
            coefficients,
            evaluation,
        })
    }

    pub fn order(&self) -> usize {
        self.coefficients.order()
    }

    pub fn coefficients(&self) -> &CoefficientMatrix {
        &self.coefficients
    }

    pub fn value(&self, p: &Point2) -> Result<f64> {
        let order = self.order();
        let (x, y) = (clamp_unit(p.x)?, clamp_unit(p.y)?);
        let mut tx = vec![0.0; order + 1];
        let mut ty = vec![0.0; order + 1];
        cheb_table(x, &mut tx);
        cheb_table(y, &mut ty);
        let mut acc = 0.0;
        for (i, txi) in tx.iter().enumerate() {
            let row: f64 = ty[..=order - i]
                .iter()
                .enumerate()
                .map(|(j, t)| self.evaluation[(i, j)] * t)
                .sum();
            acc += row * txi;
        }
        // both Chebyshev factors carry √2
        Ok(2.0 * acc)
    }
}

impl Interpolant for PaduaInterpolant {
    fn evaluate(&self, targets: &[Point2]) -> Result<Vec<f64>> {
        targets.iter().map(|p| self.value(p)).collect()
    }
}

/// Evaluator for all cardinal functions of one Padua set.
///
/// `l(x_p, x') = w_p Σ_m φ_m(x_p) φ_m(x')` with the features of
/// [`padua_features`]; the node side is precomputed once.
#[derive(Debug, Clone)]
pub struct CardinalBasis {
    order: usize,
    /// `L × N`, row `p` is `w_p φ(x_p)`.
    nodes: DMatrix<f64>,
}

impl CardinalBasis {
    pub fn new(set: &PaduaSet) -> Self {
        let order = set.order();
        let n = padua_count(order);
        let mut feat = Vec::with_capacity(n);
        let mut nodes = DMatrix::zeros(set.len(), n);
        for (r, (p, w)) in set.points().iter().zip(set.weights()).enumerate() {
            padua_features(order, p, &mut feat);
            for (m, v) in feat.iter().enumerate() {
                nodes[(r, m)] = w * v;
            }
        }
        CardinalBasis { order, nodes }
    }

    /// `L × |targets|` matrix with entry `(p, t) = l(x_p, target_t)`.
    pub fn values(&self, targets: &[Point2]) -> Result<DMatrix<f64>> {
        let n = self.nodes.ncols();
        let mut feat = Vec::with_capacity(n);
        let mut at_targets = DMatrix::zeros(n, targets.len());
        for (c, t) in targets.iter().enumerate() {
            let t = Point2 { x: clamp_unit(t.x)?, y: clamp_unit(t.y)? };
            padua_features(self.order, &t, &mut feat);
            at_targets.set_column(c, &DVector::from_column_slice(&feat));
        }
        Ok(&self.nodes * at_targets)
    }
}

/// Cardinal functions of every node at every target: an `L × |targets|`
/// matrix with entry `(p, t) = l(x_p, target_t)`.
pub fn lagrange_matrix(set: &PaduaSet, targets: &[Point2]) -> Result<DMatrix<f64>> {
    CardinalBasis::new(set).values(targets)
}
