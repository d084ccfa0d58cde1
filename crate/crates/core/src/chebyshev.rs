//! Chebyshev polynomials of the first kind, Chebyshev–Gauss–Lobatto grids and
//! the rectangular Chebyshev matrices used by the Padua machinery.
//!
//! Polynomials are always evaluated with the three-term recurrence
//! `T_{n+1}(s) = 2 s T_n(s) - T_{n-1}(s)`. Abscissae up to `1e-12` outside
//! `[-1, 1]` are clamped onto the interval; anything farther is a domain error.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Round-off window accepted outside `[-1, 1]`.
pub const CLAMP_TOL: f64 = 1e-12;

/// Clamp `s` onto `[-1, 1]` if it lies within [`CLAMP_TOL`] of the interval.
pub fn clamp_unit(s: f64) -> Result<f64> {
    if !s.is_finite() || s.abs() > 1.0 + CLAMP_TOL {
        return Err(Error::Domain {
            value: s,
            lo: -1.0,
            hi: 1.0,
        });
    }
    Ok(s.clamp(-1.0, 1.0))
}

/// `T_n(s)` by recurrence.
pub fn cheb_t(n: usize, s: f64) -> Result<f64> {
    let s = clamp_unit(s)?;
    Ok(cheb_t_unchecked(n, s))
}

pub(crate) fn cheb_t_unchecked(n: usize, s: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => s,
        _ => {
            let (mut prev, mut cur) = (1.0, s);
            for _ in 1..n {
                let next = 2.0 * s * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Fills `out[k] = T_k(s)` for `k = 0..out.len()`. `s` must already be in range.
pub(crate) fn cheb_table(s: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = s;
    }
    for k in 2..out.len() {
        out[k] = 2.0 * s * out[k - 1] - out[k - 2];
    }
}

/// Chebyshev–Gauss–Lobatto points of a given order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebGrid {
    order: usize,
    values: Vec<f64>,
}

impl ChebGrid {
    pub fn order(&self) -> usize {
        self.order
    }

    /// The `order + 1` abscissae in increasing order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the abscissa within `tol` of `s`, if any.
    pub fn position(&self, s: f64, tol: f64) -> Option<usize> {
        self.values.iter().position(|&z| (z - s).abs() <= tol)
    }
}

/// `z_j = -cos(j π / order)` for `j = 0..=order`, running from -1 to +1.
pub fn cgl_points(order: usize) -> Result<ChebGrid> {
    if order == 0 {
        return Err(Error::InvalidArgument(
            "Chebyshev-Gauss-Lobatto order must be >= 1".into(),
        ));
    }
    let k = order as f64;
    let values = (0..=order)
        .map(|j| {
            // pin the endpoints and the midpoint exactly
            if j == 0 {
                -1.0
            } else if j == order {
                1.0
            } else if 2 * j == order {
                0.0
            } else {
                -(j as f64 * PI / k).cos()
            }
        })
        .collect();
    Ok(ChebGrid { order, values })
}

/// `(order + 1) × |S|` matrix with entry `(y, i) = √2 · T_y(s_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebMatrix {
    order: usize,
    abscissae: Vec<f64>,
    entries: DMatrix<f64>,
}

impl ChebMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

pub fn cheb_matrix(order: usize, abscissae: &[f64]) -> Result<ChebMatrix> {
    if order == 0 {
        return Err(Error::InvalidArgument("Chebyshev matrix order must be >= 1".into()));
    }
    let clamped = abscissae
        .iter()
        .map(|&s| clamp_unit(s))
        .collect::<Result<Vec<_>>>()?;
    let mut entries = DMatrix::zeros(order + 1, clamped.len());
    let mut table = vec![0.0; order + 1];
    for (i, &s) in clamped.iter().enumerate() {
        cheb_table(s, &mut table);
        for (y, t) in table.iter().enumerate() {
            entries[(y, i)] = SQRT_2 * t;
        }
    }
    Ok(ChebMatrix {
        order,
        abscissae: clamped,
        entries,
    })
}
