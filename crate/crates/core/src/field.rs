//! True-field families, each affinely normalized so that its range over a
//! fixed 101×101 reference grid is exactly `[0, π]`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::{linspace, Point2};

/// Side length of the normalization grid.
pub const REFERENCE_RESOLUTION: usize = 101;

const MAX_REDRAWS: u32 = 10;
const DOMAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Polynomial,
    Linear,
    Franke,
    Nonpoly,
}

impl FieldKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FieldKind::Polynomial => "polynomial",
            FieldKind::Linear => "linear",
            FieldKind::Franke => "franke",
            FieldKind::Nonpoly => "nonpoly",
        }
    }
}

impl std::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FieldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polynomial" | "poly" => Ok(FieldKind::Polynomial),
            "linear" => Ok(FieldKind::Linear),
            "franke" => Ok(FieldKind::Franke),
            "nonpoly" => Ok(FieldKind::Nonpoly),
            other => Err(Error::Parse(format!("unknown field kind '{other}'"))),
        }
    }
}

/// A scalar field on the unit square, `scale · raw(x, y) + shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    kind: FieldKind,
    degree: usize,
    seed: u64,
    /// `(x power, y power, coefficient)`; polynomial kind only.
    coeffs: Vec<(usize, usize, f64)>,
    scale: f64,
    shift: f64,
}

impl Field {
    fn normalized(kind: FieldKind, degree: usize, seed: u64, coeffs: Vec<(usize, usize, f64)>) -> Self {
        let mut f = Field {
            kind,
            degree,
            seed,
            coeffs,
            scale: 1.0,
            shift: 0.0,
        };
        let (lo, hi) = f.reference_range();
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            f.scale = 0.0;
            f.shift = FRAC_PI_2;
        } else {
            f.scale = PI / (hi - lo);
            f.shift = -lo * f.scale;
        }
        f
    }

    /// Min and max of the raw field over the reference grid.
    fn reference_range(&self) -> (f64, f64) {
        let g = linspace(REFERENCE_RESOLUTION);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &y in &g {
            for &x in &g {
                let v = self.raw_value(&Point2 { x, y });
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// Polynomial degree; 0 for the fixed fields except `linear` (1).
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn coefficients(&self) -> &[(usize, usize, f64)] {
        &self.coeffs
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Un-normalized field.
    pub fn raw_value(&self, p: &Point2) -> f64 {
        let (x, y) = (p.x, p.y);
        match self.kind {
            FieldKind::Polynomial => self
                .coeffs
                .iter()
                .map(|&(i, j, c)| c * x.powi(i as i32) * y.powi(j as i32))
                .sum(),
            FieldKind::Linear => x + 0.5 * y,
            FieldKind::Franke => {
                let bump = |cx: f64, cy: f64| (-8.0 * ((x - cx).powi(2) + (y - cy).powi(2))).exp();
                0.1 * (x + y) + bump(-0.4, -0.4) + bump(0.4, 0.4)
            }
            FieldKind::Nonpoly => (2.0 * x + y).exp().cos() * y.sin(),
        }
    }

    /// Normalized value without clamping. Off the reference grid this may
    /// leave `[0, π]` by a hair; polynomial fields stay exact polynomials.
    pub fn affine_value(&self, p: &Point2) -> f64 {
        self.scale * self.raw_value(p) + self.shift
    }

    /// Normalized value clamped onto `[0, π]`.
    pub fn value(&self, p: &Point2) -> Result<f64> {
        if !p.x.is_finite() || p.x.abs() > 1.0 + DOMAIN_TOL {
            return Err(Error::Domain { value: p.x, lo: -1.0, hi: 1.0 });
        }
        if !p.y.is_finite() || p.y.abs() > 1.0 + DOMAIN_TOL {
            return Err(Error::Domain { value: p.y, lo: -1.0, hi: 1.0 });
        }
        Ok(self.affine_value(p).clamp(0.0, PI))
    }
}

pub fn eval_field(field: &Field, points: &[Point2]) -> Result<Vec<f64>> {
    points.iter().map(|p| field.value(p)).collect()
}

/// Total-degree-`n` polynomial with i.i.d. uniform `[-1, 1]` coefficients.
///
/// A draw whose non-constant part vanishes on the reference grid is redrawn
/// from the next sub-stream of the same seed, up to ten times. Degree 0 is the
/// constant field at `π/2`.
pub fn random_polynomial_field(n: usize, seed: u64) -> Result<Field> {
    for attempt in 0..MAX_REDRAWS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let mut coeffs = Vec::with_capacity((n + 1) * (n + 2) / 2);
        for d in 0..=n {
            for i in (0..=d).rev() {
                coeffs.push((i, d - i, rng.random_range(-1.0..=1.0)));
            }
        }
        let f = Field::normalized(FieldKind::Polynomial, n, seed, coeffs);
        if n == 0 || f.scale != 0.0 {
            return Ok(f);
        }
    }
    Err(Error::DegenerateField { attempts: MAX_REDRAWS })
}

/// `x + 0.5 y`.
pub fn linear_field() -> Field {
    Field::normalized(FieldKind::Linear, 1, 0, Vec::new())
}

/// Weak linear background plus two Gaussian bumps centred at `±(0.4, 0.4)`.
pub fn franke_field() -> Field {
    Field::normalized(FieldKind::Franke, 0, 0, Vec::new())
}

/// `cos(exp(2x + y)) · sin(y)`.
pub fn nonpoly_field() -> Field {
    Field::normalized(FieldKind::Nonpoly, 0, 0, Vec::new())
}

/// Builds a field from its kind; `degree` and `seed` matter only for the
/// polynomial family.
pub fn make_field(kind: FieldKind, degree: usize, seed: u64) -> Result<Field> {
    Ok(match kind {
        FieldKind::Polynomial => random_polynomial_field(degree, seed)?,
        FieldKind::Linear => linear_field(),
        FieldKind::Franke => franke_field(),
        FieldKind::Nonpoly => nonpoly_field(),
    })
}
