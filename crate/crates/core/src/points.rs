//! Sensor and data-qubit geometries on the square `[-1, 1]²`.
//!
//! Padua points (first family) come from two independent constructions: sampling
//! the generating curve `γ(t) = (-cos((κ+1)t), -cos(κt))`, and masking the
//! Chebyshev–Gauss–Lobatto product grid `C_{κ+1} × C_{κ+2}`. Both return the
//! same set in the same lexicographic `(x, y)` order.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chebyshev::{cgl_points, CLAMP_TOL};
use crate::error::{Error, Result};

/// Two points closer than this are considered the same site.
pub const COINCIDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    /// Checked constructor: both coordinates must lie in the closed unit square
    /// (round-off up to `1e-12` is clamped away).
    pub fn new(x: f64, y: f64) -> Result<Self> {
        Ok(Point2 {
            x: crate::chebyshev::clamp_unit(x)?,
            y: crate::chebyshev::clamp_unit(y)?,
        })
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn in_square(&self) -> bool {
        self.x.abs() <= 1.0 + CLAMP_TOL && self.y.abs() <= 1.0 + CLAMP_TOL
    }

    /// Clamps both coordinates onto `[-1, 1]`.
    pub fn clamped(&self) -> Point2 {
        Point2 {
            x: self.x.clamp(-1.0, 1.0),
            y: self.y.clamp(-1.0, 1.0),
        }
    }
}

/// Lexicographic `(x, y)` order treating coordinates within
/// [`COINCIDENCE_TOL`] as equal.
pub fn canonical_cmp(a: &Point2, b: &Point2) -> Ordering {
    fn cmp_tol(u: f64, v: f64) -> Ordering {
        if (u - v).abs() <= COINCIDENCE_TOL {
            Ordering::Equal
        } else {
            u.total_cmp(&v)
        }
    }
    cmp_tol(a.x, b.x).then_with(|| cmp_tol(a.y, b.y))
}

/// Smallest pairwise distance, `f64::INFINITY` for fewer than two points.
pub fn min_pairwise_distance(points: &[Point2]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.min(p.distance(q));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointClass {
    Vertex,
    Boundary,
    Interior,
}

impl PointClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointClass::Vertex => "vertex",
            PointClass::Boundary => "boundary",
            PointClass::Interior => "interior",
        }
    }

    /// Multiplier of `1 / (κ(κ+1))` in the cubature weight.
    fn weight_factor(&self) -> f64 {
        match self {
            PointClass::Vertex => 0.5,
            PointClass::Boundary => 1.0,
            PointClass::Interior => 2.0,
        }
    }
}

impl fmt::Display for PointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Number of Padua points of order `κ`: `(κ+1)(κ+2)/2`.
pub fn padua_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Padua points of one order with their class and cubature weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PaduaSet {
    order: usize,
    points: Vec<Point2>,
    classes: Vec<PointClass>,
    weights: Vec<f64>,
}

impl PaduaSet {
    fn from_points(order: usize, mut points: Vec<Point2>) -> Result<Self> {
        points.sort_by(canonical_cmp);
        points.dedup_by(|a, b| a.distance(b) <= COINCIDENCE_TOL);
        if points.len() != padua_count(order) {
            return Err(Error::InvalidArgument(format!(
                "construction produced {} points for order {order}, expected {}",
                points.len(),
                padua_count(order)
            )));
        }
        let (classes, weights) = points
            .iter()
            .map(|p| classify_and_weight(p, order))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        Ok(PaduaSet {
            order,
            points,
            classes,
            weights,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn classes(&self) -> &[PointClass] {
        &self.classes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the node within [`COINCIDENCE_TOL`] of `p`.
    pub fn index_of(&self, p: &Point2) -> Option<usize> {
        self.points
            .iter()
            .position(|q| q.distance(p) <= COINCIDENCE_TOL)
    }
}

/// Samples the generating curve at `t = (jκ + j'(κ+1))π / (κ(κ+1))`,
/// `j, j' ≥ 0`, `j + j' ≤ κ`.
pub fn padua_points_curve(order: usize) -> Result<PaduaSet> {
    if order == 0 {
        return Err(Error::InvalidArgument("Padua order must be >= 1".into()));
    }
    let k = order as f64;
    let mut points = Vec::with_capacity(padua_count(order));
    for j in 0..=order {
        for jp in 0..=(order - j) {
            let t = (j * order + jp * (order + 1)) as f64 * PI / (k * (k + 1.0));
            points.push(Point2 {
                x: -((k + 1.0) * t).cos(),
                y: -(k * t).cos(),
            });
        }
    }
    PaduaSet::from_points(order, points)
}

/// Every-other-point mask over the flattened `C_{κ+1} × C_{κ+2}` meshgrid.
///
/// The flat mask is reshaped `(κ+1) × (κ+2)` for odd `κ`; for even `κ` it is
/// reshaped `(κ+2) × (κ+1)` and transposed.
pub fn padua_mask(order: usize) -> Vec<Vec<bool>> {
    let (rows, cols) = (order + 1, order + 2);
    let flat: Vec<bool> = (0..rows * cols).map(|i| i % 2 == 0).collect();
    if order % 2 == 1 {
        (0..rows)
            .map(|r| flat[r * cols..(r + 1) * cols].to_vec())
            .collect()
    } else {
        // (κ+2)×(κ+1) reshape, then transpose: entry (r, s) = flat[s·(κ+1) + r]
        (0..rows)
            .map(|r| (0..cols).map(|s| flat[s * rows + r]).collect())
            .collect()
    }
}

pub fn padua_points_grid(order: usize) -> Result<PaduaSet> {
    if order == 0 {
        return Err(Error::InvalidArgument("Padua order must be >= 1".into()));
    }
    let cx = cgl_points(order)?;
    let cy = cgl_points(order + 1)?;
    let mask = padua_mask(order);
    let mut points = Vec::with_capacity(padua_count(order));
    for (r, &x) in cx.values().iter().enumerate() {
        for (s, &y) in cy.values().iter().enumerate() {
            if mask[r][s] {
                points.push(Point2 { x, y });
            }
        }
    }
    PaduaSet::from_points(order, points)
}

/// Class and cubature weight of a Padua point.
///
/// The class counts coordinates on the square boundary (two: vertex, one:
/// boundary, none: interior); the weight is `factor / (κ(κ+1))` with factor
/// 1/2, 1 or 2 respectively. Fails if `p` is not a Padua point of order `κ`.
pub fn classify_and_weight(p: &Point2, order: usize) -> Result<(PointClass, f64)> {
    if order == 0 {
        return Err(Error::InvalidArgument("Padua order must be >= 1".into()));
    }
    let not_padua = || Error::NotPaduaPoint {
        x: p.x,
        y: p.y,
        order,
    };
    let r = cgl_points(order)?
        .position(p.x, COINCIDENCE_TOL)
        .ok_or_else(not_padua)?;
    let s = cgl_points(order + 1)?
        .position(p.y, COINCIDENCE_TOL)
        .ok_or_else(not_padua)?;
    if (r + s) % 2 != 0 {
        return Err(not_padua());
    }
    let on_edge = |c: f64| ((c.abs() - 1.0).abs() <= COINCIDENCE_TOL) as u8;
    let class = match on_edge(p.x) + on_edge(p.y) {
        2 => PointClass::Vertex,
        1 => PointClass::Boundary,
        _ => PointClass::Interior,
    };
    let k = order as f64;
    Ok((class, class.weight_factor() / (k * (k + 1.0))))
}

/// Equispaced `rows × cols` grid spanning the square, row-major with rows
/// running along `y` and columns along `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataGrid {
    rows: usize,
    cols: usize,
    points: Vec<Point2>,
}

impl DataGrid {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn at(&self, row: usize, col: usize) -> Point2 {
        self.points[self.index(row, col)]
    }
}

/// `n` equispaced abscissae from -1 to 1 inclusive.
pub fn linspace(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    1.0
                } else {
                    -1.0 + 2.0 * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

pub fn data_grid(rows: usize, cols: usize) -> Result<DataGrid> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidArgument(format!(
            "data grid must be at least 2×2, got {rows}×{cols}"
        )));
    }
    let ys = linspace(rows);
    let xs = linspace(cols);
    let points = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| Point2 { x, y }))
        .collect();
    Ok(DataGrid { rows, cols, points })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SensorLayout {
    Padua { order: usize },
    Regular { d: usize, remove_overlaps: bool },
    Standard { orientation: u8 },
}

/// A set of sensor-qubit positions and the layout that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorGrid {
    pub layout: SensorLayout,
    pub points: Vec<Point2>,
}

impl SensorGrid {
    pub fn padua(order: usize) -> Result<Self> {
        Ok(SensorGrid {
            layout: SensorLayout::Padua { order },
            points: padua_points_curve(order)?.points().to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `d × d` equispaced sensors over the square, optionally dropping any that
/// coincide with a data-qubit.
pub fn regular_sensor_grid(d: usize, data: &[Point2], remove_overlaps: bool) -> Result<SensorGrid> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "regular sensor grid needs d >= 2, got {d}"
        )));
    }
    let axis = linspace(d);
    let points = axis
        .iter()
        .flat_map(|&y| axis.iter().map(move |&x| Point2 { x, y }))
        .filter(|s| {
            !remove_overlaps || data.iter().all(|q| q.distance(s) > COINCIDENCE_TOL)
        })
        .collect();
    Ok(SensorGrid {
        layout: SensorLayout::Regular { d, remove_overlaps },
        points,
    })
}

/// The 9-sensor local neighbourhood layout on a 5×5 data grid.
///
/// Sensors are ordered: four 2×2 block centres (own 4 data-qubits each), two
/// pair midpoints along the leftover row, two along the leftover column (own 2
/// each), and the vertex sensor at the leftover row/column crossing (owns none).
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodAssignment {
    orientation: u8,
    sensors: Vec<Point2>,
    owned: Vec<Vec<usize>>,
    data_len: usize,
}

impl NeighborhoodAssignment {
    pub fn orientation(&self) -> u8 {
        self.orientation
    }

    pub fn sensors(&self) -> &[Point2] {
        &self.sensors
    }

    /// Data-qubit indices owned by each sensor.
    pub fn owned(&self) -> &[Vec<usize>] {
        &self.owned
    }

    /// Owning sensor of every data-qubit, `None` if unassigned.
    pub fn owner_of(&self) -> Vec<Option<usize>> {
        let mut owner = vec![None; self.data_len];
        for (s, list) in self.owned.iter().enumerate() {
            for &q in list {
                owner[q] = Some(s);
            }
        }
        owner
    }

    pub fn unassigned(&self) -> Vec<usize> {
        self.owner_of()
            .iter()
            .enumerate()
            .filter_map(|(i, o)| o.is_none().then_some(i))
            .collect()
    }

    pub fn sensor_grid(&self) -> SensorGrid {
        SensorGrid {
            layout: SensorLayout::Standard {
                orientation: self.orientation,
            },
            points: self.sensors.clone(),
        }
    }
}

fn centroid(points: &[Point2]) -> Point2 {
    let n = points.len() as f64;
    Point2 {
        x: points.iter().map(|p| p.x).sum::<f64>() / n,
        y: points.iter().map(|p| p.y).sum::<f64>() / n,
    }
}

/// Orientation `o` anchors the 4×4 block sub-grid at a corner:
/// 0 → (-1,-1), 1 → (+1,-1), 2 → (+1,+1), 3 → (-1,+1).
pub fn standard_assignment(data: &DataGrid, orientation: u8) -> Result<NeighborhoodAssignment> {
    if data.rows() != 5 || data.cols() != 5 {
        return Err(Error::InvalidArgument(format!(
            "standard assignment needs a 5×5 data grid, got {}×{}",
            data.rows(),
            data.cols()
        )));
    }
    if orientation > 3 {
        return Err(Error::InvalidArgument(format!(
            "orientation must be 0..=3, got {orientation}"
        )));
    }
    let anchored_left = matches!(orientation, 0 | 3);
    let anchored_bottom = matches!(orientation, 0 | 1);
    let (c0, odd_col) = if anchored_left { (0, 4) } else { (1, 0) };
    let (r0, odd_row) = if anchored_bottom { (0, 4) } else { (1, 0) };

    let mut sensors = Vec::with_capacity(9);
    let mut owned = Vec::with_capacity(9);
    let mut push = |members: Vec<(usize, usize)>| {
        let pts: Vec<Point2> = members.iter().map(|&(r, c)| data.at(r, c)).collect();
        sensors.push(centroid(&pts));
        owned.push(members.iter().map(|&(r, c)| data.index(r, c)).collect::<Vec<_>>());
    };
    for br in 0..2 {
        for bc in 0..2 {
            let (r, c) = (r0 + 2 * br, c0 + 2 * bc);
            push(vec![(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)]);
        }
    }
    for bc in 0..2 {
        let c = c0 + 2 * bc;
        push(vec![(odd_row, c), (odd_row, c + 1)]);
    }
    for br in 0..2 {
        let r = r0 + 2 * br;
        push(vec![(r, odd_col), (r + 1, odd_col)]);
    }
    sensors.push(data.at(odd_row, odd_col));
    owned.push(Vec::new());

    Ok(NeighborhoodAssignment {
        orientation,
        sensors,
        owned,
        data_len: data.points().len(),
    })
}
