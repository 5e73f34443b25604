//! Boxes, cell grids and grid-sampled functions in one or two dimensions.
//!
//! Points are stored as `[f64; 2]` with the second coordinate fixed at zero
//! in dimension one; the ambient dimension travels with the containing
//! object. Cells are indexed row-major with axis 0 fastest.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Point = [f64; 2];

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("dimension must be 1 or 2, got {0}")]
    BadDimension(usize),
    #[error("box must have upper > lower on every axis (axis {0}: {1} .. {2})")]
    EmptyBox(usize, f64, f64),
    #[error("grid resolution must be positive on every active axis")]
    ZeroResolution,
    #[error("grids do not match: {0}")]
    Mismatch(String),
    #[error("box is not aligned to the cell lattice of the parent grid")]
    NotCellAligned,
}

/// Axis-aligned box in dimension 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub dim: usize,
    pub lower: Point,
    pub upper: Point,
}

impl BoxDomain {
    pub fn new(dim: usize, lower: Point, upper: Point) -> Result<Self, GridError> {
        if dim != 1 && dim != 2 {
            return Err(GridError::BadDimension(dim));
        }
        for ax in 0..dim {
            if !(upper[ax] > lower[ax]) {
                return Err(GridError::EmptyBox(ax, lower[ax], upper[ax]));
            }
        }
        let mut lower = lower;
        let mut upper = upper;
        if dim == 1 {
            lower[1] = 0.0;
            upper[1] = 0.0;
        }
        Ok(Self { dim, lower, upper })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self, GridError> {
        Self::new(1, [a, 0.0], [b, 0.0])
    }

    pub fn rectangle(lower: [f64; 2], upper: [f64; 2]) -> Result<Self, GridError> {
        Self::new(2, lower, upper)
    }

    pub fn side(&self, ax: usize) -> f64 {
        self.upper[ax] - self.lower[ax]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|ax| self.side(ax)).product()
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..self.dim).all(|ax| p[ax] >= self.lower[ax] && p[ax] <= self.upper[ax])
    }

    /// Box grown by `pad` on every active axis.
    pub fn padded(&self, pad: f64) -> Result<Self, GridError> {
        let mut lower = self.lower;
        let mut upper = self.upper;
        for ax in 0..self.dim {
            lower[ax] -= pad;
            upper[ax] += pad;
        }
        Self::new(self.dim, lower, upper)
    }

    /// Euclidean distance from `inner` to the complement of `self`
    /// (the smallest face gap; zero if `inner` is not strictly inside).
    pub fn distance_to_complement(&self, inner: &BoxDomain) -> f64 {
        let mut d = f64::INFINITY;
        for ax in 0..self.dim {
            d = d.min(inner.lower[ax] - self.lower[ax]);
            d = d.min(self.upper[ax] - inner.upper[ax]);
        }
        d.max(0.0)
    }

    pub fn diameter(&self) -> f64 {
        (0..self.dim)
            .map(|ax| self.side(ax).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Uniform partition of a box into cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellGrid {
    pub domain: BoxDomain,
    pub n: [usize; 2],
}

impl CellGrid {
    pub fn new(domain: BoxDomain, n: [usize; 2]) -> Result<Self, GridError> {
        let mut n = n;
        if domain.dim == 1 {
            n[1] = 1;
        }
        for ax in 0..domain.dim {
            if n[ax] == 0 {
                return Err(GridError::ZeroResolution);
            }
        }
        Ok(Self { domain, n })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    pub fn cell_count(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn spacing(&self, ax: usize) -> f64 {
        self.domain.side(ax) / self.n[ax] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|ax| self.spacing(ax)).product()
    }

    pub fn center(&self, idx: usize) -> Point {
        let i = idx % self.n[0];
        let j = idx / self.n[0];
        let mut p = [0.0, 0.0];
        p[0] = self.domain.lower[0] + (i as f64 + 0.5) * self.spacing(0);
        if self.dim() == 2 {
            p[1] = self.domain.lower[1] + (j as f64 + 0.5) * self.spacing(1);
        }
        p
    }

    pub fn centers(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.cell_count()).map(|i| self.center(i))
    }

    /// Index of the cell containing `p`, clamped to the grid.
    pub fn locate(&self, p: &Point) -> usize {
        let mut multi = [0usize; 2];
        for ax in 0..self.dim() {
            let rel = (p[ax] - self.domain.lower[ax]) / self.spacing(ax);
            multi[ax] = (rel.floor().max(0.0) as usize).min(self.n[ax] - 1);
        }
        multi[1] * self.n[0] + multi[0]
    }

    /// Whether `sub` sits on this grid's cell lattice (all faces aligned
    /// to cell boundaries within a relative tolerance).
    pub fn is_cell_aligned(&self, sub: &BoxDomain) -> bool {
        if sub.dim != self.dim() {
            return false;
        }
        let tol = 1e-9;
        (0..self.dim()).all(|ax| {
            let h = self.spacing(ax);
            let lo = (sub.lower[ax] - self.domain.lower[ax]) / h;
            let hi = (sub.upper[ax] - self.domain.lower[ax]) / h;
            (lo - lo.round()).abs() < tol && (hi - hi.round()).abs() < tol
        })
    }
}

/// Cell-averaged function values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    pub grid: CellGrid,
    pub values: Vec<f64>,
}

impl GridFn {
    pub fn new(grid: CellGrid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.cell_count() {
            return Err(GridError::Mismatch(format!(
                "expected {} cell values, got {}",
                grid.cell_count(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Sample a pointwise function at cell centers (midpoint approximation
    /// of the cell average).
    pub fn from_fn(grid: CellGrid, f: impl Fn(&Point) -> f64) -> Self {
        let values = grid.centers().map(|p| f(&p)).collect();
        Self { grid, values }
    }

    pub fn indicator(grid: CellGrid, inside: &BoxDomain) -> Self {
        Self::from_fn(grid, |p| if inside.contains(p) { 1.0 } else { 0.0 })
    }

    /// Grid quadrature Σ f̄_j h^d.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Multilinear interpolation of cell-center values at `p`, clamped at
    /// the boundary half-cells.
    pub fn interpolate(&self, p: &Point) -> f64 {
        let g = &self.grid;
        let mut i0 = [0usize; 2];
        let mut w = [0.0f64; 2];
        for ax in 0..g.dim() {
            let h = g.spacing(ax);
            let rel = (p[ax] - g.domain.lower[ax]) / h - 0.5;
            let max_i = g.n[ax] - 1;
            let fl = rel.floor().clamp(0.0, max_i as f64);
            i0[ax] = fl as usize;
            w[ax] = (rel - fl).clamp(0.0, 1.0);
            if i0[ax] >= max_i {
                i0[ax] = max_i.saturating_sub(1);
                w[ax] = if max_i == 0 { 0.0 } else { 1.0 };
            }
        }
        if g.dim() == 1 {
            let a = self.values[i0[0]];
            let b = self.values[(i0[0] + 1).min(g.n[0] - 1)];
            a + w[0] * (b - a)
        } else {
            let nx = g.n[0];
            let i1 = (i0[0] + 1).min(nx - 1);
            let j1 = (i0[1] + 1).min(g.n[1] - 1);
            let v00 = self.values[i0[1] * nx + i0[0]];
            let v10 = self.values[i0[1] * nx + i1];
            let v01 = self.values[j1 * nx + i0[0]];
            let v11 = self.values[j1 * nx + i1];
            let a = v00 + w[0] * (v10 - v00);
            let b = v01 + w[0] * (v11 - v01);
            a + w[1] * (b - a)
        }
    }
}

/// A finite set of evaluation points (typically the FEM mesh nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    pub dim: usize,
    pub points: Vec<Point>,
}

impl EvalGrid {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self, GridError> {
        if dim != 1 && dim != 2 {
            return Err(GridError::BadDimension(dim));
        }
        Ok(Self { dim, points })
    }

    /// Uniformly spaced nodes on a box, `n + 1` per axis (tensor product in
    /// dimension two).
    pub fn uniform(domain: &BoxDomain, n: [usize; 2]) -> Result<Self, GridError> {
        let mut n = n;
        if domain.dim == 1 {
            n[1] = 0;
        }
        if n[0] == 0 && domain.dim == 1 {
            return Err(GridError::ZeroResolution);
        }
        let mut points = Vec::new();
        let hx = domain.side(0) / n[0] as f64;
        match domain.dim {
            1 => {
                for i in 0..=n[0] {
                    points.push([domain.lower[0] + i as f64 * hx, 0.0]);
                }
            }
            _ => {
                if n[1] == 0 {
                    return Err(GridError::ZeroResolution);
                }
                let hy = domain.side(1) / n[1] as f64;
                for j in 0..=n[1] {
                    for i in 0..=n[0] {
                        points.push([
                            domain.lower[0] + i as f64 * hx,
                            domain.lower[1] + j as f64 * hy,
                        ]);
                    }
                }
            }
        }
        Ok(Self {
            dim: domain.dim,
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn hull(&self) -> Option<BoxDomain> {
        if self.points.is_empty() {
            return None;
        }
        let mut lower = [f64::INFINITY; 2];
        let mut upper = [f64::NEG_INFINITY; 2];
        for p in &self.points {
            for ax in 0..self.dim {
                lower[ax] = lower[ax].min(p[ax]);
                upper[ax] = upper[ax].max(p[ax]);
            }
        }
        if self.dim == 1 {
            lower[1] = 0.0;
            upper[1] = 0.0;
        }
        // A hull may be degenerate (single point); widen by nothing and
        // tolerate equality here.
        Some(BoxDomain {
            dim: self.dim,
            lower,
            upper,
        })
    }
}
