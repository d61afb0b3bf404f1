//! Finite dyadic grids: geometry, cubes, and piecewise-constant functions.
//!
//! The domain is `[0, 2^M)^d` with `d ∈ {1, 2}`. Levels run from `-M` (the
//! whole domain as a single cube) down to `J` (cells of side `2^-J`). A cube
//! at level `j` with index `k` is `2^-j([0,1)^d + k)`.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 2;

/// Shape shared by weights and grid functions: dimension, finest level `J`
/// and domain exponent `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridGeometry {
    dim: usize,
    finest_level: i32,
    domain_exponent: i32,
}

impl GridGeometry {
    pub fn new(dim: usize, finest_level: i32, domain_exponent: i32) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGeometry(format!(
                "dimension {dim} not in {{1, 2}}"
            )));
        }
        if domain_exponent < 0 {
            return Err(Error::InvalidGeometry(format!(
                "domain exponent M = {domain_exponent} must be >= 0"
            )));
        }
        if finest_level < 0 {
            return Err(Error::InvalidGeometry(format!(
                "finest level J = {finest_level} must be >= 0"
            )));
        }
        let total = (finest_level + domain_exponent) as u32 * dim as u32;
        if total > 26 {
            return Err(Error::InvalidGeometry(format!(
                "(J + M) * d = {total} exceeds the supported grid size (2^26 cells)"
            )));
        }
        Ok(GridGeometry {
            dim,
            finest_level,
            domain_exponent,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// J: finest cells have side 2^-J.
    pub fn finest_level(&self) -> i32 {
        self.finest_level
    }

    /// M: the domain is [0, 2^M)^d.
    pub fn domain_exponent(&self) -> i32 {
        self.domain_exponent
    }

    /// Coarsest level; the whole domain is the unique cube at this level.
    pub fn coarsest_level(&self) -> i32 {
        -self.domain_exponent
    }

    /// Number of finest cells along one axis.
    pub fn cells_per_side(&self) -> usize {
        1usize << (self.finest_level + self.domain_exponent)
    }

    /// Total number of finest cells.
    pub fn num_cells(&self) -> usize {
        self.cells_per_side().pow(self.dim as u32)
    }

    /// Volume of one finest cell, 2^(-J d).
    pub fn cell_volume(&self) -> f64 {
        2f64.powi(-self.finest_level * self.dim as i32)
    }

    /// Cubes along one axis at `level`.
    pub fn cubes_per_side(&self, level: i32) -> usize {
        1usize << (level + self.domain_exponent)
    }

    /// Number of cubes at `level`.
    pub fn num_cubes(&self, level: i32) -> usize {
        self.cubes_per_side(level).pow(self.dim as u32)
    }

    pub fn contains_level(&self, level: i32) -> bool {
        level >= self.coarsest_level() && level <= self.finest_level
    }

    /// The whole domain as a cube.
    pub fn root_cube(&self) -> DyadicCube {
        DyadicCube {
            level: self.coarsest_level(),
            index: [0, 0],
            dim: self.dim,
        }
    }

    pub fn contains_cube(&self, q: &DyadicCube) -> bool {
        if q.dim != self.dim || !self.contains_level(q.level) {
            return false;
        }
        let side = self.cubes_per_side(q.level) as i64;
        (0..self.dim).all(|a| q.index[a] >= 0 && q.index[a] < side)
    }

    /// Linear index of a finest cell from per-axis indices (x fastest).
    pub fn cell_linear(&self, ix: &[usize]) -> usize {
        match self.dim {
            1 => ix[0],
            _ => ix[1] * self.cells_per_side() + ix[0],
        }
    }

    /// Per-axis indices of a finest cell from its linear index.
    pub fn cell_coords(&self, linear: usize) -> [usize; MAX_DIM] {
        match self.dim {
            1 => [linear, 0],
            _ => {
                let side = self.cells_per_side();
                [linear % side, linear / side]
            }
        }
    }

    /// Cube of `level` containing the finest cell `linear`.
    pub fn cube_containing_cell(&self, linear: usize, level: i32) -> DyadicCube {
        let shift = (self.finest_level - level) as u32;
        let c = self.cell_coords(linear);
        let mut index = [0i64; MAX_DIM];
        for a in 0..self.dim {
            index[a] = (c[a] >> shift) as i64;
        }
        DyadicCube {
            level,
            index,
            dim: self.dim,
        }
    }

    /// Linear indices of the finest cells covered by `q`, in row-major order.
    pub fn cells_of_cube(&self, q: &DyadicCube) -> Vec<usize> {
        let shift = (self.finest_level - q.level) as u32;
        let span = 1usize << shift;
        match self.dim {
            1 => {
                let x0 = (q.index[0] as usize) << shift;
                (x0..x0 + span).collect()
            }
            _ => {
                let x0 = (q.index[0] as usize) << shift;
                let y0 = (q.index[1] as usize) << shift;
                let mut out = Vec::with_capacity(span * span);
                for iy in y0..y0 + span {
                    for ix in x0..x0 + span {
                        out.push(self.cell_linear(&[ix, iy]));
                    }
                }
                out
            }
        }
    }

    /// Number of finest cells covered by a cube at `level`.
    pub fn cells_in_cube(&self, level: i32) -> usize {
        1usize << ((self.finest_level - level) as u32 * self.dim as u32)
    }

    /// Midpoint coordinates of a finest cell.
    pub fn cell_midpoint(&self, linear: usize) -> [f64; MAX_DIM] {
        let c = self.cell_coords(linear);
        let h = 2f64.powi(-self.finest_level);
        let mut out = [0.0; MAX_DIM];
        for a in 0..self.dim {
            out[a] = (c[a] as f64 + 0.5) * h;
        }
        out
    }

    /// Per-axis interval `[a, b)` of a finest cell along `axis`.
    pub fn cell_interval(&self, linear: usize, axis: usize) -> (f64, f64) {
        let c = self.cell_coords(linear);
        let h = 2f64.powi(-self.finest_level);
        (c[axis] as f64 * h, (c[axis] as f64 + 1.0) * h)
    }
}

/// Dyadic cube `2^-j([0,1)^d + k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCube {
    pub level: i32,
    pub index: [i64; MAX_DIM],
    pub dim: usize,
}

impl DyadicCube {
    pub fn new(level: i32, index: [i64; MAX_DIM], dim: usize) -> Self {
        DyadicCube { level, index, dim }
    }

    /// |Q| = 2^(-level * d).
    pub fn volume(&self) -> f64 {
        2f64.powi(-self.level * self.dim as i32)
    }

    /// Side length 2^(-level).
    pub fn side(&self) -> f64 {
        2f64.powi(-self.level)
    }

    pub fn parent(&self) -> DyadicCube {
        let mut index = [0i64; MAX_DIM];
        for a in 0..self.dim {
            index[a] = self.index[a] >> 1;
        }
        DyadicCube {
            level: self.level - 1,
            index,
            dim: self.dim,
        }
    }

    /// The 2^d children one level finer.
    pub fn children(&self) -> Vec<DyadicCube> {
        let mut out = Vec::with_capacity(1 << self.dim);
        for bits in 0..(1u32 << self.dim) {
            let mut index = [0i64; MAX_DIM];
            for a in 0..self.dim {
                index[a] = 2 * self.index[a] + ((bits >> a) & 1) as i64;
            }
            out.push(DyadicCube {
                level: self.level + 1,
                index,
                dim: self.dim,
            });
        }
        out
    }

    /// True when `self` contains `other` (possibly equal).
    pub fn contains(&self, other: &DyadicCube) -> bool {
        if other.level < self.level || self.dim != other.dim {
            return false;
        }
        let shift = (other.level - self.level) as u32;
        (0..self.dim).all(|a| (other.index[a] >> shift) == self.index[a])
    }

    pub fn strictly_contains(&self, other: &DyadicCube) -> bool {
        self.level < other.level && self.contains(other)
    }

    /// Dyadic cubes are either nested or disjoint.
    pub fn disjoint(&self, other: &DyadicCube) -> bool {
        !self.contains(other) && !other.contains(self)
    }
}

impl fmt::Display for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 1 {
            write!(f, "Q({}, {})", self.level, self.index[0])
        } else {
            write!(
                f,
                "Q({}, [{}, {}])",
                self.level, self.index[0], self.index[1]
            )
        }
    }
}

/// Piecewise-constant real function on the finest cells of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    geometry: GridGeometry,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(geometry: GridGeometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geometry.num_cells() {
            return Err(Error::InvalidGeometry(format!(
                "expected {} cell values, got {}",
                geometry.num_cells(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "grid function has non-finite values".into(),
            ));
        }
        Ok(GridFunction { geometry, values })
    }

    pub fn zeros(geometry: GridGeometry) -> Self {
        GridFunction {
            geometry,
            values: vec![0.0; geometry.num_cells()],
        }
    }

    pub fn constant(geometry: GridGeometry, c: f64) -> Self {
        GridFunction {
            geometry,
            values: vec![c; geometry.num_cells()],
        }
    }

    pub fn geometry(&self) -> GridGeometry {
        self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        GridFunction {
            geometry: self.geometry,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        assert_eq!(self.geometry, other.geometry);
        GridFunction {
            geometry: self.geometry,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        assert_eq!(self.geometry, other.geometry);
        GridFunction {
            geometry: self.geometry,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn abs(&self) -> GridFunction {
        GridFunction {
            geometry: self.geometry,
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }
}

/// Neumaier compensated summation.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Parse a grid-shaped file: header `d J M`, then 2^((J+M)d) whitespace
/// separated cell values in row-major order.
pub fn parse_grid_text(text: &str) -> Result<(GridGeometry, Vec<f64>)> {
    let mut tokens = text.split_whitespace();
    let mut header = [0i64; 3];
    for (i, name) in ["d", "J", "M"].iter().enumerate() {
        let tok = tokens.next().ok_or_else(|| {
            Error::InvalidParameter(format!("grid file missing header field {name}"))
        })?;
        header[i] = tok.parse().map_err(|_| {
            Error::InvalidParameter(format!("grid file header field {name} = {tok:?}"))
        })?;
    }
    let geometry = GridGeometry::new(header[0] as usize, header[1] as i32, header[2] as i32)?;
    let mut values = Vec::with_capacity(geometry.num_cells());
    for tok in tokens {
        let v: f64 = tok
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad cell value {tok:?} in grid file")))?;
        values.push(v);
    }
    if values.len() != geometry.num_cells() {
        return Err(Error::InvalidParameter(format!(
            "grid file has {} values, expected {}",
            values.len(),
            geometry.num_cells()
        )));
    }
    Ok((geometry, values))
}

pub fn read_grid_file(path: &str) -> Result<(GridGeometry, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_string(),
        source,
    })?;
    parse_grid_text(&text)
}

pub fn format_grid_text(geometry: &GridGeometry, values: &[f64]) -> String {
    let mut out = format!(
        "{} {} {}\n",
        geometry.dim(),
        geometry.finest_level(),
        geometry.domain_exponent()
    );
    for v in values {
        out.push_str(&format!("{v:.17e}\n"));
    }
    out
}
