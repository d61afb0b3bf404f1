//! Haar (and optional periodized Daubechies) wavelet analysis/synthesis on
//! grid functions, the square function, and atom norms in L^Φ(w).
//!
//! All families run through one periodic orthonormal filter cascade; Haar is
//! the 2-tap case, for which every stage is support-local and exact on the
//! dyadic grid. Daubechies wraps periodically at the domain boundary.
//!
//! Wavelet coefficients are indexed by (dyadic cube, species) with species
//! l ∈ {1, …, 2^d - 1} and cube levels spanning [-M, J). The coarsest-level
//! scaling coefficient (the global average content) is carried alongside the
//! wavelet coefficients and is excluded from greedy selection: expansions are
//! homogeneous and the scaling part is an explicit remainder.

use crate::error::{Error, Result};
use crate::grid::{DyadicCube, GridFunction, GridGeometry};
use crate::weights::DyadicWeight;
use crate::young::YoungFunction;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Daubechies D4 analysis lowpass (exact closed form).
fn db2_filter() -> [f64; 4] {
    let s3 = 3f64.sqrt();
    let c = 1.0 / (4.0 * 2f64.sqrt());
    [
        (1.0 + s3) * c,
        (3.0 + s3) * c,
        (3.0 - s3) * c,
        (1.0 - s3) * c,
    ]
}

/// Daubechies D6 analysis lowpass.
const DB3_FILTER: [f64; 6] = [
    0.332_670_552_950_082_63,
    0.806_891_509_311_092_5,
    0.459_877_502_118_491_54,
    -0.135_011_020_010_254_58,
    -0.085_441_273_882_026_66,
    0.035_226_291_885_709_53,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveletFamily {
    Haar,
    /// Periodized Daubechies D_{2N}; N ∈ {2, 3}.
    Daubechies(usize),
}

impl WaveletFamily {
    pub fn parse(tag: &str) -> Result<Self> {
        match tag {
            "haar" => Ok(WaveletFamily::Haar),
            "daubechies:2" | "db2" => Ok(WaveletFamily::Daubechies(2)),
            "daubechies:3" | "db3" => Ok(WaveletFamily::Daubechies(3)),
            other => Err(Error::UnsupportedFamily(other.to_string())),
        }
    }

    fn lowpass(&self) -> Vec<f64> {
        match self {
            WaveletFamily::Haar => vec![SQRT_HALF, SQRT_HALF],
            WaveletFamily::Daubechies(2) => db2_filter().to_vec(),
            WaveletFamily::Daubechies(3) => DB3_FILTER.to_vec(),
            WaveletFamily::Daubechies(n) => unreachable!("unsupported order {n}"),
        }
    }

    fn highpass(lowpass: &[f64]) -> Vec<f64> {
        let l = lowpass.len();
        (0..l)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * lowpass[l - 1 - k]
            })
            .collect()
    }
}

impl std::fmt::Display for WaveletFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WaveletFamily::Haar => write!(f, "haar"),
            WaveletFamily::Daubechies(n) => write!(f, "daubechies:{n}"),
        }
    }
}

pub fn species_count(dim: usize) -> usize {
    (1 << dim) - 1
}

/// Wavelet coefficients of a grid function: per level, species-major blocks
/// of cube-position coefficients, plus the coarsest scaling coefficient.
#[derive(Debug, Clone)]
pub struct WaveletExpansion {
    family: WaveletFamily,
    geometry: GridGeometry,
    /// levels[level + M], level ∈ [-M, J): species-major, (2^d - 1)·n_level.
    levels: Vec<Vec<f64>>,
    scaling: f64,
}

impl WaveletExpansion {
    pub fn zeros(geometry: GridGeometry, family: WaveletFamily) -> Self {
        let sc = species_count(geometry.dim());
        let levels = (geometry.coarsest_level()..geometry.finest_level())
            .map(|l| vec![0.0; sc * geometry.num_cubes(l)])
            .collect();
        WaveletExpansion {
            family,
            geometry,
            levels,
            scaling: 0.0,
        }
    }

    pub fn family(&self) -> WaveletFamily {
        self.family
    }

    pub fn geometry(&self) -> GridGeometry {
        self.geometry
    }

    /// Coarsest-level scaling coefficient (global average content).
    pub fn scaling(&self) -> f64 {
        self.scaling
    }

    pub fn set_scaling(&mut self, v: f64) {
        self.scaling = v;
    }

    fn slot(&self, cube: &DyadicCube, species: usize) -> Result<(usize, usize)> {
        let sc = species_count(self.geometry.dim());
        if species == 0 || species > sc {
            return Err(Error::InvalidParameter(format!(
                "species {species} not in 1..={sc}"
            )));
        }
        if !self.geometry.contains_cube(cube) || cube.level >= self.geometry.finest_level() {
            return Err(Error::CubeOutsideDomain(cube.to_string()));
        }
        let li = (cube.level + self.geometry.domain_exponent()) as usize;
        let npos = self.geometry.num_cubes(cube.level);
        let pos = match self.geometry.dim() {
            1 => cube.index[0] as usize,
            _ => {
                cube.index[1] as usize * self.geometry.cubes_per_side(cube.level)
                    + cube.index[0] as usize
            }
        };
        Ok((li, (species - 1) * npos + pos))
    }

    pub fn coefficient(&self, cube: &DyadicCube, species: usize) -> Result<f64> {
        let (li, idx) = self.slot(cube, species)?;
        Ok(self.levels[li][idx])
    }

    pub fn set_coefficient(&mut self, cube: &DyadicCube, species: usize, value: f64) -> Result<()> {
        let (li, idx) = self.slot(cube, species)?;
        self.levels[li][idx] = value;
        Ok(())
    }

    /// Visit every (cube, species, coefficient).
    pub fn for_each(&self, mut f: impl FnMut(DyadicCube, usize, f64)) {
        let sc = species_count(self.geometry.dim());
        for level in self.geometry.coarsest_level()..self.geometry.finest_level() {
            let li = (level + self.geometry.domain_exponent()) as usize;
            let npos = self.geometry.num_cubes(level);
            let side = self.geometry.cubes_per_side(level);
            for species in 1..=sc {
                for pos in 0..npos {
                    let index = match self.geometry.dim() {
                        1 => [pos as i64, 0],
                        _ => [(pos % side) as i64, (pos / side) as i64],
                    };
                    let cube = DyadicCube::new(level, index, self.geometry.dim());
                    f(cube, species, self.levels[li][(species - 1) * npos + pos]);
                }
            }
        }
    }

    /// Nonzero (cube, species, coefficient) triples.
    pub fn nonzero(&self) -> Vec<(DyadicCube, usize, f64)> {
        let mut out = Vec::new();
        self.for_each(|q, l, v| {
            if v != 0.0 {
                out.push((q, l, v));
            }
        });
        out
    }

    pub fn num_nonzero(&self) -> usize {
        self.levels
            .iter()
            .map(|l| l.iter().filter(|v| **v != 0.0).count())
            .sum()
    }

    /// Sum of squared wavelet coefficients (scaling excluded).
    pub fn energy(&self) -> f64 {
        self.levels
            .iter()
            .flat_map(|l| l.iter())
            .map(|v| v * v)
            .sum()
    }

    /// Square function at a finest cell: (Σ_{Q ∋ cell} s_{Q,l}²/|Q|)^(1/2),
    /// walking the tower of cubes containing the cell. Scaling excluded.
    pub fn square_function(&self, cell: usize) -> f64 {
        let sc = species_count(self.geometry.dim());
        let mut acc = 0.0;
        for level in self.geometry.coarsest_level()..self.geometry.finest_level() {
            let li = (level + self.geometry.domain_exponent()) as usize;
            let npos = self.geometry.num_cubes(level);
            let q = self.geometry.cube_containing_cell(cell, level);
            let pos = match self.geometry.dim() {
                1 => q.index[0] as usize,
                _ => {
                    q.index[1] as usize * self.geometry.cubes_per_side(level) + q.index[0] as usize
                }
            };
            let inv_vol = 2f64.powi(level * self.geometry.dim() as i32);
            for species in 1..=sc {
                let s = self.levels[li][(species - 1) * npos + pos];
                acc += s * s * inv_vol;
            }
        }
        acc.sqrt()
    }

    /// Square function as a grid function.
    pub fn square_function_grid(&self) -> GridFunction {
        let vals: Vec<f64> = (0..self.geometry.num_cells())
            .map(|c| self.square_function(c))
            .collect();
        GridFunction::new(self.geometry, vals).unwrap()
    }
}

/// Wavelet coefficients of `f`; exact for Haar, periodized for Daubechies.
pub fn analyze(f: &GridFunction, family: WaveletFamily) -> Result<WaveletExpansion> {
    let lo = family.lowpass();
    let hi = WaveletFamily::highpass(&lo);
    let g = f.geometry();
    let mut out = WaveletExpansion::zeros(g, family);
    let d = g.dim();
    // initial scaling coefficients at level J
    let factor = 2f64.powi(-g.finest_level() * d as i32).sqrt();
    let mut scal: Vec<f64> = f.values().iter().map(|v| v * factor).collect();
    for level in (g.coarsest_level()..g.finest_level()).rev() {
        let li = (level + g.domain_exponent()) as usize;
        match d {
            1 => {
                let (next, detail) = forward_1d(&scal, &lo, &hi);
                out.levels[li] = detail;
                scal = next;
            }
            _ => {
                let m = 2 * g.cubes_per_side(level);
                let (next, details) = forward_2d(&scal, m, &lo, &hi);
                out.levels[li] = details;
                scal = next;
            }
        }
    }
    out.scaling = scal[0];
    Ok(out)
}

/// Left inverse of `analyze`: rebuild the grid function.
pub fn synthesize(e: &WaveletExpansion) -> GridFunction {
    let lo = e.family.lowpass();
    let hi = WaveletFamily::highpass(&lo);
    let g = e.geometry;
    let d = g.dim();
    let mut scal = vec![e.scaling];
    for level in g.coarsest_level()..g.finest_level() {
        let li = (level + g.domain_exponent()) as usize;
        scal = match d {
            1 => inverse_1d(&scal, &e.levels[li], &lo, &hi),
            _ => {
                let m = 2 * g.cubes_per_side(level);
                inverse_2d(&scal, &e.levels[li], m, &lo, &hi)
            }
        };
    }
    let factor = 2f64.powi(g.finest_level() * d as i32).sqrt();
    let values: Vec<f64> = scal.iter().map(|v| v * factor).collect();
    GridFunction::new(g, values).unwrap()
}

fn forward_1d(x: &[f64], lo: &[f64], hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = x.len();
    let half = m / 2;
    let mut s = vec![0.0; half];
    let mut dft = vec![0.0; half];
    for i in 0..half {
        let mut a = 0.0;
        let mut b = 0.0;
        for (k, (&l, &h)) in lo.iter().zip(hi).enumerate() {
            let v = x[(2 * i + k) % m];
            a += l * v;
            b += h * v;
        }
        s[i] = a;
        dft[i] = b;
    }
    (s, dft)
}

fn inverse_1d(s: &[f64], detail: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let half = s.len();
    let m = 2 * half;
    let mut x = vec![0.0; m];
    for i in 0..half {
        for (k, (&l, &h)) in lo.iter().zip(hi).enumerate() {
            x[(2 * i + k) % m] += s[i] * l + detail[i] * h;
        }
    }
    x
}

/// One separable 2-d stage: rows (x) then columns (y). Species bit 0 marks
/// high-pass in x, bit 1 high-pass in y.
fn forward_2d(x: &[f64], m: usize, lo: &[f64], hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let half = m / 2;
    // rows
    let mut lo_x = vec![0.0; half * m];
    let mut hi_x = vec![0.0; half * m];
    for y in 0..m {
        let row: Vec<f64> = (0..m).map(|i| x[y * m + i]).collect();
        let (s, dft) = forward_1d(&row, lo, hi);
        for i in 0..half {
            lo_x[y * half + i] = s[i];
            hi_x[y * half + i] = dft[i];
        }
    }
    // columns
    let npos = half * half;
    let mut ll = vec![0.0; npos];
    let mut details = vec![0.0; 3 * npos];
    for xcol in 0..half {
        let col_lo: Vec<f64> = (0..m).map(|y| lo_x[y * half + xcol]).collect();
        let col_hi: Vec<f64> = (0..m).map(|y| hi_x[y * half + xcol]).collect();
        let (s_ll, d_lh) = forward_1d(&col_lo, lo, hi);
        let (s_hl, d_hh) = forward_1d(&col_hi, lo, hi);
        for y in 0..half {
            let pos = y * half + xcol;
            ll[pos] = s_ll[y];
            details[pos] = s_hl[y]; // species 1: high x, low y
            details[npos + pos] = d_lh[y]; // species 2: low x, high y
            details[2 * npos + pos] = d_hh[y]; // species 3: high both
        }
    }
    (ll, details)
}

fn inverse_2d(ll: &[f64], details: &[f64], m: usize, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let half = m / 2;
    let npos = half * half;
    // columns first (inverse order of forward)
    let mut lo_x = vec![0.0; half * m];
    let mut hi_x = vec![0.0; half * m];
    for xcol in 0..half {
        let s_ll: Vec<f64> = (0..half).map(|y| ll[y * half + xcol]).collect();
        let s_hl: Vec<f64> = (0..half).map(|y| details[y * half + xcol]).collect();
        let d_lh: Vec<f64> = (0..half).map(|y| details[npos + y * half + xcol]).collect();
        let d_hh: Vec<f64> = (0..half)
            .map(|y| details[2 * npos + y * half + xcol])
            .collect();
        let col_lo = inverse_1d(&s_ll, &d_lh, lo, hi);
        let col_hi = inverse_1d(&s_hl, &d_hh, lo, hi);
        for y in 0..m {
            lo_x[y * half + xcol] = col_lo[y];
            hi_x[y * half + xcol] = col_hi[y];
        }
    }
    let mut x = vec![0.0; m * m];
    for y in 0..m {
        let s: Vec<f64> = (0..half).map(|i| lo_x[y * half + i]).collect();
        let dft: Vec<f64> = (0..half).map(|i| hi_x[y * half + i]).collect();
        let row = inverse_1d(&s, &dft, lo, hi);
        x[y * m..(y + 1) * m].copy_from_slice(&row);
    }
    x
}

/// Square-function surrogate atom norm ‖ψ_Q‖_{L^Φ(w)} ≈ φ(w(Q))/|Q|^(1/2);
/// exact for Haar atoms.
pub fn atom_norm(weight: &DyadicWeight, young: &YoungFunction, cube: &DyadicCube) -> Result<f64> {
    let mass = weight.cube_mass(cube)?;
    if !(mass > 0.0) {
        return Err(Error::InvalidWeight(format!("zero-mass cube {cube}")));
    }
    Ok(young.fundamental(mass)? / cube.volume().sqrt())
}

/// Synthesize a single normalized basis atom ψ_{Q,l} on the grid.
pub fn atom_on_grid(
    geometry: GridGeometry,
    family: WaveletFamily,
    cube: &DyadicCube,
    species: usize,
) -> Result<GridFunction> {
    let mut e = WaveletExpansion::zeros(geometry, family);
    e.set_coefficient(cube, species, 1.0)?;
    Ok(synthesize(&e))
}
