//! Brick norms ‖1̃_Γ‖, shade/light/minimal decompositions, and empirical
//! democracy functions compared against h_φ^±.
//!
//! A family Γ is a finite set of (cube, species) pairs. The geometric
//! decomposition works on the underlying cube set with exact dyadic cell
//! arithmetic: for every finest cell the smallest Γ-cube containing it is
//! found by a tower walk, which yields Light(Q) cell counts, the minimal
//! cubes, and the shaded/lighted split.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{DyadicCube, GridGeometry};
use crate::orlicz::OrliczSpace;
use crate::wavelets::{atom_norm, species_count, synthesize, WaveletExpansion, WaveletFamily};

/// Finite set of (cube, species) indices.
#[derive(Debug, Clone, Default)]
pub struct CubeFamily {
    items: Vec<(DyadicCube, usize)>,
}

impl CubeFamily {
    pub fn new(mut items: Vec<(DyadicCube, usize)>) -> Self {
        items.sort();
        items.dedup();
        CubeFamily { items }
    }

    pub fn from_cubes(cubes: &[DyadicCube]) -> Self {
        Self::new(cubes.iter().map(|q| (*q, 1)).collect())
    }

    pub fn items(&self) -> &[(DyadicCube, usize)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Distinct cubes of the family.
    pub fn cubes(&self) -> Vec<DyadicCube> {
        let mut cubes: Vec<DyadicCube> = self.items.iter().map(|(q, _)| *q).collect();
        cubes.sort();
        cubes.dedup();
        cubes
    }

    /// Smallest Γ-cube containing the cell, if any.
    pub fn smallest_containing(&self, geometry: &GridGeometry, cell: usize) -> Option<DyadicCube> {
        let cubes = self.cubes();
        for level in (geometry.coarsest_level()..=geometry.finest_level()).rev() {
            let q = geometry.cube_containing_cell(cell, level);
            if cubes.binary_search(&q).is_ok() {
                return Some(q);
            }
        }
        None
    }
}

/// Shade/Light decomposition of a family, cell counts exact.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Γ_min: cubes with nonempty Light.
    pub minimal: Vec<DyadicCube>,
    /// Γ_L: |Light(Q)| ≥ |Q|/2^d.
    pub lighted: Vec<DyadicCube>,
    /// Γ_s = Γ \ Γ_L.
    pub shaded: Vec<DyadicCube>,
    /// |Light(Q)| in finest cells, per cube of Γ.
    pub light_cells: BTreeMap<DyadicCube, usize>,
    /// Cells covered by ∪Γ (= Σ light counts; the Light sets partition it).
    pub covered_cells: usize,
}

/// Exact decomposition by dyadic set arithmetic (cell counting).
pub fn decompose(family: &CubeFamily, geometry: &GridGeometry) -> Decomposition {
    let cubes = family.cubes();
    let mut light_cells: BTreeMap<DyadicCube, usize> = cubes.iter().map(|q| (*q, 0)).collect();
    let mut covered = 0usize;
    for cell in 0..geometry.num_cells() {
        if let Some(q) = family.smallest_containing(geometry, cell) {
            *light_cells.get_mut(&q).unwrap() += 1;
            covered += 1;
        }
    }
    let mut minimal = Vec::new();
    let mut lighted = Vec::new();
    let mut shaded = Vec::new();
    let dim_factor = 1usize << geometry.dim();
    for q in &cubes {
        let light = light_cells[q];
        if light > 0 {
            minimal.push(*q);
        }
        // lighted iff |Light(Q)| >= |Q|/2^d, exact in integers
        let cells_q = geometry.cells_in_cube(q.level);
        if light * dim_factor >= cells_q {
            lighted.push(*q);
        } else {
            shaded.push(*q);
        }
    }
    Decomposition {
        minimal,
        lighted,
        shaded,
        light_cells,
        covered_cells: covered,
    }
}

/// Both evaluations of the normalized brick: the Luxemburg norm of
/// Σ ψ_Q/‖ψ_Q‖ and the square-function surrogate
/// ‖(Σ_Γ χ_Q/φ(w(Q))²)^(1/2)‖.
#[derive(Debug, Clone, Copy)]
pub struct BrickNorms {
    pub luxemburg: f64,
    pub surrogate: f64,
}

pub fn brick_norm(
    family: &CubeFamily,
    space: &OrliczSpace,
    wavelet: WaveletFamily,
) -> Result<BrickNorms> {
    if family.is_empty() {
        return Err(Error::InvalidParameter("empty cube family".into()));
    }
    let geometry = space.weight().geometry();
    let mut e = WaveletExpansion::zeros(geometry, wavelet);
    for (q, l) in family.items() {
        let an = atom_norm(space.weight(), space.young(), q)?;
        e.set_coefficient(q, *l, 1.0 / an)?;
    }
    let luxemburg = space.norm(&synthesize(&e))?;

    // S_Γ(x)² = Σ_{(Q,l) ∋ x} 1/φ(w(Q))²
    let mut inv_phi2: BTreeMap<DyadicCube, f64> = BTreeMap::new();
    for (q, _) in family.items() {
        let phi = space.profile().phi(space.weight().cube_mass(q)?);
        *inv_phi2.entry(*q).or_insert(0.0) += 1.0 / (phi * phi);
    }
    let mut svals = vec![0.0f64; geometry.num_cells()];
    for (q, v) in &inv_phi2 {
        for cell in geometry.cells_of_cube(q) {
            svals[cell] += v;
        }
    }
    for v in svals.iter_mut() {
        *v = v.sqrt();
    }
    let surrogate = space.norm(&crate::grid::GridFunction::new(geometry, svals)?)?;
    Ok(BrickNorms {
        luxemburg,
        surrogate,
    })
}

/// Linearized square function at a cell: χ_{Q_x}/φ(w(Q_x)) with Q_x the
/// smallest Γ-cube containing the cell; 0 outside ∪Γ.
pub fn linearized_square(family: &CubeFamily, space: &OrliczSpace, cell: usize) -> Result<f64> {
    let geometry = space.weight().geometry();
    match family.smallest_containing(&geometry, cell) {
        None => Ok(0.0),
        Some(q) => {
            let phi = space.profile().phi(space.weight().cube_mass(&q)?);
            Ok(1.0 / phi)
        }
    }
}

/// Exact square function of the family (no linearization) at a cell.
pub fn family_square(family: &CubeFamily, space: &OrliczSpace, cell: usize) -> Result<f64> {
    let geometry = space.weight().geometry();
    let mut acc = 0.0;
    for (q, _) in family.items() {
        let cells = geometry.cells_of_cube(q);
        if cells.binary_search(&cell).is_ok() {
            let phi = space.profile().phi(space.weight().cube_mass(q)?);
            acc += 1.0 / (phi * phi);
        }
    }
    Ok(acc.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// Disjoint near-equal-mass families from the crossing constructor at a
    /// τ walking a log grid (trials 0 and 1 sit at the extremizers of
    /// φ(Nτ)/φ(τ)).
    Disjoint,
    /// Nested towers through a seeded base cell.
    Tower,
    /// Seeded random (cube, species) sets.
    Random,
}

impl Generator {
    pub fn tag(&self) -> &'static str {
        match self {
            Generator::Disjoint => "disjoint",
            Generator::Tower => "tower",
            Generator::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "disjoint" | "a" => Ok(Generator::Disjoint),
            "tower" | "b" => Ok(Generator::Tower),
            "random" | "c" => Ok(Generator::Random),
            other => Err(Error::InvalidParameter(format!(
                "unknown generator {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProbeRow {
    pub n: usize,
    pub generator: Generator,
    pub trial: usize,
    pub luxemburg: f64,
    pub surrogate: f64,
    pub h_minus: f64,
    pub h_plus: f64,
}

/// splitmix64: deterministic per-trial sub-seeds, order-independent.
fn sub_seed(master: u64, a: u64, b: u64, c: u64) -> u64 {
    let mut z = master ^ a.wrapping_mul(0x9E3779B97F4A7C15) ^ b.rotate_left(17) ^ c.rotate_left(40);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn gen_disjoint(
    space: &OrliczSpace,
    n: usize,
    trial: usize,
    tau_grid: &[f64],
) -> Result<Option<CubeFamily>> {
    let weight = space.weight();
    let profile = space.profile();
    let max_level = weight.geometry().finest_level() - 1;
    // feasible taus with their phi ratios
    let mut feasible: Vec<(f64, f64)> = Vec::new();
    for &tau in tau_grid {
        if weight.select_disjoint_upto(tau, n, max_level)?.len() == n {
            feasible.push((tau, profile.phi(n as f64 * tau) / profile.phi(tau)));
        }
    }
    if feasible.is_empty() {
        return Ok(None);
    }
    let pick = match trial {
        0 => {
            // extremize upward: the h+ witness
            feasible
                .iter()
                .cloned()
                .fold(feasible[0], |a, b| if b.1 > a.1 { b } else { a })
                .0
        }
        1 => {
            feasible
                .iter()
                .cloned()
                .fold(feasible[0], |a, b| if b.1 < a.1 { b } else { a })
                .0
        }
        t => feasible[(t - 2) % feasible.len()].0,
    };
    let cubes = weight.select_disjoint_cubes(pick, n, max_level)?;
    Ok(Some(CubeFamily::from_cubes(&cubes)))
}

fn gen_tower(geometry: &GridGeometry, n: usize, seed: u64) -> Option<CubeFamily> {
    use rand::prelude::*;
    let levels_available = (geometry.finest_level() - geometry.coarsest_level()) as usize;
    if n > levels_available {
        return None;
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let cell = rng.gen_range(0..geometry.num_cells());
    let top = geometry.finest_level() - 1;
    let cubes: Vec<DyadicCube> = (0..n)
        .map(|k| geometry.cube_containing_cell(cell, top - k as i32))
        .collect();
    Some(CubeFamily::from_cubes(&cubes))
}

fn gen_random(geometry: &GridGeometry, n: usize, seed: u64) -> Option<CubeFamily> {
    use rand::prelude::*;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let sc = species_count(geometry.dim());
    let mut items: Vec<(DyadicCube, usize)> = Vec::with_capacity(n);
    let mut guard = 0usize;
    while items.len() < n {
        guard += 1;
        if guard > 100 * n + 1000 {
            return None; // grid too small for n distinct slots
        }
        let level = rng.gen_range(geometry.coarsest_level()..geometry.finest_level());
        let side = geometry.cubes_per_side(level) as i64;
        let index = match geometry.dim() {
            1 => [rng.gen_range(0..side), 0],
            _ => [rng.gen_range(0..side), rng.gen_range(0..side)],
        };
        let q = DyadicCube::new(level, index, geometry.dim());
        let l = rng.gen_range(1..=sc);
        if !items.contains(&(q, l)) {
            items.push((q, l));
        }
    }
    Some(CubeFamily::new(items))
}

/// Evaluate brick norms over the three family generators for each N; rows
/// are deterministic given the seed and independent of execution order.
pub fn democracy_probe(
    space: &OrliczSpace,
    wavelet: WaveletFamily,
    n_list: &[usize],
    trials: usize,
    seed: u64,
    generators: &[Generator],
) -> Result<Vec<ProbeRow>> {
    let weight = space.weight();
    let lo = weight.min_positive_cell_mass();
    let hi = weight.total_mass();
    let tau_grid: Vec<f64> = (0..32)
        .map(|i| lo * (hi / lo).powf(i as f64 / 31.0))
        .collect();

    let mut specs: Vec<(usize, Generator, usize)> = Vec::new();
    for &n in n_list {
        for &g in generators {
            for t in 0..trials {
                specs.push((n, g, t));
            }
        }
    }
    let rows: Vec<Option<ProbeRow>> = specs
        .par_iter()
        .map(|&(n, g, t)| -> Result<Option<ProbeRow>> {
            let geometry = space.weight().geometry();
            let fam = match g {
                Generator::Disjoint => gen_disjoint(space, n, t, &tau_grid)?,
                Generator::Tower => gen_tower(&geometry, n, sub_seed(seed, n as u64, 1, t as u64)),
                Generator::Random => {
                    gen_random(&geometry, n, sub_seed(seed, n as u64, 2, t as u64))
                }
            };
            let fam = match fam {
                Some(f) if f.len() == n => f,
                _ => return Ok(None),
            };
            let norms = brick_norm(&fam, space, wavelet)?;
            Ok(Some(ProbeRow {
                n,
                generator: g,
                trial: t,
                luxemburg: norms.luxemburg,
                surrogate: norms.surrogate,
                h_minus: space.profile().h_minus_int(n),
                h_plus: space.profile().h_plus_int(n),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}
