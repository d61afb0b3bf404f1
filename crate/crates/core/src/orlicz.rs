//! Luxemburg norm evaluation on grid functions against a dyadic weight.
//!
//! ‖f‖ = inf{λ > 0 : G(λ) ≤ 1} with G(λ) = Σ_cells Φ(|f|/λ)·mass. G is
//! continuous and strictly decreasing where positive, so a bracketed
//! bisection on the modular pins λ* with |G(λ*) - 1| ≤ 1e-10. The modular is
//! accumulated with compensated summation.

use crate::error::{Error, Result};
use crate::grid::{compensated_sum, GridFunction};
use crate::weights::{mass_of_cells, DyadicWeight};
use crate::young::{FundamentalProfile, YoungFunction};

/// Tolerance on the modular G(λ), not on λ: near-flat stretches of φ make a
/// λ-tolerance misleading.
const MODULAR_TOL: f64 = 1e-10;
const MAX_ITER: usize = 500;

/// ‖f‖_{L^Φ(w)} via bisection with bracket doubling; 0 for f ≡ 0.
pub fn luxemburg_norm(
    f: &GridFunction,
    weight: &DyadicWeight,
    young: &YoungFunction,
) -> Result<f64> {
    if f.geometry() != weight.geometry() {
        return Err(Error::InvalidGeometry(
            "function and weight grids differ".into(),
        ));
    }
    let pairs: Vec<(f64, f64)> = f
        .values()
        .iter()
        .zip(weight.cell_masses())
        .filter(|(v, m)| **v != 0.0 && **m > 0.0)
        .map(|(v, m)| (v.abs(), *m))
        .collect();
    luxemburg_of_pairs(&pairs, young)
}

/// Shared solver over (|value|, mass) pairs.
pub(crate) fn luxemburg_of_pairs(pairs: &[(f64, f64)], young: &YoungFunction) -> Result<f64> {
    if pairs.is_empty() {
        return Ok(0.0);
    }
    let modular = |lambda: f64| -> f64 {
        compensated_sum(pairs.iter().map(|(v, m)| young.eval(v / lambda) * m))
    };

    // bracket: start at max|f| so the arguments of Phi start at <= 1
    let mut hi = pairs.iter().map(|(v, _)| *v).fold(0.0f64, f64::max);
    let mut g_hi = modular(hi);
    let mut iter = 0usize;
    while g_hi > 1.0 {
        hi *= 2.0;
        g_hi = modular(hi);
        iter += 1;
        if iter > MAX_ITER {
            return Err(Error::NormSolverFailed(
                "no upper bracket for the modular".into(),
            ));
        }
    }
    if (g_hi - 1.0).abs() <= MODULAR_TOL {
        return Ok(hi);
    }
    let mut lo = hi;
    let mut g_lo = g_hi;
    while g_lo < 1.0 {
        lo *= 0.5;
        g_lo = modular(lo);
        iter += 1;
        if iter > MAX_ITER {
            return Err(Error::NormSolverFailed(
                "no lower bracket for the modular".into(),
            ));
        }
    }
    if (g_lo - 1.0).abs() <= MODULAR_TOL {
        return Ok(lo);
    }
    // bisect on λ until the modular hits 1 within tolerance
    let mut best = hi;
    let mut best_err = (g_hi - 1.0).abs();
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = modular(mid);
        let err = (g - 1.0).abs();
        if err < best_err {
            best = mid;
            best_err = err;
        }
        if err <= MODULAR_TOL {
            return Ok(mid);
        }
        if g > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best_err <= 1e-7 {
        Ok(best)
    } else {
        Err(Error::NormSolverFailed(format!(
            "modular residual {best_err:.3e} after {MAX_ITER} iterations; malformed Young function?"
        )))
    }
}

/// ‖χ_E‖_{L^Φ(w)} = 1/Φ⁻¹(1/w(E)) = φ(w(E)), E a set of finest cells.
pub fn indicator_norm(
    weight: &DyadicWeight,
    young: &YoungFunction,
    cells: &[usize],
) -> Result<f64> {
    if cells.is_empty() {
        return Err(Error::InvalidParameter(
            "indicator over an empty cell set".into(),
        ));
    }
    let mass = mass_of_cells(weight, cells);
    if !(mass > 0.0) {
        return Err(Error::InvalidWeight("indicator set has zero mass".into()));
    }
    young.fundamental(mass)
}

/// A weighted Orlicz space L^Φ(w) on a fixed grid: the weight, the Young
/// function, and its cached fundamental profile. Construction rejects
/// trivial Boyd indices.
#[derive(Debug)]
pub struct OrliczSpace {
    weight: DyadicWeight,
    profile: FundamentalProfile,
}

impl OrliczSpace {
    pub fn new(weight: DyadicWeight, young: YoungFunction) -> Result<Self> {
        let profile = young.profile()?;
        profile.ensure_nontrivial()?;
        Ok(OrliczSpace { weight, profile })
    }

    pub fn weight(&self) -> &DyadicWeight {
        &self.weight
    }

    pub fn young(&self) -> &YoungFunction {
        self.profile.young()
    }

    pub fn profile(&self) -> &FundamentalProfile {
        &self.profile
    }

    pub fn norm(&self, f: &GridFunction) -> Result<f64> {
        luxemburg_norm(f, &self.weight, self.profile.young())
    }

    /// Same value as `norm` but via the closed form (Σ|f|^p w)^(1/p) when
    /// the Young function is a pure power; used by the σ oracles, which
    /// evaluate thousands of residual norms.
    pub fn norm_fast(&self, f: &GridFunction) -> Result<f64> {
        if let crate::young::YoungKind::Power { p } = self.profile.young().kind() {
            let p = *p;
            let sum = compensated_sum(
                f.values()
                    .iter()
                    .zip(self.weight.cell_masses())
                    .filter(|(v, m)| **v != 0.0 && **m > 0.0)
                    .map(|(v, m)| v.abs().powf(p) * m),
            );
            return Ok(sum.powf(1.0 / p));
        }
        self.norm(f)
    }

    pub fn indicator_norm(&self, cells: &[usize]) -> Result<f64> {
        indicator_norm(&self.weight, self.profile.young(), cells)
    }
}
