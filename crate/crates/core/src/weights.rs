//! Dyadic weights: cube masses w(Q) through a per-level prefix pyramid,
//! A_p constant estimation, mass towers, and disjoint-cube families with
//! the mass sandwich Ĉ·τ < w(R) ≤ τ.
//!
//! The weight is piecewise constant on the finest cells; every cell mass is
//! the exact integral of the underlying density when a closed form exists
//! (constant and |x - c|^γ weights), so w(Q) is an exact sum at every level.

use crate::error::{Error, Result};
use crate::grid::{compensated_sum, DyadicCube, GridGeometry};

/// Fitted exponents and constants of the A_∞ sandwich
/// C¹(|A|/|Q|)^p̂ ≤ w(A)/w(Q) ≤ C²(|A|/|Q|)^δ̂ over nested dyadic pairs.
///
/// The exponents are the extreme parent/child log-slopes, which makes the
/// sandwich hold with C¹ = C² = 1 for every nested pair by chaining.
#[derive(Debug, Clone, Copy)]
pub struct Regularity {
    pub p_hat: f64,
    pub delta_hat: f64,
    pub c1: f64,
    pub c2: f64,
    /// Pairs with zero mass skipped during the fit (the sandwich cannot be
    /// guaranteed for such weights).
    pub skipped_zero_pairs: usize,
}

impl Regularity {
    /// Ĉ = C¹·2^(-d·p̂): the lower constant of the disjoint-cube selection.
    pub fn crossing_constant(&self, dim: usize) -> f64 {
        self.c1 * 2f64.powf(-(dim as f64) * self.p_hat)
    }
}

#[derive(Debug, Clone)]
pub struct DyadicWeight {
    geometry: GridGeometry,
    /// pyramid[li] holds cube masses at level `li - M`, coarsest first;
    /// pyramid.last() is the finest-cell mass vector.
    pyramid: Vec<Vec<f64>>,
    ap_exponent: f64,
    regularity: Regularity,
}

impl DyadicWeight {
    /// Build from exact per-cell masses (∫_cell w for the piecewise-constant
    /// model). Masses must be nonnegative and not all zero.
    pub fn from_cell_masses(
        geometry: GridGeometry,
        cell_mass: Vec<f64>,
        ap_exponent: f64,
    ) -> Result<Self> {
        if cell_mass.len() != geometry.num_cells() {
            return Err(Error::InvalidWeight(format!(
                "expected {} cell masses, got {}",
                geometry.num_cells(),
                cell_mass.len()
            )));
        }
        if cell_mass.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidWeight(
                "cell masses must be finite and >= 0".into(),
            ));
        }
        if cell_mass.iter().all(|m| *m == 0.0) {
            return Err(Error::InvalidWeight("weight is identically zero".into()));
        }
        let pyramid = build_pyramid(&geometry, cell_mass);
        let regularity = fit_regularity(&geometry, &pyramid);
        Ok(DyadicWeight {
            geometry,
            pyramid,
            ap_exponent,
            regularity,
        })
    }

    /// w ≡ 1: each cell mass equals the cell volume.
    pub fn constant(geometry: GridGeometry) -> Result<Self> {
        let mass = vec![geometry.cell_volume(); geometry.num_cells()];
        Self::from_cell_masses(geometry, mass, 2.0)
    }

    /// w(x) = |x_axis - center|^γ, γ > -1, integrated exactly per cell.
    /// In A_p for -1 < γ < p - 1.
    pub fn axis_power(
        geometry: GridGeometry,
        axis: usize,
        gamma: f64,
        center: f64,
        ap_exponent: f64,
    ) -> Result<Self> {
        if axis >= geometry.dim() {
            return Err(Error::InvalidWeight(format!("axis {axis} out of range")));
        }
        if !(gamma > -1.0) || !gamma.is_finite() {
            return Err(Error::InvalidWeight(format!(
                "gamma = {gamma} must be > -1"
            )));
        }
        // antiderivative of |u|^gamma
        let anti = |u: f64| u.signum() * u.abs().powf(gamma + 1.0) / (gamma + 1.0);
        let side = geometry.cells_per_side();
        let h = 2f64.powi(-geometry.finest_level());
        let line: Vec<f64> = (0..side)
            .map(|i| {
                let a = i as f64 * h - center;
                let b = (i + 1) as f64 * h - center;
                anti(b) - anti(a)
            })
            .collect();
        let cross = h.powi(geometry.dim() as i32 - 1);
        let mut mass = vec![0.0; geometry.num_cells()];
        for (idx, m) in mass.iter_mut().enumerate() {
            let c = geometry.cell_coords(idx);
            *m = line[c[axis]] * cross;
        }
        Self::from_cell_masses(geometry, mass, ap_exponent)
    }

    /// d = 2 product weight w(x, y) = w_x(x)·w_y(y) from per-axis cell-mass
    /// lines (each of length `cells_per_side`).
    pub fn product(
        geometry: GridGeometry,
        line_x: &[f64],
        line_y: &[f64],
        ap_exponent: f64,
    ) -> Result<Self> {
        if geometry.dim() != 2 {
            return Err(Error::InvalidWeight("product weight needs d = 2".into()));
        }
        let side = geometry.cells_per_side();
        if line_x.len() != side || line_y.len() != side {
            return Err(Error::InvalidWeight(
                "per-axis mass lines must match the grid side".into(),
            ));
        }
        let mut mass = vec![0.0; geometry.num_cells()];
        for (idx, m) in mass.iter_mut().enumerate() {
            let c = geometry.cell_coords(idx);
            *m = line_x[c[0]] * line_y[c[1]];
        }
        Self::from_cell_masses(geometry, mass, ap_exponent)
    }

    pub fn geometry(&self) -> GridGeometry {
        self.geometry
    }

    pub fn ap_exponent(&self) -> f64 {
        self.ap_exponent
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    pub fn cell_masses(&self) -> &[f64] {
        self.pyramid.last().unwrap()
    }

    pub fn total_mass(&self) -> f64 {
        self.pyramid[0][0]
    }

    /// Smallest strictly positive finest-cell mass.
    pub fn min_positive_cell_mass(&self) -> f64 {
        self.cell_masses()
            .iter()
            .copied()
            .filter(|m| *m > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// w(Q): O(1) lookup in the prefix pyramid.
    pub fn cube_mass(&self, q: &DyadicCube) -> Result<f64> {
        if !self.geometry.contains_cube(q) {
            return Err(Error::CubeOutsideDomain(q.to_string()));
        }
        Ok(self.cube_mass_unchecked(q))
    }

    pub(crate) fn cube_mass_unchecked(&self, q: &DyadicCube) -> f64 {
        let li = (q.level + self.geometry.domain_exponent()) as usize;
        let idx = self.cube_linear(q);
        self.pyramid[li][idx]
    }

    fn cube_linear(&self, q: &DyadicCube) -> usize {
        match self.geometry.dim() {
            1 => q.index[0] as usize,
            _ => {
                let side = self.geometry.cubes_per_side(q.level);
                q.index[1] as usize * side + q.index[0] as usize
            }
        }
    }

    /// Weight with density w^e (cellwise exact for the piecewise-constant
    /// model): new cell mass = (mass/vol)^e·vol.
    pub fn density_power(&self, e: f64, ap_exponent: f64) -> Result<DyadicWeight> {
        let vol = self.geometry.cell_volume();
        let mass: Vec<f64> = self
            .cell_masses()
            .iter()
            .map(|m| (m / vol).powf(e) * vol)
            .collect();
        DyadicWeight::from_cell_masses(self.geometry, mass, ap_exponent)
    }

    /// Dyadic A_p constant estimate: max over cubes with level in
    /// [-M, max_level] of (avg_Q w)·(avg_Q w^(-1/(p-1)))^(p-1). A lower
    /// bound for the true constant (dyadic cubes only, discretized density).
    pub fn ap_constant(&self, p: f64, max_level: i32) -> Result<f64> {
        if !(p > 1.0) {
            return Err(Error::InvalidParameter(format!("A_p needs p > 1, got {p}")));
        }
        let dual = self.dual_pyramid(-1.0 / (p - 1.0))?;
        let mut best = 0.0f64;
        let coarsest = self.geometry.coarsest_level();
        let top = max_level.min(self.geometry.finest_level());
        for level in coarsest..=top {
            let li = (level + self.geometry.domain_exponent()) as usize;
            let vol = 2f64.powi(-level * self.geometry.dim() as i32);
            for (m, dm) in self.pyramid[li].iter().zip(&dual[li]) {
                let prod = (m / vol) * (dm / vol).powf(p - 1.0);
                best = best.max(prod);
            }
        }
        Ok(best)
    }

    /// Dyadic A_1 constant estimate: max over cubes of (avg_Q w)·sup_Q(1/w).
    pub fn a1_constant(&self, max_level: i32) -> Result<f64> {
        let vol = self.geometry.cell_volume();
        for (cell, m) in self.cell_masses().iter().enumerate() {
            if *m == 0.0 {
                return Err(Error::ZeroMassCell { cell });
            }
        }
        let mut best = 0.0f64;
        let coarsest = self.geometry.coarsest_level();
        let top = max_level.min(self.geometry.finest_level());
        for level in coarsest..=top {
            for idx in 0..self.geometry.num_cubes(level) {
                let q = cube_from_linear(&self.geometry, level, idx);
                let qvol = q.volume();
                let avg = self.cube_mass_unchecked(&q) / qvol;
                let inv_sup = self
                    .geometry
                    .cells_of_cube(&q)
                    .into_iter()
                    .map(|c| vol / self.cell_masses()[c])
                    .fold(0.0f64, f64::max);
                best = best.max(avg * inv_sup);
            }
        }
        Ok(best)
    }

    fn dual_pyramid(&self, e: f64) -> Result<Vec<Vec<f64>>> {
        let vol = self.geometry.cell_volume();
        let mut dual_cells = Vec::with_capacity(self.geometry.num_cells());
        for (cell, m) in self.cell_masses().iter().enumerate() {
            if *m == 0.0 {
                return Err(Error::ZeroMassCell { cell });
            }
            dual_cells.push((m / vol).powf(e) * vol);
        }
        Ok(build_pyramid(&self.geometry, dual_cells))
    }

    /// Masses along the full tower of cubes through `base`: descending to the
    /// finest level (corner descendant) and ascending to the domain root.
    /// Returned finest-first. Verifies the regularity-consistent growth
    /// w(Q_k) ≥ (C²)⁻¹·2^(k·d·δ̂)·w(base) on the ascent.
    pub fn tower_limits(&self, base: &DyadicCube) -> Result<Vec<(i32, f64)>> {
        if !self.geometry.contains_cube(base) {
            return Err(Error::CubeOutsideDomain(base.to_string()));
        }
        let mut rows = Vec::new();
        // corner descendant chain below base
        let mut down = Vec::new();
        let mut q = *base;
        while q.level < self.geometry.finest_level() {
            let mut index = q.index;
            for a in index.iter_mut().take(q.dim) {
                *a *= 2;
            }
            q = DyadicCube::new(q.level + 1, index, q.dim);
            down.push(q);
        }
        for q in down.iter().rev() {
            rows.push((q.level, self.cube_mass_unchecked(q)));
        }
        // base and ancestors
        let mut q = *base;
        let base_mass = self.cube_mass_unchecked(&q);
        rows.push((q.level, base_mass));
        let mut k = 0u32;
        while q.level > self.geometry.coarsest_level() {
            q = q.parent();
            k += 1;
            let mass = self.cube_mass_unchecked(&q);
            let reg = self.regularity;
            let floor = base_mass
                * 2f64.powf(k as f64 * self.geometry.dim() as f64 * reg.delta_hat)
                / reg.c2;
            if mass < floor * (1.0 - 1e-12) {
                return Err(Error::InvalidWeight(format!(
                    "tower ascent at {q} below the fitted growth floor ({mass} < {floor})"
                )));
            }
            rows.push((q.level, mass));
        }
        Ok(rows)
    }

    /// N pairwise-disjoint dyadic cubes R with Ĉ·τ < w(R) ≤ τ, where
    /// Ĉ = C¹·2^(-d·p̂) comes from the fitted regularity record.
    ///
    /// Each pick brackets τ along a descending tower inside a region that is
    /// free of earlier picks (the crossing pair w(parent) > τ ≥ w(child)
    /// gives the lower bound). Free regions are searched systematically
    /// instead of the proof's sibling-of-the-hull walk, which needs room
    /// growing exponentially in N; errors report how many cubes were found.
    pub fn select_disjoint_cubes(
        &self,
        tau: f64,
        n: usize,
        max_level: i32,
    ) -> Result<Vec<DyadicCube>> {
        let found = self.select_disjoint_upto(tau, n, max_level)?;
        if found.len() < n {
            return Err(Error::DomainExhausted {
                found: found.len(),
                requested: n,
            });
        }
        Ok(found)
    }

    /// Like `select_disjoint_cubes` but returns the (possibly shorter)
    /// family instead of erroring when the domain runs out.
    pub fn select_disjoint_upto(
        &self,
        tau: f64,
        n: usize,
        max_level: i32,
    ) -> Result<Vec<DyadicCube>> {
        let min_mass = self.min_positive_cell_mass();
        let total = self.total_mass();
        if !(tau > 0.0) || tau < min_mass || tau > total {
            return Err(Error::TauOutOfRange {
                tau,
                min: min_mass,
                max: total,
            });
        }
        let c_hat = self.regularity.crossing_constant(self.geometry.dim());
        let mut picks: Vec<DyadicCube> = Vec::with_capacity(n);
        while picks.len() < n {
            match self.find_pick(&picks, tau, c_hat, max_level) {
                Some(q) => picks.push(q),
                None => break,
            }
        }
        Ok(picks)
    }

    /// Depth-first search for the next valid pick among cubes disjoint from
    /// all previous picks.
    fn find_pick(
        &self,
        picks: &[DyadicCube],
        tau: f64,
        c_hat: f64,
        max_level: i32,
    ) -> Option<DyadicCube> {
        let mut stack = vec![self.geometry.root_cube()];
        while let Some(q) = stack.pop() {
            if picks.iter().any(|p| p.contains(&q)) {
                continue;
            }
            let mass = self.cube_mass_unchecked(&q);
            if mass <= 0.0 {
                continue;
            }
            if picks.iter().any(|p| q.strictly_contains(p)) {
                // not free: recurse into children (nested-or-disjoint)
                if q.level < max_level {
                    let mut ch = q.children();
                    ch.reverse(); // keep lexicographic DFS order
                    stack.extend(ch);
                }
                continue;
            }
            // q is free of picks
            if mass > tau {
                if let Some(r) = self.descend_to_crossing(&q, tau, c_hat, max_level) {
                    return Some(r);
                }
                continue;
            }
            if mass > c_hat * tau {
                return Some(q);
            }
        }
        None
    }

    /// From a free cube with w > τ, descend to a parent/child crossing:
    /// w(parent) > τ and w(child) ≤ τ forces w(child) > Ĉ·τ by the fitted
    /// sandwich.
    fn descend_to_crossing(
        &self,
        top: &DyadicCube,
        tau: f64,
        c_hat: f64,
        max_level: i32,
    ) -> Option<DyadicCube> {
        let mut q = *top;
        loop {
            if q.level >= max_level {
                return None; // finest allowed level still above tau
            }
            let children = q.children();
            let masses: Vec<f64> = children
                .iter()
                .map(|c| self.cube_mass_unchecked(c))
                .collect();
            // best child at or below tau (largest margin over the floor)
            let mut best: Option<(usize, f64)> = None;
            for (i, m) in masses.iter().enumerate() {
                if *m <= tau && *m > c_hat * tau && best.is_none_or(|(_, bm)| *m > bm) {
                    best = Some((i, *m));
                }
            }
            if let Some((i, _)) = best {
                return Some(children[i]);
            }
            // all children above tau: follow the smallest one that stays above
            let mut next: Option<(usize, f64)> = None;
            for (i, m) in masses.iter().enumerate() {
                if *m > tau && next.is_none_or(|(_, nm)| *m < nm) {
                    next = Some((i, *m));
                }
            }
            match next {
                Some((i, _)) => q = children[i],
                None => return None, // children dropped below the floor
            }
        }
    }
}

fn build_pyramid(geometry: &GridGeometry, cells: Vec<f64>) -> Vec<Vec<f64>> {
    let coarsest = geometry.coarsest_level();
    let finest = geometry.finest_level();
    let n_levels = (finest - coarsest + 1) as usize;
    let mut pyramid: Vec<Vec<f64>> = vec![Vec::new(); n_levels];
    pyramid[n_levels - 1] = cells;
    for level in (coarsest..finest).rev() {
        let li = (level + geometry.domain_exponent()) as usize;
        let child = &pyramid[li + 1];
        let side = geometry.cubes_per_side(level);
        let n = geometry.num_cubes(level);
        let mut agg = vec![0.0; n];
        match geometry.dim() {
            1 => {
                for (k, a) in agg.iter_mut().enumerate() {
                    *a = child[2 * k] + child[2 * k + 1];
                }
            }
            _ => {
                let cside = 2 * side;
                for ky in 0..side {
                    for kx in 0..side {
                        let s = child[(2 * ky) * cside + 2 * kx]
                            + child[(2 * ky) * cside + 2 * kx + 1]
                            + child[(2 * ky + 1) * cside + 2 * kx]
                            + child[(2 * ky + 1) * cside + 2 * kx + 1];
                        agg[ky * side + kx] = s;
                    }
                }
            }
        }
        pyramid[li] = agg;
    }
    pyramid
}

pub(crate) fn cube_from_linear(geometry: &GridGeometry, level: i32, idx: usize) -> DyadicCube {
    match geometry.dim() {
        1 => DyadicCube::new(level, [idx as i64, 0], 1),
        _ => {
            let side = geometry.cubes_per_side(level);
            DyadicCube::new(level, [(idx % side) as i64, (idx / side) as i64], 2)
        }
    }
}

/// Extreme parent/child log-slopes of mass ratios. Chaining parent/child
/// steps extends the resulting sandwich (with constants 1) to every nested
/// dyadic pair.
fn fit_regularity(geometry: &GridGeometry, pyramid: &[Vec<f64>]) -> Regularity {
    let d = geometry.dim() as f64;
    let log_s = -(d * std::f64::consts::LN_2); // ln(|child|/|parent|)
    let mut p_hat = f64::NEG_INFINITY;
    let mut delta_hat = f64::INFINITY;
    let mut skipped = 0usize;
    for level in geometry.coarsest_level()..geometry.finest_level() {
        let li = (level + geometry.domain_exponent()) as usize;
        let parents = &pyramid[li];
        let children = &pyramid[li + 1];
        let side = geometry.cubes_per_side(level);
        for (pidx, pm) in parents.iter().enumerate() {
            let parent = match geometry.dim() {
                1 => cube_from_linear(geometry, level, pidx),
                _ => DyadicCube::new(level, [(pidx % side) as i64, (pidx / side) as i64], 2),
            };
            for child in parent.children() {
                let cidx = match geometry.dim() {
                    1 => child.index[0] as usize,
                    _ => {
                        child.index[1] as usize * geometry.cubes_per_side(level + 1)
                            + child.index[0] as usize
                    }
                };
                let cm = children[cidx];
                if *pm == 0.0 || cm == 0.0 {
                    skipped += 1;
                    continue;
                }
                let slope = (cm / pm).ln() / log_s;
                p_hat = p_hat.max(slope);
                delta_hat = delta_hat.min(slope);
            }
        }
    }
    if !p_hat.is_finite() {
        // single-level grid: no pairs to fit
        p_hat = d;
        delta_hat = d;
    }
    Regularity {
        p_hat,
        delta_hat,
        c1: 1.0,
        c2: 1.0,
        skipped_zero_pairs: skipped,
    }
}

/// Exact sum of masses over an arbitrary cell set (used by indicator norms).
pub fn mass_of_cells(weight: &DyadicWeight, cells: &[usize]) -> f64 {
    compensated_sum(cells.iter().map(|c| weight.cell_masses()[*c]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridGeometry;

    fn geom(d: usize, j: i32, m: i32) -> GridGeometry {
        GridGeometry::new(d, j, m).unwrap()
    }

    fn sqrt_weight(j: i32, m: i32) -> DyadicWeight {
        DyadicWeight::axis_power(geom(1, j, m), 0, 0.5, 0.0, 2.0).unwrap()
    }

    #[test]
    fn cube_mass_constant() {
        let w = DyadicWeight::constant(geom(1, 3, 2)).unwrap();
        let unit = DyadicCube::new(0, [1, 0], 1);
        assert_eq!(w.cube_mass(&unit).unwrap(), 1.0);
        for j in [-2, 0, 2, 3] {
            let q = DyadicCube::new(j, [0, 0], 1);
            assert!((w.cube_mass(&q).unwrap() - 2f64.powi(-j)).abs() < 1e-15);
        }
        let q_out = DyadicCube::new(0, [4, 0], 1);
        assert!(w.cube_mass(&q_out).is_err());

        let w2 = DyadicWeight::constant(geom(2, 2, 1)).unwrap();
        let q = DyadicCube::new(1, [1, 1], 2);
        assert!((w2.cube_mass(&q).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sqrt_weight_is_exact() {
        // cell masses are closed-form integrals, so w([0,1)) = 2/3 exactly
        for j in [4, 8] {
            let w = sqrt_weight(j, 2);
            let q = DyadicCube::new(0, [0, 0], 1);
            assert!(
                (w.cube_mass(&q).unwrap() - 2.0 / 3.0).abs() < 1e-12,
                "J = {j}"
            );
        }
    }

    #[test]
    fn tree_consistency() {
        let w = sqrt_weight(6, 2);
        let g = w.geometry();
        for level in g.coarsest_level()..g.finest_level() {
            for idx in 0..g.num_cubes(level) {
                let q = cube_from_linear(&g, level, idx);
                let sum: f64 = q.children().iter().map(|c| w.cube_mass(c).unwrap()).sum();
                assert_eq!(w.cube_mass(&q).unwrap(), sum, "exact sum at {q}");
            }
        }
    }

    #[test]
    fn tree_consistency_2d() {
        let g = geom(2, 3, 1);
        let mass: Vec<f64> = (0..g.num_cells()).map(|i| (i % 7) as f64 + 0.25).collect();
        let w = DyadicWeight::from_cell_masses(g, mass, 2.0).unwrap();
        for level in g.coarsest_level()..g.finest_level() {
            for idx in 0..g.num_cubes(level) {
                let q = cube_from_linear(&g, level, idx);
                let sum: f64 = q.children().iter().map(|c| w.cube_mass(c).unwrap()).sum();
                assert_eq!(w.cube_mass(&q).unwrap(), sum);
            }
        }
    }

    #[test]
    fn ap_constant_of_lebesgue_is_one() {
        let w = DyadicWeight::constant(geom(1, 5, 2)).unwrap();
        for p in [1.5, 2.0, 3.0] {
            assert!((w.ap_constant(p, 5).unwrap() - 1.0).abs() < 1e-12);
        }
        let w2 = DyadicWeight::constant(geom(2, 3, 1)).unwrap();
        assert!((w2.ap_constant(2.0, 3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ap_constant_sqrt_stable_under_refinement() {
        let a = sqrt_weight(6, 2).ap_constant(2.0, 6).unwrap();
        let b = sqrt_weight(9, 2).ap_constant(2.0, 9).unwrap();
        assert!(a.is_finite() && b.is_finite());
        assert!((a - b).abs() / b < 0.05, "J=6: {a}, J=9: {b}");
    }

    #[test]
    fn ap_constant_grows_for_concentrated_mass() {
        // unit point mass on a Lebesgue background: ever more singular as J grows
        let make = |j: i32| {
            let g = geom(1, j, 0);
            let mut mass = vec![g.cell_volume(); g.num_cells()];
            mass[0] = 1.0;
            DyadicWeight::from_cell_masses(g, mass, 2.0).unwrap()
        };
        let a4 = make(4).ap_constant(2.0, 4).unwrap();
        let a8 = make(8).ap_constant(2.0, 8).unwrap();
        assert!(a8 > 4.0 * a4, "A_p should grow with J: {a4} vs {a8}");
    }

    #[test]
    fn ap_constant_zero_cell_errors() {
        let g = geom(1, 2, 0);
        let mut mass = vec![0.25; g.num_cells()];
        mass[1] = 0.0;
        let w = DyadicWeight::from_cell_masses(g, mass, 2.0).unwrap();
        match w.ap_constant(2.0, 2) {
            Err(Error::ZeroMassCell { cell }) => assert_eq!(cell, 1),
            other => panic!("expected ZeroMassCell, got {other:?}"),
        }
    }

    #[test]
    fn tower_masses() {
        let w = DyadicWeight::constant(geom(1, 3, 3)).unwrap();
        let base = DyadicCube::new(0, [0, 0], 1);
        let rows = w.tower_limits(&base).unwrap();
        // finest-first: levels 3,2,1,0,-1,-2,-3
        assert_eq!(rows.first().unwrap().0, 3);
        assert_eq!(rows.last().unwrap().0, -3);
        for win in rows.windows(2) {
            assert!(win[0].1 <= win[1].1, "masses grow toward the root");
        }
        // w == 1: masses are 2^(-level)
        for (level, mass) in &rows {
            assert!((mass - 2f64.powi(-level)).abs() < 1e-12);
        }

        let ws = sqrt_weight(6, 3);
        let rows = ws.tower_limits(&DyadicCube::new(2, [1, 0], 1)).unwrap();
        for win in rows.windows(2) {
            assert!(
                win[0].1 < win[1].1,
                "strictly increasing ascent for |x|^1/2"
            );
        }
        // regularity-consistent growth along the ascent from the base
        let reg = ws.regularity();
        let base_idx = rows.iter().position(|(l, _)| *l == 2).unwrap();
        let (_, base_mass) = rows[base_idx];
        for (k, (_, mass)) in rows.iter().skip(base_idx).enumerate() {
            let bound = base_mass * 2f64.powf(k as f64 * reg.delta_hat) / reg.c2;
            assert!(*mass >= bound * (1.0 - 1e-12));
        }
    }

    #[test]
    fn select_disjoint_unit_intervals() {
        let w = DyadicWeight::constant(geom(1, 3, 3)).unwrap();
        let picks = w.select_disjoint_cubes(1.0, 4, 3).unwrap();
        assert_eq!(picks.len(), 4);
        for q in &picks {
            assert_eq!(q.level, 0);
            assert_eq!(w.cube_mass(q).unwrap(), 1.0);
        }
        for i in 0..picks.len() {
            for j in 0..i {
                assert!(picks[i].disjoint(&picks[j]));
            }
        }
    }

    #[test]
    fn select_disjoint_crossing() {
        let w = DyadicWeight::constant(geom(1, 3, 3)).unwrap();
        let c_hat = w.regularity().crossing_constant(1);
        assert!((c_hat - 0.5).abs() < 1e-12);
        let picks = w.select_disjoint_cubes(1.5, 2, 3).unwrap();
        for q in &picks {
            let m = w.cube_mass(q).unwrap();
            assert_eq!(m, 1.0);
            assert!(m > c_hat * 1.5 && m <= 1.5);
        }
    }

    #[test]
    fn select_disjoint_sqrt_weight_sandwich() {
        let w = sqrt_weight(8, 4);
        let c_hat = w.regularity().crossing_constant(1);
        let picks = w.select_disjoint_cubes(0.1, 8, 8).unwrap();
        assert_eq!(picks.len(), 8);
        for (i, q) in picks.iter().enumerate() {
            let m = w.cube_mass(q).unwrap();
            assert!(m > c_hat * 0.1 && m <= 0.1, "pick {i}: mass {m}");
            for p in picks.iter().take(i) {
                assert!(q.disjoint(p));
            }
        }
    }

    #[test]
    fn select_disjoint_dense_packing() {
        // 256 unit cubes in a domain of length 256
        let w = DyadicWeight::constant(geom(1, 1, 8)).unwrap();
        let picks = w.select_disjoint_cubes(1.0, 256, 1).unwrap();
        assert_eq!(picks.len(), 256);
    }

    #[test]
    fn select_disjoint_2d() {
        let w = DyadicWeight::constant(GridGeometry::new(2, 2, 2).unwrap()).unwrap();
        let c_hat = w.regularity().crossing_constant(2);
        let picks = w.select_disjoint_cubes(1.0, 4, 2).unwrap();
        assert_eq!(picks.len(), 4);
        for (i, q) in picks.iter().enumerate() {
            let m = w.cube_mass(q).unwrap();
            assert!(m > c_hat && m <= 1.0);
            for p in picks.iter().take(i) {
                assert!(q.disjoint(p));
            }
        }
    }

    #[test]
    fn select_disjoint_errors() {
        let w = DyadicWeight::constant(geom(1, 2, 1)).unwrap();
        assert!(matches!(
            w.select_disjoint_cubes(100.0, 1, 2),
            Err(Error::TauOutOfRange { .. })
        ));
        match w.select_disjoint_cubes(1.0, 50, 2) {
            Err(Error::DomainExhausted { found, requested }) => {
                assert_eq!(requested, 50);
                assert!(found >= 2);
            }
            other => panic!("expected DomainExhausted, got {other:?}"),
        }
    }

    #[test]
    fn regularity_exponents() {
        let w = DyadicWeight::constant(geom(1, 4, 2)).unwrap();
        let r = w.regularity();
        assert!((r.p_hat - 1.0).abs() < 1e-12);
        assert!((r.delta_hat - 1.0).abs() < 1e-12);

        let ws = sqrt_weight(6, 2);
        let rs = ws.regularity();
        // corner cell slope = gamma + 1 = 3/2
        assert!((rs.p_hat - 1.5).abs() < 1e-9, "p_hat = {}", rs.p_hat);
        assert!(rs.delta_hat <= 1.0 + 1e-12);
    }

    #[test]
    fn density_power_is_cellwise_exact() {
        let w = DyadicWeight::constant(geom(1, 3, 1)).unwrap();
        let u = w.density_power(0.5, 2.0).unwrap();
        for (m, um) in w.cell_masses().iter().zip(u.cell_masses()) {
            let vol = w.geometry().cell_volume();
            assert!((um - (m / vol).sqrt() * vol).abs() < 1e-15);
        }
    }
}
