//! Greedy algorithm G_N in L^Φ(w), N-term error σ_N with oracles, and
//! approximation-space norms.
//!
//! Coefficients are ranked by atom-weighted size ‖s_Q ψ_Q‖ = |s_Q|·‖ψ_Q‖
//! with a deterministic tie-break (level, index, species). σ_N in
//! non-Hilbert norms is approximated from above: exhaustive subset search
//! with per-coordinate re-optimization under a 20-coefficient cap, and a
//! support-restricted search (original coefficient values) that enumerates
//! exactly when the subset count is small and otherwise minimizes over
//! ranking candidates refined by windowed exchange around the greedy cut.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{DyadicCube, GridFunction};
use crate::lorentz::{lorentz_norm, CoefSequence, EtaWeight};
use crate::orlicz::OrliczSpace;
use crate::wavelets::{atom_norm, atom_on_grid, synthesize, WaveletExpansion};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMode {
    /// Min over ≤N-subsets with coefficients re-optimized by coordinate
    /// descent; requires ≤ 20 nonzero coefficients. Exact for unweighted L².
    Exhaustive,
    /// Min over keep-sets from the expansion's own support with original
    /// coefficient values.
    Support,
}

#[derive(Debug, Clone, Copy)]
pub struct RankedSlot {
    pub cube: DyadicCube,
    pub species: usize,
    pub coef: f64,
    /// |coef| · ‖ψ_Q‖ in the ambient space.
    pub weighted_size: f64,
}

/// An expansion together with the greedy ordering of its nonzero slots.
#[derive(Debug, Clone)]
pub struct RankedExpansion {
    expansion: WaveletExpansion,
    slots: Vec<RankedSlot>,
}

impl RankedExpansion {
    pub fn new(expansion: WaveletExpansion, space: &OrliczSpace) -> Result<Self> {
        let mut slots = Vec::new();
        let mut err: Option<Error> = None;
        expansion.for_each(|cube, species, coef| {
            if coef != 0.0 && err.is_none() {
                match atom_norm(space.weight(), space.young(), &cube) {
                    Ok(an) => slots.push(RankedSlot {
                        cube,
                        species,
                        coef,
                        weighted_size: coef.abs() * an,
                    }),
                    Err(e) => err = Some(e),
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        // non-increasing sizes; ties broken by (level asc, index lex, species asc)
        slots.sort_by(|a, b| {
            b.weighted_size
                .partial_cmp(&a.weighted_size)
                .unwrap()
                .then_with(|| a.cube.level.cmp(&b.cube.level))
                .then_with(|| a.cube.index.cmp(&b.cube.index))
                .then_with(|| a.species.cmp(&b.species))
        });
        Ok(RankedExpansion { expansion, slots })
    }

    pub fn expansion(&self) -> &WaveletExpansion {
        &self.expansion
    }

    pub fn slots(&self) -> &[RankedSlot] {
        &self.slots
    }

    pub fn num_nonzero(&self) -> usize {
        self.slots.len()
    }

    /// G_N: the expansion keeping exactly the top-N ranked coefficients.
    /// The scaling remainder is excluded (homogeneous expansions).
    pub fn greedy_step(&self, n: usize) -> WaveletExpansion {
        let mut out = WaveletExpansion::zeros(self.expansion.geometry(), self.expansion.family());
        for slot in self.slots.iter().take(n) {
            out.set_coefficient(&slot.cube, slot.species, slot.coef)
                .unwrap();
        }
        out
    }

    /// Wavelet part of f - G_N(f); the scaling content is reported
    /// separately by `scaling_remainder`.
    pub fn residual(&self, n: usize) -> WaveletExpansion {
        let mut out = WaveletExpansion::zeros(self.expansion.geometry(), self.expansion.family());
        for slot in self.slots.iter().skip(n) {
            out.set_coefficient(&slot.cube, slot.species, slot.coef)
                .unwrap();
        }
        out
    }

    pub fn scaling_remainder(&self) -> f64 {
        self.expansion.scaling()
    }

    /// ‖f - G_N(f)‖_{L^Φ(w)} over the wavelet part.
    pub fn greedy_error(&self, n: usize, space: &OrliczSpace) -> Result<f64> {
        space.norm(&synthesize(&self.residual(n)))
    }

    /// Atom-weighted coefficient sizes, ranked.
    pub fn size_sequence(&self) -> CoefSequence {
        CoefSequence::new(self.slots.iter().map(|s| s.weighted_size).collect())
    }
}

/// Dense atom values per slot, shared by the σ oracles.
struct SlotAtoms {
    grids: Vec<Vec<f64>>,
}

impl SlotAtoms {
    fn build(ranked: &RankedExpansion) -> Result<Self> {
        let g = ranked.expansion.geometry();
        let fam = ranked.expansion.family();
        let grids = ranked
            .slots
            .iter()
            .map(|s| atom_on_grid(g, fam, &s.cube, s.species).map(|f| f.values().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(SlotAtoms { grids })
    }
}

/// Shared state for repeated σ_N queries against one expansion: the
/// synthesized wavelet part and the per-slot atom grids.
pub struct SigmaSolver<'a> {
    ranked: &'a RankedExpansion,
    space: &'a OrliczSpace,
    atoms: SlotAtoms,
    base: GridFunction,
}

impl<'a> SigmaSolver<'a> {
    pub fn new(ranked: &'a RankedExpansion, space: &'a OrliczSpace) -> Result<Self> {
        let atoms = SlotAtoms::build(ranked)?;
        let base = synthesize(&ranked.residual(0));
        Ok(SigmaSolver {
            ranked,
            space,
            atoms,
            base,
        })
    }

    pub fn sigma_n(&self, n: usize, mode: SigmaMode) -> Result<f64> {
        let nnz = self.ranked.num_nonzero();
        if n == 0 {
            return self.space.norm_fast(&self.base);
        }
        if n >= nnz {
            return Ok(0.0);
        }
        match mode {
            SigmaMode::Exhaustive => self.sigma_exhaustive(n),
            SigmaMode::Support => self.sigma_support(n),
        }
    }

    fn residual_norm_for_keep(&self, keep: &[usize]) -> Result<f64> {
        let mut res = self.base.values().to_vec();
        for &i in keep {
            let c = self.ranked.slots[i].coef;
            for (r, a) in res.iter_mut().zip(&self.atoms.grids[i]) {
                *r -= c * a;
            }
        }
        let g = self.space.weight().geometry();
        self.space.norm_fast(&GridFunction::new(g, res)?)
    }
}

/// σ_N oracle; see `SigmaMode` for the two searches. Both return upper
/// bounds on the true σ_N (exact where thresholding is optimal).
pub fn sigma_n_oracle(
    ranked: &RankedExpansion,
    n: usize,
    space: &OrliczSpace,
    mode: SigmaMode,
) -> Result<f64> {
    SigmaSolver::new(ranked, space)?.sigma_n(n, mode)
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0f64;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// All k-subsets of 0..n in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

impl SigmaSolver<'_> {
    fn sigma_exhaustive(&self, n: usize) -> Result<f64> {
        let nnz = self.ranked.num_nonzero();
        if nnz > 20 {
            return Err(Error::OracleTooLarge(nnz));
        }
        let k = n.min(nnz);
        let all = subsets(nnz, k);
        let best = all
            .par_iter()
            .map(|keep| {
                optimize_subset(
                    self.base.values(),
                    &self.atoms,
                    self.ranked.slots(),
                    keep,
                    self.space,
                )
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        Ok(best)
    }
}

/// Coordinate descent on the kept coefficients: golden-section line search
/// per coordinate, up to 32 sweeps with early exit.
fn optimize_subset(
    base: &[f64],
    atoms: &SlotAtoms,
    slots: &[RankedSlot],
    keep: &[usize],
    space: &OrliczSpace,
) -> Result<f64> {
    let g = space.weight().geometry();
    let mut coefs: Vec<f64> = keep.iter().map(|&i| slots[i].coef).collect();
    let mut res: Vec<f64> = base.to_vec();
    for (j, &i) in keep.iter().enumerate() {
        for (r, a) in res.iter_mut().zip(&atoms.grids[i]) {
            *r -= coefs[j] * a;
        }
    }
    let norm_of =
        |res: &[f64]| -> Result<f64> { space.norm_fast(&GridFunction::new(g, res.to_vec())?) };
    let mut value = norm_of(&res)?;
    let scale = slots
        .iter()
        .map(|s| s.coef.abs())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    for _sweep in 0..32 {
        let mut moved = 0.0f64;
        for (j, &i) in keep.iter().enumerate() {
            let atom = &atoms.grids[i];
            let c0 = coefs[j];
            // evaluate the residual norm as a function of the coefficient
            let eval = |c: f64| -> Result<f64> {
                let tmp: Vec<f64> = res
                    .iter()
                    .zip(atom)
                    .map(|(r, a)| r - (c - c0) * a)
                    .collect();
                norm_of(&tmp)
            };
            let (c_new, v_new) = golden_min(&eval, c0, scale, value)?;
            if v_new < value - 1e-14 * value.max(1.0) {
                for (r, a) in res.iter_mut().zip(atom) {
                    *r -= (c_new - c0) * a;
                }
                moved = moved.max((c_new - c0).abs());
                coefs[j] = c_new;
                value = v_new;
            }
        }
        if moved <= 1e-12 * scale {
            break;
        }
    }
    Ok(value)
}

/// Golden-section minimization of a convex 1-d function around c0.
fn golden_min(
    eval: &dyn Fn(f64) -> Result<f64>,
    c0: f64,
    scale: f64,
    v0: f64,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut span = scale.max(c0.abs());
    let mut a = c0 - span;
    let mut b = c0 + span;
    // expand while a boundary beats the center
    for _ in 0..8 {
        let va = eval(a)?;
        let vb = eval(b)?;
        if va < v0 || vb < v0 {
            span *= 2.0;
            a = c0 - span;
            b = c0 + span;
        } else {
            break;
        }
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    for _ in 0..40 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        }
        if (b - a).abs() <= 1e-10 * scale {
            break;
        }
    }
    let (c, v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if v < v0 {
        Ok((c, v))
    } else {
        Ok((c0, v0))
    }
}

const SUPPORT_ENUM_CAP: f64 = 10_000.0;
const EXCHANGE_WINDOW: usize = 4;
const EXCHANGE_PASSES: usize = 2;

impl SigmaSolver<'_> {
    fn sigma_support(&self, n: usize) -> Result<f64> {
        let nnz = self.ranked.num_nonzero();
        let k = n.min(nnz);
        let slots = self.ranked.slots();

        if binomial(nnz, k) <= SUPPORT_ENUM_CAP {
            let all = subsets(nnz, k);
            let best = all
                .par_iter()
                .map(|keep| self.residual_norm_for_keep(keep))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            return Ok(best);
        }

        // candidate keep-sets: greedy ranking and plain |coefficient| ranking
        let greedy_keep: Vec<usize> = (0..k).collect();
        let mut by_coef: Vec<usize> = (0..nnz).collect();
        by_coef.sort_by(|&a, &b| {
            slots[b]
                .coef
                .abs()
                .partial_cmp(&slots[a].coef.abs())
                .unwrap()
        });
        let coef_keep: Vec<usize> = {
            let mut v: Vec<usize> = by_coef[..k].to_vec();
            v.sort_unstable();
            v
        };

        let mut best_set = greedy_keep.clone();
        let mut best = self.residual_norm_for_keep(&best_set)?;
        if coef_keep != best_set {
            let v = self.residual_norm_for_keep(&coef_keep)?;
            if v < best {
                best = v;
                best_set = coef_keep;
            }
        }

        // windowed exchange around the greedy cut
        for _ in 0..EXCHANGE_PASSES {
            let mut improved = false;
            let kept_window: Vec<usize> = best_set
                .iter()
                .copied()
                .filter(|i| *i + EXCHANGE_WINDOW >= k)
                .collect();
            let dropped_window: Vec<usize> = (0..nnz)
                .filter(|i| !best_set.contains(i) && *i < k + EXCHANGE_WINDOW)
                .collect();
            for &out in &kept_window {
                for &inn in &dropped_window {
                    let mut trial: Vec<usize> =
                        best_set.iter().copied().filter(|&i| i != out).collect();
                    trial.push(inn);
                    trial.sort_unstable();
                    let v = self.residual_norm_for_keep(&trial)?;
                    if v < best * (1.0 - 1e-12) {
                        best = v;
                        best_set = trial;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        Ok(best)
    }
}

/// ‖E‖_{𝒜_q^α}: (Σ_N (N^α σ_N)^q / N)^(1/q), finite sum over the support;
/// q = ∞ gives sup_N N^α σ_N.
pub fn approx_space_norm(
    ranked: &RankedExpansion,
    alpha: f64,
    q: f64,
    space: &OrliczSpace,
    mode: SigmaMode,
) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("q = {q} must be positive")));
    }
    let nnz = ranked.num_nonzero();
    if nnz == 0 {
        return Ok(0.0);
    }
    let solver = SigmaSolver::new(ranked, space)?;
    let mut acc: f64 = 0.0;
    let mut sup: f64 = 0.0;
    for n in 1..nnz {
        let sigma = solver.sigma_n(n, mode)?;
        let term = (n as f64).powf(alpha) * sigma;
        if q.is_finite() {
            acc += term.powf(q) / n as f64;
        } else {
            sup = sup.max(term);
        }
    }
    if q.is_finite() {
        Ok(acc.powf(1.0 / q))
    } else {
        Ok(sup)
    }
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub alpha: f64,
    /// Reference norm: Marcinkiewicz for Jackson, Luxemburg for Bernstein.
    pub reference: f64,
    /// (N, error or norm, fitted constant C(N)).
    pub rows: Vec<(usize, f64, f64)>,
    pub max_c: f64,
    pub median_c: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if v.is_empty() {
        return f64::NAN;
    }
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Jackson check: C(N) = ‖f - G_{N-1}f‖·N^α / ‖f‖_{𝕄_{k^α h_φ^+(k)}} over a
/// dyadic N range; passes when C stays bounded.
pub fn jackson_check(
    ranked: &RankedExpansion,
    alpha: f64,
    space: &OrliczSpace,
) -> Result<FitReport> {
    let sizes = ranked.size_sequence();
    let eta = EtaWeight::alpha_h_plus(alpha, space.profile());
    let m = lorentz_norm(&sizes, &eta, f64::INFINITY)?;
    let mut rows = Vec::new();
    let mut n = 1usize;
    while n <= ranked.num_nonzero() {
        let err = ranked.greedy_error(n - 1, space)?;
        let c = err * (n as f64).powf(alpha) / m;
        rows.push((n, err, c));
        n *= 2;
    }
    let cs: Vec<f64> = rows.iter().map(|r| r.2).collect();
    Ok(FitReport {
        alpha,
        reference: m,
        max_c: cs.iter().copied().fold(0.0, f64::max),
        median_c: median(cs),
        rows,
    })
}

/// Bernstein check on an N-sparse expansion:
/// C = ‖f‖_{Λ_{k^α h_φ^-(k)}} / (N^α ‖f‖_{L^Φ(w)}).
pub fn bernstein_check(
    ranked: &RankedExpansion,
    alpha: f64,
    space: &OrliczSpace,
) -> Result<FitReport> {
    let n = ranked.num_nonzero().max(1);
    let sizes = ranked.size_sequence();
    let eta = EtaWeight::alpha_h_minus(alpha, space.profile());
    let lambda = lorentz_norm(&sizes, &eta, 1.0)?;
    let fnorm = ranked.greedy_error(0, space)?;
    let c = lambda / ((n as f64).powf(alpha) * fnorm);
    Ok(FitReport {
        alpha,
        reference: fnorm,
        rows: vec![(n, lambda, c)],
        max_c: c,
        median_c: c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridGeometry;
    use crate::wavelets::WaveletFamily;
    use crate::weights::DyadicWeight;
    use crate::young::YoungFunction;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn space_l2_unweighted(j: i32, m: i32) -> OrliczSpace {
        let g = GridGeometry::new(1, j, m).unwrap();
        let w = DyadicWeight::constant(g).unwrap();
        OrliczSpace::new(w, YoungFunction::power(2.0).unwrap()).unwrap()
    }

    /// expansion with given coefficients on disjoint unit cubes
    fn disjoint_expansion(space: &OrliczSpace, coefs: &[f64]) -> WaveletExpansion {
        let g = space.weight().geometry();
        let mut e = WaveletExpansion::zeros(g, WaveletFamily::Haar);
        for (k, c) in coefs.iter().enumerate() {
            let q = DyadicCube::new(0, [k as i64, 0], 1);
            e.set_coefficient(&q, 1, *c).unwrap();
        }
        e
    }

    fn random_expansion(space: &OrliczSpace, nnz: usize, seed: u64) -> WaveletExpansion {
        let g = space.weight().geometry();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut e = WaveletExpansion::zeros(g, WaveletFamily::Haar);
        let mut placed = 0;
        while placed < nnz {
            let level = rng.gen_range(g.coarsest_level()..g.finest_level());
            let side = g.cubes_per_side(level) as i64;
            let q = DyadicCube::new(level, [rng.gen_range(0..side), 0], 1);
            if e.coefficient(&q, 1).unwrap() == 0.0 {
                e.set_coefficient(
                    &q,
                    1,
                    rng.gen_range(0.1..2.0) * rng.gen_range(-1.0f64..1.0).signum(),
                )
                .unwrap();
                placed += 1;
            }
        }
        e
    }

    #[test]
    fn greedy_keeps_largest() {
        let space = space_l2_unweighted(2, 2);
        let e = disjoint_expansion(&space, &[3.0, 2.0, 1.0]);
        let ranked = RankedExpansion::new(e, &space).unwrap();
        let g2 = ranked.greedy_step(2);
        let q0 = DyadicCube::new(0, [0, 0], 1);
        let q1 = DyadicCube::new(0, [1, 0], 1);
        let q2 = DyadicCube::new(0, [2, 0], 1);
        assert_eq!(g2.coefficient(&q0, 1).unwrap(), 3.0);
        assert_eq!(g2.coefficient(&q1, 1).unwrap(), 2.0);
        assert_eq!(g2.coefficient(&q2, 1).unwrap(), 0.0);
        // N = total -> identity on the wavelet part
        let all = ranked.greedy_step(3);
        assert_eq!(all.coefficient(&q2, 1).unwrap(), 1.0);
    }

    #[test]
    fn ranking_is_a_non_increasing_permutation() {
        let space = space_l2_unweighted(4, 2);
        let e = random_expansion(&space, 18, 77);
        let nnz = e.num_nonzero();
        let ranked = RankedExpansion::new(e, &space).unwrap();
        assert_eq!(ranked.slots().len(), nnz);
        let mut seen: Vec<(DyadicCube, usize)> =
            ranked.slots().iter().map(|s| (s.cube, s.species)).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), nnz, "each slot appears exactly once");
        for w in ranked.slots().windows(2) {
            assert!(w[0].weighted_size >= w[1].weighted_size);
        }
    }

    #[test]
    fn atom_weighted_ranking_beats_plain_size() {
        // s_A = 1 on a small deep cube (large atom norm), s_B = 5 on a unit
        // cube: G_1 must keep A when the weighted sizes say so
        let g = GridGeometry::new(1, 6, 1).unwrap();
        let w = DyadicWeight::constant(g).unwrap();
        let space = OrliczSpace::new(w, YoungFunction::power(4.0).unwrap()).unwrap();
        let deep = DyadicCube::new(5, [0, 0], 1);
        let unit = DyadicCube::new(0, [1, 0], 1);
        let mut e = WaveletExpansion::zeros(g, WaveletFamily::Haar);
        e.set_coefficient(&deep, 1, 1.0).unwrap();
        e.set_coefficient(&unit, 1, 5.0).unwrap();
        // atom norms: 2^(j/2 - j/p); j=5, p=4: 2^(5/2 - 5/4) = 2^1.25 ≈ 2.38
        let a_deep = atom_norm(space.weight(), space.young(), &deep).unwrap();
        let a_unit = atom_norm(space.weight(), space.young(), &unit).unwrap();
        assert!(1.0 * a_deep < 5.0 * a_unit); // sanity for this setup
        let ranked = RankedExpansion::new(e, &space).unwrap();
        assert_eq!(ranked.slots()[0].cube, unit);

        // flip: make the deep coefficient atom-dominant
        let mut e2 = WaveletExpansion::zeros(g, WaveletFamily::Haar);
        e2.set_coefficient(&deep, 1, 4.0).unwrap();
        e2.set_coefficient(&unit, 1, 5.0).unwrap();
        assert!(4.0 * a_deep > 5.0 * a_unit);
        let ranked2 = RankedExpansion::new(e2, &space).unwrap();
        assert_eq!(ranked2.slots()[0].cube, deep, "|s| order != weighted order");
    }

    #[test]
    fn greedy_error_examples() {
        let space = space_l2_unweighted(1, 3);
        let coefs: Vec<f64> = (1..=8).map(|k| 1.0 / k as f64).collect();
        let e = disjoint_expansion(&space, &coefs);
        let ranked = RankedExpansion::new(e, &space).unwrap();
        // N = 0 -> ||f||
        let full = ranked.greedy_error(0, &space).unwrap();
        let l2: f64 = coefs.iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!((full - l2).abs() < 1e-9);
        // N = all -> 0 (scaling remainder reported separately)
        assert!(ranked.greedy_error(8, &space).unwrap() < 1e-12);
        assert_eq!(ranked.scaling_remainder(), 0.0);
        // N = 4 -> sqrt(sum_{k>=5} k^-2)
        let tail: f64 = (5..=8).map(|k| 1.0 / (k * k) as f64).sum::<f64>().sqrt();
        let err = ranked.greedy_error(4, &space).unwrap();
        assert!((err - tail).abs() < 1e-9, "{err} vs {tail}");
    }

    #[test]
    fn sigma_matches_parseval_in_l2() {
        let space = space_l2_unweighted(3, 2);
        let e = random_expansion(&space, 9, 42);
        let ranked = RankedExpansion::new(e, &space).unwrap();
        let mut sizes: Vec<f64> = ranked.slots().iter().map(|s| s.weighted_size).collect();
        sizes.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for n in [1usize, 3, 5, 8] {
            let tail: f64 = sizes[n..].iter().map(|s| s * s).sum::<f64>().sqrt();
            for mode in [SigmaMode::Support, SigmaMode::Exhaustive] {
                let sig = sigma_n_oracle(&ranked, n, &space, mode).unwrap();
                assert!(
                    (sig - tail).abs() <= 1e-7 * tail.max(1e-9),
                    "{mode:?} N={n}: {sig} vs {tail}"
                );
            }
            let err = ranked.greedy_error(n, &space).unwrap();
            assert!(
                (err - tail).abs() <= 1e-9 * tail.max(1e-9),
                "greedy exact in L2"
            );
        }
    }

    #[test]
    fn brick_sigma_matches_subfamily_norm() {
        // 1̃_Γ over 2N disjoint equal-mass cubes: σ_N ≈ ‖1̃_Γ'‖ with |Γ'| = N
        let n = 4usize;
        let g = GridGeometry::new(1, 2, 4).unwrap();
        let w = DyadicWeight::constant(g).unwrap();
        for p in [2.0, 3.0] {
            let space = OrliczSpace::new(w.clone(), YoungFunction::power(p).unwrap()).unwrap();
            let mut e = WaveletExpansion::zeros(g, WaveletFamily::Haar);
            for k in 0..2 * n {
                let q = DyadicCube::new(0, [k as i64, 0], 1);
                let an = atom_norm(space.weight(), space.young(), &q).unwrap();
                e.set_coefficient(&q, 1, 1.0 / an).unwrap();
            }
            let ranked = RankedExpansion::new(e.clone(), &space).unwrap();
            let sigma = sigma_n_oracle(&ranked, n, &space, SigmaMode::Support).unwrap();
            // residual after keeping N atoms is the brick over the other N
            let mut sub = WaveletExpansion::zeros(g, WaveletFamily::Haar);
            for k in 0..n {
                let q = DyadicCube::new(0, [k as i64, 0], 1);
                let an = atom_norm(space.weight(), space.young(), &q).unwrap();
                sub.set_coefficient(&q, 1, 1.0 / an).unwrap();
            }
            let sub_norm = space.norm(&synthesize(&sub)).unwrap();
            assert!(
                (sigma - sub_norm).abs() <= 1e-8 * sub_norm,
                "p = {p}: sigma {sigma} vs subfamily {sub_norm}"
            );
        }
    }

    #[test]
    fn support_mode_dominates_exhaustive() {
        // same subsets, no re-optimization: support >= exhaustive
        let g = GridGeometry::new(1, 4, 1).unwrap();
        let w = DyadicWeight::constant(g).unwrap();
        let space = OrliczSpace::new(w, YoungFunction::power(3.0).unwrap()).unwrap();
        let e = random_expansion(&space, 10, 7);
        let ranked = RankedExpansion::new(e, &space).unwrap();
        for n in [2usize, 4, 6] {
            let sup = sigma_n_oracle(&ranked, n, &space, SigmaMode::Support).unwrap();
            let exh = sigma_n_oracle(&ranked, n, &space, SigmaMode::Exhaustive).unwrap();
            assert!(
                exh <= sup * (1.0 + 1e-9),
                "N={n}: exhaustive {exh} > support {sup}"
            );
        }
    }

    #[test]
    fn exhaustive_rejects_large_supports() {
        let space = space_l2_unweighted(4, 1);
        let e = random_expansion(&space, 25, 3);
        let ranked = RankedExpansion::new(e, &space).unwrap();
        assert!(matches!(
            sigma_n_oracle(&ranked, 2, &space, SigmaMode::Exhaustive),
            Err(Error::OracleTooLarge(25))
        ));
    }

    #[test]
    fn sigma_non_increasing() {
        let space = space_l2_unweighted(3, 2);
        let e = random_expansion(&space, 12, 11);
        let ranked = RankedExpansion::new(e, &space).unwrap();
        let mut prev = f64::INFINITY;
        for n in 0..=12 {
            let s = sigma_n_oracle(&ranked, n, &space, SigmaMode::Support).unwrap();
            assert!(s <= prev * (1.0 + 1e-12), "sigma must be non-increasing");
            prev = s;
        }
        assert_eq!(prev, 0.0);
    }

    #[test]
    fn ranking_invariant_under_scaling() {
        let space = space_l2_unweighted(4, 2);
        let e = random_expansion(&space, 20, 5);
        let ranked = RankedExpansion::new(e.clone(), &space).unwrap();
        let order: Vec<_> = ranked.slots().iter().map(|s| (s.cube, s.species)).collect();
        for c in [4.0, 3.7] {
            let mut scaled = WaveletExpansion::zeros(e.geometry(), e.family());
            e.for_each(|q, l, v| {
                if v != 0.0 {
                    scaled.set_coefficient(&q, l, c * v).unwrap();
                }
            });
            let ranked_c = RankedExpansion::new(scaled, &space).unwrap();
            let order_c: Vec<_> = ranked_c
                .slots()
                .iter()
                .map(|s| (s.cube, s.species))
                .collect();
            assert_eq!(order, order_c, "argmax invariance under scaling by {c}");
        }
    }

    #[test]
    fn greedy_near_optimality_bounded_ratio() {
        let g = GridGeometry::new(1, 5, 2).unwrap();
        let w = DyadicWeight::axis_power(g, 0, 0.5, 0.0, 2.0).unwrap();
        let space = OrliczSpace::new(w, YoungFunction::power(3.0).unwrap()).unwrap();
        let mut worst: f64 = 0.0;
        for seed in 0..10 {
            let e = random_expansion(&space, 14, 100 + seed);
            let ranked = RankedExpansion::new(e, &space).unwrap();
            for n in [2usize, 4, 8] {
                let err = ranked.greedy_error(n, &space).unwrap();
                let sigma = sigma_n_oracle(&ranked, n, &space, SigmaMode::Support).unwrap();
                if sigma > 1e-12 {
                    worst = worst.max(err / sigma);
                }
            }
        }
        assert!(worst >= 1.0 - 1e-9);
        assert!(
            worst < 4.0,
            "greedy/σ_support ratio stays bounded, got {worst}"
        );
    }

    #[test]
    fn approx_space_norm_examples() {
        let space = space_l2_unweighted(1, 3);
        // single atom: sigma_N = 0 for N >= 1 so the norm vanishes
        let e1 = disjoint_expansion(&space, &[2.5]);
        let r1 = RankedExpansion::new(e1, &space).unwrap();
        assert_eq!(
            approx_space_norm(&r1, 0.7, f64::INFINITY, &space, SigmaMode::Support).unwrap(),
            0.0
        );

        // geometric coefficients, q = infinity: sup_N N^alpha * tail
        let coefs: Vec<f64> = (1..=8).map(|k| 2f64.powi(-k)).collect();
        let e = disjoint_expansion(&space, &coefs);
        let ranked = RankedExpansion::new(e, &space).unwrap();
        let alpha = 0.5;
        let got =
            approx_space_norm(&ranked, alpha, f64::INFINITY, &space, SigmaMode::Support).unwrap();
        let mut expect: f64 = 0.0;
        for n in 1..8 {
            let tail: f64 = coefs[n..].iter().map(|c| c * c).sum::<f64>().sqrt();
            expect = expect.max((n as f64).powf(alpha) * tail);
        }
        assert!((got - expect).abs() < 1e-7 * expect, "{got} vs {expect}");

        // monotone in alpha
        let lo = approx_space_norm(&ranked, 0.3, 1.0, &space, SigmaMode::Support).unwrap();
        let hi = approx_space_norm(&ranked, 0.9, 1.0, &space, SigmaMode::Support).unwrap();
        assert!(hi >= lo);
    }

    #[test]
    fn jackson_power_law_slope() {
        // coefficients k^-beta on unit cubes in L^p: greedy error slope is
        // -beta + 1/p
        let g = GridGeometry::new(1, 1, 9).unwrap();
        let w = DyadicWeight::constant(g).unwrap();
        let p = 2.0;
        let beta = 1.0;
        let space = OrliczSpace::new(w, YoungFunction::power(p).unwrap()).unwrap();
        let coefs: Vec<f64> = (1..=512).map(|k| (k as f64).powf(-beta)).collect();
        let e = disjoint_expansion(&space, &coefs);
        let ranked = RankedExpansion::new(e, &space).unwrap();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut n = 1usize;
        while n <= 64 {
            let err = ranked.greedy_error(n, &space).unwrap();
            xs.push((n as f64).ln());
            ys.push(err.ln());
            n *= 2;
        }
        let slope = fit_slope(&xs, &ys);
        let predicted = -beta + 1.0 / p;
        assert!(
            (slope - predicted).abs() < 0.05,
            "slope {slope}, predicted {predicted}"
        );

        // Jackson constant bounded, and zero beyond the support of a 1-atom f
        let report = jackson_check(&ranked, beta - 1.0 / p, &space).unwrap();
        assert!(report.max_c.is_finite() && report.max_c > 0.0);
        let single = RankedExpansion::new(disjoint_expansion(&space, &[1.0]), &space).unwrap();
        let rep1 = jackson_check(&single, 0.5, &space).unwrap();
        // C(N) = 0 for N >= 2 (error vanishes)
        for (n, _, c) in rep1.rows.iter().filter(|(n, _, _)| *n >= 2) {
            assert_eq!(*c, 0.0, "N = {n}");
        }
    }

    #[test]
    fn jackson_bounded_on_random_zygmund_function() {
        let g = GridGeometry::new(1, 6, 2).unwrap();
        let w = DyadicWeight::constant(g).unwrap();
        let space = OrliczSpace::new(w, YoungFunction::zygmund_log(2.0, 1.0).unwrap()).unwrap();
        let e = random_expansion(&space, 48, 23);
        let ranked = RankedExpansion::new(e, &space).unwrap();
        let rep = jackson_check(&ranked, 0.5, &space).unwrap();
        assert!(rep.max_c.is_finite() && rep.max_c > 0.0);
        assert!(rep.max_c / rep.median_c < 5.0, "C(N) must not explode: {rep:?}");
    }

    #[test]
    fn bernstein_single_atom_ratio_one() {
        let space = space_l2_unweighted(2, 2);
        let e = disjoint_expansion(&space, &[1.5]);
        let ranked = RankedExpansion::new(e, &space).unwrap();
        let rep = bernstein_check(&ranked, 0.5, &space).unwrap();
        // h-(1) = 1 and eta(1) = 1: ratio collapses to 1
        assert!((rep.max_c - 1.0).abs() < 1e-9, "got {}", rep.max_c);
    }

    fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        num / den
    }
}
