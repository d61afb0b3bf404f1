//! Non-increasing rearrangements, weighted discrete Lorentz spaces Λ_η^q,
//! Marcinkiewicz spaces (q = ∞), and the embedding/optimality experiments
//! for the approximation-space inclusions.
//!
//! η weights come in three flavors: k^(1/τ) (the classical ℓ^(τ,q) scale)
//! and k^α·h_φ^±(k) built on a fundamental profile.

use crate::error::{Error, Result};
use crate::greedy::{approx_space_norm, RankedExpansion, SigmaMode};
use crate::orlicz::OrliczSpace;
use crate::wavelets::{analyze, atom_norm, synthesize, WaveletExpansion, WaveletFamily};
use crate::young::FundamentalProfile;

/// Finite nonnegative sequence with its cached non-increasing rearrangement.
#[derive(Debug, Clone)]
pub struct CoefSequence {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

impl CoefSequence {
    pub fn new(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| *v >= 0.0));
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        CoefSequence { values, sorted }
    }

    /// Atom-weighted coefficient sizes ‖s_Q ψ_Q‖ of an expansion.
    pub fn from_expansion(e: &WaveletExpansion, space: &OrliczSpace) -> Result<Self> {
        let mut out = Vec::new();
        let mut err = None;
        e.for_each(|cube, _species, coef| {
            if coef != 0.0 && err.is_none() {
                match atom_norm(space.weight(), space.young(), &cube) {
                    Ok(an) => out.push(coef.abs() * an),
                    Err(e) => err = Some(e),
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(CoefSequence::new(out)),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// s*_k, non-increasing.
    pub fn rearranged(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
enum EtaKind {
    Power { inv_tau: f64 },
    AlphaHPlus { alpha: f64 },
    AlphaHMinus { alpha: f64 },
}

/// Increasing doubling sequence weight η(k) for Λ_η^q.
#[derive(Clone, Copy)]
pub struct EtaWeight<'a> {
    kind: EtaKind,
    profile: Option<&'a FundamentalProfile>,
}

impl<'a> EtaWeight<'a> {
    /// η(k) = k^(1/τ): the classical Lorentz scale.
    pub fn power(inv_tau: f64) -> Self {
        EtaWeight {
            kind: EtaKind::Power { inv_tau },
            profile: None,
        }
    }

    /// η(k) = k^α·h_φ^+(k).
    pub fn alpha_h_plus(alpha: f64, profile: &'a FundamentalProfile) -> Self {
        EtaWeight {
            kind: EtaKind::AlphaHPlus { alpha },
            profile: Some(profile),
        }
    }

    /// η(k) = k^α·h_φ^-(k).
    pub fn alpha_h_minus(alpha: f64, profile: &'a FundamentalProfile) -> Self {
        EtaWeight {
            kind: EtaKind::AlphaHMinus { alpha },
            profile: Some(profile),
        }
    }

    /// η(k), k ≥ 1.
    pub fn value(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        match self.kind {
            EtaKind::Power { inv_tau } => (k as f64).powf(inv_tau),
            EtaKind::AlphaHPlus { alpha } => {
                (k as f64).powf(alpha) * self.profile.unwrap().h_plus_int(k)
            }
            EtaKind::AlphaHMinus { alpha } => {
                (k as f64).powf(alpha) * self.profile.unwrap().h_minus_int(k)
            }
        }
    }

    /// Doubling constant max_k η(2k)/η(k) over k ≤ n (class 𝔇 check).
    pub fn doubling_constant(&self, n: usize) -> f64 {
        (1..=n)
            .map(|k| self.value(2 * k) / self.value(k))
            .fold(0.0f64, f64::max)
    }

    /// True when {η(k)^q / k} is non-increasing over 1..=n (the regularity
    /// that makes Λ_η^q a Banach space for q ≥ 1 and guarantees nesting).
    pub fn regular_for(&self, q: f64, n: usize) -> bool {
        let mut prev = f64::INFINITY;
        for k in 1..=n {
            let v = self.value(k).powf(q) / k as f64;
            if v > prev * (1.0 + 1e-12) {
                return false;
            }
            prev = v;
        }
        true
    }
}

impl std::fmt::Debug for EtaWeight<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            EtaKind::Power { inv_tau } => write!(f, "eta(k)=k^{inv_tau}"),
            EtaKind::AlphaHPlus { alpha } => write!(f, "eta(k)=k^{alpha}·h+(k)"),
            EtaKind::AlphaHMinus { alpha } => write!(f, "eta(k)=k^{alpha}·h-(k)"),
        }
    }
}

/// Empirical quasi-triangle exponent for Λ_η^q: the largest ρ ∈ (0, 1]
/// with ‖s₁+s₂‖^ρ ≤ ‖s₁‖^ρ + ‖s₂‖^ρ over seeded random pairs. There is no
/// constructive recipe for ρ; the estimate is recorded per space and is 1
/// whenever the trials never see a triangle violation.
pub fn estimate_rho(eta: &EtaWeight, q: f64, trials: usize, seed: u64) -> Result<f64> {
    use rand::prelude::*;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut rho: f64 = 1.0;
    for _ in 0..trials {
        let n = rng.gen_range(2..40);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let na = lorentz_norm(&CoefSequence::new(a), eta, q)?;
        let nb = lorentz_norm(&CoefSequence::new(b), eta, q)?;
        let ns = lorentz_norm(&CoefSequence::new(sum), eta, q)?;
        if ns <= (na + nb) * (1.0 + 1e-12) {
            continue;
        }
        // per-pair feasibility is monotone in rho: bisect for the crossing
        let feasible = |r: f64| na.powf(r) + nb.powf(r) >= ns.powf(r);
        if !feasible(rho) {
            let mut lo = 1e-3;
            let mut hi = rho;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if feasible(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            rho = lo;
        }
    }
    Ok(rho)
}

/// ‖s‖_{Λ_η^q} = [Σ_k (η(k)·s*_k)^q / k]^(1/q); q = ∞ gives the
/// Marcinkiewicz norm sup_k η(k)·s*_k.
pub fn lorentz_norm(s: &CoefSequence, eta: &EtaWeight, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Lorentz exponent q = {q} must be > 0"
        )));
    }
    let star = s.rearranged();
    if q.is_finite() {
        let mut acc = 0.0;
        for (i, v) in star.iter().enumerate() {
            if *v == 0.0 {
                break;
            }
            let k = i + 1;
            acc += (eta.value(k) * v).powf(q) / k as f64;
        }
        Ok(acc.powf(1.0 / q))
    } else {
        let mut sup: f64 = 0.0;
        for (i, v) in star.iter().enumerate() {
            if *v == 0.0 {
                break;
            }
            sup = sup.max(eta.value(i + 1) * v);
        }
        Ok(sup)
    }
}

/// The three norms of the embedding chain
/// Λ^q_{k^α h_φ^+} ↪ 𝒜_q^α ↪ Λ^q_{k^α h_φ^-}.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingReport {
    pub left: f64,
    pub middle: f64,
    pub right: f64,
    /// middle/left and right/middle: bounded when the inclusions hold.
    pub ratio_middle_left: f64,
    pub ratio_right_middle: f64,
}

/// Evaluate the chain on one expansion.
pub fn embedding_check(
    e: &WaveletExpansion,
    alpha: f64,
    q: f64,
    space: &OrliczSpace,
) -> Result<EmbeddingReport> {
    let sizes = CoefSequence::from_expansion(e, space)?;
    let left = lorentz_norm(&sizes, &EtaWeight::alpha_h_plus(alpha, space.profile()), q)?;
    let right = lorentz_norm(&sizes, &EtaWeight::alpha_h_minus(alpha, space.profile()), q)?;
    let ranked = RankedExpansion::new(e.clone(), space)?;
    let middle = approx_space_norm(&ranked, alpha, q, space, SigmaMode::Support)?;
    Ok(EmbeddingReport {
        left,
        middle,
        right,
        ratio_middle_left: middle / left,
        ratio_right_middle: right / middle,
    })
}

/// Optimality witness built from 2N disjoint cubes at the τ that
/// near-extremizes φ(Nτ)/φ(τ).
#[derive(Debug, Clone, Copy)]
pub struct OptimalityReport {
    pub n: usize,
    pub tau: f64,
    /// φ(Nτ)/φ(τ) at the chosen τ; h_φ^+(N) ≤ 2·this when the τ-grid
    /// resolves the supremum.
    pub phi_ratio: f64,
    pub h_plus: f64,
    pub h_minus: f64,
    /// ‖1̃_Γ‖_{𝒜_q^α} of the 2N-cube witness.
    pub approx_norm: f64,
    /// approx_norm / N^α: any left-embedding η must dominate this (≈ h_φ^+).
    pub lower_witness: f64,
    /// min brick norm over N-cube families: any right-embedding η is
    /// dominated by this (≈ h_φ^-).
    pub upper_witness: f64,
}

/// Build the witness family and evaluate both optimality constraints.
pub fn optimality_witness(
    space: &OrliczSpace,
    family: WaveletFamily,
    alpha: f64,
    q: f64,
    n: usize,
) -> Result<OptimalityReport> {
    let profile = space.profile();
    let weight = space.weight();
    let max_level = weight.geometry().finest_level() - 1;

    // tau grid over the reachable mass range, extremizing phi(N tau)/phi(tau)
    let lo = weight.min_positive_cell_mass();
    let hi = weight.total_mass() / (2 * n) as f64; // leave room for 2N cubes
    let hi = hi.max(lo * 1.0001);
    let ratio_at = |tau: f64| -> f64 { profile.phi(n as f64 * tau) / profile.phi(tau) };
    let mut best_plus: Option<(f64, f64)> = None;
    let mut best_minus: Option<(f64, f64)> = None;
    for i in 0..32 {
        let tau = lo * (hi / lo).powf(i as f64 / 31.0);
        if weight.select_disjoint_upto(tau, 2 * n, max_level)?.len() < 2 * n {
            continue;
        }
        let r = ratio_at(tau);
        if best_plus.is_none_or(|(_, br)| r > br) {
            best_plus = Some((tau, r));
        }
        if best_minus.is_none_or(|(_, br)| r < br) {
            best_minus = Some((tau, r));
        }
    }
    let (tau, phi_ratio) = best_plus.ok_or(Error::DomainExhausted {
        found: 0,
        requested: 2 * n,
    })?;
    let cubes = weight.select_disjoint_cubes(tau, 2 * n, max_level)?;

    // normalized brick over the 2N cubes
    let g = weight.geometry();
    let mut brick = WaveletExpansion::zeros(g, family);
    for qube in &cubes {
        let an = atom_norm(weight, space.young(), qube)?;
        brick.set_coefficient(qube, 1, 1.0 / an)?;
    }
    let ranked = RankedExpansion::new(brick, space)?;
    let approx_norm = approx_space_norm(&ranked, alpha, q, space, SigmaMode::Support)?;
    let lower_witness = approx_norm / (n as f64).powf(alpha);

    // right-side witness: minimal brick norm over N-cube families
    let (tau_m, _) = best_minus.unwrap();
    let cubes_m = weight.select_disjoint_cubes(tau_m, n, max_level)?;
    let mut brick_m = WaveletExpansion::zeros(g, family);
    for qube in &cubes_m {
        let an = atom_norm(weight, space.young(), qube)?;
        brick_m.set_coefficient(qube, 1, 1.0 / an)?;
    }
    let upper_witness = space.norm(&synthesize(&brick_m))?;

    Ok(OptimalityReport {
        n,
        tau,
        phi_ratio,
        h_plus: profile.h_plus_int(n),
        h_minus: profile.h_minus_int(n),
        approx_norm,
        lower_witness,
        upper_witness,
    })
}

/// Convenience: analyze a grid function and run the embedding chain.
pub fn embedding_check_grid(
    f: &crate::grid::GridFunction,
    family: WaveletFamily,
    alpha: f64,
    q: f64,
    space: &OrliczSpace,
) -> Result<EmbeddingReport> {
    let e = analyze(f, family)?;
    embedding_check(&e, alpha, q, space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{DyadicCube, GridGeometry};
    use crate::weights::DyadicWeight;
    use crate::young::YoungFunction;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lorentz_norm_examples() {
        // s = (1,1), eta(k) = k, q = 1 -> 1 + 2/2 = 2
        let s = CoefSequence::new(vec![1.0, 1.0]);
        let eta = EtaWeight::power(1.0);
        assert!((lorentz_norm(&s, &eta, 1.0).unwrap() - 2.0).abs() < 1e-12);

        // s*_k = 1/eta(k), q = inf -> 1
        let eta2 = EtaWeight::power(0.5);
        let vals: Vec<f64> = (1..=10).map(|k| 1.0 / (k as f64).sqrt()).collect();
        let s2 = CoefSequence::new(vals);
        assert!((lorentz_norm(&s2, &eta2, f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);

        assert!(lorentz_norm(&s, &eta, 0.0).is_err());
        assert!(lorentz_norm(&s, &eta, -1.0).is_err());
    }

    #[test]
    fn matches_classical_lorentz_formula() {
        // independent direct implementation of the l^{tau,q} norm
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let vals: Vec<f64> = (0..40).map(|_| rng.gen_range(0.0..3.0)).collect();
        let s = CoefSequence::new(vals.clone());
        let (tau, q) = (1.5, 2.5);
        let eta = EtaWeight::power(1.0 / tau);
        let got = lorentz_norm(&s, &eta, q).unwrap();
        let mut sorted = vals;
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let direct: f64 = sorted
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let k = (i + 1) as f64;
                (k.powf(1.0 / tau) * v).powf(q) / k
            })
            .sum::<f64>()
            .powf(1.0 / q);
        assert!((got - direct).abs() < 1e-12 * direct.max(1.0));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        // the norm depends only on the rearrangement
        #[test]
        fn rearrangement_invariance(
            vals in proptest::collection::vec(0.0f64..5.0, 1..30),
            shuffle_seed in 0u64..1000,
            q_pick in 0usize..4,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed);
            let mut shuffled = vals.clone();
            shuffled.shuffle(&mut rng);
            let eta = EtaWeight::power(0.8);
            let q = [0.7, 1.0, 3.0, f64::INFINITY][q_pick];
            let a = lorentz_norm(&CoefSequence::new(vals), &eta, q).unwrap();
            let b = lorentz_norm(&CoefSequence::new(shuffled), &eta, q).unwrap();
            proptest::prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn nesting_in_q_for_regular_eta() {
        let zyg = YoungFunction::zygmund_log(2.0, 1.0).unwrap();
        let prof = zyg.profile().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let vals: Vec<f64> = (0..30).map(|_| rng.gen_range(0.0..2.0)).collect();
        let s = CoefSequence::new(vals);
        let etas = [
            EtaWeight::power(2.0),
            EtaWeight::power(0.75),
            EtaWeight::alpha_h_plus(0.5, &prof),
            EtaWeight::alpha_h_minus(0.5, &prof),
        ];
        let qs = [0.5, 1.0, 2.0, 4.0, f64::INFINITY];
        for eta in &etas {
            let values: Vec<f64> = qs
                .iter()
                .map(|q| lorentz_norm(&s, eta, *q).unwrap())
                .collect();
            let mut asserted = 0;
            for i in 0..qs.len() {
                // constant-1 nesting needs eta(k)^q1/k non-increasing
                if !qs[i].is_finite() || !eta.regular_for(qs[i], s.len() * 2) {
                    continue;
                }
                for j in i + 1..qs.len() {
                    assert!(
                        values[j] <= values[i] * (1.0 + 1e-9),
                        "{eta:?}: q={} should dominate q={}",
                        qs[i],
                        qs[j]
                    );
                    asserted += 1;
                }
            }
            assert!(asserted > 0, "{eta:?}: no regular pair exercised");
        }
    }

    #[test]
    fn rho_estimates() {
        // Banach range (eta(k)^q/k non-increasing): rho stays 1
        let eta = EtaWeight::power(1.0);
        assert!(eta.regular_for(1.0, 64));
        assert_eq!(estimate_rho(&eta, 1.0, 200, 3).unwrap(), 1.0);
        let eta_half = EtaWeight::power(0.5);
        assert!(eta_half.regular_for(2.0, 64));
        assert_eq!(estimate_rho(&eta_half, 2.0, 200, 3).unwrap(), 1.0);
        // q = 2 with eta(k) = k lacks the regularity: genuine quasi-norm
        let rho_q2 = estimate_rho(&eta, 2.0, 200, 3).unwrap();
        assert!(rho_q2 < 1.0, "rho = {rho_q2}");
        // quasi-norm range: a genuine exponent below 1, roughly q
        let rho = estimate_rho(&eta, 0.5, 400, 3).unwrap();
        assert!(rho < 1.0 && rho > 0.3, "rho = {rho}");
        // h-based weight in the quasi range stays positive
        let zyg = YoungFunction::zygmund_log(2.0, 1.0).unwrap();
        let prof = zyg.profile().unwrap();
        let eta_h = EtaWeight::alpha_h_minus(0.5, &prof);
        let rho_h = estimate_rho(&eta_h, 0.7, 100, 9).unwrap();
        assert!(rho_h > 0.2 && rho_h <= 1.0, "rho_h = {rho_h}");
    }

    #[test]
    fn doubling_constants_finite_and_eta_increasing() {
        let zyg = YoungFunction::zygmund_log(2.0, 1.0).unwrap();
        let prof = zyg.profile().unwrap();
        for (eta, bound) in [
            (EtaWeight::alpha_h_plus(0.5, &prof), 4.0),
            (EtaWeight::alpha_h_minus(0.5, &prof), 4.0),
            (EtaWeight::power(1.0 / 1.5), 2.0),
        ] {
            let c = eta.doubling_constant(256);
            assert!(
                c.is_finite() && c > 0.0 && c <= bound,
                "{eta:?}: doubling {c}"
            );
            let mut prev = 0.0;
            for k in 1..=512 {
                let v = eta.value(k);
                assert!(
                    v >= prev * (1.0 - 1e-12),
                    "{eta:?} must be increasing at k={k}"
                );
                prev = v;
            }
        }
    }

    fn lp_space(p: f64) -> OrliczSpace {
        let g = GridGeometry::new(1, 2, 6).unwrap();
        let w = DyadicWeight::constant(g).unwrap();
        OrliczSpace::new(w, YoungFunction::power(p).unwrap()).unwrap()
    }

    #[test]
    fn embedding_single_atom_all_equal() {
        let space = lp_space(2.0);
        let g = space.weight().geometry();
        let mut e = WaveletExpansion::zeros(g, WaveletFamily::Haar);
        e.set_coefficient(&DyadicCube::new(0, [3, 0], 1), 1, 2.0)
            .unwrap();
        let rep = embedding_check(&e, 0.5, f64::INFINITY, &space).unwrap();
        // single atom: sigma_N = 0 for N >= 1, eta(1) = 1: left = right = atom size
        assert!((rep.left - rep.right).abs() < 1e-12);
        assert_eq!(rep.middle, 0.0);
    }

    #[test]
    fn embedding_power_law_family_comparable_to_classical() {
        // power-law coefficients in L^p: all three norms comparable to the
        // classical l^{tau,q} value with 1/tau = alpha + 1/p
        let p = 2.0;
        let alpha = 0.5;
        let q = 1.0;
        let space = lp_space(p);
        let g = space.weight().geometry();
        let mut e = WaveletExpansion::zeros(g, WaveletFamily::Haar);
        for k in 0..32usize {
            let q0 = DyadicCube::new(0, [k as i64, 0], 1);
            e.set_coefficient(&q0, 1, (k as f64 + 1.0).powf(-1.2))
                .unwrap();
        }
        let rep = embedding_check(&e, alpha, q, &space).unwrap();
        let sizes = CoefSequence::from_expansion(&e, &space).unwrap();
        let classical = lorentz_norm(&sizes, &EtaWeight::power(alpha + 1.0 / p), q).unwrap();
        // in L^p both eta weights coincide with the classical one
        assert!((rep.left - classical).abs() < 1e-9 * classical);
        assert!((rep.right - classical).abs() < 1e-9 * classical);
        assert!(rep.middle > 0.1 * classical && rep.middle < 10.0 * classical);
    }

    #[test]
    fn optimality_trivial_at_n_one() {
        let space = lp_space(2.0);
        let rep = optimality_witness(&space, WaveletFamily::Haar, 0.5, 1.0, 1).unwrap();
        // sigma_1 of the 2-cube brick is one normalized atom; h±(1) = 1
        assert!(
            (rep.lower_witness - 1.0).abs() < 1e-8,
            "lower {}",
            rep.lower_witness
        );
        assert!(
            (rep.upper_witness - 1.0).abs() < 1e-8,
            "upper {}",
            rep.upper_witness
        );
        assert!((rep.h_plus - 1.0).abs() < 1e-12 && (rep.h_minus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimality_lp_collapses_to_n_pow() {
        let p = 2.0;
        let space = lp_space(p);
        for n in [2usize, 8] {
            let rep = optimality_witness(&space, WaveletFamily::Haar, 0.5, 1.0, n).unwrap();
            let npow = (n as f64).powf(1.0 / p);
            assert!((rep.h_plus - npow).abs() < 1e-9);
            assert!((rep.h_minus - npow).abs() < 1e-9);
            // both witnesses land within a 4x band of N^(1/p)
            assert!(
                rep.lower_witness >= npow / 4.0 && rep.lower_witness <= 4.0 * npow,
                "lower witness {} vs {}",
                rep.lower_witness,
                npow
            );
            assert!(
                rep.upper_witness >= npow / 4.0 && rep.upper_witness <= 4.0 * npow,
                "upper witness {} vs {}",
                rep.upper_witness,
                npow
            );
        }
    }
}
