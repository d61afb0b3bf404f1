//! Young functions Φ, the fundamental function φ(t) = 1/Φ⁻¹(1/t), the
//! dilation functions h_φ^± and Boyd indices.
//!
//! Three kinds are supported: `Power(p)` with Φ(t) = t^p, `ZygmundLog(p, a)`
//! with Φ(t) = t^p·log(e + t)^a, and `Tabulated` (a monotone sample table on
//! a log grid with power-law tail exponents that fix the behavior beyond the
//! table). Power kinds admit closed forms everywhere; the others go through
//! bracketed bisection for Φ⁻¹ and a log-spaced supremum grid for h_φ^±.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};

/// Supremum grid for the dilation functions: s ∈ [1e-8, 1e8], 64 points per
/// decade.
const DILATION_GRID_LO_EXP: f64 = -8.0;
const DILATION_GRID_HI_EXP: f64 = 8.0;
const DILATION_POINTS_PER_DECADE: usize = 64;

#[derive(Debug, Clone)]
pub enum YoungKind {
    /// Φ(t) = t^p, 1 < p < ∞.
    Power { p: f64 },
    /// Φ(t) = t^p · log(e + t)^a, a ≥ 0.
    ZygmundLog { p: f64, a: f64 },
    /// Monotone samples (t_i, Φ(t_i)) interpolated log-log linearly, with
    /// power-law extrapolation exponents below and above the table.
    Tabulated {
        ts: Vec<f64>,
        phis: Vec<f64>,
        tail_lo: f64,
        tail_hi: f64,
    },
}

#[derive(Debug, Clone)]
pub struct YoungFunction {
    kind: YoungKind,
    inverse_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DilationMode {
    Sup,
    Inf,
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidYoung(format!(
                "Power needs 1 < p < inf, got p = {p}"
            )));
        }
        Ok(YoungFunction {
            kind: YoungKind::Power { p },
            inverse_tolerance: 1e-12,
        })
    }

    pub fn zygmund_log(p: f64, a: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidYoung(format!(
                "ZygmundLog needs 1 < p < inf, got p = {p}"
            )));
        }
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidYoung(format!(
                "ZygmundLog needs a >= 0, got a = {a}"
            )));
        }
        Ok(YoungFunction {
            kind: YoungKind::ZygmundLog { p, a },
            inverse_tolerance: 1e-12,
        })
    }

    pub fn tabulated(ts: Vec<f64>, phis: Vec<f64>, tail_lo: f64, tail_hi: f64) -> Result<Self> {
        if ts.len() != phis.len() || ts.len() < 2 {
            return Err(Error::InvalidYoung(
                "table needs at least two (t, Phi) rows".into(),
            ));
        }
        for w in ts.windows(2) {
            if !(w[0] > 0.0 && w[1] > w[0]) {
                return Err(Error::InvalidYoung(
                    "table t column must be positive ascending".into(),
                ));
            }
        }
        for w in phis.windows(2) {
            if !(w[0] > 0.0 && w[1] > w[0]) {
                return Err(Error::InvalidYoung(
                    "table Phi column must be positive ascending".into(),
                ));
            }
        }
        if !(tail_lo >= 1.0 && tail_hi >= 1.0) || !tail_lo.is_finite() || !tail_hi.is_finite() {
            return Err(Error::InvalidYoung(
                "tail exponents must be finite and >= 1 so Phi stays convex with Phi(0) = 0".into(),
            ));
        }
        Ok(YoungFunction {
            kind: YoungKind::Tabulated {
                ts,
                phis,
                tail_lo,
                tail_hi,
            },
            inverse_tolerance: 1e-12,
        })
    }

    pub fn with_inverse_tolerance(mut self, tol: f64) -> Self {
        self.inverse_tolerance = tol;
        self
    }

    pub fn kind(&self) -> &YoungKind {
        &self.kind
    }

    pub fn inverse_tolerance(&self) -> f64 {
        self.inverse_tolerance
    }

    /// Φ(t).
    pub fn eval(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match &self.kind {
            YoungKind::Power { p } => pow_fast(t, *p),
            YoungKind::ZygmundLog { p, a } => {
                if t == 0.0 {
                    0.0
                } else {
                    pow_fast(t, *p) * pow_fast((std::f64::consts::E + t).ln(), *a)
                }
            }
            YoungKind::Tabulated {
                ts,
                phis,
                tail_lo,
                tail_hi,
            } => {
                if t == 0.0 {
                    return 0.0;
                }
                let n = ts.len();
                if t <= ts[0] {
                    return phis[0] * (t / ts[0]).powf(*tail_lo);
                }
                if t >= ts[n - 1] {
                    return phis[n - 1] * (t / ts[n - 1]).powf(*tail_hi);
                }
                // log-log linear interpolation: piecewise power law, monotone
                let idx = ts.partition_point(|x| *x <= t) - 1;
                let (t0, t1) = (ts[idx], ts[idx + 1]);
                let (y0, y1) = (phis[idx], phis[idx + 1]);
                let u = (t.ln() - t0.ln()) / (t1.ln() - t0.ln());
                (y0.ln() + u * (y1.ln() - y0.ln())).exp()
            }
        }
    }

    /// Φ⁻¹(y): closed form for Power, bracketed bisection otherwise with the
    /// bracket grown by doubling from 1.
    pub fn invert(&self, y: f64) -> Result<f64> {
        debug_assert!(y >= 0.0);
        if y == 0.0 {
            return Ok(0.0);
        }
        if let YoungKind::Power { p } = self.kind {
            return Ok(y.powf(1.0 / p));
        }
        let mut lo = 1.0f64;
        let mut hi = 1.0f64;
        let mut grow = 0usize;
        while self.eval(lo) > y {
            lo *= 0.5;
            grow += 1;
            if grow > 1100 {
                return Err(Error::InversionFailed(format!(
                    "no lower bracket for y = {y}"
                )));
            }
        }
        grow = 0;
        while self.eval(hi) < y {
            hi *= 2.0;
            grow += 1;
            if grow > 1100 {
                return Err(Error::InversionFailed(format!(
                    "no upper bracket for y = {y}"
                )));
            }
        }
        // bisect to full f64 resolution; comfortably inside inverse_tolerance
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let err = (self.eval(t) - y).abs();
        if err > self.inverse_tolerance * y.max(1.0) * 1e3 {
            return Err(Error::InversionFailed(format!(
                "residual {err} at y = {y}; malformed table?"
            )));
        }
        Ok(t)
    }

    /// Fundamental function φ(t) = 1/Φ⁻¹(1/t), t > 0.
    pub fn fundamental(&self, t: f64) -> Result<f64> {
        debug_assert!(t > 0.0);
        if let YoungKind::Power { p } = self.kind {
            return Ok(t.powf(1.0 / p));
        }
        Ok(1.0 / self.invert(1.0 / t)?)
    }

    /// h_φ^±(t) = sup (resp. inf) over s of φ(st)/φ(s), evaluated on the
    /// dilation grid; exact t^(1/p) for Power.
    pub fn dilation(&self, t: f64, mode: DilationMode) -> Result<f64> {
        debug_assert!(t > 0.0);
        if let YoungKind::Power { p } = self.kind {
            return Ok(t.powf(1.0 / p));
        }
        let grid = dilation_grid();
        let mut best = match mode {
            DilationMode::Sup => f64::NEG_INFINITY,
            DilationMode::Inf => f64::INFINITY,
        };
        for &s in &grid {
            let ratio = self.fundamental(s * t)? / self.fundamental(s)?;
            best = match mode {
                DilationMode::Sup => best.max(ratio),
                DilationMode::Inf => best.min(ratio),
            };
        }
        Ok(best)
    }

    /// (i_φ, I_φ) estimated from endpoint slopes of log h_φ^+ with a
    /// Richardson step in 1/log(t) that removes the slowly-decaying bias of
    /// the plain quotient; exact (1/p, 1/p) for Power.
    pub fn boyd_indices(&self) -> Result<(f64, f64)> {
        if let YoungKind::Power { p } = self.kind {
            return Ok((1.0 / p, 1.0 / p));
        }
        let h = |t: f64| -> Result<f64> { self.dilation(t, DilationMode::Sup) };
        let lower = richardson_slope([1e-8, 1e-16, 1e-24], [h(1e-8)?, h(1e-16)?, h(1e-24)?]);
        let upper = richardson_slope([1e8, 1e16, 1e24], [h(1e8)?, h(1e16)?, h(1e24)?]);
        if !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidYoung(
                "degenerate dilation profile; bad Tabulated table?".into(),
            ));
        }
        Ok((lower, upper))
    }

    /// Build the cached profile (φ grid, h_φ^± and Boyd indices).
    pub fn profile(&self) -> Result<FundamentalProfile> {
        FundamentalProfile::new(self.clone())
    }
}

/// Extrapolated endpoint slope of log h(t) vs log t.
///
/// For the supported kinds log h(t) = i·log t + κ·log(c + |log t|) + O(1),
/// so chord slopes carry an O(1/|log t|) bias. Two chords with the bias
/// eliminated via the logarithmic mean of |log t| recover `i`; for pure
/// power behavior both chords are equal and the formula returns them as is.
fn richardson_slope(ts: [f64; 3], hs: [f64; 3]) -> f64 {
    let x: Vec<f64> = ts.iter().map(|t| t.ln().abs()).collect();
    let l: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let chord = |a: usize, b: usize| (l[b] - l[a]) / (ts[b].ln() - ts[a].ln());
    let log_mean = |a: f64, b: f64| {
        if (a - b).abs() < 1e-12 * a.abs() {
            a
        } else {
            (b - a) / (b / a).ln()
        }
    };
    let c1 = chord(0, 1);
    let c2 = chord(1, 2);
    let x1 = log_mean(x[0], x[1]);
    let x2 = log_mean(x[1], x[2]);
    if (x2 - x1).abs() < 1e-12 {
        return c2;
    }
    (c2 * x2 - c1 * x1) / (x2 - x1)
}

/// t^p avoiding `powf` for the common exponents in hot modular loops.
#[inline]
fn pow_fast(t: f64, p: f64) -> f64 {
    if p == 1.0 {
        t
    } else if p == 2.0 {
        t * t
    } else if p == 3.0 {
        t * t * t
    } else if p == 1.5 {
        t * t.sqrt()
    } else {
        t.powf(p)
    }
}

fn dilation_grid() -> Vec<f64> {
    let decades = DILATION_GRID_HI_EXP - DILATION_GRID_LO_EXP;
    let n = (decades * DILATION_POINTS_PER_DECADE as f64).round() as usize;
    (0..=n)
        .map(|i| 10f64.powf(DILATION_GRID_LO_EXP + i as f64 / DILATION_POINTS_PER_DECADE as f64))
        .collect()
}

/// Cached view of the fundamental function of L^Φ(w): φ on the dilation
/// grid, h_φ^± evaluations, Boyd index estimates, and a memo for h_φ^+ at
/// integer arguments (the Lorentz weights consume those).
#[derive(Debug)]
pub struct FundamentalProfile {
    young: YoungFunction,
    grid: Vec<f64>,
    phi_grid: Vec<f64>,
    boyd_lower: f64,
    boyd_upper: f64,
    h_plus_memo: Mutex<HashMap<u64, f64>>,
    h_minus_memo: Mutex<HashMap<u64, f64>>,
}

impl FundamentalProfile {
    pub fn new(young: YoungFunction) -> Result<Self> {
        let grid = dilation_grid();
        let mut phi_grid = Vec::with_capacity(grid.len());
        for &s in &grid {
            phi_grid.push(young.fundamental(s)?);
        }
        let (boyd_lower, boyd_upper) = young.boyd_indices()?;
        Ok(FundamentalProfile {
            young,
            grid,
            phi_grid,
            boyd_lower,
            boyd_upper,
            h_plus_memo: Mutex::new(HashMap::new()),
            h_minus_memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn young(&self) -> &YoungFunction {
        &self.young
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.young
            .fundamental(t)
            .expect("fundamental function evaluation")
    }

    pub fn boyd_lower(&self) -> f64 {
        self.boyd_lower
    }

    pub fn boyd_upper(&self) -> f64 {
        self.boyd_upper
    }

    /// Errors unless 0 < i_φ ≤ I_φ < 1. The ordering check allows estimator
    /// noise: the true indices always satisfy i_φ ≤ I_φ, but the endpoint
    /// estimates can straddle by a few percent when they coincide
    /// (tabulated kinds mix interpolation and tail regimes).
    pub fn ensure_nontrivial(&self) -> Result<()> {
        if self.boyd_lower > 0.0
            && self.boyd_upper < 1.0
            && self.boyd_lower <= self.boyd_upper + 0.05
        {
            Ok(())
        } else {
            Err(Error::InvalidYoung(format!(
                "Boyd indices ({:.4}, {:.4}) not strictly inside (0, 1)",
                self.boyd_lower, self.boyd_upper
            )))
        }
    }

    fn dilation_cached(&self, t: f64, mode: DilationMode) -> f64 {
        if let YoungKind::Power { p } = self.young.kind {
            return t.powf(1.0 / p);
        }
        let mut best = match mode {
            DilationMode::Sup => f64::NEG_INFINITY,
            DilationMode::Inf => f64::INFINITY,
        };
        for (&s, &phi_s) in self.grid.iter().zip(&self.phi_grid) {
            let ratio = self.phi(s * t) / phi_s;
            best = match mode {
                DilationMode::Sup => best.max(ratio),
                DilationMode::Inf => best.min(ratio),
            };
        }
        best
    }

    pub fn h_plus(&self, t: f64) -> f64 {
        self.dilation_cached(t, DilationMode::Sup)
    }

    pub fn h_minus(&self, t: f64) -> f64 {
        self.dilation_cached(t, DilationMode::Inf)
    }

    /// h_φ^+(k) for integer k, memoized.
    pub fn h_plus_int(&self, k: usize) -> f64 {
        if let Some(v) = self.h_plus_memo.lock().unwrap().get(&(k as u64)) {
            return *v;
        }
        let v = self.h_plus(k as f64);
        self.h_plus_memo.lock().unwrap().insert(k as u64, v);
        v
    }

    /// h_φ^-(k) for integer k, memoized.
    pub fn h_minus_int(&self, k: usize) -> f64 {
        if let Some(v) = self.h_minus_memo.lock().unwrap().get(&(k as u64)) {
            return *v;
        }
        let v = self.h_minus(k as f64);
        self.h_minus_memo.lock().unwrap().insert(k as u64, v);
        v
    }

    /// Fit C_ε with φ(st) ≤ C_ε·max(s^(i-ε), s^(I+ε))·φ(t) over a sample
    /// grid; spaces with nontrivial Boyd indices admit a finite constant for
    /// every ε > 0.
    pub fn envelope_constant(&self, eps: f64) -> f64 {
        let lo = self.boyd_lower - eps;
        let hi = self.boyd_upper + eps;
        let nodes: Vec<f64> = (-32..=32).map(|e| 10f64.powf(e as f64 * 0.25)).collect();
        let mut c = 0.0f64;
        for &s in &nodes {
            for &t in &nodes {
                let bound = s.powf(lo).max(s.powf(hi)) * self.phi(t);
                c = c.max(self.phi(s * t) / bound);
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zyg() -> YoungFunction {
        YoungFunction::zygmund_log(2.0, 1.0).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(YoungFunction::power(2.0).unwrap().eval(3.0), 9.0);
        for p in [1.5, 2.0, 3.0] {
            assert_eq!(YoungFunction::power(p).unwrap().eval(0.0), 0.0);
        }
        let expect = 25.0 * (std::f64::consts::E + 5.0).ln();
        assert!((zyg().eval(5.0) - expect).abs() < 1e-12);
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(YoungFunction::power(1.0).is_err());
        assert!(YoungFunction::power(0.5).is_err());
        assert!(YoungFunction::zygmund_log(2.0, -0.1).is_err());
        assert!(YoungFunction::tabulated(vec![1.0], vec![1.0], 1.0, 2.0).is_err());
        assert!(YoungFunction::tabulated(vec![1.0, 0.5], vec![1.0, 2.0], 1.0, 2.0).is_err());
    }

    #[test]
    fn invert_examples() {
        let p2 = YoungFunction::power(2.0).unwrap();
        assert_eq!(p2.invert(9.0).unwrap(), 3.0);
        assert_eq!(zyg().invert(0.0).unwrap(), 0.0);
        let y = 25.0 * (std::f64::consts::E + 5.0).ln();
        let t = zyg().invert(y).unwrap();
        assert!((t - 5.0).abs() < 1e-9, "t = {t}");
    }

    #[test]
    fn invert_roundtrip_12_decades() {
        let f = zyg();
        for e in -6..=6 {
            let y = 10f64.powi(e);
            let t = f.invert(y).unwrap();
            assert!((f.eval(t) - y).abs() <= 1e-12 * y.max(1.0), "y = {y}");
        }
    }

    #[test]
    fn fundamental_examples() {
        let p2 = YoungFunction::power(2.0).unwrap();
        assert!((p2.fundamental(4.0).unwrap() - 2.0).abs() < 1e-15);
        for p in [1.5, 2.5, 4.0] {
            let f = YoungFunction::power(p).unwrap();
            assert!((f.fundamental(1.0).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn fundamental_matches_grid_oracle() {
        // brute-force inversion of Phi on a dense log grid
        let f = zyg();
        let ts: Vec<f64> = (0..10_000)
            .map(|i| 10f64.powf(-4.0 + i as f64 * 8.0 / 9_999.0))
            .collect();
        let phis: Vec<f64> = ts.iter().map(|t| f.eval(*t)).collect();
        let brute_inverse = |y: f64| -> f64 {
            let idx = phis.partition_point(|v| *v < y).min(ts.len() - 1);
            ts[idx]
        };
        for t in [0.3, 1.0, 7.0, 120.0] {
            let value = f.fundamental(t).unwrap();
            let oracle = 1.0 / brute_inverse(1.0 / t);
            assert!(
                (value - oracle).abs() <= 2e-3 * oracle,
                "t = {t}: {value} vs {oracle}"
            );
        }
    }

    #[test]
    fn dilation_examples() {
        for p in [1.5, 2.0, 3.0] {
            let f = YoungFunction::power(p).unwrap();
            let n = 37.0;
            assert!((f.dilation(n, DilationMode::Sup).unwrap() - n.powf(1.0 / p)).abs() < 1e-12);
        }
        for f in [YoungFunction::power(2.0).unwrap(), zyg()] {
            assert!((f.dilation(1.0, DilationMode::Sup).unwrap() - 1.0).abs() < 1e-12);
            assert!((f.dilation(1.0, DilationMode::Inf).unwrap() - 1.0).abs() < 1e-12);
        }
        // the h+/h- gap witnesses non-democracy of the Zygmund space
        let f = zyg();
        let hp = f.dilation(64.0, DilationMode::Sup).unwrap();
        let hm = f.dilation(64.0, DilationMode::Inf).unwrap();
        assert!(hp / hm > 1.05, "h+ = {hp}, h- = {hm}");
    }

    #[test]
    fn boyd_power() {
        for p in [1.5, 2.0, 3.0] {
            let (i, s) = YoungFunction::power(p).unwrap().boyd_indices().unwrap();
            assert!((i - 1.0 / p).abs() < 1e-3);
            assert!((s - 1.0 / p).abs() < 1e-3);
        }
        let (i, s) = YoungFunction::power(2.0).unwrap().boyd_indices().unwrap();
        assert!((i - 0.5).abs() < 1e-3 && (s - 0.5).abs() < 1e-3);
    }

    #[test]
    fn boyd_zygmund() {
        let (i, s) = zyg().boyd_indices().unwrap();
        assert!((i - 0.5).abs() < 1e-2, "i = {i}");
        assert!((s - 0.5).abs() < 1e-2, "I = {s}");
        // deeper-node confirmation of the same estimator
        let f = zyg();
        let h = |t: f64| f.dilation(t, DilationMode::Sup).unwrap();
        let deep = richardson_slope([1e-12, 1e-20, 1e-28], [h(1e-12), h(1e-20), h(1e-28)]);
        assert!((deep - i).abs() < 1e-2, "deep = {deep}, i = {i}");
    }

    #[test]
    fn profile_dilation_properties() {
        let prof = zyg().profile().unwrap();
        prof.ensure_nontrivial().unwrap();
        let ts = [0.013, 0.4, 1.0, 3.0, 270.0];
        for &t in &ts {
            let hp = prof.h_plus(t);
            let hm = prof.h_minus(t);
            assert!(hm <= hp + 1e-12, "t = {t}");
        }
        assert!((prof.h_plus(1.0) - 1.0).abs() < 1e-12);
        assert!((prof.h_minus(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn midpoint_convexity_on_samples() {
        let tab_src = zyg();
        let ts: Vec<f64> = (0..40).map(|i| 10f64.powf(-2.0 + i as f64 * 4.0 / 39.0)).collect();
        let phis: Vec<f64> = ts.iter().map(|t| tab_src.eval(*t)).collect();
        let kinds = [
            YoungFunction::power(1.5).unwrap(),
            YoungFunction::power(3.0).unwrap(),
            zyg(),
            YoungFunction::tabulated(ts, phis, 2.0, 2.0).unwrap(),
        ];
        for f in &kinds {
            for i in 0..60 {
                let t1 = 10f64.powf(-3.0 + i as f64 * 0.1);
                let t2 = 2.7 * t1 + 0.4;
                let mid = f.eval(0.5 * (t1 + t2));
                let avg = 0.5 * (f.eval(t1) + f.eval(t2));
                assert!(mid <= avg * (1.0 + 1e-9), "convexity at ({t1}, {t2})");
            }
        }
    }

    #[test]
    fn phi_monotone_and_concave_quotient() {
        // phi non-decreasing, phi(t)/t non-increasing on the sampled grid
        let f = zyg();
        let mut prev_phi = 0.0;
        let mut prev_q = f64::INFINITY;
        for i in 0..200 {
            let t = 10f64.powf(-6.0 + i as f64 * 12.0 / 199.0);
            let phi = f.fundamental(t).unwrap();
            assert!(phi >= prev_phi - 1e-12 * phi, "phi must be non-decreasing");
            let q = phi / t;
            assert!(
                q <= prev_q * (1.0 + 1e-12),
                "phi(t)/t must be non-increasing"
            );
            prev_phi = phi;
            prev_q = q;
        }
    }

    #[test]
    fn dilation_bounds_phi_ratios() {
        // phi(st) <= h+(t) phi(s) and >= h-(t) phi(s) for s on the grid
        let prof = zyg().profile().unwrap();
        for &t in &[0.07, 0.9, 5.0, 41.0] {
            let hp = prof.h_plus(t);
            let hm = prof.h_minus(t);
            for e in [-6, -2, 0, 3, 6] {
                let s = 10f64.powi(e);
                let r = prof.phi(s * t) / prof.phi(s);
                assert!(r <= hp * (1.0 + 1e-12));
                assert!(r >= hm * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn dilation_submultiplicative_on_samples() {
        let prof = zyg().profile().unwrap();
        for &s in &[0.04, 0.7, 2.0, 30.0] {
            for &t in &[0.1, 1.3, 12.0] {
                let lhs = prof.h_plus(s * t);
                let rhs = prof.h_plus(s) * prof.h_plus(t);
                assert!(lhs <= rhs * 1.001, "s = {s}, t = {t}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn envelope_constant_is_finite_and_valid() {
        let prof = zyg().profile().unwrap();
        let c = prof.envelope_constant(0.05);
        assert!(c.is_finite() && c > 0.0 && c < 1e3, "C_eps = {c}");
        // verify on an interstitial grid with slack for between-node wiggle
        let lo = prof.boyd_lower() - 0.05;
        let hi = prof.boyd_upper() + 0.05;
        for i in 0..40 {
            for j in 0..40 {
                let s = 10f64.powf(-5.0 + i as f64 * 10.0 / 39.0);
                let t = 10f64.powf(-5.0 + j as f64 * 10.0 / 39.0);
                let bound = c * s.powf(lo).max(s.powf(hi)) * prof.phi(t);
                assert!(prof.phi(s * t) <= bound * 1.05);
            }
        }
    }

    #[test]
    fn tabulated_tracks_its_source() {
        // table sampled from t^2 log(e+t); interpolation + tails should stay close
        let src = zyg();
        let ts: Vec<f64> = (0..60)
            .map(|i| 10f64.powf(-3.0 + i as f64 * 6.0 / 59.0))
            .collect();
        let phis: Vec<f64> = ts.iter().map(|t| src.eval(*t)).collect();
        let tab = YoungFunction::tabulated(ts, phis, 2.0, 2.0).unwrap();
        for &t in &[0.01, 0.3, 1.0, 44.0, 900.0] {
            let rel = (tab.eval(t) - src.eval(t)).abs() / src.eval(t);
            assert!(rel < 5e-3, "t = {t}, rel = {rel}");
        }
        let (i, s) = tab.boyd_indices().unwrap();
        assert!(i > 0.0 && s < 1.0, "({i}, {s})");
    }
}
