//! Flat `key = value` configuration text and the spec strings that name
//! Young functions, weights, and grid functions.
//!
//! Spec string grammar:
//!   young    = "power:p=2.0" | "zygmund:p=2.0,a=1.0" | "table:<path>"
//!   weight   = "const" | "power:gamma=0.5,center=0[,axis=0]"
//!            | "prod:gx=0.5,cx=0,gy=0.5,cy=0" | "file:<path>"
//!   function = "file:<path>" | "random:seed=7" | "bump" | "sawtooth"

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{parse_grid_text, read_grid_file, GridFunction, GridGeometry};
use crate::weights::DyadicWeight;
use crate::young::YoungFunction;

/// Parse flat config text: `key = value` lines, `#` comments, UTF-8.
/// Later keys override earlier ones.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(Error::Config {
            line: i + 1,
            msg: format!("expected `key = value`, got {raw:?}"),
        })?;
        let key = key.trim();
        let value = value.trim().trim_matches('"');
        if key.is_empty() {
            return Err(Error::Config {
                line: i + 1,
                msg: "empty key".into(),
            });
        }
        out.insert(key.to_string(), value.to_string());
    }
    Ok(out)
}

/// Split "name:k1=v1,k2=v2" into (name, {k: v}).
fn split_spec(spec: &str) -> (String, BTreeMap<String, String>) {
    match spec.split_once(':') {
        None => (spec.trim().to_string(), BTreeMap::new()),
        Some((name, rest)) => {
            let mut kv = BTreeMap::new();
            for part in rest.split(',') {
                if let Some((k, v)) = part.split_once('=') {
                    kv.insert(k.trim().to_string(), v.trim().to_string());
                } else if !part.trim().is_empty() {
                    kv.insert("_".to_string(), part.trim().to_string());
                }
            }
            (name.trim().to_string(), kv)
        }
    }
}

fn get_f64(kv: &BTreeMap<String, String>, key: &str, what: &str) -> Result<f64> {
    let raw = kv
        .get(key)
        .ok_or_else(|| Error::InvalidParameter(format!("{what} needs `{key}=`")))?;
    raw.parse()
        .map_err(|_| Error::InvalidParameter(format!("{what}: bad number {raw:?} for {key}")))
}

fn get_f64_or(kv: &BTreeMap<String, String>, key: &str, default: f64, what: &str) -> Result<f64> {
    match kv.get(key) {
        None => Ok(default),
        Some(raw) => raw
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("{what}: bad number {raw:?} for {key}"))),
    }
}

/// Build a Young function from its spec string.
pub fn young_from_spec(spec: &str) -> Result<YoungFunction> {
    let (name, kv) = split_spec(spec);
    match name.as_str() {
        "power" => YoungFunction::power(get_f64(&kv, "p", "young power")?),
        "zygmund" => YoungFunction::zygmund_log(
            get_f64(&kv, "p", "young zygmund")?,
            get_f64(&kv, "a", "young zygmund")?,
        ),
        "table" => {
            let path = kv
                .get("_")
                .ok_or_else(|| Error::InvalidParameter("young table needs a path".into()))?;
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            young_table_from_text(&text)
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown young kind {other:?}"
        ))),
    }
}

/// Two-column whitespace-separated table `t Phi(t)` with ascending t; tail
/// exponents fitted from the edge slopes.
pub fn young_table_from_text(text: &str) -> Result<YoungFunction> {
    let nums: Vec<f64> = text
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidParameter("young table: non-numeric entry".into()))?;
    if nums.len() < 4 || !nums.len().is_multiple_of(2) {
        return Err(Error::InvalidParameter(
            "young table needs (t, Phi) rows".into(),
        ));
    }
    let ts: Vec<f64> = nums.iter().step_by(2).copied().collect();
    let phis: Vec<f64> = nums.iter().skip(1).step_by(2).copied().collect();
    let n = ts.len();
    let slope = |i: usize, j: usize| (phis[j] / phis[i]).ln() / (ts[j] / ts[i]).ln();
    let tail_lo = slope(0, 1).max(1.0);
    let tail_hi = slope(n - 2, n - 1).max(1.0);
    YoungFunction::tabulated(ts, phis, tail_lo, tail_hi)
}

/// Build a weight from its spec string (`ap` declares the A_p exponent).
pub fn weight_from_spec(geometry: GridGeometry, spec: &str) -> Result<DyadicWeight> {
    let (name, kv) = split_spec(spec);
    match name.as_str() {
        "const" => DyadicWeight::constant(geometry),
        "power" => {
            let gamma = get_f64(&kv, "gamma", "weight power")?;
            let center = get_f64_or(&kv, "center", 0.0, "weight power")?;
            let axis = get_f64_or(&kv, "axis", 0.0, "weight power")? as usize;
            let ap = get_f64_or(&kv, "ap", (gamma + 1.0).max(2.0), "weight power")?;
            DyadicWeight::axis_power(geometry, axis, gamma, center, ap)
        }
        "prod" => {
            if geometry.dim() != 2 {
                return Err(Error::InvalidWeight("prod weight needs d = 2".into()));
            }
            let gx = get_f64(&kv, "gx", "weight prod")?;
            let cx = get_f64_or(&kv, "cx", 0.0, "weight prod")?;
            let gy = get_f64(&kv, "gy", "weight prod")?;
            let cy = get_f64_or(&kv, "cy", 0.0, "weight prod")?;
            let ap = get_f64_or(&kv, "ap", (gx.max(gy) + 1.0).max(2.0), "weight prod")?;
            let line = |gamma: f64, center: f64| -> Vec<f64> {
                let h = 2f64.powi(-geometry.finest_level());
                let anti = |u: f64| u.signum() * u.abs().powf(gamma + 1.0) / (gamma + 1.0);
                (0..geometry.cells_per_side())
                    .map(|i| anti((i + 1) as f64 * h - center) - anti(i as f64 * h - center))
                    .collect()
            };
            DyadicWeight::product(geometry, &line(gx, cx), &line(gy, cy), ap)
        }
        "file" => {
            let path = kv
                .get("_")
                .ok_or_else(|| Error::InvalidParameter("weight file needs a path".into()))?;
            let (g, masses) = read_grid_file(path)?;
            if g != geometry {
                return Err(Error::InvalidGeometry(format!(
                    "weight file geometry ({}, {}, {}) differs from requested",
                    g.dim(),
                    g.finest_level(),
                    g.domain_exponent()
                )));
            }
            let ap = get_f64_or(&kv, "ap", 2.0, "weight file")?;
            DyadicWeight::from_cell_masses(geometry, masses, ap)
        }
        other => Err(Error::InvalidWeight(format!(
            "unknown weight kind {other:?}"
        ))),
    }
}

/// Build a grid function from its spec string.
pub fn function_from_spec(geometry: GridGeometry, spec: &str) -> Result<GridFunction> {
    let (name, kv) = split_spec(spec);
    match name.as_str() {
        "file" => {
            let path = kv
                .get("_")
                .ok_or_else(|| Error::InvalidParameter("function file needs a path".into()))?;
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            let (g, values) = parse_grid_text(&text)?;
            if g != geometry {
                return Err(Error::InvalidGeometry(
                    "function file geometry differs from requested".into(),
                ));
            }
            GridFunction::new(geometry, values)
        }
        "random" => {
            let seed = get_f64_or(&kv, "seed", 0.0, "function random")? as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let values: Vec<f64> = (0..geometry.num_cells())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            GridFunction::new(geometry, values)
        }
        "bump" => {
            let extent = 2f64.powi(geometry.domain_exponent());
            let center = extent / 2.0;
            let sigma = extent / 8.0;
            let values: Vec<f64> = (0..geometry.num_cells())
                .map(|c| {
                    let mid = geometry.cell_midpoint(c);
                    let r2: f64 = (0..geometry.dim())
                        .map(|a| (mid[a] - center) * (mid[a] - center))
                        .sum();
                    (-r2 / (2.0 * sigma * sigma)).exp()
                })
                .collect();
            GridFunction::new(geometry, values)
        }
        "sawtooth" => {
            let values: Vec<f64> = (0..geometry.num_cells())
                .map(|c| {
                    let mid = geometry.cell_midpoint(c);
                    (0..geometry.dim())
                        .map(|a| 2.0 * mid[a].fract() - 1.0)
                        .product()
                })
                .collect();
            GridFunction::new(geometry, values)
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown function kind {other:?}"
        ))),
    }
}
