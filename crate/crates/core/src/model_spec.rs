//! Text grammar for dielectric models and separation grids.
//!
//! ```text
//! vacuum | ideal
//! plasma:wp=9.0eV
//! drude:wp=9.0eV,gamma=0.035eV
//! table:path=au.txt,extrap=drude|plasma
//! sc:wp=11.5eV,gamma=0.05eV,tc=1.3K,model=mb|plasma[,ratio=1.764]
//! ```
//!
//! Frequencies accept an `eV` suffix (photon energy) or a bare number / `rad/s`
//! suffix. Grids are `min:max:count:lin|log` or a single number.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use crate::constants::EV_TO_RAD_S;
use crate::dielectric::{DielectricModel, ScSubModel};
use crate::error::{Error, Result};
use crate::metrology::separation_grid;
use crate::optics::{load_table, ExtrapolationPolicy};
use crate::superconductor::{SuperconductorParams, BCS_GAP_RATIO};

fn spec_err(msg: impl Into<String>) -> Error {
    Error::Spec(msg.into())
}

/// Angular frequency from `9.0eV`, `1.37e16rad/s` or `1.37e16`.
pub fn parse_frequency(text: &str) -> Result<f64> {
    let t = text.trim();
    let (num, scale) = if let Some(n) = t.strip_suffix("eV") {
        (n, EV_TO_RAD_S)
    } else if let Some(n) = t.strip_suffix("rad/s") {
        (n, 1.0)
    } else {
        (t, 1.0)
    };
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| spec_err(format!("bad frequency `{text}`")))?;
    Ok(v * scale)
}

fn parse_temperature(text: &str) -> Result<f64> {
    let t = text.trim();
    let n = t.strip_suffix('K').unwrap_or(t);
    n.trim()
        .parse()
        .map_err(|_| spec_err(format!("bad temperature `{text}`")))
}

fn fields(body: &str) -> Result<BTreeMap<&str, &str>> {
    let mut out = BTreeMap::new();
    for part in body.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| spec_err(format!("expected key=value, got `{part}`")))?;
        if out.insert(k.trim(), v.trim()).is_some() {
            return Err(spec_err(format!("duplicate key `{}`", k.trim())));
        }
    }
    Ok(out)
}

fn take<'a>(f: &mut BTreeMap<&str, &'a str>, key: &str, kind: &str) -> Result<&'a str> {
    f.remove(key)
        .ok_or_else(|| spec_err(format!("{kind} model needs `{key}=`")))
}

fn no_leftovers(f: &BTreeMap<&str, &str>, kind: &str) -> Result<()> {
    match f.keys().next() {
        Some(k) => Err(spec_err(format!("unknown key `{k}` for {kind} model"))),
        None => Ok(()),
    }
}

/// Parses a model spec. Relative table paths resolve against `base_dir`.
pub fn parse_model(text: &str, base_dir: Option<&Path>) -> Result<DielectricModel<f64>> {
    let text = text.trim();
    let (kind, body) = text.split_once(':').unwrap_or((text, ""));
    let mut f = fields(body)?;
    let model = match kind {
        "vacuum" => DielectricModel::Vacuum,
        "ideal" => DielectricModel::IdealMetal,
        "plasma" => DielectricModel::plasma(parse_frequency(take(&mut f, "wp", kind)?)?)?,
        "drude" => {
            let wp = parse_frequency(take(&mut f, "wp", kind)?)?;
            let g = parse_frequency(take(&mut f, "gamma", kind)?)?;
            DielectricModel::drude(wp, g)?
        }
        "table" => {
            let path = take(&mut f, "path", kind)?;
            let extrap = f.remove("extrap").unwrap_or("drude");
            let full = match base_dir {
                Some(d) if Path::new(path).is_relative() => d.join(path),
                _ => Path::new(path).to_path_buf(),
            };
            let file = std::fs::File::open(&full)
                .map_err(|e| spec_err(format!("cannot open table `{}`: {e}", full.display())))?;
            let table = load_table::<f64, _>(file, path)?;
            let extrapolation = match extrap {
                "drude" => ExtrapolationPolicy::drude_matched(&table)?,
                "plasma" => ExtrapolationPolicy::plasma_matched(&table)?,
                other => return Err(spec_err(format!("unknown extrapolation `{other}`"))),
            };
            DielectricModel::Tabulated {
                table: Arc::new(table),
                extrapolation,
            }
        }
        "sc" => {
            let wp = parse_frequency(take(&mut f, "wp", kind)?)?;
            let g = parse_frequency(take(&mut f, "gamma", kind)?)?;
            let tc = parse_temperature(take(&mut f, "tc", kind)?)?;
            let sub_model = match f.remove("model").unwrap_or("mb") {
                "mb" => ScSubModel::MattisBardeen,
                "plasma" => ScSubModel::PlasmaBelowTc,
                other => return Err(spec_err(format!("unknown superconductor model `{other}`"))),
            };
            let ratio = match f.remove("ratio") {
                Some(r) => r.parse().map_err(|_| spec_err(format!("bad gap ratio `{r}`")))?,
                None => BCS_GAP_RATIO,
            };
            DielectricModel::Superconductor {
                params: SuperconductorParams::with_gap_ratio(wp, g, tc, ratio)?,
                sub_model,
            }
        }
        other => return Err(spec_err(format!("unknown model kind `{other}`"))),
    };
    no_leftovers(&f, kind)?;
    Ok(model)
}

/// `min:max:count:lin|log`, or a single value.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| spec_err(format!("bad number `{s}` in grid `{text}`")))
    };
    match parts.as_slice() {
        [single] => {
            let v = num(single)?;
            if !(v > 0.0) {
                return Err(spec_err("grid value must be positive"));
            }
            Ok(vec![v])
        }
        [min, max, count, scale] => {
            let (min, max) = (num(min)?, num(max)?);
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| spec_err(format!("bad count in grid `{text}`")))?;
            if count == 0 {
                return Err(spec_err("grid count must be >= 1"));
            }
            if !(min > 0.0 && max > min) {
                return Err(spec_err("grid needs 0 < min < max"));
            }
            let log = match scale.trim() {
                "lin" => false,
                "log" => true,
                other => return Err(spec_err(format!("grid scale must be lin or log, got `{other}`"))),
            };
            separation_grid(min, max, count, log)
        }
        _ => Err(spec_err(format!("grid `{text}` is not min:max:count:lin|log"))),
    }
}
