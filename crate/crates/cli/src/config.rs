//! `key = value` files mirroring [`OracleConfig`].
//!
//! ```text
//! # comments and blank lines are ignored
//! grid_size = 128
//! ladder = 1e-3, 1e-6, 1e-9, 1e-12
//! restarts = 16
//! ascent_iters = 500
//! growth_factor_infinite = 10
//! seed = 0
//! quad_order = 10
//! witness_points = 32
//! ```

use std::str::FromStr;

use cesembed_core::OracleConfig;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("config line {line}: {msg}")]
pub struct ConfigError {
    pub line: usize,
    pub msg: String,
}

/// Applies the settings in `text` on top of `base`.
pub fn apply_config(base: OracleConfig<f64>, text: &str) -> Result<OracleConfig<f64>, ConfigError> {
    let mut cfg = base;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |msg: String| ConfigError { line, msg };
        let (key, value) = body.split_once('=').ok_or_else(|| err(format!("expected key = value, got `{body}`")))?;
        let (key, value) = (key.trim(), value.trim());
        fn num<X: FromStr>(v: &str) -> Result<X, String> {
            v.parse().map_err(|_| format!("bad value `{v}`"))
        }
        match key {
            "grid_size" => cfg.grid_size = num(value).map_err(err)?,
            "restarts" => cfg.restarts = num(value).map_err(err)?,
            "ascent_iters" => cfg.ascent_iters = num(value).map_err(err)?,
            "growth_factor_infinite" => cfg.growth_factor_infinite = num(value).map_err(err)?,
            "seed" => cfg.seed = num(value).map_err(err)?,
            "quad_order" => cfg.quad_order = num(value).map_err(err)?,
            "witness_points" => cfg.witness_points = num(value).map_err(err)?,
            "ladder" => {
                cfg.ladder = value.split(',').map(|s| num(s.trim())).collect::<Result<_, _>>().map_err(err)?;
            }
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    cfg.validate().map_err(|e| ConfigError { line: 0, msg: e.to_string() })?;
    Ok(cfg)
}
