//! Named test functions. `catalog:NAME` resolves against the current
//! parameter context (some entries, like `x_pow_r` or the counterexample
//! builders, depend on the requested `k`, `r`, `α`, `β`, `p`); anything else
//! is treated as a path to a FunctionSpec JSON file.

use anyhow::{bail, Context, Result};
use jacmod_core::funcspace::{BumpTrainParams, FunctionSpec, WindowTrainParams};

/// Parameter context used by the contextual catalog entries.
#[derive(Clone, Copy, Debug)]
pub struct CatalogContext {
    pub k: u32,
    pub r: u32,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    /// Window width for `sing_window` (defaults to half the DT edge width
    /// when the caller knows a `t`).
    pub eps: Option<f64>,
}

impl Default for CatalogContext {
    fn default() -> Self {
        CatalogContext {
            k: 2,
            r: 0,
            alpha: 0.0,
            beta: 0.0,
            p: 2.0,
            eps: None,
        }
    }
}

pub const CATALOG_NAMES: &[&str] = &[
    "exp",
    "sin3",
    "runge",
    "poly6",
    "abspow28",
    "endpow26",
    "x_pow_r",
    "weight_recip",
    "osc",
    "ce_unbounded",
    "ce_inclusion",
    "sing_window",
];

/// The six-function smooth catalog used by the grid suites.
pub const SMOOTH_CATALOG: &[&str] = &["exp", "sin3", "runge", "poly6", "abspow28", "endpow26"];

pub fn build(name: &str, ctx: &CatalogContext) -> Result<FunctionSpec> {
    Ok(match name {
        "exp" => FunctionSpec::exp(),
        "sin3" => FunctionSpec::sin_scaled(3.0),
        "runge" => FunctionSpec::runge(1.2),
        "poly6" => FunctionSpec::cheb(vec![0.1, -0.3, 0.2, 0.5, -0.4, 0.3, 0.25]),
        "abspow28" => FunctionSpec::abs_power(2.8, 0.3),
        "endpow26" => FunctionSpec::endpoint_power(1, 2.6),
        "x_pow_r" => FunctionSpec::monomial(ctx.r),
        "weight_recip" => FunctionSpec::weight_reciprocal(ctx.r, ctx.alpha, ctx.beta),
        "osc" => FunctionSpec::osc_endpoint(ctx.r),
        "ce_unbounded" => FunctionSpec::window_train(WindowTrainParams::new(
            ctx.k, ctx.r, ctx.alpha, ctx.beta, ctx.p,
        ))
        .map_err(|e| anyhow::anyhow!("{e}"))?,
        "ce_inclusion" => {
            FunctionSpec::bump_train(BumpTrainParams::new(ctx.r, ctx.beta, ctx.p))
                .map_err(|e| anyhow::anyhow!("{e}"))?
        }
        "sing_window" => {
            let eps = ctx.eps.unwrap_or(0.01);
            FunctionSpec::singular_window(eps, -ctx.beta - 1.0 / ctx.p)
        }
        other => bail!("unknown catalog entry {other:?} (known: {CATALOG_NAMES:?})"),
    })
}

/// `catalog:NAME` or a JSON file path.
pub fn resolve(func: &str, ctx: &CatalogContext) -> Result<FunctionSpec> {
    if let Some(name) = func.strip_prefix("catalog:") {
        return build(name, ctx);
    }
    let text = std::fs::read_to_string(func)
        .with_context(|| format!("reading function spec {func:?}"))?;
    let spec: FunctionSpec =
        serde_json::from_str(&text).with_context(|| format!("parsing {func:?}"))?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_catalog_compiles() {
        let ctx = CatalogContext::default();
        for name in SMOOTH_CATALOG {
            let spec = build(name, &ctx).unwrap();
            spec.compile().unwrap();
        }
    }

    #[test]
    fn contextual_entries() {
        let ctx = CatalogContext {
            r: 1,
            beta: -0.75,
            p: 1.0,
            ..CatalogContext::default()
        };
        assert!(build("ce_unbounded", &ctx).is_ok());
        let bad = CatalogContext::default(); // r/2 + β = 0 not < 0
        assert!(build("ce_unbounded", &bad).is_err());
        assert!(build("nope", &ctx).is_err());
    }
}
