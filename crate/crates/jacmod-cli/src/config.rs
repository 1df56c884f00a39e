//! Verification suite configuration. Serializable so that reports can embed
//! the exact configuration they were produced from.

use serde::{Deserialize, Serialize};

fn default_ks() -> Vec<u32> {
    vec![1, 2, 3]
}
fn default_rs() -> Vec<u32> {
    vec![0, 1, 2]
}
fn default_ps() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, f64::INFINITY]
}
fn default_exponents() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 1.0]
}
fn default_catalog() -> Vec<String> {
    crate::catalog::SMOOTH_CATALOG
        .iter()
        .map(|s| s.to_string())
        .collect()
}
fn default_suites() -> Vec<String> {
    Suite::ALL.iter().map(|s| s.id().to_string()).collect()
}
fn default_seed() -> u64 {
    0x5EED
}
fn default_tol() -> f64 {
    1e-4
}
fn default_t_points() -> usize {
    8
}
fn default_h_grid() -> usize {
    16
}
fn default_tau_nodes() -> usize {
    16
}
fn default_sup_grid() -> usize {
    1025
}
fn default_degree_cap() -> u32 {
    96
}

/// Exponent lists use the `pnorm` convention (`"inf"` for `∞`).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SuiteConfig {
    #[serde(default = "default_ks")]
    pub ks: Vec<u32>,
    #[serde(default = "default_rs")]
    pub rs: Vec<u32>,
    #[serde(default = "default_ps", with = "p_list")]
    pub ps: Vec<f64>,
    #[serde(default = "default_exponents")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_exponents")]
    pub betas: Vec<f64>,
    #[serde(default = "default_catalog")]
    pub catalog: Vec<String>,
    /// t-range endpoints for the modulus sweeps.
    #[serde(default = "crate::config::default_t_lo")]
    pub t_lo: f64,
    #[serde(default = "crate::config::default_t_hi")]
    pub t_hi: f64,
    #[serde(default = "default_t_points")]
    pub t_points: usize,
    #[serde(default = "default_suites")]
    pub suites: Vec<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_h_grid")]
    pub h_grid_size: usize,
    #[serde(default = "default_tau_nodes")]
    pub tau_nodes: usize,
    #[serde(default = "default_sup_grid")]
    pub sup_grid: usize,
    #[serde(default = "default_degree_cap")]
    pub degree_cap: u32,
    /// Run the expensive predicates on the full (α, β) grid instead of the
    /// representative subset.
    #[serde(default)]
    pub dense: bool,
}

pub(crate) fn default_t_lo() -> f64 {
    1e-3
}
pub(crate) fn default_t_hi() -> f64 {
    1.0
}

impl Default for SuiteConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

impl SuiteConfig {
    pub fn t_grid(&self, lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|j| lo * (hi / lo).powf(j as f64 / (n.max(2) - 1) as f64))
            .collect()
    }

    /// Exponent pairs for the heavyweight predicates: the full grid when
    /// `dense`, otherwise a representative subset covering zero, fractional
    /// and mixed exponents.
    pub fn exponent_pairs(&self, dense_needed: bool) -> Vec<(f64, f64)> {
        if self.dense || !dense_needed {
            let mut out = Vec::new();
            for &a in &self.alphas {
                for &b in &self.betas {
                    out.push((a, b));
                }
            }
            out
        } else {
            vec![(0.0, 0.0), (0.5, 0.0), (0.25, 0.25), (1.0, 0.5)]
        }
    }

    pub fn wants(&self, suite: Suite) -> bool {
        self.suites.iter().any(|s| s == suite.id() || s == "all")
    }
}

mod p_list {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(ps: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<serde_json::Value> = ps
            .iter()
            .map(|p| {
                if p.is_finite() {
                    serde_json::json!(p)
                } else {
                    serde_json::json!("inf")
                }
            })
            .collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|v| match v {
                serde_json::Value::Number(n) => {
                    n.as_f64().ok_or_else(|| serde::de::Error::custom("bad p"))
                }
                serde_json::Value::String(t) if t == "inf" => Ok(f64::INFINITY),
                other => Err(serde::de::Error::custom(format!("bad p entry {other}"))),
            })
            .collect()
    }
}

/// Predicate groups runnable via `--suite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// ω* ≤ ω, the large-t clamp, boundedness, vanishing limit.
    Basics,
    /// Decay order of ω for analytic functions.
    Decay,
    /// K/R/ω*/ω equivalence chain, t-scaling, order exchange, k-hierarchy.
    Equivalence,
    /// Comparison against the three-part DT modulus.
    Dt,
    /// Unbounded-modulus and failed-inclusion constructions, DT edge
    /// divergence.
    Counterexamples,
    /// p = ∞ endpoint characterization cases.
    EndpointCases,
    /// Realization/modulus equivalence for p < 1.
    SmallP,
    /// Pointwise weight comparison bounds.
    Weights,
    /// Uniform best-approximation oracle cross-check.
    Minimax,
}

impl Suite {
    pub const ALL: &[Suite] = &[
        Suite::Basics,
        Suite::Decay,
        Suite::Equivalence,
        Suite::Dt,
        Suite::Counterexamples,
        Suite::EndpointCases,
        Suite::SmallP,
        Suite::Weights,
        Suite::Minimax,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Suite::Basics => "basics",
            Suite::Decay => "decay",
            Suite::Equivalence => "equivalence",
            Suite::Dt => "dt",
            Suite::Counterexamples => "counterexamples",
            Suite::EndpointCases => "endpoint-cases",
            Suite::SmallP => "small-p",
            Suite::Weights => "weights",
            Suite::Minimax => "minimax",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_with_inf() {
        let cfg = SuiteConfig::default();
        assert!(cfg.ps.contains(&f64::INFINITY));
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.contains("\"inf\""));
        let back: SuiteConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn suite_selection() {
        let mut cfg = SuiteConfig::default();
        cfg.suites = vec!["counterexamples".into()];
        assert!(cfg.wants(Suite::Counterexamples));
        assert!(!cfg.wants(Suite::Basics));
    }
}
