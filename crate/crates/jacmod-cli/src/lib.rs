//! Verification harness and report plumbing behind the `jacmod` binary.
//!
//! The library side exists so the verification suites are callable from
//! integration tests as well as from the CLI.

pub mod catalog;
pub mod config;
pub mod report;
pub mod suites;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Serialize/deserialize an extended-real exponent (`∞` is not valid JSON,
/// so it round-trips as the string "inf").
pub mod pnorm_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_finite() {
            p.serialize(s)
        } else {
            "inf".serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Raw::Text(t) => t
                .parse()
                .map_err(|_| serde::de::Error::custom(format!("bad exponent {t:?}"))),
        }
    }
}

/// Parse "2", "0.5", or "inf".
pub fn parse_p(s: &str) -> Result<f64, String> {
    if s.eq_ignore_ascii_case("inf") || s == "∞" {
        return Ok(f64::INFINITY);
    }
    let p: f64 = s.parse().map_err(|_| format!("invalid p: {s:?}"))?;
    if p > 0.0 {
        Ok(p)
    } else {
        Err(format!("p must be positive, got {p}"))
    }
}

/// Parse a t specification: a single value, a comma list, or `lo:hi:logN`.
pub fn parse_t_grid(s: &str) -> Result<Vec<f64>, String> {
    if let Some(rest) = s.find(':').map(|i| (&s[..i], &s[i + 1..])) {
        let (lo_s, tail) = rest;
        let mut it = tail.splitn(2, ':');
        let hi_s = it.next().ok_or("missing hi in lo:hi:logN")?;
        let n_s = it.next().ok_or("missing logN in lo:hi:logN")?;
        let n: usize = n_s
            .strip_prefix("log")
            .ok_or_else(|| format!("expected logN, got {n_s:?}"))?
            .parse()
            .map_err(|_| format!("bad count in {n_s:?}"))?;
        let lo: f64 = lo_s.parse().map_err(|_| format!("bad lo {lo_s:?}"))?;
        let hi: f64 = hi_s.parse().map_err(|_| format!("bad hi {hi_s:?}"))?;
        if !(lo > 0.0 && hi > lo && n >= 2) {
            return Err(format!("need 0 < lo < hi and N >= 2 in {s:?}"));
        }
        return Ok((0..n)
            .map(|j| lo * (hi / lo).powf(j as f64 / (n - 1) as f64))
            .collect());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid t value {v:?}"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_grid_forms() {
        assert_eq!(parse_t_grid("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_t_grid("0.1,0.2").unwrap(), vec![0.1, 0.2]);
        let g = parse_t_grid("0.01:0.1:log8").unwrap();
        assert_eq!(g.len(), 8);
        assert!((g[0] - 0.01).abs() < 1e-15);
        assert!((g[7] - 0.1).abs() < 1e-15);
        assert!(parse_t_grid("0.1:0.01:log8").is_err());
    }

    #[test]
    fn p_forms() {
        assert_eq!(parse_p("2").unwrap(), 2.0);
        assert_eq!(parse_p("inf").unwrap(), f64::INFINITY);
        assert!(parse_p("-1").is_err());
    }
}
