//! JSON simulation configuration.

use serde::{Deserialize, Deserializer, Serialize};
use tbmc_core::channel::ScenarioGeometry;
use tbmc_core::decoder::DecoderConfig;
use tbmc_core::phy::{SchemeConfig, SchemeParams};

use crate::{SimError, SimResult};

/// A named preset or a full parameter set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemeSpec {
    Preset(String),
    Inline(SchemeParams),
}

impl SchemeSpec {
    pub fn build(&self) -> SimResult<SchemeConfig> {
        Ok(match self {
            SchemeSpec::Preset(name) => SchemeConfig::preset(name)?,
            SchemeSpec::Inline(p) => SchemeConfig::new(p.clone())?,
        })
    }
}

/// Bracket scan and bisection settings of the minimum-Eb/N0 search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSpec {
    pub start_db: f64,
    /// First scan step; later steps double.
    pub step_db: f64,
    pub max_scan_steps: usize,
    pub tol_db: f64,
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec { start_db: -5.0, step_db: 1.0, max_scan_steps: 6, tol_db: 0.25 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub scheme: SchemeSpec,
    #[serde(deserialize_with = "one_or_many")]
    pub ka: Vec<usize>,
    pub m: usize,
    /// Operating points of `simulate`.
    #[serde(deserialize_with = "one_or_many")]
    pub ebn0_db: Vec<f64>,
    pub search: SearchSpec,
    /// Absent means unit large-scale fading for every user.
    pub geometry: Option<ScenarioGeometry>,
    /// Cell radii visited by `fading-sweep`.
    pub r_max_sweep: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub decoder: DecoderConfig,
    pub epsilon: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            scheme: SchemeSpec::Preset("tbmc-5554".into()),
            ka: vec![10],
            m: 16,
            ebn0_db: Vec::new(),
            search: SearchSpec::default(),
            geometry: None,
            r_max_sweep: Vec::new(),
            trials: 200,
            master_seed: 0,
            decoder: DecoderConfig::default(),
            epsilon: 0.1,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

fn one_or_many<'de, D, T>(d: D) -> Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    })
}

impl SimConfig {
    pub fn from_json(text: &str) -> SimResult<Self> {
        serde_json::from_str(text).map_err(|e| SimError::Config(e.to_string()))
    }

    pub fn validate(&self) -> SimResult<SchemeConfig> {
        let bad = |m: String| Err(SimError::Config(m));
        if self.trials == 0 {
            return bad("trials must be ≥ 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon {} outside (0, 1)", self.epsilon));
        }
        if self.m == 0 {
            return bad("need at least one receive antenna".into());
        }
        if self.ka.is_empty() || self.ka.contains(&0) {
            return bad("ka must list at least one positive user count".into());
        }
        if self.ebn0_db.iter().any(|x| !x.is_finite()) {
            return bad("ebn0_db values must be finite".into());
        }
        let s = &self.search;
        if !(s.tol_db > 0.0 && s.step_db > 0.0 && s.start_db.is_finite()) {
            return bad("search needs finite start_db and positive step_db, tol_db".into());
        }
        if let Some(g) = &self.geometry {
            g.validate()?;
        }
        if self.r_max_sweep.iter().any(|&r| !r.is_finite() || r <= 0.0) {
            return bad("r_max_sweep values must be positive".into());
        }
        self.decoder.validate()?;
        let scheme = self.scheme.build()?;
        if let Some(&k) = self.ka.iter().find(|&&k| (k as f64) > 2f64.powi(scheme.b.min(60) as i32)) {
            return bad(format!("{k} distinct messages do not fit in {} bits", scheme.b));
        }
        Ok(scheme)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = SimConfig::default();
        assert_eq!(c.validate().unwrap().n, 1000);
        assert_eq!((c.m, c.epsilon), (16, 0.1));
    }

    #[test]
    fn parses_scalars_lists_and_inline_schemes() {
        let c = SimConfig::from_json(r#"{"ka": 20, "ebn0_db": [-7.5, -7], "trials": 5}"#).unwrap();
        assert_eq!(c.ka, vec![20]);
        assert_eq!(c.ebn0_db, vec![-7.5, -7.0]);
        let inline = serde_json::to_string(&SchemeParams::tbm_40x25()).unwrap();
        let c = SimConfig::from_json(&format!(r#"{{"scheme": {inline}}}"#)).unwrap();
        assert!(!c.validate().unwrap().has_coherent());
        let c = SimConfig::from_json(r#"{"geometry": {"r_min": 10, "r_max": 167, "beta": 35.3}}"#).unwrap();
        assert!(c.validate().is_ok());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(SimConfig::from_json(r#"{"kA": 3}"#).is_err());
        assert!(SimConfig::from_json(r#"{"decoder": {"jmax": 3}}"#).is_err());
        assert!(SimConfig::from_json(r#"{"search": {"tol": 1}}"#).is_err());
        for bad in [r#"{"trials": 0}"#, r#"{"epsilon": 1.0}"#, r#"{"ka": []}"#, r#"{"scheme": "nope"}"#] {
            let e = SimConfig::from_json(bad).unwrap().validate().unwrap_err();
            assert_eq!(e.exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn serializes_back_to_an_equal_config() {
        let c = SimConfig { geometry: Some(ScenarioGeometry::umi(167.0).unwrap()), ..Default::default() };
        let back = SimConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
