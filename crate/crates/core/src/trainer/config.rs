use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::AdamConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Full,
    NoDensify,
    NoSmooth,
    DenoiseOnly,
    GcnPredictor,
    PlainGcn,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Full,
        Variant::NoDensify,
        Variant::NoSmooth,
        Variant::DenoiseOnly,
        Variant::GcnPredictor,
        Variant::PlainGcn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::NoDensify => "no_densify",
            Variant::NoSmooth => "no_smooth",
            Variant::DenoiseOnly => "denoise_only",
            Variant::GcnPredictor => "gcn_predictor",
            Variant::PlainGcn => "plain_gcn",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Variant::ALL.iter().map(|v| v.name()).collect();
                Error::Config(format!("unknown variant {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// What a variant actually switches on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    /// Learn edge weights with the link predictor (false only for the plain GCN).
    pub learn_structure: bool,
    /// Score cosine candidates in addition to original edges.
    pub densify: bool,
    /// Include the label-smoothness term.
    pub smooth: bool,
    /// Embed with a two-layer GCN over the raw graph instead of the MLP.
    pub gcn_encoder: bool,
}

pub fn apply_variant(cfg: &TrainConfig) -> Flags {
    let v = cfg.variant;
    Flags {
        learn_structure: v != Variant::PlainGcn,
        densify: !matches!(v, Variant::NoDensify | Variant::DenoiseOnly | Variant::PlainGcn),
        smooth: !matches!(v, Variant::NoSmooth | Variant::DenoiseOnly | Variant::PlainGcn),
        gcn_encoder: v == Variant::GcnPredictor,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub q: usize,
    pub k: usize,
    pub t_l: f64,
    pub t_h: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub patience: usize,
    /// Link predictor hidden and embedding width.
    pub predictor_hidden: usize,
    pub gcn_hidden: usize,
    pub dropout: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
    pub variant: Variant,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            alpha: 0.3,
            beta: 0.1,
            sigma: 100.0,
            q: 50,
            k: 100,
            t_l: 0.1,
            t_h: 0.8,
            learning_rate: 0.001,
            max_epochs: 1000,
            patience: 100,
            predictor_hidden: 64,
            gcn_hidden: 64,
            dropout: 0.0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            seed: 0,
            variant: Variant::Full,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be a finite value >= 0, got {}", self.alpha));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be a finite value >= 0, got {}", self.beta));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be > 0, got {}", self.sigma));
        }
        if self.q == 0 || self.k == 0 {
            return bad("Q and K must be >= 1".into());
        }
        if !(0.0..1.0).contains(&self.t_l) {
            return bad(format!("T_l must lie in [0, 1), got {}", self.t_l));
        }
        if !(0.0..1.0).contains(&self.t_h) {
            return bad(format!("T_h must lie in [0, 1), got {}", self.t_h));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate must be > 0, got {}", self.learning_rate));
        }
        if self.max_epochs == 0 || self.patience == 0 {
            return bad("max_epochs and patience must be >= 1".into());
        }
        if self.predictor_hidden == 0 || self.gcn_hidden == 0 {
            return bad("hidden widths must be >= 1".into());
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout must lie in [0, 1), got {}", self.dropout));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) || !(self.adam_eps > 0.0) {
            return bad("Adam betas must lie in [0, 1) and eps must be > 0".into());
        }
        Ok(())
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.learning_rate,
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
            eps: self.adam_eps,
        }
    }

    /// `beta` after the variant's switches.
    pub fn effective_beta(&self) -> f64 {
        if apply_variant(self).smooth {
            self.beta
        } else {
            0.0
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!(matches!("bogus".parse::<Variant>(), Err(Error::Config(_))));
    }

    #[test]
    fn denoise_only_composes_both_restrictions() {
        let flags = |v| apply_variant(&TrainConfig { variant: v, ..Default::default() });
        let a = flags(Variant::NoDensify);
        let u = flags(Variant::NoSmooth);
        let au = flags(Variant::DenoiseOnly);
        assert_eq!(au.densify, a.densify && u.densify);
        assert_eq!(au.smooth, a.smooth && u.smooth);
        assert!(!au.densify && !au.smooth && au.learn_structure);
        assert!(!flags(Variant::PlainGcn).learn_structure);
        assert!(flags(Variant::GcnPredictor).gcn_encoder);
    }

    #[test]
    fn json_is_flat_and_defaults_fill_gaps() {
        let cfg = TrainConfig::from_json(r#"{"alpha": 3.0, "variant": "no_smooth"}"#).unwrap();
        assert_eq!(cfg.alpha, 3.0);
        assert_eq!(cfg.variant, Variant::NoSmooth);
        assert_eq!(cfg.q, 50);
        assert_eq!(cfg.effective_beta(), 0.0);
        let back = TrainConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert!(TrainConfig::from_json(r#"{"gamma": 1}"#).is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        for cfg in [
            TrainConfig { alpha: -1.0, ..Default::default() },
            TrainConfig { t_l: 1.0, ..Default::default() },
            TrainConfig { t_h: -0.1, ..Default::default() },
            TrainConfig { sigma: 0.0, ..Default::default() },
            TrainConfig { q: 0, ..Default::default() },
            TrainConfig { k: 0, ..Default::default() },
        ] {
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{cfg:?}");
        }
        TrainConfig::default().validate().unwrap();
    }
}
