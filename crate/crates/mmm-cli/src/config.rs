//! TOML configuration files: one model section per file, flat key-value
//! pairs, unknown keys rejected. Missing keys fall back to the preset
//! defaults, so a section header alone reproduces the built-in model.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use monotone_markov::models::{
    BeliefShockConfig, DriftIncomeConfig, Law, OuConfig, PureJumpIncomeConfig, WageLadderConfig,
};

use crate::model::Model;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WageSection {
    pub delta: f64,
    pub lambda: f64,
    pub w_bar: f64,
    pub destruction_alpha: f64,
    pub destruction_beta: f64,
    pub destruction_shift: f64,
    pub destruction_scale: f64,
    pub offer_alpha: f64,
    pub offer_beta: f64,
    pub offer_shift: f64,
    pub offer_scale: f64,
}

impl Default for WageSection {
    fn default() -> Self {
        WageSection {
            delta: 0.1,
            lambda: 0.5,
            w_bar: 1.0,
            destruction_alpha: 2.0,
            destruction_beta: 8.0,
            destruction_shift: 0.0,
            destruction_scale: 1.0,
            offer_alpha: 8.0,
            offer_beta: 2.0,
            offer_shift: 0.5,
            offer_scale: 0.5,
        }
    }
}

impl WageSection {
    pub fn build(&self) -> Result<WageLadderConfig, String> {
        let destruction = Law::ScaledBeta {
            alpha: self.destruction_alpha,
            beta: self.destruction_beta,
            shift: self.destruction_shift,
            scale: self.destruction_scale,
        };
        let offer = Law::ScaledBeta {
            alpha: self.offer_alpha,
            beta: self.offer_beta,
            shift: self.offer_shift,
            scale: self.offer_scale,
        };
        let cfg =
            WageLadderConfig::from_laws(self.delta, self.lambda, destruction, offer, self.w_bar)
                .map_err(|e| e.to_string())?;
        // The analytic minorization window wants the destruction law to put
        // mass below the midpoint; fall back to the bare config when it
        // does not apply.
        Ok(cfg
            .clone()
            .with_analytic_mmc(self.w_bar / 2.0, 1)
            .unwrap_or(cfg))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeliefSection {
    pub mu_high: f64,
    pub mu_low: f64,
    pub sigma: f64,
    pub reset_prob: f64,
    pub reset_mean: f64,
    pub reset_sd: f64,
}

impl Default for BeliefSection {
    fn default() -> Self {
        BeliefSection {
            mu_high: 0.3,
            mu_low: 0.0,
            sigma: 1.0,
            reset_prob: 0.04,
            reset_mean: 0.0,
            reset_sd: 0.5,
        }
    }
}

impl BeliefSection {
    pub fn build(&self) -> Result<BeliefShockConfig, String> {
        BeliefShockConfig::with_iid_resets(
            self.mu_high,
            self.mu_low,
            self.sigma,
            self.reset_prob,
            Law::Gaussian {
                mean: self.reset_mean,
                sd: self.reset_sd,
            },
        )
        .map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IncomeJumpSection {
    pub lambda_shock: f64,
    pub lambda_reset: f64,
    pub theta: f64,
    pub x0: f64,
}

impl Default for IncomeJumpSection {
    fn default() -> Self {
        IncomeJumpSection {
            lambda_shock: 1.0,
            lambda_reset: 0.1,
            theta: 20.0,
            x0: 0.0,
        }
    }
}

impl IncomeJumpSection {
    pub fn build(&self) -> Result<PureJumpIncomeConfig, String> {
        PureJumpIncomeConfig::pareto(self.lambda_shock, self.lambda_reset, self.theta, self.x0)
            .map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IncomeDriftSection {
    pub mu: f64,
    pub lambda: f64,
    pub x0: f64,
}

impl Default for IncomeDriftSection {
    fn default() -> Self {
        IncomeDriftSection {
            mu: 0.05,
            lambda: 0.15,
            x0: 0.0,
        }
    }
}

impl IncomeDriftSection {
    pub fn build(&self) -> Result<DriftIncomeConfig, String> {
        DriftIncomeConfig::pure_reset(self.mu, self.lambda, self.x0).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OuSection {
    pub theta: f64,
    pub sigma: f64,
}

impl Default for OuSection {
    fn default() -> Self {
        OuSection {
            theta: 1.0,
            sigma: 1.0,
        }
    }
}

impl OuSection {
    pub fn build(&self) -> Result<OuConfig, String> {
        OuConfig::new(self.theta, self.sigma).map_err(|e| e.to_string())
    }
}

/// A parsed config file. Exactly one model section must be present.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wage: Option<WageSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub belief: Option<BeliefSection>,
    #[serde(rename = "income-jump", skip_serializing_if = "Option::is_none")]
    pub income_jump: Option<IncomeJumpSection>,
    #[serde(rename = "income-drift", skip_serializing_if = "Option::is_none")]
    pub income_drift: Option<IncomeDriftSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ou: Option<OuSection>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: ConfigFile = toml::from_str(text).map_err(|e| e.to_string())?;
        let sections = [
            cfg.wage.is_some(),
            cfg.belief.is_some(),
            cfg.income_jump.is_some(),
            cfg.income_drift.is_some(),
            cfg.ou.is_some(),
        ]
        .iter()
        .filter(|present| **present)
        .count();
        if sections != 1 {
            return Err(format!(
                "expected exactly one model section, found {sections}"
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text =
            fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config sections serialize to TOML")
    }

    pub fn build(&self) -> Result<Model, String> {
        if let Some(s) = &self.wage {
            return Ok(Model::Wage(s.build()?));
        }
        if let Some(s) = &self.belief {
            return Ok(Model::Belief(s.build()?));
        }
        if let Some(s) = &self.income_jump {
            return Ok(Model::IncomeJump(s.build()?));
        }
        if let Some(s) = &self.income_drift {
            return Ok(Model::IncomeDrift(s.build()?));
        }
        if let Some(s) = &self.ou {
            return Ok(Model::Ou(s.build()?));
        }
        Err("no model section".into())
    }
}
