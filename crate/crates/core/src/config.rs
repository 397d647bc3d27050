//! Scenario configuration: a flat TOML table with reference defaults and
//! `key=value` overrides.

use serde::{Deserialize, Serialize};

use crate::analytic::AnalyticParams;
use crate::beamforming::BeamformerKind;
use crate::channel::{ChannelParams, ModelTag, PracticalChannelParams, SimplifiedChannelParams};
use crate::error::{Error, Result};
use crate::numerics::db_to_linear;
use crate::uplink::{RaReceiverMode, UplinkConfig};
use crate::vcs::DEFAULT_MAX_ATTEMPTS;

pub const DEFAULT_TRIALS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelTag,
    pub beamformer: BeamformerKind,
    #[serde(alias = "M")]
    pub m: usize,
    /// Path count; `M/2` when absent.
    #[serde(alias = "Q", skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(alias = "N_A")]
    pub n_a: usize,
    #[serde(alias = "N_L")]
    pub n_l: usize,
    #[serde(alias = "N_R")]
    pub n_r: usize,
    #[serde(alias = "N_C")]
    pub n_c: usize,
    pub lambda_db: f64,
    /// Virtual-carrier SNR; `inf` disables sensing noise.
    pub rho_v_db: f64,
    pub rho_u_db: f64,
    pub phi_s_deg: f64,
    pub omega: f64,
    pub phi_a_min_deg: f64,
    pub phi_a_max_deg: f64,
    pub ra_receiver_mode: RaReceiverMode,
    pub seed: u64,
    /// Seed of the shared simplified-model basis; the scenario seed when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_seed: Option<u64>,
    pub trials: usize,
    pub max_attempts: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            model: ModelTag::Simplified,
            beamformer: BeamformerKind::Cb,
            m: 100,
            q: None,
            n_a: 8,
            n_l: 8,
            n_r: 10,
            n_c: 1,
            lambda_db: 4.0,
            rho_v_db: f64::INFINITY,
            rho_u_db: -10.0,
            phi_s_deg: 20.0,
            omega: 0.5,
            phi_a_min_deg: -60.0,
            phi_a_max_deg: 60.0,
            ra_receiver_mode: RaReceiverMode::Direct,
            seed: 1,
            basis_seed: None,
            trials: DEFAULT_TRIALS,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }
}

impl ScenarioConfig {
    /// Parses a TOML document, applies `overrides` (`key=value`, later wins) and validates.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| parse_error(text, &e))?;
        for raw in overrides {
            let (key, value) = split_override(raw)?;
            table.insert(key, value);
        }
        let cfg: ScenarioConfig =
            toml::Value::Table(table)
                .try_into()
                .map_err(|e: toml::de::Error| Error::Parse {
                    location: "config".into(),
                    message: e.message().to_string(),
                })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn q(&self) -> usize {
        self.q.unwrap_or(self.m / 2)
    }

    pub fn basis_seed(&self) -> u64 {
        self.basis_seed.unwrap_or(self.seed)
    }

    pub fn rho_u(&self) -> f64 {
        db_to_linear(self.rho_u_db)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        if self.m < 1 {
            return fail("M must be at least 1".into());
        }
        let q = self.q();
        if q < 1 || q > self.m {
            return fail(format!("Q={q} must satisfy 1 <= Q <= M={}", self.m));
        }
        if self.n_a < 1 {
            return fail("N_A must be at least 1".into());
        }
        if self.n_l == 0 || !self.n_l.is_power_of_two() {
            return fail(format!("N_L={} must be a power of two", self.n_l));
        }
        if self.n_a > self.n_l {
            return fail(format!(
                "N_A={} exceeds the code length N_L={}",
                self.n_a, self.n_l
            ));
        }
        if self.n_a > self.m {
            return fail(format!("N_A={} exceeds M={}", self.n_a, self.m));
        }
        if self.n_c < 1 {
            return fail("N_C must be at least 1".into());
        }
        if self.trials < 1 {
            return fail("trials must be at least 1".into());
        }
        if self.max_attempts < 1 {
            return fail("max_attempts must be at least 1".into());
        }
        if self.lambda_db.is_nan() || self.lambda_db == f64::NEG_INFINITY {
            return fail(format!(
                "lambda_db={} is not a usable threshold",
                self.lambda_db
            ));
        }
        if self.rho_v_db.is_nan() || self.rho_v_db == f64::NEG_INFINITY {
            return fail(format!("rho_v_db={} is not a usable SNR", self.rho_v_db));
        }
        if !self.rho_u_db.is_finite() {
            return fail(format!("rho_u_db={} must be finite", self.rho_u_db));
        }
        if self.model == ModelTag::Practical {
            self.practical_params().validate()?;
        }
        Ok(())
    }

    pub fn practical_params(&self) -> PracticalChannelParams {
        PracticalChannelParams {
            m: self.m,
            q: self.q(),
            omega: self.omega,
            phi_a_range: (self.phi_a_min_deg, self.phi_a_max_deg),
            phi_s: self.phi_s_deg,
        }
    }

    pub fn channel_params(&self) -> ChannelParams {
        match self.model {
            ModelTag::Practical => ChannelParams::Practical(self.practical_params()),
            ModelTag::Simplified => ChannelParams::Simplified(SimplifiedChannelParams {
                m: self.m,
                q: self.q(),
                basis_seed: self.basis_seed(),
            }),
        }
    }

    pub fn uplink(&self) -> UplinkConfig {
        UplinkConfig {
            rho_u_db: self.rho_u_db,
            ra_receiver_mode: self.ra_receiver_mode,
        }
    }

    /// Closed-form parameters; only the simplified model has them.
    pub fn analytic_params(&self) -> Result<AnalyticParams> {
        if self.model != ModelTag::Simplified {
            return Err(Error::ModelMismatch(
                "closed forms are only defined for the simplified model".into(),
            ));
        }
        Ok(AnalyticParams {
            m: self.m,
            q: self.q(),
            n_a: self.n_a,
            lambda_db: self.lambda_db,
            n_c: self.n_c,
            rho_u: self.rho_u(),
            n_r: self.n_r,
        })
    }

    /// Fully resolved configuration as TOML, one `key = value` per line.
    pub fn to_toml(&self) -> String {
        let mut resolved = self.clone();
        resolved.q = Some(self.q());
        resolved.basis_seed = Some(self.basis_seed());
        toml::to_string(&resolved).unwrap_or_default()
    }
}

fn split_override(raw: &str) -> Result<(String, toml::Value)> {
    let Some((key, value)) = raw.split_once('=') else {
        return Err(Error::Parse {
            location: format!("--set {raw}"),
            message: "expected key=value".into(),
        });
    };
    let (key, value) = (key.trim(), value.trim());
    if key.is_empty() {
        return Err(Error::Parse {
            location: format!("--set {raw}"),
            message: "empty key".into(),
        });
    }
    // bare words such as `practical` are taken as strings
    let parsed = toml::from_str::<toml::Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    Ok((key.to_string(), parsed))
}

fn parse_error(text: &str, e: &toml::de::Error) -> Error {
    let location = match e.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("line {line}")
        }
        None => "config".into(),
    };
    Error::Parse {
        location,
        message: e.message().to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_reference_defaults() {
        let c = ScenarioConfig::parse("", &[]).unwrap();
        assert_eq!(c, ScenarioConfig::default());
        assert_eq!((c.m, c.q(), c.n_a, c.n_l), (100, 50, 8, 8));
        assert_eq!(
            (c.phi_s_deg, c.omega, c.phi_a_min_deg, c.phi_a_max_deg),
            (20.0, 0.5, -60.0, 60.0)
        );
    }

    #[test]
    fn file_values_and_overrides() {
        let text = "model = \"practical\"\nM = 200\nbeamformer = \"zf\"\nrho_v_db = 10.0\n";
        let c = ScenarioConfig::parse(
            text,
            &[
                "n_r=4".into(),
                "model=simplified".into(),
                "lambda_db = -2".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.m, 200);
        assert_eq!(c.q(), 100);
        assert_eq!(c.beamformer, BeamformerKind::Zf);
        assert_eq!(c.model, ModelTag::Simplified);
        assert_eq!(c.n_r, 4);
        assert_eq!(c.lambda_db, -2.0);
        assert_eq!(c.rho_v_db, 10.0);
    }

    #[test]
    fn infinite_snr_literal() {
        let c = ScenarioConfig::parse("rho_v_db = inf", &[]).unwrap();
        assert_eq!(c.rho_v_db, f64::INFINITY);
    }

    #[test]
    fn validation_failures() {
        for (text, needle) in [
            ("n_l = 6", "power of two"),
            ("q = 200", "Q=200"),
            ("n_a = 9", "code length"),
            ("n_c = 0", "N_C"),
            (
                "model = \"practical\"\nphi_a_max_deg = 175.0",
                "AOA interval",
            ),
        ] {
            match ScenarioConfig::parse(text, &[]) {
                Err(Error::Validation(msg)) => assert!(msg.contains(needle), "{text}: {msg}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn parse_failures_carry_location() {
        match ScenarioConfig::parse("m = 100\nm = = 3\n", &[]) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "line 2"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            ScenarioConfig::parse("bogus = 1", &[]),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            ScenarioConfig::parse("", &["novalue".into()]),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            ScenarioConfig::parse("model = \"fancy\"", &[]),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn resolved_toml_round_trips() {
        let c = ScenarioConfig::parse("model = \"practical\"\nrho_u_db = 0.0", &[]).unwrap();
        let text = c.to_toml();
        assert!(text.contains("q = 50"));
        let back = ScenarioConfig::parse(&text, &[]).unwrap();
        assert_eq!(back.channel_params(), c.channel_params());
        assert_eq!(back.rho_u_db, 0.0);
    }

    #[test]
    fn analytic_params_need_simplified_model() {
        let c = ScenarioConfig::default();
        let p = c.analytic_params().unwrap();
        assert_eq!((p.m, p.q, p.n_a, p.n_r), (100, 50, 8, 10));
        assert!((p.rho_u - 0.1).abs() < 1e-15);
        let pr = ScenarioConfig {
            model: ModelTag::Practical,
            ..c
        };
        assert!(matches!(pr.analytic_params(), Err(Error::ModelMismatch(_))));
    }
}
