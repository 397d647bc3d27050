use std::fmt;
use std::str::FromStr;

use crate::analytic::{
    asymptotic_rate, asymptotic_sinr_cb, asymptotic_sinr_zf, p_av_multi, p_av_single,
    AnalyticParams,
};
use crate::beamforming::BeamformerKind;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};

use super::{estimate_p_av, estimate_rates, Cell, Execution, Table};

/// Scenario field varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    LambdaDb,
    NR,
    M,
    NC,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::LambdaDb => "lambda_db",
            SweepAxis::NR => "n_r",
            SweepAxis::M => "m",
            SweepAxis::NC => "n_c",
        }
    }

    /// Copy of `cfg` with this axis set to `value`; integer axes reject fractions.
    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut out = cfg.clone();
        if self == SweepAxis::LambdaDb {
            out.lambda_db = value;
            return Ok(out);
        }
        if !(value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
            return Err(Error::Validation(format!(
                "{} grid value {value} is not a count",
                self.name()
            )));
        }
        let n = value as usize;
        match self {
            SweepAxis::NR => out.n_r = n,
            SweepAxis::NC => out.n_c = n,
            SweepAxis::M => {
                // keep Q = M/2 unless the scenario pinned it
                out.m = n;
            }
            SweepAxis::LambdaDb => unreachable!(),
        }
        Ok(out)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lambda_db" | "lambda" => Ok(SweepAxis::LambdaDb),
            "n_r" | "nr" => Ok(SweepAxis::NR),
            "m" => Ok(SweepAxis::M),
            "n_c" | "nc" => Ok(SweepAxis::NC),
            _ => Err(Error::Validation(format!(
                "unknown sweep axis `{s}` (lambda_db, n_r, m, n_c)"
            ))),
        }
    }
}

pub const SUMMARY_COLUMNS: [&str; 16] = [
    "lambda_db",
    "n_r",
    "m",
    "n_c",
    "beamformer",
    "p_sim",
    "p_ci",
    "p_analytic",
    "upper_rate",
    "vcs_rate",
    "unfiltered_rate",
    "vcs_rate_ci",
    "vcs_rate_analytic",
    "ra_sum_rate",
    "total_sum_rate",
    "acceptance_rate",
];

/// Closed-form rate for `kind`, or `None` where the closed form is undefined
/// (availability below the numerical floor, or ZF without enough paths).
pub fn analytic_rate(kind: BeamformerKind, params: &AnalyticParams) -> Result<Option<f64>> {
    let sinr = match kind {
        BeamformerKind::Cb => asymptotic_sinr_cb(params),
        BeamformerKind::Zf => asymptotic_sinr_zf(params),
    };
    match sinr {
        Ok(g) => Ok(Some(asymptotic_rate(g))),
        Err(Error::DegenerateThreshold { .. } | Error::Domain(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn summary_row(cfg: &ScenarioConfig, exec: Execution) -> Result<Vec<Cell>> {
    let p = estimate_p_av(cfg, exec)?;
    let rates = estimate_rates(cfg, exec)?;
    let (p_analytic, rate_analytic) = match cfg.analytic_params() {
        Ok(params) => (
            Some(p_av_multi(p_av_single(&params)?, cfg.n_c)?),
            analytic_rate(cfg.beamformer, &params)?,
        ),
        Err(Error::ModelMismatch(_)) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(vec![
        cfg.lambda_db.into(),
        cfg.n_r.into(),
        cfg.m.into(),
        cfg.n_c.into(),
        cfg.beamformer.to_string().into(),
        p.mean.into(),
        p.ci_halfwidth.into(),
        p_analytic.into(),
        rates.upper_rate.mean.into(),
        rates.vcs_rate.mean.into(),
        rates.unfiltered_rate.mean.into(),
        rates.vcs_rate.ci_halfwidth.into(),
        rate_analytic.into(),
        rates.ra_sum_rate().mean.into(),
        rates.total_sum_rate.mean.into(),
        rates.acceptance_rate.into(),
    ])
}

/// Availability and rate estimates for one scenario, as a one-row table.
pub fn simulate(cfg: &ScenarioConfig, exec: Execution) -> Result<Table> {
    cfg.validate()?;
    let mut table = Table::new(&SUMMARY_COLUMNS);
    table.push(summary_row(cfg, exec)?);
    Ok(table)
}

/// One [`simulate`] row per grid value, every other field held fixed.
pub fn sweep(
    cfg: &ScenarioConfig,
    axis: SweepAxis,
    grid: &[f64],
    exec: Execution,
) -> Result<Table> {
    if grid.is_empty() {
        return Err(Error::Validation("sweep grid is empty".into()));
    }
    let increasing = grid.windows(2).all(|w| w[0] < w[1]);
    let decreasing = grid.windows(2).all(|w| w[0] > w[1]);
    if !(increasing || decreasing) || grid.iter().any(|v| v.is_nan()) {
        return Err(Error::Validation(
            "sweep grid must be strictly monotone".into(),
        ));
    }
    let points = grid
        .iter()
        .map(|&v| axis.apply(cfg, v))
        .collect::<Result<Vec<_>>>()?;
    for p in &points {
        p.validate()?;
    }
    let mut table = Table::new(&SUMMARY_COLUMNS);
    table.note("axis", axis);
    for p in &points {
        table.push(summary_row(p, exec)?);
    }
    Ok(table)
}

/// Parses `a:b:step` (inclusive of `b` up to rounding) or a comma list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Validation(format!("grid `{spec}`: {why}"));
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| bad(&format!("`{}` is not a number", s.trim())))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(a.is_finite() && b.is_finite() && step.is_finite())
                || step == 0.0
                || (b - a) * step < 0.0
            {
                return Err(bad("step must be nonzero and point from start to end"));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            if n > 100_000 {
                return Err(bad("more than 100000 points"));
            }
            Ok((0..=n).map(|k| a + k as f64 * step).collect())
        }
        [_] => spec.split(',').map(num).collect(),
        _ => Err(bad("expected a:b:step or a comma-separated list")),
    }
}
