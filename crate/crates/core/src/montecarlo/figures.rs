use std::fmt;
use std::str::FromStr;

use crate::analytic::{
    calibrate_lambda, p_av_multi, p_av_single, AnalyticParams, CalibrationTarget,
};
use crate::beamforming::BeamformerKind;
use crate::channel::ModelTag;
use crate::config::{ScenarioConfig, DEFAULT_TRIALS};
use crate::error::{Error, Result};
use crate::numerics::db_to_linear;

use super::sweep::analytic_rate;
use super::{estimate_rate_grid, AvailabilitySamples, Cell, Execution, RateReport, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
    Fig12,
    Fig13,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8,
        FigureId::Fig9,
        FigureId::Fig10,
        FigureId::Fig11,
        FigureId::Fig12,
        FigureId::Fig13,
    ];

    pub fn number(self) -> u8 {
        FigureId::ALL.iter().position(|&f| f == self).unwrap() as u8 + 5
    }

    pub fn title(self) -> &'static str {
        match self {
            FigureId::Fig5 => "availability vs threshold, simplified model",
            FigureId::Fig6 => "availability vs threshold, practical model",
            FigureId::Fig7 => "assigned-UE rate vs N_R, simplified model, rho_U = -10 dB",
            FigureId::Fig8 => "assigned-UE rate vs N_R, simplified model, rho_U = 0 dB",
            FigureId::Fig9 => "assigned-UE rate vs N_R, practical model, rho_U = -10 dB",
            FigureId::Fig10 => "assigned-UE rate vs N_R, practical model, rho_U = 0 dB",
            FigureId::Fig11 => "assigned-UE rate vs M, practical model, N_R = 8",
            FigureId::Fig12 => "sum rate vs N_R with CB, practical model",
            FigureId::Fig13 => "sum rate vs N_R with ZF, practical model",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fig{}", self.number())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        FigureId::ALL
            .into_iter()
            .find(|f| f.to_string() == lower)
            .ok_or_else(|| Error::UnknownFigure(s.to_string()))
    }
}

/// Availability levels targeted by the rate figures.
pub const AVAILABILITY_TARGETS: [f64; 2] = [0.8, 0.98];
/// Channel count the availability targets refer to.
pub const TARGET_CHANNELS: usize = 100;
/// Thresholds used for the practical model, where no closed form exists.
pub const PRACTICAL_THRESHOLDS_DB: [f64; 2] = [0.0, 4.0];

const AVAILABILITY_GRID_DB: std::ops::RangeInclusive<i32> = -4..=8;
const AVAILABILITY_CHANNELS: [usize; 3] = [1, 10, 100];
const RATE_SNRS_DB: [f64; 2] = [-10.0, 0.0];
const FIG11_ANTENNAS: [usize; 6] = [50, 100, 150, 200, 250, 300];
const FIG11_RA: usize = 8;
const MAX_RA: usize = 10;

/// `(target, lambda_db)` pairs for the rate figures under `model` with `m` antennas.
pub fn rate_thresholds(model: ModelTag, m: usize) -> Result<Vec<(f64, f64)>> {
    match model {
        ModelTag::Practical => Ok(AVAILABILITY_TARGETS
            .into_iter()
            .zip(PRACTICAL_THRESHOLDS_DB)
            .collect()),
        ModelTag::Simplified => AVAILABILITY_TARGETS
            .into_iter()
            .map(|p| {
                let target = CalibrationTarget::Availability {
                    p,
                    n_c: TARGET_CHANNELS,
                };
                Ok((p, calibrate_lambda(target, &AnalyticParams::table1(m))?))
            })
            .collect(),
    }
}

/// Reference scenario shared by every figure: `M = 100`, Table-1 geometry.
pub fn figure_scenario(model: ModelTag, seed: u64, trials: usize) -> ScenarioConfig {
    ScenarioConfig {
        model,
        seed,
        trials,
        ..ScenarioConfig::default()
    }
}

/// Default trial count scaled by `trials_scale ∈ (0, 1]`, at least one.
pub fn scaled_trials(trials_scale: f64) -> Result<usize> {
    if !(trials_scale > 0.0 && trials_scale <= 1.0) {
        return Err(Error::Validation(format!(
            "trials scale {trials_scale} must lie in (0, 1]"
        )));
    }
    Ok(((DEFAULT_TRIALS as f64 * trials_scale).round() as usize).max(1))
}

/// Regenerates the data behind one figure on its fixed parameter grid.
pub fn reproduce_figure(
    fig: FigureId,
    trials_scale: f64,
    seed: u64,
    exec: Execution,
) -> Result<Table> {
    let trials = scaled_trials(trials_scale)?;
    let mut table = match fig {
        FigureId::Fig5 => availability_figure(ModelTag::Simplified, seed, trials, exec)?,
        FigureId::Fig6 => availability_figure(ModelTag::Practical, seed, trials, exec)?,
        FigureId::Fig7 => rate_vs_ra_figure(ModelTag::Simplified, -10.0, seed, trials, exec)?,
        FigureId::Fig8 => rate_vs_ra_figure(ModelTag::Simplified, 0.0, seed, trials, exec)?,
        FigureId::Fig9 => rate_vs_ra_figure(ModelTag::Practical, -10.0, seed, trials, exec)?,
        FigureId::Fig10 => rate_vs_ra_figure(ModelTag::Practical, 0.0, seed, trials, exec)?,
        FigureId::Fig11 => rate_vs_antennas_figure(seed, trials, exec)?,
        FigureId::Fig12 => sum_rate_figure(BeamformerKind::Cb, seed, trials, exec)?,
        FigureId::Fig13 => sum_rate_figure(BeamformerKind::Zf, seed, trials, exec)?,
    };
    table
        .notes
        .insert(0, ("figure".into(), format!("{fig}: {}", fig.title())));
    table.notes.insert(1, ("trials".into(), trials.to_string()));
    table.notes.insert(2, ("seed".into(), seed.to_string()));
    Ok(table)
}

fn availability_figure(
    model: ModelTag,
    seed: u64,
    trials: usize,
    exec: Execution,
) -> Result<Table> {
    let cfg = figure_scenario(model, seed, trials);
    let max_c = *AVAILABILITY_CHANNELS.iter().max().unwrap();
    let samples = AvailabilitySamples::draw(&cfg, trials, max_c, exec)?;
    let mut table = Table::new(&["lambda_db", "n_c", "p_sim", "p_analytic", "ci"]);
    table.note("model", model);
    for &n_c in &AVAILABILITY_CHANNELS {
        for db in AVAILABILITY_GRID_DB {
            let lambda_db = db as f64;
            let est = samples.p_multi(lambda_db, n_c);
            let analytic = match cfg.analytic_params() {
                Ok(p) => Some(p_av_multi(
                    p_av_single(&AnalyticParams { lambda_db, ..p })?,
                    n_c,
                )?),
                Err(_) => None,
            };
            table.push(vec![
                lambda_db.into(),
                n_c.into(),
                est.mean.into(),
                analytic.into(),
                est.ci_halfwidth.into(),
            ]);
        }
    }
    Ok(table)
}

const RATE_COLUMNS: [&str; 15] = [
    "beamformer",
    "p_target",
    "lambda_db",
    "rho_u_db",
    "m",
    "n_r",
    "upper_rate",
    "vcs_rate",
    "unfiltered_rate",
    "upper_ci",
    "vcs_ci",
    "unfiltered_ci",
    "upper_analytic",
    "vcs_analytic",
    "unfiltered_analytic",
];

fn rate_row(cfg: &ScenarioConfig, p_target: f64, r: &RateReport) -> Result<Vec<Cell>> {
    let analytic = |n_r: usize, lambda_db: f64| -> Result<Option<f64>> {
        match cfg.analytic_params() {
            Ok(p) => analytic_rate(
                cfg.beamformer,
                &AnalyticParams {
                    n_r,
                    lambda_db,
                    rho_u: db_to_linear(r.rho_u_db),
                    ..p
                },
            ),
            Err(Error::ModelMismatch(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    Ok(vec![
        r.beamformer.to_string().into(),
        p_target.into(),
        r.lambda_db.into(),
        r.rho_u_db.into(),
        cfg.m.into(),
        r.n_r.into(),
        r.upper_rate.mean.into(),
        r.vcs_rate.mean.into(),
        r.unfiltered_rate.mean.into(),
        r.upper_rate.ci_halfwidth.into(),
        r.vcs_rate.ci_halfwidth.into(),
        r.unfiltered_rate.ci_halfwidth.into(),
        analytic(0, r.lambda_db)?.into(),
        analytic(r.n_r, r.lambda_db)?.into(),
        analytic(r.n_r, f64::INFINITY)?.into(),
    ])
}

fn rate_vs_ra_figure(
    model: ModelTag,
    rho_db: f64,
    seed: u64,
    trials: usize,
    exec: Execution,
) -> Result<Table> {
    let base = figure_scenario(model, seed, trials);
    let n_r_grid: Vec<usize> = (0..=MAX_RA).collect();
    let mut table = Table::new(&RATE_COLUMNS);
    table.note("model", model);
    for kind in [BeamformerKind::Cb, BeamformerKind::Zf] {
        for (p, lambda_db) in rate_thresholds(model, base.m)? {
            let cfg = ScenarioConfig {
                beamformer: kind,
                lambda_db,
                rho_u_db: rho_db,
                ..base.clone()
            };
            let grid = estimate_rate_grid(&cfg, &n_r_grid, &[rho_db], exec)?;
            for r in &grid[0] {
                table.push(rate_row(&cfg, p, r)?);
            }
        }
    }
    Ok(table)
}

fn rate_vs_antennas_figure(seed: u64, trials: usize, exec: Execution) -> Result<Table> {
    let rho_db = RATE_SNRS_DB[0];
    let mut table = Table::new(&RATE_COLUMNS);
    table.note("model", ModelTag::Practical);
    for kind in [BeamformerKind::Cb, BeamformerKind::Zf] {
        for (p, lambda_db) in rate_thresholds(ModelTag::Practical, 100)? {
            for &m in &FIG11_ANTENNAS {
                let cfg = ScenarioConfig {
                    m,
                    beamformer: kind,
                    lambda_db,
                    rho_u_db: rho_db,
                    n_r: FIG11_RA,
                    ..figure_scenario(ModelTag::Practical, seed, trials)
                };
                let grid = estimate_rate_grid(&cfg, &[FIG11_RA], &[rho_db], exec)?;
                table.push(rate_row(&cfg, p, &grid[0][0])?);
            }
        }
    }
    Ok(table)
}

fn sum_rate_figure(
    kind: BeamformerKind,
    seed: u64,
    trials: usize,
    exec: Execution,
) -> Result<Table> {
    let rho_db = RATE_SNRS_DB[0];
    let n_r_grid: Vec<usize> = (0..=MAX_RA).collect();
    let mut table = Table::new(&[
        "beamformer",
        "p_target",
        "lambda_db",
        "n_r",
        "assigned_sum_upper",
        "assigned_sum_vcs",
        "ra_sum_rate_direct",
        "ra_sum_rate_projected",
        "total_sum_rate",
        "total_ci",
        "gain",
    ]);
    table.note("model", ModelTag::Practical);
    table.note(
        "ra_receiver_mode",
        ScenarioConfig::default().ra_receiver_mode,
    );
    for (p, lambda_db) in rate_thresholds(ModelTag::Practical, 100)? {
        let cfg = ScenarioConfig {
            beamformer: kind,
            lambda_db,
            rho_u_db: rho_db,
            ..figure_scenario(ModelTag::Practical, seed, trials)
        };
        let grid = estimate_rate_grid(&cfg, &n_r_grid, &[rho_db], exec)?;
        for r in &grid[0] {
            let n_a = r.n_a as f64;
            table.push(vec![
                kind.to_string().into(),
                p.into(),
                lambda_db.into(),
                r.n_r.into(),
                (n_a * r.upper_rate.mean).into(),
                (n_a * r.vcs_rate.mean).into(),
                r.ra_sum_rate_direct.mean.into(),
                r.ra_sum_rate_projected.mean.into(),
                r.total_sum_rate.mean.into(),
                r.total_sum_rate.ci_halfwidth.into(),
                r.sum_rate_gain().into(),
            ]);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_ids_parse() {
        for f in FigureId::ALL {
            assert_eq!(f.to_string().parse::<FigureId>().unwrap(), f);
        }
        assert_eq!("FIG12".parse::<FigureId>().unwrap(), FigureId::Fig12);
        assert_eq!(
            "fig4".parse::<FigureId>(),
            Err(Error::UnknownFigure("fig4".into()))
        );
    }

    #[test]
    fn trial_scaling() {
        assert_eq!(scaled_trials(1.0).unwrap(), DEFAULT_TRIALS);
        assert_eq!(scaled_trials(0.1).unwrap(), DEFAULT_TRIALS / 10);
        assert_eq!(scaled_trials(1e-9).unwrap(), 1);
        for bad in [0.0, -0.5, 1.5, f64::NAN] {
            assert!(scaled_trials(bad).is_err());
        }
    }

    #[test]
    fn thresholds_increase_with_target() {
        for model in [ModelTag::Simplified, ModelTag::Practical] {
            let t = rate_thresholds(model, 100).unwrap();
            assert_eq!(t.len(), 2);
            assert!(t[0].1 < t[1].1);
        }
    }

    #[test]
    fn fig5_has_its_grid_and_columns() {
        let t = reproduce_figure(FigureId::Fig5, 0.004, 3, Execution::default()).unwrap();
        assert_eq!(t.columns, ["lambda_db", "n_c", "p_sim", "p_analytic", "ci"]);
        assert_eq!(t.rows.len(), 13 * 3);
        assert!(t
            .numbers("p_analytic")
            .unwrap()
            .iter()
            .all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn fig6_has_no_closed_form() {
        let t = reproduce_figure(FigureId::Fig6, 0.001, 3, Execution::default()).unwrap();
        assert!(t.numbers("p_analytic").unwrap().iter().all(|p| p.is_nan()));
    }

    #[test]
    fn fig7_rows_cover_both_beamformers() {
        let t = reproduce_figure(FigureId::Fig7, 0.001, 3, Execution::default()).unwrap();
        assert_eq!(t.rows.len(), 2 * 2 * (MAX_RA + 1));
        let kinds = t.texts("beamformer").unwrap();
        assert_eq!(
            kinds.iter().filter(|k| *k == "zf").count(),
            2 * (MAX_RA + 1)
        );
        let upper = t.numbers("upper_rate").unwrap();
        let vcs = t.numbers("vcs_rate").unwrap();
        let n_r = t.numbers("n_r").unwrap();
        for i in 0..t.rows.len() {
            if n_r[i] == 0.0 {
                assert_eq!(upper[i], vcs[i]);
            }
        }
        assert!(t
            .numbers("vcs_analytic")
            .unwrap()
            .iter()
            .all(|r| r.is_finite() && *r > 0.0));
    }
}
