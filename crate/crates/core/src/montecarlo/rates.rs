use crate::beamforming::{orthogonal_complement, BeamformerKind, BeamformerSet};
use crate::channel::ChannelModel;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::numerics::{db_to_linear, ComplexMatrix, RngStream};
use crate::uplink::{ra_sinr_on, sinr_from_responses, sum_rate, RaReceiverMode, SinrBreakdown};
use crate::vcs::sample_admitted_ra_ues;

use super::assigned::retry_singular;
use super::{Estimate, Execution, STREAM_RATES};

/// Ergodic-rate estimates at one `(N_R, ρ_U)` point.
///
/// The three assigned-UE arms share each trial's assigned channels: no RA UEs
/// (upper bound), VCS-admitted RA UEs, and unfiltered RA UEs (lower bound).
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub n_a: usize,
    pub n_r: usize,
    pub rho_u_db: f64,
    pub lambda_db: f64,
    pub beamformer: BeamformerKind,
    /// Per-assigned-UE rate without RA UEs.
    pub upper_rate: Estimate,
    /// Per-assigned-UE rate with VCS-admitted RA UEs.
    pub vcs_rate: Estimate,
    /// Per-assigned-UE rate with unfiltered RA UEs.
    pub unfiltered_rate: Estimate,
    /// RA sum rate with receivers on the raw RA channels.
    pub ra_sum_rate_direct: Estimate,
    /// RA sum rate after projecting out the assigned-UE subspace.
    pub ra_sum_rate_projected: Estimate,
    pub ra_receiver_mode: RaReceiverMode,
    /// `N_A` times the VCS per-assigned rate plus the configured RA sum rate.
    pub total_sum_rate: Estimate,
    /// Admitted over attempted RA draws.
    pub acceptance_rate: f64,
    /// Trials redrawn because a channel set was numerically singular.
    pub singular_redraws: usize,
    pub trials: usize,
}

impl RateReport {
    pub fn ra_sum_rate(&self) -> &Estimate {
        match self.ra_receiver_mode {
            RaReceiverMode::Direct => &self.ra_sum_rate_direct,
            RaReceiverMode::Projected => &self.ra_sum_rate_projected,
        }
    }

    /// Relative per-assigned-UE loss of the VCS arm against the upper bound.
    pub fn vcs_loss(&self) -> f64 {
        1.0 - self.vcs_rate.mean / self.upper_rate.mean
    }

    pub fn unfiltered_loss(&self) -> f64 {
        1.0 - self.unfiltered_rate.mean / self.upper_rate.mean
    }

    /// Total sum rate over the assigned-only (no RA) sum rate, minus one.
    pub fn sum_rate_gain(&self) -> f64 {
        self.total_sum_rate.mean / (self.n_a as f64 * self.upper_rate.mean) - 1.0
    }
}

// per (rho, n_r) point
const UPPER: usize = 0;
const VCS: usize = 1;
const UNFILTERED: usize = 2;
const RA_DIRECT: usize = 3;
const RA_PROJECTED: usize = 4;
const TOTAL: usize = 5;
const FIELDS: usize = 6;

struct TrialOutcome {
    values: Vec<f64>,
    admitted: usize,
    attempts: usize,
    redraws: usize,
}

/// Rate reports for every `(ρ_U, N_R)` pair, indexed `[rho][n_r]`.
///
/// Each trial admits `max(N_R)` RA UEs once; smaller `N_R` use prefixes, and
/// all SNRs reuse the same draws.
pub fn estimate_rate_grid(
    cfg: &ScenarioConfig,
    n_r_grid: &[usize],
    rho_u_db: &[f64],
    exec: Execution,
) -> Result<Vec<Vec<RateReport>>> {
    cfg.validate()?;
    if n_r_grid.is_empty() || rho_u_db.is_empty() {
        return Err(Error::Validation(
            "rate grid needs at least one N_R and one SNR".into(),
        ));
    }
    if let Some(bad) = rho_u_db.iter().find(|r| !r.is_finite()) {
        return Err(Error::Validation(format!(
            "uplink SNR {bad} dB must be finite"
        )));
    }
    let model = ChannelModel::new(&cfg.channel_params())?;
    let n_r_max = *n_r_grid.iter().max().unwrap_or(&0);
    let rhos: Vec<f64> = rho_u_db.iter().map(|&r| db_to_linear(r)).collect();
    let root = RngStream::new(cfg.seed, STREAM_RATES);
    let width = rhos.len() * n_r_grid.len() * FIELDS;

    let outcomes = exec.try_map(cfg.trials, |t| {
        let trial = root.child(t as u64);
        let mut rng = trial.rng();
        let mut unf_rng = trial.child(1).rng();
        let (mut outcome, redraws) = retry_singular(|| {
            let h_a = model.draw_columns(cfg.n_a, &mut rng);
            let b = BeamformerSet::build(cfg.beamformer, &h_a)?;
            let admitted = sample_admitted_ra_ues(
                &b,
                n_r_max,
                cfg.lambda_db,
                &model,
                &mut rng,
                cfg.max_attempts,
            )?;
            let unfiltered = model.draw_columns(n_r_max, &mut unf_rng);

            let own = b.response(&h_a);
            let resp_vcs = b.response(&admitted.h_r);
            let resp_unf = b.response(&unfiltered);
            let projected = orthogonal_complement(&h_a)?.apply_columns(&admitted.h_r);

            let mut values = vec![0.0; width];
            for (j, &n_r) in n_r_grid.iter().enumerate() {
                let direct_eff = admitted.h_r.leading_columns(n_r);
                let proj_eff = projected.leading_columns(n_r);
                let ra_rates = |eff: &ComplexMatrix| -> Result<Vec<f64>> {
                    rhos.iter()
                        .map(|&rho| Ok(sum_rate(&ra_sinr_on(cfg.beamformer, eff, &h_a, rho)?)))
                        .collect()
                };
                let direct = ra_rates(&direct_eff)?;
                let proj = ra_rates(&proj_eff)?;
                for (r, &rho) in rhos.iter().enumerate() {
                    let at = |set: &[SinrBreakdown]| sum_rate(set) / cfg.n_a as f64;
                    let upper = at(&sinr_from_responses(&own, &resp_vcs, 0, rho, cfg.m));
                    let vcs = at(&sinr_from_responses(&own, &resp_vcs, n_r, rho, cfg.m));
                    let unf = at(&sinr_from_responses(&own, &resp_unf, n_r, rho, cfg.m));
                    let ra = match cfg.ra_receiver_mode {
                        RaReceiverMode::Direct => direct[r],
                        RaReceiverMode::Projected => proj[r],
                    };
                    let base = (r * n_r_grid.len() + j) * FIELDS;
                    values[base + UPPER] = upper;
                    values[base + VCS] = vcs;
                    values[base + UNFILTERED] = unf;
                    values[base + RA_DIRECT] = direct[r];
                    values[base + RA_PROJECTED] = proj[r];
                    values[base + TOTAL] = cfg.n_a as f64 * vcs + ra;
                }
            }
            Ok(TrialOutcome {
                values,
                admitted: admitted.h_r.cols(),
                attempts: admitted.attempts,
                redraws: 0,
            })
        })?;
        outcome.redraws = redraws;
        Ok(outcome)
    })?;

    let (admitted, attempts) = outcomes.iter().fold((0usize, 0usize), |(a, b), o| {
        (a + o.admitted, b + o.attempts)
    });
    let singular_redraws = outcomes.iter().map(|o| o.redraws).sum();
    let acceptance_rate = if attempts == 0 {
        1.0
    } else {
        admitted as f64 / attempts as f64
    };
    let column = |idx: usize| -> Estimate {
        let xs: Vec<f64> = outcomes.iter().map(|o| o.values[idx]).collect();
        Estimate::from_samples(&xs)
    };

    let mut grid = Vec::with_capacity(rhos.len());
    for (r, &rho_db) in rho_u_db.iter().enumerate() {
        let mut row = Vec::with_capacity(n_r_grid.len());
        for (j, &n_r) in n_r_grid.iter().enumerate() {
            let base = (r * n_r_grid.len() + j) * FIELDS;
            row.push(RateReport {
                n_a: cfg.n_a,
                n_r,
                rho_u_db: rho_db,
                lambda_db: cfg.lambda_db,
                beamformer: cfg.beamformer,
                upper_rate: column(base + UPPER),
                vcs_rate: column(base + VCS),
                unfiltered_rate: column(base + UNFILTERED),
                ra_sum_rate_direct: column(base + RA_DIRECT),
                ra_sum_rate_projected: column(base + RA_PROJECTED),
                ra_receiver_mode: cfg.ra_receiver_mode,
                total_sum_rate: column(base + TOTAL),
                acceptance_rate,
                singular_redraws,
                trials: cfg.trials,
            });
        }
        grid.push(row);
    }
    Ok(grid)
}

/// Rate report for the scenario's own `N_R` and `ρ_U`.
pub fn estimate_rates(cfg: &ScenarioConfig, exec: Execution) -> Result<RateReport> {
    let mut grid = estimate_rate_grid(cfg, &[cfg.n_r], &[cfg.rho_u_db], exec)?;
    Ok(grid.remove(0).remove(0))
}

/// Largest grid `N_R` whose per-assigned-UE rate still meets `target`, for the
/// VCS and unfiltered arms; `reports` must be ordered by increasing `N_R`.
pub fn supported_ra_count(reports: &[RateReport], target: f64) -> (usize, usize) {
    let count = |rate: fn(&RateReport) -> f64| {
        reports
            .iter()
            .take_while(|r| rate(r) >= target)
            .last()
            .map_or(0, |r| r.n_r)
    };
    (
        count(|r| r.vcs_rate.mean),
        count(|r| r.unfiltered_rate.mean),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ModelTag;

    fn small() -> ScenarioConfig {
        ScenarioConfig {
            m: 32,
            trials: 60,
            lambda_db: 6.0,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn zero_ra_matches_upper_bound_exactly() {
        for kind in [BeamformerKind::Cb, BeamformerKind::Zf] {
            let cfg = ScenarioConfig {
                n_r: 0,
                beamformer: kind,
                ..small()
            };
            let r = estimate_rates(&cfg, Execution::default()).unwrap();
            assert_eq!(r.vcs_rate, r.upper_rate);
            assert_eq!(r.unfiltered_rate, r.upper_rate);
            assert_eq!(r.ra_sum_rate().mean, 0.0);
            assert_eq!(r.sum_rate_gain(), 0.0);
        }
    }

    #[test]
    fn grid_points_match_single_runs() {
        let cfg = ScenarioConfig {
            n_r: 4,
            model: ModelTag::Practical,
            ..small()
        };
        let grid =
            estimate_rate_grid(&cfg, &[0, 2, 4], &[-10.0, 0.0], Execution::default()).unwrap();
        let single = estimate_rates(&cfg, Execution::default()).unwrap();
        assert_eq!(grid[0][2], single);
        let at0 = estimate_rates(
            &ScenarioConfig {
                rho_u_db: 0.0,
                ..cfg.clone()
            },
            Execution::default(),
        )
        .unwrap();
        assert_eq!(grid[1][2], at0);
    }

    #[test]
    fn execution_modes_agree() {
        let cfg = ScenarioConfig {
            n_r: 3,
            beamformer: BeamformerKind::Zf,
            ..small()
        };
        let a = estimate_rates(&cfg, Execution::Sequential).unwrap();
        let b = estimate_rates(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn arms_are_ordered() {
        let cfg = ScenarioConfig {
            n_r: 8,
            trials: 200,
            ..small()
        };
        let r = estimate_rates(&cfg, Execution::default()).unwrap();
        assert!(r.upper_rate.mean >= r.vcs_rate.mean);
        assert!(r.vcs_rate.mean >= r.unfiltered_rate.mean);
        assert!(r.acceptance_rate > 0.0 && r.acceptance_rate < 1.0);
        let total = r.n_a as f64 * r.vcs_rate.mean + r.ra_sum_rate().mean;
        assert!((r.total_sum_rate.mean - total).abs() < 1e-9 * total);
    }

    #[test]
    fn supported_counts() {
        let cfg = ScenarioConfig {
            trials: 40,
            ..small()
        };
        let grid = estimate_rate_grid(&cfg, &[0, 1, 2, 3], &[-10.0], Execution::default()).unwrap();
        let row = &grid[0];
        assert_eq!(supported_ra_count(row, 0.0), (3, 3));
        assert_eq!(supported_ra_count(row, 1e9), (0, 0));
    }
}
