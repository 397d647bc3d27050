use crate::analytic::{p_av_multi, EmpiricalAvailability};
use crate::channel::ChannelModel;
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::numerics::{hadamard, RngStream};
use crate::vcs::{
    build_virtual_carrier, decide, noiseless_strength, ra_receive, sensing_strength, NoiseMode,
};

use super::assigned::draw_assigned;
use super::{Estimate, Execution, STREAM_AVAILABILITY};

/// Sensing strengths `Y` for `trials × channels` independent realizations.
///
/// Each realization has its own assigned UEs, beamformers and RA channel, so
/// the first `n_c` entries of a trial model an RA UE scanning `n_c` channels.
#[derive(Debug, Clone)]
pub struct AvailabilitySamples {
    channels: usize,
    y: Vec<f64>,
    redraws: usize,
}

impl AvailabilitySamples {
    /// Draws with the scenario's seed, model, beamformer and `rho_v_db`
    /// (infinite means noiseless sensing).
    pub fn draw(
        cfg: &ScenarioConfig,
        trials: usize,
        channels: usize,
        exec: Execution,
    ) -> Result<Self> {
        cfg.validate()?;
        let model = ChannelModel::new(&cfg.channel_params())?;
        let code = hadamard(cfg.n_l)?;
        let root = RngStream::new(cfg.seed, STREAM_AVAILABILITY);
        let rows = exec.try_map(trials, |t| {
            let trial = root.child(t as u64);
            let mut rng = trial.rng();
            let mut noise_rng = trial.child(1).rng();
            let mut ys = Vec::with_capacity(channels);
            let mut redraws = 0;
            for _ in 0..channels {
                let (_, b, r) = draw_assigned(&model, cfg.n_a, cfg.beamformer, &mut rng)?;
                redraws += r;
                let h_r = model.draw_column(&mut rng);
                let y = if cfg.rho_v_db == f64::INFINITY {
                    noiseless_strength(&b, &h_r)
                } else {
                    let v = build_virtual_carrier(&b, &code, 1.0)?;
                    let w = ra_receive(&v, &h_r, cfg.rho_v_db, NoiseMode::On, &mut noise_rng)?;
                    sensing_strength(&w, &code, cfg.m, 1.0)?
                };
                ys.push(y);
            }
            Ok((ys, redraws))
        })?;
        let redraws = rows.iter().map(|r| r.1).sum();
        let y = rows.into_iter().flat_map(|r| r.0).collect();
        Ok(AvailabilitySamples {
            channels,
            y,
            redraws,
        })
    }

    pub fn trials(&self) -> usize {
        self.y.len().checked_div(self.channels).unwrap_or(0)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Assigned-UE sets redrawn for being numerically singular.
    pub fn singular_redraws(&self) -> usize {
        self.redraws
    }

    /// All sampled strengths, each an independent single-channel draw.
    pub fn strengths(&self) -> &[f64] {
        &self.y
    }

    /// Fraction of trials with at least one of the first `n_c` channels available.
    pub fn p_multi(&self, lambda_db: f64, n_c: usize) -> Estimate {
        assert!(
            n_c >= 1 && n_c <= self.channels,
            "n_c={n_c} outside 1..={}",
            self.channels
        );
        let hits = self
            .y
            .chunks_exact(self.channels)
            .filter(|row| row[..n_c].iter().any(|&y| decide(y, lambda_db)))
            .count();
        Estimate::from_count(hits, self.trials())
    }

    /// Single-channel availability over every sampled realization.
    pub fn p_single(&self, lambda_db: f64) -> Estimate {
        let hits = self.y.iter().filter(|&&y| decide(y, lambda_db)).count();
        Estimate::from_count(hits, self.y.len())
    }

    /// Multi-channel availability implied by the pooled single-channel rate.
    pub fn p_multi_from_single(&self, lambda_db: f64, n_c: usize) -> Result<f64> {
        p_av_multi(self.p_single(lambda_db).mean, n_c)
    }

    pub fn empirical(&self) -> Result<EmpiricalAvailability> {
        EmpiricalAvailability::new(self.y.clone())
    }
}

/// Multi-channel availability for the scenario's own `Λ` and `N_C`.
pub fn estimate_p_av(cfg: &ScenarioConfig, exec: Execution) -> Result<Estimate> {
    let samples = AvailabilitySamples::draw(cfg, cfg.trials, cfg.n_c, exec)?;
    Ok(samples.p_multi(cfg.lambda_db, cfg.n_c))
}
