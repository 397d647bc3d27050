use rand::Rng;

use crate::beamforming::{BeamformerKind, BeamformerSet};
use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

/// Redraw budget for numerically singular channel sets within one trial.
pub const MAX_SINGULAR_REDRAWS: usize = 100;

/// Runs `attempt` until it succeeds without a singular matrix; returns the
/// result and the number of redraws.
///
/// Under the practical model several UEs near endfire can make a channel set
/// numerically rank deficient; such sets are redrawn from the same stream.
pub(crate) fn retry_singular<T>(mut attempt: impl FnMut() -> Result<T>) -> Result<(T, usize)> {
    let mut last = None;
    for redraws in 0..=MAX_SINGULAR_REDRAWS {
        match attempt() {
            Ok(v) => return Ok((v, redraws)),
            Err(e @ Error::SingularMatrix { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt ran"))
}

/// Draws `n_a` assigned channels with beamformers of `kind`.
pub(crate) fn draw_assigned<R: Rng + ?Sized>(
    model: &ChannelModel,
    n_a: usize,
    kind: BeamformerKind,
    rng: &mut R,
) -> Result<(ComplexMatrix, BeamformerSet, usize)> {
    let ((h, b), redraws) = retry_singular(|| {
        let h = model.draw_columns(n_a, rng);
        let b = BeamformerSet::build(kind, &h)?;
        Ok((h, b))
    })?;
    Ok((h, b, redraws))
}
