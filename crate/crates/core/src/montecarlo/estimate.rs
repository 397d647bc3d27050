/// Sample mean with a 95% normal-approximation confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub n: usize,
}

const Z95: f64 = 1.959_963_984_540_054;

impl Estimate {
    /// Summation runs in slice order so results do not depend on scheduling.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Estimate {
                mean: f64::NAN,
                ci_halfwidth: f64::NAN,
                n: 0,
            };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let ci_halfwidth = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            Z95 * (var / n as f64).sqrt()
        } else {
            f64::INFINITY
        };
        Estimate {
            mean,
            ci_halfwidth,
            n,
        }
    }

    /// Binomial proportion `hits / n`.
    pub fn from_count(hits: usize, n: usize) -> Self {
        if n == 0 {
            return Estimate {
                mean: f64::NAN,
                ci_halfwidth: f64::NAN,
                n: 0,
            };
        }
        let p = hits as f64 / n as f64;
        Estimate {
            mean: p,
            ci_halfwidth: Z95 * (p * (1.0 - p) / n as f64).sqrt(),
            n,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        (value - self.mean).abs() <= self.ci_halfwidth
    }
}
