use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Moment decay rates and denominator guard.
///
/// Defaults follow PennyLane's `AdamOptimizer` (`beta2 = 0.99`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdamConfig {
    #[serde(default = "default_beta1")]
    pub beta1: f64,
    #[serde(default = "default_beta2")]
    pub beta2: f64,
    #[serde(default = "default_eps")]
    pub epsilon: f64,
}

fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.99
}
fn default_eps() -> f64 {
    1e-8
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            beta1: default_beta1(),
            beta2: default_beta2(),
            epsilon: default_eps(),
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..1.0).contains(&self.beta1) && (0.0..1.0).contains(&self.beta2) && self.epsilon > 0.0;
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "invalid Adam settings beta1={} beta2={} epsilon={}",
                self.beta1, self.beta2, self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step_count: u64,
    pub config: AdamConfig,
}

impl OptimizerState {
    pub fn new(num_parameters: usize, config: AdamConfig) -> Self {
        OptimizerState {
            first_moment: vec![0.0; num_parameters],
            second_moment: vec![0.0; num_parameters],
            step_count: 0,
            config,
        }
    }
}

/// One bias-corrected Adam update, in the form
/// `x -= a_t m / (sqrt(v) + eps)` with `a_t = alpha sqrt(1 - b2^t) / (1 - b1^t)`.
pub fn adam_step(state: &mut OptimizerState, params: &mut [f64], gradient: &[f64], step_size: f64) -> Result<()> {
    let n = state.first_moment.len();
    if params.len() != n || gradient.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: if params.len() != n { params.len() } else { gradient.len() },
        });
    }
    let AdamConfig { beta1, beta2, epsilon } = state.config;
    state.step_count += 1;
    let t = state.step_count as i32;
    let a_t = step_size * (1.0 - beta2.powi(t)).sqrt() / (1.0 - beta1.powi(t));
    for i in 0..n {
        let g = gradient[i];
        let m = beta1 * state.first_moment[i] + (1.0 - beta1) * g;
        let v = beta2 * state.second_moment[i] + (1.0 - beta2) * g * g;
        state.first_moment[i] = m;
        state.second_moment[i] = v;
        params[i] -= a_t * m / (v.sqrt() + epsilon);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub step_size: f64,
    pub iterations: usize,
}

/// Piecewise-constant step sizes, run in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Segment>", into = "Vec<Segment>")]
pub struct StepSchedule {
    segments: Vec<Segment>,
}

impl TryFrom<Vec<Segment>> for StepSchedule {
    type Error = Error;

    fn try_from(segments: Vec<Segment>) -> Result<Self> {
        StepSchedule::new(segments)
    }
}

impl From<StepSchedule> for Vec<Segment> {
    fn from(s: StepSchedule) -> Self {
        s.segments
    }
}

impl StepSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidArgument("schedule needs at least one segment".into()));
        }
        if let Some(s) = segments.iter().find(|s| !(s.step_size > 0.0 && s.step_size.is_finite())) {
            return Err(Error::InvalidArgument(format!("step size must be > 0, got {}", s.step_size)));
        }
        if segments.iter().map(|s| s.iterations).sum::<usize>() == 0 {
            return Err(Error::InvalidArgument("schedule has no iterations".into()));
        }
        Ok(StepSchedule { segments })
    }

    pub fn constant(step_size: f64, iterations: usize) -> Result<Self> {
        Self::new(vec![Segment { step_size, iterations }])
    }

    pub fn from_pairs(pairs: &[(f64, usize)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(step_size, iterations)| Segment { step_size, iterations })
                .collect(),
        )
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_iterations(&self) -> usize {
        self.segments.iter().map(|s| s.iterations).sum()
    }

    /// Step sizes for iterations `0..total`.
    pub fn step_sizes(&self) -> impl Iterator<Item = f64> + '_ {
        self.segments
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.step_size, s.iterations))
    }

    /// Copy with every segment's iteration count multiplied by `factor`
    /// (rounded, at least one iteration overall).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.segments
                .iter()
                .map(|s| Segment {
                    step_size: s.step_size,
                    iterations: (s.iterations as f64 * factor).round() as usize,
                })
                .collect(),
        )
        .or_else(|_| Self::constant(self.segments[0].step_size, 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_about_alpha() {
        let mut st = OptimizerState::new(3, AdamConfig::default());
        let mut x = [0.0, 0.0, 0.0];
        adam_step(&mut st, &mut x, &[2.0, -0.5, 1e-3], 0.01).unwrap();
        assert!((x[0] + 0.01).abs() < 1e-8);
        assert!((x[1] - 0.01).abs() < 1e-8);
        assert!((x[2] + 0.01).abs() < 1e-6);
    }

    #[test]
    fn zero_gradient_is_stationary() {
        let mut st = OptimizerState::new(2, AdamConfig::default());
        let mut x = [0.3, -1.2];
        for _ in 0..100 {
            adam_step(&mut st, &mut x, &[0.0, 0.0], 0.1).unwrap();
        }
        assert_eq!(x, [0.3, -1.2]);
    }

    #[test]
    fn quadratic_bowl() {
        let mut st = OptimizerState::new(1, AdamConfig::default());
        let mut x = [1.0];
        for _ in 0..500 {
            let g = [2.0 * x[0]];
            adam_step(&mut st, &mut x, &g, 0.1).unwrap();
        }
        assert!(x[0].abs() < 1e-3, "x = {}", x[0]);
    }

    #[test]
    fn length_mismatch() {
        let mut st = OptimizerState::new(2, AdamConfig::default());
        assert!(adam_step(&mut st, &mut [0.0], &[0.0], 0.1).is_err());
    }

    #[test]
    fn schedule_totals() {
        let s = StepSchedule::from_pairs(&[(0.05, 500), (0.01, 1500)]).unwrap();
        assert_eq!(s.total_iterations(), 2000);
        assert_eq!(s.step_sizes().count(), 2000);
        assert_eq!(s.step_sizes().nth(499), Some(0.05));
        assert_eq!(s.step_sizes().nth(500), Some(0.01));
        assert!(StepSchedule::new(vec![]).is_err());
        assert!(StepSchedule::constant(0.0, 10).is_err());
        assert!(StepSchedule::constant(0.1, 0).is_err());
    }
}
