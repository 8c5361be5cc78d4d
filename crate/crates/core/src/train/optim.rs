use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
    pub lr: f64,
}

impl AdamState {
    pub fn new(n_params: usize, lr: f64) -> Self {
        AdamState {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            step: 0,
            lr,
        }
    }
}

/// One Adam update with bias correction. The L2 term `weight_decay·θ` is
/// added to the gradient before the moment updates.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState, weight_decay: f64) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::Shape(format!(
            "{} parameters, {} gradients, {} moments",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    let step = state.step + 1;
    if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
        return Err(Error::NonFiniteGradient { param: i, step });
    }
    state.step = step;
    let c1 = 1.0 - ADAM_BETA1.powi(step as i32);
    let c2 = 1.0 - ADAM_BETA2.powi(step as i32);
    for (((p, &g), m), v) in params.iter_mut().zip(grads).zip(&mut state.m).zip(&mut state.v) {
        let g = g + weight_decay * *p;
        *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
        *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= state.lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
    }
    Ok(())
}

/// Multiplies the learning rate by `factor` once the monitored loss has
/// failed to improve for more than `patience` consecutive epochs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateauScheduler {
    pub factor: f64,
    pub patience: usize,
    pub best: f64,
    pub bad_epochs: usize,
}

impl PlateauScheduler {
    pub fn new(factor: f64, patience: usize) -> Self {
        PlateauScheduler {
            factor,
            patience,
            best: f64::INFINITY,
            bad_epochs: 0,
        }
    }

    /// Records one epoch's loss; returns the new learning rate.
    pub fn step(&mut self, loss: f64, lr: f64) -> f64 {
        if loss < self.best {
            self.best = loss;
            self.bad_epochs = 0;
            return lr;
        }
        self.bad_epochs += 1;
        if self.bad_epochs > self.patience {
            self.bad_epochs = 0;
            return lr * self.factor;
        }
        lr
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_gradient_without_decay_is_a_no_op() {
        let mut p = vec![0.3, -1.2];
        let mut s = AdamState::new(2, 1e-3);
        adam_step(&mut p, &[0.0, 0.0], &mut s, 0.0).unwrap();
        assert_eq!(p, vec![0.3, -1.2]);
        assert_eq!(s.step, 1);
    }

    #[test]
    fn first_step_by_hand() {
        // m̂ = g, v̂ = g², Δ = -lr g / (|g| + ε)
        for g in [0.7, -2.5, 1e-3] {
            let mut p = vec![1.0];
            let mut s = AdamState::new(1, 0.01);
            adam_step(&mut p, &[g], &mut s, 0.0).unwrap();
            assert_relative_eq!(p[0], 1.0 - 0.01 * g / (g.abs() + 1e-8), epsilon = 1e-15);
        }
    }

    #[test]
    fn decay_shrinks_toward_zero() {
        let mut p = vec![2.0, -3.0];
        let mut s = AdamState::new(2, 1e-2);
        adam_step(&mut p, &[0.0, 0.0], &mut s, 1e-3).unwrap();
        assert!(p[0] < 2.0 && p[0] > 0.0);
        assert!(p[1] > -3.0 && p[1] < 0.0);
    }

    #[test]
    fn nan_gradient_aborts() {
        let mut p = vec![1.0, 1.0];
        let mut s = AdamState::new(2, 1e-2);
        let e = adam_step(&mut p, &[0.0, f64::NAN], &mut s, 0.0).unwrap_err();
        assert!(matches!(e, Error::NonFiniteGradient { param: 1, step: 1 }));
        assert_eq!(p, vec![1.0, 1.0]);
        assert!(adam_step(&mut p, &[0.0], &mut s, 0.0).is_err());
    }

    #[test]
    fn quadratic_decreases() {
        // L = 0.5 k θ², lr well below 2/k
        let k = 4.0;
        let mut p = vec![1.5];
        let mut s = AdamState::new(1, 0.05);
        let mut last = 0.5 * k * p[0] * p[0];
        for _ in 0..20 {
            let g = k * p[0];
            adam_step(&mut p, &[g], &mut s, 0.0).unwrap();
            let loss = 0.5 * k * p[0] * p[0];
            assert!(loss < last);
            last = loss;
        }
    }

    #[test]
    fn plateau_schedule() {
        let mut s = PlateauScheduler::new(0.1, 2);
        let mut lr = 1.0;
        // monotone improvement never decays
        for l in [5.0, 4.0, 3.0, 2.0] {
            lr = s.step(l, lr);
        }
        assert_eq!(lr, 1.0);
        // two bad epochs are tolerated, the third decays
        lr = s.step(2.0, lr);
        lr = s.step(2.5, lr);
        assert_eq!(lr, 1.0);
        lr = s.step(2.0, lr);
        assert_eq!(lr, 0.1);
        assert_eq!(s.bad_epochs, 0);
    }
}
