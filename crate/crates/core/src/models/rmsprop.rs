//! rmsprop: `E ← ρE + (1−ρ)g²`, `θ ← θ − η·g/√(E+ε)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RmspropConfig {
    pub rho: f64,
    pub learning_rate: f64,
    pub epsilon: f64,
}

impl Default for RmspropConfig {
    fn default() -> Self {
        RmspropConfig {
            rho: 0.9,
            learning_rate: 0.001,
            epsilon: 1e-7,
        }
    }
}

impl RmspropConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::Config("rmsprop.rho must lie in [0, 1)".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("rmsprop.learning_rate must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config("rmsprop.epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// Squared-gradient accumulators, one per parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct RmspropState {
    pub config: RmspropConfig,
    pub accumulators: Vec<Vec<f64>>,
}

impl RmspropState {
    pub fn new(config: RmspropConfig, shapes: &[usize]) -> Self {
        RmspropState {
            config,
            accumulators: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    /// Applies one update to every tensor. Gradients are checked for
    /// finiteness before anything is modified.
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        if params.len() != grads.len() || params.len() != self.accumulators.len() {
            return Err(Error::Shape(format!(
                "rmsprop: {} parameter tensors, {} gradients, {} accumulators",
                params.len(),
                grads.len(),
                self.accumulators.len()
            )));
        }
        for (i, ((p, g), e)) in params.iter().zip(grads).zip(&self.accumulators).enumerate() {
            if p.len() != g.len() || p.len() != e.len() {
                return Err(Error::Shape(format!("rmsprop: tensor {i} length mismatch")));
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("gradient of tensor {i}")));
            }
        }
        for ((p, g), e) in params.iter_mut().zip(grads).zip(&mut self.accumulators) {
            rmsprop_update(p, g, e, &self.config);
        }
        Ok(())
    }
}

/// Single-tensor rule, applied elementwise.
#[inline]
pub fn rmsprop_update(params: &mut [f64], grads: &[f64], accum: &mut [f64], cfg: &RmspropConfig) {
    let RmspropConfig {
        rho,
        learning_rate,
        epsilon,
    } = *cfg;
    for ((p, &g), e) in params.iter_mut().zip(grads).zip(accum.iter_mut()) {
        *e = rho * *e + (1.0 - rho) * g * g;
        *p -= learning_rate * g / (*e + epsilon).sqrt();
    }
}

/// Checked single-tensor step.
pub fn rmsprop_step(
    params: &mut [f64],
    grads: &[f64],
    accum: &mut [f64],
    cfg: &RmspropConfig,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != accum.len() {
        return Err(Error::Shape("rmsprop: length mismatch".into()));
    }
    if grads.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("rmsprop gradient".into()));
    }
    rmsprop_update(params, grads, accum, cfg);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_only_decays() {
        let cfg = RmspropConfig::default();
        let mut p = vec![1.0, -2.0];
        let mut e = vec![0.5, 2.0];
        rmsprop_step(&mut p, &[0.0, 0.0], &mut e, &cfg).unwrap();
        assert_eq!(p, vec![1.0, -2.0]);
        assert!((e[0] - 0.45).abs() < 1e-15 && (e[1] - 1.8).abs() < 1e-15);
    }

    #[test]
    fn fresh_state_unit_gradient() {
        let cfg = RmspropConfig::default();
        let mut p = vec![0.0];
        let mut e = vec![0.0];
        rmsprop_step(&mut p, &[1.0], &mut e, &cfg).unwrap();
        assert!((e[0] - 0.1).abs() < 1e-15);
        assert!((p[0] + 0.0031623).abs() < 1e-7, "{}", p[0]);
    }

    #[test]
    fn odd_symmetry() {
        let cfg = RmspropConfig::default();
        let g = [0.3, -1.7, 4.0];
        let (mut a, mut b) = (vec![0.0; 3], vec![0.0; 3]);
        let (mut ea, mut eb) = (vec![0.0; 3], vec![0.0; 3]);
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        rmsprop_step(&mut a, &g, &mut ea, &cfg).unwrap();
        rmsprop_step(&mut b, &neg, &mut eb, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn rejects_non_finite_without_mutation() {
        let mut state = RmspropState::new(RmspropConfig::default(), &[2]);
        let mut p = vec![1.0, 1.0];
        let err = state.step(&mut [&mut p], &[&[f64::NAN, 0.0]]);
        assert!(err.is_err());
        assert_eq!(p, vec![1.0, 1.0]);
        assert_eq!(state.accumulators[0], vec![0.0, 0.0]);
    }
}
