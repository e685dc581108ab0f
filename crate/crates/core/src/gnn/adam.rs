use alloc::vec;
use alloc::vec::Vec;

use super::params::ModelParams;
use crate::error::Result;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// First and second moment estimates plus the step count.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
}

impl AdamState {
    pub fn new(num_params: usize) -> Self {
        Self {
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
            step: 0,
        }
    }

    pub fn for_params(params: &ModelParams) -> Self {
        Self::new(params.len())
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn first_moment(&self) -> &[f64] {
        &self.m
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.v
    }
}

/// One bias-corrected Adam update, in place.
pub fn adam_step(params: &mut ModelParams, grad: &ModelParams, state: &mut AdamState, lr: f64) -> Result<()> {
    params.ensure_compatible(grad, "adam step")?;
    if state.m.len() != params.len() {
        *state = AdamState::for_params(params);
    }
    state.step += 1;
    let t = state.step as f64;
    let c1 = 1.0 - libm::pow(BETA1, t);
    let c2 = 1.0 - libm::pow(BETA2, t);
    for (((w, &g), m), v) in params
        .values_mut()
        .iter_mut()
        .zip(grad.values())
        .zip(state.m.iter_mut())
        .zip(state.v.iter_mut())
    {
        *m = BETA1 * *m + (1.0 - BETA1) * g;
        *v = BETA2 * *v + (1.0 - BETA2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *w -= lr * m_hat / (libm::sqrt(v_hat) + EPSILON);
    }
    Ok(())
}
