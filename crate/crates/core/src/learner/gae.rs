//! Generalized advantage estimation over flat trajectory buffers.

use super::LearnerError;

/// Backward-recursive GAE.
///
/// `values` holds one entry per reward plus a trailing bootstrap value (zero
/// for terminal tails). With `d_t` the done flag:
///
/// ```text
/// delta_t = r_t + gamma * V_{t+1} * (1 - d_t) - V_t
/// A_t     = delta_t + gamma * lambda * (1 - d_t) * A_{t+1}
/// ret_t   = A_t + V_t
/// ```
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    gamma: f64,
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>), LearnerError> {
    let n = rewards.len();
    if values.len() != n + 1 || dones.len() != n {
        return Err(LearnerError::LengthMismatch {
            rewards: n,
            values: values.len(),
            dones: dones.len(),
        });
    }
    let mut advantages = vec![0.0; n];
    let mut acc = 0.0;
    for t in (0..n).rev() {
        let not_done = if dones[t] { 0.0 } else { 1.0 };
        let delta = rewards[t] + gamma * values[t + 1] * not_done - values[t];
        acc = delta + gamma * lambda * not_done * acc;
        advantages[t] = acc;
    }
    let returns = advantages
        .iter()
        .zip(values)
        .map(|(a, v)| a + v)
        .collect();
    Ok((advantages, returns))
}

/// Normalize to zero mean and unit standard deviation, with a floor on the
/// standard deviation to keep degenerate batches stable.
pub fn normalize_advantages(advantages: &mut [f64]) {
    if advantages.is_empty() {
        return;
    }
    let n = advantages.len() as f64;
    let mean = advantages.iter().sum::<f64>() / n;
    let var = advantages.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt().max(1e-8);
    for a in advantages.iter_mut() {
        *a = (*a - mean) / std;
    }
}
