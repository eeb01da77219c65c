//! Per-agent rewards: survival bonus, terminal rewards, and event-based
//! shaping terms.
//!
//! Base rewards follow a strict precedence: death beats winning beats the
//! per-turn survival bonus. Shaping adds one configured scalar per matching
//! event on top of the base, so the zero-config case is exactly the base
//! reward.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::{SnakeId, TurnEvent, TurnEventKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    pub survive_bonus: f64,
    pub death_penalty: f64,
    pub win_reward: f64,
    /// Extra scalar added once per matching event attributed to the agent.
    pub shaping_terms: BTreeMap<TurnEventKind, f64>,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            survive_bonus: 0.002,
            death_penalty: -1.0,
            win_reward: 1.0,
            shaping_terms: BTreeMap::new(),
        }
    }
}

/// Base reward for one agent given the events of a single engine step.
pub fn base_reward(events: &[TurnEvent], agent: SnakeId, config: &RewardConfig) -> f64 {
    let mut survived = false;
    let mut won = false;
    for event in events.iter().filter(|e| e.agent == agent) {
        if event.kind.is_elimination() {
            return config.death_penalty;
        }
        match event.kind {
            TurnEventKind::Won => won = true,
            TurnEventKind::SurvivedTurn => survived = true,
            _ => {}
        }
    }
    if won {
        config.win_reward
    } else if survived {
        config.survive_bonus
    } else {
        0.0
    }
}

/// Base reward plus the sum of shaping terms for the agent's events.
pub fn shaped_reward(
    base: f64,
    events: &[TurnEvent],
    agent: SnakeId,
    config: &RewardConfig,
) -> f64 {
    let mut total = base;
    for event in events.iter().filter(|e| e.agent == agent) {
        if let Some(term) = config.shaping_terms.get(&event.kind) {
            total += term;
        }
    }
    total
}
