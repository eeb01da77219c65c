//! Per-agent grid observations.
//!
//! Each agent sees the board as a `width x height x 3` tensor: channel 0
//! marks food, channel 1 the agent's own body with its head highlighted,
//! channel 2 every other living snake. Head cells carry the value
//! [`HEAD_MARK`]; plain body cells carry 1. Dead snakes contribute nothing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{BoardState, SnakeId};

/// Marker value for head cells. Deliberately far from the body value so the
/// policy input separates heads from bodies.
pub const HEAD_MARK: f64 = 5.0;

pub const CHANNELS: usize = 3;

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("unknown agent id {0}")]
    UnknownAgent(SnakeId),
}

/// Dense observation, laid out x-major, then y, then channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationTensor {
    pub agent: SnakeId,
    pub width: i32,
    pub height: i32,
    values: Vec<f64>,
}

impl ObservationTensor {
    pub fn get(&self, x: i32, y: i32, channel: usize) -> f64 {
        self.values[self.index(x, y, channel)]
    }

    fn index(&self, x: i32, y: i32, channel: usize) -> usize {
        debug_assert!(x >= 0 && x < self.width && y >= 0 && y < self.height);
        debug_assert!(channel < CHANNELS);
        (x as usize * self.height as usize + y as usize) * CHANNELS + channel
    }

    /// Flattened values in x-major, then y, then channel order. This is the
    /// layout golden dumps and the policy input use.
    pub fn flat(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One value per line, for cross-implementation diffing.
    pub fn golden_dump(&self) -> String {
        let mut out = String::new();
        for v in &self.values {
            out.push_str(&format!("{v}\n"));
        }
        out
    }

    /// Sum over one channel.
    pub fn channel_sum(&self, channel: usize) -> f64 {
        self.values[channel..].iter().step_by(CHANNELS).sum()
    }
}

/// Flattened observation length for a given board size.
pub fn observation_len(width: i32, height: i32) -> usize {
    width as usize * height as usize * CHANNELS
}

/// Encode the board from `agent`'s point of view.
pub fn encode(board: &BoardState, agent: SnakeId) -> Result<ObservationTensor, EncodeError> {
    encode_with_head_mark(board, agent, HEAD_MARK)
}

/// Same as [`encode`] with a custom head marker value.
pub fn encode_with_head_mark(
    board: &BoardState,
    agent: SnakeId,
    head_mark: f64,
) -> Result<ObservationTensor, EncodeError> {
    if board.snake(agent).is_none() {
        return Err(EncodeError::UnknownAgent(agent));
    }
    let mut tensor = ObservationTensor {
        agent,
        width: board.width,
        height: board.height,
        values: vec![0.0; observation_len(board.width, board.height)],
    };

    for &food in &board.food {
        let idx = tensor.index(food.x, food.y, 0);
        tensor.values[idx] = 1.0;
    }

    for snake in board.living_snakes() {
        let channel = if snake.id == agent { 1 } else { 2 };
        for seg in &snake.body {
            let idx = tensor.index(seg.x, seg.y, channel);
            tensor.values[idx] = 1.0;
        }
        // Head overrides body, including stacked spawn cells.
        let head = snake.head();
        let idx = tensor.index(head.x, head.y, channel);
        tensor.values[idx] = head_mark;
    }

    Ok(tensor)
}
