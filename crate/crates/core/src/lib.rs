//! Multi-agent Battlesnake workbench.
//!
//! The crate bundles everything needed to train, evaluate, and deploy
//! competitive snake agents:
//!
//! - [`engine`]: deterministic simultaneous-move rules engine;
//! - [`encoder`]: per-agent 3-channel grid observations;
//! - [`rewards`]: base reward plus event-based shaping;
//! - [`heuristics`]: handcrafted rules injected as action masks, action
//!   overwrites, or shaping terms;
//! - [`learner`]: PPO with generalized advantage estimation over independent
//!   per-agent policies;
//! - [`arena`]: free-for-all and 1v1 tournaments with event statistics;
//! - [`replay`]: line-delimited replay logs, reproducible byte for byte;
//! - [`server`]: webhook agent server speaking the public Battlesnake API;
//! - [`cli`]: the `battlesnake` command-line entry point.

pub mod arena;
pub mod cli;
pub mod config;
pub mod encoder;
pub mod engine;
pub mod heuristics;
pub mod learner;
pub mod replay;
pub mod rewards;
pub mod server;
