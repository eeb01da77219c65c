//! Handcrafted rules and the three ways they reach the agent: in-training
//! action masking, ad-hoc action overwriting at inference, and event-based
//! reward shaping terms.
//!
//! Rules 1 and 2 (walls, forbidden moves) are prevention rules: they zero
//! entries of the action-validity vector. Rules 3 and 4 (food seeking, kill
//! setup) are promotion rules: they leave every action valid and instead
//! nominate a preferred action.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::engine::{Action, BoardState, Coord, SnakeId, TurnEventKind};

/// Default health trigger for the food-seeking rule.
pub const DEFAULT_HEALTH_THRESHOLD: u8 = 30;

/// Default magnitude of generated shaping terms: prevention rules penalize
/// their event at -0.4, promotion rules reward theirs at +0.4.
pub const DEFAULT_SHAPING_MAGNITUDE: f64 = 0.4;

/// The four handcrafted rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "rule1_walls")]
    Walls,
    #[serde(rename = "rule2_forbidden")]
    Forbidden,
    #[serde(rename = "rule3_food")]
    Food,
    #[serde(rename = "rule4_kill")]
    Kill,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::Walls, Rule::Forbidden, Rule::Food, Rule::Kill];
}

/// How an enabled rule is injected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleMode {
    InTrainingMask,
    AdHocOverwrite,
    RewardShaping,
}

/// Per-action validity plus an optional nominated action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleMask {
    pub valid: [bool; 4],
    pub preferred: Option<Action>,
}

impl RuleMask {
    pub fn all_valid() -> Self {
        Self {
            valid: [true; 4],
            preferred: None,
        }
    }

    pub fn is_all_valid(&self) -> bool {
        self.valid.iter().all(|&v| v)
    }

    pub fn is_all_masked(&self) -> bool {
        self.valid.iter().all(|&v| !v)
    }

    pub fn allows(&self, action: Action) -> bool {
        self.valid[action.index()]
    }
}

/// Schedule entry: from `step` onward these per-rule weights apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulePoint {
    pub step: u64,
    pub weights: BTreeMap<Rule, f64>,
}

/// Which rules are active, how each one is injected, and how strongly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct HeuristicConfig {
    /// Enabled rules and their injection mode. Absent rules are off.
    pub rules: BTreeMap<Rule, RuleMode>,
    /// Health trigger for rule 3.
    pub health_threshold: Option<u8>,
    /// Optional per-rule weight schedule over training steps. Weight 1 is
    /// the full rule, weight 0 disables it.
    pub schedule: Vec<SchedulePoint>,
}

impl HeuristicConfig {
    pub fn with_rule(rule: Rule, mode: RuleMode) -> Self {
        let mut cfg = Self::default();
        cfg.rules.insert(rule, mode);
        cfg
    }

    pub fn health_threshold(&self) -> u8 {
        self.health_threshold.unwrap_or(DEFAULT_HEALTH_THRESHOLD)
    }

    /// Effective weight of a rule at a training step: the latest schedule
    /// entry at or before `step` that mentions the rule, else 1.
    pub fn rule_weight(&self, rule: Rule, step: u64) -> f64 {
        let mut weight = 1.0;
        for point in &self.schedule {
            if point.step <= step {
                if let Some(&w) = point.weights.get(&rule) {
                    weight = w;
                }
            }
        }
        weight
    }

    fn enabled_with_mode(&self, mode: RuleMode) -> impl Iterator<Item = Rule> + '_ {
        Rule::ALL
            .into_iter()
            .filter(move |r| self.rules.get(r) == Some(&mode))
    }

    /// Shaping terms generated by rules in reward-shaping mode, scaled by
    /// the schedule weight at `step`. Prevention rules penalize the event
    /// they prevent; promotion rules reward the event they promote.
    pub fn shaping_terms(&self, step: u64) -> BTreeMap<TurnEventKind, f64> {
        let mut terms = BTreeMap::new();
        for rule in self.enabled_with_mode(RuleMode::RewardShaping) {
            let w = self.rule_weight(rule, step);
            if w == 0.0 {
                continue;
            }
            let (kind, sign) = match rule {
                Rule::Walls => (TurnEventKind::HitWall, -1.0),
                Rule::Forbidden => (TurnEventKind::ForbiddenMove, -1.0),
                Rule::Food => (TurnEventKind::AteFood, 1.0),
                Rule::Kill => (TurnEventKind::KilledOther, 1.0),
            };
            terms.insert(kind, sign * DEFAULT_SHAPING_MAGNITUDE * w);
        }
        terms
    }
}

/// Rule 1: mask actions that step out of bounds.
pub fn mask_walls(board: &BoardState, agent: SnakeId) -> RuleMask {
    let Some(snake) = board.snake(agent).filter(|s| s.alive) else {
        return RuleMask::all_valid();
    };
    let mut valid = [true; 4];
    for action in Action::ALL {
        if !board.in_bounds(snake.head().step(action)) {
            valid[action.index()] = false;
        }
    }
    RuleMask {
        valid,
        preferred: None,
    }
}

/// Rule 2: mask the action opposite to the snake's facing.
pub fn mask_forbidden(board: &BoardState, agent: SnakeId) -> RuleMask {
    let Some(snake) = board.snake(agent).filter(|s| s.alive) else {
        return RuleMask::all_valid();
    };
    let mut valid = [true; 4];
    if let Some(facing) = snake.facing {
        valid[facing.opposite().index()] = false;
    }
    RuleMask {
        valid,
        preferred: None,
    }
}

/// Rule 3: when health is below the threshold, nominate the first step of a
/// shortest obstacle-avoiding path to the nearest food. Snake bodies,
/// including tails, count as blocked. Ties break by action index.
pub fn promote_food(board: &BoardState, agent: SnakeId, health_threshold: u8) -> RuleMask {
    let Some(snake) = board.snake(agent).filter(|s| s.alive) else {
        return RuleMask::all_valid();
    };
    if snake.health >= health_threshold || board.food.is_empty() {
        return RuleMask::all_valid();
    }

    let obstacles = board.occupied_cells();
    let mut best: Option<(u32, Action)> = None;
    for action in Action::ALL {
        let start = snake.head().step(action);
        if let Some(dist) = bfs_distance_to_food(board, &obstacles, start) {
            let total = dist + 1;
            if best.map_or(true, |(d, _)| total < d) {
                best = Some((total, action));
            }
        }
    }
    RuleMask {
        valid: [true; 4],
        preferred: best.map(|(_, a)| a),
    }
}

/// Shortest free-cell path length from `start` to any food, or `None` when
/// unreachable. `start` itself may be food (distance 0).
fn bfs_distance_to_food(
    board: &BoardState,
    obstacles: &BTreeSet<Coord>,
    start: Coord,
) -> Option<u32> {
    if !board.in_bounds(start) || obstacles.contains(&start) {
        return None;
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start);
    queue.push_back((start, 0));
    while let Some((cell, dist)) = queue.pop_front() {
        if board.food.contains(&cell) {
            return Some(dist);
        }
        for action in Action::ALL {
            let next = cell.step(action);
            if board.in_bounds(next) && !obstacles.contains(&next) && seen.insert(next) {
                queue.push_back((next, dist + 1));
            }
        }
    }
    None
}

/// Rule 4: when a strictly shorter enemy head sits exactly two cells away,
/// nominate the in-bounds action that steps adjacent to it, setting up a
/// head-to-head the agent wins. Ties break by action index.
pub fn promote_kill(board: &BoardState, agent: SnakeId) -> RuleMask {
    let Some(snake) = board.snake(agent).filter(|s| s.alive) else {
        return RuleMask::all_valid();
    };
    let mut preferred = None;
    'outer: for action in Action::ALL {
        let target = snake.head().step(action);
        if !board.in_bounds(target) {
            continue;
        }
        for enemy in board.living_snakes().filter(|s| s.id != agent) {
            if snake.len() > enemy.len()
                && snake.head().manhattan(enemy.head()) == 2
                && target.manhattan(enemy.head()) == 1
            {
                preferred = Some(action);
                break 'outer;
            }
        }
    }
    RuleMask {
        valid: [true; 4],
        preferred,
    }
}

/// AND the validity vectors; keep the first preferred action that survives
/// the combined validity, scanning in list order.
pub fn combine_masks(masks: &[RuleMask]) -> RuleMask {
    let mut valid = [true; 4];
    for mask in masks {
        for i in 0..4 {
            valid[i] &= mask.valid[i];
        }
    }
    let preferred = masks
        .iter()
        .filter_map(|m| m.preferred)
        .find(|a| valid[a.index()]);
    RuleMask { valid, preferred }
}

/// Zero the masked entries of an action distribution and renormalize.
///
/// An all-zero mask returns the input unchanged: a fully trapped snake must
/// still act. If every unmasked entry has zero probability the result is
/// uniform over the unmasked entries.
pub fn apply_mask(probs: &[f64; 4], mask: &RuleMask) -> [f64; 4] {
    if mask.is_all_masked() {
        return *probs;
    }
    let mut out = [0.0; 4];
    let mut total = 0.0;
    for i in 0..4 {
        if mask.valid[i] {
            out[i] = probs[i];
            total += probs[i];
        }
    }
    if total > 0.0 {
        for v in &mut out {
            *v /= total;
        }
    } else {
        let n = mask.valid.iter().filter(|&&v| v).count() as f64;
        for i in 0..4 {
            out[i] = if mask.valid[i] { 1.0 / n } else { 0.0 };
        }
    }
    out
}

/// Apply a schedule weight to a mask. The validity vector interpolates
/// toward all-ones and is thresholded at 0.5; the preferred action is kept
/// only while the weight stays at or above 0.5.
pub fn weighted_mask(mask: &RuleMask, weight: f64) -> RuleMask {
    let mut valid = [true; 4];
    for i in 0..4 {
        let v = if mask.valid[i] { 1.0 } else { 0.0 };
        valid[i] = v * weight + (1.0 - weight) >= 0.5;
    }
    RuleMask {
        valid,
        preferred: mask.preferred.filter(|_| weight >= 0.5),
    }
}

fn rule_mask(rule: Rule, board: &BoardState, agent: SnakeId, cfg: &HeuristicConfig) -> RuleMask {
    match rule {
        Rule::Walls => mask_walls(board, agent),
        Rule::Forbidden => mask_forbidden(board, agent),
        Rule::Food => promote_food(board, agent, cfg.health_threshold()),
        Rule::Kill => promote_kill(board, agent),
    }
}

/// Combined mask of every enabled rule in the given mode, schedule-weighted
/// at `step`. Rules combine in rule order 1 through 4.
pub fn combined_mask(
    board: &BoardState,
    agent: SnakeId,
    cfg: &HeuristicConfig,
    mode: RuleMode,
    step: u64,
) -> RuleMask {
    let masks: Vec<RuleMask> = cfg
        .enabled_with_mode(mode)
        .map(|rule| weighted_mask(&rule_mask(rule, board, agent, cfg), cfg.rule_weight(rule, step)))
        .collect();
    if masks.is_empty() {
        RuleMask::all_valid()
    } else {
        combine_masks(&masks)
    }
}

/// Ad-hoc action overwriting at inference (schedule weights do not apply).
///
/// Precedence: a preferred action from an enabled overwrite rule wins; an
/// already-valid policy action stands; otherwise the valid action with the
/// highest policy probability is substituted; with everything masked the
/// policy action goes through unchanged.
pub fn overwrite_action(
    policy_action: Action,
    policy_probs: &[f64; 4],
    board: &BoardState,
    agent: SnakeId,
    cfg: &HeuristicConfig,
) -> Action {
    let masks: Vec<RuleMask> = cfg
        .enabled_with_mode(RuleMode::AdHocOverwrite)
        .map(|rule| rule_mask(rule, board, agent, cfg))
        .collect();
    if masks.is_empty() {
        return policy_action;
    }
    let combined = combine_masks(&masks);
    if let Some(preferred) = combined.preferred {
        return preferred;
    }
    if combined.allows(policy_action) {
        return policy_action;
    }
    Action::ALL
        .into_iter()
        .filter(|a| combined.allows(*a))
        .max_by(|a, b| {
            policy_probs[a.index()]
                .partial_cmp(&policy_probs[b.index()])
                .unwrap()
                // Stable tie-break: keep the lower action index.
                .then(b.index().cmp(&a.index()))
        })
        .unwrap_or(policy_action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Action, BoardState, Coord, SnakeId, SnakeState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn board(
        width: i32,
        height: i32,
        snakes: Vec<(Vec<Coord>, u8, Option<Action>)>,
        food: Vec<Coord>,
    ) -> BoardState {
        BoardState {
            width,
            height,
            snakes: snakes
                .into_iter()
                .enumerate()
                .map(|(i, (body, health, facing))| SnakeState {
                    id: SnakeId(i as u8 + 1),
                    body,
                    health,
                    alive: true,
                    facing,
                })
                .collect(),
            food: food.into_iter().collect(),
            turn: 0,
            food_spawn_probability: 0.0,
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }

    #[test]
    fn corner_masks_the_two_wall_moves() {
        let b = board(11, 11, vec![(vec![Coord::new(0, 0); 3], 80, None)], vec![]);
        let mask = mask_walls(&b, SnakeId(1));
        // up and left leave the board.
        assert_eq!(mask.valid, [false, true, false, true]);
    }

    #[test]
    fn center_head_has_no_wall_mask() {
        let b = board(11, 11, vec![(vec![Coord::new(5, 5); 3], 80, None)], vec![]);
        assert!(mask_walls(&b, SnakeId(1)).is_all_valid());
    }

    #[test]
    fn right_edge_masks_right() {
        let b = board(11, 11, vec![(vec![Coord::new(10, 5); 3], 80, None)], vec![]);
        let mask = mask_walls(&b, SnakeId(1));
        assert_eq!(mask.valid, [true, true, true, false]);
    }

    #[test]
    fn forbidden_masks_the_reverse_of_facing() {
        let b = board(
            11,
            11,
            vec![(vec![Coord::new(5, 5); 3], 80, Some(Action::Up))],
            vec![],
        );
        assert_eq!(mask_forbidden(&b, SnakeId(1)).valid, [true, false, true, true]);

        let b2 = board(
            11,
            11,
            vec![(vec![Coord::new(5, 5); 3], 80, Some(Action::Left))],
            vec![],
        );
        assert_eq!(mask_forbidden(&b2, SnakeId(1)).valid, [true, true, true, false]);
    }

    #[test]
    fn no_facing_means_no_forbidden_mask() {
        let b = board(11, 11, vec![(vec![Coord::new(5, 5); 3], 80, None)], vec![]);
        assert!(mask_forbidden(&b, SnakeId(1)).is_all_valid());
    }

    #[test]
    fn low_health_prefers_the_adjacent_food() {
        let b = board(
            11,
            11,
            vec![(vec![Coord::new(5, 5); 3], 10, None)],
            vec![Coord::new(4, 5)],
        );
        let mask = promote_food(&b, SnakeId(1), 30);
        assert_eq!(mask.preferred, Some(Action::Left));
        assert!(mask.is_all_valid());
    }

    #[test]
    fn healthy_snake_has_no_food_preference() {
        let b = board(
            11,
            11,
            vec![(vec![Coord::new(5, 5); 3], 90, None)],
            vec![Coord::new(4, 5)],
        );
        assert_eq!(promote_food(&b, SnakeId(1), 30).preferred, None);
    }

    #[test]
    fn unreachable_food_yields_no_preference() {
        // A full-width wall of snake 2 separates snake 1 from the food.
        let wall: Vec<Coord> = (0..7).map(|x| Coord::new(x, 3)).collect();
        let b = board(
            7,
            7,
            vec![
                (vec![Coord::new(3, 1); 3], 5, None),
                (wall, 80, Some(Action::Right)),
            ],
            vec![Coord::new(3, 6)],
        );
        assert_eq!(promote_food(&b, SnakeId(1), 30).preferred, None);
    }

    #[test]
    fn food_path_routes_around_obstacles() {
        // Food sits left, but a vertical enemy wall blocks the direct step.
        let wall: Vec<Coord> = (3..=5).map(|y| Coord::new(4, y)).collect();
        let b = board(
            9,
            9,
            vec![
                (vec![Coord::new(5, 4); 3], 5, None),
                (wall, 80, Some(Action::Up)),
            ],
            vec![Coord::new(3, 4)],
        );
        let mask = promote_food(&b, SnakeId(1), 30);
        // Shortest detours via up or down are tied at 4 steps; up wins.
        assert_eq!(mask.preferred, Some(Action::Up));
    }

    #[test]
    fn longer_snake_moves_to_cut_off_a_shorter_head() {
        let b = board(
            11,
            11,
            vec![
                (
                    vec![
                        Coord::new(4, 5),
                        Coord::new(3, 5),
                        Coord::new(2, 5),
                        Coord::new(1, 5),
                        Coord::new(0, 5),
                    ],
                    80,
                    Some(Action::Right),
                ),
                (
                    vec![Coord::new(6, 5), Coord::new(7, 5), Coord::new(8, 5)],
                    80,
                    Some(Action::Left),
                ),
            ],
            vec![],
        );
        let mask = promote_kill(&b, SnakeId(1));
        assert_eq!(mask.preferred, Some(Action::Right));
    }

    #[test]
    fn equal_length_wins_nothing() {
        let b = board(
            11,
            11,
            vec![
                (
                    vec![Coord::new(4, 5), Coord::new(3, 5), Coord::new(2, 5)],
                    80,
                    Some(Action::Right),
                ),
                (
                    vec![Coord::new(6, 5), Coord::new(7, 5), Coord::new(8, 5)],
                    80,
                    Some(Action::Left),
                ),
            ],
            vec![],
        );
        assert_eq!(promote_kill(&b, SnakeId(1)).preferred, None);
    }

    #[test]
    fn combine_is_elementwise_and() {
        let walls = RuleMask {
            valid: [false, true, true, true],
            preferred: None,
        };
        let forbidden = RuleMask {
            valid: [true, false, true, true],
            preferred: None,
        };
        let combined = combine_masks(&[walls, forbidden]);
        assert_eq!(combined.valid, [false, false, true, true]);
        assert_eq!(combine_masks(&[walls]), walls);
    }

    #[test]
    fn preferred_dropped_when_masked_out() {
        let promo = RuleMask {
            valid: [true; 4],
            preferred: Some(Action::Up),
        };
        let prevent = RuleMask {
            valid: [false, true, true, true],
            preferred: None,
        };
        assert_eq!(combine_masks(&[promo, prevent]).preferred, None);
        // Order does not matter for the surviving-preferred rule.
        assert_eq!(combine_masks(&[prevent, promo]).preferred, None);
    }

    #[test]
    fn apply_mask_renormalizes() {
        let probs = [0.25; 4];
        let mask = RuleMask {
            valid: [true, true, false, false],
            preferred: None,
        };
        assert_eq!(apply_mask(&probs, &mask), [0.5, 0.5, 0.0, 0.0]);

        let skewed = [0.7, 0.1, 0.1, 0.1];
        let mask2 = RuleMask {
            valid: [false, true, true, true],
            preferred: None,
        };
        let out = apply_mask(&skewed, &mask2);
        assert_eq!(out[0], 0.0);
        for v in &out[1..] {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn all_ones_mask_is_identity_and_all_zero_falls_back() {
        let probs = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(apply_mask(&probs, &RuleMask::all_valid()), probs);
        let blocked = RuleMask {
            valid: [false; 4],
            preferred: None,
        };
        assert_eq!(apply_mask(&probs, &blocked), probs);
    }

    #[test]
    fn zero_probability_survivors_become_uniform() {
        let probs = [1.0, 0.0, 0.0, 0.0];
        let mask = RuleMask {
            valid: [false, true, true, false],
            preferred: None,
        };
        assert_eq!(apply_mask(&probs, &mask), [0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn overwrite_dodges_forbidden_moves() {
        let b = board(
            11,
            11,
            vec![(vec![Coord::new(5, 5), Coord::new(5, 4), Coord::new(5, 3)], 80, Some(Action::Up))],
            vec![],
        );
        let cfg = HeuristicConfig::with_rule(Rule::Forbidden, RuleMode::AdHocOverwrite);
        let probs = [0.05, 0.8, 0.1, 0.05];
        let out = overwrite_action(Action::Down, &probs, &b, SnakeId(1), &cfg);
        assert_ne!(out, Action::Down);
        // Highest-probability valid action: left at 0.1.
        assert_eq!(out, Action::Left);
    }

    #[test]
    fn overwrite_with_no_rules_is_identity() {
        let b = board(11, 11, vec![(vec![Coord::new(5, 5); 3], 80, Some(Action::Up))], vec![]);
        let cfg = HeuristicConfig::default();
        assert_eq!(
            overwrite_action(Action::Down, &[0.25; 4], &b, SnakeId(1), &cfg),
            Action::Down
        );
    }

    #[test]
    fn overwrite_prefers_the_food_path() {
        let b = board(
            11,
            11,
            vec![(vec![Coord::new(5, 5); 3], 5, None)],
            vec![Coord::new(4, 5)],
        );
        let mut cfg = HeuristicConfig::default();
        cfg.rules.insert(Rule::Food, RuleMode::AdHocOverwrite);
        let out = overwrite_action(Action::Up, &[0.7, 0.1, 0.1, 0.1], &b, SnakeId(1), &cfg);
        assert_eq!(out, Action::Left);
    }

    #[test]
    fn valid_policy_action_passes_through() {
        let b = board(
            11,
            11,
            vec![(vec![Coord::new(5, 5), Coord::new(5, 4), Coord::new(5, 3)], 80, Some(Action::Up))],
            vec![],
        );
        let cfg = HeuristicConfig::with_rule(Rule::Forbidden, RuleMode::AdHocOverwrite);
        assert_eq!(
            overwrite_action(Action::Left, &[0.25; 4], &b, SnakeId(1), &cfg),
            Action::Left
        );
    }

    #[test]
    fn schedule_weight_zero_equals_disabled() {
        let b = board(11, 11, vec![(vec![Coord::new(0, 0); 3], 80, Some(Action::Up))], vec![]);
        let mut cfg = HeuristicConfig::default();
        cfg.rules.insert(Rule::Walls, RuleMode::InTrainingMask);
        cfg.rules.insert(Rule::Forbidden, RuleMode::InTrainingMask);
        cfg.schedule.push(SchedulePoint {
            step: 100,
            weights: [(Rule::Walls, 0.0)].into_iter().collect(),
        });

        // Before step 100 both rules bite.
        let early = combined_mask(&b, SnakeId(1), &cfg, RuleMode::InTrainingMask, 0);
        assert_eq!(early.valid, [false, false, false, true]);

        // From step 100 the wall rule is byte-equivalent to disabled.
        let late = combined_mask(&b, SnakeId(1), &cfg, RuleMode::InTrainingMask, 100);
        let disabled = {
            let mut c = cfg.clone();
            c.rules.remove(&Rule::Walls);
            c.schedule.clear();
            combined_mask(&b, SnakeId(1), &c, RuleMode::InTrainingMask, 100)
        };
        assert_eq!(late, disabled);
    }

    #[test]
    fn shaping_terms_follow_rule_polarity() {
        let mut cfg = HeuristicConfig::default();
        cfg.rules.insert(Rule::Walls, RuleMode::RewardShaping);
        cfg.rules.insert(Rule::Food, RuleMode::RewardShaping);
        let terms = cfg.shaping_terms(0);
        assert_eq!(terms.get(&TurnEventKind::HitWall), Some(&-0.4));
        assert_eq!(terms.get(&TurnEventKind::AteFood), Some(&0.4));
    }

    #[test]
    fn combine_valid_is_associative_and_commutative() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let m: Vec<RuleMask> = (0..3)
                .map(|_| RuleMask {
                    valid: std::array::from_fn(|_| rng.random_bool(0.6)),
                    preferred: None,
                })
                .collect();
            let abc = combine_masks(&[combine_masks(&m[..2]), m[2]]);
            let a_bc = combine_masks(&[m[0], combine_masks(&m[1..])]);
            let cba = combine_masks(&[m[2], m[1], m[0]]);
            assert_eq!(abc.valid, a_bc.valid);
            assert_eq!(abc.valid, cba.valid);
        }
    }
}
