//! Deterministic Battlesnake rules engine.
//!
//! The game is a simultaneous-move Markov game: every living snake commits
//! one action per turn and the board resolves all of them in a fixed seven
//! phase pipeline (see [`step`]). All randomness (spawn placement, food
//! drops) comes from a seedable generator owned by the board, so a
//! `(GameConfig, action script)` pair reproduces a game bit for bit.
//!
//! Coordinate frame: origin at the top-left, `y` grows downward. "up"
//! therefore decreases `y`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Board cell coordinate. May hold out-of-range values transiently while a
/// head advance is being evaluated; persisted states keep all coordinates
/// inside `[0,width) x [0,height)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coord {
    pub x: i32,
    pub y: i32,
}

impl Coord {
    pub fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Coord) -> i32 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }

    pub fn step(self, action: Action) -> Coord {
        let (dx, dy) = action.delta();
        Coord::new(self.x + dx, self.y + dy)
    }
}

/// One of the four move directions. Integer codes are fixed: up=0, down=1,
/// left=2, right=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Up = 0,
    Down = 1,
    Left = 2,
    Right = 3,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Up, Action::Down, Action::Left, Action::Right];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(idx: usize) -> Option<Action> {
        Action::ALL.get(idx).copied()
    }

    /// Grid delta in the y-down frame.
    pub fn delta(self) -> (i32, i32) {
        match self {
            Action::Up => (0, -1),
            Action::Down => (0, 1),
            Action::Left => (-1, 0),
            Action::Right => (1, 0),
        }
    }

    pub fn opposite(self) -> Action {
        match self {
            Action::Up => Action::Down,
            Action::Down => Action::Up,
            Action::Left => Action::Right,
            Action::Right => Action::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Up => "up",
            Action::Down => "down",
            Action::Left => "left",
            Action::Right => "right",
        }
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Action {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "up" => Ok(Action::Up),
            "down" => Ok(Action::Down),
            "left" => Ok(Action::Left),
            "right" => Ok(Action::Right),
            other => Err(format!("unknown action {other:?}")),
        }
    }
}

/// Agent identifier, 1-based.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct SnakeId(pub u8);

impl std::fmt::Display for SnakeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One snake on the board. `body[0]` is the head; consecutive segments are
/// either 4-adjacent or stacked on the same cell (spawn and post-eat tails).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnakeState {
    pub id: SnakeId,
    pub body: Vec<Coord>,
    pub health: u8,
    pub alive: bool,
    /// Direction of the last committed move; `None` before the first move.
    pub facing: Option<Action>,
}

impl SnakeState {
    pub fn head(&self) -> Coord {
        self.body[0]
    }

    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }
}

/// What happened to an agent during one resolution of [`step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnEventKind {
    AteFood,
    HitWall,
    HitSelf,
    HitOtherBody,
    ForbiddenMove,
    HeadToHeadLoss,
    HeadToHeadMutual,
    Starved,
    KilledOther,
    SurvivedTurn,
    Won,
}

impl TurnEventKind {
    /// Event kinds that remove a snake from the game.
    pub fn is_elimination(self) -> bool {
        matches!(
            self,
            TurnEventKind::HitWall
                | TurnEventKind::HitSelf
                | TurnEventKind::HitOtherBody
                | TurnEventKind::ForbiddenMove
                | TurnEventKind::HeadToHeadLoss
                | TurnEventKind::HeadToHeadMutual
                | TurnEventKind::Starved
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TurnEvent {
    pub agent: SnakeId,
    pub kind: TurnEventKind,
}

impl TurnEvent {
    pub fn new(agent: SnakeId, kind: TurnEventKind) -> Self {
        Self { agent, kind }
    }
}

/// Static game parameters. `seed` drives every random draw of the game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub width: i32,
    pub height: i32,
    pub n_snakes: u8,
    #[serde(default = "default_initial_length")]
    pub initial_length: u32,
    #[serde(default = "default_food_spawn_probability")]
    pub food_spawn_probability: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_initial_length() -> u32 {
    3
}

fn default_food_spawn_probability() -> f64 {
    0.15
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            width: 11,
            height: 11,
            n_snakes: 5,
            initial_length: default_initial_length(),
            food_spawn_probability: default_food_spawn_probability(),
            seed: 0,
        }
    }
}

impl GameConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.width < 5 || self.height < 5 {
            return Err(EngineError::InvalidConfig(format!(
                "board {}x{} is below the 5x5 minimum",
                self.width, self.height
            )));
        }
        if self.n_snakes < 2 {
            return Err(EngineError::InvalidConfig(format!(
                "need at least 2 snakes, got {}",
                self.n_snakes
            )));
        }
        if self.initial_length == 0 {
            return Err(EngineError::InvalidConfig(
                "initial_length must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.food_spawn_probability) {
            return Err(EngineError::InvalidConfig(format!(
                "food_spawn_probability {} outside [0, 1]",
                self.food_spawn_probability
            )));
        }
        let boundary = 2 * (self.width + self.height) as usize - 4;
        if self.n_snakes as usize > boundary {
            return Err(EngineError::InvalidConfig(format!(
                "{} snakes cannot fit on {} boundary cells",
                self.n_snakes, boundary
            )));
        }
        Ok(())
    }
}

/// Result of a finished game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameOutcome {
    Winner(SnakeId),
    Draw,
}

/// Full authoritative game state, including the RNG that drives food spawns.
#[derive(Debug, Clone, PartialEq)]
pub struct BoardState {
    pub width: i32,
    pub height: i32,
    pub snakes: Vec<SnakeState>,
    pub food: BTreeSet<Coord>,
    pub turn: u32,
    pub food_spawn_probability: f64,
    pub rng: ChaCha8Rng,
}

impl BoardState {
    pub fn in_bounds(&self, c: Coord) -> bool {
        c.x >= 0 && c.x < self.width && c.y >= 0 && c.y < self.height
    }

    pub fn snake(&self, id: SnakeId) -> Option<&SnakeState> {
        self.snakes.iter().find(|s| s.id == id)
    }

    pub fn living_snakes(&self) -> impl Iterator<Item = &SnakeState> {
        self.snakes.iter().filter(|s| s.alive)
    }

    pub fn living_count(&self) -> usize {
        self.living_snakes().count()
    }

    /// Cells occupied by any living snake body segment.
    pub fn occupied_cells(&self) -> BTreeSet<Coord> {
        self.living_snakes()
            .flat_map(|s| s.body.iter().copied())
            .collect()
    }

    /// Cells that are in bounds and free of living bodies and food.
    fn free_cells(&self) -> Vec<Coord> {
        let occupied = self.occupied_cells();
        let mut cells = Vec::new();
        for x in 0..self.width {
            for y in 0..self.height {
                let c = Coord::new(x, y);
                if !occupied.contains(&c) && !self.food.contains(&c) {
                    cells.push(c);
                }
            }
        }
        cells
    }
}

pub type JointActions = BTreeMap<SnakeId, Action>;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid game config: {0}")]
    InvalidConfig(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
}

/// Place `n_snakes` on distinct boundary cells, stacked at `initial_length`,
/// and drop one food on a free cell.
pub fn init_game(config: &GameConfig) -> Result<BoardState, EngineError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut boundary: Vec<Coord> = Vec::new();
    for x in 0..config.width {
        for y in 0..config.height {
            if x == 0 || y == 0 || x == config.width - 1 || y == config.height - 1 {
                boundary.push(Coord::new(x, y));
            }
        }
    }

    let picks = rand::seq::index::sample(&mut rng, boundary.len(), config.n_snakes as usize);
    let snakes: Vec<SnakeState> = picks
        .iter()
        .enumerate()
        .map(|(i, cell_idx)| SnakeState {
            id: SnakeId(i as u8 + 1),
            body: vec![boundary[cell_idx]; config.initial_length as usize],
            health: 100,
            alive: true,
            facing: None,
        })
        .collect();

    let mut board = BoardState {
        width: config.width,
        height: config.height,
        snakes,
        food: BTreeSet::new(),
        turn: 0,
        food_spawn_probability: config.food_spawn_probability,
        rng,
    };
    if !spawn_food(&mut board) {
        return Err(EngineError::InvalidConfig(
            "no free cell available for the initial food".into(),
        ));
    }
    Ok(board)
}

/// Drop one food on a uniformly random free cell. Returns false when the
/// board is fully occupied (the spawn is skipped).
fn spawn_food(board: &mut BoardState) -> bool {
    let free = board.free_cells();
    if free.is_empty() {
        return false;
    }
    let idx = board.rng.random_range(0..free.len());
    board.food.insert(free[idx]);
    true
}

/// Advance the board by one simultaneous turn.
///
/// Resolution pipeline, fixed order:
/// 1. every living snake loses one health;
/// 2. snakes moving opposite to their facing are eliminated (forbidden move)
///    without moving;
/// 3. remaining heads advance one cell; tails retract unless the new head
///    lands on food, in which case the tail is kept and the snake grows;
/// 4. snakes whose head is on food eat: health back to 100, food removed
///    (shared food feeds every head on it);
/// 5. eliminations are evaluated simultaneously against post-move positions:
///    out of bounds, head on a non-head body segment, head-to-head (strictly
///    shorter snakes lose, ties among the longest eliminate them all), and
///    starvation;
/// 6. food spawns with the configured probability, and unconditionally when
///    none remains (skipped only on a full board);
/// 7. turn counter and facings update; survivors emit `survived_turn`, a sole
///    survivor emits `won`.
pub fn step(
    board: &BoardState,
    actions: &JointActions,
) -> Result<(BoardState, Vec<TurnEvent>), EngineError> {
    if is_terminal(board).is_some() {
        return Err(EngineError::ContractViolation(
            "step called on a terminal board".into(),
        ));
    }
    let living: Vec<SnakeId> = board.living_snakes().map(|s| s.id).collect();
    for id in &living {
        if !actions.contains_key(id) {
            return Err(EngineError::ContractViolation(format!(
                "missing action for living snake {id}"
            )));
        }
    }
    for id in actions.keys() {
        if !living.contains(id) {
            return Err(EngineError::ContractViolation(format!(
                "action supplied for non-living snake {id}"
            )));
        }
    }

    let mut next = board.clone();
    let mut events: Vec<TurnEvent> = Vec::new();

    // Phase 1: health decay.
    for snake in next.snakes.iter_mut().filter(|s| s.alive) {
        snake.health = snake.health.saturating_sub(1);
    }

    // Phase 2: forbidden moves are resolved before anyone advances.
    for snake in next.snakes.iter_mut().filter(|s| s.alive) {
        let action = actions[&snake.id];
        if let Some(facing) = snake.facing {
            if action == facing.opposite() {
                snake.alive = false;
                events.push(TurnEvent::new(snake.id, TurnEventKind::ForbiddenMove));
            }
        }
    }

    // Phase 3: simultaneous head advance. Eating is decided against the
    // pre-move food set; an eating snake keeps its tail this turn.
    let pre_move_food = next.food.clone();
    let mut ate: BTreeSet<SnakeId> = BTreeSet::new();
    for snake in next.snakes.iter_mut().filter(|s| s.alive) {
        let action = actions[&snake.id];
        let new_head = snake.head().step(action);
        snake.body.insert(0, new_head);
        if pre_move_food.contains(&new_head) {
            ate.insert(snake.id);
        } else {
            snake.body.pop();
        }
    }

    // Phase 4: eating takes effect even for snakes eliminated in phase 5.
    for snake in next.snakes.iter_mut().filter(|s| s.alive) {
        if ate.contains(&snake.id) {
            snake.health = 100;
            next.food.remove(&snake.head());
            events.push(TurnEvent::new(snake.id, TurnEventKind::AteFood));
        }
    }

    // Phase 5: simultaneous eliminations against post-move positions.
    let movers: Vec<(SnakeId, Coord, usize, u8)> = next
        .living_snakes()
        .map(|s| (s.id, s.head(), s.len(), s.health))
        .collect();

    // Non-head body cells of every post-move living snake.
    let mut body_cells: BTreeMap<Coord, SnakeId> = BTreeMap::new();
    for snake in next.living_snakes() {
        for seg in &snake.body[1..] {
            body_cells.entry(*seg).or_insert(snake.id);
        }
    }

    let mut head_groups: BTreeMap<Coord, Vec<(SnakeId, usize)>> = BTreeMap::new();
    for &(id, head, len, _) in &movers {
        head_groups.entry(head).or_default().push((id, len));
    }

    let mut eliminated: BTreeMap<SnakeId, TurnEventKind> = BTreeMap::new();
    let mut kill_credits: Vec<TurnEvent> = Vec::new();
    for &(id, head, _, health) in &movers {
        let kind = if !next.in_bounds(head) {
            Some(TurnEventKind::HitWall)
        } else if let Some(&owner) = body_cells.get(&head) {
            if owner == id {
                Some(TurnEventKind::HitSelf)
            } else {
                Some(TurnEventKind::HitOtherBody)
            }
        } else if let Some(kind) = head_to_head_fate(id, &head_groups[&head], &mut kill_credits) {
            Some(kind)
        } else if health == 0 {
            Some(TurnEventKind::Starved)
        } else {
            None
        };
        if let Some(kind) = kind {
            eliminated.insert(id, kind);
        }
    }

    for (&id, &kind) in &eliminated {
        let snake = next.snakes.iter_mut().find(|s| s.id == id).unwrap();
        snake.alive = false;
        events.push(TurnEvent::new(id, kind));
    }
    events.extend(kill_credits);

    // Phase 6: food spawn. A board left without food always gets one.
    if next.food.is_empty() {
        spawn_food(&mut next);
    } else {
        let roll: f64 = next.rng.random();
        if roll < next.food_spawn_probability {
            spawn_food(&mut next);
        }
    }

    // Phase 7: bookkeeping.
    next.turn += 1;
    for snake in next.snakes.iter_mut().filter(|s| s.alive) {
        snake.facing = Some(actions[&snake.id]);
        events.push(TurnEvent::new(snake.id, TurnEventKind::SurvivedTurn));
    }
    if next.living_count() == 1 {
        let winner = next.living_snakes().next().unwrap().id;
        events.push(TurnEvent::new(winner, TurnEventKind::Won));
    }

    Ok((next, events))
}

/// Head-to-head resolution for one snake within its head-cell group.
/// Returns the elimination kind for `id`, if any, and pushes `killed_other`
/// credits when a unique longest snake wins the cell.
fn head_to_head_fate(
    id: SnakeId,
    group: &[(SnakeId, usize)],
    kill_credits: &mut Vec<TurnEvent>,
) -> Option<TurnEventKind> {
    if group.len() < 2 {
        return None;
    }
    let max_len = group.iter().map(|&(_, len)| len).max().unwrap();
    let at_max = group.iter().filter(|&&(_, len)| len == max_len).count();
    let my_len = group.iter().find(|&&(gid, _)| gid == id).unwrap().1;
    if my_len < max_len {
        if at_max == 1 {
            let winner = group.iter().find(|&&(_, len)| len == max_len).unwrap().0;
            // Credit once per victim; this function runs once per victim.
            if winner != id {
                kill_credits.push(TurnEvent::new(winner, TurnEventKind::KilledOther));
            }
        }
        Some(TurnEventKind::HeadToHeadLoss)
    } else if at_max > 1 {
        Some(TurnEventKind::HeadToHeadMutual)
    } else {
        None
    }
}

/// Terminal check: a sole survivor wins, zero survivors is a draw.
pub fn is_terminal(board: &BoardState) -> Option<GameOutcome> {
    let mut living = board.living_snakes();
    match (living.next(), living.next()) {
        (Some(s), None) => Some(GameOutcome::Winner(s.id)),
        (None, _) => Some(GameOutcome::Draw),
        _ => None,
    }
}
