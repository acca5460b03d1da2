use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EnvError;

pub const SPEC_FORMAT_VERSION: u32 = 1;

pub const ROOM_NAMES: &[&str] = &[
    "pantry",
    "living room",
    "bedroom",
    "bathroom",
    "garden",
    "cellar",
    "study",
    "hallway",
    "attic",
    "garage",
    "porch",
];
pub const KITCHEN: &str = "kitchen";

pub const INGREDIENTS: &[&str] = &[
    "carrot", "onion", "potato", "tomato", "pepper", "garlic", "cheese", "egg", "apple", "lettuce",
];
pub const KEY: &str = "key";

pub const ROOMS_RANGE: (usize, usize) = (2, 12);
pub const CHAIN_RANGE: (usize, usize) = (3, 64);
pub const DEPTH_RANGE: (usize, usize) = (2, 10);
pub const DEFAULT_MAX_STEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKind {
    Cooking,
    Chain,
    Tree,
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameKind::Cooking => "cooking",
            GameKind::Chain => "chain",
            GameKind::Tree => "tree",
        })
    }
}

impl std::str::FromStr for GameKind {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cooking" => Ok(GameKind::Cooking),
            "chain" => Ok(GameKind::Chain),
            "tree" => Ok(GameKind::Tree),
            other => Err(EnvError::Config(format!("unknown game kind '{other}'"))),
        }
    }
}

/// Size parameters for [`generate_game`]. Only the field matching the game
/// kind is read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GameParams {
    pub rooms: usize,
    pub chain_length: usize,
    pub tree_depth: usize,
    /// `None` picks the per-kind default: 100 for cooking and tree games,
    /// `2 * (chain_length - 1)` for chains.
    pub max_steps: Option<usize>,
    /// When false only the final goal is rewarded.
    pub intermediate_rewards: bool,
}

impl Default for GameParams {
    fn default() -> Self {
        GameParams {
            rooms: 6,
            chain_length: 7,
            tree_depth: 4,
            max_steps: None,
            intermediate_rewards: true,
        }
    }
}

/// Room graph and object placement of a cooking game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CookingLayout {
    pub room_names: Vec<String>,
    /// Undirected edges `(a, b)` with `a < b`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub start: usize,
    pub kitchen: usize,
    /// The room on the other side of the locked kitchen door.
    pub door_room: usize,
    pub key_room: usize,
    /// Room holding each recipe ingredient, parallel to `GameSpec::recipe`.
    pub ingredient_rooms: Vec<usize>,
}

impl CookingLayout {
    pub fn neighbors(&self, room: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == room {
                    Some(b)
                } else if b == room {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn room_index(&self, name: &str) -> Option<usize> {
        self.room_names.iter().position(|r| r == name)
    }

    /// Shortest path from `from` to `to` that avoids the kitchen, as a list
    /// of rooms excluding `from`.
    fn path_avoiding_kitchen(&self, from: usize, to: usize) -> Vec<usize> {
        let n = self.room_names.len();
        let mut prev = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(r) = queue.pop_front() {
            if r == to {
                break;
            }
            for nb in self.neighbors(r) {
                if !seen[nb] && nb != self.kitchen {
                    seen[nb] = true;
                    prev[nb] = r;
                    queue.push_back(nb);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            path.push(cur);
            cur = prev[cur];
        }
        path.reverse();
        path
    }
}

/// Immutable, seeded game definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    pub version: u32,
    pub kind: GameKind,
    pub seed: u64,
    pub rooms: usize,
    pub chain_length: usize,
    pub tree_depth: usize,
    pub max_steps: usize,
    pub intermediate_rewards: bool,
    pub recipe: Vec<String>,
    pub solution: Vec<String>,
    pub max_score: u32,
    /// Fixed command set of the game; the agent's action space.
    pub commands: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<CookingLayout>,
}

impl GameSpec {
    pub fn id(&self) -> String {
        match self.kind {
            GameKind::Cooking => format!("cooking-r{}-s{}", self.rooms, self.seed),
            GameKind::Chain => format!("chain-{}-s{}", self.chain_length, self.seed),
            GameKind::Tree => format!("tree-d{}-s{}", self.tree_depth, self.seed),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, EnvError> {
        let spec: GameSpec =
            serde_json::from_str(text).map_err(|e| EnvError::Format(e.to_string()))?;
        if spec.version != SPEC_FORMAT_VERSION {
            return Err(EnvError::Format(format!(
                "unsupported spec version {}",
                spec.version
            )));
        }
        Ok(spec)
    }

    /// Returns a copy with intermediate rewards switched on or off.
    pub fn with_intermediate_rewards(&self, on: bool) -> GameSpec {
        let mut spec = self.clone();
        spec.intermediate_rewards = on;
        spec.max_score = match spec.kind {
            GameKind::Cooking if on => spec.recipe.len() as u32 + 2,
            _ => 1,
        };
        spec
    }

    /// Tree only: the branch taken at each level on the way to the rewarded leaf.
    pub(crate) fn rewarded_path(&self) -> Vec<bool> {
        self.solution.iter().map(|a| a == "go right").collect()
    }
}

fn check_range(name: &str, value: usize, (lo, hi): (usize, usize)) -> Result<(), EnvError> {
    if value < lo || value > hi {
        return Err(EnvError::Config(format!(
            "{name} must be in {lo}..={hi}, got {value}"
        )));
    }
    Ok(())
}

/// Deterministically generates a game of the given kind.
pub fn generate_game(kind: GameKind, seed: u64, params: &GameParams) -> Result<GameSpec, EnvError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = match kind {
        GameKind::Chain => {
            check_range("chain_length", params.chain_length, CHAIN_RANGE)?;
            let len = params.chain_length;
            GameSpec {
                version: SPEC_FORMAT_VERSION,
                kind,
                seed,
                rooms: 0,
                chain_length: len,
                tree_depth: 0,
                max_steps: params.max_steps.unwrap_or(2 * (len - 1)),
                intermediate_rewards: params.intermediate_rewards,
                recipe: Vec::new(),
                solution: vec!["go right".to_string(); len - 1],
                max_score: 1,
                commands: vec!["go left".into(), "go right".into()],
                layout: None,
            }
        }
        GameKind::Tree => {
            check_range("tree_depth", params.tree_depth, DEPTH_RANGE)?;
            let depth = params.tree_depth;
            let solution = (0..depth)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        "go right".to_string()
                    } else {
                        "go left".to_string()
                    }
                })
                .collect();
            GameSpec {
                version: SPEC_FORMAT_VERSION,
                kind,
                seed,
                rooms: 0,
                chain_length: 0,
                tree_depth: depth,
                max_steps: params.max_steps.unwrap_or(DEFAULT_MAX_STEPS),
                intermediate_rewards: params.intermediate_rewards,
                recipe: Vec::new(),
                solution,
                max_score: 1,
                commands: vec!["go left".into(), "go right".into()],
                layout: None,
            }
        }
        GameKind::Cooking => {
            check_range("rooms", params.rooms, ROOMS_RANGE)?;
            generate_cooking(&mut rng, seed, params)
        }
    };
    if spec.solution.len() > spec.max_steps {
        return Err(EnvError::Config(format!(
            "max_steps {} is shorter than the {}-step solution",
            spec.max_steps,
            spec.solution.len()
        )));
    }
    Ok(spec.with_intermediate_rewards(params.intermediate_rewards))
}

fn generate_cooking(rng: &mut ChaCha8Rng, seed: u64, params: &GameParams) -> GameSpec {
    let n = params.rooms;
    let kitchen = n - 1;

    let mut names: Vec<&str> = ROOM_NAMES.to_vec();
    names.shuffle(rng);
    let mut room_names: Vec<String> = names[..n - 1].iter().map(|s| s.to_string()).collect();
    room_names.push(KITCHEN.to_string());

    // Spanning tree over the non-kitchen rooms, kitchen hangs off as a leaf
    // behind the locked door.
    let mut edges = Vec::new();
    for i in 1..kitchen {
        edges.push((rng.random_range(0..i), i));
    }
    let door_room = rng.random_range(0..kitchen);
    edges.push((door_room, kitchen));

    let extra = rng.random_range(0..=2usize);
    for _ in 0..extra {
        if kitchen < 3 {
            break;
        }
        for _attempt in 0..8 {
            let a = rng.random_range(0..kitchen);
            let b = rng.random_range(0..kitchen);
            let e = (a.min(b), a.max(b));
            if a != b && !edges.contains(&e) {
                edges.push(e);
                break;
            }
        }
    }
    edges.sort_unstable();

    let key_room = rng.random_range(0..kitchen);
    let n_ingredients = rng.random_range(1..=(n - 1).min(3));
    let mut pool: Vec<&str> = INGREDIENTS.to_vec();
    pool.shuffle(rng);
    let recipe: Vec<String> = pool[..n_ingredients].iter().map(|s| s.to_string()).collect();
    let ingredient_rooms: Vec<usize> = (0..n_ingredients)
        .map(|_| rng.random_range(0..kitchen))
        .collect();

    let layout = CookingLayout {
        room_names,
        edges,
        start: 0,
        kitchen,
        door_room,
        key_room,
        ingredient_rooms,
    };

    let mut commands: Vec<String> = layout
        .room_names
        .iter()
        .map(|r| format!("go {r}"))
        .collect();
    commands.extend(recipe.iter().map(|i| format!("take {i}")));
    commands.push(format!("take {KEY}"));
    commands.push("open door".into());
    commands.push("cook meal".into());
    commands.push("eat meal".into());

    let solution = plan_cooking(&layout, &recipe);

    GameSpec {
        version: SPEC_FORMAT_VERSION,
        kind: GameKind::Cooking,
        seed,
        rooms: n,
        chain_length: 0,
        tree_depth: 0,
        max_steps: params.max_steps.unwrap_or(DEFAULT_MAX_STEPS),
        intermediate_rewards: params.intermediate_rewards,
        recipe,
        solution,
        max_score: 0,
        commands,
        layout: Some(layout),
    }
}

/// Greedy nearest-first collection tour, then door, kitchen, cook, eat.
fn plan_cooking(layout: &CookingLayout, recipe: &[String]) -> Vec<String> {
    // (room, item) pairs still to collect, recipe order then key.
    let mut pending: Vec<(usize, String)> = recipe
        .iter()
        .zip(&layout.ingredient_rooms)
        .map(|(item, &room)| (room, item.clone()))
        .collect();
    pending.push((layout.key_room, KEY.to_string()));

    let mut actions = Vec::new();
    let mut here = layout.start;
    let go = |actions: &mut Vec<String>, path: Vec<usize>| {
        for r in path {
            actions.push(format!("go {}", layout.room_names[r]));
        }
    };

    while !pending.is_empty() {
        let (best, _) = pending
            .iter()
            .enumerate()
            .map(|(i, (room, _))| (i, layout.path_avoiding_kitchen(here, *room).len()))
            .min_by_key(|&(i, d)| (d, i))
            .expect("pending is non-empty");
        let target = pending[best].0;
        go(&mut actions, layout.path_avoiding_kitchen(here, target));
        here = target;
        let (take_here, rest): (Vec<_>, Vec<_>) =
            pending.into_iter().partition(|(room, _)| *room == here);
        for (_, item) in take_here {
            actions.push(format!("take {item}"));
        }
        pending = rest;
    }

    go(&mut actions, layout.path_avoiding_kitchen(here, layout.door_room));
    actions.push("open door".into());
    actions.push(format!("go {KITCHEN}"));
    actions.push("cook meal".into());
    actions.push("eat meal".into());
    actions
}
