use std::collections::BTreeSet;

use super::spec::{GameKind, GameSpec, KEY};
use super::templates::{phrase, Tone, NOT_UNDERSTOOD};
use super::EnvError;

/// Result of a single [`EnvState::step`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub obs_text: String,
    pub r_env: f64,
    pub done: bool,
}

/// Mutable state of one episode.
#[derive(Debug, Clone)]
pub struct EnvState<'s> {
    spec: &'s GameSpec,
    /// Room index, chain position, or tree node (heap numbering, root = 1).
    location: usize,
    inventory: BTreeSet<String>,
    /// Bit i: ingredient i taken; bit R: meal cooked; bit R+1: meal eaten
    /// (goal), with R the recipe length. Chain and tree games use bit 0 only.
    milestones: u64,
    door_open: bool,
    steps_taken: usize,
    done: bool,
    score_so_far: u32,
}

enum Parsed<'a> {
    Go(&'a str),
    Take(&'a str),
    Open,
    Cook,
    Eat,
    Unknown,
}

fn parse(action: &str) -> Parsed<'_> {
    let action = action.trim();
    let (verb, rest) = match action.split_once(char::is_whitespace) {
        Some((v, r)) => (v, r.trim()),
        None => (action, ""),
    };
    let object = rest.strip_prefix("to ").unwrap_or(rest).trim_start();
    let object = object.strip_prefix("the ").unwrap_or(object).trim();
    match verb.to_ascii_lowercase().as_str() {
        "go" | "walk" if !object.is_empty() => Parsed::Go(object),
        "take" | "get" if !object.is_empty() => Parsed::Take(object),
        "open" | "unlock" if object.is_empty() || object == "door" => Parsed::Open,
        "cook" => Parsed::Cook,
        "eat" => Parsed::Eat,
        _ => Parsed::Unknown,
    }
}

/// Starts a fresh episode.
pub fn reset(spec: &GameSpec) -> (EnvState<'_>, String) {
    let state = EnvState {
        spec,
        location: match spec.kind {
            GameKind::Cooking => spec.layout.as_ref().map_or(0, |l| l.start),
            GameKind::Chain => 0,
            GameKind::Tree => 1,
        },
        inventory: BTreeSet::new(),
        milestones: 0,
        door_open: false,
        steps_taken: 0,
        done: false,
        score_so_far: 0,
    };
    let obs = match spec.kind {
        GameKind::Cooking => {
            let recipe = join_items(&spec.recipe);
            format!(
                "{} Your recipe book says: gather the {recipe}, cook the meal in the kitchen, then eat it.",
                state.describe()
            )
        }
        _ => state.describe(),
    };
    (state, obs)
}

fn join_items(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and the {last}", init.join(", the ")),
    }
}

impl<'s> EnvState<'s> {
    pub fn spec(&self) -> &'s GameSpec {
        self.spec
    }

    pub fn location(&self) -> usize {
        self.location
    }

    pub fn inventory(&self) -> &BTreeSet<String> {
        &self.inventory
    }

    pub fn milestones(&self) -> u64 {
        self.milestones
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub fn done(&self) -> bool {
        self.done
    }

    pub fn score_so_far(&self) -> u32 {
        self.score_so_far
    }

    fn goal_bit(&self) -> u64 {
        match self.spec.kind {
            GameKind::Cooking => 1 << (self.spec.recipe.len() + 1),
            _ => 1,
        }
    }

    /// True once the final goal has been reached.
    pub fn won(&self) -> bool {
        self.milestones & self.goal_bit() != 0
    }

    /// Commands that make sense in the current state (the random policy's
    /// choice set). Some of them may still fail, e.g. walking into the
    /// locked door.
    pub fn valid_actions(&self) -> Vec<String> {
        if self.done {
            return Vec::new();
        }
        match self.spec.kind {
            GameKind::Chain | GameKind::Tree => self.spec.commands.clone(),
            GameKind::Cooking => {
                let layout = self.spec.layout.as_ref().expect("cooking layout");
                let mut out: Vec<String> = layout
                    .neighbors(self.location)
                    .into_iter()
                    .map(|r| format!("go {}", layout.room_names[r]))
                    .collect();
                for (item, &room) in self.spec.recipe.iter().zip(&layout.ingredient_rooms) {
                    if room == self.location && !self.inventory.contains(item) {
                        out.push(format!("take {item}"));
                    }
                }
                if layout.key_room == self.location && !self.inventory.contains(KEY) {
                    out.push(format!("take {KEY}"));
                }
                if self.location == layout.door_room && !self.door_open {
                    out.push("open door".into());
                }
                if self.location == layout.kitchen {
                    if !self.cooked() {
                        out.push("cook meal".into());
                    } else {
                        out.push("eat meal".into());
                    }
                }
                out
            }
        }
    }

    fn cooked(&self) -> bool {
        self.milestones & (1 << self.spec.recipe.len()) != 0
    }

    /// Applies one action. Stepping a finished episode is a usage error;
    /// unparseable actions are not errors and cost a step.
    pub fn step(&mut self, action: &str) -> Result<StepOutcome, EnvError> {
        if self.done {
            return Err(EnvError::EpisodeOver);
        }
        let step_idx = self.steps_taken;
        self.steps_taken += 1;
        let action = action.to_lowercase();
        let (text, reward) = match self.spec.kind {
            GameKind::Chain => self.step_chain(&action, step_idx),
            GameKind::Tree => self.step_tree(&action, step_idx),
            GameKind::Cooking => self.step_cooking(&action, step_idx),
        };
        self.score_so_far += reward;
        if self.won() || self.steps_taken >= self.spec.max_steps {
            self.done = true;
        }
        Ok(StepOutcome {
            obs_text: text,
            r_env: reward as f64,
            done: self.done,
        })
    }

    fn say(&self, tone: Tone, step: usize, salt: u64) -> &'static str {
        phrase(tone, self.spec.seed, step, salt)
    }

    fn describe(&self) -> String {
        match self.spec.kind {
            GameKind::Chain => format!(
                "You stand in a long stone corridor beside marker {} of {}. Passages lead left and right.",
                self.location,
                self.spec.chain_length - 1
            ),
            GameKind::Tree => {
                let depth = usize::BITS - 1 - self.location.leading_zeros();
                format!(
                    "You are at a fork in the forest path, {depth} turns from the start. A weathered sign reads {}. Trails lead left and right.",
                    self.location
                )
            }
            GameKind::Cooking => self.describe_room(),
        }
    }

    fn describe_room(&self) -> String {
        let layout = self.spec.layout.as_ref().expect("cooking layout");
        let here = self.location;
        let mut text = format!("You are in the {}.", layout.room_names[here]);
        let mut items: Vec<String> = self
            .spec
            .recipe
            .iter()
            .zip(&layout.ingredient_rooms)
            .filter(|(item, &room)| room == here && !self.inventory.contains(*item))
            .map(|(item, _)| item.clone())
            .collect();
        if layout.key_room == here && !self.inventory.contains(KEY) {
            items.push(KEY.to_string());
        }
        if !items.is_empty() {
            text.push_str(&format!(" You see the {} here.", join_items(&items)));
        }
        let exits: Vec<String> = layout
            .neighbors(here)
            .into_iter()
            .filter(|&r| self.door_open || here != layout.door_room || r != layout.kitchen)
            .map(|r| layout.room_names[r].clone())
            .collect();
        if !exits.is_empty() {
            text.push_str(&format!(" Exits lead to the {}.", join_items(&exits)));
        }
        if here == layout.door_room {
            if self.door_open {
                text.push_str(" The kitchen door stands open.");
            } else {
                text.push_str(" A locked door leads to the kitchen.");
            }
        }
        if here == layout.kitchen && self.cooked() {
            text.push_str(" A hot meal sits on the stove.");
        }
        text
    }

    fn step_chain(&mut self, action: &str, step: usize) -> (String, u32) {
        let last = self.spec.chain_length - 1;
        let text = match parse(action) {
            Parsed::Go("right") => {
                self.location += 1;
                if self.location == last {
                    self.milestones |= 1;
                    return (
                        format!(
                            "{} You reach the end of the corridor and find the treasure!",
                            self.say(Tone::Positive, step, 1)
                        ),
                        1,
                    );
                }
                format!(
                    "{} You move right and the corridor grows brighter. {}",
                    self.say(Tone::Positive, step, 2),
                    self.describe()
                )
            }
            Parsed::Go("left") if self.location == 0 => format!(
                "{} You bump into the cold stone wall. {}",
                self.say(Tone::Negative, step, 3),
                self.describe()
            ),
            Parsed::Go("left") => {
                self.location -= 1;
                format!(
                    "{} You move left and the corridor grows darker. {}",
                    self.say(Tone::Negative, step, 4),
                    self.describe()
                )
            }
            Parsed::Go(_) => format!(
                "{} You can't go that way. {}",
                self.say(Tone::Negative, step, 5),
                self.describe()
            ),
            _ => format!("{NOT_UNDERSTOOD} {}", self.describe()),
        };
        (text, 0)
    }

    fn step_tree(&mut self, action: &str, step: usize) -> (String, u32) {
        let depth = (usize::BITS - 1 - self.location.leading_zeros()) as usize;
        let path = self.spec.rewarded_path();
        let right = match parse(action) {
            Parsed::Go("left") => false,
            Parsed::Go("right") => true,
            Parsed::Go(_) => {
                return (
                    format!(
                        "{} You can't go that way. {}",
                        self.say(Tone::Negative, step, 5),
                        self.describe()
                    ),
                    0,
                )
            }
            _ => return (format!("{NOT_UNDERSTOOD} {}", self.describe()), 0),
        };
        // node id of the on-path node at the current depth
        let on_path_here = path[..depth]
            .iter()
            .fold(1usize, |n, &r| 2 * n + usize::from(r));
        let was_on_path = self.location == on_path_here;
        let stays_on_path = was_on_path && path[depth] == right;
        self.location = 2 * self.location + usize::from(right);
        if depth + 1 == self.spec.tree_depth {
            if stays_on_path {
                self.milestones |= 1;
                return (
                    format!(
                        "{} You found the hidden treasure at the end of the trail!",
                        self.say(Tone::Positive, step, 1)
                    ),
                    1,
                );
            }
            self.done = true;
            return (
                format!(
                    "{} The trail ends in a dead end. There is nothing here.",
                    self.say(Tone::Negative, step, 6)
                ),
                0,
            );
        }
        let tone = if stays_on_path {
            Tone::Positive
        } else if was_on_path {
            Tone::Negative
        } else {
            Tone::Neutral
        };
        (
            format!("{} You follow the trail. {}", self.say(tone, step, 7), self.describe()),
            0,
        )
    }

    fn step_cooking(&mut self, action: &str, step: usize) -> (String, u32) {
        let spec = self.spec;
        let layout = spec.layout.as_ref().expect("cooking layout");
        let intermediate = u32::from(spec.intermediate_rewards);
        let pos = |s: &Self, salt| s.say(Tone::Positive, step, salt);
        let neg = |s: &Self, salt| s.say(Tone::Negative, step, salt);

        match parse(action) {
            Parsed::Go(room) => {
                let Some(target) = layout.room_index(room) else {
                    return (
                        format!("{} You can't go that way. {}", neg(self, 10), self.describe_room()),
                        0,
                    );
                };
                if !layout.neighbors(self.location).contains(&target) {
                    return (
                        format!(
                            "{} You can't get to the {room} from here. {}",
                            neg(self, 11),
                            self.describe_room()
                        ),
                        0,
                    );
                }
                if target == layout.kitchen && !self.door_open {
                    return (
                        format!(
                            "{} You smash into the locked door. {}",
                            neg(self, 12),
                            self.describe_room()
                        ),
                        0,
                    );
                }
                self.location = target;
                (
                    format!(
                        "{} You walk into the {room}. {}",
                        self.say(Tone::Neutral, step, 13),
                        self.describe_room()
                    ),
                    0,
                )
            }
            Parsed::Take(item) => {
                let here = self.location;
                let present = if item == KEY {
                    layout.key_room == here
                } else {
                    spec.recipe
                        .iter()
                        .zip(&layout.ingredient_rooms)
                        .any(|(i, &r)| i == item && r == here)
                };
                if self.inventory.contains(item) {
                    return (
                        format!("{} You already have the {item}. {}", neg(self, 14), self.describe_room()),
                        0,
                    );
                }
                if !present {
                    return (
                        format!("{} There is no {item} here. {}", neg(self, 15), self.describe_room()),
                        0,
                    );
                }
                self.inventory.insert(item.to_string());
                let reward = match spec.recipe.iter().position(|i| i == item) {
                    Some(idx) => {
                        self.milestones |= 1 << idx;
                        intermediate
                    }
                    None => 0,
                };
                (
                    format!("{} You took the {item}. {}", pos(self, 16), self.describe_room()),
                    reward,
                )
            }
            Parsed::Open => {
                let text = if self.location != layout.door_room {
                    format!("{} There is no door to open here.", neg(self, 17))
                } else if self.door_open {
                    format!("{} The door is already open.", neg(self, 18))
                } else if !self.inventory.contains(KEY) {
                    format!("{} The door is locked and you have no key.", neg(self, 19))
                } else {
                    self.door_open = true;
                    format!("{} You unlock the door with the key.", pos(self, 20))
                };
                (format!("{text} {}", self.describe_room()), 0)
            }
            Parsed::Cook => {
                if self.location != layout.kitchen {
                    (format!("{} You need a stove to cook. {}", neg(self, 21), self.describe_room()), 0)
                } else if self.cooked() {
                    (format!("{} The meal is already cooked. {}", neg(self, 22), self.describe_room()), 0)
                } else if spec.recipe.iter().any(|i| !self.inventory.contains(i)) {
                    (
                        format!(
                            "{} You don't have all the ingredients yet. {}",
                            neg(self, 23),
                            self.describe_room()
                        ),
                        0,
                    )
                } else {
                    self.milestones |= 1 << spec.recipe.len();
                    (
                        format!("{} You cooked a delicious meal. {}", pos(self, 24), self.describe_room()),
                        intermediate,
                    )
                }
            }
            Parsed::Eat => {
                if self.cooked() && self.location == layout.kitchen {
                    self.milestones |= self.goal_bit();
                    (
                        format!(
                            "{} You ate the meal. It tastes wonderful. You have won the game!",
                            pos(self, 25)
                        ),
                        1,
                    )
                } else {
                    (
                        format!("{} There is nothing ready to eat here. {}", neg(self, 26), self.describe_room()),
                        0,
                    )
                }
            }
            Parsed::Unknown => (format!("{NOT_UNDERSTOOD} {}", self.describe_room()), 0),
        }
    }
}
