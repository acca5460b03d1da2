//! Fixed phrase banks used to decorate observations.
//!
//! Success observations carry a phrase from [`POSITIVE`], explicit failures
//! one from [`NEGATIVE`], plain navigation one from [`NEUTRAL`]. The choice
//! within a bank is a pure function of (game seed, step index, salt).

pub const POSITIVE: &[&str] = &[
    "Good job!",
    "Well done!",
    "Excellent work!",
    "Nice going!",
    "Great, that worked perfectly.",
    "You feel proud of yourself.",
    "Wonderful!",
    "That was a brilliant move.",
    "You are making real progress.",
    "Fantastic!",
    "Splendid, everything is going well.",
    "You feel happy and confident.",
    "Bravo!",
    "What a success!",
    "Superb!",
    "You grin with delight.",
    "Perfect!",
    "Marvelous, you are on the right track.",
    "A warm glow of satisfaction fills you.",
    "Hooray!",
];

pub const NEGATIVE: &[&str] = &[
    "Ouch!",
    "That was a terrible idea.",
    "You feel awful.",
    "Bad luck.",
    "What a disaster.",
    "Ugh, that hurt.",
    "You feel foolish and frustrated.",
    "Oops, wrong move.",
    "That went horribly.",
    "Sadly, nothing good comes of it.",
    "You groan in pain.",
    "This is hopeless.",
    "Alas!",
    "You feel miserable.",
    "Yikes, a painful mistake.",
    "Damn!",
    "How unfortunate.",
    "You wince at your clumsiness.",
    "A sinking feeling of dread washes over you.",
    "Failure!",
];

pub const NEUTRAL: &[&str] = &[
    "You look around.",
    "Time passes.",
    "The air is still.",
    "Nothing special happens.",
    "You take a moment to get your bearings.",
    "The floorboards creak underfoot.",
    "A clock ticks somewhere.",
    "You pause briefly.",
    "Dust drifts in the light.",
    "It is quiet here.",
    "You walk on.",
    "The walls are plain.",
    "A faint draft blows by.",
    "You glance at your surroundings.",
    "Somewhere a door closes.",
    "The light is dim.",
    "You keep moving.",
    "Shadows stretch across the floor.",
    "The room smells of old wood.",
    "You hear distant footsteps.",
];

pub const NOT_UNDERSTOOD: &str = "I don't understand that.";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tone {
    Positive,
    Negative,
    Neutral,
}

impl Tone {
    pub fn bank(self) -> &'static [&'static str] {
        match self {
            Tone::Positive => POSITIVE,
            Tone::Negative => NEGATIVE,
            Tone::Neutral => NEUTRAL,
        }
    }
}

// splitmix64 finalizer
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn phrase(tone: Tone, seed: u64, step: usize, salt: u64) -> &'static str {
    let bank = tone.bank();
    let h = mix(seed ^ mix(step as u64 ^ mix(salt)));
    bank[(h % bank.len() as u64) as usize]
}

/// Whether `text` contains some phrase of the given bank.
pub fn contains_phrase(text: &str, tone: Tone) -> bool {
    tone.bank().iter().any(|p| text.contains(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn banks_are_disjoint_and_sized() {
        for bank in [POSITIVE, NEGATIVE, NEUTRAL] {
            assert_eq!(bank.len(), 20);
        }
        for p in POSITIVE {
            assert!(!NEGATIVE.contains(p) && !NEUTRAL.contains(p));
        }
    }

    #[test]
    fn phrase_is_deterministic() {
        assert_eq!(phrase(Tone::Positive, 3, 4, 5), phrase(Tone::Positive, 3, 4, 5));
        let distinct: std::collections::HashSet<_> =
            (0..200).map(|s| phrase(Tone::Negative, 1, s, 0)).collect();
        assert!(distinct.len() > 10);
    }
}
