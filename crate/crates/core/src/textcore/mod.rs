//! Tokenization, vocabularies and trajectory persistence.
//!
//! Tokenization is word-level: lowercase, split on whitespace, trim
//! punctuation from both ends of each token. Every model in the crate
//! (naive Bayes, the LSTM encoder) sees text through [`tokenize`].

mod trajfile;
mod vocab;

pub use trajfile::{load_trajectories, read_trajectories, save_trajectories, write_trajectories};
pub use trajfile::{TrajFileError, TRAJECTORY_FORMAT_VERSION};
pub use vocab::{Vocabulary, PAD_ID, UNK_ID};

fn is_trimmed(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{2018}' | '\u{2019}' | '\u{201C}' | '\u{201D}' | '\u{2026}' | '\u{2013}' | '\u{2014}'
        )
}

/// Splits `text` into lowercase word tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|raw| raw.trim_matches(is_trimmed).to_lowercase())
        .filter(|tok| !tok.is_empty())
        .collect()
}
