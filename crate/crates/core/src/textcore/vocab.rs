use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub const PAD_ID: u32 = 0;
pub const UNK_ID: u32 = 1;

const PAD_TOKEN: &str = "<pad>";
const UNK_TOKEN: &str = "<unk>";

/// Token/id mapping with two reserved ids (`PAD_ID`, `UNK_ID`).
///
/// Non-special tokens get dense ids in first-appearance order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabRepr", into = "VocabRepr")]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
    min_count: usize,
}

#[derive(Serialize, Deserialize)]
struct VocabRepr {
    min_count: usize,
    tokens: Vec<String>,
}

impl From<VocabRepr> for Vocabulary {
    fn from(repr: VocabRepr) -> Self {
        let mut vocab = Vocabulary::empty(repr.min_count);
        for tok in repr.tokens.into_iter().skip(2) {
            vocab.insert(tok);
        }
        vocab
    }
}

impl From<Vocabulary> for VocabRepr {
    fn from(vocab: Vocabulary) -> Self {
        VocabRepr {
            min_count: vocab.min_count,
            tokens: vocab.tokens,
        }
    }
}

impl Vocabulary {
    fn empty(min_count: usize) -> Self {
        Vocabulary {
            tokens: vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string()],
            index: HashMap::new(),
            min_count,
        }
    }

    fn insert(&mut self, token: String) {
        if !self.index.contains_key(&token) {
            let id = self.tokens.len() as u32;
            self.index.insert(token.clone(), id);
            self.tokens.push(token);
        }
    }

    /// Builds a vocabulary from tokenized documents. Tokens seen fewer than
    /// `min_count` times are left out and encode to `UNK_ID`.
    pub fn build<D, T>(corpus: &[D], min_count: usize) -> Self
    where
        D: AsRef<[T]>,
        T: AsRef<str>,
    {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        let mut order: Vec<&str> = Vec::new();
        for doc in corpus {
            for tok in doc.as_ref() {
                let tok = tok.as_ref();
                let c = counts.entry(tok).or_insert(0);
                if *c == 0 {
                    order.push(tok);
                }
                *c += 1;
            }
        }
        let mut vocab = Vocabulary::empty(min_count);
        for tok in order {
            if counts[tok] >= min_count {
                vocab.insert(tok.to_string());
            }
        }
        vocab
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        // specials are always present
        false
    }

    pub fn min_count(&self) -> usize {
        self.min_count
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    /// Non-special tokens in id order.
    pub fn words(&self) -> impl Iterator<Item = (u32, &str)> {
        self.tokens
            .iter()
            .enumerate()
            .skip(2)
            .map(|(i, t)| (i as u32, t.as_str()))
    }

    /// Maps tokens to ids with `UNK_ID` fallback. Never returns an empty
    /// sequence: an empty input encodes to `[UNK_ID]`.
    pub fn encode<T: AsRef<str>>(&self, tokens: &[T]) -> Vec<u32> {
        if tokens.is_empty() {
            return vec![UNK_ID];
        }
        tokens
            .iter()
            .map(|t| self.id(t.as_ref()).unwrap_or(UNK_ID))
            .collect()
    }

    pub fn decode(&self, ids: &[u32]) -> Vec<String> {
        ids.iter()
            .map(|&id| self.token(id).unwrap_or(UNK_TOKEN).to_string())
            .collect()
    }
}
