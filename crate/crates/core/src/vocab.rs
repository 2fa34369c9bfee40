//! Character vocabularies and fixed-length label encoding.
//!
//! A vocabulary file holds one symbol per line; the 1-based line number is
//! the symbol's label. Label 0 is reserved for padding and never assigned.
//! The two shipped tables (`data/smiles.vocab`, `data/protein.vocab`) are
//! versioned configuration: changing them invalidates every checkpoint.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PAD_LABEL: u8 = 0;

/// Default encoded length for SMILES strings.
pub const SMILES_MAX_LEN: usize = 100;
/// Default encoded length for protein sequences.
pub const PROTEIN_MAX_LEN: usize = 1000;

const SMILES_TABLE: &str = include_str!("../data/smiles.vocab");
const PROTEIN_TABLE: &str = include_str!("../data/protein.vocab");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    symbols: Vec<char>,
    labels: HashMap<char, u8>,
}

impl Vocabulary {
    pub fn from_symbols<I: IntoIterator<Item = char>>(symbols: I) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::InvalidVocabulary("no symbols".into()));
        }
        if symbols.len() > u8::MAX as usize {
            return Err(Error::InvalidVocabulary(format!(
                "{} symbols exceed the 255-label limit",
                symbols.len()
            )));
        }
        let mut labels = HashMap::with_capacity(symbols.len());
        for (i, &c) in symbols.iter().enumerate() {
            if labels.insert(c, (i + 1) as u8).is_some() {
                return Err(Error::InvalidVocabulary(format!("duplicate symbol {c:?}")));
            }
        }
        Ok(Vocabulary { symbols, labels })
    }

    /// Parses the one-symbol-per-line table format. A trailing newline is
    /// allowed; any other line must hold exactly one character.
    pub fn parse(text: &str) -> Result<Self> {
        let mut symbols = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            let mut chars = line.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => symbols.push(c),
                _ => {
                    return Err(Error::InvalidVocabulary(format!(
                        "line {}: expected a single symbol, got {line:?}",
                        i + 1
                    )))
                }
            }
        }
        Self::from_symbols(symbols)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::parse(&text).map_err(|e| e.context(path.display().to_string()))
    }

    pub fn to_table(&self) -> String {
        let mut out = String::with_capacity(self.symbols.len() * 2);
        for c in &self.symbols {
            out.push(*c);
            out.push('\n');
        }
        out
    }

    /// The 64-symbol SMILES table.
    pub fn smiles() -> Self {
        Self::parse(SMILES_TABLE).expect("shipped SMILES table is valid")
    }

    /// The 25-symbol amino-acid table.
    pub fn protein() -> Self {
        Self::parse(PROTEIN_TABLE).expect("shipped protein table is valid")
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn pad_label(&self) -> u8 {
        PAD_LABEL
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn label_of(&self, symbol: char) -> Option<u8> {
        self.labels.get(&symbol).copied()
    }

    pub fn symbol_of(&self, label: u8) -> Option<char> {
        match label {
            PAD_LABEL => None,
            l => self.symbols.get(l as usize - 1).copied(),
        }
    }

    pub fn encode(&self, text: &str, max_len: usize) -> Result<EncodedSequence> {
        self.encode_with(text, max_len, UnknownPolicy::Strict)
    }

    pub fn encode_with(
        &self,
        text: &str,
        max_len: usize,
        policy: UnknownPolicy,
    ) -> Result<EncodedSequence> {
        if max_len == 0 {
            return Err(Error::InvalidMaxLen);
        }
        if let UnknownPolicy::Fallback(label) = policy {
            if label == PAD_LABEL || label as usize > self.size() {
                return Err(Error::InvalidVocabulary(format!(
                    "fallback label {label} is not in 1..={}",
                    self.size()
                )));
            }
        }
        let mut tokens = vec![PAD_LABEL; max_len];
        let mut true_length = 0;
        for (position, symbol) in text.chars().take(max_len).enumerate() {
            tokens[position] = match (self.label_of(symbol), policy) {
                (Some(label), _) => label,
                (None, UnknownPolicy::Fallback(label)) => label,
                (None, UnknownPolicy::Strict) => {
                    return Err(Error::UnknownSymbol { position, symbol })
                }
            };
            true_length = position + 1;
        }
        Ok(EncodedSequence {
            tokens,
            true_length,
        })
    }

    /// Maps the non-pad prefix back to text.
    pub fn decode(&self, tokens: &[u8]) -> String {
        tokens
            .iter()
            .take_while(|&&t| t != PAD_LABEL)
            .filter_map(|&t| self.symbol_of(t))
            .collect()
    }
}

pub fn smiles_vocabulary() -> Vocabulary {
    Vocabulary::smiles()
}

pub fn protein_vocabulary() -> Vocabulary {
    Vocabulary::protein()
}

/// Strict encoding of `text` into exactly `max_len` labels.
pub fn encode(text: &str, vocab: &Vocabulary, max_len: usize) -> Result<EncodedSequence> {
    vocab.encode(text, max_len)
}

/// What to do with a character that has no label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownPolicy {
    #[default]
    Strict,
    /// Replace unknown characters with an existing label.
    Fallback(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedSequence {
    pub tokens: Vec<u8>,
    pub true_length: usize,
}

impl EncodedSequence {
    pub fn max_len(&self) -> usize {
        self.tokens.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smiles_table_matches_worked_example() {
        let v = smiles_vocabulary();
        assert_eq!(v.size(), 64);
        assert_eq!(v.label_of('C'), Some(1));
        assert_eq!(v.label_of('H'), Some(2));
        assert_eq!(v.label_of('N'), Some(3));
        assert_eq!(v.label_of('O'), Some(5));
        assert_eq!(v.label_of('='), Some(63));
        assert_eq!(v.pad_label(), 0);
    }

    #[test]
    fn protein_table_is_a_bijection() {
        let v = protein_vocabulary();
        assert_eq!(v.size(), 25);
        let mut labels: Vec<u8> = v.symbols().iter().map(|&c| v.label_of(c).unwrap()).collect();
        labels.sort_unstable();
        assert_eq!(labels, (1..=25).collect::<Vec<u8>>());
        assert!(v.symbols().iter().all(|&c| v.label_of(c) != Some(0)));
    }

    #[test]
    fn encodes_isocyanate_example() {
        let e = encode("CN=C=O", &smiles_vocabulary(), 100).unwrap();
        let mut expected = vec![1, 3, 63, 1, 63, 5];
        expected.resize(100, 0);
        assert_eq!(e.tokens, expected);
        assert_eq!(e.true_length, 6);
    }

    #[test]
    fn empty_text_is_all_padding() {
        let e = encode("", &protein_vocabulary(), 100).unwrap();
        assert_eq!(e.tokens, vec![0; 100]);
        assert_eq!(e.true_length, 0);
    }

    #[test]
    fn long_smiles_is_truncated() {
        let text: String = "CCO".repeat(200).chars().take(590).collect();
        let e = encode(&text, &smiles_vocabulary(), 100).unwrap();
        assert_eq!(e.tokens.len(), 100);
        assert_eq!(e.true_length, 100);
        assert!(e.tokens.iter().all(|&t| t != 0));
        assert_eq!(smiles_vocabulary().decode(&e.tokens), &text[..100]);
    }

    #[test]
    fn strict_mode_rejects_unknown() {
        let err = encode("CCO!", &smiles_vocabulary(), 10).unwrap_err();
        assert!(matches!(err, Error::UnknownSymbol { position: 3, symbol: '!' }));
    }

    #[test]
    fn unknown_beyond_cap_is_ignored() {
        assert!(encode("CC!", &smiles_vocabulary(), 2).is_ok());
    }

    #[test]
    fn lenient_mode_uses_fallback() {
        let v = protein_vocabulary();
        let e = v.encode_with("AJA", 5, UnknownPolicy::Fallback(24)).unwrap();
        assert_eq!(&e.tokens[..4], &[1, 24, 1, 0]);
        assert!(v.encode_with("A", 5, UnknownPolicy::Fallback(0)).is_err());
        assert!(v.encode_with("A", 5, UnknownPolicy::Fallback(26)).is_err());
    }

    #[test]
    fn case_sensitive() {
        let v = smiles_vocabulary();
        assert_ne!(v.label_of('c'), v.label_of('C'));
        assert!(protein_vocabulary().encode("a", 4).is_err());
    }

    #[test]
    fn zero_max_len_is_rejected() {
        assert!(matches!(
            encode("C", &smiles_vocabulary(), 0),
            Err(Error::InvalidMaxLen)
        ));
    }

    #[test]
    fn parse_rejects_bad_tables() {
        assert!(Vocabulary::parse("A\nB\nA\n").is_err());
        assert!(Vocabulary::parse("A\nBC\n").is_err());
        assert!(Vocabulary::parse("").is_err());
        let v = Vocabulary::parse("x\ny\n").unwrap();
        assert_eq!(Vocabulary::parse(&v.to_table()).unwrap(), v);
    }

    fn smiles_text(max: usize) -> impl Strategy<Value = String> {
        let symbols = smiles_vocabulary().symbols().to_vec();
        proptest::collection::vec(proptest::sample::select(symbols), 0..max)
            .prop_map(|cs| cs.into_iter().collect())
    }

    proptest! {
        #[test]
        fn round_trip(text in smiles_text(100)) {
            let v = smiles_vocabulary();
            let e = v.encode(&text, 100).unwrap();
            prop_assert_eq!(v.decode(&e.tokens), text);
        }

        #[test]
        fn zero_tail_and_range(text in smiles_text(150), max_len in 1usize..120) {
            let v = smiles_vocabulary();
            let e = v.encode(&text, max_len).unwrap();
            prop_assert_eq!(e.tokens.len(), max_len);
            prop_assert_eq!(e.true_length, text.chars().count().min(max_len));
            prop_assert!(e.tokens[..e.true_length].iter().all(|&t| t != 0));
            prop_assert!(e.tokens[e.true_length..].iter().all(|&t| t == 0));
            prop_assert!(e.tokens.iter().all(|&t| (t as usize) <= v.size()));
        }

        #[test]
        fn prefix_stable(text in smiles_text(80), k in 0usize..80) {
            let v = smiles_vocabulary();
            let k = k.min(text.chars().count());
            let prefix: String = text.chars().take(k).collect();
            let full = v.encode(&text, 100).unwrap();
            let part = v.encode(&prefix, 100).unwrap();
            prop_assert_eq!(&full.tokens[..k], &part.tokens[..k]);
        }
    }
}
