//! Freely reduced words in a fixed finite generating set.
//!
//! Generators are named by single ASCII uppercase letters; the corresponding
//! lowercase letter denotes the inverse. Words are kept freely reduced so
//! comparison and hashing are deterministic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WordError {
    #[error("invalid word character {0:?}: expected ASCII letters")]
    InvalidCharacter(char),
    #[error("unknown generator {0:?} for this surface")]
    UnknownGenerator(char),
}

/// A generator index with a sign: `+` for the generator, `-` for its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inverted(self) -> Letter {
        Letter { generator: self.generator, inverse: !self.inverse }
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn generator(index: usize) -> Word {
        Word(vec![Letter { generator: index, inverse: false }])
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut w = Word::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    /// Parses against an alphabet of single uppercase letters, e.g. `"ABab"`.
    pub fn parse(s: &str, alphabet: &[char]) -> Result<Word, WordError> {
        let mut w = Word::identity();
        for ch in s.chars() {
            if !ch.is_ascii_alphabetic() {
                return Err(WordError::InvalidCharacter(ch));
            }
            let upper = ch.to_ascii_uppercase();
            let idx = alphabet
                .iter()
                .position(|&g| g == upper)
                .ok_or(WordError::UnknownGenerator(ch))?;
            w.push(Letter { generator: idx, inverse: ch.is_ascii_lowercase() });
        }
        Ok(w)
    }

    pub fn render(&self, alphabet: &[char]) -> String {
        self.0
            .iter()
            .map(|l| {
                let c = alphabet[l.generator];
                if l.inverse {
                    c.to_ascii_lowercase()
                } else {
                    c
                }
            })
            .collect()
    }

    fn push(&mut self, l: Letter) {
        match self.0.last() {
            Some(last) if *last == l.inverted() => {
                self.0.pop();
            }
            _ => self.0.push(l),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverted()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &l in other.letters() {
            w.push(l);
        }
        w
    }

    pub fn conjugated_by(&self, g: &Word) -> Word {
        g.concat(self).concat(&g.inverse())
    }

    pub fn pow(&self, n: u32) -> Word {
        let mut w = Word::identity();
        for _ in 0..n {
            w = w.concat(self);
        }
        w
    }

    /// Whether the word is a cyclic rotation of a power of the other, the
    /// cheap sufficient test used for peripheral detection.
    pub fn is_power_of(&self, base: &Word) -> bool {
        if base.is_empty() {
            return self.is_empty();
        }
        let mut w = Word::identity();
        while w.len() <= self.len() {
            if w == *self {
                return true;
            }
            w = w.concat(base);
        }
        false
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            let c = (b'A' + (l.generator as u8 % 26)) as char;
            write!(f, "{}", if l.inverse { c.to_ascii_lowercase() } else { c })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reduce() {
        let alphabet = ['A', 'B'];
        let w = Word::parse("ABab", &alphabet).unwrap();
        assert_eq!(w.len(), 4);
        let reduced = Word::parse("AaB", &alphabet).unwrap();
        assert_eq!(reduced, Word::parse("B", &alphabet).unwrap());
        assert_eq!(w.concat(&w.inverse()), Word::identity());
        assert_eq!(w.render(&alphabet), "ABab");
    }

    #[test]
    fn unknown_generator_rejected() {
        assert_eq!(Word::parse("AC", &['A', 'B']), Err(WordError::UnknownGenerator('C')));
    }

    #[test]
    fn conjugation_and_powers() {
        let alphabet = ['A', 'B'];
        let a = Word::parse("A", &alphabet).unwrap();
        let b = Word::parse("B", &alphabet).unwrap();
        assert_eq!(a.conjugated_by(&b).render(&alphabet), "BAb");
        assert_eq!(a.pow(3).render(&alphabet), "AAA");
        assert!(a.pow(3).is_power_of(&a));
        assert!(!b.is_power_of(&a));
    }
}
