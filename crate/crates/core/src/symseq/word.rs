//! Digit alphabets and finite words.

use crate::{Error, Result};
use std::fmt;

/// The digit alphabet {0, 1, …, α}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    alpha: u8,
}

impl Alphabet {
    pub fn new(alpha: u8) -> Self {
        Alphabet { alpha }
    }

    /// The largest digit α.
    pub fn alpha(&self) -> u8 {
        self.alpha
    }

    /// Number of digits, α + 1.
    pub fn size(&self) -> u16 {
        self.alpha as u16 + 1
    }

    pub fn contains(&self, d: u8) -> bool {
        d <= self.alpha
    }

    /// The reflection α − d.
    pub fn reflect_digit(&self, d: u8) -> u8 {
        debug_assert!(d <= self.alpha);
        self.alpha - d
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{0..{}}}", self.alpha)
    }
}

/// A finite word over an alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Alphabet,
    digits: Vec<u8>,
}

impl Word {
    pub fn new(alphabet: Alphabet, digits: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = digits.iter().find(|&&d| !alphabet.contains(d)) {
            return Err(Error::InvalidInput(format!(
                "digit {bad} outside the alphabet {alphabet}"
            )));
        }
        Ok(Word { alphabet, digits })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Word { alphabet, digits: Vec::new() }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digit-wise reflection d ↦ α − d.
    pub fn reflect(&self) -> Word {
        Word {
            alphabet: self.alphabet,
            digits: self.digits.iter().map(|&d| self.alphabet.reflect_digit(d)).collect(),
        }
    }

    /// The word with its last digit incremented (written w⁺). Errors if the
    /// word is empty or the last digit is already α.
    pub fn increment_last(&self) -> Result<Word> {
        let last = *self
            .digits
            .last()
            .ok_or_else(|| Error::InvalidInput("cannot increment the empty word".to_string()))?;
        if last >= self.alphabet.alpha() {
            return Err(Error::InvalidInput(format!(
                "cannot increment last digit {last} beyond alphabet maximum"
            )));
        }
        let mut digits = self.digits.clone();
        *digits.last_mut().unwrap() = last + 1;
        Ok(Word { alphabet: self.alphabet, digits })
    }

    /// The word with its last digit decremented (written w⁻). Errors if the
    /// word is empty or ends in 0.
    pub fn decrement_last(&self) -> Result<Word> {
        let last = *self
            .digits
            .last()
            .ok_or_else(|| Error::InvalidInput("cannot decrement the empty word".to_string()))?;
        if last == 0 {
            return Err(Error::InvalidInput(
                "cannot decrement a word ending in 0".to_string(),
            ));
        }
        let mut digits = self.digits.clone();
        *digits.last_mut().unwrap() = last - 1;
        Ok(Word { alphabet: self.alphabet, digits })
    }

    pub fn concat(&self, other: &Word) -> Word {
        debug_assert_eq!(self.alphabet, other.alphabet);
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&other.digits);
        Word { alphabet: self.alphabet, digits }
    }

    pub fn repeat(&self, k: usize) -> Word {
        let mut digits = Vec::with_capacity(self.digits.len() * k);
        for _ in 0..k {
            digits.extend_from_slice(&self.digits);
        }
        Word { alphabet: self.alphabet, digits }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word { alphabet: self.alphabet, digits: self.digits[..n.min(self.digits.len())].to_vec() }
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.digits.len() >= self.digits.len()
            && other.digits[..self.digits.len()] == self.digits[..]
    }
}

impl fmt::Display for Word {
    /// Contiguous digits for α ≤ 9, comma-separated beyond.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alphabet.alpha() <= 9 {
            for d in &self.digits {
                write!(f, "{d}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}
