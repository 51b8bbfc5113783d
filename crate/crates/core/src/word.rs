use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A letter of the alphabet `{0, …, k-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(pub u16);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u16> for Letter {
    fn from(v: u16) -> Self {
        Letter(v)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite word over some alphabet. Letters are not bound to a particular
/// alphabet size; operations that care check bounds explicitly.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        Word(it.into_iter().map(|i| Letter(i as u16)).collect())
    }

    /// Parses a compact digit string such as `"0102"`. Only alphabets of
    /// at most ten letters can be written this way.
    pub fn parse_digits(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| Letter(d as u16))
                    .ok_or_else(|| Error::Parse(format!("'{c}' is not a digit letter in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn check_alphabet(&self, k: usize) -> Result<()> {
        match self.0.iter().find(|l| l.index() >= k) {
            Some(l) => Err(Error::AlphabetMismatch { letter: l.index(), alphabet_size: k }),
            None => Ok(()),
        }
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn extend_from(&mut self, other: &[Letter]) {
        self.0.extend_from_slice(other);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().map(|l| l.index()).collect()
    }
}

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl From<&[Letter]> for Word {
    fn from(s: &[Letter]) -> Self {
        Word(s.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.0)
    }
}

/// Writes letters compactly when every letter is a single digit and as a
/// dot-separated list otherwise, so `10.11` is never confused with `1011`.
pub fn write_letters(f: &mut impl fmt::Write, letters: &[Letter]) -> fmt::Result {
    if letters.iter().all(|l| l.0 < 10) {
        for l in letters {
            write!(f, "{}", l.0)?;
        }
        Ok(())
    } else {
        for (i, l) in letters.iter().enumerate() {
            if i > 0 {
                f.write_char('.')?;
            }
            write!(f, "{}", l.0)?;
        }
        Ok(())
    }
}

/// Letter counts of `w` over an alphabet of size `k`.
pub fn abelianization(w: &[Letter], k: usize) -> Result<Vec<u64>> {
    let mut v = vec![0u64; k];
    for l in w {
        let slot = v
            .get_mut(l.index())
            .ok_or(Error::AlphabetMismatch { letter: l.index(), alphabet_size: k })?;
        *slot += 1;
    }
    Ok(v)
}

/// Start positions of `factor` in `w`, at most `limit` of them.
pub fn occurrences(w: &[Letter], factor: &[Letter], limit: usize) -> Result<Vec<usize>> {
    if factor.is_empty() {
        return Err(Error::Precondition("factor must be non-empty".into()));
    }
    if factor.len() > w.len() {
        return Ok(Vec::new());
    }
    Ok(w.windows(factor.len())
        .enumerate()
        .filter(|(_, win)| *win == factor)
        .map(|(i, _)| i)
        .take(limit)
        .collect())
}
