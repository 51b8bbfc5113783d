use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::word::{Letter, Word};

/// Positions below this bound are served from the materialized buffer;
/// anything further out is located by descending through `phi^m(seed)`.
pub const DEFAULT_BUFFER_LIMIT: usize = 1 << 24;

/// Descent gives up once this many levels would be needed, which only
/// happens for morphisms with very slow (polynomial) growth.
const MAX_DESCENT_LEVELS: usize = 4096;

#[derive(Debug)]
struct Buffer {
    letters: Vec<Letter>,
    // The buffer always equals phi(u[..applied]).
    applied: usize,
}

/// Lazily extended prefix of the fixed point `lim phi^n(seed)`.
///
/// Readers share the buffer; extension takes the write lock, so at most one
/// thread grows the buffer at a time.
#[derive(Debug)]
pub struct WordStream {
    morphism: Morphism,
    seed: Letter,
    buffer: RwLock<Buffer>,
    buffer_limit: usize,
    levels: RwLock<Vec<Vec<u64>>>,
}

impl WordStream {
    pub fn new(morphism: Morphism, seed: Letter) -> Result<Self> {
        Self::with_buffer_limit(morphism, seed, DEFAULT_BUFFER_LIMIT)
    }

    pub fn with_buffer_limit(morphism: Morphism, seed: Letter, buffer_limit: usize) -> Result<Self> {
        if seed.index() >= morphism.alphabet_size() {
            return Err(Error::AlphabetMismatch {
                letter: seed.index(),
                alphabet_size: morphism.alphabet_size(),
            });
        }
        if !morphism.is_prolongable(seed) {
            return Err(Error::Precondition(format!(
                "phi({seed}) = {} does not start with {seed} or is too short",
                morphism.image(seed)
            )));
        }
        let letters = morphism.image(seed).0.clone();
        let levels = vec![vec![1u64; morphism.alphabet_size()]];
        Ok(WordStream {
            morphism,
            seed,
            buffer: RwLock::new(Buffer { letters, applied: 1 }),
            buffer_limit: buffer_limit.max(2),
            levels: RwLock::new(levels),
        })
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn seed(&self) -> Letter {
        self.seed
    }

    pub fn buffered_len(&self) -> usize {
        self.buffer.read().expect("stream lock poisoned").letters.len()
    }

    fn ensure(&self, n: usize) {
        if self.buffer.read().expect("stream lock poisoned").letters.len() >= n {
            return;
        }
        let mut buf = self.buffer.write().expect("stream lock poisoned");
        while buf.letters.len() < n {
            let a = buf.letters[buf.applied];
            buf.applied += 1;
            buf.letters.extend_from_slice(self.morphism.image(a));
        }
    }

    /// Length table row `m`, i.e. `|phi^m(a)|` per letter, saturating.
    fn level(&self, m: usize) -> Vec<u64> {
        if let Some(row) = self.levels.read().expect("stream lock poisoned").get(m) {
            return row.clone();
        }
        let mut levels = self.levels.write().expect("stream lock poisoned");
        while levels.len() <= m {
            let prev = levels.last().expect("level 0 present");
            let next = self
                .morphism
                .images()
                .iter()
                .map(|img| img.iter().fold(0u64, |acc, l| acc.saturating_add(prev[l.index()])))
                .collect();
            levels.push(next);
        }
        levels[m].clone()
    }

    fn descend(&self, pos: u64) -> Result<Letter> {
        let mut m = 0;
        while self.level(m)[self.seed.index()] <= pos {
            m += 1;
            if m > MAX_DESCENT_LEVELS {
                return Err(Error::Budget(format!(
                    "position {pos} needs more than {MAX_DESCENT_LEVELS} levels of descent"
                )));
            }
        }
        let mut cur = self.seed;
        let mut offset = pos;
        while m > 0 {
            let below = self.level(m - 1);
            let mut next = None;
            for &b in self.morphism.image(cur).iter() {
                let len = below[b.index()];
                if offset < len {
                    next = Some(b);
                    break;
                }
                offset -= len;
            }
            cur = next.ok_or_else(|| Error::Internal(format!("descent lost position {pos}")))?;
            m -= 1;
        }
        Ok(cur)
    }

    pub fn get(&self, i: u64) -> Result<Letter> {
        if (i as u128) < self.buffer_limit as u128 {
            let i = i as usize;
            self.ensure(i + 1);
            Ok(self.buffer.read().expect("stream lock poisoned").letters[i])
        } else {
            self.descend(i)
        }
    }

    /// The factor `u[start .. start + len]`.
    pub fn factor(&self, start: u64, len: usize) -> Result<Vec<Letter>> {
        let end = start
            .checked_add(len as u64)
            .ok_or_else(|| Error::Budget("factor end overflows u64".into()))?;
        if end <= self.buffer_limit as u64 {
            self.ensure(end as usize);
            let buf = self.buffer.read().expect("stream lock poisoned");
            return Ok(buf.letters[start as usize..end as usize].to_vec());
        }
        (start..end).map(|i| self.get(i)).collect()
    }

    pub fn prefix(&self, n: usize) -> Result<Word> {
        self.factor(0, n).map(Word)
    }
}

/// The first `n_letters` letters of the fixed point of `m` starting with `a`.
pub fn fixed_point_prefix(m: &Morphism, a: Letter, n_letters: usize) -> Result<Word> {
    WordStream::new(m.clone(), a)?.prefix(n_letters)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_prefixes() {
        let fib = fixed_point_prefix(&Morphism::fibonacci(), Letter(0), 17).unwrap();
        assert_eq!(fib.to_string(), "01001010010010100");
        let trib = fixed_point_prefix(&Morphism::tribonacci(), Letter(0), 13).unwrap();
        assert_eq!(trib.to_string(), "0102010010201");
        let one = fixed_point_prefix(&Morphism::tribonacci(), Letter(0), 1).unwrap();
        assert_eq!(one.to_string(), "0");
    }

    #[test]
    fn non_prolongable_seed_is_rejected() {
        assert!(fixed_point_prefix(&Morphism::fibonacci(), Letter(1), 3).is_err());
        let id = Morphism::from_digit_images(&["0"]).unwrap();
        assert!(fixed_point_prefix(&id, Letter(0), 3).is_err());
    }

    #[test]
    fn descent_agrees_with_buffer() {
        let m = Morphism::kbonacci(4).unwrap();
        let small = WordStream::with_buffer_limit(m.clone(), Letter(0), 16).unwrap();
        let big = WordStream::new(m, Letter(0)).unwrap();
        let a = small.factor(0, 5000).unwrap();
        let b = big.factor(0, 5000).unwrap();
        assert_eq!(a, b);
        assert_eq!(small.factor(4321, 77).unwrap(), big.factor(4321, 77).unwrap());
    }

    #[test]
    fn linear_growth_is_served() {
        let m = Morphism::from_digit_images(&["01", "1"]).unwrap();
        let s = WordStream::new(m, Letter(0)).unwrap();
        assert_eq!(s.prefix(6).unwrap().to_string(), "011111");
    }

    #[test]
    fn concurrent_readers_see_one_word() {
        let s = WordStream::new(Morphism::tribonacci(), Letter(0)).unwrap();
        let expected = Morphism::tribonacci().apply_n(&Word::from_indices([0]), 14).unwrap();
        std::thread::scope(|scope| {
            for t in 0..4 {
                let s = &s;
                let expected = &expected;
                scope.spawn(move || {
                    let n = 1000 * (t + 1);
                    assert_eq!(&s.prefix(n).unwrap()[..], &expected[..n]);
                });
            }
        });
    }
}
