//! Kick-strength schedules: periodic, random and Fibonacci.
//!
//! A schedule is a word over `{A, B}`; letter `j` (0-based) selects the
//! strength of kick `j + 1`, with `A -> kappa1` and `B -> kappa2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::XorShift64Star;

/// Seed used by random schedules when none is configured.
pub const DEFAULT_SEED: u64 = 20_050_117;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'A' | 'a' => Some(Letter::A),
            'B' | 'b' => Some(Letter::B),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::B => 'B',
        }
    }
}

/// Parses a pattern such as `"ABB"`.
pub fn parse_letters(text: &str) -> Result<Vec<Letter>> {
    text.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| {
            Letter::from_char(c)
                .ok_or_else(|| Error::InvalidSequence(format!("unknown letter {c:?} in {text:?}")))
        })
        .collect()
}

pub fn letters_to_string(letters: &[Letter]) -> String {
    letters.iter().map(|l| l.as_char()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SequenceKind {
    Periodic { pattern: Vec<Letter> },
    Random { alpha: f64, seed: u64 },
    /// `reverse_blocks` applies each Fibonacci block in strict operator order
    /// (rightmost factor first) instead of reading the word left to right.
    Fibonacci { reverse_blocks: bool },
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceKind::Periodic { pattern } => write!(f, "periodic({})", letters_to_string(pattern)),
            SequenceKind::Random { alpha, seed } => write!(f, "random(alpha={alpha}, seed={seed})"),
            SequenceKind::Fibonacci { reverse_blocks: false } => write!(f, "fibonacci"),
            SequenceKind::Fibonacci { reverse_blocks: true } => write!(f, "fibonacci(reversed)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KickSequence {
    pub kind: SequenceKind,
    pub kappa1: f64,
    pub kappa2: f64,
    pub letters: Vec<Letter>,
}

impl KickSequence {
    pub fn new(kind: SequenceKind, kappa1: f64, kappa2: f64, length: usize) -> Result<Self> {
        let letters = match &kind {
            SequenceKind::Periodic { pattern } => periodic_letters(pattern, length)?,
            SequenceKind::Random { alpha, seed } => random_letters(length, *alpha, *seed)?,
            SequenceKind::Fibonacci { reverse_blocks: false } => fibonacci_letters(length),
            SequenceKind::Fibonacci { reverse_blocks: true } => fibonacci_letters_reversed(length),
        };
        Ok(Self {
            kind,
            kappa1,
            kappa2,
            letters,
        })
    }

    pub fn periodic(pattern: &[Letter], kappa1: f64, kappa2: f64, length: usize) -> Result<Self> {
        Self::new(
            SequenceKind::Periodic {
                pattern: pattern.to_vec(),
            },
            kappa1,
            kappa2,
            length,
        )
    }

    pub fn random(alpha: f64, seed: u64, kappa1: f64, kappa2: f64, length: usize) -> Result<Self> {
        Self::new(SequenceKind::Random { alpha, seed }, kappa1, kappa2, length)
    }

    pub fn fibonacci(kappa1: f64, kappa2: f64, length: usize) -> Self {
        Self {
            kind: SequenceKind::Fibonacci {
                reverse_blocks: false,
            },
            kappa1,
            kappa2,
            letters: fibonacci_letters(length),
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn strength(&self, letter: Letter) -> f64 {
        match letter {
            Letter::A => self.kappa1,
            Letter::B => self.kappa2,
        }
    }

    /// Strength of kick `j` (0-based).
    pub fn kappa_at(&self, j: usize) -> f64 {
        self.strength(self.letters[j])
    }

    pub fn strengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.letters.iter().map(|&l| self.strength(l))
    }

    /// Same schedule with both strengths negated.
    pub fn negated(&self) -> Self {
        Self {
            kappa1: -self.kappa1,
            kappa2: -self.kappa2,
            ..self.clone()
        }
    }
}

/// First `n` letters of the limit of `W_0 = A`, `W_1 = B`, `W_k = W_{k-1} W_{k-2}`.
pub fn fibonacci_letters(n: usize) -> Vec<Letter> {
    let mut prev = vec![Letter::A];
    let mut word = vec![Letter::B];
    while word.len() < n {
        let next: Vec<Letter> = word.iter().chain(prev.iter()).copied().collect();
        prev = std::mem::replace(&mut word, next);
    }
    word.truncate(n);
    word
}

/// Smallest block `W_k` with `|W_k| >= n`, applied rightmost factor first,
/// truncated to `n` kicks. Not prefix-stable.
pub fn fibonacci_letters_reversed(n: usize) -> Vec<Letter> {
    let mut block = fibonacci_letters(fibonacci_block_len(n));
    block.reverse();
    block.truncate(n);
    block
}

/// Length of the smallest Fibonacci block holding at least `n` letters.
fn fibonacci_block_len(n: usize) -> usize {
    let (mut a, mut b) = (1usize, 1usize);
    while b < n {
        (a, b) = (b, a + b);
    }
    b
}

pub fn random_letters(n: usize, alpha: f64, seed: u64) -> Result<Vec<Letter>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidSequence(format!("alpha = {alpha} is outside [0, 1]")));
    }
    let mut rng = XorShift64Star::new(seed);
    Ok((0..n)
        .map(|_| if rng.next_f64() < alpha { Letter::A } else { Letter::B })
        .collect())
}

pub fn periodic_letters(pattern: &[Letter], n: usize) -> Result<Vec<Letter>> {
    if pattern.is_empty() {
        return Err(Error::InvalidSequence("periodic pattern is empty".into()));
    }
    Ok(pattern.iter().copied().cycle().take(n).collect())
}

/// `(m1, m2)`: occurrences of `A` and `B`.
pub fn letter_counts(letters: &[Letter]) -> (usize, usize) {
    let m1 = letters.iter().filter(|&&l| l == Letter::A).count();
    (m1, letters.len() - m1)
}
