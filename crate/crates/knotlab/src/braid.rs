//! Braid words and their closures.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BraidError {
    #[error("cannot parse braid letter {0:?}")]
    BadLetter(String),
    #[error("braid letter {letter} needs at least {needed} strands")]
    TooFewStrands { letter: i32, needed: usize },
    #[error("braid closure has {0} components, not a knot")]
    NotAKnot(usize),
}

/// A braid word; letter `i > 0` is the generator `s_i` crossing strands `i-1` and `i`
/// (0-based positions), `-i` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Braid {
    pub strands: usize,
    pub word: Vec<i32>,
}

impl Braid {
    pub fn new(strands: usize, word: Vec<i32>) -> Result<Self, BraidError> {
        for &l in &word {
            if l == 0 {
                return Err(BraidError::BadLetter("0".into()));
            }
            let needed = l.unsigned_abs() as usize + 1;
            if needed > strands {
                return Err(BraidError::TooFewStrands { letter: l, needed });
            }
        }
        Ok(Braid { strands, word })
    }

    /// Uses the smallest strand count compatible with the word (1 for the empty word).
    pub fn from_word(word: Vec<i32>) -> Result<Self, BraidError> {
        let strands = word.iter().map(|l| l.unsigned_abs() as usize + 1).max().unwrap_or(1);
        Braid::new(strands, word)
    }

    /// The permutation taking a top position to the bottom position of the same strand.
    pub fn permutation(&self) -> Vec<usize> {
        // pos_of[s] = current position of the strand that started at s
        let mut pos_of: Vec<usize> = (0..self.strands).collect();
        for &l in &self.word {
            let i = l.unsigned_abs() as usize;
            for p in pos_of.iter_mut() {
                if *p == i - 1 {
                    *p = i;
                } else if *p == i {
                    *p = i - 1;
                }
            }
        }
        pos_of
    }

    pub fn components(&self) -> usize {
        let perm = self.permutation();
        let mut seen = vec![false; self.strands];
        let mut count = 0;
        for s in 0..self.strands {
            if !seen[s] {
                count += 1;
                let mut j = s;
                while !seen[j] {
                    seen[j] = true;
                    j = perm[j];
                }
            }
        }
        count
    }

    pub fn check_knot(&self) -> Result<(), BraidError> {
        match self.components() {
            1 => Ok(()),
            c => Err(BraidError::NotAKnot(c)),
        }
    }

    pub fn writhe(&self) -> i64 {
        self.word.iter().map(|l| l.signum() as i64).sum()
    }

    pub fn mirror(&self) -> Braid {
        Braid { strands: self.strands, word: self.word.iter().map(|l| -l).collect() }
    }
}

impl FromStr for Braid {
    type Err = BraidError;

    /// Accepts letters separated by commas and/or whitespace, optionally wrapped in
    /// brackets: `"1,1,1"`, `"[1, -2, 1, -2]"`, `"1 -2 1 -2"`. The empty string is the trivial braid.
    fn from_str(s: &str) -> Result<Self, BraidError> {
        let t = s.trim().trim_start_matches(['[', '{']).trim_end_matches([']', '}']);
        let word = t
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<i32>().map_err(|_| BraidError::BadLetter(x.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Braid::from_word(word)
    }
}

impl fmt::Display for Braid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.word.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}
