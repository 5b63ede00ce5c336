use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, FqgError, Result};

/// Length scale `alpha` and branching count `n0` of a Hanoi-type attractor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HanoiParams {
    pub alpha: f64,
    pub n0: usize,
}

impl HanoiParams {
    pub fn new(alpha: f64, n0: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return invalid(format!("alpha must lie in (0,1), got {alpha}"));
        }
        if n0 < 3 {
            return invalid(format!("n0 must be at least 3, got {n0}"));
        }
        Ok(Self { alpha, n0 })
    }

    /// Like [`HanoiParams::new`], additionally requiring `alpha < (n0-2)/n0`,
    /// the range in which the attractor is a genuine fractal.
    pub fn new_fractal(alpha: f64, n0: usize) -> Result<Self> {
        let p = Self::new(alpha, n0)?;
        let bound = (n0 as f64 - 2.0) / n0 as f64;
        if alpha >= bound {
            return invalid(format!("fractal regime needs alpha < {bound}, got {alpha}"));
        }
        Ok(p)
    }

    /// Contraction ratio of the first-level copies, `(1 - alpha)/2`.
    pub fn r(&self) -> f64 {
        (1.0 - self.alpha) / 2.0
    }
}

/// Finite word over the alphabet `{0, .., n0-1}`; displayed 1-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The constant word `i^n`.
    pub fn repeat(i: u8, n: usize) -> Self {
        Word(vec![i; n])
    }

    /// Word of length `n` whose lexicographic rank among `n0^n` words is `index`.
    pub fn from_index(mut index: usize, n0: usize, n: usize) -> Self {
        let mut s = vec![0u8; n];
        for k in (0..n).rev() {
            s[k] = (index % n0) as u8;
            index /= n0;
        }
        Word(s)
    }

    /// Lexicographic rank among words of the same length.
    pub fn index(&self, n0: usize) -> usize {
        self.0.iter().fold(0, |acc, &c| acc * n0 + c as usize)
    }

    pub fn push(&self, i: u8) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        Word(v)
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// Parses the 1-based textual form: plain digits, or dot-separated
    /// numbers when any symbol exceeds 9.
    pub fn parse(s: &str, n0: usize) -> Result<Self> {
        let syms: Vec<usize> = if s.contains('.') {
            s.split('.')
                .map(|t| t.parse::<usize>().map_err(|e| FqgError::Parse(format!("word {s:?}: {e}"))))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| FqgError::Parse(format!("word {s:?}: bad symbol {c:?}")))
                })
                .collect::<Result<_>>()?
        };
        let mut out = Vec::with_capacity(syms.len());
        for d in syms {
            if d == 0 || d > n0 {
                return Err(FqgError::Parse(format!("word {s:?}: symbol {d} outside 1..={n0}")));
            }
            out.push((d - 1) as u8);
        }
        Ok(Word(out))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&c| c < 9) {
            for &c in &self.0 {
                write!(f, "{}", c + 1)?;
            }
        } else {
            let parts: Vec<String> = self.0.iter().map(|&c| (c as usize + 1).to_string()).collect();
            write!(f, "{}", parts.join("."))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(HanoiParams::new(0.2, 3).is_ok());
        assert!(HanoiParams::new(0.0, 3).is_err());
        assert!(HanoiParams::new(1.5, 3).is_err());
        assert!(HanoiParams::new(0.2, 2).is_err());
        assert!(HanoiParams::new_fractal(0.4, 3).is_err());
        assert!(HanoiParams::new_fractal(0.3, 3).is_ok());
        let p = HanoiParams::new(0.2, 3).unwrap();
        assert_eq!(2.0 * p.r() + p.alpha, 1.0);
    }

    #[test]
    fn word_index_round_trip() {
        for i in 0..81 {
            let w = Word::from_index(i, 3, 4);
            assert_eq!(w.index(3), i);
            assert_eq!(Word::parse(&w.to_string(), 3).unwrap(), w);
        }
        assert_eq!(Word::from_index(5, 3, 2).to_string(), "23");
        let big = Word(vec![0, 10, 3]);
        assert_eq!(big.to_string(), "1.11.4");
        assert_eq!(Word::parse("1.11.4", 12).unwrap(), big);
        assert!(Word::parse("14", 3).is_err());
        assert!(Word::parse("", 3).unwrap().is_empty());
    }
}
