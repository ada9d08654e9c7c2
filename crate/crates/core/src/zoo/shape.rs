use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Repeat {
    /// `x+`
    AtLeastOne,
    /// `x*`
    Any,
}

/// A block pattern such as `a+g*u+c*`: a sequence of blocks, each a run of
/// one letter, with pairwise distinct letters. Checkable by a single
/// left-to-right pass of a finite control.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockShape {
    blocks: Vec<(char, Repeat)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("expected a letter followed by + or * at {0:?}")]
    Syntax(String),
    #[error("letter {0:?} appears in two blocks")]
    RepeatedLetter(char),
}

impl FromStr for BlockShape {
    type Err = ShapeError;

    fn from_str(s: &str) -> Result<Self, ShapeError> {
        let cs: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if !cs.len().is_multiple_of(2) {
            return Err(ShapeError::Syntax(s.to_string()));
        }
        let mut blocks: Vec<(char, Repeat)> = Vec::new();
        for pair in cs.chunks(2) {
            let rep = match pair[1] {
                '+' => Repeat::AtLeastOne,
                '*' => Repeat::Any,
                _ => return Err(ShapeError::Syntax(s.to_string())),
            };
            if !pair[0].is_alphabetic() {
                return Err(ShapeError::Syntax(s.to_string()));
            }
            if blocks.iter().any(|(c, _)| *c == pair[0]) {
                return Err(ShapeError::RepeatedLetter(pair[0]));
            }
            blocks.push((pair[0], rep));
        }
        Ok(BlockShape { blocks })
    }
}

impl fmt::Display for BlockShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, r) in &self.blocks {
            write!(f, "{c}{}", if *r == Repeat::AtLeastOne { '+' } else { '*' })?;
        }
        Ok(())
    }
}

impl BlockShape {
    pub fn parse(s: &str) -> Result<Self, ShapeError> {
        s.parse()
    }

    pub fn blocks(&self) -> &[(char, Repeat)] {
        &self.blocks
    }

    pub fn letters(&self) -> Vec<char> {
        self.blocks.iter().map(|(c, _)| *c).collect()
    }

    /// DFA states: `0` before any letter, `i + 1` inside block `i`.
    pub fn state_count(&self) -> usize {
        self.blocks.len() + 1
    }

    fn optional_between(&self, from: usize, to: usize) -> bool {
        self.blocks[from..to].iter().all(|(_, r)| *r == Repeat::Any)
    }

    pub fn next(&self, state: usize, letter: char) -> Option<usize> {
        let t = self.blocks.iter().position(|(c, _)| *c == letter)?;
        // Blocks strictly after the current one and before t must be skippable.
        if t + 1 == state || (t + 1 > state && self.optional_between(state, t)) {
            Some(t + 1)
        } else {
            None
        }
    }

    pub fn accepting(&self, state: usize) -> bool {
        self.optional_between(state, self.blocks.len())
    }

    pub fn matches(&self, word: &str) -> bool {
        let mut q = 0;
        for c in word.chars() {
            match self.next(q, c) {
                Some(n) => q = n,
                None => return false,
            }
        }
        self.accepting(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plus_and_star_blocks() {
        let s = BlockShape::parse("a+g*u+c*").unwrap();
        assert!(s.matches("au"));
        assert!(s.matches("aagguucc"));
        assert!(s.matches("agu"));
        assert!(!s.matches("ua"));
        assert!(!s.matches("gu"));
        assert!(!s.matches("a"));
        assert!(!s.matches("aua"));
        assert!(!s.matches(""));
        assert_eq!(s.to_string(), "a+g*u+c*");
    }

    #[test]
    fn all_star_shape_accepts_empty() {
        let s = BlockShape::parse("a*b*").unwrap();
        assert!(s.matches(""));
        assert!(s.matches("b"));
        assert!(!s.matches("ba"));
    }

    #[test]
    fn malformed_shapes_are_rejected() {
        assert!(matches!(
            BlockShape::parse("a+b"),
            Err(ShapeError::Syntax(_))
        ));
        assert!(matches!(
            BlockShape::parse("a+a*"),
            Err(ShapeError::RepeatedLetter('a'))
        ));
        assert!(matches!(
            BlockShape::parse("a?"),
            Err(ShapeError::Syntax(_))
        ));
    }
}
