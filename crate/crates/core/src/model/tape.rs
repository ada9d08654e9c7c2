use super::machine::Symbol;
use super::ModelError;

/// The read-only tape `⊢ w ⊣`: position 0 holds the left marker and
/// position `n + 1` the right marker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tape {
    word: Vec<char>,
}

impl Tape {
    pub fn new(word: &str) -> Self {
        Tape {
            word: word.chars().collect(),
        }
    }

    /// Like [`Tape::new`], but every letter must be in `alphabet`.
    pub fn checked(word: &str, alphabet: &[char]) -> Result<Self, ModelError> {
        if let Some(c) = word.chars().find(|c| !alphabet.contains(c)) {
            return Err(ModelError::UnknownSymbol(c));
        }
        Ok(Self::new(word))
    }

    /// Input length `n`.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Index of the right marker, `n + 1`.
    pub fn last(&self) -> usize {
        self.word.len() + 1
    }

    pub fn word(&self) -> String {
        self.word.iter().collect()
    }

    pub fn symbol_at(&self, pos: usize) -> Symbol {
        if pos == 0 {
            Symbol::Left
        } else if pos > self.word.len() {
            Symbol::Right
        } else {
            Symbol::Letter(self.word[pos - 1])
        }
    }

    pub fn contains(&self, pos: i64) -> bool {
        pos >= 0 && pos <= self.last() as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn markers_sit_at_both_ends() {
        let t = Tape::new("ag");
        assert_eq!(t.symbol_at(0), Symbol::Left);
        assert_eq!(t.symbol_at(1), Symbol::Letter('a'));
        assert_eq!(t.symbol_at(2), Symbol::Letter('g'));
        assert_eq!(t.symbol_at(3), Symbol::Right);
        assert_eq!(t.last(), 3);
        assert!(!t.contains(4));
        assert!(!t.contains(-1));
    }

    #[test]
    fn empty_word_has_adjacent_markers() {
        let t = Tape::new("");
        assert_eq!(t.symbol_at(1), Symbol::Right);
        assert!(t.is_empty());
    }

    #[test]
    fn checked_rejects_foreign_letters() {
        assert_eq!(
            Tape::checked("agx", &['a', 'g']),
            Err(ModelError::UnknownSymbol('x'))
        );
    }
}
