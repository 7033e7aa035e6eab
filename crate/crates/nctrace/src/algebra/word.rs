use super::decl::{Letter, VarClass};
use serde::{Deserialize, Serialize};

/// Ordered product of letters; the empty word is the unit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn one() -> Self {
        Word(Vec::new())
    }

    pub fn single(letter: Letter) -> Self {
        Word(vec![letter])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Reversal; with self-adjoint letters this is the adjoint of the word.
    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    pub fn count_class(&self, pred: impl Fn(&VarClass) -> bool) -> usize {
        self.0.iter().filter(|l| pred(&l.class)).count()
    }

    /// Occurrence positions of an exact letter.
    pub fn positions_of(&self, letter: &Letter) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, l)| (l == letter).then_some(i))
            .collect()
    }
}

/// A trace factor: a word stored in its lexicographically minimal rotation,
/// so that cyclically equivalent words compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CyclicWord(Word);

impl CyclicWord {
    pub fn new(word: Word) -> Self {
        CyclicWord(minimal_rotation(word))
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All rotations of the underlying word (used when opening a trace
    /// factor at an occurrence of a letter).
    pub fn rotations(&self) -> impl Iterator<Item = Word> + '_ {
        let n = self.0.len().max(1);
        (0..n).map(move |r| rotate(&self.0, r))
    }
}

fn rotate(w: &Word, r: usize) -> Word {
    if w.is_empty() {
        return w.clone();
    }
    let n = w.len();
    Word((0..n).map(|i| w.0[(i + r) % n]).collect())
}

fn minimal_rotation(w: Word) -> Word {
    if w.len() <= 1 {
        return w;
    }
    let n = w.len();
    let mut best = rotate(&w, 0);
    for r in 1..n {
        let cand = rotate(&w, r);
        if cand < best {
            best = cand;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Letter {
        Letter::x(i)
    }

    #[test]
    fn cyclic_words_identify_rotations() {
        let a = CyclicWord::new(Word(vec![x(1), x(2), x(3)]));
        let b = CyclicWord::new(Word(vec![x(3), x(1), x(2)]));
        let c = CyclicWord::new(Word(vec![x(2), x(1), x(3)]));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn minimal_rotation_is_lexicographic() {
        let w = CyclicWord::new(Word(vec![x(2), x(1), x(1)]));
        assert_eq!(w.word().0, vec![x(1), x(1), x(2)]);
    }
}
