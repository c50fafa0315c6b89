//! Words over abstract generators and finite presentations.
//!
//! A [`Word`] is a sequence of signed generator letters, kept freely reduced.
//! Generators are written `r0`, `r1`, ... in text form; see [`Word`]'s
//! `FromStr` implementation for the grammar.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::WordError;
use crate::perm::Permutation;

/// Index of a distinguished generator `r_i` of a presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorIndex(pub u32);

impl GeneratorIndex {
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

/// One signed letter: a generator or its formal inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: GeneratorIndex,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: u32, inverse: bool) -> Self {
        Letter {
            generator: GeneratorIndex(generator),
            inverse,
        }
    }

    pub fn inverted(self) -> Self {
        Letter {
            inverse: !self.inverse,
            ..self
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

/// A freely reduced word in the free group on the generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    /// The empty word.
    pub fn identity() -> Self {
        Word::default()
    }

    /// The single-letter word `r_i`.
    pub fn generator(i: u32) -> Self {
        Word {
            letters: vec![Letter::new(i, false)],
        }
    }

    /// Builds a word from letters, freely reducing it.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for letter in letters {
            push_reduced(&mut out, letter, false);
        }
        Word { letters: out }
    }

    /// Builds the positive word `r_{i_1} r_{i_2} ...`.
    pub fn from_generators(gens: &[u32]) -> Self {
        Word::from_letters(gens.iter().map(|&g| Letter::new(g, false)))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<u32> {
        self.letters.iter().map(|l| l.generator.0).max()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    /// Concatenation `self · other`, freely reduced.
    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.letters.clone();
        for &letter in &other.letters {
            push_reduced(&mut out, letter, false);
        }
        Word { letters: out }
    }

    /// Conjugate `other⁻¹ · self · other`.
    pub fn conjugate_by(&self, other: &Word) -> Word {
        other.inverse().mul(self).mul(other)
    }

    /// Reduced form. With `involutory` set, every generator is additionally
    /// treated as its own inverse, so `r_i^-1` becomes `r_i` and `r_i r_i`
    /// cancels.
    pub fn reduce(&self, involutory: bool) -> Word {
        reduce(self, involutory)
    }

    /// Replaces every letter `r_i^±1` by `images[i]^±1`, freely reducing.
    pub fn substitute(&self, images: &[Word]) -> Result<Word, WordError> {
        let mut out = Vec::new();
        for letter in &self.letters {
            let image = images
                .get(letter.generator.get())
                .ok_or(WordError::GeneratorOutOfRange {
                    index: letter.generator.0,
                    count: images.len(),
                })?;
            let image = if letter.inverse {
                image.inverse()
            } else {
                image.clone()
            };
            for &l in &image.letters {
                push_reduced(&mut out, l, false);
            }
        }
        Ok(Word { letters: out })
    }
}

fn push_reduced(out: &mut Vec<Letter>, letter: Letter, involutory: bool) {
    let letter = if involutory {
        Letter {
            inverse: false,
            ..letter
        }
    } else {
        letter
    };
    match out.last() {
        Some(&last) if last.cancels(letter) => {
            out.pop();
        }
        Some(&last) if involutory && last == letter => {
            out.pop();
        }
        _ => out.push(letter),
    }
}

/// Free (or involutory) reduction. The stack-based pass yields the unique
/// reduced form in one sweep, so the result is idempotent.
pub fn reduce(w: &Word, involutory: bool) -> Word {
    let mut out = Vec::with_capacity(w.len());
    for &letter in &w.letters {
        push_reduced(&mut out, letter, involutory);
    }
    Word { letters: out }
}

/// The commutator `[a, b] = a⁻¹ b⁻¹ a b`, freely reduced.
pub fn commutator(a: &Word, b: &Word) -> Word {
    a.inverse().mul(&b.inverse()).mul(a).mul(b)
}

/// `w` concatenated `e` times, freely reduced.
pub fn power(w: &Word, e: u64) -> Word {
    let mut out = Vec::with_capacity(w.len().saturating_mul(e as usize));
    for _ in 0..e {
        for &letter in &w.letters {
            push_reduced(&mut out, letter, false);
        }
    }
    Word { letters: out }
}

/// Evaluates `w` on generator images. Letters act left to right: the first
/// letter of the word is applied first, matching the right action of a
/// coset table.
pub fn evaluate(w: &Word, images: &[Permutation]) -> Result<Permutation, WordError> {
    let degree = images.first().map_or(0, Permutation::degree);
    let mut points: Vec<u32> = (0..degree as u32).collect();
    let inverses: Vec<Option<Permutation>> = (0..images.len())
        .map(|i| {
            w.letters
                .iter()
                .any(|l| l.generator.get() == i && l.inverse)
                .then(|| images[i].inverse())
        })
        .collect();
    for letter in &w.letters {
        let i = letter.generator.get();
        let image = images.get(i).ok_or(WordError::GeneratorOutOfRange {
            index: letter.generator.0,
            count: images.len(),
        })?;
        if image.degree() != degree {
            return Err(WordError::DegreeMismatch);
        }
        let p = if letter.inverse {
            inverses[i].as_ref().expect("inverse precomputed")
        } else {
            image
        };
        for x in points.iter_mut() {
            *x = p.apply(*x);
        }
    }
    Ok(Permutation::from_images_unchecked(points))
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (n, letter) in self.letters.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            write!(f, "r{}", letter.generator.0)?;
            if letter.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

/// Grammar (whitespace separated tokens):
///
/// ```text
/// word  := "1" | token+
/// token := "r" INDEX ( "^" ["-"] EXP )?
/// ```
///
/// `r3^-2` expands to `r3^-1 r3^-1`; `r0^0` is the empty word. The result is
/// freely reduced.
impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        if trimmed == "1" || trimmed.is_empty() {
            return Ok(Word::identity());
        }
        let mut letters = Vec::new();
        for token in trimmed.split_whitespace() {
            let bad = || WordError::Parse(token.to_string());
            let body = token.strip_prefix('r').ok_or_else(bad)?;
            let (index, exp) = match body.split_once('^') {
                Some((i, e)) => (i, e.parse::<i64>().map_err(|_| bad())?),
                None => (body, 1),
            };
            let index: u32 = index.parse().map_err(|_| bad())?;
            let letter = Letter::new(index, exp < 0);
            letters.extend(std::iter::repeat_n(letter, exp.unsigned_abs() as usize));
        }
        Ok(Word::from_letters(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite presentation `⟨r_0, …, r_{d-1} | relators⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    generator_count: usize,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generator_count: usize, relators: Vec<Word>) -> Result<Self, WordError> {
        if generator_count == 0 {
            return Err(WordError::NoGenerators);
        }
        for r in &relators {
            check_word(r, generator_count)?;
        }
        Ok(Presentation {
            generator_count,
            relators,
        })
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Same generators with extra relators appended.
    pub fn with_relators(&self, extra: impl IntoIterator<Item = Word>) -> Result<Self, WordError> {
        let mut relators = self.relators.clone();
        relators.extend(extra);
        Presentation::new(self.generator_count, relators)
    }

    /// Whether `r_i^2` (or `r_i^-2`) is literally among the relators.
    pub fn is_declared_involution(&self, i: u32) -> bool {
        self.relators.iter().any(|r| {
            let l = r.letters();
            l.len() == 2 && l[0] == l[1] && l[0].generator.0 == i
        })
    }

    pub fn check_word(&self, w: &Word) -> Result<(), WordError> {
        check_word(w, self.generator_count)
    }
}

fn check_word(w: &Word, count: usize) -> Result<(), WordError> {
    match w.max_generator() {
        Some(g) if g as usize >= count => Err(WordError::GeneratorOutOfRange { index: g, count }),
        _ => Ok(()),
    }
}

/// Text form:
///
/// ```text
/// generators 3
/// relator r0 r0
/// relator r0 r1 r0 r1
/// ```
///
/// Blank lines and lines starting with `#` are ignored when parsing.
impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "generators {}", self.generator_count)?;
        for r in &self.relators {
            writeln!(f, "relator {r}")?;
        }
        Ok(())
    }
}

impl FromStr for Presentation {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut count = None;
        let mut relators = Vec::new();
        for line in s.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("generators") {
                count = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|_| WordError::Parse(line.to_string()))?,
                );
            } else if let Some(rest) = line.strip_prefix("relator") {
                relators.push(rest.parse()?);
            } else {
                return Err(WordError::Parse(line.to_string()));
            }
        }
        let count = count.ok_or_else(|| WordError::Parse("missing generators line".into()))?;
        Presentation::new(count, relators)
    }
}
