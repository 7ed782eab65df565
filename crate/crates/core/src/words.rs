//! Words over {F, G} and their evaluation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::construction::Layout;
use crate::error::Error;
use crate::pbij::{Eval, PartialBijection, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    F,
    G,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Append `letter` repeated `n` times.
    pub fn push_run(&mut self, letter: Letter, n: u64) -> &mut Self {
        self.0.extend(std::iter::repeat_n(letter, n as usize));
        self
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Swap F and G at position `i`.
    pub fn flip(&mut self, i: usize) {
        self.0[i] = match self.0[i] {
            Letter::F => Letter::G,
            Letter::G => Letter::F,
        };
    }

    /// Run-length form, e.g. `F^26 G F^13 G F^12 G F^12 G^2`.
    pub fn compact(&self) -> String {
        let mut out: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut n = 1;
            while i + n < self.0.len() && self.0[i + n] == l {
                n += 1;
            }
            let c = if l == Letter::F { 'F' } else { 'G' };
            out.push(if n == 1 { c.to_string() } else { format!("{c}^{n}") });
            i += n;
        }
        out.join(" ")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            f.write_str(if *l == Letter::F { "F" } else { "G" })?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.chars()
            .map(|c| match c {
                'F' => Ok(Letter::F),
                'G' => Ok(Letter::G),
                other => Err(Error::Parse(format!("unexpected letter {other:?} in word"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The witness words of the construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSet {
    /// W_1 … W_L (index k−1): evaluates to πτ⁻¹·j_k.
    pub w: Vec<Word>,
    /// W_{2m+1}·W_{2m+2}·W_{2m+1}: evaluates to (πτ⁻¹)⁻¹.
    pub pinv: Word,
    /// J_k = Pinv·W_k: evaluates to j_k.
    pub j: Vec<Word>,
    /// F·J_{2i−1}·J_{2i}·G·G: evaluates to h_i.
    pub targets: Vec<Word>,
}

/// W_k = F^T G F^{s−1+k} G F^{L+3−k} G F^{s−1} G G.
pub fn w_k(layout: &Layout, k: u64) -> Word {
    let mut w = Word::default();
    w.push_run(Letter::F, layout.t)
        .push_run(Letter::G, 1)
        .push_run(Letter::F, layout.s - 1 + k)
        .push_run(Letter::G, 1)
        .push_run(Letter::F, layout.l + 3 - k)
        .push_run(Letter::G, 1)
        .push_run(Letter::F, layout.s - 1)
        .push_run(Letter::G, 2);
    w
}

pub fn synthesize_words(layout: &Layout) -> WordSet {
    let w: Vec<Word> = (1..=layout.l).map(|k| w_k(layout, k)).collect();
    let c = layout.cancel_index();
    let pinv = w[c - 1].concat(&w[c]).concat(&w[c - 1]);
    let j: Vec<Word> = w.iter().map(|wk| pinv.concat(wk)).collect();
    let targets = (0..layout.m as usize)
        .map(|i| {
            let mut t = Word::default();
            t.push_run(Letter::F, 1);
            t = t.concat(&j[2 * i]).concat(&j[2 * i + 1]);
            t.push_run(Letter::G, 2);
            t
        })
        .collect();
    WordSet { w, pinv, j, targets }
}

/// Apply the letters left to right starting at `x`.
pub fn eval_word(w: &Word, f: &PartialBijection, g: &PartialBijection, x: Point) -> Eval {
    let mut cur = x;
    for (i, l) in w.0.iter().enumerate() {
        let v = match l {
            Letter::F => f.apply(cur),
            Letter::G => g.apply(cur),
        };
        match v {
            Eval::Defined(y) => cur = y,
            Eval::Undefined => return Eval::Undefined,
            u @ Eval::Unresolved(_) => return u.traced(&format!("letter {i} of word")),
        }
    }
    Eval::Defined(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::layout_for;

    #[test]
    fn w1_for_four_targets() {
        let layout = layout_for(4).unwrap();
        let words = synthesize_words(&layout);
        assert_eq!(words.w[0].compact(), "F^26 G F^13 G F^12 G F^12 G^2");
        assert_eq!(words.w[0].len(), 68);
        assert_eq!(words.pinv.len(), 204);
        assert!(words.j.iter().all(|j| j.len() == 272));
        assert!(words.targets.iter().all(|t| t.len() == 547));
        assert_eq!(words.w.len(), 10);
    }

    #[test]
    fn length_formulas() {
        for m in [1u64, 2, 4, 10] {
            let words = synthesize_words(&layout_for(m).unwrap());
            assert!(words.w.iter().all(|w| w.len() as u64 == 10 * m + 28));
            assert!(words.targets.iter().all(|t| t.len() as u64 == 80 * m + 227));
            assert_eq!(words.targets.len() as u64, m);
        }
    }

    #[test]
    fn parse_round_trip() {
        let w: Word = "FGGF".parse().unwrap();
        assert_eq!(w.to_string(), "FGGF");
        assert!("FXG".parse::<Word>().is_err());
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(json, "\"FGGF\"");
        assert_eq!(serde_json::from_str::<Word>(&json).unwrap(), w);
    }

    #[test]
    fn small_evaluations() {
        let layout = layout_for(4).unwrap();
        let f = crate::blocks::build_f();
        let g = crate::construction::build_g_skeleton(&layout);
        let fg: Word = "FG".parse().unwrap();
        assert_eq!(eval_word(&fg, &f, &g, 78), Eval::Defined(91));
        assert_eq!(eval_word(&"G".parse().unwrap(), &f, &g, 2), Eval::Undefined);
    }
}
