//! Embedding finitely many partial bijections of ℕ into the semigroup
//! generated by two of them, with windowed verification.

pub mod blocks;
pub mod cli;
pub mod construction;
pub mod document;
pub mod error;
pub mod lemmas;
pub mod pbij;
pub mod sets;
pub mod verify;
pub mod words;

pub use construction::{embed, layout_for, EmbeddingResult, Layout, TargetSpec};
pub use error::{Error, Result};
pub use pbij::{Eval, PartialBijection, Permutation, Point};
pub use words::{eval_word, Word};
