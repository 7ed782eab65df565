//! JSON documents: target lists and derivations.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::construction::{embed_with, EmbeddingResult, Layout, Sabotage, TargetSpec};
use crate::error::{Error, Result};
use crate::pbij::{Eval, PartialBijection};
use crate::verify::Check;
use crate::words::WordSet;

pub const TABLE_WINDOW: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetsDocument {
    pub targets: Vec<TargetSpec>,
}

impl TargetsDocument {
    pub fn parse(text: &str) -> Result<Self> {
        // Accept either {"targets": [...]} or a bare list.
        let doc = match serde_json::from_str::<TargetsDocument>(text) {
            Ok(doc) => doc,
            Err(_) => TargetsDocument {
                targets: serde_json::from_str(text)
                    .map_err(|e| Error::Parse(format!("targets document: {e}")))?,
            },
        };
        for t in &doc.targets {
            t.build()?;
        }
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Values of a map on [0, window): a number, "undefined" or "unresolved".
pub fn table(p: &PartialBijection, window: u64) -> Vec<String> {
    (0..window)
        .map(|x| match p.apply(x) {
            Eval::Defined(y) => y.to_string(),
            Eval::Undefined => "undefined".into(),
            Eval::Unresolved(_) => "unresolved".into(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tables {
    pub window: u64,
    /// a_1 … a_m
    pub a: Vec<Vec<String>>,
    /// j_1 … j_L
    pub j: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationDocument {
    pub layout: Layout,
    pub budget: u64,
    pub targets: Vec<TargetSpec>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub sabotage: Sabotage,
    pub tables: Tables,
    pub words: WordSet,
}

fn is_default(s: &Sabotage) -> bool {
    *s == Sabotage::default()
}

impl DerivationDocument {
    pub fn from_result(result: &EmbeddingResult) -> Self {
        let d = &result.derivation;
        let mut words = d.words.clone();
        words.targets = result.target_words.clone();
        DerivationDocument {
            layout: d.layout.clone(),
            budget: d.budget,
            targets: d.targets.iter().map(|t| t.spec.clone()).collect(),
            sabotage: d.sabotage.clone(),
            tables: Tables {
                window: TABLE_WINDOW,
                a: d.a.iter().map(|a| table(a, TABLE_WINDOW)).collect(),
                j: d.j.iter().map(|j| table(j, TABLE_WINDOW)).collect(),
            },
            words,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("derivation document: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Rebuild the maps from the targets, keep the stored words, and report
    /// whether the stored layout and tables agree with the rebuild.
    pub fn rebuild(&self, budget: Option<u64>) -> Result<(EmbeddingResult, Vec<Check>)> {
        let fresh = embed_with(&self.targets, budget.unwrap_or(self.budget), &self.sabotage)?;
        let rebuilt = DerivationDocument::from_result(&fresh);
        let mut checks = vec![Check {
            name: "stored layout matches targets".into(),
            passed: rebuilt.layout == self.layout,
            detail: format!("stored m = {}, targets m = {}", self.layout.m, rebuilt.layout.m),
        }];
        let tables_ok = rebuilt.tables == self.tables;
        checks.push(Check {
            name: "stored tables match rebuilt maps".into(),
            passed: tables_ok,
            detail: if tables_ok {
                format!("a and j on [0, {})", self.tables.window)
            } else {
                "stored a/j tables differ from the rebuilt derivation".into()
            },
        });
        let mut d = (*fresh.derivation).clone();
        d.words = self.words.clone();
        let result = EmbeddingResult {
            derivation: std::sync::Arc::new(d),
            generator_f: fresh.generator_f,
            generator_g: fresh.generator_g,
            target_words: self.words.targets.clone(),
        };
        Ok((result, checks))
    }
}
