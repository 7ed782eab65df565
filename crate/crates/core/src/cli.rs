//! Command-line front end. `run` returns the process exit code:
//! 0 success, 1 verification failure, 2 usage or input error.

use std::io::Write;
use std::ops::Range;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::construction::{embed, EmbeddingResult};
use crate::document::{DerivationDocument, TargetsDocument};
use crate::error::{Error, Result};
use crate::lemmas::DEFAULT_BUDGET;
use crate::pbij::Point;
use crate::verify::{self, finite_oracle_suite, oracle_count, verify_with, VerifyOptions};
use crate::words::{eval_word, Word};

#[derive(Parser, Debug)]
#[command(name = "pbij", version, about = "Embed partial bijections of ℕ into a two-generator semigroup")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the generators and witness words for a targets file.
    Construct {
        #[arg(long)]
        targets: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Check a derivation on the window [0, N).
    Verify {
        #[arg(long)]
        derivation: PathBuf,
        #[arg(long, default_value_t = verify::DEFAULT_WINDOW)]
        window: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Exhaustively check the involution lemmas on small symmetric groups.
    Oracle {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// Evaluate a word of a derivation at points.
    Eval {
        #[arg(long)]
        derivation: PathBuf,
        /// W:k, Pinv, J:k or target:i
        #[arg(long)]
        word: String,
        /// a..b (half-open) or a single point
        #[arg(long)]
        points: String,
    },
}

/// Parse "a..b" or "a".
pub fn parse_points(s: &str) -> Result<Range<Point>> {
    let num = |t: &str| {
        t.trim()
            .parse::<Point>()
            .map_err(|_| Error::Parse(format!("bad point {t:?}")))
    };
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b)?);
            if a > b {
                return Err(Error::Parse(format!("empty range {s}")));
            }
            Ok(a..b)
        }
        None => {
            let a = num(s)?;
            Ok(a..a + 1)
        }
    }
}

/// Resolve a word selector against a derivation.
pub fn select_word(result: &EmbeddingResult, selector: &str) -> Result<Word> {
    let words = &result.derivation.words;
    let bad = || Error::Parse(format!("unknown word selector {selector:?}"));
    if selector == "Pinv" {
        return Ok(words.pinv.clone());
    }
    let (kind, index) = selector.split_once(':').ok_or_else(bad)?;
    let index: usize = index.parse().map_err(|_| bad())?;
    let pick = |list: &[Word], i: Option<usize>| i.and_then(|i| list.get(i).cloned()).ok_or_else(bad);
    match kind {
        "W" => pick(&words.w, index.checked_sub(1)),
        "J" => pick(&words.j, index.checked_sub(1)),
        "target" => pick(&result.target_words, Some(index)),
        _ => Err(bad()),
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Construct { targets, out: path, budget } => {
            let doc = TargetsDocument::load(&targets)?;
            if doc.targets.is_empty() {
                return Err(Error::Precondition("the targets list is empty".into()));
            }
            let result = embed(&doc.targets, budget)?;
            DerivationDocument::from_result(&result).save(&path)?;
            let layout = &result.derivation.layout;
            writeln!(
                out,
                "m = {}, slots {}..={}, target words of length {}; wrote {}",
                layout.m,
                layout.slots().start(),
                layout.slots().end(),
                result.target_words[0].len(),
                path.display()
            )?;
            Ok(0)
        }
        Command::Verify {
            derivation,
            window,
            budget,
            report,
        } => {
            if window == 0 {
                return Err(Error::Precondition("window must be at least 1".into()));
            }
            let doc = DerivationDocument::load(&derivation)?;
            let (result, stored) = doc.rebuild(Some(budget))?;
            let mut rep = verify_with(&result, &VerifyOptions::new(window, budget))?;
            rep.structural_checks.extend(stored);
            rep.settle();
            if let Some(path) = report {
                std::fs::write(path, serde_json::to_string_pretty(&rep)?)?;
            }
            for t in &rep.per_target {
                writeln!(
                    out,
                    "target {}: {} match, {} mismatch, {} unresolved",
                    t.index, t.matches, t.mismatches, t.unresolved
                )?;
                for s in &t.mismatch_samples {
                    writeln!(
                        out,
                        "  mismatch at {}: word gives {}, target gives {}; path {}",
                        s.point,
                        s.word,
                        s.expected,
                        s.path.join(" → ")
                    )?;
                }
            }
            writeln!(
                out,
                "πτ⁻¹ anchored at {} of {} points",
                rep.coverage.anchored, rep.coverage.window
            )?;
            for name in rep.failed_checks() {
                writeln!(out, "FAILED: {name}")?;
            }
            writeln!(out, "{}", if rep.passed { "verification passed" } else { "verification FAILED" })?;
            Ok(if rep.passed { 0 } else { 1 })
        }
        Command::Oracle { max_n } => {
            let checks = finite_oracle_suite(max_n)?;
            for c in &checks {
                writeln!(out, "{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail)?;
            }
            writeln!(out, "{} permutations checked", oracle_count(max_n))?;
            Ok(if checks.iter().all(|c| c.passed) { 0 } else { 1 })
        }
        Command::Eval {
            derivation,
            word,
            points,
        } => {
            let range = parse_points(&points)?;
            let (result, _) = DerivationDocument::load(&derivation)?.rebuild(None)?;
            let w = select_word(&result, &word)?;
            for x in range {
                let v = eval_word(&w, &result.generator_f, &result.generator_g, x);
                writeln!(out, "{x}\t{v}")?;
            }
            Ok(0)
        }
    }
}
