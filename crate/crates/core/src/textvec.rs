//! Window-based text vectorization for article corpora.
//!
//! Articles are split into paragraphs on blank lines. Tokens matching a
//! substitution lexicon are collapsed to the canonical tokens "side-effect"
//! and "human", and each paragraph becomes a vector of conditional
//! probabilities: the fraction of anchor-word occurrences whose surrounding
//! window contains each other target word.

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Canonical replacement token for side-effect phrases.
pub const SIDE_EFFECT_TOKEN: &str = "side-effect";
/// Canonical replacement token for human-context phrases.
pub const HUMAN_TOKEN: &str = "human";

const DEFAULT_SIDE_EFFECTS: &str = include_str!("../assets/side_effect_terms.txt");
const DEFAULT_HUMAN_TERMS: &str = include_str!("../assets/human_terms.txt");

/// The ordered target words; probabilities are conditioned on the anchor.
#[derive(Debug, Clone)]
pub struct TargetList {
    targets: Vec<String>,
    anchor_index: usize,
}

impl TargetList {
    pub fn new(targets: Vec<String>, anchor: &str) -> Result<Self> {
        if targets.len() < 2 {
            return Err(Error::Config(format!(
                "need at least 2 target words, got {}",
                targets.len()
            )));
        }
        for (i, t) in targets.iter().enumerate() {
            if t.is_empty() {
                return Err(Error::Config("target words must be non-empty".into()));
            }
            if targets[..i].contains(t) {
                return Err(Error::Config(format!("duplicate target word '{t}'")));
            }
        }
        let anchor_index = targets
            .iter()
            .position(|t| t == anchor)
            .ok_or_else(|| Error::Config(format!("anchor '{anchor}' is not a target word")))?;
        Ok(Self {
            targets,
            anchor_index,
        })
    }

    pub fn anchor(&self) -> &str {
        &self.targets[self.anchor_index]
    }

    pub fn targets(&self) -> &[String] {
        &self.targets
    }

    /// Non-anchor targets in list order; one probability is produced per
    /// entry.
    pub fn non_anchor(&self) -> Vec<&str> {
        self.targets
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.anchor_index)
            .map(|(_, t)| t.as_str())
            .collect()
    }
}

impl Default for TargetList {
    fn default() -> Self {
        Self::new(
            vec![
                "amodiaquine".to_string(),
                HUMAN_TOKEN.to_string(),
                SIDE_EFFECT_TOKEN.to_string(),
            ],
            "amodiaquine",
        )
        .expect("default target list is valid")
    }
}

/// Phrases collapsed to the canonical tokens before vectorization.
#[derive(Debug, Clone)]
pub struct SubstitutionLexicon {
    side_effect_terms: Vec<Vec<String>>, // tokenized phrases, longest first
    human_terms: Vec<Vec<String>>,
}

fn parse_phrases(text: &str) -> Result<Vec<Vec<String>>> {
    let mut phrases = Vec::new();
    for line in text.lines() {
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let tokens = tokenize(line);
        if tokens.is_empty() {
            return Err(Error::Config(format!(
                "lexicon phrase '{line}' contains no word tokens"
            )));
        }
        phrases.push(tokens);
    }
    phrases.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    phrases.dedup();
    Ok(phrases)
}

impl SubstitutionLexicon {
    /// Parse two lexicon files (one phrase per line, '#' comments).
    pub fn from_texts(side_effects: &str, human_terms: &str) -> Result<Self> {
        let side_effect_terms = parse_phrases(side_effects)?;
        let human_terms = parse_phrases(human_terms)?;
        if side_effect_terms.is_empty() || human_terms.is_empty() {
            return Err(Error::Config("lexicons must contain at least one phrase".into()));
        }
        Ok(Self {
            side_effect_terms,
            human_terms,
        })
    }

    /// Reject phrases that collide with a target token; substitution would
    /// otherwise rewrite the targets themselves.
    pub fn validate_targets(&self, targets: &TargetList) -> Result<()> {
        for phrase in self.side_effect_terms.iter().chain(self.human_terms.iter()) {
            if phrase.len() == 1 && targets.targets().iter().any(|t| t == &phrase[0]) {
                return Err(Error::Config(format!(
                    "lexicon phrase '{}' equals a target word",
                    phrase[0]
                )));
            }
        }
        Ok(())
    }

    /// Longest phrase match from either lexicon starting at `pos`, with the
    /// side-effect lexicon winning length ties.
    fn match_at(&self, tokens: &[String], pos: usize) -> Option<(&'static str, usize)> {
        let mut best: Option<(&'static str, usize)> = None;
        for (list, replacement) in [
            (&self.side_effect_terms, SIDE_EFFECT_TOKEN),
            (&self.human_terms, HUMAN_TOKEN),
        ] {
            for phrase in list {
                let len = phrase.len();
                if pos + len <= tokens.len()
                    && best.is_none_or(|(_, blen)| len > blen)
                    && tokens[pos..pos + len].iter().zip(phrase).all(|(a, b)| a == b)
                {
                    best = Some((replacement, len));
                }
            }
        }
        best
    }
}

impl Default for SubstitutionLexicon {
    fn default() -> Self {
        Self::from_texts(DEFAULT_SIDE_EFFECTS, DEFAULT_HUMAN_TERMS)
            .expect("bundled lexicons are valid")
    }
}

/// Split a document into paragraphs on pairs of consecutive newlines,
/// trimming whitespace and dropping empty fragments.
pub fn split_paragraphs(document: &str) -> Vec<String> {
    document
        .replace("\r\n", "\n")
        .split("\n\n")
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect()
}

/// Lowercase word tokens: runs of alphanumeric characters, with interior
/// hyphens kept so "side-effect" stays one token. Everything else is a
/// separator.
fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in lower.chars() {
        if c.is_alphanumeric() || c == '-' {
            current.push(c);
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
        .into_iter()
        .map(|t| t.trim_matches('-').to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Tokenize a paragraph and collapse lexicon phrases to the canonical
/// tokens, longest match first, scanning left to right.
pub fn normalize_tokens(paragraph: &str, lex: &SubstitutionLexicon) -> Vec<String> {
    let tokens = tokenize(paragraph);
    let mut out = Vec::with_capacity(tokens.len());
    let mut pos = 0;
    while pos < tokens.len() {
        match lex.match_at(&tokens, pos) {
            Some((replacement, len)) => {
                out.push(replacement.to_string());
                pos += len;
            }
            None => {
                out.push(tokens[pos].clone());
                pos += 1;
            }
        }
    }
    out
}

/// Per-paragraph conditional-probability coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ParagraphVector {
    pub paragraph_id: usize,
    /// One probability per non-anchor target, in target-list order.
    pub probabilities: Vec<f64>,
    pub anchor_occurrences: usize,
}

/// Compute the windowed conditional probabilities of one token stream.
///
/// The window covers `window / 2` tokens on each side of an anchor
/// occurrence (clipped at the ends); each probability is the fraction of
/// anchor occurrences whose window contains the target at least once. A
/// paragraph without the anchor maps to the all-zero vector.
pub fn vectorize_paragraph(
    paragraph_id: usize,
    tokens: &[String],
    targets: &TargetList,
    window: usize,
) -> Result<ParagraphVector> {
    if window < 2 || !window.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "window must be even and at least 2, got {window}"
        )));
    }
    let half = window / 2;
    let anchor = targets.anchor();
    let anchors: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.as_str() == anchor)
        .map(|(i, _)| i)
        .collect();
    let others = targets.non_anchor();
    let mut probabilities = vec![0.0; others.len()];
    if !anchors.is_empty() {
        for (ti, target) in others.iter().enumerate() {
            let hits = anchors
                .iter()
                .filter(|&&p| {
                    let lo = p.saturating_sub(half);
                    let hi = (p + half).min(tokens.len() - 1);
                    tokens[lo..=hi].iter().any(|t| t == target)
                })
                .count();
            probabilities[ti] = hits as f64 / anchors.len() as f64;
        }
    }
    Ok(ParagraphVector {
        paragraph_id,
        probabilities,
        anchor_occurrences: anchors.len(),
    })
}

/// Where a vectorized paragraph came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParagraphProvenance {
    pub document: usize,
    /// Paragraph index within its document.
    pub paragraph: usize,
}

/// A vectorized corpus: the probability-vector dataset plus, for each row,
/// the paragraph it came from.
#[derive(Debug, Clone)]
pub struct CorpusVectors {
    pub dataset: Dataset,
    pub provenance: Vec<ParagraphProvenance>,
    pub vectors: Vec<ParagraphVector>,
}

/// Vectorize every paragraph of every document, in order.
pub fn vectorize_corpus(
    documents: &[String],
    targets: &TargetList,
    lex: &SubstitutionLexicon,
    window: usize,
) -> Result<CorpusVectors> {
    if documents.is_empty() {
        return Err(Error::Size("the corpus contains no documents".into()));
    }
    lex.validate_targets(targets)?;

    let mut points = Vec::new();
    let mut provenance = Vec::new();
    let mut vectors = Vec::new();
    for (doc_id, doc) in documents.iter().enumerate() {
        for (par_id, paragraph) in split_paragraphs(doc).into_iter().enumerate() {
            let tokens = normalize_tokens(&paragraph, lex);
            let pv = vectorize_paragraph(vectors.len(), &tokens, targets, window)?;
            points.push(pv.probabilities.clone());
            provenance.push(ParagraphProvenance {
                document: doc_id,
                paragraph: par_id,
            });
            vectors.push(pv);
        }
    }
    if points.len() < 2 {
        return Err(Error::Size(format!(
            "the corpus yields {} paragraph(s); at least 2 are required",
            points.len()
        )));
    }
    let dataset = Dataset::new(points, None)?;
    Ok(CorpusVectors {
        dataset,
        provenance,
        vectors,
    })
}
