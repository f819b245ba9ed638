//! The six tokenization strategies and their inverses.
//!
//! | kind               | unit                          | space marker        |
//! |--------------------|-------------------------------|---------------------|
//! | `cv`               | compatibility jamo            | `⭑` token           |
//! | `syllable`         | character                     | `⭑` token           |
//! | `morpheme`         | morpheme                      | `⭑` token           |
//! | `subword`          | BPE piece of a `▁`word        | `▁` prefix          |
//! | `morpheme-subword` | BPE piece of a `▁`morpheme    | `⭑` token           |
//! | `word`             | word, edge punctuation split  | none (lossy)        |

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_general_category::{get_general_category, GeneralCategory};

use crate::bpe::BpeModel;
use crate::hangul::{self, HangulError};
use crate::markers::{
    contains_marker, normalize_whitespace, SPACE_MARKER, SPACE_MARKER_STR, WORD_MARKER,
    WORD_MARKER_STR,
};
use crate::morph::{MorphAnalyzer, MorphError, MorphSegmentation};

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("{kind} strategy requires {component}")]
    MissingComponent {
        kind: StrategyKind,
        component: &'static str,
    },
    #[error("input contains a reserved marker character (⭑ or ▁) at char offset {offset}")]
    ReservedMarker { offset: usize },
    #[error("malformed {kind} token sequence at token {index}: {reason}")]
    Structure {
        kind: StrategyKind,
        index: usize,
        reason: &'static str,
    },
    #[error("unknown strategy {0:?}")]
    UnknownKind(String),
    #[error(transparent)]
    Codec(#[from] HangulError),
    #[error(transparent)]
    Morph(#[from] MorphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Cv,
    Syllable,
    Morpheme,
    Subword,
    #[serde(rename = "morpheme-subword")]
    MorphemeAwareSubword,
    Word,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 6] = [
        StrategyKind::Cv,
        StrategyKind::Syllable,
        StrategyKind::Morpheme,
        StrategyKind::Subword,
        StrategyKind::MorphemeAwareSubword,
        StrategyKind::Word,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Cv => "cv",
            StrategyKind::Syllable => "syllable",
            StrategyKind::Morpheme => "morpheme",
            StrategyKind::Subword => "subword",
            StrategyKind::MorphemeAwareSubword => "morpheme-subword",
            StrategyKind::Word => "word",
        }
    }

    pub fn needs_bpe(self) -> bool {
        matches!(
            self,
            StrategyKind::Subword | StrategyKind::MorphemeAwareSubword
        )
    }

    pub fn needs_morph(self) -> bool {
        matches!(
            self,
            StrategyKind::Morpheme | StrategyKind::MorphemeAwareSubword
        )
    }

    /// Whether `detokenize` is guaranteed to recover the source.
    pub fn is_reversible(self) -> bool {
        self != StrategyKind::Word
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| StrategyError::UnknownKind(s.to_owned()))
    }
}

/// Tokens of one sentence and the strategy that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub kind: StrategyKind,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn detokenize(&self) -> Result<String, StrategyError> {
        detokenize(self.kind, &self.tokens)
    }
}

impl AsRef<[String]> for TokenSequence {
    fn as_ref(&self) -> &[String] {
        &self.tokens
    }
}

/// Space-separated, as in tokenized text files.
impl fmt::Display for TokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tokens.join(" "))
    }
}

#[derive(Debug, Clone)]
pub struct Strategy {
    kind: StrategyKind,
    bpe: Option<Arc<BpeModel>>,
    morph: Option<Arc<dyn MorphAnalyzer>>,
}

impl Strategy {
    pub fn new(
        kind: StrategyKind,
        bpe: Option<Arc<BpeModel>>,
        morph: Option<Arc<dyn MorphAnalyzer>>,
    ) -> Result<Self, StrategyError> {
        if kind.needs_bpe() && bpe.is_none() {
            return Err(StrategyError::MissingComponent {
                kind,
                component: "a BPE model",
            });
        }
        if kind.needs_morph() && morph.is_none() {
            return Err(StrategyError::MissingComponent {
                kind,
                component: "a morpheme analyzer",
            });
        }
        Ok(Strategy { kind, bpe, morph })
    }

    pub fn cv() -> Self {
        Strategy {
            kind: StrategyKind::Cv,
            bpe: None,
            morph: None,
        }
    }

    pub fn syllable() -> Self {
        Strategy {
            kind: StrategyKind::Syllable,
            bpe: None,
            morph: None,
        }
    }

    pub fn word() -> Self {
        Strategy {
            kind: StrategyKind::Word,
            bpe: None,
            morph: None,
        }
    }

    pub fn morpheme(analyzer: Arc<dyn MorphAnalyzer>) -> Self {
        Strategy {
            kind: StrategyKind::Morpheme,
            bpe: None,
            morph: Some(analyzer),
        }
    }

    pub fn subword(model: Arc<BpeModel>) -> Self {
        Strategy {
            kind: StrategyKind::Subword,
            bpe: Some(model),
            morph: None,
        }
    }

    pub fn morpheme_subword(analyzer: Arc<dyn MorphAnalyzer>, model: Arc<BpeModel>) -> Self {
        Strategy {
            kind: StrategyKind::MorphemeAwareSubword,
            bpe: Some(model),
            morph: Some(analyzer),
        }
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn bpe(&self) -> Option<&Arc<BpeModel>> {
        self.bpe.as_ref()
    }

    pub fn morph(&self) -> Option<&Arc<dyn MorphAnalyzer>> {
        self.morph.as_ref()
    }

    /// Tokenize one sentence. Whitespace is normalized first; the marker
    /// characters `⭑` and `▁` may not appear in the input.
    pub fn tokenize(&self, text: &str) -> Result<TokenSequence, StrategyError> {
        if contains_marker(text) {
            let offset = text
                .chars()
                .position(|c| c == SPACE_MARKER || c == WORD_MARKER);
            return Err(StrategyError::ReservedMarker {
                offset: offset.unwrap_or(0),
            });
        }
        let text = normalize_whitespace(text);
        let tokens = match self.kind {
            StrategyKind::Cv => tokenize_cv(&text),
            StrategyKind::Syllable => tokenize_syllable(&text),
            StrategyKind::Morpheme => self.segment(&text)?.into_units(),
            StrategyKind::Subword => {
                let model = self.bpe.as_deref().expect("validated at construction");
                text.split(' ')
                    .filter(|w| !w.is_empty())
                    .flat_map(|w| model.encode_word_str(&format!("{WORD_MARKER}{w}")))
                    .collect()
            }
            StrategyKind::MorphemeAwareSubword => {
                let model = self.bpe.as_deref().expect("validated at construction");
                let mut tokens = Vec::new();
                for unit in self.segment(&text)?.into_units() {
                    if unit == SPACE_MARKER_STR {
                        tokens.push(unit);
                    } else {
                        tokens.extend(model.encode_word_str(&format!("{WORD_MARKER}{unit}")));
                    }
                }
                tokens
            }
            StrategyKind::Word => tokenize_word(&text),
        };
        Ok(TokenSequence {
            tokens,
            kind: self.kind,
        })
    }

    /// Morpheme segmentation of a sentence, for strategies that have an analyzer.
    pub fn segment(&self, text: &str) -> Result<MorphSegmentation, StrategyError> {
        let analyzer = self
            .morph
            .as_deref()
            .ok_or(StrategyError::MissingComponent {
                kind: self.kind,
                component: "a morpheme analyzer",
            })?;
        Ok(analyzer.segment(text)?)
    }
}

fn tokenize_cv(text: &str) -> Vec<String> {
    let mut tokens = Vec::with_capacity(text.len());
    for ch in text.chars() {
        if ch == ' ' {
            tokens.push(SPACE_MARKER_STR.to_owned());
        } else if let Ok(triple) = hangul::decompose_syllable(ch) {
            tokens.extend(triple.iter().map(String::from));
        } else {
            tokens.push(ch.to_string());
        }
    }
    tokens
}

fn tokenize_syllable(text: &str) -> Vec<String> {
    text.chars()
        .map(|ch| {
            if ch == ' ' {
                SPACE_MARKER_STR.to_owned()
            } else {
                ch.to_string()
            }
        })
        .collect()
}

pub fn is_punctuation(ch: char) -> bool {
    matches!(
        get_general_category(ch),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

fn is_punctuation_only(token: &str) -> bool {
    !token.is_empty() && token.chars().all(is_punctuation)
}

/// Split on spaces, then peel leading and trailing punctuation runs off each
/// word. A word made only of punctuation stays one token.
fn tokenize_word(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for word in text.split(' ').filter(|w| !w.is_empty()) {
        if is_punctuation_only(word) {
            tokens.push(word.to_owned());
            continue;
        }
        let core_start = word.find(|c: char| !is_punctuation(c)).unwrap_or(0);
        let core_end = word
            .char_indices()
            .rev()
            .find(|&(_, c)| !is_punctuation(c))
            .map(|(i, c)| i + c.len_utf8())
            .unwrap_or(word.len());
        for part in [
            &word[..core_start],
            &word[core_start..core_end],
            &word[core_end..],
        ] {
            if !part.is_empty() {
                tokens.push(part.to_owned());
            }
        }
    }
    tokens
}

fn structure(kind: StrategyKind, index: usize, reason: &'static str) -> StrategyError {
    StrategyError::Structure {
        kind,
        index,
        reason,
    }
}

/// `⭑` must be a whole token, never first or last, never doubled.
fn check_space_markers<S: AsRef<str>>(
    kind: StrategyKind,
    tokens: &[S],
) -> Result<(), StrategyError> {
    let mut prev_marker = true;
    for (i, token) in tokens.iter().enumerate() {
        let token = token.as_ref();
        let marker = token == SPACE_MARKER_STR;
        if marker && prev_marker {
            return Err(structure(
                kind,
                i,
                "space marker at sentence start or doubled",
            ));
        }
        if !marker && token.contains(SPACE_MARKER) {
            return Err(structure(kind, i, "space marker inside a token"));
        }
        prev_marker = marker;
    }
    if prev_marker && !tokens.is_empty() {
        return Err(structure(
            kind,
            tokens.len() - 1,
            "space marker at sentence end",
        ));
    }
    Ok(())
}

fn check_no_char<S: AsRef<str>>(
    kind: StrategyKind,
    tokens: &[S],
    ch: char,
    reason: &'static str,
) -> Result<(), StrategyError> {
    match tokens.iter().position(|t| t.as_ref().contains(ch)) {
        Some(i) => Err(structure(kind, i, reason)),
        None => Ok(()),
    }
}

/// `▁` may only open a token.
fn check_word_markers<S: AsRef<str>>(
    kind: StrategyKind,
    tokens: &[S],
) -> Result<(), StrategyError> {
    for (i, token) in tokens.iter().enumerate() {
        let token = token.as_ref();
        let body = token.strip_prefix(WORD_MARKER).unwrap_or(token);
        if body.contains(WORD_MARKER) {
            return Err(structure(kind, i, "word marker inside a token body"));
        }
    }
    Ok(())
}

fn join_replacing_space_marker<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    for token in tokens {
        let token = token.as_ref();
        if token == SPACE_MARKER_STR {
            out.push(' ');
        } else {
            out.push_str(token);
        }
    }
    out
}

/// Invert `tokenize` for `kind`. Exact for every kind except `Word`, whose
/// punctuation spacing is reconstructed on a best-effort basis.
pub fn detokenize<S: AsRef<str>>(
    kind: StrategyKind,
    tokens: &[S],
) -> Result<String, StrategyError> {
    if let Some(i) = tokens.iter().position(|t| t.as_ref().is_empty()) {
        return Err(structure(kind, i, "empty token"));
    }
    match kind {
        StrategyKind::Cv => {
            check_space_markers(kind, tokens)?;
            check_no_char(kind, tokens, WORD_MARKER, "word marker in jamo output")?;
            let stream: String = tokens.iter().map(AsRef::as_ref).collect();
            Ok(hangul::compose_jamo_stream(&stream)?)
        }
        StrategyKind::Syllable | StrategyKind::Morpheme => {
            check_space_markers(kind, tokens)?;
            check_no_char(
                kind,
                tokens,
                WORD_MARKER,
                "word marker in non-subword output",
            )?;
            Ok(join_replacing_space_marker(tokens))
        }
        StrategyKind::Subword => {
            check_no_char(kind, tokens, SPACE_MARKER, "space marker in subword output")?;
            check_word_markers(kind, tokens)?;
            if let Some(first) = tokens.first() {
                if !first.as_ref().starts_with(WORD_MARKER) {
                    return Err(structure(kind, 0, "first token does not start a word"));
                }
            }
            let joined: String = tokens.iter().map(AsRef::as_ref).collect();
            let text = joined.replace(WORD_MARKER, " ");
            Ok(text.strip_prefix(' ').unwrap_or(&text).to_owned())
        }
        StrategyKind::MorphemeAwareSubword => {
            check_space_markers(kind, tokens)?;
            check_word_markers(kind, tokens)?;
            let stripped: Vec<&str> = tokens
                .iter()
                .map(|t| {
                    t.as_ref()
                        .strip_prefix(WORD_MARKER_STR)
                        .unwrap_or(t.as_ref())
                })
                .collect();
            // a bare `▁` is fine when the morpheme continues in the next token
            for (i, t) in stripped.iter().enumerate() {
                let continues = tokens
                    .get(i + 1)
                    .map(AsRef::as_ref)
                    .is_some_and(|next| next != SPACE_MARKER_STR && !next.starts_with(WORD_MARKER));
                if t.is_empty() && !continues {
                    return Err(structure(kind, i, "word marker opens an empty morpheme"));
                }
            }
            Ok(join_replacing_space_marker(&stripped))
        }
        StrategyKind::Word => {
            let mut out = String::new();
            for (i, token) in tokens.iter().enumerate() {
                let token = token.as_ref();
                if i > 0 && !is_punctuation_only(token) {
                    out.push(' ');
                }
                out.push_str(token);
            }
            Ok(out)
        }
    }
}
