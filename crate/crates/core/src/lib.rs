//! Korean tokenization at six granularities (jamo, syllable, morpheme, BPE
//! subword, morpheme-aware subword and word), each with an exact inverse
//! where one exists, plus a character-level BPE trainer, vocabularies and
//! corpus diagnostics.
//!
//! ```
//! use hantok::{Strategy, StrategyKind};
//!
//! let cv = Strategy::cv().tokenize("나랑 쇼핑하자.").unwrap();
//! assert_eq!(cv.tokens.join("/"), "ㄴ/ㅏ/ㄹ/ㅏ/ㅇ/⭑/ㅅ/ㅛ/ㅍ/ㅣ/ㅇ/ㅎ/ㅏ/ㅈ/ㅏ/.");
//! assert_eq!(hantok::detokenize(StrategyKind::Cv, &cv.tokens).unwrap(), "나랑 쇼핑하자.");
//! ```

pub mod bpe;
pub mod desk;
pub mod error;
pub mod hangul;
pub mod markers;
pub mod morph;
pub mod pipeline;
pub mod scalar;
pub mod stats;
pub mod strategy;
pub mod vocab;

pub use bpe::{train_bpe, BpeModel, MergeRule, Piece};
pub use error::{Error, Result};
pub use hangul::{compose_jamo_stream, compose_syllable, decompose_syllable, JamoTriple};
pub use morph::{
    align_wakati, segment_longest_match, MorphAnalyzer, MorphDictionary, MorphSegmentation,
};
pub use scalar::Scalar;
pub use strategy::{detokenize, Strategy, StrategyKind, TokenSequence};
pub use vocab::Vocabulary;

pub use num_rational::Rational64;

/// Report with floating-point statistics, as written by the CLI.
pub type CorpusReport = stats::CorpusReport<f64>;
/// Report with exact rational statistics.
pub type ExactCorpusReport = stats::CorpusReport<Rational64>;
pub type UnderTrainedCurve = stats::UnderTrainedCurve<f64>;
pub type ExactUnderTrainedCurve = stats::UnderTrainedCurve<Rational64>;
