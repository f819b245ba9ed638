//! Corpus diagnostics for a tokenization: OOV rate, sequence length,
//! syllables per token, morpheme-boundary-spanning tokens and the
//! under-trained-token curve.
//!
//! All rates count token occurrences, not types, and are percentages in
//! `[0, 100]`. Functions are generic over [`Scalar`] so the same code yields
//! `f64` for reports and exact rationals for tests.

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::hangul::is_syllable;
use crate::markers::{SPACE_MARKER_STR, WORD_MARKER};
use crate::morph::MorphSegmentation;
use crate::scalar::Scalar;
use crate::strategy::{StrategyKind, TokenSequence};
use crate::vocab::{Vocabulary, SPECIALS};

/// Thresholds reported by default for the under-trained curve.
pub const DEFAULT_MAX_N: u32 = 100;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("{0} is undefined on an empty corpus")]
    EmptyCorpus(&'static str),
    #[error("token and morpheme views differ at char offset {offset}")]
    Misaligned { offset: usize },
    #[error("{tokenized} tokenized sentences but {segmented} morpheme segmentations")]
    LengthMismatch { tokenized: usize, segmented: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn oov_rate<S, T>(vocab: &Vocabulary, test: &[T]) -> Result<S, StatsError>
where
    S: Scalar,
    T: AsRef<[String]>,
{
    let mut total = 0u64;
    let mut oov = 0u64;
    for token in test.iter().flat_map(|s| s.as_ref()) {
        total += 1;
        if !vocab.contains(token) {
            oov += 1;
        }
    }
    if total == 0 {
        return Err(StatsError::EmptyCorpus("OOV rate"));
    }
    Ok(S::percent(oov, total))
}

/// Mean number of tokens per sentence.
pub fn avg_len<S, T>(corpus: &[T]) -> Result<S, StatsError>
where
    S: Scalar,
    T: AsRef<[String]>,
{
    if corpus.is_empty() {
        return Err(StatsError::EmptyCorpus("average length"));
    }
    let tokens: usize = corpus.iter().map(|s| s.as_ref().len()).sum();
    Ok(S::from_ratio(tokens as u64, corpus.len() as u64))
}

fn strip_markers(token: &str) -> Option<String> {
    if token == SPACE_MARKER_STR {
        return None;
    }
    let stripped: String = token.chars().filter(|&c| c != WORD_MARKER).collect();
    (!stripped.is_empty()).then_some(stripped)
}

/// Mean count of precomposed Hangul syllables per token. `▁` is stripped and
/// tokens left empty (including every `⭑`) are not counted.
pub fn avg_syllables_per_token<S, T>(corpus: &[T]) -> Result<S, StatsError>
where
    S: Scalar,
    T: AsRef<[String]>,
{
    let mut tokens = 0u64;
    let mut syllables = 0u64;
    for token in corpus.iter().flat_map(|s| s.as_ref()) {
        if let Some(text) = strip_markers(token) {
            tokens += 1;
            syllables += text.chars().filter(|&c| is_syllable(c)).count() as u64;
        }
    }
    if tokens == 0 {
        return Err(StatsError::EmptyCorpus("syllables per token"));
    }
    Ok(S::from_ratio(syllables, tokens))
}

/// Tokens whose characters overlap two or more morphemes, out of all tokens
/// that carry characters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BoundarySpan {
    pub spanning: u64,
    pub tokens: u64,
}

impl BoundarySpan {
    pub fn percentage<S: Scalar>(&self) -> S {
        if self.tokens == 0 {
            S::zero()
        } else {
            S::percent(self.spanning, self.tokens)
        }
    }
}

impl std::ops::AddAssign for BoundarySpan {
    fn add_assign(&mut self, rhs: Self) {
        self.spanning += rhs.spanning;
        self.tokens += rhs.tokens;
    }
}

/// Count tokens of one sentence that cross a morpheme boundary.
///
/// `▁` is stripped from tokens and `⭑` tokens are skipped; spaces are not
/// boundaries. The two views must spell the same characters.
pub fn boundary_spanning<T: AsRef<str>>(
    tokens: &[T],
    morphs: &MorphSegmentation,
) -> Result<BoundarySpan, StatsError> {
    let mut owner: Vec<usize> = Vec::new();
    let mut morph_chars: Vec<char> = Vec::new();
    for (m, morpheme) in morphs.morphemes().enumerate() {
        for c in morpheme.chars() {
            owner.push(m);
            morph_chars.push(c);
        }
    }

    let mut span = BoundarySpan::default();
    let mut pos = 0usize;
    for token in tokens {
        let Some(text) = strip_markers(token.as_ref()) else {
            continue;
        };
        let start = pos;
        for c in text.chars() {
            if morph_chars.get(pos) != Some(&c) {
                return Err(StatsError::Misaligned { offset: pos });
            }
            pos += 1;
        }
        span.tokens += 1;
        if owner[start] != owner[pos - 1] {
            span.spanning += 1;
        }
    }
    if pos != morph_chars.len() {
        return Err(StatsError::Misaligned { offset: pos });
    }
    Ok(span)
}

/// Training frequency per token type.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: HashMap<String, u64>,
}

impl FrequencyTable {
    pub fn count<T: AsRef<[String]>>(corpus: &[T]) -> Self {
        let mut counts = HashMap::new();
        for token in corpus.iter().flat_map(|s| s.as_ref()) {
            *counts.entry(token.clone()).or_default() += 1;
        }
        FrequencyTable { counts }
    }

    /// Frequencies recorded in a vocabulary. Reserved tokens are stored with
    /// frequency 0 on disk but are never under-trained, so they map to `u64::MAX`.
    pub fn from_vocab(vocab: &Vocabulary) -> Self {
        let counts = vocab
            .entries()
            .iter()
            .map(|(t, f)| {
                let f = if SPECIALS.contains(&t.as_str()) {
                    u64::MAX
                } else {
                    *f
                };
                (t.clone(), f)
            })
            .collect();
        FrequencyTable { counts }
    }

    /// Drop types outside `vocab`: a token the model cannot represent was
    /// never trained, whatever its raw count.
    pub fn restrict_to(mut self, vocab: &Vocabulary) -> Self {
        self.counts.retain(|t, _| vocab.contains(t));
        self
    }

    pub fn get(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint<S> {
    pub n: u32,
    pub percentage: S,
}

/// Share of test occurrences whose type was seen at most `n` times in
/// training, for `n = 0..=max_n`. Point 0 is the share never seen at all.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UnderTrainedCurve<S> {
    points: Vec<CurvePoint<S>>,
}

impl<S: Scalar> UnderTrainedCurve<S> {
    pub fn at(&self, n: u32) -> Option<S> {
        self.points.get(n as usize).map(|p| p.percentage)
    }

    pub fn max_n(&self) -> u32 {
        self.points.len() as u32 - 1
    }

    pub fn points(&self) -> &[CurvePoint<S>] {
        &self.points
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), StatsError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["n", "percentage"])?;
        for p in &self.points {
            w.write_record([p.n.to_string(), p.percentage.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn under_trained_curve<S, T>(
    train: &FrequencyTable,
    test: &[T],
    max_n: u32,
) -> Result<UnderTrainedCurve<S>, StatsError>
where
    S: Scalar,
    T: AsRef<[String]>,
{
    // histogram[f] = test occurrences with training frequency f, f > max_n pooled
    let mut histogram = vec![0u64; max_n as usize + 2];
    let mut total = 0u64;
    for token in test.iter().flat_map(|s| s.as_ref()) {
        let f = train.get(token).min(max_n as u64 + 1) as usize;
        histogram[f] += 1;
        total += 1;
    }
    if total == 0 {
        return Err(StatsError::EmptyCorpus("under-trained curve"));
    }
    let mut cumulative = 0u64;
    let points = (0..=max_n)
        .map(|n| {
            cumulative += histogram[n as usize];
            CurvePoint {
                n,
                percentage: S::percent(cumulative, total),
            }
        })
        .collect();
    Ok(UnderTrainedCurve { points })
}

/// Convenience wrapper counting training frequencies from a tokenized corpus.
pub fn under_trained_curve_from_corpora<S, T, U>(
    train: &[T],
    test: &[U],
    max_n: u32,
) -> Result<UnderTrainedCurve<S>, StatsError>
where
    S: Scalar,
    T: AsRef<[String]>,
    U: AsRef<[String]>,
{
    under_trained_curve(&FrequencyTable::count(train), test, max_n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport<S> {
    pub count: u64,
    pub tokens: u64,
    pub percentage: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport<S> {
    pub strategy: StrategyKind,
    pub vocab_size: usize,
    pub sentences: usize,
    pub tokens: u64,
    pub oov_rate: S,
    pub avg_len: S,
    pub avg_syllables_per_token: S,
    pub boundary_spanning: Option<BoundaryReport<S>>,
    pub under_trained_curve: UnderTrainedCurve<S>,
}

/// Everything a report is computed from.
#[derive(Debug, Clone, Copy)]
pub struct ReportInput<'a> {
    pub vocab: &'a Vocabulary,
    pub test: &'a [TokenSequence],
    pub frequencies: &'a FrequencyTable,
    /// Morpheme segmentations line-parallel to `test`, if available.
    pub segmentations: Option<&'a [MorphSegmentation]>,
    pub max_n: u32,
}

impl<S: Scalar> CorpusReport<S> {
    pub fn compute(kind: StrategyKind, input: ReportInput<'_>) -> Result<Self, StatsError> {
        let test = input.test;
        let boundary_spanning = match input.segmentations {
            None => None,
            Some(segs) => {
                if segs.len() != test.len() {
                    return Err(StatsError::LengthMismatch {
                        tokenized: test.len(),
                        segmented: segs.len(),
                    });
                }
                let mut total = BoundarySpan::default();
                for (seq, seg) in test.iter().zip(segs) {
                    total += if kind == StrategyKind::Cv {
                        // jamo never leave their syllable, let alone their morpheme
                        let tokens = seq.tokens.iter().filter(|t| *t != SPACE_MARKER_STR).count();
                        BoundarySpan {
                            spanning: 0,
                            tokens: tokens as u64,
                        }
                    } else {
                        boundary_spanning(&seq.tokens, seg)?
                    };
                }
                Some(BoundaryReport {
                    count: total.spanning,
                    tokens: total.tokens,
                    percentage: total.percentage(),
                })
            }
        };
        Ok(CorpusReport {
            strategy: kind,
            vocab_size: input.vocab.len(),
            sentences: test.len(),
            tokens: test.iter().map(|s| s.len() as u64).sum(),
            oov_rate: oov_rate(input.vocab, test)?,
            avg_len: avg_len(test)?,
            avg_syllables_per_token: avg_syllables_per_token(test)?,
            boundary_spanning,
            under_trained_curve: under_trained_curve(input.frequencies, test, input.max_n)?,
        })
    }
}

impl<S: Scalar + Serialize> CorpusReport<S> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morph::{align_wakati, MorphDictionary};
    use num_rational::Rational64;

    fn seqs(lines: &[&[&str]]) -> Vec<Vec<String>> {
        lines
            .iter()
            .map(|l| l.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    fn vocab_of(tokens: &[&str]) -> Vocabulary {
        Vocabulary::build(seqs(&[tokens]), 100).unwrap()
    }

    #[test]
    fn oov_examples() {
        let vocab = vocab_of(&["a"]);
        let r: Rational64 = oov_rate(&vocab, &seqs(&[&["a", "b", "a", "b"]])).unwrap();
        assert_eq!(r, Rational64::from_integer(50));
        let r: f64 = oov_rate(&vocab, &seqs(&[&["a"], &["a"]])).unwrap();
        assert_eq!(r, 0.0);
        assert!(oov_rate::<f64, _>(&vocab, &seqs(&[&[]])).is_err());
    }

    #[test]
    fn avg_len_examples() {
        let r: f64 = avg_len(&seqs(&[&["1", "2", "3", "4", "5", "6", "7"]])).unwrap();
        assert_eq!(r, 7.0);
        let r: f64 = avg_len(&seqs(&[&["a", "b", "c"], &["a", "b", "c", "d", "e"]])).unwrap();
        assert_eq!(r, 4.0);
        assert!(avg_len::<f64, Vec<String>>(&[]).is_err());
    }

    #[test]
    fn syllables_per_token_examples() {
        let r: f64 = avg_syllables_per_token(&seqs(&[&["나랑"]])).unwrap();
        assert_eq!(r, 2.0);
        let r: Rational64 =
            avg_syllables_per_token(&seqs(&[&["나", "랑", "⭑", "쇼", "핑", "하", "자", "."]]))
                .unwrap();
        assert_eq!(r, Rational64::new(6, 7));
        let r: f64 = avg_syllables_per_token(&seqs(&[&["ㄴ", "ㅏ", "⭑", "ㄹ"]])).unwrap();
        assert_eq!(r, 0.0);
        let r: f64 =
            avg_syllables_per_token(&seqs(&[&["▁나랑", "▁쇼", "핑하", "자", "."]])).unwrap();
        assert_eq!(r, 6.0 / 5.0);
    }

    #[test]
    fn boundary_spanning_examples() {
        let morphs = align_wakati("나랑 쇼핑하자.", "나 랑 쇼핑 하 자 .").unwrap();
        let span = boundary_spanning(&["▁나랑", "▁쇼", "핑하", "자", "."], &morphs).unwrap();
        // ▁나랑 covers 나|랑, 핑하 covers 쇼핑|하
        assert_eq!(
            span,
            BoundarySpan {
                spanning: 2,
                tokens: 5
            }
        );
        assert_eq!(
            span.percentage::<Rational64>(),
            Rational64::from_integer(40)
        );

        let hybrid = ["▁나", "▁랑", "⭑", "▁쇼", "핑", "▁하", "▁자", "▁."];
        assert_eq!(
            boundary_spanning(&hybrid, &morphs).unwrap(),
            BoundarySpan {
                spanning: 0,
                tokens: 7
            }
        );
    }

    #[test]
    fn boundary_spanning_hand_drawn_intervals() {
        // morphemes: [ab][cde][f] -> intervals [0,2) [2,5) [5,6)
        // tokens:    [a][bcd][ef] -> [0,1) inside; [1,4) crosses 1|2; [4,6) crosses 4|5
        let dict = MorphDictionary::new(["ab", "cde", "f"]).unwrap();
        let morphs = crate::morph::segment_longest_match("abcdef", &dict);
        let span = boundary_spanning(&["a", "bcd", "ef"], &morphs).unwrap();
        assert_eq!(
            span,
            BoundarySpan {
                spanning: 2,
                tokens: 3
            }
        );
        // one token over everything
        assert_eq!(
            boundary_spanning(&["abcdef"], &morphs).unwrap(),
            BoundarySpan {
                spanning: 1,
                tokens: 1
            }
        );
    }

    #[test]
    fn boundary_spanning_rejects_mismatched_views() {
        let morphs = align_wakati("ab", "a b").unwrap();
        assert!(matches!(
            boundary_spanning(&["a"], &morphs),
            Err(StatsError::Misaligned { offset: 1 })
        ));
        assert!(matches!(
            boundary_spanning(&["ax"], &morphs),
            Err(StatsError::Misaligned { offset: 1 })
        ));
        assert!(boundary_spanning(&["abc"], &morphs).is_err());
    }

    #[test]
    fn curve_single_type() {
        let train = seqs(&[&["a"; 5]]);
        let test = seqs(&[&["a", "a"]]);
        let curve: UnderTrainedCurve<Rational64> =
            under_trained_curve_from_corpora(&train, &test, 10).unwrap();
        for n in 0..=10 {
            let expected = if n < 5 { 0 } else { 100 };
            assert_eq!(
                curve.at(n).unwrap(),
                Rational64::from_integer(expected),
                "n={n}"
            );
        }
    }

    #[test]
    fn curve_disjoint_is_all_oov() {
        let curve: UnderTrainedCurve<f64> =
            under_trained_curve_from_corpora(&seqs(&[&["a"]]), &seqs(&[&["b", "c"]]), 100).unwrap();
        assert!(curve.points().iter().all(|p| p.percentage == 100.0));
        assert_eq!(curve.max_n(), 100);
    }

    #[test]
    fn vocab_frequencies_treat_specials_as_trained() {
        let vocab = Vocabulary::build(seqs(&[&["a", "⭑", "a"]]), 10).unwrap();
        let table = FrequencyTable::from_vocab(&vocab);
        assert_eq!(table.get("a"), 2);
        assert_eq!(table.get("⭑"), u64::MAX);
        assert_eq!(table.get("zz"), 0);
        let counted = FrequencyTable::count(&seqs(&[&["a", "b", "b"]])).restrict_to(&vocab);
        assert_eq!(counted.get("b"), 0);
        assert_eq!(counted.get("a"), 1);
    }

    #[test]
    fn curve_csv() {
        let curve: UnderTrainedCurve<f64> =
            under_trained_curve_from_corpora(&seqs(&[&["a", "a"]]), &seqs(&[&["a", "b"]]), 2)
                .unwrap();
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,percentage\n0,50\n1,50\n2,100\n"
        );
    }
}
