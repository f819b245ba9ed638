//! Deterministic synthetic Korean corpora for tests, benchmarks and demos.
//!
//! Sentences are built from a Zipf-distributed lexicon of stems (random
//! Hangul syllable strings) followed by particles and endings, with some
//! ASCII words and sentence punctuation. The generating morphemes are kept,
//! so each corpus comes with a dictionary that covers it and a gold
//! wakati-style analysis per sentence.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hangul::{compose_syllable, JamoTriple, LEADS, TAILS, VOWELS};
use crate::morph::MorphDictionary;

const SUFFIXES: [&str; 36] = [
    "은",
    "는",
    "이",
    "가",
    "을",
    "를",
    "에",
    "에서",
    "으로",
    "로",
    "와",
    "과",
    "의",
    "도",
    "만",
    "까지",
    "부터",
    "하",
    "했",
    "합니다",
    "한다",
    "하고",
    "다",
    "요",
    "고",
    "지만",
    "는데",
    "게",
    "었",
    "았",
    "겠",
    "자",
    "면",
    "서",
    "니까",
    "들",
];

const ASCII_WORDS: [&str; 8] = ["AI", "GPU", "NLP", "2020", "3.5", "K-pop", "OK", "BTS"];
const SENTENCE_END: [&str; 3] = [".", "?", "!"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeskConfig {
    pub sentences: usize,
    pub seed: u64,
    /// Distinct syllables stems are spelled with.
    pub syllables: usize,
    /// Distinct stems in the lexicon.
    pub stems: usize,
    pub min_words: usize,
    pub max_words: usize,
}

impl Default for DeskConfig {
    fn default() -> Self {
        DeskConfig {
            sentences: 10_000,
            seed: 20_201_015,
            syllables: 600,
            stems: 6_000,
            min_words: 3,
            max_words: 12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeskCorpus {
    pub sentences: Vec<String>,
    /// Space-separated generating morphemes, line-parallel to `sentences`.
    pub wakati: Vec<String>,
    pub dictionary: MorphDictionary,
}

fn zipf(n: usize, exponent: f64) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|rank| (rank as f64).powf(-exponent))).expect("n > 0")
}

impl DeskCorpus {
    pub fn generate(config: DeskConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

        let mut pool: Vec<char> = Vec::with_capacity(config.syllables);
        let mut seen = HashSet::new();
        while pool.len() < config.syllables {
            let tail = rng
                .random_bool(0.45)
                .then(|| TAILS[rng.random_range(0..TAILS.len())]);
            let triple = JamoTriple::new(
                LEADS[rng.random_range(0..LEADS.len())],
                VOWELS[rng.random_range(0..VOWELS.len())],
                tail,
            );
            let syllable = compose_syllable(triple).expect("modern jamo");
            if seen.insert(syllable) {
                pool.push(syllable);
            }
        }

        let syllable_dist = zipf(pool.len(), 0.8);
        let length_dist = WeightedIndex::new([25, 50, 25]).expect("weights");
        let mut stems: Vec<String> = Vec::with_capacity(config.stems);
        let mut seen = HashSet::new();
        while stems.len() < config.stems {
            let len = length_dist.sample(&mut rng) + 1;
            let stem: String = (0..len)
                .map(|_| pool[syllable_dist.sample(&mut rng)])
                .collect();
            if seen.insert(stem.clone()) {
                stems.push(stem);
            }
        }

        let stem_dist = zipf(stems.len(), 1.0);
        let suffix_dist = zipf(SUFFIXES.len(), 0.7);
        let suffix_count = WeightedIndex::new([35, 45, 20]).expect("weights");
        let end_dist = WeightedIndex::new([80, 12, 8]).expect("weights");

        let mut sentences = Vec::with_capacity(config.sentences);
        let mut wakati = Vec::with_capacity(config.sentences);
        for _ in 0..config.sentences {
            let words = rng.random_range(config.min_words..=config.max_words);
            let mut text = String::new();
            let mut morphs: Vec<&str> = Vec::new();
            for w in 0..words {
                if w > 0 {
                    text.push(' ');
                }
                if rng.random_bool(0.04) {
                    let word = ASCII_WORDS[rng.random_range(0..ASCII_WORDS.len())];
                    text.push_str(word);
                    morphs.push(word);
                } else {
                    let stem = &stems[stem_dist.sample(&mut rng)];
                    text.push_str(stem);
                    morphs.push(stem);
                    for _ in 0..suffix_count.sample(&mut rng) {
                        let suffix = SUFFIXES[suffix_dist.sample(&mut rng)];
                        text.push_str(suffix);
                        morphs.push(suffix);
                    }
                }
                if w + 1 < words && rng.random_bool(0.05) {
                    text.push(',');
                    morphs.push(",");
                }
            }
            let end = SENTENCE_END[end_dist.sample(&mut rng)];
            text.push_str(end);
            morphs.push(end);
            sentences.push(text);
            wakati.push(morphs.join(" "));
        }

        let entries = stems
            .iter()
            .map(String::as_str)
            .chain(SUFFIXES)
            .chain(ASCII_WORDS)
            .chain(SENTENCE_END)
            .chain([","]);
        let dictionary = MorphDictionary::new(entries).expect("non-empty lexicon");
        DeskCorpus {
            sentences,
            wakati,
            dictionary,
        }
    }

    /// Contiguous train/dev/test split by percentage of sentences; the test
    /// part takes the remainder.
    pub fn split(&self, train_pct: usize, dev_pct: usize) -> (&[String], &[String], &[String]) {
        let n = self.sentences.len();
        let train_end = n * train_pct / 100;
        let dev_end = train_end + n * dev_pct / 100;
        (
            &self.sentences[..train_end],
            &self.sentences[train_end..dev_end],
            &self.sentences[dev_end..],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morph::align_wakati;

    fn small() -> DeskCorpus {
        DeskCorpus::generate(DeskConfig {
            sentences: 200,
            stems: 500,
            ..DeskConfig::default()
        })
    }

    #[test]
    fn generation_is_deterministic() {
        let a = small();
        let b = small();
        assert_eq!(a.sentences, b.sentences);
        assert_eq!(a.wakati, b.wakati);
        let other = DeskCorpus::generate(DeskConfig {
            sentences: 200,
            stems: 500,
            seed: 1,
            ..DeskConfig::default()
        });
        assert_ne!(a.sentences, other.sentences);
    }

    #[test]
    fn gold_analysis_aligns_and_is_covered_by_dictionary() {
        let corpus = small();
        for (s, w) in corpus.sentences.iter().zip(&corpus.wakati) {
            let seg = align_wakati(s, w).unwrap();
            assert_eq!(&seg.to_text(), s);
            assert!(seg.morphemes().all(|m| corpus.dictionary.contains(m)));
        }
    }

    #[test]
    fn split_partitions_in_order() {
        let corpus = small();
        let (train, dev, test) = corpus.split(98, 1);
        assert_eq!((train.len(), dev.len(), test.len()), (196, 2, 2));
        assert_eq!(&test[1], corpus.sentences.last().unwrap());
    }
}
