#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use hantok::{BpeModel, MorphAnalyzer, MorphDictionary};
use rand::Rng;

pub const EXAMPLE_SENTENCE: &str = "나랑 쇼핑하자.";

pub fn example_dictionary() -> Arc<dyn MorphAnalyzer> {
    Arc::new(MorphDictionary::new(["나", "랑", "쇼핑", "하", "자", "."]).unwrap())
}

/// A model holding exactly the given merges, pieces in first-seen order.
pub fn fixture_model(merges: &[(&str, &str)]) -> Arc<BpeModel> {
    let mut pieces: Vec<(String, u64)> = Vec::new();
    let push = |p: String, pieces: &mut Vec<(String, u64)>| {
        if !pieces.iter().any(|(q, _)| *q == p) {
            pieces.push((p, 1));
        }
    };
    for (l, r) in merges {
        for c in l.chars().chain(r.chars()) {
            push(c.to_string(), &mut pieces);
        }
    }
    for (l, r) in merges {
        push(format!("{l}{r}"), &mut pieces);
    }
    let merges = merges
        .iter()
        .map(|(l, r)| (l.to_string(), r.to_string()))
        .collect();
    Arc::new(BpeModel::from_parts(pieces, merges).unwrap())
}

pub fn example_subword_model() -> Arc<BpeModel> {
    fixture_model(&[("▁", "나"), ("▁나", "랑"), ("▁", "쇼"), ("핑", "하")])
}

pub fn example_morpheme_subword_model() -> Arc<BpeModel> {
    fixture_model(&[
        ("▁", "나"),
        ("▁", "랑"),
        ("▁", "쇼"),
        ("▁", "하"),
        ("▁", "자"),
        ("▁", "."),
    ])
}

/// Merge list by brute force: recount every adjacent pair each round.
pub fn oracle_merges(words: &[(String, u64)], vocab_size: usize) -> Vec<(String, String)> {
    let mut corpus: BTreeMap<String, u64> = BTreeMap::new();
    for (w, c) in words {
        if *c > 0 && !w.is_empty() {
            *corpus.entry(w.clone()).or_default() += c;
        }
    }
    let mut segmented: Vec<(Vec<String>, u64)> = corpus
        .iter()
        .map(|(w, &c)| (w.chars().map(String::from).collect(), c))
        .collect();
    let mut pieces: std::collections::HashSet<String> = segmented
        .iter()
        .flat_map(|(s, _)| s.iter().cloned())
        .collect();
    let mut merges = Vec::new();
    while pieces.len() < vocab_size {
        let mut counts: HashMap<(String, String), u64> = HashMap::new();
        for (symbols, c) in &segmented {
            for pair in symbols.windows(2) {
                *counts
                    .entry((pair[0].clone(), pair[1].clone()))
                    .or_default() += c;
            }
        }
        let best = counts
            .into_iter()
            .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then_with(|| pb.cmp(pa)));
        let Some(((l, r), count)) = best else { break };
        if count < 2 {
            break;
        }
        for (symbols, _) in &mut segmented {
            let mut out = Vec::with_capacity(symbols.len());
            let mut i = 0;
            while i < symbols.len() {
                if i + 1 < symbols.len() && symbols[i] == l && symbols[i + 1] == r {
                    out.push(format!("{l}{r}"));
                    i += 2;
                } else {
                    out.push(symbols[i].clone());
                    i += 1;
                }
            }
            *symbols = out;
        }
        pieces.insert(format!("{l}{r}"));
        merges.push((l, r));
    }
    merges
}

const PUNCT: [char; 12] = ['.', ',', '?', '!', '"', '\'', '(', ')', '-', '~', '…', '·'];

/// A random sentence of Hangul syllables, ASCII and punctuation, words
/// separated by single spaces. Most syllables come from `pool` so that
/// segmenters and BPE models see repeated material.
pub fn random_sentence<R: Rng>(rng: &mut R, pool: &[char]) -> String {
    let words = rng.random_range(1..=8);
    let mut out = String::new();
    for w in 0..words {
        if w > 0 {
            out.push(' ');
        }
        let len = rng.random_range(1..=6);
        for _ in 0..len {
            let c = match rng.random_range(0..10) {
                0..=5 => pool[rng.random_range(0..pool.len())],
                6 => char::from_u32(0xAC00 + rng.random_range(0..11_172)).unwrap(),
                7 | 8 => rng.random_range(b'!'..=b'~') as char,
                _ => PUNCT[rng.random_range(0..PUNCT.len())],
            };
            out.push(c);
        }
    }
    out
}

pub fn syllable_pool<R: Rng>(rng: &mut R, size: usize) -> Vec<char> {
    (0..size)
        .map(|_| char::from_u32(0xAC00 + rng.random_range(0..11_172)).unwrap())
        .collect()
}

/// A random word drawn from a small alphabet so that pairs repeat.
pub fn random_word<R: Rng>(rng: &mut R, alphabet: &[char]) -> String {
    let len = rng.random_range(1..=8);
    (0..len)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())])
        .collect()
}
