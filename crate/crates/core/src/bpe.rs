//! Byte pair encoding over characters.
//!
//! Training starts from the characters of a weighted word list and greedily
//! merges the most frequent adjacent pair until the piece budget is spent or
//! no pair occurs at least twice. Ties go to the lexicographically smallest
//! `(left, right)`. Pairs are only counted inside a word, so no piece ever
//! straddles two words.
//!
//! Encoding replays merges by rank: the lowest-ranked applicable pair is
//! merged first, leftmost occurrence first.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

pub const MERGES_FILE: &str = "merges.txt";
pub const PIECES_FILE: &str = "pieces.tsv";

/// Pieces that occur at least this often may be merged.
const MIN_PAIR_FREQUENCY: u64 = 2;

#[derive(Debug, Error)]
pub enum BpeError {
    #[error("vocab size {vocab_size} must exceed the {base} distinct base characters")]
    VocabTooSmall { vocab_size: usize, base: usize },
    #[error("{file} line {line}: {reason}")]
    Parse {
        file: &'static str,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MergeRule {
    pub left: String,
    pub right: String,
    pub rank: usize,
}

impl MergeRule {
    pub fn output(&self) -> String {
        let mut s = String::with_capacity(self.left.len() + self.right.len());
        s.push_str(&self.left);
        s.push_str(&self.right);
        s
    }
}

/// One encoded piece. `known` is false for characters the model never saw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub text: String,
    pub known: bool,
}

#[derive(Debug, Clone)]
pub struct BpeModel {
    merges: Vec<MergeRule>,
    /// Base characters (code point order) followed by merge outputs in rank order.
    pieces: Vec<(String, u64)>,
    piece_ids: HashMap<String, u32>,
    /// (left id, right id) -> (rank, output id)
    merge_table: HashMap<(u32, u32), (u32, u32)>,
    vocab_size_target: usize,
}

impl PartialEq for BpeModel {
    fn eq(&self, other: &Self) -> bool {
        self.merges == other.merges && self.pieces == other.pieces
    }
}

impl BpeModel {
    /// Assemble a model from its piece list and merges in rank order.
    ///
    /// Every single-character piece is a base piece; every longer piece must
    /// be the output of some merge, and every merge operand must be a base
    /// piece or the output of an earlier merge.
    pub fn from_parts(
        pieces: Vec<(String, u64)>,
        merges: Vec<(String, String)>,
    ) -> Result<Self, BpeError> {
        let mut piece_ids = HashMap::with_capacity(pieces.len());
        for (i, (piece, _)) in pieces.iter().enumerate() {
            if piece.is_empty() || piece.contains(char::is_whitespace) {
                return Err(parse_err(
                    PIECES_FILE,
                    i + 1,
                    "piece is empty or contains whitespace",
                ));
            }
            if piece_ids.insert(piece.clone(), i as u32).is_some() {
                return Err(parse_err(
                    PIECES_FILE,
                    i + 1,
                    format!("duplicate piece {piece:?}"),
                ));
            }
        }

        let mut producible: HashSet<&str> = pieces
            .iter()
            .map(|(p, _)| p.as_str())
            .filter(|p| p.chars().count() == 1)
            .collect();
        let mut seen = HashSet::with_capacity(merges.len());
        let mut merge_table = HashMap::with_capacity(merges.len());
        let mut rules = Vec::with_capacity(merges.len());
        for (rank, (left, right)) in merges.into_iter().enumerate() {
            let line = rank + 1;
            if !seen.insert((left.clone(), right.clone())) {
                return Err(parse_err(
                    MERGES_FILE,
                    line,
                    format!("duplicate merge {left} {right}"),
                ));
            }
            for operand in [&left, &right] {
                if !producible.contains(operand.as_str()) {
                    return Err(parse_err(
                        MERGES_FILE,
                        line,
                        format!("operand {operand:?} is not produced by an earlier merge"),
                    ));
                }
            }
            let rule = MergeRule { left, right, rank };
            let output = rule.output();
            let Some(&out_id) = piece_ids.get(&output) else {
                return Err(parse_err(
                    MERGES_FILE,
                    line,
                    format!("output {output:?} missing from pieces"),
                ));
            };
            let key = (piece_ids[&rule.left], piece_ids[&rule.right]);
            merge_table.insert(key, (rank as u32, out_id));
            let (output_str, _) = &pieces[out_id as usize];
            producible.insert(output_str.as_str());
            rules.push(rule);
        }
        if let Some((i, (piece, _))) = pieces
            .iter()
            .enumerate()
            .find(|(_, (p, _))| !producible.contains(p.as_str()))
        {
            return Err(parse_err(
                PIECES_FILE,
                i + 1,
                format!("piece {piece:?} is not produced by any merge"),
            ));
        }

        let vocab_size_target = pieces.len();
        Ok(BpeModel {
            merges: rules,
            pieces,
            piece_ids,
            merge_table,
            vocab_size_target,
        })
    }

    pub fn merges(&self) -> &[MergeRule] {
        &self.merges
    }

    /// All pieces with their training frequency: base characters first, then
    /// merge outputs in rank order.
    pub fn pieces(&self) -> &[(String, u64)] {
        &self.pieces
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn contains_piece(&self, piece: &str) -> bool {
        self.piece_ids.contains_key(piece)
    }

    pub fn vocab_size_target(&self) -> usize {
        self.vocab_size_target
    }

    pub fn encode_word(&self, word: &str) -> Vec<Piece> {
        // Unknown characters get no id and never take part in a merge.
        let mut symbols: Vec<(Option<u32>, String)> = word
            .chars()
            .map(|c| {
                let s = c.to_string();
                (self.piece_ids.get(&s).copied(), s)
            })
            .collect();
        loop {
            let mut best: Option<(u32, usize, u32)> = None;
            for (i, pair) in symbols.windows(2).enumerate() {
                let (Some(l), Some(r)) = (pair[0].0, pair[1].0) else {
                    continue;
                };
                if let Some(&(rank, out)) = self.merge_table.get(&(l, r)) {
                    if best.is_none_or(|(best_rank, _, _)| rank < best_rank) {
                        best = Some((rank, i, out));
                    }
                }
            }
            let Some((_, i, out)) = best else { break };
            let (_, right) = symbols.remove(i + 1);
            symbols[i].0 = Some(out);
            symbols[i].1.push_str(&right);
        }
        symbols
            .into_iter()
            .map(|(id, text)| Piece {
                text,
                known: id.is_some(),
            })
            .collect()
    }

    /// Piece strings only.
    pub fn encode_word_str(&self, word: &str) -> Vec<String> {
        self.encode_word(word).into_iter().map(|p| p.text).collect()
    }

    pub fn write_merges<W: Write>(&self, mut writer: W) -> io::Result<()> {
        for rule in &self.merges {
            writeln!(writer, "{} {}", rule.left, rule.right)?;
        }
        Ok(())
    }

    pub fn write_pieces<W: Write>(&self, mut writer: W) -> io::Result<()> {
        for (piece, freq) in &self.pieces {
            writeln!(writer, "{piece}\t{freq}")?;
        }
        Ok(())
    }

    pub fn read_from<M: BufRead, P: BufRead>(merges: M, pieces: P) -> Result<Self, BpeError> {
        let pieces = read_pieces(pieces)?;
        let merges = read_merges(merges)?;
        Self::from_parts(pieces, merges)
    }

    /// Write `merges.txt` and `pieces.tsv` into `dir`, creating it if needed.
    pub fn save(&self, dir: &Path) -> Result<(), BpeError> {
        fs::create_dir_all(dir)?;
        let mut merges = BufWriter::new(File::create(dir.join(MERGES_FILE))?);
        self.write_merges(&mut merges)?;
        merges.flush()?;
        let mut pieces = BufWriter::new(File::create(dir.join(PIECES_FILE))?);
        self.write_pieces(&mut pieces)?;
        pieces.flush()?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self, BpeError> {
        let merges = BufReader::new(File::open(dir.join(MERGES_FILE))?);
        let pieces = BufReader::new(File::open(dir.join(PIECES_FILE))?);
        Self::read_from(merges, pieces)
    }
}

fn parse_err(file: &'static str, line: usize, reason: impl Into<String>) -> BpeError {
    BpeError::Parse {
        file,
        line,
        reason: reason.into(),
    }
}

fn read_merges<R: BufRead>(reader: R) -> Result<Vec<(String, String)>, BpeError> {
    let mut merges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let mut parts = line.split(' ');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                merges.push((l.to_owned(), r.to_owned()));
            }
            _ => return Err(parse_err(MERGES_FILE, i + 1, "expected `left right`")),
        }
    }
    Ok(merges)
}

fn read_pieces<R: BufRead>(reader: R) -> Result<Vec<(String, u64)>, BpeError> {
    let mut pieces = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let Some((piece, freq)) = line.split_once('\t') else {
            return Err(parse_err(
                PIECES_FILE,
                i + 1,
                "expected `piece<TAB>frequency`",
            ));
        };
        let freq = freq
            .parse()
            .map_err(|_| parse_err(PIECES_FILE, i + 1, format!("bad frequency {freq:?}")))?;
        pieces.push((piece.to_owned(), freq));
    }
    Ok(pieces)
}

/// Heap entry; the greatest entry is the next merge.
struct Candidate {
    count: u64,
    left: Arc<str>,
    right: Arc<str>,
    pair: (u32, u32),
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| other.left.cmp(&self.left))
            .then_with(|| other.right.cmp(&self.right))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

struct TrainWord {
    symbols: Vec<u32>,
    count: u64,
}

/// Learn merges from `(word, count)` pairs. Words are expected to already
/// carry their `▁` prefix; repeated words have their counts summed.
pub fn train_bpe<I, S>(words: I, vocab_size: usize) -> Result<BpeModel, BpeError>
where
    I: IntoIterator<Item = (S, u64)>,
    S: AsRef<str>,
{
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for (word, count) in words {
        if count > 0 && !word.as_ref().is_empty() {
            *counts.entry(word.as_ref().to_owned()).or_default() += count;
        }
    }

    let mut char_freq: BTreeMap<char, u64> = BTreeMap::new();
    for (word, &count) in &counts {
        for c in word.chars() {
            *char_freq.entry(c).or_default() += count;
        }
    }
    if vocab_size <= char_freq.len() {
        return Err(BpeError::VocabTooSmall {
            vocab_size,
            base: char_freq.len(),
        });
    }

    let mut symbols: Vec<Arc<str>> = Vec::new();
    let mut symbol_ids: HashMap<Arc<str>, u32> = HashMap::new();
    let mut pieces: Vec<(String, u64)> = Vec::new();
    for (c, &freq) in &char_freq {
        let s: Arc<str> = Arc::from(c.to_string());
        symbol_ids.insert(s.clone(), symbols.len() as u32);
        symbols.push(s);
        pieces.push((c.to_string(), freq));
    }

    let mut words: Vec<TrainWord> = counts
        .iter()
        .map(|(w, &count)| TrainWord {
            symbols: w
                .chars()
                .map(|c| symbol_ids[c.to_string().as_str()])
                .collect(),
            count,
        })
        .collect();

    let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
    let mut pair_words: HashMap<(u32, u32), HashSet<usize>> = HashMap::new();
    for (wi, word) in words.iter().enumerate() {
        for pair in word.symbols.windows(2) {
            let key = (pair[0], pair[1]);
            *pair_counts.entry(key).or_default() += word.count;
            pair_words.entry(key).or_default().insert(wi);
        }
    }

    let candidate = |pair: (u32, u32), count: u64, symbols: &[Arc<str>]| Candidate {
        count,
        left: symbols[pair.0 as usize].clone(),
        right: symbols[pair.1 as usize].clone(),
        pair,
    };
    let mut heap: BinaryHeap<Candidate> = pair_counts
        .iter()
        .map(|(&pair, &count)| candidate(pair, count, &symbols))
        .collect();

    let mut merges: Vec<(String, String)> = Vec::new();
    let mut piece_set: HashSet<u32> = (0..symbols.len() as u32).collect();

    while piece_set.len() < vocab_size {
        let Some(top) = heap.pop() else { break };
        let current = pair_counts.get(&top.pair).copied().unwrap_or(0);
        if current != top.count {
            continue;
        }
        if top.count < MIN_PAIR_FREQUENCY {
            break;
        }

        let (left, right) = top.pair;
        let merged: String = format!("{}{}", symbols[left as usize], symbols[right as usize]);
        let new_id = match symbol_ids.get(merged.as_str()) {
            Some(&id) => id,
            None => {
                let id = symbols.len() as u32;
                let s: Arc<str> = Arc::from(merged.as_str());
                symbol_ids.insert(s.clone(), id);
                symbols.push(s);
                id
            }
        };
        if piece_set.insert(new_id) {
            pieces.push((merged, top.count));
        }
        merges.push((top.left.to_string(), top.right.to_string()));

        let mut affected: Vec<usize> = pair_words
            .remove(&top.pair)
            .unwrap_or_default()
            .into_iter()
            .collect();
        affected.sort_unstable();
        let mut touched: HashSet<(u32, u32)> = HashSet::new();
        for wi in affected {
            let word = &mut words[wi];
            if !word
                .symbols
                .windows(2)
                .any(|p| p[0] == left && p[1] == right)
            {
                continue;
            }
            for pair in word.symbols.windows(2) {
                let key = (pair[0], pair[1]);
                let c = pair_counts.get_mut(&key).expect("counted pair");
                *c -= word.count;
                touched.insert(key);
            }
            word.symbols = merge_pair(&word.symbols, left, right, new_id);
            for pair in word.symbols.windows(2) {
                let key = (pair[0], pair[1]);
                *pair_counts.entry(key).or_default() += word.count;
                pair_words.entry(key).or_default().insert(wi);
                touched.insert(key);
            }
        }
        pair_counts.retain(|_, c| *c > 0);
        for key in touched {
            if let Some(&count) = pair_counts.get(&key) {
                heap.push(candidate(key, count, &symbols));
            }
        }
    }

    let mut model = BpeModel::from_parts(pieces, merges)?;
    model.vocab_size_target = vocab_size;
    Ok(model)
}

/// Replace non-overlapping `(left, right)` occurrences left to right.
fn merge_pair(symbols: &[u32], left: u32, right: u32, merged: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && symbols[i] == left && symbols[i + 1] == right {
            out.push(merged);
            i += 2;
        } else {
            out.push(symbols[i]);
            i += 1;
        }
    }
    out
}
