//! Token <-> id tables.
//!
//! Ids 0..=4 are reserved for `<pad>`, `<unk>`, `<s>`, `</s>` and `⭑`; the
//! rest are assigned by descending training frequency. The on-disk form is
//! one `token<TAB>frequency` line per id.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::bpe::BpeModel;
use crate::markers::SPACE_MARKER_STR;

pub const VOCAB_FILE: &str = "vocab.tsv";

pub const PAD: &str = "<pad>";
pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const SPECIALS: [&str; 5] = [PAD, UNK, BOS, EOS, SPACE_MARKER_STR];

pub const PAD_ID: u32 = 0;
pub const UNK_ID: u32 = 1;
pub const BOS_ID: u32 = 2;
pub const EOS_ID: u32 = 3;
pub const SPACE_ID: u32 = 4;

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("vocab size {target} leaves no room beyond the {specials} reserved tokens")]
    TooSmall { target: usize, specials: usize },
    #[error("id {id} is out of range for a vocabulary of {size}")]
    IdOutOfRange { id: u32, size: usize },
    #[error("vocab line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<(String, u64)>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    fn from_entries(entries: Vec<(String, u64)>) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.clone(), i as u32))
            .collect();
        Vocabulary { entries, index }
    }

    fn check_target(target: usize) -> Result<(), VocabError> {
        if target <= SPECIALS.len() {
            return Err(VocabError::TooSmall {
                target,
                specials: SPECIALS.len(),
            });
        }
        Ok(())
    }

    fn specials() -> Vec<(String, u64)> {
        SPECIALS.iter().map(|s| (s.to_string(), 0)).collect()
    }

    /// Count tokens over a tokenized corpus and keep the `target - 5` most
    /// frequent, ties broken by first occurrence. Special tokens in the
    /// corpus are not counted.
    pub fn build<I, S>(corpus: I, target: usize) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[String]>,
    {
        Self::check_target(target)?;
        let mut counts: HashMap<String, (u64, usize)> = HashMap::new();
        let mut order = 0usize;
        for sentence in corpus {
            for token in sentence.as_ref() {
                if SPECIALS.contains(&token.as_str()) {
                    continue;
                }
                let entry = counts.entry(token.clone()).or_insert_with(|| {
                    order += 1;
                    (0, order)
                });
                entry.0 += 1;
            }
        }
        let mut ranked: Vec<(String, u64, usize)> = counts
            .into_iter()
            .map(|(t, (c, first))| (t, c, first))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
        ranked.truncate(target - SPECIALS.len());

        let mut entries = Self::specials();
        entries.extend(ranked.into_iter().map(|(t, c, _)| (t, c)));
        Ok(Self::from_entries(entries))
    }

    /// The specials followed by the model's pieces, in model order, truncated
    /// to `target` entries.
    pub fn from_bpe(model: &BpeModel, target: usize) -> Result<Self, VocabError> {
        Self::check_target(target)?;
        let mut entries = Self::specials();
        entries.extend(
            model
                .pieces()
                .iter()
                .filter(|(p, _)| !SPECIALS.contains(&p.as_str()))
                .take(target - SPECIALS.len())
                .map(|(p, f)| (p.clone(), (*f).max(1))),
        );
        Ok(Self::from_entries(entries))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.entries.get(id as usize).map(|(t, _)| t.as_str())
    }

    /// Training frequency; 0 for specials and unknown tokens.
    pub fn frequency(&self, token: &str) -> u64 {
        self.id(token).map_or(0, |id| self.entries[id as usize].1)
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn encode_ids<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<u32> {
        tokens
            .iter()
            .map(|t| self.id(t.as_ref()).unwrap_or(UNK_ID))
            .collect()
    }

    pub fn decode_ids(&self, ids: &[u32]) -> Result<Vec<String>, VocabError> {
        ids.iter()
            .map(|&id| {
                self.token(id)
                    .map(str::to_owned)
                    .ok_or(VocabError::IdOutOfRange {
                        id,
                        size: self.len(),
                    })
            })
            .collect()
    }

    pub fn write_to<W: Write>(&self, mut writer: W) -> io::Result<()> {
        for (token, freq) in &self.entries {
            writeln!(writer, "{token}\t{freq}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self, VocabError> {
        let mut entries = Vec::new();
        let mut seen = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let parse = |reason: String| VocabError::Parse {
                line: i + 1,
                reason,
            };
            let (token, freq) = line
                .split_once('\t')
                .ok_or_else(|| parse("expected `token<TAB>frequency`".into()))?;
            let freq: u64 = freq
                .parse()
                .map_err(|_| parse(format!("bad frequency {freq:?}")))?;
            if token.is_empty() {
                return Err(parse("empty token".into()));
            }
            if let Some(&special) = SPECIALS.get(i) {
                if token != special {
                    return Err(parse(format!("expected reserved token {special:?}")));
                }
            } else if freq == 0 {
                return Err(parse(format!("token {token:?} has zero frequency")));
            }
            if seen.insert(token.to_owned(), i).is_some() {
                return Err(parse(format!("duplicate token {token:?}")));
            }
            entries.push((token.to_owned(), freq));
        }
        if entries.len() < SPECIALS.len() {
            return Err(VocabError::Parse {
                line: entries.len() + 1,
                reason: "missing reserved tokens".into(),
            });
        }
        Ok(Self::from_entries(entries))
    }

    pub fn save(&self, path: &Path) -> Result<(), VocabError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, VocabError> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}
