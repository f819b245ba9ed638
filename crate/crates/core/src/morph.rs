//! Morpheme segmentation with restored whitespace.
//!
//! Analyzers that print morphemes separated by spaces ("wakati" output) lose
//! the original spacing. [`align_wakati`] walks the morphemes against the
//! source sentence and puts a `⭑` unit wherever a space was skipped. A small
//! longest-match dictionary analyzer is included for hermetic use.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;
use std::process::{Command, Stdio};

use thiserror::Error;

use crate::markers::{normalize_whitespace, SPACE_MARKER_STR};

#[derive(Debug, Error)]
pub enum MorphError {
    #[error(
        "analyzer output does not align with source at char offset {offset}: expected {expected:?}"
    )]
    Misaligned { offset: usize, expected: String },
    #[error("analyzer output ends before the source at char offset {offset}")]
    Unconsumed { offset: usize },
    #[error("invalid segmentation: {0}")]
    InvalidSegmentation(&'static str),
    #[error("morpheme dictionary is empty")]
    EmptyDictionary,
    #[error("dictionary line {line}: {reason}")]
    InvalidEntry { line: usize, reason: &'static str },
    #[error("no analysis available for sentence {0:?}")]
    MissingAnalysis(String),
    #[error("wakati file has {wakati} lines but input has {input}")]
    LineCountMismatch { input: usize, wakati: usize },
    #[error("external analyzer failed: {0}")]
    Command(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Morphemes of one sentence in order, with `⭑` where the source had a space.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MorphSegmentation {
    units: Vec<String>,
}

impl MorphSegmentation {
    /// Validates that no unit is empty or contains whitespace and that `⭑`
    /// only ever separates two morphemes.
    pub fn new(units: Vec<String>) -> Result<Self, MorphError> {
        let mut prev_marker = true;
        for unit in &units {
            if unit.is_empty() {
                return Err(MorphError::InvalidSegmentation("empty unit"));
            }
            if unit.contains(char::is_whitespace) {
                return Err(MorphError::InvalidSegmentation("unit contains whitespace"));
            }
            let marker = unit == SPACE_MARKER_STR;
            if marker && prev_marker {
                return Err(MorphError::InvalidSegmentation("misplaced space marker"));
            }
            prev_marker = marker;
        }
        if prev_marker && !units.is_empty() {
            return Err(MorphError::InvalidSegmentation("trailing space marker"));
        }
        Ok(MorphSegmentation { units })
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn into_units(self) -> Vec<String> {
        self.units
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Units other than the space marker.
    pub fn morphemes(&self) -> impl Iterator<Item = &str> {
        self.units
            .iter()
            .map(String::as_str)
            .filter(|u| *u != SPACE_MARKER_STR)
    }

    /// The sentence this segmentation was taken from.
    pub fn to_text(&self) -> String {
        self.units
            .iter()
            .map(|u| {
                if u == SPACE_MARKER_STR {
                    " "
                } else {
                    u.as_str()
                }
            })
            .collect()
    }
}

/// Align one line of space-separated analyzer output with its source sentence.
pub fn align_wakati(source: &str, analyzer_output: &str) -> Result<MorphSegmentation, MorphError> {
    let text = normalize_whitespace(source);
    let mut rest = text.as_str();
    let mut offset = 0;
    let mut units = Vec::new();
    for morpheme in analyzer_output.split_whitespace() {
        if let Some(after) = rest.strip_prefix(' ') {
            rest = after;
            offset += 1;
            units.push(SPACE_MARKER_STR.to_owned());
        }
        match rest.strip_prefix(morpheme) {
            Some(after) => {
                rest = after;
                offset += morpheme.chars().count();
                units.push(morpheme.to_owned());
            }
            None => {
                return Err(MorphError::Misaligned {
                    offset,
                    expected: morpheme.to_owned(),
                });
            }
        }
    }
    if !rest.is_empty() {
        return Err(MorphError::Unconsumed { offset });
    }
    MorphSegmentation::new(units)
}

/// Known morphemes for longest-prefix segmentation.
#[derive(Debug, Clone)]
pub struct MorphDictionary {
    entries: HashSet<String>,
    max_len: usize,
}

impl MorphDictionary {
    pub fn new<I, S>(entries: I) -> Result<Self, MorphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = HashSet::new();
        for (i, entry) in entries.into_iter().enumerate() {
            let entry = entry.into();
            check_entry(&entry, i + 1)?;
            set.insert(entry);
        }
        Self::from_set(set)
    }

    fn from_set(entries: HashSet<String>) -> Result<Self, MorphError> {
        if entries.is_empty() {
            return Err(MorphError::EmptyDictionary);
        }
        let max_len = entries.iter().map(|e| e.chars().count()).max().unwrap_or(0);
        Ok(MorphDictionary { entries, max_len })
    }

    /// One morpheme per line; blank lines are skipped.
    pub fn read_from<R: BufRead>(reader: R) -> Result<Self, MorphError> {
        let mut set = HashSet::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            check_entry(&line, i + 1)?;
            set.insert(line);
        }
        Self::from_set(set)
    }

    pub fn load(path: &Path) -> Result<Self, MorphError> {
        Self::read_from(BufReader::new(File::open(path)?))
    }

    /// Entries sorted, one per line.
    pub fn write_to<W: Write>(&self, mut writer: W) -> io::Result<()> {
        let mut sorted: Vec<&String> = self.entries.iter().collect();
        sorted.sort();
        for entry in sorted {
            writeln!(writer, "{entry}")?;
        }
        Ok(())
    }

    pub fn contains(&self, morpheme: &str) -> bool {
        self.entries.contains(morpheme)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }
}

fn check_entry(entry: &str, line: usize) -> Result<(), MorphError> {
    if entry.is_empty() {
        return Err(MorphError::InvalidEntry {
            line,
            reason: "empty entry",
        });
    }
    if entry.contains(char::is_whitespace) {
        return Err(MorphError::InvalidEntry {
            line,
            reason: "entry contains whitespace",
        });
    }
    Ok(())
}

/// Greedy longest-prefix segmentation of each space-delimited chunk.
/// Characters with no dictionary prefix become one-character morphemes.
pub fn segment_longest_match(text: &str, dict: &MorphDictionary) -> MorphSegmentation {
    let text = normalize_whitespace(text);
    let mut units = Vec::new();
    for (i, chunk) in text.split(' ').filter(|c| !c.is_empty()).enumerate() {
        if i > 0 {
            units.push(SPACE_MARKER_STR.to_owned());
        }
        let bounds: Vec<usize> = chunk
            .char_indices()
            .map(|(b, _)| b)
            .chain(std::iter::once(chunk.len()))
            .collect();
        let mut start = 0;
        while start + 1 < bounds.len() {
            let longest = (bounds.len() - 1 - start).min(dict.max_len);
            let take = (1..=longest)
                .rev()
                .find(|&n| dict.contains(&chunk[bounds[start]..bounds[start + n]]))
                .unwrap_or(1);
            units.push(chunk[bounds[start]..bounds[start + take]].to_owned());
            start += take;
        }
    }
    MorphSegmentation { units }
}

/// Anything that can segment a sentence into morphemes.
pub trait MorphAnalyzer: Send + Sync + std::fmt::Debug {
    fn segment(&self, sentence: &str) -> Result<MorphSegmentation, MorphError>;
}

impl MorphAnalyzer for MorphDictionary {
    fn segment(&self, sentence: &str) -> Result<MorphSegmentation, MorphError> {
        Ok(segment_longest_match(sentence, self))
    }
}

/// Precomputed analyzer output, looked up by normalized sentence.
#[derive(Debug, Clone, Default)]
pub struct WakatiTable {
    analyses: HashMap<String, String>,
}

impl WakatiTable {
    /// Pair each input line with the wakati line at the same index. When a
    /// sentence repeats, the first analysis wins.
    pub fn from_parallel<S, T>(sources: &[S], wakati: &[T]) -> Result<Self, MorphError>
    where
        S: AsRef<str>,
        T: AsRef<str>,
    {
        if sources.len() != wakati.len() {
            return Err(MorphError::LineCountMismatch {
                input: sources.len(),
                wakati: wakati.len(),
            });
        }
        let mut analyses = HashMap::with_capacity(sources.len());
        for (src, out) in sources.iter().zip(wakati) {
            analyses
                .entry(normalize_whitespace(src.as_ref()))
                .or_insert_with(|| out.as_ref().to_owned());
        }
        Ok(WakatiTable { analyses })
    }

    pub fn len(&self) -> usize {
        self.analyses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.analyses.is_empty()
    }
}

impl MorphAnalyzer for WakatiTable {
    fn segment(&self, sentence: &str) -> Result<MorphSegmentation, MorphError> {
        let key = normalize_whitespace(sentence);
        if key.is_empty() {
            return Ok(MorphSegmentation::default());
        }
        let out = self
            .analyses
            .get(&key)
            .ok_or_else(|| MorphError::MissingAnalysis(key.clone()))?;
        align_wakati(&key, out)
    }
}

/// Runs an external wakati-style analyzer (e.g. `mecab -O wakati`) through
/// `sh -c`, feeding one sentence per line on stdin.
#[derive(Debug, Clone)]
pub struct ExternalAnalyzer {
    command: String,
}

impl ExternalAnalyzer {
    pub fn new(command: impl Into<String>) -> Self {
        ExternalAnalyzer {
            command: command.into(),
        }
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    /// Analyze all lines in one process run; output is line-parallel to input.
    pub fn analyze_lines<S: AsRef<str>>(&self, lines: &[S]) -> Result<Vec<String>, MorphError> {
        let mut input = String::new();
        for line in lines {
            input.push_str(&normalize_whitespace(line.as_ref()));
            input.push('\n');
        }
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let mut stdout = String::new();
        child
            .stdout
            .take()
            .expect("piped stdout")
            .read_to_string(&mut stdout)?;
        let output = child.wait_with_output()?;
        let written = writer
            .join()
            .map_err(|_| MorphError::Command("stdin writer panicked".into()))?;
        if !output.status.success() {
            return Err(MorphError::Command(format!(
                "`{}` exited with {}: {}",
                self.command,
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        written?;
        // wakati lines usually carry a trailing space
        let result: Vec<String> = stdout.lines().map(|l| l.trim_end().to_owned()).collect();
        if result.len() != lines.len() {
            return Err(MorphError::LineCountMismatch {
                input: lines.len(),
                wakati: result.len(),
            });
        }
        Ok(result)
    }

    /// Run the analyzer once over `lines` and keep the results as a table.
    pub fn tabulate<S: AsRef<str>>(&self, lines: &[S]) -> Result<WakatiTable, MorphError> {
        let out = self.analyze_lines(lines)?;
        WakatiTable::from_parallel(lines, &out)
    }
}

impl MorphAnalyzer for ExternalAnalyzer {
    fn segment(&self, sentence: &str) -> Result<MorphSegmentation, MorphError> {
        let key = normalize_whitespace(sentence);
        if key.is_empty() {
            return Ok(MorphSegmentation::default());
        }
        let out = self.analyze_lines(&[key.as_str()])?;
        align_wakati(&key, &out[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn units(seg: &MorphSegmentation) -> Vec<&str> {
        seg.units().iter().map(String::as_str).collect()
    }

    #[test]
    fn aligns_example_sentence() {
        let seg = align_wakati("나랑 쇼핑하자.", "나 랑 쇼핑 하 자 .").unwrap();
        assert_eq!(units(&seg), ["나", "랑", "⭑", "쇼핑", "하", "자", "."]);
        assert_eq!(seg.to_text(), "나랑 쇼핑하자.");
    }

    #[test]
    fn aligns_abstract_example() {
        let seg = align_wakati("AB C", "A B C").unwrap();
        assert_eq!(units(&seg), ["A", "B", "⭑", "C"]);
        assert_eq!(units(&align_wakati("abc", "abc").unwrap()), ["abc"]);
    }

    #[test]
    fn alignment_normalizes_source_whitespace() {
        let seg = align_wakati("  AB \t  C ", "A B C").unwrap();
        assert_eq!(units(&seg), ["A", "B", "⭑", "C"]);
    }

    #[test]
    fn alignment_errors() {
        match align_wakati("AB C", "A X C") {
            Err(MorphError::Misaligned { offset, expected }) => {
                assert_eq!(offset, 1);
                assert_eq!(expected, "X");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            align_wakati("AB C", "A B"),
            Err(MorphError::Unconsumed { offset: 2 })
        ));
        assert!(matches!(
            align_wakati("AB", ""),
            Err(MorphError::Unconsumed { offset: 0 })
        ));
        // reordered output
        assert!(align_wakati("AB", "B A").is_err());
    }

    #[test]
    fn longest_match_examples() {
        let dict = MorphDictionary::new(["나", "랑", "쇼핑", "하", "자", "."]).unwrap();
        let seg = segment_longest_match("나랑 쇼핑하자.", &dict);
        assert_eq!(units(&seg), ["나", "랑", "⭑", "쇼핑", "하", "자", "."]);

        let dict = MorphDictionary::new(["ab"]).unwrap();
        assert_eq!(units(&segment_longest_match("xyz", &dict)), ["x", "y", "z"]);

        let dict = MorphDictionary::new(["aa", "ab", "b"]).unwrap();
        assert_eq!(
            units(&segment_longest_match("aab b", &dict)),
            ["aa", "b", "⭑", "b"]
        );
    }

    #[test]
    fn empty_text_segments_to_nothing() {
        let dict = MorphDictionary::new(["a"]).unwrap();
        assert!(segment_longest_match("   ", &dict).is_empty());
    }

    #[test]
    fn dictionary_validation() {
        assert!(matches!(
            MorphDictionary::new(Vec::<String>::new()),
            Err(MorphError::EmptyDictionary)
        ));
        assert!(matches!(
            MorphDictionary::new(["a", "b c"]),
            Err(MorphError::InvalidEntry { line: 2, .. })
        ));
        let dict = MorphDictionary::read_from("가\n\n나다\n".as_bytes()).unwrap();
        assert_eq!(dict.len(), 2);
        assert_eq!(dict.max_len(), 2);
        assert!(matches!(
            MorphDictionary::read_from("가\n나 다\n".as_bytes()),
            Err(MorphError::InvalidEntry { line: 2, .. })
        ));
    }

    #[test]
    fn segmentation_invariants_are_checked() {
        let bad = |u: &[&str]| MorphSegmentation::new(u.iter().map(|s| s.to_string()).collect());
        assert!(bad(&["⭑", "a"]).is_err());
        assert!(bad(&["a", "⭑"]).is_err());
        assert!(bad(&["a", "⭑", "⭑", "b"]).is_err());
        assert!(bad(&["a", ""]).is_err());
        assert!(bad(&["a", "⭑", "b"]).is_ok());
    }

    #[test]
    fn wakati_table_lookup() {
        let table =
            WakatiTable::from_parallel(&["나랑 쇼핑하자."], &["나 랑 쇼핑 하 자 ."]).unwrap();
        let seg = table.segment("나랑  쇼핑하자.").unwrap();
        assert_eq!(seg.morphemes().count(), 6);
        assert!(matches!(
            table.segment("다른 문장"),
            Err(MorphError::MissingAnalysis(_))
        ));
        assert!(WakatiTable::from_parallel(&["a"], &["a", "b"]).is_err());
    }

    #[test]
    fn external_analyzer_round_trips_through_process() {
        // `cat` echoes the sentence, so each space-delimited chunk is one morpheme.
        let analyzer = ExternalAnalyzer::new("cat");
        let seg = analyzer.segment("AB  C").unwrap();
        assert_eq!(units(&seg), ["AB", "⭑", "C"]);
        let out = analyzer.analyze_lines(&["a b", "", "c"]).unwrap();
        assert_eq!(out, ["a b", "", "c"]);

        // splits every character, like a maximally fine analyzer
        let chars = ExternalAnalyzer::new("sed -e 's/\\(.\\)/\\1 /g'");
        let seg = chars.segment("ab c").unwrap();
        assert_eq!(units(&seg), ["a", "b", "⭑", "c"]);

        assert!(matches!(
            ExternalAnalyzer::new("exit 3").analyze_lines(&["a"]),
            Err(MorphError::Command(_))
        ));
    }
}
