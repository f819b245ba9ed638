//! File-level train / encode / decode / stats pipelines behind the CLI.
//!
//! A model directory holds, depending on the strategy:
//!
//! ```text
//! config.json   strategy, vocab size, where morphemes come from
//! vocab.tsv     token<TAB>frequency, line index = id
//! merges.txt    BPE merges, one `left right` per line (subword kinds)
//! pieces.tsv    BPE pieces, `piece<TAB>frequency` (subword kinds)
//! morph.dict    morpheme dictionary, when trained with one
//! ```
//!
//! All text is UTF-8 with `\n` line endings, one sentence per line.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bpe::{self, BpeModel, MergeRule};
use crate::error::{Error, Result};
use crate::markers::{normalize_whitespace, WORD_MARKER};
use crate::morph::{
    ExternalAnalyzer, MorphAnalyzer, MorphDictionary, MorphSegmentation, WakatiTable,
};
use crate::stats::{self, FrequencyTable, ReportInput};
use crate::strategy::{detokenize, Strategy, StrategyKind, TokenSequence};
use crate::vocab::{self, Vocabulary, SPECIALS};
use crate::CorpusReport;

pub const CONFIG_FILE: &str = "config.json";
pub const MORPH_DICT_FILE: &str = "morph.dict";

/// Where morpheme segmentations come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphSource {
    /// Longest-match over a one-morpheme-per-line dictionary.
    Dictionary(PathBuf),
    /// Analyzer output, line-parallel to the command's input.
    Wakati(PathBuf),
    /// Shell command reading sentences on stdin and printing wakati lines.
    Command(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoredMorph {
    Dictionary,
    Wakati,
    Command(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub strategy: StrategyKind,
    pub vocab_size: usize,
    pub morph: Option<StoredMorph>,
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub strategy: Option<StrategyKind>,
    pub vocab_size: Option<usize>,
    pub model: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub morph: Option<MorphSource>,
    pub report: Option<PathBuf>,
    pub curve_csv: Option<PathBuf>,
    /// Raw training text; gives the under-trained curve exact training counts.
    pub train: Option<PathBuf>,
    pub max_n: Option<u32>,
}

impl RunConfig {
    fn require<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
        value
            .as_ref()
            .ok_or_else(|| Error::Config(format!("{flag} is required")))
    }

    fn check_distinct(&self) -> Result<()> {
        if let (Some(i), Some(o)) = (&self.input, &self.output) {
            if i == o {
                return Err(Error::Config("--input and --output must differ".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub strategy: StrategyKind,
    pub vocab_len: usize,
    /// Number of BPE pieces, for subword strategies.
    pub pieces: Option<usize>,
    pub top_merges: Vec<MergeRule>,
    pub top_tokens: Vec<(String, u64)>,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::File {
        path: path.to_owned(),
        source,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::File {
            path: path.to_owned(),
            source,
        })
}

pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for line in BufReader::new(open(path)?).lines() {
        lines.push(line?);
    }
    Ok(lines)
}

fn write_lines<I, S>(path: Option<&Path>, lines: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out: Box<dyn Write> = match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    for line in lines {
        out.write_all(line.as_ref().as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Build an analyzer for `lines` from an explicit source.
fn analyzer_from_source(source: &MorphSource, lines: &[String]) -> Result<Arc<dyn MorphAnalyzer>> {
    Ok(match source {
        MorphSource::Dictionary(path) => {
            Arc::new(MorphDictionary::read_from(BufReader::new(open(path)?))?)
        }
        MorphSource::Wakati(path) => {
            Arc::new(WakatiTable::from_parallel(lines, &read_lines(path)?)?)
        }
        // one process run for the whole input
        MorphSource::Command(cmd) => Arc::new(ExternalAnalyzer::new(cmd).tabulate(lines)?),
    })
}

/// Analyzer for a trained model: an explicit source wins, otherwise whatever
/// the model was trained with.
fn model_analyzer(
    dir: &Path,
    config: &ModelConfig,
    source: Option<&MorphSource>,
    lines: &[String],
) -> Result<Option<Arc<dyn MorphAnalyzer>>> {
    if let Some(source) = source {
        return analyzer_from_source(source, lines).map(Some);
    }
    match &config.morph {
        None => Ok(None),
        Some(StoredMorph::Dictionary) => {
            let path = dir.join(MORPH_DICT_FILE);
            Ok(Some(Arc::new(MorphDictionary::read_from(BufReader::new(
                open(&path)?,
            ))?)))
        }
        Some(StoredMorph::Command(cmd)) => {
            Ok(Some(Arc::new(ExternalAnalyzer::new(cmd).tabulate(lines)?)))
        }
        Some(StoredMorph::Wakati) if config.strategy.needs_morph() => Err(Error::Config(
            "model was trained from a wakati file; pass --wakati for this input".into(),
        )),
        Some(StoredMorph::Wakati) => Ok(None),
    }
}

pub fn load_model_config(dir: &Path) -> Result<ModelConfig> {
    let path = dir.join(CONFIG_FILE);
    serde_json::from_reader(BufReader::new(open(&path)?))
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Reconstruct the strategy stored in `dir` for tokenizing `lines`.
pub fn load_strategy(
    dir: &Path,
    source: Option<&MorphSource>,
    lines: &[String],
) -> Result<Strategy> {
    let config = load_model_config(dir)?;
    let bpe = if config.strategy.needs_bpe() {
        for file in [bpe::MERGES_FILE, bpe::PIECES_FILE] {
            open(&dir.join(file))?;
        }
        Some(Arc::new(BpeModel::load(dir)?))
    } else {
        None
    };
    let morph = model_analyzer(dir, &config, source, lines)?;
    Ok(Strategy::new(config.strategy, bpe, morph)?)
}

fn normalized(lines: Vec<String>) -> Vec<String> {
    lines.iter().map(|l| normalize_whitespace(l)).collect()
}

fn tokenize_all(strategy: &Strategy, lines: &[String]) -> Result<Vec<TokenSequence>> {
    lines
        .iter()
        .map(|l| strategy.tokenize(l).map_err(Error::from))
        .collect()
}

/// Words (or morphemes, for the hybrid strategy) with their `▁` prefix.
fn bpe_training_words(
    morph: Option<&dyn MorphAnalyzer>,
    lines: &[String],
) -> Result<BTreeMap<String, u64>> {
    let mut words: BTreeMap<String, u64> = BTreeMap::new();
    for line in lines {
        let units: Vec<String> = if let Some(analyzer) = morph {
            analyzer
                .segment(line)?
                .morphemes()
                .map(str::to_owned)
                .collect()
        } else {
            line.split(' ')
                .filter(|w| !w.is_empty())
                .map(str::to_owned)
                .collect()
        };
        for unit in units {
            *words.entry(format!("{WORD_MARKER}{unit}")).or_default() += 1;
        }
    }
    Ok(words)
}

pub fn cmd_train(config: &RunConfig) -> Result<TrainSummary> {
    let kind = *RunConfig::require(&config.strategy, "--strategy")?;
    let vocab_size = *RunConfig::require(&config.vocab_size, "--vocab-size")?;
    let input = RunConfig::require(&config.input, "--input")?;
    let dir = RunConfig::require(&config.model, "--model")?;
    if vocab_size <= SPECIALS.len() {
        return Err(vocab::VocabError::TooSmall {
            target: vocab_size,
            specials: SPECIALS.len(),
        }
        .into());
    }
    if kind.needs_morph() && config.morph.is_none() {
        return Err(Error::Config(format!(
            "{kind} requires one of --morph-dict, --wakati or --morph-cmd"
        )));
    }

    let lines = normalized(read_lines(input)?);
    let morph = match &config.morph {
        Some(source) => Some(analyzer_from_source(source, &lines)?),
        None => None,
    };
    fs::create_dir_all(dir)?;

    let (vocab, model) = if kind.needs_bpe() {
        let analyzer = match kind {
            StrategyKind::MorphemeAwareSubword => morph.as_deref(),
            _ => None,
        };
        let words = bpe_training_words(analyzer, &lines)?;
        // specials come out of the same budget as pieces
        let model = bpe::train_bpe(words, vocab_size - SPECIALS.len())?;
        model.save(dir)?;
        (Vocabulary::from_bpe(&model, vocab_size)?, Some(model))
    } else {
        let strategy = Strategy::new(kind, None, morph)?;
        let tokenized = tokenize_all(&strategy, &lines)?;
        (Vocabulary::build(&tokenized, vocab_size)?, None)
    };
    vocab.save(&dir.join(vocab::VOCAB_FILE))?;

    let stored = match &config.morph {
        None => None,
        Some(MorphSource::Dictionary(path)) => {
            let dict = MorphDictionary::read_from(BufReader::new(open(path)?))?;
            let mut w = create(&dir.join(MORPH_DICT_FILE))?;
            dict.write_to(&mut w)?;
            w.flush()?;
            Some(StoredMorph::Dictionary)
        }
        Some(MorphSource::Wakati(_)) => Some(StoredMorph::Wakati),
        Some(MorphSource::Command(cmd)) => Some(StoredMorph::Command(cmd.clone())),
    };
    let model_config = ModelConfig {
        strategy: kind,
        vocab_size,
        morph: stored,
    };
    let mut w = create(&dir.join(CONFIG_FILE))?;
    serde_json::to_writer_pretty(&mut w, &model_config).map_err(std::io::Error::from)?;
    w.write_all(b"\n")?;
    w.flush()?;

    let mut top_tokens: Vec<(String, u64)> = vocab.entries()[SPECIALS.len()..].to_vec();
    top_tokens.sort_by_key(|t| std::cmp::Reverse(t.1));
    top_tokens.truncate(10);
    Ok(TrainSummary {
        strategy: kind,
        vocab_len: vocab.len(),
        pieces: model.as_ref().map(BpeModel::num_pieces),
        top_merges: model
            .map(|m| m.merges().iter().take(10).cloned().collect())
            .unwrap_or_default(),
        top_tokens,
    })
}

/// Tokenize `--input` line by line into `--output` (stdout if absent).
pub fn cmd_encode(config: &RunConfig) -> Result<usize> {
    config.check_distinct()?;
    let input = RunConfig::require(&config.input, "--input")?;
    let dir = RunConfig::require(&config.model, "--model")?;
    let lines = read_lines(input)?;
    let strategy = load_strategy(dir, config.morph.as_ref(), &normalized(lines.clone()))?;
    if let Some(kind) = config.strategy {
        if kind != strategy.kind() {
            return Err(Error::Config(format!(
                "--strategy {kind} does not match the model's {}",
                strategy.kind()
            )));
        }
    }
    let tokenized = tokenize_all(&strategy, &lines)?;
    write_lines(
        config.output.as_deref(),
        tokenized.iter().map(|t| t.to_string()),
    )?;
    Ok(tokenized.len())
}

/// Detokenize a token file. The strategy comes from `--strategy` or the model.
pub fn cmd_decode(config: &RunConfig) -> Result<usize> {
    config.check_distinct()?;
    let input = RunConfig::require(&config.input, "--input")?;
    let kind = match (config.strategy, &config.model) {
        (Some(kind), _) => kind,
        (None, Some(dir)) => load_model_config(dir)?.strategy,
        (None, None) => return Err(Error::Config("--strategy or --model is required".into())),
    };
    let mut out = Vec::new();
    for line in read_lines(input)? {
        let tokens: Vec<&str> = line.split(' ').filter(|t| !t.is_empty()).collect();
        out.push(detokenize(kind, &tokens)?);
    }
    write_lines(config.output.as_deref(), &out)?;
    Ok(out.len())
}

pub fn compute_report(config: &RunConfig) -> Result<CorpusReport> {
    let input = RunConfig::require(&config.input, "--input")?;
    let dir = RunConfig::require(&config.model, "--model")?;
    let model_config = load_model_config(dir)?;
    let vocab = Vocabulary::read_from(BufReader::new(open(&dir.join(vocab::VOCAB_FILE))?))?;

    let test_lines = normalized(read_lines(input)?);
    let train_lines = match &config.train {
        Some(path) => normalized(read_lines(path)?),
        None => Vec::new(),
    };
    // the analyzer must know every sentence it will be asked about
    let all_lines: Vec<String> = if matches!(config.morph, Some(MorphSource::Wakati(_))) {
        test_lines.clone()
    } else {
        test_lines.iter().chain(&train_lines).cloned().collect()
    };
    let strategy = load_strategy(dir, config.morph.as_ref(), &all_lines)?;
    let test = tokenize_all(&strategy, &test_lines)?;

    let frequencies = if config.train.is_some() {
        if matches!(config.morph, Some(MorphSource::Wakati(_)))
            && model_config.strategy.needs_morph()
        {
            return Err(Error::Config(
                "--train cannot be combined with --wakati".into(),
            ));
        }
        FrequencyTable::count(&tokenize_all(&strategy, &train_lines)?).restrict_to(&vocab)
    } else {
        FrequencyTable::from_vocab(&vocab)
    };

    let segmentations: Option<Vec<MorphSegmentation>> = match strategy.morph() {
        Some(analyzer) => Some(
            test_lines
                .iter()
                .map(|l| analyzer.segment(l))
                .collect::<std::result::Result<_, _>>()?,
        ),
        None => None,
    };

    let report = CorpusReport::compute(
        model_config.strategy,
        ReportInput {
            vocab: &vocab,
            test: &test,
            frequencies: &frequencies,
            segmentations: segmentations.as_deref(),
            max_n: config.max_n.unwrap_or(stats::DEFAULT_MAX_N),
        },
    )?;
    Ok(report)
}

/// Compute the report and write it as JSON to `--report` (stdout if absent),
/// plus the curve as CSV to `--curve-csv` when given.
pub fn cmd_stats(config: &RunConfig) -> Result<CorpusReport> {
    let report = compute_report(config)?;
    write_lines(config.report.as_deref(), [report.to_json()])?;
    if let Some(path) = &config.curve_csv {
        let mut w = create(path)?;
        report.under_trained_curve.write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(report)
}
