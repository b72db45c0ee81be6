//! Pretrained word-embedding models: text-format loaders, vocabulary
//! reduction, tokenization and sentence bags.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Text formats for pretrained embedding files.
///
/// Both store one `<token> <f1> ... <fd>` row per word; the word2vec flavour
/// is preceded by a `<count> <dim>` header line, the GloVe flavour is not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingFormat {
    Word2VecText,
    GloveText,
}

/// Ordered token list with reverse lookup. Row order follows the source file,
/// which for published models encodes descending corpus frequency.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from unique tokens. Duplicates are an error here;
    /// the file loaders deduplicate before calling this.
    pub fn new(words: Vec<String>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::InvalidParameter(
                "vocabulary must contain at least one token".into(),
            ));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate token in vocabulary: {w:?}"
                )));
            }
        }
        Ok(Vocabulary { words, index })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn word(&self, i: usize) -> &str {
        &self.words[i]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// A vocabulary plus its row-major embedding matrix (one row per word).
#[derive(Debug, Clone)]
pub struct WordEmbeddingModel {
    vocab: Vocabulary,
    matrix: Matrix,
    source: String,
}

impl WordEmbeddingModel {
    pub fn new(vocab: Vocabulary, matrix: Matrix) -> Result<Self> {
        if matrix.rows() != vocab.len() {
            return Err(Error::DimensionMismatch {
                expected: vocab.len(),
                found: matrix.rows(),
            });
        }
        if matrix.cols() == 0 {
            return Err(Error::InvalidParameter(
                "embedding dimension must be positive".into(),
            ));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidParameter(
                "embedding matrix contains non-finite values".into(),
            ));
        }
        Ok(WordEmbeddingModel {
            vocab,
            matrix,
            source: "full".into(),
        })
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Which vocabulary subset this model represents ("full", "top_n(50000)", ...).
    pub fn source(&self) -> &str {
        &self.source
    }

    /// The embedding row for a word, or `None` when out of vocabulary.
    pub fn lookup(&self, word: &str) -> Option<&[f64]> {
        self.vocab.get(word).map(|i| self.matrix.row(i))
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.matrix.row(i)
    }
}

/// Counters reported by the file loaders.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    /// Rows dropped because their token already appeared (first one wins).
    pub duplicate_tokens: usize,
}

/// Reads an embedding model from a text file.
pub fn load_embeddings(
    path: &Path,
    format: EmbeddingFormat,
) -> Result<(WordEmbeddingModel, LoadStats)> {
    let file = File::open(path)?;
    read_embeddings(BufReader::new(file), format)
}

/// Reads an embedding model from any buffered reader.
pub fn read_embeddings<R: BufRead>(
    reader: R,
    format: EmbeddingFormat,
) -> Result<(WordEmbeddingModel, LoadStats)> {
    let mut lines = reader.lines().enumerate();

    let mut declared: Option<(usize, usize)> = None;
    if format == EmbeddingFormat::Word2VecText {
        let (_, line) = lines
            .next()
            .ok_or_else(|| Error::Format("missing header line".into()))?;
        let line = line?;
        let mut fields = line.split_whitespace();
        let count = fields
            .next()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::Format(format!("bad header line: {line:?}")))?;
        let dim = fields
            .next()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::Format(format!("bad header line: {line:?}")))?;
        if fields.next().is_some() {
            return Err(Error::Format(format!("bad header line: {line:?}")));
        }
        declared = Some((count, dim));
    }

    let mut dim = declared.map(|(_, d)| d);
    let mut words: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut data: Vec<f64> = Vec::new();
    let mut rows_seen = 0usize;
    let mut stats = LoadStats::default();

    for (i, line) in lines {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let token = fields.next().expect("non-empty line has a first field");
        let components: Vec<&str> = fields.collect();

        let d = match dim {
            Some(d) => d,
            None => {
                if components.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "row has no embedding components".into(),
                    });
                }
                dim = Some(components.len());
                components.len()
            }
        };
        if components.len() != d {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} components, found {}", d, components.len()),
            });
        }

        rows_seen += 1;
        let mut row = Vec::with_capacity(d);
        for field in &components {
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid float {field:?}"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-finite value {field:?}"),
                });
            }
            row.push(value);
        }

        // First occurrence wins; later duplicates are validated but dropped.
        if index.contains_key(token) {
            stats.duplicate_tokens += 1;
            continue;
        }
        data.extend_from_slice(&row);
        index.insert(token.to_string(), words.len());
        words.push(token.to_string());
    }

    if let Some((count, _)) = declared {
        if rows_seen != count {
            return Err(Error::Format(format!(
                "header declares {count} rows, file contains {rows_seen}"
            )));
        }
    }
    if words.is_empty() {
        return Err(Error::Format("no embedding rows found".into()));
    }

    let d = dim.expect("dimension known after first row");
    let matrix = Matrix::from_vec(words.len(), d, data);
    let model = WordEmbeddingModel::new(Vocabulary::new(words)?, matrix)?;
    Ok((model, stats))
}

/// Writes a model back out in one of the text formats.
pub fn write_embeddings<W: Write>(
    model: &WordEmbeddingModel,
    writer: &mut W,
    format: EmbeddingFormat,
) -> Result<()> {
    if format == EmbeddingFormat::Word2VecText {
        writeln!(writer, "{} {}", model.vocab().len(), model.dim())?;
    }
    for (i, word) in model.vocab().words().iter().enumerate() {
        write!(writer, "{word}")?;
        for v in model.row(i) {
            write!(writer, " {v}")?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

pub fn save_embeddings(
    model: &WordEmbeddingModel,
    path: &Path,
    format: EmbeddingFormat,
) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    write_embeddings(model, &mut writer, format)
}

/// Vocabulary-reduction policies.
#[derive(Debug, Clone)]
pub enum ReducePolicy {
    /// Keep the first `n` rows; file order encodes frequency rank.
    TopN(usize),
    /// Keep rows whose token appears in a one-token-per-line file.
    WordList(std::path::PathBuf),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReduceStats {
    /// `top_n` asked for more rows than the model has.
    pub clamped: bool,
    /// Distinct word-list entries absent from the vocabulary.
    pub unmatched_list_entries: usize,
}

/// Produces a reduced model containing a subset of the rows, in source order.
pub fn reduce_vocabulary(
    model: &WordEmbeddingModel,
    policy: &ReducePolicy,
) -> Result<(WordEmbeddingModel, ReduceStats)> {
    let mut stats = ReduceStats::default();
    let (kept, source): (Vec<usize>, String) = match policy {
        ReducePolicy::TopN(n) => {
            if *n == 0 {
                return Err(Error::InvalidParameter("top_n requires n >= 1".into()));
            }
            let keep = (*n).min(model.vocab().len());
            stats.clamped = *n > model.vocab().len();
            ((0..keep).collect(), format!("top_n({keep})"))
        }
        ReducePolicy::WordList(path) => {
            let list = read_word_list(path)?;
            let kept: Vec<usize> = (0..model.vocab().len())
                .filter(|&i| list.contains(model.vocab().word(i)))
                .collect();
            if kept.is_empty() {
                return Err(Error::InvalidParameter(
                    "word list shares no tokens with the vocabulary".into(),
                ));
            }
            stats.unmatched_list_entries =
                list.iter().filter(|w| !model.vocab().contains(w)).count();
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            (kept, format!("word_list({name})"))
        }
    };

    let words: Vec<String> = kept
        .iter()
        .map(|&i| model.vocab().word(i).to_string())
        .collect();
    let matrix = model.matrix().select_rows(&kept);
    let reduced = WordEmbeddingModel::new(Vocabulary::new(words)?, matrix)?.with_source(source);
    Ok((reduced, stats))
}

/// One UTF-8 token per line; blank lines skipped.
pub fn read_word_list(path: &Path) -> Result<HashSet<String>> {
    let file = File::open(path)?;
    let mut set = HashSet::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        let token = line.trim();
        if !token.is_empty() {
            set.insert(token.to_string());
        }
    }
    Ok(set)
}

fn is_edge_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || ('\u{2010}'..='\u{2027}').contains(&c)
        || ('\u{2030}'..='\u{205E}').contains(&c)
        || ('\u{2E00}'..='\u{2E7F}').contains(&c)
        || matches!(c, '«' | '»' | '¡' | '¿' | '·')
}

/// Lowercases, splits on Unicode whitespace, strips leading/trailing
/// punctuation from each token and drops tokens that end up empty.
/// Internal punctuation ("don't") is preserved.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split_whitespace()
        .filter_map(|raw| {
            let token = raw.trim_matches(is_edge_punct);
            if token.is_empty() {
                None
            } else {
                Some(token.to_string())
            }
        })
        .collect()
}

/// Sparse multiset of in-vocabulary word indices. Out-of-vocabulary tokens
/// only bump `oov_count`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentenceBag {
    entries: BTreeMap<usize, usize>,
    oov_count: usize,
}

impl SentenceBag {
    /// `(word index, count)` pairs in ascending index order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().map(|(&i, &c)| (i, c))
    }

    pub fn word_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn count(&self, index: usize) -> usize {
        self.entries.get(&index).copied().unwrap_or(0)
    }

    pub fn distinct_words(&self) -> usize {
        self.entries.len()
    }

    pub fn total_count(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn oov_count(&self) -> usize {
        self.oov_count
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Counts in-vocabulary token occurrences.
pub fn bag_of_words<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> SentenceBag {
    let mut bag = SentenceBag::default();
    for token in tokens {
        match vocab.get(token.as_ref()) {
            Some(i) => *bag.entries.entry(i).or_insert(0) += 1,
            None => bag.oov_count += 1,
        }
    }
    bag
}
