//! Assembling tagged sentences into ~N-token chunks and balancing datasets.
//!
//! Chunks are built greedily from whole sentences: a partition of sentences
//! is consumed in order and a chunk is emitted as soon as it reaches the
//! configured token count, so every emitted chunk holds between
//! `size_tokens` and `size_tokens + longest sentence - 1` tokens. The final
//! partial chunk is dropped by default.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::LanguagePair;
use crate::error::{Error, Result};
use crate::seed::rng_from;
use crate::text::TaggedSentence;

/// Direction of the English side: authored in English (`Original`) or
/// translated into English (`Translated`). Encoded as 0/1 in datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DirectionLabel {
    Original,
    Translated,
}

impl DirectionLabel {
    /// Label of a sentence: `Original` iff it was authored in English.
    pub fn of(sentence: &TaggedSentence) -> Self {
        if sentence.is_original_english() {
            DirectionLabel::Original
        } else {
            DirectionLabel::Translated
        }
    }

    pub fn as_char(&self) -> char {
        match self {
            DirectionLabel::Original => 'O',
            DirectionLabel::Translated => 'T',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'O' => Ok(DirectionLabel::Original),
            'T' => Ok(DirectionLabel::Translated),
            other => Err(Error::Data(format!("unknown direction label {other:?}"))),
        }
    }

    /// Class index used in feature datasets: original 0, translated 1.
    pub fn as_index(&self) -> u8 {
        match self {
            DirectionLabel::Original => 0,
            DirectionLabel::Translated => 1,
        }
    }

    pub fn from_index(value: u8) -> Result<Self> {
        match value {
            0 => Ok(DirectionLabel::Original),
            1 => Ok(DirectionLabel::Translated),
            other => Err(Error::Data(format!("unknown class index {other}"))),
        }
    }
}

/// How sentences are grouped before chunking: per pair (`Homogeneous`) or
/// across pairs after pooling (`Pooled`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChunkingMode {
    Homogeneous,
    Pooled,
}

#[derive(Debug, Clone)]
pub struct ChunkingConfig {
    pub size_tokens: usize,
    pub mode: ChunkingMode,
    pub seed: u64,
    pub drop_partial_final: bool,
}

impl Default for ChunkingConfig {
    fn default() -> Self {
        ChunkingConfig {
            size_tokens: 2000,
            mode: ChunkingMode::Homogeneous,
            seed: 0,
            drop_partial_final: true,
        }
    }
}

/// Provenance of a pooled chunk.
pub const POOLED_PROVENANCE: &str = "pooled";

/// A block of whole sentences sharing one direction label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub sentences: Vec<TaggedSentence>,
    pub label: DirectionLabel,
    pub token_count: usize,
    /// Pair code (`"fr-en"`) for homogeneous chunks, `"pooled"` otherwise.
    pub provenance: String,
}

/// Greedily assemble chunks from labeled sentences.
///
/// In homogeneous mode sentences are partitioned by (pair, label) and kept
/// in input order; in pooled mode they are partitioned by label only (the
/// caller pools and shuffles them first, see [`shuffle_pool`]). No sentence
/// appears in two chunks; with `drop_partial_final` a trailing partial chunk
/// is discarded.
pub fn build_chunks(sentences: Vec<TaggedSentence>, config: &ChunkingConfig) -> Vec<Chunk> {
    let mut partitions: BTreeMap<(String, DirectionLabel), Vec<TaggedSentence>> = BTreeMap::new();
    for sentence in sentences {
        let label = DirectionLabel::of(&sentence);
        let key = match config.mode {
            ChunkingMode::Homogeneous => (sentence.pair.code(), label),
            ChunkingMode::Pooled => (POOLED_PROVENANCE.to_string(), label),
        };
        partitions.entry(key).or_default().push(sentence);
    }

    let mut chunks = Vec::new();
    for ((provenance, label), partition) in partitions {
        let mut current = Vec::new();
        let mut tokens = 0usize;
        for sentence in partition {
            tokens += sentence.token_count();
            current.push(sentence);
            if tokens >= config.size_tokens {
                chunks.push(Chunk {
                    sentences: std::mem::take(&mut current),
                    label,
                    token_count: tokens,
                    provenance: provenance.clone(),
                });
                tokens = 0;
            }
        }
        if !current.is_empty() && !config.drop_partial_final {
            chunks.push(Chunk { sentences: current, label, token_count: tokens, provenance });
        }
    }
    chunks
}

/// Pool per-pair sentence lists of one direction label into a single list
/// and apply a seeded uniform permutation. Sentences whose label differs
/// from `label` are skipped. With `dedup`, textually identical sentences
/// (same token sequence) keep only their first occurrence before shuffling.
pub fn shuffle_pool(
    corpora: Vec<Vec<TaggedSentence>>,
    label: DirectionLabel,
    seed: u64,
    dedup: bool,
) -> Vec<TaggedSentence> {
    let mut pooled: Vec<TaggedSentence> = corpora
        .into_iter()
        .flatten()
        .filter(|s| DirectionLabel::of(s) == label)
        .collect();
    if dedup {
        let mut seen = std::collections::HashSet::new();
        pooled.retain(|s| seen.insert(s.tokens.join(" ")));
    }
    let mut rng = rng_from(seed);
    pooled.shuffle(&mut rng);
    pooled
}

/// Balance chunks by class: the minority class is kept whole and a seeded
/// uniform subset of the majority class of the same size is drawn; the
/// result is shuffled. Errors when either class is empty.
pub fn balance(chunks: Vec<Chunk>, seed: u64) -> Result<Vec<Chunk>> {
    let (translated, original): (Vec<Chunk>, Vec<Chunk>) = chunks
        .into_iter()
        .partition(|c| c.label == DirectionLabel::Translated);
    if translated.is_empty() || original.is_empty() {
        return Err(Error::Config(
            "cannot balance a dataset with an empty class".into(),
        ));
    }

    let mut rng = rng_from(seed);
    let (minority, mut majority) = if translated.len() <= original.len() {
        (translated, original)
    } else {
        (original, translated)
    };
    let target = minority.len();
    majority.shuffle(&mut rng);
    majority.truncate(target);

    let mut balanced = minority;
    balanced.extend(majority);
    balanced.shuffle(&mut rng);
    Ok(balanced)
}

/// Write chunks as JSON lines:
/// `{"label":"O","pair":"fr-en","n":2003,"sentences":[{"tokens":[...],"tags":[...]},...]}`.
pub fn write_chunks(path: &Path, chunks: &[Chunk]) -> Result<()> {
    #[derive(Serialize)]
    struct SentenceRepr<'a> {
        tokens: &'a [String],
        tags: &'a [String],
    }
    #[derive(Serialize)]
    struct ChunkRepr<'a> {
        label: char,
        pair: &'a str,
        n: usize,
        sentences: Vec<SentenceRepr<'a>>,
    }

    let mut out = String::new();
    for chunk in chunks {
        let repr = ChunkRepr {
            label: chunk.label.as_char(),
            pair: &chunk.provenance,
            n: chunk.token_count,
            sentences: chunk
                .sentences
                .iter()
                .map(|s| SentenceRepr { tokens: &s.tokens, tags: &s.tags })
                .collect(),
        };
        out.push_str(&serde_json::to_string(&repr).expect("chunk serialize"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read a chunk file. Per-sentence origin and pair are not stored in the
/// file; they are reconstructed from the chunk label and provenance (pooled
/// translated sentences get the placeholder origin `"xx"`).
pub fn read_chunks(path: &Path) -> Result<Vec<Chunk>> {
    #[derive(Deserialize)]
    struct SentenceRepr {
        tokens: Vec<String>,
        tags: Vec<String>,
    }
    #[derive(Deserialize)]
    struct ChunkRepr {
        label: char,
        pair: String,
        n: usize,
        sentences: Vec<SentenceRepr>,
    }

    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut chunks = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let at_line = |e: String| Error::Data(format!("{}: line {}: {e}", path.display(), idx + 1));
        let repr: ChunkRepr =
            serde_json::from_str(&line).map_err(|e| at_line(e.to_string()))?;
        let label = DirectionLabel::from_char(repr.label).map_err(|e| at_line(e.to_string()))?;

        let pair = if repr.pair == POOLED_PROVENANCE {
            LanguagePair::new("xx").expect("placeholder pair")
        } else {
            LanguagePair::parse_code(&repr.pair).map_err(|e| at_line(e.to_string()))?
        };
        let origin = match label {
            DirectionLabel::Original => "en".to_string(),
            DirectionLabel::Translated => pair.foreign().to_string(),
        };

        let mut sentences = Vec::with_capacity(repr.sentences.len());
        let mut token_count = 0usize;
        for s in repr.sentences {
            token_count += s.tokens.len();
            sentences.push(
                TaggedSentence::new(s.tokens, s.tags, origin.clone(), pair.clone())
                    .map_err(|e| at_line(e.to_string()))?,
            );
        }
        if token_count != repr.n {
            return Err(at_line(format!(
                "declared n={} but sentences hold {token_count} tokens",
                repr.n
            )));
        }
        chunks.push(Chunk { sentences, label, token_count, provenance: repr.pair });
    }
    Ok(chunks)
}
