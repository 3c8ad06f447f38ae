//! File formats of the text pipeline: the JSON-lines intermediate format for
//! tagged sentences, and the two-column TSV format for tagger training data.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{TaggedExample, TaggedSentence};

/// Load tagged sentences from the JSON-lines intermediate format, one
/// `{"tokens":[...],"tags":[...],"origin":"fr","pair":"fr-en"}` per line.
/// Errors carry the 1-based line number.
pub fn load_pretagged(path: &Path) -> Result<Vec<TaggedSentence>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut sentences = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: TaggedSentence = serde_json::from_str(&line).map_err(|e| {
            Error::Data(format!("{}: line {}: {e}", path.display(), idx + 1))
        })?;
        // Re-validate the length invariant; serde only checks shape.
        TaggedSentence::new(parsed.tokens, parsed.tags, parsed.origin_language, parsed.pair)
            .map(|s| sentences.push(s))
            .map_err(|e| Error::Data(format!("{}: line {}: {e}", path.display(), idx + 1)))?;
    }
    Ok(sentences)
}

/// Write tagged sentences in the JSON-lines intermediate format.
pub fn save_tagged(path: &Path, sentences: &[TaggedSentence]) -> Result<()> {
    let mut out = String::new();
    for sentence in sentences {
        out.push_str(&serde_json::to_string(sentence).expect("tagged sentence serialize"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read a tagger training corpus: two-column TSV (token TAB tag) with a
/// blank line between sentences.
pub fn read_tagger_corpus_tsv(path: &Path) -> Result<Vec<TaggedExample>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut sentences = Vec::new();
    let mut tokens = Vec::new();
    let mut tags = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            if !tokens.is_empty() {
                sentences.push((std::mem::take(&mut tokens), std::mem::take(&mut tags)));
            }
            continue;
        }
        let (token, tag) = line.split_once('\t').ok_or_else(|| {
            Error::Data(format!(
                "{}: line {}: expected \"token<TAB>tag\", got {line:?}",
                path.display(),
                idx + 1
            ))
        })?;
        tokens.push(token.to_string());
        tags.push(tag.to_string());
    }
    if !tokens.is_empty() {
        sentences.push((tokens, tags));
    }
    Ok(sentences)
}

/// Write a tagger training corpus in the two-column TSV format.
pub fn write_tagger_corpus_tsv(path: &Path, sentences: &[TaggedExample]) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = String::new();
    for (sentence_idx, (tokens, tags)) in sentences.iter().enumerate() {
        if sentence_idx > 0 {
            out.push('\n');
        }
        for (token, tag) in tokens.iter().zip(tags) {
            out.push_str(token);
            out.push('\t');
            out.push_str(tag);
            out.push('\n');
        }
    }
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pretagged_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tagged.jsonl");
        fs::write(
            &path,
            r#"{"tokens":["a","b"],"tags":["DT","NN"],"origin":"fr","pair":"fr-en"}"#,
        )
        .unwrap();
        let sentences = load_pretagged(&path).unwrap();
        assert_eq!(sentences.len(), 1);
        assert_eq!(sentences[0].tokens, vec!["a", "b"]);
        assert_eq!(sentences[0].origin_language, "fr");
        assert_eq!(sentences[0].pair.code(), "fr-en");

        save_tagged(&path, &sentences).unwrap();
        assert_eq!(load_pretagged(&path).unwrap(), sentences);
    }

    #[test]
    fn empty_file_is_empty_list() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.jsonl");
        fs::write(&path, "").unwrap();
        assert!(load_pretagged(&path).unwrap().is_empty());
    }

    #[test]
    fn length_mismatch_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        fs::write(
            &path,
            r#"{"tokens":["a","b"],"tags":["DT"],"origin":"fr","pair":"fr-en"}"#,
        )
        .unwrap();
        let err = load_pretagged(&path).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn malformed_json_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        fs::write(&path, "{\"tokens\": [\"a\"]\nnot json").unwrap();
        let err = load_pretagged(&path).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn tsv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.tsv");
        let sentences: Vec<TaggedExample> = vec![
            (vec!["the".into(), "cat".into()], vec!["DT".into(), "NN".into()]),
            (vec!["go".into()], vec!["VB".into()]),
        ];
        write_tagger_corpus_tsv(&path, &sentences).unwrap();
        assert_eq!(read_tagger_corpus_tsv(&path).unwrap(), sentences);
    }
}
