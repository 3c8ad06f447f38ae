//! Output files of a pair derivation: the aligned text triple, the stats
//! JSON, and the reject log.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::{AlignedSentence, DerivationStats, LanguagePair, Reject};

/// Paths of the three line-aligned files of one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairOutputPaths {
    pub english: PathBuf,
    pub foreign: PathBuf,
    pub origin: PathBuf,
}

fn one_line(text: &str) -> String {
    // Line alignment across the three files requires one sentence per line.
    if text.contains(['\n', '\r']) {
        text.replace(['\n', '\r'], " ")
    } else {
        text.to_string()
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(content.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Write the three line-aligned UTF-8 files for `pair`:
/// `{pair}.src.en.txt`, `{pair}.trg.{foreign}.txt`, `{pair}.origin.txt`.
///
/// Line `i` of all three files refers to the same sentence; every line ends
/// with a single LF and there is no trailing blank line. Empty input yields
/// three empty files.
pub fn emit_parallel_files(
    sentences: &[AlignedSentence],
    out_dir: &Path,
    pair: &LanguagePair,
) -> Result<PairOutputPaths> {
    let code = pair.code();
    let paths = PairOutputPaths {
        english: out_dir.join(format!("{code}.src.en.txt")),
        foreign: out_dir.join(format!("{code}.trg.{}.txt", pair.foreign())),
        origin: out_dir.join(format!("{code}.origin.txt")),
    };

    let mut english = String::new();
    let mut foreign = String::new();
    let mut origin = String::new();
    for sentence in sentences {
        english.push_str(&one_line(&sentence.english_text));
        english.push('\n');
        foreign.push_str(&one_line(&sentence.foreign_text));
        foreign.push('\n');
        origin.push_str(&sentence.original_language);
        origin.push('\n');
    }
    write_file(&paths.english, &english)?;
    write_file(&paths.foreign, &foreign)?;
    write_file(&paths.origin, &origin)?;
    Ok(paths)
}

/// Read a triple emitted by [`emit_parallel_files`] back into aligned
/// sentences. `source_doc` is not stored in the triple and comes back empty.
pub fn read_parallel_files(out_dir: &Path, pair: &LanguagePair) -> Result<Vec<AlignedSentence>> {
    let code = pair.code();
    let read = |name: String| -> Result<Vec<String>> {
        let path = out_dir.join(name);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(text.lines().map(str::to_string).collect())
    };
    let english = read(format!("{code}.src.en.txt"))?;
    let foreign = read(format!("{code}.trg.{}.txt", pair.foreign()))?;
    let origin = read(format!("{code}.origin.txt"))?;
    if english.len() != foreign.len() || english.len() != origin.len() {
        return Err(Error::Data(format!(
            "misaligned triple for {code}: {} / {} / {} lines",
            english.len(),
            foreign.len(),
            origin.len()
        )));
    }
    for (i, label) in origin.iter().enumerate() {
        if label != pair.foreign() && label != pair.english() {
            return Err(Error::Data(format!(
                "{code}.origin.txt line {}: label {label:?} is neither {:?} nor \"en\"",
                i + 1,
                pair.foreign()
            )));
        }
    }
    Ok(english
        .into_iter()
        .zip(foreign)
        .zip(origin)
        .map(|((english_text, foreign_text), original_language)| AlignedSentence {
            english_text,
            foreign_text,
            original_language,
            source_doc: String::new(),
        })
        .collect())
}

/// Write `{pair}.stats.json`.
pub fn write_stats(
    stats: &DerivationStats,
    out_dir: &Path,
    pair: &LanguagePair,
) -> Result<PathBuf> {
    let path = out_dir.join(format!("{}.stats.json", pair.code()));
    let mut json = serde_json::to_string_pretty(stats).expect("stats serialize");
    json.push('\n');
    write_file(&path, &json)?;
    Ok(path)
}

/// Write `{pair}.rejects.tsv` with one row per rejected document or sentence.
pub fn write_rejects(rejects: &[Reject], out_dir: &Path, pair: &LanguagePair) -> Result<PathBuf> {
    let path = out_dir.join(format!("{}.rejects.tsv", pair.code()));
    let mut content = String::from("path\tsentence_id\treason\n");
    for reject in rejects {
        content.push_str(&reject.path);
        content.push('\t');
        if let Some(id) = &reject.sentence_id {
            content.push_str(id);
        }
        content.push('\t');
        content.push_str(reject.code.as_str());
        content.push('\n');
    }
    write_file(&path, &content)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<AlignedSentence> {
        vec![
            AlignedSentence {
                english_text: "We agree.".into(),
                foreign_text: "Nous sommes d'accord.".into(),
                original_language: "fr".into(),
                source_doc: "a/x.xml".into(),
            },
            AlignedSentence {
                english_text: "Thank you.".into(),
                foreign_text: "Merci.".into(),
                original_language: "en".into(),
                source_doc: "a/x.xml".into(),
            },
        ]
    }

    #[test]
    fn triple_is_line_aligned_with_expected_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let pair = LanguagePair::new("fr").unwrap();
        let paths = emit_parallel_files(&sample(), dir.path(), &pair).unwrap();
        assert_eq!(
            fs::read_to_string(&paths.english).unwrap(),
            "We agree.\nThank you.\n"
        );
        assert_eq!(
            fs::read_to_string(&paths.foreign).unwrap(),
            "Nous sommes d'accord.\nMerci.\n"
        );
        assert_eq!(fs::read_to_string(&paths.origin).unwrap(), "fr\nen\n");
    }

    #[test]
    fn empty_input_writes_empty_files() {
        let dir = tempfile::tempdir().unwrap();
        let pair = LanguagePair::new("fr").unwrap();
        let paths = emit_parallel_files(&[], dir.path(), &pair).unwrap();
        assert_eq!(fs::read(&paths.english).unwrap(), b"");
        assert_eq!(fs::read(&paths.origin).unwrap(), b"");
        assert_eq!(read_parallel_files(dir.path(), &pair).unwrap(), vec![]);
    }

    #[test]
    fn triple_round_trips_texts_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        let pair = LanguagePair::new("fr").unwrap();
        let sentences = sample();
        emit_parallel_files(&sentences, dir.path(), &pair).unwrap();
        let reread = read_parallel_files(dir.path(), &pair).unwrap();
        assert_eq!(reread.len(), sentences.len());
        for (a, b) in reread.iter().zip(&sentences) {
            assert_eq!(a.english_text, b.english_text);
            assert_eq!(a.foreign_text, b.foreign_text);
            assert_eq!(a.original_language, b.original_language);
        }
    }

    #[test]
    fn embedded_newlines_are_flattened() {
        let dir = tempfile::tempdir().unwrap();
        let pair = LanguagePair::new("fr").unwrap();
        let mut sentences = sample();
        sentences[0].english_text = "two\nlines".into();
        let paths = emit_parallel_files(&sentences, dir.path(), &pair).unwrap();
        let english = fs::read_to_string(&paths.english).unwrap();
        assert_eq!(english.lines().count(), 2);
        assert!(english.starts_with("two lines\n"));
    }

    #[test]
    fn rejects_tsv_shape() {
        let dir = tempfile::tempdir().unwrap();
        let pair = LanguagePair::new("fr").unwrap();
        let rejects = vec![
            Reject::document(super::super::RejectCode::NoCounterpart, "a.xml"),
            Reject::sentence(super::super::RejectCode::SentNoLink, "b.xml", "s3"),
        ];
        let path = write_rejects(&rejects, dir.path(), &pair).unwrap();
        let content = fs::read_to_string(path).unwrap();
        assert_eq!(
            content,
            "path\tsentence_id\treason\na.xml\t\tNO_COUNTERPART\nb.xml\ts3\tSENT_NO_LINK\n"
        );
    }
}
