//! Document and link-file formats.
//!
//! The derivation pipeline only sees [`DocumentRecord`]s and [`LinkRecord`]s;
//! the on-disk schema is isolated behind [`CorpusFormat`] so an adapter for a
//! different corpus layout can be dropped in without touching the filters.
//!
//! The built-in schema is plain XML:
//!
//! ```xml
//! <doc lang="fr" source_language="fr">
//!   <s id="s1" lang="fr">Nous sommes d'accord.</s>
//! </doc>
//! ```
//!
//! with link files of the form:
//!
//! ```xml
//! <linkGrp src="fr/a/x.xml" trg="en/a/x.xml">
//!   <link src="s1" trg="s1"/>
//! </linkGrp>
//! ```

use std::fmt;

use quick_xml::escape::escape;
use quick_xml::events::Event;
use quick_xml::Reader;

use super::{DocumentRecord, Link, LinkRecord, Sentence};

/// A document or link file that could not be parsed. Parse failures are not
/// fatal: the derivation pipeline turns them into document rejects.
#[derive(Debug, Clone)]
pub struct FormatError(pub String);

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "format error: {}", self.0)
    }
}

impl std::error::Error for FormatError {}

/// Adapter seam between the on-disk corpus schema and the pipeline.
pub trait CorpusFormat: Sync {
    /// File extension of documents inside language directories.
    fn document_extension(&self) -> &str;

    /// File extension of link files inside the pair directory.
    fn link_extension(&self) -> &str;

    fn parse_document(
        &self,
        text: &str,
        relative_path: &str,
    ) -> std::result::Result<DocumentRecord, FormatError>;

    fn parse_links(&self, text: &str) -> std::result::Result<LinkRecord, FormatError>;
}

/// The built-in XML schema described in the module docs.
#[derive(Debug, Clone, Copy, Default)]
pub struct XmlCorpusFormat;

impl XmlCorpusFormat {
    fn attr(
        start: &quick_xml::events::BytesStart<'_>,
        name: &str,
    ) -> std::result::Result<Option<String>, FormatError> {
        for attr in start.attributes() {
            let attr = attr.map_err(|e| FormatError(format!("bad attribute: {e}")))?;
            if attr.key.as_ref() == name.as_bytes() {
                let value = attr
                    .unescape_value()
                    .map_err(|e| FormatError(format!("bad attribute value: {e}")))?;
                return Ok(Some(value.into_owned()));
            }
        }
        Ok(None)
    }

    /// Serialize a document in the built-in schema.
    pub fn write_document(doc: &DocumentRecord) -> String {
        let mut out = String::new();
        out.push_str("<doc lang=\"");
        out.push_str(&escape(&doc.language));
        out.push('"');
        if let Some(src) = &doc.declared_source_language {
            out.push_str(" source_language=\"");
            out.push_str(&escape(src));
            out.push('"');
        }
        out.push_str(">\n");
        for sentence in &doc.sentences {
            out.push_str("  <s id=\"");
            out.push_str(&escape(&sentence.id));
            out.push_str("\" lang=\"");
            out.push_str(&escape(&sentence.lang_tag));
            out.push_str("\">");
            out.push_str(&escape(&sentence.text));
            out.push_str("</s>\n");
        }
        out.push_str("</doc>\n");
        out
    }

    /// Serialize a link file in the built-in schema.
    pub fn write_links(record: &LinkRecord) -> String {
        let mut out = String::new();
        out.push_str("<linkGrp src=\"");
        out.push_str(&escape(&record.src_doc));
        out.push_str("\" trg=\"");
        out.push_str(&escape(&record.trg_doc));
        out.push_str("\">\n");
        for link in &record.links {
            out.push_str("  <link src=\"");
            out.push_str(&escape(&link.src.join(" ")));
            out.push_str("\" trg=\"");
            out.push_str(&escape(&link.trg.join(" ")));
            out.push_str("\"/>\n");
        }
        out.push_str("</linkGrp>\n");
        out
    }
}

fn split_ids(value: &str) -> Vec<String> {
    value.split_whitespace().map(str::to_string).collect()
}

impl CorpusFormat for XmlCorpusFormat {
    fn document_extension(&self) -> &str {
        "xml"
    }

    fn link_extension(&self) -> &str {
        "lnk"
    }

    fn parse_document(
        &self,
        text: &str,
        relative_path: &str,
    ) -> std::result::Result<DocumentRecord, FormatError> {
        let mut reader = Reader::from_str(text);
        let mut doc: Option<DocumentRecord> = None;
        let mut current: Option<Sentence> = None;
        let mut doc_open = false;

        loop {
            let event = reader.read_event().map_err(|e| FormatError(e.to_string()))?;
            match event {
                Event::Start(ref e) | Event::Empty(ref e) if e.name().as_ref() == b"doc" => {
                    if doc.is_some() {
                        return Err(FormatError("multiple <doc> elements".into()));
                    }
                    doc_open = matches!(event, Event::Start(_));
                    let language = Self::attr(e, "lang")?
                        .ok_or_else(|| FormatError("<doc> missing lang attribute".into()))?;
                    doc = Some(DocumentRecord {
                        relative_path: relative_path.to_string(),
                        language,
                        declared_source_language: Self::attr(e, "source_language")?,
                        sentences: Vec::new(),
                    });
                }
                Event::Start(ref e) if e.name().as_ref() == b"s" => {
                    let doc_ref = doc
                        .as_ref()
                        .ok_or_else(|| FormatError("<s> outside of <doc>".into()))?;
                    let id = Self::attr(e, "id")?
                        .ok_or_else(|| FormatError("<s> missing id attribute".into()))?;
                    let lang_tag =
                        Self::attr(e, "lang")?.unwrap_or_else(|| doc_ref.language.clone());
                    current = Some(Sentence { id, lang_tag, text: String::new() });
                }
                Event::Text(ref t) => {
                    if let Some(sentence) = current.as_mut() {
                        sentence
                            .text
                            .push_str(&t.unescape().map_err(|e| FormatError(e.to_string()))?);
                    }
                }
                Event::End(ref e) if e.name().as_ref() == b"s" => {
                    let mut sentence = current
                        .take()
                        .ok_or_else(|| FormatError("unmatched </s>".into()))?;
                    sentence.text = sentence.text.trim().to_string();
                    let doc_mut = doc.as_mut().unwrap();
                    if doc_mut.sentences.iter().any(|s| s.id == sentence.id) {
                        return Err(FormatError(format!("duplicate sentence id {:?}", sentence.id)));
                    }
                    doc_mut.sentences.push(sentence);
                }
                Event::End(ref e) if e.name().as_ref() == b"doc" => {
                    doc_open = false;
                }
                Event::Eof => {
                    // quick-xml does not flag unclosed elements at EOF.
                    if doc_open || current.is_some() {
                        return Err(FormatError("truncated document".into()));
                    }
                    break;
                }
                _ => {}
            }
        }
        doc.ok_or_else(|| FormatError("no <doc> element found".into()))
    }

    fn parse_links(&self, text: &str) -> std::result::Result<LinkRecord, FormatError> {
        let mut reader = Reader::from_str(text);
        let mut record: Option<LinkRecord> = None;
        let mut group_open = false;

        loop {
            let event = reader.read_event().map_err(|e| FormatError(e.to_string()))?;
            match event {
                Event::Start(ref e) | Event::Empty(ref e) => match e.name().as_ref() {
                    b"linkGrp" => {
                        if record.is_some() {
                            return Err(FormatError("multiple <linkGrp> elements".into()));
                        }
                        group_open = matches!(event, Event::Start(_));
                        record = Some(LinkRecord {
                            src_doc: Self::attr(e, "src")?.unwrap_or_default(),
                            trg_doc: Self::attr(e, "trg")?.unwrap_or_default(),
                            links: Vec::new(),
                        });
                    }
                    b"link" => {
                        let record = record
                            .as_mut()
                            .ok_or_else(|| FormatError("<link> outside of <linkGrp>".into()))?;
                        record.links.push(Link {
                            src: split_ids(&Self::attr(e, "src")?.unwrap_or_default()),
                            trg: split_ids(&Self::attr(e, "trg")?.unwrap_or_default()),
                        });
                    }
                    _ => {}
                },
                Event::End(ref e) if e.name().as_ref() == b"linkGrp" => {
                    group_open = false;
                }
                Event::Eof => {
                    if group_open {
                        return Err(FormatError("truncated link file".into()));
                    }
                    break;
                }
                _ => {}
            }
        }
        record.ok_or_else(|| FormatError("no <linkGrp> element found".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_document_with_source_language() {
        let xml = r#"<doc lang="fr" source_language="fr">
  <s id="s1" lang="fr">Bonjour &amp; bienvenue.</s>
  <s id="s2" lang="en">stray tag</s>
</doc>"#;
        let doc = XmlCorpusFormat.parse_document(xml, "a/x.xml").unwrap();
        assert_eq!(doc.language, "fr");
        assert_eq!(doc.declared_source_language.as_deref(), Some("fr"));
        assert_eq!(doc.sentences.len(), 2);
        assert_eq!(doc.sentences[0].text, "Bonjour & bienvenue.");
        assert_eq!(doc.sentences[1].lang_tag, "en");
    }

    #[test]
    fn missing_source_language_is_none() {
        let xml = r#"<doc lang="fr"><s id="s1" lang="fr">x</s></doc>"#;
        let doc = XmlCorpusFormat.parse_document(xml, "a.xml").unwrap();
        assert!(doc.declared_source_language.is_none());
    }

    #[test]
    fn duplicate_sentence_id_is_malformed() {
        let xml = r#"<doc lang="fr"><s id="s1">x</s><s id="s1">y</s></doc>"#;
        assert!(XmlCorpusFormat.parse_document(xml, "a.xml").is_err());
    }

    #[test]
    fn truncated_xml_is_malformed() {
        let xml = r#"<doc lang="fr"><s id="s1">x"#;
        assert!(XmlCorpusFormat.parse_document(xml, "a.xml").is_err());
    }

    #[test]
    fn parses_links_including_multi_id() {
        let lnk = r#"<linkGrp src="fr/a.xml" trg="en/a.xml">
  <link src="s1" trg="s1"/>
  <link src="s2 s3" trg="s2"/>
</linkGrp>"#;
        let record = XmlCorpusFormat.parse_links(lnk).unwrap();
        assert_eq!(record.links.len(), 2);
        assert!(record.links[0].is_one_to_one());
        assert!(!record.links[1].is_one_to_one());
        assert_eq!(record.links[1].src, vec!["s2", "s3"]);
    }

    #[test]
    fn write_then_parse_round_trips() {
        let doc = DocumentRecord {
            relative_path: "a/x.xml".into(),
            language: "fr".into(),
            declared_source_language: Some("en".into()),
            sentences: vec![Sentence {
                id: "s1".into(),
                lang_tag: "fr".into(),
                text: "a < b & c".into(),
            }],
        };
        let xml = XmlCorpusFormat::write_document(&doc);
        let reparsed = XmlCorpusFormat.parse_document(&xml, "a/x.xml").unwrap();
        assert_eq!(reparsed, doc);

        let links = LinkRecord {
            src_doc: "fr/a/x.xml".into(),
            trg_doc: "en/a/x.xml".into(),
            links: vec![Link { src: vec!["s1".into()], trg: vec!["s1".into()] }],
        };
        let text = XmlCorpusFormat::write_links(&links);
        assert_eq!(XmlCorpusFormat.parse_links(&text).unwrap(), links);
    }
}
