//! Deterministic rule-based English tokenizer.
//!
//! Splits on whitespace, then peels leading/trailing punctuation runs off
//! each word and splits standard English contractions ("don't" -> "do",
//! "n't"). Internal punctuation is preserved, so URLs, numbers like "3.5",
//! and hyphenated words stay single tokens. Tokenizing the space-join of its
//! own output yields the same tokens again.

/// Clitic suffixes split off the end of a word, checked case-insensitively.
/// "n't" must come before "'t" would match anything; order is longest-first.
const CLITICS: [&str; 7] = ["n't", "'ll", "'re", "'ve", "'d", "'m", "'s"];

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{2018}' | '\u{2019}' | '\u{201C}' | '\u{201D}' | '\u{00AB}' | '\u{00BB}'
                | '\u{2013}' | '\u{2014}' | '\u{2026}' | '\u{00BF}' | '\u{00A1}' | '\u{00B7}'
        )
}

fn normalize_apostrophes(s: &str) -> String {
    s.replace('\u{2019}', "'")
}

/// True if `word` is itself one of the clitic tokens the splitter produces
/// ("n't", "'s", ...). Those must pass through unchanged.
fn is_clitic_token(word: &str) -> bool {
    let lower = normalize_apostrophes(word).to_lowercase();
    CLITICS.contains(&lower.as_str())
}

/// Push maximal runs of identical characters as separate tokens, so "..."
/// stays one token while ".)" becomes "." and ")".
fn push_punct_runs(piece: &str, out: &mut Vec<String>) {
    let mut run = String::new();
    for c in piece.chars() {
        if run.chars().next_back() == Some(c) || run.is_empty() {
            run.push(c);
        } else {
            out.push(std::mem::take(&mut run));
            run.push(c);
        }
    }
    if !run.is_empty() {
        out.push(run);
    }
}

fn split_contraction(core: &str, out: &mut Vec<String>) {
    let lower = normalize_apostrophes(core).to_lowercase();
    for clitic in CLITICS {
        if lower.len() > clitic.len() && lower.ends_with(clitic) {
            let cut = core
                .char_indices()
                .nth(core.chars().count() - clitic.chars().count())
                .map(|(byte, _)| byte)
                .unwrap_or(core.len());
            out.push(core[..cut].to_string());
            out.push(core[cut..].to_string());
            return;
        }
    }
    out.push(core.to_string());
}

fn tokenize_word(word: &str, out: &mut Vec<String>) {
    if is_clitic_token(word) {
        out.push(word.to_string());
        return;
    }

    let chars: Vec<char> = word.chars().collect();
    let mut start = 0;
    while start < chars.len() && is_punct(chars[start]) {
        start += 1;
    }
    if start == chars.len() {
        // Entirely punctuation: keep as one token.
        out.push(word.to_string());
        return;
    }
    let mut end = chars.len();
    while end > start + 1 && is_punct(chars[end - 1]) {
        end -= 1;
    }

    let byte_at = |char_idx: usize| -> usize {
        word.char_indices().nth(char_idx).map(|(b, _)| b).unwrap_or(word.len())
    };
    let (lead, rest) = word.split_at(byte_at(start));
    let (core, tail) = rest.split_at(byte_at(end) - lead.len());

    push_punct_runs(lead, out);
    split_contraction(core, out);
    push_punct_runs(tail, out);
}

/// Tokenize a UTF-8 string. Empty input yields an empty list; every token is
/// non-empty and whitespace-free.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        tokenize_word(word, &mut out);
    }
    out
}
