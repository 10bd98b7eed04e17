//! Unicode-aware word segmentation: runs of alphanumeric characters,
//! lowercased, diacritics kept, no stemming.

/// A token with its byte span in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        match (ch.is_alphanumeric(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                tokens.push(make(text, s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        tokens.push(make(text, s, text.len()));
    }
    tokens
}

fn make(text: &str, start: usize, end: usize) -> Token {
    Token {
        text: text[start..end].to_lowercase(),
        start,
        end,
    }
}

/// Normalized words only.
pub fn words(text: &str) -> impl Iterator<Item = String> + '_ {
    tokenize(text).into_iter().map(|t| t.text)
}

/// Normalizes query terms: each term is segmented, and repeated tokens are
/// dropped while keeping first-seen order.
pub fn normalize_terms<S: AsRef<str>>(terms: &[S]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for term in terms {
        for w in words(term.as_ref()) {
            if !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments_and_lowercases() {
        let toks: Vec<_> = words("Die Klimakrise, erklärt! COVID-19").collect();
        assert_eq!(toks, ["die", "klimakrise", "erklärt", "covid", "19"]);
    }

    #[test]
    fn keeps_diacritics_and_spans() {
        let text = "Über Göttingen";
        let toks = tokenize(text);
        assert_eq!(toks[0].text, "über");
        assert_eq!(&text[toks[1].start..toks[1].end], "Göttingen");
    }

    #[test]
    fn normalizes_query_terms() {
        assert_eq!(
            normalize_terms(&["Fatty", "fatty liver"]),
            ["fatty", "liver"]
        );
        assert!(normalize_terms(&["  ", "--"]).is_empty());
        assert!(normalize_terms::<&str>(&[]).is_empty());
    }
}
