/// Longest snippet, in characters.
pub const MAX_SNIPPET_CHARS: usize = 240;
/// Characters of context kept before the match when room allows.
const LEAD_CHARS: usize = 60;

/// Cuts a window of at most [`MAX_SNIPPET_CHARS`] characters around the byte
/// span `[start, end)`, snapping to whitespace where that keeps the match.
pub fn window(text: &str, start: usize, end: usize) -> String {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let char_at = |byte: usize| chars.partition_point(|&(b, _)| b < byte);
    let (m_start, m_end) = (char_at(start), char_at(end));
    let total = chars.len();

    let mut lo = m_start.saturating_sub(LEAD_CHARS);
    let mut hi = (lo + MAX_SNIPPET_CHARS).min(total);
    if hi < m_end {
        // match longer than the lead allows; anchor at its start
        lo = m_start;
        hi = (lo + MAX_SNIPPET_CHARS).min(total);
    }
    if hi - lo < MAX_SNIPPET_CHARS {
        lo = hi.saturating_sub(MAX_SNIPPET_CHARS);
    }

    if lo > 0 && !chars[lo - 1].1.is_whitespace() {
        if let Some(ws) = (lo..m_start).find(|&i| chars[i].1.is_whitespace()) {
            lo = ws + 1;
        }
    }
    if hi < total && !chars[hi].1.is_whitespace() {
        if let Some(ws) = (m_end..hi).rev().find(|&i| chars[i].1.is_whitespace()) {
            hi = ws;
        }
    }

    let from = chars.get(lo).map_or(text.len(), |&(b, _)| b);
    let to = chars.get(hi).map_or(text.len(), |&(b, _)| b);
    text[from..to].trim().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_text_is_whole() {
        assert_eq!(window("fatty liver disease", 0, 5), "fatty liver disease");
    }

    #[test]
    fn long_text_is_bounded_and_keeps_match() {
        let text = format!(
            "{} Klimawandel {}",
            "wort ".repeat(200),
            "ende ".repeat(200)
        );
        let start = text.find("Klimawandel").unwrap();
        let snip = window(&text, start, start + "Klimawandel".len());
        assert!(snip.chars().count() <= MAX_SNIPPET_CHARS);
        assert!(snip.contains("Klimawandel"));
        assert!(snip.starts_with("wort"));
    }

    #[test]
    fn multibyte_text() {
        let text = "äöü ".repeat(100) + "Göttingen" + &" ß".repeat(200);
        let start = text.find("Göttingen").unwrap();
        let snip = window(&text, start, start + "Göttingen".len());
        assert!(snip.chars().count() <= MAX_SNIPPET_CHARS);
        assert!(snip.contains("Göttingen"));
    }

    #[test]
    fn match_at_end() {
        let text = "x".repeat(500) + " target";
        let start = text.find("target").unwrap();
        let snip = window(&text, start, text.len());
        assert!(snip.ends_with("target"));
        assert!(snip.chars().count() <= MAX_SNIPPET_CHARS);
    }
}
