use std::collections::BTreeSet;
use std::ops::Range;

use super::CorpusError;

/// Built-in English stopword list. Words shorter than the minimum token
/// length are dropped anyway, so only longer function words need listing.
pub const DEFAULT_STOPWORDS: &[&str] = &[
    "a",
    "about",
    "above",
    "after",
    "again",
    "against",
    "all",
    "also",
    "am",
    "an",
    "and",
    "any",
    "are",
    "as",
    "at",
    "be",
    "because",
    "been",
    "before",
    "being",
    "below",
    "between",
    "both",
    "but",
    "by",
    "can",
    "could",
    "did",
    "do",
    "does",
    "doing",
    "down",
    "during",
    "each",
    "few",
    "for",
    "from",
    "further",
    "had",
    "has",
    "have",
    "having",
    "he",
    "her",
    "here",
    "hers",
    "herself",
    "him",
    "himself",
    "his",
    "how",
    "however",
    "i",
    "if",
    "in",
    "into",
    "is",
    "it",
    "its",
    "itself",
    "may",
    "might",
    "more",
    "most",
    "must",
    "my",
    "myself",
    "no",
    "nor",
    "not",
    "of",
    "off",
    "on",
    "once",
    "one",
    "only",
    "or",
    "other",
    "our",
    "ours",
    "ourselves",
    "out",
    "over",
    "own",
    "same",
    "shall",
    "she",
    "should",
    "so",
    "some",
    "such",
    "than",
    "that",
    "the",
    "their",
    "theirs",
    "them",
    "themselves",
    "then",
    "there",
    "these",
    "they",
    "this",
    "those",
    "through",
    "thus",
    "to",
    "too",
    "under",
    "until",
    "up",
    "upon",
    "very",
    "was",
    "we",
    "were",
    "what",
    "when",
    "where",
    "whether",
    "which",
    "while",
    "who",
    "whom",
    "why",
    "will",
    "with",
    "within",
    "without",
    "would",
    "yet",
    "you",
    "your",
    "yours",
    "yourself",
    "yourselves",
];

pub const DEFAULT_MIN_TOKEN_LEN: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    /// Tokens with fewer characters are dropped.
    pub min_len: usize,
    pub stopwords: BTreeSet<String>,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            min_len: DEFAULT_MIN_TOKEN_LEN,
            stopwords: DEFAULT_STOPWORDS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl TokenizerConfig {
    /// Replaces the stopword list with one read from text (one word per
    /// line; blank lines ignored).
    pub fn with_stopword_text(mut self, text: &str) -> Self {
        self.stopwords = text
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty())
            .collect();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusDocument {
    pub id: String,
    pub tokens: Vec<String>,
    /// Consecutive non-empty token ranges covering `tokens` exactly.
    pub sentences: Vec<Range<usize>>,
}

fn is_sentence_end(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Lowercases and splits on every non-alphanumeric run; `.`, `!` and `?`
/// also close the current sentence.
pub fn tokenize_str(id: &str, text: &str, config: &TokenizerConfig) -> CorpusDocument {
    let mut tokens: Vec<String> = Vec::new();
    let mut sentences = Vec::new();
    let mut sentence_start = 0;
    let mut word = String::new();

    let flush_word = |word: &mut String, tokens: &mut Vec<String>| {
        if word.is_empty() {
            return;
        }
        // Lowercasing can introduce combining marks; split those off too.
        let lower = word.to_lowercase();
        for piece in lower.split(|c: char| !c.is_alphanumeric()) {
            if piece.chars().count() >= config.min_len && !config.stopwords.contains(piece) {
                tokens.push(piece.to_string());
            }
        }
        word.clear();
    };

    for c in text.chars() {
        if c.is_alphanumeric() {
            word.push(c);
            continue;
        }
        flush_word(&mut word, &mut tokens);
        if is_sentence_end(c) && tokens.len() > sentence_start {
            sentences.push(sentence_start..tokens.len());
            sentence_start = tokens.len();
        }
    }
    flush_word(&mut word, &mut tokens);
    if tokens.len() > sentence_start {
        sentences.push(sentence_start..tokens.len());
    }

    CorpusDocument {
        id: id.to_string(),
        tokens,
        sentences,
    }
}

pub fn tokenize(
    id: &str,
    raw: &[u8],
    config: &TokenizerConfig,
) -> Result<CorpusDocument, CorpusError> {
    let text = std::str::from_utf8(raw).map_err(|e| CorpusError::Decode {
        id: id.to_string(),
        offset: e.valid_up_to(),
    })?;
    Ok(tokenize_str(id, text, config))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(text: &str) -> CorpusDocument {
        tokenize_str("d", text, &TokenizerConfig::default())
    }

    #[test]
    fn lowercases_and_splits() {
        let d = tok("AGI contains AGI.");
        assert_eq!(d.tokens, ["agi", "contains", "agi"]);
        assert_eq!(d.sentences, vec![0..3; 1]);
    }

    #[test]
    fn stopwords_only_yields_nothing() {
        let d = tok("a an the");
        assert!(d.tokens.is_empty() && d.sentences.is_empty());
    }

    #[test]
    fn two_sentences_partition() {
        // Hand segmentation: [humans, build, containment] [swarm, escape, sandbox, quickly]
        let d = tok("Humans build containment! Does the swarm escape-the sandbox quickly?");
        assert_eq!(
            d.tokens,
            [
                "humans",
                "build",
                "containment",
                "swarm",
                "escape",
                "sandbox",
                "quickly"
            ]
        );
        assert_eq!(d.sentences, [0..3, 3..7]);
    }

    #[test]
    fn short_tokens_and_empty_sentences_dropped() {
        let d = tok("Go. ... AI is ok. Policy v2 holds");
        assert_eq!(d.tokens, ["policy", "holds"]);
        assert_eq!(d.sentences, vec![0..2; 1]);
    }

    #[test]
    fn custom_stopwords_replace_builtin() {
        let cfg = TokenizerConfig::default().with_stopword_text("agent\n\nTHE\n");
        let d = tokenize_str("d", "the agent and the world", &cfg);
        assert_eq!(d.tokens, ["and", "world"]);
    }

    #[test]
    fn invalid_utf8_is_decode_error() {
        let err = tokenize("bad", &[b'o', b'k', 0xff], &TokenizerConfig::default()).unwrap_err();
        assert_eq!(
            err,
            CorpusError::Decode {
                id: "bad".into(),
                offset: 2
            }
        );
    }

    proptest::proptest! {
        #[test]
        fn sentences_partition_tokens(text in "[a-zA-Z .!?,\u{e9}\u{130}0-9]{0,80}") {
            let d = tok(&text);
            let mut next = 0;
            for r in &d.sentences {
                proptest::prop_assert_eq!(r.start, next);
                proptest::prop_assert!(r.end > r.start);
                next = r.end;
            }
            proptest::prop_assert_eq!(next, d.tokens.len());
            for t in &d.tokens {
                proptest::prop_assert!(t.chars().all(char::is_alphanumeric));
                proptest::prop_assert!(t.chars().count() >= DEFAULT_MIN_TOKEN_LEN);
            }
        }
    }
}
