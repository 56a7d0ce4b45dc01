use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Default chunk size in tokens.
pub const DEFAULT_CHUNK_TOKENS: usize = 6000;

/// A contiguous slice of the source document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub index: usize,
    pub text: String,
    pub token_count: usize,
}

/// Splits text into token segments. Segment boundaries must cover the text
/// without gaps so that chunks reassemble exactly.
pub trait Tokenizer {
    /// End byte offset of every token segment, ascending. The last offset
    /// equals `text.len()` when there is at least one token.
    fn segment_ends(&self, text: &str) -> Vec<usize>;

    fn count(&self, text: &str) -> usize {
        self.segment_ends(text).len()
    }
}

/// One token per maximal run of non-whitespace. A segment is a token with
/// its preceding whitespace; trailing whitespace joins the last segment.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceTokenizer;

impl Tokenizer for WhitespaceTokenizer {
    fn segment_ends(&self, text: &str) -> Vec<usize> {
        let mut ends = Vec::new();
        let mut in_token = false;
        for (pos, c) in text.char_indices() {
            if c.is_whitespace() {
                if in_token {
                    ends.push(pos);
                }
                in_token = false;
            } else {
                in_token = true;
            }
        }
        if in_token {
            ends.push(text.len());
        }
        if let Some(last) = ends.last_mut() {
            *last = text.len();
        }
        ends
    }

    fn count(&self, text: &str) -> usize {
        text.split_whitespace().count()
    }
}

/// Greedy packing of `limit` tokens per chunk with the whitespace tokenizer.
pub fn chunk_text(doc: &str, limit: usize) -> Vec<Chunk> {
    chunk_text_with(doc, limit, &WhitespaceTokenizer)
}

/// Greedy packing: every chunk but the last holds exactly `limit` tokens,
/// and concatenating the chunk texts gives back `doc`. A document without
/// tokens but with whitespace becomes a single zero-token chunk.
pub fn chunk_text_with(doc: &str, limit: usize, tokenizer: &dyn Tokenizer) -> Vec<Chunk> {
    let limit = limit.max(1);
    if doc.is_empty() {
        return Vec::new();
    }
    let ends = tokenizer.segment_ends(doc);
    if ends.is_empty() {
        return alloc::vec![Chunk {
            index: 0,
            text: doc.into(),
            token_count: 0,
        }];
    }
    let mut chunks = Vec::with_capacity(ends.len().div_ceil(limit));
    let mut start = 0;
    for (index, group) in ends.chunks(limit).enumerate() {
        let end = *group.last().expect("chunks are non-empty");
        chunks.push(Chunk {
            index,
            text: doc[start..end].into(),
            token_count: group.len(),
        });
        start = end;
    }
    chunks
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn words(n: usize) -> String {
        (0..n)
            .map(|i| format!("w{i}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn sizes(chunks: &[Chunk]) -> Vec<usize> {
        chunks.iter().map(|c| c.token_count).collect()
    }

    fn joined(chunks: &[Chunk]) -> String {
        chunks.iter().map(|c| c.text.as_str()).collect()
    }

    #[test]
    fn boundary_split() {
        let doc = words(6001);
        let chunks = chunk_text(&doc, 6000);
        assert_eq!(sizes(&chunks), alloc::vec![6000, 1]);
        assert_eq!(joined(&chunks), doc);
    }

    #[test]
    fn empty_doc() {
        assert!(chunk_text("", 6000).is_empty());
    }

    #[test]
    fn whitespace_is_kept() {
        let doc = "  alpha\tbeta\n\n gamma  \n";
        let chunks = chunk_text(doc, 2);
        assert_eq!(sizes(&chunks), alloc::vec![2, 1]);
        assert_eq!(chunks[0].text, "  alpha\tbeta");
        assert_eq!(chunks[1].text, "\n\n gamma  \n");
        assert_eq!(joined(&chunks), doc);
    }

    #[test]
    fn whitespace_only_doc() {
        let chunks = chunk_text("   \n", 10);
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].token_count, 0);
    }

    #[test]
    fn counts_agree_with_segments() {
        let doc = "a bb  ccc\nd ";
        assert_eq!(
            WhitespaceTokenizer.count(doc),
            WhitespaceTokenizer.segment_ends(doc).len()
        );
    }
}
