use serde::{Deserialize, Serialize};

/// Half-open byte range into the original source, plus the 1-based
/// line/column of its first byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start_byte: usize,
    pub end_byte: usize,
    pub start_line: usize,
    pub start_col: usize,
}

impl Span {
    pub fn len(&self) -> usize {
        self.end_byte - self.start_byte
    }

    pub fn is_empty(&self) -> bool {
        self.start_byte >= self.end_byte
    }

    /// Slice `source` with this span.
    pub fn text<'a>(&self, source: &'a str) -> &'a str {
        &source[self.start_byte..self.end_byte]
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start_byte <= other.start_byte && other.end_byte <= self.end_byte
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(&self, other: &Span) -> Span {
        if other.start_byte < self.start_byte {
            return other.to(self);
        }
        Span {
            start_byte: self.start_byte,
            end_byte: self.end_byte.max(other.end_byte),
            start_line: self.start_line,
            start_col: self.start_col,
        }
    }
}

/// Maps byte offsets to 1-based line/column pairs.
#[derive(Debug, Clone)]
pub struct LineIndex {
    line_starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(source: &str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(
            source
                .bytes()
                .enumerate()
                .filter(|&(_, b)| b == b'\n')
                .map(|(i, _)| i + 1),
        );
        LineIndex { line_starts }
    }

    /// Columns count characters, not bytes.
    pub fn line_col(&self, source: &str, offset: usize) -> (usize, usize) {
        let line = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.line_starts[line];
        let col = source[start..offset].chars().count() + 1;
        (line + 1, col)
    }

    pub fn span(&self, source: &str, start: usize, end: usize) -> Span {
        let (start_line, start_col) = self.line_col(source, start);
        Span {
            start_byte: start,
            end_byte: end,
            start_line,
            start_col,
        }
    }
}
