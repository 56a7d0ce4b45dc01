//! Pulls a binary action vector out of free-form model output.
//!
//! Responses mix reasoning, markdown fences, LaTeX matrices and sometimes
//! several arrays. The scanner tokenizes the text, treats markup as
//! separators, and collects every run of single `0`/`1` tokens separated by
//! commas or whitespace. A run counts as a candidate list when it is wrapped
//! in brackets on both sides, or when it is unbracketed and has at least two
//! elements. The last candidate with the expected length wins.
//!
//! Code is never executed: a response that only describes how to compute the
//! vector yields [`ExtractError::NotFound`].

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::BinaryPlan;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtractError {
    /// The expected length was zero.
    InvalidLength,
    /// 0/1 lists were present, none of the expected length. Lengths are in
    /// order of appearance.
    LengthMismatch(Vec<usize>),
    NotFound,
}

impl fmt::Display for ExtractError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtractError::InvalidLength => f.write_str("expected plan length must be at least 1"),
            ExtractError::LengthMismatch(found) => write!(
                f,
                "binary lists found with lengths {found:?}, none of the expected length"
            ),
            ExtractError::NotFound => f.write_str("no binary list found in response"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Sep,
    Bit(u8),
    Other,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '.' | '_' | '-' | '+')
}

fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\\' {
            i += 1;
            match chars.get(i) {
                Some(&next) if next.is_ascii_alphabetic() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_alphabetic() {
                        i += 1;
                    }
                    let name: String = chars[start..i].iter().collect();
                    match name.as_str() {
                        "begin" | "end" => {
                            if chars.get(i) == Some(&'{') {
                                while i < chars.len() && chars[i] != '}' {
                                    i += 1;
                                }
                                i += 1;
                            }
                            tokens.push(if name == "begin" {
                                Token::Open
                            } else {
                                Token::Close
                            });
                        }
                        "left" | "right" | "quad" | "qquad" => tokens.push(Token::Sep),
                        _ => tokens.push(Token::Other),
                    }
                }
                Some(_) => {
                    // \\ \[ \] \( \) \{ \} \, and friends are layout only
                    tokens.push(Token::Sep);
                    i += 1;
                }
                None => {}
            }
            continue;
        }
        if is_word_char(c) {
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            let token = match &chars[start..i] {
                ['0'] => Token::Bit(0),
                ['1'] => Token::Bit(1),
                _ => Token::Other,
            };
            tokens.push(token);
            continue;
        }
        let token = match c {
            '[' | '(' | '{' => Token::Open,
            ']' | ')' | '}' => Token::Close,
            ',' | '&' | '$' | '`' | '*' | '"' | '\'' => Token::Sep,
            c if c.is_whitespace() => Token::Sep,
            _ => Token::Other,
        };
        tokens.push(token);
        i += 1;
    }
    tokens
}

fn candidates(tokens: &[Token]) -> Vec<Vec<u8>> {
    let mut found = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if !matches!(tokens[i], Token::Bit(_)) {
            i += 1;
            continue;
        }
        let opened = tokens[..i]
            .iter()
            .rev()
            .find(|t| **t != Token::Sep)
            .is_some_and(|t| *t == Token::Open);
        let mut run = Vec::new();
        let mut j = i;
        while j < tokens.len() {
            match tokens[j] {
                Token::Bit(b) => run.push(b),
                Token::Sep => {}
                _ => break,
            }
            j += 1;
        }
        let closed = tokens.get(j) == Some(&Token::Close);
        if opened == closed && (opened || run.len() >= 2) {
            found.push(run);
        }
        i = j;
    }
    found
}

/// Returns the last 0/1 list of length `n` found in `text`. The result keeps
/// the full text as `raw_text` and is labelled `"extracted"`.
pub fn extract_binary_plan(text: &str, n: usize) -> Result<BinaryPlan, ExtractError> {
    if n == 0 {
        return Err(ExtractError::InvalidLength);
    }
    let lists = candidates(&tokenize(text));
    if lists.is_empty() {
        return Err(ExtractError::NotFound);
    }
    match lists.iter().rev().find(|l| l.len() == n) {
        Some(bits) => {
            let plan = BinaryPlan::new(bits.clone(), "extracted").expect("scanner only yields 0/1");
            Ok(plan.with_raw_text(text))
        }
        None => Err(ExtractError::LengthMismatch(
            lists.iter().map(Vec::len).collect(),
        )),
    }
}

/// `[b0, b1, ..., bn]`.
pub fn render_bits(bits: &[u8]) -> String {
    let mut out = String::with_capacity(bits.len() * 3 + 2);
    out.push('[');
    for (i, b) in bits.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push(if *b == 0 { '0' } else { '1' });
    }
    out.push(']');
    out
}
