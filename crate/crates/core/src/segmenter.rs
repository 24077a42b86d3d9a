//! Rule-based Arabic clitic segmentation.
//!
//! Words are split into an optional prefix clitic, a stem and an optional
//! suffix clitic, using `+` on each side of a split point:
//! `رأيها` becomes `رأي+ +ها`, `والكتاب` becomes `وال+ +كتاب`.
//! [`desegment`] reverses the split when rendering surface text.

use std::io::BufRead;

use crate::corpus_io::{is_marked, Lang, Token};
use crate::error::{Error, Result};

const DEFAULT_LEXICON: &str = include_str!("../data/clitics.txt");

pub const DEFAULT_MIN_STEM: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexicon {
    prefixes: Vec<String>,
    suffixes: Vec<String>,
    pub min_stem: usize,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::parse(DEFAULT_LEXICON.as_bytes()).expect("shipped lexicon parses")
    }
}

impl Lexicon {
    pub fn new(prefixes: Vec<String>, suffixes: Vec<String>, min_stem: usize) -> Self {
        let mut lex = Lexicon {
            prefixes,
            suffixes,
            min_stem,
        };
        lex.sort();
        lex
    }

    // Longest first, then lexicographic, so matching is deterministic.
    fn sort(&mut self) {
        let key = |s: &String| (std::cmp::Reverse(s.chars().count()), s.clone());
        self.prefixes.sort_by_key(key);
        self.prefixes.dedup();
        self.suffixes.sort_by_key(key);
        self.suffixes.dedup();
    }

    /// Parse a lexicon file with `[prefixes]` and `[suffixes]` sections.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        enum Section {
            None,
            Prefixes,
            Suffixes,
        }
        let mut section = Section::None;
        let mut prefixes = Vec::new();
        let mut suffixes = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::parse_at(lineno, e.to_string()))?;
            let entry = line.trim();
            if entry.is_empty() || entry.starts_with('#') {
                continue;
            }
            match entry {
                "[prefixes]" => section = Section::Prefixes,
                "[suffixes]" => section = Section::Suffixes,
                _ if entry.starts_with('[') => return Err(Error::parse_at(lineno, format!("unknown section {entry}"))),
                _ if entry.contains(char::is_whitespace) || entry.contains('+') => {
                    return Err(Error::parse_at(lineno, format!("invalid clitic {entry:?}")))
                }
                _ => match section {
                    Section::Prefixes => prefixes.push(entry.to_string()),
                    Section::Suffixes => suffixes.push(entry.to_string()),
                    Section::None => return Err(Error::parse_at(lineno, "clitic outside of a section")),
                },
            }
        }
        Ok(Lexicon::new(prefixes, suffixes, DEFAULT_MIN_STEM))
    }

    pub fn prefixes(&self) -> &[String] {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &[String] {
        &self.suffixes
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmentation {
    pub pieces: Vec<String>,
    /// Index of the stem within `pieces`.
    pub stem: usize,
}

impl Segmentation {
    /// The word with join markers removed.
    pub fn surface(&self) -> String {
        self.pieces.iter().map(|p| strip_markers(p)).collect()
    }
}

fn strip_markers(s: &str) -> &str {
    if !is_marked(s) {
        return s;
    }
    let s = s.strip_prefix('+').unwrap_or(s);
    s.strip_suffix('+').unwrap_or(s)
}

/// Greedy longest-match clitic stripping: at most one prefix and one suffix,
/// each only if the remaining stem keeps at least `min_stem` characters.
pub fn segment_word(word: &str, lex: &Lexicon) -> Segmentation {
    let len = word.chars().count();
    let prefix = lex
        .prefixes
        .iter()
        .find(|p| word.starts_with(p.as_str()) && len - p.chars().count() >= lex.min_stem);
    let rest = &word[prefix.map_or(0, |p| p.len())..];
    let rest_len = rest.chars().count();
    let suffix = lex
        .suffixes
        .iter()
        .find(|s| rest.ends_with(s.as_str()) && rest_len - s.chars().count() >= lex.min_stem);
    let stem = &rest[..rest.len() - suffix.map_or(0, |s| s.len())];

    let mut pieces = Vec::with_capacity(3);
    let mut stem_piece = String::new();
    let stem_idx = usize::from(prefix.is_some());
    if let Some(p) = prefix {
        pieces.push(format!("{p}+"));
        stem_piece.push('+');
    }
    stem_piece.push_str(stem);
    if suffix.is_some() {
        stem_piece.push('+');
    }
    pieces.push(stem_piece);
    if let Some(s) = suffix {
        pieces.push(format!("+{s}"));
    }
    Segmentation { pieces, stem: stem_idx }
}

/// Split a Farasa-style joined token (`و+ال+كتاب`) into marked pieces. The
/// longest piece is taken as the stem.
fn split_presegmented(word: &str) -> Option<Vec<String>> {
    let parts: Vec<&str> = word.split('+').collect();
    if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
        return None;
    }
    let stem = parts
        .iter()
        .enumerate()
        .max_by_key(|(i, p)| (p.chars().count(), std::cmp::Reverse(*i)))
        .map(|(i, _)| i)?;
    let last = parts.len() - 1;
    Some(
        parts
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let lead = if i > 0 && i >= stem { "+" } else { "" };
                let trail = if i < last && i <= stem { "+" } else { "" };
                format!("{lead}{p}{trail}")
            })
            .collect(),
    )
}

/// Segment every Arabic token; other tokens pass through. Tokens already
/// carrying `+` markers bypass the stripper.
pub fn segment_sentence(tokens: &[Token], lex: &Lexicon) -> Vec<Token> {
    let mut out = Vec::with_capacity(tokens.len());
    for tok in tokens {
        if tok.lang != Lang::Ar {
            out.push(tok.clone());
            continue;
        }
        if is_marked(&tok.surface) {
            out.push(Token::morpheme(tok.surface.clone(), tok.lang));
            continue;
        }
        if tok.surface.contains('+') {
            match split_presegmented(&tok.surface) {
                Some(pieces) => out.extend(pieces.into_iter().map(|p| Token::morpheme(p, tok.lang))),
                None => out.push(tok.clone()),
            }
            continue;
        }
        let seg = segment_word(&tok.surface, lex);
        if seg.pieces.len() == 1 {
            out.push(Token::morpheme(seg.pieces.into_iter().next().unwrap(), tok.lang));
        } else {
            out.extend(seg.pieces.into_iter().map(|p| Token::morpheme(p, tok.lang)));
        }
    }
    out
}

/// Re-attach adjacent morphemes of the same language whose facing side
/// carries a `+` marker; any marker left over is stripped.
pub fn desegment(tokens: &[Token]) -> Vec<Token> {
    let mut out: Vec<Token> = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let joinable = tok.is_morpheme
            && out.last().is_some_and(|prev| {
                prev.is_morpheme
                    && prev.lang == tok.lang
                    && (prev.surface.ends_with('+') || tok.surface.starts_with('+'))
            });
        if joinable {
            let prev = out.last_mut().unwrap();
            if is_marked(&prev.surface) && prev.surface.ends_with('+') {
                prev.surface.pop();
            }
            let piece = if is_marked(&tok.surface) {
                tok.surface.strip_prefix('+').unwrap_or(&tok.surface)
            } else {
                &tok.surface
            };
            prev.surface.push_str(piece);
        } else {
            if let Some(prev) = out.last_mut() {
                close(prev);
            }
            out.push(tok.clone());
        }
    }
    if let Some(prev) = out.last_mut() {
        close(prev);
    }
    out
}

fn close(t: &mut Token) {
    if t.is_morpheme {
        let stripped = strip_markers(&t.surface);
        if !stripped.is_empty() && stripped.len() != t.surface.len() {
            t.surface = stripped.to_string();
        }
        t.is_morpheme = false;
    }
}
