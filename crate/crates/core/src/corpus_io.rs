//! Readers and writers for every on-disk format the pipeline touches:
//! parallel text, Pharaoh alignments, PTB bracketed trees and generated
//! code-switched corpora.
//!
//! Tokenization is whitespace-only and text is passed through unchanged
//! (no Unicode normalization of Arabic presentation forms).

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::CsCandidate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lang {
    #[serde(rename = "AR")]
    Ar,
    #[serde(rename = "EN")]
    En,
}

impl Lang {
    pub fn tag(self) -> &'static str {
        match self {
            Lang::Ar => "AR",
            Lang::En => "EN",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Lang> {
        match tag {
            "AR" => Some(Lang::Ar),
            "EN" => Some(Lang::En),
            _ => None,
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// True for a morpheme piece carrying a Farasa-style `+` join marker on
/// either side. A bare `+` is an ordinary token.
pub fn is_marked(s: &str) -> bool {
    s.chars().count() > 1 && (s.starts_with('+') || s.ends_with('+'))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    pub lang: Lang,
    /// Produced by segmentation; may carry `+` join markers.
    pub is_morpheme: bool,
}

impl Token {
    /// Panics on an empty surface.
    pub fn new(surface: impl Into<String>, lang: Lang) -> Self {
        let surface = surface.into();
        assert!(!surface.is_empty(), "token surface must be non-empty");
        Token {
            surface,
            lang,
            is_morpheme: false,
        }
    }

    pub fn morpheme(surface: impl Into<String>, lang: Lang) -> Self {
        Token {
            is_morpheme: true,
            ..Token::new(surface, lang)
        }
    }

    /// Whitespace-split `text` into tokens of `lang`. Pre-segmented pieces
    /// (with `+` markers) are flagged as morphemes.
    pub fn split(text: &str, lang: Lang) -> Vec<Token> {
        text.split_whitespace()
            .map(|w| Token {
                surface: w.to_string(),
                lang,
                is_morpheme: is_marked(w),
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlignmentLink {
    pub src: usize,
    pub tgt: usize,
}

impl AlignmentLink {
    pub fn new(src: usize, tgt: usize) -> Self {
        AlignmentLink { src, tgt }
    }
}

pub type Alignment = BTreeSet<AlignmentLink>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SentencePair {
    pub id: String,
    /// 1-based line number in the input corpus.
    pub line: usize,
    pub src: Vec<Token>,
    pub tgt: Vec<Token>,
    pub alignment: Option<Alignment>,
}

impl SentencePair {
    pub fn new(id: impl Into<String>, src: &str, tgt: &str) -> Result<Self> {
        let src = Token::split(src, Lang::En);
        let tgt = Token::split(tgt, Lang::Ar);
        if src.is_empty() {
            return Err(Error::parse("empty source side"));
        }
        if tgt.is_empty() {
            return Err(Error::parse("empty target side"));
        }
        Ok(SentencePair {
            id: id.into(),
            line: 0,
            src,
            tgt,
            alignment: None,
        })
    }

    pub fn src_text(&self) -> String {
        join_surfaces(&self.src)
    }

    pub fn tgt_text(&self) -> String {
        join_surfaces(&self.tgt)
    }

    /// Reject links outside either side of the pair.
    pub fn check_alignment(&self, alignment: &Alignment) -> Result<()> {
        for link in alignment {
            if link.src >= self.src.len() || link.tgt >= self.tgt.len() {
                return Err(Error::parse(format!(
                    "alignment link {}-{} out of bounds for {}x{} sentence",
                    link.src,
                    link.tgt,
                    self.src.len(),
                    self.tgt.len()
                )));
            }
        }
        Ok(())
    }

    pub fn with_alignment(mut self, alignment: Alignment) -> Result<Self> {
        self.check_alignment(&alignment)?;
        self.alignment = Some(alignment);
        Ok(self)
    }
}

pub fn join_surfaces(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&t.surface);
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParallelFormat {
    /// First TSV column holds the sentence id.
    #[serde(default)]
    pub id_column: bool,
}

/// Read `src<TAB>tgt` lines (or `id<TAB>src<TAB>tgt` with an id column).
/// Blank lines are skipped; ids default to the 1-based line number.
pub fn read_parallel<R: BufRead>(reader: R, fmt: &ParallelFormat) -> Result<Vec<SentencePair>> {
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse_at(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let id = if fmt.id_column {
            cols.next().unwrap_or_default().trim().to_string()
        } else {
            lineno.to_string()
        };
        let (src, tgt) = match (cols.next(), cols.next(), cols.next()) {
            (Some(s), Some(t), None) => (s, t),
            _ => {
                return Err(Error::parse_at(
                    lineno,
                    "expected tab-separated source and target columns",
                ))
            }
        };
        let mut pair = SentencePair::new(id, src, tgt).map_err(|e| e.at(lineno))?;
        pair.line = lineno;
        pairs.push(pair);
    }
    Ok(pairs)
}

/// Read two line-aligned files, source and target.
pub fn read_parallel_paired<A: BufRead, B: BufRead>(src: A, tgt: B) -> Result<Vec<SentencePair>> {
    let mut pairs = Vec::new();
    let mut src_lines = src.lines();
    let mut tgt_lines = tgt.lines();
    let mut lineno = 0;
    loop {
        lineno += 1;
        let (s, t) = match (src_lines.next(), tgt_lines.next()) {
            (None, None) => break,
            (Some(s), Some(t)) => (s, t),
            _ => return Err(Error::LineMismatch(lineno)),
        };
        let s = s.map_err(|e| Error::parse_at(lineno, e.to_string()))?;
        let t = t.map_err(|e| Error::parse_at(lineno, e.to_string()))?;
        if s.trim().is_empty() && t.trim().is_empty() {
            continue;
        }
        let mut pair = SentencePair::new(lineno.to_string(), &s, &t).map_err(|e| e.at(lineno))?;
        pair.line = lineno;
        pairs.push(pair);
    }
    Ok(pairs)
}

pub fn write_parallel<W: Write>(pairs: &[SentencePair], mut out: W) -> Result<()> {
    for p in pairs {
        writeln!(out, "{}\t{}", p.src_text(), p.tgt_text()).map_err(Error::Write)?;
    }
    out.flush().map_err(Error::Write)
}

/// Parse one Pharaoh line, e.g. `0-0 1-2 2-1`. Duplicates collapse.
pub fn read_pharaoh(line: &str) -> Result<Alignment> {
    let mut links = Alignment::new();
    for item in line.split_whitespace() {
        let (i, j) = item
            .split_once('-')
            .ok_or_else(|| Error::parse(format!("malformed alignment pair {item:?}")))?;
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(format!("malformed alignment pair {item:?}")))
        };
        links.insert(AlignmentLink::new(parse(i)?, parse(j)?));
    }
    Ok(links)
}

pub fn write_pharaoh(links: &Alignment) -> String {
    links
        .iter()
        .map(|l| format!("{}-{}", l.src, l.tgt))
        .collect::<Vec<_>>()
        .join(" ")
}

/// One alignment set per line, including empty lines.
pub fn read_pharaoh_lines<R: BufRead>(reader: R) -> Result<Vec<Alignment>> {
    reader
        .lines()
        .enumerate()
        .map(|(idx, line)| {
            let line = line.map_err(|e| Error::parse_at(idx + 1, e.to_string()))?;
            read_pharaoh(&line).map_err(|e| e.at(idx + 1))
        })
        .collect()
}

/// Constituency tree over source tokens. Leaves carry the surface word in
/// `label` and have no children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseTree {
    pub label: String,
    pub children: Vec<ParseTree>,
    pub span: Range<usize>,
}

impl ParseTree {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        if self.is_leaf() {
            out.push(&self.label);
        } else {
            for c in &self.children {
                c.collect_leaves(out);
            }
        }
    }

    pub fn to_ptb(&self) -> String {
        let mut s = String::new();
        self.write_ptb(&mut s);
        s
    }

    fn write_ptb(&self, s: &mut String) {
        if self.is_leaf() {
            s.push_str(&self.label);
            return;
        }
        s.push('(');
        s.push_str(&self.label);
        for c in &self.children {
            s.push(' ');
            c.write_ptb(s);
        }
        s.push(')');
    }
}

#[derive(Debug, PartialEq)]
enum PtbTok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex_ptb(text: &str) -> Vec<PtbTok<'_>> {
    let mut toks = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        let delim = c == '(' || c == ')' || c.is_whitespace();
        if delim {
            if let Some(st) = start.take() {
                toks.push(PtbTok::Atom(&text[st..i]));
            }
            match c {
                '(' => toks.push(PtbTok::Open),
                ')' => toks.push(PtbTok::Close),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        toks.push(PtbTok::Atom(&text[st..]));
    }
    toks
}

/// Parse a single bracketed tree such as `(S (NP (PRP I)) (VP (VBP eat)))`.
pub fn read_ptb(text: &str) -> Result<ParseTree> {
    let toks = lex_ptb(text);
    let mut pos = 0;
    let mut next_leaf = 0;
    if toks.first() != Some(&PtbTok::Open) {
        return Err(Error::parse("expected '(' at start of tree"));
    }
    let tree = parse_node(&toks, &mut pos, &mut next_leaf)?;
    if pos != toks.len() {
        return Err(Error::parse("unbalanced brackets: trailing input after tree"));
    }
    Ok(tree)
}

fn parse_node(toks: &[PtbTok<'_>], pos: &mut usize, next_leaf: &mut usize) -> Result<ParseTree> {
    debug_assert_eq!(toks.get(*pos), Some(&PtbTok::Open));
    *pos += 1;
    let label = match toks.get(*pos) {
        Some(PtbTok::Atom(a)) => {
            *pos += 1;
            a.to_string()
        }
        _ => String::new(),
    };
    let start = *next_leaf;
    let mut children = Vec::new();
    loop {
        match toks.get(*pos) {
            None => return Err(Error::parse("unbalanced brackets: missing ')'")),
            Some(PtbTok::Close) => {
                *pos += 1;
                break;
            }
            Some(PtbTok::Open) => children.push(parse_node(toks, pos, next_leaf)?),
            Some(PtbTok::Atom(a)) => {
                children.push(ParseTree {
                    label: a.to_string(),
                    children: Vec::new(),
                    span: *next_leaf..*next_leaf + 1,
                });
                *next_leaf += 1;
                *pos += 1;
            }
        }
    }
    if children.is_empty() {
        return Err(Error::parse(format!("empty constituent ({label})")));
    }
    Ok(ParseTree {
        label,
        children,
        span: start..*next_leaf,
    })
}

/// One tree per line. Blank lines yield `None`.
pub fn read_ptb_lines<R: BufRead>(reader: R) -> Result<Vec<Option<ParseTree>>> {
    reader
        .lines()
        .enumerate()
        .map(|(idx, line)| {
            let line = line.map_err(|e| Error::parse_at(idx + 1, e.to_string()))?;
            if line.trim().is_empty() {
                Ok(None)
            } else {
                read_ptb(&line).map(Some).map_err(|e| e.at(idx + 1))
            }
        })
        .collect()
}

/// One candidate per line, in input order. Tagged output suffixes each
/// token with `/AR` or `/EN`.
pub fn write_cs_corpus<W: Write>(candidates: &[CsCandidate], mut out: W, tagged: bool) -> Result<()> {
    for c in candidates {
        let line = if tagged {
            c.tokens
                .iter()
                .map(|t| format!("{}/{}", t.surface, t.lang.tag()))
                .collect::<Vec<_>>()
                .join(" ")
        } else {
            join_surfaces(&c.tokens)
        };
        writeln!(out, "{line}").map_err(Error::Write)?;
    }
    out.flush().map_err(Error::Write)
}

/// Read a tagged corpus written by [`write_cs_corpus`]. Provenance ids are
/// the 1-based line numbers.
pub fn read_cs_corpus<R: BufRead>(reader: R) -> Result<Vec<CsCandidate>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse_at(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut tokens = Vec::new();
        for item in line.split_whitespace() {
            let (surface, lang) = item
                .rsplit_once('/')
                .and_then(|(s, t)| Lang::from_tag(t).filter(|_| !s.is_empty()).map(|l| (s, l)))
                .ok_or_else(|| Error::parse_at(lineno, format!("token {item:?} lacks a /AR or /EN tag")))?;
            tokens.push(Token::new(surface, lang));
        }
        out.push(CsCandidate::new(tokens, lineno.to_string()));
    }
    Ok(out)
}

/// Plain-text LM corpus: one whitespace-tokenized sentence per line.
pub fn read_sentences<R: BufRead>(reader: R) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::parse_at(idx + 1, e.to_string()))?;
        let toks: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if !toks.is_empty() {
            out.push(toks);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tsv_line_tokenizes_both_sides() {
        let pairs = read_parallel("I eat\tآكل\n".as_bytes(), &ParallelFormat::default()).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].id, "1");
        assert_eq!(pairs[0].src_text(), "I eat");
        assert_eq!(pairs[0].tgt.len(), 1);
        assert_eq!(pairs[0].tgt[0].surface, "آكل");
        assert_eq!(pairs[0].tgt[0].lang, Lang::Ar);
        assert!(pairs[0].alignment.is_none());
    }

    #[test]
    fn footnote_sentence_token_counts() {
        let line = "And they will plant it in their fields\tوسيزرعونها في حقولهم";
        let pairs = read_parallel(line.as_bytes(), &ParallelFormat::default()).unwrap();
        assert_eq!(pairs[0].src.len(), 8);
        assert_eq!(pairs[0].tgt.len(), 3);
    }

    #[test]
    fn id_column_and_blank_lines() {
        let text = "s7\ta b\tx\n\n s9\tc\ty\n";
        let pairs = read_parallel(text.as_bytes(), &ParallelFormat { id_column: true }).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].id, "s7");
        assert_eq!(pairs[1].id, "s9");
        assert_eq!(pairs[1].line, 3);
    }

    #[test]
    fn empty_side_reports_line() {
        let err = read_parallel("a\tb\nc\t \n".as_bytes(), &ParallelFormat::default()).unwrap_err();
        assert_eq!(err.to_string(), "line 2: empty target side");
        let err = read_parallel("a b c\n".as_bytes(), &ParallelFormat::default()).unwrap_err();
        assert!(err.to_string().starts_with("line 1:"));
    }

    #[test]
    fn paired_files_length_mismatch() {
        let src: String = (0..10).map(|i| format!("w{i}\n")).collect();
        let tgt: String = (0..9).map(|i| format!("x{i}\n")).collect();
        let err = read_parallel_paired(src.as_bytes(), tgt.as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "line count mismatch at line 10");
        let ok = read_parallel_paired(src.as_bytes(), src.as_bytes()).unwrap();
        assert_eq!(ok.len(), 10);
    }

    #[test]
    fn pharaoh_parsing() {
        let links = read_pharaoh("0-0 1-2 2-1").unwrap();
        let want: Alignment = [(0, 0), (1, 2), (2, 1)]
            .into_iter()
            .map(|(i, j)| AlignmentLink::new(i, j))
            .collect();
        assert_eq!(links, want);
        assert!(read_pharaoh("").unwrap().is_empty());
        assert_eq!(read_pharaoh("0-0 0-0").unwrap().len(), 1);
        assert!(read_pharaoh("0-x").is_err());
        assert!(read_pharaoh("01").is_err());
        assert_eq!(write_pharaoh(&links), "0-0 1-2 2-1");
    }

    #[test]
    fn pharaoh_file_errors_carry_line() {
        let err = read_pharaoh_lines("0-0\n1_1\n".as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("line 2:"), "{err}");
    }

    #[test]
    fn alignment_bounds_are_checked() {
        let pair = SentencePair::new("1", "a b", "x").unwrap();
        assert!(pair.check_alignment(&read_pharaoh("1-0").unwrap()).is_ok());
        assert!(pair.check_alignment(&read_pharaoh("2-0").unwrap()).is_err());
        assert!(pair.check_alignment(&read_pharaoh("0-1").unwrap()).is_err());
    }

    #[test]
    fn ptb_basic() {
        let t = read_ptb("(S (NP (PRP I)) (VP (VBP eat)))").unwrap();
        assert_eq!(t.label, "S");
        assert_eq!(t.leaves(), vec!["I", "eat"]);
        assert_eq!(t.span, 0..2);
        assert_eq!(t.children[1].span, 1..2);
        assert_eq!(t.to_ptb(), "(S (NP (PRP I)) (VP (VBP eat)))");
    }

    #[test]
    fn ptb_errors() {
        assert!(read_ptb("(S (NP I)").unwrap_err().to_string().contains("unbalanced"));
        assert!(read_ptb("(X)").unwrap_err().to_string().contains("empty constituent"));
        assert!(read_ptb("(S a))").unwrap_err().to_string().contains("unbalanced"));
        assert!(read_ptb("S a").is_err());
    }

    #[test]
    fn ptb_unlabeled_root() {
        let t = read_ptb("( (S (NN a) (NN b)))").unwrap();
        assert_eq!(t.label, "");
        assert_eq!(t.to_ptb(), "( (S (NN a) (NN b)))");
    }

    #[test]
    fn cs_corpus_tagged_and_plain() {
        let c = CsCandidate::new(vec![Token::new("قال", Lang::Ar), Token::new("hello", Lang::En)], "1");
        let mut buf = Vec::new();
        write_cs_corpus(std::slice::from_ref(&c), &mut buf, true).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "قال/AR hello/EN\n");
        let back = read_cs_corpus(buf.as_slice()).unwrap();
        assert_eq!(back[0].tokens, c.tokens);

        let mut plain = Vec::new();
        write_cs_corpus(&[c.clone(), c], &mut plain, false).unwrap();
        assert_eq!(String::from_utf8(plain).unwrap(), "قال hello\nقال hello\n");

        let mut empty = Vec::new();
        write_cs_corpus(&[], &mut empty, true).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn untagged_corpus_is_rejected() {
        assert!(read_cs_corpus("a/AR b\n".as_bytes()).is_err());
        assert!(read_cs_corpus("/AR\n".as_bytes()).is_err());
    }

    fn arb_tree() -> impl Strategy<Value = String> {
        let leaf = "[a-z]{1,4}".prop_map(|w| format!("(NN {w})"));
        leaf.prop_recursive(4, 24, 4, |inner| {
            (
                prop::sample::select(vec!["S", "NP", "VP", "PP"]),
                prop::collection::vec(inner, 1..4),
            )
                .prop_map(|(l, cs)| format!("({l} {})", cs.join(" ")))
        })
    }

    proptest! {
        #[test]
        fn ptb_roundtrip_and_spans(text in arb_tree()) {
            let tree = read_ptb(&text).unwrap();
            prop_assert_eq!(tree.to_ptb(), text.clone());
            let spaced = text.replace('(', " ( ").replace(')', " ) ");
            prop_assert_eq!(read_ptb(&spaced).unwrap(), tree.clone());
            check_spans(&tree)?;
            prop_assert_eq!(tree.span.clone(), 0..tree.leaves().len());
        }
    }

    fn check_spans(t: &ParseTree) -> std::result::Result<(), TestCaseError> {
        if t.is_leaf() {
            prop_assert_eq!(t.span.len(), 1);
            return Ok(());
        }
        let mut at = t.span.start;
        for c in &t.children {
            prop_assert_eq!(c.span.start, at);
            at = c.span.end;
            check_spans(c)?;
        }
        prop_assert_eq!(at, t.span.end);
        Ok(())
    }
}
