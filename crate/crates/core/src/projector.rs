//! Projection of an English constituency tree onto its Arabic translation.
//!
//! The result is a [`BilingualTree`] whose children are stored in Arabic
//! surface order, with a per-node `src_perm` giving the English order. The
//! construction:
//!
//! 1. groups transitively linked words into atomic blocks (unaligned words
//!    that fall inside a block's span are absorbed into it);
//! 2. keeps unaligned English words as leaves with no Arabic side and turns
//!    unaligned Arabic morphemes into leaves with no English side;
//! 3. collapses multi-word blocks into one leaf, dissolving every node that
//!    only partially covers a block;
//! 4. dissolves every node whose Arabic yield is not contiguous, which
//!    flattens crossing links up to their closest common ancestor;
//! 5. sorts children into Arabic order and records the English permutation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use crate::corpus_io::{Alignment, ParseTree, SentencePair, Token};
use crate::error::{Error, Result};

/// Label given to leaves that hold only unaligned Arabic material.
pub const EMPTY_SOURCE_LABEL: &str = "-NONE-";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub label: String,
    /// Arabic morphemes, possibly empty for an unaligned English word.
    pub tgt: Vec<Token>,
    /// English words, possibly empty for an unaligned Arabic morpheme.
    pub src: Vec<Token>,
    pub tgt_span: Range<usize>,
    pub src_span: Range<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Internal {
    pub label: String,
    /// Arabic surface order.
    pub children: Vec<BilingualTree>,
    /// `children[src_perm[k]]` is the k-th child in English order.
    pub src_perm: Vec<usize>,
}

impl Internal {
    pub fn is_identity(&self) -> bool {
        self.src_perm.iter().enumerate().all(|(k, &c)| k == c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BilingualTree {
    Leaf(Leaf),
    Node(Internal),
}

impl BilingualTree {
    pub fn label(&self) -> &str {
        match self {
            BilingualTree::Leaf(l) => &l.label,
            BilingualTree::Node(n) => &n.label,
        }
    }

    pub fn leaves(&self) -> Vec<&Leaf> {
        let mut out = Vec::new();
        self.visit_leaves(&mut |l| out.push(l));
        out
    }

    fn visit_leaves<'a>(&'a self, f: &mut dyn FnMut(&'a Leaf)) {
        match self {
            BilingualTree::Leaf(l) => f(l),
            BilingualTree::Node(n) => n.children.iter().for_each(|c| c.visit_leaves(f)),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            BilingualTree::Leaf(_) => 1,
            BilingualTree::Node(n) => n.children.iter().map(BilingualTree::leaf_count).sum(),
        }
    }

    /// Arabic rendering: leaves left to right.
    pub fn tgt_tokens(&self) -> Vec<&Token> {
        let mut out = Vec::new();
        self.visit_leaves(&mut |l| out.extend(l.tgt.iter()));
        out
    }

    /// English rendering: children visited through `src_perm`. Returns
    /// `None` if some permutation is invalid.
    pub fn src_tokens(&self) -> Option<Vec<&Token>> {
        let mut out = Vec::new();
        self.collect_src(&mut out).then_some(out)
    }

    fn collect_src<'a>(&'a self, out: &mut Vec<&'a Token>) -> bool {
        match self {
            BilingualTree::Leaf(l) => {
                out.extend(l.src.iter());
                true
            }
            BilingualTree::Node(n) => {
                if !is_permutation(&n.src_perm, n.children.len()) {
                    return false;
                }
                n.src_perm.iter().all(|&c| n.children[c].collect_src(out))
            }
        }
    }

    pub fn has_src(&self) -> bool {
        match self {
            BilingualTree::Leaf(l) => !l.src.is_empty(),
            BilingualTree::Node(n) => n.children.iter().any(BilingualTree::has_src),
        }
    }

    /// Debug dump: `(LABEL ...)` with `tgt|src` leaf payloads and the
    /// permutation shown on reordered nodes as `LABEL@1,0`.
    pub fn to_bracketed(&self) -> String {
        let mut s = String::new();
        self.write_bracketed(&mut s);
        s
    }

    fn write_bracketed(&self, s: &mut String) {
        let join = |ts: &[Token]| ts.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join("_");
        match self {
            BilingualTree::Leaf(l) => {
                s.push_str(&format!("({} {}|{})", l.label, join(&l.tgt), join(&l.src)));
            }
            BilingualTree::Node(n) => {
                s.push('(');
                s.push_str(&n.label);
                if !n.is_identity() {
                    let perm: Vec<String> = n.src_perm.iter().map(usize::to_string).collect();
                    s.push('@');
                    s.push_str(&perm.join(","));
                }
                for c in &n.children {
                    s.push(' ');
                    c.write_bracketed(s);
                }
                s.push(')');
            }
        }
    }
}

fn is_permutation(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

#[derive(Clone, Debug)]
struct Block {
    src: Range<usize>,
    tgt: Range<usize>,
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

/// Atomic blocks, ordered by source start then target start. Fails when a
/// block's span would have to swallow a word aligned elsewhere.
fn blocks(alignment: &Alignment, n_src: usize, n_tgt: usize) -> Result<Vec<Block>> {
    let mut ds = DisjointSet((0..n_src + n_tgt).collect());
    let mut src_aligned = vec![false; n_src];
    let mut tgt_aligned = vec![false; n_tgt];
    for l in alignment {
        ds.union(l.src, n_src + l.tgt);
        src_aligned[l.src] = true;
        tgt_aligned[l.tgt] = true;
    }
    let mut comps: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for i in (0..n_src).filter(|&i| src_aligned[i]) {
        comps.entry(ds.find(i)).or_default().0.push(i);
    }
    for j in (0..n_tgt).filter(|&j| tgt_aligned[j]) {
        comps.entry(ds.find(n_src + j)).or_default().1.push(j);
    }

    let mut out = Vec::new();
    let mut src_owner = vec![usize::MAX; n_src];
    let mut tgt_owner = vec![usize::MAX; n_tgt];
    for (root, (ss, ts)) in comps {
        let src = ss[0]..ss[ss.len() - 1] + 1;
        let tgt = ts[0]..ts[ts.len() - 1] + 1;
        for i in src.clone() {
            if src_aligned[i] && ds.find(i) != root {
                return Err(Error::Unprojectable(format!(
                    "source word {i} is aligned inside another block's span"
                )));
            }
        }
        for j in tgt.clone() {
            if tgt_aligned[j] && ds.find(n_src + j) != root {
                return Err(Error::Unprojectable(format!(
                    "target morpheme {j} is aligned inside another block's span"
                )));
            }
        }
        let id = out.len();
        src.clone().for_each(|i| src_owner[i] = id);
        tgt.clone().for_each(|j| tgt_owner[j] = id);
        out.push(Block { src, tgt });
    }
    let unowned = |owner: &[usize]| -> Vec<usize> { (0..owner.len()).filter(|&k| owner[k] == usize::MAX).collect() };
    for i in unowned(&src_owner) {
        out.push(Block {
            src: i..i + 1,
            tgt: 0..0,
        });
    }
    for j in unowned(&tgt_owner) {
        out.push(Block {
            src: 0..0,
            tgt: j..j + 1,
        });
    }
    Ok(out)
}

/// Working tree during surgery. Leaves reference blocks; children are in
/// English order.
#[derive(Debug)]
enum Work {
    Leaf(usize),
    Node { label: String, children: Vec<Work> },
}

fn push_merged(out: &mut Vec<Work>, items: Vec<Work>) {
    for w in items {
        if let (Work::Leaf(b), Some(Work::Leaf(last))) = (&w, out.last()) {
            if b == last {
                continue;
            }
        }
        out.push(w);
    }
}

fn rebuild(t: &ParseTree, blocks: &[Block], owner: &[usize]) -> Vec<Work> {
    let first = owner[t.span.start];
    let last = owner[t.span.end - 1];
    if first == last && blocks[first].src.start <= t.span.start && blocks[first].src.end >= t.span.end {
        return vec![Work::Leaf(first)];
    }
    let mut children = Vec::new();
    for c in &t.children {
        push_merged(&mut children, rebuild(c, blocks, owner));
    }
    let partial = blocks[first].src.start < t.span.start || blocks[last].src.end > t.span.end;
    if partial {
        children
    } else {
        vec![Work::Node {
            label: t.label.clone(),
            children,
        }]
    }
}

/// Insert `Leaf(new)` next to `Leaf(anchor)` inside its parent.
fn insert_beside(w: &mut Work, anchor: usize, new: usize, after: bool) -> bool {
    let Work::Node { children, .. } = w else {
        return false;
    };
    if let Some(pos) = children.iter().position(|c| matches!(c, Work::Leaf(b) if *b == anchor)) {
        children.insert(if after { pos + 1 } else { pos }, Work::Leaf(new));
        return true;
    }
    children.iter_mut().any(|c| insert_beside(c, anchor, new, after))
}

fn tgt_extent(w: &Work, blocks: &[Block]) -> Option<(usize, usize, usize)> {
    match w {
        Work::Leaf(b) => {
            let t = &blocks[*b].tgt;
            (!t.is_empty()).then(|| (t.start, t.end, t.len()))
        }
        Work::Node { children, .. } => children
            .iter()
            .filter_map(|c| tgt_extent(c, blocks))
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1), a.2 + b.2)),
    }
}

fn is_contiguous(w: &Work, blocks: &[Block]) -> bool {
    tgt_extent(w, blocks).is_none_or(|(lo, hi, size)| hi - lo == size)
}

fn flatten_crossing(w: Work, blocks: &[Block]) -> Vec<Work> {
    match w {
        Work::Leaf(_) => vec![w],
        Work::Node { label, children } => {
            let node = Work::Node {
                label,
                children: children.into_iter().flat_map(|c| flatten_crossing(c, blocks)).collect(),
            };
            if is_contiguous(&node, blocks) {
                vec![node]
            } else {
                let Work::Node { children, .. } = node else {
                    unreachable!()
                };
                children
            }
        }
    }
}

struct Ctx<'a> {
    blocks: &'a [Block],
    src: &'a [Token],
    tgt: &'a [Token],
    pos: Vec<String>,
}

impl Ctx<'_> {
    fn leaf(&self, b: usize) -> Leaf {
        let block = &self.blocks[b];
        let label = if block.src.is_empty() {
            EMPTY_SOURCE_LABEL.to_string()
        } else {
            self.pos[block.src.start].clone()
        };
        Leaf {
            label,
            tgt: self.tgt[block.tgt.clone()].to_vec(),
            src: self.src[block.src.clone()].to_vec(),
            tgt_span: block.tgt.clone(),
            src_span: block.src.clone(),
        }
    }

    fn finish(&self, w: Work) -> BilingualTree {
        match w {
            Work::Leaf(b) => BilingualTree::Leaf(self.leaf(b)),
            Work::Node { label, children } => {
                let starts: Vec<Option<usize>> = children
                    .iter()
                    .map(|c| tgt_extent(c, self.blocks).map(|e| e.0))
                    .collect();
                // Children without Arabic material sit right after their
                // nearest English-order predecessor that has some, or right
                // before the nearest successor.
                let key = |r: usize| -> (usize, i8, usize) {
                    if let Some(s) = starts[r] {
                        return (s, 0, r);
                    }
                    if let Some(s) = starts[..r].iter().rev().flatten().next() {
                        return (*s, 1, r);
                    }
                    if let Some(s) = starts[r + 1..].iter().flatten().next() {
                        return (*s, -1, r);
                    }
                    (0, 0, r)
                };
                let mut order: Vec<usize> = (0..children.len()).collect();
                order.sort_by_key(|&r| key(r));
                let mut src_perm = vec![0; children.len()];
                for (ar_idx, &en_idx) in order.iter().enumerate() {
                    src_perm[en_idx] = ar_idx;
                }
                let mut slots: Vec<Option<Work>> = children.into_iter().map(Some).collect();
                let children = order
                    .iter()
                    .map(|&en_idx| self.finish(slots[en_idx].take().unwrap()))
                    .collect();
                BilingualTree::Node(Internal {
                    label,
                    children,
                    src_perm,
                })
            }
        }
    }
}

fn word_labels(t: &ParseTree, parent: &str, out: &mut Vec<String>) {
    if t.is_leaf() {
        out.push(parent.to_string());
    } else {
        for c in &t.children {
            word_labels(c, &t.label, out);
        }
    }
}

/// Project `tree` (over `src`) onto `tgt` through `alignment`.
pub fn project(tree: &ParseTree, alignment: &Alignment, src: &[Token], tgt: &[Token]) -> Result<BilingualTree> {
    let leaves = tree.leaves();
    if leaves.len() != src.len() || leaves.iter().zip(src).any(|(l, t)| *l != t.surface) {
        return Err(Error::parse("tree leaves do not match the source tokens"));
    }
    if tgt.is_empty() {
        return Err(Error::parse("empty target side"));
    }
    if let Some(l) = alignment.iter().find(|l| l.src >= src.len() || l.tgt >= tgt.len()) {
        return Err(Error::parse(format!(
            "alignment link {}-{} out of bounds",
            l.src, l.tgt
        )));
    }

    let blocks = blocks(alignment, src.len(), tgt.len())?;
    let mut src_owner = vec![0; src.len()];
    let mut tgt_owner = vec![usize::MAX; tgt.len()];
    for (b, block) in blocks.iter().enumerate() {
        block.src.clone().for_each(|i| src_owner[i] = b);
        block.tgt.clone().for_each(|j| tgt_owner[j] = b);
    }

    let mut root = rebuild(tree, &blocks, &src_owner)
        .pop()
        .expect("root covers the whole sentence");
    if let Work::Leaf(_) = root {
        let only = std::mem::replace(&mut root, Work::Leaf(0));
        root = Work::Node {
            label: tree.label.clone(),
            children: vec![only],
        };
    }

    // Unaligned Arabic morphemes join the parent of their Arabic neighbour.
    let floating: Vec<usize> = (0..blocks.len()).filter(|&b| blocks[b].src.is_empty()).collect();
    let is_floating = |b: usize| blocks[b].src.is_empty();
    let first_anchor = (0..tgt.len()).find(|&j| !is_floating(tgt_owner[j]));
    let mut leading = Vec::new();
    for &b in &floating {
        let j = blocks[b].tgt.start;
        match first_anchor {
            Some(a) if j > a => {
                let placed = insert_beside(&mut root, tgt_owner[j - 1], b, true);
                debug_assert!(placed);
            }
            _ => leading.push(b),
        }
    }
    match first_anchor {
        Some(a) => {
            let mut next = tgt_owner[a];
            for &b in leading.iter().rev() {
                let placed = insert_beside(&mut root, next, b, false);
                debug_assert!(placed);
                next = b;
            }
        }
        None => {
            if let Work::Node { children, .. } = &mut root {
                children.extend(leading.into_iter().map(Work::Leaf));
            }
        }
    }

    let root = match root {
        Work::Node { label, children } => Work::Node {
            label,
            children: children
                .into_iter()
                .flat_map(|c| flatten_crossing(c, &blocks))
                .collect(),
        },
        leaf => leaf,
    };

    let mut pos = Vec::with_capacity(src.len());
    word_labels(tree, &tree.label, &mut pos);
    let ctx = Ctx {
        blocks: &blocks,
        src,
        tgt,
        pos,
    };
    Ok(ctx.finish(root))
}

/// [`project`] using the pair's own alignment (empty if absent).
pub fn project_pair(tree: &ParseTree, pair: &SentencePair) -> Result<BilingualTree> {
    let empty = Alignment::new();
    project(tree, pair.alignment.as_ref().unwrap_or(&empty), &pair.src, &pair.tgt)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    InvalidPermutation { label: String },
    EmptyLeaf { label: String },
    TargetOrder,
    SourceOrder,
    LeafSpan { label: String },
    CrossingLink { src: usize, tgt: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidPermutation { label } => write!(f, "invalid permutation at {label}"),
            Violation::EmptyLeaf { label } => write!(f, "empty leaf {label}"),
            Violation::TargetOrder => f.write_str("target order violated"),
            Violation::SourceOrder => f.write_str("source order violated"),
            Violation::LeafSpan { label } => write!(f, "leaf {label} does not match its spans"),
            Violation::CrossingLink { src, tgt } => {
                write!(f, "link {src}-{tgt} crosses a leaf boundary")
            }
        }
    }
}

fn check_nodes(t: &BilingualTree, pair: &SentencePair, out: &mut Vec<Violation>) {
    match t {
        BilingualTree::Leaf(l) => {
            if l.src.is_empty() && l.tgt.is_empty() {
                out.push(Violation::EmptyLeaf { label: l.label.clone() });
            }
            let spans_ok = l.tgt_span.len() == l.tgt.len()
                && l.src_span.len() == l.src.len()
                && pair.tgt.get(l.tgt_span.clone()).is_some_and(|s| s == l.tgt.as_slice())
                && pair.src.get(l.src_span.clone()).is_some_and(|s| s == l.src.as_slice());
            if !spans_ok {
                out.push(Violation::LeafSpan { label: l.label.clone() });
            }
        }
        BilingualTree::Node(n) => {
            if !is_permutation(&n.src_perm, n.children.len()) {
                out.push(Violation::InvalidPermutation { label: n.label.clone() });
            }
            n.children.iter().for_each(|c| check_nodes(c, pair, out));
        }
    }
}

/// Check every structural invariant of `t` against `pair`. An empty result
/// means the tree is valid.
pub fn validate(t: &BilingualTree, pair: &SentencePair) -> Vec<Violation> {
    let mut out = Vec::new();
    check_nodes(t, pair, &mut out);

    let surfaces = |ts: &[&Token]| ts.iter().map(|t| t.surface.clone()).collect::<Vec<_>>();
    let want_tgt: Vec<String> = pair.tgt.iter().map(|t| t.surface.clone()).collect();
    if surfaces(&t.tgt_tokens()) != want_tgt {
        out.push(Violation::TargetOrder);
    }
    if let Some(src) = t.src_tokens() {
        let want_src: Vec<String> = pair.src.iter().map(|t| t.surface.clone()).collect();
        if surfaces(&src) != want_src {
            out.push(Violation::SourceOrder);
        }
    }

    if let Some(alignment) = &pair.alignment {
        let leaves = t.leaves();
        let owner_src = |i: usize| leaves.iter().position(|l| l.src_span.contains(&i));
        let owner_tgt = |j: usize| leaves.iter().position(|l| l.tgt_span.contains(&j));
        for link in alignment {
            let (a, b) = (owner_src(link.src), owner_tgt(link.tgt));
            if a.is_none() || a != b {
                out.push(Violation::CrossingLink {
                    src: link.src,
                    tgt: link.tgt,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_io::{read_pharaoh, read_ptb};

    fn pair(src: &str, tgt: &str, links: &str) -> SentencePair {
        SentencePair::new("t", src, tgt)
            .unwrap()
            .with_alignment(read_pharaoh(links).unwrap())
            .unwrap()
    }

    fn run(tree: &str, p: &SentencePair) -> Result<BilingualTree> {
        project_pair(&read_ptb(tree).unwrap(), p)
    }

    fn words(ts: &[Token]) -> Vec<&str> {
        ts.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn unaligned_english_word_is_elided() {
        let p = pair("I eat", "آكل", "1-0");
        let t = run("(S (NP (PRP I)) (VP (VB eat)))", &p).unwrap();
        assert!(validate(&t, &p).is_empty());
        let leaves = t.leaves();
        assert_eq!(leaves.len(), 2);
        assert_eq!(words(&leaves[0].src), vec!["I"]);
        assert!(leaves[0].tgt.is_empty());
        assert_eq!(leaves[0].label, "PRP");
        assert_eq!(words(&leaves[1].src), vec!["eat"]);
        assert_eq!(words(&leaves[1].tgt), vec!["آكل"]);
    }

    #[test]
    fn reversed_pair_gets_swapped_permutation() {
        let p = pair("her opinion", "رأي+ +ها", "0-1 1-0");
        let t = run("(NP (PRP$ her) (NN opinion))", &p).unwrap();
        assert!(validate(&t, &p).is_empty());
        let BilingualTree::Node(n) = &t else {
            panic!("expected node")
        };
        assert_eq!(n.children.len(), 2);
        assert_eq!(n.src_perm, vec![1, 0]);
        assert_eq!(n.children[0].label(), "NN");
        assert_eq!(t.to_bracketed(), "(NP@1,0 (NN رأي+|opinion) (PRP$ +ها|her))");
    }

    #[test]
    fn five_words_to_one_arabic_word_collapse() {
        let p = pair("And they will plant it", "وسيزرعونها", "0-0 1-0 2-0 3-0 4-0");
        let tree = "(S (CC And) (NP (PRP they)) (VP (MD will) (VP (VB plant) (NP (PRP it)))))";
        let t = run(tree, &p).unwrap();
        assert!(validate(&t, &p).is_empty());
        let leaves = t.leaves();
        assert_eq!(leaves.len(), 1);
        assert_eq!(leaves[0].src.len(), 5);
        assert_eq!(leaves[0].label, "CC");
    }

    #[test]
    fn footnote_sentence_projects() {
        let p = pair(
            "And they will plant it in their fields",
            "وسيزرعونها في حقولهم",
            "0-0 1-0 2-0 3-0 4-0 5-1 6-2 7-2",
        );
        let tree = "(S (CC And) (NP (PRP they)) (VP (MD will) (VP (VB plant) (NP (PRP it)) \
                    (PP (IN in) (NP (PRP$ their) (NNS fields))))))";
        let t = run(tree, &p).unwrap();
        assert!(validate(&t, &p).is_empty(), "{:?}", validate(&t, &p));
        let leaves = t.leaves();
        assert_eq!(leaves.len(), 3);
        assert_eq!(words(&leaves[2].src), vec!["their", "fields"]);
    }

    #[test]
    fn crossing_link_flattens_to_common_ancestor() {
        // English a (b c) with Arabic order B A C: VP is not contiguous in
        // Arabic and is dissolved into S.
        let p = pair("a b c", "B A C", "0-1 1-0 2-2");
        let t = run("(S (NP (N a)) (VP (V b) (N c)))", &p).unwrap();
        assert!(validate(&t, &p).is_empty());
        let BilingualTree::Node(n) = &t else { panic!() };
        assert_eq!(n.children.len(), 3);
        assert_eq!(n.src_perm, vec![1, 0, 2]);
    }

    #[test]
    fn unaligned_arabic_attaches_to_neighbour() {
        let p = pair("the book", "ال+ +كتاب ال+ +جديد", "1-1");
        let t = run("(NP (DT the) (NN book))", &p).unwrap();
        assert!(validate(&t, &p).is_empty(), "{}", t.to_bracketed());
        assert_eq!(t.leaves().iter().filter(|l| l.src.is_empty()).count(), 3);
        let p = pair("book", "ال+ +كتاب", "0-1");
        let t = run("(NN book)", &p).unwrap();
        assert!(validate(&t, &p).is_empty());
        assert_eq!(t.leaves()[0].label, EMPTY_SOURCE_LABEL);
    }

    #[test]
    fn no_alignment_at_all() {
        let p = pair("a b", "x y z", "");
        let t = run("(S (A a) (B b))", &p).unwrap();
        assert!(validate(&t, &p).is_empty());
        assert_eq!(t.leaf_count(), 5);
    }

    #[test]
    fn interleaved_blocks_are_unprojectable() {
        // a-X and a-Z with b-Y in between.
        let p = pair("a b", "X Y Z", "0-0 0-2 1-1");
        let err = run("(S (A a) (B b))", &p).unwrap_err();
        assert!(matches!(err, Error::Unprojectable(_)));
    }

    #[test]
    fn gap_words_without_links_are_absorbed() {
        let p = pair("a b c", "X", "0-0 2-0");
        let t = run("(S (A a) (B b) (C c))", &p).unwrap();
        assert!(validate(&t, &p).is_empty());
        assert_eq!(t.leaf_count(), 1);
    }

    #[test]
    fn leaf_mismatch_is_rejected() {
        let p = pair("a b", "x", "");
        assert!(run("(S (A a))", &p).is_err());
    }

    #[test]
    fn validate_flags_corruption() {
        let p = pair("her opinion", "رأي+ +ها", "0-1 1-0");
        let t = run("(NP (PRP$ her) (NN opinion))", &p).unwrap();
        let BilingualTree::Node(mut n) = t else { panic!() };
        n.children.swap(0, 1);
        let swapped = BilingualTree::Node(n.clone());
        let v = validate(&swapped, &p);
        assert!(v.contains(&Violation::TargetOrder), "{v:?}");
        assert!(v.iter().any(|x| x.to_string() == "target order violated"));

        n.src_perm = vec![0, 0];
        let v = validate(&BilingualTree::Node(n), &p);
        assert!(v.iter().any(|x| x.to_string().starts_with("invalid permutation")));
    }

    #[test]
    fn projection_is_deterministic() {
        let p = pair("a b c d", "D C B A", "0-3 1-2 2-1 3-0");
        let tree = "(S (NP (D a) (N b)) (VP (V c) (N d)))";
        assert_eq!(run(tree, &p).unwrap(), run(tree, &p).unwrap());
    }
}
