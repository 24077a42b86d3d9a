//! Enumeration of code-switched renderings of a bilingual tree.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::corpus_io::Token;
use crate::error::{Error, Result};
use crate::par;
use crate::projector::BilingualTree;
use crate::segmenter::desegment;

#[derive(Clone, Debug, PartialEq)]
pub struct CsCandidate {
    pub tokens: Vec<Token>,
    pub switch_points: usize,
    pub spf: f64,
    pub source_pair_id: String,
}

pub fn count_switches(tokens: &[Token]) -> usize {
    tokens.windows(2).filter(|w| w[0].lang != w[1].lang).count()
}

impl CsCandidate {
    /// Panics on an empty token list.
    pub fn new(tokens: Vec<Token>, source_pair_id: impl Into<String>) -> Self {
        assert!(!tokens.is_empty(), "candidate must have at least one token");
        let switch_points = count_switches(&tokens);
        let spf = switch_points as f64 / (tokens.len() - 1).max(1) as f64;
        CsCandidate {
            tokens,
            switch_points,
            spf,
            source_pair_id: source_pair_id.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub max_candidates_per_sentence: usize,
    pub dedup: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_candidates_per_sentence: 10_000,
            dedup: true,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_candidates_per_sentence == 0 {
            return Err(Error::Config("max_candidates_per_sentence must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Rendered {
    pub sequences: Vec<Vec<Token>>,
    /// Set when more distinct renderings existed than the cap allowed.
    pub truncated: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Generation {
    pub candidates: Vec<CsCandidate>,
    pub truncated: bool,
}

#[derive(PartialEq)]
enum Flow {
    Continue,
    Stop,
}

fn ar_tokens(node: &BilingualTree, acc: &mut Vec<Token>) {
    acc.extend(node.tgt_tokens().into_iter().cloned());
}

fn en_tokens(node: &BilingualTree, acc: &mut Vec<Token>) {
    acc.extend(node.src_tokens().unwrap_or_default().into_iter().cloned());
}

/// Depth-first walk over rendering choices. `pending` is a stack of nodes
/// still to render (next on top); each complete choice is passed to `sink`.
fn walk<'a>(
    pending: &mut Vec<&'a BilingualTree>,
    acc: &mut Vec<Token>,
    sink: &mut dyn FnMut(&[Token]) -> Flow,
) -> Flow {
    let Some(node) = pending.pop() else {
        return sink(acc);
    };
    let mark = acc.len();
    let mixable = match node {
        BilingualTree::Node(n) if n.is_identity() => Some(n),
        _ => None,
    };

    // For identity nodes the all-Arabic mix is the Arabic rendering and it
    // comes first in the mixed walk.
    let mut flow = if let Some(n) = mixable {
        let depth = pending.len();
        pending.extend(n.children.iter().rev());
        let flow = walk(pending, acc, sink);
        pending.truncate(depth);
        flow
    } else {
        ar_tokens(node, acc);
        let flow = walk(pending, acc, sink);
        acc.truncate(mark);
        flow
    };
    if flow == Flow::Continue && node.has_src() {
        en_tokens(node, acc);
        flow = walk(pending, acc, sink);
        acc.truncate(mark);
    }
    pending.push(node);
    flow
}

fn enumerate<K: std::hash::Hash + Eq + Clone>(
    tree: &BilingualTree,
    cfg: &GeneratorConfig,
    key: impl Fn(&[Token]) -> K,
    mut keep: impl FnMut(&[Token], K),
) -> bool {
    let cap = cfg.max_candidates_per_sentence;
    let mut seen = HashSet::new();
    let mut count = 0usize;
    let mut truncated = false;
    let mut sink = |seq: &[Token]| {
        let k = key(seq);
        if cfg.dedup && seen.contains(&k) {
            return Flow::Continue;
        }
        if count == cap {
            truncated = true;
            return Flow::Stop;
        }
        count += 1;
        if cfg.dedup {
            seen.insert(k.clone());
        }
        keep(seq, k);
        Flow::Continue
    };
    walk(&mut vec![tree], &mut Vec::new(), &mut sink);
    truncated
}

/// Morpheme-level renderings of `node`, in enumeration order.
pub fn renderings(node: &BilingualTree, cfg: &GeneratorConfig) -> Rendered {
    let mut sequences = Vec::new();
    let truncated = enumerate(node, cfg, <[Token]>::to_vec, |_, seq| sequences.push(seq));
    Rendered { sequences, truncated }
}

/// Desegmented candidates for one tree.
pub fn generate(tree: &BilingualTree, cfg: &GeneratorConfig, source_pair_id: &str) -> Generation {
    let mut candidates = Vec::new();
    let truncated = enumerate(tree, cfg, desegment, |_, tokens| {
        candidates.push(CsCandidate::new(tokens, source_pair_id))
    });
    Generation { candidates, truncated }
}

/// [`generate`] over many trees, in input order.
pub fn generate_all(trees: &[(String, BilingualTree)], cfg: &GeneratorConfig) -> Vec<Generation> {
    par::map(trees, |(id, t)| generate(t, cfg, id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_io::{read_pharaoh, read_ptb, Lang, SentencePair};
    use crate::projector::{project_pair, Internal, Leaf};

    fn leaf(tgt: &[&str], src: &[&str], at: usize) -> BilingualTree {
        let tgt: Vec<Token> = tgt.iter().map(|s| Token::new(*s, Lang::Ar)).collect();
        let src: Vec<Token> = src.iter().map(|s| Token::new(*s, Lang::En)).collect();
        BilingualTree::Leaf(Leaf {
            label: "X".into(),
            tgt_span: at..at + tgt.len(),
            src_span: at..at + src.len(),
            tgt,
            src,
        })
    }

    fn node(children: Vec<BilingualTree>, src_perm: Vec<usize>) -> BilingualTree {
        BilingualTree::Node(Internal {
            label: "N".into(),
            children,
            src_perm,
        })
    }

    fn texts(g: &Generation) -> Vec<String> {
        g.candidates
            .iter()
            .map(|c| {
                c.tokens
                    .iter()
                    .map(|t| t.surface.as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    #[test]
    fn identity_pair_yields_four() {
        let t = node(vec![leaf(&["x"], &["a"], 0), leaf(&["y"], &["b"], 1)], vec![0, 1]);
        let g = generate(&t, &GeneratorConfig::default(), "1");
        assert_eq!(texts(&g), vec!["x y", "x b", "a y", "a b"]);
        let sps: Vec<usize> = g.candidates.iter().map(|c| c.switch_points).collect();
        assert_eq!(sps, vec![0, 1, 1, 0]);
        assert!(!g.truncated);
    }

    #[test]
    fn reordered_pair_is_atomic() {
        let p = SentencePair::new("1", "her opinion", "رأي+ +ها")
            .unwrap()
            .with_alignment(read_pharaoh("0-1 1-0").unwrap())
            .unwrap();
        let t = project_pair(&read_ptb("(NP (PRP$ her) (NN opinion))").unwrap(), &p).unwrap();
        let g = generate(&t, &GeneratorConfig::default(), "1");
        assert_eq!(texts(&g), vec!["رأيها", "her opinion"]);
        assert_eq!(renderings(&t, &GeneratorConfig::default()).sequences.len(), 2);
    }

    #[test]
    fn elided_only_leaf_has_only_arabic() {
        let t = node(vec![leaf(&["x"], &[], 0)], vec![0]);
        let g = generate(&t, &GeneratorConfig::default(), "1");
        assert_eq!(texts(&g), vec!["x"]);
    }

    #[test]
    fn cap_truncates_deterministically() {
        let leaves = (0..10)
            .map(|i| leaf(&[&format!("a{i}")], &[&format!("e{i}")], i))
            .collect();
        let t = node(leaves, (0..10).collect());
        let cfg = GeneratorConfig {
            max_candidates_per_sentence: 100,
            dedup: true,
        };
        let g = generate(&t, &cfg, "1");
        assert_eq!(g.candidates.len(), 100);
        assert!(g.truncated);
        assert_eq!(g.candidates[0].switch_points, 0);
        assert!(g.candidates[0].tokens.iter().all(|t| t.lang == Lang::Ar));
        assert_eq!(generate(&t, &cfg, "1"), g);

        let full = generate(&t, &GeneratorConfig::default(), "1");
        assert_eq!(full.candidates.len(), 1024);
        assert!(!full.truncated);
        let exact = GeneratorConfig {
            max_candidates_per_sentence: 1024,
            dedup: true,
        };
        assert!(!generate(&t, &exact, "1").truncated);
    }

    #[test]
    fn spf_and_switches() {
        let c = CsCandidate::new(
            vec![
                Token::new("a", Lang::Ar),
                Token::new("b", Lang::En),
                Token::new("c", Lang::Ar),
            ],
            "x",
        );
        assert_eq!(c.switch_points, 2);
        assert!((c.spf - 1.0).abs() < 1e-12);
        let one = CsCandidate::new(vec![Token::new("a", Lang::Ar)], "x");
        assert_eq!(one.spf, 0.0);
    }

    #[test]
    fn morphemes_are_joined_after_rendering() {
        let t = node(
            vec![
                leaf(&["و+"], &["and"], 0),
                BilingualTree::Leaf(Leaf {
                    label: "NN".into(),
                    tgt: vec![Token::morpheme("+كتاب", Lang::Ar)],
                    src: vec![Token::new("book", Lang::En)],
                    tgt_span: 1..2,
                    src_span: 1..2,
                }),
            ],
            vec![0, 1],
        );
        let BilingualTree::Node(mut n) = t else { unreachable!() };
        if let BilingualTree::Leaf(l) = &mut n.children[0] {
            l.tgt = vec![Token::morpheme("و+", Lang::Ar)];
        }
        let g = generate(&BilingualTree::Node(n), &GeneratorConfig::default(), "1");
        assert_eq!(texts(&g), vec!["وكتاب", "و book", "and كتاب", "and book"]);
    }

    #[test]
    fn without_dedup_duplicates_survive() {
        // A unary chain reaches the same text through several paths.
        let inner = node(vec![leaf(&["x"], &["a"], 0)], vec![0]);
        let t = node(vec![inner], vec![0]);
        let dedup = generate(&t, &GeneratorConfig::default(), "1");
        assert_eq!(dedup.candidates.len(), 2);
        let raw = generate(
            &t,
            &GeneratorConfig {
                max_candidates_per_sentence: 100,
                dedup: false,
            },
            "1",
        );
        assert!(raw.candidates.len() > 2);
    }

    #[test]
    fn zero_cap_is_rejected() {
        let cfg = GeneratorConfig {
            max_candidates_per_sentence: 0,
            dedup: true,
        };
        assert!(cfg.validate().is_err());
    }
}
