//! Synthetic data: dictionary-translated parallel corpora with gold links,
//! random bilingual trees, and a small bilingual world with a toy grammar.
//! Used by the test suites, the benches and the shipped fixture.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus_io::{read_ptb, Alignment, AlignmentLink, Lang, ParseTree, SentencePair, Token};
use crate::projector::{BilingualTree, Internal, Leaf};

const INITIAL: &[char] = &[
    'ت', 'ث', 'ج', 'ح', 'خ', 'د', 'ذ', 'ر', 'ز', 'س', 'ش', 'ص', 'ض', 'ط', 'ظ', 'ع', 'غ', 'ق', 'م', 'ن',
];
const MEDIAL: &[char] = &[
    'ب', 'ت', 'ج', 'ح', 'د', 'ر', 'ز', 'س', 'ش', 'ع', 'ف', 'ق', 'ل', 'م', 'ن', 'و', 'ي', 'ا',
];
const FINAL: &[char] = &[
    'ب', 'ت', 'ج', 'ح', 'د', 'ر', 'ز', 'س', 'ش', 'ص', 'ع', 'ف', 'ق', 'ل', 'و',
];

/// An Arabic-script word that no clitic rule would split.
pub fn arabic_like_word<R: Rng>(rng: &mut R) -> String {
    let len = rng.gen_range(3..=5);
    let mut w = String::new();
    w.push(*INITIAL.choose(rng).unwrap());
    for _ in 0..len - 2 {
        w.push(*MEDIAL.choose(rng).unwrap());
    }
    w.push(*FINAL.choose(rng).unwrap());
    w
}

fn distinct_words<R: Rng>(rng: &mut R, n: usize, taken: &mut BTreeSet<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w = arabic_like_word(rng);
        if taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct DictCorpus {
    pub pairs: Vec<SentencePair>,
    pub gold: Vec<Alignment>,
}

/// Word-for-word translations through a one-to-one dictionary of `types`
/// entries, with random adjacent swaps on the target side.
pub fn dictionary_corpus(n_pairs: usize, types: usize, seed: u64) -> DictCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let en: Vec<String> = (0..types).map(|i| format!("w{i}")).collect();
    let ar = distinct_words(&mut rng, types, &mut BTreeSet::new());
    let mut pairs = Vec::with_capacity(n_pairs);
    let mut gold = Vec::with_capacity(n_pairs);
    for n in 0..n_pairs {
        let len = rng.gen_range(4..=10);
        let words: Vec<usize> = (0..len).map(|_| rng.gen_range(0..types)).collect();
        let mut order: Vec<usize> = (0..len).collect();
        let mut i = 0;
        while i + 1 < len {
            if rng.gen_bool(0.2) {
                order.swap(i, i + 1);
                i += 2;
            } else {
                i += 1;
            }
        }
        let src: Vec<&str> = words.iter().map(|&w| en[w].as_str()).collect();
        let tgt: Vec<&str> = order.iter().map(|&s| ar[words[s]].as_str()).collect();
        let links: Alignment = order
            .iter()
            .enumerate()
            .map(|(j, &s)| AlignmentLink::new(s, j))
            .collect();
        let pair = SentencePair::new((n + 1).to_string(), &src.join(" "), &tgt.join(" ")).unwrap();
        pairs.push(pair);
        gold.push(links);
    }
    DictCorpus { pairs, gold }
}

/// Knobs for [`random_bitree`].
#[derive(Clone, Debug)]
pub struct TreeShape {
    pub max_leaves: usize,
    pub max_children: usize,
    pub p_permuted: f64,
    pub p_unary: f64,
    pub p_elided: f64,
    pub p_tgt_only: f64,
    pub p_collapsed: f64,
    pub p_morpheme: f64,
}

impl Default for TreeShape {
    fn default() -> Self {
        TreeShape {
            max_leaves: 12,
            max_children: 4,
            p_permuted: 0.4,
            p_unary: 0.1,
            p_elided: 0.12,
            p_tgt_only: 0.12,
            p_collapsed: 0.15,
            p_morpheme: 0.15,
        }
    }
}

fn random_leaf<R: Rng>(rng: &mut R, shape: &TreeShape) -> BilingualTree {
    let r: f64 = rng.gen();
    let (n_tgt, n_src) = if r < shape.p_elided {
        (0, 1)
    } else if r < shape.p_elided + shape.p_tgt_only {
        (1, 0)
    } else if r < shape.p_elided + shape.p_tgt_only + shape.p_collapsed {
        (rng.gen_range(1..=2), rng.gen_range(2..=3))
    } else {
        (1, 1)
    };
    let placeholder = |lang| Token::new("?", lang);
    BilingualTree::Leaf(Leaf {
        label: "X".into(),
        tgt: vec![placeholder(Lang::Ar); n_tgt],
        src: vec![placeholder(Lang::En); n_src],
        tgt_span: 0..0,
        src_span: 0..0,
    })
}

fn random_node<R: Rng>(rng: &mut R, leaves: usize, shape: &TreeShape, depth: usize) -> BilingualTree {
    if leaves == 1 && (depth > 0 && !rng.gen_bool(shape.p_unary)) {
        return random_leaf(rng, shape);
    }
    let k = if leaves == 1 || rng.gen_bool(shape.p_unary) {
        1
    } else {
        rng.gen_range(2..=shape.max_children.min(leaves))
    };
    // Split `leaves` into k positive parts.
    let mut cuts: Vec<usize> = (1..leaves).collect::<Vec<_>>();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut sizes = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(leaves)) {
        sizes.push(c - prev);
        prev = c;
    }
    let children: Vec<BilingualTree> = sizes
        .into_iter()
        .map(|n| random_node(rng, n, shape, depth + 1))
        .collect();
    let mut src_perm: Vec<usize> = (0..children.len()).collect();
    if children.len() > 1 && rng.gen_bool(shape.p_permuted) {
        while src_perm.iter().enumerate().all(|(a, &b)| a == b) {
            src_perm.shuffle(rng);
        }
    }
    BilingualTree::Node(Internal {
        label: format!("N{depth}"),
        children,
        src_perm,
    })
}

fn number_tgt<R: Rng>(t: &mut BilingualTree, rng: &mut R, p_morpheme: f64, pos: &mut usize) {
    match t {
        BilingualTree::Leaf(l) => {
            let start = *pos;
            for tok in &mut l.tgt {
                let p = *pos;
                *tok = if rng.gen_bool(p_morpheme) {
                    let marked = if rng.gen_bool(0.5) {
                        format!("a{p}+")
                    } else {
                        format!("+a{p}")
                    };
                    Token::morpheme(marked, Lang::Ar)
                } else {
                    Token::new(format!("a{p}"), Lang::Ar)
                };
                *pos += 1;
            }
            l.tgt_span = start..*pos;
        }
        BilingualTree::Node(n) => {
            for c in &mut n.children {
                number_tgt(c, rng, p_morpheme, pos);
            }
        }
    }
}

fn number_src(t: &mut BilingualTree, pos: &mut usize) {
    match t {
        BilingualTree::Leaf(l) => {
            let start = *pos;
            for tok in &mut l.src {
                *tok = Token::new(format!("e{pos}"), Lang::En);
                *pos += 1;
            }
            l.src_span = start..*pos;
        }
        BilingualTree::Node(n) => {
            for k in 0..n.src_perm.len() {
                let c = n.src_perm[k];
                number_src(&mut n.children[c], pos);
            }
        }
    }
}

/// A random well-formed tree with between 1 and `shape.max_leaves` leaves,
/// at least one Arabic and one English piece. Arabic pieces are `aN`
/// (sometimes with join markers) and English pieces `eN`, numbered in each
/// language's order.
pub fn random_bitree<R: Rng>(rng: &mut R, shape: &TreeShape) -> BilingualTree {
    loop {
        let leaves = rng.gen_range(1..=shape.max_leaves);
        let mut t = random_node(rng, leaves, shape, 0);
        number_tgt(&mut t, rng, shape.p_morpheme, &mut 0);
        number_src(&mut t, &mut 0);
        if !t.tgt_tokens().is_empty() && t.has_src() {
            return t;
        }
    }
}

/// The sentence pair a tree renders, without alignment.
pub fn bitree_pair(t: &BilingualTree, id: &str) -> SentencePair {
    SentencePair {
        id: id.to_string(),
        line: 0,
        src: t
            .src_tokens()
            .expect("valid permutations")
            .into_iter()
            .cloned()
            .collect(),
        tgt: t.tgt_tokens().into_iter().cloned().collect(),
        alignment: None,
    }
}

const NOUNS: &[&str] = &[
    "book", "house", "boy", "girl", "car", "city", "door", "teacher", "friend", "letter", "garden", "market", "river",
    "window", "student", "tree", "table", "road", "doctor", "child",
];
const ADJECTIVES: &[&str] = &["big", "small", "new", "old", "red", "good", "long", "white"];
const VERBS: &[&str] = &[
    "saw", "took", "opened", "wrote", "found", "likes", "visited", "bought", "read", "painted",
];
const PREPOSITIONS: &[&str] = &["in", "with", "near", "for"];
const PRONOUNS: &[&str] = &["he", "she", "they"];

/// One translated sentence of the toy world.
#[derive(Clone, Debug)]
pub struct WorldSentence {
    /// Arabic side is clitic-segmented; alignment is gold.
    pub pair: SentencePair,
    pub tree: ParseTree,
}

/// Two toy vocabularies, a dictionary between them and a small grammar.
/// Arabic puts adjectives after nouns (each with its own article) and uses
/// verb-initial order in some sentences.
#[derive(Clone, Debug)]
pub struct World {
    nouns: Vec<String>,
    adjectives: Vec<String>,
    verbs: Vec<String>,
    prepositions: Vec<String>,
    pronouns: Vec<String>,
}

struct Phrase {
    ptb: String,
    ar: Vec<(Token, Option<usize>)>,
}

struct Builder<'w, R> {
    world: &'w World,
    rng: R,
    en: Vec<String>,
}

impl<R: Rng> Builder<'_, R> {
    fn word(&mut self, pos: &str, en: &str) -> (String, usize) {
        self.en.push(en.to_string());
        (format!("({pos} {en})"), self.en.len() - 1)
    }

    fn pick(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    fn np(&mut self) -> Phrase {
        let w = self.world;
        let r: f64 = self.rng.gen();
        if r < 0.2 {
            let i = self.pick(PRONOUNS.len());
            let (p, e) = self.word("PRP", PRONOUNS[i]);
            return Phrase {
                ptb: format!("(NP {p})"),
                ar: vec![(Token::new(w.pronouns[i].clone(), Lang::Ar), Some(e))],
            };
        }
        let article = || Token::morpheme("ال+", Lang::Ar);
        let stem = |s: &str| Token::morpheme(format!("+{s}"), Lang::Ar);
        let (dp, de) = self.word("DT", "the");
        if r < 0.7 {
            let n = self.pick(NOUNS.len());
            let (np, ne) = self.word("NN", NOUNS[n]);
            Phrase {
                ptb: format!("(NP {dp} {np})"),
                ar: vec![(article(), Some(de)), (stem(&w.nouns[n]), Some(ne))],
            }
        } else {
            let a = self.pick(ADJECTIVES.len());
            let n = self.pick(NOUNS.len());
            let (ap, ae) = self.word("JJ", ADJECTIVES[a]);
            let (np, ne) = self.word("NN", NOUNS[n]);
            Phrase {
                ptb: format!("(NP {dp} {ap} {np})"),
                ar: vec![
                    (article(), Some(de)),
                    (stem(&w.nouns[n]), Some(ne)),
                    (article(), None),
                    (stem(&w.adjectives[a]), Some(ae)),
                ],
            }
        }
    }

    fn pp(&mut self) -> Phrase {
        let i = self.pick(PREPOSITIONS.len());
        let (p, e) = self.word("IN", PREPOSITIONS[i]);
        let obj = self.np();
        let mut ar = vec![(Token::new(self.world.prepositions[i].clone(), Lang::Ar), Some(e))];
        ar.extend(obj.ar);
        Phrase {
            ptb: format!("(PP {p} {})", obj.ptb),
            ar,
        }
    }

    fn sentence(&mut self) -> Phrase {
        let subj = self.np();
        let v = self.pick(VERBS.len());
        let (vp, ve) = self.word("VBD", VERBS[v]);
        let verb = (Token::new(self.world.verbs[v].clone(), Lang::Ar), Some(ve));
        let obj = self.np();
        let pp = self.rng.gen_bool(0.3).then(|| self.pp());
        let verb_first = self.rng.gen_bool(0.3);

        let mut ar = Vec::new();
        if verb_first {
            ar.push(verb);
            ar.extend(subj.ar);
        } else {
            ar.extend(subj.ar);
            ar.push(verb);
        }
        ar.extend(obj.ar);
        let mut vp_ptb = format!("(VP {vp} {}", obj.ptb);
        if let Some(pp) = pp {
            ar.extend(pp.ar);
            vp_ptb.push(' ');
            vp_ptb.push_str(&pp.ptb);
        }
        vp_ptb.push(')');
        Phrase {
            ptb: format!("(S {} {vp_ptb})", subj.ptb),
            ar,
        }
    }
}

impl World {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut taken = BTreeSet::new();
        World {
            nouns: distinct_words(&mut rng, NOUNS.len(), &mut taken),
            adjectives: distinct_words(&mut rng, ADJECTIVES.len(), &mut taken),
            verbs: distinct_words(&mut rng, VERBS.len(), &mut taken),
            prepositions: distinct_words(&mut rng, PREPOSITIONS.len(), &mut taken),
            pronouns: distinct_words(&mut rng, PRONOUNS.len(), &mut taken),
        }
    }

    pub fn sentence<R: Rng>(&self, rng: &mut R, id: &str) -> WorldSentence {
        let mut b = Builder {
            world: self,
            rng,
            en: Vec::new(),
        };
        let phrase = b.sentence();
        let src = b.en.join(" ");
        let tgt: Vec<Token> = phrase.ar.iter().map(|(t, _)| t.clone()).collect();
        let alignment: Alignment = phrase
            .ar
            .iter()
            .enumerate()
            .filter_map(|(j, (_, e))| e.map(|i| AlignmentLink::new(i, j)))
            .collect();
        let mut pair = SentencePair::new(id, &src, "x").expect("non-empty sentence");
        pair.tgt = tgt;
        let pair = pair.with_alignment(alignment).expect("links in bounds");
        let tree = read_ptb(&phrase.ptb).expect("grammar emits valid brackets");
        WorldSentence { pair, tree }
    }

    pub fn corpus(&self, n: usize, seed: u64) -> Vec<WorldSentence> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|i| self.sentence(&mut rng, &(i + 1).to_string())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projector::{project_pair, validate};
    use crate::segmenter::{segment_word, Lexicon};

    #[test]
    fn arabic_words_survive_segmentation() {
        let lex = Lexicon::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let w = arabic_like_word(&mut rng);
            assert_eq!(segment_word(&w, &lex).pieces, vec![w.clone()]);
            let with_article = format!("ال{w}");
            assert_eq!(
                segment_word(&with_article, &lex).pieces,
                vec!["ال+".to_string(), format!("+{w}")]
            );
        }
    }

    #[test]
    fn dictionary_corpus_shape() {
        let c = dictionary_corpus(50, 20, 3);
        assert_eq!(c.pairs.len(), 50);
        for (p, g) in c.pairs.iter().zip(&c.gold) {
            assert_eq!(p.src.len(), p.tgt.len());
            assert_eq!(g.len(), p.src.len());
            p.check_alignment(g).unwrap();
        }
    }

    #[test]
    fn random_trees_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for i in 0..300 {
            let t = random_bitree(&mut rng, &TreeShape::default());
            assert!(t.leaf_count() <= 12);
            let p = bitree_pair(&t, &i.to_string());
            assert!(validate(&t, &p).is_empty(), "{}", t.to_bracketed());
        }
    }

    #[test]
    fn world_sentences_project() {
        let w = World::new(5);
        for s in w.corpus(200, 6) {
            assert_eq!(s.tree.leaves().len(), s.pair.src.len());
            let t = project_pair(&s.tree, &s.pair).unwrap();
            assert!(validate(&t, &s.pair).is_empty(), "{}", t.to_bracketed());
        }
    }
}
