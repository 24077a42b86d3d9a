use ecmix::corpus_io::{read_pharaoh, read_ptb, SentencePair};
use ecmix::projector::{project_pair, validate, BilingualTree, EMPTY_SOURCE_LABEL};
use ecmix::synth::World;
use ecmix::Error;
use proptest::prelude::*;

fn pair(src: &str, tgt: &str, links: &str) -> SentencePair {
    SentencePair::new("1", src, tgt)
        .unwrap()
        .with_alignment(read_pharaoh(links).unwrap())
        .unwrap()
}

#[test]
fn adjective_swap_permutes_the_noun_phrase() {
    let p = pair("the red car", "السيارة الحمراء", "2-0 1-1");
    let t = project_pair(&read_ptb("(NP (DT the) (JJ red) (NN car))").unwrap(), &p).unwrap();
    assert!(validate(&t, &p).is_empty());
    let BilingualTree::Node(n) = &t else {
        panic!("expected a node")
    };
    assert!(!n.is_identity());
    assert_eq!(t.src_tokens().unwrap().len(), 3);
}

#[test]
fn crossing_block_is_unprojectable() {
    let p = pair("a b c", "س ص ع", "0-0 0-2 1-1");
    let err = project_pair(&read_ptb("(S (A a) (B b) (C c))").unwrap(), &p).unwrap_err();
    assert!(matches!(err, Error::Unprojectable(_)));
}

#[test]
fn missing_alignment_leaves_everything_unaligned() {
    let p = SentencePair::new("1", "a", "س").unwrap();
    let t = project_pair(&read_ptb("(S (A a))").unwrap(), &p).unwrap();
    let leaves = t.leaves();
    assert_eq!(leaves.len(), 2);
    assert!(leaves.iter().any(|l| l.label == EMPTY_SOURCE_LABEL && l.src.is_empty()));
    assert!(leaves.iter().any(|l| l.tgt.is_empty()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn world_sentences_project_and_render_both_sides(world_seed in 0u64..8, seed in any::<u64>()) {
        for s in World::new(world_seed).corpus(5, seed) {
            let t = project_pair(&s.tree, &s.pair).unwrap();
            prop_assert!(validate(&t, &s.pair).is_empty(), "{}", t.to_bracketed());
            let tgt: Vec<_> = t.tgt_tokens().into_iter().cloned().collect();
            let src: Vec<_> = t.src_tokens().unwrap().into_iter().cloned().collect();
            prop_assert_eq!(tgt, s.pair.tgt.clone());
            prop_assert_eq!(src, s.pair.src.clone());
        }
    }
}
