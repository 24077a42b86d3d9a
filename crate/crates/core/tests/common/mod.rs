//! Brute-force reference for code-switched renderings of a bilingual tree.
//!
//! Every leaf is assigned a language independently (2^L assignments). An
//! assignment is kept when each reordered node is monolingual and the
//! language runs agree in both surface orders. Nothing here calls the
//! generator.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::ops::Range;

use ecmix::corpus_io::{Lang, Token};
use ecmix::projector::{BilingualTree, Leaf};
use ecmix::segmenter::desegment;

pub type Surface = Vec<(String, Lang)>;

struct NodeInfo {
    /// Leaf ids in Arabic order.
    leaves: Range<usize>,
    identity: bool,
    has_src: bool,
}

struct Flat<'a> {
    leaves: Vec<&'a Leaf>,
    en_order: Vec<usize>,
    nodes: Vec<NodeInfo>,
}

fn flatten<'a>(t: &'a BilingualTree, flat: &mut Flat<'a>) -> Range<usize> {
    match t {
        BilingualTree::Leaf(l) => {
            flat.leaves.push(l);
            let id = flat.leaves.len() - 1;
            id..id + 1
        }
        BilingualTree::Node(n) => {
            let ranges: Vec<Range<usize>> = n.children.iter().map(|c| flatten(c, flat)).collect();
            let all = ranges[0].start..ranges[ranges.len() - 1].end;
            let has_src = all.clone().any(|i| !flat.leaves[i].src.is_empty());
            let identity = n.src_perm.iter().enumerate().all(|(k, &c)| k == c);
            flat.nodes.push(NodeInfo {
                leaves: all.clone(),
                identity,
                has_src,
            });
            all
        }
    }
}

fn english_order(t: &BilingualTree, next: &mut usize, out: &mut Vec<usize>) {
    match t {
        BilingualTree::Leaf(_) => {
            out.push(*next);
            *next += 1;
        }
        BilingualTree::Node(n) => {
            // Assign Arabic-order ids per child, then emit in English order.
            let mut child_ids = Vec::with_capacity(n.children.len());
            for c in &n.children {
                let mut ids = Vec::new();
                english_order(c, next, &mut ids);
                child_ids.push(ids);
            }
            for &c in &n.src_perm {
                out.extend(child_ids[c].iter().copied());
            }
        }
    }
}

fn runs(order: &[usize], en: &[bool]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for &i in order {
        match out.last_mut() {
            Some(run) if en[run[0]] == en[i] => run.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

fn same_partition(a: &[Vec<usize>], b: &[Vec<usize>]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            let mut x = x.clone();
            let mut y = y.clone();
            x.sort_unstable();
            y.sort_unstable();
            x == y
        })
}

fn admissible(flat: &Flat, en: &[bool]) -> bool {
    for n in &flat.nodes {
        if !n.identity {
            let first = en[n.leaves.start];
            if n.leaves.clone().any(|i| en[i] != first) {
                return false;
            }
        }
    }
    // An Arabic-only leaf can be English only inside a larger English
    // constituent that has something to say.
    for (i, l) in flat.leaves.iter().enumerate() {
        if en[i] && l.src.is_empty() {
            let covered = flat
                .nodes
                .iter()
                .any(|n| n.leaves.contains(&i) && n.has_src && n.leaves.clone().all(|j| en[j]));
            if !covered {
                return false;
            }
        }
    }
    let ar_order: Vec<usize> = (0..flat.leaves.len()).collect();
    same_partition(&runs(&ar_order, en), &runs(&flat.en_order, en))
}

/// All distinct desegmented renderings the equivalence constraint allows.
pub fn oracle(t: &BilingualTree) -> BTreeSet<Surface> {
    let mut flat = Flat {
        leaves: Vec::new(),
        en_order: Vec::new(),
        nodes: Vec::new(),
    };
    flatten(t, &mut flat);
    english_order(t, &mut 0, &mut flat.en_order);
    let l = flat.leaves.len();
    assert!(l <= 20, "oracle is exponential in the leaf count");

    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << l) {
        let en: Vec<bool> = (0..l).map(|i| mask >> i & 1 == 1).collect();
        if !admissible(&flat, &en) {
            continue;
        }
        let mut tokens: Vec<Token> = Vec::new();
        for run in runs(&flat.en_order, &en) {
            if en[run[0]] {
                tokens.extend(run.iter().flat_map(|&i| flat.leaves[i].src.iter().cloned()));
            } else {
                let mut ids = run.clone();
                ids.sort_unstable();
                tokens.extend(ids.iter().flat_map(|&i| flat.leaves[i].tgt.iter().cloned()));
            }
        }
        if !tokens.is_empty() {
            out.insert(surface(&desegment(&tokens)));
        }
    }
    out
}

pub fn surface(tokens: &[Token]) -> Surface {
    tokens.iter().map(|t| (t.surface.clone(), t.lang)).collect()
}
