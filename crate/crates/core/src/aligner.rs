//! Unsupervised word alignment: IBM Model 2 with a diagonal-preference
//! distortion prior (the fast_align parameterization), trained by EM.
//!
//! For target position `j` of `m` and source position `i` of `n` (both
//! 1-based) the alignment prior is
//!
//! ```text
//! p(a_j = 0)       = p0
//! p(a_j = i | j)   = (1 - p0) * exp(-tension * |i/n - j/m|) / Z(j, m, n)
//! ```
//!
//! with `Z` normalizing over `i`. Only the lexical table `t(f | e)` is
//! re-estimated; the tension is fixed by configuration.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::corpus_io::{Alignment, AlignmentLink, SentencePair};
use crate::error::{Error, Result};
use crate::par;

/// Probability assigned to word pairs that never co-occurred in training.
pub const UNKNOWN_FLOOR: f64 = 1e-9;

pub const NULL_WORD: &str = "<null>";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetrization {
    Forward,
    Reverse,
    Intersection,
    Union,
    GrowDiagFinal,
}

impl std::str::FromStr for Symmetrization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "forward" => Symmetrization::Forward,
            "reverse" => Symmetrization::Reverse,
            "intersection" => Symmetrization::Intersection,
            "union" => Symmetrization::Union,
            "grow_diag_final" | "grow-diag-final" => Symmetrization::GrowDiagFinal,
            other => return Err(Error::Config(format!("unknown symmetrization {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlignerConfig {
    pub iterations: usize,
    pub tension: f64,
    pub p_null: f64,
    pub symmetrization: Symmetrization,
    /// Carried into run manifests. EM starts from a uniform table, so
    /// training does not consume randomness.
    pub seed: u64,
}

impl Default for AlignerConfig {
    fn default() -> Self {
        AlignerConfig {
            iterations: 5,
            tension: 4.0,
            p_null: 0.08,
            symmetrization: Symmetrization::GrowDiagFinal,
            seed: 0,
        }
    }
}

impl AlignerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::Config("aligner iterations must be >= 1".into()));
        }
        if !self.tension.is_finite() || self.tension <= 0.0 {
            return Err(Error::Config("aligner tension must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.p_null) {
            return Err(Error::Config("aligner p_null must be in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
struct Vocab {
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocab {
    fn with_null() -> Self {
        let mut v = Vocab::default();
        v.intern(NULL_WORD);
        v
    }

    fn intern(&mut self, w: &str) -> u32 {
        if let Some(&id) = self.index.get(w) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(w.to_string());
        self.index.insert(w.to_string(), id);
        id
    }

    fn get(&self, w: &str) -> Option<u32> {
        self.index.get(w).copied()
    }

    fn len(&self) -> usize {
        self.words.len()
    }
}

/// Lexical translation probabilities `t(tgt | src)`. Source id 0 is the
/// null word. Rows are sorted by target id.
#[derive(Clone, Debug)]
pub struct TranslationTable {
    src_vocab: Vocab,
    tgt_vocab: Vocab,
    rows: Vec<Vec<(u32, f64)>>,
}

impl TranslationTable {
    fn lookup(&self, e: u32, f: u32) -> Option<f64> {
        let row = self.rows.get(e as usize)?;
        row.binary_search_by_key(&f, |&(k, _)| k).ok().map(|i| row[i].1)
    }

    /// `t(tgt | src)`, or [`UNKNOWN_FLOOR`] for unseen pairs. Use
    /// [`NULL_WORD`] as `src` for the null row.
    pub fn prob(&self, src: &str, tgt: &str) -> f64 {
        match (self.src_vocab.get(src), self.tgt_vocab.get(tgt)) {
            (Some(e), Some(f)) => self.lookup(e, f).unwrap_or(UNKNOWN_FLOOR),
            _ => UNKNOWN_FLOOR,
        }
    }

    fn prob_ids(&self, e: Option<u32>, f: Option<u32>) -> f64 {
        match (e, f) {
            (Some(e), Some(f)) => self.lookup(e, f).unwrap_or(UNKNOWN_FLOOR),
            _ => UNKNOWN_FLOOR,
        }
    }

    /// Sum of `t(. | src)` over the target vocabulary.
    pub fn row_sum(&self, src: &str) -> f64 {
        self.src_vocab
            .get(src)
            .and_then(|e| self.rows.get(e as usize))
            .map_or(0.0, |row| row.iter().map(|&(_, p)| p).sum())
    }

    pub fn source_words(&self) -> impl Iterator<Item = &str> {
        self.src_vocab.words.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `src<TAB>tgt<TAB>prob` lines, sorted by source then target word.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut lines = Vec::with_capacity(self.len());
        for (e, row) in self.rows.iter().enumerate() {
            for &(f, p) in row {
                lines.push((&self.src_vocab.words[e], &self.tgt_vocab.words[f as usize], p));
            }
        }
        lines.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for (e, f, p) in lines {
            writeln!(out, "{e}\t{f}\t{p:e}").map_err(Error::Write)?;
        }
        out.flush().map_err(Error::Write)
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut src_vocab = Vocab::with_null();
        let mut tgt_vocab = Vocab::default();
        let mut entries: Vec<(u32, u32, f64)> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::parse_at(lineno, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::parse_at(lineno, "expected src<TAB>tgt<TAB>prob"));
            }
            let p: f64 = cols[2]
                .trim()
                .parse()
                .map_err(|_| Error::parse_at(lineno, format!("bad probability {:?}", cols[2])))?;
            entries.push((src_vocab.intern(cols[0]), tgt_vocab.intern(cols[1]), p));
        }
        let mut rows = vec![Vec::new(); src_vocab.len()];
        for (e, f, p) in entries {
            rows[e as usize].push((f, p));
        }
        for row in &mut rows {
            row.sort_by_key(|&(f, _)| f);
            row.dedup_by_key(|&mut (f, _)| f);
        }
        Ok(TranslationTable {
            src_vocab,
            tgt_vocab,
            rows,
        })
    }
}

/// A directional model plus the corpus log-likelihood observed at the start
/// of every EM iteration.
#[derive(Clone, Debug)]
pub struct Trained {
    pub table: TranslationTable,
    pub log_likelihood: Vec<f64>,
}

#[inline]
fn diag(i: usize, j: usize, n: usize, m: usize, tension: f64) -> f64 {
    (-tension * (i as f64 / n as f64 - j as f64 / m as f64).abs()).exp()
}

/// Prior over source positions `0..=n` (0 = null) for target position `j`.
fn prior(j: usize, m: usize, n: usize, cfg: &AlignerConfig, out: &mut Vec<f64>) {
    out.clear();
    out.push(cfg.p_null);
    let z: f64 = (1..=n).map(|i| diag(i, j, n, m, cfg.tension)).sum();
    for i in 1..=n {
        out.push((1.0 - cfg.p_null) * diag(i, j, n, m, cfg.tension) / z);
    }
}

type Encoded = Vec<(Vec<u32>, Vec<u32>)>;

#[derive(Default)]
struct Counts {
    expected: HashMap<(u32, u32), f64>,
    log_likelihood: f64,
}

fn e_step(chunk: &[(Vec<u32>, Vec<u32>)], table: &TranslationTable, cfg: &AlignerConfig) -> Counts {
    let mut counts = Counts::default();
    let mut pri = Vec::new();
    let mut post = Vec::new();
    for (src, tgt) in chunk {
        let (n, m) = (src.len(), tgt.len());
        for (j0, &f) in tgt.iter().enumerate() {
            prior(j0 + 1, m, n, cfg, &mut pri);
            post.clear();
            post.push(pri[0] * table.lookup(0, f).unwrap_or(UNKNOWN_FLOOR));
            for (i0, &e) in src.iter().enumerate() {
                post.push(pri[i0 + 1] * table.lookup(e, f).unwrap_or(UNKNOWN_FLOOR));
            }
            let total: f64 = post.iter().sum();
            counts.log_likelihood += total.ln();
            for (i, &p) in post.iter().enumerate() {
                let e = if i == 0 { 0 } else { src[i - 1] };
                *counts.expected.entry((e, f)).or_insert(0.0) += p / total;
            }
        }
    }
    counts
}

fn encode<'a, I>(sentences: I, src_vocab: &mut Vocab, tgt_vocab: &mut Vocab) -> Encoded
where
    I: IntoIterator<Item = (Vec<&'a str>, Vec<&'a str>)>,
{
    sentences
        .into_iter()
        .map(|(s, t)| {
            (
                s.iter().map(|w| src_vocab.intern(w)).collect(),
                t.iter().map(|w| tgt_vocab.intern(w)).collect(),
            )
        })
        .collect()
}

fn train_encoded(corpus: &Encoded, src_vocab: Vocab, tgt_vocab: Vocab, cfg: &AlignerConfig) -> Trained {
    // Uniform start over the target vocabulary for every co-occurring pair.
    let uniform = 1.0 / tgt_vocab.len() as f64;
    let mut support: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); src_vocab.len()];
    for (src, tgt) in corpus {
        for &f in tgt {
            support[0].insert(f);
            for &e in src {
                support[e as usize].insert(f);
            }
        }
    }
    let rows = support
        .into_iter()
        .map(|fs| fs.into_iter().map(|f| (f, uniform)).collect())
        .collect();
    let mut table = TranslationTable {
        src_vocab,
        tgt_vocab,
        rows,
    };

    let mut log_likelihood = Vec::with_capacity(cfg.iterations);
    for iter in 0..cfg.iterations {
        let partial = par::map_chunks(corpus, |chunk| e_step(chunk, &table, cfg));
        let mut merged: HashMap<(u32, u32), f64> = HashMap::new();
        let mut ll = 0.0;
        for c in partial {
            ll += c.log_likelihood;
            for (k, v) in c.expected {
                *merged.entry(k).or_insert(0.0) += v;
            }
        }
        log::debug!("em iteration {}: log-likelihood {ll}", iter + 1);
        log_likelihood.push(ll);

        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); table.rows.len()];
        for ((e, f), c) in merged {
            rows[e as usize].push((f, c));
        }
        for row in &mut rows {
            row.sort_by_key(|&(f, _)| f);
            let total: f64 = row.iter().map(|&(_, c)| c).sum();
            if total > 0.0 {
                for entry in row.iter_mut() {
                    entry.1 /= total;
                }
            }
        }
        table.rows = rows;
    }
    Trained { table, log_likelihood }
}

fn check_corpus(pairs: &[SentencePair]) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if let Some(p) = pairs.iter().find(|p| p.src.is_empty() || p.tgt.is_empty()) {
        return Err(Error::parse(format!("sentence {} has an empty side", p.id)));
    }
    Ok(())
}

fn surfaces(p: &SentencePair) -> (Vec<&str>, Vec<&str>) {
    (
        p.src.iter().map(|t| t.surface.as_str()).collect(),
        p.tgt.iter().map(|t| t.surface.as_str()).collect(),
    )
}

/// Train `t(tgt | src)`: every target token picks a source token or null.
pub fn train(pairs: &[SentencePair], cfg: &AlignerConfig) -> Result<Trained> {
    cfg.validate()?;
    check_corpus(pairs)?;
    let mut sv = Vocab::with_null();
    let mut tv = Vocab::default();
    let corpus = encode(pairs.iter().map(surfaces), &mut sv, &mut tv);
    Ok(train_encoded(&corpus, sv, tv, cfg))
}

/// Train the opposite direction, `t(src | tgt)`.
pub fn train_reverse(pairs: &[SentencePair], cfg: &AlignerConfig) -> Result<Trained> {
    cfg.validate()?;
    check_corpus(pairs)?;
    let mut sv = Vocab::with_null();
    let mut tv = Vocab::default();
    let corpus = encode(
        pairs.iter().map(|p| {
            let (s, t) = surfaces(p);
            (t, s)
        }),
        &mut sv,
        &mut tv,
    );
    Ok(train_encoded(&corpus, sv, tv, cfg))
}

/// Viterbi links for one direction. `src` is the conditioning side of the
/// table. Returned links are `(src index, tgt index)`, 0-based.
pub fn viterbi(table: &TranslationTable, cfg: &AlignerConfig, src: &[&str], tgt: &[&str]) -> Alignment {
    let mut links = Alignment::new();
    let (n, m) = (src.len(), tgt.len());
    if n == 0 || m == 0 {
        return links;
    }
    let src_ids: Vec<Option<u32>> = src.iter().map(|w| table.src_vocab.get(w)).collect();
    let mut pri = Vec::new();
    for (j0, f) in tgt.iter().enumerate() {
        let f = table.tgt_vocab.get(f);
        prior(j0 + 1, m, n, cfg, &mut pri);
        // Null wins ties, then the smallest source position.
        let mut best = pri[0] * table.prob_ids(Some(0), f);
        let mut best_i = 0;
        for (i0, &e) in src_ids.iter().enumerate() {
            let score = pri[i0 + 1] * table.prob_ids(e, f);
            if score > best {
                best = score;
                best_i = i0 + 1;
            }
        }
        if best_i > 0 {
            links.insert(AlignmentLink::new(best_i - 1, j0));
        }
    }
    links
}

/// Forward Viterbi alignment of a pair under a model from [`train`].
pub fn viterbi_align(table: &TranslationTable, cfg: &AlignerConfig, pair: &SentencePair) -> Alignment {
    let (s, t) = surfaces(pair);
    viterbi(table, cfg, &s, &t)
}

const NEIGHBORS: [(isize, isize); 8] = [(-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)];

/// Combine forward and (transposed) reverse links.
pub fn symmetrize(fwd: &Alignment, rev: &Alignment, method: Symmetrization) -> Alignment {
    match method {
        Symmetrization::Forward => fwd.clone(),
        Symmetrization::Reverse => rev.clone(),
        Symmetrization::Intersection => fwd.intersection(rev).copied().collect(),
        Symmetrization::Union => fwd.union(rev).copied().collect(),
        Symmetrization::GrowDiagFinal => grow_diag_final(fwd, rev),
    }
}

fn grow_diag_final(fwd: &Alignment, rev: &Alignment) -> Alignment {
    let union: Alignment = fwd.union(rev).copied().collect();
    let mut out: Alignment = fwd.intersection(rev).copied().collect();
    let mut src_aligned: BTreeSet<usize> = out.iter().map(|l| l.src).collect();
    let mut tgt_aligned: BTreeSet<usize> = out.iter().map(|l| l.tgt).collect();

    loop {
        let mut added = false;
        let snapshot: Vec<AlignmentLink> = out.iter().copied().collect();
        for link in snapshot {
            for (di, dj) in NEIGHBORS {
                let (Some(i), Some(j)) = (link.src.checked_add_signed(di), link.tgt.checked_add_signed(dj)) else {
                    continue;
                };
                let cand = AlignmentLink::new(i, j);
                if union.contains(&cand)
                    && !out.contains(&cand)
                    && (!src_aligned.contains(&i) || !tgt_aligned.contains(&j))
                {
                    out.insert(cand);
                    src_aligned.insert(i);
                    tgt_aligned.insert(j);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }

    for link in fwd.iter().chain(rev.iter()) {
        if !out.contains(link) && (!src_aligned.contains(&link.src) || !tgt_aligned.contains(&link.tgt)) {
            out.insert(*link);
            src_aligned.insert(link.src);
            tgt_aligned.insert(link.tgt);
        }
    }
    out
}

/// Both directional models, ready to produce symmetrized alignments.
#[derive(Clone, Debug)]
pub struct AlignerModel {
    pub cfg: AlignerConfig,
    pub forward: Trained,
    pub reverse: Option<Trained>,
}

impl AlignerModel {
    /// Trains the reverse direction only when the symmetrization needs it.
    pub fn train(pairs: &[SentencePair], cfg: &AlignerConfig) -> Result<Self> {
        let forward = train(pairs, cfg)?;
        let reverse = match cfg.symmetrization {
            Symmetrization::Forward => None,
            _ => Some(train_reverse(pairs, cfg)?),
        };
        Ok(AlignerModel {
            cfg: cfg.clone(),
            forward,
            reverse,
        })
    }

    pub fn align(&self, pair: &SentencePair) -> Alignment {
        let fwd = viterbi_align(&self.forward.table, &self.cfg, pair);
        let Some(reverse) = &self.reverse else {
            return fwd;
        };
        let (s, t) = surfaces(pair);
        let rev: Alignment = viterbi(&reverse.table, &self.cfg, &t, &s)
            .into_iter()
            .map(|l| AlignmentLink::new(l.tgt, l.src))
            .collect();
        symmetrize(&fwd, &rev, self.cfg.symmetrization)
    }

    pub fn align_all(&self, pairs: &[SentencePair]) -> Vec<Alignment> {
        par::map(pairs, |p| self.align(p))
    }
}
