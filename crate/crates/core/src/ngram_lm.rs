//! Interpolated Kneser-Ney trigram language model with perplexity and OOV
//! reporting, plus ARPA export and import.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::par;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";
pub const ORDER: usize = 3;

const UNK_ID: u32 = 0;
const BOS_ID: u32 = 1;
const EOS_ID: u32 = 2;

/// Discount used when counts-of-counts are degenerate.
pub const FALLBACK_DISCOUNT: f64 = 0.5;

/// Anything that assigns `p(word | history)`. Histories are given oldest
/// first and may be longer than the model order.
pub trait LanguageModel {
    fn prob(&self, history: &[&str], word: &str) -> f64;
    /// Whether `word` is in the training vocabulary.
    fn knows(&self, word: &str) -> bool;
    /// Every word the model can predict, including `</s>` and `<unk>`.
    fn predictable(&self) -> Vec<String>;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnkPolicy {
    #[default]
    MapToUnk,
    Exclude,
}

impl FromStr for UnkPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "map_to_unk" => Ok(UnkPolicy::MapToUnk),
            "exclude" => Ok(UnkPolicy::Exclude),
            _ => Err(Error::Config(format!("unknown unk policy {s:?}"))),
        }
    }
}

impl fmt::Display for UnkPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnkPolicy::MapToUnk => "map_to_unk",
            UnkPolicy::Exclude => "exclude",
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Context {
    total: u64,
    types: u64,
}

#[derive(Clone, Debug)]
pub struct NGramModel {
    words: Vec<String>,
    ids: HashMap<String, u32>,
    tri: HashMap<(u32, u32, u32), u64>,
    tri_ctx: HashMap<(u32, u32), Context>,
    bi: HashMap<(u32, u32), u64>,
    bi_ctx: HashMap<u32, Context>,
    uni: Vec<u64>,
    uni_ctx: Context,
    discounts: [f64; ORDER],
}

fn discount(counts: impl Iterator<Item = u64>, order: usize) -> f64 {
    let (mut n1, mut n2) = (0u64, 0u64);
    for c in counts {
        match c {
            1 => n1 += 1,
            2 => n2 += 1,
            _ => {}
        }
    }
    if n1 == 0 || n2 == 0 {
        log::warn!("order-{order} counts-of-counts are degenerate (n1={n1}, n2={n2}); using D={FALLBACK_DISCOUNT}");
        return FALLBACK_DISCOUNT;
    }
    n1 as f64 / (n1 + 2 * n2) as f64
}

fn contexts<K: std::hash::Hash + Eq + Copy, F: Fn(&K) -> C, C: std::hash::Hash + Eq>(
    table: &HashMap<K, u64>,
    ctx: F,
) -> HashMap<C, Context> {
    let mut out: HashMap<C, Context> = HashMap::new();
    for (k, &c) in table {
        let e = out.entry(ctx(k)).or_default();
        e.total += c;
        e.types += 1;
    }
    out
}

impl NGramModel {
    pub fn train(corpus: &[Vec<String>]) -> Result<Self> {
        if corpus.is_empty() || corpus.iter().all(Vec::is_empty) {
            return Err(Error::EmptyCorpus);
        }
        let mut words: Vec<String> = corpus
            .iter()
            .flatten()
            .filter(|w| ![BOS, EOS, UNK].contains(&w.as_str()))
            .cloned()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut all = vec![UNK.to_string(), BOS.to_string(), EOS.to_string()];
        all.append(&mut words);
        let ids: HashMap<String, u32> = all.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();

        let encode = |s: &Vec<String>| -> Vec<u32> {
            let mut v = Vec::with_capacity(s.len() + 2);
            v.push(BOS_ID);
            v.extend(s.iter().map(|w| ids[w]));
            v.push(EOS_ID);
            v
        };
        let partials = par::map_chunks(corpus, |chunk| {
            let mut tri: HashMap<(u32, u32, u32), u64> = HashMap::new();
            let mut starts: HashMap<u32, u64> = HashMap::new();
            for s in chunk.iter().filter(|s| !s.is_empty()) {
                let ids = encode(s);
                *starts.entry(ids[1]).or_default() += 1;
                for w in ids.windows(3) {
                    *tri.entry((w[0], w[1], w[2])).or_default() += 1;
                }
            }
            (tri, starts)
        });
        let mut tri: HashMap<(u32, u32, u32), u64> = HashMap::new();
        let mut starts: HashMap<u32, u64> = HashMap::new();
        for (t, s) in partials {
            for (k, c) in t {
                *tri.entry(k).or_default() += c;
            }
            for (k, c) in s {
                *starts.entry(k).or_default() += c;
            }
        }

        // Bigrams after <s> keep raw counts: nothing can precede <s>.
        let mut bi: HashMap<(u32, u32), u64> = starts.iter().map(|(&w, &c)| ((BOS_ID, w), c)).collect();
        for &(_, v, w) in tri.keys() {
            *bi.entry((v, w)).or_default() += 1;
        }
        let mut uni = vec![0u64; all.len()];
        for &(_, w) in bi.keys() {
            uni[w as usize] += 1;
        }

        let discounts = [
            discount(uni.iter().copied().filter(|&c| c > 0), 1),
            discount(bi.values().copied(), 2),
            discount(tri.values().copied(), 3),
        ];
        let tri_ctx = contexts(&tri, |&(u, v, _)| (u, v));
        let bi_ctx = contexts(&bi, |&(v, _)| v);
        let uni_ctx = Context {
            total: uni.iter().sum(),
            types: uni.iter().filter(|&&c| c > 0).count() as u64,
        };
        Ok(NGramModel {
            words: all,
            ids,
            tri,
            tri_ctx,
            bi,
            bi_ctx,
            uni,
            uni_ctx,
            discounts,
        })
    }

    pub fn discounts(&self) -> [f64; ORDER] {
        self.discounts
    }

    /// Size of the predicted vocabulary: word types, `</s>` and `<unk>`.
    pub fn predict_size(&self) -> usize {
        self.words.len() - 1
    }

    fn id(&self, w: &str) -> u32 {
        match self.ids.get(w) {
            Some(&i) => i,
            None => UNK_ID,
        }
    }

    fn p1(&self, w: u32) -> f64 {
        let d = self.discounts[0];
        let Context { total, types } = self.uni_ctx;
        let uniform = 1.0 / self.predict_size() as f64;
        let c = self.uni[w as usize] as f64;
        ((c - d).max(0.0) + d * types as f64 * uniform) / total as f64
    }

    fn p2(&self, v: u32, w: u32) -> f64 {
        let lower = self.p1(w);
        match self.bi_ctx.get(&v) {
            None => lower,
            Some(ctx) => {
                let d = self.discounts[1];
                let c = self.bi.get(&(v, w)).copied().unwrap_or(0) as f64;
                ((c - d).max(0.0) + d * ctx.types as f64 * lower) / ctx.total as f64
            }
        }
    }

    fn p3(&self, u: u32, v: u32, w: u32) -> f64 {
        let lower = self.p2(v, w);
        match self.tri_ctx.get(&(u, v)) {
            None => lower,
            Some(ctx) => {
                let d = self.discounts[2];
                let c = self.tri.get(&(u, v, w)).copied().unwrap_or(0) as f64;
                ((c - d).max(0.0) + d * ctx.types as f64 * lower) / ctx.total as f64
            }
        }
    }

    fn prob_ids(&self, history: &[u32], w: u32) -> f64 {
        match history {
            [] => self.p1(w),
            [v] => self.p2(*v, w),
            [.., u, v] => self.p3(*u, *v, w),
        }
    }

    fn backoff2(&self, v: u32) -> Option<f64> {
        self.bi_ctx
            .get(&v)
            .map(|c| self.discounts[1] * c.types as f64 / c.total as f64)
    }

    fn backoff3(&self, u: u32, v: u32) -> Option<f64> {
        self.tri_ctx
            .get(&(u, v))
            .map(|c| self.discounts[2] * c.types as f64 / c.total as f64)
    }

    /// ARPA text with log10 interpolated probabilities and backoff weights.
    pub fn write_arpa<W: Write>(&self, mut out: W) -> Result<()> {
        let name = |i: u32| self.words[i as usize].as_str();
        let mut unis: Vec<(&str, u32)> = (0..self.words.len() as u32).map(|i| (name(i), i)).collect();
        unis.sort();
        let mut bis: Vec<_> = self.bi.keys().map(|&(v, w)| ((name(v), name(w)), (v, w))).collect();
        bis.sort();
        let mut tris: Vec<_> = self
            .tri
            .keys()
            .map(|&(u, v, w)| ((name(u), name(v), name(w)), (u, v, w)))
            .collect();
        tris.sort();

        let mut s = String::new();
        s.push_str("\n\\data\\\n");
        s.push_str(&format!(
            "ngram 1={}\nngram 2={}\nngram 3={}\n",
            unis.len(),
            bis.len(),
            tris.len()
        ));
        let bow = |b: Option<f64>| b.map(|b| format!("\t{}", b.log10())).unwrap_or_default();

        s.push_str("\n\\1-grams:\n");
        for (w, i) in unis {
            let lp = if i == BOS_ID { -99.0 } else { self.p1(i).log10() };
            s.push_str(&format!("{lp}\t{w}{}\n", bow(self.backoff2(i))));
        }
        s.push_str("\n\\2-grams:\n");
        for ((a, b), (v, w)) in bis {
            s.push_str(&format!(
                "{}\t{a} {b}{}\n",
                self.p2(v, w).log10(),
                bow(self.backoff3(v, w))
            ));
        }
        s.push_str("\n\\3-grams:\n");
        for ((a, b, c), (u, v, w)) in tris {
            s.push_str(&format!("{}\t{a} {b} {c}\n", self.p3(u, v, w).log10()));
        }
        s.push_str("\n\\end\\\n");
        out.write_all(s.as_bytes()).map_err(Error::Write)
    }
}

impl LanguageModel for NGramModel {
    fn prob(&self, history: &[&str], word: &str) -> f64 {
        let start = history.len().saturating_sub(ORDER - 1);
        let h: Vec<u32> = history[start..].iter().map(|w| self.id(w)).collect();
        self.prob_ids(&h, self.id(word))
    }

    fn knows(&self, word: &str) -> bool {
        self.ids.get(word).is_some_and(|&i| i > EOS_ID)
    }

    fn predictable(&self) -> Vec<String> {
        self.words.iter().filter(|w| w.as_str() != BOS).cloned().collect()
    }
}

pub fn train_lm(corpus: &[Vec<String>]) -> Result<NGramModel> {
    NGramModel::train(corpus)
}

/// Equal probability for every word in a fixed vocabulary.
#[derive(Clone, Debug)]
pub struct UniformModel {
    vocab: Vec<String>,
}

impl UniformModel {
    pub fn new(vocab: Vec<String>) -> Self {
        assert!(!vocab.is_empty(), "uniform model needs a vocabulary");
        UniformModel { vocab }
    }
}

impl LanguageModel for UniformModel {
    fn prob(&self, _: &[&str], _: &str) -> f64 {
        1.0 / self.vocab.len() as f64
    }

    fn knows(&self, word: &str) -> bool {
        self.vocab.iter().any(|v| v == word)
    }

    fn predictable(&self) -> Vec<String> {
        self.vocab.clone()
    }
}

/// Backoff model read from an ARPA file.
#[derive(Clone, Debug, Default)]
pub struct ArpaModel {
    entries: HashMap<Vec<String>, (f64, f64)>,
    order: usize,
}

impl ArpaModel {
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut model = ArpaModel::default();
        let mut section: Option<usize> = None;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::parse_at(lineno, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line == "\\data\\" || line.starts_with("ngram ") {
                continue;
            }
            if line == "\\end\\" {
                break;
            }
            if let Some(n) = line.strip_prefix('\\').and_then(|l| l.strip_suffix("-grams:")) {
                let n: usize = n.parse().map_err(|_| Error::parse_at(lineno, "bad section header"))?;
                model.order = model.order.max(n);
                section = Some(n);
                continue;
            }
            let Some(n) = section else {
                return Err(Error::parse_at(lineno, "entry outside an n-gram section"));
            };
            let fields: Vec<&str> = line.split('\t').collect();
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse_at(lineno, format!("bad number {s:?}")))
            };
            let (lp, gram, bow) = match fields[..] {
                [lp, gram] => (num(lp)?, gram, 0.0),
                [lp, gram, bow] => (num(lp)?, gram, num(bow)?),
                _ => return Err(Error::parse_at(lineno, "expected `logp<TAB>ngram[<TAB>backoff]`")),
            };
            let words: Vec<String> = gram.split(' ').map(str::to_string).collect();
            if words.len() != n {
                return Err(Error::parse_at(lineno, format!("expected a {n}-gram")));
            }
            model.entries.insert(words, (lp, bow));
        }
        if model.order == 0 {
            return Err(Error::parse("no n-gram sections"));
        }
        Ok(model)
    }

    fn log10_prob(&self, context: &[String], word: &str) -> f64 {
        let mut key = context.to_vec();
        key.push(word.to_string());
        if let Some(&(lp, _)) = self.entries.get(&key) {
            return lp;
        }
        if context.is_empty() {
            return f64::NEG_INFINITY;
        }
        let bow = self.entries.get(context).map(|e| e.1).unwrap_or(0.0);
        bow + self.log10_prob(&context[1..], word)
    }
}

impl LanguageModel for ArpaModel {
    fn prob(&self, history: &[&str], word: &str) -> f64 {
        let known = |w: &str| -> String {
            if self.entries.contains_key(&vec![w.to_string()]) {
                w.to_string()
            } else {
                UNK.to_string()
            }
        };
        let start = history.len().saturating_sub(self.order - 1);
        let context: Vec<String> = history[start..].iter().map(|w| known(w)).collect();
        10f64.powf(self.log10_prob(&context, &known(word)))
    }

    fn knows(&self, word: &str) -> bool {
        ![BOS, EOS, UNK].contains(&word) && self.entries.contains_key(&vec![word.to_string()])
    }

    fn predictable(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .entries
            .keys()
            .filter(|k| k.len() == 1 && k[0] != BOS)
            .map(|k| k[0].clone())
            .collect();
        v.sort();
        v
    }
}

/// A tokenized test set with a content-derived identifier.
#[derive(Clone, Debug)]
pub struct TestSet {
    pub id: String,
    pub sentences: Vec<Vec<String>>,
}

impl TestSet {
    pub fn new(name: &str, sentences: Vec<Vec<String>>) -> Self {
        let mut h = Sha256::new();
        for s in &sentences {
            h.update(s.join(" ").as_bytes());
            h.update(b"\n");
        }
        let digest = hex::encode(h.finalize());
        TestSet {
            id: format!("{name}@{}", &digest[..12]),
            sentences,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalReport {
    pub testset: String,
    pub policy: UnkPolicy,
    pub ppl: f64,
    pub oov_count: usize,
    /// Scored tokens: every word under `map_to_unk`, in-vocabulary words
    /// under `exclude`. `</s>` is not scored.
    pub total_tokens: usize,
    /// Natural-log probability mass of the scored tokens.
    pub log_prob_sum: f64,
}

pub fn evaluate(model: &dyn LanguageModelSync, test: &TestSet, policy: UnkPolicy) -> Result<EvalReport> {
    if test.sentences.iter().all(Vec::is_empty) {
        return Err(Error::EmptyCorpus);
    }
    let per_sentence = par::map(&test.sentences, |s| {
        let mut history: Vec<&str> = vec![BOS];
        let mut logps = Vec::with_capacity(s.len());
        let mut oov = 0;
        for w in s {
            let known = model.knows(w);
            if !known {
                oov += 1;
            }
            if known || policy == UnkPolicy::MapToUnk {
                let start = history.len().saturating_sub(ORDER - 1);
                logps.push(model.prob(&history[start..], w).ln());
            }
            history.push(if known { w.as_str() } else { UNK });
        }
        (logps, oov)
    });
    let oov_count = per_sentence.iter().map(|p| p.1).sum();
    // Summing sorted terms keeps the result independent of sentence order.
    let mut logps: Vec<f64> = per_sentence.into_iter().flat_map(|p| p.0).collect();
    if logps.is_empty() {
        return Err(Error::NoScoreableTokens);
    }
    logps.sort_by(f64::total_cmp);
    let log_prob_sum: f64 = logps.iter().sum();
    let total_tokens = logps.len();
    Ok(EvalReport {
        testset: test.id.clone(),
        policy,
        ppl: (-log_prob_sum / total_tokens as f64).exp(),
        oov_count,
        total_tokens,
        log_prob_sum,
    })
}

/// Marker for models usable from parallel evaluation.
pub trait LanguageModelSync: LanguageModel + Sync {}
impl<T: LanguageModel + Sync> LanguageModelSync for T {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub testset: String,
    pub policy: UnkPolicy,
    pub ppl_baseline: f64,
    pub ppl_augmented: f64,
    /// `(baseline - augmented) / baseline`.
    pub relative_gain: f64,
    /// Augmented OOV count minus baseline OOV count.
    pub oov_delta: i64,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: ppl {:.2} -> {:.2} ({:.1}% relative gain), oov delta {:+}",
            self.testset,
            self.ppl_baseline,
            self.ppl_augmented,
            100.0 * self.relative_gain,
            self.oov_delta
        )
    }
}

pub fn compare_runs(baseline: &EvalReport, augmented: &EvalReport) -> Result<Comparison> {
    if baseline.testset != augmented.testset || baseline.policy != augmented.policy {
        return Err(Error::TestsetMismatch(
            format!("{}/{}", baseline.testset, baseline.policy),
            format!("{}/{}", augmented.testset, augmented.policy),
        ));
    }
    Ok(Comparison {
        testset: baseline.testset.clone(),
        policy: baseline.policy,
        ppl_baseline: baseline.ppl,
        ppl_augmented: augmented.ppl,
        relative_gain: (baseline.ppl - augmented.ppl) / baseline.ppl,
        oov_delta: augmented.oov_count as i64 - baseline.oov_count as i64,
    })
}

/// Collect the reports in `reports` keyed by test-set id.
pub fn index_reports(reports: &[EvalReport]) -> BTreeMap<String, &EvalReport> {
    reports.iter().map(|r| (r.testset.clone(), r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(text: &str) -> Vec<Vec<String>> {
        text.split('/')
            .map(|s| s.split_whitespace().map(str::to_string).collect())
            .collect()
    }

    fn report(ppl: f64) -> EvalReport {
        EvalReport {
            testset: "t@0".into(),
            policy: UnkPolicy::MapToUnk,
            ppl,
            oov_count: 3,
            total_tokens: 10,
            log_prob_sum: -(ppl.ln() * 10.0),
        }
    }

    #[test]
    fn relative_gain_examples() {
        let c = compare_runs(&report(3241.0), &report(2298.0)).unwrap();
        assert_eq!(format!("{:.1}", 100.0 * c.relative_gain), "29.1");
        let c = compare_runs(&report(3213.0), &report(2135.0)).unwrap();
        assert_eq!(format!("{:.1}", 100.0 * c.relative_gain), "33.6");
        let c = compare_runs(&report(50.0), &report(50.0)).unwrap();
        assert_eq!(c.relative_gain, 0.0);
        let mut other = report(1.0);
        other.testset = "u@1".into();
        assert!(matches!(
            compare_runs(&report(2.0), &other),
            Err(Error::TestsetMismatch(..))
        ));
    }

    #[test]
    fn uniform_model_perplexity() {
        let m = UniformModel::new(["a", "b", "c", "d"].map(String::from).to_vec());
        let t = TestSet::new("t", corpus("a b c / d d / a"));
        let r = evaluate(&m, &t, UnkPolicy::MapToUnk).unwrap();
        assert!((r.ppl - 4.0).abs() < 1e-9);
        assert_eq!(r.total_tokens, 6);
    }

    #[test]
    fn repeated_word_beats_unknown() {
        let m = train_lm(&corpus("a a a")).unwrap();
        assert!(m.prob(&["a", "a"], "a") > m.prob(&["a", "a"], UNK));
    }

    #[test]
    fn all_oov_with_exclude_fails() {
        let m = train_lm(&corpus("a b")).unwrap();
        let t = TestSet::new("t", corpus("x y"));
        let err = evaluate(&m, &t, UnkPolicy::Exclude).unwrap_err();
        assert_eq!(err.to_string(), "no scoreable tokens");
        let r = evaluate(&m, &t, UnkPolicy::MapToUnk).unwrap();
        assert_eq!((r.oov_count, r.total_tokens), (2, 2));
    }

    #[test]
    fn empty_inputs_fail() {
        assert!(matches!(train_lm(&[]), Err(Error::EmptyCorpus)));
        let m = train_lm(&corpus("a b")).unwrap();
        assert!(evaluate(&m, &TestSet::new("t", vec![]), UnkPolicy::MapToUnk).is_err());
    }

    #[test]
    fn normalized_over_vocab() {
        let m = train_lm(&corpus("a b c / a c b a / c c / b")).unwrap();
        let vocab = m.predictable();
        for h in [
            vec![],
            vec![BOS],
            vec!["a"],
            vec!["a", "c"],
            vec!["zz", "b"],
            vec![BOS, "a"],
        ] {
            let s: f64 = vocab.iter().map(|w| m.prob(&h, w)).sum();
            assert!((s - 1.0).abs() < 1e-9, "{h:?}: {s}");
        }
    }

    #[test]
    fn arpa_round_trip() {
        let m = train_lm(&corpus("a b c / a c b a / c c / b")).unwrap();
        let mut buf = Vec::new();
        m.write_arpa(&mut buf).unwrap();
        let a = ArpaModel::read(buf.as_slice()).unwrap();
        assert_eq!(a.predictable(), {
            let mut v = m.predictable();
            v.sort();
            v
        });
        for h in [
            vec![BOS],
            vec!["a", "c"],
            vec!["c", "a"],
            vec!["q", "b"],
            vec![BOS, "b"],
        ] {
            for w in ["a", "b", "c", EOS, "q"] {
                let (x, y) = (m.prob(&h, w), a.prob(&h, w));
                assert!((x - y).abs() < 1e-12 * x.max(1.0), "{h:?} {w}: {x} vs {y}");
            }
        }
        assert!(ArpaModel::read("junk\n".as_bytes()).is_err());
    }

    #[test]
    fn evaluation_ignores_sentence_order() {
        let m = train_lm(&corpus("a b c / a c b a / c c / b")).unwrap();
        let fwd = TestSet::new("t", corpus("a b / c a b / b b c a"));
        let mut rev = fwd.clone();
        rev.sentences.reverse();
        let (x, y) = (
            evaluate(&m, &fwd, UnkPolicy::MapToUnk).unwrap(),
            evaluate(&m, &rev, UnkPolicy::MapToUnk).unwrap(),
        );
        assert_eq!(x.ppl.to_bits(), y.ppl.to_bits());
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("exclude".parse::<UnkPolicy>().unwrap(), UnkPolicy::Exclude);
        assert!("drop".parse::<UnkPolicy>().is_err());
        assert_eq!(UnkPolicy::MapToUnk.to_string(), "map_to_unk");
    }
}
