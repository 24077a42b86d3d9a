//! Acceptability filtering and corpus selection, either uniformly at random
//! or stratified by switch-point count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus_io::Lang;
use crate::error::{Error, Result};
use crate::generator::CsCandidate;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Random,
    Spf,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Method::Random),
            "spf" => Ok(Method::Spf),
            _ => Err(Error::Config(format!("unknown sampling method {s:?}"))),
        }
    }
}

/// One histogram cell: an exact switch-point count, or every count from
/// `n` upwards (written `n+`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bucket {
    Exact(usize),
    AtLeast(usize),
}

impl Bucket {
    fn lower(self) -> usize {
        match self {
            Bucket::Exact(n) | Bucket::AtLeast(n) => n,
        }
    }

    pub fn contains(self, switch_points: usize) -> bool {
        match self {
            Bucket::Exact(n) => switch_points == n,
            Bucket::AtLeast(n) => switch_points >= n,
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bucket::Exact(n) => write!(f, "{n}"),
            Bucket::AtLeast(n) => write!(f, "{n}+"),
        }
    }
}

impl FromStr for Bucket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad switch-point bucket {s:?}"));
        match s.strip_suffix('+') {
            Some(n) => n.parse().map(Bucket::AtLeast).map_err(|_| bad()),
            None => s.parse().map(Bucket::Exact).map_err(|_| bad()),
        }
    }
}

/// Target distribution over switch-point counts.
#[derive(Clone, Debug, PartialEq)]
pub struct SpfTarget {
    cells: Vec<(Bucket, f64)>,
}

impl Default for SpfTarget {
    fn default() -> Self {
        SpfTarget {
            cells: vec![
                (Bucket::Exact(1), 0.45),
                (Bucket::Exact(2), 0.30),
                (Bucket::Exact(3), 0.15),
                (Bucket::AtLeast(4), 0.10),
            ],
        }
    }
}

impl SpfTarget {
    pub fn new(mut cells: Vec<(Bucket, f64)>) -> Result<Self> {
        cells.sort_by_key(|c| (c.0.lower(), c.0));
        let t = SpfTarget { cells };
        t.validate()?;
        Ok(t)
    }

    pub fn cells(&self) -> &[(Bucket, f64)] {
        &self.cells
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::Config("spf target is empty".into()));
        }
        for &(b, w) in &self.cells {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Config(format!("spf weight for {b} must be non-negative")));
            }
        }
        let sum: f64 = self.cells.iter().map(|c| c.1).sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::Config(format!("spf target sums to {sum}, expected 1")));
        }
        for (i, &(a, _)) in self.cells.iter().enumerate() {
            for &(b, _) in &self.cells[i + 1..] {
                let overlap = match (a, b) {
                    (Bucket::Exact(x), Bucket::Exact(y)) => x == y,
                    (Bucket::AtLeast(x), other) | (other, Bucket::AtLeast(x)) => other.lower() >= x,
                };
                if overlap {
                    return Err(Error::Config(format!("spf buckets {a} and {b} overlap")));
                }
            }
        }
        Ok(())
    }

    pub fn bucket_of(&self, switch_points: usize) -> Option<usize> {
        self.cells.iter().position(|c| c.0.contains(switch_points))
    }

    /// Lines of `count weight`, where count may be `n+`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cells = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [count, weight] = fields[..] else {
                return Err(Error::parse_at(idx + 1, "expected `count weight`"));
            };
            let bucket = count
                .parse()
                .map_err(|e: Error| Error::parse_at(idx + 1, e.to_string()))?;
            let weight: f64 = weight
                .parse()
                .map_err(|_| Error::parse_at(idx + 1, format!("bad weight {weight:?}")))?;
            cells.push((bucket, weight));
        }
        SpfTarget::new(cells)
    }
}

impl Serialize for SpfTarget {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, f64> = self.cells.iter().map(|(b, w)| (b.to_string(), *w)).collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpfTarget {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, f64>::deserialize(d)?;
        let cells = map
            .into_iter()
            .map(|(k, w)| k.parse().map(|b| (b, w)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        SpfTarget::new(cells).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub method: Method,
    pub k: usize,
    pub seed: u64,
    pub max_en_fraction: f64,
    pub require_ar_initial: bool,
    pub spf_target: SpfTarget,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            method: Method::Random,
            k: 1000,
            seed: 0,
            max_en_fraction: 0.45,
            require_ar_initial: true,
            spf_target: SpfTarget::default(),
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_en_fraction > 0.0 && self.max_en_fraction < 1.0) {
            return Err(Error::Config(
                "max_en_fraction must lie strictly between 0 and 1".into(),
            ));
        }
        self.spf_target.validate()
    }
}

pub fn en_fraction(c: &CsCandidate) -> f64 {
    let en = c.tokens.iter().filter(|t| t.lang == Lang::En).count();
    en as f64 / c.tokens.len() as f64
}

pub fn is_acceptable(c: &CsCandidate, cfg: &SamplerConfig) -> bool {
    let ar_initial = c.tokens.first().is_some_and(|t| t.lang == Lang::Ar);
    (ar_initial || !cfg.require_ar_initial) && c.switch_points > 0 && en_fraction(c) <= cfg.max_en_fraction
}

pub fn filter_constraints(candidates: &[CsCandidate], cfg: &SamplerConfig) -> Vec<CsCandidate> {
    candidates.iter().filter(|c| is_acceptable(c, cfg)).cloned().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sampled {
    pub candidate: CsCandidate,
    /// Switch-point bucket for stratified samples.
    pub bucket: Option<Bucket>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sample {
    pub selected: Vec<Sampled>,
    /// How many items short of `k` the sample is.
    pub shortfall: usize,
}

fn pick(rng: &mut ChaCha8Rng, n: usize, amount: usize) -> Vec<usize> {
    let mut idx = index::sample(rng, n, amount).into_vec();
    idx.sort_unstable();
    idx
}

/// Uniform sample without replacement, in input order.
pub fn sample_random(candidates: &[CsCandidate], cfg: &SamplerConfig) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let amount = cfg.k.min(candidates.len());
    let selected = pick(&mut rng, candidates.len(), amount)
        .into_iter()
        .map(|i| Sampled {
            candidate: candidates[i].clone(),
            bucket: None,
        })
        .collect();
    Sample {
        selected,
        shortfall: cfg.k - amount,
    }
}

/// Split `total` into integer parts proportional to `weights`: floors
/// first, then leftover units to the largest remainders (ties to the
/// earlier index).
pub fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 || total == 0 {
        return vec![0; weights.len()];
    }
    let exact: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut parts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = parts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(total.saturating_sub(assigned)) {
        parts[i] += 1;
    }
    parts
}

/// Per-bucket allocation: target quotas, with any bucket's shortfall
/// handed to buckets that still have supply, in proportion to their
/// target weight.
pub fn allocate(k: usize, weights: &[f64], supply: &[usize]) -> Vec<usize> {
    let mut alloc: Vec<usize> = apportion(k, weights)
        .into_iter()
        .zip(supply)
        .map(|(q, &s)| q.min(s))
        .collect();
    loop {
        let deficit = k - alloc.iter().sum::<usize>();
        let open: Vec<f64> = (0..weights.len())
            .map(|i| if alloc[i] < supply[i] { weights[i] } else { 0.0 })
            .collect();
        if deficit == 0 || open.iter().all(|&w| w <= 0.0) {
            return alloc;
        }
        let mut moved = 0;
        for (i, extra) in apportion(deficit, &open).into_iter().enumerate() {
            let add = extra.min(supply[i] - alloc[i]);
            alloc[i] += add;
            moved += add;
        }
        if moved == 0 {
            return alloc;
        }
    }
}

/// Stratified sample by switch-point bucket.
pub fn sample_spf(candidates: &[CsCandidate], cfg: &SamplerConfig) -> Sample {
    let cells = cfg.spf_target.cells();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
    for (i, c) in candidates.iter().enumerate() {
        if let Some(b) = cfg.spf_target.bucket_of(c.switch_points) {
            members[b].push(i);
        }
    }
    let weights: Vec<f64> = cells.iter().map(|c| c.1).collect();
    let supply: Vec<usize> = members.iter().map(Vec::len).collect();
    let alloc = allocate(cfg.k, &weights, &supply);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut chosen: Vec<(usize, Bucket)> = Vec::new();
    for (b, m) in members.iter().enumerate() {
        for j in pick(&mut rng, m.len(), alloc[b]) {
            chosen.push((m[j], cells[b].0));
        }
    }
    chosen.sort_unstable();
    let shortfall = cfg.k - chosen.len();
    if shortfall > 0 {
        log::warn!("spf sampling is {shortfall} candidates short of k={}", cfg.k);
    }
    Sample {
        selected: chosen
            .into_iter()
            .map(|(i, b)| Sampled {
                candidate: candidates[i].clone(),
                bucket: Some(b),
            })
            .collect(),
        shortfall,
    }
}

/// Filter, then sample with the configured method.
pub fn sample(candidates: &[CsCandidate], cfg: &SamplerConfig) -> Sample {
    let pool = filter_constraints(candidates, cfg);
    match cfg.method {
        Method::Random => sample_random(&pool, cfg),
        Method::Spf => sample_spf(&pool, cfg),
    }
}
