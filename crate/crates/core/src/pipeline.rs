//! File-to-file stage commands and the end-to-end pipeline run.
//!
//! Every stage reads plain-text corpora and writes plain-text corpora plus a
//! JSON stats file, so any stage can be replaced by an external tool.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::aligner::{AlignerConfig, AlignerModel};
use crate::corpus_io::{
    read_cs_corpus, read_parallel, read_parallel_paired, read_pharaoh_lines, read_ptb_lines, read_sentences,
    write_cs_corpus, write_parallel, write_pharaoh, Alignment, Lang, ParallelFormat, ParseTree, SentencePair, Token,
};
use crate::error::{Error, Result};
use crate::generator::{generate, CsCandidate, GeneratorConfig};
use crate::ngram_lm::{compare_runs, evaluate, train_lm, Comparison, EvalReport, NGramModel, TestSet, UnkPolicy};
use crate::par;
use crate::projector::{project, BilingualTree};
use crate::sampler::{self, Method, SamplerConfig};
use crate::segmenter::{segment_sentence, Lexicon, DEFAULT_MIN_STEM};

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    let text = serde_json::to_string_pretty(value).expect("stats serialize");
    writeln!(out, "{text}").map_err(Error::Write)?;
    out.flush().map_err(Error::Write)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?).map_err(|e| Error::parse(format!("{}: {e}", path.display())))
}

fn require(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingInput(path.to_path_buf()))
    }
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Where a parallel corpus comes from: one `src<TAB>tgt` file, or two
/// line-aligned files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParallelSource {
    Tsv(PathBuf),
    Split { src: PathBuf, tgt: PathBuf },
}

impl ParallelSource {
    pub fn read(&self) -> Result<Vec<SentencePair>> {
        match self {
            ParallelSource::Tsv(p) => read_parallel(open(p)?, &ParallelFormat::default()),
            ParallelSource::Split { src, tgt } => read_parallel_paired(open(src)?, open(tgt)?),
        }
    }

    fn paths(&self) -> Vec<&Path> {
        match self {
            ParallelSource::Tsv(p) => vec![p],
            ParallelSource::Split { src, tgt } => vec![src, tgt],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmenterConfig {
    pub lexicon: Option<PathBuf>,
    pub min_stem: usize,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            lexicon: None,
            min_stem: DEFAULT_MIN_STEM,
        }
    }
}

impl SegmenterConfig {
    pub fn lexicon(&self) -> Result<Lexicon> {
        let mut lex = match &self.lexicon {
            Some(p) => Lexicon::parse(open(p)?)?,
            None => Lexicon::default(),
        };
        lex.min_stem = self.min_stem;
        Ok(lex)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LmConfig {
    pub unk_policy: UnkPolicy,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SegmentStats {
    pub sentences: usize,
    pub words_in: usize,
    pub morphemes_out: usize,
}

/// Clitic-segment the Arabic side of a parallel corpus.
pub fn cmd_segment(input: &ParallelSource, cfg: &SegmenterConfig, out: &Path) -> Result<SegmentStats> {
    let lex = cfg.lexicon()?;
    let mut pairs = input.read()?;
    let mut stats = SegmentStats {
        sentences: pairs.len(),
        ..SegmentStats::default()
    };
    for p in &mut pairs {
        stats.words_in += p.tgt.len();
        p.tgt = segment_sentence(&p.tgt, &lex);
        stats.morphemes_out += p.tgt.len();
    }
    write_parallel(&pairs, create(out)?)?;
    Ok(stats)
}

/// Clitic-segment one Arabic sentence per line; blank lines stay blank.
pub fn cmd_segment_text(input: &Path, cfg: &SegmenterConfig, out: &Path) -> Result<SegmentStats> {
    let lex = cfg.lexicon()?;
    let text = fs::read_to_string(input).map_err(|e| Error::io(input, e))?;
    let mut w = create(out)?;
    let mut stats = SegmentStats::default();
    for line in text.lines() {
        let toks = Token::split(line, Lang::Ar);
        if !toks.is_empty() {
            stats.sentences += 1;
        }
        stats.words_in += toks.len();
        let seg = segment_sentence(&toks, &lex);
        stats.morphemes_out += seg.len();
        writeln!(w, "{}", crate::corpus_io::join_surfaces(&seg)).map_err(Error::Write)?;
    }
    w.flush().map_err(Error::Write)?;
    Ok(stats)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AlignStats {
    pub pairs: usize,
    /// Corpus log-likelihood at the start of each EM iteration, forward.
    pub log_likelihood: Vec<f64>,
    pub reverse_log_likelihood: Vec<f64>,
    pub links: usize,
}

pub fn cmd_align(
    input: &ParallelSource,
    cfg: &AlignerConfig,
    out: &Path,
    table_out: Option<&Path>,
) -> Result<AlignStats> {
    let pairs = input.read()?;
    let model = AlignerModel::train(&pairs, cfg)?;
    let alignments = model.align_all(&pairs);
    let mut w = create(out)?;
    for a in &alignments {
        writeln!(w, "{}", write_pharaoh(a)).map_err(Error::Write)?;
    }
    w.flush().map_err(Error::Write)?;
    if let Some(path) = table_out {
        model.forward.table.write_tsv(create(path)?)?;
    }
    Ok(AlignStats {
        pairs: pairs.len(),
        log_likelihood: model.forward.log_likelihood.clone(),
        reverse_log_likelihood: model.reverse.map(|r| r.log_likelihood).unwrap_or_default(),
        links: alignments.iter().map(Alignment::len).sum(),
    })
}

/// Pairs, trees and alignments joined line by line.
pub struct ProjectionInput {
    pub corpus: ParallelSource,
    pub trees: PathBuf,
    pub alignments: PathBuf,
}

enum Projected {
    Tree(BilingualTree),
    Unprojectable(String),
}

fn load_projection(input: &ProjectionInput) -> Result<Vec<(SentencePair, Option<ParseTree>, Alignment)>> {
    let pairs = input.corpus.read()?;
    let trees = read_ptb_lines(open(&input.trees)?)?;
    let alignments = read_pharaoh_lines(open(&input.alignments)?)?;
    let n = pairs.len();
    if trees.len() != n || alignments.len() != n {
        return Err(Error::LineMismatch(n.min(trees.len()).min(alignments.len()) + 1));
    }
    pairs
        .into_iter()
        .zip(trees)
        .zip(alignments)
        .enumerate()
        .map(|(i, ((p, t), a))| {
            p.check_alignment(&a).map_err(|e| e.at(i + 1))?;
            Ok((p, t, a))
        })
        .collect()
}

fn project_all(rows: &[(SentencePair, Option<ParseTree>, Alignment)]) -> Result<Vec<Projected>> {
    par::map(rows, |(p, tree, a)| match tree {
        None => Ok(Projected::Unprojectable("no tree".into())),
        Some(tree) => match project(tree, a, &p.src, &p.tgt) {
            Ok(t) => Ok(Projected::Tree(t)),
            Err(Error::Unprojectable(why)) => Ok(Projected::Unprojectable(why)),
            Err(e) => Err(e.at(p.line.max(1))),
        },
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProjectStats {
    pub sentences_in: usize,
    pub projected: usize,
    pub unprojectable: usize,
}

/// Write one bracketed bilingual tree per line, or `UNPROJECTABLE <reason>`.
pub fn cmd_project(input: &ProjectionInput, out: &Path) -> Result<ProjectStats> {
    let rows = load_projection(input)?;
    let projected = project_all(&rows)?;
    let mut w = create(out)?;
    let mut stats = ProjectStats {
        sentences_in: rows.len(),
        ..ProjectStats::default()
    };
    for p in &projected {
        match p {
            Projected::Tree(t) => {
                stats.projected += 1;
                writeln!(w, "{}", t.to_bracketed())
            }
            Projected::Unprojectable(why) => {
                stats.unprojectable += 1;
                writeln!(w, "UNPROJECTABLE {why}")
            }
        }
        .map_err(Error::Write)?;
    }
    w.flush().map_err(Error::Write)?;
    Ok(stats)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerateStats {
    pub sentences_in: usize,
    pub unprojectable: usize,
    pub candidates_out: usize,
    pub truncated: usize,
}

/// Project and render every sentence; write tagged candidates.
pub fn cmd_generate(input: &ProjectionInput, cfg: &GeneratorConfig, out: &Path) -> Result<GenerateStats> {
    cfg.validate()?;
    let rows = load_projection(input)?;
    let projected = project_all(&rows)?;
    let work: Vec<(&SentencePair, &Projected)> = rows.iter().map(|r| &r.0).zip(&projected).collect();
    let generations = par::map(&work, |(p, pr)| match pr {
        Projected::Tree(t) => Some(generate(t, cfg, &p.id)),
        Projected::Unprojectable(_) => None,
    });
    let mut stats = GenerateStats {
        sentences_in: rows.len(),
        ..GenerateStats::default()
    };
    let mut all: Vec<CsCandidate> = Vec::new();
    for g in generations {
        match g {
            None => stats.unprojectable += 1,
            Some(g) => {
                stats.truncated += usize::from(g.truncated);
                all.extend(g.candidates);
            }
        }
    }
    stats.candidates_out = all.len();
    let mut w = create(out)?;
    write_cs_corpus(&all, &mut w, true)?;
    w.flush().map_err(Error::Write)?;
    Ok(stats)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleManifest {
    pub method: Method,
    pub seed: u64,
    pub k: usize,
    pub max_en_fraction: f64,
    pub require_ar_initial: bool,
    pub candidates_in: usize,
    pub dropped_not_ar_initial: usize,
    pub dropped_en_fraction: usize,
    pub dropped_monolingual: usize,
    pub pool: usize,
    pub selected: usize,
    pub shortfall: usize,
    /// Selected count per switch-point bucket (stratified sampling only).
    pub buckets: BTreeMap<String, usize>,
}

fn drop_counts(candidates: &[CsCandidate], cfg: &SamplerConfig, m: &mut SampleManifest) {
    for c in candidates {
        if cfg.require_ar_initial && c.tokens[0].lang != Lang::Ar {
            m.dropped_not_ar_initial += 1;
        } else if sampler::en_fraction(c) > cfg.max_en_fraction {
            m.dropped_en_fraction += 1;
        } else if c.switch_points == 0 {
            m.dropped_monolingual += 1;
        }
    }
}

/// Filter and sample candidates; write the untagged surface corpus, and for
/// stratified sampling a line-aligned bucket file next to it.
pub fn cmd_sample(
    candidates: &Path,
    cfg: &SamplerConfig,
    out: &Path,
    buckets_out: Option<&Path>,
) -> Result<SampleManifest> {
    if cfg.k == 0 {
        return Err(Error::Config("k must be positive".into()));
    }
    cfg.validate()?;
    let pool = read_cs_corpus(open(candidates)?)?;
    let mut manifest = SampleManifest {
        method: cfg.method,
        seed: cfg.seed,
        k: cfg.k,
        max_en_fraction: cfg.max_en_fraction,
        require_ar_initial: cfg.require_ar_initial,
        candidates_in: pool.len(),
        ..SampleManifest::default()
    };
    drop_counts(&pool, cfg, &mut manifest);
    let sample = sampler::sample(&pool, cfg);
    manifest.pool =
        pool.len() - manifest.dropped_not_ar_initial - manifest.dropped_en_fraction - manifest.dropped_monolingual;
    manifest.selected = sample.selected.len();
    manifest.shortfall = sample.shortfall;

    let chosen: Vec<CsCandidate> = sample.selected.iter().map(|s| s.candidate.clone()).collect();
    let mut w = create(out)?;
    write_cs_corpus(&chosen, &mut w, false)?;
    w.flush().map_err(Error::Write)?;
    if cfg.method == Method::Spf {
        for s in &sample.selected {
            if let Some(b) = s.bucket {
                *manifest.buckets.entry(b.to_string()).or_default() += 1;
            }
        }
        if let Some(path) = buckets_out {
            let mut w = create(path)?;
            for s in &sample.selected {
                let tag = s.bucket.map(|b| b.to_string()).unwrap_or_default();
                writeln!(w, "{tag}").map_err(Error::Write)?;
            }
            w.flush().map_err(Error::Write)?;
        }
    }
    Ok(manifest)
}

fn read_corpora(paths: &[PathBuf]) -> Result<Vec<Vec<String>>> {
    let mut all = Vec::new();
    for p in paths {
        all.extend(read_sentences(open(p)?)?);
    }
    Ok(all)
}

pub fn train_on(paths: &[PathBuf]) -> Result<NGramModel> {
    if paths.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    train_lm(&read_corpora(paths)?)
}

/// Train on the concatenation of `train` and write an ARPA model.
pub fn cmd_lm_train(train: &[PathBuf], out: &Path) -> Result<NGramModel> {
    let model = train_on(train)?;
    let mut w = create(out)?;
    model.write_arpa(&mut w)?;
    w.flush().map_err(Error::Write)?;
    Ok(model)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LmReport {
    pub reports: Vec<EvalReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<Comparison>,
}

pub fn load_testsets(paths: &[PathBuf]) -> Result<Vec<TestSet>> {
    paths
        .iter()
        .map(|p| {
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(TestSet::new(&name, read_sentences(open(p)?)?))
        })
        .collect()
}

/// Evaluate `model` on each test set, comparing against `baseline` reports
/// when given. Every test set must have a baseline entry under the same
/// policy.
pub fn lm_eval(
    model: &NGramModel,
    tests: &[TestSet],
    policy: UnkPolicy,
    baseline: Option<&LmReport>,
) -> Result<LmReport> {
    let reports = tests
        .iter()
        .map(|t| evaluate(model, t, policy))
        .collect::<Result<Vec<_>>>()?;
    let mut comparisons = Vec::new();
    if let Some(base) = baseline {
        for r in &reports {
            let b = base
                .reports
                .iter()
                .find(|b| b.testset == r.testset && b.policy == r.policy)
                .ok_or_else(|| Error::TestsetMismatch(r.testset.clone(), "no matching baseline report".into()))?;
            comparisons.push(compare_runs(b, r)?);
        }
    }
    Ok(LmReport { reports, comparisons })
}

pub fn cmd_lm_eval(
    train: &[PathBuf],
    tests: &[PathBuf],
    policy: UnkPolicy,
    baseline: Option<&Path>,
    out: &Path,
) -> Result<LmReport> {
    if tests.is_empty() {
        return Err(Error::Config("no test sets given".into()));
    }
    let baseline: Option<LmReport> = baseline.map(read_json).transpose()?;
    let model = train_on(train)?;
    let report = lm_eval(&model, &load_testsets(tests)?, policy, baseline.as_ref())?;
    write_json(out, &report)?;
    Ok(report)
}

/// Input files for a full run. Relative paths resolve against the config
/// file's directory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    /// `English<TAB>Arabic` corpus; Arabic unsegmented.
    pub parallel: Option<PathBuf>,
    pub src: Option<PathBuf>,
    pub tgt: Option<PathBuf>,
    /// English constituency trees, one per pair.
    pub trees: Option<PathBuf>,
    /// Pre-computed alignments; when set, the aligner stage is skipped.
    pub alignments: Option<PathBuf>,
    /// Monolingual LM training corpora.
    pub lm_train: Vec<PathBuf>,
    pub lm_test: Vec<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Overrides every stage seed when set.
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub inputs: Inputs,
    pub segmenter: SegmenterConfig,
    pub aligner: AlignerConfig,
    pub generator: GeneratorConfig,
    pub sampler: SamplerConfig,
    pub lm: LmConfig,
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    /// Parse a config file and resolve its relative paths.
    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = PipelineConfig::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        cfg.resolve(&base);
        Ok((cfg, hex::encode(Sha256::digest(text.as_bytes()))))
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let i = &mut self.inputs;
        for p in [
            &mut i.parallel,
            &mut i.src,
            &mut i.tgt,
            &mut i.trees,
            &mut i.alignments,
            &mut self.segmenter.lexicon,
            &mut self.out,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        i.lm_train.iter_mut().chain(i.lm_test.iter_mut()).for_each(fix);
    }

    /// Push the global seed into every stochastic stage.
    pub fn apply_seed(&mut self, seed: Option<u64>) {
        if let Some(s) = seed.or(self.seed) {
            self.seed = Some(s);
            self.aligner.seed = s;
            self.sampler.seed = s;
        }
    }

    pub fn parallel_source(&self) -> Result<ParallelSource> {
        let i = &self.inputs;
        match (&i.parallel, &i.src, &i.tgt) {
            (Some(p), None, None) => Ok(ParallelSource::Tsv(p.clone())),
            (None, Some(s), Some(t)) => Ok(ParallelSource::Split {
                src: s.clone(),
                tgt: t.clone(),
            }),
            _ => Err(Error::Config(
                "inputs need either `parallel` or both `src` and `tgt`".into(),
            )),
        }
    }

    /// Check everything a full run needs before any stage starts.
    pub fn validate(&self) -> Result<()> {
        let source = self.parallel_source()?;
        let trees = self
            .inputs
            .trees
            .as_ref()
            .ok_or_else(|| Error::Config("inputs.trees is required".into()))?;
        if self.inputs.lm_test.is_empty() {
            return Err(Error::Config("inputs.lm_test needs at least one test set".into()));
        }
        for p in source.paths() {
            require(p)?;
        }
        require(trees)?;
        for p in self.inputs.alignments.iter().chain(&self.segmenter.lexicon) {
            require(p)?;
        }
        for p in self.inputs.lm_train.iter().chain(&self.inputs.lm_test) {
            require(p)?;
        }
        self.aligner.validate()?;
        self.generator.validate()?;
        self.sampler.validate()?;
        if self.sampler.k == 0 {
            return Err(Error::Config("sampler.k must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub aligner_seed: u64,
    pub sampler_seed: u64,
    pub inputs: BTreeMap<String, String>,
    pub segment: SegmentStats,
    pub align: Option<AlignStats>,
    pub generate: GenerateStats,
    pub sample: SampleManifest,
    pub lm: LmReport,
    /// sha256 of every output file, keyed by file name.
    pub outputs: BTreeMap<String, String>,
}

/// Run every stage into `out`. Outputs of completed stages stay on disk if
/// a later stage fails.
pub fn cmd_pipeline(cfg: &PipelineConfig, config_sha256: &str, out: &Path) -> Result<RunManifest> {
    cfg.validate()?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let source = cfg.parallel_source()?;
    let trees = cfg.inputs.trees.clone().expect("validated");

    let mut inputs = BTreeMap::new();
    let mut record = |label: String, p: &Path| -> Result<()> {
        inputs.insert(label, sha256_file(p)?);
        Ok(())
    };
    for (k, p) in source.paths().into_iter().enumerate() {
        record(format!("parallel.{k}"), p)?;
    }
    record("trees".into(), &trees)?;
    for (k, p) in cfg.inputs.lm_train.iter().enumerate() {
        record(format!("lm_train.{k}"), p)?;
    }
    for (k, p) in cfg.inputs.lm_test.iter().enumerate() {
        record(format!("lm_test.{k}"), p)?;
    }

    let segmented = out.join("segmented.tsv");
    let segment = cmd_segment(&source, &cfg.segmenter, &segmented)?;
    log::info!(
        "segment: {} sentences, {} morphemes",
        segment.sentences,
        segment.morphemes_out
    );
    let corpus = ParallelSource::Tsv(segmented);

    let (alignments, align) = match &cfg.inputs.alignments {
        Some(p) => {
            record("alignments".into(), p)?;
            (p.clone(), None)
        }
        None => {
            let path = out.join("alignments.txt");
            let stats = cmd_align(&corpus, &cfg.aligner, &path, None)?;
            for (i, ll) in stats.log_likelihood.iter().enumerate() {
                log::info!("align: iteration {} log-likelihood {ll}", i + 1);
            }
            (path, Some(stats))
        }
    };

    let proj = ProjectionInput {
        corpus,
        trees,
        alignments,
    };
    cmd_project(&proj, &out.join("projected.txt"))?;
    let candidates = out.join("candidates.txt");
    let generate = cmd_generate(&proj, &cfg.generator, &candidates)?;
    write_json(&out.join("generate_stats.json"), &generate)?;
    log::info!(
        "generate: {} candidates, {} unprojectable",
        generate.candidates_out,
        generate.unprojectable
    );

    let sample_path = out.join("sample.txt");
    let buckets = out.join("sample_buckets.txt");
    let sample = cmd_sample(&candidates, &cfg.sampler, &sample_path, Some(&buckets))?;
    write_json(&out.join("sample_manifest.json"), &sample)?;

    let tests = load_testsets(&cfg.inputs.lm_test)?;
    let policy = cfg.lm.unk_policy;
    let baseline_train = cfg.inputs.lm_train.clone();
    let base_report = if baseline_train.is_empty() {
        None
    } else {
        let base = cmd_lm_train(&baseline_train, &out.join("lm_baseline.arpa"))?;
        let r = lm_eval(&base, &tests, policy, None)?;
        write_json(&out.join("lm_baseline.json"), &r)?;
        Some(r)
    };
    let mut augmented_train = baseline_train;
    augmented_train.push(sample_path);
    let aug = cmd_lm_train(&augmented_train, &out.join("lm_augmented.arpa"))?;
    let lm = lm_eval(&aug, &tests, policy, base_report.as_ref())?;
    write_json(&out.join("lm_augmented.json"), &lm)?;
    for c in &lm.comparisons {
        log::info!("lm: {c}");
    }

    let mut outputs = BTreeMap::new();
    let mut names: Vec<PathBuf> = fs::read_dir(out)
        .map_err(|e| Error::io(out, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.file_name().is_some_and(|n| n != "manifest.json"))
        .collect();
    names.sort();
    for p in names {
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        outputs.insert(name, sha256_file(&p)?);
    }
    let manifest = RunManifest {
        config_sha256: config_sha256.to_string(),
        seed: cfg.seed,
        aligner_seed: cfg.aligner.seed,
        sampler_seed: cfg.sampler.seed,
        inputs,
        segment,
        align,
        generate,
        sample,
        lm,
        outputs,
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}
