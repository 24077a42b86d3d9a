use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ecmix::aligner::Symmetrization;
use ecmix::ngram_lm::UnkPolicy;
use ecmix::pipeline::{self, ParallelSource, PipelineConfig, ProjectionInput};
use ecmix::sampler::{Method, SpfTarget};
use ecmix::{Error, Result};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "ecmix",
    version,
    about = "Arabic-English code-switched text generation and LM evaluation"
)]
struct Cli {
    /// Seed for every stochastic stage.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML config; stage sections provide defaults for stage flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Corpus {
    /// `English<TAB>Arabic` file.
    #[arg(long, conflicts_with_all = ["src", "tgt"], required_unless_present_all = ["src", "tgt"])]
    parallel: Option<PathBuf>,
    /// English side, one sentence per line.
    #[arg(long, requires = "tgt")]
    src: Option<PathBuf>,
    /// Arabic side, line-aligned with --src.
    #[arg(long, requires = "src")]
    tgt: Option<PathBuf>,
}

impl Corpus {
    fn source(&self) -> ParallelSource {
        match (&self.parallel, &self.src, &self.tgt) {
            (Some(p), _, _) => ParallelSource::Tsv(p.clone()),
            (None, Some(s), Some(t)) => ParallelSource::Split {
                src: s.clone(),
                tgt: t.clone(),
            },
            _ => unreachable!("clap enforces a corpus source"),
        }
    }
}

#[derive(Args)]
struct Projection {
    #[command(flatten)]
    corpus: Corpus,
    /// English PTB trees, one per line.
    #[arg(long)]
    trees: PathBuf,
    /// Pharaoh alignments, one line per pair.
    #[arg(long)]
    alignments: PathBuf,
}

impl Projection {
    fn input(&self) -> ProjectionInput {
        ProjectionInput {
            corpus: self.corpus.source(),
            trees: self.trees.clone(),
            alignments: self.alignments.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Clitic-segment the Arabic side of a corpus.
    Segment {
        #[arg(long, conflicts_with_all = ["src", "tgt", "text"])]
        parallel: Option<PathBuf>,
        #[arg(long, requires = "tgt", conflicts_with = "text")]
        src: Option<PathBuf>,
        #[arg(long, requires = "src", conflicts_with = "text")]
        tgt: Option<PathBuf>,
        /// Plain Arabic text, one sentence per line.
        #[arg(long)]
        text: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        min_stem: Option<usize>,
    },
    /// Train the aligner and write symmetrized Pharaoh alignments.
    Align {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        tension: Option<f64>,
        #[arg(long)]
        p_null: Option<f64>,
        #[arg(long)]
        symmetrization: Option<Symmetrization>,
    },
    /// Project trees onto the Arabic side and dump bilingual trees.
    Project {
        #[command(flatten)]
        input: Projection,
    },
    /// Generate tagged code-switched candidates.
    Generate {
        #[command(flatten)]
        input: Projection,
        #[arg(long)]
        max_candidates: Option<usize>,
        /// Keep duplicate surface renderings.
        #[arg(long)]
        no_dedup: bool,
    },
    /// Filter and sample candidates into an untagged corpus.
    Sample {
        /// Tagged candidates from `generate`.
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        method: Option<Method>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        max_en_fraction: Option<f64>,
        /// Lines of `count weight`; `n+` covers n and above.
        #[arg(long)]
        spf_target: Option<PathBuf>,
        /// Keep candidates that start with an English token.
        #[arg(long)]
        allow_en_initial: bool,
    },
    /// Train a trigram model and write it in ARPA format.
    LmTrain {
        #[arg(long, required = true, num_args = 1..)]
        train: Vec<PathBuf>,
    },
    /// Train on the given corpora and report perplexity and OOV per test set.
    LmEval {
        #[arg(long, required = true, num_args = 1..)]
        train: Vec<PathBuf>,
        #[arg(long, required = true, num_args = 1..)]
        test: Vec<PathBuf>,
        #[arg(long)]
        unk_policy: Option<UnkPolicy>,
        /// Earlier lm-eval report to compare against.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Run every stage as configured by --config.
    Pipeline,
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("stats serialize"));
}

fn run(cli: Cli) -> Result<()> {
    let (mut cfg, config_sha) = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => (PipelineConfig::default(), String::new()),
    };
    cfg.apply_seed(cli.seed);
    let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| {
        PathBuf::from(if matches!(cli.command, Command::Pipeline) {
            "run"
        } else {
            "."
        })
    });
    let at = |name: &str| out.join(name);

    match cli.command {
        Command::Segment {
            parallel,
            src,
            tgt,
            text,
            lexicon,
            min_stem,
        } => {
            let mut seg = cfg.segmenter;
            seg.lexicon = lexicon.or(seg.lexicon);
            seg.min_stem = min_stem.unwrap_or(seg.min_stem);
            let corpus = Corpus { parallel, src, tgt };
            let stats = match text {
                Some(t) => pipeline::cmd_segment_text(&t, &seg, &at("segmented.txt"))?,
                None if corpus.parallel.is_some() || corpus.src.is_some() => {
                    pipeline::cmd_segment(&corpus.source(), &seg, &at("segmented.tsv"))?
                }
                None => return Err(Error::Config("give --text, --parallel or --src/--tgt".into())),
            };
            print_json(&stats);
        }
        Command::Align {
            corpus,
            iterations,
            tension,
            p_null,
            symmetrization,
        } => {
            let mut a = cfg.aligner;
            a.iterations = iterations.unwrap_or(a.iterations);
            a.tension = tension.unwrap_or(a.tension);
            a.p_null = p_null.unwrap_or(a.p_null);
            a.symmetrization = symmetrization.unwrap_or(a.symmetrization);
            let stats = pipeline::cmd_align(&corpus.source(), &a, &at("alignments.txt"), Some(&at("ttable.tsv")))?;
            for (i, ll) in stats.log_likelihood.iter().enumerate() {
                eprintln!("iteration {} log-likelihood {ll}", i + 1);
            }
            pipeline::write_json(&at("align_stats.json"), &stats)?;
        }
        Command::Project { input } => {
            let stats = pipeline::cmd_project(&input.input(), &at("projected.txt"))?;
            print_json(&stats);
        }
        Command::Generate {
            input,
            max_candidates,
            no_dedup,
        } => {
            let mut g = cfg.generator;
            g.max_candidates_per_sentence = max_candidates.unwrap_or(g.max_candidates_per_sentence);
            g.dedup &= !no_dedup;
            let stats = pipeline::cmd_generate(&input.input(), &g, &at("candidates.txt"))?;
            pipeline::write_json(&at("generate_stats.json"), &stats)?;
            print_json(&stats);
        }
        Command::Sample {
            candidates,
            method,
            k,
            max_en_fraction,
            spf_target,
            allow_en_initial,
        } => {
            let mut s = cfg.sampler;
            s.method = method.unwrap_or(s.method);
            s.k = k.unwrap_or(s.k);
            s.max_en_fraction = max_en_fraction.unwrap_or(s.max_en_fraction);
            s.require_ar_initial &= !allow_en_initial;
            if let Some(p) = spf_target {
                let text = std::fs::read_to_string(&p).map_err(|e| match e.kind() {
                    std::io::ErrorKind::NotFound => Error::MissingInput(p.clone()),
                    _ => Error::Config(format!("{}: {e}", p.display())),
                })?;
                s.spf_target = SpfTarget::parse(&text)?;
            }
            let manifest = pipeline::cmd_sample(&candidates, &s, &at("sample.txt"), Some(&at("sample_buckets.txt")))?;
            pipeline::write_json(&at("sample_manifest.json"), &manifest)?;
            print_json(&manifest);
        }
        Command::LmTrain { train } => {
            pipeline::cmd_lm_train(&train, &at("model.arpa"))?;
        }
        Command::LmEval {
            train,
            test,
            unk_policy,
            baseline,
        } => {
            let policy = unk_policy.unwrap_or(cfg.lm.unk_policy);
            let report = pipeline::cmd_lm_eval(&train, &test, policy, baseline.as_deref(), &at("lm_report.json"))?;
            for c in &report.comparisons {
                eprintln!("{c}");
            }
            print_json(&report);
        }
        Command::Pipeline => {
            if cli.config.is_none() {
                return Err(Error::Config("pipeline needs --config".into()));
            }
            let manifest = pipeline::cmd_pipeline(&cfg, &config_sha, &out)?;
            eprintln!("run written to {}", out.display());
            print_json(&manifest.generate);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
