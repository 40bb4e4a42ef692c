//! Command-line front end: `build-tries`, `train`, `segment`, `evaluate` and
//! `pipeline`. Every stage writes its artifacts plus a JSON manifest with
//! parameters and input digests.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::builder::{build_corpus, BuilderParams, StemAlgorithm, TrieMethod, TrieSet};
use crate::embedding::EmbeddingStore;
use crate::error::{Error, ErrorKind, Result};
use crate::eval::{evaluate, load_gold, load_predictions, EvalReport};
use crate::manifest::RunManifest;
use crate::model::{alphabet_size, LexiconFile, ModelParams};
use crate::sampler::{render_learned, render_segmentations, render_trace, Sampler, SamplerConfig};
use crate::segmenter::{DecodeConfig, Segmenter, Strategy};
use crate::wordlist::WordList;

pub const TRIES_FILE: &str = "tries.tsv";
pub const LEXICON_FILE: &str = "lexicon.tsv";
pub const SEGMENTATIONS_FILE: &str = "segmentations.tsv";
pub const LEARNED_FILE: &str = "learned.tsv";
pub const SWEEPS_FILE: &str = "sweeps.tsv";
pub const TRAIN_MANIFEST_FILE: &str = "train.manifest.json";
pub const SEGMENTATION_OUTPUT_FILE: &str = "segmentation.tsv";
pub const REPORT_FILE: &str = "report.txt";
pub const RUN_MANIFEST_FILE: &str = "run.manifest.json";

/// Concentration used when `--alpha` is not given.
pub const DEFAULT_ALPHA: f64 = 1.0;

#[derive(Debug, Parser)]
#[command(
    name = "morphtrie",
    version,
    about = "Unsupervised morphological segmentation with embedding-built tries"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build training tries from a word list and word embeddings.
    BuildTries(BuildTriesArgs),
    /// Learn a morpheme lexicon by Gibbs sampling over the tries.
    Train(TrainArgs),
    /// Segment words with a trained model.
    Segment(SegmentArgs),
    /// Score predicted segmentations against a gold standard.
    Evaluate(EvaluateArgs),
    /// Run all stages with one seed.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    SameStem,
    Semantic,
}

impl From<MethodArg> for TrieMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::SameStem => TrieMethod::SameStem,
            MethodArg::Semantic => TrieMethod::SemanticRelatedness,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Learned,
    All,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Learned => Strategy::LearnedOnly,
            StrategyArg::All => Strategy::AllSplits,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StemAlgoArg {
    Walk,
    Shortest,
}

impl From<StemAlgoArg> for StemAlgorithm {
    fn from(s: StemAlgoArg) -> Self {
        match s {
            StemAlgoArg::Walk => StemAlgorithm::Walk,
            StemAlgoArg::Shortest => StemAlgorithm::Shortest,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TrieOpts {
    #[arg(long, value_enum, default_value = "semantic")]
    pub method: MethodArg,
    /// Cosine threshold for stem detection.
    #[arg(long, default_value_t = 0.25)]
    pub threshold: f64,
    /// Nearest neighbors retrieved per word.
    #[arg(long, default_value_t = 50)]
    pub neighbors: usize,
    #[arg(long = "stem-algo", value_enum, default_value = "walk")]
    pub stem_algo: StemAlgoArg,
}

impl TrieOpts {
    pub fn builder_params(&self) -> BuilderParams {
        BuilderParams {
            cosine_threshold: self.threshold,
            neighbor_k: self.neighbors,
            stem_algorithm: self.stem_algo.into(),
            ..BuilderParams::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelOpts {
    /// Dirichlet-process concentration.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Poisson rate for trie branching.
    #[arg(long, default_value_t = 4.0)]
    pub lambda: f64,
    /// Base-measure parameter; defaults to 1 / alphabet size.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Defaults to the number of distinct characters in the training words.
    #[arg(long = "alphabet-size")]
    pub alphabet_size: Option<usize>,
    /// Stop splitting once the stem would be shorter than this.
    #[arg(long = "min-stem", default_value_t = 4)]
    pub min_stem: usize,
    #[arg(long, default_value_t = 50)]
    pub iterations: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl ModelOpts {
    pub fn model_params<'a, I: IntoIterator<Item = &'a str>>(
        &self,
        training_words: I,
    ) -> ModelParams {
        let l = self
            .alphabet_size
            .unwrap_or_else(|| alphabet_size(training_words));
        let mut p = ModelParams::new(self.alpha, l);
        p.lambda = self.lambda;
        if let Some(g) = self.gamma {
            p.gamma = g;
        }
        p
    }

    pub fn sampler_config(&self) -> SamplerConfig {
        SamplerConfig {
            iterations: self.iterations,
            min_stem_length: self.min_stem,
            rng_seed: self.seed,
            ..SamplerConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DecodeOpts {
    #[arg(long, value_enum, default_value = "all")]
    pub strategy: StrategyArg,
    /// Ignore morphemes seen fewer times than this.
    #[arg(long = "min-morph-freq", default_value_t = 5)]
    pub min_morph_freq: u64,
}

impl DecodeOpts {
    pub fn decode_config(&self) -> DecodeConfig {
        DecodeConfig {
            strategy: self.strategy.into(),
            min_morpheme_freq: self.min_morph_freq,
            ..DecodeConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BuildTriesArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub wordlist: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub trie: TrieOpts,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub wordlist: PathBuf,
    /// Tries file, or the directory holding it.
    #[arg(long)]
    pub tries: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelOpts,
}

#[derive(Debug, Clone, Args)]
pub struct SegmentArgs {
    /// Directory written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Words to segment, one per line (`frequency<TAB>word` also accepted).
    #[arg(long)]
    pub wordlist: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub decode: DecodeOpts,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    /// Predicted segmentations (`word<TAB>m1 m2 ...`).
    pub predictions: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    /// Report file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub wordlist: PathBuf,
    /// Gold standard; its words are segmented and scored. Without it the
    /// word list is segmented and no report is written.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub trie: TrieOpts,
    #[command(flatten)]
    pub model: ModelOpts,
    #[command(flatten)]
    pub decode: DecodeOpts,
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Config => 2,
        ErrorKind::Data => 3,
        ErrorKind::Internal => 4,
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::BuildTries(a) => build_tries(a).map(|_| ()),
        Command::Train(a) => train(a).map(|_| ()),
        Command::Segment(a) => segment(a),
        Command::Evaluate(a) => evaluate_cmd(a).map(|_| ()),
        Command::Pipeline(a) => pipeline(a),
    }
}

fn require_file(path: &Path, role: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::io(
            path,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{role} file not found"),
            ),
        ))
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn load_wordlist(path: &Path) -> Result<WordList> {
    let wl = WordList::load(path)?;
    if wl.is_empty() {
        return Err(Error::EmptyInput(format!("{}: no words", path.display())));
    }
    Ok(wl)
}

pub fn build_tries(args: &BuildTriesArgs) -> Result<TrieSet> {
    let params = args.trie.builder_params();
    params.validate()?;
    require_file(&args.embeddings, "embeddings")?;
    require_file(&args.wordlist, "word list")?;
    let store = EmbeddingStore::load(&args.embeddings, None)?;
    let wordlist = load_wordlist(&args.wordlist)?;
    create_dir(&args.out)?;

    let seeds: Vec<&str> = wordlist.words().collect();
    let set = build_corpus(&seeds, &store, &params, args.trie.method.into())?;
    let records = args.out.join(TRIES_FILE);
    set.save(&records, &params)?;
    let summary = set.summary();
    log::info!(
        "built {} tries ({}), {} word types, {} trie entries",
        summary.tries,
        set.method,
        summary.word_types,
        summary.trie_entries
    );
    Ok(set)
}

fn resolve_tries_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(TRIES_FILE)
    } else {
        path.to_path_buf()
    }
}

pub fn train(args: &TrainArgs) -> Result<LexiconFile> {
    let cfg = args.model.sampler_config();
    cfg.validate()?;
    require_file(&args.embeddings, "embeddings")?;
    require_file(&args.wordlist, "word list")?;
    let tries_path = resolve_tries_path(&args.tries);
    require_file(&tries_path, "tries")?;

    let store = EmbeddingStore::load(&args.embeddings, None)?;
    let wordlist = load_wordlist(&args.wordlist)?;
    let (tries, tries_manifest) = TrieSet::load(&tries_path)?;
    let words = tries.word_types();
    let params = args.model.model_params(words.iter().map(String::as_str));
    params.validate()?;
    create_dir(&args.out)?;

    log::info!(
        "training on {} word types from {} tries for {} sweeps",
        words.len(),
        tries.len(),
        cfg.iterations
    );
    let sampler = Sampler::new(&tries, &store, &wordlist, params.clone(), cfg.clone())?;
    let trained = sampler.run(|stats, _| {
        log::info!(
            "sweep {}\tlog_posterior {:.4}\tlexicon {}",
            stats.sweep,
            stats.log_posterior,
            stats.lexicon_size
        );
        Ok(())
    })?;

    let mut metadata = BTreeMap::new();
    metadata.insert("iterations".into(), cfg.iterations.to_string());
    metadata.insert("min_stem".into(), cfg.min_stem_length.to_string());
    metadata.insert("seed".into(), cfg.rng_seed.to_string());
    metadata.insert("training_words".into(), words.len().to_string());
    metadata.insert("trie_method".into(), tries_manifest.method.to_string());
    let lexicon_file = LexiconFile {
        params: params.clone(),
        lexicon: trained.state.lexicon.clone(),
        metadata,
    };

    let out = |name: &str| args.out.join(name);
    lexicon_file.save(&out(LEXICON_FILE))?;
    write(
        &out(SEGMENTATIONS_FILE),
        &render_segmentations(&trained.state.segmentations),
    )?;
    write(&out(LEARNED_FILE), &render_learned(&trained.learned))?;
    write(&out(SWEEPS_FILE), &render_trace(&trained.trace))?;

    let mut manifest = RunManifest::new(
        "train",
        Some(cfg.rng_seed),
        json!({ "model": params, "sampler": cfg }),
    );
    manifest.add_input("embeddings", &args.embeddings)?;
    manifest.add_input("wordlist", &args.wordlist)?;
    manifest.add_input("tries", &tries_path)?;
    for name in [LEXICON_FILE, SEGMENTATIONS_FILE, LEARNED_FILE, SWEEPS_FILE] {
        manifest.add_output(&out(name))?;
    }
    manifest.save(&out(TRAIN_MANIFEST_FILE))?;
    Ok(lexicon_file)
}

/// Words to segment: one per line, or `frequency<TAB>word`. Order and
/// duplicates are kept.
pub fn read_input_words(path: &Path) -> Result<Vec<String>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut words = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let word = match line.split_once('\t') {
            Some((_, w)) => w.trim(),
            None => line.trim(),
        };
        if !word.is_empty() {
            words.push(word.to_string());
        }
    }
    Ok(words)
}

pub fn load_segmenter(model_dir: &Path, decode: &DecodeConfig) -> Result<Segmenter> {
    let lexicon_path = model_dir.join(LEXICON_FILE);
    require_file(&lexicon_path, "lexicon")?;
    let lexicon_file = LexiconFile::load(&lexicon_path)?;
    let learned_path = model_dir.join(LEARNED_FILE);
    let learned = if learned_path.is_file() {
        load_predictions(&learned_path)?
    } else if decode.strategy == Strategy::LearnedOnly {
        return Err(Error::io(
            &learned_path,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "learned segmentations not found",
            ),
        ));
    } else {
        BTreeMap::new()
    };
    Ok(Segmenter::new(
        &lexicon_file.lexicon,
        learned,
        lexicon_file.params,
        decode.clone(),
    ))
}

/// Renders decoder output with a header comment naming the strategy.
pub fn render_segment_output(words: &[String], segmenter: &Segmenter) -> String {
    let mut s = format!(
        "# strategy={} min_morph_freq={}\n",
        segmenter.config.strategy, segmenter.config.min_morpheme_freq
    );
    for (w, seg) in words.iter().zip(segmenter.segment_batch(words)) {
        s.push_str(&format!("{w}\t{}\n", seg.joined()));
    }
    s
}

pub fn segment(args: &SegmentArgs) -> Result<()> {
    require_file(&args.wordlist, "input words")?;
    let segmenter = load_segmenter(&args.model, &args.decode.decode_config())?;
    let words = read_input_words(&args.wordlist)?;
    let output = render_segment_output(&words, &segmenter);
    match &args.out {
        Some(path) => write(path, &output),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}

pub fn render_report(report: &EvalReport) -> String {
    format!("{}\n{}", report.render_table(), report.render_kv())
}

pub fn evaluate_cmd(args: &EvaluateArgs) -> Result<EvalReport> {
    require_file(&args.predictions, "predictions")?;
    require_file(&args.gold, "gold")?;
    let gold = load_gold(&args.gold)?;
    let pred = load_predictions(&args.predictions)?;
    let report = evaluate(&pred, &gold)?;
    let text = render_report(&report);
    match &args.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(report)
}

pub fn pipeline(args: &PipelineArgs) -> Result<()> {
    args.trie.builder_params().validate()?;
    args.model.sampler_config().validate()?;
    require_file(&args.embeddings, "embeddings")?;
    require_file(&args.wordlist, "word list")?;
    if let Some(g) = &args.gold {
        require_file(g, "gold")?;
    }
    create_dir(&args.out)?;

    build_tries(&BuildTriesArgs {
        embeddings: args.embeddings.clone(),
        wordlist: args.wordlist.clone(),
        out: args.out.clone(),
        trie: args.trie.clone(),
    })?;
    let lexicon_file = train(&TrainArgs {
        embeddings: args.embeddings.clone(),
        wordlist: args.wordlist.clone(),
        tries: args.out.join(TRIES_FILE),
        out: args.out.clone(),
        model: args.model.clone(),
    })?;

    let decode = args.decode.decode_config();
    let segmenter = load_segmenter(&args.out, &decode)?;
    let words: Vec<String> = match &args.gold {
        Some(g) => load_gold(g)?.into_keys().collect(),
        None => read_input_words(&args.wordlist)?,
    };
    let seg_path = args.out.join(SEGMENTATION_OUTPUT_FILE);
    write(&seg_path, &render_segment_output(&words, &segmenter))?;

    let mut outputs = vec![
        args.out.join(TRIES_FILE),
        args.out.join(LEXICON_FILE),
        args.out.join(SEGMENTATIONS_FILE),
        args.out.join(LEARNED_FILE),
        args.out.join(SWEEPS_FILE),
        seg_path.clone(),
    ];
    if let Some(g) = &args.gold {
        // the selected strategy first, then the other one for comparison
        let gold = load_gold(g)?;
        let other = DecodeConfig {
            strategy: match decode.strategy {
                Strategy::AllSplits => Strategy::LearnedOnly,
                Strategy::LearnedOnly => Strategy::AllSplits,
            },
            ..decode.clone()
        };
        let other_path = args
            .out
            .join(format!("segmentation.{}.tsv", other.strategy));
        write(
            &other_path,
            &render_segment_output(&words, &load_segmenter(&args.out, &other)?),
        )?;
        let mut text = String::new();
        for (strategy, path) in [(decode.strategy, &seg_path), (other.strategy, &other_path)] {
            let report = evaluate(&load_predictions(path)?, &gold)?;
            log::info!(
                "strategy {strategy}: precision {:.2} recall {:.2} f-measure {:.2}",
                report.precision * 100.0,
                report.recall * 100.0,
                report.f_measure * 100.0
            );
            text.push_str(&format!(
                "# strategy={strategy}\n{}\n",
                render_report(&report)
            ));
        }
        let report_path = args.out.join(REPORT_FILE);
        write(&report_path, &text)?;
        outputs.push(other_path);
        outputs.push(report_path);
    }

    let mut manifest = RunManifest::new(
        "pipeline",
        Some(args.model.seed),
        json!({
            "trie_method": TrieMethod::from(args.trie.method),
            "builder": args.trie.builder_params(),
            "model": lexicon_file.params,
            "sampler": args.model.sampler_config(),
            "decode": decode,
        }),
    );
    manifest.add_input("embeddings", &args.embeddings)?;
    manifest.add_input("wordlist", &args.wordlist)?;
    if let Some(g) = &args.gold {
        manifest.add_input("gold", g)?;
    }
    for p in &outputs {
        manifest.add_output(p)?;
    }
    manifest.save(&args.out.join(RUN_MANIFEST_FILE))
}
