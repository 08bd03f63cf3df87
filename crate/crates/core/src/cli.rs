//! Command-line front end. Exit codes: 0 success, 1 validation or data
//! error, 2 usage error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::baseline::{self, BaselineParams};
use crate::calibrate::{calibrate_thresholds, evaluate_pipeline, CalibrationSteps};
use crate::config::PipelineConfig;
use crate::data_model::{
    generate_synthetic_corpus, read_corpus, read_probability_column, write_corpus, write_predictions,
    write_probability_column, Corpus, CorpusRole, Language, ProbabilityColumn,
};
use crate::ensemble::{apply_threshold, average_ensemble, fuse_translit, nudge, EnsembleSpec, ThresholdTable};
use crate::error::{invalid_arg, Error, Result};
use crate::features::{build_features, read_features, to_rows, write_features};
use crate::gbdt::{self, blend, gbdt_cv, gbdt_fit, gbdt_predict};
use crate::pipeline::{run_all, stacker_params};
use crate::translit::{augment_corpus, transliterate};
use crate::util::derive_seed;

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\nformats: corpus-csv v1, probability-csv v1, feature-csv v1, nglm v1, gbdt v1, thresholds v1, ensemble v1, eval v1, config v1, romanization-table v1"
);

#[derive(Parser, Debug)]
#[command(name = "indictox", version, long_version = LONG_VERSION, about = "Stacked multilingual abusive-comment pipeline")]
struct Cli {
    /// Key-value run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Role {
    Train,
    Test,
}

impl From<Role> for CorpusRole {
    fn from(r: Role) -> Self {
        match r {
            Role::Train => CorpusRole::Train,
            Role::Test => CorpusRole::Test,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    A,
    B,
}

#[derive(Args, Debug)]
struct CorpusArg {
    /// Corpus CSV.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value = "train")]
    role: Role,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    /// Threshold table file; without it a global threshold is used.
    #[arg(long)]
    thresholds: Option<PathBuf>,
    /// Global threshold when no table is given.
    #[arg(long)]
    threshold: Option<f64>,
    /// Added to probabilities before thresholding (default from config).
    #[arg(long)]
    nudge: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a labeled synthetic corpus.
    GenData {
        #[arg(long)]
        n: Option<usize>,
        /// Language weights as `language = weight` lines.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Strip emoji and romanize a text, or every text of a corpus.
    Transliterate {
        #[arg(long, conflicts_with = "corpus")]
        text: Option<String>,
        #[arg(long, requires = "out")]
        corpus: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "train")]
        role: Role,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Append romanized copies of non-Latin records.
    Augment {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the character n-gram baseline.
    TrainBaseline {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        ngram_min: Option<usize>,
        #[arg(long)]
        ngram_max: Option<usize>,
        #[arg(long)]
        hash_bits: Option<u32>,
    },
    /// Score a corpus with a baseline model.
    Score {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        corpus: CorpusArg,
        /// Score the romanized, emoji-free text instead of the original.
        #[arg(long)]
        transliterated: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fuse original and transliterated probabilities.
    Fuse {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        transliterated: PathBuf,
        #[command(flatten)]
        corpus: CorpusArg,
        #[arg(long)]
        weight: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Weighted average of probability files (model id = file stem).
    Ensemble {
        #[arg(long, required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        /// `model_id = weight` file; equal weights when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[command(flatten)]
        corpus: CorpusArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build stacker features.
    Features {
        #[command(flatten)]
        corpus: CorpusArg,
        #[arg(long)]
        probs: PathBuf,
        /// Nudge the ensemble probability before building features.
        #[arg(long)]
        nudge_pre_stacker: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a stacker variant; optionally write out-of-fold probabilities.
    StackTrain {
        #[arg(long)]
        features: PathBuf,
        /// Labeled corpus aligned with the feature file.
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum)]
        variant: Variant,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        oof_out: Option<PathBuf>,
    },
    /// Predict with a stacker.
    StackPredict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Blend two probability files.
    Blend {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        corpus: CorpusArg,
        #[arg(long)]
        weight: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-language thresholds from labeled probabilities.
    Calibrate {
        #[arg(long)]
        probs: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        /// Nudge applied before the search (default 0).
        #[arg(long, default_value_t = 0.0)]
        nudge: f64,
        #[arg(long)]
        grid_step: Option<f64>,
        #[arg(long)]
        refine_step: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Binary predictions.
    Predict {
        #[arg(long)]
        probs: PathBuf,
        #[command(flatten)]
        corpus: CorpusArg,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean-F1 report of thresholded probabilities.
    Evaluate {
        #[arg(long)]
        probs: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The whole pipeline on one labeled corpus (synthetic if none given).
    RunAll {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn require(paths: &[&Path]) -> Result<()> {
    for p in paths {
        if !p.exists() {
            return Err(invalid_arg!("input file {} does not exist", p.display()));
        }
    }
    Ok(())
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => {
            require(&[p])?;
            PipelineConfig::load(p)?
        }
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn load_corpus(c: &CorpusArg) -> Result<Corpus> {
    require(&[&c.corpus])?;
    read_corpus(&c.corpus, c.role.into())
}

fn thresholds_from(args: &ThresholdArgs, cfg: &PipelineConfig) -> Result<(ThresholdTable, f64)> {
    let table = match (&args.thresholds, args.threshold) {
        (Some(_), Some(_)) => return Err(invalid_arg!("give either --thresholds or --threshold, not both")),
        (Some(p), None) => {
            require(&[p])?;
            ThresholdTable::load(p)?
        }
        (None, t) => ThresholdTable::global_only(t.unwrap_or(cfg.ensemble_threshold))?,
    };
    Ok((table, args.nudge.unwrap_or(cfg.nudge)))
}

fn read_weights(path: &Path) -> Result<Vec<(Language, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for l in crate::kv::parse_kv(&text, path)? {
        let lang: Language = l.key.parse().map_err(|e: Error| Error::parse(path, l.line, e.to_string()))?;
        out.push((lang, crate::kv::parse_f64(path, &l)?));
    }
    Ok(out)
}

fn execute(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli)?;
    match cli.command {
        Command::GenData { n, weights, out } => {
            let w = match weights {
                Some(p) => {
                    require(&[&p])?;
                    read_weights(&p)?
                }
                None => Language::default_weights(),
            };
            let c = generate_synthetic_corpus(n.unwrap_or(cfg.synthetic_n), cfg.seed, &w)?;
            write_corpus(&c, out)
        }
        Command::Transliterate { text, corpus, role, out } => match (text, corpus) {
            (Some(t), None) => {
                println!("{}", transliterate(&t));
                Ok(())
            }
            (None, Some(p)) => {
                require(&[&p])?;
                let c = read_corpus(&p, role.into())?;
                let records = c
                    .records()
                    .iter()
                    .map(|r| crate::data_model::CommentRecord { text: transliterate(&r.text), ..r.clone() })
                    .collect();
                write_corpus(&Corpus::new(records, c.role())?, out.expect("clap enforces --out"))
            }
            _ => Err(invalid_arg!("give --text or --corpus")),
        },
        Command::Augment { corpus, out } => {
            require(&[&corpus])?;
            let c = read_corpus(&corpus, CorpusRole::Train)?;
            write_corpus(&augment_corpus(&c)?, out)
        }
        Command::TrainBaseline { corpus, out, epochs, learning_rate, ngram_min, ngram_max, hash_bits } => {
            require(&[&corpus])?;
            let c = read_corpus(&corpus, CorpusRole::Train)?;
            let b = &cfg.baseline;
            let params = BaselineParams {
                n_min: ngram_min.unwrap_or(b.n_min),
                n_max: ngram_max.unwrap_or(b.n_max),
                hash_bits: hash_bits.unwrap_or(b.hash_bits),
                epochs: epochs.unwrap_or(b.epochs),
                learning_rate: learning_rate.unwrap_or(b.learning_rate),
                seed: derive_seed(cfg.seed, "baseline"),
            };
            let (model, report) = baseline::train_baseline(&c, &params)?;
            for (i, l) in report.epoch_losses.iter().enumerate() {
                eprintln!("epoch {}: loss {l:.6}", i + 1);
            }
            baseline::save_model(&model, out)
        }
        Command::Score { model, corpus, transliterated, out } => {
            require(&[&model])?;
            let c = load_corpus(&corpus)?;
            let m = baseline::load_model(&model)?;
            let id = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let col = if transliterated {
                baseline::score_texts(&m, &c, &id, transliterate)?
            } else {
                baseline::score_baseline(&m, &c, &id)?
            };
            write_probability_column(&col, out)
        }
        Command::Fuse { original, transliterated, corpus, weight, out } => {
            require(&[&original, &transliterated])?;
            let c = load_corpus(&corpus)?;
            let o = read_probability_column(&original, &c)?;
            let t = read_probability_column(&transliterated, &c)?;
            write_probability_column(&fuse_translit(&o, &t, weight.unwrap_or(cfg.fusion_weight))?, out)
        }
        Command::Ensemble { inputs, spec, corpus, out } => {
            let refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
            require(&refs)?;
            let c = load_corpus(&corpus)?;
            let cols = inputs.iter().map(|p| read_probability_column(p, &c)).collect::<Result<Vec<_>>>()?;
            let spec = match spec.or(cfg.ensemble_spec.clone()) {
                Some(p) => {
                    require(&[&p])?;
                    EnsembleSpec::load(&p)?
                }
                None => EnsembleSpec::equal(cols.iter().map(|c| c.model_id.as_str()))?,
            };
            write_probability_column(&average_ensemble(&cols, &spec)?, out)
        }
        Command::Features { corpus, probs, nudge_pre_stacker, out } => {
            require(&[&probs])?;
            let c = load_corpus(&corpus)?;
            let mut p = read_probability_column(&probs, &c)?;
            if nudge_pre_stacker || cfg.nudge_pre_stacker {
                p = nudge(&p, cfg.nudge)?;
            }
            write_features(&build_features(&c, &p)?, out)
        }
        Command::StackTrain { features, corpus, variant, out, oof_out } => {
            require(&[&features, &corpus])?;
            let c = read_corpus(&corpus, CorpusRole::Train)?;
            let f = read_features(&features)?;
            check_feature_ids(&f, &c)?;
            let [a, b] = stacker_params(&cfg);
            let params = match variant {
                Variant::A => a,
                Variant::B => b,
            };
            let x = to_rows(&f);
            let y = c.labels()?;
            let model = gbdt_fit(&x, &y, &params)?;
            gbdt::save_model(&model, out)?;
            if let Some(p) = oof_out {
                let cv = gbdt_cv(&x, &y, &params, cfg.cv_folds, derive_seed(cfg.seed, "cv"))?;
                for (i, f1) in cv.fold_mean_f1.iter().enumerate() {
                    eprintln!("fold {i}: mean F1 {f1:.5}");
                }
                let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                write_probability_column(&ProbabilityColumn::for_corpus(name, &c, cv.oof)?, p)?;
            }
            Ok(())
        }
        Command::StackPredict { model, features, out } => {
            require(&[&model, &features])?;
            let m = gbdt::load_model(&model)?;
            let f = read_features(&features)?;
            let probs = gbdt_predict(&m, &to_rows(&f))?;
            let ids = f.iter().map(|v| v.comment_id.clone()).collect();
            let id = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            write_probability_column(&ProbabilityColumn::new(id, ids, probs)?, out)
        }
        Command::Blend { a, b, corpus, weight, out } => {
            require(&[&a, &b])?;
            let c = load_corpus(&corpus)?;
            let pa = read_probability_column(&a, &c)?;
            let pb = read_probability_column(&b, &c)?;
            let v = blend(pa.values(), pb.values(), weight.unwrap_or(cfg.blend_weight))?;
            write_probability_column(&ProbabilityColumn::for_corpus("blend", &c, v)?, out)
        }
        Command::Calibrate { probs, corpus, nudge: delta, grid_step, refine_step, out } => {
            require(&[&probs, &corpus])?;
            let c = read_corpus(&corpus, CorpusRole::Train)?;
            let p = nudge(&read_probability_column(&probs, &c)?, delta)?;
            let steps = CalibrationSteps {
                grid_step: grid_step.unwrap_or(cfg.calibration.grid_step),
                refine_step: refine_step.unwrap_or(cfg.calibration.refine_step),
                ..cfg.calibration
            };
            calibrate_thresholds(&p, &c, &steps)?.save(out)
        }
        Command::Predict { probs, corpus, thresholds, out } => {
            require(&[&probs])?;
            let c = load_corpus(&corpus)?;
            let (table, delta) = thresholds_from(&thresholds, &cfg)?;
            let p = nudge(&read_probability_column(&probs, &c)?, delta)?;
            let preds = apply_threshold(&p, &c.languages(), &table)?;
            write_predictions(p.comment_ids(), &preds, out)
        }
        Command::Evaluate { probs, corpus, thresholds, out } => {
            require(&[&probs, &corpus])?;
            let c = read_corpus(&corpus, CorpusRole::Train)?;
            let (table, delta) = thresholds_from(&thresholds, &cfg)?;
            let p = read_probability_column(&probs, &c)?;
            let report = evaluate_pipeline(&c, &p, &table, delta)?;
            print!("{}", report.to_text());
            if let Some(o) = out {
                report.save(o)?;
            }
            Ok(())
        }
        Command::RunAll { corpus, n, out } => {
            let mut cfg = cfg;
            if let Some(c) = corpus {
                cfg.corpus = Some(c);
            }
            if let Some(n) = n {
                cfg.synthetic_n = n;
            }
            let s = run_all(&cfg, &out)?;
            print!("{}", s.to_text());
            Ok(())
        }
    }
}

fn check_feature_ids(f: &[crate::features::FeatureVector], c: &Corpus) -> Result<()> {
    if f.len() != c.len() {
        return Err(Error::Alignment(format!("{} feature rows but {} corpus records", f.len(), c.len())));
    }
    for (v, r) in f.iter().zip(c.records()) {
        if v.comment_id != r.comment_id {
            return Err(Error::Alignment(format!(
                "feature row {:?} does not match corpus record {:?}",
                v.comment_id, r.comment_id
            )));
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return 1;
        }
    };
    match pool.install(|| execute(cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
