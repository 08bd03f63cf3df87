//! End-to-end run: split → augment → baseline scores (original and
//! romanized) → 7:3 fusion → ensemble → features → two stackers → 6:4 blend
//! → nudge → per-language thresholds → held-out evaluation.
//!
//! Every stage seed is `derive_seed(config.seed, <stage name>)`. Outputs are
//! identical for any worker-thread count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baseline::{self, BaselineParams, NgramLinearModel};
use crate::calibrate::{calibrate_thresholds, evaluate_pipeline, EvalReport};
use crate::config::PipelineConfig;
use crate::data_model::{
    generate_synthetic_corpus, read_corpus, write_corpus, write_predictions, write_probability_column, Corpus,
    CorpusRole, Language, ProbabilityColumn,
};
use crate::ensemble::{apply_threshold, average_ensemble, fuse_translit, nudge, EnsembleSpec, ThresholdTable};
use crate::error::{Error, Result};
use crate::features::{build_features, to_rows, write_features, FeatureVector};
use crate::gbdt::{self, blend, gbdt_cv, gbdt_fit, gbdt_predict, GbdtModel, GbdtParams};
use crate::translit::{augment_corpus, transliterate};
use crate::util::derive_seed;

/// Wraps an error with the name of the stage that produced it.
fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::InvalidData(format!("stage {name}: {e}")))
}

fn mkdir(p: &Path) -> Result<()> {
    std::fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

/// Positions of the three splits (baseline training, stacking/calibration,
/// held-out), each in corpus order. Fractions 1/2, 1/4, 1/4.
pub fn split_positions(n: usize, seed: u64) -> [Vec<usize>; 3] {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(seed, "split")));
    let a = n / 2;
    let b = a + n / 4;
    let mut parts = [idx[..a].to_vec(), idx[a..b].to_vec(), idx[b..].to_vec()];
    for p in &mut parts {
        p.sort_unstable();
    }
    parts
}

/// The three baseline variants: the configured n-gram range and its
/// neighbours shifted down and up by one.
pub fn baseline_variants(cfg: &PipelineConfig) -> Vec<(String, BaselineParams)> {
    let b = &cfg.baseline;
    let lo = (b.n_min.saturating_sub(1).max(1), b.n_max.saturating_sub(1).max(b.n_min.saturating_sub(1).max(1)));
    [("ngram_lo", lo), ("ngram_mid", (b.n_min, b.n_max)), ("ngram_hi", (b.n_min + 1, b.n_max + 1))]
        .into_iter()
        .map(|(id, (n_min, n_max))| {
            let p = BaselineParams { n_min, n_max, seed: derive_seed(cfg.seed, &format!("baseline-{id}")), ..b.clone() };
            (id.to_string(), p)
        })
        .collect()
}

pub fn stacker_params(cfg: &PipelineConfig) -> [GbdtParams; 2] {
    [
        GbdtParams { seed: derive_seed(cfg.seed, "gbdt_a"), ..cfg.gbdt_a.clone() },
        GbdtParams { seed: derive_seed(cfg.seed, "gbdt_b"), ..cfg.gbdt_b.clone() },
    ]
}

/// Original and romanized scores fused `w : 1−w`.
pub fn fused_scores(
    model: &NgramLinearModel,
    corpus: &Corpus,
    model_id: &str,
    fusion_weight: f64,
) -> Result<(ProbabilityColumn, ProbabilityColumn, ProbabilityColumn)> {
    let original = baseline::score_baseline(model, corpus, &format!("{model_id}.original"))?;
    let translit = baseline::score_texts(model, corpus, &format!("{model_id}.translit"), transliterate)?;
    let mut fused = fuse_translit(&original, &translit, fusion_weight)?;
    fused.model_id = model_id.to_string();
    Ok((original, translit, fused))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub heldout_rows: usize,
    /// Ensemble probability at a global 0.5 threshold.
    pub baseline: EvalReport,
    /// Ensemble probability at the configured global threshold (0.55).
    pub ensemble_global: EvalReport,
    /// Blended stacker, no nudge, global 0.5.
    pub stacker_plain: EvalReport,
    /// Full pipeline: blend + nudge + calibrated thresholds.
    pub pipeline: EvalReport,
    pub cv_mean_f1: [f64; 2],
    pub thresholds: ThresholdTable,
}

impl RunSummary {
    pub fn gain(&self) -> f64 {
        self.pipeline.mean_f1() - self.baseline.mean_f1()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# run-all v1\n");
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("heldout_rows", self.heldout_rows.to_string());
        kv("ensemble_at_0.5.mean_f1", self.baseline.mean_f1().to_string());
        kv("ensemble_at_global.mean_f1", self.ensemble_global.mean_f1().to_string());
        kv("stacker_blend_at_0.5.mean_f1", self.stacker_plain.mean_f1().to_string());
        kv("pipeline.mean_f1", self.pipeline.mean_f1().to_string());
        kv("pipeline.gain_over_ensemble", self.gain().to_string());
        kv("cv.gbdt_a.mean_f1", self.cv_mean_f1[0].to_string());
        kv("cv.gbdt_b.mean_f1", self.cv_mean_f1[1].to_string());
        s
    }
}

struct Layout {
    root: PathBuf,
}

impl Layout {
    fn dir(&self, sub: &str) -> Result<PathBuf> {
        let p = self.root.join(sub);
        mkdir(&p)?;
        Ok(p)
    }
}

/// Loads the configured corpus or generates the synthetic one.
pub fn input_corpus(cfg: &PipelineConfig) -> Result<Corpus> {
    match &cfg.corpus {
        Some(p) => read_corpus(p, CorpusRole::Train),
        None => generate_synthetic_corpus(cfg.synthetic_n, cfg.seed, &Language::default_weights()),
    }
}

pub fn run_all(cfg: &PipelineConfig, out: &Path) -> Result<RunSummary> {
    stage("config", cfg.validate())?;
    let lay = Layout { root: out.to_path_buf() };
    mkdir(out)?;
    std::fs::write(out.join("config.txt"), cfg.to_text()).map_err(|e| Error::io(out.join("config.txt"), e))?;

    let corpus = stage("load", input_corpus(cfg))?;
    let split_dir = lay.dir("split")?;
    write_corpus(&corpus, split_dir.join("corpus.csv"))?;
    let [tr, st, ho] = split_positions(corpus.len(), cfg.seed);
    let train = stage("split", corpus.select(&tr))?;
    let stack = stage("split", corpus.select(&st))?;
    let held = stage("split", corpus.select(&ho))?;
    write_corpus(&train, split_dir.join("train.csv"))?;
    write_corpus(&stack, split_dir.join("stack.csv"))?;
    write_corpus(&held, split_dir.join("heldout.csv"))?;

    let augmented = stage("augment", augment_corpus(&train))?;
    write_corpus(&augmented, split_dir.join("train_augmented.csv"))?;

    // Baselines and per-split fused columns.
    let base_dir = lay.dir("baseline")?;
    let variants = baseline_variants(cfg);
    let mut fused: [Vec<ProbabilityColumn>; 2] = [Vec::new(), Vec::new()];
    for (id, params) in &variants {
        let (model, report) = stage("train-baseline", baseline::train_baseline(&augmented, params))?;
        log::info!("baseline {id}: epoch losses {:?}", report.epoch_losses);
        baseline::save_model(&model, base_dir.join(format!("{id}.nglm")))?;
        for (k, (name, part)) in [("stack", &stack), ("heldout", &held)].into_iter().enumerate() {
            let dir = lay.dir(&format!("probs/{name}"))?;
            let (o, t, f) = stage("score", fused_scores(&model, part, id, cfg.fusion_weight))?;
            write_probability_column(&o, dir.join(format!("{id}.original.csv")))?;
            write_probability_column(&t, dir.join(format!("{id}.translit.csv")))?;
            write_probability_column(&f, dir.join(format!("{id}.csv")))?;
            fused[k].push(f);
        }
    }
    let spec = match &cfg.ensemble_spec {
        Some(p) => stage("ensemble", EnsembleSpec::load(p))?,
        None => EnsembleSpec::equal(variants.iter().map(|(id, _)| id.as_str()))?,
    };
    let mut ens = Vec::new();
    for (k, name) in ["stack", "heldout"].into_iter().enumerate() {
        let e = stage("ensemble", average_ensemble(&fused[k], &spec))?;
        write_probability_column(&e, lay.dir(&format!("probs/{name}"))?.join("ensemble.csv"))?;
        ens.push(e);
    }

    // Features (optionally from nudged ensemble probabilities).
    let feat_dir = lay.dir("features")?;
    let mut feats: Vec<Vec<FeatureVector>> = Vec::new();
    for (k, (name, part)) in [("stack", &stack), ("heldout", &held)].into_iter().enumerate() {
        let p = if cfg.nudge_pre_stacker { nudge(&ens[k], cfg.nudge)? } else { ens[k].clone() };
        let f = stage("features", build_features(part, &p))?;
        write_features(&f, feat_dir.join(format!("{name}.csv")))?;
        feats.push(f);
    }

    // Stackers: full-split models for held-out, out-of-fold for calibration.
    let stack_dir = lay.dir("stacker")?;
    let x_stack = to_rows(&feats[0]);
    let x_held = to_rows(&feats[1]);
    let y_stack = stack.labels()?;
    let cv_seed = derive_seed(cfg.seed, "cv");
    let mut oof = Vec::new();
    let mut held_probs = Vec::new();
    let mut cv_mean_f1 = [0.0; 2];
    for (k, (name, params)) in ["gbdt_a", "gbdt_b"].into_iter().zip(stacker_params(cfg)).enumerate() {
        let model: GbdtModel = stage("stack-train", gbdt_fit(&x_stack, &y_stack, &params))?;
        gbdt::save_model(&model, stack_dir.join(format!("{name}.model")))?;
        let cv = stage("stack-train", gbdt_cv(&x_stack, &y_stack, &params, cfg.cv_folds, cv_seed))?;
        cv_mean_f1[k] = cv.mean();
        let oof_col = ProbabilityColumn::for_corpus(format!("{name}.oof"), &stack, cv.oof)?;
        write_probability_column(&oof_col, stack_dir.join(format!("{name}.oof.csv")))?;
        let hp = ProbabilityColumn::for_corpus(name, &held, stage("stack-predict", gbdt_predict(&model, &x_held))?)?;
        write_probability_column(&hp, lay.dir("probs/heldout")?.join(format!("{name}.csv")))?;
        oof.push(oof_col);
        held_probs.push(hp);
    }

    let blend_cols = |a: &ProbabilityColumn, b: &ProbabilityColumn, corpus: &Corpus| -> Result<ProbabilityColumn> {
        ProbabilityColumn::for_corpus("blend", corpus, blend(a.values(), b.values(), cfg.blend_weight)?)
    };
    let oof_blend = stage("blend", blend_cols(&oof[0], &oof[1], &stack))?;
    write_probability_column(&oof_blend, stack_dir.join("blend.oof.csv"))?;
    let held_blend = stage("blend", blend_cols(&held_probs[0], &held_probs[1], &held))?;
    write_probability_column(&held_blend, lay.dir("probs/heldout")?.join("blend.csv"))?;

    let thresholds = stage("calibrate", calibrate_thresholds(&nudge(&oof_blend, cfg.nudge)?, &stack, &cfg.calibration))?;
    thresholds.save(out.join("thresholds.txt"))?;

    let final_probs = nudge(&held_blend, cfg.nudge)?;
    let held_dir = lay.dir("heldout")?;
    write_probability_column(&final_probs, held_dir.join("final.csv"))?;
    let preds = apply_threshold(&final_probs, &held.languages(), &thresholds)?;
    write_predictions(final_probs.comment_ids(), &preds, held_dir.join("predictions.csv"))?;

    let half = ThresholdTable::global_only(0.5)?;
    let summary = RunSummary {
        heldout_rows: held.len(),
        baseline: stage("evaluate", evaluate_pipeline(&held, &ens[1], &half, 0.0))?,
        ensemble_global: stage(
            "evaluate",
            evaluate_pipeline(&held, &ens[1], &ThresholdTable::global_only(cfg.ensemble_threshold)?, 0.0),
        )?,
        stacker_plain: stage("evaluate", evaluate_pipeline(&held, &held_blend, &half, 0.0))?,
        pipeline: stage("evaluate", evaluate_pipeline(&held, &held_blend, &thresholds, cfg.nudge))?,
        cv_mean_f1,
        thresholds,
    };
    let eval_dir = lay.dir("eval")?;
    summary.pipeline.save(eval_dir.join("pipeline.txt"))?;
    summary.baseline.save(eval_dir.join("ensemble_at_0.5.txt"))?;
    std::fs::write(eval_dir.join("pipeline_report.txt"), summary.pipeline.to_text())
        .map_err(|e| Error::io(eval_dir.join("pipeline_report.txt"), e))?;
    std::fs::write(out.join("summary.txt"), summary.to_text()).map_err(|e| Error::io(out.join("summary.txt"), e))?;
    Ok(summary)
}
