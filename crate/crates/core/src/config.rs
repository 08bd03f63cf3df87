//! Run configuration: one `key = value` file, overridable by flags.

use std::path::{Path, PathBuf};

use crate::baseline::BaselineParams;
use crate::calibrate::CalibrationSteps;
use crate::error::{invalid_arg, Error, Result};
use crate::gbdt::GbdtParams;
use crate::kv::{parse_f64, parse_kv, read_text, KvLine};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Input corpus for `run-all`; a synthetic corpus is generated when unset.
    pub corpus: Option<PathBuf>,
    pub synthetic_n: usize,
    pub fusion_weight: f64,
    pub ensemble_spec: Option<PathBuf>,
    pub ensemble_threshold: f64,
    pub nudge: f64,
    pub nudge_pre_stacker: bool,
    pub blend_weight: f64,
    pub cv_folds: usize,
    pub calibration: CalibrationSteps,
    pub baseline: BaselineParams,
    pub gbdt_a: GbdtParams,
    pub gbdt_b: GbdtParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 20220101,
            corpus: None,
            synthetic_n: 20_000,
            fusion_weight: 0.7,
            ensemble_spec: None,
            ensemble_threshold: 0.55,
            nudge: 0.01,
            nudge_pre_stacker: false,
            blend_weight: 0.6,
            cv_folds: 4,
            calibration: CalibrationSteps::default(),
            baseline: BaselineParams::default(),
            gbdt_a: GbdtParams::variant_a(),
            gbdt_b: GbdtParams::variant_b(),
        }
    }
}

fn unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(invalid_arg!("{name} must be in [0, 1], got {x}"))
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        unit("fusion_weight", self.fusion_weight)?;
        unit("blend_weight", self.blend_weight)?;
        unit("ensemble_threshold", self.ensemble_threshold)?;
        unit("calibration.fallback", self.calibration.global_fallback)?;
        if !(self.nudge.is_finite() && self.nudge >= 0.0) {
            return Err(invalid_arg!("nudge must be non-negative"));
        }
        for (name, s) in [("calibration.grid_step", self.calibration.grid_step), ("calibration.refine_step", self.calibration.refine_step)] {
            if !(s > 0.0 && s <= 0.5) {
                return Err(invalid_arg!("{name} must be in (0, 0.5], got {s}"));
            }
        }
        if self.cv_folds < 2 {
            return Err(invalid_arg!("cv_folds must be at least 2"));
        }
        if self.synthetic_n == 0 {
            return Err(invalid_arg!("synthetic.n must be positive"));
        }
        if self.baseline.epochs == 0 || !(self.baseline.learning_rate > 0.0) {
            return Err(invalid_arg!("baseline epochs and learning rate must be positive"));
        }
        if self.baseline.n_min == 0 || self.baseline.n_max < self.baseline.n_min || self.baseline.hash_bits > 30 {
            return Err(invalid_arg!("invalid baseline n-gram range or hash_bits"));
        }
        self.gbdt_a.validate()?;
        self.gbdt_b.validate()?;
        for p in [&self.corpus, &self.ensemble_spec].into_iter().flatten() {
            if !p.exists() {
                return Err(invalid_arg!("configured path {} does not exist", p.display()));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        for l in parse_kv(text, path)? {
            cfg.set(&l, path)?;
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&read_text(path)?, path)
    }

    fn set(&mut self, l: &KvLine, path: &Path) -> Result<()> {
        let bad = || Error::parse(path, l.line, format!("bad value for {}: {:?}", l.key, l.value));
        let f = || parse_f64(path, l);
        let u = || l.value.parse::<u64>().map_err(|_| bad());
        let z = || l.value.parse::<usize>().map_err(|_| bad());
        match l.key.as_str() {
            "seed" => self.seed = u()?,
            "corpus" => self.corpus = Some(PathBuf::from(&l.value)),
            "synthetic.n" => self.synthetic_n = z()?,
            "fusion_weight" => self.fusion_weight = f()?,
            "ensemble_spec" => self.ensemble_spec = Some(PathBuf::from(&l.value)),
            "ensemble_threshold" => self.ensemble_threshold = f()?,
            "nudge" => self.nudge = f()?,
            "nudge_pre_stacker" => self.nudge_pre_stacker = l.value.parse().map_err(|_| bad())?,
            "blend_weight" => self.blend_weight = f()?,
            "cv_folds" => self.cv_folds = z()?,
            "calibration.grid_step" => self.calibration.grid_step = f()?,
            "calibration.refine_step" => self.calibration.refine_step = f()?,
            "calibration.fallback" => self.calibration.global_fallback = f()?,
            "baseline.epochs" => self.baseline.epochs = z()?,
            "baseline.learning_rate" => self.baseline.learning_rate = f()?,
            "baseline.hash_bits" => self.baseline.hash_bits = l.value.parse().map_err(|_| bad())?,
            "baseline.n_min" => self.baseline.n_min = z()?,
            "baseline.n_max" => self.baseline.n_max = z()?,
            key => {
                let (variant, field) = key.split_once('.').ok_or_else(|| Error::parse(path, l.line, format!("unknown key {key:?}")))?;
                let g = match variant {
                    "gbdt_a" => &mut self.gbdt_a,
                    "gbdt_b" => &mut self.gbdt_b,
                    _ => return Err(Error::parse(path, l.line, format!("unknown key {key:?}"))),
                };
                match field {
                    "n_trees" => g.n_trees = z()?,
                    "max_depth" => g.max_depth = z()?,
                    "learning_rate" => g.learning_rate = f()?,
                    "min_child_weight" => g.min_child_weight = f()?,
                    "lambda_l2" => g.lambda_l2 = f()?,
                    "subsample_rows" => g.subsample_rows = f()?,
                    _ => return Err(Error::parse(path, l.line, format!("unknown key {key:?}"))),
                }
            }
        }
        Ok(())
    }

    /// Canonical config text (all keys, defaults included).
    pub fn to_text(&self) -> String {
        let mut s = String::from("# config v1\n");
        let mut kv = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        kv("seed", self.seed.to_string());
        if let Some(p) = &self.corpus {
            kv("corpus", p.display().to_string());
        }
        kv("synthetic.n", self.synthetic_n.to_string());
        kv("fusion_weight", self.fusion_weight.to_string());
        if let Some(p) = &self.ensemble_spec {
            kv("ensemble_spec", p.display().to_string());
        }
        kv("ensemble_threshold", self.ensemble_threshold.to_string());
        kv("nudge", self.nudge.to_string());
        kv("nudge_pre_stacker", self.nudge_pre_stacker.to_string());
        kv("blend_weight", self.blend_weight.to_string());
        kv("cv_folds", self.cv_folds.to_string());
        kv("calibration.grid_step", self.calibration.grid_step.to_string());
        kv("calibration.refine_step", self.calibration.refine_step.to_string());
        kv("calibration.fallback", self.calibration.global_fallback.to_string());
        kv("baseline.epochs", self.baseline.epochs.to_string());
        kv("baseline.learning_rate", self.baseline.learning_rate.to_string());
        kv("baseline.hash_bits", self.baseline.hash_bits.to_string());
        kv("baseline.n_min", self.baseline.n_min.to_string());
        kv("baseline.n_max", self.baseline.n_max.to_string());
        for (name, g) in [("gbdt_a", &self.gbdt_a), ("gbdt_b", &self.gbdt_b)] {
            kv(&format!("{name}.n_trees"), g.n_trees.to_string());
            kv(&format!("{name}.max_depth"), g.max_depth.to_string());
            kv(&format!("{name}.learning_rate"), g.learning_rate.to_string());
            kv(&format!("{name}.min_child_weight"), g.min_child_weight.to_string());
            kv(&format!("{name}.lambda_l2"), g.lambda_l2.to_string());
            kv(&format!("{name}.subsample_rows"), g.subsample_rows.to_string());
        }
        s
    }
}
