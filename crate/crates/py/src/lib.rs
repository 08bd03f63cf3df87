//! Python bindings for the `indictox` pipeline.

use std::collections::BTreeMap;
use std::path::PathBuf;

use indictox::calibrate::{self, CalibrationSteps, ClassScores, EvalReport};
use indictox::data_model::{self, CorpusRole, Language, ProbabilityColumn};
use indictox::ensemble::{self, ThresholdTable};
use indictox::{baseline, config::PipelineConfig, gbdt, pipeline, translit, Error};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn role(s: &str) -> PyResult<CorpusRole> {
    s.parse().map_err(py_err)
}

fn scores_dict(s: &ClassScores) -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("mean_f1", s.mean_f1),
        ("f1_abusive", s.f1_abusive),
        ("f1_not_abusive", s.f1_not_abusive),
    ])
}

fn report_dict(r: &EvalReport) -> BTreeMap<String, BTreeMap<&'static str, f64>> {
    let mut out = BTreeMap::from([("overall".to_string(), scores_dict(&r.overall))]);
    for (lang, s) in &r.per_language {
        out.insert(lang.name().to_string(), scores_dict(s));
    }
    out
}

fn thresholds_dict(t: &ThresholdTable) -> BTreeMap<String, f64> {
    let mut out: BTreeMap<String, f64> = t.languages().map(|(l, v)| (l.name().to_string(), v)).collect();
    if let Some(g) = t.global() {
        out.insert("global".into(), g);
    }
    out
}

fn column(values: Vec<f64>) -> PyResult<ProbabilityColumn> {
    let ids = (0..values.len()).map(|i| i.to_string()).collect();
    ProbabilityColumn::new("py", ids, values).map_err(py_err)
}

/// Uroman-style romanization of Indic-script text.
#[pyfunction]
fn romanize(text: &str) -> String {
    translit::romanize(text)
}

#[pyfunction]
fn strip_emoji(text: &str) -> String {
    translit::strip_emoji(text)
}

/// `romanize(strip_emoji(text))`.
#[pyfunction]
fn transliterate(text: &str) -> String {
    translit::transliterate(text)
}

#[pyfunction]
fn mean_f1(predictions: Vec<u8>, labels: Vec<u8>) -> PyResult<f64> {
    Ok(calibrate::mean_f1(&predictions, &labels).map_err(py_err)?.mean_f1())
}

#[pyfunction]
#[pyo3(signature = (original, transliterated, weight = ensemble::DEFAULT_FUSION_WEIGHT))]
fn fuse(original: Vec<f64>, transliterated: Vec<f64>, weight: f64) -> PyResult<Vec<f64>> {
    let out = ensemble::fuse_translit(&column(original)?, &column(transliterated)?, weight).map_err(py_err)?;
    Ok(out.values().to_vec())
}

#[pyfunction]
#[pyo3(signature = (p_a, p_b, weight = gbdt::DEFAULT_BLEND_WEIGHT))]
fn blend(p_a: Vec<f64>, p_b: Vec<f64>, weight: f64) -> PyResult<Vec<f64>> {
    gbdt::blend(&p_a, &p_b, weight).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (values, delta = ensemble::DEFAULT_NUDGE))]
fn nudge(values: Vec<f64>, delta: f64) -> PyResult<Vec<f64>> {
    Ok(ensemble::nudge(&column(values)?, delta).map_err(py_err)?.values().to_vec())
}

/// A comment corpus; rows keep file order.
#[pyclass(name = "Corpus", frozen)]
struct PyCorpus {
    inner: data_model::Corpus,
}

#[pymethods]
impl PyCorpus {
    #[staticmethod]
    #[pyo3(signature = (path, role = "train"))]
    fn read(path: PathBuf, role: &str) -> PyResult<Self> {
        let inner = data_model::read_corpus(path, self::role(role)?).map_err(py_err)?;
        Ok(PyCorpus { inner })
    }

    #[staticmethod]
    fn synthetic(n: usize, seed: u64) -> PyResult<Self> {
        let inner = data_model::generate_synthetic_corpus(n, seed, &Language::default_weights()).map_err(py_err)?;
        Ok(PyCorpus { inner })
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        data_model::write_corpus(&self.inner, path).map_err(py_err)
    }

    fn augment(&self) -> PyResult<Self> {
        Ok(PyCorpus { inner: translit::augment_corpus(&self.inner).map_err(py_err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn ids(&self) -> Vec<String> {
        self.inner.ids().map(str::to_owned).collect()
    }

    #[getter]
    fn texts(&self) -> Vec<String> {
        self.inner.records().iter().map(|r| r.text.clone()).collect()
    }

    #[getter]
    fn languages(&self) -> Vec<&'static str> {
        self.inner.languages().into_iter().map(Language::name).collect()
    }

    #[getter]
    fn labels(&self) -> Option<Vec<u8>> {
        self.inner.labels().ok()
    }

    /// Per-language thresholds maximizing mean F1 on these rows.
    #[pyo3(signature = (probabilities, grid_step = 0.05, refine_step = 0.01))]
    fn calibrate(&self, probabilities: Vec<f64>, grid_step: f64, refine_step: f64) -> PyResult<BTreeMap<String, f64>> {
        let col = ProbabilityColumn::for_corpus("py", &self.inner, probabilities).map_err(py_err)?;
        let steps = CalibrationSteps { grid_step, refine_step, ..CalibrationSteps::default() };
        let table = calibrate::calibrate_thresholds(&col, &self.inner, &steps).map_err(py_err)?;
        Ok(thresholds_dict(&table))
    }

    /// Mean-F1 report of `probabilities` thresholded at `threshold` (a
    /// float, or a dict of language → threshold with optional "global").
    #[pyo3(signature = (probabilities, threshold = None, nudge = 0.0))]
    fn evaluate(
        &self,
        probabilities: Vec<f64>,
        threshold: Option<Bound<'_, PyAny>>,
        nudge: f64,
    ) -> PyResult<BTreeMap<String, BTreeMap<&'static str, f64>>> {
        let table = match threshold {
            None => ThresholdTable::global_only(0.5).map_err(py_err)?,
            Some(t) => match t.extract::<f64>() {
                Ok(g) => ThresholdTable::global_only(g).map_err(py_err)?,
                Err(_) => {
                    let map: BTreeMap<String, f64> = t.extract()?;
                    let mut per = Vec::new();
                    let mut global = None;
                    for (k, v) in map {
                        if k == "global" {
                            global = Some(v);
                        } else {
                            per.push((k.parse::<Language>().map_err(py_err)?, v));
                        }
                    }
                    ThresholdTable::new(per, global).map_err(py_err)?
                }
            },
        };
        let col = ProbabilityColumn::for_corpus("py", &self.inner, probabilities).map_err(py_err)?;
        let report = calibrate::evaluate_pipeline(&self.inner, &col, &table, nudge).map_err(py_err)?;
        Ok(report_dict(&report))
    }
}

/// Hashed character n-gram logistic model.
#[pyclass(name = "NgramModel", frozen)]
struct PyNgramModel {
    inner: baseline::NgramLinearModel,
}

#[pymethods]
impl PyNgramModel {
    #[staticmethod]
    #[pyo3(signature = (corpus, n_min = 3, n_max = 5, epochs = 5, seed = 0))]
    fn train(corpus: &PyCorpus, n_min: usize, n_max: usize, epochs: usize, seed: u64) -> PyResult<Self> {
        let params = baseline::BaselineParams { n_min, n_max, epochs, seed, ..Default::default() };
        let (inner, _) = baseline::train_baseline(&corpus.inner, &params).map_err(py_err)?;
        Ok(PyNgramModel { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyNgramModel { inner: baseline::load_model(path).map_err(py_err)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        baseline::save_model(&self.inner, path).map_err(py_err)
    }

    fn predict(&self, text: &str) -> f64 {
        self.inner.predict(text)
    }

    fn score(&self, corpus: &PyCorpus) -> PyResult<Vec<f64>> {
        Ok(baseline::score_baseline(&self.inner, &corpus.inner, "py").map_err(py_err)?.values().to_vec())
    }
}

/// Gradient-boosted tree stacker over the 15 meta-features.
#[pyclass(name = "Stacker", frozen)]
struct PyStacker {
    inner: gbdt::GbdtModel,
}

#[pymethods]
impl PyStacker {
    /// `variant` is "a" (shallow) or "b" (deeper, subsampled).
    #[staticmethod]
    #[pyo3(signature = (rows, labels, variant = "a", n_trees = None, seed = 0))]
    fn fit(rows: Vec<Vec<f64>>, labels: Vec<u8>, variant: &str, n_trees: Option<usize>, seed: u64) -> PyResult<Self> {
        let mut params = match variant {
            "a" => gbdt::GbdtParams::variant_a(),
            "b" => gbdt::GbdtParams::variant_b(),
            _ => return Err(PyValueError::new_err(format!("unknown variant {variant:?}"))),
        };
        params.seed = seed;
        if let Some(n) = n_trees {
            params.n_trees = n;
        }
        Ok(PyStacker { inner: gbdt::gbdt_fit(&rows, &labels, &params).map_err(py_err)? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyStacker { inner: gbdt::load_model(path).map_err(py_err)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        gbdt::save_model(&self.inner, path).map_err(py_err)
    }

    fn predict(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        gbdt::gbdt_predict(&self.inner, &rows).map_err(py_err)
    }

    #[getter]
    fn n_trees(&self) -> usize {
        self.inner.trees.len()
    }
}

/// Meta-feature rows (corpus order) from ensemble probabilities.
#[pyfunction]
fn build_features(corpus: &PyCorpus, ensemble_probabilities: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
    let col = ProbabilityColumn::for_corpus("ensemble", &corpus.inner, ensemble_probabilities).map_err(py_err)?;
    let feats = indictox::features::build_features(&corpus.inner, &col).map_err(py_err)?;
    Ok(indictox::features::to_rows(&feats))
}

/// Runs the whole pipeline into `out` and returns the summary scores.
#[pyfunction]
#[pyo3(signature = (out, n = None, seed = None, corpus = None))]
fn run_all(
    py: Python<'_>,
    out: PathBuf,
    n: Option<usize>,
    seed: Option<u64>,
    corpus: Option<PathBuf>,
) -> PyResult<BTreeMap<String, f64>> {
    let mut cfg = PipelineConfig::default();
    if let Some(n) = n {
        cfg.synthetic_n = n;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.corpus = corpus;
    let summary = py.detach(|| pipeline::run_all(&cfg, &out)).map_err(py_err)?;
    Ok(BTreeMap::from([
        ("ensemble_at_0.5".into(), summary.baseline.mean_f1()),
        ("ensemble_at_global".into(), summary.ensemble_global.mean_f1()),
        ("stacker_blend_at_0.5".into(), summary.stacker_plain.mean_f1()),
        ("pipeline".into(), summary.pipeline.mean_f1()),
        ("gain".into(), summary.gain()),
    ]))
}

#[pymodule]
fn indictox_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(romanize, m)?)?;
    m.add_function(wrap_pyfunction!(strip_emoji, m)?)?;
    m.add_function(wrap_pyfunction!(transliterate, m)?)?;
    m.add_function(wrap_pyfunction!(mean_f1, m)?)?;
    m.add_function(wrap_pyfunction!(fuse, m)?)?;
    m.add_function(wrap_pyfunction!(blend, m)?)?;
    m.add_function(wrap_pyfunction!(nudge, m)?)?;
    m.add_function(wrap_pyfunction!(build_features, m)?)?;
    m.add_function(wrap_pyfunction!(run_all, m)?)?;
    m.add_class::<PyCorpus>()?;
    m.add_class::<PyNgramModel>()?;
    m.add_class::<PyStacker>()?;
    m.add("FEATURE_NAMES", indictox::features::FEATURE_NAMES.to_vec())?;
    m.add("LANGUAGES", Language::ALL.iter().map(|l| l.name()).collect::<Vec<_>>())?;
    Ok(())
}
