//! Command-line orchestration: config parsing, the lsa / adapt / eval
//! commands, and the end-to-end pipeline.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adapt::{self, AdaptConfig, AdaptMethod, SelectionScore};
use crate::embedding::{self, EmbeddingTable};
use crate::error::{Error, Result};
use crate::eval::{self, EvalOptions, LabeledDataset};
use crate::kcca::SigmaRule;
use crate::lsa;

/// One entry of the configured method list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodSpec {
    Cca,
    Kcca,
    Concsvd,
    GenericOnly,
    DsOnly,
}

impl MethodSpec {
    fn adapt_method(self) -> Option<AdaptMethod> {
        match self {
            MethodSpec::Cca => Some(AdaptMethod::Cca),
            MethodSpec::Kcca => Some(AdaptMethod::Kcca),
            MethodSpec::Concsvd => Some(AdaptMethod::Concsvd),
            _ => None,
        }
    }

    fn label(self) -> &'static str {
        match self {
            MethodSpec::Cca => "cca",
            MethodSpec::Kcca => "kcca",
            MethodSpec::Concsvd => "concsvd",
            MethodSpec::GenericOnly => "generic-only",
            MethodSpec::DsOnly => "ds-only",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub dataset: PathBuf,
    pub generic: PathBuf,
    /// "lsa" to train DS embeddings from the dataset corpus, or a path to an
    /// externally supplied embedding file.
    pub ds_source: String,
    #[serde(default)]
    pub dataset_name: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LsaSection {
    pub k: usize,
    pub weighting: lsa::Weighting,
    pub scaling_power: f64,
}

impl Default for LsaSection {
    fn default() -> Self {
        LsaSection {
            k: 70,
            weighting: lsa::Weighting::TfIdf,
            scaling_power: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdaptSection {
    pub methods: Vec<MethodSpec>,
    pub d_grid: Vec<usize>,
    pub sigma_rules: Vec<SigmaRule>,
    pub shared_sigma: bool,
    pub ridge: f64,
    pub kappa: f64,
    pub cv_folds: usize,
    pub score: SelectionScore,
    pub sample_cap: usize,
}

impl Default for AdaptSection {
    fn default() -> Self {
        AdaptSection {
            methods: vec![
                MethodSpec::Cca,
                MethodSpec::Kcca,
                MethodSpec::Concsvd,
                MethodSpec::GenericOnly,
                MethodSpec::DsOnly,
            ],
            d_grid: Vec::new(),
            sigma_rules: vec![SigmaRule::Median, SigmaRule::TwiceMedian],
            shared_sigma: false,
            ridge: 1e-3,
            kappa: 0.1,
            cv_folds: 10,
            score: SelectionScore::FScore,
            sample_cap: 2000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub weighting: eval::DocWeighting,
    pub oov_policy: eval::OovPolicy,
    pub l2_lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub threshold: f64,
}

impl Default for EvalSection {
    fn default() -> Self {
        let o = EvalOptions::default();
        EvalSection {
            weighting: o.weighting,
            oov_policy: o.oov_policy,
            l2_lambda: o.l2_lambda,
            tol: o.tol,
            max_iter: o.max_iter,
            threshold: o.threshold,
        }
    }
}

impl EvalSection {
    fn options(&self) -> EvalOptions {
        EvalOptions {
            weighting: self.weighting,
            oov_policy: self.oov_policy,
            l2_lambda: self.l2_lambda,
            tol: self.tol,
            max_iter: self.max_iter,
            threshold: self.threshold,
        }
    }
}

/// Full pipeline configuration, loaded from a TOML file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    pub output_dir: PathBuf,
    pub data: DataSection,
    #[serde(default)]
    pub lsa: LsaSection,
    #[serde(default)]
    pub adapt: AdaptSection,
    #[serde(default)]
    pub eval: EvalSection,
    /// sha256 of the config file bytes; filled in at load time.
    #[serde(skip)]
    pub config_hash: String,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|e| Error::Config(format!("{}: not UTF-8: {e}", path.display())))?;
        let mut cfg: PipelineConfig = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.config_hash = hex_digest(&bytes);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.adapt.methods.is_empty() {
            return Err(Error::Config("method list is empty".into()));
        }
        if !self.data.dataset.exists() {
            return Err(Error::Config(format!(
                "dataset path {} does not exist",
                self.data.dataset.display()
            )));
        }
        if !self.data.generic.exists() {
            return Err(Error::Config(format!(
                "generic embedding path {} does not exist",
                self.data.generic.display()
            )));
        }
        if self.data.ds_source != "lsa" && !Path::new(&self.data.ds_source).exists() {
            return Err(Error::Config(format!(
                "ds_source must be \"lsa\" or an existing embedding file, got {:?}",
                self.data.ds_source
            )));
        }
        if self.adapt.cv_folds < 2 {
            return Err(Error::Config("cv_folds must be >= 2".into()));
        }
        Ok(())
    }

    pub fn dataset_name(&self) -> String {
        self.data
            .dataset_name
            .clone()
            .unwrap_or_else(|| stem(&self.data.dataset))
    }

    fn ds_name(&self) -> String {
        if self.data.ds_source == "lsa" {
            "lsa".into()
        } else {
            stem(Path::new(&self.data.ds_source))
        }
    }

    fn gen_name(&self) -> String {
        stem(&self.data.generic)
    }

    /// Provenance line embedded in generated reports.
    fn provenance(&self) -> String {
        format!("# config_sha256={} seed={}", self.config_hash, self.seed)
    }

    fn lsa_output_path(&self) -> PathBuf {
        self.output_dir.join(format!("{}-lsa.txt", self.dataset_name()))
    }

    fn da_output_path(&self, method: MethodSpec) -> PathBuf {
        // mirrors the "kcca-glvcc-lsa" style row labels
        self.output_dir.join(format!(
            "{}-{}-{}.txt",
            method.label(),
            self.gen_name(),
            self.ds_name()
        ))
    }

    fn adapt_config(&self, method: AdaptMethod) -> AdaptConfig {
        AdaptConfig {
            method,
            d_grid: self.adapt.d_grid.clone(),
            sigma_rules: self.adapt.sigma_rules.clone(),
            shared_sigma: self.adapt.shared_sigma,
            ridge: self.adapt.ridge,
            kappa: self.adapt.kappa,
            cv_folds: self.adapt.cv_folds,
            seed: self.seed,
            score: self.adapt.score,
            sample_cap: self.adapt.sample_cap,
            eval: self.eval.options(),
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unknown".into())
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn ensure_output_dir(cfg: &PipelineConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Sidecar metadata written next to embedding files (the embedding format
/// itself has no header to carry provenance).
#[derive(Debug, Serialize)]
struct Sidecar<'a> {
    config_sha256: &'a str,
    seed: u64,
    vocab_size: usize,
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    singular_values: Option<&'a [f64]>,
}

fn write_sidecar(path: &Path, sidecar: &Sidecar) -> Result<()> {
    let meta_path = path.with_extension("meta.json");
    let json = serde_json::to_string_pretty(sidecar)
        .map_err(|e| Error::Invalid(format!("sidecar serialization: {e}")))?;
    write_text(&meta_path, &json)
}

fn load_dataset(cfg: &PipelineConfig) -> Result<LabeledDataset> {
    LabeledDataset::from_tsv(&cfg.data.dataset, &cfg.dataset_name())
}

/// Trains LSA embeddings from the dataset corpus and writes the embedding
/// file plus a stats sidecar. Returns the output path.
pub fn cmd_lsa(cfg: &PipelineConfig) -> Result<PathBuf> {
    ensure_output_dir(cfg)?;
    let lines = lsa::read_corpus_file(&cfg.data.dataset)?;
    let corpus = lsa::tokenize(&lines)?;
    let tdm = lsa::build_term_doc(&corpus, cfg.lsa.weighting);
    let k = cfg.lsa.k.min(tdm.nrows().min(tdm.ncols()));
    let (table, spectrum) = lsa::lsa_train_full(&tdm, k, cfg.lsa.scaling_power)?;

    let out = cfg.lsa_output_path();
    embedding::save_embeddings(&table, &out)?;
    write_sidecar(
        &out,
        &Sidecar {
            config_sha256: &cfg.config_hash,
            seed: cfg.seed,
            vocab_size: table.len(),
            dim: table.dim(),
            singular_values: Some(&spectrum),
        },
    )?;
    log::info!(
        "lsa: {} tokens, dim {} -> {}",
        table.len(),
        table.dim(),
        out.display()
    );
    Ok(out)
}

fn load_ds_table(cfg: &PipelineConfig) -> Result<EmbeddingTable> {
    if cfg.data.ds_source == "lsa" {
        let path = cfg.lsa_output_path();
        if !path.exists() {
            return Err(Error::Config(format!(
                "DS embeddings not found at {}; run the lsa command first \
                 (or use the pipeline command)",
                path.display()
            )));
        }
        embedding::load_embeddings(&path, None)
    } else {
        embedding::load_embeddings(Path::new(&cfg.data.ds_source), None)
    }
}

/// Runs domain adaptation for every configured alignment method and writes
/// one DA embedding file and selection report per method. Returns the
/// written embedding paths.
pub fn cmd_adapt(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    ensure_output_dir(cfg)?;
    let gen = embedding::load_embeddings(&cfg.data.generic, None)?;
    let ds = load_ds_table(cfg)?;
    let dataset = load_dataset(cfg)?;

    let mut written = Vec::new();
    for &method in &cfg.adapt.methods {
        let Some(adapt_method) = method.adapt_method() else {
            continue;
        };
        let acfg = cfg.adapt_config(adapt_method);
        let (table, report, stats) = adapt::adapt(&ds, &gen, &acfg, &dataset).map_err(|e| {
            if let Error::Alignment(msg) = &e {
                Error::Alignment(format!("{} ({msg})", method.label()))
            } else {
                e
            }
        })?;
        log::info!(
            "{}: |V_cap| = {}, ds-only = {}, gen-only = {}",
            method.label(),
            stats.shared,
            stats.ds_only,
            stats.gen_only
        );

        let out = cfg.da_output_path(method);
        embedding::save_embeddings(&table, &out)?;
        write_sidecar(
            &out,
            &Sidecar {
                config_sha256: &cfg.config_hash,
                seed: cfg.seed,
                vocab_size: table.len(),
                dim: table.dim(),
                singular_values: None,
            },
        )?;
        let report_path = out.with_extension("report.tsv");
        write_text(
            &report_path,
            &format!("{}\n{}", cfg.provenance(), report.to_tsv()),
        )?;
        written.push(out);
    }
    Ok(written)
}

/// Evaluates every configured embedding source with shared CV folds and
/// writes a Table-1-style metric grid (human-readable and TSV).
pub fn cmd_eval(cfg: &PipelineConfig) -> Result<PathBuf> {
    ensure_output_dir(cfg)?;
    let dataset = load_dataset(cfg)?;
    let assignment = eval::stratified_folds(&dataset.labels, cfg.adapt.cv_folds, cfg.seed)?;
    let options = cfg.eval.options();

    // resolve each method row to an embedding table
    let mut rows: Vec<(String, EmbeddingTable)> = Vec::new();
    for &method in &cfg.adapt.methods {
        let (name, path) = match method {
            MethodSpec::GenericOnly => (cfg.gen_name(), cfg.data.generic.clone()),
            MethodSpec::DsOnly => {
                let p = if cfg.data.ds_source == "lsa" {
                    cfg.lsa_output_path()
                } else {
                    PathBuf::from(&cfg.data.ds_source)
                };
                (cfg.ds_name(), p)
            }
            _ => {
                let p = cfg.da_output_path(method);
                let name = format!("{}({}, {})", method.label(), cfg.gen_name(), cfg.ds_name());
                (name, p)
            }
        };
        if !path.exists() {
            return Err(Error::Config(format!(
                "embedding file {} for row {:?} not found; run adapt first",
                path.display(),
                name
            )));
        }
        rows.push((name, embedding::load_embeddings(&path, None)?));
    }

    let mut reports: BTreeMap<usize, eval::EvalReport> = BTreeMap::new();
    for (i, (name, table)) in rows.iter().enumerate() {
        let mut report = eval::cross_validate_with_folds(
            &dataset,
            table,
            &assignment,
            cfg.adapt.cv_folds,
            cfg.seed,
            &options,
        )
        .map_err(|e| Error::Invalid(format!("evaluating {name:?}: {e}")))?;
        report.name = name.clone();
        reports.insert(i, report);
    }

    let mut tsv = format!("{}\nembedding\tprecision_mean\tprecision_std\tf_score_mean\tf_score_std\tauc_mean\tauc_std\n", cfg.provenance());
    let mut human = format!(
        "{}\n{} ({} folds, seed {})\n{:<28} {:>10}  {:>10}  {:>10}\n",
        cfg.provenance(),
        cfg.dataset_name(),
        cfg.adapt.cv_folds,
        cfg.seed,
        "embedding",
        "precision",
        "f-score",
        "auc"
    );
    for (i, report) in &reports {
        let name = &rows[*i].0;
        tsv.push_str(&format!(
            "{name}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\n",
            report.precision.mean,
            report.precision.std,
            report.f_score.mean,
            report.f_score.std,
            report.auc.mean,
            report.auc.std
        ));
        human.push_str(&report.summary_row());
        human.push('\n');
    }

    let tsv_path = cfg.output_dir.join("metrics.tsv");
    write_text(&tsv_path, &tsv)?;
    write_text(&cfg.output_dir.join("metrics.txt"), &human)?;
    Ok(tsv_path)
}

/// End-to-end: lsa (when configured) -> adapt -> eval.
pub fn cmd_pipeline(cfg: &PipelineConfig) -> Result<PathBuf> {
    if cfg.data.ds_source == "lsa" {
        cmd_lsa(cfg)?;
    }
    cmd_adapt(cfg)?;
    cmd_eval(cfg)
}
