//! Document embedding by weighted averaging of word vectors, L2-regularized
//! logistic regression, stratified k-fold cross-validation, and
//! precision / F-score / AUC metrics.

use std::collections::HashMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DocWeighting {
    Uniform,
    TfIdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OovPolicy {
    Skip,
    Zero,
}

/// Tokenized documents with binary labels.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub documents: Vec<Vec<String>>,
    pub labels: Vec<u8>,
    pub name: String,
}

impl LabeledDataset {
    pub fn new(documents: Vec<Vec<String>>, labels: Vec<u8>, name: String) -> Result<Self> {
        if documents.len() != labels.len() {
            return Err(Error::Invalid(format!(
                "{} documents but {} labels",
                documents.len(),
                labels.len()
            )));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::Invalid("labels must be 0 or 1".into()));
        }
        if !labels.contains(&0) || !labels.contains(&1) {
            return Err(Error::Invalid("need at least one document per class".into()));
        }
        Ok(LabeledDataset {
            documents,
            labels,
            name,
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Reads a "text<TAB>label" file, tokenizing each line like the corpus
    /// tokenizer. Documents that tokenize to nothing are kept (they encode to
    /// the zero vector) so labels stay aligned.
    pub fn from_tsv(path: &Path, name: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut documents = Vec::new();
        let mut labels = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (body, label) = line.rsplit_once('\t').ok_or_else(|| Error::Parse {
                path: path.into(),
                line: lineno + 1,
                msg: "expected text<TAB>label".into(),
            })?;
            let label: u8 = label.trim().parse().map_err(|_| Error::Parse {
                path: path.into(),
                line: lineno + 1,
                msg: format!("label {:?} is not 0/1", label.trim()),
            })?;
            let tokens: Vec<String> = body
                .to_lowercase()
                .split(|c: char| !c.is_alphanumeric())
                .filter(|t| !t.is_empty())
                .map(str::to_string)
                .collect();
            documents.push(tokens);
            labels.push(label);
        }
        LabeledDataset::new(documents, labels, name.to_string())
    }
}

/// Encoded document matrix plus indices of fully out-of-vocabulary documents.
#[derive(Debug, Clone)]
pub struct EncodedDocs {
    pub features: DMatrix<f64>,
    pub fully_oov: Vec<usize>,
}

/// Encodes each document as a normalized weighted mean of its in-vocabulary
/// word vectors. Weights are renormalized to sum to 1 over present tokens;
/// fully-OOV documents get the zero vector and are flagged.
pub fn encode_documents(
    dataset: &LabeledDataset,
    table: &EmbeddingTable,
    weighting: DocWeighting,
    oov_policy: OovPolicy,
) -> Result<EncodedDocs> {
    let dim = table.dim();
    let n_docs = dataset.len();

    // idf over the dataset's own documents
    let idf: HashMap<&str, f64> = if weighting == DocWeighting::TfIdf {
        let mut df: HashMap<&str, usize> = HashMap::new();
        for doc in &dataset.documents {
            let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for t in seen {
                *df.entry(t).or_insert(0) += 1;
            }
        }
        df.into_iter()
            .map(|(t, c)| (t, ((n_docs as f64) / (c as f64)).ln()))
            .collect()
    } else {
        HashMap::new()
    };

    let mut features = DMatrix::zeros(n_docs, dim);
    let mut fully_oov = Vec::new();
    for (i, doc) in dataset.documents.iter().enumerate() {
        let mut acc = DVector::zeros(dim);
        let mut weight_sum = 0.0;
        let mut present = 0usize;
        let mut in_vocab = 0usize;
        for tok in doc {
            let row = table.vocab.row(tok);
            if row.is_none() && oov_policy == OovPolicy::Skip {
                continue;
            }
            present += 1;
            let w = match weighting {
                DocWeighting::Uniform => 1.0,
                DocWeighting::TfIdf => idf.get(tok.as_str()).copied().unwrap_or(0.0),
            };
            weight_sum += w;
            if let Some(r) = row {
                in_vocab += 1;
                if w != 0.0 {
                    acc += table.vectors.row(r).transpose() * w;
                }
            }
        }
        if in_vocab == 0 {
            fully_oov.push(i);
            continue;
        }
        if weight_sum <= 0.0 {
            // all weights vanished (e.g. every token has zero idf): fall back
            // to a uniform mean over present tokens
            weight_sum = present as f64;
            acc.fill(0.0);
            for tok in doc {
                if let Some(r) = table.vocab.row(tok) {
                    acc += table.vectors.row(r).transpose();
                } else if oov_policy == OovPolicy::Skip {
                    weight_sum -= 1.0;
                }
            }
            if oov_policy == OovPolicy::Skip {
                weight_sum = in_vocab as f64;
            }
        }
        features.row_mut(i).copy_from(&(acc / weight_sum).transpose());
    }
    if fully_oov.len() == n_docs {
        return Err(Error::Invalid(
            "every document is fully out-of-vocabulary".into(),
        ));
    }
    Ok(EncodedDocs { features, fully_oov })
}

/// Trained logistic-regression classifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub weights: DVector<f64>,
    pub bias: f64,
    pub l2_lambda: f64,
    pub converged: bool,
    pub final_grad_norm: f64,
}

impl ClassifierModel {
    pub fn predict_proba(&self, features: &DMatrix<f64>) -> Vec<f64> {
        (0..features.nrows())
            .map(|i| {
                let z = features.row(i).transpose().dot(&self.weights) + self.bias;
                sigmoid(z)
            })
            .collect()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean logistic loss + (lambda/2) ||w||^2, bias unregularized.
pub fn logistic_loss(
    features: &DMatrix<f64>,
    labels: &[u8],
    w: &DVector<f64>,
    bias: f64,
    l2_lambda: f64,
) -> f64 {
    let n = features.nrows() as f64;
    let mut loss = 0.0;
    for i in 0..features.nrows() {
        let z = features.row(i).transpose().dot(w) + bias;
        // log(1 + exp(-yz)) in a stable form
        let margin = if labels[i] == 1 { z } else { -z };
        loss += if margin > 0.0 {
            (-margin).exp().ln_1p()
        } else {
            -margin + margin.exp().ln_1p()
        };
    }
    loss / n + 0.5 * l2_lambda * w.dot(w)
}

/// Gradient of `logistic_loss` with respect to (w, bias).
pub fn logistic_gradient(
    features: &DMatrix<f64>,
    labels: &[u8],
    w: &DVector<f64>,
    bias: f64,
    l2_lambda: f64,
) -> (DVector<f64>, f64) {
    let n = features.nrows() as f64;
    let d = features.ncols();
    let mut gw = DVector::zeros(d);
    let mut gb = 0.0;
    for i in 0..features.nrows() {
        let z = features.row(i).transpose().dot(w) + bias;
        let residual = sigmoid(z) - labels[i] as f64;
        gw += features.row(i).transpose() * residual;
        gb += residual;
    }
    gw /= n;
    gb /= n;
    gw += w * l2_lambda;
    (gw, gb)
}

/// Full-batch damped-Newton fit from zero initialization.
pub fn train_logreg(
    features: &DMatrix<f64>,
    labels: &[u8],
    l2_lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<ClassifierModel> {
    if features.nrows() != labels.len() {
        return Err(Error::Dimension("feature/label length mismatch".into()));
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("features contain NaN/Inf".into()));
    }
    if !labels.contains(&0) || !labels.contains(&1) {
        return Err(Error::Invalid("need at least one example per class".into()));
    }

    let n = features.nrows();
    let d = features.ncols();
    let mut w = DVector::zeros(d);
    let mut bias = 0.0;
    let mut loss = logistic_loss(features, labels, &w, bias, l2_lambda);
    let mut converged = false;
    let mut grad_norm = f64::INFINITY;

    for _ in 0..max_iter {
        let (gw, gb) = logistic_gradient(features, labels, &w, bias, l2_lambda);
        grad_norm = gw.amax().max(gb.abs());
        if grad_norm < tol {
            converged = true;
            break;
        }

        // Hessian over the augmented (w, bias) variable
        let mut h = DMatrix::zeros(d + 1, d + 1);
        for i in 0..n {
            let z = features.row(i).transpose().dot(&w) + bias;
            let p = sigmoid(z);
            let s = (p * (1.0 - p)).max(1e-10);
            for a in 0..d {
                let fa = features[(i, a)];
                for b in a..d {
                    h[(a, b)] += s * fa * features[(i, b)];
                }
                h[(a, d)] += s * fa;
            }
            h[(d, d)] += s;
        }
        h /= n as f64;
        for a in 0..d {
            h[(a, a)] += l2_lambda;
            for b in (a + 1)..=d {
                h[(b, a)] = h[(a, b)];
            }
        }

        let mut g = DVector::zeros(d + 1);
        g.rows_mut(0, d).copy_from(&gw);
        g[d] = gb;
        let step = match h.clone().cholesky() {
            Some(chol) => chol.solve(&g),
            None => g.clone(), // gradient fallback
        };

        // backtracking so the loss decreases monotonically
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let w_new = &w - step.rows(0, d) * t;
            let b_new = bias - step[d] * t;
            let loss_new = logistic_loss(features, labels, &w_new, b_new, l2_lambda);
            if loss_new < loss {
                w = w_new;
                bias = b_new;
                loss = loss_new;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // no descent possible at float resolution
            converged = grad_norm < tol.max(1e-8);
            break;
        }
    }
    if !converged {
        let (gw, gb) = logistic_gradient(features, labels, &w, bias, l2_lambda);
        grad_norm = gw.amax().max(gb.abs());
        converged = grad_norm < tol;
        if !converged {
            log::warn!("logistic regression hit max_iter with grad norm {grad_norm:.3e}");
        }
    }
    Ok(ClassifierModel {
        weights: w,
        bias,
        l2_lambda,
        converged,
        final_grad_norm: grad_norm,
    })
}

/// Precision, F1 and AUC of binary scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub f_score: f64,
    pub auc: f64,
}

/// Computes positive-class precision and F1 at `threshold`, and AUC via the
/// Mann-Whitney rank formulation (ties contribute 1/2).
pub fn metrics(scores: &[f64], labels: &[u8], threshold: f64) -> Result<Metrics> {
    if scores.len() != labels.len() {
        return Err(Error::Dimension("score/label length mismatch".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Invalid(
            "labels contain a single class; AUC is undefined".into(),
        ));
    }
    let (precision, f_score) = precision_f1(scores, labels, threshold);
    Ok(Metrics {
        precision,
        f_score,
        auc: auc_rank(scores, labels),
    })
}

fn precision_f1(scores: &[f64], labels: &[u8], threshold: f64) -> (f64, f64) {
    let (mut tp, mut fp, mut fnc) = (0usize, 0usize, 0usize);
    for (&s, &l) in scores.iter().zip(labels) {
        let pred = s >= threshold;
        match (pred, l) {
            (true, 1) => tp += 1,
            (true, 0) => fp += 1,
            (false, 1) => fnc += 1,
            _ => {}
        }
    }
    let precision = if tp + fp > 0 {
        tp as f64 / (tp + fp) as f64
    } else {
        0.0
    };
    let recall = if tp + fnc > 0 {
        tp as f64 / (tp + fnc) as f64
    } else {
        0.0
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    (precision, f1)
}

fn auc_rank(scores: &[f64], labels: &[u8]) -> f64 {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap().then(a.cmp(&b)));

    // midranks for ties
    let mut rank_sum_pos = 0.0;
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = n - n_pos;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            if labels[idx] == 1 {
                rank_sum_pos += midrank;
            }
        }
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    u / (n_pos as f64 * n_neg as f64)
}

/// Per-fold metrics; AUC is absent when the held-out fold contains a single
/// class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub precision: f64,
    pub f_score: f64,
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

/// Cross-validation report: per-fold metrics with means and sample
/// standard deviations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub name: String,
    pub folds: usize,
    pub seed: u64,
    pub per_fold: Vec<FoldMetrics>,
    pub precision: MeanStd,
    pub f_score: MeanStd,
    pub auc: MeanStd,
}

fn mean_std(values: &[f64]) -> MeanStd {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    MeanStd { mean, std }
}

impl EvalReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("fold\tprecision\tf_score\tauc\n");
        for (i, fm) in self.per_fold.iter().enumerate() {
            let auc = fm
                .auc
                .map(|a| format!("{a:.6}"))
                .unwrap_or_else(|| "NA".into());
            out.push_str(&format!(
                "{i}\t{:.6}\t{:.6}\t{auc}\n",
                fm.precision, fm.f_score
            ));
        }
        out.push_str(&format!(
            "mean\t{:.6}\t{:.6}\t{:.6}\n",
            self.precision.mean, self.f_score.mean, self.auc.mean
        ));
        out.push_str(&format!(
            "std\t{:.6}\t{:.6}\t{:.6}\n",
            self.precision.std, self.f_score.std, self.auc.std
        ));
        out
    }

    /// One table row in the style "name  P±s  F±s  AUC±s" (percent scale).
    pub fn summary_row(&self) -> String {
        format!(
            "{:<28} {:5.2}±{:4.2}  {:5.2}±{:4.2}  {:5.2}±{:4.2}",
            self.name,
            100.0 * self.precision.mean,
            100.0 * self.precision.std,
            100.0 * self.f_score.mean,
            100.0 * self.f_score.std,
            100.0 * self.auc.mean,
            100.0 * self.auc.std,
        )
    }
}

/// Encoder/classifier options for cross-validation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EvalOptions {
    pub weighting: DocWeighting,
    pub oov_policy: OovPolicy,
    pub l2_lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub threshold: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            weighting: DocWeighting::Uniform,
            oov_policy: OovPolicy::Skip,
            l2_lambda: 1.0,
            tol: 1e-6,
            max_iter: 500,
            threshold: 0.5,
        }
    }
}

/// Stratified fold assignment from a seeded shuffle. Returns the fold index
/// of every example.
pub fn stratified_folds(labels: &[u8], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Invalid("folds must be >= 2".into()));
    }
    if folds > labels.len() {
        return Err(Error::Invalid(format!(
            "folds = {folds} exceeds dataset size {}",
            labels.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; labels.len()];
    for class in [1u8, 0u8] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < 2 {
            return Err(Error::Invalid(format!(
                "class {class} has {} example(s); too small for stratified folds",
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        for (pos, &i) in idx.iter().enumerate() {
            assignment[i] = pos % folds;
        }
    }
    Ok(assignment)
}

/// Runs stratified k-fold cross-validation of encode + logistic regression
/// on the dataset with the given embedding table.
pub fn cross_validate(
    dataset: &LabeledDataset,
    table: &EmbeddingTable,
    folds: usize,
    seed: u64,
    options: &EvalOptions,
) -> Result<EvalReport> {
    let assignment = stratified_folds(&dataset.labels, folds, seed)?;
    cross_validate_with_folds(dataset, table, &assignment, folds, seed, options)
}

/// Same as `cross_validate` but with a caller-supplied fold assignment, so
/// several embedding sources can share identical splits.
pub fn cross_validate_with_folds(
    dataset: &LabeledDataset,
    table: &EmbeddingTable,
    assignment: &[usize],
    folds: usize,
    seed: u64,
    options: &EvalOptions,
) -> Result<EvalReport> {
    let encoded = encode_documents(dataset, table, options.weighting, options.oov_policy)?;
    let features = &encoded.features;
    let d = features.ncols();

    let fold_results: Vec<Result<FoldMetrics>> = crate::par::map_indices(folds, |fold| {
        let train_idx: Vec<usize> = (0..dataset.len()).filter(|&i| assignment[i] != fold).collect();
        let test_idx: Vec<usize> = (0..dataset.len()).filter(|&i| assignment[i] == fold).collect();

        let mut xtr = DMatrix::zeros(train_idx.len(), d);
        let mut ytr = Vec::with_capacity(train_idx.len());
        for (r, &i) in train_idx.iter().enumerate() {
            xtr.row_mut(r).copy_from(&features.row(i));
            ytr.push(dataset.labels[i]);
        }
        let model = train_logreg(&xtr, &ytr, options.l2_lambda, options.tol, options.max_iter)?;

        let mut xte = DMatrix::zeros(test_idx.len(), d);
        let mut yte = Vec::with_capacity(test_idx.len());
        for (r, &i) in test_idx.iter().enumerate() {
            xte.row_mut(r).copy_from(&features.row(i));
            yte.push(dataset.labels[i]);
        }
        let scores = model.predict_proba(&xte);
        let (precision, f_score) = precision_f1(&scores, &yte, options.threshold);
        let auc = if yte.contains(&0) && yte.contains(&1) {
            Some(auc_rank(&scores, &yte))
        } else {
            None
        };
        Ok(FoldMetrics {
            precision,
            f_score,
            auc,
        })
    });

    let mut per_fold = Vec::with_capacity(folds);
    for r in fold_results {
        per_fold.push(r?);
    }

    let precisions: Vec<f64> = per_fold.iter().map(|f| f.precision).collect();
    let f_scores: Vec<f64> = per_fold.iter().map(|f| f.f_score).collect();
    let aucs: Vec<f64> = per_fold.iter().filter_map(|f| f.auc).collect();
    if aucs.is_empty() {
        return Err(Error::Invalid(
            "no fold contained both classes; AUC is undefined everywhere".into(),
        ));
    }
    Ok(EvalReport {
        name: dataset.name.clone(),
        folds,
        seed,
        precision: mean_std(&precisions),
        f_score: mean_std(&f_scores),
        auc: mean_std(&aucs),
        per_fold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::Vocabulary;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn table(pairs: &[(&str, &[f64])]) -> EmbeddingTable {
        let dim = pairs[0].1.len();
        let tokens: Vec<String> = pairs.iter().map(|(t, _)| t.to_string()).collect();
        let data: Vec<f64> = pairs.iter().flat_map(|(_, v)| v.iter().copied()).collect();
        EmbeddingTable::new(
            Vocabulary::new(tokens).unwrap(),
            DMatrix::from_row_slice(pairs.len(), dim, &data),
        )
        .unwrap()
    }

    fn dataset(docs: &[&[&str]], labels: &[u8]) -> LabeledDataset {
        LabeledDataset::new(
            docs.iter()
                .map(|d| d.iter().map(|s| s.to_string()).collect())
                .collect(),
            labels.to_vec(),
            "test".into(),
        )
        .unwrap()
    }

    #[test]
    fn uniform_frequency_weighted_mean() {
        let t = table(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])]);
        let ds = dataset(&[&["a", "a", "b"], &["b"]], &[1, 0]);
        let enc = encode_documents(&ds, &t, DocWeighting::Uniform, OovPolicy::Skip).unwrap();
        assert_relative_eq!(enc.features[(0, 0)], 2.0 / 3.0);
        assert_relative_eq!(enc.features[(0, 1)], 1.0 / 3.0);
    }

    #[test]
    fn oov_skip_uses_known_tokens_only() {
        let t = table(&[("a", &[1.0, 2.0])]);
        let ds = dataset(&[&["a", "x"], &["a"]], &[1, 0]);
        let enc = encode_documents(&ds, &t, DocWeighting::Uniform, OovPolicy::Skip).unwrap();
        assert_relative_eq!(enc.features[(0, 0)], 1.0);
        assert_relative_eq!(enc.features[(0, 1)], 2.0);
    }

    #[test]
    fn oov_zero_dilutes() {
        let t = table(&[("a", &[1.0])]);
        let ds = dataset(&[&["a", "x"], &["a"]], &[1, 0]);
        let enc = encode_documents(&ds, &t, DocWeighting::Uniform, OovPolicy::Zero).unwrap();
        assert_relative_eq!(enc.features[(0, 0)], 0.5);
    }

    #[test]
    fn tfidf_zero_idf_token_drops_out() {
        // "a" occurs in every document -> idf 0; doc {a, b} encodes to emb(b)
        let t = table(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])]);
        let ds = dataset(&[&["a", "b"], &["a"]], &[1, 0]);
        let enc = encode_documents(&ds, &t, DocWeighting::TfIdf, OovPolicy::Skip).unwrap();
        assert_relative_eq!(enc.features[(0, 0)], 0.0);
        assert_relative_eq!(enc.features[(0, 1)], 1.0);
    }

    #[test]
    fn fully_oov_doc_is_flagged_zero() {
        let t = table(&[("a", &[1.0])]);
        let ds = dataset(&[&["zzz"], &["a"]], &[1, 0]);
        let enc = encode_documents(&ds, &t, DocWeighting::Uniform, OovPolicy::Skip).unwrap();
        assert_eq!(enc.fully_oov, vec![0]);
        assert_eq!(enc.features[(0, 0)], 0.0);
    }

    #[test]
    fn all_docs_oov_errors() {
        let t = table(&[("a", &[1.0])]);
        let ds = dataset(&[&["x"], &["y"]], &[1, 0]);
        assert!(encode_documents(&ds, &t, DocWeighting::Uniform, OovPolicy::Skip).is_err());
    }

    #[test]
    fn separable_data_trains_to_perfect_accuracy() {
        let n = 20;
        let features = DMatrix::from_fn(n, 1, |i, _| if i < n / 2 { -2.0 } else { 2.0 });
        let labels: Vec<u8> = (0..n).map(|i| (i >= n / 2) as u8).collect();
        let model = train_logreg(&features, &labels, 1.0, 1e-6, 500).unwrap();
        let scores = model.predict_proba(&features);
        for (s, &l) in scores.iter().zip(&labels) {
            assert_eq!((*s >= 0.5) as u8, l);
        }
    }

    #[test]
    fn single_class_labels_error() {
        let features = DMatrix::from_element(4, 1, 1.0);
        assert!(train_logreg(&features, &[1, 1, 1, 1], 1.0, 1e-6, 100).is_err());
    }

    #[test]
    fn non_finite_features_error() {
        let features = DMatrix::from_element(2, 1, f64::NAN);
        assert!(train_logreg(&features, &[0, 1], 1.0, 1e-6, 100).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for _ in 0..5 {
            let n = 20;
            let d = 4;
            let features = DMatrix::from_fn(n, d, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
            let labels: Vec<u8> = (0..n).map(|_| rng.gen_bool(0.5) as u8).collect();
            if !labels.contains(&0) || !labels.contains(&1) {
                continue;
            }
            let w = DVector::from_fn(d, |_, _| rng.gen::<f64>() - 0.5);
            let bias = rng.gen::<f64>() - 0.5;
            let lambda = 0.3;
            let (gw, gb) = logistic_gradient(&features, &labels, &w, bias, lambda);

            let h = 1e-5;
            for k in 0..d {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[k] += h;
                wm[k] -= h;
                let fd = (logistic_loss(&features, &labels, &wp, bias, lambda)
                    - logistic_loss(&features, &labels, &wm, bias, lambda))
                    / (2.0 * h);
                let denom = gw[k].abs().max(1.0);
                assert!(((gw[k] - fd) / denom).abs() < 1e-5, "dim {k}: {} vs {fd}", gw[k]);
            }
            let fd_b = (logistic_loss(&features, &labels, &w, bias + h, lambda)
                - logistic_loss(&features, &labels, &w, bias - h, lambda))
                / (2.0 * h);
            assert!(((gb - fd_b) / gb.abs().max(1.0)).abs() < 1e-5);
        }
    }

    #[test]
    fn loss_decreases_and_converges() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let n = 50;
        let features = DMatrix::from_fn(n, 3, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
        let labels: Vec<u8> = (0..n)
            .map(|i| (features[(i, 0)] + 0.2 * (rng.gen::<f64>() - 0.5) > 0.0) as u8)
            .collect();
        let model = train_logreg(&features, &labels, 0.5, 1e-8, 200).unwrap();
        assert!(model.converged, "grad norm {}", model.final_grad_norm);
        assert!(model.final_grad_norm < 1e-8);
    }

    #[test]
    fn perfect_separation_metrics() {
        let scores = [0.9, 0.8, 0.2, 0.1];
        let labels = [1, 1, 0, 0];
        let m = metrics(&scores, &labels, 0.5).unwrap();
        assert_eq!(m.precision, 1.0);
        assert_eq!(m.f_score, 1.0);
        assert_eq!(m.auc, 1.0);
    }

    #[test]
    fn constant_scores_auc_half() {
        let scores = [0.4, 0.4, 0.4, 0.4];
        let labels = [1, 0, 1, 0];
        let m = metrics(&scores, &labels, 0.5).unwrap();
        assert_relative_eq!(m.auc, 0.5);
    }

    #[test]
    fn hand_computed_case() {
        let scores = [0.9, 0.8, 0.4, 0.3];
        let labels = [1, 0, 1, 0];
        let m = metrics(&scores, &labels, 0.5).unwrap();
        // pairs: (0.9>0.8)=1, (0.9>0.3)=1, (0.4<0.8)=0, (0.4>0.3)=1 -> 3/4
        assert_relative_eq!(m.auc, 0.75);
        // at 0.5: predicted positive {0.9, 0.8}, tp=1 fp=1 -> precision 0.5
        // recall = 1/2 -> f1 = 0.5
        assert_relative_eq!(m.precision, 0.5);
        assert_relative_eq!(m.f_score, 0.5);
    }

    #[test]
    fn single_class_metrics_error() {
        assert!(metrics(&[0.5, 0.6], &[1, 1], 0.5).is_err());
    }

    #[test]
    fn auc_invariant_under_monotone_transform() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let n = 15;
            let scores: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            let labels: Vec<u8> = (0..n).map(|_| rng.gen_bool(0.5) as u8).collect();
            if !labels.contains(&0) || !labels.contains(&1) {
                continue;
            }
            let base = auc_rank(&scores, &labels);
            let mapped: Vec<f64> = scores.iter().map(|&s| (3.0 * s).exp() + 1.0).collect();
            assert_relative_eq!(auc_rank(&mapped, &labels), base, epsilon = 1e-12);
        }
    }

    #[test]
    fn stratification_preserves_class_proportions() {
        let labels: Vec<u8> = (0..100).map(|i| (i % 4 == 0) as u8).collect(); // 25% positive
        let assignment = stratified_folds(&labels, 5, 3).unwrap();
        for fold in 0..5 {
            let in_fold: Vec<usize> = (0..100).filter(|&i| assignment[i] == fold).collect();
            let pos = in_fold.iter().filter(|&&i| labels[i] == 1).count();
            let prop = pos as f64 / in_fold.len() as f64;
            assert!((prop - 0.25).abs() <= 1.0 / in_fold.len() as f64);
        }
    }

    #[test]
    fn leave_one_out_runs() {
        let t = table(&[("a", &[1.0]), ("b", &[-1.0])]);
        let docs: Vec<Vec<String>> = (0..10)
            .map(|i| vec![if i < 5 { "a" } else { "b" }.to_string()])
            .collect();
        let labels: Vec<u8> = (0..10).map(|i| (i < 5) as u8).collect();
        let ds = LabeledDataset::new(docs, labels, "loo".into()).unwrap();
        let report = cross_validate(&ds, &t, 10, 0, &EvalOptions::default()).unwrap();
        assert_eq!(report.per_fold.len(), 10);
    }

    #[test]
    fn same_seed_is_byte_identical() {
        let t = table(&[("a", &[1.0, 0.3]), ("b", &[-1.0, 0.1]), ("c", &[0.2, -0.9])]);
        let docs: Vec<Vec<String>> = (0..20)
            .map(|i| vec![["a", "b", "c"][i % 3].to_string()])
            .collect();
        let labels: Vec<u8> = (0..20).map(|i| (i % 3 == 0) as u8).collect();
        let ds = LabeledDataset::new(docs, labels, "det".into()).unwrap();
        let r1 = cross_validate(&ds, &t, 4, 9, &EvalOptions::default()).unwrap();
        let r2 = cross_validate(&ds, &t, 4, 9, &EvalOptions::default()).unwrap();
        assert_eq!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r2).unwrap()
        );
    }

    #[test]
    fn report_aggregation_matches_recomputation() {
        let t = table(&[("a", &[1.0, 0.3]), ("b", &[-1.0, 0.1]), ("c", &[0.2, -0.9])]);
        let docs: Vec<Vec<String>> = (0..24)
            .map(|i| vec![["a", "b", "c"][i % 3].to_string()])
            .collect();
        let labels: Vec<u8> = (0..24).map(|i| (i % 2 == 0) as u8).collect();
        let ds = LabeledDataset::new(docs, labels, "agg".into()).unwrap();
        let r = cross_validate(&ds, &t, 4, 5, &EvalOptions::default()).unwrap();
        let ps: Vec<f64> = r.per_fold.iter().map(|f| f.precision).collect();
        let mean = ps.iter().sum::<f64>() / ps.len() as f64;
        assert_eq!(mean, r.precision.mean);
        let var = ps.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (ps.len() - 1) as f64;
        assert_eq!(var.sqrt(), r.precision.std);
    }
}
