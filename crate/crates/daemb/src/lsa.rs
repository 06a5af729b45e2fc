//! Domain-specific word embeddings from a raw corpus via latent semantic
//! analysis: term-document matrix construction plus truncated SVD.

use std::path::Path;

use nalgebra::DMatrix;

use crate::embedding::{EmbeddingTable, Vocabulary};
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    RawCount,
    TfIdf,
}

/// Tokenized documents plus the vocabulary of all distinct tokens
/// (lexicographically ordered).
#[derive(Debug, Clone)]
pub struct Corpus {
    pub documents: Vec<Vec<String>>,
    pub vocab: Vocabulary,
}

/// Sparse non-negative term-document matrix. Documents are stored as sorted
/// `(vocab_row, weight)` pairs.
#[derive(Debug, Clone)]
pub struct TermDocMatrix {
    pub vocab: Vocabulary,
    pub columns: Vec<Vec<(usize, f64)>>,
    pub weighting: Weighting,
}

impl TermDocMatrix {
    pub fn nrows(&self) -> usize {
        self.vocab.len()
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows(), self.ncols());
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                m[(i, j)] = v;
            }
        }
        m
    }
}

/// Lowercases, splits on non-alphanumeric boundaries, drops empty tokens and
/// empty documents.
pub fn tokenize(raw_lines: &[String]) -> Result<Corpus> {
    let mut documents: Vec<Vec<String>> = Vec::new();
    for line in raw_lines {
        let toks: Vec<String> = line
            .to_lowercase()
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
        if !toks.is_empty() {
            documents.push(toks);
        }
    }
    if documents.is_empty() {
        return Err(Error::Invalid(
            "all documents are empty after tokenization".into(),
        ));
    }
    let mut tokens: Vec<String> = documents.iter().flatten().cloned().collect();
    tokens.sort_unstable();
    tokens.dedup();
    Ok(Corpus {
        documents,
        vocab: Vocabulary::new(tokens)?,
    })
}

/// Reads a corpus file: one document per line, optional "text<TAB>label"
/// (the label is ignored here).
pub fn read_corpus_file(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(|l| match l.rsplit_once('\t') {
            Some((body, _label)) => body.to_string(),
            None => l.to_string(),
        })
        .collect())
}

pub fn build_term_doc(corpus: &Corpus, weighting: Weighting) -> TermDocMatrix {
    let n_docs = corpus.documents.len();
    let mut columns: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n_docs);
    let mut doc_freq = vec![0usize; corpus.vocab.len()];

    for doc in &corpus.documents {
        let mut counts: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
        for tok in doc {
            let row = corpus.vocab.row(tok).expect("corpus vocab covers documents");
            *counts.entry(row).or_insert(0.0) += 1.0;
        }
        for &row in counts.keys() {
            doc_freq[row] += 1;
        }
        columns.push(counts.into_iter().collect());
    }

    if weighting == Weighting::TfIdf {
        for col in &mut columns {
            for (row, v) in col.iter_mut() {
                let idf = ((n_docs as f64) / (doc_freq[*row] as f64)).ln();
                *v *= idf;
            }
        }
    }

    TermDocMatrix {
        vocab: corpus.vocab.clone(),
        columns,
        weighting,
    }
}

/// Truncated-SVD word vectors: row i of `U_k * S_k^scaling_power`.
///
/// If `k` exceeds the effective rank the table is truncated to the rank with
/// a warning. Singular vectors carry a deterministic sign (largest-magnitude
/// entry of each left singular vector positive).
pub fn lsa_train(tdm: &TermDocMatrix, k: usize, scaling_power: f64) -> Result<EmbeddingTable> {
    lsa_train_full(tdm, k, scaling_power).map(|(t, _)| t)
}

/// As `lsa_train`, but also returns the retained singular-value spectrum.
pub fn lsa_train_full(
    tdm: &TermDocMatrix,
    k: usize,
    scaling_power: f64,
) -> Result<(EmbeddingTable, Vec<f64>)> {
    if k == 0 {
        return Err(Error::Invalid("LSA dimension k must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&scaling_power) {
        return Err(Error::Invalid("scaling_power must lie in [0, 1]".into()));
    }
    let (rows, cols) = (tdm.nrows(), tdm.ncols());
    if k > rows.min(cols) {
        return Err(Error::Dimension(format!(
            "k = {k} exceeds min(rows, cols) = {}",
            rows.min(cols)
        )));
    }

    let (singular_values, mut u) = truncated_left_singular(tdm, k);
    let rank = singular_values.len();
    if rank < k {
        log::warn!("requested k = {k} exceeds effective rank {rank}; output dim reduced");
    }
    if rank == 0 {
        return Err(Error::Numeric("term-document matrix is zero".into()));
    }
    linalg::fix_column_signs(&mut u, None);

    let mut vectors = DMatrix::zeros(rows, rank);
    for j in 0..rank {
        let scale = singular_values[j].powf(scaling_power);
        for i in 0..rows {
            vectors[(i, j)] = u[(i, j)] * scale;
        }
    }
    let table = EmbeddingTable::new(tdm.vocab.clone(), vectors)?;
    Ok((table, singular_values))
}

/// Top-k left singular vectors and singular values of the sparse matrix,
/// via an exact eigendecomposition of the smaller Gram matrix.
fn truncated_left_singular(tdm: &TermDocMatrix, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let (rows, cols) = (tdm.nrows(), tdm.ncols());
    if rows <= cols {
        // G = A A^T (rows x rows); eigenvectors are left singular vectors.
        let g = gram_rows(tdm);
        let (vals, vecs) = linalg::sym_eigen_desc(&g);
        let rank = effective_rank(&vals, k);
        let sv: Vec<f64> = (0..rank).map(|i| vals[i].max(0.0).sqrt()).collect();
        (sv, vecs.columns(0, rank).clone_owned())
    } else {
        // G = A^T A (cols x cols); U = A V S^-1.
        let g = gram_cols(tdm);
        let (vals, vecs) = linalg::sym_eigen_desc(&g);
        let rank = effective_rank(&vals, k);
        let sv: Vec<f64> = (0..rank).map(|i| vals[i].max(0.0).sqrt()).collect();
        let mut u = DMatrix::zeros(rows, rank);
        for l in 0..rank {
            // column l of U = A v_l / s_l
            for (j, col) in tdm.columns.iter().enumerate() {
                let w = vecs[(j, l)] / sv[l];
                for &(i, v) in col {
                    u[(i, l)] += v * w;
                }
            }
        }
        (sv, u)
    }
}

fn effective_rank(vals: &nalgebra::DVector<f64>, k: usize) -> usize {
    let tol = vals[0].max(0.0) * 1e-12;
    (0..k.min(vals.len())).take_while(|&i| vals[i] > tol).count()
}

/// A A^T accumulated document by document.
fn gram_rows(tdm: &TermDocMatrix) -> DMatrix<f64> {
    let n = tdm.nrows();
    let mut g = DMatrix::zeros(n, n);
    for col in &tdm.columns {
        for &(i, vi) in col {
            for &(j, vj) in col {
                g[(i, j)] += vi * vj;
            }
        }
    }
    g
}

/// A^T A via sparse column dot products.
fn gram_cols(tdm: &TermDocMatrix) -> DMatrix<f64> {
    let n = tdm.ncols();
    let dot = |a: &[(usize, f64)], b: &[(usize, f64)]| -> f64 {
        let (mut ia, mut ib, mut acc) = (0, 0, 0.0);
        while ia < a.len() && ib < b.len() {
            match a[ia].0.cmp(&b[ib].0) {
                std::cmp::Ordering::Less => ia += 1,
                std::cmp::Ordering::Greater => ib += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[ia].1 * b[ib].1;
                    ia += 1;
                    ib += 1;
                }
            }
        }
        acc
    };

    let entries: Vec<f64> = crate::par::map_indices(n * n, |idx| {
        let (i, j) = (idx / n, idx % n);
        if j < i {
            0.0
        } else {
            dot(&tdm.columns[i], &tdm.columns[j])
        }
    });
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = entries[i * n + j];
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}
