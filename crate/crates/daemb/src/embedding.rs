//! Embedding file I/O, vocabulary management, and row-aligned intersection
//! of two embedding tables.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Ordered set of unique tokens with O(1) token -> row lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from an ordered token list. Tokens must be unique,
    /// non-empty, and whitespace-free.
    pub fn new(tokens: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, tok) in tokens.iter().enumerate() {
            if tok.is_empty() || tok.chars().any(char::is_whitespace) {
                return Err(Error::Invalid(format!(
                    "token {:?} at position {i} is empty or contains whitespace",
                    tok
                )));
            }
            if index.insert(tok.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate token {:?}", tok)));
            }
        }
        Ok(Vocabulary { tokens, index })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, row: usize) -> &str {
        &self.tokens[row]
    }

    pub fn row(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }
}

/// A vocabulary plus a dense |V| x dim matrix of word vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub vocab: Vocabulary,
    pub vectors: DMatrix<f64>,
}

impl EmbeddingTable {
    pub fn new(vocab: Vocabulary, vectors: DMatrix<f64>) -> Result<Self> {
        if vectors.nrows() != vocab.len() {
            return Err(Error::Dimension(format!(
                "vector row count {} does not match vocabulary size {}",
                vectors.nrows(),
                vocab.len()
            )));
        }
        if vectors.ncols() == 0 {
            return Err(Error::Dimension("embedding dim must be >= 1".into()));
        }
        if vectors.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("embedding matrix contains NaN/Inf".into()));
        }
        Ok(EmbeddingTable { vocab, vectors })
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    /// Row vector for a token, if present.
    pub fn vector(&self, token: &str) -> Option<nalgebra::RowDVector<f64>> {
        self.vocab
            .row(token)
            .map(|r| self.vectors.row(r).clone_owned())
    }
}

/// Shared vocabulary V-cap with row-aligned DS and generic vectors.
#[derive(Debug, Clone)]
pub struct AlignedPairSet {
    pub vocab: Vocabulary,
    pub ds_vectors: DMatrix<f64>,
    pub gen_vectors: DMatrix<f64>,
}

impl AlignedPairSet {
    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn ds_dim(&self) -> usize {
        self.ds_vectors.ncols()
    }

    pub fn gen_dim(&self) -> usize {
        self.gen_vectors.ncols()
    }
}

/// Summary counters from loading an embedding file.
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadStats {
    pub duplicates_skipped: usize,
}

/// Loads a text-format embedding file: one record per line,
/// `token v1 v2 ... vd`. Duplicate tokens keep the first occurrence.
pub fn load_embeddings(path: &Path, expected_dim: Option<usize>) -> Result<EmbeddingTable> {
    let (table, _) = load_embeddings_with_stats(path, expected_dim)?;
    Ok(table)
}

pub fn load_embeddings_with_stats(
    path: &Path,
    expected_dim: Option<usize>,
) -> Result<(EmbeddingTable, LoadStats)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut tokens: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut data: Vec<f64> = Vec::new();
    let mut dim: Option<usize> = None;
    let mut stats = LoadStats::default();

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let token = fields.next().unwrap().to_string();
        if token.parse::<f64>().is_ok() {
            return Err(Error::Parse {
                path: path.into(),
                line: lineno,
                msg: format!("numeric first field {:?}; header lines are not supported", token),
            });
        }
        let mut row: Vec<f64> = Vec::with_capacity(dim.unwrap_or(8));
        for field in fields {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                path: path.into(),
                line: lineno,
                msg: format!("non-numeric field {:?}", field),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    path: path.into(),
                    line: lineno,
                    msg: format!("non-finite value {:?}", field),
                });
            }
            row.push(v);
        }
        if row.is_empty() {
            return Err(Error::Parse {
                path: path.into(),
                line: lineno,
                msg: "no vector components".into(),
            });
        }
        match dim {
            None => {
                if let Some(exp) = expected_dim {
                    if row.len() != exp {
                        return Err(Error::Parse {
                            path: path.into(),
                            line: lineno,
                            msg: format!("dim {} does not match expected {}", row.len(), exp),
                        });
                    }
                }
                dim = Some(row.len());
            }
            Some(d) if d != row.len() => {
                return Err(Error::Parse {
                    path: path.into(),
                    line: lineno,
                    msg: format!("inconsistent dim {} (expected {})", row.len(), d),
                });
            }
            _ => {}
        }
        if index.contains_key(&token) {
            stats.duplicates_skipped += 1;
            continue;
        }
        index.insert(token.clone(), tokens.len());
        tokens.push(token);
        data.extend_from_slice(&row);
    }

    let dim = dim.ok_or_else(|| Error::Parse {
        path: path.into(),
        line: 0,
        msg: "empty embedding file".into(),
    })?;
    if stats.duplicates_skipped > 0 {
        log::warn!(
            "{}: skipped {} duplicate token(s)",
            path.display(),
            stats.duplicates_skipped
        );
    }
    let vectors = DMatrix::from_row_slice(tokens.len(), dim, &data);
    let vocab = Vocabulary::new(tokens)?;
    Ok((EmbeddingTable::new(vocab, vectors)?, stats))
}

/// Writes the text format back out with 17-significant-digit floats so that
/// load(save(t)) == t exactly.
pub fn save_embeddings(table: &EmbeddingTable, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (i, token) in table.vocab.tokens().iter().enumerate() {
        write!(w, "{token}").map_err(|e| Error::io(path, e))?;
        for j in 0..table.dim() {
            write!(w, " {:.16e}", table.vectors[(i, j)]).map_err(|e| Error::io(path, e))?;
        }
        writeln!(w).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Counts reported by `intersect`.
#[derive(Debug, Clone, Copy)]
pub struct IntersectStats {
    pub shared: usize,
    pub ds_only: usize,
    pub gen_only: usize,
}

/// Aligns two tables on their shared vocabulary, ordered lexicographically.
pub fn intersect(ds: &EmbeddingTable, gen: &EmbeddingTable) -> Result<(AlignedPairSet, IntersectStats)> {
    let mut shared: Vec<&str> = ds
        .vocab
        .tokens()
        .iter()
        .map(String::as_str)
        .filter(|t| gen.vocab.contains(t))
        .collect();
    shared.sort_unstable();

    let stats = IntersectStats {
        shared: shared.len(),
        ds_only: ds.len() - shared.len(),
        gen_only: gen.len() - shared.len(),
    };
    if shared.len() < 2 {
        return Err(Error::Alignment(format!(
            "shared vocabulary has {} token(s); at least 2 are required",
            shared.len()
        )));
    }

    let n = shared.len();
    let mut ds_vectors = DMatrix::zeros(n, ds.dim());
    let mut gen_vectors = DMatrix::zeros(n, gen.dim());
    for (i, tok) in shared.iter().enumerate() {
        ds_vectors
            .row_mut(i)
            .copy_from(&ds.vectors.row(ds.vocab.row(tok).unwrap()));
        gen_vectors
            .row_mut(i)
            .copy_from(&gen.vectors.row(gen.vocab.row(tok).unwrap()));
    }
    let vocab = Vocabulary::new(shared.into_iter().map(str::to_string).collect())?;
    Ok((
        AlignedPairSet {
            vocab,
            ds_vectors,
            gen_vectors,
        },
        stats,
    ))
}
