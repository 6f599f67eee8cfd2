//! Line-oriented text format for fitted factorizations.
//!
//! ```text
//! simplexfactor-factorization 1
//! kind budget
//! rows 5
//! cols 2
//! k 2
//! seed 0
//! row_labels
//! very good
//! ...
//! col_labels
//! ...
//! matrix W 5 2
//! 6.0000000000000000e-1 4.0000000000000000e-1
//! ...
//! vector masses 5
//! ...
//! end
//! ```
//!
//! Values are written with 17 significant digits, which round-trips every
//! `f64` exactly. Label blocks and the row-mass vector are optional.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{CompositionMatrix, Matrix, RowMassVector};
use crate::models::{BudgetFactorization, Factorization, LcaFactorization, NmfFactorization};

const MAGIC: &str = "simplexfactor-factorization 1";

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationFile {
    pub factorization: Factorization,
    pub seed: u64,
    pub row_labels: Option<Vec<String>>,
    pub col_labels: Option<Vec<String>>,
    /// Row masses of the data, needed to leave the budget form.
    pub row_mass: Option<RowMassVector>,
}

impl FactorizationFile {
    pub fn new(factorization: Factorization, seed: u64) -> Self {
        Self {
            factorization,
            seed,
            row_labels: None,
            col_labels: None,
            row_mass: None,
        }
    }

    fn dims(&self) -> (usize, usize, usize) {
        match &self.factorization {
            Factorization::Nmf(n) => (n.m().rows(), n.h().cols(), n.k()),
            Factorization::Budget(b) => (b.w().rows(), b.g().cols(), b.k()),
            Factorization::Lca(l) => (l.a().rows(), l.b().cols(), l.k()),
        }
    }
}

fn push_matrix(out: &mut String, name: &str, m: &Matrix) {
    let _ = writeln!(out, "matrix {name} {} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
}

fn push_vector(out: &mut String, name: &str, v: &[f64]) {
    let _ = writeln!(out, "vector {name} {}", v.len());
    for x in v {
        let _ = writeln!(out, "{x:.16e}");
    }
}

pub fn to_text(f: &FactorizationFile) -> String {
    let (i, j, k) = f.dims();
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "kind {}", f.factorization.kind());
    let _ = writeln!(out, "rows {i}\ncols {j}\nk {k}\nseed {}", f.seed);
    for (name, labels) in [("row_labels", &f.row_labels), ("col_labels", &f.col_labels)] {
        if let Some(l) = labels {
            let _ = writeln!(out, "{name} {}", l.len());
            for s in l {
                let _ = writeln!(out, "{s}");
            }
        }
    }
    match &f.factorization {
        Factorization::Nmf(n) => {
            push_matrix(&mut out, "M", n.m());
            push_matrix(&mut out, "H", n.h());
        }
        Factorization::Budget(b) => {
            push_matrix(&mut out, "W", b.w());
            push_matrix(&mut out, "G", b.g());
        }
        Factorization::Lca(l) => {
            push_matrix(&mut out, "A", l.a());
            push_vector(&mut out, "theta", l.theta());
            push_matrix(&mut out, "B", l.b());
        }
    }
    if let Some(m) = &f.row_mass {
        push_vector(&mut out, "masses", m.as_slice());
    }
    out.push_str("end\n");
    out
}

pub fn write_factorization(path: impl AsRef<Path>, f: &FactorizationFile) -> Result<()> {
    std::fs::write(path, to_text(f))?;
    Ok(())
}

pub fn read_factorization(path: impl AsRef<Path>) -> Result<FactorizationFile> {
    from_text(&std::fs::read_to_string(path)?)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        match self.inner.next() {
            Some((n, l)) => {
                self.line = n + 1;
                Ok(l)
            }
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: 1,
            message: msg.into(),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let l = self.next()?;
        l.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected `{key}`")))
    }

    fn number<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.trim().parse().map_err(|_| self.err(format!("`{s}` is not a number")))
    }
}

pub fn from_text(text: &str) -> Result<FactorizationFile> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    if lines.next()? != MAGIC {
        return Err(lines.err("not a factorization file"));
    }
    let kind = lines.keyed("kind")?.trim().to_string();
    let raw = lines.keyed("rows")?;
    let rows: usize = lines.number(raw)?;
    let raw = lines.keyed("cols")?;
    let cols: usize = lines.number(raw)?;
    let raw = lines.keyed("k")?;
    let k: usize = lines.number(raw)?;
    let raw = lines.keyed("seed")?;
    let seed: u64 = lines.number(raw)?;
    let mut row_labels = None;
    let mut col_labels = None;
    let mut mats: Vec<(String, Matrix)> = Vec::new();
    let mut vecs: Vec<(String, Vec<f64>)> = Vec::new();
    loop {
        let l = lines.next()?;
        let parts: Vec<&str> = l.split(' ').collect();
        match parts.as_slice() {
            ["end"] => break,
            [which @ ("row_labels" | "col_labels"), n] => {
                let n: usize = lines.number(n)?;
                let mut labels = Vec::with_capacity(n);
                for _ in 0..n {
                    labels.push(lines.next()?.to_string());
                }
                if *which == "row_labels" {
                    row_labels = Some(labels);
                } else {
                    col_labels = Some(labels);
                }
            }
            ["matrix", name, r, c] => {
                let (r, c): (usize, usize) = (lines.number(r)?, lines.number(c)?);
                let mut data = Vec::with_capacity(r * c);
                for _ in 0..r {
                    let row = lines.next()?;
                    let vals: Vec<f64> = row
                        .split(' ')
                        .map(|s| lines.number(s))
                        .collect::<Result<_>>()?;
                    if vals.len() != c {
                        return Err(Error::RaggedRow {
                            line: lines.line,
                            found: vals.len(),
                            expected: c,
                        });
                    }
                    data.extend(vals);
                }
                mats.push((name.to_string(), Matrix::new(r, c, data)?));
            }
            ["vector", name, n] => {
                let n: usize = lines.number(n)?;
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    let raw = lines.next()?;
                    v.push(lines.number(raw)?);
                }
                vecs.push((name.to_string(), v));
            }
            _ => return Err(lines.err(format!("unexpected line `{l}`"))),
        }
    }
    let take = |name: &str| -> Result<Matrix> {
        mats.iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m.clone())
            .ok_or_else(|| Error::Parse {
                line: 0,
                column: 1,
                message: format!("missing matrix {name}"),
            })
    };
    let factorization = match kind.as_str() {
        "nmf" => Factorization::Nmf(NmfFactorization::new(take("M")?, take("H")?)?),
        "budget" => Factorization::Budget(BudgetFactorization::from_matrices(take("W")?, take("G")?)?),
        "lca" => {
            let theta = vecs
                .iter()
                .find(|(n, _)| n == "theta")
                .map(|(_, v)| v.clone())
                .ok_or_else(|| lines.err("missing vector theta"))?;
            Factorization::Lca(LcaFactorization::new(
                take("A")?,
                theta,
                CompositionMatrix::new(take("B")?)?,
            )?)
        }
        other => return Err(lines.err(format!("unknown kind `{other}`"))),
    };
    let file = FactorizationFile {
        factorization,
        seed,
        row_labels,
        col_labels,
        row_mass: match vecs.into_iter().find(|(n, _)| n == "masses") {
            Some((_, v)) => Some(RowMassVector::new(v)?),
            None => None,
        },
    };
    if file.dims() != (rows, cols, k) {
        return Err(Error::DimensionMismatch(format!(
            "header says {rows}x{cols} with K = {k}, blocks say {:?}",
            file.dims()
        )));
    }
    if file.row_labels.as_ref().is_some_and(|l| l.len() != rows)
        || file.col_labels.as_ref().is_some_and(|l| l.len() != cols)
        || file.row_mass.as_ref().is_some_and(|m| m.len() != rows)
    {
        return Err(Error::DimensionMismatch("label or mass block length".into()));
    }
    Ok(file)
}
