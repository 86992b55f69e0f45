//! Line-oriented arrangement format.
//!
//! ```text
//! arrangement v1
//! field real            # or: field complex
//! ambient <l>
//! n <count>
//! space <id> dim <k>
//! <k rows of l reals, or l pairs re,im>
//! ```

use std::fmt::Write as _;

use crate::arrangement::{Arrangement, ArrangementError, ComplexSubspace, Subspace};
use crate::linalg::{Matrix, Tolerance};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub enum FileData<T> {
    Real(Vec<Matrix<T>>),
    Complex(Vec<(Matrix<T>, Matrix<T>)>),
}

/// Parsed file contents before any invariant beyond shape is checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrangementFile<T> {
    pub ambient: usize,
    pub data: FileData<T>,
}

impl<T: Real> ArrangementFile<T> {
    pub fn is_complex(&self) -> bool {
        matches!(self.data, FileData::Complex(_))
    }

    /// Real arrangement; every basis must already be orthonormal.
    pub fn into_real(self, tol: &Tolerance<T>) -> Result<Arrangement<T>, ArrangementError> {
        let FileData::Real(bases) = self.data else {
            return Err(ArrangementError::Parse {
                line: 2,
                msg: "complex arrangement where a real one is required (reduce it first)".into(),
            });
        };
        let mut spaces = Vec::with_capacity(bases.len());
        for (i, b) in bases.into_iter().enumerate() {
            spaces.push(Subspace::from_orthonormal(b, tol).map_err(|e| match e {
                ArrangementError::NotOrthonormal { deviation, .. } => {
                    ArrangementError::NotOrthonormal { space: Some(i), deviation }
                }
                other => other,
            })?);
        }
        Arrangement::new(self.ambient, spaces)
    }

    /// Complex spaces; a real file is read as complex with zero imaginary part.
    pub fn into_complex(self, tol: &Tolerance<T>) -> Result<Vec<ComplexSubspace<T>>, ArrangementError> {
        let pairs: Vec<(Matrix<T>, Matrix<T>)> = match self.data {
            FileData::Complex(p) => p,
            FileData::Real(r) => r
                .into_iter()
                .map(|m| {
                    let z = Matrix::zeros(m.rows(), m.cols());
                    (m, z)
                })
                .collect(),
        };
        pairs
            .into_iter()
            .enumerate()
            .map(|(i, (re, im))| {
                ComplexSubspace::new(re, im, tol).map_err(|e| match e {
                    ArrangementError::ComplexDependent { rank, need, .. } => {
                        ArrangementError::ComplexDependent { space: i, rank, need }
                    }
                    other => other,
                })
            })
            .collect()
    }
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate().peekable(),
            last: 0,
        }
    }

    /// Next non-blank, non-comment line with its 1-based number.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            self.last = i + 1;
            if !line.is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), ArrangementError> {
        let last = self.last;
        self.next().ok_or_else(|| ArrangementError::Parse {
            line: last + 1,
            msg: format!("unexpected end of input, expected {what}"),
        })
    }
}

fn perr(line: usize, msg: impl Into<String>) -> ArrangementError {
    ArrangementError::Parse { line, msg: msg.into() }
}

/// `key <value>` on its own line.
fn keyed<V: std::str::FromStr>(line: usize, text: &str, key: &str) -> Result<V, ArrangementError> {
    let mut it = text.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(k), Some(v), None) if k == key => {
            v.parse().map_err(|_| perr(line, format!("invalid value `{v}` for `{key}`")))
        }
        _ => Err(perr(line, format!("expected `{key} <value>`, found `{text}`"))),
    }
}

fn parse_real<T: Real>(line: usize, tok: &str) -> Result<T, ArrangementError> {
    let v: f64 = tok.parse().map_err(|_| perr(line, format!("invalid number `{tok}`")))?;
    if !v.is_finite() {
        return Err(perr(line, format!("non-finite entry `{tok}`")));
    }
    Ok(T::lit(v))
}

pub fn parse_arrangement<T: Real>(text: &str) -> Result<ArrangementFile<T>, ArrangementError> {
    let mut lines = Lines::new(text);
    let (ln, head) = lines.expect("header")?;
    if head.split_whitespace().collect::<Vec<_>>() != ["arrangement", "v1"] {
        return Err(perr(ln, format!("expected `arrangement v1`, found `{head}`")));
    }
    let (ln, field) = lines.expect("field line")?;
    let complex = match keyed::<String>(ln, field, "field")?.as_str() {
        "real" => false,
        "complex" => true,
        other => return Err(perr(ln, format!("unknown field `{other}`"))),
    };
    let (ln, amb) = lines.expect("ambient line")?;
    let ambient: usize = keyed(ln, amb, "ambient")?;
    let (ln, cnt) = lines.expect("count line")?;
    let n: usize = keyed(ln, cnt, "n")?;

    let mut real = Vec::new();
    let mut cplx = Vec::new();
    for id in 0..n {
        let (ln, header) = lines.expect("space header")?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        let k: usize = match toks.as_slice() {
            ["space", sid, "dim", k] => {
                if sid.parse::<usize>().ok() != Some(id) {
                    return Err(perr(ln, format!("expected space {id}, found `{sid}`")));
                }
                k.parse().map_err(|_| perr(ln, format!("invalid dimension `{k}`")))?
            }
            _ => return Err(perr(ln, format!("expected `space {id} dim <k>`, found `{header}`"))),
        };
        if k > ambient {
            return Err(perr(ln, format!("dimension {k} exceeds ambient {ambient}")));
        }
        let mut re = Vec::with_capacity(k * ambient);
        let mut im = Vec::with_capacity(if complex { k * ambient } else { 0 });
        for _ in 0..k {
            let (ln, row) = lines.expect("basis row")?;
            let toks: Vec<&str> = row.split_whitespace().collect();
            if toks.len() != ambient {
                return Err(perr(ln, format!("expected {ambient} entries, found {}", toks.len())));
            }
            for tok in toks {
                if complex {
                    let (a, b) = tok
                        .split_once(',')
                        .ok_or_else(|| perr(ln, format!("expected `re,im`, found `{tok}`")))?;
                    re.push(parse_real(ln, a)?);
                    im.push(parse_real(ln, b)?);
                } else {
                    re.push(parse_real(ln, tok)?);
                }
            }
        }
        let re = Matrix::new(k, ambient, re)?;
        if complex {
            cplx.push((re, Matrix::new(k, ambient, im)?));
        } else {
            real.push(re);
        }
    }
    if let Some((ln, extra)) = lines.next() {
        return Err(perr(ln, format!("trailing content `{extra}`")));
    }
    let data = if complex { FileData::Complex(cplx) } else { FileData::Real(real) };
    Ok(ArrangementFile { ambient, data })
}

fn fmt_num<T: Real>(x: T) -> String {
    format!("{:.16e}", x.as_f64())
}

fn header(out: &mut String, field: &str, ambient: usize, n: usize) {
    let _ = writeln!(out, "arrangement v1\nfield {field}\nambient {ambient}\nn {n}");
}

pub fn write_arrangement<T: Real>(arr: &Arrangement<T>) -> String {
    let mut out = String::new();
    header(&mut out, "real", arr.ambient(), arr.n());
    for (i, s) in arr.spaces().iter().enumerate() {
        let _ = writeln!(out, "space {i} dim {}", s.dim());
        for row in s.basis().row_iter() {
            let line: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
    }
    out
}

pub fn write_complex_arrangement<T: Real>(ambient: usize, spaces: &[ComplexSubspace<T>]) -> String {
    let mut out = String::new();
    header(&mut out, "complex", ambient, spaces.len());
    for (i, s) in spaces.iter().enumerate() {
        let _ = writeln!(out, "space {i} dim {}", s.dim());
        for (a, b) in s.re().row_iter().zip(s.im().row_iter()) {
            let line: Vec<String> = a.iter().zip(b).map(|(&x, &y)| format!("{},{}", fmt_num(x), fmt_num(y))).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
    }
    out
}

/// `matrix <rows> <cols>` followed by the rows, in the same number format as
/// basis rows.
pub fn write_matrix<T: Real>(m: &Matrix<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "matrix {} {}", m.rows(), m.cols());
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

/// Reads the first matrix block of `text`; lines after it are left alone.
pub fn parse_matrix<T: Real>(text: &str) -> Result<Matrix<T>, ArrangementError> {
    let mut lines = Lines::new(text);
    let (ln, head) = lines.expect("matrix header")?;
    let (r, c) = match head.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["matrix", r, c] => (
            r.parse::<usize>().map_err(|_| perr(ln, format!("invalid row count `{r}`")))?,
            c.parse::<usize>().map_err(|_| perr(ln, format!("invalid column count `{c}`")))?,
        ),
        _ => return Err(perr(ln, format!("expected `matrix <rows> <cols>`, found `{head}`"))),
    };
    let mut data = Vec::with_capacity(r * c);
    for _ in 0..r {
        let (ln, row) = lines.expect("matrix row")?;
        let toks: Vec<&str> = row.split_whitespace().collect();
        if toks.len() != c {
            return Err(perr(ln, format!("expected {c} entries, found {}", toks.len())));
        }
        for tok in toks {
            data.push(parse_real(ln, tok)?);
        }
    }
    Ok(Matrix::new(r, c, data)?)
}
