//! Compressed-row complex matrices with a parallel mat-vec.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Exec;

/// CSR matrix; rows are sorted by column and hold no explicit zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    hermitian: bool,
}

impl SparseMatrix {
    /// Builds from per-row `(column, value)` lists; duplicates are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, Complex64)>>, hermitian: bool) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (j, v) in row {
                debug_assert!(j < dim);
                if last == Some(j) {
                    *vals.last_mut().expect("entry") += v;
                } else {
                    cols.push(j);
                    vals.push(v);
                    last = Some(j);
                }
            }
            let start = *row_ptr.last().expect("row_ptr");
            let mut w = start;
            for r in start..cols.len() {
                if vals[r] != Complex64::new(0.0, 0.0) {
                    cols[w] = cols[r];
                    vals[w] = vals[r];
                    w += 1;
                }
            }
            cols.truncate(w);
            vals.truncate(w);
            row_ptr.push(w);
        }
        SparseMatrix {
            dim,
            row_ptr,
            cols,
            vals,
            hermitian,
        }
    }

    pub fn from_dense(a: &DMatrix<Complex64>, hermitian: bool) -> Self {
        let rows = (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| (j, a[(i, j)])).collect())
            .collect();
        SparseMatrix::from_rows(rows, hermitian)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Whether the matrix was assembled as Hermitian.
    pub fn hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// y = A x.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64], exec: Exec) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        exec.fill(y, |i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            acc
        });
    }

    pub fn apply(&self, x: &[Complex64], exec: Exec) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.matvec(x, &mut y, exec);
        y
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut col = vec![0.0; self.dim];
        for (k, &j) in self.cols.iter().enumerate() {
            col[j] += self.vals[k].norm();
        }
        col.into_iter().fold(0.0, f64::max)
    }

    /// max |A_ij − conj(A_ji)| ≤ tol.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| {
            self.row(i)
                .all(|(j, v)| (v - self.get(j, i).conj()).norm() <= tol)
        })
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut a = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                a[(i, j)] = v;
            }
        }
        a
    }

    /// Principal submatrix on `indices` (in the given order).
    pub fn submatrix(&self, indices: &[usize]) -> SparseMatrix {
        let mut pos = vec![usize::MAX; self.dim];
        for (new, &old) in indices.iter().enumerate() {
            pos[old] = new;
        }
        let rows = indices
            .iter()
            .map(|&i| {
                self.row(i)
                    .filter(|(j, _)| pos[*j] != usize::MAX)
                    .map(|(j, v)| (pos[j], v))
                    .collect()
            })
            .collect();
        SparseMatrix::from_rows(rows, self.hermitian)
    }

    /// Connected components of the nonzero pattern, each sorted, ordered by
    /// smallest index.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, self.cols[k]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..self.dim {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Writes `dim nnz hermitian` followed by one `i j re im` line per stored
    /// entry (0-based, row-major).
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {} {}", self.dim, self.nnz(), u8::from(self.hermitian))?;
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                writeln!(w, "{} {} {:e} {:e}", i, j, v.re, v.im)?;
            }
        }
        Ok(())
    }

    /// Reads the format produced by [`SparseMatrix::write_to`].
    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let parse_err = |line: &str, why: &str| Error::Parse {
            input: line.to_string(),
            reason: why.to_string(),
        };
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| parse_err("", "missing header"))?
            .map_err(|e| parse_err("", &e.to_string()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 {
            return Err(parse_err(&header, "expected `dim nnz hermitian`"));
        }
        let dim: usize = h[0].parse().map_err(|_| parse_err(&header, "dim"))?;
        let nnz: usize = h[1].parse().map_err(|_| parse_err(&header, "nnz"))?;
        let hermitian = h[2] == "1";
        let mut rows = vec![Vec::new(); dim];
        let mut seen = 0;
        for line in lines {
            let line = line.map_err(|e| parse_err("", &e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(parse_err(&line, "expected `i j re im`"));
            }
            let i: usize = f[0].parse().map_err(|_| parse_err(&line, "row"))?;
            let j: usize = f[1].parse().map_err(|_| parse_err(&line, "column"))?;
            let re: f64 = f[2].parse().map_err(|_| parse_err(&line, "re"))?;
            let im: f64 = f[3].parse().map_err(|_| parse_err(&line, "im"))?;
            if i >= dim || j >= dim {
                return Err(parse_err(&line, "index out of range"));
            }
            rows[i].push((j, Complex64::new(re, im)));
            seen += 1;
        }
        if seen != nnz {
            return Err(parse_err(&header, "entry count does not match header"));
        }
        Ok(SparseMatrix::from_rows(rows, hermitian))
    }
}
