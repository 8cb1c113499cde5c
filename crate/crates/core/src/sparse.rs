//! Compressed sparse row storage with complex entries.

use crate::error::{Error, Result};
use crate::smallmat::{CMat, C64};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self> {
        let mut rows: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); nrows];
        for (i, j, v) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::Dimension(format!(
                    "entry ({i}, {j}) outside {nrows}x{ncols}"
                )));
            }
            *rows[i].entry(j).or_insert(C64::new(0.0, 0.0)) += v;
        }
        let mut m = CsrMatrix {
            nrows,
            ncols,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        };
        for r in rows {
            for (j, v) in r {
                if v != C64::new(0.0, 0.0) {
                    m.indices.push(j);
                    m.values.push(v);
                }
            }
            m.indptr.push(m.indices.len());
        }
        Ok(m)
    }

    pub fn from_dense(a: &CMat) -> Self {
        let trip = (0..a.rows())
            .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, a[(i, j)]));
        Self::from_triplets(a.rows(), a.cols(), trip).expect("indices come from the matrix shape")
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, C64::new(1.0, 0.0))))
            .expect("diagonal is in range")
    }

    /// Selection matrix with ones at `(keep[c], c)`.
    pub fn selector(n: usize, keep: &[usize]) -> Result<Self> {
        Self::from_triplets(
            n,
            keep.len(),
            keep.iter()
                .enumerate()
                .map(|(c, &r)| (r, c, C64::new(1.0, 0.0))),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b]
            .iter()
            .copied()
            .zip(self.values[a..b].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        match self.indices[a..b].binary_search(&j) {
            Ok(k) => self.values[a + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.ncols, "matvec length");
        (0..self.nrows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(i, j, v)| (j, i, v.conj())),
        )
        .expect("transposed indices are in range")
    }

    pub fn matmul(&self, other: &CsrMatrix) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut out = CsrMatrix {
            nrows: self.nrows,
            ncols: other.ncols,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        };
        let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
        for i in 0..self.nrows {
            acc.clear();
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    *acc.entry(j).or_insert(C64::new(0.0, 0.0)) += a * b;
                }
            }
            for (&j, &v) in &acc {
                if v != C64::new(0.0, 0.0) {
                    out.indices.push(j);
                    out.values.push(v);
                }
            }
            out.indptr.push(out.indices.len());
        }
        Ok(out)
    }

    pub fn add(&self, other: &CsrMatrix) -> Result<Self> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::Dimension(
                "sum of differently shaped matrices".into(),
            ));
        }
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets().chain(other.triplets()),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = self.clone();
        for v in m.values.iter_mut() {
            *v *= s;
        }
        m
    }

    pub fn kron(&self, other: &CsrMatrix) -> Self {
        let (r2, c2) = (other.nrows, other.ncols);
        let trip = self
            .triplets()
            .flat_map(|(i, j, a)| {
                other
                    .triplets()
                    .map(move |(k, l, b)| (i * r2 + k, j * c2 + l, a * b))
            })
            .collect::<Vec<_>>();
        Self::from_triplets(self.nrows * r2, self.ncols * c2, trip)
            .expect("kron indices are in range")
    }

    /// `out[new] = self[perm_rows[new], perm_cols[new]]`.
    pub fn permute(&self, perm_rows: &[usize], perm_cols: &[usize]) -> Result<Self> {
        if perm_rows.len() != self.nrows || perm_cols.len() != self.ncols {
            return Err(Error::Dimension("permutation length".into()));
        }
        let mut inv_r = vec![0; self.nrows];
        let mut inv_c = vec![0; self.ncols];
        for (new, &old) in perm_rows.iter().enumerate() {
            inv_r[old] = new;
        }
        for (new, &old) in perm_cols.iter().enumerate() {
            inv_c[old] = new;
        }
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets().map(|(i, j, v)| (inv_r[i], inv_c[j], v)),
        )
    }

    /// Rows and columns listed in `keep` (in order).
    pub fn principal_submatrix(&self, keep: &[usize]) -> Result<Self> {
        let mut pos = vec![usize::MAX; self.ncols.max(self.nrows)];
        for (new, &old) in keep.iter().enumerate() {
            pos[old] = new;
        }
        let trip: Vec<_> = keep
            .iter()
            .enumerate()
            .flat_map(|(ni, &i)| {
                self.row(i)
                    .filter(|(j, _)| pos[*j] != usize::MAX)
                    .map(move |(j, v)| (ni, j, v))
                    .collect::<Vec<_>>()
            })
            .map(|(ni, j, v)| (ni, pos[j], v))
            .collect();
        Self::from_triplets(keep.len(), keep.len(), trip)
    }

    /// Columns listed in `keep` (in order).
    pub fn select_columns(&self, keep: &[usize]) -> Result<Self> {
        self.matmul(&Self::selector(self.ncols, keep)?)
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    /// Upper bound on the spectral radius from Gershgorin discs.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> CMat {
        let mut a = CMat::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            a[(i, j)] = v;
        }
        a
    }

    pub fn half_bandwidth(&self) -> usize {
        self.triplets()
            .map(|(i, j, _)| i.abs_diff(j))
            .max()
            .unwrap_or(0)
    }

    /// Coordinate text: header `%%blockmg coordinate complex ROWS COLS NNZ`,
    /// then one `row col re im` line per entry, 1-based.
    pub fn to_coordinate_text(&self) -> String {
        use std::fmt::Write as _;
        let mut s = format!(
            "%%blockmg coordinate complex {} {} {}\n",
            self.nrows,
            self.ncols,
            self.nnz()
        );
        for (i, j, v) in self.triplets() {
            let _ = writeln!(s, "{} {} {:?} {:?}", i + 1, j + 1, v.re, v.im);
        }
        s
    }

    pub fn from_coordinate_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty file".into(),
        })?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 6 || h[..3] != ["%%blockmg", "coordinate", "complex"] {
            return Err(Error::Parse {
                line: 1,
                msg: "bad header".into(),
            });
        }
        let num = |s: &str, line: usize| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line,
                msg: format!("bad integer {s:?}"),
            })
        };
        let (nr, nc, nnz) = (num(h[3], 1)?, num(h[4], 1)?, num(h[5], 1)?);
        let mut trip = Vec::with_capacity(nnz);
        for (k, l) in lines {
            let ln = k + 1;
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 4 {
                return Err(Error::Parse {
                    line: ln,
                    msg: "expected 'row col re im'".into(),
                });
            }
            let (i, j) = (num(f[0], ln)?, num(f[1], ln)?);
            let re: f64 = f[2].parse().map_err(|_| Error::Parse {
                line: ln,
                msg: "bad real part".into(),
            })?;
            let im: f64 = f[3].parse().map_err(|_| Error::Parse {
                line: ln,
                msg: "bad imaginary part".into(),
            })?;
            if i == 0 || j == 0 {
                return Err(Error::Parse {
                    line: ln,
                    msg: "indices are 1-based".into(),
                });
            }
            trip.push((i - 1, j - 1, C64::new(re, im)));
        }
        if trip.len() != nnz {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header promises {nnz} entries, found {}", trip.len()),
            });
        }
        Self::from_triplets(nr, nc, trip)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn tridiag(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, c(2.0)));
            if i + 1 < n {
                t.push((i, i + 1, c(-1.0)));
                t.push((i + 1, i, c(-1.0)));
            }
        }
        CsrMatrix::from_triplets(n, n, t).unwrap()
    }

    #[test]
    fn products_match_dense() {
        let a = tridiag(5);
        let b = CsrMatrix::selector(5, &[1, 3]).unwrap();
        let p = a.matmul(&b).unwrap().to_dense();
        let q = a.to_dense().matmul(&b.to_dense()).unwrap();
        assert_eq!(p, q);
        assert_eq!(
            a.matvec(&[c(1.0); 5]),
            vec![c(1.0), c(0.0), c(0.0), c(0.0), c(1.0)]
        );
        assert_eq!(a.gershgorin_bound(), 4.0);
        assert_eq!(a.half_bandwidth(), 1);
    }

    #[test]
    fn duplicates_are_summed() {
        let m = CsrMatrix::from_triplets(
            2,
            2,
            [
                (0, 0, c(1.0)),
                (0, 0, c(2.0)),
                (1, 0, c(1.0)),
                (1, 0, c(-1.0)),
            ],
        )
        .unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), c(3.0));
        assert!(CsrMatrix::from_triplets(2, 2, [(2, 0, c(1.0))]).is_err());
    }

    #[test]
    fn coordinate_text_round_trip() {
        let m = tridiag(4).scale(C64::new(0.1, -0.3));
        let text = m.to_coordinate_text();
        assert!(text.starts_with("%%blockmg coordinate complex 4 4 10\n1 1 "));
        assert_eq!(CsrMatrix::from_coordinate_text(&text).unwrap(), m);
        assert!(
            CsrMatrix::from_coordinate_text("%%blockmg coordinate complex 1 1 1\n0 1 1 0\n")
                .is_err()
        );
    }

    #[test]
    fn permute_and_submatrix() {
        let a = tridiag(3);
        let p = a.permute(&[2, 1, 0], &[2, 1, 0]).unwrap();
        assert_eq!(p, a);
        let s = a.principal_submatrix(&[0, 2]).unwrap();
        assert_eq!(
            s.to_dense(),
            CMat::from_real_rows(&[&[2.0, 0.0], &[0.0, 2.0]])
        );
        let k = CsrMatrix::identity(2).kron(&a);
        assert_eq!(k.nrows(), 6);
        assert_eq!(k.get(4, 3), c(-1.0));
        assert_eq!(k.get(3, 2), c(0.0));
    }
}
