//! Matrices with entries in a curved dga.

use crate::algebra::AElement;
use crate::dga::CurvedDga;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A dense rows × cols matrix of algebra elements, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AMatrix {
    rows: usize,
    cols: usize,
    data: Vec<AElement>,
}

impl AMatrix {
    pub fn zeros(rows: usize, cols: usize) -> AMatrix {
        AMatrix { rows, cols, data: vec![AElement::zero(); rows * cols] }
    }

    pub fn identity(alg: &CurvedDga, n: usize) -> AMatrix {
        let mut m = AMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, alg.unit());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<AElement>>) -> Result<AMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(AMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &AElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: AElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut AElement {
        &mut self.data[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn column(&self, j: usize) -> Vec<AElement> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_columns(rows: usize, cols: &[Vec<AElement>]) -> AMatrix {
        let mut m = AMatrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn map(&self, f: impl Fn(usize, usize, &AElement) -> AElement) -> AMatrix {
        let mut m = AMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, f(i, j, self.get(i, j)));
            }
        }
        m
    }

    fn check_shape(&self, o: &AMatrix) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} vs {}×{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &AMatrix) -> Result<AMatrix> {
        self.check_shape(o)?;
        Ok(self.map(|i, j, x| x.plus(o.get(i, j))))
    }

    pub fn sub(&self, o: &AMatrix) -> Result<AMatrix> {
        self.check_shape(o)?;
        Ok(self.map(|i, j, x| x.minus(o.get(i, j))))
    }

    pub fn neg(&self) -> AMatrix {
        self.map(|_, _, x| x.neg())
    }

    pub fn scale(&self, s: &Scalar) -> AMatrix {
        self.map(|_, _, x| x.scale(s))
    }

    /// Matrix product with entries multiplied in `alg`.
    pub fn mul(&self, alg: &CurvedDga, o: &AMatrix) -> Result<AMatrix> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut m = AMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let p = alg.multiply(a, b);
                        m.get_mut(i, j).add_assign(&p);
                    }
                }
            }
        }
        Ok(m)
    }

    /// Applies the matrix to a coordinate column.
    pub fn apply(&self, alg: &CurvedDga, v: &[AElement]) -> Vec<AElement> {
        let mut out = vec![AElement::zero(); self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            for (k, x) in v.iter().enumerate() {
                let a = self.get(i, k);
                if !a.is_zero() && !x.is_zero() {
                    o.add_assign(&alg.multiply(a, x));
                }
            }
        }
        out
    }

    /// The 2×2 block matrix [[a, b], [c, d]].
    pub fn block(a: &AMatrix, b: &AMatrix, c: &AMatrix, d: &AMatrix) -> Result<AMatrix> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::DimensionMismatch("incompatible blocks".into()));
        }
        let (r, cl) = (a.rows + c.rows, a.cols + b.cols);
        let mut m = AMatrix::zeros(r, cl);
        for i in 0..r {
            for j in 0..cl {
                let src = match (i < a.rows, j < a.cols) {
                    (true, true) => a.get(i, j),
                    (true, false) => b.get(i, j - a.cols),
                    (false, true) => c.get(i - a.rows, j),
                    (false, false) => d.get(i - a.rows, j - a.cols),
                };
                m.set(i, j, src.clone());
            }
        }
        Ok(m)
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> AMatrix {
        let mut m = AMatrix::zeros(rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    /// Entries restricted to algebra degree `k`.
    pub fn form_component(&self, alg: &CurvedDga, k: u32) -> AMatrix {
        self.map(|_, _, x| alg.component(x, k))
    }

    /// Largest algebra degree of a nonzero entry.
    pub fn max_form_degree(&self, alg: &CurvedDga) -> Option<u32> {
        self.data
            .iter()
            .flat_map(|x| x.terms().map(|(k, _)| alg.degree(k)))
            .max()
    }

    pub fn format(&self, alg: &CurvedDga) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| alg.format_element(self.get(i, j))).collect())
            .collect()
    }
}
