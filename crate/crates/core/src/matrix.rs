//! Dense matrices over a [`Field`] and the handful of eliminations the
//! constructions and decoders need.

use crate::gf::{Field, FieldElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    /// Panics if the rows have unequal lengths.
    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Row vector times matrix: Σ_i v_i · row_i.
    pub fn left_mul(&self, field: &Field, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.rows, "vector length must match row count");
        let mut out = vec![FieldElement::ZERO; self.cols];
        for (r, &x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.row(r)) {
                *o = field.add(*o, field.mul(x, g));
            }
        }
        out
    }

    /// Reduced row-echelon form and the pivot columns.
    pub fn rref(&self, field: &Field) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(lead, p);
            let inv = field.inv(m.get(lead, c));
            for j in c..m.cols {
                m.set(lead, j, field.mul(m.get(lead, j), inv));
            }
            for r in 0..m.rows {
                let f = m.get(r, c);
                if r == lead || f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = field.sub(m.get(r, j), field.mul(f, m.get(lead, j)));
                    m.set(r, j, v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, field: &Field) -> usize {
        self.rref(field).1.len()
    }

    /// Nonzero rows of the reduced echelon form: a canonical basis of the
    /// row space, so two matrices span the same space iff these agree.
    pub fn row_space_basis(&self, field: &Field) -> Matrix {
        let (r, pivots) = self.rref(field);
        Matrix::from_rows((0..pivots.len()).map(|i| r.row(i).to_vec()).collect::<Vec<_>>())
            .with_cols(self.cols)
    }

    /// Basis of {x : A x = 0}, one vector per free column, in ascending
    /// free-column order.
    pub fn nullspace(&self, field: &Field) -> Vec<Vec<FieldElement>> {
        let (r, pivots) = self.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut x = vec![FieldElement::ZERO; self.cols];
                x[fc] = FieldElement::ONE;
                for (i, &pc) in pivots.iter().enumerate() {
                    x[pc] = field.neg(r.get(i, fc));
                }
                x
            })
            .collect()
    }

    /// Finds λ with Σ_j λ_j · column_j = target, if one exists.
    pub fn solve_columns(&self, field: &Field, target: &[FieldElement]) -> Option<Vec<FieldElement>> {
        assert_eq!(target.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, target[r]);
        }
        let (red, pivots) = aug.rref(field);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![FieldElement::ZERO; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = red.get(i, self.cols);
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn with_cols(mut self, cols: usize) -> Matrix {
        if self.rows == 0 {
            self.cols = cols;
        }
        self
    }
}

/// Echelon basis of a subspace of F^len, grown one vector at a time.
#[derive(Debug, Clone)]
pub struct Echelon<'f> {
    field: &'f Field,
    /// (pivot, row) with the row normalized to 1 at the pivot and zero at
    /// every other row's pivot.
    rows: Vec<(usize, Vec<FieldElement>)>,
}

impl<'f> Echelon<'f> {
    pub fn new(field: &'f Field) -> Self {
        Echelon {
            field,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// `v` minus its projection onto the pivots.
    pub fn reduce(&self, mut v: Vec<FieldElement>) -> Vec<FieldElement> {
        let f = self.field;
        for (p, b) in &self.rows {
            let c = v[*p];
            if !c.is_zero() {
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        self.reduce(v.to_vec()).iter().all(|x| x.is_zero())
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<FieldElement>) -> bool {
        let f = self.field;
        let v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = f.inv(v[p]);
        let v: Vec<FieldElement> = v.iter().map(|&x| f.mul(x, inv)).collect();
        for (_, b) in self.rows.iter_mut() {
            let c = b[p];
            if !c.is_zero() {
                for (x, &y) in b.iter_mut().zip(&v) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        self.rows.push((p, v));
        true
    }
}
