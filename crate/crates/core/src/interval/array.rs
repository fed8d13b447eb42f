use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::{Interval, IntervalError};

/// Fixed-length vector of intervals (a box).
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalVector {
    elems: Vec<Interval>,
}

impl IntervalVector {
    pub fn new(elems: Vec<Interval>) -> Self {
        Self { elems }
    }

    pub fn from_bounds(bounds: &[(f64, f64)]) -> Result<Self, IntervalError> {
        bounds.iter().map(|&(lo, hi)| Interval::new(lo, hi)).collect::<Result<Vec<_>, _>>().map(Self::new)
    }

    pub fn from_points(points: &[f64]) -> Self {
        Self::new(points.iter().map(|&x| Interval::point(x)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![Interval::ZERO; n])
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.elems.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.elems
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.elems.iter().map(Interval::midpoint).collect()
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.len() && self.elems.iter().zip(x).all(|(i, &v)| i.contains(v))
    }

    pub fn subset_of(&self, other: &IntervalVector) -> bool {
        self.len() == other.len() && self.elems.iter().zip(&other.elems).all(|(a, b)| a.subset_of(b))
    }

    pub fn hull(&self, other: &IntervalVector) -> Result<IntervalVector, IntervalError> {
        self.check_len(other.len())?;
        Ok(Self::new(self.elems.iter().zip(&other.elems).map(|(a, b)| a.hull(b)).collect()))
    }

    pub fn intersect(&self, other: &IntervalVector) -> Result<IntervalVector, IntervalError> {
        self.check_len(other.len())?;
        self.elems.iter().zip(&other.elems).map(|(a, b)| a.intersect(b)).collect::<Result<Vec<_>, _>>().map(Self::new)
    }

    /// Largest component width.
    pub fn max_width(&self) -> f64 {
        self.elems.iter().map(Interval::width).fold(0.0, f64::max)
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<(), IntervalError> {
        if self.len() != n {
            return Err(IntervalError::DimensionMismatch { expected: self.len(), got: n });
        }
        Ok(())
    }
}

impl Index<usize> for IntervalVector {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.elems[i]
    }
}

impl IndexMut<usize> for IntervalVector {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.elems[i]
    }
}

impl FromIterator<Interval> for IntervalVector {
    fn from_iter<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl fmt::Debug for IntervalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.elems).finish()
    }
}

impl fmt::Display for IntervalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

/// Dense row-major matrix of intervals.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    elems: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn new(rows: usize, cols: usize, elems: Vec<Interval>) -> Result<Self, IntervalError> {
        if elems.len() != rows * cols {
            return Err(IntervalError::DimensionMismatch { expected: rows * cols, got: elems.len() });
        }
        Ok(Self { rows, cols, elems })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, elems: vec![Interval::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Interval::ONE;
        }
        m
    }

    /// Point matrix from row-major values.
    pub fn from_points(rows: usize, cols: usize, values: &[f64]) -> Result<Self, IntervalError> {
        Self::new(rows, cols, values.iter().map(|&v| Interval::point(v)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Interval] {
        &self.elems[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.elems.iter()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.elems.iter().map(Interval::midpoint).collect()
    }

    pub fn is_point(&self) -> bool {
        self.elems.iter().all(Interval::is_point)
    }

    pub fn subset_of(&self, other: &IntervalMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.elems.iter().zip(&other.elems).all(|(a, b)| a.subset_of(b))
    }

    /// Natural interval evaluation of `M v`.
    pub fn mul_vec(&self, v: &IntervalVector) -> Result<IntervalVector, IntervalError> {
        if v.len() != self.cols {
            return Err(IntervalError::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v.iter()).fold(Interval::ZERO, |acc, (&a, &x)| acc + a * x))
            .collect())
    }

    /// Natural interval evaluation of `A B`.
    pub fn mul_mat(&self, other: &IntervalMatrix) -> Result<IntervalMatrix, IntervalError> {
        if self.cols != other.rows {
            return Err(IntervalError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = IntervalMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                out[(i, j)] = (0..self.cols).fold(Interval::ZERO, |acc, k| acc + self[(i, k)] * other[(k, j)]);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &IntervalMatrix) -> Result<IntervalMatrix, IntervalError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(IntervalError::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            elems: self.elems.iter().zip(&other.elems).map(|(&a, &b)| a + b).collect(),
        })
    }

    pub fn diagonal(&self) -> IntervalVector {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }
}

impl Index<(usize, usize)> for IntervalMatrix {
    type Output = Interval;
    fn index(&self, (i, j): (usize, usize)) -> &Interval {
        &self.elems[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntervalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Interval {
        &mut self.elems[i * self.cols + j]
    }
}

impl fmt::Debug for IntervalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[Interval]> = (0..self.rows).map(|i| self.row(i)).collect();
        f.debug_list().entries(rows).finish()
    }
}
