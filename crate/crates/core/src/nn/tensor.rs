//! Dense n-dimensional array in row-major order.
//!
//! This is deliberately minimal: the layers in this crate index into raw
//! slices for their inner loops, so `Tensor` only has to carry shape
//! metadata, provide checked constructors and a handful of whole-tensor
//! operations used by the optimizer and the gradient checker.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<S: Scalar> {
    shape: Vec<usize>,
    data: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![S::zero(); len],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<S>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(Error::Shape {
                expected: format!("{expected} values for shape {shape:?}"),
                got: format!("{} values", data.len()),
            });
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data,
        })
    }

    /// Row-major 1-D tensor.
    pub fn vector(data: Vec<S>) -> Self {
        Tensor {
            shape: vec![data.len()],
            data,
        }
    }

    pub fn scalar(value: S) -> Self {
        Tensor {
            shape: vec![1],
            data: vec![value],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    /// Rows of a rank-2 tensor.
    pub fn row(&self, r: usize) -> &[S] {
        debug_assert_eq!(self.shape.len(), 2);
        let cols = self.shape[1];
        &self.data[r * cols..(r + 1) * cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [S] {
        debug_assert_eq!(self.shape.len(), 2);
        let cols = self.shape[1];
        &mut self.data[r * cols..(r + 1) * cols]
    }

    pub fn fill(&mut self, value: S) {
        self.data.iter_mut().for_each(|v| *v = value);
    }

    /// Reinterpret the same buffer under a new shape of equal volume.
    pub fn reshaped(mut self, shape: &[usize]) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if expected != self.data.len() {
            return Err(Error::Shape {
                expected: format!("volume {expected} for shape {shape:?}"),
                got: format!("volume {}", self.data.len()),
            });
        }
        self.shape = shape.to_vec();
        Ok(self)
    }

    pub fn add_assign(&mut self, other: &Tensor<S>) {
        debug_assert_eq!(self.shape, other.shape);
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += *b;
        }
    }

    pub fn scale(&mut self, factor: S) {
        for v in self.data.iter_mut() {
            *v *= factor;
        }
    }

    /// `self += factor * other`, shapes must agree.
    pub fn add_scaled(&mut self, other: &Tensor<S>, factor: S) {
        debug_assert_eq!(self.shape, other.shape);
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += factor * *b;
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, S> {
        self.data.iter()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// `out = x · w` for `x: [n, k]`, `w: [k, m]`.
pub fn matmul<S: Scalar>(x: &Tensor<S>, w: &Tensor<S>) -> Result<Tensor<S>> {
    let (xs, ws) = (x.shape(), w.shape());
    if xs.len() != 2 || ws.len() != 2 || xs[1] != ws[0] {
        return Err(Error::Shape {
            expected: "[n,k] x [k,m]".to_string(),
            got: format!("{xs:?} x {ws:?}"),
        });
    }
    let (n, k, m) = (xs[0], xs[1], ws[1]);
    let mut out = Tensor::zeros(&[n, m]);
    for i in 0..n {
        let xrow = x.row(i);
        let orow = out.row_mut(i);
        for (p, &xv) in xrow.iter().enumerate().take(k) {
            let wrow = &w.data()[p * m..(p + 1) * m];
            for (o, &wv) in orow.iter_mut().zip(wrow.iter()) {
                *o += xv * wv;
            }
        }
    }
    Ok(out)
}

/// `y = x · v` for a row-major matrix `x: [n, k]` and vector `v: [k]`.
pub fn matvec<S: Scalar>(x: &[S], n: usize, k: usize, v: &[S], out: &mut [S]) {
    debug_assert_eq!(x.len(), n * k);
    debug_assert_eq!(v.len(), k);
    debug_assert_eq!(out.len(), n);
    for i in 0..n {
        let row = &x[i * k..(i + 1) * k];
        let mut acc = S::zero();
        for (a, b) in row.iter().zip(v.iter()) {
            acc += *a * *b;
        }
        out[i] = acc;
    }
}

/// `out[k] = sum_j v[j] * m[j*cols + k]` — row vector times matrix.
pub fn vecmat<S: Scalar>(v: &[S], m: &[S], cols: usize, out: &mut [S]) {
    debug_assert_eq!(v.len() * cols, m.len());
    debug_assert_eq!(out.len(), cols);
    out.iter_mut().for_each(|o| *o = S::zero());
    for (j, &vj) in v.iter().enumerate() {
        let row = &m[j * cols..(j + 1) * cols];
        for (o, &mv) in out.iter_mut().zip(row.iter()) {
            *o += vj * mv;
        }
    }
}

/// `dst[i*cols + k] += a[i] * b[k]` — outer-product accumulation.
pub fn outer_add<S: Scalar>(dst: &mut [S], a: &[S], b: &[S]) {
    debug_assert_eq!(dst.len(), a.len() * b.len());
    let cols = b.len();
    for (i, &av) in a.iter().enumerate() {
        let row = &mut dst[i * cols..(i + 1) * cols];
        for (d, &bv) in row.iter_mut().zip(b.iter()) {
            *d += av * bv;
        }
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        acc += *x * *y;
    }
    acc
}
