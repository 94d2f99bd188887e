//! Dense real coefficient tensors.
//!
//! A probe is stored as one coefficient per tuple of reference-basis indices,
//! so multilinearity is structural and composition is a finite contraction.
//! Data is row-major; the last index runs fastest.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

fn decode(mut flat: usize, shape: &[usize], out: &mut [usize]) {
    for k in (0..shape.len()).rev() {
        out[k] = flat % shape[k];
        flat /= shape[k];
    }
}

impl Tensor {
    pub fn zeros(shape: impl Into<Vec<usize>>) -> Self {
        let shape = shape.into();
        let len = shape.iter().product();
        Self {
            shape,
            data: vec![0.0; len],
        }
    }

    pub fn from_data(shape: impl Into<Vec<usize>>, data: Vec<f64>) -> Result<Self> {
        let shape = shape.into();
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry { index });
        }
        Ok(Self { shape, data })
    }

    /// Builds entry-by-entry; large tensors are filled in parallel.
    pub fn from_fn(shape: impl Into<Vec<usize>>, f: impl Fn(&[usize]) -> f64 + Send + Sync) -> Self {
        let shape = shape.into();
        let len: usize = shape.iter().product();
        let rank = shape.len();
        let data = par::map_indexed(len, |flat| {
            let mut idx = vec![0usize; rank];
            decode(flat, &shape, &mut idx);
            f(&idx)
        });
        Self { shape, data }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.rank());
        let s = strides(&self.shape);
        let flat: usize = idx.iter().zip(&s).map(|(i, st)| i * st).sum();
        self.data[flat]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let s = strides(&self.shape);
        let flat: usize = idx.iter().zip(&s).map(|(i, st)| i * st).sum();
        self.data[flat] = value;
    }

    /// Value of a rank-0 tensor.
    pub fn scalar(&self) -> f64 {
        debug_assert!(self.shape.is_empty());
        self.data[0]
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Tensor, f: impl Fn(f64, f64) -> f64) -> Result<Tensor> {
        if self.shape != other.shape {
            return Err(Error::TensorShapeMismatch {
                expected: self.shape.clone(),
                got: other.shape.clone(),
            });
        }
        Ok(Tensor {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Contracts the last axis with a vector, dropping one rank.
    pub fn contract_last(&self, v: &DVector<f64>) -> Result<Tensor> {
        let rank = self.rank();
        if rank == 0 {
            return Err(Error::TensorShapeMismatch {
                expected: vec![v.len()],
                got: vec![],
            });
        }
        let dim = self.shape[rank - 1];
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        let out_shape: Vec<usize> = self.shape[..rank - 1].to_vec();
        let out_len: usize = out_shape.iter().product();
        let data = (0..out_len)
            .map(|p| {
                let base = p * dim;
                (0..dim).map(|i| self.data[base + i] * v[i]).sum()
            })
            .collect();
        Ok(Tensor {
            shape: out_shape,
            data,
        })
    }

    /// Contracts the first axis with a vector, dropping one rank.
    pub fn contract_first(&self, v: &DVector<f64>) -> Result<Tensor> {
        let rank = self.rank();
        if rank == 0 {
            return Err(Error::TensorShapeMismatch {
                expected: vec![v.len()],
                got: vec![],
            });
        }
        let dim = self.shape[0];
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        let out_shape: Vec<usize> = self.shape[1..].to_vec();
        let rest: usize = out_shape.iter().product();
        let data = (0..rest)
            .map(|p| (0..dim).map(|i| self.data[i * rest + p] * v[i]).sum())
            .collect();
        Ok(Tensor {
            shape: out_shape,
            data,
        })
    }

    /// Full contraction against one vector per axis (the probe value).
    pub fn contract_all(&self, vectors: &[DVector<f64>]) -> Result<f64> {
        if vectors.len() != self.rank() {
            return Err(Error::BoundaryArity {
                expected: self.rank(),
                got: vectors.len(),
            });
        }
        let mut t = self.clone();
        for v in vectors.iter().rev() {
            t = t.contract_last(v)?;
        }
        Ok(t.scalar())
    }

    /// Replaces axis `axis` by its image under `m`:
    /// `out[..., j, ...] = sum_i self[..., i, ...] m[i, j]`.
    pub fn apply_matrix(&self, axis: usize, m: &DMatrix<f64>) -> Result<Tensor> {
        let dim = self.shape[axis];
        if m.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.nrows(),
            });
        }
        let mut out_shape = self.shape.clone();
        out_shape[axis] = m.ncols();
        let s_in = strides(&self.shape);
        let s_out = strides(&out_shape);
        let out_len: usize = out_shape.iter().product();
        let rank = self.rank();
        let data = par::map_indexed(out_len, |flat| {
            let mut idx = vec![0usize; rank];
            decode(flat, &out_shape, &mut idx);
            let j = idx[axis];
            let base: usize = idx
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != axis)
                .map(|(k, &i)| i * s_in[k])
                .sum();
            (0..dim).map(|i| self.data[base + i * s_in[axis]] * m[(i, j)]).sum()
        });
        debug_assert_eq!(s_out.len(), rank);
        Ok(Tensor {
            shape: out_shape,
            data,
        })
    }

    /// Pairwise contraction of `self` and `other` over the given axes.
    ///
    /// Output axes are `self`'s free axes in order, then `other`'s. This is
    /// the engine's hot loop: output entries are computed independently and
    /// in parallel when large.
    pub fn contract_pair(
        &self,
        axes_self: &[usize],
        other: &Tensor,
        axes_other: &[usize],
    ) -> Result<Tensor> {
        if axes_self.len() != axes_other.len() {
            return Err(Error::BoundaryArity {
                expected: axes_self.len(),
                got: axes_other.len(),
            });
        }
        for (&a, &b) in axes_self.iter().zip(axes_other) {
            if self.shape[a] != other.shape[b] {
                return Err(Error::DimensionMismatch {
                    expected: self.shape[a],
                    got: other.shape[b],
                });
            }
        }
        let free_self: Vec<usize> = (0..self.rank()).filter(|k| !axes_self.contains(k)).collect();
        let free_other: Vec<usize> = (0..other.rank())
            .filter(|k| !axes_other.contains(k))
            .collect();

        let mut out_shape: Vec<usize> = free_self.iter().map(|&k| self.shape[k]).collect();
        out_shape.extend(free_other.iter().map(|&k| other.shape[k]));
        let contract_shape: Vec<usize> = axes_self.iter().map(|&k| self.shape[k]).collect();
        let contract_len: usize = contract_shape.iter().product();
        let out_len: usize = out_shape.iter().product();

        let s_self = strides(&self.shape);
        let s_other = strides(&other.shape);
        // Strides of each output/contraction digit inside the flat inputs.
        let free_self_strides: Vec<usize> = free_self.iter().map(|&k| s_self[k]).collect();
        let free_other_strides: Vec<usize> = free_other.iter().map(|&k| s_other[k]).collect();
        let c_self_strides: Vec<usize> = axes_self.iter().map(|&k| s_self[k]).collect();
        let c_other_strides: Vec<usize> = axes_other.iter().map(|&k| s_other[k]).collect();

        let n_free_self = free_self.len();
        let rank_out = out_shape.len();
        let rank_c = contract_shape.len();

        let data = par::map_indexed(out_len, |flat| {
            let mut idx = vec![0usize; rank_out];
            decode(flat, &out_shape, &mut idx);
            let base_self: usize = idx[..n_free_self]
                .iter()
                .zip(&free_self_strides)
                .map(|(i, st)| i * st)
                .sum();
            let base_other: usize = idx[n_free_self..]
                .iter()
                .zip(&free_other_strides)
                .map(|(i, st)| i * st)
                .sum();
            let mut acc = 0.0;
            let mut c_idx = vec![0usize; rank_c];
            for c_flat in 0..contract_len {
                decode(c_flat, &contract_shape, &mut c_idx);
                let off_self: usize = c_idx.iter().zip(&c_self_strides).map(|(i, st)| i * st).sum();
                let off_other: usize = c_idx
                    .iter()
                    .zip(&c_other_strides)
                    .map(|(i, st)| i * st)
                    .sum();
                acc += self.data[base_self + off_self] * other.data[base_other + off_other];
            }
            acc
        });
        Ok(Tensor {
            shape: out_shape,
            data,
        })
    }

    /// Iterates all multi-indices of this shape in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let len = self.len();
        let rank = self.rank();
        (0..len).map(move |flat| {
            let mut idx = vec![0usize; rank];
            decode(flat, &self.shape, &mut idx);
            idx
        })
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        debug_assert_eq!(self.shape, other.shape);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
