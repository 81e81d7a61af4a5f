use crate::error::{dims_err, Error, Result};
use crate::scalar::{Rational, Scalar};

use super::Matrix;

/// Dense `l x m x n` hypermatrix. Entries are stored flat with `k` varying
/// fastest, then `j`, then `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<T> {
    dims: [usize; 3],
    entries: Vec<T>,
}

/// One argument slot of a contraction: a vector, or the identity on that mode.
#[derive(Debug)]
pub enum Slot<'a, T> {
    Vector(&'a [T]),
    Identity,
}

impl<T> Clone for Slot<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for Slot<'_, T> {}

#[derive(Debug, Clone, PartialEq)]
pub enum Contraction<T> {
    Scalar(T),
    Vector(Vec<T>),
    Matrix(Matrix<T>),
    Tensor(Tensor3<T>),
}

impl<T: Scalar> Tensor3<T> {
    pub fn new(dims: [usize; 3], entries: Vec<T>) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(dims_err(format!(
                "dimensions must be positive, got {dims:?}"
            )));
        }
        let len = dims[0] * dims[1] * dims[2];
        if entries.len() != len {
            return Err(dims_err(format!(
                "{}x{}x{} tensor needs {len} entries, got {}",
                dims[0],
                dims[1],
                dims[2],
                entries.len()
            )));
        }
        Ok(Self { dims, entries })
    }

    pub fn zeros(dims: [usize; 3]) -> Self {
        Self {
            dims,
            entries: vec![T::zero(); dims[0] * dims[1] * dims[2]],
        }
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    entries.push(f(i, j, k));
                }
            }
        }
        Self { dims, entries }
    }

    /// Stack matrices `A_i` (all `m x n`) as the first-mode slices `a_ijk = A_i(j,k)`.
    pub fn from_slices(slices: &[Matrix<T>]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| dims_err("no slices to stack"))?;
        let (m, n) = (first.rows(), first.cols());
        if slices.iter().any(|s| s.rows() != m || s.cols() != n) {
            return Err(dims_err("slices have different shapes"));
        }
        Self::new(
            [slices.len(), m, n],
            slices
                .iter()
                .flat_map(|s| s.data().iter().cloned())
                .collect(),
        )
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn is_cubical(&self) -> bool {
        self.dims[0] == self.dims[1] && self.dims[1] == self.dims[2]
    }

    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &T {
        &self.entries[self.offset(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: T) {
        let o = self.offset(i, j, k);
        self.entries[o] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            dims: self.dims,
            entries: self.entries.iter().map(|x| x.clone() * s.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.dims != other.dims {
            return Err(dims_err(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(Self {
            dims: self.dims,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a.clone(), b.clone()))
                .collect(),
        })
    }

    /// `x ⊗ y ⊗ z`.
    pub fn outer_product(x: &[T], y: &[T], z: &[T]) -> Result<Self> {
        if x.is_empty() || y.is_empty() || z.is_empty() {
            return Err(dims_err("outer product of an empty vector"));
        }
        Ok(Self::from_fn([x.len(), y.len(), z.len()], |i, j, k| {
            x[i].clone() * y[j].clone() * z[k].clone()
        }))
    }

    /// Multilinear matrix multiplication `A·(X, Y, Z)`:
    /// `c_abg = Σ a_ijk x_ia y_jb z_kg`.
    pub fn mlmul(&self, x: &Matrix<T>, y: &Matrix<T>, z: &Matrix<T>) -> Result<Self> {
        let [l, m, n] = self.dims;
        if x.rows() != l || y.rows() != m || z.rows() != n {
            return Err(dims_err(format!(
                "mlmul row counts ({}, {}, {}) do not match tensor {l}x{m}x{n}",
                x.rows(),
                y.rows(),
                z.rows()
            )));
        }
        let (p, q, r) = (x.cols(), y.cols(), z.cols());
        // mode-3, then mode-2, then mode-1
        let mut t3 = vec![T::zero(); l * m * r];
        for i in 0..l {
            for j in 0..m {
                for k in 0..n {
                    let a = self.get(i, j, k);
                    if a.is_zero() {
                        continue;
                    }
                    for g in 0..r {
                        let o = (i * m + j) * r + g;
                        t3[o] = t3[o].clone() + a.clone() * z.get(k, g).clone();
                    }
                }
            }
        }
        let mut t2 = vec![T::zero(); l * q * r];
        for i in 0..l {
            for j in 0..m {
                for b in 0..q {
                    let yjb = y.get(j, b);
                    if yjb.is_zero() {
                        continue;
                    }
                    for g in 0..r {
                        let o = (i * q + b) * r + g;
                        t2[o] = t2[o].clone() + yjb.clone() * t3[(i * m + j) * r + g].clone();
                    }
                }
            }
        }
        let mut out = vec![T::zero(); p * q * r];
        for i in 0..l {
            for a in 0..p {
                let xia = x.get(i, a);
                if xia.is_zero() {
                    continue;
                }
                for bg in 0..q * r {
                    let o = a * q * r + bg;
                    out[o] = out[o].clone() + xia.clone() * t2[i * q * r + bg].clone();
                }
            }
        }
        Self::new([p, q, r], out)
    }

    /// `A(x, y, z) = Σ a_ijk x_i y_j z_k`.
    pub fn trilinear_form(&self, x: &[T], y: &[T], z: &[T]) -> Result<T> {
        self.check_lengths(Some(x.len()), Some(y.len()), Some(z.len()))?;
        let [l, m, n] = self.dims;
        let mut acc = T::zero();
        for i in 0..l {
            if x[i].is_zero() {
                continue;
            }
            let mut si = T::zero();
            for j in 0..m {
                if y[j].is_zero() {
                    continue;
                }
                let base = (i * m + j) * n;
                let sj = (0..n).fold(T::zero(), |a, k| {
                    a + self.entries[base + k].clone() * z[k].clone()
                });
                si = si + y[j].clone() * sj;
            }
            acc = acc + x[i].clone() * si;
        }
        Ok(acc)
    }

    fn check_lengths(&self, x: Option<usize>, y: Option<usize>, z: Option<usize>) -> Result<()> {
        for (mode, len) in [x, y, z].into_iter().enumerate() {
            if let Some(len) = len {
                if len != self.dims[mode] {
                    return Err(dims_err(format!(
                        "mode-{} vector has length {len}, tensor dimension is {}",
                        mode + 1,
                        self.dims[mode]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Contract with vectors in some slots and the identity in the rest,
    /// e.g. `A(x, y, I)`, `A(I, y, z)`, `A(x, I, I)`.
    pub fn contract(&self, slots: [Slot<'_, T>; 3]) -> Result<Contraction<T>> {
        let lens = slots.map(|s| match s {
            Slot::Vector(v) => Some(v.len()),
            Slot::Identity => None,
        });
        self.check_lengths(lens[0], lens[1], lens[2])?;
        let free: Vec<usize> = (0..3).filter(|&d| lens[d].is_none()).collect();
        let weight = |mode: usize, idx: usize| -> Option<T> {
            match slots[mode] {
                Slot::Vector(v) => Some(v[idx].clone()),
                Slot::Identity => None,
            }
        };
        let [l, m, n] = self.dims;
        let free_dims: Vec<usize> = free.iter().map(|&d| self.dims[d]).collect();
        let out_len: usize = free_dims.iter().product();
        let mut out = vec![T::zero(); out_len];
        for i in 0..l {
            for j in 0..m {
                for k in 0..n {
                    let a = &self.entries[(i * m + j) * n + k];
                    if a.is_zero() {
                        continue;
                    }
                    let idx = [i, j, k];
                    let mut w = a.clone();
                    for (mode, &id) in idx.iter().enumerate() {
                        if let Some(c) = weight(mode, id) {
                            w = w * c;
                        }
                    }
                    let pos = free
                        .iter()
                        .fold(0usize, |acc, &d| acc * self.dims[d] + idx[d]);
                    out[pos] = out[pos].clone() + w;
                }
            }
        }
        Ok(match free.len() {
            0 => Contraction::Scalar(out.pop().unwrap_or_else(T::zero)),
            1 => Contraction::Vector(out),
            2 => Contraction::Matrix(Matrix::new(free_dims[0], free_dims[1], out)?),
            _ => Contraction::Tensor(self.clone()),
        })
    }

    /// Contraction with exactly two vectors; returns the vector in the free slot.
    pub fn contract_to_vector(&self, slots: [Slot<'_, T>; 3]) -> Result<Vec<T>> {
        match self.contract(slots)? {
            Contraction::Vector(v) => Ok(v),
            _ => Err(Error::InvalidInput(
                "expected exactly one identity slot".into(),
            )),
        }
    }

    /// Frobenius inner product `⟨A, B⟩`.
    pub fn inner(&self, other: &Self) -> Result<T> {
        if self.dims != other.dims {
            return Err(dims_err("inner product of tensors with different shapes"));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    pub fn frobenius_norm_sq(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, a| acc + a.clone() * a.clone())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().to_f64().sqrt()
    }

    /// The delta tensor `δ_ijk` of size `n x n x n`.
    pub fn delta(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(dims_err("delta tensor needs n >= 1"));
        }
        Ok(Self::from_fn([n, n, n], |i, j, k| {
            if i == j && j == k {
                T::one()
            } else {
                T::zero()
            }
        }))
    }

    pub fn is_symmetric(&self) -> Result<bool> {
        let [l, m, n] = self.dims;
        if !self.is_cubical() {
            return Err(Error::NotCubical(l, m, n));
        }
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let a = self.get(i, j, k);
                    let perms = [(i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)];
                    if perms.iter().any(|&(p, q, r)| self.get(p, q, r) != a) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Average over the six index permutations.
    pub fn symmetrize(&self) -> Result<Self> {
        let [l, m, n] = self.dims;
        if !self.is_cubical() {
            return Err(Error::NotCubical(l, m, n));
        }
        let sixth = T::from_ratio(1, 6);
        Ok(Self::from_fn(self.dims, |i, j, k| {
            let s = self.get(i, j, k).clone()
                + self.get(i, k, j).clone()
                + self.get(j, i, k).clone()
                + self.get(j, k, i).clone()
                + self.get(k, i, j).clone()
                + self.get(k, j, i).clone();
            s * sixth.clone()
        }))
    }

    /// First-mode slice `A_i(j, k) = a_ijk` (an `m x n` matrix).
    pub fn slice_mode1(&self, i: usize) -> Matrix<T> {
        Matrix::from_fn(self.dims[1], self.dims[2], |j, k| self.get(i, j, k).clone())
    }

    /// Second-mode slice `B_j(i, k) = a_ijk` (an `l x n` matrix).
    pub fn slice_mode2(&self, j: usize) -> Matrix<T> {
        Matrix::from_fn(self.dims[0], self.dims[2], |i, k| self.get(i, j, k).clone())
    }

    /// Third-mode slice `C_k(i, j) = a_ijk` (an `l x m` matrix).
    pub fn slice_mode3(&self, k: usize) -> Matrix<T> {
        Matrix::from_fn(self.dims[0], self.dims[1], |i, j| self.get(i, j, k).clone())
    }

    /// Mode-`mode` unfolding (0-based): rows indexed by that mode, columns by
    /// the remaining two in their natural order.
    pub fn unfold(&self, mode: usize) -> Matrix<T> {
        let [l, m, n] = self.dims;
        match mode {
            0 => Matrix::from_fn(l, m * n, |i, c| self.get(i, c / n, c % n).clone()),
            1 => Matrix::from_fn(m, l * n, |j, c| self.get(c / n, j, c % n).clone()),
            _ => Matrix::from_fn(n, l * m, |k, c| self.get(c / m, c % m, k).clone()),
        }
    }
}

impl Tensor3<Rational> {
    /// Explicit conversion to the floating-point backend.
    pub fn to_f64(&self) -> Tensor3<f64> {
        Tensor3 {
            dims: self.dims,
            entries: self.entries.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn from_integers(dims: [usize; 3], entries: &[i64]) -> Result<Self> {
        Self::new(
            dims,
            entries
                .iter()
                .map(|&v| Rational::from_integer(v.into()))
                .collect(),
        )
    }
}
