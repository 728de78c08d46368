//! Minimal dense complex linear algebra for small Hilbert-space dimensions.
//!
//! Everything here is sized for d ≲ 64 and favors clarity and deterministic
//! behavior over speed. Matrices are stored row-major; indices are 0-based
//! in the Rust API, while anything user-facing (JSON, reports, error
//! messages) is rendered 1-based.

mod eigen;

pub use eigen::{herm_eigen, herm_eigenvalues, HermEigen};

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Dense d×d complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Build from a row-major slice of d² entries.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        Ok(Self {
            dim,
            data: entries.to_vec(),
        })
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn dagger(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let d = self.dim;
        let mut out = CMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&rhs.data) {
            *x += y;
        }
        out
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&rhs.data) {
            *x -= y;
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> CMatrix {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x *= factor;
        }
        out
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, rhs: &CMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Entrywise equality against an absolute tolerance.
    pub fn approx_eq(&self, rhs: &CMatrix, tol: f64) -> bool {
        self.dim == rhs.dim && self.max_abs_diff(rhs) <= tol
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn unitarity_deviation(&self) -> f64 {
        self.mul(&self.dagger()).max_abs_diff(&CMatrix::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// u·m·u† for unitary u; preserves trace and spectrum.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<CMatrix> {
        if u.dim != self.dim {
            return Err(Error::DimMismatch {
                left: u.dim,
                right: self.dim,
            });
        }
        let dev = u.unitarity_deviation();
        if dev > tol::UNITARY {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(u.mul(self).mul(&u.dagger()))
    }
}

/// u·m·u† with a unitarity check on u.
pub fn conjugate(m: &CMatrix, u: &CMatrix) -> Result<CMatrix> {
    m.conjugate_by(u)
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// A bijection of {1, …, d}, stored 0-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(dim: usize) -> Self {
        Self {
            map: (0..dim).collect(),
        }
    }

    /// Build from images f(1), …, f(d) given with 1-based values.
    pub fn from_one_based(map: &[usize]) -> Result<Self> {
        let dim = map.len();
        let mut seen = vec![false; dim];
        for &v in map {
            if v < 1 || v > dim || seen[v - 1] {
                return Err(Error::NotPermutation { dim });
            }
            seen[v - 1] = true;
        }
        Ok(Self {
            map: map.iter().map(|&v| v - 1).collect(),
        })
    }

    /// Build from 0-based images.
    pub fn from_zero_based(map: Vec<usize>) -> Result<Self> {
        let dim = map.len();
        let mut seen = vec![false; dim];
        for &v in &map {
            if v >= dim || seen[v] {
                return Err(Error::NotPermutation { dim });
            }
            seen[v] = true;
        }
        Ok(Self { map })
    }

    /// Swap of two indices (0-based), identity elsewhere.
    pub fn transposition(dim: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..dim).collect();
        map.swap(a, b);
        Self { map }
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    /// Image of a 0-based index.
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    /// Images as 1-based values, the wire/report form.
    pub fn one_based(&self) -> Vec<usize> {
        self.map.iter().map(|&v| v + 1).collect()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    /// self ∘ other: first apply `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.dim(), other.dim());
        Permutation {
            map: other.map.iter().map(|&v| self.map[v]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }
}

/// Unitary matrix of a permutation: entry (p(i), i) = 1.
pub fn perm_matrix(p: &Permutation) -> CMatrix {
    let mut m = CMatrix::zeros(p.dim());
    for i in 0..p.dim() {
        m[(p.apply(i), i)] = Complex64::ONE;
    }
    m
}

/// p·m·p† without an explicit dense product: entry (p(i), p(j)) = m(i, j).
pub fn permute_conjugate(m: &CMatrix, p: &Permutation) -> CMatrix {
    assert_eq!(m.dim(), p.dim());
    let d = m.dim();
    let mut out = CMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            out[(p.apply(i), p.apply(j))] = m[(i, j)];
        }
    }
    out
}
