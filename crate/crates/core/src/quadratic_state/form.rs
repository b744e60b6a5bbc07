use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Symmetric matrix of a Gaussian exponent `exp(-½ xᵀ M x)`, stored row-major.
///
/// Dimension 6 for the mode function, 12 for the traced forms; the
/// reduced cross-check model uses 4 and 8.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    dim: usize,
    data: Vec<f64>,
}

impl QuadraticForm {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Panics if `rows` is not square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix must be square");
            data.extend_from_slice(row);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Adds `weight · c cᵀ`.
    pub fn add_rank_one(&mut self, weight: f64, c: &[f64]) {
        assert_eq!(c.len(), self.dim);
        for i in 0..self.dim {
            if c[i] == 0.0 {
                continue;
            }
            for j in 0..self.dim {
                self.data[i * self.dim + j] += weight * c[i] * c[j];
            }
        }
    }

    pub fn add(&mut self, other: &QuadraticForm) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// `xᵀ M x`.
    pub fn quadratic(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        let mut acc = 0.0;
        for i in 0..self.dim {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            let s: f64 = row.iter().zip(x).map(|(m, v)| m * v).sum();
            acc += x[i] * s;
        }
        acc
    }

    /// Principal submatrix on `indices`, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        let mut out = Self::zeros(indices.len());
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    /// `P M Pᵀ` where `perm[i]` is the source index of new coordinate `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim);
        self.submatrix(perm)
    }

    /// Largest |M_ij − M_ji| relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst / scale
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for QuadraticForm {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QuadraticForm {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Determinant of a symmetric matrix with factorization diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinant {
    /// ln det M; NaN when the factorization hit a non-positive pivot.
    pub log_det: f64,
    pub positive_definite: bool,
    /// Smallest and largest LDLᵀ pivot of the equilibrated matrix
    /// `D^-½ M D^-½`, `D = diag(M)`.
    pub min_pivot: f64,
    pub max_pivot: f64,
}

impl Determinant {
    pub fn det(&self) -> f64 {
        self.log_det.exp()
    }

    pub fn pivot_ratio(&self) -> f64 {
        self.max_pivot / self.min_pivot
    }
}

/// Determinant through an LDLᵀ factorization of the diagonally
/// equilibrated matrix, accumulated in log space.
pub fn det_pd(m: &QuadraticForm) -> Result<Determinant> {
    let n = m.dim();
    let asym = m.asymmetry();
    if !(asym <= SYMMETRY_TOLERANCE) {
        return Err(Error::Validation(format!(
            "matrix is not symmetric (relative asymmetry {asym:.3e})"
        )));
    }
    let not_pd = |min_pivot: f64, max_pivot: f64| Determinant {
        log_det: f64::NAN,
        positive_definite: false,
        min_pivot,
        max_pivot,
    };

    let mut scale = vec![0.0; n];
    let mut log_diag = 0.0;
    for i in 0..n {
        let d = m[(i, i)];
        if !(d > 0.0) {
            return Ok(not_pd(d, d));
        }
        scale[i] = 1.0 / d.sqrt();
        log_diag += d.ln();
    }

    // a = D^-½ M D^-½, overwritten in place by the unit-lower factor L and pivots.
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = m[(i, j)] * scale[i] * scale[j];
        }
    }
    let mut pivots = vec![0.0; n];
    let mut log_det = log_diag;
    let (mut min_pivot, mut max_pivot) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k] * pivots[k];
        }
        min_pivot = min_pivot.min(d);
        max_pivot = max_pivot.max(d);
        if !(d > 0.0) {
            return Ok(not_pd(min_pivot, max_pivot));
        }
        pivots[j] = d;
        log_det += d.ln();
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k] * pivots[k];
            }
            a[i * n + j] = s / d;
        }
    }
    Ok(Determinant {
        log_det,
        positive_definite: true,
        min_pivot,
        max_pivot,
    })
}

/// Lower Cholesky factor `L` with `M = L Lᵀ`, row-major. `None` if `M` is
/// not positive definite.
pub fn cholesky(m: &QuadraticForm) -> Option<Vec<f64>> {
    let n = m.dim();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}
