//! Dense complex matrices, Kronecker products, Hermitian eigensolves, and
//! partial traces over labelled subsystem layouts.
//!
//! Everything here is desk scale (dimensions at most a few dozen), so the
//! storage is a plain row-major `Vec<Complex64>` and the eigensolver is a
//! cyclic Jacobi iteration: simple, and accurate to near machine precision
//! for Hermitian input.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance within which eigensolver inputs must be Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Tolerance within which embedded operators must be unitary.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::ZERO
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference `max |self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Deviation from Hermitian symmetry, `max |M - M^dag|`.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Deviation from unitarity, `max |U^dag U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let product = &self.adjoint() * self;
        product.max_abs_diff(&Self::identity(self.rows))
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.rows, rhs.rows);
        assert_eq!(self.cols, rhs.cols);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.rows, rhs.rows);
        assert_eq!(self.cols, rhs.cols);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + aik * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

/// Ordered list of labelled subsystems making up a composite system.
///
/// The leftmost label is the most significant digit of the composite basis
/// index, matching left-to-right ket notation: for qubits `1,2` the basis
/// state `|10>` has index 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl SubsystemLayout {
    pub fn new(dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if dims.len() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} dims but {} labels",
                dims.len(),
                labels.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::DimensionMismatch(format!(
                "subsystem dimension {d} < 2"
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { dims, labels })
    }

    /// Layout of n qubits labelled `"1".."n"`.
    pub fn qubits(n: usize) -> Self {
        Self::new(vec![2; n], (1..=n).map(|k| k.to_string()).collect()).unwrap()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Positions of the given labels, in the order given.
    pub fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.position(l.as_ref())).collect()
    }

    /// Decompose a composite basis index into per-subsystem digits.
    pub fn unravel(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.len()];
        for pos in (0..self.len()).rev() {
            digits[pos] = index % self.dims[pos];
            index /= self.dims[pos];
        }
        digits
    }

    /// Recombine per-subsystem digits into a composite basis index.
    pub fn ravel(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.len());
        let mut index = 0;
        for (pos, &d) in digits.iter().enumerate() {
            debug_assert!(d < self.dims[pos]);
            index = index * self.dims[pos] + d;
        }
        index
    }

    /// Sub-layout of the given labels, kept in this layout's order.
    pub fn sub_layout<S: AsRef<str>>(&self, keep: &[S]) -> Result<SubsystemLayout> {
        let mut positions = self.positions(keep)?;
        positions.sort_unstable();
        positions.dedup();
        Ok(SubsystemLayout {
            dims: positions.iter().map(|&p| self.dims[p]).collect(),
            labels: positions.iter().map(|&p| self.labels[p].clone()).collect(),
        })
    }

    /// Labels not listed in `exclude`, in layout order.
    pub fn complement<S: AsRef<str>>(&self, exclude: &[S]) -> Vec<String> {
        let excluded: Vec<&str> = exclude.iter().map(|s| s.as_ref()).collect();
        self.labels
            .iter()
            .filter(|l| !excluded.contains(&l.as_str()))
            .cloned()
            .collect()
    }
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let f = a.get(ia, ja);
            if f == Complex64::ZERO {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out.set(ia * b.rows() + ib, ja * b.cols() + jb, f * b.get(ib, jb));
                }
            }
        }
    }
    out
}

/// Kronecker product of a complex vector pair.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

const MAX_JACOBI_SWEEPS: usize = 60;

/// Eigenvalues and eigenvectors of a Hermitian matrix via cyclic Jacobi.
///
/// Returns `(values, vectors)` with eigenvalues ascending and the k-th
/// column of `vectors` the eigenvector of the k-th eigenvalue, so that
/// `m = vectors * diag(values) * vectors^dag`.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let deviation = m.hermiticity_error();
    if deviation > HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: HERMITICITY_TOL,
        });
    }

    let n = m.rows();
    // Kill the sub-tolerance asymmetry so the iteration sees exact input.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| {
        (m.get(i, j) + m.get(j, i).conj()) * Complex64::new(0.5, 0.0)
    });
    let mut v = ComplexMatrix::identity(n);

    let scale = a.max_abs().max(1.0);
    let target = (1e-15 * scale).powi(2) * (n * n) as f64;

    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off_sq = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off_sq += a.get(i, j).norm_sqr();
            }
        }
        if off_sq <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                // Rotation angle zeroing a[p][q]; |t| <= 1 keeps it stable.
                let theta = (app - aqq) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let phase = apq / r;

                // Column update: A <- A J, with J the plane rotation
                // J[p][p]=c, J[p][q]=-s*phase, J[q][p]=s*conj(phase), J[q][q]=c.
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c + akq * s * phase.conj());
                    a.set(k, q, akq * c - akp * s * phase);
                }
                // Row update: A <- J^dag A.
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c + aqk * s * phase);
                    a.set(q, k, aqk * c - apk * s * phase.conj());
                }
                // Accumulate eigenvectors: V <- V J.
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c + vkq * s * phase.conj());
                    v.set(k, q, vkq * c - vkp * s * phase);
                }
                // The target entry is now zero up to rounding; pin it.
                a.set(p, q, Complex64::ZERO);
                a.set(q, p, Complex64::ZERO);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok((values, vectors))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|(values, _)| values)
}

/// Partial trace onto the subsystems named in `keep` (original layout order).
///
/// `m` must be square on the layout's total dimension. Trace, Hermiticity,
/// and positivity are all preserved.
pub fn partial_trace<S: AsRef<str>>(
    m: &ComplexMatrix,
    layout: &SubsystemLayout,
    keep: &[S],
) -> Result<ComplexMatrix> {
    if keep.is_empty() {
        return Err(Error::DimensionMismatch(
            "partial trace must keep at least one subsystem".into(),
        ));
    }
    if !m.is_square() || m.rows() != layout.total_dim() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but layout has total dimension {}",
            m.rows(),
            m.cols(),
            layout.total_dim()
        )));
    }
    let mut kept_pos = layout.positions(keep)?;
    kept_pos.sort_unstable();
    kept_pos.dedup();
    let traced_pos: Vec<usize> = (0..layout.len())
        .filter(|p| !kept_pos.contains(p))
        .collect();

    let kept_dim: usize = kept_pos.iter().map(|&p| layout.dims()[p]).product();
    let traced_dim: usize = traced_pos.iter().map(|&p| layout.dims()[p]).product();

    // Digits of a reduced index, spread back into full-layout digit slots.
    let expand = |digits_of: &[usize], reduced: usize, slots: &mut [usize]| {
        let mut rem = reduced;
        for &pos in digits_of.iter().rev() {
            slots[pos] = rem % layout.dims()[pos];
            rem /= layout.dims()[pos];
        }
    };

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    let mut row_digits = vec![0usize; layout.len()];
    let mut col_digits = vec![0usize; layout.len()];
    for i in 0..kept_dim {
        for j in 0..kept_dim {
            expand(&kept_pos, i, &mut row_digits);
            expand(&kept_pos, j, &mut col_digits);
            let mut sum = Complex64::ZERO;
            for t in 0..traced_dim {
                expand(&traced_pos, t, &mut row_digits);
                expand(&traced_pos, t, &mut col_digits);
                sum += m.get(layout.ravel(&row_digits), layout.ravel(&col_digits));
            }
            out.set(i, j, sum);
        }
    }
    Ok(out)
}

/// Embed a unitary acting on the subsystems `acts_on` into the full layout.
///
/// `acts_on` is an ordered subset: the first factor of `u`'s index refers to
/// `acts_on[0]`, and so on, even when the subset is non-contiguous or out of
/// layout order. All other subsystems get the identity.
pub fn embed_unitary<S: AsRef<str>>(
    u: &ComplexMatrix,
    layout: &SubsystemLayout,
    acts_on: &[S],
) -> Result<ComplexMatrix> {
    let positions = layout.positions(acts_on)?;
    for (i, p) in positions.iter().enumerate() {
        if positions[..i].contains(p) {
            return Err(Error::DuplicateLabel(acts_on[i].as_ref().to_string()));
        }
    }
    let acts_dim: usize = positions.iter().map(|&p| layout.dims()[p]).product();
    if u.rows() != acts_dim || u.cols() != acts_dim {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{} but acts_on has product dimension {acts_dim}",
            u.rows(),
            u.cols()
        )));
    }
    let deviation = u.unitarity_error();
    if deviation > UNITARITY_TOL {
        return Err(Error::NotUnitary {
            deviation,
            tolerance: UNITARITY_TOL,
        });
    }

    let total = layout.total_dim();
    // Sub-index of the acted-on subsystems, in acts_on order.
    let acted_index = |digits: &[usize]| -> usize {
        let mut idx = 0;
        for &p in &positions {
            idx = idx * layout.dims()[p] + digits[p];
        }
        idx
    };

    let mut out = ComplexMatrix::zeros(total, total);
    for row in 0..total {
        let row_digits = layout.unravel(row);
        for col in 0..total {
            let col_digits = layout.unravel(col);
            let spectator_match = (0..layout.len())
                .filter(|p| !positions.contains(p))
                .all(|p| row_digits[p] == col_digits[p]);
            if !spectator_match {
                continue;
            }
            out.set(
                row,
                col,
                u.get(acted_index(&row_digits), acted_index(&col_digits)),
            );
        }
    }
    Ok(out)
}
