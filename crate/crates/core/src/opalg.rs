//! Dense complex operator algebra.
//!
//! Everything here is a small immutable value. Validity checks report the
//! measured defect and never repair the operator.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngExt};

use crate::error::{Error, Result};

/// Tolerance for Hermiticity, idempotence, unitarity and positivity checks.
pub const VALIDITY_TOL: f64 = 1e-10;
/// Tolerance for conserved quantities such as the trace.
pub const CONSERVATION_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix, `dim >= 1`.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::MalformedMatrix("dimension must be at least 1".into()));
        }
        if m.nrows() != m.ncols() {
            return Err(Error::MalformedMatrix(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::MalformedMatrix("non-finite entry".into()));
        }
        Ok(ComplexMatrix(m))
    }

    /// Builds a `dim x dim` matrix from `dim²` entries in row-major order.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::MalformedMatrix(format!(
                "{} entries cannot form a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Real matrix given as rows.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::MalformedMatrix("rows of unequal length".into()));
            }
            entries.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::from_row_major(dim, &entries)
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        ComplexMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        ComplexMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        assert!(!diag.is_empty(), "dimension must be at least 1");
        let mut m = DMatrix::zeros(diag.len(), diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        ComplexMatrix(m)
    }

    /// `|i><j|` in dimension `dim`.
    pub fn ket_bra(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.0[(i, j)] = ONE;
        m
    }

    /// Outer product `|v><v|`.
    pub fn outer(v: &[Complex64]) -> Result<Self> {
        let n = v.len();
        Self::from_dmatrix(DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()))
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]).expect("static matrix")
    }

    pub fn pauli_z() -> Self {
        Self::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]]).expect("static matrix")
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, c: f64) -> Self {
        ComplexMatrix(self.0.map(|z| z * c))
    }

    pub fn scale_complex(&self, c: Complex64) -> Self {
        ComplexMatrix(self.0.map(|z| z * c))
    }

    /// `I - self`.
    pub fn complement(&self) -> Self {
        ComplexMatrix(DMatrix::identity(self.dim(), self.dim()) - &self.0)
    }

    /// Max-norm of `self - other`; `f64::INFINITY` when the dimensions differ.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |M - M†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                defect = defect.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        defect
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `max |U†U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = ComplexMatrix(self.0.adjoint() * &self.0);
        gram.max_abs_diff(&ComplexMatrix::identity(self.dim()))
    }

    /// `max |M² - M|`.
    pub fn idempotence_defect(&self) -> f64 {
        let sq = ComplexMatrix(&self.0 * &self.0);
        sq.max_abs_diff(self)
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        ComplexMatrix((&self.0 + self.0.adjoint()).map(|z| z * 0.5))
    }

    /// Eigenvalues (ascending) and eigenvectors (columns) of the Hermitian
    /// part of the matrix.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, ComplexMatrix) {
        let eig = self.hermitian_part().0.symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |i, c| eig.eigenvectors[(i, order[c])]);
        (values, ComplexMatrix(vectors))
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self
            .hermitian_part()
            .0
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> Complex64 {
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.0[(i, j)] * other.0[(j, i)];
            }
        }
        acc
    }

    /// `self · m · self†`.
    pub fn sandwich(&self, m: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &m.0 * self.0.adjoint())
    }

    fn check_same_dim(&self, other: &ComplexMatrix, context: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Unnormalized positive Hermitian operator `S`. `S / Tr S` is the density
/// matrix; the trace carries the statistical weight of the branch.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightOperator(ComplexMatrix);

impl WeightOperator {
    /// Validates Hermiticity, positivity and a positive trace.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let report = validate_weight_operator(&m);
        if !report.hermitian {
            return Err(Error::NotHermitian {
                defect: report.hermiticity_defect,
            });
        }
        if !report.positive {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {:.3e} is negative",
                report.min_eigenvalue
            )));
        }
        if !report.trace_positive {
            return Err(Error::InvalidState(format!(
                "trace {} must be real and positive",
                report.trace
            )));
        }
        Ok(WeightOperator(m))
    }

    /// Wraps a matrix produced by a validity-preserving map.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        WeightOperator(m)
    }

    /// Pure state `|v><v|`.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(v)?)
    }

    /// Computational basis state `|i><i|`.
    pub fn basis_state(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::invalid("index", format!("{i} out of range for dim {dim}")));
        }
        Ok(WeightOperator(ComplexMatrix::ket_bra(dim, i, i)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        WeightOperator(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Real part of the trace (the imaginary part vanishes for valid states).
    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `S / Tr S`.
    pub fn normalized(&self) -> WeightOperator {
        WeightOperator(self.0.scale(1.0 / self.trace()))
    }

    /// `c · S` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<WeightOperator> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid("scale", format!("{c} must be positive and finite")));
        }
        Ok(WeightOperator(self.0.scale(c)))
    }

    /// Weighted sum `Σ wᵢ Sᵢ` with `wᵢ >= 0`.
    pub fn mixture(parts: &[(f64, &WeightOperator)]) -> Result<WeightOperator> {
        let first = parts
            .first()
            .ok_or_else(|| Error::invalid("mixture", "at least one component required"))?;
        let mut acc = ComplexMatrix::zeros(first.1.dim());
        for (w, s) in parts {
            if !(*w >= 0.0 && w.is_finite()) {
                return Err(Error::invalid("mixture", format!("weight {w} must be non-negative")));
            }
            acc.check_same_dim(s.matrix(), "mixture")?;
            acc = &acc + &s.matrix().scale(*w);
        }
        WeightOperator::new(acc)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.0.hermitian_eigenvalues()
    }

    pub(crate) fn check_dim(&self, dim: usize, context: &'static str) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                context,
                expected: dim,
                actual: self.dim(),
            });
        }
        Ok(())
    }
}

/// Hermitian idempotent `P(E)` labelled by its experience.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    matrix: ComplexMatrix,
    label: String,
}

impl Projector {
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > VALIDITY_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let defect = matrix.idempotence_defect();
        if defect > VALIDITY_TOL {
            return Err(Error::NotIdempotent { defect });
        }
        Ok(Projector {
            matrix,
            label: label.into(),
        })
    }

    /// Projector onto the span of the given computational basis vectors.
    pub fn onto_basis(dim: usize, indices: &[usize], label: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::MalformedMatrix("dimension must be at least 1".into()));
        }
        let mut m = ComplexMatrix::zeros(dim);
        for &i in indices {
            if i >= dim {
                return Err(Error::invalid("indices", format!("{i} out of range for dim {dim}")));
            }
            m.0[(i, i)] = ONE;
        }
        Self::new(m, label)
    }

    /// Projector onto the span of orthonormal vectors.
    pub fn onto_vectors(vectors: &[Vec<Complex64>], label: impl Into<String>) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::invalid("vectors", "at least one vector required"))?;
        let mut m = ComplexMatrix::zeros(first.len().max(1));
        for v in vectors {
            m = &m + &ComplexMatrix::outer(v)?;
        }
        Self::new(m, label)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn rank(&self) -> usize {
        self.matrix.trace().re.round() as usize
    }

    /// `1 - P`, the No-answer projector.
    pub fn complement(&self) -> Projector {
        Projector {
            matrix: self.matrix.complement(),
            label: format!("not {}", self.label),
        }
    }

    /// Trivial extension `P ⊗ 1` of a projector on the kept factors of
    /// `space` to the full space.
    pub fn extend_to(&self, space: &FactorSpace) -> Result<Projector> {
        if self.dim() != space.kept_dim() {
            return Err(Error::DimensionMismatch {
                context: "projector extension",
                expected: space.kept_dim(),
                actual: self.dim(),
            });
        }
        let full = space.full_dim();
        let split: Vec<(usize, usize)> = (0..full).map(|i| space.split_index(i)).collect();
        let m = DMatrix::from_fn(full, full, |i, j| {
            let (ki, ri) = split[i];
            let (kj, rj) = split[j];
            if ri == rj {
                self.matrix.0[(ki, kj)]
            } else {
                ZERO
            }
        });
        Projector::new(ComplexMatrix(m), self.label.clone())
    }
}

/// Ordered tensor factors of the full space and the factors kept as the
/// subsystem `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSpace {
    factor_dims: Vec<usize>,
    kept: Vec<usize>,
}

impl FactorSpace {
    pub fn new(factor_dims: Vec<usize>, mut kept: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() || factor_dims.contains(&0) {
            return Err(Error::invalid("factor_dims", "factors must be non-empty and positive"));
        }
        kept.sort_unstable();
        kept.dedup();
        if kept.is_empty() {
            return Err(Error::invalid("kept_indices", "at least one kept factor required"));
        }
        if let Some(&k) = kept.iter().find(|&&k| k >= factor_dims.len()) {
            return Err(Error::invalid(
                "kept_indices",
                format!("factor {k} out of range for {} factors", factor_dims.len()),
            ));
        }
        Ok(FactorSpace { factor_dims, kept })
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn kept_indices(&self) -> &[usize] {
        &self.kept
    }

    pub fn full_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    pub fn kept_dim(&self) -> usize {
        self.kept.iter().map(|&k| self.factor_dims[k]).product()
    }

    /// Splits a full-space index into (kept index, traced index), both in
    /// row-major order over their respective factors.
    fn split_index(&self, mut index: usize) -> (usize, usize) {
        let mut digits = vec![0; self.factor_dims.len()];
        for (pos, &d) in self.factor_dims.iter().enumerate().rev() {
            digits[pos] = index % d;
            index /= d;
        }
        let (mut kept, mut rest) = (0, 0);
        for (pos, &d) in self.factor_dims.iter().enumerate() {
            if self.kept.binary_search(&pos).is_ok() {
                kept = kept * d + digits[pos];
            } else {
                rest = rest * d + digits[pos];
            }
        }
        (kept, rest)
    }
}

/// Kronecker product `a ⊗ b`, with `a` as the leading factor.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Reduced operator `S_b = Tr_{-b} S` on the kept factors.
pub fn partial_trace(s: &WeightOperator, space: &FactorSpace) -> Result<WeightOperator> {
    if s.dim() != space.full_dim() {
        return Err(Error::DimensionMismatch {
            context: "partial trace (factor_dims inconsistent with operator dim)",
            expected: space.full_dim(),
            actual: s.dim(),
        });
    }
    let full = space.full_dim();
    let kept_dim = space.kept_dim();
    let split: Vec<(usize, usize)> = (0..full).map(|i| space.split_index(i)).collect();
    let mut reduced = DMatrix::<Complex64>::zeros(kept_dim, kept_dim);
    for (i, &(ki, ri)) in split.iter().enumerate() {
        for (j, &(kj, rj)) in split.iter().enumerate() {
            if ri == rj {
                reduced[(ki, kj)] += s.matrix().0[(i, j)];
            }
        }
    }
    Ok(WeightOperator(ComplexMatrix(reduced)))
}

/// `Tr(S A) / Tr(S)`.
pub fn expectation_value(s: &WeightOperator, a: &ComplexMatrix) -> Result<Complex64> {
    s.check_dim(a.dim(), "expectation value")?;
    Ok(s.matrix().trace_product(a) / s.trace())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub trace: Complex64,
    pub hermitian: bool,
    pub positive: bool,
    pub trace_positive: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.hermitian && self.positive && self.trace_positive
    }
}

/// Measures a candidate weight operator against the validity invariants.
pub fn validate_weight_operator(m: &ComplexMatrix) -> ValidationReport {
    let hermiticity_defect = m.hermiticity_defect();
    let min_eigenvalue = m.hermitian_eigenvalues()[0];
    let trace = m.trace();
    ValidationReport {
        hermiticity_defect,
        min_eigenvalue,
        trace,
        hermitian: hermiticity_defect <= VALIDITY_TOL,
        positive: min_eigenvalue >= -VALIDITY_TOL,
        trace_positive: trace.re > 0.0 && trace.im.abs() <= VALIDITY_TOL,
    }
}

fn uniform_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random Hermitian matrix with entries uniform in the unit square.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let z = uniform_complex(rng);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    ComplexMatrix(m)
}

/// Random full-rank state `G G† / Tr(G G†)`.
pub fn random_weight_operator<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> WeightOperator {
    let g = DMatrix::from_fn(dim, dim, |_, _| uniform_complex(rng));
    let m = ComplexMatrix(&g * g.adjoint());
    let tr = m.trace().re;
    WeightOperator(m.scale(1.0 / tr))
}

/// Random unitary from the eigenvectors of a random Hermitian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    random_hermitian(rng, dim).hermitian_eigen().1
}
