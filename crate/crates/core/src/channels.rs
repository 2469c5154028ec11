//! Propagation between events: unitary steps `exp(-iHd)`, pointer-basis
//! dephasing and the vesicle-release branch mixture. `ħ = 1` throughout.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::opalg::{ComplexMatrix, WeightOperator, VALIDITY_TOL};

/// Beyond this exponent the coherence multiplier is taken to be exactly zero.
pub const FULL_DECOHERENCE_EXPONENT: f64 = 700.0;

/// Largest terminal count accepted by [`BranchConfig`].
pub const MAX_TERMINALS: u32 = 20;

/// Largest dimension a branch mixture may be expanded to as a dense operator.
pub const MAX_DENSE_DIM: usize = 1 << 10;

/// Hermitian generator `H` of the unitary steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    matrix: ComplexMatrix,
}

impl Hamiltonian {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > VALIDITY_TOL {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Hamiltonian { matrix })
    }

    /// Two-level Rabi drive `(ω/2) σ_x`.
    pub fn rabi(omega: f64) -> Self {
        Hamiltonian {
            matrix: ComplexMatrix::pauli_x().scale(omega / 2.0),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Hamiltonian {
            matrix: ComplexMatrix::zeros(dim),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `λ_max - λ_min`; for `(ω/2)σ_x` this is `ω`.
    pub fn spectral_width(&self) -> f64 {
        let ev = self.matrix.hermitian_eigenvalues();
        ev[ev.len() - 1] - ev[0]
    }

    pub fn propagator(&self, d: f64) -> Result<Propagator> {
        Propagator::new(self, d)
    }
}

/// `U = exp(-iHd)` built from the eigendecomposition of `H`.
#[derive(Clone, Debug)]
pub struct Propagator {
    u: ComplexMatrix,
    u_adj: ComplexMatrix,
}

impl Propagator {
    pub fn new(h: &Hamiltonian, d: f64) -> Result<Self> {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::invalid("duration", format!("{d} must be finite and >= 0")));
        }
        let (values, vectors) = h.matrix.hermitian_eigen();
        let n = h.dim();
        let phases: Vec<Complex64> = values.iter().map(|&l| Complex64::from_polar(1.0, -l * d)).collect();
        let v = vectors.as_dmatrix();
        let scaled = DMatrix::from_fn(n, n, |i, k| v[(i, k)] * phases[k]);
        let u = ComplexMatrix::from_dmatrix(scaled * v.adjoint())?;
        let u_adj = u.adjoint();
        Ok(Propagator { u, u_adj })
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// `U S U†`.
    pub fn apply(&self, s: &WeightOperator) -> Result<WeightOperator> {
        s.check_dim(self.dim(), "unitary evolution")?;
        let out = &(&self.u * s.matrix()) * &self.u_adj;
        Ok(WeightOperator::from_trusted(out))
    }
}

/// `U S U†` with `U = exp(-iHd)`.
pub fn evolve_unitary(s: &WeightOperator, h: &Hamiltonian, d: f64) -> Result<WeightOperator> {
    s.check_dim(h.dim(), "unitary evolution")?;
    h.propagator(d)?.apply(s)
}

/// Exponential decay of coherences in a pointer basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DephasingChannel {
    pointer_basis: ComplexMatrix,
    rate: f64,
}

impl DephasingChannel {
    /// `pointer_basis` columns are the decohered basis vectors.
    pub fn new(pointer_basis: ComplexMatrix, rate: f64) -> Result<Self> {
        if rate.is_nan() || rate < 0.0 {
            return Err(Error::invalid("rate", format!("{rate} must be >= 0")));
        }
        let defect = pointer_basis.unitarity_defect();
        if defect > VALIDITY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(DephasingChannel { pointer_basis, rate })
    }

    /// Dephasing in the computational basis.
    pub fn computational(dim: usize, rate: f64) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim), rate)
    }

    pub fn pointer_basis(&self) -> &ComplexMatrix {
        &self.pointer_basis
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn dim(&self) -> usize {
        self.pointer_basis.dim()
    }

    /// Multiplier applied to every off-diagonal pointer-basis entry over `d`.
    pub fn coherence_factor(&self, d: f64) -> f64 {
        let x = self.rate * d;
        if x > FULL_DECOHERENCE_EXPONENT {
            0.0
        } else {
            (-x).exp()
        }
    }

    fn is_computational(&self) -> bool {
        self.pointer_basis == ComplexMatrix::identity(self.dim())
    }
}

/// Damps pointer-basis coherences by `exp(-rate·d)`, leaving populations alone.
pub fn apply_dephasing(s: &WeightOperator, ch: &DephasingChannel, d: f64) -> Result<WeightOperator> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::invalid("duration", format!("{d} must be finite and >= 0")));
    }
    s.check_dim(ch.dim(), "dephasing")?;
    let factor = ch.coherence_factor(d);
    if factor == 1.0 {
        return Ok(s.clone());
    }
    let damp = |m: &DMatrix<Complex64>| {
        DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
            if i == j {
                m[(i, j)]
            } else {
                m[(i, j)] * factor
            }
        })
    };
    let out = if ch.is_computational() {
        damp(s.matrix().as_dmatrix())
    } else {
        let u = ch.pointer_basis.as_dmatrix();
        let in_pointer = u.adjoint() * s.matrix().as_dmatrix() * u;
        u * damp(&in_pointer) * u.adjoint()
    };
    Ok(WeightOperator::from_trusted(ComplexMatrix::from_dmatrix(out)?))
}

/// Independent release/no-release bifurcations at `terminal_count` terminals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchConfig {
    terminal_count: u32,
    release_probability: f64,
}

impl BranchConfig {
    pub fn new(terminal_count: u32, release_probability: f64) -> Result<Self> {
        if terminal_count == 0 {
            return Err(Error::invalid("terminal_count", "must be at least 1"));
        }
        if terminal_count > MAX_TERMINALS {
            return Err(Error::Capacity(format!(
                "{terminal_count} terminals exceeds the 2^{MAX_TERMINALS} branch cap"
            )));
        }
        if !(0.0..=1.0).contains(&release_probability) {
            return Err(Error::invalid(
                "release_probability",
                format!("{release_probability} is outside [0, 1]"),
            ));
        }
        Ok(BranchConfig {
            terminal_count,
            release_probability,
        })
    }

    pub fn terminal_count(&self) -> u32 {
        self.terminal_count
    }

    pub fn release_probability(&self) -> f64 {
        self.release_probability
    }
}

/// Diagonal mixture over release patterns. Pattern index bit `t` is set when
/// terminal `t` releases, so for one terminal index 0 is "no release".
#[derive(Clone, Debug, PartialEq)]
pub struct BranchMixture {
    config: BranchConfig,
    weights: Vec<f64>,
}

impl BranchMixture {
    pub fn config(&self) -> &BranchConfig {
        &self.config
    }

    /// Diagonal weights indexed by release pattern.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn trace(&self) -> f64 {
        // Neumaier summation: 2^20 terms of very different magnitude.
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for &w in &self.weights {
            let t = sum + w;
            comp += if sum.abs() >= w.abs() {
                (sum - t) + w
            } else {
                (w - t) + sum
            };
            sum = t;
        }
        sum + comp
    }

    pub fn nonzero_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w != 0.0).count()
    }

    /// Dense diagonal weight operator; only for `dim <= MAX_DENSE_DIM`.
    pub fn to_weight_operator(&self) -> Result<WeightOperator> {
        if self.dim() > MAX_DENSE_DIM {
            return Err(Error::Capacity(format!(
                "dense expansion of a {}-dimensional mixture exceeds {MAX_DENSE_DIM}",
                self.dim()
            )));
        }
        Ok(WeightOperator::from_trusted(ComplexMatrix::from_diagonal(
            &self.weights,
        )))
    }
}

/// Weight of a pattern with `k` releases is `p^k (1-p)^(n-k)`.
pub fn release_branch_mixture(cfg: &BranchConfig) -> BranchMixture {
    let n = cfg.terminal_count;
    let p = cfg.release_probability;
    let by_releases: Vec<f64> = (0..=n)
        .map(|k| p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
        .collect();
    let weights = (0..1usize << n)
        .map(|pattern| by_releases[pattern.count_ones() as usize])
        .collect();
    BranchMixture { config: *cfg, weights }
}
