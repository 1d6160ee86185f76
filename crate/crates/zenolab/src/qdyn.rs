//! Finite-dimensional complex linear algebra for survival dynamics.
//!
//! Everything here works on dense complex matrices in energy units
//! (inverse time, `hbar = 1`). The central objects are the propagator
//! `exp(-iHt)`, the survival amplitude `A(t) = <psi0| exp(-iHt) |psi0>`
//! and its probability `p(t) = |A(t)|^2`, and the Hamiltonian moments
//! that control the short-time expansion
//!
//! ```text
//! A(dt) = 1 - i<H> dt - <H^2> dt^2 / 2
//! p(dt) = 1 - dt^2 / tau_z^2 + O(dt^4),   tau_z^{-2} = <H^2> - <H>^2
//! ```
//!
//! The quadratic law holds for Hermitian `H`; `tau_z` is the Zeno time.
//! All operations are pure functions and all values are immutable.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Validation and convergence tolerances. These are the module defaults;
/// constructors with a `_with_tol` suffix accept overrides.
pub mod tol {
    /// Relative Hermiticity defect allowed by [`super::OperatorMatrix::hermitian`].
    pub const HERMITICITY_REL: f64 = 1e-12;
    /// Allowed deviation of `norm^2` from 1 for freshly constructed initial states.
    pub const UNIT_NORM: f64 = 1e-12;
    /// Relative term size at which the scaled Taylor series is declared converged.
    pub const EXP_SERIES_TERM: f64 = 1e-16;
    /// Overall residual target of the scaling-and-squaring exponential.
    pub const EXP_SERIES_RESIDUAL: f64 = 1e-13;
    /// Relative size below which a variance counts as vanishing (eigenstate input).
    pub const VARIANCE_VANISH_REL: f64 = 1e-12;
}

const EXP_SERIES_MAX_TERMS: usize = 64;

fn require_finite_c(value: C64, what: &str) -> Result<()> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} has a non-finite entry")))
    }
}

/// A complex amplitude vector. Unit norm is required only where an operation
/// takes an *initial* state; evolved states may leave the unit sphere under
/// non-Hermitian generators.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    components: DVector<C64>,
}

impl StateVector {
    /// General (possibly sub-unit-norm) state. Rejects empty and non-finite input.
    pub fn new(components: Vec<C64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput("state vector must have dim >= 1".into()));
        }
        for &c in &components {
            require_finite_c(c, "state vector")?;
        }
        Ok(Self { components: DVector::from_vec(components) })
    }

    /// Initial state: additionally requires `|norm^2 - 1| <= tol::UNIT_NORM`.
    pub fn initial(components: Vec<C64>) -> Result<Self> {
        Self::initial_with_tol(components, tol::UNIT_NORM)
    }

    pub fn initial_with_tol(components: Vec<C64>, norm_tol: f64) -> Result<Self> {
        let state = Self::new(components)?;
        let n2 = state.norm_sqr();
        if (n2 - 1.0).abs() > norm_tol {
            return Err(Error::InvalidInput(format!(
                "initial state must be unit-norm: norm^2 = {n2}"
            )));
        }
        Ok(state)
    }

    /// Computational basis state `|index>` in `dim` dimensions.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut v = DVector::from_element(dim, C64::new(0.0, 0.0));
        v[index] = C64::new(1.0, 0.0);
        Self { components: v }
    }

    /// `|+>` of the two-level system.
    pub fn plus() -> Self {
        Self::basis(2, 0)
    }

    /// `|->` of the two-level system.
    pub fn minus() -> Self {
        Self::basis(2, 1)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[C64] {
        self.components.as_slice()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_unit(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol::UNIT_NORM
    }

    /// `<self|other>` (conjugate-linear in `self`).
    pub fn overlap(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.components.dotc(&other.components))
    }

    pub(crate) fn vector(&self) -> &DVector<C64> {
        &self.components
    }

    pub(crate) fn from_dvector(v: DVector<C64>) -> Self {
        Self { components: v }
    }
}

/// A dense complex square matrix in energy units, with a Hermiticity flag
/// declared by its constructor. The flag selects the propagator algorithm
/// and gates the operations whose contracts require Hermiticity.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<C64>,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Declares the matrix Hermitian and verifies it:
    /// `max |H_ij - conj(H_ji)| <= tol * max |H_ij|`.
    pub fn hermitian(entries: DMatrix<C64>) -> Result<Self> {
        Self::hermitian_with_tol(entries, tol::HERMITICITY_REL)
    }

    pub fn hermitian_with_tol(entries: DMatrix<C64>, rel_tol: f64) -> Result<Self> {
        let m = Self::general(entries)?;
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        let mut defect = 0.0_f64;
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                let d = (m.entries[(i, j)] - m.entries[(j, i)].conj()).norm();
                defect = defect.max(d);
            }
        }
        if defect > rel_tol * scale {
            return Err(Error::InvalidInput(format!(
                "matrix declared Hermitian has defect {defect:.3e} (scale {scale:.3e})"
            )));
        }
        Ok(Self { hermitian: true, ..m })
    }

    /// General square matrix; only finiteness and squareness are checked.
    pub fn general(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(Error::InvalidInput(format!(
                "operator must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for c in entries.iter() {
            require_finite_c(*c, "operator matrix")?;
        }
        Ok(Self { entries, hermitian: false })
    }

    /// Row-major construction of a Hermitian operator.
    pub fn hermitian_from_rows(dim: usize, rows: &[C64]) -> Result<Self> {
        Self::hermitian(matrix_from_rows(dim, rows)?)
    }

    /// Row-major construction of a general operator.
    pub fn general_from_rows(dim: usize, rows: &[C64]) -> Result<Self> {
        Self::general(matrix_from_rows(dim, rows)?)
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim), hermitian: true }
    }

    /// Pauli matrix `sigma_1`.
    pub fn pauli_x() -> Self {
        Self::hermitian_from_rows(
            2,
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        )
        .expect("static matrix")
    }

    /// Pauli matrix `sigma_2`.
    pub fn pauli_y() -> Self {
        Self::hermitian_from_rows(
            2,
            &[C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        )
        .expect("static matrix")
    }

    /// Pauli matrix `sigma_3`.
    pub fn pauli_z() -> Self {
        Self::hermitian_from_rows(
            2,
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
        )
        .expect("static matrix")
    }

    /// Scales by a real factor, preserving the Hermiticity flag.
    pub fn scale_real(&self, factor: f64) -> Self {
        Self {
            entries: self.entries.map(|c| c * factor),
            hermitian: self.hermitian,
        }
    }

    /// `H - iV * Identity`: a uniform optical potential absorbing
    /// probability at rate `2V`. The result is non-Hermitian for `v != 0`.
    pub fn with_optical_potential(&self, v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::InvalidInput("optical potential must be finite".into()));
        }
        let mut entries = self.entries.clone();
        for i in 0..self.dim() {
            entries[(i, i)] -= C64::new(0.0, v);
        }
        Ok(Self { entries, hermitian: self.hermitian && v == 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Matrix-vector application.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.dim() != state.dim() {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: operator {} vs state {}",
                self.dim(),
                state.dim()
            )));
        }
        Ok(StateVector::from_dvector(&self.entries * state.vector()))
    }

    /// Matrix product `self * rhs` (general result).
    pub fn matmul(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.dim() != rhs.dim() {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                rhs.dim()
            )));
        }
        Ok(OperatorMatrix { entries: &self.entries * &rhs.entries, hermitian: false })
    }
}

fn matrix_from_rows(dim: usize, rows: &[C64]) -> Result<DMatrix<C64>> {
    if rows.len() != dim * dim {
        return Err(Error::InvalidInput(format!(
            "expected {} entries for a {dim}x{dim} matrix, got {}",
            dim * dim,
            rows.len()
        )));
    }
    Ok(DMatrix::from_row_slice(dim, dim, rows))
}

/// First and second Hamiltonian moments in a state, the variance, and the
/// Zeno time `tau_z = variance^{-1/2}`.
///
/// `zeno_time` is `+inf` when the variance vanishes (eigenstate input) and
/// NaN when the variance of a non-Hermitian generator has no meaningful
/// positive real part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub mean: C64,
    pub second_moment: C64,
    pub variance: C64,
    pub zeno_time: f64,
}

/// `exp(-iHt)`. Hermitian inputs go through an eigendecomposition; general
/// inputs through scaling-and-squaring of the Taylor series with residual
/// target [`tol::EXP_SERIES_RESIDUAL`].
pub fn propagator(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidInput("propagation time must be finite".into()));
    }
    let entries = if h.is_hermitian() {
        expm_hermitian(h.entries(), t)
    } else {
        let a = h.entries().map(|c| c * C64::new(0.0, -t));
        expm_series(&a)?
    };
    Ok(OperatorMatrix { entries, hermitian: false })
}

fn expm_hermitian(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let n = h.nrows();
    let eig = h.clone().symmetric_eigen();
    let mut u = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for k in 0..n {
        let phase = C64::new(0.0, -eig.eigenvalues[k] * t).exp();
        let col = eig.eigenvectors.column(k);
        for i in 0..n {
            let ci = phase * col[i];
            for j in 0..n {
                u[(i, j)] += ci * col[j].conj();
            }
        }
    }
    u
}

fn one_norm(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|c| c.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Scaling-and-squaring Taylor exponential of a general matrix `a`.
fn expm_series(a: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let n = a.nrows();
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::InvalidInput("non-finite generator".into()));
    }
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let b = a.map(|c| c / 2f64.powi(squarings as i32));

    let mut term = DMatrix::<C64>::identity(n, n);
    let mut sum = DMatrix::<C64>::identity(n, n);
    let mut rel = f64::INFINITY;
    for k in 1..=EXP_SERIES_MAX_TERMS {
        term = (&term * &b).map(|c| c / k as f64);
        sum += &term;
        rel = one_norm(&term) / one_norm(&sum).max(f64::MIN_POSITIVE);
        if rel <= tol::EXP_SERIES_TERM {
            break;
        }
    }
    if rel > tol::EXP_SERIES_RESIDUAL {
        return Err(Error::NumericFailure {
            message: "matrix exponential series did not converge".into(),
            residual: rel,
        });
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

fn check_initial(h: &OperatorMatrix, psi0: &StateVector) -> Result<()> {
    if h.dim() != psi0.dim() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: operator {} vs state {}",
            h.dim(),
            psi0.dim()
        )));
    }
    if !psi0.is_unit() {
        return Err(Error::InvalidInput(format!(
            "initial state must be unit-norm: norm^2 = {}",
            psi0.norm_sqr()
        )));
    }
    Ok(())
}

/// Survival amplitude `A(t) = <psi0| exp(-iHt) |psi0>`.
pub fn survival_amplitude(h: &OperatorMatrix, psi0: &StateVector, t: f64) -> Result<C64> {
    check_initial(h, psi0)?;
    let u = propagator(h, t)?;
    psi0.overlap(&u.apply(psi0)?)
}

/// Survival probability `p(t) = |A(t)|^2`.
pub fn survival_probability(h: &OperatorMatrix, psi0: &StateVector, t: f64) -> Result<f64> {
    Ok(survival_amplitude(h, psi0, t)?.norm_sqr())
}

/// `<H>`, `<H^2>`, the variance and the Zeno time in the state `psi0`.
pub fn moments(h: &OperatorMatrix, psi0: &StateVector) -> Result<MomentReport> {
    check_initial(h, psi0)?;
    let h_psi = h.apply(psi0)?;
    let h2_psi = h.apply(&h_psi)?;
    let mean = psi0.overlap(&h_psi)?;
    let second_moment = psi0.overlap(&h2_psi)?;
    let variance = second_moment - mean * mean;

    let scale = second_moment.norm().max(1.0);
    let zeno_time = if variance.norm() <= tol::VARIANCE_VANISH_REL * scale {
        f64::INFINITY
    } else if variance.re > 0.0 {
        variance.re.powf(-0.5)
    } else {
        f64::NAN
    };
    Ok(MomentReport { mean, second_moment, variance, zeno_time })
}

/// One row of a short-time check: the measured decay `1 - p(dt)` against the
/// quadratic prediction `dt^2 / tau_z^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortTimeRow {
    pub delta_t: f64,
    pub one_minus_p: f64,
    pub quadratic_term: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortTimeReport {
    pub rows: Vec<ShortTimeRow>,
    /// Least-squares coefficient of `residual ~ C * dt^4`.
    pub quartic_coefficient: f64,
}

/// Demonstrates the quadratic short-time law for a Hermitian generator.
///
/// Errors with [`Error::ContractViolation`] for non-Hermitian input: the
/// quadratic law relies on the reality of `<H>`.
pub fn short_time_check(
    h: &OperatorMatrix,
    psi0: &StateVector,
    delta_ts: &[f64],
) -> Result<ShortTimeReport> {
    if !h.is_hermitian() {
        return Err(Error::ContractViolation(
            "short-time quadratic law requires a Hermitian generator".into(),
        ));
    }
    check_initial(h, psi0)?;
    if delta_ts.iter().any(|&dt| !dt.is_finite() || dt < 0.0) {
        return Err(Error::InvalidInput("short-time offsets must be finite and >= 0".into()));
    }
    let report = moments(h, psi0)?;
    let curvature = report.variance.re.max(0.0);

    let mut rows = Vec::with_capacity(delta_ts.len());
    for &dt in delta_ts {
        let p = survival_probability(h, psi0, dt)?;
        let one_minus_p = 1.0 - p;
        let quadratic_term = curvature * dt * dt;
        rows.push(ShortTimeRow {
            delta_t: dt,
            one_minus_p,
            quadratic_term,
            residual: (one_minus_p - quadratic_term).abs(),
        });
    }
    let num: f64 = rows.iter().map(|r| r.residual * r.delta_t.powi(4)).sum();
    let den: f64 = rows.iter().map(|r| r.delta_t.powi(8)).sum();
    let quartic_coefficient = if den > 0.0 { num / den } else { 0.0 };
    Ok(ShortTimeReport { rows, quartic_coefficient })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn random_hermitian(dim: usize, seed: u64) -> OperatorMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DMatrix::from_element(dim, dim, c(0.0, 0.0));
        for i in 0..dim {
            m[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
            for j in (i + 1)..dim {
                let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        OperatorMatrix::hermitian(m).unwrap()
    }

    pub(crate) fn random_unit_state(dim: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<C64> =
            (0..dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
        StateVector::initial(v).unwrap()
    }

    #[test]
    fn zero_generator_gives_identity() {
        let h = OperatorMatrix::hermitian(DMatrix::from_element(2, 2, c(0.0, 0.0))).unwrap();
        let u = propagator(&h, 7.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(u.entry(i, j).re, expect, epsilon = 1e-14);
                assert_abs_diff_eq!(u.entry(i, j).im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn rabi_propagator_at_pi() {
        // exp(-i sigma_x pi) = cos(pi) I - i sin(pi) sigma_x = -I
        let u = propagator(&OperatorMatrix::pauli_x(), std::f64::consts::PI).unwrap();
        assert_abs_diff_eq!(u.entry(0, 0).re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u.entry(1, 1).re, -1.0, epsilon = 1e-12);
        assert!(u.entry(0, 1).norm() < 1e-12);
        assert!(u.entry(1, 0).norm() < 1e-12);
    }

    #[test]
    fn eigen_and_series_routes_agree() {
        // same matrix through both algorithms: Hermitian flag on or off
        let h = random_hermitian(3, 7);
        let h_as_general = OperatorMatrix::general(h.entries().clone()).unwrap();
        let u_eigen = propagator(&h, 0.3).unwrap();
        let u_series = propagator(&h_as_general, 0.3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((u_eigen.entry(i, j) - u_series.entry(i, j)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn survival_amplitude_examples() {
        let sx = OperatorMatrix::pauli_x();
        let plus = StateVector::plus();
        // t = 0 is exactly 1
        let a0 = survival_amplitude(&sx, &plus, 0.0).unwrap();
        assert!((a0 - c(1.0, 0.0)).norm() < 1e-14);
        // Rabi amplitude cos(Omega t)
        let a1 = survival_amplitude(&sx, &plus, 1.0).unwrap();
        assert_abs_diff_eq!(a1.re, 1.0_f64.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(a1.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn absorptive_two_level_amplitude() {
        // [[0, 1], [1, -2i*10]]: frozen against the closed form
        // e^{-Vt} [cosh(ht) + (V/h) sinh(ht)], h = sqrt(99)
        let h = OperatorMatrix::general_from_rows(
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, -20.0)],
        )
        .unwrap();
        let plus = StateVector::plus();
        let a = survival_amplitude(&h, &plus, 1.0).unwrap();
        assert_abs_diff_eq!(a.re, 0.953505688122, epsilon = 1e-9);
        assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
        let p = survival_probability(&h, &plus, 1.0).unwrap();
        assert_abs_diff_eq!(p, 0.909173097282, epsilon = 1e-9);
    }

    #[test]
    fn survival_probability_examples() {
        let sx = OperatorMatrix::pauli_x();
        let plus = StateVector::plus();
        let p = survival_probability(&sx, &plus, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(p < 1e-12);
        assert_abs_diff_eq!(survival_probability(&sx, &plus, 0.0).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn moments_of_rabi_system() {
        let m = moments(&OperatorMatrix::pauli_x(), &StateVector::plus()).unwrap();
        assert!(m.mean.norm() < 1e-14);
        assert_abs_diff_eq!(m.variance.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.zeno_time, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigenstate_has_infinite_zeno_time() {
        let h = OperatorMatrix::hermitian_from_rows(
            2,
            &[c(0.7, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)],
        )
        .unwrap();
        let m = moments(&h, &StateVector::plus()).unwrap();
        assert!(m.variance.norm() < 1e-14);
        assert!(m.zeno_time.is_infinite());
    }

    #[test]
    fn variance_matches_survival_curvature() {
        let h = random_hermitian(4, 42);
        let psi0 = random_unit_state(4, 43);
        let m = moments(&h, &psi0).unwrap();
        // p(dt) ~ 1 - variance * dt^2
        let dt = 1e-3;
        let p = survival_probability(&h, &psi0, dt).unwrap();
        let curvature = (1.0 - p) / (dt * dt);
        assert_abs_diff_eq!(curvature, m.variance.re, epsilon = 1e-6 * m.variance.re.max(1.0));
    }

    #[test]
    fn short_time_check_quadratic_law() {
        let report =
            short_time_check(&OperatorMatrix::pauli_x(), &StateVector::plus(), &[1e-2]).unwrap();
        let row = report.rows[0];
        // 1 - cos^2(dt) ~ dt^2
        assert_abs_diff_eq!(row.one_minus_p, 1e-4, epsilon = 1e-7);
        assert!(row.residual <= 1e-7);
    }

    #[test]
    fn short_time_check_zero_offset() {
        let report =
            short_time_check(&OperatorMatrix::pauli_x(), &StateVector::plus(), &[0.0]).unwrap();
        assert_abs_diff_eq!(report.rows[0].residual, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn short_time_check_rejects_non_hermitian() {
        let h = OperatorMatrix::pauli_x().with_optical_potential(0.5).unwrap();
        let err = short_time_check(&h, &StateVector::plus(), &[1e-2]).unwrap_err();
        assert!(matches!(err, Error::ContractViolation(_)));
    }

    #[test]
    fn input_validation() {
        assert!(StateVector::new(vec![]).is_err());
        assert!(StateVector::initial(vec![c(0.5, 0.0)]).is_err());
        assert!(OperatorMatrix::general(DMatrix::from_element(2, 3, c(0.0, 0.0))).is_err());
        assert!(OperatorMatrix::hermitian_from_rows(
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]
        )
        .is_err());
        assert!(OperatorMatrix::general_from_rows(1, &[c(f64::NAN, 0.0)]).is_err());
        assert!(propagator(&OperatorMatrix::pauli_x(), f64::INFINITY).is_err());
        // dimension mismatch
        let h3 = random_hermitian(3, 1);
        assert!(survival_amplitude(&h3, &StateVector::plus(), 0.1).is_err());
    }

    #[test]
    fn hermiticity_flag_drops_with_optical_potential() {
        let h = OperatorMatrix::pauli_x().with_optical_potential(2.0).unwrap();
        assert!(!h.is_hermitian());
        assert_eq!(h.entry(0, 0), c(0.0, -2.0));
        let same = OperatorMatrix::pauli_x().with_optical_potential(0.0).unwrap();
        assert!(same.is_hermitian());
    }
}
