//! Hermitian operators, eigensystems and state operators.
//!
//! A [`StateOperator`] is a unit-trace positive-semidefinite Hermitian
//! operator with no idempotency requirement. Projectors `|ψ⟩⟨ψ|` are the
//! idempotent special case; the same type carries density operators `W`,
//! state operators `ρ` and projectors `P`.
//!
//! Every eigensystem is returned in a fixed form: eigenvalues descending,
//! each eigenvector scaled so that its largest-magnitude component is real
//! and positive, and vectors of a degenerate cluster ordered by the index of
//! that component. Two runs on the same input give identical output.

use nalgebra::SymmetricEigen;

use crate::{CMatrix, CVector, Error, Result, C64};

/// Default tolerances.
pub mod tol {
    /// Relative Hermiticity tolerance, `‖M − M†‖_max ≤ HERMITIAN · ‖M‖_max`.
    pub const HERMITIAN: f64 = 1e-10;
    /// Allowed `|Tr ρ − 1|`.
    pub const TRACE: f64 = 1e-10;
    /// Most negative eigenvalue accepted (and clamped) in a state operator.
    pub const PSD: f64 = 1e-10;
    /// Eigensolver accuracy scale.
    pub const EIG: f64 = 1e-11;

    /// Eigenvalues at or below this value are treated as exact zeros.
    pub fn rank_cutoff(dim: usize, lambda_max: f64) -> f64 {
        dim as f64 * 1e-12 * lambda_max.abs()
    }
}

const MAX_EIG_ITERATIONS: usize = 100_000;

/// Largest entry modulus, `‖M‖_max`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `‖A − B‖_max`. Panics if the shapes differ.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `|v⟩⟨v|` (unnormalized).
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// `(M + M†)/2`.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `[A, B] = AB − BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Index of the largest-magnitude component. Components within a relative
/// `1e-12` of the maximum count as ties and the lowest index wins.
pub fn leading_index(v: &CVector) -> usize {
    let max = v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    v.iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0)
}

/// Multiplies `v` by the global phase that makes its leading component real
/// and positive.
pub fn fix_phase(v: &mut CVector) {
    let k = leading_index(v);
    let lead = v[k];
    let r = lead.norm();
    if r > 0.0 {
        let phase = lead.conj() / r;
        v.iter_mut().for_each(|z| *z *= phase);
        v[k] = C64::new(r, 0.0);
    }
}

/// Normalizes `v` and fixes its global phase.
pub fn canonical_unit_vector(v: &CVector) -> Result<CVector> {
    let norm = v.norm();
    if !norm.is_finite() || norm <= 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut u = v.unscale(norm);
    fix_phase(&mut u);
    Ok(u)
}

fn check_square_finite(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::EmptyMatrix);
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// A validated self-adjoint operator: an observable or a Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
    deviation: f64,
}

/// Accepts `m` as Hermitian if `‖M − M†‖_max ≤ tol · ‖M‖_max`, storing the
/// exactly symmetrized `(M + M†)/2` and the measured deviation.
pub fn make_hermitian(m: CMatrix, tol: f64) -> Result<HermitianOperator> {
    check_square_finite(&m)?;
    let deviation = max_abs_diff(&m, &m.adjoint());
    let allowed = tol * max_abs(&m);
    if deviation > allowed {
        return Err(Error::NotHermitian { deviation, allowed });
    }
    Ok(HermitianOperator {
        matrix: symmetrize(&m),
        deviation,
    })
}

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        make_hermitian(m, tol::HERMITIAN)
    }

    /// Real diagonal operator. Panics on non-finite or empty input.
    pub fn diagonal(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "empty diagonal");
        assert!(values.iter().all(|x| x.is_finite()), "non-finite diagonal");
        let d = CVector::from_iterator(values.len(), values.iter().map(|&x| C64::new(x, 0.0)));
        HermitianOperator {
            matrix: CMatrix::from_diagonal(&d),
            deviation: 0.0,
        }
    }

    pub fn pauli_x() -> Self {
        Self::new(CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ))
        .expect("Pauli X is Hermitian")
    }

    pub fn pauli_y() -> Self {
        Self::new(CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        ))
        .expect("Pauli Y is Hermitian")
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[1.0, -1.0])
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Deviation from self-adjointness measured before symmetrization.
    pub fn deviation(&self) -> f64 {
        self.deviation
    }

    pub fn eig(&self) -> Result<EigenSystem> {
        eig_hermitian(self)
    }
}

/// Eigenvalues in descending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> CVector {
        self.vectors.column(j).into_owned()
    }

    /// `Σⱼ λⱼ |vⱼ⟩⟨vⱼ|`.
    pub fn reconstruct(&self) -> CMatrix {
        rebuild(&self.vectors, &self.values)
    }

    /// Applies `f` to the spectrum: `Σⱼ f(λⱼ) |vⱼ⟩⟨vⱼ|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let values: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        rebuild(&self.vectors, &values)
    }
}

pub(crate) fn rebuild(vectors: &CMatrix, values: &[f64]) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(lambda);
    }
    symmetrize(&(scaled * vectors.adjoint()))
}

/// Eigendecomposition of a validated Hermitian operator.
pub fn eig_hermitian(a: &HermitianOperator) -> Result<EigenSystem> {
    eigh(&a.matrix)
}

/// Eigendecomposition of a matrix already known to be Hermitian.
pub(crate) fn eigh(m: &CMatrix) -> Result<EigenSystem> {
    let n = m.nrows();
    let se = SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_EIG_ITERATIONS)
        .ok_or(Error::ConvergenceFailure)?;

    let mut columns: Vec<(f64, CVector)> = (0..n)
        .map(|j| {
            let mut v = se.eigenvectors.column(j).into_owned();
            fix_phase(&mut v);
            (se.eigenvalues[j], v)
        })
        .collect();
    columns.sort_by(|a, b| b.0.total_cmp(&a.0));

    // Degenerate clusters are ordered by leading component index.
    let scale = columns.iter().fold(1.0_f64, |acc, c| acc.max(c.0.abs()));
    let gap = 10.0 * tol::EIG * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && columns[end - 1].0 - columns[end].0 <= gap {
            end += 1;
        }
        columns[start..end].sort_by_key(|c| leading_index(&c.1));
        start = end;
    }

    let values = columns.iter().map(|c| c.0).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (j, (_, v)) in columns.iter().enumerate() {
        vectors.set_column(j, v);
    }
    Ok(EigenSystem { values, vectors })
}

/// Corrections applied while validating a state operator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Corrections {
    pub hermitian_deviation: f64,
    /// Number of eigenvalues in `[−tol, 0)` clamped to zero.
    pub clamped_eigenvalues: usize,
    /// Real part of the trace before renormalization.
    pub trace_before: f64,
}

/// Unit-trace positive-semidefinite Hermitian operator.
///
/// The eigensystem is computed eagerly at construction; the value is
/// immutable afterwards.
#[derive(Debug, Clone)]
pub struct StateOperator {
    matrix: CMatrix,
    eigen: EigenSystem,
    corrections: Corrections,
}

/// Validates `m` as a state operator: Hermitian within `tol` (relative),
/// no eigenvalue below `−tol`, and `|Tr m − 1| ≤ tol`.
///
/// Eigenvalues in `[−tol, 0)` are clamped to zero and the spectrum is
/// renormalized to unit sum.
pub fn validate_state_operator(m: CMatrix, tol: f64) -> Result<StateOperator> {
    let h = make_hermitian(m, tol)?;
    let hermitian_deviation = h.deviation;
    let eigen = eig_hermitian(&h)?;
    let min_eigenvalue = *eigen.values.last().expect("non-empty");
    if min_eigenvalue < -tol {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    let mut matrix = h.matrix;
    let trace_before = trace(&matrix).re;
    if (trace_before - 1.0).abs() > tol {
        return Err(Error::TraceNotOne {
            trace: trace_before,
        });
    }

    let mut values = eigen.values;
    let clamped_eigenvalues = values.iter().filter(|&&x| x < 0.0).count();
    if clamped_eigenvalues > 0 {
        values.iter_mut().for_each(|x| *x = x.max(0.0));
        matrix = rebuild(&eigen.vectors, &values);
    }
    // Sums already within a few ulps of one are left alone so that
    // validation is a fixed point on its own output.
    let roundoff = 8.0 * values.len() as f64 * f64::EPSILON;
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > roundoff {
        values.iter_mut().for_each(|x| *x = (*x / sum).min(1.0));
    }
    values.iter_mut().for_each(|x| *x = x.min(1.0));
    let tr = trace(&matrix).re;
    if (tr - 1.0).abs() > roundoff {
        matrix.unscale_mut(tr);
    }

    Ok(StateOperator {
        matrix,
        eigen: EigenSystem {
            values,
            vectors: eigen.vectors,
        },
        corrections: Corrections {
            hermitian_deviation,
            clamped_eigenvalues,
            trace_before,
        },
    })
}

impl StateOperator {
    /// Validates with the default tolerances.
    pub fn new(m: CMatrix) -> Result<Self> {
        validate_state_operator(m, tol::PSD)
    }

    /// Diagonal state operator with the given probabilities.
    pub fn from_diagonal(probabilities: &[f64]) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let d = CVector::from_iterator(
            probabilities.len(),
            probabilities.iter().map(|&x| C64::new(x, 0.0)),
        );
        Self::new(CMatrix::from_diagonal(&d))
    }

    /// The projector `|ψ⟩⟨ψ|` onto the normalized `psi`.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let u = canonical_unit_vector(psi)?;
        Self::new(outer(&u))
    }

    /// `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_diagonal(&vec![1.0 / dim as f64; dim]).expect("I/dim is a state")
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eigen
    }

    /// Cleaned spectrum: descending, in `[0, 1]`, unit sum.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn corrections(&self) -> Corrections {
        self.corrections
    }

    pub fn rank_cutoff(&self) -> f64 {
        tol::rank_cutoff(self.dim(), self.eigen.values[0])
    }

    /// Number of eigenvalues above the rank cutoff.
    pub fn rank(&self) -> usize {
        let cutoff = self.rank_cutoff();
        self.eigen.values.iter().filter(|&&x| x > cutoff).count()
    }

    pub fn as_hermitian(&self) -> HermitianOperator {
        HermitianOperator {
            matrix: self.matrix.clone(),
            deviation: 0.0,
        }
    }

    /// `‖ρ − σ‖_max`. Panics if the dimensions differ.
    pub fn distance(&self, other: &StateOperator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// True iff `‖ρ² − ρ‖_max ≤ tol`.
    pub fn is_idempotent(&self, tol: f64) -> bool {
        let sq = &self.matrix * &self.matrix;
        max_abs_diff(&sq, &self.matrix) <= tol
    }

    /// `Tr(ρA)`.
    pub fn expectation(&self, a: &HermitianOperator) -> Result<f64> {
        expectation(self, a)
    }

    /// Restriction to `Ran(ρ)` together with its inverse there.
    pub fn range_restrict(&self) -> RangeRestriction {
        range_restrict(self)
    }
}

/// True iff `‖ρ² − ρ‖_max ≤ tol`.
pub fn is_idempotent(s: &StateOperator, tol: f64) -> bool {
    s.is_idempotent(tol)
}

/// `⟨A⟩ = Tr(ρA)`.
pub fn expectation(s: &StateOperator, a: &HermitianOperator) -> Result<f64> {
    if s.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: a.dim(),
        });
    }
    Ok(trace_product(&s.matrix, &a.matrix))
}

/// `Re Tr(AB)` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    debug_assert!(acc.im.abs() <= 1e3 * tol::EIG * (1.0 + acc.re.abs()));
    acc.re
}

/// An operator restricted to its range, with the inverse there.
#[derive(Debug, Clone)]
pub struct RangeRestriction {
    pub rank: usize,
    /// `dim × rank`, orthonormal columns spanning the range (eigenvectors).
    pub basis: CMatrix,
    /// Eigenvalues belonging to the basis columns.
    pub eigenvalues: Vec<f64>,
    /// `B† W B`.
    pub restricted: CMatrix,
    /// Inverse of `restricted`.
    pub inverse: CMatrix,
}

pub fn range_restrict(s: &StateOperator) -> RangeRestriction {
    let rank = s.rank();
    let basis = s.eigen.vectors.columns(0, rank).into_owned();
    let eigenvalues = s.eigen.values[..rank].to_vec();
    let restricted = symmetrize(&(basis.adjoint() * &s.matrix * &basis));
    let inverse = match restricted.clone().try_inverse() {
        Some(inv) => symmetrize(&inv),
        None => CMatrix::from_diagonal(&CVector::from_iterator(
            rank,
            eigenvalues.iter().map(|&x| C64::new(1.0 / x, 0.0)),
        )),
    };
    RangeRestriction {
        rank,
        basis,
        eigenvalues,
        restricted,
        inverse,
    }
}

impl RangeRestriction {
    /// Coordinates of `v` in the range basis, `B†v`.
    pub fn coordinates(&self, v: &CVector) -> CVector {
        self.basis.adjoint() * v
    }

    /// `‖v − BB†v‖`, the part of `v` outside the range.
    pub fn residual(&self, v: &CVector) -> f64 {
        (v - &self.basis * self.coordinates(v)).norm()
    }

    /// `⟨v|W⁻¹|v⟩` evaluated inside the range.
    pub fn inverse_expectation(&self, v: &CVector) -> f64 {
        let c = self.coordinates(v);
        (c.adjoint() * &self.inverse * &c)[(0, 0)].re
    }

    /// Maps an operator on the range back to the full space, `B X B†`.
    pub fn embed(&self, x: &CMatrix) -> CMatrix {
        &self.basis * x * self.basis.adjoint()
    }

    /// Restricts a full-space operator to the range, `B† A B`.
    pub fn restrict(&self, a: &CMatrix) -> CMatrix {
        symmetrize(&(self.basis.adjoint() * a * &self.basis))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn real_diagonal_is_accepted_unchanged() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let h = make_hermitian(m.clone(), 1e-10).unwrap();
        assert_eq!(h.matrix(), &m);
        assert_eq!(h.deviation(), 0.0);
    }

    #[test]
    fn pauli_y_is_accepted() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]);
        let h = make_hermitian(m.clone(), 1e-10).unwrap();
        assert_eq!(h.matrix(), &m);
    }

    #[test]
    fn nilpotent_is_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(make_hermitian(m, 1e-10), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn non_square_and_non_finite_are_rejected() {
        let m = CMatrix::zeros(2, 3);
        assert_eq!(make_hermitian(m, 1e-10).unwrap_err().kind(), "NotSquare");
        let mut m = CMatrix::identity(2, 2);
        m[(1, 0)] = c(f64::NAN, 0.0);
        assert_eq!(make_hermitian(m, 1e-10).unwrap_err().kind(), "NonFinite");
    }

    #[test]
    fn eig_of_park_state() {
        let w = HermitianOperator::diagonal(&[0.75, 0.25]);
        let e = w.eig().unwrap();
        assert_eq!(e.values, vec![0.75, 0.25]);
        assert!((e.vector(0)[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((e.vector(1)[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eig_of_identity_reconstructs() {
        let e = HermitianOperator::identity(2).eig().unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        assert!(max_abs_diff(&e.reconstruct(), &CMatrix::identity(2, 2)) < 1e-14);
        // ties ordered by leading component
        assert_eq!(leading_index(&e.vector(0)), 0);
        assert_eq!(leading_index(&e.vector(1)), 1);
    }

    #[test]
    fn eig_random_5x5_reconstructs() {
        let mut rng = random::stream(11, random::tags::TEST, 0);
        let a = random::hermitian(5, &mut rng);
        let e = a.eig().unwrap();
        assert!(max_abs_diff(&e.reconstruct(), a.matrix()) <= 1e-10);
        let gram = e.vectors.adjoint() * &e.vectors;
        assert!(max_abs_diff(&gram, &CMatrix::identity(5, 5)) <= tol::EIG);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        for j in 0..5 {
            let v = e.vector(j);
            let lead = v[leading_index(&v)];
            assert!(lead.im == 0.0 && lead.re > 0.0);
        }
    }

    #[test]
    fn state_validation_examples() {
        let mixed = StateOperator::from_diagonal(&[0.5, 0.5]).unwrap();
        assert_eq!(mixed.eigenvalues(), &[0.5, 0.5]);
        let err = StateOperator::from_diagonal(&[1.2, -0.2]).unwrap_err();
        assert!(matches!(err, Error::NotPositive { min_eigenvalue } if (min_eigenvalue + 0.2).abs() < 1e-15));
        let park = StateOperator::from_diagonal(&[0.75, 0.25]).unwrap();
        assert!(!park.is_idempotent(1e-10));
        assert_eq!(
            StateOperator::from_diagonal(&[0.5, 0.6]).unwrap_err().kind(),
            "TraceNotOne"
        );
    }

    #[test]
    fn tiny_negative_eigenvalue_is_clamped() {
        let s = StateOperator::from_diagonal(&[1.0 + 1e-11, -1e-11]).unwrap();
        assert_eq!(s.corrections().clamped_eigenvalues, 1);
        assert_eq!(s.eigenvalues()[1], 0.0);
        assert!((s.eigenvalues().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((trace(s.matrix()).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn idempotency_examples() {
        let zero = StateOperator::from_diagonal(&[1.0, 0.0]).unwrap();
        assert!(zero.is_idempotent(1e-12));
        let third = StateOperator::maximally_mixed(3);
        assert!(!third.is_idempotent(1e-12));
    }

    #[test]
    fn expectation_examples() {
        let half = StateOperator::maximally_mixed(2);
        assert_eq!(half.expectation(&HermitianOperator::pauli_z()).unwrap(), 0.0);
        let park = StateOperator::from_diagonal(&[0.75, 0.25]).unwrap();
        let p1 = HermitianOperator::diagonal(&[0.0, 1.0]);
        assert!((park.expectation(&p1).unwrap() - 0.25).abs() < 1e-15);

        let psi = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let rho = StateOperator::pure(&psi).unwrap();
        let proj = rho.as_hermitian();
        assert!((rho.expectation(&proj).unwrap() - 1.0).abs() < 1e-14);

        let three = HermitianOperator::identity(3);
        assert_eq!(
            park.expectation(&three).unwrap_err(),
            Error::DimensionMismatch { left: 2, right: 3 }
        );
    }

    #[test]
    fn range_restriction_examples() {
        let park = StateOperator::from_diagonal(&[0.75, 0.25]).unwrap();
        let r = park.range_restrict();
        assert_eq!(r.rank, 2);
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![c(4.0 / 3.0, 0.0), c(4.0, 0.0)]));
        assert!(max_abs_diff(&r.inverse, &expected) < 1e-14);

        let zero = StateOperator::from_diagonal(&[1.0, 0.0]).unwrap();
        let r = zero.range_restrict();
        assert_eq!(r.rank, 1);
        assert!((r.inverse[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        let half = StateOperator::from_diagonal(&[0.5, 0.5, 0.0]).unwrap();
        let r = half.range_restrict();
        assert_eq!(r.rank, 2);
        let e2 = CVector::from_vec(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(r.residual(&e2) > 0.999);
        let e0 = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(r.residual(&e0) < 1e-15);
    }
}
