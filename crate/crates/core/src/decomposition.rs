//! Resolutions of a density operator into weighted rank-one projectors.
//!
//! A density operator `W` with `W² ≠ W` has infinitely many resolutions
//! `W = Σₖ wₖ |αₖ⟩⟨αₖ|`. This module builds them three ways:
//!
//! - [`spectral_decomposition`]: the eigenbasis, mutually orthogonal.
//! - [`complete_from_vector`]: start from any unit vector `α₁` in `Ran(W)`
//!   with weight `w₁ = 1/⟨α₁|W⁻¹|α₁⟩`, then resolve the positive residual
//!   `W − w₁|α₁⟩⟨α₁|`, whose rank is one less than that of `W`.
//! - [`hjw_decomposition`]: mix the square-root ensemble with an isometry,
//!   `|ᾱₖ⟩ = Σⱼ √wⱼ conj(Uⱼₖ) |ψⱼ⟩`.
//!
//! Whenever a resolution has exactly `rank(W)` components, each weight obeys
//! `wₖ = 1/⟨αₖ|W⁻¹|αₖ⟩` with `W⁻¹` the inverse on the range. With more
//! components than the rank the left side is strictly smaller.

use rand::Rng;

use crate::operator::{
    self, canonical_unit_vector, eigh, max_abs_diff, outer, symmetrize, StateOperator,
};
use crate::random::{self, tags};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Allowed `|Σ wₖ − 1|`.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;
/// Allowed `|‖αₖ‖ − 1|`.
pub const UNIT_TOL: f64 = 1e-10;
/// Allowed norm of the component of a vector outside `Ran(W)`.
pub const RANGE_TOL: f64 = 1e-9;
/// Allowed `‖Σ wₖ|αₖ⟩⟨αₖ| − W‖_max`.
pub const RECONSTRUCT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub vector: CVector,
}

impl Component {
    pub fn new(weight: f64, vector: CVector) -> Self {
        Component { weight, vector }
    }
}

/// A validated resolution of `target` into weighted unit vectors.
///
/// The vectors need not be orthogonal. Each is stored with its
/// largest-magnitude component real and positive.
#[derive(Debug, Clone)]
pub struct Decomposition {
    components: Vec<Component>,
    target: StateOperator,
}

impl Decomposition {
    /// Checks every invariant against `target`: weights in `(0, 1]` summing
    /// to one, unit vectors inside `Ran(target)`, and reconstruction.
    pub fn new(components: Vec<Component>, target: StateOperator) -> Result<Self> {
        let invalid = |reason: String| Err(Error::InvalidDecomposition { reason });
        if components.is_empty() {
            return invalid("no components".into());
        }
        let dim = target.dim();
        let range = target.range_restrict();
        let mut fixed = Vec::with_capacity(components.len());
        for (k, c) in components.into_iter().enumerate() {
            if c.vector.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: c.vector.len(),
                });
            }
            if !(c.weight > 0.0 && c.weight <= 1.0 + WEIGHT_SUM_TOL) {
                return invalid(format!("component {k} has weight {}", c.weight));
            }
            let norm = c.vector.norm();
            if (norm - 1.0).abs() > UNIT_TOL {
                return invalid(format!("component {k} has norm {norm}"));
            }
            let residual = range.residual(&c.vector);
            if residual > RANGE_TOL {
                return Err(Error::VectorOutsideRange { residual });
            }
            let mut vector = c.vector;
            operator::fix_phase(&mut vector);
            fixed.push(Component {
                weight: c.weight,
                vector,
            });
        }
        let sum: f64 = fixed.iter().map(|c| c.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::NotNormalized { sum });
        }
        let gap = max_abs_diff(&mixture(&fixed), target.matrix());
        if gap > RECONSTRUCT_TOL {
            return invalid(format!("reconstruction differs from target by {gap:e}"));
        }
        Ok(Decomposition {
            components: fixed,
            target,
        })
    }

    /// Builds a decomposition whose target is its own reconstruction.
    pub fn from_components(components: Vec<Component>) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::InvalidDecomposition {
            reason: "no components".into(),
        })?;
        let dim = first.vector.len();
        if let Some(c) = components.iter().find(|c| c.vector.len() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: c.vector.len(),
            });
        }
        let target = StateOperator::new(mixture(&components))?;
        Self::new(components, target)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn target(&self) -> &StateOperator {
        &self.target
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight).collect()
    }

    /// `Σₖ wₖ|αₖ⟩⟨αₖ|` as a raw matrix.
    pub fn mixture(&self) -> CMatrix {
        mixture(&self.components)
    }

    /// `wₖ · ⟨αₖ|W⁻¹|αₖ⟩` for every component, with `W` the target.
    pub fn weight_identity_products(&self) -> Vec<f64> {
        let range = self.target.range_restrict();
        self.components
            .iter()
            .map(|c| c.weight * range.inverse_expectation(&c.vector))
            .collect()
    }
}

fn mixture(components: &[Component]) -> CMatrix {
    let dim = components[0].vector.len();
    let mut m = CMatrix::zeros(dim, dim);
    for c in components {
        m += outer(&c.vector).scale(c.weight);
    }
    symmetrize(&m)
}

/// Eigenpairs of `w` with eigenvalue above the rank cutoff.
pub fn spectral_decomposition(w: &StateOperator) -> Decomposition {
    let eigen = w.eigen();
    let components = (0..w.rank())
        .map(|j| Component::new(eigen.values[j], eigen.vector(j)))
        .collect();
    Decomposition::new(components, w.clone()).expect("eigenpairs resolve the operator")
}

fn unit_in_range(w: &StateOperator, alpha: &CVector) -> Result<CVector> {
    if alpha.len() != w.dim() {
        return Err(Error::DimensionMismatch {
            left: w.dim(),
            right: alpha.len(),
        });
    }
    let alpha = canonical_unit_vector(alpha)?;
    let residual = w.range_restrict().residual(&alpha);
    if residual > RANGE_TOL {
        return Err(Error::VectorOutsideRange { residual });
    }
    Ok(alpha)
}

/// `1/⟨α|W⁻¹|α⟩`, the weight a unit vector `α ∈ Ran(W)` must carry in any
/// resolution of `W` with `rank(W)` components.
///
/// `alpha` is normalized before use.
pub fn weight_from_vector(w: &StateOperator, alpha: &CVector) -> Result<f64> {
    let alpha = unit_in_range(w, alpha)?;
    Ok(1.0 / w.range_restrict().inverse_expectation(&alpha))
}

/// Completes `α₁` into a resolution of `w` with exactly `rank(w)`
/// components. The first component is `(weight_from_vector(w, α₁), α₁)`;
/// the rest are the eigenpairs of the residual `W − w₁|α₁⟩⟨α₁|`.
pub fn complete_from_vector(w: &StateOperator, alpha1: &CVector) -> Result<Decomposition> {
    let alpha = unit_in_range(w, alpha1)?;
    let rank = w.rank();
    let w1 = 1.0 / w.range_restrict().inverse_expectation(&alpha);
    let mut components = vec![Component::new(w1.min(1.0), alpha.clone())];
    if rank > 1 {
        let residual = symmetrize(&(w.matrix() - outer(&alpha).scale(w1)));
        let eig = eigh(&residual)?;
        for j in 0..rank - 1 {
            components.push(Component::new(eig.values[j], eig.vector(j)));
        }
    }
    Decomposition::new(components, w.clone())
}

/// Like [`complete_from_vector`], but every later vector is Haar-random in
/// the range of the current residual instead of an eigenvector of it.
pub fn complete_from_vector_seeded(
    w: &StateOperator,
    alpha1: &CVector,
    seed: u64,
) -> Result<Decomposition> {
    let mut alpha = unit_in_range(w, alpha1)?;
    let mut rng = random::stream(seed, tags::COMPLETION, 0);
    let mut rest = w.matrix().clone();
    let mut remaining = w.rank();
    let mut components = Vec::with_capacity(remaining);
    loop {
        let eig = eigh(&rest)?;
        if remaining == 1 {
            components.push(Component::new(eig.values[0], eig.vector(0)));
            break;
        }
        let basis = eig.vectors.columns(0, remaining).into_owned();
        let coords = basis.adjoint() * &alpha;
        let inv_form: f64 = coords
            .iter()
            .zip(&eig.values[..remaining])
            .map(|(c, &lambda)| c.norm_sqr() / lambda)
            .sum();
        let weight = 1.0 / inv_form;
        components.push(Component::new(weight, alpha.clone()));
        rest = symmetrize(&(rest - outer(&alpha).scale(weight)));
        remaining -= 1;

        let next = eigh(&rest)?;
        let basis = next.vectors.columns(0, remaining).into_owned();
        let c = CVector::from_fn(remaining, |_, _| random::complex_normal(&mut rng));
        alpha = canonical_unit_vector(&(basis * c))?;
    }
    Decomposition::new(components, w.clone())
}

/// A `rows × cols` matrix with orthonormal rows, `U U† = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    matrix: CMatrix,
}

impl Isometry {
    pub const TOL: f64 = 1e-10;

    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rows = matrix.nrows();
        let gram = &matrix * matrix.adjoint();
        let deviation = max_abs_diff(&gram, &CMatrix::identity(rows, rows));
        if rows == 0 || rows > matrix.ncols() || deviation > Self::TOL {
            return Err(Error::NotIsometry { deviation });
        }
        Ok(Isometry { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Isometry {
            matrix: CMatrix::identity(n, n),
        }
    }

    /// Haar-distributed isometry drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Isometry::new(random::isometry(rows, cols, rng)).expect("QR yields orthonormal rows")
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Mixes the spectral ensemble of `w` with `u`:
/// `|ᾱₖ⟩ = Σⱼ √wⱼ conj(Uⱼₖ) |ψⱼ⟩`, component `k = (‖ᾱₖ‖², ᾱₖ/‖ᾱₖ‖)`.
/// Columns whose vector vanishes (below the rank cutoff) are dropped.
pub fn hjw_decomposition(w: &StateOperator, u: &Isometry) -> Result<Decomposition> {
    let rank = w.rank();
    if u.rows() != rank {
        return Err(Error::IsometryShapeMismatch {
            rows: u.rows(),
            cols: u.cols(),
            rank,
        });
    }
    let eigen = w.eigen();
    let mut sqrt_ensemble = eigen.vectors.columns(0, rank).into_owned();
    for j in 0..rank {
        sqrt_ensemble
            .column_mut(j)
            .scale_mut(eigen.values[j].sqrt());
    }
    // columns of Ψ√Λ · conj(U) are the unnormalized vectors
    let unnormalized = sqrt_ensemble * u.matrix().map(|z| z.conj());
    let cutoff = w.rank_cutoff();
    let mut components = Vec::with_capacity(u.cols());
    for k in 0..u.cols() {
        let v = unnormalized.column(k).into_owned();
        let weight = v.norm_squared();
        if weight > cutoff {
            components.push(Component::new(weight, v.unscale(weight.sqrt())));
        }
    }
    Decomposition::new(components, w.clone())
}

/// `Σₖ wₖ|αₖ⟩⟨αₖ|` validated as a state operator.
pub fn reconstruct(d: &Decomposition) -> Result<StateOperator> {
    StateOperator::new(d.mixture())
}

/// The qubit `W = p|1⟩⟨1| + (1−p)|0⟩⟨0|` and its two resolutions.
#[derive(Debug, Clone)]
pub struct ParkExample {
    pub p: f64,
    /// `1/(1 − 2p)`.
    pub a: f64,
    /// `2p(1 − p)`, the weight on `|+⟩`.
    pub w: f64,
    /// `{(1−p, |0⟩), (p, |1⟩)}`.
    pub spectral: Decomposition,
    /// `{(w, |+⟩), (1−w, |a⟩)}` with `|a⟩ = (|+⟩ + a|−⟩)/√(1+a²)`.
    pub alternative: Decomposition,
}

pub fn park_qubit_example(p: f64) -> Result<ParkExample> {
    if !(p > 0.0 && p < 1.0) || 1.0 - 2.0 * p == 0.0 {
        return Err(Error::InvalidP { p });
    }
    let a = 1.0 / (1.0 - 2.0 * p);
    let w = 2.0 * p * (1.0 - p);
    let target = StateOperator::from_diagonal(&[1.0 - p, p])?;

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ket = |x: f64, y: f64| CVector::from_vec(vec![C64::new(x, 0.0), C64::new(y, 0.0)]);
    let plus = ket(s, s);
    let minus = ket(s, -s);
    let a_ket = (&plus + minus.scale(a)).unscale((1.0 + a * a).sqrt());

    let spectral = Decomposition::new(
        vec![
            Component::new(1.0 - p, ket(1.0, 0.0)),
            Component::new(p, ket(0.0, 1.0)),
        ],
        target.clone(),
    )?;
    let alternative = Decomposition::new(
        vec![Component::new(w, plus), Component::new(1.0 - w, a_ket)],
        target,
    )?;
    Ok(ParkExample {
        p,
        a,
        w,
        spectral,
        alternative,
    })
}

fn check_same_target(d1: &Decomposition, d2: &Decomposition, tol: f64) -> Result<()> {
    if d1.dim() != d2.dim() {
        return Err(Error::DimensionMismatch {
            left: d1.dim(),
            right: d2.dim(),
        });
    }
    let gap = d1.target.distance(&d2.target);
    if gap > tol {
        return Err(Error::DifferentTargets { gap });
    }
    Ok(())
}

fn overlap(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm()
}

/// True iff no vector of `d1` equals a vector of `d2` up to global phase:
/// `|⟨α|β⟩| < 1 − tol` for every pair.
pub fn decompositions_distinct(d1: &Decomposition, d2: &Decomposition, tol: f64) -> Result<bool> {
    check_same_target(d1, d2, tol)?;
    Ok(d1.components.iter().all(|a| {
        d2.components
            .iter()
            .all(|b| overlap(&a.vector, &b.vector) < 1.0 - tol)
    }))
}

/// True iff the two decompositions have the same components as sets: equal
/// weights and phase-equal vectors, both within `tol`.
pub fn same_components(d1: &Decomposition, d2: &Decomposition, tol: f64) -> bool {
    if d1.len() != d2.len() || d1.dim() != d2.dim() {
        return false;
    }
    let mut used = vec![false; d2.len()];
    d1.components.iter().all(|a| {
        let hit = d2.components.iter().enumerate().position(|(i, b)| {
            !used[i]
                && (a.weight - b.weight).abs() <= tol
                && overlap(&a.vector, &b.vector) >= 1.0 - tol
        });
        match hit {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::max_abs_diff;
    use crate::random::{stream, tags};

    fn ket(v: &[f64]) -> CVector {
        CVector::from_iterator(v.len(), v.iter().map(|&x| C64::new(x, 0.0)))
    }

    fn park_w() -> StateOperator {
        StateOperator::from_diagonal(&[0.75, 0.25]).unwrap()
    }

    #[test]
    fn spectral_examples() {
        let d = spectral_decomposition(&park_w());
        assert_eq!(d.weights(), vec![0.75, 0.25]);
        assert!(same_components(
            &d,
            &Decomposition::from_components(vec![
                Component::new(0.75, ket(&[1.0, 0.0])),
                Component::new(0.25, ket(&[0.0, 1.0])),
            ])
            .unwrap(),
            1e-14
        ));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateOperator::pure(&ket(&[s, s])).unwrap();
        let d = spectral_decomposition(&plus);
        assert_eq!(d.len(), 1);
        assert!((d.components()[0].weight - 1.0).abs() < 1e-14);
        assert!((d.components()[0].vector.dotc(&ket(&[s, s])).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_rank_three_in_dim_four() {
        let mut rng = stream(3, tags::TEST, 0);
        let w = random::density(4, 3, &mut rng);
        let d = spectral_decomposition(&w);
        assert_eq!(d.len(), 3);
        assert!(max_abs_diff(&d.mixture(), w.matrix()) < 1e-9);
    }

    #[test]
    fn weight_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ket(&[s, s]);
        // ⟨+|W⁻¹|+⟩ = (4/3 + 4)/2 = 8/3
        assert!((weight_from_vector(&park_w(), &plus).unwrap() - 3.0 / 8.0).abs() < 1e-15);

        let psi = ket(&[0.6, 0.8]);
        let pure = StateOperator::pure(&psi).unwrap();
        assert!((weight_from_vector(&pure, &psi).unwrap() - 1.0).abs() < 1e-14);

        let half = StateOperator::maximally_mixed(2);
        let mut rng = stream(4, tags::TEST, 0);
        let alpha = random::haar_vector(2, &mut rng);
        assert!((weight_from_vector(&half, &alpha).unwrap() - 0.5).abs() < 1e-14);

        let err = weight_from_vector(&pure, &ket(&[0.8, -0.6])).unwrap_err();
        assert_eq!(err.kind(), "VectorOutsideRange");
    }

    #[test]
    fn completion_reproduces_park_pair() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let d = complete_from_vector(&park_w(), &ket(&[s, s])).unwrap();
        let park = park_qubit_example(0.25).unwrap();
        assert!(same_components(&d, &park.alternative, 1e-12));
        let second = &d.components()[1];
        assert!((second.weight - 5.0 / 8.0).abs() < 1e-14);
        let a = ket(&[3.0, -1.0]).unscale(10f64.sqrt());
        assert!((second.vector.dotc(&a).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn completion_from_eigenvector_is_spectral() {
        let d = complete_from_vector(&park_w(), &ket(&[1.0, 0.0])).unwrap();
        assert!(same_components(&d, &spectral_decomposition(&park_w()), 1e-12));
    }

    #[test]
    fn completion_in_dim_three() {
        let w = StateOperator::maximally_mixed(3);
        let alpha = ket(&[1.0, 1.0, 1.0]);
        let d = complete_from_vector(&w, &alpha).unwrap();
        assert_eq!(d.len(), 3);
        for c in d.components() {
            assert!((c.weight - 1.0 / 3.0).abs() < 1e-12);
        }
        let alpha = canonical_unit_vector(&alpha).unwrap();
        let residual = w.matrix() - outer(&alpha).scale(1.0 / 3.0);
        let eig = eigh(&residual).unwrap();
        assert_eq!(eig.values.iter().filter(|&&x| x > 1e-12).count(), 2);
        assert!(max_abs_diff(&d.mixture(), w.matrix()) < 1e-12);
    }

    #[test]
    fn completion_of_pure_state_is_single_component() {
        let psi = ket(&[0.6, 0.8]);
        let pure = StateOperator::pure(&psi).unwrap();
        let d = complete_from_vector(&pure, &psi).unwrap();
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn seeded_completion_is_valid_and_reproducible() {
        let mut rng = stream(5, tags::TEST, 0);
        let w = random::density(5, 4, &mut rng);
        let alpha = random::haar_vector_in_range(&w.range_restrict(), &mut rng);
        let d1 = complete_from_vector_seeded(&w, &alpha, 9).unwrap();
        let d2 = complete_from_vector_seeded(&w, &alpha, 9).unwrap();
        assert_eq!(d1.len(), 4);
        assert_eq!(d1.components(), d2.components());
        for x in d1.weight_identity_products() {
            assert!((x - 1.0).abs() < 1e-8);
        }
    }

    /// `Uⱼₖ = conj(⟨ψⱼ|ᾱₖ⟩)/√wⱼ` recovers the mixing matrix of a target
    /// resolution from the spectral system.
    fn isometry_for(w: &StateOperator, d: &Decomposition) -> CMatrix {
        let spectral = spectral_decomposition(w);
        CMatrix::from_fn(spectral.len(), d.len(), |j, k| {
            let psi = &spectral.components()[j];
            let comp = &d.components()[k];
            let bar = comp.vector.scale(comp.weight.sqrt());
            psi.vector.dotc(&bar).conj() / psi.weight.sqrt()
        })
    }

    #[test]
    fn hjw_identity_is_spectral() {
        let w = park_w();
        let d = hjw_decomposition(&w, &Isometry::identity(2)).unwrap();
        assert!(same_components(&d, &spectral_decomposition(&w), 1e-14));
    }

    #[test]
    fn hjw_round_trips_park_pair() {
        let w = park_w();
        let park = park_qubit_example(0.25).unwrap();
        let u = Isometry::new(isometry_for(&w, &park.alternative)).unwrap();
        let d = hjw_decomposition(&w, &u).unwrap();
        assert!(same_components(&d, &park.alternative, 1e-12));
    }

    #[test]
    fn hjw_three_equal_components_of_half() {
        // columns of a 2x3 isometry with equal norms √(2/3)
        let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let n = 1.0 / 3f64.sqrt();
        let u = CMatrix::from_fn(2, 3, |j, k| omega.powu((j * k) as u32) * n);
        let u = Isometry::new(u).unwrap();
        let w = StateOperator::maximally_mixed(2);
        let d = hjw_decomposition(&w, &u).unwrap();
        assert_eq!(d.len(), 3);
        for c in d.components() {
            assert!((c.weight - 1.0 / 3.0).abs() < 1e-14);
        }
        assert!(max_abs_diff(&d.mixture(), w.matrix()) < 1e-14);
        // more components than the rank: the weight identity becomes an inequality
        for x in d.weight_identity_products() {
            assert!((x - 2.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hjw_shape_errors() {
        let w = park_w();
        assert_eq!(
            hjw_decomposition(&w, &Isometry::identity(3)).unwrap_err().kind(),
            "IsometryShapeMismatch"
        );
        let bad = CMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert_eq!(Isometry::new(bad).unwrap_err().kind(), "NotIsometry");
    }

    #[test]
    fn reconstruct_examples() {
        let d = Decomposition::from_components(vec![Component::new(1.0, ket(&[1.0, 0.0]))]).unwrap();
        let r = reconstruct(&d).unwrap();
        assert!(r.distance(&StateOperator::from_diagonal(&[1.0, 0.0]).unwrap()) < 1e-15);

        let d = Decomposition::from_components(vec![
            Component::new(0.5, ket(&[1.0, 0.0])),
            Component::new(0.5, ket(&[0.0, 1.0])),
        ])
        .unwrap();
        assert!(reconstruct(&d).unwrap().distance(&StateOperator::maximally_mixed(2)) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let park = Decomposition::from_components(vec![
            Component::new(3.0 / 8.0, ket(&[s, s])),
            Component::new(5.0 / 8.0, ket(&[3.0, -1.0]).unscale(10f64.sqrt())),
        ])
        .unwrap();
        assert!(reconstruct(&park).unwrap().distance(&park_w()) < 1e-15);
    }

    #[test]
    fn park_example_values() {
        let ex = park_qubit_example(0.25).unwrap();
        assert_eq!(ex.a, 2.0);
        assert_eq!(ex.w, 0.375);
        for d in [&ex.spectral, &ex.alternative] {
            assert!(reconstruct(d).unwrap().distance(&park_w()) <= 1e-12);
        }
        let a = ket(&[3.0, -1.0]).unscale(10f64.sqrt());
        assert!((ex.alternative.components()[1].vector.dotc(&a).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn park_example_limits_and_errors() {
        let ex = park_qubit_example(1e-6).unwrap();
        assert!((ex.w - 2e-6).abs() < 1e-11);
        assert!(ex.alternative.target().eigenvalues()[0] > 1.0 - 2e-6);
        for p in [0.0, 0.5, 1.0, -0.1, f64::NAN] {
            assert_eq!(park_qubit_example(p).unwrap_err().kind(), "InvalidP");
        }
        // p > 1/2 gives a < 0 and still resolves W
        let ex = park_qubit_example(0.8).unwrap();
        assert!(ex.a < 0.0);
        assert!(reconstruct(&ex.alternative).unwrap().distance(ex.spectral.target()) < 1e-14);
    }

    #[test]
    fn distinctness_examples() {
        let ex = park_qubit_example(0.25).unwrap();
        assert!(decompositions_distinct(&ex.spectral, &ex.alternative, 1e-9).unwrap());
        assert!(!decompositions_distinct(&ex.spectral, &ex.spectral, 1e-9).unwrap());

        let half = StateOperator::maximally_mixed(2);
        let spectral = spectral_decomposition(&half);
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rotated = Decomposition::new(
            vec![
                Component::new(0.5, ket(&[c, s])),
                Component::new(0.5, ket(&[-s, c])),
            ],
            half,
        )
        .unwrap();
        assert!(decompositions_distinct(&spectral, &rotated, 1e-9).unwrap());

        let other = spectral_decomposition(&StateOperator::from_diagonal(&[0.6, 0.4]).unwrap());
        assert_eq!(
            decompositions_distinct(&ex.spectral, &other, 1e-9).unwrap_err().kind(),
            "DifferentTargets"
        );
    }

    #[test]
    fn invalid_decompositions_are_rejected() {
        let w = park_w();
        let bad = Decomposition::new(
            vec![
                Component::new(0.5, ket(&[1.0, 0.0])),
                Component::new(0.25, ket(&[0.0, 1.0])),
            ],
            w.clone(),
        );
        assert_eq!(bad.unwrap_err().kind(), "NotNormalized");
        let bad = Decomposition::new(
            vec![
                Component::new(0.5, ket(&[1.0, 0.0])),
                Component::new(0.5, ket(&[0.0, 1.0])),
            ],
            w,
        );
        assert_eq!(bad.unwrap_err().kind(), "InvalidDecomposition");
    }
}
