//! Seeded random generation of vectors, operators and streams.
//!
//! All randomness descends from one 64-bit seed. A ChaCha8 key is expanded
//! from the seed and every consumer draws from its own stream
//! `(tag << 48) | index`, where `tag` names the consumer and `index`
//! enumerates independent units of work (coins, observables, draws). Streams
//! never overlap, so results do not depend on the order or thread in which
//! units are processed.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operator::{self, HermitianOperator, RangeRestriction, StateOperator};
use crate::{CMatrix, CVector, C64};

pub type StreamRng = ChaCha8Rng;

/// Stream tags. Each consumer of randomness owns one.
pub mod tags {
    pub const TEST: u64 = 0x01;
    pub const HAAR: u64 = 0x02;
    pub const COMPLETION: u64 = 0x03;
    pub const PREPARATION: u64 = 0x10;
    pub const PROJECTIVE: u64 = 0x11;
    pub const OBSERVABLES: u64 = 0x12;
    pub const SINGLE_SHOT: u64 = 0x13;
    pub const COINS: u64 = 0x20;
    pub const BOOTSTRAP: u64 = 0x21;
    pub const DEMO: u64 = 0x30;
}

const INDEX_BITS: u32 = 48;

/// The generator for unit `index` of consumer `tag`.
pub fn stream(seed: u64, tag: u64, index: u64) -> StreamRng {
    assert!(tag < 1 << (64 - INDEX_BITS), "tag out of range");
    assert!(index < 1 << INDEX_BITS, "index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << INDEX_BITS) | index);
    rng
}

/// Standard complex normal: real and imaginary parts each `N(0, 1/2)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-random unit vector with canonical global phase.
pub fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| complex_normal(rng));
    operator::canonical_unit_vector(&v).expect("Gaussian vector is nonzero")
}

/// Haar-random unit vector inside the range described by `r`.
pub fn haar_vector_in_range<R: Rng + ?Sized>(r: &RangeRestriction, rng: &mut R) -> CVector {
    let c = CVector::from_fn(r.rank, |_, _| complex_normal(rng));
    operator::canonical_unit_vector(&(&r.basis * c)).expect("Gaussian vector is nonzero")
}

/// Gaussian-unitary-ensemble style Hermitian matrix.
pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    let g = ginibre(dim, dim, rng);
    HermitianOperator::new(operator::symmetrize(&g)).expect("symmetrized matrix is Hermitian")
}

/// Random density operator `AA†/Tr(AA†)` with `A` a `dim × rank` Ginibre
/// matrix; the result has rank `rank` almost surely.
pub fn density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> StateOperator {
    assert!(rank >= 1 && rank <= dim, "rank must lie in 1..=dim");
    let a = ginibre(dim, rank, rng);
    let mut m = &a * a.adjoint();
    let tr = operator::trace(&m).re;
    m.unscale_mut(tr);
    StateOperator::new(m).expect("Wishart matrix is a state")
}

/// Haar-random unitary (QR of a Ginibre matrix with phase-corrected `R`).
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    orthonormal_columns(n, n, rng)
}

/// Random `rows × cols` matrix with orthonormal rows (`cols ≥ rows`).
pub fn isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(cols >= rows, "an isometry needs cols >= rows");
    orthonormal_columns(cols, rows, rng).adjoint()
}

fn orthonormal_columns<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(rows, cols, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..rows {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Uniform draw in `[0, 1)`.
pub fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::max_abs_diff;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream(7, tags::TEST, 3).random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let x: u64 = stream(7, tags::TEST, 3).random();
        let y: u64 = stream(7, tags::TEST, 4).random();
        let z: u64 = stream(8, tags::TEST, 3).random();
        assert_ne!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn unitary_and_isometry_are_orthonormal() {
        let mut rng = stream(1, tags::TEST, 0);
        let u = unitary(4, &mut rng);
        assert!(max_abs_diff(&(&u * u.adjoint()), &CMatrix::identity(4, 4)) < 1e-13);
        let v = isometry(2, 5, &mut rng);
        assert_eq!(v.shape(), (2, 5));
        assert!(max_abs_diff(&(&v * v.adjoint()), &CMatrix::identity(2, 2)) < 1e-13);
    }

    #[test]
    fn density_has_requested_rank() {
        let mut rng = stream(2, tags::TEST, 0);
        for rank in 1..=4 {
            assert_eq!(density(4, rank, &mut rng).rank(), rank);
        }
    }
}
