//! Entropies and canonical states.
//!
//! Entropies use the natural logarithm and are reported in units of `k_B`.
//! The canonical state `exp(−βH)/Tr exp(−βH)` is built in the eigenbasis of
//! `H` with the exponent shifted by the extreme eigenvalue, so no
//! intermediate overflows for any finite `β`.

use crate::measure::StatisticalWeightMeasure;
use crate::operator::{rebuild, EigenSystem, HermitianOperator, StateOperator};
use crate::{Error, Result};

/// `−Σ λ ln λ` over the spectrum, with `0 ln 0 = 0`.
pub fn von_neumann_entropy(s: &StateOperator) -> f64 {
    let h: f64 = s
        .eigenvalues()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum();
    h.max(0.0)
}

/// `−Σ wᵢ ln wᵢ`, with `0 ln 0 = 0`.
pub fn shannon_entropy(weights: &[f64]) -> Result<f64> {
    if let Some(&weight) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidWeight { weight });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { sum });
    }
    Ok(weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * w.ln())
        .sum::<f64>()
        .max(0.0))
}

/// The canonical family `β ↦ exp(−βH)/Z` of one Hamiltonian.
#[derive(Debug, Clone)]
pub struct Gibbs {
    eigen: EigenSystem,
}

impl Gibbs {
    pub fn new(h: &HermitianOperator) -> Result<Self> {
        Ok(Gibbs { eigen: h.eig()? })
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn min_energy(&self) -> f64 {
        *self.eigen.values.last().expect("non-empty")
    }

    pub fn max_energy(&self) -> f64 {
        self.eigen.values[0]
    }

    /// Occupation probabilities in the eigenbasis (descending energies).
    pub fn populations(&self, beta: f64) -> Vec<f64> {
        populations(&self.eigen.values, beta)
    }

    /// `Tr(H ρ_β)`.
    pub fn energy(&self, beta: f64) -> f64 {
        self.populations(beta)
            .iter()
            .zip(&self.eigen.values)
            .map(|(p, e)| p * e)
            .sum()
    }

    pub fn state(&self, beta: f64) -> Result<StateOperator> {
        let p = self.populations(beta);
        StateOperator::new(rebuild(&self.eigen.vectors, &p))
    }

    /// Inverse temperature whose canonical state has mean energy `target`.
    pub fn solve_beta(&self, target: f64) -> Result<f64> {
        let (min, max) = (self.min_energy(), self.max_energy());
        let scale = min.abs().max(max.abs()).max(1.0);
        if max - min <= 1e-12 * scale {
            return Err(Error::DegenerateHamiltonian);
        }
        if !(target > min && target < max) {
            return Err(Error::EnergyOutOfRange {
                energy: target,
                min,
                max,
            });
        }
        let f = |beta: f64| self.energy(beta) - target;
        let f0 = f(0.0);
        if f0 == 0.0 {
            return Ok(0.0);
        }

        // energy(β) decreases strictly: find lo < hi with f(lo) > 0 > f(hi)
        let (mut lo, mut hi) = if f0 > 0.0 { (0.0, 1.0) } else { (-1.0, 0.0) };
        let mut doublings = 0;
        while f(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 1100 || !hi.is_finite() {
                return Err(Error::BetaNotBracketed { energy: target });
            }
        }
        while f(lo) < 0.0 {
            hi = lo;
            lo *= 2.0;
            doublings += 1;
            if doublings > 1100 || !lo.is_finite() {
                return Err(Error::BetaNotBracketed { energy: target });
            }
        }

        let stop = 1e-15 * (max - min);
        let (mut f_lo, mut f_hi) = (f(lo), f(hi));
        let mut best = if f_lo.abs() < f_hi.abs() { lo } else { hi };
        // Illinois variant of regula falsi once the bracket is narrow,
        // bisection before that.
        let mut side = 0i8;
        for _ in 0..400 {
            let width = hi - lo;
            if width <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
                break;
            }
            let c = if width < 1e-3 {
                let c = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
                if c > lo && c < hi {
                    c
                } else {
                    0.5 * (lo + hi)
                }
            } else {
                0.5 * (lo + hi)
            };
            let fc = f(c);
            best = c;
            if fc.abs() <= stop {
                break;
            }
            if fc > 0.0 {
                lo = c;
                f_lo = fc;
                if side == 1 {
                    f_hi *= 0.5;
                }
                side = 1;
            } else {
                hi = c;
                f_hi = fc;
                if side == -1 {
                    f_lo *= 0.5;
                }
                side = -1;
            }
        }
        Ok(best)
    }
}

fn populations(energies: &[f64], beta: f64) -> Vec<f64> {
    // shift by the extreme energy that makes every exponent ≤ 0
    let reference = if beta >= 0.0 {
        energies.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        energies.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    let weights: Vec<f64> = energies
        .iter()
        .map(|&e| (-beta * (e - reference)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

/// `exp(−βH)/Tr exp(−βH)`.
pub fn canonical_state(h: &HermitianOperator, beta: f64) -> Result<StateOperator> {
    if !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: format!("{beta} is not finite"),
        });
    }
    Gibbs::new(h)?.state(beta)
}

/// `β` with `Tr(H · canonical_state(H, β)) = energy`.
pub fn solve_beta(h: &HermitianOperator, energy: f64) -> Result<f64> {
    Gibbs::new(h)?.solve_beta(energy)
}

/// Entropy bookkeeping of a preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    /// `Σwᵢ S(ρᵢ) + H(w)`: intrinsic plus extrinsic uncertainty.
    pub total: f64,
    /// `S(Σwᵢρᵢ)`.
    pub barycenter_entropy: f64,
    /// `Σwᵢ S(ρᵢ)`.
    pub mean_component_entropy: f64,
    /// `H(w)`.
    pub mixing_shannon: f64,
}

impl EntropyReport {
    /// `Σwᵢ S(ρᵢ) − tol ≤ S(W̄) ≤ Σwᵢ S(ρᵢ) + H(w) + tol`.
    pub fn bracket_holds(&self, tol: f64) -> bool {
        self.barycenter_entropy >= self.mean_component_entropy - tol
            && self.barycenter_entropy <= self.total + tol
    }
}

pub fn entropy_report(mu: &StatisticalWeightMeasure) -> EntropyReport {
    let mean_component_entropy = mu
        .atoms()
        .iter()
        .map(|a| a.weight * von_neumann_entropy(&a.state))
        .sum();
    let mixing_shannon = shannon_entropy(&mu.weights()).expect("measure weights are normalized");
    EntropyReport {
        total: mean_component_entropy + mixing_shannon,
        barycenter_entropy: von_neumann_entropy(&mu.barycenter()),
        mean_component_entropy,
        mixing_shannon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::park_qubit_example;
    use crate::measure::make_measure;
    use crate::operator::{commutator, max_abs};
    use crate::random::{self, stream, tags};

    const LN3: f64 = 1.098_612_288_668_109_8;

    #[test]
    fn von_neumann_examples() {
        let pure = StateOperator::from_diagonal(&[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(von_neumann_entropy(&pure), 0.0);
        let half = StateOperator::maximally_mixed(2);
        assert!((von_neumann_entropy(&half) - 2f64.ln()).abs() < 1e-15);
        let park = StateOperator::from_diagonal(&[0.75, 0.25]).unwrap();
        let direct = -(0.75 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert!((von_neumann_entropy(&park) - direct).abs() < 1e-15);
        assert!((von_neumann_entropy(&park) - 0.562335).abs() < 1e-6);
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&[1.0]).unwrap(), 0.0);
        assert!((shannon_entropy(&[0.5, 0.5]).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((shannon_entropy(&[0.375, 0.625]).unwrap() - 0.661563).abs() < 1e-6);
        assert_eq!(shannon_entropy(&[0.5, 0.6]).unwrap_err().kind(), "NotNormalized");
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn canonical_examples() {
        let mut rng = stream(21, tags::TEST, 0);
        let h = random::hermitian(4, &mut rng);
        let s = canonical_state(&h, 0.0).unwrap();
        assert!(s.distance(&StateOperator::maximally_mixed(4)) < 1e-14);

        let h = HermitianOperator::diagonal(&[0.0, 1.0]);
        let s = canonical_state(&h, LN3).unwrap();
        assert!(s.distance(&StateOperator::from_diagonal(&[0.75, 0.25]).unwrap()) <= 1e-12);

        let s = canonical_state(&h, 1e3).unwrap();
        assert!(s.distance(&StateOperator::from_diagonal(&[1.0, 0.0]).unwrap()) <= 1e-9);
        // negative temperature, no overflow
        let s = canonical_state(&h, -1e3).unwrap();
        assert!(s.distance(&StateOperator::from_diagonal(&[0.0, 1.0]).unwrap()) <= 1e-9);
    }

    #[test]
    fn canonical_commutes_with_h() {
        let mut rng = stream(22, tags::TEST, 0);
        for _ in 0..10 {
            let h = random::hermitian(5, &mut rng);
            let s = canonical_state(&h, 0.7).unwrap();
            assert!(max_abs(&commutator(h.matrix(), s.matrix())) <= 1e-10);
        }
    }

    #[test]
    fn solve_beta_examples() {
        let h = HermitianOperator::diagonal(&[0.0, 1.0]);
        assert_eq!(solve_beta(&h, 0.5).unwrap(), 0.0);
        assert!((solve_beta(&h, 0.25).unwrap() - LN3).abs() < 1e-10);
        assert!((solve_beta(&h, 0.75).unwrap() + LN3).abs() < 1e-10);
        assert_eq!(solve_beta(&h, 1.5).unwrap_err().kind(), "EnergyOutOfRange");
        assert_eq!(solve_beta(&h, 0.0).unwrap_err().kind(), "EnergyOutOfRange");
        assert_eq!(
            solve_beta(&HermitianOperator::identity(3), 1.0).unwrap_err().kind(),
            "DegenerateHamiltonian"
        );
    }

    #[test]
    fn solve_beta_inverts_energy() {
        let mut rng = stream(23, tags::TEST, 0);
        for i in 0..50 {
            let h = random::hermitian(2 + i % 6, &mut rng);
            let g = Gibbs::new(&h).unwrap();
            let beta = 4.0 * random::uniform(&mut rng) - 2.0;
            let e = g.energy(beta);
            let span = g.max_energy() - g.min_energy();
            let back = g.solve_beta(e).unwrap();
            assert!((back - beta).abs() <= 1e-8, "beta {beta} -> {back}");
            assert!((g.energy(back) - e).abs() <= 1e-10 * span);
        }
    }

    #[test]
    fn energy_strictly_decreasing() {
        let mut rng = stream(24, tags::TEST, 0);
        for _ in 0..10 {
            let g = Gibbs::new(&random::hermitian(4, &mut rng)).unwrap();
            let grid: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.25).collect();
            assert!(grid.windows(2).all(|w| g.energy(w[0]) > g.energy(w[1])));
        }
    }

    #[test]
    fn entropy_report_examples() {
        let pure = StateOperator::from_diagonal(&[1.0, 0.0]).unwrap();
        let r = entropy_report(&StatisticalWeightMeasure::dirac(pure.clone()));
        assert_eq!(r.total, 0.0);
        assert_eq!(r.barycenter_entropy, 0.0);
        assert_eq!(r.mixing_shannon, 0.0);

        let one = StateOperator::from_diagonal(&[0.0, 1.0]).unwrap();
        let r = entropy_report(&make_measure(vec![(0.5, pure), (0.5, one)]).unwrap());
        assert!((r.barycenter_entropy - 2f64.ln()).abs() < 1e-15);
        assert_eq!(r.mean_component_entropy, 0.0);
        assert!((r.mixing_shannon - 2f64.ln()).abs() < 1e-15);
        assert!(r.bracket_holds(1e-12));

        let ex = park_qubit_example(0.25).unwrap();
        let mu = StatisticalWeightMeasure::from_decomposition(&ex.alternative).unwrap();
        let r = entropy_report(&mu);
        assert!((r.barycenter_entropy - 0.562335).abs() < 1e-6);
        assert!(r.mean_component_entropy.abs() < 1e-12);
        assert!((r.mixing_shannon - 0.661563).abs() < 1e-6);
        assert!(r.barycenter_entropy < r.total - 0.09);
    }
}
