//! Discrete statistical-weight measures over state operators.
//!
//! A preparation is described by a normalized measure `μ = Σᵢ wᵢ δ_{ρᵢ}`.
//! The canonical form (distinct atoms, sorted) is unique, so two measures are
//! equal exactly when their canonical atom lists agree. The [`barycenter`]
//! `Σᵢ wᵢρᵢ` forgets the atoms: different measures can share a barycenter
//! while remaining distinct as preparations, and single-shot measurement
//! statistics depend on the barycenter only.

use std::cmp::Ordering;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::formats::float17;
use crate::operator::{self, max_abs_diff, HermitianOperator, StateOperator};
use crate::random::{self, tags};
use crate::{CMatrix, Error, Result};

/// States closer than this in max-norm are merged into one atom.
pub const ATOM_MERGE_TOL: f64 = 1e-9;
/// Allowed `|Σ wᵢ − 1|`.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Barycenters closer than this count as equal.
pub const BARYCENTER_TOL: f64 = 1e-9;
/// `|z|` above which a single-shot comparison is flagged.
pub const Z_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct Atom {
    pub weight: f64,
    pub state: StateOperator,
}

/// A normalized discrete measure in canonical form.
#[derive(Debug, Clone)]
pub struct StatisticalWeightMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

fn lexicographic(a: &CMatrix, b: &CMatrix) -> Ordering {
    // row-major, real part before imaginary part
    let n = a.nrows();
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (a[(i, j)], b[(i, j)]);
            let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
            if ord != Ordering::Equal {
                return ord;
            }
        }
    }
    Ordering::Equal
}

/// Builds the canonical measure: zero weights dropped, states within
/// [`ATOM_MERGE_TOL`] merged (weights added, first state kept), weights
/// renormalized, atoms sorted by descending weight then lexicographically by
/// matrix entries.
pub fn make_measure(components: Vec<(f64, StateOperator)>) -> Result<StatisticalWeightMeasure> {
    let dim = components.first().ok_or(Error::EmptyMeasure)?.1.dim();
    let mut atoms: Vec<Atom> = Vec::with_capacity(components.len());
    for (weight, state) in components {
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidWeight { weight });
        }
        if state.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: state.dim(),
            });
        }
        if weight == 0.0 {
            continue;
        }
        match atoms
            .iter_mut()
            .find(|a| max_abs_diff(a.state.matrix(), state.matrix()) <= ATOM_MERGE_TOL)
        {
            Some(a) => a.weight += weight,
            None => atoms.push(Atom { weight, state }),
        }
    }
    if atoms.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let sum: f64 = atoms.iter().map(|a| a.weight).sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum });
    }
    // A sum within a few ulps of one is left alone so that canonicalization
    // is a fixed point.
    if (sum - 1.0).abs() > 16.0 * atoms.len() as f64 * f64::EPSILON {
        atoms.iter_mut().for_each(|a| a.weight /= sum);
    }
    atoms.sort_by(|a, b| {
        b.weight
            .total_cmp(&a.weight)
            .then_with(|| lexicographic(a.state.matrix(), b.state.matrix()))
    });
    Ok(StatisticalWeightMeasure { dim, atoms })
}

impl StatisticalWeightMeasure {
    /// The Dirac measure at `state`.
    pub fn dirac(state: StateOperator) -> Self {
        StatisticalWeightMeasure {
            dim: state.dim(),
            atoms: vec![Atom { weight: 1.0, state }],
        }
    }

    /// The measure placing weight `wₖ` on the projector `|αₖ⟩⟨αₖ|`.
    pub fn from_decomposition(d: &crate::decomposition::Decomposition) -> Result<Self> {
        let components = d
            .components()
            .iter()
            .map(|c| Ok((c.weight, StateOperator::new(operator::outer(&c.vector))?)))
            .collect::<Result<Vec<_>>>()?;
        make_measure(components)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }

    /// The `(weight, state)` pairs, suitable for [`make_measure`].
    pub fn components(&self) -> Vec<(f64, StateOperator)> {
        self.atoms
            .iter()
            .map(|a| (a.weight, a.state.clone()))
            .collect()
    }

    pub fn barycenter(&self) -> StateOperator {
        barycenter(self)
    }

    fn pick_index(&self, u: f64) -> usize {
        pick(self.atoms.iter().map(|a| a.weight), u)
    }
}

/// Index `i` with `Σ_{j<i} p_j ≤ u < Σ_{j≤i} p_j`; the last index absorbs
/// rounding at the top.
fn pick(probabilities: impl Iterator<Item = f64>, u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probabilities.enumerate() {
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// `Σᵢ wᵢρᵢ`.
pub fn barycenter(mu: &StatisticalWeightMeasure) -> StateOperator {
    let mut m = CMatrix::zeros(mu.dim, mu.dim);
    for a in &mu.atoms {
        m += a.state.matrix().scale(a.weight);
    }
    StateOperator::new(m).expect("convex combination of states is a state")
}

/// `Σᵢ wᵢ Tr(ρᵢA)`.
pub fn measure_expectation(mu: &StatisticalWeightMeasure, a: &HermitianOperator) -> Result<f64> {
    mu.atoms
        .iter()
        .map(|atom| Ok(atom.weight * atom.state.expectation(a)?))
        .sum()
}

/// True iff the canonical atoms pair up one-to-one with weights and states
/// (max-norm) within `tol`.
pub fn measures_equal(m1: &StatisticalWeightMeasure, m2: &StatisticalWeightMeasure, tol: f64) -> bool {
    if m1.dim != m2.dim || m1.atoms.len() != m2.atoms.len() {
        return false;
    }
    let mut used = vec![false; m2.atoms.len()];
    m1.atoms.iter().all(|a| {
        let hit = m2.atoms.iter().enumerate().position(|(i, b)| {
            !used[i]
                && (a.weight - b.weight).abs() <= tol
                && a.state.distance(&b.state) <= tol
        });
        hit.map(|i| used[i] = true).is_some()
    })
}

/// Draws one atom of `mu`, atom `i` with probability `wᵢ`.
pub fn sample_preparation(mu: &StatisticalWeightMeasure, seed: u64) -> &StateOperator {
    let mut rng = random::stream(seed, tags::PREPARATION, 0);
    &mu.atoms[mu.pick_index(random::uniform(&mut rng))].state
}

/// Atom indices of `n` independent preparations.
pub fn sample_preparations(mu: &StatisticalWeightMeasure, n: usize, seed: u64) -> Vec<usize> {
    let mut rng = random::stream(seed, tags::PREPARATION, 1);
    (0..n)
        .map(|_| mu.pick_index(random::uniform(&mut rng)))
        .collect()
}

/// A projective measurement of an observable: distinct eigenvalues
/// (descending, degenerate ones grouped) and the eigenvectors spanning each
/// eigenspace.
#[derive(Debug, Clone)]
pub struct ProjectiveMeasurement {
    pub outcomes: Vec<f64>,
    eigenspaces: Vec<CMatrix>,
}

impl ProjectiveMeasurement {
    pub fn new(a: &HermitianOperator) -> Result<Self> {
        let eig = a.eig()?;
        let scale = eig.values.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
        let gap = 1e-10 * scale;
        let mut outcomes = Vec::new();
        let mut eigenspaces = Vec::new();
        let mut start = 0;
        while start < eig.dim() {
            let mut end = start + 1;
            while end < eig.dim() && eig.values[end - 1] - eig.values[end] <= gap {
                end += 1;
            }
            let mean = eig.values[start..end].iter().sum::<f64>() / (end - start) as f64;
            outcomes.push(mean);
            eigenspaces.push(eig.vectors.columns(start, end - start).into_owned());
            start = end;
        }
        Ok(ProjectiveMeasurement {
            outcomes,
            eigenspaces,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenspaces[0].nrows()
    }

    /// Born probabilities `Tr(ρΠⱼ)`, clamped at zero and normalized.
    pub fn probabilities(&self, s: &StateOperator) -> Result<Vec<f64>> {
        if s.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: s.dim(),
                right: self.dim(),
            });
        }
        let raw: Vec<f64> = self
            .eigenspaces
            .iter()
            .map(|v| {
                let block = v.adjoint() * s.matrix() * v;
                operator::trace(&block).re.max(0.0)
            })
            .collect();
        let sum: f64 = raw.iter().sum();
        Ok(raw.into_iter().map(|p| p / sum).collect())
    }
}

/// Measures `a` once on `s`: returns the outcome eigenvalue and its index in
/// [`ProjectiveMeasurement::outcomes`].
pub fn sample_projective(s: &StateOperator, a: &HermitianOperator, seed: u64) -> Result<(f64, usize)> {
    let m = ProjectiveMeasurement::new(a)?;
    let probs = m.probabilities(s)?;
    let mut rng = random::stream(seed, tags::PROJECTIVE, 0);
    let j = pick(probs.iter().copied(), random::uniform(&mut rng));
    Ok((m.outcomes[j], j))
}

/// One row of a single-shot experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleShotRow {
    pub observable_id: usize,
    pub outcome: usize,
    /// Count under the first (or only) measure.
    pub count: u64,
    /// Count under the second measure in a comparison.
    pub count_other: Option<u64>,
    /// Exact probability from the barycenter.
    pub expected_probability: f64,
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleShotReport {
    pub trials: usize,
    pub observables: usize,
    pub rows: Vec<SingleShotRow>,
    pub max_abs_z: f64,
    /// True iff every `|z| ≤` [`Z_THRESHOLD`].
    pub consistent: bool,
}

impl SingleShotReport {
    fn new(trials: usize, observables: usize, rows: Vec<SingleShotRow>) -> Self {
        let max_abs_z = rows.iter().fold(0.0_f64, |acc, r| acc.max(r.z_score.abs()));
        SingleShotReport {
            trials,
            observables,
            rows,
            max_abs_z,
            consistent: max_abs_z <= Z_THRESHOLD,
        }
    }

    /// CSV with columns `observable_id,outcome,count,expected_probability,z_score`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "observable_id,outcome,count,expected_probability,z_score")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.observable_id,
                r.outcome,
                r.count,
                float17(r.expected_probability),
                float17(r.z_score)
            )?;
        }
        Ok(())
    }
}

/// Outcome counts of `trials` prepare-then-measure rounds.
fn prepare_and_measure<R: Rng>(
    mu: &StatisticalWeightMeasure,
    born: &[Vec<f64>],
    trials: usize,
    rng: &mut R,
) -> Vec<u64> {
    let mut counts = vec![0u64; born[0].len()];
    for _ in 0..trials {
        let atom = mu.pick_index(random::uniform(rng));
        let j = pick(born[atom].iter().copied(), random::uniform(rng));
        counts[j] += 1;
    }
    counts
}

fn born_tables(mu: &StatisticalWeightMeasure, m: &ProjectiveMeasurement) -> Result<Vec<Vec<f64>>> {
    mu.atoms.iter().map(|a| m.probabilities(&a.state)).collect()
}

/// Random observables `A₀ … A_{n−1}` used by single-shot experiments.
pub fn random_observables(dim: usize, n: usize, seed: u64) -> Vec<HermitianOperator> {
    (0..n)
        .map(|i| random::hermitian(dim, &mut random::stream(seed, tags::OBSERVABLES, i as u64)))
        .collect()
}

fn two_sample_z(c1: u64, c2: u64, p: f64, trials: usize) -> f64 {
    let var = 2.0 * trials as f64 * p * (1.0 - p);
    if var > 0.0 {
        (c1 as f64 - c2 as f64) / var.sqrt()
    } else if c1 == c2 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn one_sample_z(c: u64, p: f64, trials: usize) -> f64 {
    let n = trials as f64;
    let var = n * p * (1.0 - p);
    if var > 0.0 {
        (c as f64 - n * p) / var.sqrt()
    } else if (c as f64 - n * p).abs() < 0.5 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Prepare-then-measure on `mu` for `observables` random observables,
/// `trials` rounds each; z-scores against the exact barycenter
/// probabilities.
pub fn single_shot_experiment(
    mu: &StatisticalWeightMeasure,
    trials: usize,
    observables: usize,
    seed: u64,
) -> Result<SingleShotReport> {
    let bary = mu.barycenter();
    let obs = random_observables(mu.dim, observables, seed);
    let per_obs: Vec<Vec<SingleShotRow>> = obs
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let m = ProjectiveMeasurement::new(a)?;
            let exact = m.probabilities(&bary)?;
            let born = born_tables(mu, &m)?;
            let mut rng = random::stream(seed, tags::SINGLE_SHOT, 2 * i as u64);
            let counts = prepare_and_measure(mu, &born, trials, &mut rng);
            Ok((0..exact.len())
                .map(|j| SingleShotRow {
                    observable_id: i,
                    outcome: j,
                    count: counts[j],
                    count_other: None,
                    expected_probability: exact[j],
                    z_score: one_sample_z(counts[j], exact[j], trials),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(SingleShotReport::new(
        trials,
        observables,
        per_obs.into_iter().flatten().collect(),
    ))
}

/// Runs the same single-shot experiment on two measures with equal
/// barycenters and reports two-sample z-scores per outcome.
pub fn single_shot_indistinguishable(
    m1: &StatisticalWeightMeasure,
    m2: &StatisticalWeightMeasure,
    trials: usize,
    observables: usize,
    seed: u64,
) -> Result<SingleShotReport> {
    if m1.dim != m2.dim {
        return Err(Error::DimensionMismatch {
            left: m1.dim,
            right: m2.dim,
        });
    }
    let b1 = m1.barycenter();
    let gap = b1.distance(&m2.barycenter());
    if gap > BARYCENTER_TOL {
        return Err(Error::BarycentersDiffer { gap });
    }
    let obs = random_observables(m1.dim, observables, seed);
    let per_obs: Vec<Vec<SingleShotRow>> = obs
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let m = ProjectiveMeasurement::new(a)?;
            let exact = m.probabilities(&b1)?;
            let mut rng1 = random::stream(seed, tags::SINGLE_SHOT, 2 * i as u64);
            let mut rng2 = random::stream(seed, tags::SINGLE_SHOT, 2 * i as u64 + 1);
            let c1 = prepare_and_measure(m1, &born_tables(m1, &m)?, trials, &mut rng1);
            let c2 = prepare_and_measure(m2, &born_tables(m2, &m)?, trials, &mut rng2);
            Ok((0..exact.len())
                .map(|j| SingleShotRow {
                    observable_id: i,
                    outcome: j,
                    count: c1[j],
                    count_other: Some(c2[j]),
                    expected_probability: exact[j],
                    z_score: two_sample_z(c1[j], c2[j], exact[j], trials),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(SingleShotReport::new(
        trials,
        observables,
        per_obs.into_iter().flatten().collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::park_qubit_example;

    fn basis(i: usize) -> StateOperator {
        let mut p = vec![0.0; 2];
        p[i] = 1.0;
        StateOperator::from_diagonal(&p).unwrap()
    }

    fn park_measures() -> (StatisticalWeightMeasure, StatisticalWeightMeasure) {
        let ex = park_qubit_example(0.25).unwrap();
        (
            StatisticalWeightMeasure::from_decomposition(&ex.spectral).unwrap(),
            StatisticalWeightMeasure::from_decomposition(&ex.alternative).unwrap(),
        )
    }

    /// Binomial 3σ band.
    fn within_3_sigma(count: usize, n: usize, p: f64) -> bool {
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        (count as f64 - n as f64 * p).abs() <= 3.0 * sigma
    }

    #[test]
    fn make_measure_examples() {
        let mu = make_measure(vec![(0.5, basis(0)), (0.5, basis(1))]).unwrap();
        assert_eq!(mu.weights(), vec![0.5, 0.5]);

        let mu = make_measure(vec![(0.5, basis(0)), (0.5, basis(0))]).unwrap();
        assert_eq!(mu.atoms().len(), 1);
        assert_eq!(mu.weights(), vec![1.0]);

        let err = make_measure(vec![(0.3, basis(0)), (0.7001, basis(1))]).unwrap_err();
        assert_eq!(err.kind(), "NotNormalized");
        assert_eq!(make_measure(vec![]).unwrap_err().kind(), "EmptyMeasure");
        assert_eq!(
            make_measure(vec![(1.0, basis(0)), (0.0, basis(1)), (0.0, StateOperator::maximally_mixed(3))])
                .unwrap_err()
                .kind(),
            "DimensionMismatch"
        );
        assert_eq!(make_measure(vec![(0.0, basis(0))]).unwrap_err().kind(), "EmptyMeasure");
        assert_eq!(
            make_measure(vec![(-0.5, basis(0)), (1.5, basis(1))]).unwrap_err().kind(),
            "InvalidWeight"
        );
    }

    #[test]
    fn zero_weights_are_dropped() {
        let mu = make_measure(vec![(0.0, basis(1)), (1.0, basis(0))]).unwrap();
        assert_eq!(mu.atoms().len(), 1);
    }

    #[test]
    fn barycenter_examples() {
        let rho = StateOperator::from_diagonal(&[0.75, 0.25]).unwrap();
        assert_eq!(StatisticalWeightMeasure::dirac(rho.clone()).barycenter().distance(&rho), 0.0);
        let half = make_measure(vec![(0.5, basis(0)), (0.5, basis(1))]).unwrap();
        assert!(half.barycenter().distance(&StateOperator::maximally_mixed(2)) < 1e-15);
        let (spectral, alternative) = park_measures();
        assert!(spectral.barycenter().distance(&rho) < 1e-15);
        assert!(alternative.barycenter().distance(&rho) < 1e-15);
    }

    #[test]
    fn expectation_examples() {
        let (spectral, alternative) = park_measures();
        let a = HermitianOperator::diagonal(&[0.0, 1.0]);
        assert!((measure_expectation(&spectral, &a).unwrap() - 0.25).abs() < 1e-15);
        // 3/8 · 1/2 + 5/8 · 1/10
        assert!((measure_expectation(&alternative, &a).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn equality_examples() {
        let (spectral, alternative) = park_measures();
        assert!(!measures_equal(&spectral, &alternative, 1e-9));
        let r1 = StateOperator::from_diagonal(&[0.75, 0.25]).unwrap();
        let r2 = StateOperator::maximally_mixed(2);
        let a = make_measure(vec![(0.5, r1.clone()), (0.5, r2.clone())]).unwrap();
        let b = make_measure(vec![(0.5, r2), (0.5, r1)]).unwrap();
        assert!(measures_equal(&a, &b, 1e-12));
        assert!(measures_equal(&spectral, &spectral, 0.0));
    }

    #[test]
    fn canonical_form_is_a_fixed_point() {
        let (_, alternative) = park_measures();
        let again = make_measure(alternative.components()).unwrap();
        assert_eq!(again.weights(), alternative.weights());
        for (x, y) in again.atoms().iter().zip(alternative.atoms()) {
            assert_eq!(x.state.matrix(), y.state.matrix());
        }
    }

    #[test]
    fn sampling_examples() {
        let rho = StateOperator::from_diagonal(&[0.75, 0.25]).unwrap();
        let dirac = StatisticalWeightMeasure::dirac(rho.clone());
        for seed in 0..10 {
            assert_eq!(sample_preparation(&dirac, seed).distance(&rho), 0.0);
        }
        let n = 100_000;
        let half = make_measure(vec![(0.5, basis(0)), (0.5, basis(1))]).unwrap();
        let draws = sample_preparations(&half, n, 1);
        assert!(within_3_sigma(draws.iter().filter(|&&i| i == 0).count(), n, 0.5));

        let (spectral, _) = park_measures();
        let draws = sample_preparations(&spectral, n, 2);
        assert_eq!(spectral.weights(), vec![0.75, 0.25]);
        assert!(within_3_sigma(draws.iter().filter(|&&i| i == 0).count(), n, 0.75));
        assert_eq!(sample_preparations(&spectral, 50, 3), sample_preparations(&spectral, 50, 3));
    }

    #[test]
    fn projective_examples() {
        let a = HermitianOperator::diagonal(&[0.0, 1.0]);
        for seed in 0..20 {
            let (value, _) = sample_projective(&basis(0), &a, seed).unwrap();
            assert_eq!(value, 0.0);
        }
        let m = ProjectiveMeasurement::new(&HermitianOperator::pauli_z()).unwrap();
        let probs = m.probabilities(&StateOperator::maximally_mixed(2)).unwrap();
        assert_eq!(probs, vec![0.5, 0.5]);
        let n = 100_000;
        let ups = (0..n as u64)
            .filter(|&s| sample_projective(&StateOperator::maximally_mixed(2), &HermitianOperator::pauli_z(), s).unwrap().0 > 0.0)
            .count();
        assert!(within_3_sigma(ups, n, 0.5));

        let m = ProjectiveMeasurement::new(&a).unwrap();
        let probs = m.probabilities(&StateOperator::from_diagonal(&[0.75, 0.25]).unwrap()).unwrap();
        // outcomes descending: [1, 0]
        assert_eq!(m.outcomes, vec![1.0, 0.0]);
        assert!((probs[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn degenerate_outcomes_are_grouped() {
        let a = HermitianOperator::diagonal(&[1.0, 1.0, 0.0]);
        let m = ProjectiveMeasurement::new(&a).unwrap();
        assert_eq!(m.outcomes, vec![1.0, 0.0]);
        let probs = m.probabilities(&StateOperator::maximally_mixed(3)).unwrap();
        assert!((probs[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_shot_examples() {
        let (spectral, alternative) = park_measures();
        let r = single_shot_indistinguishable(&spectral, &alternative, 100_000, 10, 0).unwrap();
        assert_eq!(r.rows.len(), 20);
        assert!(r.consistent, "max |z| = {}", r.max_abs_z);

        let r = single_shot_indistinguishable(&spectral, &spectral, 20_000, 10, 1).unwrap();
        assert!(r.max_abs_z <= 4.0);

        let a = StatisticalWeightMeasure::dirac(basis(0));
        let b = StatisticalWeightMeasure::dirac(basis(1));
        assert_eq!(
            single_shot_indistinguishable(&a, &b, 10, 1, 0).unwrap_err().kind(),
            "BarycentersDiffer"
        );
    }

    #[test]
    fn single_shot_report_csv() {
        let (spectral, _) = park_measures();
        let r = single_shot_experiment(&spectral, 1000, 2, 5).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "observable_id,outcome,count,expected_probability,z_score");
        assert_eq!(lines.count(), 4);
    }
}
