//! End-to-end reproduction of the worked examples.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rand::Rng;

use crate::coins::{self, CoinPreparation};
use crate::decomposition::{
    complete_from_vector, complete_from_vector_seeded, decompositions_distinct, hjw_decomposition,
    park_qubit_example, reconstruct, spectral_decomposition, Decomposition, Isometry,
};
use crate::equilibrium::{canonical_state, entropy_report, shannon_entropy, solve_beta, von_neumann_entropy};
use crate::formats::{self, float17, DecompositionJson, OperatorJson};
use crate::measure::{make_measure, measure_expectation, measures_equal, random_observables, StatisticalWeightMeasure};
use crate::operator::{max_abs_diff, HermitianOperator, StateOperator};
use crate::random::{self, tags};
use crate::sea::{asymptote_check, sea_evolve, SeaConfig, Trajectory};
use crate::{CMatrix, CVector, Error, Result, C64};

use super::ParkBundleJson;

/// Groups of checks that can be skipped with `--skip`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoGroup {
    Park,
    Weights,
    Ambiguity,
    Coins,
    Canonical,
    Sea,
    Entropy,
    Determinism,
}

impl DemoGroup {
    fn id(self) -> &'static str {
        match self {
            DemoGroup::Park => "AC1",
            DemoGroup::Weights => "AC2",
            DemoGroup::Ambiguity => "AC3",
            DemoGroup::Coins => "AC4",
            DemoGroup::Canonical => "AC5",
            DemoGroup::Sea => "AC6",
            DemoGroup::Entropy => "AC7",
            DemoGroup::Determinism => "AC8",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoStatus {
    Pass,
    Fail,
    Skipped,
}

impl DemoStatus {
    fn label(self) -> &'static str {
        match self {
            DemoStatus::Pass => "pass",
            DemoStatus::Fail => "FAIL",
            DemoStatus::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoCheck {
    /// Criterion identifier, `AC1` … `AC8`.
    pub id: &'static str,
    pub group: DemoGroup,
    pub name: &'static str,
    pub status: DemoStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct DemoOptions {
    pub seed: u64,
    pub skip: Vec<DemoGroup>,
    /// Extra density operators (`*.json`) for the ambiguity witness.
    pub input_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct DemoReport {
    pub checks: Vec<DemoCheck>,
    /// `(file name, contents)` written by [`DemoReport::write_artifacts`].
    pub artifacts: Vec<(String, String)>,
}

impl DemoReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != DemoStatus::Fail)
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut s = String::new();
        let _ = writeln!(s, "{:<4} {:<7} {:<width$} detail", "id", "status", "check");
        for c in &self.checks {
            let line = format!("{:<4} {:<7} {:<width$} {}", c.id, c.status.label(), c.name, c.detail);
            let _ = writeln!(s, "{}", line.trim_end());
        }
        let failed = self.checks.iter().filter(|c| c.status == DemoStatus::Fail).count();
        let _ = writeln!(s, "{} checks, {failed} failed", self.checks.len());
        s
    }

    /// Writes `report.txt` and every artifact into `dir`.
    pub fn write_artifacts(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
        formats::write_text(&dir.join("report.txt"), &self.table())?;
        for (name, text) in &self.artifacts {
            formats::write_text(&dir.join(name), text)?;
        }
        Ok(())
    }
}

struct Builder {
    skip: Vec<DemoGroup>,
    checks: Vec<DemoCheck>,
    artifacts: Vec<(String, String)>,
}

impl Builder {
    fn skipped(&self, group: DemoGroup) -> bool {
        self.skip.contains(&group)
    }

    fn push(&mut self, group: DemoGroup, name: &'static str, outcome: Result<(bool, String)>) -> Result<()> {
        let (status, detail) = if self.skipped(group) {
            (DemoStatus::Skipped, String::new())
        } else {
            match outcome {
                Ok((true, d)) => (DemoStatus::Pass, d),
                Ok((false, d)) => (DemoStatus::Fail, d),
                Err(e @ (Error::ParseError(_) | Error::Io(_))) => return Err(e),
                Err(e) => (DemoStatus::Fail, format!("error[{}]: {e}", e.kind())),
            }
        };
        self.checks.push(DemoCheck {
            id: group.id(),
            group,
            name,
            status,
            detail,
        });
        Ok(())
    }

    /// Runs `f` unless `group` is skipped.
    fn run(
        &mut self,
        group: DemoGroup,
        name: &'static str,
        f: impl FnOnce(&mut Vec<(String, String)>) -> Result<(bool, String)>,
    ) -> Result<()> {
        let outcome = if self.skipped(group) {
            Ok((true, String::new()))
        } else {
            f(&mut self.artifacts)
        };
        self.push(group, name, outcome)
    }
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

/// Runs every check. File errors in `input_dir` abort with the error; every
/// other failure becomes a failed row.
pub fn demo_all(opts: &DemoOptions) -> Result<DemoReport> {
    let extra = match &opts.input_dir {
        Some(dir) => load_input_dir(dir, opts)?,
        None => Vec::new(),
    };
    let seed = opts.seed;
    let mut b = Builder {
        skip: opts.skip.clone(),
        checks: Vec::new(),
        artifacts: Vec::new(),
    };

    b.run(DemoGroup::Park, "park example exactness", |art| {
        let ex = park_qubit_example(0.25)?;
        let target = StateOperator::from_diagonal(&[0.75, 0.25])?;
        let want = CVector::from_vec(vec![C64::new(3.0, 0.0), C64::new(-1.0, 0.0)]).unscale(10f64.sqrt());
        let overlap = ex.alternative.components()[1].vector.dotc(&want).norm();
        let r1 = reconstruct(&ex.spectral)?.distance(&target);
        let r2 = reconstruct(&ex.alternative)?.distance(&target);
        let ok = (ex.a - 2.0).abs() <= 1e-12
            && (ex.w - 0.375).abs() <= 1e-12
            && (overlap - 1.0).abs() <= 1e-12
            && r1 <= 1e-12
            && r2 <= 1e-12;
        let bundle = ParkBundleJson {
            p: ex.p,
            a: ex.a,
            w: ex.w,
            spectral: DecompositionJson::from_decomposition(&ex.spectral),
            alternative: DecompositionJson::from_decomposition(&ex.alternative),
        };
        art.push(("park.json".into(), formats::to_json_string(&bundle)));
        Ok((ok, format!("a={} w={} residuals {} {}", ex.a, ex.w, sci(r1), sci(r2))))
    })?;

    b.run(DemoGroup::Weights, "weight formula identity", |_| weight_identity(seed))?;
    b.run(DemoGroup::Ambiguity, "ambiguity witness", |_| ambiguity(seed, &extra))?;

    b.run(DemoGroup::Coins, "single-toss marginal", |_| {
        let n = 100_000;
        let est = coins::single_toss_frequency(&CoinPreparation::opposite_bias(), n, seed)?;
        let sigma = (0.25 / n as f64).sqrt();
        let z = (est.p_hat - 0.5) / sigma;
        Ok((z.abs() <= 3.0, format!("p_hat={} z={:.3}", est.p_hat, z)))
    })?;
    b.run(DemoGroup::Coins, "repeated tosses discover the trick", |art| {
        let prep = CoinPreparation::opposite_bias();
        let c = coins::repeated_toss_classify(&prep, 50, 100_000, seed)?;
        let test = coins::distinguish_boxes(&prep, &CoinPreparation::fair(), 50, 10_000, seed)?;
        art.push((
            "coins.json".into(),
            formats::to_json_string(&super::CoinsSummaryJson {
                p_hat: prep.head_probability(),
                stderr: 0.0,
                accuracy: Some(c.accuracy),
                log_lr: Some(test.statistic),
                decision: Some(test.decision.label().into()),
            }),
        ));
        Ok((
            c.accuracy >= 0.99,
            format!("k=50 accuracy={} box test {}", c.accuracy, test.decision.label()),
        ))
    })?;

    b.run(DemoGroup::Canonical, "canonical state of diag(0,1)", |_| {
        let h = HermitianOperator::diagonal(&[0.0, 1.0]);
        let rho = canonical_state(&h, 3f64.ln())?;
        let gap = rho.distance(&StateOperator::from_diagonal(&[0.75, 0.25])?);
        let beta = solve_beta(&h, 0.25)?;
        let err = (beta - 3f64.ln()).abs();
        Ok((gap <= 1e-12 && err <= 1e-8, format!("state gap {} beta error {}", sci(gap), sci(err))))
    })?;
    b.run(DemoGroup::Canonical, "maximum-entropy dominance", |_| dominance(seed))?;

    b.run(DemoGroup::Sea, "relaxation from diag(0.9,0.1)", |_| {
        let h = HermitianOperator::diagonal(&[0.0, 1.0]);
        let rho = StateOperator::from_diagonal(&[0.9, 0.1])?;
        relaxation_check(&rho, &h)
    })?;
    b.run(DemoGroup::Sea, "relaxation of a coherent qubit", |art| {
        let h = HermitianOperator::diagonal(&[0.0, 1.0]);
        let rho = StateOperator::new(real_matrix(&[&[0.9, 0.2], &[0.2, 0.1]]))?;
        let traj = sea_evolve(&rho, &h, &SeaConfig::new(1.0, 0.01, 50.0, 10)?)?;
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).map_err(|e| Error::Io(e.to_string()))?;
        art.push(("trajectory.csv".into(), String::from_utf8(buf).expect("ascii")));
        trajectory_check(&traj, &h)
    })?;
    b.run(DemoGroup::Sea, "idempotent states evolve unitarily", |_| idempotent(seed))?;
    b.run(DemoGroup::Sea, "kernel preserved, canonical on range", |_| kernel())?;

    b.run(DemoGroup::Entropy, "entropy of the park measure", |_| {
        let ex = park_qubit_example(0.25)?;
        let mu = StatisticalWeightMeasure::from_decomposition(&ex.alternative)?;
        let report = entropy_report(&mu);
        let s_exact = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        let h_exact = -(0.375f64 * 0.375f64.ln() + 0.625 * 0.625f64.ln());
        let ds = (report.barycenter_entropy - s_exact).abs();
        let dh = (report.mixing_shannon - h_exact).abs();
        Ok((
            ds <= 1e-6 && dh <= 1e-6,
            format!("S={:.6} H(w)={:.6}", report.barycenter_entropy, report.mixing_shannon),
        ))
    })?;
    b.run(DemoGroup::Entropy, "concavity bracket", |_| bracket(seed))?;

    b.run(DemoGroup::Determinism, "seeded outputs reproduce", |_| {
        let once = seeded_fingerprint(seed)?;
        let twice = seeded_fingerprint(seed)?;
        Ok((once == twice, format!("{} bytes", once.len())))
    })?;

    Ok(DemoReport {
        checks: b.checks,
        artifacts: b.artifacts,
    })
}

fn real_matrix(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0))
}

fn load_input_dir(dir: &Path, opts: &DemoOptions) -> Result<Vec<StateOperator>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::Io(format!("cannot read {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if opts.skip.contains(&DemoGroup::Ambiguity) {
        return Ok(Vec::new());
    }
    paths
        .iter()
        .map(|p| {
            let json: OperatorJson = formats::read_json(p, "operator")?;
            StateOperator::new(json.to_matrix()?)
        })
        .collect()
}

fn weight_identity(seed: u64) -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    let mut count = 0;
    for (di, &dim) in [2usize, 3, 4, 8].iter().enumerate() {
        for i in 0..5 {
            let mut rng = random::stream(seed, tags::DEMO, (0x100 + 16 * di + i) as u64);
            let w = random::density(dim, dim, &mut rng);
            let alpha = random::haar_vector(dim, &mut rng);
            let decs = [
                complete_from_vector(&w, &alpha)?,
                complete_from_vector_seeded(&w, &alpha, rng.random())?,
                hjw_decomposition(&w, &Isometry::random(dim, dim, &mut rng))?,
            ];
            for d in &decs {
                for p in d.weight_identity_products() {
                    worst = worst.max((p - 1.0).abs());
                    count += 1;
                }
            }
        }
    }
    Ok((worst <= 1e-8, format!("{count} components, max |w<a|W^-1|a> - 1| = {}", sci(worst))))
}

fn witness(w: &StateOperator, seed: u64, index: u64) -> Result<(bool, f64, f64)> {
    let mut rng = random::stream(seed, tags::DEMO, 0x200 + index);
    let d1 = spectral_decomposition(w);
    let d2 = hjw_decomposition(w, &Isometry::random(w.rank(), w.rank(), &mut rng))?;
    let distinct = decompositions_distinct(&d1, &d2, 1e-9)?;
    let gap = max_abs_diff(&d1.mixture(), &d2.mixture());
    let m1 = StatisticalWeightMeasure::from_decomposition(&d1)?;
    let m2 = StatisticalWeightMeasure::from_decomposition(&d2)?;
    let unequal = !measures_equal(&m1, &m2, 1e-9);
    let mut worst = 0.0_f64;
    for a in random_observables(w.dim(), 20, seed.wrapping_add(index)) {
        worst = worst.max((measure_expectation(&m1, &a)? - measure_expectation(&m2, &a)?).abs());
    }
    Ok((distinct && unequal && gap <= 1e-12 && worst <= 1e-10, gap, worst))
}

fn ambiguity(seed: u64, extra: &[StateOperator]) -> Result<(bool, String)> {
    let mut states = Vec::new();
    for (k, (dim, rank)) in [(2, 2), (3, 2), (3, 3), (4, 2), (4, 4), (8, 5)].iter().enumerate() {
        let mut rng = random::stream(seed, tags::DEMO, 0x180 + k as u64);
        states.push(random::density(*dim, *rank, &mut rng));
    }
    let mut ignored = 0;
    for s in extra {
        if s.rank() >= 2 {
            states.push(s.clone());
        } else {
            ignored += 1;
        }
    }
    let (mut ok, mut gap, mut worst) = (true, 0.0_f64, 0.0_f64);
    for (i, w) in states.iter().enumerate() {
        let (pass, g, e) = witness(w, seed, i as u64)?;
        ok &= pass;
        gap = gap.max(g);
        worst = worst.max(e);
    }
    let mut detail = format!(
        "{} operators, barycenter gap {}, expectation gap {}",
        states.len(),
        sci(gap),
        sci(worst)
    );
    if ignored > 0 {
        let _ = write!(detail, ", {ignored} rank-one inputs ignored");
    }
    Ok((ok, detail))
}

fn dominance(seed: u64) -> Result<(bool, String)> {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..1000u64 {
        let mut rng = random::stream(seed, tags::DEMO, 0x300 + i);
        let dim = 2 + (i % 4) as usize;
        let h = random::hermitian(dim, &mut rng);
        let sigma = random::density(dim, dim, &mut rng);
        let beta = solve_beta(&h, sigma.expectation(&h)?)?;
        let s_max = von_neumann_entropy(&canonical_state(&h, beta)?);
        worst = worst.max(von_neumann_entropy(&sigma) - s_max);
    }
    Ok((worst <= 1e-9, format!("1000 states, max S(sigma) - S(canonical) = {}", sci(worst))))
}

fn trajectory_check(traj: &Trajectory, h: &HermitianOperator) -> Result<(bool, String)> {
    let drop = traj
        .entropy
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(0.0_f64, f64::max);
    let trace = traj.trace_error.iter().copied().fold(0.0_f64, f64::max);
    let e0 = traj.energy[0];
    let energy = traj.energy.iter().map(|e| (e - e0).abs()).fold(0.0_f64, f64::max);
    let report = asymptote_check(traj, h);
    let ok = drop <= 1e-10 && trace <= 1e-8 && energy <= 1e-8 && report.distance <= 1e-6;
    let beta = report.beta_hat.map_or("none".into(), |b| format!("{b:.9}"));
    Ok((
        ok,
        format!(
            "beta_hat={beta} distance {} energy drift {} entropy drop {}",
            sci(report.distance),
            sci(energy),
            sci(drop)
        ),
    ))
}

fn relaxation_check(rho: &StateOperator, h: &HermitianOperator) -> Result<(bool, String)> {
    let traj = sea_evolve(rho, h, &SeaConfig::new(1.0, 0.01, 50.0, 10)?)?;
    let (ok, detail) = trajectory_check(&traj, h)?;
    let gap = traj.final_state().distance(&canonical_state(h, 9f64.ln())?);
    Ok((ok && gap <= 1e-6, detail))
}

fn idempotent(seed: u64) -> Result<(bool, String)> {
    let mut worst_idem = 0.0_f64;
    let mut worst_unitary = 0.0_f64;
    for i in 0..3u64 {
        let mut rng = random::stream(seed, tags::DEMO, 0x400 + i);
        let dim = 2 + i as usize;
        let rho = StateOperator::pure(&random::haar_vector(dim, &mut rng))?;
        let h = random::hermitian(dim, &mut rng);
        let traj = sea_evolve(&rho, &h, &SeaConfig::new(1.0, 1e-3, 2.0, 100)?)?;
        let e = h.eig()?;
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let sq = s.matrix() * s.matrix();
            worst_idem = worst_idem.max(max_abs_diff(&sq, s.matrix()));
            let phases = CVector::from_iterator(dim, e.values.iter().map(|&x| C64::from_polar(1.0, -x * t)));
            let u = &e.vectors * CMatrix::from_diagonal(&phases) * e.vectors.adjoint();
            let exact = &u * rho.matrix() * u.adjoint();
            worst_unitary = worst_unitary.max(max_abs_diff(s.matrix(), &exact));
        }
    }
    Ok((
        worst_idem <= 1e-8 && worst_unitary <= 1e-8,
        format!("idempotency {} unitary gap {}", sci(worst_idem), sci(worst_unitary)),
    ))
}

fn kernel() -> Result<(bool, String)> {
    let h = HermitianOperator::diagonal(&[0.0, 1.0, 2.0]);
    let rho = StateOperator::new(real_matrix(&[&[0.6, 0.2, 0.0], &[0.2, 0.4, 0.0], &[0.0, 0.0, 0.0]]))?;
    let traj = sea_evolve(&rho, &h, &SeaConfig::new(1.0, 0.01, 40.0, 10)?)?;
    let leak = traj
        .states
        .iter()
        .map(|s| s.matrix().column(2).norm())
        .fold(0.0_f64, f64::max);
    let report = asymptote_check(&traj, &h);
    let (ok, detail) = trajectory_check(&traj, &h)?;
    Ok((
        ok && leak <= 1e-8 && report.range_rank == 2 && report.partially_canonical,
        format!("kernel leak {} {detail}", sci(leak)),
    ))
}

fn bracket(seed: u64) -> Result<(bool, String)> {
    let mut failures = 0;
    for i in 0..1000u64 {
        let mut rng = random::stream(seed, tags::DEMO, 0x500 + i);
        let dim = 2 + (i % 3) as usize;
        let atoms = 1 + (i % 4) as usize;
        let raw: Vec<f64> = (0..atoms).map(|_| rng.random::<f64>() + 0.05).collect();
        let total: f64 = raw.iter().sum();
        let comps = raw
            .iter()
            .map(|&x| {
                let rank = rng.random_range(1..=dim);
                (x / total, random::density(dim, rank, &mut rng))
            })
            .collect();
        let mu = make_measure(comps)?;
        if !entropy_report(&mu).bracket_holds(1e-9) {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("1000 measures, {failures} violations")))
}

/// Bytes of a small seeded coin experiment and a seeded decomposition.
fn seeded_fingerprint(seed: u64) -> Result<String> {
    let c = coins::repeated_toss_classify(&CoinPreparation::opposite_bias(), 5, 1000, seed)?;
    let mut buf = Vec::new();
    c.write_csv(&mut buf).map_err(|e| Error::Io(e.to_string()))?;
    let mut rng = random::stream(seed, tags::DEMO, 0x600);
    let w = random::density(3, 3, &mut rng);
    let d: Decomposition = hjw_decomposition(&w, &Isometry::random(3, 4, &mut rng))?;
    let mut s = String::from_utf8(buf).expect("ascii");
    s.push_str(&formats::to_json_string(&DecompositionJson::from_decomposition(&d)));
    let _ = writeln!(s, "{}", float17(shannon_entropy(&d.weights())?));
    Ok(s)
}
