//! Unitary plus steepest-entropy-ascent relaxation.
//!
//! The equation of motion is
//!
//! ```text
//! dρ/dt = −i[H, ρ] + D(ρ)/τ
//! ```
//!
//! where `D(ρ)` is the entropy gradient `G = −(ln ρ + I)` on the range of
//! `ρ`, orthogonally projected (in the trace inner product `⟨X, Y⟩ =
//! Tr XY`) against the constraint gradients `I_R` and `H_R`, then embedded
//! back with zero action on the kernel. This is one choice of metric for
//! "steepest"; the rest of the module only sees [`dissipative_direction`].
//!
//! Consequences of the construction:
//!
//! - `Tr D = 0` and `Tr(HD) = 0`, so trace and mean energy are conserved.
//! - The entropy production `⟨D, G⟩ = ‖D‖²` is never negative.
//! - Rank-one states have a one-dimensional range, `D = 0`, and evolve
//!   unitarily.
//! - `D = 0` exactly when `ln ρ_R` lies in `span{I_R, H_R}`, i.e. when `ρ`
//!   is canonical on its range.
//!
//! The kernel of `ρ` is preserved when `H` leaves it invariant; otherwise
//! the unitary part rotates the range and the kernel moves with it.
//!
//! Integration is classical RK4. With `τ = ∞` the flow is purely unitary and
//! is propagated exactly by `exp(−iH·dt)` instead. A step whose result has an eigenvalue below
//! `−1e−12` is split into two half steps, recursively, at most 20 times.
//! The exact flow never changes the rank of `ρ`, so eigenvalues beyond the
//! starting rank that a step produces are integrator error and are zeroed.

use std::io::Write;

use rayon::prelude::*;

use crate::equilibrium::{von_neumann_entropy, Gibbs};
use crate::formats::float17;
use crate::operator::{
    commutator, eigh, make_hermitian, rebuild, max_abs, max_abs_diff, symmetrize, tol, trace,
    trace_product, validate_state_operator, HermitianOperator, StateOperator,
};
use crate::{CMatrix, Error, Result, C64};

/// Smallest eigenvalue a step may produce before it is split.
pub const POSITIVITY_FLOOR: f64 = -1e-12;
/// Maximum number of recursive step halvings.
pub const MAX_HALVINGS: u32 = 20;
/// Evolution stops once `‖dρ/dt‖_max` falls below this.
pub const STATIONARY_RATE: f64 = 1e-12;
/// Trace tolerance used when re-validating each step.
pub const STEP_TOL: f64 = 1e-9;
/// Default tolerance of [`asymptote_check`].
pub const ASYMPTOTE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeaConfig {
    /// Dissipation time. `f64::INFINITY` switches the dissipative term off.
    pub tau: f64,
    pub dt: f64,
    pub t_final: f64,
    /// Record every `record_every`-th step (the initial and final states are
    /// always recorded).
    pub record_every: usize,
}

impl SeaConfig {
    pub fn new(tau: f64, dt: f64, t_final: f64, record_every: usize) -> Result<Self> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if tau.is_nan() || tau <= 0.0 {
            return bad("tau", format!("{tau} is not positive"));
        }
        if !dt.is_finite() || dt <= 0.0 {
            return bad("dt", format!("{dt} is not a positive number"));
        }
        if dt > tau / 10.0 {
            return bad("dt", format!("{dt} exceeds tau/10 = {}", tau / 10.0));
        }
        if !t_final.is_finite() || t_final <= 0.0 {
            return bad("t_final", format!("{t_final} is not a positive number"));
        }
        if record_every == 0 {
            return bad("record_every", "must be at least 1".into());
        }
        Ok(SeaConfig {
            tau,
            dt,
            t_final,
            record_every,
        })
    }

    /// Pure Hamiltonian evolution.
    pub fn unitary(dt: f64, t_final: f64, record_every: usize) -> Result<Self> {
        Self::new(f64::INFINITY, dt, t_final, record_every)
    }

    pub fn is_unitary(&self) -> bool {
        self.tau.is_infinite()
    }
}

#[derive(Debug, Clone)]
pub struct DissipativeDirection {
    /// `D`, Hermitian and traceless, zero on the kernel of `ρ`.
    pub direction: HermitianOperator,
    /// `⟨D, G⟩ = ‖D‖²`; multiply by `1/τ` for `dS/dt`.
    pub entropy_production: f64,
    /// `H_R` was proportional to `I_R`, so only the trace constraint was
    /// imposed.
    pub energy_constraint_dropped: bool,
}

struct Direction {
    matrix: CMatrix,
    production: f64,
    dropped: bool,
}

/// `Re Tr(X Y)` for Hermitian `X`, `Y`.
fn inner(x: &CMatrix, y: &CMatrix) -> f64 {
    trace_product(x, y)
}

/// Direction on the span of the `rank` leading eigenvectors of `m`; with
/// `None` the rank is counted against the rank cutoff. Fails with
/// `StepRejected` if a retained eigenvalue is not positive.
fn direction_of(m: &CMatrix, h: &CMatrix, rank: Option<usize>) -> Result<Direction> {
    let n = m.nrows();
    let eigen = eigh(&symmetrize(m))?;
    let rank = rank.unwrap_or_else(|| {
        let cutoff = tol::rank_cutoff(n, eigen.values[0]);
        eigen.values.iter().filter(|&&x| x > cutoff).count()
    });
    if rank <= 1 {
        return Ok(Direction {
            matrix: CMatrix::zeros(n, n),
            production: 0.0,
            dropped: false,
        });
    }
    if eigen.values[rank - 1] <= 0.0 {
        return Err(Error::StepRejected { time: 0.0 });
    }
    let basis = eigen.vectors.columns(0, rank).into_owned();
    let g = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        rank,
        eigen.values[..rank].iter().map(|&x| C64::new(-(x.ln() + 1.0), 0.0)),
    ));
    let h_r = symmetrize(&(basis.adjoint() * h * &basis));

    let mut d = g;
    let shift = trace(&d).re / rank as f64;
    for i in 0..rank {
        d[(i, i)] -= shift;
    }
    let mut h_tilde = h_r.clone();
    let h_shift = trace(&h_r).re / rank as f64;
    for i in 0..rank {
        h_tilde[(i, i)] -= h_shift;
    }
    let h_norm2 = inner(&h_tilde, &h_tilde);
    let h_scale2 = inner(&h_r, &h_r).max(1.0);
    let dropped = h_norm2 <= 1e-24 * h_scale2;
    if !dropped {
        let c = inner(&d, &h_tilde) / h_norm2;
        d -= h_tilde * C64::new(c, 0.0);
    }
    let d = symmetrize(&d);
    let production = inner(&d, &d);
    Ok(Direction {
        matrix: symmetrize(&(&basis * d * basis.adjoint())),
        production,
        dropped,
    })
}

fn check_dims(s: &StateOperator, h: &HermitianOperator) -> Result<()> {
    if s.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: h.dim(),
        });
    }
    Ok(())
}

/// The steepest-entropy-ascent direction of `s` under the constraints of
/// fixed trace and fixed mean energy of `h`.
pub fn dissipative_direction(s: &StateOperator, h: &HermitianOperator) -> Result<DissipativeDirection> {
    check_dims(s, h)?;
    let d = direction_of(s.matrix(), h.matrix(), None)?;
    Ok(DissipativeDirection {
        direction: make_hermitian(d.matrix, tol::HERMITIAN)?,
        entropy_production: d.production,
        energy_constraint_dropped: d.dropped,
    })
}

/// `G = −(ln ρ + I)` on the range of `s`, zero on its kernel: the gradient
/// of `S(ρ) = −Tr ρ ln ρ` in the trace inner product.
pub fn entropy_gradient(s: &StateOperator) -> CMatrix {
    let cutoff = s.rank_cutoff();
    s.eigen()
        .map(|x| if x > cutoff { -(x.ln() + 1.0) } else { 0.0 })
}

/// `dρ/dt` at `m`. The flow never changes the rank, so within a step the
/// range is taken to have the rank of the state the step started from;
/// intermediate stages carry `O(dt²)` noise in the kernel that must not be
/// mistaken for range.
fn rate(m: &CMatrix, h: &CMatrix, tau: f64, rank: usize) -> Result<CMatrix> {
    let mut k = commutator(h, m) * C64::new(0.0, -1.0);
    if tau.is_finite() {
        k += direction_of(m, h, Some(rank))?.matrix * C64::new(1.0 / tau, 0.0);
    }
    Ok(k)
}

fn rk4(m: &CMatrix, k1: &CMatrix, h: &CMatrix, tau: f64, dt: f64, rank: usize) -> Result<CMatrix> {
    let half = C64::new(dt / 2.0, 0.0);
    let k2 = rate(&(m + k1 * half), h, tau, rank)?;
    let k3 = rate(&(m + &k2 * half), h, tau, rank)?;
    let k4 = rate(&(m + &k3 * C64::new(dt, 0.0)), h, tau, rank)?;
    let sum = k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4;
    Ok(symmetrize(&(m + sum * C64::new(dt / 6.0, 0.0))))
}

/// A state reached by one guarded step.
struct Stepped {
    state: StateOperator,
    /// Largest `|Tr ρ − 1|` of the raw integrator outputs.
    trace_error: f64,
}

/// `None` if the step left the positive cone. Eigenvalues beyond `rank` are
/// integrator error (the flow preserves rank) and are set to zero.
fn accept(m: CMatrix, rank: usize) -> Result<Option<Stepped>> {
    let eigen = eigh(&m)?;
    if *eigen.values.last().expect("non-empty") < POSITIVITY_FLOOR {
        return Ok(None);
    }
    let trace_error = (trace(&m).re - 1.0).abs();
    let m = if rank < m.nrows() {
        let mut values = eigen.values;
        values[rank..].iter_mut().for_each(|x| *x = 0.0);
        rebuild(&eigen.vectors, &values)
    } else {
        m
    };
    Ok(validate_state_operator(m, STEP_TOL)
        .ok()
        .map(|state| Stepped { state, trace_error }))
}

/// `e^{−iH·dt} ρ e^{iH·dt}`.
fn unitary_step(m: &CMatrix, h: &CMatrix, dt: f64) -> Result<CMatrix> {
    let eig = eigh(h)?;
    let mut u = eig.vectors.clone();
    for (j, &e) in eig.values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -e * dt);
        u.column_mut(j).iter_mut().for_each(|x| *x *= phase);
    }
    let u = u * eig.vectors.adjoint();
    Ok(symmetrize(&(&u * m * u.adjoint())))
}

fn guarded_step(
    s: &StateOperator,
    k1: Option<&CMatrix>,
    h: &CMatrix,
    tau: f64,
    dt: f64,
    depth: u32,
) -> Result<Stepped> {
    let rank = s.rank();
    if !tau.is_finite() {
        return accept(unitary_step(s.matrix(), h, dt)?, rank)?.ok_or(Error::StepRejected { time: 0.0 });
    }
    let owned;
    let k1 = match k1 {
        Some(k) => k,
        None => {
            owned = rate(s.matrix(), h, tau, rank)?;
            &owned
        }
    };
    let stepped = match rk4(s.matrix(), k1, h, tau, dt, rank) {
        Ok(m) => accept(m, rank)?,
        Err(Error::StepRejected { .. }) => None,
        Err(e) => return Err(e),
    };
    if let Some(next) = stepped {
        return Ok(next);
    }
    if depth >= MAX_HALVINGS {
        return Err(Error::StepRejected { time: 0.0 });
    }
    let mid = guarded_step(s, Some(k1), h, tau, dt / 2.0, depth + 1)?;
    let end = guarded_step(&mid.state, None, h, tau, dt / 2.0, depth + 1)?;
    Ok(Stepped {
        state: end.state,
        trace_error: mid.trace_error.max(end.trace_error),
    })
}

/// One RK4 step of length `cfg.dt`, split as needed to stay positive. Exact
/// when `cfg.tau` is infinite.
pub fn sea_step(s: &StateOperator, h: &HermitianOperator, cfg: &SeaConfig) -> Result<StateOperator> {
    check_dims(s, h)?;
    Ok(guarded_step(s, None, h.matrix(), cfg.tau, cfg.dt, 0)?.state)
}

/// Recorded evolution with per-record diagnostics. All lists have equal
/// length.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateOperator>,
    pub entropy: Vec<f64>,
    pub energy: Vec<f64>,
    /// Largest `|Tr ρ − 1|` of the raw integrator output since the previous
    /// record.
    pub trace_error: Vec<f64>,
    /// `dS/dt = ‖D‖²/τ`.
    pub entropy_production: Vec<f64>,
    /// Max-norm distance to the canonical state on the range of `ρ(t)` at the
    /// initial energy.
    pub dist_to_canonical: Vec<f64>,
    /// Integrator steps taken.
    pub steps: usize,
    /// Evolution stopped before `t_final` because `ρ` became stationary.
    pub stationary: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &StateOperator {
        self.states.last().expect("trajectories are never empty")
    }

    /// CSV with columns
    /// `t,entropy,energy,trace_error,entropy_production,dist_to_canonical`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,entropy,energy,trace_error,entropy_production,dist_to_canonical")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                float17(self.times[i]),
                float17(self.entropy[i]),
                float17(self.energy[i]),
                float17(self.trace_error[i]),
                float17(self.entropy_production[i]),
                float17(self.dist_to_canonical[i])
            )?;
        }
        Ok(())
    }

    fn record(&mut self, t: f64, s: StateOperator, trace_error: f64, h: &HermitianOperator, tau: f64) -> Result<()> {
        let energy = trace_product(s.matrix(), h.matrix());
        let e0 = self.energy.first().copied().unwrap_or(energy);
        let production = if tau.is_finite() {
            direction_of(s.matrix(), h.matrix(), Some(s.rank()))?.production / tau
        } else {
            0.0
        };
        self.times.push(t);
        self.entropy.push(von_neumann_entropy(&s));
        self.energy.push(energy);
        self.trace_error.push(trace_error);
        self.entropy_production.push(production);
        self.dist_to_canonical.push(partially_canonical(&s, h, e0).distance);
        self.states.push(s);
        Ok(())
    }
}

/// Integrates from `rho0` to `cfg.t_final`, or until `‖dρ/dt‖_max <
/// 1e−12`.
pub fn sea_evolve(rho0: &StateOperator, h: &HermitianOperator, cfg: &SeaConfig) -> Result<Trajectory> {
    check_dims(rho0, h)?;
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        entropy: Vec::new(),
        energy: Vec::new(),
        trace_error: Vec::new(),
        entropy_production: Vec::new(),
        dist_to_canonical: Vec::new(),
        steps: 0,
        stationary: false,
    };
    let initial_trace_error = (rho0.corrections().trace_before - 1.0).abs();
    traj.record(0.0, rho0.clone(), initial_trace_error, h, cfg.tau)?;

    let mut state = rho0.clone();
    let mut trace_error = 0.0_f64;
    let mut t = 0.0;
    let mut recorded_last = true;
    let end_slack = 1e-9 * cfg.dt;
    while t < cfg.t_final - end_slack {
        let k1 = rate(state.matrix(), h.matrix(), cfg.tau, state.rank())?;
        if max_abs(&k1) < STATIONARY_RATE {
            traj.stationary = true;
            break;
        }
        let dt = cfg.dt.min(cfg.t_final - t);
        let stepped = guarded_step(&state, Some(&k1), h.matrix(), cfg.tau, dt, 0).map_err(|e| match e {
            Error::StepRejected { .. } => Error::StepRejected { time: t },
            other => other,
        })?;
        state = stepped.state;
        trace_error = trace_error.max(stepped.trace_error);
        traj.steps += 1;
        t = if cfg.t_final - (t + dt) <= end_slack {
            cfg.t_final
        } else {
            t + dt
        };
        recorded_last = traj.steps.is_multiple_of(cfg.record_every);
        if recorded_last {
            traj.record(t, state.clone(), trace_error, h, cfg.tau)?;
            trace_error = 0.0;
        }
    }
    if !recorded_last {
        traj.record(t, state, trace_error, h, cfg.tau)?;
    }
    Ok(traj)
}

/// Evolves independent problems in parallel; results are in input order.
pub fn sea_evolve_all(
    problems: &[(StateOperator, HermitianOperator, SeaConfig)],
) -> Vec<Result<Trajectory>> {
    problems
        .par_iter()
        .map(|(rho0, h, cfg)| sea_evolve(rho0, h, cfg))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoteReport {
    /// Inverse temperature on the range; `None` for a rank-one range or a
    /// Hamiltonian that is constant on the range.
    pub beta_hat: Option<f64>,
    /// `‖ρ − σ‖_max` to the canonical state `σ` on the range of `ρ`.
    pub distance: f64,
    pub partially_canonical: bool,
    pub range_rank: usize,
}

/// Compares `s` with the canonical state of `H` restricted to the range of
/// `s`, at mean energy `energy`.
pub fn partially_canonical(s: &StateOperator, h: &HermitianOperator, energy: f64) -> AsymptoteReport {
    let r = s.range_restrict();
    let h_r = r.restrict(h.matrix());
    let (beta_hat, target) = if r.rank == 1 {
        (None, Ok(r.embed(&CMatrix::identity(1, 1))))
    } else {
        match make_hermitian(h_r, tol::HERMITIAN).and_then(|hr| Gibbs::new(&hr)) {
            Err(e) => (None, Err(e)),
            Ok(gibbs) => match gibbs.solve_beta(energy) {
                Ok(beta) => (Some(beta), gibbs.state(beta).map(|c| r.embed(c.matrix()))),
                Err(Error::DegenerateHamiltonian) => {
                    let flat = CMatrix::identity(r.rank, r.rank) * C64::new(1.0 / r.rank as f64, 0.0);
                    (None, Ok(r.embed(&flat)))
                }
                Err(e) => (None, Err(e)),
            },
        }
    };
    let distance = match target {
        Ok(t) => max_abs_diff(s.matrix(), &t),
        Err(_) => f64::INFINITY,
    };
    AsymptoteReport {
        beta_hat,
        distance,
        partially_canonical: distance <= ASYMPTOTE_TOL,
        range_rank: r.rank,
    }
}

/// Fits the canonical form on the range of the final state at the
/// trajectory's initial (conserved) energy.
pub fn asymptote_check(traj: &Trajectory, h: &HermitianOperator) -> AsymptoteReport {
    partially_canonical(traj.final_state(), h, traj.energy[0])
}
