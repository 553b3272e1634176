//! Repeated-interaction (collision-model) unitary dilation of the decay
//! dissipator, used as an independent oracle for the GKLS dynamics.
//!
//! White noise on the continuum is realized constructively: every time
//! step each system mode collides with a fresh ancilla mode prepared in
//! vacuum, coupled through H_int = √(2γω_j/dt)(a_j b† + a_j† b). The
//! 1/√dt scaling is what makes the reduced dynamics converge (first order
//! in dt) to the GKLS decay dissipator as dt → 0. The system Hamiltonian
//! is applied within the same step by exact phase rotation, so the γ = 0
//! limit reproduces unitary evolution to round-off.
//!
//! Each collision is unitary-plus-partial-trace, hence exactly trace
//! preserving and completely positive; trace drift per step is round-off
//! only. Ancillas are non-propagating and never revisited, so tracing a
//! mode's ancilla immediately or at the end of the step gives the same
//! reduced state — the Markovianity witness checked in the tests.

use std::sync::Arc;

use ndarray::Array2;

use crate::{
    error::CoreError,
    fockspace::{annihilation, FockBasis, MatrixOperator},
    generators::{hamiltonian, DissipatorSpec, GklsGenerator, JumpOrdering},
    integrator::{evolve, DensityMatrix, EvolveOptions, Observer, Trajectory},
    linalg, C64,
};

/// Parameters of a collision-model run.
#[derive(Debug, Clone)]
pub struct CollisionConfig {
    pub gamma: f64,
    pub dt: f64,
    pub t_max: f64,
    pub record_every: usize,
    /// Ancilla occupation cutoff; 1 (two levels) is exact to first order
    /// in dt for emission into vacuum.
    pub n_anc: u32,
    /// Refuse runs whose pair-space dimension D·(n_anc+1) exceeds this.
    pub max_pair_dim: usize,
}

impl CollisionConfig {
    pub fn new(gamma: f64, dt: f64, t_max: f64, record_every: usize) -> Self {
        Self {
            gamma,
            dt,
            t_max,
            record_every,
            n_anc: 1,
            max_pair_dim: 4096,
        }
    }

    fn validate(&self, basis: &FockBasis) -> Result<(), CoreError> {
        if !(self.dt > 0.0) {
            return Err(CoreError::InvalidParameters(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.t_max < self.dt {
            return Err(CoreError::InvalidParameters(format!(
                "t_max {} must be at least dt {}",
                self.t_max, self.dt
            )));
        }
        if !(self.gamma >= 0.0) {
            return Err(CoreError::InvalidParameters(format!(
                "gamma must be non-negative, got {}",
                self.gamma
            )));
        }
        if self.n_anc < 1 {
            return Err(CoreError::InvalidParameters("n_anc must be ≥ 1".into()));
        }
        let pair_dim = basis.dim() * (self.n_anc as usize + 1);
        if pair_dim > self.max_pair_dim {
            return Err(CoreError::MemoryGuard {
                dim: pair_dim,
                bound: self.max_pair_dim,
            });
        }
        Ok(())
    }
}

/// Ladder (annihilation) matrix on an isolated `levels`-dimensional mode.
fn ladder(levels: usize) -> Array2<C64> {
    let mut b = Array2::zeros((levels, levels));
    for n in 1..levels {
        b[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    b
}

/// Precomputed per-mode collision unitaries and the free phase factors.
struct CollisionEngine {
    basis: Arc<FockBasis>,
    d_anc: usize,
    /// exp(−i θ_j (a_j b† + a_j† b)) for each mode slot, θ_j = √(2γω_j dt).
    unitaries: Vec<Array2<C64>>,
    /// e^{−i E_i dt} with E_i the free energies, applied as exact rotation.
    phases: Vec<C64>,
}

impl CollisionEngine {
    fn new(basis: &Arc<FockBasis>, cfg: &CollisionConfig) -> Result<Self, CoreError> {
        cfg.validate(basis)?;
        let d_anc = cfg.n_anc as usize + 1;
        let b = ladder(d_anc);
        let b_dag = linalg::dagger(&b);
        let mut unitaries = Vec::new();
        for j in basis.modes().indices().collect::<Vec<_>>() {
            let w = basis.modes().frequency_of(j)?;
            let theta = (2.0 * cfg.gamma * w * cfg.dt).sqrt();
            let a = annihilation(basis, j)?.into_entries();
            let a_dag = linalg::dagger(&a);
            let coupling = linalg::kron(&a, &b_dag) + linalg::kron(&a_dag, &b);
            unitaries.push(linalg::unitary_exp_i(&coupling, -theta)?);
        }
        let h = hamiltonian(basis);
        let phases = (0..basis.dim())
            .map(|i| C64::new(0.0, -h.entries()[[i, i]].re * cfg.dt).exp())
            .collect();
        Ok(Self {
            basis: basis.clone(),
            d_anc,
            unitaries,
            phases,
        })
    }

    /// One collision of the system with a fresh vacuum ancilla, traced out
    /// immediately.
    fn collide(&self, rho: &Array2<C64>, mode_slot: usize) -> Array2<C64> {
        let d = self.basis.dim();
        let na = self.d_anc;
        let mut pair = Array2::zeros((d * na, d * na));
        for i in 0..d {
            for j in 0..d {
                pair[[i * na, j * na]] = rho[[i, j]];
            }
        }
        let u = &self.unitaries[mode_slot];
        let evolved = u.dot(&pair).dot(&linalg::dagger(u));
        linalg::partial_trace_last(&evolved, d, na)
    }

    /// One full step: sequential per-mode collisions, then the exact free
    /// phase rotation.
    fn step(&self, rho: &Array2<C64>) -> Array2<C64> {
        let mut rho = rho.clone();
        for slot in 0..self.unitaries.len() {
            rho = self.collide(&rho, slot);
        }
        self.rotate(&rho)
    }

    fn rotate(&self, rho: &Array2<C64>) -> Array2<C64> {
        let d = self.basis.dim();
        let mut out = rho.clone();
        for i in 0..d {
            for j in 0..d {
                out[[i, j]] *= self.phases[i] * self.phases[j].conj();
            }
        }
        out
    }

    /// One step with all M ancillas adjoined jointly and traced only at the
    /// end. Mathematically identical to [`step`](Self::step); exists as the
    /// Markovianity witness.
    fn step_joint(&self, rho: &Array2<C64>) -> Result<Array2<C64>, CoreError> {
        let d = self.basis.dim();
        let na = self.d_anc;
        let m = self.unitaries.len();
        let mut joint_dim = d;
        for _ in 0..m {
            joint_dim = joint_dim.checked_mul(na).ok_or_else(|| {
                CoreError::InvalidParameters("joint collision space overflows".into())
            })?;
        }
        if joint_dim > 1 << 14 {
            return Err(CoreError::MemoryGuard {
                dim: joint_dim,
                bound: 1 << 14,
            });
        }
        // ρ ⊗ |0…0⟩⟨0…0|
        let anc_dim = joint_dim / d;
        let mut state = Array2::zeros((joint_dim, joint_dim));
        for i in 0..d {
            for j in 0..d {
                state[[i * anc_dim, j * anc_dim]] = rho[[i, j]];
            }
        }
        // lift each pair unitary: system ⊗ anc_0 ⊗ … ⊗ anc_{M−1}, ancilla
        // slot `s` reached by sandwiching identities around the pair matrix
        for (slot, u_pair) in self.unitaries.iter().enumerate() {
            let before: usize = na.pow(slot as u32);
            let after: usize = na.pow((m - 1 - slot) as u32);
            // u_pair acts on (system, anc_slot); reorder as
            // system ⊗ before ⊗ target ⊗ after via explicit index map
            let mut u_full: Array2<C64> = Array2::zeros((joint_dim, joint_dim));
            for si in 0..d {
                for ti in 0..na {
                    for sj in 0..d {
                        for tj in 0..na {
                            let amp = u_pair[[si * na + ti, sj * na + tj]];
                            if amp == C64::new(0.0, 0.0) {
                                continue;
                            }
                            for bi in 0..before {
                                for ai in 0..after {
                                    let row = ((si * before + bi) * na + ti) * after + ai;
                                    let col = ((sj * before + bi) * na + tj) * after + ai;
                                    u_full[[row, col]] = amp;
                                }
                            }
                        }
                    }
                }
            }
            state = u_full.dot(&state).dot(&linalg::dagger(&u_full));
        }
        let reduced = linalg::partial_trace_last(&state, d, anc_dim);
        Ok(self.rotate(&reduced))
    }
}

/// Evolve a state by repeated collisions, recording the same observables
/// as the RK4 integrator.
pub fn collision_evolve(
    rho0: &DensityMatrix,
    config: &CollisionConfig,
) -> Result<Trajectory, CoreError> {
    let basis = rho0.basis().clone();
    let engine = CollisionEngine::new(&basis, config)?;
    let record_every = config.record_every.max(1);
    let n_steps = (config.t_max / config.dt).round().max(1.0) as usize;
    let observer = Observer::new(&basis, &[]);

    let mut rho = rho0.operator().entries().clone();
    let mut times = Vec::new();
    let mut records = Vec::new();
    let mut states = Vec::new();
    let wrap = |m: &Array2<C64>| MatrixOperator::new(basis.clone(), m.clone());

    let (rec, state) = observer.observe(&wrap(&rho)?, 0, 0.0)?;
    times.push(0.0);
    records.push(rec);
    states.push(state);

    for step in 1..=n_steps {
        rho = engine.step(&rho);
        if step % record_every == 0 || step == n_steps {
            let t = step as f64 * config.dt;
            let (rec, state) = observer.observe(&wrap(&rho)?, step, t)?;
            times.push(t);
            records.push(rec);
            states.push(state);
        }
    }

    Ok(Trajectory {
        mode_indices: basis.modes().indices().collect(),
        phi_sites: Vec::new(),
        times,
        records,
        states,
    })
}

/// One collision step with the ancillas traced jointly at the end instead
/// of immediately per mode. Exposed for the Markovianity witness.
pub fn collision_step_joint(
    rho0: &DensityMatrix,
    config: &CollisionConfig,
) -> Result<MatrixOperator, CoreError> {
    let basis = rho0.basis().clone();
    let engine = CollisionEngine::new(&basis, config)?;
    let stepped = engine.step_joint(rho0.operator().entries())?;
    MatrixOperator::new(basis, stepped)
}

/// Single sequential collision step, for step-level comparisons.
pub fn collision_step(
    rho0: &DensityMatrix,
    config: &CollisionConfig,
) -> Result<MatrixOperator, CoreError> {
    let basis = rho0.basis().clone();
    let engine = CollisionEngine::new(&basis, config)?;
    MatrixOperator::new(basis, engine.step(rho0.operator().entries()))
}

/// Comparison of the collision model against the GKLS integrator on a
/// shared time grid, including the dt-halving convergence probe.
#[derive(Debug, Clone, serde::Serialize)]
pub struct OracleReport {
    pub dt: f64,
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    pub max_trace_distance: f64,
    pub final_distance: f64,
    pub half_dt_final_distance: f64,
    /// final_distance(dt/2) / final_distance(dt); ≈ ½ for first-order
    /// convergence of the collision discretization.
    pub dt_half_ratio: f64,
}

/// Run both engines from the same initial state on identical grids and
/// report the trace-distance series plus the dt-halving ratio.
pub fn oracle_compare(
    rho0: &DensityMatrix,
    config: &CollisionConfig,
) -> Result<OracleReport, CoreError> {
    let basis = rho0.basis().clone();
    let spec = DissipatorSpec::poulin(&basis, config.gamma, JumpOrdering::Decay)?;
    let generator = GklsGenerator::new(Some(hamiltonian(&basis)), &spec, &basis)?;

    let run = |dt: f64, record_every: usize| -> Result<(Vec<f64>, Vec<f64>), CoreError> {
        let opts = EvolveOptions::new(config.t_max, dt, record_every);
        let gkls = evolve(rho0, &generator, &opts)?;
        let mut collision_cfg = config.clone();
        collision_cfg.dt = dt;
        collision_cfg.record_every = record_every;
        let collision = collision_evolve(rho0, &collision_cfg)?;
        debug_assert_eq!(gkls.times.len(), collision.times.len());
        let mut distances = Vec::new();
        for (a, b) in gkls.states.iter().zip(&collision.states) {
            distances.push(linalg::trace_distance(
                a.operator().entries(),
                b.operator().entries(),
            )?);
        }
        Ok((gkls.times, distances))
    };

    let (times, distances) = run(config.dt, config.record_every.max(1))?;
    let max_trace_distance = distances.iter().fold(0.0f64, |m, &d| m.max(d));
    let final_distance = *distances.last().unwrap_or(&0.0);

    let (_, half_distances) = run(config.dt / 2.0, config.record_every.max(1) * 2)?;
    let half_dt_final_distance = *half_distances.last().unwrap_or(&0.0);
    let dt_half_ratio = if final_distance > 0.0 {
        half_dt_final_distance / final_distance
    } else {
        0.0
    };

    Ok(OracleReport {
        dt: config.dt,
        times,
        distances,
        max_trace_distance,
        final_distance,
        half_dt_final_distance,
        dt_half_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::ModeSet;
    use std::f64::consts::PI;

    fn single_mode_basis() -> Arc<FockBasis> {
        FockBasis::new(ModeSet::new(2.0 * PI, 0, 1.0).unwrap(), 2).unwrap()
    }

    fn desk_basis() -> Arc<FockBasis> {
        FockBasis::new(ModeSet::new(2.0 * PI, 1, 1.0).unwrap(), 2).unwrap()
    }

    #[test]
    fn zero_coupling_reproduces_exact_unitary_evolution() {
        let basis = desk_basis();
        let mut amp = vec![C64::new(0.0, 0.0); basis.dim()];
        amp[0] = C64::new(0.6, 0.0);
        amp[4] = C64::new(0.0, 0.8);
        let rho0 = DensityMatrix::pure(basis.clone(), &amp).unwrap();
        let cfg = CollisionConfig::new(0.0, 0.01, 1.0, 10);
        let traj = collision_evolve(&rho0, &cfg).unwrap();

        // exact phase evolution of the initial matrix
        let h = hamiltonian(&basis);
        for (state, &t) in traj.states.iter().zip(&traj.times) {
            let mut exact = rho0.operator().entries().clone();
            for i in 0..basis.dim() {
                for j in 0..basis.dim() {
                    let de = h.entries()[[i, i]].re - h.entries()[[j, j]].re;
                    exact[[i, j]] *= C64::new(0.0, -de * t).exp();
                }
            }
            let diff = linalg::max_abs(&(state.operator().entries() - &exact));
            assert!(diff < 1e-10, "t={t}: {diff}");
        }
    }

    #[test]
    fn each_step_preserves_trace_to_round_off() {
        let basis = single_mode_basis();
        let rho0 = DensityMatrix::from_occupations(basis.clone(), &[1]).unwrap();
        let cfg = CollisionConfig::new(0.2, 0.05, 1.0, 1);
        let traj = collision_evolve(&rho0, &cfg).unwrap();
        for r in &traj.records {
            assert!(r.trace_defect < 1e-12, "t={}: {}", r.time, r.trace_defect);
        }
    }

    #[test]
    fn collision_model_tracks_gkls_within_first_order() {
        // single mode ω=1, γ=0.05, dt=0.01, t=1, ρ0=|1⟩⟨1|: distance ≤ 5e−3
        let basis = single_mode_basis();
        let rho0 = DensityMatrix::from_occupations(basis.clone(), &[1]).unwrap();
        let cfg = CollisionConfig::new(0.05, 0.01, 1.0, 20);
        let report = oracle_compare(&rho0, &cfg).unwrap();
        assert!(
            report.final_distance < 5e-3,
            "final distance {}",
            report.final_distance
        );
        assert!(
            (0.4..=0.6).contains(&report.dt_half_ratio),
            "ratio {}",
            report.dt_half_ratio
        );
    }

    #[test]
    fn vacuum_is_a_common_fixed_point() {
        let basis = desk_basis();
        let rho0 = DensityMatrix::vacuum(basis.clone());
        let cfg = CollisionConfig::new(0.1, 0.05, 0.5, 2);
        let report = oracle_compare(&rho0, &cfg).unwrap();
        assert!(report.max_trace_distance < 1e-12);
    }

    #[test]
    fn observables_bounded_by_trace_distance() {
        let basis = single_mode_basis();
        let rho0 = DensityMatrix::from_occupations(basis.clone(), &[1]).unwrap();
        let cfg = CollisionConfig::new(0.05, 0.01, 1.0, 10);

        let spec = DissipatorSpec::poulin(&basis, cfg.gamma, JumpOrdering::Decay).unwrap();
        let generator = GklsGenerator::new(Some(hamiltonian(&basis)), &spec, &basis).unwrap();
        let gkls = evolve(&rho0, &generator, &EvolveOptions::new(1.0, 0.01, 10)).unwrap();
        let coll = collision_evolve(&rho0, &cfg).unwrap();
        let report = oracle_compare(&rho0, &cfg).unwrap();

        // ⟨N⟩ ranges over [0, n_max]: |Δ⟨N⟩| ≤ n_max · trace distance ≤
        // 2·max distance since the observable is bounded by 2 here
        for (a, b) in gkls.records.iter().zip(&coll.records) {
            assert!((a.n_total - b.n_total).abs() <= 2.0 * report.max_trace_distance + 1e-12);
        }
    }

    #[test]
    fn markovianity_witness_joint_equals_sequential() {
        let basis = desk_basis();
        let mut amp = vec![C64::new(0.0, 0.0); basis.dim()];
        amp[1] = C64::new(0.8, 0.1);
        amp[9] = C64::new(0.2, -0.5);
        amp[13] = C64::new(0.3, 0.0);
        let rho0 = DensityMatrix::pure(basis.clone(), &amp).unwrap();
        let cfg = CollisionConfig::new(0.3, 0.05, 1.0, 1);
        let seq = collision_step(&rho0, &cfg).unwrap();
        let joint = collision_step_joint(&rho0, &cfg).unwrap();
        assert!(seq.max_abs_diff(&joint) < 1e-10);
    }

    #[test]
    fn memory_guard_refuses_oversized_pairs() {
        let basis = desk_basis();
        let rho0 = DensityMatrix::vacuum(basis.clone());
        let mut cfg = CollisionConfig::new(0.1, 0.01, 1.0, 10);
        cfg.max_pair_dim = 10;
        assert!(matches!(
            collision_evolve(&rho0, &cfg),
            Err(CoreError::MemoryGuard { .. })
        ));
    }
}
