//! Fixed-step evolution of density matrices under a GKLS generator.
//!
//! Classical 4th-order Runge–Kutta with no step-size control and no trace
//! renormalization: trace drift, Hermiticity defect, and negative
//! eigenvalues are diagnostics, recorded along the trajectory and turned
//! into a hard abort when they cross the breach thresholds. Determinism
//! over speed — desk-scale dimensions make adaptive stepping pointless and
//! golden files want bit-stable output.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::{
    error::CoreError,
    fockspace::{number_operator, FockBasis, MatrixOperator},
    generators::{field_operators, GklsGenerator},
    linalg, C64,
};

/// Invariant levels a [`DensityMatrix`] must satisfy (warn thresholds).
pub const TRACE_TOL: f64 = 1e-9;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const MIN_EIG_TOL: f64 = -1e-8;

/// Hard abort thresholds for [`evolve`].
pub const TRACE_BREACH: f64 = 1e-6;
pub const MIN_EIG_BREACH: f64 = -1e-5;

/// A trace-one positive Hermitian matrix on a Fock basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    op: MatrixOperator,
}

impl DensityMatrix {
    /// Validate and wrap. Checks |tr−1| < 1e−9, Hermiticity defect < 1e−10,
    /// and min eigenvalue ≥ −1e−8 (on the Hermitized matrix).
    pub fn new(op: MatrixOperator) -> Result<Self, CoreError> {
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(CoreError::InvalidDensityMatrix(format!(
                "trace {tr} is not 1"
            )));
        }
        let herm = linalg::herm_defect(op.entries());
        if herm > HERMITICITY_TOL {
            return Err(CoreError::InvalidDensityMatrix(format!(
                "Hermiticity defect {herm:e}"
            )));
        }
        let min_eig = linalg::min_eigval_hermitized(op.entries())?;
        if min_eig < MIN_EIG_TOL {
            return Err(CoreError::InvalidDensityMatrix(format!(
                "minimum eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { op })
    }

    /// Pure state from a (not necessarily normalized) amplitude vector.
    pub fn pure(basis: Arc<FockBasis>, amplitudes: &[C64]) -> Result<Self, CoreError> {
        if amplitudes.len() != basis.dim() {
            return Err(CoreError::InvalidDensityMatrix(format!(
                "amplitude vector length {} vs dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr <= 0.0 {
            return Err(CoreError::InvalidDensityMatrix("zero state vector".into()));
        }
        let d = basis.dim();
        let mut entries = ndarray::Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                entries[[i, j]] = amplitudes[i] * amplitudes[j].conj() / norm_sqr;
            }
        }
        Ok(Self {
            op: MatrixOperator::new(basis, entries)?,
        })
    }

    /// Pure occupation-basis state |n_{−J},…,n_J⟩⟨…|.
    pub fn from_occupations(basis: Arc<FockBasis>, occ: &[u32]) -> Result<Self, CoreError> {
        let idx = basis.index_of(occ)?;
        Self::basis_state(basis, idx)
    }

    /// Pure basis state by index.
    pub fn basis_state(basis: Arc<FockBasis>, index: usize) -> Result<Self, CoreError> {
        let d = basis.dim();
        if index >= d {
            return Err(CoreError::InvalidDensityMatrix(format!(
                "basis index {index} out of range 0..{d}"
            )));
        }
        let mut amp = vec![C64::new(0.0, 0.0); d];
        amp[index] = C64::new(1.0, 0.0);
        Self::pure(basis, &amp)
    }

    /// The vacuum projector as a state.
    pub fn vacuum(basis: Arc<FockBasis>) -> Self {
        Self::basis_state(basis.clone(), basis.vacuum_index()).expect("vacuum index valid")
    }

    pub fn operator(&self) -> &MatrixOperator {
        &self.op
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        self.op.basis()
    }

    pub fn trace(&self) -> C64 {
        self.op.trace()
    }

    pub fn purity(&self) -> f64 {
        self.op.mul(&self.op).trace().re
    }

    /// ⟨ψ|ρ|ψ⟩ for the pure target |index⟩ — the fidelity to a basis state.
    pub fn fidelity_to_basis_state(&self, index: usize) -> f64 {
        self.op.entries()[[index, index]].re
    }

    pub fn expectation(&self, observable: &MatrixOperator) -> C64 {
        observable.expectation(&self.op)
    }
}

/// One recorded point of a trajectory.
#[derive(Debug, Clone)]
pub struct Record {
    pub time: f64,
    pub trace: f64,
    pub trace_defect: f64,
    pub purity: f64,
    pub n_total: f64,
    /// Per-mode ⟨N_j⟩ in slot order (j = −J..J).
    pub n_modes: Vec<f64>,
    /// ⟨φ(x_s)⟩ at the requested sites.
    pub phi: Vec<f64>,
    pub herm_defect: f64,
    pub min_eig: f64,
    pub flags: String,
}

/// Time-ordered observable records plus the recorded states themselves.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub mode_indices: Vec<i32>,
    pub phi_sites: Vec<usize>,
    pub times: Vec<f64>,
    pub records: Vec<Record>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory has at least the initial record")
    }

    pub fn max_trace_defect(&self) -> f64 {
        self.records.iter().fold(0.0, |m, r| m.max(r.trace_defect))
    }

    pub fn max_herm_defect(&self) -> f64 {
        self.records.iter().fold(0.0, |m, r| m.max(r.herm_defect))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.records.iter().fold(f64::INFINITY, |m, r| m.min(r.min_eig))
    }

    /// CSV export: `t,trace,purity,N_total,N_{j=-J}..N_{j=J},monitor_flags`,
    /// full double precision, round-trip-safe formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("t,trace,purity,N_total");
        for j in &self.mode_indices {
            let _ = write!(out, ",N_{{j={j}}}");
        }
        out.push_str(",monitor_flags\n");
        for r in &self.records {
            let _ = write!(out, "{},{},{},{}", r.time, r.trace, r.purity, r.n_total);
            for n in &r.n_modes {
                let _ = write!(out, ",{n}");
            }
            let _ = writeln!(out, ",{}", r.flags);
        }
        out
    }
}

/// Evolution parameters for [`evolve`].
#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub t_max: f64,
    pub dt: f64,
    /// Record (and physicality-check) every this many steps. The initial
    /// state and the final step are always recorded.
    pub record_every: usize,
    /// Sites at which ⟨φ(x_s)⟩ is recorded.
    pub phi_sites: Vec<usize>,
}

impl EvolveOptions {
    pub fn new(t_max: f64, dt: f64, record_every: usize) -> Self {
        Self {
            t_max,
            dt,
            record_every,
            phi_sites: Vec::new(),
        }
    }
}

/// Integrate dρ/dt = L(ρ) with classical RK4 at fixed step `dt`.
///
/// Trace is never renormalized. Records carry the physicality monitors;
/// a trace drift beyond 1e−6 or an eigenvalue below −1e−5 aborts with a
/// diagnostic naming the offending step. Eigenvalue checks run at record
/// points on the Hermitized matrix.
pub fn evolve(
    rho0: &DensityMatrix,
    generator: &GklsGenerator,
    opts: &EvolveOptions,
) -> Result<Trajectory, CoreError> {
    if !(opts.dt > 0.0) {
        return Err(CoreError::InvalidParameters(format!(
            "dt must be positive, got {}",
            opts.dt
        )));
    }
    if opts.t_max < opts.dt {
        return Err(CoreError::InvalidParameters(format!(
            "t_max {} must be at least dt {}",
            opts.t_max, opts.dt
        )));
    }
    if !rho0.operator().same_basis(&MatrixOperator::zeros(generator.basis().clone())) {
        return Err(CoreError::BasisMismatch(
            "initial state does not live on the generator basis".into(),
        ));
    }
    let basis = generator.basis().clone();
    let record_every = opts.record_every.max(1);
    let n_steps = (opts.t_max / opts.dt).round().max(1.0) as usize;

    let observer = Observer::new(&basis, &opts.phi_sites);
    let mut rho = rho0.operator().clone();
    let mut times = Vec::new();
    let mut records = Vec::new();
    let mut states = Vec::new();

    let (rec, state) = observer.observe(&rho, 0, 0.0)?;
    times.push(0.0);
    records.push(rec);
    states.push(state);

    let dt = opts.dt;
    let half = C64::new(dt / 2.0, 0.0);
    let sixth = C64::new(dt / 6.0, 0.0);
    for step in 1..=n_steps {
        let k1 = generator.apply(&rho);
        let k2 = generator.apply(&rho.add(&k1.scale(half)));
        let k3 = generator.apply(&rho.add(&k2.scale(half)));
        let k4 = generator.apply(&rho.add(&k3.scale(C64::new(dt, 0.0))));
        let incr = k1
            .add(&k2.scale(C64::new(2.0, 0.0)))
            .add(&k3.scale(C64::new(2.0, 0.0)))
            .add(&k4);
        rho = rho.add(&incr.scale(sixth));

        if step % record_every == 0 || step == n_steps {
            let t = step as f64 * dt;
            let (rec, state) = observer.observe(&rho, step, t)?;
            times.push(t);
            records.push(rec);
            states.push(state);
        }
    }

    Ok(Trajectory {
        mode_indices: basis.modes().indices().collect(),
        phi_sites: opts.phi_sites.clone(),
        times,
        records,
        states,
    })
}

/// Computes trajectory records and enforces the breach thresholds. Shared
/// between the RK4 integrator and the collision-model engine.
pub(crate) struct Observer {
    number_ops: Vec<MatrixOperator>,
    phi_ops: Vec<MatrixOperator>,
}

impl Observer {
    pub(crate) fn new(basis: &Arc<FockBasis>, phi_sites: &[usize]) -> Self {
        let number_ops = basis
            .modes()
            .indices()
            .map(|j| number_operator(basis, j).expect("index in range"))
            .collect();
        let phi_ops = if phi_sites.is_empty() {
            Vec::new()
        } else {
            let fields = field_operators(basis);
            phi_sites
                .iter()
                .map(|&s| fields.phi(s % fields.site_count()).clone())
                .collect()
        };
        Self { number_ops, phi_ops }
    }

    pub(crate) fn observe(
        &self,
        rho: &MatrixOperator,
        step: usize,
        t: f64,
    ) -> Result<(Record, DensityMatrix), CoreError> {
        let trace = rho.trace();
        let trace_defect = ((trace.re - 1.0).powi(2) + trace.im.powi(2)).sqrt();
        let herm_defect = linalg::herm_defect(rho.entries());
        let min_eig = linalg::min_eigval_hermitized(rho.entries())?;
        if trace_defect > TRACE_BREACH {
            return Err(CoreError::PhysicalityBreach {
                step,
                time: t,
                what: "trace drift",
                value: trace_defect,
                threshold: TRACE_BREACH,
            });
        }
        if min_eig < MIN_EIG_BREACH {
            return Err(CoreError::PhysicalityBreach {
                step,
                time: t,
                what: "minimum eigenvalue",
                value: min_eig,
                threshold: MIN_EIG_BREACH,
            });
        }
        let mut flags = Vec::new();
        if trace_defect > TRACE_TOL {
            flags.push("trace_drift");
        }
        if herm_defect > HERMITICITY_TOL {
            flags.push("herm_defect");
        }
        if min_eig < MIN_EIG_TOL {
            flags.push("negative_eig");
        }
        let flags = if flags.is_empty() {
            "ok".to_string()
        } else {
            flags.join(";")
        };
        let n_modes: Vec<f64> = self.number_ops.iter().map(|n| n.expectation(rho).re).collect();
        let n_total = n_modes.iter().sum();
        let phi = self.phi_ops.iter().map(|p| p.expectation(rho).re).collect();
        let rec = Record {
            time: t,
            trace: trace.re,
            trace_defect,
            purity: rho.mul(rho).trace().re,
            n_total,
            n_modes,
            phi,
            herm_defect,
            min_eig,
            flags,
        };
        let state = DensityMatrix { op: rho.clone() };
        Ok((rec, state))
    }
}

/// Max-norm of the generator applied to a state: 0 exactly at fixed points.
pub fn stationarity_check(generator: &GklsGenerator, rho: &DensityMatrix) -> f64 {
    linalg::max_abs(generator.apply(rho.operator()).entries())
}

/// Least-squares slope of ln⟨N_j⟩ against t for signed mode index `j`.
///
/// Needs at least 10 records with ⟨N_j⟩ > 1e−12; for cutoff-safe initial
/// states under the decay dissipator this fits −2γω_j.
pub fn decay_fit(trajectory: &Trajectory, j: i32) -> Result<f64, CoreError> {
    let slot = trajectory
        .mode_indices
        .iter()
        .position(|&idx| idx == j)
        .ok_or(CoreError::ModeIndexOutOfRange {
            index: j,
            max_index: *trajectory.mode_indices.last().unwrap_or(&0),
        })?;
    let points: Vec<(f64, f64)> = trajectory
        .records
        .iter()
        .filter(|r| r.n_modes[slot] > 1e-12)
        .map(|r| (r.time, r.n_modes[slot].ln()))
        .collect();
    if points.len() < 10 {
        return Err(CoreError::InsufficientData {
            needed: 10,
            found: points.len(),
        });
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|(t, _)| t).sum();
    let sy: f64 = points.iter().map(|(_, y)| y).sum();
    let sxx: f64 = points.iter().map(|(t, _)| t * t).sum();
    let sxy: f64 = points.iter().map(|(t, y)| t * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(CoreError::InsufficientData {
            needed: 10,
            found: points.len(),
        });
    }
    Ok((n * sxy - sx * sy) / denom)
}
