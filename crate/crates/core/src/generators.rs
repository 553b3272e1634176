//! Physical operators and GKLS generators on the truncated Fock space.
//!
//! Builds the free Hamiltonian H = Σ_j ω_j a_j†a_j (normal-ordered, so the
//! vacuum energy is exactly zero), the total momentum P = Σ_j k_j a_j†a_j,
//! the site-sampled field operators φ(x_s) and π(x_s) with their
//! positive/negative-frequency parts, and the two dissipators:
//!
//! - decay ("poulin"): one jump operator per mode, A_j = √(2γω_j) a_j, so
//!   the field amplitude decays as e^{−γω_j t} and ⟨N_j⟩ as e^{−2γω_j t};
//! - field-coupling decoherence ("blp"): one Hermitian jump per site,
//!   A_s = g √(L/M) φ(x_s), the averaged form of coupling the field to
//!   ultra-local classical white noise.
//!
//! [`GklsGenerator`] exposes the two superoperator actions (on states and,
//! adjointly, on observables) via plain matrix arithmetic.

use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::{
    error::CoreError,
    fockspace::{annihilation, number_operator, FockBasis, MatrixOperator},
    C64,
};

/// Free Hamiltonian Σ_j ω_j a_j†a_j, diagonal in the occupation basis.
pub fn hamiltonian(basis: &Arc<FockBasis>) -> MatrixOperator {
    diagonal_mode_sum(basis, basis.modes().frequencies())
}

/// Total momentum Σ_j k_j a_j†a_j, diagonal in the occupation basis.
pub fn momentum(basis: &Arc<FockBasis>) -> MatrixOperator {
    diagonal_mode_sum(basis, basis.modes().momenta())
}

fn diagonal_mode_sum(basis: &Arc<FockBasis>, weights: &[f64]) -> MatrixOperator {
    let d = basis.dim();
    let m = basis.modes().mode_count();
    let mut entries = Array2::zeros((d, d));
    for i in 0..d {
        let mut acc = 0.0;
        for slot in 0..m {
            acc += weights[slot] * basis.occupation_at(i, slot) as f64;
        }
        entries[[i, i]] = C64::new(acc, 0.0);
    }
    MatrixOperator::new(basis.clone(), entries).expect("shape is consistent by construction")
}

/// Site-sampled field operators on x_s = sL/M, s = 0..M−1.
///
/// φ(x) = Σ_j (2ω_jL)^{−1/2} (a_j e^{ik_jx} + a_j† e^{−ik_jx}),
/// π(x) = π⁺(x) + π⁻(x) with π⁺ = −i Σ_j √(ω_j/2L) a_j e^{ik_jx} the
/// positive-frequency (annihilation) part and π⁻ = (π⁺)†.
pub struct FieldOperators {
    basis: Arc<FockBasis>,
    positions: Vec<f64>,
    phi: Vec<MatrixOperator>,
    pi: Vec<MatrixOperator>,
    pi_plus: Vec<MatrixOperator>,
    pi_minus: Vec<MatrixOperator>,
}

impl FieldOperators {
    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn phi(&self, site: usize) -> &MatrixOperator {
        &self.phi[site]
    }

    pub fn pi(&self, site: usize) -> &MatrixOperator {
        &self.pi[site]
    }

    pub fn pi_plus(&self, site: usize) -> &MatrixOperator {
        &self.pi_plus[site]
    }

    pub fn pi_minus(&self, site: usize) -> &MatrixOperator {
        &self.pi_minus[site]
    }

    pub fn site_count(&self) -> usize {
        self.positions.len()
    }
}

/// Build all four site-indexed operator families.
pub fn field_operators(basis: &Arc<FockBasis>) -> FieldOperators {
    let modes = basis.modes();
    let m = modes.mode_count();
    let l = modes.box_length();
    let ladder: Vec<MatrixOperator> = modes
        .indices()
        .map(|j| annihilation(basis, j).expect("index in range"))
        .collect();

    let positions: Vec<f64> = (0..m).map(|s| s as f64 * l / m as f64).collect();
    let mut phi = Vec::with_capacity(m);
    let mut pi = Vec::with_capacity(m);
    let mut pi_plus = Vec::with_capacity(m);
    let mut pi_minus = Vec::with_capacity(m);

    for &x in &positions {
        let mut phi_s = MatrixOperator::zeros(basis.clone());
        let mut pi_plus_s = MatrixOperator::zeros(basis.clone());
        for (slot, j) in modes.indices().enumerate() {
            let k = modes.momentum_of(j).expect("in range");
            let w = modes.frequency_of(j).expect("in range");
            let plane = C64::new(0.0, k * x).exp();
            let a_part = ladder[slot].scale(plane);
            // φ: (2ωL)^{−1/2} (a e^{ikx} + h.c.)
            let f = 1.0 / (2.0 * w * l).sqrt();
            phi_s = phi_s
                .add(&a_part.scale(C64::new(f, 0.0)))
                .add(&a_part.dagger().scale(C64::new(f, 0.0)));
            // π⁺: −i √(ω/2L) a e^{ikx}
            let g = (w / (2.0 * l)).sqrt();
            pi_plus_s = pi_plus_s.add(&a_part.scale(C64::new(0.0, -g)));
        }
        let pi_minus_s = pi_plus_s.dagger();
        pi.push(pi_plus_s.add(&pi_minus_s));
        phi.push(phi_s);
        pi_plus.push(pi_plus_s);
        pi_minus.push(pi_minus_s);
    }

    FieldOperators {
        basis: basis.clone(),
        positions,
        phi,
        pi,
        pi_plus,
        pi_minus,
    }
}

/// Which dissipative mechanism a generator carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DissipatorKind {
    Poulin,
    Blp,
    None,
}

/// Orientation of the decay jump operators: `Decay` uses a_j (bosons are
/// absorbed), `Heating` uses a_j† (the opposite ordering, kept as an
/// escape hatch; non-default).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JumpOrdering {
    Decay,
    Heating,
}

impl Default for JumpOrdering {
    fn default() -> Self {
        JumpOrdering::Decay
    }
}

/// A dissipator: kind, rates, and the jump operators with rates folded in.
pub struct DissipatorSpec {
    kind: DissipatorKind,
    gamma: f64,
    g: f64,
    ordering: JumpOrdering,
    jump_ops: Vec<MatrixOperator>,
}

impl DissipatorSpec {
    /// Mode-decay dissipator: A_j = √(2γω_j) a_j for every mode.
    pub fn poulin(
        basis: &Arc<FockBasis>,
        gamma: f64,
        ordering: JumpOrdering,
    ) -> Result<Self, CoreError> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(CoreError::InvalidParameters(format!(
                "gamma must be non-negative, got {gamma}"
            )));
        }
        let mut jump_ops = Vec::new();
        for j in basis.modes().indices().collect::<Vec<_>>() {
            let w = basis.modes().frequency_of(j)?;
            let rate = (2.0 * gamma * w).sqrt();
            let a = annihilation(basis, j)?;
            let op = match ordering {
                JumpOrdering::Decay => a,
                JumpOrdering::Heating => a.dagger(),
            };
            jump_ops.push(op.scale(C64::new(rate, 0.0)));
        }
        Ok(Self {
            kind: DissipatorKind::Poulin,
            gamma,
            g: 0.0,
            ordering,
            jump_ops,
        })
    }

    /// Site-local field-coupling dissipator: A_s = g √(L/M) φ(x_s).
    /// The √(L/M) factor folds the ∫dx measure into the jump operators.
    pub fn blp(basis: &Arc<FockBasis>, g: f64) -> Result<Self, CoreError> {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(CoreError::InvalidParameters(format!(
                "g must be non-negative, got {g}"
            )));
        }
        let fields = field_operators(basis);
        let m = basis.modes().mode_count() as f64;
        let weight = g * (basis.modes().box_length() / m).sqrt();
        let jump_ops = (0..fields.site_count())
            .map(|s| fields.phi(s).scale(C64::new(weight, 0.0)))
            .collect();
        Ok(Self {
            kind: DissipatorKind::Blp,
            gamma: 0.0,
            g,
            ordering: JumpOrdering::Decay,
            jump_ops,
        })
    }

    /// No dissipation: purely unitary dynamics.
    pub fn none() -> Self {
        Self {
            kind: DissipatorKind::None,
            gamma: 0.0,
            g: 0.0,
            ordering: JumpOrdering::Decay,
            jump_ops: Vec::new(),
        }
    }

    pub fn kind(&self) -> DissipatorKind {
        self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn coupling(&self) -> f64 {
        self.g
    }

    pub fn ordering(&self) -> JumpOrdering {
        self.ordering
    }

    pub fn jump_ops(&self) -> &[MatrixOperator] {
        &self.jump_ops
    }
}

struct Jump {
    a: MatrixOperator,
    a_dag: MatrixOperator,
    a_dag_a: MatrixOperator,
}

/// Handle for a GKLS generator with the two contractual actions:
///
/// apply(ρ)        = −i[H,ρ] + Σ_n (A_nρA_n† − ½{A_n†A_n, ρ})
/// apply_adjoint(X) =  i[H,X] + Σ_n (A_n†XA_n − ½{A_n†A_n, X})
pub struct GklsGenerator {
    basis: Arc<FockBasis>,
    hamiltonian: Option<MatrixOperator>,
    jumps: Vec<Jump>,
}

impl GklsGenerator {
    /// Build from a Hamiltonian (or `None` for a pure dissipator) and a
    /// dissipator spec. All operators must share one basis.
    pub fn new(
        hamiltonian: Option<MatrixOperator>,
        spec: &DissipatorSpec,
        basis: &Arc<FockBasis>,
    ) -> Result<Self, CoreError> {
        if let Some(h) = &hamiltonian {
            if !h
                .same_basis(&MatrixOperator::zeros(basis.clone()))
            {
                return Err(CoreError::BasisMismatch(
                    "Hamiltonian does not live on the generator basis".into(),
                ));
            }
        }
        let probe = MatrixOperator::zeros(basis.clone());
        for op in spec.jump_ops() {
            if !op.same_basis(&probe) {
                return Err(CoreError::BasisMismatch(
                    "jump operator does not live on the generator basis".into(),
                ));
            }
        }
        let jumps = spec
            .jump_ops()
            .iter()
            .map(|a| {
                let a_dag = a.dagger();
                let a_dag_a = a_dag.mul(a);
                Jump {
                    a: a.clone(),
                    a_dag,
                    a_dag_a,
                }
            })
            .collect();
        Ok(Self {
            basis: basis.clone(),
            hamiltonian,
            jumps,
        })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn hamiltonian(&self) -> Option<&MatrixOperator> {
        self.hamiltonian.as_ref()
    }

    /// The generator action on states.
    pub fn apply(&self, rho: &MatrixOperator) -> MatrixOperator {
        let mut out = match &self.hamiltonian {
            Some(h) => h.commutator(rho).scale(C64::new(0.0, -1.0)),
            None => MatrixOperator::zeros(self.basis.clone()),
        };
        for jump in &self.jumps {
            let sandwich = jump.a.mul(rho).mul(&jump.a_dag);
            let anti = jump.a_dag_a.anticommutator(rho).scale(C64::new(0.5, 0.0));
            out = out.add(&sandwich).sub(&anti);
        }
        out
    }

    /// The adjoint (Heisenberg) action on observables.
    pub fn apply_adjoint(&self, x: &MatrixOperator) -> MatrixOperator {
        let mut out = match &self.hamiltonian {
            Some(h) => h.commutator(x).scale(C64::new(0.0, 1.0)),
            None => MatrixOperator::zeros(self.basis.clone()),
        };
        for jump in &self.jumps {
            let sandwich = jump.a_dag.mul(x).mul(&jump.a);
            let anti = jump.a_dag_a.anticommutator(x).scale(C64::new(0.5, 0.0));
            out = out.add(&sandwich).sub(&anti);
        }
        out
    }
}

/// Boson production rate of the field-coupling dissipator at the vacuum:
/// tr(N_total · 𝒟_blp(|vac⟩⟨vac|)), evaluated by matrix arithmetic.
///
/// On the mode sum this equals g² Σ_j 1/(2ω_j); the matrix route is the
/// contractual value and the sum is its cross-check.
pub fn blp_vacuum_production_rate(basis: &Arc<FockBasis>, g: f64) -> Result<f64, CoreError> {
    let spec = DissipatorSpec::blp(basis, g)?;
    let gen = GklsGenerator::new(None, &spec, basis)?;
    let d = basis.dim();
    let mut vac = Array2::zeros((d, d));
    vac[[basis.vacuum_index(), basis.vacuum_index()]] = C64::new(1.0, 0.0);
    let vac = MatrixOperator::new(basis.clone(), vac)?;
    let mut n_total = MatrixOperator::zeros(basis.clone());
    for j in basis.modes().indices().collect::<Vec<_>>() {
        n_total = n_total.add(&number_operator(basis, j)?);
    }
    Ok(n_total.expectation(&gen.apply(&vac)).re)
}

/// Closed mode-sum form of [`blp_vacuum_production_rate`]: g² Σ_j 1/(2ω_j).
pub fn blp_vacuum_rate_mode_sum(basis: &Arc<FockBasis>, g: f64) -> f64 {
    g * g
        * basis
            .modes()
            .frequencies()
            .iter()
            .map(|w| 1.0 / (2.0 * w))
            .sum::<f64>()
}

/// Vacuum projector |vac⟩⟨vac| as a matrix operator.
pub fn vacuum_projector(basis: &Arc<FockBasis>) -> MatrixOperator {
    let d = basis.dim();
    let mut entries = Array2::zeros((d, d));
    entries[[basis.vacuum_index(), basis.vacuum_index()]] = C64::new(1.0, 0.0);
    MatrixOperator::new(basis.clone(), entries).expect("shape consistent")
}
