//! Momentum lattice, truncated multimode Fock basis, and mode operators.
//!
//! Natural units ħ = c = 1 throughout. Modes live on a periodic box of
//! length L with k_j = 2πj/L for j ∈ {−J,…,J} and ω_j = √(k_j² + m²).
//! The basis truncates each mode at `n_max` quanta, so the total dimension
//! is (n_max+1)^(2J+1). Occupation vectors are enumerated with mode j = −J
//! slowest (most significant digit), which fixes the basis ordering that
//! all golden files rely on.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;

use crate::{error::CoreError, linalg, C64};

/// The discrete momentum lattice: box length, index range, mass, and the
/// derived per-mode momenta and frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    box_length: f64,
    max_index: i32,
    mass: f64,
    momenta: Vec<f64>,
    frequencies: Vec<f64>,
}

impl ModeSet {
    pub fn new(box_length: f64, max_index: i32, mass: f64) -> Result<Self, CoreError> {
        if !(box_length > 0.0) || !box_length.is_finite() {
            return Err(CoreError::InvalidModeSet(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        if max_index < 0 {
            return Err(CoreError::InvalidModeSet(format!(
                "max index must be non-negative, got {max_index}"
            )));
        }
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(CoreError::InvalidModeSet(format!(
                "mass must be non-negative, got {mass}"
            )));
        }
        let momenta: Vec<f64> = (-max_index..=max_index)
            .map(|j| 2.0 * PI * (j as f64) / box_length)
            .collect();
        let frequencies = momenta.iter().map(|k| (k * k + mass * mass).sqrt()).collect();
        Ok(Self {
            box_length,
            max_index,
            mass,
            momenta,
            frequencies,
        })
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn max_index(&self) -> i32 {
        self.max_index
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// M = 2J + 1.
    pub fn mode_count(&self) -> usize {
        2 * self.max_index as usize + 1
    }

    /// Signed mode indices −J..=J in storage order.
    pub fn indices(&self) -> impl Iterator<Item = i32> + '_ {
        -self.max_index..=self.max_index
    }

    /// Storage slot of signed index j.
    pub fn slot_of(&self, j: i32) -> Result<usize, CoreError> {
        if j.abs() > self.max_index {
            return Err(CoreError::ModeIndexOutOfRange {
                index: j,
                max_index: self.max_index,
            });
        }
        Ok((j + self.max_index) as usize)
    }

    pub fn momentum_of(&self, j: i32) -> Result<f64, CoreError> {
        Ok(self.momenta[self.slot_of(j)?])
    }

    pub fn frequency_of(&self, j: i32) -> Result<f64, CoreError> {
        Ok(self.frequencies[self.slot_of(j)?])
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }
}

/// Truncated multimode occupation basis over a [`ModeSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    modes: ModeSet,
    n_max: u32,
    dim: usize,
}

impl FockBasis {
    pub fn new(modes: ModeSet, n_max: u32) -> Result<Arc<Self>, CoreError> {
        if n_max == 0 {
            return Err(CoreError::InvalidBasis("cutoff n_max must be ≥ 1".into()));
        }
        let per_mode = n_max as usize + 1;
        let mut dim: usize = 1;
        for _ in 0..modes.mode_count() {
            dim = dim.checked_mul(per_mode).ok_or_else(|| {
                CoreError::InvalidBasis("basis dimension overflows usize".into())
            })?;
            if dim > 1 << 22 {
                return Err(CoreError::InvalidBasis(format!(
                    "basis dimension {dim}+ is beyond desk scale"
                )));
            }
        }
        Ok(Arc::new(Self { modes, n_max, dim }))
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Occupation vector (n_{−J},…,n_J) of a basis index.
    pub fn occupations(&self, index: usize) -> Vec<u32> {
        debug_assert!(index < self.dim);
        let m = self.modes.mode_count();
        let base = self.n_max as usize + 1;
        let mut occ = vec![0u32; m];
        let mut rest = index;
        for slot in (0..m).rev() {
            occ[slot] = (rest % base) as u32;
            rest /= base;
        }
        occ
    }

    /// Basis index of an occupation vector; inverse of [`occupations`](Self::occupations).
    pub fn index_of(&self, occ: &[u32]) -> Result<usize, CoreError> {
        if occ.len() != self.modes.mode_count() || occ.iter().any(|&n| n > self.n_max) {
            return Err(CoreError::InvalidOccupation(occ.to_vec()));
        }
        let base = self.n_max as usize + 1;
        let mut index = 0usize;
        for &n in occ {
            index = index * base + n as usize;
        }
        Ok(index)
    }

    /// Occupation of mode slot `slot` in basis state `index`, without
    /// materializing the full vector.
    pub fn occupation_at(&self, index: usize, slot: usize) -> u32 {
        let m = self.modes.mode_count();
        let base = self.n_max as usize + 1;
        let mut rest = index;
        for _ in slot + 1..m {
            rest /= base;
        }
        (rest % base) as u32
    }

    /// Index of the vacuum state (all occupations zero).
    pub fn vacuum_index(&self) -> usize {
        0
    }
}

/// A complex matrix acting on a [`FockBasis`], tagged with its basis.
///
/// Binary operations require identical bases; mixing bases is a contract
/// violation and panics in the arithmetic helpers (the fallible entry
/// points of other modules check first and return [`CoreError::BasisMismatch`]).
#[derive(Debug, Clone)]
pub struct MatrixOperator {
    basis: Arc<FockBasis>,
    entries: Array2<C64>,
}

impl MatrixOperator {
    pub fn new(basis: Arc<FockBasis>, entries: Array2<C64>) -> Result<Self, CoreError> {
        if entries.nrows() != basis.dim() || entries.ncols() != basis.dim() {
            return Err(CoreError::InvalidBasis(format!(
                "matrix shape {:?} does not match basis dimension {}",
                entries.dim(),
                basis.dim()
            )));
        }
        Ok(Self { basis, entries })
    }

    pub fn zeros(basis: Arc<FockBasis>) -> Self {
        let d = basis.dim();
        Self {
            basis,
            entries: Array2::zeros((d, d)),
        }
    }

    pub fn identity(basis: Arc<FockBasis>) -> Self {
        let d = basis.dim();
        Self {
            basis,
            entries: Array2::eye(d),
        }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<C64> {
        self.entries
    }

    pub fn same_basis(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis) || *self.basis == *other.basis
    }

    fn check_same_basis(&self, other: &Self) {
        assert!(
            self.same_basis(other),
            "operators live on different bases (dims {} vs {})",
            self.basis.dim(),
            other.basis.dim()
        );
    }

    pub fn dagger(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            entries: linalg::dagger(&self.entries),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            basis: self.basis.clone(),
            entries: self.entries.mapv(|z| z * c),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_basis(other);
        Self {
            basis: self.basis.clone(),
            entries: &self.entries + &other.entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same_basis(other);
        Self {
            basis: self.basis.clone(),
            entries: &self.entries - &other.entries,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same_basis(other);
        Self {
            basis: self.basis.clone(),
            entries: self.entries.dot(&other.entries),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self))
    }

    pub fn trace(&self) -> C64 {
        self.entries.diag().sum()
    }

    /// tr(self · rho), the expectation value when `rho` is a state.
    pub fn expectation(&self, rho: &Self) -> C64 {
        self.check_same_basis(rho);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.entries.nrows() {
            for k in 0..self.entries.ncols() {
                acc += self.entries[[i, k]] * rho.entries[[k, i]];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.check_same_basis(other);
        linalg::max_abs(&(&self.entries - &other.entries))
    }
}

/// Matrix of the annihilation operator a_j: a_j|…,n_j,…⟩ = √n_j |…,n_j−1,…⟩.
pub fn annihilation(basis: &Arc<FockBasis>, j: i32) -> Result<MatrixOperator, CoreError> {
    let slot = basis.modes().slot_of(j)?;
    let d = basis.dim();
    let base = basis.n_max() as usize + 1;
    // stride of one quantum in mode `slot` within the mixed-radix index
    let m = basis.modes().mode_count();
    let stride = base.pow((m - 1 - slot) as u32);
    let mut entries = Array2::zeros((d, d));
    for col in 0..d {
        let n = basis.occupation_at(col, slot);
        if n > 0 {
            let row = col - stride;
            entries[[row, col]] = C64::new((n as f64).sqrt(), 0.0);
        }
    }
    MatrixOperator::new(basis.clone(), entries)
}

/// Matrix of a_j†, the conjugate transpose of [`annihilation`].
pub fn creation(basis: &Arc<FockBasis>, j: i32) -> Result<MatrixOperator, CoreError> {
    Ok(annihilation(basis, j)?.dagger())
}

/// Diagonal occupation-number operator N_j = a_j† a_j.
pub fn number_operator(basis: &Arc<FockBasis>, j: i32) -> Result<MatrixOperator, CoreError> {
    let slot = basis.modes().slot_of(j)?;
    let d = basis.dim();
    let mut entries = Array2::zeros((d, d));
    for i in 0..d {
        entries[[i, i]] = C64::new(basis.occupation_at(i, slot) as f64, 0.0);
    }
    MatrixOperator::new(basis.clone(), entries)
}

/// Projector onto occupation `n` in mode `j` (diagonal).
pub fn occupation_projector(
    basis: &Arc<FockBasis>,
    j: i32,
    n: u32,
) -> Result<MatrixOperator, CoreError> {
    let slot = basis.modes().slot_of(j)?;
    let d = basis.dim();
    let mut entries = Array2::zeros((d, d));
    for i in 0..d {
        if basis.occupation_at(i, slot) == n {
            entries[[i, i]] = C64::new(1.0, 0.0);
        }
    }
    MatrixOperator::new(basis.clone(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_mode_basis(n_max: u32) -> Arc<FockBasis> {
        FockBasis::new(ModeSet::new(2.0 * PI, 0, 1.0).unwrap(), n_max).unwrap()
    }

    fn desk_basis() -> Arc<FockBasis> {
        FockBasis::new(ModeSet::new(2.0 * PI, 1, 1.0).unwrap(), 2).unwrap()
    }

    #[test]
    fn mode_set_geometry() {
        let ms = ModeSet::new(2.0 * PI, 1, 1.0).unwrap();
        assert_eq!(ms.mode_count(), 3);
        assert!((ms.momentum_of(1).unwrap() - 1.0).abs() < 1e-15);
        assert!((ms.momentum_of(-1).unwrap() + 1.0).abs() < 1e-15);
        assert!((ms.frequency_of(0).unwrap() - 1.0).abs() < 1e-15);
        assert!((ms.frequency_of(1).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        // ω even in j, ω ≥ m
        for j in ms.indices().collect::<Vec<_>>() {
            let w = ms.frequency_of(j).unwrap();
            assert!((w - ms.frequency_of(-j).unwrap()).abs() < 1e-15);
            assert!(w >= ms.mass());
        }
    }

    #[test]
    fn dispersion_relation_exact() {
        // ω² − k² = m² to relative 1e−12 over an assortment of lattices
        for (l, j_max, m) in [(2.0 * PI, 1, 1.0), (3.7, 4, 0.5), (11.0, 7, 2.25), (1.0, 3, 0.0)] {
            let ms = ModeSet::new(l, j_max, m).unwrap();
            for j in ms.indices().collect::<Vec<_>>() {
                let k = ms.momentum_of(j).unwrap();
                let w = ms.frequency_of(j).unwrap();
                let lhs = w * w - k * k;
                let scale = (w * w).max(1e-300);
                assert!(
                    (lhs - m * m).abs() <= 1e-12 * scale,
                    "j={j} lhs={lhs} m2={}",
                    m * m
                );
            }
        }
    }

    #[test]
    fn basis_indexing_round_trips() {
        let basis = desk_basis();
        assert_eq!(basis.dim(), 27);
        for idx in 0..basis.dim() {
            let occ = basis.occupations(idx);
            assert_eq!(basis.index_of(&occ).unwrap(), idx);
            for (slot, &n) in occ.iter().enumerate() {
                assert_eq!(basis.occupation_at(idx, slot), n);
            }
        }
        // j = −J is the slowest digit
        let occ = basis.occupations(1);
        assert_eq!(occ, vec![0, 0, 1]);
        let occ = basis.occupations(9);
        assert_eq!(occ, vec![1, 0, 0]);
    }

    #[test]
    fn annihilation_single_mode_rows() {
        // a|0⟩ = 0, a|1⟩ = |0⟩, a|2⟩ = √2|1⟩
        let basis = single_mode_basis(2);
        let a = annihilation(&basis, 0).unwrap();
        let e = a.entries();
        assert_eq!(e.nrows(), 3);
        assert!((e[[0, 1]] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((e[[1, 2]] - C64::new(2f64.sqrt(), 0.0)).norm() < 1e-15);
        let nonzero: usize = e.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn creation_is_adjoint_of_annihilation() {
        let basis = desk_basis();
        for j in [-1, 0, 1] {
            let a = annihilation(&basis, j).unwrap();
            let adag = creation(&basis, j).unwrap();
            assert!(adag.max_abs_diff(&a.dagger()) < 1e-15);
        }
    }

    #[test]
    fn truncation_edge_commutator() {
        // [a, a†] = I − 4 P_{|3⟩} on a single mode with n_max = 3
        let basis = single_mode_basis(3);
        let a = annihilation(&basis, 0).unwrap();
        let comm = a.commutator(&a.dagger());
        let expected = MatrixOperator::identity(basis.clone())
            .sub(&occupation_projector(&basis, 0, 3).unwrap().scale(C64::new(4.0, 0.0)));
        assert!(comm.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn truncation_edge_law_quantified() {
        // [a_j, a_j†] = I − (n_max+1) P_{n_max, j} for J ∈ {0, 1}, n_max ≤ 4
        for j_max in [0, 1] {
            for n_max in 1..=4u32 {
                let basis =
                    FockBasis::new(ModeSet::new(2.0 * PI, j_max, 1.0).unwrap(), n_max).unwrap();
                for j in basis.modes().indices().collect::<Vec<_>>() {
                    let a = annihilation(&basis, j).unwrap();
                    let comm = a.commutator(&a.dagger());
                    let proj = occupation_projector(&basis, j, n_max).unwrap();
                    let expected = MatrixOperator::identity(basis.clone())
                        .sub(&proj.scale(C64::new((n_max + 1) as f64, 0.0)));
                    assert!(
                        comm.max_abs_diff(&expected) < 1e-14,
                        "J={j_max} n_max={n_max} j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn distinct_modes_commute() {
        let basis = desk_basis();
        for i in [-1, 0, 1] {
            for j in [-1, 0, 1] {
                if i == j {
                    continue;
                }
                let ai = annihilation(&basis, i).unwrap();
                let aj = annihilation(&basis, j).unwrap();
                assert!(linalg::max_abs(ai.commutator(&aj).entries()) < 1e-15);
                assert!(linalg::max_abs(ai.commutator(&aj.dagger()).entries()) < 1e-15);
            }
        }
    }

    #[test]
    fn ladder_matrices_are_real() {
        let basis = desk_basis();
        for j in [-1, 0, 1] {
            let a = annihilation(&basis, j).unwrap();
            assert!(a.entries().iter().all(|z| z.im == 0.0));
            assert!(creation(&basis, j).unwrap().entries().iter().all(|z| z.im == 0.0));
        }
    }

    #[test]
    fn number_operator_diagonal_and_vacuum() {
        let basis = single_mode_basis(2);
        let n = number_operator(&basis, 0).unwrap();
        for (i, expect) in [0.0, 1.0, 2.0].iter().enumerate() {
            assert!((n.entries()[[i, i]].re - expect).abs() < 1e-15);
        }

        // Σ_j N_j annihilates the vacuum; expectation 1 in one-boson states
        let basis = desk_basis();
        let mut total = MatrixOperator::zeros(basis.clone());
        for j in [-1, 0, 1] {
            total = total.add(&number_operator(&basis, j).unwrap());
        }
        let vac = basis.vacuum_index();
        for i in 0..basis.dim() {
            assert!(total.entries()[[i, vac]].norm() < 1e-15);
        }
        for j in [-1i32, 0, 1] {
            let mut occ = vec![0u32; 3];
            occ[basis.modes().slot_of(j).unwrap()] = 1;
            let idx = basis.index_of(&occ).unwrap();
            assert!((total.entries()[[idx, idx]].re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn out_of_range_mode_index_is_an_error() {
        let basis = desk_basis();
        assert!(matches!(
            annihilation(&basis, 2),
            Err(CoreError::ModeIndexOutOfRange { .. })
        ));
        assert!(matches!(
            number_operator(&basis, -5),
            Err(CoreError::ModeIndexOutOfRange { .. })
        ));
    }
}
