//! Exact finite-boost transformation of second-order constant-coefficient
//! field equations in 1+1 dimensions.
//!
//! The equation c_tt ∂_t²φ + c_tx ∂_t∂_xφ + c_xx ∂_x²φ + c_0 φ = 0 is
//! boosted by substituting ∂_t → coshζ ∂_t' + sinhζ ∂_x' and
//! ∂_x → sinhζ ∂_t' + coshζ ∂_x' and collecting — finite rapidity, so no
//! linearization tolerances enter. Form invariance holds exactly when the
//! principal part is proportional to the Minkowski metric (c_tx = 0 and
//! c_tt = −c_xx); the damped field equation with coefficients
//! (1, 0, +γ², −γ²m²) is not of that form and picks up the cross term
//! sinh(2ζ)(1 + γ²) under any boost.

use serde::Serialize;

use crate::{error::CoreError, C64};

/// Coefficients of c_tt ∂_t²φ + c_tx ∂_t∂_xφ + c_xx ∂_x²φ + c_0 φ = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdeCoeffs {
    pub c_tt: f64,
    pub c_tx: f64,
    pub c_xx: f64,
    pub c_0: f64,
}

impl PdeCoeffs {
    pub fn new(c_tt: f64, c_tx: f64, c_xx: f64, c_0: f64) -> Result<Self, CoreError> {
        if c_tt == 0.0 && c_tx == 0.0 && c_xx == 0.0 {
            return Err(CoreError::InvalidParameters(
                "all second-order coefficients are zero".into(),
            ));
        }
        Ok(Self { c_tt, c_tx, c_xx, c_0 })
    }

    /// Klein–Gordon: ∂_t²φ − ∂_x²φ + m²φ = 0.
    pub fn klein_gordon(mass: f64) -> Self {
        Self {
            c_tt: 1.0,
            c_tx: 0.0,
            c_xx: -1.0,
            c_0: mass * mass,
        }
    }

    /// The damped field equation ∂_t²φ = γ²(m² − ∂_x²)φ, i.e.
    /// coefficients (1, 0, +γ², −γ²m²).
    pub fn damped_field(gamma: f64, mass: f64) -> Self {
        Self {
            c_tt: 1.0,
            c_tx: 0.0,
            c_xx: gamma * gamma,
            c_0: -gamma * gamma * mass * mass,
        }
    }
}

/// Transform the coefficients by a finite boost of rapidity ζ.
pub fn boost(c: &PdeCoeffs, zeta: f64) -> PdeCoeffs {
    let ch = zeta.cosh();
    let sh = zeta.sinh();
    PdeCoeffs {
        c_tt: c.c_tt * ch * ch + c.c_tx * ch * sh + c.c_xx * sh * sh,
        c_tx: 2.0 * ch * sh * (c.c_tt + c.c_xx) + c.c_tx * (ch * ch + sh * sh),
        c_xx: c.c_tt * sh * sh + c.c_tx * ch * sh + c.c_xx * ch * ch,
        c_0: c.c_0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Invariant,
    NonInvariant,
}

/// Outcome of [`invariance_verdict`]: the verdict plus, for non-invariant
/// coefficients, the witness rapidity and the cross term it produces.
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub input: PdeCoeffs,
    pub verdict: Verdict,
    pub witness_zeta: Option<f64>,
    pub witness_cross_term: Option<f64>,
    pub boosted: Option<PdeCoeffs>,
}

pub const DEFAULT_WITNESS_ZETA: f64 = 0.3;

/// Boost-form invariance holds iff c_tx = 0 and c_tt = −c_xx (principal
/// part proportional to the Minkowski metric). Otherwise the report
/// carries a witness rapidity and the nonzero transformed cross term.
pub fn invariance_verdict(c: &PdeCoeffs, witness_zeta: f64) -> InvarianceReport {
    if c.c_tx == 0.0 && c.c_tt == -c.c_xx {
        InvarianceReport {
            input: *c,
            verdict: Verdict::Invariant,
            witness_zeta: None,
            witness_cross_term: None,
            boosted: None,
        }
    } else {
        let boosted = boost(c, witness_zeta);
        InvarianceReport {
            input: *c,
            verdict: Verdict::NonInvariant,
            witness_zeta: Some(witness_zeta),
            witness_cross_term: Some(boosted.c_tx),
            boosted: Some(boosted),
        }
    }
}

/// Plane-wave substitution φ ∝ e^{ikx + λt}: solves
/// c_tt λ² + i k c_tx λ − c_xx k² + c_0 = 0 for the two roots λ.
pub fn dispersion_check(c: &PdeCoeffs, k: f64) -> Result<[C64; 2], CoreError> {
    if c.c_tt == 0.0 {
        return Err(CoreError::InvalidParameters(
            "dispersion roots need c_tt ≠ 0".into(),
        ));
    }
    let a = C64::new(c.c_tt, 0.0);
    let b = C64::new(0.0, k * c.c_tx);
    let cc = C64::new(-c.c_xx * k * k + c.c_0, 0.0);
    let disc = (b * b - 4.0 * a * cc).sqrt();
    let l1 = (-b - disc) / (2.0 * a);
    let l2 = (-b + disc) / (2.0 * a);
    // deterministic order: by real part, then imaginary
    if (l1.re, l1.im) <= (l2.re, l2.im) {
        Ok([l1, l2])
    } else {
        Ok([l2, l1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn klein_gordon_is_exactly_form_invariant() {
        let kg = PdeCoeffs::klein_gordon(1.0);
        for zeta in [0.1, 0.3, 1.0, -0.7, 2.5] {
            let b = boost(&kg, zeta);
            assert!((b.c_tt - 1.0).abs() < 1e-12, "zeta={zeta}");
            assert!(b.c_tx.abs() < 1e-12);
            assert!((b.c_xx + 1.0).abs() < 1e-12);
            assert_eq!(b.c_0, kg.c_0);
        }
        assert_eq!(
            invariance_verdict(&kg, DEFAULT_WITNESS_ZETA).verdict,
            Verdict::Invariant
        );
    }

    #[test]
    fn zero_rapidity_is_identity() {
        let c = PdeCoeffs::new(0.3, -1.2, 2.0, 4.5).unwrap();
        let b = boost(&c, 0.0);
        assert_eq!(b, c);
    }

    #[test]
    fn damped_field_cross_term_closed_form() {
        // γ=0.2, ζ=0.3: c'_tx = sinh(0.6)·(1 + 0.04)
        let c = PdeCoeffs::damped_field(0.2, 1.0);
        let b = boost(&c, 0.3);
        let expected = (0.6f64).sinh() * 1.04;
        assert!((b.c_tx - expected).abs() < 1e-12, "{} vs {expected}", b.c_tx);

        // any γ ≥ 0: cross term sinh(2ζ)(1 + γ²) ≠ 0
        for gamma in [0.0, 0.1, 0.5, 2.0] {
            let c = PdeCoeffs::damped_field(gamma, 1.0);
            let report = invariance_verdict(&c, DEFAULT_WITNESS_ZETA);
            assert_eq!(report.verdict, Verdict::NonInvariant, "gamma={gamma}");
            let cross = report.witness_cross_term.unwrap();
            let closed = (2.0 * DEFAULT_WITNESS_ZETA).sinh() * (1.0 + gamma * gamma);
            assert!((cross - closed).abs() < 1e-12);
            assert!(cross != 0.0);
        }
    }

    #[test]
    fn degenerate_gamma_zero_is_still_non_invariant() {
        // ∂_t²φ = 0 has c = (1,0,0,0): not boost-form-invariant
        let c = PdeCoeffs::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(
            invariance_verdict(&c, DEFAULT_WITNESS_ZETA).verdict,
            Verdict::NonInvariant
        );
    }

    #[test]
    fn boost_group_law_and_determinant_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let c = PdeCoeffs {
                c_tt: rng.gen_range(-2.0..2.0),
                c_tx: rng.gen_range(-2.0..2.0),
                c_xx: rng.gen_range(-2.0..2.0),
                c_0: rng.gen_range(-2.0..2.0),
            };
            let z1 = rng.gen_range(-1.0..1.0);
            let z2 = rng.gen_range(-1.0..1.0);
            let two_step = boost(&boost(&c, z1), z2);
            let one_step = boost(&c, z1 + z2);
            for (a, b) in [
                (two_step.c_tt, one_step.c_tt),
                (two_step.c_tx, one_step.c_tx),
                (two_step.c_xx, one_step.c_xx),
            ] {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
            // quadratic-form discriminant under unit-determinant transform
            let det = |c: &PdeCoeffs| c.c_tt * c.c_xx - (c.c_tx / 2.0) * (c.c_tx / 2.0);
            assert!((det(&boost(&c, z1)) - det(&c)).abs() < 1e-12);
        }
    }

    #[test]
    fn verdict_is_boost_stable() {
        let cases = [
            PdeCoeffs::klein_gordon(1.0),
            PdeCoeffs::klein_gordon(0.0),
            PdeCoeffs::damped_field(0.3, 1.0),
            PdeCoeffs::new(1.0, 0.5, -1.0, 0.0).unwrap(),
        ];
        for c in cases {
            let v0 = invariance_verdict(&c, DEFAULT_WITNESS_ZETA).verdict;
            for zeta in [0.1, 0.3, 1.0] {
                let vb = invariance_verdict(&boost(&c, zeta), DEFAULT_WITNESS_ZETA).verdict;
                assert_eq!(v0, vb, "c={c:?} zeta={zeta}");
            }
        }
    }

    #[test]
    fn dispersion_roots() {
        // damped field, γ=0.1, m=1: λ = ±γ√(k²+m²)
        let c = PdeCoeffs::damped_field(0.1, 1.0);
        let roots = dispersion_check(&c, 0.0).unwrap();
        assert!((roots[0] - C64::new(-0.1, 0.0)).norm() < 1e-12);
        assert!((roots[1] - C64::new(0.1, 0.0)).norm() < 1e-12);
        let roots = dispersion_check(&c, 1.0).unwrap();
        let expect = 0.1 * 2f64.sqrt();
        assert!((roots[1] - C64::new(expect, 0.0)).norm() < 1e-12);

        // Klein–Gordon at k=0, m=1: λ = ±i
        let kg = PdeCoeffs::klein_gordon(1.0);
        let roots = dispersion_check(&kg, 0.0).unwrap();
        assert!((roots[0] - C64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((roots[1] - C64::new(0.0, 1.0)).norm() < 1e-12);

        // c_tt = 0 is rejected
        let bad = PdeCoeffs::new(0.0, 1.0, 1.0, 0.0).unwrap();
        assert!(dispersion_check(&bad, 1.0).is_err());
    }
}
