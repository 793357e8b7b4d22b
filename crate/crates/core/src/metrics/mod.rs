//! Fidelity measures, closed-form estimates and parameter sweeps.

mod sweep;

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use serde::Serialize;

pub use self::sweep::{
    evaluate_cell, gq_axes, log_axis, linear_axis, sweep_gq, sweep_temperature, SweepAxis, SweepCell, SweepKind,
    SweepOptions, SweepResult, CSV_HEADER,
};
use crate::error::{Error, Result};
use crate::model::PhysicalParams;
use crate::qops::{hermitian_part, CMatrix, CVector, DensityMatrix};

/// Eigenvalues below this are an error.
const EIG_REJECT: f64 = -1e-8;
/// Round-off floor: smaller eigenvalues are treated as zero, since their
/// square roots would otherwise add ~1e-8 noise per dimension.
const EIG_FLOOR: f64 = 1e-14;

fn checked_spectrum(m: &CMatrix, what: &str) -> Result<(Vec<f64>, CMatrix)> {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut values = Vec::with_capacity(eig.eigenvalues.len());
    for &v in eig.eigenvalues.iter() {
        if v < EIG_REJECT {
            return Err(Error::InvalidState(format!("{what} has eigenvalue {v:e}")));
        }
        values.push(if v < EIG_FLOOR { 0.0 } else { v });
    }
    Ok((values, eig.eigenvectors))
}

fn psd_sqrt(m: &CMatrix, what: &str) -> Result<CMatrix> {
    let (values, vecs) = checked_spectrum(m, what)?;
    let mut scaled = vecs.clone();
    for (j, v) in values.iter().enumerate() {
        let s = v.sqrt();
        scaled.column_mut(j).scale_mut(s);
    }
    Ok(&scaled * vecs.adjoint())
}

/// Uhlmann fidelity `Tr √(√σ ρ √σ)` (not squared).
pub fn uhlmann_fidelity(rho: &DensityMatrix, rho_ideal: &DensityMatrix) -> Result<f64> {
    if rho.space() != rho_ideal.space() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between {} and {}",
            rho.space(),
            rho_ideal.space()
        )));
    }
    let s = psd_sqrt(rho_ideal.data(), "reference state")?;
    let inner = &s * rho.data() * &s;
    let (values, _) = checked_spectrum(&inner, "√σ ρ √σ")?;
    let f: f64 = values.iter().map(|v| v.sqrt()).sum();
    Ok(f.min(1.0))
}

/// `√⟨ψ|ρ|ψ⟩` for a normalized `ψ`.
pub fn pure_state_fidelity(rho: &DensityMatrix, psi: &CVector) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch(format!("state of length {} against ρ of dimension {}", psi.len(), rho.dim())));
    }
    let overlap = (psi.adjoint() * rho.data() * psi)[(0, 0)].re;
    if overlap < EIG_REJECT {
        return Err(Error::InvalidState(format!("negative overlap {overlap:e}")));
    }
    Ok(overlap.max(0.0).sqrt().min(1.0))
}

fn require_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {v}")))
    }
}

/// `1 − π/(16g)·[3(κ + γ_r) + γ_r′]`, clamped to `[0, 1]`.
pub fn analytic_fidelity(p: &PhysicalParams) -> Result<f64> {
    require_positive("g", p.g)?;
    let loss = PI / (16.0 * p.g) * (3.0 * (p.kappa() + p.gamma_r) + p.gamma_rp);
    Ok((1.0 - loss).clamp(0.0, 1.0))
}

/// Gate time `π(2/Ω + 1/g)`.
pub fn gate_duration(rabi: f64, g: f64) -> Result<f64> {
    require_positive("rabi", rabi)?;
    require_positive("g", g)?;
    Ok(PI * (2.0 / rabi + 1.0 / g))
}

/// Probability of Rydberg decay during the two π-pulses, `2(π/Ω)(γ_r/2)`.
pub fn pi_pulse_error(rabi: f64, gamma_r: f64) -> Result<f64> {
    require_positive("rabi", rabi)?;
    if gamma_r < 0.0 {
        return Err(Error::param("gamma_r", "must be non-negative"));
    }
    Ok(2.0 * (PI / rabi) * (gamma_r / 2.0))
}

/// Reference principal quantum number of the default parameters.
pub const REFERENCE_N: u32 = 90;

/// Rydberg parameters extrapolated to another principal quantum number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaledRydberg {
    pub n: u32,
    pub g: f64,
    pub gamma_r: f64,
    pub omega_rr: f64,
}

impl ScaledRydberg {
    /// Copy of `p` with the scaled quantities and a resonant cavity.
    pub fn apply(&self, p: &PhysicalParams) -> PhysicalParams {
        PhysicalParams { g: self.g, gamma_r: self.gamma_r, omega_rr: self.omega_rr, omega_c: self.omega_rr, ..p.clone() }
    }
}

/// Scale `reference` (taken at n = 90): `g ∝ 1/n`, `γ_r ∝ n⁻³`, `ω_rr ∝ n⁻³`.
pub fn scaling_estimate(n: u32, reference: &PhysicalParams) -> Result<ScaledRydberg> {
    if n < 30 {
        return Err(Error::param("n", format!("scaling laws need n ≥ 30, got {n}")));
    }
    let r = f64::from(REFERENCE_N) / f64::from(n);
    Ok(ScaledRydberg { n, g: reference.g * r, gamma_r: reference.gamma_r * r.powi(3), omega_rr: reference.omega_rr * r.powi(3) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::TWO_PI;
    use crate::qops::{c, HilbertSpace, C64};
    use approx::assert_relative_eq;

    fn qubit_pure(a: f64, b: f64) -> DensityMatrix {
        let n = (a * a + b * b).sqrt();
        DensityMatrix::pure(HilbertSpace::qubit(), &CVector::from_vec(vec![c(a / n), c(b / n)])).unwrap()
    }

    #[test]
    fn fidelity_trivial_cases() {
        let a = qubit_pure(1.0, 0.0);
        let b = qubit_pure(0.0, 1.0);
        assert_relative_eq!(uhlmann_fidelity(&a, &a).unwrap(), 1.0, epsilon = 1e-12);
        assert!(uhlmann_fidelity(&a, &b).unwrap().abs() < 1e-7);
        let mixed = DensityMatrix::maximally_mixed(HilbertSpace::qubit());
        assert_relative_eq!(uhlmann_fidelity(&mixed, &a).unwrap(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(uhlmann_fidelity(&a, &mixed).unwrap(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn pure_shortcut_agrees() {
        let psi = CVector::from_vec(vec![c(0.6), C64::new(0.0, 0.8)]);
        let sigma = DensityMatrix::pure(HilbertSpace::qubit(), &psi).unwrap();
        let rho = DensityMatrix::new(
            HilbertSpace::qubit(),
            CMatrix::from_row_slice(2, 2, &[c(0.7), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.3)]),
        )
        .unwrap();
        let f = uhlmann_fidelity(&rho, &sigma).unwrap();
        assert_relative_eq!(f, pure_state_fidelity(&rho, &psi).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn mismatched_spaces_fail() {
        let a = qubit_pure(1.0, 0.0);
        let b = DensityMatrix::basis(HilbertSpace::cavity(1).unwrap(), 0).unwrap();
        assert!(matches!(uhlmann_fidelity(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn analytic_operating_point() {
        let p = PhysicalParams::default();
        assert_relative_eq!(p.kappa(), TWO_PI * 25.185e3, max_relative = 1e-12);
        // 1 − π/(16·2π·2e6)·(3(2π·25185 + 1/820e-6) + 500)
        let g = TWO_PI * 2e6;
        let oracle = 1.0 - PI / (16.0 * g) * (3.0 * (TWO_PI * 25.185e3 + 1.0 / 820e-6) + 500.0);
        let f = analytic_fidelity(&p).unwrap();
        assert_relative_eq!(f, oracle, epsilon = 1e-12);
        assert!((f - 0.9925).abs() < 5e-4);
        assert_eq!(analytic_fidelity(&p.lossless()).unwrap(), 1.0);
        assert!(analytic_fidelity(&PhysicalParams { g: 0.0, ..p }).is_err());
    }

    #[test]
    fn analytic_is_clamped() {
        let p = PhysicalParams { q_factor: 10.0, ..PhysicalParams::default() };
        assert_eq!(analytic_fidelity(&p).unwrap(), 0.0);
    }

    #[test]
    fn gate_duration_values() {
        let t = gate_duration(TWO_PI * 10e6, TWO_PI * 2e6).unwrap();
        assert_relative_eq!(t, 350e-9, max_relative = 1e-12);
        assert_relative_eq!(gate_duration(1e30, TWO_PI * 2e6).unwrap(), 250e-9, max_relative = 1e-12);
        assert_relative_eq!(gate_duration(2.0 * TWO_PI * 10e6, 2.0 * TWO_PI * 2e6).unwrap(), t / 2.0, max_relative = 1e-12);
        assert!(gate_duration(0.0, 1.0).is_err());
    }

    #[test]
    fn pi_pulse_error_values() {
        let pr = pi_pulse_error(TWO_PI * 10e6, 1219.5).unwrap();
        assert!(pr > 5.5e-5 && pr < 6.5e-5, "{pr}");
        assert_eq!(pi_pulse_error(1.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(pi_pulse_error(2.0, 1.0).unwrap(), pi_pulse_error(1.0, 1.0).unwrap() / 2.0);
    }

    #[test]
    fn rydberg_scaling() {
        let p = PhysicalParams::default();
        let same = scaling_estimate(90, &p).unwrap();
        assert_eq!((same.g, same.gamma_r, same.omega_rr), (p.g, p.gamma_r, p.omega_rr));
        let s = scaling_estimate(180, &p).unwrap();
        assert_relative_eq!(s.g, p.g / 2.0, max_relative = 1e-15);
        assert_relative_eq!(s.g / s.gamma_r, 4.0 * p.g / p.gamma_r, max_relative = 1e-12);
        assert!(scaling_estimate(29, &p).is_err());
        let q = s.apply(&p);
        assert_eq!(q.detuning(), 0.0);
    }
}
