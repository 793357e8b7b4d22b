//! Physical parameters, Hamiltonians and collapse operators.
//!
//! All Hamiltonians are returned as `H/ħ` in rad/s, in the frame rotating at
//! the cavity frequency.

use serde::{Deserialize, Serialize};

use crate::constants::{A0, E_CHARGE, HBAR, K_B, TWO_PI};
use crate::error::{Error, Result};
use crate::qops::{
    annihilation, atomic_op, c, lift, qubit_lowering, AtomLevel, CMatrix, FactorKind, HilbertSpace,
    Operator,
};

/// Detuning applied while the cavity is switched away from the atom, rad/s.
pub const SWITCH_DETUNING: f64 = TWO_PI * 0.5e9;

/// Every rate and frequency of the model. Angular quantities in rad/s,
/// decay rates in 1/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Atom–cavity vacuum coupling.
    pub g: f64,
    /// Cavity angular frequency.
    pub omega_c: f64,
    /// `|r⟩ → |r'⟩` transition angular frequency.
    pub omega_rr: f64,
    /// Resonator quality factor; `inf` for a lossless cavity.
    #[serde(with = "maybe_infinite")]
    pub q_factor: f64,
    pub gamma_r: f64,
    pub gamma_rp: f64,
    /// Classical `|1⟩ ↔ |r⟩` Rabi frequency.
    pub rabi: f64,
    /// Waveguide temperature, K.
    pub temperature: f64,
    /// Superconducting qubit – cavity coupling.
    pub g_sc: f64,
    pub gamma_sc: f64,
    /// Pure dephasing rate of the Rydberg levels.
    pub gamma_phi: f64,
    /// `|r⟩ → |r'⟩` transition dipole moment, C m.
    pub dipole_rr: f64,
}

impl Default for PhysicalParams {
    /// Cs 90s₁/₂ → 90p₃/₂ coupled to a 5.037 GHz resonator at the
    /// g/2π = 2 MHz, Q = 2×10⁵ operating point.
    fn default() -> Self {
        let omega_rr = TWO_PI * 5.037e9;
        Self {
            g: TWO_PI * 2.0e6,
            omega_c: omega_rr,
            omega_rr,
            q_factor: 2.0e5,
            gamma_r: 1.0 / 820e-6,
            gamma_rp: 1.0 / 2e-3,
            rabi: TWO_PI * 10.0e6,
            temperature: 0.0,
            g_sc: TWO_PI * 100.0e6,
            gamma_sc: 1.0 / 2e-6,
            gamma_phi: 0.0,
            dipole_rr: (2.0f64 / 9.0).sqrt() * 8360.0 * E_CHARGE * A0,
        }
    }
}

impl PhysicalParams {
    /// Cavity field decay rate `κ = ωc/Q`.
    pub fn kappa(&self) -> f64 {
        self.omega_c / self.q_factor
    }

    /// Intrinsic cavity–atom detuning `ωc − ω_rr'`.
    pub fn detuning(&self) -> f64 {
        self.omega_c - self.omega_rr
    }

    pub fn nbar(&self) -> f64 {
        nbar_thermal(self.omega_c, self.temperature)
    }

    /// Same parameters with every dissipative channel switched off.
    pub fn lossless(&self) -> Self {
        Self {
            q_factor: f64::INFINITY,
            gamma_r: 0.0,
            gamma_rp: 0.0,
            temperature: 0.0,
            gamma_sc: 0.0,
            gamma_phi: 0.0,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = [
            ("g", self.g),
            ("omega_c", self.omega_c),
            ("omega_rr", self.omega_rr),
            ("gamma_r", self.gamma_r),
            ("gamma_rp", self.gamma_rp),
            ("rabi", self.rabi),
            ("temperature", self.temperature),
            ("g_sc", self.g_sc),
            ("gamma_sc", self.gamma_sc),
            ("gamma_phi", self.gamma_phi),
            ("dipole_rr", self.dipole_rr),
        ];
        for (name, v) in finite_nonneg {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::param(name, format!("must be finite and ≥ 0, got {v}")));
            }
        }
        if !(self.q_factor > 0.0) {
            return Err(Error::param("q_factor", format!("must be > 0, got {}", self.q_factor)));
        }
        Ok(())
    }
}

/// Hamiltonian configuration of one piecewise-constant segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentConfig {
    /// Detuning `Δ = ωc − ω_rr'` during the segment, rad/s.
    pub delta: f64,
    /// Classical `|1⟩ ↔ |r⟩` drive active.
    pub drive_on: bool,
    /// Superconducting qubit tuned into resonance with the cavity.
    pub sc_coupled: bool,
}

impl SegmentConfig {
    pub fn new(delta: f64, drive_on: bool, sc_coupled: bool) -> Result<Self> {
        let seg = Self { delta, drive_on, sc_coupled };
        seg.validate()?;
        Ok(seg)
    }

    /// Cavity on resonance with the Rydberg transition, no drive.
    pub fn resonant(p: &PhysicalParams) -> Self {
        Self { delta: p.detuning(), drive_on: false, sc_coupled: false }
    }

    /// Cavity switched away from the atom with the classical drive on.
    pub fn detuned_drive(p: &PhysicalParams) -> Self {
        Self { delta: p.detuning() + SWITCH_DETUNING, drive_on: true, sc_coupled: false }
    }

    /// Superconducting qubit swapping into the cavity.
    pub fn cavity_load() -> Self {
        Self { delta: 0.0, drive_on: false, sc_coupled: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sc_coupled && self.drive_on {
            return Err(Error::param("segment", "the classical drive cannot run while the qubit loads the cavity"));
        }
        if !self.delta.is_finite() {
            return Err(Error::param("delta", "detuning must be finite"));
        }
        Ok(())
    }
}

/// `H/ħ` for one segment.
///
/// Terms act only on factors present in `space`: the `Δ` and drive terms need
/// the atom, the Jaynes–Cummings term needs atom and cavity, and the loading
/// term needs cavity and qubit. A space without the atom describes an atom
/// parked in `|0⟩`, on which all atomic terms vanish. Requesting the drive or
/// the loading coupling on a space lacking their factors is an error.
pub fn hamiltonian(p: &PhysicalParams, seg: &SegmentConfig, space: &HilbertSpace) -> Result<Operator> {
    seg.validate()?;
    let has_atom = space.has(FactorKind::Atom);
    let nmax = space.nmax();
    let mut h = Operator::zeros(space);

    if has_atom {
        let proj_rp = atomic_op(AtomLevel::RydbergP, AtomLevel::RydbergP);
        h = h + lift(space, &proj_rp)?.scale_re(seg.delta);

        if let Some(nmax) = nmax {
            let sigma_plus = lift(space, &atomic_op(AtomLevel::Rydberg, AtomLevel::RydbergP))?;
            let a = lift(space, &annihilation(nmax)?)?;
            let jc = &sigma_plus * &a;
            h = h + (jc.clone() + jc.adjoint()).scale_re(p.g);
        }
    }

    if seg.drive_on {
        if !has_atom {
            return Err(Error::DimensionMismatch(format!("drive needs an atom factor, space is {space}")));
        }
        let up = lift(space, &atomic_op(AtomLevel::Ground1, AtomLevel::Rydberg))?;
        h = h + (up.clone() + up.adjoint()).scale_re(0.5 * p.rabi);
    }

    if seg.sc_coupled {
        let (Some(nmax), true) = (nmax, space.has(FactorKind::Qubit)) else {
            return Err(Error::DimensionMismatch(format!(
                "cavity loading needs cavity and qubit factors, space is {space}"
            )));
        };
        let q_plus = lift(space, &qubit_lowering().adjoint())?;
        let a = lift(space, &annihilation(nmax)?)?;
        let swap = &q_plus * &a;
        h = h + (swap.clone() + swap.adjoint()).scale_re(p.g_sc);
    }

    Ok(h)
}

/// Dissipation channel of a collapse operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Channel {
    /// `|r⟩ → |s⟩`
    RydbergDecay,
    /// `|r'⟩ → |s⟩`
    RydbergPDecay,
    /// Photon loss, `√(κ(n̄+1)) â`.
    CavityLoss,
    /// Thermal photon gain, `√(κ n̄) â†`.
    CavityGain,
    /// Rydberg pure dephasing.
    Dephasing,
    /// Superconducting qubit relaxation.
    QubitDecay,
}

#[derive(Clone, Debug)]
pub struct CollapseOp {
    pub channel: Channel,
    /// Rate multiplying the unit operator, i.e. `op = √rate · unit`.
    pub rate: f64,
    pub op: Operator,
}

/// Labelled collapse operators on `space`; channels with zero rate are omitted.
pub fn collapse_channels(p: &PhysicalParams, space: &HilbertSpace) -> Result<Vec<CollapseOp>> {
    p.validate()?;
    let mut out = Vec::new();
    let mut push = |channel, rate: f64, unit: Operator| {
        if rate > 0.0 {
            out.push(CollapseOp { channel, rate, op: unit.scale_re(rate.sqrt()) });
        }
    };

    if space.has(FactorKind::Atom) {
        push(
            Channel::RydbergDecay,
            p.gamma_r,
            lift(space, &atomic_op(AtomLevel::Rydberg, AtomLevel::Reservoir))?,
        );
        push(
            Channel::RydbergPDecay,
            p.gamma_rp,
            lift(space, &atomic_op(AtomLevel::RydbergP, AtomLevel::Reservoir))?,
        );
        let signs = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            [-1.0, -1.0, 1.0, 1.0, -1.0].map(c).to_vec(),
        ));
        let dephase = Operator::new(HilbertSpace::atom(), signs)?;
        push(Channel::Dephasing, 0.5 * p.gamma_phi, lift(space, &dephase)?);
    }

    if let Some(nmax) = space.nmax() {
        let kappa = p.kappa();
        let nbar = p.nbar();
        let a = lift(space, &annihilation(nmax)?)?;
        push(Channel::CavityLoss, kappa * (nbar + 1.0), a.clone());
        push(Channel::CavityGain, kappa * nbar, a.adjoint());
    }

    if space.has(FactorKind::Qubit) {
        push(Channel::QubitDecay, p.gamma_sc, lift(space, &qubit_lowering())?);
    }
    Ok(out)
}

pub fn collapse_ops(p: &PhysicalParams, space: &HilbertSpace) -> Result<Vec<Operator>> {
    Ok(collapse_channels(p, space)?.into_iter().map(|c| c.op).collect())
}

/// Bose–Einstein occupation of a mode at `omega` (rad/s) and temperature `t` (K).
pub fn nbar_thermal(omega: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (K_B * t);
    1.0 / x.exp_m1()
}

/// Serialize `f64::INFINITY` as the string `"inf"` so lossless parameter sets
/// survive a JSON round trip.
pub(crate) mod maybe_infinite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
            Repr::Text(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}
