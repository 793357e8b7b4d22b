//! Operator algebra and state construction on the composite Hilbert space.
//!
//! The composite space is an ordered tensor product of at most three factors,
//! always in the order atom ⊗ cavity ⊗ qubit. Basis indices are row-major:
//! the atom index varies slowest and the qubit index fastest, which is the
//! ordering produced by the Kronecker product `A ⊗ B ⊗ C`.
//!
//! The atom is a five-level system `{|0⟩, |1⟩, |r⟩, |r'⟩, |s⟩}` where `|s⟩`
//! collects population lost from the Rydberg manifold. The cavity is a Fock
//! ladder truncated at `nmax` photons and the superconducting qubit is a
//! two-level system with `|0⟩` as ground state.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ATOM_DIM: usize = 5;
pub const QUBIT_DIM: usize = 2;

/// Fock cutoff used at zero temperature.
pub const DEFAULT_NMAX: usize = 3;

/// Largest thermal population allowed beyond the Fock cutoff.
pub const THERMAL_TAIL_TOL: f64 = 1e-9;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-9;
const POSITIVITY_TOL: f64 = 1e-9;

#[inline]
pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Levels of the five-level atom, in basis order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomLevel {
    Ground0,
    Ground1,
    Rydberg,
    RydbergP,
    Reservoir,
}

impl AtomLevel {
    pub const ALL: [AtomLevel; ATOM_DIM] = [
        AtomLevel::Ground0,
        AtomLevel::Ground1,
        AtomLevel::Rydberg,
        AtomLevel::RydbergP,
        AtomLevel::Reservoir,
    ];

    pub fn index(self) -> usize {
        match self {
            AtomLevel::Ground0 => 0,
            AtomLevel::Ground1 => 1,
            AtomLevel::Rydberg => 2,
            AtomLevel::RydbergP => 3,
            AtomLevel::Reservoir => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AtomLevel::Ground0 => "0",
            AtomLevel::Ground1 => "1",
            AtomLevel::Rydberg => "r",
            AtomLevel::RydbergP => "r'",
            AtomLevel::Reservoir => "s",
        }
    }
}

impl FromStr for AtomLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0" | "g0" => Ok(AtomLevel::Ground0),
            "1" | "g1" => Ok(AtomLevel::Ground1),
            "r" => Ok(AtomLevel::Rydberg),
            "r'" | "rp" | "r_prime" => Ok(AtomLevel::RydbergP),
            "s" => Ok(AtomLevel::Reservoir),
            other => Err(Error::UnknownLevel(other.to_string())),
        }
    }
}

impl fmt::Display for AtomLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FactorKind {
    Atom,
    Cavity,
    Qubit,
}

/// One tensor factor of the composite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    Atom,
    Cavity { nmax: usize },
    Qubit,
}

impl Factor {
    pub fn kind(self) -> FactorKind {
        match self {
            Factor::Atom => FactorKind::Atom,
            Factor::Cavity { .. } => FactorKind::Cavity,
            Factor::Qubit => FactorKind::Qubit,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Factor::Atom => ATOM_DIM,
            Factor::Cavity { nmax } => nmax + 1,
            Factor::Qubit => QUBIT_DIM,
        }
    }

    pub fn label(self) -> &'static str {
        match self.kind() {
            FactorKind::Atom => "atom",
            FactorKind::Cavity => "cavity",
            FactorKind::Qubit => "sc_qubit",
        }
    }
}

/// Ordered tensor product of factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSpace {
    factors: Vec<Factor>,
}

impl HilbertSpace {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDimension("a Hilbert space needs at least one factor".into()));
        }
        for pair in factors.windows(2) {
            if pair[0].kind() >= pair[1].kind() {
                return Err(Error::InvalidDimension(format!(
                    "factors must appear once each in atom, cavity, qubit order (got {} before {})",
                    pair[0].label(),
                    pair[1].label()
                )));
            }
        }
        for f in &factors {
            if let Factor::Cavity { nmax } = f {
                if *nmax < 1 {
                    return Err(Error::InvalidDimension(format!("cavity cutoff nmax={nmax} < 1")));
                }
            }
        }
        Ok(Self { factors })
    }

    pub fn atom() -> Self {
        Self { factors: vec![Factor::Atom] }
    }

    pub fn cavity(nmax: usize) -> Result<Self> {
        Self::new(vec![Factor::Cavity { nmax }])
    }

    pub fn qubit() -> Self {
        Self { factors: vec![Factor::Qubit] }
    }

    pub fn atom_cavity(nmax: usize) -> Result<Self> {
        Self::new(vec![Factor::Atom, Factor::Cavity { nmax }])
    }

    pub fn atom_cavity_qubit(nmax: usize) -> Result<Self> {
        Self::new(vec![Factor::Atom, Factor::Cavity { nmax }, Factor::Qubit])
    }

    pub fn cavity_qubit(nmax: usize) -> Result<Self> {
        Self::new(vec![Factor::Cavity { nmax }, Factor::Qubit])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim()).collect()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).product()
    }

    pub fn position(&self, kind: FactorKind) -> Option<usize> {
        self.factors.iter().position(|f| f.kind() == kind)
    }

    pub fn has(&self, kind: FactorKind) -> bool {
        self.position(kind).is_some()
    }

    /// Fock cutoff of the cavity factor, if present.
    pub fn nmax(&self) -> Option<usize> {
        self.factors.iter().find_map(|f| match f {
            Factor::Cavity { nmax } => Some(*nmax),
            _ => None,
        })
    }

    /// Flat basis index of a multi-index given in factor order.
    pub fn index_of(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.factors.len());
        multi
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&i, f)| acc * f.dim() + i)
    }

    /// Inverse of [`HilbertSpace::index_of`].
    pub fn multi_index(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, f) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % f.dim();
            index /= f.dim();
        }
        out
    }

    /// Tensor product `self ⊗ other`; the result must respect the factor order.
    pub fn tensor(&self, other: &HilbertSpace) -> Result<HilbertSpace> {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        HilbertSpace::new(factors)
    }

    /// The space spanned by the listed factor kinds, in this space's order.
    pub fn subspace(&self, keep: &[FactorKind]) -> Result<HilbertSpace> {
        for k in keep {
            if !self.has(*k) {
                return Err(Error::DimensionMismatch(format!("space has no {k:?} factor")));
            }
        }
        HilbertSpace::new(self.factors.iter().copied().filter(|f| keep.contains(&f.kind())).collect())
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|fac| format!("{}({})", fac.label(), fac.dim()))
            .collect();
        f.write_str(&parts.join(" ⊗ "))
    }
}

/// A dense operator on a [`HilbertSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    data: CMatrix,
}

impl Operator {
    pub fn new(space: HilbertSpace, data: CMatrix) -> Result<Self> {
        let d = space.dim();
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{} but {space} has dimension {d}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { space, data })
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let d = space.dim();
        Self { space: space.clone(), data: CMatrix::identity(d, d) }
    }

    pub fn zeros(space: &HilbertSpace) -> Self {
        let d = space.dim();
        Self { space: space.clone(), data: CMatrix::zeros(d, d) }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self { space: self.space.clone(), data: self.data.adjoint() }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { space: self.space.clone(), data: &self.data * factor }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(c(factor))
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.data - self.data.adjoint()))
    }

    /// Hermitian to `tol` relative to the largest entry.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        self.hermiticity_error() <= tol * scale
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim();
        max_abs(&(self.data.adjoint() * &self.data - CMatrix::identity(d, d)))
    }

    pub fn kron(&self, other: &Operator) -> Result<Operator> {
        Ok(Operator { space: self.space.tensor(&other.space)?, data: self.data.kronecker(&other.data) })
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        self * other - other * self
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn mul(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator product across different spaces");
        Operator { space: self.space.clone(), data: &self.data * &rhs.data }
    }
}

impl Add for Operator {
    type Output = Operator;

    fn add(self, rhs: Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator sum across different spaces");
        Operator { space: self.space, data: self.data + rhs.data }
    }
}

impl Sub for Operator {
    type Output = Operator;

    fn sub(self, rhs: Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator difference across different spaces");
        Operator { space: self.space, data: self.data - rhs.data }
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// A density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpace,
    data: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-10), trace (1e-9) and positivity (−1e-9).
    pub fn new(space: HilbertSpace, data: CMatrix) -> Result<Self> {
        let rho = Self::from_raw(space, data)?;
        rho.validate(HERMITIAN_TOL, TRACE_TOL, POSITIVITY_TOL)?;
        Ok(rho)
    }

    /// Shape check only. Callers are responsible for the state invariants.
    pub(crate) fn from_raw(space: HilbertSpace, data: CMatrix) -> Result<Self> {
        let d = space.dim();
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "state is {}x{} but {space} has dimension {d}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { space, data })
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`. The vector is normalized here.
    pub fn pure(space: HilbertSpace, psi: &CVector) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state vector has length {} but {space} has dimension {}",
                psi.len(),
                space.dim()
            )));
        }
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("state vector has zero or non-finite norm".into()));
        }
        let psi = psi / c(norm);
        let data = &psi * psi.adjoint();
        Ok(Self { space, data })
    }

    /// The basis projector `|i⟩⟨i|`.
    pub fn basis(space: HilbertSpace, index: usize) -> Result<Self> {
        let d = space.dim();
        if index >= d {
            return Err(Error::DimensionMismatch(format!("basis index {index} out of range for dimension {d}")));
        }
        let mut data = CMatrix::zeros(d, d);
        data[(index, index)] = c(1.0);
        Ok(Self { space, data })
    }

    pub fn maximally_mixed(space: HilbertSpace) -> Self {
        let d = space.dim();
        let data = CMatrix::identity(d, d) * c(1.0 / d as f64);
        Self { space, data }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.data * &self.data).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.data)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn population(&self, index: usize) -> f64 {
        self.data[(index, index)].re
    }

    pub fn expectation(&self, op: &Operator) -> C64 {
        (&self.data * op.data()).trace()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(Self { space: self.space.tensor(&other.space)?, data: self.data.kronecker(&other.data) })
    }

    pub fn validate(&self, hermitian_tol: f64, trace_tol: f64, positivity_tol: f64) -> Result<()> {
        let herm = max_abs(&(&self.data - self.data.adjoint()));
        if herm > hermitian_tol {
            return Err(Error::InvalidState(format!("not Hermitian (max |ρ − ρ†| = {herm:.3e})")));
        }
        let tr = self.trace();
        if (tr - c(1.0)).norm() > trace_tol {
            return Err(Error::InvalidState(format!("trace {:.12} deviates from 1", tr.re)));
        }
        let min_ev = self.min_eigenvalue();
        if min_ev < -positivity_tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_ev:.3e}")));
        }
        Ok(())
    }

    /// True if the state passes the default invariant tolerances.
    pub fn is_valid(&self) -> bool {
        self.validate(HERMITIAN_TOL, TRACE_TOL, POSITIVITY_TOL).is_ok()
    }

    pub fn partial_trace(&self, keep: &[FactorKind]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }
}

/// Ladder operator `â` on a single cavity factor truncated at `nmax` photons.
pub fn annihilation(nmax: usize) -> Result<Operator> {
    let space = HilbertSpace::cavity(nmax)?;
    let d = nmax + 1;
    let mut data = CMatrix::zeros(d, d);
    for n in 1..d {
        data[(n - 1, n)] = c((n as f64).sqrt());
    }
    Operator::new(space, data)
}

pub fn creation(nmax: usize) -> Result<Operator> {
    Ok(annihilation(nmax)?.adjoint())
}

pub fn number(nmax: usize) -> Result<Operator> {
    let a = annihilation(nmax)?;
    Ok(&a.adjoint() * &a)
}

/// The atomic transition operator `|to⟩⟨from|`.
pub fn atomic_op(from: AtomLevel, to: AtomLevel) -> Operator {
    let mut data = CMatrix::zeros(ATOM_DIM, ATOM_DIM);
    data[(to.index(), from.index())] = c(1.0);
    Operator { space: HilbertSpace::atom(), data }
}

/// [`atomic_op`] with levels given by label (`0`, `1`, `r`, `r'`, `s`).
pub fn atomic_op_by_label(from: &str, to: &str) -> Result<Operator> {
    Ok(atomic_op(from.parse()?, to.parse()?))
}

/// Qubit lowering operator `|0⟩⟨1|`.
pub fn qubit_lowering() -> Operator {
    let mut data = CMatrix::zeros(QUBIT_DIM, QUBIT_DIM);
    data[(0, 1)] = c(1.0);
    Operator { space: HilbertSpace::qubit(), data }
}

/// Kronecker product of per-factor operators in the space's factor order;
/// `None` stands for the identity on that factor.
pub fn embed(space: &HilbertSpace, per_factor: &[Option<&Operator>]) -> Result<Operator> {
    if per_factor.len() != space.factors().len() {
        return Err(Error::DimensionMismatch(format!(
            "{} factor operators given for {space}",
            per_factor.len()
        )));
    }
    let mut data = CMatrix::identity(1, 1);
    for (factor, op) in space.factors().iter().zip(per_factor) {
        let block = match op {
            Some(op) => {
                if op.space().factors() != [*factor] {
                    return Err(Error::DimensionMismatch(format!(
                        "operator on {} cannot act on factor {}({})",
                        op.space(),
                        factor.label(),
                        factor.dim()
                    )));
                }
                op.data().clone()
            }
            None => CMatrix::identity(factor.dim(), factor.dim()),
        };
        data = data.kronecker(&block);
    }
    Operator::new(space.clone(), data)
}

/// Embed a single-factor operator onto the matching factor of `space`.
pub fn lift(space: &HilbertSpace, op: &Operator) -> Result<Operator> {
    let [factor] = op.space().factors() else {
        return Err(Error::DimensionMismatch(format!("lift expects a single-factor operator, got {}", op.space())));
    };
    let pos = space
        .position(factor.kind())
        .ok_or_else(|| Error::DimensionMismatch(format!("{space} has no {} factor", factor.label())))?;
    let mut slots: Vec<Option<&Operator>> = vec![None; space.factors().len()];
    slots[pos] = Some(op);
    embed(space, &slots)
}

/// Reduced state on the factors in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[FactorKind]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let space = rho.space();
    let out_space = space.subspace(keep)?;
    if out_space == *space {
        return Ok(rho.clone());
    }
    let kept: Vec<bool> = space.factors().iter().map(|f| keep.contains(&f.kind())).collect();
    let dims = space.dims();
    let traced_space_dims: Vec<usize> = dims.iter().zip(&kept).filter(|(_, k)| !**k).map(|(d, _)| *d).collect();
    let traced_dim: usize = traced_space_dims.iter().product();
    let out_dim = out_space.dim();

    // full index = compose(kept multi-index, traced multi-index)
    let compose = |ki: usize, ti: usize| -> usize {
        let kmulti = out_space.multi_index(ki);
        let mut tmulti = vec![0; traced_space_dims.len()];
        let mut rem = ti;
        for (slot, d) in tmulti.iter_mut().zip(&traced_space_dims).rev() {
            *slot = rem % d;
            rem /= d;
        }
        let (mut kit, mut tit) = (kmulti.into_iter(), tmulti.into_iter());
        let multi: Vec<usize> = kept
            .iter()
            .map(|&k| if k { kit.next().unwrap() } else { tit.next().unwrap() })
            .collect();
        space.index_of(&multi)
    };
    let table: Vec<Vec<usize>> = (0..out_dim).map(|ki| (0..traced_dim).map(|ti| compose(ki, ti)).collect()).collect();

    let full = rho.data();
    let out = CMatrix::from_fn(out_dim, out_dim, |i, j| {
        table[i].iter().zip(&table[j]).map(|(&a, &b)| full[(a, b)]).sum()
    });
    DensityMatrix::from_raw(out_space, out)
}

/// Ratio `p_{n+1}/p_n` of the Bose–Einstein distribution with mean `nbar`.
fn boltzmann_ratio(nbar: f64) -> f64 {
    nbar / (1.0 + nbar)
}

/// Thermal cavity state on `0..=nmax`, renormalized over the truncated ladder.
pub fn thermal_state(nmax: usize, nbar: f64) -> Result<DensityMatrix> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::param("nbar", format!("mean photon number must be finite and ≥ 0, got {nbar}")));
    }
    let space = HilbertSpace::cavity(nmax)?;
    let r = boltzmann_ratio(nbar);
    let weights: Vec<f64> = (0..=nmax).scan(1.0, |w, _| {
        let cur = *w;
        *w *= r;
        Some(cur)
    }).collect();
    let total: f64 = weights.iter().sum();
    let diag = CVector::from_iterator(nmax + 1, weights.iter().map(|w| c(w / total)));
    DensityMatrix::from_raw(space, CMatrix::from_diagonal(&diag))
}

/// Untruncated thermal probability of finding more than `nmax` photons.
pub fn thermal_tail(nmax: usize, nbar: f64) -> f64 {
    boltzmann_ratio(nbar).powi(nmax as i32 + 1)
}

/// Fock cutoff for a cavity with thermal occupation `nbar`.
///
/// At zero temperature this is [`DEFAULT_NMAX`]. Otherwise it is the smallest
/// cutoff whose thermal tail is below [`THERMAL_TAIL_TOL`], plus one level of
/// headroom for the photon loaded on top of the thermal background, and never
/// less than the zero-temperature default.
pub fn fock_cutoff(nbar: f64) -> usize {
    if nbar <= 0.0 {
        return DEFAULT_NMAX;
    }
    let mut n = 1;
    while thermal_tail(n, nbar) >= THERMAL_TAIL_TOL {
        n += 1;
    }
    DEFAULT_NMAX.max(n + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bell_two_qubit() -> DensityMatrix {
        // cavity truncated at one photon acts as a qubit
        let space = HilbertSpace::cavity_qubit(1).unwrap();
        let mut psi = CVector::zeros(4);
        psi[space.index_of(&[0, 1])] = c(1.0);
        psi[space.index_of(&[1, 0])] = c(1.0);
        DensityMatrix::pure(space, &psi).unwrap()
    }

    #[test]
    fn annihilation_matrix_elements() {
        let a = annihilation(1).unwrap();
        assert_eq!(a.data(), &CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]));
        let a3 = annihilation(3).unwrap();
        assert_abs_diff_eq!(a3.data()[(2, 3)].re, 1.732_050_8, epsilon = 1e-7);
        assert!(matches!(annihilation(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn number_operator_spectrum() {
        let n = number(4).unwrap();
        let ev = hermitian_eigenvalues(n.data());
        for (k, v) in ev.iter().enumerate() {
            assert_abs_diff_eq!(*v, k as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn canonical_commutator_except_corner() {
        let nmax = 5;
        let a = annihilation(nmax).unwrap();
        let comm = a.commutator(&a.adjoint());
        for i in 0..=nmax {
            for j in 0..=nmax {
                if i == nmax && j == nmax {
                    assert_abs_diff_eq!(comm.data()[(i, j)].re, -(nmax as f64), epsilon = 1e-12);
                    continue;
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!((comm.data()[(i, j)] - c(expect)).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn raising_operator_and_dyad_identities() {
        let sp = atomic_op(AtomLevel::Rydberg, AtomLevel::RydbergP);
        assert_eq!(sp.data()[(3, 2)], c(1.0));
        assert_eq!(sp.data().iter().filter(|z| z.norm() > 0.0).count(), 1);

        let lower = atomic_op(AtomLevel::Rydberg, AtomLevel::Reservoir);
        let proj = &lower.adjoint() * &lower;
        assert_eq!(proj, atomic_op(AtomLevel::Rydberg, AtomLevel::Rydberg));

        for a in AtomLevel::ALL {
            for b in AtomLevel::ALL {
                assert_eq!(atomic_op(a, b).adjoint(), atomic_op(b, a));
            }
        }
        assert!(matches!(atomic_op_by_label("r", "x"), Err(Error::UnknownLevel(_))));
        assert_eq!(atomic_op_by_label("r", "r'").unwrap(), sp);
    }

    #[test]
    fn embed_identity_and_trace() {
        let space = HilbertSpace::atom_cavity_qubit(2).unwrap();
        let id = embed(&space, &[None, None, None]).unwrap();
        assert_eq!(id, Operator::identity(&space));

        let a = annihilation(2).unwrap();
        let n = &a.adjoint() * &a;
        let big = lift(&space, &n).unwrap();
        assert_abs_diff_eq!(big.trace().re, n.trace().re * (5 * 2) as f64, epsilon = 1e-12);
    }

    #[test]
    fn embed_mixed_product() {
        let space = HilbertSpace::atom_cavity(3).unwrap();
        let sp = atomic_op(AtomLevel::Rydberg, AtomLevel::RydbergP);
        let a = annihilation(3).unwrap();
        let joint = embed(&space, &[Some(&sp), Some(&a)]).unwrap();
        let product = &lift(&space, &sp).unwrap() * &lift(&space, &a).unwrap();
        assert!(max_abs(&(joint.data() - product.data())) < 1e-12);
        // distinct factors commute
        let other = &lift(&space, &a).unwrap() * &lift(&space, &sp).unwrap();
        assert!(max_abs(&(other.data() - product.data())) < 1e-12);
        // same factor: embed(A)·embed(B) = embed(AB)
        let b = a.adjoint();
        let lhs = &lift(&space, &a).unwrap() * &lift(&space, &b).unwrap();
        let rhs = lift(&space, &(&a * &b)).unwrap();
        assert!(max_abs(&(lhs.data() - rhs.data())) < 1e-12);
    }

    #[test]
    fn embed_rejects_mismatched_factor() {
        let space = HilbertSpace::atom_cavity(3).unwrap();
        let wrong = annihilation(2).unwrap();
        assert!(matches!(embed(&space, &[None, Some(&wrong)]), Err(Error::DimensionMismatch(_))));
        assert!(matches!(embed(&space, &[None]), Err(Error::DimensionMismatch(_))));
        assert!(lift(&space, &qubit_lowering()).is_err());
    }

    #[test]
    fn partial_trace_of_product_state() {
        let cav = thermal_state(2, 0.3).unwrap();
        let q = DensityMatrix::pure(HilbertSpace::qubit(), &CVector::from_vec(vec![c(0.6), C64::new(0.0, 0.8)])).unwrap();
        let joint = cav.tensor(&q).unwrap();
        let back = partial_trace(&joint, &[FactorKind::Cavity]).unwrap();
        assert!(max_abs(&(back.data() - cav.data())) < 1e-14);
        let back_q = partial_trace(&joint, &[FactorKind::Qubit]).unwrap();
        assert!(max_abs(&(back_q.data() - q.data())) < 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let bell = bell_two_qubit();
        for keep in [FactorKind::Cavity, FactorKind::Qubit] {
            let red = partial_trace(&bell, &[keep]).unwrap();
            let half = CMatrix::identity(2, 2) * c(0.5);
            assert!(max_abs(&(red.data() - half)) < 1e-14);
            assert_abs_diff_eq!(red.trace().re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn partial_trace_edge_cases() {
        let bell = bell_two_qubit();
        assert!(matches!(partial_trace(&bell, &[]), Err(Error::EmptyKeepSet)));
        assert!(partial_trace(&bell, &[FactorKind::Atom]).is_err());
        let all = partial_trace(&bell, &[FactorKind::Cavity, FactorKind::Qubit]).unwrap();
        assert_eq!(all, bell);
    }

    #[test]
    fn thermal_state_properties() {
        let zero = thermal_state(3, 0.0).unwrap();
        assert_eq!(zero.population(0), 1.0);
        assert!(zero.is_valid());

        let rho = thermal_state(6, 0.0979).unwrap();
        assert_abs_diff_eq!(rho.population(1) / rho.population(0), 0.0979 / 1.0979, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.population(1) / rho.population(0), 0.0892, epsilon = 5e-5);
        for n in 0..6 {
            assert!(rho.population(n + 1) < rho.population(n));
        }
        assert!(rho.is_valid());
        assert!(thermal_state(3, -1.0).is_err());
    }

    #[test]
    fn fock_cutoff_rule() {
        assert_eq!(fock_cutoff(0.0), DEFAULT_NMAX);
        assert_eq!(fock_cutoff(1e-20), DEFAULT_NMAX);
        let nbar = 0.0979;
        let n = fock_cutoff(nbar);
        assert!(thermal_tail(n - 1, nbar) < THERMAL_TAIL_TOL);
        assert!(thermal_tail(n - 2, nbar) >= THERMAL_TAIL_TOL);
    }

    #[test]
    fn space_ordering_and_indices() {
        assert!(HilbertSpace::new(vec![Factor::Cavity { nmax: 2 }, Factor::Atom]).is_err());
        assert!(HilbertSpace::new(vec![Factor::Atom, Factor::Atom]).is_err());
        let s = HilbertSpace::atom_cavity_qubit(3).unwrap();
        assert_eq!(s.dim(), 40);
        for i in 0..s.dim() {
            assert_eq!(s.index_of(&s.multi_index(i)), i);
        }
        assert_eq!(s.index_of(&[1, 2, 1]), 1 * 8 + 2 * 2 + 1);
    }

    #[test]
    fn density_matrix_validation() {
        let space = HilbertSpace::qubit();
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(space.clone(), bad_trace).is_err());
        let negative = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(DensityMatrix::new(space.clone(), negative).is_err());
        let mut nonherm = CMatrix::identity(2, 2) * c(0.5);
        nonherm[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(space, nonherm).is_err());
    }
}
