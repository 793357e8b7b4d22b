//! Lindblad propagation over piecewise-constant segments.
//!
//! The generator acts on a density matrix as
//!
//! ```text
//! L(ρ) = −i[H, ρ] + Σᵢ (cᵢ ρ cᵢ† − ½{cᵢ†cᵢ, ρ})
//!      = −i H_eff ρ + i ρ H_eff† + Σᵢ cᵢ ρ cᵢ†,   H_eff = H − (i/2) Σᵢ cᵢ†cᵢ
//! ```
//!
//! Three backends compute `exp(L t)`:
//!
//! * [`Backend::Pade`] materializes the `d² × d²` superoperator (column
//!   stacking) and exponentiates it densely.
//! * [`Backend::Taylor`] applies a scaled Taylor series of `L` to the state
//!   without forming the superoperator, using the sparsity of `H_eff` and `cᵢ`.
//! * [`Backend::Rk4`] is a fixed-step fourth-order Runge–Kutta integrator used
//!   as an independent cross-check.
//!
//! [`Backend::Auto`] picks the dense exponential for small spaces and the
//! Taylor action otherwise.

mod expm;
mod sparse;

use serde::{Deserialize, Serialize};

pub use self::expm::expm;
use self::sparse::SparseOp;
use crate::error::{Error, Result};
use crate::model::{collapse_ops, hamiltonian, PhysicalParams, SegmentConfig};
use crate::qops::{c, hermitian_eigenvalues, hermitian_part, CMatrix, DensityMatrix, HilbertSpace, Operator, C64};

/// Largest superoperator dimension `d²` for which `Auto` uses the dense
/// exponential.
pub const AUTO_DENSE_MAX: usize = 256;

/// Trace drift tolerated before renormalizing.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
/// Most negative eigenvalue accepted after a propagation step.
pub const NEGATIVITY_TOL: f64 = 1e-8;
/// Unitarity tolerance for instantaneous gates.
pub const UNITARY_TOL: f64 = 1e-12;

/// Norm of `L h` per Taylor substep.
const TAYLOR_SUBSTEP: f64 = 2.0;
const TAYLOR_MAX_TERMS: usize = 80;
/// Norm of `L h` per RK4 step.
pub const RK4_STEP_NORM: f64 = 0.02;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    #[default]
    Auto,
    Pade,
    Taylor,
    Rk4,
}

impl Backend {
    fn resolve(self, dim: usize) -> Backend {
        match self {
            Backend::Auto if dim * dim <= AUTO_DENSE_MAX => Backend::Pade,
            Backend::Auto => Backend::Taylor,
            other => other,
        }
    }
}

/// The Lindblad generator for one Hamiltonian and set of collapse operators.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    space: HilbertSpace,
    hamiltonian: Operator,
    c_ops: Vec<Operator>,
    h_eff: SparseOp,
    jumps: Vec<SparseOp>,
    norm_bound: f64,
}

pub fn build_liouvillian(h: &Operator, c_ops: &[Operator]) -> Result<Liouvillian> {
    let space = h.space().clone();
    for (k, op) in c_ops.iter().enumerate() {
        if op.space() != &space {
            return Err(Error::DimensionMismatch(format!(
                "collapse operator {k} acts on {} but the Hamiltonian acts on {space}",
                op.space()
            )));
        }
    }
    let d = space.dim();
    let mut h_eff = h.data().clone();
    for op in c_ops {
        h_eff -= op.data().adjoint() * op.data() * C64::new(0.0, 0.5);
    }
    let h_eff = SparseOp::from_dense(&h_eff);
    let jumps: Vec<SparseOp> = c_ops.iter().map(|op| SparseOp::from_dense(op.data())).collect();
    // vec(A X B) = (Bᵀ ⊗ A) vec(X) and ‖Bᵀ ⊗ A‖₁ = ‖B‖_∞ ‖A‖₁
    let norm_bound = 2.0 * h_eff.norm1() + jumps.iter().map(|j| j.norm1().powi(2)).sum::<f64>();
    debug_assert_eq!(h_eff.dim(), d);
    Ok(Liouvillian {
        space,
        hamiltonian: h.clone(),
        c_ops: c_ops.to_vec(),
        h_eff,
        jumps,
        norm_bound,
    })
}

impl Liouvillian {
    pub fn for_segment(p: &PhysicalParams, seg: &SegmentConfig, space: &HilbertSpace) -> Result<Self> {
        build_liouvillian(&hamiltonian(p, seg, space)?, &collapse_ops(p, space)?)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn c_ops(&self) -> &[Operator] {
        &self.c_ops
    }

    /// Upper bound on the induced 1-norm of the vectorized generator.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// `L(x)` for any `d × d` matrix `x`.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        let mut scratch = CMatrix::zeros(d, d);
        self.apply_into(x, &mut out, &mut scratch);
        out
    }

    fn apply_into(&self, x: &CMatrix, out: &mut CMatrix, scratch: &mut CMatrix) {
        out.fill(c(0.0));
        let minus_i = C64::new(0.0, -1.0);
        self.h_eff.left_mul_acc(x, minus_i, out);
        self.h_eff.right_adj_mul_acc(x, -minus_i, out);
        for jump in &self.jumps {
            scratch.fill(c(0.0));
            jump.right_adj_mul_acc(x, c(1.0), scratch);
            jump.left_mul_acc(scratch, c(1.0), out);
        }
    }

    /// The dense `d² × d²` superoperator acting on column-stacked `vec(ρ)`.
    pub fn superoperator(&self) -> CMatrix {
        let d = self.dim();
        let id = CMatrix::identity(d, d);
        let h_eff = self.h_eff.to_dense();
        // vec(A X B) = (Bᵀ ⊗ A) vec(X)
        let mut sup = id.kronecker(&(&h_eff * C64::new(0.0, -1.0)));
        sup += h_eff.map(|z| z.conj()).kronecker(&id) * C64::new(0.0, 1.0);
        for jump in &self.jumps {
            let j = jump.to_dense();
            sup += j.map(|z| z.conj()).kronecker(&j);
        }
        sup
    }
}

/// `exp(L t) x` for an arbitrary matrix `x` (not necessarily a state).
pub fn evolve_matrix(l: &Liouvillian, x: &CMatrix, t: f64, backend: Backend) -> Result<CMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::param("duration", format!("must be finite and ≥ 0, got {t}")));
    }
    let d = l.dim();
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::DimensionMismatch(format!("matrix is {}x{}, generator dimension {d}", x.nrows(), x.ncols())));
    }
    if t == 0.0 {
        return Ok(x.clone());
    }
    let out = match backend.resolve(d) {
        Backend::Pade => {
            let prop = expm(&(l.superoperator() * c(t)))?;
            apply_dense(&prop, x)
        }
        Backend::Taylor => taylor_action(l, x, t),
        Backend::Rk4 => rk4(l, x, t),
        Backend::Auto => unreachable!(),
    };
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("propagation produced non-finite entries".into()));
    }
    Ok(out)
}

fn apply_dense(prop: &CMatrix, x: &CMatrix) -> CMatrix {
    let d = x.nrows();
    let v = nalgebra::DVector::from_column_slice(x.as_slice());
    let w = prop * v;
    CMatrix::from_column_slice(d, d, w.as_slice())
}

fn l1(x: &CMatrix) -> f64 {
    x.iter().map(|z| z.norm()).sum()
}

fn taylor_action(l: &Liouvillian, x: &CMatrix, t: f64) -> CMatrix {
    let d = l.dim();
    let beta = l.norm_bound() * t;
    let substeps = (beta / TAYLOR_SUBSTEP).ceil().max(1.0) as usize;
    let h = t / substeps as f64;
    let mut v = x.clone();
    let mut term = CMatrix::zeros(d, d);
    let mut next = CMatrix::zeros(d, d);
    let mut scratch = CMatrix::zeros(d, d);
    for _ in 0..substeps {
        term.copy_from(&v);
        let mut prev_small = false;
        for k in 1..=TAYLOR_MAX_TERMS {
            l.apply_into(&term, &mut next, &mut scratch);
            next *= c(h / k as f64);
            std::mem::swap(&mut term, &mut next);
            v += &term;
            let small = l1(&term) <= f64::EPSILON * 0.5 * l1(&v);
            if small && prev_small {
                break;
            }
            prev_small = small;
        }
    }
    v
}

fn rk4(l: &Liouvillian, x: &CMatrix, t: f64) -> CMatrix {
    let steps = (l.norm_bound() * t / RK4_STEP_NORM).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let d = l.dim();
    let mut scratch = CMatrix::zeros(d, d);
    let mut k = CMatrix::zeros(d, d);
    let mut y = x.clone();
    for _ in 0..steps {
        l.apply_into(&y, &mut k, &mut scratch);
        let k1 = k.clone();
        l.apply_into(&(&y + &k1 * c(0.5 * h)), &mut k, &mut scratch);
        let k2 = k.clone();
        l.apply_into(&(&y + &k2 * c(0.5 * h)), &mut k, &mut scratch);
        let k3 = k.clone();
        l.apply_into(&(&y + &k3 * c(h)), &mut k, &mut scratch);
        y += (k1 + k2 * c(2.0) + k3 * c(2.0) + &k) * c(h / 6.0);
    }
    y
}

/// Re-Hermitize, check trace drift and positivity, renormalize.
fn finish_state(space: &HilbertSpace, raw: CMatrix) -> Result<DensityMatrix> {
    let herm = hermitian_part(&raw);
    let tr = herm.trace().re;
    if (tr - 1.0).abs() > TRACE_DRIFT_TOL {
        return Err(Error::Numerical(format!("trace drifted to {tr:.12}")));
    }
    let rho = herm * c(1.0 / tr);
    let min_ev = hermitian_eigenvalues(&rho)[0];
    if min_ev < -NEGATIVITY_TOL {
        return Err(Error::Numerical(format!("state lost positivity (eigenvalue {min_ev:.3e})")));
    }
    DensityMatrix::from_raw(space.clone(), rho)
}

/// `ρ(t) = exp(L t) ρ(0)` with the automatically selected backend.
pub fn propagate(rho: &DensityMatrix, l: &Liouvillian, t: f64) -> Result<DensityMatrix> {
    propagate_with(rho, l, t, Backend::Auto)
}

pub fn propagate_with(rho: &DensityMatrix, l: &Liouvillian, t: f64, backend: Backend) -> Result<DensityMatrix> {
    if rho.space() != l.space() {
        return Err(Error::DimensionMismatch(format!("state on {} but generator on {}", rho.space(), l.space())));
    }
    if t == 0.0 {
        return Ok(rho.clone());
    }
    let raw = evolve_matrix(l, rho.data(), t, backend)?;
    finish_state(rho.space(), raw)
}

/// States at each of the ascending `times`, starting from `rho` at `t = 0`.
///
/// With the dense backend the propagator for a repeated time step is reused.
pub fn trajectory(rho: &DensityMatrix, l: &Liouvillian, times: &[f64], backend: Backend) -> Result<Vec<DensityMatrix>> {
    let mut out = Vec::with_capacity(times.len());
    let mut current = rho.clone();
    let mut t_prev = 0.0;
    let mut cached: Option<(f64, CMatrix)> = None;
    let dense = backend.resolve(l.dim()) == Backend::Pade;
    for &t in times {
        let dt = t - t_prev;
        if dt < 0.0 {
            return Err(Error::param("times", "sample times must be ascending from 0"));
        }
        if dt > 0.0 {
            current = if dense {
                let reuse = matches!(&cached, Some((h, _)) if (h - dt).abs() <= 1e-12 * dt);
                if !reuse {
                    cached = Some((dt, expm(&(l.superoperator() * c(dt)))?));
                }
                let prop = &cached.as_ref().unwrap().1;
                finish_state(l.space(), apply_dense(prop, current.data()))?
            } else {
                propagate_with(&current, l, dt, backend)?
            };
        }
        out.push(current.clone());
        t_prev = t;
    }
    Ok(out)
}

fn check_unitary(u: &Operator, label: &str) -> Result<()> {
    let dev = u.unitarity_error();
    if dev > UNITARY_TOL {
        return Err(Error::NonUnitary { label: label.to_string(), deviation: dev });
    }
    Ok(())
}

/// `U ρ U†` for a unitary `U`.
pub fn apply_unitary(rho: &DensityMatrix, u: &Operator) -> Result<DensityMatrix> {
    if rho.space() != u.space() {
        return Err(Error::DimensionMismatch(format!("state on {} but unitary on {}", rho.space(), u.space())));
    }
    check_unitary(u, "unitary")?;
    let out = u.data() * rho.data() * u.data().adjoint();
    DensityMatrix::from_raw(rho.space().clone(), hermitian_part(&out))
}

/// One entry of a [`Schedule`].
#[derive(Clone, Debug)]
pub enum Step {
    /// Lindblad evolution for `duration` seconds under a fixed configuration.
    Evolve { label: String, duration: f64, seg: SegmentConfig },
    /// Instantaneous ideal gate.
    Unitary { label: String, op: Operator },
}

impl Step {
    pub fn label(&self) -> &str {
        match self {
            Step::Evolve { label, .. } | Step::Unitary { label, .. } => label,
        }
    }

    pub fn duration(&self) -> f64 {
        match self {
            Step::Evolve { duration, .. } => *duration,
            Step::Unitary { .. } => 0.0,
        }
    }
}

/// An ordered list of evolution segments and instantaneous gates.
#[derive(Clone, Debug, Default)]
pub struct Schedule {
    steps: Vec<Step>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_evolve(&mut self, label: impl Into<String>, duration: f64, seg: SegmentConfig) -> Result<()> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::param("duration", format!("evolution steps need a finite duration > 0, got {duration}")));
        }
        seg.validate()?;
        self.steps.push(Step::Evolve { label: label.into(), duration, seg });
        Ok(())
    }

    pub fn push_unitary(&mut self, label: impl Into<String>, op: Operator) -> Result<()> {
        let label = label.into();
        check_unitary(&op, &label)?;
        self.steps.push(Step::Unitary { label, op });
        Ok(())
    }

    pub fn extend(&mut self, other: Schedule) {
        self.steps.extend(other.steps);
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.steps.iter().map(Step::duration).sum()
    }

    /// `(label, duration)` per step.
    pub fn timings(&self) -> Vec<(String, f64)> {
        self.steps.iter().map(|s| (s.label().to_string(), s.duration())).collect()
    }

    /// One human-readable line per step, for output metadata.
    pub fn describe(&self) -> Vec<String> {
        self.steps
            .iter()
            .map(|s| match s {
                Step::Evolve { label, duration, seg } => format!(
                    "{label}: evolve {duration:.6e} s (delta={:.6e} rad/s, drive={}, sc={})",
                    seg.delta, seg.drive_on, seg.sc_coupled
                ),
                Step::Unitary { label, .. } => format!("{label}: ideal unitary"),
            })
            .collect()
    }
}

pub fn run_schedule(rho0: &DensityMatrix, p: &PhysicalParams, sched: &Schedule) -> Result<DensityMatrix> {
    run_schedule_with(rho0, p, sched, Backend::Auto)
}

pub fn run_schedule_with(
    rho0: &DensityMatrix,
    p: &PhysicalParams,
    sched: &Schedule,
    backend: Backend,
) -> Result<DensityMatrix> {
    let space = rho0.space();
    let c_ops = collapse_ops(p, space)?;
    let mut rho = rho0.clone();
    for step in sched.steps() {
        rho = match step {
            Step::Evolve { duration, seg, .. } => {
                let l = build_liouvillian(&hamiltonian(p, seg, space)?, &c_ops)?;
                propagate_with(&rho, &l, *duration, backend)?
            }
            Step::Unitary { op, .. } => apply_unitary(&rho, op)?,
        };
    }
    Ok(rho)
}

/// Push an arbitrary operator `x` through the schedule's linear map.
pub fn run_schedule_matrix(
    x: &CMatrix,
    space: &HilbertSpace,
    p: &PhysicalParams,
    sched: &Schedule,
    backend: Backend,
) -> Result<CMatrix> {
    let c_ops = collapse_ops(p, space)?;
    let mut x = x.clone();
    for step in sched.steps() {
        x = match step {
            Step::Evolve { duration, seg, .. } => {
                let l = build_liouvillian(&hamiltonian(p, seg, space)?, &c_ops)?;
                evolve_matrix(&l, &x, *duration, backend)?
            }
            Step::Unitary { op, .. } => {
                if op.space() != space {
                    return Err(Error::DimensionMismatch(format!("unitary on {} applied on {space}", op.space())));
                }
                op.data() * x * op.data().adjoint()
            }
        };
    }
    Ok(x)
}

#[cfg(test)]
mod tests;
