//! Quasi-static field of the coplanar waveguide cross-section.
//!
//! The unit-voltage potential is found on a uniform node grid in the `(x, z)`
//! plane with `z = 0` on the chip surface and the substrate below. Each grid
//! cell carries a relative permittivity; the discrete equations come from box
//! integration, so a link's weight is the mean permittivity of the (one or two)
//! cells on either side of it. Links never cross the substrate surface because
//! it lies on a node row. Conductors are zero-thickness Dirichlet strips; nodes
//! on the outer boundary are Dirichlet in the CPW problem and may be left free
//! (zero normal flux) in a general [`LaplaceProblem`].
//!
//! The unit solution is scaled to the vacuum field by matching the electric
//! energy of the half-wave mode to `ħω/2`, then converted to a coupling with
//! `g = |E₀| d / ħ`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::constants::{C_LIGHT, EPS0, HBAR, TWO_PI};
use crate::error::{Error, Result};

/// Coplanar waveguide cross-section and resonator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CpwGeometry {
    /// Center-trace width, m.
    pub s: f64,
    /// Gap width, m.
    pub w: f64,
    pub eps_r: f64,
    /// Half-width of the simulation box, m.
    pub half_width: f64,
    /// Height of the box above the surface, m.
    pub height: f64,
    /// Substrate depth, m.
    pub depth: f64,
    /// Grid spacing, m.
    pub spacing: f64,
    /// Length of the half-wave resonator, m.
    pub resonator_length: f64,
    /// Angular frequency of the mode, rad/s.
    pub omega_c: f64,
}

/// `(1 + ε_r)/2`
pub fn effective_permittivity(eps_r: f64) -> f64 {
    (1.0 + eps_r) / 2.0
}

/// Half-wave length `c / (√ε_eff · 2f)`.
pub fn half_wave_length(omega_c: f64, eps_r: f64) -> f64 {
    let f = omega_c / TWO_PI;
    C_LIGHT / (effective_permittivity(eps_r).sqrt() * 2.0 * f)
}

impl Default for CpwGeometry {
    /// 20 µm trace, 10 µm gaps on sapphire, 5.037 GHz.
    fn default() -> Self {
        let omega_c = TWO_PI * 5.037e9;
        let eps_r = 9.6;
        Self {
            s: 20e-6,
            w: 10e-6,
            eps_r,
            half_width: 100e-6,
            height: 100e-6,
            depth: 60e-6,
            spacing: 0.5e-6,
            resonator_length: half_wave_length(omega_c, eps_r),
            omega_c,
        }
    }
}

/// `n` such that `n·h = len`, if it is an integer up to round-off.
fn steps(len: f64, h: f64) -> Option<usize> {
    let n = len / h;
    let r = n.round();
    ((n - r).abs() < 1e-6 && r >= 1.0).then_some(r as usize)
}

impl CpwGeometry {
    pub fn with_spacing(&self, spacing: f64) -> Self {
        Self { spacing, ..self.clone() }
    }

    pub fn eps_eff(&self) -> f64 {
        effective_permittivity(self.eps_r)
    }

    /// Center of the right-hand gap, `(s + w)/2`.
    pub fn gap_center(&self) -> f64 {
        (self.s + self.w) / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("s", self.s),
            ("w", self.w),
            ("spacing", self.spacing),
            ("half_width", self.half_width),
            ("height", self.height),
            ("depth", self.depth),
            ("resonator_length", self.resonator_length),
            ("omega_c", self.omega_c),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.eps_r >= 1.0) {
            return Err(Error::param("eps_r", format!("must be at least 1, got {}", self.eps_r)));
        }
        if self.spacing > self.w / 10.0 * (1.0 + 1e-9) {
            return Err(Error::param("spacing", "must resolve the gap with at least 10 cells"));
        }
        if self.half_width <= self.s / 2.0 + self.w + self.spacing {
            return Err(Error::param("half_width", "box must contain the ground-plane edges"));
        }
        for (name, len) in [
            ("half_width", self.half_width),
            ("height", self.height),
            ("depth", self.depth),
            ("s", self.s / 2.0),
            ("w", self.w),
        ] {
            if steps(len, self.spacing).is_none() {
                return Err(Error::param(name, "must be a whole number of grid spacings (s/2 for the trace)"));
            }
        }
        Ok(())
    }

    /// Dirichlet problem for the unit-voltage center conductor.
    pub fn problem(&self) -> Result<LaplaceProblem> {
        self.validate()?;
        let h = self.spacing;
        let half = steps(self.half_width, h).unwrap_or_default();
        let below = steps(self.depth, h).unwrap_or_default();
        let above = steps(self.height, h).unwrap_or_default();
        let trace = steps(self.s / 2.0, h).unwrap_or_default();
        let ground = trace + steps(self.w, h).unwrap_or_default();
        let nx = 2 * half + 1;
        let nz = below + above + 1;

        let mut eps_cell = vec![1.0; (nx - 1) * (nz - 1)];
        for k in 0..below {
            eps_cell[k * (nx - 1)..(k + 1) * (nx - 1)].fill(self.eps_r);
        }
        let mut fixed = vec![None; nx * nz];
        for k in 0..nz {
            for i in 0..nx {
                if i == 0 || i == nx - 1 || k == 0 || k == nz - 1 {
                    fixed[k * nx + i] = Some(0.0);
                }
            }
        }
        for i in 0..nx {
            let off = i.abs_diff(half);
            let v = if off <= trace {
                Some(1.0)
            } else if off >= ground {
                Some(0.0)
            } else {
                None
            };
            if v.is_some() {
                fixed[below * nx + i] = v;
            }
        }
        LaplaceProblem::new(nx, nz, h, -self.half_width, -self.depth, eps_cell, fixed)
    }
}

/// Relaxation parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverOptions {
    pub omega: f64,
    /// Target for the largest Jacobi correction, relative to the largest
    /// boundary value.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Sweeps between residual evaluations.
    pub check_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { omega: 1.9, tolerance: 1e-8, max_iterations: 1_000_000, check_every: 50 }
    }
}

/// Discrete `∇·(ε∇φ) = 0` on a uniform node grid with per-cell permittivity.
#[derive(Clone, Debug)]
pub struct LaplaceProblem {
    nx: usize,
    nz: usize,
    h: f64,
    x0: f64,
    z0: f64,
    /// `(nx−1)·(nz−1)` cells, row-major in z.
    eps_cell: Vec<f64>,
    /// Dirichlet values; `None` nodes are solved for.
    fixed: Vec<Option<f64>>,
}

/// Link weights of one node: west, east, south, north.
#[derive(Clone, Copy, Default)]
struct Stencil {
    w: f64,
    e: f64,
    s: f64,
    n: f64,
    inv: f64,
}

#[derive(Clone, Debug)]
pub struct LaplaceSolution {
    pub potential: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl LaplaceProblem {
    pub fn new(
        nx: usize,
        nz: usize,
        h: f64,
        x0: f64,
        z0: f64,
        eps_cell: Vec<f64>,
        fixed: Vec<Option<f64>>,
    ) -> Result<Self> {
        if nx < 2 || nz < 2 {
            return Err(Error::InvalidDimension(format!("grid {nx}×{nz} is too small")));
        }
        if eps_cell.len() != (nx - 1) * (nz - 1) || fixed.len() != nx * nz {
            return Err(Error::DimensionMismatch("cell or node arrays do not match the grid".into()));
        }
        if !(h > 0.0) {
            return Err(Error::param("spacing", "must be positive"));
        }
        if eps_cell.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::param("eps_r", "cell permittivities must be positive"));
        }
        if fixed.iter().all(Option::is_none) {
            return Err(Error::InvalidState("problem has no Dirichlet nodes".into()));
        }
        Ok(Self { nx, nz, h, x0, z0, eps_cell, fixed })
    }

    /// Plates at `z = 0` (0 V) and at the top (`voltage`) with the given
    /// `(thickness, ε_r)` layers between them and free side walls.
    pub fn parallel_plate(layers: &[(f64, f64)], width: f64, h: f64, voltage: f64) -> Result<Self> {
        let nx = steps(width, h).ok_or_else(|| Error::param("width", "not a whole number of spacings"))? + 1;
        let mut cell_rows = Vec::new();
        for &(t, eps) in layers {
            let n = steps(t, h).ok_or_else(|| Error::param("thickness", "not a whole number of spacings"))?;
            cell_rows.extend(std::iter::repeat(eps).take(n));
        }
        let nz = cell_rows.len() + 1;
        let eps_cell = cell_rows.iter().flat_map(|&e| std::iter::repeat(e).take(nx - 1)).collect();
        let mut fixed = vec![None; nx * nz];
        fixed[..nx].fill(Some(0.0));
        fixed[(nz - 1) * nx..].fill(Some(voltage));
        Self::new(nx, nz, h, 0.0, 0.0, eps_cell, fixed)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.nz)
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.h * i as f64
    }

    pub fn z(&self, k: usize) -> f64 {
        self.z0 + self.h * k as f64
    }

    fn cell(&self, i: isize, k: isize) -> f64 {
        if i < 0 || k < 0 || i as usize >= self.nx - 1 || k as usize >= self.nz - 1 {
            0.0
        } else {
            self.eps_cell[k as usize * (self.nx - 1) + i as usize]
        }
    }

    /// Weight of the link from `(i, k)` to `(i+1, k)`.
    fn weight_x(&self, i: usize, k: usize) -> f64 {
        let (i, k) = (i as isize, k as isize);
        (self.cell(i, k - 1) + self.cell(i, k)) / 2.0
    }

    /// Weight of the link from `(i, k)` to `(i, k+1)`.
    fn weight_z(&self, i: usize, k: usize) -> f64 {
        let (i, k) = (i as isize, k as isize);
        (self.cell(i - 1, k) + self.cell(i, k)) / 2.0
    }

    fn stencils(&self) -> Vec<Stencil> {
        let (nx, nz) = (self.nx, self.nz);
        let mut out = vec![Stencil::default(); nx * nz];
        for k in 0..nz {
            for i in 0..nx {
                let st = &mut out[k * nx + i];
                st.w = if i > 0 { self.weight_x(i - 1, k) } else { 0.0 };
                st.e = if i + 1 < nx { self.weight_x(i, k) } else { 0.0 };
                st.s = if k > 0 { self.weight_z(i, k - 1) } else { 0.0 };
                st.n = if k + 1 < nz { self.weight_z(i, k) } else { 0.0 };
                let sum = st.w + st.e + st.s + st.n;
                st.inv = if sum > 0.0 { 1.0 / sum } else { 0.0 };
            }
        }
        out
    }

    /// Red–black successive over-relaxation.
    pub fn solve(&self, opts: &SolverOptions) -> Result<LaplaceSolution> {
        if !(opts.omega > 0.0 && opts.omega < 2.0) {
            return Err(Error::param("omega", "relaxation factor must lie in (0, 2)"));
        }
        let (nx, nz) = (self.nx, self.nz);
        let st = self.stencils();
        let free: Vec<bool> = self.fixed.iter().map(Option::is_none).collect();
        let mut phi: Vec<f64> = self.fixed.iter().map(|v| v.unwrap_or(0.0)).collect();
        let scale = self.fixed.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let target = opts.tolerance * scale;
        let check_every = opts.check_every.max(1);

        // neighbour values outside the grid have zero weight
        let avg = |phi: &[f64], idx: usize, i: usize, k: usize| -> f64 {
            let s = &st[idx];
            let west = if i > 0 { s.w * phi[idx - 1] } else { 0.0 };
            let east = if i + 1 < nx { s.e * phi[idx + 1] } else { 0.0 };
            let south = if k > 0 { s.s * phi[idx - nx] } else { 0.0 };
            let north = if k + 1 < nz { s.n * phi[idx + nx] } else { 0.0 };
            ((west + east) + (south + north)) * s.inv
        };

        let mut iterations = 0;
        loop {
            for _ in 0..check_every {
                for color in 0..2 {
                    for k in 0..nz {
                        let start = (k + color) % 2;
                        for i in (start..nx).step_by(2) {
                            let idx = k * nx + i;
                            if free[idx] {
                                let target = avg(&phi, idx, i, k);
                                phi[idx] += opts.omega * (target - phi[idx]);
                            }
                        }
                    }
                }
            }
            iterations += check_every;
            let mut residual = 0.0f64;
            for k in 0..nz {
                for i in 0..nx {
                    let idx = k * nx + i;
                    if free[idx] {
                        residual = residual.max((avg(&phi, idx, i, k) - phi[idx]).abs());
                    }
                }
            }
            if !residual.is_finite() {
                return Err(Error::Numerical("relaxation diverged".into()));
            }
            if residual < target {
                return Ok(LaplaceSolution { potential: phi, residual, iterations });
            }
            if iterations >= opts.max_iterations {
                return Err(Error::NonConvergence { iterations, residual });
            }
        }
    }

    /// `Σ_links w (Δφ)²`, i.e. `∫ ε_r |∇φ|² dA` for the discrete field.
    pub fn energy(&self, phi: &[f64]) -> f64 {
        let nx = self.nx;
        let mut total = 0.0;
        for k in 0..self.nz {
            for i in 0..nx {
                let idx = k * nx + i;
                if i + 1 < nx {
                    let d = phi[idx + 1] - phi[idx];
                    total += self.weight_x(i, k) * d * d;
                }
                if k + 1 < self.nz {
                    let d = phi[idx + nx] - phi[idx];
                    total += self.weight_z(i, k) * d * d;
                }
            }
        }
        total
    }

    /// `E = −∇φ` at every node: central differences inside, one-sided at the
    /// edges.
    pub fn gradient_field(&self, phi: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (nx, nz, h) = (self.nx, self.nz, self.h);
        let mut ex = vec![0.0; nx * nz];
        let mut ez = vec![0.0; nx * nz];
        for k in 0..nz {
            for i in 0..nx {
                let idx = k * nx + i;
                let (lo, hi) = (i.saturating_sub(1), (i + 1).min(nx - 1));
                ex[idx] = -(phi[k * nx + hi] - phi[k * nx + lo]) / (h * (hi - lo) as f64);
                let (lo, hi) = (k.saturating_sub(1), (k + 1).min(nz - 1));
                ez[idx] = -(phi[hi * nx + i] - phi[lo * nx + i]) / (h * (hi - lo) as f64);
            }
        }
        (ex, ez)
    }
}

/// Solved cross-section: unit-voltage potential and field, plus the
/// zero-point scale once normalized.
#[derive(Clone, Debug)]
pub struct FieldGrid {
    pub geometry: CpwGeometry,
    problem: LaplaceProblem,
    pub potential: Vec<f64>,
    pub ex: Vec<f64>,
    pub ez: Vec<f64>,
    /// Multiplier from the unit-voltage field to `E₀`.
    pub zero_point_amplitude: Option<f64>,
    /// `∫ ε |E_unit|² dA` per unit length, J/m per V².
    pub energy_per_length: f64,
    pub residual: f64,
    pub iterations: usize,
}

pub fn solve_potential(geom: &CpwGeometry) -> Result<FieldGrid> {
    solve_potential_with(geom, &SolverOptions::default())
}

pub fn solve_potential_with(geom: &CpwGeometry, opts: &SolverOptions) -> Result<FieldGrid> {
    let problem = geom.problem()?;
    let sol = problem.solve(opts)?;
    let (ex, ez) = problem.gradient_field(&sol.potential);
    let energy_per_length = EPS0 * problem.energy(&sol.potential);
    Ok(FieldGrid {
        geometry: geom.clone(),
        problem,
        potential: sol.potential,
        ex,
        ez,
        zero_point_amplitude: None,
        energy_per_length,
        residual: sol.residual,
        iterations: sol.iterations,
    })
}

/// Scale so that `A² (L/2) ∫ε|E|² dA = ħω/2`.
pub fn normalize_zero_point(mut grid: FieldGrid) -> Result<FieldGrid> {
    if !(grid.energy_per_length > 0.0) {
        return Err(Error::Numerical("field energy is zero".into()));
    }
    let g = &grid.geometry;
    let a2 = HBAR * g.omega_c / (g.resonator_length * grid.energy_per_length);
    grid.zero_point_amplitude = Some(a2.sqrt());
    Ok(grid)
}

impl FieldGrid {
    pub fn shape(&self) -> (usize, usize) {
        self.problem.shape()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.problem.x(i)
    }

    pub fn z(&self, k: usize) -> f64 {
        self.problem.z(k)
    }

    /// Node nearest to `(x, z)`, clamped to the grid.
    pub fn node_near(&self, x: f64, z: f64) -> (usize, usize) {
        let (nx, nz) = self.shape();
        let h = self.problem.spacing();
        let i = ((x - self.x(0)) / h).round().clamp(0.0, (nx - 1) as f64) as usize;
        let k = ((z - self.z(0)) / h).round().clamp(0.0, (nz - 1) as f64) as usize;
        (i, k)
    }

    fn idx(&self, i: usize, k: usize) -> usize {
        k * self.shape().0 + i
    }

    pub fn potential_at(&self, i: usize, k: usize) -> f64 {
        self.potential[self.idx(i, k)]
    }

    /// `|E|` of the unit-voltage solution, V/m.
    pub fn unit_field(&self, i: usize, k: usize) -> f64 {
        let idx = self.idx(i, k);
        self.ex[idx].hypot(self.ez[idx])
    }

    fn amplitude(&self) -> Result<f64> {
        self.zero_point_amplitude.ok_or(Error::Unnormalized)
    }

    /// Zero-point field magnitude `|E₀|`, V/m.
    pub fn e0(&self, i: usize, k: usize) -> Result<f64> {
        Ok(self.amplitude()? * self.unit_field(i, k))
    }
}

/// Node-aligned scalar map.
#[derive(Clone, Debug)]
pub struct ScalarGrid {
    pub nx: usize,
    pub nz: usize,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[k * self.nx + i]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `g = |E₀| d / ħ` at every node, rad/s.
pub fn coupling_map(grid: &FieldGrid, d_rr: f64) -> Result<ScalarGrid> {
    let a = grid.amplitude()?;
    let (nx, nz) = grid.shape();
    let values = grid.ex.iter().zip(&grid.ez).map(|(x, z)| a * x.hypot(*z) * d_rr / HBAR).collect();
    Ok(ScalarGrid { nx, nz, values })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub x: f64,
    pub z: f64,
    pub e0: f64,
    /// rad/s
    pub g: f64,
}

/// `E₀` and `g` along the vertical line nearest `x`, from the surface up.
pub fn profile(grid: &FieldGrid, x: f64, d_rr: f64) -> Result<Vec<ProfilePoint>> {
    let (i, k0) = grid.node_near(x, 0.0);
    let nz = grid.shape().1;
    (k0..nz)
        .map(|k| {
            let e0 = grid.e0(i, k)?;
            Ok(ProfilePoint { x: grid.x(i), z: grid.z(k), e0, g: e0 * d_rr / HBAR })
        })
        .collect()
}

/// `−1/slope` of a least-squares fit of `ln E₀` against `z` over
/// `[z_min, z_max]`.
pub fn decay_length(points: &[ProfilePoint], z_min: f64, z_max: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.z >= z_min - 1e-12 && p.z <= z_max + 1e-12 && p.e0 > 0.0)
        .map(|p| (p.z, p.e0.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::param("z range", "fewer than two profile points with nonzero field"));
    }
    let n = pts.len() as f64;
    let mz = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mz) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mz).powi(2)).sum();
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(Error::Numerical(format!("field does not decay with height (slope {slope:e})")));
    }
    Ok(-1.0 / slope)
}

/// Height window used for the decay-length fit, m.
pub const DECAY_FIT_RANGE: (f64, f64) = (5e-6, 30e-6);

/// Headline numbers of a normalized field.
#[derive(Clone, Debug, Serialize)]
pub struct FieldSummary {
    pub geometry: CpwGeometry,
    pub eps_eff: f64,
    pub resonator_length_m: f64,
    pub zero_point_amplitude: f64,
    pub energy_per_length_j_per_m: f64,
    pub residual: f64,
    pub iterations: usize,
    pub dipole_c_m: f64,
    /// On the surface at the gap center.
    pub g_surface_over_2pi_hz: f64,
    /// 10 µm above the gap center.
    pub g_10um_over_2pi_hz: f64,
    pub decay_length_m: f64,
}

pub fn summarize(grid: &FieldGrid, d_rr: f64) -> Result<FieldSummary> {
    let g = &grid.geometry;
    let gap = profile(grid, g.gap_center(), d_rr)?;
    let at = |z: f64| -> f64 {
        gap.iter().min_by(|a, b| (a.z - z).abs().total_cmp(&(b.z - z).abs())).map(|p| p.g).unwrap_or(0.0)
    };
    Ok(FieldSummary {
        geometry: g.clone(),
        eps_eff: g.eps_eff(),
        resonator_length_m: g.resonator_length,
        zero_point_amplitude: grid.amplitude()?,
        energy_per_length_j_per_m: grid.energy_per_length,
        residual: grid.residual,
        iterations: grid.iterations,
        dipole_c_m: d_rr,
        g_surface_over_2pi_hz: at(0.0) / TWO_PI,
        g_10um_over_2pi_hz: at(10e-6) / TWO_PI,
        decay_length_m: decay_length(&gap, DECAY_FIT_RANGE.0, DECAY_FIT_RANGE.1)?,
    })
}

pub const FIELD_CSV_HEADER: &str = "x_m,z_m,e0_v_per_m,g_over_2pi_hz";

fn csv_row(out: &mut String, x: f64, z: f64, e0: f64, g: f64) {
    let _ = writeln!(out, "{x:.11e},{z:.11e},{e0:.11e},{:.11e}", g / TWO_PI);
}

/// Map of every `stride`-th node in x and z.
pub fn field_csv(grid: &FieldGrid, d_rr: f64, stride: usize) -> Result<String> {
    let a = grid.amplitude()?;
    let (nx, nz) = grid.shape();
    let stride = stride.max(1);
    let mut out = format!("{FIELD_CSV_HEADER}\n");
    for k in (0..nz).step_by(stride) {
        for i in (0..nx).step_by(stride) {
            let e0 = a * grid.unit_field(i, k);
            csv_row(&mut out, grid.x(i), grid.z(k), e0, e0 * d_rr / HBAR);
        }
    }
    Ok(out)
}

/// Vertical profiles at the trace center and the gap center.
pub fn profile_csv(grid: &FieldGrid, d_rr: f64) -> Result<String> {
    let mut out = format!("{FIELD_CSV_HEADER}\n");
    for x in [0.0, grid.geometry.gap_center()] {
        for p in profile(grid, x, d_rr)? {
            csv_row(&mut out, p.x, p.z, p.e0, p.g);
        }
    }
    Ok(out)
}

/// Write `<stem>.csv` (map), `<stem>_profile.csv` and `<stem>.json`.
pub fn write_outputs(grid: &FieldGrid, d_rr: f64, stride: usize, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let map = dir.join(format!("{stem}.csv"));
    let prof = dir.join(format!("{stem}_profile.csv"));
    let meta = dir.join(format!("{stem}.json"));
    fs::write(&map, field_csv(grid, d_rr, stride)?).map_err(|e| Error::io(&map, e))?;
    fs::write(&prof, profile_csv(grid, d_rr)?).map_err(|e| Error::io(&prof, e))?;
    let summary = serde_json::to_string_pretty(&summarize(grid, d_rr)?)
        .map_err(|e| Error::Numerical(format!("serializing field summary: {e}")))?;
    fs::write(&meta, summary).map_err(|e| Error::io(&meta, e))?;
    Ok(vec![map, prof, meta])
}
