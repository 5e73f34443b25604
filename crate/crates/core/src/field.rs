//! Smoothed field realizations Z_k on an evaluation grid, and positivity
//! transforms turning them into diffusion coefficients.
//!
//! The Gaussian part is a padded FFT convolution of the noise cells with
//! the kernel on the cell-center lattice, read off exactly at lattice-
//! coincident evaluation nodes and multilinearly interpolated elsewhere.
//! The jump part is summed atom by atom (atoms are sparse; exactness at
//! nodes beats binning error). The drift part is b·∫_Λ k(x−y) dy by
//! quadrature, cached per evaluation node. The three parts are retained
//! separately so their sum is exact by construction.

use std::sync::OnceLock;

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{BoxDomain, CellGrid, EvalGrid, Point};
use crate::matern::{MaternError, MaternKernel};
use crate::noise::NoiseRealization;
use crate::quad::{self, QuadOpts};

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("noise box must pad the evaluation hull by at least {required:.4} on every side (actual margin {actual:.4}); enlarge the cut-off box")]
    InsufficientPadding { required: f64, actual: f64 },
    #[error("noise realization grid does not match the smoother's grid")]
    GridMismatch,
    #[error("evaluation grid is empty or outside the noise box")]
    BadEvalGrid,
    #[error("field contains a non-finite value at node {0}")]
    NonFinite(usize),
    #[error("transform bound certification failed at z = {z}: {what}")]
    BoundCertification { z: f64, what: String },
    #[error("invalid transform parameters: {0}")]
    BadTransform(String),
    #[error(transparent)]
    Matern(#[from] MaternError),
    #[error(transparent)]
    Quadrature(#[from] quad::QuadError),
}

// ---------------------------------------------------------------------------
// Positivity transforms
// ---------------------------------------------------------------------------

/// Transform kinds mapping field values to strictly positive conductivities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformKind {
    /// T(z) = e^z.
    Exp,
    /// Smooth step between `low` and `high` with logistic width `width`.
    SmoothedStep { low: f64, high: f64, width: f64 },
    /// T(z) = exp(ρ·sign(z)·((|z|+ε₀)^h − ε₀^h)) with ε₀ = 1e−3, kept C¹ at 0.
    TemperedExp { exponent: f64, scale: f64 },
}

const TEMPERED_EPS: f64 = 1e-3;

/// Growth envelope parameters certifying
/// B⁻¹e^{−ρ|z|^h} ≤ T(z) ≤ Be^{ρ|z|^h} and |T'(z)| ≤ Be^{ρ|z|^h}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformBounds {
    pub b: f64,
    pub rho: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: TransformKind,
    pub bounds: TransformBounds,
}

impl TransformSpec {
    /// Build a transform and certify its declared envelope by dense
    /// sampling on [−50, 50].
    pub fn new(kind: TransformKind) -> Result<Self, FieldError> {
        let bounds = match kind {
            TransformKind::Exp => TransformBounds {
                b: 1.0,
                rho: 1.0,
                h: 1.0,
            },
            TransformKind::SmoothedStep { low, high, width } => {
                if !(low > 0.0) || !(high > low) || !(width > 0.0) {
                    return Err(FieldError::BadTransform(format!(
                        "smoothed step requires 0 < low < high and width > 0, got ({low}, {high}, {width})"
                    )));
                }
                TransformBounds {
                    b: high.max(1.0 / low).max((high - low) / (4.0 * width)),
                    rho: 0.0,
                    h: 0.0,
                }
            }
            TransformKind::TemperedExp { exponent, scale } => {
                if !(exponent > 0.0 && exponent < 1.0) || !(scale > 0.0) {
                    return Err(FieldError::BadTransform(format!(
                        "tempered exp requires h ∈ (0,1) and ρ > 0, got ({exponent}, {scale})"
                    )));
                }
                TransformBounds {
                    b: (scale * exponent * TEMPERED_EPS.powf(exponent - 1.0)).max(1.0),
                    rho: scale,
                    h: exponent,
                }
            }
        };
        let spec = Self { kind, bounds };
        spec.certify()?;
        Ok(spec)
    }

    fn certify(&self) -> Result<(), FieldError> {
        let TransformBounds { b, rho, h } = self.bounds;
        let envelope = |z: f64| b * (rho * z.abs().powf(h)).exp();
        let n = 100_001;
        for i in 0..n {
            let z = -50.0 + 100.0 * i as f64 / (n - 1) as f64;
            let t = self.eval(z);
            let env = envelope(z);
            if !(t > 0.0) || !t.is_finite() {
                return Err(FieldError::BoundCertification {
                    z,
                    what: format!("T(z) = {t} not strictly positive/finite"),
                });
            }
            if t > env * (1.0 + 1e-12) || t < (1.0 / env) * (1.0 - 1e-12) {
                return Err(FieldError::BoundCertification {
                    z,
                    what: format!("value {t} escapes envelope [{:.3e}, {:.3e}]", 1.0 / env, env),
                });
            }
            let d = self.deriv(z).abs();
            if d > env * (1.0 + 1e-12) {
                return Err(FieldError::BoundCertification {
                    z,
                    what: format!("derivative {d} exceeds envelope {env:.3e}"),
                });
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self.kind {
            TransformKind::Exp => z.exp(),
            TransformKind::SmoothedStep { low, high, width } => {
                low + (high - low) * logistic(z / width)
            }
            TransformKind::TemperedExp { exponent, scale } => {
                let inner = (z.abs() + TEMPERED_EPS).powf(exponent) - TEMPERED_EPS.powf(exponent);
                (scale * z.signum() * inner).exp()
            }
        }
    }

    pub fn deriv(&self, z: f64) -> f64 {
        match self.kind {
            TransformKind::Exp => z.exp(),
            TransformKind::SmoothedStep { low, high, width } => {
                let s = logistic(z / width);
                (high - low) / width * s * (1.0 - s)
            }
            TransformKind::TemperedExp { exponent, scale } => {
                self.eval(z) * scale * exponent * (z.abs() + TEMPERED_EPS).powf(exponent - 1.0)
            }
        }
    }
}

#[inline]
fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

// ---------------------------------------------------------------------------
// Field realizations
// ---------------------------------------------------------------------------

/// Provenance of a field realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub kernel: MaternKernel,
    pub noise_box: BoxDomain,
    pub seed: u64,
}

/// Z_k sampled at evaluation nodes, with the Gaussian, jump and drift
/// contributions retained separately.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    pub eval_grid: EvalGrid,
    pub gaussian: Vec<f64>,
    pub jump: Vec<f64>,
    pub drift: Vec<f64>,
    pub provenance: Provenance,
}

impl FieldRealization {
    /// Nodewise total Z_k = drift + gaussian + jump.
    pub fn values(&self) -> Vec<f64> {
        (0..self.eval_grid.len()).map(|i| self.value_at(i)).collect()
    }

    #[inline]
    pub fn value_at(&self, i: usize) -> f64 {
        self.drift[i] + self.gaussian[i] + self.jump[i]
    }

    /// Max of |Z_k| over nodes inside `region` (whole grid when `None`);
    /// a grid lower bound of the continuum supremum.
    pub fn sup_abs(&self, region: Option<&BoxDomain>) -> f64 {
        let mut sup = 0.0f64;
        for (i, p) in self.eval_grid.points.iter().enumerate() {
            if region.map_or(true, |r| r.contains(p)) {
                sup = sup.max(self.value_at(i).abs());
            }
        }
        sup
    }

    pub fn check_finite(&self) -> Result<(), FieldError> {
        for i in 0..self.eval_grid.len() {
            if !self.value_at(i).is_finite() {
                return Err(FieldError::NonFinite(i));
            }
        }
        Ok(())
    }
}

/// Strictly positive coefficient a = T ∘ Z_k on the evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    pub eval_grid: EvalGrid,
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

/// a(x) = T(Z_k(x)) nodewise, recording the extremes.
pub fn transform_field(
    fr: &FieldRealization,
    transform: &TransformSpec,
) -> Result<CoefficientField, FieldError> {
    fr.check_finite()?;
    let values: Vec<f64> = (0..fr.eval_grid.len())
        .map(|i| transform.eval(fr.value_at(i)))
        .collect();
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in &values {
        min = min.min(v);
        max = max.max(v);
    }
    Ok(CoefficientField {
        eval_grid: fr.eval_grid.clone(),
        values,
        min,
        max,
    })
}

// ---------------------------------------------------------------------------
// Smoother
// ---------------------------------------------------------------------------

/// Options controlling the smoothing pipeline.
#[derive(Debug, Clone, Copy)]
pub struct SmoothOpts {
    /// Kernel truncation for taps and atom skipping, relative to k(0).
    pub tap_tol_rel: f64,
    /// Required noise-box padding around the evaluation hull, as a kernel
    /// decay tolerance relative to k(0). `None` disables the check (used
    /// by cut-off studies that deliberately shrink the box).
    pub required_pad_tol_rel: Option<f64>,
}

impl Default for SmoothOpts {
    fn default() -> Self {
        Self {
            tap_tol_rel: 1e-10,
            required_pad_tol_rel: Some(1e-8),
        }
    }
}

enum NodeMap {
    /// Node coincides with a cell-center lattice point.
    Lattice(usize),
    /// Multilinear interpolation weights over up to 4 lattice cells.
    Interp([(usize, f64); 4], usize),
}

/// Precomputed smoothing operator for a fixed (kernel, noise grid,
/// evaluation grid) triple; `apply` is pure and reusable across samples.
pub struct Smoother {
    pub kernel: MaternKernel,
    pub noise_grid: CellGrid,
    pub eval_grid: EvalGrid,
    opts: SmoothOpts,
    /// kernel decay radius at tap tolerance
    radius: f64,
    /// FFT size per axis and frequency-domain taps
    fft_n: [usize; 2],
    freq_taps: Vec<Complex<f64>>,
    node_map: Vec<NodeMap>,
    drift_weights: OnceLock<Vec<f64>>,
}

impl Smoother {
    pub fn new(
        kernel: MaternKernel,
        noise_grid: CellGrid,
        eval_grid: EvalGrid,
        opts: SmoothOpts,
    ) -> Result<Self, FieldError> {
        if eval_grid.is_empty() {
            return Err(FieldError::BadEvalGrid);
        }
        let hull = eval_grid.hull().ok_or(FieldError::BadEvalGrid)?;
        let noise_box = noise_grid.domain;
        for p in &eval_grid.points {
            if !noise_box.contains(p) {
                return Err(FieldError::BadEvalGrid);
            }
        }
        let k0 = kernel.eval(0.0);
        if let Some(tol) = opts.required_pad_tol_rel {
            let required = kernel.decay_radius(tol * k0)?;
            let actual = noise_box.distance_to_complement(&hull);
            if actual + 1e-12 < required {
                return Err(FieldError::InsufficientPadding { required, actual });
            }
        }
        let radius = kernel.decay_radius(opts.tap_tol_rel * k0)?;
        let dim = noise_grid.dim();

        // taps: kernel at lattice offsets within the decay radius
        let h = [noise_grid.spacing(0), if dim == 2 { noise_grid.spacing(1) } else { 1.0 }];
        let t_max = [
            (radius / h[0]).ceil() as usize + 1,
            if dim == 2 {
                (radius / h[1]).ceil() as usize + 1
            } else {
                0
            },
        ];
        let n = noise_grid.n;
        let fft_n = [
            (n[0] + 2 * t_max[0] + 1).next_power_of_two(),
            if dim == 2 {
                (n[1] + 2 * t_max[1] + 1).next_power_of_two()
            } else {
                1
            },
        ];
        // circularly embedded tap array, then transformed once
        let mut taps = vec![Complex::new(0.0, 0.0); fft_n[0] * fft_n[1]];
        for dj in -(t_max[1] as i64)..=(t_max[1] as i64).max(0) {
            if dim == 1 && dj != 0 {
                continue;
            }
            for di in -(t_max[0] as i64)..=(t_max[0] as i64) {
                let r = ((di as f64 * h[0]).powi(2) + (dj as f64 * h[1]).powi(2)).sqrt();
                if r > radius {
                    continue;
                }
                let ii = di.rem_euclid(fft_n[0] as i64) as usize;
                let jj = dj.rem_euclid(fft_n[1] as i64) as usize;
                taps[jj * fft_n[0] + ii] = Complex::new(kernel.eval(r), 0.0);
            }
        }
        fft2_in_place(&mut taps, fft_n, false);

        // evaluation-node mapping onto the cell-center lattice
        let node_map = eval_grid
            .points
            .iter()
            .map(|p| node_map_for(&noise_grid, p))
            .collect();

        Ok(Self {
            kernel,
            noise_grid,
            eval_grid,
            opts,
            radius,
            fft_n,
            freq_taps: taps,
            node_map,
            drift_weights: OnceLock::new(),
        })
    }

    /// Smooth one noise realization into a field realization.
    pub fn apply(&self, z: &NoiseRealization) -> Result<FieldRealization, FieldError> {
        if z.grid != self.noise_grid {
            return Err(FieldError::GridMismatch);
        }
        let n_nodes = self.eval_grid.len();

        // Gaussian part: padded FFT convolution on the cell lattice
        let gaussian = if z.gaussian_cells.iter().any(|&w| w != 0.0) {
            let lattice = self.convolve_cells(&z.gaussian_cells);
            (0..n_nodes)
                .map(|i| self.read_lattice(&lattice, i))
                .collect()
        } else {
            vec![0.0; n_nodes]
        };

        // jump part: direct summation with decay-radius skipping
        let mut jump = vec![0.0; n_nodes];
        self.add_atoms(&z.atoms, &mut jump, false);

        // drift part: b · ∫_Λ k(x−y) dy
        let drift = if z.drift != 0.0 {
            let wts = self.drift_weights()?;
            wts.iter().map(|w| z.drift * w).collect()
        } else {
            vec![0.0; n_nodes]
        };

        let fr = FieldRealization {
            eval_grid: self.eval_grid.clone(),
            gaussian,
            jump,
            drift,
            provenance: Provenance {
                kernel: self.kernel,
                noise_box: self.noise_grid.domain,
                seed: z.seed,
            },
        };
        fr.check_finite()?;
        Ok(fr)
    }

    /// Jump-part-only evaluation (used by the domination check).
    pub fn jump_field(&self, atoms: &[crate::noise::Atom], absolute: bool) -> Vec<f64> {
        let mut out = vec![0.0; self.eval_grid.len()];
        self.add_atoms(atoms, &mut out, absolute);
        out
    }

    fn add_atoms(&self, atoms: &[crate::noise::Atom], out: &mut [f64], absolute: bool) {
        for atom in atoms {
            let size = if absolute { atom.size.abs() } else { atom.size };
            for (i, p) in self.eval_grid.points.iter().enumerate() {
                let dx = p[0] - atom.position[0];
                if dx.abs() > self.radius {
                    continue;
                }
                let dy = if self.eval_grid.dim == 2 {
                    p[1] - atom.position[1]
                } else {
                    0.0
                };
                if dy.abs() > self.radius {
                    continue;
                }
                let r = (dx * dx + dy * dy).sqrt();
                if r <= self.radius {
                    out[i] += size * self.kernel.eval(r);
                }
            }
        }
    }

    fn convolve_cells(&self, cells: &[f64]) -> Vec<f64> {
        let dim = self.noise_grid.dim();
        let n = self.noise_grid.n;
        let m = self.fft_n;
        let mut buf = vec![Complex::new(0.0, 0.0); m[0] * m[1]];
        for j in 0..n[1] {
            for i in 0..n[0] {
                buf[j * m[0] + i] = Complex::new(cells[j * n[0] + i], 0.0);
            }
        }
        fft2_in_place(&mut buf, m, false);
        for (b, t) in buf.iter_mut().zip(&self.freq_taps) {
            *b *= *t;
        }
        fft2_in_place(&mut buf, m, true);
        let scale = 1.0 / (m[0] * m[1]) as f64;
        let mut out = vec![0.0; n[0] * n[1]];
        for j in 0..n[1] {
            for i in 0..n[0] {
                out[j * n[0] + i] = buf[j * m[0] + i].re * scale;
            }
        }
        let _ = dim;
        out
    }

    fn read_lattice(&self, lattice: &[f64], node: usize) -> f64 {
        match &self.node_map[node] {
            NodeMap::Lattice(idx) => lattice[*idx],
            NodeMap::Interp(weights, count) => weights[..*count]
                .iter()
                .map(|&(idx, w)| w * lattice[idx])
                .sum(),
        }
    }

    fn drift_weights(&self) -> Result<&Vec<f64>, FieldError> {
        if let Some(w) = self.drift_weights.get() {
            return Ok(w);
        }
        let w = self.compute_drift_weights()?;
        Ok(self.drift_weights.get_or_init(|| w))
    }

    /// ∫_Λ k(x − y) dy per evaluation node, adaptive quadrature.
    fn compute_drift_weights(&self) -> Result<Vec<f64>, FieldError> {
        let kernel = self.kernel;
        let b = self.noise_grid.domain;
        let opts = QuadOpts {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_depth: 50,
        };
        let mut out = Vec::with_capacity(self.eval_grid.len());
        for p in &self.eval_grid.points {
            let v = if b.dim == 1 {
                let lo = p[0] - b.upper[0];
                let hi = p[0] - b.lower[0];
                integrate_split(|u: f64| kernel.eval(u.abs()), lo, hi, &opts)?
            } else {
                let (px, py) = (p[0], p[1]);
                let inner = move |y1: f64| {
                    let ky = move |y2: f64| {
                        kernel.eval(((px - y1).powi(2) + (py - y2).powi(2)).sqrt())
                    };
                    integrate_split(ky, b.lower[1], b.upper[1], &opts)
                        .unwrap_or(f64::NAN)
                };
                integrate_split(inner, b.lower[0], b.upper[0], &opts)?
            };
            if !v.is_finite() {
                return Err(FieldError::NonFinite(out.len()));
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// Integrate with a split at 0 (kernel slope is discontinuous there).
fn integrate_split<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOpts) -> Result<f64, quad::QuadError> {
    if a < 0.0 && b > 0.0 {
        let left = quad::integrate(&f, a, 0.0, opts)?.value;
        let right = quad::integrate(&f, 0.0, b, opts)?.value;
        Ok(left + right)
    } else {
        Ok(quad::integrate(f, a, b, opts)?.value)
    }
}

fn node_map_for(grid: &CellGrid, p: &Point) -> NodeMap {
    let dim = grid.dim();
    let eps = 1e-9;
    // fractional lattice coordinates relative to cell centers
    let mut base = [0usize; 2];
    let mut frac = [0.0f64; 2];
    for ax in 0..dim {
        let h = grid.spacing(ax);
        let rel = (p[ax] - grid.domain.lower[ax]) / h - 0.5;
        let max_i = grid.n[ax] - 1;
        let fl = rel.floor().clamp(0.0, max_i as f64);
        base[ax] = fl as usize;
        frac[ax] = (rel - fl).clamp(0.0, 1.0);
        if base[ax] >= max_i && max_i > 0 {
            base[ax] = max_i - 1;
            frac[ax] = 1.0;
        }
    }
    let on_lattice = (0..dim).all(|ax| {
        frac[ax].abs() < eps || (frac[ax] - 1.0).abs() < eps || grid.n[ax] == 1
    });
    let nx = grid.n[0];
    if on_lattice {
        let mut idx = [0usize; 2];
        for ax in 0..dim {
            idx[ax] = if frac[ax] > 0.5 {
                (base[ax] + 1).min(grid.n[ax] - 1)
            } else {
                base[ax]
            };
        }
        return NodeMap::Lattice(idx[1] * nx + idx[0]);
    }
    if dim == 1 {
        let i1 = (base[0] + 1).min(grid.n[0] - 1);
        NodeMap::Interp(
            [
                (base[0], 1.0 - frac[0]),
                (i1, frac[0]),
                (0, 0.0),
                (0, 0.0),
            ],
            2,
        )
    } else {
        let i1 = (base[0] + 1).min(grid.n[0] - 1);
        let j1 = (base[1] + 1).min(grid.n[1] - 1);
        let (fx, fy) = (frac[0], frac[1]);
        NodeMap::Interp(
            [
                (base[1] * nx + base[0], (1.0 - fx) * (1.0 - fy)),
                (base[1] * nx + i1, fx * (1.0 - fy)),
                (j1 * nx + base[0], (1.0 - fx) * fy),
                (j1 * nx + i1, fx * fy),
            ],
            4,
        )
    }
}

/// In-place FFT over a (possibly degenerate) 2-d row-major buffer.
fn fft2_in_place(buf: &mut [Complex<f64>], n: [usize; 2], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft_x = if inverse {
        planner.plan_fft_inverse(n[0])
    } else {
        planner.plan_fft_forward(n[0])
    };
    for row in buf.chunks_mut(n[0]) {
        fft_x.process(row);
    }
    if n[1] > 1 {
        let fft_y = if inverse {
            planner.plan_fft_inverse(n[1])
        } else {
            planner.plan_fft_forward(n[1])
        };
        let mut col = vec![Complex::new(0.0, 0.0); n[1]];
        for x in 0..n[0] {
            for y in 0..n[1] {
                col[y] = buf[y * n[0] + x];
            }
            fft_y.process(&mut col);
            for y in 0..n[1] {
                buf[y * n[0] + x] = col[y];
            }
        }
    }
}

/// One-shot smoothing without keeping the operator around.
pub fn smooth_realization(
    z: &NoiseRealization,
    kernel: MaternKernel,
    eval_grid: EvalGrid,
    opts: SmoothOpts,
) -> Result<FieldRealization, FieldError> {
    Smoother::new(kernel, z.grid.clone(), eval_grid, opts)?.apply(z)
}

/// Result of the pathwise domination comparison |P_k| ≤ |P|_{|k|}.
#[derive(Debug, Clone, Copy)]
pub struct DominationReport {
    pub ok: bool,
    pub worst_node: usize,
    pub max_excess: f64,
    /// Nodewise equality holds (positive kernel and all jumps positive).
    pub equality: bool,
}

/// Check nodewise |Σ S k(x−X)| ≤ Σ |S| k(x−X) on shared atoms.
pub fn domination_check(smoother: &Smoother, z: &NoiseRealization) -> DominationReport {
    let signed = smoother.jump_field(&z.atoms, false);
    let dominating = smoother.jump_field(&z.atoms, true);
    let mut worst_node = 0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut equal = true;
    for i in 0..signed.len() {
        let excess = signed[i].abs() - dominating[i];
        if excess > max_excess {
            max_excess = excess;
            worst_node = i;
        }
        if (signed[i].abs() - dominating[i]).abs() > 1e-12 * (1.0 + dominating[i].abs()) {
            equal = false;
        }
    }
    if signed.is_empty() {
        max_excess = 0.0;
    }
    DominationReport {
        ok: max_excess <= 1e-12,
        worst_node,
        max_excess,
        equality: equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridError;
    use crate::measure::{JumpMeasure, LevyTriplet, ShellConfig};
    use crate::noise::Atom;
    use approx::assert_relative_eq;

    fn setup_1d(pad: f64, n_cells: usize, n_eval: usize) -> (CellGrid, EvalGrid) {
        let noise_box = BoxDomain::interval(-pad, 1.0 + pad).unwrap();
        let grid = CellGrid::new(noise_box, [n_cells, 1]).unwrap();
        let d = BoxDomain::interval(0.0, 1.0).unwrap();
        let eval = EvalGrid::uniform(&d, [n_eval, 0]).unwrap();
        (grid, eval)
    }

    fn kernel_1d() -> MaternKernel {
        MaternKernel::new(1.0, 1.0, 1).unwrap()
    }

    #[test]
    fn null_triplet_gives_zero_field() {
        let (grid, eval) = setup_1d(25.0, 1024, 16);
        let trip = LevyTriplet::new(0.0, 0.0, JumpMeasure::Null).unwrap();
        let z = NoiseRealization::sample(&trip, &grid.domain, grid.n, 4, &ShellConfig::default())
            .unwrap();
        let fr = smooth_realization(&z, kernel_1d(), eval, SmoothOpts::default()).unwrap();
        assert!(fr.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_atom_field_is_kernel_translate() {
        let (grid, eval) = setup_1d(25.0, 2048, 32);
        let k = kernel_1d();
        let z = NoiseRealization {
            grid: grid.clone(),
            gaussian_cells: vec![0.0; grid.cell_count()],
            atoms: vec![Atom {
                position: [0.37, 0.0],
                size: 1.0,
            }],
            drift: 0.0,
            seed: 0,
        };
        let fr = smooth_realization(&z, k, eval.clone(), SmoothOpts::default()).unwrap();
        for (i, p) in eval.points.iter().enumerate() {
            let want = k.eval((p[0] - 0.37).abs());
            assert_relative_eq!(fr.value_at(i), want, max_relative = 1e-10);
        }
    }

    #[test]
    fn insufficient_padding_is_rejected() {
        let (grid, eval) = setup_1d(0.5, 64, 8);
        let k = kernel_1d();
        let err = Smoother::new(k, grid.clone(), eval.clone(), SmoothOpts::default());
        assert!(matches!(err, Err(FieldError::InsufficientPadding { .. })));
        // explicit opt-out for cut-off studies
        let opts = SmoothOpts {
            required_pad_tol_rel: None,
            ..SmoothOpts::default()
        };
        assert!(Smoother::new(k, grid, eval, opts).is_ok());
    }

    #[test]
    fn gaussian_part_matches_direct_convolution() {
        let (grid, eval) = setup_1d(25.0, 512, 16);
        let k = kernel_1d();
        let trip = LevyTriplet::gaussian(1.0);
        let z = NoiseRealization::sample(&trip, &grid.domain, grid.n, 11, &ShellConfig::default())
            .unwrap();
        let fr = smooth_realization(&z, k, eval.clone(), SmoothOpts::default()).unwrap();
        // direct O(n²) oracle at each node
        for (i, p) in eval.points.iter().enumerate() {
            let mut want = 0.0;
            for (j, w) in z.gaussian_cells.iter().enumerate() {
                let c = grid.center(j);
                want += w * k.eval((p[0] - c[0]).abs());
            }
            assert_relative_eq!(fr.gaussian[i], want, max_relative = 1e-6, epsilon = 1e-10);
        }
    }

    #[test]
    fn drift_part_is_kernel_mass() {
        let (grid, eval) = setup_1d(25.0, 512, 8);
        let k = kernel_1d();
        let trip = LevyTriplet::new(5.0, 0.0, JumpMeasure::Null).unwrap();
        let z = NoiseRealization::sample(&trip, &grid.domain, grid.n, 1, &ShellConfig::default())
            .unwrap();
        let fr = smooth_realization(&z, k, eval.clone(), SmoothOpts::default()).unwrap();
        // Λ effectively covers the kernel support: ∫k = m^{−2α} = 1
        for i in 0..eval.len() {
            assert_relative_eq!(fr.drift[i], 5.0 * k.total_integral(), max_relative = 1e-6);
        }
    }

    #[test]
    fn linearity_under_merge() {
        let (grid, eval) = setup_1d(25.0, 256, 12);
        let k = kernel_1d();
        let trip = LevyTriplet::new(
            0.5,
            1.0,
            JumpMeasure::Discrete {
                atoms: vec![(1.0, 2.0)],
            },
        )
        .unwrap();
        let sm = Smoother::new(k, grid.clone(), eval, SmoothOpts::default()).unwrap();
        let z1 = NoiseRealization::sample(&trip, &grid.domain, grid.n, 1, &ShellConfig::default())
            .unwrap();
        let z2 = NoiseRealization::sample(&trip, &grid.domain, grid.n, 2, &ShellConfig::default())
            .unwrap();
        let merged = z1.merge(&z2).unwrap();
        let f1 = sm.apply(&z1).unwrap();
        let f2 = sm.apply(&z2).unwrap();
        let fm = sm.apply(&merged).unwrap();
        for i in 0..fm.eval_grid.len() {
            assert_relative_eq!(
                fm.value_at(i),
                f1.value_at(i) + f2.value_at(i),
                max_relative = 1e-8,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn empirical_variance_matches_covariance_peak() {
        // Var(Z_k(x)) = σ²k_{2α,m}(0) = 0.25 for α=1, m=1, d=1
        let (grid, _) = setup_1d(25.0, 832, 4);
        let k = kernel_1d();
        let d = BoxDomain::interval(0.4, 0.6).unwrap();
        let eval = EvalGrid::uniform(&d, [2, 0]).unwrap();
        let sm = Smoother::new(k, grid.clone(), eval, SmoothOpts::default()).unwrap();
        let trip = LevyTriplet::gaussian(1.0);
        let n_samples = 4000;
        let mut sum2 = vec![0.0; 3];
        for seed in 0..n_samples {
            let z = NoiseRealization::sample(
                &trip,
                &grid.domain,
                grid.n,
                seed as u64,
                &ShellConfig::default(),
            )
            .unwrap();
            let fr = sm.apply(&z).unwrap();
            for i in 0..3 {
                sum2[i] += fr.value_at(i).powi(2);
            }
        }
        for i in 0..3 {
            let var = sum2[i] / n_samples as f64;
            // std err of variance ≈ var·√(2/n) ≈ 0.006
            assert!(
                (var - 0.25).abs() < 0.25 * 0.08,
                "node {i} variance {var} (want 0.25 ± 8%)"
            );
        }
    }

    #[test]
    fn transform_exp_of_zero_field_is_one() {
        let (grid, eval) = setup_1d(25.0, 128, 8);
        let trip = LevyTriplet::new(0.0, 0.0, JumpMeasure::Null).unwrap();
        let z = NoiseRealization::sample(&trip, &grid.domain, grid.n, 1, &ShellConfig::default())
            .unwrap();
        let fr = smooth_realization(&z, kernel_1d(), eval, SmoothOpts::default()).unwrap();
        let t = TransformSpec::new(TransformKind::Exp).unwrap();
        let a = transform_field(&fr, &t).unwrap();
        assert!(a.values.iter().all(|&v| v == 1.0));
        assert_eq!(a.min, 1.0);
        assert_eq!(a.max, 1.0);
    }

    #[test]
    fn smoothed_step_range_and_exp_monotonicity() {
        let (grid, eval) = setup_1d(25.0, 256, 16);
        let trip = LevyTriplet::new(
            0.0,
            1.0,
            JumpMeasure::Discrete {
                atoms: vec![(2.0, 1.0), (-1.0, 0.5)],
            },
        )
        .unwrap();
        let z = NoiseRealization::sample(&trip, &grid.domain, grid.n, 3, &ShellConfig::default())
            .unwrap();
        let fr = smooth_realization(&z, kernel_1d(), eval, SmoothOpts::default()).unwrap();
        let step = TransformSpec::new(TransformKind::SmoothedStep {
            low: 1.0,
            high: 10.0,
            width: 1.0,
        })
        .unwrap();
        let a = transform_field(&fr, &step).unwrap();
        assert!(a.values.iter().all(|&v| (1.0..=10.0).contains(&v)));
        // exp: min a = exp(min Z) by monotonicity
        let e = TransformSpec::new(TransformKind::Exp).unwrap();
        let ae = transform_field(&fr, &e).unwrap();
        let min_z = fr
            .values()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(ae.min, min_z.exp(), max_relative = 1e-12);
    }

    #[test]
    fn transform_bounds_certified_and_respected() {
        let specs = [
            TransformSpec::new(TransformKind::Exp).unwrap(),
            TransformSpec::new(TransformKind::SmoothedStep {
                low: 0.5,
                high: 4.0,
                width: 0.7,
            })
            .unwrap(),
            TransformSpec::new(TransformKind::TemperedExp {
                exponent: 0.5,
                scale: 1.0,
            })
            .unwrap(),
        ];
        for spec in &specs {
            let TransformBounds { b, rho, h } = spec.bounds;
            for &z in &[-30.0f64, -3.0, -0.5, 0.0, 0.5, 3.0, 30.0] {
                let env = b * (rho * z.abs().powf(h)).exp();
                let t = spec.eval(z);
                assert!(t <= env * (1.0 + 1e-12));
                assert!(t >= 1.0 / env * (1.0 - 1e-12));
                assert!(spec.deriv(z).abs() <= env * (1.0 + 1e-12));
            }
        }
        // tempered exp is C¹ at the origin: finite symmetric difference of T'
        let te = specs[2];
        let d_left = te.deriv(-1e-9);
        let d_right = te.deriv(1e-9);
        assert_relative_eq!(d_left, d_right, max_relative = 1e-4);
        assert_relative_eq!(te.eval(0.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bad_transform_parameters_rejected() {
        assert!(TransformSpec::new(TransformKind::SmoothedStep {
            low: -1.0,
            high: 2.0,
            width: 1.0
        })
        .is_err());
        assert!(TransformSpec::new(TransformKind::TemperedExp {
            exponent: 1.5,
            scale: 1.0
        })
        .is_err());
    }

    #[test]
    fn sup_abs_homogeneity_and_atom_bound() {
        let (grid, eval) = setup_1d(25.0, 256, 32);
        let k = kernel_1d();
        let z = NoiseRealization {
            grid: grid.clone(),
            gaussian_cells: vec![0.0; grid.cell_count()],
            atoms: vec![Atom {
                position: [0.5, 0.0],
                size: -2.0,
            }],
            drift: 0.0,
            seed: 0,
        };
        let fr = smooth_realization(&z, k, eval.clone(), SmoothOpts::default()).unwrap();
        let sup = fr.sup_abs(None);
        // pointwise bound: sup ≥ |S|·k at the node nearest the atom
        let r_min = eval
            .points
            .iter()
            .map(|p| (p[0] - 0.5f64).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(sup >= 2.0 * k.eval(r_min) - 1e-12);
        // homogeneity: scale the whole realization by c
        let mut z3 = z.clone();
        for a in z3.atoms.iter_mut() {
            a.size *= 3.0;
        }
        let fr3 = smooth_realization(&z3, k, eval, SmoothOpts::default()).unwrap();
        assert_relative_eq!(fr3.sup_abs(None), 3.0 * sup, max_relative = 1e-12);
        // zero field
        let z0 = NoiseRealization {
            atoms: vec![],
            ..z.clone()
        };
        let fr0 = smooth_realization(
            &z0,
            k,
            EvalGrid::uniform(&BoxDomain::interval(0.0, 1.0).unwrap(), [4, 0]).unwrap(),
            SmoothOpts::default(),
        )
        .unwrap();
        assert_eq!(fr0.sup_abs(None), 0.0);
    }

    #[test]
    fn domination_mixed_and_positive() {
        let (grid, eval) = setup_1d(25.0, 128, 16);
        let sm = Smoother::new(kernel_1d(), grid.clone(), eval, SmoothOpts::default()).unwrap();
        let mk = |sizes: &[f64]| NoiseRealization {
            grid: grid.clone(),
            gaussian_cells: vec![0.0; grid.cell_count()],
            atoms: sizes
                .iter()
                .enumerate()
                .map(|(i, &s)| Atom {
                    position: [0.2 + 0.15 * i as f64, 0.0],
                    size: s,
                })
                .collect(),
            drift: 0.0,
            seed: 0,
        };
        // all positive jumps → equality
        let rep = domination_check(&sm, &mk(&[1.0, 2.0, 0.5]));
        assert!(rep.ok);
        assert!(rep.equality);
        // mixed signs → strict inequality somewhere
        let rep2 = domination_check(&sm, &mk(&[1.0, -2.0, 0.5]));
        assert!(rep2.ok);
        assert!(!rep2.equality);
        // empty atoms: 0 ≤ 0
        let rep3 = domination_check(&sm, &mk(&[]));
        assert!(rep3.ok);
    }

    #[test]
    fn parts_sum_exactly() {
        let (grid, eval) = setup_1d(25.0, 256, 8);
        let trip = LevyTriplet::new(
            1.0,
            1.0,
            JumpMeasure::Discrete {
                atoms: vec![(2.0, 1.0)],
            },
        )
        .unwrap();
        let z = NoiseRealization::sample(&trip, &grid.domain, grid.n, 8, &ShellConfig::default())
            .unwrap();
        let fr = smooth_realization(&z, kernel_1d(), eval, SmoothOpts::default()).unwrap();
        let vals = fr.values();
        for i in 0..vals.len() {
            assert_eq!(vals[i], fr.drift[i] + fr.gaussian[i] + fr.jump[i]);
        }
    }

    #[test]
    fn holder_increment_proxy_bounded_under_refinement() {
        // max |Z_k(x_{i+1}) − Z_k(x_i)|/h^{0.49} stays bounded as h shrinks
        let k = kernel_1d();
        let trip = LevyTriplet::new(
            0.0,
            1.0,
            JumpMeasure::Discrete {
                atoms: vec![(1.0, 1.0)],
            },
        )
        .unwrap();
        let noise_box = BoxDomain::interval(-25.0, 26.0).unwrap();
        let mut ratios = Vec::new();
        for &n_eval in &[16usize, 32, 64] {
            let grid = CellGrid::new(noise_box, [croot(n_eval), 1]).unwrap();
            let d = BoxDomain::interval(0.0, 1.0).unwrap();
            let eval = EvalGrid::uniform(&d, [n_eval, 0]).unwrap();
            let z =
                NoiseRealization::sample(&trip, &noise_box, grid.n, 42, &ShellConfig::default())
                    .unwrap();
            let fr = smooth_realization(&z, k, eval, SmoothOpts::default()).unwrap();
            let h = 1.0 / n_eval as f64;
            let mut worst: f64 = 0.0;
            let vals = fr.values();
            for w in vals.windows(2) {
                worst = worst.max((w[1] - w[0]).abs() / h.powf(0.49));
            }
            ratios.push(worst);
        }
        // bounded: no blow-up by more than a small factor across refinements
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(
            max / min.max(1e-12) < 10.0,
            "increment ratios {ratios:?} blow up"
        );
    }

    fn croot(n_eval: usize) -> usize {
        // keep the noise lattice aligned with (and finer than) evaluation
        51 * n_eval
    }

    #[test]
    fn transform_envelope_on_realizations() {
        // B⁻¹e^{−ρ sup|Z|^h} ≤ min a ≤ max a ≤ Be^{ρ sup|Z|^h}
        let (grid, eval) = setup_1d(25.0, 256, 16);
        let trip = LevyTriplet::new(
            0.0,
            1.0,
            JumpMeasure::Discrete {
                atoms: vec![(1.5, 1.0), (-0.7, 1.0)],
            },
        )
        .unwrap();
        let specs = [
            TransformSpec::new(TransformKind::Exp).unwrap(),
            TransformSpec::new(TransformKind::TemperedExp {
                exponent: 0.5,
                scale: 1.0,
            })
            .unwrap(),
        ];
        for seed in 0..20u64 {
            let z =
                NoiseRealization::sample(&trip, &grid.domain, grid.n, seed, &ShellConfig::default())
                    .unwrap();
            let fr =
                smooth_realization(&z, kernel_1d(), eval.clone(), SmoothOpts::default()).unwrap();
            let sup = fr.sup_abs(None);
            for spec in &specs {
                let a = transform_field(&fr, spec).unwrap();
                let TransformBounds { b, rho, h } = spec.bounds;
                let env = b * (rho * sup.powf(h)).exp();
                assert!(a.max <= env * (1.0 + 1e-9));
                assert!(a.min >= 1.0 / env * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn grid_error_converts() {
        let r = BoxDomain::new(3, [0.0; 2], [1.0; 2]);
        assert!(matches!(r, Err(GridError::BadDimension(3))));
    }
}
