//! Matérn kernels k_{α,m}: the inverse Fourier transform of
//! (|ξ|² + m²)^{−α} in dimension d ∈ {1, 2}.
//!
//! Pointwise evaluation uses the Bessel closed form
//! k(r) = (r/m)^{α−d/2} K_{α−d/2}(rm) / (2^{α−1} Γ(α) (2π)^{d/2}),
//! with the exact Γ-limit at r = 0. Grid evaluation goes through a padded
//! discrete inverse transform with alias folding, which doubles as an
//! independent numerical route for consistency checks.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad::{self, QuadOpts};
use crate::special::{bessel_k, gamma};

#[derive(Debug, Error)]
pub enum MaternError {
    #[error("matern kernel requires 2α > d (got α = {alpha}, d = {dim})")]
    NotSquareIntegrable { alpha: f64, dim: usize },
    #[error("matern kernel requires m > 0, got {0}")]
    BadLengthScale(f64),
    #[error("dimension must be 1 or 2, got {0}")]
    BadDimension(usize),
    #[error("Hölder exponent must satisfy 0 < η ≤ 1 and η < 2α − d, got η = {0}")]
    BadHolderExponent(f64),
    #[error("tolerance must lie in (0, k(0)), got {0}")]
    BadTolerance(f64),
    #[error("spectral evaluation mismatch: max deviation {dev:.3e} exceeds tolerance {tol:.3e} (insufficient padding or folding)")]
    SpectralMismatch { dev: f64, tol: f64 },
    #[error(transparent)]
    Quadrature(#[from] quad::QuadError),
}

/// Matérn kernel parameters (smoothness α, inverse length scale m, dimension d).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaternKernel {
    pub alpha: f64,
    pub m: f64,
    pub dim: usize,
}

impl MaternKernel {
    pub fn new(alpha: f64, m: f64, dim: usize) -> Result<Self, MaternError> {
        if dim != 1 && dim != 2 {
            return Err(MaternError::BadDimension(dim));
        }
        if !(m > 0.0) {
            return Err(MaternError::BadLengthScale(m));
        }
        if !(2.0 * alpha > dim as f64) {
            return Err(MaternError::NotSquareIntegrable { alpha, dim });
        }
        Ok(Self { alpha, m, dim })
    }

    /// Bessel order ν = α − d/2.
    fn order(&self) -> f64 {
        self.alpha - self.dim as f64 / 2.0
    }

    /// Normalization 2^{α−1} Γ(α) (2π)^{d/2}.
    fn norm_const(&self) -> f64 {
        2.0f64.powf(self.alpha - 1.0) * gamma(self.alpha)
            * (2.0 * std::f64::consts::PI).powf(self.dim as f64 / 2.0)
    }

    /// Kernel value at radius r ≥ 0.
    pub fn eval(&self, r: f64) -> f64 {
        assert!(r >= 0.0, "radius must be nonnegative");
        let nu = self.order();
        if r == 0.0 {
            // limit from K_ν(z) ~ ½Γ(ν)(z/2)^{−ν}
            return gamma(nu)
                / (gamma(self.alpha)
                    * (4.0 * std::f64::consts::PI).powf(self.dim as f64 / 2.0)
                    * self.m.powf(2.0 * nu));
        }
        let z = r * self.m;
        // guard against underflow of K for very large arguments
        if z > 700.0 {
            return 0.0;
        }
        (r / self.m).powf(nu) * bessel_k(nu, z) / self.norm_const()
    }

    /// Spectral density (|ξ|² + m²)^{−α}.
    pub fn spectrum(&self, xi_sq: f64) -> f64 {
        (xi_sq + self.m * self.m).powf(-self.alpha)
    }

    /// ∫ k = k̂(0) = m^{−2α}.
    pub fn total_integral(&self) -> f64 {
        self.m.powf(-2.0 * self.alpha)
    }

    /// Matérn covariance σ²·k_{2α,m}(r) of a field smoothed with this kernel.
    pub fn covariance(&self, sigma2: f64, r: f64) -> f64 {
        let doubled = MaternKernel {
            alpha: 2.0 * self.alpha,
            m: self.m,
            dim: self.dim,
        };
        sigma2 * doubled.eval(r)
    }

    /// Smallest radius beyond which the (monotone) kernel stays ≤ tol.
    pub fn decay_radius(&self, tol: f64) -> Result<f64, MaternError> {
        let k0 = self.eval(0.0);
        if !(tol > 0.0) || tol > k0 {
            return Err(MaternError::BadTolerance(tol));
        }
        if tol == k0 {
            return Ok(0.0);
        }
        // bracket by doubling, then bisect on the strictly decreasing tail
        let mut hi = 1.0 / self.m;
        while self.eval(hi) > tol {
            hi *= 2.0;
            if hi > 1e9 {
                break;
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) > tol {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 * (1.0 + hi) {
                break;
            }
        }
        Ok(hi)
    }

    /// Hölder constant 2^{1−η}(2π)^{−d} ∫ |ξ|^η (|ξ|²+m²)^{−α} dξ
    /// for 0 < η < 2α − d, η ≤ 1.
    pub fn holder_constant(&self, eta: f64) -> Result<f64, MaternError> {
        let d = self.dim as f64;
        if !(eta > 0.0) || eta > 1.0 || eta >= 2.0 * self.alpha - d {
            return Err(MaternError::BadHolderExponent(eta));
        }
        let alpha = self.alpha;
        let m2 = self.m * self.m;
        let opts = QuadOpts {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 50,
        };
        // radial reduction: d=1 → 2∫₀^∞ ξ^η(ξ²+m²)^{−α} dξ,
        //                  d=2 → 2π∫₀^∞ ξ^{1+η}(ξ²+m²)^{−α} dξ
        let power = eta + (d - 1.0);
        let angular = if self.dim == 1 {
            2.0
        } else {
            2.0 * std::f64::consts::PI
        };
        let integral = quad::integrate_semi_inf(
            move |xi| xi.powf(power) * (xi * xi + m2).powf(-alpha),
            0.0,
            &opts,
        )?
        .value;
        let pref = 2.0f64.powf(1.0 - eta) / (2.0 * std::f64::consts::PI).powf(d);
        Ok(pref * angular * integral)
    }
}

/// Kernel values on a symmetric lattice {−J..J}ᵈ · h, computed from the
/// spectrum by a padded, alias-folded discrete inverse transform.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    pub dim: usize,
    pub spacing: f64,
    pub half_n: usize,
    /// Row-major values; index offset (i + J) [+ (j + J)·(2J+1) in d=2].
    pub values: Vec<f64>,
}

impl SpectralGrid {
    pub fn node_count_per_axis(&self) -> usize {
        2 * self.half_n + 1
    }

    pub fn value_at(&self, i: i64, j: i64) -> f64 {
        let n = self.node_count_per_axis() as i64;
        let ii = i + self.half_n as i64;
        let jj = j + self.half_n as i64;
        assert!(ii >= 0 && ii < n && (self.dim == 1 || (jj >= 0 && jj < n)));
        if self.dim == 1 {
            self.values[ii as usize]
        } else {
            self.values[(jj * n + ii) as usize]
        }
    }
}

/// Options for [`eval_grid_spectral`].
#[derive(Debug, Clone, Copy)]
pub struct SpectralOpts {
    /// Absolute padding target (relative to k(0)) for the periodization.
    pub pad_tol_rel: f64,
    /// Relative tolerance of the folded spectrum tail.
    pub fold_tol_rel: f64,
    /// Consistency tolerance vs pointwise evaluation: the check accepts
    /// |spectral − eval| ≤ tol_rel·|eval| + tol_abs_rel·k(0).
    pub check_tol_rel: f64,
    pub check_tol_abs_rel: f64,
}

impl Default for SpectralOpts {
    fn default() -> Self {
        Self {
            pad_tol_rel: 1e-10,
            fold_tol_rel: 1e-10,
            check_tol_rel: 1e-6,
            check_tol_abs_rel: 1e-9,
        }
    }
}

/// Evaluate the kernel on a symmetric lattice of spacing `h` with `half_n`
/// nodes per side via the padded spectral route, and cross-check against
/// the Bessel form at every node.
pub fn eval_grid_spectral(
    kernel: &MaternKernel,
    h: f64,
    half_n: usize,
    opts: &SpectralOpts,
) -> Result<SpectralGrid, MaternError> {
    assert!(h > 0.0 && half_n > 0);
    let k0 = kernel.eval(0.0);
    let extent = half_n as f64 * h;
    let pad = kernel.decay_radius(opts.pad_tol_rel * k0)? + 1.0 / kernel.m;
    let min_period = 2.0 * (extent + pad);
    let mut n_fft = ((min_period / h).ceil() as usize + 1).next_power_of_two();
    if n_fft < 2 * half_n + 2 {
        n_fft = (2 * half_n + 2).next_power_of_two();
    }
    let period = n_fft as f64 * h;
    let dxi = 2.0 * std::f64::consts::PI / period;
    let values = match kernel.dim {
        1 => spectral_1d(kernel, n_fft, dxi, period, half_n, opts),
        _ => spectral_2d(kernel, n_fft, dxi, period, half_n, opts),
    };
    let grid = SpectralGrid {
        dim: kernel.dim,
        spacing: h,
        half_n,
        values,
    };
    // consistency gate against the pointwise route
    let mut dev = 0.0f64;
    let range = -(half_n as i64)..=(half_n as i64);
    for j in if kernel.dim == 2 { range.clone() } else { 0..=0 } {
        for i in range.clone() {
            let r = ((i as f64 * h).powi(2) + (j as f64 * h).powi(2)).sqrt();
            let want = kernel.eval(r);
            let got = grid.value_at(i, j);
            let tol = opts.check_tol_rel * want.abs() + opts.check_tol_abs_rel * k0;
            let excess = (got - want).abs() - tol;
            dev = dev.max(excess);
        }
    }
    if dev > 0.0 {
        return Err(MaternError::SpectralMismatch {
            dev,
            tol: opts.check_tol_rel,
        });
    }
    Ok(grid)
}

/// Alias-folded spectrum sample: Σ_{|j|≤Q} ĝ(ξ + jL) plus an integral tail
/// correction, L = 2π/h the spectral period.
fn folded_spectrum_1d(kernel: &MaternKernel, xi: f64, spectral_period: f64, q: usize) -> f64 {
    let mut acc = 0.0;
    for j in -(q as i64)..=(q as i64) {
        let x = xi + j as f64 * spectral_period;
        acc += kernel.spectrum(x * x);
    }
    // midpoint-rule tail: Σ_{|j|>Q} ĝ(ξ+jL) ≈ (1/L)∫_{|u|>ξ+ (Q+1/2)L} ĝ
    let alpha = kernel.alpha;
    let cut_hi = xi + (q as f64 + 0.5) * spectral_period;
    let cut_lo = -xi + (q as f64 + 0.5) * spectral_period;
    // ∫_c^∞ u^{−2α} du = c^{1−2α}/(2α−1), using ĝ(u) ≤ u^{−2α} out there
    let tail = |c: f64| c.powf(1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0);
    acc + (tail(cut_hi) + tail(cut_lo)) / spectral_period
}

fn spectral_1d(
    kernel: &MaternKernel,
    n_fft: usize,
    dxi: f64,
    period: f64,
    half_n: usize,
    opts: &SpectralOpts,
) -> Vec<f64> {
    let spectral_period = n_fft as f64 * dxi; // = 2π/h
    // choose Q so the folded-tail midpoint error is below fold_tol·k(0)
    let k0 = kernel.eval(0.0);
    let alpha = kernel.alpha;
    let target = opts.fold_tol_rel * k0;
    let mut q = 1usize;
    while q < 100_000 {
        // midpoint correction error ~ L·|ĝ'(QL)|/24 per side
        let c = (q as f64 - 0.5) * spectral_period;
        let err = spectral_period * 2.0 * alpha * c.powf(-2.0 * alpha - 1.0) / 12.0;
        if err < target {
            break;
        }
        q *= 2;
    }
    let mut buf: Vec<Complex<f64>> = (0..n_fft)
        .map(|idx| {
            let q_idx = if idx <= n_fft / 2 {
                idx as f64
            } else {
                idx as f64 - n_fft as f64
            };
            let xi = q_idx * dxi;
            Complex::new(folded_spectrum_1d(kernel, xi, spectral_period, q) / period, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n_fft).process(&mut buf);
    // node x = i·h ↔ FFT index i mod n_fft
    let mut out = Vec::with_capacity(2 * half_n + 1);
    for i in -(half_n as i64)..=(half_n as i64) {
        let idx = i.rem_euclid(n_fft as i64) as usize;
        out.push(buf[idx].re);
    }
    out
}

fn spectral_2d(
    kernel: &MaternKernel,
    n_fft: usize,
    dxi: f64,
    period: f64,
    half_n: usize,
    opts: &SpectralOpts,
) -> Vec<f64> {
    let spectral_period = n_fft as f64 * dxi;
    let k0 = kernel.eval(0.0);
    let alpha = kernel.alpha;
    let target = opts.fold_tol_rel * k0;
    // 2-d folding: explicit tiles |j|∞ ≤ Q plus radial integral tail
    let mut q = 1usize;
    while q < 4096 {
        let r = (q as f64 - 0.5) * spectral_period;
        // cell-midpoint error estimate ~ L²/24 · ∫_{|ξ|>R} |Δĝ| ~ L²·C·R^{−2α}
        let err = spectral_period.powi(2) * alpha * (2.0 * alpha + 2.0)
            * r.powf(-2.0 * alpha)
            / 24.0;
        if err < target {
            break;
        }
        q += 1;
    }
    let tail_integral = |r: f64| {
        // ∫_{|ξ|>r} |ξ|^{−2α} dξ = 2π r^{2−2α}/(2α−2)
        2.0 * std::f64::consts::PI * r.powf(2.0 - 2.0 * alpha) / (2.0 * alpha - 2.0)
    };
    let freq = |idx: usize| {
        let q_idx = if idx <= n_fft / 2 {
            idx as f64
        } else {
            idx as f64 - n_fft as f64
        };
        q_idx * dxi
    };
    let area = period * period;
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); n_fft * n_fft];
    for iy in 0..n_fft {
        let xi_y = freq(iy);
        for ix in 0..n_fft {
            let xi_x = freq(ix);
            let mut acc = 0.0;
            for jy in -(q as i64)..=(q as i64) {
                let y = xi_y + jy as f64 * spectral_period;
                for jx in -(q as i64)..=(q as i64) {
                    let x = xi_x + jx as f64 * spectral_period;
                    acc += kernel.spectrum(x * x + y * y);
                }
            }
            let r_out = (q as f64 + 0.5) * spectral_period - xi_x.abs().max(xi_y.abs());
            acc += tail_integral(r_out.max(spectral_period)) / (spectral_period * spectral_period);
            buf[iy * n_fft + ix] = Complex::new(acc / area, 0.0);
        }
    }
    // 2-d inverse FFT: rows then columns
    let fft = FftPlanner::new().plan_fft_inverse(n_fft);
    for row in buf.chunks_mut(n_fft) {
        fft.process(row);
    }
    let mut col = vec![Complex::new(0.0, 0.0); n_fft];
    for ix in 0..n_fft {
        for iy in 0..n_fft {
            col[iy] = buf[iy * n_fft + ix];
        }
        fft.process(&mut col);
        for iy in 0..n_fft {
            buf[iy * n_fft + ix] = col[iy];
        }
    }
    let n_out = 2 * half_n + 1;
    let mut out = vec![0.0; n_out * n_out];
    for j in -(half_n as i64)..=(half_n as i64) {
        let jj = j.rem_euclid(n_fft as i64) as usize;
        for i in -(half_n as i64)..=(half_n as i64) {
            let ii = i.rem_euclid(n_fft as i64) as usize;
            out[((j + half_n as i64) * n_out as i64 + (i + half_n as i64)) as usize] =
                buf[jj * n_fft + ii].re;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::special::ln_gamma;

    #[test]
    fn closed_form_exponential_kernel() {
        // d=1, α=1, m=1: k(x) = e^{−|x|}/2 via K_{1/2}
        let k = MaternKernel::new(1.0, 1.0, 1).unwrap();
        assert_relative_eq!(k.eval(0.0), 0.5, max_relative = 1e-12);
        assert_relative_eq!(k.eval(1.0), (-1.0f64).exp() / 2.0, max_relative = 1e-12);
        assert_relative_eq!(k.eval(1.0), 0.18393972058572117, max_relative = 1e-10);
    }

    #[test]
    fn closed_form_alpha_two() {
        // d=1, α=2, m=1: k(x) = (1+|x|)e^{−|x|}/4
        let k = MaternKernel::new(2.0, 1.0, 1).unwrap();
        assert_relative_eq!(k.eval(0.0), 0.25, max_relative = 1e-12);
        for &r in &[0.3, 1.0, 2.5] {
            assert_relative_eq!(
                k.eval(r),
                (1.0 + r) * (-r as f64).exp() / 4.0,
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn zero_limit_matches_quadrature_of_inverse_transform() {
        // oracle: k(0) = (2π)^{−d} ∫ (|ξ|²+m²)^{−α} dξ
        let opts = QuadOpts {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 50,
        };
        for (alpha, m, dim) in [(1.0, 1.0, 1), (2.0, 1.0, 1), (1.5, 0.7, 1), (2.0, 1.0, 2)] {
            let k = MaternKernel::new(alpha, m, dim).unwrap();
            let oracle = if dim == 1 {
                quad::integrate_real_line(|xi| k.spectrum(xi * xi), &opts)
                    .unwrap()
                    .value
                    / (2.0 * std::f64::consts::PI)
            } else {
                2.0 * std::f64::consts::PI
                    * quad::integrate_semi_inf(|r| r * k.spectrum(r * r), 0.0, &opts)
                        .unwrap()
                        .value
                    / (2.0 * std::f64::consts::PI).powi(2)
            };
            assert_relative_eq!(k.eval(0.0), oracle, max_relative = 1e-8);
        }
    }

    #[test]
    fn positivity_and_monotone_decay() {
        for (alpha, dim) in [(1.0, 1), (2.0, 1), (1.5, 2), (2.0, 2)] {
            let k = MaternKernel::new(alpha, 1.3, dim).unwrap();
            let mut last = k.eval(0.0);
            assert!(last > 0.0);
            for i in 1..60 {
                let v = k.eval(i as f64 * 0.2);
                assert!(v > 0.0 || i as f64 * 0.2 > 500.0);
                assert!(v <= last * (1.0 + 1e-12), "not decreasing at {i}");
                last = v;
            }
        }
    }

    #[test]
    fn covariance_scaling_and_peak() {
        let k = MaternKernel::new(1.0, 1.0, 1).unwrap();
        // σ²·k_{2,1}(0) = σ²/4
        assert_relative_eq!(k.covariance(1.0, 0.0), 0.25, max_relative = 1e-12);
        assert_relative_eq!(k.covariance(4.0, 0.0), 1.0, max_relative = 1e-12);
        // decay beyond the correlation length
        let mut last = k.covariance(1.0, 1.0);
        for i in 2..20 {
            let v = k.covariance(1.0, i as f64);
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn decay_radius_closed_form() {
        let k = MaternKernel::new(1.0, 1.0, 1).unwrap();
        // e^{−r}/2 = e^{−5}/2 at r = 5
        let r = k.decay_radius((-5.0f64).exp() / 2.0).unwrap();
        assert_relative_eq!(r, 5.0, epsilon = 1e-6);
        assert_relative_eq!(k.decay_radius(k.eval(0.0)).unwrap(), 0.0);
        // radius grows as the tolerance shrinks
        let r2 = k.decay_radius(1e-8).unwrap();
        assert!(r2 > r);
        assert!(matches!(
            k.decay_radius(0.6),
            Err(MaternError::BadTolerance(_))
        ));
    }

    #[test]
    fn holder_constant_requirements_and_oracle() {
        let k = MaternKernel::new(1.0, 1.0, 1).unwrap();
        assert!(matches!(
            k.holder_constant(1.0),
            Err(MaternError::BadHolderExponent(_))
        ));
        let c = k.holder_constant(0.5).unwrap();
        assert!(c.is_finite() && c > 0.0);
        // closed-form oracle: ∫₀^∞ ξ^η(ξ²+m²)^{−α}dξ = m^{η+1−2α}B((η+1)/2, α−(η+1)/2)/2
        let (eta, alpha, m): (f64, f64, f64) = (0.5, 1.0, 1.0);
        let beta_fn = |a: f64, b: f64| (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp();
        let oracle = 2.0f64.powf(1.0 - eta) / (2.0 * std::f64::consts::PI)
            * 2.0
            * m.powf(eta + 1.0 - 2.0 * alpha)
            * beta_fn((eta + 1.0) / 2.0, alpha - (eta + 1.0) / 2.0)
            / 2.0;
        assert_relative_eq!(c, oracle, max_relative = 1e-7);
        // empirical Hölder quotient stays below the constant
        let mut rng = crate::rng::CounterRng::new(11, crate::rng::StreamKind::Scratch, 0, 0);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let x = 6.0 * rng.uniform() - 3.0;
            let y = 6.0 * rng.uniform() - 3.0;
            if (x - y).abs() < 1e-12 {
                continue;
            }
            let q = (k.eval(x.abs()) - k.eval(y.abs())).abs() / (x - y).abs().powf(eta);
            worst = worst.max(q);
        }
        assert!(
            worst <= c,
            "empirical Hölder quotient {worst} exceeds constant {c}"
        );
        // doubling m shrinks the constant (integrand dominated)
        let k2 = MaternKernel::new(1.0, 2.0, 1).unwrap();
        assert!(k2.holder_constant(0.5).unwrap() < c);
    }

    #[test]
    fn spectral_grid_matches_bessel_route_1d() {
        for (alpha, m) in [(1.0, 1.0), (2.0, 1.0), (1.5, 0.8)] {
            let k = MaternKernel::new(alpha, m, 1).unwrap();
            let g = eval_grid_spectral(&k, 0.05, 40, &SpectralOpts::default()).unwrap();
            // symmetric, decreasing along the axis, and matching eval
            for i in 0..=40i64 {
                assert_relative_eq!(g.value_at(i, 0), g.value_at(-i, 0), max_relative = 1e-10);
                let want = k.eval(i as f64 * 0.05);
                assert_relative_eq!(g.value_at(i, 0), want, max_relative = 2e-6, epsilon = 1e-9);
            }
            for i in 1..=40i64 {
                assert!(g.value_at(i, 0) <= g.value_at(i - 1, 0) * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn spectral_grid_node_at_unit_radius() {
        let k = MaternKernel::new(1.0, 1.0, 1).unwrap();
        let g = eval_grid_spectral(&k, 0.1, 30, &SpectralOpts::default()).unwrap();
        assert_relative_eq!(g.value_at(10, 0), 0.18393972058572117, max_relative = 1e-6);
    }

    #[test]
    fn spectral_grid_matches_bessel_route_2d() {
        let k = MaternKernel::new(2.0, 1.0, 2).unwrap();
        let g = eval_grid_spectral(&k, 0.1, 12, &SpectralOpts::default()).unwrap();
        for j in -12..=12i64 {
            for i in -12..=12i64 {
                let r = ((i * i + j * j) as f64).sqrt() * 0.1;
                let want = k.eval(r);
                assert_relative_eq!(
                    g.value_at(i, j),
                    want,
                    max_relative = 2e-6,
                    epsilon = 1e-8
                );
            }
        }
    }

    #[test]
    fn covariance_equals_autocorrelation_of_kernel() {
        // σ²(k ⋆ k)(r) = σ²k_{2α,m}(r): discrete autocorrelation of the
        // spectral grid vs the doubled-α kernel
        let k = MaternKernel::new(1.0, 1.0, 1).unwrap();
        let h = 0.02;
        let half = 600usize;
        let g = eval_grid_spectral(&k, h, half, &SpectralOpts::default()).unwrap();
        let n = g.node_count_per_axis() as i64;
        let lag = (1.0 / h) as i64;
        let mut acf = 0.0;
        for i in 0..n - lag {
            let a = g.values[i as usize];
            let b = g.values[(i + lag) as usize];
            acf += a * b * h;
        }
        let want = k.covariance(1.0, 1.0);
        assert_relative_eq!(acf, want, max_relative = 2e-3);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(matches!(
            MaternKernel::new(0.5, 1.0, 1),
            Err(MaternError::NotSquareIntegrable { .. })
        ));
        assert!(matches!(
            MaternKernel::new(1.0, 0.0, 1),
            Err(MaternError::BadLengthScale(_))
        ));
        assert!(matches!(
            MaternKernel::new(2.0, 1.0, 3),
            Err(MaternError::BadDimension(3))
        ));
    }
}
