//! Jump measures, Lévy triplets, and finite-shell decompositions.
//!
//! Supported jump measures: finite discrete measures, one-sided gamma
//! measures with density `v·e^{−ws}/s` on `s > 0`, their symmetric
//! (bi-gamma) counterparts with density `v·e^{−w|s|}/|s|`, and the null
//! measure. All of them integrate `|s|` near the origin, so the small-jump
//! compensator can be folded into the drift and samplers never simulate
//! compensated jumps.
//!
//! Moments and exponential integrals use closed forms where elementary ones
//! exist; the Lévy characteristic and the shell masses of infinite-activity
//! measures go through adaptive Gauss–Kronrod quadrature. Unit tests verify
//! each closed form against an independent quadrature oracle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad::{self, QuadError, QuadOpts};
use crate::rng::CounterRng;

/// Quadrature defaults used throughout the module.
pub(crate) fn measure_quad_opts() -> QuadOpts {
    QuadOpts {
        abs_tol: 1e-10,
        rel_tol: 1e-8,
        max_depth: 50,
    }
}

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("invalid jump measure: {0}")]
    Invalid(String),
    #[error("moment order must satisfy n >= 1, got {0}")]
    BadMomentOrder(i32),
    #[error("divergent integral for {0}")]
    Divergent(String),
    #[error("beta = {beta} outside convergence range (requires 0 < beta < {limit})")]
    BetaOutOfRange { beta: f64, limit: f64 },
    #[error("shell tolerance {requested:.3e} unachievable within {cap} shells (achieved residual {achieved:.3e})")]
    ShellTolerance {
        requested: f64,
        achieved: f64,
        cap: usize,
    },
    #[error("sigma2 must be nonnegative, got {0}")]
    NegativeVariance(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// A Lévy jump measure ν on ℝ∖{0}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpMeasure {
    Null,
    /// Finite discrete measure Σ wᵢ δ_{sᵢ}.
    Discrete { atoms: Vec<(f64, f64)> },
    /// ν(ds) = v·e^{−ws}/s ds on s > 0.
    Gamma { intensity: f64, decay: f64 },
    /// ν(ds) = v·e^{−w|s|}/|s| ds on ℝ∖{0}.
    Bigamma { intensity: f64, decay: f64 },
}

impl JumpMeasure {
    pub fn validate(&self) -> Result<(), MeasureError> {
        match self {
            JumpMeasure::Null => Ok(()),
            JumpMeasure::Discrete { atoms } => {
                for &(s, w) in atoms {
                    if s == 0.0 || !s.is_finite() {
                        return Err(MeasureError::Invalid(format!(
                            "discrete atom location must be finite and nonzero, got {s}"
                        )));
                    }
                    if !(w > 0.0) || !w.is_finite() {
                        return Err(MeasureError::Invalid(format!(
                            "discrete atom mass must be positive, got {w}"
                        )));
                    }
                }
                Ok(())
            }
            JumpMeasure::Gamma { intensity, decay }
            | JumpMeasure::Bigamma { intensity, decay } => {
                if !(*intensity > 0.0) || !(*decay > 0.0) {
                    return Err(MeasureError::Invalid(format!(
                        "gamma parameters must be positive, got v = {intensity}, w = {decay}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, JumpMeasure::Null)
            || matches!(self, JumpMeasure::Discrete { atoms } if atoms.is_empty())
    }

    /// Total mass ν(ℝ∖{0}); `None` when infinite.
    pub fn total_mass(&self) -> Option<f64> {
        match self {
            JumpMeasure::Null => Some(0.0),
            JumpMeasure::Discrete { atoms } => Some(atoms.iter().map(|a| a.1).sum()),
            _ => None,
        }
    }

    /// Upper limit of the admissible β range for exponential integrals
    /// (∞ for measures of bounded support).
    pub fn beta_limit(&self) -> f64 {
        match self {
            JumpMeasure::Gamma { decay, .. } | JumpMeasure::Bigamma { decay, .. } => *decay,
            _ => f64::INFINITY,
        }
    }

    /// Image measure of ν under s ↦ |s|, supported on (0, ∞).
    pub fn abs_measure(&self) -> JumpMeasure {
        match self {
            JumpMeasure::Null => JumpMeasure::Null,
            JumpMeasure::Discrete { atoms } => JumpMeasure::Discrete {
                atoms: atoms.iter().map(|&(s, w)| (s.abs(), w)).collect(),
            },
            JumpMeasure::Gamma { intensity, decay } => JumpMeasure::Gamma {
                intensity: *intensity,
                decay: *decay,
            },
            JumpMeasure::Bigamma { intensity, decay } => JumpMeasure::Gamma {
                intensity: 2.0 * intensity,
                decay: *decay,
            },
        }
    }

    /// Small-jump compensator ∫_{0<|s|≤1} s ν(ds).
    pub fn compensator(&self) -> f64 {
        match self {
            JumpMeasure::Null => 0.0,
            JumpMeasure::Discrete { atoms } => atoms
                .iter()
                .filter(|(s, _)| s.abs() <= 1.0)
                .map(|(s, w)| s * w)
                .sum(),
            JumpMeasure::Gamma { intensity, decay } => {
                // ∫₀¹ s · v e^{−ws}/s ds = v (1 − e^{−w}) / w
                intensity * (1.0 - (-decay).exp()) / decay
            }
            JumpMeasure::Bigamma { .. } => 0.0,
        }
    }

    /// ∫_{0<s≤1} s ν₊(ds) for the image measure ν₊ on ℝ₊.
    pub fn abs_small_mean(&self) -> f64 {
        match self.abs_measure() {
            JumpMeasure::Gamma { intensity, decay } => {
                intensity * (1.0 - (-decay).exp()) / decay
            }
            JumpMeasure::Discrete { atoms } => atoms
                .iter()
                .filter(|(s, _)| *s <= 1.0)
                .map(|(s, w)| s * w)
                .sum(),
            _ => 0.0,
        }
    }

    /// ∫_{s>1} e^{βs} ν₊(ds); diverges unless β < decay for gamma kinds.
    pub fn abs_tail_exp(&self, beta: f64) -> Result<f64, MeasureError> {
        let limit = self.beta_limit();
        if !(beta > 0.0) || beta >= limit {
            return Err(MeasureError::BetaOutOfRange { beta, limit });
        }
        match self.abs_measure() {
            JumpMeasure::Null => Ok(0.0),
            JumpMeasure::Discrete { atoms } => Ok(atoms
                .iter()
                .filter(|(s, _)| *s > 1.0)
                .map(|(s, w)| w * (beta * s).exp())
                .sum()),
            JumpMeasure::Gamma { intensity, decay } => {
                let opts = measure_quad_opts();
                let r = quad::integrate_semi_inf(
                    move |s| (-(decay - beta) * s).exp() / s,
                    1.0,
                    &opts,
                )?;
                Ok(intensity * r.value)
            }
            JumpMeasure::Bigamma { .. } => unreachable!("abs_measure never returns bigamma"),
        }
    }

    /// Quadrature self-test of the Lévy integrability conditions; returns
    /// (∫ min{1, s²} ν(ds), ∫ |s| ν(ds)).
    pub fn integrability_check(&self) -> Result<(f64, f64), MeasureError> {
        match self {
            JumpMeasure::Null => Ok((0.0, 0.0)),
            JumpMeasure::Discrete { atoms } => {
                let a = atoms.iter().map(|(s, w)| w * s.powi(2).min(1.0)).sum();
                let b = atoms.iter().map(|(s, w)| w * s.abs()).sum();
                Ok((a, b))
            }
            JumpMeasure::Gamma { intensity, decay }
            | JumpMeasure::Bigamma { intensity, decay } => {
                let sides = if matches!(self, JumpMeasure::Bigamma { .. }) {
                    2.0
                } else {
                    1.0
                };
                let (v, w) = (*intensity, *decay);
                let opts = measure_quad_opts();
                let small =
                    quad::integrate(move |s| s * (-w * s).exp(), 0.0, 1.0, &opts)?.value;
                let large =
                    quad::integrate_semi_inf(move |s| (-w * s).exp() / s, 1.0, &opts)?.value;
                let abs_small =
                    quad::integrate(move |s| (-w * s).exp(), 0.0, 1.0, &opts)?.value;
                let abs_large =
                    quad::integrate_semi_inf(move |s| (-w * s).exp(), 1.0, &opts)?.value / 1.0;
                let min_one_s2 = sides * v * (small + large);
                let abs_s = sides * v * (abs_small + abs_large);
                Ok((min_one_s2, abs_s))
            }
        }
    }
}

/// Characteristic triplet (b, σ², ν).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    pub drift: f64,
    pub sigma2: f64,
    pub jumps: JumpMeasure,
}

impl LevyTriplet {
    pub fn new(drift: f64, sigma2: f64, jumps: JumpMeasure) -> Result<Self, MeasureError> {
        if !(sigma2 >= 0.0) {
            return Err(MeasureError::NegativeVariance(sigma2));
        }
        jumps.validate()?;
        Ok(Self {
            drift,
            sigma2,
            jumps,
        })
    }

    pub fn gaussian(sigma2: f64) -> Self {
        Self::new(0.0, sigma2, JumpMeasure::Null).expect("valid")
    }

    /// Compound Poisson triplet with the drift convention b = ∫_{0<|s|≤1} s ν(ds),
    /// under which the sampled atoms carry no compensator correction at all.
    pub fn compound_poisson(jumps: JumpMeasure) -> Result<Self, MeasureError> {
        let b = jumps.compensator();
        Self::new(b, 0.0, jumps)
    }

    /// Drift seen by samplers: the compensator of small jumps is absorbed,
    /// so atoms are simulated uncompensated.
    pub fn effective_drift(&self) -> f64 {
        self.drift - self.jumps.compensator()
    }
}

/// Lévy characteristic ψ(t) = ibt − σ²t²/2 + ∫ (e^{its} − 1 − its·1_{|s|≤1}) ν(ds).
///
/// Exact for null and discrete measures; adaptive quadrature otherwise.
pub fn levy_characteristic(triplet: &LevyTriplet, t: f64) -> Result<Complex64, MeasureError> {
    assert!(t.is_finite(), "t must be finite");
    let gauss = Complex64::new(-0.5 * triplet.sigma2 * t * t, triplet.drift * t);
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let jump = match &triplet.jumps {
        JumpMeasure::Null => Complex64::new(0.0, 0.0),
        JumpMeasure::Discrete { atoms } => {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(s, w) in atoms {
                let x = t * s;
                let mut term = Complex64::new(cos_m1(x), x.sin());
                if s.abs() <= 1.0 {
                    term.im -= x;
                }
                acc += w * term;
            }
            acc
        }
        JumpMeasure::Gamma { intensity, decay } => {
            let (v, w) = (*intensity, *decay);
            let opts = measure_quad_opts();
            // compensated part on (0, 1]
            let inner = quad::integrate_complex(
                move |s| {
                    let x = t * s;
                    Complex64::new(cos_m1(x), sin_m_x(x)) * ((-w * s).exp() / s)
                },
                0.0,
                1.0,
                &opts,
            )?;
            // uncompensated tail on (1, ∞)
            let outer = quad::integrate_complex_semi_inf(
                move |s| {
                    let x = t * s;
                    Complex64::new(cos_m1(x), x.sin()) * ((-w * s).exp() / s)
                },
                1.0,
                &opts,
            )?;
            v * (inner + outer)
        }
        JumpMeasure::Bigamma { intensity, decay } => {
            // symmetric measure: imaginary parts cancel pairwise, leaving
            // 2∫₀^∞ (cos(ts) − 1) v e^{−ws}/s ds
            let (v, w) = (*intensity, *decay);
            let opts = measure_quad_opts();
            let inner = quad::integrate(
                move |s| cos_m1(t * s) * ((-w * s).exp() / s),
                0.0,
                1.0,
                &opts,
            )?;
            let outer = quad::integrate_semi_inf(
                move |s| cos_m1(t * s) * ((-w * s).exp() / s),
                1.0,
                &opts,
            )?;
            Complex64::new(2.0 * v * (inner.value + outer.value), 0.0)
        }
    };
    Ok(gauss + jump)
}

/// cos(x) − 1 without cancellation.
#[inline]
fn cos_m1(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    -2.0 * s * s
}

/// sin(x) − x, series for small |x|.
#[inline]
fn sin_m_x(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x * x2 * (-1.0 / 6.0 + x2 * (1.0 / 120.0 - x2 / 5040.0))
    } else {
        x.sin() - x
    }
}

/// Jump-measure moments: b₁ = ∫_{|s|>1} s ν(ds) for n = 1 and
/// bₙ = ∫ sⁿ ν(ds) for n ≥ 2.
pub fn jump_moment(nu: &JumpMeasure, n: i32) -> Result<f64, MeasureError> {
    if n < 1 {
        return Err(MeasureError::BadMomentOrder(n));
    }
    Ok(match nu {
        JumpMeasure::Null => 0.0,
        JumpMeasure::Discrete { atoms } => {
            if n == 1 {
                atoms
                    .iter()
                    .filter(|(s, _)| s.abs() > 1.0)
                    .map(|(s, w)| s * w)
                    .sum()
            } else {
                atoms.iter().map(|(s, w)| w * s.powi(n)).sum()
            }
        }
        JumpMeasure::Gamma { intensity, decay } => {
            if n == 1 {
                // ∫₁^∞ s · v e^{−ws}/s ds = v e^{−w}/w
                intensity * (-decay).exp() / decay
            } else {
                // ∫₀^∞ s^{n−1} v e^{−ws} ds = v Γ(n)/wⁿ
                intensity * crate::special::gamma(n as f64) / decay.powi(n)
            }
        }
        JumpMeasure::Bigamma { intensity, decay } => {
            if n % 2 == 1 {
                0.0
            } else {
                2.0 * intensity * crate::special::gamma(n as f64) / decay.powi(n)
            }
        }
    })
}

/// ∫ (e^{βs} − 1) ν₊(ds) over the image measure ν₊ on ℝ₊.
pub fn exp_integral(nu: &JumpMeasure, beta: f64) -> Result<f64, MeasureError> {
    let limit = nu.beta_limit();
    if !(beta > 0.0) || beta >= limit {
        return Err(MeasureError::BetaOutOfRange { beta, limit });
    }
    Ok(match nu.abs_measure() {
        JumpMeasure::Null => 0.0,
        JumpMeasure::Discrete { atoms } => atoms
            .iter()
            .map(|(s, w)| w * ((beta * s).exp() - 1.0))
            .sum(),
        JumpMeasure::Gamma { intensity, decay } => {
            // Frullani: ∫₀^∞ (e^{βs} − 1) e^{−ws}/s ds = ln(w/(w−β))
            intensity * (decay / (decay - beta)).ln()
        }
        JumpMeasure::Bigamma { .. } => unreachable!(),
    })
}

// ---------------------------------------------------------------------------
// Shell decomposition
// ---------------------------------------------------------------------------

/// Configuration for [`shell_partition`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShellConfig {
    /// Bound on the discarded-jump drift error ∫_{0<|s|≤ε} |s| ν(ds).
    pub drift_tolerance: f64,
    /// Hard cap on the shell count.
    pub max_shells: usize,
    /// Knots per inverse-CDF sampling table.
    pub table_knots: usize,
    /// Add the mean of discarded sub-threshold jumps to the drift so the
    /// field mean is preserved exactly.
    pub absorb_residual_mean: bool,
}

impl Default for ShellConfig {
    fn default() -> Self {
        Self {
            drift_tolerance: 1e-3,
            max_shells: 1_000_000,
            table_knots: 4096,
            absorb_residual_mean: false,
        }
    }
}

/// One finite restriction ν|_{Θ_ℓ} with a normalized sampler.
#[derive(Debug, Clone)]
pub struct Shell {
    /// Shell index ℓ: Θ₀ = {|s| > 1}, Θ_ℓ = {1/(ℓ+1) < |s| ≤ 1/ℓ}.
    pub index: usize,
    /// Magnitude interval (lower, upper]; `upper = ∞` for Θ₀.
    pub lower: f64,
    pub upper: f64,
    /// λ_ℓ = ν(Θ_ℓ).
    pub mass: f64,
    sampler: ShellSampler,
}

#[derive(Debug, Clone)]
enum ShellSampler {
    /// Normalized discrete restriction: atoms plus cumulative weights.
    Discrete { atoms: Vec<f64>, cum: Vec<f64> },
    /// Tabulated inverse CDF of the restricted gamma magnitude density;
    /// a symmetric (bi-gamma) shell flips the sign with probability 1/2.
    GammaTable {
        table: MonotoneCubic,
        symmetric: bool,
    },
}

impl Shell {
    /// Draw one jump from the normalized restriction ν̃_ℓ = λ_ℓ⁻¹ ν|_{Θ_ℓ}.
    pub fn sample(&self, rng: &mut CounterRng) -> f64 {
        match &self.sampler {
            ShellSampler::Discrete { atoms, cum } => {
                let u = rng.uniform();
                let k = cum.partition_point(|&c| c < u).min(atoms.len() - 1);
                atoms[k]
            }
            ShellSampler::GammaTable { table, symmetric } => {
                let mag = table.eval(rng.uniform());
                if *symmetric {
                    if rng.uniform() < 0.5 {
                        -mag
                    } else {
                        mag
                    }
                } else {
                    mag
                }
            }
        }
    }
}

/// Finite-shell decomposition of a jump measure.
#[derive(Debug, Clone)]
pub struct ShellDecomposition {
    pub shells: Vec<Shell>,
    pub ell_max: usize,
    /// ∫_{0<|s|≤ε_min} |s| ν(ds) with ε_min = 1/(ℓ_max + 1).
    pub residual_drift_error: f64,
    /// ∫_{0<|s|≤ε_min} s ν(ds) (zero for symmetric measures).
    pub residual_mean: f64,
}

impl ShellDecomposition {
    pub fn total_mass(&self) -> f64 {
        self.shells.iter().map(|s| s.mass).sum()
    }

    pub fn empty() -> Self {
        Self {
            shells: Vec::new(),
            ell_max: 0,
            residual_drift_error: 0.0,
            residual_mean: 0.0,
        }
    }
}

/// Shell index of a jump magnitude 0 < a.
fn shell_index(a: f64) -> usize {
    if a > 1.0 {
        0
    } else {
        (1.0 / a).floor() as usize
    }
}

/// Partition ν into the shells Θ₀ = {|s| > 1}, Θ_ℓ = {1/(ℓ+1) < |s| ≤ 1/ℓ},
/// keeping shells until the discarded drift ∫_{0<|s|≤ε} |s| ν(ds) drops
/// below the tolerance.
pub fn shell_partition(
    nu: &JumpMeasure,
    cfg: &ShellConfig,
) -> Result<ShellDecomposition, MeasureError> {
    nu.validate()?;
    match nu {
        JumpMeasure::Null => Ok(ShellDecomposition::empty()),
        JumpMeasure::Discrete { atoms } => {
            let mut by_shell: std::collections::BTreeMap<usize, Vec<(f64, f64)>> =
                std::collections::BTreeMap::new();
            for &(s, w) in atoms {
                by_shell.entry(shell_index(s.abs())).or_default().push((s, w));
            }
            let ell_max = by_shell.keys().copied().max().unwrap_or(0);
            let shells = by_shell
                .into_iter()
                .map(|(ell, list)| {
                    let mass: f64 = list.iter().map(|a| a.1).sum();
                    let mut cum = Vec::with_capacity(list.len());
                    let mut acc = 0.0;
                    for &(_, w) in &list {
                        acc += w / mass;
                        cum.push(acc);
                    }
                    let (lower, upper) = shell_bounds(ell);
                    Shell {
                        index: ell,
                        lower,
                        upper,
                        mass,
                        sampler: ShellSampler::Discrete {
                            atoms: list.iter().map(|a| a.0).collect(),
                            cum,
                        },
                    }
                })
                .collect();
            Ok(ShellDecomposition {
                shells,
                ell_max,
                residual_drift_error: 0.0,
                residual_mean: 0.0,
            })
        }
        JumpMeasure::Gamma { intensity, decay } | JumpMeasure::Bigamma { intensity, decay } => {
            let symmetric = matches!(nu, JumpMeasure::Bigamma { .. });
            let sides = if symmetric { 2.0 } else { 1.0 };
            let (v, w) = (*intensity, *decay);
            // residual(ε) = sides · v (1 − e^{−wε})/w, monotone in ε
            let residual = |eps: f64| sides * v * (1.0 - (-w * eps).exp()) / w;
            let mut ell_max = match solve_gamma_shell_count(sides * v, w, cfg.drift_tolerance) {
                Some(l) => l,
                None => {
                    return Err(MeasureError::ShellTolerance {
                        requested: cfg.drift_tolerance,
                        achieved: residual(1.0 / (cfg.max_shells as f64 + 1.0)),
                        cap: cfg.max_shells,
                    })
                }
            };
            // make ℓ_max minimal under floating-point fuzz
            while ell_max > 0 && residual(1.0 / ell_max as f64) <= cfg.drift_tolerance {
                ell_max -= 1;
            }
            if ell_max + 1 > cfg.max_shells {
                return Err(MeasureError::ShellTolerance {
                    requested: cfg.drift_tolerance,
                    achieved: residual(1.0 / (cfg.max_shells as f64 + 1.0)),
                    cap: cfg.max_shells,
                });
            }
            let opts = measure_quad_opts();
            let mut shells = Vec::with_capacity(ell_max + 1);
            for ell in 0..=ell_max {
                let (lower, upper) = shell_bounds(ell);
                // λ_ℓ = sides · v ∫ e^{−ws}/s ds over the magnitude interval
                let mass = if ell == 0 {
                    quad::integrate_semi_inf(move |s| (-w * s).exp() / s, 1.0, &opts)?.value
                } else {
                    quad::integrate(move |s| (-w * s).exp() / s, lower, upper, &opts)?.value
                };
                let mass = sides * v * mass;
                let table = gamma_inverse_cdf_table(w, lower, upper, cfg.table_knots);
                shells.push(Shell {
                    index: ell,
                    lower,
                    upper,
                    mass,
                    sampler: ShellSampler::GammaTable { table, symmetric },
                });
            }
            let eps = 1.0 / (ell_max as f64 + 1.0);
            Ok(ShellDecomposition {
                shells,
                ell_max,
                residual_drift_error: residual(eps),
                residual_mean: if symmetric { 0.0 } else { residual(eps) },
            })
        }
    }
}

fn shell_bounds(ell: usize) -> (f64, f64) {
    if ell == 0 {
        (1.0, f64::INFINITY)
    } else {
        (1.0 / (ell as f64 + 1.0), 1.0 / ell as f64)
    }
}

/// Smallest ℓ with c(1 − e^{−w/(ℓ+1)})/w ≤ tol, or None beyond `usize` range.
fn solve_gamma_shell_count(c: f64, w: f64, tol: f64) -> Option<usize> {
    let rhs = w * tol / c;
    if rhs >= 1.0 {
        return Some(0);
    }
    // ε* = −ln(1 − rhs)/w, ℓ_max = ceil(1/ε*) − 1
    let eps_star = -(1.0 - rhs).ln() / w;
    let l = (1.0 / eps_star).ceil() - 1.0;
    if l < 0.0 {
        Some(0)
    } else if l > 1e12 {
        None
    } else {
        Some(l as usize)
    }
}

/// Inverse CDF table of the density ∝ e^{−ws}/s on (a, b], log-spaced knots.
///
/// Knot CDF values come from per-interval Simpson panels (the integrand is
/// smooth and the log-spaced intervals are narrow); the inverse is a
/// monotone cubic through (cdf, s).
fn gamma_inverse_cdf_table(w: f64, a: f64, b: f64, knots: usize) -> MonotoneCubic {
    let knots = knots.max(8);
    // Θ₀ is unbounded; truncate where the conditional tail mass is ~1e−18.
    let b_eff = if b.is_finite() { b } else { a + 45.0 / w };
    let ratio = b_eff / a;
    let mut s = Vec::with_capacity(knots);
    for i in 0..knots {
        s.push(a * ratio.powf(i as f64 / (knots - 1) as f64));
    }
    let density = |x: f64| (-w * x).exp() / x;
    let mut cdf = Vec::with_capacity(knots);
    cdf.push(0.0);
    let mut acc = 0.0;
    for i in 0..knots - 1 {
        let (lo, hi) = (s[i], s[i + 1]);
        let mid = 0.5 * (lo + hi);
        // Simpson panel
        acc += (hi - lo) / 6.0 * (density(lo) + 4.0 * density(mid) + density(hi));
        cdf.push(acc);
    }
    for c in cdf.iter_mut() {
        *c /= acc;
    }
    // enforce strict monotonicity of the abscissae for the interpolant
    MonotoneCubic::new(cdf, s)
}

/// Monotone (PCHIP-style) cubic interpolant through strictly increasing data.
#[derive(Debug, Clone)]
pub(crate) struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub(crate) fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let mut delta = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let h = x[i + 1] - x[i];
            delta.push(if h > 0.0 { (y[i + 1] - y[i]) / h } else { 0.0 });
        }
        let mut d = vec![0.0; n];
        d[0] = delta[0];
        d[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            let (d0, d1) = (delta[i - 1], delta[i]);
            if d0 * d1 <= 0.0 {
                d[i] = 0.0;
            } else {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                d[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
            }
        }
        Self { x, y, d }
    }

    pub(crate) fn eval(&self, q: f64) -> f64 {
        let n = self.x.len();
        if q <= self.x[0] {
            return self.y[0];
        }
        if q >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let k = match self
            .x
            .binary_search_by(|v| v.partial_cmp(&q).expect("finite"))
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        if h <= 0.0 {
            return self.y[k];
        }
        let t = (q - self.x[k]) / h;
        let (y0, y1) = (self.y[k], self.y[k + 1]);
        let (d0, d1) = (self.d[k], self.d[k + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + h * d0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + h * d1 * (t3 - t2)
    }
}
