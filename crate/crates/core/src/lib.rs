//! Smoothed Lévy random fields and their use as diffusion coefficients.
//!
//! The crate samples generalized Lévy noise (Gaussian white noise plus
//! compound Poisson jumps, including infinite-activity gamma noise) on a
//! cut-off box, smooths it with Matérn kernels, expands the kernel in a
//! Nyström/Mercer eigenbasis, solves the stationary diffusion equation with
//! the transformed field as conductivity, and ships a Monte Carlo engine
//! that checks moment formulas, tail bounds, eigenvalue decay and
//! convergence rates against closed-form references.
//!
//! Modules mirror the pipeline:
//!
//! * [`measure`] — jump measures, Lévy triplets, shell decompositions
//! * [`noise`] — noise realizations on a cell grid and linear functionals
//! * [`matern`] — Matérn kernel evaluation (Bessel and spectral routes)
//! * [`field`] — smoothed field realizations and positivity transforms
//! * [`mercer`] — Nyström eigenpairs, truncated kernels, field reconstruction
//! * [`analysis`] — cumulant moments, Talagrand/Chernov tail bounds
//! * [`fem`] — P1 finite elements on intervals and rectangles
//! * [`experiments`] — Monte Carlo studies and rate fits
//! * [`cli`] — configuration parsing and study dispatch

pub mod analysis;
pub mod cli;
pub mod experiments;
pub mod fem;
pub mod field;
pub mod grid;
pub mod io;
pub mod matern;
pub mod measure;
pub mod mercer;
pub mod noise;
pub mod quad;
pub mod rng;
pub mod special;
