//! Independent numerical oracle for constructed spacetimes.
//!
//! Everything here sees a metric only through its *values* on a coordinate
//! stencil: Christoffel symbols, Ricci tensors and scalar curvature come
//! from central finite differences (optionally Richardson-extrapolated),
//! never from the closed forms in [`crate::geometry`]. Agreement between
//! the two paths is therefore evidence, not tautology.
//!
//! The Einstein tensor of the full static metric is decomposed into
//! perfect-fluid form: its mixed form has at most two distinct eigenvalues,
//! `−μ` on a timelike line and `ρ` on its orthogonal complement. The `8π`
//! of the field equation is absorbed into the stored stress tensor (see
//! [`EIGHT_PI_CONVENTION`]), so recovered `μ`, `ρ` compare directly against
//! the fluid formulas of [`crate::reduction`].

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::geometry::{ChristoffelTable, GeometryError, SpacetimeSpec};
use crate::real::{real, Real};
use crate::reduction::{mu_of, rho_of, ReductionError, RhoMode};

/// The stored stress tensor absorbs the `8π` of `G = 8πT`: verification
/// compares the Einstein tensor directly against `(μ+ρ)η⊗η + ρĝ` with μ, ρ
/// as produced by the fluid formulas. Multiply stored densities by
/// `1/(8π)` to recover conventional units.
pub const EIGHT_PI_CONVENTION: f64 = 8.0 * std::f64::consts::PI;

#[derive(Debug, Error, PartialEq)]
pub enum VerifierError {
    #[error("metric is singular at the evaluation point")]
    SingularMetric,
    #[error("finite-difference stencil leaves the domain at xi = {xi} (margin {margin})")]
    StencilOutsideDomain { xi: f64, margin: f64 },
    #[error("eigenvalues cluster into {clusters} groups; a perfect fluid allows at most two")]
    NotPerfectFluid { clusters: usize },
    #[error("simple eigenvector has causal character {norm} (timelike required)")]
    EigenvectorNotTimelike { norm: f64 },
    #[error("eigenvalues have non-negligible imaginary part {imag}")]
    ComplexEigenvalues { imag: f64 },
    #[error("verification grid is empty")]
    EmptyGrid,
    #[error("all {0} grid points were skipped")]
    AllPointsSkipped(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// Finite-difference settings for one verification run.
#[derive(Debug, Clone)]
pub struct FdConfig<T> {
    /// Base step; per point it is scaled by `max(1, |ξ|)` so that large
    /// coordinate ranges keep a comparable relative resolution.
    pub h: T,
    /// One level of Richardson extrapolation (`(4D(h) − D(2h))/3`),
    /// upgrading O(h²) to O(h⁴) at twice the stencil reach.
    pub richardson: bool,
    /// ξ anchors to verify at.
    pub grid: Vec<T>,
    /// Pass threshold on residuals.
    pub tol: T,
    /// Relative eigenvalue clustering gap for [`fluid_decompose`].
    pub cluster_gap: T,
}

impl<T: Real> Default for FdConfig<T> {
    fn default() -> Self {
        Self {
            h: real(1e-3),
            richardson: false,
            grid: Vec::new(),
            tol: real(5e-4),
            cluster_gap: real(1e-3),
        }
    }
}

impl<T: Real> FdConfig<T> {
    /// Uniform interior grid: `count` points of the spec's finite window,
    /// shrunk by the stencil margin.
    pub fn with_uniform_grid(mut self, spec: &SpacetimeSpec<T>, count: usize) -> Self {
        let (lo, hi) = spec.finite_window();
        let margin = stencil_margin(spec, self.h, self.richardson)
            * real::<T>(1.0 + 2.0 * f64::max(lo.approx_f64().abs(), hi.approx_f64().abs()));
        let (lo, hi) = (lo + margin, hi - margin);
        self.grid = (0..count)
            .map(|k| lo + (hi - lo) * real((k as f64 + 0.5) / count as f64))
            .collect();
        self
    }
}

/// Reach of the nested difference stencil in ξ, per unit of local step.
fn stencil_margin<T: Real>(spec: &SpacetimeSpec<T>, h: T, richardson: bool) -> T {
    let amax = spec
        .direction()
        .alpha()
        .iter()
        .fold(T::zero(), |acc, a| acc.max(a.abs()));
    let reach = if richardson { 4.0 } else { 2.0 };
    h * amax * real(reach + 0.5)
}

fn local_step<T: Real>(h: T, xi: T) -> T {
    h * T::one().max(xi.abs())
}

type MetricField<'a, T> = dyn Fn(&[T]) -> Result<DMatrix<T>, GeometryError> + 'a;
type ScalarField<'a, T> = dyn Fn(&[T]) -> Result<T, GeometryError> + 'a;

fn shifted<T: Real>(point: &[T], i: usize, dx: T) -> Vec<T> {
    let mut p = point.to_vec();
    p[i] += dx;
    p
}

/// `∂_i g` by central differences at step `h`.
fn metric_partial<T: Real>(
    metric: &MetricField<'_, T>,
    point: &[T],
    i: usize,
    h: T,
) -> Result<DMatrix<T>, GeometryError> {
    let gp = metric(&shifted(point, i, h))?;
    let gm = metric(&shifted(point, i, -h))?;
    Ok((gp - gm) / (real::<T>(2.0) * h))
}

fn christoffel_at<T: Real>(
    metric: &MetricField<'_, T>,
    point: &[T],
    h: T,
) -> Result<ChristoffelTable<T>, VerifierError> {
    let dim = point.len();
    let g = metric(point)?;
    let ginv = g.try_inverse().ok_or(VerifierError::SingularMetric)?;
    let partials: Vec<DMatrix<T>> = (0..dim)
        .map(|i| metric_partial(metric, point, i, h))
        .collect::<Result<_, _>>()?;
    let mut table = ChristoffelTable::zeros(dim);
    let half = real::<T>(0.5);
    for k in 0..dim {
        for i in 0..dim {
            for j in i..dim {
                let mut acc = T::zero();
                for l in 0..dim {
                    acc += ginv[(k, l)]
                        * (partials[i][(j, l)] + partials[j][(l, i)] - partials[l][(i, j)]);
                }
                let v = half * acc;
                table.set(k, i, j, v);
                table.set(k, j, i, v);
            }
        }
    }
    Ok(table)
}

fn richardson2<T: Real, M, F>(h: T, richardson: bool, eval: F) -> Result<M, VerifierError>
where
    M: std::ops::Mul<T, Output = M> + std::ops::Sub<Output = M>,
    F: Fn(T) -> Result<M, VerifierError>,
{
    let fine = eval(h)?;
    if !richardson {
        return Ok(fine);
    }
    let coarse = eval(h + h)?;
    let third = real::<T>(1.0 / 3.0);
    Ok(fine * (real::<T>(4.0) * third) - coarse * third)
}

/// Christoffel symbols of an arbitrary metric field by central differences;
/// O(h²), or O(h⁴) with `richardson`.
pub fn numeric_christoffel<T: Real>(
    metric: &MetricField<'_, T>,
    point: &[T],
    h: T,
    richardson: bool,
) -> Result<ChristoffelTable<T>, VerifierError> {
    richardson2(h, richardson, |step| christoffel_at(metric, point, step))
}

fn ricci_at<T: Real>(
    metric: &MetricField<'_, T>,
    point: &[T],
    h: T,
) -> Result<DMatrix<T>, VerifierError> {
    let dim = point.len();
    let gamma0 = christoffel_at(metric, point, h)?;
    // ∂_k Γ^a_bc by nested central differences (same step).
    let mut dgamma = Vec::with_capacity(dim);
    for k in 0..dim {
        let gp = christoffel_at(metric, &shifted(point, k, h), h)?;
        let gm = christoffel_at(metric, &shifted(point, k, -h), h)?;
        let mut d = ChristoffelTable::zeros(dim);
        let inv2h = (real::<T>(2.0) * h).recip();
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    d.set(a, b, c, (gp.get(a, b, c) - gm.get(a, b, c)) * inv2h);
                }
            }
        }
        dgamma.push(d);
    }
    let mut ric = DMatrix::<T>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut v = T::zero();
            for k in 0..dim {
                v += dgamma[k].get(k, i, j) - dgamma[i].get(k, k, j);
                for l in 0..dim {
                    v += gamma0.get(k, k, l) * gamma0.get(l, i, j)
                        - gamma0.get(k, i, l) * gamma0.get(l, k, j);
                }
            }
            ric[(i, j)] = v;
        }
    }
    // Enforce the symmetry the formula has only up to truncation error.
    let ric_t = ric.transpose();
    Ok((ric + ric_t) * real::<T>(0.5))
}

/// Ricci tensor of a metric field by nested central differences.
pub fn numeric_ricci<T: Real>(
    metric: &MetricField<'_, T>,
    point: &[T],
    h: T,
    richardson: bool,
) -> Result<DMatrix<T>, VerifierError> {
    richardson2(h, richardson, |step| ricci_at(metric, point, step))
}

/// Scalar curvature `g^{ij} Ric_ij` with a numeric Ricci.
pub fn numeric_scalar_curvature<T: Real>(
    metric: &MetricField<'_, T>,
    point: &[T],
    h: T,
    richardson: bool,
) -> Result<T, VerifierError> {
    let g = metric(point)?;
    let ginv = g.try_inverse().ok_or(VerifierError::SingularMetric)?;
    let ric = numeric_ricci(metric, point, h, richardson)?;
    Ok((ginv * ric).trace())
}

fn hessian_at<T: Real>(
    metric: &MetricField<'_, T>,
    scalar: &ScalarField<'_, T>,
    point: &[T],
    h: T,
) -> Result<DMatrix<T>, VerifierError> {
    let dim = point.len();
    let gamma = christoffel_at(metric, point, h)?;
    let f0 = scalar(point)?;
    let two = real::<T>(2.0);
    let four = real::<T>(4.0);
    let mut grad = vec![T::zero(); dim];
    for i in 0..dim {
        let fp = scalar(&shifted(point, i, h))?;
        let fm = scalar(&shifted(point, i, -h))?;
        grad[i] = (fp - fm) / (two * h);
    }
    let mut hess = DMatrix::<T>::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let dij = if i == j {
                let fp = scalar(&shifted(point, i, h))?;
                let fm = scalar(&shifted(point, i, -h))?;
                (fp - two * f0 + fm) / (h * h)
            } else {
                let mut pp = point.to_vec();
                pp[i] += h;
                pp[j] += h;
                let mut pm = point.to_vec();
                pm[i] += h;
                pm[j] -= h;
                let mut mp = point.to_vec();
                mp[i] -= h;
                mp[j] += h;
                let mut mm = point.to_vec();
                mm[i] -= h;
                mm[j] -= h;
                (scalar(&pp)? - scalar(&pm)? - scalar(&mp)? + scalar(&mm)?) / (four * h * h)
            };
            let mut v = dij;
            for k in 0..dim {
                v -= gamma.get(k, i, j) * grad[k];
            }
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(hess)
}

/// Covariant Hessian `∇²f` of a scalar field by finite differences.
pub fn numeric_hessian<T: Real>(
    metric: &MetricField<'_, T>,
    scalar: &ScalarField<'_, T>,
    point: &[T],
    h: T,
    richardson: bool,
) -> Result<DMatrix<T>, VerifierError> {
    richardson2(h, richardson, |step| hessian_at(metric, scalar, point, step))
}

/// How a decomposition degenerated, if it did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    /// Two clean clusters of multiplicities {1, n}.
    None,
    /// Everything is one cluster at zero: vacuum, μ = ρ = 0.
    Vacuum,
    /// One cluster at λ ≠ 0: `G = λ·g`, so μ = −λ, ρ = λ and any unit
    /// timelike η works.
    Isotropic,
}

/// Perfect-fluid reading of one Einstein tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidDecomposition<T: Real> {
    pub mu: T,
    pub rho: T,
    /// ĝ-unit timelike fluid direction, ĝ(η,η) = −1.
    pub eta: DVector<T>,
    pub eigen_multiplicities: Vec<usize>,
    /// `‖G − [(μ+ρ)η♭⊗η♭ + ρg]‖_∞ / max(1, ‖G‖_∞)`.
    pub residual: T,
    pub degeneracy: Degeneracy,
}

/// Most timelike unit vector of the metric (eigenvector of its most
/// negative eigenvalue), future-oriented in the last coordinate.
fn timelike_unit<T: Real>(metric: &DMatrix<T>) -> Result<DVector<T>, VerifierError> {
    let se = metric.clone().symmetric_eigen();
    let mut idx = 0;
    for k in 1..se.eigenvalues.len() {
        if se.eigenvalues[k] < se.eigenvalues[idx] {
            idx = k;
        }
    }
    let v = se.eigenvectors.column(idx).into_owned();
    normalize_timelike(metric, v)
}

fn normalize_timelike<T: Real>(
    metric: &DMatrix<T>,
    v: DVector<T>,
) -> Result<DVector<T>, VerifierError> {
    let q = (v.transpose() * metric * &v)[(0, 0)];
    if !(q < T::zero()) {
        return Err(VerifierError::EigenvectorNotTimelike {
            norm: q.approx_f64(),
        });
    }
    let mut eta = v / (-q).sqrt();
    let last = eta.len() - 1;
    if eta[last] < T::zero() {
        eta.neg_mut();
    }
    Ok(eta)
}

/// Decompose an Einstein tensor (built from `ricci` and `scalar_curv`)
/// against `metric` into perfect-fluid form.
///
/// The mixed tensor `g⁻¹G` is eigen-clustered with an absolute gap of
/// `cluster_gap·max(1, maxᵢ|λᵢ|)`. Two clusters of multiplicities {1, n}
/// give `μ = −λ_simple`, `ρ = λ_repeated` and η from the simple (timelike)
/// eigenline; a single cluster is the vacuum/isotropic degenerate case.
pub fn fluid_decompose<T: Real>(
    ricci: &DMatrix<T>,
    metric: &DMatrix<T>,
    scalar_curv: T,
    cluster_gap: T,
) -> Result<FluidDecomposition<T>, VerifierError> {
    let dim = metric.nrows();
    let ginv = metric
        .clone()
        .try_inverse()
        .ok_or(VerifierError::SingularMetric)?;
    let einstein = ricci - metric * (scalar_curv * real::<T>(0.5));
    let mixed = &ginv * &einstein;

    let eig = mixed.complex_eigenvalues();
    let mut scale = T::zero();
    for lam in eig.iter() {
        scale = scale.max(lam.re.abs());
        if lam.im.abs() > cluster_gap * T::one().max(lam.re.abs()) {
            return Err(VerifierError::ComplexEigenvalues {
                imag: lam.im.approx_f64(),
            });
        }
    }
    let mut lams: Vec<T> = eig.iter().map(|c| c.re).collect();
    lams.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let gap = cluster_gap * T::one().max(scale);

    let mut clusters: Vec<Vec<T>> = vec![vec![lams[0]]];
    for &l in &lams[1..] {
        let last = clusters.last_mut().unwrap();
        if l - *last.last().unwrap() <= gap {
            last.push(l);
        } else {
            clusters.push(vec![l]);
        }
    }
    let mean = |c: &[T]| {
        c.iter().fold(T::zero(), |a, &b| a + b) / real::<T>(c.len() as f64)
    };

    let model_residual = |mu: T, rho: T, eta: &DVector<T>| {
        let eta_flat = metric * eta;
        let model = &eta_flat * eta_flat.transpose() * (mu + rho) + metric * rho;
        let diff = &einstein - model;
        let mut worst = T::zero();
        let mut gnorm = T::zero();
        for i in 0..dim {
            for j in 0..dim {
                worst = worst.max(diff[(i, j)].abs());
                gnorm = gnorm.max(einstein[(i, j)].abs());
            }
        }
        worst / T::one().max(gnorm)
    };

    match clusters.len() {
        1 => {
            let lam = mean(&clusters[0]);
            let (mu, rho, degeneracy) = if lam.abs() <= gap {
                (T::zero(), T::zero(), Degeneracy::Vacuum)
            } else {
                (-lam, lam, Degeneracy::Isotropic)
            };
            let eta = timelike_unit(metric)?;
            let residual = model_residual(mu, rho, &eta);
            Ok(FluidDecomposition {
                mu,
                rho,
                eta,
                eigen_multiplicities: vec![dim],
                residual,
                degeneracy,
            })
        }
        2 => {
            let (simple, repeated) = if clusters[0].len() == 1 && clusters[1].len() == dim - 1 {
                (mean(&clusters[0]), mean(&clusters[1]))
            } else if clusters[1].len() == 1 && clusters[0].len() == dim - 1 {
                (mean(&clusters[1]), mean(&clusters[0]))
            } else {
                return Err(VerifierError::NotPerfectFluid { clusters: 2 });
            };
            // Simple eigenline from the SVD nullspace of (M − λ₁I).
            let shifted = &mixed - DMatrix::<T>::identity(dim, dim) * simple;
            let svd = shifted.svd(false, true);
            let vt = svd.v_t.as_ref().ok_or(VerifierError::SingularMetric)?;
            let mut idx = 0;
            for k in 1..svd.singular_values.len() {
                if svd.singular_values[k] < svd.singular_values[idx] {
                    idx = k;
                }
            }
            let eta = normalize_timelike(metric, vt.row(idx).transpose())?;
            let mu = -simple;
            let rho = repeated;
            let residual = model_residual(mu, rho, &eta);
            Ok(FluidDecomposition {
                mu,
                rho,
                eta,
                eigen_multiplicities: vec![1, dim - 1],
                residual,
                degeneracy: Degeneracy::None,
            })
        }
        k => Err(VerifierError::NotPerfectFluid { clusters: k }),
    }
}

/// A grid point the verifier could not evaluate, and why.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedPoint<T> {
    pub xi: T,
    pub reason: String,
}

/// Aggregated outcome of [`verify_spacetime`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<T: Real> {
    /// Worst `‖f(Ric_g − (R_g/n)g) − (∇²f − (Δf/n)g)‖_∞`, spatial, numeric.
    pub max_traceless_residual: T,
    /// Worst `|R_g/2 − μ|` across both recovery paths.
    pub max_mu_error: T,
    /// Worst pressure recovery error across both paths.
    pub max_rho_error: T,
    /// Every decomposition produced a valid fluid reading
    /// ({1, n} clusters, or a flagged degenerate case).
    pub eigen_ok: bool,
    pub points_checked: usize,
    pub h_used: T,
    pub richardson: bool,
    pub skipped: Vec<SkippedPoint<T>>,
    pub vacuum_points: usize,
    pub isotropic_points: usize,
}

impl<T: Real> VerificationReport<T> {
    /// Pass iff every residual is under `tol`, the eigenstructure held and
    /// at least one point was actually checked.
    pub fn pass(&self, tol: T) -> bool {
        self.points_checked > 0
            && self.eigen_ok
            && self.max_traceless_residual < tol
            && self.max_mu_error < tol
            && self.max_rho_error < tol
    }
}

/// Check a spacetime against the numeric oracle on the configured grid.
///
/// Per point: (i) the trace-free spatial system residual, (ii) recovery of
/// μ from `R_g/2` and of ρ from `((n−1)/n)[Δf/f − ((n−2)/(2(n−1)))R_g]`
/// against the fluid formulas, (iii) fluid decomposition of the full
/// static Einstein tensor. Points whose stencil would leave the domain are
/// recorded as skipped.
pub fn verify_spacetime<T: Real>(
    spec: &SpacetimeSpec<T>,
    config: &FdConfig<T>,
) -> Result<VerificationReport<T>, VerifierError> {
    if config.grid.is_empty() {
        return Err(VerifierError::EmptyGrid);
    }
    let n = spec.n();
    let nf = real::<T>(n as f64);
    let nm1 = real::<T>((n - 1) as f64);
    let nm2 = real::<T>((n - 2) as f64);
    let w = spec.direction().norm2();
    let (lo, hi) = spec.interval();

    let spatial_metric = |x: &[T]| -> Result<DMatrix<T>, GeometryError> {
        let xi = spec.xi_of(x);
        let phi = spec.phi_jet(xi)?.value;
        let inv2 = (phi * phi).recip();
        Ok(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                spec.signature().eps::<T>(i) * inv2
            } else {
                T::zero()
            }
        }))
    };
    let lapse_value = |x: &[T]| -> Result<T, GeometryError> { Ok(spec.f_jet(spec.xi_of(x))?.value) };
    let static_metric = |p: &[T]| spec.static_metric_at(p);

    let mut report = VerificationReport {
        max_traceless_residual: T::zero(),
        max_mu_error: T::zero(),
        max_rho_error: T::zero(),
        eigen_ok: true,
        points_checked: 0,
        h_used: config.h,
        richardson: config.richardson,
        skipped: Vec::new(),
        vacuum_points: 0,
        isotropic_points: 0,
    };

    for &xi in &config.grid {
        let h = local_step(config.h, xi);
        let margin = stencil_margin(spec, h, config.richardson);
        if !(xi - margin > lo && xi + margin < hi) {
            report.skipped.push(SkippedPoint {
                xi,
                reason: format!(
                    "stencil of reach {} leaves the interval",
                    margin.approx_f64()
                ),
            });
            continue;
        }

        let point = spec.spatial_point_at(xi);
        let mut step = || -> Result<(), VerifierError> {
            let phi = spec.phi_jet(xi)?;
            let f = spec.f_jet(xi)?;

            // (i) spatial trace-free system, all-numeric left and right sides.
            let g = spatial_metric(&point)?;
            let ginv = g.clone().try_inverse().ok_or(VerifierError::SingularMetric)?;
            let ric = numeric_ricci(&spatial_metric, &point, h, config.richardson)?;
            let rg = (&ginv * &ric).trace();
            let hess = numeric_hessian(&spatial_metric, &lapse_value, &point, h, config.richardson)?;
            let lap = (&ginv * &hess).trace();
            let mut worst = T::zero();
            for i in 0..n {
                for j in 0..n {
                    let lhs = f.value * (ric[(i, j)] - g[(i, j)] * rg / nf);
                    let rhs = hess[(i, j)] - g[(i, j)] * lap / nf;
                    worst = worst.max((lhs - rhs).abs());
                }
            }
            report.max_traceless_residual = report.max_traceless_residual.max(worst);

            // (ii) μ, ρ recovery from numeric curvature.
            let mu_ref = mu_of(n, w, &phi);
            let rho_ref = rho_of(n, w, &phi, &f, RhoMode::Direct)?;
            let mu_err = (rg * real::<T>(0.5) - mu_ref).abs();
            let rho_rec = nm1 / nf * (lap / f.value - nm2 / (real::<T>(2.0) * nm1) * rg);
            let rho_err = (rho_rec - rho_ref).abs();

            // (iii) fluid decomposition of the full static Einstein tensor.
            let mut point4 = point.clone();
            point4.push(T::zero());
            let ghat = static_metric(&point4)?;
            let ric4 = numeric_ricci(&static_metric, &point4, h, config.richardson)?;
            let r4 = (ghat
                .clone()
                .try_inverse()
                .ok_or(VerifierError::SingularMetric)?
                * &ric4)
                .trace();
            let dec = fluid_decompose(&ric4, &ghat, r4, config.cluster_gap)?;
            match dec.degeneracy {
                Degeneracy::Vacuum => report.vacuum_points += 1,
                Degeneracy::Isotropic => report.isotropic_points += 1,
                Degeneracy::None => {}
            }
            let mu_err = mu_err.max((dec.mu - mu_ref).abs());
            let rho_err = rho_err.max((dec.rho - rho_ref).abs());
            report.max_mu_error = report.max_mu_error.max(mu_err);
            report.max_rho_error = report.max_rho_error.max(rho_err);
            report.points_checked += 1;
            Ok(())
        };
        if let Err(e) = step() {
            match e {
                VerifierError::NotPerfectFluid { .. }
                | VerifierError::EigenvectorNotTimelike { .. }
                | VerifierError::ComplexEigenvalues { .. } => {
                    report.eigen_ok = false;
                    report.points_checked += 1;
                }
                other => report.skipped.push(SkippedPoint {
                    xi,
                    reason: other.to_string(),
                }),
            }
        }
    }

    if report.points_checked == 0 {
        return Err(VerifierError::AllPointsSkipped(config.grid.len()));
    }
    Ok(report)
}
