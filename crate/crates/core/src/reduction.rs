//! The master lapse equation and everything downstream of it.
//!
//! With `g = δ/φ²` and all profiles functions of `ξ = α·x`, the static metric
//! `ĝ = g − f² dt²` is a perfect-fluid solution exactly when
//!
//! ```text
//! (n−2) f φ″ − f″ φ − 2 φ′ f′ = 0.
//! ```
//!
//! This module evaluates that residual, integrates the equation for `f` given
//! `φ`, computes the fluid fields
//!
//! ```text
//! μ = ‖α‖² (n−1) [φ φ″ − (n/2)(φ′)²]
//! ρ = ‖α‖² ((n−1)/n) [φ² f″/f − (n−2)(f′φ′φ/f + φφ″ − (n/2)(φ′)²)]
//! ```
//!
//! and exposes the Riccati form of the equation in `y = f′/f`, whose general
//! solution around a particular one reduces to a single linear first-order
//! equation.

use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{
    conformal_hessian_f, conformal_laplacian_f, spatial_ricci, GeometryError, Jet2, Profile,
    SpacetimeSpec,
};
use crate::ode::{integrate, EventSpec, OdeError, OdeOptions, OdeSolution, Termination};
use crate::real::{real, Real};

/// Default floor below which `φ` or `f` counts as singular.
pub const SINGULARITY_FLOOR: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum ReductionError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("step budget exhausted at xi = {at}; solution covers ({lo}, {hi})")]
    StepBudgetExhausted { at: f64, lo: f64, hi: f64 },
    #[error("initial lapse must exceed the singularity floor, got f = {0}")]
    NonPositiveInitialLapse(f64),
    #[error("pressure evaluation needs phi > 0 and f > 0, got phi = {phi}, f = {f}")]
    FluidDomain { phi: f64, f: f64 },
    #[error("anchor xi0 = {xi0} outside the requested interval ({lo}, {hi})")]
    AnchorOutsideInterval { xi0: f64, lo: f64, hi: f64 },
    #[error("particular solution fails its Riccati residual check at xi = {xi}: |{residual}| > {tol}")]
    InvalidParticularSolution { xi: f64, residual: f64, tol: f64 },
}

/// Residual of the master equation at one point:
/// `(n−2) f φ″ − f″ φ − 2 φ′ f′`.
pub fn edo_residual<T: Real>(n: usize, phi: &Jet2<T>, f: &Jet2<T>) -> T {
    let nm2 = real::<T>((n - 2) as f64);
    let two = real::<T>(2.0);
    nm2 * f.value * phi.d2 - f.d2 * phi.value - two * phi.d1 * f.d1
}

/// Tolerances and budget for the reduction-level integrations.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: Option<T>,
    pub max_steps: usize,
    /// Minimum allowed `φ` and `f` before integration stops.
    pub singularity_floor: T,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: real(1e-9),
            abs_tol: real(1e-12),
            max_step: None,
            max_steps: 100_000,
            singularity_floor: real(SINGULARITY_FLOOR),
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub(crate) fn ode_options(&self) -> OdeOptions<T> {
        OdeOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            max_steps: self.max_steps,
            first_step: None,
            min_step: None,
        }
    }
}

/// Why one side of a numerically integrated profile ends before the
/// requested interval edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// `f` reached the singularity floor.
    LapseFloor,
    /// `φ` reached the singularity floor.
    ConformalFloor,
    /// Step size collapsed (stiff blow-up or domain wall).
    StepCollapse,
}

/// Lapse profile produced by [`solve_f`]: dense interpolants on both sides
/// of the anchor, with the second derivative supplied by the equation itself.
pub struct NumericProfile<T: Real> {
    n: usize,
    phi: Arc<dyn Profile<T>>,
    xi0: T,
    f0: T,
    df0: T,
    left: Option<OdeSolution<T>>,
    right: Option<OdeSolution<T>>,
    domain: (T, T),
    requested: (T, T),
    truncated_left: Option<Truncation>,
    truncated_right: Option<Truncation>,
}

impl<T: Real> NumericProfile<T> {
    /// Realized open interval, possibly smaller than requested.
    pub fn domain(&self) -> (T, T) {
        self.domain
    }

    pub fn requested(&self) -> (T, T) {
        self.requested
    }

    pub fn truncations(&self) -> (Option<Truncation>, Option<Truncation>) {
        (self.truncated_left, self.truncated_right)
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated_left.is_some() || self.truncated_right.is_some()
    }

    fn lapse_rhs(&self, xi: T) -> Option<(T, T)> {
        let (lo, hi) = self.phi.domain();
        if xi <= lo || xi >= hi {
            return None;
        }
        let p = self.phi.jet(xi);
        if !(p.value > T::zero()) {
            return None;
        }
        Some((p.d1 / p.value, p.d2 / p.value))
    }

    fn raw_eval(&self, xi: T) -> (T, T) {
        if xi == self.xi0 {
            return (self.f0, self.df0);
        }
        let side = if xi < self.xi0 { &self.left } else { &self.right };
        match side {
            Some(sol) if sol.contains(xi) => {
                let (y, _) = sol.eval_with_deriv(xi);
                (y[0], y[1])
            }
            _ => (real(f64::NAN), real(f64::NAN)),
        }
    }
}

impl<T: Real> Profile<T> for NumericProfile<T> {
    fn jet(&self, xi: T) -> Jet2<T> {
        let (f, df) = self.raw_eval(xi);
        let nm2 = real::<T>((self.n - 2) as f64);
        let two = real::<T>(2.0);
        let d2 = match self.lapse_rhs(xi) {
            Some((l1, l2)) => nm2 * l2 * f - two * l1 * df,
            None => real(f64::NAN),
        };
        Jet2::new(f, df, d2)
    }

    fn domain(&self) -> (T, T) {
        self.domain
    }
}

fn lapse_field<T: Real>(n: usize, phi: &Arc<dyn Profile<T>>) -> impl Fn(T, &[T], &mut [T]) + '_ {
    let nm2 = real::<T>((n - 2) as f64);
    let two = real::<T>(2.0);
    let (dlo, dhi) = phi.domain();
    move |xi: T, y: &[T], dy: &mut [T]| {
        if xi <= dlo || xi >= dhi {
            dy[0] = real(f64::NAN);
            dy[1] = real(f64::NAN);
            return;
        }
        let p = phi.jet(xi);
        if !(p.value > T::zero()) {
            dy[0] = real(f64::NAN);
            dy[1] = real(f64::NAN);
            return;
        }
        dy[0] = y[1];
        dy[1] = nm2 * (p.d2 / p.value) * y[0] - two * (p.d1 / p.value) * y[1];
    }
}

/// Integrate the master equation for `f` from `(f0, f0′)` at `xi0` across
/// `interval`, in both directions.
///
/// Integration on a side stops cleanly (and marks the profile truncated)
/// when `f` or `φ` crosses the singularity floor or the step size collapses;
/// exhausting the step budget is an error.
pub fn solve_f<T: Real>(
    n: usize,
    phi: Arc<dyn Profile<T>>,
    xi0: T,
    f0: T,
    df0: T,
    interval: (T, T),
    config: &IntegratorConfig<T>,
) -> Result<NumericProfile<T>, ReductionError> {
    let (lo, hi) = interval;
    if !(xi0 >= lo && xi0 <= hi) {
        return Err(ReductionError::AnchorOutsideInterval {
            xi0: xi0.approx_f64(),
            lo: lo.approx_f64(),
            hi: hi.approx_f64(),
        });
    }
    if !(f0 > config.singularity_floor) {
        return Err(ReductionError::NonPositiveInitialLapse(f0.approx_f64()));
    }

    let floor = config.singularity_floor;
    let make_events = || {
        let phi_ev = Arc::clone(&phi);
        vec![
            EventSpec::stop_when(move |_xi: T, y: &[T]| y[0] - floor),
            EventSpec::stop_when(move |xi: T, _y: &[T]| {
                let (dlo, dhi) = phi_ev.domain();
                if xi <= dlo || xi >= dhi {
                    -T::one()
                } else {
                    phi_ev.jet(xi).value - floor
                }
            }),
        ]
    };

    let opts = config.ode_options();
    let y0 = [f0, df0];

    let run_side = |target: T| -> Result<Option<(OdeSolution<T>, T, Option<Truncation>)>, ReductionError> {
        if target == xi0 {
            return Ok(None);
        }
        let sol = integrate(lapse_field(n, &phi), xi0, &y0, target, &opts, &make_events())?;
        let reached = match sol.termination {
            Termination::Completed => (target, None),
            Termination::Event { index, t } => {
                let why = if index == 0 {
                    Truncation::LapseFloor
                } else {
                    Truncation::ConformalFloor
                };
                (t, Some(why))
            }
            Termination::StepCollapse { t } => (t, Some(Truncation::StepCollapse)),
            Termination::MaxSteps { t } => {
                return Err(ReductionError::StepBudgetExhausted {
                    at: t.approx_f64(),
                    lo: if target < xi0 { t } else { xi0 }.approx_f64(),
                    hi: if target < xi0 { xi0 } else { t }.approx_f64(),
                });
            }
        };
        Ok(Some((sol, reached.0, reached.1)))
    };

    let right = run_side(hi)?;
    let left = run_side(lo)?;

    let (right_sol, right_end, trunc_right) = match right {
        Some((s, e, t)) => (Some(s), e, t),
        None => (None, xi0, None),
    };
    let (left_sol, left_end, trunc_left) = match left {
        Some((s, e, t)) => (Some(s), e, t),
        None => (None, xi0, None),
    };

    Ok(NumericProfile {
        n,
        phi,
        xi0,
        f0,
        df0,
        left: left_sol,
        right: right_sol,
        domain: (left_end, right_end),
        requested: interval,
        truncated_left: trunc_left,
        truncated_right: trunc_right,
    })
}

/// Energy density `μ = ‖α‖² (n−1) [φφ″ − (n/2)(φ′)²]`.
pub fn mu_of<T: Real>(n: usize, alpha_norm2: T, phi: &Jet2<T>) -> T {
    let nm1 = real::<T>((n - 1) as f64);
    let half_n = real::<T>(n as f64 / 2.0);
    alpha_norm2 * nm1 * (phi.value * phi.d2 - half_n * phi.d1 * phi.d1)
}

/// How [`rho_of`] obtains the second derivative of `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoMode {
    /// Use `f″` from the jet as given.
    Direct,
    /// Replace `f″` by `((n−2)φ″f − 2φ′f′)/φ`, exact on-shell; the jet's
    /// `f″` entry is ignored, so `(f, f′)`-only sources work.
    EliminateF2,
}

/// Pressure `ρ = ‖α‖² ((n−1)/n) [φ²f″/f − (n−2)(f′φ′φ/f + φφ″ − (n/2)(φ′)²)]`.
pub fn rho_of<T: Real>(
    n: usize,
    alpha_norm2: T,
    phi: &Jet2<T>,
    f: &Jet2<T>,
    mode: RhoMode,
) -> Result<T, ReductionError> {
    if !(phi.value > T::zero()) || !(f.value > T::zero()) {
        return Err(ReductionError::FluidDomain {
            phi: phi.value.approx_f64(),
            f: f.value.approx_f64(),
        });
    }
    let nm1 = real::<T>((n - 1) as f64);
    let nm2 = real::<T>((n - 2) as f64);
    let nn = real::<T>(n as f64);
    let two = real::<T>(2.0);
    let fpp = match mode {
        RhoMode::Direct => f.d2,
        RhoMode::EliminateF2 => (nm2 * phi.d2 * f.value - two * phi.d1 * f.d1) / phi.value,
    };
    let lead = phi.value * phi.value * fpp / f.value;
    let tail = nm2
        * (f.d1 * phi.d1 * phi.value / f.value + phi.value * phi.d2
            - nn / two * phi.d1 * phi.d1);
    Ok(alpha_norm2 * (nm1 / nn) * (lead - tail))
}

/// Right side of the Riccati equation `y′ = (n−2)(x′+x²) − 2xy − y²`
/// for `x = φ′/φ`, `y = f′/f`.
pub fn riccati_rhs<T: Real>(n: usize, x: T, xprime: T, y: T) -> T {
    let nm2 = real::<T>((n - 2) as f64);
    let two = real::<T>(2.0);
    nm2 * (xprime + x * x) - two * x * y - y * y
}

/// One point of a Riccati trajectory around a particular solution `y0`:
/// `y = y0 + u` with `u = 1/v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiState<T> {
    pub x: T,
    pub xprime: T,
    pub y: T,
    pub y0: T,
    pub u: T,
    pub v: T,
}

impl<T: Real> RiccatiState<T> {
    pub fn from_correction(x: T, xprime: T, y0: T, v: T) -> Self {
        let u = T::one() / v;
        Self {
            x,
            xprime,
            y: y0 + u,
            y0,
            u,
            v,
        }
    }

    /// `u·v = 1` whenever `v ≠ 0`.
    pub fn is_consistent(&self, tol: T) -> bool {
        self.v == T::zero() || (self.u * self.v - T::one()).abs() <= tol
    }
}

/// General Riccati solution around a particular one.
///
/// Solves the linear equation `v′ = 1 + 2(y0+x) v` and represents
/// `y = y0 + 1/v`; zeros of `v` (poles of the correction, i.e. zeros of `f`)
/// are recorded as events, not errors.
pub struct RiccatiFamily<T: Real> {
    x: Arc<dyn Profile<T>>,
    y0: Arc<dyn Profile<T>>,
    xi0: T,
    v0: T,
    left: Option<OdeSolution<T>>,
    right: Option<OdeSolution<T>>,
    domain: (T, T),
    poles: Vec<T>,
}

impl<T: Real> RiccatiFamily<T> {
    pub fn domain(&self) -> (T, T) {
        self.domain
    }

    /// Locations where `v = 0` (the correction `u` blows up: zeros of `f`).
    pub fn poles(&self) -> &[T] {
        &self.poles
    }

    pub fn v(&self, xi: T) -> T {
        if xi == self.xi0 {
            return self.v0;
        }
        let side = if xi < self.xi0 { &self.left } else { &self.right };
        match side {
            Some(sol) if sol.contains(xi) => sol.eval(xi)[0],
            _ => real(f64::NAN),
        }
    }

    /// Full state at `xi`; `y` is a pole when `v = 0` there.
    pub fn state(&self, xi: T) -> RiccatiState<T> {
        let xj = self.x.jet(xi);
        let y0 = self.y0.jet(xi).value;
        RiccatiState::from_correction(xj.value, xj.d1, y0, self.v(xi))
    }

    pub fn y(&self, xi: T) -> T {
        self.state(xi).y
    }
}

/// Build the general Riccati family around the particular solution `y0`.
///
/// `x_profile` carries `x` in its value slot and `x′` in its derivative slot;
/// `y0_profile` likewise carries `y0` and `y0′`. The particular solution is
/// residual-checked against the Riccati equation on a coarse sample of the
/// interval before any integration happens.
pub fn riccati_general<T: Real>(
    n: usize,
    x_profile: Arc<dyn Profile<T>>,
    y0_profile: Arc<dyn Profile<T>>,
    xi0: T,
    v0: T,
    interval: (T, T),
    config: &IntegratorConfig<T>,
) -> Result<RiccatiFamily<T>, ReductionError> {
    let (lo, hi) = interval;
    if !(xi0 >= lo && xi0 <= hi) {
        return Err(ReductionError::AnchorOutsideInterval {
            xi0: xi0.approx_f64(),
            lo: lo.approx_f64(),
            hi: hi.approx_f64(),
        });
    }

    let residual_tol = real::<T>(1e-8);
    let checks = 65;
    for k in 0..checks {
        let t = real::<T>(k as f64 / (checks - 1) as f64);
        let xi = lo + (hi - lo) * t;
        let xj = x_profile.jet(xi);
        let yj = y0_profile.jet(xi);
        let resid = yj.d1 - riccati_rhs(n, xj.value, xj.d1, yj.value);
        let scale = T::one()
            .max(yj.d1.abs())
            .max(xj.value.abs() * xj.value.abs())
            .max(yj.value.abs() * yj.value.abs());
        if !(resid.abs() <= residual_tol * scale) {
            return Err(ReductionError::InvalidParticularSolution {
                xi: xi.approx_f64(),
                residual: resid.approx_f64(),
                tol: (residual_tol * scale).approx_f64(),
            });
        }
    }

    let field = |xi: T, y: &[T], dy: &mut [T]| {
        let x = x_profile.jet(xi).value;
        let y0 = y0_profile.jet(xi).value;
        dy[0] = T::one() + real::<T>(2.0) * (y0 + x) * y[0];
    };
    let opts = config.ode_options();
    let pole_events = || {
        vec![
            EventSpec::record_when(|_xi: T, y: &[T]| y[0]),
            EventSpec::record_when(|_xi: T, y: &[T]| -y[0]),
        ]
    };

    let mut poles = Vec::new();
    let mut run = |target: T| -> Result<Option<OdeSolution<T>>, ReductionError> {
        if target == xi0 {
            return Ok(None);
        }
        let sol = integrate(field, xi0, &[v0], target, &opts, &pole_events())?;
        if let Termination::MaxSteps { t } = sol.termination {
            return Err(ReductionError::StepBudgetExhausted {
                at: t.approx_f64(),
                lo: lo.approx_f64(),
                hi: hi.approx_f64(),
            });
        }
        poles.extend(sol.recorded_events.iter().map(|&(_, t)| t));
        Ok(Some(sol))
    };

    let right = run(hi)?;
    let left = run(lo)?;
    poles.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let domain = (
        left.as_ref().map_or(xi0, |s| s.span().1),
        right.as_ref().map_or(xi0, |s| s.span().1),
    );

    Ok(RiccatiFamily {
        x: x_profile,
        y0: y0_profile,
        xi0,
        v0,
        left,
        right,
        domain,
        poles,
    })
}

/// Residuals of the static vacuum system at `ξ`:
/// `(‖f·Ric_g − ∇²_g f‖_∞, |Δ_g f|)`. Both vanish exactly when the
/// spacetime is vacuum (μ = ρ = 0).
pub fn vacuum_residuals<T: Real>(
    spec: &SpacetimeSpec<T>,
    xi: T,
) -> Result<(T, T), ReductionError> {
    let phi = spec.phi_jet(xi)?;
    let f = spec.f_jet(xi)?;
    let ric = spatial_ricci(spec.signature(), spec.direction(), &phi)?;
    let hess = conformal_hessian_f(spec.signature(), spec.direction(), &phi, &f)?;
    let lap = conformal_laplacian_f(spec.signature(), spec.direction(), &phi, &f);
    let mut worst = T::zero();
    for i in 0..spec.n() {
        for j in 0..spec.n() {
            let d = (f.value * ric[(i, j)] - hess[(i, j)]).abs();
            worst = worst.max(d);
        }
    }
    Ok((worst, lap.abs()))
}

/// Sampled fluid fields over a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidFields<T> {
    pub xi: Vec<T>,
    pub mu: Vec<T>,
    pub rho: Vec<T>,
    pub dominant: Vec<bool>,
}

impl<T: Real> FluidFields<T> {
    /// Evaluate μ and ρ on `count` uniform samples of the spec's finite
    /// window (jets straight from the profiles, ρ in direct mode).
    pub fn sample(spec: &SpacetimeSpec<T>, count: usize) -> Result<Self, ReductionError> {
        let (lo, hi) = spec.finite_window();
        let n = spec.n();
        let w = spec.direction().norm2();
        let mut xi = Vec::with_capacity(count);
        let mut mu = Vec::with_capacity(count);
        let mut rho = Vec::with_capacity(count);
        let mut dominant = Vec::with_capacity(count);
        for k in 0..count {
            let t = real::<T>((k as f64 + 0.5) / count as f64);
            let s = lo + (hi - lo) * t;
            let pj = spec.phi_jet(s)?;
            let fj = spec.f_jet(s)?;
            let m = mu_of(n, w, &pj);
            let r = rho_of(n, w, &pj, &fj, RhoMode::Direct)?;
            xi.push(s);
            mu.push(m);
            rho.push(r);
            dominant.push(m > r.abs());
        }
        Ok(Self {
            xi,
            mu,
            rho,
            dominant,
        })
    }
}

/// Aggregate of an energy-condition scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyScan<T> {
    pub dominant_fraction: T,
    pub first_violation: Option<T>,
}

/// Fraction of samples with `μ > |ρ|` and the first sample violating it.
pub fn energy_condition_scan<T: Real>(fields: &FluidFields<T>) -> EnergyScan<T> {
    let total = fields.xi.len();
    let mut ok = 0usize;
    let mut first = None;
    for k in 0..total {
        if fields.dominant[k] {
            ok += 1;
        } else if first.is_none() {
            first = Some(fields.xi[k]);
        }
    }
    EnergyScan {
        dominant_fraction: if total == 0 {
            T::zero()
        } else {
            real(ok as f64 / total as f64)
        },
        first_violation: first,
    }
}
