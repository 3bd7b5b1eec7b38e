//! Geodesics of the static metric, with conserved-quantity monitoring.
//!
//! The metric is translation invariant orthogonal to `α` and time
//! independent, so along every geodesic `ĝ(ẋ,ẋ)` and the Killing energy
//! `E = f²ṫ` are constants; their numerical drift is the integrator's
//! own scorecard. [`completeness_probe`] fires seeded batches of causal
//! mixed initial conditions and reports how trajectories end. Completeness
//! is only ever probed: the strongest statement this module can make is
//! "no incompleteness observed up to the given affine span".

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{spatial_christoffel, ChristoffelTable, GeometryError, SpacetimeSpec};
use crate::ode::{integrate, EventSpec, OdeError, Termination};
use crate::real::{real, Real};
use crate::reduction::IntegratorConfig;

#[derive(Debug, Error, PartialEq)]
pub enum GeodesicError {
    #[error("initial position at xi = {xi} is outside the spacetime domain")]
    OutOfDomain { xi: f64 },
    #[error("state has {got} components, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("initial state contains a non-finite component")]
    NonFinite,
    #[error("probe needs at least one sample")]
    EmptyProbe,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// One point of a geodesic: `n` spatial coordinates plus `t`, the matching
/// velocities, and the affine parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicState<T> {
    pub position: Vec<T>,
    pub velocity: Vec<T>,
    pub lambda: T,
}

/// Derivative of a [`GeodesicState`] with respect to the affine parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDerivative<T> {
    pub d_position: Vec<T>,
    pub d_velocity: Vec<T>,
}

/// How a trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    /// Reached the end of the requested affine span.
    SpanComplete,
    /// Hit a profile floor, left the chart, or the step size collapsed.
    Singularity,
    /// Ran out of step budget before either of the above.
    StepFailure,
}

impl TerminationReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::SpanComplete => "span-complete",
            Self::Singularity => "singularity",
            Self::StepFailure => "step-failure",
        }
    }
}

/// An integrated geodesic sampled at the integrator's accepted nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real> {
    /// States ordered by strictly increasing `λ`.
    pub states: Vec<GeodesicState<T>>,
    /// Worst `|ĝ(ẋ,ẋ) − ĝ(ẋ,ẋ)₀| / max(1, |ĝ(ẋ,ẋ)₀|)` over the nodes.
    pub norm_drift: T,
    /// Worst drift of the Killing energy `E = f²ṫ`, same normalization.
    pub energy_drift: T,
    pub terminated: TerminationReason,
}

impl<T: Real> Trajectory<T> {
    pub fn end(&self) -> &GeodesicState<T> {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Full Christoffel table of `ĝ` at `ξ`: the spatial block of `g = δ/φ²`
/// plus the static-lapse terms `Γ^t_{tj} = α_j f′/f` and
/// `Γ^j_{tt} = f φ² ε_j α_j f′`. All other time components vanish.
pub fn spacetime_christoffel<T: Real>(
    spec: &SpacetimeSpec<T>,
    xi: T,
) -> Result<ChristoffelTable<T>, GeodesicError> {
    let n = spec.n();
    let phi = spec.phi_jet(xi)?;
    let f = spec.f_jet(xi)?;
    let spatial = spatial_christoffel(spec.signature(), spec.direction(), &phi)?;
    let mut table = ChristoffelTable::zeros(n + 1);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                table.set(k, i, j, spatial.get(k, i, j));
            }
        }
    }
    let alpha = spec.direction().alpha();
    let t = n;
    for j in 0..n {
        let dj_f = alpha[j] * f.d1;
        table.set(t, t, j, dj_f / f.value);
        table.set(t, j, t, dj_f / f.value);
        table.set(
            j,
            t,
            t,
            f.value * phi.value * phi.value * spec.signature().eps::<T>(j) * dj_f,
        );
    }
    Ok(table)
}

fn check_state<T: Real>(
    spec: &SpacetimeSpec<T>,
    state: &GeodesicState<T>,
) -> Result<(), GeodesicError> {
    let want = spec.n() + 1;
    for part in [&state.position, &state.velocity] {
        if part.len() != want {
            return Err(GeodesicError::DimensionMismatch {
                expected: want,
                got: part.len(),
            });
        }
        if part.iter().any(|v| !v.finite()) {
            return Err(GeodesicError::NonFinite);
        }
    }
    Ok(())
}

/// Right-hand side of the geodesic equation, from analytic Christoffels.
pub fn geodesic_rhs<T: Real>(
    spec: &SpacetimeSpec<T>,
    state: &GeodesicState<T>,
) -> Result<StateDerivative<T>, GeodesicError> {
    check_state(spec, state)?;
    let n = spec.n();
    let xi = spec.xi_of(&state.position[..n]);
    if !spec.contains(xi) {
        let (lo, hi) = spec.interval();
        return Err(GeodesicError::Geometry(GeometryError::OutOfDomain {
            xi: xi.approx_f64(),
            lo: lo.approx_f64(),
            hi: hi.approx_f64(),
        }));
    }
    let gamma = spacetime_christoffel(spec, xi)?;
    let dim = n + 1;
    let v = &state.velocity;
    let mut accel = vec![T::zero(); dim];
    for (a, out) in accel.iter_mut().enumerate() {
        let mut s = T::zero();
        for b in 0..dim {
            for c in 0..dim {
                s += gamma.get(a, b, c) * v[b] * v[c];
            }
        }
        *out = -s;
    }
    Ok(StateDerivative {
        d_position: v.clone(),
        d_velocity: accel,
    })
}

/// `ĝ(ẋ,ẋ) = Σ ε_i ẋᵢ²/φ² − f²ṫ²` at a state.
pub fn metric_norm<T: Real>(
    spec: &SpacetimeSpec<T>,
    state: &GeodesicState<T>,
) -> Result<T, GeodesicError> {
    let n = spec.n();
    let xi = spec.xi_of(&state.position[..n]);
    let phi = spec.phi_jet(xi)?.value;
    let f = spec.f_jet(xi)?.value;
    let mut s = T::zero();
    for i in 0..n {
        s += spec.signature().eps::<T>(i) * state.velocity[i] * state.velocity[i];
    }
    let tdot = state.velocity[n];
    Ok(s / (phi * phi) - f * f * tdot * tdot)
}

/// Killing energy `E = f²ṫ` of the static symmetry.
pub fn killing_energy<T: Real>(
    spec: &SpacetimeSpec<T>,
    state: &GeodesicState<T>,
) -> Result<T, GeodesicError> {
    let n = spec.n();
    let xi = spec.xi_of(&state.position[..n]);
    let f = spec.f_jet(xi)?.value;
    Ok(f * f * state.velocity[n])
}

fn drift<T: Real>(q0: T, q: T) -> T {
    (q - q0).abs() / T::one().max(q0.abs())
}

/// Integrate one geodesic over `lambda_span`, monitoring conserved
/// quantities at every accepted node.
///
/// Singular termination is a result, not an error: it is reported when
/// `φ` or `f` crosses `config.singularity_floor`, when the trajectory
/// leaves the configured interval, or when the adaptive step collapses
/// below `1e−3 · rel_tol · span`.
pub fn integrate_geodesic<T: Real>(
    spec: &SpacetimeSpec<T>,
    initial: &GeodesicState<T>,
    lambda_span: (T, T),
    config: &IntegratorConfig<T>,
) -> Result<Trajectory<T>, GeodesicError> {
    check_state(spec, initial)?;
    let n = spec.n();
    let xi0 = spec.xi_of(&initial.position[..n]);
    if !spec.contains(xi0) {
        return Err(GeodesicError::OutOfDomain {
            xi: xi0.approx_f64(),
        });
    }
    // Fails fast on floor violations at the starting point.
    geodesic_rhs(spec, initial)?;

    let dim = n + 1;
    let mut y0 = initial.position.clone();
    y0.extend_from_slice(&initial.velocity);

    let rhs = |_lam: T, y: &[T], dy: &mut [T]| {
        let state = GeodesicState {
            position: y[..dim].to_vec(),
            velocity: y[dim..].to_vec(),
            lambda: T::zero(),
        };
        match geodesic_rhs(spec, &state) {
            Ok(d) => {
                dy[..dim].copy_from_slice(&d.d_position);
                dy[dim..].copy_from_slice(&d.d_velocity);
            }
            Err(_) => dy.fill(real(f64::NAN)),
        }
    };

    let floor = config.singularity_floor;
    let phi_event = {
        let spec = spec.clone();
        move |_lam: T, y: &[T]| -> T {
            match spec.phi_jet(spec.xi_of(&y[..n])) {
                Ok(j) => j.value - floor,
                Err(_) => -T::one(),
            }
        }
    };
    let f_event = {
        let spec = spec.clone();
        move |_lam: T, y: &[T]| -> T {
            match spec.f_jet(spec.xi_of(&y[..n])) {
                Ok(j) => j.value - floor,
                Err(_) => -T::one(),
            }
        }
    };
    let (lo, hi) = spec.interval();
    let mut events = vec![
        EventSpec::stop_when(phi_event),
        EventSpec::stop_when(f_event),
    ];
    if lo.finite() {
        let spec2 = spec.clone();
        events.push(EventSpec::stop_when(move |_lam: T, y: &[T]| {
            spec2.xi_of(&y[..n]) - lo
        }));
    }
    if hi.finite() {
        let spec2 = spec.clone();
        events.push(EventSpec::stop_when(move |_lam: T, y: &[T]| {
            hi - spec2.xi_of(&y[..n])
        }));
    }

    let span = (lambda_span.1 - lambda_span.0).abs();
    let mut opts = config.ode_options();
    opts.min_step = Some(real::<T>(1e-3) * config.rel_tol * span);
    let sol = integrate(rhs, lambda_span.0, &y0, lambda_span.1, &opts, &events)?;

    let terminated = match sol.termination {
        Termination::Completed => TerminationReason::SpanComplete,
        Termination::Event { .. } | Termination::StepCollapse { .. } => {
            TerminationReason::Singularity
        }
        Termination::MaxSteps { .. } => TerminationReason::StepFailure,
    };

    let mut states = Vec::new();
    let mut norm_drift = T::zero();
    let mut energy_drift = T::zero();
    let mut q0: Option<(T, T)> = None;
    for lam in sol.nodes() {
        let y = sol.eval(lam);
        let state = GeodesicState {
            position: y[..dim].to_vec(),
            velocity: y[dim..].to_vec(),
            lambda: lam,
        };
        if let (Ok(nrm), Ok(e)) = (metric_norm(spec, &state), killing_energy(spec, &state)) {
            match q0 {
                None => q0 = Some((nrm, e)),
                Some((n0, e0)) => {
                    norm_drift = norm_drift.max(drift(n0, nrm));
                    energy_drift = energy_drift.max(drift(e0, e));
                }
            }
        }
        if states
            .last()
            .map(|s: &GeodesicState<T>| s.lambda < lam)
            .unwrap_or(true)
        {
            states.push(state);
        }
    }
    Ok(Trajectory {
        states,
        norm_drift,
        energy_drift,
        terminated,
    })
}

/// Aggregate outcome of a seeded batch of geodesics.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSummary<T> {
    pub sample_count: usize,
    pub seed: u64,
    pub span_complete_fraction: f64,
    pub singularity_fraction: f64,
    pub step_failure_fraction: f64,
    pub worst_norm_drift: T,
    pub worst_energy_drift: T,
}

/// Draw a spatial velocity and matching `ṫ` that realize the requested
/// causal class at `ξ₀`: `ĝ(ẋ,ẋ)` equals −1 (timelike), 0 (null) or +1
/// (spacelike). Spatial draws whose `δ`-square has the wrong sign are
/// rejected and redrawn.
fn sample_velocity<T: Real>(
    spec: &SpacetimeSpec<T>,
    rng: &mut ChaCha8Rng,
    xi0: T,
    class: usize,
) -> Result<Vec<T>, GeodesicError> {
    let n = spec.n();
    let phi = spec.phi_jet(xi0)?.value.approx_f64();
    let f = spec.f_jet(xi0)?.value.approx_f64();
    let eps: Vec<f64> = (0..n).map(|i| spec.signature().eps::<f64>(i)).collect();

    for attempt in 0..64 {
        let mut u: Vec<f64> = if attempt < 63 {
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
        } else {
            // Deterministic fallback along a spacelike axis.
            let j = eps.iter().position(|&e| e > 0.0).unwrap();
            let mut v = vec![0.0; n];
            v[j] = 1.0;
            v
        };
        let s: f64 = u.iter().zip(&eps).map(|(v, e)| e * v * v).sum();
        let (ratio, tdot2) = match class {
            0 => {
                // Timelike: rescale |S|/φ² to 1/2 when possible, then solve.
                if s.abs() > 1e-12 {
                    let c = phi * (0.5 / s.abs()).sqrt();
                    for v in &mut u {
                        *v *= c;
                    }
                }
                let s_over = if s.abs() > 1e-12 {
                    0.5 * s.signum()
                } else {
                    0.0
                };
                (s_over, (s_over + 1.0) / (f * f))
            }
            1 => {
                // Null: needs S > 0.
                if s <= 1e-12 {
                    continue;
                }
                let c = phi * (1.0 / s).sqrt();
                for v in &mut u {
                    *v *= c;
                }
                (1.0, 1.0 / (f * f))
            }
            _ => {
                // Spacelike: S/φ² = 2 leaves ĝ(ẋ,ẋ) = +1.
                if s <= 1e-12 {
                    continue;
                }
                let c = phi * (2.0 / s).sqrt();
                for v in &mut u {
                    *v *= c;
                }
                (2.0, 1.0 / (f * f))
            }
        };
        debug_assert!(ratio.is_finite());
        if tdot2 < 0.0 {
            continue;
        }
        let mut vel: Vec<T> = u.into_iter().map(real::<T>).collect();
        vel.push(real(tdot2.sqrt()));
        return Ok(vel);
    }
    unreachable!("fallback draw always succeeds");
}

/// Fire `sample_count` seeded geodesics over `λ ∈ [0, lambda_max]` and
/// aggregate terminations and worst conserved-quantity drifts.
///
/// Anchors are drawn from the middle 60% of the finite window, with a
/// random translation orthogonal to `α` (which the metric cannot see);
/// causal classes cycle timelike, null, spacelike.
pub fn completeness_probe<T: Real>(
    spec: &SpacetimeSpec<T>,
    sample_count: usize,
    lambda_max: T,
    seed: u64,
    config: &IntegratorConfig<T>,
) -> Result<ProbeSummary<T>, GeodesicError> {
    if sample_count == 0 {
        return Err(GeodesicError::EmptyProbe);
    }
    let n = spec.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (wlo, whi) = spec.finite_window();
    let (wlo, whi) = (wlo.approx_f64(), whi.approx_f64());
    let (mlo, mhi) = (wlo + 0.2 * (whi - wlo), whi - 0.2 * (whi - wlo));
    let alpha: Vec<f64> = spec
        .direction()
        .alpha()
        .iter()
        .map(|a| a.approx_f64())
        .collect();
    let alpha_sq: f64 = alpha.iter().map(|a| a * a).sum();

    let mut complete = 0usize;
    let mut singular = 0usize;
    let mut failed = 0usize;
    let mut worst_norm = T::zero();
    let mut worst_energy = T::zero();

    for k in 0..sample_count {
        let xi0 = real::<T>(rng.random_range(mlo..mhi));
        let velocity = sample_velocity(spec, &mut rng, xi0, k % 3)?;
        let mut x = spec.spatial_point_at(xi0);
        // Random offset projected orthogonal to α: ξ is unchanged.
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let along: f64 = raw.iter().zip(&alpha).map(|(r, a)| r * a).sum();
        for i in 0..n {
            x[i] += real::<T>(raw[i] - along * alpha[i] / alpha_sq);
        }
        let mut position = x;
        position.push(T::zero());
        let initial = GeodesicState {
            position,
            velocity,
            lambda: T::zero(),
        };
        let traj = integrate_geodesic(spec, &initial, (T::zero(), lambda_max), config)?;
        match traj.terminated {
            TerminationReason::SpanComplete => complete += 1,
            TerminationReason::Singularity => singular += 1,
            TerminationReason::StepFailure => failed += 1,
        }
        worst_norm = worst_norm.max(traj.norm_drift);
        worst_energy = worst_energy.max(traj.energy_drift);
    }
    let total = sample_count as f64;
    Ok(ProbeSummary {
        sample_count,
        seed,
        span_complete_fraction: complete as f64 / total,
        singularity_fraction: singular as f64 / total,
        step_failure_fraction: failed as f64 / total,
        worst_norm_drift: worst_norm,
        worst_energy_drift: worst_energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::geometry::{Direction, FnProfile, Jet2, Signature};
    use crate::verifier::numeric_christoffel;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::sync::Arc;

    fn flat_spec() -> SpacetimeSpec<f64> {
        let sig = Signature::euclidean(3).unwrap();
        let dir = Direction::new(&sig, vec![0.0, 0.0, 1.0]).unwrap();
        let one: Arc<dyn crate::geometry::Profile<f64>> = Arc::new(FnProfile::new(
            (f64::NEG_INFINITY, f64::INFINITY),
            |_xi: f64| Jet2::new(1.0, 0.0, 0.0),
        ));
        SpacetimeSpec::new(
            sig,
            dir,
            Arc::clone(&one),
            one,
            (f64::NEG_INFINITY, f64::INFINITY),
        )
        .unwrap()
    }

    fn example1_spec(interval: (f64, f64)) -> SpacetimeSpec<f64> {
        catalog::example1(3, 1.0f64, 1.0, 0.0)
            .unwrap()
            .spacetime(
                Signature::euclidean(3).unwrap(),
                vec![0.0, 0.0, 1.0],
                Some(interval),
            )
            .unwrap()
    }

    fn example2_lightlike_spec() -> SpacetimeSpec<f64> {
        // φ = e^ξ sinks under the positivity floor near ξ ≈ −27, so the
        // chart is generous upward and clipped below.
        let sig = Signature::parse("++-").unwrap();
        catalog::example2(3)
            .unwrap()
            .spacetime(sig, vec![1.0, 0.0, 1.0], Some((-25.0, 600.0)))
            .unwrap()
    }

    #[test]
    fn flat_spec_runs_straight() {
        let spec = flat_spec();
        let initial = GeodesicState {
            position: vec![0.0, 0.0, 0.0, 0.0],
            velocity: vec![0.3, -0.1, 0.7, 1.2],
            lambda: 0.0,
        };
        let traj = integrate_geodesic(&spec, &initial, (0.0, 10.0), &Default::default()).unwrap();
        assert_eq!(traj.terminated, TerminationReason::SpanComplete);
        assert_eq!(traj.norm_drift, 0.0);
        assert_eq!(traj.energy_drift, 0.0);
        let end = traj.end();
        for i in 0..4 {
            assert_abs_diff_eq!(
                end.position[i],
                initial.velocity[i] * 10.0,
                epsilon = 1e-9
            );
            assert_abs_diff_eq!(end.velocity[i], initial.velocity[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn flat_probe_is_fully_complete() {
        let spec = flat_spec();
        let summary =
            completeness_probe(&spec, 30, 100.0, 42, &Default::default()).unwrap();
        assert_eq!(summary.span_complete_fraction, 1.0);
        assert_eq!(summary.singularity_fraction, 0.0);
        assert!(summary.worst_norm_drift < 1e-12);
        assert!(summary.worst_energy_drift < 1e-12);
    }

    #[test]
    fn orthogonal_motion_at_critical_point_is_straight() {
        // φ = cos ξ has φ′(0) = 0 and the lapse of this family has
        // f′(0) = 0, so motion orthogonal to α from ξ = 0 sees no force.
        let entry = catalog::example4(0.0f64, 1.0, 1.0).unwrap();
        let spec = entry
            .spacetime(
                Signature::euclidean(3).unwrap(),
                vec![0.0, 0.0, 1.0],
                None,
            )
            .unwrap();
        let initial = GeodesicState {
            position: vec![0.0, 0.0, 0.0, 0.0],
            velocity: vec![0.8, 0.0, 0.0, 0.0],
            lambda: 0.0,
        };
        let traj = integrate_geodesic(&spec, &initial, (0.0, 5.0), &Default::default()).unwrap();
        assert_eq!(traj.terminated, TerminationReason::SpanComplete);
        let end = traj.end();
        assert_abs_diff_eq!(end.position[0], 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(end.position[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(end.velocity[0], 0.8, epsilon = 1e-11);
        assert!(traj.norm_drift < 1e-11);
    }

    #[test]
    fn analytic_christoffel_matches_numeric_oracle() {
        use rand::Rng;
        let spec = example1_spec((0.5, 8.0));
        let metric = |p: &[f64]| spec.static_metric_at(p);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let xi = rng.random_range(1.0..6.0);
            let analytic = spacetime_christoffel(&spec, xi).unwrap();
            let mut p4 = spec.spatial_point_at(xi);
            p4.push(0.0);
            let numeric = numeric_christoffel(&metric, &p4, 1e-4, false).unwrap();
            assert!(
                analytic.max_abs_diff(&numeric) < 1e-6,
                "xi = {xi}: diff {}",
                analytic.max_abs_diff(&numeric)
            );
        }
    }

    #[test]
    fn ingoing_geodesic_hits_the_singular_end() {
        let spec = example1_spec((0.05, 50.0));
        let initial = GeodesicState {
            position: vec![0.0, 0.0, 1.0, 0.0],
            velocity: vec![0.0, 0.0, -1.0, 0.0],
            lambda: 0.0,
        };
        let traj = integrate_geodesic(&spec, &initial, (0.0, 50.0), &Default::default()).unwrap();
        assert_eq!(traj.terminated, TerminationReason::Singularity);
        let end = traj.end();
        assert!(end.lambda < 50.0, "terminated at {}", end.lambda);
        assert!(end.position[2] < 0.06, "stopped at xi = {}", end.position[2]);
    }

    #[test]
    fn lightlike_alpha_reduces_to_the_exact_riccati_flow() {
        // With ‖α‖² = 0 every geodesic obeys ξ̈ = 2(φ′/φ)ξ̇², which for
        // φ = e^ξ integrates to ξ̇ = ξ̇₀/(1 − 2ξ̇₀λ).
        let spec = example2_lightlike_spec();
        let xidot0 = -0.3;
        let initial = GeodesicState {
            position: vec![0.0, 0.0, 0.0, 0.0],
            velocity: vec![xidot0 / 2.0, 0.0, xidot0 / 2.0, 0.0],
            lambda: 0.0,
        };
        let config = IntegratorConfig {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            ..Default::default()
        };
        let traj = integrate_geodesic(&spec, &initial, (0.0, 40.0), &config).unwrap();
        assert_eq!(traj.terminated, TerminationReason::SpanComplete);
        for state in traj.states.iter().step_by(5) {
            let lam: f64 = state.lambda;
            let xi = spec.xi_of(&state.position[..3]);
            let want = -0.5 * (1.0 - 2.0 * xidot0 * lam).ln();
            assert_abs_diff_eq!(xi, want, epsilon = 1e-7);
        }
        assert!(traj.norm_drift < 1e-9);
    }

    #[test]
    fn lightlike_alpha_blows_up_at_the_predicted_parameter() {
        // Outgoing sign: ξ̇ = ξ̇₀/(1 − 2ξ̇₀λ) diverges at λ* = 1/(2ξ̇₀).
        let spec = example2_lightlike_spec();
        let xidot0 = 0.5;
        let initial = GeodesicState {
            position: vec![0.0, 0.0, 0.0, 0.0],
            velocity: vec![xidot0 / 2.0, 0.0, xidot0 / 2.0, 0.0],
            lambda: 0.0,
        };
        let traj =
            integrate_geodesic(&spec, &initial, (0.0, 10.0), &Default::default()).unwrap();
        assert_eq!(traj.terminated, TerminationReason::Singularity);
        let lam_star = 1.0 / (2.0 * xidot0);
        assert_relative_eq!(traj.end().lambda, lam_star, max_relative = 1e-2);
    }

    #[test]
    fn conserved_quantities_hold_on_a_generic_trajectory() {
        let spec = example1_spec((0.5, 60.0));
        let config = IntegratorConfig::<f64>::default();
        let initial = GeodesicState {
            position: vec![0.2, -0.4, 2.0, 0.0],
            velocity: vec![0.3, 0.1, 0.25, 0.9],
            lambda: 0.0,
        };
        let span = 20.0;
        let traj = integrate_geodesic(&spec, &initial, (0.0, span), &config).unwrap();
        assert_eq!(traj.terminated, TerminationReason::SpanComplete);
        let budget = 10.0 * config.rel_tol * span;
        assert!(traj.norm_drift < budget, "norm drift {}", traj.norm_drift);
        assert!(
            traj.energy_drift < budget,
            "energy drift {}",
            traj.energy_drift
        );
    }

    #[test]
    fn time_reversal_returns_home() {
        let spec = example1_spec((0.5, 60.0));
        let config = IntegratorConfig::<f64>::default();
        let initial = GeodesicState {
            position: vec![0.0, 0.0, 2.0, 0.0],
            velocity: vec![0.2, -0.3, 0.4, 0.8],
            lambda: 0.0,
        };
        let fwd = integrate_geodesic(&spec, &initial, (0.0, 6.0), &config).unwrap();
        assert_eq!(fwd.terminated, TerminationReason::SpanComplete);
        let turn = fwd.end();
        let back = GeodesicState {
            position: turn.position.clone(),
            velocity: turn.velocity.iter().map(|v| -v).collect(),
            lambda: 0.0,
        };
        let bwd = integrate_geodesic(&spec, &back, (0.0, 6.0), &config).unwrap();
        let home = bwd.end();
        let tol = 100.0 * config.rel_tol;
        for i in 0..4 {
            assert_abs_diff_eq!(home.position[i], initial.position[i], epsilon = tol);
            assert_abs_diff_eq!(home.velocity[i], -initial.velocity[i], epsilon = tol);
        }
    }

    #[test]
    fn probe_is_deterministic_and_mixes_classes() {
        let spec = example1_spec((0.5, 60.0));
        let a = completeness_probe(&spec, 12, 5.0, 42, &Default::default()).unwrap();
        let b = completeness_probe(&spec, 12, 5.0, 42, &Default::default()).unwrap();
        assert_eq!(a, b);
        let c = completeness_probe(&spec, 12, 5.0, 43, &Default::default()).unwrap();
        assert_ne!(a.worst_norm_drift, c.worst_norm_drift);
    }

    #[test]
    fn probe_sees_example1_singularities() {
        // Narrow chart: proper distances scale like ξ², so exits happen
        // well inside the affine budget.
        let spec = example1_spec((0.05, 8.0));
        let summary =
            completeness_probe(&spec, 30, 500.0, 42, &Default::default()).unwrap();
        assert!(
            summary.singularity_fraction > 0.0,
            "fractions: {summary:?}"
        );
    }

    #[test]
    fn immediate_domain_violation_is_an_error() {
        let spec = example1_spec((1.0, 5.0));
        let initial = GeodesicState {
            position: vec![0.0, 0.0, 7.0, 0.0],
            velocity: vec![0.0, 0.0, 1.0, 0.0],
            lambda: 0.0,
        };
        let res = integrate_geodesic(&spec, &initial, (0.0, 1.0), &Default::default());
        assert!(matches!(res, Err(GeodesicError::OutOfDomain { .. })));
        let short = GeodesicState {
            position: vec![0.0, 0.0, 0.0],
            velocity: vec![0.0, 0.0, 1.0],
            lambda: 0.0,
        };
        let res = integrate_geodesic(&spec, &short, (0.0, 1.0), &Default::default());
        assert!(matches!(res, Err(GeodesicError::DimensionMismatch { .. })));
    }

    #[test]
    fn probed_initials_realize_their_causal_class() {
        let spec = example1_spec((0.5, 60.0));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for class in 0..3 {
            let vel = sample_velocity(&spec, &mut rng, 2.0, class).unwrap();
            let state = GeodesicState {
                position: {
                    let mut p = spec.spatial_point_at(2.0);
                    p.push(0.0);
                    p
                },
                velocity: vel,
                lambda: 0.0,
            };
            let want = [-1.0, 0.0, 1.0][class];
            assert_abs_diff_eq!(
                metric_norm(&spec, &state).unwrap(),
                want,
                epsilon = 1e-12
            );
        }
    }
}
