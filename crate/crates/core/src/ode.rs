//! Adaptive Dormand-Prince 5(4) integration with dense output and events.
//!
//! The solver keeps the classic quartic interpolant per accepted step, so
//! solutions can be sampled (with first derivatives) anywhere in the covered
//! span. Events are scalar functions of `(t, y)` watched for downward zero
//! crossings at step boundaries and localized by bisection on the dense
//! interpolant; an event either stops the integration or is just recorded.
//! A fixed-step classical RK4 driver is provided as a fallback.

use thiserror::Error;

use crate::real::{real, Real};

#[derive(Debug, Error, PartialEq)]
pub enum OdeError {
    #[error("initial state must be finite")]
    NonFiniteInitial,
    #[error("empty integration span")]
    EmptySpan,
    #[error("state dimension must be nonzero")]
    EmptyState,
}

/// Tolerances and budget for one integration run.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Largest step magnitude; `None` means a tenth of the span.
    pub max_step: Option<T>,
    pub max_steps: usize,
    /// Initial step magnitude; `None` picks a heuristic.
    pub first_step: Option<T>,
    /// Step magnitude below which the run stops with
    /// [`Termination::StepCollapse`]; `None` uses `1e-14` of the span.
    pub min_step: Option<T>,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self {
            rel_tol: real(1e-10),
            abs_tol: real(1e-12),
            max_step: None,
            max_steps: 100_000,
            first_step: None,
            min_step: None,
        }
    }
}

/// What to do when an event function crosses zero from above.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventAction {
    Stop,
    Record,
}

/// Scalar event watched along the solution.
pub struct EventSpec<T> {
    pub func: Box<dyn Fn(T, &[T]) -> T + Send + Sync>,
    pub action: EventAction,
}

impl<T> EventSpec<T> {
    pub fn stop_when(func: impl Fn(T, &[T]) -> T + Send + Sync + 'static) -> Self {
        Self {
            func: Box::new(func),
            action: EventAction::Stop,
        }
    }

    pub fn record_when(func: impl Fn(T, &[T]) -> T + Send + Sync + 'static) -> Self {
        Self {
            func: Box::new(func),
            action: EventAction::Record,
        }
    }
}

/// Why an integration run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination<T> {
    /// Reached the end of the requested span.
    Completed,
    /// A `Stop` event fired; payload is the event index and location.
    Event { index: usize, t: T },
    /// Step size collapsed below the resolution floor.
    StepCollapse { t: T },
    /// Step budget exhausted before reaching the end.
    MaxSteps { t: T },
}

/// One accepted step with its dense-output coefficients.
#[derive(Debug, Clone)]
struct Segment<T> {
    t0: T,
    h: T,
    // Quartic interpolant in θ = (t − t0)/h:
    // y(θ) = r1 + θ r2 + θ(1−θ) r3 + θ²(1−θ) r4 + θ²(1−θ)² r5
    r: [Vec<T>; 5],
}

impl<T: Real> Segment<T> {
    fn eval_into(&self, t: T, y: &mut [T]) {
        let th = (t - self.t0) / self.h;
        let om = T::one() - th;
        for (i, out) in y.iter_mut().enumerate() {
            *out = self.r[0][i]
                + th * (self.r[1][i] + om * (self.r[2][i] + th * (self.r[3][i] + om * self.r[4][i])));
        }
    }

    fn eval_deriv_into(&self, t: T, dy: &mut [T]) {
        let th = (t - self.t0) / self.h;
        let one = T::one();
        let two = real::<T>(2.0);
        let three = real::<T>(3.0);
        let four = real::<T>(4.0);
        let six = real::<T>(6.0);
        // d/dθ of the quartic above.
        let c2 = one - two * th;
        let c3 = two * th - three * th * th;
        let c4 = two * th - six * th * th + four * th * th * th;
        for (i, out) in dy.iter_mut().enumerate() {
            *out = (self.r[1][i] + c2 * self.r[2][i] + c3 * self.r[3][i] + c4 * self.r[4][i])
                / self.h;
        }
    }
}

/// Dense solution of one initial value problem.
pub struct OdeSolution<T> {
    dim: usize,
    t_start: T,
    t_end: T,
    end_state: Vec<T>,
    segments: Vec<Segment<T>>,
    pub termination: Termination<T>,
    /// `(event index, t)` for every `Record` event crossing.
    pub recorded_events: Vec<(usize, T)>,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

impl<T: Real> OdeSolution<T> {
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// First and last covered parameter values (in integration order).
    #[inline]
    pub fn span(&self) -> (T, T) {
        (self.t_start, self.t_end)
    }

    #[inline]
    pub fn end_state(&self) -> &[T] {
        &self.end_state
    }

    pub fn contains(&self, t: T) -> bool {
        let (a, b) = self.span();
        if a <= b {
            t >= a && t <= b
        } else {
            t <= a && t >= b
        }
    }

    /// Accepted step nodes, endpoints included, in integration order.
    pub fn nodes(&self) -> Vec<T> {
        let mut out: Vec<T> = self.segments.iter().map(|s| s.t0).collect();
        out.push(self.t_end);
        out
    }

    fn segment_for(&self, t: T) -> &Segment<T> {
        // Binary search over monotone segment starts (either direction).
        let forward = self.t_end >= self.t_start;
        let mut lo = 0usize;
        let mut hi = self.segments.len() - 1;
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            let starts_before = if forward {
                self.segments[mid].t0 <= t
            } else {
                self.segments[mid].t0 >= t
            };
            if starts_before {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        &self.segments[lo]
    }

    /// Interpolated state at `t` inside the covered span.
    pub fn eval(&self, t: T) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim];
        self.segment_for(t).eval_into(t, &mut y);
        y
    }

    /// Interpolated state and its `t`-derivative.
    pub fn eval_with_deriv(&self, t: T) -> (Vec<T>, Vec<T>) {
        let mut y = vec![T::zero(); self.dim];
        let mut dy = vec![T::zero(); self.dim];
        let seg = self.segment_for(t);
        seg.eval_into(t, &mut y);
        seg.eval_deriv_into(t, &mut dy);
        (y, dy)
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
// Error coefficients (5th minus embedded 4th order weights).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense output coefficients.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrate `dy/dt = rhs(t, y)` from `t0` to `t_end` (either direction).
///
/// The right-hand side writes the derivative into its third argument; it may
/// fill non-finite values to signal an invalid region, which rejects the step
/// and shrinks it (collapsing to a [`Termination::StepCollapse`] at a hard
/// boundary).
pub fn integrate<T: Real>(
    rhs: impl Fn(T, &[T], &mut [T]),
    t0: T,
    y0: &[T],
    t_end: T,
    opts: &OdeOptions<T>,
    events: &[EventSpec<T>],
) -> Result<OdeSolution<T>, OdeError> {
    if y0.is_empty() {
        return Err(OdeError::EmptyState);
    }
    if y0.iter().any(|v| !v.finite()) {
        return Err(OdeError::NonFiniteInitial);
    }
    if t_end == t0 {
        return Err(OdeError::EmptySpan);
    }

    let dim = y0.len();
    let dir = if t_end > t0 { T::one() } else { -T::one() };
    let span = (t_end - t0).abs();
    let max_step = opts.max_step.unwrap_or(span / real(10.0)).abs();
    let mut h = opts
        .first_step
        .unwrap_or(span * real(1e-3))
        .abs()
        .min(max_step)
        .max(span * real(1e-12));
    let h_floor = opts
        .min_step
        .unwrap_or_else(|| span * real::<T>(1e-14) + real::<T>(1e-300));

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: [Vec<T>; 7] = core::array::from_fn(|_| vec![T::zero(); dim]);
    rhs(t, &y, &mut k[0]);
    if k[0].iter().any(|v| !v.finite()) {
        return Err(OdeError::NonFiniteInitial);
    }

    let mut event_sign: Vec<T> = events.iter().map(|e| (e.func)(t, &y)).collect();
    let mut segments: Vec<Segment<T>> = Vec::new();
    let mut recorded = Vec::new();
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut y_stage = vec![T::zero(); dim];
    let mut y_new = vec![T::zero(); dim];

    let termination = 'outer: loop {
        if accepted + rejected >= opts.max_steps {
            break Termination::MaxSteps { t };
        }
        let remaining = (t_end - t) * dir;
        if remaining <= T::zero() {
            break Termination::Completed;
        }
        let h_eff = h.min(remaining).min(max_step);
        if h_eff < h_floor {
            break Termination::StepCollapse { t };
        }
        let hs = h_eff * dir;

        // Seven stages (FSAL: k7 is the derivative at the new point).
        let stages: [(&[f64], f64); 6] = [
            (&[A21], C2),
            (&[A31, A32], C3),
            (&[A41, A42, A43], C4),
            (&[A51, A52, A53, A54], C5),
            (&[A61, A62, A63, A64, A65], 1.0),
            (&[A71, 0.0, A73, A74, A75, A76], 1.0),
        ];
        for (s, (coeffs, c)) in stages.iter().enumerate() {
            for i in 0..dim {
                let mut acc = T::zero();
                for (j, &a) in coeffs.iter().enumerate() {
                    if a != 0.0 {
                        acc += real::<T>(a) * k[j][i];
                    }
                }
                y_stage[i] = y[i] + hs * acc;
            }
            rhs(t + real::<T>(*c) * hs, &y_stage, &mut k[s + 1]);
        }
        y_new.copy_from_slice(&y_stage); // stage 7 state is the 5th order result

        // Embedded error estimate.
        let mut err_acc = T::zero();
        let mut bad = false;
        for i in 0..dim {
            let e = hs
                * (real::<T>(E1) * k[0][i]
                    + real::<T>(E3) * k[2][i]
                    + real::<T>(E4) * k[3][i]
                    + real::<T>(E5) * k[4][i]
                    + real::<T>(E6) * k[5][i]
                    + real::<T>(E7) * k[6][i]);
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            let r = e / scale;
            if !r.finite() || !y_new[i].finite() {
                bad = true;
                break;
            }
            err_acc += r * r;
        }
        let err = if bad {
            real::<T>(f64::INFINITY)
        } else {
            (err_acc / real(dim as f64)).sqrt()
        };

        if err > T::one() {
            rejected += 1;
            let shrink = if bad {
                real::<T>(0.1)
            } else {
                (real::<T>(0.9) * err.powf(real(-0.2))).max(real(0.2))
            };
            h = h_eff * shrink;
            if h < h_floor {
                break Termination::StepCollapse { t };
            }
            continue;
        }

        // Accept: build the dense interpolant.
        let mut r = [
            vec![T::zero(); dim],
            vec![T::zero(); dim],
            vec![T::zero(); dim],
            vec![T::zero(); dim],
            vec![T::zero(); dim],
        ];
        for i in 0..dim {
            let ydiff = y_new[i] - y[i];
            let bspl = hs * k[0][i] - ydiff;
            r[0][i] = y[i];
            r[1][i] = ydiff;
            r[2][i] = bspl;
            r[3][i] = ydiff - hs * k[6][i] - bspl;
            r[4][i] = hs
                * (real::<T>(D1) * k[0][i]
                    + real::<T>(D3) * k[2][i]
                    + real::<T>(D4) * k[3][i]
                    + real::<T>(D5) * k[4][i]
                    + real::<T>(D6) * k[5][i]
                    + real::<T>(D7) * k[6][i]);
        }
        let segment = Segment { t0: t, h: hs, r };
        let t_new = t + hs;
        accepted += 1;

        // Event scan on this step.
        let mut stop_at: Option<(usize, T)> = None;
        for (idx, ev) in events.iter().enumerate() {
            let g_new = (ev.func)(t_new, &y_new);
            if event_sign[idx] > T::zero() && g_new <= T::zero() {
                // Bisect the crossing on the dense interpolant.
                let mut lo = t;
                let mut hi = t_new;
                let mut buf = vec![T::zero(); dim];
                for _ in 0..80 {
                    let mid = (lo + hi) / real(2.0);
                    segment.eval_into(mid, &mut buf);
                    if (ev.func)(mid, &buf) > T::zero() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                match ev.action {
                    EventAction::Stop => {
                        let better = stop_at.is_none_or(|(_, tb)| (hi - t) * dir < (tb - t) * dir);
                        if better {
                            stop_at = Some((idx, hi));
                        }
                    }
                    EventAction::Record => recorded.push((idx, hi)),
                }
            }
            event_sign[idx] = g_new;
        }

        segments.push(segment);
        if let Some((idx, t_ev)) = stop_at {
            let y_ev = {
                let mut buf = vec![T::zero(); dim];
                segments.last().unwrap().eval_into(t_ev, &mut buf);
                buf
            };
            y = y_ev;
            t = t_ev;
            break 'outer Termination::Event { index: idx, t: t_ev };
        }

        y.copy_from_slice(&y_new);
        k.swap(0, 6); // FSAL
        t = t_new;

        let grow = (real::<T>(0.9) * err.max(real(1e-10)).powf(real(-0.2)))
            .min(real(5.0))
            .max(real(0.2));
        h = (h_eff * grow).min(max_step);
    };

    if segments.is_empty() {
        // No step accepted; degenerate solution covering a single point.
        segments.push(Segment {
            t0,
            h: dir * h_floor.max(real(1e-300)),
            r: [
                y.clone(),
                vec![T::zero(); dim],
                vec![T::zero(); dim],
                vec![T::zero(); dim],
                vec![T::zero(); dim],
            ],
        });
    }

    Ok(OdeSolution {
        dim,
        t_start: t0,
        t_end: t,
        end_state: y,
        segments,
        termination,
        recorded_events: recorded,
        steps_accepted: accepted,
        steps_rejected: rejected,
    })
}

/// Classical fixed-step RK4; returns the nodes and states.
pub fn integrate_rk4<T: Real>(
    rhs: impl Fn(T, &[T], &mut [T]),
    t0: T,
    y0: &[T],
    t_end: T,
    steps: usize,
) -> (Vec<T>, Vec<Vec<T>>) {
    let dim = y0.len();
    let h = (t_end - t0) / real(steps as f64);
    let mut ts = Vec::with_capacity(steps + 1);
    let mut ys = Vec::with_capacity(steps + 1);
    let mut t = t0;
    let mut y = y0.to_vec();
    ts.push(t);
    ys.push(y.clone());
    let mut k1 = vec![T::zero(); dim];
    let mut k2 = vec![T::zero(); dim];
    let mut k3 = vec![T::zero(); dim];
    let mut k4 = vec![T::zero(); dim];
    let mut tmp = vec![T::zero(); dim];
    let half = real::<T>(0.5);
    let sixth = real::<T>(1.0 / 6.0);
    let two = real::<T>(2.0);
    for _ in 0..steps {
        rhs(t, &y, &mut k1);
        for i in 0..dim {
            tmp[i] = y[i] + half * h * k1[i];
        }
        rhs(t + half * h, &tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = y[i] + half * h * k2[i];
        }
        rhs(t + half * h, &tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = y[i] + h * k3[i];
        }
        rhs(t + h, &tmp, &mut k4);
        for i in 0..dim {
            y[i] += h * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        t += h;
        ts.push(t);
        ys.push(y.clone());
    }
    (ts, ys)
}
