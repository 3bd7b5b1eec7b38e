//! Closed-form geometry of conformally flat, translation-invariant metrics.
//!
//! The spatial metric is `g = δ/φ²` on an open subset of `Rⁿ`, where `δ` is a
//! pseudo-Euclidean metric with signature entries `ε_i = ±1` and the conformal
//! factor `φ` depends on the single variable `ξ = α·x` for a fixed nonzero
//! direction `α`. All curvature quantities then reduce to expressions in the
//! 2-jet `(φ, φ′, φ″)` at a point, which this module provides explicitly.
//!
//! The static extension `ĝ = g − f² dt²` is evaluated by [`SpacetimeSpec`].

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::real::{real, Real};

/// Positivity threshold for conformal factors and lapses.
///
/// Values at or below this are treated as a degenerate metric rather than fed
/// into divisions.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("dimension must be at least 3, got {0}")]
    DimensionTooSmall(usize),
    #[error("signature needs at least one +1 entry")]
    NoPositiveEntry,
    #[error("signature entries must be +1 or -1, got {0}")]
    BadSignatureEntry(i8),
    #[error("direction vector must be nonzero")]
    ZeroDirection,
    #[error("expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("conformal factor must be positive, got {0}")]
    NonPositivePhi(f64),
    #[error("lapse must be positive, got {0}")]
    NonPositiveLapse(f64),
    #[error("xi = {xi} outside the open interval ({lo}, {hi})")]
    OutOfDomain { xi: f64, lo: f64, hi: f64 },
    #[error("interval ({lo}, {hi}) is empty")]
    EmptyInterval { lo: f64, hi: f64 },
    #[error("profile not positive on the requested interval near xi = {0}")]
    ProfileNotPositive(f64),
}

/// Signature of the flat background metric `δ = Σ ε_i dx_i ⊗ dx_i`.
///
/// At least one entry must be `+1`; dimension is at least 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    eps: Vec<i8>,
}

impl Signature {
    pub fn new(eps: Vec<i8>) -> Result<Self, GeometryError> {
        if eps.len() < 3 {
            return Err(GeometryError::DimensionTooSmall(eps.len()));
        }
        for &e in &eps {
            if e != 1 && e != -1 {
                return Err(GeometryError::BadSignatureEntry(e));
            }
        }
        if !eps.contains(&1) {
            return Err(GeometryError::NoPositiveEntry);
        }
        Ok(Self { eps })
    }

    /// All-plus (Riemannian) signature in dimension `n`.
    pub fn euclidean(n: usize) -> Result<Self, GeometryError> {
        Self::new(vec![1; n])
    }

    /// Parse a pattern like `"+++"` or `"-++"`.
    pub fn parse(pattern: &str) -> Result<Self, GeometryError> {
        let eps = pattern
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(GeometryError::BadSignatureEntry(0)),
            })
            .collect::<Result<Vec<i8>, _>>()?;
        Self::new(eps)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.eps.len()
    }

    #[inline]
    pub fn entries(&self) -> &[i8] {
        &self.eps
    }

    /// `ε_i` as a scalar.
    #[inline]
    pub fn eps<T: Real>(&self, i: usize) -> T {
        real(f64::from(self.eps[i]))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &e in &self.eps {
            write!(w, "{}", if e > 0 { '+' } else { '-' })?;
        }
        Ok(())
    }
}

/// Causal character of a direction with respect to `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalCharacter {
    Timelike,
    Lightlike,
    Spacelike,
}

/// Nonzero translation-invariance direction `α`, with `‖α‖² = Σ ε_k α_k²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction<T: Real> {
    alpha: Vec<T>,
    norm2: T,
}

impl<T: Real> Direction<T> {
    pub fn new(signature: &Signature, alpha: Vec<T>) -> Result<Self, GeometryError> {
        if alpha.len() != signature.n() {
            return Err(GeometryError::DimensionMismatch {
                expected: signature.n(),
                got: alpha.len(),
            });
        }
        if alpha.iter().all(|a| *a == T::zero()) {
            return Err(GeometryError::ZeroDirection);
        }
        let norm2 = alpha_norm2(signature, &alpha);
        Ok(Self { alpha, norm2 })
    }

    #[inline]
    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    #[inline]
    pub fn norm2(&self) -> T {
        self.norm2
    }

    /// Sign of `‖α‖²` classifies the direction.
    pub fn causal_character(&self) -> CausalCharacter {
        if self.norm2 == T::zero() {
            CausalCharacter::Lightlike
        } else if self.norm2 < T::zero() {
            CausalCharacter::Timelike
        } else {
            CausalCharacter::Spacelike
        }
    }

    /// `ξ = α·x` for a spatial point.
    pub fn xi(&self, x: &[T]) -> T {
        self.alpha
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (a, xi)| acc + *a * *xi)
    }

    /// Rescale so that `‖α‖²` becomes `target` (same sign required).
    pub fn rescaled_to(&self, signature: &Signature, target: T) -> Option<Self> {
        if self.norm2 == T::zero() || target * self.norm2 <= T::zero() {
            return None;
        }
        let c = (target / self.norm2).sqrt();
        let alpha = self.alpha.iter().map(|a| *a * c).collect();
        Direction::new(signature, alpha).ok()
    }
}

/// `Σ ε_k α_k²` for a raw component slice.
pub fn alpha_norm2<T: Real>(signature: &Signature, alpha: &[T]) -> T {
    alpha
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (k, a)| acc + signature.eps::<T>(k) * *a * *a)
}

/// Value and first two derivatives of a profile at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2<T> {
    pub value: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Real> Jet2<T> {
    pub fn new(value: T, d1: T, d2: T) -> Self {
        Self { value, d1, d2 }
    }

    pub fn constant(value: T) -> Self {
        Self {
            value,
            d1: T::zero(),
            d2: T::zero(),
        }
    }
}

/// A scalar profile of `ξ` with two derivatives, defined on an open interval.
pub trait Profile<T: Real>: Send + Sync {
    /// Evaluate the 2-jet. Callers keep `xi` inside `domain()`.
    fn jet(&self, xi: T) -> Jet2<T>;

    /// Open interval `(lo, hi)` on which the profile is defined and positive.
    fn domain(&self) -> (T, T);
}

/// Profile built from a closure; handy for tests and user-supplied data.
pub struct FnProfile<T: Real> {
    func: Box<dyn Fn(T) -> Jet2<T> + Send + Sync>,
    domain: (T, T),
}

impl<T: Real> FnProfile<T> {
    pub fn new(domain: (T, T), func: impl Fn(T) -> Jet2<T> + Send + Sync + 'static) -> Self {
        Self {
            func: Box::new(func),
            domain,
        }
    }
}

impl<T: Real> Profile<T> for FnProfile<T> {
    fn jet(&self, xi: T) -> Jet2<T> {
        (self.func)(xi)
    }

    fn domain(&self) -> (T, T) {
        self.domain
    }
}

fn check_phi<T: Real>(phi: &Jet2<T>) -> Result<(), GeometryError> {
    if phi.value <= real(POSITIVITY_FLOOR) {
        Err(GeometryError::NonPositivePhi(
            phi.value.approx_f64(),
        ))
    } else {
        Ok(())
    }
}

/// Ricci tensor of `g = δ/φ²` in coordinate (lower index) components:
///
/// `Ric_ij = (n−2)(φ″/φ) α_i α_j + ε_i δ_ij ‖α‖² [φ″/φ − (n−1)(φ′)²/φ²]`
pub fn spatial_ricci<T: Real>(
    signature: &Signature,
    direction: &Direction<T>,
    phi: &Jet2<T>,
) -> Result<DMatrix<T>, GeometryError> {
    check_phi(phi)?;
    let n = signature.n();
    let a = direction.alpha();
    let nm2 = real::<T>((n - 2) as f64);
    let nm1 = real::<T>((n - 1) as f64);
    let r1 = phi.d2 / phi.value;
    let r2 = (phi.d1 / phi.value) * (phi.d1 / phi.value);
    let iso = direction.norm2() * (r1 - nm1 * r2);
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let mut v = nm2 * r1 * a[i] * a[j];
        if i == j {
            v += signature.eps::<T>(i) * iso;
        }
        v
    }))
}

/// Scalar curvature of `g = δ/φ²`:
///
/// `R_g = (n−1) ‖α‖² [2 φ φ″ − n (φ′)²]`
pub fn spatial_scalar_curvature<T: Real>(
    signature: &Signature,
    direction: &Direction<T>,
    phi: &Jet2<T>,
) -> T {
    let n = signature.n();
    let nm1 = real::<T>((n - 1) as f64);
    let nn = real::<T>(n as f64);
    nm1 * direction.norm2() * (real::<T>(2.0) * phi.value * phi.d2 - nn * phi.d1 * phi.d1)
}

/// Trace-free part of the Ricci tensor of `g`:
///
/// `(Ric − R/n g)_ij = (n−2)(φ″/φ)(α_i α_j − δ_ij ε_i ‖α‖²/n)`
pub fn traceless_ricci<T: Real>(
    signature: &Signature,
    direction: &Direction<T>,
    phi: &Jet2<T>,
) -> Result<DMatrix<T>, GeometryError> {
    check_phi(phi)?;
    let n = signature.n();
    let a = direction.alpha();
    let coeff = real::<T>((n - 2) as f64) * phi.d2 / phi.value;
    let over_n = direction.norm2() / real::<T>(n as f64);
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let mut v = a[i] * a[j];
        if i == j {
            v -= signature.eps::<T>(i) * over_n;
        }
        v * coeff
    }))
}

/// Christoffel symbols `Γ^k_ij` stored densely with the lower-pair symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelTable<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> ChristoffelTable<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim * dim],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> T {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: T) {
        self.data[(k * self.dim + i) * self.dim + j] = v;
    }

    /// `max_{k,i,j} |Γ^k_ij − other|`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }
}

impl<T: Real> std::ops::Mul<T> for ChristoffelTable<T> {
    type Output = Self;
    fn mul(mut self, rhs: T) -> Self {
        for v in &mut self.data {
            *v *= rhs;
        }
        self
    }
}

impl<T: Real> std::ops::Sub for ChristoffelTable<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(rhs.data) {
            *a -= b;
        }
        self
    }
}

/// Christoffel symbols of `g = δ/φ²`. With `φ_{x_i} = α_i φ′`:
///
/// `Γ^k_ij = −(δ^k_i φ_{x_j} + δ^k_j φ_{x_i} − ε_i ε_k δ_ij φ_{x_k}) / φ`
///
/// which reproduces the four closed-form cases (distinct indices vanish).
pub fn spatial_christoffel<T: Real>(
    signature: &Signature,
    direction: &Direction<T>,
    phi: &Jet2<T>,
) -> Result<ChristoffelTable<T>, GeometryError> {
    check_phi(phi)?;
    let n = signature.n();
    let a = direction.alpha();
    let slope = phi.d1 / phi.value;
    let mut table = ChristoffelTable::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut v = T::zero();
                if k == i {
                    v -= a[j] * slope;
                }
                if k == j {
                    v -= a[i] * slope;
                }
                if i == j {
                    v += signature.eps::<T>(i) * signature.eps::<T>(k) * a[k] * slope;
                }
                table.set(k, i, j, v);
            }
        }
    }
    Ok(table)
}

/// Hessian of `f` with respect to `g`:
///
/// `(∇²_g f)_ij = α_i α_j f″ + (2 α_i α_j − δ_ij ε_i ‖α‖²) (φ′ f′ / φ)`
pub fn conformal_hessian_f<T: Real>(
    signature: &Signature,
    direction: &Direction<T>,
    phi: &Jet2<T>,
    f: &Jet2<T>,
) -> Result<DMatrix<T>, GeometryError> {
    check_phi(phi)?;
    let n = signature.n();
    let a = direction.alpha();
    let cross = phi.d1 * f.d1 / phi.value;
    let two = real::<T>(2.0);
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let mut v = a[i] * a[j] * f.d2 + two * a[i] * a[j] * cross;
        if i == j {
            v -= signature.eps::<T>(i) * direction.norm2() * cross;
        }
        v
    }))
}

/// Laplacian of `f` with respect to `g`:
///
/// `Δ_g f = ‖α‖² [φ² f″ − (n−2) φ φ′ f′]`
///
/// (the division-free form of `φ²‖α‖²[f″ − (n−2) φ′f′/φ]`).
pub fn conformal_laplacian_f<T: Real>(
    signature: &Signature,
    direction: &Direction<T>,
    phi: &Jet2<T>,
    f: &Jet2<T>,
) -> T {
    let nm2 = real::<T>((signature.n() - 2) as f64);
    direction.norm2() * (phi.value * phi.value * f.d2 - nm2 * phi.value * phi.d1 * f.d1)
}

/// `g`-trace of a (0,2) tensor in these coordinates: `Σ_k φ² ε_k S_kk`.
pub fn trace_g<T: Real>(signature: &Signature, phi_value: T, tensor: &DMatrix<T>) -> T {
    let phi2 = phi_value * phi_value;
    (0..signature.n()).fold(T::zero(), |acc, k| {
        acc + phi2 * signature.eps::<T>(k) * tensor[(k, k)]
    })
}

/// Index pair witnessing `α_i α_j − δ_ij ε_i ‖α‖²/n ≠ 0` (0-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness<T> {
    pub i: usize,
    pub j: usize,
    pub value: T,
}

/// Locate a nonzero entry of the trace-free direction tensor.
///
/// If `α` has two nonzero components the largest off-diagonal product wins;
/// otherwise `α = α_m e_m` and the diagonal entry `(m, m)` has value
/// `α_m² (n−1)/n`. A valid direction always yields a witness.
pub fn nondegeneracy_witness<T: Real>(
    signature: &Signature,
    direction: &Direction<T>,
) -> Witness<T> {
    let n = signature.n();
    let a = direction.alpha();
    let mut best: Option<Witness<T>> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = a[i] * a[j];
            if v != T::zero() && best.as_ref().is_none_or(|b| v.abs() > b.value.abs()) {
                best = Some(Witness { i, j, value: v });
            }
        }
    }
    if let Some(w) = best {
        return w;
    }
    let m = (0..n)
        .max_by(|&p, &q| a[p].abs().partial_cmp(&a[q].abs()).unwrap())
        .unwrap();
    let nn = real::<T>(n as f64);
    Witness {
        i: m,
        j: m,
        value: a[m] * a[m] * (nn - T::one()) / nn,
    }
}

/// A full static spacetime `ĝ = δ/φ² − f² dt²` on `{x : ξ(x) ∈ (lo, hi)} × R`.
#[derive(Clone)]
pub struct SpacetimeSpec<T: Real> {
    signature: Signature,
    direction: Direction<T>,
    phi: Arc<dyn Profile<T>>,
    f: Arc<dyn Profile<T>>,
    interval: (T, T),
}

impl<T: Real> SpacetimeSpec<T> {
    /// Assemble and sanity-check a spacetime.
    ///
    /// The interval must be nonempty and contained in both profile domains;
    /// positivity of `φ` and `f` is spot-checked on a coarse interior grid
    /// (clipped to a finite window when the interval is unbounded) and then
    /// enforced again at every evaluation.
    pub fn new(
        signature: Signature,
        direction: Direction<T>,
        phi: Arc<dyn Profile<T>>,
        f: Arc<dyn Profile<T>>,
        interval: (T, T),
    ) -> Result<Self, GeometryError> {
        if direction.alpha().len() != signature.n() {
            return Err(GeometryError::DimensionMismatch {
                expected: signature.n(),
                got: direction.alpha().len(),
            });
        }
        let (lo, hi) = interval;
        if !(lo < hi) {
            return Err(GeometryError::EmptyInterval {
                lo: lo.approx_f64(),
                hi: hi.approx_f64(),
            });
        }
        for (plo, phi_hi) in [phi.domain(), f.domain()] {
            if lo < plo || hi > phi_hi {
                return Err(GeometryError::OutOfDomain {
                    xi: lo.approx_f64(),
                    lo: plo.approx_f64(),
                    hi: phi_hi.approx_f64(),
                });
            }
        }
        let spec = Self {
            signature,
            direction,
            phi,
            f,
            interval,
        };
        let (wlo, whi) = spec.finite_window();
        let samples = 33;
        for k in 0..samples {
            let t = real::<T>((k as f64 + 0.5) / samples as f64);
            let xi = wlo + (whi - wlo) * t;
            let floor = real::<T>(POSITIVITY_FLOOR);
            if spec.phi.jet(xi).value <= floor || spec.f.jet(xi).value <= floor {
                return Err(GeometryError::ProfileNotPositive(
                    xi.approx_f64(),
                ));
            }
        }
        Ok(spec)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.signature.n()
    }

    #[inline]
    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    #[inline]
    pub fn direction(&self) -> &Direction<T> {
        &self.direction
    }

    #[inline]
    pub fn interval(&self) -> (T, T) {
        self.interval
    }

    #[inline]
    pub fn phi_profile(&self) -> &Arc<dyn Profile<T>> {
        &self.phi
    }

    #[inline]
    pub fn f_profile(&self) -> &Arc<dyn Profile<T>> {
        &self.f
    }

    /// The interval clipped to a finite window (used for sampling defaults).
    pub fn finite_window(&self) -> (T, T) {
        let big = real::<T>(2.0);
        let (lo, hi) = self.interval;
        let wlo = if lo.finite() { lo } else { -big + hi.min(T::zero()) };
        let whi = if hi.finite() { hi } else { big + lo.max(T::zero()) };
        if wlo < whi {
            (wlo, whi)
        } else {
            (lo.max(-big), hi.min(big))
        }
    }

    pub fn contains(&self, xi: T) -> bool {
        xi > self.interval.0 && xi < self.interval.1
    }

    fn domain_checked(&self, xi: T) -> Result<(), GeometryError> {
        if self.contains(xi) {
            Ok(())
        } else {
            Err(GeometryError::OutOfDomain {
                xi: xi.approx_f64(),
                lo: self.interval.0.approx_f64(),
                hi: self.interval.1.approx_f64(),
            })
        }
    }

    /// Jet of `φ` at `ξ`, enforcing domain and positivity.
    pub fn phi_jet(&self, xi: T) -> Result<Jet2<T>, GeometryError> {
        self.domain_checked(xi)?;
        let jet = self.phi.jet(xi);
        check_phi(&jet)?;
        Ok(jet)
    }

    /// Jet of `f` at `ξ`, enforcing domain and positivity.
    pub fn f_jet(&self, xi: T) -> Result<Jet2<T>, GeometryError> {
        self.domain_checked(xi)?;
        let jet = self.f.jet(xi);
        if jet.value <= real(POSITIVITY_FLOOR) {
            return Err(GeometryError::NonPositiveLapse(
                jet.value.approx_f64(),
            ));
        }
        Ok(jet)
    }

    /// `ξ = α·x` for the spatial part of a point.
    pub fn xi_of(&self, spatial: &[T]) -> T {
        self.direction.xi(spatial)
    }

    /// Static metric `diag(ε_1/φ², …, ε_n/φ², −f²)` at `(x, t)`.
    ///
    /// `point` carries `n` spatial coordinates followed by `t`.
    pub fn static_metric_at(&self, point: &[T]) -> Result<DMatrix<T>, GeometryError> {
        let n = self.n();
        if point.len() != n + 1 {
            return Err(GeometryError::DimensionMismatch {
                expected: n + 1,
                got: point.len(),
            });
        }
        let xi = self.xi_of(&point[..n]);
        let phi = self.phi_jet(xi)?;
        let f = self.f_jet(xi)?;
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            m[(i, i)] = self.signature.eps::<T>(i) / (phi.value * phi.value);
        }
        m[(n, n)] = -f.value * f.value;
        Ok(m)
    }

    /// A spatial point realizing a given `ξ`: `x = ξ e_m / α_m` with `m`
    /// the largest component of `α` (works for every causal character).
    pub fn spatial_point_at(&self, xi: T) -> Vec<T> {
        let a = self.direction.alpha();
        let m = (0..a.len())
            .max_by(|&p, &q| a[p].abs().partial_cmp(&a[q].abs()).unwrap())
            .unwrap();
        let mut x = vec![T::zero(); a.len()];
        x[m] = xi / a[m];
        x
    }
}
