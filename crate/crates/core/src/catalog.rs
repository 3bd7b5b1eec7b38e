//! Closed-form spacetime families.
//!
//! Five families are provided, each built around an explicit conformal
//! factor `φ` (and, where one exists, an explicit lapse `f`):
//!
//! | id                  | φ                                  | f                        |
//! |---------------------|------------------------------------|--------------------------|
//! | `power_law`         | `[η̃(κ̃ξ+κ̄)]^{1/η̃}`               | `(κ̃ξ+κ̄)^q`              |
//! | `exponential`       | `e^ξ`                              | `e^{rξ}`                 |
//! | `linear_reciprocal` | `aξ+b`                             | `1/(aξ+b)`               |
//! | `trigonometric`     | `c·cos ξ` (n = 3)                  | `b·cos(a+√2ξ)/cos ξ`     |
//! | `secant`            | `b·sec^{2/(n−2)}(a+ξ√(n−2)/2)`     | numeric via `solve_f`    |
//!
//! Each entry carries the closed-form μ (and ρ where available) that is
//! usually quoted for the family, as a regression target. Where a quoted
//! form disagrees with the governing equations, the entry records a
//! machine-readable [`Erratum`] flag and the derived form is authoritative.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{Direction, FnProfile, GeometryError, Jet2, Profile, Signature, SpacetimeSpec};
use crate::real::{real, Real};

#[derive(Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("power-law family is undefined for a lightlike direction (division by ‖α‖²)")]
    UndefinedFamily,
    #[error("exponent η̃ vanishes at this (n, ‖α‖²); the family degenerates to the exponential one (id `exponential`)")]
    DegenerateExponent,
    #[error("no real lapse exponent: discriminant {0} < 0")]
    NoRealLapseExponent(f64),
    #[error("invalid parameter {name} = {value}: {why}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        why: &'static str,
    },
    #[error("positivity constraints leave no domain around the anchor")]
    EmptyDomain,
    #[error("this entry's profiles were built for ‖α‖² = {expected}, direction has {got}")]
    DirectionMismatch { expected: f64, got: f64 },
    #[error("entry has no closed-form lapse; integrate one with solve_f and use spacetime_with_lapse")]
    MissingLapse,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Known defects of the quoted closed forms, recorded per entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Erratum {
    /// The quoted conformal factor is negative on the stated domain; the
    /// entry flips its sign (only φ², φφ″ and (φ′)² enter anything).
    QuotedPhiNegative,
    /// The quoted lapse exponents `1±√(n−1)` do not solve the quoted lapse
    /// equation `f″+2f′−(n−2)f = 0`; the true characteristic roots are
    /// `−1±√(n−1)`. The quoted ρ inherits the defect.
    QuotedLapseExponents,
    /// The quoted constant μ, ρ omit the slope factor `a²`; they are valid
    /// only at `a = ±1`.
    QuotedConstantsAssumeUnitSlope,
    /// The quoted ρ is not even in ξ although the instance's φ and f both
    /// are, and it disagrees with the pressure equation; the derived closed
    /// form is used instead.
    QuotedRhoInconsistent,
    /// The quoted lapse is `b·cos(a−ξ√(n−1))/cos ξ`; this entry uses the
    /// `+` convention (the families coincide under `a → −a`).
    PhaseSignConvention,
}

impl Erratum {
    pub fn as_str(self) -> &'static str {
        match self {
            Erratum::QuotedPhiNegative => "quoted-phi-negative",
            Erratum::QuotedLapseExponents => "quoted-lapse-exponents",
            Erratum::QuotedConstantsAssumeUnitSlope => "quoted-constants-assume-unit-slope",
            Erratum::QuotedRhoInconsistent => "quoted-rho-inconsistent",
            Erratum::PhaseSignConvention => "phase-sign-convention",
        }
    }
}

impl std::fmt::Display for Erratum {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        out.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CatalogId {
    PowerLaw,
    Exponential,
    LinearReciprocal,
    Trigonometric,
    Secant,
}

impl CatalogId {
    pub const ALL: [CatalogId; 5] = [
        CatalogId::PowerLaw,
        CatalogId::Exponential,
        CatalogId::LinearReciprocal,
        CatalogId::Trigonometric,
        CatalogId::Secant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogId::PowerLaw => "power_law",
            CatalogId::Exponential => "exponential",
            CatalogId::LinearReciprocal => "linear_reciprocal",
            CatalogId::Trigonometric => "trigonometric",
            CatalogId::Secant => "secant",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.as_str() == s)
    }
}

impl std::fmt::Display for CatalogId {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        out.write_str(self.as_str())
    }
}

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// One closed-form family instance.
pub struct CatalogEntry<T: Real> {
    pub id: CatalogId,
    pub n: usize,
    /// `‖α‖²` the quoted fluid forms are bound to (and, for `power_law`,
    /// that the profiles themselves depend on).
    pub alpha_norm2: T,
    pub params: BTreeMap<&'static str, T>,
    pub domain: (T, T),
    pub notes: Vec<Erratum>,
    pub phi: Arc<dyn Profile<T>>,
    pub f: Option<Arc<dyn Profile<T>>>,
    /// μ(ξ) as usually quoted for the family; regression target.
    pub quoted_mu: ScalarFn<T>,
    /// ρ(ξ) as quoted, where the source states one for these parameters.
    pub quoted_rho: Option<ScalarFn<T>>,
    /// ρ(ξ) derived from the pressure equation, where a closed form exists.
    pub derived_rho: Option<ScalarFn<T>>,
}

impl<T: Real> CatalogEntry<T> {
    /// Assemble the spacetime for a concrete signature and direction.
    ///
    /// `interval` defaults to the entry's full domain. Entries without a
    /// closed-form lapse (`secant`) need [`Self::spacetime_with_lapse`].
    pub fn spacetime(
        &self,
        signature: Signature,
        alpha: Vec<T>,
        interval: Option<(T, T)>,
    ) -> Result<SpacetimeSpec<T>, CatalogError> {
        let f = self.f.clone().ok_or(CatalogError::MissingLapse)?;
        self.spacetime_with_lapse(signature, alpha, f, interval)
    }

    /// Same as [`Self::spacetime`] with an explicit lapse profile (e.g. one
    /// produced by `solve_f` for the `secant` family).
    pub fn spacetime_with_lapse(
        &self,
        signature: Signature,
        alpha: Vec<T>,
        f: Arc<dyn Profile<T>>,
        interval: Option<(T, T)>,
    ) -> Result<SpacetimeSpec<T>, CatalogError> {
        let direction = Direction::new(&signature, alpha)?;
        if self.id == CatalogId::PowerLaw {
            let got = direction.norm2();
            let scale = T::one().max(self.alpha_norm2.abs());
            if (got - self.alpha_norm2).abs() > real::<T>(1e-9) * scale {
                return Err(CatalogError::DirectionMismatch {
                    expected: self.alpha_norm2.approx_f64(),
                    got: got.approx_f64(),
                });
            }
        }
        let (dlo, dhi) = self.domain;
        let (flo, fhi) = f.domain();
        let interval = interval.unwrap_or((dlo.max(flo), dhi.min(fhi)));
        Ok(SpacetimeSpec::new(
            signature,
            direction,
            Arc::clone(&self.phi),
            f,
            interval,
        )?)
    }
}

fn check_param<T: Real>(
    ok: bool,
    name: &'static str,
    value: T,
    why: &'static str,
) -> Result<(), CatalogError> {
    if ok {
        Ok(())
    } else {
        Err(CatalogError::InvalidParam {
            name,
            value: value.approx_f64(),
            why,
        })
    }
}

/// `φ = [η̃(κ̃ξ+κ̄)]^{1/η̃}` with `η̃ = 1 − (2+‖α‖²n(n−1))/(2‖α‖²(n−1))`,
/// the family with `μ = (φ′)²`; lapse `f = (κ̃ξ+κ̄)^q` from the Euler
/// equation the master ODE becomes in `u = κ̃ξ+κ̄`.
pub fn example1<T: Real>(
    n: usize,
    alpha_norm2: T,
    kappa_tilde: T,
    kappa_bar: T,
) -> Result<CatalogEntry<T>, CatalogError> {
    if alpha_norm2 == T::zero() {
        return Err(CatalogError::UndefinedFamily);
    }
    check_param(kappa_tilde != T::zero(), "kappa_tilde", kappa_tilde, "must be nonzero")?;

    let nf = real::<T>(n as f64);
    let nm1 = real::<T>((n - 1) as f64);
    let nm2 = real::<T>((n - 2) as f64);
    let two = real::<T>(2.0);
    let eta = T::one() - (two + alpha_norm2 * nf * nm1) / (two * alpha_norm2 * nm1);
    if eta.abs() <= real(1e-14) {
        return Err(CatalogError::DegenerateExponent);
    }
    let m = T::one() / eta;

    // Lapse exponent: u²f_uu + 2m·u·f_u − (n−2)m(m−1)f = 0 with f = u^q.
    let b_coeff = two * m - T::one();
    let disc = b_coeff * b_coeff + real::<T>(4.0) * nm2 * m * (m - T::one());
    if disc < T::zero() {
        return Err(CatalogError::NoRealLapseExponent(disc.approx_f64()));
    }
    let q = (-b_coeff - disc.sqrt()) / two;

    // Domain: the side where u = κ̃ξ+κ̄ > 0.
    let edge = -kappa_bar / kappa_tilde;
    let domain = if kappa_tilde > T::zero() {
        (edge, real::<T>(f64::INFINITY))
    } else {
        (real::<T>(f64::NEG_INFINITY), edge)
    };

    let base_scale = eta.abs(); // φ = (|η̃|u)^{1/η̃}, sign-corrected
    let (kt, kb) = (kappa_tilde, kappa_bar);
    let phi = Arc::new(FnProfile::new(domain, move |xi: T| {
        let u = kt * xi + kb;
        let b = base_scale * u;
        let v = b.powf(m);
        let d1 = m * b.powf(m - T::one()) * base_scale * kt;
        let d2 = m * (m - T::one()) * b.powf(m - two) * (base_scale * kt) * (base_scale * kt);
        Jet2::new(v, d1, d2)
    }));
    let f = Arc::new(FnProfile::new(domain, move |xi: T| {
        let u = kt * xi + kb;
        Jet2::new(
            u.powf(q),
            q * u.powf(q - T::one()) * kt,
            q * (q - T::one()) * u.powf(q - two) * kt * kt,
        )
    }));

    let mut notes = Vec::new();
    if eta < T::zero() {
        notes.push(Erratum::QuotedPhiNegative);
    }

    let phi_for_mu = Arc::clone(&phi) as Arc<dyn Profile<T>>;
    let quoted_mu: ScalarFn<T> = Arc::new(move |xi: T| {
        let d = phi_for_mu.jet(xi).d1;
        d * d
    });

    // ρ is quoted only for the canonical instance n=3, ‖α‖²=1, κ̃=1, κ̄=0.
    let canonical = n == 3
        && alpha_norm2 == T::one()
        && kappa_tilde == T::one()
        && kappa_bar == T::zero();
    let quoted_rho: Option<ScalarFn<T>> = canonical.then(|| {
        let c = real::<T>(4.0) - real::<T>(17.0).sqrt();
        Arc::new(move |xi: T| c * (xi * xi * xi * xi).recip()) as ScalarFn<T>
    });

    // Derived closed form: ρ = ‖α‖²(n−1)[(n−2)(φ′)²/2 − φφ′f′/f].
    let phi_r = Arc::clone(&phi) as Arc<dyn Profile<T>>;
    let f_r = Arc::clone(&f) as Arc<dyn Profile<T>>;
    let w = alpha_norm2;
    let derived_rho: ScalarFn<T> = Arc::new(move |xi: T| {
        let p = phi_r.jet(xi);
        let l = f_r.jet(xi);
        w * nm1 * (nm2 * p.d1 * p.d1 / two - p.value * p.d1 * l.d1 / l.value)
    });

    let mut params = BTreeMap::new();
    params.insert("eta_tilde", eta);
    params.insert("kappa_tilde", kappa_tilde);
    params.insert("kappa_bar", kappa_bar);
    params.insert("lapse_exponent", q);

    Ok(CatalogEntry {
        id: CatalogId::PowerLaw,
        n,
        alpha_norm2,
        params,
        domain,
        notes,
        phi,
        f: Some(f),
        quoted_mu,
        quoted_rho,
        derived_rho: Some(derived_rho),
    })
}

/// `φ = e^ξ` on all of ℝ; lapse `f = e^{rξ}` with the growing
/// characteristic root `r = −1+√(n−1)` of `f″+2f′−(n−2)f = 0`.
pub fn example2<T: Real>(n: usize) -> Result<CatalogEntry<T>, CatalogError> {
    let nm1 = real::<T>((n - 1) as f64);
    let nm2 = real::<T>((n - 2) as f64);
    let nf = real::<T>(n as f64);
    let two = real::<T>(2.0);
    let r = -T::one() + nm1.sqrt();
    let quoted_root = T::one() + nm1.sqrt();
    let domain = (real::<T>(f64::NEG_INFINITY), real::<T>(f64::INFINITY));

    let phi = Arc::new(FnProfile::new(domain, |xi: T| {
        let e = xi.exp();
        Jet2::new(e, e, e)
    }));
    let f = Arc::new(FnProfile::new(domain, move |xi: T| {
        let e = (r * xi).exp();
        Jet2::new(e, r * e, r * r * e)
    }));

    let w = T::one();
    let quoted_mu: ScalarFn<T> = Arc::new(move |xi: T| {
        -w * nm1 * nm2 / two * (two * xi).exp()
    });
    // The quoted ρ is the correct template evaluated at the wrong root.
    let rho_template = move |root: T| {
        w * (nm1 / nf) * (root * root - nm2 * root + nm2 * nm2 / two)
    };
    let quoted_rho: ScalarFn<T> = Arc::new(move |xi: T| rho_template(quoted_root) * (two * xi).exp());
    let derived_rho: ScalarFn<T> = Arc::new(move |xi: T| rho_template(r) * (two * xi).exp());

    let mut params = BTreeMap::new();
    params.insert("root", r);
    params.insert("quoted_root", quoted_root);

    Ok(CatalogEntry {
        id: CatalogId::Exponential,
        n,
        alpha_norm2: w,
        params,
        domain,
        notes: vec![Erratum::QuotedLapseExponents],
        phi,
        f: Some(f),
        quoted_mu,
        quoted_rho: Some(quoted_rho),
        derived_rho: Some(derived_rho),
    })
}

/// `φ = aξ+b`, `f = 1/φ` on the half-line where `aξ+b > 0`; constant
/// `μ = −n(n−1)‖α‖²a²/2` and `ρ = +n(n−1)‖α‖²a²/2`.
pub fn example3<T: Real>(n: usize, a: T, b: T) -> Result<CatalogEntry<T>, CatalogError> {
    check_param(a != T::zero(), "a", a, "must be nonzero (constant φ is not in this family)")?;

    let edge = -b / a;
    let domain = if a > T::zero() {
        (edge, real::<T>(f64::INFINITY))
    } else {
        (real::<T>(f64::NEG_INFINITY), edge)
    };

    let phi = Arc::new(FnProfile::new(domain, move |xi: T| {
        Jet2::new(a * xi + b, a, T::zero())
    }));
    let f = Arc::new(FnProfile::new(domain, move |xi: T| {
        let v = a * xi + b;
        let inv = v.recip();
        Jet2::new(inv, -a * inv * inv, real::<T>(2.0) * a * a * inv * inv * inv)
    }));

    let w = T::one();
    let level = real::<T>((n * (n - 1)) as f64 / 2.0) * w * a * a;
    let quoted_mu: ScalarFn<T> = Arc::new(move |_xi: T| -level);
    let quoted_rho: ScalarFn<T> = Arc::new(move |_xi: T| level);
    let derived_rho: ScalarFn<T> = Arc::new(move |_xi: T| level);

    let mut params = BTreeMap::new();
    params.insert("a", a);
    params.insert("b", b);

    Ok(CatalogEntry {
        id: CatalogId::LinearReciprocal,
        n,
        alpha_norm2: w,
        params,
        domain,
        notes: vec![Erratum::QuotedConstantsAssumeUnitSlope],
        phi,
        f: Some(f),
        quoted_mu,
        quoted_rho: Some(quoted_rho),
        derived_rho: Some(derived_rho),
    })
}

/// `φ = c·cos ξ`, `f = b·cos(a+√2ξ)/cos ξ` at n = 3, on the widest
/// interval around 0 where both stay positive.
pub fn example4<T: Real>(a: T, b: T, c: T) -> Result<CatalogEntry<T>, CatalogError> {
    let n = 3usize;
    check_param(b > T::zero(), "b", b, "must be positive")?;
    check_param(c != T::zero(), "c", c, "must be nonzero")?;

    let s = real::<T>(2.0f64.sqrt());
    let half_pi = T::pi() / real::<T>(2.0);
    // cos ξ > 0 around 0 needs c > 0 for φ > 0.
    if c < T::zero() {
        return Err(CatalogError::EmptyDomain);
    }
    // cos(a+√2ξ) > 0: ξ ∈ ((−π/2−a)/√2, (π/2−a)/√2); cos ξ > 0: |ξ| < π/2.
    let lo = ((-half_pi - a) / s).max(-half_pi);
    let hi = ((half_pi - a) / s).min(half_pi);
    if !(lo < T::zero() && T::zero() < hi) {
        return Err(CatalogError::EmptyDomain);
    }
    let domain = (lo, hi);

    let phi = Arc::new(FnProfile::new(domain, move |xi: T| {
        let (sx, cx) = (xi.sin(), xi.cos());
        Jet2::new(c * cx, -c * sx, -c * cx)
    }));
    let f = Arc::new(FnProfile::new(domain, move |xi: T| {
        let arg = a + s * xi;
        let (sa, ca) = (arg.sin(), arg.cos());
        let (sx, cx) = (xi.sin(), xi.cos());
        let num = -s * sa * cx + ca * sx;
        let value = b * ca / cx;
        let d1 = b * num / (cx * cx);
        let d2 = b * ((T::one() - s * s) * ca * cx * cx + real::<T>(2.0) * sx * num)
            / (cx * cx * cx);
        Jet2::new(value, d1, d2)
    }));

    let w = T::one();
    let three = real::<T>(3.0);
    let quoted_mu: ScalarFn<T> = Arc::new(move |xi: T| {
        let cx = xi.cos();
        w * c * c * (cx * cx - three)
    });
    // Derived: ρ = ‖α‖²c²[3 sin²ξ − √2 sin 2ξ · tan(a+√2ξ)].
    let derived_rho: ScalarFn<T> = Arc::new(move |xi: T| {
        let t = (a + s * xi).tan();
        w * c * c * (three * xi.sin() * xi.sin() - s * (real::<T>(2.0) * xi).sin() * t)
    });
    // ρ is quoted only for the instance a=0, b=c=1.
    let instance = a == T::zero() && b == T::one() && c == T::one();
    let quoted_rho: Option<ScalarFn<T>> = instance.then(|| {
        Arc::new(move |xi: T| {
            let (sx, cx) = (xi.sin(), xi.cos());
            let two = real::<T>(2.0);
            let seven = real::<T>(7.0);
            -w / three
                * (two * s * (s * xi).tan() * cx * (two * sx - T::one())
                    + seven * cx * cx
                    + two * sx
                    - seven)
        }) as ScalarFn<T>
    });

    let mut params = BTreeMap::new();
    params.insert("a", a);
    params.insert("b", b);
    params.insert("c", c);

    Ok(CatalogEntry {
        id: CatalogId::Trigonometric,
        n,
        alpha_norm2: w,
        params,
        domain,
        notes: vec![Erratum::QuotedRhoInconsistent, Erratum::PhaseSignConvention],
        phi,
        f: Some(f),
        quoted_mu,
        quoted_rho,
        derived_rho: Some(derived_rho),
    })
}

/// `φ = b·sec^{2/(n−2)}(a+ξ√(n−2)/2)`, the family with
/// `μ = ((n−1)/2)‖α‖²φ²`; no closed-form lapse is known, integrate one
/// with `solve_f`.
pub fn example5<T: Real>(n: usize, a: T, b: T) -> Result<CatalogEntry<T>, CatalogError> {
    check_param(b > T::zero(), "b", b, "must be positive")?;

    let m = real::<T>(2.0 / (n - 2) as f64);
    let rate = real::<T>(((n - 2) as f64).sqrt() / 2.0);
    let half_pi = T::pi() / real::<T>(2.0);
    // One secant branch: a + rate·ξ ∈ (−π/2, π/2).
    let domain = ((-half_pi - a) / rate, (half_pi - a) / rate);

    let phi = Arc::new(FnProfile::new(domain, move |xi: T| {
        let arg = a + rate * xi;
        let sec = arg.cos().recip();
        let tan = arg.tan();
        let v = b * sec.powf(m);
        let l1 = m * rate * tan;
        let l2 = m * rate * rate * sec * sec + l1 * l1;
        Jet2::new(v, v * l1, v * l2)
    }));

    let w = T::one();
    let nm1 = real::<T>((n - 1) as f64);
    let phi_mu = Arc::clone(&phi) as Arc<dyn Profile<T>>;
    let quoted_mu: ScalarFn<T> = Arc::new(move |xi: T| {
        let v = phi_mu.jet(xi).value;
        nm1 / real::<T>(2.0) * w * v * v
    });

    let mut params = BTreeMap::new();
    params.insert("a", a);
    params.insert("b", b);

    Ok(CatalogEntry {
        id: CatalogId::Secant,
        n,
        alpha_norm2: w,
        params,
        domain,
        notes: Vec::new(),
        phi,
        f: None,
        quoted_mu,
        quoted_rho: None,
        derived_rho: None,
    })
}

/// The five canonical entries with their standard parameters.
pub fn listing<T: Real>() -> Vec<CatalogEntry<T>> {
    vec![
        example1(3, T::one(), T::one(), T::zero()).unwrap(),
        example2(3).unwrap(),
        example3(3, T::one(), T::zero()).unwrap(),
        example4(T::zero(), T::one(), T::one()).unwrap(),
        example5(3, T::zero(), T::one()).unwrap(),
    ]
}

/// Build an entry by id from a parameter map, falling back to the canonical
/// parameters for anything missing.
pub fn build<T: Real>(
    id: CatalogId,
    params: &BTreeMap<String, T>,
) -> Result<CatalogEntry<T>, CatalogError> {
    let get = |name: &str, default: T| params.get(name).copied().unwrap_or(default);
    let n = get("n", real(3.0)).approx_f64().round();
    if !(n >= 3.0 && n.fract() == 0.0) {
        return Err(CatalogError::InvalidParam {
            name: "n",
            value: n,
            why: "dimension must be an integer >= 3",
        });
    }
    let n = n as usize;
    match id {
        CatalogId::PowerLaw => example1(
            n,
            get("alpha_norm2", T::one()),
            get("kappa_tilde", T::one()),
            get("kappa_bar", T::zero()),
        ),
        CatalogId::Exponential => example2(n),
        CatalogId::LinearReciprocal => example3(n, get("a", T::one()), get("b", T::zero())),
        CatalogId::Trigonometric => {
            if n != 3 {
                return Err(CatalogError::InvalidParam {
                    name: "n",
                    value: n as f64,
                    why: "the trigonometric family is three-dimensional only",
                });
            }
            example4(
                get("a", T::zero()),
                get("b", T::one()),
                get("c", T::one()),
            )
        }
        CatalogId::Secant => example5(n, get("a", T::zero()), get("b", T::one())),
    }
}
