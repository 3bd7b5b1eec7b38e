//! Turns parsed flags into catalog entries, profiles and spacetime specs.

use std::collections::BTreeMap;
use std::sync::Arc;

use statfluid::catalog::{self, CatalogEntry, CatalogId};
use statfluid::geometry::{Direction, FnProfile, Jet2, Profile, Signature, SpacetimeSpec};
use statfluid::reduction::{solve_f, IntegratorConfig};

use crate::{Failure, SpecArgs};

/// Everything a command needs to know about the requested spacetime.
pub struct Built {
    pub n: usize,
    pub signature: Signature,
    pub alpha: Vec<f64>,
    pub alpha_norm2: f64,
    pub example: String,
    pub phi: Arc<dyn Profile<f64>>,
    pub f: Arc<dyn Profile<f64>>,
    /// Intersection of the profile domains, possibly infinite.
    pub open: (f64, f64),
    /// Closed sampling interval for `solve`; open chart for spec commands.
    pub interval: (f64, f64),
    /// Whether `interval` was given explicitly (endpoints then sampled
    /// verbatim) or derived from the open domain (endpoints inset).
    pub interval_explicit: bool,
    /// Set when the lapse came from numeric integration that stopped short.
    pub lapse_truncated: bool,
}

pub fn parse_f64(text: &str, what: &str) -> Result<f64, Failure> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| Failure::Usage(format!("{what}: expected a number, got {text:?}")))
}

/// `"a:b"` with both endpoints finite numbers.
pub fn parse_range(text: &str, what: &str) -> Result<(f64, f64), Failure> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("{what}: expected A:B, got {text:?}")))?;
    let lo = parse_f64(a, what)?;
    let hi = parse_f64(b, what)?;
    if !(lo < hi) {
        return Err(Failure::Usage(format!(
            "{what}: bounds must satisfy A < B, got {lo}:{hi}"
        )));
    }
    Ok((lo, hi))
}

fn parse_params(pairs: &[String]) -> Result<BTreeMap<String, f64>, Failure> {
    let mut map = BTreeMap::new();
    for pair in pairs {
        let (k, v) = pair.split_once('=').ok_or_else(|| {
            Failure::Usage(format!("--param: expected K=V, got {pair:?}"))
        })?;
        map.insert(k.trim().to_string(), parse_f64(v, "--param")?);
    }
    Ok(map)
}

fn constant_profile() -> Arc<dyn Profile<f64>> {
    Arc::new(FnProfile::new(
        (f64::NEG_INFINITY, f64::INFINITY),
        |_xi: f64| Jet2::new(1.0, 0.0, 0.0),
    ))
}

fn catalog_entry(args: &SpecArgs, id: &str) -> Result<CatalogEntry<f64>, Failure> {
    let cat_id = CatalogId::parse(id).ok_or_else(|| {
        Failure::Usage(format!(
            "--example {id}: unknown family (try `statfluid catalog` for the list)"
        ))
    })?;
    let mut params = parse_params(&args.params)?;
    if let Some(n) = args.n {
        params.entry("n".to_string()).or_insert(n as f64);
    }
    catalog::build(cat_id, &params).map_err(|e| Failure::Usage(e.to_string()))
}

/// Sine-warped lapse used as the verification negative control: the warp
/// is pointwise, so it survives the master equation's linear scaling
/// invariance while breaking the equation itself.
pub fn perturbed_lapse(
    f: &Arc<dyn Profile<f64>>,
    amplitude: f64,
    mid: f64,
) -> Arc<dyn Profile<f64>> {
    let base = Arc::clone(f);
    let domain = base.domain();
    Arc::new(FnProfile::new(domain, move |xi: f64| {
        let j = base.jet(xi);
        let s = amplitude * (xi - mid).sin();
        let ds = amplitude * (xi - mid).cos();
        let dds = -amplitude * (xi - mid).sin();
        Jet2::new(
            j.value * (1.0 + s),
            j.d1 * (1.0 + s) + j.value * ds,
            j.d2 * (1.0 + s) + 2.0 * j.d1 * ds + j.value * dds,
        )
    }))
}

fn intersect(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0.max(b.0), a.1.min(b.1))
}

/// Clip an open, possibly infinite interval to something samplable.
fn default_window(domain: (f64, f64)) -> (f64, f64) {
    let (lo, hi) = domain;
    let lo = if lo.is_finite() { lo } else { hi.min(0.0) - 2.0 } ;
    let hi = if hi.is_finite() { hi } else { (lo + 2.0).max(2.0) };
    (lo, hi)
}

pub fn build(args: &SpecArgs, solve_tol: f64) -> Result<Built, Failure> {
    let example = args.example.as_deref().unwrap_or("flat").to_string();

    let (entry, n) = if example == "flat" {
        (None, args.n.unwrap_or(3))
    } else {
        let entry = catalog_entry(args, &example)?;
        let n = entry.n;
        (Some(entry), n)
    };

    let signature = match &args.signature {
        Some(pattern) => Signature::parse(pattern)
            .map_err(|e| Failure::Usage(format!("--signature: {e}")))?,
        None => Signature::euclidean(n).unwrap(),
    };
    if signature.n() != n {
        return Err(Failure::Usage(format!(
            "--signature has {} entries but n = {n}",
            signature.n()
        )));
    }
    let alpha: Vec<f64> = match &args.alpha {
        Some(list) => list
            .split(',')
            .map(|s| parse_f64(s, "--alpha"))
            .collect::<Result<_, _>>()?,
        None => {
            let mut a = vec![0.0; n];
            a[n - 1] = 1.0;
            a
        }
    };
    let direction = Direction::new(&signature, alpha.clone())
        .map_err(|e| Failure::Usage(format!("--alpha: {e}")))?;
    let alpha_norm2 = direction.norm2();
    if let Some(e) = &entry {
        // Only the power-law profiles bake ‖α‖² into their exponents.
        if e.id == CatalogId::PowerLaw
            && (alpha_norm2 - e.alpha_norm2).abs() > 1e-9 * e.alpha_norm2.abs().max(1.0)
        {
            return Err(Failure::Usage(format!(
                "--alpha gives |alpha|^2 = {alpha_norm2}, but this power_law entry \
                 was built for |alpha|^2 = {}; pass --param alpha_norm2={alpha_norm2}",
                e.alpha_norm2
            )));
        }
    }

    let requested = match &args.interval {
        Some(text) => Some(parse_range(text, "--interval")?),
        None => None,
    };

    let (phi, f_closed, phi_domain) = match &entry {
        None => {
            let one = constant_profile();
            (Arc::clone(&one), Some(one), (f64::NEG_INFINITY, f64::INFINITY))
        }
        Some(e) => (Arc::clone(&e.phi), e.f.clone(), e.domain),
    };

    let mut lapse_truncated = false;
    let (f, f_domain) = match f_closed {
        Some(f) => {
            let d = f.domain();
            (f, d)
        }
        None => {
            // No closed-form lapse: integrate the master equation from the
            // middle of the working window.
            let window = requested.unwrap_or_else(|| default_window(phi_domain));
            let window = intersect(window, phi_domain);
            if !(window.0 < window.1) {
                return Err(Failure::Usage(format!(
                    "--interval: empty once clipped to the profile domain ({}, {})",
                    phi_domain.0, phi_domain.1
                )));
            }
            let xi0 = 0.5 * (window.0 + window.1);
            let config = IntegratorConfig {
                rel_tol: solve_tol,
                abs_tol: solve_tol * 1e-2,
                ..Default::default()
            };
            let numeric = solve_f(n, Arc::clone(&phi), xi0, args.f0, args.df0, window, &config)
                .map_err(|e| Failure::Numerical(format!("lapse integration failed: {e}")))?;
            // Only warn when the shortfall is visible at sampling scale; the
            // integrator routinely stops a few ulps inside a singular edge.
            let dom = numeric.domain();
            let req = numeric.requested();
            let span = req.1 - req.0;
            lapse_truncated = numeric.is_truncated()
                && ((dom.0 - req.0).abs() > 1e-6 * span || (req.1 - dom.1).abs() > 1e-6 * span);
            let domain = dom;
            (
                Arc::new(numeric) as Arc<dyn Profile<f64>>,
                domain,
            )
        }
    };

    let open = intersect(phi_domain, f_domain);
    let (interval, interval_explicit) = match requested {
        Some(r) => {
            let clipped = intersect(r, open);
            if !(clipped.0 < clipped.1) {
                return Err(Failure::Usage(format!(
                    "--interval: empty once clipped to the profile domain ({}, {})",
                    open.0, open.1
                )));
            }
            (clipped, true)
        }
        None => (default_window(open), false),
    };

    let f = match args.perturb_f {
        Some(amp) => {
            let window = default_window(interval);
            perturbed_lapse(&f, amp, 0.5 * (window.0 + window.1))
        }
        None => f,
    };

    Ok(Built {
        n,
        signature,
        alpha,
        alpha_norm2,
        example,
        phi,
        f,
        open,
        interval,
        interval_explicit,
        lapse_truncated,
    })
}

impl Built {
    /// Inclusive sample grid for `solve`: explicit intervals are sampled
    /// verbatim, derived ones are inset from their open endpoints.
    pub fn sample_grid(&self, samples: usize) -> Vec<f64> {
        let (mut lo, mut hi) = self.interval;
        if !self.interval_explicit {
            let inset = 5e-3 * (hi - lo);
            lo += inset;
            hi -= inset;
        }
        if samples <= 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..samples)
            .map(|k| lo + (hi - lo) * k as f64 / (samples - 1) as f64)
            .collect()
    }

    /// Open-interval spacetime for the verifier and geodesic commands. An
    /// explicit `--interval` bounds the chart (its edges then count as
    /// domain ends); otherwise the full profile domain is kept so that an
    /// invented sampling window cannot masquerade as a boundary.
    pub fn spacetime(&self) -> Result<SpacetimeSpec<f64>, Failure> {
        let chart = if self.interval_explicit {
            self.interval
        } else {
            self.open
        };
        let direction = Direction::new(&self.signature, self.alpha.clone())
            .map_err(|e| Failure::Usage(e.to_string()))?;
        SpacetimeSpec::new(
            self.signature.clone(),
            direction,
            Arc::clone(&self.phi),
            Arc::clone(&self.f),
            chart,
        )
        .map_err(|e| Failure::Numerical(format!("spacetime rejected: {e}")))
    }
}
