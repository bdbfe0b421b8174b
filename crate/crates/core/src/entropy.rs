//! Flux specifications and entropy pairs.
//!
//! A [`FluxSpec`] holds the two flux components `f^x`, `f^y` together with
//! their derivatives and primitives `Psi` (`Psi' = f`, `Psi(0) = 0`). An
//! [`EntropyPair`] bundles a convex entropy `eta` with its compatible entropy
//! fluxes `q` (`q' = eta' f'`) and the entropy potentials `psi = eta' f - q`.
//!
//! Polynomial flux components (linear and quadratic) carry closed forms for
//! every derived quantity; anything else goes through adaptive quadrature.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, TecnoError};
use crate::grid::{Axis, GridFunction};
use crate::quadrature;
use crate::scalar::Scalar;

/// Pointwise real function shared between threads.
pub type RealFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// One scalar flux component.
#[derive(Clone)]
pub enum FluxComponent<T> {
    /// `f(u) = a u`
    Linear(T),
    /// `f(u) = c u^2 / 2` (Burgers for `c = 1`)
    Quadratic(T),
    /// Arbitrary smooth flux; primitives and entropy fluxes use quadrature.
    Custom { f: RealFn<T>, df: RealFn<T> },
}

impl<T: Scalar> FluxComponent<T> {
    pub fn custom(f: impl Fn(T) -> T + Send + Sync + 'static, df: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        FluxComponent::Custom { f: Arc::new(f), df: Arc::new(df) }
    }

    #[inline]
    pub fn f(&self, u: T) -> T {
        match self {
            FluxComponent::Linear(a) => *a * u,
            FluxComponent::Quadratic(c) => *c * u * u * T::half(),
            FluxComponent::Custom { f, .. } => f(u),
        }
    }

    #[inline]
    pub fn df(&self, u: T) -> T {
        match self {
            FluxComponent::Linear(a) => *a,
            FluxComponent::Quadratic(c) => *c * u,
            FluxComponent::Custom { df, .. } => df(u),
        }
    }

    /// `Psi(u) = int_0^u f`.
    pub fn primitive(&self, u: T) -> T {
        match self {
            FluxComponent::Linear(a) => *a * u * u * T::half(),
            FluxComponent::Quadratic(c) => *c * u * u * u / T::lit(6.0),
            FluxComponent::Custom { f, .. } => {
                quadrature::integrate(|s| f(s), T::zero(), u, quadrature::default_tolerance())
            }
        }
    }

    /// Largest `|f'|` over `[lo, hi]`. Exact for the polynomial variants,
    /// sampled on 1025 points otherwise.
    pub fn max_abs_derivative(&self, lo: T, hi: T) -> T {
        match self {
            FluxComponent::Linear(a) => a.abs(),
            FluxComponent::Quadratic(c) => c.abs() * lo.abs().max(hi.abs()),
            FluxComponent::Custom { df, .. } => {
                let n = 1024;
                (0..=n)
                    .map(|k| lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(n))
                    .fold(T::zero(), |m, u| m.max(df(u).abs()))
            }
        }
    }

    pub fn is_polynomial(&self) -> bool {
        !matches!(self, FluxComponent::Custom { .. })
    }
}

impl<T: fmt::Debug> fmt::Debug for FluxComponent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FluxComponent::Linear(a) => write!(f, "Linear({a:?})"),
            FluxComponent::Quadratic(c) => write!(f, "Quadratic({c:?})"),
            FluxComponent::Custom { .. } => write!(f, "Custom"),
        }
    }
}

/// The flux `f = (f^x, f^y)`.
#[derive(Clone, Debug)]
pub struct FluxSpec<T> {
    name: String,
    x: FluxComponent<T>,
    y: FluxComponent<T>,
}

impl<T: Scalar> FluxSpec<T> {
    pub fn new(name: impl Into<String>, x: FluxComponent<T>, y: FluxComponent<T>) -> Self {
        Self { name: name.into(), x, y }
    }

    /// `f = (a u, b u)`.
    pub fn linear(a: T, b: T) -> Self {
        Self::new(format!("linear({a},{b})"), FluxComponent::Linear(a), FluxComponent::Linear(b))
    }

    /// `f = (u^2/2, u^2/2)`.
    pub fn burgers() -> Self {
        Self::new("burgers", FluxComponent::Quadratic(T::one()), FluxComponent::Quadratic(T::one()))
    }

    /// Looks up a registered flux: `burgers` or `linear(a,b)`.
    pub fn from_name(name: &str) -> Result<Self> {
        let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "burgers" {
            return Ok(Self::burgers());
        }
        if let Some(args) = compact.strip_prefix("linear(").and_then(|s| s.strip_suffix(')')) {
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() == 2 {
                let parse = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite());
                if let (Some(a), Some(b)) = (parse(parts[0]), parse(parts[1])) {
                    return Ok(Self::linear(T::lit(a), T::lit(b)));
                }
            }
        }
        Err(TecnoError::UnknownFlux(name.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn component(&self, axis: Axis) -> &FluxComponent<T> {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
        }
    }
}

/// Which convex entropy a pair is built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntropyKind<T> {
    /// `eta(u) = u^2 / 2`
    Square,
    /// `eta(u) = sqrt((u - k)^2 + delta^2) - delta`, a smooth convex
    /// approximation of the Kruzkov entropy `|u - k|`.
    SmoothedKruzkov { k: T, delta: T },
}

/// Entropy `eta`, its derivatives, and the per-axis entropy flux `q` and
/// entropy potential `psi`.
#[derive(Clone, Debug)]
pub struct EntropyPair<T> {
    kind: EntropyKind<T>,
    flux: FluxSpec<T>,
}

/// Default smoothing width of the Kruzkov family.
pub const DEFAULT_KRUZKOV_DELTA: f64 = 1e-2;

/// `eta = u^2/2` with `q = int_0^u s f'(s) ds` and `psi = u f - q`.
pub fn square_entropy_pair<T: Scalar>(flux: &FluxSpec<T>) -> EntropyPair<T> {
    EntropyPair { kind: EntropyKind::Square, flux: flux.clone() }
}

/// Hyperbola-smoothed Kruzkov pair centred at `k` with width `delta > 0`.
pub fn smoothed_kruzkov_pair<T: Scalar>(flux: &FluxSpec<T>, k: T, delta: T) -> Result<EntropyPair<T>> {
    if !(delta > T::zero()) || !delta.is_finite() {
        return Err(TecnoError::InvalidParameter { name: "delta", reason: format!("must be positive, got {delta}") });
    }
    if !k.is_finite() {
        return Err(TecnoError::InvalidParameter { name: "k", reason: "must be finite".into() });
    }
    Ok(EntropyPair { kind: EntropyKind::SmoothedKruzkov { k, delta }, flux: flux.clone() })
}

impl<T: Scalar> EntropyPair<T> {
    pub fn kind(&self) -> EntropyKind<T> {
        self.kind
    }

    pub fn flux(&self) -> &FluxSpec<T> {
        &self.flux
    }

    #[inline]
    pub fn eta(&self, u: T) -> T {
        match self.kind {
            EntropyKind::Square => u * u * T::half(),
            EntropyKind::SmoothedKruzkov { k, delta } => (u - k).hypot(delta) - delta,
        }
    }

    /// Entropy variable `v = eta'(u)`.
    #[inline]
    pub fn deta(&self, u: T) -> T {
        match self.kind {
            EntropyKind::Square => u,
            EntropyKind::SmoothedKruzkov { k, delta } => (u - k) / (u - k).hypot(delta),
        }
    }

    #[inline]
    pub fn ddeta(&self, u: T) -> T {
        match self.kind {
            EntropyKind::Square => T::one(),
            EntropyKind::SmoothedKruzkov { k, delta } => {
                let r = (u - k).hypot(delta);
                delta * delta / (r * r * r)
            }
        }
    }

    /// `sup |eta''|` over `[lo, hi]`.
    pub fn ddeta_sup(&self, lo: T, hi: T) -> T {
        match self.kind {
            EntropyKind::Square => T::one(),
            // eta'' peaks at u = k and decreases away from it
            EntropyKind::SmoothedKruzkov { k, .. } => self.ddeta(k.max(lo).min(hi)),
        }
    }

    /// Entropy flux component `q(u)`, normalised so that `q` vanishes at the
    /// entropy's symmetry point (0 for the square entropy, `k` for Kruzkov).
    pub fn q(&self, axis: Axis, u: T) -> T {
        let comp = self.flux.component(axis);
        match (self.kind, comp) {
            (EntropyKind::Square, FluxComponent::Linear(a)) => *a * u * u * T::half(),
            (EntropyKind::Square, FluxComponent::Quadratic(c)) => *c * u * u * u / T::lit(3.0),
            (EntropyKind::SmoothedKruzkov { k, delta }, FluxComponent::Linear(a)) => {
                *a * ((u - k).hypot(delta) - delta)
            }
            (EntropyKind::SmoothedKruzkov { k, delta }, FluxComponent::Quadratic(c)) => {
                // int_0^t s (s + k) / sqrt(s^2 + d^2) ds with t = u - k
                let t = u - k;
                let r = t.hypot(delta);
                *c * (t * r * T::half() - delta * delta * T::half() * (t / delta).asinh() + k * (r - delta))
            }
            (_, FluxComponent::Custom { .. }) => self.q_by_quadrature(axis, u),
        }
    }

    /// `q(u)` by adaptive quadrature of `eta'(s) f'(s)`, whatever the flux.
    pub fn q_by_quadrature(&self, axis: Axis, u: T) -> T {
        let comp = self.flux.component(axis);
        let origin = match self.kind {
            EntropyKind::Square => T::zero(),
            EntropyKind::SmoothedKruzkov { k, .. } => k,
        };
        quadrature::integrate(|s| self.deta(s) * comp.df(s), origin, u, quadrature::default_tolerance())
    }

    /// Entropy potential `psi(u) = eta'(u) f(u) - q(u)`.
    #[inline]
    pub fn psi(&self, axis: Axis, u: T) -> T {
        self.deta(u) * self.flux.component(axis).f(u) - self.q(axis, u)
    }
}

/// Pointwise entropy variable `v_ij = eta'(u_ij)`.
pub fn entropy_variable<T: Scalar>(pair: &EntropyPair<T>, w: &GridFunction<T>) -> Result<GridFunction<T>> {
    let values = w.values().iter().map(|&u| pair.deta(u)).collect::<Vec<_>>();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(TecnoError::NonFinite("entropy variable"));
    }
    GridFunction::from_values(*w.grid(), values, w.time())
}

/// `[-M - 1, M + 1]`, the range on which flux and entropy invariants are
/// sampled for an `L^inf` bound `M`.
pub fn working_range<T: Scalar>(linf_bound: T) -> (T, T) {
    (-linf_bound - T::one(), linf_bound + T::one())
}
