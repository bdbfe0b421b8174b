//! Test problems on the unit square with exact-solution oracles.

use std::fmt;
use std::sync::Arc;

use crate::entropy::FluxSpec;
use crate::error::{Result, TecnoError};
use crate::flux::DiffusionBounds;
use crate::grid::{Boundary, Grid2D};
use crate::scalar::Scalar;

pub type InitialFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;
pub type OracleFn<T> = Arc<dyn Fn(T, T, T) -> T + Send + Sync>;

/// Names accepted by [`problem_by_name`], with their parameter lists.
pub const PROBLEM_NAMES: [&str; 3] = ["advect-smooth(a,b)", "burgers-smooth", "burgers-riemann-x(uL,uR)"];

#[derive(Clone)]
pub struct ProblemSpec<T> {
    pub name: String,
    pub description: String,
    pub flux: FluxSpec<T>,
    pub boundary: Boundary,
    pub x_range: (T, T),
    pub y_range: (T, T),
    initial: InitialFn<T>,
    oracle: Option<OracleFn<T>>,
    /// Last time at which the oracle is valid, if limited.
    pub oracle_valid_until: Option<T>,
    max_abs_initial: T,
}

impl<T: fmt::Debug> fmt::Debug for ProblemSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("flux", &self.flux)
            .field("boundary", &self.boundary)
            .field("x_range", &self.x_range)
            .field("y_range", &self.y_range)
            .field("has_oracle", &self.oracle.is_some())
            .finish()
    }
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn initial(&self, x: T, y: T) -> T {
        (self.initial)(x, y)
    }

    pub fn has_oracle(&self) -> bool {
        self.oracle.is_some()
    }

    /// Exact solution at `(x, y, t)`.
    pub fn exact(&self, x: T, y: T, t: T) -> Result<T> {
        let oracle = self.oracle.as_ref().ok_or_else(|| TecnoError::NoOracle(self.name.clone()))?;
        if let Some(limit) = self.oracle_valid_until {
            if t > limit {
                return Err(TecnoError::NoOracle(format!("{} after t = {limit:?}", self.name)));
            }
        }
        Ok(oracle(x, y, t))
    }

    /// Exact solution at time `t` as a function of position. Errors if the
    /// oracle does not cover `t`.
    pub fn exact_at(&self, t: T) -> Result<impl Fn(T, T) -> T + '_> {
        self.exact(self.x_range.0, self.y_range.0, t)?;
        let oracle = self.oracle.as_ref().expect("checked above");
        Ok(move |x, y| oracle(x, y, t))
    }

    pub fn grid(&self, nx: usize, ny: usize) -> Result<Grid2D<T>> {
        Grid2D::over_domain(nx, ny, self.x_range, self.y_range, self.boundary)
    }

    /// Same data and boundary under another flux. The oracle is dropped
    /// unless the flux is unchanged.
    pub fn with_flux(mut self, flux: FluxSpec<T>) -> Self {
        if flux.name() != self.flux.name() {
            self.name = format!("{}[{}]", self.name, flux.name());
            self.oracle = None;
            self.oracle_valid_until = None;
        }
        self.flux = flux;
        self
    }

    /// `M = 1.25 max|u0|`, the a-priori bound assumed for the solution.
    pub fn linf_bound(&self) -> T {
        T::lit(1.25) * self.max_abs_initial.max(T::lit(0.1))
    }

    /// `[1e-3, max|f'| / 2]` with the maximum over `[-M, M]`.
    pub fn default_bounds(&self) -> Result<DiffusionBounds<T>> {
        DiffusionBounds::for_flux(&self.flux, self.linf_bound())
    }
}

fn two_pi<T: Scalar>() -> T {
    T::two() * T::PI()
}

/// Linear advection of `sin(2 pi x) sin(2 pi y)` with velocity `(a, b)`.
pub fn advect_smooth<T: Scalar>(a: T, b: T) -> ProblemSpec<T> {
    let u0 = |x: T, y: T| (two_pi::<T>() * x).sin() * (two_pi::<T>() * y).sin();
    ProblemSpec {
        name: "advect-smooth".into(),
        description: format!("linear advection with velocity ({a}, {b}) of sin(2 pi x) sin(2 pi y), periodic"),
        flux: FluxSpec::linear(a, b),
        boundary: Boundary::Periodic,
        x_range: (T::zero(), T::one()),
        y_range: (T::zero(), T::one()),
        initial: Arc::new(u0),
        oracle: Some(Arc::new(move |x, y, t| u0(x - a * t, y - b * t))),
        oracle_valid_until: None,
        max_abs_initial: T::one(),
    }
}

const SMOOTH_MEAN: f64 = 0.5;
const SMOOTH_AMPLITUDE: f64 = 0.4;

/// Time at which characteristics of `burgers-smooth` first cross.
pub fn burgers_smooth_breaking_time<T: Scalar>() -> T {
    T::one() / (T::two() * T::lit(SMOOTH_AMPLITUDE) * two_pi::<T>())
}

/// Solves `u = g(x + y - 2 u t)` with `g(s) = 0.5 + 0.4 sin(2 pi s)`.
/// Newton from `g(x + y)`, falling back to bisection on `[0.1, 0.9]` (the
/// range of `g`) if Newton fails to converge.
pub fn burgers_smooth_solution<T: Scalar>(x: T, y: T, t: T) -> T {
    let (mean, amp, k) = (T::lit(SMOOTH_MEAN), T::lit(SMOOTH_AMPLITUDE), two_pi::<T>());
    let s = x + y;
    let g = |u: T| mean + amp * (k * (s - T::two() * u * t)).sin();
    let residual = |u: T| u - g(u);
    let tol = T::epsilon() * T::lit(8.0);
    let mut u = g(T::zero());
    for _ in 0..50 {
        let r = residual(u);
        let dr = T::one() + amp * k * T::two() * t * (k * (s - T::two() * u * t)).cos();
        let next = u - r / dr;
        if (next - u).abs() <= tol {
            return next;
        }
        u = next;
    }
    let (mut lo, mut hi) = (mean - amp, mean + amp);
    for _ in 0..200 {
        let mid = (lo + hi) * T::half();
        if residual(mid) > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) * T::half()
}

/// Burgers flux in both directions with smooth periodic data, valid up to
/// the breaking time.
pub fn burgers_smooth<T: Scalar>() -> ProblemSpec<T> {
    let (mean, amp) = (T::lit(SMOOTH_MEAN), T::lit(SMOOTH_AMPLITUDE));
    ProblemSpec {
        name: "burgers-smooth".into(),
        description: "Burgers in x and y, u0 = 0.5 + 0.4 sin(2 pi (x + y)), periodic, oracle before breaking".into(),
        flux: FluxSpec::burgers(),
        boundary: Boundary::Periodic,
        x_range: (T::zero(), T::one()),
        y_range: (T::zero(), T::one()),
        initial: Arc::new(move |x, y| mean + amp * (two_pi::<T>() * (x + y)).sin()),
        oracle: Some(Arc::new(burgers_smooth_solution)),
        oracle_valid_until: Some(burgers_smooth_breaking_time()),
        max_abs_initial: mean + amp,
    }
}

/// Entropy solution of the 1D Burgers Riemann problem with the jump at `x0`.
pub fn burgers_riemann_solution<T: Scalar>(ul: T, ur: T, x0: T, x: T, t: T) -> T {
    if t <= T::zero() {
        return if x < x0 { ul } else { ur };
    }
    if ul > ur {
        let s = (ul + ur) * T::half();
        if x < x0 + s * t {
            ul
        } else {
            ur
        }
    } else {
        ((x - x0) / t).max(ul).min(ur)
    }
}

/// Burgers Riemann problem in `x`, constant in `y`, outflow boundaries. The
/// data is `y`-independent so the `y` flux has zero divergence and the 1D
/// solution is exact.
pub fn burgers_riemann_x<T: Scalar>(ul: T, ur: T) -> ProblemSpec<T> {
    let x0 = T::half();
    let kind = if ul > ur { "shock" } else { "rarefaction" };
    ProblemSpec {
        name: "burgers-riemann-x".into(),
        description: format!("Burgers Riemann problem uL = {ul}, uR = {ur} at x = 0.5 ({kind}), outflow"),
        flux: FluxSpec::burgers(),
        boundary: Boundary::Outflow,
        x_range: (T::zero(), T::one()),
        y_range: (T::zero(), T::one()),
        initial: Arc::new(move |x, _| if x < x0 { ul } else { ur }),
        oracle: Some(Arc::new(move |x, _, t| burgers_riemann_solution(ul, ur, x0, x, t))),
        oracle_valid_until: None,
        max_abs_initial: ul.abs().max(ur.abs()),
    }
}

/// The registry with default parameters.
pub fn registry<T: Scalar>() -> Vec<ProblemSpec<T>> {
    vec![advect_smooth(T::one(), T::one()), burgers_smooth(), burgers_riemann_x(T::one(), T::zero())]
}

fn parse_params<T: Scalar>(name: &str, args: &str, expected: usize) -> Result<Vec<T>> {
    let values: Vec<T> = args
        .split(',')
        .map(|s| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).map(T::lit))
        .collect::<Option<_>>()
        .ok_or_else(|| TecnoError::UnknownProblem(name.to_string()))?;
    if values.len() != expected {
        return Err(TecnoError::UnknownProblem(name.to_string()));
    }
    Ok(values)
}

/// Looks a problem up by name, optionally with parameters:
/// `advect-smooth`, `advect-smooth(a,b)`, `burgers-smooth`,
/// `burgers-riemann-x`, `burgers-riemann-x(uL,uR)`.
pub fn problem_by_name<T: Scalar>(name: &str) -> Result<ProblemSpec<T>> {
    let name = name.trim();
    let (base, args) = match name.split_once('(') {
        Some((base, rest)) => {
            let args = rest.strip_suffix(')').ok_or_else(|| TecnoError::UnknownProblem(name.to_string()))?;
            (base.trim(), Some(args))
        }
        None => (name, None),
    };
    match (base, args) {
        ("advect-smooth", None) => Ok(advect_smooth(T::one(), T::one())),
        ("advect-smooth", Some(a)) => {
            let p = parse_params(name, a, 2)?;
            Ok(advect_smooth(p[0], p[1]))
        }
        ("burgers-smooth", None) => Ok(burgers_smooth()),
        ("burgers-riemann-x", None) => Ok(burgers_riemann_x(T::one(), T::zero())),
        ("burgers-riemann-x", Some(a)) => {
            let p = parse_params(name, a, 2)?;
            Ok(burgers_riemann_x(p[0], p[1]))
        }
        _ => Err(TecnoError::UnknownProblem(name.to_string())),
    }
}
