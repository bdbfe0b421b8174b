//! Entropy-conservative two-point fluxes, diffusion coefficients and the
//! assembled TECNO flux `F = F~ - D <<u>>`.

use crate::error::{Result, TecnoError};
use crate::entropy::{FluxComponent, FluxSpec};
use crate::grid::{apply_boundary, Axis, GridFunction, InterfaceField};
use crate::reconstruct::ReconJump;
use crate::scalar::Scalar;

/// Admissible range `[d_low, d_high]` of the diffusion coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffusionBounds<T> {
    d_low: T,
    d_high: T,
}

impl<T: Scalar> DiffusionBounds<T> {
    pub fn new(d_low: T, d_high: T) -> Result<Self> {
        if !(d_low > T::zero()) || !(d_low <= d_high) || !d_high.is_finite() {
            return Err(TecnoError::InvalidParameter {
                name: "diffusion bounds",
                reason: format!("need 0 < d_low <= d_high, got [{d_low}, {d_high}]"),
            });
        }
        Ok(Self { d_low, d_high })
    }

    pub fn d_low(&self) -> T {
        self.d_low
    }
    pub fn d_high(&self) -> T {
        self.d_high
    }

    /// Bounds whose upper end never clips the local rule for data in
    /// `[-linf_bound, linf_bound]`.
    pub fn for_flux(flux: &FluxSpec<T>, linf_bound: T) -> Result<Self> {
        let speed = Axis::BOTH
            .iter()
            .map(|&a| flux.component(a).max_abs_derivative(-linf_bound, linf_bound))
            .fold(T::zero(), T::max);
        let d_low = T::lit(1e-3);
        Self::new(d_low, (speed * T::half()).max(d_low))
    }
}

impl<T: Scalar> Default for DiffusionBounds<T> {
    fn default() -> Self {
        Self { d_low: T::lit(1e-3), d_high: T::lit(10.0) }
    }
}

/// Threshold below which a jump is treated as zero in the primitive
/// difference quotient.
#[inline]
fn jump_threshold<T: Scalar>(ul: T, ur: T) -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(64.0)) * (T::one() + ul.abs() + ur.abs())
}

/// Two-point flux satisfying `(uR - uL) F~ = psi(uR) - psi(uL)` for the square
/// entropy, i.e. the mean of the flux component over `[uL, uR]`.
#[inline]
pub fn ec_flux<T: Scalar>(ul: T, ur: T, comp: &FluxComponent<T>) -> T {
    match comp {
        // (Psi(uR) - Psi(uL)) / (uR - uL) with Psi = a u^2/2 and c u^3/6,
        // divided out so there is no cancellation near the diagonal
        FluxComponent::Linear(a) => *a * (ul + ur) * T::half(),
        FluxComponent::Quadratic(c) => *c * (ul * ul + ul * ur + ur * ur) / T::lit(6.0),
        FluxComponent::Custom { f, .. } => {
            let jump = ur - ul;
            if jump.abs() > jump_threshold(ul, ur) {
                (comp.primitive(ur) - comp.primitive(ul)) / jump
            } else {
                f((ul + ur) * T::half())
            }
        }
    }
}

/// [`ec_flux`] with a finiteness check.
pub fn entropy_conservative_flux<T: Scalar>(ul: T, ur: T, comp: &FluxComponent<T>) -> Result<T> {
    let v = ec_flux(ul, ur, comp);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(TecnoError::NonFinite("entropy-conservative flux"))
    }
}

/// `clamp(max(|f'(uL)|, |f'(uR)|) / 2, d_low, d_high)`.
#[inline]
pub fn diffusion_coefficient<T: Scalar>(ul: T, ur: T, comp: &FluxComponent<T>, bounds: &DiffusionBounds<T>) -> T {
    let raw = comp.df(ul).abs().max(comp.df(ur).abs()) * T::half();
    raw.max(bounds.d_low).min(bounds.d_high)
}

/// Flux pieces on the faces normal to one axis.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisFluxes<T> {
    /// `F = F~ - D <<u>>`
    pub total: InterfaceField<T>,
    /// `F~`
    pub conservative: InterfaceField<T>,
    /// `D`
    pub diffusion: InterfaceField<T>,
}

impl<T: Scalar> AxisFluxes<T> {
    pub fn axis(&self) -> Axis {
        self.total.axis()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericalFluxField<T> {
    pub x: AxisFluxes<T>,
    pub y: AxisFluxes<T>,
}

impl<T: Scalar> NumericalFluxField<T> {
    pub fn axis(&self, axis: Axis) -> &AxisFluxes<T> {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
        }
    }
}

fn assemble_axis<T: Scalar>(
    u: &GridFunction<T>,
    padded: &crate::grid::PaddedField<T>,
    jumps: &ReconJump<T>,
    comp: &FluxComponent<T>,
    bounds: &DiffusionBounds<T>,
) -> Result<AxisFluxes<T>> {
    let axis = jumps.axis();
    let grid = u.grid();
    let mut total = InterfaceField::zeros(grid, axis);
    let mut conservative = total.clone();
    let mut diffusion = total.clone();
    let (cols, rows) = total.shape();
    for j in 0..rows {
        for i in 0..cols {
            let (ii, jj) = (i as isize, j as isize);
            let (ul, ur) = match axis {
                Axis::X => (padded.get(ii - 1, jj), padded.get(ii, jj)),
                Axis::Y => (padded.get(ii, jj - 1), padded.get(ii, jj)),
            };
            let ft = ec_flux(ul, ur, comp);
            let d = diffusion_coefficient(ul, ur, comp, bounds);
            conservative.set(i, j, ft);
            diffusion.set(i, j, d);
            total.set(i, j, ft - d * jumps.get(i, j));
        }
    }
    total.ensure_finite("TECNO flux")?;
    Ok(AxisFluxes { total, conservative, diffusion })
}

/// Assembles `F = F~(u_left, u_right) - D <<u>>` on all faces of both axes.
/// `jump_x` and `jump_y` must be the ENO2 reconstruction jumps of `u`.
pub fn assemble_tecno_flux<T: Scalar>(
    u: &GridFunction<T>,
    jump_x: &ReconJump<T>,
    jump_y: &ReconJump<T>,
    spec: &FluxSpec<T>,
    bounds: &DiffusionBounds<T>,
) -> Result<NumericalFluxField<T>> {
    if jump_x.axis() != Axis::X || jump_y.axis() != Axis::Y {
        return Err(TecnoError::InvalidParameter { name: "jumps", reason: "axis mismatch".into() });
    }
    let padded = apply_boundary(u, 1)?;
    Ok(NumericalFluxField {
        x: assemble_axis(u, &padded, jump_x, spec.component(Axis::X), bounds)?,
        y: assemble_axis(u, &padded, jump_y, spec.component(Axis::Y), bounds)?,
    })
}
