//! One-dimensional quadrature rules.

use crate::scalar::Scalar;

/// Two-point Gauss-Legendre nodes on `[-1, 1]` (unit weights).
pub const GAUSS2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

// Kronrod 15-point nodes (non-negative half) and weights, with the embedded
// 7-point Gauss weights for the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 40;

/// Gauss-Kronrod (7, 15) estimate on `[a, b]`: returns `(integral, error)`.
fn gk15<T: Scalar>(f: &impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let center = (a + b) * T::half();
    let half = (b - a) * T::half();
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for k in 0..7 {
        let dx = half * T::lit(XGK[k]);
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * T::lit(WGK[k]);
        if k % 2 == 1 {
            gauss += pair * T::lit(WG[k / 2]);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

fn adapt<T: Scalar>(f: &impl Fn(T) -> T, a: T, b: T, tol: T, depth: u32) -> T {
    let (value, err) = gk15(f, a, b);
    if err <= tol || depth >= MAX_DEPTH || !(err.is_finite()) {
        return value;
    }
    let mid = (a + b) * T::half();
    if mid <= a.min(b) || mid >= a.max(b) {
        return value;
    }
    adapt(f, a, mid, tol * T::half(), depth + 1) + adapt(f, mid, b, tol * T::half(), depth + 1)
}

/// Adaptive Gauss-Kronrod integral of `f` over `[a, b]` (oriented: swapping
/// the limits flips the sign) to absolute tolerance `tol`.
pub fn integrate<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, tol: T) -> T {
    if a == b {
        return T::zero();
    }
    adapt(&f, a, b, tol, 0)
}

/// Default absolute tolerance for entropy-flux and primitive quadratures.
pub fn default_tolerance<T: Scalar>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(16.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x: f64| 3.0 * x * x, 0.0, 2.0, 1e-14);
        assert_relative_eq!(v, 8.0, epsilon = 1e-13);
        let v = integrate(|x: f64| x.powi(20), -1.0, 1.0, 1e-14);
        assert_relative_eq!(v, 2.0 / 21.0, epsilon = 1e-14);
    }

    #[test]
    fn orientation_and_degenerate_interval() {
        assert_relative_eq!(integrate(|x: f64| x, 1.0, 0.0, 1e-14), -0.5, epsilon = 1e-15);
        assert_eq!(integrate(|x: f64| x, 0.3, 0.3, 1e-14), 0.0);
    }

    #[test]
    fn sharp_but_smooth_integrand() {
        // integral of (x^2 + d^2)^{-1/2} over [-1, 1] = 2 asinh(1/d)
        let d = 1e-3;
        let v = integrate(|x: f64| 1.0 / (x * x + d * d).sqrt(), -1.0, 1.0, 1e-12);
        assert_relative_eq!(v, 2.0 * (1.0 / d).asinh(), epsilon = 1e-10);
    }

    #[test]
    fn gauss2_is_exact_for_cubics() {
        let avg: f64 = GAUSS2.iter().map(|&g| 0.5 * (0.5 * g + 0.5).powi(3)).sum();
        assert_relative_eq!(avg, 0.25, epsilon = 1e-16);
    }
}
