//! Scalar bracketing bisection and adaptive Gauss–Kronrod quadrature.
//!
//! Both routines are deliberately small: the solver only ever hands them
//! monotone residuals (bisection) and smooth, exponentially decaying
//! integrands (quadrature), so robustness matters more than iteration count.

use thiserror::Error;

/// Hard cap on bisection steps. 200 halvings exhaust an f64 bracket long
/// before this is reached; hitting the cap means we return the midpoint.
const MAX_BISECT_ITERS: usize = 200;

/// Hard cap on quadrature panels before the running estimate is returned.
const MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
}

/// Find a root of `f` on `[lo, hi]` by bisection.
///
/// `f(lo)` and `f(hi)` must have opposite signs (either endpoint may already
/// be an exact zero). Iteration stops as soon as `|f(mid)| <= abs_residual`
/// or the bracket shrinks to floating-point resolution; in the latter case
/// the midpoint of the final bracket is returned as the best estimate.
pub fn bisect_root(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    abs_residual: f64,
) -> Result<f64, NumericError> {
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_sign_positive() == f_hi.is_sign_positive() {
        return Err(NumericError::NoSignChange { lo, hi, f_lo, f_hi });
    }

    let (mut lo, mut hi) = (lo, hi);
    let lo_positive = f_lo.is_sign_positive();
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECT_ITERS {
        mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid.abs() <= abs_residual {
            return Ok(mid);
        }
        if f_mid.is_sign_positive() == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()) {
            break;
        }
    }
    Ok(mid)
}

/// Geometric (log-space) bisection for a root of `f` on a positive bracket.
///
/// The midpoint is the geometric mean, so the bracket's log-width halves each
/// step and convergence takes ~60 iterations no matter how many orders of
/// magnitude the bracket spans. That matters when inverting marginal
/// conditions whose roots range from unit scale down to denormals (iso-elastic
/// revenue with an exponent near one produces exactly such brackets).
pub fn bisect_root_log(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    abs_residual: f64,
) -> Result<f64, NumericError> {
    debug_assert!(lo > 0.0 && hi > lo, "log bisection needs 0 < lo < hi");
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_sign_positive() == f_hi.is_sign_positive() {
        return Err(NumericError::NoSignChange { lo, hi, f_lo, f_hi });
    }

    let (mut lo, mut hi) = (lo, hi);
    let lo_positive = f_lo.is_sign_positive();
    let mut mid = lo.sqrt() * hi.sqrt();
    for _ in 0..MAX_BISECT_ITERS {
        mid = lo.sqrt() * hi.sqrt();
        let f_mid = f(mid);
        if f_mid.abs() <= abs_residual {
            return Ok(mid);
        }
        if f_mid.is_sign_positive() == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo <= 1.0 + 4.0 * f64::EPSILON {
            break;
        }
    }
    Ok(mid)
}

// 15-point Kronrod abscissae on [-1, 1] (symmetric, only the nonnegative
// half stored), with the embedded 7-point Gauss weights. Standard QUADPACK
// constants.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
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

/// One Gauss–Kronrod 15(7) panel: returns (integral, error estimate).
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    let mut fv = [0.0f64; 15];
    fv[7] = f_center;
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let raw_err = ((res_kronrod - res_gauss) * half).abs();
    res_abs *= half.abs();
    res_asc *= half.abs();

    // QUADPACK error rescaling: sharpens the raw |K - G| difference.
    let mut err = raw_err;
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }

    (res_kronrod * half, err)
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Integrate `f` over `[a, b]` to the requested relative tolerance.
///
/// Globally adaptive: the panel with the largest error estimate is split
/// until the summed error estimate drops below `rel_tol` times the running
/// integral. Panels narrower than floating-point resolution are frozen as-is,
/// so the routine always terminates and never panics on awkward integrands.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let span = (b - a).abs();
    let (value, error) = gk15(&f, a, b);
    let mut panels = vec![Panel { a, b, value, error }];
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut best_error = f64::INFINITY;
    let mut stale_splits = 0usize;

    for _ in 0..MAX_PANELS {
        let live_value: f64 = panels.iter().map(|p| p.value).sum();
        let live_error: f64 = panels.iter().map(|p| p.error).sum();
        let total = frozen_value + live_value;
        let target = rel_tol * total.abs().max(f64::MIN_POSITIVE);
        let total_error = frozen_error + live_error;
        if total_error <= target {
            return total;
        }
        // Stall detection: when many consecutive splits stop improving the
        // summed estimate, the integrand's own evaluation noise has been
        // reached and the requested tolerance is unattainable. Return the
        // converged-to-noise value instead of burning the panel budget.
        if total_error < best_error * 0.98 {
            best_error = total_error;
            stale_splits = 0;
        } else {
            stale_splits += 1;
            if stale_splits > 64 {
                return total;
            }
        }
        // Frozen panels already exceed the budget on their own: refining the
        // live ones past that floor cannot help, so stop once they are the
        // smaller contribution.
        if frozen_error > target && live_error <= frozen_error {
            return total;
        }

        // Split the worst live panel.
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.error.total_cmp(&y.error))
            .map(|(i, _)| i);
        let Some(worst) = worst else { return total };
        let panel = panels.swap_remove(worst);
        let width = panel.b - panel.a;
        // Subdivision floor: at a ten-millionth of the span a panel's true
        // contribution to the error is negligible for any bounded integrand,
        // while integrands that are noisy at the evaluation-tolerance level
        // would otherwise soak up the whole budget without ever meeting the
        // estimate. Freeze and move on.
        if width.abs() <= 1e-7 * span {
            frozen_value += panel.value;
            frozen_error += panel.error;
            continue;
        }
        let mid = 0.5 * (panel.a + panel.b);
        let (lv, le) = gk15(&f, panel.a, mid);
        let (rv, re) = gk15(&f, mid, panel.b);
        panels.push(Panel { a: panel.a, b: mid, value: lv, error: le });
        panels.push(Panel { a: mid, b: panel.b, value: rv, error: re });
    }

    frozen_value + panels.iter().map(|p| p.value).sum::<f64>()
}
