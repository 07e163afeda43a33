//! Scalar float helpers routed through `libm` so the crate builds without std
//! and produces the same bits on every platform.

/// Guard factor for the unbounded-input transform: inputs are scaled by
/// `1 - ATANH_GUARD` before the inverse tanh so that values at the edge of
/// `[-1, 1]` stay inside the function's domain.
pub const ATANH_GUARD: f64 = 1e-6;

/// Hard clip applied after the guard scaling. Only reachable for inputs with
/// magnitude above 1, which the network never produces on its own.
pub const ATANH_CLIP: f64 = 1.0 - 1e-12;

#[inline]
pub fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}

#[inline]
pub fn tanh_deriv_from_output(y: f64) -> f64 {
    1.0 - y * y
}

/// Numerically stable logistic function.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

#[inline]
pub fn sigmoid_deriv_from_output(y: f64) -> f64 {
    y * (1.0 - y)
}

/// Inverse tanh with the guard scaling and clip described above:
/// `atanh(clip((1 - ATANH_GUARD) * x))`.
#[inline]
pub fn atanh_clamped(x: f64) -> f64 {
    let scaled = (1.0 - ATANH_GUARD) * x;
    let clipped = scaled.clamp(-ATANH_CLIP, ATANH_CLIP);
    libm::atanh(clipped)
}

/// Derivative of [`atanh_clamped`] with respect to its input. Zero in the
/// clipped region (the clip is flat there), `(1 - eps) / (1 - u^2)` inside.
#[inline]
pub fn atanh_clamped_deriv(x: f64) -> f64 {
    let scaled = (1.0 - ATANH_GUARD) * x;
    if scaled.abs() >= ATANH_CLIP {
        0.0
    } else {
        (1.0 - ATANH_GUARD) / (1.0 - scaled * scaled)
    }
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_at_origin() {
        assert_eq!(tanh(0.0), 0.0);
        assert_eq!(atanh_clamped(0.0), 0.0);
    }

    #[test]
    fn atanh_clamped_is_near_inverse_of_tanh() {
        let x = 0.5;
        let round_trip = tanh(atanh_clamped(x));
        assert!((round_trip - x).abs() < 1e-5, "got {round_trip}");
    }

    #[test]
    fn atanh_clamped_survives_out_of_range_input() {
        let y = atanh_clamped(1.5);
        assert!(y.is_finite());
        assert_eq!(atanh_clamped_deriv(1.5), 0.0);
    }

    #[test]
    fn sigmoid_is_stable_far_from_origin() {
        assert!(sigmoid(800.0) <= 1.0);
        assert!(sigmoid(-800.0) >= 0.0);
        assert!((sigmoid(0.0) - 0.5).abs() < 1e-15);
    }
}
