//! The C^2 transition profile used by every cutoff.
//!
//! `H` is 0 on (-inf, 1], 1 on [2, +inf), and on [1, 2] the unique quintic
//! with H' = H'' = 0 at both ends. With u = t - 1:
//!
//! ```text
//! H  = 10 u^3 - 15 u^4 + 6 u^5
//! H' = 30 u^2 (u - 1)^2
//! H''= 60 u (2u - 1)(u - 1)
//! ```
//!
//! H' >= 0 on the ramp, so H is monotone; all cutoff derivative bounds trace
//! back to the fixed suprema of H' (15/8 at the midpoint) and H''.

/// Evaluates `(H(t), H'(t), H''(t))`.
pub fn transition_h(t: f64) -> (f64, f64, f64) {
    if t <= 1.0 {
        (0.0, 0.0, 0.0)
    } else if t >= 2.0 {
        (1.0, 0.0, 0.0)
    } else {
        let u = t - 1.0;
        let u2 = u * u;
        let h = u2 * u * (10.0 + u * (-15.0 + 6.0 * u));
        let dh = 30.0 * u2 * (u - 1.0) * (u - 1.0);
        let ddh = 60.0 * u * (2.0 * u - 1.0) * (u - 1.0);
        (h, dh, ddh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Frozen by hand from the quintic coefficients before implementation:
    // u = 1/4: 10/64 - 15/256 + 6/1024 = 0.103515625
    // u = 1/2: 10/8 - 15/16 + 6/32   = 0.5
    // u = 3/4: 10 * 27/64 - 15 * 81/256 + 6 * 243/1024 = 0.896484375
    // H'(1.5) = 30 * (1/4) * (1/4) = 1.875
    #[test]
    fn ramp_values_match_hand_evaluation() {
        assert_eq!(transition_h(1.25).0, 0.103515625);
        assert_eq!(transition_h(1.5).0, 0.5);
        assert_eq!(transition_h(1.75).0, 0.896484375);
        assert_eq!(transition_h(1.5).1, 1.875);
    }

    #[test]
    fn flat_outside_the_ramp() {
        for t in [-3.0, 0.0, 0.5, 1.0] {
            assert_eq!(transition_h(t), (0.0, 0.0, 0.0));
        }
        for t in [2.0, 3.0, 100.0] {
            assert_eq!(transition_h(t), (1.0, 0.0, 0.0));
        }
    }

    #[test]
    fn monotone_on_the_ramp() {
        let mut prev = 0.0;
        for i in 0..=1000 {
            let t = 1.0 + i as f64 / 1000.0;
            let (h, dh, _) = transition_h(t);
            assert!(h >= prev);
            assert!(dh >= 0.0);
            prev = h;
        }
    }

    // C^2 matching at t = 1 and t = 2, read off the values alone: the
    // one-sided second difference is exactly zero on the flat side, and on
    // the ramp side it must vanish linearly in the step (H'' = 0 at the
    // joints, |H'''| = 60 there).
    #[test]
    fn second_derivative_continuous_at_joints() {
        let fd2 = |t: f64, e: f64| {
            let (a, _, _) = transition_h(t);
            let (b, _, _) = transition_h(t + e);
            let (c, _, _) = transition_h(t + 2.0 * e);
            (c - 2.0 * b + a) / (e * e)
        };
        assert_eq!(fd2(1.0, -1e-4), 0.0);
        assert_eq!(fd2(2.0, 1e-4), 0.0);
        for e in [1e-3, 1e-4] {
            assert!(fd2(1.0, e).abs() <= 70.0 * e, "{}", fd2(1.0, e));
            assert!(fd2(2.0, -e).abs() <= 70.0 * e, "{}", fd2(2.0, -e));
        }
        // and the analytic H'' goes to zero there
        assert_abs_diff_eq!(transition_h(1.0 + 1e-9).2, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(transition_h(2.0 - 1e-9).2, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn derivatives_match_finite_differences_inside_ramp() {
        for i in 1..20 {
            let t = 1.0 + i as f64 / 20.0;
            let e = 1e-6;
            let (_, dh, ddh) = transition_h(t);
            let (hp, dhp, _) = transition_h(t + e);
            let (hm, dhm, _) = transition_h(t - e);
            assert_abs_diff_eq!(dh, (hp - hm) / (2.0 * e), epsilon = 1e-8);
            assert_abs_diff_eq!(ddh, (dhp - dhm) / (2.0 * e), epsilon = 1e-7);
        }
    }
}
