//! Entanglement and directional EPR steering of two-qubit X-states.
//!
//! Basis order is `|00>, |01>, |10>, |11>` with the first label belonging to
//! Alice (detector A). Steering is certified by asking whether the mixture
//! `τ = ρ/√3 + (1 - 1/√3) ρ_A ⊗ I/2` (or its mirror with `ρ_B`) is entangled,
//! which for X-states reduces to closed-form thresholds on the coherences.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Allowed deviation of the trace from one.
pub const TRACE_TOLERANCE: f64 = 1e-12;

/// Diagonal entries down to `-DIAGONAL_SLACK` are accepted and clamped to zero.
pub const DIAGONAL_SLACK: f64 = 1e-12;

/// Two-qubit density matrix with nonzero entries only on the diagonal and
/// anti-diagonal. Only the upper coherences are stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XState {
    d11: f64,
    d22: f64,
    d33: f64,
    d44: f64,
    c14: Complex64,
    c23: Complex64,
}

impl XState {
    /// Builds an X-state from its diagonal `[ρ11, ρ22, ρ33, ρ44]` and the
    /// coherences `ρ14`, `ρ23`.
    ///
    /// Positivity of the full matrix is not required: the leading-order
    /// detector state has `ρ44 = 0` with `ρ14 ≠ 0`.
    pub fn new(diagonal: [f64; 4], c14: Complex64, c23: Complex64) -> Result<Self> {
        if diagonal.iter().any(|d| !d.is_finite())
            || !c14.re.is_finite()
            || !c14.im.is_finite()
            || !c23.re.is_finite()
            || !c23.im.is_finite()
        {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        for (i, &d) in diagonal.iter().enumerate() {
            if !(-DIAGONAL_SLACK..=1.0 + DIAGONAL_SLACK).contains(&d) {
                return Err(Error::InvalidState(format!("diagonal entry {} = {d} outside [0, 1]", i + 1)));
            }
        }
        let trace: f64 = diagonal.iter().sum();
        if (trace - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let [d11, d22, d33, d44] = diagonal.map(|d| d.max(0.0));
        Ok(Self { d11, d22, d33, d44, c14, c23 })
    }

    pub fn diagonal(&self) -> [f64; 4] {
        [self.d11, self.d22, self.d33, self.d44]
    }

    pub fn c14(&self) -> Complex64 {
        self.c14
    }

    pub fn c23(&self) -> Complex64 {
        self.c23
    }

    pub fn trace(&self) -> f64 {
        self.d11 + self.d22 + self.d33 + self.d44
    }

    /// Dense 4×4 matrix, rows in basis order.
    pub fn to_matrix(&self) -> [[Complex64; 4]; 4] {
        let zero = Complex64::new(0.0, 0.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        [
            [re(self.d11), zero, zero, self.c14],
            [zero, re(self.d22), self.c23, zero],
            [zero, self.c23.conj(), re(self.d33), zero],
            [self.c14.conj(), zero, zero, re(self.d44)],
        ]
    }
}

/// The three combinations of populations that set the steering thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteeringThresholds {
    pub g_a: f64,
    pub g_b: f64,
    pub g_c: f64,
}

/// Steering in both directions, their difference, and the concurrence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteeringResult {
    /// Steering from Alice to Bob.
    pub s_ab: f64,
    /// Steering from Bob to Alice.
    pub s_ba: f64,
    /// `s_ab - s_ba`.
    pub asymmetry: f64,
    pub concurrence: f64,
}

impl SteeringResult {
    pub(crate) fn new(s_ab: f64, s_ba: f64, concurrence: f64) -> Self {
        Self { s_ab, s_ba, asymmetry: s_ab - s_ba, concurrence }
    }
}

/// `sqrt(max(x, 0))`.
#[inline]
pub(crate) fn sqrt_clamped(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

/// Wootters concurrence of an X-state.
pub fn concurrence(rho: &XState) -> f64 {
    let a = rho.c14.norm() - (rho.d22 * rho.d33).sqrt();
    let b = rho.c23.norm() - (rho.d11 * rho.d44).sqrt();
    2.0 * a.max(b).max(0.0)
}

pub fn steering_thresholds(rho: &XState) -> SteeringThresholds {
    let XState { d11, d22, d33, d44, .. } = *rho;
    let mixed = 0.25 * (d11 + d44) * (d22 + d33);
    SteeringThresholds {
        g_a: 0.5 * (2.0 - SQRT_3) * d11 * d44 + 0.5 * (2.0 + SQRT_3) * d22 * d33 + mixed,
        g_b: 0.25 * (d11 - d44) * (d22 - d33),
        g_c: 0.5 * (2.0 + SQRT_3) * d11 * d44 + 0.5 * (2.0 - SQRT_3) * d22 * d33 + mixed,
    }
}

fn steering_with_offset(rho: &XState, offset: f64) -> f64 {
    let g = steering_thresholds(rho);
    let outer = rho.c14.norm() - sqrt_clamped(g.g_a + offset);
    let inner = rho.c23.norm() - sqrt_clamped(g.g_c + offset);
    outer.max(inner).max(0.0)
}

/// Steering from Bob to Alice.
pub fn steering_b_to_a(rho: &XState) -> f64 {
    let g_b = steering_thresholds(rho).g_b;
    steering_with_offset(rho, -g_b)
}

/// Steering from Alice to Bob.
pub fn steering_a_to_b(rho: &XState) -> f64 {
    let g_b = steering_thresholds(rho).g_b;
    steering_with_offset(rho, g_b)
}

/// `steering_a_to_b - steering_b_to_a`.
pub fn steering_asymmetry(rho: &XState) -> f64 {
    steering_a_to_b(rho) - steering_b_to_a(rho)
}

/// All steering measures of `rho` at once.
pub fn steering_result(rho: &XState) -> SteeringResult {
    SteeringResult::new(steering_a_to_b(rho), steering_b_to_a(rho), concurrence(rho))
}

fn tau(rho: &XState, first_pair: f64, second_pair: f64, marginal_of_a: bool) -> XState {
    let k = (3.0 - SQRT_3) / 6.0;
    let (m, n) = (k * first_pair, k * second_pair);
    let s = 1.0 / SQRT_3;
    let [d11, d22, d33, d44] = rho.diagonal();
    let diagonal = if marginal_of_a {
        [s * d11 + m, s * d22 + m, s * d33 + n, s * d44 + n]
    } else {
        [s * d11 + m, s * d22 + n, s * d33 + m, s * d44 + n]
    };
    XState { d11: diagonal[0], d22: diagonal[1], d33: diagonal[2], d44: diagonal[3], c14: rho.c14 * s, c23: rho.c23 * s }
}

/// `τ_AB = ρ/√3 + (1 - 1/√3) ρ_A ⊗ I/2`; entangled iff Bob can steer Alice.
pub fn build_tau_ab(rho: &XState) -> XState {
    tau(rho, rho.d11 + rho.d22, rho.d33 + rho.d44, true)
}

/// `τ_BA = ρ/√3 + (1 - 1/√3) I/2 ⊗ ρ_B`; entangled iff Alice can steer Bob.
pub fn build_tau_ba(rho: &XState) -> XState {
    tau(rho, rho.d11 + rho.d33, rho.d22 + rho.d44, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn bell() -> XState {
        XState::new([0.5, 0.0, 0.0, 0.5], c(0.5), c(0.0)).unwrap()
    }

    fn mixed() -> XState {
        XState::new([0.25; 4], c(0.0), c(0.0)).unwrap()
    }

    #[test]
    fn rejects_bad_states() {
        assert!(XState::new([0.5, 0.0, 0.0, 0.6], c(0.0), c(0.0)).is_err());
        assert!(XState::new([1.1, -0.1, 0.0, 0.0], c(0.0), c(0.0)).is_err());
        assert!(XState::new([0.5, 0.5, 0.0, 0.0], c(f64::NAN), c(0.0)).is_err());
        let clamped = XState::new([1.0 + 5e-13, -5e-13, 0.0, 0.0], c(0.0), c(0.0)).unwrap();
        assert_eq!(clamped.diagonal()[1], 0.0);
    }

    #[test]
    fn concurrence_examples() {
        assert_abs_diff_eq!(concurrence(&bell()), 1.0, epsilon = 1e-15);
        assert_eq!(concurrence(&mixed()), 0.0);
        let werner = XState::new([0.45, 0.05, 0.05, 0.45], c(0.4), c(0.0)).unwrap();
        assert_abs_diff_eq!(concurrence(&werner), 0.7, epsilon = 1e-15);
    }

    #[test]
    fn threshold_examples() {
        let g = steering_thresholds(&bell());
        assert_abs_diff_eq!(g.g_a, (2.0 - SQRT_3) / 8.0, epsilon = 1e-16);
        assert_abs_diff_eq!(g.g_a, 0.033_493_649_053_890_34, epsilon = 1e-16);
        assert_eq!(g.g_b, 0.0);
        assert_abs_diff_eq!(g.g_c, 0.466_506_350_946_109_7, epsilon = 1e-16);

        let g = steering_thresholds(&mixed());
        assert_abs_diff_eq!(g.g_a, 0.1875, epsilon = 1e-16);
        assert_abs_diff_eq!(g.g_c, 0.1875, epsilon = 1e-16);
        assert_eq!(g.g_b, 0.0);

        let balanced = XState::new([0.3, 0.2, 0.2, 0.3], c(0.1), c(0.05)).unwrap();
        assert_eq!(steering_thresholds(&balanced).g_b, 0.0);
    }

    #[test]
    fn steering_examples() {
        let expected = 0.316_987_298_107_780_7;
        assert_abs_diff_eq!(steering_b_to_a(&bell()), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(steering_a_to_b(&bell()), expected, epsilon = 1e-15);
        assert_eq!(steering_asymmetry(&bell()), 0.0);
        assert_eq!(steering_b_to_a(&mixed()), 0.0);
        assert_eq!(steering_a_to_b(&mixed()), 0.0);
        let ground = XState::new([1.0, 0.0, 0.0, 0.0], c(0.0), c(0.0)).unwrap();
        assert_eq!(steering_b_to_a(&ground), 0.0);
    }

    fn asymmetry_by_hand(d: [f64; 4], c14: f64, c23: f64) -> f64 {
        let [d11, d22, d33, d44] = d;
        let mixed = 0.25 * (d11 + d44) * (d22 + d33);
        let g_a = 0.5 * (2.0 - SQRT_3) * d11 * d44 + 0.5 * (2.0 + SQRT_3) * d22 * d33 + mixed;
        let g_b = 0.25 * (d11 - d44) * (d22 - d33);
        let g_c = 0.5 * (2.0 + SQRT_3) * d11 * d44 + 0.5 * (2.0 - SQRT_3) * d22 * d33 + mixed;
        let ba = (c14 - (g_a - g_b).max(0.0).sqrt()).max(c23 - (g_c - g_b).max(0.0).sqrt()).max(0.0);
        let ab = (c14 - (g_a + g_b).max(0.0).sqrt()).max(c23 - (g_c + g_b).max(0.0).sqrt()).max(0.0);
        ab - ba
    }

    #[test]
    fn asymmetry_regression() {
        let cases = [
            ([0.9, 0.06, 0.03, 0.01], 0.05, 0.04),
            ([0.5, 0.3, 0.1, 0.1], 0.2, 0.0),
            ([0.6, 0.05, 0.3, 0.05], 0.17, 0.1),
        ];
        for (d, c14, c23) in cases {
            let rho = XState::new(d, c(c14), c(c23)).unwrap();
            assert_abs_diff_eq!(steering_asymmetry(&rho), asymmetry_by_hand(d, c14, c23), epsilon = 1e-16);
        }
    }

    #[test]
    fn tau_examples() {
        let t = build_tau_ab(&mixed());
        for d in t.diagonal() {
            assert_abs_diff_eq!(d, 0.25, epsilon = 1e-16);
        }
        let t = build_tau_ab(&bell());
        let k = (3.0 - SQRT_3) / 12.0;
        let outer = 1.0 / (2.0 * SQRT_3) + k;
        let d = t.diagonal();
        assert_abs_diff_eq!(d[0], outer, epsilon = 1e-16);
        assert_abs_diff_eq!(d[0], 0.394_337_567_297_406_4, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], k, epsilon = 1e-16);
        assert_abs_diff_eq!(d[2], k, epsilon = 1e-16);
        assert_abs_diff_eq!(d[3], outer, epsilon = 1e-16);
        assert_abs_diff_eq!(t.c14().re, 1.0 / (2.0 * SQRT_3), epsilon = 1e-16);
        assert_eq!(build_tau_ba(&bell()), t);
        assert_eq!(build_tau_ba(&mixed()), build_tau_ab(&mixed()));
    }

    fn x_state() -> impl Strategy<Value = XState> {
        (
            prop::array::uniform4(1e-3..1.0f64),
            0.0..1.0f64,
            0.0..1.0f64,
            -3.2..3.2f64,
            -3.2..3.2f64,
        )
            .prop_map(|(raw, f14, f23, p14, p23)| {
                let total: f64 = raw.iter().sum();
                let d = raw.map(|x| x / total);
                let c14 = Complex64::from_polar(f14 * (d[0] * d[3]).sqrt(), p14);
                let c23 = Complex64::from_polar(f23 * (d[1] * d[2]).sqrt(), p23);
                XState::new(d, c14, c23).unwrap()
            })
    }

    proptest! {
        #[test]
        fn tau_is_trace_preserving(rho in x_state()) {
            prop_assert!((build_tau_ab(&rho).trace() - 1.0).abs() < 1e-14);
            prop_assert!((build_tau_ba(&rho).trace() - 1.0).abs() < 1e-14);
        }

        #[test]
        fn threshold_gap_identity(rho in x_state()) {
            let g = steering_thresholds(&rho);
            let [d11, d22, d33, d44] = rho.diagonal();
            prop_assert!((g.g_c - g.g_a - SQRT_3 * (d11 * d44 - d22 * d33)).abs() <= 1e-14);
            prop_assert!(g.g_a >= 0.0 && g.g_c >= 0.0);
        }

        #[test]
        fn steering_is_nonnegative_and_implies_entanglement(rho in x_state()) {
            let r = steering_result(&rho);
            prop_assert!(r.s_ab >= 0.0 && r.s_ba >= 0.0);
            prop_assert_eq!(r.asymmetry, r.s_ab - r.s_ba);
            if r.s_ab > 1e-12 || r.s_ba > 1e-12 {
                prop_assert!(r.concurrence > 0.0);
            }
        }

        #[test]
        fn equal_middle_populations_give_zero_asymmetry(rho in x_state()) {
            let [d11, d22, d33, d44] = rho.diagonal();
            let mid = 0.5 * (d22 + d33);
            let sym = XState::new([d11, mid, mid, d44], rho.c14(), rho.c23()).unwrap();
            prop_assert_eq!(steering_asymmetry(&sym), 0.0);
            prop_assert_eq!(steering_a_to_b(&sym), steering_b_to_a(&sym));
        }
    }
}
