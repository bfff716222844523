//! Property tests for the state algebra and the two-state engine.

use num_complex::Complex64;
use proptest::prelude::*;

use zeno_core::quantum::{PathMode, PhotonState, SinkId};
use zeno_core::schedule::{build_schedule, LogicBit, ProtocolParams};
use zeno_core::tsvf::{
    abl_probability, backward_evolve, blocked_recursion_oracle, closed_form_p_d1_unblocked,
    forward_evolve,
};
use zeno_core::{tol, ZenoError};

fn any_complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn any_state() -> impl Strategy<Value = PhotonState> {
    [any_complex(), any_complex(), any_complex()]
        .prop_filter("nonzero", |amp| amp.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|amp| {
            let norm = amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            PhotonState::from_amplitudes([amp[0] / norm, amp[1] / norm, amp[2] / norm])
        })
}

fn any_pair() -> impl Strategy<Value = (PathMode, PathMode)> {
    prop_oneof![
        Just((PathMode::A, PathMode::B)),
        Just((PathMode::B, PathMode::C)),
        Just((PathMode::A, PathMode::C)),
        Just((PathMode::B, PathMode::A)),
        Just((PathMode::C, PathMode::B)),
    ]
}

#[derive(Clone, Debug)]
enum Step {
    Rotate((PathMode, PathMode), f64),
    Absorb(PathMode),
}

fn any_steps() -> impl Strategy<Value = Vec<Step>> {
    prop::collection::vec(
        prop_oneof![
            (any_pair(), -6.4f64..6.4).prop_map(|(pair, theta)| Step::Rotate(pair, theta)),
            prop_oneof![Just(PathMode::A), Just(PathMode::B), Just(PathMode::C)]
                .prop_map(Step::Absorb),
        ],
        0..40,
    )
}

proptest! {
    #[test]
    fn probability_is_conserved_by_any_event_sequence(state in any_state(), steps in any_steps()) {
        let mut s = state;
        for (i, step) in steps.iter().enumerate() {
            s = match step {
                Step::Rotate(pair, theta) => s.rotate(*pair, *theta).unwrap(),
                Step::Absorb(mode) => s.absorb(*mode, SinkId::D3 { cycle: i as u32 }, i),
            };
        }
        prop_assert!((s.total_probability() - 1.0).abs() < tol::ASSERT);
        prop_assert!(s.is_finite());
    }

    #[test]
    fn rotation_round_trip_is_identity(state in any_state(), pair in any_pair(), theta in -6.4f64..6.4) {
        let back = state.rotate(pair, theta).unwrap().rotate(pair, -theta).unwrap();
        for mode in PathMode::ALL {
            prop_assert!((back.amplitude(mode) - state.amplitude(mode)).norm() < tol::ASSERT);
        }
    }

    #[test]
    fn rotation_preserves_norm(state in any_state(), pair in any_pair(), theta in -6.4f64..6.4) {
        let rotated = state.rotate(pair, theta).unwrap();
        prop_assert!((rotated.live_norm_sqr() - state.live_norm_sqr()).abs() < tol::STEP * 10.0);
    }

    #[test]
    fn projectors_are_complete(state in any_state()) {
        for mode in PathMode::ALL {
            let mut reassembled = Complex64::ZERO;
            for part in PathMode::ALL.map(|p| state.project(p)) {
                reassembled += part.amplitude(mode);
            }
            prop_assert_eq!(reassembled, state.amplitude(mode));
        }
    }

    #[test]
    fn rotation_is_adjoint_consistent(x in any_state(), y in any_state(), pair in any_pair(), theta in -6.4f64..6.4) {
        // <Rx|Ry> = <x|y>
        let lhs = x.rotate(pair, theta).unwrap().inner_product(&y.rotate(pair, theta).unwrap());
        let rhs = x.inner_product(&y);
        prop_assert!((lhs - rhs).norm() < tol::ASSERT);
    }

    #[test]
    fn forward_runs_conserve_probability(m in 1u32..25, n in 1u32..25, blocked in any::<bool>()) {
        let bit = if blocked { LogicBit::One } else { LogicBit::Zero };
        let schedule = build_schedule(&ProtocolParams::new(m, n, bit)).unwrap();
        let report = forward_evolve(&schedule).report;
        prop_assert!((report.total - 1.0).abs() < tol::ASSERT);
    }

    #[test]
    fn forward_matches_both_oracles(m in 1u32..20, n in 1u32..20) {
        let unblocked = build_schedule(&ProtocolParams::new(m, n, LogicBit::Zero)).unwrap();
        let report = forward_evolve(&unblocked).report;
        prop_assert!((report.p_d1 - closed_form_p_d1_unblocked(m)).abs() < tol::ASSERT);

        let blocked = build_schedule(&ProtocolParams::new(m, n, LogicBit::One)).unwrap();
        let report = forward_evolve(&blocked).report;
        let oracle = blocked_recursion_oracle(m, n);
        prop_assert!((report.p_d1 - oracle.p_d1).abs() < tol::ASSERT);
        prop_assert!((report.p_d2 - oracle.p_d2).abs() < tol::ASSERT);
        prop_assert!((report.p_bob_absorb_sum() - oracle.p_absorbed).abs() < tol::ASSERT);
    }

    #[test]
    fn traces_keep_overlap_constant_and_weak_values_summing(
        m in 1u32..12,
        n in 1u32..12,
        blocked in any::<bool>(),
        pick in 0usize..64,
    ) {
        let bit = if blocked { LogicBit::One } else { LogicBit::Zero };
        let schedule = build_schedule(&ProtocolParams::new(m, n, bit)).unwrap();
        let run = forward_evolve(&schedule);
        // Post-select on a sink that actually fires.
        let sinks: Vec<SinkId> = run
            .final_state()
            .leaks()
            .iter()
            .filter(|r| r.amplitude.norm() >= 1e-6)
            .map(|r| r.sink)
            .collect();
        prop_assume!(!sinks.is_empty());
        let post = sinks[pick % sinks.len()];
        let trace = backward_evolve(&schedule, &run, post).unwrap();

        let anchor = trace.slices[trace.sink_event_index].overlap;
        for slice in &trace.slices {
            prop_assert!((slice.overlap - anchor).norm() < tol::ASSERT);
            if trace.in_two_state_region(slice.slice_index) {
                let sum: Complex64 = slice.weak_values.iter().sum();
                prop_assert!((sum - Complex64::ONE).norm() < tol::WEAK_SUM);
            }
        }
    }

    #[test]
    fn abl_outputs_stay_in_range(fwd in any_state(), bwd in any_state()) {
        for mode in PathMode::ALL {
            match abl_probability(&fwd, &bwd, mode) {
                Ok(p) => prop_assert!((0.0..=1.0).contains(&p)),
                Err(ZenoError::UndefinedAbl) => {}
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
