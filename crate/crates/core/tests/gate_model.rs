use cfqc_core::gate_model::{
    finite_map, finite_map_with, ideal_map, outer_recursion, zeno_channel_presence_prob, zeno_prob_d0, AtomPhotonInput,
    CfGateParams, GateOutcome, InnerCycles, NoiseParams,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn params(m: u32, n: u32) -> CfGateParams {
    CfGateParams::new(m, n).unwrap()
}

fn superposed(m: u32, n: u32) -> GateOutcome {
    finite_map(
        &AtomPhotonInput::equal_superposition(),
        &params(m, n),
        &NoiseParams::IDEAL,
    )
    .unwrap()
}

/// Independent oracle for the blocked branch in the unbounded-inner limit:
/// plain rotation by β₁, M times, with nothing removed.
fn rotation_only(m: u32) -> (f64, f64) {
    let b = std::f64::consts::PI / (2.0 * f64::from(m));
    let (mut x, mut y) = (1.0f64, 0.0f64);
    for _ in 0..m {
        (x, y) = (b.cos() * x - b.sin() * y, b.sin() * x + b.cos() * y);
    }
    (x, y)
}

#[test]
fn unbounded_inner_limit_matches_plain_rotation() {
    for m in [1, 2, 5, 10, 37, 100] {
        let out = finite_map_with(
            &AtomPhotonInput::ground(),
            &params(m, 1),
            &NoiseParams::IDEAL,
            InnerCycles::Unbounded,
        )
        .unwrap();
        let (x, y) = rotation_only(m);
        assert!((out.c1.re - x).abs() < 1e-10 && (out.c2.re - y).abs() < 1e-10, "M={m}");
        assert!((outer_recursion(&params(m, 1), 1.0).y - y).abs() < 1e-10);
    }
}

#[test]
fn fidelity_grows_with_inner_cycles() {
    for m in [10, 20, 30] {
        let f: Vec<f64> = [1, 2, 5, 10, 20]
            .iter()
            .map(|r| superposed(m, r * m).fidelity)
            .collect();
        assert!(f.windows(2).all(|w| w[1] >= w[0]), "M={m}: {f:?}");
    }
}

#[test]
#[ignore = "unattainable: the |e⟩ branch contributes cos^{2M}(π/2M)/2 to E, which depends on M alone"]
fn efficiency_collapses_at_constant_ratio() {
    for ratio in [2, 5, 10] {
        let e: Vec<f64> = (10..=50)
            .step_by(10)
            .map(|m| superposed(m, ratio * m).efficiency)
            .collect();
        let spread = e.iter().cloned().fold(f64::MIN, f64::max) - e.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 0.02, "N/M={ratio}: spread {spread}");
    }
}

#[test]
fn loss_lowers_fidelity_faster_than_missing() {
    let p = params(10, 200);
    let run = |g, e| {
        finite_map(
            &AtomPhotonInput::equal_superposition(),
            &p,
            &NoiseParams::new(g, e).unwrap(),
        )
        .unwrap()
    };
    let f: Vec<f64> = (0..=5).map(|i| run(0.02 * f64::from(i), 0.0).fidelity).collect();
    assert!(f.windows(2).all(|w| w[1] < w[0]));
    let (base, loss, miss) = (run(0.0, 0.0), run(0.1, 0.0), run(0.0, 0.1));
    assert!((miss.fidelity - base.fidelity).abs() < (loss.fidelity - base.fidelity).abs());
    assert!((miss.efficiency - base.efficiency).abs() < (loss.efficiency - base.efficiency).abs());
}

#[test]
fn zeno_limits_are_monotone() {
    let d0: Vec<f64> = (4..200).map(zeno_prob_d0).collect();
    let pr: Vec<f64> = (4..200).map(|m| zeno_channel_presence_prob(m).unwrap()).collect();
    assert!(d0.windows(2).all(|w| w[1] > w[0]));
    assert!(pr.windows(2).all(|w| w[1] > w[0]));
    assert!(zeno_prob_d0(100_000) > 0.9999);
}

#[test]
fn ideal_map_is_perfect() {
    let o = ideal_map(&AtomPhotonInput::equal_superposition());
    assert!((o.efficiency - 1.0).abs() < 1e-15 && (o.fidelity - 1.0).abs() < 1e-15);
}

fn input() -> impl Strategy<Value = AtomPhotonInput> {
    (0.0f64..std::f64::consts::FRAC_PI_2, -3.2f64..3.2).prop_map(|(t, phi)| {
        AtomPhotonInput::new(Complex64::new(t.cos(), 0.0), Complex64::from_polar(t.sin(), phi)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn outcome_fields_are_recomputable(
        inp in input(), m in 1u32..60, n in 1u32..400, g in 0.0f64..=1.0, e in 0.0f64..=1.0,
    ) {
        let o = finite_map(&inp, &params(m, n), &NoiseParams::new(g, e).unwrap()).unwrap();
        let eff: f64 = o.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((o.efficiency - eff).abs() < 1e-15);
        prop_assert!(o.efficiency <= 1.0 + 1e-12);
        if eff > 0.0 {
            let overlap = (inp.c_e().conj() * o.c3 + inp.c_g().conj() * o.c2).norm_sqr();
            prop_assert!((o.fidelity - (overlap / eff).min(1.0)).abs() < 1e-12);
        } else {
            prop_assert!(o.degenerate && o.fidelity == 0.0);
        }
        prop_assert!((0.0..=1.0).contains(&o.fidelity));
    }
}
