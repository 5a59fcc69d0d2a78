use doleans::{
    integrate_control, jacod_functional, lemma2_lhs, lemma3_gap, make_eta_distribution,
    make_first_jump_time, make_xi_distribution, monotone_reduction_gap, relative_identity_residual,
    sde_residual, stoch_exponential, theorem1_functional, transformed_jacod_integrand,
    transformed_jump, ContQv, Drift, InverseCdfDistribution, Jump, JumpPath, ModelKind,
    PredictableControl, ProcessModel,
};
use proptest::prelude::*;

fn control() -> impl Strategy<Value = PredictableControl> {
    (
        prop::collection::vec((0.05f64..4.0, 0.0f64..=1.0), 0..4),
        0.0f64..=1.0,
    )
        .prop_map(|(mut segs, last)| {
            segs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            segs.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-6);
            let breaks = segs.iter().map(|s| s.0).collect();
            let mut values: Vec<f64> = segs.iter().map(|s| s.1).collect();
            values.push(last);
            PredictableControl::piecewise(breaks, values).unwrap()
        })
}

/// Random finite-activity paths with linear drift and continuous part.
fn path() -> impl Strategy<Value = JumpPath> {
    (
        prop::collection::vec((0.01f64..1.0, -0.999f64..5.0), 0..5),
        -2.0f64..2.0,
        prop_oneof![Just(0.0), 0.0f64..2.0],
        0.0f64..1.0,
    )
        .prop_map(|(gaps, slope, rate, tail)| {
            let mut t = 0.0;
            let jumps: Vec<Jump<f64>> = gaps
                .iter()
                .map(|&(g, dm)| {
                    t += g;
                    Jump { t, dm }
                })
                .collect();
            let cont_qv = if rate == 0.0 {
                ContQv::Zero
            } else {
                ContQv::Linear { rate }
            };
            JumpPath::new(t + tail, jumps, Drift::Linear { slope }, cont_qv).unwrap()
        })
}

fn laws() -> [InverseCdfDistribution; 3] {
    [
        make_xi_distribution(),
        make_eta_distribution(),
        make_first_jump_time(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn control_integral_is_affine(p in path(), a in control(), b in control(), alpha in 0.0f64..=1.0) {
        let t = p.horizon();
        let mix = PredictableControl::affine(alpha, &a, &b).unwrap();
        let lhs = integrate_control(&p, &mix, t).unwrap();
        let rhs = alpha * integrate_control(&p, &a, t).unwrap() + (1.0 - alpha) * integrate_control(&p, &b, t).unwrap();
        let scale = 1.0 + p.jumps().iter().map(|j| j.dm.abs()).sum::<f64>() + p.drift_at(t).abs();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn control_and_complement_add_up(p in path(), a in control()) {
        let t = p.horizon();
        let sum = integrate_control(&p, &a, t).unwrap() + integrate_control(&p, &a.complement(), t).unwrap();
        let m = p.value_at(t) - p.value_at(0.0);
        let scale = 1.0 + p.jumps().iter().map(|j| j.dm.abs()).sum::<f64>() + p.drift_at(t).abs();
        prop_assert!((sum - m).abs() <= 1e-12 * scale, "{sum} vs {m}");
    }

    #[test]
    fn lemma2_nonnegative(x in 0.0f64..=1.0, eps in 1e-9f64..(1.0 - 1e-9)) {
        prop_assert!(lemma2_lhs(x, eps).unwrap() >= 0.0);
    }

    #[test]
    fn lemma3_nonnegative(a in 0.0f64..=1.0, l in (1e-9f64).ln()..(1e6f64).ln()) {
        let dm = l.exp() - 1.0;
        prop_assert!(lemma3_gap(a, dm).unwrap() >= -1e-12);
        prop_assert!(monotone_reduction_gap(a, dm).unwrap() >= -1e-12);
    }

    #[test]
    fn transformed_jump_stays_above_minus_one(a in 0.0f64..=1.0, dm in -0.999_999f64..1e6) {
        prop_assert!(transformed_jump(a, dm) > -1.0);
    }

    #[test]
    fn cdf_inverts_quantile(u in 1e-9f64..(1.0 - 1e-9), which in 0usize..3) {
        let d = &laws()[which];
        let x = d.inverse_cdf(u);
        prop_assert!((d.cdf(x) - u).abs() <= 1e-12 + 1e-9 * u.min(1.0 - u), "u={u} x={x} cdf={}", d.cdf(x));
    }

    #[test]
    fn sampled_paths_are_well_formed(seed in any::<u64>(), which in 0usize..3) {
        let m = ModelKind::ALL[which].build::<f64>();
        let p = m.sample_seeded(seed, 0).path;
        prop_assert!(!p.jumps().is_empty());
        for j in p.jumps() {
            prop_assert!(j.dm > -1.0 && j.t <= p.horizon());
            prop_assert!((p.value_at(j.t) - p.left_value_at(j.t) - j.dm).abs() <= 1e-12 * (1.0 + j.dm.abs()));
        }
        let e = stoch_exponential(&p, p.horizon()).unwrap();
        prop_assert!(e >= 0.0 && e.is_finite());
        prop_assert!(sde_residual(&p, p.horizon()).unwrap().abs() <= 1e-9 * e.max(1.0));
    }

    #[test]
    fn girsanov_identity_on_random_paths(p in path(), a in control()) {
        let r = relative_identity_residual(&p, &a).unwrap();
        prop_assert!(r.abs() <= 1e-12, "{r:e}");
    }

    #[test]
    fn transformed_jacod_is_dominated(p in path(), a in control()) {
        let t = p.horizon();
        let lhs = transformed_jacod_integrand(&p, &a, t).unwrap();
        let mut qv_term = 0.0;
        for (lo, hi, v) in a.segments() {
            if lo >= t {
                break;
            }
            let end = hi.map_or(t, |h| h.min(t));
            qv_term += 0.5 * (1.0 - v) * (1.0 - v) * (p.cont_qv_at(end) - p.cont_qv_at(lo));
        }
        let rhs = jacod_functional(&p, t).unwrap().log_value + qv_term;
        prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs.abs()), "{lhs} > {rhs}");
    }

    #[test]
    fn zero_control_matches_jacod(p in path(), eps in 0.01f64..0.99) {
        let t = p.horizon();
        let j = jacod_functional(&p, t).unwrap().log_value;
        let z = theorem1_functional(&p, &PredictableControl::zero(), eps, t).unwrap().log_value;
        prop_assert_eq!(j.to_bits(), z.to_bits());
    }
}
