use parking_ilu::ilu::{FullInfoRecord, RecordSet};
use parking_ilu::oracle::{constant_gap, Oracle, Tolerances};
use parking_ilu::simulate::{sample_path, RngStream};
use parking_ilu::{EnvironmentParams, Family, IntensityModel};
use proptest::prelude::*;

fn env() -> EnvironmentParams {
    EnvironmentParams::new(-2.0, 2.0).unwrap()
}

/// Class members for S = −2, L = 2 across the closed-form families.
fn member() -> impl Strategy<Value = IntensityModel> {
    let low = env().lower_bound();
    let constant = (low..=2.0).prop_map(|rate| Family::Constant { rate });
    let sinusoidal = (0.0..0.5f64, 0.0..1.0f64, 0.1..3.0f64, 0.0..1.0f64).prop_map(move |(amp, pos, freq, sign)| {
        let base = low + amp + pos * (2.0 - 2.0 * amp - low);
        let amplitude = if sign < 0.5 { -amp } else { amp };
        Family::Sinusoidal {
            base,
            amplitude,
            frequency: freq.min(2.0 / amp.max(1e-9)),
        }
    });
    let ramp = (0.0..0.5f64, 0.0..1.0f64, -3.0..3.0f64, 0.3..2.0f64).prop_map(move |(amp, pos, center, width)| {
        Family::TanhRamp {
            base: low + amp + pos * (2.0 - 2.0 * amp - low),
            amplitude: amp,
            center,
            width,
        }
    });
    prop_oneof![constant, sinusoidal, ramp].prop_map(|f| IntensityModel::new(f, env()).unwrap())
}

fn records() -> impl Strategy<Value = Vec<FullInfoRecord>> {
    prop::collection::vec(
        (prop::collection::vec(-2.0..0.0f64, 0..8), 1e-3..5.0f64).prop_map(|(mut j, tau)| {
            j.sort_by(f64::total_cmp);
            j.dedup();
            FullInfoRecord::new(j, tau, -2.0).unwrap()
        }),
        1..12,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_members_validate(m in member()) {
        prop_assert!(m.validate().passed(), "{}", m.family());
    }

    #[test]
    fn integrated_intensity_sandwich(m in member(), t in 0.0..1.0f64) {
        let e = m.env();
        let y = e.street_start() * t;
        let big = -m.cumulative(y).unwrap();
        prop_assert!(big >= e.lower_bound() * y.abs() - 1e-12);
        prop_assert!(big <= e.class_bound() * y.abs() + 1e-12);
    }

    #[test]
    fn cumulative_strictly_increasing(m in member(), a in -2.0..8.0f64, d in 1e-3..2.0f64) {
        prop_assert!(m.cumulative(a + d).unwrap() > m.cumulative(a).unwrap());
    }

    #[test]
    fn derivative_matches_central_difference(m in member(), u in -1.99999..8.0f64) {
        let h = 1e-5;
        let fd = (m.evaluate(u + h).unwrap() - m.evaluate(u - h).unwrap()) / (2.0 * h);
        prop_assert!((m.derivative(u).unwrap() - fd).abs() <= 10.0 * h * h + 1e-9);
    }

    #[test]
    fn oracle_invariants(m in member(), t in 0.0..1.0f64) {
        let o = Oracle::new(m.clone(), Tolerances::default()).unwrap();
        let e = m.env();
        let b_star = o.b_star();
        prop_assert!(b_star > e.street_start() && b_star < 0.0);
        prop_assert!(b_star >= e.min_optimal_threshold() - 1e-9);
        let r = o.result();
        prop_assert!((r.b_star.abs() - r.expected_cost_at_star).abs() <= 1e-6);
        let b = e.street_start() * t;
        let gap = o.gap(b).unwrap();
        prop_assert!(gap >= 0.0);
        let direct = o.expected_cost(b).unwrap();
        let balance = o.expected_cost_balance(b).unwrap();
        prop_assert!((direct - balance).abs() < 1e-7, "{direct} vs {balance}");
        if let Some(rate) = m.constant_rate() {
            prop_assert!((gap - constant_gap(rate, b)).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_hat_nonincreasing(recs in records(), a in -2.0..0.0f64, d in 0.0..2.0f64) {
        let set = RecordSet::from_records(&recs);
        let hi = (a + d).min(0.0);
        prop_assert!(set.gamma_hat(a).unwrap() >= set.gamma_hat(hi).unwrap());
        prop_assert_eq!(set.gamma_hat(0.0).unwrap(), 0.0);
    }

    #[test]
    fn solved_threshold_balances(recs in records()) {
        let set = RecordSet::from_records(&recs);
        let b = set.solve_threshold(-2.0).unwrap();
        prop_assert!((-2.0..=0.0).contains(&b));
        let phi = set.phi_hat().unwrap();
        let mass = set.piecewise_mass(b).unwrap();
        if b > -2.0 {
            prop_assert!((mass - phi).abs() <= 1e-12 * phi.max(1.0), "{mass} vs {phi}");
        } else {
            prop_assert!(mass <= phi + 1e-12);
        }
    }

    #[test]
    fn incremental_pool_matches_batch(recs in records()) {
        let mut inc = RecordSet::new();
        for r in &recs {
            inc.push(r.clone());
        }
        let batch = RecordSet::from_records(&recs);
        prop_assert_eq!(inc.pooled_jumps(), batch.pooled_jumps());
        prop_assert_eq!(inc.solve_threshold(-2.0).unwrap(), batch.solve_threshold(-2.0).unwrap());
    }

    #[test]
    fn path_invariants(m in member(), seed in any::<u64>(), t in 0.0..1.0f64) {
        let b = -2.0 * t;
        let stream = RngStream::new(seed, 1, 2);
        let obs = sample_path(&m, b, &stream).unwrap();
        prop_assert!(obs.stop_position > b);
        prop_assert_eq!(*obs.jump_positions.last().unwrap(), obs.stop_position);
        prop_assert!(obs.jump_positions.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(obs.jump_positions.iter().all(|&x| x >= -2.0));
        prop_assert_eq!(obs.jump_positions.iter().filter(|&&x| x > b).count(), 1);
        prop_assert_eq!(sample_path(&m, b, &stream).unwrap(), obs);
    }
}
