use icnoma::analysis::{rate_report, rates_noma3, transmission_rate};
use icnoma::checks::sizes_fit_median;
use icnoma::report::{run, sweep, RunOptions};
use icnoma::scheduler::{build_plan, TransmissionKind};
use icnoma::{
    assign_groups, BitMatrix, ChannelState, ChannelState32, Group, GroupGains, GroupGains32, IndexCode, Lengths,
    PowerProfile, PowerProfile32, RandomInstanceSpec, RateParams, RateParams32, Scenario, ThreeGroupCode,
};
use proptest::prelude::*;

fn gains_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(1u32..10_000, 3..=9)
        .prop_map(|s| s.into_iter().map(|x| f64::from(x) / 100.0).collect::<Vec<_>>())
        .prop_shuffle()
}

fn profile_strategy() -> impl Strategy<Value = PowerProfile> {
    (0.02f64..1.0, 0.02f64..1.0, 0.02f64..1.0, 0.02f64..0.48, 0.1f64..100.0).prop_filter_map(
        "distinct shares",
        |(a, b, c, a1, p)| {
            let mut w = [a, b, c];
            w.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let t: f64 = w.iter().sum();
            PowerProfile::new(p, w[0] / t, w[1] / t, 1.0 - w[0] / t - w[1] / t, a1).ok()
        },
    )
}

fn group_gains_strategy() -> impl Strategy<Value = GroupGains> {
    (0.05f64..2.0, 0.05f64..5.0, 0.05f64..5.0)
        .prop_map(|(f, dm, dn)| GroupGains::new(f * (1.0 + dm) * (1.0 + dn), f * (1.0 + dm), f).unwrap())
}

fn code_with_lengths(l: (usize, usize, usize)) -> ThreeGroupCode {
    let c = |k: usize| IndexCode::new(BitMatrix::unit_rows(8, 0..k)).unwrap();
    ThreeGroupCode {
        far: c(l.0),
        mid: c(l.1),
        near: c(l.2),
    }
}

proptest! {
    #[test]
    fn grouping_partitions_users(gains in gains_strategy()) {
        let n = gains.len();
        if let Ok(ga) = assign_groups(&ChannelState::new(gains).unwrap()) {
            let mut all: Vec<usize> = [&ga.far, &ga.intermediate, &ga.near].into_iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn grouping_is_permutation_equivariant(gains in gains_strategy(), seed in any::<u64>()) {
        let n = gains.len();
        let mut perm: Vec<usize> = (0..n).collect();
        // Fisher-Yates driven by a splitmix sequence
        let mut x = seed;
        for i in (1..n).rev() {
            x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let j = ((x ^ (x >> 31)) % (i as u64 + 1)) as usize;
            perm.swap(i, j);
        }
        let permuted: Vec<f64> = perm.iter().map(|&i| gains[i]).collect();
        let a = assign_groups(&ChannelState::new(gains).unwrap());
        let b = assign_groups(&ChannelState::new(permuted).unwrap());
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            for (new, &old) in perm.iter().enumerate() {
                prop_assert_eq!(b.group_of(new), a.group_of(old));
            }
        }
    }

    #[test]
    fn separated_clusters_map_to_groups(
        sizes in (1usize..=3, 1usize..=3, 1usize..=3).prop_map(|(a, b, c)| [a, b, c]),
        jitter in prop::collection::vec(-1.0f64..1.0, 9),
    ) {
        prop_assume!(sizes_fit_median(sizes));
        let centers = [10.0, 5.0, 1.0];
        let mut gains = Vec::new();
        let mut truth = Vec::new();
        for (k, &size) in sizes.iter().enumerate() {
            for _ in 0..size {
                gains.push(centers[k] + 0.9 * jitter[gains.len()]);
                truth.push([Group::Near, Group::Intermediate, Group::Far][k]);
            }
        }
        let ga = assign_groups(&ChannelState::new(gains).unwrap()).unwrap();
        for (u, g) in truth.into_iter().enumerate() {
            prop_assert_eq!(ga.group_of(u), Some(g));
        }
    }

    #[test]
    fn plan_length_and_layer_order(l in (0usize..=6, 0usize..=6, 0usize..=6), profile in profile_strategy()) {
        let plan = build_plan(&code_with_lengths(l), &profile);
        prop_assert_eq!(plan.len(), Lengths::from(l).max());
        for t in &plan.transmissions {
            let coeffs: Vec<f64> = t.layers.iter().map(|x| x.coefficient).collect();
            prop_assert!(coeffs.windows(2).all(|w| w[0] < w[1]));
            prop_assert!((coeffs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            if t.kind == TransmissionKind::Noma3 {
                prop_assert_eq!(t.layers[2].target, Group::Far);
                prop_assert_eq!(coeffs, vec![profile.alpha, profile.beta, profile.gamma]);
            }
        }
    }

    #[test]
    fn transmission_rate_is_sum_of_layers(g in group_gains_strategy(), profile in profile_strategy()) {
        let rp = RateParams::new(g, &profile).unwrap();
        let plan = build_plan(&code_with_lengths((3, 2, 1)), &profile);
        for t in &plan.transmissions {
            let r = transmission_rate(t.kind, &rp);
            let total: f64 = r.layer_rates.iter().map(|x| x.1).sum();
            prop_assert_eq!(r.sum, total);
        }
        let report = rate_report(&plan, &rp).unwrap();
        prop_assert!(report.r_avg > report.r_ic_baseline);
    }

    #[test]
    fn noma3_sum_rate_increases_with_power(g in group_gains_strategy(), profile in profile_strategy()) {
        let rp = RateParams::new(g, &profile).unwrap();
        let mut last = 0.0;
        for k in 1..=200 {
            let s = rates_noma3(&rp.with_power(f64::from(k) * 0.5)).sum;
            prop_assert!(s > last);
            last = s;
        }
    }

    #[test]
    fn single_precision_tracks_double(g in group_gains_strategy(), profile in profile_strategy()) {
        let g32 = GroupGains32::new(g.near as f32, g.intermediate as f32, g.far as f32).unwrap();
        let pp32 = PowerProfile32::new(
            profile.p as f32, profile.alpha as f32, profile.beta as f32, profile.gamma as f32, profile.alpha1 as f32,
        );
        prop_assume!(pp32.is_ok());
        let r64 = rates_noma3(&RateParams::new(g, &profile).unwrap()).sum;
        let r32: RateParams32 = RateParams32::new(g32, &pp32.unwrap()).unwrap();
        let r32 = rates_noma3(&r32).sum;
        prop_assert!((f64::from(r32) - r64).abs() <= 1e-4 * r64.max(1.0));
        let _ = ChannelState32::new(vec![1.0f32, 2.0, 3.0]).unwrap();
    }
}

fn spec_strategy() -> impl Strategy<Value = RandomInstanceSpec> {
    (3usize..=7, any::<u64>(), 0.0f64..0.6, 0.2f64..0.7).prop_map(|(n, seed, side, demand)| RandomInstanceSpec {
        n,
        side_density: side,
        demand_density: demand,
        seed,
        ..RandomInstanceSpec::default()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scenario_json_roundtrips(spec in spec_strategy()) {
        let s = spec.generate().unwrap();
        prop_assert_eq!(Scenario::from_json_str(&s.emit()).unwrap(), s.clone());
        prop_assert_eq!(spec.generate().unwrap(), s);
    }

    #[test]
    fn run_is_deterministic_and_delivers(spec in spec_strategy()) {
        let s = spec.generate().unwrap();
        let opts = RunOptions::default();
        let a = run(&s, &opts).unwrap();
        let b = run(&s, &opts).unwrap();
        prop_assert!(a.delivery_verified);
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn sweep_rates_grow_with_power(spec in spec_strategy()) {
        let s = spec.generate().unwrap();
        let powers: Vec<f64> = (1..=20).map(|k| f64::from(k) * 5.0).collect();
        let rows = sweep(&s, &RunOptions::default(), &powers).unwrap();
        prop_assert_eq!(rows.len(), powers.len());
        for w in rows.windows(2) {
            if w[0].r_avg.is_nan() {
                continue;
            }
            prop_assert!(w[1].r_avg >= w[0].r_avg);
            prop_assert!(w[1].r_ic >= w[0].r_ic);
        }
        let single = sweep(&s, &RunOptions::default(), &[10.0]).unwrap();
        let direct = icnoma::report::SummaryRow::from(&run(&s, &RunOptions::default()).unwrap());
        prop_assert_eq!(format!("{:?}", single[0]), format!("{:?}", direct));
    }
}
