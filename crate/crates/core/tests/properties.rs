mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use noma::beamforming::{
    constraints_satisfied_within, optimize_beam, powers_for_beam, zf_multicluster, Beam, Cluster,
};
use noma::channel::{draw_channel, ComplexVector, FadingSpec};
use noma::downlink_rates::DownlinkScenario;
use noma::power_allocation::{min_power_allocation, rate_region_boundary, RateTargets};
use noma::random_access::{simulate_both_models, DecodingModel, RaConfig};
use noma::uplink_sic::UplinkScenario;

use common::{exact_throughput, exhaustive_throughput, own_rate, random_vector, rng, sorted_gains};

fn sorted_gains_strategy(max_users: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..100.0, 2..=max_users).prop_map(|mut g| {
        g.sort_by(|a, b| b.partial_cmp(a).unwrap());
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn stronger_users_decode_weaker_signals_faster(
        gains in sorted_gains_strategy(6),
        seed in any::<u64>(),
    ) {
        let mut r = rng(seed);
        let powers: Vec<f64> = gains.iter().map(|_| r.random_range(0.0..20.0)).collect();
        let s = DownlinkScenario::new(gains.clone(), powers, None).unwrap();
        for l in 1..=gains.len() {
            let own = s.achievable_rate(l, l).unwrap();
            for k in 1..l {
                prop_assert!(s.achievable_rate(l, k).unwrap() >= own);
            }
        }
    }

    #[test]
    fn own_rate_falls_when_stronger_users_get_power(
        gains in sorted_gains_strategy(6),
        seed in any::<u64>(),
        bump in 0.01f64..5.0,
    ) {
        let mut r = rng(seed);
        let k = gains.len();
        let powers: Vec<f64> = (0..k).map(|_| r.random_range(0.1..20.0)).collect();
        let l = r.random_range(2..=k);
        let m = r.random_range(1..l);
        let before = DownlinkScenario::new(gains.clone(), powers.clone(), None).unwrap();
        let mut raised = powers;
        raised[m - 1] += bump;
        let after = DownlinkScenario::new(gains, raised, None).unwrap();
        prop_assert!(after.achievable_rate(l, l).unwrap() < before.achievable_rate(l, l).unwrap());
    }

    #[test]
    fn minimum_power_makes_every_constraint_tight(
        gains in sorted_gains_strategy(6),
        seed in any::<u64>(),
    ) {
        let mut r = rng(seed);
        let targets: Vec<f64> = gains.iter().map(|_| r.random_range(0.0..3.0)).collect();
        let sol = min_power_allocation(&gains, &RateTargets::new(targets.clone()).unwrap()).unwrap();
        for (k, target) in targets.iter().enumerate() {
            prop_assert!((own_rate(&gains, &sol.powers, k) - target).abs() < 1e-9);
        }
        let sum: f64 = sol.powers.iter().sum();
        prop_assert!((sol.total - sum).abs() <= 1e-12 * sum.max(1.0));
    }

    #[test]
    fn minimum_power_monotone_in_targets_and_gains(
        gains in sorted_gains_strategy(6),
        seed in any::<u64>(),
    ) {
        let mut r = rng(seed);
        let targets: Vec<f64> = gains.iter().map(|_| r.random_range(0.1..3.0)).collect();
        let base = min_power_allocation(&gains, &RateTargets::new(targets.clone()).unwrap()).unwrap();
        let k = r.random_range(0..gains.len());

        let mut higher = targets.clone();
        higher[k] += 0.1;
        let up = min_power_allocation(&gains, &RateTargets::new(higher).unwrap()).unwrap();
        prop_assert!(up.total > base.total);

        let mut stronger = gains.clone();
        stronger[k] = if k == 0 { gains[0] * 2.0 } else { gains[k - 1] };
        let down = min_power_allocation(&stronger, &RateTargets::new(targets).unwrap()).unwrap();
        prop_assert!(down.total <= base.total * (1.0 + 1e-12));
    }

    #[test]
    fn sic_rates_conserve_mutual_information(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.random_range(1..=8);
        let gains: Vec<f64> = (0..k).map(|_| 10f64.powf(r.random_range(-2.0..2.0))).collect();
        let powers: Vec<f64> = (0..k).map(|_| r.random_range(0.0..10.0)).collect();
        let mut order: Vec<usize> = (1..=k).collect();
        for i in (1..k).rev() {
            order.swap(i, r.random_range(0..=i));
        }
        let s = UplinkScenario::new(gains, powers, order).unwrap();
        let sum: f64 = s.sic_rates().iter().sum();
        prop_assert!((sum - s.total_mutual_information()).abs() < 1e-9);
    }

    #[test]
    fn own_uplink_rate_grows_with_own_power(seed in any::<u64>(), bump in 0.0f64..5.0) {
        let mut r = rng(seed);
        let k = r.random_range(1..=6);
        let gains: Vec<f64> = (0..k).map(|_| r.random_range(0.1..5.0)).collect();
        let powers: Vec<f64> = (0..k).map(|_| r.random_range(0.0..10.0)).collect();
        let user = r.random_range(0..k);
        let a = UplinkScenario::descending(gains.clone(), powers.clone()).unwrap();
        let mut more = powers;
        more[user] += bump;
        let b = UplinkScenario::descending(gains, more).unwrap();
        prop_assert!(b.sic_rates()[user] >= a.sic_rates()[user]);
    }
}

#[test]
fn reduced_region_matches_full_region() {
    let mut r = rng(77);
    let mut inside = 0;
    for _ in 0..1000 {
        let k = r.random_range(2..=6);
        let gains = sorted_gains(&mut r, k);
        let powers: Vec<f64> = (0..k).map(|_| r.random_range(0.0..10.0)).collect();
        let probe = DownlinkScenario::new(gains.clone(), powers.clone(), None).unwrap();
        let rates: Vec<f64> = probe
            .own_rates()
            .iter()
            .map(|c| c * r.random_range(0.8..1.05))
            .collect();
        let s = DownlinkScenario::new(gains, powers, Some(rates)).unwrap();
        let full = s.in_rate_region().unwrap();
        assert_eq!(full, s.reduced_region_check().unwrap());
        inside += full as usize;
    }
    // both outcomes are exercised
    assert!(inside > 50 && inside < 950, "{inside}");
}

#[test]
fn boundary_points_lie_in_the_reduced_region() {
    let gains = [1.0, 0.25];
    for pt in rate_region_boundary(&gains, 10.0, 51).unwrap() {
        if pt.r1 == 0.0 || pt.r2 == 0.0 {
            continue;
        }
        let s = DownlinkScenario::new(
            gains.to_vec(),
            vec![pt.p1, pt.p2],
            Some(vec![pt.r1 - 1e-9, pt.r2 - 1e-9]),
        )
        .unwrap();
        assert!(s.reduced_region_check().unwrap());
        let on = s.with_rates(vec![pt.r1, pt.r2]).unwrap();
        assert!(!on.reduced_region_check().unwrap());
    }
}

fn random_cluster(seed: u64, antennas: usize) -> Cluster {
    let mut r = rng(seed);
    let h1 = random_vector(&mut r, antennas, 1.0);
    let h2 = random_vector(&mut r, antennas, 0.4);
    Cluster::new(h1, h2, 10.0, 3.981_071_705_534_972, 1.0).unwrap()
}

#[test]
fn beam_power_is_phase_invariant() {
    for seed in 0..20 {
        let c = random_cluster(seed, 4);
        let base = optimize_beam(&c, None).unwrap().total;
        let rotated = Cluster::new(
            c.h1.scaled(Complex64::from_polar(1.0, 0.7)),
            c.h2.scaled(Complex64::from_polar(1.0, -2.1)),
            c.g1,
            c.g2,
            c.noise,
        )
        .unwrap();
        let turned = optimize_beam(&rotated, None).unwrap().total;
        assert!((turned - base).abs() / base < 1e-9, "{seed}: {base} vs {turned}");
    }
}

#[test]
fn beam_powers_make_k2_k3_tight() {
    for seed in 0..50 {
        let c = random_cluster(seed, 3);
        let sol = optimize_beam(&c, None).unwrap();
        let x = c.h1.gain(sol.beam.vector());
        let y = c.h2.gain(sol.beam.vector());
        assert!(x >= y);
        let k2 = x * sol.p1 / (c.g1 * c.noise);
        let k3 = y * sol.p2 / ((y * sol.p1 + c.noise) * c.g2);
        assert!((k2 - 1.0).abs() < 1e-9 && (k3 - 1.0).abs() < 1e-9);
        assert!(constraints_satisfied_within(&c, &sol.beam, sol.p1, sol.p2, 1e-9));
    }
}

#[test]
fn optimized_beam_beats_matched_filters() {
    for seed in 100..150 {
        let c = random_cluster(seed, 4);
        let best = optimize_beam(&c, None).unwrap().total;
        for h in [&c.h1, &c.h2] {
            if let Ok(sol) = powers_for_beam(&c, &Beam::normalized(h).unwrap()) {
                assert!(best <= sol.total * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn more_antennas_never_cost_power() {
    let spec = FadingSpec::new(8, vec![1.0, 2.0], 3.0, 5).unwrap();
    for trial in 0..20 {
        let spec = spec.with_seed(trial);
        let h1 = draw_channel(&spec, 0).unwrap();
        let h2 = draw_channel(&spec, 1).unwrap();
        let mut previous = f64::INFINITY;
        for l in 1..=8 {
            let c = Cluster::new(
                h1.truncated(l).unwrap(),
                h2.truncated(l).unwrap(),
                10.0,
                4.0,
                1.0,
            )
            .unwrap();
            match optimize_beam(&c, None) {
                Ok(sol) => {
                    assert!(sol.total <= previous * (1.0 + 1e-9), "trial {trial} L={l}");
                    previous = sol.total;
                }
                Err(_) => assert!(previous.is_infinite()),
            }
        }
    }
}

#[test]
fn zero_forcing_leakage_two_clusters() {
    let spec = FadingSpec::new(8, vec![1.0, 2.0, 1.0, 2.0], 3.0, 31).unwrap();
    for trial in 0..10 {
        let spec = spec.with_seed(trial);
        let clusters: Vec<Cluster> = (0..2)
            .map(|c| {
                Cluster::new(
                    draw_channel(&spec, 2 * c).unwrap(),
                    draw_channel(&spec, 2 * c + 1).unwrap(),
                    10.0,
                    4.0,
                    1.0,
                )
                .unwrap()
            })
            .collect();
        let sols = zf_multicluster(&clusters).unwrap();
        for (c, sol) in sols.iter().enumerate() {
            let other = &clusters[1 - c];
            for h in [&other.h1, &other.h2] {
                assert!(h.gain(sol.beam.vector()) <= 1e-18 * h.norm_sqr());
            }
        }
    }
}

#[test]
fn zero_forcing_is_free_for_orthogonal_clusters() {
    let v = |e: &[(usize, Complex64)]| {
        let mut x = vec![Complex64::new(0.0, 0.0); 4];
        for &(i, z) in e {
            x[i] = z;
        }
        ComplexVector::new(x).unwrap()
    };
    let c = Complex64::new;
    let clusters = vec![
        Cluster::new(
            v(&[(0, c(1.2, 0.3)), (1, c(0.2, -0.4))]),
            v(&[(0, c(0.1, 0.2)), (1, c(0.4, 0.1))]),
            10.0,
            4.0,
            1.0,
        )
        .unwrap(),
        Cluster::new(v(&[(2, c(0.0, 1.5))]), v(&[(2, c(0.5, 0.0))]), 10.0, 4.0, 1.0).unwrap(),
        Cluster::new(v(&[(3, c(-1.0, 0.0))]), v(&[(3, c(0.3, 0.3))]), 10.0, 4.0, 1.0).unwrap(),
    ];
    let zf = zf_multicluster(&clusters).unwrap();
    for (cl, sol) in clusters.iter().zip(&zf) {
        let iso = optimize_beam(cl, None).unwrap();
        assert!((sol.total - iso.total).abs() / iso.total < 1e-9);
    }
}

#[test]
fn enumeration_oracles_agree() {
    for &(k, l, b) in &[(4, 2, 1), (3, 2, 2), (5, 1, 2), (4, 3, 1)] {
        let a = exact_throughput(k, 0.37, l, b);
        let e = exhaustive_throughput(k, 0.37, l, b);
        assert!((a.0 - e.0).abs() < 1e-12 && (a.1 - e.1).abs() < 1e-12);
    }
}

fn ra(users: usize, p: f64, levels: usize, subcarriers: usize, trials: usize, seed: u64) -> RaConfig {
    RaConfig {
        users,
        access_prob: p,
        power_levels: levels,
        subcarriers,
        decoding_model: DecodingModel::IndependentSubchannel,
        trials,
        seed,
    }
}

#[test]
fn simulator_matches_enumeration_for_both_models() {
    for &(k, p, l, b) in &[(6, 0.3, 2, 1), (5, 0.5, 2, 2), (6, 0.6, 3, 1)] {
        let (ind, blk) = simulate_both_models(&ra(k, p, l, b, 100_000, 3)).unwrap();
        let (want_ind, want_blk) = exact_throughput(k, p, l, b);
        assert!((ind.mean - want_ind).abs() < 3.0 * ind.stderr, "{k} {p} {l} {b}");
        assert!((blk.mean - want_blk).abs() < 3.0 * blk.stderr, "{k} {p} {l} {b}");
        assert!(blk.mean <= ind.mean);
    }
}

#[test]
fn subcarriers_scale_thinned_throughput() {
    // B subcarriers with K users equal B copies of one subcarrier whose users
    // are active with probability p/B.
    for &(k, p, l, b) in &[(5, 0.4, 2, 2), (4, 0.8, 1, 3), (6, 0.5, 2, 2)] {
        let multi = exact_throughput(k, p, l, b).0;
        let single = exact_throughput(k, p / b as f64, l, 1).0;
        assert!((multi - b as f64 * single).abs() < 1e-12);
        let sim = simulate_both_models(&ra(k, p, l, b, 50_000, 8)).unwrap().0;
        assert!((sim.mean - b as f64 * single).abs() < 3.0 * sim.stderr);
    }
}

#[test]
fn ten_user_two_level_simulation_matches_convolution_oracle() {
    let (ind, _) = simulate_both_models(&ra(10, 0.25, 2, 1, 100_000, 12)).unwrap();
    let want = exact_throughput(10, 0.25, 2, 1).0;
    assert!((ind.mean - want).abs() < 3.0 * ind.stderr);
}
