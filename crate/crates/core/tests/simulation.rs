use sublil_core::simulate::Objective;
use sublil_core::{
    conditional_dominance_check, d, empirical_upper_capacity, estimate_cluster, mixture_weight,
    run_trajectory, t, CheckpointRule, Distribution, MeasureFamily, PathEvent, Policy, SeedPair,
    SigmaBounds, TruncationSchedule,
};

/// Frozen value of `P(max_{k≤100} S_k ≥ 10)` for a simple random walk.
const REFLECTION_ORACLE: f64 = 0.319_727_3;

/// The same probability by dynamic programming over walk positions with
/// absorption at the level.
fn reflection_dp(n: usize, level: i64) -> f64 {
    let width = 2 * n + 1;
    let mut probs = vec![0.0f64; width];
    probs[n] = 1.0;
    let mut absorbed = 0.0;
    for _ in 0..n {
        let mut next = vec![0.0f64; width];
        for (i, p) in probs.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            for j in [i - 1, i + 1] {
                if j as i64 - n as i64 >= level {
                    absorbed += 0.5 * p;
                } else {
                    next[j] += 0.5 * p;
                }
            }
        }
        probs = next;
    }
    absorbed
}

fn rad_pair() -> MeasureFamily {
    MeasureFamily::new(vec![
        Distribution::rademacher(1.0).unwrap(),
        Distribution::rademacher(3.0).unwrap(),
    ])
    .unwrap()
}

#[test]
fn reflection_oracles_agree() {
    assert!((reflection_dp(100, 10) - REFLECTION_ORACLE).abs() < 1e-7);
}

#[test]
fn maximal_sum_capacity_matches_reflection() {
    let fam = MeasureFamily::singleton(Distribution::rademacher(1.0).unwrap());
    let ev = PathEvent::MaxCenteredSumAtLeast {
        center: 0.0,
        level: 10.0,
    };
    let est = empirical_upper_capacity(
        &fam,
        |ys: &[f64]| ev.holds(ys),
        &[Policy::Constant { theta: 0 }],
        100,
        100_000,
        SeedPair::new(21, 0),
    )
    .unwrap();
    assert!(
        (est.estimate - REFLECTION_ORACLE).abs() < 0.005,
        "{}",
        est.estimate
    );
    assert!(est.stderr < 0.002);
}

#[test]
fn symmetric_final_sum_is_near_half() {
    let ev = PathEvent::FinalSumAtLeast { level: 0.0 };
    let policies = [
        Policy::Constant { theta: 0 },
        Policy::Cyclic {
            thetas: vec![0, 1],
            period: 7,
        },
        Policy::Mixture {
            weight: 0.5,
            low: 0,
            high: 1,
        },
    ];
    let est = empirical_upper_capacity(
        &rad_pair(),
        |ys: &[f64]| ev.holds(ys),
        &policies,
        50,
        10_000,
        SeedPair::new(22, 0),
    )
    .unwrap();
    assert!((0.48..=0.56).contains(&est.estimate), "{}", est.estimate);
    for p in &est.per_policy {
        assert!(p.frequency <= est.estimate);
    }
}

#[test]
fn capacity_is_independent_of_worker_count() {
    let ev = PathEvent::MaxCenteredSumAtLeast {
        center: 0.0,
        level: 12.0,
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                empirical_upper_capacity(
                    &rad_pair(),
                    |ys: &[f64]| ev.holds(ys),
                    &[
                        Policy::Greedy {
                            objective: Objective::Maximize,
                        },
                        Policy::Constant { theta: 1 },
                    ],
                    60,
                    5000,
                    SeedPair::new(23, 0),
                )
                .unwrap()
            })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn gaussian_truncated_variance_per_step() {
    let fam = MeasureFamily::singleton(Distribution::gaussian(0.0, 1.0).unwrap());
    let n = 1_000_000u64;
    let slack = 5.0 * (2.0 / n as f64).sqrt();
    for seed in 0..20 {
        let tr = run_trajectory(
            &fam,
            &Policy::Constant { theta: 0 },
            &TruncationSchedule::default(),
            n,
            SeedPair::new(seed, 0),
            CheckpointRule::default(),
        )
        .unwrap();
        let ratio = tr.last().v2 / n as f64;
        assert!(
            (0.93..=1.0 + slack).contains(&ratio),
            "seed {seed}: {ratio}"
        );
        assert!(tr.max_abs_y <= 6.0 * (2.0 * (n as f64).ln()).sqrt());
        assert!(tr.check_invariants());
    }
}

#[test]
fn trajectory_statistics_are_consistent() {
    let tr = run_trajectory(
        &rad_pair(),
        &Policy::Greedy {
            objective: Objective::Maximize,
        },
        &TruncationSchedule::default(),
        20_000,
        SeedPair::new(24, 3),
        CheckpointRule::Geometric { ratio: 1.05 },
    )
    .unwrap();
    let mut prev_v = 0.0;
    for c in &tr.checkpoints {
        assert_eq!(c.r, c.s / d(c.n));
        assert_eq!(c.t, Some(c.s / (c.v2.sqrt() * t(c.n))));
        assert!(c.v2 >= prev_v && c.v2 <= c.u2);
        prev_v = c.v2;
    }
    assert!(tr.check_invariants());
}

#[test]
fn trajectories_replay_bit_for_bit() {
    let run = || {
        run_trajectory(
            &rad_pair(),
            &Policy::Mixture {
                weight: 0.5,
                low: 0,
                high: 1,
            },
            &TruncationSchedule::default(),
            50_000,
            SeedPair::new(25, 0),
            CheckpointRule::default(),
        )
        .unwrap()
    };
    let mut a = Vec::new();
    let mut b = Vec::new();
    run().write_csv(&mut a).unwrap();
    run().write_csv(&mut b).unwrap();
    assert_eq!(a, b);
}

#[test]
fn mixture_policy_hits_target_variance() {
    let fam = rad_pair();
    let alpha = mixture_weight(5.0, SigmaBounds::new(1.0, 9.0).unwrap()).unwrap();
    let n = 200_000;
    let tr = run_trajectory(
        &fam,
        &Policy::Mixture {
            weight: alpha,
            low: 0,
            high: 1,
        },
        &TruncationSchedule::default(),
        n,
        SeedPair::new(26, 0),
        CheckpointRule::default(),
    )
    .unwrap();
    // per-step variance of the mixture draw is 16 · α(1 − α) = 4
    let ratio = tr.last().u2 / n as f64;
    assert!(
        (ratio - 5.0).abs() < 5.0 * (4.0 / n as f64).sqrt(),
        "{ratio}"
    );
}

#[test]
fn winding_sequence_cluster() {
    let pts: Vec<(u64, f64)> = (2..=1_000_000u64)
        .map(|n| (n, (n as f64).ln().sin()))
        .collect();
    let c = estimate_cluster(&pts, 2, 0.05, Some((-1.0, 1.0))).unwrap();
    let (lo, hi) = c.covered_interval.unwrap();
    assert!(lo <= -0.99 && hi >= 0.99);
    assert!(c.hausdorff_to_target.unwrap() < 0.01);
    assert!(c.sufficient);
}

#[test]
fn dominance_under_constant_policy() {
    let rep = conditional_dominance_check(
        &rad_pair(),
        &Policy::Constant { theta: 1 },
        |x| x.clamp(-1.0, 1.0),
        50,
        5000,
        &[-10.0, -3.0, 0.0, 3.0, 10.0],
        SeedPair::new(27, 0),
    )
    .unwrap();
    assert!(rep.pass);
    assert_eq!(rep.upper_expectation, 0.0);
}
