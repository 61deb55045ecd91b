use esp_core::bitseq::Partition;
use esp_core::bounds::oracle::exhaustive_max;
use esp_core::bounds::{corollary_bound, optimal_fixed_bound, theorem3_bound, BetaTable, BoundInput};
use esp_core::schedule::{optimal_fixed_alpha, Schedule};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid() -> Vec<Schedule<f64>> {
    vec![
        Schedule::fixed(0.6).unwrap(),
        Schedule::fixed(0.75).unwrap(),
        Schedule::fixed(0.9).unwrap(),
        Schedule::decaying(),
        Schedule::count(0.75, 2).unwrap(),
        Schedule::count(0.9, 2).unwrap(),
    ]
}

fn random_partition(n: usize, max_segments: usize, rng: &mut ChaCha8Rng) -> Partition {
    let s = rng.random_range(1..=max_segments.min(n));
    let mut cuts: Vec<usize> = sample(rng, n - 1, s - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut b = vec![0];
    b.extend(cuts);
    b.push(n);
    Partition::new(b).unwrap()
}

#[test]
fn piecewise_bound_holds_for_every_small_partition() {
    for s in grid() {
        let betas = BetaTable::new(&s, 14);
        for p1 in [0.5, 0.6, 0.8] {
            for n in [3usize, 7, 11, 14] {
                for part in Partition::enumerate(n, 3) {
                    let best = exhaustive_max(&s, p1, &part).unwrap();
                    let bound = theorem3_bound(p1.min(1.0 - p1), &part, &betas).unwrap();
                    assert!(best.overall.redundancy <= bound + 1e-9, "{s} p1={p1} {part}");
                }
            }
        }
    }
}

#[test]
fn corollaries_only_weaken_the_piecewise_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for s in grid() {
        for n in (2..=14).chain([100, 1000, 5000]) {
            let betas = BetaTable::new(&s, n);
            for _ in 0..20 {
                let part = random_partition(n, 5, &mut rng);
                let p_min = rng.random_range(0.01..=0.5);
                let exact = theorem3_bound(p_min, &part, &betas).unwrap();
                let input = BoundInput::new(n, part.segment_count(), p_min).unwrap();
                let relaxed = corollary_bound(&s, &input).unwrap();
                assert!(exact <= relaxed + 1e-9, "{s} {part} p={p_min}: {exact} > {relaxed}");
            }
        }
    }
}

#[test]
fn optimal_rate_minimizes_the_fixed_corollary() {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for n in [2usize, 10, 100, 1000, 100_000] {
        let input = BoundInput::new(n, 3, 0.05).unwrap();
        let f = |a: f64| corollary_bound(&Schedule::fixed(a).unwrap(), &input).unwrap();
        let star = optimal_fixed_alpha::<f64>(n).unwrap().alpha;
        let at_star = f(star);
        let (mut lo, mut hi) = (0.01f64, 0.999_999);
        for _ in 0..200 {
            let a = hi - phi * (hi - lo);
            let b = lo + phi * (hi - lo);
            if f(a) < f(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        let found = f(0.5 * (lo + hi));
        assert!(found >= at_star * (1.0 - 1e-9), "n={n}: {found} < {at_star}");
        for step in 1..=50 {
            let a = star + (1.0 - star) * f64::from(step) / 51.0;
            assert!(f(a) >= at_star * (1.0 - 1e-9));
            let a = star * (1.0 - f64::from(step) / 51.0);
            if a > 0.0 {
                assert!(f(a) >= at_star * (1.0 - 1e-9));
            }
        }
        // relaxing sqrt(n-1) to sqrt n only loosens the bound
        assert!(optimal_fixed_bound(&input) >= at_star - 1e-9);
    }
}

#[test]
fn relaxed_fixed_bound_example() {
    let input = BoundInput::new(1000, 1, 0.5f64).unwrap();
    assert!((optimal_fixed_bound(&input) - 118.03).abs() < 0.02);
}
