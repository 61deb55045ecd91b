use esp_core::bitseq::Partition;
use esp_core::experiment::{curve_csv, emit_csv, run, run_sequential, ExperimentConfig};
use esp_core::schedule::ScheduleKind;

fn small(kind: ScheduleKind) -> ExperimentConfig {
    ExperimentConfig {
        n: 120,
        partition: Partition::new(vec![0, 30, 80, 120]).unwrap(),
        q_grid: vec![0.05, 0.5, 0.95],
        repeats: 3,
        seed: 11,
        ..ExperimentConfig::reduced(kind)
    }
}

#[test]
fn curves_do_not_depend_on_thread_count() {
    for kind in [ScheduleKind::Fixed, ScheduleKind::Decaying, ScheduleKind::Count] {
        let cfg = small(kind);
        let parallel = run(&cfg).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run(&cfg).unwrap());
        assert_eq!(parallel, single);
        assert_eq!(parallel, run_sequential(&cfg).unwrap());
        assert_eq!(curve_csv(&parallel.curve), curve_csv(&run(&cfg).unwrap().curve));
    }
}

#[test]
fn refining_the_grid_never_lowers_the_measured_curve() {
    let base = small(ScheduleKind::Decaying);
    let coarse = run(&base).unwrap().curve;
    let more_repeats = run(&ExperimentConfig {
        repeats: 6,
        ..base.clone()
    })
    .unwrap()
    .curve;
    let finer = run(&ExperimentConfig {
        q_grid: vec![0.05, 0.3, 0.5, 0.7, 0.95],
        ..base.clone()
    })
    .unwrap()
    .curve;
    for k in 1..=base.n {
        assert!(more_repeats.measured_at(k) >= coarse.measured_at(k), "k={k}");
        assert!(finer.measured_at(k) >= coarse.measured_at(k), "k={k}");
    }
}

#[test]
fn bounds_dominate_small_runs() {
    for kind in [ScheduleKind::Fixed, ScheduleKind::Decaying, ScheduleKind::Count] {
        let summary = run(&small(kind)).unwrap();
        assert!(
            summary.curve.dominance_holds(),
            "{kind}: {:?}",
            summary.curve.violations()
        );
        assert_eq!(summary.simulations, 81 * 3);
    }
}

#[test]
fn csv_file_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let curve = run(&small(ScheduleKind::Fixed)).unwrap().curve;
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    emit_csv(&curve, &a).unwrap();
    emit_csv(&curve, &b).unwrap();
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 121);
    assert!(text.starts_with("k,r_measured_bits,bound_bits\n"));
    assert!(emit_csv(&curve, &dir.path().join("missing/x.csv")).is_err());
}
