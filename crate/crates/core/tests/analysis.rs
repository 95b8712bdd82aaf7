use latfold::analysis::{
    classify_barriers, estimate_p_ground, overlap, peaks, scaling_report, scaling_row, smooth, spin_overlap, tts,
    tts_from_samples, wilson_interval, Barriers, SodHistogram, DEFAULT_BINS,
};
use latfold::encoders::ModelKind;
use latfold::solvers::{Sample, SampleSet};

fn samples(energies: &[f64], tau: f64) -> SampleSet {
    let mut s = SampleSet::new(
        energies.iter().enumerate().map(|(k, &e)| Sample { bits: vec![0], energy: e, replica: k, sweep: 0 }).collect(),
    );
    s.tau_seconds = tau;
    s
}

#[test]
fn tts_formula() {
    assert_eq!(tts(0.3, 0.99).tts, 0.3);
    let t = tts(1.0, 0.5).tts;
    // ln 0.01 / ln 0.5
    assert!((t - 0.01f64.ln() / 0.5f64.ln()).abs() < 1e-12);
    assert!((t - 6.6439).abs() < 1e-4);
    assert!(tts(1.0, 0.0).tts.is_infinite());
    // monotone in p below the cut
    assert!(tts(1.0, 0.2).tts > tts(1.0, 0.6).tts);
}

#[test]
fn tts_from_sample_sets() {
    let all = samples(&[-2.0; 8], 0.5);
    let r = tts_from_samples(&all, -2.0, 1e-6).unwrap();
    assert_eq!((r.p_ground, r.tts), (1.0, 0.5));
    let half = samples(&[-2.0, 0.0, -2.0, 1.0], 1.0);
    let r = tts_from_samples(&half, -2.0, 1e-6).unwrap();
    assert_eq!(r.p_ground, 0.5);
    assert!((r.tts - 6.643_856_189_774_724).abs() < 1e-12);
    let (lo, hi) = r.interval.unwrap();
    assert!(lo < 0.5 && 0.5 < hi);
    let none = samples(&[0.0, 1.0], 1.0);
    assert!(tts_from_samples(&none, -2.0, 1e-6).unwrap().tts.is_infinite());
    assert!(estimate_p_ground(&samples(&[], 1.0), 0.0, 1e-6).is_err());
}

#[test]
fn wilson_bounds() {
    let (lo, hi) = wilson_interval(50, 100);
    assert!((lo - 0.404).abs() < 1e-3 && (hi - 0.596).abs() < 1e-3, "{lo} {hi}");
    let (lo, hi) = wilson_interval(20, 20);
    assert!(lo < 1.0 && hi == 1.0);
    let (lo, hi) = wilson_interval(0, 20);
    assert!(lo == 0.0 && hi > 0.0);
    // narrows with more runs
    let w = |n: usize| {
        let (a, b) = wilson_interval(n / 2, n);
        b - a
    };
    assert!(w(1000) < w(100));
}

#[test]
fn overlap_values_and_errors() {
    let a = [1, 0, 1, 1];
    assert_eq!(overlap(&a, &a, None).unwrap(), 1.0);
    assert_eq!(overlap(&a, &[0, 1, 0, 0], None).unwrap(), -1.0);
    assert_eq!(overlap(&a, &[1, 1, 1, 1], None).unwrap(), 0.5);
    assert_eq!(overlap(&a, &[0, 1, 0, 0], Some(&[])).ok(), None);
    assert_eq!(overlap(&a, &[0, 0, 0, 0], Some(&[1])).unwrap(), 1.0);
    assert!(overlap(&a, &[1, 0], None).is_err());
    assert!(overlap(&a, &a, Some(&[7])).is_err());
}

#[test]
fn histogram_binning() {
    let mut h = SodHistogram::new(DEFAULT_BINS).unwrap();
    assert_eq!(h.bin_of(-1.0), 0);
    assert_eq!(h.bin_of(1.0), 100);
    assert_eq!(h.bin_of(0.0), 50);
    assert!((h.center(50)).abs() < 1e-12);
    for q in [-1.0, 0.0, 0.0, 1.0] {
        h.add(q);
    }
    assert_eq!(h.occupied(), vec![0, 50, 100]);
    assert_eq!(h.samples, 4);
    assert_eq!(h.mass_below(0.5), 0.5);
    assert_eq!(h.to_csv().lines().count(), 102);
}

#[test]
fn overlap_histograms_need_matching_windows() {
    let run = vec![vec![0, 1], vec![1, 1]];
    let (qs, h) = spin_overlap(&run, &run, None, DEFAULT_BINS).unwrap();
    assert_eq!(qs, vec![1.0, 1.0]);
    assert_eq!(h.occupied(), vec![100]);
    assert!(spin_overlap(&run, &run[..1], None, DEFAULT_BINS).is_err());
}

#[test]
fn smoothing_preserves_flat_data() {
    assert_eq!(smooth(&[3, 3, 3, 3]), vec![3.0; 4]);
    let s = smooth(&[0, 3, 0]);
    assert_eq!(s, vec![1.5, 1.0, 1.5]);
}

#[test]
fn barrier_classes() {
    let fill = |pairs: &[(f64, usize)]| {
        let mut h = SodHistogram::new(DEFAULT_BINS).unwrap();
        for &(q, n) in pairs {
            for _ in 0..n {
                h.add(q);
            }
        }
        h
    };
    // two ordered basins
    let thin = fill(&[(-0.9, 400), (-0.85, 300), (0.85, 300), (0.9, 400)]);
    assert_eq!(classify_barriers(&thin, 0.5).unwrap(), Barriers::Thin);
    // a broad central bump
    let thick = fill(&[(-0.2, 100), (-0.1, 300), (0.0, 500), (0.1, 300), (0.2, 100), (0.95, 50)]);
    assert_eq!(classify_barriers(&thick, 0.5).unwrap(), Barriers::Thick);
    assert!(peaks(&thick).iter().any(|&k| thick.center(k).abs() < 0.05));
    // a flat run counts as one peak
    let plateau = fill(&[(0.0, 10), (0.02, 10), (0.04, 10)]);
    assert_eq!(peaks(&plateau).len(), 1);
}

#[test]
fn scaling_metrics() {
    let r = scaling_row(ModelKind::CoordCartesian, 10).unwrap();
    assert_eq!((r.qubits, r.side), (320, Some(4)));
    assert!(r.density > 0.0 && r.density < 1.0);
    let t = scaling_row(ModelKind::TurnTetrahedral, 6).unwrap();
    assert_eq!(t.side, None);
    let rep = scaling_report(&[ModelKind::CoordTetrahedral, ModelKind::TurnCartesian], 5..=7).unwrap();
    assert_eq!(rep.rows.len(), 6);
    assert_eq!(rep.series(ModelKind::TurnCartesian).len(), 3);
    let csv = rep.to_csv();
    assert!(csv.starts_with("model,N,L,qubits"));
    assert_eq!(csv.lines().count(), 7);
}
