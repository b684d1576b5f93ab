use super::*;
use crate::exec::Sequential;
use crate::scales::{frontal_landmarks, LandmarkSet};
use crate::signal::WindowMetrics;
use crate::synth::{generate_synthetic_video, SynthSpec};
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn timeline(snrs: &[f64]) -> MetricsTimeline {
    MetricsTimeline {
        entries: snrs
            .iter()
            .enumerate()
            .map(|(k, &s)| WindowMetrics {
                t_start: k as f64,
                f_hr: 1.2,
                bpm: 72.0,
                snr_db: s,
                magnitude: 1.0,
                pi: None,
                rho_ref: None,
            })
            .collect(),
    }
}

fn regions(means: &[f64]) -> Vec<(RegionName, MetricsTimeline)> {
    RegionName::ALL.iter().zip(means).map(|(n, &m)| (*n, timeline(&[m, m]))).collect()
}

#[test]
fn reference_is_highest_mean_snr() {
    let r = regions(&[5.0, 3.0, 8.0, 2.0, 1.0]);
    assert_eq!(select_reference_region(&r).unwrap(), RegionName::ALL[2]);
}

#[test]
fn reference_tie_keeps_first() {
    let r = regions(&[4.0, 4.0, 4.0, 4.0, 4.0]);
    assert_eq!(select_reference_region(&r).unwrap(), RegionName::ALL[0]);
}

#[test]
fn reference_single_and_empty() {
    let r = regions(&[-3.0]);
    assert_eq!(select_reference_region(&r).unwrap(), RegionName::ALL[0]);
    assert_eq!(select_reference_region(&[]), Err(Error::NoRegions));
}

fn blobs(n: usize, sep: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nd = Normal::new(0.0, 1.0).unwrap();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for i in 0..n {
        let l = (i % 2) as u8;
        let c = if l == 1 { sep / 2.0 } else { -sep / 2.0 };
        x.push(vec![c + nd.sample(&mut rng), nd.sample(&mut rng)]);
        y.push(l);
    }
    (x, y)
}

fn samples(x: &[Vec<f64>], y: &[u8], subjects: usize) -> Vec<PadSample> {
    x.iter()
        .zip(y)
        .enumerate()
        .map(|(i, (f, &l))| PadSample {
            subject_id: format!("s{:02}", i % subjects),
            region: RegionName::ALL[i % 5],
            window_index: i,
            features: [f[0], f[1], f.get(2).copied().unwrap_or(0.0)],
            label: l,
        })
        .collect()
}

#[test]
fn separable_blobs() {
    let (x, y) = blobs(200, 6.0, 1);
    let (model, stats) = SvmModel::train(&x, &y, &SvmParams::default()).unwrap();
    let train_acc = x.iter().zip(&y).filter(|(f, &l)| model.predict(f).unwrap().0 == l).count();
    assert_eq!(train_acc, 200);
    assert!(stats.kkt_violation(1.0) <= 1e-3);

    let s = samples(&x, &y, 20);
    let (_, rep) = svm_train(&s, 10, &SvmParams::default(), &Sequential).unwrap();
    assert!(rep.confusion.accuracy() >= 0.98, "cv {}", rep.confusion.accuracy());
    assert_eq!(rep.folds.len(), 10);
}

#[test]
fn xor_needs_the_cubic_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let nd = Normal::new(0.0, 0.4).unwrap();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for i in 0..400 {
        let (sx, sy) = (if i % 2 == 0 { 2.0 } else { -2.0 }, if (i / 2) % 2 == 0 { 2.0 } else { -2.0 });
        x.push(vec![sx + nd.sample(&mut rng), sy + nd.sample(&mut rng)]);
        y.push(u8::from(sx * sy > 0.0));
    }
    // No line does better than chance: the class means coincide.
    let s = samples(&x, &y, 40);
    let (_, rep) = svm_train(&s, 10, &SvmParams::default(), &Sequential).unwrap();
    assert!(rep.confusion.accuracy() >= 0.90, "cv {}", rep.confusion.accuracy());
}

#[test]
fn single_class_rejected() {
    let x = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![2.0, 2.0]];
    assert_eq!(SvmModel::train(&x, &[1, 1, 1], &SvmParams::default()), Err(Error::SingleClass));
    let s = samples(&x, &[0, 0, 0], 3);
    assert!(matches!(svm_train(&s, 2, &SvmParams::default(), &Sequential), Err(Error::SingleClass)));
}

#[test]
fn insufficient_data() {
    let (x, y) = blobs(30, 6.0, 3);
    let s = samples(&x, &y, 5);
    assert!(matches!(svm_train(&s, 10, &SvmParams::default(), &Sequential), Err(Error::InsufficientData(_))));
}

#[test]
fn support_vectors_keep_their_label() {
    let (x, y) = blobs(120, 6.0, 4);
    let (model, stats) = SvmModel::train(&x, &y, &SvmParams::default()).unwrap();
    let n_sv = stats.alphas.iter().filter(|&&a| a > 0.0).count();
    assert!(n_sv > 0);
    for (i, &a) in stats.alphas.iter().enumerate() {
        if a > 0.0 {
            assert_eq!(model.predict(&x[i]).unwrap().0, y[i], "sv {i}");
        }
    }
}

#[test]
fn decision_is_antisymmetric_on_symmetric_blobs() {
    // Each point appears mirrored with the opposite label, so the fitted
    // decision function is odd.
    let (x0, _) = blobs(60, 6.0, 5);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for p in &x0 {
        let q = vec![p[0].abs() + 1.0, p[1]];
        x.push(q.clone());
        y.push(1);
        x.push(vec![-q[0], -q[1]]);
        y.push(0);
    }
    let params = SvmParams {
        standardize: false,
        ..SvmParams::default()
    };
    let (model, _) = SvmModel::train(&x, &y, &params).unwrap();
    for p in [[2.0, 0.5], [0.7, -1.3], [5.0, 3.0]] {
        let a = model.predict(&p).unwrap().1;
        let b = model.predict(&[-p[0], -p[1]]).unwrap().1;
        assert!(a > 0.0 && b < 0.0, "{a} {b}");
        assert!((a + b).abs() < 1e-2 * a.abs().max(1.0), "{a} {b}");
    }
}

#[test]
fn zero_variance_feature() {
    let (x, y) = blobs(80, 6.0, 6);
    let x: Vec<Vec<f64>> = x.into_iter().map(|r| vec![r[0], r[1], 3.5]).collect();
    let (model, _) = SvmModel::train(&x, &y, &SvmParams::default()).unwrap();
    assert_eq!(model.scaler.transform(&[0.0, 0.0, 99.0])[2], 0.0);
    let (l, d) = model.predict(&[3.0, 0.0, 3.5]).unwrap();
    assert!(d.is_finite());
    assert_eq!(l, 1);
}

#[test]
fn predict_checks_dimension() {
    let (x, y) = blobs(40, 6.0, 8);
    let (model, _) = SvmModel::train(&x, &y, &SvmParams::default()).unwrap();
    assert!(matches!(model.predict(&[1.0]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn dual_constraints_hold_on_overlapping_classes() {
    let (x, y) = blobs(300, 1.5, 9);
    let params = SvmParams {
        record_objective: true,
        ..SvmParams::default()
    };
    let (_, st) = SvmModel::train(&x, &y, &params).unwrap();
    assert!(st.alphas.iter().all(|&a| (0.0..=1.0).contains(&a)));
    assert!(st.alphas.iter().any(|&a| a == 1.0), "overlap should leave bounded alphas");
    let eq: f64 = st.alphas.iter().zip(&st.y).map(|(a, y)| a * y).sum();
    assert!(eq.abs() <= 1e-9, "sum alpha*y = {eq}");
    assert!(st.kkt_violation(1.0) <= 1e-3);
    assert_eq!(st.objective.len(), st.iterations);
    for w in st.objective.windows(2) {
        assert!(w[1] >= w[0] - 1e-12, "{} -> {}", w[0], w[1]);
    }
}

#[test]
fn restandardization_invariance() {
    let (x, y) = blobs(150, 2.5, 10);
    let x: Vec<Vec<f64>> = x.into_iter().map(|r| vec![40.0 + 7.0 * r[0], -3.0 + 0.2 * r[1]]).collect();
    let (m1, _) = SvmModel::train(&x, &y, &SvmParams::default()).unwrap();
    let z: Vec<Vec<f64>> = x.iter().map(|r| m1.scaler.transform(r)).collect();
    let (m2, _) = SvmModel::train(
        &z,
        &y,
        &SvmParams {
            standardize: false,
            ..SvmParams::default()
        },
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let p = [rng.random_range(10.0..70.0), rng.random_range(-4.0..-2.0)];
        let (a, b) = (m1.predict(&p).unwrap(), m2.predict(&m1.scaler.transform(&p)).unwrap());
        assert_eq!(a.0, b.0);
        assert!((a.1 - b.1).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn folds_are_subject_disjoint(ids in proptest::collection::vec(0u8..15, 12..120), k in 2usize..8) {
        let names: Vec<String> = ids.iter().map(|i| format!("p{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let distinct = names.iter().collect::<BTreeSet<_>>().len();
        match subject_folds(&refs, k) {
            Ok(assign) => {
                prop_assert!(distinct >= k);
                for f in 0..k {
                    let test: BTreeSet<&str> = (0..refs.len()).filter(|&i| assign[i] == f).map(|i| refs[i]).collect();
                    let train: BTreeSet<&str> = (0..refs.len()).filter(|&i| assign[i] != f).map(|i| refs[i]).collect();
                    prop_assert!(test.is_disjoint(&train));
                    prop_assert!(!test.is_empty());
                }
            }
            Err(e) => {
                prop_assert!(distinct < k);
                prop_assert!(matches!(e, Error::InsufficientData(_)));
            }
        }
    }

    #[test]
    fn split_is_subject_disjoint(ids in proptest::collection::vec(0u8..20, 1..150), frac in 0.5f64..0.95) {
        let names: Vec<String> = ids.iter().map(|i| format!("p{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let is_train = subject_split(&refs, frac);
        let tr: BTreeSet<&str> = refs.iter().zip(&is_train).filter(|(_, &t)| t).map(|(s, _)| *s).collect();
        let te: BTreeSet<&str> = refs.iter().zip(&is_train).filter(|(_, &t)| !t).map(|(s, _)| *s).collect();
        prop_assert!(tr.is_disjoint(&te));
    }
}

#[test]
fn split_tracks_target_fraction() {
    let names: Vec<String> = (0..200).map(|i| format!("p{:03}", i / 4)).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let is_train = subject_split(&refs, 0.803);
    let frac = is_train.iter().filter(|&&t| t).count() as f64 / 200.0;
    assert!((frac - 0.803).abs() <= 0.02, "{frac}");
}

#[test]
fn confusion_rows_match_class_counts() {
    let mut c = Confusion::default();
    for (a, p, n) in [(0u8, 0u8, 198), (0, 1, 6), (1, 0, 8), (1, 1, 224)] {
        for _ in 0..n {
            c.add(a, p);
        }
    }
    assert_eq!(c.row_sums(), (204, 232));
    assert_eq!(c.total(), 436);
    assert!((c.accuracy() - 422.0 / 436.0).abs() < 1e-12);
}

#[test]
fn cv_confusion_covers_every_sample() {
    let (x, y) = blobs(160, 3.0, 12);
    let s = samples(&x, &y, 16);
    let (_, rep) = svm_train(&s, 8, &SvmParams::default(), &Sequential).unwrap();
    let n1 = y.iter().filter(|&&l| l == 1).count();
    assert_eq!(rep.confusion.row_sums(), (160 - n1, n1));
    assert_eq!(rep.folds.iter().map(|f| f.n_test).sum::<usize>(), 160);
    for f in &rep.folds {
        assert_eq!(f.n_train + f.n_test, 160);
    }
}

#[test]
fn verdict_majority_ties_to_attack() {
    assert_eq!(video_verdict(&[0, 0, 1]), LABEL_GENUINE);
    assert_eq!(video_verdict(&[0, 1, 1]), LABEL_ATTACK);
    assert_eq!(video_verdict(&[0, 1]), LABEL_ATTACK);
    assert_eq!(video_verdict(&[0, 0, 1, 1]), LABEL_ATTACK);
}

#[test]
fn windows_per_region_from_sample_count() {
    // 2216 samples over 43 videos.
    let per_video: f64 = 2216.0 / 43.0 / 5.0;
    assert!((per_video - 10.3).abs() < 0.05, "{per_video}");
}

#[test]
fn feature_table_from_30s_video() {
    let (w, h) = (96, 96);
    let lm = LandmarkSet::new(frontal_landmarks(48.0, 40.0, 80.0), w, h).unwrap();
    let (seq, _) = generate_synthetic_video(&SynthSpec {
        width: w,
        height: h,
        duration: 30.0,
        noise_sigma: 0.01,
        seed: 3,
        ..SynthSpec::default()
    })
    .unwrap();
    let cfg = AnalysisConfig::default();
    let rows = extract_feature_table(&seq, &LandmarkInput::Static(lm), &cfg, LABEL_GENUINE, "subj", Preprocess::default(), &Sequential).unwrap();
    assert_eq!(rows.len(), 105);
    let mut count = [0usize; 5];
    for r in &rows {
        count[RegionName::ALL.iter().position(|n| *n == r.region).unwrap()] += 1;
        assert_eq!(r.label, LABEL_GENUINE);
        assert_eq!(r.subject_id, "subj");
    }
    assert_eq!(count, [21; 5]);
    // One region serves as reference and correlates perfectly with itself.
    let full: Vec<RegionName> = RegionName::ALL
        .iter()
        .copied()
        .filter(|n| rows.iter().filter(|r| r.region == *n).all(|r| (r.features[2] - 1.0).abs() < 1e-12))
        .collect();
    assert!(!full.is_empty());
}
