//! Erasure reports against brute-force evaluation of their definitions.

use nerf_core::bounds::{nerf_certificate, NerfQuery};
use nerf_core::erasure::{
    frame_from_gaussian, nerf_check, submatrix, worst_condition_exhaustive,
    worst_condition_sampled, CheckMode, ErasurePattern, FrameMatrix, DEFAULT_ENUM_CAP,
};
use nerf_core::random::{extremal_singular_values, DenseMatrix, RngStream};
use nerf_core::Field;

fn frame(seed: u64, n: usize, cols: usize, field: Field) -> FrameMatrix {
    frame_from_gaussian(&RngStream::new(seed, 0), n, cols, field).unwrap()
}

/// All K-subsets by recursion.
fn all_subsets(n_cols: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n_cols, k, &mut Vec::new(), &mut out);
    out
}

fn naive_worst(f: &FrameMatrix, k: usize) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for s in all_subsets(f.len(), k) {
        let e = extremal_singular_values(&f.matrix().select_columns(&s).unwrap()).unwrap();
        worst = worst.max(e.sigma_max / e.sigma_min);
    }
    worst
}

#[test]
fn exhaustive_equals_naive_maximum() {
    for seed in 0..5 {
        let f = frame(seed, 4, 12, Field::Real);
        let r = worst_condition_exhaustive(&f, 6, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(r.total, 924);
        assert_eq!(r.worst_condition, naive_worst(&f, 6));
    }
}

#[test]
fn sampling_exhausts_tiny_instance() {
    let f = frame(12, 2, 6, Field::Real);
    let full = worst_condition_exhaustive(&f, 3, DEFAULT_ENUM_CAP).unwrap();
    let sampled = worst_condition_sampled(&f, 3, 10_000, &RngStream::new(4, 0)).unwrap();
    assert_eq!(sampled.worst_condition, full.worst_condition);
    assert_eq!(sampled.min_sigma_min, full.min_sigma_min);
    assert_eq!(sampled.max_sigma_max, full.max_sigma_max);
    assert_eq!(sampled.total, 10_000);
}

#[test]
fn column_permutation_invariance() {
    let f = frame(3, 4, 9, Field::Complex);
    let s = ErasurePattern::new(vec![0, 2, 3, 5, 8], 9).unwrap();
    let forward = extremal_singular_values(&submatrix(&f, &s).unwrap()).unwrap();
    let reversed: Vec<usize> = s.kept().iter().rev().copied().collect();
    let backward =
        extremal_singular_values(&f.matrix().select_columns(&reversed).unwrap()).unwrap();
    assert!((forward.sigma_max - backward.sigma_max).abs() < 1e-10);
    assert!((forward.sigma_min - backward.sigma_min).abs() < 1e-10);

    // reports on a column-permuted frame match
    let perm: Vec<usize> = (0..9).rev().collect();
    let g = FrameMatrix::from_matrix(f.matrix().select_columns(&perm).unwrap());
    let (a, b) = (
        worst_condition_exhaustive(&f, 5, DEFAULT_ENUM_CAP).unwrap(),
        worst_condition_exhaustive(&g, 5, DEFAULT_ENUM_CAP).unwrap(),
    );
    assert!((a.worst_condition / b.worst_condition - 1.0).abs() < 1e-10);
    assert!((a.min_sigma_min - b.min_sigma_min).abs() < 1e-10);
}

#[test]
fn scaling_moves_spectra_not_conditions() {
    let f = frame(8, 3, 8, Field::Real);
    let g = f.scaled(2.5);
    let (a, b) = (
        worst_condition_exhaustive(&f, 4, DEFAULT_ENUM_CAP).unwrap(),
        worst_condition_exhaustive(&g, 4, DEFAULT_ENUM_CAP).unwrap(),
    );
    assert!((b.min_sigma_min - 2.5 * a.min_sigma_min).abs() < 1e-10 * b.min_sigma_min);
    assert!((b.max_sigma_max - 2.5 * a.max_sigma_max).abs() < 1e-10 * b.max_sigma_max);
    assert!((a.worst_condition / b.worst_condition - 1.0).abs() < 1e-10);
}

#[test]
fn spectra_extremes_monotone_in_retained_count() {
    // interlacing: adding columns never lowers σ_n and never lowers σ₁
    for seed in 0..20 {
        let f = frame(100 + seed, 4, 10, Field::Real);
        let mut prev: Option<(f64, f64)> = None;
        for k in 5..=10 {
            let r = worst_condition_exhaustive(&f, k, DEFAULT_ENUM_CAP).unwrap();
            if let Some((min_sn, max_s1)) = prev {
                assert!(
                    r.min_sigma_min >= min_sn * (1.0 - 1e-12),
                    "seed {seed} K {k}"
                );
                assert!(
                    r.max_sigma_max >= max_s1 * (1.0 - 1e-12),
                    "seed {seed} K {k}"
                );
            }
            prev = Some((r.min_sigma_min, r.max_sigma_max));
        }
    }
}

#[test]
fn normalized_frame_top_singular_value() {
    let (n, cols) = (50, 200);
    let mean = (0..1000)
        .map(|i| {
            let f = frame_from_gaussian(&RngStream::new(2024, i), n, cols, Field::Real).unwrap();
            extremal_singular_values(f.matrix()).unwrap().sigma_max
        })
        .sum::<f64>()
        / 1000.0;
    assert!((mean / 3.0 - 1.0).abs() < 0.05, "{mean}");
}

#[test]
fn certificate_holds_on_small_frames() {
    let cert = nerf_certificate(&NerfQuery::new(4, 12, 6, 2.0, Field::Real)).unwrap();
    let mode = CheckMode::Exhaustive {
        cap: DEFAULT_ENUM_CAP,
    };
    let mut passing = 0;
    for seed in 0..100 {
        let f = frame(seed, 4, 12, Field::Real);
        let r = nerf_check(
            &f,
            6,
            cert.alpha(),
            cert.beta(),
            mode,
            &RngStream::new(0, 0),
        )
        .unwrap();
        passing += r.passed() as u32;
    }
    // 1 − 3e^{-8} per frame
    assert_eq!(passing, 100);
}

#[test]
fn sampled_report_is_reproducible() {
    let f = frame(1, 5, 30, Field::Complex);
    let s = RngStream::new(42, 7);
    let a = worst_condition_sampled(&f, 12, 9000, &s).unwrap();
    let b = worst_condition_sampled(&f, 12, 9000, &s).unwrap();
    assert_eq!(a, b);
    assert_eq!((a.seed, a.stream_id), (Some(42), Some(7)));
}

#[test]
fn exhaustive_chunks_cover_every_subset_once() {
    // 5005 subsets spans two parallel chunks
    let f = FrameMatrix::from_matrix(
        DenseMatrix::new(1, 15, Field::Real, (1..=15).map(|x| x as f64).collect()).unwrap(),
    );
    let r = worst_condition_exhaustive(&f, 6, DEFAULT_ENUM_CAP).unwrap();
    assert_eq!(r.total, 5005);
    // σ₁ of a row vector is its norm; the largest uses the six largest entries
    let top: f64 = (10..=15).map(|x| (x * x) as f64).sum::<f64>().sqrt();
    assert!((r.max_sigma_max - top).abs() < 1e-12);
    let bottom: f64 = (1..=6).map(|x| (x * x) as f64).sum::<f64>().sqrt();
    assert!((r.min_sigma_min - bottom).abs() < 1e-12);
}
