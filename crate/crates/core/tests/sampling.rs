use thintails::curves::benchmark_curves;
use thintails::{sample_moments, GaussianSpec, InheritedSpec, StudentT};

fn ks_distance(mut v: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let c = cdf(x);
        d.max(c - i as f64 / n).max((i + 1) as f64 / n - c)
    })
}

#[test]
fn student_samples_follow_cdf() {
    for (sigma, alpha) in [(1.0, 1.0), (2.0, 2.0), (0.5, 3.0), (1.5, 4.5), (1.0, 0.8)] {
        let t = StudentT::new(sigma, alpha).unwrap();
        let v = t.sample(11, 1_000_000).unwrap().values;
        let d = ks_distance(v, |x| t.cdf(x).unwrap());
        assert!(d < 1.63 / 1000.0, "alpha {alpha}: KS {d}");
    }
}

#[test]
fn gaussian_samples_follow_cdf() {
    let g = GaussianSpec::new(1.0, 0.5).unwrap();
    let v = g.sample(5, 1_000_000).unwrap().values;
    let m = sample_moments(&v).unwrap();
    assert!((m.mean - 1.0).abs() < 5.0 * 0.5 / 1000.0);
    assert!((m.kurtosis - 3.0).abs() < 0.03);
    assert!(ks_distance(v, |x| g.cdf(x).unwrap()) < 1.63e-3);
}

#[test]
fn student_variance_matches_theory() {
    let t = StudentT::new(2.0, 6.0).unwrap();
    let v = t.sample(3, 1_000_000).unwrap().values;
    let m = sample_moments(&v).unwrap();
    let var: f64 = 4.0 * 6.0 / 4.0;
    // Var of the sample variance uses the exact fourth moment (kurtosis 6).
    let se = (var * var * (6.0 - 1.0) / 1e6).sqrt();
    assert!((m.variance - var).abs() < 4.0 * se, "{} vs {var}", m.variance);
}

#[test]
fn inherited_moments_agree_with_simulation() {
    let source = StudentT::new(0.4, 3.0).unwrap();
    for b in benchmark_curves() {
        let spec = InheritedSpec::new(b.curve.clone(), source);
        let q = spec.quadrature_moments().unwrap();
        let v = spec.sample(21, 1_000_000).unwrap().values;
        let m = sample_moments(&v).unwrap();
        let se_mean = (q.variance / 1e6).sqrt();
        assert!((m.mean - q.mean).abs() < 3.0 * se_mean, "{}: mean {} vs {}", b.label, m.mean, q.mean);
        let se_var = ((q.fourth_central - q.variance * q.variance) / 1e6).sqrt();
        assert!((m.variance - q.variance).abs() < 3.0 * se_var, "{}: var {} vs {}", b.label, m.variance, q.variance);
    }
}

#[test]
fn single_term_cdf_matches_empirical() {
    let spec = InheritedSpec::new(thintails::GeneralizedSigmoid::single(1.0, 1.0, 0.0).unwrap(), StudentT::new(2.0, 3.0).unwrap());
    let v = spec.sample(4, 1_000_000).unwrap().values;
    assert!(ks_distance(v, |y| spec.cdf(y).unwrap()) < 1.63e-3);
}

#[test]
fn sampling_reproducible_across_calls() {
    let t = StudentT::new(1.0, 3.0).unwrap();
    let a = t.sample(99, 200_000).unwrap();
    let b = t.sample(99, 200_000).unwrap();
    assert_eq!(a.values, b.values);
    let prefix = t.sample(99, 70_000).unwrap();
    assert_eq!(&a.values[..70_000], &prefix.values[..]);
}
