use doleans::mc::estimate_many;
use doleans::paths::stream_rng;
use doleans::{
    estimate_expectation, example1_model, example2_model, example3_model, make_eta_distribution,
    make_first_jump_time, make_xi_distribution, sample, InverseCdfDistribution, JumpPath, SeedSpec,
};
use rand::Rng;

const N: usize = 1_000_000;

fn seeds() -> SeedSpec {
    SeedSpec::new(31, 64).unwrap()
}

#[test]
fn example1_mean_is_zero() {
    let e = estimate_expectation(
        &example1_model(),
        |p: &JumpPath| p.value_at(1.0),
        N,
        seeds(),
    )
    .unwrap();
    assert!(e.mean.abs() <= 4.0 * e.se, "{e:?}");
}

#[test]
fn example2_stopped_value_has_mean_zero() {
    let m = example2_model::<f64>();
    let e = estimate_expectation(
        &m,
        |p: &JumpPath| p.value_at(p.horizon().min(1.0)),
        N,
        seeds(),
    )
    .unwrap();
    assert!(e.mean.abs() <= 4.0 * e.se, "{e:?}");
    let at_tau =
        estimate_expectation(&m, |p: &JumpPath| p.value_at(p.horizon()), 10_000, seeds()).unwrap();
    assert!((at_tau.mean - 1.0).abs() < 1e-9);
}

#[test]
fn example3_drivers_uncorrelated() {
    let m = example3_model::<f64>();
    let est = estimate_many(
        &m,
        1,
        |p: &JumpPath, out| out[0] = p.jumps()[0].dm * (p.horizon() - 2.0),
        N,
        seeds(),
    )
    .unwrap();
    // τ̂ - 2 has mean zero, so this is the covariance
    assert!(est[0].mean.abs() <= 4.0 * est[0].se, "{:?}", est[0]);
}

fn ks_statistic(d: &InverseCdfDistribution, n: usize, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, 0);
    let mut xs: Vec<f64> = (0..n)
        .map(|_| sample(d, rng.random_range(1e-300..1.0)).unwrap())
        .collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nf = n as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = d.cdf(x);
            (c - i as f64 / nf)
                .abs()
                .max(((i + 1) as f64 / nf - c).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn samplers_match_their_cdfs() {
    let n = 200_000;
    // 1% critical value of the Kolmogorov distribution
    let crit = 1.628 / (n as f64).sqrt();
    for (name, d) in [
        ("xi", make_xi_distribution()),
        ("eta", make_eta_distribution()),
        ("exp", make_first_jump_time()),
    ] {
        let ks = ks_statistic(&d, n, 3);
        assert!(ks < crit, "{name}: D = {ks}, critical {crit}");
    }
}

#[test]
fn sample_means_vanish() {
    for (name, d) in [
        ("xi", make_xi_distribution()),
        ("eta", make_eta_distribution()),
    ] {
        let mut rng = stream_rng(8, 1);
        let xs: Vec<f64> = (0..N)
            .map(|_| sample(&d, rng.random_range(1e-300..1.0)).unwrap())
            .collect();
        let mean = xs.iter().sum::<f64>() / N as f64;
        if name == "xi" {
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (N - 1) as f64;
            assert!(
                mean.abs() <= 4.0 * (var / N as f64).sqrt(),
                "{name}: {mean}"
            );
        } else {
            // η has a finite mean but infinite variance; only a loose check applies
            assert!(mean.abs() < 0.05, "{name}: {mean}");
        }
    }
}
