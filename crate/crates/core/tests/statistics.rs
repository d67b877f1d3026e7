use copula_core::diagnostics::concordance_tau;
use copula_core::sampling::sample_frailty;
use copula_core::{
    grid_validity_report, kendall_tau_closed, kendall_tau_mc, kendall_tau_quadrature,
    sample_conditional, sample_frailty_copula, singularity_limit, Archimedean, FamilyId,
    UnitPoint,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;

fn tested() -> Vec<Archimedean> {
    let mut m = Vec::new();
    for a in [0.1, 0.4, 0.6, 1.0] {
        m.push(Archimedean::f1(a).unwrap());
        m.push(Archimedean::f2(a).unwrap());
    }
    m.extend([0.1, 1.0, 10.0].map(|a| Archimedean::f3(a).unwrap()));
    m
}

/// One-sample Kolmogorov–Smirnov statistic against U(0,1).
fn ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i as f64 + 1.0) / n - x))
        .fold(0.0, f64::max)
}

#[test]
fn quadrature_matches_closed_form() {
    for c in tested() {
        let q = kendall_tau_quadrature(&c, 1e-10).unwrap();
        let closed = kendall_tau_closed(&c);
        // the frailty-rational constant is quoted to five digits
        let tol = if c.family() == FamilyId::F3FrailtyRational { 1e-3 } else { 1e-6 };
        assert!((q.tau - closed.tau).abs() <= tol, "{c:?}: {} vs {}", q.tau, closed.tau);
        assert!(q.error_bound <= 1e-8);
    }
}

#[test]
fn tau_decreases_across_alpha() {
    let taus: Vec<f64> = (1..=10)
        .map(|i| kendall_tau_quadrature(&Archimedean::f1(i as f64 / 10.0).unwrap(), 1e-10).unwrap().tau)
        .collect();
    assert!(taus.windows(2).all(|w| w[1] < w[0]));
    assert!(taus[0] < 1.0 && taus[9].abs() < 1e-9);
}

#[test]
fn monte_carlo_tau_agrees_with_quadrature() {
    for c in tested() {
        let q = kendall_tau_quadrature(&c, 1e-10).unwrap().tau;
        let mc = kendall_tau_mc(&sample_conditional(&c, 20_000, SEED).unwrap().pairs, 20).unwrap();
        let z = (mc.tau - q).abs() / mc.error_bound;
        assert!(z <= 3.0, "{c:?}: mc {} quadrature {q} ({z:.2} SE)", mc.tau);
    }
}

#[test]
fn independence_tau_is_calibrated() {
    // z-scores against the exact null standard error over many seeds
    let c = Archimedean::f1(1.0).unwrap();
    let n = 2_000;
    let se = (2.0 * (2.0 * n as f64 + 5.0) / (9.0 * n as f64 * (n as f64 - 1.0))).sqrt();
    let zs: Vec<f64> = (0..200)
        .map(|s| concordance_tau(&sample_conditional(&c, n, s).unwrap().pairs) / se)
        .collect();
    let m = zs.iter().sum::<f64>() / zs.len() as f64;
    let sd = (zs.iter().map(|z| (z - m).powi(2)).sum::<f64>() / (zs.len() as f64 - 1.0)).sqrt();
    assert!(m.abs() < 3.0 / (zs.len() as f64).sqrt(), "mean z {m}");
    assert!((0.8..1.2).contains(&sd), "sd z {sd}");
}

#[test]
fn samplers_agree_on_f3() {
    for a in [0.1, 1.0, 10.0] {
        let c = Archimedean::f3(a).unwrap();
        let cond = kendall_tau_mc(&sample_conditional(&c, 20_000, SEED).unwrap().pairs, 20).unwrap();
        let frail = kendall_tau_mc(&sample_frailty_copula(a, 20_000, SEED).unwrap().pairs, 20).unwrap();
        let z = (cond.tau - frail.tau).abs() / cond.error_bound.hypot(frail.error_bound);
        assert!(z <= 3.0, "alpha {a}: {} vs {} ({z:.2} SE)", cond.tau, frail.tau);
    }
}

#[test]
fn margins_are_uniform() {
    // 0.001 critical value of the one-sample KS statistic
    let critical = 1.949 / (10_000f64).sqrt();
    let mut batches: Vec<_> = tested()
        .iter()
        .chain(&[Archimedean::gumbel(2.0).unwrap(), Archimedean::independence()])
        .map(|c| sample_conditional(c, 10_000, SEED).unwrap())
        .collect();
    batches.push(sample_frailty_copula(1.0, 10_000, SEED).unwrap());
    for b in batches {
        let du = ks_uniform(b.pairs.iter().map(|p| p.0).collect());
        let dv = ks_uniform(b.pairs.iter().map(|p| p.1).collect());
        assert!(du < critical && dv < critical, "{:?} {:?}: D = {du}, {dv}", b.family, b.alpha);
    }
}

#[test]
fn frailty_cells_match_copula_probabilities() {
    let c = Archimedean::f3(1.0).unwrap();
    let n = 50_000;
    let pairs = sample_frailty_copula(1.0, n, SEED).unwrap().pairs;
    let k = 5;
    let mut counts = vec![0usize; k * k];
    for (u, v) in &pairs {
        let i = ((u * k as f64) as usize).min(k - 1);
        let j = ((v * k as f64) as usize).min(k - 1);
        counts[i * k + j] += 1;
    }
    let cdf = |u: f64, v: f64| c.cdf(UnitPoint::new(u, v).unwrap());
    let mut chi2 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let (u0, u1) = (i as f64 / k as f64, (i + 1) as f64 / k as f64);
            let (v0, v1) = (j as f64 / k as f64, (j + 1) as f64 / k as f64);
            let p = cdf(u1, v1) - cdf(u0, v1) - cdf(u1, v0) + cdf(u0, v0);
            let expected = p * n as f64;
            chi2 += (counts[i * k + j] as f64 - expected).powi(2) / expected;
        }
    }
    // 0.001 critical value of chi-square with 24 degrees of freedom
    assert!(chi2 < 51.18, "chi2 = {chi2}");
}

#[test]
fn frailty_mean() {
    for a in [0.5, 1.0, 4.0] {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let draws: Vec<f64> = (0..100_000).map(|_| sample_frailty(a, &mut rng).unwrap().gamma).collect();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let sd = (draws.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let expected = 5.0 / (6.0 * a);
        assert!((mean - expected).abs() <= 3.0 * sd / n.sqrt(), "alpha {a}: {mean} vs {expected}");
    }
}

#[test]
fn validity_and_continuity_across_families() {
    for c in tested() {
        let report = grid_validity_report(&c, 100).unwrap();
        assert!(report.passed.all(), "{c:?}: {report:?}");
        assert!(singularity_limit(&c).abs() <= 1e-8);
    }
}
