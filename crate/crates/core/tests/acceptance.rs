//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use qae_core::baselines::bhmt_queries;
use qae_core::chebae::{find_next_cheb, invert_cheb_ci, ChainMode, ChebAEConfig};
use qae_core::grover::{qsp_unitary, Amplitude, GroverLabel};
use qae_core::harness::{fit_rows, read_rows, run_sweep_to, Algorithm, Row, SweepConfig};
use qae_core::hybrid::{hybrid_estimate_traced, HybridConfig};
use qae_core::poly::{
    build_chebyshev, build_erf_poly, build_hybrid_poly_unchecked, build_line_poly, build_line_poly_with_width,
    build_repair_pair, cheb_t, cheb_t_sq, Parity, PolyMode, PolySpec,
};
use qae_core::repair::{nondestructive_chebae, RepairConfig};
use qae_core::rng::{rng_from_seed, substream_seed};
use qae_core::sampler::{binomial, sample_pellian, QueryLedger, StateAfter};
use qae_core::stats::{clopper_pearson, hoeffding_shots, ConfidenceInterval};
use qae_core::unbiased::{unbiased_estimate, UnbiasedConfig};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn amp(a: f64) -> Amplitude {
    Amplitude::new(a).unwrap()
}

fn ci(lo: f64, hi: f64) -> ConfidenceInterval {
    ConfidenceInterval::new(lo, hi).unwrap()
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn log_spaced(hi_exp: f64, lo_exp: f64, n: usize) -> Vec<f64> {
    grid(hi_exp, lo_exp, n).map(|e| 10f64.powf(e)).collect()
}

fn sweep(cfg: &SweepConfig) -> Vec<Row> {
    let mut buf = Vec::new();
    run_sweep_to(cfg, &mut buf).expect("sweep runs");
    read_rows(buf.as_slice()).expect("sweep CSV parses")
}

fn chebae_sweep(eps: Vec<f64>, seed: u64) -> Vec<Row> {
    let mut cfg = SweepConfig::new(Algorithm::Chebae, 1000);
    cfg.grid.a = vec![0.5];
    cfg.grid.delta = vec![0.05];
    cfg.grid.eps = eps;
    cfg.seed = seed;
    sweep(&cfg)
}

/// Worst deviation from the headline model when the final measurement of
/// each sample is not counted. Every ChebAE sample is an odd Chebyshev
/// polynomial measured in the `Π` basis, so that count is `tosses`.
fn dev_without_measurement(rows: &[Row], eps: &[f64]) -> f64 {
    eps.iter()
        .map(|&e| {
            let group: Vec<&Row> = rows.iter().filter(|r| r.eps == e).collect();
            let mean = group.iter().map(|r| (r.q_pi - r.tosses) as f64).sum::<f64>() / group.len() as f64;
            let model = 1.71 / e * (2.08 * (1.0 / e).ln()).ln();
            (mean - model).abs() / model
        })
        .fold(0.0, f64::max)
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
}

fn chebae_headline() -> Outcome {
    let eps = log_spaced(-3.0, -6.0, 9);
    let rows = chebae_sweep(eps.clone(), 101);
    let fit = fit_rows(&rows).unwrap();
    let alt = dev_without_measurement(&rows, &eps);
    let mut worst_ratio_dev = 0.0f64;
    let mut worst_fail = 0.0f64;
    let mut pass = true;
    for p in &fit.points {
        let model = 1.71 / p.eps * (2.08 * (1.0 / p.eps).ln()).ln();
        let dev = (p.mean_q_pi - model).abs() / model;
        worst_ratio_dev = worst_ratio_dev.max(dev);
        worst_fail = worst_fail.max(p.failure_rate);
        pass &= dev <= 0.10 && p.failure_rate < 0.05;
    }
    outcome(
        pass,
        format!(
            "9 eps in [1e-3, 1e-6], 1000 runs each: worst |<Q_Pi>/model - 1| = {:.2}% (limit 10%), worst failure rate = {:.3}; own fit (A, B) = ({:.2}, {:.2}) within {:.2}%; not counting measurements: worst deviation {:.2}%",
            100.0 * worst_ratio_dev,
            worst_fail,
            fit.a_param,
            fit.b_param,
            100.0 * fit.ab_max_rel_err_mean,
            100.0 * alt
        ),
    )
}

fn chebae_simple_model() -> Outcome {
    let rows = chebae_sweep(log_spaced(-2.0, -6.0, 9), 102);
    let fit = fit_rows(&rows).unwrap();
    let narrow = chebae_sweep(log_spaced(-3.0, -6.0, 9), 103);
    let narrow_fit = fit_rows(&narrow).unwrap();
    let unmeasured: Vec<Row> = rows
        .iter()
        .cloned()
        .map(|mut r| {
            r.q_pi -= r.tosses;
            r
        })
        .collect();
    let alt_c = fit_rows(&unmeasured).unwrap().c_param;
    let c_ok = (4.2..=5.2).contains(&fit.c_param);
    let bhmt: Vec<f64> = log_spaced(-2.0, -6.0, 9)
        .into_iter()
        .map(|e| bhmt_queries(e, 0.05).unwrap() as f64 * e)
        .collect();
    let bhmt_ok = bhmt.iter().all(|r| (49.5..=50.8).contains(r));
    let lo = bhmt.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = bhmt.iter().copied().fold(0.0, f64::max);
    outcome(
        c_ok && bhmt_ok,
        format!(
            "C = {:.2} on 9 eps in [1e-2, 1e-6] (band [4.2, 5.2], max rel err {:.1}%); for reference C = {:.2} on [1e-3, 1e-6] and C = {alt_c:.2} not counting measurements; bhmt*eps in [{lo:.2}, {hi:.2}]; advantage {:.1}x",
            fit.c_param,
            100.0 * fit.c_max_rel_err_mean,
            narrow_fit.c_param,
            50.0 / fit.c_param
        ),
    )
}

fn poly_invert_numbers() -> Outcome {
    let d = find_next_cheb(&ci(0.34, 0.56));
    let inv = invert_cheb_ci(5, &ci(0.35, 0.75), &ci(0.34, 0.56)).unwrap();
    let lo_ok = (inv.lo - 0.405).abs() <= 0.001;
    let hi_ok = (inv.hi - 0.481).abs() <= 0.001;
    outcome(
        d == 5 && lo_ok && hi_ok,
        format!(
            "find_next_cheb = {d}; inverted interval = [{:.6}, {:.6}] vs [0.405, 0.481] +- 0.001 (lower {}, upper {}); cos^2(5 acos 0.405) = {:.4}",
            inv.lo,
            inv.hi,
            if lo_ok { "ok" } else { "off" },
            if hi_ok { "ok" } else { "off" },
            cheb_t_sq(5, 0.405)
        ),
    )
}

fn repair_polynomials() -> Outcome {
    let (kappa, eta) = (0.25f64, 0.1);
    let (j, k) = build_repair_pair(kappa, eta).unwrap();
    let kbar = (1.0 - kappa * kappa).sqrt();
    let j_max = grid(0.0, kbar, 2001).map(|x| j.p2(x)).fold(0.0, f64::max);
    let k_min = grid(kappa, 1.0, 2001).map(|x| k.p2(x)).fold(1.0, f64::min);
    outcome(
        j.degree() == 9 && k.degree() == 9 && j_max <= eta && k_min >= 1.0 - eta,
        format!(
            "l = {}; max |J|^2 on [0, {kbar:.4}] = {j_max:.4}; min |K|^2 on [0.25, 1] = {k_min:.4}",
            j.degree()
        ),
    )
}

fn nondestructive() -> Outcome {
    let mu = 0.05;
    let runs = 500u64;
    let cheb = ChebAEConfig::new(1e-3, 0.05).with_mode(ChainMode::Tracked);
    let rep = RepairConfig::new(mu);
    let sigma = (mu * (1.0 - mu) / runs as f64).sqrt();
    let floor = 1.0 - mu - 3.0 * sigma;
    let mut pass = true;
    let mut parts = Vec::new();
    for (cell, a) in [1e-6, 0.5, 0.999_999].into_iter().enumerate() {
        let ok = (0..runs)
            .filter(|&i| {
                let mut rng = rng_from_seed(substream_seed(104, cell as u64, i));
                let rec = nondestructive_chebae(amp(a), &cheb, &rep, &mut rng).unwrap();
                rec.final_label() == Some(GroverLabel::Psi)
            })
            .count();
        let frac = ok as f64 / runs as f64;
        pass &= frac >= floor;
        parts.push(format!("a={a}: {frac:.3}"));
    }
    outcome(pass, format!("{} (floor {floor:.3}, {runs} runs each)", parts.join(", ")))
}

fn unbiased() -> Outcome {
    let (a, eps, eta, delta) = (0.3, 1e-2, 0.1, 1e-3);
    let cfg = UnbiasedConfig::new(eps, delta, eta);
    let runs = 100_000u64;
    let (mut sum, mut sum_sq, mut fails) = (0.0, 0.0, 0u64);
    let mut d_totals = std::collections::BTreeSet::new();
    for i in 0..runs {
        let mut rng = rng_from_seed(substream_seed(105, 0, i));
        let rec = unbiased_estimate(amp(a), &cfg, &mut rng).unwrap();
        sum += rec.a_hat;
        sum_sq += rec.a_hat * rec.a_hat;
        fails += u64::from((rec.a_hat - a).abs() >= eps);
        d_totals.insert(rec.ledger.d_total);
    }
    let n = runs as f64;
    let mean = sum / n;
    let stderr = ((sum_sq / n - mean * mean).max(0.0) / n).sqrt();
    let bias_limit = eps * eta + delta + 3.0 * stderr;
    let rate = fails as f64 / n;
    let rate_limit = delta + 3.0 * (delta * (1.0 - delta) / n).sqrt();
    outcome(
        (mean - a).abs() <= bias_limit && rate <= rate_limit && d_totals.len() == 1,
        format!(
            "|mean - a| = {:.2e} (limit {bias_limit:.2e}); failure rate {rate:.5} (limit {rate_limit:.5}); distinct d_total values: {}",
            (mean - a).abs(),
            d_totals.len()
        ),
    )
}

fn hybrid_scaling() -> Outcome {
    let eps = vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
    let delta = 0.05;
    let mut cfg = SweepConfig::new(Algorithm::Hybrid, 100);
    cfg.grid.a = vec![0.5];
    cfg.grid.delta = vec![delta];
    cfg.grid.eps = eps;
    cfg.grid.beta = vec![0.0, 0.3, 0.6];
    cfg.mode = PolyMode::Polynomial;
    cfg.seed = 106;
    let rows = sweep(&cfg);

    let mut cells: BTreeMap<(u64, u64), Vec<&Row>> = BTreeMap::new();
    for r in &rows {
        cells.entry((r.beta.to_bits(), r.eps.to_bits())).or_default().push(r);
    }
    let sigma = (delta * (1.0 - delta) / 100.0).sqrt();
    let mut pass = true;
    let mut worst_fail = 0.0f64;
    let mut parts = Vec::new();
    for beta in [0.0f64, 0.3, 0.6] {
        let mut dmax = Vec::new();
        let mut dtot = Vec::new();
        for ((b, e), group) in &cells {
            if f64::from_bits(*b) != beta {
                continue;
            }
            let x = (1.0 / f64::from_bits(*e)).ln();
            let n = group.len() as f64;
            dmax.push((x, (group.iter().map(|r| r.d_max as f64).sum::<f64>() / n).ln()));
            dtot.push((x, (group.iter().map(|r| r.d_total as f64).sum::<f64>() / n).ln()));
            let rate = group.iter().filter(|r| !r.success).count() as f64 / n;
            worst_fail = worst_fail.max(rate);
            pass &= rate <= delta + 3.0 * sigma;
        }
        let (s_max, s_tot) = (slope(&dmax), slope(&dtot));
        pass &= (s_max - (1.0 - beta)).abs() <= 0.15 && (s_tot - (1.0 + beta)).abs() <= 0.15;
        parts.push(format!("beta={beta}: d_max slope {s_max:.3} (target {:.1}), d_total slope {s_tot:.3} (target {:.1})", 1.0 - beta, 1.0 + beta));
    }
    outcome(pass, format!("{}; worst failure rate {worst_fail:.2}", parts.join("; ")))
}

fn certificate_ok(p: &PolySpec) -> bool {
    p.certificate().is_some_and(|c| c.pass)
}

fn polynomial_certificates() -> Outcome {
    let mut checked = 0usize;
    let mut failed = Vec::new();
    let mut check = |label: String, p: &PolySpec| {
        checked += 1;
        if !certificate_ok(p) {
            failed.push(label);
        }
    };

    let erf = build_erf_poly(4.0, 0.025).unwrap();
    let erf_cert = *erf.certificate().unwrap();
    let erf_shape_ok = erf.parity() == Parity::Odd && erf.degree() <= 31 && erf_cert.bound == 0.025;
    check("erf(4, 0.025)".into(), &erf);
    for (k, eta) in [(10.0, 0.01), (50.0, 0.001), (2.0, 0.1)] {
        check(format!("erf({k}, {eta})"), &build_erf_poly(k, eta).unwrap());
    }

    check("line(0.3, 0.6, 0.1)".into(), &build_line_poly(0.3, 0.6, 0.1, PolyMode::Polynomial).unwrap());
    for t in 0..44 {
        let width = 0.9f64.powi(t);
        let a_min = 0.5 * (1.0 - width);
        for eta in [0.1, 0.05] {
            let p = build_line_poly_with_width(a_min, width, eta, PolyMode::Polynomial).unwrap();
            check(format!("line(a_min={a_min:.4}, width={width:.4}, eta={eta})"), &p);
        }
    }

    for beta in [0.0, 0.3, 0.6] {
        let cfg = HybridConfig::new(1e-3, 0.05, beta).with_mode(PolyMode::Polynomial);
        let mut rounds = Vec::new();
        let mut rng = rng_from_seed(107);
        hybrid_estimate_traced(amp(0.5), &cfg, &mut rng, |r| rounds.push(*r)).unwrap();
        for r in rounds {
            let p = build_hybrid_poly_unchecked(r.params.tau, r.params.eta, r.params.k, r.interval.mid()).unwrap();
            check(format!("hybrid(beta={beta}, round {})", r.t), &p);
        }
    }

    outcome(
        failed.is_empty() && erf_shape_ok,
        format!(
            "{checked} polynomials certified, {} failed{}; erf(4, 0.025): degree {} ({:?}), max error {:.2e} vs bound {}",
            failed.len(),
            failed.first().map(|f| format!(" (first: {f})")).unwrap_or_default(),
            erf.degree(),
            erf.parity(),
            erf_cert.max_error,
            erf_cert.bound
        ),
    )
}

fn framework_identities() -> Outcome {
    let mut qsp_err = 0.0f64;
    let mut row_err = 0.0f64;
    let mut sincheb_err = 0.0f64;
    let mut pell_err = 0.0f64;
    for d in 1..=50u64 {
        let phases = vec![FRAC_PI_2; (d - 1) as usize];
        for a in grid(0.0, 1.0, 101) {
            let u = qsp_unitary(amp(a), &phases);
            qsp_err = qsp_err.max((u.entry(0, 0).norm() - cheb_t(d, a).abs()).abs());
            row_err = row_err.max((u.entry(0, 0).norm_sqr() + u.entry(0, 1).norm_sqr() - 1.0).abs());
            if d % 2 == 1 {
                sincheb_err = sincheb_err.max((cheb_t_sq(d, a) - (d as f64 * a.asin()).sin().powi(2)).abs());
            }
            if a < 1.0 {
                let th = a.acos();
                let u_prev = (d as f64 * th).sin() / th.sin();
                pell_err = pell_err.max((cheb_t_sq(d, a) + (1.0 - a * a) * u_prev * u_prev - 1.0).abs());
            }
        }
    }

    let mut extreme_ok = true;
    for (kappa, eta) in [(0.25, 0.1), (0.1, 0.05), (0.4, 0.2)] {
        let (j, _) = build_repair_pair(kappa, eta).unwrap();
        let l = j.degree();
        let edge = std::f64::consts::PI / (2.0 * l as f64);
        for a in grid(0.0, edge.sin(), 50) {
            extreme_ok &= j.value(a).unwrap().abs() <= cheb_t(l, a).abs() + 1e-12;
        }
        for a in grid(edge.cos(), 1.0, 50) {
            extreme_ok &= j.value(a).unwrap().abs() + 1e-12 >= cheb_t(l, a).abs();
        }
    }

    let delta: f64 = 0.1;
    let total = 200u64;
    let small = amp((delta.sqrt() / total as f64).sin() * 0.99);
    let large = amp(((delta.sqrt() / total as f64).cos() * 1.001).min(1.0));
    let mut rng = rng_from_seed(108);
    let runs = 500;
    let (mut bad_small, mut bad_large) = (0, 0);
    let run = |a: Amplitude, sched: &[u64], rng: &mut qae_core::rng::SimRng| {
        let mut state = GroverLabel::Psi;
        let mut ledger = QueryLedger::default();
        for &d in sched {
            let t = build_chebyshev(d).unwrap();
            if let StateAfter::Tracked(s) = sample_pellian(&t, state, a, &mut ledger, rng).unwrap().state_after {
                state = s;
            }
        }
        state
    };
    for _ in 0..runs {
        let mut left = total;
        let mut sched = Vec::new();
        while left > 0 {
            let d = rng.random_range(1..=left.min(40));
            sched.push(d);
            left -= d;
        }
        bad_small += u32::from(!matches!(run(small, &sched, &mut rng), GroverLabel::Psi | GroverLabel::PiPerp));
        bad_large += u32::from(!matches!(run(large, &sched, &mut rng), GroverLabel::Psi | GroverLabel::Pi));
    }
    let confine_ok = bad_small as f64 / runs as f64 <= delta && bad_large as f64 / runs as f64 <= delta;

    let tol = 1e-10;
    outcome(
        qsp_err <= tol && row_err <= tol && sincheb_err <= tol && pell_err <= tol && extreme_ok && confine_ok,
        format!(
            "QSP vs |T_d| {qsp_err:.1e}; row norm {row_err:.1e}; sin/cheb {sincheb_err:.1e}; Pell {pell_err:.1e}; (T_l, J) extremality {}; confinement damage {bad_small}/{runs} small, {bad_large}/{runs} large",
            if extreme_ok { "holds" } else { "violated" }
        ),
    )
}

fn statistics() -> Outcome {
    let alpha = 0.05;
    let mut closed_err = 0.0f64;
    for n in [1u64, 10, 100, 1000, 10_000] {
        let c = clopper_pearson(0, n, alpha).unwrap();
        closed_err = closed_err.max((c.hi - (1.0 - (alpha / 2.0).powf(1.0 / n as f64))).abs());
        closed_err = closed_err.max(c.lo.abs());
    }
    let mut worst_cov = 1.0f64;
    for (cell, p) in [0.05, 0.3, 0.5, 0.876, 0.99].into_iter().enumerate() {
        let mut rng = rng_from_seed(substream_seed(109, cell as u64, 0));
        let sims = 20_000;
        let hits = (0..sims)
            .filter(|_| clopper_pearson(binomial(100, p, &mut rng), 100, alpha).unwrap().contains(p))
            .count();
        worst_cov = worst_cov.min(hits as f64 / sims as f64);
    }
    let shots = hoeffding_shots(0.1, 0.05).unwrap();
    outcome(
        closed_err <= 1e-9 && worst_cov >= 0.95 && shots == 150,
        format!("zero-heads closed form error {closed_err:.1e}; worst coverage {worst_cov:.4}; hoeffding_shots(0.1, 0.05) = {shots}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("ChebAE headline fit", chebae_headline),
        ("ChebAE simple-model ratio", chebae_simple_model),
        ("poly_invert numbers", poly_invert_numbers),
        ("Repair polynomials", repair_polynomials),
        ("Non-destructive estimation", nondestructive),
        ("Unbiased estimation", unbiased),
        ("Hybrid scaling", hybrid_scaling),
        ("Polynomial certificates", polynomial_certificates),
        ("Framework identities", framework_identities),
        ("Statistics", statistics),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        failures += usize::from(!out.pass);
        println!(
            "{} [{}] {name}: {} ({:.1}s)",
            if out.pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
