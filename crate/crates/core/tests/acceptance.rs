//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use sparsecert::bank::{coefficients, coherent_triples, line_kernel_bank, mixed_bank, rng};
use sparsecert::conditions::{
    analytic_bound, partial_erc, prip, projected_coherence, ric, theta_nsp, theta_oxx, Bound,
};
use sparsecert::dictionary::{generate, ProjectedDictionary};
use sparsecert::greedy::{
    adversarial_instance, intermediate_failure, reachability_input, run, select_next, strict_prefix, success,
};
use sparsecert::relax::verify_lp_minimizer;
use sparsecert::repro::{cross_gram_excess, reproduce_suite};
use sparsecert::subsets::{admissible_count, admissible_pairs, subsets};
use sparsecert::{
    Construction, Dictionary, GreedyConfig, Matrix, MinimizerStatus, SparseVector, Spark, SupportSet, TiePolicy,
    Tolerances, Variant,
};

type Outcome = Result<String, String>;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn gen(c: Construction) -> Dictionary {
    generate::<f64>(&c).expect("valid construction").0
}

/// `{2,3,4} × {0,1} × {0,1}` with `g < k`.
fn equiangular_grid() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for k in 2..=4 {
        for g in 0..=1 {
            for b in 0..=1 {
                out.push((k, g, b));
            }
        }
    }
    out
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn adv(variant: Variant) -> GreedyConfig {
    GreedyConfig::new(variant, TiePolicy::Adversarial).with_tol(tol())
}

fn criterion_1() -> Outcome {
    for (k, g, b) in equiangular_grid() {
        let d = gen(Construction::Equiangular { k, g, b });
        let want = 1.0 / (2 * k - g + b - 1) as f64;
        let mu = d.mutual_coherence();
        ensure((mu - want).abs() <= 1e-10, || format!("({k},{g},{b}): mu = {mu}, expected {want}"))?;
        let spark = d.spark(&tol());
        ensure(spark == Spark::Finite(2 * k - g + b), || format!("({k},{g},{b}): spark {spark:?}"))?;
    }
    Ok(format!("{} dictionaries", equiangular_grid().len()))
}

fn criterion_2() -> Outcome {
    let bank = mixed_bank::<f64>(50, 2024).map_err(|e| e.to_string())?;
    let (mut runs, mut cells) = (0usize, 0usize);
    for (idx, entry) in bank.iter().enumerate() {
        let d = &entry.dictionary;
        ensure(d.n() <= 10, || format!("bank entry {idx} has n = {}", d.n()))?;
        let triples = coherent_triples(d.mutual_coherence(), d.n(), 3, 2);
        ensure(!triples.is_empty(), || format!("bank entry {idx} satisfies no triple"))?;
        let mut r = rng(7_000 + idx as u64);
        for (k, g, b) in triples {
            cells += 1;
            for (q, q_star) in admissible_pairs(d.n(), k, g, b) {
                for _ in 0..5 {
                    let y = d.synthesize(&coefficients::<f64>(d.n(), &q_star, &mut r));
                    for variant in [Variant::Omp, Variant::Ols] {
                        let trace = run(d, &y, &q, &adv(variant), Some(&q_star)).map_err(|e| e.to_string())?;
                        ensure(success(&trace, &q_star, &q), || {
                            format!("entry {idx} ({k},{g},{b}) {variant} failed on Q*={q_star} Q={q}")
                        })?;
                    }
                    runs += 1;
                }
            }
        }
    }
    Ok(format!("{cells} (dictionary, k, g, b) cells, {runs} signals x 2 variants, 0 failures"))
}

fn criterion_3() -> Outcome {
    for (k, g, b) in equiangular_grid() {
        let d = gen(Construction::Equiangular { k, g, b });
        let inst = adversarial_instance(&d, k, g, b, &tol()).map_err(|e| e.to_string())?;
        for variant in [Variant::Omp, Variant::Ols] {
            let trace = run(&d, &inst.y, &inst.q, &adv(variant), Some(&inst.q_star)).map_err(|e| e.to_string())?;
            let first = &trace.iterations[0];
            ensure(first.tie && !inst.q_star.contains(first.selected), || {
                format!("({k},{g},{b}) {variant}: first pick {} tie={}", first.selected, first.tie)
            })?;
        }
    }
    Ok("bad tied first selection on every instance".into())
}

fn criterion_4() -> Outcome {
    let t = tol();
    let ps = [0.0, 0.5, 1.0];
    let bank = mixed_bank::<f64>(50, 2024).map_err(|e| e.to_string())?;
    let grid = equiangular_grid();
    let mut verdicts = 0usize;
    for (idx, entry) in bank.iter().enumerate() {
        let d = &entry.dictionary;
        let mu = d.mutual_coherence();
        let mut r = rng(9_000 + idx as u64);
        for &(k, g, b) in &grid {
            if k + b >= d.n() || mu * (2 * k - g + b - 1) as f64 >= 1.0 {
                continue;
            }
            for (q, q_star) in admissible_pairs(d.n(), k, g, b) {
                let x = SparseVector::new(coefficients::<f64>(d.n(), &q_star, &mut r), &t);
                for p in ps {
                    let v = verify_lp_minimizer(d, &x, &q, p, &t).map_err(|e| e.to_string())?;
                    ensure(v.status == MinimizerStatus::UniqueMinimizer, || {
                        format!("entry {idx} ({k},{g},{b}) p={p} Q*={q_star} Q={q}: {:?}", v.status)
                    })?;
                    verdicts += 1;
                }
            }
        }
    }
    for (k, g, b) in grid {
        let d = gen(Construction::Equiangular { k, g, b });
        let inst = adversarial_instance(&d, k, g, b, &t).map_err(|e| e.to_string())?;
        let x = SparseVector::new(inst.x_star.clone(), &t);
        for p in ps {
            let v = verify_lp_minimizer(&d, &x, &inst.q, p, &t).map_err(|e| e.to_string())?;
            ensure(
                matches!(v.status, MinimizerStatus::MinimizerNotUnique | MinimizerStatus::NotMinimizer),
                || format!("equiangular ({k},{g},{b}) p={p}: {:?}", v.status),
            )?;
        }
    }
    Ok(format!("{verdicts} unique verdicts under the coherence condition; all converse instances non-unique"))
}

fn criterion_5() -> Outcome {
    for (k, g, b) in [(3, 1, 0), (4, 1, 1), (4, 3, 1)] {
        let (d, meta) = generate::<f64>(&Construction::Lemma1 { k, g, b }).map_err(|e| e.to_string())?;
        let delta = ric(&d, k + b + 1).map_err(|e| e.to_string())?;
        let want = 1.0 / ((k - g) as f64).sqrt();
        ensure((delta - want).abs() <= 1e-9, || format!("({k},{g},{b}): delta = {delta}, expected {want}"))?;
        let q = meta.canonical_q.expect("Q recorded");
        let star = meta.canonical_qstar.expect("Q* recorded");
        let proj = ProjectedDictionary::new(&d, &q, &tol()).map_err(|e| e.to_string())?;
        let mut x = vec![0.0; d.n()];
        for i in star.difference(&q).iter() {
            x[i] = 1.0;
        }
        let r = proj.a_tilde().mul_vec(&x);
        for variant in [Variant::Omp, Variant::Ols] {
            let sel = select_next(&d, &q, &r, &adv(variant), Some(&star)).map_err(|e| e.to_string())?;
            for (i, s) in sel.scores.iter().enumerate() {
                if let Some(s) = s {
                    ensure((s - 1.0).abs() <= 1e-9, || format!("({k},{g},{b}) {variant}: score[{i}] = {s}"))?;
                }
            }
        }
    }
    Ok("RIC and tie scores match".into())
}

fn ordering_dictionaries() -> Vec<(String, Dictionary)> {
    let mut out = Vec::new();
    for (k, g, b) in equiangular_grid() {
        out.push((format!("equiangular({k},{g},{b})"), gen(Construction::Equiangular { k, g, b })));
    }
    for n in [5, 6, 8] {
        let gamma = 0.8 / (n - 2) as f64;
        out.push((format!("example1({n})"), gen(Construction::Example1 { n, gamma })));
    }
    for (i, e) in line_kernel_bank::<f64>(20, 77, &tol()).expect("bank").into_iter().enumerate() {
        out.push((format!("random#{i}"), e.dictionary));
    }
    out
}

fn criterion_6() -> Outcome {
    let t = tol();
    let mut checked = 0usize;
    for (name, d) in ordering_dictionaries() {
        let n = d.n();
        let spark = d.spark(&t);
        for k in 1..n {
            for g in 0..k {
                for b in 0..n - k {
                    if !spark.exceeds(k + b) || admissible_count(n, k, g, b) > 100_000 {
                        continue;
                    }
                    let mut last = f64::NEG_INFINITY;
                    for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
                        let th = theta_nsp(&d, k, g, b, p, &t).map_err(|e| e.to_string())?;
                        ensure(th.exact, || format!("{name}: kernel is not one-dimensional"))?;
                        ensure(th.value >= last - t.cert_tol, || {
                            format!("{name} ({k},{g},{b}): theta_{p} = {} below {last}", th.value)
                        })?;
                        last = th.value;
                    }
                    let omp = theta_oxx(&d, k, g, b, Variant::Omp, &t).map_err(|e| e.to_string())?;
                    ensure(last <= omp + t.cert_tol, || {
                        format!("{name} ({k},{g},{b}): theta_1 = {last} > theta_omp = {omp}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (dictionary, k, g, b) orderings"))
}

fn criterion_7() -> Outcome {
    let t = tol();
    for n in [5, 6, 8] {
        let gamma = 0.8 / (n - 2) as f64;
        let d = gen(Construction::Example1 { n, gamma });
        let ols = theta_oxx(&d, 2, 1, 0, Variant::Ols, &t).map_err(|e| e.to_string())?;
        ensure(ols < 1.0, || format!("n={n}: theta_ols = {ols}"))?;
        let th0 = theta_nsp(&d, 2, 1, 0, 0.0, &t).map_err(|e| e.to_string())?.value;
        ensure((th0 - 1.0 / (n - 2) as f64).abs() <= 1e-9, || format!("n={n}: theta_0 = {th0}"))?;
        let th1 = theta_nsp(&d, 2, 1, 0, 1.0, &t).map_err(|e| e.to_string())?.value;
        let want = 1.0 / ((n - 2) as f64 * gamma);
        ensure((th1 - want).abs() <= 1e-9 && (want - 1.25).abs() < 1e-12, || format!("n={n}: theta_1 = {th1}"))?;
    }
    Ok("n in {5, 6, 8}".into())
}

fn criterion_8() -> Outcome {
    let reports = reproduce_suite(&["example2".into(), "example3".into()], &tol(), false).map_err(|e| e.to_string())?;
    for r in &reports {
        ensure(r.pass, || format!("{} failed: {:?}", r.claim, r.measurements))?;
    }
    Ok(format!("example2 {}, example3 {}", reports[0].params, reports[1].params))
}

fn criterion_9() -> Outcome {
    let t = tol();
    let c = t.cert_tol;
    let bank = mixed_bank::<f64>(30, 4242).map_err(|e| e.to_string())?;
    let mut r = rng(99);
    let mut checks = 0usize;
    for (idx, entry) in bank.iter().enumerate() {
        let d = &entry.dictionary;
        let n = d.n();
        let mu = d.mutual_coherence();
        for k in 1..=3 {
            for g in 0..k {
                for b in 0..=1 {
                    if k + b >= n || ((k + b) as f64 - 1.0) * mu >= 1.0 {
                        continue;
                    }
                    let bound = analytic_bound(&Bound::Prop1 { mu, k, g, b }, c).map_err(|e| e.to_string())?.value;
                    for (q, q_star) in admissible_pairs(n, k, g, b) {
                        let erc = partial_erc(d, &q_star, &q, Variant::Omp, &t).map_err(|e| e.to_string())?;
                        ensure(erc <= bound + c, || format!("entry {idx} ({k},{g},{b}): erc {erc} > {bound}"))?;
                        checks += 1;
                    }
                }
            }
        }
        for l in 0..=2usize {
            for q in 1..=3usize {
                if q + l > n || (l as f64 - 1.0) * mu >= 1.0 {
                    continue;
                }
                let p = prip(d, q, l, &t).map_err(|e| e.to_string())?;
                let up = analytic_bound(&Bound::Lemma4Upper { mu, q, l }, c).map_err(|e| e.to_string())?.value;
                let low = analytic_bound(&Bound::Lemma4Lower { mu, q, l }, c).map_err(|e| e.to_string())?.value;
                ensure(p.delta_up <= up + c && p.delta_low <= low + c, || {
                    format!("entry {idx} q={q} l={l}: P-RIP ({}, {}) vs ({up}, {low})", p.delta_up, p.delta_low)
                })?;
                checks += 1;
            }
            if l + 2 > n {
                continue;
            }
            if (l as f64) * mu < 1.0 {
                let ols = projected_coherence(d, l, Variant::Ols, &t).map_err(|e| e.to_string())?;
                let b5 = analytic_bound(&Bound::Lemma5 { mu, l }, c).map_err(|e| e.to_string())?.value;
                ensure(ols <= b5 + c, || format!("entry {idx} l={l}: mu_ols {ols} > {b5}"))?;
                checks += 1;
            }
            let two = prip(d, 2, l, &t).map_err(|e| e.to_string())?;
            let omp = projected_coherence(d, l, Variant::Omp, &t).map_err(|e| e.to_string())?;
            let b10 = analytic_bound(
                &Bound::Lemma10 {
                    delta_up_2: two.delta_up,
                    delta_low_2: two.delta_low,
                },
                c,
            )
            .map_err(|e| e.to_string())?
            .value;
            ensure(omp <= b10 + c, || format!("entry {idx} l={l}: mu_omp {omp} > {b10}"))?;
            let excess = cross_gram_excess(d, l, omp, 100, &mut r, &t).map_err(|e| e.to_string())?;
            ensure(excess <= c, || format!("entry {idx} l={l}: cross-Gram excess {excess}"))?;
            checks += 101;
        }
    }
    Ok(format!("{checks} inequality checks, 0 violations"))
}

fn criterion_10() -> Outcome {
    let t = tol();
    let mut cases = 0;
    for k in 2..=4 {
        for g in 0..k {
            let d = gen(Construction::Equiangular { k, g, b: 0 });
            for variant in [Variant::Omp, Variant::Ols] {
                let cfg = adv(variant);
                let orders: [Vec<usize>; 2] = [(0..g).collect(), (0..d.n() - 2).rev().collect()];
                for order in orders.iter().filter(|o| !o.is_empty()) {
                    let reach = reachability_input(&d, order, &cfg).map_err(|e| e.to_string())?;
                    let trace = run(&d, &reach.y, &SupportSet::empty(), &cfg.with_max_iterations(order.len()), None)
                        .map_err(|e| e.to_string())?;
                    ensure(strict_prefix(&trace, order, &t), || {
                        format!("({k},{g},0) {variant}: order {order:?} not reached strictly")
                    })?;
                }
                let fail = intermediate_failure(&d, k, g, &cfg).map_err(|e| e.to_string())?;
                let trace = run(&d, &fail.y, &SupportSet::empty(), &cfg.with_max_iterations(g + 1), Some(&fail.q_star))
                    .map_err(|e| e.to_string())?;
                let prefix: Vec<usize> = fail.q.iter().collect();
                ensure(strict_prefix(&trace, &prefix, &t), || format!("({k},{g},0) {variant}: good prefix missing"))?;
                ensure(!fail.q_star.contains(trace.iterations[g].selected), || {
                    format!("({k},{g},0) {variant}: iteration {} picked a good atom", g + 1)
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (k, g, variant) cases"))
}

/// Gauss-Jordan inverse.
fn inverse(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut m = a.clone();
    let mut inv = Matrix::identity(n);
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[(i, c)].abs().total_cmp(&m[(j, c)].abs())).unwrap();
        for j in 0..n {
            let (x, y) = (m[(c, j)], inv[(c, j)]);
            m[(c, j)] = m[(p, j)];
            m[(p, j)] = x;
            inv[(c, j)] = inv[(p, j)];
            inv[(p, j)] = y;
        }
        let piv = m[(c, c)];
        for j in 0..n {
            m[(c, j)] /= piv;
            inv[(c, j)] /= piv;
        }
        for i in (0..n).filter(|&i| i != c) {
            let f = m[(i, c)];
            for j in 0..n {
                m[(i, j)] -= f * m[(c, j)];
                inv[(i, j)] -= f * inv[(c, j)];
            }
        }
    }
    inv
}

/// Residual norm of least squares on `A_S` via the normal equations.
fn ls_residual(d: &Dictionary, s: &[usize], y: &[f64]) -> f64 {
    let a = d.atoms().select_columns(s);
    let coef = inverse(&a.gram()).mul_vec(&a.tr_mul_vec(y));
    let fit = a.mul_vec(&coef);
    y.iter().zip(&fit).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Explicitly projected (and for OLS, normalized) atoms.
fn projected(d: &Dictionary, q: &[usize], variant: Variant) -> Vec<Vec<f64>> {
    (0..d.n())
        .map(|i| {
            let ai = d.atom(i);
            let mut v = if q.is_empty() {
                ai.clone()
            } else {
                let a = d.atoms().select_columns(q);
                let coef = inverse(&a.gram()).mul_vec(&a.tr_mul_vec(&ai));
                let fit = a.mul_vec(&coef);
                ai.iter().zip(&fit).map(|(x, f)| x - f).collect()
            };
            let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if variant == Variant::Ols {
                for x in v.iter_mut() {
                    *x = if nrm < 1e-10 { 0.0 } else { *x / nrm };
                }
            }
            v
        })
        .collect()
}

fn erc_oracle(d: &Dictionary, q_star: &[usize], q: &[usize], variant: Variant) -> f64 {
    let cols = projected(d, q, variant);
    let missing: Vec<usize> = q_star.iter().copied().filter(|i| !q.contains(i)).collect();
    let cm = Matrix::from_columns(d.rows(), &missing.iter().map(|&i| cols[i].clone()).collect::<Vec<_>>()).unwrap();
    let pinv = inverse(&cm.gram());
    (0..d.n())
        .filter(|i| !q_star.contains(i) && !q.contains(i))
        .map(|i| pinv.mul_vec(&cm.tr_mul_vec(&cols[i])).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn theta_oracle(d: &Dictionary, k: usize, g: usize, b: usize, variant: Variant) -> f64 {
    let n = d.n();
    let mut worst = 0.0f64;
    for qs in subsets(n, k) {
        let star: Vec<usize> = qs.iter().collect();
        for inner in subsets(k, g) {
            let outside: Vec<usize> = (0..n).filter(|i| !star.contains(i)).collect();
            for extra in subsets(outside.len(), b) {
                let mut q: Vec<usize> = inner.iter().map(|i| star[i]).collect();
                q.extend(extra.iter().map(|i| outside[i]));
                worst = worst.max(erc_oracle(d, &star, &q, variant));
            }
        }
    }
    worst
}

fn criterion_11() -> Outcome {
    let t = tol();
    for seed in 0..100u64 {
        let n = 5 + (seed % 4) as usize;
        let d = sparsecert::bank::gaussian_dictionary::<f64>(n - 1 + (seed % 3) as usize, n, 500 + seed).map_err(|e| e.to_string())?;
        let mut r = rng(seed);
        let qsize = (seed % 3) as usize;
        let q = SupportSet::new(0..qsize).unwrap();
        let star = SupportSet::new(0..qsize + 2).unwrap();
        let y = d.synthesize(&coefficients::<f64>(n, &star, &mut r));
        let cfg = GreedyConfig::new(Variant::Ols, TiePolicy::Lexicographic).with_tol(t);
        let sel = select_next(&d, &q, &y, &cfg, None).map_err(|e| e.to_string())?;
        let (best, _) = (qsize..n)
            .map(|i| {
                let mut s: Vec<usize> = (0..qsize).collect();
                s.push(i);
                (i, ls_residual(&d, &s, &y))
            })
            .fold((usize::MAX, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        ensure(sel.index == best, || format!("seed {seed}: rule picks {} vs residual oracle {best}", sel.index))?;
    }
    let configs = [(2, 1, 0), (2, 0, 1), (3, 1, 1), (2, 1, 1), (3, 1, 0)];
    for i in 0..10u64 {
        let d = sparsecert::bank::gaussian_dictionary::<f64>(5 + (i % 2) as usize, 7, 900 + i).map_err(|e| e.to_string())?;
        let (k, g, b) = configs[(i % 5) as usize];
        let variant = if i % 2 == 0 { Variant::Omp } else { Variant::Ols };
        let got = theta_oxx(&d, k, g, b, variant, &t).map_err(|e| e.to_string())?;
        let want = theta_oracle(&d, k, g, b, variant);
        ensure((got - want).abs() <= 1e-9, || format!("instance {i}: theta {got} vs oracle {want}"))?;
    }
    for (k, g, b) in equiangular_grid() {
        let (d, meta) = generate::<f64>(&Construction::Equiangular { k, g, b }).map_err(|e| e.to_string())?;
        let mu = meta.mu;
        let n = d.n();
        for size in 0..n {
            for rset in subsets(n, size) {
                let p = ProjectedDictionary::new(&d, &rset, &t).map_err(|e| e.to_string())?;
                let quad = size as f64 / (1.0 + mu - size as f64 * mu);
                let out: Vec<usize> = rset.complement(n).iter().collect();
                for (a, &i) in out.iter().enumerate() {
                    let ai = p.a_tilde().column(i);
                    let nn: f64 = ai.iter().map(|x| x * x).sum();
                    ensure((nn - (1.0 - mu * mu * quad)).abs() <= 1e-9, || format!("({k},{g},{b}) norm identity"))?;
                    for &j in &out[a + 1..] {
                        let ip: f64 = ai.iter().zip(p.a_tilde().column(j)).map(|(x, y)| x * y).sum();
                        ensure((ip - (-mu - mu * mu * quad)).abs() <= 1e-9, || format!("({k},{g},{b}) inner identity"))?;
                    }
                }
            }
        }
    }
    Ok("100 OLS selections, 10 theta instances, projected-Gram identities".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 11] = [
        ("1 equiangular coherence and spark", criterion_1, Duration::from_secs(1)),
        ("2 coherence sufficiency on a random bank", criterion_2, Duration::from_secs(120)),
        ("3 converse instances fail at iteration 1", criterion_3, Duration::from_secs(1)),
        ("4 lp minimizer, both directions", criterion_4, Duration::from_secs(60)),
        ("5 tight RIC construction", criterion_5, Duration::from_secs(5)),
        ("6 null-space constant orderings", criterion_6, Duration::from_secs(120)),
        ("7 one-dimensional kernel example", criterion_7, Duration::from_secs(1)),
        ("8 coherence and RIC conditions do not imply each other", criterion_8, Duration::from_secs(1)),
        ("9 bound chains", criterion_9, Duration::from_secs(180)),
        ("10 reachability and intermediate failure", criterion_10, Duration::from_secs(10)),
        ("11 oracle equivalences", criterion_11, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
