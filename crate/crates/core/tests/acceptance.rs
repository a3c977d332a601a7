//! Release gate: every acceptance criterion at its stated tolerance, one
//! PASS/FAIL line each. Exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use qnn_core::amplitude::{required_copies, AeLaw};
use qnn_core::baselines::mc_inner_product;
use qnn_core::circuits::{
    euclidean_probability, recover_inner_product_sq, statevector_validate, swap_test_probability,
    Encoding, DEFAULT_MAX_QUBITS,
};
use qnn_core::classify::{
    kmeans_iteration, knn, lloyd_step_exact, nearest_centroid, nn_euclidean, nn_inner_product,
    theorem_bound, Bound, BoundParams, DistanceMode, Metric,
};
use qnn_core::experiments::{
    cost_region, distance_gap_study, gen_halfmoon, interclass_gap, log_grid, mean_std,
    opposite_centroid_fraction, sweep_noise, SweepMethod, HALFMOON_NOISE,
};
use qnn_core::minfind::{durr_hoyer_min, Limits, EXPECTED_ITERATIONS_FACTOR};
use qnn_core::oracle::{Entry, QueryCount, SparseVector, TrainingSet};
use qnn_core::rng::{seeded, SimRng};
use qnn_core::AE_SUCCESS;

type Check = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn ae_edge_cases() -> Check {
    let mut rng = seeded(101);
    for register in [1u64, 2, 3, 16, 17, 64, 255, 256] {
        let law = AeLaw::new(0.0, register).unwrap();
        for _ in 0..1000 {
            let y = law.sample(&mut rng);
            if law.estimate(y) != 0.0 {
                return Err(format!("a=0, R={register}: estimate {}", law.estimate(y)));
            }
        }
    }
    for register in [2u64, 4, 16, 64, 256] {
        let law = AeLaw::new(1.0, register).unwrap();
        for _ in 0..1000 {
            let y = law.sample(&mut rng);
            if law.estimate(y) != 1.0 {
                return Err(format!("a=1, R={register}: estimate {}", law.estimate(y)));
            }
        }
    }
    Ok("a=0 gives 0 and a=1 (even R) gives 1 on every sample".into())
}

fn ae_error_bound() -> Check {
    let n = 10_000;
    let floor = AE_SUCCESS - 3.0 * binomial_sigma(AE_SUCCESS, n);
    let mut rng = seeded(102);
    let mut worst = (1.0, 0.0, 0);
    for a in [0.1, 0.25, 0.5, 0.8] {
        for register in [16u64, 64, 256] {
            let law = AeLaw::new(a, register).unwrap();
            let r = register as f64;
            let tol = 2.0 * PI * (a * (1.0 - a)).sqrt() / r + PI * PI / (r * r);
            let hits = (0..n)
                .filter(|_| (law.estimate(law.sample(&mut rng)) - a).abs() <= tol)
                .count();
            let frac = hits as f64 / n as f64;
            if frac < worst.0 {
                worst = (frac, a, register);
            }
        }
    }
    verdict(
        worst.0 >= floor,
        format!("worst fraction {:.4} at a={}, R={} (floor {floor:.4})", worst.0, worst.1, worst.2),
    )
}

fn coherent_ae() -> Check {
    let k = required_copies(0.01, AE_SUCCESS).unwrap();
    if k != 24 {
        return Err(format!("k = {k}, expected 24"));
    }
    let n = 10_000;
    let limit = 0.01 + 3.0 * binomial_sigma(0.01, n);
    let mut rng = seeded(103);
    let mut worst = 0.0f64;
    for (a, register) in [(0.3, 64u64), (0.05, 16), (0.77, 256)] {
        let law = AeLaw::new(a, register).unwrap();
        let fails = (0..n)
            .filter(|_| !law.is_admissible(law.sample_median(&mut rng, k)))
            .count();
        worst = worst.max(fails as f64 / n as f64);
    }
    verdict(worst <= limit, format!("k=24, worst median failure rate {worst:.4} (limit {limit:.4})"))
}

fn random_sparse_unit(rng: &mut SimRng, dim: usize, d: usize) -> SparseVector {
    let mut idx: Vec<usize> = (0..dim).collect();
    idx.shuffle(rng);
    let mut support = idx[..d].to_vec();
    support.sort_unstable();
    let raw: Vec<Complex64> = support
        .iter()
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let entries: Vec<Entry> = support
        .iter()
        .zip(&raw)
        .map(|(&i, z)| {
            let (r, phi) = (z / norm).to_polar();
            Entry::new(i, r, phi)
        })
        .collect();
    let r_max = entries.iter().map(|e| e.magnitude).fold(0.0, f64::max);
    SparseVector::new(dim, entries, d, r_max).unwrap()
}

fn swap_test_identity() -> Check {
    let mut rng = seeded(104);
    let (mut worst_id, mut worst_sv, mut validated) = (0.0f64, 0.0f64, 0);
    for _ in 0..1000 {
        let dim = rng.random_range(2..=16);
        let d = rng.random_range(1..=dim);
        let u = random_sparse_unit(&mut rng, dim, d);
        let v = random_sparse_unit(&mut rng, dim, d);
        let a = swap_test_probability(&u, &v).unwrap();
        let rec = recover_inner_product_sq(a, d, u.r_max(), v.r_max()).unwrap();
        worst_id = worst_id.max((rec - u.inner(&v).norm_sqr()).abs());
        match statevector_validate(&u, &v, DEFAULT_MAX_QUBITS) {
            Ok(rep) => {
                validated += 1;
                worst_sv = worst_sv.max(rep.difference());
            }
            Err(qnn_core::Error::RegisterTooLarge { .. }) => {}
            Err(e) => return Err(format!("statevector check failed: {e}")),
        }
    }
    verdict(
        worst_id <= 1e-10 && worst_sv <= 1e-10 && validated > 0,
        format!("max identity error {worst_id:.2e}, max statevector error {worst_sv:.2e} over {validated} simulated pairs"),
    )
}

fn euclidean_relation() -> Check {
    let mut rng = seeded(105);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let dim = rng.random_range(1..=8);
        let size = rng.random_range(1..=8);
        let draw = |rng: &mut SimRng| {
            let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            SparseVector::from_dense_real(&x, 0.0).unwrap()
        };
        let u = draw(&mut rng);
        let cluster: Vec<SparseVector> = (0..size).map(|_| draw(&mut rng)).collect();
        let refs: Vec<&SparseVector> = cluster.iter().collect();
        let enc = Encoding::covering(std::iter::once(&u).chain(cluster.iter())).unwrap();
        let p = euclidean_probability(&u, &refs, &enc).unwrap();
        let mean: Vec<Complex64> = (0..dim)
            .map(|i| cluster.iter().map(|v| v.value(i)).sum::<Complex64>() / size as f64)
            .collect();
        let exact: f64 = (0..dim).map(|i| (u.value(i) - mean[i]).norm_sqr()).sum();
        worst = worst.max((enc.distance_scale() * p - exact).abs());
    }
    verdict(worst <= 1e-10, format!("max |4dr²P − |u − c|²| = {worst:.2e}"))
}

fn durr_hoyer() -> Check {
    let mut rng = seeded(106);
    for _ in 0..1000 {
        let m: usize = rng.random_range(1..=64);
        let values: Vec<f64> = (0..m).map(|_| rng.random_range(0..m.div_ceil(2)) as f64).collect();
        let r = durr_hoyer_min(&mut rng, &values, QueryCount::new(1, 0), Limits::exact(m)).unwrap();
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let first = values.iter().position(|&v| v == min).unwrap();
        if r.aborted || r.argmin != first {
            return Err(format!("wrong argmin {} (expected {first}) on {values:?}", r.argmin));
        }
    }
    let mut detail = String::from("argmin exact on 1000 lists; mean iterations/√M:");
    let mut ok = true;
    for m in [4usize, 16, 64, 256] {
        let mut total = 0u64;
        for _ in 0..1000 {
            let mut values: Vec<f64> = (0..m).map(|v| v as f64).collect();
            values.shuffle(&mut rng);
            total += durr_hoyer_min(&mut rng, &values, QueryCount::new(1, 0), Limits::exact(m))
                .unwrap()
                .grover_iterations;
        }
        let ratio = total as f64 / 1000.0 / (m as f64).sqrt();
        ok &= ratio <= EXPECTED_ITERATIONS_FACTOR;
        detail.push_str(&format!(" M={m}: {ratio:.2}"));
    }
    verdict(ok, detail)
}

fn end_to_end_budget() -> Check {
    let delta0 = 0.5;
    let runs = 200;
    let mut rng = seeded(107);
    let (mut checked, mut over) = (0usize, 0usize);
    let mut tally = |o: &qnn_core::classify::ClassificationOutcome| {
        if !o.aborted {
            checked += 1;
            over += usize::from(!o.within_bound());
        }
    };

    // Euclidean: squared distances 0.1, 0.15, … separated by 0.05 > 2ε.
    let eps = 0.01;
    let mode = DistanceMode::Quantum { epsilon: eps, delta0 };
    let pts: Vec<SparseVector> = (0..16)
        .map(|j| {
            let r = (0.1 + 0.05 * j as f64).sqrt();
            let t = 0.4 * j as f64;
            SparseVector::from_dense_real(&[r * t.cos(), r * t.sin()], 0.0)
                .unwrap()
                .with_sparsity(2)
                .unwrap()
                .with_r_max(1.0)
                .unwrap()
        })
        .collect();
    let mut order: Vec<usize> = (0..16).collect();
    order.shuffle(&mut rng);
    let shuffled: Vec<SparseVector> = order.iter().map(|&j| pts[j].clone()).collect();
    let truth = order.iter().position(|&j| j == 0).unwrap();
    let training = TrainingSet::new(shuffled, (0..16).collect()).unwrap();
    let u = SparseVector::from_dense_real(&[0.0, 0.0], 0.0)
        .unwrap()
        .with_sparsity(2)
        .unwrap()
        .with_r_max(1.0)
        .unwrap();
    let expected = theorem_bound(
        Bound::Euclidean,
        &BoundParams { m: 16, k: 1, d: 2, r_max: 1.0, epsilon: eps, delta0 },
    )
    .unwrap();
    let mut wrong_e = 0;
    for _ in 0..runs {
        let o = nn_euclidean(&mut rng, &u, &training, mode).unwrap();
        if o.bound.is_none_or(|b| b > expected) {
            return Err(format!("reported bound {:?} exceeds the closed form {expected}", o.bound));
        }
        tally(&o);
        wrong_e += usize::from(o.aborted || o.argmin != truth);
    }

    // Inner products: unit vectors with squared distances 0.12(j+1).
    let unit: Vec<SparseVector> = (0..16)
        .map(|j| {
            let c = 1.0 - 0.06 * (j + 1) as f64;
            let s = (1.0 - c * c).sqrt();
            SparseVector::from_dense_real(&[c, s], 0.0).unwrap().with_sparsity(2).unwrap()
        })
        .collect();
    let shuffled: Vec<SparseVector> = order.iter().map(|&j| unit[j].clone()).collect();
    let training_ip = TrainingSet::new(shuffled, (0..16).collect()).unwrap();
    let e1 = SparseVector::from_dense_real(&[1.0, 0.0], 0.0).unwrap().with_sparsity(2).unwrap();
    let mut wrong_ip = 0;
    for _ in 0..runs {
        let o = nn_inner_product(&mut rng, &e1, &training_ip, mode).unwrap();
        tally(&o);
        wrong_ip += usize::from(o.aborted || o.argmin != truth);
    }

    // Centroids and a k-means step.
    let clustered = TrainingSet::new(
        training.vectors().to_vec(),
        (0..16).map(|j| usize::from(order[j] >= 8)).collect(),
    )
    .unwrap();
    for normalize in [false, true] {
        for _ in 0..20 {
            tally(&nearest_centroid(&mut rng, &u, &clustered, mode, normalize).unwrap());
        }
    }
    let mut k_over = 0;
    for _ in 0..10 {
        let step = kmeans_iteration(&mut rng, training.vectors(), 2, clustered.labels(), mode).unwrap();
        if step.aborted == 0 && !step.within_bound() {
            k_over += 1;
        }
    }

    let limit = delta0 + 3.0 * binomial_sigma(delta0, runs);
    let rate_e = wrong_e as f64 / runs as f64;
    let rate_ip = wrong_ip as f64 / runs as f64;
    verdict(
        over == 0 && k_over == 0 && checked > 0 && rate_e <= limit && rate_ip <= limit,
        format!(
            "{checked} non-aborted runs, {over} over budget, k-means over budget {k_over}; \
             wrong-argmin rate {rate_e:.3} (Euclidean) {rate_ip:.3} (inner product), limit {limit:.3}"
        ),
    )
}

fn halfmoon_reproduction() -> Check {
    let data = gen_halfmoon(&mut seeded(108), 2000, HALFMOON_NOISE).unwrap();
    let grid = [1e-5, 1e-3, 1e-1, 1e5];
    let nn = sweep_noise(8, &data, SweepMethod::Nn, &grid, 50, 0.5, false).unwrap();
    let ce = sweep_noise(8, &data, SweepMethod::Centroid, &grid, 50, 0.5, false).unwrap();
    let opposite = opposite_centroid_fraction(&data);
    let low_ok = nn.rows[0].mean >= 0.98 && (ce.rows[0].mean - 0.86).abs() <= 0.03;
    let high_ok = (nn.rows[3].mean - 0.5).abs() <= 0.04 && (ce.rows[3].mean - 0.5).abs() <= 0.04;
    let cap = (1.0 - 0.143) + 0.03;
    let cap_ok = ce.rows[..3].iter().all(|r| r.mean <= cap);
    verdict(
        low_ok && high_ok && cap_ok,
        format!(
            "ε=1e-5: NN {:.4}, centroid {:.4}; ε=1e5: NN {:.4}, centroid {:.4}; \
             max low-noise centroid {:.4} (cap {cap:.3}); opposite-centroid fraction {opposite:.4}",
            nn.rows[0].mean,
            ce.rows[0].mean,
            nn.rows[3].mean,
            ce.rows[3].mean,
            ce.rows[..3].iter().map(|r| r.mean).fold(0.0, f64::max),
        ),
    )
}

fn noise_collapse() -> Check {
    let data = gen_halfmoon(&mut seeded(109), 2000, HALFMOON_NOISE).unwrap();
    let gap = interclass_gap(&data);
    let r = sweep_noise(9, &data, SweepMethod::Nn, &[gap / 10.0, gap * 10.0], 50, 0.5, false).unwrap();
    verdict(
        r.rows[0].mean >= 0.95 && r.rows[1].mean <= 0.7,
        format!(
            "gap {gap:.3}: accuracy {:.4} at ε={:.3}, {:.4} at ε={:.3}",
            r.rows[0].mean, r.rows[0].param, r.rows[1].mean, r.rows[1].param
        ),
    )
}

fn monte_carlo() -> Check {
    let mut rng = seeded(110);
    let reps = 10_000;
    let (mut worst_z, mut worst_var) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let dim = rng.random_range(4..=32);
        let d = rng.random_range(1..=dim);
        let a = random_sparse_unit(&mut rng, dim, d);
        let b = random_sparse_unit(&mut rng, dim, d);
        let samples = rng.random_range(1..=16);
        let xs: Vec<f64> = (0..reps)
            .map(|_| mc_inner_product(&mut rng, &a, &b, samples).unwrap().value)
            .collect();
        let closed = mc_inner_product(&mut rng, &a, &b, samples).unwrap().variance_bound;
        let (mean, std) = mean_std(&xs);
        let se = std / (reps as f64).sqrt();
        worst_z = worst_z.max((mean - a.inner(&b).re).abs() / se);
        worst_var = worst_var.max((std * std / closed - 1.0).abs());
    }
    verdict(
        worst_z <= 4.0 && worst_var <= 0.2,
        format!("max |mean − aᵀb| = {worst_z:.2} SE, max relative variance error {worst_var:.3}"),
    )
}

fn concentration() -> Check {
    let r = distance_gap_study(111, &[4, 16, 64, 256, 1024], 100, 100).unwrap();
    let slope = r.fits[0].1;
    verdict((-0.65..=-0.35).contains(&slope), format!("gap slope {slope:.4}"))
}

fn cost_region_fit() -> Check {
    let ns = log_grid(1e2, 1e6, 9);
    let e = cost_region(&ns, Bound::Euclidean).unwrap();
    let i = cost_region(&ns, Bound::InnerProduct).unwrap();
    let within = |x: f64, target: f64| x >= target / 3.0 && x <= target * 3.0;
    verdict(
        (e.exponent + 1.07).abs() <= 0.1
            && within(e.prefactor, 1e16)
            && (i.exponent + 1.08).abs() <= 0.1
            && within(i.prefactor, 2e14),
        format!(
            "Euclidean M* = {:.3e}·N^{:.4}; inner product M* = {:.3e}·N^{:.4}",
            e.prefactor, e.exponent, i.prefactor, i.exponent
        ),
    )
}

fn knn_and_kmeans() -> Check {
    let mut rng = seeded(112);
    let draw = |rng: &mut SimRng, n: usize| -> Vec<f64> { (0..n).map(|_| rng.random_range(-1.0..1.0)).collect() };
    let rows: Vec<Vec<f64>> = (0..12).map(|_| draw(&mut rng, 3)).collect();
    let bound = rows.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let enc = |x: &[f64]| {
        SparseVector::from_dense_real(x, 0.0).unwrap().with_sparsity(3).unwrap().with_r_max(bound).unwrap()
    };
    let training = TrainingSet::new(rows.iter().map(|x| enc(x)).collect(), (0..12).map(|j| j % 3).collect()).unwrap();
    let test = enc(&[0.1, -0.2, 0.3]);
    for (seed, mode) in [
        (1, DistanceMode::Exact),
        (2, DistanceMode::Quantum { epsilon: 0.05, delta0: 0.2 }),
        (3, DistanceMode::Quantum { epsilon: 0.01, delta0: 0.5 }),
    ] {
        let a = nn_euclidean(&mut seeded(seed), &test, &training, mode).unwrap();
        let b = knn(&mut seeded(seed), &test, &training, mode, 1, Metric::Euclidean).unwrap();
        let c = nn_inner_product(&mut seeded(seed), &test, &training, mode).unwrap();
        let d = knn(&mut seeded(seed), &test, &training, mode, 1, Metric::InnerProduct).unwrap();
        if a != b || c != d {
            return Err(format!("knn(k=1) differs from nn under seed {seed}"));
        }
    }

    let (n, m, trials) = (8, 60, 50);
    let mut agree = 0usize;
    for trial in 0..trials {
        let mut rng = seeded(1000 + trial);
        let centers: Vec<Vec<f64>> = (0..3).map(|_| draw(&mut rng, n)).collect();
        let mut truth = Vec::with_capacity(m);
        let pts: Vec<Vec<f64>> = (0..m)
            .map(|j| {
                let c = j % 3;
                truth.push(c);
                centers[c].iter().map(|x| x + 0.15 * rng.sample::<f64, _>(StandardNormal)).collect()
            })
            .collect();
        let r = pts.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
        let vectors: Vec<SparseVector> = pts
            .iter()
            .map(|x| SparseVector::from_dense_real(x, 0.0).unwrap().with_sparsity(n).unwrap().with_r_max(r).unwrap())
            .collect();
        let start: Vec<usize> = truth
            .iter()
            .map(|&c| if rng.random_bool(0.2) { rng.random_range(0..3) } else { c })
            .collect();
        let exact = lloyd_step_exact(&vectors, 3, &start).unwrap();
        let noisy = kmeans_iteration(
            &mut rng,
            &vectors,
            3,
            &start,
            DistanceMode::Quantum { epsilon: 1e-3, delta0: 0.5 },
        )
        .unwrap();
        agree += exact.assignment.iter().zip(&noisy.assignment).filter(|(a, b)| a == b).count();
    }
    let rate = agree as f64 / (m * trials as usize) as f64;
    verdict(rate >= 0.95, format!("knn(k=1) identical to nn; k-means agreement {rate:.4}"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 13] = [
        ("AE edge cases", ae_edge_cases),
        ("AE error bound", ae_error_bound),
        ("coherent AE median voting", coherent_ae),
        ("swap-test identity", swap_test_identity),
        ("Euclidean relation", euclidean_relation),
        ("Dürr–Høyer minimum finding", durr_hoyer),
        ("end-to-end query budget", end_to_end_budget),
        ("half-moon reproduction", halfmoon_reproduction),
        ("noise-collapse location", noise_collapse),
        ("Monte-Carlo estimator", monte_carlo),
        ("concentration study", concentration),
        ("cost-region fit", cost_region_fit),
        ("k-NN and k-means", knn_and_kmeans),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
