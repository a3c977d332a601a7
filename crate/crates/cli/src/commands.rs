use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use qnn_core::baselines::{mc_centroid_distance, mc_inner_product, McConstants};
use qnn_core::classify::{
    knn, nearest_centroid, theorem_bound, Bound, BoundParams, ClassificationOutcome, DistanceMode,
    Metric,
};
use qnn_core::experiments::{
    cost_region, default_noise_grid, distance_gap_study, gen_halfmoon, gen_hypersphere_uniform,
    load_csv_dataset, log_grid, split, sweep_noise, sweep_trainsize, write_dataset_csv, CsvOptions,
    Dataset, NoiseModel, SweepMethod,
};
use qnn_core::oracle::{SparseVector, TrainingSet};
use qnn_core::report::{fmt_g, render_report, write_atomic};
use qnn_core::rng::{stream, SimRng};

use crate::{
    usage, BoundsArgs, ClassifyArgs, ClassifyMethod, CliError, Command, CostRegionArgs, DataArgs,
    GapArgs, GenKind, GenerateArgs, Mode, NoiseArgs, Output, Sweep, SweepMethodArg, TrainsizeArgs,
};

/// Stream ids below this are reserved for dataset generation and splits;
/// test point `i` uses `POINT_STREAM_BASE + i`.
const POINT_STREAM_BASE: u64 = 1 << 20;

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Classify(a) => classify(a),
        Command::Sweep(Sweep::Noise(a)) => noise(a),
        Command::Sweep(Sweep::Trainsize(a)) => trainsize(a),
        Command::Sweep(Sweep::Gap(a)) => gap(a),
        Command::Sweep(Sweep::CostRegion(a)) => cost(a),
        Command::Bounds(a) => bounds(a),
    }
}

fn require_seed(seed: Option<u64>) -> Result<u64, CliError> {
    seed.ok_or_else(|| usage("--seed is required for randomized commands"))
}

fn destination(out: &Output, default_name: &str) -> Option<PathBuf> {
    out.output.clone().or_else(|| {
        std::env::var_os("QNN_OUTPUT_DIR")
            .filter(|d| !d.is_empty())
            .map(|d| Path::new(&d).join(default_name))
    })
}

fn emit(out: &Output, default_name: &str, contents: &str) -> Result<(), CliError> {
    match destination(out, default_name) {
        Some(path) => write_atomic(&path, contents.as_bytes())?,
        None => std::io::stdout().write_all(contents.as_bytes())?,
    }
    Ok(())
}

fn load(data: &DataArgs, seed: u64) -> Result<Dataset, CliError> {
    if data.dataset == "halfmoon" {
        return Ok(gen_halfmoon(&mut stream(seed, 0), data.size, data.noise)?);
    }
    let path = Path::new(&data.dataset);
    if !path.exists() {
        return Err(usage(format!("dataset {:?} is neither `halfmoon` nor an existing file", data.dataset)));
    }
    Ok(load_csv_dataset(
        path,
        &CsvOptions {
            label_column: data.label_column.clone(),
            standardize: !data.no_standardize,
            drop_boolean: data.drop_boolean,
            ignore: data.ignore.clone(),
        },
    )?)
}

fn generate(a: GenerateArgs) -> Result<(), CliError> {
    let seed = require_seed(a.seed)?;
    let mut rng = stream(seed, 0);
    let mut buf = Vec::new();
    match a.kind {
        GenKind::Halfmoon => write_dataset_csv(&gen_halfmoon(&mut rng, a.size, a.noise)?, &mut buf)?,
        GenKind::Hypersphere => {
            let vs = gen_hypersphere_uniform(&mut rng, a.n, a.size)?;
            let mut s = (0..a.n)
                .map(|i| format!("re{i},im{i}"))
                .collect::<Vec<_>>()
                .join(",");
            s.push('\n');
            for v in vs {
                let cells: Vec<String> = v
                    .iter()
                    .flat_map(|z| [fmt_g(z.re), fmt_g(z.im)])
                    .collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            buf = s.into_bytes();
        }
    }
    let text = String::from_utf8(buf).expect("csv output is utf-8");
    emit(&a.out, "generate.csv", &text)
}

fn distance_mode(a: &ClassifyArgs) -> Result<Option<f64>, CliError> {
    match (a.mode, a.epsilon) {
        (Mode::Exact, Some(_)) => Err(usage("--epsilon is not allowed with --mode exact")),
        (Mode::Exact, None) => Ok(None),
        (_, None) => Err(usage("--epsilon is required outside exact mode")),
        (_, Some(e)) if !(e > 0.0 && e.is_finite()) => {
            Err(usage(format!("--epsilon must be positive, got {e}")))
        }
        (_, Some(e)) => Ok(Some(e)),
    }
}

/// One classified test point.
struct Row {
    label: usize,
    argmin: usize,
    queries: u64,
    bound: Option<f64>,
}

impl From<ClassificationOutcome> for Row {
    fn from(o: ClassificationOutcome) -> Self {
        Row {
            label: o.label,
            argmin: o.argmin,
            queries: o.ledger.total(),
            bound: o.bound,
        }
    }
}

fn most_common_lowest(labels: impl Iterator<Item = usize>) -> usize {
    let mut counts = std::collections::BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_insert(0usize) += 1;
    }
    let best = counts.values().copied().max().unwrap_or(0);
    counts.into_iter().find(|(_, c)| *c == best).map_or(0, |(l, _)| l)
}

/// Sample count making the standard deviation of a sampled squared
/// distance at most `epsilon`: `Var X ≤ D·d·r⁴/N_c` and the distance uses `2X`.
fn mc_samples(u: &SparseVector, v: &SparseVector, epsilon: f64) -> u64 {
    let d = u.sparsity().max(v.sparsity()) as f64;
    let universe = (u.dim() as f64).max(2.0 * d);
    let r = u.r_max().max(v.r_max());
    (4.0 * universe * d * r.powi(4) / (epsilon * epsilon)).ceil().max(1.0) as u64
}

fn classical_mc(
    rng: &mut SimRng,
    test: &SparseVector,
    training: &TrainingSet,
    method: ClassifyMethod,
    k: usize,
    epsilon: f64,
) -> Result<Row, CliError> {
    let vs = training.vectors();
    match method {
        ClassifyMethod::Nn | ClassifyMethod::NnInner | ClassifyMethod::Knn => {
            let k = if method == ClassifyMethod::Knn { k } else { 1 };
            if k == 0 || k > vs.len() {
                return Err(usage(format!("--k must lie in 1..={}", vs.len())));
            }
            let mut accesses = 0;
            let mut est = Vec::with_capacity(vs.len());
            for v in vs {
                let x = mc_inner_product(rng, test, v, mc_samples(test, v, epsilon))?;
                accesses += x.accesses;
                est.push(test.norm_sqr() + v.norm_sqr() - 2.0 * x.value);
            }
            let mut order: Vec<usize> = (0..vs.len()).collect();
            order.sort_by(|&a, &b| est[a].total_cmp(&est[b]).then(a.cmp(&b)));
            order.truncate(k);
            let labels = training.labels();
            Ok(Row {
                label: most_common_lowest(order.iter().map(|&j| labels[j])),
                argmin: order[0],
                queries: accesses,
                bound: None,
            })
        }
        ClassifyMethod::Centroid => {
            let clusters = training.effective_clusters();
            let mut accesses = 0;
            let mut best = (f64::INFINITY, 0);
            for (c, members) in clusters.iter().enumerate() {
                let refs: Vec<&SparseVector> = members.iter().map(|&j| &vs[j]).collect();
                let x = mc_centroid_distance(rng, test, &refs, epsilon, McConstants::default())?;
                accesses += x.accesses;
                if x.value < best.0 {
                    best = (x.value, c);
                }
            }
            Ok(Row {
                label: training.cluster_label(&clusters[best.1]),
                argmin: best.1,
                queries: accesses,
                bound: None,
            })
        }
        ClassifyMethod::CentroidNormalized => {
            Err(usage("centroid-normalized has no classical-mc estimator"))
        }
    }
}

fn classify_point(
    rng: &mut SimRng,
    test: &SparseVector,
    training: &TrainingSet,
    a: &ClassifyArgs,
    epsilon: Option<f64>,
) -> Result<Row, CliError> {
    let mode = match (a.mode, epsilon) {
        (Mode::ClassicalMc, Some(e)) => return classical_mc(rng, test, training, a.method, a.k, e),
        (Mode::QuantumSim, Some(e)) => DistanceMode::Quantum { epsilon: e, delta0: a.delta0 },
        _ => DistanceMode::Exact,
    };
    let o = match a.method {
        ClassifyMethod::Nn => knn(rng, test, training, mode, 1, Metric::Euclidean)?,
        ClassifyMethod::NnInner => knn(rng, test, training, mode, 1, Metric::InnerProduct)?,
        ClassifyMethod::Knn => knn(rng, test, training, mode, a.k, Metric::Euclidean)?,
        ClassifyMethod::Centroid => nearest_centroid(rng, test, training, mode, false)?,
        ClassifyMethod::CentroidNormalized => nearest_centroid(rng, test, training, mode, true)?,
    };
    Ok(o.into())
}

fn classify(a: ClassifyArgs) -> Result<(), CliError> {
    let epsilon = distance_mode(&a)?;
    let seed = require_seed(a.seed)?;
    if !(a.delta0 > 0.0 && a.delta0 < 1.0) {
        return Err(usage(format!("--delta0 must lie in (0, 1), got {}", a.delta0)));
    }
    let data = load(&a.data, seed)?;
    let (train, test) = split(&mut stream(seed, 1), data.len(), a.train_fraction)?;
    let training = data.to_training(&train)?;
    let rows = test
        .par_iter()
        .map(|&i| {
            let mut rng = stream(seed, POINT_STREAM_BASE + i as u64);
            let v = data.vector(i, &train)?;
            classify_point(&mut rng, &v, &training, &a, epsilon)
        })
        .collect::<Result<Vec<Row>, CliError>>()?;
    let centroid = matches!(a.method, ClassifyMethod::Centroid | ClassifyMethod::CentroidNormalized);
    let mut out = String::from("index,assigned_label,true_label,argmin,queries,bound\n");
    let mut correct = 0;
    for (&i, r) in test.iter().zip(&rows) {
        correct += usize::from(r.label == data.labels[i]);
        // Neighbors are reported by dataset row, centroids by cluster id.
        let argmin = if centroid { r.argmin } else { train[r.argmin] };
        let _ = writeln!(
            out,
            "{i},{},{},{argmin},{},{}",
            data.label_names[r.label],
            data.label_names[data.labels[i]],
            r.queries,
            r.bound.map_or(String::new(), fmt_g)
        );
    }
    let _ = writeln!(out, "# accuracy={}", fmt_g(correct as f64 / test.len() as f64));
    let _ = writeln!(out, "# seed={seed}");
    emit(&a.out, "classify.csv", &out)
}

fn sweep_method(m: SweepMethodArg) -> SweepMethod {
    match m {
        SweepMethodArg::Nn => SweepMethod::Nn,
        SweepMethodArg::Centroid => SweepMethod::Centroid,
    }
}

fn noise(a: NoiseArgs) -> Result<(), CliError> {
    let seed = require_seed(a.seed)?;
    let data = load(&a.data, seed)?;
    let grid = if a.grid.is_empty() { default_noise_grid() } else { a.grid.clone() };
    let report = sweep_noise(
        seed,
        &data,
        sweep_method(a.method),
        &grid,
        a.trials,
        a.train_fraction,
        a.squared_noise,
    )?;
    emit(&a.out, "sweep_noise.csv", &render_report(&report))
}

fn trainsize(a: TrainsizeArgs) -> Result<(), CliError> {
    let seed = require_seed(a.seed)?;
    let data = load(&a.data, seed)?;
    let fractions = if a.fractions.is_empty() {
        (1..10).map(|i| i as f64 / 10.0).collect()
    } else {
        a.fractions.clone()
    };
    let mut noise = NoiseModel::new(a.epsilon)?;
    noise.squared = a.squared_noise;
    let report = sweep_trainsize(seed, &data, sweep_method(a.method), &fractions, a.trials, noise)?;
    emit(&a.out, "sweep_trainsize.csv", &render_report(&report))
}

fn gap(a: GapArgs) -> Result<(), CliError> {
    let seed = require_seed(a.seed)?;
    let report = distance_gap_study(seed, &a.n, a.m, a.trials)?;
    emit(&a.out, "sweep_gap.csv", &render_report(&report))
}

fn cost(a: CostRegionArgs) -> Result<(), CliError> {
    if !(a.n_min >= 1.0 && a.n_max > a.n_min && a.points >= 2) {
        return Err(usage("need 1 <= --n-min < --n-max and at least two points"));
    }
    let ns = log_grid(a.n_min, a.n_max, a.points);
    let e = cost_region(&ns, Bound::Euclidean)?;
    let i = cost_region(&ns, Bound::InnerProduct)?;
    let cell = |m: Option<f64>| m.map_or("unbounded".to_string(), fmt_g);
    let mut out = String::from("n,m_star_euclidean,m_star_inner_product\n");
    for (pe, pi) in e.points.iter().zip(&i.points) {
        let _ = writeln!(out, "{},{},{}", fmt_g(pe.0), cell(pe.1), cell(pi.1));
    }
    let _ = writeln!(out, "# euclidean_slope={}", fmt_g(e.exponent));
    let _ = writeln!(out, "# euclidean_prefactor={}", fmt_g(e.prefactor));
    let _ = writeln!(out, "# inner_product_slope={}", fmt_g(i.exponent));
    let _ = writeln!(out, "# inner_product_prefactor={}", fmt_g(i.prefactor));
    emit(&a.out, "sweep_cost_region.csv", &out)
}

fn bounds(a: BoundsArgs) -> Result<(), CliError> {
    let mut out = String::from("m,k,d,r_max,epsilon,delta0,inner_product,euclidean,kmeans\n");
    for &m in &a.m {
        for &k in &a.k {
            for &d in &a.d {
                for &epsilon in &a.epsilon {
                    let p = BoundParams { m, k, d, r_max: a.r_max, epsilon, delta0: a.delta0 };
                    let ip = theorem_bound(Bound::InnerProduct, &p)?;
                    let eu = theorem_bound(Bound::Euclidean, &p)?;
                    let km = theorem_bound(Bound::KMeans, &p)?;
                    let _ = writeln!(
                        out,
                        "{m},{k},{d},{},{},{},{},{},{}",
                        fmt_g(a.r_max),
                        fmt_g(epsilon),
                        fmt_g(a.delta0),
                        fmt_g(ip),
                        fmt_g(eu),
                        fmt_g(km)
                    );
                }
            }
        }
    }
    emit(&a.out, "bounds.csv", &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_ties_go_low() {
        assert_eq!(most_common_lowest([2, 1, 2, 1].into_iter()), 1);
        assert_eq!(most_common_lowest([3, 3, 0].into_iter()), 3);
    }

    #[test]
    fn mc_sample_count_scales_inverse_square() {
        let u = SparseVector::from_dense_real(&[0.6, 0.8], 0.0).unwrap();
        let a = mc_samples(&u, &u, 0.1);
        let b = mc_samples(&u, &u, 0.05);
        assert!((b as f64 / a as f64 - 4.0).abs() < 0.01);
    }
}
