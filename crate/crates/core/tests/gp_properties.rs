use gnm::calibrate::{fit_surrogate, ResponseEvaluator};
use gnm::dataset::{sd1_truth, Benchmark};
use gnm::gp::{gp_fit, kernel_matrix_for, GpConfig, GpHyper, HyperSource, LmlObjective};
use gnm::rng::Stream;
use nalgebra::{DMatrix, DVector};

fn random_data(rng: &mut Stream, n: usize, dim: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.uniform(-2.0, 2.0)).collect()).collect();
    let ys = xs.iter().map(|x| x.iter().map(|v| v.sin()).sum::<f64>() + 0.1 * rng.uniform(-1.0, 1.0)).collect();
    (xs, ys)
}

#[test]
fn lml_gradient_matches_central_differences() {
    let mut rng = Stream::new(2024);
    for case in 0..20 {
        let dim = 1 + case % 2;
        let learn_noise = case % 3 != 0;
        let (xs, ys) = random_data(&mut rng, 10, dim);
        let obj = LmlObjective::new(&xs, &ys, learn_noise, 1e-6).unwrap();
        let p: Vec<f64> = (0..obj.n_params()).map(|_| rng.uniform(-1.0, 0.5)).collect();
        let (_, grad) = obj.value_and_gradient(&p).unwrap();
        // Richardson-extrapolated central differences: small steps drown in
        // round-off when the covariance is poorly conditioned.
        let central = |k: usize, h: f64| {
            let (mut a, mut b) = (p.clone(), p.clone());
            a[k] += h;
            b[k] -= h;
            (obj.value(&a).unwrap() - obj.value(&b).unwrap()) / (2.0 * h)
        };
        let fd: Vec<f64> = (0..p.len())
            .map(|k| (4.0 * central(k, 5e-4) - central(k, 1e-3)) / 3.0)
            .collect();
        let norm = fd.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (k, (g, f)) in grad.iter().zip(&fd).enumerate() {
            let rel = (g - f).abs() / f.abs().max(g.abs()).max(1e-3 * norm);
            assert!(rel <= 1e-4, "case {case} param {k}: analytic {g}, numeric {f}");
        }
    }
}

#[test]
fn permuting_training_points_leaves_predictions_unchanged() {
    let mut rng = Stream::new(7);
    let (xs, ys) = random_data(&mut rng, 15, 2);
    let cfg = GpConfig::anchors().with_hyper(HyperSource::Fixed(GpHyper {
        signal_variance: 1.3,
        length_scales: vec![0.8, 1.1],
        noise_variance: 1e-3,
    }));
    let a = gp_fit(&xs, &ys, &cfg).unwrap();
    let mut order: Vec<usize> = (0..xs.len()).collect();
    rng.shuffle(&mut order);
    let xs2: Vec<Vec<f64>> = order.iter().map(|&i| xs[i].clone()).collect();
    let ys2: Vec<f64> = order.iter().map(|&i| ys[i]).collect();
    let b = gp_fit(&xs2, &ys2, &cfg).unwrap();
    for _ in 0..50 {
        let q = [rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5)];
        let (ma, va) = a.predict(&q);
        let (mb, vb) = b.predict(&q);
        assert!((ma - mb).abs() <= 1e-10 && (va - vb).abs() <= 1e-10);
    }
}

#[test]
fn covariance_is_positive_semidefinite() {
    let mut rng = Stream::new(99);
    for _ in 0..50 {
        let n = 2 + rng.index(19);
        let dim = 1 + rng.index(2);
        let (xs, _) = random_data(&mut rng, n, dim);
        let h = GpHyper {
            signal_variance: rng.uniform(0.01, 10.0),
            length_scales: (0..dim).map(|_| rng.uniform(0.05, 5.0)).collect(),
            noise_variance: rng.uniform(0.0, 0.1),
        };
        let mut k = kernel_matrix_for(&xs, &h).unwrap();
        for i in 0..n {
            k[(i, i)] += h.noise_variance;
        }
        assert!(k.symmetric_eigenvalues().min() >= -1e-8);
    }
}

#[test]
fn posterior_mean_interpolates_at_the_noise_floor() {
    let mut rng = Stream::new(5);
    let xs: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64]).collect();
    let ys: Vec<f64> = (0..12).map(|_| rng.uniform(-1.0, 1.0)).collect();
    // Length-scale equal to the grid spacing in standardized units keeps K
    // well conditioned.
    let spacing = 1.0 / (143.0f64 / 12.0).sqrt();
    let cfg = GpConfig::surrogate().with_hyper(HyperSource::Fixed(GpHyper {
        signal_variance: 1.0,
        length_scales: vec![spacing],
        noise_variance: 0.0,
    }));
    let gp = gp_fit(&xs, &ys, &cfg).unwrap();
    assert_eq!(gp.hyper().noise_variance, gnm::gp::NOISE_FLOOR);
    for (x, y) in xs.iter().zip(&ys) {
        assert!((gp.predict_mean(x) - y).abs() <= 1e-4);
    }
    let cho = gp.factor();
    let rebuilt = &cho * cho.transpose();
    let k = gp.training_covariance();
    assert!((rebuilt - &k).norm() <= 1e-8 * k.norm());
}

/// Posterior mean by an LU solve in the same standardized units.
fn dense_oracle(xs: &[f64], ys: &[f64], h: &GpHyper, q: f64) -> f64 {
    let n = xs.len() as f64;
    let stat = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / n;
        let sd = (v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / n).sqrt();
        (m, sd)
    };
    let (mx, sx) = stat(xs);
    let (my, sy) = stat(ys);
    let k = |a: f64, b: f64| h.signal_variance * (-0.5 * ((a - b) / sx / h.length_scales[0]).powi(2)).exp();
    let kmat = DMatrix::from_fn(xs.len(), xs.len(), |i, j| {
        k(xs[i], xs[j]) + if i == j { h.noise_variance } else { 0.0 }
    });
    let y = DVector::from_iterator(ys.len(), ys.iter().map(|v| (v - my) / sy));
    let alpha = kmat.lu().solve(&y).unwrap();
    let kq = DVector::from_iterator(xs.len(), xs.iter().map(|&x| k(x, q)));
    let _ = mx;
    kq.dot(&alpha) * sy + my
}

#[test]
fn line_fit_matches_a_dense_solve() {
    let xs: Vec<f64> = (0..9).map(|i| i as f64 * 0.5).collect();
    let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
    let inputs: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    let gp = gp_fit(&inputs, &ys, &GpConfig::anchors()).unwrap();
    for k in 0..=40 {
        let q = k as f64 * 0.1;
        let mean = gp.predict_mean(&[q]);
        let o = dense_oracle(&xs, &ys, gp.hyper(), q);
        assert!((mean - o).abs() <= 1e-7 * o.abs().max(1.0), "{mean} vs {o}");
        assert!((mean - 2.0 * q).abs() <= 1e-2, "at {q}: {mean}");
    }
}

#[test]
fn optimized_likelihood_dominates_the_heuristic() {
    let mut rng = Stream::new(31);
    for case in 0..8 {
        let (xs, ys) = random_data(&mut rng, 12 + case, 1 + case % 2);
        let heur = gp_fit(&xs, &ys, &GpConfig::anchors().with_hyper(HyperSource::Heuristic)).unwrap();
        let opt = gp_fit(&xs, &ys, &GpConfig::anchors()).unwrap();
        assert!(opt.log_marginal_likelihood() >= heur.log_marginal_likelihood() - 1e-9);
    }
}

#[test]
fn surrogate_interpolates_and_generalizes_on_sd1() {
    let (_, model) = Benchmark::Sd1.generate(15, 450, 1).unwrap();
    let ResponseEvaluator::Surrogate(gp) = fit_surrogate(&model, &GpConfig::surrogate()).unwrap() else {
        panic!("expected a surrogate");
    };
    let ys: Vec<f64> = model.points().iter().map(|p| p.y).collect();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let sd = (ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / ys.len() as f64).sqrt();
    let worst = model
        .points()
        .iter()
        .map(|p| (gp.predict_mean(&[p.x, p.theta]) - p.y).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-3 * sd, "max residual {worst}, sd {sd}");

    let truth = sd1_truth();
    let (xr, tr) = (Benchmark::Sd1.x_range(), Benchmark::Sd1.theta_range());
    let mut rng = Stream::new(8);
    let close = (0..200)
        .filter(|_| {
            let (x, t) = (rng.uniform(xr.lo, xr.hi), rng.uniform(tr.lo, tr.hi));
            (gp.predict_mean(&[x, t]) - truth.model_response(x, t).unwrap()).abs() <= 0.1
        })
        .count();
    assert!(close >= 180, "{close} of 200 probes within 0.1");
}

#[test]
fn far_queries_revert_to_the_target_mean() {
    let xs: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
    let ys: Vec<f64> = (0..8).map(|i| (i as f64).cos()).collect();
    let gp = gp_fit(&xs, &ys, &GpConfig::anchors()).unwrap();
    let mean = ys.iter().sum::<f64>() / 8.0;
    assert!((gp.predict_mean(&[1e4]) - mean).abs() <= 1e-6);
    let (_, v_train) = gp.predict(&[3.0]);
    let (_, v_far) = gp.predict(&[1e4]);
    assert!(v_train <= v_far);
}
