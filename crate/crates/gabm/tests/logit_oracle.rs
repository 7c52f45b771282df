//! Regression-engine validation against an independent Newton-Raphson
//! oracle and synthetic Bernoulli generators with known coefficients.

use gabm::analytics::{logit_fit, LogitOptions, LogitProblem};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Independent oracle: straight Newton-Raphson on the log-likelihood with a
// hand-rolled Gaussian-elimination solver. Shares no code with the IRLS path.
// ---------------------------------------------------------------------------

fn solve_gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col].abs() > 1e-14, "singular oracle system");
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in (row + 1)..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x
}

/// Newton-Raphson MLE for logistic regression; `x` rows already include any
/// intercept column.
fn newton_logit(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let p = x[0].len();
    let mut beta = vec![0.0; p];
    for _ in 0..200 {
        let mut grad = vec![0.0; p];
        let mut hess = vec![vec![0.0; p]; p];
        for i in 0..n {
            let eta: f64 = (0..p).map(|j| x[i][j] * beta[j]).sum();
            let mu = 1.0 / (1.0 + (-eta).exp());
            let w = mu * (1.0 - mu);
            for j in 0..p {
                grad[j] += (y[i] - mu) * x[i][j];
                for k in 0..p {
                    hess[j][k] += w * x[i][j] * x[i][k];
                }
            }
        }
        let step = solve_gauss(hess, grad);
        let mut max_step = 0.0f64;
        for j in 0..p {
            beta[j] += step[j];
            max_step = max_step.max(step[j].abs());
        }
        if max_step < 1e-12 {
            break;
        }
    }
    beta
}

fn sig_figs_equal(a: f64, b: f64, figs: u32) -> bool {
    if a == b {
        return true;
    }
    let magnitude = a.abs().max(b.abs());
    if magnitude < 1e-10 {
        return true;
    }
    (a - b).abs() / magnitude < 0.5 * 10f64.powi(-(figs as i32 - 1))
}

// ---------------------------------------------------------------------------

#[test]
fn irls_matches_the_newton_oracle_to_four_significant_figures() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    for trial in 0..5 {
        let n = 120 + trial * 20; // <= 200 rows
        let truth = [-0.4, 1.2, -0.8];
        let mut rows = Vec::with_capacity(n);
        let mut outcomes = Vec::with_capacity(n);
        for _ in 0..n {
            let x1: f64 = rng.gen_range(-1.5..1.5);
            let x2: f64 = rng.gen_range(-1.5..1.5);
            let eta = truth[0] + truth[1] * x1 + truth[2] * x2;
            let p = 1.0 / (1.0 + (-eta).exp());
            outcomes.push(rng.gen::<f64>() < p);
            rows.push(vec![x1, x2]);
        }
        let problem = LogitProblem {
            feature_names: vec!["x1".into(), "x2".into()],
            rows: rows.clone(),
            outcomes: outcomes.clone(),
            groups: None,
        };
        let fit = logit_fit(&problem, &LogitOptions::default()).unwrap();
        assert!(fit.converged, "trial {trial} did not converge");

        let oracle_x: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                let mut row = vec![1.0];
                row.extend_from_slice(r);
                row
            })
            .collect();
        let oracle_y: Vec<f64> = outcomes.iter().map(|&b| f64::from(u8::from(b))).collect();
        let oracle_beta = newton_logit(&oracle_x, &oracle_y);

        for (j, (got, want)) in fit.coefficients.iter().zip(&oracle_beta).enumerate() {
            assert!(
                sig_figs_equal(*got, *want, 4),
                "trial {trial} coefficient {j}: IRLS {got} vs Newton {want}"
            );
        }
    }
}

#[test]
fn synthetic_twenty_thousand_rows_recover_known_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let truth = [2.0, -1.0, 0.5];
    let intercept = -0.3;
    let n = 20_000;
    let mut rows = Vec::with_capacity(n);
    let mut outcomes = Vec::with_capacity(n);
    for _ in 0..n {
        let x: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let eta = intercept + truth[0] * x[0] + truth[1] * x[1] + truth[2] * x[2];
        let p = 1.0 / (1.0 + (-eta).exp());
        outcomes.push(rng.gen::<f64>() < p);
        rows.push(x.to_vec());
    }
    let problem = LogitProblem {
        feature_names: vec!["a".into(), "b".into(), "c".into()],
        rows,
        outcomes,
        groups: None,
    };
    let fit = logit_fit(&problem, &LogitOptions::default()).unwrap();
    assert!(fit.converged);
    let expect = [intercept, truth[0], truth[1], truth[2]];
    for j in 0..4 {
        let delta = (fit.coefficients[j] - expect[j]).abs();
        assert!(
            delta <= 2.0 * fit.std_errors[j],
            "coefficient {} = {} strayed {delta} from {} (se {})",
            fit.names[j],
            fit.coefficients[j],
            expect[j],
            fit.std_errors[j]
        );
    }
}

#[test]
fn reported_bic_and_pseudo_r2_recompute_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 500;
    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    for _ in 0..n {
        let x: f64 = rng.gen_range(-2.0..2.0);
        let p = 1.0 / (1.0 + (-x).exp());
        outcomes.push(rng.gen::<f64>() < p);
        rows.push(vec![x]);
    }
    let problem = LogitProblem {
        feature_names: vec!["x".into()],
        rows,
        outcomes,
        groups: None,
    };
    let fit = logit_fit(&problem, &LogitOptions::default()).unwrap();
    let k = fit.n_parameters as f64;
    let n = fit.n_observations as f64;
    assert!((fit.bic - (k * n.ln() - 2.0 * fit.log_likelihood)).abs() < 1e-9);
    assert!((fit.pseudo_r2 - (1.0 - fit.log_likelihood / fit.null_log_likelihood)).abs() < 1e-12);
    assert!(fit.pseudo_r2 >= 0.0 && fit.pseudo_r2 < 1.0);
}

#[test]
fn constant_outcome_is_a_degenerate_error() {
    let problem = LogitProblem {
        feature_names: vec!["x".into()],
        rows: (0..50).map(|i| vec![f64::from(i)]).collect(),
        outcomes: vec![false; 50],
        groups: None,
    };
    let err = logit_fit(&problem, &LogitOptions::default()).unwrap_err();
    assert!(err.to_string().contains("no variation"), "{err}");
}

#[test]
fn perfect_separation_is_flagged_with_a_ridge_fallback() {
    // outcome = x > 0 exactly: the MLE diverges
    let rows: Vec<Vec<f64>> = (-25..25).map(|i| vec![f64::from(i) / 5.0]).collect();
    let outcomes: Vec<bool> = rows.iter().map(|r| r[0] > 0.0).collect();
    let problem = LogitProblem {
        feature_names: vec!["x".into()],
        rows,
        outcomes,
        groups: None,
    };
    let fit = logit_fit(&problem, &LogitOptions::default()).unwrap();
    assert!(fit.separated, "separation went undetected");
    assert!(!fit.converged);
    assert!(fit.coefficients.iter().all(|c| c.is_finite()));
    assert!(fit.coefficients[1] > 0.0, "sign must survive the fallback");
}

#[test]
fn fixed_effects_recover_feature_coefficients_and_drop_constant_agents() {
    let mut rng = ChaCha8Rng::seed_from_u64(2468);
    let n_agents = 150u32;
    let days = 80u32;
    let slope = 1.5;
    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    let mut groups = Vec::new();
    for agent in 0..n_agents {
        let alpha = rng.gen_range(-3.0..0.5);
        for _ in 0..days {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let p = 1.0 / (1.0 + (-(alpha + slope * x)).exp());
            rows.push(vec![x]);
            outcomes.push(rng.gen::<f64>() < p);
            groups.push(agent);
        }
    }
    let problem = LogitProblem {
        feature_names: vec!["x".into()],
        rows,
        outcomes,
        groups: Some(groups),
    };
    let options = LogitOptions {
        fixed_effects: true,
        ..LogitOptions::default()
    };
    let fit = logit_fit(&problem, &options).unwrap();
    assert!(fit.converged);
    let delta = (fit.coefficients[0] - slope).abs();
    assert!(
        delta <= 2.0 * fit.std_errors[0],
        "fixed-effects slope {} strayed {delta} (se {})",
        fit.coefficients[0],
        fit.std_errors[0]
    );
    // dropped agents (all-0 or all-1 outcomes) are excluded from n
    let expected_rows = (fit.n_parameters - 1) * days as usize; // groups + 1 feature
    assert_eq!(fit.n_observations, expected_rows);
    let kept_groups = fit.group_effects.as_ref().unwrap().len();
    assert_eq!(kept_groups + fit.n_groups_dropped, n_agents as usize);
}

// The absorbed-dummy path must agree with an explicit-dummy fit done through
// the pooled engine on a small instance.
#[test]
fn fixed_effects_match_explicit_dummies() {
    let mut rng = ChaCha8Rng::seed_from_u64(1357);
    let n_agents = 6usize;
    let days = 40usize;
    let slope = 0.9;
    let alphas: Vec<f64> = (0..n_agents).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    let mut groups = Vec::new();
    for (agent, alpha) in alphas.iter().enumerate() {
        for _ in 0..days {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let p = 1.0 / (1.0 + (-(alpha + slope * x)).exp());
            rows.push(vec![x]);
            outcomes.push(rng.gen::<f64>() < p);
            groups.push(agent as u32);
        }
    }

    let absorbed = logit_fit(
        &LogitProblem {
            feature_names: vec!["x".into()],
            rows: rows.clone(),
            outcomes: outcomes.clone(),
            groups: Some(groups.clone()),
        },
        &LogitOptions {
            fixed_effects: true,
            ..LogitOptions::default()
        },
    )
    .unwrap();

    // same model with dummies materialized as columns, no intercept
    let mut dummy_rows = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut r = vec![0.0; n_agents];
        r[groups[i] as usize] = 1.0;
        r.push(row[0]);
        dummy_rows.push(r);
    }
    let mut names: Vec<String> = (0..n_agents).map(|a| format!("agent{a}")).collect();
    names.push("x".into());
    let explicit = logit_fit(
        &LogitProblem {
            feature_names: names,
            rows: dummy_rows,
            outcomes,
            groups: None,
        },
        &LogitOptions {
            fixed_effects: false,
            include_intercept: false,
            ..LogitOptions::default()
        },
    )
    .unwrap();

    let absorbed_slope = absorbed.coefficients[0];
    let explicit_slope = explicit.coefficients[n_agents];
    assert!(
        sig_figs_equal(absorbed_slope, explicit_slope, 6),
        "absorbed {absorbed_slope} vs explicit {explicit_slope}"
    );
    assert!(
        (absorbed.log_likelihood - explicit.log_likelihood).abs() < 1e-6,
        "log-likelihoods differ"
    );
    for (a, e) in absorbed
        .group_effects
        .as_ref()
        .unwrap()
        .iter()
        .zip(&explicit.coefficients[..n_agents])
    {
        assert!(sig_figs_equal(*a, *e, 5), "dummy {a} vs {e}");
    }
}
