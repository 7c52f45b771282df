//! Maximum-likelihood logistic regression via iteratively reweighted least
//! squares, with optional per-agent fixed effects.
//!
//! Fixed effects are estimated as explicit agent dummies but never
//! materialized: each IRLS step absorbs them through the Schur complement of
//! the dummy block, which is exact and keeps the solve at feature
//! dimensionality. Agents whose outcome never varies are dropped first;
//! their dummies are not identifiable.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::Serialize;

use crate::domain::TraitFactor;
use crate::error::Error;
use crate::world::DecisionRow;

/// Coefficient magnitude past which the likelihood is considered separated.
const SEPARATION_BOUND: f64 = 30.0;
/// Ridge penalty applied when refitting a separated problem.
const SEPARATION_RIDGE: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct LogitResult {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    /// From the observed information at the optimum (penalized information
    /// for ridge-stabilized separated fits).
    pub std_errors: Vec<f64>,
    pub log_likelihood: f64,
    pub null_log_likelihood: f64,
    /// McFadden: `1 - logL / logL_null`.
    pub pseudo_r2: f64,
    /// `k ln(n) - 2 logL` with `k = n_parameters`.
    pub bic: f64,
    pub n_observations: usize,
    /// Estimated parameters, absorbed agent dummies included.
    pub n_parameters: usize,
    /// Agents removed because their outcome never varied (fixed effects only).
    pub n_groups_dropped: usize,
    pub converged: bool,
    pub separated: bool,
    /// Absorbed per-group intercepts, in group order (fixed effects only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_effects: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct LogitOptions {
    pub fixed_effects: bool,
    /// Prepend a common intercept (ignored under fixed effects, which absorb
    /// all intercepts).
    pub include_intercept: bool,
    pub max_iterations: usize,
    /// Convergence: max absolute coefficient step below this.
    pub tolerance: f64,
}

impl Default for LogitOptions {
    fn default() -> Self {
        LogitOptions {
            fixed_effects: false,
            include_intercept: true,
            max_iterations: 50,
            tolerance: 1e-8,
        }
    }
}

/// A design matrix: `rows[i]` holds the feature values for observation `i`.
#[derive(Debug, Clone)]
pub struct LogitProblem {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub outcomes: Vec<bool>,
    /// Group (agent) id per observation; required for fixed effects.
    pub groups: Option<Vec<u32>>,
}

pub fn logit_fit(problem: &LogitProblem, options: &LogitOptions) -> Result<LogitResult, Error> {
    validate(problem, options)?;
    if options.fixed_effects {
        fit_fixed_effects(problem, options)
    } else {
        fit_pooled(problem, options)
    }
}

fn validate(problem: &LogitProblem, options: &LogitOptions) -> Result<(), Error> {
    let n = problem.rows.len();
    if n == 0 {
        return Err(Error::analytics("logit: no observations"));
    }
    if problem.outcomes.len() != n {
        return Err(Error::analytics("logit: outcome length mismatch"));
    }
    let p = problem.feature_names.len();
    for row in &problem.rows {
        if row.len() != p {
            return Err(Error::analytics("logit: ragged design matrix"));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::analytics("logit: non-finite feature value"));
        }
    }
    let ones = problem.outcomes.iter().filter(|&&y| y).count();
    if ones == 0 || ones == n {
        return Err(Error::analytics(
            "logit: outcome has no variation (all zeros or all ones); \
             the likelihood is degenerate",
        ));
    }
    if options.fixed_effects && problem.groups.is_none() {
        return Err(Error::analytics(
            "logit: fixed effects requested but no group ids supplied",
        ));
    }
    Ok(())
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn log_likelihood(y: &[f64], p: &[f64]) -> f64 {
    y.iter()
        .zip(p)
        .map(|(&yi, &pi)| {
            let pi = pi.clamp(1e-12, 1.0 - 1e-12);
            yi * pi.ln() + (1.0 - yi) * (1.0 - pi).ln()
        })
        .sum()
}

fn null_log_likelihood(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let mean = mean.clamp(1e-12, 1.0 - 1e-12);
    n * (mean * mean.ln() + (1.0 - mean) * (1.0 - mean).ln())
}

fn fit_pooled(problem: &LogitProblem, options: &LogitOptions) -> Result<LogitResult, Error> {
    let n = problem.rows.len();
    let mut names = Vec::new();
    if options.include_intercept {
        names.push("(intercept)".to_owned());
    }
    names.extend(problem.feature_names.iter().cloned());
    let p = names.len();

    let x = DMatrix::from_fn(n, p, |i, j| {
        if options.include_intercept {
            if j == 0 {
                1.0
            } else {
                problem.rows[i][j - 1]
            }
        } else {
            problem.rows[i][j]
        }
    });
    let y: Vec<f64> = problem.outcomes.iter().map(|&b| f64::from(u8::from(b))).collect();

    let mut state = irls_dense(&x, &y, options, 0.0)?;
    let mut separated = false;
    if state.diverged {
        separated = true;
        state = irls_dense(&x, &y, options, SEPARATION_RIDGE)?;
    }

    let log_l = log_likelihood(&y, &state.fitted);
    let null_l = null_log_likelihood(&y);
    let k = p;
    Ok(LogitResult {
        names,
        coefficients: state.beta.iter().copied().collect(),
        std_errors: state.std_errors,
        log_likelihood: log_l,
        null_log_likelihood: null_l,
        pseudo_r2: 1.0 - log_l / null_l,
        bic: k as f64 * (n as f64).ln() - 2.0 * log_l,
        n_observations: n,
        n_parameters: k,
        n_groups_dropped: 0,
        converged: state.converged && !separated,
        separated,
        group_effects: None,
    })
}

struct IrlsState {
    beta: DVector<f64>,
    fitted: Vec<f64>,
    std_errors: Vec<f64>,
    converged: bool,
    diverged: bool,
}

/// Plain IRLS on a dense design matrix.
fn irls_dense(
    x: &DMatrix<f64>,
    y: &[f64],
    options: &LogitOptions,
    ridge: f64,
) -> Result<IrlsState, Error> {
    let (n, p) = x.shape();
    let mut beta = DVector::zeros(p);
    let mut converged = false;
    let mut diverged = false;
    let mut information = DMatrix::zeros(p, p);

    for _ in 0..options.max_iterations {
        let eta = x * &beta;
        let mut xtwx = DMatrix::zeros(p, p);
        let mut xtwz = DVector::zeros(p);
        for i in 0..n {
            let pi = logistic(eta[i]);
            let w = (pi * (1.0 - pi)).max(1e-10);
            let z = eta[i] + (y[i] - pi) / w;
            let xi = x.row(i);
            for a in 0..p {
                xtwz[a] += w * xi[a] * z;
                for b in a..p {
                    xtwx[(a, b)] += w * xi[a] * xi[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                xtwx[(a, b)] = xtwx[(b, a)];
            }
            xtwx[(a, a)] += ridge;
        }
        information = xtwx.clone();
        let chol = Cholesky::new(xtwx).ok_or_else(|| {
            Error::analytics("logit: information matrix is singular (collinear features?)")
        })?;
        let new_beta = chol.solve(&xtwz);
        let step = (&new_beta - &beta).amax();
        beta = new_beta;
        if beta.iter().any(|b| !b.is_finite() || b.abs() > SEPARATION_BOUND) {
            diverged = true;
            break;
        }
        if step < options.tolerance {
            converged = true;
            break;
        }
    }

    let fitted: Vec<f64> = (x * &beta).iter().map(|&e| logistic(e)).collect();
    let std_errors = if diverged {
        vec![f64::NAN; p]
    } else {
        let inv = Cholesky::new(information)
            .ok_or_else(|| Error::analytics("logit: information matrix is singular"))?
            .inverse();
        (0..p).map(|j| inv[(j, j)].max(0.0).sqrt()).collect()
    };
    Ok(IrlsState {
        beta,
        fitted,
        std_errors,
        converged,
        diverged,
    })
}

/// IRLS with the agent-dummy block absorbed per iteration.
fn fit_fixed_effects(problem: &LogitProblem, options: &LogitOptions) -> Result<LogitResult, Error> {
    let groups_raw = problem.groups.as_ref().expect("validated");

    // Drop groups with constant outcomes, then densely re-index the rest.
    let mut first_outcome: std::collections::BTreeMap<u32, (bool, bool)> =
        std::collections::BTreeMap::new();
    for (i, &g) in groups_raw.iter().enumerate() {
        let e = first_outcome
            .entry(g)
            .or_insert((problem.outcomes[i], false));
        if problem.outcomes[i] != e.0 {
            e.1 = true;
        }
    }
    let kept: std::collections::BTreeMap<u32, usize> = first_outcome
        .iter()
        .filter(|(_, &(_, varies))| varies)
        .enumerate()
        .map(|(idx, (&g, _))| (g, idx))
        .collect();
    let n_groups_dropped = first_outcome.len() - kept.len();
    if kept.is_empty() {
        return Err(Error::analytics(
            "logit: every agent has a constant outcome; no fixed-effect dummy \
             is identifiable",
        ));
    }

    let mut rows: Vec<&[f64]> = Vec::new();
    let mut y: Vec<f64> = Vec::new();
    let mut g_of: Vec<usize> = Vec::new();
    for (i, &g) in groups_raw.iter().enumerate() {
        if let Some(&idx) = kept.get(&g) {
            rows.push(&problem.rows[i]);
            y.push(f64::from(u8::from(problem.outcomes[i])));
            g_of.push(idx);
        }
    }
    let n = rows.len();
    let pf = problem.feature_names.len();
    let n_groups = kept.len();

    let run = |ridge: f64| -> Result<(DVector<f64>, Vec<f64>, Vec<f64>, DMatrix<f64>, bool, bool), Error> {
        let mut beta: DVector<f64> = DVector::zeros(pf);
        let mut alpha = vec![0.0f64; n_groups];
        let mut converged = false;
        let mut diverged = false;
        let mut schur: DMatrix<f64> = DMatrix::zeros(pf, pf);

        for _ in 0..options.max_iterations {
            let mut s_g = vec![ridge; n_groups]; // sum of weights (+ ridge)
            let mut u = vec![0.0f64; n_groups];
            let mut c: DMatrix<f64> = DMatrix::zeros(pf, n_groups);
            let mut a_mat: DMatrix<f64> = DMatrix::zeros(pf, pf);
            let mut r_vec: DVector<f64> = DVector::zeros(pf);

            for i in 0..n {
                let gi = g_of[i];
                let xi = rows[i];
                let mut eta = alpha[gi];
                for j in 0..pf {
                    eta += xi[j] * beta[j];
                }
                let pi = logistic(eta);
                let w = (pi * (1.0 - pi)).max(1e-10);
                let z = eta + (y[i] - pi) / w;
                s_g[gi] += w;
                u[gi] += w * z;
                for j in 0..pf {
                    c[(j, gi)] += w * xi[j];
                    r_vec[j] += w * xi[j] * z;
                    for k in j..pf {
                        a_mat[(j, k)] += w * xi[j] * xi[k];
                    }
                }
            }
            for j in 0..pf {
                for k in 0..j {
                    a_mat[(j, k)] = a_mat[(k, j)];
                }
                a_mat[(j, j)] += ridge;
            }
            // Schur complement: A - C diag(S)^-1 C^T, r - C diag(S)^-1 u
            for gi in 0..n_groups {
                let inv_s = 1.0 / s_g[gi];
                for j in 0..pf {
                    let cj = c[(j, gi)];
                    r_vec[j] -= cj * u[gi] * inv_s;
                    for k in j..pf {
                        a_mat[(j, k)] -= cj * c[(k, gi)] * inv_s;
                    }
                }
            }
            for j in 0..pf {
                for k in 0..j {
                    a_mat[(j, k)] = a_mat[(k, j)];
                }
            }
            schur = a_mat.clone();
            let chol = Cholesky::new(a_mat).ok_or_else(|| {
                Error::analytics(
                    "logit: fixed-effects information matrix is singular \
                     (collinear features?)",
                )
            })?;
            let new_beta = chol.solve(&r_vec);
            let mut step: f64 = (&new_beta - &beta).amax();
            for gi in 0..n_groups {
                let mut dot = 0.0;
                for j in 0..pf {
                    dot += c[(j, gi)] * new_beta[j];
                }
                let new_alpha = (u[gi] - dot) / s_g[gi];
                step = step.max((new_alpha - alpha[gi]).abs());
                alpha[gi] = new_alpha;
            }
            beta = new_beta;
            let blown = beta
                .iter()
                .chain(alpha.iter())
                .any(|v| !v.is_finite() || v.abs() > SEPARATION_BOUND);
            if blown {
                diverged = true;
                break;
            }
            if step < options.tolerance {
                converged = true;
                break;
            }
        }

        let fitted: Vec<f64> = (0..n)
            .map(|i| {
                let mut eta = alpha[g_of[i]];
                for j in 0..pf {
                    eta += rows[i][j] * beta[j];
                }
                logistic(eta)
            })
            .collect();
        Ok((beta, alpha, fitted, schur, converged, diverged))
    };

    let (mut beta, mut alpha, mut fitted, mut schur, mut converged, diverged) = run(0.0)?;
    let mut separated = false;
    if diverged {
        separated = true;
        let again = run(SEPARATION_RIDGE)?;
        beta = again.0;
        alpha = again.1;
        fitted = again.2;
        schur = again.3;
        converged = again.4;
    }

    let std_errors: Vec<f64> = {
        let inv = Cholesky::new(schur)
            .ok_or_else(|| Error::analytics("logit: information matrix is singular"))?
            .inverse();
        (0..pf).map(|j| inv[(j, j)].max(0.0).sqrt()).collect()
    };

    let log_l = log_likelihood(&y, &fitted);
    let null_l = null_log_likelihood(&y);
    let k = pf + n_groups;
    Ok(LogitResult {
        names: problem.feature_names.clone(),
        coefficients: beta.iter().copied().collect(),
        std_errors,
        log_likelihood: log_l,
        null_log_likelihood: null_l,
        pseudo_r2: 1.0 - log_l / null_l,
        bic: k as f64 * (n as f64).ln() - 2.0 * log_l,
        n_observations: n,
        n_parameters: k,
        n_groups_dropped,
        converged: converged && !separated,
        separated,
        group_effects: Some(alpha),
    })
}

/// Features derivable from a decision-log row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogitFeature {
    LightCough,
    FeverCough,
    Prevalence,
    PrevalenceSq,
    Trait(TraitFactor),
    Age,
    /// 1 for male, 0 for female.
    GenderMale,
}

impl LogitFeature {
    pub fn name(&self) -> String {
        match self {
            LogitFeature::LightCough => "light_cough".to_owned(),
            LogitFeature::FeverCough => "fever_cough".to_owned(),
            LogitFeature::Prevalence => "prevalence_pct".to_owned(),
            LogitFeature::PrevalenceSq => "prevalence_pct_sq".to_owned(),
            LogitFeature::Trait(f) => f.as_str().to_owned(),
            LogitFeature::Age => "age".to_owned(),
            LogitFeature::GenderMale => "gender_male".to_owned(),
        }
    }

    pub fn value(&self, row: &DecisionRow) -> f64 {
        match self {
            LogitFeature::LightCough => {
                f64::from(u8::from(matches!(row.day_infected, Some(3) | Some(6))))
            }
            LogitFeature::FeverCough => {
                f64::from(u8::from(matches!(row.day_infected, Some(4) | Some(5))))
            }
            LogitFeature::Prevalence => row.prevalence_pct.unwrap_or(0.0),
            LogitFeature::PrevalenceSq => {
                let p = row.prevalence_pct.unwrap_or(0.0);
                p * p
            }
            LogitFeature::Trait(f) => f64::from(match f {
                TraitFactor::Surgency => row.surgency,
                TraitFactor::Agreeableness => row.agreeableness,
                TraitFactor::Conscientiousness => row.conscientiousness,
                TraitFactor::EmotionalStability => row.emotional_stability,
                TraitFactor::Intellect => row.intellect,
            }),
            LogitFeature::Age => f64::from(row.age),
            LogitFeature::GenderMale => {
                f64::from(u8::from(row.gender == crate::domain::Gender::Male))
            }
        }
    }
}

/// Parse a comma-separated feature spec, e.g. `"lightcough,fever,prev,prev2"`.
/// The token `fe` switches on agent fixed effects; `traits` expands to the
/// five polarity flags.
pub fn parse_feature_spec(spec: &str) -> Result<(Vec<LogitFeature>, bool), Error> {
    let mut features = Vec::new();
    let mut fixed_effects = false;
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token.to_ascii_lowercase().as_str() {
            "lightcough" | "light_cough" => features.push(LogitFeature::LightCough),
            "fever" | "fevercough" | "fever_cough" => features.push(LogitFeature::FeverCough),
            "prev" | "prevalence" => features.push(LogitFeature::Prevalence),
            "prev2" | "prevalence_sq" => features.push(LogitFeature::PrevalenceSq),
            "surgency" => features.push(LogitFeature::Trait(TraitFactor::Surgency)),
            "agreeableness" => features.push(LogitFeature::Trait(TraitFactor::Agreeableness)),
            "conscientiousness" => {
                features.push(LogitFeature::Trait(TraitFactor::Conscientiousness))
            }
            "emotional_stability" => {
                features.push(LogitFeature::Trait(TraitFactor::EmotionalStability))
            }
            "intellect" => features.push(LogitFeature::Trait(TraitFactor::Intellect)),
            "traits" => {
                for f in TraitFactor::ALL {
                    features.push(LogitFeature::Trait(f));
                }
            }
            "age" => features.push(LogitFeature::Age),
            "gender" => features.push(LogitFeature::GenderMale),
            "fe" | "fixed_effects" => fixed_effects = true,
            other => {
                return Err(Error::config(format!(
                    "unknown logit feature '{other}'; expected lightcough, fever, prev, \
                     prev2, traits, surgency, agreeableness, conscientiousness, \
                     emotional_stability, intellect, age, gender, fe"
                )))
            }
        }
    }
    if features.is_empty() {
        return Err(Error::config("logit feature spec selected no features"));
    }
    Ok((features, fixed_effects))
}

/// Build the regression problem from decision-log rows.
pub fn design_from_rows(rows: &[DecisionRow], features: &[LogitFeature]) -> LogitProblem {
    LogitProblem {
        feature_names: features.iter().map(LogitFeature::name).collect(),
        rows: rows
            .iter()
            .map(|row| features.iter().map(|f| f.value(row)).collect())
            .collect(),
        outcomes: rows.iter().map(|r| r.stay_home).collect(),
        groups: Some(rows.iter().map(|r| r.agent_id).collect()),
    }
}
