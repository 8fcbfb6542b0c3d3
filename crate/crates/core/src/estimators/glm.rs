//! Binary-outcome maximum likelihood (logit and probit) by Newton-Raphson.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::design::{DesignMatrix, DroppedGroup};
use super::EstimationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Link {
    Logit,
    Probit,
}

impl Link {
    pub fn as_str(self) -> &'static str {
        match self {
            Link::Logit => "logit",
            Link::Probit => "probit",
        }
    }

    pub fn parse(s: &str) -> Option<Link> {
        match s.trim().to_ascii_lowercase().as_str() {
            "logit" => Some(Link::Logit),
            "probit" => Some(Link::Probit),
            _ => None,
        }
    }

    /// P(y = 1) for linear index `eta`.
    pub fn inverse(self, eta: f64) -> f64 {
        match self {
            Link::Logit => {
                if eta >= 0.0 {
                    1.0 / (1.0 + (-eta).exp())
                } else {
                    let e = eta.exp();
                    e / (1.0 + e)
                }
            }
            Link::Probit => normal_cdf(eta),
        }
    }

    /// Log-likelihood contribution of one observation, and its first and
    /// (negated) second derivative with respect to the linear index.
    fn contribution(self, y: f64, eta: f64) -> (f64, f64, f64) {
        match self {
            Link::Logit => {
                let p = self.inverse(eta);
                // log(1 + e^eta) without overflow
                let softplus = eta.max(0.0) + (-eta.abs()).exp().ln_1p();
                (y * eta - softplus, y - p, p * (1.0 - p))
            }
            Link::Probit => {
                let q = 2.0 * y - 1.0;
                let r = q * eta;
                let log_cdf = log_normal_cdf(r);
                let mills = (log_normal_pdf(r) - log_cdf).exp();
                (log_cdf, q * mills, mills * (r + mills))
            }
        }
    }
}

fn log_normal_pdf(x: f64) -> f64 {
    -0.5 * x * x - 0.5 * (2.0 * PI).ln()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// ln Φ(x), with an asymptotic series far in the lower tail.
fn log_normal_cdf(x: f64) -> f64 {
    if x > -30.0 {
        normal_cdf(x).ln()
    } else {
        let x2 = x * x;
        log_normal_pdf(x) - (-x).ln() + (1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2)).ln()
    }
}

/// Log-likelihood at `beta`.
pub fn log_likelihood(link: Link, x: &DMatrix<f64>, y: &[f64], beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    eta.iter().zip(y).map(|(&e, &yi)| link.contribution(yi, e).0).sum()
}

/// Analytic score vector at `beta`.
pub fn score(link: Link, x: &DMatrix<f64>, y: &[f64], beta: &DVector<f64>) -> DVector<f64> {
    let eta = x * beta;
    let s = DVector::from_iterator(y.len(), eta.iter().zip(y).map(|(&e, &yi)| link.contribution(yi, e).1));
    x.tr_mul(&s)
}

/// Log-likelihood, score and observed information (negated Hessian).
fn derivatives(link: Link, x: &DMatrix<f64>, y: &[f64], beta: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
    let eta = x * beta;
    let n = y.len();
    let mut ll = 0.0;
    let mut s = DVector::zeros(n);
    let mut wx = x.clone();
    for i in 0..n {
        let (l, d1, w) = link.contribution(y[i], eta[i]);
        ll += l;
        s[i] = d1;
        wx.row_mut(i).scale_mut(w);
    }
    (ll, x.tr_mul(&s), x.tr_mul(&wx))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iter: usize,
    pub score_tol: f64,
    pub step_tol: f64,
    pub max_halvings: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iter: 100,
            score_tol: 1e-8,
            step_tol: 1e-10,
            max_halvings: 30,
        }
    }
}

/// A fitted binary-choice model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlmFit {
    pub link: Link,
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub log_likelihood: f64,
    pub n_used: usize,
    pub dropped: Vec<DroppedGroup>,
    pub converged: bool,
    pub iterations: usize,
}

impl GlmFit {
    fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coef(&self, name: &str) -> Option<f64> {
        self.position(name).map(|i| self.coefficients[i])
    }

    pub fn se(&self, name: &str) -> Option<f64> {
        self.position(name).map(|i| self.standard_errors[i])
    }

    pub fn t(&self, name: &str) -> Option<f64> {
        self.position(name).map(|i| self.t_stats[i])
    }

    /// Linear index for named covariate values. Unnamed columns are at zero
    /// (the reference category for dummies); the intercept is always added.
    pub fn linear_index(&self, covariates: &BTreeMap<String, f64>) -> Result<f64, EstimationError> {
        let mut eta = self.coef(super::design::INTERCEPT).unwrap_or(0.0);
        for (name, v) in covariates {
            let i = self
                .position(name)
                .ok_or_else(|| EstimationError::UnknownCovariate(name.clone()))?;
            eta += self.coefficients[i] * v;
        }
        Ok(eta)
    }

    pub fn predict_probability(&self, covariates: &BTreeMap<String, f64>) -> Result<f64, EstimationError> {
        Ok(self.link.inverse(self.linear_index(covariates)?))
    }
}

/// Columns that are linearly dependent on earlier ones (modified Gram-Schmidt).
fn dependent_columns(x: &DMatrix<f64>, names: &[String]) -> Vec<String> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut bad = Vec::new();
    for (j, name) in names.iter().enumerate() {
        let mut v: DVector<f64> = x.column(j).into_owned();
        let norm0 = v.norm();
        for b in &basis {
            let proj = b.dot(&v);
            v.axpy(-proj, b, 1.0);
        }
        let norm = v.norm();
        if norm0 == 0.0 || norm <= 1e-10 * norm0 {
            bad.push(name.clone());
        } else {
            basis.push(v / norm);
        }
    }
    bad
}

/// Binary columns whose 0-rows or 1-rows have a constant outcome.
fn separated_binary_columns(x: &DMatrix<f64>, y: &[f64], names: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for j in 1..x.ncols() {
        let col = x.column(j);
        if !col.iter().all(|&v| v == 0.0 || v == 1.0) {
            continue;
        }
        for level in [0.0, 1.0] {
            let ys: Vec<f64> = col.iter().zip(y).filter(|(&v, _)| v == level).map(|(_, &yi)| yi).collect();
            if !ys.is_empty() && ys.iter().all(|&v| v == ys[0]) {
                out.push(names[j].clone());
                break;
            }
        }
    }
    out
}

/// Fits `link` to `design` by Newton-Raphson from a zero start.
pub fn fit_glm(design: &DesignMatrix, link: Link) -> Result<GlmFit, EstimationError> {
    fit_glm_with(design, link, &FitOptions::default())
}

pub fn fit_glm_with(design: &DesignMatrix, link: Link, opts: &FitOptions) -> Result<GlmFit, EstimationError> {
    let x = design.x();
    let y = design.outcome();
    let (n, k) = x.shape();
    if n < k + 1 {
        return Err(EstimationError::TooFewObservations { rows: n, columns: k });
    }
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == n {
        return Err(EstimationError::NoOutcomeVariation);
    }
    let mut rank_bad = design.degenerate_columns();
    if rank_bad.is_empty() {
        rank_bad = dependent_columns(x, design.names());
    }
    if !rank_bad.is_empty() {
        return Err(EstimationError::RankDeficient(rank_bad));
    }
    let separated = separated_binary_columns(x, y, design.names());
    if !separated.is_empty() {
        return Err(EstimationError::PerfectSeparation(separated));
    }

    let mut beta = DVector::zeros(k);
    let (mut ll, mut grad, mut info) = derivatives(link, x, y, &beta);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if grad.amax() < opts.score_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let step = match info.clone().cholesky() {
            Some(ch) => ch.solve(&grad),
            None => match info.clone().lu().solve(&grad) {
                Some(s) => s,
                None => return Err(EstimationError::RankDeficient(design.names()[1..].to_vec())),
            },
        };
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let cand = &beta + &step * t;
            let cand_ll = log_likelihood(link, x, y, &cand);
            if cand_ll.is_finite() && cand_ll >= ll {
                accepted = Some((cand, cand_ll));
                break;
            }
            t *= 0.5;
        }
        let Some((next, _)) = accepted else {
            // no ascent along the Newton direction: numerically at the optimum
            converged = grad.amax() < opts.score_tol.sqrt();
            break;
        };
        let moved = (&next - &beta).amax();
        beta = next;
        (ll, grad, info) = derivatives(link, x, y, &beta);
        if moved < opts.step_tol {
            converged = true;
            break;
        }
    }

    if converged {
        // one more full Newton step: quadratic convergence takes the
        // estimate from the stopping tolerance to machine precision
        if let Some(step) = info.clone().cholesky().map(|ch| ch.solve(&grad)) {
            let cand = &beta + &step;
            let cand_ll = log_likelihood(link, x, y, &cand);
            // at the optimum the change in ll is below rounding noise
            if step.amax() < 1e-4 && cand_ll.is_finite() && cand_ll >= ll - 1e-12 * (1.0 + ll.abs()) {
                beta = cand;
                (ll, _, info) = derivatives(link, x, y, &beta);
            }
        }
    }

    let cov = info
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| EstimationError::RankDeficient(design.names()[1..].to_vec()))?;
    let se: Vec<f64> = (0..k).map(|j| cov[(j, j)].sqrt()).collect();
    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let t_stats: Vec<f64> = coefficients.iter().zip(&se).map(|(b, s)| b / s).collect();

    // Diverging coefficients: a large index shift carried by a coefficient
    // that the data cannot pin down.
    let diverging: Vec<String> = (1..k)
        .filter(|&j| {
            let span = x.column(j).amax();
            coefficients[j].abs() * span > 20.0 && t_stats[j].abs() < 1.0
        })
        .map(|j| design.names()[j].clone())
        .collect();
    if !diverging.is_empty() {
        return Err(EstimationError::PerfectSeparation(diverging));
    }

    let fit = GlmFit {
        link,
        names: design.names().to_vec(),
        coefficients,
        standard_errors: se,
        t_stats,
        log_likelihood: ll,
        n_used: n,
        dropped: design.dropped().to_vec(),
        converged,
        iterations,
    };
    if converged {
        Ok(fit)
    } else {
        Err(EstimationError::NotConverged(Box::new(fit)))
    }
}
