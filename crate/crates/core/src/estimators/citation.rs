//! Trend-plus-dummy regressions on annual citation counts.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::EstimationError;

/// Two-sided 5% critical value of the standard normal.
pub const SIGNIFICANCE_T: f64 = 1.96;

/// Annual citations of one scholar, and the award year of a relative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitationSeries {
    pub scholar: String,
    pub observations: Vec<(i32, f64)>,
    pub relative_award_year: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakClass {
    NegativeSignificant,
    PositiveSignificant,
    Insignificant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CitationBreak {
    pub intercept: f64,
    pub trend: f64,
    pub break_coef: f64,
    pub break_se: f64,
    pub break_t: f64,
    pub n: usize,
}

impl CitationBreak {
    pub fn class(&self) -> BreakClass {
        if self.break_t > SIGNIFICANCE_T {
            BreakClass::PositiveSignificant
        } else if self.break_t < -SIGNIFICANCE_T {
            BreakClass::NegativeSignificant
        } else {
            BreakClass::Insignificant
        }
    }
}

/// OLS of citations on an intercept, the centred year, and an indicator for
/// the years strictly after the relative's award. Classical standard errors.
pub fn citation_break(series: &CitationSeries) -> Result<CitationBreak, EstimationError> {
    let obs = &series.observations;
    if obs.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(EstimationError::InvalidSeries(format!(
            "{}: years must be strictly increasing",
            series.scholar
        )));
    }
    if obs.iter().any(|&(_, c)| c < 0.0 || !c.is_finite()) {
        return Err(EstimationError::InvalidSeries(format!("{}: negative citation count", series.scholar)));
    }
    let n = obs.len();
    let after = |y: i32| y > series.relative_award_year;
    let post = obs.iter().filter(|(y, _)| after(*y)).count();
    if n < 4 || post == 0 || post == n {
        return Err(EstimationError::DegenerateDesign(format!(
            "{}: {n} observations, {post} after {}",
            series.scholar, series.relative_award_year
        )));
    }

    let mean_year = obs.iter().map(|&(y, _)| f64::from(y)).sum::<f64>() / n as f64;
    let x = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => 1.0,
        1 => f64::from(obs[i].0) - mean_year,
        _ => f64::from(u8::from(after(obs[i].0))),
    });
    let y = DVector::from_iterator(n, obs.iter().map(|&(_, c)| c));

    let ybar = y.mean();
    if y.iter().all(|&v| v == y[0]) {
        return Ok(CitationBreak {
            intercept: ybar,
            trend: 0.0,
            break_coef: 0.0,
            break_se: 0.0,
            break_t: 0.0,
            n,
        });
    }

    let xtx = x.tr_mul(&x);
    let xtx_inv = xtx
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| EstimationError::DegenerateDesign(format!("{}: collinear regressors", series.scholar)))?;
    let beta = &xtx_inv * x.tr_mul(&y);
    let resid = &y - &x * &beta;
    let rss = resid.norm_squared();
    let tss = y.iter().map(|v| (v - ybar).powi(2)).sum::<f64>();
    let dof = (n - 3) as f64;
    let (se, t) = if dof == 0.0 || rss <= 1e-24 * tss {
        // exact fit: the break is either absent or infinitely precise
        let b = beta[2];
        let t = if b.abs() <= 1e-9 * (1.0 + ybar.abs()) {
            0.0
        } else {
            f64::INFINITY.copysign(b)
        };
        (0.0, t)
    } else {
        let se = (rss / dof * xtx_inv[(2, 2)]).sqrt();
        (se, beta[2] / se)
    };
    Ok(CitationBreak {
        intercept: beta[0],
        trend: beta[1],
        break_coef: beta[2],
        break_se: se,
        break_t: t,
        n,
    })
}
