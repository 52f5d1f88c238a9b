//! Sample summaries and Welch's unequal-variance t-test.

use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); `None` for a single observation.
    pub sd: Option<f64>,
}

impl SampleSummary {
    pub fn variance(&self) -> Option<f64> {
        self.sd.map(|s| s * s)
    }
}

pub fn summarize(samples: &[f64]) -> Result<SampleSummary> {
    if samples.is_empty() {
        return Err(Error::Argument("cannot summarize an empty sample".into()));
    }
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let sd = (n >= 2).then(|| {
        let ss: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    });
    Ok(SampleSummary { n, mean, sd })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchTest {
    /// `(mean_a - mean_b) / se`; infinite when both samples are constant and differ.
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom; NaN when both variances vanish.
    pub df: f64,
    pub p_two_tailed: f64,
    /// Both samples constant with different means.
    pub degenerate: bool,
}

/// Two-sided tail probability `P(|T| > |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_tailed(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x)
}

/// Cumulative distribution of Student's t.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    let tail = student_t_two_tailed(t, df) / 2.0;
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Welch's two-sample t-test, two-tailed and unpaired. `t` is signed as `a - b`.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<WelchTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Argument(format!(
            "t-test needs at least two observations per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let sa = summarize(a)?;
    let sb = summarize(b)?;
    let va = sa.variance().unwrap() / sa.n as f64;
    let vb = sb.variance().unwrap() / sb.n as f64;
    let diff = sa.mean - sb.mean;
    let se2 = va + vb;

    if se2 == 0.0 {
        return Ok(if diff == 0.0 {
            WelchTest { t: 0.0, df: f64::NAN, p_two_tailed: 1.0, degenerate: false }
        } else {
            WelchTest { t: f64::INFINITY.copysign(diff), df: f64::NAN, p_two_tailed: 0.0, degenerate: true }
        });
    }

    let t = diff / se2.sqrt();
    let df = se2 * se2 / (va * va / (sa.n - 1) as f64 + vb * vb / (sb.n - 1) as f64);
    Ok(WelchTest { t, df, p_two_tailed: student_t_two_tailed(t, df), degenerate: false })
}

/// `"*"` below 0.01, `"+"` below 0.05, empty otherwise.
pub fn significance_flag(p_value: f64) -> &'static str {
    if p_value < 0.01 {
        "*"
    } else if p_value < 0.05 {
        "+"
    } else {
        ""
    }
}
