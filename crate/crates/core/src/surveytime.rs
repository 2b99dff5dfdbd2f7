//! Maximum-likelihood fits of survey-administration times (minutes) to the
//! triangular and logistic families, AIC model choice, and the time saving
//! of a shortened questionnaire.

use std::fmt::Write as _;
use std::io::Read;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TIME_UNIT: &str = "minutes";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurveyVariant {
    FullSurvey,
    ReducedSurvey,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSamples {
    values: Vec<f64>,
    label: SurveyVariant,
}

impl TimeSamples {
    pub fn new(values: Vec<f64>, label: SurveyVariant) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "survey time {v} is not a positive number"
            )));
        }
        Ok(Self { values, label })
    }

    /// One column of times; a non-numeric first line is taken as a header.
    pub fn read_csv<R: Read>(reader: R, label: SurveyVariant) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut values = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
            let cell = rec.get(0).unwrap_or("");
            if cell.is_empty() {
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) => values.push(v),
                Err(_) if line == 0 => {}
                Err(_) => {
                    return Err(Error::NonNumeric {
                        row: line,
                        column: "time".into(),
                        value: cell.to_string(),
                    })
                }
            }
        }
        if values.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, found: 0 });
        }
        Self::new(values, label)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> SurveyVariant {
        self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Triangular distribution on `[lower, upper]` peaking at `mode`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangularParams {
    pub lower: f64,
    pub mode: f64,
    pub upper: f64,
}

impl TriangularParams {
    pub fn new(lower: f64, mode: f64, upper: f64) -> Result<Self> {
        if !(lower <= mode && mode <= upper && lower < upper) {
            return Err(Error::InvalidParameter(format!(
                "triangular parameters need lower <= mode <= upper, lower < upper; got ({lower}, {mode}, {upper})"
            )));
        }
        Ok(Self { lower, mode, upper })
    }

    pub fn mean(&self) -> f64 {
        (self.lower + self.mode + self.upper) / 3.0
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let TriangularParams {
            lower: a,
            mode: c,
            upper: b,
        } = *self;
        if x < a || x > b {
            0.0
        } else if x < c {
            2.0 * (x - a) / ((b - a) * (c - a))
        } else if x > c {
            2.0 * (b - x) / ((b - a) * (b - c))
        } else {
            2.0 / (b - a)
        }
    }

    pub fn log_likelihood(&self, xs: &[f64]) -> f64 {
        xs.iter().map(|&x| self.pdf(x).ln()).sum()
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let TriangularParams {
            lower: a,
            mode: c,
            upper: b,
        } = *self;
        let u: f64 = rng.gen();
        let split = (c - a) / (b - a);
        if u < split {
            a + (u * (b - a) * (c - a)).sqrt()
        } else {
            b - ((1.0 - u) * (b - a) * (b - c)).sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub location: f64,
    pub scale: f64,
}

impl LogisticParams {
    pub fn new(location: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && location.is_finite() && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "logistic scale {scale} must be positive"
            )));
        }
        Ok(Self { location, scale })
    }

    pub fn mean(&self) -> f64 {
        self.location
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        let z = (x - self.location) / self.scale;
        // log f = -|z| - log s - 2 log(1 + e^{-|z|}), symmetric in z
        let a = z.abs();
        -a - self.scale.ln() - 2.0 * (-a).exp().ln_1p()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    pub fn log_likelihood(&self, xs: &[f64]) -> f64 {
        xs.iter().map(|&x| self.log_pdf(x)).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut u: f64 = rng.gen();
        while u == 0.0 {
            u = rng.gen();
        }
        self.location + self.scale * (u / (1.0 - u)).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Triangular,
    Logistic,
}

impl Family {
    pub fn param_count(self) -> usize {
        match self {
            Family::Triangular => 3,
            Family::Logistic => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum DistributionParams {
    Triangular(TriangularParams),
    Logistic(LogisticParams),
}

impl DistributionParams {
    pub fn family(&self) -> Family {
        match self {
            DistributionParams::Triangular(_) => Family::Triangular,
            DistributionParams::Logistic(_) => Family::Logistic,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            DistributionParams::Triangular(t) => t.mean(),
            DistributionParams::Logistic(l) => l.mean(),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            DistributionParams::Triangular(t) => t.pdf(x),
            DistributionParams::Logistic(l) => l.pdf(x),
        }
    }

    pub fn log_likelihood(&self, xs: &[f64]) -> f64 {
        match self {
            DistributionParams::Triangular(t) => t.log_likelihood(xs),
            DistributionParams::Logistic(l) => l.log_likelihood(xs),
        }
    }
}

/// Akaike information criterion `2k - 2 logL`.
pub fn aic(log_likelihood: f64, param_count: usize) -> f64 {
    2.0 * param_count as f64 - 2.0 * log_likelihood
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedDistribution {
    pub params: DistributionParams,
    pub log_likelihood: f64,
    pub aic: f64,
    pub mean: f64,
}

impl FittedDistribution {
    pub fn new(params: DistributionParams, xs: &[f64]) -> Self {
        let log_likelihood = params.log_likelihood(xs);
        Self {
            params,
            log_likelihood,
            aic: aic(log_likelihood, params.family().param_count()),
            mean: params.mean(),
        }
    }

    pub fn family(&self) -> Family {
        self.params.family()
    }

    pub fn describe(&self) -> String {
        match self.params {
            DistributionParams::Triangular(t) => {
                format!("Triangle ({:.3}, {:.3}, {:.3})", t.lower, t.mode, t.upper)
            }
            DistributionParams::Logistic(l) => format!("Logistic ({:.3}, {:.4})", l.location, l.scale),
        }
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Triangular MLE with the support pinned just outside the sample range.
///
/// Between consecutive order statistics the log-likelihood is convex in the
/// mode, so its maximum sits at a sample point. All sample points are scored
/// in O(n) from prefix sums; a golden-section search over the neighbouring
/// bracket then polishes the winner.
pub fn fit_triangular(s: &TimeSamples) -> Result<FittedDistribution> {
    let n = s.len();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, found: n });
    }
    let mut xs = s.values.clone();
    xs.sort_by(f64::total_cmp);
    let range = xs[n - 1] - xs[0];
    if !(range > 0.0) {
        return Err(Error::ZeroSpread);
    }
    let eps = 1e-6 * range;
    let a = xs[0] - eps;
    let b = xs[n - 1] + eps;

    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + (xs[i] - a).ln();
    }
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + (b - xs[i]).ln();
    }
    let nf = n as f64;
    let base = nf * (2.0f64.ln() - (b - a).ln());
    let at_sample = |j: usize| {
        let c = xs[j];
        let k = xs.partition_point(|&x| x < c);
        base + prefix[k] - k as f64 * (c - a).ln() + suffix[k] - (n - k) as f64 * (b - c).ln()
    };
    let mut best = 0;
    let mut best_ll = at_sample(0);
    for j in 1..n {
        let ll = at_sample(j);
        if ll > best_ll {
            best = j;
            best_ll = ll;
        }
    }

    let lo = if best > 0 { xs[best - 1] } else { a };
    let hi = if best + 1 < n { xs[best + 1] } else { b };
    let loglik = |c: f64| {
        TriangularParams {
            lower: a,
            mode: c,
            upper: b,
        }
        .log_likelihood(&xs)
    };
    let polished = golden_section_max(loglik, lo, hi, 1e-12 * range);
    let mode = if loglik(polished) > best_ll { polished } else { xs[best] };

    let params = TriangularParams::new(a, mode, b)?;
    Ok(FittedDistribution::new(
        DistributionParams::Triangular(params),
        &s.values,
    ))
}

/// Mean log-likelihood of the logistic family with its gradient and Hessian
/// in `(location, scale)`.
pub fn logistic_mean_loglik(xs: &[f64], location: f64, scale: f64) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let n = xs.len() as f64;
    let params = LogisticParams { location, scale };
    let (mut ll, mut g_mu, mut g_s) = (0.0, 0.0, 0.0);
    let (mut h_mm, mut h_ms, mut h_ss) = (0.0, 0.0, 0.0);
    for &x in xs {
        let z = (x - location) / scale;
        let t = (0.5 * z).tanh();
        let sech2 = 1.0 - t * t;
        ll += params.log_pdf(x);
        g_mu += t;
        g_s += z * t - 1.0;
        h_mm -= 0.5 * sech2;
        h_ms -= t + 0.5 * z * sech2;
        h_ss += 1.0 - 2.0 * z * t - 0.5 * z * z * sech2;
    }
    let s2 = scale * scale;
    (
        ll / n,
        [g_mu / (scale * n), g_s / (scale * n)],
        [[h_mm / (s2 * n), h_ms / (s2 * n)], [h_ms / (s2 * n), h_ss / (s2 * n)]],
    )
}

pub const LOGISTIC_GRADIENT_TOLERANCE: f64 = 1e-10;
pub const LOGISTIC_MAX_ITERATIONS: usize = 200;

/// Moment-based starting point: sample mean and `sqrt(3) sd / pi`.
pub fn logistic_moment_start(xs: &[f64]) -> Result<LogisticParams> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, found: n });
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    if !(var > 0.0) {
        return Err(Error::ZeroSpread);
    }
    LogisticParams::new(mean, 3f64.sqrt() * var.sqrt() / std::f64::consts::PI)
}

/// Logistic MLE by damped Newton iteration from the moment estimates.
///
/// Converges once the gradient of the mean log-likelihood, taken in units of
/// the current scale (so `scale * dL/dtheta`), has Euclidean norm below
/// [`LOGISTIC_GRADIENT_TOLERANCE`]. When the line search can no longer
/// improve the objective the iterate sits at the optimum to machine precision
/// and is accepted if that gradient is already below `1e-6`.
pub fn fit_logistic(s: &TimeSamples) -> Result<FittedDistribution> {
    let xs = &s.values;
    let start = logistic_moment_start(xs)?;
    let (mut mu, mut sc) = (start.location, start.scale);
    let (mut ll, mut g, mut h) = logistic_mean_loglik(xs, mu, sc);
    let mut iterations = 0;
    loop {
        let norm = |g: [f64; 2], sc: f64| sc * (g[0] * g[0] + g[1] * g[1]).sqrt();
        if norm(g, sc) < LOGISTIC_GRADIENT_TOLERANCE {
            break;
        }
        if iterations == LOGISTIC_MAX_ITERATIONS {
            return Err(Error::NoConvergence {
                iterations,
                gradient_norm: norm(g, sc),
            });
        }
        iterations += 1;
        let det = h[0][0] * h[1][1] - h[0][1] * h[0][1];
        let step = if h[0][0] < 0.0 && det > 0.0 {
            // -H^{-1} g
            [
                -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
                -(-h[0][1] * g[0] + h[0][0] * g[1]) / det,
            ]
        } else {
            // ascent direction scaled to the current spread
            let k = sc * sc;
            [k * g[0], k * g[1]]
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let (nm, ns) = (mu + t * step[0], sc + t * step[1]);
            if ns > 0.0 {
                let (nll, ng, nh) = logistic_mean_loglik(xs, nm, ns);
                let moved = nm != mu || ns != sc;
                if nll.is_finite() && nll >= ll && moved {
                    mu = nm;
                    sc = ns;
                    ll = nll;
                    g = ng;
                    h = nh;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            if norm(g, sc) < 1e-6 {
                break;
            }
            return Err(Error::NoConvergence {
                iterations,
                gradient_norm: norm(g, sc),
            });
        }
    }
    let params = LogisticParams::new(mu, sc)?;
    Ok(FittedDistribution::new(DistributionParams::Logistic(params), xs))
}

/// One family's outcome in a model comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateFit {
    pub family: Family,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FittedDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitComparison {
    pub candidates: Vec<CandidateFit>,
    pub best: FittedDistribution,
}

/// Fits every family and keeps the smallest AIC; on an exact tie the family
/// with fewer parameters (logistic) wins.
pub fn best_fit(s: &TimeSamples) -> Result<FitComparison> {
    let fits = [
        (Family::Logistic, fit_logistic(s)),
        (Family::Triangular, fit_triangular(s)),
    ];
    let mut candidates = Vec::new();
    let mut best: Option<FittedDistribution> = None;
    for (family, fit) in fits {
        match fit {
            Ok(f) => {
                if best.as_ref().is_none_or(|b| f.aic < b.aic) {
                    best = Some(f.clone());
                }
                candidates.push(CandidateFit {
                    family,
                    fit: Some(f),
                    error: None,
                });
            }
            Err(e) => candidates.push(CandidateFit {
                family,
                fit: None,
                error: Some(e.to_string()),
            }),
        }
    }
    match best {
        Some(best) => Ok(FitComparison { candidates, best }),
        None => Err(Error::NoFit(
            candidates
                .iter()
                .filter_map(|c| c.error.as_deref())
                .collect::<Vec<_>>()
                .join("; "),
        )),
    }
}

/// `100 (1 - after / before)`.
pub fn reduction_percent(mean_before: f64, mean_after: f64) -> Result<f64> {
    if !(mean_before > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "baseline mean {mean_before} must be positive"
        )));
    }
    if !(mean_after >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "reduced mean {mean_after} must be nonnegative"
        )));
    }
    Ok(100.0 * (1.0 - mean_after / mean_before))
}

/// Rounds half away from zero to one decimal, as printed in reports.
pub fn round_one_decimal(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyFitReport {
    pub label: SurveyVariant,
    pub n_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub questions: Option<usize>,
    pub comparison: FitComparison,
}

/// Before/after survey-time comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeReductionReport {
    pub unit: String,
    /// Triangular parameters are listed as (lower, mode, upper).
    pub parameter_order: String,
    pub before: SurveyFitReport,
    pub after: SurveyFitReport,
    /// Computed from the unrounded fitted means.
    pub reduction_percent: f64,
    /// `reduction_percent` rounded half away from zero to one decimal.
    pub reduction_percent_rounded: f64,
}

impl TimeReductionReport {
    pub fn build(before: &TimeSamples, after: &TimeSamples, questions: (Option<usize>, Option<usize>)) -> Result<Self> {
        let fit_before = best_fit(before)?;
        let fit_after = best_fit(after)?;
        let reduction = reduction_percent(fit_before.best.mean, fit_after.best.mean)?;
        Ok(Self {
            unit: TIME_UNIT.into(),
            parameter_order: "triangular: (lower, mode, upper); logistic: (location, scale)".into(),
            before: SurveyFitReport {
                label: before.label(),
                n_samples: before.len(),
                questions: questions.0,
                comparison: fit_before,
            },
            after: SurveyFitReport {
                label: after.label(),
                n_samples: after.len(),
                questions: questions.1,
                comparison: fit_after,
            },
            reduction_percent: reduction,
            reduction_percent_rounded: round_one_decimal(reduction),
        })
    }

    pub fn render_text(&self) -> String {
        let b = &self.before.comparison.best;
        let a = &self.after.comparison.best;
        let q = |v: Option<usize>| v.map_or("-".to_string(), |n| n.to_string());
        let rows = [
            ("Number of questions", q(self.before.questions), q(self.after.questions)),
            (
                "Samples",
                self.before.n_samples.to_string(),
                self.after.n_samples.to_string(),
            ),
            ("Survey time distribution", b.describe(), a.describe()),
            ("AIC", format!("{:.3}", b.aic), format!("{:.3}", a.aic)),
            (
                &*format!("Mean ({})", self.unit),
                format!("{:.3}", b.mean),
                format!("{:.3}", a.mean),
            ),
            (
                "Survey time reduction percent",
                "-".to_string(),
                format!("{:.1}%", self.reduction_percent_rounded),
            ),
        ];
        let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max(24);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:w0$}  {:w1$}  After feature selection",
            "", "Before feature selection"
        );
        for (k, x, y) in rows.iter() {
            let _ = writeln!(out, "{k:w0$}  {x:w1$}  {y}");
        }
        for (name, rep) in [("before", &self.before), ("after", &self.after)] {
            for c in &rep.comparison.candidates {
                let family = match c.family {
                    Family::Triangular => "triangular",
                    Family::Logistic => "logistic",
                };
                match (&c.fit, &c.error) {
                    (Some(f), _) => {
                        let _ = writeln!(
                            out,
                            "  {name:6} {family:10} logL {:.4}  AIC {:.4}  {}",
                            f.log_likelihood,
                            f.aic,
                            f.describe()
                        );
                    }
                    (None, Some(e)) => {
                        let _ = writeln!(out, "  {name:6} {family:10} failed: {e}");
                    }
                    _ => {}
                }
            }
        }
        let _ = writeln!(
            out,
            "  reduction {:.4}% before rounding; table value rounded half away from zero to one decimal",
            self.reduction_percent
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(v: &[f64]) -> TimeSamples {
        TimeSamples::new(v.to_vec(), SurveyVariant::FullSurvey).unwrap()
    }

    #[test]
    fn aic_identity() {
        assert_eq!(aic(-100.0, 2), 204.0);
    }

    #[test]
    fn closed_form_means() {
        let t = TriangularParams::new(3.5, 6.4, 6.4).unwrap();
        assert!((t.mean() - 16.3 / 3.0).abs() < 1e-12);
        assert!((t.mean() - 5.433).abs() < 1e-3);
        assert_eq!(LogisticParams::new(1.19, 0.019).unwrap().mean(), 1.19);
    }

    #[test]
    fn reduction_examples() {
        let r = reduction_percent(5.4, 1.19).unwrap();
        assert!((r - 77.962_962_962_962_96).abs() < 1e-9);
        assert_eq!(round_one_decimal(r), 78.0);
        assert_eq!(round_one_decimal(reduction_percent(16.3 / 3.0, 1.19).unwrap()), 78.1);
        assert_eq!(reduction_percent(2.5, 2.5).unwrap(), 0.0);
        assert_eq!(reduction_percent(2.5, 0.0).unwrap(), 100.0);
        assert!(reduction_percent(0.0, 1.0).is_err());
        assert!(reduction_percent(1.0, -1.0).is_err());
    }

    #[test]
    fn guards() {
        assert!(matches!(
            fit_triangular(&samples(&[2.0, 2.0, 2.0])),
            Err(Error::ZeroSpread)
        ));
        assert!(matches!(
            fit_triangular(&samples(&[1.0, 2.0])),
            Err(Error::TooFewSamples { .. })
        ));
        assert!(matches!(fit_logistic(&samples(&[1.0, 1.0])), Err(Error::ZeroSpread)));
        assert!(TimeSamples::new(vec![1.0, -2.0], SurveyVariant::FullSurvey).is_err());
        assert!(TriangularParams::new(3.0, 2.0, 4.0).is_err());
        assert!(LogisticParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn best_fit_fails_only_when_every_family_fails() {
        let err = best_fit(&samples(&[1.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::NoFit(_)));
        // logistic fits two points, triangular needs three
        let cmp = best_fit(&samples(&[1.0, 2.0])).unwrap();
        assert_eq!(cmp.best.family(), Family::Logistic);
        assert!(cmp.candidates.iter().any(|c| c.error.is_some()));
    }

    #[test]
    fn csv_with_and_without_header() {
        let a = TimeSamples::read_csv("minutes\n1.5\n2.5\n\n3\n".as_bytes(), SurveyVariant::FullSurvey).unwrap();
        assert_eq!(a.values(), &[1.5, 2.5, 3.0]);
        let b = TimeSamples::read_csv("1.5\n2\n".as_bytes(), SurveyVariant::ReducedSurvey).unwrap();
        assert_eq!(b.values(), &[1.5, 2.0]);
        assert!(TimeSamples::read_csv("".as_bytes(), SurveyVariant::FullSurvey).is_err());
        assert!(TimeSamples::read_csv("t\n1\nx\n".as_bytes(), SurveyVariant::FullSurvey).is_err());
    }

    #[test]
    fn triangular_mode_at_sample_point() {
        let s = samples(&[1.0, 2.0, 2.2, 2.4, 3.0, 4.0]);
        let f = fit_triangular(&s).unwrap();
        let DistributionParams::Triangular(t) = f.params else {
            panic!()
        };
        // brute-force scan of the mode over a fine grid never beats the fit
        let steps = 20_000;
        for i in 0..=steps {
            let c = t.lower + (t.upper - t.lower) * i as f64 / steps as f64;
            let ll = TriangularParams { mode: c, ..t }.log_likelihood(s.values());
            assert!(ll <= f.log_likelihood + 1e-9);
        }
    }
}
