//! Out-degree distribution of collapsed vertices (batch sizes).

use std::path::Path;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Discrete distribution of the batch size `M` on positive integers.
#[derive(Debug, Clone, PartialEq)]
pub struct OutDegreePmf {
    support: Vec<u32>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
    mean: f64,
}

/// Shipped default: a truncated discrete lognormal on `1..=800` with mean
/// 10.29 and variance 181.189 (see [`OutDegreePmf::discrete_lognormal`]).
pub const DEFAULT_PMF_CSV: &str = include_str!("../../data/outdegree_default.csv");

impl OutDegreePmf {
    /// Builds a PMF from `(m, p)` pairs. `m` must be positive and strictly
    /// increasing; the probabilities must sum to one within 1e-6 and are
    /// renormalized exactly.
    pub fn new(pairs: &[(u32, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::data("empty out-degree pmf"));
        }
        for w in pairs.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::data(format!(
                    "out-degree support not strictly increasing at m={}",
                    w[1].0
                )));
            }
        }
        if pairs[0].0 == 0 {
            return Err(Error::data("out-degree support must start at m >= 1"));
        }
        if pairs.iter().any(|&(_, p)| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::data("out-degree probabilities must be finite and nonnegative"));
        }
        let total: f64 = pairs.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::data(format!("out-degree probabilities sum to {total}, expected 1")));
        }
        let support: Vec<u32> = pairs.iter().map(|&(m, _)| m).collect();
        let probs: Vec<f64> = pairs.iter().map(|&(_, p)| p / total).collect();
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        let mean = support.iter().zip(&probs).map(|(&m, &p)| m as f64 * p).sum();
        Ok(Self {
            support,
            probs,
            cumulative,
            mean,
        })
    }

    /// Truncated discrete lognormal on `1..=max_m`, `p(m) ∝ exp(-(ln m - mu)^2 / (2 sigma^2)) / m`,
    /// with `(mu, sigma)` chosen so that the mean and variance match the targets.
    pub fn discrete_lognormal(target_mean: f64, target_var: f64, max_m: u32) -> Result<Self> {
        let weights = |mu: f64, sigma: f64| -> Vec<f64> {
            let w: Vec<f64> = (1..=max_m)
                .map(|m| {
                    let l = (m as f64).ln() - mu;
                    (-l * l / (2.0 * sigma * sigma)).exp() / m as f64
                })
                .collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        };
        let moments = |p: &[f64]| {
            let mean: f64 = p.iter().enumerate().map(|(i, q)| (i + 1) as f64 * q).sum();
            let var: f64 = p
                .iter()
                .enumerate()
                .map(|(i, q)| ((i + 1) as f64 - mean).powi(2) * q)
                .sum();
            (mean, var)
        };
        // mean is increasing in mu for fixed sigma
        let fit_mu = |sigma: f64| {
            let (mut lo, mut hi) = (-20.0, 20.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if moments(&weights(mid, sigma)).0 < target_mean {
                    lo = mid
                } else {
                    hi = mid
                }
            }
            0.5 * (lo + hi)
        };
        // at fixed mean, variance is increasing in sigma
        let (mut lo, mut hi) = (0.05, 4.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let p = weights(fit_mu(mid), mid);
            if moments(&p).1 < target_var {
                lo = mid
            } else {
                hi = mid
            }
        }
        let sigma = 0.5 * (lo + hi);
        let p = weights(fit_mu(sigma), sigma);
        let (mean, var) = moments(&p);
        if (mean - target_mean).abs() > 1e-6 * target_mean || (var - target_var).abs() > 1e-4 * target_var {
            return Err(Error::invalid(format!(
                "cannot match mean {target_mean} and variance {target_var} on 1..={max_m}"
            )));
        }
        let pairs: Vec<(u32, f64)> = p.iter().enumerate().map(|(i, &q)| (i as u32 + 1, q)).collect();
        Self::new(&pairs)
    }

    pub fn default_shared() -> Arc<OutDegreePmf> {
        static DEFAULT: OnceLock<Arc<OutDegreePmf>> = OnceLock::new();
        DEFAULT
            .get_or_init(|| Arc::new(Self::from_csv_str(DEFAULT_PMF_CSV).expect("shipped pmf parses")))
            .clone()
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        Self::from_reader(text.as_bytes())
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file)
    }

    fn from_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "m" || &headers[1] != "p" {
            return Err(Error::data(format!("pmf header must be `m,p`, found {headers:?}")));
        }
        let mut pairs = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let m: u32 = rec[0]
                .parse()
                .map_err(|_| Error::data(format!("bad pmf value m={:?}", &rec[0])))?;
            let p: f64 = rec[1]
                .parse()
                .map_err(|_| Error::data(format!("bad pmf probability {:?}", &rec[1])))?;
            pairs.push((m, p));
        }
        Self::new(&pairs)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("m,p\n");
        for (m, p) in self.support.iter().zip(&self.probs) {
            out.push_str(&format!("{m},{p}\n"));
        }
        out
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(&m, &p)| (m as f64 - self.mean).powi(2) * p)
            .sum()
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Inverse-CDF draw: the smallest `m` whose cumulative mass exceeds `u`.
    pub fn sample(&self, u: f64) -> u32 {
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.support[idx.min(self.support.len() - 1)]
    }
}
