//! Secondary (compounding) distributions G(psi) and truncated pmf vectors.
//!
//! Every model in this crate is a compound-Poisson model with a specific
//! secondary distribution; the plain Poisson case is `Kind::Unit` (point
//! mass at 1). The four supported kinds:
//!
//! * `Unit` — degenerate at 1; recovers the Poisson INGARCH model.
//! * `Logarithmic(psi)`, 0 < psi < 1 — gives negative binomial INGARCH.
//! * `Poisson(psi)`, psi > 0 — gives Neyman Type A INGARCH.
//! * `Borel(psi)`, 0 <= psi < 1 — gives generalized Poisson INGARCH.

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Hard cap for the Borel total-progeny sampler; draws exceeding it are
/// rejected and retried. For psi <= 0.95 the cap is hit with probability
/// below 1e-9.
const BOREL_PROGENY_CAP: u64 = 1_000_000;

/// Family of the secondary distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Unit,
    Logarithmic,
    Poisson,
    Borel,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Kind::Unit => "unit",
            Kind::Logarithmic => "logarithmic",
            Kind::Poisson => "poisson",
            Kind::Borel => "borel",
        };
        f.write_str(name)
    }
}

/// Raw `{kind, psi}` pair as it appears in config files.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub kind: Kind,
    #[serde(default)]
    pub psi: f64,
}

/// A validated secondary distribution G(psi).
///
/// Construction checks the parameter domain; values are immutable and
/// cheap to clone (the logarithmic sampler's inversion table is shared
/// behind an `Arc`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DistributionSpec", into = "DistributionSpec")]
pub struct SecondaryDistribution {
    kind: Kind,
    psi: f64,
    /// Cumulative probabilities P(Z <= k+1) for the logarithmic sampler.
    #[serde(skip)]
    log_cdf: Option<Arc<[f64]>>,
}

impl PartialEq for SecondaryDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.psi == other.psi
    }
}

impl TryFrom<DistributionSpec> for SecondaryDistribution {
    type Error = Error;
    fn try_from(spec: DistributionSpec) -> Result<Self> {
        SecondaryDistribution::new(spec.kind, spec.psi)
    }
}

impl From<SecondaryDistribution> for DistributionSpec {
    fn from(d: SecondaryDistribution) -> Self {
        DistributionSpec {
            kind: d.kind,
            psi: d.psi,
        }
    }
}

impl SecondaryDistribution {
    pub fn new(kind: Kind, psi: f64) -> Result<Self> {
        let ok = psi.is_finite()
            && match kind {
                Kind::Unit => true,
                Kind::Logarithmic => psi > 0.0 && psi < 1.0,
                Kind::Poisson => psi > 0.0,
                Kind::Borel => (0.0..1.0).contains(&psi),
            };
        if !ok {
            return Err(Error::invalid(
                "psi",
                format!("psi = {psi} is outside the domain of the {kind} distribution"),
            ));
        }
        let log_cdf = match kind {
            Kind::Logarithmic => Some(logarithmic_cdf_table(psi)),
            _ => None,
        };
        Ok(Self { kind, psi, log_cdf })
    }

    pub fn unit() -> Self {
        Self {
            kind: Kind::Unit,
            psi: 0.0,
            log_cdf: None,
        }
    }

    pub fn logarithmic(psi: f64) -> Result<Self> {
        Self::new(Kind::Logarithmic, psi)
    }

    pub fn poisson(psi: f64) -> Result<Self> {
        Self::new(Kind::Poisson, psi)
    }

    pub fn borel(psi: f64) -> Result<Self> {
        Self::new(Kind::Borel, psi)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn is_unit(&self) -> bool {
        // Borel(0) degenerates to the unit distribution as well.
        self.kind == Kind::Unit || (self.kind == Kind::Borel && self.psi == 0.0)
    }

    /// Exact mean and variance (mu_psi, sigma2_psi).
    pub fn moments(&self) -> (f64, f64) {
        let psi = self.psi;
        match self.kind {
            Kind::Unit => (1.0, 0.0),
            Kind::Poisson => (psi, psi),
            Kind::Borel => {
                let q = 1.0 - psi;
                (1.0 / q, psi / (q * q * q))
            }
            Kind::Logarithmic => {
                let l = (1.0 - psi).ln();
                let mean = -psi / ((1.0 - psi) * l);
                let var = -psi * (psi + l) / ((1.0 - psi) * (1.0 - psi) * l * l);
                (mean, var)
            }
        }
    }

    /// Mean mu_psi.
    pub fn mean(&self) -> f64 {
        self.moments().0
    }

    /// P(Z = k).
    pub fn pmf(&self, k: u64) -> f64 {
        let psi = self.psi;
        match self.kind {
            Kind::Unit => {
                if k == 1 {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::Poisson => {
                let kf = k as f64;
                (kf * psi.ln() - psi - ln_gamma(kf + 1.0)).exp()
            }
            Kind::Borel => {
                if k == 0 {
                    0.0
                } else if psi == 0.0 {
                    if k == 1 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    let kf = k as f64;
                    (-kf * psi + (kf - 1.0) * (kf * psi).ln() - ln_gamma(kf + 1.0)).exp()
                }
            }
            Kind::Logarithmic => {
                if k == 0 {
                    0.0
                } else {
                    let kf = k as f64;
                    -(kf * psi.ln()).exp() / (kf * (1.0 - psi).ln())
                }
            }
        }
    }

    /// Truncated pmf on {0..M}; errors if the tail mass beyond M exceeds
    /// `epsilon`.
    pub fn pmf_vector(&self, m: usize, epsilon: f64) -> Result<TruncatedPMF> {
        if epsilon <= 0.0 {
            return Err(Error::invalid("epsilon", "must be > 0"));
        }
        let probs: Vec<f64> = (0..=m as u64).map(|k| self.pmf(k)).collect();
        let pmf = TruncatedPMF::from_probs(probs);
        if pmf.deficit() > epsilon {
            return Err(Error::TruncationTooSmall {
                m,
                deficit: pmf.deficit(),
                tolerance: epsilon,
            });
        }
        Ok(pmf)
    }

    /// One draw from G(psi).
    pub fn sample(&self, rng: &mut Rng) -> u64 {
        match self.kind {
            Kind::Unit => 1,
            Kind::Poisson => poisson_draw(self.psi, rng),
            Kind::Borel => {
                if self.psi == 0.0 {
                    return 1;
                }
                // Total progeny of a Poisson(psi) Galton-Watson tree rooted
                // at one individual, capped and rejected above the cap.
                loop {
                    let mut total: u64 = 0;
                    let mut frontier: u64 = 1;
                    while frontier > 0 {
                        total += frontier;
                        if total > BOREL_PROGENY_CAP {
                            break;
                        }
                        frontier = poisson_draw(self.psi * frontier as f64, rng);
                    }
                    if total <= BOREL_PROGENY_CAP {
                        return total;
                    }
                }
            }
            Kind::Logarithmic => {
                let table = self.log_cdf.as_ref().expect("built at construction");
                let u: f64 = rng.gen();
                // The table covers all but ~1e-15 of the mass; binary search
                // the cached cdf, fall back to stepping the pmf recurrence.
                match table.partition_point(|&c| c < u) {
                    i if i < table.len() => i as u64 + 1,
                    _ => {
                        let mut k = table.len() as u64;
                        let mut cum = table[table.len() - 1];
                        let mut p = self.pmf(k);
                        loop {
                            k += 1;
                            p *= self.psi * (k - 1) as f64 / k as f64;
                            cum += p;
                            if cum >= u || p < f64::MIN_POSITIVE {
                                return k;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Cumulative table for logarithmic inversion sampling, extended until the
/// tail is below ~1e-15.
fn logarithmic_cdf_table(psi: f64) -> Arc<[f64]> {
    let norm = -1.0 / (1.0 - psi).ln();
    let mut p = norm * psi; // pmf at k = 1
    let mut cum = p;
    let mut table = vec![cum];
    let mut k: u64 = 1;
    while 1.0 - cum > 1e-15 && k < 1_000_000 {
        k += 1;
        p *= psi * (k - 1) as f64 / k as f64;
        cum += p;
        table.push(cum);
    }
    table.into()
}

/// Poisson draw that tolerates a zero rate.
pub(crate) fn poisson_draw(rate: f64, rng: &mut Rng) -> u64 {
    if rate <= 0.0 {
        return 0;
    }
    let d = rand_distr::Poisson::new(rate).expect("rate > 0");
    rand_distr::Distribution::sample(&d, rng) as u64
}

/// A probability vector on {0..M} with an explicitly tracked tail deficit.
///
/// The deficit is the probability mass not represented by the vector
/// (truncation beyond M plus any stopped mixture tails). It is reported,
/// never silently renormalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedPMF {
    probs: Vec<f64>,
    deficit: f64,
}

impl TruncatedPMF {
    /// Build from raw probabilities; the deficit is `1 - sum`.
    ///
    /// Entries that are negative by a rounding hair are clamped to zero;
    /// anything more negative is a logic error upstream.
    pub fn from_probs(mut probs: Vec<f64>) -> Self {
        for p in &mut probs {
            debug_assert!(*p > -1e-12, "pmf entry {p} is negative");
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        let deficit = (1.0 - sum).max(0.0);
        Self { probs, deficit }
    }

    /// Point mass at `k` on support {0..m}.
    pub fn point_mass(k: usize, m: usize) -> Self {
        let mut probs = vec![0.0; m + 1];
        probs[k.min(m)] = 1.0;
        Self {
            probs,
            deficit: 0.0,
        }
    }

    /// Largest represented value M.
    pub fn support_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    /// P(X = k), zero beyond the truncation point.
    pub fn prob(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    /// Represented mass `1 - deficit`.
    pub fn total_mass(&self) -> f64 {
        1.0 - self.deficit
    }

    /// Mean of the represented part.
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }

    /// Variance of the represented part.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let m2: f64 = self
            .probs
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64) * (k as f64) * p)
            .sum();
        m2 - mean * mean
    }

    /// Total variation distance `0.5 * sum |p_i - q_i|`, with each vector's
    /// deficit treated as mass on an extra (shared) tail state.
    pub fn tv_distance(&self, other: &TruncatedPMF) -> f64 {
        let n = self.probs.len().max(other.probs.len());
        let mut acc = 0.0;
        for i in 0..n {
            acc += (self.prob(i) - other.prob(i)).abs();
        }
        acc += (self.deficit - other.deficit).abs();
        0.5 * acc
    }

    /// Copy rescaled to total mass one, for display purposes.
    pub fn renormalized(&self) -> TruncatedPMF {
        let mass = self.total_mass();
        if mass <= 0.0 {
            return self.clone();
        }
        TruncatedPMF {
            probs: self.probs.iter().map(|p| p / mass).collect(),
            deficit: 0.0,
        }
    }
}
