//! Thinning and compounding operators.
//!
//! * binomial thinning:  pi o N  = sum of N independent Bernoulli(pi)
//! * Poisson thinning:   kappa * N = sum of N independent Pois(kappa), i.e. Pois(kappa N)
//! * compound operator:  psi *_G N = sum of N independent draws from G(psi)
//! * multinomial split of a pool into q staying categories plus an exit

use rand_distr::Distribution as _;

use crate::distributions::{poisson_draw, SecondaryDistribution};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Bin(n, pi) draw.
pub fn binomial_thin(pi: f64, n: u64, rng: &mut Rng) -> Result<u64> {
    if !(0.0..=1.0).contains(&pi) {
        return Err(Error::invalid("pi", format!("{pi} is not in [0, 1]")));
    }
    if n == 0 || pi == 0.0 {
        return Ok(0);
    }
    if pi == 1.0 {
        return Ok(n);
    }
    let d = rand_distr::Binomial::new(n, pi).expect("checked domain");
    Ok(d.sample(rng))
}

/// Pois(kappa * n) draw, distributionally identical to summing n
/// independent Pois(kappa) variables but O(1).
pub fn poisson_thin(kappa: f64, n: u64, rng: &mut Rng) -> Result<u64> {
    if kappa < 0.0 || !kappa.is_finite() {
        return Err(Error::invalid("kappa", format!("{kappa} is not >= 0")));
    }
    Ok(poisson_draw(kappa * n as f64, rng))
}

/// Sum of n independent draws from G(psi).
///
/// Unit is the identity on n; a Poisson secondary collapses to a single
/// Pois(n psi) draw; the general case loops.
pub fn compound_thin(dist: &SecondaryDistribution, n: u64, rng: &mut Rng) -> u64 {
    use crate::distributions::Kind;
    match dist.kind() {
        Kind::Unit => n,
        Kind::Poisson => poisson_draw(dist.psi() * n as f64, rng),
        _ => (0..n).map(|_| dist.sample(rng)).sum(),
    }
}

/// Multinomial split of a pool of size `e` into q staying categories with
/// probabilities `beta[j]` plus an exit category with the remaining
/// probability. Returns (stays per category, exits); the parts always sum
/// to `e` exactly.
pub fn multinomial_split(e: u64, beta: &[f64], rng: &mut Rng) -> Result<(Vec<u64>, u64)> {
    let total: f64 = beta.iter().sum();
    if beta.iter().any(|&b| b < 0.0 || !b.is_finite()) {
        return Err(Error::invalid("beta", "entries must be >= 0"));
    }
    if total >= 1.0 {
        return Err(Error::invalid(
            "beta",
            format!("sum {total} must be < 1"),
        ));
    }
    // Conditional-binomial construction: category j gets a binomial share
    // of what is left, with its probability rescaled by the remaining mass.
    let mut parts = Vec::with_capacity(beta.len());
    let mut remaining = e;
    let mut mass_left = 1.0;
    for &b in beta {
        let p = if mass_left > 0.0 {
            (b / mass_left).min(1.0)
        } else {
            0.0
        };
        let l = binomial_thin(p, remaining, rng)?;
        parts.push(l);
        remaining -= l;
        mass_left -= b;
    }
    Ok((parts, remaining))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::SecondaryDistribution;
    use crate::rng::seed_rng;

    #[test]
    fn binomial_thin_edges() {
        let mut rng = seed_rng(10);
        assert_eq!(binomial_thin(0.0, 1000, &mut rng).unwrap(), 0);
        assert_eq!(binomial_thin(1.0, 7, &mut rng).unwrap(), 7);
        assert!(binomial_thin(1.5, 7, &mut rng).is_err());
        assert!(binomial_thin(-0.1, 7, &mut rng).is_err());
    }

    #[test]
    fn binomial_thin_mean() {
        let mut rng = seed_rng(11);
        let n = 100_000;
        let sum: u64 = (0..n)
            .map(|_| binomial_thin(0.5, 10, &mut rng).unwrap())
            .sum();
        let mean = sum as f64 / n as f64;
        // Var = 10 * 0.25 = 2.5
        let se = (2.5 / n as f64).sqrt();
        assert!((mean - 5.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn poisson_thin_edges_and_moments() {
        let mut rng = seed_rng(12);
        assert_eq!(poisson_thin(0.5, 0, &mut rng).unwrap(), 0);
        assert_eq!(poisson_thin(0.0, 99, &mut rng).unwrap(), 0);
        assert!(poisson_thin(-1.0, 1, &mut rng).is_err());

        let n = 100_000;
        let draws: Vec<u64> = (0..n)
            .map(|_| poisson_thin(0.5, 10, &mut rng).unwrap())
            .collect();
        let mean = draws.iter().sum::<u64>() as f64 / n as f64;
        let var = draws
            .iter()
            .map(|&x| (x as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1) as f64;
        let se_mean = (5.0 / n as f64).sqrt();
        // Var(sample var) for Poisson(5): (m4 - var^2)/n with m4 = 3*25 + 5 + ...;
        // 4 SE with the crude bound sqrt(2*var^2 + var)/sqrt(n).
        let se_var = ((2.0 * 25.0 + 5.0) / n as f64).sqrt();
        assert!((mean - 5.0).abs() < 3.0 * se_mean, "mean {mean}");
        assert!((var - 5.0).abs() < 4.0 * se_var, "var {var}");
    }

    #[test]
    fn compound_thin_unit_is_identity() {
        let d = SecondaryDistribution::unit();
        let mut rng = seed_rng(13);
        for n in [0u64, 1, 5, 173] {
            assert_eq!(compound_thin(&d, n, &mut rng), n);
        }
    }

    #[test]
    fn compound_thin_wald_mean() {
        // E[psi *_G N] = N * mu_psi; Poisson(2) with N = 5 has mean 10.
        let d = SecondaryDistribution::poisson(2.0).unwrap();
        let mut rng = seed_rng(14);
        let n = 100_000;
        let sum: u64 = (0..n).map(|_| compound_thin(&d, 5, &mut rng)).sum();
        let mean = sum as f64 / n as f64;
        let se = (10.0 / n as f64).sqrt(); // Pois(10) variance
        assert!((mean - 10.0).abs() < 3.0 * se, "mean {mean}");

        // The generic loop path (Borel) obeys the same identity:
        // Borel(0.5) has mu = 2, sigma^2 = 4 -> var of sum over N=5 is 20.
        let d = SecondaryDistribution::borel(0.5).unwrap();
        let sum: u64 = (0..n).map(|_| compound_thin(&d, 5, &mut rng)).sum();
        let mean = sum as f64 / n as f64;
        let se = (20.0 / n as f64).sqrt();
        assert!((mean - 10.0).abs() < 3.0 * se, "borel mean {mean}");
        assert_eq!(compound_thin(&d, 0, &mut rng), 0);
    }

    #[test]
    fn multinomial_split_edges() {
        let mut rng = seed_rng(15);
        let (parts, exit) = multinomial_split(0, &[0.2, 0.3], &mut rng).unwrap();
        assert_eq!((parts, exit), (vec![0, 0], 0));

        let (parts, exit) = multinomial_split(42, &[0.0], &mut rng).unwrap();
        assert_eq!((parts, exit), (vec![0], 42));

        assert!(multinomial_split(1, &[0.5, 0.5], &mut rng).is_err());
        assert!(multinomial_split(1, &[-0.1], &mut rng).is_err());
    }

    #[test]
    fn multinomial_split_conserves_and_matches_cell_probabilities() {
        let mut rng = seed_rng(16);
        let beta = [0.2, 0.3];
        let n = 100_000u64;
        let mut counts = [0u64; 3];
        for _ in 0..n {
            let (parts, exit) = multinomial_split(1, &beta, &mut rng).unwrap();
            assert_eq!(parts.iter().sum::<u64>() + exit, 1);
            counts[0] += parts[0];
            counts[1] += parts[1];
            counts[2] += exit;
        }
        for (count, p) in counts.iter().zip([0.2, 0.3, 0.5]) {
            let freq = *count as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() < 4.0 * se, "freq {freq} vs {p}");
        }

        // Conservation under larger pools.
        for _ in 0..1000 {
            let (parts, exit) = multinomial_split(1234, &beta, &mut rng).unwrap();
            assert_eq!(parts.iter().sum::<u64>() + exit, 1234);
        }
    }
}
