use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::random::seed::DrawRng;

/// Distribution of one scalar parameter of a random operator family.
///
/// Continuous laws have bounded support so that every selection built from
/// them is integrable.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarLaw {
    Dirac(f64),
    /// Finite support: `(value, probability)` rows.
    Table(Vec<(f64, f64)>),
    Uniform { lo: f64, hi: f64 },
    TruncatedNormal { mean: f64, sd: f64, lo: f64, hi: f64 },
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / core::f64::consts::SQRT_2))
}

fn std_normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * core::f64::consts::PI)
}

impl ScalarLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarLaw::Dirac(v) if !v.is_finite() => Err(Error::InvalidLaw(format!("dirac at {v}"))),
            ScalarLaw::Dirac(_) => Ok(()),
            ScalarLaw::Table(rows) => {
                if rows.is_empty() {
                    return Err(Error::InvalidLaw("empty table".into()));
                }
                if rows.iter().any(|(v, p)| !v.is_finite() || !(*p > 0.0) || !p.is_finite()) {
                    return Err(Error::InvalidLaw("table rows need finite values and positive probabilities".into()));
                }
                let total: f64 = rows.iter().map(|r| r.1).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidLaw(format!("table probabilities sum to {total}")));
                }
                Ok(())
            }
            ScalarLaw::Uniform { lo, hi } => {
                if lo.is_finite() && hi.is_finite() && lo < hi {
                    Ok(())
                } else {
                    Err(Error::InvalidLaw(format!("uniform on [{lo}, {hi}]")))
                }
            }
            ScalarLaw::TruncatedNormal { mean, sd, lo, hi } => {
                if mean.is_finite() && *sd > 0.0 && sd.is_finite() && lo.is_finite() && hi.is_finite() && lo < hi {
                    Ok(())
                } else {
                    Err(Error::InvalidLaw(format!("truncated normal N({mean}, {sd}) on [{lo}, {hi}]")))
                }
            }
        }
    }

    /// Smallest point of the support.
    pub fn support_min(&self) -> f64 {
        match self {
            ScalarLaw::Dirac(v) => *v,
            ScalarLaw::Table(rows) => rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min),
            ScalarLaw::Uniform { lo, .. } | ScalarLaw::TruncatedNormal { lo, .. } => *lo,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            ScalarLaw::Dirac(v) => *v,
            ScalarLaw::Table(rows) => rows.iter().map(|(v, p)| v * p).sum(),
            ScalarLaw::Uniform { lo, hi } => 0.5 * (lo + hi),
            ScalarLaw::TruncatedNormal { mean, sd, lo, hi } => {
                let a = (lo - mean) / sd;
                let b = (hi - mean) / sd;
                let z = std_normal_cdf(b) - std_normal_cdf(a);
                mean + sd * (std_normal_pdf(a) - std_normal_pdf(b)) / z
            }
        }
    }

    /// Finite support as `(value, probability)` rows, if any.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            ScalarLaw::Dirac(v) => Some(alloc::vec![(*v, 1.0)]),
            ScalarLaw::Table(rows) => Some(rows.clone()),
            _ => None,
        }
    }

    /// Draws a value and, for finite support, the index of the drawn atom.
    pub fn sample(&self, rng: &mut DrawRng) -> (f64, Option<usize>) {
        match self {
            ScalarLaw::Dirac(v) => (*v, Some(0)),
            ScalarLaw::Table(rows) => {
                let u = rng.uniform();
                let mut cum = 0.0;
                for (i, (v, p)) in rows.iter().enumerate() {
                    cum += p;
                    if u < cum {
                        return (*v, Some(i));
                    }
                }
                let last = rows.len() - 1;
                (rows[last].0, Some(last))
            }
            ScalarLaw::Uniform { lo, hi } => (lo + (hi - lo) * rng.uniform(), None),
            ScalarLaw::TruncatedNormal { mean, sd, lo, hi } => {
                // inverse cdf by bisection
                let cdf = |x: f64| std_normal_cdf((x - mean) / sd);
                let (f_lo, f_hi) = (cdf(*lo), cdf(*hi));
                let target = f_lo + rng.uniform() * (f_hi - f_lo);
                let (mut a, mut b) = (*lo, *hi);
                for _ in 0..80 {
                    let mid = 0.5 * (a + b);
                    if cdf(mid) < target {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                (0.5 * (a + b), None)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ScalarLaw::Table(alloc::vec![(1.0, 0.5), (3.0, 0.4)]).validate().is_err());
        assert!(ScalarLaw::Uniform { lo: 1.0, hi: 1.0 }.validate().is_err());
        assert!(ScalarLaw::TruncatedNormal { mean: 0.0, sd: 1.0, lo: -1.0, hi: 2.0 }.validate().is_ok());
    }

    #[test]
    fn means() {
        assert_eq!(ScalarLaw::Table(alloc::vec![(1.0, 0.5), (3.0, 0.5)]).mean(), 2.0);
        assert_eq!(ScalarLaw::Uniform { lo: -1.0, hi: 3.0 }.mean(), 1.0);
        let sym = ScalarLaw::TruncatedNormal { mean: 0.5, sd: 2.0, lo: -1.5, hi: 2.5 };
        assert!((sym.mean() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn truncated_normal_sample_mean() {
        let law = ScalarLaw::TruncatedNormal { mean: 0.0, sd: 1.0, lo: -0.5, hi: 3.0 };
        let n = 20_000;
        let mut sum = 0.0;
        for k in 0..n {
            let mut rng = DrawRng::for_draw(11, 0, k);
            let (v, atom) = law.sample(&mut rng);
            assert!(atom.is_none());
            assert!((-0.5..=3.0).contains(&v));
            sum += v;
        }
        // sd of the truncated law is below 1
        assert!((sum / n as f64 - law.mean()).abs() < 5.0 / (n as f64).sqrt());
    }
}
