use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::family::binomial_coefficients;
use super::ContactContext;
use crate::arcs::Arc;
use crate::error::{Error, Result};
use crate::symcore::{FormalSeries, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiEntry {
    /// Exponent of each image; the sample is sorted by these.
    pub exponents: Vec<u32>,
    pub arc: Arc,
    pub r_bar: Rational,
}

/// Observed values of `r̄` over a finite set of arcs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhiSample {
    pub cap: u32,
    pub entries: Vec<PhiEntry>,
    /// Arcs skipped because they lie inside the maximum multiplicity locus.
    pub in_max_mult: usize,
    /// Enumeration stopped at the count cap.
    pub truncated: bool,
}

impl PhiSample {
    pub fn max_observed(&self) -> Option<&Rational> {
        self.entries.iter().map(|e| &e.r_bar).max()
    }

    pub fn min_observed(&self) -> Option<&Rational> {
        self.entries.iter().map(|e| &e.r_bar).min()
    }

    /// First entry, in exponent order, attaining the maximum.
    pub fn argmax(&self) -> Option<&PhiEntry> {
        self.entries.iter().rev().max_by(|a, b| a.r_bar.cmp(&b.r_bar))
    }

    pub fn count_below(&self, bound: &Rational) -> usize {
        self.entries.iter().filter(|e| e.r_bar < *bound).count()
    }

    pub fn count_above(&self, bound: &Rational) -> usize {
        self.entries.iter().filter(|e| e.r_bar > *bound).count()
    }
}

pub(crate) fn shuffle<T>(items: &mut [T], seed: u64) {
    items.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
}

/// Every exponent vector in `[1, cap]^n` balancing the binomial, in
/// lexicographic order, at most `limit` of them.
fn balanced_exponents(d: &[i64], cap: u32, limit: usize) -> (Vec<Vec<u32>>, bool) {
    fn go(
        d: &[i64],
        cap: u32,
        sum: i64,
        acc: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        limit: usize,
    ) -> bool {
        let i = acc.len();
        if i == d.len() {
            if sum == 0 {
                if out.len() == limit {
                    return false;
                }
                out.push(acc.clone());
            }
            return true;
        }
        // remaining coordinates can move the sum only within these bounds
        let (mut lo, mut hi) = (0i64, 0i64);
        for &c in &d[i + 1..] {
            let (a, b) = (c, c * i64::from(cap));
            lo += a.min(b);
            hi += a.max(b);
        }
        for e in 1..=cap {
            let s = sum + d[i] * i64::from(e);
            if s + lo > 0 || s + hi < 0 {
                continue;
            }
            acc.push(e);
            let more = go(d, cap, s, acc, out, limit);
            acc.pop();
            if !more {
                return false;
            }
        }
        true
    }
    let mut out = Vec::new();
    let complete = go(d, cap, 0, &mut Vec::with_capacity(d.len()), &mut out, limit);
    (out, !complete)
}

/// `r̄` over all monomial arcs with exponents in `[1, cap]` lying on a
/// binomial hypersurface.
pub fn phi_sample(ctx: &ContactContext, cap: u32) -> Result<PhiSample> {
    let v = ctx.variety();
    let [(e1, c1), (e2, c2)] = v.binomial().ok_or_else(|| {
        Error::InvalidVariety("monomial-arc sampling needs a binomial hypersurface".into())
    })?;
    let d: Vec<i64> = e1.iter().zip(&e2).map(|(&a, &b)| a as i64 - b as i64).collect();
    let lambda = binomial_coefficients(&d, &c1, &c2, None).ok_or_else(|| {
        Error::NoMonomialSolution("no variable can absorb the coefficient ratio".into())
    })?;
    let (exponents, truncated) = balanced_exponents(&d, cap, ctx.settings().count_cap);
    let arcs = exponents
        .into_iter()
        .map(|e| {
            let images = e
                .iter()
                .zip(&lambda)
                .map(|(&k, c)| FormalSeries::monomial(c.clone(), k))
                .collect();
            Ok((e, Arc::new(images)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sample = phi_sample_arcs(ctx, arcs)?;
    sample.cap = cap;
    sample.truncated = truncated;
    Ok(sample)
}

/// `r̄` over supplied arcs, each tagged with a sort key.
pub fn phi_sample_arcs(ctx: &ContactContext, mut arcs: Vec<(Vec<u32>, Arc)>) -> Result<PhiSample> {
    if let Some(seed) = ctx.settings().seed {
        shuffle(&mut arcs, seed);
    }
    let mut results: Vec<(Vec<u32>, Result<Option<PhiEntry>>)> = arcs
        .into_par_iter()
        .map(|(exponents, arc)| {
            let entry = match ctx.r_bar(&arc) {
                Ok(r_bar) => Ok(Some(PhiEntry {
                    exponents: exponents.clone(),
                    arc,
                    r_bar,
                })),
                Err(Error::ArcInMaxMult) => Ok(None),
                Err(e) => Err(e),
            };
            (exponents, entry)
        })
        .collect();
    results.sort_by(|a, b| a.0.cmp(&b.0));
    let mut sample = PhiSample::default();
    for (_, r) in results {
        match r? {
            Some(e) => sample.entries.push(e),
            None => sample.in_max_mult += 1,
        }
    }
    Ok(sample)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::Variety;
    use crate::invariants::Settings;
    use crate::symcore::{rat, Polynomial};

    fn xy_minus_z5() -> Variety {
        let n = 3;
        let f = Polynomial::var(n, 0)
            .mul(&Polynomial::var(n, 1))
            .sub(&Polynomial::var(n, 2).pow(5));
        Variety::new(vec!["x".into(), "y".into(), "z".into()], vec![f]).unwrap()
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let d = [1, 1, -5];
        let (got, truncated) = balanced_exponents(&d, 12, usize::MAX);
        assert!(!truncated);
        let mut want = Vec::new();
        for a in 1..=12u32 {
            for b in 1..=12u32 {
                for c in 1..=12u32 {
                    if a + b == 5 * c {
                        want.push(vec![a, b, c]);
                    }
                }
            }
        }
        assert_eq!(got, want);
        let (few, truncated) = balanced_exponents(&d, 12, 3);
        assert_eq!(few.len(), 3);
        assert!(truncated);
    }

    #[test]
    fn curve_sample_extremes() {
        let ctx = ContactContext::new(&xy_minus_z5(), Settings::default()).unwrap();
        let s = phi_sample(&ctx, 12).unwrap();
        assert_eq!(s.max_observed(), Some(&rat(5, 2)));
        assert_eq!(s.min_observed(), Some(&rat(1, 1)));
        assert_eq!(s.argmax().unwrap().exponents, vec![5, 5, 2]);
    }

    #[test]
    fn seed_does_not_change_output() {
        let plain = ContactContext::new(&xy_minus_z5(), Settings::default()).unwrap();
        let seeded = ContactContext::new(
            &xy_minus_z5(),
            Settings {
                seed: Some(7),
                ..Settings::default()
            },
        )
        .unwrap();
        assert_eq!(phi_sample(&plain, 10).unwrap(), phi_sample(&seeded, 10).unwrap());
    }
}
