use num_traits::One;
use rayon::prelude::*;

use super::{ContactContext, ContactReport, Settings};
use crate::arcs::{Arc, ArcFamily, FamilyImage, LinearExponent, Variety};
use crate::error::{Error, Result};
use crate::rees::sing_contains_axis;
use crate::symcore::Rational;

/// A user-chosen exponent for one variable of a synthesized family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pin {
    pub var: usize,
    pub exponent: LinearExponent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyRow {
    pub n: i64,
    pub arc: Arc,
    pub report: ContactReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyWitness {
    pub name: String,
    pub family: ArcFamily,
    pub rows: Vec<FamilyRow>,
}

impl FamilyWitness {
    pub fn r_bar_increasing(&self) -> bool {
        strictly_increasing(&self.rows)
    }
}

pub fn strictly_increasing(rows: &[FamilyRow]) -> bool {
    rows.windows(2).all(|w| w[0].report.r_bar < w[1].report.r_bar)
}

/// Coefficients `λ` with `c₁ λ^{e₁} + c₂ λ^{e₂} = 0`: all ones when
/// `c₁ = -c₂`, otherwise one variable with exponent difference `±1`
/// (never `skip`) absorbs the ratio.
pub fn binomial_coefficients(
    d: &[i64],
    c1: &Rational,
    c2: &Rational,
    skip: Option<usize>,
) -> Option<Vec<Rational>> {
    let mut lambda = vec![Rational::one(); d.len()];
    let ratio = -c2 / c1;
    if ratio.is_one() {
        return Some(lambda);
    }
    let v = (0..d.len()).find(|&v| Some(v) != skip && d[v].abs() == 1)?;
    lambda[v] = if d[v] == 1 { ratio } else { ratio.recip() };
    Some(lambda)
}

/// Lexicographically smallest `x` with `x_i ∈ [lo_i, hi]` and
/// `Σ coeff_i x_i = rhs`.
fn smallest_solution(coeff: &[i64], lo: &[i64], hi: i64, rhs: i64) -> Option<Vec<i64>> {
    fn reach(coeff: &[i64], lo: &[i64], hi: i64) -> (i64, i64) {
        coeff.iter().zip(lo).fold((0, 0), |(mn, mx), (&c, &l)| {
            let (a, b) = (c * l, c * hi);
            (mn + a.min(b), mx + a.max(b))
        })
    }
    fn go(coeff: &[i64], lo: &[i64], hi: i64, rhs: i64, acc: &mut Vec<i64>) -> bool {
        let Some((&c, rest)) = coeff.split_first() else {
            return rhs == 0;
        };
        let (mn, mx) = reach(rest, &lo[1..], hi);
        for x in lo[0]..=hi {
            let r = rhs - c * x;
            if r < mn || r > mx {
                continue;
            }
            acc.push(x);
            if go(rest, &lo[1..], hi, r, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }
    let mut acc = Vec::with_capacity(coeff.len());
    go(coeff, lo, hi, rhs, &mut acc).then_some(acc)
}

/// Slopes for the free variables: equal ones when possible, otherwise the
/// lexicographically smallest positive solution.
fn solve_slopes(coeff: &[i64], rhs: i64, cap: i64) -> Option<Vec<i64>> {
    let total: i64 = coeff.iter().sum();
    if total != 0 && rhs % total == 0 && rhs / total >= 1 {
        return Some(vec![rhs / total; coeff.len()]);
    }
    smallest_solution(coeff, &vec![1; coeff.len()], cap, rhs)
}

fn solve_offsets(coeff: &[i64], slopes: &[i64], rhs: i64, cap: i64, n_min: i64) -> Option<Vec<i64>> {
    smallest_solution(coeff, &vec![1; coeff.len()], cap, rhs).or_else(|| {
        let lo: Vec<i64> = slopes.iter().map(|k| 1 - k * n_min).collect();
        smallest_solution(coeff, &lo, cap, rhs)
    })
}

/// Monomial arc family on a binomial hypersurface sending the axis variable
/// to `t` and growing the others linearly in `N`.
///
/// Without pins, the variables on the axis's side of the exponent balance
/// share the smallest slope and offset for which the balance is solvable.
pub fn synthesize_binomial_family(
    v: &Variety,
    axis: usize,
    range: (i64, i64),
    pins: &[Pin],
    cap: u32,
) -> Result<ArcFamily> {
    let n = v.nvars();
    if axis >= n {
        return Err(Error::IndexOutOfBounds { index: axis, nvars: n });
    }
    let [(e1, c1), (e2, c2)] = v
        .binomial()
        .ok_or_else(|| Error::NoMonomialSolution("not a binomial hypersurface".into()))?;
    let d: Vec<i64> = e1.iter().zip(&e2).map(|(&a, &b)| a as i64 - b as i64).collect();
    let lambda = binomial_coefficients(&d, &c1, &c2, Some(axis)).ok_or_else(|| {
        Error::NoMonomialSolution("no variable can absorb the coefficient ratio".into())
    })?;
    for p in pins {
        if p.var >= n {
            return Err(Error::IndexOutOfBounds { index: p.var, nvars: n });
        }
        if p.var == axis {
            return Err(Error::Usage("the axis variable cannot be pinned".into()));
        }
    }

    let pinned: Vec<usize> = if pins.is_empty() {
        let side = if d[axis] != 0 { d[axis].signum() } else { -1 };
        (0..n).filter(|&i| i != axis && d[i].signum() == side).collect()
    } else {
        pins.iter().map(|p| p.var).collect()
    };
    let free: Vec<usize> = (0..n)
        .filter(|&i| i != axis && !pinned.contains(&i) && d[i] != 0)
        .collect();
    let free_coeff: Vec<i64> = free.iter().map(|&i| d[i]).collect();
    let cap = i64::from(cap);

    let attempt = |pin_exp: &dyn Fn(usize) -> LinearExponent| -> Option<Vec<LinearExponent>> {
        let mut exps = vec![LinearExponent::new(1, 1); n];
        exps[axis] = LinearExponent::constant(1);
        for &i in &pinned {
            exps[i] = pin_exp(i);
        }
        let slope_rhs: i64 = -pinned.iter().map(|&i| d[i] * exps[i].slope).sum::<i64>();
        let offset_rhs: i64 =
            -pinned.iter().map(|&i| d[i] * exps[i].offset).sum::<i64>() - d[axis];
        if free.is_empty() {
            return (slope_rhs == 0 && offset_rhs == 0).then_some(exps);
        }
        let slopes = solve_slopes(&free_coeff, slope_rhs, cap)?;
        let offsets = solve_offsets(&free_coeff, &slopes, offset_rhs, cap, range.0)?;
        for (j, &i) in free.iter().enumerate() {
            exps[i] = LinearExponent::new(slopes[j], offsets[j]);
        }
        Some(exps)
    };

    let exps = if pins.is_empty() {
        (1..=cap)
            .flat_map(|l| (1..=cap).map(move |c| (l, c)))
            .find_map(|(l, c)| attempt(&|_| LinearExponent::new(l, c)))
    } else {
        attempt(&|i| pins.iter().find(|p| p.var == i).expect("pinned").exponent)
    }
    .ok_or_else(|| {
        Error::NoMonomialSolution(format!("exponent balance has no solution with cap {cap}"))
    })?;

    let images = exps
        .into_iter()
        .zip(lambda)
        .map(|(e, c)| Some(FamilyImage::new(c, e)))
        .collect();
    ArcFamily::new(images, range)
}

/// Reports for every `N` in the family's range, sorted by `N`.
pub fn evaluate_family(
    ctx: &ContactContext,
    name: &str,
    family: &ArcFamily,
) -> Result<FamilyWitness> {
    let (lo, hi) = family.range();
    let mut ns: Vec<i64> = (lo..=hi).collect();
    if let Some(seed) = ctx.settings().seed {
        super::sample::shuffle(&mut ns, seed);
    }
    let mut results: Vec<(i64, Result<FamilyRow>)> = ns
        .par_iter()
        .map(|&n| {
            let row = family.instantiate(n).and_then(|arc| {
                let report = ctx.report(&arc)?;
                Ok(FamilyRow { n, arc, report })
            });
            (n, row)
        })
        .collect();
    // the first failure by N is reported, whatever the evaluation order
    results.sort_by_key(|(n, _)| *n);
    let rows = results
        .into_iter()
        .map(|(_, r)| r)
        .collect::<Result<Vec<_>>>()?;
    Ok(FamilyWitness {
        name: name.to_string(),
        family: family.clone(),
        rows,
    })
}

/// Synthesizes a witness family along a coordinate axis in `Sing` of the
/// closure and checks that `r̄` grows with `N`.
pub fn family_search(
    v: &Variety,
    axis: usize,
    range: (i64, i64),
    pins: &[Pin],
    settings: Settings,
) -> Result<FamilyWitness> {
    let ctx = ContactContext::new(v, settings)?;
    family_search_in(&ctx, axis, range, pins)
}

pub(crate) fn family_search_in(
    ctx: &ContactContext,
    axis: usize,
    range: (i64, i64),
    pins: &[Pin],
) -> Result<FamilyWitness> {
    let v = ctx.variety();
    if axis >= v.nvars() {
        return Err(Error::IndexOutOfBounds {
            index: axis,
            nvars: v.nvars(),
        });
    }
    if !sing_contains_axis(ctx.closure(), axis) {
        return Err(Error::WitnessRejected(format!(
            "the {}-axis is not contained in the singular locus of the closure",
            v.variables()[axis]
        )));
    }
    let family = synthesize_binomial_family(v, axis, range, pins, ctx.settings().cap)?;
    let name = format!("auto_{}", v.variables()[axis]);
    let witness = evaluate_family(ctx, &name, &family)?;
    if !witness.r_bar_increasing() {
        return Err(Error::WitnessRejected(
            "normalized order of contact does not grow along the family".into(),
        ));
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{rat, Polynomial};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn quartic(a: u32, b: u32) -> Variety {
        let n = 4;
        let x = |i| Polynomial::var(n, i);
        let f = x(0).pow(2).mul(&x(1).pow(3)).sub(&x(2).pow(a).mul(&x(3).pow(b)));
        Variety::new(names(&["x", "y", "z", "s"]), vec![f]).unwrap()
    }

    #[test]
    fn pinned_family_matches_the_known_one() {
        let v = quartic(4, 5);
        let pin = Pin {
            var: 3,
            exponent: LinearExponent::new(2, 3),
        };
        let fam = synthesize_binomial_family(&v, 2, (1, 10), &[pin], 12).unwrap();
        let exps: Vec<LinearExponent> =
            fam.images().iter().map(|i| i.as_ref().unwrap().exponent).collect();
        assert_eq!(
            exps,
            vec![
                LinearExponent::new(2, 2),
                LinearExponent::new(2, 5),
                LinearExponent::constant(1),
                LinearExponent::new(2, 3)
            ]
        );
        let w = family_search(&v, 2, (1, 10), &[pin], Settings::default()).unwrap();
        for row in &w.rows {
            assert_eq!(row.report.r_bar, rat(2 * row.n + 2, 1));
        }
    }

    #[test]
    fn automatic_family_grows() {
        let w = family_search(&quartic(4, 5), 2, (1, 6), &[], Settings::default()).unwrap();
        assert!(w.r_bar_increasing());
        assert_eq!(w.rows.len(), 6);
    }

    #[test]
    fn bounded_case_rejects_every_axis() {
        let v = quartic(3, 4);
        for axis in 0..4 {
            let err = family_search(&v, axis, (1, 3), &[], Settings::default()).unwrap_err();
            assert!(matches!(err, Error::WitnessRejected(_)), "{err:?}");
        }
    }

    #[test]
    fn coefficient_ratio_is_absorbed() {
        // x y - 2 z^5: x absorbs the 2
        let d = [1, 1, -5];
        let l = binomial_coefficients(&d, &rat(1, 1), &rat(-2, 1), None).unwrap();
        assert_eq!(l, vec![rat(2, 1), rat(1, 1), rat(1, 1)]);
        assert!(binomial_coefficients(&[2, -2], &rat(1, 1), &rat(-2, 1), None).is_none());
    }

    #[test]
    fn small_linear_solver() {
        assert_eq!(smallest_solution(&[2, 3], &[1, 1], 12, 19), Some(vec![2, 5]));
        assert_eq!(smallest_solution(&[2, 4], &[1, 1], 12, 7), None);
        assert_eq!(solve_slopes(&[2, 3], 10, 12), Some(vec![2, 2]));
    }
}
