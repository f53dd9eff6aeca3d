use super::{WeightedAlgebra, WeightedGenerator};
use crate::error::{Error, Result};
use crate::symcore::{Monomial, Polynomial};

/// Restriction of `g` to the variables not in `drop`, for presentations in
/// which each dropped variable occurs as a bare generator `v W`.
///
/// Generators avoiding the dropped variables are kept. In a generator
/// `h W^b` that mixes both kinds, a term `c · u · m'` (with `u` of degree
/// `δ` in the dropped variables and `m'` in the kept ones) lies in the
/// weight-`b` piece already when `δ` plus the largest weight of a product
/// of kept monomial generators dividing `m'` reaches `b`; such terms are
/// stripped and the rest, if any, is kept as a new generator of weight
/// `b`. Any other term makes the presentation non-separated.
pub fn eliminate_separated(g: &WeightedAlgebra, drop: &[usize]) -> Result<WeightedAlgebra> {
    let n = g.nvars();
    for &v in drop {
        if v >= n {
            return Err(Error::IndexOutOfBounds { index: v, nvars: n });
        }
        if !g.generators().iter().any(|gen| gen.bare_variable() == Some(v)) {
            return Err(Error::ElimNotSeparated(format!(
                "no bare generator {}W",
                g.variables()[v]
            )));
        }
    }
    let is_dropped = |v: usize| drop.contains(&v);
    let touches_dropped =
        |p: &Polynomial| p.terms().any(|(m, _)| drop.iter().any(|&v| m.exponent(v) > 0));

    let kept: Vec<WeightedGenerator> = g
        .generators()
        .iter()
        .filter(|gen| !touches_dropped(&gen.poly))
        .cloned()
        .collect();
    let monomial_gens: Vec<(Monomial, u32)> = kept
        .iter()
        .filter(|gen| gen.poly.num_terms() == 1)
        .filter_map(|gen| gen.poly.leading_monomial().map(|m| (m.clone(), gen.weight)))
        .collect();

    let mut result = kept.clone();
    for gen in g.generators() {
        if !touches_dropped(&gen.poly) {
            continue;
        }
        let mut rest = Polynomial::zero(n);
        for (m, c) in gen.poly.terms() {
            let delta: u32 = (0..n).filter(|&v| is_dropped(v)).map(|v| m.exponent(v)).sum();
            if delta == 0 {
                rest = rest.add(&Polynomial::term(m.clone(), c.clone()));
                continue;
            }
            if delta >= gen.weight {
                continue;
            }
            let mut kept_part = m.clone();
            for &v in drop {
                kept_part.exponents_mut()[v] = 0;
            }
            let need = gen.weight - delta;
            if max_weight_dividing(&kept_part, &monomial_gens, need) < need {
                let names = g.variables();
                return Err(Error::ElimNotSeparated(format!(
                    "generator ({})W^{} mixes eliminated and kept variables",
                    gen.poly.display(names),
                    gen.weight
                )));
            }
        }
        if !rest.is_zero() {
            result.push(WeightedGenerator {
                poly: rest,
                weight: gen.weight,
            });
        }
    }
    if result.is_empty() {
        return Err(Error::ElimNotSeparated(
            "nothing remains after elimination".into(),
        ));
    }
    WeightedAlgebra::build(g.variables().to_vec(), result, g.is_closed())
}

/// Largest total weight of a product of the given monomial generators that
/// divides `m`, capped at `need` since nothing beyond it matters.
fn max_weight_dividing(m: &Monomial, gens: &[(Monomial, u32)], need: u32) -> u32 {
    fn search(m: &Monomial, gens: &[(Monomial, u32)], start: usize, need: u32) -> u32 {
        let mut best = 0;
        for (i, (g, w)) in gens.iter().enumerate().skip(start) {
            if g.is_one() {
                continue;
            }
            if let Some(q) = m.div(g) {
                let got = w + search(&q, gens, i, need.saturating_sub(*w));
                best = best.max(got);
                if best >= need {
                    return best;
                }
            }
        }
        best
    }
    search(m, gens, 0, need)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rees::{diff_closure, ord_at_origin};
    use crate::symcore::{rat, OrderValue};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn algebra(vars: &[&str], gens: Vec<(Polynomial, u32)>) -> WeightedAlgebra {
        WeightedAlgebra::new(
            names(vars),
            gens.into_iter()
                .map(|(p, w)| WeightedGenerator::new(p, w).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn listed(g: &WeightedAlgebra) -> Vec<String> {
        let names = g.variables().to_vec();
        g.generators()
            .iter()
            .map(|gen| format!("{} W{}", gen.poly.display(&names), gen.weight))
            .collect()
    }

    fn xy_z5_closure() -> WeightedAlgebra {
        let f = x(3, 0).mul(&x(3, 1)).sub(&x(3, 2).pow(5));
        diff_closure(&algebra(&["x", "y", "z"], vec![(f, 2)]))
    }

    #[test]
    fn down_to_one_variable() {
        let e = eliminate_separated(&xy_z5_closure(), &[0, 1]).unwrap();
        assert_eq!(listed(&e), vec!["z^4 W1", "z^5 W2"]);
        assert_eq!(ord_at_origin(&e), OrderValue::finite(rat(5, 2)));
    }

    #[test]
    fn down_to_two_variables() {
        let e = eliminate_separated(&xy_z5_closure(), &[0]).unwrap();
        assert_eq!(listed(&e), vec!["y W1", "z^4 W1", "z^5 W2"]);
        assert_eq!(ord_at_origin(&e), OrderValue::finite(rat(1, 1)));
    }

    #[test]
    fn keeps_generators_free_of_dropped_variables() {
        let n = 4;
        let g = algebra(
            &["x", "y", "z", "s"],
            vec![(x(n, 0), 1), (x(n, 1), 1), (x(n, 2).mul(&x(n, 3)), 1)],
        );
        let e = eliminate_separated(&g, &[0]).unwrap();
        assert_eq!(listed(&e), vec!["y W1", "z*s W1"]);
    }

    #[test]
    fn refuses_without_bare_generator() {
        let g = algebra(&["x", "z"], vec![(x(2, 0).pow(2), 2), (x(2, 1), 1)]);
        assert!(matches!(
            eliminate_separated(&g, &[0]).unwrap_err(),
            Error::ElimNotSeparated(_)
        ));
    }

    #[test]
    fn refuses_unstrippable_mixed_term() {
        // in x*z W^2 the factor x supplies weight 1 and nothing in z supplies the other
        let g = algebra(&["x", "z"], vec![(x(2, 0), 1), (x(2, 0).mul(&x(2, 1)), 2)]);
        assert!(matches!(
            eliminate_separated(&g, &[0]).unwrap_err(),
            Error::ElimNotSeparated(_)
        ));
    }
}
