use std::collections::HashSet;

use super::{WeightedAlgebra, WeightedGenerator};
use crate::symcore::Polynomial;

/// Saturates `g` under partial derivatives: each `f W^b` contributes
/// `∂^α f · W^{b-|α|}` for every `|α| < b`.
///
/// Generators that are products of at least two lower-weight generators
/// with matching total weight are then discarded, scanning by increasing
/// weight so that the result is a fixpoint.
pub fn diff_closure(g: &WeightedAlgebra) -> WeightedAlgebra {
    let n = g.nvars();
    let mut all = Vec::new();
    for gen in g.generators() {
        let mut frontier = vec![gen.poly.monic()];
        for k in 0..gen.weight {
            for p in &frontier {
                all.push(WeightedGenerator {
                    poly: p.clone(),
                    weight: gen.weight - k,
                });
            }
            if k + 1 == gen.weight {
                break;
            }
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for p in &frontier {
                for v in 0..n {
                    let d = p.partial_derivative(v).expect("index in range");
                    if d.is_zero() {
                        continue;
                    }
                    let d = d.monic();
                    if seen.insert(d.clone()) {
                        next.push(d);
                    }
                }
            }
            frontier = next;
        }
    }
    let saturated = WeightedAlgebra::build(g.variables().to_vec(), all, true)
        .expect("closure keeps the input generators");
    remove_products(saturated)
}

fn remove_products(g: WeightedAlgebra) -> WeightedAlgebra {
    // canonical order lists generators by increasing weight
    let mut kept: Vec<WeightedGenerator> = Vec::new();
    for gen in g.generators() {
        let lower: Vec<&WeightedGenerator> =
            kept.iter().filter(|k| k.weight < gen.weight).collect();
        if !is_product(&gen.poly, gen.weight, &lower, 0, 0) {
            kept.push(gen.clone());
        }
    }
    WeightedAlgebra {
        variables: g.variables,
        generators: kept,
        closed: g.closed,
    }
}

/// Whether `target` (up to a scalar) is a product of `factors + more` of
/// the listed generators, `more ≥ 1`, with weights summing to `weight`.
fn is_product(
    target: &Polynomial,
    weight: u32,
    pool: &[&WeightedGenerator],
    start: usize,
    factors: usize,
) -> bool {
    let Some(target_lm) = target.leading_monomial() else {
        return false;
    };
    for (i, h) in pool.iter().enumerate().skip(start) {
        if h.weight > weight {
            continue;
        }
        let Some(h_lm) = h.poly.leading_monomial() else {
            continue;
        };
        if !h_lm.divides(target_lm) {
            continue;
        }
        if h.weight == weight {
            if factors >= 1 && target.monic() == h.poly {
                return true;
            }
            continue;
        }
        if let Some(q) = target.div_exact(&h.poly) {
            if is_product(&q, weight - h.weight, pool, i, factors + 1) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rees::{ord_at_origin, weight1_ideal};
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

    #[test]
    fn cubic_in_one_variable() {
        let g = algebra(&["x"], vec![(x(1, 0).pow(3), 2)]);
        let c = diff_closure(&g);
        assert_eq!(listed(&c), vec!["x^2 W1", "x^3 W2"]);
        assert!(c.is_closed());
    }

    #[test]
    fn xy_minus_z5() {
        let f = x(3, 0).mul(&x(3, 1)).sub(&x(3, 2).pow(5));
        let c = diff_closure(&algebra(&["x", "y", "z"], vec![(f, 2)]));
        let w1: Vec<String> = weight1_ideal(&c)
            .unwrap()
            .iter()
            .map(|p| p.display(&names(&["x", "y", "z"])).to_string())
            .collect();
        assert_eq!(w1, vec!["x", "y", "z^4"]);
        assert_eq!(c.generators().len(), 4);
        assert_eq!(ord_at_origin(&c), OrderValue::finite(rat(1, 1)));
    }

    #[test]
    fn quartic_weight_one_ideal() {
        // x^2 y^3 - z^4 s^5 with weight 5
        let n = 4;
        let f = x(n, 0)
            .pow(2)
            .mul(&x(n, 1).pow(3))
            .sub(&x(n, 2).pow(4).mul(&x(n, 3).pow(5)));
        let c = diff_closure(&algebra(&["x", "y", "z", "s"], vec![(f, 5)]));
        let vars = names(&["x", "y", "z", "s"]);
        let w1: Vec<String> = weight1_ideal(&c)
            .unwrap()
            .iter()
            .map(|p| p.display(&vars).to_string())
            .collect();
        assert_eq!(w1, vec!["x", "y", "z^4*s", "z^3*s^2", "z^2*s^3", "z*s^4", "s^5"]);
    }

    #[test]
    fn closure_is_a_fixpoint() {
        let n = 4;
        let f = x(n, 0)
            .pow(2)
            .mul(&x(n, 1).pow(3))
            .sub(&x(n, 2).pow(3).mul(&x(n, 3).pow(4)));
        let c = diff_closure(&algebra(&["x", "y", "z", "s"], vec![(f, 5)]));
        assert_eq!(diff_closure(&c), c);
    }

    #[test]
    fn products_are_dropped() {
        // x^2 W^2 = (xW)^2
        let g = algebra(&["x", "y"], vec![(x(2, 0), 1), (x(2, 0).pow(2), 2), (x(2, 1), 1)]);
        let c = diff_closure(&g);
        assert_eq!(listed(&c), vec!["x W1", "y W1"]);
    }
}
