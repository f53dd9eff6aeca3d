//! Weighted Rees algebras `⊕ I_b W^b`, encoded by finitely many generators
//! `f W^b`.

mod closure;
mod elimination;
mod groebner;

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};

pub use closure::diff_closure;
pub use elimination::eliminate_separated;
pub use groebner::{
    groebner_basis, normal_form, s_polynomial, zero_dim_at_origin, GroebnerBasis, ZeroDim,
    DEFAULT_MEMBERSHIP_CAP,
};

use crate::arcs::Arc;
use crate::error::{Error, Result};
use crate::symcore::{grevlex_cmp, OrderValue, Polynomial, Rational};

/// `poly · W^weight`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedGenerator {
    pub poly: Polynomial,
    pub weight: u32,
}

impl WeightedGenerator {
    pub fn new(poly: Polynomial, weight: u32) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::InvalidVariety("zero generator".into()));
        }
        if weight == 0 {
            return Err(Error::InvalidVariety("generator of weight 0".into()));
        }
        Ok(WeightedGenerator { poly, weight })
    }

    /// `ord(f) / b` at the origin.
    pub fn order_at_origin(&self) -> Rational {
        let d = self.poly.min_degree().unwrap_or(0);
        Rational::new(d.into(), self.weight.into())
    }

    /// The bare variable this generator is, if it is exactly `v W`.
    pub fn bare_variable(&self) -> Option<usize> {
        if self.weight != 1 || self.poly.num_terms() != 1 {
            return None;
        }
        let (m, c) = self.poly.leading_term()?;
        match m.pure_power() {
            Some((v, 1)) if c.is_one() => Some(v),
            _ => None,
        }
    }

    fn normalized(&self) -> Self {
        WeightedGenerator {
            poly: self.poly.monic(),
            weight: self.weight,
        }
    }
}

/// Total order used to list generators canonically: weight, order at the
/// origin, then terms in decreasing grevlex order, then coefficients.
pub(crate) fn canonical_cmp(a: &WeightedGenerator, b: &WeightedGenerator) -> Ordering {
    a.weight
        .cmp(&b.weight)
        .then_with(|| a.poly.min_degree().cmp(&b.poly.min_degree()))
        .then_with(|| poly_cmp(&a.poly, &b.poly))
}

fn poly_cmp(a: &Polynomial, b: &Polynomial) -> Ordering {
    let (ta, tb) = (a.sorted_terms(), b.sorted_terms());
    for ((ma, ca), (mb, cb)) in ta.iter().zip(&tb) {
        // larger leading terms first
        let o = grevlex_cmp(mb, ma).then_with(|| ca.cmp(cb));
        if o != Ordering::Equal {
            return o;
        }
    }
    ta.len().cmp(&tb.len())
}

/// A finitely generated weighted algebra over a named polynomial ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAlgebra {
    variables: Vec<String>,
    generators: Vec<WeightedGenerator>,
    closed: bool,
}

impl WeightedAlgebra {
    /// Normalizes every generator to a monic leading coefficient, drops
    /// duplicates, and lists them canonically.
    pub fn new(variables: Vec<String>, generators: Vec<WeightedGenerator>) -> Result<Self> {
        Self::build(variables, generators, false)
    }

    pub(crate) fn build(
        variables: Vec<String>,
        generators: Vec<WeightedGenerator>,
        closed: bool,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidVariety("algebra without generators".into()));
        }
        for g in &generators {
            if g.poly.nvars() != variables.len() {
                return Err(Error::VariableCountMismatch {
                    expected: variables.len(),
                    found: g.poly.nvars(),
                });
            }
        }
        let mut gens: Vec<WeightedGenerator> =
            generators.iter().map(WeightedGenerator::normalized).collect();
        gens.sort_by(canonical_cmp);
        gens.dedup();
        Ok(WeightedAlgebra {
            variables,
            generators: gens,
            closed,
        })
    }

    /// `{f_i W^{b_i}}` for a list of polynomials and weights.
    pub fn from_polynomials(
        variables: Vec<String>,
        polys: &[Polynomial],
        weights: &[u32],
    ) -> Result<Self> {
        let gens = polys
            .iter()
            .zip(weights)
            .map(|(p, &w)| WeightedGenerator::new(p.clone(), w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(variables, gens)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn generators(&self) -> &[WeightedGenerator] {
        &self.generators
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn display(&self) -> AlgebraDisplay<'_> {
        AlgebraDisplay(self)
    }
}

pub struct AlgebraDisplay<'a>(&'a WeightedAlgebra);

impl fmt::Display for AlgebraDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = &self.0.variables;
        f.write_str("{")?;
        for (i, g) in self.0.generators.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let body = g.poly.display(names).to_string();
            let body = if g.poly.num_terms() > 1 {
                format!("({body})")
            } else {
                body
            };
            if g.weight == 1 {
                write!(f, "{body}*W")?;
            } else {
                write!(f, "{body}*W^{}", g.weight)?;
            }
        }
        f.write_str("}")
    }
}

/// The smallest algebra containing both.
pub fn join(g: &WeightedAlgebra, h: &WeightedAlgebra) -> Result<WeightedAlgebra> {
    if g.variables != h.variables {
        return Err(Error::VariableCountMismatch {
            expected: g.nvars(),
            found: h.nvars(),
        });
    }
    let gens = g.generators.iter().chain(&h.generators).cloned().collect();
    WeightedAlgebra::build(g.variables.clone(), gens, g.closed && h.closed)
}

/// `min ord(f)/b` over the generators.
pub fn ord_at_origin(g: &WeightedAlgebra) -> OrderValue {
    g.generators
        .iter()
        .map(WeightedGenerator::order_at_origin)
        .min()
        .map_or(OrderValue::PositiveInfinity, OrderValue::Finite)
}

/// Order of `φ(G)`, with `+∞` when every generator vanishes on the arc.
///
/// `AtLeast` contributions are harmless when a finite value is already no
/// larger; otherwise the minimum is ambiguous.
pub fn contact_order_value(g: &WeightedAlgebra, a: &Arc) -> Result<OrderValue> {
    if a.nvars() != g.nvars() {
        return Err(Error::VariableCountMismatch {
            expected: g.nvars(),
            found: a.nvars(),
        });
    }
    let mut best: Option<Rational> = None;
    let mut floor_unknown: Option<Rational> = None;
    for gen in &g.generators {
        let s = a.apply(&gen.poly)?;
        let o = s.order();
        let Some(v) = o.scaled_lower_bound(gen.weight) else {
            continue;
        };
        if o.is_finite() {
            if best.as_ref().map_or(true, |b| v < *b) {
                best = Some(v);
            }
        } else if floor_unknown.as_ref().map_or(true, |b| v < *b) {
            floor_unknown = Some(v);
        }
    }
    match (best, floor_unknown) {
        (None, None) => Ok(OrderValue::PositiveInfinity),
        (Some(b), None) => Ok(OrderValue::Finite(b)),
        (Some(b), Some(u)) if b <= u => Ok(OrderValue::Finite(b)),
        (_, Some(u)) => Err(Error::PrecisionExhausted(format!(
            "a generator is only known to have order at least {u} along the arc"
        ))),
    }
}

/// `r`: the order of `φ(G)` as a finite rational.
pub fn contact_order(g: &WeightedAlgebra, a: &Arc) -> Result<Rational> {
    match contact_order_value(g, a)? {
        OrderValue::Finite(r) => Ok(r),
        _ => Err(Error::ArcInMaxMult),
    }
}

/// Whether the coordinate axis of `axis` lies in `Sing(G)`: every term of
/// every generator `f W^b` has degree at least `b` in the other variables.
pub fn sing_contains_axis(g: &WeightedAlgebra, axis: usize) -> bool {
    g.generators.iter().all(|gen| {
        gen.poly
            .terms()
            .all(|(m, _)| m.degree_outside(axis) >= gen.weight)
    })
}

/// Generators of weight one, i.e. the ideal `I₁` cutting out `Sing(G)`.
pub fn weight1_ideal(g: &WeightedAlgebra) -> Result<Vec<Polynomial>> {
    if !g.closed {
        return Err(Error::NotClosed);
    }
    Ok(g.generators
        .iter()
        .filter(|gen| gen.weight == 1)
        .map(|gen| gen.poly.clone())
        .collect())
}

/// Rank of the linear parts of the order-one generators of weight one.
pub fn tau_lower_bound(g: &WeightedAlgebra) -> usize {
    let rows: Vec<Vec<Rational>> = g
        .generators
        .iter()
        .filter(|gen| gen.weight == 1 && gen.poly.min_degree() == Some(1))
        .map(|gen| {
            let lin = gen.poly.homogeneous_part(1);
            (0..g.nvars())
                .map(|v| {
                    lin.terms()
                        .find(|(m, _)| m.exponent(v) == 1)
                        .map_or_else(Rational::zero, |(_, c)| c.clone())
                })
                .collect()
        })
        .collect();
    rank(rows)
}

fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][col].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let factor = &rows[i][col] / &pivot;
                for j in col..ncols {
                    let delta = &rows[r][j] * &factor;
                    rows[i][j] -= delta;
                }
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::rat;

    pub(crate) fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn gen(p: Polynomial, w: u32) -> WeightedGenerator {
        WeightedGenerator::new(p, w).unwrap()
    }

    #[test]
    fn join_concatenates_and_dedups() {
        let v = names(&["x", "y"]);
        let a = WeightedAlgebra::new(v.clone(), vec![gen(x(2, 0), 1)]).unwrap();
        let b = WeightedAlgebra::new(v.clone(), vec![gen(x(2, 1), 1)]).unwrap();
        let j = join(&a, &b).unwrap();
        assert_eq!(j.generators().len(), 2);
        assert_eq!(join(&a, &a).unwrap(), a);
    }

    #[test]
    fn orders_at_origin() {
        let v = names(&["z"]);
        let g1 = WeightedAlgebra::new(
            v.clone(),
            vec![gen(x(1, 0).pow(5), 2), gen(x(1, 0).pow(4), 1)],
        )
        .unwrap();
        assert_eq!(ord_at_origin(&g1), OrderValue::finite(rat(5, 2)));
        let v3 = names(&["y", "z", "w"]);
        let g2 = WeightedAlgebra::new(
            v3,
            vec![gen(x(3, 0), 1), gen(x(3, 1).pow(5), 2), gen(x(3, 1).pow(4), 1)],
        )
        .unwrap();
        assert_eq!(ord_at_origin(&g2), OrderValue::finite(rat(1, 1)));
        let g3 = WeightedAlgebra::new(names(&["x"]), vec![gen(x(1, 0).pow(2), 1)]).unwrap();
        assert_eq!(ord_at_origin(&g3), OrderValue::finite(rat(2, 1)));
    }

    #[test]
    fn axis_containment() {
        let g = WeightedAlgebra::new(
            names(&["x", "y", "z"]),
            vec![gen(x(3, 0), 1), gen(x(3, 1), 1)],
        )
        .unwrap();
        assert!(sing_contains_axis(&g, 2));
        assert!(!sing_contains_axis(&g, 0));
    }

    #[test]
    fn tau_examples() {
        let dup = WeightedAlgebra::new(
            names(&["z"]),
            vec![gen(x(1, 0), 1), gen(x(1, 0).scale(&rat(3, 1)), 1)],
        )
        .unwrap();
        assert_eq!(tau_lower_bound(&dup), 1);
        let sq = WeightedAlgebra::new(names(&["z"]), vec![gen(x(1, 0).pow(2), 1)]).unwrap();
        assert_eq!(tau_lower_bound(&sq), 0);
        let lin = WeightedAlgebra::new(
            names(&["x", "y"]),
            vec![gen(x(2, 0).add(&x(2, 1)), 1), gen(x(2, 0).sub(&x(2, 1)), 1)],
        )
        .unwrap();
        assert_eq!(tau_lower_bound(&lin), 2);
    }

    #[test]
    fn weight_one_needs_closure() {
        let g = WeightedAlgebra::new(names(&["x"]), vec![gen(x(1, 0).pow(2), 2)]).unwrap();
        assert!(matches!(weight1_ideal(&g).unwrap_err(), Error::NotClosed));
    }

    #[test]
    fn contact_with_exactly_vanishing_generators() {
        let g = WeightedAlgebra::new(
            names(&["x", "y"]),
            vec![gen(x(2, 0), 1), gen(x(2, 1).pow(3), 2)],
        )
        .unwrap();
        let on_axis = Arc::monomial(&[0, 2]).unwrap();
        assert_eq!(contact_order(&g, &on_axis).unwrap(), rat(3, 1));
        let inside = WeightedAlgebra::new(names(&["x", "y"]), vec![gen(x(2, 0), 1)]).unwrap();
        assert!(matches!(
            contact_order(&inside, &on_axis).unwrap_err(),
            Error::ArcInMaxMult
        ));
    }
}
