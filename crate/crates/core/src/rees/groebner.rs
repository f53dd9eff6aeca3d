use std::collections::VecDeque;

use num_traits::Zero;

use crate::symcore::{grevlex_cmp, Monomial, Polynomial};

/// Default bound on `a` when searching for `v^a ∈ I`.
pub const DEFAULT_MEMBERSHIP_CAP: u32 = 64;

/// Reduced Gröbner basis under graded reverse-lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    generators: Vec<Polynomial>,
    basis: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        normal_form(p, &self.basis)
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.reduce(p).is_zero()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.basis
            .iter()
            .any(|b| b.leading_monomial().is_some_and(Monomial::is_one))
    }

    /// Every S-polynomial of basis pairs reduces to zero.
    pub fn is_groebner(&self) -> bool {
        for i in 0..self.basis.len() {
            for j in i + 1..self.basis.len() {
                let s = s_polynomial(&self.basis[i], &self.basis[j]);
                if !normal_form(&s, &self.basis).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

pub fn s_polynomial(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let (Some((ma, ca)), Some((mb, cb))) = (a.leading_term(), b.leading_term()) else {
        return Polynomial::zero(a.nvars());
    };
    let l = ma.lcm(mb);
    let fa = l.div(ma).expect("lcm is a multiple");
    let fb = l.div(mb).expect("lcm is a multiple");
    a.mul_term(&fa, &ca.recip()).sub(&b.mul_term(&fb, &cb.recip()))
}

/// Full reduction of `p` modulo `divisors`.
pub fn normal_form(p: &Polynomial, divisors: &[Polynomial]) -> Polynomial {
    let leads: Vec<_> = divisors
        .iter()
        .filter_map(|d| d.leading_term().map(|(m, c)| (m.clone(), c.clone(), d)))
        .collect();
    let mut rest = p.clone();
    let mut remainder = Polynomial::zero(p.nvars());
    while let Some((m, c)) = rest.leading_term() {
        let (m, c) = (m.clone(), c.clone());
        match leads.iter().find(|(lm, _, _)| lm.divides(&m)) {
            Some((lm, lc, d)) => {
                let shift = m.div(lm).expect("checked divisibility");
                rest = rest.sub(&d.mul_term(&shift, &(&c / lc)));
            }
            None => {
                let t = Polynomial::term(m, c);
                remainder = remainder.add(&t);
                rest = rest.sub(&t);
            }
        }
    }
    remainder
}

/// Buchberger's algorithm with the coprime-leading-monomial criterion,
/// followed by interreduction.
pub fn groebner_basis(ideal: &[Polynomial]) -> GroebnerBasis {
    let mut basis: Vec<Polynomial> = ideal
        .iter()
        .filter(|p| !p.is_zero())
        .map(Polynomial::monic)
        .collect();
    let mut pairs: VecDeque<(usize, usize)> = VecDeque::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push_back((i, j));
        }
    }
    while let Some((i, j)) = pairs.pop_front() {
        let (li, lj) = (
            basis[i].leading_monomial().expect("nonzero"),
            basis[j].leading_monomial().expect("nonzero"),
        );
        if li.is_coprime(lj) {
            continue;
        }
        let s = normal_form(&s_polynomial(&basis[i], &basis[j]), &basis);
        if s.is_zero() {
            continue;
        }
        basis.push(s.monic());
        let k = basis.len() - 1;
        for i in 0..k {
            pairs.push_back((i, k));
        }
    }
    GroebnerBasis {
        generators: ideal.to_vec(),
        basis: interreduce(basis),
    }
}

fn interreduce(mut basis: Vec<Polynomial>) -> Vec<Polynomial> {
    basis.sort_by(|a, b| {
        grevlex_cmp(
            a.leading_monomial().expect("nonzero"),
            b.leading_monomial().expect("nonzero"),
        )
    });
    // minimal: drop elements whose leading monomial is divisible by an earlier one
    let mut minimal: Vec<Polynomial> = Vec::new();
    for p in basis {
        let lm = p.leading_monomial().expect("nonzero").clone();
        if !minimal
            .iter()
            .any(|q| q.leading_monomial().expect("nonzero").divides(&lm))
        {
            minimal.push(p);
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Polynomial> = minimal
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| q.clone())
            .collect();
        // the leading term survives, since no other leading monomial divides it
        let r = normal_form(&minimal[i], &others).monic();
        reduced.push(r);
    }
    reduced
}

/// Outcome of the dimension test for `V(I)` at the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZeroDim {
    /// `V(I)` is finite and `v^{exponents[v]} ∈ I` minimally for each `v`;
    /// `q` is the largest of these exponents.
    Isolated { q: u32, exponents: Vec<u32> },
    /// The coordinate axis of `axis` lies in `V(I)`.
    PositiveDimensional { axis: usize },
    Unknown(String),
}

/// Decides whether the origin is an isolated point of `V(ideal)`.
pub fn zero_dim_at_origin(ideal: &[Polynomial], membership_cap: u32) -> ZeroDim {
    let Some(nvars) = ideal.first().map(Polynomial::nvars) else {
        return ZeroDim::Unknown("empty ideal".into());
    };
    if ideal.iter().any(|p| !p.constant_term().is_zero()) {
        return ZeroDim::Unknown("some generator does not vanish at the origin".into());
    }
    let gb = groebner_basis(ideal);
    if gb.is_unit_ideal() {
        return ZeroDim::Unknown("unit ideal".into());
    }
    let has_pure_power = |v: usize| {
        gb.basis().iter().any(|b| {
            b.leading_monomial()
                .and_then(Monomial::pure_power)
                .is_some_and(|(w, _)| w == v)
        })
    };
    if (0..nvars).all(has_pure_power) {
        let mut exponents = Vec::with_capacity(nvars);
        for v in 0..nvars {
            let found = (1..=membership_cap).find(|&a| {
                gb.contains(&Polynomial::term(
                    Monomial::var_power(nvars, v, a),
                    crate::symcore::rat(1, 1),
                ))
            });
            match found {
                Some(a) => exponents.push(a),
                None => {
                    return ZeroDim::Unknown(format!(
                        "no power of variable {v} up to {membership_cap} lies in the ideal"
                    ))
                }
            }
        }
        let q = exponents.iter().copied().max().unwrap_or(0);
        return ZeroDim::Isolated { q, exponents };
    }
    let axis = (0..nvars).find(|&v| {
        ideal.iter().all(|p| {
            p.terms()
                .all(|(m, _)| m.degree_outside(v) > 0)
        })
    });
    match axis {
        Some(axis) => ZeroDim::PositiveDimensional { axis },
        None => ZeroDim::Unknown("no coordinate axis lies in the zero set".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(e: &[u32]) -> Polynomial {
        Polynomial::term(Monomial::new(e.to_vec()), crate::symcore::rat(1, 1))
    }

    #[test]
    fn linear_ideal_is_isolated() {
        let ideal = [mono(&[1, 0]), mono(&[0, 1])];
        assert_eq!(
            zero_dim_at_origin(&ideal, DEFAULT_MEMBERSHIP_CAP),
            ZeroDim::Isolated {
                q: 1,
                exponents: vec![1, 1]
            }
        );
    }

    #[test]
    fn bounded_quartic_weight_one_ideal() {
        // x, y, z^3, z^2 s, z s^2, s^3
        let ideal = [
            mono(&[1, 0, 0, 0]),
            mono(&[0, 1, 0, 0]),
            mono(&[0, 0, 3, 0]),
            mono(&[0, 0, 2, 1]),
            mono(&[0, 0, 1, 2]),
            mono(&[0, 0, 0, 3]),
        ];
        assert_eq!(
            zero_dim_at_origin(&ideal, DEFAULT_MEMBERSHIP_CAP),
            ZeroDim::Isolated {
                q: 3,
                exponents: vec![1, 1, 3, 3]
            }
        );
    }

    #[test]
    fn unbounded_quartic_weight_one_ideal() {
        let mut ideal = vec![mono(&[1, 0, 0, 0]), mono(&[0, 1, 0, 0])];
        for k in 0..5 {
            ideal.push(mono(&[0, 0, 4 - k, 1 + k]));
        }
        assert_eq!(
            zero_dim_at_origin(&ideal, DEFAULT_MEMBERSHIP_CAP),
            ZeroDim::PositiveDimensional { axis: 2 }
        );
    }

    #[test]
    fn binomial_ideal_basis() {
        // (x^2 - y, x y - 1) contains y^2 - x after reduction
        let n = 2;
        let x = Polynomial::var(n, 0);
        let y = Polynomial::var(n, 1);
        let one = Polynomial::one(n);
        let gb = groebner_basis(&[x.pow(2).sub(&y), x.mul(&y).sub(&one)]);
        assert!(gb.is_groebner());
        assert!(gb.contains(&y.pow(2).sub(&x)));
        assert!(!gb.contains(&x));
    }

    #[test]
    fn membership_cap_gives_unknown() {
        let ideal = [mono(&[5])];
        assert!(matches!(zero_dim_at_origin(&ideal, 3), ZeroDim::Unknown(_)));
    }

    #[test]
    fn translated_point_gives_unknown() {
        // V(x (x - 1)) = {0, 1} is finite but x^a is never in the ideal
        let x = Polynomial::var(1, 0);
        let p = x.mul(&x.sub(&Polynomial::one(1)));
        assert!(matches!(zero_dim_at_origin(&[p], 8), ZeroDim::Unknown(_)));
    }
}
