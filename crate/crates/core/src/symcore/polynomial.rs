use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::monomial::{grevlex_cmp, Monomial};
use super::order::OrderValue;
use super::rational::{format_rational, Rational};
use super::series::FormalSeries;
use crate::error::{Error, Result};

/// Sparse polynomial over ℚ in a fixed number of variables.
///
/// No stored coefficient is ever zero, so structural equality is
/// mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

/// `a op b`, failing when the variable counts differ.
pub fn poly_arith(a: &Polynomial, b: &Polynomial, op: PolyOp) -> Result<Polynomial> {
    a.check_same(b)?;
    Ok(match op {
        PolyOp::Add => a.add(b),
        PolyOp::Sub => a.sub(b),
        PolyOp::Mul => a.mul(b),
    })
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(m.nvars());
        p.add_term(m, c);
        p
    }

    /// The variable `x_index`.
    pub fn var(nvars: usize, index: usize) -> Self {
        Self::term(Monomial::var_power(nvars, index, 1), Rational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial length must match variable count");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Terms sorted by decreasing graded reverse-lexicographic order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grevlex_cmp(b.0, a.0));
        v
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| grevlex_cmp(a.0, b.0))
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.leading_term().map(|(m, _)| m)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_same(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableCountMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    fn check_index(&self, var: usize) -> Result<()> {
        if var >= self.nvars {
            return Err(Error::IndexOutOfBounds {
                index: var,
                nvars: self.nvars,
            });
        }
        Ok(())
    }

    /// Panics on a variable-count mismatch; see [`poly_arith`] for the checked form.
    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Scales so the grevlex-leading coefficient is one; zero stays zero.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// Formal partial derivative with respect to `x_var`.
    pub fn partial_derivative(&self, var: usize) -> Result<Polynomial> {
        self.check_index(var)?;
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.exponents_mut()[var] = e - 1;
            out.add_term(m2, c * Rational::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    /// Minimum total degree over terms; `+∞` for the zero polynomial.
    pub fn order_at_origin(&self) -> OrderValue {
        match self.min_degree() {
            Some(d) => OrderValue::finite(Rational::from_integer(d.into())),
            None => OrderValue::PositiveInfinity,
        }
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Homogeneous part of the given total degree.
    pub fn homogeneous_part(&self, degree: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Variables occurring in some term.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&v| self.terms.keys().any(|m| m.exponent(v) > 0))
            .collect()
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(var) > 0)
    }

    /// `p(x + point)`: every variable `x_v` replaced by `x_v + point[v]`.
    pub fn translate(&self, point: &[Rational]) -> Result<Polynomial> {
        if point.len() != self.nvars {
            return Err(Error::VariableCountMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        if point.iter().all(Zero::is_zero) {
            return Ok(self.clone());
        }
        // binomial expansion per variable, memoized on (var, exponent)
        let mut cache: HashMap<(usize, u32), Polynomial> = HashMap::new();
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut acc = Polynomial::constant(self.nvars, c.clone());
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let factor = cache
                    .entry((v, e))
                    .or_insert_with(|| {
                        let shifted = Polynomial::var(self.nvars, v)
                            .add(&Polynomial::constant(self.nvars, point[v].clone()));
                        shifted.pow(e)
                    })
                    .clone();
                acc = acc.mul(&factor);
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Substitutes a series for every variable.
    pub fn substitute(&self, images: &[FormalSeries]) -> Result<FormalSeries> {
        if images.len() != self.nvars {
            return Err(Error::VariableCountMismatch {
                expected: self.nvars,
                found: images.len(),
            });
        }
        let mut powers: HashMap<(usize, u32), FormalSeries> = HashMap::new();
        let mut total = FormalSeries::zero();
        for (m, c) in &self.terms {
            let mut acc = FormalSeries::constant(c.clone());
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = powers
                    .entry((v, e))
                    .or_insert_with(|| images[v].pow(e));
                acc = acc.mul(pw);
            }
            total = total.add(&acc);
        }
        Ok(total)
    }

    /// Evaluates at a rational point.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(Error::VariableCountMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut sum = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    term *= num_traits::pow(point[v].clone(), e as usize);
                }
            }
            sum += term;
        }
        Ok(sum)
    }

    /// Same polynomial viewed in `nvars + extra` variables.
    pub fn with_extra_vars(&self, extra: usize) -> Polynomial {
        Polynomial {
            nvars: self.nvars + extra,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.with_appended(extra), c.clone()))
                .collect(),
        }
    }

    /// Blowup chart substitution `x_j -> x_chart · x_j` for all `j != chart`.
    pub fn chart_substitution(&self, chart: usize) -> Result<Polynomial> {
        self.check_index(chart)?;
        let terms = self.terms.iter().map(|(m, c)| {
            let mut m2 = m.clone();
            let other = m.degree_outside(chart);
            m2.exponents_mut()[chart] += other;
            (m2, c.clone())
        });
        Ok(Polynomial::from_terms(self.nvars, terms))
    }

    /// `self / x_var^k` if every term is divisible.
    pub fn divide_by_var_power(&self, var: usize, k: u32) -> Option<Polynomial> {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.exponent(var) < k {
                return None;
            }
            let mut m2 = m.clone();
            m2.exponents_mut()[var] -= k;
            out.add_term(m2, c.clone());
        }
        Some(out)
    }

    /// Multivariate division by a single divisor under grevlex; `Some(q)` iff
    /// `self = q · divisor` exactly.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let (lm, lc) = divisor.leading_term()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.nvars);
        while let Some((m, c)) = rem.leading_term() {
            let shift = m.div(&lm)?;
            let factor = c / &lc;
            rem = rem.sub(&divisor.mul_term(&shift, &factor));
            quot.add_term(shift, factor);
        }
        Some(quot)
    }

    /// Coefficients as integers after clearing denominators (content ignored).
    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolynomialDisplay<'a> {
        PolynomialDisplay { poly: self, names }
    }
}

/// Renders a polynomial with variable names, terms in decreasing grevlex
/// order, `*` between factors.
pub struct PolynomialDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolynomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.poly.sorted_terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (v, &e) in m.exponents().iter().enumerate() {
                let name = self
                    .names
                    .get(v)
                    .cloned()
                    .unwrap_or_else(|| format!("x{v}"));
                match e {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            if factors.is_empty() {
                f.write_str(&format_rational(&abs))?;
            } else {
                if !abs.is_one() {
                    write!(f, "{}*", format_rational(&abs))?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::rat;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn ring_arithmetic_examples() {
        let (px, py) = (x(2, 0), x(2, 1));
        let xy = px.mul(&py);
        assert!(poly_arith(&xy, &xy.neg(), PolyOp::Add).unwrap().is_zero());
        let lhs = px.add(&py).mul(&px.sub(&py));
        let rhs = px.pow(2).sub(&py.pow(2));
        assert_eq!(lhs, rhs);
        let bad = poly_arith(&px, &x(3, 0), PolyOp::Mul).unwrap_err();
        assert!(matches!(bad, Error::VariableCountMismatch { .. }));
    }

    #[test]
    fn derivatives() {
        // x^2 y^3 - z^4 s^5 in (x, y, z, s)
        let n = 4;
        let f = x(n, 0).pow(2).mul(&x(n, 1).pow(3)).sub(&x(n, 2).pow(4).mul(&x(n, 3).pow(5)));
        let dx = f.partial_derivative(0).unwrap();
        assert_eq!(
            dx,
            x(n, 0).mul(&x(n, 1).pow(3)).scale(&rat(2, 1))
        );
        let g = x(3, 0).mul(&x(3, 1)).sub(&x(3, 2).pow(5));
        assert_eq!(g.partial_derivative(2).unwrap(), x(3, 2).pow(4).scale(&rat(-5, 1)));
        let h = x(n, 0).pow(2).mul(&x(n, 1).pow(3));
        assert!(h.partial_derivative(3).unwrap().is_zero());
        assert!(h.partial_derivative(4).is_err());
    }

    #[test]
    fn orders_at_origin() {
        let n = 4;
        let f = x(n, 0).pow(2).mul(&x(n, 1).pow(3)).sub(&x(n, 2).pow(4).mul(&x(n, 3).pow(5)));
        assert_eq!(f.order_at_origin(), OrderValue::finite(rat(5, 1)));
        let g = x(3, 0).mul(&x(3, 1)).sub(&x(3, 2).pow(5));
        assert_eq!(g.order_at_origin(), OrderValue::finite(rat(2, 1)));
        assert_eq!(Polynomial::zero(3).order_at_origin(), OrderValue::PositiveInfinity);
    }

    #[test]
    fn translation() {
        let p = x(3, 0).pow(2);
        assert_eq!(p.translate(&[rat(0, 1), rat(0, 1), rat(0, 1)]).unwrap(), p);
        // x - 1 at x = 1 becomes x
        let q = x(1, 0).sub(&Polynomial::one(1));
        assert_eq!(q.translate(&[rat(1, 1)]).unwrap(), x(1, 0));
        // second blowup chart of the xy - z^5 example: x*y - z moved to y = 1
        let r = x(3, 0).mul(&x(3, 1)).sub(&x(3, 2));
        let moved = r.translate(&[rat(0, 1), rat(1, 1), rat(0, 1)]).unwrap();
        let expected = x(3, 0).mul(&x(3, 1).add(&Polynomial::one(3))).sub(&x(3, 2));
        assert_eq!(moved, expected);
        assert_eq!(moved.order_at_origin(), OrderValue::finite(rat(1, 1)));
    }

    #[test]
    fn display_is_grevlex_sorted() {
        let n = 4;
        let f = x(n, 2).pow(4).mul(&x(n, 3).pow(5)).neg().add(&x(n, 0).pow(2).mul(&x(n, 1).pow(3)));
        assert_eq!(
            f.display(&names(&["x", "y", "z", "s"])).to_string(),
            "-z^4*s^5 + x^2*y^3"
        );
        let g = x(2, 0).scale(&rat(3, 2)).sub(&Polynomial::one(2));
        assert_eq!(g.display(&names(&["x", "y"])).to_string(), "3/2*x - 1");
    }

    #[test]
    fn exact_division() {
        let n = 2;
        let a = x(n, 0).add(&x(n, 1));
        let b = x(n, 0).sub(&x(n, 1));
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.add(&Polynomial::one(n)).div_exact(&a), None);
    }

    #[test]
    fn chart_and_strict_transform() {
        // xy - z^5 in chart z: x = z x', y = z y' gives z^2 (x'y' - z^3)
        let f = x(3, 0).mul(&x(3, 1)).sub(&x(3, 2).pow(5));
        let sub = f.chart_substitution(2).unwrap();
        let strict = sub.divide_by_var_power(2, 2).unwrap();
        assert_eq!(strict, x(3, 0).mul(&x(3, 1)).sub(&x(3, 2).pow(3)));
        assert!(sub.divide_by_var_power(2, 3).is_none());
    }

    #[test]
    fn substitution_into_arc() {
        let f = x(3, 0).mul(&x(3, 1)).sub(&x(3, 2).pow(5));
        let arc = [FormalSeries::t_pow(3), FormalSeries::t_pow(2), FormalSeries::t_pow(1)];
        assert!(f.substitute(&arc).unwrap().is_exact_zero());
        let off = [FormalSeries::t_pow(1), FormalSeries::t_pow(1), FormalSeries::t_pow(1)];
        let s = f.substitute(&off).unwrap();
        assert_eq!(s.order(), OrderValue::finite(rat(2, 1)));
    }
}
