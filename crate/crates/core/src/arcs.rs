//! Arcs through the origin, parametrized arc families, and the varieties
//! they are checked against.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::symcore::{FormalSeries, OrderValue, Polynomial, Rational};

/// A formal arc through the origin: one series in `t` per ambient variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    images: Vec<FormalSeries>,
}

impl Arc {
    /// Fails unless every image has zero constant term and some image is nonzero.
    pub fn new(images: Vec<FormalSeries>) -> Result<Arc> {
        if let Some(i) = images.iter().position(|s| !s.constant_term().is_zero()) {
            return Err(Error::InvalidArc(format!(
                "image of variable {i} has a nonzero constant term"
            )));
        }
        if images.iter().all(FormalSeries::has_no_terms) {
            return Err(Error::InvalidArc("every image is zero".into()));
        }
        Ok(Arc { images })
    }

    /// Monomial arc `x_v ↦ t^{exponents[v]}`; an exponent of zero gives the zero image.
    pub fn monomial(exponents: &[u32]) -> Result<Arc> {
        Self::new(
            exponents
                .iter()
                .map(|&e| {
                    if e == 0 {
                        FormalSeries::zero()
                    } else {
                        FormalSeries::t_pow(e)
                    }
                })
                .collect(),
        )
    }

    /// Monomial arc with coefficients, `x_v ↦ c_v t^{e_v}`.
    pub fn monomial_with_coefficients(terms: &[(Rational, u32)]) -> Result<Arc> {
        Self::new(
            terms
                .iter()
                .map(|(c, e)| FormalSeries::monomial(c.clone(), *e))
                .collect(),
        )
    }

    /// Unchecked constructor for lifted arcs inside the blowup loop, where the
    /// chart variable keeps a nonzero image by construction.
    pub(crate) fn from_images_unchecked(images: Vec<FormalSeries>) -> Arc {
        Arc { images }
    }

    pub fn images(&self) -> &[FormalSeries] {
        &self.images
    }

    pub fn image(&self, var: usize) -> &FormalSeries {
        &self.images[var]
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn is_exact(&self) -> bool {
        self.images.iter().all(FormalSeries::is_exact)
    }

    /// Minimum order over all images.
    pub fn order(&self) -> OrderValue {
        arc_order(self)
    }

    /// Appends the graph coordinate with image exactly `t`.
    pub fn graph(&self) -> Arc {
        graph(self)
    }

    /// Substitutes the arc into `p`.
    pub fn apply(&self, p: &Polynomial) -> Result<FormalSeries> {
        p.substitute(&self.images)
    }

    /// Exponent of each image when the arc is an exact monomial arc.
    pub fn monomial_exponents(&self) -> Option<Vec<u32>> {
        self.images
            .iter()
            .map(|s| {
                if s.is_exact_zero() {
                    Some(0)
                } else {
                    s.as_exact_monomial().map(|(e, _)| e)
                }
            })
            .collect()
    }
}

impl std::fmt::Display for Arc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

pub fn arc_order(a: &Arc) -> OrderValue {
    let mut best: Option<OrderValue> = None;
    for s in &a.images {
        let o = s.order();
        best = Some(match best {
            None => o,
            Some(b) => min_order(b, o),
        });
    }
    best.unwrap_or(OrderValue::PositiveInfinity)
}

fn min_order(a: OrderValue, b: OrderValue) -> OrderValue {
    match (&a, &b) {
        (OrderValue::PositiveInfinity, _) => b,
        (_, OrderValue::PositiveInfinity) => a,
        _ => {
            let (la, lb) = (a.lower_bound().unwrap(), b.lower_bound().unwrap());
            match (a.is_finite(), b.is_finite()) {
                (true, true) => {
                    if la <= lb {
                        a
                    } else {
                        b
                    }
                }
                // a truncated-zero image hides the true minimum unless a known term is lower
                (true, false) => {
                    if la < lb {
                        a
                    } else {
                        b
                    }
                }
                (false, true) => {
                    if lb < la {
                        b
                    } else {
                        a
                    }
                }
                (false, false) => {
                    if la <= lb {
                        a
                    } else {
                        b
                    }
                }
            }
        }
    }
}

/// `Γ₀`: the arc `(φ, t)` in the cylinder over the variety.
pub fn graph(a: &Arc) -> Arc {
    let mut images = a.images.clone();
    images.push(FormalSeries::t_pow(1));
    Arc { images }
}

/// An affine variety through the origin, `V(f_1, …, f_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variety {
    variables: Vec<String>,
    polynomials: Vec<Polynomial>,
    weights: Vec<u32>,
}

impl Variety {
    /// Weights default to the order of each polynomial at the origin.
    pub fn new(variables: Vec<String>, polynomials: Vec<Polynomial>) -> Result<Variety> {
        let weights = polynomials
            .iter()
            .map(|p| p.min_degree().unwrap_or(0))
            .collect();
        Self::with_weights(variables, polynomials, weights)
    }

    pub fn with_weights(
        variables: Vec<String>,
        polynomials: Vec<Polynomial>,
        weights: Vec<u32>,
    ) -> Result<Variety> {
        if polynomials.is_empty() {
            return Err(Error::InvalidVariety("no defining polynomials".into()));
        }
        if weights.len() != polynomials.len() {
            return Err(Error::VariableCountMismatch {
                expected: polynomials.len(),
                found: weights.len(),
            });
        }
        for (i, p) in polynomials.iter().enumerate() {
            if p.nvars() != variables.len() {
                return Err(Error::VariableCountMismatch {
                    expected: variables.len(),
                    found: p.nvars(),
                });
            }
            if p.is_zero() {
                return Err(Error::InvalidVariety(format!("polynomial {i} is zero")));
            }
            if !p.constant_term().is_zero() {
                return Err(Error::InvalidVariety(format!(
                    "polynomial {i} does not vanish at the origin"
                )));
            }
            if weights[i] == 0 {
                return Err(Error::InvalidVariety(format!("polynomial {i} has weight 0")));
            }
        }
        Ok(Variety {
            variables,
            polynomials,
            weights,
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn polynomials(&self) -> &[Polynomial] {
        &self.polynomials
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn is_hypersurface(&self) -> bool {
        self.polynomials.len() == 1
    }

    /// The two terms of a binomial hypersurface.
    pub fn binomial(&self) -> Option<[(Vec<u32>, Rational); 2]> {
        if !self.is_hypersurface() || self.polynomials[0].num_terms() != 2 {
            return None;
        }
        let mut it = self.polynomials[0]
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| (m.exponents().to_vec(), c.clone()));
        Some([it.next()?, it.next()?])
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// Every coefficient up to `t^p` vanishes; nothing is known beyond.
    ValidUpToPrecision(u32),
}

/// Substitutes the arc into every defining polynomial.
pub fn validate_on_variety(a: &Arc, v: &Variety) -> Result<Validity> {
    if a.nvars() != v.nvars() {
        return Err(Error::VariableCountMismatch {
            expected: v.nvars(),
            found: a.nvars(),
        });
    }
    let mut precision: Option<u32> = None;
    for (i, p) in v.polynomials.iter().enumerate() {
        let s = a.apply(p)?;
        if let Some((e, c)) = s.terms().next() {
            return Err(Error::ArcNotOnVariety(format!(
                "polynomial {i} becomes {c}*t^{e} + ..."
            )));
        }
        if let Some(q) = s.precision() {
            precision = Some(precision.map_or(q, |old| old.min(q)));
        }
    }
    Ok(match precision {
        None => Validity::Valid,
        Some(p) => Validity::ValidUpToPrecision(p),
    })
}

/// `a·N + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinearExponent {
    pub slope: i64,
    pub offset: i64,
}

impl LinearExponent {
    pub fn new(slope: i64, offset: i64) -> Self {
        LinearExponent { slope, offset }
    }

    pub fn constant(offset: i64) -> Self {
        LinearExponent { slope: 0, offset }
    }

    pub fn at(&self, n: i64) -> i64 {
        self.slope * n + self.offset
    }
}

impl std::fmt::Display for LinearExponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.slope, self.offset) {
            (0, b) => write!(f, "{b}"),
            (a, 0) => write!(f, "{}N", slope_prefix(a)),
            (a, b) if b < 0 => write!(f, "{}N-{}", slope_prefix(a), -b),
            (a, b) => write!(f, "{}N+{b}", slope_prefix(a)),
        }
    }
}

fn slope_prefix(a: i64) -> String {
    if a == 1 {
        String::new()
    } else {
        format!("{a}*")
    }
}

/// Image `coeff · t^(a·N + b)` of one variable in a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyImage {
    pub coeff: Rational,
    pub exponent: LinearExponent,
}

impl FamilyImage {
    pub fn new(coeff: Rational, exponent: LinearExponent) -> Self {
        FamilyImage { coeff, exponent }
    }

    pub fn power(exponent: LinearExponent) -> Self {
        Self::new(Rational::one(), exponent)
    }
}

/// Monomial arcs indexed by an integer `N` in an inclusive range.
/// Variables without an image map to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcFamily {
    images: Vec<Option<FamilyImage>>,
    range: (i64, i64),
}

impl ArcFamily {
    /// Checks slopes are non-negative and exponents stay positive over the range.
    pub fn new(images: Vec<Option<FamilyImage>>, range: (i64, i64)) -> Result<ArcFamily> {
        let (lo, hi) = range;
        if lo > hi {
            return Err(Error::InvalidArc(format!("empty family range {lo}..{hi}")));
        }
        for (v, img) in images.iter().enumerate() {
            let Some(img) = img else { continue };
            if img.exponent.slope < 0 {
                return Err(Error::InvalidArc(format!(
                    "variable {v} has negative slope {}",
                    img.exponent.slope
                )));
            }
            if img.coeff.is_zero() {
                return Err(Error::InvalidArc(format!("variable {v} has coefficient 0")));
            }
            // linear with non-negative slope: the low end is the minimum
            let e = img.exponent.at(lo);
            if e < 1 {
                return Err(Error::NonPositiveExponent {
                    var: v,
                    n: lo,
                    exponent: e,
                });
            }
        }
        if images.iter().all(Option::is_none) {
            return Err(Error::InvalidArc("every family image is zero".into()));
        }
        Ok(ArcFamily { images, range })
    }

    pub fn images(&self) -> &[Option<FamilyImage>] {
        &self.images
    }

    pub fn range(&self) -> (i64, i64) {
        self.range
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn instantiate(&self, n: i64) -> Result<Arc> {
        instantiate_family(self, n)
    }

    /// Same images over a different range, revalidated.
    pub fn with_range(&self, range: (i64, i64)) -> Result<ArcFamily> {
        ArcFamily::new(self.images.clone(), range)
    }
}

pub fn instantiate_family(f: &ArcFamily, n: i64) -> Result<Arc> {
    let (lo, hi) = f.range;
    if n < lo || n > hi {
        return Err(Error::FamilyOutOfRange { n, lo, hi });
    }
    let mut images = Vec::with_capacity(f.images.len());
    for (v, img) in f.images.iter().enumerate() {
        match img {
            None => images.push(FormalSeries::zero()),
            Some(img) => {
                let e = img.exponent.at(n);
                if e < 1 {
                    return Err(Error::NonPositiveExponent {
                        var: v,
                        n,
                        exponent: e,
                    });
                }
                let e = u32::try_from(e).map_err(|_| {
                    Error::InvalidArc(format!("exponent {e} of variable {v} is too large"))
                })?;
                images.push(FormalSeries::monomial(img.coeff.clone(), e));
            }
        }
    }
    Arc::new(images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::rat;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn xy_minus_z5() -> Variety {
        let n = 3;
        let f = Polynomial::var(n, 0)
            .mul(&Polynomial::var(n, 1))
            .sub(&Polynomial::var(n, 2).pow(5));
        Variety::new(names(&["x", "y", "z"]), vec![f]).unwrap()
    }

    fn quartic_family() -> ArcFamily {
        let p = |a, b| Some(FamilyImage::power(LinearExponent::new(a, b)));
        ArcFamily::new(vec![p(2, 2), p(2, 5), p(0, 1), p(2, 3)], (1, 10)).unwrap()
    }

    #[test]
    fn order_of_example_arcs() {
        let a = Arc::monomial(&[3, 2, 1]).unwrap();
        assert_eq!(arc_order(&a), OrderValue::finite(rat(1, 1)));
        for n in [1, 5, 10] {
            let arc = quartic_family().instantiate(n).unwrap();
            assert_eq!(arc.order(), OrderValue::finite(rat(1, 1)));
        }
        assert_eq!(Arc::monomial(&[2, 2, 2]).unwrap().order(), OrderValue::finite(rat(2, 1)));
    }

    #[test]
    fn validation() {
        let v = xy_minus_z5();
        assert_eq!(
            validate_on_variety(&Arc::monomial(&[3, 2, 1]).unwrap(), &v).unwrap(),
            Validity::Valid
        );
        let err = validate_on_variety(&Arc::monomial(&[1, 1, 1]).unwrap(), &v).unwrap_err();
        assert!(matches!(err, Error::ArcNotOnVariety(_)));
    }

    #[test]
    fn family_instances() {
        let f = quartic_family();
        assert_eq!(f.instantiate(1).unwrap(), Arc::monomial(&[4, 7, 1, 5]).unwrap());
        assert_eq!(f.instantiate(10).unwrap(), Arc::monomial(&[22, 25, 1, 23]).unwrap());
        assert!(matches!(
            f.instantiate(11).unwrap_err(),
            Error::FamilyOutOfRange { n: 11, .. }
        ));
        let flat = ArcFamily::new(
            vec![Some(FamilyImage::power(LinearExponent::constant(1))); 3],
            (1, 3),
        )
        .unwrap();
        assert_eq!(flat.instantiate(2).unwrap(), Arc::monomial(&[1, 1, 1]).unwrap());
        let bad = ArcFamily::new(
            vec![Some(FamilyImage::power(LinearExponent::new(1, -1)))],
            (1, 3),
        );
        assert!(matches!(bad.unwrap_err(), Error::NonPositiveExponent { .. }));
    }

    #[test]
    fn graph_appends_t() {
        let a = Arc::monomial(&[3, 2, 1]).unwrap();
        assert_eq!(graph(&a), Arc::monomial(&[3, 2, 1, 1]).unwrap());
        let b = Arc::monomial(&[5, 5, 2]).unwrap();
        let g = graph(&b);
        assert_eq!(g.nvars(), 4);
        assert_eq!(g.order(), OrderValue::finite(rat(1, 1)));
    }

    #[test]
    fn arc_invariants_enforced() {
        assert!(Arc::monomial(&[0, 0]).is_err());
        let c = Arc::new(vec![FormalSeries::one()]);
        assert!(matches!(c.unwrap_err(), Error::InvalidArc(_)));
    }

    #[test]
    fn linear_exponent_display() {
        assert_eq!(LinearExponent::new(2, 3).to_string(), "2*N+3");
        assert_eq!(LinearExponent::new(1, 0).to_string(), "N");
        assert_eq!(LinearExponent::new(2, -1).to_string(), "2*N-1");
        assert_eq!(LinearExponent::constant(1).to_string(), "1");
    }
}
