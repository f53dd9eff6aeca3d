use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::order::OrderValue;
use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

/// Working precision used when a quotient cannot be represented exactly.
pub const DEFAULT_PRECISION: u32 = 64;

/// Whether a series is known exactly or only up to `t^precision`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesMode {
    Exact,
    /// Coefficients of `t^0 … t^precision` are known; nothing beyond.
    Truncated(u32),
}

/// Univariate series in `t` with rational coefficients and finite support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSeries {
    mode: SeriesMode,
    terms: BTreeMap<u32, Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
    DivUnit,
}

impl FormalSeries {
    pub fn zero() -> Self {
        FormalSeries {
            mode: SeriesMode::Exact,
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(Rational::one(), 0)
    }

    /// `coeff · t^exp`, exact.
    pub fn monomial(coeff: Rational, exp: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        FormalSeries {
            mode: SeriesMode::Exact,
            terms,
        }
    }

    /// `t^exp`.
    pub fn t_pow(exp: u32) -> Self {
        Self::monomial(Rational::one(), exp)
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// Exact series from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn exact<I: IntoIterator<Item = (u32, Rational)>>(terms: I) -> Self {
        let mut s = Self::zero();
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Truncated series; terms above `precision` are dropped.
    pub fn truncated<I: IntoIterator<Item = (u32, Rational)>>(precision: u32, terms: I) -> Self {
        let mut s = Self::exact(terms);
        s.mode = SeriesMode::Truncated(precision);
        s.terms.retain(|&e, _| e <= precision);
        s
    }

    pub fn mode(&self) -> SeriesMode {
        self.mode
    }

    pub fn is_exact(&self) -> bool {
        self.mode == SeriesMode::Exact
    }

    pub fn precision(&self) -> Option<u32> {
        match self.mode {
            SeriesMode::Exact => None,
            SeriesMode::Truncated(p) => Some(p),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: u32) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(0)
    }

    /// No stored coefficients (exact zero, or zero within known precision).
    pub fn has_no_terms(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.is_exact() && self.terms.is_empty()
    }

    /// Least exponent with a nonzero coefficient.
    pub fn order(&self) -> OrderValue {
        match self.terms.keys().next() {
            Some(&e) => OrderValue::finite(Rational::from_integer(e.into())),
            None => match self.mode {
                SeriesMode::Exact => OrderValue::PositiveInfinity,
                SeriesMode::Truncated(p) => OrderValue::AtLeast(u64::from(p) + 1),
            },
        }
    }

    /// Integer valuation lower bound, `None` for exact zero.
    fn valuation_bound(&self) -> Option<u32> {
        match self.terms.keys().next() {
            Some(&e) => Some(e),
            None => match self.mode {
                SeriesMode::Exact => None,
                SeriesMode::Truncated(p) => Some(p + 1),
            },
        }
    }

    /// Single stored term and exact.
    pub fn as_exact_monomial(&self) -> Option<(u32, &Rational)> {
        if self.is_exact() && self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    fn add_term(&mut self, exp: u32, coeff: Rational) {
        if let SeriesMode::Truncated(p) = self.mode {
            if exp > p {
                return;
            }
        }
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn with_mode(mode: SeriesMode) -> Self {
        FormalSeries {
            mode,
            terms: BTreeMap::new(),
        }
    }

    pub fn add(&self, other: &FormalSeries) -> FormalSeries {
        let mode = match (self.precision(), other.precision()) {
            (None, None) => SeriesMode::Exact,
            (Some(p), None) | (None, Some(p)) => SeriesMode::Truncated(p),
            (Some(p), Some(q)) => SeriesMode::Truncated(p.min(q)),
        };
        let mut out = Self::with_mode(mode);
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> FormalSeries {
        FormalSeries {
            mode: self.mode,
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &FormalSeries) -> FormalSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> FormalSeries {
        if c.is_zero() {
            return FormalSeries::with_mode(self.mode);
        }
        FormalSeries {
            mode: self.mode,
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &FormalSeries) -> FormalSeries {
        if self.is_exact_zero() || other.is_exact_zero() {
            return FormalSeries::zero();
        }
        // a = a_known + O(t^{pa+1}) contributes an error of order pa + 1 + v(b)
        let mut precision: Option<u32> = None;
        if let Some(pa) = self.precision() {
            let vb = other.valuation_bound().unwrap_or(0);
            precision = Some(pa + vb);
        }
        if let Some(pb) = other.precision() {
            let va = self.valuation_bound().unwrap_or(0);
            let p = pb + va;
            precision = Some(precision.map_or(p, |q| q.min(p)));
        }
        let mode = precision.map_or(SeriesMode::Exact, SeriesMode::Truncated);
        let mut out = Self::with_mode(mode);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if let Some(p) = precision {
                    if e > p {
                        break;
                    }
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> FormalSeries {
        let mut result = FormalSeries::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Division by a series with nonzero constant term.
    ///
    /// Exact when the divisor is a single constant term; otherwise the
    /// quotient is truncated at `working_precision` (or less, if an operand
    /// is itself truncated).
    pub fn div_unit(&self, divisor: &FormalSeries, working_precision: u32) -> Result<FormalSeries> {
        let b0 = divisor.constant_term();
        if b0.is_zero() {
            return Err(Error::DivisionByNonUnit);
        }
        if divisor.terms.len() == 1 {
            let inv = b0.recip();
            let mut out = self.scale(&inv);
            if let Some(pb) = divisor.precision() {
                let va = self.valuation_bound().unwrap_or(pb);
                let p = out.precision().map_or(pb + va, |q| q.min(pb + va));
                if !self.is_exact_zero() {
                    out.mode = SeriesMode::Truncated(p);
                    out.terms.retain(|&e, _| e <= p);
                }
            }
            return Ok(out);
        }
        if self.is_exact_zero() {
            return Ok(FormalSeries::zero());
        }
        let mut p = working_precision;
        if let Some(pa) = self.precision() {
            p = p.min(pa);
        }
        if let Some(pb) = divisor.precision() {
            p = p.min(pb + self.valuation_bound().unwrap_or(0));
        }
        let inv0 = b0.recip();
        let mut q: Vec<Rational> = Vec::with_capacity(p as usize + 1);
        for k in 0..=p {
            let mut acc = self.coeff(k);
            for (&j, bj) in divisor.terms.range(1..=k.max(1)).filter(|(&j, _)| j <= k) {
                let prev = &q[(k - j) as usize];
                if !prev.is_zero() {
                    acc -= bj * prev;
                }
            }
            q.push(acc * &inv0);
        }
        Ok(FormalSeries::truncated(
            p,
            q.into_iter().enumerate().map(|(e, c)| (e as u32, c)),
        ))
    }

    /// Divides by `t^k`; fails when a known coefficient below `t^k` is nonzero.
    pub fn shift_down(&self, k: u32) -> Result<FormalSeries> {
        if let Some((&e, _)) = self.terms.iter().next() {
            if e < k {
                return Err(Error::InvalidArc(format!(
                    "series of order {e} is not divisible by t^{k}"
                )));
            }
        }
        let mode = match self.mode {
            SeriesMode::Exact => SeriesMode::Exact,
            SeriesMode::Truncated(p) => {
                if p < k {
                    return Err(Error::PrecisionExhausted(format!(
                        "dividing a series known to t^{p} by t^{k}"
                    )));
                }
                SeriesMode::Truncated(p - k)
            }
        };
        Ok(FormalSeries {
            mode,
            terms: self.terms.iter().map(|(e, c)| (e - k, c.clone())).collect(),
        })
    }

    /// General quotient `self / divisor` where `divisor = t^k · unit` and
    /// `self` vanishes to order at least `k`.
    pub fn div(&self, divisor: &FormalSeries, working_precision: u32) -> Result<FormalSeries> {
        let k = match divisor.order() {
            OrderValue::Finite(k) => k.to_integer().try_into().unwrap_or(u32::MAX),
            OrderValue::AtLeast(_) => {
                return Err(Error::PrecisionExhausted(
                    "divisor has no known nonzero coefficient".into(),
                ))
            }
            OrderValue::PositiveInfinity => return Err(Error::DivisionByNonUnit),
        };
        let a = self.shift_down(k)?;
        let b = divisor.shift_down(k)?;
        a.div_unit(&b, working_precision)
    }
}

/// `a op b`; `DivUnit` uses `working_precision` for non-exact quotients.
pub fn series_arith(
    a: &FormalSeries,
    b: &FormalSeries,
    op: SeriesOp,
    working_precision: u32,
) -> Result<FormalSeries> {
    Ok(match op {
        SeriesOp::Add => a.add(b),
        SeriesOp::Sub => a.sub(b),
        SeriesOp::Mul => a.mul(b),
        SeriesOp::DivUnit => a.div_unit(b, working_precision)?,
    })
}

impl fmt::Display for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let coeff = format_rational(c);
            match (coeff.as_str(), e) {
                (_, 0) => f.write_str(&coeff)?,
                ("1", 1) => f.write_str("t")?,
                ("1", _) => write!(f, "t^{e}")?,
                (_, 1) => write!(f, "{coeff}*t")?,
                _ => write!(f, "{coeff}*t^{e}")?,
            }
        }
        if let SeriesMode::Truncated(p) = self.mode {
            write!(f, " + O(t^{})", p + 1)?;
        }
        Ok(())
    }
}
