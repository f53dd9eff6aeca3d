use std::fmt;

use num_traits::Zero;

use super::rational::{format_rational, Rational};

/// An order of vanishing.
///
/// `AtLeast(p)` only arises from truncated series whose known coefficients
/// are all zero; `PositiveInfinity` only from values that are exactly zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderValue {
    Finite(Rational),
    AtLeast(u64),
    PositiveInfinity,
}

impl OrderValue {
    pub fn finite(value: impl Into<Rational>) -> Self {
        OrderValue::Finite(value.into())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, OrderValue::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            OrderValue::Finite(r) => Some(r),
            _ => None,
        }
    }

    /// Known lower bound; `None` stands for `+∞`.
    pub fn lower_bound(&self) -> Option<Rational> {
        match self {
            OrderValue::Finite(r) => Some(r.clone()),
            OrderValue::AtLeast(p) => Some(Rational::from_integer((*p).into())),
            OrderValue::PositiveInfinity => None,
        }
    }

    /// Lower bound divided by a positive weight.
    pub(crate) fn scaled_lower_bound(&self, weight: u32) -> Option<Rational> {
        debug_assert!(weight > 0);
        self.lower_bound()
            .map(|v| v / Rational::from_integer(weight.into()))
    }

    pub fn is_zero_order(&self) -> bool {
        matches!(self, OrderValue::Finite(r) if r.is_zero())
    }
}

impl fmt::Display for OrderValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderValue::Finite(r) => f.write_str(&format_rational(r)),
            OrderValue::AtLeast(p) => write!(f, ">={p}"),
            OrderValue::PositiveInfinity => f.write_str("inf"),
        }
    }
}
