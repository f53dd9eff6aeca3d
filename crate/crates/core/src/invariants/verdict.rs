use super::family::{evaluate_family, family_search_in, FamilyWitness};
use super::sample::{phi_sample, PhiSample};
use super::{ContactContext, Settings};
use crate::arcs::{ArcFamily, Variety};
use crate::rees::{
    eliminate_separated, ord_at_origin, sing_contains_axis, tau_lower_bound, weight1_ideal,
    zero_dim_at_origin, WeightedAlgebra, ZeroDim,
};
use crate::symcore::{OrderValue, Rational};

/// Range of `N` used when a witness family is synthesized automatically.
pub const DEFAULT_FAMILY_RANGE: (i64, i64) = (1, 10);

/// The order of the one-variable eliminated algebra when the linear part of
/// `I₁` has full rank `n - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharpBound {
    pub tau: usize,
    pub kept: usize,
    pub eliminated: WeightedAlgebra,
    pub bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsolatedEvidence {
    pub q: u32,
    /// Least `a_v` with `v^{a_v} ∈ I₁`.
    pub exponents: Vec<u32>,
    pub tau: usize,
    pub sharp: Option<SharpBound>,
    pub sample: Option<PhiSample>,
}

impl IsolatedEvidence {
    /// Sampled arcs with `r̄ > Q`; the verdict predicts none.
    pub fn violations(&self) -> usize {
        let q = Rational::from_integer(self.q.into());
        self.sample.as_ref().map_or(0, |s| s.count_above(&q))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotIsolatedEvidence {
    pub axis: usize,
    pub witness: Option<FamilyWitness>,
    /// Why no witness family is attached.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsolatedVerdict {
    Isolated(IsolatedEvidence),
    NotIsolated(NotIsolatedEvidence),
    Unknown(String),
}

impl IsolatedVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            IsolatedVerdict::Isolated(_) => "ISOLATED",
            IsolatedVerdict::NotIsolated(_) => "NOT_ISOLATED",
            IsolatedVerdict::Unknown(_) => "UNKNOWN",
        }
    }
}

/// Eliminates down to one variable along the bare generators, when `τ`
/// reaches `n - 1`.
pub fn sharp_bound(closure: &WeightedAlgebra) -> Option<SharpBound> {
    let n = closure.nvars();
    let tau = tau_lower_bound(closure);
    if n == 0 || tau != n - 1 {
        return None;
    }
    let mut drop: Vec<usize> = closure
        .generators()
        .iter()
        .filter_map(|g| g.bare_variable())
        .collect();
    drop.sort_unstable();
    drop.dedup();
    if drop.len() != n - 1 {
        return None;
    }
    let kept = (0..n).find(|v| !drop.contains(v))?;
    let eliminated = eliminate_separated(closure, &drop).ok()?;
    match ord_at_origin(&eliminated) {
        OrderValue::Finite(bound) => Some(SharpBound {
            tau,
            kept,
            eliminated,
            bound,
        }),
        _ => None,
    }
}

/// Whether the origin is an isolated point of the maximum multiplicity
/// locus, decided from `I₁` of the closure and backed by arc evidence.
///
/// `families` are tried in order as witnesses in the non-isolated case;
/// when none is given and the variety is a binomial hypersurface, one is
/// synthesized along the axis.
pub fn isolated_verdict(
    v: &Variety,
    families: &[(String, ArcFamily)],
    settings: Settings,
) -> IsolatedVerdict {
    if v.weights().iter().all(|&w| w < 2) {
        return IsolatedVerdict::Unknown(
            "origin not in Max mult of a singular variety".into(),
        );
    }
    let ctx = match ContactContext::new(v, settings) {
        Ok(ctx) => ctx,
        Err(e) => return IsolatedVerdict::Unknown(e.to_string()),
    };
    let ideal = match weight1_ideal(ctx.closure()) {
        Ok(i) if !i.is_empty() => i,
        Ok(_) => return IsolatedVerdict::Unknown("the closure has no weight-one generators".into()),
        Err(e) => return IsolatedVerdict::Unknown(e.to_string()),
    };
    match zero_dim_at_origin(&ideal, settings.membership_cap) {
        ZeroDim::Isolated { q, exponents } => {
            let sample = if v.binomial().is_some() {
                phi_sample(&ctx, settings.cap).ok()
            } else {
                None
            };
            IsolatedVerdict::Isolated(IsolatedEvidence {
                q,
                exponents,
                tau: tau_lower_bound(ctx.closure()),
                sharp: sharp_bound(ctx.closure()),
                sample,
            })
        }
        ZeroDim::PositiveDimensional { axis } => {
            if !sing_contains_axis(ctx.closure(), axis) {
                return IsolatedVerdict::Unknown(format!(
                    "the {}-axis lies in V(I1) but not in the singular locus of the closure",
                    v.variables()[axis]
                ));
            }
            let mut note = None;
            let mut witness = None;
            for (name, fam) in families {
                match evaluate_family(&ctx, name, fam) {
                    Ok(w) if w.r_bar_increasing() => {
                        witness = Some(w);
                        break;
                    }
                    Ok(_) => note = Some(format!("family {name} does not grow")),
                    Err(e) => note = Some(format!("family {name}: {e}")),
                }
            }
            if witness.is_none() && families.is_empty() {
                match family_search_in(&ctx, axis, DEFAULT_FAMILY_RANGE, &[]) {
                    Ok(w) => witness = Some(w),
                    Err(e) => note = Some(e.to_string()),
                }
            }
            if witness.is_some() {
                note = None;
            }
            IsolatedVerdict::NotIsolated(NotIsolatedEvidence {
                axis,
                witness,
                note,
            })
        }
        ZeroDim::Unknown(reason) => IsolatedVerdict::Unknown(reason),
    }
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
    fn bounded_example() {
        match isolated_verdict(&quartic(3, 4), &[], Settings::default()) {
            IsolatedVerdict::Isolated(e) => {
                assert_eq!(e.q, 3);
                assert_eq!(e.exponents, vec![1, 1, 3, 3]);
                assert_eq!(e.violations(), 0);
                assert!(e.sample.unwrap().max_observed().unwrap() <= &rat(3, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_example() {
        match isolated_verdict(&quartic(4, 5), &[], Settings::default()) {
            IsolatedVerdict::NotIsolated(e) => {
                assert_eq!(e.axis, 2);
                assert!(e.witness.unwrap().r_bar_increasing());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn smooth_hyperplane_is_unknown() {
        let v = Variety::new(names(&["x"]), vec![Polynomial::var(1, 0)]).unwrap();
        assert_eq!(
            isolated_verdict(&v, &[], Settings::default()),
            IsolatedVerdict::Unknown("origin not in Max mult of a singular variety".into())
        );
    }

    #[test]
    fn curve_has_sharp_bound() {
        let n = 3;
        let f = Polynomial::var(n, 0)
            .mul(&Polynomial::var(n, 1))
            .sub(&Polynomial::var(n, 2).pow(5));
        let v = Variety::new(names(&["x", "y", "z"]), vec![f]).unwrap();
        match isolated_verdict(&v, &[], Settings::default()) {
            IsolatedVerdict::Isolated(e) => {
                let sharp = e.sharp.unwrap();
                assert_eq!(sharp.tau, 2);
                assert_eq!(sharp.bound, rat(5, 2));
                assert_eq!(e.sample.unwrap().max_observed(), Some(&rat(5, 2)));
            }
            other => panic!("{other:?}"),
        }
    }
}
