//! The invariants built from orders of contact: `r`, `r̄`, `ρ`, `ρ̄`, the
//! isolated-point verdict, witness families and samples of `Φ`.

mod family;
mod sample;
mod verdict;

use itertools::Itertools;
use num_traits::ToPrimitive;

pub use family::{
    binomial_coefficients, evaluate_family, family_search, strictly_increasing,
    synthesize_binomial_family, FamilyRow, FamilyWitness, Pin,
};
pub(crate) use family::family_search_in;
pub use sample::{phi_sample, phi_sample_arcs, PhiEntry, PhiSample};
pub use verdict::{
    isolated_verdict, sharp_bound, IsolatedEvidence, DEFAULT_FAMILY_RANGE, IsolatedVerdict, NotIsolatedEvidence,
    SharpBound,
};

use crate::arcs::{validate_on_variety, Arc, Variety};
use crate::error::{Error, Result};
use crate::nash::{chart_independence, nash_sequence, NashOptions, NashTrace, Termination};
use crate::rees::{
    contact_order, contact_order_value, diff_closure, eliminate_separated, DEFAULT_MEMBERSHIP_CAP,
    WeightedAlgebra,
};
use crate::symcore::{rational_floor, OrderValue, Rational, DEFAULT_PRECISION};

/// Knobs shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    /// Working precision for truncated series.
    pub precision: u32,
    /// Exponent cap for monomial-arc enumeration and family solving.
    pub cap: u32,
    pub max_steps: usize,
    /// Largest `a` tried when testing `v^a ∈ I₁`.
    pub membership_cap: u32,
    /// Largest number of arcs evaluated by one sample.
    pub count_cap: usize,
    /// Only shuffles evaluation order; results are sorted before output.
    pub seed: Option<u64>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            precision: DEFAULT_PRECISION,
            cap: 12,
            max_steps: 256,
            membership_cap: DEFAULT_MEMBERSHIP_CAP,
            count_cap: 1_000_000,
            seed: None,
        }
    }
}

impl Settings {
    pub fn nash_options(&self) -> NashOptions {
        NashOptions {
            max_steps: self.max_steps,
            stop_at_first_drop: true,
            precision: self.precision,
        }
    }
}

/// Where `ρ` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoSource {
    /// Counted along the Nash multiplicity sequence.
    Blowup,
    /// Taken as `⌊r⌋` because the variety is not a hypersurface.
    Algebraic,
}

impl RhoSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            RhoSource::Blowup => "blowup",
            RhoSource::Algebraic => "algebraic",
        }
    }
}

/// Comparison of `r` with the order of the eliminated algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationCheck {
    pub dropped: Vec<usize>,
    /// Order along the arc of the eliminated algebra; `None` is `+∞`.
    pub r_elim: Option<Rational>,
    /// Least order of the arc's image of a dropped variable; `None` is `+∞`.
    pub min_dropped_order: Option<Rational>,
    /// `r = min(min_dropped_order, r_elim)`, which separated elimination forces.
    pub identity_holds: bool,
    /// Every dropped variable vanishes along the arc at least to order `r_elim`.
    pub applies: bool,
    /// `r = r_elim`.
    pub holds: bool,
}

impl EliminationCheck {
    /// False only when the check applies and still fails.
    pub fn consistent(&self) -> bool {
        self.identity_holds && (!self.applies || self.holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactReport {
    pub ord_phi: u32,
    pub r: Rational,
    pub r_bar: Rational,
    pub rho: u32,
    pub rho_source: RhoSource,
    pub rho_bar: Rational,
    pub floor_r: u32,
    pub elimination: Option<EliminationCheck>,
}

/// Variety together with its differential closure and eliminated algebra,
/// computed once and reused across arcs.
#[derive(Debug, Clone)]
pub struct ContactContext {
    variety: Variety,
    closure: WeightedAlgebra,
    elimination: Option<(Vec<usize>, WeightedAlgebra)>,
    settings: Settings,
}

impl ContactContext {
    pub fn new(variety: &Variety, settings: Settings) -> Result<Self> {
        let algebra = WeightedAlgebra::from_polynomials(
            variety.variables().to_vec(),
            variety.polynomials(),
            variety.weights(),
        )?;
        let closure = diff_closure(&algebra);
        let elimination = first_separated_elimination(&closure, variety.polynomials().len());
        Ok(ContactContext {
            variety: variety.clone(),
            closure,
            elimination,
            settings,
        })
    }

    pub fn variety(&self) -> &Variety {
        &self.variety
    }

    pub fn closure(&self) -> &WeightedAlgebra {
        &self.closure
    }

    /// Dropped variables and the eliminated algebra, when a separated
    /// elimination to dimension `n - #polynomials` exists.
    pub fn elimination(&self) -> Option<(&[usize], &WeightedAlgebra)> {
        self.elimination.as_ref().map(|(d, g)| (d.as_slice(), g))
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    /// `r̄` alone, without the blowup route.
    pub fn r_bar(&self, arc: &Arc) -> Result<Rational> {
        validate_on_variety(arc, &self.variety)?;
        let r = contact_order(&self.closure, arc)?;
        Ok(r / Rational::from_integer(arc_order_integer(arc)?.into()))
    }

    pub fn report(&self, arc: &Arc) -> Result<ContactReport> {
        validate_on_variety(arc, &self.variety)?;
        let r = contact_order(&self.closure, arc)?;
        let ord_phi = arc_order_integer(arc)?;
        let ord = Rational::from_integer(ord_phi.into());
        let floor_r = rational_floor(&r)
            .to_u32()
            .ok_or_else(|| Error::PrecisionExhausted("order of contact out of range".into()))?;
        let (rho, rho_source) = if self.variety.is_hypersurface() {
            let trace = nash_sequence(
                &self.variety.polynomials()[0],
                arc,
                self.settings.nash_options(),
            )?;
            match trace.first_drop() {
                Some(i) => (i as u32, RhoSource::Blowup),
                None => return Err(Error::MaxStepsExceeded(Box::new(trace))),
            }
        } else {
            (floor_r, RhoSource::Algebraic)
        };
        let elimination = match &self.elimination {
            Some((dropped, g)) => elimination_check(dropped, g, arc, &r)?,
            None => None,
        };
        Ok(ContactReport {
            ord_phi,
            r_bar: &r / &ord,
            r,
            rho,
            rho_source,
            rho_bar: Rational::from_integer(rho.into()) / &ord,
            floor_r,
            elimination,
        })
    }

    /// Report plus the full blowup cross-checks used by `verify`.
    pub fn verify(&self, arc: &Arc) -> Result<Verification> {
        let report = self.report(arc)?;
        let mut nash = None;
        if self.variety.is_hypersurface() {
            let f = &self.variety.polynomials()[0];
            let trace = nash_sequence(f, arc, self.settings.nash_options())?;
            let charts = chart_independence(f, arc, &trace, self.settings.precision)?;
            nash = Some(NashCheck {
                weakly_decreasing: trace.m.windows(2).all(|w| w[0] >= w[1]),
                starts_at_order: Some(trace.m[0]) == f.min_degree(),
                first_drop_shape: trace.terminated != Termination::FirstDrop
                    || trace.m[..trace.m.len() - 1].iter().all(|&m| m == trace.m[0]),
                charts_agree: charts.iter().all(|c| c.agrees()),
                tied_steps: charts.len(),
                trace,
            });
        }
        Ok(Verification { report, nash })
    }
}

/// Blowup-side facts checked by `verify`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NashCheck {
    pub trace: NashTrace,
    pub weakly_decreasing: bool,
    pub starts_at_order: bool,
    pub first_drop_shape: bool,
    pub charts_agree: bool,
    pub tied_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub report: ContactReport,
    pub nash: Option<NashCheck>,
}

impl Verification {
    pub fn rho_matches_floor(&self) -> bool {
        self.report.rho == self.report.floor_r
    }

    pub fn passed(&self) -> bool {
        self.rho_matches_floor()
            && self.report.elimination.as_ref().map_or(true, |e| e.consistent())
            && self.nash.as_ref().map_or(true, |n| {
                n.weakly_decreasing && n.starts_at_order && n.first_drop_shape && n.charts_agree
            })
    }
}

/// `r`, `r̄`, `ρ`, `ρ̄` of an arc on a variety.
pub fn contact_report(v: &Variety, arc: &Arc, settings: Settings) -> Result<ContactReport> {
    ContactContext::new(v, settings)?.report(arc)
}

fn arc_order_integer(arc: &Arc) -> Result<u32> {
    match arc.order() {
        OrderValue::Finite(o) => o
            .to_integer()
            .to_u32()
            .ok_or_else(|| Error::InvalidArc("arc order out of range".into())),
        OrderValue::AtLeast(_) => Err(Error::PrecisionExhausted(
            "order of the arc is not determined at this precision".into(),
        )),
        OrderValue::PositiveInfinity => Err(Error::InvalidArc("every image is zero".into())),
    }
}

/// First subset, in index order, of the variables with a bare generator
/// `vW` that has the requested size and eliminates successfully.
fn first_separated_elimination(
    closure: &WeightedAlgebra,
    size: usize,
) -> Option<(Vec<usize>, WeightedAlgebra)> {
    let bare: Vec<usize> = closure
        .generators()
        .iter()
        .filter_map(|g| g.bare_variable())
        .sorted()
        .dedup()
        .collect();
    bare.into_iter()
        .combinations(size)
        .find_map(|drop| eliminate_separated(closure, &drop).ok().map(|g| (drop, g)))
}

fn finite_or_infinite(o: OrderValue) -> Option<Option<Rational>> {
    match o {
        OrderValue::Finite(r) => Some(Some(r)),
        OrderValue::PositiveInfinity => Some(None),
        OrderValue::AtLeast(_) => None,
    }
}

fn min_opt(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

/// `a ≥ b` with `None` as `+∞`.
fn ge_opt(a: &Option<Rational>, b: &Option<Rational>) -> bool {
    match (a, b) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(a), Some(b)) => a >= b,
    }
}

fn elimination_check(
    dropped: &[usize],
    eliminated: &WeightedAlgebra,
    arc: &Arc,
    r: &Rational,
) -> Result<Option<EliminationCheck>> {
    let Some(r_elim) = finite_or_infinite(contact_order_value(eliminated, arc)?) else {
        return Ok(None);
    };
    let mut min_dropped: Option<Rational> = None;
    for &v in dropped {
        let Some(o) = finite_or_infinite(arc.image(v).order()) else {
            return Ok(None);
        };
        min_dropped = min_opt(min_dropped, o);
    }
    let applies = ge_opt(&min_dropped, &r_elim);
    let combined = min_opt(min_dropped.clone(), r_elim.clone());
    Ok(Some(EliminationCheck {
        dropped: dropped.to_vec(),
        identity_holds: combined.as_ref() == Some(r),
        holds: r_elim.as_ref() == Some(r),
        applies,
        r_elim,
        min_dropped_order: min_dropped,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{rat, Polynomial};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    pub(crate) fn xy_minus_z5() -> Variety {
        let n = 3;
        let f = Polynomial::var(n, 0)
            .mul(&Polynomial::var(n, 1))
            .sub(&Polynomial::var(n, 2).pow(5));
        Variety::new(names(&["x", "y", "z"]), vec![f]).unwrap()
    }

    #[test]
    fn xy_z5_curve_report() {
        let v = xy_minus_z5();
        let rep = contact_report(&v, &Arc::monomial(&[3, 2, 1]).unwrap(), Settings::default())
            .unwrap();
        assert_eq!(rep.ord_phi, 1);
        assert_eq!(rep.r, rat(2, 1));
        assert_eq!(rep.r_bar, rat(2, 1));
        assert_eq!(rep.rho, 2);
        assert_eq!(rep.rho_bar, rat(2, 1));
        assert_eq!(rep.rho_source, RhoSource::Blowup);
        let e = rep.elimination.unwrap();
        assert_eq!(e.dropped, vec![0]);
        assert!(e.consistent());
    }

    #[test]
    fn sharp_arc_report() {
        let v = xy_minus_z5();
        let rep = contact_report(&v, &Arc::monomial(&[5, 5, 2]).unwrap(), Settings::default())
            .unwrap();
        assert_eq!(rep.ord_phi, 2);
        assert_eq!(rep.r, rat(5, 1));
        assert_eq!(rep.r_bar, rat(5, 2));
        assert_eq!(rep.rho, 5);
    }

    #[test]
    fn off_variety_arc_is_rejected() {
        let v = xy_minus_z5();
        let err = contact_report(&v, &Arc::monomial(&[1, 1, 1]).unwrap(), Settings::default());
        assert!(matches!(err.unwrap_err(), Error::ArcNotOnVariety(_)));
    }

    #[test]
    fn non_hypersurface_uses_floor() {
        // the z-axis curve cut out by x, y, with weights forcing a singular presentation
        let n = 3;
        let x = Polynomial::var(n, 0);
        let y = Polynomial::var(n, 1);
        let z = Polynomial::var(n, 2);
        let f1 = x.mul(&y).sub(&z.pow(5));
        let f2 = x.sub(&y);
        let v = Variety::new(names(&["x", "y", "z"]), vec![f1, f2]).unwrap();
        // on x = y: x^2 = z^5, arc (t^5, t^5, t^2)
        let rep = contact_report(&v, &Arc::monomial(&[5, 5, 2]).unwrap(), Settings::default())
            .unwrap();
        assert_eq!(rep.rho_source, RhoSource::Algebraic);
        assert_eq!(rep.rho, rep.floor_r);
    }
}
