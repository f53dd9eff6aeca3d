//! Nash multiplicity sequences of hypersurfaces, by direct simulation of the
//! point blowups selected by the graph of an arc.

use crate::arcs::{validate_on_variety, Arc, Variety};
use crate::error::{Error, Result};
use crate::rees::{contact_order, diff_closure, WeightedAlgebra, WeightedGenerator};
use crate::symcore::{FormalSeries, OrderValue, Polynomial, Rational, DEFAULT_PRECISION};

/// One point blowup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupStep {
    /// Variable whose chart was used.
    pub chart: usize,
    /// Point followed by the arc, in the coordinates of the new chart.
    pub center: Vec<Rational>,
    /// Strict transform in the new chart, before moving `center` to the origin.
    pub strict_transform: Polynomial,
    /// Lifted arc, already translated so that it passes through the origin.
    pub arc: Arc,
    pub multiplicity: u32,
}

impl BlowupStep {
    /// Strict transform with `center` moved to the origin.
    pub fn translated_strict_transform(&self) -> Polynomial {
        self.strict_transform
            .translate(&self.center)
            .expect("center has one coordinate per variable")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    FirstDrop,
    Smooth,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NashTrace {
    /// `m₀, m₁, …`
    pub m: Vec<u32>,
    pub steps: Vec<BlowupStep>,
    pub terminated: Termination,
}

impl NashTrace {
    /// First `i` with `m_i < m₀`.
    pub fn first_drop(&self) -> Option<usize> {
        let m0 = *self.m.first()?;
        self.m.iter().position(|&m| m < m0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NashOptions {
    pub max_steps: usize,
    /// Stop at the first drop instead of running until multiplicity one.
    pub stop_at_first_drop: bool,
    /// Working precision for non-exact series quotients.
    pub precision: u32,
}

impl Default for NashOptions {
    fn default() -> Self {
        NashOptions {
            max_steps: 256,
            stop_at_first_drop: true,
            precision: DEFAULT_PRECISION,
        }
    }
}

/// Variables whose image has the least order, lowest index first.
pub fn tied_charts(a: &Arc) -> Result<Vec<usize>> {
    let mut best: Option<Rational> = None;
    let mut out = Vec::new();
    for (v, s) in a.images().iter().enumerate() {
        match s.order() {
            OrderValue::Finite(o) => match &best {
                Some(b) if o > *b => {}
                Some(b) if o == *b => out.push(v),
                _ => {
                    best = Some(o);
                    out = vec![v];
                }
            },
            OrderValue::PositiveInfinity => {}
            OrderValue::AtLeast(_) => {
                return Err(Error::PrecisionExhausted(format!(
                    "image of variable {v} has no known nonzero coefficient"
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArc("every image is zero".into()));
    }
    Ok(out)
}

/// Blows up the origin of `poly` (of multiplicity `m`) and follows `arc`
/// into the chart of `chart`.
pub fn blowup_step(
    poly: &Polynomial,
    arc: &Arc,
    chart: usize,
    m: u32,
    precision: u32,
) -> Result<BlowupStep> {
    let n = poly.nvars();
    let substituted = poly.chart_substitution(chart)?;
    let strict = substituted
        .divide_by_var_power(chart, m)
        .ok_or_else(|| Error::NonExactStrictTransform(format!("exceptional factor x{chart}^{m}")))?;
    let exceptional = Polynomial::var(n, chart).pow(m);
    if exceptional.mul(&strict) != substituted {
        return Err(Error::NonExactStrictTransform(format!(
            "x{chart}^{m} times the strict transform differs from the total transform"
        )));
    }
    let pivot = arc.image(chart);
    let mut lifted = Vec::with_capacity(n);
    for (v, s) in arc.images().iter().enumerate() {
        if v == chart {
            lifted.push(s.clone());
        } else {
            lifted.push(s.div(pivot, precision)?);
        }
    }
    let center: Vec<Rational> = lifted.iter().map(FormalSeries::constant_term).collect();
    let lifted: Vec<FormalSeries> = lifted
        .iter()
        .zip(&center)
        .map(|(s, c)| s.sub(&FormalSeries::constant(c.clone())))
        .collect();
    let lifted = Arc::from_images_unchecked(lifted);
    let moved = strict.translate(&center)?;
    let on_transform = lifted.apply(&moved)?;
    if let Some((e, c)) = on_transform.terms().next() {
        return Err(Error::NonExactStrictTransform(format!(
            "lifted arc leaves the strict transform: {c}*t^{e}"
        )));
    }
    let multiplicity = moved.min_degree().ok_or_else(|| {
        Error::NonExactStrictTransform("strict transform vanished identically".into())
    })?;
    if multiplicity == 0 {
        return Err(Error::NonExactStrictTransform(
            "followed point is off the strict transform".into(),
        ));
    }
    Ok(BlowupStep {
        chart,
        center,
        strict_transform: strict,
        arc: lifted,
        multiplicity,
    })
}

/// Nash multiplicity sequence of `V(f)` along the arc.
///
/// The graph coordinate is appended first, so the lifted arcs keep order
/// one and the followed points stay closed points.
pub fn nash_sequence(f: &Polynomial, a: &Arc, opts: NashOptions) -> Result<NashTrace> {
    let names: Vec<String> = (0..f.nvars()).map(|i| format!("x{i}")).collect();
    let variety = Variety::new(names.clone(), vec![f.clone()])?;
    validate_on_variety(a, &variety)?;
    let m0 = f
        .min_degree()
        .ok_or_else(|| Error::InvalidVariety("zero polynomial".into()))?;
    if m0 == 1 {
        return Ok(NashTrace {
            m: vec![1],
            steps: Vec::new(),
            terminated: Termination::Smooth,
        });
    }
    if opts.stop_at_first_drop {
        let closure = diff_closure(&WeightedAlgebra::new(
            names,
            vec![WeightedGenerator::new(f.clone(), m0)?],
        )?);
        contact_order(&closure, a)?;
    }

    let mut poly = f.with_extra_vars(1);
    let mut arc = a.graph();
    let mut m = vec![m0];
    let mut steps = Vec::new();
    let mut current = m0;
    while steps.len() < opts.max_steps {
        let chart = tied_charts(&arc)?[0];
        let step = blowup_step(&poly, &arc, chart, current, opts.precision)?;
        poly = step.translated_strict_transform();
        arc = step.arc.clone();
        current = step.multiplicity;
        m.push(current);
        steps.push(step);
        if current < m0 && opts.stop_at_first_drop {
            return Ok(NashTrace {
                m,
                steps,
                terminated: Termination::FirstDrop,
            });
        }
        if current == 1 {
            return Ok(NashTrace {
                m,
                steps,
                terminated: Termination::Smooth,
            });
        }
    }
    Ok(NashTrace {
        m,
        steps,
        terminated: Termination::MaxSteps,
    })
}

/// `ρ`: index of the first drop of the Nash multiplicity sequence.
pub fn persistance(f: &Polynomial, a: &Arc, opts: NashOptions) -> Result<u32> {
    let opts = NashOptions {
        stop_at_first_drop: true,
        ..opts
    };
    let trace = nash_sequence(f, a, opts)?;
    match trace.first_drop() {
        Some(i) => Ok(i as u32),
        None => Err(Error::MaxStepsExceeded(Box::new(trace))),
    }
}

/// Multiplicities obtained at one step from every tied chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartCheck {
    pub step: usize,
    pub charts: Vec<(usize, u32)>,
}

impl ChartCheck {
    pub fn agrees(&self) -> bool {
        self.charts.windows(2).all(|w| w[0].1 == w[1].1)
    }
}

/// Recomputes every step of `trace` in each chart tied for minimal order.
pub fn chart_independence(f: &Polynomial, a: &Arc, trace: &NashTrace, precision: u32) -> Result<Vec<ChartCheck>> {
    let mut poly = f.with_extra_vars(1);
    let mut arc = a.graph();
    let mut checks = Vec::new();
    for (i, step) in trace.steps.iter().enumerate() {
        let m = trace.m[i];
        let tied = tied_charts(&arc)?;
        if tied.len() > 1 {
            let mut charts = Vec::with_capacity(tied.len());
            for &c in &tied {
                let alt = blowup_step(&poly, &arc, c, m, precision)?;
                charts.push((c, alt.multiplicity));
            }
            checks.push(ChartCheck { step: i + 1, charts });
        }
        poly = step.translated_strict_transform();
        arc = step.arc.clone();
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::rat;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn xy_minus_z5() -> Polynomial {
        x(3, 0).mul(&x(3, 1)).sub(&x(3, 2).pow(5))
    }

    #[test]
    fn xy_z5_curve_arc() {
        let a = Arc::monomial(&[3, 2, 1]).unwrap();
        let t = nash_sequence(&xy_minus_z5(), &a, NashOptions::default()).unwrap();
        assert_eq!(t.m, vec![2, 2, 1]);
        assert_eq!(t.terminated, Termination::FirstDrop);
        assert_eq!(t.first_drop(), Some(2));
        // y and z tie at the second step; the y chart lands at z'' = 1
        assert_eq!(t.steps[1].chart, 1);
        assert_eq!(t.steps[1].center[2], rat(1, 1));
    }

    #[test]
    fn sharp_arc_persists_five_steps() {
        let a = Arc::monomial(&[5, 5, 2]).unwrap();
        let t = nash_sequence(&xy_minus_z5(), &a, NashOptions::default()).unwrap();
        assert_eq!(t.m, vec![2, 2, 2, 2, 2, 1]);
        assert_eq!(persistance(&xy_minus_z5(), &a, NashOptions::default()).unwrap(), 5);
    }

    #[test]
    fn smooth_hypersurface() {
        let f = x(2, 0);
        let a = Arc::monomial(&[0, 1]).unwrap();
        let t = nash_sequence(&f, &a, NashOptions::default()).unwrap();
        assert_eq!(t.m, vec![1]);
        assert_eq!(t.terminated, Termination::Smooth);
    }

    #[test]
    fn arc_inside_max_mult_is_refused() {
        // z-axis lies in the double locus of x y
        let f = x(3, 0).mul(&x(3, 1));
        let a = Arc::monomial(&[0, 0, 1]).unwrap();
        assert!(matches!(
            nash_sequence(&f, &a, NashOptions::default()).unwrap_err(),
            Error::ArcInMaxMult
        ));
    }

    #[test]
    fn max_steps_error_carries_trace() {
        let f = x(3, 0).mul(&x(3, 1)).sub(&x(3, 2).pow(5));
        let a = Arc::monomial(&[5, 5, 2]).unwrap();
        let opts = NashOptions {
            max_steps: 3,
            ..NashOptions::default()
        };
        match persistance(&f, &a, opts).unwrap_err() {
            Error::MaxStepsExceeded(trace) => assert_eq!(trace.m, vec![2, 2, 2, 2]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ties_agree_across_charts() {
        let a = Arc::monomial(&[3, 2, 1]).unwrap();
        let f = xy_minus_z5();
        let t = nash_sequence(&f, &a, NashOptions::default()).unwrap();
        let checks = chart_independence(&f, &a, &t, DEFAULT_PRECISION).unwrap();
        assert!(!checks.is_empty());
        assert!(checks.iter().all(ChartCheck::agrees));
    }

    #[test]
    fn full_mode_runs_to_smooth() {
        let a = Arc::monomial(&[3, 2, 1]).unwrap();
        let opts = NashOptions {
            stop_at_first_drop: false,
            ..NashOptions::default()
        };
        let t = nash_sequence(&xy_minus_z5(), &a, opts).unwrap();
        assert_eq!(t.terminated, Termination::Smooth);
        assert_eq!(*t.m.last().unwrap(), 1);
    }
}
