//! The line-oriented scenario language.
//!
//! ```text
//! vars x y z
//! poly f = x*y - z^5
//! arc phi : x -> t^3, y -> t^2, z -> t
//! family grow over N in 1..10 : x -> t^(N+4), y -> t^(N+1), z -> t^(1)
//! set prec 64
//! ```

mod parser;

use std::fmt;

use num_traits::One;

pub use parser::{parse_linear_exponent, parse_polynomial, parse_scenario};

use crate::arcs::{Arc, ArcFamily, Variety};
use crate::error::{Error, Result};
use crate::symcore::{format_rational, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyDecl {
    pub name: String,
    pub poly: Polynomial,
    /// Explicit weight; the order at the origin otherwise.
    pub weight: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedArc {
    pub name: String,
    pub arc: Arc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedFamily {
    pub name: String,
    pub family: ArcFamily,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScenarioOptions {
    pub prec: Option<u32>,
    pub cap: Option<u32>,
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scenario {
    pub variables: Vec<String>,
    pub polys: Vec<PolyDecl>,
    pub arcs: Vec<NamedArc>,
    pub families: Vec<NamedFamily>,
    pub options: ScenarioOptions,
}

impl Scenario {
    /// The variety cut out by every declared polynomial.
    pub fn variety(&self) -> Result<Variety> {
        self.variety_from(self.polys.iter().collect())
    }

    /// The hypersurface of one named polynomial.
    pub fn variety_of(&self, name: &str) -> Result<Variety> {
        let decl = self
            .polys
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::Usage(format!("no polynomial named '{name}'")))?;
        self.variety_from(vec![decl])
    }

    fn variety_from(&self, decls: Vec<&PolyDecl>) -> Result<Variety> {
        if decls.is_empty() {
            return Err(Error::Usage("the scenario declares no polynomial".into()));
        }
        let polys: Vec<Polynomial> = decls.iter().map(|d| d.poly.clone()).collect();
        let weights = decls
            .iter()
            .map(|d| d.weight.unwrap_or_else(|| d.poly.min_degree().unwrap_or(0)))
            .collect();
        Variety::with_weights(self.variables.clone(), polys, weights)
    }

    pub fn arc(&self, name: &str) -> Result<&Arc> {
        self.arcs
            .iter()
            .find(|a| a.name == name)
            .map(|a| &a.arc)
            .ok_or_else(|| Error::Usage(format!("no arc named '{name}'")))
    }

    pub fn family(&self, name: &str) -> Result<&ArcFamily> {
        self.families
            .iter()
            .find(|f| f.name == name)
            .map(|f| &f.family)
            .ok_or_else(|| Error::Usage(format!("no family named '{name}'")))
    }

    pub fn variable_index(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::Usage(format!("no variable named '{name}'")))
    }
}

/// Prints in the scenario grammar; parsing the output gives back an equal
/// scenario.
impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.variables.join(" "))?;
        for p in &self.polys {
            writeln!(f, "poly {} = {}", p.name, p.poly.display(&self.variables))?;
            if let Some(w) = p.weight {
                writeln!(f, "poly {} : weight {w}", p.name)?;
            }
        }
        for a in &self.arcs {
            let parts: Vec<String> = a
                .arc
                .images()
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.is_exact_zero())
                .map(|(v, s)| format!("{} -> {s}", self.variables[v]))
                .collect();
            writeln!(f, "arc {} : {}", a.name, parts.join(", "))?;
        }
        for fam in &self.families {
            let (lo, hi) = fam.family.range();
            let parts: Vec<String> = fam
                .family
                .images()
                .iter()
                .enumerate()
                .filter_map(|(v, img)| img.as_ref().map(|img| (v, img)))
                .map(|(v, img)| {
                    let coeff = if img.coeff.is_one() {
                        String::new()
                    } else {
                        format!("{}*", format_rational(&img.coeff))
                    };
                    format!("{} -> {coeff}t^({})", self.variables[v], img.exponent)
                })
                .collect();
            writeln!(
                f,
                "family {} over N in {lo}..{hi} : {}",
                fam.name,
                parts.join(", ")
            )?;
        }
        if let Some(p) = self.options.prec {
            writeln!(f, "set prec {p}")?;
        }
        if let Some(c) = self.options.cap {
            writeln!(f, "set cap {c}")?;
        }
        if let Some(m) = self.options.max_steps {
            writeln!(f, "set max_steps {m}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::LinearExponent;
    use crate::symcore::{rat, FormalSeries};

    const QUARTIC: &str = "\
vars x y z s
poly f = x^2*y^3 - z^4*s^5   # weight inferred
family phiN over N in 1..10 : x -> t^(2*N+2), y -> t^(2*N+5), z -> t^(1), s -> t^(2*N+3)
";

    #[test]
    fn quartic_declarations() {
        let sc = parse_scenario(QUARTIC).unwrap();
        let v = sc.variety().unwrap();
        assert_eq!(v.weights(), &[5]);
        let fam = sc.family("phiN").unwrap();
        assert_eq!(
            fam.images()[0].as_ref().unwrap().exponent,
            LinearExponent::new(2, 2)
        );
        assert_eq!(fam.instantiate(1).unwrap(), Arc::monomial(&[4, 7, 1, 5]).unwrap());
    }

    #[test]
    fn two_term_arc_image() {
        let sc = parse_scenario("vars x y\narc a : x -> t^2 + -1*t^3").unwrap();
        let a = sc.arc("a").unwrap();
        assert_eq!(
            a.image(0),
            &FormalSeries::exact([(2, rat(1, 1)), (3, rat(-1, 1))])
        );
        assert!(a.image(1).is_exact_zero());
    }

    #[test]
    fn round_trip() {
        let text = "\
vars x y z
poly f = 3/2*x*y - (z^2)^2*z + 0*x
poly f : weight 2
arc a : x -> t^2 - 1/2*t^3, z -> 0
family g over N in 2..4 : x -> -3*t^(N-1), y -> t, z -> t^(2*N)
set prec 40
set max_steps 9
";
        let sc = parse_scenario(text).unwrap();
        let printed = sc.to_string();
        assert_eq!(parse_scenario(&printed).unwrap(), sc);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_scenario("vars x y\npoly f = x*q").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 12)),
            other => panic!("{other:?}"),
        }
        let err = parse_scenario("vars x\narc a : x -> 1 + t").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 14, .. }), "{err:?}");
        let err = parse_scenario("poly f = x").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 1, .. }));
        let err = parse_scenario("vars x\nfamily g over N in 1..3 : x -> t^(N-1)").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn polynomial_expressions() {
        let vars: Vec<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
        let a = parse_polynomial("(x + y)*(x - y)", &vars).unwrap();
        let b = parse_polynomial("x^2 - y^2", &vars).unwrap();
        assert_eq!(a, b);
        assert!(parse_polynomial("x y", &vars).is_err());
    }
}
