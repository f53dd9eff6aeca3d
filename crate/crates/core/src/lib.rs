//! Exact computation of arc-based invariants of singularities.
//!
//! Given a variety `X` through the origin and an arc `φ` on it, the crate
//! computes the order of contact `r` of `φ` with the maximum multiplicity
//! locus, its normalized form `r̄ = r / ord(φ)`, the persistance `ρ` read off
//! the Nash multiplicity sequence, and decides whether the origin is an
//! isolated point of maximum multiplicity. All arithmetic is over ℚ.
//!
//! ```
//! use arc_contact::arcs::{Arc, Variety};
//! use arc_contact::invariants::{contact_report, Settings};
//! use arc_contact::scenario::parse_polynomial;
//! use arc_contact::symcore::rat;
//!
//! let vars = vec!["x".to_string(), "y".to_string(), "z".to_string()];
//! let f = parse_polynomial("x*y - z^5", &vars).unwrap();
//! let v = Variety::new(vars, vec![f]).unwrap();
//! let phi = Arc::monomial(&[3, 2, 1]).unwrap();
//! let report = contact_report(&v, &phi, Settings::default()).unwrap();
//! assert_eq!(report.r_bar, rat(2, 1));
//! assert_eq!(report.rho, 2);
//! ```

pub mod arcs;
pub mod cli;
pub mod error;
pub mod invariants;
pub mod nash;
pub mod rees;
pub mod scenario;
pub mod symcore;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/arcs.md")]
    mod arcs {}
    #[doc = include_str!("../../../book/src/rees.md")]
    mod rees {}
    #[doc = include_str!("../../../book/src/contact.md")]
    mod contact {}
    #[doc = include_str!("../../../book/src/nash.md")]
    mod nash {}
    #[doc = include_str!("../../../book/src/isolated.md")]
    mod isolated {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
