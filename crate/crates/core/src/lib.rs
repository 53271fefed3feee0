//! Exact-arithmetic toolkit for makespan scheduling relaxations.
//!
//! The crate is organised bottom-up:
//!
//! * [`rational`] and [`model`]: exact numbers, instances, configurations and
//!   size classes.
//! * [`ring`]: square-free polynomials modulo the Boolean and scheduling
//!   ideals.
//! * [`formulations`]: the assignment, configuration, symmetry-breaking and
//!   ordering linear programs.
//! * [`exact_lp`]: a self-verifying rational simplex.
//! * [`lift`]: Sherali-Adams lifts, pseudoexpectations, conditioning and the
//!   SA / SoS validity checkers.
//! * [`rounding`]: stabilisation by conditioning, the rounding back to an
//!   integral schedule and the integrality-gap harness.
//! * [`lab`]: the Petersen-graph hard instance and its explicit
//!   pseudoexpectation with the exact checks around it.

pub mod exact_lp;
pub mod formulations;
pub mod lab;
pub mod lift;
pub mod linalg;
pub mod model;
pub mod psd;
pub mod rational;
pub mod ring;
pub mod rounding;

pub use exact_lp::{feasible, optimize, FarkasCertificate, LpError, LpOutcome, Optimum, Sense};
pub use formulations::{Formulation, FormulationKind, RationalLP, Relation, Row};
pub use lift::{LiftedLP, Moments, Pseudoexpectation};
pub use model::{
    classify_jobs, enumerate_configurations, Configuration, Instance, Job, JobClassification,
    ModelError,
};
pub use rational::{lower_factorial, Rational};
pub use ring::{GroundSet, SquareFreePoly, VarSet};
