//! Initial-coefficient bounds for the bi-univalent classes `R_sigma(lambda, phi)`
//! and `S*_sigma(phi)`, together with independent numerical checks of every
//! closed form the bounds rest on.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`] - truncated power series of normalized analytic functions,
//!   composition and compositional inversion.
//! * [`phi`] - the Ma-Minda target functions (Janowski, strongly starlike,
//!   order beta, square-root lemniscate, custom coefficient pairs).
//! * [`infimum`] - the three piecewise infimum formulas and a brute-force
//!   grid oracle over the plane.
//! * [`bounds`] - the closed-form coefficient bounds, the Fekete-Szego
//!   bound, explicit family specializations and prior-bound comparisons.
//! * [`membership`] - subordination testing by boundary sampling, the
//!   `f_nu(z) = nu z / (nu - z)` family and threshold bisection.
//! * [`stochastic`] - seeded Caratheodory-coefficient sampling that
//!   stress-tests the bounds through the exact coefficient relations.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated comparisons reject NaN

pub mod bounds;
pub mod error;
pub mod infimum;
pub mod membership;
pub mod phi;
pub mod series;
pub mod stochastic;

pub use bounds::{
    bi_starlike_bounds, compare_with_prior, fekete_szego_bound, r_sigma_bounds, specialize,
    specialize_bi_starlike, BoundReport, CaseBranch, ClassFamily, ClassSpec, Comparison, SpecialFamily,
};
pub use error::{Error, Result};
pub use infimum::{
    closed_form, g_function, h_function, oracle_infimum, InfimumResult, Lemma, LemmaBranch,
    OracleConfig, OracleResult, PiecewiseProblem,
};
pub use membership::{
    bound_consistency_check, check_membership, disk_in_region, disk_margin, fnu_image_disk,
    membership_threshold, ConsistencyReport, Disk, DiskMode, FnuSpec, MembershipConfig,
    MembershipVerdict, Side, TestFunction, ThresholdResult,
};
pub use num_complex::Complex64;
pub use phi::{PhiFamily, PhiProfile};
pub use series::{Polynomial, TruncatedSeries, DEFAULT_ORDER};
pub use stochastic::{
    derive_instance, fekete_szego_class_bound, fekete_szego_stress, in_body, nu_for, nu_inequality,
    run_fekete_szego,
    run_stress, sample_caratheodory, sample_pairs, stress_test, CaratheodorySample, FeketeSzegoReport,
    SchwarzSpec, StressReport, Violation, ViolationKind,
};
