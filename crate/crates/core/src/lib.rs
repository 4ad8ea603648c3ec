//! Numerical toolkit for anisotropic Dirichlet problems with L¹ data: Young-function
//! calculus, anisotropic symmetrization, Sobolev conjugates, rearrangements, the
//! symmetrized radial solution, a-priori level-set estimates and a 2D grid solver.

pub mod anisotropic;
pub mod catalog;
pub mod curve;
pub mod error;
pub mod fit;
pub mod grid;
pub mod numeric;
pub mod sobolev;
pub mod symmetrized;
pub mod quad;
pub mod rearrangement;
pub mod report;
pub mod young;

pub use anisotropic::{
    phi_circ, phi_diamond, AnisoForm, AnisoSpec, AnisotropicYoungFunction, LevelLadder,
    MeasureOptions, PhiCirc, PhiDiamond, TermSpec, Theta,
};
pub use curve::LogLogCurve;
pub use error::{Error, Result};
pub use young::{
    flux_of, psi_of, theta_diamond, Flux, GrowthCondition, GrowthReport, Monotone, Psi, ScalarYoungFunction,
    ThetaDiamond, Verdict,
};
pub use catalog::{
    expected_regularity, verify_asymptotics, verify_example, ExampleId, ExampleParams,
    ExampleRecord, Outcome, Regime, Regularity, VerificationReport,
};
pub use grid::{
    approximable_sequence, assumption_audit, solve, GridField, OperatorSpec, SolveOptions,
    SolveReport,
};
pub use rearrangement::{
    data_admissibility, luxemburg_norm, maximal_rearrangement, rearrange, RearrangedFunction,
};
pub use sobolev::{classify_integral, sobolev_conjugate, Dichotomy, EmbeddingProfile, SobolevOptions};
pub use report::{comparison_check, regularity_report, ComparisonCheck, RegularityReport};
pub use symmetrized::{solve_radial, RadialSolution};
