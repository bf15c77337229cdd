//! Exact propagation of light in waveguide arrays.
//!
//! Four lattice models are covered: infinite and semi-infinite arrays, each
//! with nearest-neighbor coupling `g1` alone or together with a
//! next-nearest-neighbor coupling `g2`. Field amplitudes are evaluated from
//! closed forms built on Bessel functions `J_n(x)` and the one-parameter
//! generalized Bessel functions `J_n(x, y; s)`, and the [`oracle`] module
//! integrates the coupled-mode equations directly so that every closed form
//! can be checked against a brute-force reference.

pub mod oracle;
pub mod phase;
pub mod propagators;
pub mod special_functions;

pub use num_complex::Complex64;

pub use oracle::{
    compare, integrate, rhs, Integration, IntegrationReport, OracleError, TruncatedLattice,
};
pub use propagators::{
    field_coherent_semi_second, field_infinite_first, field_infinite_second, field_semi_first,
    field_semi_second, intensity_map, snapshot, CouplingConfig, Excitation, FieldSnapshot,
    IntensityMap, NeighborOrder, PropagatorError, Topology,
};
pub use special_functions::{
    bessel_j, gbessel_generating_lhs, gbessel_j, GBesselParams, GBesselValue, SpecialFunctionError,
};
