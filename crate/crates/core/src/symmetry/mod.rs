//! Lie point symmetries of boundary value problems, checked numerically.
//!
//! A problem is invariant under a one-parameter group when (a) its governing
//! equations, (b) its conditions on known curves, (c) its conditions on
//! free surfaces (with the group extended trivially to the surface
//! functions), and (d) its conditions at infinity are all mapped into
//! themselves. Each item is sampled over an ε grid and judged by a
//! normalized residual.

pub mod action;
pub mod check;
pub mod rod;
pub mod stefan;

pub use action::{AxisFlow, FamilyKind, FieldFlow, GroupAction, HeatSolution, Jet, Point, SurfaceJet};
pub use check::{
    check_boundary_invariance, check_infinity_invariance, check_pde_invariance, BoundaryCondition, EvolutionPde,
    InvarianceReport, Item, ItemVerdict, ManifoldKind, PdeSystem, ResidualRecord,
};
pub use rod::{classify_rod_bvp, RodClassification, RodProblem};
pub use stefan::{
    classify_stefan_bvp, equivalence_transform, verify_table2_generators, EquivalenceMap, StefanClassification,
    StefanProblem, SurfaceLaw,
};
