//! Finitely generated groups, weights and sections of the group algebra.

pub mod model;
pub mod regular;
pub mod section;
pub mod torus;
pub mod weight;

pub use model::{Element, GroupFamily, GroupModel, DEFAULT_BALL_CAP};
pub use regular::{regular_rep_norm, BallOperator};
pub use section::{convolve, section_adjoint, weighted_lp_norm, SectionJson, TermJson, WeightedSection};
pub use torus::cstar_norm_abelian;
pub use weight::Weight;
