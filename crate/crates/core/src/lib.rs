//! Exact algorithms for generalised 3-manifold triangulations.

pub mod angles;
pub mod census;
pub mod cone;
pub mod error;
pub mod examples;
pub mod highlevel;
pub mod homology;
pub mod isosig;
pub mod moves;
pub mod normal;
pub mod perm;
pub mod simplify;
pub mod skeleton;
pub mod triangulation;
pub mod union_find;

pub use error::{Error, Result};
pub use homology::{first_homology, HomologySummary};
pub use perm::Perm4;
pub use skeleton::{Classification, LinkClass, LinkType, Skeleton};
pub use triangulation::{Gluing, Triangulation};
