//! Computable 2-groups, 2-bundle gluing data and 2-connections.
//!
//! The crate is layered bottom-up:
//!
//! * [`group`], [`lie`], [`crossed`], [`shipped`]: concrete groups, Lie algebras,
//!   crossed modules and the catalog of named ones.
//! * [`two_group`]: 2-cells `(g, h)` of the 2-group `G ⋉ H` and their compositions.
//! * [`expr`], [`form`]: an expression language with exact derivatives and
//!   Lie-algebra-valued differential forms built from it.
//! * [`geometry`]: paths and bigons with sitting instants.
//! * [`transport`]: path and surface holonomy, fake curvature and transition laws.
//! * [`cech`]: Čech gluing cocycles on abstract cover nerves.
//! * [`scenario`]: the scenario file format and the commands run over it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cech;
pub mod crossed;
pub mod error;
pub mod expr;
pub mod form;
pub mod geometry;
pub mod group;
pub mod lie;
pub mod linalg;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod shipped;
pub mod transport;
pub mod two_group;

pub use crossed::{CrossedModule, Mode};
pub use error::{Error, Result};
pub use group::{Element, FiniteGroup, Group, MatrixFamily, TAU_GRP};
pub use report::{Check, ValidationReport, Verdict};
