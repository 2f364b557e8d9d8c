//! Desk-scale models of boundaries on free and direct products of
//! groups.
//!
//! The library builds, on concrete compact-line factor models:
//!
//! * the glued free-product space `W` with its scaled tree metric, the
//!   completion boundary, explicit `eps`-nets, the core-projection
//!   homotopy `K`, and the boundary-clearing homotopy `P`
//!   ([`freeprod`]);
//! * the join compactification of a direct product, with proper metrics,
//!   the proper maps `p`/`q`, the slope coordinate, join neighborhoods,
//!   and the inward-ray homotopy ([`dirprod`]);
//! * a harness that verifies every numerically checkable claim about
//!   them: metric axioms, total boundedness, homotopy track bounds, the
//!   null condition on both constructions, and the product-topology
//!   counterexample with its join-topology resolution ([`verify`]).
//!
//! Sweeps are data-parallel (rayon, `parallel` feature, on by default)
//! with a sequential fallback; identical seeds give byte-identical
//! reports on any thread count.

pub mod dirprod;
pub mod dyadic;
pub mod error;
pub mod freeprod;
pub mod models;
pub mod sweep;
pub mod verify;
pub mod words;

pub use error::{Result, ZlabError};
