//! Reuse-interval and cache-polynomial analysis for affine loop nests.
//!
//! Programs written in the `.aff` language ([`dsl`]) are interpreted into
//! block-granular access traces ([`trace`]). Their backward reuse intervals,
//! closed under infinite repetition, feed the working-set recursion
//! ([`ri`], [`denning`]). Sampling the trace at several values of a loop
//! bound and interpolating yields closed-form miss-ratio and cache-size
//! polynomials ([`poly`], [`symbolic`]), which are checked against an exact
//! LRU simulator ([`sim`]).

pub mod cli;
pub mod corpus;
pub mod denning;
pub mod dsl;
pub mod poly;
pub mod ri;
pub mod sim;
pub mod symbolic;
pub mod trace;
