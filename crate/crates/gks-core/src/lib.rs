//! Workbench for the GKS last-bit communication game.
//!
//! Alice and Bob cooperate against an adversary (Merlin) who reveals the
//! positions of an array one by one.  Alice assigns a bit to every revealed
//! position except the last, Merlin sets the last, and Bob must name a small
//! set of positions that contains Merlin's position, looking only at the
//! final array.
//!
//! The crate provides:
//!
//! * [`game`] — run semantics and exhaustive / structured / sampled
//!   verification of strategy profiles,
//! * [`strategy`] — the concrete strategy constructions (trivial, block,
//!   codeword family, tau) and the composition combinators,
//! * [`code`] — binary block codes, distance computation, puncturing and the
//!   bipartite subset-to-codeword matching behind tau strategies,
//! * [`hypercube`] — the equivalent Divider–Chooser game on subgraphs of the
//!   n-cube, minimal winning subgraph search, and the exact k(n) values,
//! * [`spec`] — a small expression language for naming strategies on the
//!   command line.

pub mod code;
pub mod game;
pub mod hypercube;
pub mod spec;
pub mod strategy;
