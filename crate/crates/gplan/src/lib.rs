//! Generalized planning toolkit.
//!
//! The crate is organized around three representation-learning problems over
//! lifted STRIPS domains: learning action models from labeled state-space
//! graphs ([`model`]), learning general policies over description-logic
//! features ([`learner`]), and executing policy sketches with width-bounded
//! search ([`width`]). The supporting layers are a STRIPS core with grounding
//! and successor semantics ([`strips`]), a PDDL-subset parser and printer
//! ([`pddl`]), exhaustive state-space expansion with graph isomorphism
//! ([`graph`]), the feature grammar and evaluator ([`features`]), and the
//! policy-rule language with exhaustive verification ([`policy`]).

pub mod bench;
pub mod bitset;
pub mod features;
pub mod graph;
pub mod learner;
pub mod maxsat;
pub mod model;
pub mod pddl;
pub mod policy;
pub mod report;
pub mod strips;
pub mod width;
