//! Free products of two groups with commuting subgroups, over computable
//! base groups (free groups of finite rank and finitely generated abelian
//! groups): canonical normal forms and word problems, π'-isolation tests,
//! the residual criterion, and finite p-group separation certificates with
//! an independent verifier.

pub mod arith;
pub mod base;
pub mod cert;
pub mod commprod;
pub mod dsl;
pub mod error;
pub mod finite;
pub mod quotients;
pub mod sampling;
pub mod separability;
pub mod verify;

pub use arith::{pi_part, PiSet};
pub use base::{BaseElement, BaseGroup, BaseSubgroup};
pub use commprod::{CommProdSpec, GNormalForm, GWord};
