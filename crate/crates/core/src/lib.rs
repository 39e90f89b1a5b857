//! Quantale-valued presheaves over finite relations and their total categories.

pub mod lattice;
pub mod presheaf;
pub mod quantale;
pub mod relbase;
pub mod report;
pub mod total;
pub mod nucleus;
pub mod fixpoint;
pub mod corpus;
pub mod commands;
