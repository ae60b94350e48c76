//! Finite sites with cd-structures: categories given by composition tables,
//! strict symmetric monoidal tuple sites, simple covers, generated topologies,
//! set-valued sheaf enumeration and site comparison checks.

pub mod cdstructures;
pub mod comparison;
pub mod fincat;
pub mod fixtures;
pub mod monoidal;
pub mod sheaves;
pub mod topology;
