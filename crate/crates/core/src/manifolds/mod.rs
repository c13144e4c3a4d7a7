//! Concrete charted manifolds and their canonical eigenfamilies.

mod lattice;
mod mapping_torus;
mod sasakian;

pub use lattice::{
    character_field, dual_lattice, flat_torus, torus_family, Lattice, TorusCharacter,
};
pub use mapping_torus::{mapping_torus, MappingTorusSpec, TrigPoly};
pub use sasakian::{weighted_sasakian, WeightedSasakianSphere, MIN_SOLVED_COORDINATE};
