//! Quantum reference frames over finite symmetry groups.
//!
//! The crate models superpositions of group-symmetric configurations
//! ("models"), the orbit structure the symmetry group induces on them, and
//! the representational conventions (sections) that pick one representative
//! per orbit. A change of quantum reference frame is a branch-controlled
//! group action followed by a change of section.
//!
//! * [`group`]: exact finite groups, their actions, stabilisers.
//! * [`model`]: models, orbit labels, sections and counterpart relations.
//! * [`qstate`]: branch superpositions, frame changes, entanglement.
//! * [`translation`]: lattice-translation scenarios (probe/mass, three bodies).
//! * [`spacetime`]: superposed discrete spacetimes, comparison maps,
//!   localisation, events and dressed observables.

pub mod error;
pub mod group;
pub mod model;
pub mod qstate;
pub mod spacetime;
pub mod translation;

pub use error::{Error, Result};
pub use group::{ActionRule, ConfigSpace, FiniteGroup, GroupElement, GroupId, Permutation};
pub use model::{Model, ModelSpace, OrbitLabel, Section, SectionRule};
pub use num_complex::Complex64;
pub use qstate::{Branch, BranchState, DensityMatrix, OrbitPolicy};
pub use spacetime::{
    BranchGeometry, ComparisonMap, EventCandidate, FieldTuple, GeometrySuperposition,
    QuantumDiffeo, ReferenceFields, RelationalObservable,
};
pub use translation::TranslationScenario;
