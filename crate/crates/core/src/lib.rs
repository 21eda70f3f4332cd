//! SEP and LOCC transformations among generic three-qutrit pure states.
//!
//! A state is `(g1 ⊗ g2 ⊗ g3)|ψ(a,b,c)⟩` over the seed
//! `|ψ⟩ = a(|000⟩+|111⟩+|222⟩) + b(|012⟩+|201⟩+|120⟩) + c(|021⟩+|210⟩+|102⟩)`.
//! The library computes standard forms and LU-equivalence, decides SEP feasibility over the
//! nine local symmetries, classifies states (SEP/LOCC reachable, convertible, MES member,
//! isolated) and synthesizes and simulates the corresponding protocols.
//!
//! Numerical code is generic over [`scalar::Real`] (`f64` and `f32`); the aliases below fix
//! the precision for callers that do not need the choice.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod audit;
pub mod classify;
pub mod error;
pub mod generate;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod pauli;
pub mod protocol;
pub mod scalar;
pub mod seed;
pub mod sep;
pub mod state;
pub mod tensor;
pub mod tolerance;

pub use classify::{classify, classify_state, ClassifyOptions, Classification, SepCase, SupportPattern};
pub use error::{Error, Result};
pub use linalg::Mat3;
pub use pauli::{make_pauli, PauliCoords, PauliIndex};
pub use protocol::{simulate, simulate_branches, validate_povm, Epsilon, Protocol};
pub use scalar::Real;
pub use seed::{check_generic, SeedParams};
pub use sep::{sep_feasible, ProbabilityVector, SepFeasibility, SepInstance};
pub use state::{lu_equivalent, standard_form, GenericState, GramTriple, StandardForm};
pub use tensor::Ket27;
pub use tolerance::{set_tolerance, tolerance};

pub type Mat3F64 = Mat3<f64>;
pub type Mat3F32 = Mat3<f32>;
pub type Ket27F64 = Ket27<f64>;
pub type SeedParamsF64 = SeedParams<f64>;
pub type SeedParamsF32 = SeedParams<f32>;
pub type GenericStateF64 = GenericState<f64>;
pub type GenericStateF32 = GenericState<f32>;
pub type GramTripleF64 = GramTriple<f64>;
pub type SepFeasibilityF64 = SepFeasibility<f64>;
pub type ProtocolF64 = Protocol<f64>;
