//! Laboratory for the runtime analysis of evolutionary algorithms on
//! pseudo-Boolean functions: instrumented simulators, an exact Markov-chain
//! oracle for unitation functions and a library of runtime bounds.

pub mod algorithms;
pub mod bitstring;
pub mod bounds;
pub mod empirics;
pub mod error;
pub mod fitness;
pub mod mutation;
pub mod oracle;
pub mod rng;
pub mod unitation;

pub use algorithms::{
    AlgorithmConfig, AlgorithmKind, Budget, RunOptions, RunTrace, StartPolicy, TieBreak,
};
pub use bitstring::Bitstring;
pub use bounds::{BoundReport, Direction, Units};
pub use empirics::{run_batch, Experiment, RunSample, RuntimeSummary};
pub use error::{LabError, Result};
pub use fitness::{
    FitnessFunction, FunctionSpec, LinearFunction, Objective, Target, UnitationFunction,
};
pub use mutation::{MutationParams, StandardBitMutation};
pub use oracle::LevelChain;
pub use rng::RngStream;
pub use unitation::{BlockKind, BlockSpec, UnitationSpec};
