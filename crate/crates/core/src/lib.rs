//! Identification of linear and affine Boolean functions, completely specified
//! or with don't cares, by exact statevector simulation of the one-query
//! (Bernstein-Vazirani) and two-query circuits.
//!
//! Modules, bottom up:
//!
//! - [`boolfn`]: bit strings, affine specs, truth tables, partial functions, `.bfn` I/O
//! - [`statevector`]: the `(n+1)`-qubit register, Walsh-Hadamard transforms, oracles, measurement
//! - [`algorithms`]: the one- and two-query procedures, oracle choice, majority vote
//! - [`analysis`]: closed-form success probabilities, class predicates, landscape sweep
//! - [`verify`]: cross-checks between simulation, closed forms and sampling
//! - [`cli`]: the `affine-bv` command line

pub mod algorithms;
pub mod analysis;
pub mod boolfn;
pub mod cli;
pub mod error;
pub mod rng;
pub mod statevector;
pub mod verify;

pub use algorithms::{
    choose_variant, decode_cn, majority_vote, run_one_query, run_two_query, Candidate,
    IdentificationResult, Mode, RunConfig, VariantPolicy, VariantUsed,
};
pub use analysis::{
    gammas, half_dc_case, in_affine_class, in_linear_class, p_affine, p_linear, sweep_landscape,
    DcFractions, GammaPair, SweepMode, SweepRow,
};
pub use boolfn::{
    consistent_affine_completions, dc_split, eval_affine, mask, parity, parse_function_file,
    truth_table, write_function_file, AffineSpec, BitString, DcSplit, Entry, PartialFunction,
    TruthTable,
};
pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use statevector::{OracleVariant, StateVector};
