//! bracketforge compiles declarative tournament-format descriptions
//! (bracket signatures, seeded brackets, multibracket flowcharts, Swiss
//! systems) into executable match graphs or dynamic pairing policies, then
//! evaluates them exactly or by Monte Carlo under pluggable strength models.
//!
//! The crate is organized around the lifecycle of a format:
//!
//! - [`types`]: the shared domain vocabulary (seeds, signatures, match
//!   graphs, policies, models, distributions);
//! - [`signatures`]: the signature calculus: validation, enumeration, and
//!   Swiss record profiles;
//! - [`builder`]: constructors for proper brackets, consolation play,
//!   semibrackets, linear composition, and dynamic policies;
//! - [`flowchart`]: structural validation, reachability analysis,
//!   classification, and DOT rendering of match graphs;
//! - [`dsl`]: the textual format language: parsing, compilation, and
//!   canonical pretty-printing;
//! - [`engine`]: execution by single playthrough, exact enumeration, and
//!   reproducible parallel Monte Carlo;
//! - [`metrics`]: derived statistics and format comparison reports.

pub mod builder;
pub mod dsl;
pub mod engine;
pub mod flowchart;
pub mod metrics;
pub mod signatures;
pub mod types;

pub use builder::{
    attach_consolation, build_proper_bracket, build_semibracket, check_proper, compose_linear,
    make_dynamic, make_swiss, standard_seed_order, BuildError, DynamicKind, SemibracketSpec,
};
pub use dsl::{compile, emit_ast, emit_multibracket, parse, Compiled, DslError, FormatAst};
pub use engine::{enumerate_exact, make_model, play, simulate, EngineError, Outcome};
pub use flowchart::{
    classify, is_efficient, is_meaningful, is_monotone, reachable_places, to_dot, validate,
    Classification, ValidationReport,
};
pub use metrics::{compare_formats, dominance_matrix, expected_matches, Dominance, MetricsError};
pub use signatures::{
    enumerate_bracket_signatures, swiss_record_profile, validate_bracket_signature, Record,
    SignatureError, SignatureReport,
};
pub use types::{
    BracketSignature, DynamicPolicy, Format, Match, MatchId, ModelError, Multibracket, PlaceRef,
    PlacementDistribution, Seed, Sink, SlotSide, Source, StrengthModel, SwissTiebreak,
    PROB_TOLERANCE,
};
