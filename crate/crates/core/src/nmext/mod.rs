//! Two-source non-malleable extractor: advice generator, flip-flop,
//! correlation breaker with advice, and the profile registry that binds
//! concrete constants to every role.

mod pipeline;
mod profile;

pub use pipeline::{
    advice_gen, two_advcb, two_ff, two_nmext, two_nmext_trace, two_nmext_with, AdviceString, NmExtractor, Pipeline,
    Trace, MAX_TABLE_BITS,
};
pub use profile::{
    parse_registry, profile, ParameterProfile, ProfileParams, Registry, Roles, BUILTIN_REGISTRY, PROFILE_DIR_ENV,
};
