//! Scriptable front end for the foliation engine.
//!
//! A session file declares an affine chart, a distribution of vector
//! fields, and named ideals, then walks them through admissibility
//! checks, blowups, coordinate changes, and assertions. Each statement
//! produces one structured report entry; the collected entries render as
//! indented text or deterministic JSON.

pub mod ast;
pub mod parser;
pub mod report;
pub mod runner;
pub mod suggest;

/// Bundled example sessions, exposed so tests and the `golden`
/// subcommand agree on the exact bytes.
pub const GOLDEN_SESSIONS: &[(&str, &str, &str)] = &[
    (
        "resolution",
        include_str!("../sessions/resolution.fol"),
        include_str!("../golden/resolution.json"),
    ),
    (
        "nilpotent-step-one",
        include_str!("../sessions/nilpotent-step-one.fol"),
        include_str!("../golden/nilpotent-step-one.json"),
    ),
    (
        "nilpotent-step-two",
        include_str!("../sessions/nilpotent-step-two.fol"),
        include_str!("../golden/nilpotent-step-two.json"),
    ),
];
