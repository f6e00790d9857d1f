//! The single-pass container machine: one left-to-right sweep over the
//! vertex order, growing level multisets P_s behind a set of degree
//! thresholds, with a prune mode that extracts a fingerprint T from an input
//! set and a build mode that reconstructs the container C from T.

mod cover;
mod invariants;
mod run;
mod thresholds;
mod trace_text;

pub use cover::{
    degree_condition, overspecification_holds, sample_between, strong_cover, weak_constants,
    weak_cover, CoverOutcome, WeakConstants,
};
pub use invariants::{
    check_invariants, decisions_agree, random_vertex_subsets, RANDOM_SET_SAMPLES,
};
pub use run::{
    online_equality, prune_then_build, run, run_with, Decision, EngineParams, GammaRecord,
    GammaScan, Mode, RunTrace,
};
pub use thresholds::{theta, ThresholdKind, Thresholds};
pub use trace_text::render_trace;
