//! Filtrations of refining partitions and the sequences adapted to them.
mod experiments;
mod filtration;
mod ops;
pub mod random;
mod stopping;

pub use experiments::{run_experiment, ExperimentParams, ExperimentTrace, TraceCheck, EXPERIMENTS};
pub use filtration::{conditional_expectation, AdaptedSequence, Filtration};
pub use ops::{
    classify, doob_constant, doob_decompose, doob_lp_check, increment_surrogates,
    integrate_norms, l1_bound, maximal_function, uniform_integrability, weak_type_check,
    Classification, DoobDecomposition, DoobLpReport, IntegrabilityRow, SeqClass, WeakTypeReport,
    Witness,
};
pub use stopping::{
    optional_stopping_check, stop, stopped_sequence, OptionalStoppingReport, Stopped, StoppingTime,
};
