//! Step functions, measures and maximal functions on dyadic intervals of `[0,1)`.
mod lacunary;
mod maximal;
mod rademacher;
mod step;

pub use lacunary::{
    coefficient_energy, collapsed_moment, lacunary_moment, LacunaryMoment, LACUNARY_K_GUARD,
    LACUNARY_TERM_GUARD,
};
pub use maximal::{
    constant_one_witness, covering_reduce, dyadic_maximal, hl_maximal_weak_type,
    max_multiplicity, maximal_level_sets, union_of, HlReport, LevelSet, Open,
};
pub use rademacher::{
    even_moment_constant, fourth_moment_closed_form, khintchine_report, lower_constant,
    product_integral, rademacher, rademacher_moment, rademacher_sum, sup_of_sum, walsh, walsh_gram_is_identity,
    MomentReport, SignAverageReport, SIGN_ENUMERATION_GUARD,
};
pub use step::{check_dyadic_location, dyadic_average, DyadicMeasure, DyadicStep, MAX_LEVEL};
