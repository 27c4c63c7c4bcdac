"""Numerical toolkit for absolute matrix summability of factored series."""
from .errors import (
    ConfigurationError,
    DomainError,
    PreconditionError,
    SummakitError,
    UnsupportedFamilyError,
)
from .sequences import (
    ClassId,
    RealSequence,
    SequenceClassCertificate,
    Tolerances,
    Verdict,
    cesaro_coeff,
    cesaro_coeff_asymptotic,
    certify_sequence_class,
    constant,
    from_array,
    partial_sums,
    sequence,
)
from .matrices import (
    DerivedEntries,
    Family,
    TriangularMatrix,
    ahat_closed_form,
    build_matrix,
    delta_ahat_closed_form,
    derive,
)
from .summability import (
    DecompositionRow,
    SeriesContext,
    SummabilityReport,
    a_transform,
    decomposition,
    factored_terms,
    preset_weights,
    series_context,
    summability_total,
)
from .conditions import (
    ConditionCertificate,
    ConditionInputs,
    ConditionSpec,
    bundle_verdict,
    catalog,
    evaluate_condition,
    evaluate_scenario,
    diagonal_weight_inputs,
)
from .fourier import (
    FourierSeries,
    PeriodicFunction,
    coefficients,
    local_property_experiment,
    localize,
    term_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DomainError",
    "PreconditionError",
    "SummakitError",
    "UnsupportedFamilyError",
    "ClassId",
    "RealSequence",
    "SequenceClassCertificate",
    "Tolerances",
    "Verdict",
    "cesaro_coeff",
    "cesaro_coeff_asymptotic",
    "certify_sequence_class",
    "constant",
    "from_array",
    "partial_sums",
    "sequence",
    "DerivedEntries",
    "Family",
    "TriangularMatrix",
    "ahat_closed_form",
    "build_matrix",
    "delta_ahat_closed_form",
    "derive",
    "DecompositionRow",
    "SeriesContext",
    "SummabilityReport",
    "a_transform",
    "decomposition",
    "factored_terms",
    "preset_weights",
    "series_context",
    "summability_total",
    "ConditionCertificate",
    "ConditionInputs",
    "ConditionSpec",
    "bundle_verdict",
    "catalog",
    "evaluate_condition",
    "evaluate_scenario",
    "diagonal_weight_inputs",
    "FourierSeries",
    "PeriodicFunction",
    "coefficients",
    "local_property_experiment",
    "localize",
    "term_sequence",
]
