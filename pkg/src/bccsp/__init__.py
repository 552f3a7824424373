"""Workbench for finite process terms with choice, interleaving and CCS-style
communication: semantics, behavioural equivalences, equational axiom systems,
parallel-operator elimination with replayable proofs, finite counter-models,
and evidence generators for the non-axiomatisability arguments.
"""

from .terms import (
    Alphabet,
    Nil,
    Par,
    ParseError,
    Prefix,
    Sum,
    Term,
    Var,
    depth,
    free_vars,
    make_alphabet,
    norm,
    parse,
    render,
    size,
    strip_nil,
    substitute,
    sum_of,
    summands,
)
from .semantics import (
    Lts,
    TransitionMode,
    build_lts,
    completed_traces,
    derivatives,
    initials,
    lts_dot,
    lts_json,
    traces,
    transitions,
)
from .observations import (
    OBSERVATION_KINDS,
    failure_pairs,
    failure_traces,
    observation_set,
    observations_json,
    possible_futures,
    ready_pairs,
    ready_traces,
)
from .equivalences import (
    FLAT_RELATIONS,
    NotRefuted,
    Refuted,
    SpectrumError,
    SubstitutionScheme,
    bisimilar,
    default_substitution_scheme,
    equivalent,
    nested_sim_eq,
    nested_trace_eq,
    parse_relation,
    refute_open,
    relation_name,
    sim_eq,
    simulation_preorder,
    spectrum_vector,
)
from .axioms import (
    AxiomSystem,
    Equation,
    PLAIN_SYSTEM_NAMES,
    SYNC_SYSTEM_NAMES,
    build_system,
    canonical_system_name,
    check_sound,
    is_saturated,
    minimal_obligations,
    saturate,
)
from .proofs import (
    Accepted,
    ProofBuilder,
    ProofError,
    ProofScript,
    Rejected,
    Step,
    check_proof,
    script_from_json,
    script_to_json,
)
from .eliminate import eliminate
from .models import FiniteModel, SearchResult, independence_report, search_model
from .witness import WitnessFamily, make_family, negative_evidence_report

__all__ = [
    "Alphabet",
    "Nil",
    "Par",
    "ParseError",
    "Prefix",
    "Sum",
    "Term",
    "Var",
    "depth",
    "free_vars",
    "make_alphabet",
    "norm",
    "parse",
    "render",
    "size",
    "strip_nil",
    "substitute",
    "sum_of",
    "summands",
    "Lts",
    "TransitionMode",
    "build_lts",
    "completed_traces",
    "derivatives",
    "initials",
    "lts_dot",
    "lts_json",
    "traces",
    "transitions",
    "OBSERVATION_KINDS",
    "failure_pairs",
    "failure_traces",
    "observation_set",
    "observations_json",
    "possible_futures",
    "ready_pairs",
    "ready_traces",
    "FLAT_RELATIONS",
    "NotRefuted",
    "Refuted",
    "SpectrumError",
    "SubstitutionScheme",
    "bisimilar",
    "default_substitution_scheme",
    "equivalent",
    "nested_sim_eq",
    "nested_trace_eq",
    "parse_relation",
    "refute_open",
    "relation_name",
    "sim_eq",
    "simulation_preorder",
    "spectrum_vector",
    "AxiomSystem",
    "Equation",
    "PLAIN_SYSTEM_NAMES",
    "SYNC_SYSTEM_NAMES",
    "build_system",
    "canonical_system_name",
    "check_sound",
    "is_saturated",
    "minimal_obligations",
    "saturate",
    "Accepted",
    "ProofBuilder",
    "ProofError",
    "ProofScript",
    "Rejected",
    "Step",
    "check_proof",
    "script_from_json",
    "script_to_json",
    "eliminate",
    "FiniteModel",
    "SearchResult",
    "independence_report",
    "search_model",
    "WitnessFamily",
    "make_family",
    "negative_evidence_report",
]
