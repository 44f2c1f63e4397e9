"""Finite windows of automorphism-group compactification semigroups."""

from ._oligoscope import (
    DomainError,
    central_idempotents,
    check_projection,
    classify_stability,
    compose,
    count_orbits,
    coupling_central_idempotents,
    coupling_compose,
    coupling_identity,
    coupling_partition_idempotents,
    enumerate_age,
    find_order_witness,
    green_leq,
    involution,
    is_idempotent,
    operator_norm,
    pair_type_count,
    roelcke_distance,
    star_closure,
)

__all__ = [
    "DomainError",
    "central_idempotents",
    "check_projection",
    "classify_stability",
    "compose",
    "count_orbits",
    "coupling_central_idempotents",
    "coupling_compose",
    "coupling_identity",
    "coupling_partition_idempotents",
    "enumerate_age",
    "find_order_witness",
    "green_leq",
    "involution",
    "is_idempotent",
    "operator_norm",
    "pair_type_count",
    "roelcke_distance",
    "star_closure",
]
