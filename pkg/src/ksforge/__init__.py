"""Kochen-Specker hypergraph toolkit.

Masters from exact vector components, 0-1 assignment checks, canonical
labeling, subgraph and loop search, and downward class generation.
"""

from __future__ import annotations

from .canon import automorphism_generators, canonical_form, canonical_key, dedup_stream, is_isomorphic
from .cyclotomic import CycloRational, CyclotomicField, cyclotomic_field, hermitian_inner, normalize_ray, parse_component
from .data import fixture_names, load_fixture
from .master import (
    ComponentSet,
    MasterSet,
    build_master,
    decompose,
    decompose_master,
    find_coordinatization,
    is_connected,
    ray_embedding,
    verify_coordinatization,
)
from .mmp import Coordinatization, Hypergraph, MMPParseError, parse_line, parse_lines, serialize
from .pipeline import ClassRecord, Distribution, StripSpec, generate_class, stats, strip
from .states01 import KsVerdict, find_parity_subsets, has_parity_proof, is_critical, is_ks, solve01
from .structure import LoopResult, delta_pairs, find_max_loop, subgraph_embedding, subgraph_of, verify_loop

__version__ = "0.1.0"
