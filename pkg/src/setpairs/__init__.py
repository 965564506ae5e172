"""Staged decomposition of (n,m)-systems, skew set-pair certificates and search."""

from .certificate import Certificate, certify
from .decomposition import Decomposition, Policy, run_decomposition
from .errors import Finding, InvalidInput, SetPairsError
from .recheck import check_certificate
from .search import SearchResult, SearchSpec, enumerate_systems, extremal_n, random_critical_family
from .setsystem import NMSystem, SetFamily, bounds_for_m, validate_nm_system
from .skew import SetPairSystem, bollobas_bound_check, verify_skew

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "Decomposition",
    "Finding",
    "InvalidInput",
    "NMSystem",
    "Policy",
    "SearchResult",
    "SearchSpec",
    "SetFamily",
    "SetPairSystem",
    "SetPairsError",
    "bollobas_bound_check",
    "bounds_for_m",
    "certify",
    "check_certificate",
    "enumerate_systems",
    "extremal_n",
    "random_critical_family",
    "run_decomposition",
    "validate_nm_system",
    "verify_skew",
]
