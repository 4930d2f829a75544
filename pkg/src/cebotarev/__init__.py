"""Executable calculus of Čebotarev sets over finite Galois groups and over ℚ.

Submodules: ``finite_group``, ``cset_core``, ``rationals``, ``signature``,
``topology``, ``metric`` and ``cli``.
"""

from .finite_group import (
    FiniteGroup, Subgroup, ConjClass, GroupError, build_group, builtin, conjugacy_classes,
    centralizer, quotient, sylow_and_cyclicity, heisenberg,
)
from .cset_core import (
    GaloisContext, CebClassSet, ContextError, context_from_spec, make_cset, lift_to_level,
    intersect, union, density, is_disjoint, almost_subset, almost_equal, bauer_subset,
    complement_unramified, isolated_sufficient,
)
from .rationals import (
    Frobenius, QuadField, FieldError, kronecker, frobenius, primes, sieve_stats,
    multiquad_context, assignment_from_prime, exceptional_primes,
)
from .signature import Atom, FinPresSet, SignatureSpace
from .topology import certify_clopen, complement, refine_partition, separate_primes
from .metric import MetricConfig, Hierarchy, delta, delta_matrix, level_partition, compat_report

__version__ = "0.1.0"
