"""Natarajan, VC, and VCN_k dimensions; growth functions; growth-bound
certification.

The shattering search is exhaustive with explicit caps (default: candidate
set size <= 6, domain <= 64).  A capped result is reported as ``AtLeast`` and
never conflated with an exact value.
"""

from dataclasses import dataclass
from itertools import combinations, product
from math import comb

from . import indexing, templates
from .hypotheses import canonical_key


@dataclass(frozen=True)
class AtLeast:
    """Returned when the search hit its cap: the dimension is >= n."""

    n: int

    def __int__(self):
        return self.n


@dataclass(frozen=True)
class FunctionFamily:
    domain: tuple  # opaque points
    functions: tuple  # tuples of values aligned with domain

    def __post_init__(self):
        for f in self.functions:
            if len(f) != len(self.domain):
                raise ValueError("function not total on domain")


def _shattered(functions, idxs):
    """Natarajan-shattering check for the domain positions ``idxs``."""
    restr = {tuple(f[i] for i in idxs) for f in functions}
    if len(restr) < 2 ** len(idxs):
        return False
    for g0 in restr:
        for g1 in restr:
            if any(a == b for a, b in zip(g0, g1)):
                continue
            if all(
                tuple(g1[i] if bit else g0[i] for i, bit in enumerate(bits)) in restr
                for bits in product((0, 1), repeat=len(idxs))
            ):
                return True
    return False


def _collapse(fam):
    """Drop domain points that cannot sit inside any shattered set: points
    realizing fewer than two values, and duplicates of an identical column
    (two identical columns can never realize the (f0, f1) mixture patterns).
    """
    if not fam.functions:
        return fam
    seen = set()
    keep = []
    for i in range(len(fam.domain)):
        col = tuple(f[i] for f in fam.functions)
        if len(set(col)) < 2 or col in seen:
            continue
        seen.add(col)
        keep.append(i)
    return FunctionFamily(
        tuple(fam.domain[i] for i in keep),
        tuple(tuple(f[i] for i in keep) for f in fam.functions),
    )


def natarajan_dim(fam, cap=6, domain_cap=64):
    fam = _collapse(fam)
    if len(fam.domain) > domain_cap:
        raise ValueError("domain exceeds the search cap")
    if not fam.functions:
        return 0
    n = len(fam.domain)
    best = 0
    for size in range(1, min(cap, n) + 1):
        found = False
        for idxs in combinations(range(n), size):
            if _shattered(fam.functions, idxs):
                found = True
                break
        if not found:
            return best
        best = size
    if best == cap and cap < n:
        return AtLeast(cap)
    return best


def natarajan_witness(fam, d, domain_cap=64):
    """A size-d shattered position set with its witness pair (g0, g1), or
    None.  Indices refer to the original (uncollapsed) domain."""
    if len(fam.domain) > domain_cap:
        raise ValueError("domain exceeds the search cap")
    for idxs in combinations(range(len(fam.domain)), d):
        restr = {tuple(f[i] for i in idxs) for f in fam.functions}
        for g0 in restr:
            for g1 in restr:
                if any(a == b for a, b in zip(g0, g1)):
                    continue
                if all(
                    tuple(g1[i] if bit else g0[i] for i, bit in enumerate(bits))
                    in restr
                    for bits in product((0, 1), repeat=d)
                ):
                    return idxs, g0, g1
    return None


def vc_dim(fam, cap=6, domain_cap=64):
    values = {v for f in fam.functions for v in f}
    if len(values) > 2:
        raise ValueError("VC dimension needs a binary family")
    return natarajan_dim(fam, cap, domain_cap)


# ---------------------------------------------------------------------------
# slices of hypothesis classes


def slice_domains_nonpartite(cls):
    """The coordinates a non-partite slice function varies over: all index
    sets within [k] that contain the new vertex k."""
    return [a for a in indexing.subsets(cls.k, cls.k) if cls.k in a]


def slice_points_nonpartite(cls):
    """All x in E_{[k-1]}(Omega)."""
    return templates.config_points(cls.template, cls.k - 1)


def slice_family_nonpartite(cls, x):
    """The unary family H(x): restrictions of the class to extensions of x."""
    keys = slice_domains_nonpartite(cls)
    ranges = [range(cls.template.size(len(a))) for a in keys]
    points = [dict(zip(keys, vals)) for vals in product(*ranges)]
    domain = tuple(canonical_key(z) for z in points)
    if cls.explicit:
        functions = {
            tuple(H({**x, **z}) for z in points) for H in cls.members
        }
    elif cls.restrictions is not None:
        functions = set(cls.restrictions(x, points))
    else:
        raise ValueError("structured class without a restriction enumerator")
    return FunctionFamily(domain, tuple(sorted(functions)))


def slice_points_partite(cls, a_missing):
    keys = [
        f
        for f in indexing.part_indices(cls.k, 1)
        if a_missing not in {p for p, _ in f}
    ]
    ranges = [range(cls.template.size(tuple(p for p, _ in f))) for f in keys]
    return [dict(zip(keys, vals)) for vals in product(*ranges)]


def slice_extension_points_partite(cls, a_missing):
    """The domain of an ``a_missing`` slice family: all value assignments to
    the coordinates whose domain contains the missing part."""
    keys = [
        f for f in indexing.part_indices(cls.k, 1) if a_missing in {p for p, _ in f}
    ]
    ranges = [range(cls.template.size(tuple(p for p, _ in f))) for f in keys]
    return [dict(zip(keys, vals)) for vals in product(*ranges)]


def slice_family_partite(cls, a_missing, x):
    points = slice_extension_points_partite(cls, a_missing)
    domain = tuple(canonical_key(z) for z in points)
    if cls.explicit:
        functions = {tuple(H({**x, **z}) for z in points) for H in cls.members}
    elif cls.restrictions is not None:
        functions = set(cls.restrictions((a_missing, x), points))
    else:
        raise ValueError("structured class without a restriction enumerator")
    return FunctionFamily(domain, tuple(sorted(functions)))


def _slices(cls):
    if cls.partite:
        for a_missing in range(1, cls.k + 1):
            for x in slice_points_partite(cls, a_missing):
                yield slice_family_partite(cls, a_missing, x)
    else:
        for x in slice_points_nonpartite(cls):
            yield slice_family_nonpartite(cls, x)


def vcn_k(cls, cap=6, domain_cap=64):
    """Exact supremum of the slice Natarajan dimensions over the finite
    (truncated) slice index set."""
    best = 0
    for fam in _slices(cls):
        d = natarajan_dim(fam, cap, domain_cap)
        if isinstance(d, AtLeast):
            return d
        best = max(best, d)
    return best


def family_on_full_domain(cls):
    """The class viewed as a plain function family over its whole arity-k
    configuration space (used for classic VC on binary classes)."""
    if cls.partite:
        points = templates.partite_config_points(cls.template, 1)
    else:
        points = templates.config_points(cls.template, cls.k)
    domain = tuple(canonical_key(x) for x in points)
    functions = tuple(sorted({tuple(H(x) for x in points) for H in cls.members}))
    return FunctionFamily(domain, functions)


def growth_function(cls, m):
    """tau^k(m): the largest number of distinct restrictions of a slice
    family to an m-point subset of its domain.  Slices smaller than m
    contribute their full-domain restriction count."""
    best = 1
    for fam in _slices(cls):
        n = len(fam.domain)
        if n <= m:
            best = max(best, len(set(fam.functions)))
            continue
        for idxs in combinations(range(n), m):
            best = max(best, len({tuple(f[i] for i in idxs) for f in fam.functions}))
    return best


def falling_factorial(n, j):
    out = 1
    for i in range(j):
        out *= n - i
    return out


def growth_bound(vcn, m, L):
    """Both displayed forms of the growth bound; the first (falling
    factorial) dominates the measured growth function, the second is the
    looser power form."""
    pairs = comb(L, 2)
    tight = falling_factorial(m + 1, min(vcn, m + 1)) * pairs**vcn
    loose = (m + 1) ** vcn * pairs**vcn
    return tight, loose


def ssp_bound(nat, n_points, L):
    """Size bound for a family on n_points points with Natarajan dimension
    nat: (n+1)^nat * binom(L,2)^nat."""
    return (n_points + 1) ** nat * comb(L, 2) ** nat
