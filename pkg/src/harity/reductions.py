"""The partite <-> non-partite bridge.

Partization: the diagonal maps phi_m / Phi_m and the learner conversion from
partite back to non-partite.  Departization: the randomized conversion of a
partite sample into a non-partite one over a tagged ground space, with exact
law oracles for tiny instances.  Plus finite disintegration, neutral-symbol
and flexibility compositions, dummy-variable stripping, and codomain
extension.

Composite randomness uses a fixed mixed-radix encoding, most significant
first: (b, b_noise, sigma in factorial base, U per coordinate, U' per
coordinate); coordinates enumerate in the canonical size-then-lex order.
"""

import math
from fractions import Fraction
from itertools import combinations, product
from math import comb, factorial

from . import indexing, learners, losses, templates
from .hypotheses import (
    Hypothesis,
    HypothesisClass,
    partize_hypothesis,
    perms,
    unpartize_hypothesis,
)

BOTTOM = losses.BOTTOM


# ---------------------------------------------------------------------------
# partization maps


def phi_m(x, m, k):
    """Fold a non-partite config over [m] into a partite one with floor(m/k)
    vertices per part: coordinate f reads x at {(i-1)*floor(m/k) + f(i)}."""
    q = m // k
    if q < 1:
        raise ValueError("m must be at least k")
    out = {}
    for f in indexing.part_indices(k, q):
        subset = tuple(sorted((i - 1) * q + v for i, v in f))
        out[f] = x[subset]
    return out


def phi_m_labels(y, m, k):
    """Phi_m: fold an injection-indexed label tensor into a partite tensor of
    full patterns."""
    q = m // k
    if q < 1:
        raise ValueError("m must be at least k")
    ps = perms(k)
    out = {}
    for alpha in product(range(1, q + 1), repeat=k):
        beta = tuple((i - 1) * q + alpha[i - 1] for i in range(1, k + 1))
        out[alpha] = tuple(y[indexing.compose(beta, tau)] for tau in ps)
    return out


def nonpartite_from_partite_learner(A2, template, labels, name=""):
    """Wrap a partite learner into a non-partite one by folding the sample
    through phi_m / Phi_m and unfolding the output hypothesis."""
    k = A2.k

    def fn(x, y, b):
        m = learners.nonpartite_size(x)
        G = A2(phi_m(x, m, k), phi_m_labels(y, m, k), b)
        return unpartize_hypothesis(G, template, labels)

    return learners.Learner(
        k,
        fn,
        lambda m: A2.r(m // k),
        partite=False,
        name=name or f"unpartized({A2.name})",
    )


def nonpartite_sample_size(m_partite, k):
    """k points per part suffice to fold: non-partite size k * ceil(m)."""
    return k * math.ceil(m_partite)


# ---------------------------------------------------------------------------
# finite disintegration


def disintegrate_finite(nu, n_tags):
    """Split a finite measure on points x tags into its point marginal and
    the tag kernel: eta(x)(j) = nu(x, j) / marginal(x).  Exact rationals;
    reconstruction nu(V x J) = sum_x marginal(x) * eta(x)(J) holds exactly."""
    marginal = {}
    for (x, _), p in nu.items():
        marginal[x] = marginal.get(x, Fraction(0)) + Fraction(p)
    kernel = {
        x: tuple(Fraction(nu.get((x, j), 0)) / w for j in range(n_tags))
        for x, w in marginal.items()
        if w > 0
    }
    return marginal, kernel


# ---------------------------------------------------------------------------
# tagged ground spaces


def tag_count(k, arity):
    return comb(k, arity)


def tag_index(k, subset):
    """Canonical index of a size-|subset| part set within binom([k], .)."""
    return list(combinations(range(1, k + 1), len(subset))).index(tuple(subset))


def tag_subset(k, arity, index):
    return list(combinations(range(1, k + 1), arity))[index]


def encode_tagged(value, tag, k, arity):
    return value * tag_count(k, arity) + tag


def decode_tagged(point, k, arity):
    return divmod(point, tag_count(k, arity))


def tagged_template(base, k):
    """Ground spaces Omega_i x [binom(k, i)]."""
    return templates.Template(
        k, tuple(base.size(i) * tag_count(k, i) for i in range(1, k + 1))
    )


def tagged_prob(mu, k):
    """Product of mu with the uniform tag measure at every arity."""
    t = tagged_template(mu.template, k)
    weights = []
    for i in range(1, k + 1):
        c = tag_count(k, i)
        weights.append(
            tuple(w / c for w in mu.weights[i - 1] for _ in range(c))
        )
    return templates.ProbTemplate(t, tuple(weights))


def untag_config(xhat, k):
    return {key: xhat[key] // tag_count(k, len(key)) for key in xhat}


def untagged_hypothesis(H, k, t_tagged):
    """View a hypothesis over the base spaces as one over the tagged spaces
    (tags ignored)."""
    return Hypothesis(
        H.k,
        t_tagged,
        H.labels,
        lambda x: H(untag_config(x, k)),
        name=H.name + "^tag",
        declared_rank=H.declared_rank,
    )


def tag_class(cls, k):
    t = tagged_template(cls.template, k)
    return HypothesisClass(
        cls.k,
        t,
        cls.labels,
        tuple(untagged_hypothesis(H, k, t) for H in cls.members),
        name=cls.name + "^tag",
    )


# ---------------------------------------------------------------------------
# departization


def sigma_alpha(sigma, alpha):
    """The unique permutation tau of [k] making sigma^{-1} o alpha o tau
    increasing."""
    inv = indexing.invert(sigma)
    vals = [inv[a - 1] for a in alpha]
    order = sorted(range(len(alpha)), key=lambda i: vals[i])
    return tuple(i + 1 for i in order)


def departize_sample(x, y, sigma, U, Uprime, k, bottom=BOTTOM):
    """One departization step.

    ``x``: partite sample (m vertices per part) over a partization-shaped
    template; ``y``: labels indexed by [m]^k with full-pattern values;
    ``sigma``: permutation of [m]; ``U``/``Uprime``: per non-empty subset C of
    [m] with |C| <= k, a sorted part set of size |C|.  Returns a non-partite
    sample over the tagged ground spaces with scalar labels in Lambda union
    {bottom}: a label survives exactly when both tag assignments agree with
    the part sets induced by sigma on the injection's image.
    """
    m = len(sigma)
    inv = indexing.invert(sigma)
    xhat = {}
    for C in indexing.subsets(m, k):
        UC = U[C]
        pre = sorted(inv[c - 1] for c in C)
        key = tuple(
            (u, sigma[pre[idx] - 1]) for idx, u in enumerate(UC)
        )
        xhat[C] = encode_tagged(x[key], tag_index(k, UC), k, len(C))
    ps = perms(k)
    pindex = {p: i for i, p in enumerate(ps)}
    yhat = {}
    for alpha in indexing.injections(m, k):
        tau = sigma_alpha(sigma, alpha)
        tau_inv = indexing.invert(tau)
        good = True
        for C in indexing.subsets(k, k):
            img = tuple(sorted(alpha[c - 1] for c in C))
            want = tuple(sorted(tau_inv[c - 1] for c in C))
            if U[img] != want or Uprime[img] != want:
                good = False
                break
        if good:
            beta = indexing.compose(alpha, tau)
            yhat[alpha] = y[beta][pindex[tau_inv]]
        else:
            yhat[alpha] = bottom
    return xhat, yhat


def departize_p(k):
    """Probability that a fixed injection's labels survive departization:
    prod over non-empty C within [k] of binom(k, |C|)^{-2}."""
    p = Fraction(1)
    for c in indexing.subsets(k, k):
        p /= comb(k, len(c)) ** 2
    return p


def departize_r(r_a, m, k):
    """Randomness count R_A(m) * m! * prod_i binom(k,i)^(2 binom(m,i))."""
    out = r_a(m) * factorial(m)
    for i in range(1, k + 1):
        out *= comb(k, i) ** (2 * comb(m, i))
    return out


def _tag_radices(m, k):
    return [tag_count(k, len(c)) for c in indexing.subsets(m, k)]


def decode_mixed(index, radices):
    """Mixed-radix decode, most significant digit first."""
    out = []
    for rad in reversed(radices):
        index, d = divmod(index, rad)
        out.append(d)
    if index:
        raise ValueError("randomness index out of range")
    return list(reversed(out))


def decode_departize_randomness(index, r_a, m, k):
    """Split a composite index into (b, sigma, U, Uprime)."""
    tags = _tag_radices(m, k)
    digits = decode_mixed(index, [r_a(m), factorial(m)] + tags + tags)
    b = digits[0]
    sigma = indexing.injections(m, m)[digits[1]]
    coords = indexing.subsets(m, k)
    U = {
        c: tag_subset(k, len(c), d)
        for c, d in zip(coords, digits[2 : 2 + len(coords)])
    }
    Uprime = {
        c: tag_subset(k, len(c), d)
        for c, d in zip(coords, digits[2 + len(coords) :])
    }
    return b, sigma, U, Uprime


def departize_learner(A, k, base_template, labels, name=""):
    """Wrap a non-partite learner over the tagged spaces (labels including
    the neutral symbol) into a partite learner for the partization class."""

    def fn(x, y, b):
        m = learners.partite_size(x)
        ba, sigma, U, Uprime = decode_departize_randomness(b, A.r, m, k)
        xhat, yhat = departize_sample(x, y, sigma, U, Uprime, k)
        H = A(xhat, yhat, ba)
        base = Hypothesis(
            k, base_template, labels, lambda z: H(tag_zero(z, k)), name="dep"
        )
        return partize_hypothesis(base)

    return learners.Learner(
        k,
        fn,
        lambda m: departize_r(A.r, m, k),
        partite=True,
        name=name or f"departized({A.name})",
    )


def tag_zero(x, k):
    """Embed a base config into the tagged spaces with all tags 0."""
    return {key: encode_tagged(x[key], 0, k, len(key)) for key in x}


def delta_tilde(eps, delta, sup_norm):
    """Confidence discount for the neutral-symbol composition."""
    return min(
        Fraction(eps) * Fraction(delta) / (2 * Fraction(sup_norm)), Fraction(1, 2)
    )


def neutral_sample_size(m_a, eps, delta, sup_norm):
    return m_a(Fraction(eps) / 2, delta_tilde(eps, delta, sup_norm))


def delta_hat(eps, delta, sup_norm, k):
    """Confidence discount for the full departization composition."""
    p = departize_p(k)
    e, d, s = Fraction(eps), Fraction(delta), Fraction(sup_norm)
    return min(p * e * e * d / (8 * s * s), p * e / (8 * s), Fraction(1, 2))


def departize_sample_size(m_a, eps, delta, sup_norm, k):
    return m_a(departize_p(k) * Fraction(eps) / 2, delta_hat(eps, delta, sup_norm, k))


# ---------------------------------------------------------------------------
# exact departization laws (tiny-instance oracles)


def _randomness_atoms(m, k):
    coords = indexing.subsets(m, k)
    tag_choices = [
        list(combinations(range(1, k + 1), len(c))) for c in coords
    ]
    n_sigma = factorial(m)
    total = n_sigma
    for t in tag_choices:
        total *= len(t) ** 2
    weight = Fraction(1, total)
    for sigma in indexing.injections(m, m):
        for u_vals in product(*tag_choices):
            U = dict(zip(coords, u_vals))
            for up_vals in product(*tag_choices):
                Uprime = dict(zip(coords, up_vals))
                yield sigma, U, Uprime, weight


def departize_construction_law(mu_part, mu2_part, F_part, m, k):
    """Exact law of the departized (sample, labels) built from the partite
    construction: x visible, labels from F on the joined sample, randomness
    uniform."""
    from .hypotheses import star_partite

    t1, t2 = mu_part.template, mu2_part.template
    law = {}
    for x, p in templates.partite_config_law(mu_part, m):
        for xp, q in templates.partite_config_law(mu2_part, m):
            joined = templates.join_partite_config(t1, t2, x, xp)
            y = star_partite(F_part, joined, m)
            for sigma, U, Uprime, w in _randomness_atoms(m, k):
                xhat, yhat = departize_sample(x, y, sigma, U, Uprime, k)
                key = (tuple(sorted(xhat.items())), tuple(sorted(yhat.items())))
                law[key] = law.get(key, Fraction(0)) + p * q * w
    return law


def departize_discrete_law(mu_base, mu2_base, F_part, m, k):
    """Exact law of the discrete equivalent: per-coordinate values from the
    base measures with independent uniform tags, a uniform permutation, and
    labels computed by pulling the joined values back through the induced
    part assignment."""
    t1, t2 = mu_base.template, mu2_base.template
    coords = indexing.subsets(m, k)
    n_tags = [tag_count(k, len(c)) for c in coords]
    ps = perms(k)
    pindex = {p: i for i, p in enumerate(ps)}
    law = {}
    tags_weight = Fraction(1)
    for n in n_tags:
        tags_weight /= n * n
    sig_weight = Fraction(1, factorial(m))
    for x, p in templates.config_law(mu_base, m):
        for xp, q in templates.config_law(mu2_base, m):
            for jtags in product(*[range(n) for n in n_tags]):
                jmap = dict(zip(coords, jtags))
                for jptags in product(*[range(n) for n in n_tags]):
                    jpmap = dict(zip(coords, jptags))
                    xhat = {
                        c: encode_tagged(x[c], jmap[c], k, len(c)) for c in coords
                    }
                    for sigma in indexing.injections(m, m):
                        yhat = {}
                        for alpha in indexing.injections(m, k):
                            tau = sigma_alpha(sigma, alpha)
                            tau_inv = indexing.invert(tau)
                            good = True
                            for C in indexing.subsets(k, k):
                                img = tuple(sorted(alpha[c - 1] for c in C))
                                want = tag_index(
                                    k,
                                    tuple(sorted(tau_inv[c - 1] for c in C)),
                                )
                                if jmap[img] != want or jpmap[img] != want:
                                    good = False
                                    break
                            if not good:
                                yhat[alpha] = BOTTOM
                                continue
                            pulled = indexing.pullback(
                                indexing.compose(alpha, tau),
                                templates.join_config(t1, t2, x, xp),
                            )
                            pat = F_part(indexing.phi_k(pulled))
                            yhat[alpha] = pat[pindex[tau_inv]]
                        key = (
                            tuple(sorted(xhat.items())),
                            tuple(sorted(yhat.items())),
                        )
                        law[key] = law.get(key, Fraction(0)) + (
                            p * q * tags_weight * sig_weight
                        )
    return law


# ---------------------------------------------------------------------------
# neutral-symbol composition


def neutral_symbol_learner(A, witness):
    """Wrap a learner so it tolerates the neutral symbol: before running A,
    every label entry touched by the symbol is replaced by the flexibility
    witness's noise source (non-partite: an entry is replaced when any
    injection with the same image carries the symbol; partite: entrywise)."""

    def fn(x, y, b):
        m = (
            learners.partite_size(x)
            if A.partite
            else learners.nonpartite_size(x)
        )
        ba, bn = divmod(b, witness.r_n(m))
        noise = witness.noise(x, bn, m)
        if A.partite:
            y2 = {
                alpha: (noise[alpha] if v == BOTTOM else v)
                for alpha, v in y.items()
            }
        else:
            bad = {frozenset(a) for a, v in y.items() if v == BOTTOM}
            y2 = {
                alpha: (noise[alpha] if frozenset(alpha) in bad else v)
                for alpha, v in y.items()
            }
        return A(x, y2, ba)

    return learners.Learner(
        A.k,
        fn,
        lambda m: A.r(m) * witness.r_n(m),
        partite=A.partite,
        name=f"neutral({A.name})",
    )


# ---------------------------------------------------------------------------
# dummy variables and codomain extension


def strip_dummy(A, anchors):
    """Make a learner invariant under the coordinate arities in ``anchors``
    by overwriting them with fixed points before the learner sees the
    sample."""

    def fn(x, y, b):
        x2 = {
            key: (anchors[len(key)] if len(key) in anchors else v)
            for key, v in x.items()
        }
        return A(x2, y, b)

    return learners.Learner(
        A.k, fn, A.r, partite=A.partite, name=f"stripped({A.name})"
    )


def extend_codomain(cls, extra_labels, y0=None):
    """The same class over an enlarged label set, plus the learner transfer
    that replaces out-of-range labels by a fixed in-range one."""
    labels2 = cls.labels + tuple(extra_labels)
    members2 = None
    if cls.explicit:
        members2 = tuple(
            Hypothesis(H.k, H.template, labels2, H.fn, H.name, H.declared_rank)
            for H in cls.members
        )
    cls2 = HypothesisClass(
        cls.k,
        cls.template,
        labels2,
        members2,
        name=cls.name + "+ext",
        erm=cls.erm,
        membership=cls.membership,
        restrictions=cls.restrictions,
    )
    fill = cls.labels[0] if y0 is None else y0
    known = set(cls.labels)

    def transfer(A):
        def fn(x, y, b):
            y2 = {a: (v if v in known else fill) for a, v in y.items()}
            return A(x, y2, b)

        return learners.Learner(
            A.k, fn, A.r, partite=A.partite, name=f"ext({A.name})"
        )

    return cls2, transfer
