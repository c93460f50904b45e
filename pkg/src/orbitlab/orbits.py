"""Characters of a nilpotent Lie ring, the coadjoint action, and orbits.

A character is an additive map chi: g -> Q_p/Z_p, stored by its values on
the basis.  Exp(g) acts by (g.chi)(y) = chi(conjugate(g^-1, y)); orbits,
stabilizers, and the skew form B_chi(x, y) = chi([x, y]) are all computed
exhaustively at desk scale, since the point is to verify the kernel =
stabilizer statement rather than assume it.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .arith import Modulus, ModMatrix, QpModZp, kernel
from .lazard import Subring, batch_conjugate, all_elements, conjugate

DUAL_CAP = 5 ** 7


class OrbitError(ValueError):
    pass


class Character:
    """Additive map to Q_p/Z_p; nums[i] is the numerator of chi(e_i) at
    level k, so chi(x) = sum x_i nums[i] / p^k."""

    def __init__(self, ring, nums):
        self.ring = ring
        self.nums = tuple(int(a) % ring.pk for a in nums)
        if len(self.nums) != ring.rank:
            raise ValueError(f"expected {ring.rank} covector entries")

    @classmethod
    def from_values(cls, ring, values):
        nums = []
        for v in values:
            if isinstance(v, str):
                v = QpModZp.parse(ring.p, v)
            elif not isinstance(v, QpModZp):
                v = QpModZp.from_fraction(ring.p, v)
            if v.level > ring.k:
                raise ValueError(f"character value {v} has level > k = {ring.k}")
            nums.append(v.numerator * ring.p ** (ring.k - v.level))
        return cls(ring, nums)

    def value(self, x):
        a = sum(c * n for c, n in zip(x, self.nums)) % self.ring.pk
        return QpModZp(self.ring.p, a, self.ring.k)

    def covector(self):
        return tuple(QpModZp(self.ring.p, a, self.ring.k) for a in self.nums)

    def is_zero(self):
        return not any(self.nums)

    def __eq__(self, other):
        return (isinstance(other, Character) and self.ring is other.ring
                and self.nums == other.nums)

    def __hash__(self):
        return hash(self.nums)

    def __repr__(self):
        return "Character(" + ", ".join(str(v) for v in self.covector()) + ")"


def coadjoint_matrix(ring, g):
    """Rows are the coordinates of conjugate(g^-1, e_j); acting on a
    covector is multiplication by this matrix."""
    ginv = ring.neg(g)
    return tuple(conjugate(ring, ginv, ring.basis(j)) for j in range(ring.rank))


def coadjoint_act(g, chi):
    ring = chi.ring
    m = coadjoint_matrix(ring, g)
    nums = tuple(sum(m[j][i] * chi.nums[i] for i in range(ring.rank)) % ring.pk
                 for j in range(ring.rank))
    return Character(ring, nums)


class SkewForm:
    """Gram data of B_chi(e_i, e_j) = chi([e_i, e_j]), numerators at level k."""

    def __init__(self, chi):
        self.ring = chi.ring
        self.chi = chi
        ring, pk, n = self.ring, self.ring.pk, self.ring.rank

        def raw(x):
            return sum(c * a for c, a in zip(x, chi.nums)) % pk

        self.nums = tuple(
            tuple(raw(ring.bracket(ring.basis(i), ring.basis(j)))
                  for j in range(n))
            for i in range(n))
        for i in range(n):
            if self.nums[i][i] != 0:
                raise OrbitError(f"B_chi(e_{i}, e_{i}) nonzero")
            for j in range(n):
                if (self.nums[i][j] + self.nums[j][i]) % pk != 0:
                    raise OrbitError(f"B_chi not antisymmetric at ({i}, {j})")

    def value(self, x, y):
        a = sum(x[i] * self.nums[i][j] * y[j]
                for i in range(self.ring.rank)
                for j in range(self.ring.rank)) % self.ring.pk
        return QpModZp(self.ring.p, a, self.ring.k)

    def gram(self):
        return tuple(tuple(QpModZp(self.ring.p, a, self.ring.k) for a in row)
                     for row in self.nums)


def radical(form):
    """{x : B_chi(x, y) = 0 for all y}, the left kernel of the Gram matrix.

    By the kernel = stabilizer statement this is the stabilizer Lie ring,
    so a bracket-closure failure here would be a counterexample and is
    raised rather than ignored.
    """
    ring = form.ring
    ker = kernel(ModMatrix(ring.modulus, [list(r) for r in form.nums]))
    sub = Subring(ring, [tuple(r) for r in ker.rows])
    if not sub.is_lie_subring():
        raise OrbitError(
            f"radical of chi = {form.chi} is not closed under bracket")
    return sub


class CoadjointOrbit:
    """Orbit record: lexicographically minimal representative, size, and
    the radical of B_rep standing in for the stabilizer (the exhaustive
    oracle is separate); size * |stabilizer| = |G| is enforced here, which
    cross-checks the two against orbit-stabilizer counting."""

    def __init__(self, rep, size):
        self.rep = rep
        self.size = size
        self.stabilizer = radical(SkewForm(rep))
        order = rep.ring.size()
        if self.size * self.stabilizer.size() != order:
            raise OrbitError(
                f"orbit size {self.size} times stabilizer size "
                f"{self.stabilizer.size()} is not |G| = {order} at rep {rep}")

    def __repr__(self):
        return f"CoadjointOrbit(rep={self.rep!r}, size={self.size})"


def dual_size(ring):
    return ring.pk ** ring.rank


def _dual_table(ring):
    """All covectors lexicographically, plus index weights."""
    chis = np.array(list(itertools.product(range(ring.pk), repeat=ring.rank)),
                    dtype=np.int64)
    weights = ring.pk ** np.arange(ring.rank - 1, -1, -1, dtype=np.int64)
    return chis, weights

def _generator_perms(ring, chis, weights, workers=1):
    mats = [np.array(coadjoint_matrix(ring, ring.basis(t)), dtype=np.int64)
            for t in range(ring.rank)]

    def perm(m):
        return ((chis @ m.T) % ring.pk) @ weights

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(perm, mats))
    return [perm(m) for m in mats]


def enumerate_orbits(ring, cap=DUAL_CAP, workers=1):
    """Partition the dual space into coadjoint orbits.

    Breadth-first closure under the action of the basis one-parameter
    elements Exp(e_t); these generate G, and in a finite group the
    semigroup they generate is the full group, so no inverses are needed.
    Seeds are scanned in lexicographic order, which makes each orbit's
    representative the lexicographically minimal member.
    """
    n = dual_size(ring)
    if cap is not None and n > cap:
        raise OrbitError(
            f"dual space has {n} characters, above the cap {cap}; "
            f"raise the cap or use sampled checks")
    chis, weights = _dual_table(ring)
    perms = _generator_perms(ring, chis, weights, workers=workers)
    visited = np.zeros(n, dtype=bool)
    orbits = []
    for seed in range(n):
        if visited[seed]:
            continue
        visited[seed] = True
        frontier = np.array([seed], dtype=np.int64)
        size = 1
        while frontier.size:
            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    images = list(pool.map(lambda p: p[frontier], perms))
            else:
                images = [p[frontier] for p in perms]
            nxt = np.unique(np.concatenate(images))
            nxt = nxt[~visited[nxt]]
            visited[nxt] = True
            size += int(nxt.size)
            frontier = nxt
        rep = Character(ring, tuple(int(c) for c in chis[seed]))
        orbits.append(CoadjointOrbit(rep, size))
    assert sum(o.size for o in orbits) == n
    return orbits


def orbit_histogram(orbits):
    hist = {}
    for o in orbits:
        hist[o.size] = hist.get(o.size, 0) + 1
    return dict(sorted(hist.items()))


def _coadjoint_tensor(ring, cap):
    """(|G|, n, n) array: row g gives the matrix of g acting on covectors."""
    cached = getattr(ring, "_coadjoint_tensor", None)
    if cached is not None:
        return cached
    if ring.size() > cap:
        raise OrbitError(
            f"|G| = {ring.size()} exceeds the exhaustive-scan cap {cap}")
    elems = all_elements(ring)
    neg = (-elems) % ring.pk
    cols = []
    for j in range(ring.rank):
        ej = np.tile(np.eye(1, ring.rank, j, dtype=np.int64), (len(elems), 1))
        cols.append(batch_conjugate(ring, neg, ej))
    tensor = np.stack(cols, axis=1)
    ring._coadjoint_tensor = (elems, tensor)
    return elems, tensor


def stabilizer_oracle(chi, cap=DUAL_CAP):
    """{g : g.chi = chi} by exhaustive scan over the group.

    Deliberately independent of the radical computation.  The fixed set is
    a subgroup of Exp(g); the scan also confirms it is closed under
    addition before packaging it as a Subring, so the return value
    represents the set faithfully.
    """
    ring = chi.ring
    elems, tensor = _coadjoint_tensor(ring, cap)
    a = np.array(chi.nums, dtype=np.int64)
    moved = (tensor @ a) % ring.pk
    fixed = np.all(moved == a[None, :], axis=1)
    members = elems[fixed]
    gens = []
    sub = Subring(ring, gens)
    for row in members:
        x = tuple(int(v) for v in row)
        if not sub.contains(x):
            gens.append(x)
            sub = Subring(ring, gens)
    if sub.size() != len(members):
        raise OrbitError(
            f"stabilizer of {chi} is not additively closed: "
            f"{len(members)} fixed points, span of size {sub.size()}")
    return sub


def _coordinate_subalgebras(ring):
    """Basis-coordinate spans closed under bracket, as index subsets."""
    cached = getattr(ring, "_coord_subalgebras", None)
    if cached is not None:
        return cached
    out = []
    for bits in range(1, 2 ** ring.rank):
        subset = [i for i in range(ring.rank) if bits >> i & 1]
        span = Subring(ring, [ring.basis(i) for i in subset])
        if span.is_lie_subring():
            out.append((tuple(subset), span))
    ring._coord_subalgebras = out
    return out


def kernel_lemma_check(ring, chi, rng=None, cap=DUAL_CAP):
    """The two-sided verification that the stabilizer is the radical.

    Asserts stabilizer_oracle(chi) and radical(B_chi) coincide as
    canonical subgroups, then spot-checks the perpendicularity statement:
    for subalgebras a with [b, a] <= a, chi and b.chi agree on a exactly
    when B_chi(b, a) = 0.  Returns a report dict; any failure raises with
    the witness.
    """
    form = SkewForm(chi)
    rad = radical(form)
    stab = stabilizer_oracle(chi, cap=cap)
    if rad.rows != stab.rows:
        raise OrbitError(
            f"stabilizer differs from radical at chi = {chi}: "
            f"radical rows {rad.rows}, stabilizer rows {stab.rows}")
    tested = 0
    bs = [ring.basis(i) for i in range(ring.rank)]
    if rng is not None:
        bs += [ring.random_element(rng) for _ in range(2)]
    for b in bs:
        moved = coadjoint_act(b, chi)
        for subset, span in _coordinate_subalgebras(ring):
            if not all(span.contains(ring.bracket(b, ring.basis(i)))
                       for i in subset):
                continue
            agree = all(moved.value(ring.basis(i)) == chi.value(ring.basis(i))
                        for i in subset)
            perp = all(form.value(b, ring.basis(i)).is_zero() for i in subset)
            if agree != perp:
                raise OrbitError(
                    f"perpendicularity violated at chi = {chi}, b = {b}, "
                    f"subalgebra on coordinates {subset}: "
                    f"agree = {agree}, perpendicular = {perp}")
            tested += 1
    return {
        "chi": chi.nums,
        "stabilizer_size": stab.size(),
        "radical_size": rad.size(),
        "equal": True,
        "perp_cases": tested,
    }


def generic_character(ring):
    """Character dual to the deepest lower-central coordinate, scaled
    1/p^k; for the bundled rings this has the smallest possible radical."""
    last = ring.lcs[-1][-1]
    pivot = next(i for i, v in enumerate(last) if v)
    nums = [0] * ring.rank
    nums[pivot] = 1
    return Character(ring, nums)


def all_characters(ring):
    for nums in itertools.product(range(ring.pk), repeat=ring.rank):
        yield Character(ring, nums)


def sample_characters(ring, count, rng):
    for _ in range(count):
        yield Character(ring, tuple(rng.randrange(ring.pk)
                                    for _ in range(ring.rank)))
