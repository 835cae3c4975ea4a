"""Instance generators and the dimension-optimality construction.

The central construction places 2n+m integer points in R^(n+m) (rejection
sampled until explicit rank certificates pass), splits them into color
groups of size k_i+2, and takes each family to be the fibers of the
orthogonal projection onto the group's affine span.  Any choice of one
fiber per family meets in exactly one point, so the colorful property
holds, yet no family admits a k_i-transversal: the group spans too many
affine dimensions to fit in any projected k_i-flat.  Truncating each
fiber to the hull of its incident tuple points preserves both properties
and produces V-polytope instances the partition machinery can consume.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .convex import AffineFlat, VPolytope
from .exactla import MalformedInputError, QMatrix, QVector, rank, solve_linear
from .reporting import CheckRecord
from .transversal import Family, Instance, check_colorful, k_transversal

FLATS = "flats"
TRUNCATED = "truncated"


class GeneralPositionError(ValueError):
    """A sampled point set failed one of the named rank certificates."""

    def __init__(self, check: CheckRecord):
        super().__init__(f"general position check failed: {check.name} {check.params}")
        self.check = check


class RetryExhaustedError(RuntimeError):
    """The rejection sampler ran out of attempts (pathological seed)."""


class CounterexampleInvalidError(ValueError):
    """A counterexample instance failed verification; names the check."""

    def __init__(self, check: CheckRecord):
        super().__init__(f"counterexample check failed: {check.name} {check.params}")
        self.check = check


def derive_seed(*parts) -> int:
    """Stable sub-seed from labels and integers; hash-based so parallel and
    serial generation draw identical streams."""
    text = ":".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


@dataclass
class GeneralPositionCertificate:
    """Named rank conditions certifying the sampled points are generic."""

    point_set: tuple
    parts: tuple  # one tuple of points per family
    checks: list = field(default_factory=list)


@dataclass
class CounterexampleInstance:
    instance: Instance
    representation: str  # FLATS or TRUNCATED
    tuple_points: dict  # member tuple (1-based) -> QVector
    certificate: GeneralPositionCertificate


def _member_tuples(ks):
    return itertools.product(*[range(1, k + 3) for k in ks])


def _difference_rows(points):
    base = points[0]
    return [p - base for p in points[1:]]


def _homogenized_rank(points) -> int:
    return rank(QMatrix(QVector(list(p.entries) + [1]) for p in points))


def _general_position_checks(ks, points):
    """Run every rank certificate; returns (checks, parts, fiber data).

    Fiber data is one difference-row matrix per family (a basis of the
    group's span directions) plus the solved tuple intersection points.
    The tuple systems stack the per-family orthogonality equations; a
    unique solution is exactly full rank, which is the genericity the
    construction actually uses.
    """
    n = len(ks)
    m = sum(ks)
    d = n + m
    checks = []
    ok = True

    parts = []
    at = 0
    for k in ks:
        parts.append(tuple(points[at : at + k + 2]))
        at += k + 2

    for subset in itertools.combinations(range(len(points)), d):
        passed = _homogenized_rank([points[i] for i in subset]) == d
        checks.append(
            CheckRecord(
                "affine-span-unique",
                "subset=(%s)" % ",".join(str(i + 1) for i in subset),
                passed,
            )
        )
        ok = ok and passed

    family_rows = []
    for i, group in enumerate(parts, start=1):
        passed = _homogenized_rank(group) == ks[i - 1] + 2
        checks.append(
            CheckRecord("family-affine-dim", f"family={i} expected={ks[i-1]+1}", passed)
        )
        ok = ok and passed
        family_rows.append(_difference_rows(group))

    tuple_points = {}
    for selector in _member_tuples(ks):
        rows = []
        rhs = []
        for i, choice in enumerate(selector):
            anchor = parts[i][choice - 1]
            for row in family_rows[i]:
                rows.append(row)
                rhs.append(row.dot(anchor))
        solution = solve_linear(QMatrix(rows), QVector(rhs))
        unique = solution is not None and not solution.kernel_basis
        checks.append(
            CheckRecord(
                "tuple-intersection-unique",
                "tuple=(%s)" % ",".join(str(c) for c in selector),
                unique,
            )
        )
        ok = ok and unique
        if unique:
            tuple_points[selector] = solution.particular

    return ok, checks, parts, family_rows, tuple_points


def counterexample_from_points(ks, points, representation: str = TRUNCATED) -> CounterexampleInstance:
    """Build the optimality instance from an explicit point set.

    Raises GeneralPositionError if any rank certificate fails; the
    rejection sampler in gen_counterexample relies on that.
    """
    ks = list(ks)
    if not ks or any(k < 0 for k in ks):
        raise MalformedInputError("need at least one non-negative target")
    if representation not in (FLATS, TRUNCATED):
        raise MalformedInputError(f"unknown representation {representation!r}")
    n = len(ks)
    m = sum(ks)
    d = n + m
    points = [p if isinstance(p, QVector) else QVector(p) for p in points]
    if len(points) != 2 * n + m or any(p.dim != d for p in points):
        raise MalformedInputError(f"need {2*n+m} points in dimension {d}")

    ok, checks, parts, family_rows, tuple_points = _general_position_checks(ks, points)
    if not ok:
        raise GeneralPositionError(next(c for c in checks if not c.passed))

    certificate = GeneralPositionCertificate(tuple(points), tuple(parts), checks)

    families = []
    if representation == FLATS:
        for i, group in enumerate(parts):
            span_rows = family_rows[i]
            fibers = []
            for anchor in group:
                kernel = solve_linear(
                    QMatrix(span_rows), QVector([row.dot(anchor) for row in span_rows])
                )
                fibers.append(AffineFlat(anchor, kernel.kernel_basis))
            families.append(Family(ks[i], tuple(fibers)))
    else:
        for i in range(n):
            members = []
            for j in range(1, ks[i] + 3):
                gens = [
                    tuple_points[t] for t in sorted(tuple_points) if t[i] == j
                ]
                members.append(VPolytope(tuple(gens)))
            families.append(Family(ks[i], tuple(members)))

    instance = Instance(d, tuple(families))
    return CounterexampleInstance(instance, representation, tuple_points, certificate)


def gen_counterexample(
    ks,
    seed: int,
    representation: str = TRUNCATED,
    box_side: int = 1000,
    max_tries: int = 200,
) -> CounterexampleInstance:
    """Sample an optimality instance at dimension n+m.

    Integer coordinates are drawn uniformly from a box of the given side and
    rejected until every general-position certificate passes.  Identical
    (ks, seed, representation) arguments reproduce the instance exactly.
    """
    ks = list(ks)
    n = len(ks)
    if n < 1 or any(k < 0 for k in ks):
        raise MalformedInputError("need at least one non-negative target")
    m = sum(ks)
    d = n + m
    rng = random.Random(derive_seed("counterexample", tuple(ks), seed))
    half = box_side // 2
    for _ in range(max_tries):
        points = [
            QVector(rng.randint(-half, half) for _ in range(d))
            for _ in range(2 * n + m)
        ]
        try:
            return counterexample_from_points(ks, points, representation)
        except GeneralPositionError:
            continue
    raise RetryExhaustedError(
        f"no generic point set found in {max_tries} attempts (seed {seed})"
    )


def _truncated_families(ce: CounterexampleInstance):
    if ce.representation == TRUNCATED:
        return ce.instance.families
    ks = [f.k for f in ce.instance.families]
    families = []
    for i, k in enumerate(ks):
        members = []
        for j in range(1, k + 3):
            gens = [ce.tuple_points[t] for t in sorted(ce.tuple_points) if t[i] == j]
            members.append(VPolytope(tuple(gens)))
        families.append(Family(k, tuple(members)))
    return tuple(families)


def verify_counterexample(ce: CounterexampleInstance, jobs: int = 1):
    """Re-verify both halves of the optimality claim.

    (1) the colorful property holds on the instance as represented, (2) each
    color group spans k_i+1 affine dimensions, so no k_i-flat's projection
    can contain it, and (3) the partition decision returns no transversal
    for any family of the truncated representation.  Raises
    CounterexampleInvalidError on the first failed check; returns the check
    ledger otherwise.
    """
    checks = []

    colorful = check_colorful(ce.instance, jobs=jobs)
    record = CheckRecord(
        "colorful-property",
        f"tuples={len(ce.tuple_points)}",
        colorful.holds,
        "" if colorful.holds else f"failing tuple {colorful.failing_tuple}",
    )
    checks.append(record)
    if not colorful.holds:
        raise CounterexampleInvalidError(record)

    for i, group in enumerate(ce.certificate.parts, start=1):
        k = ce.instance.families[i - 1].k
        passed = _homogenized_rank(list(group)) == k + 2
        record = CheckRecord("family-affine-dim", f"family={i} expected={k+1}", passed)
        checks.append(record)
        if not passed:
            raise CounterexampleInvalidError(record)

    for i, fam in enumerate(_truncated_families(ce), start=1):
        witness = k_transversal(fam)
        record = CheckRecord(
            "no-transversal",
            f"family={i} k={fam.k}",
            witness is None,
            "" if witness is None else f"witness partition {witness.partition.label()}",
        )
        checks.append(record)
        if witness is not None:
            raise CounterexampleInvalidError(record)

    return checks


def gen_planted(dim: int, ks, seed: int) -> Instance:
    """Instance whose first family has a transversal planted by construction.

    A random k_1-flat is drawn, the first family's members each receive one
    point of it, and every member selected by a tuple shares that tuple's
    anchor point, so the colorful property holds as well.
    """
    ks = list(ks)
    if not ks or any(k < 0 for k in ks):
        raise MalformedInputError("need at least one non-negative target")
    if dim < 1 or dim < max(ks):
        raise MalformedInputError("ambient dimension too small for the targets")
    rng = random.Random(derive_seed("planted", dim, tuple(ks), seed))

    def random_point(spread=20):
        return QVector(rng.randint(-spread, spread) for _ in range(dim))

    base = random_point()
    directions = []
    while len(directions) < ks[0]:
        candidate = QVector(rng.randint(-5, 5) for _ in range(dim))
        trial = directions + [candidate]
        if rank(QMatrix(trial)) == len(trial):
            directions.append(candidate)

    planted = []
    for _ in range(ks[0] + 2):
        point = base
        for direction in directions:
            point = point + rng.randint(-5, 5) * direction
        planted.append(point)

    anchors = {t: random_point() for t in _member_tuples(ks)}

    families = []
    for i, k in enumerate(ks):
        members = []
        for j in range(1, k + 3):
            gens = [planted[j - 1]] if i == 0 else []
            gens += [anchors[t] for t in sorted(anchors) if t[i] == j]
            gens += [random_point() for _ in range(rng.randint(0, 2))]
            members.append(VPolytope(tuple(gens)))
        families.append(Family(k, tuple(members)))
    return Instance(dim, tuple(families))


def _scaled_box_sample(rng, gens):
    """Point inside the generators' bounding box scaled by two about its
    center, drawn from a 17-point rational grid per coordinate."""
    coords = []
    for c in range(gens[0].dim):
        values = [g[c] for g in gens]
        lo, hi = min(values), max(values)
        low_end = (3 * lo - hi) / 2  # center minus twice the half-width
        coords.append(low_end + Fraction(rng.randint(0, 16), 8) * (hi - lo))
    return QVector(coords)


def gen_colorful_random(ks, seed: int) -> Instance:
    """Random instance at the guarantee dimension n+m-1 with the colorful
    property enforced by per-tuple shared anchor points.

    Each tuple draws an anchor that becomes a generator of every member the
    tuple selects; members may gain a few noise generators inside twice
    their bounding box.  Anchor membership is re-verified before returning.
    """
    ks = list(ks)
    n = len(ks)
    if n < 1 or any(k < 0 for k in ks):
        raise MalformedInputError("need at least one non-negative target")
    dim = n + sum(ks) - 1
    if dim < 1:
        raise MalformedInputError("single family with k=0 has no ambient dimension")
    rng = random.Random(derive_seed("colorful-random", tuple(ks), seed))

    anchors = {
        t: QVector(rng.randint(-50, 50) for _ in range(dim))
        for t in _member_tuples(ks)
    }

    families = []
    for i, k in enumerate(ks):
        members = []
        for j in range(1, k + 3):
            gens = [anchors[t] for t in sorted(anchors) if t[i] == j]
            gens += [_scaled_box_sample(rng, gens) for _ in range(rng.randint(0, 2))]
            members.append(VPolytope(tuple(gens)))
        families.append(Family(k, tuple(members)))

    for selector, anchor in anchors.items():
        for i, choice in enumerate(selector):
            if anchor not in families[i].bodies[choice - 1].generators:
                raise AssertionError("anchor wiring broke the colorful property")
    return Instance(dim, tuple(families))
