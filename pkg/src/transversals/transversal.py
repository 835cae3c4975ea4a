"""Deciding k-flat transversals and the colorful intersection property.

A family of k+2 convex bodies admits a k-dimensional transversal flat
exactly when some two-block partition of the family has intersecting
pooled hulls; the decision procedure below searches the canonical
partitions in a fixed order and reconstructs an explicit witness (a
crossing point, one anchor point per member, and the spanning flat) from
the feasible combination.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .convex import (
    AffineFlat,
    UnsupportedRepresentationError,
    VPolytope,
    affine_span,
    common_point,
    contains,
)
from .exactla import MalformedInputError, QVector, _ONE, _ZERO, standard_form_feasible


class TheoremPreconditionError(ValueError):
    """The instance is not in theorem mode (dimension, family sizes, or the
    colorful property fail)."""


class TheoremViolationError(RuntimeError):
    """No family admitted a transversal on a valid theorem-mode instance.
    Unreachable unless there is a bug; callers treat it as a triage signal."""


@dataclass(frozen=True)
class Family:
    """One color class: a target flat dimension and its member bodies."""

    k: int
    bodies: tuple

    def __post_init__(self):
        if self.k < 0:
            raise MalformedInputError("target dimension k must be non-negative")
        bodies = tuple(self.bodies)
        if not bodies:
            raise MalformedInputError("family needs at least one body")
        if len({b.dim for b in bodies}) != 1:
            raise MalformedInputError("family bodies have mixed dimensions")
        object.__setattr__(self, "bodies", bodies)

    @property
    def dim(self) -> int:
        return self.bodies[0].dim


@dataclass(frozen=True)
class Instance:
    """An ambient dimension and the color families living in it."""

    dim: int
    families: tuple

    def __post_init__(self):
        if self.dim < 1:
            raise MalformedInputError("ambient dimension must be positive")
        families = tuple(self.families)
        if not families:
            raise MalformedInputError("instance needs at least one family")
        for fam in families:
            if fam.dim != self.dim:
                raise MalformedInputError("family dimension does not match instance")
        object.__setattr__(self, "families", families)

    @property
    def total_target(self) -> int:
        return sum(f.k for f in self.families)


@dataclass(frozen=True)
class Partition:
    """Two-block partition of {1..size} with 1 always in the first block."""

    part_a: tuple
    part_b: tuple

    def __post_init__(self):
        a = tuple(sorted(self.part_a))
        b = tuple(sorted(self.part_b))
        object.__setattr__(self, "part_a", a)
        object.__setattr__(self, "part_b", b)
        size = len(a) + len(b)
        if not a or not b or set(a) | set(b) != set(range(1, size + 1)) or set(a) & set(b):
            raise MalformedInputError("blocks must partition {1..size} nontrivially")
        if 1 not in a:
            raise MalformedInputError("canonical partitions keep member 1 in block A")

    @property
    def size(self) -> int:
        return len(self.part_a) + len(self.part_b)

    def label(self) -> str:
        fmt = lambda part: "{%s}" % ",".join(str(i) for i in part)
        return f"{fmt(self.part_a)}/{fmt(self.part_b)}"


def partitions(size: int):
    """All canonical two-block partitions of {1..size}: exactly
    2^(size-1) - 1 of them, ordered by |A| ascending then lexicographically."""
    if size < 2:
        raise MalformedInputError("partitions need size >= 2")
    rest = tuple(range(2, size + 1))
    result = []
    for a_size in range(1, size):
        for extra in itertools.combinations(rest, a_size - 1):
            a = (1,) + extra
            b = tuple(i for i in rest if i not in extra)
            result.append(Partition(a, b))
    return result


@dataclass(frozen=True)
class TransversalWitness:
    """Certificate that a family has a k-transversal: the crossing partition,
    the common point of the two pooled hulls, one anchor per member (each in
    its member and on the flat), and the spanning flat itself."""

    partition: Partition
    crossing_point: QVector
    anchor_points: tuple  # ((member_index, point), ...)
    flat: AffineFlat


def _partition_solution(members, part: Partition):
    """Feasibility system for 'pooled hull of A meets pooled hull of B' with
    one weight block per member; returns per-member weight lists or None."""
    d = members[0].dim
    sizes = [len(m.generators) for m in members]
    width = sum(sizes)
    offsets = []
    at = 0
    for s in sizes:
        offsets.append(at)
        at += s
    in_a = set(part.part_a)
    rows = []
    rhs = []
    for c in range(d):
        row = [_ZERO] * width
        for idx, member in enumerate(members, start=1):
            sign = _ONE if idx in in_a else -_ONE
            for j, g in enumerate(member.generators):
                row[offsets[idx - 1] + j] = sign * g[c]
        rows.append(row)
        rhs.append(_ZERO)
    for block in (part.part_a, part.part_b):
        row = [_ZERO] * width
        for idx in block:
            for j in range(sizes[idx - 1]):
                row[offsets[idx - 1] + j] = _ONE
        rows.append(row)
        rhs.append(_ONE)
    solution = standard_form_feasible(rows, rhs)
    if solution is None:
        return None
    return [
        solution[offsets[i] : offsets[i] + sizes[i]] for i in range(len(members))
    ]


def k_transversal(family: Family) -> Optional[TransversalWitness]:
    """Decide whether the family admits a k-dimensional transversal flat.

    Requires exactly k+2 members, all V-polytopes.  Scans the canonical
    partitions in order and, on the first feasible one, reconstructs anchors
    from the weight blocks: a member with positive aggregate weight
    contributes its weighted generator average, a zero-weight member its
    first generator (any of its points is valid).  Returns None exactly when
    every partition's pooled hulls are disjoint.
    """
    for body in family.bodies:
        if not isinstance(body, VPolytope):
            raise UnsupportedRepresentationError(
                "transversal decisions need V-polytopes; truncate flats first"
            )
    size = family.k + 2
    if len(family.bodies) != size:
        raise MalformedInputError(
            f"need exactly k+2 = {size} members, got {len(family.bodies)}"
        )
    members = family.bodies
    for part in partitions(size):
        weights = _partition_solution(members, part)
        if weights is None:
            continue
        anchors = []
        in_a = set(part.part_a)
        crossing = QVector([_ZERO] * family.dim)
        for idx, member in enumerate(members, start=1):
            block = weights[idx - 1]
            total = sum(block, _ZERO)
            if total > 0:
                combo = QVector([_ZERO] * family.dim)
                for w, g in zip(block, member.generators):
                    if w:
                        combo = combo + w * g
                anchors.append((idx, (1 / total) * combo))
                if idx in in_a:
                    crossing = crossing + combo
            else:
                anchors.append((idx, member.generators[0]))
        flat = affine_span([p for _, p in anchors])
        if flat.dimension > family.k:
            raise AssertionError("witness flat exceeds the target dimension")
        return TransversalWitness(part, crossing, tuple(anchors), flat)
    return None


def validate_witness(family: Family, witness: TransversalWitness) -> None:
    """Independent witness validation by exact substitution; raises
    ValueError on the first failed condition."""
    size = family.k + 2
    if witness.partition.size != size:
        raise ValueError("partition size does not match the family")
    if len(witness.anchor_points) != size:
        raise ValueError("witness must carry one anchor per member")
    for idx, point in witness.anchor_points:
        if not contains(family.bodies[idx - 1], point):
            raise ValueError(f"anchor for member {idx} lies outside the member")
        if not contains(witness.flat, point):
            raise ValueError(f"anchor for member {idx} is off the witness flat")
    anchors = dict(witness.anchor_points)
    for block in (witness.partition.part_a, witness.partition.part_b):
        hull = VPolytope(tuple(anchors[i] for i in block))
        if not contains(hull, witness.crossing_point):
            raise ValueError("crossing point misses one side's anchor hull")
    if witness.flat.dimension > family.k:
        raise ValueError("witness flat dimension exceeds k")


@dataclass
class ColorfulReport:
    """Outcome of the all-tuples intersection check."""

    holds: bool
    witnesses: dict = field(default_factory=dict)
    failing_tuple: Optional[tuple] = None


def _member_tuples(instance: Instance):
    return itertools.product(
        *[range(1, len(f.bodies) + 1) for f in instance.families]
    )


def check_colorful(instance: Instance, jobs: int = 1) -> ColorfulReport:
    """Decide the colorful intersection property: every choice of one member
    per family must have a common point.

    Returns per-tuple witness points when it holds, otherwise the
    lexicographically first failing tuple.  ``jobs`` may parallelize the
    independent per-tuple solves; the report is reduced in canonical tuple
    order either way.
    """
    families = instance.families
    tuples = list(_member_tuples(instance))

    def solve(selector):
        bodies = [
            families[i].bodies[selector[i] - 1] for i in range(len(families))
        ]
        return common_point(bodies)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(solve, tuples))
        for selector, point in zip(tuples, points):
            if point is None:
                return ColorfulReport(False, {}, selector)
        return ColorfulReport(True, dict(zip(tuples, points)))

    witnesses = {}
    for selector in tuples:
        point = solve(selector)
        if point is None:
            return ColorfulReport(False, {}, selector)
        witnesses[selector] = point
    return ColorfulReport(True, witnesses)


@dataclass
class TheoremReport:
    """First family admitting a transversal, with its witness."""

    family_index: int  # 1-based
    witness: TransversalWitness


def verify_theorem(instance: Instance, jobs: int = 1) -> TheoremReport:
    """Check the transversal guarantee on a theorem-mode instance.

    Preconditions are verified, not assumed: the ambient dimension must be
    (number of families) + (sum of targets) - 1, every family must have
    exactly k+2 members, and the colorful property must hold.  Returns the
    first family with a witness; raises TheoremViolationError if none has
    one, which is unreachable on valid input and treated as a bug signal.
    """
    n = len(instance.families)
    m = instance.total_target
    expected_dim = n + m - 1
    if instance.dim != expected_dim:
        raise TheoremPreconditionError(
            f"theorem mode needs dimension {expected_dim}, instance has {instance.dim}"
        )
    for i, fam in enumerate(instance.families, start=1):
        if len(fam.bodies) != fam.k + 2:
            raise TheoremPreconditionError(
                f"family {i} needs {fam.k + 2} members, has {len(fam.bodies)}"
            )
    colorful = check_colorful(instance, jobs=jobs)
    if not colorful.holds:
        raise TheoremPreconditionError(
            f"colorful intersection fails at tuple {colorful.failing_tuple}"
        )
    for i, fam in enumerate(instance.families, start=1):
        witness = k_transversal(fam)
        if witness is not None:
            return TheoremReport(i, witness)
    raise TheoremViolationError(
        "no family admits a transversal on a valid theorem-mode instance"
    )
