import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from transversals.exactla import (
    LinearConstraint,
    MalformedInputError,
    PreconditionError,
    QMatrix,
    QVector,
    Relation,
    _phase_one,
    format_rational,
    lp_feasible,
    parse_rational,
    positive_functional,
    rank,
    solve_linear,
    strict_separation,
)

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=12)


def vectors(dim):
    return st.lists(rationals, min_size=dim, max_size=dim).map(QVector)


def spans_same_line(u, v):
    return all(a * v[0] == b * u[0] for a, b in zip(u, v)) or all(
        a * u[1] == b * v[1] for a, b in zip(u, v)
    )


class TestWireFormat:
    def test_round_trip(self):
        for q in (F(3), F(-7, 2), F(0), F(10**40, 3)):
            assert parse_rational(format_rational(q)) == q

    @pytest.mark.parametrize("bad", ["1.5", "3/-4", "3/0", "", "a", "1e3", "+3/0"])
    def test_rejects_lossy_or_malformed(self, bad):
        with pytest.raises(MalformedInputError):
            parse_rational(bad)

    def test_parse_normalizes(self):
        q = parse_rational("6/4")
        assert (q.numerator, q.denominator) == (3, 2)
        assert q.denominator > 0


class TestVectors:
    def test_floats_rejected(self):
        with pytest.raises(MalformedInputError):
            QVector([0.5, 1])

    def test_arithmetic(self):
        v = QVector([1, 2]) + QVector([F(1, 2), -1])
        assert v == QVector([F(3, 2), 1])
        assert v.dot(QVector([2, 2])) == 5
        assert -v == QVector([F(-3, 2), -1])

    def test_dim_mismatch(self):
        with pytest.raises(MalformedInputError):
            QVector([1]).dot(QVector([1, 2]))


class TestSolveLinear:
    def test_identity(self):
        solution = solve_linear(QMatrix.identity(2), QVector([3, 5]))
        assert solution.particular == QVector([3, 5])
        assert solution.kernel_basis == ()

    def test_one_equation_one_free_direction(self):
        solution = solve_linear(QMatrix([[1, 1]]), QVector([2]))
        assert solution.particular == QVector([2, 0])
        assert len(solution.kernel_basis) == 1
        assert spans_same_line(solution.kernel_basis[0], QVector([1, -1]))

    def test_contradictory_rows(self):
        assert solve_linear(QMatrix([[1, 0], [1, 0]]), QVector([0, 1])) is None

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 4), st.integers(1, 4), st.data())
    def test_substitution_property(self, cols, rows, data):
        matrix = QMatrix(
            [data.draw(st.lists(rationals, min_size=cols, max_size=cols)) for _ in range(rows)]
        )
        x0 = data.draw(vectors(cols))
        rhs = QVector(row.dot(x0) for row in matrix.rows)
        solution = solve_linear(matrix, rhs)
        assert solution is not None
        assert QVector(row.dot(solution.particular) for row in matrix.rows) == rhs
        for kvec in solution.kernel_basis:
            assert all(row.dot(kvec) == 0 for row in matrix.rows)
        assert len(solution.kernel_basis) == cols - rank(matrix)


class TestRank:
    def test_examples(self):
        assert rank(QMatrix.identity(3)) == 3
        assert rank(QMatrix([[1, 2], [2, 4]])) == 1
        # four planar points homogenized with a 1-column span the plane
        homogenized = QMatrix([[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 2, 1]])
        assert rank(homogenized) == 3

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 4), st.data())
    def test_rank_of_transpose(self, rows, cols, data):
        matrix = QMatrix(
            [data.draw(st.lists(rationals, min_size=cols, max_size=cols)) for _ in range(rows)]
        )
        assert rank(matrix) == rank(matrix.transpose())


class TestLpFeasible:
    def test_empty_interval(self):
        constraints = [
            LinearConstraint(QVector([-1]), Relation.LE, 0),
            LinearConstraint(QVector([1]), Relation.LE, -1),
        ]
        assert lp_feasible(constraints, 1) is None

    def test_single_equality(self):
        point = lp_feasible([LinearConstraint(QVector([1]), Relation.EQ, 1)], 1)
        assert point == QVector([1])

    def test_hull_intersection_of_intervals(self):
        # weights (a1, a2, b1, b2): pick the same value from [0,2] and [1,3]
        constraints = [
            LinearConstraint(QVector([0, 2, -1, -3]), Relation.EQ, 0),
            LinearConstraint(QVector([1, 1, 0, 0]), Relation.EQ, 1),
            LinearConstraint(QVector([0, 0, 1, 1]), Relation.EQ, 1),
        ]
        for j in range(4):
            unit = [0] * 4
            unit[j] = -1
            constraints.append(LinearConstraint(QVector(unit), Relation.LE, 0))
        weights = lp_feasible(constraints, 4)
        assert weights is not None
        value = 2 * weights[1]
        assert value == weights[2] + 3 * weights[3]
        assert F(1) <= value <= F(2)

    def test_strict_relation_margin(self):
        point = lp_feasible([LinearConstraint(QVector([1]), Relation.LT, 0)], 1)
        assert point is not None and point[0] < 0

    def test_dimension_mismatch(self):
        with pytest.raises(MalformedInputError):
            lp_feasible([LinearConstraint(QVector([1, 0]), Relation.EQ, 0)], 1)

    def test_infeasible_has_positive_phase_one_optimum(self):
        # x = 0 and x = 1 simultaneously, in standard form with x >= 0
        solution, infeasibility = _phase_one([[F(1)], [F(1)]], [F(0), F(1)])
        assert solution is None
        assert infeasibility > 0

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 5), st.data())
    def test_returned_points_satisfy_everything(self, dim, count, data):
        constraints = []
        for _ in range(count):
            normal = data.draw(vectors(dim))
            relation = data.draw(st.sampled_from(list(Relation)))
            rhs = data.draw(rationals)
            constraints.append(LinearConstraint(normal, relation, rhs))
        point = lp_feasible(constraints, dim)
        if point is not None:
            assert all(c.holds_at(point) for c in constraints)


def random_points(rng, dim, count, spread=8):
    return [
        QVector([rng.randint(-spread, spread) for _ in range(dim)])
        for _ in range(count)
    ]


def hulls_intersect(points_p, points_q):
    """Independent hull-intersection system in weight space."""
    np, nq = len(points_p), len(points_q)
    dim = points_p[0].dim
    width = np + nq
    constraints = []
    for c in range(dim):
        row = [p[c] for p in points_p] + [-q[c] for q in points_q]
        constraints.append(LinearConstraint(QVector(row), Relation.EQ, 0))
    constraints.append(
        LinearConstraint(QVector([1] * np + [0] * nq), Relation.EQ, 1)
    )
    constraints.append(
        LinearConstraint(QVector([0] * np + [1] * nq), Relation.EQ, 1)
    )
    for j in range(width):
        unit = [0] * width
        unit[j] = -1
        constraints.append(LinearConstraint(QVector(unit), Relation.LE, 0))
    return lp_feasible(constraints, width) is not None


class TestStrictSeparation:
    def test_two_points(self):
        normal, offset = strict_separation([QVector([0])], [QVector([1])])
        assert normal.dot(QVector([0])) < offset < normal.dot(QVector([1]))

    def test_point_inside_hull(self):
        assert strict_separation([QVector([0]), QVector([2])], [QVector([1])]) is None

    def test_parallel_segments(self):
        left = [QVector([0, 1]), QVector([0, 3])]
        right = [QVector([1, 0]), QVector([1, 2])]
        normal, offset = strict_separation(left, right)
        assert all(normal.dot(p) < offset for p in left)
        assert all(normal.dot(q) > offset for q in right)

    def test_empty_input(self):
        with pytest.raises(MalformedInputError):
            strict_separation([], [QVector([1])])

    def test_duality_against_hull_intersection(self):
        rng = random.Random(20240817)
        disagreements = 0
        for trial in range(120):
            dim = rng.choice([1, 2, 3])
            points_p = random_points(rng, dim, rng.randint(1, 4))
            points_q = random_points(rng, dim, rng.randint(1, 4))
            separated = strict_separation(points_p, points_q) is not None
            intersecting = hulls_intersect(points_p, points_q)
            if separated == intersecting:
                disagreements += 1
        assert disagreements == 0


class TestPositiveFunctional:
    def test_symmetric_case(self):
        v = positive_functional(
            [QVector([1, 0]), QVector([0, 1])], [0, 0], QVector([1, 1]), QVector([-1, -1])
        )
        assert v == QVector([2, 2])
        assert v.dot(QVector([1, 0])) == 2 and v.dot(QVector([0, 1])) == 2

    def test_one_dimensional(self):
        v = positive_functional([QVector([1])], [5], QVector([6]), QVector([0]))
        assert v == QVector([6])

    def test_oriented_pair(self):
        normals = [QVector([-1, 0]), QVector([-1, -1])]
        offsets = [F(-1, 2), F(-2)]
        v = positive_functional(normals, offsets, QVector([0, 1]), QVector([1, 2]))
        assert v == QVector([-1, -1])
        assert v.dot(normals[0]) == 1 and v.dot(normals[1]) == 2

    def test_violation_names_the_index(self):
        with pytest.raises(PreconditionError, match="index 2"):
            positive_functional(
                [QVector([1]), QVector([-1])], [0, 0], QVector([1]), QVector([-1])
            )

    @settings(max_examples=80, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 5), st.data())
    def test_always_positive_under_hypothesis(self, dim, count, data):
        above = data.draw(vectors(dim))
        below = data.draw(vectors(dim))
        normals = []
        offsets = []
        for _ in range(count):
            normal = data.draw(vectors(dim))
            lo, hi = below.dot(normal), above.dot(normal)
            if not lo < hi:
                normal = -normal
                lo, hi = below.dot(normal), above.dot(normal)
            if not lo < hi:
                return  # above and below agree against this normal; skip draw
            offsets.append(lo + (hi - lo) * F(1, 3))
            normals.append(normal)
        v = positive_functional(normals, offsets, above, below)
        assert all(v.dot(n) > 0 for n in normals)


class TestSimplexTermination:
    def test_degenerate_fuzz(self):
        rng = random.Random(99)
        for trial in range(150):
            m = rng.randint(1, 5)
            n = rng.randint(1, 6)
            rows = [
                [F(rng.choice([-1, 0, 0, 1, 2])) for _ in range(n)] for _ in range(m)
            ]
            if trial % 3 == 0 and m > 1:
                rows[-1] = list(rows[0])  # duplicated constraint
            rhs = [F(rng.choice([0, 0, 0, 1])) for _ in range(m)]
            solution, infeasibility = _phase_one(rows, rhs)
            if solution is None:
                assert infeasibility > 0
            else:
                for row, b in zip(rows, rhs):
                    assert sum(a * x for a, x in zip(row, solution)) == b
                assert all(x >= 0 for x in solution)
