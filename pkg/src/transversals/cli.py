"""Command-line front end, instance file format, and report emission.

Instances are single JSON documents.  Every coordinate is a rational
string ("3" or "-7/2"), never a numeric literal, so no consumer can
silently round.  Reports mirror the same conventions; witnesses they
carry re-validate through the library.

Exit codes are stable: 0 success / affirmative decision, 1 negative
decision, 2 precondition or parse failure, 3 theorem violation (a bug
signal), 4 generator retry exhaustion.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from .certificate import (
    CertificateInconsistencyError,
    ColorfulViolationError,
    full_certificate,
)
from .convex import AffineFlat, UnsupportedRepresentationError, VPolytope
from .exactla import MalformedInputError, QVector, format_rational, parse_rational
from .generators import (
    FLATS,
    TRUNCATED,
    RetryExhaustedError,
    gen_colorful_random,
    gen_counterexample,
    gen_planted,
)
from .transversal import (
    Family,
    Instance,
    Partition,
    TheoremPreconditionError,
    TheoremViolationError,
    TransversalWitness,
    check_colorful,
    k_transversal,
    partitions,
    verify_theorem,
)
from .exactla import strict_separation

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_PRECONDITION = 2
EXIT_THEOREM_VIOLATION = 3
EXIT_RETRY_EXHAUSTED = 4


class InstanceFormatError(ValueError):
    """Malformed instance document; the message carries the JSON location."""


# ---------------------------------------------------------------------------
# serialization


def _vector_to_json(vector: QVector):
    return [format_rational(e) for e in vector]


def _vector_from_json(obj, where: str, dim=None) -> QVector:
    if not isinstance(obj, list) or not obj:
        raise InstanceFormatError(f"{where}: expected a nonempty coordinate list")
    try:
        entries = [parse_rational(e) for e in obj]
    except MalformedInputError as exc:
        raise InstanceFormatError(f"{where}: {exc}") from exc
    if dim is not None and len(entries) != dim:
        raise InstanceFormatError(
            f"{where}: expected {dim} coordinates, got {len(entries)}"
        )
    return QVector(entries)


def _body_to_json(body):
    if isinstance(body, VPolytope):
        return {
            "type": "vpolytope",
            "points": [_vector_to_json(g) for g in body.generators],
        }
    return {
        "type": "flat",
        "base": _vector_to_json(body.base),
        "directions": [_vector_to_json(d) for d in body.directions],
    }


def _body_from_json(obj, where: str, dim: int):
    if not isinstance(obj, dict):
        raise InstanceFormatError(f"{where}: expected an object")
    kind = obj.get("type")
    if kind == "vpolytope":
        points = obj.get("points")
        if not isinstance(points, list) or not points:
            raise InstanceFormatError(f"{where}.points: expected a nonempty list")
        return VPolytope(
            tuple(
                _vector_from_json(p, f"{where}.points[{i}]", dim)
                for i, p in enumerate(points)
            )
        )
    if kind == "flat":
        base = _vector_from_json(obj.get("base"), f"{where}.base", dim)
        directions = obj.get("directions", [])
        if not isinstance(directions, list):
            raise InstanceFormatError(f"{where}.directions: expected a list")
        dirs = tuple(
            _vector_from_json(d, f"{where}.directions[{i}]", dim)
            for i, d in enumerate(directions)
        )
        try:
            return AffineFlat(base, dirs)
        except MalformedInputError as exc:
            raise InstanceFormatError(f"{where}: {exc}") from exc
    raise InstanceFormatError(f"{where}.type: expected 'vpolytope' or 'flat'")


def instance_to_json(instance: Instance, meta=None) -> dict:
    doc = {
        "dimension": instance.dim,
        "families": [
            {"k": fam.k, "sets": [_body_to_json(b) for b in fam.bodies]}
            for fam in instance.families
        ],
    }
    if meta:
        doc["meta"] = meta
    return doc


def instance_from_json(doc):
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level: expected an object")
    dim = doc.get("dimension")
    if not isinstance(dim, int) or dim < 1:
        raise InstanceFormatError("dimension: expected a positive integer")
    families_obj = doc.get("families")
    if not isinstance(families_obj, list) or not families_obj:
        raise InstanceFormatError("families: expected a nonempty list")
    families = []
    for i, fam_obj in enumerate(families_obj):
        where = f"families[{i}]"
        if not isinstance(fam_obj, dict):
            raise InstanceFormatError(f"{where}: expected an object")
        k = fam_obj.get("k")
        if not isinstance(k, int) or k < 0:
            raise InstanceFormatError(f"{where}.k: expected a non-negative integer")
        sets = fam_obj.get("sets")
        if not isinstance(sets, list) or not sets:
            raise InstanceFormatError(f"{where}.sets: expected a nonempty list")
        bodies = tuple(
            _body_from_json(b, f"{where}.sets[{j}]", dim) for j, b in enumerate(sets)
        )
        families.append(Family(k, bodies))
    meta = doc.get("meta")
    if meta is not None and not isinstance(meta, dict):
        raise InstanceFormatError("meta: expected an object")
    return Instance(dim, tuple(families)), meta


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_instance(path: str, instance: Instance, meta=None) -> None:
    atomic_write(path, _dump_json(instance_to_json(instance, meta)))


def load_instance(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    except OSError as exc:
        raise InstanceFormatError(f"{path}: {exc}") from exc
    try:
        return instance_from_json(doc)
    except InstanceFormatError as exc:
        raise InstanceFormatError(f"{path}: {exc}") from exc


def partition_to_json(partition: Partition) -> dict:
    return {"a": list(partition.part_a), "b": list(partition.part_b)}


def partition_from_json(obj) -> Partition:
    return Partition(tuple(obj["a"]), tuple(obj["b"]))


def flat_to_json(flat: AffineFlat) -> dict:
    return {
        "base": _vector_to_json(flat.base),
        "directions": [_vector_to_json(d) for d in flat.directions],
    }


def witness_to_json(witness: TransversalWitness) -> dict:
    return {
        "partition": partition_to_json(witness.partition),
        "crossing_point": _vector_to_json(witness.crossing_point),
        "anchors": [
            {"member": idx, "point": _vector_to_json(p)}
            for idx, p in witness.anchor_points
        ],
        "flat": flat_to_json(witness.flat),
    }


def witness_from_json(obj) -> TransversalWitness:
    flat = AffineFlat(
        _vector_from_json(obj["flat"]["base"], "flat.base"),
        tuple(
            _vector_from_json(d, "flat.directions")
            for d in obj["flat"]["directions"]
        ),
    )
    return TransversalWitness(
        partition_from_json(obj["partition"]),
        _vector_from_json(obj["crossing_point"], "crossing_point"),
        tuple(
            (a["member"], _vector_from_json(a["point"], "anchors"))
            for a in obj["anchors"]
        ),
        flat,
    )


def _emit(report_doc, out):
    if out:
        atomic_write(out, _dump_json(report_doc))


# ---------------------------------------------------------------------------
# commands


def cmd_check_colorful(path: str, out=None, jobs: int = 1) -> int:
    try:
        instance, _ = load_instance(path)
    except InstanceFormatError as exc:
        print(f"error: {exc}")
        return EXIT_PRECONDITION
    report = check_colorful(instance, jobs=jobs)
    if report.holds:
        print(f"colorful-property holds tuples={len(report.witnesses)} PASS")
        doc = {
            "command": "check-colorful",
            "holds": True,
            "witnesses": [
                {"tuple": list(t), "point": _vector_to_json(p)}
                for t, p in sorted(report.witnesses.items())
            ],
        }
        _emit(doc, out)
        return EXIT_OK
    print(f"colorful-property tuple={report.failing_tuple} FAIL empty intersection")
    _emit(
        {
            "command": "check-colorful",
            "holds": False,
            "failing_tuple": list(report.failing_tuple),
        },
        out,
    )
    return EXIT_NEGATIVE


def cmd_transversal(path: str, family_index: int, out=None) -> int:
    try:
        instance, _ = load_instance(path)
    except InstanceFormatError as exc:
        print(f"error: {exc}")
        return EXIT_PRECONDITION
    if not 1 <= family_index <= len(instance.families):
        print(f"error: no family {family_index} (instance has {len(instance.families)})")
        return EXIT_PRECONDITION
    family = instance.families[family_index - 1]
    try:
        witness = k_transversal(family)
    except UnsupportedRepresentationError:
        print(
            "error: family contains affine flats; regenerate with "
            "--representation truncated"
        )
        return EXIT_PRECONDITION
    except MalformedInputError as exc:
        print(f"error: {exc}")
        return EXIT_PRECONDITION
    if witness is not None:
        print(
            f"transversal family={family_index} k={family.k} "
            f"partition={witness.partition.label()} PASS"
        )
        print(
            "  flat base=(%s) directions=[%s]"
            % (
                ",".join(format_rational(e) for e in witness.flat.base),
                " ".join(
                    "(%s)" % ",".join(format_rational(e) for e in d)
                    for d in witness.flat.directions
                ),
            )
        )
        _emit(
            {
                "command": "transversal",
                "family": family_index,
                "found": True,
                "witness": witness_to_json(witness),
            },
            out,
        )
        return EXIT_OK
    separations = []
    for part in partitions(family.k + 2):
        side_a = []
        for idx in part.part_a:
            side_a.extend(family.bodies[idx - 1].generators)
        side_b = []
        for idx in part.part_b:
            side_b.extend(family.bodies[idx - 1].generators)
        normal, offset = strict_separation(side_b, side_a)
        print(
            f"separated partition={part.label()} "
            f"normal=({','.join(format_rational(e) for e in normal)}) "
            f"offset={format_rational(offset)}"
        )
        separations.append(
            {
                "partition": partition_to_json(part),
                "normal": _vector_to_json(normal),
                "offset": format_rational(offset),
            }
        )
    print(f"transversal family={family_index} k={family.k} FAIL all partitions separated")
    _emit(
        {
            "command": "transversal",
            "family": family_index,
            "found": False,
            "separations": separations,
        },
        out,
    )
    return EXIT_NEGATIVE


def cmd_verify_theorem(path: str, out=None, jobs: int = 1) -> int:
    try:
        instance, _ = load_instance(path)
    except InstanceFormatError as exc:
        print(f"error: {exc}")
        return EXIT_PRECONDITION
    n = len(instance.families)
    m = instance.total_target
    if instance.dim == n + m:
        print(
            f"error: dimension {instance.dim} is the optimality dimension "
            f"n+m; use the certificate command for such instances"
        )
        return EXIT_PRECONDITION
    try:
        report = verify_theorem(instance, jobs=jobs)
    except TheoremPreconditionError as exc:
        print(f"error: {exc}")
        return EXIT_PRECONDITION
    except UnsupportedRepresentationError:
        print("error: instance contains affine flats; truncate before verifying")
        return EXIT_PRECONDITION
    except TheoremViolationError as exc:
        print(f"THEOREM-VIOLATION {exc}")
        print("offending instance follows for triage:")
        print(_dump_json(instance_to_json(instance)), end="")
        return EXIT_THEOREM_VIOLATION
    witness = report.witness
    print(
        f"theorem family={report.family_index} "
        f"partition={witness.partition.label()} PASS"
    )
    _emit(
        {
            "command": "verify-theorem",
            "family": report.family_index,
            "witness": witness_to_json(witness),
        },
        out,
    )
    return EXIT_OK


def cmd_generate(
    kind: str,
    ks,
    seed: int,
    representation: str = TRUNCATED,
    out_path: str = "instance.json",
    dim=None,
) -> int:
    ks = list(ks)
    meta = {"generator": kind, "ks": ks, "seed": seed}
    if kind == "counterexample":
        try:
            ce = gen_counterexample(ks, seed, representation)
        except RetryExhaustedError as exc:
            print(f"error: {exc}")
            return EXIT_RETRY_EXHAUSTED
        meta["representation"] = representation
        save_instance(out_path, ce.instance, meta)
        cert_lines = [c.ledger_line() for c in ce.certificate.checks]
        atomic_write(out_path + ".cert.txt", "\n".join(cert_lines) + "\n")
        print(f"wrote {out_path} and {out_path}.cert.txt")
        return EXIT_OK
    if kind == "planted":
        if dim is None:
            dim = len(ks) + sum(ks) - 1
        meta["dim"] = dim
        instance = gen_planted(dim, ks, seed)
    elif kind == "random":
        instance = gen_colorful_random(ks, seed)
    else:
        print(f"error: unknown generator kind {kind!r}")
        return EXIT_PRECONDITION
    save_instance(out_path, instance, meta)
    print(f"wrote {out_path}")
    return EXIT_OK


def cmd_certificate(path: str, out=None, jobs: int = 1) -> int:
    try:
        instance, _ = load_instance(path)
    except InstanceFormatError as exc:
        print(f"error: {exc}")
        return EXIT_PRECONDITION
    try:
        report = full_certificate(instance, jobs=jobs)
    except ColorfulViolationError as exc:
        print(f"error: {exc}")
        return EXIT_PRECONDITION
    except UnsupportedRepresentationError:
        print(
            "error: certificate needs V-polytopes; regenerate with "
            "--representation truncated"
        )
        return EXIT_PRECONDITION
    except CertificateInconsistencyError as exc:
        print(f"error: certificate inconsistency: {exc}")
        return EXIT_THEOREM_VIOLATION
    for line in report.ledger_lines():
        print(line)
    doc = {
        "command": "certificate",
        "verdict": report.verdict,
        "checks": [
            {
                "name": c.name,
                "params": c.params,
                "outcome": "PASS" if c.passed else "FAIL",
                "details": c.details,
            }
            for c in report.checks
        ],
    }
    if report.confirmed_family is not None:
        doc["family"] = report.confirmed_family
        doc["witness"] = witness_to_json(report.confirmed_witness)
    _emit(doc, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _parse_ks(text: str):
    try:
        ks = [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --ks list {text!r}")
    if not ks or any(k < 0 for k in ks):
        raise argparse.ArgumentTypeError("--ks needs non-negative integers")
    return ks


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transversals",
        description="Exact decisions for flat transversals of convex set families.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, family=False):
        p.add_argument("instance", help="instance file (JSON)")
        p.add_argument("--out", help="write a machine-readable report here")
        if family:
            p.add_argument(
                "--family", type=int, required=True, help="family index, 1-based"
            )
        else:
            p.add_argument(
                "--jobs", type=int, default=1, help="parallelism hint for solves"
            )

    p = sub.add_parser("check-colorful", help="decide the colorful intersection property")
    add_common(p)
    p = sub.add_parser("transversal", help="decide one family's k-transversal")
    add_common(p, family=True)
    p = sub.add_parser("verify-theorem", help="check the transversal guarantee")
    add_common(p)
    p = sub.add_parser("certificate", help="build or refute the separation certificate")
    add_common(p)

    p = sub.add_parser("generate", help="write a generated instance file")
    p.add_argument("kind", choices=["counterexample", "planted", "random"])
    p.add_argument("--ks", type=_parse_ks, required=True, help="comma list of targets")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument(
        "--representation",
        choices=[FLATS, TRUNCATED],
        default=TRUNCATED,
        help="counterexample member representation",
    )
    p.add_argument(
        "--dim", type=int, default=None, help="ambient dimension (planted kind only)"
    )
    p.add_argument("--out", required=True, help="instance file to write")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check-colorful":
            return cmd_check_colorful(args.instance, args.out, args.jobs)
        if args.command == "transversal":
            return cmd_transversal(args.instance, args.family, args.out)
        if args.command == "verify-theorem":
            return cmd_verify_theorem(args.instance, args.out, args.jobs)
        if args.command == "certificate":
            return cmd_certificate(args.instance, args.out, args.jobs)
        if args.command == "generate":
            return cmd_generate(
                args.kind, args.ks, args.seed, args.representation, args.out, args.dim
            )
    except MalformedInputError as exc:
        print(f"error: {exc}")
        return EXIT_PRECONDITION
    raise AssertionError("unreachable command dispatch")


if __name__ == "__main__":
    sys.exit(main())
