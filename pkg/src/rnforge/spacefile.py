"""JSON space files: atoms, named measures, refinement chains, set sequences.

Rationals travel as "p/q" strings (plain integers are also accepted); float
literals are rejected so inputs stay exact.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

from .density import FiniteAlgebra, RefinementChain
from .measure import (
    AtomSpace,
    Measure,
    MeasurableSet,
    SetSequenceSpec,
    SignedMeasure,
)


class SpaceFileError(ValueError):
    """Malformed space file; the message names the offending location."""


def parse_rational(value: Union[str, int], where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise SpaceFileError(
            f"{where}: floating-point values are not accepted; use 'p/q' strings"
        )
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise SpaceFileError(f"{where}: bad rational {value!r} ({exc})")
    raise SpaceFileError(f"{where}: expected a rational string, got {type(value).__name__}")


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class SpaceFile:
    space: AtomSpace
    measures: dict[str, SignedMeasure]
    chains: dict[str, RefinementChain]
    sequences: dict[str, SetSequenceSpec]
    digest: str

    def measure(self, name: str) -> SignedMeasure:
        try:
            return self.measures[name]
        except KeyError:
            raise SpaceFileError(f"no measure named {name!r} in the input file")

    def nonnegative_measure(self, name: str) -> Measure:
        m = self.measure(name)
        if not m.is_nonnegative():
            raise SpaceFileError(
                f"measure {name!r} has negative weights where a (nonnegative) "
                f"measure is required"
            )
        return Measure(m.space, m.weights)

    def chain(self, name: str) -> RefinementChain:
        try:
            return self.chains[name]
        except KeyError:
            raise SpaceFileError(f"no chain named {name!r} in the input file")

    def sequence(self, name: str) -> SetSequenceSpec:
        try:
            return self.sequences[name]
        except KeyError:
            raise SpaceFileError(f"no sequence named {name!r} in the input file")


def _parse_set(space: AtomSpace, labels: Any, where: str) -> MeasurableSet:
    if not isinstance(labels, list) or any(not isinstance(l, str) for l in labels):
        raise SpaceFileError(f"{where}: a set must be a list of atom labels")
    try:
        return space.subset(labels)
    except KeyError as exc:
        raise SpaceFileError(f"{where}: {exc.args[0]}")


def loads(text: str) -> SpaceFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpaceFileError(f"line {exc.lineno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise SpaceFileError("top level must be a JSON object")
    atoms = doc.get("atoms")
    if not isinstance(atoms, list) or not atoms:
        raise SpaceFileError("'atoms' must be a nonempty list of labels")
    try:
        space = AtomSpace.of(atoms)
    except ValueError as exc:
        raise SpaceFileError(f"'atoms': {exc}")

    measures: dict[str, SignedMeasure] = {}
    for name, mapping in (doc.get("measures") or {}).items():
        if not isinstance(mapping, dict):
            raise SpaceFileError(f"measure {name!r}: must map labels to rationals")
        weights = [Fraction(0)] * len(space)
        for label, value in mapping.items():
            try:
                idx = space.index(label)
            except KeyError:
                raise SpaceFileError(f"measure {name!r}: unknown label {label!r}")
            weights[idx] = parse_rational(value, f"measure {name!r}, atom {label!r}")
        measures[name] = SignedMeasure(space, tuple(weights))

    chains: dict[str, RefinementChain] = {}
    for name, levels in (doc.get("chains") or {}).items():
        if not isinstance(levels, list) or not levels:
            raise SpaceFileError(f"chain {name!r}: must be a nonempty list of partitions")
        algebras = []
        for k, partition in enumerate(levels):
            where = f"chain {name!r}, level {k}"
            if not isinstance(partition, list):
                raise SpaceFileError(f"{where}: a partition is a list of blocks")
            blocks = tuple(
                _parse_set(space, block, f"{where}, block {j}")
                for j, block in enumerate(partition)
            )
            try:
                algebras.append(FiniteAlgebra(space, blocks))
            except ValueError as exc:
                raise SpaceFileError(f"{where}: {exc}")
        try:
            chains[name] = RefinementChain(tuple(algebras))
        except ValueError as exc:
            raise SpaceFileError(f"chain {name!r}: {exc}")

    sequences: dict[str, SetSequenceSpec] = {}
    for name, seq in (doc.get("sequences") or {}).items():
        if not isinstance(seq, dict):
            raise SpaceFileError(f"sequence {name!r}: must be an object with prefix/cycle")
        prefix = tuple(
            _parse_set(space, s, f"sequence {name!r}, prefix[{j}]")
            for j, s in enumerate(seq.get("prefix", []))
        )
        cycle = tuple(
            _parse_set(space, s, f"sequence {name!r}, cycle[{j}]")
            for j, s in enumerate(seq.get("cycle", []))
        )
        try:
            sequences[name] = SetSequenceSpec(prefix, cycle)
        except ValueError as exc:
            raise SpaceFileError(f"sequence {name!r}: {exc}")

    digest = "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()
    return SpaceFile(space, measures, chains, sequences, digest)


def load(path: Union[str, Path]) -> SpaceFile:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpaceFileError(f"cannot read {p}: {exc}")
    return loads(text)


def dumps(sf: SpaceFile) -> str:
    """Serialize back to the schema; inverse of `loads` up to formatting."""
    doc: dict[str, Any] = {"atoms": list(sf.space.atoms)}
    doc["measures"] = {
        name: {
            label: format_rational(m.weights[i])
            for i, label in enumerate(sf.space.atoms)
        }
        for name, m in sorted(sf.measures.items())
    }
    doc["chains"] = {
        name: [
            [block.labels() for block in alg.blocks] for alg in chain.levels
        ]
        for name, chain in sorted(sf.chains.items())
    }
    doc["sequences"] = {
        name: {
            "prefix": [s.labels() for s in seq.prefix],
            "cycle": [s.labels() for s in seq.cycle],
        }
        for name, seq in sorted(sf.sequences.items())
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _three_atom_doc() -> dict:
    return {
        "atoms": ["a", "b", "c"],
        "measures": {
            "nu": {"a": "1/2", "b": "1/4", "c": "1/4"},
            "lam": {"a": "1/4", "b": "1/2", "c": "1/4"},
            "mu": {"a": "1", "b": "-2", "c": "3"},
        },
        "chains": {
            "c1": [
                [["a", "b"], ["c"]],
                [["a"], ["b"], ["c"]],
            ]
        },
        "sequences": {
            "shrinking": {"prefix": [["a"], ["a"]], "cycle": [[]]},
            "alternating": {"prefix": [], "cycle": [["a"], ["b"]]},
        },
    }


def _eight_atom_doc() -> dict:
    # Deterministic pseudo-random weights; regenerated identically on rerun.
    import random

    rng = random.Random(8)
    labels = [chr(ord("a") + i) for i in range(8)]
    nu = {}
    lam = {}
    mu = {}
    for l in labels:
        nu_w = Fraction(rng.randint(1, 12), rng.randint(1, 12))
        lam_w = nu_w * Fraction(rng.randint(0, 8), rng.randint(1, 8))
        mu_w = Fraction(rng.randint(-10, 10), rng.randint(1, 10))
        nu[l] = format_rational(nu_w)
        lam[l] = format_rational(lam_w)
        mu[l] = format_rational(mu_w)
    return {
        "atoms": labels,
        "measures": {"nu": nu, "lam": lam, "mu": mu},
        "chains": {
            "c1": [
                [labels[:4], labels[4:]],
                [labels[:2], labels[2:4], labels[4:6], labels[6:]],
                [[l] for l in labels],
            ]
        },
        "sequences": {
            "alternating": {"prefix": [], "cycle": [[labels[0]], [labels[1]]]}
        },
    }


def _null_atom_doc() -> dict:
    return {
        "atoms": ["a", "b"],
        "measures": {
            "nu": {"a": "1", "b": "0"},
            "lam": {"a": "1/2", "b": "1/3"},
        },
        "chains": {"c1": [[["a"], ["b"]]]},
        "sequences": {},
    }


EXAMPLE_DOCS = {
    "three_atom.json": _three_atom_doc,
    "eight_atom.json": _eight_atom_doc,
    "null_atom.json": _null_atom_doc,
}


def emit_example_files(directory: Union[str, Path]) -> list[Path]:
    """Write the bundled example space files; byte-identical on rerun."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, build in EXAMPLE_DOCS.items():
        text = json.dumps(build(), indent=2, sort_keys=True) + "\n"
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
