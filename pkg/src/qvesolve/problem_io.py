"""JSON problem files.

A file holds one problem::

    {
      "format": "e4",
      "data": {"A": [[...]], "B": [[...]], "C": [[...]]},
      "expected": {"x": [...]},          # optional
      "supersolution": [...],            # optional
      "meta": {"seed": 7}                # optional, free-form
    }

``data`` keys per format:

==========  ==============================================================
generic     ``M`` (n x n), ``a`` (n), ``B`` (n x n x n, ``B[i][j][k]``
            multiplies ``x_i y_j`` in output ``k``)
e1          ``a``, ``B``; optional ``normalized`` (bool)
e2          ``P``, ``Ptilde``
e3          ``A``, ``B``, ``C``, ``D``
e4          ``A``, ``B``, ``C``
treelike    ``B``, ``A`` (list of matrices), ``D`` (list of matrices)
==========  ==============================================================

Vectors in ``expected`` and ``supersolution`` refer to the vectorized
unknown (column-major for matrix equations). Numbers are written with
``repr`` precision, so writing, reading and writing again is byte-identical.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .core import QveProblem
from .models import make_e1, make_e2, make_e3, make_e4, make_treelike

__all__ = ["FORMATS", "LoadedProblem", "ProblemFile", "ProblemFileError", "build", "dumps", "load", "loads", "save"]

FORMATS = {
    "generic": ("M", "a", "B"),
    "e1": ("a", "B"),
    "e2": ("P", "Ptilde"),
    "e3": ("A", "B", "C", "D"),
    "e4": ("A", "B", "C"),
    "treelike": ("B", "A", "D"),
}


class ProblemFileError(ValueError):
    """Malformed or invalid problem file; ``line``/``column`` are set for
    syntax errors."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass
class ProblemFile:
    format: str
    data: dict
    expected: dict | None = None
    supersolution: np.ndarray | None = None
    meta: dict = field(default_factory=dict)


@dataclass
class LoadedProblem:
    """A parsed file turned into a :class:`QveProblem`; ``model`` is the
    structured wrapper (``E4Problem`` etc.) when there is one."""

    format: str
    problem: QveProblem
    model: object = None
    source: ProblemFile | None = None

    @property
    def unilateral(self):
        return getattr(self.model, "unilateral", None)


def _array(value, where):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"{where}: not a numeric array ({exc})") from None
    if not np.all(np.isfinite(arr)):
        raise ProblemFileError(f"{where}: contains non-finite values")
    return arr


def loads(text):
    """Parse problem-file text into a :class:`ProblemFile`."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(raw, dict):
        raise ProblemFileError("top level must be an object")
    fmt = raw.get("format")
    if fmt not in FORMATS:
        raise ProblemFileError(f"format must be one of {sorted(FORMATS)}, got {fmt!r}")
    unknown = set(raw) - {"format", "data", "expected", "supersolution", "meta"}
    if unknown:
        raise ProblemFileError(f"unknown top-level keys {sorted(unknown)}")
    data_raw = raw.get("data")
    if not isinstance(data_raw, dict):
        raise ProblemFileError("missing 'data' object")
    data = {}
    for key in FORMATS[fmt]:
        if key not in data_raw:
            raise ProblemFileError(f"data.{key} is required for format {fmt!r}")
        if fmt == "treelike" and key in ("A", "D"):
            if not isinstance(data_raw[key], list):
                raise ProblemFileError(f"data.{key} must be a list of matrices")
            data[key] = [_array(v, f"data.{key}[{i}]") for i, v in enumerate(data_raw[key])]
        else:
            data[key] = _array(data_raw[key], f"data.{key}")
    if fmt == "e1":
        data["normalized"] = bool(data_raw.get("normalized", False))
    expected = raw.get("expected")
    if expected is not None:
        if not isinstance(expected, dict) or "x" not in expected:
            raise ProblemFileError("'expected' must be an object with key 'x'")
        expected = {"x": _array(expected["x"], "expected.x")}
    sup = raw.get("supersolution")
    if sup is not None:
        sup = _array(sup, "supersolution")
    return ProblemFile(fmt, data, expected, sup, dict(raw.get("meta", {})))


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, list):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def dumps(pf):
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    obj = {"format": pf.format, "data": {k: _jsonable(v) for k, v in pf.data.items()}}
    if pf.expected is not None:
        obj["expected"] = {k: _jsonable(v) for k, v in pf.expected.items()}
    if pf.supersolution is not None:
        obj["supersolution"] = _jsonable(pf.supersolution)
    if pf.meta:
        obj["meta"] = _jsonable(pf.meta)
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def save(pf, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(pf))


def build(pf):
    """Construct the problem described by ``pf``.

    Validation failures of the model constructors are re-raised as
    :class:`ProblemFileError` with the constructor's message, which names
    the offending entry.
    """
    d = pf.data
    try:
        if pf.format == "generic":
            return LoadedProblem("generic", QveProblem(d["M"], d["a"], d["B"]), None, pf)
        if pf.format == "e1":
            p = make_e1(d["a"], d["B"], normalized=d.get("normalized", False))
            return LoadedProblem("e1", p, None, pf)
        if pf.format == "e2":
            model = make_e2(d["P"], d["Ptilde"])
        elif pf.format == "e3":
            model = make_e3(d["A"], d["B"], d["C"], d["D"])
        elif pf.format == "e4":
            model = make_e4(d["A"], d["B"], d["C"])
        else:
            model = make_treelike(d["B"], d["A"], d["D"])
    except ValueError as exc:
        raise ProblemFileError(f"invalid {pf.format} problem: {exc}") from None
    return LoadedProblem(pf.format, model.problem, model, pf)
