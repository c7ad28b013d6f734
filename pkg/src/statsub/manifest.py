"""JSON manifests describing a chart, its structures and how to sample it.

A manifest looks like::

    {
      "name": "example2",
      "dim": 4,
      "metric": [[1, 1, "-1"], [2, 2, "exp(-x2)"], ...],          # (i, j, expr)
      "connection": [[2, 1, 1, "-1"], ...],                         # (k, i, j, expr) for Gamma^k_ij
      "complex_structure": [[1, 3, "1"], ...],                      # optional, (i, j, expr) for J_ij
      "submersion": {"base_dim": 2, "metric": [...], "connection": [...]},   # optional
      "sampling": {"box": [-1, 1], "count": 100, "seed": "0x5745"},          # optional
      "tolerances": {"default": 1e-8, "theorem_f": 1e-7},                     # optional
      "space_form_c": 0.0                                                      # optional
    }

Omitted entries are zero. Indices are 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .expr import ExprError
from .fields import ComplexStructureField, ConnectionField, FieldError, MetricField
from .residuals import DEFAULT_SEED, DEFAULT_TOL, Sampler
from .submersion import SubmersionSetup

FIXTURES = ("example1", "example2", "flat_product", "perturbed_example1", "hyperbolic_plane")


class ManifestError(ValueError):
    """Invalid manifest; ``path`` locates the offending field (e.g. ``connection[3][3]``)."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass(frozen=True)
class Manifest:
    name: str
    dim: int
    metric: MetricField
    connection: ConnectionField
    complex_structure: ComplexStructureField | None = None
    submersion: SubmersionSetup | None = None
    sampler: Sampler = field(default_factory=Sampler)
    tolerances: dict = field(default_factory=dict)
    space_form_c: float | None = None
    description: str = ""

    def tol(self, suite: str | None = None) -> float:
        default = self.tolerances.get("default", DEFAULT_TOL)
        return self.tolerances.get(suite, default) if suite else default


def _int(v, path):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ManifestError(path, f"expected an integer, got {v!r}")
    return v


def _entries(raw, path: str, width: int, dim: int) -> list:
    if not isinstance(raw, list):
        raise ManifestError(path, "expected a list of entries")
    out = []
    for n, item in enumerate(raw):
        p = f"{path}[{n}]"
        if not isinstance(item, list) or len(item) != width + 1:
            raise ManifestError(p, f"expected {width} indices followed by an expression")
        idx = [_int(v, f"{p}[{k}]") for k, v in enumerate(item[:width])]
        for k, i in enumerate(idx):
            if not 1 <= i <= dim:
                raise ManifestError(f"{p}[{k}]", f"index {i} out of range 1..{dim}")
        expr = item[width]
        if isinstance(expr, bool) or not isinstance(expr, str | int | float):
            raise ManifestError(f"{p}[{width}]", "expression must be a string or number")
        out.append((idx, expr, f"{p}[{width}]"))
    return out


def _build(cls, raw, path, width, dim):
    entries = _entries(raw, path, width, dim)
    parsed = []
    for idx, expr, p in entries:
        try:
            parsed.append((*idx, _parse(expr, dim)))
        except ExprError as e:
            msg = str(e) if "offset" in str(e) else f"{e} (offset {e.offset})"
            raise ManifestError(p, msg) from e
    try:
        return cls.from_entries(dim, parsed)
    except FieldError as e:
        raise ManifestError(path, str(e)) from e


def _parse(expr, dim):
    from .expr import constant, parse

    if isinstance(expr, int | float):
        return constant(float(expr), dim)
    return parse(expr, dim)


def _seed(v, path) -> int:
    if isinstance(v, bool):
        raise ManifestError(path, "seed must be an integer or hex string")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v, 16) if v.lower().startswith("0x") else int(v)
        except ValueError:
            pass
    raise ManifestError(path, f"bad seed {v!r}")


def _sampler(raw, dim) -> Sampler:
    if raw is None:
        return Sampler()
    if not isinstance(raw, dict):
        raise ManifestError("sampling", "expected an object")
    box = raw.get("box", [-1.0, 1.0])
    if not (isinstance(box, list) and len(box) == 2 and all(isinstance(b, int | float) for b in box) and box[0] < box[1]):
        raise ManifestError("sampling.box", "expected [lo, hi] with lo < hi")
    count = _int(raw.get("count", 100), "sampling.count")
    if count < 1:
        raise ManifestError("sampling.count", "must be positive")
    seed = _seed(raw.get("seed", DEFAULT_SEED), "sampling.seed")
    return Sampler(box=(float(box[0]), float(box[1])), count=count, seed=seed)


def parse_manifest(doc: dict) -> Manifest:
    """Validate a decoded manifest document."""
    if not isinstance(doc, dict):
        raise ManifestError("", "manifest must be a JSON object")
    dim = doc.get("dim")
    if dim is None:
        raise ManifestError("dim", "chart dimension required")
    dim = _int(dim, "dim")
    if dim < 1:
        raise ManifestError("dim", "must be positive")
    if not doc.get("metric"):
        raise ManifestError("metric", "metric required")
    g = _build(MetricField, doc["metric"], "metric", 2, dim)
    conn = _build(ConnectionField, doc.get("connection", []), "connection", 3, dim)
    J = None
    if doc.get("complex_structure") is not None:
        if dim % 2:
            raise ManifestError("complex_structure", "an almost complex structure needs even dimension")
        J = _build(ComplexStructureField, doc["complex_structure"], "complex_structure", 2, dim)
    sub = None
    if doc.get("submersion") is not None:
        raw = doc["submersion"]
        if not isinstance(raw, dict):
            raise ManifestError("submersion", "expected an object")
        n = _int(raw.get("base_dim"), "submersion.base_dim")
        if not 1 <= n < dim:
            raise ManifestError("submersion.base_dim", f"must be in 1..{dim - 1}")
        if not raw.get("metric"):
            raise ManifestError("submersion.metric", "metric required")
        bg = _build(MetricField, raw["metric"], "submersion.metric", 2, n)
        bc = _build(ConnectionField, raw.get("connection", []), "submersion.connection", 3, n)
        sub = SubmersionSetup(g, conn, bg, bc, J)
    tols = doc.get("tolerances", {}) or {}
    if not isinstance(tols, dict) or not all(isinstance(v, int | float) and v > 0 for v in tols.values()):
        raise ManifestError("tolerances", "expected positive numbers keyed by suite")
    c = doc.get("space_form_c")
    if c is not None and (isinstance(c, bool) or not isinstance(c, int | float)):
        raise ManifestError("space_form_c", "expected a number")
    return Manifest(
        name=str(doc.get("name", "manifest")),
        dim=dim,
        metric=g,
        connection=conn,
        complex_structure=J,
        submersion=sub,
        sampler=_sampler(doc.get("sampling"), dim),
        tolerances={k: float(v) for k, v in tols.items()},
        space_form_c=None if c is None else float(c),
        description=str(doc.get("description", "")),
    )


def load_manifest(path) -> Manifest:
    """Load a manifest file, or a bundled fixture by name."""
    p = Path(path)
    if not p.exists() and str(path) in FIXTURES:
        return fixture(str(path))
    try:
        text = p.read_text()
    except OSError as e:
        raise ManifestError("", f"cannot read {path}: {e.strerror}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ManifestError("", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    return parse_manifest(doc)


def fixture(name: str) -> Manifest:
    if name not in FIXTURES:
        raise ManifestError("", f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    text = resources.files("statsub").joinpath("fixtures", f"{name}.json").read_text()
    return parse_manifest(json.loads(text))
