"""Run named suites against a manifest and collect the reports."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .complex_structure import holomorphic_entries, space_form_entries
from .geometry import StructureJets, duality_entries, metric_report, statistical_entries
from .holo import Classification, HoloJets, classification_entries, classify, k_identities, section4_suite, space_form_system
from .manifest import Manifest
from .residuals import FAIL, PreconditionError, ResidualReport, Sampler
from .submersion import submersion_suite, theorem_f_residuals

SUITES = ("statistical", "holomorphic", "submersion", "theorem_f", "k_identities", "section4", "classify", "space_form")

# tolerance used when the manifest does not name one for the suite
SUITE_TOL = {"theorem_f": 1e-7}


class SelectionError(ValueError):
    pass


@dataclass
class SuiteResult:
    name: str
    reports: dict[str, ResidualReport]
    sample: dict
    classification: Classification | None = None
    raw: dict | None = None

    @property
    def entries(self):
        return [e for r in self.reports.values() for e in r.entries]

    @property
    def failures(self):
        return [e for e in self.entries if e.status == FAIL]

    @property
    def exit_status(self) -> int:
        return 1 if self.failures else 0

    def to_dict(self) -> dict:
        out = {
            "fixture": self.name,
            "sample": self.sample,
            "suites": {
                key: {
                    "title": r.title,
                    "entries": [
                        {
                            "identity": e.name,
                            "anchor": e.anchor,
                            "max_residual": e.max_residual,
                            "tolerance": e.tolerance,
                            "status": e.status,
                            "note": e.note,
                        }
                        for e in r.entries
                    ],
                }
                for key, r in sorted(self.reports.items())
            },
            "exit_status": self.exit_status,
        }
        if self.classification is not None:
            out["classification"] = self.classification.to_dict()
        if self.raw is not None:
            out["raw"] = self.raw
        return out


def _skipped(title: str, reason: str, sample: dict, tol: float) -> ResidualReport:
    report = ResidualReport(title, sample)
    report.skip(title, "suite precondition", f"skipped: {reason}", tol)
    return report


def _statistical(m: Manifest, sampler: Sampler, tol: float) -> ResidualReport:
    sj = StructureJets(m.metric, m.connection, sampler.points(m.dim))
    report = ResidualReport("statistical", sampler.describe())
    metric_report(sj, report)
    statistical_entries(sj.g, sj.gamma, report, tol)
    duality_entries(sj, report, tol)
    return report


def _holomorphic(m: Manifest, sampler: Sampler, tol: float) -> ResidualReport:
    if m.complex_structure is None:
        raise PreconditionError("no complex structure in manifest")
    sj = StructureJets(m.metric, m.connection, sampler.points(m.dim), m.complex_structure)
    report = ResidualReport("holomorphic", sampler.describe())
    holomorphic_entries(sj, report, tol)
    return report


def _need_sub(m: Manifest, holo: bool = False):
    if m.submersion is None:
        raise PreconditionError("no submersion in manifest")
    if holo and m.complex_structure is None:
        raise PreconditionError("no complex structure in manifest")
    return m.submersion


def _space_form(m: Manifest, sampler: Sampler, tol: float) -> ResidualReport:
    if m.complex_structure is None:
        raise PreconditionError("no complex structure in manifest")
    if m.submersion is not None:
        return space_form_system(m.submersion, m.space_form_c, sampler, tol)
    sj = StructureJets(m.metric, m.connection, sampler.points(m.dim), m.complex_structure)
    report = ResidualReport("space form", sampler.describe())
    space_form_entries(sj, report, tol, m.space_form_c)
    return report


def _classify(m: Manifest, sampler: Sampler, tol: float, holder: dict) -> ResidualReport:
    cl = classify(_need_sub(m, holo=True), sampler, tol, m.space_form_c)
    holder["classification"] = cl
    report = ResidualReport("classification", sampler.describe())
    report.skip("summary", "flags of the split", cl.summary(), tol)
    classification_entries(cl, report)
    for key, label in sorted(cl.branches.items()):
        report.skip(key, "structure theorem instance", label, tol)
    return report


def _raw(m: Manifest, point) -> dict:
    """Tensor values at one point, for debugging."""
    pts = np.asarray([point], dtype=float)
    out = {"point": [float(x) for x in point]}
    sj = StructureJets(m.metric, m.connection, pts, m.complex_structure)
    out["g"] = sj.g.val[0].tolist()
    out["Gamma"] = sj.gamma.val[0].tolist()
    out["Gamma_star"] = sj.gamma_star.val[0].tolist()
    out["R"] = sj.R.val[0].tolist()
    if m.complex_structure is not None:
        out["J"] = sj.J.val[0].tolist()
    if m.submersion is not None:
        hj = HoloJets(m.submersion, pts) if m.complex_structure is not None else None
        sub = hj if hj is not None else m.submersion.jets(pts)
        out["H"] = sub.H.val[0].tolist()
        out["T"] = sub.T.val[0].tolist()
        out["A"] = sub.A.val[0].tolist()
        if hj is not None:
            for key in ("P", "Fo", "t", "f"):
                out[key] = getattr(hj, key).val[0].tolist()
    return out


def configure(m: Manifest, points: int | None = None, box=None, seed: int | None = None,
              tol: float | None = None, point=None) -> tuple[Manifest, Sampler]:
    """Apply command-line style overrides to a manifest's sampler and tolerances."""
    s = m.sampler
    if point is not None:
        if len(point) != m.dim:
            raise SelectionError(f"--point needs {m.dim} coordinates, got {len(point)}")
        s = Sampler.at(point)
    else:
        if points is not None:
            s = replace(s, count=int(points))
        if box is not None:
            s = replace(s, box=(float(box[0]), float(box[1])))
        if seed is not None:
            s = replace(s, seed=int(seed))
    if tol is not None:
        m = replace(m, tolerances={"default": float(tol)})
    return m, s


def run_suites(m: Manifest, selection=None, sampler: Sampler | None = None, point=None) -> SuiteResult:
    """Run each selected suite; failed preconditions become skipped entries."""
    sampler = sampler or m.sampler
    chosen = list(SUITES) if not selection else list(dict.fromkeys(selection))
    unknown = [s for s in chosen if s not in SUITES]
    if unknown:
        raise SelectionError(f"unknown suite(s) {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    holder: dict = {}
    runners = {
        "statistical": lambda tol: _statistical(m, sampler, tol),
        "holomorphic": lambda tol: _holomorphic(m, sampler, tol),
        "submersion": lambda tol: submersion_suite(_need_sub(m), sampler, tol),
        "theorem_f": lambda tol: theorem_f_residuals(_need_sub(m), sampler, tol),
        "k_identities": lambda tol: k_identities(_need_sub(m, holo=True), sampler, tol),
        "section4": lambda tol: section4_suite(_need_sub(m, holo=True), sampler, tol),
        "classify": lambda tol: _classify(m, sampler, tol, holder),
        "space_form": lambda tol: _space_form(m, sampler, tol),
    }
    reports = {}
    for key in sorted(chosen):
        tol = m.tolerances.get(key, SUITE_TOL.get(key, m.tol()))
        try:
            reports[key] = runners[key](tol)
        except (PreconditionError, ArithmeticError) as e:
            reports[key] = _skipped(key, str(e), sampler.describe(), tol)
    return SuiteResult(
        name=m.name,
        reports=reports,
        sample=sampler.describe(),
        classification=holder.get("classification"),
        raw=None if point is None else _raw(m, point),
    )
