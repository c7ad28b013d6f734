import json

import numpy as np
import pytest

from statsub.manifest import FIXTURES, ManifestError, fixture, load_manifest, parse_manifest
from statsub.residuals import Sampler


def minimal(**extra):
    doc = {"dim": 2, "metric": [[1, 1, "1"], [2, 2, "exp(x1)"]]}
    doc.update(extra)
    return doc


def test_example1_connection_table(ex1):
    assert ex1.dim == 4
    assert len(ex1.connection.nonzero()) == 26
    G = ex1.connection.jet(np.zeros((1, 4))).val[0]
    np.testing.assert_array_equal(G[0, 0], [0, -1, 0, 0])
    assert G[1, 3, 0] == -1.0  # Gamma^1_24 = -e^{x1 - x2} at the origin


def test_example2_base(ex2):
    sub = ex2.submersion
    assert (sub.m, sub.n, sub.s) == (4, 2, 2)
    Gb = sub.base_conn.jet(np.asarray([[0.3, 0.7]])).val[0]
    np.testing.assert_array_equal(Gb[0, 0], [0, -1])
    assert ex2.sampler == Sampler(box=(-1.0, 1.0), count=100, seed=0x5745)


def test_all_fixtures_load():
    for name in FIXTURES:
        assert fixture(name).name == name


@pytest.mark.parametrize(
    "doc, path, text",
    [
        (minimal(metric=[]), "metric", "metric required"),
        ({"metric": [[1, 1, "1"]]}, "dim", "dimension"),
        (minimal(connection=[[1, 1, 3, "1"]]), "connection[0][2]", "out of range"),
        (minimal(connection=[[1, 1, "1"]]), "connection[0]", "3 indices"),
        (minimal(connection=[[1, 2, 2, "exp(x1 -"]]), "connection[0][3]", "offset 8"),
        (minimal(metric=[[1, 1, "1"], [2, 2, "x3"]]), "metric[1][2]", ""),
        (minimal(metric=[[1, 1, "1"], [1, 2, "x1"], [2, 1, "x2"]]), "metric", "conflicting"),
        (minimal(sampling={"box": [1, -1]}), "sampling.box", "lo < hi"),
        (minimal(sampling={"seed": "0xZZ"}), "sampling.seed", "bad seed"),
        (minimal(submersion={"base_dim": 2, "metric": [[1, 1, "1"]]}), "submersion.base_dim", "1..1"),
        (minimal(submersion={"base_dim": 1}), "submersion.metric", "metric required"),
        ({"dim": 3, "metric": [[1, 1, "1"]], "complex_structure": []}, "complex_structure", "even"),
        (minimal(space_form_c="one"), "space_form_c", "number"),
        (minimal(tolerances={"statistical": -1}), "tolerances", "positive"),
    ],
)
def test_validation_errors_carry_paths(doc, path, text):
    with pytest.raises(ManifestError) as info:
        parse_manifest(doc)
    assert info.value.path == path
    assert text in str(info.value)


def test_load_from_file_and_errors(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps(minimal(name="tiny", space_form_c=0)))
    m = load_manifest(p)
    assert m.name == "tiny" and m.space_form_c == 0.0 and m.submersion is None
    bad = tmp_path / "bad.json"
    bad.write_text("{ nope")
    with pytest.raises(ManifestError, match="invalid JSON at line 1"):
        load_manifest(bad)
    with pytest.raises(ManifestError, match="cannot read"):
        load_manifest(tmp_path / "missing.json")
    assert load_manifest("example1").name == "example1"


def test_numbers_accepted_as_expressions():
    m = parse_manifest(minimal(metric=[[1, 1, 2], [2, 2, 0.5]]))
    np.testing.assert_array_equal(m.metric.jet(np.zeros((1, 2))).val[0], np.diag([2.0, 0.5]))
