import json

import pytest

from supersingular.errors import ValidationError
from supersingular.lattice import parse_lattice
from supersingular.serialize import Workspace, canonical_dumps, loads


def test_fixture_workspace_round_trips_byte_for_byte(fixtures):
    text = (fixtures / "workspace.json").read_text().strip()
    ws = Workspace.loads(text)
    assert ws.dumps() == text
    assert Workspace.loads(ws.dumps()).dumps() == text


def test_unsorted_keys_are_canonicalized():
    text = '{ "version": 1, "objects": {"L": {"data": {"rank": 2, "label": "U", "gram": [[0,1],[1,0]]}, "kind": "lattice"}}}'
    ws = Workspace.loads(text)
    out = ws.dumps()
    assert out == canonical_dumps(json.loads(text))
    assert " " not in out
    assert out.startswith('{"objects":{"L":{"data":{"gram":[[0,1],[1,0]],"label":"U","rank":2}')


def test_bad_embedding_names_the_object(fixtures):
    d = json.loads((fixtures / "workspace.json").read_text())
    d["objects"]["J1"]["data"]["matrix"][0][0] += 1
    with pytest.raises(ValidationError) as err:
        Workspace.from_json(d)
    assert err.value.path.startswith("objects.J1")


def test_rejections():
    with pytest.raises(ValidationError, match="floating"):
        loads('{"a": 1.5}')
    with pytest.raises(ValidationError):
        loads("{")
    with pytest.raises(ValidationError, match="version"):
        Workspace.from_json({"version": 2, "objects": {}})
    cyc = {"version": 1, "objects": {
        "a": {"kind": "embedding", "data": {"source": "b", "target": "b", "matrix": [[1]]}},
        "b": {"kind": "embedding", "data": {"source": "a", "target": "a", "matrix": [[1]]}}}}
    with pytest.raises(ValidationError):
        Workspace.from_json(cyc)
    with pytest.raises(ValidationError, match="unknown"):
        Workspace.from_json({"version": 1, "objects": {"x": {"kind": "widget", "data": {}}}})


def test_add_and_notes():
    ws = Workspace()
    ws.add("E8n", parse_lattice("E8(-1)"), note="negative E8")
    again = Workspace.loads(ws.dumps())
    assert again.get("E8n").gram == parse_lattice("E8(-1)").gram
    assert again.notes["E8n"] == "negative E8"
    with pytest.raises(ValidationError):
        again.get("missing")
