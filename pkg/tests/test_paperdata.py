import copy
import json

import pytest

from lkm3.errors import SchemaError
from lkm3.paperdata import (
    INDICES,
    dataset_from_dict,
    default_path,
    load_dataset,
    parse_recipe,
    parse_terms,
    validate_internal,
)


@pytest.fixture(scope="module")
def raw():
    with open(default_path()) as fh:
        return json.load(fh)


def _index(raw, t):
    return next(d for d in raw["indices"] if d["t"] == t)


def test_counts(ds):
    assert tuple(ds.indices) == INDICES
    assert [ds.index(t).rank for t in INDICES] == [2, 3, 3, 3, 3, 3, 4, 2, 3]
    assert sum(ds.index(t).rank for t in INDICES) == 26
    assert len(ds.algebras) == 29
    assert all(set(a.combination) <= {0, 1} for a in ds.algebras)
    assert all((2 * a.weight).denominator == 1 for a in ds.algebras)


def test_unknown_index(ds):
    with pytest.raises(KeyError):
        ds.index(5)


def test_internal_consistency(ds):
    rep = validate_internal(ds)
    assert rep.ok, rep.findings
    assert rep.checks > 400


def test_gram_t1(ds):
    assert [list(r) for r in ds.index(1).chamber.gram] == [[4, -2, -2], [-2, 1, 0], [-2, 0, 4]]


def test_bracket_t36(ds):
    line = ds.index(36).printed[0].line(7)
    assert line.coeffs[32] == 3 and line.brackets[32] == 4 * 36 * 7 - 32 * 32 == -16


def test_empty_file(tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("")
    with pytest.raises(SchemaError):
        load_dataset(p)


def test_not_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    with pytest.raises(SchemaError):
        load_dataset(p)


def test_wrong_schema(raw):
    d = copy.deepcopy(raw)
    d["schema"] = "other/2"
    with pytest.raises(SchemaError):
        dataset_from_dict(d)


def test_missing_field_has_location(raw):
    d = copy.deepcopy(raw)
    del _index(d, 2)["gram"]
    with pytest.raises(SchemaError) as e:
        dataset_from_dict(d)
    assert "gram" in str(e.value)


def test_mul_shape(raw):
    d = copy.deepcopy(raw)
    _index(d, 3)["mul"].pop()
    with pytest.raises(SchemaError):
        dataset_from_dict(d)


def test_override_must_match_print(raw):
    d = copy.deepcopy(raw)
    d["overrides"][0]["printed"] = "1"
    with pytest.raises(SchemaError):
        dataset_from_dict(d)


def test_bad_bracket_is_reported(raw):
    d = copy.deepcopy(raw)
    _index(d, 1)["basis"][0]["lines"][0]["terms"] = "r[-3] + 10 + r^{-1}[-1]"
    rep = validate_internal(dataset_from_dict(d))
    assert not rep.ok


def test_bad_gram_is_reported(raw):
    d = copy.deepcopy(raw)
    _index(d, 1)["gram"][0][1] = -3
    _index(d, 1)["gram"][1][0] = -3
    rep = validate_internal(dataset_from_dict(d))
    assert not rep.ok


def test_parse_terms():
    terms = parse_terms("r^2[-4]- r[-1]+18-r^{-1}[-1]+r^{-2}[-4]")
    assert [(l, c) for l, c, _ in terms] == [(2, 1), (1, -1), (0, 18), (-1, -1), (-2, 1)]
    assert terms[0][2] == -4
    assert parse_terms("3r^{27}[-9]") == [(27, 3, -9)]


def test_parse_recipe_rejects_calls():
    parse_recipe("E4^2*E4_1/Delta - 57*phi0_1")
    with pytest.raises(SchemaError):
        parse_recipe("__import__('os')")
    with pytest.raises(SchemaError):
        parse_recipe("phi9_9")


def test_overrides_recorded(ds):
    scopes = sorted(o["scope"] for o in ds.overrides)
    assert scopes == ["classes", "line", "line", "line", "line"]


def test_t12_classes_after_override(ds):
    assert [tuple(c) for c in ds.index(12).chamber.classes][-2:] == [(4, 10), (1, 7)]
