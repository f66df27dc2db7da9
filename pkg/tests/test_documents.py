import json
import math

import pytest

from rmonotone import documents as docs
from rmonotone.admissibility import decide
from rmonotone.errors import InvalidArgument
from rmonotone.spline import AlternatingSpline, MonotoneSpline, NormTargets, OrderSpec


def test_spline_round_trip_is_exact():
    phi = AlternatingSpline(5, 0.1 + 0.2, (1 / 3, 1e-7 / 7), 2 / 3)
    text = docs.dumps(docs.spline_to_dict(phi))
    assert docs.spline_from_dict(json.loads(text)) == phi


def test_monotone_round_trip():
    x = MonotoneSpline(3, ((2.0, 1.0), (1.0, -0.5)), 0.25)
    assert docs.spline_from_dict(json.loads(docs.dumps(docs.spline_to_dict(x)))) == x


@pytest.mark.parametrize(
    "doc, field",
    [({"l": 1, "knots": [1]}, "r"), ({"r": 2, "knots": [1]}, "l"), ({"r": 2, "l": 1, "knots": [1, 2]}, "knots"),
     ({"r": 2, "l": 1, "knots": ["a"]}, "knots"), ({"r": 2.5, "l": 1, "knots": [1]}, "r")],
)
def test_spline_parse_errors_name_the_field(doc, field):
    with pytest.raises(InvalidArgument) as info:
        docs.spline_from_dict(doc)
    assert info.value.field == field


@pytest.mark.parametrize(
    "norms",
    [(0.7, 1, 1), (0.5, 1, 1), (0.3, 1, 1)],
)
def test_verdict_round_trip(norms):
    v = decide(OrderSpec(2, (0, 1, 2)), NormTargets(norms))
    back = docs.verdict_from_dict(json.loads(docs.dumps(docs.verdict_to_dict(v))))
    assert back == v


def test_verdict_with_nan_margin():
    v = decide(OrderSpec(4, (0, 1, 2, 3)), NormTargets((1, 0.3, 1, 1)))
    d = json.loads(docs.dumps(docs.verdict_to_dict(v)))
    assert d["margins"][0] is None
    assert math.isnan(docs.verdict_from_dict(d).margins[0])


def test_problem_document():
    p = docs.ProblemDocument.from_dict({"r": 3, "orders": [0, 1, 2], "norms": [0.6, 1, 1],
                                        "config": {"equality_tolerance": 1e-8}})
    assert p.decision_config().equality_tolerance == 1e-8
    assert docs.ProblemDocument.from_dict(p.to_dict()) == p


@pytest.mark.parametrize(
    "doc, field",
    [({"r": 2, "orders": [2, 1], "norms": [1, 1]}, "orders"),
     ({"r": 2, "orders": [0, 1], "norms": [1, -1]}, "norms"),
     ({"r": 2, "orders": [0, 1], "norms": [1]}, "norms"),
     ({"r": 2, "orders": [0, 1], "norms": [1, 1], "config": {"bogus": 1}}, "bogus"),
     ({"orders": [0, 1], "norms": [1, 1]}, "r")],
)
def test_problem_errors_name_the_field(doc, field):
    with pytest.raises(InvalidArgument) as info:
        docs.ProblemDocument.from_dict(doc)
    assert info.value.field == field


def test_bad_json():
    with pytest.raises(InvalidArgument):
        docs.loads("{not json", "problem")
