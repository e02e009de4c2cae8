"""Bundled input documents (json-compatible dicts) for the CLI and the test suite."""
import copy
import json

_EX1 = {
    "name": "ex1",
    "field": "Q",
    "quiver": {"vertices": ["1", "2", "3"], "arrows": [["a", "1", "2"], ["b", "1", "2"], ["c", "2", "3"]]},
    "relations": [[["1", ["a", "c"]]], [["1", ["b", "c"]]]],
    "modules": {
        "M": {"dims": [1, 1, 0], "arrows": {"a": [["1"]], "b": [["1"]]}},
        "S1": {"dims": [1, 0, 0]},
        "S2": {"dims": [0, 1, 0]},
        "S3": {"dims": [0, 0, 1]},
    },
    "morphisms": {},
    "tilting": "DA",
}

_EX2 = {
    "name": "ex2",
    "field": "Q",
    "quiver": {"vertices": ["1", "2", "3", "4"],
               "arrows": [["al", "1", "2"], ["be", "2", "3"], ["ga", "3", "4"]]},
    "relations": [[["1", ["be", "ga"]]]],
    "modules": {
        "S3": {"dims": [0, 0, 1, 0]},
        "S4": {"dims": [0, 0, 0, 1]},
        "I4": {"dims": [0, 0, 1, 1], "arrows": {"ga": [["1"]]}},
    },
    "morphisms": {
        "p": {"source": "I4", "target": "S3", "blocks": {"3": [["1"]]}},
    },
    "tilting": "DA",
}

_A2 = {
    "name": "a2",
    "field": "Q",
    "quiver": {"vertices": ["1", "2"], "arrows": [["a", "1", "2"]]},
    "relations": [],
    "modules": {
        "S1": {"dims": [1, 0]},
        "S2": {"dims": [0, 1]},
        "P1": {"dims": [1, 1], "arrows": {"a": [["1"]]}},
    },
    "morphisms": {},
    "tilting": "DA",
}

_NAK3 = {
    "name": "nak3",
    "field": "Q",
    "quiver": {"vertices": ["1", "2", "3"], "arrows": [["a", "1", "2"], ["b", "2", "3"]]},
    "relations": [[["1", ["a", "b"]]]],
    "modules": {
        "S1": {"dims": [1, 0, 0]},
        "S2": {"dims": [0, 1, 0]},
        "S3": {"dims": [0, 0, 1]},
        "U12": {"dims": [1, 1, 0], "arrows": {"a": [["1"]]}},
    },
    "morphisms": {},
    "tilting": "DA",
}

_SEMISIMPLE = {
    "name": "semisimple",
    "field": "Q",
    "quiver": {"vertices": ["1", "2"], "arrows": []},
    "relations": [],
    "modules": {"S1": {"dims": [1, 0]}, "S2": {"dims": [0, 1]}},
    "morphisms": {},
    "tilting": "DA",
}

BUNDLED = {d["name"]: d for d in (_EX1, _EX2, _A2, _NAK3, _SEMISIMPLE)}


def bundled_document(name: str) -> dict:
    try:
        return copy.deepcopy(BUNDLED[name])
    except KeyError:
        raise KeyError(f"no bundled corpus named {name!r}; have {sorted(BUNDLED)}") from None


def bundled_text(name: str) -> str:
    return json.dumps(bundled_document(name), indent=2)
