"""JSON instance documents.

Names appear only here; instances use dense integer ids.  Layouts::

    {"kind": "voting", "agents": [...], "alternatives": [...],
     "preferences": [[name, ...], ...], "h": ["1/2", ...]}
    {"kind": "one_sided", "agents": [...], "items": [...],
     "preferences": [...], "h": [...]}
    {"kind": "two_sided", "n_agents": [...], "m_agents": [...],
     "n_preferences": [...], "m_preferences": [...], "n_h": [...], "m_h": [...]}

Preferences list names most preferred first, one list per agent in the
order of the agent list.  Quantiles are rational strings such as "2/3".
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

from .core import Preference
from .one_sided import OneSidedInstance
from .two_sided import TwoSidedInstance
from .voting import VotingInstance

VOTING, ONE_SIDED, TWO_SIDED = "voting", "one_sided", "two_sided"
KINDS = (VOTING, ONE_SIDED, TWO_SIDED)
_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")

Instance = Union[VotingInstance, OneSidedInstance, TwoSidedInstance]


class InstanceError(ValueError):
    """Invalid instance document; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class Document:
    """A parsed instance with its external names.

    ``agents`` names the row side (voters, one-sided agents or side N);
    ``options`` names what they rank (alternatives, items or side M).
    """

    kind: str
    instance: Instance
    agents: tuple[str, ...]
    options: tuple[str, ...]

    def agent_name(self, i: int) -> str:
        return self.agents[i]

    def option_name(self, o: int) -> str:
        return self.options[o]


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def parse_rational(text: Any, path: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InstanceError(path, f"expected a rational string, got {text!r}")
    s = str(text).strip()
    if not _RATIONAL.match(s):
        raise InstanceError(path, f"malformed rational {text!r}")
    try:
        return Fraction(s)
    except ZeroDivisionError:
        raise InstanceError(path, f"zero denominator in {text!r}") from None


def _quantiles(values: Any, count: int, path: str) -> tuple[Fraction, ...]:
    if not isinstance(values, list):
        raise InstanceError(path, "expected a list of quantiles")
    if len(values) != count:
        raise InstanceError(path, f"expected {count} quantiles, got {len(values)}")
    out = []
    for k, v in enumerate(values):
        q = parse_rational(v, f"{path}[{k}]")
        if not 0 <= q <= 1:
            raise InstanceError(f"{path}[{k}]", f"quantile {q} outside [0, 1]")
        out.append(q)
    return tuple(out)


def _names(data: dict, key: str) -> tuple[str, ...]:
    if key not in data:
        raise InstanceError(key, "missing field")
    names = data[key]
    if not isinstance(names, list) or not names:
        raise InstanceError(key, "expected a non-empty list of names")
    for k, name in enumerate(names):
        if not isinstance(name, str) or not name:
            raise InstanceError(f"{key}[{k}]", f"invalid name {name!r}")
    if len(set(names)) != len(names):
        raise InstanceError(key, "duplicate names")
    return tuple(names)


def _preferences(values: Any, count: int, options: tuple[str, ...], path: str) -> tuple[Preference, ...]:
    if not isinstance(values, list):
        raise InstanceError(path, "expected a list of preferences")
    if len(values) != count:
        raise InstanceError(path, f"expected {count} preferences, got {len(values)}")
    index = {name: k for k, name in enumerate(options)}
    prefs = []
    for a, order in enumerate(values):
        p = f"{path}[{a}]"
        if not isinstance(order, list):
            raise InstanceError(p, "expected a list of names")
        unknown = [o for o in order if o not in index]
        if unknown:
            raise InstanceError(p, f"unknown names {unknown}")
        if len(order) != len(options) or len(set(order)) != len(order):
            raise InstanceError(p, f"not a permutation of {list(options)}")
        prefs.append(Preference(tuple(index[o] for o in order)))
    return tuple(prefs)


def _field(data: dict, key: str) -> Any:
    if key not in data:
        raise InstanceError(key, "missing field")
    return data[key]


def from_dict(data: Any) -> Document:
    if not isinstance(data, dict):
        raise InstanceError("$", "document must be an object")
    kind = _field(data, "kind")
    if kind not in KINDS:
        raise InstanceError("kind", f"unknown kind {kind!r}, expected one of {list(KINDS)}")
    if kind == TWO_SIDED:
        ns, ms = _names(data, "n_agents"), _names(data, "m_agents")
        if len(ns) != len(ms):
            raise InstanceError("m_agents", f"expected {len(ns)} agents, got {len(ms)}")
        inst = TwoSidedInstance(
            _preferences(_field(data, "n_preferences"), len(ns), ms, "n_preferences"),
            _preferences(_field(data, "m_preferences"), len(ms), ns, "m_preferences"),
            _quantiles(_field(data, "n_h"), len(ns), "n_h"),
            _quantiles(_field(data, "m_h"), len(ms), "m_h"),
        )
        return Document(kind, inst, ns, ms)
    agents = _names(data, "agents")
    opt_key = "alternatives" if kind == VOTING else "items"
    options = _names(data, opt_key)
    if kind == ONE_SIDED and len(options) != len(agents):
        raise InstanceError("items", f"expected {len(agents)} items, got {len(options)}")
    prefs = _preferences(_field(data, "preferences"), len(agents), options, "preferences")
    h = _quantiles(_field(data, "h"), len(agents), "h")
    inst = VotingInstance(prefs, h) if kind == VOTING else OneSidedInstance(prefs, h)
    return Document(kind, inst, agents, options)


def to_dict(doc: Document) -> dict:
    inst = doc.instance

    def names(prefs, labels):
        return [[labels[o] for o in p.order] for p in prefs]

    if doc.kind == TWO_SIDED:
        return {
            "kind": doc.kind,
            "n_agents": list(doc.agents),
            "m_agents": list(doc.options),
            "n_preferences": names(inst.n_prefs, doc.options),
            "m_preferences": names(inst.m_prefs, doc.agents),
            "n_h": [format_rational(v) for v in inst.n_h],
            "m_h": [format_rational(v) for v in inst.m_h],
        }
    return {
        "kind": doc.kind,
        "agents": list(doc.agents),
        "alternatives" if doc.kind == VOTING else "items": list(doc.options),
        "preferences": names(inst.prefs, doc.options),
        "h": [format_rational(v) for v in inst.h],
    }


def loads(text: str) -> Document:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError("$", f"invalid JSON: {e}") from None
    return from_dict(data)


def dumps(doc: Document) -> str:
    return json.dumps(to_dict(doc), indent=2) + "\n"


def parse_instance(source: Union[str, Path, Any]) -> Document:
    """Parse from a path or a readable text stream."""
    if isinstance(source, (str, Path)):
        return loads(Path(source).read_text())
    return loads(source.read())
