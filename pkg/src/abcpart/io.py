"""Reading and writing profiles, scoring tables, graphs and RX3C families.

Profile text format::

    # comment
    m k
    <weight>: c1 c2 ... cj

The JSON mirror is ``{"m": .., "k": .., "groups": [{"weight": w, "ballot": [..]}]}``
with an optional ``"labels"`` list.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from abcpart.errors import AbcError, InvariantError, ParseError
from abcpart.model import ElectionInstance, Profile, normalize_profile


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_profile_text(text: str, k_override=None) -> ElectionInstance:
    header = None
    raw = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = _strip(line)
        if not body:
            continue
        if header is None:
            parts = body.split()
            if len(parts) != 2:
                raise ParseError("header must be 'm k'", lineno)
            try:
                header = (int(parts[0]), int(parts[1]))
            except ValueError:
                raise ParseError("header must contain two integers", lineno) from None
            continue
        if ":" not in body:
            raise ParseError("expected '<weight>: c1 c2 ...'", lineno)
        wpart, bpart = body.split(":", 1)
        try:
            weight = int(wpart)
            ballot = [int(tok) for tok in bpart.split()]
        except ValueError:
            raise ParseError("weights and candidates must be integers", lineno) from None
        if len(set(ballot)) != len(ballot):
            raise ParseError("repeated candidate in ballot", lineno)
        try:
            _check_ballot(ballot, weight, header[0])
        except AbcError as exc:
            raise ParseError(str(exc), lineno) from exc
        raw.append((ballot, weight))
    if header is None:
        raise ParseError("empty profile")
    m, k = header
    if k_override is not None:
        k = k_override
    profile = normalize_profile(raw, m)
    return ElectionInstance(profile, k)


def _check_ballot(ballot, weight, m):
    if not ballot:
        raise ParseError("empty ballot")
    if weight < 1:
        raise ParseError("weight must be positive")
    for c in ballot:
        if not 0 <= c < m:
            raise ParseError(f"candidate {c} outside 0..{m - 1}")


def parse_profile_json(text: str, k_override=None) -> ElectionInstance:
    try:
        data = json.loads(text)
        m = int(data["m"])
        k = int(data["k"]) if k_override is None else k_override
        raw = [(list(g["ballot"]), int(g["weight"])) for g in data["groups"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"malformed JSON profile: {exc}") from exc
    for ballot, weight in raw:
        _check_ballot(ballot, weight, m)
    profile = normalize_profile(raw, m, data.get("labels"))
    return ElectionInstance(profile, k)


def parse_profile(text: str, k_override=None) -> ElectionInstance:
    """Parse either format; JSON is recognised by a leading ``{``."""
    if text.lstrip().startswith("{"):
        return parse_profile_json(text, k_override)
    return parse_profile_text(text, k_override)


def read_profile(path, k_override=None) -> ElectionInstance:
    if str(path) == "-":
        import sys
        return parse_profile(sys.stdin.read(), k_override)
    return parse_profile(Path(path).read_text(), k_override)


def format_profile_text(instance: ElectionInstance, comments=()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"{instance.profile.m} {instance.k}")
    for g in instance.profile.groups:
        lines.append(f"{g.weight}: " + " ".join(str(c) for c in sorted(g.ballot)))
    return "\n".join(lines) + "\n"


def profile_to_dict(instance: ElectionInstance) -> dict:
    data = {
        "m": instance.profile.m,
        "k": instance.k,
        "groups": [{"weight": g.weight, "ballot": sorted(g.ballot)} for g in instance.profile.groups],
    }
    if instance.profile.labels is not None:
        data["labels"] = list(instance.profile.labels)
    return data


def format_profile_json(instance: ElectionInstance) -> str:
    return json.dumps(profile_to_dict(instance), indent=1)


def parse_rational(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {tok!r}") from None


def read_thiele_weights(path) -> list:
    """Whitespace separated values s(0), s(1), ... (``p/q`` allowed)."""
    toks = []
    for line in Path(path).read_text().splitlines():
        toks.extend(_strip(line).split())
    return [parse_rational(t) for t in toks]


def read_general_table(path) -> dict:
    """Lines ``y: s(0,y) s(1,y) ... s(y,y)``."""
    table = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        body = _strip(line)
        if not body:
            continue
        if ":" not in body:
            raise ParseError("expected 'y: v0 v1 ... vy'", lineno)
        ypart, vals = body.split(":", 1)
        y = int(ypart)
        values = [parse_rational(t) for t in vals.split()]
        if len(values) != y + 1:
            raise ParseError(f"row {y} needs {y + 1} values", lineno)
        for x, v in enumerate(values):
            table[(x, y)] = v
    return table


def read_graph(path):
    """Edge list, one ``u v`` pair per line; vertices are integers."""
    from abcpart.generators import CubicGraph

    edges = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        body = _strip(line)
        if not body:
            continue
        parts = body.split()
        if len(parts) != 2:
            raise ParseError("expected 'u v'", lineno)
        edges.append((int(parts[0]), int(parts[1])))
    return CubicGraph.from_edges(edges)


def read_rx3c(path):
    """One 3-set per line, elements given as integers 0..3t-1."""
    from abcpart.generators import Rx3cInstance

    sets = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        body = _strip(line)
        if not body:
            continue
        sets.append(tuple(int(x) for x in body.split()))
    if len(sets) % 3:
        raise InvariantError("an RX3C family has 3t sets")
    return Rx3cInstance(t=len(sets) // 3, sets=tuple(sets))


def format_rx3c(inst) -> str:
    return "".join(" ".join(str(x) for x in s) + "\n" for s in inst.sets)
