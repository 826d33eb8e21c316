"""JSON formats for signatures and teams.

Signature files:  {"variables": [{"name": "X", "range": ["0", "1"]}]}

Team files:
    {"kind": "causal" | "generalized",
     "functions": [{"id": "F1",
                    "laws": [{"var": "Y", "parents": ["X"],
                              "table": [["0", "1"], ["1", "2"]]}]}],
     "rows": [{"values": {"X": "0", ...}, "function": "F1"}]}

Each table row lists the parent values (in parent order, last parent
fastest) followed by the output value.  A causal team has exactly one
function id; the empty causal team has no functions and no rows.  Team
files may embed their signature under "signature"; otherwise one must be
supplied.  Dumps are deterministic: functions are numbered in structural
order and rows sorted.
"""

from __future__ import annotations

import itertools
import json
from typing import Optional

from .core import (Assignment, CausalTeam, FunctionSystem,
                   GeneralizedCausalTeam, Law, Signature, Team)
from .errors import ModelError


def signature_to_obj(sig: Signature) -> dict:
    return {"variables": [{"name": v, "range": list(r)}
                          for v, r in zip(sig.variables, sig.ranges)]}


def signature_from_obj(obj: dict) -> Signature:
    try:
        entries = obj["variables"]
        return Signature(tuple(e["name"] for e in entries),
                         tuple(tuple(e["range"]) for e in entries))
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed signature object: {exc}") from None


def _law_to_obj(sig: Signature, var: str, law: Law) -> dict:
    combos = list(itertools.product(*[sig.range_of(p) for p in law.parents]))
    rng = sig.range_of(var)
    return {"var": var,
            "parents": list(law.parents),
            "table": [list(combo) + [rng[law.table[i]]]
                      for i, combo in enumerate(combos)]}


def _system_to_obj(sig: Signature, fid: str, system: FunctionSystem) -> dict:
    return {"id": fid,
            "laws": [_law_to_obj(sig, v, law) for v, law in system.laws]}


def _system_from_obj(sig: Signature, obj: dict) -> FunctionSystem:
    laws = {}
    for entry in obj.get("laws", []):
        var = entry["var"]
        parents = tuple(entry["parents"])
        mapping = {}
        for row in entry["table"]:
            if len(row) != len(parents) + 1:
                raise ModelError(f"table row of wrong width for {var}")
            mapping[tuple(row[:-1])] = row[-1]
        laws[var] = (parents, mapping)
    return FunctionSystem.of(sig, laws)


def team_to_obj(team: Team, embed_signature: bool = True) -> dict:
    sig = team.signature
    if isinstance(team, CausalTeam):
        kind = "causal"
        systems = [] if team.is_empty() else [team.law]
        members = [(s, team.law) for s in team.sorted_rows()]
    else:
        kind = "generalized"
        systems = team.registry()
        members = team.sorted_members()
    ids = {f: f"F{i + 1}" for i, f in enumerate(systems)}
    obj: dict = {"kind": kind}
    if embed_signature:
        obj["signature"] = signature_to_obj(sig)
    obj["functions"] = [_system_to_obj(sig, ids[f], f) for f in systems]
    obj["rows"] = [{"values": {v: s.value(v) for v in sig.variables},
                    "function": ids[f]} for s, f in members]
    return obj


def team_from_obj(obj: dict, sig: Optional[Signature] = None) -> Team:
    if sig is None:
        if "signature" not in obj:
            raise ModelError("team object carries no signature and none "
                             "was supplied")
        sig = signature_from_obj(obj["signature"])
    kind = obj.get("kind")
    if kind not in ("causal", "generalized"):
        raise ModelError("team kind must be 'causal' or 'generalized'")
    systems = {f["id"]: _system_from_obj(sig, f)
               for f in obj.get("functions", [])}
    members = []
    for row in obj.get("rows", []):
        s = Assignment.of(sig, dict(row["values"]))
        fid = row.get("function")
        if fid not in systems:
            raise ModelError(f"row references unknown function {fid!r}")
        members.append((s, systems[fid]))
    if kind == "generalized":
        return GeneralizedCausalTeam.of(sig, members)
    laws = {f for _, f in members}
    if len(laws) > 1:
        raise ModelError("a causal team has exactly one function component")
    law = laws.pop() if members else None
    return CausalTeam.of(sig, (s for s, _ in members), law)


def class_to_obj(kind: str, sig: Signature, teams) -> dict:
    """Team-class files: a kind, a signature, and a list of team objects."""
    names = {"c": "causal", "g": "generalized"}
    return {"kind": names.get(kind, kind),
            "signature": signature_to_obj(sig),
            "teams": [team_to_obj(t, embed_signature=False) for t in teams]}


def class_from_obj(obj: dict, sig: Optional[Signature] = None):
    if sig is None:
        if "signature" not in obj:
            raise ModelError("class object carries no signature")
        sig = signature_from_obj(obj["signature"])
    kind = obj.get("kind")
    if kind not in ("causal", "generalized"):
        raise ModelError("class kind must be 'causal' or 'generalized'")
    teams = [team_from_obj(dict(t, kind=kind), sig)
             for t in obj.get("teams", [])]
    return ("c" if kind == "causal" else "g"), sig, teams


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def load_signature(path: str) -> Signature:
    with open(path, encoding="utf-8") as fh:
        return signature_from_obj(json.load(fh))


def load_team(path: str, sig: Optional[Signature] = None) -> Team:
    with open(path, encoding="utf-8") as fh:
        return team_from_obj(json.load(fh), sig)
