"""Hypothesis selection for B proof obligations."""

import json

from ._core import (
    FormulaSyntaxError,
    Hypothesis,
    PogError,
    PogFile,
    ProofObligation,
    ScriptError,
    SelectorError,
    Workbench,
    builtin_prove,
    free_identifiers,
    generate_synthetic,
    load_pog,
    normalize_formula,
    normalize_script,
    parse_pog,
)
from . import _core

__all__ = [
    "FormulaSyntaxError",
    "Hypothesis",
    "PogError",
    "PogFile",
    "ProofObligation",
    "ScriptError",
    "SelectorError",
    "Workbench",
    "builtin_prove",
    "free_identifiers",
    "generate_synthetic",
    "load_pog",
    "normalize_formula",
    "normalize_script",
    "parse_pog",
    "replay",
    "state",
]


def state(workbench):
    """State view of a workbench as a dict."""
    return json.loads(workbench.state_json())


def replay(pog, script, selector="all", keep_going=False, prove=False):
    """Replay a script over the selected obligations; returns the report dict."""
    return json.loads(_core.replay_json(pog, script, selector, keep_going, prove))
