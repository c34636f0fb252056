"""Python front end for the rbot C++ core.

The extension exchanges JSON text; these wrappers accept and return plain
Python objects (dicts parsed from that JSON) except for SVG, which stays text.
"""

import json

from . import _core
from ._core import (
    Error,
    ParseError,
    ShapeError,
    SizeGuardError,
    UnsupportedError,
    ValidationError,
)

__all__ = [
    "Error",
    "ParseError",
    "ShapeError",
    "SizeGuardError",
    "UnsupportedError",
    "ValidationError",
    "build_example",
    "energy",
    "load_instance",
    "oracle",
    "render_svg",
    "solve",
    "validate",
    "verify",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def load_instance(instance):
    """Parse and validate an instance; returns its canonical form."""
    return json.loads(_core.load_instance(_text(instance)))


def validate(instance):
    return json.loads(_core.validate(_text(instance)))


def solve(instance, model="eulerian", seed=0, restarts=8, max_iters=200, delta=0.125,
          dictionary=16, check_oracle=False):
    return json.loads(_core.solve(_text(instance), model, seed, restarts, max_iters, delta,
                                  dictionary, check_oracle))


def oracle(instance, model="eulerian", delta=0.125):
    return json.loads(_core.oracle(_text(instance), model, delta))


def energy(instance, competitor):
    """Evaluate a competitor, or the competitor inside a solve report."""
    return json.loads(_core.energy(_text(instance), _text(competitor)))


def build_example(name, levels=3, epsilon=0.125, beta=1.0, loops=4, payoff=None, detour=0.25):
    return json.loads(_core.build_example(name, levels, epsilon, beta, loops, payoff, detour))


def verify(name, levels=3, epsilon=0.125, beta=1.0, loops=4, payoff=None, detour=0.25, seed=0,
           restarts=8):
    return json.loads(_core.verify(name, levels, epsilon, beta, loops, payoff, detour, seed,
                                   restarts))


def render_svg(instance, report=None):
    return _core.render_svg(_text(instance), None if report is None else _text(report))
