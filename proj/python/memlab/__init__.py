"""Python surface for the memlab core.

Thin wrappers over the native module: inputs and outputs are plain dicts,
serialized to the JSON shapes the core understands.
"""

import json as _json

from memlab import _core

__version__ = _core.__version__


def run_program(text, state=None, fuel=256, config=None):
    out = _core.run_program(
        text,
        _json.dumps(state) if state is not None else "",
        fuel,
        _json.dumps(config) if config is not None else "",
    )
    return _json.loads(out)


def pretty_program(text):
    return _core.pretty_program(text)


def pretty_assertion(text):
    return _core.pretty_assertion(text)


def check_triple(pre, cmd, post, mode="strict", samples=200, fuel=256, seed=0):
    return _json.loads(_core.check_triple(pre, cmd, post, mode, samples, fuel, seed))


def run_campaign(theorem, config=None, trials=1000, seed=0, fuel=256, jobs=1):
    out = _core.run_campaign(
        theorem,
        _json.dumps(config) if config is not None else "",
        trials,
        seed,
        fuel,
        jobs,
    )
    return _json.loads(out)


def hunt(theorem, config, trials=1000, seed=0, fuel=256):
    return _json.loads(_core.hunt(theorem, _json.dumps(config), trials, seed, fuel))


def machine_run(state, steps=1000):
    return _json.loads(_core.machine_run(_json.dumps(state), steps))


def assemble(text):
    return list(_core.assemble(text))


def known_theorems():
    return list(_core.known_theorems())
