"""Simulation config files.

A config is a TOML document::

    master_seed = 20240521          # optional, default 0
    replicates = 2000               # default for every scenario
    level = 0.95                    # default 0.95
    methods = ["profile", "wald", "tanh-wald"]

    [grid]                          # optional Cartesian product
    p0 = [0.1, 0.5, 0.9]
    p1 = [0.1, 0.5, 0.9]
    n = [100, 1000]                 # balanced arms; or give n0 = [...] and n1 = [...]

    [[scenario]]                    # optional, repeatable; may override
    p0 = 0.3                        # replicates, level and methods
    p1 = 0.2
    n0 = 1000
    n1 = 1000

Grid scenarios come first (ordered by n0, n1, p0, p1), then the explicit
``[[scenario]]`` tables in file order. At least one scenario is required.
"""

from __future__ import annotations

import re
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .simulation import Scenario, grid

_TOP_KEYS = {"master_seed", "replicates", "level", "methods", "grid", "scenario"}
_GRID_KEYS = {"p0", "p1", "n", "n0", "n1"}
_SCENARIO_KEYS = {"p0", "p1", "n", "n0", "n1", "replicates", "level", "methods"}


def _line_of(text: str, pattern: str, occurrence: int = 0) -> int | None:
    hits = [m.start() for m in re.finditer(pattern, text, flags=re.MULTILINE)]
    if occurrence < len(hits):
        return text.count("\n", 0, hits[occurrence]) + 1
    return None


def _fail(msg: str, line: int | None, source: str):
    where = f"{source}:{line}" if line else source
    raise ConfigError(f"{where}: {msg}")


def parse_config(text: str, source: str = "<config>", master_seed: int | None = None) -> list[Scenario]:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        _fail(f"parse error: {exc}", int(m.group(1)) if m else None, source)

    for key in doc:
        if key not in _TOP_KEYS:
            _fail(f"unknown key {key!r}", _line_of(text, rf"^\s*{re.escape(key)}\s*="), source)

    seed = doc.get("master_seed", 0) if master_seed is None else master_seed
    defaults = {
        "replicates": doc.get("replicates", 2000),
        "level": doc.get("level", 0.95),
        "methods": tuple(doc.get("methods", ("profile", "wald", "tanh-wald"))),
        "master_seed": seed,
    }
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        _fail(f"master_seed must be an unsigned 64-bit integer, got {seed!r}",
              _line_of(text, r"^\s*master_seed\s*="), source)

    scenarios: list[Scenario] = []
    g = doc.get("grid")
    if g is not None:
        line = _line_of(text, r"^\s*\[grid\]")
        if not isinstance(g, dict):
            _fail("[grid] must be a table", line, source)
        unknown = set(g) - _GRID_KEYS
        if unknown:
            _fail(f"unknown grid key(s) {sorted(unknown)}", line, source)
        try:
            n0 = g.get("n0", g.get("n"))
            n1 = g.get("n1", g.get("n"))
            if "n" in g and ("n0" in g or "n1" in g):
                raise ConfigError("give either n or n0/n1, not both")
            if any(v is None for v in (g.get("p0"), g.get("p1"), n0, n1)):
                raise ConfigError("grid needs p0, p1 and n (or n0 and n1)")
            if "n" in g:
                for n in g["n"]:
                    scenarios += grid(g["p0"], g["p1"], [n], [n], **defaults)
            else:
                scenarios += grid(g["p0"], g["p1"], n0, n1, **defaults)
        except (ConfigError, TypeError) as exc:
            _fail(str(exc), line, source)

    for i, tbl in enumerate(doc.get("scenario", [])):
        line = _line_of(text, r"^\s*\[\[scenario\]\]", i)
        unknown = set(tbl) - _SCENARIO_KEYS
        if unknown:
            _fail(f"unknown scenario key(s) {sorted(unknown)}", line, source)
        kw = dict(defaults)
        kw.update({k: tbl[k] for k in ("replicates", "level") if k in tbl})
        if "methods" in tbl:
            kw["methods"] = tuple(tbl["methods"])
        try:
            n0 = tbl.get("n0", tbl.get("n"))
            n1 = tbl.get("n1", tbl.get("n"))
            if any(v is None for v in (tbl.get("p0"), tbl.get("p1"), n0, n1)):
                raise ConfigError("scenario needs p0, p1 and n (or n0 and n1)")
            scenarios.append(Scenario(tbl["p0"], tbl["p1"], n0, n1, **kw))
        except (ConfigError, TypeError) as exc:
            _fail(str(exc), line, source)

    if not scenarios:
        _fail("config defines no scenarios", None, source)
    return scenarios


def load_config(path: str | Path, master_seed: int | None = None) -> list[Scenario]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    return parse_config(text, source=str(path), master_seed=master_seed)
