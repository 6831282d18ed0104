"""Configuration-driven experiment runner with deterministic artifacts.

``ppclust <experiment> --config FILE [--seed N] [--threads K] [--plot]
[--out DIR]`` reads a flat INI-style configuration (sections in brackets,
``key = value`` pairs), validates every key against the experiment's
schema before any computation starts, runs the experiment, and writes its
artifacts into the output directory:

- ``manifest.ini``: the fully resolved configuration (defaults included)
  plus the tool version.  Re-running from the manifest reproduces every
  CSV byte for byte.  The output directory and thread count are
  invocation properties, not experiment parameters, so they are not part
  of the manifest.
- CSV result files in the owning module's schema (17 significant digits,
  ``.`` decimal separator, LF line endings).
- optional minimal SVG plots (fixed 800x600 viewbox, one polyline per
  series, axes and legend) when ``--plot`` is given.

Any configuration key can be overridden on the command line with
``--section.key value`` pairs; ``--seed`` and ``--threads`` are shorthands
for the run seed and the parallelism cap.  The default thread count can
also be set with the ``PPCLUST_THREADS`` environment variable.

Exit codes: 0 success, 2 configuration error (the message names the
offending key, and the line for file syntax errors), 3 runtime error
(module error messages are passed through verbatim).
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import (
    __version__,
    compare,
    complexes,
    dists,
    graphs,
    percolation,
    procgen,
    shotnoise,
    summaries,
)
from .core import RandomStream, Window, box

THREADS_ENV_VAR = "PPCLUST_THREADS"

EXPERIMENTS = (
    "sample",
    "summary",
    "compare",
    "percolation",
    "coverage",
    "sinr",
    "graph",
    "complex",
    "kernel_chain",
)


class ConfigError(Exception):
    """Invalid or incomplete experiment configuration."""


# ---------------------------------------------------------------------------
# Value parsers.  Each turns the raw string into (typed value, canonical
# string); the canonical string round-trips through the manifest to the
# identical typed value.
# ---------------------------------------------------------------------------


def _parse_int(text: str) -> tuple:
    try:
        value = int(text.strip())
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}")
    return value, str(value)


def _parse_pos_int(text: str) -> tuple:
    value, canon = _parse_int(text)
    if value < 1:
        raise ConfigError(f"expected a positive integer, got {text!r}")
    return value, canon


def _parse_nonneg_int(text: str) -> tuple:
    value, canon = _parse_int(text)
    if value < 0:
        raise ConfigError(f"expected a non-negative integer, got {text!r}")
    return value, canon


def _parse_float(text: str) -> tuple:
    try:
        value = float(text.strip())
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}")
    if not math.isfinite(value):
        raise ConfigError(f"expected a finite number, got {text!r}")
    return value, repr(value)


def _parse_pos_float(text: str) -> tuple:
    value, canon = _parse_float(text)
    if not value > 0:
        raise ConfigError(f"expected a positive number, got {text!r}")
    return value, canon


def _parse_nonneg_float(text: str) -> tuple:
    value, canon = _parse_float(text)
    if value < 0:
        raise ConfigError(f"expected a non-negative number, got {text!r}")
    return value, canon


def _parse_unit_float(text: str) -> tuple:
    value, canon = _parse_float(text)
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"expected a number in [0, 1], got {text!r}")
    return value, canon


def _parse_bool(text: str) -> tuple:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True, "true"
    if lowered in ("false", "0", "no", "off"):
        return False, "false"
    raise ConfigError(f"expected true or false, got {text!r}")


def _split_list(text: str) -> list:
    return [p for p in (piece.strip() for piece in text.split(",")) if p]


def _parse_floats(text: str) -> tuple:
    parts = _split_list(text)
    if not parts:
        raise ConfigError("expected a comma-separated list of numbers")
    values = []
    for part in parts:
        value, _ = _parse_float(part)
        values.append(value)
    return tuple(values), ",".join(repr(v) for v in values)


def _parse_pos_floats(text: str) -> tuple:
    values, canon = _parse_floats(text)
    if any(v <= 0 for v in values):
        raise ConfigError(f"expected positive numbers, got {text!r}")
    return values, canon


def _parse_pos_ints(text: str) -> tuple:
    parts = _split_list(text)
    if not parts:
        raise ConfigError("expected a comma-separated list of integers")
    values = []
    for part in parts:
        value, _ = _parse_pos_int(part)
        values.append(value)
    return tuple(values), ",".join(str(v) for v in values)


def _parse_str(text: str) -> tuple:
    value = text.strip()
    if not value:
        raise ConfigError("expected a non-empty value")
    return value, value


def _choice(*options: str) -> Callable:
    def parse(text: str) -> tuple:
        value = text.strip().lower()
        if value not in options:
            raise ConfigError(f"expected one of {', '.join(options)}; got {text!r}")
        return value, value

    return parse


def _parse_count_dist(text: str) -> tuple:
    """Count distribution from ``name arg ...`` words.

    Supported: ``deterministic k``, ``binomial n p``, ``poisson lam``,
    ``neg_binomial r p``, ``geometric p``, ``hypergeometric n m k``, and
    ``geometric_mixture w:p w:p ...`` (weights summing to 1).
    """
    words = text.split()
    if not words:
        raise ConfigError("expected a count distribution")
    name, args = words[0].lower(), words[1:]

    def need(k: int) -> None:
        if len(args) != k:
            raise ConfigError(
                f"count distribution {name!r} takes {k} argument(s), got {len(args)}"
            )

    try:
        if name == "deterministic":
            need(1)
            k, ck = _parse_nonneg_int(args[0])
            return dists.deterministic(k), f"deterministic {ck}"
        if name == "binomial":
            need(2)
            n, cn = _parse_nonneg_int(args[0])
            p, cp = _parse_unit_float(args[1])
            return dists.binomial(n, p), f"binomial {cn} {cp}"
        if name == "poisson":
            need(1)
            lam, cl = _parse_nonneg_float(args[0])
            return dists.poisson(lam), f"poisson {cl}"
        if name == "neg_binomial":
            need(2)
            r, cr = _parse_pos_float(args[0])
            p, cp = _parse_unit_float(args[1])
            return dists.neg_binomial(r, p), f"neg_binomial {cr} {cp}"
        if name == "geometric":
            need(1)
            p, cp = _parse_unit_float(args[0])
            return dists.geometric(p), f"geometric {cp}"
        if name == "hypergeometric":
            need(3)
            n, cn = _parse_nonneg_int(args[0])
            m, cm = _parse_nonneg_int(args[1])
            k, ck = _parse_nonneg_int(args[2])
            return dists.hypergeometric(n, m, k), f"hypergeometric {cn} {cm} {ck}"
        if name == "geometric_mixture":
            if not args:
                raise ConfigError("geometric_mixture needs w:p pairs")
            weights, comps, canon = [], [], []
            for pair in args:
                if ":" not in pair:
                    raise ConfigError(f"expected w:p pair, got {pair!r}")
                w_text, p_text = pair.split(":", 1)
                w, cw = _parse_nonneg_float(w_text)
                p, cp = _parse_unit_float(p_text)
                weights.append(w)
                comps.append(dists.geometric(p))
                canon.append(f"{cw}:{cp}")
            return (
                dists.mixture(weights, comps),
                "geometric_mixture " + " ".join(canon),
            )
    except ValueError as exc:  # factory rejected the parameters
        raise ConfigError(str(exc))
    raise ConfigError(f"unknown count distribution {name!r}")


def _parse_displacement(text: str) -> tuple:
    words = text.split()
    if not words:
        raise ConfigError("expected a displacement")
    name, args = words[0].lower(), words[1:]
    if name == "uniform_in_cell":
        if args:
            raise ConfigError("uniform_in_cell takes no arguments")
        return procgen.uniform_in_cell(), "uniform_in_cell"
    if name == "gaussian":
        if len(args) != 1:
            raise ConfigError("gaussian displacement takes one argument (sigma)")
        sigma, cs = _parse_pos_float(args[0])
        return procgen.gaussian_displacement(sigma), f"gaussian {cs}"
    if name == "ball":
        if len(args) != 1:
            raise ConfigError("ball displacement takes one argument (radius)")
        rho, cr = _parse_pos_float(args[0])
        return procgen.ball_displacement(rho), f"ball {cr}"
    raise ConfigError(f"unknown displacement {name!r}")


def _parse_response(text: str) -> tuple:
    words = text.split()
    if not words:
        raise ConfigError("expected an attenuation function")
    name, args = words[0].lower(), words[1:]
    if name == "exponential":
        if len(args) != 1:
            raise ConfigError("exponential attenuation takes one argument (beta)")
        beta, cb = _parse_pos_float(args[0])
        return shotnoise.exponential_response(beta), f"exponential {cb}"
    if name == "power_law":
        if len(args) != 2:
            raise ConfigError("power_law attenuation takes two arguments (beta eps)")
        beta, cb = _parse_pos_float(args[0])
        eps, ce = _parse_pos_float(args[1])
        return shotnoise.power_law_response(beta, eps), f"power_law {cb} {ce}"
    if name == "indicator_ball":
        if len(args) != 1:
            raise ConfigError("indicator_ball attenuation takes one argument (rho)")
        rho, cr = _parse_pos_float(args[0])
        return shotnoise.indicator_ball(rho), f"indicator_ball {cr}"
    raise ConfigError(f"unknown attenuation {name!r}")


def _parse_mixture_pairs(text: str) -> tuple:
    words = text.split()
    if not words:
        raise ConfigError("expected w:lam pairs")
    pairs, canon = [], []
    for pair in words:
        if ":" not in pair:
            raise ConfigError(f"expected w:lam pair, got {pair!r}")
        w_text, lam_text = pair.split(":", 1)
        w, cw = _parse_pos_float(w_text)
        lam, cl = _parse_nonneg_float(lam_text)
        pairs.append((w, lam))
        canon.append(f"{cw}:{cl}")
    if abs(sum(w for w, _ in pairs) - 1.0) > 1e-9:
        raise ConfigError("mixture weights must sum to 1")
    return tuple(pairs), " ".join(canon)


# ---------------------------------------------------------------------------
# Generator and window section handlers.
# ---------------------------------------------------------------------------

_REQUIRED = object()

# family -> ((key, parser, default-or-_REQUIRED), ...)
_GENERATOR_TYPES = {
    "poisson": (("intensity", _parse_nonneg_float, _REQUIRED),),
    "binomial": (("n", _parse_nonneg_int, _REQUIRED),),
    "square_lattice": (
        ("delta", _parse_pos_float, _REQUIRED),
        ("stationary", _parse_bool, "true"),
    ),
    "hex_lattice": (
        ("delta", _parse_pos_float, _REQUIRED),
        ("stationary", _parse_bool, "true"),
    ),
    "bernoulli_lattice": (
        ("delta", _parse_pos_float, _REQUIRED),
        ("p", _parse_unit_float, _REQUIRED),
    ),
    "perturbed_lattice": (
        ("delta", _parse_pos_float, _REQUIRED),
        ("replication", _parse_count_dist, _REQUIRED),
        ("displacement", _parse_displacement, "uniform_in_cell"),
    ),
    "neyman_scott": (
        ("parent_intensity", _parse_pos_float, _REQUIRED),
        ("replication", _parse_count_dist, _REQUIRED),
        ("displacement", _parse_displacement, _REQUIRED),
    ),
    "matern_cluster": (
        ("parent_intensity", _parse_pos_float, _REQUIRED),
        ("mean_children", _parse_pos_float, _REQUIRED),
        ("radius", _parse_pos_float, _REQUIRED),
    ),
    "thomas_cluster": (
        ("parent_intensity", _parse_pos_float, _REQUIRED),
        ("mean_children", _parse_pos_float, _REQUIRED),
        ("sigma", _parse_pos_float, _REQUIRED),
    ),
    "mixed_poisson": (("pairs", _parse_mixture_pairs, _REQUIRED),),
    "log_gaussian_cox": (
        ("mu_g", _parse_float, _REQUIRED),
        ("sigma", _parse_nonneg_float, _REQUIRED),
        ("corr_length", _parse_pos_float, _REQUIRED),
        ("grid_n", _parse_pos_int, "32"),
    ),
    "ginibre": (
        ("n_rank", _parse_pos_int, _REQUIRED),
        ("radius", _parse_pos_float, _REQUIRED),
    ),
}


def _build_generator(family: str, v: dict) -> procgen.GeneratorSpec:
    try:
        if family == "poisson":
            return procgen.homogeneous_poisson(v["intensity"])
        if family == "binomial":
            return procgen.binomial_process(v["n"])
        if family == "square_lattice":
            return procgen.square_lattice(v["delta"], v["stationary"])
        if family == "hex_lattice":
            return procgen.hex_lattice(v["delta"], v["stationary"])
        if family == "bernoulli_lattice":
            return procgen.bernoulli_lattice(v["delta"], v["p"])
        if family == "perturbed_lattice":
            return procgen.perturbed_lattice(
                v["delta"], v["replication"], v["displacement"]
            )
        if family == "neyman_scott":
            return procgen.neyman_scott(
                v["parent_intensity"], v["replication"], v["displacement"]
            )
        if family == "matern_cluster":
            return procgen.matern_cluster(
                v["parent_intensity"], v["mean_children"], v["radius"]
            )
        if family == "thomas_cluster":
            return procgen.thomas_cluster(
                v["parent_intensity"], v["mean_children"], v["sigma"]
            )
        if family == "mixed_poisson":
            return procgen.mixed_poisson(v["pairs"])
        if family == "log_gaussian_cox":
            return procgen.log_gaussian_cox(
                v["mu_g"], v["sigma"], v["corr_length"], v["grid_n"]
            )
        if family == "ginibre":
            return procgen.ginibre_truncated(v["n_rank"], v["radius"])
    except ValueError as exc:  # factory rejected the parameters
        raise ConfigError(str(exc))
    raise AssertionError(family)


def _handle_generator(section: str, items: dict) -> tuple:
    """Validate a [generator] section; returns (spec, canonical key dict)."""
    if "type" not in items:
        raise ConfigError(f"missing required key 'type' in [{section}]")
    family = items["type"].strip().lower()
    if family not in _GENERATOR_TYPES:
        known = ", ".join(sorted(_GENERATOR_TYPES))
        raise ConfigError(
            f"[{section}] type: unknown generator {family!r} (known: {known})"
        )
    keyspec = _GENERATOR_TYPES[family]
    known_keys = {k for k, _, _ in keyspec}
    for key in items:
        if key != "type" and key not in known_keys:
            raise ConfigError(
                f"unknown key '{key}' in [{section}] for generator {family!r}"
            )
    values, canonical = {}, {"type": family}
    for key, parser, default in keyspec:
        raw = items.get(key, default)
        if raw is _REQUIRED:
            raise ConfigError(f"missing required key '{key}' in [{section}]")
        try:
            values[key], canonical[key] = parser(raw)
        except ConfigError as exc:
            raise ConfigError(f"[{section}] {key}: {exc}")
    return _build_generator(family, values), canonical


def _handle_window(section: str, items: dict) -> tuple:
    """Validate a [window] section; returns (Window, canonical key dict)."""
    allowed = {"sides", "dimension", "metric"}
    for key in items:
        if key not in allowed:
            raise ConfigError(f"unknown key '{key}' in [{section}]")
    if "sides" not in items:
        raise ConfigError(f"missing required key 'sides' in [{section}]")
    try:
        sides, _ = _parse_pos_floats(items["sides"])
    except ConfigError as exc:
        raise ConfigError(f"[{section}] sides: {exc}")
    if "dimension" in items:
        try:
            dim, _ = _parse_pos_int(items["dimension"])
        except ConfigError as exc:
            raise ConfigError(f"[{section}] dimension: {exc}")
        if len(sides) == 1:
            sides = sides * dim
        elif len(sides) != dim:
            raise ConfigError(
                f"[{section}] dimension: {dim} does not match {len(sides)} sides"
            )
    metric = "periodic"
    if "metric" in items:
        try:
            metric, _ = _choice("periodic", "euclidean")(items["metric"])
        except ConfigError as exc:
            raise ConfigError(f"[{section}] metric: {exc}")
    window = box(*((0.0, s) for s in sides), metric=metric)
    canonical = {"sides": ",".join(repr(s) for s in sides), "metric": metric}
    return window, canonical


# ---------------------------------------------------------------------------
# Experiment schemas.  A section maps either to a key table
# {key: (parser, default)} or to one of the special markers below.
# ---------------------------------------------------------------------------

_WINDOW = "window-section"
_GEN = "generator-section"
_GEN_OPT = "optional-generator-section"


def _k(parser: Callable, default=_REQUIRED) -> tuple:
    return parser, default


_RUN_SEED = {"seed": _k(_parse_nonneg_int)}

SCHEMAS = {
    "sample": {
        "run": dict(_RUN_SEED),
        "window": _WINDOW,
        "generator": _GEN,
    },
    "summary": {
        "run": {**_RUN_SEED, "replications": _k(_parse_pos_int, "100")},
        "window": _WINDOW,
        "generator": _GEN,
        "summary": {
            "statistic": _k(_choice("ripley_k", "pair_correlation"), "ripley_k"),
            "r_min": _k(_parse_pos_float),
            "r_max": _k(_parse_pos_float),
            "r_count": _k(_parse_pos_int, "25"),
            "bandwidth": _k(_parse_nonneg_float, "0.0"),
        },
    },
    "compare": {
        "run": {**_RUN_SEED, "replications": _k(_parse_pos_int, "200")},
        "window": _WINDOW,
        "generator": _GEN,
        "generator_b": _GEN_OPT,
        "compare": {
            "mode": _k(_choice("weak", "two"), "weak"),
            "statistic": _k(
                _choice("voids", "factorial_moments", "ripley_k", "variance"),
                "voids",
            ),
            "scales": _k(_parse_pos_floats, "0.5,1.0"),
            "k": _k(_parse_pos_int, "2"),
            "k_max": _k(_parse_pos_int, "3"),
            "placements": _k(_parse_pos_int, "64"),
        },
    },
    "percolation": {
        "run": {**_RUN_SEED, "replications": _k(_parse_pos_int, "50")},
        "window": _WINDOW,
        "generator": _GEN,
        "generator_b": _GEN_OPT,
        "percolation": {
            "mode": _k(_choice("sweep", "crossing", "critical"), "sweep"),
            "r_min": _k(_parse_nonneg_float, "0.1"),
            "r_max": _k(_parse_pos_float, "1.0"),
            "r_step": _k(_parse_pos_float, "0.1"),
            "tol": _k(_parse_pos_float, "0.02"),
        },
    },
    "coverage": {
        "run": {**_RUN_SEED, "replications": _k(_parse_pos_int, "100")},
        "window": _WINDOW,
        "generator": _GEN,
        "coverage": {
            "r_min": _k(_parse_nonneg_float, "0.0"),
            "r_max": _k(_parse_pos_float),
            "r_count": _k(_parse_pos_int, "10"),
            "k": _k(_parse_pos_int, "1"),
            "grid_n": _k(_parse_pos_int, "64"),
        },
    },
    "sinr": {
        "run": dict(_RUN_SEED),
        "window": _WINDOW,
        "generator": _GEN,
        "generator_b": _GEN_OPT,
        "sinr": {
            "power": _k(_parse_pos_float, "1.0"),
            "noise": _k(_parse_nonneg_float, "1.0"),
            "threshold": _k(_parse_pos_float),
            "gamma": _k(_parse_nonneg_float, "0.0"),
            "attenuation": _k(_parse_response, "exponential 1.0"),
            "gammas": _k(_parse_floats, "0.0"),
        },
    },
    "graph": {
        "run": {**_RUN_SEED, "replications": _k(_parse_pos_int, "20")},
        "generator": _GEN,
        "graph": {
            "n_list": _k(_parse_pos_ints),
            "r_coeff": _k(_parse_pos_float, "1.0"),
            "r_exponent": _k(_parse_float, "0.0"),
            "dimension": _k(_parse_pos_int, "2"),
            "clique_threshold": _k(_parse_pos_int, "2"),
            "exact_chromatic_limit": _k(_parse_nonneg_int, "60"),
        },
    },
    "complex": {
        "run": {**_RUN_SEED, "replications": _k(_parse_pos_int, "20")},
        "generator": _GEN,
        "complex": {
            "n_list": _k(_parse_pos_ints),
            "r_coeff": _k(_parse_pos_float, "1.0"),
            "r_exponent": _k(_parse_float, "0.0"),
            "dimension": _k(_parse_pos_int, "2"),
            "k": _k(_parse_nonneg_int, "1"),
        },
    },
    "kernel_chain": {
        "kernel_chain": {
            "lam": _k(_parse_pos_float, "1.0"),
            "n": _k(_parse_pos_int, "6"),
            "m": _k(_parse_pos_int, "4"),
            "r_values": _k(_parse_pos_ints, "2,4"),
            "r1": _k(_parse_pos_float, "1.0"),
            "r2": _k(_parse_pos_float, "2.0"),
            "geo_p": _k(_parse_unit_float, "0.5"),
            "mix_weights": _k(_parse_pos_floats, "0.5,0.5"),
            "mix_ps": _k(_parse_pos_floats, "0.4,0.6666666666666666"),
        },
    },
}


@dataclass
class ResolvedConfig:
    """A validated experiment configuration with typed values."""

    experiment: str
    sections: dict  # section -> {key: canonical string}, schema order
    values: dict  # section -> {key: typed value} for plain sections
    window: Optional[Window]
    generator: Optional[procgen.GeneratorSpec]
    generator_b: Optional[procgen.GeneratorSpec]

    def __getitem__(self, section: str) -> dict:
        return self.values[section]


def resolve_config(experiment: str, raw: dict) -> ResolvedConfig:
    """Validate raw section/key strings against the experiment schema.

    Fills defaults, rejects unknown sections and keys, and parses every
    value; nothing is computed until the whole configuration is valid.
    """
    if experiment not in SCHEMAS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    schema = SCHEMAS[experiment]
    for section in raw:
        if section not in schema:
            raise ConfigError(
                f"unknown section [{section}] for experiment {experiment!r}"
            )
    sections: dict = {}
    values: dict = {}
    window = None
    generator = None
    generator_b = None
    for section, entry in schema.items():
        items = dict(raw.get(section, {}))
        if entry is _WINDOW:
            if section not in raw:
                raise ConfigError(f"missing required section [{section}]")
            window, sections[section] = _handle_window(section, items)
        elif entry in (_GEN, _GEN_OPT):
            if section not in raw:
                if entry is _GEN:
                    raise ConfigError(f"missing required section [{section}]")
                continue
            spec, canonical = _handle_generator(section, items)
            sections[section] = canonical
            if section == "generator":
                generator = spec
            else:
                generator_b = spec
        else:
            for key in items:
                if key not in entry:
                    raise ConfigError(f"unknown key '{key}' in [{section}]")
            sec_values, sec_canon = {}, {}
            for key, (parser, default) in entry.items():
                text = items.get(key, default)
                if text is _REQUIRED:
                    raise ConfigError(
                        f"missing required key '{key}' in [{section}]"
                    )
                try:
                    sec_values[key], sec_canon[key] = parser(text)
                except ConfigError as exc:
                    raise ConfigError(f"[{section}] {key}: {exc}")
            values[section] = sec_values
            sections[section] = sec_canon
    return ResolvedConfig(experiment, sections, values, window, generator, generator_b)


def render_manifest(rc: ResolvedConfig) -> str:
    """INI text of the resolved configuration, re-runnable as a config."""
    lines = ["[meta]", f"experiment = {rc.experiment}", f"version = {__version__}"]
    for section, keys in rc.sections.items():
        lines.append("")
        lines.append(f"[{section}]")
        for key, value in keys.items():
            lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def read_config_file(path: Path) -> dict:
    """Raw section -> {key: value} strings from an INI file."""
    parser = configparser.ConfigParser(
        delimiters=("=",),
        comment_prefixes=("#", ";"),
        inline_comment_prefixes=("#", ";"),
        interpolation=None,
        strict=True,
    )
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        # configparser messages already name the key and line where relevant
        raise ConfigError(str(exc))
    raw = {}
    for section in parser.sections():
        raw[section.strip().lower()] = {
            key: value for key, value in parser.items(section)
        }
    if parser.defaults():
        raise ConfigError("a [DEFAULT] section is not allowed")
    return raw


# ---------------------------------------------------------------------------
# Minimal SVG line plots: fixed 800x600 viewbox, polyline per series,
# axes, ticks, legend, optional log-scale ordinate.
# ---------------------------------------------------------------------------

_PALETTE = ("#1965b0", "#dc050c", "#4eb265", "#882e72", "#e8601c", "#7bafde")


def svg_plot(series, title: str, x_label: str, y_label: str, log_y: bool = False) -> str:
    """Render (label, xs, ys[, marker]) series as an 800x600 SVG chart.

    ``marker`` is "line" (default, a polyline) or "points" (circles).
    With ``log_y`` the ordinate is log10-scaled and non-positive values
    are dropped.
    """
    left, right, top, bottom = 80.0, 770.0, 50.0, 540.0

    cleaned = []
    xs_all, ys_all = [], []
    for entry in series:
        label, xs, ys = entry[0], list(entry[1]), list(entry[2])
        marker = entry[3] if len(entry) > 3 else "line"
        pts = []
        for x, y in zip(xs, ys):
            x, y = float(x), float(y)
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            if log_y:
                if y <= 0:
                    continue
                y = math.log10(y)
            pts.append((x, y))
            xs_all.append(x)
            ys_all.append(y)
        cleaned.append((label, pts, marker))

    if xs_all:
        x_lo, x_hi = min(xs_all), max(xs_all)
        y_lo, y_hi = min(ys_all), max(ys_all)
    else:
        x_lo, x_hi, y_lo, y_hi = 0.0, 1.0, 0.0, 1.0
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    x_pad = 0.05 * (x_hi - x_lo)
    y_pad = 0.05 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    def fx(v: float) -> float:
        return left + (v - x_lo) * (right - left) / (x_hi - x_lo)

    def fy(v: float) -> float:
        return bottom - (v - y_lo) * (bottom - top) / (y_hi - y_lo)

    def esc(text: str) -> str:
        return (
            text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        )

    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 600" '
        'width="800" height="600">',
        '<rect x="0" y="0" width="800" height="600" fill="white"/>',
        f'<text x="400" y="28" font-size="18" text-anchor="middle" '
        f'font-family="sans-serif">{esc(title)}</text>',
        f'<line x1="{left:.2f}" y1="{bottom:.2f}" x2="{right:.2f}" '
        f'y2="{bottom:.2f}" stroke="black" stroke-width="1"/>',
        f'<line x1="{left:.2f}" y1="{bottom:.2f}" x2="{left:.2f}" '
        f'y2="{top:.2f}" stroke="black" stroke-width="1"/>',
        f'<text x="{(left + right) / 2:.2f}" y="580" font-size="14" '
        f'text-anchor="middle" font-family="sans-serif">{esc(x_label)}</text>',
        f'<text x="20" y="{(top + bottom) / 2:.2f}" font-size="14" '
        f'text-anchor="middle" font-family="sans-serif" '
        f'transform="rotate(-90 20 {(top + bottom) / 2:.2f})">'
        f"{esc(y_label)}</text>",
    ]
    for i in range(5):
        xv = x_lo + i * (x_hi - x_lo) / 4
        yv = y_lo + i * (y_hi - y_lo) / 4
        px, py = fx(xv), fy(yv)
        y_text = format(10.0**yv, ".3g") if log_y else format(yv, ".4g")
        out.append(
            f'<line x1="{px:.2f}" y1="{bottom:.2f}" x2="{px:.2f}" '
            f'y2="{bottom + 6:.2f}" stroke="black" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{px:.2f}" y="{bottom + 22:.2f}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif">'
            f'{format(xv, ".4g")}</text>'
        )
        out.append(
            f'<line x1="{left - 6:.2f}" y1="{py:.2f}" x2="{left:.2f}" '
            f'y2="{py:.2f}" stroke="black" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{left - 10:.2f}" y="{py + 4:.2f}" font-size="12" '
            f'text-anchor="end" font-family="sans-serif">{y_text}</text>'
        )
    for idx, (label, pts, marker) in enumerate(cleaned):
        color = _PALETTE[idx % len(_PALETTE)]
        if marker == "points":
            for x, y in pts:
                out.append(
                    f'<circle cx="{fx(x):.2f}" cy="{fy(y):.2f}" r="2.5" '
                    f'fill="{color}"/>'
                )
        elif pts:
            coords = " ".join(f"{fx(x):.2f},{fy(y):.2f}" for x, y in pts)
            out.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" '
                f'stroke-width="1.5"/>'
            )
        ly = top + 18 + 18 * idx
        out.append(
            f'<line x1="{right - 150:.2f}" y1="{ly:.2f}" x2="{right - 125:.2f}" '
            f'y2="{ly:.2f}" stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{right - 118:.2f}" y="{ly + 4:.2f}" font-size="12" '
            f'font-family="sans-serif">{esc(label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Experiment runners.  Each returns (csv_files, plot_files) as lists of
# (filename, text) pairs; all randomness flows from the configured seed.
# ---------------------------------------------------------------------------


def _stream(rc: ResolvedConfig) -> RandomStream:
    return RandomStream(rc["run"]["seed"])


def _radius_grid(lo: float, hi: float, step: float, where: str) -> list:
    if hi < lo:
        raise ConfigError(f"[{where}] r_max: must be >= r_min")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


def _linspace_grid(lo: float, hi: float, count: int, where: str) -> list:
    if hi < lo:
        raise ConfigError(f"[{where}] r_max: must be >= r_min")
    if count == 1:
        return [lo]
    return [float(v) for v in np.linspace(lo, hi, count)]


def _run_sample(rc: ResolvedConfig, threads: int) -> tuple:
    stream = _stream(rc)
    pattern = procgen.sample(rc.generator, rc.window, stream)
    files = [
        ("points.csv", procgen.pattern_to_csv(pattern)),
        ("metadata.txt", procgen.pattern_metadata(rc.generator, rc.window, stream)),
    ]
    pts = np.asarray(pattern.points, dtype=float)
    if pts.size:
        xs, ys = pts[:, 0], (pts[:, 1] if pattern.dim > 1 else np.zeros(len(pts)))
    else:
        xs, ys = [], []
    plots = [
        (
            "points.svg",
            svg_plot(
                [(f"{rc.generator.family} points", xs, ys, "points")],
                "Sampled point pattern",
                "x0",
                "x1",
            ),
        )
    ]
    return files, plots


def _run_summary(rc: ResolvedConfig, threads: int) -> tuple:
    p = rc["summary"]
    grid = _linspace_grid(p["r_min"], p["r_max"], p["r_count"], "summary")
    stream = _stream(rc)
    reps = rc["run"]["replications"]
    if p["statistic"] == "ripley_k":
        curve = summaries.ripley_k(rc.generator, rc.window, grid, reps, stream, threads)
    else:
        bandwidth = p["bandwidth"] if p["bandwidth"] > 0 else None
        curve = summaries.pair_correlation(
            rc.generator, rc.window, grid, bandwidth, reps, stream, threads
        )
    files = [("curve.csv", summaries.curve_to_csv(curve))]
    plots = [
        (
            "curve.svg",
            svg_plot(
                [(p["statistic"], curve.abscissa, curve.values())],
                f"{p['statistic']} estimate",
                "r",
                p["statistic"],
            ),
        )
    ]
    return files, plots


def _safe_name(statistic: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]+", "_", statistic).strip("_")


def _run_compare(rc: ResolvedConfig, threads: int) -> tuple:
    p = rc["compare"]
    stream = _stream(rc)
    reps = rc["run"]["replications"]
    if p["mode"] == "weak":
        if rc.generator_b is not None:
            raise ConfigError(
                "[generator_b] is only used by compare mode 'two'; weak mode "
                "tests [generator] against its Poisson reference"
            )
        reports = compare.weak_poisson_test(
            rc.generator,
            rc.window,
            p["scales"],
            p["k_max"],
            p["placements"],
            reps,
            stream,
            threads,
        )
        overall = compare.overall_verdict(reports)
    else:
        if rc.generator_b is None:
            raise ConfigError("compare mode 'two' needs a [generator_b] section")
        reports = [
            compare.compare_two(
                rc.generator,
                rc.generator_b,
                rc.window,
                p["statistic"],
                p["scales"],
                p["k"],
                p["placements"],
                reps,
                stream,
                threads,
            )
        ]
        overall = reports[0].verdict
    files = [
        (f"ordering_{_safe_name(rep.statistic)}.csv", compare.ordering_to_csv(rep))
        for rep in reports
    ]
    verdict_lines = ["statistic,verdict"]
    verdict_lines += [f"{rep.statistic},{rep.verdict}" for rep in reports]
    verdict_lines.append(f"overall,{overall}")
    files.append(("verdicts.csv", "\n".join(verdict_lines) + "\n"))
    series = [
        (rep.statistic, [row.scale for row in rep.per_scale], rep.z_scores())
        for rep in reports
    ]
    plots = [
        (
            "compare.svg",
            svg_plot(series, "Estimate vs reference z-scores", "scale", "z"),
        )
    ]
    return files, plots


def _run_percolation(rc: ResolvedConfig, threads: int) -> tuple:
    p = rc["percolation"]
    stream = _stream(rc)
    reps = rc["run"]["replications"]
    mode = p["mode"]
    if mode == "critical":
        est = percolation.critical_radius(
            rc.generator, rc.window, reps, p["tol"], stream, threads
        )
        text = (
            "r_c,std_error,replications\n"
            f"{format(est.value, '.17g')},{format(est.std_error, '.17g')},"
            f"{est.replications}\n"
        )
        return [("critical.csv", text)], []
    radii = _radius_grid(p["r_min"], p["r_max"], p["r_step"], "percolation")
    if mode == "crossing":
        entries = [
            (
                r,
                percolation.crossing_probability(
                    rc.generator, rc.window, r, reps, stream.derive(i), threads
                ),
            )
            for i, r in enumerate(radii)
        ]
        files = [("crossing.csv", percolation.crossing_to_csv(entries))]
        plots = [
            (
                "crossing.svg",
                svg_plot(
                    [("crossing", radii, [e.value for _, e in entries])],
                    "Horizontal crossing probability",
                    "r",
                    "P(crossing)",
                ),
            )
        ]
        return files, plots
    sweeps = [("a", rc.generator, stream.derive(0))]
    if rc.generator_b is not None:
        sweeps.append(("b", rc.generator_b, stream.derive(1)))
    files, series = [], []
    for tag, spec, sub in sweeps:
        sweep = percolation.component_fraction_sweep(
            spec, rc.window, radii, reps, sub, threads
        )
        files.append((f"sweep_{tag}.csv", percolation.sweep_to_csv(sweep)))
        series.append(
            (f"largest ({tag})", radii, [e.value for e in sweep.largest_fraction])
        )
        series.append(
            (f"second ({tag})", radii, [e.value for e in sweep.second_fraction])
        )
    plots = [
        (
            "sweep.svg",
            svg_plot(series, "Component fraction sweep", "r", "fraction of nodes"),
        )
    ]
    return files, plots


def _run_coverage(rc: ResolvedConfig, threads: int) -> tuple:
    p = rc["coverage"]
    grid = _linspace_grid(p["r_min"], p["r_max"], p["r_count"], "coverage")
    stream = _stream(rc)
    reps = rc["run"]["replications"]
    entries = [
        (
            r,
            p["k"],
            shotnoise.k_covered_volume(
                rc.generator,
                rc.window,
                r,
                p["k"],
                p["grid_n"],
                reps,
                stream.derive(i),
                threads,
            ),
        )
        for i, r in enumerate(grid)
    ]
    files = [("coverage.csv", shotnoise.coverage_summary_to_csv(entries))]
    plots = [
        (
            "coverage.svg",
            svg_plot(
                [(f"k={p['k']} covered volume", grid, [e.value for _, _, e in entries])],
                "Expected k-covered volume",
                "r",
                "volume",
            ),
        )
    ]
    return files, plots


def _run_sinr(rc: ResolvedConfig, threads: int) -> tuple:
    p = rc["sinr"]
    stream = _stream(rc)
    pattern_b = procgen.sample(rc.generator, rc.window, stream.derive(0))
    if rc.generator_b is None:
        pattern_i = pattern_b
    else:
        pattern_i = procgen.sample(rc.generator_b, rc.window, stream.derive(1))

    def graph_at(gamma: float) -> percolation.Graph:
        params = percolation.SinrParams(
            p["power"], p["noise"], p["threshold"], gamma, p["attenuation"]
        )
        return percolation.sinr_graph(pattern_b, pattern_i, params)

    g = graph_at(p["gamma"])
    sizes = percolation.components(g)
    files = [
        ("edges.csv", percolation.graph_to_csv(g)),
        (
            "summary.csv",
            "n_vertices,n_edges,n_components,largest_component\n"
            f"{g.n_vertices},{len(g.edges)},{len(sizes)},"
            f"{sizes[0] if sizes else 0}\n",
        ),
    ]
    plots = []
    gammas = p["gammas"]
    if len(gammas) > 1:
        if any(gamma < 0 for gamma in gammas):
            raise ConfigError("[sinr] gammas: must be non-negative")
        counts = [len(graph_at(gamma).edges) for gamma in gammas]
        rows = ["gamma,n_edges"] + [
            f"{format(gamma, '.17g')},{count}" for gamma, count in zip(gammas, counts)
        ]
        files.append(("gamma_sweep.csv", "\n".join(rows) + "\n"))
        plots.append(
            (
                "gamma_sweep.svg",
                svg_plot(
                    [("edges", gammas, counts)],
                    "Edge count under increasing interference",
                    "gamma",
                    "edges",
                ),
            )
        )
    return files, plots


def _run_graph(rc: ResolvedConfig, threads: int) -> tuple:
    p = rc["graph"]
    stream = _stream(rc)
    coeff, expo = p["r_coeff"], p["r_exponent"]
    rows = graphs.scaling_experiment(
        rc.generator,
        lambda n: coeff * n**expo,
        p["n_list"],
        rc["run"]["replications"],
        stream,
        p["dimension"],
        p["clique_threshold"],
        p["exact_chromatic_limit"],
        threads,
    )
    files = [("scaling.csv", graphs.scaling_to_csv(rows))]
    ns = [row.n for row in rows]
    plots = [
        (
            "scaling.svg",
            svg_plot(
                [
                    ("mean clique", ns, [row.mean_clique for row in rows]),
                    ("mean max degree", ns, [row.mean_max_degree for row in rows]),
                    ("mean chromatic", ns, [row.mean_chromatic for row in rows]),
                ],
                "Geometric graph statistics vs window volume",
                "n",
                "value",
            ),
        )
    ]
    return files, plots


def _run_complex(rc: ResolvedConfig, threads: int) -> tuple:
    p = rc["complex"]
    stream = _stream(rc)
    coeff, expo = p["r_coeff"], p["r_exponent"]
    rows = complexes.betti_scaling_experiment(
        rc.generator,
        lambda n: coeff * n**expo,
        p["n_list"],
        p["k"],
        rc["run"]["replications"],
        stream,
        p["dimension"],
        threads,
    )
    files = [("betti.csv", complexes.betti_scaling_to_csv(rows))]
    ns = [row.n for row in rows]
    plots = [
        (
            "betti.svg",
            svg_plot(
                [
                    (f"mean betti_{p['k']}", ns, [row.mean_betti for row in rows]),
                    ("P(betti = 0)", ns, [row.p_zero for row in rows]),
                ],
                "Coverage complex Betti scaling",
                "n",
                "value",
            ),
        )
    ]
    return files, plots


def _format_args(params) -> str:
    return " ".join(format(p, "g") if isinstance(p, float) else str(p) for p in params)


def _dist_label(d: dists.CountDistribution) -> str:
    if d.kind == "mixture":
        weights, comps = d.params
        inner = " ".join(
            f"{format(w, 'g')}:{_dist_label(c)}" for w, c in zip(weights, comps)
        )
        return f"mixture({inner})"
    return f"{d.kind}({_format_args(d.params)})"


def _chain_pairs(rc: ResolvedConfig) -> list:
    """Adjacent pairs of the two convex-order chains, least variable first.

    The dispersion-increasing chain runs hypergeometric -> binomials with
    growing trial counts -> Poisson; the dispersion-decreasing side of the
    Poisson runs negative binomials with shrinking shape -> geometric ->
    geometric mixture.  The hypergeometric draw count lam*n/m must be an
    integer; when it is not, m is lowered to the nearest value that makes
    it one, so the emitted chain stays a family of genuine distributions.
    """
    p = rc["kernel_chain"]
    lam, n, m = p["lam"], p["n"], p["m"]
    if m > n:
        raise ConfigError("[kernel_chain] m: must be <= n")
    if lam > min(m, *p["r_values"]):
        raise ConfigError(
            "[kernel_chain] lam: must be <= m and every r value, so that "
            "every binomial success probability lam/r stays in [0, 1]"
        )
    m_h = None
    for candidate in range(m, 0, -1):
        draws = lam * n / candidate
        if abs(draws - round(draws)) < 1e-9 and 1 <= round(draws) <= n:
            m_h = candidate
            break
    if m_h is None:
        raise ConfigError(
            "[kernel_chain] m: no m' <= m makes lam*n/m' a valid integer "
            "draw count for the hypergeometric"
        )
    draws = int(round(lam * n / m_h))
    counts = sorted(set(p["r_values"]) | {m, m_h})
    sub = [dists.hypergeometric(n, m_h, draws)]
    sub += [dists.binomial(t, lam / t) for t in counts]
    sub.append(dists.poisson(lam))

    r1, r2 = p["r1"], p["r2"]
    if r1 > r2:
        raise ConfigError("[kernel_chain] r1: must be <= r2")
    weights, ps = p["mix_weights"], p["mix_ps"]
    if len(weights) != len(ps):
        raise ConfigError(
            "[kernel_chain] mix_ps: needs as many entries as mix_weights"
        )
    total = sum(weights)
    weights = [w / total for w in weights]
    sup = [
        dists.poisson(lam),
        dists.neg_binomial(r2, lam / (r2 + lam)),
        dists.neg_binomial(r1, lam / (r1 + lam)),
        dists.geometric(p["geo_p"]),
        dists.mixture(weights, [dists.geometric(q) for q in ps]),
    ]
    pairs = []
    for chain, elements in (("sub", sub), ("super", sup)):
        for lower, upper in zip(elements, elements[1:]):
            pairs.append((chain, lower, upper))
    return pairs


def _run_kernel_chain(rc: ResolvedConfig, threads: int) -> tuple:
    pairs = _chain_pairs(rc)
    rows = ["chain,lower,upper,verdict,min_slack,witness"]
    curves = {}
    for chain, lower, upper in pairs:
        verdict = dists.check_cx(lower, upper)
        a_max = max(dists.support_upper(lower), dists.support_upper(upper))
        grid = np.arange(0.0, a_max + 0.5, 0.5)
        slack = min(
            dists.stop_loss(upper, a) - dists.stop_loss(lower, a) for a in grid
        )
        witness = "" if verdict.witness is None else format(verdict.witness, ".17g")
        rows.append(
            f"{chain},{_dist_label(lower)},{_dist_label(upper)},"
            f"{verdict.status},{format(slack, '.17g')},{witness}"
        )
        for d in (lower, upper):
            label = f"{chain}: {_dist_label(d)}"
            if label not in curves:
                top = dists.support_upper(d)
                xs = [0.5 * i for i in range(2 * min(top, 12) + 1)]
                curves[label] = (xs, [dists.stop_loss(d, a) for a in xs])
    files = [("chain.csv", "\n".join(rows) + "\n")]
    plots = [
        (
            "chain.svg",
            svg_plot(
                [(label, xs, ys) for label, (xs, ys) in curves.items()],
                "Stop-loss transforms along the chains",
                "a",
                "E(X-a)+",
            ),
        )
    ]
    return files, plots


_RUNNERS = {
    "sample": _run_sample,
    "summary": _run_summary,
    "compare": _run_compare,
    "percolation": _run_percolation,
    "coverage": _run_coverage,
    "sinr": _run_sinr,
    "graph": _run_graph,
    "complex": _run_complex,
    "kernel_chain": _run_kernel_chain,
}


# ---------------------------------------------------------------------------
# Entry point.
# ---------------------------------------------------------------------------


def _parse_overrides(extra: list) -> list:
    overrides = []
    i = 0
    while i < len(extra):
        token = extra[i]
        match = re.fullmatch(r"--([A-Za-z0-9_]+)\.([A-Za-z0-9_]+)", token)
        if match is None or i + 1 >= len(extra):
            raise ConfigError(
                f"unrecognized argument {token!r} (overrides are "
                "--section.key value pairs)"
            )
        overrides.append((match[1].lower(), match[2].lower(), extra[i + 1]))
        i += 2
    return overrides


def _resolve_threads(flag: Optional[int]) -> int:
    if flag is not None:
        value = flag
    else:
        env = os.environ.get(THREADS_ENV_VAR)
        if env is None or not env.strip():
            value = 1
        else:
            try:
                value = int(env)
            except ValueError:
                raise ConfigError(
                    f"environment variable {THREADS_ENV_VAR} must be an "
                    f"integer, got {env!r}"
                )
    if value < 1:
        raise ConfigError("thread count must be >= 1")
    return value


def _check_meta(experiment: str, meta: dict) -> None:
    for key in meta:
        if key not in ("experiment", "version"):
            raise ConfigError(f"unknown key '{key}' in [meta]")
    declared = meta.get("experiment")
    if declared is not None and declared.strip() != experiment:
        raise ConfigError(
            f"[meta] experiment: config declares {declared.strip()!r} but "
            f"{experiment!r} was requested"
        )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ppclust",
        description="Point-process simulation and clustering-comparison "
        "experiments with deterministic, reproducible artifacts.",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True, metavar="FILE")
    parser.add_argument("--seed", type=int, default=None, metavar="N")
    parser.add_argument("--threads", type=int, default=None, metavar="K")
    parser.add_argument("--plot", action="store_true")
    parser.add_argument("--out", default=".", metavar="DIR")
    args, extra = parser.parse_known_args(argv)

    try:
        overrides = _parse_overrides(extra)
        raw = read_config_file(Path(args.config))
        meta = raw.pop("meta", {})
        _check_meta(args.experiment, meta)
        for section, key, value in overrides:
            raw.setdefault(section, {})[key] = value
        if args.seed is not None:
            if "run" not in SCHEMAS[args.experiment]:
                raise ConfigError(
                    f"experiment {args.experiment!r} is deterministic and "
                    "takes no seed"
                )
            raw.setdefault("run", {})["seed"] = str(args.seed)
        rc = resolve_config(args.experiment, raw)
        threads = _resolve_threads(args.threads)
    except ConfigError as exc:
        print(f"ppclust: config error: {exc}", file=sys.stderr)
        return 2

    try:
        files, plots = _RUNNERS[args.experiment](rc, threads)
    except ConfigError as exc:
        print(f"ppclust: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"ppclust: runtime error: {exc}", file=sys.stderr)
        return 3

    artifacts = [("manifest.ini", render_manifest(rc))] + files
    if args.plot:
        artifacts += plots
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in artifacts:
            with open(out_dir / name, "w", newline="") as handle:
                handle.write(text)
    except OSError as exc:
        print(f"ppclust: runtime error: {exc}", file=sys.stderr)
        return 3
    for name, _ in artifacts:
        print(f"wrote {out_dir / name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
