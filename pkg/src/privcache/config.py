"""Scenario files: JSON in, validated :class:`~privcache.scheme.Scenario` out.

Two kinds are accepted.  A ``caching`` scenario gives ``N, K, F, M`` and the
joint law of the private symbol and the files, either as an explicit list of
``{"x", "y", "p"}`` entries (files as hex strings) or as a marginal of the
files plus a deterministic ``x_def``.  A ``direct`` scenario gives ``P_C``
and ``P_{X|C}`` with no caching layer.  Probabilities are strings such as
``"7/160"`` or decimals, converted exactly.

Every error names the offending field path, e.g. ``joint[3].p``.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from importlib import resources
from itertools import product
from pathlib import Path

from .caching import hex_to_file, make_params
from .common_info import joint_from_direct
from .errors import ValidationError
from .prob import JointTable, parse_rational
from .scheme import CachingLayer, DirectLayer, Scenario

SCHEMA = "privcache.scenario/1"


def _fail(path: str, msg: str):
    raise ValidationError(f"{path}: {msg}" if path else msg)


def _get(obj: dict, key: str, path: str, kind=None, default=...):
    if key not in obj:
        if default is ...:
            _fail(f"{path}.{key}".lstrip("."), "required field is missing")
        return default
    value = obj[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        _fail(f"{path}.{key}".lstrip("."), f"expected an integer, got {value!r}")
    if kind is list and not isinstance(value, list):
        _fail(f"{path}.{key}".lstrip("."), "expected a list")
    if kind is dict and not isinstance(value, dict):
        _fail(f"{path}.{key}".lstrip("."), "expected an object")
    return value


def _prob(value, path: str) -> Fraction:
    try:
        p = parse_rational(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        _fail(path, f"not a probability: {value!r} ({exc})")
    if not 0 <= p <= 1:
        _fail(path, f"probability {p} outside [0, 1]")
    return p


def _check_total(masses, path: str):
    total = sum(masses, Fraction(0))
    if total != 1:
        _fail(path, f"probabilities sum to {total}, not exactly 1")


def parse_mode(text: str) -> tuple[str, int]:
    """``"exact"`` or ``"mc:<samples>"``."""
    if text == "exact":
        return "exact", 0
    if text.startswith("mc:"):
        try:
            n = int(text[3:])
        except ValueError:
            n = -1
        if n >= 0:
            return "mc", n
    raise ValidationError(f"mode: expected 'exact' or 'mc:<samples>', got {text!r}")


def _files(raw, N: int, F: int, path: str) -> tuple[int, ...]:
    if not isinstance(raw, list) or len(raw) != N:
        _fail(path, f"expected a list of {N} hex strings")
    out = []
    for i, h in enumerate(raw):
        if not isinstance(h, str):
            _fail(f"{path}[{i}]", "expected a hex string")
        try:
            out.append(hex_to_file(h, F))
        except ValidationError as exc:
            _fail(f"{path}[{i}]", str(exc))
    return tuple(out)


def _x_index(raw, x_size: int, path: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int) or not 0 <= raw < x_size:
        _fail(path, f"expected an index in [0, {x_size})")
    return raw


def _y_marginal(cfg: dict, N: int, F: int) -> dict:
    raw = _get(cfg, "y_marginal", "")
    if isinstance(raw, dict) and "independent" in raw:
        per_file = raw["independent"]
        if not isinstance(per_file, list) or len(per_file) != N:
            _fail("y_marginal.independent", f"expected one table per file ({N})")
        tables = []
        for n, table in enumerate(per_file):
            path = f"y_marginal.independent[{n}]"
            if not isinstance(table, dict):
                _fail(path, "expected an object mapping hex file values to probabilities")
            parsed = {}
            for h, p in table.items():
                try:
                    v = hex_to_file(h, F)
                except ValidationError as exc:
                    _fail(f"{path}.{h}", str(exc))
                parsed[v] = parsed.get(v, Fraction(0)) + _prob(p, f"{path}.{h}")
            _check_total(parsed.values(), path)
            tables.append(parsed)
        out = {}
        for combo in product(*(t.items() for t in tables)):
            mass = Fraction(1)
            for _, p in combo:
                mass *= p
            if mass:
                out[tuple(v for v, _ in combo)] = mass
        return out
    if not isinstance(raw, list):
        _fail("y_marginal", "expected a list of {y, p} entries or {independent: [...]}")
    out = {}
    for i, e in enumerate(raw):
        path = f"y_marginal[{i}]"
        if not isinstance(e, dict):
            _fail(path, "expected an object")
        y = _files(_get(e, "y", path), N, F, f"{path}.y")
        out[y] = out.get(y, Fraction(0)) + _prob(_get(e, "p", path), f"{path}.p")
    _check_total(out.values(), "y_marginal")
    return out


def _bit(y: tuple[int, ...], n: int, b: int, F: int) -> int:
    return (y[n - 1] >> (F - b)) & 1


def _x_map(cfg: dict, N: int, F: int, x_size: int):
    raw = _get(cfg, "x_def", "")
    if isinstance(raw, dict) and "bits" in raw:
        bits = raw["bits"]
        if not isinstance(bits, list) or not bits:
            _fail("x_def.bits", "expected a non-empty list of [file, bit] pairs")
        for i, pair in enumerate(bits):
            ok = isinstance(pair, list) and len(pair) == 2 and all(isinstance(v, int) for v in pair)
            if not ok or not (1 <= pair[0] <= N and 1 <= pair[1] <= F):
                _fail(f"x_def.bits[{i}]", f"expected [file in 1..{N}, bit in 1..{F}]")
        if 2 ** len(bits) > x_size:
            _fail("x_def.bits", f"{len(bits)} bits do not fit the x alphabet of size {x_size}")

        def f(y):
            x = 0
            for n, b in bits:
                x = (x << 1) | _bit(y, n, b, F)
            return x

        return f
    if not isinstance(raw, list):
        _fail("x_def", "expected {bits: [[file, bit], ...]} or a list of {y, x} entries")
    table = {}
    for i, e in enumerate(raw):
        path = f"x_def[{i}]"
        if not isinstance(e, dict):
            _fail(path, "expected an object")
        y = _files(_get(e, "y", path), N, F, f"{path}.y")
        table[y] = _x_index(_get(e, "x", path), x_size, f"{path}.x")

    def g(y):
        if y not in table:
            _fail("x_def", f"no x given for database {y}")
        return table[y]

    return g


def _caching(cfg: dict, x_size: int) -> tuple:
    N = _get(cfg, "N", "", int)
    K = _get(cfg, "K", "", int)
    F = _get(cfg, "F", "", int)
    M = _get(cfg, "M", "")
    try:
        params = make_params(N, K, F, M)
    except ValidationError as exc:
        raise type(exc)(f"N/K/F/M: {exc}") from None
    shape = (x_size, (1 << F,) * N)
    if "joint" in cfg:
        entries = {}
        for i, e in enumerate(_get(cfg, "joint", "", list)):
            path = f"joint[{i}]"
            if not isinstance(e, dict):
                _fail(path, "expected an object")
            x = _x_index(_get(e, "x", path), x_size, f"{path}.x")
            y = _files(_get(e, "y", path), N, F, f"{path}.y")
            entries[(x, y)] = entries.get((x, y), Fraction(0)) + _prob(_get(e, "p", path), f"{path}.p")
        _check_total(entries.values(), "joint")
    else:
        marg = _y_marginal(cfg, N, F)
        fx = _x_map(cfg, N, F, x_size)
        entries = {}
        for y, p in marg.items():
            key = (fx(y), y)
            entries[key] = entries.get(key, Fraction(0)) + p
    return JointTable(entries, shape), CachingLayer(params)


def _direct(cfg: dict, x_size: int) -> tuple:
    p_c = [_prob(v, f"p_c[{i}]") for i, v in enumerate(_get(cfg, "p_c", "", list))]
    if not p_c:
        _fail("p_c", "must not be empty")
    _check_total(p_c, "p_c")
    rows = _get(cfg, "p_x_given_c", "", list)
    if len(rows) != x_size:
        _fail("p_x_given_c", f"expected {x_size} rows (one per x), got {len(rows)}")
    matrix = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(p_c):
            _fail(f"p_x_given_c[{i}]", f"expected {len(p_c)} entries")
        matrix.append([_prob(v, f"p_x_given_c[{i}][{j}]") for j, v in enumerate(row)])
    for c in range(len(p_c)):
        _check_total([r[c] for r in matrix], f"p_x_given_c[*][{c}]")
    return joint_from_direct(p_c, matrix), DirectLayer(len(p_c))


def _demands(cfg: dict, layer):
    raw = cfg.get("demands", "all")
    if raw == "all":
        return None
    if not isinstance(raw, list):
        _fail("demands", "expected 'all' or a list of demand vectors")
    out = []
    for i, d in enumerate(raw):
        if not isinstance(d, list):
            _fail(f"demands[{i}]", "expected a list of file indices")
        try:
            out.append(layer.check_demand(d))
        except ValidationError as exc:
            _fail(f"demands[{i}]", str(exc))
    return out


def parse_scenario(cfg: dict, source_sha256: str | None = None) -> Scenario:
    """Validate a decoded JSON object and build the scenario it describes."""
    if not isinstance(cfg, dict):
        _fail("", "scenario must be a JSON object")
    schema = cfg.get("schema", SCHEMA)
    if schema != SCHEMA:
        _fail("schema", f"unsupported schema {schema!r}, expected {SCHEMA!r}")
    name = str(cfg.get("name", "unnamed"))
    kind = _get(cfg, "kind", "")
    x_size = _get(cfg, "x_alphabet", "", int)
    if x_size < 1:
        _fail("x_alphabet", "must be at least 1")
    if kind == "caching":
        joint, layer = _caching(cfg, x_size)
    elif kind == "direct":
        joint, layer = _direct(cfg, x_size)
    else:
        _fail("kind", f"expected 'caching' or 'direct', got {kind!r}")
    T = _get(cfg, "T", "", int, default=x_size)
    if T < 1:
        _fail("T", "key alphabet size must be at least 1")
    mode, samples = parse_mode(_get(cfg, "mode", "", default="exact"))
    seed = _get(cfg, "seed", "", int, default=0)
    extras = {"sha256": source_sha256} if source_sha256 else {}
    return Scenario(name, x_size, T, joint, layer, _demands(cfg, layer), mode, samples, seed, extras)


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario file; the SHA-256 of its bytes goes into ``extras``."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read scenario ({exc.strerror})") from None
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return parse_scenario(cfg, hashlib.sha256(raw).hexdigest())


def example_path(name: str) -> Path:
    """Path of a scenario shipped with the package, e.g. ``example_path("example1")``."""
    ref = resources.files("privcache") / "data" / f"{name}.json"
    return Path(str(ref))
