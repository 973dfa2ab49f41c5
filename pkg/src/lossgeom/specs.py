"""Mini-language for loss specifications.

Family specs (case-insensitive)::

    log            log:n=3
    brier          zeroone         const
    cnorm:a=-1     cnorm:a=0.75,n=3
    cd:a=1,1       cd:a=2,1
    normloss:alpha=2      normloss:alpha=inf

Composition specs::

    msum:combiner=<family>;parts=<family>,<family>[;mode=dual]

Values may be ``inf``/``-inf``.  Commas inside a vector value (``cd:a=1,1``)
are disambiguated by the rule that a bare number continues the previous
key's value list.  Malformed input raises :class:`SpecError` carrying the
offending position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .calculus import MSumSpec, compose
from .families import (
    brier_loss,
    cnorm_loss,
    cobb_douglas_loss,
    constant_loss,
    log_loss,
    norm_loss,
    zero_one_loss,
)
from .geometry import ProperLoss

__all__ = ["SpecError", "LossSpec", "parse_loss_spec", "build_loss", "loss_from_text"]


class SpecError(ValueError):
    """Parse failure with the position of the offending character."""

    def __init__(self, message: str, text: str, position: int):
        self.position = position
        self.text = text
        caret = " " * position + "^"
        super().__init__(f"{message}\n  {text}\n  {caret}")


@dataclass(frozen=True)
class LossSpec:
    """Parsed loss specification (family or composition)."""

    family: str
    params: dict = field(default_factory=dict)
    combiner: "LossSpec | None" = None
    parts: tuple = ()
    mode: str = "direct"

    @property
    def is_composition(self) -> bool:
        return self.family == "msum"

    def resolved(self, n: int) -> str:
        """Canonical text that reparses to an equivalent spec."""
        if self.is_composition:
            inner = ",".join(p.resolved(n) for p in self.parts)
            return (
                f"msum:combiner={self.combiner.resolved(len(self.parts))};"
                f"parts={inner};mode={self.mode}"
            )
        if self.family == "cd":
            return "cd:a=" + ",".join(_fmt_num(v) for v in self.params["a"])
        bits = [self.family]
        if self.family == "cnorm":
            bits.append(f"a={_fmt_num(self.params['a'])}")
        if self.family == "normloss":
            bits.append(f"alpha={_fmt_num(self.params['alpha'])}")
        bits.append(f"n={n}")
        return bits[0] + ":" + ",".join(bits[1:])


def _fmt_num(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if float(v) == int(v):
        return str(int(v))
    return repr(float(v))


def _parse_number(token: str, text: str, pos: int) -> float:
    t = token.strip().lower()
    if t in ("inf", "+inf"):
        return math.inf
    if t == "-inf":
        return -math.inf
    try:
        return float(t)
    except ValueError:
        raise SpecError(f"expected a number, got {token!r}", text, pos) from None


def _is_number(token: str) -> bool:
    t = token.strip().lower()
    if t in ("inf", "+inf", "-inf"):
        return True
    try:
        float(t)
        return True
    except ValueError:
        return False


def _parse_params(body: str, text: str, offset: int) -> dict:
    """key=value lists; a bare numeric token extends the previous value."""
    params: dict[str, list[float]] = {}
    order: list[str] = []
    pos = offset
    current: str | None = None
    for token in body.split(","):
        if "=" in token:
            key, _, val = token.partition("=")
            key = key.strip()
            if not key.isidentifier():
                raise SpecError(f"bad parameter name {key!r}", text, pos)
            if key in params:
                raise SpecError(f"duplicate parameter {key!r}", text, pos)
            params[key] = [_parse_number(val, text, pos + len(key) + 1)]
            order.append(key)
            current = key
        elif _is_number(token):
            if current is None:
                raise SpecError("value without a parameter name", text, pos)
            params[current].append(_parse_number(token, text, pos))
        else:
            raise SpecError(f"cannot parse parameter {token!r}", text, pos)
        pos += len(token) + 1
    return {k: (v[0] if len(v) == 1 else v) for k, v in params.items()}


_FAMILY_KEYS = {
    "log": set(),
    "brier": set(),
    "zeroone": set(),
    "const": set(),
    "cnorm": {"a"},
    "cd": {"a"},
    "normloss": {"alpha"},
}


def _parse_family(text: str, fragment: str, offset: int) -> LossSpec:
    name, sep, body = fragment.partition(":")
    name = name.strip().lower()
    if name not in _FAMILY_KEYS:
        raise SpecError(f"unknown loss family {name!r}", text, offset)
    params = _parse_params(body, text, offset + len(name) + 1) if sep else {}
    allowed = _FAMILY_KEYS[name] | {"n"}
    for key in params:
        if key not in allowed:
            raise SpecError(
                f"family {name!r} does not take parameter {key!r}", text, offset
            )
    missing = _FAMILY_KEYS[name] - set(params)
    if missing:
        raise SpecError(
            f"family {name!r} requires parameter {sorted(missing)[0]!r}",
            text,
            offset,
        )
    if name == "cd":
        a = params["a"]
        params["a"] = [a] if isinstance(a, float) else list(a)
        if len(params["a"]) < 2:
            raise SpecError("cd needs a parameter vector of dimension >= 2", text, offset)
    for key in ("a", "alpha", "n"):
        if key == "a" and name == "cd":
            continue
        if key in params and not isinstance(params[key], float):
            raise SpecError(f"parameter {key!r} takes a single value", text, offset)
    if "n" in params and (params["n"] != int(params["n"]) or params["n"] < 2):
        raise SpecError("n must be an integer >= 2", text, offset)
    if name == "cnorm" and (params["a"] == 0 or params["a"] > 1):
        raise SpecError(
            "cnorm exponent must lie in [-inf, 1] and be nonzero", text, offset
        )
    if name == "normloss" and params["alpha"] < 1:
        raise SpecError("normloss exponent must lie in [1, inf]", text, offset)
    if name == "cd" and any(v <= 0 for v in params["a"]):
        raise SpecError("cd parameters must be strictly positive", text, offset)
    return LossSpec(family=name, params=params)


def _split_specs(body: str) -> list[str]:
    """Split a comma-separated list of specs, letting bare numbers continue
    the previous spec (so ``cd:a=1,1,log`` splits into ``cd:a=1,1`` and
    ``log``)."""
    chunks: list[str] = []
    for token in body.split(","):
        if chunks and _is_number(token):
            chunks[-1] += "," + token
        else:
            chunks.append(token)
    return chunks


def parse_loss_spec(text: str) -> LossSpec:
    """Parse a loss spec; raises SpecError with a caret position on failure."""
    stripped = text.strip()
    low = stripped.lower()
    if not stripped:
        raise SpecError("empty loss spec", text, 0)
    if low.startswith("msum:"):
        segments = stripped[len("msum:"):].split(";")
        combiner = None
        parts: list[LossSpec] = []
        mode = "direct"
        offset = len("msum:")
        seen = set()
        for seg in segments:
            key, sep, val = seg.partition("=")
            key = key.strip().lower()
            if not sep or key not in ("combiner", "parts", "mode"):
                raise SpecError(
                    "expected combiner=/parts=/mode= segment", text, offset
                )
            if key in seen:
                raise SpecError(f"duplicate segment {key!r}", text, offset)
            seen.add(key)
            if key == "combiner":
                if val.strip().lower().startswith("msum:"):
                    raise SpecError("nested compositions are not supported", text, offset)
                combiner = _parse_family(text, val.strip(), offset + len("combiner="))
            elif key == "parts":
                at = offset + len("parts=")
                for chunk in _split_specs(val):
                    if chunk.strip().lower().startswith("msum:"):
                        raise SpecError(
                            "nested compositions are not supported", text, at
                        )
                    parts.append(_parse_family(text, chunk.strip(), at))
                    at += len(chunk) + 1
            else:
                mode = val.strip().lower()
                if mode not in ("direct", "dual"):
                    raise SpecError(
                        f"mode must be 'direct' or 'dual', got {mode!r}", text, offset
                    )
            offset += len(seg) + 1
        if combiner is None:
            raise SpecError("composition needs a combiner= segment", text, 0)
        if len(parts) < 2:
            raise SpecError("composition needs at least two parts", text, 0)
        return LossSpec(
            family="msum", combiner=combiner, parts=tuple(parts), mode=mode
        )
    return _parse_family(text, stripped, 0)


def build_loss(spec: LossSpec, n: int | None = None) -> ProperLoss:
    """Instantiate a parsed spec at dimension n (default 2 where not implied)."""
    if spec.is_composition:
        parts = tuple(build_loss(p, n) for p in spec.parts)
        combiner = build_loss(spec.combiner, len(parts))
        return compose(MSumSpec(combiner=combiner, parts=parts, mode=spec.mode))

    dim = spec.params.get("n")
    dim = int(dim) if dim is not None else n
    if spec.family == "cd":
        a = spec.params["a"]
        if dim is not None and dim != len(a):
            raise ValueError(
                f"cd parameter vector has dimension {len(a)}, context wants {dim}"
            )
        return cobb_douglas_loss(a)
    if dim is None:
        dim = 2
    if spec.family == "log":
        return log_loss(dim)
    if spec.family == "brier":
        return brier_loss(dim)
    if spec.family == "zeroone":
        return zero_one_loss(dim)
    if spec.family == "const":
        return constant_loss(dim)
    if spec.family == "cnorm":
        return cnorm_loss(spec.params["a"], dim)
    if spec.family == "normloss":
        return norm_loss(spec.params["alpha"], dim)
    raise AssertionError(f"unhandled family {spec.family}")  # pragma: no cover


def loss_from_text(text: str, n: int | None = None) -> ProperLoss:
    return build_loss(parse_loss_spec(text), n)
