"""Scenario files: ``key = value`` lines feeding the command-line tool.

A value may run over several lines as long as its brackets are unbalanced::

    # suspension of a circle-like leaf
    space = susp(leaf(dim=1, H=[Z, Z/6]))
    perversity = perversity {
        1 = (0, {2});
        2 = (0, {2});
    }
    stratum = "susp"

Unknown keys and repeated keys are rejected with a line number.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional

from tsdeligne.errors import ParseError
from tsdeligne.fgmod import F, Prime
from tsdeligne.perversity import CoefficientData, Perversity, PervValue
from tsdeligne.space import SpaceExpr, to_text as space_text
from tsdeligne.syntax import Parser

DEMOS = ("join-vs-susp", "sing-in-sing", "sing-in-reg")


@dataclass(frozen=True)
class Scenario:
    space: Optional[SpaceExpr] = None
    perversity: Optional[Perversity] = None
    coeffs: Optional[CoefficientData] = None
    stratum: Optional[str] = None
    coarse_space: Optional[SpaceExpr] = None
    coarse_perversity: Optional[Perversity] = None
    map: Optional[tuple[tuple[str, str], ...]] = None
    m: Optional[int] = None
    q: Optional[Prime] = None
    weak: Optional[bool] = None
    literal: Optional[bool] = None
    demo: Optional[str] = None
    k: Optional[int] = None
    link: Optional[SpaceExpr] = None
    inner: Optional[Perversity] = None
    value: Optional[PervValue] = None
    value_bar: Optional[PervValue] = None

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            lines.append(f"{f.name} = {_render(f.name, v)}")
        return "\n".join(lines) + "\n"

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ParseError(f"scenario is missing required keys: {', '.join(missing)}")


KEYS = tuple(f.name for f in fields(Scenario))


def _render(key: str, v) -> str:
    if key in ("space", "coarse_space", "link"):
        return space_text(v)
    if key in ("perversity", "coarse_perversity", "inner"):
        return v.to_text()
    if key == "coeffs":
        return v.to_text()
    if key in ("value", "value_bar"):
        return v.to_text()
    if key == "map":
        return "{ " + " ".join(f'"{a}" -> "{b}";' for a, b in v) + " }"
    if key in ("stratum", "demo"):
        return f'"{v}"'
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _balanced_chunks(text: str):
    """Yield (line, key, value_text, value_col) for each entry."""
    lines = text.split("\n")
    i = 0
    while i < len(lines):
        raw = lines[i]
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            i += 1
            continue
        if "=" not in raw:
            raise ParseError("expected 'key = value'", i + 1, 1)
        key_part, value_part = raw.split("=", 1)
        key = key_part.strip()
        col = len(key_part) + 2
        start_line = i
        buf = [value_part]
        depth = _depth(value_part)
        while depth > 0:
            i += 1
            if i >= len(lines):
                raise ParseError(f"unbalanced brackets in value of {key!r}", start_line + 1, col)
            buf.append(lines[i])
            depth += _depth(lines[i])
        yield start_line + 1, key, "\n".join(buf), col
        i += 1


def _depth(s: str) -> int:
    s = s.split("#", 1)[0]
    return sum(s.count(c) for c in "([{") - sum(s.count(c) for c in ")]}")


def parse_scenario(text: str) -> Scenario:
    values: dict[str, object] = {}
    for line, key, value, col in _balanced_chunks(text):
        if key not in KEYS:
            raise ParseError(f"unknown key {key!r} (known keys: {', '.join(KEYS)})", line, 1)
        if key in values:
            raise ParseError(f"duplicate key {key!r}", line, 1)
        p = Parser(value, line_offset=line - 1)
        # Columns on the first line are relative to the value; shift them.
        p.tokens = [t if t.line != line else type(t)(t.kind, t.text, t.line, t.col + col - 1) for t in p.tokens]
        values[key] = _parse_value(key, p)
        p.expect_eof()
    return Scenario(**values)  # type: ignore[arg-type]


def _parse_value(key: str, p: Parser):
    if key in ("space", "coarse_space", "link"):
        return p.space()
    if key in ("perversity", "coarse_perversity", "inner"):
        return p.perversity()
    if key == "coeffs":
        tok = p.peek()
        groups = p.group_list()
        if len(groups) != 2:
            raise ParseError("coeffs takes exactly two groups [h0, h1]", tok.line, tok.col)
        try:
            return CoefficientData(groups[0], groups[1])
        except ValueError as exc:
            raise ParseError(str(exc), tok.line, tok.col) from None
    if key in ("value", "value_bar"):
        return p.perv_value()
    if key in ("stratum", "demo"):
        tok = p.peek()
        if tok.kind == "STRING":
            text = p.next().text[1:-1]
        else:
            # Allow bare ids such as susp/leaf.
            parts = [p.expect_kind("IDENT", "a stratum id").text]
            while p.accept("/"):
                parts.append(p.expect_kind("IDENT", "a stratum id").text)
            text = "/".join(parts)
        if key == "demo" and text not in DEMOS:
            raise ParseError(f"unknown demo {text!r}; choose from {', '.join(DEMOS)}", tok.line, tok.col)
        return text
    if key in ("m", "k"):
        return p.integer()
    if key == "q":
        if p.accept(F):
            return F
        return p.prime()
    if key in ("weak", "literal"):
        tok = p.next()
        if tok.text not in ("true", "false"):
            raise ParseError("expected true or false", tok.line, tok.col)
        return tok.text == "true"
    if key == "map":
        p.expect("{")
        pairs = []
        while not p.at("}"):
            a = p.expect_kind("STRING", "a quoted stratum id").text[1:-1]
            p.expect("-")
            if not p.accept(">"):
                raise p.error("expected '->'")
            b = p.expect_kind("STRING", "a quoted stratum id").text[1:-1]
            pairs.append((a, b))
            if not p.accept(";"):
                break
        p.expect("}")
        return tuple(pairs)
    raise ParseError(f"unknown key {key!r}")


def load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())
